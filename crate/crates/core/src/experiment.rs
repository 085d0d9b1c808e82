//! Experiment drivers: each one pairs an exact prediction with a Monte Carlo
//! estimate (or an exact structural fit) and emits a report whose rows state
//! the prediction, the estimate, the tolerance, and a pass flag that can be
//! recomputed from the printed columns alone.
//!
//! Reports are deterministic byte-for-byte: randomness is keyed by
//! `(seed, letter, sample, purpose)`, accumulation uses fixed sample blocks
//! merged in block order, and row order is a pure function of the config.

use crate::diagram::{classify, enumerate_diagram_pairs, leading_order, DiagramWeight};
use crate::ensemble::EnsembleKind;
use crate::error::{Error, Result};
use crate::freeprob::{cumulants_from_moments, mixed_word_limit, pt_limit_cumulants,
    pt_limit_moments, MomentFn, MomentTable};
use crate::matrix::{trace_product, normalized_trace_powers, ComplexMatrix};
use crate::mc::{blocked_stats, purpose, rng_stream, MomentEstimate};
use crate::scalar::{CRat, Scalar};
use crate::weingarten::haar_moment_interleaved;
use crate::word::{
    entry_word_to_string, parse_symbol_word, parse_word, EntryFactor, Letter, Symbol, Word,
    WordLetter,
};
use crate::partition::{enumerate_set_partitions, Eps, EpsilonMap};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt::Write as _;

/// Seed used when a config does not set one. Its value is part of the
/// reproducibility contract: default runs must give identical reports
/// everywhere, and the statistical checks are frozen against this stream.
pub const DEFAULT_SEED: u64 = 1;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_entry_dim() -> usize {
    8
}

fn default_max_order() -> usize {
    4
}

fn default_entry_samples() -> usize {
    20_000
}

fn default_se_multiplier() -> f64 {
    4.0
}

fn default_finite_size_constant() -> f64 {
    2.0
}

fn default_cumulant_band() -> f64 {
    0.05
}

/// Width knobs of the statistical acceptance bands. Every verdict row
/// reports the tolerance it was judged against, so the policy in force is
/// always recoverable from the output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Multiplier of the estimated standard error.
    #[serde(default = "default_se_multiplier")]
    pub se_multiplier: f64,
    /// Finite-size slack added to moment bands as `finite_size_constant/dim`,
    /// covering the gap between a finite dimension and its limit.
    #[serde(default = "default_finite_size_constant")]
    pub finite_size_constant: f64,
    /// Fixed band for estimated-cumulant rows, whose limiting claims carry
    /// no convergence rate.
    #[serde(default = "default_cumulant_band")]
    pub cumulant_band: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            se_multiplier: default_se_multiplier(),
            finite_size_constant: default_finite_size_constant(),
            cumulant_band: default_cumulant_band(),
        }
    }
}

impl TolerancePolicy {
    fn validate(&self) -> Result<()> {
        let knobs = [
            self.se_multiplier,
            self.finite_size_constant,
            self.cumulant_band,
        ];
        if knobs.iter().any(|k| !k.is_finite() || *k < 0.0)
            || self.se_multiplier == 0.0
            || self.cumulant_band == 0.0
        {
            return Err(Error::Config(
                "tolerance knobs must be finite and positive (the finite-size \
                 constant may be zero)"
                    .into(),
            ));
        }
        Ok(())
    }

    /// The band for a moment row: a standard-error multiple plus the
    /// finite-size slack at dimension `dim`.
    fn moment_band(&self, se: f64, dim: usize) -> f64 {
        self.se_multiplier * se + self.finite_size_constant / dim as f64
    }
}

/// Checks a `(b, d)` dims ladder and returns the rung products.
fn validate_dims(dims: &[(usize, usize)]) -> Result<Vec<usize>> {
    if dims.is_empty() {
        return Err(Error::Config("the dims ladder must be nonempty".into()));
    }
    dims.iter()
        .map(|&(b, d)| {
            b.checked_mul(d)
                .filter(|&m| m > 0)
                .ok_or_else(|| Error::Config("bad leg dimensions".into()))
        })
        .collect()
}

/// A full experiment description; serialized as JSON with an `experiment`
/// tag selecting the variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum ExperimentConfig {
    /// Joint moments of single Haar-unitary entries: every canonical index
    /// pattern up to `max_order` is predicted exactly and estimated from
    /// `samples` independent unitaries of dimension `dim`.
    EntryMoments {
        #[serde(default = "default_entry_dim")]
        dim: usize,
        #[serde(default = "default_max_order")]
        max_order: usize,
        #[serde(default = "default_entry_samples")]
        samples: usize,
        #[serde(default = "default_seed")]
        seed: u64,
        #[serde(default)]
        tolerance: TolerancePolicy,
    },
    /// Moments and free cumulants of the right-leg flip of one ensemble
    /// draw on `C^b (x) C^d`, against the limiting predictions, for every
    /// `(b, d)` rung of the dims ladder.
    LimitDistribution {
        ensemble: EnsembleKind,
        dims: Vec<(usize, usize)>,
        #[serde(default = "default_max_order")]
        max_order: usize,
        samples: usize,
        #[serde(default = "default_seed")]
        seed: u64,
        #[serde(default)]
        tolerance: TolerancePolicy,
    },
    /// Second-order freeness grid: first moments of each flip of one draw,
    /// all pairwise second cumulants, and optional extra words, for every
    /// `(b, d)` rung of the dims ladder.
    Freeness {
        ensemble: EnsembleKind,
        dims: Vec<(usize, usize)>,
        samples: usize,
        #[serde(default = "default_seed")]
        seed: u64,
        #[serde(default)]
        words: Vec<String>,
        #[serde(default)]
        tolerance: TolerancePolicy,
    },
    /// Structural table of every pairing term of a flip-symbol word:
    /// classifier verdict against the exponent fitted from exact values on
    /// a dimension grid.
    Blocks { symbols: String, b_grid: Vec<u64> },
    /// Distribution probe: word traces of a draw versus the same draw
    /// conjugated by an independent Haar unitary, for every `(b, d)` rung
    /// of the dims ladder.
    Invariance {
        ensemble: EnsembleKind,
        dims: Vec<(usize, usize)>,
        samples: usize,
        #[serde(default = "default_seed")]
        seed: u64,
        #[serde(default)]
        words: Vec<String>,
        #[serde(default)]
        tolerance: TolerancePolicy,
    },
}

impl ExperimentConfig {
    /// Parses a JSON config.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The experiment tag as it appears in the `experiment` report column.
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentConfig::EntryMoments { .. } => "entry_moments",
            ExperimentConfig::LimitDistribution { .. } => "limit_distribution",
            ExperimentConfig::Freeness { .. } => "freeness",
            ExperimentConfig::Blocks { .. } => "blocks",
            ExperimentConfig::Invariance { .. } => "invariance",
        }
    }

    /// Overrides the sampling seed. The structural table is exact and has no
    /// seed; overriding one there is a configuration error.
    pub fn set_seed(&mut self, new_seed: u64) -> Result<()> {
        match self {
            ExperimentConfig::EntryMoments { seed, .. }
            | ExperimentConfig::LimitDistribution { seed, .. }
            | ExperimentConfig::Freeness { seed, .. }
            | ExperimentConfig::Invariance { seed, .. } => {
                *seed = new_seed;
                Ok(())
            }
            ExperimentConfig::Blocks { .. } => Err(Error::Config(
                "the structural table is exact and takes no seed".into(),
            )),
        }
    }
}

/// One prediction-versus-estimate row. The pass flag is always recomputable
/// from the printed values: it holds exactly when both component gaps
/// `|predicted - estimated|` are at most the tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictRow {
    pub experiment: String,
    pub word: String,
    pub b: usize,
    pub d: usize,
    pub samples: u64,
    pub seed: u64,
    pub predicted_re: f64,
    pub predicted_im: f64,
    pub estimated_re: f64,
    pub estimated_im: f64,
    pub std_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerdictRow {
    #[allow(clippy::too_many_arguments)]
    fn build(
        experiment: &str,
        word: String,
        b: usize,
        d: usize,
        samples: u64,
        seed: u64,
        predicted: (f64, f64),
        estimated: Complex64,
        std_error: f64,
        tolerance: f64,
    ) -> VerdictRow {
        let pass = (predicted.0 - estimated.re).abs() <= tolerance
            && (predicted.1 - estimated.im).abs() <= tolerance;
        VerdictRow {
            experiment: experiment.to_owned(),
            word,
            b,
            d,
            samples,
            seed,
            predicted_re: predicted.0,
            predicted_im: predicted.1,
            estimated_re: estimated.re,
            estimated_im: estimated.im,
            std_error,
            tolerance,
            pass,
        }
    }
}

/// One structural row of the pairing-term table.
#[derive(Clone, Debug, Serialize)]
pub struct BlockRow {
    pub p: String,
    pub q: String,
    pub join_blocks: String,
    pub classifier_verdict: String,
    pub reason: String,
    pub fitted_exponent: i64,
    pub leading_coefficient: String,
}

impl BlockRow {
    /// Consistency of this row: the classifier must say "survives" exactly
    /// when the fitted exponent is zero.
    pub fn consistent(&self) -> bool {
        (self.classifier_verdict == "survives") == (self.fitted_exponent == 0)
    }
}

/// Output format of a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!("unknown report format '{other}'"))),
        }
    }
}

/// A finished experiment: either prediction-versus-estimate verdicts or the
/// structural pairing table.
#[derive(Clone, Debug)]
pub enum Report {
    Verdicts(Vec<VerdictRow>),
    Blocks(Vec<BlockRow>),
}

const VERDICT_HEADER: &str = "experiment,word,b,d,samples,seed,predicted_re,predicted_im,\
estimated_re,estimated_im,std_error,tolerance,pass";
const BLOCK_HEADER: &str =
    "p,q,join_blocks,classifier_verdict,reason,fitted_exponent,leading_coefficient";

fn csv_field(s: &str) -> Cow<'_, str> {
    if s.contains([',', '"', '\n']) {
        Cow::Owned(format!("\"{}\"", s.replace('"', "\"\"")))
    } else {
        Cow::Borrowed(s)
    }
}

impl Report {
    /// Whether every row holds: verdict rows must pass, block rows must be
    /// internally consistent.
    pub fn all_pass(&self) -> bool {
        match self {
            Report::Verdicts(rows) => rows.iter().all(|r| r.pass),
            Report::Blocks(rows) => rows.iter().all(|r| r.consistent()),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Report::Verdicts(rows) => rows.len(),
            Report::Blocks(rows) => rows.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn verdict_rows(&self) -> Option<&[VerdictRow]> {
        match self {
            Report::Verdicts(rows) => Some(rows),
            Report::Blocks(_) => None,
        }
    }

    pub fn block_rows(&self) -> Option<&[BlockRow]> {
        match self {
            Report::Blocks(rows) => Some(rows),
            Report::Verdicts(_) => None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Verdicts(rows) => {
                out.push_str(VERDICT_HEADER);
                out.push('\n');
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                        csv_field(&r.experiment),
                        csv_field(&r.word),
                        r.b,
                        r.d,
                        r.samples,
                        r.seed,
                        r.predicted_re,
                        r.predicted_im,
                        r.estimated_re,
                        r.estimated_im,
                        r.std_error,
                        r.tolerance,
                        r.pass
                    );
                }
            }
            Report::Blocks(rows) => {
                out.push_str(BLOCK_HEADER);
                out.push('\n');
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        csv_field(&r.p),
                        csv_field(&r.q),
                        csv_field(&r.join_blocks),
                        csv_field(&r.classifier_verdict),
                        csv_field(&r.reason),
                        r.fitted_exponent,
                        csv_field(&r.leading_coefficient)
                    );
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let text = match self {
            Report::Verdicts(rows) => serde_json::to_string_pretty(rows)?,
            Report::Blocks(rows) => serde_json::to_string_pretty(rows)?,
        };
        Ok(text)
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Csv => Ok(self.to_csv()),
            ReportFormat::Json => self.to_json(),
        }
    }
}

/// Runs any experiment config.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    match config {
        ExperimentConfig::EntryMoments { .. } => run_entry_moments(config),
        ExperimentConfig::LimitDistribution { .. } => run_limit_distribution(config),
        ExperimentConfig::Freeness { .. } => run_freeness(config),
        ExperimentConfig::Blocks { .. } => run_blocks(config),
        ExperimentConfig::Invariance { .. } => run_invariance(config),
    }
}

/// One exact prediction at a `(b, d)` rung: the word, its double view, and
/// the exact rational rendering.
#[derive(Clone, Debug, Serialize)]
pub struct PredictionRow {
    pub word: String,
    pub b: usize,
    pub d: usize,
    pub value_re: f64,
    pub value_im: f64,
    pub exact: String,
}

const PREDICTION_HEADER: &str = "word,b,d,value_re,value_im,exact";

/// CSV rendering of prediction rows.
pub fn predictions_to_csv(rows: &[PredictionRow]) -> String {
    let mut out = String::from(PREDICTION_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_field(&r.word),
            r.b,
            r.d,
            r.value_re,
            r.value_im,
            csv_field(&r.exact)
        );
    }
    out
}

/// Exact prediction rows of a config, without any sampling. The structural
/// table config has its own exact output (use [`run`]); the invariance probe
/// asserts a distributional identity rather than values, so it has none.
pub fn prediction_rows(config: &ExperimentConfig) -> Result<Vec<PredictionRow>> {
    match config {
        ExperimentConfig::EntryMoments { dim, max_order, .. } => {
            if *max_order == 0 || *max_order > 4 || dim < max_order {
                return Err(Error::Config(
                    "entry-moment order must lie in 1..=4 and fit the dimension".into(),
                ));
            }
            let dim_big = BigInt::from(*dim);
            let mut rows = Vec::new();
            for order in 1..=*max_order {
                for factors in canonical_entry_patterns(order)? {
                    let value = exact_entry_value(&factors, &dim_big)?;
                    rows.push(PredictionRow {
                        word: entry_word_to_string(&factors),
                        b: *dim,
                        d: 1,
                        value_re: value.to_f64().unwrap_or(f64::NAN),
                        value_im: 0.0,
                        exact: value.to_string(),
                    });
                }
            }
            Ok(rows)
        }
        ExperimentConfig::LimitDistribution {
            ensemble,
            dims,
            max_order,
            ..
        } => {
            let rung_dims = validate_dims(dims)?;
            let mut rows = Vec::new();
            for (&(b, d), dim) in dims.iter().zip(rung_dims) {
                ensemble.validate(dim)?;
                let ld = ensemble.limit_data(dim, 1)?;
                rows.extend(
                    limit_prediction_labels(&ld, *max_order)?
                        .into_iter()
                        .map(|(word, value)| prediction_row(word, b, d, &value)),
                );
            }
            Ok(rows)
        }
        ExperimentConfig::Freeness {
            ensemble,
            dims,
            words,
            ..
        } => {
            validate_dims(dims)?;
            let extra: Vec<Word> = words
                .iter()
                .map(|w| parse_word(w))
                .collect::<Result<Vec<_>>>()?;
            let mut rows = Vec::new();
            for &(b, d) in dims {
                rows.extend(
                    freeness_prediction_labels(ensemble, b, d, &extra)?
                        .into_iter()
                        .map(|(word, value)| prediction_row(word, b, d, &value)),
                );
            }
            Ok(rows)
        }
        ExperimentConfig::Blocks { .. } => Err(Error::Config(
            "the structural table is already exact; run the experiment itself".into(),
        )),
        ExperimentConfig::Invariance { .. } => Err(Error::Config(
            "the invariance probe asserts a distributional identity; it has no value predictions"
                .into(),
        )),
    }
}

fn prediction_row(word: String, b: usize, d: usize, value: &CRat) -> PredictionRow {
    let (re, im) = value.to_f64_pair();
    PredictionRow {
        word,
        b,
        d,
        value_re: re,
        value_im: im,
        exact: value.to_string(),
    }
}

// ---------------------------------------------------------------------------
// Entry moments
// ---------------------------------------------------------------------------

/// Canonical entry patterns of a given order: every pair of index-identity
/// patterns (set partitions for rows and columns) combined with every
/// conjugation mask. Representative indices are the 1-based block numbers.
fn canonical_entry_patterns(order: usize) -> Result<Vec<Vec<EntryFactor>>> {
    let partitions = enumerate_set_partitions(order)?;
    let block_index = |part: &crate::partition::SetPartition| {
        let mut idx = vec![0usize; order + 1];
        for (bi, block) in part.blocks().iter().enumerate() {
            for &x in block {
                idx[x] = bi + 1;
            }
        }
        idx
    };
    let mut out = Vec::new();
    for rows_part in &partitions {
        let row_idx = block_index(rows_part);
        for cols_part in &partitions {
            let col_idx = block_index(cols_part);
            for mask in 0..(1u32 << order) {
                let factors: Vec<EntryFactor> = (1..=order)
                    .map(|t| EntryFactor {
                        row: row_idx[t],
                        col: col_idx[t],
                        star: (mask >> (t - 1)) & 1 == 1,
                    })
                    .collect();
                out.push(factors);
            }
        }
    }
    Ok(out)
}

/// Exact joint moment of one canonical entry pattern.
fn exact_entry_value(
    factors: &[EntryFactor],
    dim: &BigInt,
) -> Result<num_rational::BigRational> {
    let rows: Vec<usize> = factors.iter().map(|f| f.row).collect();
    let cols: Vec<usize> = factors.iter().map(|f| f.col).collect();
    let eps: Vec<Eps> = factors
        .iter()
        .map(|f| if f.star { Eps::Star } else { Eps::Plain })
        .collect();
    haar_moment_interleaved(&rows, &cols, &EpsilonMap::from_slice(&eps), dim)
}

pub fn run_entry_moments(config: &ExperimentConfig) -> Result<Report> {
    let ExperimentConfig::EntryMoments {
        dim,
        max_order,
        samples,
        seed,
        tolerance,
    } = *config
    else {
        return Err(Error::Config("expected an entry_moments config".into()));
    };
    tolerance.validate()?;
    if max_order == 0 || max_order > 4 {
        return Err(Error::Config(
            "entry-moment order must lie in 1..=4".into(),
        ));
    }
    if dim < max_order {
        return Err(Error::Config(
            "dimension must be at least the moment order".into(),
        ));
    }
    if samples == 0 {
        return Err(Error::Config("sample count must be positive".into()));
    }

    let mut patterns = Vec::new();
    for order in 1..=max_order {
        patterns.extend(canonical_entry_patterns(order)?);
    }
    let dim_big = BigInt::from(dim);
    let mut predictions = Vec::with_capacity(patterns.len());
    for factors in &patterns {
        let value = exact_entry_value(factors, &dim_big)?;
        predictions.push(value.to_f64().ok_or_else(|| {
            Error::invalid("exact prediction does not fit a double")
        })?);
    }

    let unitary = EnsembleKind::Unitary;
    let stats = blocked_stats(samples, patterns.len(), |sample, acc| {
        let u = unitary
            .sample(dim, seed, 1, sample as u64)
            .expect("validated unitary draw");
        for (k, factors) in patterns.iter().enumerate() {
            let mut prod = Complex64::new(1.0, 0.0);
            for f in factors {
                let entry = u.get(f.row - 1, f.col - 1);
                prod *= if f.star { entry.conj() } else { entry };
            }
            acc[k].push(prod);
        }
    })?;

    let mut rows = Vec::with_capacity(patterns.len());
    for ((factors, pred), stat) in patterns.iter().zip(&predictions).zip(&stats) {
        let est = stat.estimate()?;
        // The prediction is exact at this dimension, so the band is purely
        // statistical.
        let tol = tolerance.se_multiplier * est.se_max();
        rows.push(VerdictRow::build(
            config.name(),
            entry_word_to_string(factors),
            dim,
            1,
            est.samples,
            seed,
            (*pred, 0.0),
            est.mean,
            est.se_max(),
            tol,
        ));
    }
    Ok(Report::Verdicts(rows))
}

// ---------------------------------------------------------------------------
// Limit distribution of the right-leg flip
// ---------------------------------------------------------------------------

/// Labeled exact predictions for the right-flip experiment: moments of
/// orders `1..=max_order`, then free cumulants of orders `2..=max_order`.
fn limit_prediction_labels(
    ld: &crate::freeprob::LimitData<CRat>,
    max_order: usize,
) -> Result<Vec<(String, CRat)>> {
    if max_order == 0 || max_order > 4 {
        return Err(Error::Config("moment order must lie in 1..=4".into()));
    }
    let letter = Letter::new(1);
    let mut out = Vec::new();
    for k in 1..=max_order {
        out.push((
            vec!["AG"; k].join(" "),
            pt_limit_moments(ld, &vec![letter; k])?,
        ));
    }
    for r in 2..=max_order {
        out.push((
            format!("k{r}(AG)"),
            pt_limit_cumulants(ld, &vec![letter; r])?,
        ));
    }
    Ok(out)
}

pub fn run_limit_distribution(config: &ExperimentConfig) -> Result<Report> {
    let ExperimentConfig::LimitDistribution {
        ref ensemble,
        ref dims,
        max_order,
        samples,
        seed,
        tolerance,
    } = *config
    else {
        return Err(Error::Config(
            "expected a limit_distribution config".into(),
        ));
    };
    tolerance.validate()?;
    if max_order == 0 || max_order > 4 {
        return Err(Error::Config("moment order must lie in 1..=4".into()));
    }
    if samples < 2 {
        return Err(Error::Config(
            "need at least two samples for standard errors".into(),
        ));
    }
    let rung_dims = validate_dims(dims)?;
    let letter = Letter::new(1);

    let mut rows = Vec::new();
    for (&(b, d), dim) in dims.iter().zip(rung_dims) {
        ensemble.validate(dim)?;
        let ld = ensemble.limit_data(dim, 1)?;
        let labeled = limit_prediction_labels(&ld, max_order)?;

        let stats = blocked_stats(samples, max_order, |sample, acc| {
            let a = ensemble
                .sample(dim, seed, 1, sample as u64)
                .expect("validated ensemble draw");
            let c = a
                .apply_symbol(Symbol::PartialRight, b, d)
                .expect("validated leg split");
            let powers = normalized_trace_powers(&c, max_order).expect("validated power orders");
            for (k, value) in powers.into_iter().enumerate() {
                acc[k].push(value);
            }
        })?;
        let estimates: Vec<MomentEstimate> =
            stats.iter().map(|s| s.estimate()).collect::<Result<_>>()?;

        for k in 1..=max_order {
            let est = &estimates[k - 1];
            let (word, predicted) = &labeled[k - 1];
            rows.push(VerdictRow::build(
                config.name(),
                word.clone(),
                b,
                d,
                est.samples,
                seed,
                predicted.to_f64_pair(),
                est.mean,
                est.se_max(),
                tolerance.moment_band(est.se_max(), dim),
            ));
        }

        // Free cumulants of the estimated moments against the limiting rule.
        let mut table: MomentTable<Letter, Complex64> = MomentTable::new();
        for k in 1..=max_order {
            table.insert(vec![letter; k], estimates[k - 1].mean);
        }
        for r in 2..=max_order {
            let word = vec![letter; r];
            let (label, predicted) = &labeled[max_order + r - 2];
            let estimated = cumulants_from_moments(&table, &word)?;
            rows.push(VerdictRow::build(
                config.name(),
                label.clone(),
                b,
                d,
                estimates[r - 1].samples,
                seed,
                predicted.to_f64_pair(),
                estimated,
                estimates[r - 1].se_max(),
                tolerance.cumulant_band,
            ));
        }
    }
    Ok(Report::Verdicts(rows))
}

// ---------------------------------------------------------------------------
// Freeness grid
// ---------------------------------------------------------------------------

const FLIPS: [Symbol; 4] = [
    Symbol::Identity,
    Symbol::Transpose,
    Symbol::PartialRight,
    Symbol::PartialLeft,
];

/// Labeled exact predictions of the freeness grid: four first moments, the
/// sixteen ordered pairwise second cumulants, the adjoint pair of the right
/// flip, the right flips of two independent draws, then the extra words.
/// Matching flips keep the base second cumulant; distinct flips — and
/// independent draws — are asymptotically free, so their mixed second
/// cumulants vanish.
fn freeness_prediction_labels(
    ensemble: &EnsembleKind,
    b: usize,
    d: usize,
    extra_words: &[Word],
) -> Result<Vec<(String, CRat)>> {
    let dim = b
        .checked_mul(d)
        .filter(|&m| m > 0)
        .ok_or_else(|| Error::Config("bad leg dimensions".into()))?;
    ensemble.validate(dim)?;
    let ld = ensemble.limit_data(dim, 1)?;
    let phi = MomentFn(|w: &[Letter]| ensemble.limit_moment(dim, w));
    let flip_word = |s: Symbol, star: bool| WordLetter::new(1, s, star).to_string();
    let m1 = ld.m1(Letter::new(1))?;
    let m1_star = ld.m1(Letter::starred(1))?;

    let mut out = Vec::new();
    for &s in &FLIPS {
        out.push((flip_word(s, false), m1.clone()));
    }
    for &s1 in &FLIPS {
        for &s2 in &FLIPS {
            let label = format!("k2({} {})", flip_word(s1, false), flip_word(s2, false));
            let value = if s1 == s2 {
                let word = vec![WordLetter::new(1, s1, false), WordLetter::new(1, s2, false)];
                let m2 = mixed_word_limit(&ld, &phi, &word)?;
                m2.sub(&m1.mul(&m1))
            } else {
                CRat::zero()
            };
            out.push((label, value));
        }
    }
    {
        let word = vec![
            WordLetter::new(1, Symbol::PartialRight, false),
            WordLetter::new(1, Symbol::PartialRight, true),
        ];
        let m2 = mixed_word_limit(&ld, &phi, &word)?;
        out.push(("k2(AG AG*)".to_owned(), m2.sub(&m1.mul(&m1_star))));
    }
    out.push(("k2(AG BG)".to_owned(), CRat::zero()));
    for w in extra_words {
        let name = w
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        let value = mixed_word_limit(&ld, &phi, w)
            .map_err(|e| Error::Config(format!("word prediction unavailable: {e}")))?;
        out.push((name, value));
    }
    Ok(out)
}

pub fn run_freeness(config: &ExperimentConfig) -> Result<Report> {
    let ExperimentConfig::Freeness {
        ref ensemble,
        ref dims,
        samples,
        seed,
        ref words,
        tolerance,
    } = *config
    else {
        return Err(Error::Config("expected a freeness config".into()));
    };
    tolerance.validate()?;
    if samples < 2 {
        return Err(Error::Config(
            "need at least two samples for standard errors".into(),
        ));
    }
    let rung_dims = validate_dims(dims)?;
    let extra_words: Vec<Word> = words
        .iter()
        .map(|w| parse_word(w))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (&(b, d), dim) in dims.iter().zip(rung_dims) {
        ensemble.validate(dim)?;
        // Building the predictions first also refuses words whose limit the
        // formulas cannot produce, so every emitted row is honestly
        // predicted.
        let labeled = freeness_prediction_labels(ensemble, b, d, &extra_words)?;

        // Statistics layout: 4 singles, 16 ordered pairs, the adjoint pair
        // of the right flip (these match `labeled` index for index), then
        // the right flip of an independent draw and its pairing with the
        // base draw (feeding the `labeled[21]` row), then the extra words.
        let n_stats = 4 + 16 + 1 + 2 + extra_words.len();
        let stats = blocked_stats(samples, n_stats, |sample, acc| {
            let base = ensemble
                .sample(dim, seed, 1, sample as u64)
                .expect("validated ensemble draw");
            let flipped: Vec<ComplexMatrix> = FLIPS
                .iter()
                .map(|&s| base.apply_symbol(s, b, d).expect("validated leg split"))
                .collect();
            let m = dim as f64;
            for (i, mat) in flipped.iter().enumerate() {
                acc[i].push(mat.trace().expect("square") / m);
            }
            for (i, m1) in flipped.iter().enumerate() {
                for (j, m2) in flipped.iter().enumerate() {
                    let tr = trace_product(m1, m2).expect("square") / m;
                    acc[4 + 4 * i + j].push(tr);
                }
            }
            let g = &flipped[2];
            acc[20].push(trace_product(g, &g.adjoint()).expect("square") / m);
            let other = ensemble
                .sample(dim, seed, 2, sample as u64)
                .expect("validated ensemble draw")
                .apply_symbol(Symbol::PartialRight, b, d)
                .expect("validated leg split");
            acc[21].push(other.trace().expect("square") / m);
            acc[22].push(trace_product(g, &other).expect("square") / m);
            let bases = HashMap::from([(1usize, base)]);
            for (k, w) in extra_words.iter().enumerate() {
                acc[23 + k].push(word_trace(&bases, b, d, w).expect("validated word"));
            }
        })?;
        let estimates: Vec<MomentEstimate> =
            stats.iter().map(|s| s.estimate()).collect::<Result<_>>()?;

        // First moments: every flip preserves the trace exactly.
        for i in 0..FLIPS.len() {
            let (label, pred) = &labeled[i];
            let est = &estimates[i];
            rows.push(VerdictRow::build(
                config.name(),
                label.clone(),
                b,
                d,
                est.samples,
                seed,
                pred.to_f64_pair(),
                est.mean,
                est.se_max(),
                tolerance.moment_band(est.se_max(), dim),
            ));
        }

        // Pairwise second cumulants, estimated as m2 - m1*m1 with the
        // standard errors of the three estimates propagated in quadrature.
        for i in 0..FLIPS.len() {
            for j in 0..FLIPS.len() {
                let (label, pred) = &labeled[4 + 4 * i + j];
                let est_pair = &estimates[4 + 4 * i + j];
                let est_i = &estimates[i];
                let est_j = &estimates[j];
                let estimated = est_pair.mean - est_i.mean * est_j.mean;
                let se = (est_pair.se_max().powi(2)
                    + (est_j.mean.norm() * est_i.se_max()).powi(2)
                    + (est_i.mean.norm() * est_j.se_max()).powi(2))
                .sqrt();
                rows.push(VerdictRow::build(
                    config.name(),
                    label.clone(),
                    b,
                    d,
                    est_pair.samples,
                    seed,
                    pred.to_f64_pair(),
                    estimated,
                    se,
                    tolerance.cumulant_band,
                ));
            }
        }

        // Adjoint pair of the right flip.
        {
            let (label, pred) = &labeled[20];
            let est_pair = &estimates[20];
            let est_g = &estimates[2];
            let estimated = est_pair.mean - est_g.mean * est_g.mean.conj();
            let se = (est_pair.se_max().powi(2)
                + 2.0 * (est_g.mean.norm() * est_g.se_max()).powi(2))
            .sqrt();
            rows.push(VerdictRow::build(
                config.name(),
                label.clone(),
                b,
                d,
                est_pair.samples,
                seed,
                pred.to_f64_pair(),
                estimated,
                se,
                tolerance.cumulant_band,
            ));
        }

        // Right flips of two independent draws of the same family.
        {
            let (label, pred) = &labeled[21];
            let est_pair = &estimates[22];
            let est_a = &estimates[2];
            let est_b = &estimates[21];
            let estimated = est_pair.mean - est_a.mean * est_b.mean;
            let se = (est_pair.se_max().powi(2)
                + (est_b.mean.norm() * est_a.se_max()).powi(2)
                + (est_a.mean.norm() * est_b.se_max()).powi(2))
            .sqrt();
            rows.push(VerdictRow::build(
                config.name(),
                label.clone(),
                b,
                d,
                est_pair.samples,
                seed,
                pred.to_f64_pair(),
                estimated,
                se,
                tolerance.cumulant_band,
            ));
        }

        for ((label, pred), est) in labeled[22..].iter().zip(&estimates[23..]) {
            rows.push(VerdictRow::build(
                config.name(),
                label.clone(),
                b,
                d,
                est.samples,
                seed,
                pred.to_f64_pair(),
                est.mean,
                est.se_max(),
                tolerance.moment_band(est.se_max(), dim),
            ));
        }
    }
    Ok(Report::Verdicts(rows))
}

// ---------------------------------------------------------------------------
// Pairing-term structure table
// ---------------------------------------------------------------------------

pub fn run_blocks(config: &ExperimentConfig) -> Result<Report> {
    let ExperimentConfig::Blocks {
        ref symbols,
        ref b_grid,
    } = *config
    else {
        return Err(Error::Config("expected a blocks config".into()));
    };
    let symbols = parse_symbol_word(symbols)?;
    if b_grid.len() < 2 || b_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(
            "dimension grid must list at least two increasing values".into(),
        ));
    }
    let m = symbols.len();
    if b_grid[0] < m as u64 {
        return Err(Error::Config(format!(
            "grid dimensions must be at least the word length {m}"
        )));
    }
    let mut rows = Vec::new();
    for (p, q) in enumerate_diagram_pairs(m)? {
        let weight = DiagramWeight::compute(&symbols, &p, &q)?;
        let verdict = classify(&symbols, &p, &q)?;
        let fit = leading_order(&symbols, &p, &q, b_grid)?;
        let join_blocks = weight
            .wg_type
            .parts()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("+");
        rows.push(BlockRow {
            p: p.to_string(),
            q: q.to_string(),
            join_blocks,
            classifier_verdict: if verdict.survives {
                "survives".to_owned()
            } else {
                "vanishes".to_owned()
            },
            reason: verdict
                .reason
                .map(|r| r.to_string())
                .unwrap_or_default(),
            fitted_exponent: fit.exponent,
            leading_coefficient: weight.coefficient().to_string(),
        });
    }
    Ok(Report::Blocks(rows))
}

// ---------------------------------------------------------------------------
// Invariance probe
// ---------------------------------------------------------------------------

fn default_invariance_words() -> Vec<String> {
    ["A", "A A", "AG A", "AG AG"]
        .map(str::to_owned)
        .to_vec()
}

pub fn run_invariance(config: &ExperimentConfig) -> Result<Report> {
    let ExperimentConfig::Invariance {
        ref ensemble,
        ref dims,
        samples,
        seed,
        ref words,
        tolerance,
    } = *config
    else {
        return Err(Error::Config("expected an invariance config".into()));
    };
    tolerance.validate()?;
    if samples < 2 {
        return Err(Error::Config(
            "need at least two samples for standard errors".into(),
        ));
    }
    let rung_dims = validate_dims(dims)?;

    let word_strings = if words.is_empty() {
        default_invariance_words()
    } else {
        words.clone()
    };
    let parsed: Vec<Word> = word_strings
        .iter()
        .map(|w| parse_word(w))
        .collect::<Result<Vec<_>>>()?;
    if parsed.iter().flatten().any(|wl| wl.id != 1) {
        return Err(Error::Config(
            "invariance words use the single letter A".into(),
        ));
    }

    let mut rows = Vec::new();
    for (&(b, d), dim) in dims.iter().zip(rung_dims) {
        ensemble.validate(dim)?;
        let n_words = parsed.len();
        let stats = blocked_stats(samples, 2 * n_words, |sample, acc| {
            let base = ensemble
                .sample(dim, seed, 1, sample as u64)
                .expect("validated ensemble draw");
            let mut probe_rng =
                rng_stream(seed, &[dim as u64, 1, sample as u64, purpose::PROBE, 0]);
            let v = crate::matrix::haar_from_ginibre(&crate::mc::ginibre_matrix(
                &mut probe_rng,
                dim,
                dim,
            ))
            .expect("square draw");
            let rotated = v
                .mul(&base)
                .and_then(|t| t.mul(&v.adjoint()))
                .expect("validated dimensions");
            let plain = HashMap::from([(1usize, base)]);
            let conjugated = HashMap::from([(1usize, rotated)]);
            for (k, w) in parsed.iter().enumerate() {
                acc[2 * k].push(word_trace(&plain, b, d, w).expect("validated word"));
                acc[2 * k + 1].push(word_trace(&conjugated, b, d, w).expect("validated word"));
            }
        })?;

        for (k, name) in word_strings.iter().enumerate() {
            let base = stats[2 * k].estimate()?;
            let rotated = stats[2 * k + 1].estimate()?;
            let se = (base.se_max().powi(2) + rotated.se_max().powi(2)).sqrt();
            // Words that are exact conjugation invariants (e.g. plain
            // powers) agree to rounding error and have vanishing standard
            // error, so the statistical band gets a small absolute floor
            // for arithmetic noise.
            let tol = tolerance.se_multiplier * se + 1e-9;
            rows.push(VerdictRow::build(
                config.name(),
                name.clone(),
                b,
                d,
                base.samples,
                seed,
                (base.mean.re, base.mean.im),
                rotated.mean,
                se,
                tol,
            ));
        }
    }
    Ok(Report::Verdicts(rows))
}

/// Normalized trace of a word evaluated on explicit letter matrices.
fn word_trace(
    bases: &HashMap<usize, ComplexMatrix>,
    b: usize,
    d: usize,
    word: &Word,
) -> Result<Complex64> {
    let mut acc: Option<ComplexMatrix> = None;
    for wl in word {
        let base = bases
            .get(&wl.id)
            .ok_or_else(|| Error::invalid(format!("no matrix for letter id {}", wl.id)))?;
        let mut m = base.apply_symbol(wl.symbol, b, d)?;
        if wl.star {
            m = m.adjoint();
        }
        acc = Some(match acc {
            None => m,
            Some(prev) => prev.mul(&m)?,
        });
    }
    acc.ok_or_else(|| Error::invalid("empty word"))?
        .normalized_trace()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configs_round_trip_and_reject_garbage() {
        let cfg = ExperimentConfig::LimitDistribution {
            ensemble: EnsembleKind::Wishart { n: 4096 },
            dims: vec![(32, 32)],
            max_order: 4,
            samples: 32,
            seed: 7,
            tolerance: TolerancePolicy::default(),
        };
        let json = cfg.to_json().unwrap();
        assert_eq!(ExperimentConfig::from_json(&json).unwrap(), cfg);
        let defaults: ExperimentConfig =
            ExperimentConfig::from_json(r#"{ "experiment": "entry_moments" }"#).unwrap();
        match defaults {
            ExperimentConfig::EntryMoments {
                dim,
                max_order,
                samples,
                seed,
                tolerance,
            } => {
                assert_eq!((dim, max_order, samples, seed), (8, 4, 20_000, DEFAULT_SEED));
                assert_eq!(tolerance, TolerancePolicy::default());
                assert_eq!(
                    (
                        tolerance.se_multiplier,
                        tolerance.finite_size_constant,
                        tolerance.cumulant_band
                    ),
                    (4.0, 2.0, 0.05)
                );
            }
            _ => panic!("wrong variant"),
        }
        // Partial tolerance objects keep the remaining defaults.
        let partial: ExperimentConfig = ExperimentConfig::from_json(
            r#"{ "experiment": "entry_moments", "tolerance": { "se_multiplier": 5.0 } }"#,
        )
        .unwrap();
        if let ExperimentConfig::EntryMoments { tolerance, .. } = partial {
            assert_eq!(tolerance.se_multiplier, 5.0);
            assert_eq!(tolerance.finite_size_constant, 2.0);
        } else {
            panic!("wrong variant");
        }
        assert!(ExperimentConfig::from_json("{}").is_err());
        assert!(ExperimentConfig::from_json(r#"{ "experiment": "nope" }"#).is_err());
    }

    #[test]
    fn empty_ladders_and_bad_tolerances_are_refused() {
        let empty = ExperimentConfig::LimitDistribution {
            ensemble: EnsembleKind::Gaussian,
            dims: vec![],
            max_order: 2,
            samples: 8,
            seed: 1,
            tolerance: TolerancePolicy::default(),
        };
        assert!(matches!(run(&empty), Err(Error::Config(_))));
        let bad_band = ExperimentConfig::LimitDistribution {
            ensemble: EnsembleKind::Gaussian,
            dims: vec![(2, 2)],
            max_order: 2,
            samples: 8,
            seed: 1,
            tolerance: TolerancePolicy {
                cumulant_band: 0.0,
                ..TolerancePolicy::default()
            },
        };
        assert!(matches!(run(&bad_band), Err(Error::Config(_))));
    }

    #[test]
    fn csv_escaping_quotes_fields_with_commas() {
        let report = Report::Blocks(vec![BlockRow {
            p: "{(1,2),(3,4)}".into(),
            q: "{(1,4),(2,3)}".into(),
            join_blocks: "2".into(),
            classifier_verdict: "survives".into(),
            reason: String::new(),
            fitted_exponent: 0,
            leading_coefficient: "-1".into(),
        }]);
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), BLOCK_HEADER);
        assert_eq!(
            lines.next().unwrap(),
            "\"{(1,2),(3,4)}\",\"{(1,4),(2,3)}\",2,survives,,0,-1"
        );
        assert!(report.all_pass());
    }

    #[test]
    fn entry_moment_runner_matches_exact_predictions_at_small_size() {
        let cfg = ExperimentConfig::EntryMoments {
            dim: 3,
            max_order: 2,
            samples: 4000,
            seed: 11,
            tolerance: TolerancePolicy::default(),
        };
        let report = run(&cfg).unwrap();
        let rows = report.verdict_rows().unwrap();
        // Orders one and two: 1*1*2 + 2*2*4 patterns.
        assert_eq!(rows.len(), 18);
        assert!(rows.iter().all(|r| r.experiment == "entry_moments"));
        let balanced = rows
            .iter()
            .find(|r| r.word == "1.1 1.1*")
            .expect("pattern present");
        assert!((balanced.predicted_re - 1.0 / 3.0).abs() < 1e-12);
        let unbalanced = rows.iter().find(|r| r.word == "1.1 1.1").unwrap();
        assert_eq!(unbalanced.predicted_re, 0.0);
        assert!(report.all_pass(), "statistical check at frozen seed");
        // Byte determinism.
        let again = run(&cfg).unwrap();
        assert_eq!(report.to_csv(), again.to_csv());
    }

    #[test]
    fn limit_distribution_runner_emits_moment_and_cumulant_rows() {
        let cfg = ExperimentConfig::LimitDistribution {
            ensemble: EnsembleKind::Wishart { n: 64 },
            dims: vec![(4, 4)],
            max_order: 4,
            samples: 64,
            seed: 5,
            tolerance: TolerancePolicy::default(),
        };
        let report = run(&cfg).unwrap();
        let rows = report.verdict_rows().unwrap();
        assert_eq!(rows.len(), 4 + 3);
        assert_eq!(rows[0].word, "AG");
        assert_eq!(rows[3].word, "AG AG AG AG");
        assert_eq!(rows[4].word, "k2(AG)");
        // Aspect ratio 16/64: predictions 1, 1.25, 1.75, 2.625.
        let predicted: Vec<f64> = rows[..4].iter().map(|r| r.predicted_re).collect();
        assert_eq!(predicted, vec![1.0, 1.25, 1.75, 2.625]);
        assert_eq!(rows[4].predicted_re, 0.25);
        assert_eq!(rows[5].predicted_re, 0.0);
        assert_eq!(rows[5].tolerance, 0.05);
        assert_eq!(rows[0].b, 4);
        assert_eq!(rows[0].samples, 64);
    }

    #[test]
    fn ladder_rungs_emit_their_own_rows_with_rung_dependent_predictions() {
        // Two rungs with a fixed Wishart parameter: the aspect ratio, and
        // with it the second-moment prediction, changes along the ladder.
        let cfg = ExperimentConfig::LimitDistribution {
            ensemble: EnsembleKind::Wishart { n: 64 },
            dims: vec![(4, 4), (4, 8)],
            max_order: 2,
            samples: 16,
            seed: 5,
            tolerance: TolerancePolicy::default(),
        };
        let report = run(&cfg).unwrap();
        let rows = report.verdict_rows().unwrap();
        assert_eq!(rows.len(), 2 * (2 + 1));
        assert_eq!((rows[0].b, rows[0].d), (4, 4));
        assert_eq!((rows[3].b, rows[3].d), (4, 8));
        assert_eq!(rows[1].predicted_re, 1.25);
        assert_eq!(rows[4].predicted_re, 1.5);
        let preds = prediction_rows(&cfg).unwrap();
        assert_eq!(preds.len(), rows.len());
        assert_eq!((preds[3].b, preds[3].d), (4, 8));
        assert_eq!(preds[4].value_re, 1.5);
        assert_eq!(preds[4].exact, "3/2");
    }

    #[test]
    fn freeness_runner_predicts_zero_cross_cumulants() {
        let cfg = ExperimentConfig::Freeness {
            ensemble: EnsembleKind::Wishart { n: 64 },
            dims: vec![(4, 4)],
            samples: 48,
            seed: 5,
            words: vec!["AG A AG A".into()],
            tolerance: TolerancePolicy::default(),
        };
        let report = run(&cfg).unwrap();
        let rows = report.verdict_rows().unwrap();
        assert_eq!(rows.len(), 4 + 16 + 1 + 1 + 1);
        for r in &rows[..4] {
            assert_eq!(r.predicted_re, 1.0);
        }
        let diag = rows.iter().find(|r| r.word == "k2(AG AG)").unwrap();
        assert_eq!(diag.predicted_re, 0.25);
        let cross = rows.iter().find(|r| r.word == "k2(A AT)").unwrap();
        assert_eq!(cross.predicted_re, 0.0);
        assert_eq!(cross.tolerance, 0.05);
        let adjoint = rows.iter().find(|r| r.word == "k2(AG AG*)").unwrap();
        assert_eq!(adjoint.predicted_re, 0.25);
        // Independent draws of the same family are asymptotically free.
        let indep = rows.iter().find(|r| r.word == "k2(AG BG)").unwrap();
        assert_eq!(indep.predicted_re, 0.0);
        assert!(indep.estimated_re.abs() < 0.05);
        // Extra word: alternating flip/plain word prediction from the
        // mixed-word limit formula.
        let extra = rows.last().unwrap();
        assert_eq!(extra.word, "AG A AG A");
        assert!(extra.predicted_re > 1.0);
        // A word whose limit formula is undefined must be refused.
        let bad = ExperimentConfig::Freeness {
            ensemble: EnsembleKind::Wishart { n: 64 },
            dims: vec![(4, 4)],
            samples: 8,
            seed: 5,
            words: vec!["A AT".into()],
            tolerance: TolerancePolicy::default(),
        };
        assert!(matches!(run(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn blocks_runner_tabulates_every_pairing_pair() {
        let cfg = ExperimentConfig::Blocks {
            symbols: "GG".into(),
            b_grid: vec![4, 8, 16],
        };
        let report = run(&cfg).unwrap();
        let rows = report.block_rows().unwrap();
        assert_eq!(rows.len(), 4);
        assert!(report.all_pass());
        let survivors = rows
            .iter()
            .filter(|r| r.classifier_verdict == "survives")
            .count();
        assert_eq!(survivors, 3);
        let vanisher = rows
            .iter()
            .find(|r| r.classifier_verdict == "vanishes")
            .unwrap();
        assert_eq!(vanisher.fitted_exponent, -4);
        assert!(!vanisher.reason.is_empty());
        assert!(rows.iter().all(|r| !r.join_blocks.contains(',')));
        let bad = ExperimentConfig::Blocks {
            symbols: "GG".into(),
            b_grid: vec![4],
        };
        assert!(run(&bad).is_err());
    }

    #[test]
    fn invariance_runner_compares_base_and_rotated_words() {
        let cfg = ExperimentConfig::Invariance {
            ensemble: EnsembleKind::Gaussian,
            dims: vec![(3, 4)],
            samples: 128,
            seed: 3,
            words: vec![],
            tolerance: TolerancePolicy::default(),
        };
        let report = run(&cfg).unwrap();
        let rows = report.verdict_rows().unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].word, "A");
        assert!(report.all_pass(), "rotation-invariant in distribution");
        let again = run(&cfg).unwrap();
        assert_eq!(report.to_csv(), again.to_csv());
    }

    #[test]
    fn invariance_probe_flags_a_non_invariant_family() {
        // A fixed matrix is *not* rotation invariant. Power traces cannot
        // see that (they are conjugation invariants), but a word mixing the
        // letter with its transpose can.
        let cfg = ExperimentConfig::Invariance {
            ensemble: EnsembleKind::Fixed {
                matrix: vec![
                    vec![(5.0, 0.0), (0.0, 0.0)],
                    vec![(0.0, 0.0), (-3.0, 0.0)],
                ],
            },
            dims: vec![(2, 1)],
            samples: 256,
            seed: 2,
            words: vec!["A A".into(), "AT A".into()],
            tolerance: TolerancePolicy::default(),
        };
        let report = run(&cfg).unwrap();
        let rows = report.verdict_rows().unwrap();
        // tr(A^2) is a conjugation invariant: identical on both sides.
        assert!(rows[0].pass);
        assert!(rows[0].std_error < 1e-12);
        // tr(A^T A) is not; the probe must flag it.
        assert!(!rows[1].pass);
    }
}
