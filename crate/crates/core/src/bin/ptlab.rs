//! Command-line front end: exact pair-partition calculus (Weingarten
//! values, entry moments, partition families, limit predictions) and the
//! Monte Carlo experiments that check those predictions on sampled matrix
//! ensembles.
//!
//! Exit codes: `0` when every emitted row passes, `1` when any verification
//! row fails, `2` on usage, configuration, or I/O errors.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use ptlab::ensemble::EnsembleKind;
use ptlab::experiment::{
    prediction_rows, predictions_to_csv, run, ExperimentConfig, Report, ReportFormat,
    DEFAULT_SEED,
};
use ptlab::freeprob::{
    cumulants_from_moments, mixed_word_limit, pt_limit_cumulants, pt_limit_moments, LimitData,
    MomentTable,
};
use ptlab::matrix::write_matrix_dump;
use ptlab::partition::{
    enumerate_admissible, enumerate_eps_pairings, enumerate_nc12, enumerate_noncrossing,
    enumerate_pairings, enumerate_set_partitions, Eps, EpsilonMap,
};
use ptlab::scalar::CRat;
use ptlab::weingarten::{haar_moment_interleaved, wg_at, wg_symbolic, CycleType};
use ptlab::word::{entry_word_parts, parse_entry_word, parse_word, Letter, Symbol};
use ptlab::{Error, Result};

/// Exact pair-partition calculus with Monte Carlo verification on random
/// matrix ensembles.
#[derive(Parser)]
#[command(name = "ptlab", version, max_term_width = 100)]
struct Cli {
    /// JSON input file: an experiment config (`verify`, `predict`), an
    /// ensemble description (`simulate`), or a moment functional
    /// (`predict`).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Overrides the sampling seed of the loaded config.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Writes the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Report format where a choice exists.
    #[arg(long, global = true, value_enum, value_name = "FMT")]
    format: Option<FormatArg>,

    /// Worker threads for the numeric kernels (0 = library default).
    /// Reports are byte-identical for every thread count.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> ReportFormat {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Counts (or lists) a combinatorial family.
    Partitions {
        /// Family to enumerate.
        #[arg(long, value_enum)]
        family: Family,
        /// Size parameter: ground set `1..=size` for noncrossing, nc12 and
        /// set-partitions; ground set `1..=2*size` for pairings,
        /// eps-pairings and admissible.
        #[arg(long)]
        size: usize,
        /// Prints every element, one per line, before the count.
        #[arg(long)]
        list: bool,
    },
    /// Exact Weingarten values and Haar-unitary entry moments.
    #[command(subcommand)]
    Wg(WgCommand),
    /// Exact predictions without any sampling. With an experiment config,
    /// emits the predicted value of every verdict row. With a moment
    /// functional (a JSON object mapping words like "A A*" to [re, im]),
    /// emits derived free cumulants, the partial-transpose limit series,
    /// and any requested mixed-word limits as JSON.
    Predict {
        /// Highest order of the partial-transpose limit series
        /// (functional input only).
        #[arg(long, default_value_t = 4)]
        max_order: usize,
        /// Base letter of the partial-transpose series, e.g. `A`
        /// (functional input only; defaults to the unique letter).
        #[arg(long)]
        letter: Option<String>,
        /// Extra mixed words to predict, e.g. "AG A AG A"; repeatable
        /// (functional input only).
        #[arg(long = "word")]
        words: Vec<String>,
    },
    /// Runs an experiment and reports predicted-versus-estimated rows.
    /// Exits 0 when all rows pass and 1 otherwise.
    Verify {
        /// Which experiment the config must describe.
        #[arg(value_enum)]
        kind: VerifyKind,
        /// Flip-symbol word such as `GG` (blocks only, instead of
        /// --config).
        #[arg(long)]
        word: Option<String>,
        /// Increasing dimension grid such as `4,8,16,32` (blocks only,
        /// instead of --config).
        #[arg(long, value_delimiter = ',')]
        grid: Vec<u64>,
        /// Expected word length; checked against --word (blocks only).
        #[arg(long)]
        m: Option<usize>,
    },
    /// Draws one ensemble sample and writes it in the binary matrix-dump
    /// format (requires --config with an ensemble JSON and --out).
    Simulate {
        /// Left leg dimension.
        #[arg(long)]
        b: usize,
        /// Right leg dimension; the matrix has size `b*d`.
        #[arg(long)]
        d: usize,
        /// Sample index within the seed's stream.
        #[arg(long, default_value_t = 0)]
        sample: u64,
        /// Flip applied before dumping: I, T, G (right leg) or L (left
        /// leg).
        #[arg(long, default_value = "I")]
        symbol: String,
    },
}

#[derive(Subcommand)]
enum WgCommand {
    /// Weingarten value of a cycle type: exact rational at --dim, or the
    /// reduced rational function of the dimension as JSON (--symbolic,
    /// the default).
    Exact {
        /// Cycle-type parts, e.g. `2,1`.
        #[arg(long, value_delimiter = ',', required = true)]
        parts: Vec<usize>,
        /// Total order; parts are padded with fixed points up to it.
        #[arg(long)]
        m: Option<usize>,
        /// Evaluate exactly at this matrix dimension.
        #[arg(long, conflicts_with = "symbolic")]
        dim: Option<u64>,
        /// Emit the rational function of the dimension as a JSON pair of
        /// coefficient lists (ascending powers).
        #[arg(long)]
        symbolic: bool,
    },
    /// Exact mixed moment of Haar-unitary entries, e.g.
    /// `--word "1.1 2.2*" --dim 8`.
    EntryMoment {
        /// Entry word: space-separated `row.col` factors, `*` marking
        /// conjugated ones.
        #[arg(long)]
        word: String,
        /// Matrix dimension.
        #[arg(long)]
        dim: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Perfect matchings of `1..=2*size`.
    Pairings,
    /// Matchings pairing plain with starred positions, alternating
    /// plain/star along `1..=2*size`.
    EpsPairings,
    /// Non-crossing partitions of `1..=size`.
    Noncrossing,
    /// Non-crossing partitions with blocks of size one or two.
    Nc12,
    /// Blown-up partitions of `1..=2*size` from nc12 of `1..=size`.
    Admissible,
    /// All set partitions of `1..=size`.
    SetPartitions,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyKind {
    EntryMoments,
    LimitDist,
    Freeness,
    Blocks,
    Invariance,
}

fn main() {
    let cli = Cli::parse();
    let code = match real_main(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}

fn real_main(cli: Cli) -> Result<i32> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Partitions { family, size, list } => {
            run_partitions(family, size, list, cli.out.as_deref())
        }
        Command::Wg(ref wg) => run_wg(wg, cli.out.as_deref()),
        Command::Predict {
            max_order,
            ref letter,
            ref words,
        } => {
            let text = read_config(cli.config.as_deref())?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let is_experiment = value
                .as_object()
                .is_some_and(|o| o.contains_key("experiment"));
            if is_experiment {
                predict_experiment(&text, cli.seed, cli.format, cli.out.as_deref())
            } else {
                predict_functional(
                    &value,
                    max_order,
                    letter.as_deref(),
                    words,
                    cli.format,
                    cli.out.as_deref(),
                )
            }
        }
        Command::Verify {
            kind,
            ref word,
            ref grid,
            m,
        } => run_verify(
            kind,
            cli.config.as_deref(),
            word.as_deref(),
            grid,
            m,
            cli.seed,
            cli.format,
            cli.out.as_deref(),
        ),
        Command::Simulate {
            b,
            d,
            sample,
            ref symbol,
        } => run_simulate(
            cli.config.as_deref(),
            b,
            d,
            cli.seed.unwrap_or(DEFAULT_SEED),
            sample,
            symbol,
            cli.out.as_deref(),
        ),
    }
}

/// Reads the file behind `--config`, which several subcommands require.
fn read_config(path: Option<&Path>) -> Result<String> {
    let path =
        path.ok_or_else(|| Error::Config("this subcommand needs --config <path>".into()))?;
    Ok(fs::read_to_string(path)?)
}

/// Writes `text` to `--out` or standard output.
fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn ensure_trailing_newline(mut text: String) -> String {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    text
}

// ---------------------------------------------------------------------------
// partitions
// ---------------------------------------------------------------------------

fn run_partitions(family: Family, size: usize, list: bool, out: Option<&Path>) -> Result<i32> {
    let (name, items): (&str, Vec<String>) = match family {
        Family::Pairings => (
            "pairings",
            enumerate_pairings(size)?
                .iter()
                .map(ToString::to_string)
                .collect(),
        ),
        Family::EpsPairings => {
            let eps: Vec<Eps> = (0..2 * size)
                .map(|i| if i % 2 == 0 { Eps::Plain } else { Eps::Star })
                .collect();
            (
                "eps-pairings",
                enumerate_eps_pairings(&EpsilonMap::from_slice(&eps))?
                    .iter()
                    .map(ToString::to_string)
                    .collect(),
            )
        }
        Family::Noncrossing => (
            "noncrossing",
            enumerate_noncrossing(size)?
                .iter()
                .map(ToString::to_string)
                .collect(),
        ),
        Family::Nc12 => (
            "nc12",
            enumerate_nc12(size)?
                .iter()
                .map(ToString::to_string)
                .collect(),
        ),
        Family::Admissible => (
            "admissible",
            enumerate_admissible(size)?
                .iter()
                .map(ToString::to_string)
                .collect(),
        ),
        Family::SetPartitions => (
            "set-partitions",
            enumerate_set_partitions(size)?
                .iter()
                .map(ToString::to_string)
                .collect(),
        ),
    };
    let text = if list {
        let mut buf = String::new();
        for item in &items {
            buf.push_str(item);
            buf.push('\n');
        }
        buf
    } else {
        format!("{}\n", items.len())
    };
    emit(&text, out)?;
    eprintln!("{name} at size {size}: {} elements", items.len());
    Ok(0)
}

// ---------------------------------------------------------------------------
// wg
// ---------------------------------------------------------------------------

fn run_wg(cmd: &WgCommand, out: Option<&Path>) -> Result<i32> {
    match cmd {
        WgCommand::Exact {
            parts,
            m,
            dim,
            symbolic: _,
        } => {
            let mut parts = parts.clone();
            if let Some(m) = m {
                let total: usize = parts.iter().sum();
                if total > *m {
                    return Err(Error::Config(format!(
                        "parts sum to {total}, above the requested order {m}"
                    )));
                }
                parts.extend(std::iter::repeat(1).take(m - total));
            }
            let ct = CycleType::new(parts)?;
            let text = match dim {
                Some(dim) => {
                    let value = wg_at(&ct, &BigInt::from(*dim))?;
                    format!("{value}\n")
                }
                None => {
                    let f = wg_symbolic(&ct)?;
                    let coeff_list = |coeffs: &[BigInt]| {
                        serde_json::Value::Array(
                            coeffs
                                .iter()
                                .map(|c| serde_json::Value::String(c.to_string()))
                                .collect(),
                        )
                    };
                    let json = serde_json::json!({
                        "cycle_type": ct.parts(),
                        "numerator": coeff_list(f.numerator().coeffs()),
                        "denominator": coeff_list(f.denominator().coeffs()),
                        "display": f.to_string(),
                    });
                    ensure_trailing_newline(serde_json::to_string_pretty(&json)?)
                }
            };
            emit(&text, out)?;
            Ok(0)
        }
        WgCommand::EntryMoment { word, dim } => {
            let factors = parse_entry_word(word)?;
            let (rows, cols, eps) = entry_word_parts(&factors);
            let value = haar_moment_interleaved(&rows, &cols, &eps, &BigInt::from(*dim))?;
            emit(&format!("{value}\n"), out)?;
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

fn predict_experiment(
    text: &str,
    seed: Option<u64>,
    format: Option<FormatArg>,
    out: Option<&Path>,
) -> Result<i32> {
    let mut config = ExperimentConfig::from_json(text)?;
    if let Some(seed) = seed {
        config.set_seed(seed)?;
    }
    let rows = prediction_rows(&config)?;
    let text = match format.unwrap_or(FormatArg::Csv) {
        FormatArg::Csv => predictions_to_csv(&rows),
        FormatArg::Json => ensure_trailing_newline(serde_json::to_string_pretty(&rows)?),
    };
    emit(&text, out)?;
    eprintln!("{}: {} exact predictions", config.name(), rows.len());
    Ok(0)
}

/// Parses a functional key: a word of plain (unflipped) letters.
fn plain_letters(key: &str) -> Result<Vec<Letter>> {
    parse_word(key)?
        .into_iter()
        .map(|wl| {
            if wl.symbol != Symbol::Identity {
                return Err(Error::Config(format!(
                    "functional keys describe the base ensemble; '{key}' carries a flip symbol"
                )));
            }
            Ok(Letter {
                id: wl.id,
                star: wl.star,
            })
        })
        .collect()
}

fn complex_pair(value: &serde_json::Value, key: &str) -> Result<(f64, f64)> {
    let arr = value
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Config(format!("value of '{key}' must be a [re, im] pair")))?;
    let num = |v: &serde_json::Value| {
        v.as_f64()
            .ok_or_else(|| Error::Config(format!("value of '{key}' must hold numbers")))
    };
    Ok((num(&arr[0])?, num(&arr[1])?))
}

fn json_pair(value: &CRat) -> serde_json::Value {
    let (re, im) = value.to_f64_pair();
    serde_json::json!([re, im])
}

fn predict_functional(
    value: &serde_json::Value,
    max_order: usize,
    letter: Option<&str>,
    words: &[String],
    format: Option<FormatArg>,
    out: Option<&Path>,
) -> Result<i32> {
    if matches!(format, Some(FormatArg::Csv)) {
        return Err(Error::Config(
            "a moment functional is predicted as JSON; csv applies to experiment configs".into(),
        ));
    }
    let obj = value.as_object().ok_or_else(|| {
        Error::Config("a moment functional is a JSON object of word -> [re, im]".into())
    })?;
    if obj.is_empty() {
        return Err(Error::Config("the moment functional is empty".into()));
    }

    let mut keys: Vec<&String> = obj.keys().collect();
    keys.sort();
    let mut table: MomentTable<Letter, CRat> = MomentTable::new();
    let mut parsed: Vec<(String, Vec<Letter>)> = Vec::new();
    for key in keys {
        let (re, im) = complex_pair(&obj[key], key)?;
        let letters = plain_letters(key)?;
        table.insert(letters.clone(), CRat::from_f64_exact(re, im)?);
        parsed.push((key.clone(), letters));
    }
    table.check_conjugate_symmetry()?;

    // Free cumulants of every input word; sub-word moments must be present.
    let mut cumulants = serde_json::Map::new();
    for (key, letters) in &parsed {
        let kappa = cumulants_from_moments(&table, letters).map_err(|e| {
            Error::Config(format!("cumulant of '{key}' is not derivable: {e}"))
        })?;
        cumulants.insert(key.clone(), json_pair(&kappa));
    }

    // First- and second-order data per letter feeds the limit formulas.
    let ids: BTreeSet<usize> = parsed
        .iter()
        .flat_map(|(_, ls)| ls.iter().map(|l| l.id))
        .collect();
    let mut ld: LimitData<CRat> = LimitData::new();
    for &id in &ids {
        for star in [false, true] {
            let l = Letter { id, star };
            if let Some(v) = table.get(&[l]) {
                ld.set_m1(l, v.clone());
            }
        }
        for s1 in [false, true] {
            for s2 in [false, true] {
                let (a, b) = (Letter { id, star: s1 }, Letter { id, star: s2 });
                if let Some(v) = table.get(&[a, b]) {
                    ld.set_m2(a, b, v.clone());
                }
            }
        }
    }

    // Letter of the partial-transpose series: explicit, or the unique one.
    let series_letter = match letter {
        Some(name) => Some(parse_letter_name(name)?),
        None if ids.len() == 1 => ids.first().copied(),
        None => None,
    };
    let explicit = letter.is_some();
    let mut pt_cumulants = serde_json::Value::Null;
    let mut pt_moments = serde_json::Value::Null;
    if let Some(id) = series_letter {
        let l = Letter::new(id);
        let series = |f: &dyn Fn(&[Letter]) -> Result<CRat>| -> Result<Vec<serde_json::Value>> {
            (1..=max_order).map(|n| Ok(json_pair(&f(&vec![l; n])?))).collect()
        };
        let cums = series(&|w| pt_limit_cumulants(&ld, w));
        let moms = series(&|w| pt_limit_moments(&ld, w));
        match (cums, moms) {
            (Ok(c), Ok(m)) => {
                pt_cumulants = serde_json::Value::Array(c);
                pt_moments = serde_json::Value::Array(m);
            }
            (Err(e), _) | (_, Err(e)) if explicit => {
                return Err(Error::Config(format!(
                    "partial-transpose series needs first and second moments of the letter: {e}"
                )));
            }
            _ => eprintln!(
                "note: first/second-order data incomplete; partial-transpose series omitted"
            ),
        }
    }

    // Requested mixed-word limits.
    let mut word_values = serde_json::Map::new();
    for w in words {
        let parsed_word = parse_word(w)?;
        let value = mixed_word_limit(&ld, &table, &parsed_word)
            .map_err(|e| Error::Config(format!("limit of '{w}' is not derivable: {e}")))?;
        word_values.insert(w.clone(), json_pair(&value));
    }

    let root = serde_json::json!({
        "cumulants": serde_json::Value::Object(cumulants),
        "pt_cumulants": pt_cumulants,
        "pt_moments": pt_moments,
        "words": serde_json::Value::Object(word_values),
    });
    emit(
        &ensure_trailing_newline(serde_json::to_string_pretty(&root)?),
        out,
    )?;
    eprintln!("functional: {} input moments", parsed.len());
    Ok(0)
}

fn parse_letter_name(name: &str) -> Result<usize> {
    let mut chars = name.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_uppercase() => Ok((c as u8 - b'A') as usize + 1),
        _ => Err(Error::Config(format!(
            "letter names are single characters A-Z, got '{name}'"
        ))),
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn run_verify(
    kind: VerifyKind,
    config_path: Option<&Path>,
    word: Option<&str>,
    grid: &[u64],
    m: Option<usize>,
    seed: Option<u64>,
    format: Option<FormatArg>,
    out: Option<&Path>,
) -> Result<i32> {
    if kind != VerifyKind::Blocks && (word.is_some() || !grid.is_empty() || m.is_some()) {
        return Err(Error::Config(
            "--word, --grid and --m belong to `verify blocks`".into(),
        ));
    }
    let mut config = match (config_path, word) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "give either --config or --word/--grid, not both".into(),
            ));
        }
        (Some(path), None) => {
            let text = fs::read_to_string(path)?;
            ExperimentConfig::from_json(&text)?
        }
        (None, Some(word)) => {
            if grid.is_empty() {
                return Err(Error::Config("--word needs a --grid of dimensions".into()));
            }
            if let Some(m) = m {
                let symbols = ptlab::word::parse_symbol_word(word)?;
                if symbols.len() != m {
                    return Err(Error::Config(format!(
                        "word '{word}' has length {}, not the stated {m}",
                        symbols.len()
                    )));
                }
            }
            ExperimentConfig::Blocks {
                symbols: word.to_owned(),
                b_grid: grid.to_vec(),
            }
        }
        (None, None) => {
            return Err(Error::Config(
                "this subcommand needs --config <path> (or, for blocks, --word and --grid)"
                    .into(),
            ));
        }
    };
    let expected = match kind {
        VerifyKind::EntryMoments => matches!(config, ExperimentConfig::EntryMoments { .. }),
        VerifyKind::LimitDist => matches!(config, ExperimentConfig::LimitDistribution { .. }),
        VerifyKind::Freeness => matches!(config, ExperimentConfig::Freeness { .. }),
        VerifyKind::Blocks => matches!(config, ExperimentConfig::Blocks { .. }),
        VerifyKind::Invariance => matches!(config, ExperimentConfig::Invariance { .. }),
    };
    if !expected {
        return Err(Error::Config(format!(
            "the config describes a {} experiment; this subcommand verifies another kind",
            config.name()
        )));
    }
    if let Some(seed) = seed {
        config.set_seed(seed)?;
    }

    let report = run(&config)?;
    let text = report.render(format.unwrap_or(FormatArg::Csv).into())?;
    emit(&text, out)?;

    let total = report.len();
    let all_pass = report.all_pass();
    let failed = match &report {
        Report::Verdicts(rows) => rows.iter().filter(|r| !r.pass).count(),
        Report::Blocks(rows) => rows.iter().filter(|r| !r.consistent()).count(),
    };
    if all_pass {
        eprintln!("{}: {total} rows, all pass", config.name());
        Ok(0)
    } else {
        eprintln!("{}: {failed} of {total} rows FAILED", config.name());
        Ok(1)
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn run_simulate(
    config_path: Option<&Path>,
    b: usize,
    d: usize,
    seed: u64,
    sample: u64,
    symbol: &str,
    out: Option<&Path>,
) -> Result<i32> {
    let text = read_config(config_path)?;
    let ensemble: EnsembleKind = serde_json::from_str(&text)?;
    let out = out.ok_or_else(|| {
        Error::Config("simulate writes a binary dump and needs --out <path>".into())
    })?;
    let dim = b
        .checked_mul(d)
        .filter(|&m| m > 0)
        .ok_or_else(|| Error::Config("bad leg dimensions".into()))?;
    let mut chars = symbol.chars();
    let flip = match (chars.next(), chars.next()) {
        (Some(c), None) => Symbol::from_code(c)?,
        _ => {
            return Err(Error::Config(format!(
                "--symbol takes a single code I, T, G or L, got '{symbol}'"
            )));
        }
    };
    let matrix = ensemble.sample(dim, seed, 1, sample)?.apply_symbol(flip, b, d)?;
    let file = fs::File::create(out)?;
    let mut writer = BufWriter::new(file);
    write_matrix_dump(&mut writer, &matrix, b)?;
    writer.flush()?;
    eprintln!(
        "wrote one {dim}x{dim} draw (block size {b}, flip {}) to {}",
        flip.code(),
        out.display()
    );
    Ok(0)
}
