//! Matrix ensembles: reproducible sampling and exact limiting moment data.
//!
//! Each draw is keyed by `(seed, dimension, letter id, sample index, purpose,
//! depth)` through the deterministic stream derivation in [`crate::mc`], so
//! samples are independent across dimensions, letters and sample indices yet
//! bit-reproducible.
//! The limiting single-letter moments are produced exactly (rationals), which
//! is what the prediction side compares simulations against.

use crate::error::{Error, Result};
use crate::freeprob::{binomial, LimitData};
use crate::matrix::{gram_hermitian, haar_from_ginibre, ComplexMatrix};
use crate::mc::{gaussian_hermitian, ginibre_matrix, purpose, rng_stream};
use crate::partition::{enumerate_eps_pairings, Eps, EpsilonMap, PairPartition};
use crate::scalar::{CRat, Scalar};
use crate::weingarten::catalan;
use crate::word::Letter;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

/// Caps for the exact trace computations on explicit matrices.
const EXACT_DIM_CAP: usize = 64;
const EXACT_WORD_CAP: usize = 8;

/// A random (or fixed) square matrix family indexed by dimension.
///
/// Normalizations are chosen so normalized traces have finite limits:
/// `wishart` is `X X^* / n` (expected normalized trace one), `gaussian` is
/// Hermitian with unit limiting normalized square trace, `ginibre` has
/// entry variance `1/dim`, `unitary` is Haar distributed, `fixed` is an
/// explicit matrix, and `conjugated` wraps an inner family with an
/// independent Haar rotation `U A U^*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Complex Wishart `X X^* / n` where `X` is `dim x n` standard Gaussian.
    Wishart { n: usize },
    /// Hermitian Gaussian (entry variance `1/dim`).
    Gaussian,
    /// Square all-Gaussian matrix with entry variance `1/dim`.
    Ginibre,
    /// Haar-distributed unitary.
    Unitary,
    /// An explicit matrix, entries as `[re, im]` pairs.
    Fixed { matrix: Vec<Vec<(f64, f64)>> },
    /// `U A U^*` with `A` from the inner family and `U` an independent Haar
    /// unitary of the same dimension.
    Conjugated { inner: Box<EnsembleKind> },
}

impl EnsembleKind {
    /// Checks the family is usable at the given dimension.
    pub fn validate(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::invalid("ensemble dimension must be positive"));
        }
        match self {
            EnsembleKind::Wishart { n } if *n == 0 => {
                Err(Error::invalid("wishart sample count must be positive"))
            }
            EnsembleKind::Fixed { matrix } => {
                if matrix.len() != dim || matrix.iter().any(|row| row.len() != dim) {
                    return Err(Error::invalid(format!(
                        "fixed matrix must be square of dimension {dim}"
                    )));
                }
                Ok(())
            }
            EnsembleKind::Conjugated { inner } => inner.validate(dim),
            _ => Ok(()),
        }
    }

    /// Whether every draw is Hermitian.
    pub fn is_selfadjoint(&self) -> bool {
        match self {
            EnsembleKind::Wishart { .. } | EnsembleKind::Gaussian => true,
            EnsembleKind::Ginibre | EnsembleKind::Unitary => false,
            EnsembleKind::Fixed { matrix } => matrix.iter().enumerate().all(|(i, row)| {
                row.iter()
                    .enumerate()
                    .all(|(j, &(re, im))| (re, im) == (matrix[j][i].0, -matrix[j][i].1))
            }),
            EnsembleKind::Conjugated { inner } => inner.is_selfadjoint(),
        }
    }

    /// The explicit matrix of a `fixed` family.
    pub fn fixed_matrix(&self) -> Result<ComplexMatrix> {
        match self {
            EnsembleKind::Fixed { matrix } => {
                let dim = matrix.len();
                self.validate(dim)?;
                Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
                    Complex64::new(matrix[i][j].0, matrix[i][j].1)
                }))
            }
            _ => Err(Error::invalid("not a fixed-matrix family")),
        }
    }

    /// Draws one matrix. The same arguments always produce the same matrix;
    /// different letters or sample indices use independent streams.
    pub fn sample(
        &self,
        dim: usize,
        seed: u64,
        letter_id: u64,
        sample_idx: u64,
    ) -> Result<ComplexMatrix> {
        self.validate(dim)?;
        self.sample_at_depth(dim, seed, letter_id, sample_idx, 0)
    }

    fn sample_at_depth(
        &self,
        dim: usize,
        seed: u64,
        letter_id: u64,
        sample_idx: u64,
        depth: u64,
    ) -> Result<ComplexMatrix> {
        let mut rng = rng_stream(
            seed,
            &[dim as u64, letter_id, sample_idx, purpose::ENSEMBLE, depth],
        );
        match self {
            EnsembleKind::Wishart { n } => {
                let x = ginibre_matrix(&mut rng, dim, *n);
                gram_hermitian(&x, *n as f64)
            }
            EnsembleKind::Gaussian => Ok(gaussian_hermitian(&mut rng, dim)),
            EnsembleKind::Ginibre => {
                Ok(ginibre_matrix(&mut rng, dim, dim).scale(1.0 / (dim as f64).sqrt()))
            }
            EnsembleKind::Unitary => haar_from_ginibre(&ginibre_matrix(&mut rng, dim, dim)),
            EnsembleKind::Fixed { .. } => self.fixed_matrix(),
            EnsembleKind::Conjugated { inner } => {
                let a = inner.sample_at_depth(dim, seed, letter_id, sample_idx, depth + 1)?;
                let mut frame_rng = rng_stream(
                    seed,
                    &[dim as u64, letter_id, sample_idx, purpose::FRAME, depth],
                );
                let u = haar_from_ginibre(&ginibre_matrix(&mut frame_rng, dim, dim))?;
                u.mul(&a)?.mul(&u.adjoint())
            }
        }
    }

    /// Exact limiting moment of a single-letter word (letters may carry
    /// stars). For the Wishart family the limit depends on the aspect ratio
    /// `dim / n`, so the target dimension is part of the input.
    pub fn limit_moment(&self, dim: usize, word: &[Letter]) -> Result<CRat> {
        self.validate(dim)?;
        if word.is_empty() {
            return Err(Error::invalid("limit moment of an empty word"));
        }
        let id = word[0].id;
        if word.iter().any(|l| l.id != id) {
            return Err(Error::Unsupported(
                "joint limit moments across independent letters are not provided".into(),
            ));
        }
        let p = word.len();
        match self {
            EnsembleKind::Wishart { n } => {
                // Narayana expansion in the aspect ratio.
                let lambda = BigRational::new(BigInt::from(dim), BigInt::from(*n));
                let total = (1..=p).fold(BigRational::from_integer(BigInt::from(0)), |acc, k| {
                    let narayana = binomial(p, k) * binomial(p, k - 1) / BigInt::from(p);
                    acc + BigRational::from_integer(narayana)
                        * pow_rational(&lambda, (k - 1) as u32)
                });
                Ok(CRat::from_rat(total))
            }
            EnsembleKind::Gaussian => {
                if p % 2 == 0 {
                    Ok(CRat::from_rat(BigRational::from_integer(catalan(p / 2))))
                } else {
                    Ok(CRat::zero())
                }
            }
            EnsembleKind::Ginibre => {
                if p % 2 != 0 {
                    return Ok(CRat::zero());
                }
                let eps: Vec<Eps> = word
                    .iter()
                    .map(|l| if l.star { Eps::Star } else { Eps::Plain })
                    .collect();
                let eps = EpsilonMap::from_slice(&eps);
                if eps.count_plain() * 2 != p {
                    return Ok(CRat::zero());
                }
                let count = enumerate_eps_pairings(&eps)?
                    .iter()
                    .filter(|pairing| pairing_is_noncrossing(pairing))
                    .count();
                Ok(CRat::from_int(count as i64))
            }
            EnsembleKind::Unitary => {
                let net: i64 = word.iter().map(|l| if l.star { -1 } else { 1 }).sum();
                Ok(if net == 0 { CRat::one() } else { CRat::zero() })
            }
            EnsembleKind::Fixed { .. } => {
                if dim > EXACT_DIM_CAP || p > EXACT_WORD_CAP {
                    return Err(Error::ResourceLimit(format!(
                        "exact fixed-matrix traces are capped at dimension {EXACT_DIM_CAP} \
                         and word length {EXACT_WORD_CAP}"
                    )));
                }
                let base = self.fixed_matrix()?;
                exact_word_trace(&base, word)
            }
            EnsembleKind::Conjugated { inner } => inner.limit_moment(dim, word),
        }
    }

    /// Rank-one and rank-two limiting data for one letter, over all star
    /// combinations. This is the input of the second-order predictions.
    pub fn limit_data(&self, dim: usize, letter_id: usize) -> Result<LimitData<CRat>> {
        let mut ld = LimitData::new();
        let forms = [Letter::new(letter_id), Letter::starred(letter_id)];
        for a in forms {
            ld.set_m1(a, self.limit_moment(dim, &[a])?);
        }
        for a in forms {
            for b in forms {
                ld.set_m2(a, b, self.limit_moment(dim, &[a, b])?);
            }
        }
        Ok(ld)
    }
}

fn pow_rational(base: &BigRational, exp: u32) -> BigRational {
    let mut acc = BigRational::from_integer(BigInt::from(1));
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

fn pairing_is_noncrossing(p: &PairPartition) -> bool {
    let pairs = p.pairs();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for &(c, d) in &pairs[i + 1..] {
            let inner_c = a < c && c < b;
            let inner_d = a < d && d < b;
            if inner_c != inner_d {
                return false;
            }
        }
    }
    true
}

/// Exact normalized trace of a word in one explicit matrix: entries are
/// converted to rationals (every finite double is rational) and the product
/// trace is computed without rounding.
fn exact_word_trace(base: &ComplexMatrix, word: &[Letter]) -> Result<CRat> {
    let dim = base.rows();
    let plain: Vec<Vec<CRat>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let z = base.get(i, j);
                    CRat::from_f64_exact(z.re, z.im)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let entry = |letter: Letter, i: usize, j: usize| -> CRat {
        if letter.star {
            plain[j][i].conj()
        } else {
            plain[i][j].clone()
        }
    };
    // product[i][j] of the word matrices, built left to right.
    let mut product: Vec<Vec<CRat>> = (0..dim)
        .map(|i| (0..dim).map(|j| entry(word[0], i, j)).collect())
        .collect();
    for &letter in &word[1..] {
        let mut next = vec![vec![CRat::zero(); dim]; dim];
        for i in 0..dim {
            for (j, slot) in next[i].iter_mut().enumerate() {
                let mut acc = CRat::zero();
                for k in 0..dim {
                    acc = acc.add(&product[i][k].mul(&entry(letter, k, j)));
                }
                *slot = acc;
            }
        }
        product = next;
    }
    let mut tr = CRat::zero();
    for (i, row) in product.iter().enumerate() {
        tr = tr.add(&row[i]);
    }
    Ok(tr.mul(&CRat::from_int_ratio(1, dim as i64)))
}
