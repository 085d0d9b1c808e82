//! Free-probability layer: moment/cumulant transforms over the non-crossing
//! partition lattice, the limit *-distribution of partially transposed
//! ensembles, reductions for words mixing flip symbols, and semicircle
//! utilities.
//!
//! Everything is generic over [`Scalar`], so the same transforms run on exact
//! complex rationals (predictions) and on floating estimates (empirical
//! cumulants).

use crate::error::{Error, Result};
use crate::partition::{enumerate_nc12_on, enumerate_noncrossing, relative_nc_complement};
use crate::scalar::Scalar;
use crate::word::{Letter, Symbol, WordLetter};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::collections::HashMap;
use std::hash::Hash;

/// Source of mixed moments `phi(word)` over an arbitrary letter alphabet.
pub trait MomentSource<L, T> {
    fn moment(&self, word: &[L]) -> Result<T>;
}

/// Source of free cumulants `kappa(word)`.
pub trait CumulantSource<L, T> {
    fn cumulant(&self, word: &[L]) -> Result<T>;
}

/// Finite moment table; lookups of absent words fail with a missing-moment
/// error naming the word.
#[derive(Clone, Debug, Default)]
pub struct MomentTable<L, T> {
    map: HashMap<Vec<L>, T>,
}

impl<L: Clone + Eq + Hash + std::fmt::Debug, T: Clone> MomentTable<L, T> {
    pub fn new() -> Self {
        MomentTable {
            map: HashMap::new(),
        }
    }

    pub fn insert(&mut self, word: Vec<L>, value: T) {
        self.map.insert(word, value);
    }

    pub fn get(&self, word: &[L]) -> Option<&T> {
        self.map.get(word)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl<L: Clone + Eq + Hash + std::fmt::Debug, T: Clone> MomentSource<L, T> for MomentTable<L, T> {
    fn moment(&self, word: &[L]) -> Result<T> {
        self.map
            .get(word)
            .cloned()
            .ok_or_else(|| Error::MissingMoment(format!("{word:?}")))
    }
}

impl<T: Scalar> MomentTable<Letter, T> {
    /// Verifies `phi(w) = conj(phi(w~))` for every word whose *-reverse `w~`
    /// (reverse order, stars flipped) is also present in the table.
    pub fn check_conjugate_symmetry(&self) -> Result<()> {
        for (word, value) in &self.map {
            let mirrored: Vec<Letter> = word.iter().rev().map(|l| l.conj()).collect();
            if let Some(mv) = self.map.get(&mirrored) {
                if mv != &value.conj() {
                    return Err(Error::invalid(format!(
                        "conjugate symmetry violated between {word:?} and {mirrored:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Finite cumulant table (absent words are errors, mirroring [`MomentTable`]).
#[derive(Clone, Debug, Default)]
pub struct CumulantTable<L, T> {
    map: HashMap<Vec<L>, T>,
}

impl<L: Clone + Eq + Hash + std::fmt::Debug, T: Clone> CumulantTable<L, T> {
    pub fn new() -> Self {
        CumulantTable {
            map: HashMap::new(),
        }
    }

    pub fn insert(&mut self, word: Vec<L>, value: T) {
        self.map.insert(word, value);
    }
}

impl<L: Clone + Eq + Hash + std::fmt::Debug, T: Clone> CumulantSource<L, T>
    for CumulantTable<L, T>
{
    fn cumulant(&self, word: &[L]) -> Result<T> {
        self.map
            .get(word)
            .cloned()
            .ok_or_else(|| Error::MissingMoment(format!("cumulant of {word:?}")))
    }
}

/// Wrapper turning a closure into a [`MomentSource`].
pub struct MomentFn<F>(pub F);

impl<L, T, F: Fn(&[L]) -> Result<T>> MomentSource<L, T> for MomentFn<F> {
    fn moment(&self, word: &[L]) -> Result<T> {
        (self.0)(word)
    }
}

/// Mixed free cumulant of a word, computed from moments by recursion over
/// the non-crossing partition lattice:
/// `kappa(w) = phi(w) - sum over non-full NC partitions of products of
/// cumulants of the restricted subwords`.
pub fn cumulants_from_moments<L, T, P>(phi: &P, word: &[L]) -> Result<T>
where
    L: Clone + Eq + Hash,
    T: Scalar,
    P: MomentSource<L, T>,
{
    if word.is_empty() {
        return Err(Error::invalid("cumulant of the empty word"));
    }
    let mut memo: HashMap<Vec<L>, T> = HashMap::new();
    kappa_rec(phi, word, &mut memo)
}

fn kappa_rec<L, T, P>(phi: &P, word: &[L], memo: &mut HashMap<Vec<L>, T>) -> Result<T>
where
    L: Clone + Eq + Hash,
    T: Scalar,
    P: MomentSource<L, T>,
{
    if let Some(v) = memo.get(word) {
        return Ok(v.clone());
    }
    let mut acc = phi.moment(word)?;
    for pi in enumerate_noncrossing(word.len())? {
        if pi.num_blocks() <= 1 {
            continue;
        }
        let mut prod = T::one();
        for block in pi.blocks() {
            let sub: Vec<L> = block.iter().map(|&i| word[i - 1].clone()).collect();
            let k = kappa_rec(phi, &sub, memo)?;
            prod = prod.mul(&k);
        }
        acc = acc.sub(&prod);
    }
    memo.insert(word.to_vec(), acc.clone());
    Ok(acc)
}

/// Mixed moment of a word from free cumulants: the sum over all non-crossing
/// partitions of the product of cumulants of the restricted subwords.
pub fn moments_from_cumulants<L, T, K>(kappa: &K, word: &[L]) -> Result<T>
where
    L: Clone + Eq + Hash,
    T: Scalar,
    K: CumulantSource<L, T>,
{
    if word.is_empty() {
        return Err(Error::invalid("moment of the empty word"));
    }
    let mut acc = T::zero();
    for pi in enumerate_noncrossing(word.len())? {
        let mut prod = T::one();
        for block in pi.blocks() {
            let sub: Vec<L> = block.iter().map(|&i| word[i - 1].clone()).collect();
            prod = prod.mul(&kappa.cumulant(&sub)?);
        }
        acc = acc.add(&prod);
    }
    Ok(acc)
}

/// First- and second-order limit moments of an underlying ensemble family:
/// `m1(letter) = lim E tr(letter)` and `m2(a, b) = lim E tr(a b)`, with
/// letters carrying an optional adjoint star. This is the full input needed
/// by the partial-transpose limit formulas.
#[derive(Clone, Debug, Default)]
pub struct LimitData<T> {
    rank1: HashMap<Letter, T>,
    rank2: HashMap<(Letter, Letter), T>,
}

impl<T: Scalar> LimitData<T> {
    pub fn new() -> Self {
        LimitData {
            rank1: HashMap::new(),
            rank2: HashMap::new(),
        }
    }

    pub fn set_m1(&mut self, letter: Letter, value: T) {
        self.rank1.insert(letter, value);
    }

    pub fn set_m2(&mut self, a: Letter, b: Letter, value: T) {
        self.rank2.insert((a, b), value);
    }

    pub fn m1(&self, letter: Letter) -> Result<T> {
        self.rank1
            .get(&letter)
            .cloned()
            .ok_or_else(|| Error::MissingMoment(format!("m1({letter})")))
    }

    pub fn m2(&self, a: Letter, b: Letter) -> Result<T> {
        self.rank2
            .get(&(a, b))
            .cloned()
            .ok_or_else(|| Error::MissingMoment(format!("m2({a}, {b})")))
    }

    /// Second free cumulant `m2(a, b) - m1(a) m1(b)`.
    pub fn kappa2(&self, a: Letter, b: Letter) -> Result<T> {
        Ok(self.m2(a, b)?.sub(&self.m1(a)?.mul(&self.m1(b)?)))
    }
}

/// Free cumulant of a word in the limit family of right-leg partial
/// transposes: first order is the underlying mean, second order is the
/// underlying second cumulant, and every order three and higher vanishes.
pub fn pt_limit_cumulants<T: Scalar>(ld: &LimitData<T>, word: &[Letter]) -> Result<T> {
    match word.len() {
        0 => Err(Error::invalid("cumulant of the empty word")),
        1 => ld.m1(word[0]),
        2 => ld.kappa2(word[0], word[1]),
        _ => Ok(T::zero()),
    }
}

/// Mixed moment of a word in the limit family of right-leg partial
/// transposes: the sum over non-crossing partitions with blocks of size at
/// most two, singletons weighted by means and pairs by second cumulants.
pub fn pt_limit_moments<T: Scalar>(ld: &LimitData<T>, word: &[Letter]) -> Result<T> {
    if word.is_empty() {
        return Err(Error::invalid("moment of the empty word"));
    }
    let ground: Vec<usize> = (1..=word.len()).collect();
    let mut acc = T::zero();
    for pi in enumerate_nc12_on(&ground)? {
        let mut prod = T::one();
        for block in pi.blocks() {
            let factor = match block.as_slice() {
                [k] => ld.m1(word[k - 1])?,
                [k, t] => ld.kappa2(word[k - 1], word[t - 1])?,
                _ => unreachable!("blocks have size <= 2"),
            };
            prod = prod.mul(&factor);
        }
        acc = acc.add(&prod);
    }
    Ok(acc)
}

/// Limit of `E tr(word)` for a word whose letters carry arbitrary flip
/// symbols, under asymptotic freeness of the flipped copies.
///
/// The right-leg-flipped positions contribute through their (at most second
/// order) cumulants over size-≤2 non-crossing partitions; the remaining
/// positions factor over the relative non-crossing complement, where each
/// complement block must be symbol-uniform: plain blocks reduce to a moment
/// of `phi`, full-transpose blocks to the moment of the reversed word, and
/// left-leg blocks to the right-leg limit moment of the reversed word. A
/// complement block mixing symbols has no closed reduction here and returns a
/// missing-moment error.
pub fn mixed_word_limit<T, P>(ld: &LimitData<T>, phi: &P, word: &[WordLetter]) -> Result<T>
where
    T: Scalar,
    P: MomentSource<Letter, T>,
{
    let m = word.len();
    if m == 0 {
        return Err(Error::invalid("limit of the empty word"));
    }
    let s_positions: Vec<usize> = (1..=m)
        .filter(|&k| word[k - 1].symbol == Symbol::PartialRight)
        .collect();
    let mut total = T::zero();
    for rho in enumerate_nc12_on(&s_positions)? {
        let mut term = T::one();
        for block in rho.blocks() {
            let letters: Vec<Letter> = block.iter().map(|&k| word[k - 1].plain()).collect();
            term = term.mul(&pt_limit_cumulants(ld, &letters)?);
        }
        let complement = relative_nc_complement(&rho, m)?;
        for block in complement.blocks() {
            let symbols: Vec<Symbol> = block.iter().map(|&k| word[k - 1].symbol).collect();
            let first = symbols[0];
            if symbols.iter().any(|&s| s != first) {
                return Err(Error::MissingMoment(format!(
                    "complement block {block:?} mixes flip symbols; no closed reduction"
                )));
            }
            let letters: Vec<Letter> = block.iter().map(|&k| word[k - 1].plain()).collect();
            let reversed: Vec<Letter> = letters.iter().rev().copied().collect();
            let factor = match first {
                Symbol::Identity => phi.moment(&letters)?,
                Symbol::Transpose => phi.moment(&reversed)?,
                Symbol::PartialLeft => pt_limit_moments(ld, &reversed)?,
                Symbol::PartialRight => unreachable!("right-leg positions are excluded"),
            };
            term = term.mul(&factor);
        }
        total = total.add(&term);
    }
    Ok(total)
}

/// Exact moments of the semicircle family with the given mean and variance:
/// the `n`-th moment is `sum_j binom(n, 2j) Catalan_j mean^(n-2j) variance^j`.
pub fn semicircle_moments<T: Scalar>(mean: &T, variance: &T, n: usize) -> Result<T> {
    const MAX_ORDER: usize = 30;
    if n > MAX_ORDER {
        return Err(Error::ResourceLimit(format!(
            "semicircle moment order {n} exceeds cap {MAX_ORDER}"
        )));
    }
    let mut acc = T::zero();
    for j in 0..=n / 2 {
        let coeff = binomial(n, 2 * j) * crate::weingarten::catalan(j);
        let coeff = coeff
            .to_i64()
            .expect("coefficient fits i64 under the order cap");
        let mut term = T::from_int(coeff);
        for _ in 0..n - 2 * j {
            term = term.mul(mean);
        }
        for _ in 0..j {
            term = term.mul(variance);
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Exact binomial coefficient (zero when `k > n`).
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut acc = BigInt::from(1);
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Outcome of the semicircle positivity check. Two inequalities are reported
/// side by side because they differ away from the boundary; see the `note`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositivityReport {
    pub mean: f64,
    pub variance: f64,
    /// `(mean - 2 sqrt(var), mean + 2 sqrt(var))`.
    pub support: (f64, f64),
    /// Whether the support's lower edge is >= 0 (the operative positivity
    /// criterion for the semicircle limit).
    pub support_nonnegative: bool,
    /// Whether `mean^2 <= 4 * variance` holds — the reversed comparison,
    /// recorded alongside because it is sometimes quoted as the criterion.
    pub mean_sq_le_four_var: bool,
    pub note: String,
}

/// Checks positivity of a semicircle limit law with the given first moment
/// and second moment. Errors when the implied variance is negative.
pub fn positivity_support_check(mean: f64, second_moment: f64) -> Result<PositivityReport> {
    let mut variance = second_moment - mean * mean;
    if variance < 0.0 {
        if variance > -1e-12 {
            variance = 0.0;
        } else {
            return Err(Error::invalid(format!(
                "second moment {second_moment} below squared mean {}",
                mean * mean
            )));
        }
    }
    let half_width = 2.0 * variance.sqrt();
    let support = (mean - half_width, mean + half_width);
    Ok(PositivityReport {
        mean,
        variance,
        support,
        support_nonnegative: support.0 >= -1e-12,
        mean_sq_le_four_var: mean * mean <= 4.0 * variance + 1e-12,
        note: "support_nonnegative tests mean >= 2*sqrt(var); mean_sq_le_four_var \
               records the reversed comparison mean^2 <= 4*var; the two coincide \
               only on the boundary mean = 2*sqrt(var)."
            .to_string(),
    })
}
