//! Weingarten functions of the unitary group, exactly.
//!
//! For a word length `m`, the Weingarten function is the inverse of the
//! convolution kernel `sigma ↦ M^{#cycles(sigma)}` on the symmetric group
//! `S_m`. Being a class function, it is determined by one value per cycle
//! type; this module solves the corresponding (number of partitions of `m`)²
//! linear system exactly — either over rational functions of the dimension
//! `M`, or over the rationals at a fixed integer dimension — and exposes the
//! resulting moment formulas for Haar-unitary matrix entries.

use crate::error::{Error, Result};
use crate::partition::{
    cycle_structure_of_join, enumerate_eps_pairings, EpsilonMap, PairPartition, Permutation,
};
use crate::linalg::gauss_solve;
use crate::ratfunc::{PolyZ, RatFuncM};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Largest `m` for which the symbolic (rational-function) solve is attempted:
/// the table is cached once per order.
pub const MAX_SYMBOLIC_ORDER: usize = 5;

/// Largest `m` for which numeric tables at a fixed dimension are computed.
pub const MAX_NUMERIC_ORDER: usize = 7;

/// Cycle type of a permutation of `{1, ..., m}`: the multiset of cycle
/// lengths (fixed points included), sorted decreasing. The parts sum to `m`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    parts: Vec<usize>,
}

impl CycleType {
    /// Builds from parts (any order); rejects zero parts and the empty type.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("empty cycle type"));
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::invalid("cycle type with a zero part"));
        }
        let mut parts = parts;
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType { parts })
    }

    pub fn from_permutation(p: &Permutation) -> Result<Self> {
        CycleType::new(p.cycle_type())
    }

    /// Cycle type of the join of two matchings of `{1, ..., 2m}`: a join
    /// block of size `2s` contributes a part `s`.
    pub fn from_join(p: &PairPartition, q: &PairPartition) -> Result<Self> {
        CycleType::new(cycle_structure_of_join(p, q))
    }

    /// The identity's type `[1, 1, ..., 1]` at order `m`.
    pub fn identity(m: usize) -> Result<Self> {
        CycleType::new(vec![1; m])
    }

    /// Word length `m` (sum of parts).
    pub fn order(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of cycles (number of parts).
    pub fn num_cycles(&self) -> usize {
        self.parts.len()
    }

    /// Decreasing parts.
    pub fn parts(&self) -> &[usize] {
        &self.parts
    }
}

impl fmt::Debug for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Catalan number `C_r` as an exact integer.
pub fn catalan(r: usize) -> BigInt {
    // C_0 = 1, C_{k+1} = C_k * 2(2k+1)/(k+2); the division is exact.
    let mut c = BigInt::one();
    for k in 0..r {
        c = c * BigInt::from(2 * (2 * k + 1)) / BigInt::from(k + 2);
    }
    c
}

/// Leading-order Weingarten coefficient of a cycle type: the product over
/// cycles of `(-1)^{len-1} * Catalan(len-1)`. The exact Weingarten value is
/// this coefficient times `M^{-2m + #cycles}` up to a relative `O(M^{-2})`
/// correction.
pub fn leading_coefficient(ct: &CycleType) -> BigInt {
    let mut acc = BigInt::one();
    for &len in ct.parts() {
        let factor = catalan(len - 1);
        acc *= if (len - 1) % 2 == 0 { factor } else { -factor };
    }
    acc
}

/// First-order Weingarten approximation `leading_coefficient * M^{-2m + #cycles}`
/// at an integer dimension, as an exact rational.
pub fn wg_asymptotic(ct: &CycleType, dim: &BigInt) -> Result<BigRational> {
    if dim.is_zero() || dim.is_negative() {
        return Err(Error::invalid("dimension must be a positive integer"));
    }
    let exponent = 2 * ct.order() - ct.num_cycles();
    let den = dim.pow(exponent as u32);
    Ok(BigRational::new(leading_coefficient(ct), den))
}

// ---------- S_m iteration over raw image vectors (0-based) ----------

/// All permutations of `{0, ..., m-1}` as image vectors, in lexicographic
/// order.
fn all_perms(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    let mut used = vec![false; m];
    perm_rec(m, &mut cur, &mut used, &mut out);
    out
}

fn perm_rec(m: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == m {
        out.push(cur.clone());
        return;
    }
    for v in 0..m {
        if !used[v] {
            used[v] = true;
            cur.push(v);
            perm_rec(m, cur, used, out);
            cur.pop();
            used[v] = false;
        }
    }
}

fn invert_images(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &im) in p.iter().enumerate() {
        inv[im] = i;
    }
    inv
}

/// Cycle type (decreasing) of an image vector.
fn cycle_type_of_images(p: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut parts = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            len += 1;
            cur = p[cur];
        }
        parts.push(len);
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}

/// Integer partitions of `m` in decreasing-lexicographic order.
fn integer_partitions(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    part_rec(m, m, &mut cur, &mut out);
    out
}

fn part_rec(remaining: usize, max_part: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if remaining == 0 {
        out.push(cur.clone());
        return;
    }
    for next in (1..=max_part.min(remaining)).rev() {
        cur.push(next);
        part_rec(remaining - next, next, cur, out);
        cur.pop();
    }
}

/// Canonical representative (0-based images) of a cycle type: consecutive
/// cycles `(1...l1)(l1+1...l1+l2)...`.
fn class_representative(parts: &[usize]) -> Vec<usize> {
    let m: usize = parts.iter().sum();
    let mut images = vec![0; m];
    let mut base = 0;
    for &len in parts {
        for k in 0..len {
            images[base + k] = base + (k + 1) % len;
        }
        base += len;
    }
    images
}

/// The convolution-kernel class matrix: entry `(i, j)` is the polynomial
/// `sum over tau in class j of M^{#cycles(rep_i ∘ tau^{-1})}`.
fn class_matrix(m: usize) -> (Vec<Vec<usize>>, Vec<Vec<PolyZ>>) {
    let classes = integer_partitions(m);
    let class_index: HashMap<Vec<usize>, usize> =
        classes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let reps: Vec<Vec<usize>> = classes.iter().map(|c| class_representative(c)).collect();
    // counts[i][j][k] = number of tau in class j with #cycles(rep_i ∘ tau^{-1}) = k.
    let mut counts = vec![vec![vec![0u64; m + 1]; classes.len()]; classes.len()];
    for tau in all_perms(m) {
        let j = class_index[&cycle_type_of_images(&tau)];
        let tau_inv = invert_images(&tau);
        for (i, rep) in reps.iter().enumerate() {
            let composed: Vec<usize> = tau_inv.iter().map(|&x| rep[x]).collect();
            let k = cycle_type_of_images(&composed).len();
            counts[i][j][k] += 1;
        }
    }
    let matrix = counts
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|per_power| {
                    PolyZ::from_coeffs(per_power.into_iter().map(BigInt::from).collect())
                })
                .collect()
        })
        .collect();
    (classes, matrix)
}

type SymbolicTable = Arc<HashMap<CycleType, RatFuncM>>;
type NumericTable = Arc<HashMap<CycleType, BigRational>>;

fn symbolic_cache() -> &'static Mutex<HashMap<usize, SymbolicTable>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, SymbolicTable>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn numeric_cache() -> &'static Mutex<HashMap<(usize, BigInt), NumericTable>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, BigInt), NumericTable>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The full symbolic Weingarten table at order `m`: one rational function of
/// `M` per cycle type. Cached per order.
pub fn symbolic_table(m: usize) -> Result<SymbolicTable> {
    if m == 0 {
        return Err(Error::invalid("Weingarten order must be >= 1"));
    }
    if m > MAX_SYMBOLIC_ORDER {
        return Err(Error::ResourceLimit(format!(
            "symbolic Weingarten solve capped at order {MAX_SYMBOLIC_ORDER} (requested {m})"
        )));
    }
    if let Some(t) = symbolic_cache().lock().unwrap().get(&m) {
        return Ok(t.clone());
    }
    let (classes, matrix) = class_matrix(m);
    let a: Vec<Vec<RatFuncM>> = matrix
        .iter()
        .map(|row| row.iter().map(|p| RatFuncM::from_poly(p.clone())).collect())
        .collect();
    let id_index = classes
        .iter()
        .position(|c| c.iter().all(|&p| p == 1))
        .expect("identity class exists");
    let mut rhs = vec![RatFuncM::zero(); classes.len()];
    rhs[id_index] = RatFuncM::one();
    let solution = gauss_solve(a, rhs)?;
    let table: HashMap<CycleType, RatFuncM> = classes
        .into_iter()
        .zip(solution)
        .map(|(parts, value)| (CycleType::new(parts).expect("valid parts"), value))
        .collect();
    let arc = Arc::new(table);
    symbolic_cache().lock().unwrap().insert(m, arc.clone());
    Ok(arc)
}

/// The numeric Weingarten table at order `m` and integer dimension `dim`.
/// Dimensions below `m` make the kernel singular and are rejected. Cached per
/// `(m, dim)`.
pub fn numeric_table(m: usize, dim: &BigInt) -> Result<NumericTable> {
    if m == 0 {
        return Err(Error::invalid("Weingarten order must be >= 1"));
    }
    if m > MAX_NUMERIC_ORDER {
        return Err(Error::ResourceLimit(format!(
            "numeric Weingarten solve capped at order {MAX_NUMERIC_ORDER} (requested {m})"
        )));
    }
    if dim < &BigInt::from(m) {
        return Err(Error::SingularSystem(format!(
            "dimension M = {dim} below word order {m}: convolution kernel is singular"
        )));
    }
    let key = (m, dim.clone());
    if let Some(t) = numeric_cache().lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let table: HashMap<CycleType, BigRational> = if m <= MAX_SYMBOLIC_ORDER {
        let sym = symbolic_table(m)?;
        let x = BigRational::from_integer(dim.clone());
        let mut t = HashMap::new();
        for (ct, rf) in sym.iter() {
            t.insert(ct.clone(), rf.eval(&x)?);
        }
        t
    } else {
        let (classes, matrix) = class_matrix(m);
        let a: Vec<Vec<BigRational>> = matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| BigRational::from_integer(p.eval_int(dim)))
                    .collect()
            })
            .collect();
        let id_index = classes
            .iter()
            .position(|c| c.iter().all(|&p| p == 1))
            .expect("identity class exists");
        let mut rhs = vec![BigRational::zero(); classes.len()];
        rhs[id_index] = BigRational::one();
        let solution = gauss_solve(a, rhs)?;
        classes
            .into_iter()
            .zip(solution)
            .map(|(parts, value)| (CycleType::new(parts).expect("valid parts"), value))
            .collect()
    };
    let arc = Arc::new(table);
    numeric_cache().lock().unwrap().insert(key, arc.clone());
    Ok(arc)
}

/// Exact symbolic Weingarten value of a cycle type.
pub fn wg_symbolic(ct: &CycleType) -> Result<RatFuncM> {
    let table = symbolic_table(ct.order())?;
    Ok(table.get(ct).expect("table covers all classes").clone())
}

/// Exact Weingarten value of a cycle type at an integer dimension.
pub fn wg_at(ct: &CycleType, dim: &BigInt) -> Result<BigRational> {
    let table = numeric_table(ct.order(), dim)?;
    Ok(table.get(ct).expect("table covers all classes").clone())
}

/// Exact Weingarten value attached to a pair of matchings of `{1, ..., 2m}`:
/// the value of the cycle type of their join.
pub fn wg_of_pairings(p: &PairPartition, q: &PairPartition, dim: &BigInt) -> Result<BigRational> {
    wg_at(&CycleType::from_join(p, q)?, dim)
}

/// Largest entry-moment word order accepted by the moment evaluators.
pub const MAX_MOMENT_ORDER: usize = 6;

/// Exact mixed moment of Haar-unitary entries in segregated form:
/// `E[ u[r1,c1] ... u[rm,cm] * conj(u[r'1,c'1]) ... conj(u[r'm,c'm]) ]`.
///
/// When the numbers of plain and conjugated factors differ the moment is zero
/// by phase invariance and `0` is returned without enumeration.
pub fn haar_moment_segregated(
    rows: &[usize],
    cols: &[usize],
    rows_conj: &[usize],
    cols_conj: &[usize],
    dim: &BigInt,
) -> Result<BigRational> {
    if rows.len() != cols.len() || rows_conj.len() != cols_conj.len() {
        return Err(Error::invalid("row/column index lists of unequal length"));
    }
    check_indices(rows.iter().chain(cols).chain(rows_conj).chain(cols_conj), dim)?;
    if rows.len() != rows_conj.len() {
        return Ok(BigRational::zero());
    }
    let m = rows.len();
    if m == 0 {
        return Ok(BigRational::one());
    }
    if m > MAX_MOMENT_ORDER {
        return Err(Error::ResourceLimit(format!(
            "entry moment order {m} exceeds cap {MAX_MOMENT_ORDER}"
        )));
    }
    let table = numeric_table(m, dim)?;
    // sigma matches plain rows to conjugated rows, tau the columns.
    let sigmas: Vec<Vec<usize>> = all_perms(m)
        .into_iter()
        .filter(|s| (0..m).all(|k| rows[k] == rows_conj[s[k]]))
        .collect();
    if sigmas.is_empty() {
        return Ok(BigRational::zero());
    }
    let taus: Vec<Vec<usize>> = all_perms(m)
        .into_iter()
        .filter(|t| (0..m).all(|k| cols[k] == cols_conj[t[k]]))
        .collect();
    let mut acc = BigRational::zero();
    for sigma in &sigmas {
        let sigma_inv = invert_images(sigma);
        for tau in &taus {
            let prod: Vec<usize> = (0..m).map(|x| sigma_inv[tau[x]]).collect();
            let ct = CycleType::new(cycle_type_of_images(&prod))?;
            acc += table.get(&ct).expect("class covered");
        }
    }
    Ok(acc)
}

/// Exact mixed moment of Haar-unitary entries in interleaved form: position
/// `s` carries the factor `u[rows[s], cols[s]]`, conjugated when
/// `eps` marks it starred. Implemented as a sum over pairs of ε-respecting
/// matchings weighted by the Weingarten value of their join.
pub fn haar_moment_interleaved(
    rows: &[usize],
    cols: &[usize],
    eps: &EpsilonMap,
    dim: &BigInt,
) -> Result<BigRational> {
    let n = eps.len();
    if rows.len() != n || cols.len() != n {
        return Err(Error::invalid("index lists must match the ε-word length"));
    }
    check_indices(rows.iter().chain(cols), dim)?;
    if n == 0 {
        return Ok(BigRational::one());
    }
    if n % 2 != 0 || eps.count_plain() * 2 != n {
        return Ok(BigRational::zero());
    }
    let m = n / 2;
    if m > MAX_MOMENT_ORDER {
        return Err(Error::ResourceLimit(format!(
            "entry moment order {m} exceeds cap {MAX_MOMENT_ORDER}"
        )));
    }
    let table = numeric_table(m, dim)?;
    let all = enumerate_eps_pairings(eps)?;
    let compatible = |labels: &[usize], pairing: &PairPartition| {
        (1..=n).all(|s| labels[s - 1] == labels[pairing.partner(s) - 1])
    };
    let ps: Vec<&PairPartition> = all.iter().filter(|p| compatible(rows, p)).collect();
    let qs: Vec<&PairPartition> = all.iter().filter(|q| compatible(cols, q)).collect();
    let mut acc = BigRational::zero();
    for p in &ps {
        for q in &qs {
            let ct = CycleType::from_join(p, q)?;
            acc += table.get(&ct).expect("class covered");
        }
    }
    Ok(acc)
}

fn check_indices<'a>(
    indices: impl Iterator<Item = &'a usize>,
    dim: &BigInt,
) -> Result<()> {
    for &ix in indices {
        if ix == 0 {
            return Err(Error::invalid("matrix indices are 1-based"));
        }
        if &BigInt::from(ix) > dim {
            return Err(Error::invalid(format!(
                "matrix index {ix} exceeds dimension {dim}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Eps;
    use crate::ratfunc::PolyZ;
    use num_traits::ToPrimitive;

    fn rf(num: &[i64], den: &[i64]) -> RatFuncM {
        RatFuncM::new(PolyZ::from_i64s(num), PolyZ::from_i64s(den)).unwrap()
    }

    fn ct(parts: &[usize]) -> CycleType {
        CycleType::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn catalan_values() {
        let expect = [1u64, 1, 2, 5, 14, 42, 132, 429, 1430];
        for (r, &v) in expect.iter().enumerate() {
            assert_eq!(catalan(r), BigInt::from(v));
        }
    }

    #[test]
    fn leading_coefficients() {
        assert_eq!(leading_coefficient(&ct(&[1])), BigInt::from(1));
        assert_eq!(leading_coefficient(&ct(&[2])), BigInt::from(-1));
        assert_eq!(leading_coefficient(&ct(&[3])), BigInt::from(2));
        assert_eq!(leading_coefficient(&ct(&[4])), BigInt::from(-5));
        assert_eq!(leading_coefficient(&ct(&[2, 2])), BigInt::from(1));
        assert_eq!(leading_coefficient(&ct(&[3, 2, 1])), BigInt::from(-2));
    }

    #[test]
    fn symbolic_low_orders_match_closed_forms() {
        // Order 1: 1/M.
        assert_eq!(wg_symbolic(&ct(&[1])).unwrap(), rf(&[1], &[0, 1]));
        // Order 2: 1/(M^2-1) and -1/(M(M^2-1)) = -1/(M^3 - M).
        assert_eq!(wg_symbolic(&ct(&[1, 1])).unwrap(), rf(&[1], &[-1, 0, 1]));
        assert_eq!(wg_symbolic(&ct(&[2])).unwrap(), rf(&[-1], &[0, -1, 0, 1]));
        // Order 3 over the common denominator M(M^2-1)(M^2-4) = M^5 - 5M^3 + 4M:
        //   [1,1,1] -> (M^2-2) / that, [2,1] -> -1/((M^2-1)(M^2-4)), [3] -> 2 / that.
        assert_eq!(
            wg_symbolic(&ct(&[1, 1, 1])).unwrap(),
            rf(&[-2, 0, 1], &[0, 4, 0, -5, 0, 1])
        );
        assert_eq!(
            wg_symbolic(&ct(&[2, 1])).unwrap(),
            rf(&[-1], &[4, 0, -5, 0, 1])
        );
        assert_eq!(
            wg_symbolic(&ct(&[3])).unwrap(),
            rf(&[2], &[0, 4, 0, -5, 0, 1])
        );
    }

    #[test]
    fn convolution_identity_holds_symbolically() {
        // Independent check that the solved table really inverts the kernel:
        // sum over tau of M^{#(sigma tau^{-1})} Wg(tau) = [sigma = id],
        // verified as rational functions for every sigma class, m <= 4.
        for m in 1..=4 {
            let table = symbolic_table(m).unwrap();
            let perms = all_perms(m);
            for sigma_parts in integer_partitions(m) {
                let sigma = class_representative(&sigma_parts);
                let mut acc = RatFuncM::zero();
                for tau in &perms {
                    let tau_inv = invert_images(tau);
                    let prod: Vec<usize> = (0..m).map(|x| sigma[tau_inv[x]]).collect();
                    let cycles = cycle_type_of_images(&prod).len();
                    let weight = RatFuncM::from_poly(PolyZ::monomial(cycles, BigInt::one()));
                    let wg = &table[&ct(&cycle_type_of_images(tau))];
                    acc = acc.add(&weight.mul(wg));
                }
                let expect = if sigma_parts.iter().all(|&p| p == 1) {
                    RatFuncM::one()
                } else {
                    RatFuncM::zero()
                };
                assert_eq!(acc, expect, "m={m}, class {sigma_parts:?}");
            }
        }
    }

    #[test]
    fn numeric_tables_match_symbolic_evaluation() {
        let dim = BigInt::from(8);
        let t = numeric_table(3, &dim).unwrap();
        // (M^2-2)/(M(M^2-1)(M^2-4)) at M=8: 62/(8*63*60) = 31/15120.
        assert_eq!(
            t[&ct(&[1, 1, 1])],
            BigRational::new(BigInt::from(31), BigInt::from(15120))
        );
        // Numeric path above the symbolic cap agrees with the convolution
        // identity (spot check at order 6, M = 7).
        let dim6 = BigInt::from(7);
        let t6 = numeric_table(6, &dim6).unwrap();
        let perms = all_perms(6);
        let mut acc = BigRational::zero();
        // sigma = id row of the convolution.
        for tau in &perms {
            let cycles = cycle_type_of_images(tau).len();
            let m_pow = BigRational::from_integer(dim6.pow(cycles as u32));
            acc += m_pow * &t6[&ct(&cycle_type_of_images(tau))];
        }
        assert_eq!(acc, BigRational::one());
    }

    #[test]
    fn dimension_below_order_is_singular() {
        assert!(matches!(
            numeric_table(3, &BigInt::from(2)),
            Err(Error::SingularSystem(_))
        ));
    }

    #[test]
    fn asymptotic_approaches_exact() {
        // Relative error of the first-order form decays like M^{-2}.
        for parts in [vec![1, 1, 1], vec![2, 1], vec![3]] {
            let t = ct(&parts);
            let err_at = |m: i64| -> f64 {
                let dim = BigInt::from(m);
                let exact = wg_at(&t, &dim).unwrap();
                let approx = wg_asymptotic(&t, &dim).unwrap();
                let ratio = (exact.clone() - approx.clone()) / exact;
                ratio.to_f64().unwrap().abs()
            };
            let e100 = err_at(100);
            let e200 = err_at(200);
            assert!(e100 < 1e-2, "{parts:?}: {e100}");
            // Quartering (within slack) when M doubles.
            assert!(e200 < e100 / 3.0, "{parts:?}: {e100} -> {e200}");
        }
    }

    #[test]
    fn wg_of_pairings_uses_the_join() {
        let dim = BigInt::from(9);
        let p = PairPartition::from_pairs(4, &[(1, 2), (3, 4)]).unwrap();
        let q = PairPartition::from_pairs(4, &[(1, 4), (2, 3)]).unwrap();
        assert_eq!(
            wg_of_pairings(&p, &p, &dim).unwrap(),
            wg_at(&ct(&[1, 1]), &dim).unwrap()
        );
        assert_eq!(
            wg_of_pairings(&p, &q, &dim).unwrap(),
            wg_at(&ct(&[2]), &dim).unwrap()
        );
    }

    #[test]
    fn entry_moment_worked_examples() {
        let check = |rows: &[usize],
                     cols: &[usize],
                     rows_c: &[usize],
                     cols_c: &[usize],
                     dim: i64,
                     expect: BigRational| {
            let d = BigInt::from(dim);
            let got = haar_moment_segregated(rows, cols, rows_c, cols_c, &d).unwrap();
            assert_eq!(got, expect);
        };
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        // E|u11|^2 = 1/M.
        check(&[1], &[1], &[1], &[1], 8, q(1, 8));
        // E u11 u22 conj(u11) conj(u22) = 1/(M^2-1) = 1/63 at M = 8.
        check(&[1, 2], &[1, 2], &[1, 2], &[1, 2], 8, q(1, 63));
        // E u11 u12 conj(u11) conj(u12) = 1/(M(M+1)).
        check(&[1, 1], &[1, 2], &[1, 1], &[1, 2], 8, q(1, 72));
        check(&[1, 1], &[1, 2], &[1, 1], &[1, 2], 5, q(1, 30));
        // Mismatched plain/conjugated counts vanish by phase invariance.
        check(&[1, 1], &[1, 2], &[1], &[1], 8, BigRational::zero());
    }

    #[test]
    fn interleaved_agrees_with_segregated() {
        // Concatenate plain factors then conjugated factors and compare.
        let dim = BigInt::from(6);
        let cases: Vec<(Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>)> = vec![
            (vec![1], vec![1], vec![1], vec![1]),
            (vec![1, 2], vec![3, 3], vec![2, 1], vec![3, 3]),
            (vec![1, 1], vec![1, 2], vec![1, 1], vec![1, 2]),
            (vec![1, 2, 2], vec![1, 1, 2], vec![2, 1, 2], vec![1, 1, 2]),
        ];
        for (r, c, rc, cc) in cases {
            let m = r.len();
            let seg = haar_moment_segregated(&r, &c, &rc, &cc, &dim).unwrap();
            let rows: Vec<usize> = r.iter().chain(rc.iter()).copied().collect();
            let cols: Vec<usize> = c.iter().chain(cc.iter()).copied().collect();
            let eps = EpsilonMap::from_slice(
                &std::iter::repeat(Eps::Plain)
                    .take(m)
                    .chain(std::iter::repeat(Eps::Star).take(m))
                    .collect::<Vec<_>>(),
            );
            let inter = haar_moment_interleaved(&rows, &cols, &eps, &dim).unwrap();
            assert_eq!(seg, inter, "word r={r:?} c={c:?}");
        }
    }

    #[test]
    fn moment_input_validation() {
        let d = BigInt::from(4);
        assert!(haar_moment_segregated(&[1], &[1, 2], &[1], &[1], &d).is_err());
        assert!(haar_moment_segregated(&[5], &[1], &[5], &[1], &d).is_err());
        assert!(haar_moment_segregated(&[0], &[1], &[1], &[1], &d).is_err());
        // Unbalanced ε gives exact zero.
        let eps = EpsilonMap::from_slice(&[Eps::Plain, Eps::Plain]);
        assert_eq!(
            haar_moment_interleaved(&[1, 1], &[1, 1], &eps, &d).unwrap(),
            BigRational::zero()
        );
    }
}
