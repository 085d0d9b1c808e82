//! Pair partitions (perfect matchings) of `{1, ..., 2m}`, optionally
//! constrained by an ε-word that marks each position as plain or starred.

use super::perm::Permutation;
use crate::error::{Error, Result};
use std::fmt;

/// Largest `m` for which `enumerate_pairings(m)` will run; `(2m-1)!!` grows
/// past two million right above this.
pub const MAX_PAIRING_HALF_SIZE: usize = 8;

/// A perfect matching of `{1, ..., 2m}`: every point has exactly one partner.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairPartition {
    /// `partner[i]` is the 0-based partner of the 0-based point `i`;
    /// fixed-point-free involution.
    partner: Vec<usize>,
}

impl PairPartition {
    /// Builds a matching of `{1, ..., n}` from 1-based pairs. The pairs must
    /// cover every point exactly once.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::invalid(format!("pair partition on odd ground size {n}")));
        }
        if pairs.len() * 2 != n {
            return Err(Error::invalid(format!(
                "{} pairs cannot cover {n} points",
                pairs.len()
            )));
        }
        let mut partner = vec![usize::MAX; n];
        for &(a, b) in pairs {
            if a == 0 || a > n || b == 0 || b > n {
                return Err(Error::invalid(format!("pair ({a},{b}) out of range 1..={n}")));
            }
            if a == b {
                return Err(Error::invalid(format!("point {a} paired with itself")));
            }
            if partner[a - 1] != usize::MAX || partner[b - 1] != usize::MAX {
                return Err(Error::invalid(format!("point in pair ({a},{b}) already paired")));
            }
            partner[a - 1] = b - 1;
            partner[b - 1] = a - 1;
        }
        Ok(PairPartition { partner })
    }

    /// Ground-set size `2m`.
    pub fn n(&self) -> usize {
        self.partner.len()
    }

    /// Number of pairs `m`.
    pub fn m(&self) -> usize {
        self.partner.len() / 2
    }

    /// Partner of the 1-based point `x`.
    pub fn partner(&self, x: usize) -> usize {
        assert!(
            x >= 1 && x <= self.partner.len(),
            "point {x} out of range 1..={}",
            self.partner.len()
        );
        self.partner[x - 1] + 1
    }

    /// The pairs as 1-based `(low, high)` tuples sorted by their low point.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m());
        for i in 0..self.partner.len() {
            let j = self.partner[i];
            if i < j {
                out.push((i + 1, j + 1));
            }
        }
        out
    }

    /// The matching viewed as a fixed-point-free involution.
    pub fn as_permutation(&self) -> Permutation {
        Permutation::from_one_based_images(
            &self.partner.iter().map(|&p| p + 1).collect::<Vec<_>>(),
        )
        .expect("a matching is always a valid permutation")
    }

    /// Conjugated matching: points `a—b` become `phi(a)—phi(b)`.
    pub fn conjugate_by(&self, phi: &Permutation) -> PairPartition {
        assert_eq!(phi.n(), self.n(), "conjugating by permutation of wrong degree");
        let mut partner = vec![usize::MAX; self.partner.len()];
        for i in 0..self.partner.len() {
            let a = phi.apply(i + 1) - 1;
            let b = phi.apply(self.partner[i] + 1) - 1;
            partner[a] = b;
        }
        PairPartition { partner }
    }
}

/// Pretty-printer shared by `Debug` and `Display`: `{(1,2),(3,4)}`.
fn fmt_pairs(p: &PairPartition, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{{")?;
    for (k, (a, b)) in p.pairs().into_iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        write!(f, "({a},{b})")?;
    }
    write!(f, "}}")
}

impl fmt::Debug for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_pairs(self, f)
    }
}

impl fmt::Display for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_pairs(self, f)
    }
}

/// Position decoration: a plain or a starred (conjugated) slot of a word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Eps {
    Plain,
    Star,
}

/// An ε-word: one [`Eps`] per position of `{1, ..., 2m}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EpsilonMap {
    signs: Vec<Eps>,
}

impl EpsilonMap {
    /// The alternating word of length `2m`: odd positions plain, even starred.
    pub fn alternating(m: usize) -> Self {
        EpsilonMap {
            signs: (0..2 * m)
                .map(|i| if i % 2 == 0 { Eps::Plain } else { Eps::Star })
                .collect(),
        }
    }

    /// Builds from an explicit slice.
    pub fn from_slice(signs: &[Eps]) -> Self {
        EpsilonMap {
            signs: signs.to_vec(),
        }
    }

    /// Word length.
    pub fn len(&self) -> usize {
        self.signs.len()
    }

    /// Whether the word is empty.
    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// Decoration at the 1-based position `s`.
    pub fn at(&self, s: usize) -> Eps {
        assert!(s >= 1 && s <= self.signs.len());
        self.signs[s - 1]
    }

    /// Number of plain positions.
    pub fn count_plain(&self) -> usize {
        self.signs.iter().filter(|&&e| e == Eps::Plain).count()
    }

    /// Precomposition with a permutation of positions: the result decorates
    /// position `s` with the decoration of `phi(s)`.
    pub fn precompose(&self, phi: &Permutation) -> EpsilonMap {
        assert_eq!(phi.n(), self.signs.len());
        EpsilonMap {
            signs: (1..=self.signs.len())
                .map(|s| self.signs[phi.apply(s) - 1])
                .collect(),
        }
    }
}

/// All perfect matchings of `{1, ..., 2m}` in deterministic order (the
/// smallest unmatched point is paired with each larger point in increasing
/// order, recursively). Errors above [`MAX_PAIRING_HALF_SIZE`].
pub fn enumerate_pairings(m: usize) -> Result<Vec<PairPartition>> {
    if m > MAX_PAIRING_HALF_SIZE {
        return Err(Error::ResourceLimit(format!(
            "enumerate_pairings: m = {m} exceeds cap {MAX_PAIRING_HALF_SIZE} ((2m-1)!! growth)"
        )));
    }
    let mut out = Vec::new();
    let mut partner = vec![usize::MAX; 2 * m];
    fill_pairings(&mut partner, &mut out, None);
    Ok(out)
}

/// All matchings of `{1, ..., len(eps)}` that only pair a plain position with
/// a starred one. Returns an empty list when the counts are unbalanced.
pub fn enumerate_eps_pairings(eps: &EpsilonMap) -> Result<Vec<PairPartition>> {
    let n = eps.len();
    if n % 2 != 0 {
        return Err(Error::invalid(format!("ε-word of odd length {n}")));
    }
    let m = n / 2;
    if m > MAX_PAIRING_HALF_SIZE {
        return Err(Error::ResourceLimit(format!(
            "enumerate_eps_pairings: m = {m} exceeds cap {MAX_PAIRING_HALF_SIZE}"
        )));
    }
    if eps.count_plain() != m {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut partner = vec![usize::MAX; n];
    fill_pairings(&mut partner, &mut out, Some(eps));
    Ok(out)
}

/// Backtracking core shared by the two enumerations: pair the smallest open
/// point with every admissible larger open point.
fn fill_pairings(
    partner: &mut Vec<usize>,
    out: &mut Vec<PairPartition>,
    eps: Option<&EpsilonMap>,
) {
    let first = match partner.iter().position(|&p| p == usize::MAX) {
        None => {
            out.push(PairPartition {
                partner: partner.clone(),
            });
            return;
        }
        Some(i) => i,
    };
    for second in first + 1..partner.len() {
        if partner[second] != usize::MAX {
            continue;
        }
        if let Some(eps) = eps {
            if eps.at(first + 1) == eps.at(second + 1) {
                continue;
            }
        }
        partner[first] = second;
        partner[second] = first;
        fill_pairings(partner, out, eps);
        partner[first] = usize::MAX;
        partner[second] = usize::MAX;
    }
}

/// For a matching `q` of `{1, ..., 2m}` that pairs every even point with an
/// odd point, the map sending `s` to `(q(2s) + 1) / 2` is a permutation of
/// `{1, ..., m}`; returns it, or an error when some even point has an even
/// partner.
pub fn induced_permutation(q: &PairPartition) -> Result<Permutation> {
    let m = q.m();
    let mut images = Vec::with_capacity(m);
    for s in 1..=m {
        let t = q.partner(2 * s);
        if t % 2 == 0 {
            return Err(Error::invalid(format!(
                "matching pairs even point {} with even point {t}; no induced permutation",
                2 * s
            )));
        }
        images.push((t + 1) / 2);
    }
    Permutation::from_one_based_images(&images)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Double factorial `(2m-1)!!`, the number of matchings of `2m` points.
    fn double_factorial_odd(m: usize) -> usize {
        (0..m).map(|k| 2 * k + 1).product::<usize>().max(1)
    }

    /// Factorial, the number of ε-respecting matchings for alternating ε.
    fn factorial(m: usize) -> usize {
        (1..=m).product::<usize>().max(1)
    }

    #[test]
    fn pairing_counts_match_double_factorials() {
        for m in 0..=5 {
            let all = enumerate_pairings(m).unwrap();
            assert_eq!(all.len(), double_factorial_odd(m), "m = {m}");
            // No duplicates.
            let mut sorted = all.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), all.len());
        }
        assert_eq!(enumerate_pairings(1).unwrap().len(), 1);
        assert_eq!(enumerate_pairings(2).unwrap().len(), 3);
        assert_eq!(enumerate_pairings(3).unwrap().len(), 15);
    }

    #[test]
    fn pairing_cap_is_enforced() {
        assert!(matches!(
            enumerate_pairings(MAX_PAIRING_HALF_SIZE + 1),
            Err(crate::Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn eps_pairing_counts_are_factorials() {
        for m in 1..=5 {
            let eps = EpsilonMap::alternating(m);
            let all = enumerate_eps_pairings(&eps).unwrap();
            assert_eq!(all.len(), factorial(m), "m = {m}");
            for p in &all {
                for (a, b) in p.pairs() {
                    assert_ne!(eps.at(a), eps.at(b), "pair within one ε-class");
                }
            }
        }
    }

    #[test]
    fn unbalanced_eps_has_no_pairings() {
        let eps = EpsilonMap::from_slice(&[Eps::Plain, Eps::Plain]);
        assert!(enumerate_eps_pairings(&eps).unwrap().is_empty());
    }

    #[test]
    fn enumeration_order_is_lexicographic_in_partner_of_smallest() {
        let all = enumerate_pairings(2).unwrap();
        let as_pairs: Vec<_> = all.iter().map(|p| p.pairs()).collect();
        assert_eq!(
            as_pairs,
            vec![
                vec![(1, 2), (3, 4)],
                vec![(1, 3), (2, 4)],
                vec![(1, 4), (2, 3)],
            ]
        );
    }

    #[test]
    fn conjugation_relabels_pairs() {
        let p = PairPartition::from_pairs(4, &[(1, 2), (3, 4)]).unwrap();
        let phi = Permutation::from_cycles(4, &[vec![1, 3]]).unwrap();
        let q = p.conjugate_by(&phi);
        assert_eq!(q.pairs(), vec![(1, 4), (2, 3)]);
        // Conjugating twice by an involution restores the original.
        assert_eq!(q.conjugate_by(&phi), p);
    }

    #[test]
    fn induced_permutation_of_odd_even_matchings() {
        // q = {(1,2),(3,4)}: q(2) = 1, q(4) = 3 → s ↦ s.
        let q = PairPartition::from_pairs(4, &[(1, 2), (3, 4)]).unwrap();
        assert!(induced_permutation(&q).unwrap().is_identity());
        // q = {(1,4),(2,3)}: q(2) = 3 → 1 ↦ 2; q(4) = 1 → 2 ↦ 1.
        let q = PairPartition::from_pairs(4, &[(1, 4), (2, 3)]).unwrap();
        let perm = induced_permutation(&q).unwrap();
        assert_eq!(perm.one_based_images(), vec![2, 1]);
        // A matching pairing evens together has no induced permutation.
        let q = PairPartition::from_pairs(4, &[(2, 4), (1, 3)]).unwrap();
        assert!(induced_permutation(&q).is_err());
    }

    #[test]
    fn precompose_eps_reads_through_permutation() {
        let eps = EpsilonMap::alternating(2); // (plain, star, plain, star)
        let swap_all = hat_all_minus(2);
        let eps2 = eps.precompose(&swap_all);
        assert_eq!(eps2.at(1), Eps::Star);
        assert_eq!(eps2.at(2), Eps::Plain);
        assert_eq!(eps2.at(3), Eps::Star);
        assert_eq!(eps2.at(4), Eps::Plain);
    }

    fn hat_all_minus(m: usize) -> Permutation {
        use super::super::perm::{hat_map, Sign};
        hat_map(&vec![Sign::Minus; m])
    }
}
