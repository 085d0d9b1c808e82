//! Permutations of `{1, ..., n}` and sign-pair words.
//!
//! Public indices are 1-based throughout (matching the combinatorial
//! conventions used by the rest of the crate); storage is 0-based.

use crate::error::{Error, Result};
use std::fmt;

/// A permutation of `{1, ..., n}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    /// `images[i]` is the 0-based image of the 0-based point `i`.
    images: Vec<usize>,
}

impl Permutation {
    /// The identity permutation on `{1, ..., n}`.
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from 1-based images: `images[k]` is the image of
    /// `k + 1`. Rejects non-bijections.
    pub fn from_one_based_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut store = Vec::with_capacity(n);
        for &im in images {
            if im == 0 || im > n {
                return Err(Error::invalid(format!(
                    "permutation image {im} out of range 1..={n}"
                )));
            }
            if seen[im - 1] {
                return Err(Error::invalid(format!(
                    "permutation image {im} repeated; not a bijection"
                )));
            }
            seen[im - 1] = true;
            store.push(im - 1);
        }
        Ok(Permutation { images: store })
    }

    /// Builds a permutation on `{1, ..., n}` from disjoint cycles written with
    /// 1-based entries; points not mentioned are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for window in 0..cycle.len() {
                let a = cycle[window];
                let b = cycle[(window + 1) % cycle.len()];
                if a == 0 || a > n || b == 0 || b > n {
                    return Err(Error::invalid(format!(
                        "cycle entry out of range 1..={n}: ({a} {b})"
                    )));
                }
                if touched[a - 1] {
                    return Err(Error::invalid(format!("point {a} appears in two cycles")));
                }
                touched[a - 1] = true;
                images[a - 1] = b - 1;
            }
        }
        // Re-validate bijectivity (overlapping cycles could break it).
        let mut seen = vec![false; n];
        for &im in &images {
            if seen[im] {
                return Err(Error::invalid("cycles overlap; not a permutation"));
            }
            seen[im] = true;
        }
        Ok(Permutation { images })
    }

    /// The transposition `(a b)` on `{1, ..., n}` (identity if `a == b`).
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a == 0 || a > n || b == 0 || b > n {
            return Err(Error::invalid(format!(
                "transposition entries ({a} {b}) out of range 1..={n}"
            )));
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a - 1, b - 1);
        Ok(Permutation { images })
    }

    /// Degree `n`.
    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-based point `x`.
    pub fn apply(&self, x: usize) -> usize {
        assert!(
            x >= 1 && x <= self.images.len(),
            "point {x} out of range 1..={}",
            self.images.len()
        );
        self.images[x - 1] + 1
    }

    /// Composition `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n(), other.n(), "composing permutations of unequal degree");
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    /// The inverse permutation.
    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &im) in self.images.iter().enumerate() {
            inv[im] = i;
        }
        Permutation { images: inv }
    }

    /// Cycle decomposition with 1-based entries. Each cycle starts at its
    /// smallest point; cycles are ordered by smallest point. Fixed points are
    /// included as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cycle.push(cur + 1);
                cur = self.images[cur];
            }
            out.push(cycle);
        }
        out
    }

    /// Multiset of cycle lengths, sorted in decreasing order. Sums to `n`.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    /// Number of cycles, fixed points included.
    pub fn num_cycles(&self) -> usize {
        self.cycles().len()
    }

    /// Whether this is the identity.
    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &im)| i == im)
    }

    /// 1-based images as a vector (`result[k]` is the image of `k + 1`).
    pub fn one_based_images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i + 1).collect()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[")?;
        for (k, cycle) in self.cycles().iter().enumerate() {
            if cycle.len() == 1 {
                continue;
            }
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "(")?;
            for (i, p) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "]")
    }
}

/// A sign in `{+1, -1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Numeric value `+1` or `-1`.
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// Sign product.
    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// A pair of signs `(theta, eta)` attached to one letter of a word; the four
/// values index the four row/column flip symbols on a tensor-product space.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SignPair {
    pub theta: Sign,
    pub eta: Sign,
}

impl SignPair {
    pub fn new(theta: Sign, eta: Sign) -> Self {
        SignPair { theta, eta }
    }
}

/// Doubling embedding of a sign word: for a word of `m` signs, returns the
/// involution of `{1, ..., 2m}` that swaps `2s-1 ↔ 2s` exactly when the
/// `s`-th sign is minus and fixes both points otherwise.
pub fn hat_map(signs: &[Sign]) -> Permutation {
    let m = signs.len();
    let mut images: Vec<usize> = (0..2 * m).collect();
    for (s, sign) in signs.iter().enumerate() {
        if *sign == Sign::Minus {
            images.swap(2 * s, 2 * s + 1);
        }
    }
    Permutation { images }
}
