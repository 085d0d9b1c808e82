//! Exact diagrammatic weights for flip-symbol words.
//!
//! For a word of `m` letters, each letter a Haar-conjugated factor on a
//! bipartite space `C^b (x) C^d` carrying one of the four flip symbols, the
//! expectation of the normalized word trace expands over pairs `(p, q)` of
//! star-respecting pair partitions of the `2m` unitary-entry positions. Each
//! pair contributes an exactly computable weight built from a Weingarten
//! value at combined dimension `M = b*d`, a count of closed inner-contraction
//! loops, and independent leg-component counts on the `b` and `d` factors.
//! Summing the weights over all `(p, q)` recovers the exact word trace.
//!
//! The module also provides the single-leg reduction (weights of words of
//! plain/transposed unitary entries on one factor), the factorization of a
//! bipartite weight into its two leg reductions, a structural classifier that
//! decides from `(symbols, p, q)` alone whether the weight survives the large
//! dimension limit, and a numeric leading-order fit used to cross-check the
//! structural exponent from exact values on a dimension grid.

use crate::error::{Error, Result};
use crate::partition::{
    enumerate_eps_pairings, hat_map, join_pairings, Eps, EpsilonMap, PairPartition, Sign,
    UnionFind,
};
use crate::weingarten::{leading_coefficient, wg_at, wg_of_pairings, CycleType};
use crate::word::Symbol;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

/// The two tensor factors of the bipartite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leg {
    /// First factor, dimension `b`.
    Left,
    /// Second factor, dimension `d`.
    Right,
}

/// Per-letter flip sign on one leg.
pub fn leg_signs(symbols: &[Symbol], leg: Leg) -> Vec<Sign> {
    symbols
        .iter()
        .map(|s| {
            let pair = s.signs();
            match leg {
                Leg::Left => pair.theta,
                Leg::Right => pair.eta,
            }
        })
        .collect()
}

/// Per-position transpose signs of the single-leg reduction of a word: each
/// letter occupies two adjacent positions, both inheriting its leg sign.
pub fn leg_position_signs(symbols: &[Symbol], leg: Leg) -> Vec<Sign> {
    leg_signs(symbols, leg)
        .into_iter()
        .flat_map(|s| [s, s])
        .collect()
}

/// Single-leg reduction of a bipartite `(p, q)` term: the word of
/// plain/transposed entries seen by one leg, with its star map and pairings
/// rewritten in that leg's position coordinates.
///
/// A letter whose leg sign is minus is transposed on that leg, which reverses
/// the order of its two factors: the conjugated factor comes first. Hence the
/// star map precomposes with the sign's position swap and both pairings
/// conjugate by it.
#[derive(Clone, Debug)]
pub struct LegReduction {
    pub sigma: Vec<Sign>,
    pub eps: Vec<Eps>,
    pub p: PairPartition,
    pub q: PairPartition,
}

/// Builds the [`LegReduction`] of a word on the chosen leg.
pub fn leg_reduction(
    symbols: &[Symbol],
    p: &PairPartition,
    q: &PairPartition,
    leg: Leg,
) -> Result<LegReduction> {
    let m = symbols.len();
    validate_word_pairings(m, p, q)?;
    let hat = hat_map(&leg_signs(symbols, leg));
    let eps_map = EpsilonMap::alternating(m).precompose(&hat);
    let eps: Vec<Eps> = (1..=2 * m).map(|s| eps_map.at(s)).collect();
    Ok(LegReduction {
        sigma: leg_position_signs(symbols, leg),
        eps,
        p: p.conjugate_by(&hat),
        q: q.conjugate_by(&hat),
    })
}

/// Matching `{(2,3), (4,5), ..., (n,1)}`: positions sharing a boundary
/// variable of the word trace.
fn boundary_matching(n: usize) -> PairPartition {
    let mut pairs: Vec<(usize, usize)> = (1..n / 2).map(|s| (2 * s, 2 * s + 1)).collect();
    pairs.push((n, 1));
    PairPartition::from_pairs(n, &pairs).expect("valid by construction")
}

/// Matching `{(1,2), (3,4), ...}`: the two positions contributed by each
/// letter.
fn letter_matching(n: usize) -> PairPartition {
    let pairs: Vec<(usize, usize)> = (1..=n / 2).map(|s| (2 * s - 1, 2 * s)).collect();
    PairPartition::from_pairs(n, &pairs).expect("valid by construction")
}

fn validate_word_pairings(m: usize, p: &PairPartition, q: &PairPartition) -> Result<()> {
    let n = 2 * m;
    if m == 0 {
        return Err(Error::invalid("empty symbol word"));
    }
    if p.n() != n || q.n() != n {
        return Err(Error::invalid(format!(
            "pairings must live on {n} positions, got {} and {}",
            p.n(),
            q.n()
        )));
    }
    for pairing in [p, q] {
        for (x, y) in pairing.pairs() {
            if x % 2 == y % 2 {
                return Err(Error::invalid(format!(
                    "pair ({x},{y}) joins two positions of the same star class"
                )));
            }
        }
    }
    Ok(())
}

/// The exact structural data of one `(p, q)` term: everything needed to
/// evaluate the weight at any `(b, d)` and to read off its leading order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramWeight {
    /// Cycle type fed to the Weingarten function (join blocks of size `2s`
    /// become cycles of length `s`).
    pub wg_type: CycleType,
    /// Closed loops of the inner contraction pattern.
    pub x_loops: usize,
    /// Merged variable count on the first leg.
    pub left_components: usize,
    /// Merged variable count on the second leg.
    pub right_components: usize,
    m: usize,
}

impl DiagramWeight {
    /// Builds the weight data for one `(p, q)` term of a flip-symbol word.
    pub fn compute(symbols: &[Symbol], p: &PairPartition, q: &PairPartition) -> Result<Self> {
        let m = symbols.len();
        validate_word_pairings(m, p, q)?;
        let n = 2 * m;
        let wg_type = CycleType::from_join(p, q)?;
        let x_loops = join_pairings(q, &letter_matching(n)).num_blocks();
        let theta_hat = hat_map(&leg_signs(symbols, Leg::Left));
        let eta_hat = hat_map(&leg_signs(symbols, Leg::Right));
        let boundary = boundary_matching(n);
        let left_components = join_pairings(&p.conjugate_by(&theta_hat), &boundary).num_blocks();
        let right_components = join_pairings(&p.conjugate_by(&eta_hat), &boundary).num_blocks();
        Ok(DiagramWeight {
            wg_type,
            x_loops,
            left_components,
            right_components,
            m,
        })
    }

    /// Exact value of the weight at leg dimensions `(b, d)`.
    pub fn evaluate(&self, b: &BigInt, d: &BigInt) -> Result<BigRational> {
        if !b.is_positive() || !d.is_positive() {
            return Err(Error::invalid("leg dimensions must be positive"));
        }
        let m_dim = b * d;
        let wg = wg_at(&self.wg_type, &m_dim)?;
        debug_assert!(self.x_loops >= 1);
        let scale = m_dim.pow((self.x_loops - 1) as u32)
            * b.pow(self.left_components as u32)
            * d.pow(self.right_components as u32);
        Ok(wg * BigRational::from_integer(scale))
    }

    /// Exact exponent of the weight in powers of `b` when `b = d` (so the
    /// combined dimension scales as `b^2`).
    pub fn exponent(&self) -> i64 {
        self.left_exponent() + self.right_exponent()
    }

    /// Exponent of the first-leg reduction in powers of its dimension.
    pub fn left_exponent(&self) -> i64 {
        self.side_exponent(self.left_components)
    }

    /// Exponent of the second-leg reduction in powers of its dimension.
    pub fn right_exponent(&self) -> i64 {
        self.side_exponent(self.right_components)
    }

    fn side_exponent(&self, components: usize) -> i64 {
        -1 - 2 * self.m as i64
            + self.wg_type.num_cycles() as i64
            + components as i64
            + self.x_loops as i64
    }

    /// Signed coefficient of the leading term (a product of signed Catalan
    /// numbers determined by the join cycle type).
    pub fn coefficient(&self) -> BigInt {
        leading_coefficient(&self.wg_type)
    }
}

/// Exact weight of one `(p, q)` term at leg dimensions `(b, d)`.
pub fn w_exact(
    symbols: &[Symbol],
    p: &PairPartition,
    q: &PairPartition,
    b: &BigInt,
    d: &BigInt,
) -> Result<BigRational> {
    DiagramWeight::compute(symbols, p, q)?.evaluate(b, d)
}

fn validate_leg_word(
    sigma: &[Sign],
    eps: &[Eps],
    p: &PairPartition,
    q: &PairPartition,
) -> Result<()> {
    let n = sigma.len();
    if n == 0 || n % 2 != 0 {
        return Err(Error::invalid("single-leg words need a positive even length"));
    }
    if eps.len() != n || p.n() != n || q.n() != n {
        return Err(Error::invalid(
            "sign map, star map, and pairings must share one length",
        ));
    }
    for pairing in [p, q] {
        for (x, y) in pairing.pairs() {
            if eps[x - 1] == eps[y - 1] {
                return Err(Error::invalid(format!(
                    "pair ({x},{y}) joins two positions of the same star class"
                )));
            }
        }
    }
    Ok(())
}

/// Number of merged index variables in the single-leg weight: the trace ties
/// adjacent positions, the row pairing ties row variables, and the column
/// pairing ties column variables, where a position's row/column roles swap
/// exactly when its star and transpose markers disagree.
pub fn v_component_count(
    sigma: &[Sign],
    eps: &[Eps],
    p: &PairPartition,
    q: &PairPartition,
) -> Result<usize> {
    validate_leg_word(sigma, eps, p, q)?;
    let n = sigma.len();
    // Variables 0..n are the nominal row indices, n..2n the column indices.
    let row = |s: usize| s - 1;
    let col = |s: usize| n + s - 1;
    let swapped: Vec<bool> = (1..=n)
        .map(|s| (eps[s - 1] == Eps::Star) != (sigma[s - 1] == Sign::Minus))
        .collect();
    let mut uf = UnionFind::new(2 * n);
    for s in 1..=n {
        let next = s % n + 1;
        uf.union(col(s), row(next));
    }
    for (x, y) in p.pairs() {
        let kx = if swapped[x - 1] { col(x) } else { row(x) };
        let ky = if swapped[y - 1] { col(y) } else { row(y) };
        uf.union(kx, ky);
    }
    for (x, y) in q.pairs() {
        let lx = if swapped[x - 1] { row(x) } else { col(x) };
        let ly = if swapped[y - 1] { row(y) } else { col(y) };
        uf.union(lx, ly);
    }
    Ok(uf.component_count())
}

/// Exact single-leg weight: the `(p, q)` term of the normalized trace of a
/// word of plain/transposed unitary entries at dimension `dim`.
pub fn v_exact(
    sigma: &[Sign],
    eps: &[Eps],
    dim: &BigInt,
    p: &PairPartition,
    q: &PairPartition,
) -> Result<BigRational> {
    if !dim.is_positive() {
        return Err(Error::invalid("dimension must be positive"));
    }
    let c = v_component_count(sigma, eps, p, q)?;
    let wg = wg_of_pairings(p, q, dim)?;
    debug_assert!(c >= 1);
    Ok(wg * BigRational::from_integer(dim.pow((c - 1) as u32)))
}

/// One row of a factorization comparison at square dimensions `b = d`.
#[derive(Clone, Debug)]
pub struct FactorizationRow {
    pub b: u64,
    /// Exact bipartite weight at `(b, b)`.
    pub exact: BigRational,
    /// Product of the two single-leg weights divided by the leading
    /// coefficient of the join cycle type.
    pub factored: BigRational,
    /// `|exact / factored - 1|`.
    pub relative_gap: f64,
}

/// Compares the bipartite weight against the product of its two single-leg
/// reductions (normalized by the leading coefficient) on a grid of square
/// dimensions. The gap shrinks at second order in the dimension.
pub fn factorization_check(
    symbols: &[Symbol],
    p: &PairPartition,
    q: &PairPartition,
    b_values: &[u64],
) -> Result<Vec<FactorizationRow>> {
    let weight = DiagramWeight::compute(symbols, p, q)?;
    let coeff = weight.coefficient();
    let left = leg_reduction(symbols, p, q, Leg::Left)?;
    let right = leg_reduction(symbols, p, q, Leg::Right)?;
    let mut rows = Vec::with_capacity(b_values.len());
    for &b in b_values {
        let dim = BigInt::from(b);
        let exact = weight.evaluate(&dim, &dim)?;
        let v_left = v_exact(&left.sigma, &left.eps, &dim, &left.p, &left.q)?;
        let v_right = v_exact(&right.sigma, &right.eps, &dim, &right.p, &right.q)?;
        let factored = v_left * v_right / BigRational::from_integer(coeff.clone());
        if factored == BigRational::from_integer(BigInt::from(0)) {
            return Err(Error::invalid("factored weight vanished exactly"));
        }
        let ratio = (&exact / &factored - BigRational::one())
            .to_f64()
            .ok_or_else(|| Error::invalid("ratio does not fit f64"))?;
        rows.push(FactorizationRow {
            b,
            exact,
            factored,
            relative_gap: ratio.abs(),
        });
    }
    Ok(rows)
}

/// Structural cause for a `(p, q)` term to vanish in the large dimension
/// limit, reported by [`classify`]. Causes are checked in declaration order
/// and the first failure is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VanishingReason {
    /// First-leg flip signs differ between letters of one join block.
    LeftSignsVary,
    /// Second-leg flip signs differ between letters of one join block.
    RightSignsVary,
    /// The join conjugated to first-leg coordinates has crossing blocks.
    LeftJoinCrossing,
    /// The join conjugated to second-leg coordinates has crossing blocks.
    RightJoinCrossing,
    /// In first-leg coordinates some position is not paired to its two
    /// cyclic neighbors within its join block.
    LeftNeighborBroken,
    /// Same failure in second-leg coordinates.
    RightNeighborBroken,
    /// In first-leg coordinates some position's forward edge (column pairing
    /// at odd positions, row pairing at even ones) skips its cyclic
    /// successor, running against the trace orientation.
    LeftPhaseMisaligned,
    /// Same failure in second-leg coordinates.
    RightPhaseMisaligned,
}

impl std::fmt::Display for VanishingReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let text = match self {
            VanishingReason::LeftSignsVary => "left-leg flip signs vary within a join block",
            VanishingReason::RightSignsVary => "right-leg flip signs vary within a join block",
            VanishingReason::LeftJoinCrossing => "left-conjugated join is crossing",
            VanishingReason::RightJoinCrossing => "right-conjugated join is crossing",
            VanishingReason::LeftNeighborBroken => {
                "left-conjugated pairings break cyclic neighbor alternation"
            }
            VanishingReason::RightNeighborBroken => {
                "right-conjugated pairings break cyclic neighbor alternation"
            }
            VanishingReason::LeftPhaseMisaligned => {
                "left-conjugated pairing phase runs against the trace orientation"
            }
            VanishingReason::RightPhaseMisaligned => {
                "right-conjugated pairing phase runs against the trace orientation"
            }
        };
        f.write_str(text)
    }
}

/// Verdict of the structural classifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub survives: bool,
    pub reason: Option<VanishingReason>,
}

/// Decides from `(symbols, p, q)` alone whether the weight keeps a nonzero
/// large-dimension limit (exponent zero) or vanishes (exponent at most -1 in
/// powers of the leg dimension). The checks are exact: the verdict matches
/// the sign of [`DiagramWeight::exponent`] for every input.
pub fn classify(
    symbols: &[Symbol],
    p: &PairPartition,
    q: &PairPartition,
) -> Result<Classification> {
    let m = symbols.len();
    validate_word_pairings(m, p, q)?;
    let n = 2 * m;
    let join = join_pairings(p, q);

    // Flip signs must be constant on the letters of each join block.
    for leg in [Leg::Left, Leg::Right] {
        let signs = leg_signs(symbols, leg);
        for block in join.blocks() {
            let first = signs[(block[0] + 1) / 2 - 1];
            if block.iter().any(|&k| signs[(k + 1) / 2 - 1] != first) {
                return Ok(Classification {
                    survives: false,
                    reason: Some(match leg {
                        Leg::Left => VanishingReason::LeftSignsVary,
                        Leg::Right => VanishingReason::RightSignsVary,
                    }),
                });
            }
        }
    }

    // Remaining checks run on each leg's conjugated coordinates.
    for leg in [Leg::Left, Leg::Right] {
        let hat = hat_map(&leg_signs(symbols, leg));
        let p_side = p.conjugate_by(&hat);
        let q_side = q.conjugate_by(&hat);
        let side_join = join_pairings(&p_side, &q_side);
        if !side_join.is_noncrossing() {
            return Ok(Classification {
                survives: false,
                reason: Some(match leg {
                    Leg::Left => VanishingReason::LeftJoinCrossing,
                    Leg::Right => VanishingReason::RightJoinCrossing,
                }),
            });
        }
        for block in side_join.blocks() {
            let len = block.len();
            for (idx, &a) in block.iter().enumerate() {
                let prev = block[(idx + len - 1) % len];
                let next = block[(idx + 1) % len];
                let mut partners = [p_side.partner(a), q_side.partner(a)];
                partners.sort_unstable();
                let mut neighbors = [prev, next];
                neighbors.sort_unstable();
                if partners != neighbors {
                    return Ok(Classification {
                        survives: false,
                        reason: Some(match leg {
                            Leg::Left => VanishingReason::LeftNeighborBroken,
                            Leg::Right => VanishingReason::RightNeighborBroken,
                        }),
                    });
                }
            }
        }
        // Phase: each position's forward edge must reach its cyclic
        // successor in the block. In conjugated coordinates the forward edge
        // of an odd position belongs to the column pairing and that of an
        // even position to the row pairing.
        for block in side_join.blocks() {
            let len = block.len();
            for (idx, &a) in block.iter().enumerate() {
                let next = block[(idx + 1) % len];
                let forward = if a % 2 == 0 {
                    p_side.partner(a)
                } else {
                    q_side.partner(a)
                };
                if forward != next {
                    return Ok(Classification {
                        survives: false,
                        reason: Some(match leg {
                            Leg::Left => VanishingReason::LeftPhaseMisaligned,
                            Leg::Right => VanishingReason::RightPhaseMisaligned,
                        }),
                    });
                }
            }
        }
        let _ = n;
    }

    Ok(Classification {
        survives: true,
        reason: None,
    })
}

/// Exact weights on a dimension grid together with a fitted leading order.
#[derive(Clone, Debug)]
pub struct LeadingOrderFit {
    /// Integer exponent fitted from the last two grid values.
    pub exponent: i64,
    /// Estimated coefficient `value / b^exponent` at the largest dimension.
    pub coefficient: f64,
    /// `(b, exact value)` samples.
    pub samples: Vec<(u64, f64)>,
}

/// Fits the leading order of a weight from exact values on an increasing
/// grid of square dimensions `b = d`.
pub fn leading_order(
    symbols: &[Symbol],
    p: &PairPartition,
    q: &PairPartition,
    b_values: &[u64],
) -> Result<LeadingOrderFit> {
    if b_values.len() < 2 || b_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "need at least two strictly increasing dimensions",
        ));
    }
    let weight = DiagramWeight::compute(symbols, p, q)?;
    let mut samples = Vec::with_capacity(b_values.len());
    for &b in b_values {
        let dim = BigInt::from(b);
        let value = weight
            .evaluate(&dim, &dim)?
            .to_f64()
            .ok_or_else(|| Error::invalid("weight does not fit f64"))?;
        if value == 0.0 {
            return Err(Error::invalid("cannot fit the order of an exact zero"));
        }
        samples.push((b, value));
    }
    let (b0, v0) = samples[samples.len() - 2];
    let (b1, v1) = samples[samples.len() - 1];
    let slope = (v1.abs().ln() - v0.abs().ln()) / ((b1 as f64).ln() - (b0 as f64).ln());
    let exponent = slope.round() as i64;
    let coefficient = v1 / (b1 as f64).powi(exponent as i32);
    Ok(LeadingOrderFit {
        exponent,
        coefficient,
        samples,
    })
}

/// All `(p, q)` pairs of star-respecting pairings for an `m`-letter word.
pub fn enumerate_diagram_pairs(m: usize) -> Result<Vec<(PairPartition, PairPartition)>> {
    let eps = EpsilonMap::alternating(m);
    let pairings = enumerate_eps_pairings(&eps)?;
    let mut out = Vec::with_capacity(pairings.len() * pairings.len());
    for p in &pairings {
        for q in &pairings {
            out.push((p.clone(), q.clone()));
        }
    }
    Ok(out)
}
