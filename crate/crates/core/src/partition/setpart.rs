//! Set partitions on ordered ground sets: joins of matchings, non-crossing
//! tests, enumeration of several partition families, and the relative
//! non-crossing complement.

use super::pairing::PairPartition;
use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;

/// Enumeration caps. Each family grows superpolynomially; requests above the
/// cap return [`Error::ResourceLimit`] instead of exhausting memory.
pub const MAX_SET_PARTITION_GROUND: usize = 10;
pub const MAX_NC_GROUND: usize = 12;
pub const MAX_NC12_GROUND: usize = 14;

/// A partition of a finite ordered ground set (a sorted set of positive
/// integers) into disjoint non-empty blocks.
///
/// Canonical form: every block is sorted ascending and blocks are ordered by
/// their smallest element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    ground: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Builds a partition from its blocks; the ground set is their union.
    /// Rejects empty or overlapping blocks and entries equal to zero.
    pub fn from_blocks(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut canon: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for mut block in blocks {
            if block.is_empty() {
                return Err(Error::invalid("partition block is empty"));
            }
            block.sort_unstable();
            for &x in &block {
                if x == 0 {
                    return Err(Error::invalid("partition entries must be >= 1"));
                }
                if !seen.insert(x) {
                    return Err(Error::invalid(format!("element {x} appears in two blocks")));
                }
            }
            canon.push(block);
        }
        canon.sort();
        Ok(SetPartition {
            ground: seen.into_iter().collect(),
            blocks: canon,
        })
    }

    /// The empty partition of the empty ground set.
    pub fn empty() -> Self {
        SetPartition {
            ground: Vec::new(),
            blocks: Vec::new(),
        }
    }

    /// Sorted ground set.
    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    /// Number of ground elements.
    pub fn n(&self) -> usize {
        self.ground.len()
    }

    /// The blocks in canonical order.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Size of the largest block (0 for the empty partition).
    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The block containing `x`, if `x` is a ground element.
    pub fn block_containing(&self, x: usize) -> Option<&[usize]> {
        self.blocks
            .iter()
            .find(|b| b.binary_search(&x).is_ok())
            .map(|b| b.as_slice())
    }

    /// Whether the ground set is exactly `{1, ..., n}`.
    pub fn covers_range(&self, n: usize) -> bool {
        self.ground.len() == n && self.ground.iter().copied().eq(1..=n)
    }

    /// Whether the partition is non-crossing with respect to the order of the
    /// ground set: no two blocks `X`, `Y` admit `a < b < c < d` with
    /// `a, c ∈ X` and `b, d ∈ Y`.
    ///
    /// Two disjoint blocks are compatible exactly when one of them lies
    /// entirely inside a single gap of the other; that is what is checked,
    /// for every unordered block pair.
    pub fn is_noncrossing(&self) -> bool {
        for i in 0..self.blocks.len() {
            for j in i + 1..self.blocks.len() {
                let x = &self.blocks[i];
                let y = &self.blocks[j];
                if !nested_or_disjoint(x, y) && !nested_or_disjoint(y, x) {
                    return false;
                }
            }
        }
        true
    }
}

/// Whether every element of `y` falls in the same gap of the sorted block `x`
/// (strictly between the same two consecutive elements of `x`, before all of
/// `x`, or after all of `x`).
fn nested_or_disjoint(x: &[usize], y: &[usize]) -> bool {
    let gap_index = |v: usize| x.partition_point(|&e| e < v);
    let first = gap_index(y[0]);
    y.iter().all(|&v| gap_index(v) == first)
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_blocks(self, f)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_blocks(self, f)
    }
}

/// `{(1,2),(3,4,5)}`-style rendering shared by `Debug` and `Display`.
fn fmt_blocks(p: &SetPartition, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{{")?;
    for (k, block) in p.blocks.iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        write!(f, "(")?;
        for (i, x) in block.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")?;
    }
    write!(f, "}}")
}

/// Disjoint-set forest over `{0, ..., n-1}` with path compression; used for
/// joins, relative complements, and constraint-graph component counts.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // Attach the larger root under the smaller so roots are canonical
            // minima; depth stays logarithmic thanks to path compression.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Number of distinct components.
    pub fn component_count(&mut self) -> usize {
        (0..self.parent.len()).map(|i| self.find(i)).collect::<BTreeSet<_>>().len()
    }

    /// Components as sorted 0-based classes, ordered by smallest member.
    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let r = self.find(i);
            by_root.entry(r).or_default().push(i);
        }
        by_root.into_values().collect()
    }
}

/// Join (coarsest common refinement-upper-bound) of two matchings on the same
/// ground set `{1, ..., 2m}`: the orbits of the group generated by the two
/// involutions. Every orbit alternates `p`- and `q`-edges, so all block sizes
/// are even.
pub fn join_pairings(p: &PairPartition, q: &PairPartition) -> SetPartition {
    assert_eq!(p.n(), q.n(), "joining matchings on different ground sets");
    let n = p.n();
    let mut seen = vec![false; n];
    let mut blocks = Vec::new();
    for start in 1..=n {
        if seen[start - 1] {
            continue;
        }
        let mut block = Vec::new();
        let mut cur = start;
        let mut use_p = true;
        loop {
            if seen[cur - 1] {
                break;
            }
            seen[cur - 1] = true;
            block.push(cur);
            cur = if use_p { p.partner(cur) } else { q.partner(cur) };
            use_p = !use_p;
        }
        blocks.push(block);
    }
    SetPartition::from_blocks(blocks).expect("orbit decomposition is a partition")
}

/// Cycle-length multiset of the join of two matchings of `{1, ..., 2m}`:
/// each join block of size `2s` contributes a part `s`. Sorted decreasing;
/// the parts sum to `m`.
pub fn cycle_structure_of_join(p: &PairPartition, q: &PairPartition) -> Vec<usize> {
    let join = join_pairings(p, q);
    let mut parts: Vec<usize> = join
        .blocks()
        .iter()
        .map(|b| {
            debug_assert!(b.len() % 2 == 0, "join blocks of matchings have even size");
            b.len() / 2
        })
        .collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}

/// All set partitions of `{1, ..., n}` in restricted-growth-string order.
pub fn enumerate_set_partitions(n: usize) -> Result<Vec<SetPartition>> {
    if n > MAX_SET_PARTITION_GROUND {
        return Err(Error::ResourceLimit(format!(
            "enumerate_set_partitions: n = {n} exceeds cap {MAX_SET_PARTITION_GROUND} (Bell growth)"
        )));
    }
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    rgs_rec(n, 0, 0, &mut labels, &mut out);
    Ok(out)
}

fn rgs_rec(n: usize, i: usize, max_label: usize, labels: &mut Vec<usize>, out: &mut Vec<SetPartition>) {
    if i == n {
        let num_blocks = if n == 0 { 0 } else { max_label };
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); num_blocks];
        for (pos, &lab) in labels.iter().enumerate() {
            blocks[lab].push(pos + 1);
        }
        out.push(SetPartition::from_blocks(blocks).expect("labels define a partition"));
        return;
    }
    for lab in 0..=max_label {
        labels[i] = lab;
        rgs_rec(n, i + 1, max_label.max(lab + 1), labels, out);
    }
}

/// All non-crossing partitions of a sorted ground set, in a deterministic
/// order (the block of the smallest element is closed before it is extended;
/// extension points ascend).
pub fn enumerate_noncrossing_on(elems: &[usize]) -> Result<Vec<SetPartition>> {
    check_sorted_ground(elems)?;
    if elems.len() > MAX_NC_GROUND {
        return Err(Error::ResourceLimit(format!(
            "enumerate_noncrossing_on: ground size {} exceeds cap {MAX_NC_GROUND} (Catalan growth)",
            elems.len()
        )));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    nc_rec(elems, &mut current, &mut out, usize::MAX);
    Ok(out)
}

/// Non-crossing partitions of `{1, ..., n}`.
pub fn enumerate_noncrossing(n: usize) -> Result<Vec<SetPartition>> {
    let ground: Vec<usize> = (1..=n).collect();
    enumerate_noncrossing_on(&ground)
}

/// Non-crossing partitions of a sorted ground set with all blocks of size 1
/// or 2.
pub fn enumerate_nc12_on(elems: &[usize]) -> Result<Vec<SetPartition>> {
    check_sorted_ground(elems)?;
    if elems.len() > MAX_NC12_GROUND {
        return Err(Error::ResourceLimit(format!(
            "enumerate_nc12_on: ground size {} exceeds cap {MAX_NC12_GROUND} (Motzkin growth)",
            elems.len()
        )));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    nc_rec(elems, &mut current, &mut out, 2);
    Ok(out)
}

/// Non-crossing partitions of `{1, ..., n}` with blocks of size 1 or 2.
pub fn enumerate_nc12(n: usize) -> Result<Vec<SetPartition>> {
    let ground: Vec<usize> = (1..=n).collect();
    enumerate_nc12_on(&ground)
}

fn check_sorted_ground(elems: &[usize]) -> Result<()> {
    if elems.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("ground set must be strictly increasing"));
    }
    if elems.first() == Some(&0) {
        return Err(Error::invalid("ground elements must be >= 1"));
    }
    Ok(())
}

/// Recursive non-crossing enumeration. The smallest remaining element opens a
/// block; the block is either closed (remaining elements form one segment) or
/// extended by a later element, in which case the skipped gap is partitioned
/// independently. `max_block` bounds block sizes (`usize::MAX` for none).
fn nc_rec(
    elems: &[usize],
    current: &mut Vec<Vec<usize>>,
    out: &mut Vec<SetPartition>,
    max_block: usize,
) {
    if elems.is_empty() {
        out.push(SetPartition::from_blocks(current.clone()).expect("blocks stay disjoint"));
        return;
    }
    let block = vec![elems[0]];
    extend_block(block, &elems[1..], current, out, max_block);
}

/// Continue the open `block` against the segment `rest` as described in
/// [`nc_rec`].
fn extend_block(
    block: Vec<usize>,
    rest: &[usize],
    current: &mut Vec<Vec<usize>>,
    out: &mut Vec<SetPartition>,
    max_block: usize,
) {
    // Close the block: the whole remaining segment is a fresh subproblem.
    current.push(block.clone());
    nc_rec(rest, current, out, max_block);
    current.pop();

    if block.len() >= max_block {
        return;
    }
    // Extend the block by rest[j]; the gap rest[..j] must then be partitioned
    // within itself (anything else would cross the extended block).
    for j in 0..rest.len() {
        let gap = &rest[..j];
        let tail = &rest[j + 1..];
        let mut gap_parts = Vec::new();
        let mut gap_current = Vec::new();
        nc_rec(gap, &mut gap_current, &mut gap_parts, max_block);
        for gp in gap_parts {
            let depth = current.len();
            current.extend(gp.blocks().iter().cloned());
            let mut extended = block.clone();
            extended.push(rest[j]);
            extend_block(extended, tail, current, out, max_block);
            current.truncate(depth);
        }
    }
}

/// All "blown-up" partitions of `{1, ..., 2m}` obtained from a non-crossing
/// partition of `{1, ..., m}` with blocks of size at most 2 by replacing a
/// singleton `{k}` with the 2-block `{2k-1, 2k}` and a pair `{k, t}` with
/// either the 4-block `{2k-1, 2k, 2t-1, 2t}` or the two 2-blocks
/// `{2k-1, 2t}, {2k, 2t-1}`.
///
/// Deterministic order: outer order of the size-≤2 partitions, then for each
/// pair block the 4-block option before the split option.
pub fn enumerate_admissible(m: usize) -> Result<Vec<SetPartition>> {
    let base = enumerate_nc12(m)?;
    let mut out = Vec::new();
    for rho in base {
        let singles: Vec<&Vec<usize>> = rho.blocks().iter().filter(|b| b.len() == 1).collect();
        let pairs: Vec<&Vec<usize>> = rho.blocks().iter().filter(|b| b.len() == 2).collect();
        let choices = 1usize << pairs.len();
        for mask in 0..choices {
            let mut blocks: Vec<Vec<usize>> = Vec::new();
            for b in &singles {
                let k = b[0];
                blocks.push(vec![2 * k - 1, 2 * k]);
            }
            for (idx, b) in pairs.iter().enumerate() {
                let (k, t) = (b[0], b[1]);
                if mask & (1 << idx) == 0 {
                    blocks.push(vec![2 * k - 1, 2 * k, 2 * t - 1, 2 * t]);
                } else {
                    blocks.push(vec![2 * k - 1, 2 * t]);
                    blocks.push(vec![2 * k, 2 * t - 1]);
                }
            }
            out.push(SetPartition::from_blocks(blocks)?);
        }
    }
    Ok(out)
}

/// Collapses an admissible partition of `{1, ..., 2m}` (see
/// [`enumerate_admissible`]) back to its size-≤2 non-crossing partition of
/// `{1, ..., m}`: each block maps to the set of letters `ceil(element / 2)`
/// it touches. Errors when the input is not of the admissible shape.
pub fn collapse_admissible(ap: &SetPartition) -> Result<SetPartition> {
    let n = ap.ground().len();
    if n % 2 != 0 || !ap.covers_range(n) {
        return Err(Error::invalid(
            "admissible partitions live on the full ground set {1, ..., 2m}",
        ));
    }
    let m = n / 2;
    let mut letter_blocks: BTreeSet<Vec<usize>> = BTreeSet::new();
    // Split 2-blocks must come in partner pairs {2k-1, 2t} / {2k, 2t-1}.
    let mut expected_partners: BTreeSet<Vec<usize>> = BTreeSet::new();
    for block in ap.blocks() {
        let letters: Vec<usize> = block
            .iter()
            .map(|&x| x.div_ceil(2))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        match (block.len(), letters.len()) {
            (2, 1) => {
                letter_blocks.insert(letters);
            }
            (4, 2) => {
                let (k, t) = (letters[0], letters[1]);
                if block != &[2 * k - 1, 2 * k, 2 * t - 1, 2 * t] {
                    return Err(Error::invalid(format!(
                        "block {block:?} touches letters {k},{t} but is not their full blow-up"
                    )));
                }
                letter_blocks.insert(letters);
            }
            (2, 2) => {
                let (k, t) = (letters[0], letters[1]);
                if block == &[2 * k - 1, 2 * t] {
                    expected_partners.insert(vec![2 * k, 2 * t - 1]);
                } else if block == &[2 * k, 2 * t - 1] {
                    expected_partners.insert(vec![2 * k - 1, 2 * t]);
                } else {
                    return Err(Error::invalid(format!(
                        "2-block {block:?} is not an odd/even split of letters {k},{t}"
                    )));
                }
                letter_blocks.insert(letters);
            }
            _ => {
                return Err(Error::invalid(format!(
                    "block {block:?} has inadmissible shape (size {} over {} letters)",
                    block.len(),
                    letters.len()
                )));
            }
        }
    }
    for partner in &expected_partners {
        if !ap.blocks().iter().any(|b| b == partner) {
            return Err(Error::invalid(format!(
                "split block without its partner {partner:?}"
            )));
        }
    }
    let collapsed = SetPartition::from_blocks(letter_blocks.into_iter().collect())?;
    if !collapsed.covers_range(m) {
        return Err(Error::invalid("collapsed blocks do not partition the letters"));
    }
    if !collapsed.is_noncrossing() {
        return Err(Error::invalid("collapsed partition crosses"));
    }
    Ok(collapsed)
}

/// The relative non-crossing complement: given a non-crossing partition `rho`
/// of a subset `S ⊆ {1, ..., m}`, returns the coarsest partition `C` of the
/// complement `{1, ..., m} \ S` such that `rho ∪ C` is non-crossing.
///
/// Two complement points `x < y` share a block of `C` exactly when no block
/// of `rho` both meets the open interval `(x, y)` and sticks out of it.
pub fn relative_nc_complement(rho: &SetPartition, m: usize) -> Result<SetPartition> {
    if rho.ground().iter().any(|&x| x > m) {
        return Err(Error::invalid(format!(
            "partition ground exceeds ambient range 1..={m}"
        )));
    }
    if !rho.is_noncrossing() {
        return Err(Error::invalid(
            "relative complement requires a non-crossing partition",
        ));
    }
    let in_s: Vec<bool> = {
        let mut v = vec![false; m + 1];
        for &x in rho.ground() {
            v[x] = true;
        }
        v
    };
    let complement: Vec<usize> = (1..=m).filter(|&x| !in_s[x]).collect();
    let index_of = |x: usize| complement.binary_search(&x).expect("complement element");

    let mut uf = UnionFind::new(complement.len());
    for (i, &x) in complement.iter().enumerate() {
        for &y in complement.iter().skip(i + 1) {
            let blocked = rho.blocks().iter().any(|b| {
                let inside = b.iter().any(|&e| x < e && e < y);
                let outside = b.iter().any(|&e| e < x || e > y);
                inside && outside
            });
            if !blocked {
                uf.union(index_of(x), index_of(y));
            }
        }
    }
    let blocks: Vec<Vec<usize>> = uf
        .classes()
        .into_iter()
        .map(|class| class.into_iter().map(|i| complement[i]).collect())
        .collect();
    SetPartition::from_blocks(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::pairing::enumerate_pairings;

    #[test]
    fn from_blocks_canonicalizes_and_validates() {
        let p = SetPartition::from_blocks(vec![vec![4, 3], vec![1, 5], vec![2]]).unwrap();
        assert_eq!(p.blocks(), &[vec![1, 5], vec![2], vec![3, 4]]);
        assert_eq!(p.ground(), &[1, 2, 3, 4, 5]);
        assert!(SetPartition::from_blocks(vec![vec![1], vec![1, 2]]).is_err());
        assert!(SetPartition::from_blocks(vec![vec![]]).is_err());
    }

    #[test]
    fn join_matches_union_find_oracle() {
        // Oracle: union-find over both matchings' edges.
        for m in 1..=4 {
            let all = enumerate_pairings(m).unwrap();
            for p in &all {
                for q in &all {
                    let fast = join_pairings(p, q);
                    let mut uf = UnionFind::new(2 * m);
                    for (a, b) in p.pairs().into_iter().chain(q.pairs()) {
                        uf.union(a - 1, b - 1);
                    }
                    let blocks: Vec<Vec<usize>> = uf
                        .classes()
                        .into_iter()
                        .map(|c| c.into_iter().map(|i| i + 1).collect())
                        .collect();
                    let oracle = SetPartition::from_blocks(blocks).unwrap();
                    assert_eq!(fast, oracle, "m={m} p={p} q={q}");
                }
            }
        }
    }

    #[test]
    fn join_example() {
        let p = PairPartition::from_pairs(4, &[(1, 2), (3, 4)]).unwrap();
        let q = PairPartition::from_pairs(4, &[(1, 4), (2, 3)]).unwrap();
        let j = join_pairings(&p, &q);
        assert_eq!(j.blocks(), &[vec![1, 2, 3, 4]]);
        assert_eq!(cycle_structure_of_join(&p, &q), vec![2]);
        assert_eq!(cycle_structure_of_join(&p, &p), vec![1, 1]);
    }

    #[test]
    fn noncrossing_detects_the_standard_example() {
        let crossing = SetPartition::from_blocks(vec![vec![1, 3], vec![2, 4]]).unwrap();
        assert!(!crossing.is_noncrossing());
        let nested = SetPartition::from_blocks(vec![vec![1, 4], vec![2, 3]]).unwrap();
        assert!(nested.is_noncrossing());
        let side = SetPartition::from_blocks(vec![vec![1, 2], vec![3, 4]]).unwrap();
        assert!(side.is_noncrossing());
        // Three blocks where only one pair crosses.
        let mixed =
            SetPartition::from_blocks(vec![vec![1, 5], vec![2, 6], vec![3, 4]]).unwrap();
        assert!(!mixed.is_noncrossing());
    }

    /// Brute-force crossing detector: search for a < b < c < d with
    /// block(a) = block(c) ≠ block(b) = block(d).
    fn crossing_by_quadruple_scan(p: &SetPartition) -> bool {
        let ground = p.ground();
        let id_of = |x: usize| {
            p.blocks()
                .iter()
                .position(|b| b.binary_search(&x).is_ok())
                .unwrap()
        };
        for (ai, &a) in ground.iter().enumerate() {
            for (bi, &b) in ground.iter().enumerate().skip(ai + 1) {
                for (ci, &c) in ground.iter().enumerate().skip(bi + 1) {
                    for &d in ground.iter().skip(ci + 1) {
                        if id_of(a) == id_of(c) && id_of(b) == id_of(d) && id_of(a) != id_of(b) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn noncrossing_agrees_with_quadruple_scan() {
        for n in 0..=7 {
            for p in enumerate_set_partitions(n).unwrap() {
                assert_eq!(
                    p.is_noncrossing(),
                    !crossing_by_quadruple_scan(&p),
                    "partition {p}"
                );
            }
        }
    }

    #[test]
    fn family_counts() {
        // Bell numbers.
        let bell = [1usize, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (n, &b) in bell.iter().enumerate() {
            assert_eq!(enumerate_set_partitions(n).unwrap().len(), b, "Bell({n})");
        }
        // Catalan numbers.
        let catalan = [1usize, 1, 2, 5, 14, 42, 132, 429, 1430];
        for (n, &c) in catalan.iter().enumerate() {
            assert_eq!(enumerate_noncrossing(n).unwrap().len(), c, "Catalan({n})");
        }
        // Motzkin numbers.
        let motzkin = [1usize, 1, 2, 4, 9, 21, 51, 127, 323];
        for (n, &mo) in motzkin.iter().enumerate() {
            assert_eq!(enumerate_nc12(n).unwrap().len(), mo, "Motzkin({n})");
        }
    }

    #[test]
    fn noncrossing_enumeration_is_filter_of_all_partitions() {
        for n in 0..=8 {
            let mut by_filter: Vec<SetPartition> = enumerate_set_partitions(n)
                .unwrap()
                .into_iter()
                .filter(SetPartition::is_noncrossing)
                .collect();
            by_filter.sort();
            let mut direct = enumerate_noncrossing(n).unwrap();
            direct.sort();
            assert_eq!(direct, by_filter, "n = {n}");

            let mut nc12_filter: Vec<SetPartition> = by_filter
                .into_iter()
                .filter(|p| p.max_block_size() <= 2)
                .collect();
            nc12_filter.sort();
            let mut nc12 = enumerate_nc12(n).unwrap();
            nc12.sort();
            assert_eq!(nc12, nc12_filter, "n = {n}");
        }
    }

    #[test]
    fn admissible_counts_and_m2_census() {
        let counts = [1usize, 3, 7, 21, 61];
        for (i, &c) in counts.iter().enumerate() {
            let m = i + 1;
            assert_eq!(enumerate_admissible(m).unwrap().len(), c, "m = {m}");
        }
        let mut ap2 = enumerate_admissible(2).unwrap();
        ap2.sort();
        let expect: Vec<SetPartition> = vec![
            SetPartition::from_blocks(vec![vec![1, 2], vec![3, 4]]).unwrap(),
            SetPartition::from_blocks(vec![vec![1, 2, 3, 4]]).unwrap(),
            SetPartition::from_blocks(vec![vec![1, 4], vec![2, 3]]).unwrap(),
        ];
        let mut expect_sorted = expect.clone();
        expect_sorted.sort();
        assert_eq!(ap2, expect_sorted);
    }

    #[test]
    fn admissible_equals_structural_filter() {
        // Independent oracle: filter all partitions of {1, ..., 2m} by shape
        // (blocks of size 2/4 touching ≤ 2 letters, full 4-blocks, split
        // partners present, collapsed partition non-crossing with blocks ≤ 2).
        for m in 1..=4 {
            let mut built = enumerate_admissible(m).unwrap();
            built.sort();
            built.dedup();
            assert_eq!(built.len(), enumerate_admissible(m).unwrap().len(), "duplicates");
            let mut filtered: Vec<SetPartition> = enumerate_set_partitions(2 * m)
                .unwrap()
                .into_iter()
                .filter(|p| collapse_admissible(p).is_ok())
                .collect();
            filtered.sort();
            assert_eq!(built, filtered, "m = {m}");
        }
    }

    #[test]
    fn collapse_examples() {
        let four_block = SetPartition::from_blocks(vec![vec![1, 2, 3, 4]]).unwrap();
        assert_eq!(
            collapse_admissible(&four_block).unwrap(),
            SetPartition::from_blocks(vec![vec![1, 2]]).unwrap()
        );
        let split = SetPartition::from_blocks(vec![vec![1, 4], vec![2, 3]]).unwrap();
        assert_eq!(
            collapse_admissible(&split).unwrap(),
            SetPartition::from_blocks(vec![vec![1, 2]]).unwrap()
        );
        let singles = SetPartition::from_blocks(vec![vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(
            collapse_admissible(&singles).unwrap(),
            SetPartition::from_blocks(vec![vec![1], vec![2]]).unwrap()
        );
        // Crossing split pattern is rejected.
        let bad = SetPartition::from_blocks(vec![vec![1, 3], vec![2, 4]]).unwrap();
        assert!(collapse_admissible(&bad).is_err());
    }

    #[test]
    fn relative_complement_examples() {
        // Ambient {1,...,4}, rho = {(2,3)} on S = {2,3}: complement joins 1,4.
        let rho = SetPartition::from_blocks(vec![vec![2, 3]]).unwrap();
        let c = relative_nc_complement(&rho, 4).unwrap();
        assert_eq!(c, SetPartition::from_blocks(vec![vec![1, 4]]).unwrap());

        // Ambient {1,...,3}, rho = {{2}} on S = {2}: complement joins 1,3.
        let rho = SetPartition::from_blocks(vec![vec![2]]).unwrap();
        let c = relative_nc_complement(&rho, 3).unwrap();
        assert_eq!(c, SetPartition::from_blocks(vec![vec![1, 3]]).unwrap());

        // An arc separates inside from outside: rho = {(1,3)} in ambient 4.
        let rho = SetPartition::from_blocks(vec![vec![1, 3]]).unwrap();
        let c = relative_nc_complement(&rho, 4).unwrap();
        assert_eq!(c, SetPartition::from_blocks(vec![vec![2], vec![4]]).unwrap());

        // Empty rho: the whole ambient set becomes one block.
        let c = relative_nc_complement(&SetPartition::empty(), 4).unwrap();
        assert_eq!(c, SetPartition::from_blocks(vec![vec![1, 2, 3, 4]]).unwrap());
    }

    #[test]
    fn relative_complement_exhaustive_properties() {
        // For every subset S of {1,...,m} and every size-≤2 non-crossing rho
        // on S: the complement C is non-crossing together with rho, and C is
        // coarsest (merging any two C-blocks breaks the property).
        for m in 1..=6usize {
            for mask in 0..(1u32 << m) {
                let s: Vec<usize> = (1..=m).filter(|&x| mask & (1 << (x - 1)) != 0).collect();
                for rho in enumerate_nc12_on(&s).unwrap() {
                    let c = relative_nc_complement(&rho, m).unwrap();
                    let mut all_blocks: Vec<Vec<usize>> =
                        rho.blocks().iter().cloned().collect();
                    all_blocks.extend(c.blocks().iter().cloned());
                    let union = SetPartition::from_blocks(all_blocks).unwrap();
                    assert!(union.is_noncrossing(), "m={m} rho={rho} c={c}");

                    // Coarsest: merging any two complement blocks crosses.
                    let cb = c.blocks();
                    for i in 0..cb.len() {
                        for j in i + 1..cb.len() {
                            let mut merged: Vec<Vec<usize>> =
                                rho.blocks().iter().cloned().collect();
                            let mut big = cb[i].clone();
                            big.extend(cb[j].iter().copied());
                            merged.push(big);
                            for (k, other) in cb.iter().enumerate() {
                                if k != i && k != j {
                                    merged.push(other.clone());
                                }
                            }
                            let coarser = SetPartition::from_blocks(merged).unwrap();
                            assert!(
                                !coarser.is_noncrossing(),
                                "complement not coarsest: m={m} rho={rho} c={c} merge ({i},{j})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_caps_error_cleanly() {
        assert!(matches!(
            enumerate_set_partitions(MAX_SET_PARTITION_GROUND + 1),
            Err(Error::ResourceLimit(_))
        ));
        assert!(matches!(
            enumerate_noncrossing(MAX_NC_GROUND + 1),
            Err(Error::ResourceLimit(_))
        ));
        assert!(matches!(
            enumerate_nc12(MAX_NC12_GROUND + 1),
            Err(Error::ResourceLimit(_))
        ));
    }
}
