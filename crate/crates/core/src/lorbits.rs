//! L-orbits on `𝔤(−1)` for GL(n).
//!
//! `𝔤(−1)` is a direct sum of equioriented type-A quiver spaces, one per
//! maximal run of consecutive boundaries in `S`. An orbit is determined by
//! the ranks of all composite block maps along each run, equivalently by a
//! multisegment.

use serde::{Deserialize, Serialize};

use crate::lie::EntrySpace;
use crate::linalg::IntMatrix;
use crate::rootdata::{GlBlocks, Grading};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LOrbitError {
    #[error("orbit enumeration needs a GL grading")]
    UnsupportedType,
    #[error("orbits come from different gradings")]
    IncomparableGradings,
}

/// Maximal runs of consecutive boundaries of `S`.
pub fn chains(b: &GlBlocks) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for j in b.s_set() {
        match out.last_mut() {
            Some(c) if *c.last().unwrap() + 1 == j => c.push(j),
            _ => out.push(vec![j]),
        }
    }
    out
}

/// Complete rank invariant of an orbit.
///
/// `pairs[k] = (i, j)` with `i ≤ j` boundaries in the same run, and
/// `ranks[k]` is the rank of the composite map from block `i` to block `j+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RankTriangle {
    pub blocks: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
    pub ranks: Vec<usize>,
}

/// A segment `[start, end]` of blocks with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub mult: usize,
}

fn rank_pairs(b: &GlBlocks) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for c in chains(b) {
        for (a, &i) in c.iter().enumerate() {
            for &j in &c[a..] {
                out.push((i, j));
            }
        }
    }
    out
}

impl RankTriangle {
    pub fn rank(&self, i: usize, j: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (i, j)).map(|k| self.ranks[k])
    }

    /// Rank of the map from block `a` to block `c` (`a ≤ c`); `n_a` when
    /// `a = c` and `0` when the blocks are not joined by a run.
    fn block_rank(&self, a: usize, c: usize) -> usize {
        if a == c {
            return self.blocks[a];
        }
        self.rank(a, c - 1).unwrap_or(0)
    }

    /// Multisegment of every run, recovered by inclusion–exclusion on ranks.
    /// Returns `None` if some multiplicity would be negative.
    pub fn multisegment(&self, b: &GlBlocks) -> Option<Vec<Segment>> {
        let mut out = Vec::new();
        for c in chains(b) {
            let lo = c[0];
            let hi = c.last().unwrap() + 1;
            for a in lo..=hi {
                for e in a..=hi {
                    let r = |x: usize, y: usize| -> i64 {
                        if x < lo || y > hi {
                            0
                        } else {
                            self.block_rank(x, y) as i64
                        }
                    };
                    let left = if a == lo { 0 } else { r(a - 1, e) };
                    let m = r(a, e) - left - r(a, e + 1) + if a == lo { 0 } else { r(a - 1, e + 1) };
                    if m < 0 {
                        return None;
                    }
                    if m > 0 {
                        out.push(Segment { start: a, end: e, mult: m as usize });
                    }
                }
            }
        }
        Some(out)
    }

    pub fn is_feasible(&self, b: &GlBlocks) -> bool {
        self.blocks == b.sizes && self.multisegment(b).is_some()
    }

    pub fn from_multisegment(b: &GlBlocks, segs: &[Segment]) -> Self {
        let pairs = rank_pairs(b);
        let ranks = pairs
            .iter()
            .map(|&(i, j)| segs.iter().filter(|s| s.start <= i && s.end > j).map(|s| s.mult).sum())
            .collect();
        RankTriangle { blocks: b.sizes.clone(), pairs, ranks }
    }

    /// Reads the ranks off an arbitrary element of `𝔤(−1)`.
    pub fn of_matrix(b: &GlBlocks, x: &IntMatrix) -> Self {
        let pairs = rank_pairs(b);
        let ranks = pairs
            .iter()
            .map(|&(i, j)| {
                let mut m = block_map(b, x, i);
                for t in i + 1..=j {
                    m = block_map(b, x, t).mul(&m);
                }
                m.rank()
            })
            .collect();
        RankTriangle { blocks: b.sizes.clone(), pairs, ranks }
    }
}

/// The block of `x` mapping block `t` to block `t+1`.
pub fn block_map(b: &GlBlocks, x: &IntMatrix, t: usize) -> IntMatrix {
    let (r0, c0) = (b.offset(t + 1), b.offset(t));
    let mut m = IntMatrix::zeros(b.sizes[t + 1], b.sizes[t]);
    for r in 0..b.sizes[t + 1] {
        for c in 0..b.sizes[t] {
            m.set(r, c, x.get(r0 + r, c0 + c));
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LOrbit {
    pub triangle: RankTriangle,
    pub segments: Vec<Segment>,
    pub dimension: usize,
    /// Row-major `n × n` integer matrix in `𝔤(−1)`.
    pub representative: Vec<Vec<i64>>,
    pub component_group_order: usize,
}

impl LOrbit {
    pub fn rep(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.representative)
    }

    pub fn is_zero(&self) -> bool {
        self.triangle.ranks.iter().all(|&r| r == 0)
    }
}

/// Descriptor of the component group `A_L(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentGroup {
    pub order: usize,
}

pub fn gl_blocks(g: &Grading) -> Result<&GlBlocks, LOrbitError> {
    g.gl_blocks().ok_or(LOrbitError::UnsupportedType)
}

/// Partial-permutation representative: each copy of a segment `[a, e]`
/// takes the next unused basis vector of every block it meets and chains
/// them by ones.
pub fn canonical_representative(b: &GlBlocks, segs: &[Segment]) -> IntMatrix {
    let n = b.n();
    let mut x = IntMatrix::zeros(n, n);
    let mut next: Vec<usize> = (0..b.sizes.len()).map(|j| b.offset(j)).collect();
    let mut ordered = segs.to_vec();
    ordered.sort_by(|s, t| (t.end - t.start).cmp(&(s.end - s.start)).then(s.start.cmp(&t.start)));
    for s in ordered {
        for _ in 0..s.mult {
            let coords: Vec<usize> = (s.start..=s.end)
                .map(|t| {
                    let c = next[t];
                    next[t] += 1;
                    c
                })
                .collect();
            for w in coords.windows(2) {
                x.set(w[1], w[0], 1);
            }
        }
    }
    x
}

pub fn levi_space(b: &GlBlocks) -> EntrySpace {
    EntrySpace::block_diagonal(&b.block_of())
}

/// `dim L − dim Z_L(x)` by exact rank.
pub fn orbit_dimension_of(b: &GlBlocks, x: &IntMatrix) -> usize {
    let l = levi_space(b);
    l.dim() - l.centralizer_dim(x)
}

pub fn orbit_dimension(g: &Grading, o: &LOrbit) -> Result<usize, LOrbitError> {
    Ok(orbit_dimension_of(gl_blocks(g)?, &o.rep()))
}

fn enumerate_chain(b: &GlBlocks, chain: &[usize]) -> Vec<Vec<Segment>> {
    let lo = chain[0];
    let hi = chain.last().unwrap() + 1;
    let mut intervals = Vec::new();
    for a in lo..=hi {
        for e in a + 1..=hi {
            intervals.push((a, e));
        }
    }
    let mut cap: Vec<usize> = b.sizes.clone();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fill(&intervals, 0, &mut cap, &mut cur, &mut out, lo, hi);
    out
}

fn fill(
    intervals: &[(usize, usize)],
    k: usize,
    cap: &mut Vec<usize>,
    cur: &mut Vec<Segment>,
    out: &mut Vec<Vec<Segment>>,
    lo: usize,
    hi: usize,
) {
    if k == intervals.len() {
        let mut segs = cur.clone();
        for t in lo..=hi {
            if cap[t] > 0 {
                segs.push(Segment { start: t, end: t, mult: cap[t] });
            }
        }
        out.push(segs);
        return;
    }
    let (a, e) = intervals[k];
    let max = (a..=e).map(|t| cap[t]).min().unwrap();
    for m in 0..=max {
        if m > 0 {
            for t in a..=e {
                cap[t] -= m;
            }
            cur.push(Segment { start: a, end: e, mult: m });
        }
        fill(intervals, k + 1, cap, cur, out, lo, hi);
        if m > 0 {
            cur.pop();
            for t in a..=e {
                cap[t] += m;
            }
        }
    }
}

/// All L-orbits on `𝔤(−1)`, sorted by dimension and then by ranks.
pub fn enumerate_l_orbits(g: &Grading) -> Result<Vec<LOrbit>, LOrbitError> {
    let b = gl_blocks(g)?;
    let mut per_chain: Vec<Vec<Vec<Segment>>> = chains(b).iter().map(|c| enumerate_chain(b, c)).collect();
    if per_chain.is_empty() {
        per_chain.push(vec![Vec::new()]);
    }
    let mut combos: Vec<Vec<Segment>> = vec![Vec::new()];
    for options in &per_chain {
        let mut next = Vec::new();
        for base in &combos {
            for o in options {
                let mut v = base.clone();
                v.extend(o.iter().copied());
                next.push(v);
            }
        }
        combos = next;
    }
    let mut out: Vec<LOrbit> = combos
        .into_iter()
        .map(|mut segs| {
            segs.sort();
            let triangle = RankTriangle::from_multisegment(b, &segs);
            let x = canonical_representative(b, &segs);
            let dimension = orbit_dimension_of(b, &x);
            LOrbit { triangle, segments: segs, dimension, representative: x.to_rows(), component_group_order: 1 }
        })
        .collect();
    out.sort_by(|a, b| a.dimension.cmp(&b.dimension).then_with(|| a.triangle.ranks.cmp(&b.triangle.ranks)));
    Ok(out)
}

/// `o1 ⊆ closure(o2)`: componentwise rank comparison.
pub fn closure_leq(o1: &LOrbit, o2: &LOrbit) -> Result<bool, LOrbitError> {
    let (a, b) = (&o1.triangle, &o2.triangle);
    if a.blocks != b.blocks || a.pairs != b.pairs {
        return Err(LOrbitError::IncomparableGradings);
    }
    Ok(a.ranks.iter().zip(&b.ranks).all(|(x, y)| x <= y))
}

pub fn component_group(g: &Grading, _o: &LOrbit) -> Result<ComponentGroup, LOrbitError> {
    gl_blocks(g)?;
    Ok(ComponentGroup { order: 1 })
}

/// Position of the orbit containing `x` in `orbits`.
pub fn locate(g: &Grading, orbits: &[LOrbit], x: &IntMatrix) -> Option<usize> {
    let b = g.gl_blocks()?;
    let t = RankTriangle::of_matrix(b, x);
    orbits.iter().position(|o| o.triangle == t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{CartanType, RootSystem};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gl(d: &[i64]) -> Grading {
        Grading::gl_ints(d).unwrap()
    }

    fn dims(g: &Grading) -> Vec<usize> {
        enumerate_l_orbits(g).unwrap().iter().map(|o| o.dimension).collect()
    }

    #[test]
    fn small_examples() {
        assert_eq!(dims(&gl(&[2, 1, 0])), vec![0, 1, 1, 2]);
        assert_eq!(dims(&gl(&[1, 1, 0, 0])), vec![0, 3, 4]);
        assert_eq!(dims(&gl(&[1, 0])), vec![0, 1]);
    }

    #[test]
    fn single_block_matches_closed_form() {
        for (a, b) in [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3), (1, 3)] {
            let mut d = vec![1; a];
            d.extend(vec![0; b]);
            let g = gl(&d);
            let orbits = enumerate_l_orbits(&g).unwrap();
            assert_eq!(orbits.len(), a.min(b) + 1);
            for o in orbits {
                let r = o.triangle.ranks[0];
                assert_eq!(o.dimension, r * (a + b - r));
            }
        }
    }

    #[test]
    fn incomparable_pair_in_gl3() {
        let g = gl(&[2, 1, 0]);
        let orbits = enumerate_l_orbits(&g).unwrap();
        let find = |r: &[usize]| orbits.iter().find(|o| o.triangle.ranks == r).unwrap();
        // pairs are (0,0), (0,1), (1,1): ranks (r₁, r₁₂, r₂)
        let a = find(&[1, 0, 0]);
        let b = find(&[0, 0, 1]);
        assert!(!closure_leq(a, b).unwrap());
        assert!(!closure_leq(b, a).unwrap());
    }

    #[test]
    fn non_gl_rejected() {
        let g = Grading::from_ints(RootSystem::build(CartanType::B, 2).unwrap(), &[1, 1]).unwrap();
        assert_eq!(enumerate_l_orbits(&g).unwrap_err(), LOrbitError::UnsupportedType);
    }

    #[test]
    fn component_groups_trivial() {
        let g = gl(&[1, 1, 0, 0]);
        for o in enumerate_l_orbits(&g).unwrap() {
            assert_eq!(component_group(&g, &o).unwrap().order, 1);
        }
    }

    #[test]
    fn random_points_land_in_enumerated_orbits() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [vec![2, 1, 0], vec![1, 1, 0, 0], vec![3, 2, 1, 0], vec![2, 2, 1, 0], vec![2, 1, 1, 0]] {
            let g = gl(&d);
            let b = g.gl_blocks().unwrap();
            let orbits = enumerate_l_orbits(&g).unwrap();
            let n = d.len();
            for _ in 0..200 {
                let mut x = IntMatrix::zeros(n, n);
                for &j in &b.s_set() {
                    for r in 0..b.sizes[j + 1] {
                        for c in 0..b.sizes[j] {
                            x.set(b.offset(j + 1) + r, b.offset(j) + c, rng.gen_range(-1..=1));
                        }
                    }
                }
                assert!(locate(&g, &orbits, &x).is_some());
            }
        }
    }

    #[test]
    fn closure_has_unique_extremes() {
        for d in [vec![2, 1, 0], vec![3, 2, 2, 1, 0], vec![1, 1, 0, 0]] {
            let g = gl(&d);
            let orbits = enumerate_l_orbits(&g).unwrap();
            let tops: Vec<_> = orbits.iter().filter(|o| orbits.iter().all(|p| closure_leq(p, o).unwrap())).collect();
            let bottoms: Vec<_> =
                orbits.iter().filter(|o| orbits.iter().all(|p| closure_leq(o, p).unwrap())).collect();
            assert_eq!(tops.len(), 1);
            assert_eq!(bottoms.len(), 1);
            assert!(bottoms[0].is_zero());
            assert_eq!(tops[0].dimension, g.dim(-1));
        }
    }

    proptest! {
        #[test]
        fn representatives_reproduce_their_triangles(diag in proptest::collection::vec(0i64..4, 1..6)) {
            let mut d = diag;
            d.sort_unstable_by(|a, b| b.cmp(a));
            let g = gl(&d);
            let b = g.gl_blocks().unwrap();
            let orbits = enumerate_l_orbits(&g).unwrap();
            let mut seen = std::collections::HashSet::new();
            for o in &orbits {
                prop_assert!(seen.insert(o.triangle.clone()));
                prop_assert_eq!(&RankTriangle::of_matrix(b, &o.rep()), &o.triangle);
                prop_assert!(o.triangle.is_feasible(b));
                prop_assert_eq!(o.triangle.multisegment(b).unwrap(), o.segments.clone());
                prop_assert!(o.dimension <= g.dim(-1));
            }
        }
    }
}
