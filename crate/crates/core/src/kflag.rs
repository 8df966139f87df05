//! Orbits of `K = GL(V₊) × GL(V₋)` on partial flag varieties of GL(n).
//!
//! `V₊` and `V₋` are spanned by coordinate vectors chosen by a parity class
//! per coordinate. Orbits on a partial flag variety are unions of full-flag
//! orbits (clans) connected by the moves of reflections inside the Levi.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::clan::{Clan, RootKind, Tok};
use crate::lie::EntrySpace;
use crate::linalg::IntMatrix;
use crate::rootdata::Grading;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KFlagError {
    #[error("flag steps are not nested subspaces of the stated dimensions")]
    DegenerateFlag,
    #[error("flag lies in no enumerated orbit")]
    UnknownOrbit,
    #[error("step dimensions {0:?} are not increasing inside (0, n)")]
    BadSteps(Vec<usize>),
}

/// Which coordinates span `V₊` (`true`) and `V₋` (`false`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KData {
    pub class: Vec<bool>,
}

impl KData {
    /// `V₊` = first `p` coordinates.
    pub fn from_pq(p: usize, q: usize) -> Self {
        KData { class: (0..p + q).map(|i| i < p).collect() }
    }

    /// Even diagonal entries span `V₊`.
    pub fn from_grading(g: &Grading) -> Option<Self> {
        g.gl_blocks().map(|b| KData { class: b.diag.iter().map(|d| d % 2 == 0).collect() })
    }

    pub fn n(&self) -> usize {
        self.class.len()
    }

    pub fn p(&self) -> usize {
        self.class.iter().filter(|c| **c).count()
    }

    pub fn q(&self) -> usize {
        self.n() - self.p()
    }

    pub fn plus_coords(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.class[i]).collect()
    }

    pub fn minus_coords(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.class[i]).collect()
    }

    pub fn dim_k(&self) -> usize {
        let p = self.p();
        let q = self.q();
        p * p + q * q
    }

    pub fn lie_k(&self) -> EntrySpace {
        EntrySpace::same_class(&self.class)
    }

    /// `θ = diag(±1)`.
    pub fn theta(&self, b: &IntMatrix) -> IntMatrix {
        let mut out = b.clone();
        for r in 0..b.rows() {
            if !self.class[r] {
                for c in 0..b.cols() {
                    out.set(r, c, -b.get(r, c));
                }
            }
        }
        out
    }
}

/// A flag given by a basis whose leading `d_t` columns span the `t`-th step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialFlag {
    pub n: usize,
    pub steps: Vec<usize>,
    /// Row-major `n × k` basis matrix, `k ≥ d_m`.
    pub basis: Vec<Vec<i64>>,
}

impl PartialFlag {
    pub fn new(steps: Vec<usize>, basis: &IntMatrix) -> Self {
        PartialFlag { n: basis.rows(), steps, basis: basis.to_rows() }
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.basis)
    }

    pub fn validate(&self) -> Result<(), KFlagError> {
        check_steps(self.n, &self.steps)?;
        let b = self.matrix();
        let last = *self.steps.last().unwrap_or(&0);
        if b.cols() < last {
            return Err(KFlagError::DegenerateFlag);
        }
        for &d in &self.steps {
            if b.leading_columns(d).rank() != d {
                return Err(KFlagError::DegenerateFlag);
            }
        }
        Ok(())
    }

    /// A basis of the whole space whose leading columns are those of this
    /// flag, completed by coordinate vectors.
    pub fn completed_basis(&self) -> IntMatrix {
        let b = self.matrix();
        let n = self.n;
        let mut cols: Vec<Vec<i64>> = (0..b.cols()).map(|j| b.column(j)).collect();
        let mut kept: Vec<Vec<i64>> = Vec::new();
        for c in cols.drain(..) {
            let mut trial = kept.clone();
            trial.push(c.clone());
            if IntMatrix::from_columns(n, &trial).rank() == trial.len() {
                kept.push(c);
            }
            if kept.len() == n {
                break;
            }
        }
        for i in 0..n {
            if kept.len() == n {
                break;
            }
            let mut e = vec![0; n];
            e[i] = 1;
            let mut trial = kept.clone();
            trial.push(e.clone());
            if IntMatrix::from_columns(n, &trial).rank() == trial.len() {
                kept.push(e);
            }
        }
        IntMatrix::from_columns(n, &kept)
    }
}

fn check_steps(n: usize, steps: &[usize]) -> Result<(), KFlagError> {
    let ok = steps.windows(2).all(|w| w[0] < w[1]) && steps.iter().all(|&d| d > 0 && d < n);
    if ok {
        Ok(())
    } else {
        Err(KFlagError::BadSteps(steps.to_vec()))
    }
}

pub fn full_steps(n: usize) -> Vec<usize> {
    (1..n).collect()
}

/// Exact intersection and sum dimensions of a flag against `V₊`, `V₋`, `θ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlagSignature {
    pub plus_dims: Vec<usize>,
    pub minus_dims: Vec<usize>,
    /// `cross_dims[s][t − s] = dim(F_s + θF_t)` for `s ≤ t`.
    pub cross_dims: Vec<Vec<usize>>,
}

pub fn flag_signature(f: &PartialFlag, k: &KData) -> Result<FlagSignature, KFlagError> {
    f.validate()?;
    Ok(signature_unchecked(&f.matrix(), &f.steps, k))
}

fn signature_unchecked(b: &IntMatrix, steps: &[usize], k: &KData) -> FlagSignature {
    let plus = k.plus_coords();
    let minus = k.minus_coords();
    let tb = k.theta(b);
    let mut plus_dims = Vec::new();
    let mut minus_dims = Vec::new();
    let mut cross_dims = Vec::new();
    for (s, &ds) in steps.iter().enumerate() {
        let bs = b.leading_columns(ds);
        plus_dims.push(ds - bs.select_rows(&minus).rank());
        minus_dims.push(ds - bs.select_rows(&plus).rank());
        let mut row = Vec::new();
        for &dt in &steps[s..] {
            row.push(bs.hstack(&tb.leading_columns(dt)).rank());
        }
        cross_dims.push(row);
    }
    FlagSignature { plus_dims, minus_dims, cross_dims }
}

/// Standard representative of a clan: `+` takes the next `V₊` coordinate
/// vector, `-` the next `V₋` one, and a pair `i < j` puts `u + w` at `i`
/// and `u − w` at `j` for fresh `u ∈ V₊`, `w ∈ V₋`.
pub fn clan_basis(c: &Clan, k: &KData) -> IntMatrix {
    let n = k.n();
    assert_eq!(c.n(), n);
    assert_eq!(c.signature(), (k.p(), k.q()), "clan signature does not match K");
    let plus = k.plus_coords();
    let minus = k.minus_coords();
    let (mut ip, mut im) = (0, 0);
    let mut cols = vec![vec![0i64; n]; n];
    for (i, t) in c.toks().iter().enumerate() {
        match *t {
            Tok::Plus => {
                cols[i][plus[ip]] = 1;
                ip += 1;
            }
            Tok::Minus => {
                cols[i][minus[im]] = 1;
                im += 1;
            }
            Tok::Pair(j) => {
                let j = j as usize;
                if j > i {
                    let (u, w) = (plus[ip], minus[im]);
                    ip += 1;
                    im += 1;
                    cols[i][u] = 1;
                    cols[i][w] = 1;
                    cols[j][u] = 1;
                    cols[j][w] = -1;
                }
            }
        }
    }
    IntMatrix::from_columns(n, &cols)
}

/// `dim K − dim Stab_𝔨(F)` by exact rank.
pub fn orbit_dimension_k(f: &PartialFlag, k: &KData) -> usize {
    let kk = k.lie_k();
    k.dim_k() - kk.flag_stabilizer_dim(&f.matrix(), &f.steps)
}

/// Simple reflections of the Levi of the step pattern.
pub fn levi_reflections(n: usize, steps: &[usize]) -> Vec<usize> {
    (0..n.saturating_sub(1)).filter(|i| !steps.contains(&(i + 1))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KOrbit {
    pub signature: FlagSignature,
    pub dimension: usize,
    /// The clan, when the flag variety is the full one.
    pub clan: Option<String>,
    /// Clan of the open full-flag orbit in the preimage.
    pub open_clan: Clan,
    /// All full-flag orbits in the preimage.
    pub clans: Vec<Clan>,
    pub base_point: PartialFlag,
}

/// All K-orbits on one partial flag variety, with lookup tables.
#[derive(Debug, Clone)]
pub struct KOrbitSet {
    pub k: KData,
    pub steps: Vec<usize>,
    pub orbits: Vec<KOrbit>,
    clan_orbit: HashMap<Clan, usize>,
    by_signature: HashMap<FlagSignature, Vec<usize>>,
    full_signature: HashMap<FlagSignature, Clan>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut i = i;
        while self.0[i] != r {
            let nx = self.0[i];
            self.0[i] = r;
            i = nx;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl KOrbitSet {
    pub fn enumerate(k: &KData, steps: &[usize]) -> Result<Self, KFlagError> {
        let n = k.n();
        check_steps(n, steps)?;
        let clans = Clan::all(k.p(), k.q());
        let index: HashMap<Clan, usize> = clans.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut uf = UnionFind((0..clans.len()).collect());
        let refl = levi_reflections(n, steps);
        for (a, c) in clans.iter().enumerate() {
            for &i in &refl {
                uf.union(a, index[&c.cross(i)]);
                if let Some(y) = c.cayley(i) {
                    uf.union(a, index[&y]);
                }
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for a in 0..clans.len() {
            let r = uf.find(a);
            groups.entry(r).or_default().push(a);
        }
        let full = full_steps(n);
        let full_signature: HashMap<FlagSignature, Clan> =
            clans.iter().map(|c| (signature_unchecked(&clan_basis(c, k), &full, k), c.clone())).collect();
        assert_eq!(full_signature.len(), clans.len(), "full-flag signatures must separate clans");
        let mut orbits: Vec<KOrbit> = groups
            .into_values()
            .map(|members| {
                let max = members.iter().map(|&a| clans[a].length()).max().unwrap();
                let tops: Vec<usize> = members.iter().copied().filter(|&a| clans[a].length() == max).collect();
                assert_eq!(tops.len(), 1, "preimage of a partial orbit has a unique open orbit");
                let open = clans[tops[0]].clone();
                let basis = clan_basis(&open, k);
                let base_point = PartialFlag::new(steps.to_vec(), &basis);
                let signature = signature_unchecked(&basis, steps, k);
                let dimension = orbit_dimension_k(&base_point, k);
                let mut cl: Vec<Clan> = members.iter().map(|&a| clans[a].clone()).collect();
                cl.sort_by(|a, b| a.length().cmp(&b.length()).then_with(|| a.to_string().cmp(&b.to_string())));
                let clan = (steps == full.as_slice()).then(|| open.to_string());
                KOrbit { signature, dimension, clan, open_clan: open, clans: cl, base_point }
            })
            .collect();
        orbits.sort_by(|a, b| {
            a.dimension.cmp(&b.dimension).then_with(|| a.open_clan.to_string().cmp(&b.open_clan.to_string()))
        });
        let mut clan_orbit = HashMap::new();
        let mut by_signature: HashMap<FlagSignature, Vec<usize>> = HashMap::new();
        for (o, orb) in orbits.iter().enumerate() {
            for c in &orb.clans {
                clan_orbit.insert(c.clone(), o);
            }
            by_signature.entry(orb.signature.clone()).or_default().push(o);
        }
        Ok(KOrbitSet { k: k.clone(), steps: steps.to_vec(), orbits, clan_orbit, by_signature, full_signature })
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    /// Clan of the full flag spanned by the columns of an invertible basis.
    pub fn full_clan(&self, basis: &IntMatrix) -> Result<Clan, KFlagError> {
        let sig = signature_unchecked(basis, &full_steps(self.k.n()), &self.k);
        self.full_signature.get(&sig).cloned().ok_or(KFlagError::UnknownOrbit)
    }

    pub fn orbit_of_clan(&self, c: &Clan) -> Option<usize> {
        self.clan_orbit.get(c).copied()
    }

    /// Orbit index of a flag: by signature when that is unambiguous,
    /// otherwise through the clan of a full refinement.
    pub fn identify(&self, f: &PartialFlag) -> Result<usize, KFlagError> {
        let sig = flag_signature(f, &self.k)?;
        match self.by_signature.get(&sig).map(Vec::as_slice) {
            Some([o]) => Ok(*o),
            _ => {
                let c = self.full_clan(&f.completed_basis())?;
                self.orbit_of_clan(&c).ok_or(KFlagError::UnknownOrbit)
            }
        }
    }

    /// Signatures shared by more than one orbit.
    pub fn ambiguous_signatures(&self) -> usize {
        self.by_signature.values().filter(|v| v.len() > 1).count()
    }

    /// Whether the cross dimensions are determined by the plus and minus
    /// dimensions on this step pattern.
    pub fn cross_dims_redundant(&self) -> bool {
        let mut seen = HashMap::new();
        for o in &self.orbits {
            let key = (&o.signature.plus_dims, &o.signature.minus_dims);
            if let Some(prev) = seen.insert(key, &o.signature.cross_dims) {
                if *prev != o.signature.cross_dims {
                    return false;
                }
            }
        }
        true
    }

    /// `dim` of the closed orbit through the standard flag.
    pub fn base_orbit(&self) -> Result<usize, KFlagError> {
        let id = IntMatrix::identity(self.k.n());
        self.identify(&PartialFlag::new(self.steps.clone(), &id))
    }
}

/// Per simple root: kind of the reflection for the open clan of an orbit.
pub fn descent_profile(c: &Clan) -> Vec<RootKind> {
    (0..c.n().saturating_sub(1)).map(|i| c.kind(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn flag(steps: &[usize], cols: &[Vec<i64>]) -> PartialFlag {
        let n = cols[0].len();
        PartialFlag::new(steps.to_vec(), &IntMatrix::from_columns(n, cols))
    }

    #[test]
    fn signature_examples() {
        let k = KData::from_pq(1, 1);
        let s = flag_signature(&flag(&[1], &[vec![1, 0]]), &k).unwrap();
        assert_eq!((s.plus_dims, s.minus_dims), (vec![1], vec![0]));
        let s = flag_signature(&flag(&[1], &[vec![1, 1]]), &k).unwrap();
        assert_eq!((s.plus_dims, s.minus_dims), (vec![0], vec![0]));
        let k = KData::from_pq(2, 2);
        let s = flag_signature(&flag(&[2], &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]), &k).unwrap();
        assert_eq!((s.plus_dims, s.minus_dims), (vec![2], vec![0]));
    }

    #[test]
    fn degenerate_flag_rejected() {
        let k = KData::from_pq(1, 1);
        let f = flag(&[1], &[vec![0, 0]]);
        assert_eq!(flag_signature(&f, &k), Err(KFlagError::DegenerateFlag));
    }

    #[test]
    fn orbit_counts_and_dims() {
        let set = KOrbitSet::enumerate(&KData::from_pq(1, 1), &[1]).unwrap();
        assert_eq!(set.orbits.iter().map(|o| o.dimension).collect::<Vec<_>>(), vec![0, 0, 1]);
        let set = KOrbitSet::enumerate(&KData::from_pq(2, 1), &[1, 2]).unwrap();
        assert_eq!(set.len(), 6);
        let set = KOrbitSet::enumerate(&KData::from_pq(2, 2), &[2]).unwrap();
        assert_eq!(set.orbits.iter().map(|o| o.dimension).collect::<Vec<_>>(), vec![0, 0, 2, 3, 3, 4]);
    }

    #[test]
    fn closed_orbit_dims() {
        // K·𝔭 for GL(3), V₊ = first two coordinates, full flags.
        let k = KData::from_pq(2, 1);
        let f = PartialFlag::new(vec![1, 2], &IntMatrix::identity(3));
        assert_eq!(orbit_dimension_k(&f, &k), 1);
        // GL(4), λ = (1,1,0,0): K = L fixes the standard two-step flag.
        let g = Grading::gl_ints(&[1, 1, 0, 0]).unwrap();
        let k = KData::from_grading(&g).unwrap();
        let f = PartialFlag::new(vec![2], &IntMatrix::identity(4));
        assert_eq!(orbit_dimension_k(&f, &k), 0);
    }

    #[test]
    fn clan_lengths_match_exact_dimensions() {
        for n in 2..=5 {
            for p in 0..=n {
                let k = KData::from_pq(p, n - p);
                for c in Clan::all(p, n - p) {
                    let f = PartialFlag::new(full_steps(n), &clan_basis(&c, &k));
                    assert_eq!(orbit_dimension_k(&f, &k), c.orbit_dim(), "{c}");
                }
            }
        }
    }

    #[test]
    fn partial_dimension_is_open_clan_minus_fiber() {
        for (p, q, steps) in [(2, 2, vec![2]), (2, 1, vec![1]), (3, 2, vec![2, 3]), (2, 3, vec![1, 3])] {
            let k = KData::from_pq(p, q);
            let set = KOrbitSet::enumerate(&k, &steps).unwrap();
            let n = p + q;
            let mut bounds = vec![0];
            bounds.extend(steps.iter().copied());
            bounds.push(n);
            let fiber: usize = bounds.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0] - 1) / 2).sum();
            for o in &set.orbits {
                assert_eq!(o.dimension + fiber, o.open_clan.orbit_dim());
            }
        }
    }

    fn random_k(k: &KData, rng: &mut ChaCha8Rng) -> IntMatrix {
        let n = k.n();
        let mut m = IntMatrix::identity(n);
        for _ in 0..3 * n {
            let (r, c) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if r == c || k.class[r] != k.class[c] {
                continue;
            }
            let mut e = IntMatrix::identity(n);
            e.set(r, c, rng.gen_range(-2..=2));
            m = e.mul(&m);
        }
        m
    }

    #[test]
    fn signatures_are_k_invariant_and_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (class, steps) in [
            (vec![true, false, true, false], vec![2]),
            (vec![true, true, false, false, true], vec![1, 3]),
            (vec![false, true, false, true, true], vec![2, 4]),
            (vec![true, false, true], vec![1, 2]),
        ] {
            let k = KData { class };
            let set = KOrbitSet::enumerate(&k, &steps).unwrap();
            for (o, orb) in set.orbits.iter().enumerate() {
                for _ in 0..20 {
                    let g = random_k(&k, &mut rng);
                    let moved = PartialFlag::new(steps.clone(), &g.mul(&orb.base_point.matrix()));
                    assert_eq!(flag_signature(&moved, &k).unwrap(), orb.signature);
                    assert_eq!(set.identify(&moved).unwrap(), o);
                }
            }
            // random flags always land somewhere
            let n = k.n();
            for _ in 0..100 {
                let mut b = IntMatrix::zeros(n, n);
                for r in 0..n {
                    for c in 0..n {
                        b.set(r, c, rng.gen_range(-1..=1));
                    }
                }
                if b.rank() < n {
                    continue;
                }
                let f = PartialFlag::new(steps.clone(), &b);
                assert!(set.identify(&f).is_ok());
            }
        }
    }

    #[test]
    fn full_flag_counts_match_clans() {
        for n in 1..=6 {
            for p in 0..=n {
                let k = KData::from_pq(p, n - p);
                let set = KOrbitSet::enumerate(&k, &full_steps(n)).unwrap();
                assert_eq!(set.len(), Clan::all(p, n - p).len());
                assert_eq!(set.ambiguous_signatures(), 0);
            }
        }
    }
}
