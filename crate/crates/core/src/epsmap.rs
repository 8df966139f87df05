//! The map `ε : 𝔤(−1) → G/P` built from an ordered parabolic family, its
//! two-step variant `ε′(x) = exp(x)·𝔭`, and the induced matching of
//! L-orbits with K-orbits (or P-orbits) on `G/P`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::kflag::{FlagSignature, KData, KFlagError, KOrbitSet, PartialFlag};
use crate::lie::EntrySpace;
use crate::linalg::{IntMatrix, RatMatrix};
use crate::lorbits::{levi_space, LOrbit};
use crate::porbit::{p_orbit_dimension, PTable};
use crate::rootdata::{GlBlocks, Grading, ParabolicFamily};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EpsError {
    #[error("the map is only constructed for GL gradings")]
    UnsupportedType,
    #[error("parabolic family has status {0}")]
    InvalidFamily(String),
    #[error("two-step mode needs 𝔤(±i) = 0 for |i| > 2")]
    ModeMismatch,
    #[error("ordering {0:?} is not a permutation of the family")]
    BadOrdering(Vec<usize>),
    #[error("element is not in 𝔤(−1)")]
    NotInGMinusOne,
    #[error("orbit {orbit}: target dimension {found}, expected {expected}")]
    DimensionMismatch { orbit: usize, expected: usize, found: usize },
    #[error("orbit {0} is not in the image of the matching")]
    NotInY(usize),
    #[error(transparent)]
    Flag(#[from] KFlagError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EpsMode {
    Truncated,
    TwoStep,
}

/// Which group acts on `G/P` on the target side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TargetGroup {
    K,
    P,
}

#[derive(Debug, Clone)]
pub struct EpsilonMap {
    pub grading: Grading,
    pub family: ParabolicFamily,
    pub mode: EpsMode,
    /// Positions in the default family, in the order used.
    pub ordering: Vec<usize>,
    pieces: Vec<Vec<(usize, usize)>>,
}

fn gl(g: &Grading) -> Result<&GlBlocks, EpsError> {
    g.gl_blocks().ok_or(EpsError::UnsupportedType)
}

/// Entries `(r, c)` of `𝔤𝔩(n)` whose root has `λ`-eigenvalue `i`.
pub fn degree_space(b: &GlBlocks, i: i64) -> EntrySpace {
    EntrySpace::filtered(b.n(), |r, c| b.diag[r] - b.diag[c] == i)
}

impl EpsilonMap {
    /// `default_family` is the family in default order; `ordering` lists
    /// its members in the order the exponentials are multiplied.
    pub fn new(g: &Grading, default_family: &ParabolicFamily, ordering: &[usize], mode: EpsMode) -> Result<Self, EpsError> {
        let b = gl(g)?;
        let mut sorted = ordering.to_vec();
        sorted.sort_unstable();
        if sorted != (0..default_family.len()).collect::<Vec<_>>() {
            return Err(EpsError::BadOrdering(ordering.to_vec()));
        }
        match mode {
            EpsMode::Truncated => {
                if !default_family.status.is_valid() {
                    return Err(EpsError::InvalidFamily(default_family.status.label().to_string()));
                }
            }
            EpsMode::TwoStep => {
                if g.max_eigenvalue() > 2 {
                    return Err(EpsError::ModeMismatch);
                }
            }
        }
        let family = default_family.reordered(ordering);
        let n = b.n();
        let mut pieces = vec![Vec::new(); family.len()];
        for r in 0..n {
            for c in 0..r {
                if b.diag[r] - b.diag[c] != -1 {
                    continue;
                }
                // root e_r − e_c = −(α_c + … + α_{r−1})
                if let Some(m) = family.members.iter().position(|m| (c..r).all(|k| m.simple.contains(&k))) {
                    pieces[m].push((r, c));
                }
            }
        }
        Ok(EpsilonMap { grading: g.clone(), family, mode, ordering: ordering.to_vec(), pieces })
    }

    pub fn default(g: &Grading, fam: &ParabolicFamily, mode: EpsMode) -> Result<Self, EpsError> {
        let ord: Vec<usize> = (0..fam.len()).collect();
        Self::new(g, fam, &ord, mode)
    }

    pub fn blocks(&self) -> &GlBlocks {
        self.grading.gl_blocks().expect("checked at construction")
    }

    /// Step dimensions of the standard flag fixed by `P`.
    pub fn steps(&self) -> Vec<usize> {
        let b = self.blocks();
        (1..b.sizes.len()).map(|j| b.offset(j)).collect()
    }

    pub fn in_g_minus_one(&self, x: &IntMatrix) -> bool {
        let b = self.blocks();
        let n = b.n();
        x.rows() == n
            && x.cols() == n
            && (0..n).all(|r| (0..n).all(|c| x.get(r, c) == 0 || b.diag[r] - b.diag[c] == -1))
    }

    /// `x = x₁ + … + x_ℓ` along the family, in the current order.
    pub fn decompose(&self, x: &IntMatrix) -> Vec<IntMatrix> {
        let n = self.blocks().n();
        self.pieces
            .iter()
            .map(|ents| {
                let mut m = IntMatrix::zeros(n, n);
                for &(r, c) in ents {
                    m.set(r, c, x.get(r, c));
                }
                m
            })
            .collect()
    }

    /// The group element whose columns give `ε(x)` (before clearing).
    pub fn group_element(&self, x: &IntMatrix) -> Result<RatMatrix, EpsError> {
        if !self.in_g_minus_one(x) {
            return Err(EpsError::NotInGMinusOne);
        }
        let n = self.blocks().n();
        Ok(match self.mode {
            EpsMode::Truncated => {
                let mut g = RatMatrix::identity(n);
                for xi in self.decompose(x) {
                    g = g.mul(&RatMatrix::from_int(&xi).exp_nilpotent());
                }
                g
            }
            EpsMode::TwoStep => RatMatrix::from_int(x).exp_nilpotent(),
        })
    }

    pub fn epsilon(&self, x: &IntMatrix) -> Result<PartialFlag, EpsError> {
        let g = self.group_element(x)?;
        Ok(PartialFlag::new(self.steps(), &g.columns_cleared()))
    }
}

/// Orbits on `G/P` that matched orbits can land in.
#[derive(Debug, Clone)]
pub enum Targets {
    K(KOrbitSet),
    P { sizes: Vec<usize>, tables: Vec<PTable> },
}

impl Targets {
    pub fn build(em: &EpsilonMap, group: TargetGroup) -> Result<Self, EpsError> {
        let b = em.blocks();
        Ok(match group {
            TargetGroup::K => {
                let k = KData::from_grading(&em.grading).ok_or(EpsError::UnsupportedType)?;
                Targets::K(KOrbitSet::enumerate(&k, &em.steps())?)
            }
            TargetGroup::P => {
                let mut tables = PTable::all(&b.sizes);
                tables.sort();
                Targets::P { sizes: b.sizes.clone(), tables }
            }
        })
    }

    pub fn len(&self) -> usize {
        match self {
            Targets::K(s) => s.len(),
            Targets::P { tables, .. } => tables.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Target index and exact orbit dimension of a flag.
    pub fn locate(&self, f: &PartialFlag) -> Result<(usize, usize), EpsError> {
        match self {
            Targets::K(s) => {
                let i = s.identify(f)?;
                Ok((i, s.orbits[i].dimension))
            }
            Targets::P { sizes, tables } => {
                let t = PTable::of_flag(f, sizes);
                let i = tables.binary_search(&t).map_err(|_| EpsError::Flag(KFlagError::UnknownOrbit))?;
                Ok((i, p_orbit_dimension(f, sizes)))
            }
        }
    }

    pub fn signature(&self, i: usize) -> TargetSignature {
        match self {
            Targets::K(s) => TargetSignature::K(s.orbits[i].signature.clone()),
            Targets::P { tables, .. } => TargetSignature::P(tables[i].clone()),
        }
    }

    pub fn label(&self, i: usize) -> String {
        match self {
            Targets::K(s) => s.orbits[i].open_clan.to_string(),
            Targets::P { tables, .. } => format!("{:?}", tables[i].0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "group", content = "value")]
pub enum TargetSignature {
    K(FlagSignature),
    P(PTable),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchChecks {
    pub injective: bool,
    pub dim_law: bool,
    pub stabilizer_law: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitMatch {
    pub orbit: usize,
    pub orbit_ranks: Vec<usize>,
    pub orbit_dim: usize,
    pub target: usize,
    pub target_label: String,
    pub target_signature: TargetSignature,
    pub target_dim: usize,
    pub ordering_id: Vec<usize>,
    /// Both component groups are trivial for GL, so the local system map is
    /// the identity.
    pub local_system: String,
    pub resampled: bool,
    pub checks: MatchChecks,
}

/// Dimension a matched target must have.
pub fn expected_target_dim(em: &EpsilonMap, targets: &Targets, orbit_dim: usize) -> Result<usize, EpsError> {
    Ok(match targets {
        Targets::P { .. } => orbit_dim,
        Targets::K(_) => base_dim(em, targets)? + orbit_dim,
    })
}

/// Dimension of the orbit through the standard flag.
pub fn base_dim(em: &EpsilonMap, targets: &Targets) -> Result<usize, EpsError> {
    let n = em.blocks().n();
    let f = PartialFlag::new(em.steps(), &IntMatrix::identity(n));
    Ok(targets.locate(&f)?.1)
}

/// Lie stabilizers of `x` and of `ε(x)` in `𝔩` coincide: returns the
/// dimensions of `Z_𝔩(x)`, `Stab_𝔩(ε(x))` and their intersection.
pub fn stabilizer_dims(em: &EpsilonMap, x: &IntMatrix) -> Result<(usize, usize, usize), EpsError> {
    let l = levi_space(em.blocks());
    let f = em.epsilon(x)?;
    let rc = l.commutator_rows(x);
    let rf = l.flag_rows(&f.matrix(), &f.steps);
    let both: Vec<Vec<i64>> = rc.iter().chain(rf.iter()).cloned().collect();
    Ok((l.solution_dim(&rc), l.solution_dim(&rf), l.solution_dim(&both)))
}

fn random_levi_conjugate(b: &GlBlocks, x: &IntMatrix, rng: &mut ChaCha8Rng) -> IntMatrix {
    let n = b.n();
    let block = b.block_of();
    let mut g = IntMatrix::identity(n);
    let mut ginv = IntMatrix::identity(n);
    for _ in 0..4 * n {
        let (r, c) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if r == c || block[r] != block[c] {
            continue;
        }
        let v = rng.gen_range(-2..=2);
        let mut e = IntMatrix::identity(n);
        e.set(r, c, v);
        let mut einv = IntMatrix::identity(n);
        einv.set(r, c, -v);
        g = e.mul(&g);
        ginv = ginv.mul(&einv);
    }
    g.mul(x).mul(&ginv)
}

/// `Q_O` for one orbit, with the dimension law enforced.
///
/// If the canonical representative gives the wrong dimension, two random
/// L-conjugates are tried and must agree.
pub fn match_orbit(
    em: &EpsilonMap,
    targets: &Targets,
    orbits: &[LOrbit],
    index: usize,
    seed: u64,
) -> Result<OrbitMatch, EpsError> {
    let o = &orbits[index];
    let expected = expected_target_dim(em, targets, o.dimension)?;
    let x = o.rep();
    let (mut target, mut found) = targets.locate(&em.epsilon(&x)?)?;
    let mut resampled = false;
    if found != expected {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9e37_79b9));
        let mut hits = Vec::new();
        for _ in 0..2 {
            let y = random_levi_conjugate(em.blocks(), &x, &mut rng);
            hits.push(targets.locate(&em.epsilon(&y)?)?);
        }
        if hits[0] != hits[1] || hits[0].1 != expected {
            return Err(EpsError::DimensionMismatch { orbit: index, expected, found });
        }
        (target, found) = hits[0];
        resampled = true;
    }
    let (z, s, both) = stabilizer_dims(em, &x)?;
    Ok(OrbitMatch {
        orbit: index,
        orbit_ranks: o.triangle.ranks.clone(),
        orbit_dim: o.dimension,
        target,
        target_label: targets.label(target),
        target_signature: targets.signature(target),
        target_dim: found,
        ordering_id: em.ordering.clone(),
        local_system: "trivial".into(),
        resampled,
        checks: MatchChecks { injective: true, dim_law: found == expected, stabilizer_law: z == s && s == both },
    })
}

/// Dimension data of the two-step argument for one orbit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoStepCheck {
    pub orbit: usize,
    pub target_dim: usize,
    pub dim_g_minus_two: usize,
    pub orbit_dim: usize,
    pub dim_law: bool,
    pub dim_flag_variety: usize,
    /// `dim ker(ad x : 𝔤(1) → 𝔤(0))`.
    pub conormal_kernel: usize,
    /// `dim(𝔰 ∩ Ad(exp x)𝔲)` computed directly.
    pub conormal_direct: usize,
    pub conormal_identity: bool,
    /// `dim ker(ad x : 𝔤(−1) → 𝔤(−2))`.
    pub literal_kernel: usize,
    pub literal_identity: bool,
}

/// Conormal and dimension checks for `ε′` at the canonical representative.
pub fn two_step_check(em: &EpsilonMap, targets: &Targets, orbits: &[LOrbit], index: usize) -> Result<TwoStepCheck, EpsError> {
    if em.mode != EpsMode::TwoStep {
        return Err(EpsError::ModeMismatch);
    }
    let b = em.blocks();
    let n = b.n();
    let o = &orbits[index];
    let x = o.rep();
    let (_, target_dim) = targets.locate(&em.epsilon(&x)?)?;
    let g2 = em.grading.dim(-2);
    let dim_p = (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).filter(|&(r, c)| b.diag[r] < b.diag[c]).count();
    let conormal_kernel = degree_space(b, 1).centralizer_dim(&x);
    let literal_kernel = degree_space(b, -1).centralizer_dim(&x);
    // 𝔰 ∩ Ad(g)𝔲 with g = exp(x): unknowns y ∈ 𝔲, conditions (g y g⁻¹)_{ab} = 0
    // on same-parity entries.
    let gx = RatMatrix::from_int(&x).exp_nilpotent().scaled_integer();
    let neg = {
        let mut m = x.clone();
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, -x.get(r, c));
            }
        }
        m
    };
    let ginv = RatMatrix::from_int(&neg).exp_nilpotent().scaled_integer();
    let u = EntrySpace::filtered(n, |r, c| b.diag[r] > b.diag[c]);
    let mut rows = Vec::new();
    for a in 0..n {
        for bb in 0..n {
            if (b.diag[a] - b.diag[bb]) % 2 != 0 {
                continue;
            }
            let row: Vec<i64> = u.entries.iter().map(|&(r, c)| gx.get(a, r) * ginv.get(c, bb)).collect();
            if row.iter().any(|&v| v != 0) {
                rows.push(row);
            }
        }
    }
    let conormal_direct = u.solution_dim(&rows);
    Ok(TwoStepCheck {
        orbit: index,
        target_dim,
        dim_g_minus_two: g2,
        orbit_dim: o.dimension,
        dim_law: target_dim == g2 + o.dimension,
        dim_flag_variety: dim_p,
        conormal_kernel,
        conormal_direct,
        conormal_identity: dim_p == target_dim + conormal_kernel && conormal_direct == conormal_kernel,
        literal_kernel,
        literal_identity: dim_p == target_dim + literal_kernel,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchReport {
    pub ordering_id: Vec<usize>,
    pub base_dim: usize,
    pub matches: Vec<OrbitMatch>,
    pub failures: Vec<String>,
    pub injective: bool,
    pub dim_law: bool,
    pub stabilizer_law: bool,
    pub two_step: Vec<TwoStepCheck>,
}

impl MatchReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
            && self.injective
            && self.dim_law
            && self.stabilizer_law
            && self.two_step.iter().all(|t| t.dim_law && t.conormal_identity)
    }

    /// Matched orbit of a target, if any.
    pub fn phi(&self, target: usize) -> Result<usize, EpsError> {
        phi(&self.matches, target)
    }
}

/// Runs every orbit through the matching; failures are recorded, not raised.
pub fn verify_matching(em: &EpsilonMap, targets: &Targets, orbits: &[LOrbit], seed: u64) -> Result<MatchReport, EpsError> {
    let base = base_dim(em, targets)?;
    let mut matches = Vec::new();
    let mut failures = Vec::new();
    for i in 0..orbits.len() {
        match match_orbit(em, targets, orbits, i, seed) {
            Ok(m) => matches.push(m),
            Err(e) => failures.push(format!("orbit {i}: {e}")),
        }
    }
    let mut injective = true;
    for a in 0..matches.len() {
        for b in a + 1..matches.len() {
            if matches[a].target == matches[b].target {
                injective = false;
                matches[a].checks.injective = false;
                matches[b].checks.injective = false;
                failures.push(format!("orbits {} and {} share a target", matches[a].orbit, matches[b].orbit));
            }
        }
    }
    let dim_law = matches.iter().all(|m| m.checks.dim_law);
    let stabilizer_law = matches.iter().all(|m| m.checks.stabilizer_law);
    let mut two_step = Vec::new();
    if em.mode == EpsMode::TwoStep && matches!(targets, Targets::K(_)) {
        for i in 0..orbits.len() {
            two_step.push(two_step_check(em, targets, orbits, i)?);
        }
    }
    Ok(MatchReport {
        ordering_id: em.ordering.clone(),
        base_dim: base,
        matches,
        failures,
        injective,
        dim_law,
        stabilizer_law,
        two_step,
    })
}

/// Inverse of the matching on supports: the orbit matched to `target`.
pub fn phi(matches: &[OrbitMatch], target: usize) -> Result<usize, EpsError> {
    matches.iter().find(|m| m.target == target).map(|m| m.orbit).ok_or(EpsError::NotInY(target))
}

/// All permutations of `0..l`, in lexicographic order.
pub fn all_orderings(l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..l).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (0..l.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..l).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
}
