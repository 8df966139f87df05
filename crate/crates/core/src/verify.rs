//! End-to-end comparison of the two polynomial families on matched orbits,
//! and the sweep over all GL gradings of bounded size.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::{Cache, CacheError, CacheStats};
use crate::epsmap::{all_orderings, verify_matching, EpsError, EpsMode, EpsilonMap, MatchReport, TargetGroup, Targets};
use crate::klengine::{padic_table, KLEngine, KLError, KLTable};
use crate::klvengine::{build_block, klv_polynomials, partial_flag_polynomial, Func, KLVError, KLVTable};
use crate::lorbits::{closure_leq, enumerate_l_orbits, LOrbit, LOrbitError};
use crate::perm::Perm;
use crate::poly::Poly;
use crate::porbit::double_coset_max;
use crate::rootdata::{minimal_parabolic_family, Grading, HypothesisStatus, ParabolicFamily};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Largest family for which `all` runs every ordering.
pub const MAX_ALL_ORDERINGS: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("verification needs a GL grading")]
    UnsupportedType,
    #[error("parabolic family has status {0}")]
    InvalidFamily(String),
    #[error("ordering {0:?} is not a permutation of the family")]
    BadOrdering(Vec<usize>),
    #[error(transparent)]
    LOrbit(#[from] LOrbitError),
    #[error(transparent)]
    Eps(#[from] EpsError),
    #[error(transparent)]
    KL(#[from] KLError),
    #[error(transparent)]
    KLV(#[from] KLVError),
    #[error(transparent)]
    Cache(#[from] CacheError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderingChoice {
    Default,
    All,
    /// Positions in the default family.
    Explicit(Vec<usize>),
}

impl FromStr for OrderingChoice {
    type Err = String;

    /// `default`, `all`, or a 1-based comma-separated permutation.
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "default" | "" => Ok(OrderingChoice::Default),
            "all" => Ok(OrderingChoice::All),
            t => t
                .split(',')
                .map(|x| x.trim().parse::<usize>().ok().and_then(|v| v.checked_sub(1)).ok_or_else(|| format!("bad ordering entry {x:?}")))
                .collect::<Result<Vec<_>, _>>()
                .map(OrderingChoice::Explicit),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub ordering: OrderingChoice,
    pub group: TargetGroup,
    pub mode: EpsMode,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { ordering: OrderingChoice::Default, group: TargetGroup::K, mode: EpsMode::Truncated, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    /// Simple roots (0-based) of the Levi.
    pub simple: Vec<usize>,
    pub added: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradingSummary {
    pub key: String,
    pub lambda: Vec<i64>,
    pub diag: Option<Vec<i64>>,
    pub eigenspace_dims: BTreeMap<i64, usize>,
    pub dim_g: usize,
    pub dim_k: usize,
    /// `(p, q)` with `K = GL(p)×GL(q)`, for GL gradings.
    pub k_signature: Option<(usize, usize)>,
    pub family: Vec<FamilyMember>,
    pub status: HypothesisStatus,
}

pub fn summarize(g: &Grading) -> (GradingSummary, ParabolicFamily) {
    let fam = minimal_parabolic_family(g);
    let added = fam.added_nodes(g);
    let family = fam.members.iter().zip(added).map(|(m, a)| FamilyMember { simple: m.simple.clone(), added: a }).collect();
    let mut eigenspace_dims = BTreeMap::new();
    let top = g.max_eigenvalue();
    for i in -top..=top {
        eigenspace_dims.insert(i, g.dim(i));
    }
    let s = GradingSummary {
        key: g.key(),
        lambda: g.lambda.clone(),
        diag: g.gl_blocks().map(|b| b.diag.clone()),
        eigenspace_dims,
        dim_g: g.dim_g(),
        dim_k: g.dim_k(),
        k_signature: g.gl_blocks().map(|b| b.signature()),
        family,
        status: fam.status.clone(),
    };
    (s, fam)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairComparison {
    pub psi: usize,
    pub gamma: usize,
    pub comparable: bool,
    pub padic: Poly,
    pub real: Poly,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingRun {
    pub ordering: Vec<usize>,
    pub matching: MatchReport,
    pub pairs: Vec<PairComparison>,
    pub all_equal: bool,
    pub multiplicity_equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub grading: GradingSummary,
    pub group: TargetGroup,
    pub mode: EpsMode,
    pub orbit_ranks: Vec<Vec<usize>>,
    pub orbit_dims: Vec<usize>,
    pub runs: Vec<OrderingRun>,
    pub orderings_truncated: bool,
    pub all_equal: bool,
    pub matching_pass: bool,
    pub witness: Option<String>,
    pub elapsed_ms: u64,
    pub cache: CacheStats,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.all_equal && self.matching_pass
    }

    /// JSON without the timing field, for determinism comparisons.
    pub fn stable_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(o) = v.as_object_mut() {
            o.remove("elapsed_ms");
            o.remove("cache");
        }
        v
    }
}

/// Full-flag KLV table for `GL(p)×GL(q)`, through the cache.
pub fn klv_table(cache: &Cache, p: usize, q: usize) -> Result<KLVTable, VerifyError> {
    let key = format!("{p},{q}|{}", crate::klengine::CONVENTION);
    let ic: Vec<Vec<(usize, Poly)>> = cache.get_or_compute("klv", &key, || -> Result<_, VerifyError> {
        let t = klv_polynomials(build_block(p, q), true)?;
        Ok(t.ic.iter().map(|f| f.iter().map(|(k, v)| (*k, v.clone())).collect()).collect())
    })?;
    Ok(KLVTable { block: build_block(p, q), ic: ic.into_iter().map(|f| f.into_iter().collect::<Func>()).collect() })
}

/// p-adic table of the L-orbits, through the cache.
pub fn cached_padic_table(cache: &Cache, em: &EpsilonMap, orbits: &[LOrbit]) -> Result<KLTable, VerifyError> {
    let key = format!("{}|{}", em.grading.key(), crate::klengine::CONVENTION);
    cache.get_or_compute("kl", &key, || -> Result<_, VerifyError> { Ok(padic_table(em, orbits)?) })
}

fn check_ordering(ord: &[usize], l: usize) -> Result<(), VerifyError> {
    let mut s = ord.to_vec();
    s.sort_unstable();
    if s != (0..l).collect::<Vec<_>>() {
        return Err(VerifyError::BadOrdering(ord.to_vec()));
    }
    Ok(())
}

enum RealSide {
    K(KLVTable),
    P { engine: KLEngine, maxima: Vec<Perm> },
}

impl RealSide {
    fn poly(&self, targets: &Targets, a: usize, b: usize) -> Result<Poly, VerifyError> {
        Ok(match (self, targets) {
            (RealSide::K(t), Targets::K(set)) => partial_flag_polynomial(t, set, a, b)?,
            (RealSide::P { engine, maxima }, Targets::P { .. }) => {
                engine.poly(&crate::klengine::PermParam::plain(maxima[a].clone()), &crate::klengine::PermParam::plain(maxima[b].clone()))?
            }
            _ => unreachable!("real side built for the target group"),
        })
    }
}

pub fn verify(g: &Grading, opts: &VerifyOptions, cache: &Cache) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let b = g.gl_blocks().ok_or(VerifyError::UnsupportedType)?.clone();
    let (summary, fam) = summarize(g);
    if !fam.status.is_valid() {
        return Err(VerifyError::InvalidFamily(fam.status.label().to_string()));
    }
    let orbits = enumerate_l_orbits(g)?;
    let default_em = EpsilonMap::default(g, &fam, EpsMode::Truncated)?;
    let padic = cached_padic_table(cache, &default_em, &orbits)?;
    let l = fam.len();
    let (orderings, truncated) = match &opts.ordering {
        OrderingChoice::Default => (vec![(0..l).collect()], false),
        OrderingChoice::All if l <= MAX_ALL_ORDERINGS => (all_orderings(l), false),
        OrderingChoice::All => (vec![(0..l).collect()], true),
        OrderingChoice::Explicit(o) => {
            check_ordering(o, l)?;
            (vec![o.clone()], false)
        }
    };
    let targets = Targets::build(&default_em, opts.group)?;
    let real = match &targets {
        Targets::K(_) => {
            let (p, q) = b.signature();
            RealSide::K(klv_table(cache, p, q)?)
        }
        Targets::P { sizes, tables } => RealSide::P {
            engine: KLEngine::ordinary(b.n()),
            maxima: tables.iter().map(|t| double_coset_max(&t.representative(sizes), sizes)).collect(),
        },
    };
    let mut runs = Vec::new();
    let mut witness = None;
    for ord in orderings {
        let em = EpsilonMap::new(g, &fam, &ord, opts.mode)?;
        let matching = verify_matching(&em, &targets, &orbits, opts.seed)?;
        if witness.is_none() && !matching.all_pass() {
            witness = Some(format!("ordering {ord:?}: {}", serde_json::to_string(&matching.failures).unwrap_or_default()));
        }
        let target_of: Vec<Option<usize>> =
            (0..orbits.len()).map(|i| matching.matches.iter().find(|m| m.orbit == i).map(|m| m.target)).collect();
        let mut pairs = Vec::new();
        let mut all_equal = true;
        for i in 0..orbits.len() {
            for j in 0..orbits.len() {
                let comparable = closure_leq(&orbits[i], &orbits[j])?;
                let pa = padic.get(i, j);
                let (Some(ti), Some(tj)) = (target_of[i], target_of[j]) else {
                    all_equal = false;
                    continue;
                };
                let pr = real.poly(&targets, ti, tj)?;
                if pa.is_zero() && pr.is_zero() {
                    continue;
                }
                let equal = pa == pr;
                if !equal {
                    all_equal = false;
                    if witness.is_none() {
                        witness = Some(format!("ordering {ord:?}: orbits ({i}, {j}) p-adic {pa} real {pr}"));
                    }
                }
                pairs.push(PairComparison { psi: i, gamma: j, comparable, padic: pa, real: pr, equal });
            }
        }
        let multiplicity_equal = all_equal
            && pairs.iter().all(|p| p.padic.eval_at_one() == p.real.eval_at_one());
        runs.push(OrderingRun { ordering: ord, matching, pairs, all_equal, multiplicity_equal });
    }
    let all_equal = runs.iter().all(|r| r.all_equal);
    let matching_pass = runs.iter().all(|r| r.matching.all_pass());
    Ok(VerificationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        grading: summary,
        group: opts.group,
        mode: opts.mode,
        orbit_ranks: orbits.iter().map(|o| o.triangle.ranks.clone()).collect(),
        orbit_dims: orbits.iter().map(|o| o.dimension).collect(),
        runs,
        orderings_truncated: truncated,
        all_equal,
        matching_pass,
        witness,
        elapsed_ms: start.elapsed().as_millis() as u64,
        cache: cache.stats(),
    })
}

/// Diagonals of every GL(n) grading up to equivalence: block sizes form a
/// composition of `n` and gaps between block values lie in `{1, 2, 3}`.
pub fn sweep_gradings(n: usize) -> Vec<Vec<i64>> {
    fn comps(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        (1..=n)
            .flat_map(|f| {
                comps(n - f).into_iter().map(move |mut c| {
                    c.insert(0, f);
                    c
                })
            })
            .collect()
    }
    let mut out = Vec::new();
    for c in comps(n).into_iter().filter(|c| c.len() > 1) {
        let k = c.len();
        let mut gaps = vec![1i64; k - 1];
        loop {
            let mut vals = vec![0i64; k];
            for j in (0..k - 1).rev() {
                vals[j] = vals[j + 1] + gaps[j];
            }
            out.push(c.iter().zip(&vals).flat_map(|(&m, &v)| std::iter::repeat_n(v, m)).collect());
            let Some(i) = gaps.iter().position(|&g| g < 3) else { break };
            for g in gaps.iter_mut().take(i) {
                *g = 1;
            }
            gaps[i] += 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepCase {
    pub diag: Vec<i64>,
    pub nontrivial: bool,
    pub orderings: usize,
    pub passed: bool,
    pub all_equal: bool,
    pub matching_pass: bool,
    /// `budget` or `mode` when the case was not run.
    pub skipped: Option<String>,
    pub error: Option<String>,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub max_n: usize,
    pub group: TargetGroup,
    pub mode: EpsMode,
    pub total: usize,
    pub nontrivial: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub budget_exhausted: bool,
    pub cases: Vec<SweepCase>,
    pub elapsed_ms: u64,
}

impl SweepSummary {
    pub fn all_pass(&self) -> bool {
        self.failed == 0 && !self.budget_exhausted
    }
}

/// Runs `verify` with every ordering on every grading with `2 ≤ n ≤ max_n`.
/// Two-step mode skips gradings with `𝔤(±3) ≠ 0`.
pub fn sweep(max_n: usize, group: TargetGroup, mode: EpsMode, budget: Option<Duration>, seed: u64, cache: &Cache) -> SweepSummary {
    let start = Instant::now();
    let diags: Vec<Vec<i64>> = (2..=max_n).flat_map(sweep_gradings).collect();
    let cases: Vec<SweepCase> = diags
        .par_iter()
        .map(|d| {
            let g = Grading::gl_ints(d).expect("sweep diagonals are valid");
            let nontrivial = g.dim(-1) > 0;
            let mut case = SweepCase {
                diag: d.clone(),
                nontrivial,
                orderings: 0,
                passed: false,
                all_equal: false,
                matching_pass: false,
                skipped: None,
                error: None,
                witness: None,
            };
            if mode == EpsMode::TwoStep && g.max_eigenvalue() > 2 {
                case.skipped = Some("mode".into());
                return case;
            }
            if budget.is_some_and(|b| start.elapsed() > b) {
                case.skipped = Some("budget".into());
                return case;
            }
            let opts = VerifyOptions { ordering: OrderingChoice::All, group, mode, seed };
            match verify(&g, &opts, cache) {
                Ok(r) => {
                    case.orderings = r.runs.len();
                    case.all_equal = r.all_equal;
                    case.matching_pass = r.matching_pass;
                    case.passed = r.passed();
                    case.witness = r.witness;
                }
                Err(e) => case.error = Some(e.to_string()),
            }
            case
        })
        .collect();
    let budget_exhausted = cases.iter().any(|c| c.skipped.as_deref() == Some("budget"));
    let skipped = cases.iter().filter(|c| c.skipped.is_some()).count();
    SweepSummary {
        max_n,
        group,
        mode,
        total: cases.len(),
        nontrivial: cases.iter().filter(|c| c.nontrivial).count(),
        passed: cases.iter().filter(|c| c.passed).count(),
        failed: cases.iter().filter(|c| c.skipped.is_none() && !c.passed).count(),
        skipped,
        budget_exhausted,
        cases,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}
