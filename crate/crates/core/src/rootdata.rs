//! Root systems in simple-root coordinates, integral gradings by a coweight,
//! and parabolic families above the grading parabolic.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootDataError {
    #[error("unsupported Cartan type {0}")]
    InvalidType(String),
    #[error("coweight pairing {0} is not an integer")]
    NonIntegral(String),
    #[error("coweight pairing {0} is negative on a simple root")]
    NonDominant(String),
    #[error("coweight has {got} entries, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("cannot parse coweight entry {0:?}")]
    Parse(String),
    #[error("family does not belong to this grading")]
    MismatchedGrading,
    #[error("member {0} does not properly contain the grading parabolic")]
    NotProper(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CartanType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CartanType::A => "A",
            CartanType::B => "B",
            CartanType::C => "C",
            CartanType::D => "D",
            CartanType::E => "E",
            CartanType::F => "F",
            CartanType::G => "G",
        };
        f.write_str(s)
    }
}

impl FromStr for CartanType {
    type Err = RootDataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(CartanType::A),
            "B" => Ok(CartanType::B),
            "C" => Ok(CartanType::C),
            "D" => Ok(CartanType::D),
            "E" => Ok(CartanType::E),
            "F" => Ok(CartanType::F),
            "G" => Ok(CartanType::G),
            _ => Err(RootDataError::InvalidType(s.to_string())),
        }
    }
}

/// Integer symmetrized Gram matrix of the simple roots, Bourbaki numbering.
fn gram_matrix(t: CartanType, n: usize) -> Result<Vec<Vec<i64>>, RootDataError> {
    let bad = || RootDataError::InvalidType(format!("{t}{n}"));
    let valid = match t {
        CartanType::A => n >= 1,
        CartanType::B | CartanType::C => n >= 2,
        CartanType::D => n >= 4,
        CartanType::E => (6..=8).contains(&n),
        CartanType::F => n == 4,
        CartanType::G => n == 2,
    };
    if !valid {
        return Err(bad());
    }
    let mut g = vec![vec![0i64; n]; n];
    let link = |g: &mut Vec<Vec<i64>>, i: usize, j: usize, v: i64| {
        g[i][j] = v;
        g[j][i] = v;
    };
    match t {
        CartanType::A | CartanType::B | CartanType::C | CartanType::D => {
            for i in 0..n {
                g[i][i] = 2;
            }
            let chain_end = if t == CartanType::D { n - 2 } else { n - 1 };
            for i in 0..chain_end {
                link(&mut g, i, i + 1, -1);
            }
            match t {
                CartanType::B => g[n - 1][n - 1] = 1,
                CartanType::C => {
                    g[n - 1][n - 1] = 4;
                    link(&mut g, n - 2, n - 1, -2);
                }
                CartanType::D => link(&mut g, n - 3, n - 1, -1),
                _ => {}
            }
        }
        CartanType::E => {
            for i in 0..n {
                g[i][i] = 2;
            }
            link(&mut g, 0, 2, -1);
            link(&mut g, 1, 3, -1);
            for i in 2..n - 1 {
                link(&mut g, i, i + 1, -1);
            }
        }
        CartanType::F => {
            g[0][0] = 4;
            g[1][1] = 4;
            g[2][2] = 2;
            g[3][3] = 2;
            link(&mut g, 0, 1, -2);
            link(&mut g, 1, 2, -2);
            link(&mut g, 2, 3, -1);
        }
        CartanType::G => {
            g[0][0] = 2;
            g[1][1] = 6;
            link(&mut g, 0, 1, -3);
        }
    }
    Ok(g)
}

/// A reduced root system. Roots are integer coordinate vectors in the basis
/// of simple roots: the positive roots come first, sorted by height and then
/// lexicographically (so the first `rank` are the simple roots), followed by
/// their negatives in the same order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystem {
    pub cartan_type: CartanType,
    pub rank: usize,
    gram: Vec<Vec<i64>>,
    roots: Vec<Vec<i64>>,
    #[serde(skip)]
    index: HashMap<Vec<i64>, usize>,
}

impl RootSystem {
    pub fn build(t: CartanType, rank: usize) -> Result<Self, RootDataError> {
        let gram = gram_matrix(t, rank)?;
        let n = rank;
        let simple: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut v = vec![0; n];
                v[i] = 1;
                v
            })
            .collect();
        // Root strings: β + α_i is a root iff p − ⟨β, α_i∨⟩ > 0, where p is
        // the largest k with β − kα_i a root.
        let mut pos: Vec<Vec<i64>> = simple.clone();
        let mut seen: HashMap<Vec<i64>, ()> = pos.iter().map(|r| (r.clone(), ())).collect();
        let mut queue: VecDeque<Vec<i64>> = pos.iter().cloned().collect();
        while let Some(beta) = queue.pop_front() {
            for i in 0..n {
                let pair: i64 = (0..n).map(|j| beta[j] * gram[j][i]).sum();
                let cartan = 2 * pair / gram[i][i];
                let mut p = 0;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    if seen.contains_key(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                if p - cartan > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if !seen.contains_key(&up) {
                        seen.insert(up.clone(), ());
                        pos.push(up.clone());
                        queue.push_back(up);
                    }
                }
            }
        }
        pos.sort_by(|a, b| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let mut roots = pos.clone();
        roots.extend(pos.iter().map(|r| r.iter().map(|c| -c).collect::<Vec<_>>()));
        let index = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        Ok(RootSystem { cartan_type: t, rank, gram, roots, index })
    }

    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }

    pub fn root(&self, i: usize) -> &[i64] {
        &self.roots[i]
    }

    pub fn is_positive(&self, i: usize) -> bool {
        i < self.num_positive()
    }

    pub fn simple_roots(&self) -> std::ops::Range<usize> {
        0..self.rank
    }

    pub fn negative_of(&self, i: usize) -> usize {
        let h = self.num_positive();
        if i < h {
            i + h
        } else {
            i - h
        }
    }

    pub fn index_of(&self, coords: &[i64]) -> Option<usize> {
        if self.index.is_empty() {
            return self.roots.iter().position(|r| r == coords);
        }
        self.index.get(coords).copied()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn inner(&self, a: &[i64], b: &[i64]) -> i64 {
        let n = self.rank;
        let mut s = 0;
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += a[i] * self.gram[i][j] * b[j];
            }
        }
        s
    }

    /// Coordinates of the coroot of root `i` in the basis of simple coroots.
    pub fn coroot(&self, i: usize) -> Vec<i64> {
        let r = &self.roots[i];
        let len = self.inner(r, r);
        (0..self.rank)
            .map(|k| {
                let num = r[k] * self.gram[k][k];
                assert_eq!(num % len, 0);
                num / len
            })
            .collect()
    }

    /// Simple roots adjacent to `i` in the Dynkin diagram.
    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        (0..self.rank).filter(|&j| j != i && self.gram[i][j] != 0).collect()
    }

    /// Nodes where a classical diagram ends in a non-type-A piece.
    pub fn tail_nodes(&self) -> Vec<usize> {
        let n = self.rank;
        match self.cartan_type {
            CartanType::B | CartanType::C => vec![n - 1],
            CartanType::D => vec![n - 2, n - 1],
            _ => Vec::new(),
        }
    }

    /// Support of root `i`: simple roots with nonzero coefficient.
    pub fn support(&self, i: usize) -> Vec<usize> {
        self.roots[i].iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, _)| k).collect()
    }
}

/// Block data of a GL(n) coweight `diag(a_1^{n_1}, …, a_k^{n_k})`, shifted
/// so that `a_k = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlBlocks {
    pub diag: Vec<i64>,
    pub values: Vec<i64>,
    pub sizes: Vec<usize>,
}

impl GlBlocks {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// First coordinate (0-based) of block `j`.
    pub fn offset(&self, j: usize) -> usize {
        self.sizes[..j].iter().sum()
    }

    /// Boundaries `j` (between blocks `j` and `j+1`) with `a_j − a_{j+1} = 1`.
    pub fn s_set(&self) -> Vec<usize> {
        (0..self.values.len().saturating_sub(1)).filter(|&j| self.values[j] - self.values[j + 1] == 1).collect()
    }

    /// `(p, q)`: the number of even and odd diagonal entries.
    pub fn signature(&self) -> (usize, usize) {
        let p = self.diag.iter().filter(|d| *d % 2 == 0).count();
        (p, self.n() - p)
    }

    /// Coordinates spanning `V₊` (even entries) and `V₋` (odd entries).
    pub fn parity_split(&self) -> (Vec<usize>, Vec<usize>) {
        let even = (0..self.n()).filter(|&i| self.diag[i] % 2 == 0).collect();
        let odd = (0..self.n()).filter(|&i| self.diag[i] % 2 != 0).collect();
        (even, odd)
    }

    /// Block index of each coordinate.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n());
        for (j, &s) in self.sizes.iter().enumerate() {
            out.extend(std::iter::repeat_n(j, s));
        }
        out
    }

    /// Simple root (0-based, type A) at boundary `j`.
    pub fn boundary_node(&self, j: usize) -> usize {
        self.offset(j + 1) - 1
    }
}

/// The eigenspace decomposition of a Lie algebra under `ad(λ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading {
    pub root_system: RootSystem,
    /// `⟨α_i, λ⟩` for each simple root.
    pub lambda: Vec<i64>,
    pub gl: Option<GlBlocks>,
    eigenvalues: Vec<i64>,
}

pub fn parse_rational(s: &str) -> Result<BigRational, RootDataError> {
    let t = s.trim();
    if let Ok(r) = t.parse::<BigRational>() {
        return Ok(r);
    }
    // Accept decimal forms like 0.5 as well.
    if let Some((a, b)) = t.split_once('.') {
        let neg = a.starts_with('-');
        let digits = format!("{}{}", a.trim_start_matches('-'), b);
        let num: BigInt = digits.parse().map_err(|_| RootDataError::Parse(s.to_string()))?;
        let den = num_traits::pow(BigInt::from(10), b.len());
        let r = BigRational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    Err(RootDataError::Parse(s.to_string()))
}

pub fn parse_lambda(s: &str) -> Result<Vec<BigRational>, RootDataError> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_rational).collect()
}

fn to_int(r: &BigRational) -> Result<i64, RootDataError> {
    if !r.is_integer() {
        return Err(RootDataError::NonIntegral(r.to_string()));
    }
    r.to_integer().to_i64().ok_or_else(|| RootDataError::NonIntegral(r.to_string()))
}

impl Grading {
    /// `lambda[i] = ⟨α_i, λ⟩` on the simple roots.
    pub fn new(rs: RootSystem, lambda: &[BigRational]) -> Result<Self, RootDataError> {
        if lambda.len() != rs.rank {
            return Err(RootDataError::WrongLength { expected: rs.rank, got: lambda.len() });
        }
        let ints = lambda.iter().map(to_int).collect::<Result<Vec<_>, _>>()?;
        Self::from_pairings(rs, ints, None)
    }

    pub fn from_ints(rs: RootSystem, lambda: &[i64]) -> Result<Self, RootDataError> {
        if lambda.len() != rs.rank {
            return Err(RootDataError::WrongLength { expected: rs.rank, got: lambda.len() });
        }
        Self::from_pairings(rs, lambda.to_vec(), None)
    }

    /// GL(n) with `λ` given by its diagonal entries.
    pub fn gl(diag: &[BigRational]) -> Result<Self, RootDataError> {
        let n = diag.len();
        if n == 0 {
            return Err(RootDataError::InvalidType("GL0".into()));
        }
        let min = diag.iter().min().unwrap().clone();
        let shifted = diag.iter().map(|d| to_int(&(d - &min))).collect::<Result<Vec<_>, _>>()?;
        Self::gl_ints(&shifted)
    }

    pub fn gl_ints(diag: &[i64]) -> Result<Self, RootDataError> {
        let n = diag.len();
        if n == 0 {
            return Err(RootDataError::InvalidType("GL0".into()));
        }
        let min = *diag.iter().min().unwrap();
        let diag: Vec<i64> = diag.iter().map(|d| d - min).collect();
        let mut values = Vec::new();
        let mut sizes = Vec::new();
        for &d in &diag {
            if values.last() == Some(&d) {
                *sizes.last_mut().unwrap() += 1;
            } else {
                values.push(d);
                sizes.push(1);
            }
        }
        let pairings: Vec<i64> = (0..n.saturating_sub(1)).map(|i| diag[i] - diag[i + 1]).collect();
        if n == 1 {
            // GL(1): no roots; represent by an empty type-A system.
            let rs = RootSystem {
                cartan_type: CartanType::A,
                rank: 0,
                gram: Vec::new(),
                roots: Vec::new(),
                index: HashMap::new(),
            };
            return Ok(Grading {
                root_system: rs,
                lambda: Vec::new(),
                gl: Some(GlBlocks { diag, values, sizes }),
                eigenvalues: Vec::new(),
            });
        }
        let rs = RootSystem::build(CartanType::A, n - 1)?;
        Self::from_pairings(rs, pairings, Some(GlBlocks { diag, values, sizes }))
    }

    fn from_pairings(rs: RootSystem, lambda: Vec<i64>, gl: Option<GlBlocks>) -> Result<Self, RootDataError> {
        if let Some(&bad) = lambda.iter().find(|&&v| v < 0) {
            return Err(RootDataError::NonDominant(bad.to_string()));
        }
        let eigenvalues = rs.roots().iter().map(|r| r.iter().zip(&lambda).map(|(c, l)| c * l).sum()).collect();
        Ok(Grading { root_system: rs, lambda, gl, eigenvalues })
    }

    pub fn rs(&self) -> &RootSystem {
        &self.root_system
    }

    pub fn gl_blocks(&self) -> Option<&GlBlocks> {
        self.gl.as_ref()
    }

    /// Stable identifier used to tie families and caches to a grading.
    pub fn key(&self) -> String {
        match &self.gl {
            Some(b) => format!("GL{}:{:?}", b.n(), b.diag),
            None => format!("{}{}:{:?}", self.root_system.cartan_type, self.root_system.rank, self.lambda),
        }
    }

    pub fn eigenvalue(&self, root: usize) -> i64 {
        self.eigenvalues[root]
    }

    /// Roots with `⟨α, λ⟩ = i`.
    pub fn eigenspace(&self, i: i64) -> Vec<usize> {
        (0..self.eigenvalues.len()).filter(|&r| self.eigenvalues[r] == i).collect()
    }

    pub fn eigenspaces(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut m: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (r, &e) in self.eigenvalues.iter().enumerate() {
            m.entry(e).or_default().push(r);
        }
        m
    }

    pub fn levi_roots(&self) -> Vec<usize> {
        self.eigenspace(0)
    }

    pub fn u_roots(&self) -> Vec<usize> {
        (0..self.eigenvalues.len()).filter(|&r| self.eigenvalues[r] > 0).collect()
    }

    pub fn ubar_roots(&self) -> Vec<usize> {
        (0..self.eigenvalues.len()).filter(|&r| self.eigenvalues[r] < 0).collect()
    }

    /// Roots of `𝔨 = ⊕ 𝔤(2i)`.
    pub fn k_parity(&self) -> Vec<usize> {
        (0..self.eigenvalues.len()).filter(|&r| self.eigenvalues[r] % 2 == 0).collect()
    }

    /// Dimension of a Cartan subalgebra (`n` for GL(n)).
    pub fn torus_dim(&self) -> usize {
        match &self.gl {
            Some(b) => b.n(),
            None => self.root_system.rank,
        }
    }

    pub fn dim(&self, i: i64) -> usize {
        self.eigenspace(i).len() + if i == 0 { self.torus_dim() } else { 0 }
    }

    pub fn max_eigenvalue(&self) -> i64 {
        self.eigenvalues.iter().copied().max().unwrap_or(0)
    }

    pub fn dim_k(&self) -> usize {
        self.k_parity().len() + self.torus_dim()
    }

    pub fn dim_g(&self) -> usize {
        self.eigenvalues.len() + self.torus_dim()
    }

    /// Simple roots with `⟨α_i, λ⟩ = 0`.
    pub fn j0(&self) -> Vec<usize> {
        (0..self.lambda.len()).filter(|&i| self.lambda[i] == 0).collect()
    }
}

/// A standard parabolic subalgebra, given by the simple roots of its Levi.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Parabolic {
    pub simple: Vec<usize>,
    pub levi_roots: Vec<usize>,
    pub nilradical_roots: Vec<usize>,
}

impl Parabolic {
    pub fn from_simple(rs: &RootSystem, simple: &[usize]) -> Self {
        let mut simple = simple.to_vec();
        simple.sort_unstable();
        simple.dedup();
        let inside = |r: usize| rs.root(r).iter().enumerate().all(|(k, &c)| c == 0 || simple.contains(&k));
        let levi_roots = (0..rs.num_roots()).filter(|&r| inside(r)).collect();
        let nilradical_roots = (0..rs.num_positive()).filter(|&r| !inside(r)).collect();
        Parabolic { simple, levi_roots, nilradical_roots }
    }

    /// Levi roots lying in `ū`.
    pub fn levi_ubar(&self, g: &Grading) -> Vec<usize> {
        self.levi_roots.iter().copied().filter(|&r| g.eigenvalue(r) < 0).collect()
    }

    /// Contains `other` (as root sets).
    pub fn contains(&self, other: &Parabolic) -> bool {
        other.simple.iter().all(|s| self.simple.contains(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum HypothesisStatus {
    Valid,
    /// Members whose Levi misses `𝔤(−1)`.
    FailsKey0 { members: Vec<usize> },
    /// Roots of `𝔤(−1)` not covered, covered twice, and roots of `ū` outside
    /// `𝔤(−1)` picked up by some Levi.
    FailsKey { uncovered: Vec<usize>, doubly_covered: Vec<usize>, outside: Vec<usize> },
    NoFamilyExists,
}

impl HypothesisStatus {
    pub fn is_valid(&self) -> bool {
        matches!(self, HypothesisStatus::Valid)
    }

    pub fn label(&self) -> &'static str {
        match self {
            HypothesisStatus::Valid => "Valid",
            HypothesisStatus::FailsKey0 { .. } => "FailsKey0",
            HypothesisStatus::FailsKey { .. } => "FailsKey",
            HypothesisStatus::NoFamilyExists => "NoFamilyExists",
        }
    }
}

/// An ordered family of parabolics above the grading parabolic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicFamily {
    pub members: Vec<Parabolic>,
    pub status: HypothesisStatus,
    pub grading_key: String,
}

impl ParabolicFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The family with members listed in the order `order[0], order[1], …`.
    pub fn reordered(&self, order: &[usize]) -> ParabolicFamily {
        assert_eq!(order.len(), self.members.len());
        let mut seen = vec![false; order.len()];
        for &i in order {
            assert!(!seen[i], "not a permutation");
            seen[i] = true;
        }
        ParabolicFamily {
            members: order.iter().map(|&i| self.members[i].clone()).collect(),
            status: self.status.clone(),
            grading_key: self.grading_key.clone(),
        }
    }

    /// For each member, the simple roots it adds to the grading Levi.
    pub fn added_nodes(&self, g: &Grading) -> Vec<Vec<usize>> {
        let j0 = g.j0();
        self.members.iter().map(|m| m.simple.iter().copied().filter(|s| !j0.contains(s)).collect()).collect()
    }
}

/// Checks both hypotheses on root sets.
pub fn check_hypotheses(g: &Grading, fam: &ParabolicFamily) -> Result<HypothesisStatus, RootDataError> {
    if fam.grading_key != g.key() {
        return Err(RootDataError::MismatchedGrading);
    }
    let base = Parabolic::from_simple(g.rs(), &g.j0());
    for (i, m) in fam.members.iter().enumerate() {
        if !m.contains(&base) || m.simple.len() == base.simple.len() {
            return Err(RootDataError::NotProper(i));
        }
    }
    Ok(status_of(g, &fam.members))
}

fn status_of(g: &Grading, members: &[Parabolic]) -> HypothesisStatus {
    let minus_one = g.eigenspace(-1);
    let missing: Vec<usize> =
        (0..members.len()).filter(|&i| !members[i].levi_roots.iter().any(|&r| g.eigenvalue(r) == -1)).collect();
    if !missing.is_empty() {
        return HypothesisStatus::FailsKey0 { members: missing };
    }
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    let mut outside = Vec::new();
    for m in members {
        for r in m.levi_ubar(g) {
            if g.eigenvalue(r) == -1 {
                *count.entry(r).or_default() += 1;
            } else if !outside.contains(&r) {
                outside.push(r);
            }
        }
    }
    let uncovered: Vec<usize> = minus_one.iter().copied().filter(|r| !count.contains_key(r)).collect();
    let doubly_covered: Vec<usize> = count.iter().filter(|(_, &c)| c > 1).map(|(&r, _)| r).collect();
    outside.sort_unstable();
    if uncovered.is_empty() && doubly_covered.is_empty() && outside.is_empty() {
        HypothesisStatus::Valid
    } else {
        HypothesisStatus::FailsKey { uncovered, doubly_covered, outside }
    }
}

/// Connected component of `start` in the Dynkin subdiagram on `nodes`.
fn component(rs: &RootSystem, nodes: &[usize], start: usize) -> Vec<usize> {
    let mut comp = vec![start];
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for w in rs.neighbours(v) {
            if nodes.contains(&w) && !comp.contains(&w) {
                comp.push(w);
                stack.push(w);
            }
        }
    }
    comp
}

/// The minimal family `{J₀ ∪ {j} : ⟨α_j, λ⟩ = 1}` in default order.
///
/// Default order is ascending by the added node, except that a member whose
/// added node is joined to a classical tail node comes first. If this family
/// fails the hypotheses, every family of parabolics properly above the
/// grading parabolic is searched for an exact cover of `𝔤(−1)`.
pub fn minimal_parabolic_family(g: &Grading) -> ParabolicFamily {
    let rs = g.rs();
    let j0 = g.j0();
    let s: Vec<usize> = (0..g.lambda.len()).filter(|&j| g.lambda[j] == 1).collect();
    let tails = rs.tail_nodes();
    let mut order: Vec<(bool, usize)> = s
        .iter()
        .map(|&j| {
            let mut nodes = j0.clone();
            nodes.push(j);
            let comp = component(rs, &nodes, j);
            (!comp.iter().any(|c| tails.contains(c)), j)
        })
        .collect();
    order.sort();
    let members: Vec<Parabolic> = order
        .iter()
        .map(|&(_, j)| {
            let mut nodes = j0.clone();
            nodes.push(j);
            Parabolic::from_simple(rs, &nodes)
        })
        .collect();
    let status = status_of(g, &members);
    let key = g.key();
    if status.is_valid() {
        return ParabolicFamily { members, status, grading_key: key };
    }
    match search_exact_cover(g) {
        Some(found) => ParabolicFamily { members: found, status: HypothesisStatus::Valid, grading_key: key },
        None => ParabolicFamily { members, status: HypothesisStatus::NoFamilyExists, grading_key: key },
    }
}

/// Searches all sets of parabolics properly containing the grading parabolic
/// whose Levis cut `ū` exactly in a partition of `𝔤(−1)`.
pub fn search_exact_cover(g: &Grading) -> Option<Vec<Parabolic>> {
    let rs = g.rs();
    let j0 = g.j0();
    let free: Vec<usize> = (0..rs.rank).filter(|i| !j0.contains(i)).collect();
    let minus_one = g.eigenspace(-1);
    let pos: HashMap<usize, usize> = minus_one.iter().enumerate().map(|(k, &r)| (r, k)).collect();
    let mut cands: Vec<(Vec<usize>, Vec<usize>, Parabolic)> = Vec::new();
    for mask in 1u32..(1u32 << free.len()) {
        let mut nodes = j0.clone();
        let mut added = Vec::new();
        for (b, &f) in free.iter().enumerate() {
            if mask & (1 << b) != 0 {
                nodes.push(f);
                added.push(f);
            }
        }
        let p = Parabolic::from_simple(rs, &nodes);
        let lu = p.levi_ubar(g);
        if lu.is_empty() || lu.iter().any(|&r| g.eigenvalue(r) != -1) {
            continue;
        }
        let cover: Vec<usize> = lu.iter().map(|r| pos[r]).collect();
        cands.push((added, cover, p));
    }
    cands.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    let mut used = vec![false; minus_one.len()];
    let mut chosen = Vec::new();
    if exact_cover(&cands, &mut used, &mut chosen) {
        Some(chosen.into_iter().map(|i| cands[i].2.clone()).collect())
    } else {
        None
    }
}

type Candidate = (Vec<usize>, Vec<usize>, Parabolic);

fn exact_cover(cands: &[Candidate], used: &mut [bool], chosen: &mut Vec<usize>) -> bool {
    let Some(target) = used.iter().position(|u| !u) else {
        return true;
    };
    for (i, c) in cands.iter().enumerate() {
        if !c.1.contains(&target) || c.1.iter().any(|&k| used[k]) {
            continue;
        }
        for &k in &c.1 {
            used[k] = true;
        }
        chosen.push(i);
        if exact_cover(cands, used, chosen) {
            return true;
        }
        chosen.pop();
        for &k in &c.1 {
            used[k] = false;
        }
    }
    false
}

/// Every weakly dominant coweight with pairings in `0..=max` on simple roots.
pub fn all_small_coweights(rank: usize, max: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        let mut next = Vec::new();
        for v in &out {
            for c in 0..=max {
                let mut w: Vec<i64> = v.clone();
                w.push(c);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Rationals as a display string, e.g. for echoing inputs.
pub fn format_rationals(v: &[BigRational]) -> String {
    v.iter()
        .map(|r| if r.is_integer() { r.to_integer().to_string() } else { r.to_string() })
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rs(t: CartanType, n: usize) -> RootSystem {
        RootSystem::build(t, n).unwrap()
    }

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    #[test]
    fn classical_root_counts() {
        for n in 1..=7 {
            assert_eq!(rs(CartanType::A, n).num_roots(), n * (n + 1));
        }
        for n in 2..=7 {
            assert_eq!(rs(CartanType::B, n).num_roots(), 2 * n * n);
            assert_eq!(rs(CartanType::C, n).num_roots(), 2 * n * n);
        }
        for n in 4..=7 {
            assert_eq!(rs(CartanType::D, n).num_roots(), 2 * n * (n - 1));
        }
        assert_eq!(rs(CartanType::E, 6).num_roots(), 72);
        assert_eq!(rs(CartanType::E, 7).num_roots(), 126);
        assert_eq!(rs(CartanType::E, 8).num_roots(), 240);
        assert_eq!(rs(CartanType::F, 4).num_roots(), 48);
        assert_eq!(rs(CartanType::G, 2).num_roots(), 12);
    }

    #[test]
    fn invalid_types_rejected() {
        assert!(RootSystem::build(CartanType::F, 3).is_err());
        assert!(RootSystem::build(CartanType::E, 5).is_err());
        assert!(RootSystem::build(CartanType::G, 3).is_err());
        assert!(RootSystem::build(CartanType::D, 3).is_err());
    }

    #[test]
    fn highest_roots() {
        let f4 = rs(CartanType::F, 4);
        assert_eq!(f4.root(f4.num_positive() - 1), &[2, 3, 4, 2]);
        let g2 = rs(CartanType::G, 2);
        assert_eq!(g2.root(g2.num_positive() - 1), &[3, 2]);
        let e8 = rs(CartanType::E, 8);
        assert_eq!(e8.root(e8.num_positive() - 1), &[2, 3, 4, 6, 5, 4, 3, 2]);
    }

    #[test]
    fn coroots_are_integral_and_simple_coroots_are_unit() {
        for (t, n) in [(CartanType::B, 3), (CartanType::C, 3), (CartanType::F, 4), (CartanType::G, 2)] {
            let r = rs(t, n);
            for i in 0..r.num_roots() {
                let _ = r.coroot(i);
            }
            for i in r.simple_roots() {
                let mut e = vec![0; n];
                e[i] = 1;
                assert_eq!(r.coroot(i), e);
            }
        }
    }

    #[test]
    fn gl_examples() {
        let g = Grading::gl(&q(&[1, 1, 0, 0])).unwrap();
        assert_eq!(g.dim(-1), 4);
        assert_eq!(g.dim(-2), 0);
        assert_eq!(g.gl_blocks().unwrap().signature(), (2, 2));
        let g = Grading::gl(&q(&[2, 1, 0])).unwrap();
        assert_eq!(g.dim(-1), 2);
        assert_eq!(g.dim(-2), 1);
        let g = Grading::gl(&q(&[1, 0])).unwrap();
        assert_eq!(g.dim(-1), 1);
    }

    #[test]
    fn gl_central_shift_and_errors() {
        let half = BigRational::new(1.into(), 2.into());
        let g = Grading::gl(&[half.clone() + BigRational::from_integer(1.into()), half.clone()]).unwrap();
        assert_eq!(g.gl_blocks().unwrap().diag, vec![1, 0]);
        let e = Grading::gl(&[half, BigRational::from_integer(0.into())]).unwrap_err();
        assert!(matches!(e, RootDataError::NonIntegral(_)));
        let e = Grading::gl(&q(&[0, 1])).unwrap_err();
        assert!(matches!(e, RootDataError::NonDominant(_)));
    }

    #[test]
    fn gl_minus_one_matches_block_formula() {
        for diag in [vec![3, 2, 2, 1, 0], vec![4, 4, 3, 1, 0, 0], vec![2, 1, 1, 0, 0, 0]] {
            let g = Grading::gl_ints(&diag).unwrap();
            let b = g.gl_blocks().unwrap();
            let expect: usize = b.s_set().iter().map(|&j| b.sizes[j] * b.sizes[j + 1]).sum();
            assert_eq!(g.dim(-1), expect, "{diag:?}");
        }
    }

    #[test]
    fn f4_eigenspaces_by_direct_count() {
        let g = Grading::new(rs(CartanType::F, 4), &q(&[0, 1, 0, 0])).unwrap();
        // Oracle: count roots by their α₂ coefficient.
        let all = rs(CartanType::F, 4);
        for i in -3..=3 {
            let direct = all.roots().iter().filter(|r| r[1] == i).count();
            assert_eq!(g.eigenspace(i).len(), direct);
        }
        assert_eq!(g.dim(-1), 12);
        assert_eq!(g.dim(-2), 6);
        assert_eq!(g.dim(-3), 2);
        assert_eq!(g.dim(0), 12);
    }

    #[test]
    fn examples_of_families() {
        let g = Grading::gl(&q(&[1, 1, 0, 0])).unwrap();
        let f = minimal_parabolic_family(&g);
        assert_eq!(f.len(), 1);
        assert_eq!(f.members[0].simple, vec![0, 1, 2]);
        assert!(f.status.is_valid());

        let g = Grading::gl(&q(&[2, 1, 0])).unwrap();
        let f = minimal_parabolic_family(&g);
        assert_eq!(f.len(), 2);
        assert_eq!(f.members[0].simple, vec![0]);
        assert_eq!(f.members[1].simple, vec![1]);
        assert!(f.status.is_valid());

        let g = Grading::new(rs(CartanType::F, 4), &q(&[0, 1, 0, 0])).unwrap();
        assert_eq!(minimal_parabolic_family(&g).status, HypothesisStatus::NoFamilyExists);
        let g = Grading::new(rs(CartanType::G, 2), &q(&[0, 1])).unwrap();
        assert_eq!(minimal_parabolic_family(&g).status, HypothesisStatus::NoFamilyExists);
        let g = Grading::new(rs(CartanType::G, 2), &q(&[1, 0])).unwrap();
        assert_eq!(minimal_parabolic_family(&g).status, HypothesisStatus::NoFamilyExists);
    }

    #[test]
    fn rho_check_is_valid_everywhere() {
        for (t, n) in [
            (CartanType::A, 4),
            (CartanType::B, 3),
            (CartanType::C, 4),
            (CartanType::D, 5),
            (CartanType::E, 6),
            (CartanType::F, 4),
            (CartanType::G, 2),
        ] {
            let g = Grading::from_ints(rs(t, n), &vec![1; n]).unwrap();
            let f = minimal_parabolic_family(&g);
            assert!(f.status.is_valid(), "{t}{n}");
            assert_eq!(f.len(), n);
            assert_eq!(check_hypotheses(&g, &f).unwrap(), HypothesisStatus::Valid);
        }
    }

    #[test]
    fn improper_and_foreign_families_rejected() {
        let g = Grading::gl(&q(&[1, 1, 0, 0])).unwrap();
        let base = Parabolic::from_simple(g.rs(), &g.j0());
        let fam = ParabolicFamily { members: vec![base], status: HypothesisStatus::Valid, grading_key: g.key() };
        assert_eq!(check_hypotheses(&g, &fam), Err(RootDataError::NotProper(0)));
        let other = Grading::gl(&q(&[2, 1, 0])).unwrap();
        let fam = minimal_parabolic_family(&other);
        assert_eq!(check_hypotheses(&g, &fam), Err(RootDataError::MismatchedGrading));
    }

    #[test]
    fn tail_member_goes_first() {
        // C3 with λ = (0,1,1): both nodes 1 and 2 are in S; node 2 is the tail.
        let g = Grading::from_ints(rs(CartanType::C, 3), &[0, 1, 1]).unwrap();
        let f = minimal_parabolic_family(&g);
        assert_eq!(f.added_nodes(&g), vec![vec![2], vec![1]]);
    }

    #[test]
    fn maximal_classical_counterexamples_fail() {
        // A maximal parabolic whose opposite nilradical reaches 𝔤(−2).
        for (t, n, l) in [
            (CartanType::B, 2, vec![0, 1]),
            (CartanType::C, 2, vec![1, 0]),
            (CartanType::D, 4, vec![0, 1, 0, 0]),
        ] {
            let g = Grading::from_ints(rs(t, n), &l).unwrap();
            assert!(g.dim(-2) > 0);
            assert_eq!(minimal_parabolic_family(&g).status, HypothesisStatus::NoFamilyExists, "{t}{n} {l:?}");
        }
    }

    #[test]
    fn empty_family_when_no_minus_one() {
        let g = Grading::gl(&q(&[2, 0])).unwrap();
        let f = minimal_parabolic_family(&g);
        assert!(f.is_empty());
        assert!(f.status.is_valid());
    }

    proptest! {
        #[test]
        fn eigenspaces_partition_and_are_symmetric(t in 0usize..4, n in 2usize..6,
                                                    seed in proptest::collection::vec(0i64..3, 6)) {
            let (ct, n) = match t {
                0 => (CartanType::A, n),
                1 => (CartanType::B, n),
                2 => (CartanType::C, n),
                _ => (CartanType::D, n.max(4)),
            };
            let g = Grading::from_ints(rs(ct, n), &seed[..n]).unwrap();
            let total: usize = g.eigenspaces().values().map(Vec::len).sum();
            prop_assert_eq!(total, g.rs().num_roots());
            for (&i, roots) in g.eigenspaces().iter() {
                let neg: Vec<usize> = roots.iter().map(|&r| g.rs().negative_of(r)).collect();
                let mut other = g.eigenspace(-i);
                other.sort_unstable();
                let mut neg = neg;
                neg.sort_unstable();
                prop_assert_eq!(neg, other);
                prop_assert_eq!(g.dim(i), g.dim(-i));
            }
            for r in g.rs().roots() {
                prop_assert!(r.iter().all(|&c| c >= 0) || r.iter().all(|&c| c <= 0));
            }
        }

        #[test]
        fn reordering_keeps_status(diag in proptest::collection::vec(0i64..4, 2..7)) {
            let mut d = diag.clone();
            d.sort_unstable_by(|a, b| b.cmp(a));
            let g = Grading::gl_ints(&d).unwrap();
            let f = minimal_parabolic_family(&g);
            let rev: Vec<usize> = (0..f.len()).rev().collect();
            let r = f.reordered(&rev);
            prop_assert_eq!(check_hypotheses(&g, &r).unwrap(), check_hypotheses(&g, &f).unwrap());
            prop_assert!(f.status.is_valid());
        }
    }
}
