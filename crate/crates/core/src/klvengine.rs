//! Kazhdan–Lusztig–Vogan polynomials for `K = GL(p)×GL(q)` orbits on the
//! flag variety of `GL(p+q)`, and their partial-flag versions.
//!
//! The block is encoded as a Hecke module on characteristic functions of
//! orbits: `T_s` counts points of each orbit on the `s`-lines through a point
//! (`(T_s + 1)(T_s − q) = 0`). The IC function of an orbit closure is built
//! by pushing the IC function of a lower neighbour through `T_s + 1` and
//! peeling off the summands the decomposition theorem predicts.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::clan::{Clan, RootKind};
use crate::kflag::KOrbitSet;
use crate::klengine::KLTable;
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KLVError {
    #[error("no descent available for non-closed orbit {0}")]
    RecursionIncomplete(String),
    #[error("degree bound violated at ({0}, {1})")]
    DegreeBound(String, String),
    #[error("recursion through different simple roots disagrees at {0}")]
    OrderDependent(String),
    #[error("clan {0} is not in the block")]
    UnknownClan(String),
}

/// Position of an orbit relative to the `s`-line fibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    Compact,
    ComplexAscent { cross: usize },
    ComplexDescent { cross: usize },
    Noncompact { cross: usize, cayley: usize },
    Real { lower: [usize; 2] },
}

impl Move {
    pub fn kind(&self) -> RootKind {
        match self {
            Move::Compact => RootKind::Compact,
            Move::ComplexAscent { .. } => RootKind::ComplexAscent,
            Move::ComplexDescent { .. } => RootKind::ComplexDescent,
            Move::Noncompact { .. } => RootKind::Noncompact,
            Move::Real { .. } => RootKind::Real,
        }
    }

    /// Lower neighbour through which this orbit's IC function is built.
    pub fn lower(&self) -> Option<usize> {
        match *self {
            Move::ComplexDescent { cross } => Some(cross),
            Move::Real { lower } => Some(lower[0]),
            _ => None,
        }
    }

    /// Every orbit meeting the `s`-lines through this orbit, itself excluded.
    pub fn neighbours(&self) -> Vec<usize> {
        match *self {
            Move::Compact => vec![],
            Move::ComplexAscent { cross } | Move::ComplexDescent { cross } => vec![cross],
            Move::Noncompact { cross, cayley } => vec![cross, cayley],
            Move::Real { lower } => lower.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockParam {
    pub clan: Clan,
    /// Stabilizers in `GL(p)×GL(q)` are connected.
    pub local_system: String,
    pub length: usize,
    pub descent_profile: Vec<RootKind>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Block {
    pub p: usize,
    pub q: usize,
    pub params: Vec<BlockParam>,
    /// `moves[γ][s]`.
    pub moves: Vec<Vec<Move>>,
    #[serde(skip)]
    index: HashMap<Clan, usize>,
}

pub fn build_block(p: usize, q: usize) -> Block {
    let clans = Clan::all(p, q);
    let index: HashMap<Clan, usize> = clans.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let n = p + q;
    let idx = |c: &Clan| index[c];
    let moves = clans
        .iter()
        .map(|c| {
            (0..n.saturating_sub(1))
                .map(|s| match c.kind(s) {
                    RootKind::Compact => Move::Compact,
                    RootKind::ComplexAscent => Move::ComplexAscent { cross: idx(&c.cross(s)) },
                    RootKind::ComplexDescent => Move::ComplexDescent { cross: idx(&c.cross(s)) },
                    RootKind::Noncompact => Move::Noncompact {
                        cross: idx(&c.cross(s)),
                        cayley: idx(&c.cayley(s).expect("noncompact root has a Cayley transform")),
                    },
                    RootKind::Real => {
                        let [a, b] = c.inverse_cayley(s).expect("real root has inverse Cayley transforms");
                        Move::Real { lower: [idx(&a), idx(&b)] }
                    }
                })
                .collect()
        })
        .collect();
    let params = clans
        .into_iter()
        .map(|c| BlockParam {
            length: c.length(),
            descent_profile: (0..n.saturating_sub(1)).map(|s| c.kind(s)).collect(),
            local_system: "trivial".into(),
            clan: c,
        })
        .collect();
    Block { p, q, params, moves, index }
}

/// A `ℤ[q]`-combination of orbit characteristic functions.
pub type Func = BTreeMap<usize, Poly>;

fn add_term(f: &mut Func, k: usize, c: Poly) {
    let e = f.entry(k).or_insert_with(Poly::zero);
    *e = &*e + &c;
    if e.is_zero() {
        f.remove(&k);
    }
}

impl Block {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn rank(&self) -> usize {
        (self.p + self.q).saturating_sub(1)
    }

    pub fn index_of(&self, c: &Clan) -> Result<usize, KLVError> {
        self.index.get(c).copied().ok_or_else(|| KLVError::UnknownClan(c.to_string()))
    }

    pub fn length(&self, g: usize) -> usize {
        self.params[g].length
    }

    /// `T_s · 1_γ`.
    pub fn t_s(&self, s: usize, g: usize) -> Func {
        let mut f = Func::new();
        let q = Poly::monomial(1, 1);
        let one = Poly::one();
        match self.moves[g][s] {
            Move::Compact => add_term(&mut f, g, q),
            Move::ComplexAscent { cross } => add_term(&mut f, cross, one),
            Move::ComplexDescent { cross } => {
                add_term(&mut f, g, &q - &one);
                add_term(&mut f, cross, q);
            }
            Move::Noncompact { cross, cayley } => {
                add_term(&mut f, cross, one.clone());
                add_term(&mut f, cayley, one);
            }
            Move::Real { lower } => {
                add_term(&mut f, g, &q - &Poly::from_i64s(&[2]));
                for l in lower {
                    add_term(&mut f, l, &q - &one);
                }
            }
        }
        f
    }

    pub fn apply(&self, s: usize, f: &Func) -> Func {
        let mut out = Func::new();
        for (&g, c) in f {
            for (h, d) in self.t_s(s, g) {
                add_term(&mut out, h, c * &d);
            }
        }
        out
    }

    /// Closures by saturation: `cl(γ)` is the union of the `s`-line
    /// saturations of `cl(γ')` for a lower neighbour `γ'`.
    pub fn closures(&self) -> Result<Vec<BTreeSet<usize>>, KLVError> {
        let mut cl: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.len()];
        for g in self.by_length() {
            let Some((s, low)) = self.descent(g) else {
                if self.length(g) != 0 {
                    return Err(KLVError::RecursionIncomplete(self.params[g].clan.to_string()));
                }
                cl[g].insert(g);
                continue;
            };
            let mut set = BTreeSet::new();
            for &d in &cl[low] {
                set.insert(d);
                set.extend(self.moves[d][s].neighbours());
            }
            cl[g] = set;
        }
        Ok(cl)
    }

    fn by_length(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.len()).collect();
        v.sort_by_key(|&g| self.length(g));
        v
    }

    /// The first simple root lowering `γ`, with the lower neighbour.
    pub fn descent(&self, g: usize) -> Option<(usize, usize)> {
        self.descents(g).into_iter().next()
    }

    pub fn descents(&self, g: usize) -> Vec<(usize, usize)> {
        (0..self.rank()).filter_map(|s| self.moves[g][s].lower().map(|l| (s, l))).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("block serializes")
    }
}

/// IC functions of all orbit closures: `ic[γ][δ] = P_{δ,γ}`.
#[derive(Debug, Clone)]
pub struct KLVTable {
    pub block: Block,
    pub ic: Vec<Func>,
}

fn reduce(block: &Block, ic: &[Func], g: usize, mut f: Func) -> Result<Func, KLVError> {
    let lg = block.length(g);
    let mut lower: Vec<usize> = f.keys().copied().filter(|&d| d != g).collect();
    lower.sort_by_key(|&d| std::cmp::Reverse(block.length(d)));
    for d in lower {
        let Some(c) = f.get(&d).cloned() else { continue };
        let ld = block.length(d);
        if ld >= lg {
            return Err(KLVError::DegreeBound(block.params[d].clan.to_string(), block.params[g].clan.to_string()));
        }
        if (lg - ld).is_multiple_of(2) {
            let k = (lg - ld) / 2;
            let m = c.coeff(k);
            if m.is_negative() {
                return Err(KLVError::DegreeBound(block.params[d].clan.to_string(), block.params[g].clan.to_string()));
            }
            if !m.is_zero() {
                for (&e, pe) in &ic[d] {
                    add_term(&mut f, e, -&pe.scale(&m).shift(k));
                }
            }
        }
        let c = f.get(&d).cloned().unwrap_or_else(Poly::zero);
        if c.degree().is_some_and(|deg| 2 * deg >= lg - ld) || c.coeffs().iter().any(|x| x.is_negative()) {
            return Err(KLVError::DegreeBound(block.params[d].clan.to_string(), block.params[g].clan.to_string()));
        }
    }
    Ok(f)
}

fn ic_via(block: &Block, ic: &[Func], g: usize, s: usize, low: usize) -> Result<Func, KLVError> {
    let mut f = block.apply(s, &ic[low]);
    for (k, c) in &ic[low] {
        add_term(&mut f, *k, c.clone());
    }
    reduce(block, ic, g, f)
}

/// KLV polynomials of the block. With `check_all`, every descent of every
/// orbit is used and the results must agree.
pub fn klv_polynomials(block: Block, check_all: bool) -> Result<KLVTable, KLVError> {
    let mut ic: Vec<Func> = vec![Func::new(); block.len()];
    for g in block.by_length() {
        let ds = block.descents(g);
        if ds.is_empty() {
            if block.length(g) != 0 {
                return Err(KLVError::RecursionIncomplete(block.params[g].clan.to_string()));
            }
            ic[g].insert(g, Poly::one());
            continue;
        }
        let f = ic_via(&block, &ic, g, ds[0].0, ds[0].1)?;
        if check_all {
            for &(s, low) in &ds[1..] {
                if ic_via(&block, &ic, g, s, low)? != f {
                    return Err(KLVError::OrderDependent(block.params[g].clan.to_string()));
                }
            }
        }
        ic[g] = f;
    }
    Ok(KLVTable { block, ic })
}

impl KLVTable {
    pub fn get(&self, psi: usize, gamma: usize) -> Poly {
        self.ic[gamma].get(&psi).cloned().unwrap_or_else(Poly::zero)
    }

    pub fn get_clans(&self, psi: &Clan, gamma: &Clan) -> Result<Poly, KLVError> {
        Ok(self.get(self.block.index_of(psi)?, self.block.index_of(gamma)?))
    }

    pub fn in_closure(&self, psi: usize, gamma: usize) -> bool {
        self.ic[gamma].contains_key(&psi)
    }

    pub fn to_kl_table(&self) -> KLTable {
        let labels = self.block.params.iter().map(|b| b.clan.to_string()).collect();
        let dims = self.block.params.iter().map(|b| b.clan.orbit_dim()).collect();
        KLTable::build(labels, dims, |i, j| self.get(i, j))
    }
}

/// `P_{ψ,γ}` on a partial flag variety, read off the open orbits of the
/// preimages in the full flag variety.
pub fn partial_flag_polynomial(table: &KLVTable, set: &KOrbitSet, psi: usize, gamma: usize) -> Result<Poly, KLVError> {
    table.get_clans(&set.orbits[psi].open_clan, &set.orbits[gamma].open_clan)
}

/// `C_{ψ,γ} = (−1)^{d(γ)−d(ψ)} P_{ψ,γ}(1)`.
pub fn multiplicity_matrix(table: &KLTable) -> Vec<Vec<BigInt>> {
    let n = table.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = table.get(i, j).eval_at_one();
                    if (table.dims[i] + table.dims[j]) % 2 == 1 {
                        -v
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect()
}

/// Rows and columns can be ordered so the matrix is unitriangular.
pub fn is_unitriangular(m: &[Vec<BigInt>], dims: &[usize]) -> bool {
    let n = m.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| dims[i]);
    let pos: Vec<usize> = {
        let mut p = vec![0; n];
        for (k, &i) in order.iter().enumerate() {
            p[i] = k;
        }
        p
    };
    (0..n).all(|i| {
        (0..n).all(|j| {
            if i == j {
                m[i][j].is_one()
            } else if pos[i] > pos[j] {
                m[i][j].is_zero()
            } else {
                true
            }
        })
    })
}
