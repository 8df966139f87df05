//! Kazhdan–Lusztig polynomials of symmetric groups, their parabolic
//! (`q = 0` convention) versions, and the translation from L-orbits of GL
//! gradings to permutation parameters.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::epsmap::{EpsError, EpsilonMap};
use crate::lorbits::{closure_leq, LOrbit};
use crate::perm::{Perm, SimpleSet};
use crate::poly::Poly;
use crate::porbit::{coset_parameter, PTable};

pub const CONVENTION: &str = "parabolic q=0";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KLError {
    #[error("{0} is not a minimal coset representative")]
    NotMinimalRep(Perm),
    #[error("parameters live in different groups or quotients")]
    Mismatch,
    #[error(transparent)]
    Eps(#[from] EpsError),
}

/// A permutation, optionally read as a minimal representative of `w·W_J`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PermParam {
    pub n: usize,
    pub word: Perm,
    pub parabolic: SimpleSet,
}

impl PermParam {
    pub fn new(word: Perm, parabolic: SimpleSet) -> Result<Self, KLError> {
        if !word.is_min_coset_rep(&parabolic) {
            return Err(KLError::NotMinimalRep(word));
        }
        Ok(PermParam { n: word.n(), word, parabolic })
    }

    pub fn plain(word: Perm) -> Self {
        PermParam { n: word.n(), word, parabolic: SimpleSet::empty() }
    }

    pub fn length(&self) -> usize {
        self.word.length()
    }
}

/// Memoized parabolic KL polynomials for one quotient `S_n / W_J`.
///
/// With `J = ∅` these are the ordinary KL polynomials.
pub struct KLEngine {
    n: usize,
    j: SimpleSet,
    /// Minimal coset representatives, sorted by length.
    reps: Vec<Perm>,
    memo: RwLock<HashMap<(Perm, Perm), Poly>>,
}

impl KLEngine {
    pub fn new(n: usize, j: SimpleSet) -> Self {
        let mut reps: Vec<Perm> = Perm::all(n).into_iter().filter(|w| w.is_min_coset_rep(&j)).collect();
        reps.sort_by_key(|w| (w.length(), w.clone()));
        KLEngine { n, j, reps, memo: RwLock::new(HashMap::new()) }
    }

    pub fn ordinary(n: usize) -> Self {
        Self::new(n, SimpleSet::empty())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parabolic(&self) -> &SimpleSet {
        &self.j
    }

    pub fn reps(&self) -> &[Perm] {
        &self.reps
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }

    fn in_quotient(&self, w: &Perm) -> bool {
        w.is_min_coset_rep(&self.j)
    }

    /// `P_{x,w}` for minimal representatives `x, w`.
    pub fn poly(&self, x: &PermParam, w: &PermParam) -> Result<Poly, KLError> {
        if x.n != self.n || w.n != self.n || x.parabolic != self.j || w.parabolic != self.j {
            return Err(KLError::Mismatch);
        }
        Ok(self.p(&x.word, &w.word))
    }

    /// `μ(x, w)`: coefficient of `q^{(ℓ(w)−ℓ(x)−1)/2}` in `P_{x,w}`.
    pub fn mu(&self, x: &Perm, w: &Perm) -> num_bigint::BigInt {
        let (lx, lw) = (x.length(), w.length());
        if lx >= lw || (lw - lx) % 2 == 0 {
            return 0.into();
        }
        self.p(x, w).coeff((lw - lx - 1) / 2)
    }

    pub(crate) fn p(&self, x: &Perm, w: &Perm) -> Poly {
        if x == w {
            return Poly::one();
        }
        if !x.bruhat_le(w) {
            return Poly::zero();
        }
        let s = (0..self.n - 1).find(|&i| w.is_left_descent(i)).expect("w > x has a descent");
        // P_{x,w} = P_{sx,w} when sx > x stays in the quotient.
        let sx = x.left_mul(s);
        let x = if !x.is_left_descent(s) && self.in_quotient(&sx) { sx } else { x.clone() };
        let key = (x.clone(), w.clone());
        if let Some(p) = self.memo.read().expect("memo lock").get(&key) {
            return p.clone();
        }
        let v = w.left_mul(s);
        let sx = x.left_mul(s);
        let mut out = if x.is_left_descent(s) {
            &self.p(&sx, &v) + &self.p(&x, &v).shift(1)
        } else if self.in_quotient(&sx) {
            &self.p(&sx, &v).shift(1) + &self.p(&x, &v)
        } else {
            let pv = self.p(&x, &v);
            &pv + &pv.shift(1)
        };
        let lw = w.length();
        for z in &self.reps {
            if z.length() >= v.length() {
                break;
            }
            if (!z.is_left_descent(s) && self.in_quotient(&z.left_mul(s))) || !x.bruhat_le(z) || !z.bruhat_le(&v) {
                continue;
            }
            let m = self.mu(z, &v);
            if m == 0.into() {
                continue;
            }
            let pz = self.p(&x, z).scale(&m).shift((lw - z.length()) / 2);
            out = &out - &pz;
        }
        self.memo.write().expect("memo lock").insert(key, out.clone());
        out
    }
}

/// Ordinary KL polynomial; zero unless `x ≤ w`.
pub fn kl_polynomial(x: &Perm, w: &Perm) -> Poly {
    KLEngine::ordinary(x.n()).p(x, w)
}

/// Parabolic KL polynomial of two minimal coset representatives.
pub fn parabolic_kl(x: &PermParam, w: &PermParam) -> Result<Poly, KLError> {
    if !x.word.is_min_coset_rep(&x.parabolic) {
        return Err(KLError::NotMinimalRep(x.word.clone()));
    }
    if !w.word.is_min_coset_rep(&w.parabolic) {
        return Err(KLError::NotMinimalRep(w.word.clone()));
    }
    KLEngine::new(x.n, x.parabolic.clone()).poly(x, w)
}

/// Parameter of the P-orbit `P·ε(O)` on `G/P`: the minimal representative
/// of the left coset of the longest element of its double coset.
pub fn zelevinsky_param(em: &EpsilonMap, orbit: &LOrbit) -> Result<PermParam, KLError> {
    let sizes = em.blocks().sizes.clone();
    let f = em.epsilon(&orbit.rep())?;
    let w = PTable::of_flag(&f, &sizes).representative(&sizes);
    PermParam::new(coset_parameter(&w, &sizes), SimpleSet::from_block_sizes(&sizes))
}

/// IC stalk polynomial of `closure(γ)` along `ψ`; zero unless `ψ ≤ γ`.
pub fn padic_ic_polynomial(engine: &KLEngine, em: &EpsilonMap, psi: &LOrbit, gamma: &LOrbit) -> Result<Poly, KLError> {
    if !closure_leq(psi, gamma).unwrap_or(false) {
        return Ok(Poly::zero());
    }
    let a = zelevinsky_param(em, psi)?;
    let b = zelevinsky_param(em, gamma)?;
    engine.poly(&a, &b)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KLTable {
    pub convention: String,
    pub params: Vec<String>,
    pub dims: Vec<usize>,
    /// `polys[i][j]` for `i ≤ j`; entries below the diagonal are omitted.
    pub polys: Vec<Vec<Poly>>,
}

impl KLTable {
    /// `params` must be sorted compatibly with the closure order.
    pub fn build(labels: Vec<String>, dims: Vec<usize>, entry: impl Fn(usize, usize) -> Poly) -> Self {
        let n = labels.len();
        let polys = (0..n).map(|i| (i..n).map(|j| entry(i, j)).collect()).collect();
        KLTable { convention: CONVENTION.into(), params: labels, dims, polys }
    }

    pub fn get(&self, i: usize, j: usize) -> Poly {
        if i > j {
            Poly::zero()
        } else {
            self.polys[i][j - i].clone()
        }
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# convention: {}\npsi_id,gamma_id,poly\n", self.convention);
        for i in 0..self.len() {
            for j in i..self.len() {
                let p = self.get(i, j);
                if !p.is_zero() {
                    let _ = writeln!(s, "{i},{j},{p}");
                }
            }
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("table serializes")
    }
}

/// KL table of the L-orbits of a GL grading on the p-adic side.
pub fn padic_table(em: &EpsilonMap, orbits: &[LOrbit]) -> Result<KLTable, KLError> {
    let sizes = &em.blocks().sizes;
    let engine = KLEngine::new(em.blocks().n(), SimpleSet::from_block_sizes(sizes));
    let params: Vec<PermParam> = orbits.iter().map(|o| zelevinsky_param(em, o)).collect::<Result<_, _>>()?;
    let labels = orbits.iter().map(|o| format!("{:?}", o.triangle.ranks)).collect();
    let dims = orbits.iter().map(|o| o.dimension).collect();
    Ok(KLTable::build(labels, dims, |i, j| {
        if closure_leq(&orbits[i], &orbits[j]).unwrap_or(false) {
            engine.p(&params[i].word, &params[j].word)
        } else {
            Poly::zero()
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorbits::enumerate_l_orbits;
    use crate::rootdata::{minimal_parabolic_family, Grading};
    use crate::epsmap::EpsMode;

    /// R-polynomials by their own recursion, then `P` from
    /// `q^{ℓ(w)−ℓ(x)} P̄_{x,w} − P_{x,w} = Σ_{x<y≤w} R_{x,y} P_{y,w}`.
    struct Brute {
        r: HashMap<(Perm, Perm), Poly>,
        p: HashMap<(Perm, Perm), Poly>,
    }

    impl Brute {
        fn r(&mut self, x: &Perm, w: &Perm) -> Poly {
            if let Some(v) = self.r.get(&(x.clone(), w.clone())) {
                return v.clone();
            }
            let out = if x == w {
                Poly::one()
            } else if !x.bruhat_le(w) {
                Poly::zero()
            } else {
                let s = (0..w.n() - 1).find(|&i| w.is_left_descent(i)).unwrap();
                let (sx, sw) = (x.left_mul(s), w.left_mul(s));
                if x.is_left_descent(s) {
                    self.r(&sx, &sw)
                } else {
                    let a = self.r(&sx, &sw).shift(1);
                    let b = self.r(x, &sw);
                    &(&a + &b.shift(1)) - &b
                }
            };
            self.r.insert((x.clone(), w.clone()), out.clone());
            out
        }

        fn p(&mut self, x: &Perm, w: &Perm, all: &[Perm]) -> Poly {
            if let Some(v) = self.p.get(&(x.clone(), w.clone())) {
                return v.clone();
            }
            let out = if x == w {
                Poly::one()
            } else if !x.bruhat_le(w) {
                Poly::zero()
            } else {
                let mut s = Poly::zero();
                for y in all {
                    if y != x && x.bruhat_le(y) && y.bruhat_le(w) {
                        let t = &self.r(x, y) * &self.p(y, w, all);
                        s = &s + &t;
                    }
                }
                let d = w.length() - x.length();
                let keep = (d - 1) / 2;
                -&Poly::from_coeffs(s.coeffs().iter().take(keep + 1).cloned().collect())
            };
            self.p.insert((x.clone(), w.clone()), out.clone());
            out
        }
    }

    #[test]
    fn s4_matches_brute_force() {
        for n in 1..=4 {
            let all = Perm::all(n);
            let e = KLEngine::ordinary(n);
            let mut b = Brute { r: HashMap::new(), p: HashMap::new() };
            for x in &all {
                for w in &all {
                    let p = e.p(x, w);
                    assert_eq!(p, b.p(x, w, &all), "{x} {w}");
                    if x.bruhat_le(w) {
                        assert!(p.has_nonnegative_coeffs());
                        assert_eq!(p.coeff(0), 1.into());
                        if x != w {
                            assert!(2 * p.degree().unwrap() < w.length() - x.length());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn classical_examples() {
        let e: Perm = "1234".parse().unwrap();
        let w: Perm = "3412".parse().unwrap();
        assert_eq!(kl_polynomial(&e, &w), Poly::from_i64s(&[1, 1]));
        assert_eq!(kl_polynomial(&w, &w), Poly::one());
        let w2: Perm = "4231".parse().unwrap();
        assert_eq!(kl_polynomial(&e, &w2), Poly::from_i64s(&[1, 1]));
        for x in Perm::all(3) {
            for w in Perm::all(3) {
                let want = if x.bruhat_le(&w) { Poly::one() } else { Poly::zero() };
                assert_eq!(kl_polynomial(&x, &w), want);
            }
        }
    }

    #[test]
    fn parabolic_equals_longest_representatives() {
        for (n, sizes) in [(4, vec![2, 2]), (4, vec![1, 2, 1]), (4, vec![1, 3]), (5, vec![2, 3]), (5, vec![2, 1, 2]), (5, vec![1, 2, 2])] {
            let j = SimpleSet::from_block_sizes(&sizes);
            let w0j = Perm::longest_of_parabolic(n, &j);
            let par = KLEngine::new(n, j.clone());
            let ord = KLEngine::ordinary(n);
            let compose = |a: &Perm, b: &Perm| Perm::from_vec((0..n).map(|i| a.at(b.at(i)) as u8).collect());
            for x in par.reps() {
                for w in par.reps() {
                    let want = ord.p(&compose(x, &w0j), &compose(w, &w0j));
                    assert_eq!(par.p(x, w), want, "{sizes:?} {x} {w}");
                }
            }
        }
    }

    #[test]
    fn empty_parabolic_is_ordinary() {
        let all = Perm::all(4);
        let ord = KLEngine::ordinary(4);
        for x in &all {
            for w in &all {
                let p = parabolic_kl(&PermParam::plain(x.clone()), &PermParam::plain(w.clone())).unwrap();
                assert_eq!(p, ord.p(x, w));
            }
        }
    }

    #[test]
    fn grassmannian_examples() {
        let j = SimpleSet::from_block_sizes(&[2, 2]);
        let pt = PermParam::new("1234".parse().unwrap(), j.clone()).unwrap();
        let div = PermParam::new("2413".parse().unwrap(), j.clone()).unwrap();
        assert_eq!(div.length(), 3);
        assert_eq!(parabolic_kl(&pt, &div).unwrap(), Poly::from_i64s(&[1, 1]));
        for n in 2..=5 {
            let j = SimpleSet::from_block_sizes(&[1, n - 1]);
            let e = KLEngine::new(n, j);
            for x in e.reps() {
                for w in e.reps() {
                    if x.bruhat_le(w) {
                        assert!(e.p(x, w).is_one());
                    }
                }
            }
        }
        let bad: Perm = "2134".parse().unwrap();
        assert_eq!(PermParam::new(bad.clone(), SimpleSet::from_block_sizes(&[2, 2])), Err(KLError::NotMinimalRep(bad)));
    }

    fn map_for(d: &[i64]) -> (EpsilonMap, Vec<LOrbit>) {
        let g = Grading::gl_ints(d).unwrap();
        let fam = minimal_parabolic_family(&g);
        let em = EpsilonMap::default(&g, &fam, EpsMode::Truncated).unwrap();
        (em, enumerate_l_orbits(&g).unwrap())
    }

    /// Diagonals `(k−1)^{b₀} … 0^{b_{k−1}}` for every composition of `n ≤ max_n`.
    fn gl_gradings(max_n: usize) -> Vec<Vec<i64>> {
        fn comps(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            (1..=n).flat_map(|f| comps(n - f).into_iter().map(move |mut c| {
                c.insert(0, f);
                c
            })).collect()
        }
        let mut out = Vec::new();
        for n in 2..=max_n {
            for c in comps(n).into_iter().filter(|c| c.len() > 1) {
                let k = c.len() as i64;
                out.push(c.iter().enumerate().flat_map(|(i, &m)| std::iter::repeat_n(k - 1 - i as i64, m)).collect());
            }
        }
        out
    }

    #[test]
    fn zelevinsky_map_is_order_isomorphism() {
        let all = gl_gradings(5);
        assert!(all.contains(&vec![1, 1, 0, 0]) && all.contains(&vec![2, 1, 1, 0, 0]));
        for d in all {
            let (em, orbits) = map_for(&d);
            let params: Vec<PermParam> = orbits.iter().map(|o| zelevinsky_param(&em, o).unwrap()).collect();
            for (a, pa) in orbits.iter().zip(&params) {
                for (b, pb) in orbits.iter().zip(&params) {
                    assert_eq!(closure_leq(a, b).unwrap(), pa.word.bruhat_le(&pb.word), "{d:?}");
                    assert_eq!(a == b, pa == pb);
                }
            }
            let zero = orbits.iter().position(|o| o.is_zero()).unwrap();
            assert!(params.iter().all(|p| params[zero].word.bruhat_le(&p.word)));
            assert_eq!(params[zero].length(), 0);
        }
    }

    #[test]
    fn gl4_rank_one_is_divisor_class() {
        let (em, orbits) = map_for(&[1, 1, 0, 0]);
        let p1 = zelevinsky_param(&em, &orbits[1]).unwrap();
        assert_eq!(p1.length(), 3);
        let engine = KLEngine::new(4, SimpleSet::from_block_sizes(&[2, 2]));
        assert_eq!(padic_ic_polynomial(&engine, &em, &orbits[0], &orbits[1]).unwrap(), Poly::from_i64s(&[1, 1]));
        assert!(padic_ic_polynomial(&engine, &em, &orbits[0], &orbits[2]).unwrap().is_one());
        assert!(padic_ic_polynomial(&engine, &em, &orbits[1], &orbits[1]).unwrap().is_one());
        assert!(padic_ic_polynomial(&engine, &em, &orbits[2], &orbits[0]).unwrap().is_zero());
    }

    /// Gaussian binomial by counting `r`-subsets of `{0..a}` weighted by
    /// their Schubert cell dimension.
    fn grassmannian_poincare(r: usize, a: usize) -> Poly {
        let mut coeffs = vec![0i64; r * (a - r) + 1];
        for mask in 0u32..(1 << a) {
            if mask.count_ones() as usize != r {
                continue;
            }
            let cell: usize = (0..a).filter(|&i| mask >> i & 1 == 1).enumerate().map(|(k, i)| i - k).sum();
            coeffs[cell] += 1;
        }
        Poly::from_i64s(&coeffs)
    }

    #[test]
    fn determinantal_cone_oracle() {
        for a in 1..=3usize {
            for b in 1..=3usize {
                let d: Vec<i64> = std::iter::repeat_n(1, a).chain(std::iter::repeat_n(0, b)).collect();
                let (em, orbits) = map_for(&d);
                let engine = KLEngine::new(a + b, SimpleSet::from_block_sizes(&[a, b]));
                for o in &orbits {
                    let r = o.triangle.ranks[0];
                    let p = padic_ic_polynomial(&engine, &em, &orbits[0], o).unwrap();
                    assert_eq!(p, grassmannian_poincare(r, a.min(b)), "{a}x{b} rank {r}");
                }
            }
        }
    }

    #[test]
    fn table_serialization() {
        let (em, orbits) = map_for(&[1, 1, 0, 0]);
        let t = padic_table(&em, &orbits).unwrap();
        assert_eq!(t.get(0, 1), Poly::from_i64s(&[1, 1]));
        let csv = t.to_csv();
        assert!(csv.starts_with("# convention"));
        assert!(csv.contains("0,1,1+q"));
        let back: KLTable = serde_json::from_value(t.to_json()).unwrap();
        assert_eq!(back, t);
    }
}
