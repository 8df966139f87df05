//! Permutations of `{0, …, n-1}` in one-line notation, Bruhat order, and
//! parabolic quotients.
//!
//! `w` is the flag `span(e_{w(0)}) ⊂ span(e_{w(0)}, e_{w(1)}) ⊂ …`, so the
//! identity is the base point and `ℓ(w)` is the dimension of its Schubert
//! cell. Left multiplication by `s_i` swaps the values `i, i+1`; right
//! multiplication swaps the positions `i, i+1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u8).collect())
    }

    pub fn from_vec(v: Vec<u8>) -> Self {
        let mut seen = vec![false; v.len()];
        for &x in &v {
            assert!((x as usize) < v.len() && !seen[x as usize], "not a permutation: {v:?}");
            seen[x as usize] = true;
        }
        Perm(v)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.n()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Perm(inv)
    }

    pub fn length(&self) -> usize {
        let v = &self.0;
        let mut l = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    l += 1;
                }
            }
        }
        l
    }

    pub fn position_of(&self, value: usize) -> usize {
        self.0.iter().position(|&v| v as usize == value).expect("value out of range")
    }

    /// `s_i · self`.
    pub fn left_mul(&self, i: usize) -> Perm {
        let mut v = self.0.clone();
        for x in v.iter_mut() {
            if *x as usize == i {
                *x = (i + 1) as u8;
            } else if *x as usize == i + 1 {
                *x = i as u8;
            }
        }
        Perm(v)
    }

    /// `self · s_i`.
    pub fn right_mul(&self, i: usize) -> Perm {
        let mut v = self.0.clone();
        v.swap(i, i + 1);
        Perm(v)
    }

    /// `s_i · self < self`.
    pub fn is_left_descent(&self, i: usize) -> bool {
        self.position_of(i + 1) < self.position_of(i)
    }

    /// `self · s_i < self`.
    pub fn is_right_descent(&self, i: usize) -> bool {
        self.0[i] > self.0[i + 1]
    }

    /// `#{k ≤ j : w(k) ≤ i}` for all `i, j`.
    pub fn rank_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.n();
        let mut r = vec![vec![0u8; n]; n];
        for i in 0..n {
            let mut c = 0;
            for j in 0..n {
                if self.at(j) <= i {
                    c += 1;
                }
                r[i][j] = c;
            }
        }
        r
    }

    /// Bruhat order: `self ≤ other`.
    pub fn bruhat_le(&self, other: &Perm) -> bool {
        assert_eq!(self.n(), other.n());
        let n = self.n();
        for i in 0..n {
            let (mut a, mut b) = (0, 0);
            for j in 0..n {
                if self.at(j) <= i {
                    a += 1;
                }
                if other.at(j) <= i {
                    b += 1;
                }
                if a < b {
                    return false;
                }
            }
        }
        true
    }

    /// Every permutation of size `n`, sorted by length then lexicographically.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (0..n as u8).collect();
        permute(&mut cur, 0, &mut out);
        out.sort_by(|a, b| a.length().cmp(&b.length()).then_with(|| a.cmp(b)));
        out
    }

    /// Longest element of the parabolic subgroup generated by `j`.
    pub fn longest_of_parabolic(n: usize, j: &SimpleSet) -> Perm {
        let mut v: Vec<u8> = (0..n as u8).collect();
        for (lo, hi) in j.blocks(n) {
            v[lo..hi].reverse();
        }
        Perm(v)
    }

    /// `self` is a minimal-length representative of `self · W_J`.
    pub fn is_min_coset_rep(&self, j: &SimpleSet) -> bool {
        j.iter().all(|i| self.0[i] < self.0[i + 1])
    }

    /// Minimal-length representative of `self · W_J`.
    pub fn min_coset_rep(&self, j: &SimpleSet) -> Perm {
        let mut v = self.0.clone();
        for (lo, hi) in j.blocks(self.n()) {
            v[lo..hi].sort_unstable();
        }
        Perm(v)
    }

    /// Maximal element of the double coset `W_J · self · W_J`.
    pub fn max_in_double_coset(&self, j: &SimpleSet) -> Perm {
        let mut w = self.clone();
        loop {
            let mut changed = false;
            for i in j.iter() {
                if !w.is_left_descent(i) {
                    w = w.left_mul(i);
                    changed = true;
                }
                if !w.is_right_descent(i) {
                    w = w.right_mul(i);
                    changed = true;
                }
            }
            if !changed {
                return w;
            }
        }
    }
}

fn permute(cur: &mut Vec<u8>, k: usize, out: &mut Vec<Perm>) {
    if k == cur.len() {
        out.push(Perm(cur.clone()));
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permute(cur, k + 1, out);
        cur.swap(k, i);
    }
}

impl fmt::Display for Perm {
    /// One-based word, e.g. `3412`; comma-separated when `n > 9`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| (v + 1).to_string()).collect();
        if self.n() > 9 {
            write!(f, "{}", parts.join(","))
        } else {
            write!(f, "{}", parts.concat())
        }
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid permutation word {0:?}")]
pub struct ParsePermError(pub String);

impl FromStr for Perm {
    type Err = ParsePermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParsePermError(s.to_string());
        let vals: Vec<u8> = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse::<u8>().map_err(|_| err())).collect::<Result<_, _>>()?
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(err)).collect::<Result<_, _>>()?
        };
        if vals.iter().any(|&v| v == 0 || v as usize > vals.len()) {
            return Err(err());
        }
        let v: Vec<u8> = vals.iter().map(|&v| v - 1).collect();
        let mut seen = vec![false; v.len()];
        for &x in &v {
            if seen[x as usize] {
                return Err(err());
            }
            seen[x as usize] = true;
        }
        Ok(Perm(v))
    }
}

/// A subset of the simple reflections `s_0, …, s_{n-2}` of `S_n`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SimpleSet(Vec<usize>);

impl SimpleSet {
    pub fn new(mut v: Vec<usize>) -> Self {
        v.sort_unstable();
        v.dedup();
        SimpleSet(v)
    }

    pub fn empty() -> Self {
        SimpleSet(Vec::new())
    }

    /// The Levi of block sizes `sizes`: every `s_i` interior to a block.
    pub fn from_block_sizes(sizes: &[usize]) -> Self {
        let mut v = Vec::new();
        let mut start = 0;
        for &s in sizes {
            for i in start..start + s.saturating_sub(1) {
                v.push(i);
            }
            start += s;
        }
        SimpleSet(v)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Half-open position ranges of the connected blocks of `W_J` in `S_n`.
    pub fn blocks(&self, n: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut lo = 0;
        for i in 0..n {
            if i + 1 == n || !self.contains(i) {
                out.push((lo, i + 1));
                lo = i + 1;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths_and_counts() {
        let all = Perm::all(4);
        assert_eq!(all.len(), 24);
        assert_eq!(all[0], Perm::identity(4));
        assert_eq!(all[23].length(), 6);
        let w: Perm = "3412".parse().unwrap();
        assert_eq!(w.length(), 4);
    }

    #[test]
    fn bruhat_basic() {
        let e = Perm::identity(3);
        let w0: Perm = "321".parse().unwrap();
        let s1: Perm = "213".parse().unwrap();
        let s2: Perm = "132".parse().unwrap();
        assert!(e.bruhat_le(&w0));
        assert!(s1.bruhat_le(&w0));
        assert!(!s1.bruhat_le(&s2));
        assert!(!s2.bruhat_le(&s1));
        assert!(!w0.bruhat_le(&e));
    }

    #[test]
    fn bruhat_agrees_with_subword_property_in_s4() {
        // x ≤ w iff x is reachable from w by a chain of length-decreasing
        // transpositions; compare against that definition.
        let all = Perm::all(4);
        let reach = |w: &Perm| {
            let mut seen = std::collections::HashSet::new();
            let mut stack = vec![w.clone()];
            while let Some(u) = stack.pop() {
                if !seen.insert(u.clone()) {
                    continue;
                }
                for a in 0..4 {
                    for b in a + 1..4 {
                        let mut v = u.values().to_vec();
                        v.swap(a, b);
                        let t = Perm::from_vec(v);
                        if t.length() < u.length() {
                            stack.push(t);
                        }
                    }
                }
            }
            seen
        };
        for w in &all {
            let below = reach(w);
            for x in &all {
                assert_eq!(x.bruhat_le(w), below.contains(x), "{x} vs {w}");
            }
        }
    }

    #[test]
    fn coset_reps() {
        let j = SimpleSet::from_block_sizes(&[2, 2]);
        assert_eq!(j.blocks(4), vec![(0, 2), (2, 4)]);
        let w: Perm = "4231".parse().unwrap();
        let m = w.min_coset_rep(&j);
        assert_eq!(m.to_string(), "2413");
        assert!(m.is_min_coset_rep(&j));
        let top = Perm::identity(4).max_in_double_coset(&j);
        assert_eq!(top, Perm::longest_of_parabolic(4, &j));
    }
}
