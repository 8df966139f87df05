//! Clans: the combinatorial parameters of GL(p)×GL(q)-orbits on the full
//! flag variety of GL(p+q), with their length function and the action of
//! simple reflections.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tok {
    Plus,
    Minus,
    /// Matched with the given position.
    Pair(u8),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Clan(Vec<Tok>);

/// How a simple reflection `s_i` (positions `i, i+1`) acts on an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootKind {
    Compact,
    /// Noncompact imaginary, type I.
    Noncompact,
    Real,
    ComplexAscent,
    ComplexDescent,
}

impl RootKind {
    pub fn label(&self) -> &'static str {
        match self {
            RootKind::Compact => "compact imaginary",
            RootKind::Noncompact => "noncompact imaginary type I",
            RootKind::Real => "real",
            RootKind::ComplexAscent => "complex ascent",
            RootKind::ComplexDescent => "complex descent",
        }
    }

    pub fn is_descent(&self) -> bool {
        matches!(self, RootKind::Real | RootKind::ComplexDescent)
    }
}

impl Clan {
    pub fn new(toks: Vec<Tok>) -> Self {
        for (i, t) in toks.iter().enumerate() {
            if let Tok::Pair(j) = t {
                let j = *j as usize;
                assert!(j != i && j < toks.len() && toks[j] == Tok::Pair(i as u8), "unmatched pair at {i}");
            }
        }
        Clan(toks)
    }

    pub fn toks(&self) -> &[Tok] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Matched pairs `(i, j)` with `i < j`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, t)| match t {
                Tok::Pair(j) if (*j as usize) > i => Some((i, *j as usize)),
                _ => None,
            })
            .collect()
    }

    /// `(p, q)`: each pair contributes to both.
    pub fn signature(&self) -> (usize, usize) {
        let plus = self.0.iter().filter(|t| **t == Tok::Plus).count();
        let minus = self.0.iter().filter(|t| **t == Tok::Minus).count();
        let pairs = (self.n() - plus - minus) / 2;
        (plus + pairs, minus + pairs)
    }

    /// `Σ_{pairs (i<j)} (j − i − #{pairs (s,t) : s < i < t < j})`.
    pub fn length(&self) -> usize {
        let pairs = self.pairs();
        pairs
            .iter()
            .map(|&(i, j)| j - i - pairs.iter().filter(|&&(s, t)| s < i && i < t && t < j).count())
            .sum()
    }

    /// Dimension of the orbit: length plus the dimension of a closed orbit.
    pub fn orbit_dim(&self) -> usize {
        let (p, q) = self.signature();
        self.length() + p * p.saturating_sub(1) / 2 + q * q.saturating_sub(1) / 2
    }

    fn swapped(&self, i: usize) -> Clan {
        let mut v = self.0.clone();
        v.swap(i, i + 1);
        for t in v.iter_mut() {
            if let Tok::Pair(j) = t {
                if *j as usize == i {
                    *j = (i + 1) as u8;
                } else if *j as usize == i + 1 {
                    *j = i as u8;
                }
            }
        }
        Clan(v)
    }

    pub fn kind(&self, i: usize) -> RootKind {
        match (self.0[i], self.0[i + 1]) {
            (Tok::Plus, Tok::Plus) | (Tok::Minus, Tok::Minus) => RootKind::Compact,
            (Tok::Plus, Tok::Minus) | (Tok::Minus, Tok::Plus) => RootKind::Noncompact,
            (Tok::Pair(j), _) if j as usize == i + 1 => RootKind::Real,
            _ => {
                let (a, b) = (self.length(), self.swapped(i).length());
                assert_ne!(a, b, "complex reflection must change length");
                if b > a {
                    RootKind::ComplexAscent
                } else {
                    RootKind::ComplexDescent
                }
            }
        }
    }

    /// Cross action `s_i × γ`.
    pub fn cross(&self, i: usize) -> Clan {
        match self.kind(i) {
            RootKind::Real | RootKind::Compact => self.clone(),
            _ => self.swapped(i),
        }
    }

    /// Cayley transform through a noncompact root.
    pub fn cayley(&self, i: usize) -> Option<Clan> {
        if self.kind(i) != RootKind::Noncompact {
            return None;
        }
        let mut v = self.0.clone();
        v[i] = Tok::Pair((i + 1) as u8);
        v[i + 1] = Tok::Pair(i as u8);
        Some(Clan(v))
    }

    /// The two inverse Cayley transforms through a real root.
    pub fn inverse_cayley(&self, i: usize) -> Option<[Clan; 2]> {
        if self.kind(i) != RootKind::Real {
            return None;
        }
        let mut a = self.0.clone();
        a[i] = Tok::Plus;
        a[i + 1] = Tok::Minus;
        let mut b = self.0.clone();
        b[i] = Tok::Minus;
        b[i + 1] = Tok::Plus;
        Some([Clan(a), Clan(b)])
    }

    /// Every clan of signature `(p, q)`, sorted by length then text.
    pub fn all(p: usize, q: usize) -> Vec<Clan> {
        let n = p + q;
        let mut out = Vec::new();
        let mut cur = vec![Tok::Plus; n];
        gen(&mut cur, 0, p, q, &mut Vec::new(), &mut out);
        out.sort_by(|a, b| a.length().cmp(&b.length()).then_with(|| a.to_string().cmp(&b.to_string())));
        out
    }

    /// Unique clan of maximal length for `(p, q)`.
    pub fn open(p: usize, q: usize) -> Clan {
        Clan::all(p, q).pop().expect("nonempty")
    }
}

fn gen(cur: &mut Vec<Tok>, k: usize, p: usize, q: usize, open: &mut Vec<usize>, out: &mut Vec<Clan>) {
    let n = cur.len();
    // p, q count what remains to be placed; an open pair already consumed one of each.
    if k == n {
        if open.is_empty() && p == 0 && q == 0 {
            out.push(Clan(cur.clone()));
        }
        return;
    }
    if open.len() > n - k {
        return;
    }
    if p > 0 {
        cur[k] = Tok::Plus;
        gen(cur, k + 1, p - 1, q, open, out);
    }
    if q > 0 {
        cur[k] = Tok::Minus;
        gen(cur, k + 1, p, q - 1, open, out);
    }
    if p > 0 && q > 0 {
        open.push(k);
        cur[k] = Tok::Pair(u8::MAX);
        gen(cur, k + 1, p - 1, q - 1, open, out);
        open.pop();
    }
    for idx in 0..open.len() {
        let s = open.remove(idx);
        cur[s] = Tok::Pair(k as u8);
        cur[k] = Tok::Pair(s as u8);
        gen(cur, k + 1, p, q, open, out);
        cur[s] = Tok::Pair(u8::MAX);
        open.insert(idx, s);
    }
}

impl fmt::Display for Clan {
    /// Space-separated tokens; pairs are numbered from 1 in order of opening.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut label = vec![0usize; self.n()];
        let mut next = 1;
        let mut parts = Vec::with_capacity(self.n());
        for (i, t) in self.0.iter().enumerate() {
            parts.push(match t {
                Tok::Plus => "+".to_string(),
                Tok::Minus => "-".to_string(),
                Tok::Pair(j) => {
                    let j = *j as usize;
                    if j > i {
                        label[i] = next;
                        next += 1;
                        label[i].to_string()
                    } else {
                        label[j].to_string()
                    }
                }
            });
        }
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for Clan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Clan({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid clan {0:?}")]
pub struct ParseClanError(pub String);

impl FromStr for Clan {
    type Err = ParseClanError;

    /// Accepts space-separated tokens, or a compact form without spaces
    /// when every pair label is a single digit.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseClanError(s.to_string());
        let tokens: Vec<String> = if s.contains(char::is_whitespace) {
            s.split_whitespace().map(str::to_string).collect()
        } else {
            s.chars().map(|c| c.to_string()).collect()
        };
        let mut toks = vec![Tok::Plus; tokens.len()];
        let mut first: std::collections::HashMap<String, usize> = Default::default();
        for (i, t) in tokens.iter().enumerate() {
            match t.as_str() {
                "+" => toks[i] = Tok::Plus,
                "-" => toks[i] = Tok::Minus,
                lbl => {
                    lbl.parse::<usize>().map_err(|_| err())?;
                    match first.remove(lbl) {
                        Some(j) => {
                            toks[j] = Tok::Pair(i as u8);
                            toks[i] = Tok::Pair(j as u8);
                        }
                        None => {
                            first.insert(lbl.to_string(), i);
                        }
                    }
                }
            }
        }
        if !first.is_empty() {
            return Err(err());
        }
        Ok(Clan(toks))
    }
}
