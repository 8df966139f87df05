//! Orbits of a standard parabolic `P` on `G/P` for GL(n): the position of a
//! flag relative to the standard one, and the matching double coset of
//! permutations.

use serde::{Deserialize, Serialize};

use crate::kflag::PartialFlag;
use crate::lie::EntrySpace;
use crate::linalg::IntMatrix;
use crate::perm::{Perm, SimpleSet};

/// `table[a][b]`: how many dimensions block `a` of the flag adds inside
/// block `b` of the standard coordinate flag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PTable(pub Vec<Vec<usize>>);

fn cumulative(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    out.push(0);
    for &s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}

/// Block sizes of a step pattern.
pub fn sizes_of(n: usize, steps: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut prev = 0;
    for &d in steps.iter().chain(std::iter::once(&n)) {
        out.push(d - prev);
        prev = d;
    }
    out
}

impl PTable {
    /// Relative position of `f` (with the given block sizes) and the
    /// standard flag.
    pub fn of_flag(f: &PartialFlag, sizes: &[usize]) -> PTable {
        let b = f.matrix();
        let n = f.n;
        let cum = cumulative(sizes);
        let k = sizes.len();
        // D[s][t] = dim(F_{cum[s]} ∩ E_{cum[t]})
        let mut d = vec![vec![0usize; k + 1]; k + 1];
        for s in 1..=k {
            let fs = b.leading_columns(cum[s]);
            for t in 1..=k {
                let mut cols: Vec<Vec<i64>> = (0..cum[s]).map(|j| fs.column(j)).collect();
                for i in 0..cum[t] {
                    let mut e = vec![0; n];
                    e[i] = 1;
                    cols.push(e);
                }
                let r = IntMatrix::from_columns(n, &cols).rank();
                d[s][t] = cum[s] + cum[t] - r;
            }
        }
        let mut c = vec![vec![0usize; k]; k];
        for a in 0..k {
            for bb in 0..k {
                c[a][bb] = d[a + 1][bb + 1] + d[a][bb] - d[a][bb + 1] - d[a + 1][bb];
            }
        }
        PTable(c)
    }

    /// A permutation in the double coset: block `a` of positions takes its
    /// values from coordinate blocks in increasing order.
    pub fn representative(&self, sizes: &[usize]) -> Perm {
        let cum = cumulative(sizes);
        let mut next: Vec<usize> = cum[..sizes.len()].to_vec();
        let mut w = Vec::new();
        for row in &self.0 {
            for (b, &m) in row.iter().enumerate() {
                for _ in 0..m {
                    w.push(next[b] as u8);
                    next[b] += 1;
                }
            }
        }
        Perm::from_vec(w)
    }

    pub fn of_perm(w: &Perm, sizes: &[usize]) -> PTable {
        let cum = cumulative(sizes);
        let k = sizes.len();
        let block = |v: usize| (0..k).find(|&b| v < cum[b + 1]).unwrap();
        let mut c = vec![vec![0usize; k]; k];
        for a in 0..k {
            for pos in cum[a]..cum[a + 1] {
                c[a][block(w.at(pos))] += 1;
            }
        }
        PTable(c)
    }

    /// Every table with the given row and column sums.
    pub fn all(sizes: &[usize]) -> Vec<PTable> {
        let k = sizes.len();
        let mut out = Vec::new();
        let mut cur = vec![vec![0usize; k]; k];
        let mut col_left = sizes.to_vec();
        fill(sizes, 0, 0, &mut cur, &mut col_left, sizes[0], &mut out);
        out
    }
}

fn fill(
    sizes: &[usize],
    a: usize,
    b: usize,
    cur: &mut Vec<Vec<usize>>,
    col_left: &mut Vec<usize>,
    row_left: usize,
    out: &mut Vec<PTable>,
) {
    let k = sizes.len();
    if a == k {
        out.push(PTable(cur.clone()));
        return;
    }
    if b == k - 1 {
        if row_left > col_left[b] {
            return;
        }
        cur[a][b] = row_left;
        col_left[b] -= row_left;
        let next_row = if a + 1 < k { sizes[a + 1] } else { 0 };
        fill(sizes, a + 1, 0, cur, col_left, next_row, out);
        col_left[b] += row_left;
        cur[a][b] = 0;
        return;
    }
    for m in 0..=row_left.min(col_left[b]) {
        cur[a][b] = m;
        col_left[b] -= m;
        fill(sizes, a, b + 1, cur, col_left, row_left - m, out);
        col_left[b] += m;
    }
    cur[a][b] = 0;
}

pub fn block_labels(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for (j, &s) in sizes.iter().enumerate() {
        out.extend(std::iter::repeat_n(j, s));
    }
    out
}

/// `dim P − dim Stab_𝔭(F)` by exact rank.
pub fn p_orbit_dimension(f: &PartialFlag, sizes: &[usize]) -> usize {
    let p = EntrySpace::block_upper(&block_labels(sizes));
    p.dim() - p.flag_stabilizer_dim(&f.matrix(), &f.steps)
}

/// Longest element of the double coset `W_J w W_J`.
pub fn double_coset_max(w: &Perm, sizes: &[usize]) -> Perm {
    w.max_in_double_coset(&SimpleSet::from_block_sizes(sizes))
}

/// Minimal representative of `w_max W_J` for the double coset of `w`.
pub fn coset_parameter(w: &Perm, sizes: &[usize]) -> Perm {
    let j = SimpleSet::from_block_sizes(sizes);
    w.max_in_double_coset(&j).min_coset_rep(&j)
}
