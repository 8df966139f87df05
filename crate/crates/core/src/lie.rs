//! Subalgebras of `𝔤𝔩(n)` cut out by allowed matrix entries, and the linear
//! conditions used to compute stabilizers exactly.

use crate::linalg::IntMatrix;

/// The span of the elementary matrices `E_{rc}` for the listed entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntrySpace {
    pub n: usize,
    pub entries: Vec<(usize, usize)>,
}

impl EntrySpace {
    pub fn full(n: usize) -> Self {
        Self::filtered(n, |_, _| true)
    }

    pub fn filtered(n: usize, keep: impl Fn(usize, usize) -> bool) -> Self {
        let mut entries = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if keep(r, c) {
                    entries.push((r, c));
                }
            }
        }
        EntrySpace { n, entries }
    }

    /// Block-diagonal matrices for the given block labels per coordinate.
    pub fn block_diagonal(block_of: &[usize]) -> Self {
        Self::filtered(block_of.len(), |r, c| block_of[r] == block_of[c])
    }

    /// Block upper triangular matrices.
    pub fn block_upper(block_of: &[usize]) -> Self {
        Self::filtered(block_of.len(), |r, c| block_of[r] <= block_of[c])
    }

    /// Entries joining coordinates of equal parity class.
    pub fn same_class(class: &[bool]) -> Self {
        Self::filtered(class.len(), |r, c| class[r] == class[c])
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Rows expressing `[y, x] = 0` in the unknown entries of `y`.
    pub fn commutator_rows(&self, x: &IntMatrix) -> Vec<Vec<i64>> {
        let n = self.n;
        let mut rows = vec![vec![0i64; self.entries.len()]; n * n];
        // ([y,x])_{ab} = Σ_k y_{ak} x_{kb} − x_{ak} y_{kb}
        for (u, &(r, c)) in self.entries.iter().enumerate() {
            for b in 0..n {
                let v = x.get(c, b);
                if v != 0 {
                    rows[r * n + b][u] += v;
                }
            }
            for a in 0..n {
                let v = x.get(a, r);
                if v != 0 {
                    rows[a * n + c][u] -= v;
                }
            }
        }
        rows.retain(|r| r.iter().any(|&v| v != 0));
        rows
    }

    /// Rows expressing `y · span(B[:, ..d]) ⊆ span(B[:, ..d])` for each step `d`.
    pub fn flag_rows(&self, basis: &IntMatrix, steps: &[usize]) -> Vec<Vec<i64>> {
        let mut rows = Vec::new();
        for &d in steps {
            let b = basis.leading_columns(d);
            let ann = b.left_nullspace();
            for a in 0..ann.rows() {
                for col in 0..d {
                    let row: Vec<i64> = self.entries.iter().map(|&(r, c)| ann.get(a, r) * b.get(c, col)).collect();
                    if row.iter().any(|&v| v != 0) {
                        rows.push(row);
                    }
                }
            }
        }
        rows
    }

    /// Dimension of the subspace where all rows vanish.
    pub fn solution_dim(&self, rows: &[Vec<i64>]) -> usize {
        if rows.is_empty() {
            return self.entries.len();
        }
        self.entries.len() - IntMatrix::from_rows(rows).rank()
    }

    pub fn centralizer_dim(&self, x: &IntMatrix) -> usize {
        self.solution_dim(&self.commutator_rows(x))
    }

    pub fn flag_stabilizer_dim(&self, basis: &IntMatrix, steps: &[usize]) -> usize {
        self.solution_dim(&self.flag_rows(basis, steps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centralizer_of_regular_nilpotent() {
        let x = IntMatrix::from_rows(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0]]);
        assert_eq!(EntrySpace::full(3).centralizer_dim(&x), 3);
        assert_eq!(EntrySpace::full(3).centralizer_dim(&IntMatrix::zeros(3, 3)), 9);
    }

    #[test]
    fn borel_stabilizes_standard_flag() {
        let id = IntMatrix::identity(3);
        let full = EntrySpace::full(3);
        assert_eq!(full.flag_stabilizer_dim(&id, &[1, 2]), 6);
        assert_eq!(full.flag_stabilizer_dim(&id, &[1]), 7);
    }
}
