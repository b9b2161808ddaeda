//! Sparse symmetric positive-definite direct solver.
//!
//! An LDL^T factorization without pivoting on a reverse Cuthill-McKee
//! reordering. The sparsity pattern is analyzed once and the numeric
//! factorization can be repeated for new values on the same pattern, which is
//! what the active-set contact loop needs: the elastic stiffness stays fixed
//! while penalty terms switch on and off.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Direct solver for a symmetric positive-definite matrix with a fixed
/// sparsity pattern. Values are supplied per [`SpdSolver::factor`] call in
/// the entry order given to [`SpdSolver::new`]; duplicate coordinates
/// accumulate.
pub struct SpdSolver<S> {
    n: usize,
    /// new index -> old index
    perm: Vec<usize>,
    /// input entry -> slot in `vals`
    scatter: Vec<usize>,
    /// permuted upper-triangular CSC pattern
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<S>,
    // elimination tree and column counts of L
    parent: Vec<usize>,
    l_col_ptr: Vec<usize>,
    l_row_idx: Vec<usize>,
    l_vals: Vec<S>,
    diag: Vec<S>,
    factored: bool,
}

const NONE: usize = usize::MAX;

impl<S: Scalar> SpdSolver<S> {
    /// Analyzes the pattern given by coordinate `entries` (any order, both
    /// triangles or one, duplicates allowed) for an `n x n` symmetric matrix.
    pub fn new(n: usize, entries: &[(usize, usize)]) -> Result<Self> {
        for &(i, j) in entries {
            if i >= n || j >= n {
                return Err(Error::SolveFailure(format!(
                    "entry ({i}, {j}) outside {n} x {n} matrix"
                )));
            }
        }
        let perm = rcm_ordering(n, entries);
        let mut iperm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        // Permuted upper-triangular coordinates for every input entry.
        let upper: Vec<(usize, usize)> = entries
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (iperm[i], iperm[j]);
                (a.min(b), a.max(b))
            })
            .collect();
        // Unique, column-major sorted pattern.
        let mut sorted: Vec<(usize, usize)> = upper.clone();
        sorted.sort_by_key(|&(r, c)| (c, r));
        sorted.dedup();
        let mut col_ptr = vec![0usize; n + 1];
        for &(_, c) in &sorted {
            col_ptr[c + 1] += 1;
        }
        for c in 0..n {
            col_ptr[c + 1] += col_ptr[c];
        }
        let row_idx: Vec<usize> = sorted.iter().map(|&(r, _)| r).collect();
        // Map each input entry to its slot via binary search per column.
        let scatter = upper
            .iter()
            .map(|&(r, c)| {
                let lo = col_ptr[c];
                let hi = col_ptr[c + 1];
                lo + row_idx[lo..hi].partition_point(|&x| x < r)
            })
            .collect();
        let mut solver = Self {
            n,
            perm,
            scatter,
            col_ptr,
            row_idx,
            vals: vec![S::zero(); sorted.len()],
            parent: vec![NONE; n],
            l_col_ptr: vec![0; n + 1],
            l_row_idx: Vec::new(),
            l_vals: Vec::new(),
            diag: vec![S::zero(); n],
            factored: false,
        };
        solver.symbolic();
        Ok(solver)
    }

    /// Elimination tree and column counts of L (Liu's algorithm on the
    /// upper-triangular pattern).
    fn symbolic(&mut self) {
        let n = self.n;
        let mut l_nz = vec![0usize; n];
        let mut flag = vec![NONE; n];
        for j in 0..n {
            self.parent[j] = NONE;
            flag[j] = j;
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                let mut i = self.row_idx[p];
                while flag[i] != j {
                    if self.parent[i] == NONE {
                        self.parent[i] = j;
                    }
                    l_nz[i] += 1;
                    flag[i] = j;
                    i = self.parent[i];
                }
            }
        }
        self.l_col_ptr[0] = 0;
        for j in 0..n {
            self.l_col_ptr[j + 1] = self.l_col_ptr[j] + l_nz[j];
        }
        let total = self.l_col_ptr[n];
        self.l_row_idx = vec![0; total];
        self.l_vals = vec![S::zero(); total];
    }

    /// Numeric factorization for `values` aligned with the constructor's
    /// entry list. Fails when a pivot is not strictly positive.
    pub fn factor(&mut self, values: &[S]) -> Result<()> {
        assert_eq!(values.len(), self.scatter.len(), "value/entry count mismatch");
        for v in self.vals.iter_mut() {
            *v = S::zero();
        }
        for (k, &slot) in self.scatter.iter().enumerate() {
            self.vals[slot] = self.vals[slot] + values[k];
        }
        let n = self.n;
        let mut y = vec![S::zero(); n];
        let mut pattern = vec![0usize; n];
        let mut stack = vec![0usize; n];
        let mut flag = vec![NONE; n];
        let mut l_next: Vec<usize> = self.l_col_ptr[..n].to_vec();
        for j in 0..n {
            let mut top = n;
            flag[j] = j;
            y[j] = S::zero();
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                let mut i = self.row_idx[p];
                y[i] = y[i] + self.vals[p];
                let mut len = 0;
                while flag[i] != j {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = j;
                    i = self.parent[i];
                }
                while len > 0 {
                    len -= 1;
                    top -= 1;
                    stack[top] = pattern[len];
                }
            }
            let mut d = y[j];
            y[j] = S::zero();
            for &i in &stack[top..n] {
                let yi = y[i];
                y[i] = S::zero();
                for p in self.l_col_ptr[i]..l_next[i] {
                    let r = self.l_row_idx[p];
                    y[r] = y[r] - self.l_vals[p] * yi;
                }
                let lji = yi / self.diag[i];
                d = d - lji * yi;
                self.l_row_idx[l_next[i]] = j;
                self.l_vals[l_next[i]] = lji;
                l_next[i] += 1;
            }
            if !(d > S::zero()) || !d.is_finite() {
                self.factored = false;
                return Err(Error::SolveFailure(format!(
                    "non-positive pivot {d:e} at column {j}; system is singular or indefinite"
                )));
            }
            self.diag[j] = d;
        }
        self.factored = true;
        Ok(())
    }

    /// Solves `A x = b` using the current factorization.
    pub fn solve(&self, b: &[S]) -> Result<Vec<S>> {
        if !self.factored {
            return Err(Error::SolveFailure("factor() has not succeeded".into()));
        }
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x = vec![S::zero(); n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[new] = b[old];
        }
        // L z = b (unit lower triangular, stored by columns)
        for j in 0..n {
            let xj = x[j];
            for p in self.l_col_ptr[j]..self.l_col_ptr[j + 1] {
                let r = self.l_row_idx[p];
                x[r] = x[r] - self.l_vals[p] * xj;
            }
        }
        for j in 0..n {
            x[j] = x[j] / self.diag[j];
        }
        // L^T y = z
        for j in (0..n).rev() {
            let mut xj = x[j];
            for p in self.l_col_ptr[j]..self.l_col_ptr[j + 1] {
                xj = xj - self.l_vals[p] * x[self.l_row_idx[p]];
            }
            x[j] = xj;
        }
        let mut out = vec![S::zero(); n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// Reverse Cuthill-McKee ordering of the adjacency graph of the pattern.
/// Returns `perm` with `perm[new] = old`.
fn rcm_ordering(n: usize, entries: &[(usize, usize)]) -> Vec<usize> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j) in entries {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (adj[v].len(), v));
    for &start in &by_degree {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (adj[w].len(), w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Backward-error style relative residual `|Ax - b| / (|A||x| + |b|)` in the
/// infinity norm, from the coordinate form of the matrix.
pub fn relative_residual<S: Scalar>(
    n: usize,
    entries: &[(usize, usize)],
    values: &[S],
    x: &[S],
    b: &[S],
) -> S {
    let mut r: Vec<S> = b.to_vec();
    let mut ax_mag = vec![S::zero(); n];
    for (k, &(i, j)) in entries.iter().enumerate() {
        let v = values[k];
        r[i] = r[i] - v * x[j];
        ax_mag[i] = ax_mag[i] + v.abs() * x[j].abs();
        if i != j {
            r[j] = r[j] - v * x[i];
            ax_mag[j] = ax_mag[j] + v.abs() * x[i].abs();
        }
    }
    let num = r.iter().fold(S::zero(), |a, &v| a.max(v.abs()));
    let den = (0..n).fold(S::zero(), |a, i| a.max(ax_mag[i] + b[i].abs()));
    if den == S::zero() {
        num
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Dense reference solve by Gaussian elimination for small checks.
    fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
        let mut rhs = b.to_vec();
        for k in 0..n {
            let piv = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
            m.swap(k, piv);
            rhs.swap(k, piv);
            for i in (k + 1)..n {
                let f = m[i][k] / m[k][k];
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                rhs[i] -= f * rhs[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for j in (i + 1)..n {
                s -= m[i][j] * x[j];
            }
            x[i] = s / m[i][i];
        }
        x
    }

    #[test]
    fn matches_dense_reference() {
        // Random-ish SPD matrix: M = B^T B + I on a ring pattern.
        let n = 12;
        let mut dense = vec![vec![0.0f64; n]; n];
        let mut entries = Vec::new();
        let mut values = Vec::new();
        for i in 0..n {
            let d = 4.0 + (i as f64) * 0.1;
            dense[i][i] = d;
            entries.push((i, i));
            values.push(d);
            let j = (i + 1) % n;
            let off = -1.0 - 0.01 * (i as f64);
            dense[i][j] += off;
            dense[j][i] += off;
            entries.push((i, j));
            values.push(off);
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 1.5).collect();
        let mut solver = SpdSolver::new(n, &entries).unwrap();
        solver.factor(&values).unwrap();
        let x = solver.solve(&b).unwrap();
        let x_ref = dense_solve(&dense, &b);
        for i in 0..n {
            assert_relative_eq!(x[i], x_ref[i], max_relative = 1e-12);
        }
        assert!(relative_residual(n, &entries, &values, &x, &b) < 1e-14);
    }

    #[test]
    fn refactor_with_new_values() {
        let entries = vec![(0, 0), (1, 1), (0, 1)];
        let mut solver = SpdSolver::new(2, &entries).unwrap();
        solver.factor(&[2.0, 2.0, -1.0]).unwrap();
        let x = solver.solve(&[1.0, 0.0]).unwrap();
        assert_relative_eq!(x[0], 2.0 / 3.0, max_relative = 1e-14);
        solver.factor(&[4.0, 4.0, -1.0]).unwrap();
        let x = solver.solve(&[1.0, 0.0]).unwrap();
        assert_relative_eq!(x[0], 4.0 / 15.0, max_relative = 1e-14);
    }

    #[test]
    fn duplicate_entries_accumulate() {
        let entries = vec![(0, 0), (0, 0)];
        let mut solver = SpdSolver::new(1, &entries).unwrap();
        solver.factor(&[1.5, 2.5]).unwrap();
        let x = solver.solve(&[8.0]).unwrap();
        assert_relative_eq!(x[0], 2.0);
    }

    #[test]
    fn lower_triangle_input_accepted() {
        let entries = vec![(0, 0), (1, 1), (1, 0)];
        let mut solver = SpdSolver::new(2, &entries).unwrap();
        solver.factor(&[2.0, 2.0, -1.0]).unwrap();
        let x = solver.solve(&[1.0, 1.0]).unwrap();
        assert_relative_eq!(x[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(x[1], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn indefinite_rejected() {
        let entries = vec![(0, 0), (1, 1)];
        let mut solver = SpdSolver::new(2, &entries).unwrap();
        let err = solver.factor(&[1.0, -1.0]).unwrap_err();
        assert!(matches!(err, Error::SolveFailure(_)));
    }

    #[test]
    fn f32_path_works() {
        let entries = vec![(0usize, 0usize), (1, 1), (0, 1)];
        let mut solver = SpdSolver::<f32>::new(2, &entries).unwrap();
        solver.factor(&[2.0, 2.0, -1.0]).unwrap();
        let x = solver.solve(&[1.0, 0.0]).unwrap();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-6);
    }
}
