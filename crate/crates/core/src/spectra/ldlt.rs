//! Envelope `L D L^T` factorization of a sparse symmetric positive definite
//! matrix under a reverse Cuthill-McKee ordering.

use std::collections::VecDeque;

use crate::assemble::SymMatrix;

use super::SpectraError;

/// Smallest admissible pivot relative to the diagonal entry of its row.
const PIVOT_TOL: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct Ldlt {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    /// First column of the envelope of each row.
    first: Vec<usize>,
    /// Start of each row's envelope in `lower`.
    start: Vec<usize>,
    /// Strictly lower part of `L`, row by row over the envelope.
    lower: Vec<f64>,
    diag: Vec<f64>,
}

impl Ldlt {
    pub fn factor(a: &SymMatrix) -> Result<Ldlt, SpectraError> {
        let n = a.dim();
        let m = a.csr();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        let mut first: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let (cols, _) = m.row(perm[i]);
            for &j in cols {
                first[i] = first[i].min(inv[j]);
            }
        }
        let mut start = vec![0; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i]);
        }
        let mut lower = vec![0.0; start[n]];
        let mut diag = vec![0.0; n];

        let mut work = vec![0.0; n];
        for i in 0..n {
            let fi = first[i];
            let (cols, vals) = m.row(perm[i]);
            let mut aii = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                let jn = inv[j];
                if jn < i {
                    lower[start[i] + jn - fi] = v;
                } else if jn == i {
                    aii = v;
                }
            }
            // w_j = L_ij d_j is accumulated in `work`, L_ij stored in `lower`
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = lower[start[i] + j - fi];
                let row_j = &lower[start[j]..start[j + 1]];
                for k in k0..j {
                    s -= work[k] * row_j[k - fj];
                }
                work[j] = s;
                lower[start[i] + j - fi] = s / diag[j];
            }
            let mut d = aii;
            for j in fi..i {
                d -= work[j] * lower[start[i] + j - fi];
            }
            if !(d > PIVOT_TOL * aii.abs()) {
                return Err(SpectraError::FactorizationFailure { row: perm[i], pivot: d });
            }
            diag[i] = d;
        }
        Ok(Ldlt {
            n,
            perm,
            first,
            start,
            lower,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Ratio of the largest to the smallest pivot.
    pub fn cond_estimate(&self) -> f64 {
        if self.n == 0 {
            return 1.0;
        }
        let max = self.diag.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.diag.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    pub fn envelope_size(&self) -> usize {
        self.lower.len()
    }

    /// `L^{-1} P b`, in the permuted ordering.
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..self.n {
            let fi = self.first[i];
            let row = &self.lower[self.start[i]..self.start[i + 1]];
            let mut s = y[i];
            for (k, l) in row.iter().enumerate() {
                s -= l * y[fi + k];
            }
            y[i] = s;
        }
        y
    }

    pub fn pivots(&self) -> &[f64] {
        &self.diag
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut y = self.forward(b);
        for (yi, d) in y.iter_mut().zip(&self.diag) {
            *yi /= d;
        }
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let row = &self.lower[self.start[i]..self.start[i + 1]];
            let yi = y[i];
            for (k, l) in row.iter().enumerate() {
                y[fi + k] -= l * yi;
            }
        }
        let mut x = vec![0.0; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

/// Reverse Cuthill-McKee ordering, each connected component started from a
/// pseudo-peripheral node. Ties are broken by index, so the ordering is
/// deterministic.
pub fn reverse_cuthill_mckee(a: &SymMatrix) -> Vec<usize> {
    let n = a.dim();
    let m = a.csr();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| m.row(i).0.iter().copied().filter(|&j| j != i).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();

    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        let root = pseudo_peripheral(seed, &adj, &degree);
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(root: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut level = vec![None; adj.len()];
    level[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let l = level[v].unwrap();
        for &w in &adj[v] {
            if level[w].is_none() {
                level[w] = Some(l + 1);
                queue.push_back(w);
            }
        }
    }
    level
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize]) -> usize {
    let depth_of = |level: &[Option<usize>]| level.iter().flatten().copied().max().unwrap_or(0);
    let mut root = seed;
    let mut level = bfs_levels(root, adj);
    let mut depth = depth_of(&level);
    loop {
        let candidate = (0..adj.len())
            .filter(|&v| level[v] == Some(depth))
            .min_by_key(|&v| (degree[v], v))
            .unwrap();
        let cand_level = bfs_levels(candidate, adj);
        let cand_depth = depth_of(&cand_level);
        if cand_depth <= depth {
            return root;
        }
        root = candidate;
        level = cand_level;
        depth = cand_depth;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assemble::CsrMatrix;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, seed: u64) -> SymMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0 + rng.gen::<f64>()));
            if i + 1 < n {
                let v = rng.gen::<f64>() - 0.5;
                t.push((i, i + 1, v));
                t.push((i + 1, i, v));
            }
            let j = (i * 7 + 3) % n;
            if j != i {
                let v = 0.3 * (rng.gen::<f64>() - 0.5);
                t.push((i, j, v));
                t.push((j, i, v));
            }
        }
        SymMatrix::new(CsrMatrix::from_triplets(n, n, t)).unwrap()
    }

    #[test]
    fn solves_match_dense_solver() {
        let a = random_spd(40, 3);
        let f = Ldlt::factor(&a).unwrap();
        let b: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let x = f.solve(&b);
        let dense = a.to_dense().cholesky().unwrap();
        let want = dense.solve(&DMatrix::from_column_slice(40, 1, &b));
        for i in 0..40 {
            assert!((x[i] - want[i]).abs() < 1e-12);
        }
        assert!(f.cond_estimate() >= 1.0);
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = random_spd(25, 9);
        let mut p = reverse_cuthill_mckee(&a);
        p.sort();
        assert_eq!(p, (0..25).collect::<Vec<_>>());
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let t = vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)];
        let a = SymMatrix::new(CsrMatrix::from_triplets(2, 2, t)).unwrap();
        assert!(matches!(
            Ldlt::factor(&a),
            Err(SpectraError::FactorizationFailure { .. })
        ));
    }
}
