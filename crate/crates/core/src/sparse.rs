//! Symmetric sparse matrices and an envelope (skyline) Cholesky solver with
//! reverse Cuthill–McKee ordering.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::ComplexField;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SparseError {
    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
}

/// Compressed sparse rows with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries. The sort is stable, so duplicates are summed in
    /// the order they were pushed and the result is reproducible bit for bit.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals: Vec<f64> = Vec::new();
        let mut last = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().expect("entry exists") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// `max |A_ij − A_ji| / max |A_ij|`.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }
}

/// Reverse Cuthill–McKee ordering of the matrix graph; `order[new] = old`.
/// Each component starts from a pseudo-peripheral vertex.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).filter(|&(j, _)| j != i).count()).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut level = vec![usize::MAX; n];

    // Breadth-first levels from `root` inside the unplaced part; returns the
    // visited vertices in BFS order.
    let bfs = |root: usize, level: &mut [usize], placed: &[bool]| -> Vec<usize> {
        let mut seen = vec![root];
        level[root] = 0;
        let mut head = 0;
        while head < seen.len() {
            let v = seen[head];
            head += 1;
            for (w, _) in a.row(v) {
                if !placed[w] && level[w] == usize::MAX {
                    level[w] = level[v] + 1;
                    seen.push(w);
                }
            }
        }
        seen
    };

    for start in 0..n {
        if placed[start] {
            continue;
        }
        let mut root = start;
        let mut visited = bfs(root, &mut level, &placed);
        let mut depth = visited.iter().map(|&v| level[v]).max().unwrap_or(0);
        loop {
            let candidate = visited
                .iter()
                .copied()
                .filter(|&v| level[v] == depth)
                .min_by_key(|&v| (degree[v], v))
                .expect("last level is non-empty");
            for &v in &visited {
                level[v] = usize::MAX;
            }
            let trial = bfs(candidate, &mut level, &placed);
            let trial_depth = trial.iter().map(|&v| level[v]).max().unwrap_or(0);
            if trial_depth > depth {
                root = candidate;
                visited = trial;
                depth = trial_depth;
            } else {
                for &v in &trial {
                    level[v] = usize::MAX;
                }
                break;
            }
        }
        for &v in &visited {
            level[v] = usize::MAX;
        }

        let mut queue = VecDeque::from([root]);
        placed[root] = true;
        let mut nbrs = Vec::new();
        while let Some(v) = queue.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(a.row(v).map(|(w, _)| w).filter(|&w| !placed[w]));
            nbrs.sort_by_key(|&w| (degree[w], w));
            for &w in &nbrs {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// `L Lᵀ = P A Pᵀ` stored row by row over each row's envelope.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    order: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    vals: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self, SparseError> {
        let order = reverse_cuthill_mckee(a);
        Self::factor_with_order(a, order)
    }

    pub fn factor_with_order(a: &CsrMatrix, order: Vec<usize>) -> Result<Self, SparseError> {
        let n = a.n();
        let mut position = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new, &old) in order.iter().enumerate() {
            for (j, _) in a.row(old) {
                let pj = position[j];
                if pj < first[new] {
                    first[new] = pj;
                }
            }
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut vals = vec![0.0; start[n]];
        for (new, &old) in order.iter().enumerate() {
            for (j, v) in a.row(old) {
                let pj = position[j];
                if pj <= new {
                    vals[start[new] + pj - first[new]] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let (done, row_i) = vals.split_at_mut(start[i]);
            for j in fi..i {
                let fj = first[j];
                let row_j = &done[start[j]..start[j + 1]];
                let k0 = fi.max(fj);
                let dot: f64 = row_i[k0 - fi..j - fi]
                    .iter()
                    .zip(&row_j[k0 - fj..j - fj])
                    .map(|(x, y)| x * y)
                    .sum();
                row_i[j - fi] = (row_i[j - fi] - dot) / row_j[j - fj];
            }
            let d = row_i[i - fi] - row_i[..i - fi].iter().map(|x| x * x).sum::<f64>();
            if !(d > 0.0) {
                return Err(SparseError::NotPositiveDefinite { row: order[i], pivot: d });
            }
            row_i[i - fi] = ComplexField::sqrt(d);
        }
        Ok(Self { order, first, start, vals })
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Number of stored factor entries.
    pub fn envelope_size(&self) -> usize {
        self.vals.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y: Vec<f64> = self.order.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.vals[self.start[i]..self.start[i + 1]];
            let dot: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(l, x)| l * x).sum();
            y[i] = (y[i] - dot) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.vals[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let xi = y[i];
            for (yk, l) in y[fi..i].iter_mut().zip(&row[..i - fi]) {
                *yk -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.order.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}
