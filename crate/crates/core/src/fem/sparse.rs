use crate::error::{invalid, Result};

/// Symmetric matrix in compressed-row form, both triangles stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymmetric {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSymmetric {
    /// Builds the matrix from `(row, col, value)` triplets, summing duplicates.
    ///
    /// The caller supplies both `(i, j)` and `(j, i)`. Summation happens in
    /// sorted `(row, col)` order, so the result does not depend on the order
    /// of the input.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(i, j, _)) = triplets.iter().find(|t| t.0 >= n || t.1 >= n) {
            return Err(invalid(format!(
                "entry ({i}, {j}) outside a {n}x{n} matrix"
            )));
        }
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len() / 2);
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len() / 2);
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *vals.last_mut().expect("entry exists") += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseSymmetric {
            n,
            row_ptr,
            cols,
            vals,
        })
    }

    pub fn identity(n: usize) -> Self {
        SparseSymmetric {
            n,
            row_ptr: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: vec![1.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(col, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            *yi = s;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    /// `x^T K y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.matvec(y))
    }

    /// `self + s * other`, on the union of the two patterns.
    pub fn add_scaled(&self, other: &SparseSymmetric, s: f64) -> SparseSymmetric {
        assert_eq!(self.n, other.n);
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut cols = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut vals = Vec::with_capacity(cols.capacity());
        row_ptr.push(0);
        for i in 0..self.n {
            let mut a = self.row(i).peekable();
            let mut b = other.row(i).peekable();
            loop {
                match (a.peek().copied(), b.peek().copied()) {
                    (Some((ja, va)), Some((jb, vb))) if ja == jb => {
                        cols.push(ja);
                        vals.push(va + s * vb);
                        a.next();
                        b.next();
                    }
                    (Some((ja, va)), Some((jb, _))) if ja < jb => {
                        cols.push(ja);
                        vals.push(va);
                        a.next();
                    }
                    (Some((ja, va)), None) => {
                        cols.push(ja);
                        vals.push(va);
                        a.next();
                    }
                    (_, Some((jb, vb))) => {
                        cols.push(jb);
                        vals.push(s * vb);
                        b.next();
                    }
                    (None, None) => break,
                }
            }
            row_ptr.push(cols.len());
        }
        SparseSymmetric {
            n: self.n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Principal submatrix on the indices flagged in `keep`, renumbered in
    /// increasing order.
    pub fn principal_submatrix(&self, keep: &[bool]) -> SparseSymmetric {
        assert_eq!(keep.len(), self.n);
        let mut new_index = vec![usize::MAX; self.n];
        let mut m = 0;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                new_index[i] = m;
                m += 1;
            }
        }
        let mut row_ptr = Vec::with_capacity(m + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in (0..self.n).filter(|&i| keep[i]) {
            for (j, v) in self.row(i) {
                if keep[j] {
                    cols.push(new_index[j]);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseSymmetric {
            n: m,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    /// `1^T K 1`.
    pub fn total(&self) -> f64 {
        self.vals.iter().sum()
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}
