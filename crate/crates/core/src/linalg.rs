//! Dense least squares via Householder QR with column pivoting.

use alloc::vec;
use alloc::vec::Vec;


/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Builds a matrix row by row from a closure that fills one row at a time.
    pub fn from_row_fn(rows: usize, cols: usize, mut fill: impl FnMut(usize, &mut [f64])) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        let mut buf = vec![0.0; cols];
        for i in 0..rows {
            buf.iter_mut().for_each(|v| *v = 0.0);
            fill(i, &mut buf);
            for (j, &v) in buf.iter().enumerate() {
                m.data[j * rows + i] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.column(j)) {
                *o += a * xj;
            }
        }
        out
    }

    /// Appends rows below the current ones.
    pub fn stack(&self, below: &Matrix) -> Matrix {
        assert_eq!(self.cols, below.cols);
        let rows = self.rows + below.rows;
        let mut m = Matrix::zeros(rows, self.cols);
        for j in 0..self.cols {
            let col = m.column_mut(j);
            col[..self.rows].copy_from_slice(self.column(j));
            col[self.rows..].copy_from_slice(below.column(j));
        }
        m
    }
}

/// Result of a least-squares solve.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    /// Numerical rank detected from the pivoted `R` diagonal.
    pub rank: usize,
    /// Residual sum of squares `||A x - b||^2`.
    pub rss: f64,
}

impl LeastSquares {
    pub fn full_rank(&self) -> bool {
        self.rank == self.coefficients.len()
    }
}

/// Relative threshold on `|R_kk| / |R_00|` below which a column is treated as dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Minimizes `||A x - b||` with Householder QR and column pivoting.
///
/// Columns beyond the detected rank get a zero coefficient (basic solution).
pub fn least_squares(a: &Matrix, b: &[f64]) -> LeastSquares {
    assert_eq!(a.rows, b.len(), "right-hand side length mismatch");
    let (m, n) = (a.rows, a.cols);
    let mut qr = a.clone();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let steps = m.min(n);
    let mut diag = vec![0.0; steps];
    let mut rank = 0;
    let mut r00 = 0.0;

    for k in 0..steps {
        // Pivot on the largest remaining column norm.
        let mut best = k;
        let mut best_norm = -1.0;
        for j in k..n {
            let nrm: f64 = qr.column(j)[k..].iter().map(|v| v * v).sum();
            if nrm > best_norm {
                best_norm = nrm;
                best = j;
            }
        }
        if best != k {
            for i in 0..m {
                let t = qr.get(i, k);
                qr.set(i, k, qr.get(i, best));
                qr.set(i, best, t);
            }
            perm.swap(k, best);
        }
        let norm = best_norm.max(0.0).sqrt();
        if k == 0 {
            r00 = norm;
        }
        if norm == 0.0 || norm <= RANK_TOLERANCE * r00 {
            break;
        }
        rank += 1;

        let x0 = qr.get(k, k);
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored in place; beta = 2 / v'v
        let v0 = x0 - alpha;
        qr.set(k, k, v0);
        let vtv = v0 * v0 + qr.column(k)[k + 1..].iter().map(|v| v * v).sum::<f64>();
        if vtv == 0.0 {
            diag[k] = alpha;
            continue;
        }
        let beta = 2.0 / vtv;
        let (left, right) = qr.data.split_at_mut((k + 1) * m);
        let v = &left[k * m + k..(k + 1) * m];
        for j in 0..(n - k - 1) {
            let col = &mut right[j * m + k..(j + 1) * m];
            let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            let s = beta * dot;
            for (c, &vi) in col.iter_mut().zip(v) {
                *c -= s * vi;
            }
        }
        let dot: f64 = v.iter().zip(&rhs[k..]).map(|(a, b)| a * b).sum();
        let s = beta * dot;
        for (c, &vi) in rhs[k..].iter_mut().zip(v) {
            *c -= s * vi;
        }
        diag[k] = alpha;
    }

    // Back substitution on the leading rank x rank block of R.
    let mut z = vec![0.0; n];
    for i in (0..rank).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..rank {
            acc -= qr.get(i, j) * z[j];
        }
        z[i] = acc / diag[i];
    }
    let rss: f64 = rhs[rank..].iter().map(|v| v * v).sum();
    let mut coefficients = vec![0.0; n];
    for (k, &p) in perm.iter().enumerate() {
        coefficients[p] = z[k];
    }
    LeastSquares { coefficients, rank, rss }
}

/// Sum of squares of `A x - b`, computed directly.
pub fn residual_sum_of_squares(a: &Matrix, x: &[f64], b: &[f64]) -> f64 {
    a.mul_vec(x).iter().zip(b).map(|(p, y)| (y - p) * (y - p)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_square_system_exactly() {
        let a = Matrix::from_row_fn(3, 3, |i, row| {
            let rows = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
            row.copy_from_slice(&rows[i]);
        });
        let x_true = [1.0, -2.0, 0.5];
        let b = a.mul_vec(&x_true);
        let sol = least_squares(&a, &b);
        assert!(sol.full_rank());
        for (x, t) in sol.coefficients.iter().zip(x_true) {
            assert!((x - t).abs() < 1e-12);
        }
        assert!(sol.rss < 1e-24);
    }

    #[test]
    fn overdetermined_line_fit() {
        // y = 1 + 2x with symmetric perturbations: LS recovers the line.
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0 + 0.1, 3.0 - 0.1, 5.0 - 0.1, 7.0 + 0.1];
        let a = Matrix::from_row_fn(4, 2, |i, row| {
            row[0] = 1.0;
            row[1] = xs[i];
        });
        let sol = least_squares(&a, &ys);
        assert!((sol.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((sol.coefficients[1] - 2.0).abs() < 1e-12);
        assert!((sol.rss - 0.04).abs() < 1e-12);
        let direct = residual_sum_of_squares(&a, &sol.coefficients, &ys);
        assert!((direct - sol.rss).abs() < 1e-12);
    }

    #[test]
    fn detects_dependent_columns() {
        let a = Matrix::from_row_fn(5, 3, |i, row| {
            let x = i as f64;
            row[0] = 1.0;
            row[1] = x;
            row[2] = 2.0 * x + 3.0;
        });
        let b = [1.0, 2.0, 3.0, 4.0, 5.0];
        let sol = least_squares(&a, &b);
        assert_eq!(sol.rank, 2);
        assert!(!sol.full_rank());
    }
}
