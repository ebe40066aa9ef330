//! Dense complex matrices and log-determinants via LU with partial pivoting.

use num_complex::Complex64;
use rayon::prelude::*;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds the matrix entry by entry; rows are filled in parallel.
    pub fn from_fn<F>(rows: usize, cols: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> Complex64 + Sync,
    {
        let mut m = Self::zeros(rows, cols);
        if cols > 0 {
            m.data.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
                for (j, x) in row.iter_mut().enumerate() {
                    *x = f(i, j);
                }
            });
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    /// Matrix product. Each output entry is summed in a fixed order, so the
    /// result does not depend on the thread count.
    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let (n, p) = (self.cols, other.cols);
        let mut out = CMatrix::zeros(self.rows, p);
        if p == 0 {
            return out;
        }
        out.data.par_chunks_mut(p).enumerate().for_each(|(i, row)| {
            let a = &self.data[i * n..(i + 1) * n];
            for (k, &aik) in a.iter().enumerate() {
                let b = &other.data[k * p..(k + 1) * p];
                for (o, &bkj) in row.iter_mut().zip(b) {
                    *o += aik * bkj;
                }
            }
        });
        out
    }
}

/// Logarithm of a determinant, `ln|det|` and its argument in (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub ln_abs: f64,
    pub arg: f64,
}

impl LogDet {
    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.ln_abs.exp(), self.arg)
    }

    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.ln_abs, self.arg)
    }
}

/// In-place LU factorization with partial pivoting. Returns the log-determinant;
/// a singular matrix gives `ln_abs = -inf`.
pub fn log_det(mut a: CMatrix) -> LogDet {
    assert_eq!(a.rows, a.cols, "determinant of a non-square matrix");
    let n = a.rows;
    let mut ln_abs = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut piv = k;
        let mut best = a.get(k, k).norm();
        for i in (k + 1)..n {
            let v = a.get(i, k).norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return LogDet {
                ln_abs: f64::NEG_INFINITY,
                arg: 0.0,
            };
        }
        if piv != k {
            for j in 0..n {
                a.data.swap(k * n + j, piv * n + j);
            }
            phase = -phase;
        }
        let pivot = a.get(k, k);
        ln_abs += best.ln();
        phase *= pivot / best;
        let inv = pivot.inv();
        let (head, tail) = a.data.split_at_mut((k + 1) * n);
        let pivot_row = &head[k * n..(k + 1) * n];
        for row in tail.chunks_mut(n) {
            let factor = row[k] * inv;
            if factor.re == 0.0 && factor.im == 0.0 {
                continue;
            }
            row[k] = factor;
            for j in (k + 1)..n {
                row[j] -= factor * pivot_row[j];
            }
        }
    }
    LogDet {
        ln_abs,
        arg: phase.arg(),
    }
}
