//! Symmetric banded matrices and the two factorizations the crate needs:
//! a real banded Cholesky (shift-invert eigen solves) and a complex banded
//! LU without pivoting (implicit-midpoint propagator). Bandwidths here are
//! tiny compared to n (the θ extent of the grid), so all of this is
//! O(n·bw²) and never a bottleneck.

use crate::error::{Error, Result};
use crate::C64;
use nalgebra::DVector;

/// Real symmetric banded matrix. `bands[d][i] = A[i][i+d]` for
/// `d = 0..=bw`, so `bands[0]` is the diagonal.
#[derive(Debug, Clone)]
pub struct SymBanded {
    pub n: usize,
    pub bw: usize,
    pub bands: Vec<Vec<f64>>,
}

impl SymBanded {
    pub fn zeros(n: usize, bw: usize) -> Self {
        let bands = (0..=bw).map(|d| vec![0.0; n - d.min(n)]).collect();
        Self { n, bw, bands }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.bw {
            0.0
        } else {
            self.bands[d][lo]
        }
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: f64) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        assert!(d <= self.bw, "entry ({i},{j}) outside band {}", self.bw);
        self.bands[d][lo] += v;
    }

    /// y = A x.
    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.n);
        for i in 0..self.n {
            let mut acc = self.bands[0][i] * x[i];
            for d in 1..=self.bw {
                if i + d < self.n {
                    acc += self.bands[d][i] * x[i + d];
                }
                if i >= d {
                    acc += self.bands[d][i - d] * x[i - d];
                }
            }
            y[i] = acc;
        }
        y
    }

    /// Same matvec for complex vectors (entries stay real).
    pub fn mul_cvec(&self, x: &DVector<C64>) -> DVector<C64> {
        let mut y = DVector::from_element(self.n, C64::new(0.0, 0.0));
        for i in 0..self.n {
            let mut acc = x[i] * self.bands[0][i];
            for d in 1..=self.bw {
                if i + d < self.n {
                    acc += x[i + d] * self.bands[d][i];
                }
                if i >= d {
                    acc += x[i - d] * self.bands[d][i - d];
                }
            }
            y[i] = acc;
        }
        y
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.n {
            let mut row = self.bands[0][i].abs();
            for d in 1..=self.bw {
                if i + d < self.n {
                    row += self.bands[d][i].abs();
                }
                if i >= d {
                    row += self.bands[d][i - d].abs();
                }
            }
            best = best.max(row);
        }
        best
    }

    /// Gershgorin lower bound on the spectrum.
    pub fn gershgorin_lower(&self) -> f64 {
        let mut lo = f64::INFINITY;
        for i in 0..self.n {
            let mut radius = 0.0;
            for d in 1..=self.bw {
                if i + d < self.n {
                    radius += self.bands[d][i].abs();
                }
                if i >= d {
                    radius += self.bands[d][i - d].abs();
                }
            }
            lo = lo.min(self.bands[0][i] - radius);
        }
        lo
    }

    /// A + diag(v) + c·I, keeping the band structure.
    pub fn with_diagonal_shift(&self, diag: Option<&DVector<f64>>, c: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.bands[0][i] += c + diag.map_or(0.0, |d| d[i]);
        }
        out
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for d in 0..=self.bw {
                if i + d < self.n {
                    m[(i, i + d)] = self.bands[d][i];
                    m[(i + d, i)] = self.bands[d][i];
                }
            }
        }
        m
    }
}

/// Banded Cholesky factor L with A = L·Lᵀ. `low[d][j] = L[j+d][j]`.
pub struct BandCholesky {
    n: usize,
    bw: usize,
    low: Vec<Vec<f64>>,
}

impl BandCholesky {
    /// Fails with `EigenFailure` if the matrix is not positive definite.
    pub fn new(a: &SymBanded) -> Result<Self> {
        let (n, bw) = (a.n, a.bw);
        let mut low: Vec<Vec<f64>> = (0..=bw).map(|d| vec![0.0; n - d.min(n)]).collect();
        for j in 0..n {
            let mut s = a.bands[0][j];
            let k0 = j.saturating_sub(bw);
            for k in k0..j {
                let l = low[j - k][k];
                s -= l * l;
            }
            if s <= 0.0 || !s.is_finite() {
                return Err(Error::EigenFailure(format!(
                    "banded Cholesky pivot {s:e} at column {j}: matrix not positive definite"
                )));
            }
            let ljj = s.sqrt();
            low[0][j] = ljj;
            for i in (j + 1)..(j + bw + 1).min(n) {
                let mut s = a.get(i, j);
                let k0 = i.saturating_sub(bw).max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= low[i - k][k] * low[j - k][k];
                }
                low[i - j][j] = s / ljj;
            }
        }
        Ok(Self { n, bw, low })
    }

    /// Solve A x = b in place.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut x = b.clone();
        // L y = b
        for j in 0..self.n {
            x[j] /= self.low[0][j];
            let xj = x[j];
            for d in 1..=self.bw {
                if j + d < self.n {
                    x[j + d] -= self.low[d][j] * xj;
                }
            }
        }
        // Lᵀ x = y
        for j in (0..self.n).rev() {
            let mut s = x[j];
            for d in 1..=self.bw {
                if j + d < self.n {
                    s -= self.low[d][j] * x[j + d];
                }
            }
            x[j] = s / self.low[0][j];
        }
        x
    }
}

/// Complex banded LU without pivoting, band width `bw` on both sides.
/// Adequate for the near-identity propagator matrices it is used on; a
/// vanishing pivot is reported as `SolveFailure`.
pub struct BandLU {
    n: usize,
    bw: usize,
    /// Row-major dense band: `data[i][bw + (j - i)] = A[i][j]`.
    data: Vec<Vec<C64>>,
}

impl BandLU {
    pub fn new(n: usize, bw: usize) -> Self {
        Self { n, bw, data: vec![vec![C64::new(0.0, 0.0); 2 * bw + 1]; n] }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i][self.bw + j - i] = v;
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i][self.bw + j - i]
    }

    /// Factor in place.
    pub fn factor(&mut self) -> Result<()> {
        let (n, bw) = (self.n, self.bw);
        for k in 0..n {
            let pivot = self.get(k, k);
            if pivot.norm_sqr() < 1e-300 {
                return Err(Error::SolveFailure(format!("zero pivot at row {k} in banded LU")));
            }
            for i in (k + 1)..(k + bw + 1).min(n) {
                let l = self.get(i, k) / pivot;
                self.set(i, k, l);
                for j in (k + 1)..(k + bw + 1).min(n) {
                    let v = self.get(i, j) - l * self.get(k, j);
                    self.set(i, j, v);
                }
            }
        }
        Ok(())
    }

    /// Solve A x = b with the stored factors.
    pub fn solve(&self, b: &DVector<C64>) -> DVector<C64> {
        let mut x = b.clone();
        for i in 0..self.n {
            let k0 = i.saturating_sub(self.bw);
            let mut s = x[i];
            for k in k0..i {
                s -= self.get(i, k) * x[k];
            }
            x[i] = s;
        }
        for i in (0..self.n).rev() {
            let mut s = x[i];
            for j in (i + 1)..(i + self.bw + 1).min(self.n) {
                s -= self.get(i, j) * x[j];
            }
            x[i] = s / self.get(i, i);
        }
        x
    }
}
