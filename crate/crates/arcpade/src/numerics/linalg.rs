use super::{abs_f64, NumericsError};
use rug::Complex;

/// Square complex matrix stored densely in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex>,
}

impl Matrix {
    pub fn zeros(n: usize, prec: u32) -> Self {
        Self {
            n,
            data: vec![Complex::new(prec); n * n],
        }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Self::zeros(n, prec);
        for i in 0..n {
            m.data[i * n + i] = Complex::with_val(prec, 1);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, x: &[Complex]) -> Vec<Complex> {
        (0..self.n)
            .map(|i| {
                let mut acc = Complex::new(x[0].prec());
                for (j, xj) in x.iter().enumerate().take(self.n) {
                    acc += Complex::with_val(acc.prec(), self.get(i, j) * xj);
                }
                acc
            })
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| abs_f64(self.get(i, j))).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| abs_f64(self.get(i, j))).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// `PA = LU` with partial pivoting; `L` has a unit diagonal.
#[derive(Clone, Debug)]
pub struct LuDecomposition {
    lu: Matrix,
    perm: Vec<usize>,
    norm_one: f64,
}

impl LuDecomposition {
    /// Factorizes `a`, failing when a pivot drops below `eps` times the
    /// largest entry left in its row.
    pub fn new(a: &Matrix) -> Result<Self, NumericsError> {
        let n = a.n;
        let norm_one = a.norm_one();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let prec = lu.data.first().map(|c| c.prec().0).unwrap_or(64);
        let eps = 2f64.powi(1 - prec as i32);
        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|i| (i, abs_f64(lu.get(i, k))))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let row_max = (k..n).map(|j| abs_f64(lu.get(k, j))).fold(0.0, f64::max);
            if pivot_abs == 0.0 || pivot_abs <= eps * row_max {
                return Err(NumericsError::SingularMatrix {
                    step: k,
                    pivot: pivot_abs,
                    row_max,
                });
            }
            let pivot = lu.get(k, k).clone();
            for i in k + 1..n {
                let factor = Complex::with_val(prec, lu.get(i, k) / &pivot);
                for j in k + 1..n {
                    let t = Complex::with_val(prec, &factor * lu.get(k, j));
                    lu.data[i * n + j] -= t;
                }
                lu.data[i * n + k] = factor;
            }
        }
        Ok(Self { lu, perm, norm_one })
    }

    pub fn dim(&self) -> usize {
        self.lu.n
    }

    pub fn solve(&self, b: &[Complex]) -> Result<Vec<Complex>, NumericsError> {
        let n = self.lu.n;
        if b.len() != n {
            return Err(NumericsError::DimensionMismatch { n, len: b.len() });
        }
        let mut x: Vec<Complex> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let t = Complex::with_val(x[i].prec(), self.lu.get(i, j) * &x[j]);
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = Complex::with_val(x[i].prec(), self.lu.get(i, j) * &x[j]);
                x[i] -= t;
            }
            x[i] /= self.lu.get(i, i);
        }
        Ok(x)
    }

    /// Product of the pivots up to the permutation sign.
    pub fn determinant_abs(&self) -> f64 {
        (0..self.lu.n)
            .map(|i| abs_f64(self.lu.get(i, i)).ln())
            .sum::<f64>()
            .exp()
    }

    /// `log10 |det|`, useful when the determinant under- or overflows `f64`.
    pub fn log10_determinant_abs(&self) -> f64 {
        (0..self.lu.n)
            .map(|i| abs_f64(self.lu.get(i, i)).log10())
            .sum()
    }

    /// One-norm condition number from the explicit inverse.
    ///
    /// Costs `n` extra solves, which is negligible at the sizes used here.
    pub fn condition_number(&self) -> f64 {
        let n = self.lu.n;
        let prec = self.lu.data.first().map(|c| c.prec().0).unwrap_or(64);
        let mut inv_norm: f64 = 0.0;
        for j in 0..n {
            let mut e = vec![Complex::new(prec); n];
            e[j] = Complex::with_val(prec, 1);
            let col = self.solve(&e).expect("dimensions match");
            inv_norm = inv_norm.max(col.iter().map(abs_f64).sum());
        }
        inv_norm * self.norm_one
    }
}

/// Solves `Ax = b` by Gaussian elimination with partial pivoting.
pub fn solve_dense(a: &Matrix, b: &[Complex]) -> Result<Vec<Complex>, NumericsError> {
    if b.len() != a.dim() {
        return Err(NumericsError::DimensionMismatch {
            n: a.dim(),
            len: b.len(),
        });
    }
    LuDecomposition::new(a)?.solve(b)
}
