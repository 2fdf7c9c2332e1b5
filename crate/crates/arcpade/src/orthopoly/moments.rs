use super::{LevelWeight, MomentBasis, OrthoError, OrthoOptions};
use crate::cauchy::{CauchyError, QuadratureGrid};
use crate::numerics::abs_f64;
use rug::Complex;
use std::sync::Arc;

/// A weight sampled on a quadrature grid.
///
/// `measure[k]` is the weight of node `k` in `∫_F g(t) w_n(t) dt / w^+(t)`,
/// and `pull[k]` the same without `w_n`.
#[derive(Clone, Debug)]
pub struct WeightTable {
    grid: Arc<QuadratureGrid>,
    t: Vec<Complex>,
    w: Vec<Complex>,
    pull: Vec<Complex>,
    measure: Vec<Complex>,
}

impl WeightTable {
    pub fn new(weight: &LevelWeight, grid: Arc<QuadratureGrid>) -> Result<Self, OrthoError> {
        let prec = grid.prec();
        let mut t = Vec::with_capacity(grid.len());
        let mut w = Vec::with_capacity(grid.len());
        let mut pull = Vec::with_capacity(grid.len());
        let mut measure = Vec::with_capacity(grid.len());
        for nd in grid.nodes() {
            let wk = weight.eval(&nd.point, prec);
            if !wk.real().is_finite() || !wk.imag().is_finite() {
                return Err(CauchyError::ZeroDensity {
                    t: crate::numerics::to_c64(&nd.point.t),
                }
                .into());
            }
            let pk = Complex::with_val(prec, &nd.weight / &nd.tau) / -2i32;
            measure.push(Complex::with_val(prec, &pk * &wk));
            pull.push(pk);
            t.push(Complex::with_val(prec, &nd.point.t));
            w.push(wk);
        }
        Ok(Self {
            grid,
            t,
            w,
            pull,
            measure,
        })
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    /// `t_k = J(tau_k)` at the working precision.
    pub fn points(&self) -> &[Complex] {
        &self.t
    }

    /// `w_n(t_k)`.
    pub fn weights(&self) -> &[Complex] {
        &self.w
    }

    pub fn pull(&self) -> &[Complex] {
        &self.pull
    }

    pub fn measure(&self) -> &[Complex] {
        &self.measure
    }

    /// `∫_F g w_n dt / w^+` from the values of `g` at the nodes.
    pub fn integrate(&self, g: &[Complex]) -> Complex {
        let prec = self.grid.prec();
        let mut acc = Complex::new(prec);
        for (m, v) in self.measure.iter().zip(g) {
            acc += Complex::with_val(prec, m * v);
        }
        acc
    }

    /// Moments `∫ b_k w_n dt / w^+` for `k = 0..=maxdeg`.
    pub fn moments(&self, maxdeg: usize, basis: MomentBasis) -> Vec<Complex> {
        let prec = self.grid.prec();
        let mut out = vec![Complex::new(prec); maxdeg + 1];
        for (m, t) in self.measure.iter().zip(&self.t) {
            for_each_basis(t, maxdeg, basis, |k, b| {
                out[k] += Complex::with_val(prec, m * b);
            });
        }
        out
    }
}

/// Calls `f(k, b_k(t))` for `k = 0..=maxdeg`.
pub(crate) fn for_each_basis<F: FnMut(usize, &Complex)>(t: &Complex, maxdeg: usize, basis: MomentBasis, mut f: F) {
    let prec = t.prec().0;
    let mut prev = Complex::with_val(prec, 1);
    f(0, &prev);
    if maxdeg == 0 {
        return;
    }
    let mut cur = t.clone();
    f(1, &cur);
    for k in 2..=maxdeg {
        let next = match basis {
            MomentBasis::Monomial => Complex::with_val(prec, &cur * t),
            MomentBasis::Chebyshev => Complex::with_val(prec, &cur * t) * 2u32 - &prev,
        };
        prev = std::mem::replace(&mut cur, next);
        f(k, &cur);
    }
}

/// Stabilized moments with the grid they were computed on.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub values: Vec<Complex>,
    pub basis: MomentBasis,
    pub nodes: usize,
    /// Change between the last two grids, relative to `max_k |m_k|`.
    pub change: f64,
    pub table: WeightTable,
}

impl MomentTable {
    /// `max_k |m_k|`.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(abs_f64).fold(0.0, f64::max)
    }
}

/// Moments of `w_n` up to degree `maxdeg`, doubling the grid until they are stable.
pub fn moments(weight: &LevelWeight, maxdeg: usize, opts: &OrthoOptions, prec: u32) -> Result<MomentTable, OrthoError> {
    let tol = opts.quad.stabilization_tol;
    let build = |n: usize| -> Result<(WeightTable, Vec<Complex>), OrthoError> {
        let grid = weight.spec().grid(n, prec)?;
        let table = WeightTable::new(weight, grid)?;
        let m = table.moments(maxdeg, opts.basis);
        Ok((table, m))
    };
    let mut n = opts.quad.initial_nodes.max(4);
    let (_, mut prev) = build(n)?;
    let mut change = f64::NAN;
    while 2 * n <= opts.quad.max_nodes {
        n *= 2;
        let (table, next) = build(n)?;
        let scale = next.iter().map(abs_f64).fold(f64::MIN_POSITIVE, f64::max);
        change = next
            .iter()
            .zip(&prev)
            .map(|(a, b)| abs_f64(&Complex::with_val(prec, a - b)))
            .fold(0.0, f64::max)
            / scale;
        if change <= tol {
            return Ok(MomentTable {
                values: next,
                basis: opts.basis,
                nodes: n,
                change,
                table,
            });
        }
        prev = next;
    }
    Err(CauchyError::NotStabilized { nodes: n, change, tol }.into())
}
