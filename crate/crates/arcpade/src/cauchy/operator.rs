use super::density::{ArcPoint, Density};
use super::grid::{stabilize, QuadOptions, QuadratureGrid, Stabilized};
use super::CauchyError;
use crate::geometry::GammaCurve;
use crate::numerics::to_c64;
use rug::float::Constant;
use rug::{Complex, Float};

/// Largest accepted phase change between neighbouring nodes.
pub const UNWRAP_THRESHOLD: f64 = 0.75 * std::f64::consts::PI;

/// A continuous logarithm of a density on the nodes of a grid.
#[derive(Clone, Debug)]
pub struct LogTable {
    values: Vec<Complex>,
    /// `(theta, Im log)` in angular order, for branch selection off the grid.
    phases: Vec<(f64, f64)>,
}

impl LogTable {
    /// Builds `phi = log h ∘ J` on the grid. Uses the density's own logarithm
    /// when it provides one, and unwraps principal logarithms in angular order
    /// otherwise.
    pub fn new(grid: &QuadratureGrid, h: &dyn Density) -> Result<Self, CauchyError> {
        let nodes = grid.nodes();
        let mut values: Vec<Complex> = Vec::with_capacity(nodes.len());
        let closed: Option<Vec<Complex>> = nodes.iter().map(|nd| h.log(&nd.point)).collect();
        match closed {
            Some(v) if v.iter().all(|z| z.real().is_finite() && z.imag().is_finite()) => values = v,
            _ => {
                for nd in nodes {
                    let hv = h.eval(&nd.point);
                    if hv.is_zero() || !hv.real().is_finite() || !hv.imag().is_finite() {
                        return Err(CauchyError::ZeroDensity { t: to_c64(&nd.point.t) });
                    }
                    values.push(hv.ln());
                }
                unwrap_in_order(grid, &mut values)?;
            }
        }
        let mut phases: Vec<(f64, f64)> = nodes
            .iter()
            .zip(&values)
            .map(|(nd, v)| (nd.theta.to_f64(), v.imag().to_f64()))
            .collect();
        phases.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { values, phases })
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    /// `log h` at an arbitrary point of `Gamma`, on the branch of the nearest node.
    pub fn log_at(&self, h: &dyn Density, p: &ArcPoint, theta: f64) -> Result<Complex, CauchyError> {
        if let Some(v) = h.log(p) {
            if v.real().is_finite() {
                return Ok(v);
            }
        }
        let hv = h.eval(p);
        if hv.is_zero() {
            return Err(CauchyError::ZeroDensity { t: to_c64(&p.t) });
        }
        let mut v = hv.ln();
        let reference = self.nearest_phase(theta);
        let tau = std::f64::consts::TAU;
        let k = ((reference - v.imag().to_f64()) / tau).round();
        if k != 0.0 {
            let prec = v.prec().0;
            let shift = Float::with_val(prec, Constant::Pi) * 2u32 * k;
            *v.mut_imag() += shift;
        }
        Ok(v)
    }

    fn nearest_phase(&self, theta: f64) -> f64 {
        let tau = std::f64::consts::TAU;
        let theta = theta.rem_euclid(tau);
        let pos = self.phases.partition_point(|&(th, _)| th < theta);
        let m = self.phases.len();
        let cand = [(pos + m - 1) % m, pos % m];
        let dist = |i: usize| {
            let d = (self.phases[i].0 - theta).abs();
            d.min(tau - d)
        };
        let best = if dist(cand[0]) <= dist(cand[1]) { cand[0] } else { cand[1] };
        self.phases[best].1
    }
}

/// Makes the imaginary parts continuous along increasing `theta`.
fn unwrap_in_order(grid: &QuadratureGrid, values: &mut [Complex]) -> Result<(), CauchyError> {
    let nodes = grid.nodes();
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[a].theta.partial_cmp(&nodes[b].theta).unwrap());
    let tau = std::f64::consts::TAU;
    let prec = grid.prec();
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let mut prev = values[order[0]].imag().to_f64();
    for &i in &order[1..] {
        let cur = values[i].imag().to_f64();
        let k = ((prev - cur) / tau).round();
        let adjusted = cur + k * tau;
        if (adjusted - prev).abs() > UNWRAP_THRESHOLD {
            return Err(CauchyError::UnwrapJump {
                t: to_c64(&nodes[i].point.t),
                step: adjusted - prev,
            });
        }
        if k != 0.0 {
            *values[i].mut_imag() += Float::with_val(prec, &two_pi * k);
        }
        prev = values[i].imag().to_f64();
    }
    // closing the loop: the logarithm must return to its starting branch
    let first = values[order[0]].imag().to_f64();
    let winding = ((prev - first) / tau).round() as i64;
    if winding != 0 {
        return Err(CauchyError::NonzeroIndex { winding });
    }
    Ok(())
}

/// `C phi(z)` from node values on a grid, for `z` off `Gamma`.
pub fn cauchy_transform_on_gamma(grid: &QuadratureGrid, values: &[Complex], z: &Complex) -> Result<Complex, CauchyError> {
    grid.cauchy(values, z)
}

/// Breakpoints of `h` together with a stabilized grid for its logarithm.
pub(crate) fn log_grid(
    curve: &GammaCurve,
    h: &dyn Density,
    opts: &QuadOptions,
    prec: u32,
) -> Result<(QuadratureGrid, LogTable, Stabilized<Complex>), CauchyError> {
    let breakpoints = h.breakpoints(curve, prec)?;
    let zero = Complex::new(prec);
    let mut attempt = opts.clone();
    loop {
        let result = stabilize(curve, &breakpoints, &attempt, prec, |grid| {
            let table = LogTable::new(grid, h)?;
            grid.cauchy(table.values(), &zero)
        });
        match result {
            Ok((grid, c0)) => {
                let table = LogTable::new(&grid, h)?;
                return Ok((grid, table, c0));
            }
            // graded grids are sparse mid-panel, so C phi(0) may need more nodes
            Err(CauchyError::UnwrapJump { .. } | CauchyError::TooCloseToCurve { .. })
                if 4 * attempt.initial_nodes <= attempt.max_nodes =>
            {
                attempt.initial_nodes *= 2;
            }
            Err(e) => return Err(e),
        }
    }
}

/// `G_h = exp{ ∫_F log h · i dt / (pi w^+) } = exp{ C phi(0) }`.
pub fn geometric_mean(curve: &GammaCurve, h: &dyn Density, opts: &QuadOptions, prec: u32) -> Result<Stabilized<Complex>, CauchyError> {
    let (_, _, c0) = log_grid(curve, h, opts, prec)?;
    Ok(Stabilized {
        value: c0.value.exp(),
        nodes: c0.nodes,
        change: c0.change,
    })
}
