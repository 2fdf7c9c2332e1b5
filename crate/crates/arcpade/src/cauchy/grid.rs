use super::density::ArcPoint;
use super::CauchyError;
use crate::geometry::GammaCurve;
use crate::numerics::{abs_f64, to_c64};
use num_complex::Complex64;
use rug::float::Constant;
use rug::{Complex, Float};

/// Minimum number of nodes on a grading panel.
const MIN_PANEL_NODES: usize = 16;

/// Controls for adaptive quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadOptions {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    /// Accepted change between a grid and its refinement, relative to `max(1, |I|)`.
    pub stabilization_tol: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            initial_nodes: 256,
            max_nodes: 1 << 15,
            stabilization_tol: 1e-24,
        }
    }
}

/// A quadrature node on `Gamma`.
#[derive(Clone, Debug)]
pub struct GridNode {
    pub theta: Float,
    pub tau: Complex,
    /// Weight of the node in `∮ f(tau) dtau`.
    pub weight: Complex,
    pub point: ArcPoint,
}

/// Trapezoid grid on `Gamma`, uniform in an auxiliary periodic variable `s`.
///
/// Without breakpoints `s = theta` and the nodes are the half-shifted points
/// `theta_k = 2 pi (k + 1/2)/N`. With breakpoints, each panel between
/// consecutive breakpoints carries a tanh-sinh change of variables, so that
/// algebraic and logarithmic endpoint singularities still give near-exponential
/// convergence. Nodes then come double-exponentially close to the breakpoints,
/// so their parameters are kept at roughly twice the working precision.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    nodes: Vec<GridNode>,
    /// `(theta as f64, index)` sorted by angle.
    order: Vec<(f64, usize)>,
    /// Spacing of the uniform variable `s`.
    step: Float,
    /// `(-1)^m cot(m step / 2) / 2` for `m = 0..N` (entry 0 unused).
    cot_table: Vec<Float>,
    breakpoints: Vec<f64>,
    prec: u32,
}

struct Panel {
    start: Float,
    length: Float,
    nodes: usize,
}

impl QuadratureGrid {
    /// `n` nodes at `theta_k = 2 pi (k + 1/2)/n`.
    pub fn uniform(curve: &GammaCurve, n: usize, prec: u32) -> Result<Self, CauchyError> {
        Self::graded(curve, n, &[], prec)
    }

    /// `n` nodes at `theta_k = 2 pi k/n`, interlaced with [`Self::uniform`].
    ///
    /// Boundary values at the nodes of one grid are best computed with the
    /// other: the subtracted integrand is then sampled away from its removable
    /// singularity and keeps the full trapezoid convergence rate.
    pub fn interlaced(curve: &GammaCurve, n: usize, prec: u32) -> Result<Self, CauchyError> {
        let mut grid = Self::uniform(curve, n, prec)?;
        let pi = Float::with_val(prec, Constant::Pi);
        let two_pi = Float::with_val(prec, &pi * 2u32);
        for (k, nd) in grid.nodes.iter_mut().enumerate() {
            let theta = Float::with_val(prec, &two_pi * k as u32) / n as u32;
            let (tau, dtau) = symmetric_point(curve, &theta, &pi, &two_pi)?;
            nd.weight = Complex::with_val(prec, &dtau * &grid.step);
            nd.point = ArcPoint::from_tau(&tau, theta.to_f64());
            nd.tau = tau;
            nd.theta = theta;
        }
        grid.order = grid.nodes.iter().enumerate().map(|(i, nd)| (nd.theta.to_f64(), i)).collect();
        Ok(grid)
    }

    /// Grid graded at the given curve parameters in `[0, pi]` and their mirror
    /// images `2 pi - b`.
    pub fn graded(curve: &GammaCurve, n: usize, breakpoints: &[Float], prec: u32) -> Result<Self, CauchyError> {
        if n < 4 || n % 2 != 0 {
            return Err(CauchyError::InvalidGrid(format!("node count {n} must be even and at least 4")));
        }
        let graded = !breakpoints.is_empty();
        let work = if graded { 2 * prec + 32 } else { prec };
        let pi = Float::with_val(work, Constant::Pi);
        let two_pi = Float::with_val(work, &pi * 2u32);
        let snap = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 8));
        let cuts: Vec<Float> = breakpoints
            .iter()
            .map(|b| {
                if Float::with_val(prec, b.abs_ref()) <= snap {
                    Float::new(work)
                } else if Float::with_val(prec, b - &pi).abs() <= snap {
                    pi.clone()
                } else {
                    Float::with_val(work, b)
                }
            })
            .collect();
        let panels = make_panels(&cuts, n, &pi, &two_pi)?;
        let total: usize = panels.iter().map(|p| p.nodes).sum();
        let step_w = Float::with_val(work, &two_pi / total as u32);
        let step = Float::with_val(prec, &step_w);
        let reach = tanh_sinh_reach(prec, work);

        let mut nodes = Vec::with_capacity(total);
        for panel in &panels {
            for j in 0..panel.nodes {
                let u = Float::with_val(work, 2 * j + 1) / (2 * panel.nodes) as u32;
                let (g, dg) = if graded { tanh_sinh(&u, &reach) } else { (u.clone(), Float::with_val(work, 1)) };
                let mut theta = Float::with_val(work, &panel.length * &g) + &panel.start;
                if theta >= two_pi {
                    theta -= &two_pi;
                }
                // d theta/ds = length * g'(u) * du/ds with du/ds = 1/(nodes * step)
                let dtheta_ds = Float::with_val(work, &panel.length * &dg) / (Float::with_val(work, &step_w * panel.nodes as u32));
                let (tau_w, dtau) = symmetric_point(curve, &theta, &pi, &two_pi)?;
                let weight = Complex::with_val(prec, Complex::with_val(work, &dtau * &dtheta_ds) * &step_w);
                // kept at the working precision: nodes next to a zero of the density would
                // otherwise round onto it
                let point = ArcPoint::from_tau(&tau_w, theta.to_f64());
                let tau = Complex::with_val(prec, &tau_w);
                nodes.push(GridNode {
                    theta,
                    tau,
                    weight,
                    point,
                });
            }
        }
        let mut order_idx: Vec<(f64, usize)> = nodes.iter().enumerate().map(|(i, nd)| (nd.theta.to_f64(), i)).collect();
        order_idx.sort_by(|a, b| a.0.total_cmp(&b.0));
        let cot_table = (0..total)
            .map(|m| {
                if m == 0 {
                    return Float::new(prec);
                }
                let half = Float::with_val(prec, &step * m as u32) / 2u32;
                let c = half.tan().recip() / 2u32;
                if m % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .collect();
        let mut bps: Vec<f64> = breakpoints.iter().map(|b| b.to_f64()).collect();
        bps.sort_by(f64::total_cmp);
        Ok(Self {
            nodes,
            order: order_idx,
            step,
            cot_table,
            breakpoints: bps,
            prec,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[GridNode] {
        &self.nodes
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn is_graded(&self) -> bool {
        !self.breakpoints.is_empty()
    }

    /// Evaluates `f` at every node.
    pub fn map<F: FnMut(&GridNode) -> Complex>(&self, f: F) -> Vec<Complex> {
        self.nodes.iter().map(f).collect()
    }

    /// `∮_Gamma f(tau) d tau` from node values.
    pub fn contour_sum(&self, values: &[Complex]) -> Complex {
        let mut acc = Complex::new(self.prec);
        for (v, nd) in values.iter().zip(&self.nodes) {
            acc += Complex::with_val(self.prec, v * &nd.weight);
        }
        acc
    }

    /// `∫_F g(t) dt / w^+(t) = -(1/2) ∮_Gamma g(J(tau)) d tau / tau` from the
    /// values of `g` at the nodes.
    pub fn pullback(&self, values: &[Complex]) -> Complex {
        let mut acc = Complex::new(self.prec);
        for (v, nd) in values.iter().zip(&self.nodes) {
            acc += Complex::with_val(self.prec, v * &nd.weight) / &nd.tau;
        }
        acc / -2i32
    }

    /// Largest distance between consecutive nodes.
    pub fn max_gap(&self) -> f64 {
        let pts: Vec<Complex64> = self.order.iter().map(|&(_, i)| to_c64(&self.nodes[i].tau)).collect();
        (0..pts.len())
            .map(|k| (pts[(k + 1) % pts.len()] - pts[k]).norm())
            .fold(0.0, f64::max)
    }

    /// Distance from `z` to the node set, and the spacing of the grid around the
    /// nearest node.
    fn proximity(&self, z: Complex64) -> (f64, f64) {
        let m = self.order.len();
        let pts: Vec<Complex64> = self.order.iter().map(|&(_, i)| to_c64(&self.nodes[i].tau)).collect();
        let (k, d) = pts
            .iter()
            .enumerate()
            .map(|(k, p)| (k, (p - z).norm()))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        let gap = (pts[(k + 1) % m] - pts[k]).norm().max((pts[k] - pts[(k + m - 1) % m]).norm());
        (d, gap)
    }

    /// `C phi(z) = (1/2 pi i) ∮ phi(tau)/(tau - z) d tau` for `z` off `Gamma`.
    pub fn cauchy(&self, values: &[Complex], z: &Complex) -> Result<Complex, CauchyError> {
        let z64 = to_c64(z);
        let (d, gap) = self.proximity(z64);
        if d < 2.0 * gap {
            return Err(CauchyError::TooCloseToCurve {
                z: z64,
                distance: d,
                spacing: gap,
            });
        }
        let mut acc = Complex::new(self.prec);
        for (v, nd) in values.iter().zip(&self.nodes) {
            let den = Complex::with_val(self.prec, &nd.tau - z);
            acc += Complex::with_val(self.prec, v * &nd.weight) / den;
        }
        Ok(acc / self.two_pi_i())
    }

    fn two_pi_i(&self) -> Complex {
        let pi = Float::with_val(self.prec, Constant::Pi);
        Complex::with_val(self.prec, (0, pi * 2u32))
    }

    /// `d phi / ds` at node `j` by trigonometric differentiation in `s`.
    pub fn spectral_derivative(&self, values: &[Complex], j: usize) -> Complex {
        let n = self.nodes.len();
        let mut acc = Complex::new(self.prec);
        for (k, v) in values.iter().enumerate() {
            if k != j {
                acc += Complex::with_val(self.prec, v * &self.cot_table[(j + n - k) % n]);
            }
        }
        acc
    }

    /// Index of the node at parameter `theta`, if any.
    pub fn find_node(&self, theta: &Float) -> Option<usize> {
        let t = theta.to_f64();
        let pos = self.order.partition_point(|&(th, _)| th < t - 1e-12);
        let tol = Float::with_val(self.prec, Float::i_exp(1, -(self.prec as i32) + 16));
        self.order[pos..]
            .iter()
            .take_while(|&&(th, _)| th <= t + 1e-12)
            .map(|&(_, i)| i)
            .find(|&i| Float::with_val(self.prec, &self.nodes[i].theta - theta).abs() <= tol)
    }

    /// Interior and exterior limits of `C phi` at node `j`.
    pub fn boundary_at_node(&self, values: &[Complex], j: usize) -> (Complex, Complex) {
        let tj = &self.nodes[j].tau;
        let phij = &values[j];
        let mut acc = Complex::new(self.prec);
        for (k, (v, nd)) in values.iter().zip(&self.nodes).enumerate() {
            if k == j {
                continue;
            }
            let num = Complex::with_val(self.prec, v - phij) * &nd.weight;
            acc += num / Complex::with_val(self.prec, &nd.tau - tj);
        }
        acc += self.spectral_derivative(values, j) * &self.step;
        let exterior = acc / self.two_pi_i();
        let interior = Complex::with_val(self.prec, &exterior + phij);
        (interior, exterior)
    }

    /// Interior and exterior limits of `C phi` at a point `tau` of `Gamma` that
    /// is not a node, given the density value `phi(tau)` there.
    pub fn boundary_at(&self, values: &[Complex], tau: &Complex, phi_tau: &Complex) -> (Complex, Complex) {
        let mut acc = Complex::new(self.prec);
        for (v, nd) in values.iter().zip(&self.nodes) {
            let num = Complex::with_val(self.prec, v - phi_tau) * &nd.weight;
            acc += num / Complex::with_val(self.prec, &nd.tau - tau);
        }
        let exterior = acc / self.two_pi_i();
        let interior = Complex::with_val(self.prec, &exterior + phi_tau);
        (interior, exterior)
    }

    /// Interior and exterior limits at the point `tau` of `Gamma` with
    /// parameter `theta`, taking the node formula when `tau` is a node.
    pub fn boundary_at_theta(&self, values: &[Complex], theta: &Float, tau: &Complex, phi_tau: &Complex) -> (Complex, Complex) {
        match self.find_node(theta) {
            Some(j) => self.boundary_at_node(values, j),
            None => self.boundary_at(values, tau, phi_tau),
        }
    }
}

/// Splits `[0, 2 pi)` at the breakpoints and their mirror images.
fn make_panels(breakpoints: &[Float], n: usize, pi: &Float, two_pi: &Float) -> Result<Vec<Panel>, CauchyError> {
    let prec = pi.prec();
    if breakpoints.is_empty() {
        return Ok(vec![Panel {
            start: Float::new(prec),
            length: Float::with_val(prec, two_pi),
            nodes: n,
        }]);
    }
    let mut cuts: Vec<Float> = Vec::new();
    for b in breakpoints {
        if b.is_sign_negative() && !b.is_zero() || *b > *pi {
            return Err(CauchyError::InvalidGrid(format!("breakpoint {} outside [0, pi]", b.to_f64())));
        }
        cuts.push(b.clone());
        let mirror = Float::with_val(prec, two_pi - b);
        if !b.is_zero() && *b != *pi {
            cuts.push(mirror);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| Float::with_val(prec, &*a - &*b).abs() < 1e-30);
    let m = cuts.len();
    let mut panels = Vec::with_capacity(m);
    for i in 0..m {
        let start = cuts[i].clone();
        let mut end = cuts[(i + 1) % m].clone();
        if i + 1 == m {
            end += two_pi;
        }
        let length = Float::with_val(prec, &end - &start);
        panels.push(Panel { start, length, nodes: 0 });
    }
    // tanh-sinh panels converge at a rate set by the node count rather than the
    // panel length, so every panel gets the same even share
    let share = (n / m).max(MIN_PANEL_NODES);
    for p in panels.iter_mut() {
        p.nodes = share + share % 2;
    }
    Ok(panels)
}

/// Half-width of the tanh-sinh interval: the weight at the ends is below
/// `2^-prec` and the end nodes stay resolvable at `work` bits.
fn tanh_sinh_reach(prec: u32, work: u32) -> Float {
    let bits = f64::from(prec + 8).min(f64::from(work - prec));
    let y = bits * std::f64::consts::LN_2 / std::f64::consts::PI;
    Float::with_val(work, y).asinh()
}

/// `u -> (1 + tanh((pi/2) sinh(x)))/2` with `x = X (2u - 1)`, and its derivative.
fn tanh_sinh(u: &Float, reach: &Float) -> (Float, Float) {
    let prec = u.prec();
    let x = Float::with_val(prec, Float::with_val(prec, u * 2u32) - 1u32) * reach;
    let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
    let (sh, ch) = x.sinh_cosh(Float::new(prec));
    let y = Float::with_val(prec, &half_pi * &sh);
    // (1 + tanh y)/2 = 1/(1 + e^{-2y}), stable for both signs of y
    let e = Float::with_val(prec, -Float::with_val(prec, &y * 2u32)).exp();
    let g = Float::with_val(prec, 1u32 + &e).recip();
    let cy = y.cosh();
    let sech2 = Float::with_val(prec, cy.square_ref()).recip();
    let dg = Float::with_val(prec, &half_pi * &ch) * sech2 * reach;
    (g, dg)
}

/// `tau(theta)` and `tau'(theta)`, using `tau(theta) = 1/tau(2 pi - theta)` on
/// the lower half so the node set is exactly inversion symmetric.
fn symmetric_point(curve: &GammaCurve, theta: &Float, pi: &Float, two_pi: &Float) -> Result<(Complex, Complex), CauchyError> {
    let prec = theta.prec();
    if *theta <= *pi {
        let p = curve.point(theta)?;
        Ok((p.tau, p.dtau))
    } else {
        let mirror = Float::with_val(prec, two_pi - theta);
        let p = curve.point(&mirror)?;
        let tau = Complex::with_val(prec, p.tau.recip_ref());
        let dtau = p.dtau / Complex::with_val(prec, p.tau.square_ref());
        Ok((tau, dtau))
    }
}

/// A value computed on successively doubled grids.
#[derive(Clone, Debug)]
pub struct Stabilized<T> {
    pub value: T,
    pub nodes: usize,
    /// Change between the last two grids, relative to `max(1, |value|)`.
    pub change: f64,
}

/// Doubles the grid until the scalar `f(grid)` changes by less than the
/// stabilization tolerance.
pub fn stabilize<F>(
    curve: &GammaCurve,
    breakpoints: &[Float],
    opts: &QuadOptions,
    prec: u32,
    mut f: F,
) -> Result<(QuadratureGrid, Stabilized<Complex>), CauchyError>
where
    F: FnMut(&QuadratureGrid) -> Result<Complex, CauchyError>,
{
    let mut n = opts.initial_nodes.max(4);
    let mut prev = f(&QuadratureGrid::graded(curve, n, breakpoints, prec)?)?;
    let mut change = f64::NAN;
    loop {
        if 2 * n > opts.max_nodes {
            return Err(CauchyError::NotStabilized {
                nodes: n,
                change,
                tol: opts.stabilization_tol,
            });
        }
        n *= 2;
        let grid = QuadratureGrid::graded(curve, n, breakpoints, prec)?;
        let next = f(&grid)?;
        let scale = abs_f64(&next).max(1.0);
        change = abs_f64(&Complex::with_val(prec, &next - &prev)) / scale;
        if change <= opts.stabilization_tol {
            return Ok((
                grid,
                Stabilized {
                    value: next,
                    nodes: n,
                    change,
                },
            ));
        }
        prev = next;
    }
}

/// `∫_F g(t) dt / w^+(t)` with grid doubling until stable.
pub fn pullback_integral<G>(curve: &GammaCurve, g: G, opts: &QuadOptions, prec: u32) -> Result<Stabilized<Complex>, CauchyError>
where
    G: Fn(&ArcPoint) -> Complex,
{
    let (_, s) = stabilize(curve, &[], opts, prec, |grid| {
        let vals = grid.map(|nd| g(&nd.point));
        Ok(grid.pullback(&vals))
    })?;
    Ok(s)
}
