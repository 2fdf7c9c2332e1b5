use super::moments::{moments, WeightTable};
use super::{LevelWeight, MomentBasis, OrthoError, OrthoOptions, WeightSpec};
use crate::cauchy::{ArcPoint, SzegoEvaluator};
use crate::geometry::{phi_of, ArcSample, GammaCurve};
use crate::numerics::{abs_f64, poly_roots, LuDecomposition, Matrix, Polynomial, RootOptions};
use rug::float::Constant;
use rug::{Complex, Float};
use serde::Serialize;
use std::sync::Arc;

/// Accuracy target for the coefficients of `q_n`, relative to their size.
const COEFFICIENT_TARGET: f64 = 1e-3;

/// Numbers recorded while solving for `q_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthoDiagnostics {
    pub n: usize,
    pub basis: MomentBasis,
    pub prec: u32,
    /// Nodes of the grid the moments stabilized on.
    pub nodes: usize,
    pub moment_change: f64,
    /// `max_k |m_k|`.
    pub moment_norm: f64,
    /// One-norm condition number of the moment matrix.
    pub condition: f64,
    pub log10_det: f64,
    /// `max_{j<n} |∫ t^j q_n w_n dt / w^+|`.
    pub residual_max: f64,
    /// `1e-3 x ||m|| / condition`.
    pub ortho_tol: f64,
}

/// Monic `q_n` with `gamma_n`, `S_{w_n}` and the data for `R_n`.
#[derive(Clone, Debug)]
pub struct OrthoResult {
    weight: LevelWeight,
    q: Polynomial,
    gamma: Complex,
    gm: Complex,
    szego: SzegoEvaluator,
    table: Arc<WeightTable>,
    /// `q_n(t_k) w_n(t_k)` at the grid nodes.
    qw: Vec<Complex>,
    residuals: Vec<Complex>,
    diagnostics: OrthoDiagnostics,
}

/// Solves the orthogonality relations of degree `n` for the weight `w_n`.
pub fn solve_qn(spec: &WeightSpec, n: usize, opts: &OrthoOptions, prec: u32) -> Result<OrthoResult, OrthoError> {
    let weight = spec.weight(n)?;
    let mt = moments(&weight, 2 * n, opts, prec)?;
    let m = &mt.values;
    let moment_norm = mt.max_abs();

    let (q, condition, log10_det) = if n == 0 {
        (Polynomial::constant(Complex::with_val(prec, 1)), 1.0, 0.0)
    } else {
        let (a, rhs, lead) = match opts.basis {
            MomentBasis::Monomial => (
                Matrix::from_fn(n, |j, i| m[i + j].clone()),
                (0..n).map(|j| Complex::with_val(prec, -&m[n + j])).collect::<Vec<_>>(),
                Complex::with_val(prec, 1),
            ),
            MomentBasis::Chebyshev => {
                let gram = |j: usize, i: usize| Complex::with_val(prec, &m[i + j] + &m[i.abs_diff(j)]) / 2u32;
                let lead = Complex::with_val(prec, Float::with_val(prec, Float::i_exp(1, 1 - n as i32)));
                let rhs = (0..n).map(|j| -Complex::with_val(prec, &lead * gram(j, n))).collect();
                (Matrix::from_fn(n, gram), rhs, lead)
            }
        };
        let lu = LuDecomposition::new(&a).map_err(|source| OrthoError::SingularMatrix { n, source })?;
        let mut c = lu.solve(&rhs)?;
        c.push(lead);
        let q = match opts.basis {
            MomentBasis::Monomial => Polynomial::new(c),
            MomentBasis::Chebyshev => chebyshev_to_monomial(&c, prec),
        };
        (q, lu.condition_number(), lu.log10_determinant_abs())
    };

    let table = mt.table;
    let qw: Vec<Complex> = table
        .points()
        .iter()
        .zip(table.weights())
        .map(|(t, w)| q.eval(t) * w)
        .collect();
    let residuals = monomial_residuals(&table, &qw, n);
    let residual_max = residuals.iter().map(abs_f64).fold(0.0, f64::max);
    let ortho_tol = COEFFICIENT_TARGET * moment_norm / condition;
    let diagnostics = OrthoDiagnostics {
        n,
        basis: opts.basis,
        prec,
        nodes: mt.nodes,
        moment_change: mt.change,
        moment_norm,
        condition,
        log10_det,
        residual_max,
        ortho_tol,
    };
    if opts.check_residual && n > 0 {
        // forward error of the coefficients from rounding and from quadrature
        let q_norm: f64 = q.coeffs().iter().map(abs_f64).sum();
        let eps = 2f64.powi(1 - prec as i32);
        let estimate = condition * (mt.change + eps * n as f64 * q_norm);
        if residual_max > ortho_tol || estimate > COEFFICIENT_TARGET || !estimate.is_finite() {
            let shortfall = (estimate.max(residual_max / ortho_tol * COEFFICIENT_TARGET) / COEFFICIENT_TARGET).max(2.0);
            return Err(OrthoError::ResidualTooLarge {
                n,
                estimate,
                suggested_bits: prec + shortfall.log2().ceil() as u32 + 32,
            });
        }
    }

    let szego = weight.szego(&opts.quad, prec)?;
    let gm = szego.gm(prec);
    let gamma = Complex::with_val(prec, &gm * Float::with_val(prec, Float::i_exp(1, 1 - 2 * n as i32)));
    Ok(OrthoResult {
        weight,
        q,
        gamma,
        gm,
        szego,
        table: Arc::new(table),
        qw,
        residuals,
        diagnostics,
    })
}

/// `∫ t^j q_n w_n dt / w^+` for `j < n`, by the quadrature of the moments.
fn monomial_residuals(table: &WeightTable, qw: &[Complex], n: usize) -> Vec<Complex> {
    let prec = table.grid().prec();
    let mut out = vec![Complex::new(prec); n];
    for ((pk, t), v) in table.pull().iter().zip(table.points()).zip(qw) {
        let mut acc = Complex::with_val(prec, pk * v);
        for r in out.iter_mut() {
            *r += &acc;
            acc *= t;
        }
    }
    out
}

/// `sum c_k T_k` in the monomial basis.
fn chebyshev_to_monomial(c: &[Complex], prec: u32) -> Polynomial {
    let deg = c.len() - 1;
    let mut out = vec![Complex::new(prec); deg + 1];
    let mut prev: Vec<Complex> = vec![Complex::with_val(prec, 1)];
    let mut cur: Vec<Complex> = vec![Complex::new(prec), Complex::with_val(prec, 1)];
    for (k, ck) in c.iter().enumerate() {
        let tk = match k {
            0 => &prev,
            _ => &cur,
        };
        for (o, a) in out.iter_mut().zip(tk) {
            *o += Complex::with_val(prec, ck * a);
        }
        if k >= 1 {
            let mut next = vec![Complex::new(prec); cur.len() + 1];
            for (i, a) in cur.iter().enumerate() {
                next[i + 1] += Complex::with_val(prec, a * 2u32);
            }
            for (i, a) in prev.iter().enumerate() {
                next[i] -= a;
            }
            prev = std::mem::replace(&mut cur, next);
        }
    }
    // the leading coefficient is 2^(1-n) 2^(n-1), exact in binary
    out[deg] = Complex::with_val(prec, 1);
    Polynomial::new(out)
}

impl OrthoResult {
    pub fn n(&self) -> usize {
        self.diagnostics.n
    }

    pub fn prec(&self) -> u32 {
        self.diagnostics.prec
    }

    /// Monic `q_n` in the monomial basis.
    pub fn q(&self) -> &Polynomial {
        &self.q
    }

    /// `gamma_n = 2^(1-2n) G_{w_n}`.
    pub fn gamma(&self) -> &Complex {
        &self.gamma
    }

    /// `G_{w_n}`.
    pub fn gm(&self) -> &Complex {
        &self.gm
    }

    /// `S_{w_n}`.
    pub fn szego(&self) -> &SzegoEvaluator {
        &self.szego
    }

    pub fn weight(&self) -> &LevelWeight {
        &self.weight
    }

    pub fn curve(&self) -> &Arc<GammaCurve> {
        self.weight.spec().curve()
    }

    pub fn table(&self) -> &WeightTable {
        &self.table
    }

    /// `∫ t^j q_n w_n dt / w^+` for `j < n`.
    pub fn residuals(&self) -> &[Complex] {
        &self.residuals
    }

    pub fn diagnostics(&self) -> &OrthoDiagnostics {
        &self.diagnostics
    }

    /// `R_n(z) w(z)` for `z` off `F`, as `C Q(1/phi(z)) - C Q(phi(z))` with
    /// `Q = (q_n w_n) ∘ J` on `Gamma`.
    pub fn second_kind_w(&self, z: &Complex) -> Result<Complex, OrthoError> {
        let a = phi_of(z, self.curve())?;
        self.second_kind_w_tau(&a)
    }

    /// `R_n w` at the exterior point `a = phi(z)`.
    pub fn second_kind_w_tau(&self, a: &Complex) -> Result<Complex, OrthoError> {
        let prec = self.prec();
        let inner = Complex::with_val(prec, a.recip_ref());
        let grid = self.table.grid();
        Ok(grid.cauchy(&self.qw, &inner)? - grid.cauchy(&self.qw, a)?)
    }

    /// `R_n(z) = (1/pi i) ∫ q_n w_n / (t - z) dt / w^+`.
    pub fn second_kind(&self, z: &Complex) -> Result<Complex, OrthoError> {
        let prec = self.prec();
        let a = phi_of(z, self.curve())?;
        let w = (Complex::with_val(prec, &a) - Complex::with_val(prec, a.recip_ref())) / 2u32;
        Ok(self.second_kind_w_tau(&a)? / w)
    }

    /// `((R_n w)^+, (R_n w)^-)` at a sample of `F`.
    pub fn second_kind_w_boundary(&self, s: &ArcSample) -> Result<(Complex, Complex), OrthoError> {
        let prec = self.prec();
        let grid = self.table.grid();
        let p = ArcPoint::from_tau(&s.tau_plus, s.theta.to_f64());
        let qw = self.q.eval(&p.t) * self.weight.eval(&p, prec);
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        let mirror = Float::with_val(prec, &two_pi - &s.theta);
        let (int_plus, ext_plus) = grid.boundary_at_theta(&self.qw, &s.theta, &s.tau_plus, &qw);
        let (int_minus, ext_minus) = grid.boundary_at_theta(&self.qw, &mirror, &s.tau_minus, &qw);
        Ok((int_minus - ext_plus, int_plus - ext_minus))
    }

    /// Zeros of `q_n`.
    pub fn zeros(&self) -> Result<Vec<Complex>, OrthoError> {
        self.zeros_with(&RootOptions::default())
    }

    pub fn zeros_with(&self, opts: &RootOptions) -> Result<Vec<Complex>, OrthoError> {
        if self.n() == 0 {
            return Ok(Vec::new());
        }
        Ok(poly_roots(&self.q, opts)?)
    }

    /// Largest distance from a zero of `q_n` to the arc polyline.
    pub fn max_zero_distance(&self) -> Result<f64, OrthoError> {
        let curve = self.curve();
        Ok(self
            .zeros()?
            .iter()
            .map(|z| curve.distance_to_arc(crate::numerics::to_c64(z)))
            .fold(0.0, f64::max))
    }
}
