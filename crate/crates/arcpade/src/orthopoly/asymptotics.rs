use super::{OrthoError, OrthoResult};
use crate::geometry::{phi_of, ArcF};
use crate::numerics::{abs_f64, to_c64};
use rug::ops::Pow;
use rug::Complex;
use serde::Serialize;

/// `((2/phi)^n q_n S_{w_n}, R_n w / (gamma_n S_n))` at `z` off `F`, with
/// `S_n = (2/phi)^n S_{w_n}`. Both tend to one.
pub fn sa1_ratio(result: &OrthoResult, z: &Complex) -> Result<(Complex, Complex), OrthoError> {
    let prec = result.prec();
    let a = phi_of(z, result.curve())?;
    let sn = scaled_szego(result, &a)?;
    let q_branch = Complex::with_val(prec, &sn * result.q().eval(z));
    let rw = result.second_kind_w_tau(&a)?;
    let r_branch = rw / (sn * result.gamma());
    Ok((q_branch, r_branch))
}

/// `S_n = (2/a)^n S_{w_n}` at the exterior point `a`.
fn scaled_szego(result: &OrthoResult, a: &Complex) -> Result<Complex, OrthoError> {
    let prec = result.prec();
    let two_over = Complex::with_val(prec, a.recip_ref()) * 2u32;
    let power = Complex::with_val(prec, (&two_over).pow(result.n() as u32));
    Ok(power * result.szego().eval_tau(a)?)
}

/// `d_n^±` at one sample of `F`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sa2Sample {
    pub t: [f64; 2],
    pub d_plus: [f64; 2],
    pub d_minus: [f64; 2],
}

/// Boundary residuals `d_n^± = (R_n w)^± / (gamma_n S_n^±) - 1` and their
/// norms against `|dt| / sqrt|1 - t^2|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sa2Report {
    pub n: usize,
    pub samples: Vec<Sa2Sample>,
    /// `∫ (|d^+| + |d^-|)`.
    pub l1: f64,
    /// `(∫ (|d^+|^2 + |d^-|^2))^(1/2)`.
    pub l2: f64,
    pub sup: f64,
}

/// Samples `d_n^±` at `m` midpoints of `F`.
pub fn sa2_residuals(result: &OrthoResult, m: usize) -> Result<Sa2Report, OrthoError> {
    let prec = result.prec();
    let arc = ArcF::new(result.curve(), m, prec)?;
    let step = std::f64::consts::PI / m as f64;
    let (mut l1, mut l2, mut sup) = (0.0, 0.0, 0.0f64);
    let mut samples = Vec::with_capacity(m);
    for s in arc.samples() {
        let (rw_plus, rw_minus) = result.second_kind_w_boundary(s)?;
        let (s_plus, s_minus) = result.szego().boundary(s)?;
        let mut d = [Complex::new(prec), Complex::new(prec)];
        for (k, (rw, tau, sz)) in [(rw_plus, &s.tau_plus, s_plus), (rw_minus, &s.tau_minus, s_minus)]
            .into_iter()
            .enumerate()
        {
            let two_over = Complex::with_val(prec, tau.recip_ref()) * 2u32;
            let sn = Complex::with_val(prec, (&two_over).pow(result.n() as u32)) * sz;
            d[k] = rw / (sn * result.gamma()) - 1u32;
        }
        // |dt| / sqrt|1 - t^2| = |tau'| / |tau| d theta on Gamma
        let weight = abs_f64(&s.dtau) / abs_f64(&s.tau_plus) * step;
        let (a, b) = (abs_f64(&d[0]), abs_f64(&d[1]));
        l1 += (a + b) * weight;
        l2 += (a * a + b * b) * weight;
        sup = sup.max(a).max(b);
        let pair = |z: &Complex| {
            let c = to_c64(z);
            [c.re, c.im]
        };
        samples.push(Sa2Sample {
            t: pair(&s.t),
            d_plus: pair(&d[0]),
            d_minus: pair(&d[1]),
        });
    }
    Ok(Sa2Report {
        n: result.n(),
        samples,
        l1,
        l2: l2.sqrt(),
        sup,
    })
}

/// Behaviour of a sequence of norms across increasing `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    /// Non-increasing.
    Decreasing,
    /// Not monotone, but never above twice the minimum.
    Bounded,
    Growing,
}

/// Trend of the `L^2` norms of a list of reports ordered by `n`. Norms
/// below `floor` are rounding noise and count as equal to it.
pub fn sa2_trend(reports: &[Sa2Report], floor: f64) -> Trend {
    let norms: Vec<f64> = reports.iter().map(|r| r.l2.max(floor)).collect();
    if norms.windows(2).all(|w| w[1] <= w[0]) {
        return Trend::Decreasing;
    }
    let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let max = norms.iter().copied().fold(0.0, f64::max);
    if max <= 2.0 * min {
        Trend::Bounded
    } else {
        Trend::Growing
    }
}

/// Moment gaps `Delta_j(n) = ∫ t^j q_n^2 w_n / gamma_n dt/w^+ - ∫ t^j dt/w^+`.
#[derive(Clone, Debug, Serialize)]
pub struct Sa3Report {
    pub n: usize,
    #[serde(skip)]
    pub values: Vec<Complex>,
    pub abs: Vec<f64>,
}

pub fn sa3_moments(result: &OrthoResult, jmax: usize) -> Sa3Report {
    let prec = result.prec();
    let table = result.table();
    let mut values = vec![Complex::new(prec); jmax + 1];
    for ((t, w), pk) in table.points().iter().zip(table.weights()).zip(table.pull()) {
        let q = result.q().eval(t);
        let q2w = Complex::with_val(prec, q.square_ref()) * w / result.gamma();
        let mut f = Complex::with_val(prec, q2w - 1u32) * pk;
        for v in values.iter_mut() {
            *v += &f;
            f *= t;
        }
    }
    Sa3Report {
        n: result.n(),
        abs: values.iter().map(abs_f64).collect(),
        values,
    }
}
