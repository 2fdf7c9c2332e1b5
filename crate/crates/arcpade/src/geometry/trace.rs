use super::{GeneratorSet, GeometryError};
use num_complex::Complex64;

/// Step control for the predictor-corrector tracer.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Residual `|u - level|` accepted by the Newton corrector.
    pub corrector_tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            initial_step: 1e-2,
            min_step: 1e-9,
            max_step: 2e-2,
            max_steps: 400_000,
            corrector_tol: 1e-13,
        }
    }
}

/// Traces the component of `{u = level}` through `start` counter-clockwise
/// until it closes, returning the polyline without repeating the start.
///
/// The predictor moves along the tangent `i grad u / |grad u|`; the corrector
/// is Newton's method along the gradient. The step is halved whenever the
/// correction exceeds a tenth of the step or the tangent turns too fast.
pub fn trace_level_set(
    g: &GeneratorSet,
    level: f64,
    start: Complex64,
    opts: &TraceOptions,
) -> Result<Vec<Complex64>, GeometryError> {
    let start = correct(g, level, start, opts).ok_or(GeometryError::TraceDiverged {
        at: start,
        step: 0.0,
    })?;
    let mut path = vec![start];
    let mut p = start;
    let mut h = opts.initial_step;
    let mut left_start = false;
    for _ in 0..opts.max_steps {
        let t = tangent(g, p)?;
        let (q, next_h) = loop {
            if h < opts.min_step {
                return Err(GeometryError::TraceDiverged { at: p, step: h });
            }
            let pred = p + h * t;
            match correct(g, level, pred, opts) {
                Some(q) if (q - pred).norm() <= 0.1 * h => {
                    let tq = tangent(g, q)?;
                    let turn = (tq / t).arg().abs();
                    if turn < 0.2 && (tq.re * t.re + tq.im * t.im) > 0.0 {
                        let grow = if (q - pred).norm() < 0.01 * h && turn < 0.05 { 1.5 } else { 1.0 };
                        break (q, (h * grow).min(opts.max_step));
                    }
                    h *= 0.5;
                }
                _ => h *= 0.5,
            }
        };
        let dist_to_start = (q - start).norm();
        if !left_start && dist_to_start > 4.0 * opts.max_step {
            left_start = true;
        }
        if left_start && (dist_to_start <= 1.05 * h || crosses(p, q, start, h)) {
            return Ok(path);
        }
        path.push(q);
        p = q;
        h = next_h;
    }
    Err(GeometryError::NotClosed {
        steps: opts.max_steps,
    })
}

fn tangent(g: &GeneratorSet, p: Complex64) -> Result<Complex64, GeometryError> {
    let grad = g.log_derivative(p).conj();
    let n = grad.norm();
    if !n.is_finite() || n > 1e10 || g.singular_distance(p) < 1e-9 {
        return Err(GeometryError::HitGenerator(p));
    }
    if n == 0.0 {
        return Err(GeometryError::TraceDiverged { at: p, step: 0.0 });
    }
    Ok(Complex64::i() * grad / n)
}

fn correct(g: &GeneratorSet, level: f64, mut q: Complex64, opts: &TraceOptions) -> Option<Complex64> {
    for _ in 0..12 {
        let r = g.potential(q) - level;
        if !r.is_finite() {
            return None;
        }
        if r.abs() <= opts.corrector_tol {
            return Some(q);
        }
        let grad = g.log_derivative(q).conj();
        q -= r * grad / grad.norm_sqr();
    }
    let r = g.potential(q) - level;
    (r.abs() <= 1e3 * opts.corrector_tol).then_some(q)
}

/// True when the step `p -> q` passes within `h/2` of `s` with `s` between
/// the two endpoints.
fn crosses(p: Complex64, q: Complex64, s: Complex64, h: f64) -> bool {
    let d = q - p;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return false;
    }
    let t = ((s - p) * d.conj()).re / len2;
    (0.0..=1.0).contains(&t) && (p + t * d - s).norm() <= 0.5 * h
}

/// Index pair of the first two non-adjacent segments of the closed polyline
/// that intersect.
pub(crate) fn self_intersection(poly: &[Complex64]) -> Option<(usize, usize)> {
    let n = poly.len();
    if n < 4 {
        return None;
    }
    let seg = |i: usize| (poly[i], poly[(i + 1) % n]);
    let bbox = |(a, b): (Complex64, Complex64)| {
        (a.re.min(b.re), a.re.max(b.re), a.im.min(b.im), a.im.max(b.im))
    };
    let boxes: Vec<_> = (0..n).map(|i| bbox(seg(i))).collect();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = (boxes[i], boxes[j]);
            if a.1 < b.0 || b.1 < a.0 || a.3 < b.2 || b.3 < a.2 {
                continue;
            }
            if segments_intersect(seg(i), seg(j)) {
                return Some((i, j));
            }
        }
    }
    None
}

fn segments_intersect((a, b): (Complex64, Complex64), (c, d): (Complex64, Complex64)) -> bool {
    let cross = |u: Complex64, v: Complex64| u.re * v.im - u.im * v.re;
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Generator;
    use crate::numerics::PrecisionContext;

    #[test]
    fn origin_generator_traces_the_unit_circle() {
        let c = PrecisionContext::new(64).unwrap();
        let g = GeneratorSet::from_tau(vec![Generator { eps: c.zero(), multiplicity: 1 }]).unwrap();
        let path = trace_level_set(&g, 0.0, Complex64::new(1.0, 0.0), &TraceOptions::default()).unwrap();
        assert!(path.len() > 100);
        for p in &path {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        // counter-clockwise: second point in the upper half plane
        assert!(path[1].im > 0.0);
        assert!(self_intersection(&path).is_none());
    }

    #[test]
    fn inner_level_is_a_smaller_circle() {
        let c = PrecisionContext::new(64).unwrap();
        let g = GeneratorSet::from_tau(vec![Generator { eps: c.zero(), multiplicity: 1 }]).unwrap();
        let path = trace_level_set(&g, 0.5f64.ln(), Complex64::new(0.5, 0.0), &TraceOptions::default()).unwrap();
        assert!(path.iter().all(|p| (p.norm() - 0.5).abs() < 1e-12));
    }

    #[test]
    fn figure_eight_is_detected() {
        let pts = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        assert!(self_intersection(&pts).is_some());
        let square = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, 1.0),
        ];
        assert!(self_intersection(&square).is_none());
    }
}
