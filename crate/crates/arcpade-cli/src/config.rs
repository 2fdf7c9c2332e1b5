//! Run configuration: one JSON document per run, validated strictly.

use arcpade::cauchy::{Constant, Density, ExpDensity, HbarSpec, PolyDensity, Product, QuadOptions, SideConj};
use arcpade::geometry::{gamma_from_parametrization, trace_gamma, FAlpha, GammaCurve, GeneratorSet, Identity, PolynomialArc, TraceOptions};
use arcpade::numerics::{Complex, Float, Polynomial, PrecisionContext, RootOptions, BITS_ENV, DEFAULT_BITS, MIN_BITS};
use arcpade::orthopoly::{MomentBasis, OrthoOptions, WeightSpec};
use arcpade::pade::{FieldGrid, MeasureSpec};
use arcpade::schemes::{InterpolationScheme, SchemeKind};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const SCHEMA_VERSION: u32 = 1;

/// A complex number as decimal (or `p/q`) strings `[re, im]`.
pub type Num = [String; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default = "default_bits")]
    pub precision_bits: u32,
    pub arc: ArcConfig,
    #[serde(default)]
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub weight: WeightConfig,
    #[serde(default)]
    pub degrees: Vec<usize>,
    #[serde(default = "default_probes")]
    pub probes: Vec<Num>,
    /// Seed of the root finder's starting circle.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub basis: MomentBasis,
    #[serde(default)]
    pub quad: QuadConfig,
    /// Significant digits of multiprecision numbers in the outputs.
    #[serde(default = "default_digits")]
    pub digits: usize,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub field: Option<FieldGrid>,
}

fn default_bits() -> u32 {
    DEFAULT_BITS
}

fn default_probes() -> Vec<Num> {
    vec![num("2", "2"), num("-2", "0")]
}

fn default_seed() -> u64 {
    RootOptions::default().seed
}

fn default_digits() -> usize {
    40
}

fn num(re: &str, im: &str) -> Num {
    [re.to_string(), im.to_string()]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArcConfig {
    Segment,
    /// The circular arc `(i alpha + x)/(1 + i alpha x)`, `x` in `[-1, 1]`.
    FAlpha {
        alpha: String,
        #[serde(default = "default_resolution")]
        resolution: usize,
    },
    /// Zero level set of the potential of generator points given in the `z`-plane.
    Generated {
        generators: Vec<PointConfig>,
        #[serde(default = "default_trace_nodes")]
        nodes: usize,
    },
    /// A polynomial arc `p(x) = sum c_k x^k` with `p(+-1) = +-1`.
    Parametrized {
        coeffs: Vec<Num>,
        #[serde(default = "default_resolution")]
        resolution: usize,
    },
}

fn default_resolution() -> usize {
    128
}

fn default_trace_nodes() -> usize {
    256
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub z: Num,
    #[serde(default = "one")]
    pub multiplicity: u32,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeConfig {
    /// All interpolation at infinity.
    #[default]
    Classical,
    /// Repetition of explicit points; a missing `z` means infinity.
    Repetition {
        points: Vec<OptionalPoint>,
        #[serde(default)]
        padding: bool,
    },
    /// Repetition of the generators of a generated arc.
    Generators {
        #[serde(default)]
        padding: bool,
    },
    EqualFlux { rho: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionalPoint {
    pub z: Option<Num>,
    #[serde(default = "one")]
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub density: DensityConfig,
    #[serde(default)]
    pub hbar: Vec<HbarZeroConfig>,
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self {
            density: DensityConfig::Constant { value: num("1", "0") },
            hbar: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityConfig {
    Constant { value: Num },
    /// `exp(c t)`.
    Exp { c: Num },
    /// `t` on the upper side of the arc and `conj(t)` on the lower side.
    SideConj,
    Polynomial { coeffs: Vec<Num> },
    Product { factors: Vec<DensityConfig> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HbarZeroConfig {
    pub x: Num,
    pub alpha: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    pub stabilization_tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        let q = QuadOptions::default();
        Self {
            initial_nodes: q.initial_nodes,
            max_nodes: q.max_nodes,
            stabilization_tol: q.stabilization_tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Bound on `|ratio - 1|` for both strong-asymptotic ratios at the largest degree.
    pub sa1_tol: f64,
    /// Bound on `max_j |Delta_j|` at the largest degree.
    pub sa3_tol: f64,
    pub sa3_jmax: usize,
    pub sa2_samples: usize,
    /// Bound on `|rho_n - 1|` at the largest degree.
    pub speedconv_tol: f64,
    /// Factor applied to `gamma_n` in the checks; anything but one is a
    /// deliberate fault for testing the harness.
    pub gamma_scale: String,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            sa1_tol: 0.1,
            sa3_tol: 0.1,
            sa3_jmax: 5,
            sa2_samples: 100,
            speedconv_tol: 0.1,
            gamma_scale: "1".to_string(),
        }
    }
}

/// Rejections of a configuration before any computation.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(#[from] serde_json::Error),
    #[error("schema_version {0} is not supported (expected {SCHEMA_VERSION})")]
    Version(u32),
    #[error("invalid value for {field}: {message}")]
    Value { field: String, message: String },
}

fn invalid(field: &str, message: impl ToString) -> ConfigError {
    ConfigError::Value {
        field: field.to_string(),
        message: message.to_string(),
    }
}

impl RunConfig {
    /// Parses and validates; `bits` (from the command line) and then
    /// `ARC_PADE_BITS` override the precision in the file.
    pub fn parse(text: &str, bits: Option<u32>) -> Result<Self, ConfigError> {
        let mut cfg: RunConfig = serde_json::from_str(text)?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Version(cfg.schema_version));
        }
        let env = match std::env::var(BITS_ENV) {
            Ok(s) => Some(s.trim().parse::<u32>().map_err(|e| invalid(BITS_ENV, e))?),
            Err(_) => None,
        };
        if let Some(b) = bits.or(env) {
            cfg.precision_bits = b;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.precision_bits < MIN_BITS {
            return Err(invalid("precision_bits", format!("must be at least {MIN_BITS}")));
        }
        if self.digits == 0 {
            return Err(invalid("digits", "must be positive"));
        }
        let ctx = self.context()?;
        for (i, p) in self.probes.iter().enumerate() {
            parse_num(&ctx, p, &format!("probes[{i}]"))?;
        }
        parse_real(&ctx, &self.verify.gamma_scale, "verify.gamma_scale")?;
        if self.quad.initial_nodes == 0 || self.quad.initial_nodes > self.quad.max_nodes {
            return Err(invalid("quad", "need 0 < initial_nodes <= max_nodes"));
        }
        if matches!(self.scheme, SchemeConfig::Generators { .. }) && !matches!(self.arc, ArcConfig::Generated { .. }) {
            return Err(invalid("scheme", "generators scheme needs a generated arc"));
        }
        Ok(())
    }

    pub fn context(&self) -> Result<PrecisionContext, ConfigError> {
        PrecisionContext::new(self.precision_bits).map_err(|e| invalid("precision_bits", e))
    }

    pub fn ortho_options(&self) -> OrthoOptions {
        OrthoOptions {
            quad: QuadOptions {
                initial_nodes: self.quad.initial_nodes,
                max_nodes: self.quad.max_nodes,
                stabilization_tol: self.quad.stabilization_tol,
            },
            basis: self.basis,
            check_residual: true,
        }
    }

    pub fn root_options(&self) -> RootOptions {
        RootOptions {
            seed: self.seed,
            ..RootOptions::default()
        }
    }

    pub fn probe_points(&self) -> Result<Vec<Complex>, ConfigError> {
        let ctx = self.context()?;
        self.probes
            .iter()
            .enumerate()
            .map(|(i, p)| parse_num(&ctx, p, &format!("probes[{i}]")))
            .collect()
    }

    pub fn gamma_scale(&self) -> Result<Float, ConfigError> {
        parse_real(&self.context()?, &self.verify.gamma_scale, "verify.gamma_scale")
    }
}

pub fn parse_num(ctx: &PrecisionContext, n: &Num, field: &str) -> Result<Complex, ConfigError> {
    ctx.parse_complex(&n[0], &n[1]).map_err(|e| invalid(field, e))
}

fn parse_real(ctx: &PrecisionContext, s: &str, field: &str) -> Result<Float, ConfigError> {
    ctx.parse_real(s).map_err(|e| invalid(field, e))
}

fn parse_poly(ctx: &PrecisionContext, coeffs: &[Num], field: &str) -> Result<Polynomial, ConfigError> {
    let c = coeffs
        .iter()
        .enumerate()
        .map(|(i, n)| parse_num(ctx, n, &format!("{field}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Polynomial::new(c))
}

/// Builds the curve. The outer error is a configuration problem, the inner
/// one a failure of the construction itself.
pub fn build_curve(cfg: &RunConfig) -> Result<Result<Arc<GammaCurve>, arcpade::Error>, ConfigError> {
    let ctx = cfg.context()?;
    let curve = match &cfg.arc {
        ArcConfig::Segment => gamma_from_parametrization(Arc::new(Identity), 64),
        ArcConfig::FAlpha { alpha, resolution } => {
            let a = parse_real(&ctx, alpha, "arc.alpha")?;
            gamma_from_parametrization(Arc::new(FAlpha::new(a)), *resolution)
        }
        ArcConfig::Generated { generators, nodes } => {
            let pts = generators
                .iter()
                .enumerate()
                .map(|(i, g)| Ok((parse_num(&ctx, &g.z, &format!("arc.generators[{i}]"))?, g.multiplicity)))
                .collect::<Result<Vec<_>, ConfigError>>()?;
            GeneratorSet::from_points(&pts).and_then(|g| trace_gamma(&g, *nodes, &TraceOptions::default()))
        }
        ArcConfig::Parametrized { coeffs, resolution } => {
            let p = parse_poly(&ctx, coeffs, "arc.coeffs")?;
            gamma_from_parametrization(Arc::new(PolynomialArc::new(p)), *resolution)
        }
    };
    Ok(curve.map(Arc::new).map_err(arcpade::Error::from))
}

pub fn build_scheme(
    cfg: &RunConfig,
    curve: &Arc<GammaCurve>,
) -> Result<Result<Arc<InterpolationScheme>, arcpade::Error>, ConfigError> {
    let ctx = cfg.context()?;
    let prec = cfg.precision_bits;
    let scheme = match &cfg.scheme {
        SchemeConfig::Classical => Ok(InterpolationScheme::new(Arc::clone(curve), SchemeKind::Classical, prec)),
        SchemeConfig::Repetition { points, padding } => {
            let pts = points
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let z = match &p.z {
                        Some(n) => Some(parse_num(&ctx, n, &format!("scheme.points[{i}]"))?),
                        None => None,
                    };
                    Ok((z, p.multiplicity))
                })
                .collect::<Result<Vec<_>, ConfigError>>()?;
            InterpolationScheme::from_points(Arc::clone(curve), &pts, *padding, prec)
        }
        SchemeConfig::Generators { padding } => InterpolationScheme::from_generators(Arc::clone(curve), *padding, prec),
        SchemeConfig::EqualFlux { rho } => {
            if !(*rho > 0.0 && *rho < 1.0) {
                return Err(invalid("scheme.rho", "must lie in (0, 1)"));
            }
            Ok(InterpolationScheme::new(Arc::clone(curve), SchemeKind::EqualFlux { rho: *rho }, prec))
        }
    };
    Ok(scheme.map(Arc::new).map_err(arcpade::Error::from))
}

fn build_density(ctx: &PrecisionContext, d: &DensityConfig, field: &str) -> Result<Arc<dyn Density>, ConfigError> {
    Ok(match d {
        DensityConfig::Constant { value } => Arc::new(Constant(parse_num(ctx, value, field)?)),
        DensityConfig::Exp { c } => Arc::new(ExpDensity(parse_num(ctx, c, field)?)),
        DensityConfig::SideConj => Arc::new(SideConj),
        DensityConfig::Polynomial { coeffs } => Arc::new(PolyDensity(parse_poly(ctx, coeffs, field)?)),
        DensityConfig::Product { factors } => Arc::new(Product(
            factors
                .iter()
                .enumerate()
                .map(|(i, f)| build_density(ctx, f, &format!("{field}.factors[{i}]")))
                .collect::<Result<_, _>>()?,
        )),
    })
}

/// The measure `mu_dot = h hbar` on the curve.
pub fn build_measure(cfg: &RunConfig, curve: &Arc<GammaCurve>) -> Result<Result<MeasureSpec, arcpade::Error>, ConfigError> {
    let ctx = cfg.context()?;
    let h = build_density(&ctx, &cfg.weight.density, "weight.density")?;
    let hbar = if cfg.weight.hbar.is_empty() {
        None
    } else {
        let zeros = cfg
            .weight
            .hbar
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let field = format!("weight.hbar[{i}]");
                Ok((parse_num(&ctx, &z.x, &field)?, parse_real(&ctx, &z.alpha, &field)?))
            })
            .collect::<Result<Vec<_>, ConfigError>>()?;
        match HbarSpec::new(curve, &zeros, cfg.precision_bits) {
            Ok(spec) => Some(Arc::new(spec)),
            Err(e) => return Ok(Err(e.into())),
        }
    };
    Ok(Ok(MeasureSpec::new(Arc::clone(curve), h, hbar, cfg.precision_bits).with_options(cfg.ortho_options())))
}

/// Everything a degree-by-degree run needs.
pub struct Setup {
    pub curve: Arc<GammaCurve>,
    pub scheme: Arc<InterpolationScheme>,
    pub measure: MeasureSpec,
    pub weights: WeightSpec,
}

pub fn build_setup(cfg: &RunConfig) -> Result<Result<Setup, arcpade::Error>, ConfigError> {
    let curve = match build_curve(cfg)? {
        Ok(c) => c,
        Err(e) => return Ok(Err(e)),
    };
    let scheme = match build_scheme(cfg, &curve)? {
        Ok(s) => s,
        Err(e) => return Ok(Err(e)),
    };
    let measure = match build_measure(cfg, &curve)? {
        Ok(m) => m,
        Err(e) => return Ok(Err(e)),
    };
    let weights = measure.weights(Arc::clone(&scheme));
    Ok(Ok(Setup {
        curve,
        scheme,
        measure,
        weights,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"schema_version": 1, "arc": {"kind": "segment"}}"#;

    #[test]
    fn defaults_are_filled_in() {
        let cfg = RunConfig::parse(MINIMAL, Some(128)).unwrap();
        assert_eq!(cfg.precision_bits, 128);
        assert_eq!(cfg.scheme, SchemeConfig::Classical);
        assert_eq!(cfg.probes.len(), 2);
        let resolved = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::parse(&resolved, None).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_named() {
        let text = r#"{"schema_version": 1, "arc": {"kind": "segment"}, "degreez": [1]}"#;
        let err = RunConfig::parse(text, None).unwrap_err().to_string();
        assert!(err.contains("degreez"), "{err}");
        let text = r#"{"schema_version": 1, "arc": {"kind": "f_alpha", "alpha": "-0.5", "beta": 1}}"#;
        assert!(RunConfig::parse(text, None).unwrap_err().to_string().contains("beta"));
    }

    #[test]
    fn bad_values_are_rejected() {
        let text = r#"{"schema_version": 2, "arc": {"kind": "segment"}}"#;
        assert!(matches!(RunConfig::parse(text, None), Err(ConfigError::Version(2))));
        assert!(RunConfig::parse(MINIMAL, Some(16)).is_err());
        let text = r#"{"schema_version": 1, "arc": {"kind": "segment"}, "probes": [["x", "0"]]}"#;
        assert!(RunConfig::parse(text, None).unwrap_err().to_string().contains("probes[0]"));
    }
}
