//! JSON configuration schema mirroring the run parameters, and conversions
//! into core types. The triplet document is
//! `{d, l: [...], Q: [[...]], nu: {variant, ...}}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use levytype_core::levy::{LevyMeasureSpec, LevyTriplet};
use levytype_core::linalg::SymMatrix;
use levytype_core::symbol::{SdeSpec, StateSymbol};
use levytype_core::LevyError;

pub type AnyError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TripletConfig {
    pub d: usize,
    pub l: Vec<f64>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    pub nu: MeasureConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MeasureConfig {
    Zero,
    FiniteAtomic {
        atoms: Vec<AtomConfig>,
    },
    RadialDensity {
        density: DensityConfig,
        angular: Vec<RayConfig>,
        witness_bound: f64,
    },
    AlphaStable {
        alpha: f64,
        spherical: Vec<RayConfig>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomConfig {
    pub point: Vec<f64>,
    pub mass: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RayConfig {
    pub direction: Vec<f64>,
    pub weight: f64,
}

/// Named radial density families (closures cannot be serialised).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityConfig {
    /// `r^{−1−α}`.
    PowerLaw { alpha: f64 },
    /// `r^{−1−α} e^{−rate·r}`.
    Tempered { alpha: f64, rate: f64 },
    /// `r^{−1} e^{−rate·r}` (Gamma-subordinator style).
    GammaLike { rate: f64 },
}

impl DensityConfig {
    pub fn build(&self) -> Result<Arc<dyn Fn(f64) -> f64 + Send + Sync>, AnyError> {
        match *self {
            DensityConfig::PowerLaw { alpha } => {
                if !(alpha > 0.0 && alpha < 2.0) {
                    return Err(Box::new(LevyError::InvalidAlpha(alpha)));
                }
                Ok(Arc::new(move |r: f64| r.powf(-1.0 - alpha)))
            }
            DensityConfig::Tempered { alpha, rate } => {
                if !(alpha > 0.0 && alpha < 2.0) || rate < 0.0 {
                    return Err(Box::new(LevyError::InvalidAlpha(alpha)));
                }
                Ok(Arc::new(move |r: f64| r.powf(-1.0 - alpha) * (-rate * r).exp()))
            }
            DensityConfig::GammaLike { rate } => {
                if rate <= 0.0 {
                    return Err(Box::new(LevyError::InvalidRate(rate)));
                }
                Ok(Arc::new(move |r: f64| (-rate * r).exp() / r))
            }
        }
    }
}

impl TripletConfig {
    pub fn build(&self) -> Result<LevyTriplet, AnyError> {
        let q = SymMatrix::from_rows(&self.q)?;
        let nu = match &self.nu {
            MeasureConfig::Zero => LevyMeasureSpec::Zero,
            MeasureConfig::FiniteAtomic { atoms } => LevyMeasureSpec::FiniteAtomic(
                atoms.iter().map(|a| (a.point.clone(), a.mass)).collect(),
            ),
            MeasureConfig::RadialDensity {
                density,
                angular,
                witness_bound,
            } => LevyMeasureSpec::RadialDensity {
                density: density.build()?,
                angular: angular
                    .iter()
                    .map(|r| (r.direction.clone(), r.weight))
                    .collect(),
                witness_bound: *witness_bound,
            },
            MeasureConfig::AlphaStable { alpha, spherical } => LevyMeasureSpec::AlphaStable {
                alpha: *alpha,
                spherical: spherical
                    .iter()
                    .map(|r| (r.direction.clone(), r.weight))
                    .collect(),
            },
        };
        if matches!(nu, LevyMeasureSpec::RadialDensity { .. }) {
            // Declared integrability witness is checked once, up front.
            nu.check_witness(&levytype_core::levy::QuadSettings::default())?;
        }
        Ok(LevyTriplet::new(self.l.clone(), q, nu)?)
    }
}

/// Named coefficient fields for `dX = Φ(X⁻) dL` (d = n = 1 families plus
/// constant matrices).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiConfig {
    Identity { dim: usize },
    Constant { matrix: Vec<Vec<f64>> },
    /// `(base + amp·sin x)·I`, d = 1.
    ScaleSin { base: f64, amp: f64 },
    /// `(1 + x²)^{−1/2}`, d = 1.
    InvSqrtOnePlusX2,
    /// `√|x|` — deliberately non-Lipschitz; rejected by validation.
    SqrtAbs,
}

impl PhiConfig {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            PhiConfig::Identity { dim } => (*dim, *dim),
            PhiConfig::Constant { matrix } => {
                (matrix.len(), matrix.first().map(|r| r.len()).unwrap_or(0))
            }
            _ => (1, 1),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            PhiConfig::Identity { .. } | PhiConfig::Constant { .. } => 0.0,
            PhiConfig::ScaleSin { amp, .. } => amp.abs(),
            PhiConfig::InvSqrtOnePlusX2 => 1.0,
            PhiConfig::SqrtAbs => 1.0, // declared, but the probe slope diverges
        }
    }

    pub fn build(&self) -> Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync> {
        match self.clone() {
            PhiConfig::Identity { dim } => Arc::new(move |_x: &[f64]| {
                let mut m = vec![0.0; dim * dim];
                for i in 0..dim {
                    m[i * dim + i] = 1.0;
                }
                m
            }),
            PhiConfig::Constant { matrix } => {
                let flat: Vec<f64> = matrix.iter().flatten().copied().collect();
                Arc::new(move |_x: &[f64]| flat.clone())
            }
            PhiConfig::ScaleSin { base, amp } => {
                Arc::new(move |x: &[f64]| vec![base + amp * x[0].sin()])
            }
            PhiConfig::InvSqrtOnePlusX2 => {
                Arc::new(|x: &[f64]| vec![1.0 / (1.0 + x[0] * x[0]).sqrt()])
            }
            PhiConfig::SqrtAbs => Arc::new(|x: &[f64]| vec![x[0].abs().sqrt()]),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdeConfig {
    pub phi: PhiConfig,
    pub driver: TripletConfig,
    pub x0: Vec<f64>,
}

impl SdeConfig {
    pub fn build(&self) -> Result<SdeSpec, AnyError> {
        let (ds, dd) = self.phi.dims();
        let spec = SdeSpec {
            dim_state: ds,
            dim_driver: dd,
            phi: self.phi.build(),
            lipschitz: self.phi.lipschitz(),
            driver: self.driver.build()?,
            x0: self.x0.clone(),
        };
        // Probe grid along each state axis.
        let mut probes = Vec::new();
        for k in 0..ds {
            for step in -20..=20 {
                let mut p = vec![0.0; ds];
                p[k] = step as f64 * 0.17;
                probes.push(p.clone());
                p[k] = step as f64 * 1e-4;
                probes.push(p);
            }
        }
        spec.validate_lipschitz(&probes)?;
        Ok(spec)
    }
}

/// Named symbol families for the indices/sector/exit commands.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolConfig {
    Levy { triplet: TripletConfig },
    /// `q(x,ξ) = |ξ|^{α(x)}`, `α(x) = base + amp·sin x` clipped to `clip`.
    StableLike {
        alpha_base: f64,
        alpha_amp: f64,
        clip: (f64, f64),
    },
    /// The drift-dominated example `q(ξ) = iξ + |ξ|^{1/2}`.
    DriftPlusRoot,
}

impl SymbolConfig {
    pub fn build(&self) -> Result<StateSymbol, AnyError> {
        Ok(match self.clone() {
            SymbolConfig::Levy { triplet } => StateSymbol::levy(
                triplet.build()?,
                levytype_core::levy::QuadSettings::default(),
            ),
            SymbolConfig::StableLike {
                alpha_base,
                alpha_amp,
                clip,
            } => StateSymbol::stable_like(
                1,
                move |x: &[f64]| (alpha_base + alpha_amp * x[0].sin()).clamp(clip.0, clip.1),
                |_| 1.0,
            ),
            SymbolConfig::DriftPlusRoot => StateSymbol::from_fn(1, |_x, xi| {
                num_complex::Complex64::new(xi[0].abs().sqrt(), xi[0])
            }),
        })
    }
}

/// `exponent` command parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExponentConfig {
    pub triplet: TripletConfig,
    /// Symmetric 1-d grid `|ξ| ≤ xi_max` with `points` samples per axis
    /// (only d = 1 sweeps are tabulated; higher d evaluates along axes).
    pub xi_max: f64,
    pub points: usize,
    /// Also tabulate the truncated exponent `ψ_eps`.
    #[serde(default)]
    pub eps: Option<f64>,
}

/// `simulate` command parameters (one record, fields per method).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimulateConfig {
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub jump_law: Option<JumpLawConfig>,
    #[serde(default)]
    pub levels: Option<u32>,
    #[serde(default)]
    pub triplet: Option<TripletConfig>,
    #[serde(default)]
    pub sde: Option<SdeConfig>,
    #[serde(default)]
    pub series: Option<SeriesConfig>,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_grid_dt")]
    pub grid_dt: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_paths")]
    pub paths: usize,
}

fn default_horizon() -> f64 {
    1.0
}
fn default_grid_dt() -> f64 {
    1.0 / 256.0
}
fn default_eps() -> f64 {
    1e-2
}
fn default_paths() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpLawConfig {
    Atom { point: Vec<f64> },
    StdNormal { dim: usize },
    Rademacher,
}

impl JumpLawConfig {
    pub fn dim(&self) -> usize {
        match self {
            JumpLawConfig::Atom { point } => point.len(),
            JumpLawConfig::StdNormal { dim } => *dim,
            JumpLawConfig::Rademacher => 1,
        }
    }

    pub fn build(&self) -> levytype_core::sampler::JumpLaw {
        match self.clone() {
            JumpLawConfig::Atom { point } => levytype_core::sampler::jump_law_atom(point),
            JumpLawConfig::StdNormal { dim } => levytype_core::sampler::jump_law_std_normal(dim),
            JumpLawConfig::Rademacher => levytype_core::sampler::jump_law_rademacher(),
        }
    }
}

/// Series construction: `H(r, v) = v·r^{−1/α}` (inverse-level) or thinning
/// `H(r, v) = v·1_{r ≤ λ}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeriesConfig {
    InverseLevel {
        alpha: f64,
        v_law: JumpLawConfig,
        n_terms: usize,
    },
    Thinning {
        lambda: f64,
        v_law: JumpLawConfig,
        n_terms: usize,
    },
}

/// `validate` command parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidateConfig {
    #[serde(default)]
    pub triplet: Option<TripletConfig>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_grid_dt")]
    pub grid_dt: f64,
}

fn default_samples() -> usize {
    20_000
}

/// `symbol` command parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolCmdConfig {
    #[serde(default)]
    pub triplet: Option<TripletConfig>,
    #[serde(default)]
    pub sde: Option<SdeConfig>,
    pub x: Vec<f64>,
    pub xi: Vec<Vec<f64>>,
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<f64>,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_symbol_dt")]
    pub grid_dt: f64,
}

fn default_t_grid() -> Vec<f64> {
    vec![1e-2, 5e-3, 2.5e-3]
}
fn default_radius() -> f64 {
    2.0
}
fn default_symbol_dt() -> f64 {
    5e-4
}

/// `indices` command parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndicesConfig {
    pub symbol: SymbolConfig,
    pub x_grid: Vec<f64>,
    #[serde(default = "default_xi_max")]
    pub xi_max: f64,
    #[serde(default = "default_index_grid")]
    pub grid_points: usize,
    /// Also evaluate the maximal bound / exit brackets at these radii.
    #[serde(default)]
    pub radii: Vec<f64>,
}

fn default_xi_max() -> f64 {
    1e6
}
fn default_index_grid() -> usize {
    24
}
