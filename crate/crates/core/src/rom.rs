//! Random orthogonal measures and the L² stochastic integral.
//!
//! A backend describes a set-indexed noise `N(R)` with control measure `μ`,
//! `E[N(R)N(S)] = μ(R ∩ S)`. Backends materialise one underlying path per
//! `(seed, stream)` — a [`Replay`] — and every interval evaluation within a
//! replay reads that path, so correlations across overlapping sets are
//! per-ω statements, as the defining isometry requires.
//!
//! Brownian-driven replays live on a fixed time grid; interval endpoints and
//! stopping times are snapped to it, and the control measure uses the
//! snapped lengths so the isometry is exact in law at grid resolution.
//! Jump-driven replays keep exact event times and need no snapping.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{LevyError, Result};
use crate::levy::{ConcreteKind, ConcreteMeasure, LevyMeasureSpec, LevyTriplet, QuadSettings};
use crate::linalg::SymMatrix;
use crate::math;
use crate::quad;
use crate::rng::RandomSource;
use crate::sampler::LevyItoSampler;

/// Half-open time interval `(s, t]`, `0 ≤ s < t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeInterval {
    pub s: f64,
    pub t: f64,
}

impl TimeInterval {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if !(s >= 0.0 && t > s) {
            return Err(LevyError::OutOfSemiring);
        }
        Ok(TimeInterval { s, t })
    }

    pub fn length(&self) -> f64 {
        self.t - self.s
    }

    pub fn intersect(&self, other: &TimeInterval) -> Option<TimeInterval> {
        let s = self.s.max(other.s);
        let t = self.t.min(other.t);
        if t > s {
            Some(TimeInterval { s, t })
        } else {
            None
        }
    }
}

/// Space component of a space-time semiring set: a norm annulus
/// `{ lo ≤ |y| < hi }`, optionally restricted to one angular ray (an index
/// into the measure's angular atoms, or the atom index for atomic measures).
/// The exclusion radius `lo > 0` keeps the closure away from the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceRegion {
    pub lo: f64,
    pub hi: f64,
    pub ray: Option<usize>,
}

impl SpaceRegion {
    pub fn new(lo: f64, hi: f64, ray: Option<usize>) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) {
            return Err(LevyError::RegionTouchesOrigin);
        }
        Ok(SpaceRegion { lo, hi, ray })
    }

    pub fn intersect(&self, other: &SpaceRegion) -> Option<SpaceRegion> {
        let ray = match (self.ray, other.ray) {
            (None, r) | (r, None) => r,
            (Some(a), Some(b)) if a == b => Some(a),
            _ => return None,
        };
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if hi > lo {
            Some(SpaceRegion { lo, hi, ray })
        } else {
            None
        }
    }

    fn matches(&self, r: f64, ray: usize) -> bool {
        r >= self.lo && r < self.hi && self.ray.map(|j| j == ray).unwrap_or(true)
    }
}

/// Semiring sets indexing the noise: plain time intervals for path-driven
/// noises, products `(s,t] × B` for the compensated Poisson measure.
#[derive(Clone, Debug, PartialEq)]
pub enum SemiringSet {
    Time(TimeInterval),
    SpaceTime(TimeInterval, SpaceRegion),
}

impl SemiringSet {
    pub fn time(s: f64, t: f64) -> Result<Self> {
        Ok(SemiringSet::Time(TimeInterval::new(s, t)?))
    }

    pub fn space_time(s: f64, t: f64, lo: f64, hi: f64, ray: Option<usize>) -> Result<Self> {
        Ok(SemiringSet::SpaceTime(
            TimeInterval::new(s, t)?,
            SpaceRegion::new(lo, hi, ray)?,
        ))
    }

    pub fn intersect(&self, other: &SemiringSet) -> Option<SemiringSet> {
        match (self, other) {
            (SemiringSet::Time(a), SemiringSet::Time(b)) => a.intersect(b).map(SemiringSet::Time),
            (SemiringSet::SpaceTime(a, u), SemiringSet::SpaceTime(b, v)) => {
                match (a.intersect(b), u.intersect(v)) {
                    (Some(i), Some(w)) => Some(SemiringSet::SpaceTime(i, w)),
                    _ => None,
                }
            }
            _ => None,
        }
    }
}

/// Square-integrable martingale drivers for the martingale-noise backend.
#[derive(Clone, Debug)]
pub enum MartingaleKind {
    /// Standard Brownian motion; `⟨M⟩_t = t`.
    Brownian,
    /// `N_t − λt` for a rate-λ Poisson process; `⟨M⟩_t = λt`.
    CompensatedPoisson { lambda: f64 },
}

/// A sampleable random orthogonal measure with its control measure.
#[derive(Clone)]
pub enum RandomOrthogonalMeasure {
    /// Brownian increments on `(s, t]`; control measure = Lebesgue (snapped).
    WhiteNoise { horizon: f64, grid_dt: f64 },
    /// Increments of a square-integrable martingale; control measure
    /// `μ((s,t]) = E(⟨M⟩_t − ⟨M⟩_s)`.
    MartingaleNoise {
        kind: MartingaleKind,
        horizon: f64,
        grid_dt: f64,
    },
    /// Compensated Poisson measure `Ñ((s,t] × B)` of the jump part of a
    /// Lévy measure truncated at `eps`; control measure `dt × ν`.
    CompensatedPoisson {
        measure: LevyMeasureSpec,
        eps: f64,
        horizon: f64,
        settings: QuadSettings,
    },
}

impl RandomOrthogonalMeasure {
    pub fn white_noise(horizon: f64) -> Self {
        RandomOrthogonalMeasure::WhiteNoise {
            horizon,
            grid_dt: horizon / 4096.0,
        }
    }

    pub fn martingale(kind: MartingaleKind, horizon: f64) -> Self {
        RandomOrthogonalMeasure::MartingaleNoise {
            kind,
            horizon,
            grid_dt: horizon / 4096.0,
        }
    }

    pub fn compensated_poisson(measure: LevyMeasureSpec, eps: f64, horizon: f64) -> Self {
        RandomOrthogonalMeasure::CompensatedPoisson {
            measure,
            eps,
            horizon,
            settings: QuadSettings::default(),
        }
    }

    fn accepts(&self, set: &SemiringSet) -> bool {
        match (self, set) {
            (RandomOrthogonalMeasure::WhiteNoise { horizon, .. }, SemiringSet::Time(i)) => {
                i.t <= *horizon
            }
            (RandomOrthogonalMeasure::MartingaleNoise { horizon, .. }, SemiringSet::Time(i)) => {
                i.t <= *horizon
            }
            (
                RandomOrthogonalMeasure::CompensatedPoisson { horizon, eps, .. },
                SemiringSet::SpaceTime(i, b),
            ) => i.t <= *horizon && b.lo >= *eps,
            _ => false,
        }
    }

    /// Control measure `μ(R)`; for Brownian-driven backends the snapped
    /// version that the replay realises.
    pub fn control_measure(&self, set: &SemiringSet) -> Result<f64> {
        if !self.accepts(set) {
            return Err(LevyError::OutOfSemiring);
        }
        match (self, set) {
            (RandomOrthogonalMeasure::WhiteNoise { grid_dt, .. }, SemiringSet::Time(i))
            | (
                RandomOrthogonalMeasure::MartingaleNoise {
                    kind: MartingaleKind::Brownian,
                    grid_dt,
                    ..
                },
                SemiringSet::Time(i),
            ) => Ok(snap(i.t, *grid_dt) - snap(i.s, *grid_dt)),
            (
                RandomOrthogonalMeasure::MartingaleNoise {
                    kind: MartingaleKind::CompensatedPoisson { lambda },
                    ..
                },
                SemiringSet::Time(i),
            ) => Ok(lambda * i.length()),
            (
                RandomOrthogonalMeasure::CompensatedPoisson {
                    measure, settings, ..
                },
                SemiringSet::SpaceTime(i, b),
            ) => Ok(i.length() * region_intensity(&measure.to_concrete()?, b, settings)?),
            _ => Err(LevyError::OutOfSemiring),
        }
    }

    /// Precompute the sampling machinery shared by all replays (for the
    /// compensated Poisson backend this builds the jump tables once).
    pub fn prepare(&self) -> Result<PreparedRom> {
        let sampler = match self {
            RandomOrthogonalMeasure::CompensatedPoisson {
                measure,
                eps,
                settings,
                ..
            } => {
                let dim = measure.dim().unwrap_or(1);
                let triplet =
                    LevyTriplet::new(vec![0.0; dim], SymMatrix::zeros(dim), measure.clone())?;
                Some(LevyItoSampler::new(&triplet, *eps, settings)?)
            }
            _ => None,
        };
        Ok(PreparedRom {
            backend: self.clone(),
            sampler,
        })
    }

    /// Materialise the underlying path for one `(seed, stream)`. One-shot
    /// convenience; for ensembles use [`RandomOrthogonalMeasure::prepare`].
    pub fn replay(&self, rng: &mut RandomSource) -> Result<Replay> {
        self.prepare()?.replay(rng)
    }
}

/// A simple function with the control-measure data of every term cached, so
/// ensemble evaluation does not re-run region quadratures per replay.
#[derive(Clone, Debug)]
pub struct CompiledSimple {
    terms: Vec<(f64, SemiringSet, f64)>,
}

/// A backend with its per-replay machinery prebuilt.
#[derive(Clone)]
pub struct PreparedRom {
    pub backend: RandomOrthogonalMeasure,
    sampler: Option<LevyItoSampler>,
}

impl PreparedRom {
    /// Cache `ν(B)` for every space-time term of `f`.
    pub fn compile(&self, f: &SimpleFunction) -> Result<CompiledSimple> {
        let mut terms = Vec::with_capacity(f.terms.len());
        for (c, set) in &f.terms {
            let nu_b = match (&self.backend, set) {
                (
                    RandomOrthogonalMeasure::CompensatedPoisson {
                        measure, settings, ..
                    },
                    SemiringSet::SpaceTime(_, b),
                ) => region_intensity(&measure.to_concrete()?, b, settings)?,
                _ => 0.0,
            };
            terms.push((*c, set.clone(), nu_b));
        }
        Ok(CompiledSimple { terms })
    }

    /// `I_N(f)` on one replay using the cached compensators.
    pub fn integrate_compiled(&self, f: &CompiledSimple, replay: &Replay) -> Result<f64> {
        let mut acc = 0.0;
        for (c, set, nu_b) in &f.terms {
            let v = match (replay, set) {
                (
                    Replay::JumpLedger { events, .. },
                    SemiringSet::SpaceTime(i, b),
                ) => {
                    let count = events
                        .iter()
                        .filter(|(t, r, ray)| *t > i.s && *t <= i.t && b.matches(*r, *ray))
                        .count() as f64;
                    count - i.length() * nu_b
                }
                _ => replay.noise(set)?,
            };
            acc += c * v;
        }
        Ok(acc)
    }
}

impl PreparedRom {
    pub fn replay(&self, rng: &mut RandomSource) -> Result<Replay> {
        match &self.backend {
            RandomOrthogonalMeasure::WhiteNoise { horizon, grid_dt }
            | RandomOrthogonalMeasure::MartingaleNoise {
                kind: MartingaleKind::Brownian,
                horizon,
                grid_dt,
            } => {
                let n = (math::ceil(horizon / grid_dt - 1e-9) as usize).max(1);
                let sd = math::sqrt(*grid_dt);
                let mut values = Vec::with_capacity(n + 1);
                values.push(0.0);
                let mut w = 0.0;
                for _ in 0..n {
                    w += sd * rng.standard_normal();
                    values.push(w);
                }
                Ok(Replay::Grid {
                    grid_dt: *grid_dt,
                    values,
                })
            }
            RandomOrthogonalMeasure::MartingaleNoise {
                kind: MartingaleKind::CompensatedPoisson { lambda },
                horizon,
                ..
            } => {
                if *lambda <= 0.0 {
                    return Err(LevyError::InvalidRate(*lambda));
                }
                let mut times = Vec::new();
                let mut t = 0.0;
                loop {
                    t += rng.exponential(*lambda);
                    if t > *horizon {
                        break;
                    }
                    times.push(t);
                }
                Ok(Replay::CountingMartingale {
                    lambda: *lambda,
                    jump_times: times,
                })
            }
            RandomOrthogonalMeasure::CompensatedPoisson {
                measure,
                horizon,
                settings,
                ..
            } => {
                let sampler = self
                    .sampler
                    .as_ref()
                    .ok_or(LevyError::Unsupported("prepared backend lost its sampler"))?;
                let concrete = measure.to_concrete()?;
                let raw = sampler.sample_jumps(*horizon, rng);
                let mut events = Vec::with_capacity(raw.len());
                for (t, delta) in raw {
                    let r = math::norm(&delta);
                    let ray = nearest_ray(&concrete, &delta);
                    events.push((t, r, ray));
                }
                Ok(Replay::JumpLedger {
                    concrete,
                    settings: *settings,
                    events,
                })
            }
        }
    }
}

fn snap(t: f64, grid_dt: f64) -> f64 {
    math::floor(t / grid_dt + 0.5) * grid_dt
}

/// Match a sampled jump back to the angular atom (or atom index) it came
/// from, so space regions can filter by ray.
fn nearest_ray(concrete: &ConcreteMeasure, delta: &[f64]) -> usize {
    match &concrete.kind {
        ConcreteKind::Radial { angular, .. } => {
            let mut best = 0;
            let mut best_dot = f64::NEG_INFINITY;
            for (j, (z, _)) in angular.iter().enumerate() {
                let d = math::dot(z, delta);
                if d > best_dot {
                    best_dot = d;
                    best = j;
                }
            }
            best
        }
        ConcreteKind::Atoms(atoms) => {
            let mut best = 0;
            let mut best_dist = f64::INFINITY;
            for (j, (p, _)) in atoms.iter().enumerate() {
                let d: f64 = p.iter().zip(delta).map(|(a, b)| (a - b) * (a - b)).sum();
                if d < best_dist {
                    best_dist = d;
                    best = j;
                }
            }
            best
        }
        ConcreteKind::Zero => 0,
    }
}

/// `ν(B)` for a space region.
fn region_intensity(
    concrete: &ConcreteMeasure,
    b: &SpaceRegion,
    settings: &QuadSettings,
) -> Result<f64> {
    match &concrete.kind {
        ConcreteKind::Zero => Ok(0.0),
        ConcreteKind::Atoms(atoms) => Ok(atoms
            .iter()
            .enumerate()
            .filter(|(j, (p, _))| b.matches(math::norm(p), *j))
            .map(|(_, (_, m))| m)
            .sum()),
        ConcreteKind::Radial { density, angular } => {
            let dm1 = (angular.first().map(|(z, _)| z.len()).unwrap_or(1) as f64) - 1.0;
            let w: f64 = angular
                .iter()
                .enumerate()
                .filter(|(j, _)| b.ray.map(|r| r == *j).unwrap_or(true))
                .map(|(_, (_, w))| w)
                .sum();
            if w == 0.0 {
                return Ok(0.0);
            }
            let radial = quad::integrate(
                |r| density(r) * math::powf(r, dm1),
                b.lo,
                b.hi,
                settings.tol,
                settings.max_panels,
            )?;
            Ok(w * radial)
        }
    }
}

/// One materialised path of a backend.
#[derive(Clone, Debug)]
pub enum Replay {
    /// Grid-valued driver (Brownian): `values[k] = M(k·grid_dt)`.
    Grid { grid_dt: f64, values: Vec<f64> },
    /// Poisson martingale: exact jump times, `M_t = N_t − λt`.
    CountingMartingale { lambda: f64, jump_times: Vec<f64> },
    /// Compensated Poisson random measure: events `(t, |y|, ray)`.
    JumpLedger {
        concrete: ConcreteMeasure,
        settings: QuadSettings,
        events: Vec<(f64, f64, usize)>,
    },
}

impl Replay {
    /// Driver value `M_t` (grid-snapped for grid replays).
    pub fn driver_at(&self, t: f64) -> f64 {
        match self {
            Replay::Grid { grid_dt, values } => {
                let idx = (math::floor(t / grid_dt + 0.5) as usize).min(values.len() - 1);
                values[idx]
            }
            Replay::CountingMartingale { lambda, jump_times } => {
                let n = jump_times.iter().take_while(|s| **s <= t).count();
                n as f64 - lambda * t
            }
            Replay::JumpLedger { .. } => 0.0,
        }
    }

    /// Evaluate `N(R)` on this path.
    pub fn noise(&self, set: &SemiringSet) -> Result<f64> {
        match (self, set) {
            (Replay::Grid { .. }, SemiringSet::Time(i))
            | (Replay::CountingMartingale { .. }, SemiringSet::Time(i)) => {
                Ok(self.driver_at(i.t) - self.driver_at(i.s))
            }
            (
                Replay::JumpLedger {
                    concrete,
                    settings,
                    events,
                },
                SemiringSet::SpaceTime(i, b),
            ) => {
                let count = events
                    .iter()
                    .filter(|(t, r, ray)| *t > i.s && *t <= i.t && b.matches(*r, *ray))
                    .count() as f64;
                let nu_b = region_intensity(concrete, b, settings)?;
                Ok(count - i.length() * nu_b)
            }
            _ => Err(LevyError::OutOfSemiring),
        }
    }
}

/// Deterministic simple function `Σ c_k 1_{R_k}`.
#[derive(Clone, Debug)]
pub struct SimpleFunction {
    pub terms: Vec<(f64, SemiringSet)>,
}

/// One draw of `N(R)`.
pub fn sample_noise(
    backend: &RandomOrthogonalMeasure,
    set: &SemiringSet,
    rng: &mut RandomSource,
) -> Result<f64> {
    if !backend.accepts(set) {
        return Err(LevyError::OutOfSemiring);
    }
    backend.replay(rng)?.noise(set)
}

/// `I_N(f) = Σ c_k N(R_k)` on one path replay; representation-independent
/// because all terms read the same path.
pub fn integrate_simple(
    f: &SimpleFunction,
    backend: &RandomOrthogonalMeasure,
    rng: &mut RandomSource,
) -> Result<f64> {
    let replay = backend.replay(rng)?;
    integrate_simple_on(f, backend, &replay)
}

pub fn integrate_simple_on(
    f: &SimpleFunction,
    backend: &RandomOrthogonalMeasure,
    replay: &Replay,
) -> Result<f64> {
    let mut acc = 0.0;
    for (c, set) in &f.terms {
        if !backend.accepts(set) {
            return Err(LevyError::OutOfSemiring);
        }
        acc += c * replay.noise(set)?;
    }
    Ok(acc)
}

/// `∫ f² dμ` of a simple function, expanded over pairwise intersections.
pub fn simple_l2_norm(f: &SimpleFunction, backend: &RandomOrthogonalMeasure) -> Result<f64> {
    let mut acc = 0.0;
    for (ci, ri) in &f.terms {
        for (cj, rj) in &f.terms {
            if let Some(inter) = ri.intersect(rj) {
                acc += ci * cj * backend.control_measure(&inter)?;
            }
        }
    }
    Ok(acc)
}

/// Grid-approximable integrand for the L² extension.
#[derive(Clone)]
pub enum L2Integrand {
    /// `f(s)` on `(0, horizon]` for time-type backends.
    Time(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// `f(s, y)` for the compensated Poisson backend, supported on the norm
    /// window `lo ≤ |y| < hi`.
    SpaceTime {
        f: Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>,
        lo: f64,
        hi: f64,
    },
}

/// Dyadic simple-function approximation of `f` at `level` (coefficients at
/// interval left endpoints), integrated on one replay, plus the L²(μ) error
/// certificate `∫ (f − f_level)² dμ`. The certificate is also computed one
/// level coarser: if refinement does not shrink it, the integrand is not
/// square-integrable against μ.
pub fn integrate_l2(
    integrand: &L2Integrand,
    backend: &RandomOrthogonalMeasure,
    level: u32,
    rng: &mut RandomSource,
) -> Result<(f64, f64)> {
    let replay = backend.replay(rng)?;
    // A divergent certificate quadrature means ∫(f − f_L)² dμ = ∞.
    let square_integrable = |e: LevyError| match e {
        LevyError::QuadratureDivergence => LevyError::NotSquareIntegrable,
        other => other,
    };
    let (f_simple, cert) = lower_to_simple(integrand, backend, level).map_err(square_integrable)?;
    if level >= 1 {
        let (_, cert_coarse) =
            lower_to_simple(integrand, backend, level - 1).map_err(square_integrable)?;
        if !(cert.is_finite() && cert_coarse.is_finite())
            || cert > cert_coarse * (1.0 + 1e-9) + 1e-12
        {
            return Err(LevyError::NotSquareIntegrable);
        }
    }
    let sample = integrate_simple_on(&f_simple, backend, &replay)?;
    Ok((sample, cert))
}

/// Build the level-`level` dyadic simple approximation and its certificate.
pub fn lower_to_simple(
    integrand: &L2Integrand,
    backend: &RandomOrthogonalMeasure,
    level: u32,
) -> Result<(SimpleFunction, f64)> {
    let qset = QuadSettings::default();
    match (integrand, backend) {
        (L2Integrand::Time(f), RandomOrthogonalMeasure::WhiteNoise { horizon, .. })
        | (L2Integrand::Time(f), RandomOrthogonalMeasure::MartingaleNoise { horizon, .. }) => {
            let cells = 1usize << level;
            let h = horizon / cells as f64;
            let mut terms = Vec::with_capacity(cells);
            for k in 0..cells {
                let a = k as f64 * h;
                let c = f(a);
                if c != 0.0 {
                    terms.push((c, SemiringSet::time(a, a + h)?));
                }
            }
            // Certificate against the control measure density (λ for the
            // compensated Poisson martingale, 1 otherwise).
            let density = match backend {
                RandomOrthogonalMeasure::MartingaleNoise {
                    kind: MartingaleKind::CompensatedPoisson { lambda },
                    ..
                } => *lambda,
                _ => 1.0,
            };
            let mut cert = 0.0;
            for k in 0..cells {
                let a = k as f64 * h;
                let c = f(a);
                cert += quad::integrate(
                    |s| {
                        let d = f(s) - c;
                        d * d
                    },
                    a,
                    a + h,
                    qset.tol,
                    qset.max_panels,
                )? * density;
            }
            Ok((SimpleFunction { terms }, cert))
        }
        (
            L2Integrand::SpaceTime { f, lo, hi },
            RandomOrthogonalMeasure::CompensatedPoisson {
                measure,
                eps,
                horizon,
                settings,
            },
        ) => {
            if *lo < *eps {
                return Err(LevyError::OutOfSemiring);
            }
            let concrete = measure.to_concrete()?;
            let (dirs, dm1): (Vec<(Vec<f64>, f64)>, f64) = match &concrete.kind {
                ConcreteKind::Radial { angular, .. } => (
                    angular.clone(),
                    (angular.first().map(|(z, _)| z.len()).unwrap_or(1) as f64) - 1.0,
                ),
                ConcreteKind::Atoms(atoms) => (
                    atoms
                        .iter()
                        .map(|(p, w)| {
                            let n = math::norm(p);
                            (p.iter().map(|x| x / n).collect(), *w)
                        })
                        .collect(),
                    0.0,
                ),
                ConcreteKind::Zero => (Vec::new(), 0.0),
            };
            let t_cells = 1usize << level;
            let r_cells = 1usize << level;
            let ht = horizon / t_cells as f64;
            let hr = (hi - lo) / r_cells as f64;
            let mut terms = Vec::new();
            let mut cert = 0.0;
            for (j, (z, w)) in dirs.iter().enumerate() {
                for kt in 0..t_cells {
                    let a = kt as f64 * ht;
                    for kr in 0..r_cells {
                        let rl = lo + kr as f64 * hr;
                        let y0: Vec<f64> = z.iter().map(|zi| zi * rl).collect();
                        let c = f(a, &y0);
                        if c != 0.0 {
                            terms.push((
                                c,
                                SemiringSet::space_time(a, a + ht, rl, rl + hr, Some(j))?,
                            ));
                        }
                        if let ConcreteKind::Radial { density, .. } = &concrete.kind {
                            // Radial variation of f within the cell, exactly;
                            // time variation is the caller's responsibility
                            // (built-in integrands are left-constant in t).
                            let err = quad::integrate(
                                |r| {
                                    let y: Vec<f64> = z.iter().map(|zi| zi * r).collect();
                                    let d = f(a, &y) - c;
                                    d * d * density(r) * math::powf(r, dm1)
                                },
                                rl,
                                rl + hr,
                                settings.tol,
                                settings.max_panels,
                            )?;
                            cert += w * err * ht;
                        }
                    }
                }
            }
            Ok((SimpleFunction { terms }, cert))
        }
        _ => Err(LevyError::OutOfSemiring),
    }
}

/// Stopping times usable in predictable simple processes: deterministic
/// times and first exits of the driver from a symmetric band (both resolved
/// at the replay's resolution).
#[derive(Clone, Copy, Debug)]
pub enum StoppingTime {
    Deterministic(f64),
    /// First `t` with `|M_t| ≥ bound`, capped at the horizon.
    FirstExitAbs { bound: f64 },
}

/// One term `φ(path|_{[0,τ_from]}) · 1_{⟦τ_from, τ_to⟧}` of a predictable
/// simple process. The coefficient only ever receives the path truncated at
/// `τ_from`; `declared_reads` documents the latest time the closure needs
/// and is validated against the resolved `τ_from`.
#[derive(Clone)]
pub struct ProcessTerm {
    pub coeff: Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>,
    pub from: StoppingTime,
    pub to: StoppingTime,
    pub declared_reads: Option<f64>,
}

/// Predictable simple process `Σ φ_k 1_{⟦τ_k, τ_{k+1}⟧}`.
#[derive(Clone)]
pub struct SimpleProcess {
    pub terms: Vec<ProcessTerm>,
}

fn resolve_stop(replay: &Replay, horizon: f64, st: &StoppingTime) -> f64 {
    match st {
        StoppingTime::Deterministic(t) => t.min(horizon),
        StoppingTime::FirstExitAbs { bound } => match replay {
            Replay::Grid { grid_dt, values } => {
                for (k, v) in values.iter().enumerate() {
                    if math::abs(*v) >= *bound {
                        return (k as f64) * grid_dt;
                    }
                }
                horizon
            }
            Replay::CountingMartingale { lambda, jump_times } => {
                let mut prev_t = 0.0;
                let mut count = 0.0;
                for jt in jump_times {
                    // Between jumps M_t = count − λt drifts down linearly.
                    let cross = (count + bound) / lambda;
                    if cross > prev_t && cross <= *jt {
                        return cross.min(horizon);
                    }
                    count += 1.0;
                    if math::abs(count - lambda * jt) >= *bound {
                        return (*jt).min(horizon);
                    }
                    prev_t = *jt;
                }
                let cross = (count + bound) / lambda;
                if cross > prev_t && cross <= horizon {
                    return cross;
                }
                horizon
            }
            Replay::JumpLedger { .. } => horizon,
        },
    }
}

/// Itô integral of a predictable simple process against a martingale-noise
/// backend: `Σ φ_k (M_{τ_{k+1}} − M_{τ_k})` on one path replay.
pub fn integrate_predictable(
    process: &SimpleProcess,
    backend: &RandomOrthogonalMeasure,
    rng: &mut RandomSource,
) -> Result<f64> {
    let horizon = match backend {
        RandomOrthogonalMeasure::MartingaleNoise { horizon, .. } => *horizon,
        RandomOrthogonalMeasure::WhiteNoise { horizon, .. } => *horizon,
        _ => return Err(LevyError::OutOfSemiring),
    };
    let replay = backend.replay(rng)?;
    let mut acc = 0.0;
    for term in &process.terms {
        let t_from = resolve_stop(&replay, horizon, &term.from);
        let t_to = resolve_stop(&replay, horizon, &term.to).max(t_from);
        if let Some(reads) = term.declared_reads {
            if reads > t_from + 1e-12 {
                return Err(LevyError::NonAdaptedCoefficient);
            }
        }
        // Truncated view of the path for the coefficient.
        let (times, values): (Vec<f64>, Vec<f64>) = match &replay {
            Replay::Grid { grid_dt, values } => {
                let k_max = (math::floor(t_from / grid_dt + 0.5) as usize).min(values.len() - 1);
                (
                    (0..=k_max).map(|k| k as f64 * grid_dt).collect(),
                    values[0..=k_max].to_vec(),
                )
            }
            Replay::CountingMartingale { lambda, jump_times } => {
                let mut ts = vec![0.0];
                let mut vs = vec![0.0];
                for (i, jt) in jump_times.iter().take_while(|s| **s <= t_from).enumerate() {
                    ts.push(*jt);
                    vs.push((i + 1) as f64 - lambda * jt);
                }
                let n_jumps = jump_times.iter().take_while(|s| **s <= t_from).count();
                if *ts.last().unwrap() < t_from {
                    ts.push(t_from);
                    vs.push(n_jumps as f64 - lambda * t_from);
                }
                (ts, vs)
            }
            Replay::JumpLedger { .. } => (vec![0.0], vec![0.0]),
        };
        let phi = (term.coeff)(&times, &values);
        acc += phi * (replay.driver_at(t_to) - replay.driver_at(t_from));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;

    fn white() -> RandomOrthogonalMeasure {
        RandomOrthogonalMeasure::white_noise(2.0)
    }

    #[test]
    fn white_noise_variance_is_length() {
        let b = white();
        let set = SemiringSet::time(0.0, 1.0).unwrap();
        let n = 4000;
        let samples: Vec<f64> = (0..n)
            .map(|k| {
                let mut rng = RandomSource::new(4, k as u64);
                sample_noise(&b, &set, &mut rng).unwrap()
            })
            .collect();
        let s = stats::summarize(&samples);
        let se_var = s.var * math::sqrt(2.0 / (n as f64 - 1.0));
        assert!(math::abs(s.var - 1.0) < 3.0 * se_var, "var={}", s.var);
        assert!(math::abs(s.mean) < 3.0 * s.stderr);
    }

    #[test]
    fn orthogonality_across_overlap() {
        // E[N(R)N(S)] = μ(R ∩ S) for overlapping time intervals.
        let b = white();
        let r = SemiringSet::time(0.0, 1.0).unwrap();
        let s = SemiringSet::time(0.5, 1.5).unwrap();
        let n = 6000;
        let mut prods = Vec::with_capacity(n);
        for k in 0..n {
            let mut rng = RandomSource::new(5, k as u64);
            let replay = b.replay(&mut rng).unwrap();
            prods.push(replay.noise(&r).unwrap() * replay.noise(&s).unwrap());
        }
        let sm = stats::summarize(&prods);
        let mu = b.control_measure(&r.intersect(&s).unwrap()).unwrap();
        assert!((mu - 0.5).abs() < 1e-9);
        assert!(stats::within_3se(sm.mean, mu, sm.stderr), "mean={}", sm.mean);
    }

    #[test]
    fn degenerate_interval_vanishes() {
        let b = white();
        // Width 1e−9 snaps to zero cells: the sample is exactly 0.
        let set = SemiringSet::time(0.5, 0.5 + 1e-9).unwrap();
        let mut rng = RandomSource::new(6, 0);
        let v = sample_noise(&b, &set, &mut rng).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(b.control_measure(&set).unwrap(), 0.0);
    }

    #[test]
    fn simple_integral_representation_independent() {
        // 2·1_{(0,1]} − 1_{(0.5,1.5]} versus its disjoint refinement.
        let f1 = SimpleFunction {
            terms: vec![
                (2.0, SemiringSet::time(0.0, 1.0).unwrap()),
                (-1.0, SemiringSet::time(0.5, 1.5).unwrap()),
            ],
        };
        let f2 = SimpleFunction {
            terms: vec![
                (2.0, SemiringSet::time(0.0, 0.5).unwrap()),
                (1.0, SemiringSet::time(0.5, 1.0).unwrap()),
                (-1.0, SemiringSet::time(1.0, 1.5).unwrap()),
            ],
        };
        let b = white();
        for k in 0..50 {
            let mut rng = RandomSource::new(7, k);
            let replay = b.replay(&mut rng).unwrap();
            let v1 = integrate_simple_on(&f1, &b, &replay).unwrap();
            let v2 = integrate_simple_on(&f2, &b, &replay).unwrap();
            assert!((v1 - v2).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_function_integrates_to_zero() {
        let f = SimpleFunction { terms: vec![] };
        let mut rng = RandomSource::new(8, 0);
        assert_eq!(integrate_simple(&f, &white(), &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn compensated_poisson_noise_moments() {
        // λ = 2, μ = δ₁: Ñ((0,1] × {1}) has mean 0 and variance 2.
        let b = RandomOrthogonalMeasure::compensated_poisson(
            LevyMeasureSpec::FiniteAtomic(vec![(vec![1.0], 2.0)]),
            0.5,
            1.0,
        );
        let set = SemiringSet::space_time(0.0, 1.0, 0.9, 1.1, None).unwrap();
        assert!((b.control_measure(&set).unwrap() - 2.0).abs() < 1e-12);
        let n = 6000;
        let samples: Vec<f64> = (0..n)
            .map(|k| {
                let mut rng = RandomSource::new(9, k as u64);
                sample_noise(&b, &set, &mut rng).unwrap()
            })
            .collect();
        let s = stats::summarize(&samples);
        assert!(stats::within_3se(s.mean, 0.0, s.stderr), "mean={}", s.mean);
        let se_var = s.var * math::sqrt(2.0 / (n as f64 - 1.0)) * 2.0;
        assert!(math::abs(s.var - 2.0) < 3.0 * se_var, "var={}", s.var);
    }

    #[test]
    fn l2_time_integrand_reduces_to_simple() {
        // A function that is already simple at level 2: certificate 0 and
        // the sample equals integrate_simple.
        let f = L2Integrand::Time(Arc::new(|s: f64| if s < 0.5 { 2.0 } else { 0.0 }));
        let b = white();
        let (sample, cert) = {
            let mut rng = RandomSource::new(10, 3);
            integrate_l2(&f, &b, 2, &mut rng).unwrap()
        };
        assert!(cert < 1e-12);
        let simple = SimpleFunction {
            terms: vec![(2.0, SemiringSet::time(0.0, 0.5).unwrap())],
        };
        let mut rng = RandomSource::new(10, 3);
        let direct = integrate_simple(&simple, &b, &mut rng).unwrap();
        assert!((sample - direct).abs() < 1e-12);
    }

    #[test]
    fn predictable_deterministic_matches_simple() {
        let b = RandomOrthogonalMeasure::martingale(MartingaleKind::Brownian, 2.0);
        let proc = SimpleProcess {
            terms: vec![ProcessTerm {
                coeff: Arc::new(|_t: &[f64], _v: &[f64]| 3.0),
                from: StoppingTime::Deterministic(0.25),
                to: StoppingTime::Deterministic(1.25),
                declared_reads: Some(0.25),
            }],
        };
        let simple = SimpleFunction {
            terms: vec![(3.0, SemiringSet::time(0.25, 1.25).unwrap())],
        };
        for k in 0..20 {
            let mut r1 = RandomSource::new(11, k);
            let mut r2 = RandomSource::new(11, k);
            let a = integrate_predictable(&proc, &b, &mut r1).unwrap();
            let c = integrate_simple(&simple, &b, &mut r2).unwrap();
            assert!((a - c).abs() < 1e-12);
        }
    }

    #[test]
    fn non_adapted_coefficient_rejected() {
        let b = RandomOrthogonalMeasure::martingale(MartingaleKind::Brownian, 2.0);
        let proc = SimpleProcess {
            terms: vec![ProcessTerm {
                coeff: Arc::new(|_t: &[f64], _v: &[f64]| 1.0),
                from: StoppingTime::Deterministic(0.25),
                to: StoppingTime::Deterministic(1.0),
                declared_reads: Some(0.5),
            }],
        };
        let mut rng = RandomSource::new(12, 0);
        assert_eq!(
            integrate_predictable(&proc, &b, &mut rng),
            Err(LevyError::NonAdaptedCoefficient)
        );
    }

    #[test]
    fn stopped_indicator_lands_on_band_edge() {
        // ∫ 1_{⟦0,τ⟧} dW = W_τ with τ the first exit of |W| from [−1, 1]:
        // the integral equals the replay value at τ exactly and has mean 0.
        let b = RandomOrthogonalMeasure::martingale(MartingaleKind::Brownian, 8.0);
        let proc = SimpleProcess {
            terms: vec![ProcessTerm {
                coeff: Arc::new(|_t: &[f64], _v: &[f64]| 1.0),
                from: StoppingTime::Deterministic(0.0),
                to: StoppingTime::FirstExitAbs { bound: 1.0 },
                declared_reads: None,
            }],
        };
        let n = 3000;
        let mut samples = Vec::with_capacity(n);
        for k in 0..n {
            let mut rng = RandomSource::new(13, k as u64);
            let v = integrate_predictable(&proc, &b, &mut rng).unwrap();
            samples.push(v);
        }
        let s = stats::summarize(&samples);
        assert!(stats::within_3se(s.mean, 0.0, s.stderr), "mean={}", s.mean);
        // Nearly every sample sits just past the band edge.
        let at_edge = samples.iter().filter(|v| math::abs(**v) >= 1.0).count();
        assert!(at_edge as f64 > 0.95 * n as f64);
    }
}
