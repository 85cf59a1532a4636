//! State-dependent symbols `q(x, ξ)`, Lévy-driven SDE simulation, the
//! probabilistic symbol estimator, Blumenthal–Getoor–Pruitt indices, and the
//! maximal/exit-time estimates that tie the symbol to path behaviour.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{LevyError, Result};
use crate::levy::{LevyTriplet, QuadSettings};
use crate::math;
use crate::path::CadlagPath;
use crate::rng::RandomSource;
use crate::sampler::LevyItoSampler;
use crate::stats;

/// `∫ (1+ξ²)|û(ξ)| dξ` for the polynomial bump `u(y) = (1−y²)⁸` on `[−1,1]`
/// (one dimension). This is the constant of the maximal inequality
/// `P^x(sup_{s≤τ} |X_s−x| > r) ≤ c·E^xτ·sup_{|y−x|≤r} sup_{|ξ|≤1/r} |q(y,ξ)|`;
/// `maximal_bound_constant_derivation` in the tests recomputes it by nested
/// quadrature.
pub const MAXIMAL_BOUND_C_D1: f64 = 17.275020236443;

/// `k* = arccos √(2/3) ≈ 0.615`: the frequency cap of the exit-time upper
/// bound (`cos(ξ·(y−x)) ≥ √(2/3)` inside the ball when `|ξ| ≤ k*/r`).
pub fn exit_frequency_cap() -> f64 {
    math::acos(math::sqrt(2.0 / 3.0))
}

/// A map `x ↦ (q(x,0), l(x), Q(x), ν(x,dy))`, evaluated either through the
/// per-x triplet (quadrature) or through a closed-form backend.
#[derive(Clone)]
pub struct StateSymbol {
    pub dim: usize,
    eval: Arc<dyn Fn(&[f64], &[f64]) -> Result<Complex64> + Send + Sync>,
    q0: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    triplet_at: Option<Arc<dyn Fn(&[f64]) -> Result<LevyTriplet> + Send + Sync>>,
    /// Stable-like exponent `α(x)` when the symbol is `|ξ|^{α(x)}`-shaped.
    pub stable_like_alpha: Option<Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>>,
    pub bounded_coefficients: bool,
}

impl StateSymbol {
    /// Symbol of a fixed Lévy triplet (no x-dependence, `q(x,0) = 0`).
    pub fn levy(triplet: LevyTriplet, settings: QuadSettings) -> Self {
        let dim = triplet.dim();
        let t_eval = triplet.clone();
        StateSymbol {
            dim,
            eval: Arc::new(move |_x, xi| t_eval.exponent(xi, &settings)),
            q0: Arc::new(|_| 0.0),
            triplet_at: Some(Arc::new(move |_| Ok(triplet.clone()))),
            stable_like_alpha: None,
            bounded_coefficients: true,
        }
    }

    /// Triplet-map symbol: `q(x,ξ) = q₀(x) + ψ_{triplet(x)}(ξ)`.
    pub fn from_triplet_map<T, Q>(dim: usize, triplet_at: T, q0: Q, settings: QuadSettings) -> Self
    where
        T: Fn(&[f64]) -> Result<LevyTriplet> + Send + Sync + 'static,
        Q: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let triplets: Arc<dyn Fn(&[f64]) -> Result<LevyTriplet> + Send + Sync> =
            Arc::new(triplet_at);
        let t2 = triplets.clone();
        let q0c: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> = Arc::new(q0);
        let q0e = q0c.clone();
        StateSymbol {
            dim,
            eval: Arc::new(move |x, xi| {
                let t = t2(x)?;
                Ok(t.exponent(xi, &settings)? + q0e(x))
            }),
            q0: q0c,
            triplet_at: Some(triplets),
            stable_like_alpha: None,
            bounded_coefficients: false,
        }
    }

    /// Stable-like closed form `q(x,ξ) = scale(x)·|ξ|^{α(x)}`, `q(x,0) = 0`.
    pub fn stable_like<A, S>(dim: usize, alpha: A, scale: S) -> Self
    where
        A: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        S: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let alpha: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> = Arc::new(alpha);
        let a2 = alpha.clone();
        StateSymbol {
            dim,
            eval: Arc::new(move |x, xi| {
                let n = math::norm(xi);
                if n == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                Ok(Complex64::new(scale(x) * math::powf(n, a2(x)), 0.0))
            }),
            q0: Arc::new(|_| 0.0),
            triplet_at: None,
            stable_like_alpha: Some(alpha),
            bounded_coefficients: true,
        }
    }

    /// Arbitrary closed-form symbol (hook for drift-dominated and
    /// sector-violating examples).
    pub fn from_fn<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
    {
        StateSymbol {
            dim,
            eval: Arc::new(move |x, xi| Ok(f(x, xi))),
            q0: Arc::new(|_| 0.0),
            triplet_at: None,
            stable_like_alpha: None,
            bounded_coefficients: false,
        }
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Result<Complex64> {
        if x.len() != self.dim || xi.len() != self.dim {
            return Err(LevyError::DimensionMismatch {
                expected: self.dim,
                got: x.len().max(xi.len()),
            });
        }
        (self.eval)(x, xi)
    }

    pub fn killing_rate(&self, x: &[f64]) -> f64 {
        (self.q0)(x)
    }

    pub fn triplet_at(&self, x: &[f64]) -> Option<Result<LevyTriplet>> {
        self.triplet_at.as_ref().map(|f| f(x))
    }

    /// Bounded-coefficients certificate over a probe grid:
    /// `sup_x (q(x,0) + |l(x)| + ‖Q(x)‖ + ∫ min(1,|y|²) ν(x,dy))`.
    pub fn bounded_coefficients_certificate(
        &self,
        probes: &[Vec<f64>],
        settings: &QuadSettings,
    ) -> Result<f64> {
        let trip = self
            .triplet_at
            .as_ref()
            .ok_or(LevyError::Unsupported("symbol has no triplet backend"))?;
        let mut sup = 0.0f64;
        for x in probes {
            let t = trip(x)?;
            let concrete = t.measure.to_concrete()?;
            let small = concrete.second_moment_in(0.0, 1.0, settings)?;
            let large = concrete.mass_in(1.0, f64::INFINITY, settings)?;
            let v = self.killing_rate(x)
                + math::norm(&t.drift)
                + t.diffusion.max_abs()
                + small
                + large;
            if !v.is_finite() {
                return Err(LevyError::QuadratureDivergence);
            }
            sup = sup.max(v);
        }
        Ok(sup)
    }
}

/// `q(x, ξ)` — the one-call evaluator.
pub fn eval_symbol(q: &StateSymbol, x: &[f64], xi: &[f64]) -> Result<Complex64> {
    q.eval(x, xi)
}

/// Coefficient field and driver of `dX_t = Φ(X_{t−}) dL_t`.
#[derive(Clone)]
pub struct SdeSpec {
    pub dim_state: usize,
    pub dim_driver: usize,
    /// `x ↦ Φ(x)`, row-major `dim_state × dim_driver`.
    pub phi: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    /// Declared global Lipschitz constant of Φ.
    pub lipschitz: f64,
    pub driver: LevyTriplet,
    pub x0: Vec<f64>,
}

impl SdeSpec {
    /// Validate the declared Lipschitz constant with finite-difference
    /// slopes over probe pairs: `‖Φ(x) − Φ(y)‖_F / |x − y| ≤ L + 1e−6`.
    pub fn validate_lipschitz(&self, probes: &[Vec<f64>]) -> Result<()> {
        for (i, x) in probes.iter().enumerate() {
            for y in probes.iter().skip(i + 1) {
                let dx: f64 =
                    math::norm(&x.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<f64>>());
                if dx < 1e-12 {
                    continue;
                }
                let px = (self.phi)(x);
                let py = (self.phi)(y);
                let dphi =
                    math::norm(&px.iter().zip(&py).map(|(a, b)| a - b).collect::<Vec<f64>>());
                if dphi / dx > self.lipschitz + 1e-6 {
                    return Err(LevyError::Unsupported(
                        "coefficient field violates its declared Lipschitz constant",
                    ));
                }
            }
        }
        Ok(())
    }

    fn apply_phi(&self, x: &[f64], dl: &[f64], out: &mut [f64]) {
        let m = (self.phi)(x);
        for i in 0..self.dim_state {
            let row = &m[i * self.dim_driver..(i + 1) * self.dim_driver];
            out[i] = math::dot(row, dl);
        }
    }
}

/// Blow-up guard for SDE states.
const BLOWUP_GUARD: f64 = 1e12;

/// Jump-adapted Euler scheme: grid cells of width `grid_dt`, driver jumps
/// with `|ΔL| ≥ eps` applied at their exact times with the pre-jump state
/// in Φ, continuous driver part applied per sub-segment.
pub fn sde_euler(
    spec: &SdeSpec,
    eps: f64,
    grid_dt: f64,
    t_max: f64,
    rng: &mut RandomSource,
    settings: &QuadSettings,
) -> Result<CadlagPath> {
    let sampler = LevyItoSampler::new(&spec.driver, eps, settings)?;
    sde_euler_with(spec, &sampler, grid_dt, t_max, rng)
}

/// Euler scheme reusing a prebuilt driver sampler.
pub fn sde_euler_with(
    spec: &SdeSpec,
    driver: &LevyItoSampler,
    grid_dt: f64,
    t_max: f64,
    rng: &mut RandomSource,
) -> Result<CadlagPath> {
    if grid_dt <= 0.0 || t_max <= 0.0 {
        return Err(LevyError::InvalidRate(grid_dt.min(t_max)));
    }
    let d = spec.dim_state;
    let n_cells = (math::ceil(t_max / grid_dt - 1e-9) as usize).max(1);
    let jumps = driver.sample_jumps(t_max, rng);
    let mut x = spec.x0.clone();
    let mut times = Vec::with_capacity(n_cells + 1);
    let mut values = Vec::with_capacity((n_cells + 1) * d);
    times.push(0.0);
    values.extend_from_slice(&x);
    let mut ledger: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut cursor = 0usize;
    let mut dl = vec![0.0; spec.dim_driver];
    let mut dx = vec![0.0; d];
    for k in 1..=n_cells {
        let t_cell_end = if k == n_cells { t_max } else { k as f64 * grid_dt };
        let mut t_now = times[k - 1];
        loop {
            let next_jump = jumps
                .get(cursor)
                .map(|(t, _)| *t)
                .filter(|t| *t <= t_cell_end);
            let seg_end = next_jump.unwrap_or(t_cell_end);
            let dt = seg_end - t_now;
            if dt > 0.0 {
                // Continuous driver increment over the sub-segment.
                for (v, l) in dl.iter_mut().zip(driver.drift_rate()) {
                    *v = l * dt;
                }
                driver.add_gaussian_increment(dt, rng, &mut dl);
                spec.apply_phi(&x, &dl, &mut dx);
                for (xi_, di) in x.iter_mut().zip(&dx) {
                    *xi_ += di;
                }
            }
            t_now = seg_end;
            if let Some(tj) = next_jump {
                let (_, delta) = &jumps[cursor];
                spec.apply_phi(&x, delta, &mut dx);
                for (xi_, di) in x.iter_mut().zip(&dx) {
                    *xi_ += di;
                }
                if math::norm(&dx) > 0.0 {
                    ledger.push((tj, dx.clone()));
                }
                cursor += 1;
            } else {
                break;
            }
        }
        if math::norm(&x) > BLOWUP_GUARD {
            return Err(LevyError::Blowup { time: t_cell_end });
        }
        times.push(t_cell_end);
        values.extend_from_slice(&x);
    }
    CadlagPath::new(d, t_max, times, values, ledger)
}

/// Generalized symbol of the SDE solution: `q(x, ξ) = ψ(Φᵀ(x) ξ)`.
pub fn sde_symbol(
    spec: &SdeSpec,
    x: &[f64],
    xi: &[f64],
    settings: &QuadSettings,
) -> Result<Complex64> {
    let m = (spec.phi)(x);
    let mut phit_xi = vec![0.0; spec.dim_driver];
    for (j, out) in phit_xi.iter_mut().enumerate() {
        let mut s = 0.0;
        for i in 0..spec.dim_state {
            s += m[i * spec.dim_driver + j] * xi[i];
        }
        *out = s;
    }
    spec.driver.exponent(&phit_xi, settings)
}

/// Processes the probabilistic estimators can drive.
#[derive(Clone)]
pub enum SymbolProcess {
    Levy {
        triplet: LevyTriplet,
        eps: f64,
        grid_dt: f64,
    },
    Sde {
        spec: SdeSpec,
        eps: f64,
        grid_dt: f64,
    },
}

impl SymbolProcess {
    fn dim(&self) -> usize {
        match self {
            SymbolProcess::Levy { triplet, .. } => triplet.dim(),
            SymbolProcess::Sde { spec, .. } => spec.dim_state,
        }
    }

    fn build_sampler(&self, settings: &QuadSettings) -> Result<LevyItoSampler> {
        match self {
            SymbolProcess::Levy { triplet, eps, .. } => {
                LevyItoSampler::new(triplet, *eps, settings)
            }
            SymbolProcess::Sde { spec, eps, .. } => {
                LevyItoSampler::new(&spec.driver, *eps, settings)
            }
        }
    }

    fn grid_dt(&self) -> f64 {
        match self {
            SymbolProcess::Levy { grid_dt, .. } => *grid_dt,
            SymbolProcess::Sde { grid_dt, .. } => *grid_dt,
        }
    }

    /// Simulate from `x` to the largest requested time at grid resolution,
    /// recording `X_{t ∧ τ_r}` per requested time plus exit information
    /// (jump overshoot included; exit detected at grid and jump times).
    fn stopped_values(
        &self,
        sampler: &LevyItoSampler,
        x: &[f64],
        r: f64,
        eval_times: &[f64],
        rng: &mut RandomSource,
    ) -> Result<StoppedPath> {
        let t_max = eval_times.iter().fold(0.0f64, |m, t| m.max(*t));
        let grid_dt = self.grid_dt();
        let d = self.dim();
        let jumps = sampler.sample_jumps(t_max, rng);
        let mut state: Vec<f64> = x.to_vec();
        let mut cursor = 0usize;
        let mut dl = vec![0.0; sampler.dim()];
        let mut dx = vec![0.0; d];
        let mut exited_at: Option<(f64, Vec<f64>)> = None;
        let n_cells = (math::ceil(t_max / grid_dt - 1e-9) as usize).max(1);
        let mut recorded: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n_cells + 1);
        recorded.push((0.0, state.clone()));
        let mut t_now = 0.0;
        // Bridge crossing tests remove the √dt exit-detection bias of the
        // continuous component (1-d Lévy case).
        let bridge_rate = match self {
            SymbolProcess::Levy { .. } if d == 1 => sampler.gaussian_rate_component(0),
            _ => 0.0,
        };
        'outer: for k in 1..=n_cells {
            let t_cell_end = if k == n_cells { t_max } else { k as f64 * grid_dt };
            loop {
                let next_jump = jumps
                    .get(cursor)
                    .map(|(t, _)| *t)
                    .filter(|t| *t <= t_cell_end);
                let seg_end = next_jump.unwrap_or(t_cell_end);
                let dt = seg_end - t_now;
                if dt > 0.0 {
                    let pre0 = state[0];
                    for (v, l) in dl.iter_mut().zip(sampler.drift_rate()) {
                        *v = l * dt;
                    }
                    sampler.add_gaussian_increment(dt, rng, &mut dl);
                    match self {
                        SymbolProcess::Levy { .. } => {
                            for (s, v) in state.iter_mut().zip(&dl) {
                                *s += v;
                            }
                        }
                        SymbolProcess::Sde { spec, .. } => {
                            spec.apply_phi(&state, &dl, &mut dx);
                            for (s, v) in state.iter_mut().zip(&dx) {
                                *s += v;
                            }
                        }
                    }
                    if bridge_rate > 0.0 {
                        if let Some(bar) = bridge_exit_1d(
                            pre0,
                            state[0],
                            x[0] - r,
                            x[0] + r,
                            bridge_rate * dt,
                            rng,
                        ) {
                            state[0] = bar;
                            exited_at = Some((t_now + 0.5 * dt, state.clone()));
                            break 'outer;
                        }
                    }
                }
                t_now = seg_end;
                if let Some(tj) = next_jump {
                    let (_, delta) = &jumps[cursor];
                    match self {
                        SymbolProcess::Levy { .. } => {
                            for (s, v) in state.iter_mut().zip(delta) {
                                *s += v;
                            }
                        }
                        SymbolProcess::Sde { spec, .. } => {
                            spec.apply_phi(&state, delta, &mut dx);
                            for (s, v) in state.iter_mut().zip(&dx) {
                                *s += v;
                            }
                        }
                    }
                    cursor += 1;
                    if distance(&state, x) >= r {
                        exited_at = Some((tj, state.clone()));
                        break 'outer;
                    }
                } else {
                    break;
                }
            }
            recorded.push((t_cell_end, state.clone()));
            if distance(&state, x) >= r {
                exited_at = Some((t_cell_end, state.clone()));
                break 'outer;
            }
            if math::norm(&state) > BLOWUP_GUARD {
                return Err(LevyError::Blowup { time: t_cell_end });
            }
        }
        let mut out = Vec::with_capacity(eval_times.len());
        for &t in eval_times {
            match &exited_at {
                Some((tau, at_exit)) if *tau <= t => out.push((at_exit.clone(), true)),
                _ => {
                    let mut val = recorded[0].1.clone();
                    for (rt, rv) in &recorded {
                        if *rt <= t + 1e-12 {
                            val = rv.clone();
                        } else {
                            break;
                        }
                    }
                    out.push((val, false));
                }
            }
        }
        Ok(StoppedPath {
            values: out,
            exit_time: exited_at.map(|(t, _)| t),
        })
    }
}

struct StoppedPath {
    /// `(X_{t ∧ τ_r}, exited before t)` per requested time.
    values: Vec<(Vec<f64>, bool)>,
    exit_time: Option<f64>,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    math::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Brownian bridge crossing test for a continuous segment with endpoints
/// inside the band `(lo, hi)`: given the endpoints, the bridge law does not
/// depend on the drift, and the one-sided crossing probability is
/// `exp(−2(b−pre)(b−post)/var)`. Returns the barrier hit, if any. Endpoints
/// beyond a barrier cross with certainty and are projected onto it (the
/// continuous part attains the boundary exactly).
pub(crate) fn bridge_exit_1d(
    pre: f64,
    post: f64,
    lo: f64,
    hi: f64,
    var: f64,
    rng: &mut RandomSource,
) -> Option<f64> {
    if post >= hi {
        return Some(hi);
    }
    if post <= lo {
        return Some(lo);
    }
    if var <= 0.0 {
        return None;
    }
    let p_hi = math::exp(-2.0 * (hi - pre) * (hi - post) / var);
    let p_lo = math::exp(-2.0 * (pre - lo) * (post - lo) / var);
    if p_hi + p_lo < 1e-16 {
        return None;
    }
    let u = rng.uniform();
    if u < p_hi {
        Some(hi)
    } else if u < p_hi + p_lo {
        Some(lo)
    } else {
        None
    }
}

/// Result of the small-time symbol estimator.
#[derive(Clone, Debug)]
pub struct SymbolEstimate {
    pub q_hat: Complex64,
    /// Per probe time: `(t, q̂_t, standard error, exit fraction)`.
    pub per_time: Vec<(f64, Complex64, f64, f64)>,
    /// Slope of the linear extrapolation in `t`.
    pub slope: Complex64,
}

/// Probabilistic symbol: Monte Carlo of
/// `q̂_t = −(E^x e^{iξ·(X_{t∧τ_r} − x)} − 1)/t` over a decreasing time grid,
/// extrapolated linearly to `t = 0`. Errors with `ExitDominates` when more
/// than half the paths leave `B_r(x)` before the smallest probe time.
pub fn estimate_symbol(
    process: &SymbolProcess,
    x: &[f64],
    xi: &[f64],
    t_grid: &[f64],
    r: f64,
    n: usize,
    seed: u64,
    stream_lo: u64,
    settings: &QuadSettings,
) -> Result<SymbolEstimate> {
    if r <= 0.0 || t_grid.is_empty() {
        return Err(LevyError::Unsupported("need r > 0 and a nonempty time grid"));
    }
    let sampler = process.build_sampler(settings)?;
    let t_min = t_grid.iter().fold(f64::INFINITY, |m, t| m.min(*t));
    let mut acc = vec![Complex64::new(0.0, 0.0); t_grid.len()];
    let mut exited = vec![0usize; t_grid.len()];
    let mut exit_before_tmin = 0usize;
    for k in 0..n {
        let mut rng = RandomSource::new(seed, stream_lo + k as u64);
        let stopped = process.stopped_values(&sampler, x, r, t_grid, &mut rng)?;
        for (i, (value, was_stopped)) in stopped.values.iter().enumerate() {
            let phase: f64 = value
                .iter()
                .zip(x)
                .map(|(v, xs)| v - xs)
                .zip(xi)
                .map(|(d, f)| d * f)
                .sum();
            acc[i] += Complex64::new(math::cos(phase), math::sin(phase));
            if *was_stopped {
                exited[i] += 1;
            }
        }
        if stopped.exit_time.map(|t| t < t_min).unwrap_or(false) {
            exit_before_tmin += 1;
        }
    }
    let exit_frac = exit_before_tmin as f64 / n as f64;
    if exit_frac > 0.5 {
        return Err(LevyError::ExitDominates {
            exit_fraction: exit_frac,
        });
    }
    let mut per_time = Vec::with_capacity(t_grid.len());
    let mut ts = Vec::new();
    let mut re = Vec::new();
    let mut im = Vec::new();
    for (i, &t) in t_grid.iter().enumerate() {
        let phi = acc[i] / n as f64;
        let q_t = -(phi - 1.0) / t;
        let se = math::sqrt((1.0 - phi.norm_sqr()).max(0.0) / n as f64) / t;
        per_time.push((t, q_t, se, exited[i] as f64 / n as f64));
        ts.push(t);
        re.push(q_t.re);
        im.push(q_t.im);
    }
    let (a_re, b_re, _) = stats::linear_fit(&ts, &re);
    let (a_im, b_im, _) = stats::linear_fit(&ts, &im);
    Ok(SymbolEstimate {
        q_hat: Complex64::new(a_re, a_im),
        per_time,
        slope: Complex64::new(b_re, b_im),
    })
}

/// Bracketed Blumenthal–Getoor / Pruitt indices at infinity.
#[derive(Clone, Debug)]
pub struct IndexBrackets {
    pub beta: (f64, f64),
    pub delta: (f64, f64),
    pub beta_hat: f64,
    pub delta_hat: f64,
}

/// Index estimation by log-log slope bracketing of the two symbol
/// functionals
///
/// ```text
/// S(R) = sup_{|η| ≤ R} sup_{|y−x| ≤ 1/R} |q(y,η)|        (β side)
/// I(R) = inf_{|η| = R} inf_{|y−x| ≤ 1/R} |q(y,η)|        (δ side)
/// ```
///
/// `β̂` is the least-squares slope of `log S` against `log R` over the top
/// half of a log-spaced grid, `δ̂` that of `log I`; the brackets collect
/// sliding-window slopes. The δ-side infimum runs over the sphere `|η| = R`
/// rather than the full ball: over the ball it is identically zero for any
/// symbol with `q(·,0) = 0`, which would make the index vacuous.
pub fn indices_at_infinity(
    q: &StateSymbol,
    x: &[f64],
    xi_max: f64,
    n_grid: usize,
) -> Result<IndexBrackets> {
    let d = q.dim;
    let n_grid = n_grid.max(8);
    let r_lo = 1e2;
    let mut rs = Vec::with_capacity(n_grid);
    for i in 0..n_grid {
        let t = i as f64 / (n_grid - 1) as f64;
        rs.push(r_lo * math::powf(xi_max / r_lo, t));
    }
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for k in 0..d {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        dirs.push(e.clone());
        let mut m = vec![0.0; d];
        m[k] = -1.0;
        dirs.push(m);
    }
    if d > 1 {
        dirs.push(vec![1.0 / math::sqrt(d as f64); d]);
    }
    let y_offsets = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut log_s = Vec::with_capacity(n_grid);
    let mut log_i = Vec::with_capacity(n_grid);
    let mut log_r = Vec::with_capacity(n_grid);
    for &big_r in &rs {
        let mut sup = 0.0f64;
        let mut inf = f64::INFINITY;
        for dir in &dirs {
            for &off in &y_offsets {
                let y: Vec<f64> = x.iter().map(|xi_| xi_ + off / big_r).collect();
                for j in 0..16 {
                    let radius = big_r * math::powf(2.0, -(j as f64));
                    let eta: Vec<f64> = dir.iter().map(|e| e * radius).collect();
                    let v = q.eval(&y, &eta)?.norm();
                    sup = sup.max(v);
                    if j == 0 {
                        inf = inf.min(v);
                    }
                }
            }
        }
        if sup <= 0.0 || inf <= 0.0 || !sup.is_finite() || !inf.is_finite() {
            return Err(LevyError::SlopeUnresolved { residual: f64::NAN });
        }
        log_r.push(math::ln(big_r));
        log_s.push(math::ln(sup));
        log_i.push(math::ln(inf));
    }
    let top = n_grid / 2;
    let fit = |ys: &[f64]| -> Result<(f64, (f64, f64))> {
        let xs = &log_r[top..];
        let ys_top = &ys[top..];
        let (_, slope, resid) = stats::linear_fit(xs, ys_top);
        let span = xs[xs.len() - 1] - xs[0];
        if resid / span.max(1.0) > 0.05 {
            return Err(LevyError::SlopeUnresolved {
                residual: resid / span.max(1.0),
            });
        }
        let w = 6.min(xs.len());
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for start in 0..=(xs.len() - w) {
            let (_, s, _) = stats::linear_fit(&xs[start..start + w], &ys_top[start..start + w]);
            lo = lo.min(s);
            hi = hi.max(s);
        }
        Ok((slope, (lo, hi)))
    };
    let (beta_hat, beta) = fit(&log_s)?;
    let (delta_hat, delta) = fit(&log_i)?;
    // I(R) ≤ S(R) pointwise forces δ̂ ≤ β̂ up to fit noise.
    debug_assert!(
        delta_hat <= beta_hat + 0.05,
        "index ordering violated: delta {delta_hat} > beta {beta_hat}"
    );
    Ok(IndexBrackets {
        beta,
        delta,
        beta_hat,
        delta_hat,
    })
}

/// Right-hand side of the maximal inequality
/// `c · E^xτ · sup_{|y−x| ≤ r} sup_{|ξ| ≤ 1/r} |q(y,ξ)|` with the embedded
/// bump constant (d = 1).
pub fn maximal_bound(q: &StateSymbol, x: &[f64], r: f64, e_tau: f64) -> Result<f64> {
    if q.dim != 1 {
        return Err(LevyError::Unsupported(
            "maximal bound constant is derived for d = 1",
        ));
    }
    let s = double_sup(q, x, r, 1.0 / r)?;
    Ok(MAXIMAL_BOUND_C_D1 * e_tau * s)
}

/// `sup_{|y−x| ≤ r} sup_{|ξ| ≤ cap} |q(y,ξ)|` over a probe grid.
fn double_sup(q: &StateSymbol, x: &[f64], r: f64, cap: f64) -> Result<f64> {
    let d = q.dim;
    let mut sup = 0.0f64;
    let offsets = [-1.0, -0.5, 0.0, 0.5, 1.0];
    for &oy in &offsets {
        let y: Vec<f64> = x.iter().map(|v| v + oy * r).collect();
        for k in 0..d {
            for sign in [-1.0, 1.0] {
                for j in 0..24 {
                    let radius = cap * math::powf(2.0, -(j as f64 / 2.0));
                    let mut eta = vec![0.0; d];
                    eta[k] = sign * radius;
                    sup = sup.max(q.eval(&y, &eta)?.norm());
                }
            }
        }
    }
    Ok(sup)
}

/// `sup_{|ξ| ≤ cap} inf_{|y−x| ≤ r} |q(y,ξ)|` over a probe grid.
fn sup_inf(q: &StateSymbol, x: &[f64], r: f64, cap: f64) -> Result<f64> {
    let d = q.dim;
    let offsets = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut sup = 0.0f64;
    for k in 0..d {
        for sign in [-1.0, 1.0] {
            for j in 0..24 {
                let radius = cap * math::powf(2.0, -(j as f64 / 2.0));
                let mut eta = vec![0.0; d];
                eta[k] = sign * radius;
                let mut inf = f64::INFINITY;
                for &oy in &offsets {
                    let y: Vec<f64> = x.iter().map(|v| v + oy * r).collect();
                    inf = inf.min(q.eval(&y, &eta)?.norm());
                }
                sup = sup.max(inf);
            }
        }
    }
    Ok(sup)
}

/// Empirical exceedance frequency `P^x(sup_{s ≤ t} |X_s − x| > r)` at grid
/// resolution, the companion check of [`maximal_bound`].
pub fn exceedance_frequency(
    process: &SymbolProcess,
    x: &[f64],
    r: f64,
    t: f64,
    n: usize,
    seed: u64,
    stream_lo: u64,
    settings: &QuadSettings,
) -> Result<f64> {
    let sampler = process.build_sampler(settings)?;
    let mut hits = 0usize;
    for k in 0..n {
        let mut rng = RandomSource::new(seed, stream_lo + k as u64);
        let stopped = process.stopped_values(&sampler, x, r, &[t], &mut rng)?;
        if stopped.values[0].1 {
            hits += 1;
        }
    }
    Ok(hits as f64 / n as f64)
}

/// Sector-condition probe: `κ̂ = sup |Im q| / Re q` over a (x, ξ) grid;
/// passes when the ratio stays below the cap.
pub fn sector_check(
    q: &StateSymbol,
    x_probes: &[Vec<f64>],
    xi_probes: &[Vec<f64>],
    kappa_cap: f64,
) -> Result<(f64, bool)> {
    let mut kappa = 0.0f64;
    for x in x_probes {
        for xi in xi_probes {
            if math::norm(xi) == 0.0 {
                continue;
            }
            let v = q.eval(x, xi)?;
            if v.re <= 0.0 {
                if math::abs(v.im) > 1e-14 {
                    return Ok((f64::INFINITY, false));
                }
                continue;
            }
            kappa = kappa.max(math::abs(v.im) / v.re);
        }
    }
    Ok((kappa, kappa <= kappa_cap))
}

/// Monte Carlo mean exit time from `B_r(x)` plus two symbol-side brackets.
#[derive(Clone, Debug)]
pub struct ExitTimeReport {
    pub e_tau: f64,
    pub stderr: f64,
    pub bracket: (f64, f64),
    pub censored_fraction: f64,
}

/// Mean exit time with the brackets
///
/// * lower `1/(4c·S)`, `S = sup_{|ξ|≤1/r} sup_{|y−x|≤r} |q|`: optimise
///   `t(1 − c·t·S)` over `t` in the maximal inequality;
/// * upper `2√3·√(1+κ²) / ((√2−κ) · sup_{|ξ|≤k*/r} inf_{|y−x|≤r} |q|)`:
///   stopped-cosine argument — for `|ξ| ≤ k*/r` the phase stays below
///   `k* = arccos √(2/3)` inside the ball, and the sector constant κ
///   controls the imaginary part.
///
/// Errors with `Censored` when more than 1% of paths never exit before the
/// horizon.
pub fn mean_exit_time(
    process: &SymbolProcess,
    q: &StateSymbol,
    x: &[f64],
    r: f64,
    t_max: f64,
    n: usize,
    seed: u64,
    stream_lo: u64,
    settings: &QuadSettings,
) -> Result<ExitTimeReport> {
    let sampler = process.build_sampler(settings)?;
    let mut taus = Vec::with_capacity(n);
    let mut censored = 0usize;
    for k in 0..n {
        let mut rng = RandomSource::new(seed, stream_lo + k as u64);
        let stopped = process.stopped_values(&sampler, x, r, &[t_max], &mut rng)?;
        match stopped.exit_time {
            Some(t) => taus.push(t),
            None => censored += 1,
        }
    }
    let frac = censored as f64 / n as f64;
    if frac > 0.01 {
        return Err(LevyError::Censored { fraction: frac });
    }
    let s = stats::summarize(&taus);
    let sup_s = double_sup(q, x, r, 1.0 / r)?;
    let lower = 1.0 / (4.0 * MAXIMAL_BOUND_C_D1 * sup_s);
    let kstar = exit_frequency_cap();
    let sup_inf_v = sup_inf(q, x, r, kstar / r)?;
    let xi_probes: Vec<Vec<f64>> = (0..12)
        .map(|j| vec![kstar / r * math::powf(2.0, -(j as f64 / 2.0))])
        .collect();
    let x_probes: Vec<Vec<f64>> = [-1.0, 0.0, 1.0]
        .iter()
        .map(|o| x.iter().map(|v| v + o * r).collect())
        .collect();
    let (kappa, _) = sector_check(q, &x_probes, &xi_probes, f64::INFINITY)?;
    let upper = if kappa < math::SQRT_2 {
        2.0 * math::sqrt(3.0) * math::sqrt(1.0 + kappa * kappa)
            / ((math::SQRT_2 - kappa) * sup_inf_v)
    } else {
        f64::INFINITY
    };
    Ok(ExitTimeReport {
        e_tau: s.mean,
        stderr: s.stderr,
        bracket: (lower, upper),
        censored_fraction: frac,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyMeasureSpec;
    use crate::linalg::SymMatrix;
    use crate::quad;

    fn settings() -> QuadSettings {
        QuadSettings::default()
    }

    #[test]
    fn maximal_bound_constant_derivation() {
        // c = ∫ (1+ξ²)|û(ξ)| dξ for u(y) = (1−y²)⁸, û computed by nested
        // quadrature under the convention û(ξ) = (2π)⁻¹ ∫ u e^{−iξy} dy.
        let uhat = |xi: f64| -> f64 {
            let v = quad::integrate(
                |y: f64| {
                    let w = 1.0 - y * y;
                    let w2 = w * w;
                    let w4 = w2 * w2;
                    w4 * w4 * math::cos(xi * y)
                },
                0.0,
                1.0,
                1e-13,
                2000,
            )
            .unwrap();
            2.0 * v / (2.0 * math::PI)
        };
        let mut c = 0.0;
        let mut a = 0.0;
        for b in [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0] {
            c += quad::integrate(|xi| (1.0 + xi * xi) * math::abs(uhat(xi)), a, b, 1e-10, 4000)
                .unwrap();
            a = b;
        }
        c *= 2.0;
        assert!(
            math::abs(c - MAXIMAL_BOUND_C_D1) < 1e-6,
            "derived {c} vs embedded {MAXIMAL_BOUND_C_D1}"
        );
    }

    #[test]
    fn stable_like_closed_form() {
        let q = StateSymbol::stable_like(
            1,
            |x: &[f64]| (1.0 + 0.5 * math::sin(x[0])).clamp(0.6, 1.9),
            |_| 1.0,
        );
        let x = [0.7];
        let alpha = (1.0 + 0.5 * math::sin(0.7)).clamp(0.6, 1.9);
        for &xi in &[0.5, 2.0, 10.0] {
            let v = q.eval(&x, &[xi]).unwrap();
            assert!((v.re - math::powf(xi, alpha)).abs() < 1e-12);
            assert!(v.im == 0.0);
        }
        assert_eq!(q.killing_rate(&x), 0.0);
    }

    #[test]
    fn levy_symbol_is_state_independent() {
        let t = LevyTriplet::poisson(2.0).unwrap();
        let q = StateSymbol::levy(t.clone(), settings());
        let psi = t.exponent(&[1.3], &settings()).unwrap();
        for &x in &[-5.0, 0.0, 3.3] {
            assert!((q.eval(&[x], &[1.3]).unwrap() - psi).norm() < 1e-14);
        }
    }

    #[test]
    fn sde_constant_coefficient_is_linear() {
        // Φ ≡ c: X_t = x₀ + c·L_t exactly at grid times.
        let spec = SdeSpec {
            dim_state: 1,
            dim_driver: 1,
            phi: Arc::new(|_x: &[f64]| vec![2.5]),
            lipschitz: 0.0,
            driver: LevyTriplet::poisson(3.0).unwrap(),
            x0: vec![1.0],
        };
        let mut rng = RandomSource::new(17, 4);
        let path = sde_euler(&spec, 0.5, 0.125, 1.0, &mut rng, &settings()).unwrap();
        // Replay the driver with the same stream.
        let sampler = LevyItoSampler::new(&spec.driver, 0.5, &settings()).unwrap();
        let mut rng2 = RandomSource::new(17, 4);
        let jumps = sampler.sample_jumps(1.0, &mut rng2);
        for (i, &t) in path.times.iter().enumerate() {
            let l: f64 = jumps
                .iter()
                .filter(|(s, _)| *s <= t)
                .map(|(_, d)| d[0])
                .sum::<f64>()
                + sampler.drift_rate()[0] * t;
            assert!((path.value(i)[0] - (1.0 + 2.5 * l)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn sde_symbol_identity_and_scaling() {
        let spec = SdeSpec {
            dim_state: 1,
            dim_driver: 1,
            phi: Arc::new(|x: &[f64]| vec![2.0 + math::sin(x[0])]),
            lipschitz: 1.0,
            driver: LevyTriplet::new(
                vec![0.0],
                SymMatrix::zeros(1),
                LevyMeasureSpec::AlphaStable {
                    alpha: 1.0,
                    spherical: vec![(vec![1.0], 0.5), (vec![-1.0], 0.5)],
                },
            )
            .unwrap(),
            x0: vec![0.0],
        };
        spec.validate_lipschitz(&[vec![-2.0], vec![-0.5], vec![0.0], vec![1.0], vec![2.5]])
            .unwrap();
        // Symmetric Cauchy driver: ψ(u) = |u| ⇒ q(x,ξ) = (2+sin x)|ξ|.
        for &(x, xi) in &[(0.3, 1.5), (-1.0, 0.7)] {
            let v = sde_symbol(&spec, &[x], &[xi], &settings()).unwrap();
            let expect = (2.0 + math::sin(x)) * math::abs(xi);
            assert!((v.re - expect).abs() < 1e-12, "{v} vs {expect}");
            assert!(v.im.abs() < 1e-12);
        }
        assert!(
            sde_symbol(&spec, &[0.4], &[0.0], &settings())
                .unwrap()
                .norm()
                < 1e-15
        );
    }

    #[test]
    fn lipschitz_validation_rejects_sqrt() {
        let spec = SdeSpec {
            dim_state: 1,
            dim_driver: 1,
            phi: Arc::new(|x: &[f64]| vec![math::sqrt(math::abs(x[0]))]),
            lipschitz: 1.0,
            driver: LevyTriplet::brownian(1),
            x0: vec![0.0],
        };
        let probes: Vec<Vec<f64>> = (0..40).map(|k| vec![k as f64 * 1e-4]).collect();
        assert!(spec.validate_lipschitz(&probes).is_err());
    }

    #[test]
    fn indices_of_brownian_and_stable_like() {
        let brown = StateSymbol::levy(LevyTriplet::brownian(1), settings());
        let idx = indices_at_infinity(&brown, &[0.0], 1e6, 24).unwrap();
        assert!((idx.beta_hat - 2.0).abs() < 0.02, "beta={}", idx.beta_hat);
        assert!((idx.delta_hat - 2.0).abs() < 0.02, "delta={}", idx.delta_hat);

        let q = StateSymbol::stable_like(1, |_| 1.3, |_| 1.0);
        let idx = indices_at_infinity(&q, &[0.4], 1e6, 24).unwrap();
        assert!((idx.beta_hat - 1.3).abs() < 0.02);
        assert!((idx.delta_hat - 1.3).abs() < 0.02);
        assert!(idx.delta_hat <= idx.beta_hat + 0.05);
    }

    #[test]
    fn indices_of_drift_dominated_symbol() {
        // ψ(ξ) = iξ + |ξ|^{1/2}: |ψ| ≍ |ξ| at large ξ, so β̂ = 1.
        let q = StateSymbol::from_fn(1, |_x, xi| {
            Complex64::new(math::sqrt(math::abs(xi[0])), xi[0])
        });
        let idx = indices_at_infinity(&q, &[0.0], 1e6, 24).unwrap();
        assert!((idx.beta_hat - 1.0).abs() < 0.05, "beta={}", idx.beta_hat);
    }

    #[test]
    fn sector_constants() {
        let sym = StateSymbol::stable_like(1, |_| 1.5, |_| 1.0);
        let xi: Vec<Vec<f64>> = (1..20).map(|k| vec![k as f64 * 0.5]).collect();
        let (k0, pass) = sector_check(&sym, &[vec![0.0]], &xi, 100.0).unwrap();
        assert!(k0 == 0.0 && pass);
        // ψ = −iξ + |ξ|: ratio ≡ 1.
        let drifted = StateSymbol::from_fn(1, |_x, xi| Complex64::new(math::abs(xi[0]), -xi[0]));
        let (k1, pass) = sector_check(&drifted, &[vec![0.0]], &xi, 100.0).unwrap();
        assert!((k1 - 1.0).abs() < 1e-12 && pass);
        // ψ = iξ + |ξ|^{1/2}: ratio √|ξ| exceeds the cap on a wide grid.
        let violating = StateSymbol::from_fn(1, |_x, xi| {
            Complex64::new(math::sqrt(math::abs(xi[0])), xi[0])
        });
        let wide: Vec<Vec<f64>> = (0..30).map(|k| vec![math::powf(2.0, k as f64)]).collect();
        let (_k2, pass) = sector_check(&violating, &[vec![0.0]], &wide, 100.0).unwrap();
        assert!(!pass);
    }

    #[test]
    fn maximal_bound_scales_linearly_in_time() {
        let q = StateSymbol::levy(LevyTriplet::brownian(1), settings());
        let b1 = maximal_bound(&q, &[0.0], 1.0, 0.01).unwrap();
        let b2 = maximal_bound(&q, &[0.0], 1.0, 0.02).unwrap();
        assert!((b2 - 2.0 * b1).abs() < 1e-12);
        // Brownian: sup |q| over |ξ| ≤ 1 is ½.
        assert!((b1 - MAXIMAL_BOUND_C_D1 * 0.01 * 0.5).abs() < 1e-9);
    }
}
