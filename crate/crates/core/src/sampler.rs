//! Path generation: Poisson arrivals, compound Poisson sums, the dyadic
//! midpoint construction of Brownian motion, the compensated-annulus
//! truncation of a general triplet, and the random series representation.
//!
//! Everything is a pure function of `(parameters, RandomSource)`; ensembles
//! partition stream ids across samples.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{LevyError, Result};
use crate::levy::{ConcreteKind, LevyTriplet, QuadSettings};
use crate::linalg::SymMatrix;
use crate::math;
use crate::path::CadlagPath;
use crate::quad;
use crate::rng::RandomSource;

/// Default cap on the expected number of retained jumps per path.
pub const JUMP_BUDGET_DEFAULT: f64 = 1e7;

/// A sampleable jump distribution `μ` on ℝᵈ.
pub type JumpLaw = Arc<dyn Fn(&mut RandomSource) -> Vec<f64> + Send + Sync>;

/// `μ = δ_point`.
pub fn jump_law_atom(point: Vec<f64>) -> JumpLaw {
    Arc::new(move |_| point.clone())
}

/// Standard normal jumps in `dim` dimensions.
pub fn jump_law_std_normal(dim: usize) -> JumpLaw {
    Arc::new(move |rng| (0..dim).map(|_| rng.standard_normal()).collect())
}

/// Uniform on `{−1, +1}` (d = 1).
pub fn jump_law_rademacher() -> JumpLaw {
    Arc::new(|rng| {
        if rng.uniform() < 0.5 {
            vec![-1.0]
        } else {
            vec![1.0]
        }
    })
}

/// Poisson counting process: unit jumps at the partial sums of
/// `Exp(lambda)` waiting times, piecewise constant in between.
pub fn sample_poisson_process(lambda: f64, t_max: f64, rng: &mut RandomSource) -> Result<CadlagPath> {
    if lambda <= 0.0 {
        return Err(LevyError::InvalidRate(lambda));
    }
    if t_max <= 0.0 {
        return Err(LevyError::InvalidRate(t_max));
    }
    let mut times = vec![0.0];
    let mut values = vec![0.0];
    let mut jumps = Vec::new();
    let mut t = 0.0;
    let mut level = 0.0;
    loop {
        t += rng.exponential(lambda);
        if t > t_max {
            break;
        }
        level += 1.0;
        times.push(t);
        values.push(level);
        jumps.push((t, vec![1.0]));
    }
    if *times.last().unwrap() < t_max {
        times.push(t_max);
        values.push(level);
    }
    CadlagPath::new(1, t_max, times, values, jumps)
}

/// Compound Poisson process `C_t = Σ_{k ≤ N_t} H_k` with `H_k ~ μ` i.i.d.
/// placed at `Poisson(lambda)` arrival times.
pub fn sample_compound_poisson(
    lambda: f64,
    dim: usize,
    jump_law: &JumpLaw,
    t_max: f64,
    rng: &mut RandomSource,
) -> Result<CadlagPath> {
    if lambda <= 0.0 {
        return Err(LevyError::InvalidRate(lambda));
    }
    if t_max <= 0.0 {
        return Err(LevyError::InvalidRate(t_max));
    }
    let mut times = vec![0.0];
    let mut values = vec![0.0; dim];
    let mut jumps = Vec::new();
    let mut state = vec![0.0; dim];
    let mut t = 0.0;
    loop {
        t += rng.exponential(lambda);
        if t > t_max {
            break;
        }
        let h = jump_law(rng);
        if h.len() != dim {
            return Err(LevyError::DimensionMismatch {
                expected: dim,
                got: h.len(),
            });
        }
        for (s, hi) in state.iter_mut().zip(&h) {
            *s += hi;
        }
        times.push(t);
        values.extend_from_slice(&state);
        if math::norm(&h) > 0.0 {
            jumps.push((t, h));
        }
    }
    if *times.last().unwrap() < t_max {
        times.push(t_max);
        values.extend_from_slice(&state);
    }
    CadlagPath::new(dim, t_max, times, values, jumps)
}

/// Lévy's midpoint construction of Brownian motion on `[0, 1]`.
///
/// Draw order is fixed: `W(1) ~ N(0,1)` first, then level `n = 0, 1, …`
/// midpoints left to right, each displaced by an independent
/// `N(0, 2^{−n}/4)` variable. Grid values at all dyadic points
/// `k·2^{−levels}`; the jump ledger is empty.
pub fn sample_brownian_levy(levels: u32, rng: &mut RandomSource) -> Result<CadlagPath> {
    if levels > 30 {
        return Err(LevyError::Unsupported("levels must be at most 30"));
    }
    let n_pts = (1usize << levels) + 1;
    let mut w = vec![0.0; n_pts];
    w[n_pts - 1] = rng.standard_normal();
    for n in 0..levels {
        let stride = 1usize << (levels - n); // distance between level-n nodes
        let half = stride / 2;
        let sd = math::sqrt(math::powf(2.0, -(n as f64)) / 4.0);
        let mut k = 0;
        while k + stride < n_pts {
            let mid = k + half;
            w[mid] = 0.5 * (w[k] + w[k + stride]) + sd * rng.standard_normal();
            k += stride;
        }
    }
    let h = 1.0 / (n_pts - 1) as f64;
    let times: Vec<f64> = (0..n_pts).map(|i| i as f64 * h).collect();
    CadlagPath::new(1, 1.0, times, w, Vec::new())
}

// ---------------------------------------------------------------------------
// Truncated Lévy–Itô construction
// ---------------------------------------------------------------------------

/// Piecewise-linear radial inverse-CDF table on `[lo, hi)`: geometric cells
/// with exact Gauss–Kronrod masses, linear density within a cell.
#[derive(Clone, Debug)]
struct RadialTable {
    edges: Vec<f64>,
    cum_mass: Vec<f64>, // cum_mass[i] = mass of cells 0..i
    g_left: Vec<f64>,   // ρ(r) r^{d−1} at cell edges, rescaled to exact mass
    g_right: Vec<f64>,
}

impl RadialTable {
    fn build(
        density: &(dyn Fn(f64) -> f64 + Send + Sync),
        dm1: f64,
        lo: f64,
        hi: f64,
        settings: &QuadSettings,
    ) -> Result<(Self, f64)> {
        let n_cells = ((math::log2(hi / lo) * 32.0) as usize).clamp(8, 96);
        let ratio = math::powf(hi / lo, 1.0 / n_cells as f64);
        let mut edges = Vec::with_capacity(n_cells + 1);
        let mut e = lo;
        for _ in 0..n_cells {
            edges.push(e);
            e *= ratio;
        }
        edges.push(hi);
        let g = |r: f64| density(r) * math::powf(r, dm1);
        let mut cum = Vec::with_capacity(n_cells);
        let mut g_left = Vec::with_capacity(n_cells);
        let mut g_right = Vec::with_capacity(n_cells);
        let mut total = 0.0;
        for i in 0..n_cells {
            let (a, b) = (edges[i], edges[i + 1]);
            let m = quad::integrate(g, a, b, settings.tol * 1e-3, settings.max_panels)?;
            let (ga, gb) = (g(a).max(0.0), g(b).max(0.0));
            // Rescale the linear shape so the trapezoid mass is exact.
            let trap = 0.5 * (ga + gb) * (b - a);
            let scale = if trap > 0.0 { m / trap } else { 0.0 };
            g_left.push(ga * scale);
            g_right.push(gb * scale);
            total += m.max(0.0);
            cum.push(total);
        }
        Ok((
            RadialTable {
                edges,
                cum_mass: cum,
                g_left,
                g_right,
            },
            total,
        ))
    }

    fn total(&self) -> f64 {
        *self.cum_mass.last().unwrap()
    }

    fn sample(&self, rng: &mut RandomSource) -> f64 {
        let u = rng.uniform() * self.total();
        let i = match self
            .cum_mass
            .binary_search_by(|c| c.partial_cmp(&u).unwrap())
        {
            Ok(i) => (i + 1).min(self.cum_mass.len() - 1),
            Err(i) => i.min(self.cum_mass.len() - 1),
        };
        let prev = if i == 0 { 0.0 } else { self.cum_mass[i - 1] };
        let v = (u - prev).max(0.0);
        let (a, b) = (self.edges[i], self.edges[i + 1]);
        let h = b - a;
        let (g0, g1) = (self.g_left[i], self.g_right[i]);
        let slope = (g1 - g0) / h;
        let cell_mass = (self.cum_mass[i] - prev).max(1e-300);
        if math::abs(slope) * h < 1e-12 * g0.max(1e-300) {
            return a + h * (v / cell_mass).min(1.0);
        }
        let disc = g0 * g0 + 2.0 * v * slope;
        let s = if disc > 0.0 {
            (math::sqrt(disc) - g0) / slope
        } else {
            -g0 / slope
        };
        (a + s).clamp(a, b)
    }
}

#[derive(Clone, Debug)]
enum RegionLaw {
    Atoms {
        cumulative: Vec<f64>,
        points: Vec<Vec<f64>>,
    },
    Radial {
        dir_cumulative: Vec<f64>,
        dirs: Vec<Vec<f64>>,
        table: RadialTable,
    },
}

#[derive(Clone, Debug)]
struct JumpRegion {
    rate: f64,
    law: RegionLaw,
}

impl JumpRegion {
    /// Draw one jump and add `scale`-times it into `acc`; optionally record it.
    fn add_jump(
        &self,
        rng: &mut RandomSource,
        acc: &mut [f64],
        record: Option<&mut Vec<f64>>,
    ) {
        match &self.law {
            RegionLaw::Atoms { cumulative, points } => {
                let i = rng.pick_cumulative(cumulative);
                for (a, p) in acc.iter_mut().zip(&points[i]) {
                    *a += p;
                }
                if let Some(rec) = record {
                    rec.extend_from_slice(&points[i]);
                }
            }
            RegionLaw::Radial {
                dir_cumulative,
                dirs,
                table,
            } => {
                let i = rng.pick_cumulative(dir_cumulative);
                let r = table.sample(rng);
                for (a, z) in acc.iter_mut().zip(&dirs[i]) {
                    *a += r * z;
                }
                if let Some(rec) = record {
                    rec.extend(dirs[i].iter().map(|z| r * z));
                }
            }
        }
    }
}

/// Precomputed truncated Lévy–Itô sampler for one `(triplet, eps)` pair.
///
/// The construction is drift + `√Q·W` + an uncompensated compound Poisson
/// part on `{|y| ≥ 1}` + compensated compound Poisson parts on the annuli
/// `A_n = [1/(n+1), 1/n)` down to `|y| ≥ eps` (the last annulus is clipped
/// at `eps`). Jumps below `eps` are dropped, not Gaussian-approximated; the
/// L² truncation bound `∫_{|y|<eps} |y|² ν(dy)` is reported so the law can
/// be checked against the truncated exponent `ψ_eps`.
#[derive(Clone, Debug)]
pub struct LevyItoSampler {
    dim: usize,
    /// `l + (stable drift correction) − Σ annulus compensators`.
    drift_rate: Vec<f64>,
    sqrt_q: Option<SymMatrix>,
    regions: Vec<JumpRegion>,
    total_rate: f64,
    /// `∫_{|y| < eps} |y|² ν(dy)`.
    pub truncation_l2: f64,
    pub eps: f64,
}

impl LevyItoSampler {
    pub fn new(triplet: &LevyTriplet, eps: f64, settings: &QuadSettings) -> Result<Self> {
        Self::with_budget(triplet, eps, settings, JUMP_BUDGET_DEFAULT)
    }

    pub fn with_budget(
        triplet: &LevyTriplet,
        eps: f64,
        settings: &QuadSettings,
        budget: f64,
    ) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(LevyError::Unsupported("eps must lie in (0, 1]"));
        }
        let dim = triplet.dim();
        let concrete = triplet.measure.to_concrete()?;
        let mut drift_rate: Vec<f64> = triplet
            .drift
            .iter()
            .zip(concrete.extra_drift.iter().chain(core::iter::repeat(&0.0)))
            .map(|(l, e)| l + e)
            .collect();
        let sqrt_q = if triplet.diffusion.max_abs() > 0.0 {
            Some(triplet.diffusion.psd_sqrt(crate::levy::TOL_PSD)?)
        } else {
            None
        };

        let mut regions = Vec::new();
        let mut total_rate = 0.0;
        let mut add_region = |lo: f64, hi: f64, compensated: bool, drift_rate: &mut Vec<f64>| -> Result<()> {
            let rate = concrete.mass_in(lo, hi, settings)?;
            if rate <= 0.0 {
                return Ok(());
            }
            let law = match &concrete.kind {
                ConcreteKind::Zero => return Ok(()),
                ConcreteKind::Atoms(atoms) => {
                    let mut cumulative = Vec::new();
                    let mut points = Vec::new();
                    let mut acc = 0.0;
                    for (p, m) in atoms {
                        let n = math::norm(p);
                        if n >= lo && n < hi && *m > 0.0 {
                            acc += m;
                            cumulative.push(acc);
                            points.push(p.clone());
                        }
                    }
                    RegionLaw::Atoms { cumulative, points }
                }
                ConcreteKind::Radial { density, angular } => {
                    let dm1 = (dim as f64) - 1.0;
                    let (table, _) = RadialTable::build(density.as_ref(), dm1, lo, hi, settings)?;
                    let mut cumulative = Vec::new();
                    let mut dirs = Vec::new();
                    let mut acc = 0.0;
                    for (z, w) in angular {
                        if *w > 0.0 {
                            acc += w;
                            cumulative.push(acc);
                            dirs.push(z.clone());
                        }
                    }
                    RegionLaw::Radial {
                        dir_cumulative: cumulative,
                        dirs,
                        table,
                    }
                }
            };
            if compensated {
                let c = concrete.mean_in(lo, hi, settings)?;
                for (d, ci) in drift_rate.iter_mut().zip(&c) {
                    *d -= ci;
                }
            }
            total_rate += rate;
            regions.push(JumpRegion { rate, law });
            Ok(())
        };

        // Large jumps |y| ≥ 1, uncompensated; doubling windows for radial
        // measures so each region gets a finite table.
        match &concrete.kind {
            ConcreteKind::Zero => {}
            ConcreteKind::Atoms(_) => {
                add_region(1.0f64.max(eps), f64::INFINITY, false, &mut drift_rate)?;
            }
            ConcreteKind::Radial { .. } => {
                let mut lo = 1.0f64.max(eps);
                let first_window = concrete.mass_in(lo, f64::INFINITY, settings)?;
                let mut quiet = 0;
                for _ in 0..96 {
                    let hi = lo * 2.0;
                    let m = concrete.mass_in(lo, hi, settings)?;
                    if m <= first_window.max(1.0) * 1e-14 {
                        quiet += 1;
                        if quiet >= 2 {
                            break;
                        }
                    } else {
                        quiet = 0;
                        add_region(lo, hi, false, &mut drift_rate)?;
                    }
                    lo = hi;
                }
            }
        }
        // Compensated annuli A_n = [1/(n+1), 1/n) down to eps.
        let mut n = 1u64;
        while eps < 1.0 / n as f64 {
            let hi = 1.0 / n as f64;
            let lo = (1.0 / (n + 1) as f64).max(eps);
            add_region(lo, hi, true, &mut drift_rate)?;
            if lo <= eps {
                break;
            }
            n += 1;
            if n > 1_000_000 {
                return Err(LevyError::Unsupported("eps too small for annulus schedule"));
            }
        }

        if total_rate > budget {
            return Err(LevyError::MassOverflow {
                expected_jumps: total_rate,
                budget,
            });
        }
        let truncation_l2 = concrete.second_moment_in(0.0, eps, settings)?;
        Ok(LevyItoSampler {
            dim,
            drift_rate,
            sqrt_q,
            regions,
            total_rate,
            truncation_l2,
            eps,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Deterministic drift rate including annulus compensators.
    pub fn drift_rate(&self) -> &[f64] {
        &self.drift_rate
    }

    /// Expected number of retained jumps per unit time.
    pub fn jump_rate(&self) -> f64 {
        self.total_rate
    }

    /// `Q[0,0]`: the variance rate of the first Gaussian coordinate (zero
    /// without a diffusion part). Exit-time estimators use it for Brownian
    /// bridge crossing tests between grid points.
    pub fn gaussian_rate_component(&self, i: usize) -> f64 {
        match &self.sqrt_q {
            Some(b) => (0..self.dim).map(|k| b.get(i, k) * b.get(i, k)).sum(),
            None => 0.0,
        }
    }

    /// Add `√Q · N(0, dt·I)` into `acc`.
    pub fn add_gaussian_increment(&self, dt: f64, rng: &mut RandomSource, acc: &mut [f64]) {
        if let Some(b) = &self.sqrt_q {
            let sd = math::sqrt(dt);
            let z: Vec<f64> = (0..self.dim).map(|_| sd * rng.standard_normal()).collect();
            let bz = b.matvec(&z);
            for (a, v) in acc.iter_mut().zip(&bz) {
                *a += v;
            }
        }
    }

    /// All retained jumps on `(0, t_max]`, sorted by time.
    pub fn sample_jumps(&self, t_max: f64, rng: &mut RandomSource) -> Vec<(f64, Vec<f64>)> {
        let mut jumps: Vec<(f64, Vec<f64>)> = Vec::new();
        for region in &self.regions {
            let mut t = 0.0;
            loop {
                t += rng.exponential(region.rate);
                if t > t_max {
                    break;
                }
                let mut delta = vec![0.0; self.dim];
                let mut rec = Vec::with_capacity(self.dim);
                region.add_jump(rng, &mut delta, Some(&mut rec));
                if math::norm(&rec) > 0.0 {
                    jumps.push((t, rec));
                }
            }
        }
        jumps.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        jumps
    }

    /// Endpoint `X_t` (started at 0) without materialising the path.
    pub fn sample_endpoint(&self, t_max: f64, rng: &mut RandomSource, out: &mut Vec<f64>) {
        let base = out.len();
        out.resize(base + self.dim, 0.0);
        for region in &self.regions {
            let mut t = 0.0;
            loop {
                t += rng.exponential(region.rate);
                if t > t_max {
                    break;
                }
                region.add_jump(rng, &mut out[base..], None);
            }
        }
        {
            let acc = &mut out[base..];
            for (a, l) in acc.iter_mut().zip(&self.drift_rate) {
                *a += l * t_max;
            }
        }
        let mut gauss = vec![0.0; self.dim];
        self.add_gaussian_increment(t_max, rng, &mut gauss);
        for (a, g) in out[base..].iter_mut().zip(&gauss) {
            *a += g;
        }
    }

    /// Full path with jump ledger on a regular grid of width `grid_dt`.
    pub fn sample_path(
        &self,
        x0: &[f64],
        t_max: f64,
        grid_dt: f64,
        rng: &mut RandomSource,
    ) -> Result<CadlagPath> {
        let (path, _parts) = self.sample_path_decomposed(x0, t_max, grid_dt, rng)?;
        Ok(path)
    }

    /// Path plus its decomposition into continuous part and jump sums, for
    /// bookkeeping checks: `values = continuous + Σ jumps` exactly.
    pub fn sample_path_decomposed(
        &self,
        x0: &[f64],
        t_max: f64,
        grid_dt: f64,
        rng: &mut RandomSource,
    ) -> Result<(CadlagPath, LevyItoParts)> {
        if grid_dt <= 0.0 || t_max <= 0.0 {
            return Err(LevyError::InvalidRate(grid_dt.min(t_max)));
        }
        if x0.len() != self.dim {
            return Err(LevyError::DimensionMismatch {
                expected: self.dim,
                got: x0.len(),
            });
        }
        let n_cells = (math::ceil(t_max / grid_dt - 1e-9) as usize).max(1);
        let jumps = self.sample_jumps(t_max, rng);
        let mut times = Vec::with_capacity(n_cells + 1);
        let mut values = Vec::with_capacity((n_cells + 1) * self.dim);
        let mut continuous = Vec::with_capacity((n_cells + 1) * self.dim);
        times.push(0.0);
        values.extend_from_slice(x0);
        continuous.extend_from_slice(x0);
        let mut cont_state: Vec<f64> = x0.to_vec();
        let mut jump_cursor = 0usize;
        let mut jump_sum = vec![0.0; self.dim];
        for k in 1..=n_cells {
            let t = if k == n_cells { t_max } else { k as f64 * grid_dt };
            let dt = t - times[k - 1];
            for (c, l) in cont_state.iter_mut().zip(&self.drift_rate) {
                *c += l * dt;
            }
            self.add_gaussian_increment(dt, rng, &mut cont_state);
            while jump_cursor < jumps.len() && jumps[jump_cursor].0 <= t {
                for (s, d) in jump_sum.iter_mut().zip(&jumps[jump_cursor].1) {
                    *s += d;
                }
                jump_cursor += 1;
            }
            times.push(t);
            continuous.extend_from_slice(&cont_state);
            for (c, s) in cont_state.iter().zip(&jump_sum) {
                values.push(c + s);
            }
        }
        let path = CadlagPath::new(self.dim, t_max, times, values, jumps)?;
        Ok((
            path,
            LevyItoParts {
                continuous,
                truncation_l2: self.truncation_l2,
            },
        ))
    }
}

/// Decomposition byproducts of one truncated Lévy–Itô path.
#[derive(Clone, Debug)]
pub struct LevyItoParts {
    /// Drift + Gaussian component at the grid times (row-major), so that
    /// `values[k] = continuous[k] + Σ_{jump times ≤ t_k} Δ`.
    pub continuous: Vec<f64>,
    pub truncation_l2: f64,
}

/// One-call convenience: build the sampler and draw one path; returns the
/// path and the L² truncation bound.
pub fn sample_levy_ito(
    triplet: &LevyTriplet,
    eps: f64,
    t_max: f64,
    grid_dt: f64,
    rng: &mut RandomSource,
    settings: &QuadSettings,
) -> Result<(CadlagPath, f64)> {
    let sampler = LevyItoSampler::new(triplet, eps, settings)?;
    let bound = sampler.truncation_l2;
    let path = sampler.sample_path(&vec![0.0; triplet.dim()], t_max, grid_dt, rng)?;
    Ok((path, bound))
}

/// Jump-size map of the series representation: `J_k = H(Γ_k, V_k)`.
pub type SeriesKernel = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// Centering terms `c_k = ∫_{k−1}^{k} E[H(r,V)·1_{|H(r,V)|<1}] dr` of the
/// series representation, computed by Gauss–Legendre-style nodes in `r`
/// (midpoint refinement) and a fixed Monte Carlo pass over `V` with its own
/// stream. For symmetric kernels the result is zero to Monte Carlo noise;
/// supply exact centers instead when they are known.
pub fn series_centers(
    kernel: &SeriesKernel,
    v_law: &JumpLaw,
    dim: usize,
    n_terms: usize,
    r_nodes: usize,
    v_samples: usize,
    rng: &mut RandomSource,
) -> Result<Vec<Vec<f64>>> {
    let r_nodes = r_nodes.max(2);
    let v_samples = v_samples.max(1);
    // One shared V sample set keeps the quadrature smooth in r.
    let vs: Vec<Vec<f64>> = (0..v_samples).map(|_| v_law(rng)).collect();
    let mut centers = Vec::with_capacity(n_terms);
    for k in 0..n_terms {
        let mut c = vec![0.0; dim];
        for j in 0..r_nodes {
            let r = k as f64 + (j as f64 + 0.5) / r_nodes as f64;
            for v in &vs {
                let h = kernel(r, v);
                if h.len() != dim {
                    return Err(LevyError::DimensionMismatch {
                        expected: dim,
                        got: h.len(),
                    });
                }
                if math::norm(&h) < 1.0 {
                    for (ci, hi) in c.iter_mut().zip(&h) {
                        *ci += hi;
                    }
                }
            }
        }
        let scale = 1.0 / (r_nodes * v_samples) as f64;
        for ci in c.iter_mut() {
            *ci *= scale;
        }
        centers.push(c);
    }
    Ok(centers)
}

/// Truncated random series on `[0, 1]`:
/// `X_t = Σ_{k ≤ n} (J_k 1_{[0,t]}(U_k) − t c_k)` with `Γ_k` the partial
/// sums of `Exp(1)`, `U_k` uniform on `[0,1]` and caller-supplied centering
/// terms `c_k` (`None` means all zero; there is no canonical disintegration
/// to compute them from, so asymmetric small-jump kernels must supply them).
///
/// Returns the path and the tail level `Γ_n` reached; if that level is
/// below `resolution_radius` the truncation is considered unresolved.
pub fn sample_series(
    kernel: &SeriesKernel,
    v_law: &JumpLaw,
    centers: Option<&[Vec<f64>]>,
    dim: usize,
    n_terms: usize,
    resolution_radius: f64,
    rng: &mut RandomSource,
) -> Result<(CadlagPath, f64)> {
    let mut gamma = 0.0;
    let mut events: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut drift = vec![0.0; dim];
    for k in 0..n_terms {
        gamma += rng.exponential(1.0);
        let u = rng.uniform();
        let v = v_law(rng);
        let j = kernel(gamma, &v);
        if j.len() != dim {
            return Err(LevyError::DimensionMismatch {
                expected: dim,
                got: j.len(),
            });
        }
        if let Some(c) = centers {
            if let Some(ck) = c.get(k) {
                for (d, ci) in drift.iter_mut().zip(ck) {
                    *d += ci;
                }
            }
        }
        if math::norm(&j) > 0.0 {
            events.push((u, j));
        }
    }
    if n_terms > 0 && gamma < resolution_radius {
        return Err(LevyError::TailNotResolved {
            reached: gamma,
            required: resolution_radius,
        });
    }
    events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // Grid: 0, the jump times, 1; value = jump sum − t · Σ c_k.
    let mut times = vec![0.0];
    let mut values = vec![0.0; dim];
    let mut state = vec![0.0; dim];
    let mut jumps = Vec::with_capacity(events.len());
    for (u, j) in events {
        if u <= 0.0 || u >= 1.0 {
            continue;
        }
        for (s, ji) in state.iter_mut().zip(&j) {
            *s += ji;
        }
        if u > *times.last().unwrap() {
            times.push(u);
            for (s, d) in state.iter().zip(&drift) {
                values.push(s - d * u);
            }
        } else {
            // Coinciding uniforms (probability zero in exact arithmetic):
            // fold into the existing grid point.
            let base = (times.len() - 1) * dim;
            for (i, (s, d)) in state.iter().zip(&drift).enumerate() {
                values[base + i] = s - d * u;
            }
        }
        jumps.push((u, j));
    }
    if *times.last().unwrap() < 1.0 {
        times.push(1.0);
        for (s, d) in state.iter().zip(&drift) {
            values.push(s - d);
        }
    }
    let path = CadlagPath::new(dim, 1.0, times, values, jumps)?;
    Ok((path, gamma))
}
