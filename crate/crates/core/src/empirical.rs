//! Estimators extracting jump measures, intensity measures and
//! characteristic functions from simulated paths and ensembles.
//!
//! Pass/fail outcomes use the 3-standard-error rule throughout; every
//! report carries the sample size so thresholds stay reproducible.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{LevyError, Result};
use crate::math;
use crate::path::{CadlagPath, Ensemble};
use crate::rng::RandomSource;
use crate::sampler::{sample_compound_poisson, JumpLaw};
use crate::stats;

/// A jump region `B` as a predicate plus a declared exclusion radius
/// `ε_B > 0` around the origin (so `0 ∉ B̄`). The radius is validated
/// against every ledger jump it is applied to: a jump inside the radius
/// that satisfies the predicate falsifies the declaration.
#[derive(Clone)]
pub struct JumpCounter {
    pub exclusion_radius: f64,
    predicate: Arc<dyn Fn(&[f64]) -> bool + Send + Sync>,
}

impl JumpCounter {
    pub fn new<F>(exclusion_radius: f64, predicate: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        if exclusion_radius <= 0.0 {
            return Err(LevyError::RegionTouchesOrigin);
        }
        Ok(JumpCounter {
            exclusion_radius,
            predicate: Arc::new(predicate),
        })
    }

    /// Norm annulus `{ lo ≤ |y| < hi }`.
    pub fn annulus(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, move |y: &[f64]| {
            let n = math::norm(y);
            n >= lo && n < hi
        })
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        (self.predicate)(y)
    }
}

/// `N_t(B)`: the number of jumps with size in `B` up to time `t`, read
/// exactly off the ledger.
pub fn jump_measure(path: &CadlagPath, region: &JumpCounter, t: f64) -> Result<u64> {
    let mut count = 0u64;
    for (s, delta) in &path.jumps {
        if *s > t {
            break;
        }
        let inside = region.contains(delta);
        if inside && math::norm(delta) < region.exclusion_radius {
            return Err(LevyError::RegionTouchesOrigin);
        }
        if inside {
            count += 1;
        }
    }
    Ok(count)
}

/// Intensity estimator `ν̂(B) = (1/n) Σ N_t(B)/t` with its CLT standard
/// error, from a path ensemble.
pub fn estimate_intensity(
    ensemble: &Ensemble,
    region: &JumpCounter,
    t: f64,
) -> Result<(f64, f64)> {
    if t <= 0.0 {
        return Err(LevyError::InvalidRate(t));
    }
    let paths = ensemble.paths()?;
    let mut per_path = Vec::with_capacity(paths.len());
    for p in paths {
        per_path.push(jump_measure(p, region, t)? as f64 / t);
    }
    let s = stats::summarize(&per_path);
    Ok((s.mean, s.stderr))
}

/// Empirical characteristic function on a grid of frequencies.
#[derive(Clone, Debug)]
pub struct CfEstimate {
    pub xi_grid: Vec<Vec<f64>>,
    pub phi_hat: Vec<Complex64>,
    pub stderr: Vec<f64>,
    pub n: usize,
}

impl CfEstimate {
    /// Points where `|φ̂ − target| ≤ 3·se`.
    pub fn count_within_3se(&self, target: impl Fn(&[f64]) -> Complex64) -> usize {
        self.xi_grid
            .iter()
            .zip(self.phi_hat.iter().zip(&self.stderr))
            .filter(|(xi, (phi, se))| (*phi - target(xi)).norm() <= 3.0 * **se)
            .count()
    }
}

/// `φ̂(ξ) = n⁻¹ Σ exp(i ξ·X)` over ensemble endpoints, with per-point
/// standard error `√((1−|φ̂|²)/n)`.
pub fn empirical_cf(ensemble: &Ensemble, xi_grid: &[Vec<f64>]) -> Result<CfEstimate> {
    let n = ensemble.len();
    if n == 0 {
        return Err(LevyError::EmptyEnsemble);
    }
    let dim = ensemble.dim();
    let mut phi_hat = Vec::with_capacity(xi_grid.len());
    let mut stderr = Vec::with_capacity(xi_grid.len());
    for xi in xi_grid {
        if xi.len() != dim {
            return Err(LevyError::DimensionMismatch {
                expected: dim,
                got: xi.len(),
            });
        }
        let (phi, se, _) = stats::cf_point((0..n).map(|k| math::dot(ensemble.endpoint(k), xi)));
        phi_hat.push(phi);
        stderr.push(se);
    }
    Ok(CfEstimate {
        xi_grid: xi_grid.to_vec(),
        phi_hat,
        stderr,
        n,
    })
}

/// A step function `Σ cⱼ 1_{(aⱼ, bⱼ]}` on `[0, ∞)` with compact support.
#[derive(Clone, Debug)]
pub struct StepFunction {
    /// Disjoint intervals `(a, b]` with their values.
    pub steps: Vec<(f64, f64, f64)>,
}

impl StepFunction {
    pub fn new(steps: Vec<(f64, f64, f64)>) -> Result<Self> {
        for (a, b, c) in &steps {
            if !(*a >= 0.0 && b > a) || !c.is_finite() || !b.is_finite() {
                return Err(LevyError::UnsupportedF);
            }
        }
        Ok(StepFunction { steps })
    }

    pub fn eval(&self, t: f64) -> f64 {
        for (a, b, c) in &self.steps {
            if t > *a && t <= *b {
                return *c;
            }
        }
        0.0
    }
}

/// Outcome of an equality check between a Monte Carlo estimate and an
/// exactly computed reference.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub se: f64,
    pub n: usize,
    pub pass: bool,
}

/// Characteristic-functional identity of a compound Poisson integral:
/// compares the Monte Carlo mean of `exp(i ∫ f(t) dC_t)` (a finite sum over
/// the jump ledger) against the product formula
/// `exp(λ Σⱼ Δtⱼ (E e^{i y cⱼ} − 1))` computed from the jump law's
/// characteristic function.
pub fn campbell_check(
    lambda: f64,
    jump_law: &JumpLaw,
    jump_cf: impl Fn(f64) -> Complex64,
    f: &StepFunction,
    n: usize,
    seed: u64,
    stream_lo: u64,
) -> Result<CheckReport> {
    if lambda <= 0.0 {
        return Err(LevyError::InvalidRate(lambda));
    }
    let horizon = f
        .steps
        .iter()
        .map(|(_, b, _)| *b)
        .fold(0.0f64, f64::max)
        .max(1e-9);
    // Monte Carlo side: Riemann–Stieltjes sum over the ledger.
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let mut rng = RandomSource::new(seed, stream_lo + k as u64);
        let path = sample_compound_poisson(lambda, 1, jump_law, horizon, &mut rng)?;
        let mut phase = 0.0;
        for (t, h) in &path.jumps {
            phase += f.eval(*t) * h[0];
        }
        acc += Complex64::new(math::cos(phase), math::sin(phase));
    }
    let lhs = acc / n as f64;
    let se = math::sqrt((1.0 - lhs.norm_sqr()).max(0.0) / n as f64);
    // Exact side: e^{λ Σ Δt (φ_μ(c) − 1)}.
    let mut expo = Complex64::new(0.0, 0.0);
    for (a, b, c) in &f.steps {
        expo += (jump_cf(*c) - 1.0) * (b - a) * lambda;
    }
    let rhs = expo.exp();
    let pass = (lhs - rhs).norm() <= 3.0 * se.max(1e-12);
    Ok(CheckReport {
        lhs,
        rhs,
        se,
        n,
        pass,
    })
}

/// Factorization probe of the finite-dimensional characteristic function: the
/// joint empirical CF of `(X_{t₁}, …, X_{t_m})` against the product of the
/// empirical increment CFs over `(t_{k−1}, t_k]` evaluated at the cumulative
/// frequencies `ξ_k + … + ξ_m`.
#[derive(Clone, Debug)]
pub struct IndependenceReport {
    pub joint: Complex64,
    pub product: Complex64,
    pub se_joint: f64,
    pub se_product: f64,
    pub pass: bool,
}

pub fn increment_independence_probe(
    ensemble: &Ensemble,
    partition: &[f64],
    xi: &[Vec<f64>],
) -> Result<IndependenceReport> {
    let paths = ensemble.paths()?;
    let m = partition.len();
    if m == 0 || xi.len() != m {
        return Err(LevyError::DimensionMismatch {
            expected: m,
            got: xi.len(),
        });
    }
    let dim = paths[0].dim;
    // Cumulative tails ζ_k = ξ_k + … + ξ_m.
    let mut zeta = alloc::vec![alloc::vec![0.0; dim]; m];
    for k in (0..m).rev() {
        for i in 0..dim {
            zeta[k][i] = xi[k][i] + if k + 1 < m { zeta[k + 1][i] } else { 0.0 };
        }
    }
    let (joint, se_joint, _) = stats::cf_point(paths.iter().map(|p| {
        partition
            .iter()
            .zip(xi)
            .map(|(t, x)| math::dot(p.value_at(*t), x))
            .sum()
    }));
    let mut product = Complex64::new(1.0, 0.0);
    let mut rel_var = 0.0;
    for k in 0..m {
        let t_prev = if k == 0 { 0.0 } else { partition[k - 1] };
        let (factor, se_k, _) = stats::cf_point(paths.iter().map(|p| {
            let inc: Vec<f64> = p
                .value_at(partition[k])
                .iter()
                .zip(p.value_at(t_prev))
                .map(|(a, b)| a - b)
                .collect();
            math::dot(&inc, &zeta[k])
        }));
        rel_var += (se_k / factor.norm().max(1e-6)) * (se_k / factor.norm().max(1e-6));
        product *= factor;
    }
    let se_product = product.norm() * math::sqrt(rel_var);
    let pass = (joint - product).norm() <= 3.0 * math::hypot(se_joint, se_product).max(1e-12);
    Ok(IndependenceReport {
        joint,
        product,
        se_joint,
        se_product,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{jump_law_atom, jump_law_std_normal, sample_poisson_process};

    #[test]
    fn jump_measure_counts_ledger() {
        let mut rng = RandomSource::new(42, 0);
        let path = sample_poisson_process(3.0, 2.0, &mut rng).unwrap();
        let b = JumpCounter::new(0.5, |y: &[f64]| (y[0] - 1.0).abs() < 1e-12).unwrap();
        let total = jump_measure(&path, &b, 2.0).unwrap();
        assert_eq!(total as usize, path.jumps.len());
        // Continuous path: zero count for every region.
        let flat = CadlagPath::new(1, 1.0, alloc::vec![0.0, 1.0], alloc::vec![0.0, 0.0], alloc::vec![]).unwrap();
        assert_eq!(jump_measure(&flat, &b, 1.0).unwrap(), 0);
    }

    #[test]
    fn exclusion_radius_is_validated() {
        let path = CadlagPath::new(
            1,
            1.0,
            alloc::vec![0.0, 1.0],
            alloc::vec![0.0, 0.1],
            alloc::vec![(0.5, alloc::vec![0.1])],
        )
        .unwrap();
        // Region claims exclusion radius 0.5 but matches the 0.1 jump.
        let lying = JumpCounter::new(0.5, |_y: &[f64]| true).unwrap();
        assert_eq!(
            jump_measure(&path, &lying, 1.0),
            Err(LevyError::RegionTouchesOrigin)
        );
        assert!(JumpCounter::new(0.0, |_y: &[f64]| true).is_err());
    }

    #[test]
    fn intensity_of_poisson() {
        // ν̂({1}) for a rate-4 Poisson process over t = 0.5.
        let lambda = 4.0;
        let ens = Ensemble::generate_paths(7, 0, 4000, |rng| {
            sample_poisson_process(lambda, 0.5, rng)
        })
        .unwrap();
        let b = JumpCounter::annulus(0.5, 1.5).unwrap();
        let (nu_hat, se) = estimate_intensity(&ens, &b, 0.5).unwrap();
        assert!(
            stats::within_3se(nu_hat, lambda, se),
            "nu_hat={nu_hat} se={se}"
        );
    }

    #[test]
    fn cf_of_degenerate_ensemble() {
        let ens = Ensemble::generate_endpoints(1, 0, 100, 1, 1.0, |_rng, out| {
            out.push(0.0);
            Ok(())
        })
        .unwrap();
        let est = empirical_cf(&ens, &[alloc::vec![0.7], alloc::vec![2.0]]).unwrap();
        for (phi, se) in est.phi_hat.iter().zip(&est.stderr) {
            assert!((phi - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(*se < 1e-12);
        }
    }

    #[test]
    fn campbell_trivial_and_poisson() {
        // f ≡ 0: both sides 1 exactly.
        let f0 = StepFunction::new(alloc::vec![]).unwrap();
        let r = campbell_check(
            2.0,
            &jump_law_atom(alloc::vec![1.0]),
            |_c| Complex64::new(1.0, 0.0),
            &f0,
            200,
            3,
            0,
        )
        .unwrap();
        assert!((r.lhs - r.rhs).norm() < 1e-12 && (r.rhs - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        // f = ξ·1_{(0,1]}, μ = δ₁, λ = 2: rhs = exp(2(e^{iξ} − 1)).
        let xi = 0.9;
        let f = StepFunction::new(alloc::vec![(0.0, 1.0, xi)]).unwrap();
        let r = campbell_check(
            2.0,
            &jump_law_atom(alloc::vec![1.0]),
            |c| Complex64::new(0.0, c).exp(),
            &f,
            20_000,
            3,
            0,
        )
        .unwrap();
        let expect = (Complex64::new(0.0, xi).exp() - 1.0) * 2.0;
        assert!((r.rhs - expect.exp()).norm() < 1e-12);
        assert!(r.pass, "lhs={} rhs={} se={}", r.lhs, r.rhs, r.se);
    }

    #[test]
    fn campbell_two_steps_gaussian_jumps() {
        // f = 1_{(0,1]} − 1_{(1,2]}, μ = N(0,1): rhs from the Gaussian CF.
        let f = StepFunction::new(alloc::vec![(0.0, 1.0, 1.0), (1.0, 2.0, -1.0)]).unwrap();
        let r = campbell_check(
            1.0,
            &jump_law_std_normal(1),
            |c| Complex64::new(math::exp(-0.5 * c * c), 0.0),
            &f,
            20_000,
            11,
            0,
        )
        .unwrap();
        assert!(r.pass, "lhs={} rhs={} se={}", r.lhs, r.rhs, r.se);
    }

    #[test]
    fn independence_probe_single_time_is_exact() {
        let ens = Ensemble::generate_paths(5, 0, 500, |rng| {
            sample_poisson_process(1.0, 1.0, rng)
        })
        .unwrap();
        let rep = increment_independence_probe(&ens, &[1.0], &[alloc::vec![0.8]]).unwrap();
        assert!((rep.joint - rep.product).norm() < 1e-12);
        assert!(rep.pass);
    }
}
