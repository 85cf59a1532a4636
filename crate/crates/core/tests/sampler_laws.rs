//! Law-level checks of the path constructions against independent oracles:
//! Poisson/compound-Poisson marginals, Wald identities, the dyadic Brownian
//! construction, truncated Lévy–Itô marginals, moment/self-similarity
//! scaling and the series representation.

use std::sync::Arc;

use num_complex::Complex64;

use levytype_core::empirical::{empirical_cf, increment_independence_probe};
use levytype_core::levy::{LevyMeasureSpec, LevyTriplet, QuadSettings};
use levytype_core::linalg::SymMatrix;
use levytype_core::math;
use levytype_core::path::Ensemble;
use levytype_core::rng::RandomSource;
use levytype_core::sampler::{
    jump_law_atom, jump_law_rademacher, jump_law_std_normal, sample_brownian_levy,
    sample_compound_poisson, sample_poisson_process, sample_series, LevyItoSampler, SeriesKernel,
};
use levytype_core::stats;

fn settings() -> QuadSettings {
    QuadSettings::default()
}

#[test]
fn poisson_negligible_rate_stays_flat() {
    let mut rng = RandomSource::new(1, 0);
    let path = sample_poisson_process(1e-12, 1.0, &mut rng).unwrap();
    assert!(path.jumps.is_empty());
    assert_eq!(path.end(), &[0.0]);
}

#[test]
fn poisson_law_and_interarrivals() {
    let lambda = 2.0;
    let n = 30_000;
    let mut counts: Vec<(i64, u64)> = Vec::new();
    let mut gaps = Vec::new();
    for k in 0..n {
        let mut rng = RandomSource::new(2, k as u64);
        let path = sample_poisson_process(lambda, 1.0, &mut rng).unwrap();
        let c = path.jumps.len() as i64;
        match counts.iter_mut().find(|(k_, _)| *k_ == c) {
            Some((_, cnt)) => *cnt += 1,
            None => counts.push((c, 1)),
        }
        let mut prev = 0.0;
        for (t, _) in &path.jumps {
            gaps.push(t - prev);
            prev = *t;
        }
    }
    let tv = stats::tv_distance_discrete(&counts, n, |k| stats::poisson_pmf(lambda, k as u64), 0..40);
    assert!(tv < 0.02, "tv={tv}");
    // Inter-arrival mean 1/λ; censoring at T=1 biases late gaps, so compare
    // only against the first-gap law which is Exp(λ) exactly.
    let first: Vec<f64> = (0..n)
        .map(|k| {
            let mut rng = RandomSource::new(2, k as u64);
            rng.exponential(lambda)
        })
        .collect();
    let s = stats::summarize(&first);
    assert!(stats::within_3se(s.mean, 1.0 / lambda, s.stderr));
    assert!(!gaps.is_empty());
}

#[test]
fn compound_poisson_wald_identities() {
    // E C₁ = λT·E H = 0, V C₁ = λT·E H² = 1 for λ = 1, H ~ N(0,1), T = 1.
    let n = 30_000;
    let law = jump_law_std_normal(1);
    let mut ends = Vec::with_capacity(n);
    for k in 0..n {
        let mut rng = RandomSource::new(3, k as u64);
        let path = sample_compound_poisson(1.0, 1, &law, 1.0, &mut rng).unwrap();
        ends.push(path.end()[0]);
    }
    let s = stats::summarize(&ends);
    assert!(stats::within_3se(s.mean, 0.0, s.stderr), "mean={}", s.mean);
    // Var C₁ = 1; kurtosis of C₁ is finite, allow 4 normal-theory SEs.
    let se_var = s.var * math::sqrt(2.0 / (n as f64 - 1.0)) * 2.0;
    assert!((s.var - 1.0).abs() < 3.0 * se_var, "var={}", s.var);
}

#[test]
fn compound_poisson_rademacher_mixture_law() {
    // λ = 3, μ uniform on {−1,+1}, T = 2: C₂ follows the Poisson mixture of
    // Rademacher convolutions.
    let lambda = 3.0;
    let t = 2.0;
    let n = 30_000;
    let law = jump_law_rademacher();
    let mut counts: Vec<(i64, u64)> = Vec::new();
    for k in 0..n {
        let mut rng = RandomSource::new(4, k as u64);
        let path = sample_compound_poisson(lambda, 1, &law, t, &mut rng).unwrap();
        let c = path.end()[0].round() as i64;
        match counts.iter_mut().find(|(k_, _)| *k_ == c) {
            Some((_, cnt)) => *cnt += 1,
            None => counts.push((c, 1)),
        }
    }
    let tv = stats::tv_distance_discrete(
        &counts,
        n,
        |m| stats::compound_poisson_pmf(lambda * t, -1, &[0.5, 0.0, 0.5], m),
        -20..21,
    );
    assert!(tv < 0.025, "tv={tv}");
}

#[test]
fn compound_poisson_with_unit_atom_is_counting_process() {
    let law = jump_law_atom(vec![1.0]);
    let mut rng = RandomSource::new(5, 7);
    let path = sample_compound_poisson(2.0, 1, &law, 1.5, &mut rng).unwrap();
    // Unit jumps, values equal cumulative counts.
    for (i, _) in path.times.iter().enumerate() {
        let v = path.value(i)[0];
        assert_eq!(v, v.round());
    }
    for (_, d) in &path.jumps {
        assert_eq!(d[0], 1.0);
    }
}

#[test]
fn brownian_level_zero_and_midpoint_variance() {
    // levels = 0: W(0) = 0 and W(1) ~ N(0,1).
    let n = 20_000;
    let mut w1 = Vec::with_capacity(n);
    for k in 0..n {
        let mut rng = RandomSource::new(6, k as u64);
        let path = sample_brownian_levy(0, &mut rng).unwrap();
        assert_eq!(path.value(0)[0], 0.0);
        w1.push(path.end()[0]);
    }
    let s = stats::summarize(&w1);
    assert!(stats::within_3se(s.mean, 0.0, s.stderr));
    let se_var = math::sqrt(2.0 / (n as f64 - 1.0));
    assert!((s.var - 1.0).abs() < 3.0 * se_var, "var={}", s.var);

    // Midpoint displacement at refinement level n has variance 2^{−n}/4:
    // reconstruct Δ = W(mid) − ½(W(left)+W(right)) from level-3 paths.
    let levels = 3u32;
    for probe_level in 0..levels {
        let mut disp = Vec::new();
        for k in 0..6000 {
            let mut rng = RandomSource::new(7, k as u64);
            let path = sample_brownian_levy(levels, &mut rng).unwrap();
            let stride = 1usize << (levels - probe_level);
            let mut i = 0;
            while i + stride < path.len() {
                let mid = i + stride / 2;
                disp.push(path.value(mid)[0] - 0.5 * (path.value(i)[0] + path.value(i + stride)[0]));
                i += stride;
            }
        }
        let s = stats::summarize(&disp);
        let expect = math::powf(2.0, -(probe_level as f64)) / 4.0;
        let se_var = expect * math::sqrt(2.0 / (disp.len() as f64 - 1.0));
        assert!(
            (s.var - expect).abs() < 4.0 * se_var,
            "level {probe_level}: var={} expect={expect}",
            s.var
        );
    }
}

#[test]
fn brownian_dyadic_increments_are_iid_gaussian() {
    let levels = 6u32;
    let cell = math::powf(2.0, -(levels as f64));
    let mut incs = Vec::new();
    for k in 0..4000 {
        let mut rng = RandomSource::new(8, k as u64);
        let path = sample_brownian_levy(levels, &mut rng).unwrap();
        for i in 1..path.len() {
            incs.push(path.value(i)[0] - path.value(i - 1)[0]);
        }
    }
    let s = stats::summarize(&incs);
    assert!((s.var - cell).abs() < 0.02 * cell, "var={} cell={cell}", s.var);
    // KS against N(0, cell) at the 1% level.
    let sd = math::sqrt(cell);
    let mut sample: Vec<f64> = incs.iter().step_by(7).copied().collect();
    let d = stats::ks_statistic(&mut sample, |x| math::normal_cdf(x / sd));
    assert!(d < stats::ks_critical(sample.len(), 0.01), "d={d}");
}

#[test]
fn levy_ito_zero_measure_is_gaussian_with_drift() {
    // ν = 0: X_T ~ N(Tl, TQ).
    let t = LevyTriplet::new(
        vec![0.7],
        SymMatrix::diagonal(&[2.0]),
        LevyMeasureSpec::Zero,
    )
    .unwrap();
    let sampler = LevyItoSampler::new(&t, 0.5, &settings()).unwrap();
    assert_eq!(sampler.truncation_l2, 0.0);
    let horizon = 0.8;
    let n = 20_000;
    let mut ends = Vec::with_capacity(n);
    for k in 0..n {
        let mut rng = RandomSource::new(9, k as u64);
        let mut out = Vec::new();
        sampler.sample_endpoint(horizon, &mut rng, &mut out);
        ends.push(out[0]);
    }
    let s = stats::summarize(&ends);
    assert!(stats::within_3se(s.mean, 0.7 * horizon, s.stderr));
    let se_var = 2.0 * horizon * math::sqrt(2.0 / (n as f64 - 1.0));
    assert!((s.var - 2.0 * horizon).abs() < 3.0 * se_var);
    let sd = math::sqrt(2.0 * horizon);
    let mut sample: Vec<f64> = ends.iter().step_by(2).copied().collect();
    let d = stats::ks_statistic(&mut sample, |x| math::normal_cdf((x - 0.7 * horizon) / sd));
    assert!(d < stats::ks_critical(sample.len(), 0.01), "d={d}");
}

#[test]
fn levy_ito_atomic_cf_matches_exponent() {
    // FiniteAtomic ν supported on {|y| ≥ eps}: drift + compound Poisson;
    // the empirical CF at T = 1 matches e^{−ψ} within 3 SE pointwise.
    let t = LevyTriplet::new(
        vec![0.2],
        SymMatrix::zeros(1),
        LevyMeasureSpec::FiniteAtomic(vec![(vec![0.8], 1.0), (vec![-1.5], 0.5)]),
    )
    .unwrap();
    let sampler = LevyItoSampler::new(&t, 0.5, &settings()).unwrap();
    let n = 20_000;
    let ens = Ensemble::generate_endpoints(10, 0, n, 1, 1.0, |rng, out| {
        sampler.sample_endpoint(1.0, rng, out);
        Ok(())
    })
    .unwrap();
    let grid: Vec<Vec<f64>> = (1..=10).map(|k| vec![k as f64 * 0.3]).collect();
    let est = empirical_cf(&ens, &grid).unwrap();
    let ok = est.count_within_3se(|xi| {
        (-t.exponent(xi, &settings()).unwrap()).exp()
    });
    assert!(ok >= 9, "only {ok}/10 grid points within 3 SE");
}

#[test]
fn levy_ito_stable_cf_matches_truncated_exponent() {
    let t = LevyTriplet::symmetric_stable_1d(1.5).unwrap();
    let eps = 1e-2;
    let sampler = LevyItoSampler::new(&t, eps, &settings()).unwrap();
    // Truncation bound ∫_{|y|<eps}|y|²ν(dy) = 2·eps^{0.5}/0.5.
    let expect_l2 = 2.0 * math::powf(eps, 0.5) / 0.5;
    assert!((sampler.truncation_l2 - expect_l2).abs() < 1e-6 * expect_l2);
    let n = 4000;
    let ens = Ensemble::generate_endpoints(11, 0, n, 1, 1.0, |rng, out| {
        sampler.sample_endpoint(1.0, rng, out);
        Ok(())
    })
    .unwrap();
    let grid: Vec<Vec<f64>> = vec![vec![0.5], vec![1.0], vec![2.0], vec![3.0]];
    let est = empirical_cf(&ens, &grid).unwrap();
    let ok = est.count_within_3se(|xi| {
        (-t.exponent_truncated(eps, xi, &settings()).unwrap()).exp()
    });
    assert!(ok >= 3, "only {ok}/4 grid points within 3 SE");
}

#[test]
fn levy_ito_path_decomposition_identity() {
    // values = continuous + Σ ledger jumps, exactly, at every grid time.
    let t = LevyTriplet::new(
        vec![0.3],
        SymMatrix::diagonal(&[0.5]),
        LevyMeasureSpec::RadialDensity {
            density: Arc::new(|r: f64| r.powf(-2.2) * math::exp(-r)),
            angular: vec![(vec![1.0], 1.0), (vec![-1.0], 0.7)],
            witness_bound: 10.0,
        },
    )
    .unwrap();
    let sampler = LevyItoSampler::new(&t, 0.05, &settings()).unwrap();
    let mut rng = RandomSource::new(12, 3);
    let (path, parts) = sampler
        .sample_path_decomposed(&[0.1], 2.0, 1.0 / 64.0, &mut rng)
        .unwrap();
    for i in 0..path.len() {
        let t_i = path.times[i];
        let jump_sum: f64 = path.fold_jumps(t_i, 0.0, |acc, _, d| acc + d[0]);
        let recon = parts.continuous[i] + jump_sum;
        assert!(
            (path.value(i)[0] - recon).abs() < 1e-12,
            "i={i}: {} vs {recon}",
            path.value(i)[0]
        );
    }
}

#[test]
fn levy_ito_determinism_and_mass_overflow() {
    let t = LevyTriplet::symmetric_stable_1d(1.2).unwrap();
    let sampler = LevyItoSampler::new(&t, 0.05, &settings()).unwrap();
    let p1 = {
        let mut rng = RandomSource::new(13, 5);
        sampler.sample_path(&[0.0], 1.0, 0.125, &mut rng).unwrap()
    };
    let p2 = {
        let mut rng = RandomSource::new(13, 5);
        sampler.sample_path(&[0.0], 1.0, 0.125, &mut rng).unwrap()
    };
    assert_eq!(p1.times, p2.times);
    for i in 0..p1.len() {
        assert_eq!(p1.value(i), p2.value(i));
    }
    assert_eq!(p1.jumps.len(), p2.jumps.len());
    // Tiny budget rejects the measure.
    assert!(matches!(
        LevyItoSampler::with_budget(&t, 1e-4, &settings(), 100.0),
        Err(levytype_core::LevyError::MassOverflow { .. })
    ));
}

#[test]
fn stationary_increments_at_grid_level() {
    // Empirical CF of X_{t+s} − X_s is independent of s.
    let t = LevyTriplet::new(
        vec![0.0],
        SymMatrix::diagonal(&[0.3]),
        LevyMeasureSpec::FiniteAtomic(vec![(vec![1.0], 2.0)]),
    )
    .unwrap();
    let sampler = LevyItoSampler::new(&t, 0.5, &settings()).unwrap();
    let n = 20_000;
    let dt = 0.25;
    let xi = 1.2;
    let cf_at = |s_start: f64, seed: u64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let mut rng = RandomSource::new(seed, k as u64);
            let path = sampler
                .sample_path(&[0.0], s_start + dt, 0.125, &mut rng)
                .unwrap();
            let inc = path.value_at(s_start + dt)[0] - path.value_at(s_start)[0];
            acc += Complex64::new(math::cos(xi * inc), math::sin(xi * inc));
        }
        acc / n as f64
    };
    let a = cf_at(0.0, 14);
    let b = cf_at(0.5, 15);
    let se = math::sqrt((1.0 - a.norm_sqr()).max(0.0) / n as f64)
        + math::sqrt((1.0 - b.norm_sqr()).max(0.0) / n as f64);
    assert!((a - b).norm() <= 3.0 * se, "a={a} b={b}");
}

#[test]
fn moment_identities_scale_linearly_in_time() {
    // Compound Poisson with Gaussian jumps: E X_t = 0, V X_t = λt·E H² = t.
    let law = jump_law_std_normal(1);
    for &t in &[0.25, 0.5, 1.0] {
        let n = 20_000;
        let mut ends = Vec::with_capacity(n);
        for k in 0..n {
            let mut rng = RandomSource::new(16, k as u64);
            let path = sample_compound_poisson(1.0, 1, &law, t, &mut rng).unwrap();
            ends.push(path.end()[0]);
        }
        let s = stats::summarize(&ends);
        assert!(stats::within_3se(s.mean, 0.0, s.stderr), "t={t}");
        let se_var = t * math::sqrt(2.0 / (n as f64 - 1.0)) * 2.0;
        assert!((s.var - t).abs() < 3.0 * se_var, "t={t} var={}", s.var);
    }
}

#[test]
fn self_similarity_of_strictly_stable_samples() {
    // X_{2t} ~ 2^{1/α} X_t in CF, α = 1.5 symmetric stable (truncated).
    let alpha = 1.5;
    let t = LevyTriplet::symmetric_stable_1d(alpha).unwrap();
    let eps = 2e-3;
    let sampler = LevyItoSampler::new(&t, eps, &settings()).unwrap();
    let n = 4000;
    let scale = math::powf(2.0, 1.0 / alpha);
    let xi = 0.8;
    let cf = |t_end: f64, scaling: f64, seed: u64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let mut rng = RandomSource::new(seed, k as u64);
            let mut out = Vec::new();
            sampler.sample_endpoint(t_end, &mut rng, &mut out);
            let v = out[0] * scaling;
            acc += Complex64::new(math::cos(xi * v), math::sin(xi * v));
        }
        acc / n as f64
    };
    let a = cf(1.0, 1.0, 17);
    let b = cf(0.5, scale, 18);
    let se = 2.0 / math::sqrt(n as f64);
    assert!((a - b).norm() <= 3.0 * se, "a={a} b={b}");
}

#[test]
fn series_zero_terms_is_zero_path() {
    let kernel: SeriesKernel = Arc::new(|_r: f64, v: &[f64]| v.to_vec());
    let law = jump_law_std_normal(1);
    let mut rng = RandomSource::new(19, 0);
    let (path, gamma) = sample_series(&kernel, &law, None, 1, 0, 0.0, &mut rng).unwrap();
    assert_eq!(gamma, 0.0);
    assert_eq!(path.end(), &[0.0]);
    assert!(path.jumps.is_empty());
}

#[test]
fn series_thinning_reduces_to_compound_poisson() {
    // H(r, v) = v·1_{r ≤ λ}: the series is a compound Poisson(λ, μ) on [0,1].
    let lambda = 2.0;
    let kernel: SeriesKernel = Arc::new(move |r: f64, v: &[f64]| {
        if r <= lambda {
            v.to_vec()
        } else {
            vec![0.0]
        }
    });
    let law = jump_law_rademacher();
    let n = 30_000;
    let mut counts: Vec<(i64, u64)> = Vec::new();
    for k in 0..n {
        let mut rng = RandomSource::new(20, k as u64);
        let (path, _) = sample_series(&kernel, &law, None, 1, 64, lambda + 5.0, &mut rng).unwrap();
        let c = path.end()[0].round() as i64;
        match counts.iter_mut().find(|(k_, _)| *k_ == c) {
            Some((_, cnt)) => *cnt += 1,
            None => counts.push((c, 1)),
        }
    }
    let tv = stats::tv_distance_discrete(
        &counts,
        n,
        |m| stats::compound_poisson_pmf(lambda, -1, &[0.5, 0.0, 0.5], m),
        -15..16,
    );
    assert!(tv < 0.02, "tv={tv}");
}

#[test]
fn series_tail_not_resolved_error() {
    let kernel: SeriesKernel = Arc::new(|_r: f64, v: &[f64]| v.to_vec());
    let law = jump_law_std_normal(1);
    let mut rng = RandomSource::new(21, 0);
    assert!(matches!(
        sample_series(&kernel, &law, None, 1, 3, 1e6, &mut rng),
        Err(levytype_core::LevyError::TailNotResolved { .. })
    ));
}

#[test]
fn series_inverse_level_stable_cf() {
    // H(r, v) = v·r^{−1/α}, v uniform on {−1,1}: symmetric α-stable on [0,1].
    // The series exponent is ∫₀^∞(1 − cos(ξ r^{−1/α})) dr, which after the
    // substitution u = ξ r^{−1/α} becomes α|ξ|^α ∫₀^∞ (1−cos u) u^{−1−α} du;
    // the oracle evaluates that master integral by quadrature with an
    // integration-by-parts tail bound, independently of the sampler.
    let alpha = 0.8f64;
    let n_terms = 2000usize;
    let kernel: SeriesKernel = Arc::new(move |r: f64, v: &[f64]| {
        vec![v[0] * math::powf(r, -1.0 / alpha)]
    });
    let law = jump_law_rademacher();
    let n = 4000;
    // Master integral over [2^-30, A] plus the analytic tail A^{−α}/α
    // (oscillatory remainder ≤ 2A^{−1−α}).
    let a_cut = 32768.0f64;
    let mut master = 0.0;
    let mut lo = 2.0f64.powi(-30);
    while lo < a_cut {
        let hi = (lo * 2.0).min(a_cut);
        master += levytype_core::quad::integrate(
            |u| (1.0 - math::cos(u)) * math::powf(u, -1.0 - alpha),
            lo,
            hi,
            1e-10,
            ((hi - lo) as usize).max(200) + 200,
        )
        .unwrap();
        lo = hi;
    }
    master += math::powf(a_cut, -alpha) / alpha;
    for &xi in &[1.0f64, 3.0] {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let mut rng = RandomSource::new(22, k as u64 + (xi * 1000.0) as u64);
            let (path, _) = sample_series(&kernel, &law, None, 1, n_terms, 10.0, &mut rng).unwrap();
            let v = path.end()[0];
            acc += Complex64::new(math::cos(xi * v), math::sin(xi * v));
        }
        let phi = acc / n as f64;
        // Truncation at Γ_n removes ∫_{Γ_n}^∞(1−cos(ξ r^{−1/α}))dr ≈
        // ξ²·n^{1−2/α}/2, negligible at these parameters.
        let exponent = alpha * math::powf(xi, alpha) * master;
        let target = math::exp(-exponent);
        let se = math::sqrt((1.0 - phi.norm_sqr()).max(0.0) / n as f64);
        assert!(
            (phi - Complex64::new(target, 0.0)).norm() <= 3.0 * se.max(5e-3),
            "xi={xi} phi={phi} target={target}"
        );
    }
}

#[test]
fn independence_probe_on_levy_paths() {
    let t = LevyTriplet::brownian(1);
    let sampler = LevyItoSampler::new(&t, 0.5, &settings()).unwrap();
    let ens = Ensemble::generate_paths(23, 0, 20_000, |rng| {
        sampler.sample_path(&[0.0], 1.0, 0.25, rng)
    })
    .unwrap();
    let rep = increment_independence_probe(&ens, &[0.5, 1.0], &[vec![1.0], vec![1.0]]).unwrap();
    assert!(rep.pass, "joint={} product={}", rep.joint, rep.product);
}

#[test]
fn series_centers_vanish_for_symmetric_kernels_and_shift_asymmetric_ones() {
    let alpha = 0.8f64;
    let kernel: SeriesKernel = Arc::new(move |r: f64, v: &[f64]| {
        vec![v[0] * math::powf(r, -1.0 / alpha)]
    });
    let mut rng = RandomSource::new(24, 0);
    let sym = levytype_core::sampler::series_centers(
        &kernel,
        &jump_law_rademacher(),
        1,
        8,
        16,
        4000,
        &mut rng,
    )
    .unwrap();
    for c in &sym {
        assert!(c[0].abs() < 0.05, "symmetric center {c:?}");
    }
    // One-sided kernel: c_k ≈ ∫_{k-1}^{k} r^{−1/α} 1_{r^{−1/α} < 1} dr, which
    // is zero for r < 1 and the plain integral beyond r = 1.
    let one_sided: SeriesKernel =
        Arc::new(move |r: f64, _v: &[f64]| vec![math::powf(r, -1.0 / alpha)]);
    let mut rng = RandomSource::new(24, 1);
    let cs = levytype_core::sampler::series_centers(
        &one_sided,
        &jump_law_rademacher(),
        1,
        4,
        256,
        1,
        &mut rng,
    )
    .unwrap();
    for (k, c) in cs.iter().enumerate() {
        let (a, b) = (k as f64, k as f64 + 1.0);
        let expect = if b <= 1.0 {
            0.0
        } else {
            levytype_core::quad::integrate(
                |r| math::powf(r, -1.0 / alpha),
                a.max(1.0),
                b,
                1e-10,
                400,
            )
            .unwrap()
        };
        assert!((c[0] - expect).abs() < 2e-3, "k={k}: {} vs {expect}", c[0]);
    }
}

#[test]
fn levy_ito_annulus_count_is_poissonian() {
    // For a fixed annulus away from the truncation cutoff, the ensemble law
    // of N₁(B) is Poisson with mean ν(B) (TV < 0.02).
    let t = LevyTriplet::symmetric_stable_1d(1.5).unwrap();
    let sampler = LevyItoSampler::new(&t, 0.1, &settings()).unwrap();
    let region = levytype_core::empirical::JumpCounter::annulus(1.0, 3.0).unwrap();
    let n = 30_000;
    let mut hist: Vec<(i64, u64)> = Vec::new();
    for k in 0..n {
        let mut rng = RandomSource::new(25, k as u64);
        let path = sampler.sample_path(&[0.0], 1.0, 0.5, &mut rng).unwrap();
        let c = levytype_core::empirical::jump_measure(&path, &region, 1.0).unwrap() as i64;
        match hist.iter_mut().find(|(kk, _)| *kk == c) {
            Some((_, cnt)) => *cnt += 1,
            None => hist.push((c, 1)),
        }
    }
    let nu_b = 2.0 * (1.0 - math::powf(3.0, -1.5)) / 1.5;
    let tv = stats::tv_distance_discrete(&hist, n, |k| stats::poisson_pmf(nu_b, k as u64), 0..20);
    assert!(tv < 0.02, "tv={tv}");
}

#[test]
fn gaussian_jump_region_mean_matches_tail_oracle() {
    // Compound Poisson λ = 2, μ = N(0,1), B = {|y| > 0.5}: the mean of
    // N₁(B) is 2·2Φ(−0.5).
    let law = jump_law_std_normal(1);
    let region = levytype_core::empirical::JumpCounter::new(0.5, |y: &[f64]| y[0].abs() > 0.5)
        .unwrap();
    let n = 30_000;
    let mut counts = Vec::with_capacity(n);
    for k in 0..n {
        let mut rng = RandomSource::new(26, k as u64);
        let path = sample_compound_poisson(2.0, 1, &law, 1.0, &mut rng).unwrap();
        counts.push(levytype_core::empirical::jump_measure(&path, &region, 1.0).unwrap() as f64);
    }
    let s = stats::summarize(&counts);
    let oracle = 2.0 * 2.0 * math::normal_cdf(-0.5);
    assert!(
        stats::within_3se(s.mean, oracle, s.stderr),
        "mean {} vs {oracle}",
        s.mean
    );
}

#[test]
fn intensity_of_zero_measure_is_exactly_zero() {
    let t = LevyTriplet::brownian(1);
    let sampler = LevyItoSampler::new(&t, 0.5, &settings()).unwrap();
    let ens = Ensemble::generate_paths(27, 0, 50, |rng| {
        sampler.sample_path(&[0.0], 1.0, 0.25, rng)
    })
    .unwrap();
    let b = levytype_core::empirical::JumpCounter::annulus(0.5, 2.0).unwrap();
    let (nu_hat, se) = levytype_core::empirical::estimate_intensity(&ens, &b, 1.0).unwrap();
    assert_eq!(nu_hat, 0.0);
    assert_eq!(se, 0.0);
}

#[test]
fn independence_probe_compound_poisson() {
    let t = LevyTriplet::new(
        vec![0.0],
        SymMatrix::zeros(1),
        LevyMeasureSpec::FiniteAtomic(vec![(vec![1.0], 1.0)]),
    )
    .unwrap();
    let sampler = LevyItoSampler::new(&t, 0.5, &settings()).unwrap();
    let ens = Ensemble::generate_paths(28, 0, 20_000, |rng| {
        sampler.sample_path(&[0.0], 1.0, 0.25, rng)
    })
    .unwrap();
    let rep = increment_independence_probe(&ens, &[0.5, 1.0], &[vec![1.0], vec![1.0]]).unwrap();
    assert!(rep.pass, "joint={} product={}", rep.joint, rep.product);
}
