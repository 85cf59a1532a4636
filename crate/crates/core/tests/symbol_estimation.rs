//! Probabilistic symbol estimation against closed-form oracles, absorbing
//! states, exit-time brackets and the maximal-estimate companion check.

use std::sync::Arc;

use levytype_core::levy::{LevyMeasureSpec, LevyTriplet, QuadSettings};
use levytype_core::linalg::SymMatrix;
use levytype_core::math;
use levytype_core::symbol::{
    estimate_symbol, exceedance_frequency, maximal_bound, mean_exit_time, SdeSpec, StateSymbol,
    SymbolProcess,
};

fn settings() -> QuadSettings {
    QuadSettings::default()
}

#[test]
fn brownian_symbol_recovered() {
    // Lévy driver, ψ = ½ξ²: q̂ → ½ξ² within max(3 SE, 5%) after linear
    // extrapolation over the three-point grid.
    let process = SymbolProcess::Levy {
        triplet: LevyTriplet::brownian(1),
        eps: 0.5,
        grid_dt: 2.5e-4,
    };
    let xi = 1.5;
    let est = estimate_symbol(
        &process,
        &[0.0],
        &[xi],
        &[1e-2, 5e-3, 2.5e-3],
        2.0,
        30_000,
        41,
        0,
        &settings(),
    )
    .unwrap();
    let expect = 0.5 * xi * xi;
    let se = est.per_time.iter().map(|(_, _, s, _)| *s).fold(0.0f64, f64::max);
    let tol = (3.0 * se).max(0.05 * expect);
    assert!(
        (est.q_hat.re - expect).abs() < tol,
        "q_hat={} expect={expect} tol={tol}",
        est.q_hat
    );
    assert!(est.q_hat.im.abs() < tol);
}

#[test]
fn absorbing_start_gives_zero_symbol() {
    // Φ(x₀) = 0 at the start: the state never moves, q̂ = 0.
    let spec = SdeSpec {
        dim_state: 1,
        dim_driver: 1,
        phi: Arc::new(|x: &[f64]| vec![x[0]]), // Φ(0) = 0
        lipschitz: 1.0,
        driver: LevyTriplet::brownian(1),
        x0: vec![0.0],
    };
    let process = SymbolProcess::Sde {
        spec,
        eps: 0.5,
        grid_dt: 1e-3,
    };
    let est = estimate_symbol(
        &process,
        &[0.0],
        &[2.0],
        &[1e-2, 5e-3, 2.5e-3],
        1.0,
        2000,
        42,
        0,
        &settings(),
    )
    .unwrap();
    assert!(est.q_hat.norm() < 1e-9, "q_hat={}", est.q_hat);
}

#[test]
fn sde_symbol_estimate_matches_formula() {
    // dX = (2 + sin X) dL with symmetric Cauchy L: q(x,ξ) = (2+sin x)|ξ|.
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
        x0: vec![0.3],
    };
    let process = SymbolProcess::Sde {
        spec,
        eps: 1e-3,
        grid_dt: 5e-4,
    };
    let (x, xi) = (0.3, 1.5);
    let est = estimate_symbol(
        &process,
        &[x],
        &[xi],
        &[1e-2, 5e-3, 2.5e-3],
        3.0,
        30_000,
        43,
        0,
        &settings(),
    )
    .unwrap();
    let expect = (2.0 + math::sin(x)) * xi;
    assert!(
        (est.q_hat.re - expect).abs() < 0.10 * expect,
        "q_hat={} expect={expect}",
        est.q_hat
    );
}

#[test]
fn exit_dominates_error_for_tiny_ball() {
    let process = SymbolProcess::Levy {
        triplet: LevyTriplet::brownian(1),
        eps: 0.5,
        grid_dt: 1e-4,
    };
    let err = estimate_symbol(
        &process,
        &[0.0],
        &[1.0],
        &[1e-2, 5e-3, 2.5e-3],
        1e-3,
        500,
        44,
        0,
        &settings(),
    );
    assert!(matches!(
        err,
        Err(levytype_core::LevyError::ExitDominates { .. })
    ));
}

#[test]
fn brownian_exit_time_and_scaling() {
    // 1-d Brownian from the centre of B_r: E τ = r², bracket contains it.
    let q = StateSymbol::levy(LevyTriplet::brownian(1), settings());
    for &r in &[0.5f64, 1.0, 2.0] {
        let process = SymbolProcess::Levy {
            triplet: LevyTriplet::brownian(1),
            eps: 0.5,
            grid_dt: r * r / 2048.0,
        };
        let report = mean_exit_time(
            &process,
            &q,
            &[0.0],
            r,
            60.0 * r * r,
            4000,
            45,
            0,
            &settings(),
        )
        .unwrap();
        // Grid detection biases τ upward by O(dt + √dt·r) — allow 3 SE + 2%.
        let expect = r * r;
        assert!(
            (report.e_tau - expect).abs() < 3.0 * report.stderr + 0.02 * expect,
            "r={r}: e_tau={} expect={expect} se={}",
            report.e_tau,
            report.stderr
        );
        assert!(
            report.bracket.0 <= report.e_tau && report.e_tau <= report.bracket.1,
            "r={r}: bracket {:?} misses {}",
            report.bracket,
            report.e_tau
        );
    }
}

#[test]
fn stable_exit_time_bracket() {
    let alpha = 1.5;
    let triplet = LevyTriplet::symmetric_stable_1d(alpha).unwrap();
    // Symbol oracle: the closed-form symmetric stable exponent of the same
    // measure is 2c_α|ξ|^α; use the quadrature-backed symbol directly.
    let q = StateSymbol::levy(triplet.clone(), settings());
    let process = SymbolProcess::Levy {
        triplet,
        eps: 0.02,
        grid_dt: 1.0 / 256.0,
    };
    let report = mean_exit_time(&process, &q, &[0.0], 1.0, 30.0, 2000, 46, 0, &settings()).unwrap();
    assert!(
        report.bracket.0 <= report.e_tau && report.e_tau <= report.bracket.1,
        "bracket {:?} misses {}",
        report.bracket,
        report.e_tau
    );
}

#[test]
fn maximal_bound_dominates_exceedance() {
    // Brownian, x = 0, r = 1, t = 0.01: the bound is far above the (≈ 0)
    // exceedance frequency; and a wider scan keeps the ordering.
    let q = StateSymbol::levy(LevyTriplet::brownian(1), settings());
    let process = SymbolProcess::Levy {
        triplet: LevyTriplet::brownian(1),
        eps: 0.5,
        grid_dt: 5e-4,
    };
    for &(r, t) in &[(1.0, 0.01), (0.5, 0.02), (2.0, 0.05)] {
        let bound = maximal_bound(&q, &[0.0], r, t).unwrap();
        let freq = exceedance_frequency(&process, &[0.0], r, t, 2000, 47, 0, &settings()).unwrap();
        let slack = 3.0 * math::sqrt(freq.max(1e-4) / 2000.0);
        assert!(freq <= bound + slack, "r={r} t={t}: freq={freq} bound={bound}");
    }
}

#[test]
fn sde_identity_coefficient_is_euler_maruyama() {
    // Φ = I with a Brownian driver: X_T ~ N(x₀, T); KS at the 1% level.
    let spec = SdeSpec {
        dim_state: 1,
        dim_driver: 1,
        phi: Arc::new(|_x: &[f64]| vec![1.0]),
        lipschitz: 0.0,
        driver: LevyTriplet::brownian(1),
        x0: vec![0.4],
    };
    let n = 10_000;
    let mut ends: Vec<f64> = (0..n)
        .map(|k| {
            let mut rng = levytype_core::rng::RandomSource::new(48, k as u64);
            let path =
                levytype_core::symbol::sde_euler(&spec, 0.5, 1.0 / 64.0, 1.0, &mut rng, &settings())
                    .unwrap();
            path.end()[0]
        })
        .collect();
    let d = levytype_core::stats::ks_statistic(&mut ends, |x| {
        levytype_core::math::normal_cdf(x - 0.4)
    });
    assert!(d < levytype_core::stats::ks_critical(n, 0.01), "d={d}");
}

#[test]
fn sde_bounded_coefficient_never_blows_up() {
    // Φ(x) = (1+x²)^{−1/2} with an α = 1.5 driver: |ΔX| ≤ |ΔL| keeps the
    // state finite; endpoint CF is finite and smooth in ξ.
    let spec = SdeSpec {
        dim_state: 1,
        dim_driver: 1,
        phi: Arc::new(|x: &[f64]| vec![1.0 / (1.0 + x[0] * x[0]).sqrt()]),
        lipschitz: 1.0,
        driver: LevyTriplet::symmetric_stable_1d(1.5).unwrap(),
        x0: vec![0.0],
    };
    let n = 2000;
    let driver = levytype_core::sampler::LevyItoSampler::new(&spec.driver, 0.02, &settings()).unwrap();
    let mut ends = Vec::with_capacity(n);
    for k in 0..n {
        let mut rng = levytype_core::rng::RandomSource::new(49, k as u64);
        let path = levytype_core::symbol::sde_euler_with(&spec, &driver, 1.0 / 64.0, 1.0, &mut rng)
            .expect("no blow-up");
        ends.push(path.end()[0]);
    }
    // Empirical CF magnitudes are finite and vary smoothly on a ξ grid
    // (steps of 0.2 change |φ| by at most the continuity modulus of a
    // heavy-tailed-but-proper law plus Monte Carlo noise).
    let mut prev: Option<f64> = None;
    for j in 0..=20 {
        let xi = j as f64 * 0.2;
        let (phi, _, _) = levytype_core::stats::cf_point(ends.iter().map(|v| v * xi));
        assert!(phi.norm() <= 1.0 + 1e-12);
        assert!(phi.norm().is_finite());
        if let Some(p) = prev {
            assert!((phi.norm() - p).abs() < 0.3, "jumpy CF at xi={xi}");
        }
        prev = Some(phi.norm());
    }
}
