//! Command implementations behind the CLI surface. Each command reads its
//! config record, runs the computation with stream-partitioned workers,
//! writes CSV/JSON artifacts plus a manifest, and reports an outcome that
//! the binary maps to an exit code.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use levytype_core::empirical::{campbell_check, empirical_cf, StepFunction};
use levytype_core::levy::{LevyMeasureSpec, LevyTriplet, QuadSettings};
use levytype_core::path::Ensemble;
use levytype_core::rng::RandomSource;
use levytype_core::rom::{
    integrate_l2, lower_to_simple, simple_l2_norm, L2Integrand, MartingaleKind,
    RandomOrthogonalMeasure,
};
use levytype_core::sampler::{
    sample_brownian_levy, sample_compound_poisson, sample_poisson_process, sample_series,
    LevyItoSampler, SeriesKernel,
};
use levytype_core::semigroup::{
    chapman_kolmogorov_check, dynkin_check, exponential_martingale_check, LevyMarkovSampler,
    TestFunction,
};
use levytype_core::symbol::{
    estimate_symbol, indices_at_infinity, maximal_bound, mean_exit_time, sde_symbol,
    SymbolProcess,
};
use levytype_core::{stats, LevyError};

use crate::config::*;
use crate::output::{RunDir, TableFormat};
use crate::par;

/// Outcome of a command: checks either all passed, or at least one failed
/// (exit 1), distinct from hard errors (exit 2/3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Outcome {
    Pass,
    CheckFailed,
}

pub fn settings() -> QuadSettings {
    QuadSettings::default()
}

// ---------------------------------------------------------------------------
// exponent
// ---------------------------------------------------------------------------

pub fn cmd_exponent(
    cfg: &ExponentConfig,
    seed: u64,
    out: &Path,
    format: TableFormat,
    plot: bool,
) -> Result<Outcome, AnyError> {
    let triplet = cfg.triplet.build()?;
    if cfg.points < 2 {
        return Err(Box::new(LevyError::Unsupported("need at least 2 grid points")));
    }
    let run = RunDir::create(out)?;
    let d = triplet.dim();
    let s = settings();
    let mut header: Vec<String> = (1..=d).map(|k| format!("xi_{k}")).collect();
    header.push("re_psi".into());
    header.push("im_psi".into());
    if cfg.eps.is_some() {
        header.push("re_psi_eps".into());
        header.push("im_psi_eps".into());
    }
    let mut rows = Vec::with_capacity(cfg.points);
    let mut xs = Vec::with_capacity(cfg.points);
    let mut re = Vec::with_capacity(cfg.points);
    let mut im = Vec::with_capacity(cfg.points);
    for i in 0..cfg.points {
        let x = -cfg.xi_max + 2.0 * cfg.xi_max * i as f64 / (cfg.points - 1) as f64;
        // Sweep along the first axis; remaining components zero.
        let mut xi = vec![0.0; d];
        xi[0] = x;
        let psi = triplet.exponent(&xi, &s)?;
        let mut row = xi.clone();
        row.push(psi.re);
        row.push(psi.im);
        if let Some(eps) = cfg.eps {
            let pe = triplet.exponent_truncated(eps, &xi, &s)?;
            row.push(pe.re);
            row.push(pe.im);
        }
        rows.push(row);
        xs.push(x);
        re.push(psi.re);
        im.push(psi.im);
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    run.write_table("exponent", &header_refs, &rows, format)?;
    if plot {
        run.write_svg(
            "exponent.svg",
            "characteristic exponent",
            &xs,
            &[("re_psi", &re), ("im_psi", &im)],
        )?;
    }
    run.write_manifest("exponent", cfg, seed, (0, 0))?;
    Ok(Outcome::Pass)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn write_path(
    run: &RunDir,
    idx: usize,
    path: &levytype_core::path::CadlagPath,
    format: TableFormat,
    plot: bool,
) -> Result<(), AnyError> {
    let mut header: Vec<String> = vec!["t".into()];
    for k in 1..=path.dim {
        header.push(format!("x_{k}"));
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let rows: Vec<Vec<f64>> = (0..path.len())
        .map(|i| {
            let mut row = vec![path.times[i]];
            row.extend_from_slice(path.value(i));
            row
        })
        .collect();
    run.write_table(&format!("path_{idx}"), &header_refs, &rows, format)?;
    let ledger: Vec<serde_json::Value> = path
        .jumps
        .iter()
        .map(|(t, d)| json!({"t": t, "delta": d}))
        .collect();
    run.write_json(&format!("jumps_{idx}.json"), &ledger)?;
    if plot && path.dim == 1 {
        let ys: Vec<f64> = (0..path.len()).map(|i| path.value(i)[0]).collect();
        run.write_svg(
            &format!("path_{idx}.svg"),
            "sample path",
            &path.times,
            &[("x", &ys)],
        )?;
    }
    Ok(())
}

pub fn cmd_simulate(
    method: &str,
    cfg: &SimulateConfig,
    seed: u64,
    out: &Path,
    format: TableFormat,
    plot: bool,
) -> Result<Outcome, AnyError> {
    let run = RunDir::create(out)?;
    let n = cfg.paths.max(1);
    let mut extra = serde_json::Map::new();
    match method {
        "poisson" => {
            let lambda = cfg.lambda.ok_or(LevyError::Unsupported("poisson needs lambda"))?;
            for k in 0..n {
                let mut rng = RandomSource::new(seed, k as u64);
                let path = sample_poisson_process(lambda, cfg.horizon, &mut rng)?;
                write_path(&run, k, &path, format, plot)?;
            }
        }
        "cpp" => {
            let lambda = cfg.lambda.ok_or(LevyError::Unsupported("cpp needs lambda"))?;
            let law_cfg = cfg
                .jump_law
                .clone()
                .ok_or(LevyError::Unsupported("cpp needs jump_law"))?;
            let law = law_cfg.build();
            for k in 0..n {
                let mut rng = RandomSource::new(seed, k as u64);
                let path =
                    sample_compound_poisson(lambda, law_cfg.dim(), &law, cfg.horizon, &mut rng)?;
                write_path(&run, k, &path, format, plot)?;
            }
        }
        "bm-levy" => {
            let levels = cfg.levels.unwrap_or(10);
            for k in 0..n {
                let mut rng = RandomSource::new(seed, k as u64);
                let path = sample_brownian_levy(levels, &mut rng)?;
                write_path(&run, k, &path, format, plot)?;
            }
        }
        "levy-ito" => {
            let triplet = cfg
                .triplet
                .as_ref()
                .ok_or(LevyError::Unsupported("levy-ito needs a triplet"))?
                .build()?;
            let sampler = LevyItoSampler::new(&triplet, cfg.eps, &settings())?;
            let x0 = vec![0.0; triplet.dim()];
            for k in 0..n {
                let mut rng = RandomSource::new(seed, k as u64);
                let path = sampler.sample_path(&x0, cfg.horizon, cfg.grid_dt, &mut rng)?;
                write_path(&run, k, &path, format, plot)?;
            }
            extra.insert("truncation_l2_bound".into(), json!(sampler.truncation_l2));
            extra.insert("eps".into(), json!(cfg.eps));
        }
        "series" => {
            let series = cfg
                .series
                .as_ref()
                .ok_or(LevyError::Unsupported("series needs series config"))?;
            let (kernel, v_law, n_terms): (SeriesKernel, _, usize) = match series.clone() {
                SeriesConfig::InverseLevel { alpha, v_law, n_terms } => {
                    if !(alpha > 0.0 && alpha < 2.0) {
                        return Err(Box::new(LevyError::InvalidAlpha(alpha)));
                    }
                    (
                        std::sync::Arc::new(move |r: f64, v: &[f64]| {
                            v.iter().map(|vi| vi * r.powf(-1.0 / alpha)).collect()
                        }),
                        v_law,
                        n_terms,
                    )
                }
                SeriesConfig::Thinning { lambda, v_law, n_terms } => (
                    std::sync::Arc::new(move |r: f64, v: &[f64]| {
                        if r <= lambda {
                            v.to_vec()
                        } else {
                            vec![0.0; v.len()]
                        }
                    }),
                    v_law,
                    n_terms,
                ),
            };
            let law = v_law.build();
            let dim = v_law.dim();
            let mut gamma_last = 0.0;
            for k in 0..n {
                let mut rng = RandomSource::new(seed, k as u64);
                let (path, gamma) =
                    sample_series(&kernel, &law, None, dim, n_terms, 0.0, &mut rng)?;
                gamma_last = gamma;
                write_path(&run, k, &path, format, plot)?;
            }
            extra.insert("tail_level_reached".into(), json!(gamma_last));
        }
        "sde" => {
            let sde_cfg = cfg
                .sde
                .as_ref()
                .ok_or(LevyError::Unsupported("sde needs sde config"))?;
            let spec = sde_cfg.build()?; // Lipschitz validation happens here
            let driver = LevyItoSampler::new(&spec.driver, cfg.eps, &settings())?;
            for k in 0..n {
                let mut rng = RandomSource::new(seed, k as u64);
                let path = levytype_core::symbol::sde_euler_with(
                    &spec,
                    &driver,
                    cfg.grid_dt,
                    cfg.horizon,
                    &mut rng,
                )?;
                write_path(&run, k, &path, format, plot)?;
            }
            extra.insert("truncation_l2_bound".into(), json!(driver.truncation_l2));
        }
        _ => return Err(Box::new(LevyError::Unsupported("unknown simulate method"))),
    }
    #[derive(Serialize)]
    struct SimManifest<'a> {
        method: &'a str,
        config: &'a SimulateConfig,
        extra: serde_json::Map<String, serde_json::Value>,
    }
    run.write_manifest(
        "simulate",
        &SimManifest {
            method,
            config: cfg,
            extra,
        },
        seed,
        (0, n as u64),
    )?;
    Ok(Outcome::Pass)
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SuiteReport {
    suite: String,
    cases: Vec<serde_json::Value>,
    pass: bool,
}

pub fn cmd_validate(
    suite: &str,
    cfg: &ValidateConfig,
    seed: u64,
    out: &Path,
) -> Result<Outcome, AnyError> {
    let run = RunDir::create(out)?;
    let n = cfg.samples;
    if n == 0 {
        return Err(Box::new(LevyError::EmptyEnsemble));
    }
    let s = settings();
    let mut cases = Vec::new();
    let mut all_pass = true;
    match suite {
        "cf" => {
            let triplet = match &cfg.triplet {
                Some(t) => t.build()?,
                None => LevyTriplet::brownian(1),
            };
            let sampler = LevyItoSampler::new(&triplet, cfg.eps, &s)?;
            let d = triplet.dim();
            let ends = par::par_map(n, |k| {
                let mut rng = RandomSource::new(seed, k as u64);
                let mut out = Vec::with_capacity(d);
                sampler.sample_endpoint(1.0, &mut rng, &mut out);
                out
            });
            let mut flat = Vec::with_capacity(n * d);
            for e in ends {
                flat.extend(e);
            }
            let ens = Ensemble {
                seed,
                stream_lo: 0,
                data: levytype_core::path::EnsembleData::Endpoints {
                    dim: d,
                    t: 1.0,
                    data: flat,
                },
            };
            let grid: Vec<Vec<f64>> = (0..25)
                .map(|i| {
                    let mut xi = vec![0.0; d];
                    xi[0] = -3.0 + 6.0 * i as f64 / 24.0;
                    xi
                })
                .collect();
            let est = empirical_cf(&ens, &grid)?;
            let ok = est.count_within_3se(|xi| {
                (-triplet
                    .exponent_truncated(cfg.eps, xi, &s)
                    .unwrap_or(Complex64::new(f64::NAN, 0.0)))
                .exp()
            });
            let pass = ok * 100 >= est.xi_grid.len() * 95;
            all_pass &= pass;
            let cf_rows: Vec<Vec<f64>> = est
                .xi_grid
                .iter()
                .zip(est.phi_hat.iter().zip(&est.stderr))
                .map(|(xi, (phi, se))| {
                    let mut row = xi.clone();
                    row.push(phi.re);
                    row.push(phi.im);
                    row.push(*se);
                    row
                })
                .collect();
            let mut cf_header: Vec<String> = (1..=d).map(|k| format!("xi_{k}")).collect();
            cf_header.extend(["re", "im", "se"].iter().map(|s| s.to_string()));
            let cf_refs: Vec<&str> = cf_header.iter().map(|s| s.as_str()).collect();
            run.write_csv("cf.csv", &cf_refs, &cf_rows)?;
            cases.push(json!({
                "name": "cf_round_trip",
                "within_3se": ok,
                "points": est.xi_grid.len(),
                "n": n,
                "pass": pass,
            }));
        }
        "campbell" => {
            let f1 = StepFunction::new(vec![(0.0, 1.0, 0.9)])?;
            let r1 = campbell_check(
                2.0,
                &levytype_core::sampler::jump_law_atom(vec![1.0]),
                |c| Complex64::new(0.0, c).exp(),
                &f1,
                n,
                seed,
                0,
            )?;
            all_pass &= r1.pass;
            cases.push(json!({
                "name": "poisson_step",
                "lhs": [r1.lhs.re, r1.lhs.im],
                "rhs": [r1.rhs.re, r1.rhs.im],
                "se": r1.se, "pass": r1.pass,
            }));
            let f2 = StepFunction::new(vec![(0.0, 1.0, 1.0), (1.0, 2.0, -1.0)])?;
            let r2 = campbell_check(
                1.0,
                &levytype_core::sampler::jump_law_std_normal(1),
                |c| Complex64::new((-0.5 * c * c).exp(), 0.0),
                &f2,
                n,
                seed,
                n as u64,
            )?;
            all_pass &= r2.pass;
            cases.push(json!({
                "name": "gaussian_two_step",
                "lhs": [r2.lhs.re, r2.lhs.im],
                "rhs": [r2.rhs.re, r2.rhs.im],
                "se": r2.se, "pass": r2.pass,
            }));
        }
        "isometry" => {
            // White noise with f(s) = s.
            let backend = RandomOrthogonalMeasure::WhiteNoise {
                horizon: 1.0,
                grid_dt: 1.0 / 1024.0,
            };
            let integrand = L2Integrand::Time(std::sync::Arc::new(|t: f64| t));
            let (simple, _cert) = lower_to_simple(&integrand, &backend, 9)?;
            let prepared = backend.prepare()?;
            let compiled = prepared.compile(&simple)?;
            let sq = par::par_map(n, |k| {
                let mut rng = RandomSource::new(seed, k as u64);
                let replay = prepared.replay(&mut rng).unwrap();
                let v = prepared.integrate_compiled(&compiled, &replay).unwrap();
                v * v
            });
            let sm = stats::summarize(&sq);
            let control = simple_l2_norm(&simple, &backend)?;
            let ratio = sm.mean / control;
            let pass = (0.98..=1.02).contains(&ratio)
                || stats::within_3se(sm.mean, control, sm.stderr);
            all_pass &= pass;
            cases.push(json!({
                "name": "white_noise_linear",
                "functional": "f(s)=s on (0,1]",
                "mc_moment": sm.mean, "control_integral": control,
                "se": sm.stderr, "ratio": ratio, "pass": pass,
            }));
            // One isometry draw through the certified L² path.
            let mut rng = RandomSource::new(seed, n as u64);
            let (_v, cert) = integrate_l2(&integrand, &backend, 9, &mut rng)?;
            cases.push(json!({"name": "l2_certificate", "certificate": cert}));
            // Poisson martingale noise.
            let pm = RandomOrthogonalMeasure::martingale(
                MartingaleKind::CompensatedPoisson { lambda: 2.0 },
                1.0,
            );
            let fm = levytype_core::rom::SimpleFunction {
                terms: vec![(
                    1.0,
                    levytype_core::rom::SemiringSet::time(0.0, 1.0)?,
                )],
            };
            let prepared_pm = pm.prepare()?;
            let compiled_pm = prepared_pm.compile(&fm)?;
            let sq2 = par::par_map(n, |k| {
                let mut rng = RandomSource::new(seed.wrapping_add(1), k as u64);
                let replay = prepared_pm.replay(&mut rng).unwrap();
                let v = prepared_pm.integrate_compiled(&compiled_pm, &replay).unwrap();
                v * v
            });
            let sm2 = stats::summarize(&sq2);
            let control2 = simple_l2_norm(&fm, &pm)?;
            let pass2 = stats::within_3se(sm2.mean, control2, sm2.stderr);
            all_pass &= pass2;
            cases.push(json!({
                "name": "poisson_martingale_indicator",
                "mc_moment": sm2.mean, "control_integral": control2,
                "se": sm2.stderr, "pass": pass2,
            }));
            // Compensated Poisson measure: f(s,y) = y on a stable annulus.
            let cp = RandomOrthogonalMeasure::compensated_poisson(
                LevyMeasureSpec::RadialDensity {
                    density: std::sync::Arc::new(|r: f64| r.powf(-2.5)),
                    angular: vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
                    witness_bound: 2.0 * (1.0 / 0.5 + 1.0 / 1.5) + 0.1,
                },
                0.25,
                1.0,
            );
            let f_st = L2Integrand::SpaceTime {
                f: std::sync::Arc::new(|_s: f64, y: &[f64]| y[0]),
                lo: 0.5,
                hi: 1.0,
            };
            let (simple_c, _) = lower_to_simple(&f_st, &cp, 5)?;
            let prepared_cp = cp.prepare()?;
            let compiled_cp = prepared_cp.compile(&simple_c)?;
            let sq3 = par::par_map(n, |k| {
                let mut rng = RandomSource::new(seed.wrapping_add(2), k as u64);
                let replay = prepared_cp.replay(&mut rng).unwrap();
                let v = prepared_cp.integrate_compiled(&compiled_cp, &replay).unwrap();
                v * v
            });
            let sm3 = stats::summarize(&sq3);
            let control3 = simple_l2_norm(&simple_c, &cp)?;
            let ratio3 = sm3.mean / control3;
            let pass3 = (0.98..=1.02).contains(&ratio3)
                || stats::within_3se(sm3.mean, control3, sm3.stderr);
            all_pass &= pass3;
            cases.push(json!({
                "name": "stable_annulus_spacetime",
                "functional": "f(s,y)=y on 0.5<=|y|<1",
                "mc_moment": sm3.mean, "control_integral": control3,
                "se": sm3.stderr, "ratio": ratio3, "pass": pass3,
            }));
        }
        "dynkin" => {
            let sampler = LevyMarkovSampler::new(LevyTriplet::brownian(1), 0.5, 1.0 / 512.0, &s)?;
            let f = TestFunction::gaussian(1, 1.0, 0.3, vec![0.0])?;
            // Operator sweep over a grid: Fourier vs integro-differential form.
            let psi = sampler.triplet.characteristic_exponent(s);
            let mut sweep = Vec::new();
            for k in -12..=12 {
                let x = k as f64 * 0.25;
                let four = levytype_core::semigroup::generator_fourier(&psi, &f, &[x])?;
                let integro =
                    levytype_core::semigroup::generator_integro(&sampler.triplet, &f, &[x], &s)?;
                sweep.push(vec![x, four, integro, four - integro]);
            }
            run.write_csv(
                "operator_sweep.csv",
                &["x", "Af_fourier", "Af_integro", "diff"],
                &sweep,
            )?;
            let rep = dynkin_check(&sampler, &f, &[0.0], 1.0, 30.0, n, seed, 0, &s)?;
            all_pass &= rep.pass;
            cases.push(json!({
                "name": "brownian_exit_ball",
                "lhs": rep.lhs, "lhs_se": rep.lhs_se,
                "rhs": rep.rhs, "rhs_se": rep.rhs_se,
                "mean_exit": rep.mean_exit, "pass": rep.pass,
            }));
        }
        "martingale" => {
            let sampler = LevyMarkovSampler::new(LevyTriplet::brownian(1), 0.5, 0.125, &s)?;
            let rep = exponential_martingale_check(
                &sampler,
                1.0,
                &[0.0, 0.25, 0.5, 0.75, 1.0],
                n,
                seed,
                0,
                &s,
            )?;
            all_pass &= rep.pass;
            cases.push(json!({
                "name": "brownian_exponential_martingale",
                "worst_sigma": rep.worst_sigma, "pass": rep.pass,
            }));
        }
        "ck" => {
            let sampler = LevyMarkovSampler::new(LevyTriplet::brownian(1), 0.5, 0.125, &s)?;
            let f = TestFunction::gaussian(1, 1.0, 0.5, vec![0.0])?;
            let rep = chapman_kolmogorov_check(
                &sampler,
                &f,
                &[0.0],
                0.5,
                0.5,
                (n / 100).max(100),
                100,
                seed,
                0,
            )?;
            all_pass &= rep.pass;
            cases.push(json!({
                "name": "brownian_restart",
                "direct": rep.direct, "direct_se": rep.direct_se,
                "nested": rep.nested, "nested_se": rep.nested_se,
                "pass": rep.pass,
            }));
        }
        _ => {
            return Err(Box::new(LevyError::Unsupported("unknown validation suite")));
        }
    }
    let report = SuiteReport {
        suite: suite.to_string(),
        cases,
        pass: all_pass,
    };
    run.write_json("report.json", &report)?;
    run.write_manifest("validate", cfg, seed, (0, n as u64))?;
    Ok(if all_pass { Outcome::Pass } else { Outcome::CheckFailed })
}

// ---------------------------------------------------------------------------
// symbol
// ---------------------------------------------------------------------------

pub fn cmd_symbol(
    cfg: &SymbolCmdConfig,
    seed: u64,
    out: &Path,
    format: TableFormat,
    plot: bool,
) -> Result<Outcome, AnyError> {
    let run = RunDir::create(out)?;
    let s = settings();
    let (process, formula): (SymbolProcess, Box<dyn Fn(&[f64], &[f64]) -> Complex64>) =
        match (&cfg.triplet, &cfg.sde) {
            (Some(t), None) => {
                let triplet = t.build()?;
                let t2 = triplet.clone();
                (
                    SymbolProcess::Levy {
                        triplet,
                        eps: cfg.eps,
                        grid_dt: cfg.grid_dt,
                    },
                    Box::new(move |_x, xi| t2.exponent(xi, &s).unwrap_or(Complex64::new(f64::NAN, 0.0))),
                )
            }
            (None, Some(sde)) => {
                let spec = sde.build()?;
                let spec2 = spec.clone();
                (
                    SymbolProcess::Sde {
                        spec,
                        eps: cfg.eps,
                        grid_dt: cfg.grid_dt,
                    },
                    Box::new(move |x, xi| {
                        sde_symbol(&spec2, x, xi, &s).unwrap_or(Complex64::new(f64::NAN, 0.0))
                    }),
                )
            }
            _ => {
                return Err(Box::new(LevyError::Unsupported(
                    "symbol command needs exactly one of triplet or sde",
                )))
            }
        };
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    for xi in &cfg.xi {
        let est = estimate_symbol(
            &process,
            &cfg.x,
            xi,
            &cfg.t_grid,
            cfg.radius,
            cfg.samples,
            seed,
            0,
            &s,
        )?;
        let reference = formula(&cfg.x, xi);
        let mut row = cfg.x.clone();
        row.extend_from_slice(xi);
        row.push(reference.re);
        row.push(reference.im);
        row.push(est.q_hat.re);
        row.push(est.q_hat.im);
        row.push(est.per_time.iter().map(|(_, _, se, _)| *se).fold(0.0, f64::max));
        rows.push(row);
        diagnostics.push(json!({
            "xi": xi,
            "q_hat": [est.q_hat.re, est.q_hat.im],
            "slope": [est.slope.re, est.slope.im],
            "per_time": est
                .per_time
                .iter()
                .map(|(t, q, se, exit)| json!({"t": t, "q": [q.re, q.im], "se": se, "exit_fraction": exit}))
                .collect::<Vec<_>>(),
        }));
    }
    let d = cfg.x.len();
    let mut header: Vec<String> = (1..=d).map(|k| format!("x_{k}")).collect();
    header.extend((1..=d).map(|k| format!("xi_{k}")));
    header.extend(
        ["re_q", "im_q", "q_hat_re", "q_hat_im", "se"]
            .iter()
            .map(|s| s.to_string()),
    );
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    run.write_table("symbol", &header_refs, &rows, format)?;
    run.write_json("diagnostics.json", &diagnostics)?;
    if plot && d == 1 {
        let xs: Vec<f64> = cfg.xi.iter().map(|v| v[0]).collect();
        let target: Vec<f64> = rows.iter().map(|r| r[2]).collect();
        let hat: Vec<f64> = rows.iter().map(|r| r[4]).collect();
        run.write_svg(
            "symbol.svg",
            "symbol: formula vs estimate",
            &xs,
            &[("re_q", &target), ("q_hat_re", &hat)],
        )?;
    }
    run.write_manifest("symbol", cfg, seed, (0, cfg.samples as u64))?;
    Ok(Outcome::Pass)
}

// ---------------------------------------------------------------------------
// indices
// ---------------------------------------------------------------------------

pub fn cmd_indices(
    cfg: &IndicesConfig,
    seed: u64,
    out: &Path,
    format: TableFormat,
    plot: bool,
) -> Result<Outcome, AnyError> {
    let run = RunDir::create(out)?;
    let s = settings();
    let symbol = cfg.symbol.build()?;
    let mut rows = Vec::new();
    for &x in &cfg.x_grid {
        let idx = indices_at_infinity(&symbol, &[x], cfg.xi_max, cfg.grid_points)?;
        rows.push(vec![
            x,
            idx.beta.0,
            idx.beta_hat,
            idx.beta.1,
            idx.delta.0,
            idx.delta_hat,
            idx.delta.1,
        ]);
    }
    run.write_table(
        "indices",
        &[
            "x", "beta_lo", "beta_hat", "beta_hi", "delta_lo", "delta_hat", "delta_hi",
        ],
        &rows,
        format,
    )?;
    if plot {
        let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let beta: Vec<f64> = rows.iter().map(|r| r[2]).collect();
        let delta: Vec<f64> = rows.iter().map(|r| r[5]).collect();
        run.write_svg(
            "indices.svg",
            "Blumenthal-Getoor / Pruitt indices",
            &xs,
            &[("beta_hat", &beta), ("delta_hat", &delta)],
        )?;
    }
    // Optional exit-time / maximal-bound companion reports for Lévy symbols.
    let mut exit_reports = Vec::new();
    if !cfg.radii.is_empty() {
        if let SymbolConfig::Levy { triplet } = &cfg.symbol {
            let t = triplet.build()?;
            for &r in &cfg.radii {
                let process = SymbolProcess::Levy {
                    triplet: t.clone(),
                    eps: 0.02f64.min(r / 4.0),
                    grid_dt: (r * r / 1024.0).min(1.0 / 256.0),
                };
                let report = mean_exit_time(
                    &process,
                    &symbol,
                    &[0.0],
                    r,
                    40.0 * r * r + 10.0,
                    4000,
                    seed,
                    0,
                    &s,
                )?;
                let bound = maximal_bound(&symbol, &[0.0], r, report.e_tau)?;
                exit_reports.push(json!({
                    "r": r,
                    "e_tau": report.e_tau,
                    "se": report.stderr,
                    "bracket": [report.bracket.0, report.bracket.1],
                    "maximal_bound_at_e_tau": bound,
                    "censored_fraction": report.censored_fraction,
                }));
            }
        }
    }
    if !exit_reports.is_empty() {
        run.write_json("exit_times.json", &exit_reports)?;
    }
    run.write_manifest("indices", cfg, seed, (0, 0))?;
    Ok(Outcome::Pass)
}
