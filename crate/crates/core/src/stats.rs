//! Shared statistical helpers: sample moments with standard errors, the
//! 3-standard-error rule used by every Monte Carlo gate, total-variation
//! distance against discrete laws, a Kolmogorov–Smirnov statistic, and a
//! least-squares line fit for slope bracketing.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math;

/// Sample mean, unbiased variance and the standard error of the mean.
#[derive(Clone, Copy, Debug, Default)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub var: f64,
    pub stderr: f64,
}

pub fn summarize(samples: &[f64]) -> Summary {
    let n = samples.len();
    if n == 0 {
        return Summary::default();
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Summary {
            n,
            mean,
            var: 0.0,
            stderr: 0.0,
        };
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    Summary {
        n,
        mean,
        var,
        stderr: math::sqrt(var / n as f64),
    }
}

/// `|observed − expected| ≤ 3·se`, the crate-wide pass rule.
pub fn within_3se(observed: f64, expected: f64, se: f64) -> bool {
    math::abs(observed - expected) <= 3.0 * se
}

/// Mean of `e^{i·s}` over samples with the CF standard error `√((1−|φ̂|²)/n)`.
pub fn cf_point(phases: impl Iterator<Item = f64>) -> (Complex64, f64, usize) {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut n = 0usize;
    for s in phases {
        acc += Complex64::new(math::cos(s), math::sin(s));
        n += 1;
    }
    if n == 0 {
        return (Complex64::new(0.0, 0.0), 0.0, 0);
    }
    let phi = acc / n as f64;
    let se = math::sqrt((1.0 - phi.norm_sqr()).max(0.0) / n as f64);
    (phi, se, n)
}

/// Total-variation distance between an empirical integer histogram and a
/// reference pmf on the same support, `½ Σ|p̂ₖ − pₖ|` plus the unmatched
/// reference tail.
pub fn tv_distance_discrete(counts: &[(i64, u64)], n: usize, pmf: impl Fn(i64) -> f64, support: impl Iterator<Item = i64>) -> f64 {
    let mut seen_mass = 0.0;
    let mut tv = 0.0;
    let mut matched: Vec<i64> = Vec::new();
    for k in support {
        let p = pmf(k);
        seen_mass += p;
        let c = counts
            .iter()
            .find(|(kk, _)| *kk == k)
            .map(|(_, c)| *c)
            .unwrap_or(0);
        tv += math::abs(c as f64 / n as f64 - p);
        matched.push(k);
    }
    for (k, c) in counts {
        if !matched.contains(k) {
            tv += *c as f64 / n as f64;
        }
    }
    0.5 * (tv + (1.0 - seen_mass).max(0.0))
}

/// Poisson pmf `e^{−λ} λᵏ/k!`, computed in log space.
pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    if lambda <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let mut log_p = -lambda + k as f64 * math::ln(lambda);
    for j in 1..=k {
        log_p -= math::ln(j as f64);
    }
    math::exp(log_p)
}

/// One-sample Kolmogorov–Smirnov statistic against a cdf.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max(math::abs((i + 1) as f64 / n - f));
        d = d.max(math::abs(f - i as f64 / n));
    }
    d
}

/// Asymptotic KS critical value at level `alpha` (Kolmogorov distribution):
/// `√(−ln(α/2)/2) / √n`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    math::sqrt(-math::ln(alpha / 2.0) / 2.0) / math::sqrt(n as f64)
}

/// Least squares fit `y ≈ a + b·x`; returns `(a, b, max_abs_residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let sx = xs.iter().sum::<f64>();
    let sy = ys.iter().sum::<f64>();
    let sxx = xs.iter().map(|x| x * x).sum::<f64>();
    let sxy = xs.iter().zip(ys).map(|(x, y)| x * y).sum::<f64>();
    let denom = n * sxx - sx * sx;
    let b = if math::abs(denom) < 1e-300 {
        0.0
    } else {
        (n * sxy - sx * sy) / denom
    };
    let a = (sy - b * sx) / n;
    let resid = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| math::abs(y - (a + b * x)))
        .fold(0.0f64, f64::max);
    (a, b, resid)
}

/// Convolution powers of an integer-supported pmf, for compound-Poisson
/// reference laws: returns `μ^{*k}` for `k = 0..=k_max` on a shared offset
/// grid. The pmf is given as `(offset, weights)` with support
/// `offset..offset+len`.
pub fn convolution_powers(offset: i64, weights: &[f64], k_max: usize) -> Vec<(i64, Vec<f64>)> {
    let mut out = Vec::with_capacity(k_max + 1);
    out.push((0i64, vec![1.0]));
    let mut cur_off = 0i64;
    let mut cur: Vec<f64> = vec![1.0];
    for _ in 1..=k_max {
        let mut next = vec![0.0; cur.len() + weights.len() - 1];
        for (i, &a) in cur.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in weights.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        cur_off += offset;
        cur = next;
        out.push((cur_off, cur.clone()));
    }
    out
}

/// Compound-Poisson pmf on the integers: `e^{−λt} Σₖ (λt)ᵏ/k! μ^{*k}`.
pub fn compound_poisson_pmf(lambda_t: f64, offset: i64, weights: &[f64], at: i64) -> f64 {
    // Truncate the Poisson mixture where its tail is negligible.
    let k_max = (lambda_t + 12.0 * math::sqrt(lambda_t.max(1.0)) + 30.0) as usize;
    let powers = convolution_powers(offset, weights, k_max);
    let mut p = 0.0;
    for (k, (off, w)) in powers.iter().enumerate() {
        let idx = at - off;
        if idx < 0 || idx as usize >= w.len() {
            continue;
        }
        p += poisson_pmf(lambda_t, k as u64) * w[idx as usize];
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_pmf_sums_to_one() {
        let total: f64 = (0..200).map(|k| poisson_pmf(4.0, k)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_on_uniform_grid() {
        // Deterministic equispaced quantiles: the KS statistic is 1/(2n) + grid shift.
        let mut xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_statistic(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!(d <= 0.5e-3 + 1e-12);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (a, b, r) = linear_fit(&xs, &ys);
        assert!((a - 1.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12 && r < 1e-12);
    }

    #[test]
    fn rademacher_convolution() {
        // μ uniform on {−1, +1} (consecutive-support encoding with a zero
        // at 0): μ*² puts ¼, ½, ¼ on {−2, 0, 2}.
        let powers = convolution_powers(-1, &[0.5, 0.0, 0.5], 2);
        let (off, w) = &powers[2];
        assert_eq!(*off, -2);
        assert_eq!(w.len(), 5);
        assert!((w[0] - 0.25).abs() < 1e-15);
        assert!(w[1].abs() < 1e-15);
        assert!((w[2] - 0.5).abs() < 1e-15);
        assert!((w[4] - 0.25).abs() < 1e-15);
    }
}
