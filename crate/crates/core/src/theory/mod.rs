//! Closed-form asymptotic constants and the deterministic quantities the
//! Monte Carlo harness is checked against.
//!
//! Notation: `m2 = ∫v²w`, `l2 = ∫w²`, `dl2 = ∫w'²` (see [`Kernel`]).
//! Density estimators have variance of order `1/(n h³)`, distribution
//! function estimators `1/(n h)`.

mod model;

pub use model::TrueModel;

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::quad;

fn t_mix(model: &TrueModel, x: f64, t: f64) -> f64 {
    let fx = model.cdf(x);
    t * t * fx + (1.0 - t) * (1.0 - t) * (1.0 - fx)
}

/// Variance of `f^(t)(x)`: `(t²F + (1-t)²(1-F))·dl2 / (n h³)`.
pub fn asymp_var_density_t(model: &TrueModel, x: f64, t: f64, n: usize, h: f64, k: &Kernel) -> f64 {
    t_mix(model, x, t) * k.dl2() / (n as f64 * h.powi(3))
}

/// Variance of the combined density estimator: `F(1-F)·dl2 / (n h³)`.
pub fn asymp_var_density_combined(model: &TrueModel, x: f64, n: usize, h: f64, k: &Kernel) -> f64 {
    let fx = model.cdf(x);
    fx * (1.0 - fx) * k.dl2() / (n as f64 * h.powi(3))
}

/// `½ h² f''(x) m2`, shared by every density estimator.
pub fn asymp_bias_density(model: &TrueModel, x: f64, h: f64, k: &Kernel) -> f64 {
    0.5 * h * h * model.f2(x) * k.m2()
}

/// Variance of `F^(t)(x)`: `(t²F + (1-t)²(1-F))·l2 / (n h)`.
pub fn asymp_var_cdf_t(model: &TrueModel, x: f64, t: f64, n: usize, h: f64, k: &Kernel) -> f64 {
    t_mix(model, x, t) * k.l2() / (n as f64 * h)
}

/// Variance of the combined distribution function estimator: `F(1-F)·l2 / (n h)`.
pub fn asymp_var_cdf_combined(model: &TrueModel, x: f64, n: usize, h: f64, k: &Kernel) -> f64 {
    let fx = model.cdf(x);
    fx * (1.0 - fx) * k.l2() / (n as f64 * h)
}

/// `½ h² f'(x) m2`.
pub fn asymp_bias_cdf(model: &TrueModel, x: f64, h: f64, k: &Kernel) -> f64 {
    0.5 * h * h * model.f1(x) * k.m2()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiseExpansion {
    pub bias_term: f64,
    pub var_term: f64,
    pub total: f64,
}

/// Leading terms of the integrated squared error of the combined density
/// estimator: `¼h⁴ ∫f''² m2² + ∫F(1-F) dl2 / (n h³)`.
pub fn mise_expansion(model: &TrueModel, n: usize, h: f64, k: &Kernel) -> Result<MiseExpansion> {
    let f2sq = model.int_f2_sq().ok_or_else(|| {
        Error::DegenerateModel(format!("{model}: f is not twice continuously differentiable"))
    })?;
    let bias_term = 0.25 * h.powi(4) * f2sq * k.m2().powi(2);
    let var_term = model.int_cdf_var() * k.dl2() / (n as f64 * h.powi(3));
    Ok(MiseExpansion {
        bias_term,
        var_term,
        total: bias_term + var_term,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthChoice {
    pub h: f64,
    pub warnings: Vec<String>,
}

/// Density bandwidth must dominate `n^(-9/35)` for the pivot error to be
/// negligible in the bias.
pub fn check_density_bandwidth(n: usize, h: f64) -> Option<String> {
    let floor = (n as f64).powf(-9.0 / 35.0);
    (h <= floor).then(|| {
        format!("density bandwidth {h} does not dominate n^(-9/35) = {floor:.6} at n = {n}")
    })
}

/// Distribution-function bandwidth must dominate `n^(-9/25)` when the
/// half-average pivot is used.
pub fn check_cdf_bandwidth(n: usize, h: f64) -> Option<String> {
    let floor = (n as f64).powf(-9.0 / 25.0);
    (h <= floor).then(|| {
        format!("distribution bandwidth {h} does not dominate n^(-9/25) = {floor:.6} at n = {n}")
    })
}

fn require_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("need n >= 2, got {n}")));
    }
    Ok(())
}

/// Minimizer of [`mise_expansion`]: `h* = (3B / (A n))^(1/7)` with
/// `A = ∫f''²·m2²`, `B = ∫F(1-F)·dl2`.
pub fn optimal_bandwidth_density(model: &TrueModel, n: usize, k: &Kernel) -> Result<BandwidthChoice> {
    require_n(n)?;
    let a = model.int_f2_sq().unwrap_or(0.0) * k.m2().powi(2);
    if !(a > 0.0) {
        return Err(Error::DegenerateModel(format!(
            "{model}: ∫f''² is zero or undefined, the bias term cannot be balanced"
        )));
    }
    let b = model.int_cdf_var() * k.dl2();
    let h = (3.0 * b / (a * n as f64)).powf(1.0 / 7.0);
    Ok(BandwidthChoice {
        h,
        warnings: check_density_bandwidth(n, h).into_iter().collect(),
    })
}

/// Minimizer of `¼h⁴ ∫f'² m2² + ∫F(1-F) l2 / (n h)`: `h* = (B' / (A' n))^(1/5)`.
/// This is also the rate-optimal pivot bandwidth.
pub fn optimal_bandwidth_cdf(model: &TrueModel, n: usize, k: &Kernel) -> Result<BandwidthChoice> {
    require_n(n)?;
    let a = model.int_f1_sq().unwrap_or(0.0) * k.m2().powi(2);
    if !(a > 0.0) {
        return Err(Error::DegenerateModel(format!(
            "{model}: ∫f'² is zero or undefined, the bias term cannot be balanced"
        )));
    }
    let b = model.int_cdf_var() * k.l2();
    let h = (b / (a * n as f64)).powf(1.0 / 5.0);
    Ok(BandwidthChoice {
        h,
        warnings: check_cdf_bandwidth(n, h).into_iter().collect(),
    })
}

/// Panels per piece for the smoothing integrals (513 nodes on one piece).
const SMOOTHING_PANELS: usize = 512;
const SMOOTHING_TOL: f64 = 1e-10;

/// `(1/h) ∫ w((x - u)/h) f(u) du`, the exact mean of every inversion density
/// estimator (one-sided, fixed-weight or with known weights).
pub fn expected_estimate(model: &TrueModel, k: &Kernel, h: f64, x: f64) -> Result<f64> {
    if let TrueModel::PointMass(a) = *model {
        return Ok(k.w((x - a) / h) / h);
    }
    let mut breaks = model.breakpoints();
    breaks.push(x);
    quad::simpson_checked(
        |u| k.w((x - u) / h) * model.f(u) / h,
        x - h,
        x + h,
        &breaks,
        SMOOTHING_PANELS,
        SMOOTHING_TOL,
    )
}

/// `(1/h) ∫ w((x - u)/h) F(u) du`, the mean of every inversion distribution
/// function estimator.
pub fn expected_cdf_estimate(model: &TrueModel, k: &Kernel, h: f64, x: f64) -> Result<f64> {
    let mut breaks = model.breakpoints();
    breaks.push(x);
    quad::simpson_checked(
        |u| k.w((x - u) / h) * model.cdf(u) / h,
        x - h,
        x + h,
        &breaks,
        SMOOTHING_PANELS,
        SMOOTHING_TOL,
    )
}

/// Leading-order even moment of one observation's contribution to `f^(t)(x)`:
/// `h^-(2m-1) (t^m F(x) + (1-t)^m (1-F(x))) ∫ w'^m`.
pub fn even_moment_u(model: &TrueModel, x: f64, t: f64, h: f64, k: &Kernel, m: u32) -> Result<f64> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::invalid(format!("moment order must be even and >= 2, got {m}")));
    }
    let fx = model.cdf(x);
    let mi = m as i32;
    let weight = t.powi(mi) * fx + (1.0 - t).powi(mi) * (1.0 - fx);
    Ok(weight * k.deriv_power_integral(m)? / h.powi(2 * mi - 1))
}

const NPMLE_PANELS: usize = 1024;
const NPMLE_TOL: f64 = 1e-9;

/// `∫ θ²_{h,t,F} dG` for a model supported on `[0, M)`.
///
/// `θ` is built from its piecewise definition on each unit cell `x + k`,
/// `x ∈ [0, 1]`: on cell 0 it is `Σ_{i=0..m} (1 - F(x+i)) w_h'(t - x - i)`, and
/// each further cell subtracts `Σ_{i<k} w_h'(t - x - i)`. Here
/// `w_h(u) = w(u/h)/h` and `m` is the largest integer below `M + 1`. As
/// `h → 0`, `h³` times the result tends to `F(t)(1 - F(t)) dl2`.
pub fn npmle_variance_integral(model: &TrueModel, h: f64, t: f64, k: &Kernel) -> Result<f64> {
    let (lo, upper) = match model.support() {
        Some((lo, hi)) if lo >= 0.0 && hi > lo => (lo, hi),
        _ => {
            return Err(Error::ModelSupport(format!(
                "{model} is not supported on an interval [0, M) with M > 0"
            )))
        }
    };
    debug_assert!(lo >= 0.0);
    if !(h > 0.0) {
        return Err(Error::invalid(format!("bandwidth must be positive, got {h}")));
    }
    if !(0.0..upper).contains(&t) {
        return Err(Error::ModelSupport(format!("t = {t} must lie in [0, {upper})")));
    }
    // largest integer strictly below M + 1
    let m = ((upper + 1.0).ceil() - 1.0) as usize;

    let wh_deriv = |u: f64| k.w_deriv(u / h) / (h * h);
    let theta = |x: f64, cell: usize| -> f64 {
        let mut base = 0.0;
        for i in 0..=m {
            let s = x + i as f64;
            base += (1.0 - model.cdf(s)) * wh_deriv(t - s);
        }
        let mut shift = 0.0;
        for i in 0..cell {
            shift += wh_deriv(t - (x + i as f64));
        }
        base - shift
    };

    // integrand pieces are smooth between kernel support edges and model kinks
    let mut breaks = Vec::new();
    for i in 0..=m + 1 {
        let c = t - i as f64;
        breaks.extend([c - h, c, c + h]);
    }
    for b in model.breakpoints() {
        for i in 0..=m + 1 {
            breaks.push(b - i as f64);
        }
    }

    let mut total = 0.0;
    for cell in 0..=m {
        let integrand = |x: f64| {
            let th = theta(x, cell);
            th * th * model.g(x + cell as f64)
        };
        total += quad::simpson_checked(integrand, 0.0, 1.0, &breaks, NPMLE_PANELS, NPMLE_TOL)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::normal_pdf;

    #[test]
    fn density_variance_examples() {
        let m = TrueModel::StandardNormal;
        let k = Kernel::biweight();
        let v = asymp_var_density_t(&m, 0.0, 0.5, 1000, 0.5, &k);
        assert!((v - 0.25 * (15.0 / 7.0) / 125.0).abs() < 1e-15);
        assert!((v - 0.004_285_7).abs() < 1e-7);
        let x = -0.7;
        let f = m.cdf(x);
        assert_eq!(
            asymp_var_density_t(&m, x, 1.0, 10, 0.3, &k),
            f * k.dl2() / (10.0 * 0.3f64.powi(3))
        );
        assert_eq!(
            asymp_var_density_t(&m, x, 0.0, 10, 0.3, &k),
            (1.0 - f) * k.dl2() / (10.0 * 0.3f64.powi(3))
        );
        assert_eq!(asymp_var_density_combined(&m, -1e6, 10, 0.3, &k), 0.0);
    }

    #[test]
    fn combined_is_the_minimum_over_t() {
        let k = Kernel::biweight();
        let models = [TrueModel::StandardNormal, TrueModel::Beta22, TrueModel::Uniform01];
        for i in 0..20 {
            let m = models[i % 3];
            let x = -1.5 + 0.17 * i as f64;
            let best = (0..=10_000)
                .map(|j| j as f64 / 10_000.0)
                .map(|t| (t, asymp_var_density_t(&m, x, t, 100, 0.2, &k)))
                .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            let comb = asymp_var_density_combined(&m, x, 100, 0.2, &k);
            assert!((best.1 - comb).abs() <= 1e-6 * comb.max(1e-12), "x={x}");
            assert!((best.0 - (1.0 - m.cdf(x))).abs() <= 1e-4);
            let at_opt = asymp_var_density_t(&m, x, 1.0 - m.cdf(x), 100, 0.2, &k);
            assert!((at_opt - comb).abs() <= 1e-15 * comb.max(1.0));
        }
    }

    #[test]
    fn density_bias_examples() {
        let m = TrueModel::StandardNormal;
        let k = Kernel::biweight();
        let b = asymp_bias_density(&m, 0.0, 0.5, &k);
        assert!((b - (-0.007_123_9)).abs() < 1e-6);
        assert!(b < 0.0);
        assert!(asymp_bias_density(&m, 1.0, 0.5, &k).abs() < 1e-17);
    }

    #[test]
    fn cdf_variance_examples() {
        let m = TrueModel::StandardNormal;
        let k = Kernel::biweight();
        for x in [-2.0, 0.0, 1.3] {
            let v = asymp_var_cdf_t(&m, x, 0.5, 500, 0.7, &k);
            let f = m.cdf(x);
            let expected = 0.25 * (f + 1.0 - f) * k.l2() / (500.0 * 0.7);
            assert!((v - expected).abs() < 1e-16);
        }
        let v = asymp_var_cdf_t(&m, 0.4, 1.0, 50, 0.3, &k);
        assert_eq!(v, m.cdf(0.4) * k.l2() / (50.0 * 0.3));
        let c = asymp_var_cdf_combined(&m, 0.0, 50, 0.3, &k);
        assert!((c - 0.25 * (5.0 / 7.0) / 15.0).abs() < 1e-16);
        assert!((asymp_bias_cdf(&m, 0.0, 0.5, &k)).abs() < 1e-18);
    }

    #[test]
    fn mise_expansion_values() {
        let m = TrueModel::StandardNormal;
        let k = Kernel::biweight();
        let e = mise_expansion(&m, 500, 1.0, &k).unwrap();
        assert!((e.bias_term - 0.001_079_4).abs() < 1e-7);
        assert!((e.var_term - 0.002_418_0).abs() < 1e-7);
        assert_eq!(e.total, e.bias_term + e.var_term);
        // var_term · n h³ is the constant ∫F(1-F)·dl2
        for (n, h) in [(10, 0.1), (500, 1.0), (4000, 0.3)] {
            let e = mise_expansion(&m, n, h, &k).unwrap();
            let c = e.var_term * n as f64 * h.powi(3);
            assert!((c - m.int_cdf_var() * k.dl2()).abs() < 1e-14);
        }
        let small = mise_expansion(&m, 500, 1e-3, &k).unwrap();
        assert!(small.bias_term < 1e-12 && small.var_term > 1e6);
        assert!(matches!(
            mise_expansion(&TrueModel::Uniform01, 500, 0.5, &k),
            Err(Error::DegenerateModel(_))
        ));
    }

    #[test]
    fn optimal_bandwidths() {
        let m = TrueModel::StandardNormal;
        let k = Kernel::biweight();
        let c = optimal_bandwidth_density(&m, 500, &k).unwrap();
        assert!((c.h - 1.077).abs() < 1e-3, "{}", c.h);
        assert!(c.warnings.is_empty());
        let big = optimal_bandwidth_density(&m, 500 * 128, &k).unwrap();
        assert!((big.h / c.h - 0.5).abs() < 1e-12);
        let cdf = optimal_bandwidth_cdf(&m, 500, &k).unwrap();
        let cdf32 = optimal_bandwidth_cdf(&m, 500 * 32, &k).unwrap();
        assert!((cdf32.h / cdf.h - 0.5).abs() < 1e-12);
        assert!(optimal_bandwidth_density(&TrueModel::Uniform01, 500, &k).is_err());
        assert!(optimal_bandwidth_density(&m, 1, &k).is_err());
        assert!(check_density_bandwidth(1000, 0.1).is_some());
        assert!(check_density_bandwidth(1000, 0.5).is_none());
        assert!(check_cdf_bandwidth(1000, 0.05).is_some());
        assert!(check_cdf_bandwidth(1000, 0.3).is_none());
    }

    #[test]
    fn expected_estimate_second_order() {
        let m = TrueModel::StandardNormal;
        let k = Kernel::biweight();
        let e = expected_estimate(&m, &k, 0.5, 0.0).unwrap();
        let approx = normal_pdf(0.0) + asymp_bias_density(&m, 0.0, 0.5, &k);
        assert!((approx - 0.391_819).abs() < 1e-6);
        // next term: h⁴ f(0) m4 / 24 with f(0) = 3φ(0), m4 = 1/21
        let fourth = 0.5f64.powi(4) * 3.0 * normal_pdf(0.0) / 21.0 / 24.0;
        // the h⁶ term left over is about -3e-6
        assert!((e - approx - fourth).abs() < 5e-6, "{e} vs {approx} + {fourth}");
        let tiny = expected_estimate(&m, &k, 1e-3, 0.3).unwrap();
        assert!((tiny - m.f(0.3)).abs() < 1e-6);
    }

    #[test]
    fn residual_over_h_squared_shrinks() {
        let m = TrueModel::StandardNormal;
        let k = Kernel::biweight();
        for x in [0.0, 0.7, 2.0] {
            let mut prev = f64::INFINITY;
            for h in [0.4, 0.2, 0.1, 0.05] {
                let r = expected_estimate(&m, &k, h, x).unwrap()
                    - m.f(x)
                    - asymp_bias_density(&m, x, h, &k);
                let ratio = (r / (h * h)).abs();
                assert!(ratio < prev, "x={x} h={h}");
                prev = ratio;
            }
        }
    }

    #[test]
    fn expected_estimate_on_compact_models() {
        let k = Kernel::biweight();
        let m = TrueModel::Uniform01;
        // fully inside: exact
        let v = expected_estimate(&m, &k, 0.1, 0.5).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        // at the edge half the kernel mass is lost
        let v = expected_estimate(&m, &k, 0.1, 0.0).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let p = expected_estimate(&TrueModel::PointMass(0.0), &k, 0.5, 0.0).unwrap();
        assert_eq!(p, 1.875);
        let c = expected_cdf_estimate(&m, &k, 0.1, 0.5).unwrap();
        assert!((c - 0.5).abs() < 1e-12);
    }

    #[test]
    fn even_moments() {
        let m = TrueModel::StandardNormal;
        let k = Kernel::biweight();
        let v = even_moment_u(&m, 0.4, 1.0, 0.2, &k, 2).unwrap();
        assert!((v - m.cdf(0.4) * k.dl2() / 0.008).abs() < 1e-9 * v);
        let far = even_moment_u(&m, 40.0, 1.0, 0.2, &k, 2).unwrap();
        assert!((far - k.dl2() / 0.008).abs() < 1e-9 * far);
        let w4 = k.deriv_power_integral(4).unwrap();
        let v4 = even_moment_u(&m, 0.0, 0.5, 0.5, &k, 4).unwrap();
        assert!((v4 - (0.0625 * 0.5 + 0.0625 * 0.5) * w4 / 0.5f64.powi(7)).abs() < 1e-9 * v4);
        assert!(even_moment_u(&m, 0.0, 0.5, 0.5, &k, 3).is_err());
    }

    #[test]
    fn npmle_limit_on_uniform_model() {
        let k = Kernel::biweight();
        let m = TrueModel::Uniform01;
        for t in [0.25, 0.5, 0.75] {
            let limit = t * (1.0 - t) * k.dl2();
            let fine = npmle_variance_integral(&m, 0.01, t, &k).unwrap() * 1e-6;
            let coarse = npmle_variance_integral(&m, 0.1, t, &k).unwrap() * 1e-3;
            assert!((fine / limit - 1.0).abs() < 0.02, "t={t}: {fine} vs {limit}");
            assert!((fine / limit - 1.0).abs() < (coarse / limit - 1.0).abs(), "t={t}");
        }
        let near_zero = npmle_variance_integral(&m, 0.001, 0.002, &k).unwrap() * 1e-9;
        assert!(near_zero < 0.01);
    }

    #[test]
    fn npmle_rejects_unbounded_support() {
        let k = Kernel::biweight();
        assert!(matches!(
            npmle_variance_integral(&TrueModel::StandardNormal, 0.01, 0.5, &k),
            Err(Error::ModelSupport(_))
        ));
        assert!(npmle_variance_integral(&TrueModel::Uniform01, 0.01, 1.5, &k).is_err());
    }

    #[test]
    fn npmle_limit_on_beta_model() {
        let k = Kernel::biweight();
        let m = TrueModel::Beta22;
        let t = 0.4;
        let v = npmle_variance_integral(&m, 0.005, t, &k).unwrap() * 0.005f64.powi(3);
        let limit = m.cdf(t) * (1.0 - m.cdf(t)) * k.dl2();
        assert!((v / limit - 1.0).abs() < 0.02, "{v} vs {limit}");
    }
}
