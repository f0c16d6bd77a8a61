//! Seeded replication studies.
//!
//! Replication `r` draws its sample from `SplitMix64::stream(seed, r)`, so a
//! report depends only on the configuration: not on thread count or the
//! order in which replications finish. Moments are reduced sequentially in
//! replication order after the (parallel) estimation step.

use rayon::prelude::*;

use crate::deconv::{Cdf, Estimator, EstimatorSpec, Grid, WeightSpec};
use crate::error::{Error, Result};
use crate::kde::{Bandwidth, Sample};
use crate::kernels::Kernel;
use crate::quad;
use crate::rng::SplitMix64;
use crate::theory::{self, MiseExpansion, TrueModel};

/// Draw `n` observations `X = Y + Z` with `Z ~ Uniform[0, 1)`, sorted.
///
/// `Y` and `Z` are drawn alternately from the same stream.
pub fn sample_convolution(model: &TrueModel, n: usize, rng: &mut SplitMix64) -> Result<Sample> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    let xs = (0..n)
        .map(|_| {
            let y = model.sample_y(rng);
            y + rng.uniform()
        })
        .collect();
    Sample::new(xs)
}

/// `g(x) = F(x) - F(x - 1)`.
pub fn true_g(model: &TrueModel, x: f64) -> f64 {
    model.g(x)
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalPoints {
    Points(Vec<f64>),
    Grid(Grid),
}

impl EvalPoints {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            EvalPoints::Points(p) => p.clone(),
            EvalPoints::Grid(g) => g.points().collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct McConfig {
    pub model: TrueModel,
    pub kernel: Kernel,
    pub n: usize,
    pub reps: usize,
    pub h: f64,
    pub h_pivot: f64,
    pub estimator: Estimator,
    pub weight: WeightSpec,
    pub eval: EvalPoints,
    pub seed: u64,
}

impl McConfig {
    pub fn validate(&self) -> Result<EstimatorSpec> {
        if self.n < 2 {
            return Err(Error::invalid(format!("need n >= 2, got {}", self.n)));
        }
        if self.reps < 2 {
            return Err(Error::invalid(format!("need reps >= 2, got {}", self.reps)));
        }
        if let EvalPoints::Points(p) = &self.eval {
            if p.is_empty() || p.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("evaluation points must be finite and non-empty"));
            }
        }
        let spec = EstimatorSpec {
            estimator: self.estimator,
            h: Bandwidth::new(self.h)?,
            h_pivot: Bandwidth::new(self.h_pivot)?,
            weight: self.weight.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Grid with step `h/20` spanning the model's support hint widened by
    /// `1 + h + 0.5` on each side.
    pub fn default_mise_grid(model: &TrueModel, h: f64) -> Result<Grid> {
        let (lo, hi) = model.support_hint();
        let margin = 1.0 + h + 0.5;
        Grid::from_range(lo - margin, hi + margin, h / 20.0)
    }

    /// `key=value` lines describing the run, for CSV headers.
    pub fn describe(&self) -> Vec<(String, String)> {
        let eval = match &self.eval {
            EvalPoints::Points(p) => {
                let s: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
                format!("points:{}", s.join(";"))
            }
            EvalPoints::Grid(g) => format!("grid:{}:{}:{}", g.x0, g.dx, g.count),
        };
        vec![
            ("model".into(), self.model.name()),
            ("kernel".into(), self.kernel.name().to_string()),
            ("n".into(), self.n.to_string()),
            ("reps".into(), self.reps.to_string()),
            ("h".into(), format!("{}", self.h)),
            ("h_pivot".into(), format!("{}", self.h_pivot)),
            ("estimator".into(), self.estimator.name().to_string()),
            ("weight".into(), self.weight.describe()),
            ("eval".into(), eval),
            ("seed".into(), self.seed.to_string()),
        ]
    }
}

/// Replicate statistics at one evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointStats {
    pub x: f64,
    /// `f(x)`, `F(x)`, or `g(x)` for the direct estimator.
    pub truth: f64,
    pub mean: f64,
    pub bias: f64,
    /// Unbiased (`M - 1`) sample variance.
    pub variance: f64,
    /// Standard error of `mean`.
    pub se_mean: f64,
    /// Standard error of `variance`, from the fourth central moment.
    pub se_variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// `E(est - truth)²`
    pub mse: f64,
    /// `E(est - truth)⁴`
    pub fourth_moment: f64,
    pub theory_bias: f64,
    pub theory_variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiseSummary {
    pub empirical: f64,
    pub std_error: f64,
    pub expansion: Option<MiseExpansion>,
}

#[derive(Debug, Clone)]
pub struct McReport {
    pub config: McConfig,
    pub points: Vec<PointStats>,
    pub mise: Option<MiseSummary>,
    /// `∫ (E(F̂ - F)⁴)^(1/2) dx` over the grid, for pivot studies.
    pub pivot_bound: Option<f64>,
}

impl McReport {
    pub fn point(&self, x: f64) -> Option<&PointStats> {
        self.points.iter().find(|p| p.x == x)
    }
}

struct Moments {
    mean: f64,
    variance: f64,
    se_variance: f64,
    skewness: f64,
    excess_kurtosis: f64,
}

fn moments(values: &[f64]) -> Moments {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let (mut c2, mut c3, mut c4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        c2 += d2;
        c3 += d2 * d;
        c4 += d2 * d2;
    }
    let (m2, m3, m4) = (c2 / m, c3 / m, c4 / m);
    let variance = c2 / (m - 1.0);
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    Moments {
        mean,
        variance,
        se_variance: ((m4 - m2 * m2).max(0.0) / m).sqrt(),
        skewness,
        excess_kurtosis,
    }
}

/// `(truth, theory bias, theory variance)` for the configured estimator at `x`.
fn theory_at(cfg: &McConfig, x: f64) -> (f64, f64, f64) {
    let (m, k, n) = (&cfg.model, &cfg.kernel, cfg.n);
    let h = cfg.h;
    let dens_bias = theory::asymp_bias_density(m, x, h, k);
    let cdf_bias = theory::asymp_bias_cdf(m, x, h, k);
    let fixed_t = match cfg.weight {
        WeightSpec::FixedT(t) => Some(t),
        _ => None,
    };
    match cfg.estimator {
        Estimator::DirectDensity => {
            let g2 = m.f1(x) - m.f1(x - 1.0);
            (m.g(x), 0.5 * h * h * g2 * k.m2(), m.g(x) * k.l2() / (n as f64 * h))
        }
        Estimator::DensityMinus => (m.f(x), dens_bias, theory::asymp_var_density_t(m, x, 1.0, n, h, k)),
        Estimator::DensityPlus => (m.f(x), dens_bias, theory::asymp_var_density_t(m, x, 0.0, n, h, k)),
        Estimator::DensityWeighted | Estimator::DensityCombined => {
            let v = match fixed_t {
                Some(t) => theory::asymp_var_density_t(m, x, t, n, h, k),
                None => theory::asymp_var_density_combined(m, x, n, h, k),
            };
            (m.f(x), dens_bias, v)
        }
        Estimator::CdfMinus => (m.cdf(x), cdf_bias, theory::asymp_var_cdf_t(m, x, 1.0, n, h, k)),
        Estimator::CdfPlus => (m.cdf(x), cdf_bias, theory::asymp_var_cdf_t(m, x, 0.0, n, h, k)),
        Estimator::CdfWeighted | Estimator::CdfCombined => {
            let v = match fixed_t {
                Some(t) => theory::asymp_var_cdf_t(m, x, t, n, h, k),
                None => theory::asymp_var_cdf_combined(m, x, n, h, k),
            };
            (m.cdf(x), cdf_bias, v)
        }
        Estimator::PivotHalf => (m.cdf(x), cdf_bias, theory::asymp_var_cdf_t(m, x, 0.5, n, h, k)),
        Estimator::PivotH => {
            let hcdf = match &cfg.weight {
                WeightSpec::PivotH(c) => c.clone(),
                _ => Cdf::LogisticAtMedian { scale: 1.0 },
            };
            // sample-centered H is evaluated at the model median
            let t = 1.0 - hcdf.eval_with_median(x, m.median());
            (m.cdf(x), cdf_bias, theory::asymp_var_cdf_t(m, x, t, n, h, k))
        }
    }
}

/// Estimator values for every replication: `out[r][i]` at `points[i]`.
fn replicate(cfg: &McConfig, spec: &EstimatorSpec, points: &[f64]) -> Result<Vec<Vec<f64>>> {
    (0..cfg.reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = SplitMix64::stream(cfg.seed, r);
            let sample = sample_convolution(&cfg.model, cfg.n, &mut rng)?;
            Ok(points.iter().map(|&x| spec.eval(&sample, &cfg.kernel, x)).collect())
        })
        .collect()
}

fn point_stats(cfg: &McConfig, points: &[f64], reps: &[Vec<f64>]) -> Vec<PointStats> {
    let mut column = vec![0.0; reps.len()];
    points
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            for (c, row) in column.iter_mut().zip(reps) {
                *c = row[i];
            }
            let mo = moments(&column);
            let (truth, theory_bias, theory_variance) = theory_at(cfg, x);
            let m = column.len() as f64;
            let mse = column.iter().map(|v| (v - truth).powi(2)).sum::<f64>() / m;
            let fourth_moment = column.iter().map(|v| (v - truth).powi(4)).sum::<f64>() / m;
            PointStats {
                x,
                truth,
                mean: mo.mean,
                bias: mo.mean - truth,
                variance: mo.variance,
                se_mean: (mo.variance / m).sqrt(),
                se_variance: mo.se_variance,
                skewness: mo.skewness,
                excess_kurtosis: mo.excess_kurtosis,
                mse,
                fourth_moment,
                theory_bias,
                theory_variance,
            }
        })
        .collect()
}

/// Empirical mean, variance, shape and error of the estimator at each point,
/// next to the asymptotic bias and variance.
pub fn pointwise_study(cfg: &McConfig) -> Result<McReport> {
    let spec = cfg.validate()?;
    let points = cfg.eval.to_vec();
    let reps = replicate(cfg, &spec, &points)?;
    Ok(McReport {
        config: cfg.clone(),
        points: point_stats(cfg, &points, &reps),
        mise: None,
        pivot_bound: None,
    })
}

/// Integrated squared error per replication (trapezoid on the grid), averaged.
pub fn mise_study(cfg: &McConfig) -> Result<McReport> {
    let spec = cfg.validate()?;
    let grid = match &cfg.eval {
        EvalPoints::Grid(g) => *g,
        EvalPoints::Points(_) => {
            return Err(Error::InvalidGrid("integrated error needs a grid".into()))
        }
    };
    let (lo, hi) = cfg.model.support_hint();
    if grid.x0 > lo - 1.0 - cfg.h || grid.last() < hi + 1.0 + cfg.h {
        return Err(Error::InvalidGrid(format!(
            "grid [{}, {}] does not cover the effective support [{}, {}]",
            grid.x0,
            grid.last(),
            lo - 1.0 - cfg.h,
            hi + 1.0 + cfg.h
        )));
    }
    let points: Vec<f64> = grid.points().collect();
    let reps = replicate(cfg, &spec, &points)?;

    let target: Vec<f64> = points
        .iter()
        .map(|&x| if cfg.estimator.is_density() { cfg.model.f(x) } else { cfg.model.cdf(x) })
        .collect();
    let ise: Vec<f64> = reps
        .iter()
        .map(|row| {
            let sq: Vec<f64> = row.iter().zip(&target).map(|(v, t)| (v - t).powi(2)).collect();
            quad::trapezoid(&sq, grid.dx)
        })
        .collect();
    let mo = moments(&ise);
    let expansion = if cfg.estimator == Estimator::DensityCombined {
        theory::mise_expansion(&cfg.model, cfg.n, cfg.h, &cfg.kernel).ok()
    } else {
        None
    };
    Ok(McReport {
        config: cfg.clone(),
        points: point_stats(cfg, &points, &reps),
        mise: Some(MiseSummary {
            empirical: mo.mean,
            std_error: (mo.variance / ise.len() as f64).sqrt(),
            expansion,
        }),
        pivot_bound: None,
    })
}

/// Pointwise `E(F̂ - F)²` and `E(F̂ - F)⁴` of a distribution-function estimator
/// and, on a grid, `∫ (E(F̂ - F)⁴)^(1/2) dx`.
pub fn pivot_mse_study(cfg: &McConfig) -> Result<McReport> {
    if cfg.estimator.is_density() {
        return Err(Error::invalid(format!(
            "pivot study needs a distribution-function estimator, got '{}'",
            cfg.estimator.name()
        )));
    }
    let mut report = pointwise_study(cfg)?;
    if let EvalPoints::Grid(g) = &cfg.eval {
        let roots: Vec<f64> = report.points.iter().map(|p| p.fourth_moment.sqrt()).collect();
        report.pivot_bound = Some(quad::trapezoid(&roots, g.dx));
    }
    Ok(report)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateStudy {
    pub ns: Vec<usize>,
    pub bandwidths: Vec<f64>,
    pub mse: Vec<f64>,
    pub slope: f64,
}

/// Pivot MSE at `x` with `h = c·n^(-1/5)` for each `n`, and its log-log slope.
pub fn pivot_rate_study(base: &McConfig, x: f64, c: f64, ns: &[usize]) -> Result<RateStudy> {
    let mut bandwidths = Vec::with_capacity(ns.len());
    let mut mse = Vec::with_capacity(ns.len());
    for &n in ns {
        let h = c * (n as f64).powf(-0.2);
        let cfg = McConfig {
            n,
            h,
            eval: EvalPoints::Points(vec![x]),
            ..base.clone()
        };
        let rep = pivot_mse_study(&cfg)?;
        bandwidths.push(h);
        mse.push(rep.points[0].mse);
    }
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    Ok(RateStudy {
        ns: ns.to_vec(),
        bandwidths,
        slope: loglog_slope(&xs, &mse),
        mse,
    })
}

/// Empirical `E U^m` of one observation's contribution
/// `U = h⁻² (t Σ_{j≥0} w'((x-j-X)/h) - (1-t) Σ_{j≥1} w'((x+j-X)/h))`
/// to `f^(t)(x)`, from `draws` independent observations.
pub fn summand_moment(
    model: &TrueModel,
    k: &Kernel,
    x: f64,
    t: f64,
    h: f64,
    m: u32,
    draws: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = SplitMix64::stream(seed, 0);
    let sample = sample_convolution(model, draws, &mut rng)?;
    let mut acc = 0.0;
    for &xi in sample.values() {
        // only shifts with |x ± j - X| < h contribute
        let left: f64 = {
            let j_hi = (x - xi + h).floor();
            let j_lo = (x - xi - h).ceil().max(0.0);
            let mut s = 0.0;
            let mut j = j_lo;
            while j <= j_hi {
                s += k.w_deriv((x - j - xi) / h);
                j += 1.0;
            }
            s
        };
        let right: f64 = {
            let j_lo = (xi - x - h).ceil().max(1.0);
            let j_hi = (xi - x + h).floor();
            let mut s = 0.0;
            let mut j = j_lo;
            while j <= j_hi {
                s += k.w_deriv((x + j - xi) / h);
                j += 1.0;
            }
            s
        };
        let u = (t * left - (1.0 - t) * right) / (h * h);
        acc += u.powi(m as i32);
    }
    Ok(acc / draws as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deconv::InversionEstimator;

    fn base(est: Estimator, weight: WeightSpec) -> McConfig {
        McConfig {
            model: TrueModel::StandardNormal,
            kernel: Kernel::biweight(),
            n: 200,
            reps: 40,
            h: 0.5,
            h_pivot: 0.4,
            estimator: est,
            weight,
            eval: EvalPoints::Points(vec![-1.0, 0.0, 1.5]),
            seed: 11,
        }
    }

    #[test]
    fn point_mass_sample_lies_in_unit_interval() {
        let mut rng = SplitMix64::stream(1, 0);
        let s = sample_convolution(&TrueModel::PointMass(0.0), 500, &mut rng).unwrap();
        assert!(s.values().iter().all(|x| (0.0..1.0).contains(x)));
    }

    #[test]
    fn sample_mean_is_half_for_standard_normal() {
        let mut rng = SplitMix64::stream(5, 0);
        let n = 100_000;
        let s = sample_convolution(&TrueModel::StandardNormal, n, &mut rng).unwrap();
        let mean = s.values().iter().sum::<f64>() / n as f64;
        let sd = (1.0f64 + 1.0 / 12.0).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * sd / (n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn same_seed_same_sample() {
        let a = sample_convolution(&TrueModel::Beta22, 100, &mut SplitMix64::stream(9, 4)).unwrap();
        let b = sample_convolution(&TrueModel::Beta22, 100, &mut SplitMix64::stream(9, 4)).unwrap();
        assert_eq!(a, b);
        assert!(sample_convolution(&TrueModel::Beta22, 0, &mut SplitMix64::new(0)).is_err());
    }

    #[test]
    fn true_g_values() {
        let m = TrueModel::StandardNormal;
        assert!((true_g(&m, 0.5) - 0.382_924_922_548_026).abs() < 1e-12);
        let total = quad::simpson(|x| true_g(&m, x), -9.0, 10.0, 4000);
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn moments_of_known_values() {
        let mo = moments(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(mo.mean, 2.5);
        assert!((mo.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!(mo.skewness.abs() < 1e-15);
        // population kurtosis of {1,2,3,4}: 2.5625 / 1.5625
        assert!((mo.excess_kurtosis - (2.5625 / 1.5625 - 3.0)).abs() < 1e-14);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = base(Estimator::DensityCombined, WeightSpec::PivotHalf);
        let a = pointwise_study(&cfg).unwrap();
        let b = pointwise_study(&cfg).unwrap();
        assert_eq!(a.points, b.points);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c = pool.install(|| pointwise_study(&cfg)).unwrap();
        assert_eq!(a.points, c.points);
        assert!(a.points.iter().all(|p| p.variance >= 0.0));
    }

    #[test]
    fn replicate_matches_manual_loop() {
        let cfg = base(Estimator::DensityMinus, WeightSpec::PivotHalf);
        let rep = pointwise_study(&cfg).unwrap();
        let mut sum = 0.0;
        for r in 0..cfg.reps as u64 {
            let s = sample_convolution(&cfg.model, cfg.n, &mut SplitMix64::stream(cfg.seed, r)).unwrap();
            sum += InversionEstimator::new(&s, &cfg.kernel, Bandwidth::new(cfg.h).unwrap()).f_minus(0.0);
        }
        assert!((rep.point(0.0).unwrap().mean - sum / cfg.reps as f64).abs() < 1e-12);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = base(Estimator::DensityMinus, WeightSpec::PivotHalf);
        cfg.reps = 1;
        assert!(pointwise_study(&cfg).is_err());
        let mut cfg = base(Estimator::DensityWeighted, WeightSpec::PivotHalf);
        assert!(pointwise_study(&cfg).is_err());
        cfg.weight = WeightSpec::FixedT(2.0);
        assert!(pointwise_study(&cfg).is_err());
        let cfg = base(Estimator::DensityCombined, WeightSpec::PivotHalf);
        assert!(matches!(mise_study(&cfg), Err(Error::InvalidGrid(_))));
        let mut cfg = base(Estimator::DensityCombined, WeightSpec::default_pivot_h());
        cfg.eval = EvalPoints::Grid(Grid::from_range(-2.0, 2.0, 0.1).unwrap());
        assert!(matches!(mise_study(&cfg), Err(Error::InvalidGrid(_))));
        assert!(pivot_mse_study(&cfg).is_err());
    }

    #[test]
    fn one_sided_cdf_is_exact_in_its_own_tail() {
        let mut cfg = base(Estimator::CdfMinus, WeightSpec::PivotHalf);
        cfg.model = TrueModel::PointMass(0.0);
        cfg.h = 0.2;
        cfg.eval = EvalPoints::Points(vec![-5.0]);
        let left = pivot_mse_study(&cfg).unwrap();
        cfg.estimator = Estimator::CdfPlus;
        cfg.eval = EvalPoints::Points(vec![7.5]);
        let right = pivot_mse_study(&cfg).unwrap();
        for (p, v) in [(&left.points[0], 0.0), (&right.points[0], 1.0)] {
            assert_eq!(p.mean, v);
            assert_eq!(p.variance, 0.0);
            assert_eq!(p.mse, 0.0);
        }
        // the other series is periodic there, not constant
        cfg.estimator = Estimator::CdfMinus;
        let periodic = pivot_mse_study(&cfg).unwrap();
        assert!(periodic.points[0].variance > 0.0);
    }

    #[test]
    fn loglog_slope_of_power_law() {
        let xs = [500.0, 2000.0, 8000.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.8)).collect();
        assert!((loglog_slope(&xs, &ys) + 0.8).abs() < 1e-12);
    }

    #[test]
    fn second_summand_moment_matches_leading_order() {
        let m = TrueModel::StandardNormal;
        let k = Kernel::biweight();
        let (x, h) = (0.0, 0.1);
        for t in [1.0, 0.0, 0.5] {
            let emp = summand_moment(&m, &k, x, t, h, 2, 200_000, 17).unwrap();
            let th = theory::even_moment_u(&m, x, t, h, &k, 2).unwrap();
            assert!((emp / th - 1.0).abs() < 0.05, "t={t}: {emp} vs {th}");
        }
    }

    #[test]
    fn summand_mean_is_the_smoothed_density() {
        // E U = (1/h)∫w((x-u)/h) f(u) du for every t
        let m = TrueModel::StandardNormal;
        let k = Kernel::biweight();
        let (x, h) = (0.3, 0.25);
        let expected = theory::expected_estimate(&m, &k, h, x).unwrap();
        let draws = 400_000;
        let second = summand_moment(&m, &k, x, 0.5, h, 2, draws, 3).unwrap();
        let mean = summand_moment(&m, &k, x, 0.5, h, 1, draws, 3).unwrap();
        let se = (second / draws as f64).sqrt();
        assert!((mean - expected).abs() < 4.0 * se, "{mean} vs {expected} (se {se})");
    }

    #[test]
    fn mise_grid_covers_support() {
        let g = McConfig::default_mise_grid(&TrueModel::StandardNormal, 0.3).unwrap();
        assert!(g.x0 <= -6.5 - 1.3 && g.last() >= 6.5 + 1.3);
        assert!(g.dx <= 0.3 / 20.0 + 1e-15);
    }
}
