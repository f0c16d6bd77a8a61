//! Inversion estimators for uniform deconvolution.
//!
//! With `g(x) = F(x) - F(x - 1)` the distribution function and the density
//! can be recovered from `g` by either of two shift series:
//!
//! ```text
//! F(x) = Σ_{j≥0} g(x - j)         F(x) = 1 - Σ_{j≥1} g(x + j)
//! f(x) = Σ_{j≥0} g'(x - j)        f(x) = -Σ_{j≥1} g'(x + j)
//! ```
//!
//! Substituting the direct kernel estimate gives the left (`minus`) and right
//! (`plus`) estimators. Because the kernel has compact support every series is
//! a finite sum; the bounds used here are exact, so extending them never
//! changes a result.
//!
//! The left estimators have small variance where `F` is small and the right
//! ones where `F` is close to one. The combined estimators weight them with a
//! pivot estimate `F̂` of `F`:
//! `(1 - F̂(x))·minus(x) + F̂(x)·plus(x)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kde::{g_hat, g_hat_deriv, Bandwidth, Sample};
use crate::kernels::Kernel;
use crate::quad;

/// A distribution function used as the pivot weight `H`.
#[derive(Clone)]
pub enum Cdf {
    Logistic { loc: f64, scale: f64 },
    /// Logistic centered at the median of whatever sample it is applied to.
    LogisticAtMedian { scale: f64 },
    /// `H(x) = 1{x ≥ at}`. `at = -inf` gives `H ≡ 1`.
    Step { at: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Cdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cdf::Logistic { loc, scale } => write!(f, "logistic({loc},{scale})"),
            Cdf::LogisticAtMedian { scale } => write!(f, "logistic(median,{scale})"),
            Cdf::Step { at } => write!(f, "step({at})"),
            Cdf::Custom(_) => f.write_str("custom"),
        }
    }
}

impl Cdf {
    pub fn eval(&self, x: f64, sample: &Sample) -> f64 {
        self.eval_with_median(x, median(sample))
    }

    /// Evaluate with an explicit center for [`Cdf::LogisticAtMedian`].
    pub fn eval_with_median(&self, x: f64, median: f64) -> f64 {
        match self {
            Cdf::Logistic { loc, scale } => logistic((x - loc) / scale),
            Cdf::LogisticAtMedian { scale } => logistic((x - median) / scale),
            Cdf::Step { at } => {
                if x >= *at {
                    1.0
                } else {
                    0.0
                }
            }
            Cdf::Custom(h) => h(x),
        }
    }
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn median(s: &Sample) -> f64 {
    let v = s.values();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// How the two one-sided estimators are weighted.
#[derive(Debug, Clone)]
pub enum WeightSpec {
    /// Fixed weight `t` on the left estimator, `1 - t` on the right one.
    FixedT(f64),
    /// `F̂ = ½(F⁻ + F⁺)`.
    PivotHalf,
    /// `F̂ = (1 - H)F⁻ + H F⁺`; keeps the combined estimator square integrable.
    PivotH(Cdf),
    /// `F̂` read off a precomputed curve (linear interpolation, flat beyond the ends).
    PivotExternal(Curve),
}

impl WeightSpec {
    /// Logistic `H` with unit scale centered at the sample median.
    pub fn default_pivot_h() -> Self {
        WeightSpec::PivotH(Cdf::LogisticAtMedian { scale: 1.0 })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::FixedT(t) if !(0.0..=1.0).contains(t) => Err(Error::invalid(format!(
                "weight t must lie in [0, 1], got {t}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            WeightSpec::FixedT(t) => format!("fixed-t({t})"),
            WeightSpec::PivotHalf => "pivot-half".into(),
            WeightSpec::PivotH(h) => format!("pivot-h({h:?})"),
            WeightSpec::PivotExternal(c) => format!("pivot-external({})", c.meta.estimator),
        }
    }
}

/// Clip a pivot value into `[0, 1]` so the combination stays convex.
pub fn clip_unit(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// The one-sided estimators and their fixed-weight mixtures for one sample,
/// kernel and bandwidth.
#[derive(Debug, Clone, Copy)]
pub struct InversionEstimator<'a> {
    sample: &'a Sample,
    kernel: &'a Kernel,
    h: Bandwidth,
}

impl<'a> InversionEstimator<'a> {
    pub fn new(sample: &'a Sample, kernel: &'a Kernel, h: Bandwidth) -> Self {
        InversionEstimator { sample, kernel, h }
    }

    pub fn bandwidth(&self) -> Bandwidth {
        self.h
    }

    /// Shifts `j` for the left series at `x`. Terms outside this range are
    /// exactly zero: `x - j` is either beyond `max + h` or below `min - h`.
    fn left_shifts(&self, x: f64) -> std::ops::RangeInclusive<u64> {
        let h = self.h.get();
        let last = (x - (self.sample.min() - h)).ceil().max(0.0);
        let first = ((x - (self.sample.max() + h)).floor() - 1.0).max(0.0);
        (first as u64)..=(last as u64)
    }

    /// Shifts `j ≥ 1` for the right series at `x`, same exactness.
    fn right_shifts(&self, x: f64) -> std::ops::RangeInclusive<u64> {
        let h = self.h.get();
        let last = ((self.sample.max() + h) - x).ceil().max(1.0);
        let first = (((self.sample.min() - h) - x).floor() - 1.0).max(1.0);
        (first as u64)..=(last as u64)
    }

    /// `f⁻(x) = Σ_{j≥0} g'_nh(x - j)`.
    pub fn f_minus(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for j in self.left_shifts(x) {
            acc += g_hat_deriv(self.sample, self.kernel, self.h, x - j as f64);
        }
        acc
    }

    /// `f⁺(x) = -Σ_{j≥1} g'_nh(x + j)`.
    pub fn f_plus(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for j in self.right_shifts(x) {
            acc += g_hat_deriv(self.sample, self.kernel, self.h, x + j as f64);
        }
        -acc
    }

    pub fn f_weighted(&self, x: f64, t: f64) -> f64 {
        let minus = self.f_minus(x);
        let plus = self.f_plus(x);
        t * minus + (1.0 - t) * plus
    }

    /// `F⁻(x) = Σ_{j≥0} g_nh(x - j)`.
    pub fn cdf_minus(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for j in self.left_shifts(x) {
            acc += g_hat(self.sample, self.kernel, self.h, x - j as f64);
        }
        acc
    }

    /// `F⁺(x) = 1 - Σ_{j≥1} g_nh(x + j)`.
    pub fn cdf_plus(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for j in self.right_shifts(x) {
            acc += g_hat(self.sample, self.kernel, self.h, x + j as f64);
        }
        1.0 - acc
    }

    pub fn cdf_weighted(&self, x: f64, t: f64) -> f64 {
        let minus = self.cdf_minus(x);
        let plus = self.cdf_plus(x);
        t * minus + (1.0 - t) * plus
    }

    /// Unclipped `½(F⁻ + F⁺)`.
    pub fn pivot_half(&self, x: f64) -> f64 {
        self.cdf_weighted(x, 0.5)
    }

    /// Unclipped `(1 - H(x))F⁻(x) + H(x)F⁺(x)`.
    pub fn pivot_h(&self, x: f64, h: &Cdf) -> f64 {
        let hx = h.eval(x, self.sample);
        self.cdf_weighted(x, 1.0 - hx)
    }

    /// Clipped pivot value `F̂(x)` for the given weight.
    pub fn pivot_weight(&self, x: f64, weight: &WeightSpec) -> f64 {
        match weight {
            WeightSpec::FixedT(t) => 1.0 - t,
            WeightSpec::PivotHalf => clip_unit(self.pivot_half(x)),
            WeightSpec::PivotH(h) => clip_unit(self.pivot_h(x, h)),
            WeightSpec::PivotExternal(c) => clip_unit(c.at(x)),
        }
    }
}

/// A density estimator paired with a pivot estimator at its own bandwidth.
#[derive(Debug, Clone)]
pub struct Combined<'a> {
    pub main: InversionEstimator<'a>,
    pub pivot: InversionEstimator<'a>,
    pub weight: &'a WeightSpec,
}

impl<'a> Combined<'a> {
    pub fn new(
        sample: &'a Sample,
        kernel: &'a Kernel,
        h: Bandwidth,
        h_pivot: Bandwidth,
        weight: &'a WeightSpec,
    ) -> Self {
        Combined {
            main: InversionEstimator::new(sample, kernel, h),
            pivot: InversionEstimator::new(sample, kernel, h_pivot),
            weight,
        }
    }

    /// `(1 - F̂)f⁻ + F̂ f⁺`.
    pub fn f_combined(&self, x: f64) -> f64 {
        let fhat = self.pivot.pivot_weight(x, self.weight);
        (1.0 - fhat) * self.main.f_minus(x) + fhat * self.main.f_plus(x)
    }

    /// `(1 - F̂)F⁻ + F̂ F⁺`. Not monotonized.
    pub fn cdf_combined(&self, x: f64) -> f64 {
        let fhat = self.pivot.pivot_weight(x, self.weight);
        (1.0 - fhat) * self.main.cdf_minus(x) + fhat * self.main.cdf_plus(x)
    }
}

/// Which curve to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    /// The direct estimate of the observation density `g`.
    DirectDensity,
    DensityMinus,
    DensityPlus,
    /// Uses `t` from [`WeightSpec::FixedT`].
    DensityWeighted,
    DensityCombined,
    CdfMinus,
    CdfPlus,
    /// Uses `t` from [`WeightSpec::FixedT`].
    CdfWeighted,
    CdfCombined,
    /// `½(F⁻ + F⁺)` at the main bandwidth, unclipped.
    PivotHalf,
    /// `(1 - H)F⁻ + H F⁺` at the main bandwidth, unclipped; `H` from
    /// [`WeightSpec::PivotH`] or the default logistic.
    PivotH,
}

impl Estimator {
    pub const ALL: [Estimator; 11] = [
        Estimator::DirectDensity,
        Estimator::DensityMinus,
        Estimator::DensityPlus,
        Estimator::DensityWeighted,
        Estimator::DensityCombined,
        Estimator::CdfMinus,
        Estimator::CdfPlus,
        Estimator::CdfWeighted,
        Estimator::CdfCombined,
        Estimator::PivotHalf,
        Estimator::PivotH,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::DirectDensity => "g-hat",
            Estimator::DensityMinus => "f-minus",
            Estimator::DensityPlus => "f-plus",
            Estimator::DensityWeighted => "f-weighted",
            Estimator::DensityCombined => "f-combined",
            Estimator::CdfMinus => "cdf-minus",
            Estimator::CdfPlus => "cdf-plus",
            Estimator::CdfWeighted => "cdf-weighted",
            Estimator::CdfCombined => "cdf-combined",
            Estimator::PivotHalf => "pivot-half",
            Estimator::PivotH => "pivot-h",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Estimator::ALL
            .iter()
            .copied()
            .find(|e| e.name() == name)
            .ok_or_else(|| {
                let names: Vec<_> = Estimator::ALL.iter().map(|e| e.name()).collect();
                Error::invalid(format!(
                    "unknown estimator '{name}' (expected one of: {})",
                    names.join(", ")
                ))
            })
    }

    /// Density-type (as opposed to distribution-function-type) output.
    pub fn is_density(self) -> bool {
        matches!(
            self,
            Estimator::DirectDensity
                | Estimator::DensityMinus
                | Estimator::DensityPlus
                | Estimator::DensityWeighted
                | Estimator::DensityCombined
        )
    }

    pub fn uses_pivot(self) -> bool {
        matches!(self, Estimator::DensityCombined | Estimator::CdfCombined)
    }
}

/// Everything except the data needed to evaluate an estimator.
#[derive(Debug, Clone)]
pub struct EstimatorSpec {
    pub estimator: Estimator,
    pub h: Bandwidth,
    pub h_pivot: Bandwidth,
    pub weight: WeightSpec,
}

impl EstimatorSpec {
    pub fn validate(&self) -> Result<()> {
        self.weight.validate()?;
        match (self.estimator, &self.weight) {
            (Estimator::DensityWeighted | Estimator::CdfWeighted, WeightSpec::FixedT(_)) => Ok(()),
            (Estimator::DensityWeighted | Estimator::CdfWeighted, w) => Err(Error::invalid(format!(
                "estimator '{}' needs a fixed weight t, got {}",
                self.estimator.name(),
                w.describe()
            ))),
            _ => Ok(()),
        }
    }

    fn fixed_t(&self) -> f64 {
        match self.weight {
            WeightSpec::FixedT(t) => t,
            _ => unreachable!("validated"),
        }
    }

    /// Evaluate at `x`. Call [`EstimatorSpec::validate`] first.
    pub fn eval(&self, sample: &Sample, kernel: &Kernel, x: f64) -> f64 {
        let est = InversionEstimator::new(sample, kernel, self.h);
        match self.estimator {
            Estimator::DirectDensity => g_hat(sample, kernel, self.h, x),
            Estimator::DensityMinus => est.f_minus(x),
            Estimator::DensityPlus => est.f_plus(x),
            Estimator::DensityWeighted => est.f_weighted(x, self.fixed_t()),
            Estimator::CdfMinus => est.cdf_minus(x),
            Estimator::CdfPlus => est.cdf_plus(x),
            Estimator::CdfWeighted => est.cdf_weighted(x, self.fixed_t()),
            Estimator::PivotHalf => est.pivot_half(x),
            Estimator::PivotH => match &self.weight {
                WeightSpec::PivotH(h) => est.pivot_h(x, h),
                _ => est.pivot_h(x, &Cdf::LogisticAtMedian { scale: 1.0 }),
            },
            Estimator::DensityCombined => {
                Combined::new(sample, kernel, self.h, self.h_pivot, &self.weight).f_combined(x)
            }
            Estimator::CdfCombined => {
                Combined::new(sample, kernel, self.h, self.h_pivot, &self.weight).cdf_combined(x)
            }
        }
    }
}

/// Uniform evaluation grid `x0 + i·dx`, `i < count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x0: f64,
    pub dx: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(x0: f64, dx: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {count}")));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidGrid(format!("step must be positive, got {dx}")));
        }
        if !x0.is_finite() {
            return Err(Error::InvalidGrid(format!("start must be finite, got {x0}")));
        }
        Ok(Grid { x0, dx, count })
    }

    /// Points `lo, lo + step, …` up to the last one not exceeding `hi`.
    pub fn from_range(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
        }
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::InvalidGrid(format!("need lo < hi, got {lo}:{hi}")));
        }
        // tolerate representation error in (hi - lo) / step
        let span = ((hi - lo) / step * (1.0 + 1e-12)).floor();
        Grid::new(lo, step, span as usize + 1)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.point(i))
    }

    pub fn last(&self) -> f64 {
        self.point(self.count - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveMeta {
    pub estimator: String,
    pub n: usize,
    pub h: f64,
    pub h_pivot: Option<f64>,
    pub kernel: String,
    pub weight: String,
    /// Extra `key=value` provenance (command line, seed, version, ...).
    pub extra: Vec<(String, String)>,
}

/// An estimator evaluated on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
    pub meta: CurveMeta,
}

impl Curve {
    pub fn new(x0: f64, dx: f64, values: Vec<f64>, meta: CurveMeta) -> Result<Self> {
        Grid::new(x0, dx, values.len())?;
        Ok(Curve { x0, dx, values, meta })
    }

    pub fn grid(&self) -> Grid {
        Grid {
            x0: self.x0,
            dx: self.dx,
            count: self.values.len(),
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    /// Linear interpolation, constant beyond the first and last points.
    pub fn at(&self, x: f64) -> f64 {
        let pos = (x - self.x0) / self.dx;
        let last = self.values.len() - 1;
        if !(pos > 0.0) {
            return self.values[0];
        }
        if pos >= last as f64 {
            return self.values[last];
        }
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Trapezoid integral over the grid.
    pub fn integral(&self) -> f64 {
        quad::trapezoid(&self.values, self.dx)
    }

    /// Truncate at zero and rescale to unit trapezoid integral.
    ///
    /// Optional post-processing for density curves; the raw estimator is
    /// neither nonnegative nor normalized.
    pub fn clip_and_rescale(&self) -> Result<Curve> {
        let clipped: Vec<f64> = self.values.iter().map(|v| v.max(0.0)).collect();
        let mass = quad::trapezoid(&clipped, self.dx);
        if !(mass > 0.0) {
            return Err(Error::invalid("curve has no positive mass to rescale"));
        }
        let mut out = self.clone();
        out.values = clipped.into_iter().map(|v| v / mass).collect();
        out.meta.extra.push(("normalized".into(), "clip-and-rescale".into()));
        Ok(out)
    }
}

/// Evaluate an estimator over a grid.
pub fn evaluate_curve(
    sample: &Sample,
    kernel: &Kernel,
    spec: &EstimatorSpec,
    grid: Grid,
) -> Result<Curve> {
    let grid = Grid::new(grid.x0, grid.dx, grid.count)?;
    spec.validate()?;
    let values: Vec<f64> = grid.points().map(|x| spec.eval(sample, kernel, x)).collect();
    let meta = CurveMeta {
        estimator: spec.estimator.name().to_string(),
        n: sample.len(),
        h: spec.h.get(),
        h_pivot: spec.estimator.uses_pivot().then(|| spec.h_pivot.get()),
        kernel: kernel.name().to_string(),
        weight: spec.weight.describe(),
        extra: if spec.h.separates_shifts() {
            Vec::new()
        } else {
            vec![("note".into(), "h >= 1/2: shifted kernel summands overlap".into())]
        },
    };
    Curve::new(grid.x0, grid.dx, values, meta)
}

/// Central-difference step used by the exact-`g` inversion oracles.
pub const ORACLE_DIFF_STEP: f64 = 1e-5;

fn central_diff(g: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    (g(x + ORACLE_DIFF_STEP) - g(x - ORACLE_DIFF_STEP)) / (2.0 * ORACLE_DIFF_STEP)
}

/// `Σ_{j=0..j_max} g'(x - j)` for a known observation density `g`.
pub fn true_inversion_density(g: &dyn Fn(f64) -> f64, x: f64, j_max: u32) -> f64 {
    (0..=j_max).map(|j| central_diff(g, x - j as f64)).sum()
}

/// `-Σ_{j=1..j_max} g'(x + j)`.
pub fn true_inversion_density_right(g: &dyn Fn(f64) -> f64, x: f64, j_max: u32) -> f64 {
    -(1..=j_max).map(|j| central_diff(g, x + j as f64)).sum::<f64>()
}

/// `Σ_{j=0..j_max} g(x - j)`.
pub fn true_inversion_cdf(g: &dyn Fn(f64) -> f64, x: f64, j_max: u32) -> f64 {
    (0..=j_max).map(|j| g(x - j as f64)).sum()
}

/// `1 - Σ_{j=1..j_max} g(x + j)`.
pub fn true_inversion_cdf_right(g: &dyn Fn(f64) -> f64, x: f64, j_max: u32) -> f64 {
    1.0 - (1..=j_max).map(|j| g(x + j as f64)).sum::<f64>()
}
