//! Smoothing kernels supported on `[-1, 1]`.
//!
//! Estimation needs a continuously differentiable symmetric probability
//! density with support `[-1, 1]`: the one-sided estimators differentiate the
//! kernel, and the variance constants involve `∫ w'²`. The biweight is the
//! default; the triweight is the smoother alternative. The Epanechnikov
//! kernel is kept only as a negative example for [`validate_w1`] (its
//! derivative jumps at the support endpoints).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Panels used for kernel functionals: 2049 nodes on `[-1, 1]`.
const FUNCTIONAL_PANELS: usize = 2048;
const FUNCTIONAL_TOL: f64 = 1e-8;

#[derive(Clone)]
enum Shape {
    Biweight,
    Triweight,
    Epanechnikov,
    Custom { w: RealFn, dw: RealFn },
}

/// The three moment functionals that enter every asymptotic constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Functionals {
    /// `∫ v² w(v) dv`
    pub m2: f64,
    /// `∫ w(v)² dv`
    pub l2: f64,
    /// `∫ w'(v)² dv`
    pub dl2: f64,
}

#[derive(Clone)]
pub struct Kernel {
    name: String,
    shape: Shape,
    functionals: Functionals,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("name", &self.name)
            .field("functionals", &self.functionals)
            .finish()
    }
}

impl Kernel {
    /// `w(x) = (15/16)(1 - x²)²` on `[-1, 1]`.
    pub fn biweight() -> Self {
        Kernel {
            name: "biweight".into(),
            shape: Shape::Biweight,
            functionals: Functionals {
                m2: 1.0 / 7.0,
                l2: 5.0 / 7.0,
                dl2: 15.0 / 7.0,
            },
        }
    }

    /// `w(x) = (35/32)(1 - x²)³` on `[-1, 1]`.
    pub fn triweight() -> Self {
        Kernel {
            name: "triweight".into(),
            shape: Shape::Triweight,
            functionals: Functionals {
                m2: 1.0 / 9.0,
                l2: 350.0 / 429.0,
                dl2: 35.0 / 11.0,
            },
        }
    }

    /// `w(x) = (3/4)(1 - x²)`. Not continuously differentiable at `±1`.
    pub fn epanechnikov() -> Self {
        Kernel {
            name: "epanechnikov".into(),
            shape: Shape::Epanechnikov,
            functionals: Functionals {
                m2: 0.2,
                l2: 0.6,
                dl2: 1.5,
            },
        }
    }

    /// A user-supplied kernel, already rescaled to `[-1, 1]`.
    ///
    /// Both closures are masked to zero outside `(-1, 1)`; the functionals are
    /// computed by quadrature.
    pub fn custom<W, D>(name: impl Into<String>, w: W, dw: D) -> Result<Self>
    where
        W: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut k = Kernel {
            name: name.into(),
            shape: Shape::Custom {
                w: Arc::new(w),
                dw: Arc::new(dw),
            },
            functionals: Functionals {
                m2: f64::NAN,
                l2: f64::NAN,
                dl2: f64::NAN,
            },
        };
        k.functionals = kernel_functionals(&k)?;
        Ok(k)
    }

    /// Built-in estimation kernels by CLI name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "biweight" => Ok(Kernel::biweight()),
            "triweight" => Ok(Kernel::triweight()),
            other => Err(Error::invalid(format!(
                "unknown kernel '{other}' (expected 'biweight' or 'triweight')"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support_radius(&self) -> f64 {
        1.0
    }

    pub fn functionals(&self) -> Functionals {
        self.functionals
    }

    pub fn m2(&self) -> f64 {
        self.functionals.m2
    }

    pub fn l2(&self) -> f64 {
        self.functionals.l2
    }

    pub fn dl2(&self) -> f64 {
        self.functionals.dl2
    }

    #[inline]
    pub fn w(&self, u: f64) -> f64 {
        if !(u.abs() < 1.0) {
            return 0.0;
        }
        let s = 1.0 - u * u;
        match &self.shape {
            Shape::Biweight => 0.9375 * s * s,
            Shape::Triweight => 1.09375 * s * s * s,
            Shape::Epanechnikov => 0.75 * s,
            Shape::Custom { w, .. } => w(u),
        }
    }

    #[inline]
    pub fn w_deriv(&self, u: f64) -> f64 {
        if !(u.abs() < 1.0) {
            return 0.0;
        }
        let s = 1.0 - u * u;
        match &self.shape {
            Shape::Biweight => -3.75 * u * s,
            Shape::Triweight => -6.5625 * u * s * s,
            Shape::Epanechnikov => -1.5 * u,
            Shape::Custom { dw, .. } => dw(u),
        }
    }

    /// `∫ w'(v)^m dv` by quadrature.
    pub fn deriv_power_integral(&self, m: u32) -> Result<f64> {
        let exp = m as i32;
        quad::simpson_checked(
            |v| self.w_deriv(v).powi(exp),
            -1.0,
            1.0,
            &[0.0],
            FUNCTIONAL_PANELS,
            FUNCTIONAL_TOL,
        )
    }
}

/// `(∫v²w, ∫w², ∫w'²)` by composite Simpson on `[-1, 1]`.
pub fn kernel_functionals(k: &Kernel) -> Result<Functionals> {
    let integrate = |f: &dyn Fn(f64) -> f64| {
        quad::simpson_checked(f, -1.0, 1.0, &[0.0], FUNCTIONAL_PANELS, FUNCTIONAL_TOL)
    };
    Ok(Functionals {
        m2: integrate(&|v| v * v * k.w(v))?,
        l2: integrate(&|v| k.w(v).powi(2))?,
        dl2: integrate(&|v| k.w_deriv(v).powi(2))?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub kernel: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the kernel conditions. Failures are reported, never raised.
pub fn validate_w1(k: &Kernel) -> ValidationReport {
    let grid: Vec<f64> = (0..=2000).map(|i| -1.0 + i as f64 * 1e-3).collect();
    let mut checks = Vec::with_capacity(6);

    let integral = quad::simpson_piecewise(|v| k.w(v), -1.0, 1.0, &[0.0], FUNCTIONAL_PANELS);
    checks.push(Check {
        name: "unit_integral",
        passed: (integral - 1.0).abs() <= 1e-10,
        detail: format!("integral = {integral:.17e}"),
    });

    let min_w = grid.iter().map(|&v| k.w(v)).fold(f64::INFINITY, f64::min);
    checks.push(Check {
        name: "nonnegative",
        passed: min_w >= 0.0,
        detail: format!("min w on grid = {min_w:e}"),
    });

    let asym = grid
        .iter()
        .map(|&v| (k.w(v) - k.w(-v)).abs())
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "symmetric",
        passed: asym <= 1e-12,
        detail: format!("max |w(v) - w(-v)| = {asym:e}"),
    });

    let outside = [1.0, 1.0 + 1e-9, 1.25, 2.0, 10.0];
    let leak = outside
        .iter()
        .flat_map(|&v| [k.w(v), k.w(-v), k.w_deriv(v), k.w_deriv(-v)])
        .map(f64::abs)
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "compact_support",
        passed: leak == 0.0,
        detail: format!("max |w|,|w'| outside (-1, 1) = {leak:e}"),
    });

    // w' must match the centered difference of w at interior points
    let eps = 1e-5;
    let fd_err = (1..=101)
        .map(|i| -1.0 + 2.0 * i as f64 / 102.0)
        .map(|v| ((k.w(v + eps) - k.w(v - eps)) / (2.0 * eps) - k.w_deriv(v)).abs())
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "derivative_consistent",
        passed: fd_err <= 1e-5,
        detail: format!("max finite-difference mismatch = {fd_err:e}"),
    });

    // continuity of w' across the support endpoints
    let d = 1e-7;
    let jump = [1.0, -1.0]
        .iter()
        .map(|&e: &f64| (k.w_deriv(e * (1.0 - d)) - k.w_deriv(e * (1.0 + d))).abs())
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "derivative_continuous",
        passed: jump <= 1e-4,
        detail: format!("max jump of w' across ±1 = {jump:e}"),
    });

    ValidationReport {
        kernel: k.name.clone(),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn biweight_values() {
        let k = Kernel::biweight();
        assert_eq!(k.w(0.0), 0.9375);
        assert_eq!(k.w(1.0), 0.0);
        assert_eq!(k.w(-1.0), 0.0);
        assert_eq!(k.w_deriv(0.0), 0.0);
        assert_eq!(k.w(0.5), 0.9375 * 0.5625);
        assert!((k.w_deriv(0.4) - (-3.75 * 0.4 * 0.84)).abs() < 1e-15);
    }

    #[test]
    fn cached_functionals_match_quadrature() {
        for k in [Kernel::biweight(), Kernel::triweight(), Kernel::epanechnikov()] {
            let q = kernel_functionals(&k).unwrap();
            let c = k.functionals();
            assert!((q.m2 - c.m2).abs() < 1e-10, "{} m2", k.name());
            assert!((q.l2 - c.l2).abs() < 1e-10, "{} l2", k.name());
            assert!((q.dl2 - c.dl2).abs() < 1e-10, "{} dl2", k.name());
        }
    }

    #[test]
    fn first_moment_vanishes() {
        for k in [Kernel::biweight(), Kernel::triweight()] {
            let m1 = quad::simpson(|v| v * k.w(v), -1.0, 1.0, 2048);
            assert!(m1.abs() < 1e-15);
        }
    }

    #[test]
    fn triweight_second_moment() {
        let q = kernel_functionals(&Kernel::triweight()).unwrap();
        assert!((q.m2 - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn symmetry_is_exact_for_builtins() {
        for k in [Kernel::biweight(), Kernel::triweight()] {
            for i in 0..=1000 {
                let v = i as f64 / 1000.0;
                assert_eq!(k.w(v), k.w(-v));
                assert_eq!(k.w_deriv(v), -k.w_deriv(-v));
            }
        }
    }

    #[test]
    fn builtins_pass_validation() {
        for k in [Kernel::biweight(), Kernel::triweight()] {
            let r = validate_w1(&k);
            assert!(r.all_passed(), "{r:?}");
        }
    }

    #[test]
    fn asymmetric_kernel_fails_symmetry() {
        let k = Kernel::custom(
            "ramp",
            |x: f64| if x >= 0.0 { 2.0 * (1.0 - x) } else { 0.0 },
            |x: f64| if x >= 0.0 { -2.0 } else { 0.0 },
        )
        .unwrap();
        let r = validate_w1(&k);
        assert!(!r.check("symmetric").unwrap().passed);
        assert!(r.check("unit_integral").unwrap().passed);
        assert!(r.check("nonnegative").unwrap().passed);
    }

    #[test]
    fn epanechnikov_fails_derivative_continuity() {
        let k = Kernel::epanechnikov();
        assert!(k.w_deriv(1.0 - 1e-12).abs() > 1.49);
        let r = validate_w1(&k);
        let c = r.check("derivative_continuous").unwrap();
        assert!(!c.passed);
        assert!(r.check("symmetric").unwrap().passed);
        assert!(r.check("unit_integral").unwrap().passed);
    }

    #[test]
    fn custom_kernel_functionals_from_quadrature() {
        let k = Kernel::custom(
            "biweight-copy",
            |x: f64| 0.9375 * (1.0 - x * x).powi(2),
            |x: f64| -3.75 * x * (1.0 - x * x),
        )
        .unwrap();
        let f = k.functionals();
        assert!((f.m2 - 1.0 / 7.0).abs() < 1e-10);
        assert!((f.l2 - 5.0 / 7.0).abs() < 1e-10);
        assert!((f.dl2 - 15.0 / 7.0).abs() < 1e-10);
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(Kernel::by_name("gaussian").is_err());
        assert!(Kernel::by_name("epanechnikov").is_err());
        assert_eq!(Kernel::by_name("triweight").unwrap().name(), "triweight");
    }

    #[test]
    fn fourth_power_of_biweight_derivative() {
        // (15/4)^4 * B(5/2, 5) with B(5/2, 5) = 256/15015
        let expected = (3.75f64).powi(4) * 256.0 / 15015.0;
        let got = Kernel::biweight().deriv_power_integral(4).unwrap();
        assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
    }
}
