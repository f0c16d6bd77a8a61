//! Ground-truth models for `Y`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::special::{normal_cdf, normal_pdf};

/// Law of the unobserved `Y`, with closed-form `F`, `f`, `f'`, `f''`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrueModel {
    StandardNormal,
    /// Uniform on `[0, 1)`; `g` is then the triangular density on `[0, 2)`.
    Uniform01,
    /// Beta(2, 2): `f(y) = 6y(1 - y)` on `[0, 1]`.
    Beta22,
    /// Degenerate `Y ≡ a`; only `F` and sampling are meaningful.
    PointMass(f64),
}

impl fmt::Display for TrueModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrueModel::StandardNormal => f.write_str("stdnormal"),
            TrueModel::Uniform01 => f.write_str("uniform"),
            TrueModel::Beta22 => f.write_str("beta22"),
            TrueModel::PointMass(a) => write!(f, "pointmass:{a}"),
        }
    }
}

impl TrueModel {
    /// Parses `stdnormal`, `uniform`, `beta22` or `pointmass:<a>`.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "stdnormal" | "normal" => Ok(TrueModel::StandardNormal),
            "uniform" => Ok(TrueModel::Uniform01),
            "beta22" => Ok(TrueModel::Beta22),
            _ => {
                if let Some(a) = name.strip_prefix("pointmass:") {
                    let a: f64 = a
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad point mass location '{a}'")))?;
                    if a.is_finite() {
                        return Ok(TrueModel::PointMass(a));
                    }
                }
                Err(Error::invalid(format!(
                    "unknown model '{name}' (expected stdnormal, uniform, beta22 or pointmass:<a>)"
                )))
            }
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn f(&self, y: f64) -> f64 {
        match *self {
            TrueModel::StandardNormal => normal_pdf(y),
            TrueModel::Uniform01 => {
                if (0.0..1.0).contains(&y) {
                    1.0
                } else {
                    0.0
                }
            }
            TrueModel::Beta22 => {
                if (0.0..=1.0).contains(&y) {
                    6.0 * y * (1.0 - y)
                } else {
                    0.0
                }
            }
            TrueModel::PointMass(_) => 0.0,
        }
    }

    pub fn cdf(&self, y: f64) -> f64 {
        match *self {
            TrueModel::StandardNormal => normal_cdf(y),
            TrueModel::Uniform01 => y.clamp(0.0, 1.0),
            TrueModel::Beta22 => {
                let y = y.clamp(0.0, 1.0);
                y * y * (3.0 - 2.0 * y)
            }
            TrueModel::PointMass(a) => {
                if y >= a {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `f'(y)` (one-sided limits are not distinguished at kinks).
    pub fn f1(&self, y: f64) -> f64 {
        match *self {
            TrueModel::StandardNormal => -y * normal_pdf(y),
            TrueModel::Beta22 if (0.0..=1.0).contains(&y) => 6.0 - 12.0 * y,
            _ => 0.0,
        }
    }

    pub fn f2(&self, y: f64) -> f64 {
        match *self {
            TrueModel::StandardNormal => (y * y - 1.0) * normal_pdf(y),
            TrueModel::Beta22 if (0.0..=1.0).contains(&y) => -12.0,
            _ => 0.0,
        }
    }

    /// Density of `X = Y + Z`: `g(x) = F(x) - F(x - 1)`.
    pub fn g(&self, x: f64) -> f64 {
        self.cdf(x) - self.cdf(x - 1.0)
    }

    /// Draw one `Y` by inversion.
    pub fn sample_y(&self, rng: &mut SplitMix64) -> f64 {
        match *self {
            TrueModel::StandardNormal => rng.standard_normal(),
            TrueModel::Uniform01 => rng.uniform(),
            TrueModel::Beta22 => {
                // F(y) = u solved on the trigonometric branch that lands in [0, 1]
                let u = rng.uniform();
                0.5 + (((1.0 - 2.0 * u).acos() + 4.0 * PI) / 3.0).cos()
            }
            TrueModel::PointMass(a) => a,
        }
    }

    /// Smallest interval carrying all of the mass, when bounded.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            TrueModel::StandardNormal => None,
            TrueModel::Uniform01 | TrueModel::Beta22 => Some((0.0, 1.0)),
            TrueModel::PointMass(a) => Some((a, a)),
        }
    }

    /// Interval outside which `f` and `1 - F` / `F` are negligible (below 1e-9).
    pub fn support_hint(&self) -> (f64, f64) {
        self.support().unwrap_or((-6.5, 6.5))
    }

    /// Points where `f` or one of its derivatives is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            TrueModel::StandardNormal => vec![],
            TrueModel::Uniform01 | TrueModel::Beta22 => vec![0.0, 1.0],
            TrueModel::PointMass(a) => vec![a],
        }
    }

    pub fn median(&self) -> f64 {
        match *self {
            TrueModel::StandardNormal => 0.0,
            TrueModel::Uniform01 | TrueModel::Beta22 => 0.5,
            TrueModel::PointMass(a) => a,
        }
    }

    /// `∫ f''(y)² dy`, when `f` is twice continuously differentiable.
    pub fn int_f2_sq(&self) -> Option<f64> {
        match self {
            TrueModel::StandardNormal => Some(3.0 / (8.0 * PI.sqrt())),
            _ => None,
        }
    }

    /// `∫ f'(y)² dy`, when `f` is continuously differentiable.
    pub fn int_f1_sq(&self) -> Option<f64> {
        match self {
            TrueModel::StandardNormal => Some(1.0 / (4.0 * PI.sqrt())),
            _ => None,
        }
    }

    /// `∫ F(y)(1 - F(y)) dy`.
    pub fn int_cdf_var(&self) -> f64 {
        match self {
            TrueModel::StandardNormal => 1.0 / PI.sqrt(),
            TrueModel::Uniform01 => 1.0 / 6.0,
            TrueModel::Beta22 => 9.0 / 70.0,
            TrueModel::PointMass(_) => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    const SMOOTH: [TrueModel; 3] = [TrueModel::StandardNormal, TrueModel::Uniform01, TrueModel::Beta22];

    #[test]
    fn names_round_trip() {
        for m in SMOOTH.into_iter().chain([TrueModel::PointMass(0.25)]) {
            assert_eq!(TrueModel::from_name(&m.name()).unwrap(), m);
        }
        assert!(TrueModel::from_name("cauchy").is_err());
        assert!(TrueModel::from_name("pointmass:abc").is_err());
    }

    #[test]
    fn densities_integrate_to_one() {
        for m in SMOOTH {
            let (lo, hi) = m.support().unwrap_or((-12.0, 12.0));
            let total = quad::simpson_piecewise(|y| m.f(y), lo, hi, &m.breakpoints(), 4096);
            assert!((total - 1.0).abs() < 1e-8, "{m}: {total}");
        }
    }

    #[test]
    fn cdf_is_monotone_with_limits() {
        for m in SMOOTH.into_iter().chain([TrueModel::PointMass(0.3)]) {
            let mut prev = 0.0;
            for i in 0..=4000 {
                let y = -10.0 + i as f64 * 0.005;
                let c = m.cdf(y);
                assert!(c >= prev && (0.0..=1.0).contains(&c));
                prev = c;
            }
            assert!(m.cdf(-1e6) < 1e-6);
            assert!(m.cdf(1e6) > 1.0 - 1e-6);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let eps = 1e-5;
        for m in SMOOTH {
            let (lo, hi) = m.support().map(|(a, b)| (a + 0.01, b - 0.01)).unwrap_or((-4.0, 4.0));
            for i in 0..=100 {
                let y = lo + (hi - lo) * i as f64 / 100.0;
                let d1 = (m.f(y + eps) - m.f(y - eps)) / (2.0 * eps);
                let d2 = (m.f1(y + eps) - m.f1(y - eps)) / (2.0 * eps);
                assert!((d1 - m.f1(y)).abs() <= 1e-5 * m.f1(y).abs().max(1e-2), "{m} f1 at {y}");
                assert!((d2 - m.f2(y)).abs() <= 1e-5 * m.f2(y).abs().max(1e-2), "{m} f2 at {y}");
                let dc = (m.cdf(y + eps) - m.cdf(y - eps)) / (2.0 * eps);
                assert!((dc - m.f(y)).abs() <= 1e-5 * m.f(y).max(1e-2), "{m} F' at {y}");
            }
        }
    }

    #[test]
    fn gaussian_closed_forms_match_quadrature() {
        let m = TrueModel::StandardNormal;
        let f2 = quad::simpson(|y| m.f2(y).powi(2), -12.0, 12.0, 8192);
        let f1 = quad::simpson(|y| m.f1(y).powi(2), -12.0, 12.0, 8192);
        let fv = quad::simpson(|y| m.cdf(y) * (1.0 - m.cdf(y)), -12.0, 12.0, 8192);
        assert!((f2 - m.int_f2_sq().unwrap()).abs() < 1e-8);
        assert!((f1 - m.int_f1_sq().unwrap()).abs() < 1e-8);
        assert!((fv - m.int_cdf_var()).abs() < 1e-8);
        assert!((m.int_f2_sq().unwrap() - 0.211_571).abs() < 1e-6);
        assert!((m.int_cdf_var() - 0.564_190).abs() < 1e-6);
    }

    #[test]
    fn compact_model_integrals() {
        for m in [TrueModel::Uniform01, TrueModel::Beta22] {
            let v = quad::simpson(|y| m.cdf(y) * (1.0 - m.cdf(y)), 0.0, 1.0, 2048);
            assert!((v - m.int_cdf_var()).abs() < 1e-12, "{m}");
        }
    }

    #[test]
    fn beta_sampler_inverts_cdf() {
        let m = TrueModel::Beta22;
        let mut rng = SplitMix64::stream(3, 0);
        for _ in 0..1000 {
            let mut probe = rng.clone();
            let u = probe.uniform();
            let y = m.sample_y(&mut rng);
            assert!((0.0..=1.0).contains(&y));
            assert!((m.cdf(y) - u).abs() < 1e-12);
        }
    }

    #[test]
    fn observation_density_is_symmetric_for_symmetric_f() {
        let m = TrueModel::StandardNormal;
        for i in 0..50 {
            let d = i as f64 * 0.1;
            assert!((m.g(0.5 + d) - m.g(0.5 - d)).abs() < 1e-15);
        }
        assert!((m.g(0.5) - 0.382_925).abs() < 1e-6);
    }
}
