//! Direct kernel estimates of the observation density `g` and of `g'`.

use crate::error::{Error, Result};
use crate::kernels::Kernel;

/// Observations `X₁ ≤ … ≤ Xₙ`, sorted at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sample must contain at least one observation"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "observation {i} is not finite ({})",
                values[i]
            )));
        }
        values.sort_by(f64::total_cmp);
        Ok(Sample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// The sample `{1 - Xⱼ}` (observations of `-Y + (1 - Z)`).
    pub fn reflected(&self) -> Sample {
        Sample {
            values: self.values.iter().rev().map(|v| 1.0 - v).collect(),
        }
    }

    /// Indices `lo..hi` of observations with `|x - Xⱼ| / h < 1`.
    ///
    /// The bounds are found on the same rounded quantity `(x - Xⱼ) / h` the
    /// kernel sees, so every excluded observation would contribute exactly 0.
    #[inline]
    fn window(&self, x: f64, h: f64) -> (usize, usize) {
        let lo = self.values.partition_point(|&v| (x - v) / h >= 1.0);
        let hi = lo + self.values[lo..].partition_point(|&v| (x - v) / h > -1.0);
        (lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(h: f64) -> Result<Self> {
        if h.is_finite() && h > 0.0 {
            Ok(Bandwidth(h))
        } else {
            Err(Error::invalid(format!("bandwidth must be positive and finite, got {h}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Whether the one-observation summands at distinct integer shifts have
    /// disjoint supports (`h < 1/2`), which the variance expansions assume.
    pub fn separates_shifts(self) -> bool {
        self.0 < 0.5
    }
}

/// `g_nh(x) = (1/(n h)) Σ w((x - Xⱼ)/h)`.
pub fn g_hat(s: &Sample, k: &Kernel, h: Bandwidth, x: f64) -> f64 {
    let h = h.get();
    let (lo, hi) = s.window(x, h);
    let mut acc = 0.0;
    for &v in &s.values[lo..hi] {
        acc += k.w((x - v) / h);
    }
    acc / (s.len() as f64 * h)
}

/// `g'_nh(x) = (1/(n h²)) Σ w'((x - Xⱼ)/h)`.
pub fn g_hat_deriv(s: &Sample, k: &Kernel, h: Bandwidth, x: f64) -> f64 {
    let h = h.get();
    let (lo, hi) = s.window(x, h);
    let mut acc = 0.0;
    for &v in &s.values[lo..hi] {
        acc += k.w_deriv((x - v) / h);
    }
    acc / (s.len() as f64 * h * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use proptest::prelude::*;

    fn naive(s: &Sample, k: &Kernel, h: f64, x: f64, deriv: bool) -> f64 {
        let mut acc = 0.0;
        for &v in s.values() {
            acc += if deriv { k.w_deriv((x - v) / h) } else { k.w((x - v) / h) };
        }
        if deriv {
            acc / (s.len() as f64 * h * h)
        } else {
            acc / (s.len() as f64 * h)
        }
    }

    #[test]
    fn sample_is_sorted_and_validated() {
        let s = Sample::new(vec![0.5, 0.1]).unwrap();
        assert_eq!(s.values(), &[0.1, 0.5]);
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
        assert!(Sample::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn bandwidth_must_be_positive() {
        assert!(Bandwidth::new(0.0).is_err());
        assert!(Bandwidth::new(-1.0).is_err());
        assert!(Bandwidth::new(f64::NAN).is_err());
        assert!(Bandwidth::new(0.3).unwrap().separates_shifts());
        assert!(!Bandwidth::new(1.0).unwrap().separates_shifts());
    }

    #[test]
    fn single_point_at_center() {
        let s = Sample::new(vec![0.5]).unwrap();
        let h = Bandwidth::new(0.25).unwrap();
        let k = Kernel::biweight();
        assert_eq!(g_hat(&s, &k, h, 0.5), 3.75);
        assert_eq!(g_hat_deriv(&s, &k, h, 0.5), 0.0);
    }

    #[test]
    fn two_points_half_bandwidth() {
        let s = Sample::new(vec![0.0, 1.0]).unwrap();
        let h = Bandwidth::new(0.5).unwrap();
        let v = g_hat(&s, &Kernel::biweight(), h, 0.25);
        assert!((v - 0.52734375).abs() < 1e-15);
    }

    #[test]
    fn derivative_off_center() {
        let s = Sample::new(vec![0.5]).unwrap();
        let h = Bandwidth::new(0.25).unwrap();
        let v = g_hat_deriv(&s, &Kernel::biweight(), h, 0.6);
        assert!((v - (-20.16)).abs() < 1e-12);
    }

    #[test]
    fn zero_outside_support() {
        let s = Sample::new(vec![0.0, 0.3, 2.0]).unwrap();
        let h = Bandwidth::new(0.2).unwrap();
        let k = Kernel::biweight();
        for x in [-0.2, -0.5, 1.0, 2.2, 5.0] {
            assert_eq!(g_hat(&s, &k, h, x), 0.0);
            assert_eq!(g_hat_deriv(&s, &k, h, x), 0.0);
        }
    }

    #[test]
    fn integrates_to_one() {
        let s = Sample::new(vec![-1.3, -0.2, 0.0, 0.45, 0.47, 2.1]).unwrap();
        let h = Bandwidth::new(0.4).unwrap();
        let k = Kernel::biweight();
        let step = 0.4 / 50.0;
        let a = s.min() - 0.4;
        let n = ((s.max() + 0.4 - a) / step).ceil() as usize + 1;
        let vals: Vec<f64> = (0..n).map(|i| g_hat(&s, &k, h, a + i as f64 * step)).collect();
        assert!((quad::trapezoid(&vals, step) - 1.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn windowed_sum_is_bit_equal_to_full_sum(
            xs in prop::collection::vec(-3.0f64..3.0, 1..40),
            x in -4.0f64..4.0,
            h in 0.05f64..1.5,
        ) {
            let s = Sample::new(xs).unwrap();
            let k = Kernel::biweight();
            let bw = Bandwidth::new(h).unwrap();
            prop_assert_eq!(g_hat(&s, &k, bw, x).to_bits(), naive(&s, &k, h, x, false).to_bits());
            prop_assert_eq!(g_hat_deriv(&s, &k, bw, x).to_bits(), naive(&s, &k, h, x, true).to_bits());
        }

        #[test]
        fn derivative_matches_finite_difference(
            xs in prop::collection::vec(-2.0f64..2.0, 1..30),
            x in -2.5f64..2.5,
            h in 0.1f64..1.0,
        ) {
            let s = Sample::new(xs).unwrap();
            let k = Kernel::biweight();
            let bw = Bandwidth::new(h).unwrap();
            let eps = 1e-6 * h;
            let fd = (g_hat(&s, &k, bw, x + eps) - g_hat(&s, &k, bw, x - eps)) / (2.0 * eps);
            let d = g_hat_deriv(&s, &k, bw, x);
            let scale = d.abs().max(1e-3 / (h * h));
            prop_assert!((fd - d).abs() <= 1e-4 * scale, "fd={} d={}", fd, d);
        }
    }
}
