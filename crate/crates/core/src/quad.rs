//! Fixed-node composite quadrature.
//!
//! Every integral in the crate goes through composite Simpson with a fixed
//! number of panels and at most one doubling for error control, so the
//! numbers that acceptance tests compare against never depend on an
//! adaptive recursion path.

use crate::error::{Error, Result};

/// Composite Simpson's rule on `[a, b]` with `intervals` panels (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    simpson_with_ends(&f, a, b, intervals, f(a), f(b))
}

fn simpson_with_ends<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, intervals: usize, fa: f64, fb: f64) -> f64 {
    let n = (intervals.max(2) + 1) & !1;
    let step = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(a + i as f64 * step);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    step / 3.0 * (fa + fb + 4.0 * odd + 2.0 * even)
}

/// Relative inward offset used for one-sided endpoint values.
const END_NUDGE: f64 = 1e-13;

/// Simpson on `[a, b]` with the endpoint values taken just inside the
/// interval, so a jump at either end contributes its one-sided limit.
fn simpson_inner_ends<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, intervals: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let d = (b - a) * END_NUDGE;
    simpson_with_ends(f, a, b, intervals, f(a + d), f(b - d))
}

/// Simpson on each piece of `[a, b]` cut at `breaks`, `intervals` panels per piece.
///
/// Break points outside `(a, b)` are ignored; duplicates are harmless. Piece
/// endpoints are evaluated as one-sided limits from inside the piece, so `f`
/// may jump at any break point or at `a` and `b`.
pub fn simpson_piecewise<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    intervals: usize,
) -> f64 {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&c| c > a && c < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    let mut lo = a;
    for c in cuts.into_iter().chain(std::iter::once(b)) {
        total += simpson_inner_ends(&f, lo, c, intervals);
        lo = c;
    }
    total
}

/// Piecewise Simpson with one refinement step.
///
/// Returns the refined value; fails with [`Error::QuadratureDivergence`] when
/// the two estimates differ by more than `tol` (absolute, scaled up by the
/// magnitude of the result when that exceeds one).
pub fn simpson_checked<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    intervals: usize,
    tol: f64,
) -> Result<f64> {
    let coarse = simpson_piecewise(&f, a, b, breaks, intervals);
    let fine = simpson_piecewise(&f, a, b, breaks, 2 * intervals);
    let diff = (fine - coarse).abs();
    let scale = fine.abs().max(1.0);
    if !(diff <= tol * scale) {
        return Err(Error::QuadratureDivergence { diff, tol });
    }
    Ok(fine)
}

/// Trapezoid rule over equally spaced samples.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => dx * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}
