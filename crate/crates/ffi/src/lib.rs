//! C ABI for `unidecon`.
//!
//! Objects cross the boundary as opaque handles created by `ud_*_new` and
//! released by the matching `ud_*_free`. Every fallible call returns a
//! [`UdStatus`]; on failure a message is kept per thread and can be read
//! with [`ud_last_error`]. Outputs go through caller-provided pointers and
//! are left untouched on failure. Panics never unwind into C; they surface
//! as [`UdStatus::Panic`].
//!
//! Handles are immutable after construction, so a handle may be shared by
//! several threads as long as nobody frees it concurrently.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use unidecon::deconv::{evaluate_curve, Cdf, Estimator, EstimatorSpec, Grid, WeightSpec};
use unidecon::kde::{Bandwidth, Sample};
use unidecon::kernels::Kernel;
use unidecon::montecarlo::sample_convolution;
use unidecon::rng::SplitMix64;
use unidecon::theory::{self, TrueModel};
use unidecon::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    InvalidGrid = 3,
    DegenerateModel = 4,
    ModelSupport = 5,
    QuadratureDivergence = 6,
    Parse = 7,
    Io = 8,
    BufferTooSmall = 9,
    InvalidUtf8 = 10,
    Panic = 11,
}

/// Which curve [`ud_estimate`] evaluates.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdEstimator {
    /// Direct kernel estimate of the observation density `g`.
    GHat = 0,
    DensityMinus = 1,
    DensityPlus = 2,
    DensityWeighted = 3,
    DensityCombined = 4,
    CdfMinus = 5,
    CdfPlus = 6,
    CdfWeighted = 7,
    CdfCombined = 8,
    PivotHalf = 9,
    PivotH = 10,
}

/// How the two one-sided estimators are weighted.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdWeight {
    /// Fixed weight `t` on the left-shift estimator.
    FixedT = 0,
    PivotHalf = 1,
    /// Logistic `H` with scale `pivot_scale`, centered at the sample median.
    PivotH = 2,
}

/// Estimator configuration passed by pointer.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct UdEstimatorConfig {
    /// One of `UD_ESTIMATOR_*`.
    pub estimator: i32,
    /// Main bandwidth, > 0.
    pub h: f64,
    /// Pivot bandwidth, > 0 (used by the combined estimators).
    pub h_pivot: f64,
    /// One of `UD_WEIGHT_*`.
    pub weight: i32,
    /// Used when `weight` is `FixedT`; must lie in [0, 1].
    pub t: f64,
    /// Used when `weight` is `PivotH`; must be > 0.
    pub pivot_scale: f64,
}

/// Opaque smoothing kernel.
pub struct UdKernel(Kernel);

/// Opaque sorted sample of observations.
pub struct UdSample(Sample);

/// Opaque ground-truth model for the theory functions.
pub struct UdModel(TrueModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> UdStatus {
    match e {
        Error::QuadratureDivergence { .. } => UdStatus::QuadratureDivergence,
        Error::InvalidGrid(_) => UdStatus::InvalidGrid,
        Error::InvalidParameter(_) => UdStatus::InvalidParameter,
        Error::DegenerateModel(_) => UdStatus::DegenerateModel,
        Error::ModelSupport(_) => UdStatus::ModelSupport,
        Error::Parse { .. } => UdStatus::Parse,
        Error::Io { .. } => UdStatus::Io,
    }
}

struct Fail(UdStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(UdStatus::NullPointer, format!("{what} is null"))
}

/// Run `body`, translating errors and panics into a status.
fn guard<F: FnOnce() -> Result<(), Fail>>(body: F) -> UdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => UdStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            UdStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(UdStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(p: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

/// Box `v` into `*out`; nothing is allocated when `out` is null.
unsafe fn put_handle<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(v)));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL if there is none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ud_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ud_version() -> *const c_char {
    concat!("unidecon ", env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Create a kernel by name ("biweight", "triweight", "epanechnikov").
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ud_kernel_new(name: *const c_char, out: *mut *mut UdKernel) -> UdStatus {
    guard(|| {
        let k = Kernel::by_name(str_arg(name, "name")?)?;
        put_handle(out, UdKernel(k))
    })
}

/// Release a kernel. NULL is ignored.
///
/// # Safety
/// `k` must come from [`ud_kernel_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ud_kernel_free(k: *mut UdKernel) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Moment functionals `∫v²w`, `∫w²` and `∫w'²` of a kernel.
///
/// # Safety
/// `k` must be a live kernel handle; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ud_kernel_functionals(
    k: *const UdKernel,
    m2: *mut f64,
    l2: *mut f64,
    dl2: *mut f64,
) -> UdStatus {
    guard(|| {
        let f = deref(k, "kernel")?.0.functionals();
        if m2.is_null() || l2.is_null() || dl2.is_null() {
            return Err(null("output"));
        }
        m2.write(f.m2);
        l2.write(f.l2);
        dl2.write(f.dl2);
        Ok(())
    })
}

/// Create a sample from `len` finite values (copied and sorted).
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ud_sample_new(values: *const f64, len: usize, out: *mut *mut UdSample) -> UdStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let s = Sample::new(std::slice::from_raw_parts(values, len).to_vec())?;
        put_handle(out, UdSample(s))
    })
}

/// Draw `n` observations `X = Y + Z` from a named model with a seed.
/// Same draws as `unidecon simulate --model <model> --n <n> --seed <seed>`.
///
/// # Safety
/// `model` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ud_sample_simulate(
    model: *const c_char,
    n: usize,
    seed: u64,
    out: *mut *mut UdSample,
) -> UdStatus {
    guard(|| {
        let m = TrueModel::from_name(str_arg(model, "model")?)?;
        let s = sample_convolution(&m, n, &mut SplitMix64::new(seed))?;
        put_handle(out, UdSample(s))
    })
}

/// Number of observations, or 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live sample handle.
#[no_mangle]
pub unsafe extern "C" fn ud_sample_len(s: *const UdSample) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// Copy the sorted observations into `buf`. Fails with `BUFFER_TOO_SMALL`
/// if `buf_len` is below [`ud_sample_len`].
///
/// # Safety
/// `s` must be a live sample handle; `buf` must hold `buf_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ud_sample_values(s: *const UdSample, buf: *mut f64, buf_len: usize) -> UdStatus {
    guard(|| {
        let v = deref(s, "sample")?.0.values();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if buf_len < v.len() {
            return Err(Fail(
                UdStatus::BufferTooSmall,
                format!("buffer holds {buf_len} values, need {}", v.len()),
            ));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        Ok(())
    })
}

/// Release a sample. NULL is ignored.
///
/// # Safety
/// `s` must come from a `ud_sample_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ud_sample_free(s: *mut UdSample) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Map a C integer onto one of the listed enum variants.
fn decode<T: Copy>(raw: i32, variants: &[T], to_int: fn(T) -> i32, what: &str) -> Result<T, Fail> {
    variants.iter().copied().find(|&v| to_int(v) == raw).ok_or_else(|| {
        Fail(UdStatus::InvalidParameter, format!("{what} code {raw} is out of range"))
    })
}

const ESTIMATORS: [UdEstimator; 11] = [
    UdEstimator::GHat,
    UdEstimator::DensityMinus,
    UdEstimator::DensityPlus,
    UdEstimator::DensityWeighted,
    UdEstimator::DensityCombined,
    UdEstimator::CdfMinus,
    UdEstimator::CdfPlus,
    UdEstimator::CdfWeighted,
    UdEstimator::CdfCombined,
    UdEstimator::PivotHalf,
    UdEstimator::PivotH,
];

const WEIGHTS: [UdWeight; 3] = [UdWeight::FixedT, UdWeight::PivotHalf, UdWeight::PivotH];

const QUANTITIES: [UdQuantity; 6] = [
    UdQuantity::BiasDensity,
    UdQuantity::VarDensityT,
    UdQuantity::VarDensityCombined,
    UdQuantity::BiasCdf,
    UdQuantity::VarCdfT,
    UdQuantity::VarCdfCombined,
];

fn spec_of(cfg: &UdEstimatorConfig) -> Result<EstimatorSpec, Fail> {
    let estimator = match decode(cfg.estimator, &ESTIMATORS, |v| v as i32, "estimator")? {
        UdEstimator::GHat => Estimator::DirectDensity,
        UdEstimator::DensityMinus => Estimator::DensityMinus,
        UdEstimator::DensityPlus => Estimator::DensityPlus,
        UdEstimator::DensityWeighted => Estimator::DensityWeighted,
        UdEstimator::DensityCombined => Estimator::DensityCombined,
        UdEstimator::CdfMinus => Estimator::CdfMinus,
        UdEstimator::CdfPlus => Estimator::CdfPlus,
        UdEstimator::CdfWeighted => Estimator::CdfWeighted,
        UdEstimator::CdfCombined => Estimator::CdfCombined,
        UdEstimator::PivotHalf => Estimator::PivotHalf,
        UdEstimator::PivotH => Estimator::PivotH,
    };
    let weight = match decode(cfg.weight, &WEIGHTS, |v| v as i32, "weight")? {
        UdWeight::FixedT => WeightSpec::FixedT(cfg.t),
        UdWeight::PivotHalf => WeightSpec::PivotHalf,
        UdWeight::PivotH => {
            if !(cfg.pivot_scale.is_finite() && cfg.pivot_scale > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "pivot_scale must be positive, got {}",
                    cfg.pivot_scale
                ))
                .into());
            }
            WeightSpec::PivotH(Cdf::LogisticAtMedian { scale: cfg.pivot_scale })
        }
    };
    let spec = EstimatorSpec {
        estimator,
        h: Bandwidth::new(cfg.h)?,
        h_pivot: Bandwidth::new(cfg.h_pivot)?,
        weight,
    };
    spec.validate()?;
    Ok(spec)
}

/// Evaluate an estimator at a single point.
///
/// # Safety
/// Handles must be live; `cfg` readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ud_estimate(
    s: *const UdSample,
    k: *const UdKernel,
    cfg: *const UdEstimatorConfig,
    x: f64,
    out: *mut f64,
) -> UdStatus {
    guard(|| {
        let (s, k) = (deref(s, "sample")?, deref(k, "kernel")?);
        let spec = spec_of(deref(cfg, "config")?)?;
        if !x.is_finite() {
            return Err(Error::InvalidParameter(format!("x must be finite, got {x}")).into());
        }
        write_out(out, spec.eval(&s.0, &k.0, x), "out")
    })
}

/// Evaluate an estimator at `x0 + i*dx`, `i < count`, into `buf`.
/// Fails with `BUFFER_TOO_SMALL` if `buf_len < count`.
///
/// # Safety
/// Handles must be live; `cfg` readable; `buf` must hold `buf_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ud_estimate_grid(
    s: *const UdSample,
    k: *const UdKernel,
    cfg: *const UdEstimatorConfig,
    x0: f64,
    dx: f64,
    count: usize,
    buf: *mut f64,
    buf_len: usize,
) -> UdStatus {
    guard(|| {
        let (s, k) = (deref(s, "sample")?, deref(k, "kernel")?);
        let spec = spec_of(deref(cfg, "config")?)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if buf_len < count {
            return Err(Fail(
                UdStatus::BufferTooSmall,
                format!("buffer holds {buf_len} values, need {count}"),
            ));
        }
        let curve = evaluate_curve(&s.0, &k.0, &spec, Grid::new(x0, dx, count)?)?;
        ptr::copy_nonoverlapping(curve.values.as_ptr(), buf, count);
        Ok(())
    })
}

/// Create a model by name ("stdnormal", "uniform", "beta22", "pointmass:<a>").
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ud_model_new(name: *const c_char, out: *mut *mut UdModel) -> UdStatus {
    guard(|| {
        let m = TrueModel::from_name(str_arg(name, "name")?)?;
        put_handle(out, UdModel(m))
    })
}

/// Release a model. NULL is ignored.
///
/// # Safety
/// `m` must come from [`ud_model_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ud_model_free(m: *mut UdModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Which asymptotic quantity [`ud_theory_pointwise`] returns.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdQuantity {
    /// `½h²f''(x)m2`
    BiasDensity = 0,
    /// `(t²F + (1-t)²(1-F)) dl2 / (nh³)`
    VarDensityT = 1,
    /// `F(1-F) dl2 / (nh³)`
    VarDensityCombined = 2,
    /// `½h²f'(x)m2`
    BiasCdf = 3,
    /// `(t²F + (1-t)²(1-F)) l2 / (nh)`
    VarCdfT = 4,
    /// `F(1-F) l2 / (nh)`
    VarCdfCombined = 5,
}

/// Closed-form pointwise bias or variance; `quantity` is one of
/// `UD_QUANTITY_*`. `t` is only read by the `*_T` quantities, `n` only by
/// the variances.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ud_theory_pointwise(
    m: *const UdModel,
    k: *const UdKernel,
    quantity: i32,
    x: f64,
    t: f64,
    n: usize,
    h: f64,
    out: *mut f64,
) -> UdStatus {
    guard(|| {
        let (m, k) = (&deref(m, "model")?.0, &deref(k, "kernel")?.0);
        let quantity = decode(quantity, &QUANTITIES, |v| v as i32, "quantity")?;
        Bandwidth::new(h)?;
        let needs_n = !matches!(quantity, UdQuantity::BiasDensity | UdQuantity::BiasCdf);
        if needs_n && n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()).into());
        }
        if matches!(quantity, UdQuantity::VarDensityT | UdQuantity::VarCdfT) {
            WeightSpec::FixedT(t).validate()?;
        }
        let v = match quantity {
            UdQuantity::BiasDensity => theory::asymp_bias_density(m, x, h, k),
            UdQuantity::VarDensityT => theory::asymp_var_density_t(m, x, t, n, h, k),
            UdQuantity::VarDensityCombined => theory::asymp_var_density_combined(m, x, n, h, k),
            UdQuantity::BiasCdf => theory::asymp_bias_cdf(m, x, h, k),
            UdQuantity::VarCdfT => theory::asymp_var_cdf_t(m, x, t, n, h, k),
            UdQuantity::VarCdfCombined => theory::asymp_var_cdf_combined(m, x, n, h, k),
        };
        write_out(out, v, "out")
    })
}

/// Two-term MISE expansion of the combined density estimator.
///
/// # Safety
/// Handles must be live; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn ud_theory_mise(
    m: *const UdModel,
    k: *const UdKernel,
    n: usize,
    h: f64,
    bias_term: *mut f64,
    var_term: *mut f64,
    total: *mut f64,
) -> UdStatus {
    guard(|| {
        let (m, k) = (&deref(m, "model")?.0, &deref(k, "kernel")?.0);
        if bias_term.is_null() || var_term.is_null() || total.is_null() {
            return Err(null("output"));
        }
        let e = theory::mise_expansion(m, n, h, k)?;
        bias_term.write(e.bias_term);
        var_term.write(e.var_term);
        total.write(e.total);
        Ok(())
    })
}

/// MISE-optimal bandwidth for the combined density (`cdf == 0`) or
/// distribution function (`cdf != 0`) estimator.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ud_theory_optimal_bandwidth(
    m: *const UdModel,
    k: *const UdKernel,
    n: usize,
    cdf: i32,
    out: *mut f64,
) -> UdStatus {
    guard(|| {
        let (m, k) = (&deref(m, "model")?.0, &deref(k, "kernel")?.0);
        let choice = if cdf != 0 {
            theory::optimal_bandwidth_cdf(m, n, k)?
        } else {
            theory::optimal_bandwidth_density(m, n, k)?
        };
        write_out(out, choice.h, "out")
    })
}

/// `∫ θ² dG` for the smoothed NPMLE at `t` (compactly supported models).
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ud_theory_npmle_variance(
    m: *const UdModel,
    k: *const UdKernel,
    h: f64,
    t: f64,
    out: *mut f64,
) -> UdStatus {
    guard(|| {
        let (m, k) = (&deref(m, "model")?.0, &deref(k, "kernel")?.0);
        write_out(out, theory::npmle_variance_integral(m, h, t, k)?, "out")
    })
}
