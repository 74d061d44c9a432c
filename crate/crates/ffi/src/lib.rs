//! C ABI for `minflex`.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json` or
//! `mf_surface_catalogue` and released with the matching `*_free`. Every
//! fallible call returns an [`MfStatus`]; on failure a message is kept per
//! thread and can be copied out with [`mf_last_error_message`]. Panics are
//! caught and reported as [`MfStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use minflex::convexgeo::ConvexBody;
use minflex::domains::DomainSpec;
use minflex::flexcheck::{classify_complex_complement, classify_convex_complement, classify_domain, Verdict};
use minflex::psh::{hessian_partial_sum, ScalarField};
use minflex::weierstrass::{
    conformality_residuals, contained_in, null_residual, surface_catalogue, CatalogueParams, WeierstrassSample,
};
use minflex::{Error, Point};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    DimMismatch = 4,
    InvalidParams = 5,
    /// Any other library error; see the last error message.
    Failed = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfVerdict {
    Flexible = 0,
    NotFlexible = 1,
    Unknown = 2,
}

/// Convex body in halfspace or analytic form.
pub struct MfBody(ConvexBody);

/// Open domain in R^n.
pub struct MfDomain(DomainSpec);

/// Sampled conformal minimal surface.
pub struct MfSurface(WeierstrassSample);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> MfStatus {
    match e {
        Error::Parse(_) => MfStatus::Parse,
        Error::DimMismatch { .. } => MfStatus::DimMismatch,
        Error::InvalidParams(_) => MfStatus::InvalidParams,
        _ => MfStatus::Failed,
    }
}

struct Fail(MfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(MfStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording failures and panics in the thread-local error slot.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MfStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MfStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("panic: {msg}"));
            MfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(MfStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn point_arg(x: *const f64, n: usize) -> Result<Point, Fail> {
    if x.is_null() {
        return Err(null("point"));
    }
    Ok(Point::from_column_slice(slice::from_raw_parts(x, n)))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Length in bytes of the last error message including the terminating NUL,
/// or 0 if the last call on this thread succeeded.
#[no_mangle]
pub extern "C" fn mf_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |c| c.as_bytes_with_nul().len()))
}

/// Copies the last error message into `buf`.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn mf_last_error_message(buf: *mut c_char, len: usize) -> MfStatus {
    if buf.is_null() {
        return MfStatus::NullPointer;
    }
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&[0u8][..], |c| c.as_bytes_with_nul());
        if bytes.len() > len {
            return MfStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, bytes.len());
        MfStatus::Ok
    })
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a convex body descriptor.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_body_from_json(json: *const c_char, out: *mut *mut MfBody) -> MfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let body = ConvexBody::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(MfBody(body)));
        Ok(())
    })
}

/// # Safety
/// `body` must come from [`mf_body_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mf_body_free(body: *mut MfBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// Euclidean distance from `x` (length `n`) to the body.
///
/// # Safety
/// `body` must be a live handle, `x` must hold `n` doubles and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn mf_body_distance(body: *const MfBody, x: *const f64, n: usize, out: *mut f64) -> MfStatus {
    guard(|| {
        let b = handle(body, "body")?;
        let out = out_arg(out, "out")?;
        *out = b.0.distance(&point_arg(x, n)?)?;
        Ok(())
    })
}

/// Classifies `R^n ∖ body`, or `C^n ∖ body` when `complex` is set.
///
/// # Safety
/// `body` must be a live handle; `verdict` must be valid; `delta` may be null.
#[no_mangle]
pub unsafe extern "C" fn mf_classify_body(
    body: *const MfBody,
    complex: bool,
    verdict: *mut MfVerdict,
    delta: *mut f64,
) -> MfStatus {
    guard(|| {
        let b = handle(body, "body")?;
        let verdict = out_arg(verdict, "verdict")?;
        let r = if complex { classify_complex_complement(&b.0)? } else { classify_convex_complement(&b.0)? };
        write_verdict(&r, verdict, delta);
        Ok(())
    })
}

unsafe fn write_verdict(r: &minflex::flexcheck::ClassificationResult, verdict: &mut MfVerdict, delta: *mut f64) {
    *verdict = match r.verdict {
        Verdict::Flexible => MfVerdict::Flexible,
        Verdict::NotFlexible => MfVerdict::NotFlexible,
        Verdict::Unknown => MfVerdict::Unknown,
    };
    if let Some(d) = delta.as_mut() {
        *d = r.witness.as_ref().map_or(f64::NAN, |w| w.delta);
    }
}

/// Parses a domain descriptor.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_domain_from_json(json: *const c_char, out: *mut *mut MfDomain) -> MfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let d = DomainSpec::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(MfDomain(d)));
        Ok(())
    })
}

/// # Safety
/// `domain` must come from [`mf_domain_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mf_domain_free(domain: *mut MfDomain) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

/// # Safety
/// `domain` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_domain_dim(domain: *const MfDomain) -> usize {
    domain.as_ref().map_or(0, |d| d.0.dim())
}

/// # Safety
/// `domain` must be a live handle, `x` must hold `n` doubles and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn mf_domain_contains(
    domain: *const MfDomain,
    x: *const f64,
    n: usize,
    out: *mut bool,
) -> MfStatus {
    guard(|| {
        let d = handle(domain, "domain")?;
        let out = out_arg(out, "out")?;
        *out = d.0.contains(&point_arg(x, n)?)?;
        Ok(())
    })
}

/// Distance from `x` to the complement of the domain (infinite for R^n).
///
/// # Safety
/// `domain` must be a live handle, `x` must hold `n` doubles and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn mf_domain_clearance(
    domain: *const MfDomain,
    x: *const f64,
    n: usize,
    out: *mut f64,
) -> MfStatus {
    guard(|| {
        let d = handle(domain, "domain")?;
        let out = out_arg(out, "out")?;
        *out = d.0.clearance(&point_arg(x, n)?)?;
        Ok(())
    })
}

/// Classifies the domain. `delta` receives the witness tube radius, or NaN
/// when there is no witness.
///
/// # Safety
/// `domain` must be a live handle; `verdict` must be valid; `delta` may be null.
#[no_mangle]
pub unsafe extern "C" fn mf_classify_domain(domain: *const MfDomain, verdict: *mut MfVerdict, delta: *mut f64) -> MfStatus {
    guard(|| {
        let d = handle(domain, "domain")?;
        let verdict = out_arg(verdict, "verdict")?;
        write_verdict(&classify_domain(&d.0)?, verdict, delta);
        Ok(())
    })
}

/// Full classification result as JSON; free it with [`mf_string_free`].
///
/// # Safety
/// `domain` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_classify_domain_json(domain: *const MfDomain, out: *mut *mut c_char) -> MfStatus {
    guard(|| {
        let d = handle(domain, "domain")?;
        let out = out_arg(out, "out")?;
        let text = serde_json::to_string(&classify_domain(&d.0)?).map_err(|e| Fail(MfStatus::Failed, e.to_string()))?;
        *out = CString::new(text).map_err(|e| Fail(MfStatus::Failed, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// Samples a catalogue surface (`plane`, `enneper`, `catenoid`, `helicoid`)
/// on a `resolution × resolution` grid.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_surface_catalogue(name: *const c_char, resolution: usize, out: *mut *mut MfSurface) -> MfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let params = CatalogueParams { resolution, ..Default::default() };
        let s = surface_catalogue(str_arg(name, "name")?, &params)?;
        *out = Box::into_raw(Box::new(MfSurface(s)));
        Ok(())
    })
}

/// # Safety
/// `surface` must come from [`mf_surface_catalogue`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mf_surface_free(surface: *mut MfSurface) {
    if !surface.is_null() {
        drop(Box::from_raw(surface));
    }
}

/// Number of grid nodes.
///
/// # Safety
/// `surface` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_surface_node_count(surface: *const MfSurface) -> usize {
    surface.as_ref().map_or(0, |s| s.0.f.len())
}

/// # Safety
/// `surface` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_surface_dim(surface: *const MfSurface) -> usize {
    surface.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies node positions, row-major with `dim` coordinates per node, into
/// `buf` of length `len` (at least `node_count · dim`).
///
/// # Safety
/// `surface` must be a live handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mf_surface_vertices(surface: *const MfSurface, buf: *mut f64, len: usize) -> MfStatus {
    guard(|| {
        let s = &handle(surface, "surface")?.0;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let need = s.f.len() * s.dim();
        if len < need {
            return Err(Fail(MfStatus::BufferTooSmall, format!("need {need} doubles, got {len}")));
        }
        let dst = slice::from_raw_parts_mut(buf, need);
        for (chunk, p) in dst.chunks_mut(s.dim()).zip(&s.f) {
            chunk.copy_from_slice(p.as_slice());
        }
        Ok(())
    })
}

/// Maximum null and harmonic residuals of the sampled surface.
///
/// # Safety
/// `surface` must be a live handle; both outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn mf_surface_residuals(
    surface: *const MfSurface,
    max_null: *mut f64,
    max_harmonic: *mut f64,
) -> MfStatus {
    guard(|| {
        let s = handle(surface, "surface")?;
        let (a, b) = (out_arg(max_null, "max_null")?, out_arg(max_harmonic, "max_harmonic")?);
        let r = conformality_residuals(&s.0)?;
        *a = r.max_null;
        *b = r.max_harmonic;
        Ok(())
    })
}

/// Fraction of grid nodes inside the domain.
///
/// # Safety
/// Both handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mf_surface_contained_fraction(
    surface: *const MfSurface,
    domain: *const MfDomain,
    out: *mut f64,
) -> MfStatus {
    guard(|| {
        let s = handle(surface, "surface")?;
        let d = handle(domain, "domain")?;
        let out = out_arg(out, "out")?;
        *out = contained_in(&s.0, &d.0, false)?.fraction;
        Ok(())
    })
}

/// `|Σ zᵢ²|` for `z = re + i·im`, or NaN if a pointer is null.
///
/// # Safety
/// `re` and `im` must each hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn mf_null_residual(re: *const f64, im: *const f64, n: usize) -> f64 {
    if re.is_null() || im.is_null() {
        return f64::NAN;
    }
    let (re, im) = (slice::from_raw_parts(re, n), slice::from_raw_parts(im, n));
    let z: Vec<Complex64> = re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect();
    null_residual(&z)
}

/// Sum of the `p` smallest Hessian eigenvalues of the scalar field
/// described by `tau_json` at `x`.
///
/// # Safety
/// `tau_json` must be a NUL-terminated string, `x` must hold `n` doubles and
/// `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn mf_psh_partial_sum(
    tau_json: *const c_char,
    x: *const f64,
    n: usize,
    p: usize,
    out: *mut f64,
) -> MfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let tau = ScalarField::from_json(str_arg(tau_json, "tau_json")?)?;
        *out = hessian_partial_sum(&tau, &point_arg(x, n)?, p)?;
        Ok(())
    })
}
