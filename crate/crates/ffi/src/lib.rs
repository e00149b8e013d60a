//! C ABI for the schreier-growth workbench.
//!
//! Strings cross the boundary as NUL-terminated UTF-8; growth tables are
//! opaque handles created and freed here. Every fallible call returns an
//! [`SgStatus`]; out-parameters are written only on `SG_OK`.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use schreier_growth::error::Error;
use schreier_growth::growth::{fit_exponent, vol_table, vol_table_exhaustive, GrowthTable};
use schreier_growth::houghton::{self, StarGraph, StarVertex};
use schreier_growth::lamplighter::{build_coset_graph, WreathParams};
use schreier_growth::{experiment, grigorchuk};

/// Status codes of every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgStatus {
    SgOk = 0,
    SgErrNull = 1,
    SgErrUtf8 = 2,
    SgErrInvalid = 3,
    SgErrCap = 4,
    SgErrTrivial = 5,
    SgErrBuffer = 6,
}

fn status_of(error: &Error) -> SgStatus {
    match error {
        Error::CapExceeded { .. } => SgStatus::SgErrCap,
        Error::TrivialElement => SgStatus::SgErrTrivial,
        _ => SgStatus::SgErrInvalid,
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, SgStatus> {
    if ptr.is_null() {
        return Err(SgStatus::SgErrNull);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| SgStatus::SgErrUtf8)
}

unsafe fn write_str(out: *mut c_char, out_len: usize, value: &str) -> SgStatus {
    let bytes = value.as_bytes();
    if out.is_null() {
        return SgStatus::SgErrNull;
    }
    if bytes.len() + 1 > out_len {
        return SgStatus::SgErrBuffer;
    }
    ptr::copy_nonoverlapping(bytes.as_ptr(), out as *mut u8, bytes.len());
    *out.add(bytes.len()) = 0;
    SgStatus::SgOk
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sg_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Applies a Grigorchuk word (letters `a..d`, rightmost acts first) to a
/// binary vertex, writing the image into `out`.
///
/// # Safety
/// `word` and `point` must be valid NUL-terminated strings; `out` must have
/// room for `out_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sg_grigorchuk_act(
    word: *const c_char,
    point: *const c_char,
    out: *mut c_char,
    out_len: usize,
) -> SgStatus {
    let word = match read_str(word) {
        Ok(s) => s,
        Err(e) => return e,
    };
    let point = match read_str(point) {
        Ok(s) => s,
        Err(e) => return e,
    };
    match grigorchuk::act(word, point) {
        Ok(image) => write_str(out, out_len, &image),
        Err(e) => status_of(&e),
    }
}

/// Word problem: 1 if the word acts trivially, 0 if not, negative on error.
///
/// # Safety
/// `word` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sg_grigorchuk_is_trivial(word: *const c_char) -> i32 {
    match read_str(word) {
        Ok(w) if w.chars().all(|c| ('a'..='d').contains(&c)) => {
            grigorchuk::is_trivial(w) as i32
        }
        Ok(_) => -(SgStatus::SgErrInvalid as i32),
        Err(e) => -(e as i32),
    }
}

/// A level, vertex displacement and level diameter certifying the
/// eighth-of-diameter displacement.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SgDisplacement {
    pub level: u32,
    pub displacement: u32,
    pub diameter: u32,
}

/// Searches levels up to `level_cap` for a displacement witness.
///
/// # Safety
/// `word` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_grigorchuk_displacement(
    word: *const c_char,
    level_cap: u32,
    out: *mut SgDisplacement,
) -> SgStatus {
    if out.is_null() {
        return SgStatus::SgErrNull;
    }
    let word = match read_str(word) {
        Ok(s) => s,
        Err(e) => return e,
    };
    match grigorchuk::displacement_witness(word, level_cap) {
        Ok(w) => {
            *out = SgDisplacement {
                level: w.level,
                displacement: w.displacement,
                diameter: w.diameter,
            };
            SgStatus::SgOk
        }
        Err(e) => status_of(&e),
    }
}

/// Opaque growth table handle.
pub struct SgGrowthTable {
    inner: GrowthTable,
}

fn table_out(out: *mut *mut SgGrowthTable, table: GrowthTable) -> SgStatus {
    if out.is_null() {
        return SgStatus::SgErrNull;
    }
    unsafe {
        *out = Box::into_raw(Box::new(SgGrowthTable { inner: table }));
    }
    SgStatus::SgOk
}

/// Exhaustive growth over the Grigorchuk level graphs up to `max_level`.
///
/// # Safety
/// `out` must be a valid pointer; the handle must be freed with
/// [`sg_growth_table_free`].
#[no_mangle]
pub unsafe extern "C" fn sg_growth_grigorchuk(
    max_level: u32,
    n_max: u32,
    out: *mut *mut SgGrowthTable,
) -> SgStatus {
    let mut merged: Option<GrowthTable> = None;
    for n in 1..=max_level {
        let lg = match grigorchuk::level_graph(n) {
            Ok(lg) => lg,
            Err(e) => return status_of(&e),
        };
        match vol_table_exhaustive(&*lg, n_max) {
            Ok(t) => match &mut merged {
                None => merged = Some(t),
                Some(existing) => existing.merge_max(&t),
            },
            Err(e) => return status_of(&e),
        }
    }
    match merged {
        Some(t) => table_out(out, t),
        None => SgStatus::SgErrInvalid,
    }
}

/// Growth of `(Z/pZ) ≀ Z^d` on the union of the `X_m`, `m <= m_max`.
///
/// # Safety
/// `out` must be a valid pointer; free the handle with
/// [`sg_growth_table_free`].
#[no_mangle]
pub unsafe extern "C" fn sg_growth_lamplighter(
    p: u64,
    d: u8,
    m_max: u64,
    n_max: u32,
    out: *mut *mut SgGrowthTable,
) -> SgStatus {
    match experiment::lamplighter_growth(p, d, m_max, n_max) {
        Ok(t) => table_out(out, t),
        Err(e) => status_of(&e),
    }
}

/// Growth of `H_2` on the two-rayed star, sampled from a basepoint ladder.
///
/// # Safety
/// `out` must be a valid pointer; free the handle with
/// [`sg_growth_table_free`].
#[no_mangle]
pub unsafe extern "C" fn sg_growth_houghton_star(
    n_max: u32,
    out: *mut *mut SgGrowthTable,
) -> SgStatus {
    let star = match StarGraph::new(2) {
        Ok(s) => s,
        Err(e) => return status_of(&e),
    };
    let basepoints = vec![
        StarVertex::Origin,
        houghton::z_to_star(17),
        houghton::z_to_star(-17),
    ];
    match vol_table(&star, &basepoints, n_max) {
        Ok(t) => table_out(out, t),
        Err(e) => status_of(&e),
    }
}

/// Exhaustive growth of the lamplighter coset space `X_m` alone.
///
/// # Safety
/// `out` must be a valid pointer; free the handle with
/// [`sg_growth_table_free`].
#[no_mangle]
pub unsafe extern "C" fn sg_growth_coset_space(
    p: u64,
    d: u8,
    m: u64,
    n_max: u32,
    out: *mut *mut SgGrowthTable,
) -> SgStatus {
    let params = match WreathParams::new(p, d) {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    let coset = match build_coset_graph(params, m, 1 << 22) {
        Ok(c) => c,
        Err(e) => return status_of(&e),
    };
    match vol_table_exhaustive(&coset, n_max) {
        Ok(t) => table_out(out, t),
        Err(e) => status_of(&e),
    }
}

/// Largest radius the table covers; `UINT32_MAX` on a null handle.
///
/// # Safety
/// `table` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn sg_growth_table_max_radius(table: *const SgGrowthTable) -> u32 {
    match table.as_ref() {
        Some(t) => t.inner.max_radius(),
        None => u32::MAX,
    }
}

/// `vol(n)`, or 0 when `n` is out of range or the handle is null.
///
/// # Safety
/// `table` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn sg_growth_table_get(table: *const SgGrowthTable, n: u32) -> u64 {
    table.as_ref().and_then(|t| t.inner.get(n)).unwrap_or(0)
}

/// Log-log slope of the table over `[lo, hi]`.
///
/// # Safety
/// `table` must be a live handle; `slope` and `stderr_out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sg_growth_table_fit(
    table: *const SgGrowthTable,
    lo: u32,
    hi: u32,
    slope: *mut f64,
    stderr_out: *mut f64,
) -> SgStatus {
    let Some(t) = table.as_ref() else {
        return SgStatus::SgErrNull;
    };
    if slope.is_null() || stderr_out.is_null() {
        return SgStatus::SgErrNull;
    }
    match fit_exponent(&t.inner, lo, hi) {
        Ok(fit) => {
            *slope = fit.slope;
            *stderr_out = fit.stderr;
            SgStatus::SgOk
        }
        Err(e) => status_of(&e),
    }
}

/// CSV rendering (`n,vol` header) of the table as a freshly allocated
/// string; release it with [`sg_string_free`].
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_growth_table_csv(
    table: *const SgGrowthTable,
    out: *mut *mut c_char,
) -> SgStatus {
    let Some(t) = table.as_ref() else {
        return SgStatus::SgErrNull;
    };
    if out.is_null() {
        return SgStatus::SgErrNull;
    }
    match CString::new(t.inner.to_csv()) {
        Ok(s) => {
            *out = s.into_raw();
            SgStatus::SgOk
        }
        Err(_) => SgStatus::SgErrInvalid,
    }
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Frees a growth table handle.
///
/// # Safety
/// `table` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sg_growth_table_free(table: *mut SgGrowthTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of distinct images of the marked pair under the `γ` products with
/// indices up to `n`; 0 on failure.
#[no_mangle]
pub extern "C" fn sg_houghton_pair_lower_bound(n: u32) -> u64 {
    houghton::pair_ball_lower_bound(n)
        .map(|b| b.count as u64)
        .unwrap_or(0)
}

/// Diameter of the lamplighter coset space `X_m`; 0 on failure.
#[no_mangle]
pub extern "C" fn sg_coset_space_diameter(p: u64, d: u8, m: u64) -> u32 {
    let Ok(params) = WreathParams::new(p, d) else {
        return 0;
    };
    match build_coset_graph(params, m, 1 << 22) {
        Ok(g) => g.diameter(),
        Err(_) => 0,
    }
}
