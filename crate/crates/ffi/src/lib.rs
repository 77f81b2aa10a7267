//! C ABI for `codestat`.
//!
//! Codes are opaque `CsCode` handles released with [`cs_code_free`]. Every
//! fallible function returns a [`CsStatus`] and writes results through out
//! pointers; on failure [`cs_last_error_message`] describes the most recent
//! error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use codestat::code::{make_linear_code, make_reed_solomon, CodeFile, GeneratorMatrix};
use codestat::fractal::{box_count_estimate, similarity_dimension, threshold_scan};
use codestat::measures::radon_nikodym_constant;
use codestat::spoiling::{numeric_spoil, SpoilKind};
use codestat::thermo::{critical_beta, kms_state_value, partition_function, SumMode, Weights};
use codestat::{Code, Error, ErrorKind, Word};

/// Status codes; the non-zero values match the CLI exit codes where they
/// overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    Input = 2,
    Precondition = 3,
    NonConvergence = 4,
    Panic = 5,
}

/// Numeric spoiling kinds, passed to [`cs_numeric_spoil`] as integers.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsSpoilKind {
    /// `[n, k, d] → [n+1, k, d]`.
    Pad = 0,
    /// `[n, k, d] → [n−1, k, d−1]`.
    Puncture = 1,
    /// `[n, k, d] → [n−1, k′, d]`.
    Shorten = 2,
}

/// Opaque code handle.
pub struct CsCode(Code);

/// Parameters of a code. `d` is 0 and `delta` is NaN when the code has
/// fewer than two words.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CsCodeParams {
    pub q: u32,
    pub n: usize,
    pub size: usize,
    pub d: usize,
    pub k_real: f64,
    pub k_floor: u32,
    /// `k_floor / n` as a reduced fraction.
    pub rate_num: i64,
    pub rate_den: i64,
    pub rate: f64,
    pub delta: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CsStatus {
    match e.kind() {
        ErrorKind::Input => CsStatus::Input,
        ErrorKind::Precondition => CsStatus::Precondition,
        ErrorKind::NonConvergence => CsStatus::NonConvergence,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

type FfiResult<T> = std::result::Result<T, Fail>;

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> CsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            CsStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            CsStatus::Panic
        }
    }
}

unsafe fn code_ref<'a>(code: *const CsCode) -> FfiResult<&'a Code> {
    code.as_ref().map(|c| &c.0).ok_or(Fail::Null("code"))
}

unsafe fn out_mut<'a, T>(out: *mut T, what: &'static str) -> FfiResult<&'a mut T> {
    out.as_mut().ok_or(Fail::Null(what))
}

/// A slice from a pointer and length; a null pointer is allowed for length 0.
unsafe fn slice<'a, T>(data: *const T, len: usize, what: &'static str) -> FfiResult<&'a [T]> {
    if len == 0 {
        Ok(&[])
    } else if data.is_null() {
        Err(Fail::Null(what))
    } else {
        Ok(std::slice::from_raw_parts(data, len))
    }
}

fn emit(code: Code, out: &mut *mut CsCode) {
    *out = Box::into_raw(Box::new(CsCode(code)));
}

/// Builds a code from `count` words of length `n`, stored row-major in
/// `digits` (`count · n` bytes, each below `q`).
///
/// # Safety
/// `digits` must point to `count · n` readable bytes and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cs_code_new(
    q: u32,
    n: usize,
    digits: *const u8,
    count: usize,
    out: *mut *mut CsCode,
) -> CsStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        let total = count
            .checked_mul(n)
            .ok_or_else(|| Error::InvalidInput("word table too large".into()))?;
        let data = slice(digits, total, "digits")?;
        let words = if n == 0 {
            vec![Word::new(Vec::new()); count]
        } else {
            data.chunks(n).map(|c| Word::new(c.to_vec())).collect()
        };
        emit(Code::new(q, n, words)?, out);
        Ok(())
    })
}

/// Parses `{"q": .., "n": .., "words": [..]}`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_code_from_json(json: *const c_char, out: *mut *mut CsCode) -> CsStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        if json.is_null() {
            return Err(Fail::Null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Error::InvalidInput("json is not UTF-8".into()))?;
        let file: CodeFile = serde_json::from_str(text).map_err(Error::from)?;
        emit(file.into_code()?, out);
        Ok(())
    })
}

/// Releases a code. Null is ignored.
///
/// # Safety
/// `code` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_code_free(code: *mut CsCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// # Safety
/// `code` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_code_params(code: *const CsCode, out: *mut CsCodeParams) -> CsStatus {
    guard(|| {
        let c = code_ref(code)?;
        let out = out_mut(out, "out")?;
        let d = c.distance();
        let rate = c.rate_floor();
        *out = CsCodeParams {
            q: c.q(),
            n: c.n(),
            size: c.size(),
            d: d.unwrap_or(0),
            k_real: c.k_real(),
            k_floor: c.k_floor(),
            rate_num: *rate.numer(),
            rate_den: *rate.denom(),
            rate: c.rate_f64(),
            delta: d.map_or(f64::NAN, |d| d as f64 / c.n() as f64),
        };
        Ok(())
    })
}

/// Copies the words, row-major, into `digits`, which holds `capacity`
/// bytes. Needs `capacity ≥ size · n`.
///
/// # Safety
/// `digits` must point to `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cs_code_words(code: *const CsCode, digits: *mut u8, capacity: usize) -> CsStatus {
    guard(|| {
        let c = code_ref(code)?;
        let need = c.size() * c.n();
        if capacity < need {
            return Err(Error::InvalidInput(format!("buffer holds {capacity} bytes, need {need}")).into());
        }
        if need == 0 {
            return Ok(());
        }
        if digits.is_null() {
            return Err(Fail::Null("digits"));
        }
        let buf = std::slice::from_raw_parts_mut(digits, need);
        for (chunk, w) in buf.chunks_mut(c.n()).zip(c.words()) {
            chunk.copy_from_slice(w.digits());
        }
        Ok(())
    })
}

/// The `[q, k, q−k+1]` Reed–Solomon code over the prime field `F_q`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_reed_solomon(q: u32, k: usize, out: *mut *mut CsCode) -> CsStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        emit(make_reed_solomon(q, k)?, out);
        Ok(())
    })
}

/// The span of a `k × n` generator matrix over the prime field `F_q`,
/// stored row-major in `rows`.
///
/// # Safety
/// `rows` must point to `k · n` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_linear_code(
    q: u32,
    k: usize,
    n: usize,
    rows: *const u32,
    out: *mut *mut CsCode,
) -> CsStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        let total = k
            .checked_mul(n)
            .ok_or_else(|| Error::InvalidInput("matrix too large".into()))?;
        let data = slice(rows, total, "rows")?;
        if n == 0 {
            return Err(Error::InvalidInput("generator matrix needs n ≥ 1".into()).into());
        }
        let g = GeneratorMatrix::new(q, data.chunks(n).map(<[u32]>::to_vec).collect())?;
        emit(make_linear_code(&g)?, out);
        Ok(())
    })
}

/// Applies a numeric spoiling (a `CsSpoilKind` value) and returns the new
/// code.
///
/// # Safety
/// `code` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_numeric_spoil(code: *const CsCode, kind: i32, out: *mut *mut CsCode) -> CsStatus {
    guard(|| {
        let c = code_ref(code)?;
        let out = out_mut(out, "out")?;
        let kind = match kind {
            k if k == CsSpoilKind::Pad as i32 => SpoilKind::Pad,
            k if k == CsSpoilKind::Puncture as i32 => SpoilKind::Puncture,
            k if k == CsSpoilKind::Shorten as i32 => SpoilKind::Shorten,
            k => return Err(Error::InvalidInput(format!("unknown spoiling kind {k}")).into()),
        };
        emit(numeric_spoil(c, kind)?.code, out);
        Ok(())
    })
}

/// `Z(β)`. `series_terms = 0` uses the closed form, otherwise the series
/// truncated after that many terms. Divergence sets `*divergent` and leaves
/// `*value` at infinity.
///
/// # Safety
/// `code` must be a live handle; `value` and `divergent` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_partition_function(
    code: *const CsCode,
    beta: f64,
    series_terms: usize,
    value: *mut f64,
    divergent: *mut bool,
) -> CsStatus {
    guard(|| {
        let c = code_ref(code)?;
        let value = out_mut(value, "value")?;
        let divergent = out_mut(divergent, "divergent")?;
        let mode = if series_terms == 0 { SumMode::Closed } else { SumMode::Series(series_terms) };
        let z = partition_function(c, beta, mode)?;
        *divergent = z.value.is_divergent();
        *value = z.value.finite().unwrap_or(f64::INFINITY);
        Ok(())
    })
}

/// The unique `β` with `Σ e^{−β λ_i} = 1`.
///
/// # Safety
/// `lambda` must point to `len` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_critical_beta(lambda: *const f64, len: usize, out: *mut f64) -> CsStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        let w = Weights::new(slice(lambda, len, "lambda")?.to_vec())?;
        *out = critical_beta(&w)?;
        Ok(())
    })
}

/// KMS state value on the pair of codeword sequences given as indices into
/// the code's word list.
///
/// # Safety
/// `w` and `w_prime` must point to `w_len` and `w_prime_len` readable
/// indices; `code` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_kms_state_value(
    code: *const CsCode,
    beta: f64,
    w: *const usize,
    w_len: usize,
    w_prime: *const usize,
    w_prime_len: usize,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let c = code_ref(code)?;
        let out = out_mut(out, "out")?;
        let pick = |idx: &[usize]| -> FfiResult<Vec<Word>> {
            idx.iter()
                .map(|&i| {
                    c.words()
                        .get(i)
                        .cloned()
                        .ok_or_else(|| Error::InvalidInput(format!("codeword index {i} ≥ {}", c.size())).into())
                })
                .collect()
        };
        let a = pick(slice(w, w_len, "w")?)?;
        let b = pick(slice(w_prime, w_prime_len, "w_prime")?)?;
        *out = kms_state_value(c, beta, &a, &b)?;
        Ok(())
    })
}

/// `1/#C`.
///
/// # Safety
/// `code` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_radon_nikodym_constant(code: *const CsCode, out: *mut f64) -> CsStatus {
    guard(|| {
        let c = code_ref(code)?;
        *out_mut(out, "out")? = radon_nikodym_constant(c);
        Ok(())
    })
}

/// Box-counting estimate `log_q(#C^depth) / (depth · n)`.
///
/// # Safety
/// `code` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_box_count_dimension(code: *const CsCode, depth: u32, out: *mut f64) -> CsStatus {
    guard(|| {
        let c = code_ref(code)?;
        let out = out_mut(out, "out")?;
        *out = box_count_estimate(c, depth)?.to_f64();
        Ok(())
    })
}

/// Largest `#(C∩π)` for each `ℓ = 0..=n`, written to `max_counts`
/// (capacity `n + 1`). Also reports `d` and whether the threshold property
/// holds.
///
/// # Safety
/// `max_counts` must hold `capacity` writable values; `d` and `holds`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cs_threshold_scan(
    code: *const CsCode,
    seed: u64,
    max_counts: *mut usize,
    capacity: usize,
    d: *mut usize,
    holds: *mut bool,
) -> CsStatus {
    guard(|| {
        let c = code_ref(code)?;
        let d = out_mut(d, "d")?;
        let holds = out_mut(holds, "holds")?;
        if capacity < c.n() + 1 {
            return Err(Error::InvalidInput(format!("capacity {capacity} < n + 1 = {}", c.n() + 1)).into());
        }
        if max_counts.is_null() {
            return Err(Fail::Null("max_counts"));
        }
        let scan = threshold_scan(c, seed)?;
        let buf = std::slice::from_raw_parts_mut(max_counts, c.n() + 1);
        for (slot, row) in buf.iter_mut().zip(&scan.rows) {
            *slot = row.max_count;
        }
        *d = scan.d;
        *holds = scan.threshold_holds();
        Ok(())
    })
}

/// The `s` with `Σ r_i^s = 1` for ratios in `(0, 1)`.
///
/// # Safety
/// `ratios` must point to `len` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_similarity_dimension(ratios: *const f64, len: usize, out: *mut f64) -> CsStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        *out = similarity_dimension(slice(ratios, len, "ratios")?)?;
        Ok(())
    })
}

/// Message for the last failure on this thread, or null. Free it with
/// [`cs_string_free`].
#[no_mangle]
pub extern "C" fn cs_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from [`cs_last_error_message`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
