//! C ABI over the `gpt-entropy` library.
//!
//! States are opaque `GptState` handles created from the JSON state format
//! and released with `gpt_state_free`. Every fallible call returns a
//! `GptStatus`; on failure the message is kept per thread and read with
//! `gpt_last_error`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gpt_entropy::boxworld::chsh_value;
use gpt_entropy::entropy::{Engine, Partition};
use gpt_entropy::framework::State;
use gpt_entropy::{rational, Error};

/// Opaque handle to a validated state.
pub struct GptState {
    state: State,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GptStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidState = 4,
    Signalling = 5,
    GuardExceeded = 6,
    Unsupported = 7,
    InvalidArgument = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

fn status_of(e: &Error) -> GptStatus {
    match e {
        Error::Parse { .. } => GptStatus::Parse,
        Error::Signalling(_) => GptStatus::Signalling,
        Error::GuardExceeded { .. } => GptStatus::GuardExceeded,
        Error::Unsupported(_) => GptStatus::Unsupported,
        Error::OutOfRange(_) | Error::SystemMismatch(_) | Error::ZeroProbability(_) => GptStatus::InvalidArgument,
        _ => GptStatus::InvalidState,
    }
}

/// Runs `f`, recording the message of any error or panic.
fn guarded(f: impl FnOnce() -> Result<(), (GptStatus, String)>) -> GptStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GptStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {message}"));
            GptStatus::Panic
        }
    }
}

fn lib<T>(r: gpt_entropy::Result<T>) -> Result<T, (GptStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (GptStatus, String) {
    (GptStatus::NullPointer, format!("{what} is null"))
}

unsafe fn state_ref<'a>(handle: *const GptState) -> Result<&'a State, (GptStatus, String)> {
    handle.as_ref().map(|h| &h.state).ok_or_else(|| null("state"))
}

unsafe fn write_out(out: *mut f64, value: f64) -> Result<(), (GptStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = value;
    Ok(())
}

unsafe fn indices<'a>(ptr: *const usize, len: usize, what: &str) -> Result<&'a [usize], (GptStatus, String)> {
    if len == 0 {
        Ok(&[])
    } else if ptr.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(ptr, len))
    }
}

/// Parses a JSON state. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpt_state_from_json(json: *const c_char, out: *mut *mut GptState) -> GptStatus {
    guarded(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| (GptStatus::InvalidUtf8, e.to_string()))?;
        let state = lib(gpt_entropy::io::state_from_json(text))?;
        *out = Box::into_raw(Box::new(GptState { state }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `handle` must come from `gpt_state_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gpt_state_free(handle: *mut GptState) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of subsystems of the state, or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gpt_state_subsystems(handle: *const GptState) -> usize {
    handle.as_ref().map_or(0, |h| h.state.num_subsystems())
}

/// Measurement entropy of the whole state, in bits.
///
/// # Safety
/// `handle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpt_hhat(handle: *const GptState, out: *mut f64) -> GptStatus {
    guarded(|| {
        let state = state_ref(handle)?;
        write_out(out, lib(Engine::default().hhat(state))?.value_bits)
    })
}

/// Measurement entropy of the marginal on `subsystems`.
///
/// # Safety
/// `subsystems` must point to `len` indices; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gpt_hhat_of(
    handle: *const GptState,
    subsystems: *const usize,
    len: usize,
    out: *mut f64,
) -> GptStatus {
    guarded(|| {
        let state = state_ref(handle)?;
        let subs = indices(subsystems, len, "subsystems")?;
        write_out(out, lib(Engine::default().hhat_of(state, subs))?.value_bits)
    })
}

/// Conditional entropy of A given B; `plus` selects the measured form.
///
/// # Safety
/// `a` and `b` must point to `a_len` and `b_len` indices; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gpt_conditional(
    handle: *const GptState,
    a: *const usize,
    a_len: usize,
    b: *const usize,
    b_len: usize,
    plus: bool,
    out: *mut f64,
) -> GptStatus {
    guarded(|| {
        let state = state_ref(handle)?;
        let p = Partition::new(indices(a, a_len, "a")?.to_vec(), indices(b, b_len, "b")?.to_vec());
        let e = Engine::default();
        let r = if plus { e.cond_plus(state, &p) } else { e.cond_standard(state, &p) };
        write_out(out, lib(r)?.value_bits)
    })
}

/// Mutual information between A and B; `plus` selects the measured form.
///
/// # Safety
/// `a` and `b` must point to `a_len` and `b_len` indices; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gpt_mutual(
    handle: *const GptState,
    a: *const usize,
    a_len: usize,
    b: *const usize,
    b_len: usize,
    plus: bool,
    out: *mut f64,
) -> GptStatus {
    guarded(|| {
        let state = state_ref(handle)?;
        let p = Partition::new(indices(a, a_len, "a")?.to_vec(), indices(b, b_len, "b")?.to_vec());
        let e = Engine::default();
        let r = if plus { e.mutual_plus(state, &p) } else { e.mutual(state, &p) };
        write_out(out, lib(r)?.value_bits)
    })
}

/// Decomposition entropy, in bits.
///
/// # Safety
/// `handle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpt_decomposition_entropy(handle: *const GptState, out: *mut f64) -> GptStatus {
    guarded(|| {
        let state = state_ref(handle)?;
        write_out(out, lib(Engine::default().decomposition_entropy(state))?.value_bits)
    })
}

/// CHSH value of a bipartite binary box.
///
/// # Safety
/// `handle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpt_chsh(handle: *const GptState, out: *mut f64) -> GptStatus {
    guarded(|| {
        let state = state_ref(handle)?;
        let State::Box(b) = state else {
            return Err((GptStatus::InvalidArgument, "CHSH needs a box-world state".into()));
        };
        write_out(out, rational::to_f64(&lib(chsh_value(b))?))
    })
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`). Returns the full message length
/// excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gpt_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}
