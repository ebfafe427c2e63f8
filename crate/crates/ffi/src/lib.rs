//! C ABI over `signfree`.
//!
//! Objects cross the boundary as opaque handles created by `sf_*_new`-style
//! constructors and released with the matching `sf_*_free`. Every fallible
//! call returns an [`SfStatus`]; on failure the message is available from
//! [`sf_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use signfree::classify::classify;
use signfree::clock::{build_ff, gap_formulas, history_state, QuantumCircuit};
use signfree::io::{circuit_from_str, hamiltonian_from_str, serialize_hamiltonian};
use signfree::matrix::{OperatorMatrix, C64};
use signfree::pauli::{random_instance_with, LocalHamiltonian, PauliAlphabet};
use signfree::protocols::{acceptance_operator, build_hc, first_register_weight};
use signfree::sign_elim::{
    add_ancilla_penalty, add_penalty_complex, stochastize, stochastize_complex, stoquastize, MappedHamiltonian,
};
use signfree::spectral::eig_dense;
use signfree::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    /// A precondition of the called operation does not hold.
    InvalidArgument = 2,
    ResourceLimit = 3,
    NonConvergence = 4,
    ParseError = 5,
    IoError = 6,
    InvalidUtf8 = 7,
    /// The output buffer is shorter than the result.
    BufferTooSmall = 8,
    Panic = 9,
}

/// Structural flags of a matrix.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SfClassFlags {
    pub hermitian: bool,
    pub nonnegative_entries: bool,
    pub stoquastic: bool,
    pub column_stochastic: bool,
    pub doubly_stochastic: bool,
    pub symmetric: bool,
    pub permutation: bool,
    pub projector: bool,
    pub psd: bool,
}

pub struct SfHamiltonian(LocalHamiltonian);
pub struct SfMatrix(OperatorMatrix);
pub struct SfMapped(MappedHamiltonian);
pub struct SfCircuit(QuantumCircuit);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SfStatus {
    match e {
        Error::Contract(_) => SfStatus::InvalidArgument,
        Error::Resource { .. } => SfStatus::ResourceLimit,
        Error::NonConvergence { .. } => SfStatus::NonConvergence,
        Error::Parse { .. } => SfStatus::ParseError,
        Error::Io(_) => SfStatus::IoError,
    }
}

fn fail(status: SfStatus, msg: impl Into<String>) -> SfStatus {
    set_error(msg.into());
    status
}

impl From<Error> for SfStatus {
    fn from(e: Error) -> Self {
        fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), SfStatus>) -> SfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SfStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            fail(SfStatus::Panic, msg)
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, SfStatus> {
    p.as_ref().ok_or_else(|| fail(SfStatus::NullPointer, format!("{what} is null")))
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, SfStatus> {
    if p.is_null() {
        return Err(fail(SfStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(SfStatus::InvalidUtf8, e.to_string()))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), SfStatus> {
    if out.is_null() {
        return Err(fail(SfStatus::NullPointer, "output pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_slice(out: *mut f64, len: usize, values: &[f64]) -> Result<(), SfStatus> {
    if values.len() > len {
        return Err(fail(
            SfStatus::BufferTooSmall,
            format!("buffer holds {len} values, result has {}", values.len()),
        ));
    }
    if values.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(fail(SfStatus::NullPointer, "output buffer is null"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

/// Reads `len` complex numbers stored as interleaved `(re, im)` pairs.
unsafe fn read_complex(p: *const f64, len: usize) -> Result<Vec<C64>, SfStatus> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(fail(SfStatus::NullPointer, "input buffer is null"));
    }
    let raw = std::slice::from_raw_parts(p, 2 * len);
    Ok(raw.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect())
}

/// Message of the last failed call on this thread, or an empty string.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a Hamiltonian file (version "1" JSON).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_hamiltonian_from_json(json: *const c_char, out: *mut *mut SfHamiltonian) -> SfStatus {
    guard(|| {
        let h = hamiltonian_from_str(read_str(json)?)?;
        store(out, SfHamiltonian(h))
    })
}

/// Seeded random instance; `complex` adds `Y`-containing terms.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_hamiltonian_random(
    n: usize,
    locality: usize,
    seed: u64,
    complex: bool,
    out: *mut *mut SfHamiltonian,
) -> SfStatus {
    guard(|| {
        let alphabet = if complex { PauliAlphabet::XYZ } else { PauliAlphabet::XZ };
        store(out, SfHamiltonian(random_instance_with(n, locality, seed, 1.0, alphabet)?))
    })
}

/// Diagonal Hamiltonian on `n` qubits with exactly `c` negative eigenvalues.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_build_hc(c: usize, n: usize, out: *mut *mut SfHamiltonian) -> SfStatus {
    guard(|| store(out, SfHamiltonian(build_hc(c, n)?)))
}

/// Serializes to JSON; release the string with [`sf_string_free`].
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_hamiltonian_to_json(h: *const SfHamiltonian, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let h = borrow(h, "hamiltonian")?;
        if out.is_null() {
            return Err(fail(SfStatus::NullPointer, "output pointer is null"));
        }
        let text = CString::new(serialize_hamiltonian(&h.0)).expect("JSON has no NUL bytes");
        *out = text.into_raw();
        Ok(())
    })
}

/// Number of qubits, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_hamiltonian_qubits(h: *const SfHamiltonian) -> usize {
    h.as_ref().map_or(0, |h| h.0.n())
}

/// # Safety
/// `h` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn sf_hamiltonian_free(h: *mut SfHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Builds the sparse matrix of a Hamiltonian.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_hamiltonian_matrix(h: *const SfHamiltonian, out: *mut *mut SfMatrix) -> SfStatus {
    guard(|| {
        let m = borrow(h, "hamiltonian")?.0.build_matrix()?;
        store(out, SfMatrix(m))
    })
}

/// Matrix dimension, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_matrix_dim(m: *const SfMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// Writes the ascending eigenvalues of a Hermitian matrix into `out[0..dim]`.
///
/// # Safety
/// `m` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sf_matrix_eigenvalues(m: *const SfMatrix, out: *mut f64, len: usize) -> SfStatus {
    guard(|| {
        let m = borrow(m, "matrix")?;
        if !m.0.is_hermitian() {
            return Err(fail(SfStatus::InvalidArgument, "matrix is not Hermitian"));
        }
        write_slice(out, len, &eig_dense(&m.0)?.eigenvalues)
    })
}

/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_matrix_classify(m: *const SfMatrix, tol: f64, out: *mut SfClassFlags) -> SfStatus {
    guard(|| {
        let f = classify(&borrow(m, "matrix")?.0, tol);
        let out = out
            .as_mut()
            .ok_or_else(|| fail(SfStatus::NullPointer, "output pointer is null"))?;
        *out = SfClassFlags {
            hermitian: f.hermitian,
            nonnegative_entries: f.nonnegative_entries,
            stoquastic: f.stoquastic,
            column_stochastic: f.column_stochastic,
            doubly_stochastic: f.doubly_stochastic,
            symmetric: f.symmetric,
            permutation: f.permutation,
            projector: f.projector,
            psd: f.psd,
        };
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn sf_matrix_free(m: *mut SfMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

unsafe fn map_with(
    h: *const SfHamiltonian,
    out: *mut *mut SfMapped,
    f: fn(&LocalHamiltonian) -> signfree::Result<MappedHamiltonian>,
) -> SfStatus {
    guard(|| {
        let m = f(&borrow(h, "hamiltonian")?.0)?;
        store(out, SfMapped(m))
    })
}

/// Stoquastic lift on one extra qubit.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_map_stoquastize(h: *const SfHamiltonian, out: *mut *mut SfMapped) -> SfStatus {
    map_with(h, out, stoquastize)
}

/// Stochastic lift of a real Hamiltonian on one extra qubit.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_map_stochastize(h: *const SfHamiltonian, out: *mut *mut SfMapped) -> SfStatus {
    map_with(h, out, stochastize)
}

/// Stochastic lift of a complex Hamiltonian on two extra qubits.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_map_stochastize_complex(h: *const SfHamiltonian, out: *mut *mut SfMapped) -> SfStatus {
    map_with(h, out, stochastize_complex)
}

/// Adds the ancilla penalty with parameter `p` to a stochastic lift.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_mapped_add_penalty(m: *const SfMapped, p: f64, out: *mut *mut SfMapped) -> SfStatus {
    guard(|| {
        let m = &borrow(m, "mapped hamiltonian")?.0;
        let penalized = if m.ancilla_count == 2 {
            add_penalty_complex(m, p)?
        } else {
            add_ancilla_penalty(m, p)?
        };
        store(out, SfMapped(penalized))
    })
}

/// Copies out the realized matrix of a mapped Hamiltonian.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_mapped_matrix(m: *const SfMapped, out: *mut *mut SfMatrix) -> SfStatus {
    guard(|| {
        let m = borrow(m, "mapped hamiltonian")?;
        store(out, SfMatrix(m.0.matrix().clone()))
    })
}

/// Spectrum of the sector named by `label` ("minus", "plus", "v0".."v3").
///
/// Writes `2^n` ascending eigenvalues and stores the count in `written`.
///
/// # Safety
/// `m` must be a live handle, `label` a NUL-terminated string, `out` must hold
/// `len` doubles and `written` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn sf_mapped_sector_spectrum(
    m: *const SfMapped,
    label: *const c_char,
    out: *mut f64,
    len: usize,
    written: *mut usize,
) -> SfStatus {
    guard(|| {
        let m = borrow(m, "mapped hamiltonian")?;
        let label = read_str(label)?.parse()?;
        let spec = m.0.sector_spectrum(label)?;
        write_slice(out, len, &spec)?;
        if let Some(w) = written.as_mut() {
            *w = spec.len();
        }
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn sf_mapped_free(m: *mut SfMapped) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Closed-form gaps of the clock Hamiltonian.
///
/// # Safety
/// `block_gap` and `full_gap` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_gap_formulas(s: f64, l: usize, block_gap: *mut f64, full_gap: *mut f64) -> SfStatus {
    guard(|| {
        if block_gap.is_null() || full_gap.is_null() {
            return Err(fail(SfStatus::NullPointer, "output pointer is null"));
        }
        let g = gap_formulas(s, l);
        *block_gap = g.block_gap;
        *full_gap = g.full_gap;
        Ok(())
    })
}

/// Parses a circuit file (version "1" JSON).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_circuit_from_json(json: *const c_char, out: *mut *mut SfCircuit) -> SfStatus {
    guard(|| {
        let c = circuit_from_str(read_str(json)?)?;
        store(out, SfCircuit(c))
    })
}

/// Number of gates, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_circuit_len(c: *const SfCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `c` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn sf_circuit_free(c: *mut SfCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Realized frustration-free clock Hamiltonian at parameter `s`.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_clock_hamiltonian(c: *const SfCircuit, s: f64, out: *mut *mut SfMatrix) -> SfStatus {
    guard(|| {
        let m = build_ff(&borrow(c, "circuit")?.0, s)?.realize()?;
        store(out, SfMatrix(m))
    })
}

/// History state as interleaved `(re, im)` pairs; needs `2 · 2^(n+L+1)` doubles.
///
/// # Safety
/// `c` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sf_history_state(c: *const SfCircuit, s: f64, out: *mut f64, len: usize) -> SfStatus {
    guard(|| {
        let v = history_state(&borrow(c, "circuit")?.0, s)?;
        let flat: Vec<f64> = v.iter().flat_map(|z| [z.re, z.im]).collect();
        write_slice(out, len, &flat)
    })
}

/// Optimal acceptance probability of the energy-threshold verifier on `c` registers.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_acceptance_probability(
    h: *const SfHamiltonian,
    c: usize,
    threshold: f64,
    out: *mut f64,
) -> SfStatus {
    guard(|| {
        let r = acceptance_operator(&borrow(h, "hamiltonian")?.0, c, threshold)?;
        let out = out
            .as_mut()
            .ok_or_else(|| fail(SfStatus::NullPointer, "output pointer is null"))?;
        *out = r.max_acceptance;
        Ok(())
    })
}

/// `<φ|(|α><α| ⊗ 1)|φ>` for an antisymmetric `φ`; both vectors interleaved.
///
/// `phi_len` and `alpha_len` count complex entries.
///
/// # Safety
/// `phi` must hold `2 · phi_len` doubles, `alpha` `2 · alpha_len`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_first_register_weight(
    phi: *const f64,
    phi_len: usize,
    alpha: *const f64,
    alpha_len: usize,
    out: *mut f64,
) -> SfStatus {
    guard(|| {
        let phi = read_complex(phi, phi_len)?;
        let alpha = read_complex(alpha, alpha_len)?;
        let v = first_register_weight(&phi, &alpha)?;
        let out = out
            .as_mut()
            .ok_or_else(|| fail(SfStatus::NullPointer, "output pointer is null"))?;
        *out = v;
        Ok(())
    })
}
