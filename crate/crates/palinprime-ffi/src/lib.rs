//! C ABI for the palindrome census library.
//!
//! Conventions: every fallible function returns a [`PpStatus`] and writes
//! its result through out-pointers; null out-pointers are rejected with
//! `PP_STATUS_NULL_POINTER`. The divisor profile is an opaque heap handle
//! created by [`pp_profile_build`] and released by [`pp_profile_free`].
//! The generated header lives at `include/palinprime.h`.

use std::os::raw::c_char;

use palinprime::arith;
use palinprime::census::{self, ApQuery, DivisorProfile};
use palinprime::coprime;
use palinprime::digits::{self, Base};

/// Result codes mirrored into the C header.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpStatus {
    /// Success.
    PpStatusOk = 0,
    /// Invalid input: bad base, residue, divisor, rank, or zero value.
    PpStatusDomain = 1,
    /// Resource limit: enumeration budget, pair budget, or the
    /// factorization bound.
    PpStatusLimit = 2,
    /// A required pointer argument was null.
    PpStatusNullPointer = 3,
    /// The result does not fit the C output type.
    PpStatusRange = 4,
}

fn status_of(err: &palinprime::Error) -> PpStatus {
    if err.is_resource_limit() {
        PpStatus::PpStatusLimit
    } else {
        PpStatus::PpStatusDomain
    }
}

fn checked_base(g: u64) -> Result<Base, PpStatus> {
    Base::new(g).map_err(|e| status_of(&e))
}

macro_rules! write_out {
    ($ptr:expr, $value:expr) => {{
        if $ptr.is_null() {
            return PpStatus::PpStatusNullPointer;
        }
        unsafe { *$ptr = $value };
    }};
}

/// Short static name for a status code.
#[no_mangle]
pub extern "C" fn pp_status_name(status: PpStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        PpStatus::PpStatusOk => b"ok\0",
        PpStatus::PpStatusDomain => b"domain error\0",
        PpStatus::PpStatusLimit => b"resource limit\0",
        PpStatus::PpStatusNullPointer => b"null pointer\0",
        PpStatus::PpStatusRange => b"out of range\0",
    };
    name.as_ptr() as *const c_char
}

/// True iff g is a usable base (g >= 2 with g^3 - g representable).
#[no_mangle]
pub extern "C" fn pp_base_valid(g: u64) -> bool {
    Base::new(g).is_ok()
}

/// Whether n reads the same backwards as forwards in base g.
///
/// # Safety
///
/// `out` must be null (reported as an error) or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pp_is_palindrome(n: u64, g: u64, out: *mut bool) -> PpStatus {
    let g = match checked_base(g) {
        Ok(g) => g,
        Err(s) => return s,
    };
    match digits::is_palindrome(n as u128, g) {
        Ok(v) => {
            write_out!(out, v);
            PpStatus::PpStatusOk
        }
        Err(e) => status_of(&e),
    }
}

/// Number of palindromes of the given length.
///
/// # Safety
///
/// `out` must be null (reported as an error) or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pp_count(length: u32, g: u64, out: *mut u64) -> PpStatus {
    let g = match checked_base(g) {
        Ok(g) => g,
        Err(s) => return s,
    };
    match census::count_formula(length, g) {
        Ok(v) => match u64::try_from(v) {
            Ok(v) => {
                write_out!(out, v);
                PpStatus::PpStatusOk
            }
            Err(_) => PpStatus::PpStatusRange,
        },
        Err(e) => status_of(&e),
    }
}

/// The rank-th palindrome of the given length, rank counted from zero in
/// increasing order.
///
/// # Safety
///
/// `out` must be null (reported as an error) or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pp_palindrome_at(
    rank: u64,
    length: u32,
    g: u64,
    out: *mut u64,
) -> PpStatus {
    let g = match checked_base(g) {
        Ok(g) => g,
        Err(s) => return s,
    };
    match digits::palindrome_at(rank as u128, length, g) {
        Ok(v) => match u64::try_from(v) {
            Ok(v) => {
                write_out!(out, v);
                PpStatus::PpStatusOk
            }
            Err(_) => PpStatus::PpStatusRange,
        },
        Err(e) => status_of(&e),
    }
}

/// Rank of a palindrome within its length class; inverse of
/// [`pp_palindrome_at`].
///
/// # Safety
///
/// `out` must be null (reported as an error) or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pp_rank_of(n: u64, length: u32, g: u64, out: *mut u64) -> PpStatus {
    let g = match checked_base(g) {
        Ok(g) => g,
        Err(s) => return s,
    };
    match digits::rank_of(n as u128, length, g) {
        Ok(v) => {
            write_out!(out, v as u64);
            PpStatus::PpStatusOk
        }
        Err(e) => status_of(&e),
    }
}

/// Count palindromes of one length with n = a (mod q); when `has_class`
/// is set, restrict further to n = k (mod g^3 - g). `budget` caps the
/// enumeration (0 means the library default).
///
/// # Safety
///
/// `out` must be null (reported as an error) or valid for a write.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn pp_count_ap(
    length: u32,
    g: u64,
    a: i64,
    q: u64,
    has_class: bool,
    k: i64,
    budget: u64,
    out: *mut u64,
) -> PpStatus {
    let g = match checked_base(g) {
        Ok(g) => g,
        Err(s) => return s,
    };
    let budget = if budget == 0 {
        census::DEFAULT_ENUM_BUDGET
    } else {
        budget
    };
    let query = match ApQuery::new(a as i128, q as u128) {
        Ok(query) => query,
        Err(e) => return status_of(&e),
    };
    let query = if has_class {
        match query.with_class(k as i128, g) {
            Ok(query) => query,
            Err(e) => return status_of(&e),
        }
    } else {
        query
    };
    match census::count_ap(length, g, &query, budget) {
        Ok(v) => {
            write_out!(out, v as u64);
            PpStatus::PpStatusOk
        }
        Err(e) => status_of(&e),
    }
}

/// Number of palindromes up to x coprime to g^3 - g.
///
/// # Safety
///
/// `out` must be null (reported as an error) or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pp_pstar_count(x: u64, g: u64, budget: u64, out: *mut u64) -> PpStatus {
    let g = match checked_base(g) {
        Ok(g) => g,
        Err(s) => return s,
    };
    let budget = if budget == 0 {
        census::DEFAULT_ENUM_BUDGET
    } else {
        budget
    };
    match census::pstar_count(x as u128, g, budget) {
        Ok(v) => {
            write_out!(out, v as u64);
            PpStatus::PpStatusOk
        }
        Err(e) => status_of(&e),
    }
}

/// Leading constant of the fixed-length coprime pair density.
///
/// # Safety
///
/// `out` must be null (reported as an error) or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pp_thm1_constant(g: u64, out: *mut f64) -> PpStatus {
    let g = match checked_base(g) {
        Ok(g) => g,
        Err(s) => return s,
    };
    write_out!(out, arith::thm1_constant(g));
    PpStatus::PpStatusOk
}

/// Leading constant of the coprime-to-g^3-g pair density.
///
/// # Safety
///
/// `out` must be null (reported as an error) or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pp_thm2_constant(g: u64, out: *mut f64) -> PpStatus {
    let g = match checked_base(g) {
        Ok(g) => g,
        Err(s) => return s,
    };
    write_out!(out, arith::thm2_constant(g));
    PpStatus::PpStatusOk
}

/// The exact rational rho(g) as numerator/denominator.
///
/// # Safety
///
/// `out_num` and `out_den` must be null (reported as an error) or valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn pp_rho(g: u64, out_num: *mut u64, out_den: *mut u64) -> PpStatus {
    let g = match checked_base(g) {
        Ok(g) => g,
        Err(s) => return s,
    };
    match arith::rational_parts_u64(&arith::rho(g)) {
        Some((num, den)) => {
            write_out!(out_num, num);
            write_out!(out_den, den);
            PpStatus::PpStatusOk
        }
        None => PpStatus::PpStatusRange,
    }
}

/// Opaque handle: divisor profile of one palindrome length (the sieve
/// input #Pi(length; 0, d) for every realized squarefree d).
pub struct PpProfile {
    inner: DivisorProfile,
}

/// Build the divisor profile of one length. On success writes a heap
/// handle that must be released with [`pp_profile_free`].
///
/// # Safety
///
/// `out` must be null (reported as an error) or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pp_profile_build(
    length: u32,
    g: u64,
    budget: u64,
    out: *mut *mut PpProfile,
) -> PpStatus {
    let g = match checked_base(g) {
        Ok(g) => g,
        Err(s) => return s,
    };
    let budget = if budget == 0 {
        census::DEFAULT_ENUM_BUDGET
    } else {
        budget
    };
    match census::divisor_profile(length, g, budget) {
        Ok(profile) => {
            let handle = Box::into_raw(Box::new(PpProfile { inner: profile }));
            write_out!(out, handle);
            PpStatus::PpStatusOk
        }
        Err(e) => status_of(&e),
    }
}

/// #Pi(length; 0, d) for squarefree d; zero when d is not realized or the
/// handle is null.
///
/// # Safety
///
/// `profile` must be null or a live handle from [`pp_profile_build`].
#[no_mangle]
pub unsafe extern "C" fn pp_profile_count(profile: *const PpProfile, d: u64) -> u64 {
    match unsafe { profile.as_ref() } {
        Some(p) => p.inner.count(d),
        None => 0,
    }
}

/// Total palindrome count of the profiled length.
///
/// # Safety
///
/// `profile` must be null or a live handle from [`pp_profile_build`].
#[no_mangle]
pub unsafe extern "C" fn pp_profile_total(profile: *const PpProfile) -> u64 {
    match unsafe { profile.as_ref() } {
        Some(p) => p.inner.total(),
        None => 0,
    }
}

/// Möbius-sieve count of ordered coprime palindrome pairs from a profile,
/// split at `threshold` into head and tail contributions.
///
/// # Safety
///
/// `profile` must be null (reported as an error) or a live handle from
/// [`pp_profile_build`]; the out-pointers must be null or valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn pp_coprime_pairs(
    profile: *const PpProfile,
    threshold: u64,
    out_total: *mut i64,
    out_n1: *mut i64,
    out_n2: *mut i64,
) -> PpStatus {
    let profile = match unsafe { profile.as_ref() } {
        Some(p) => p,
        None => return PpStatus::PpStatusNullPointer,
    };
    match coprime::sieve_from_profile(&profile.inner, threshold as u128) {
        Ok(r) => {
            let (total, n1, n2) = match (
                i64::try_from(r.total),
                i64::try_from(r.n1),
                i64::try_from(r.n2),
            ) {
                (Ok(t), Ok(a), Ok(b)) => (t, a, b),
                _ => return PpStatus::PpStatusRange,
            };
            write_out!(out_total, total);
            write_out!(out_n1, n1);
            write_out!(out_n2, n2);
            PpStatus::PpStatusOk
        }
        Err(e) => status_of(&e),
    }
}

/// Release a profile handle. Null is a no-op.
///
/// # Safety
///
/// `profile` must be null or a live handle from [`pp_profile_build`];
/// the handle must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pp_profile_free(profile: *mut PpProfile) {
    if !profile.is_null() {
        drop(unsafe { Box::from_raw(profile) });
    }
}
