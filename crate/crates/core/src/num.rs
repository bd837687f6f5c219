//! Integer types usable as multiplicity and face counters.
//!
//! Everything that counts facets, Hilbert-function values or multinomials is
//! generic over [`Count`]. The crate root fixes [`num_bigint::BigUint`] as the
//! default; `u64` and `u128` work for small inputs and report
//! [`Error::Overflow`] instead of wrapping.

use std::fmt;
use std::hash::Hash;
use std::ops::Div;

use num_traits::{CheckedAdd, CheckedMul, FromPrimitive, Num, One, ToPrimitive, Zero};
use serde::Serializer;

use crate::error::{Error, Result};

pub trait Count:
    Clone
    + Ord
    + Hash
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Num
    + CheckedAdd
    + CheckedMul
    + Div<Output = Self>
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
}

impl<T> Count for T where
    T: Clone
        + Ord
        + Hash
        + fmt::Debug
        + fmt::Display
        + Zero
        + One
        + Num
        + CheckedAdd
        + CheckedMul
        + Div<Output = Self>
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

pub fn from_u64<T: Count>(v: u64) -> Result<T> {
    T::from_u64(v).ok_or(Error::Overflow)
}

/// Converts between count types through their decimal form.
pub fn convert<T: Count, U: fmt::Display>(v: &U) -> Result<T> {
    T::from_str_radix(&v.to_string(), 10).map_err(|_| Error::Overflow)
}

pub fn add<T: Count>(a: &T, b: &T) -> Result<T> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub fn mul<T: Count>(a: &T, b: &T) -> Result<T> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

/// `n choose k`, exact. Intermediate products are `r * (n - i)` before the
/// exact division by `i + 1`, so fixed-width types may overflow slightly
/// before the result itself would.
pub fn binomial<T: Count>(n: u64, k: u64) -> Result<T> {
    if k > n {
        return Ok(T::zero());
    }
    let k = k.min(n - k);
    let mut r = T::one();
    for i in 0..k {
        r = mul(&r, &from_u64(n - i)?)? / from_u64(i + 1)?;
    }
    Ok(r)
}

/// JSON numbers when the value fits in 64 bits, decimal strings otherwise.
pub fn serialize_count<T: Count, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

/// Decimal string form for signed big integers.
pub fn serialize_display<D: fmt::Display, S: Serializer>(v: &D, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn serialize_display_seq<D: fmt::Display, S: Serializer>(v: &[D], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}
