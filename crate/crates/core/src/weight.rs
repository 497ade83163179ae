//! Arithmetic modes for probability weights.
//!
//! All probability-carrying types are generic over [`Weight`], with exactly
//! two instantiations: `BigRational` (exact mode, used for identities and
//! closed-form cross-checks) and `f64` (float mode, used for dynamics and
//! simulation). The mode is part of the type, so mixing modes in one
//! computation is rejected at compile time rather than at run time.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

/// Default tolerance for float-mode simplex validity and round-trip checks.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-12;

static FLOAT_TOL_BITS: AtomicU64 = AtomicU64::new(0);

/// Current float-mode tolerance. Process-global; defaults to 1e-12.
pub fn float_tolerance() -> f64 {
    let bits = FLOAT_TOL_BITS.load(Ordering::Relaxed);
    if bits == 0 {
        DEFAULT_FLOAT_TOL
    } else {
        f64::from_bits(bits)
    }
}

/// Override the float-mode tolerance (exposed as a CLI flag).
pub fn set_float_tolerance(tol: f64) {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    FLOAT_TOL_BITS.store(tol.to_bits(), Ordering::Relaxed);
}

/// Scalar arithmetic shared by the exact and float modes.
pub trait Weight:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// True for the exact-rational mode.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    /// num/den as a weight; den must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// Mode-native equality: exact for rationals, within the global
    /// tolerance for floats.
    fn close(&self, other: &Self) -> bool;
}

impl Weight for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).expect("rational out of f64 range")
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn close(&self, other: &Self) -> bool {
        (self - other).abs() <= float_tolerance()
    }
}

impl Weight for BigRational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).expect("rational out of f64 range")
    }

    fn close(&self, other: &Self) -> bool {
        self == other
    }
}

/// `1 - x`, kept here because it reads better than the operator chain at call
/// sites working over generic weights.
pub fn one_minus<W: Weight>(x: &W) -> W {
    W::one() - x.clone()
}

/// True when `x` lies in the closed unit interval (exactly for rationals,
/// within the global tolerance for floats).
pub fn in_unit_interval<W: Weight>(x: &W) -> bool {
    if W::EXACT {
        *x >= W::zero() && *x <= W::one()
    } else {
        let v = x.to_f64();
        let tol = float_tolerance();
        v >= -tol && v <= 1.0 + tol
    }
}

/// Render a rational as `num/den` (always with the denominator, so emitted
/// schemas stay stable even for integers).
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Signed magnitude helper used by float-mode comparisons in tests.
pub fn abs_rational(r: &BigRational) -> BigRational {
    r.abs()
}
