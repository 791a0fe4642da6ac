// SPDX-License-Identifier: Apache-2.0

//! Scalar types for partition-function arithmetic. All quantities involved
//! are non-negative, so only `+`, `×` and `÷` are needed, and relative error
//! bounds compose additively.

use std::fmt;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::ExactError;
use crate::weights::{Family, WeightSequence};

/// Arithmetic needed by the partition-function tables.
pub trait Scalar: Clone + Send + Sync + fmt::Debug + PartialEq + 'static {
    /// Construction context (the working precision for big floats).
    type Ctx: Copy + Send + Sync + fmt::Debug;

    fn zero_with(ctx: Self::Ctx) -> Self;
    fn one_with(ctx: Self::Ctx) -> Self;
    fn from_u64(ctx: Self::Ctx, k: u64) -> Self;
    /// `ω_0 .. ω_{len-1}` and a bound on their relative error.
    fn weights(ctx: Self::Ctx, w: &WeightSequence, len: usize) -> Result<(Vec<Self>, f64), ExactError>;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    /// Unit roundoff of one operation; zero for exact arithmetic.
    fn unit(ctx: Self::Ctx) -> f64;
    fn to_ext(&self) -> Ext;
    fn to_exact(&self, rel_err: f64) -> ExactScalar;
}

/// A probability or weight reported either exactly or with a relative error bound.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactScalar {
    Rational(BigRational),
    Real { digits: String, log10: f64, rel_err: f64 },
}

impl ExactScalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactScalar::Rational(r) => rational_to_f64(r),
            ExactScalar::Real { log10, .. } => 10f64.powf(*log10),
        }
    }

    pub fn rel_err(&self) -> f64 {
        match self {
            ExactScalar::Rational(_) => 0.0,
            ExactScalar::Real { rel_err, .. } => *rel_err,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactScalar::Rational(r) => Some(r),
            ExactScalar::Real { .. } => None,
        }
    }

    /// `"p/q"` for rationals, `{"value": "...", "rel_err": e}` otherwise.
    pub fn to_json(&self) -> Value {
        match self {
            ExactScalar::Rational(_) => json!(self.to_string()),
            ExactScalar::Real { digits, rel_err, .. } => json!({"value": digits, "rel_err": rel_err}),
        }
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Rational(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            ExactScalar::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ExactScalar::Real { digits, .. } => f.write_str(digits),
        }
    }
}

/// `f64` value of a rational whose numerator and denominator may both overflow.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    Ext::from_rational(r).to_f64()
}

/// Scientific notation with `sig` significant digits from a base-10 logarithm.
fn sci_from_log10(log10: f64, sig: usize) -> String {
    if log10 == f64::NEG_INFINITY {
        return "0".into();
    }
    let mut e = log10.floor();
    let mut m = 10f64.powf(log10 - e);
    if m >= 9.999_999_999_999_999 {
        m = 1.0;
        e += 1.0;
    }
    format!("{m:.prec$}e{e}", prec = sig.saturating_sub(1))
}

// ---------------------------------------------------------------------------
// Extended-range double

/// `m · 2^e` with `m ∈ [1, 2)` (or zero): a double with an unbounded exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ext {
    m: f64,
    e: i64,
}

#[inline]
fn pow2(k: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

#[allow(clippy::should_implement_trait)]
impl Ext {
    pub const ZERO: Ext = Ext { m: 0.0, e: 0 };
    pub const ONE: Ext = Ext { m: 1.0, e: 0 };

    #[inline]
    fn norm(m: f64, e: i64) -> Ext {
        if m == 0.0 {
            return Ext::ZERO;
        }
        let bits = m.to_bits();
        let ex = ((bits >> 52) & 0x7ff) as i64;
        debug_assert!(ex != 0 && ex != 0x7ff, "non-normal mantissa {m}");
        Ext { m: f64::from_bits((bits & 0x800f_ffff_ffff_ffff) | (1023u64 << 52)), e: e + ex - 1023 }
    }

    pub fn from_f64(x: f64) -> Ext {
        assert!(x.is_finite() && x >= 0.0, "Ext holds finite non-negative values, got {x}");
        if x == 0.0 {
            Ext::ZERO
        } else if x < f64::MIN_POSITIVE {
            Ext::norm(x * pow2(64), -64)
        } else {
            Ext::norm(x, 0)
        }
    }

    /// `2^x`.
    pub fn exp2(x: f64) -> Ext {
        if x == f64::NEG_INFINITY {
            return Ext::ZERO;
        }
        let e = x.floor();
        Ext::norm(2f64.powf(x - e), e as i64)
    }

    pub fn from_ln(l: f64) -> Ext {
        Ext::exp2(l / std::f64::consts::LN_2)
    }

    pub fn from_bigint(x: &BigInt) -> Ext {
        assert!(!x.is_negative());
        let bits = x.bits();
        if bits <= 1000 {
            return Ext::from_f64(x.to_f64().unwrap());
        }
        let shift = bits - 64;
        let top: BigInt = x >> shift;
        Ext::norm(top.to_f64().unwrap(), shift as i64)
    }

    pub fn from_rational(r: &BigRational) -> Ext {
        Ext::from_bigint(r.numer()).div(Ext::from_bigint(r.denom()))
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.m == 0.0
    }

    #[inline]
    pub fn mul(self, o: Ext) -> Ext {
        if self.m == 0.0 || o.m == 0.0 {
            return Ext::ZERO;
        }
        Ext::norm(self.m * o.m, self.e + o.e)
    }

    #[inline]
    pub fn div(self, o: Ext) -> Ext {
        assert!(o.m != 0.0, "division by zero");
        if self.m == 0.0 {
            return Ext::ZERO;
        }
        Ext::norm(self.m / o.m, self.e - o.e)
    }

    #[inline]
    pub fn add(self, o: Ext) -> Ext {
        if o.m == 0.0 {
            return self;
        }
        if self.m == 0.0 {
            return o;
        }
        let (hi, lo) = if self.e >= o.e { (self, o) } else { (o, self) };
        let d = hi.e - lo.e;
        if d > 60 {
            return hi;
        }
        Ext::norm(hi.m + lo.m * pow2(-d), hi.e)
    }

    /// Base-2 logarithm (`-inf` at zero).
    pub fn log2(self) -> f64 {
        if self.m == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.e as f64 + self.m.log2()
        }
    }

    pub fn ln(self) -> f64 {
        self.log2() * std::f64::consts::LN_2
    }

    pub fn to_f64(self) -> f64 {
        if self.m == 0.0 || self.e < -1100 {
            0.0
        } else if self.e > 1023 {
            f64::INFINITY
        } else if self.e < -1000 {
            self.m * pow2(self.e + 100) * pow2(-100)
        } else {
            self.m * pow2(self.e)
        }
    }

    /// `self / scale` as a double, where `scale ≥ self` is typical; used to turn
    /// a row of weights into relative masses.
    #[inline]
    pub fn ratio_f64(self, scale: Ext) -> f64 {
        if self.m == 0.0 {
            return 0.0;
        }
        let d = self.e - scale.e;
        if d < -1000 {
            return 0.0;
        }
        if d > 1000 {
            return f64::INFINITY;
        }
        (self.m / scale.m) * pow2(d)
    }

    pub fn exponent(self) -> i64 {
        self.e
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        match (self.m == 0.0, o.m == 0.0) {
            (true, true) => Some(Equal),
            (true, false) => Some(Less),
            (false, true) => Some(Greater),
            _ if self.e != o.e => Some(self.e.cmp(&o.e)),
            _ => self.m.partial_cmp(&o.m),
        }
    }
}

/// Relative error of a weight computed as `exp(l)` in double precision.
fn ln_weight_err(l: f64) -> f64 {
    (l.abs() + 4.0) * 2.0 * f64::EPSILON
}

impl Scalar for Ext {
    type Ctx = ();

    fn zero_with(_: ()) -> Self {
        Ext::ZERO
    }

    fn one_with(_: ()) -> Self {
        Ext::ONE
    }

    fn from_u64(_: (), k: u64) -> Self {
        Ext::from_f64(k as f64)
    }

    fn weights(_: (), w: &WeightSequence, len: usize) -> Result<(Vec<Self>, f64), ExactError> {
        let mut err = 0.0f64;
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            if let Some(r) = w.exact_weight(k) {
                out.push(Ext::from_rational(&r));
                err = err.max(4.0 * f64::EPSILON);
            } else {
                let l = w.ln_weight(k);
                out.push(Ext::from_ln(l));
                if l.is_finite() {
                    err = err.max(ln_weight_err(l));
                }
            }
        }
        Ok((out, err))
    }

    fn add(&self, o: &Self) -> Self {
        Ext::add(*self, *o)
    }

    fn mul(&self, o: &Self) -> Self {
        Ext::mul(*self, *o)
    }

    fn div(&self, o: &Self) -> Self {
        Ext::div(*self, *o)
    }

    fn is_zero(&self) -> bool {
        self.m == 0.0
    }

    fn unit(_: ()) -> f64 {
        f64::EPSILON
    }

    fn to_ext(&self) -> Ext {
        *self
    }

    fn to_exact(&self, rel_err: f64) -> ExactScalar {
        let log10 = self.log2() * std::f64::consts::LOG10_2;
        ExactScalar::Real { digits: sci_from_log10(log10, 15), log10, rel_err }
    }
}

// ---------------------------------------------------------------------------
// Exact rationals

impl Scalar for BigRational {
    type Ctx = ();

    fn zero_with(_: ()) -> Self {
        BigRational::zero()
    }

    fn one_with(_: ()) -> Self {
        BigRational::one()
    }

    fn from_u64(_: (), k: u64) -> Self {
        BigRational::from_integer(k.into())
    }

    fn weights(_: (), w: &WeightSequence, len: usize) -> Result<(Vec<Self>, f64), ExactError> {
        let v = (0..len)
            .map(|k| w.exact_weight(k).ok_or_else(|| ExactError::NotRational(w.tag().to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((v, 0.0))
    }

    fn add(&self, o: &Self) -> Self {
        self + o
    }

    fn mul(&self, o: &Self) -> Self {
        self * o
    }

    fn div(&self, o: &Self) -> Self {
        self / o
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn unit(_: ()) -> f64 {
        0.0
    }

    fn to_ext(&self) -> Ext {
        Ext::from_rational(self)
    }

    fn to_exact(&self, _rel_err: f64) -> ExactScalar {
        ExactScalar::Rational(self.clone())
    }
}

// ---------------------------------------------------------------------------
// Big floats

/// A binary big float carried at a fixed working precision (in bits).
#[derive(Clone, Debug, PartialEq)]
pub struct Hp(FBig<HalfEven, 2>);

fn ibig_from_bigint(x: &BigInt) -> IBig {
    IBig::from_str_radix(&x.to_str_radix(16), 16).expect("integer conversion")
}

impl Hp {
    fn from_int(prec: usize, x: &BigInt) -> Hp {
        Hp(FBig::from(ibig_from_bigint(x)).with_precision(prec).value())
    }

    fn from_rational(prec: usize, r: &BigRational) -> Hp {
        let n = Hp::from_int(prec, r.numer());
        let d = Hp::from_int(prec, r.denom());
        Hp(n.0 / d.0)
    }

    fn from_f64(prec: usize, x: f64) -> Hp {
        Hp(FBig::try_from(x).expect("finite weight").with_precision(prec).value())
    }

    pub fn value(&self) -> &FBig<HalfEven, 2> {
        &self.0
    }

    pub fn log2(&self) -> f64 {
        let repr = self.0.repr();
        if repr.significand().is_zero() {
            return f64::NEG_INFINITY;
        }
        let mut sig = repr.significand().clone();
        let mut shift = 0usize;
        loop {
            let f = sig.to_f64().value();
            if f.is_finite() {
                return repr.exponent() as f64 + shift as f64 + f.abs().log2();
            }
            sig >>= 512;
            shift += 512;
        }
    }
}

impl Scalar for Hp {
    type Ctx = usize;

    fn zero_with(prec: usize) -> Self {
        Hp(FBig::ZERO.with_precision(prec).value())
    }

    fn one_with(prec: usize) -> Self {
        Hp(FBig::ONE.with_precision(prec).value())
    }

    fn from_u64(prec: usize, k: u64) -> Self {
        Hp(FBig::from(k).with_precision(prec).value())
    }

    fn weights(prec: usize, w: &WeightSequence, len: usize) -> Result<(Vec<Self>, f64), ExactError> {
        let u = Self::unit(prec);
        let mut err = 0.0f64;
        let mut out = Vec::with_capacity(len);
        // Running ln k! for non-integral factorial exponents.
        let mut ln_fact = Hp::zero_with(prec + 32).0;
        for k in 0..len {
            if k >= 2 {
                ln_fact += Hp::from_u64(prec + 32, k as u64).0.ln();
            }
            let (v, e) = if let Some(r) = w.exact_weight(k) {
                (Hp::from_rational(prec, &r), 2.0 * u)
            } else {
                match *w.family() {
                    Family::PowerLaw { alpha } if k >= 1 => {
                        let lnk = Hp::from_u64(prec + 32, k as u64).0.ln();
                        let a = Hp::from_f64(prec + 32, alpha).0;
                        let v = (-(a * lnk)).exp();
                        (Hp(v.with_precision(prec).value()), 16.0 * u * (1.0 + w.ln_weight(k).abs()))
                    }
                    Family::Factorial { alpha } => {
                        let a = Hp::from_f64(prec + 32, alpha).0;
                        let v = (a * ln_fact.clone()).exp();
                        (Hp(v.with_precision(prec).value()), 16.0 * u * (1.0 + w.ln_weight(k).abs()))
                    }
                    // Decimal table entries: the double is the stored value.
                    _ => (Hp::from_f64(prec, w.weight(k)), f64::EPSILON),
                }
            };
            err = err.max(e);
            out.push(v);
        }
        Ok((out, err))
    }

    fn add(&self, o: &Self) -> Self {
        Hp(&self.0 + &o.0)
    }

    fn mul(&self, o: &Self) -> Self {
        Hp(&self.0 * &o.0)
    }

    fn div(&self, o: &Self) -> Self {
        Hp(&self.0 / &o.0)
    }

    fn is_zero(&self) -> bool {
        self.0.repr().significand().is_zero()
    }

    fn unit(prec: usize) -> f64 {
        2f64.powi(1 - prec as i32)
    }

    fn to_ext(&self) -> Ext {
        Ext::exp2(self.log2())
    }

    fn to_exact(&self, rel_err: f64) -> ExactScalar {
        let log10 = self.log2() * std::f64::consts::LOG10_2;
        // Digits beyond the error bound carry no information.
        let sig = if rel_err > 0.0 { ((-rel_err.log10()).floor() as usize).clamp(1, 40) } else { 40 };
        let digits =
            if log10.is_finite() { hp_digits(&self.0, sig).unwrap_or_else(|| sci_from_log10(log10, sig.min(15))) } else { "0".into() };
        ExactScalar::Real { digits, log10, rel_err }
    }
}

/// Decimal scientific notation straight from the big float, when it fits.
fn hp_digits(x: &FBig<HalfEven, 2>, sig: usize) -> Option<String> {
    let dec = x.to_decimal().value();
    let dec = dec.with_precision(sig).value();
    let (s, e) = dec.into_repr().into_parts();
    let mut digits = s.to_string();
    if digits.starts_with('-') {
        return None;
    }
    let exp10 = e + digits.len() as isize - 1;
    while digits.len() > 1 && digits.ends_with('0') {
        digits.pop();
    }
    let (head, tail) = digits.split_at(1);
    Some(if tail.is_empty() { format!("{head}e{exp10}") } else { format!("{head}.{tail}e{exp10}") })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_arithmetic() {
        let a = Ext::from_f64(3.0);
        let b = Ext::from_f64(0.25);
        assert_eq!(a.mul(b).to_f64(), 0.75);
        assert_eq!(a.add(b).to_f64(), 3.25);
        assert_eq!(a.div(b).to_f64(), 12.0);
        assert_eq!(Ext::ZERO.add(b), b);
        assert!(Ext::ZERO < b && b < a);
        // Far beyond the double range.
        let big = Ext::from_ln(5000.0);
        assert!((big.ln() - 5000.0).abs() < 1e-9);
        assert_eq!(big.to_f64(), f64::INFINITY);
        assert!((big.div(Ext::from_ln(4999.0)).to_f64() - std::f64::consts::E).abs() < 1e-9);
        assert_eq!(Ext::from_f64(5e-320).to_f64(), 5e-320);
    }

    #[test]
    fn ext_from_huge_rational() {
        let f: BigInt = (1..=500u32).fold(BigInt::one(), |a, k| a * k);
        let e = Ext::from_bigint(&f);
        let ln500 = (1..=500).map(|k| (k as f64).ln()).sum::<f64>();
        assert!((e.ln() - ln500).abs() < 1e-10);
    }

    #[test]
    fn hp_matches_rational_and_formats() {
        let r = BigRational::new(1.into(), 3.into());
        let h = Hp::from_rational(128, &r);
        let back = h.to_exact(1e-30);
        match back {
            ExactScalar::Real { digits, .. } => assert!(digits.starts_with("3.333333333333333333333333333"), "{digits}"),
            _ => panic!(),
        }
        assert!((h.log2() - (1.0f64 / 3.0).log2()).abs() < 1e-14);
        let big = Hp::from_int(128, &(BigInt::from(10).pow(400u32) * 7));
        assert!((big.log2() * std::f64::consts::LOG10_2 - (400.0 + 7f64.log10())).abs() < 1e-12);
        assert_eq!(big.to_exact(1e-20).to_string(), "7e400");
    }

    #[test]
    fn exact_scalar_display() {
        assert_eq!(ExactScalar::Rational(BigRational::new(1.into(), 2.into())).to_string(), "1/2");
        assert_eq!(ExactScalar::Rational(BigRational::from_integer(5.into())).to_string(), "5");
        assert_eq!(sci_from_log10(0.0, 3), "1.00e0");
    }
}
