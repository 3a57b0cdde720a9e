//! Scalar domains: exact rationals with arbitrary-precision integers, and
//! binary64 floats, behind one arithmetic interface so the tensor and matrix
//! code is domain-generic.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar from {0:?}")]
    Parse(String),
}

/// Which scalar realization a value (or tensor) lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Rational,
    Float64,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Rational => "rational",
            Domain::Float64 => "float64",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Domain {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, ScalarError> {
        match s {
            "rational" => Ok(Domain::Rational),
            "float64" => Ok(Domain::Float64),
            other => Err(ScalarError::Parse(other.to_string())),
        }
    }
}

/// A scalar domain together with the absolute tolerance its zero tests use.
///
/// The exact domain always has tolerance 0. The float64 tolerance is used
/// only by zero/equality tests (condition checks); everywhere else floats
/// compare exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarDomain {
    pub kind: Domain,
    pub zero_tolerance: f64,
}

pub const FLOAT64_ZERO_TOLERANCE: f64 = 1e-12;

impl ScalarDomain {
    pub fn rational() -> Self {
        ScalarDomain { kind: Domain::Rational, zero_tolerance: 0.0 }
    }

    pub fn float64() -> Self {
        ScalarDomain { kind: Domain::Float64, zero_tolerance: FLOAT64_ZERO_TOLERANCE }
    }

    pub fn of(kind: Domain) -> Self {
        match kind {
            Domain::Rational => Self::rational(),
            Domain::Float64 => Self::float64(),
        }
    }
}

/// Field arithmetic shared by both scalar realizations.
///
/// Values are immutable; every operation returns a fresh scalar.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    const DOMAIN: Domain;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Result<Self, ScalarError>;
    fn neg(&self) -> Self;

    /// Structural zero test (exact in both domains).
    fn is_zero(&self) -> bool;

    /// Magnitude used for pivot selection and tolerance scaling.
    fn abs_f64(&self) -> f64;

    /// Nearest binary float. Deterministic rounding; overflow saturates to
    /// plus/minus infinity.
    fn to_f64(&self) -> f64;

    fn parse(text: &str) -> Result<Self, ScalarError>;

    /// Canonical textual form, re-parseable by `parse`.
    fn render(&self) -> String {
        format!("{self}")
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num)
            .div(&Self::from_i64(den))
            .expect("nonzero denominator")
    }
}

/// Exact rational: arbitrary-precision numerator and positive denominator,
/// always in canonical reduced form (zero is 0/1).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self, ScalarError> {
        if denom.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(BigInt::from(num), BigInt::from(den)).expect("nonzero denominator")
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Exact conversion of a finite float (every finite f64 is a dyadic rational).
    pub fn from_f64_exact(v: f64) -> Result<Self, ScalarError> {
        BigRational::from_float(v)
            .map(Rational)
            .ok_or_else(|| ScalarError::Parse(format!("{v}")))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Scalar for Rational {
    const DOMAIN: Domain = Domain::Rational;

    fn zero() -> Self {
        Rational(BigRational::zero())
    }

    fn one() -> Self {
        Rational(BigRational::one())
    }

    fn from_i64(n: i64) -> Self {
        Self::from_integer(n)
    }

    fn add(&self, rhs: &Self) -> Self {
        Rational(&self.0 + &rhs.0)
    }

    fn sub(&self, rhs: &Self) -> Self {
        Rational(&self.0 - &rhs.0)
    }

    fn mul(&self, rhs: &Self) -> Self {
        Rational(&self.0 * &rhs.0)
    }

    fn div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        if rhs.0.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    fn neg(&self) -> Self {
        Rational(-&self.0)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }

    fn to_f64(&self) -> f64 {
        big_ratio_to_f64(self.0.numer(), self.0.denom())
    }

    fn parse(text: &str) -> Result<Self, ScalarError> {
        parse_rational(text)
    }
}

fn parse_rational(text: &str) -> Result<Rational, ScalarError> {
    let trimmed = text.trim();
    // accept the typographic minus used in display contexts
    let normalized = trimmed.replace('\u{2212}', "-");
    let err = || ScalarError::Parse(text.to_string());
    if let Some((num, den)) = normalized.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(n, d)))
    } else {
        let n = BigInt::from_str(&normalized).map_err(|_| err())?;
        Ok(Rational(BigRational::from_integer(n)))
    }
}

/// Round num/den to the nearest f64, ties to even. Saturates to infinity on
/// overflow; underflows below the subnormal range round to zero.
fn big_ratio_to_f64(numer: &BigInt, denom: &BigInt) -> f64 {
    if numer.is_zero() {
        return 0.0;
    }
    let negative = numer.sign() == Sign::Minus;
    let n = numer.abs();
    let d = denom.clone();

    // Scale so that the integer quotient q = floor(n*2^shift / d) has exactly
    // 54 bits, giving a 53-bit mantissa plus one rounding bit.
    let mut shift: i64 = 54 - (n.bits() as i64 - d.bits() as i64);
    let (mut q, mut r) = scaled_divmod(&n, &d, shift);
    while q.bits() > 54 {
        shift -= 1;
        let qr = scaled_divmod(&n, &d, shift);
        q = qr.0;
        r = qr.1;
    }
    while q.bits() < 54 {
        shift += 1;
        let qr = scaled_divmod(&n, &d, shift);
        q = qr.0;
        r = qr.1;
    }

    // Round half to even on the trailing bit, using the remainder to detect
    // exact halves.
    let mut mant = q.to_u64().expect("54-bit quotient");
    let half_bit = mant & 1;
    mant >>= 1;
    if half_bit == 1 && (!r.is_zero() || mant & 1 == 1) {
        mant += 1;
    }
    let mut exp = -(shift - 1);
    if mant == 1 << 53 {
        mant >>= 1;
        exp += 1;
    }

    let magnitude = compose_f64(mant, exp);
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

/// floor and remainder of n * 2^shift / d (shift may be negative).
fn scaled_divmod(n: &BigInt, d: &BigInt, shift: i64) -> (BigInt, BigInt) {
    use num_integer::Integer;
    if shift >= 0 {
        (n << shift as usize).div_rem(d)
    } else {
        n.div_rem(&(d << (-shift) as usize))
    }
}

fn compose_f64(mant: u64, exp: i64) -> f64 {
    // mant has 53 bits; value = mant * 2^exp
    if exp > 1024 - 53 {
        return f64::INFINITY;
    }
    let m = mant as f64;
    if exp >= -1022 - 53 {
        // split the scaling to stay in range for powi
        let half = exp / 2;
        m * (2f64).powi(half as i32) * (2f64).powi((exp - half) as i32)
    } else {
        0.0
    }
}

impl Scalar for f64 {
    const DOMAIN: Domain = Domain::Float64;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        if *rhs == 0.0 {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self / rhs)
    }

    fn neg(&self) -> Self {
        -self
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn abs_f64(&self) -> f64 {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse(text: &str) -> Result<Self, ScalarError> {
        let normalized = text.trim().replace('\u{2212}', "-");
        // tolerate rational notation in float inputs
        if let Some((num, den)) = normalized.split_once('/') {
            let n: f64 = num.trim().parse().map_err(|_| ScalarError::Parse(text.to_string()))?;
            let d: f64 = den.trim().parse().map_err(|_| ScalarError::Parse(text.to_string()))?;
            if d == 0.0 {
                return Err(ScalarError::DivisionByZero);
            }
            return Ok(n / d);
        }
        normalized.parse().map_err(|_| ScalarError::Parse(text.to_string()))
    }
}
