//! Exact scalar arithmetic: arbitrary-precision rationals and the extended
//! real line. Every coordinate, mass and probability in this crate is a
//! [`Rational`]; no floating point is used anywhere in the exact core.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

/// An exact signed rational, always in canonical form (positive
/// denominator, gcd(|num|, den) = 1). Canonicalization is maintained by
/// the underlying big-rational representation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseNumberError {
    #[error("empty number literal")]
    Empty,
    #[error("unexpected character {found:?} at position {position}")]
    UnexpectedChar { position: usize, found: char },
    #[error("missing digits at position {position}")]
    MissingDigits { position: usize },
    #[error("zero denominator")]
    ZeroDenominator,
}

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer<T: Into<BigInt>>(n: T) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// `numerator / denominator`; panics if `denominator` is zero.
    pub fn new<N: Into<BigInt>, D: Into<BigInt>>(numerator: N, denominator: D) -> Self {
        Rational(BigRational::new(numerator.into(), denominator.into()))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Parses a decimal literal `[+-]?digits[.digits][(e|E)[+-]?digits]`
    /// into the exactly equal rational.
    pub fn parse_decimal(text: &str) -> Result<Self, ParseNumberError> {
        let bytes = text.as_bytes();
        if bytes.is_empty() {
            return Err(ParseNumberError::Empty);
        }
        let mut pos = 0;
        let mut negative = false;
        match bytes[0] {
            b'+' => pos = 1,
            b'-' => {
                negative = true;
                pos = 1;
            }
            _ => {}
        }

        let int_start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == int_start {
            return match text[pos..].chars().next() {
                Some(c) => Err(ParseNumberError::UnexpectedChar {
                    position: pos,
                    found: c,
                }),
                None => Err(ParseNumberError::MissingDigits { position: pos }),
            };
        }
        let mut mantissa = BigInt::parse_bytes(&bytes[int_start..pos], 10).unwrap();
        let mut frac_digits: u32 = 0;

        if pos < bytes.len() && bytes[pos] == b'.' {
            pos += 1;
            let frac_start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos == frac_start {
                return Err(ParseNumberError::MissingDigits { position: pos });
            }
            frac_digits = (pos - frac_start) as u32;
            let frac = BigInt::parse_bytes(&bytes[frac_start..pos], 10).unwrap();
            mantissa = mantissa * BigInt::from(10u32).pow(frac_digits) + frac;
        }

        let mut exponent: i64 = 0;
        if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
            pos += 1;
            let mut exp_negative = false;
            if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
                exp_negative = bytes[pos] == b'-';
                pos += 1;
            }
            let exp_start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos == exp_start {
                return Err(ParseNumberError::MissingDigits { position: pos });
            }
            let magnitude: i64 = text[exp_start..pos].parse().map_err(|_| {
                ParseNumberError::MissingDigits { position: exp_start }
            })?;
            exponent = if exp_negative { -magnitude } else { magnitude };
        }

        if pos != bytes.len() {
            let found = text[pos..].chars().next().unwrap();
            return Err(ParseNumberError::UnexpectedChar {
                position: pos,
                found,
            });
        }

        if negative {
            mantissa = -mantissa;
        }
        let net_exp = exponent - i64::from(frac_digits);
        let result = if net_exp >= 0 {
            BigRational::from_integer(mantissa * BigInt::from(10u32).pow(net_exp as u32))
        } else {
            BigRational::new(mantissa, BigInt::from(10u32).pow((-net_exp) as u32))
        };
        Ok(Rational(result))
    }

    /// Parses either a slash rational (`"3/7"`, `"-1/2"`) or a decimal
    /// literal. Both forms are exact.
    pub fn parse(text: &str) -> Result<Self, ParseNumberError> {
        if let Some(slash) = text.find('/') {
            let numer = Self::parse_integer(&text[..slash])?;
            let denom = Self::parse_integer(&text[slash + 1..]).map_err(|e| match e {
                ParseNumberError::UnexpectedChar { position, found } => {
                    ParseNumberError::UnexpectedChar {
                        position: position + slash + 1,
                        found,
                    }
                }
                other => other,
            })?;
            if denom.is_zero() {
                return Err(ParseNumberError::ZeroDenominator);
            }
            Ok(Rational(BigRational::new(numer, denom)))
        } else {
            Self::parse_decimal(text)
        }
    }

    fn parse_integer(text: &str) -> Result<BigInt, ParseNumberError> {
        let r = Self::parse_decimal(text)?;
        if !r.is_integer() {
            return Err(ParseNumberError::UnexpectedChar {
                position: text.find('.').unwrap_or(0),
                found: '.',
            });
        }
        Ok(r.numerator().clone())
    }

    /// Exact decimal rendering when the denominator is of the form
    /// 2^a 5^b, otherwise a 12-significant-digit approximation prefixed
    /// with `~`.
    pub fn to_decimal_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut den = self.denominator().clone();
        let mut twos = 0u32;
        let mut fives = 0u32;
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        while (&den % &two).is_zero() {
            den /= &two;
            twos += 1;
        }
        while (&den % &five).is_zero() {
            den /= &five;
            fives += 1;
        }
        if den.is_one() {
            let shift = twos.max(fives);
            let scaled = self.numerator() * BigInt::from(10u32).pow(shift)
                / self.denominator();
            format_scaled(&scaled, shift)
        } else {
            // round to 12 significant digits
            const SIG: u32 = 12;
            let mag = decimal_magnitude(self);
            let shift = SIG as i64 - 1 - mag;
            let scaled = round_shifted(self, shift);
            format!("~{}", format_scaled_signed(&scaled, shift))
        }
    }
}

/// floor(log10(|x|)) for nonzero x, by digit counting.
pub(crate) fn decimal_magnitude(x: &Rational) -> i64 {
    debug_assert!(!x.is_zero());
    let num_digits = x.numerator().abs().to_string().len() as i64;
    let den_digits = x.denominator().to_string().len() as i64;
    let mut guess = num_digits - den_digits;
    let abs = x.abs();
    // |x| in [10^guess, 10^(guess+1)) after adjustment
    while abs < pow_ten(guess) {
        guess -= 1;
    }
    while abs >= pow_ten(guess + 1) {
        guess += 1;
    }
    guess
}

pub(crate) fn pow_ten(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::from(10u32).pow(e as u32))
    } else {
        Rational::new(1, BigInt::from(10u32).pow((-e) as u32))
    }
}

/// round(x * 10^shift) to nearest, ties away from zero.
pub(crate) fn round_shifted(x: &Rational, shift: i64) -> BigInt {
    let scaled = &x.0 * pow_ten(shift).0;
    let n = scaled.numer().clone();
    let d = scaled.denom().clone();
    if n.is_negative() {
        -round_ratio(-n, d)
    } else {
        round_ratio(n, d)
    }
}

/// round(n/d) for n >= 0, d > 0, ties away from zero.
fn round_ratio(n: BigInt, d: BigInt) -> BigInt {
    (n * BigInt::from(2) + &d) / (d * BigInt::from(2))
}

fn format_scaled_signed(scaled: &BigInt, shift: i64) -> String {
    if shift <= 0 {
        let value = scaled * BigInt::from(10u32).pow((-shift) as u32);
        value.to_string()
    } else {
        format_scaled(scaled, shift as u32)
    }
}

/// Renders `scaled / 10^shift` as a plain decimal string.
fn format_scaled(scaled: &BigInt, shift: u32) -> String {
    let negative = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let shift = shift as usize;
    let mut s = if digits.len() <= shift {
        format!("0.{}{}", "0".repeat(shift - digits.len()), digits)
    } else if shift == 0 {
        digits
    } else {
        format!(
            "{}.{}",
            &digits[..digits.len() - shift],
            &digits[digits.len() - shift..]
        )
    };
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if negative && s != "0" {
        format!("-{s}")
    } else {
        s
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = ParseNumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rational::parse(s)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// The extended real line: the return type of quantile operations, where
/// the endpoints p = 0 and p = 1 force infinite values.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ExtendedReal {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

impl ExtendedReal {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedReal::Finite(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn neg(&self) -> ExtendedReal {
        match self {
            ExtendedReal::NegInfinity => ExtendedReal::PosInfinity,
            ExtendedReal::PosInfinity => ExtendedReal::NegInfinity,
            ExtendedReal::Finite(q) => ExtendedReal::Finite(-q),
        }
    }
}

impl From<Rational> for ExtendedReal {
    fn from(q: Rational) -> Self {
        ExtendedReal::Finite(q)
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtendedReal::*;
        match (self, other) {
            (NegInfinity, NegInfinity) | (PosInfinity, PosInfinity) => Ordering::Equal,
            (NegInfinity, _) | (_, PosInfinity) => Ordering::Less,
            (_, NegInfinity) | (PosInfinity, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

/// Total-order comparison; exact, no epsilon.
pub fn compare(a: &ExtendedReal, b: &ExtendedReal) -> Ordering {
    a.cmp(b)
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInfinity => write!(f, "-inf"),
            ExtendedReal::PosInfinity => write!(f, "+inf"),
            ExtendedReal::Finite(q) => write!(f, "{q}"),
        }
    }
}
