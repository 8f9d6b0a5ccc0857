//! Arbitrary-precision reals and exactly-specified arguments.
//!
//! [`BigReal`] is an MPFR float. [`Argument`] keeps an input `x` in the
//! symbolic form `e^q * prod b_i^q_i` with exact rationals, so `ln x` can be
//! produced at any precision and values such as `e` or `(2e)^2` carry no
//! decimal parsing error.

use std::fmt;

use rug::float::{Round, Special};
use rug::ops::Pow;
use rug::{Assign, Float, Integer, Rational};

use crate::error::{Error, Result};

pub type BigReal = Float;

/// Extra bits carried by internal arithmetic on top of the caller's precision.
pub const GUARD_BITS: u32 = 32;

/// Smallest precision accepted by the public entry points.
pub const MIN_PRECISION: u32 = 64;

pub fn float(prec: u32, value: impl Into<f64>) -> Float {
    Float::with_val(prec, value.into())
}

pub fn from_rational(prec: u32, q: &Rational) -> Float {
    Float::with_val(prec, q)
}

/// `2^exp` at the given precision.
pub fn pow2(prec: u32, exp: i32) -> Float {
    Float::with_val(prec, 1) << exp
}

pub fn euler_e(prec: u32) -> Float {
    Float::with_val(prec, 1).exp()
}

/// Exact rational value of a finite float.
pub fn to_rational(x: &Float) -> Option<Rational> {
    x.to_rational()
}

/// Parses a plain decimal such as `12`, `-0.05`, `1.1e-3` exactly.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from(Integer::from_str_radix(if digits.is_empty() { "0" } else { &digits }, 10).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Integer::from(Integer::u_pow_u(10, scale.unsigned_abs()));
    if scale >= 0 {
        value *= ten;
    } else {
        value /= ten;
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// A positive real argument `x = e^q * prod b_i^q_i` (or exactly zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Argument {
    e_exponent: Rational,
    factors: Vec<(Rational, Rational)>,
    zero: bool,
}

impl Argument {
    pub fn zero() -> Self {
        Argument {
            e_exponent: Rational::new(),
            factors: Vec::new(),
            zero: true,
        }
    }

    pub fn one() -> Self {
        Argument {
            e_exponent: Rational::new(),
            factors: Vec::new(),
            zero: false,
        }
    }

    /// Euler's number.
    pub fn e() -> Self {
        Self::e_pow(Rational::from(1))
    }

    pub fn e_pow(q: Rational) -> Self {
        Argument {
            e_exponent: q,
            ..Self::one()
        }
    }

    pub fn rational(q: Rational) -> Result<Self> {
        if q < 0 {
            return Err(Error::Domain(format!("argument {q} is negative")));
        }
        if q == 0 {
            return Ok(Self::zero());
        }
        Ok(Argument {
            factors: vec![(q, Rational::from(1))],
            ..Self::one()
        }
        .normalized())
    }

    pub fn from_float(x: &Float) -> Result<Self> {
        let q = to_rational(x).ok_or_else(|| Error::Domain(format!("argument {x} is not finite")))?;
        Self::rational(q)
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        Self::from_float(&Float::with_val(53, x))
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// True when the argument is exactly `e`.
    pub fn is_e(&self) -> bool {
        !self.zero && self.factors.is_empty() && self.e_exponent == 1
    }

    pub fn mul(&self, rhs: &Argument) -> Argument {
        if self.zero || rhs.zero {
            return Self::zero();
        }
        let mut factors = self.factors.clone();
        factors.extend(rhs.factors.iter().cloned());
        Argument {
            e_exponent: Rational::from(&self.e_exponent + &rhs.e_exponent),
            factors,
            zero: false,
        }
        .normalized()
    }

    pub fn pow(&self, q: &Rational) -> Result<Argument> {
        if self.zero {
            return if *q > 0 {
                Ok(Self::zero())
            } else {
                Err(Error::Domain("zero raised to a nonpositive power".into()))
            };
        }
        Ok(Argument {
            e_exponent: Rational::from(&self.e_exponent * q),
            factors: self
                .factors
                .iter()
                .map(|(b, p)| (b.clone(), Rational::from(p * q)))
                .collect(),
            zero: false,
        }
        .normalized())
    }

    /// `x^(1/alpha) / alpha`, the argument of `W` that yields `Phi_alpha(x)`.
    pub fn reduce_for_alpha(&self, alpha: &Rational) -> Result<Argument> {
        if *alpha <= 0 {
            return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
        }
        let root = self.pow(&Rational::from(alpha.recip_ref()))?;
        Ok(root.mul(&Argument::rational(alpha.clone())?.pow(&Rational::from(-1))?))
    }

    /// `ln x` at `prec` bits; `-inf` for zero.
    pub fn ln(&self, prec: u32) -> Float {
        if self.zero {
            return Float::with_val(prec, Special::NegInfinity);
        }
        let work = prec + 16;
        let mut acc = Float::with_val(work, &self.e_exponent);
        for (base, power) in &self.factors {
            let l = Float::with_val(work, base).ln();
            acc += l * Float::with_val(work, power);
        }
        Float::with_val(prec, &acc)
    }

    /// `x` at `prec` bits, exact-then-rounded when `x` is rational.
    pub fn value(&self, prec: u32) -> Float {
        if self.zero {
            return Float::with_val(prec, 0);
        }
        if let Some(q) = self.as_rational() {
            return Float::with_val(prec, &q);
        }
        Float::with_val(prec, self.ln(prec + 16).exp())
    }

    fn as_rational(&self) -> Option<Rational> {
        if self.e_exponent != 0 {
            return None;
        }
        let mut acc = Rational::from(1);
        for (base, power) in &self.factors {
            if *power.denom() != 1 {
                return None;
            }
            let exp = power.numer().to_i32()?;
            if exp.unsigned_abs() > 4096 {
                return None;
            }
            acc *= Rational::from(base.pow(exp));
        }
        Some(acc)
    }

    fn normalized(mut self) -> Self {
        let mut merged: Vec<(Rational, Rational)> = Vec::new();
        for (base, power) in self.factors.drain(..) {
            if base == 1 || power == 0 {
                continue;
            }
            match merged.iter_mut().find(|(b, _)| *b == base) {
                Some((_, p)) => *p += power,
                None => merged.push((base, power)),
            }
        }
        merged.retain(|(_, p)| *p != 0);
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        self.factors = merged;
        self
    }

    /// Parses `e`, decimals, products, quotients and powers, e.g.
    /// `(2*e)^2`, `1.1*(3*e)^3`, `e^(1/3)`, `10^40`, `1e10`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let value = p.expr()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.error("trailing input"));
        }
        Ok(value)
    }
}

impl fmt::Display for Argument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        for (base, power) in &self.factors {
            if *power == 1 {
                parts.push(base.to_string());
            } else {
                parts.push(format!("({base})^({power})"));
            }
        }
        if self.e_exponent == 1 {
            parts.push("e".into());
        } else if self.e_exponent != 0 {
            parts.push(format!("e^({})", self.e_exponent));
        }
        if parts.is_empty() {
            return f.write_str("1");
        }
        f.write_str(&parts.join("*"))
    }
}

impl std::str::FromStr for Argument {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Argument::parse(s)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, reason: &str) -> Error {
        Error::Parse {
            input: self.src.to_string(),
            reason: format!("{reason} at offset {}", self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Argument> {
        let mut acc = self.term()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.term()?);
            } else if self.eat('/') {
                let rhs = self.term()?;
                if rhs.is_zero() {
                    return Err(self.error("division by zero"));
                }
                acc = acc.mul(&rhs.pow(&Rational::from(-1))?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Argument> {
        let base = self.atom()?;
        if self.eat('^') {
            let power = self.exponent()?;
            return base.pow(&power).map_err(|_| self.error("invalid power of zero"));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Argument> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some('e') => {
                self.pos += 1;
                Ok(Argument::e())
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let q = self.number()?;
                Argument::rational(q)
            }
            _ => Err(self.error("expected a number, 'e' or '('")),
        }
    }

    fn exponent(&mut self) -> Result<Rational> {
        if self.eat('(') {
            let negative = self.eat('-');
            let mut q = self.number()?;
            if self.eat('/') {
                let d = self.number()?;
                if d == 0 {
                    return Err(self.error("zero denominator"));
                }
                q /= d;
            }
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(if negative { -q } else { q });
        }
        let negative = self.eat('-');
        let q = self.number()?;
        Ok(if negative { -q } else { q })
    }

    fn number(&mut self) -> Result<Rational> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let bytes = rest.as_bytes();
        let mut end = 0;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        // A decimal exponent needs a digit (after an optional sign), so `2*e`
        // and `(3*e)` keep `e` as the constant.
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = &rest[..end];
        let q = parse_decimal(text).ok_or_else(|| self.error("malformed number"))?;
        self.pos += end;
        Ok(q)
    }
}

/// Decimal rendering with `digits` significant digits: positional for
/// moderate magnitudes, scientific otherwise.
pub fn render(x: &Float, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() {
            "-inf".into()
        } else {
            "inf".into()
        };
    }
    if x.is_zero() {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = x.to_string_radix_round(10, Some(digits), Round::Nearest);
    let (mantissa, e_exp) = match sci.find('e') {
        Some(i) => (&sci[..i], sci[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (sci.as_str(), 0),
    };
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let (int_digits, frac_digits) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let mut exp = int_digits.len() as i64 - 1 + e_exp;
    let mut all: String = format!("{int_digits}{frac_digits}");
    while all.len() > 1 && all.starts_with('0') {
        all.remove(0);
        exp -= 1;
    }
    while all.len() > 1 && all.ends_with('0') {
        all.pop();
    }
    if !(-5..=20).contains(&exp) {
        let (head, tail) = all.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        };
    }
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), all)
    } else if point as usize >= all.len() {
        format!("{}{}", all, "0".repeat(point as usize - all.len()))
    } else {
        let (a, b) = all.split_at(point as usize);
        format!("{a}.{b}")
    };
    format!("{sign}{body}")
}

/// Parses a rendered decimal back into a float of the given precision.
pub fn parse_float(s: &str, prec: u32) -> Result<Float> {
    match s {
        "nan" => return Ok(Float::with_val(prec, Special::Nan)),
        "inf" => return Ok(Float::with_val(prec, Special::Infinity)),
        "-inf" => return Ok(Float::with_val(prec, Special::NegInfinity)),
        _ => {}
    }
    let parsed = Float::parse(s).map_err(|e| Error::Parse {
        input: s.to_string(),
        reason: e.to_string(),
    })?;
    let mut out = Float::new(prec);
    out.assign(parsed);
    Ok(out)
}

/// `x^n` for a small nonnegative integer power.
pub fn powu(x: &Float, n: u32) -> Float {
    Float::with_val(x.prec(), x.pow(n))
}
