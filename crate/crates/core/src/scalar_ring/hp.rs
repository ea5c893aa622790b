use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use super::{Field, Ring, ScalarError};

/// Smallest precision accepted anywhere in the crate.
pub const MIN_PRECISION: u32 = 64;
pub const DEFAULT_PRECISION: u32 = 256;

/// Complex number with an MPFR-backed real and imaginary part.
///
/// Both parts always carry the same precision. Binary operations work at the
/// larger precision of the two operands.
#[derive(Clone, PartialEq)]
pub struct HPComplex {
    re: Float,
    im: Float,
}

impl HPComplex {
    pub fn zero(prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        HPComplex { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(1.0, prec)
    }

    pub fn from_f64(re: f64, prec: u32) -> Self {
        Self::from_parts(re, 0.0, prec)
    }

    pub fn from_parts(re: f64, im: f64, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        HPComplex { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn from_floats(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec()).max(MIN_PRECISION);
        let mut re = re;
        let mut im = im;
        re.set_prec(prec);
        im.set_prec(prec);
        HPComplex { re, im }
    }

    pub fn from_integer(v: &Integer, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        HPComplex { re: Float::with_val(prec, v), im: Float::new(prec) }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        HPComplex { re: Float::with_val(prec, v), im: Float::new(prec) }
    }

    /// r·e^{iθ} with θ in radians.
    pub fn from_polar(r: &Float, theta: &Float) -> Self {
        let prec = r.prec().max(theta.prec());
        let (s, c) = Float::with_val(prec, theta).sin_cos(Float::new(prec));
        HPComplex::from_floats(Float::with_val(prec, r * &c), Float::with_val(prec, r * &s))
    }

    /// e^{2πi·frac}.
    pub fn unit(frac: &Float) -> Self {
        let prec = frac.prec();
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        let theta = Float::with_val(prec, &two_pi * frac);
        HPComplex::from_polar(&Float::with_val(prec, 1), &theta)
    }

    pub fn i(prec: u32) -> Self {
        Self::from_parts(0.0, 1.0, prec)
    }

    /// Parses `a`, `a+bi`, `a-bi`, `bi` or `(a,b)` into a complex number.
    pub fn parse(s: &str, prec: u32) -> Result<Self, ScalarError> {
        let prec = prec.max(MIN_PRECISION);
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || ScalarError::Parse(format!("not a complex number: {s}"));
        let real = |t: &str| -> Result<Float, ScalarError> {
            let parsed = Float::parse(t).map_err(|_| bad())?;
            Ok(Float::with_val(prec, parsed))
        };
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            return Ok(HPComplex { re: real(a)?, im: real(b)? });
        }
        if let Some(body) = s.strip_suffix('i') {
            // find the sign separating real and imaginary parts, skipping exponents
            let bytes = body.as_bytes();
            let mut split = None;
            for idx in (1..bytes.len()).rev() {
                let ch = bytes[idx] as char;
                if (ch == '+' || ch == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                    split = Some(idx);
                    break;
                }
            }
            let imag_text = |t: &str| -> Result<Float, ScalarError> {
                match t {
                    "" | "+" => Ok(Float::with_val(prec, 1)),
                    "-" => Ok(Float::with_val(prec, -1)),
                    _ => real(t),
                }
            };
            return match split {
                Some(idx) => Ok(HPComplex { re: real(&body[..idx])?, im: imag_text(&body[idx..])? }),
                None => Ok(HPComplex { re: Float::new(prec), im: imag_text(body)? }),
            };
        }
        Ok(HPComplex { re: real(&s)?, im: Float::new(prec) })
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        HPComplex { re: Float::with_val(prec, &self.re), im: Float::with_val(prec, &self.im) }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero_exact(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn norm_sqr(&self) -> Float {
        self.norm_sqr_at(self.prec())
    }

    fn norm_sqr_at(&self, p: u32) -> Float {
        let mut n = Float::with_val(p, self.re.square_ref());
        n += Float::with_val(p, self.im.square_ref());
        n
    }

    pub fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.clone().hypot(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn arg(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.im.clone().atan2(&self.re))
    }

    pub fn conj(&self) -> Self {
        HPComplex { re: self.re.clone(), im: Float::with_val(self.prec(), -&self.im) }
    }

    pub fn scale(&self, f: &Float) -> Self {
        let p = self.prec().max(f.prec());
        HPComplex { re: Float::with_val(p, &self.re * f), im: Float::with_val(p, &self.im * f) }
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        let p = self.prec();
        HPComplex { re: Float::with_val(p, &self.re * k), im: Float::with_val(p, &self.im * k) }
    }

    pub fn div_i64(&self, k: i64) -> Self {
        let p = self.prec();
        HPComplex { re: Float::with_val(p, &self.re / k), im: Float::with_val(p, &self.im / k) }
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let n = self.norm_sqr();
        HPComplex {
            re: Float::with_val(p, &self.re / &n),
            im: Float::with_val(p, -(Float::with_val(p, &self.im / &n))),
        }
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        HPComplex { re: Float::with_val(p, &m * &c), im: Float::with_val(p, &m * &s) }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        HPComplex { re: Float::with_val(p, self.abs().ln()), im: self.arg() }
    }

    pub fn powi(&self, e: i64) -> Self {
        if e < 0 {
            return self.powi(-e).recip();
        }
        let mut base = self.clone();
        let mut acc = HPComplex::one(self.prec());
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Principal branch z^w = exp(w log z).
    pub fn powc(&self, w: &HPComplex) -> Self {
        (&self.ln() * w).exp()
    }

    /// Principal n-th root.
    pub fn root(&self, n: u32) -> Self {
        if self.is_zero_exact() {
            return self.clone();
        }
        let p = self.prec();
        let r = Float::with_val(p, self.abs().pow(Float::with_val(p, 1) / n));
        let a = Float::with_val(p, self.arg() / n);
        HPComplex::from_polar(&r, &a)
    }

    pub fn sqrt(&self) -> Self {
        self.root(2)
    }

    /// Decimal rendering with `digits` significant digits per part.
    pub fn to_string_digits(&self, digits: usize) -> String {
        let re = self.re.to_string_radix(10, Some(digits));
        let im_abs = Float::with_val(self.prec(), self.im.abs_ref());
        let im = im_abs.to_string_radix(10, Some(digits));
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        format!("{re}{sign}{im}i")
    }

    /// Decimal digits justified by the working precision.
    pub fn decimal_digits(&self) -> usize {
        (self.prec() as f64 * std::f64::consts::LOG10_2).floor() as usize
    }

    /// Relative distance |a−b| / max(|a|, |b|, floor).
    pub fn rel_diff(&self, other: &HPComplex, floor: f64) -> f64 {
        let d = (self - other).abs();
        let scale = self.abs().max(&other.abs());
        let p = scale.prec();
        let scale = scale.max(&Float::with_val(p, floor));
        Float::with_val(p, d / scale).to_f64()
    }

    /// log2 of |self|, or -inf for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero_exact() {
            return f64::NEG_INFINITY;
        }
        self.abs().log2().to_f64()
    }

    pub fn pi(prec: u32) -> Float {
        Float::with_val(prec.max(MIN_PRECISION), Constant::Pi)
    }

    pub fn cmp_abs(&self, other: &HPComplex) -> Ordering {
        self.norm_sqr().partial_cmp(&other.norm_sqr()).unwrap_or(Ordering::Equal)
    }
}

impl fmt::Debug for HPComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_digits(20))
    }
}

impl fmt::Display for HPComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_digits(self.decimal_digits()))
    }
}

fn binop_prec(a: &HPComplex, b: &HPComplex) -> u32 {
    a.prec().max(b.prec())
}

impl<'a> Add<&'a HPComplex> for &'a HPComplex {
    type Output = HPComplex;
    fn add(self, rhs: &'a HPComplex) -> HPComplex {
        let p = binop_prec(self, rhs);
        HPComplex { re: Float::with_val(p, &self.re + &rhs.re), im: Float::with_val(p, &self.im + &rhs.im) }
    }
}

impl<'a> Sub<&'a HPComplex> for &'a HPComplex {
    type Output = HPComplex;
    fn sub(self, rhs: &'a HPComplex) -> HPComplex {
        let p = binop_prec(self, rhs);
        HPComplex { re: Float::with_val(p, &self.re - &rhs.re), im: Float::with_val(p, &self.im - &rhs.im) }
    }
}

impl<'a> Mul<&'a HPComplex> for &'a HPComplex {
    type Output = HPComplex;
    fn mul(self, rhs: &'a HPComplex) -> HPComplex {
        let p = binop_prec(self, rhs);
        let mut re = Float::with_val(p, &self.re * &rhs.re);
        re -= Float::with_val(p, &self.im * &rhs.im);
        let mut im = Float::with_val(p, &self.re * &rhs.im);
        im += Float::with_val(p, &self.im * &rhs.re);
        HPComplex { re, im }
    }
}

impl<'a> Div<&'a HPComplex> for &'a HPComplex {
    type Output = HPComplex;
    fn div(self, rhs: &'a HPComplex) -> HPComplex {
        let p = binop_prec(self, rhs);
        let n = rhs.norm_sqr_at(p);
        let mut re = Float::with_val(p, &self.re * &rhs.re);
        re += Float::with_val(p, &self.im * &rhs.im);
        let mut im = Float::with_val(p, &self.im * &rhs.re);
        im -= Float::with_val(p, &self.re * &rhs.im);
        re /= &n;
        im /= &n;
        HPComplex { re, im }
    }
}

impl Neg for &HPComplex {
    type Output = HPComplex;
    fn neg(self) -> HPComplex {
        let p = self.prec();
        HPComplex { re: Float::with_val(p, -&self.re), im: Float::with_val(p, -&self.im) }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<HPComplex> for HPComplex {
            type Output = HPComplex;
            fn $m(self, rhs: HPComplex) -> HPComplex {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a HPComplex> for HPComplex {
            type Output = HPComplex;
            fn $m(self, rhs: &'a HPComplex) -> HPComplex {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for HPComplex {
    type Output = HPComplex;
    fn neg(self) -> HPComplex {
        -&self
    }
}

impl Ring for HPComplex {
    fn zero_like(&self) -> Self {
        HPComplex::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        HPComplex::one(self.prec())
    }
    fn from_int_like(&self, v: &Integer) -> Self {
        HPComplex::from_integer(v, self.prec())
    }
    fn from_i64_like(&self, v: i64) -> Self {
        HPComplex::from_i64(v, self.prec())
    }
    fn is_zero(&self) -> bool {
        self.is_zero_exact()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_zero_exact() {
            None
        } else {
            Some(self.recip())
        }
    }
    fn magnitude_log2(&self) -> f64 {
        self.log2_abs()
    }

    fn negligible(&self, scale: &Self) -> bool {
        if self.is_zero_exact() {
            return true;
        }
        // 24 guard bits below the working precision
        let slack = self.prec() as f64 - 24.0;
        let s = scale.log2_abs().max(0.0);
        self.log2_abs() < s - slack
    }
}

impl Field for HPComplex {}

/// Serialized form: decimal strings plus the precision they were produced at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPComplexJson {
    pub re: String,
    pub im: String,
    pub precision_bits: u32,
}

impl From<&HPComplex> for HPComplexJson {
    fn from(z: &HPComplex) -> Self {
        let digits = z.decimal_digits();
        HPComplexJson {
            re: z.re.to_string_radix(10, Some(digits)),
            im: z.im.to_string_radix(10, Some(digits)),
            precision_bits: z.prec(),
        }
    }
}

impl Serialize for HPComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        HPComplexJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HPComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = HPComplexJson::deserialize(d)?;
        let p = j.precision_bits.max(MIN_PRECISION);
        let re = Float::parse(&j.re).map_err(serde::de::Error::custom)?;
        let im = Float::parse(&j.im).map_err(serde::de::Error::custom)?;
        Ok(HPComplex { re: Float::with_val(p, re), im: Float::with_val(p, im) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let z = HPComplex::parse("0.5-0.25i", 128).unwrap();
        assert_eq!(z.to_f64_pair(), (0.5, -0.25));
        let z = HPComplex::parse("(1e-3,2)", 128).unwrap();
        assert_eq!(z.to_f64_pair(), (1e-3, 2.0));
        let z = HPComplex::parse("-i", 128).unwrap();
        assert_eq!(z.to_f64_pair(), (0.0, -1.0));
        let z = HPComplex::parse("1.5e-2+3e-1i", 128).unwrap();
        assert_eq!(z.to_f64_pair(), (0.015, 0.3));
        assert!(HPComplex::parse("abc", 128).is_err());
    }

    #[test]
    fn field_ops() {
        let a = HPComplex::from_parts(0.3, -1.2, 200);
        let b = HPComplex::from_parts(-2.0, 0.7, 100);
        let c = &(&a * &b) / &b;
        assert_eq!(c.prec(), 200);
        assert!(c.rel_diff(&a, 1e-30) < 1e-55);
        let e = a.ln().exp();
        assert!(e.rel_diff(&a, 1e-30) < 1e-55);
        let r = b.root(3).powi(3);
        assert!(r.rel_diff(&b, 1e-30) < 1e-28);
    }

    #[test]
    fn json_roundtrip() {
        let a = HPComplex::from_parts(0.1, 2.5, 256);
        let s = serde_json::to_string(&a).unwrap();
        let b: HPComplex = serde_json::from_str(&s).unwrap();
        assert!(a.rel_diff(&b, 1e-30) < 1e-70);
    }
}
