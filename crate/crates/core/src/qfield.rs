//! Exact arithmetic in Q(q), the field of rational functions in the quantum
//! parameter, together with symmetric q-integers and Gaussian binomials.
//!
//! A [`QScalar`] is stored as `q^shift * num(q) / den(q)` with `num`, `den`
//! ordinary polynomials over Q such that `num(0) != 0`, `den(0) != 0`, `den`
//! is monic and `gcd(num, den) = 1`. Zero is `shift = 0, num = 0, den = 1`.
//! Under these rules equality of values is equality of representations.
//!
//! Text form (used in reports and cache files):
//!
//! ```text
//! scalar  := laurent | "(" laurent ")/(" poly ")"
//! laurent := "0" | term ((" + " | " - ") term)*     exponents strictly decreasing
//! term    := coeff | coeff "*" mono | mono
//! mono    := "q" | "q^" int
//! coeff   := int | int "/" int                      reduced, positive after the sign
//! ```
//!
//! [`QScalar::parse`] accepts this grammar and, more generally, any
//! arithmetic expression over rationals and `q` using `+ - * / ^ ( )`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense univariate polynomial over Q, `coeffs[i]` multiplies `q^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c * q^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// Number of trailing zero coefficients at the low end (the q-adic valuation).
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    fn drop_low(&self, k: usize) -> Poly {
        Poly::from_coeffs(self.coeffs[k..].to_vec())
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn monic(&self) -> Poly {
        match self.lc() {
            None => Poly::zero(),
            Some(lc) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division: `self = quot * rhs + rem`, `deg rem < deg rhs`.
    pub fn divrem(&self, rhs: &Poly) -> (Poly, Poly) {
        let dr = rhs.degree().expect("polynomial division by zero");
        let lc_inv = rhs.lc().unwrap().recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dr {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dr];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dr] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (i, b) in rhs.coeffs.iter().enumerate() {
                rem[k + i] -= &c * b;
            }
            quot[k] = c;
        }
        rem.truncate(dr);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Exact division; panics in debug builds when a remainder appears.
    pub fn div_exact(&self, rhs: &Poly) -> Poly {
        let (q, r) = self.divrem(rhs);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.divrem(&y);
            x = y;
            y = r.monic();
        }
        x.monic()
    }

    pub fn eval(&self, at: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + c;
        }
        acc
    }

    pub fn max_bits(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|c| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = rhs.coeffs.get(i);
            out.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::from_coeffs(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

/// Evaluation point for [`QScalar::specialize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QPoint {
    One,
    Rational(BigRational),
}

impl QPoint {
    pub fn value(&self) -> BigRational {
        match self {
            QPoint::One => BigRational::one(),
            QPoint::Rational(r) => r.clone(),
        }
    }
}

impl QPoint {
    /// Reads `one` or an exact rational such as `7/3`.
    pub fn parse(s: &str) -> Result<QPoint> {
        let t = s.trim();
        if t == "one" || t == "1" {
            return Ok(QPoint::One);
        }
        let v = QScalar::parse(t)?;
        match v.as_rational() {
            Some(r) => Ok(QPoint::Rational(r)),
            None => Err(Error::ScalarParse {
                input: t.to_string(),
                reason: "evaluation point must be rational".into(),
            }),
        }
    }
}

impl serde::Serialize for QPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            QPoint::One => s.serialize_str("one"),
            QPoint::Rational(r) => s.serialize_str(&r.to_string()),
        }
    }
}

impl<'de> serde::Deserialize<'de> for QPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        QPoint::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for QPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QPoint::One => write!(f, "1"),
            QPoint::Rational(r) => write!(f, "{}", r),
        }
    }
}

/// Exact element of Q(q) in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QScalar {
    shift: i64,
    num: Poly,
    den: Poly,
}

impl Default for QScalar {
    fn default() -> Self {
        QScalar::zero()
    }
}

impl QScalar {
    pub fn zero() -> Self {
        QScalar {
            shift: 0,
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        QScalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        QScalar::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        if r.is_zero() {
            return QScalar::zero();
        }
        QScalar {
            shift: 0,
            num: Poly::constant(r),
            den: Poly::one(),
        }
    }

    /// `c * q^e`.
    pub fn monomial(c: BigRational, e: i64) -> Self {
        if c.is_zero() {
            return QScalar::zero();
        }
        QScalar {
            shift: e,
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    /// The indeterminate `q`.
    pub fn q() -> Self {
        QScalar::q_pow(1)
    }

    pub fn q_pow(e: i64) -> Self {
        QScalar::monomial(BigRational::one(), e)
    }

    /// Laurent polynomial from `(exponent, coefficient)` pairs.
    pub fn laurent<I: IntoIterator<Item = (i64, BigRational)>>(terms: I) -> Self {
        terms
            .into_iter()
            .fold(QScalar::zero(), |acc, (e, c)| &acc + &QScalar::monomial(c, e))
    }

    /// Builds `q^shift * num / den` and reduces it to canonical form.
    pub fn from_parts(shift: i64, num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QScalar::normalize(shift, num, den))
    }

    fn normalize(mut shift: i64, num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return QScalar::zero();
        }
        let vn = num.valuation();
        let vd = den.valuation();
        let mut num = if vn > 0 { num.drop_low(vn) } else { num };
        let mut den = if vd > 0 { den.drop_low(vd) } else { den };
        shift += vn as i64 - vd as i64;
        if den.degree() == Some(0) {
            let c = den.coeffs[0].recip();
            num = num.scale(&c);
            den = Poly::one();
        } else {
            let g = Poly::gcd(&num, &den);
            if g.degree() != Some(0) {
                num = num.div_exact(&g);
                den = den.div_exact(&g);
            }
            let lc = den.lc().unwrap().recip();
            if !lc.is_one() {
                num = num.scale(&lc);
                den = den.scale(&lc);
            }
        }
        QScalar { shift, num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.num.is_one() && self.den.is_one()
    }

    /// True when the value is a Laurent polynomial (denominator 1).
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    /// True when the value is a rational constant.
    pub fn is_constant(&self) -> bool {
        self.is_zero() || (self.shift == 0 && self.num.degree() == Some(0) && self.den.is_one())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            Some(self.num.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// Laurent terms of the numerator as `(exponent, coefficient)`, highest first.
    pub fn numerator_terms(&self) -> Vec<(i64, BigRational)> {
        let mut out: Vec<(i64, BigRational)> = self
            .num
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.shift + i as i64, c.clone()))
            .collect();
        out.reverse();
        out
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QScalar::normalize(-self.shift, self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, rhs: &QScalar) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QScalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// The bar involution `q -> q^{-1}`.
    pub fn bar(&self) -> Self {
        if self.is_zero() {
            return QScalar::zero();
        }
        // p(q^{-1}) = q^{-deg p} * rev(p)(q)
        let dn = self.num.degree().unwrap() as i64;
        let dd = self.den.degree().unwrap() as i64;
        let rn = Poly::from_coeffs(self.num.coeffs.iter().rev().cloned().collect());
        let rd = Poly::from_coeffs(self.den.coeffs.iter().rev().cloned().collect());
        QScalar::normalize(-self.shift - dn + dd, rn, rd)
    }

    /// Exact evaluation at a point of Q.
    pub fn specialize(&self, at: &QPoint) -> Result<BigRational> {
        let x = at.value();
        if self.is_zero() {
            return Ok(BigRational::zero());
        }
        let d = self.den.eval(&x);
        if d.is_zero() || (x.is_zero() && self.shift < 0) {
            return Err(Error::Pole {
                point: at.to_string(),
            });
        }
        let n = self.num.eval(&x);
        let p = if x.is_zero() {
            if self.shift > 0 {
                BigRational::zero()
            } else {
                BigRational::one()
            }
        } else {
            pow_rational(&x, self.shift)
        };
        Ok(p * n / d)
    }

    /// Bit size of the largest numerator/denominator coefficient.
    pub fn max_bits(&self) -> u64 {
        self.num.max_bits().max(self.den.max_bits())
    }

    pub fn check_bits(&self, ceiling: u64) -> Result<()> {
        let bits = self.max_bits();
        if bits > ceiling {
            Err(Error::CoefficientOverflow { bits, ceiling })
        } else {
            Ok(())
        }
    }

    pub fn parse(input: &str) -> Result<Self> {
        let mut p = ExprParser {
            src: input,
            chars: input.char_indices().peekable(),
        };
        let v = p.expr()?;
        p.skip_ws();
        if p.chars.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }

    /// Total order on canonical forms, used only for deterministic sorting.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

fn pow_rational(x: &BigRational, e: i64) -> BigRational {
    let mut acc = BigRational::one();
    let base = if e < 0 { x.recip() } else { x.clone() };
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

impl Add for &QScalar {
    type Output = QScalar;
    fn add(self, rhs: &QScalar) -> QScalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let s = self.shift.min(rhs.shift);
        let a = self.num.shift_up((self.shift - s) as usize);
        let b = rhs.num.shift_up((rhs.shift - s) as usize);
        if self.den.is_one() && rhs.den.is_one() {
            return QScalar::normalize(s, &a + &b, Poly::one());
        }
        if self.den == rhs.den {
            return QScalar::normalize(s, &a + &b, self.den.clone());
        }
        let num = &(&a * &rhs.den) + &(&b * &self.den);
        QScalar::normalize(s, num, &self.den * &rhs.den)
    }
}

impl Sub for &QScalar {
    type Output = QScalar;
    fn sub(self, rhs: &QScalar) -> QScalar {
        self + &(-rhs)
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar {
            shift: self.shift,
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &QScalar {
    type Output = QScalar;
    fn mul(self, rhs: &QScalar) -> QScalar {
        if self.is_zero() || rhs.is_zero() {
            return QScalar::zero();
        }
        let shift = self.shift + rhs.shift;
        if self.den.is_one() && rhs.den.is_one() {
            return QScalar {
                shift,
                num: &self.num * &rhs.num,
                den: Poly::one(),
            };
        }
        // cross-cancel before multiplying so the product is already reduced
        let g1 = Poly::gcd(&self.num, &rhs.den);
        let g2 = Poly::gcd(&rhs.num, &self.den);
        let n1 = self.num.div_exact(&g1);
        let d2 = rhs.den.div_exact(&g1);
        let n2 = rhs.num.div_exact(&g2);
        let d1 = self.den.div_exact(&g2);
        QScalar::normalize(shift, &n1 * &n2, &d1 * &d2)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QScalar {
            type Output = QScalar;
            fn $m(self, rhs: QScalar) -> QScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

fn fmt_laurent(f: &mut fmt::Formatter<'_>, terms: &[(i64, BigRational)]) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (k, (e, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let mono = match *e {
            0 => None,
            1 => Some("q".to_string()),
            e => Some(format!("q^{}", e)),
        };
        match mono {
            None => write!(f, "{}", a)?,
            Some(m) if a.is_one() => write!(f, "{}", m)?,
            Some(m) => write!(f, "{}*{}", a, m)?,
        }
    }
    Ok(())
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.numerator_terms();
        if self.den.is_one() {
            return fmt_laurent(f, &terms);
        }
        write!(f, "(")?;
        fmt_laurent(f, &terms)?;
        write!(f, ")/(")?;
        let dterms: Vec<(i64, BigRational)> = self
            .den
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as i64, c.clone()))
            .collect();
        fmt_laurent(f, &dterms)?;
        write!(f, ")")
    }
}

impl serde::Serialize for QScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for QScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        QScalar::parse(&s).map_err(serde::de::Error::custom)
    }
}

struct ExprParser<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
}

impl<'a> ExprParser<'a> {
    fn err(&self, reason: &str) -> Error {
        Error::ScalarParse {
            input: self.src.to_string(),
            reason: reason.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|(_, c)| *c)
    }

    fn expr(&mut self) -> Result<QScalar> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.chars.next();
                    acc = &acc + &self.term()?;
                }
                Some('-') => {
                    self.chars.next();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<QScalar> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.chars.next();
                    acc = &acc * &self.factor()?;
                }
                Some('/') => {
                    self.chars.next();
                    let d = self.factor()?;
                    acc = acc.div(&d)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<QScalar> {
        if self.peek() == Some('-') {
            self.chars.next();
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.chars.next();
            let neg = if self.peek() == Some('-') {
                self.chars.next();
                true
            } else {
                false
            };
            let e = self.integer()?;
            let e = e.to_i64().ok_or_else(|| self.err("exponent too large"))?;
            let p = base.pow(e as u32);
            return if neg { p.inv() } else { Ok(p) };
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let mut digits = String::new();
        while let Some((_, c)) = self.chars.peek() {
            if c.is_ascii_digit() {
                digits.push(*c);
                self.chars.next();
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Err(self.err("expected integer"));
        }
        digits.parse::<BigInt>().map_err(|_| self.err("bad integer"))
    }

    fn atom(&mut self) -> Result<QScalar> {
        match self.peek() {
            Some('q') => {
                self.chars.next();
                Ok(QScalar::q())
            }
            Some('(') => {
                self.chars.next();
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.chars.next();
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(QScalar::from_rational(BigRational::from_integer(n)))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

/// Symmetric q-integer `[m]` at base `q^d`: `(q^{dm} - q^{-dm}) / (q^d - q^{-d})`.
pub fn qint(m: i64, d: u32) -> QScalar {
    let d = d as i64;
    let sign = if m < 0 { -1 } else { 1 };
    let m = m.abs();
    let terms = (0..m).map(|k| (d * (m - 1 - 2 * k), BigRational::from_integer(BigInt::from(sign))));
    QScalar::laurent(terms)
}

/// `[m]! = [1][2]...[m]` at base `q^d`.
pub fn qfactorial(m: u32, d: u32) -> QScalar {
    (1..=m as i64).fold(QScalar::one(), |acc, k| &acc * &qint(k, d))
}

/// Gaussian binomial with symmetric q-integers at base `q^d`; zero outside `0 <= k <= n`.
pub fn qbinom(n: u32, k: i64, d: u32) -> QScalar {
    if k < 0 || k > n as i64 {
        return QScalar::zero();
    }
    let k = k as u32;
    let num = qfactorial(n, d);
    let den = &qfactorial(k, d) * &qfactorial(n - k, d);
    num.div(&den).expect("q-factorials are nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QScalar {
        QScalar::parse(s).unwrap()
    }

    #[test]
    fn arith_examples() {
        let a = q("q + q^-1");
        assert!((&a - &a).is_zero());
        let r = q("(q^2 - 1)/(q - 1)");
        assert_eq!(r, q("q + 1"));
        assert!(r.is_laurent());
        let b = q("q^3 - 2");
        assert!((&b * &b.inv().unwrap()).is_one());
        assert_eq!(QScalar::zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn qint_examples() {
        assert!(qint(0, 1).is_zero());
        assert_eq!(qint(2, 1), q("q + q^-1"));
        assert_eq!(qint(1, 3), QScalar::one());
        for m in 1..=5 {
            for d in 1..=3 {
                assert_eq!(qint(-m, d), -qint(m, d));
            }
        }
        // defining ratio
        let expect = (&QScalar::q_pow(6) - &QScalar::q_pow(-6))
            .div(&(&QScalar::q_pow(2) - &QScalar::q_pow(-2)))
            .unwrap();
        assert_eq!(qint(3, 2), expect);
    }

    #[test]
    fn qbinom_examples() {
        for n in 0..6 {
            assert!(qbinom(n, 0, 2).is_one());
        }
        assert_eq!(qbinom(2, 1, 1), q("q + q^-1"));
        assert_eq!(qbinom(3, 1, 1), q("q^2 + 1 + q^-2"));
        assert!(qbinom(3, 4, 1).is_zero());
        assert!(qbinom(3, -1, 1).is_zero());
    }

    #[test]
    fn specialize_examples() {
        let three = qbinom(3, 1, 1).specialize(&QPoint::One).unwrap();
        assert_eq!(three, BigRational::from_integer(3.into()));
        let v = q("q + q^-1")
            .specialize(&QPoint::Rational(BigRational::from_integer(2.into())))
            .unwrap();
        assert_eq!(v, BigRational::new(5.into(), 2.into()));
        let pole = q("1/(q - 1)").specialize(&QPoint::One);
        assert!(matches!(pole, Err(Error::Pole { .. })));
    }

    #[test]
    fn rendering_round_trips() {
        for s in [
            "0",
            "1",
            "-3/2*q^2 + q - 7",
            "q + q^-1",
            "(q^2 + 1)/(q - 2)",
            "(-q^-3)/(q^2 + 1/3)",
        ] {
            let v = q(s);
            assert_eq!(QScalar::parse(&v.to_string()).unwrap(), v, "{}", s);
        }
        assert_eq!(q("q^2 + 1 + q^-2").to_string(), "q^2 + 1 + q^-2");
        assert_eq!(q("1/(2*q - 2)").to_string(), "(1/2)/(q - 1)");
    }

    #[test]
    fn bar_involution() {
        assert_eq!(q("q^2 - 3*q^-1").bar(), q("q^-2 - 3*q"));
        assert_eq!(q("1/(q - 2)").bar(), q("q/(1 - 2*q)"));
    }

    #[test]
    fn bit_ceiling() {
        let big = q("1234567890123456789012345678901234567890");
        assert!(big.check_bits(64).is_err());
        assert!(big.check_bits(256).is_ok());
    }
}
