//! Exact arithmetic over Q-linear combinations of square roots of
//! squarefree positive integers.
//!
//! A value is stored as a map radicand -> rational coefficient, with
//! radicand 1 holding the rational part.  Normalization is canonical:
//! no zero coefficients, all radicands squarefree, so structural
//! equality coincides with numerical equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::Error;

/// Radicand 1 marks the rational part of a [`Scalar`].
pub const RATIONAL: u64 = 1;

/// Maximum number of distinct radicals accepted from external input.
/// Inversion cost grows exponentially with the radical count, so the
/// parser refuses anything wider than this.
pub const MAX_RADICALS: usize = 4;

/// Exact element of Q(sqrt(m1), sqrt(m2), ...) for squarefree mi.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<u64, BigRational>,
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Splits `m` into `s^2 * d` with `d` squarefree, returning `(s, d)`.
/// Trial division; radicands here are desk-scale.
pub fn square_split(m: u64) -> (u64, u64) {
    let mut square = 1u64;
    let mut free = 1u64;
    let mut rest = m;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            free *= p;
        }
        p += 1;
    }
    free *= rest;
    (square, free)
}

fn is_squarefree(m: u64) -> bool {
    square_split(m).0 == 1
}

/// Smallest prime factor of `m` (`m >= 2`).
fn least_prime_factor(m: u64) -> u64 {
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            return p;
        }
        p += 1;
    }
    m
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar::from_rational(big(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(RATIONAL, r);
        }
        Scalar { terms }
    }

    /// `sqrt(m)` for any positive integer `m`; the square part is pulled
    /// out, so e.g. `sqrt_of(8)` is `2*sqrt(2)`.
    pub fn sqrt_of(m: u64) -> Self {
        assert!(m > 0, "radicand must be positive");
        let (s, d) = square_split(m);
        Scalar::term(big(s as i64), d)
    }

    /// Single term `coef * sqrt(radicand)`; `radicand` must be squarefree.
    pub fn term(coef: BigRational, radicand: u64) -> Self {
        assert!(is_squarefree(radicand), "radicand must be squarefree");
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(radicand, coef);
        }
        Scalar { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().map_or(false, |r| r.is_one())
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&m| m == RATIONAL)
    }

    /// Rational value when no radical term is present.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(r) = self.terms.get(&RATIONAL) {
                return Some(r.clone());
            }
        }
        None
    }

    /// Integer value when the scalar is a rational integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        let r = self.as_rational()?;
        if r.is_integer() {
            Some(r.to_integer())
        } else {
            None
        }
    }

    pub fn radicands(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.keys().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> + '_ {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    /// Number of distinct radical (non-rational) terms.
    pub fn radical_count(&self) -> usize {
        self.terms.keys().filter(|&&m| m != RATIONAL).count()
    }

    fn insert_term(terms: &mut BTreeMap<u64, BigRational>, radicand: u64, coef: BigRational) {
        if coef.is_zero() {
            return;
        }
        match terms.entry(radicand) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Exact sign: -1, 0 or +1.
    ///
    /// Zero is decided structurally (empty term map).  Otherwise the
    /// value is enclosed in a rational interval from integer square
    /// roots, starting at 64 bits and doubling until the interval
    /// excludes zero.  Nonzero radical combinations are bounded away
    /// from zero, so this terminates.
    pub fn sign(&self) -> i32 {
        if self.terms.is_empty() {
            return 0;
        }
        if let Some(r) = self.as_rational() {
            return match r.numer().sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            };
        }
        let mut bits = 64u32;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            bits *= 2;
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn abs(&self) -> Scalar {
        if self.sign() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Numeric comparison via the sign of the difference.
    pub fn cmp_value(&self, other: &Scalar) -> std::cmp::Ordering {
        match (self.clone() - other.clone()).sign() {
            -1 => std::cmp::Ordering::Less,
            0 => std::cmp::Ordering::Equal,
            _ => std::cmp::Ordering::Greater,
        }
    }

    /// Rational interval `[lo, hi]` containing the value, each radical
    /// enclosed to `bits` fractional bits.
    fn enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        let scale = BigInt::one() << bits;
        for (&m, coef) in &self.terms {
            if m == RATIONAL {
                lo += coef;
                hi += coef;
                continue;
            }
            // floor(2^bits * sqrt(m))
            let s = (BigInt::from(m) << (2 * bits)).sqrt();
            let rlo = BigRational::new(s.clone(), scale.clone());
            let rhi = BigRational::new(s + BigInt::one(), scale.clone());
            if coef.is_positive() {
                lo += coef * &rlo;
                hi += coef * &rhi;
            } else {
                lo += coef * &rhi;
                hi += coef * &rlo;
            }
        }
        (lo, hi)
    }

    /// Rational approximation with relative error below `2^(1-bits)`.
    pub fn approx_rational(&self, bits: u32) -> BigRational {
        if self.terms.is_empty() {
            return BigRational::zero();
        }
        if let Some(r) = self.as_rational() {
            return r;
        }
        let mut prec = bits + 8;
        loop {
            let (lo, hi) = self.enclosure(prec);
            let mid = (&lo + &hi) / big(2);
            let width = &hi - &lo;
            // width <= |mid| * 2^(1-bits)
            if !mid.is_zero() && width * BigRational::from_integer(BigInt::one() << bits) <= mid.abs() * big(2) {
                return mid;
            }
            prec *= 2;
        }
    }

    /// Floating approximation, accurate to `min(bits, 53)` bits.
    pub fn approx_f64(&self, bits: u32) -> f64 {
        self.approx_rational(bits).to_f64().unwrap_or(f64::NAN)
    }

    /// Fast floating evaluation (one rounding per term); use
    /// `approx_f64` when controlled accuracy is needed.
    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&m, coef)| {
                let c = coef.to_f64().unwrap_or(f64::NAN);
                if m == RATIONAL {
                    c
                } else {
                    c * (m as f64).sqrt()
                }
            })
            .sum()
    }

    /// Exact multiplicative inverse.
    ///
    /// The denominator is rationalized by repeatedly multiplying with
    /// the conjugate that flips the sign of every term whose radicand
    /// is divisible by a chosen prime; each round removes that prime
    /// from the radical support.
    pub fn inv(&self) -> Result<Scalar, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut numer = Scalar::one();
        let mut denom = self.clone();
        loop {
            match denom.as_rational() {
                Some(r) => {
                    let inv = BigRational::one() / r;
                    return Ok(numer * Scalar::from_rational(inv));
                }
                None => {
                    let p = denom
                        .terms
                        .keys()
                        .find(|&&m| m != RATIONAL)
                        .map(|&m| least_prime_factor(m))
                        .expect("non-rational scalar has a radical term");
                    let conj = denom.conjugate_at(p);
                    numer = numer * conj.clone();
                    denom = denom * conj;
                }
            }
        }
    }

    /// Flips the sign of every term whose radicand is divisible by `p`.
    fn conjugate_at(&self, p: u64) -> Scalar {
        let terms = self
            .terms
            .iter()
            .map(|(&m, c)| (m, if m % p == 0 { -c.clone() } else { c.clone() }))
            .collect();
        Scalar { terms }
    }

    /// Integer power, by fast exponentiation; negative exponents go
    /// through [`Scalar::inv`].
    pub fn pow(&self, n: i64) -> Result<Scalar, Error> {
        if n < 0 {
            return self.inv()?.pow(n.checked_neg().expect("exponent overflow"));
        }
        let mut result = Scalar::one();
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        Ok(result)
    }

    /// JSON form: array of `{"coef": "p/q", "radicand": m}` terms.
    pub fn to_json(&self) -> serde_json::Value {
        let arr: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(&m, c)| {
                serde_json::json!({
                    "coef": format_rational(c),
                    "radicand": m,
                })
            })
            .collect();
        serde_json::Value::Array(arr)
    }

    /// Parses the JSON encoding.  Accepts the canonical term-array form
    /// plus two shorthands: a bare integer, and a `"p/q"` string.
    pub fn from_json(v: &serde_json::Value) -> Result<Scalar, Error> {
        match v {
            serde_json::Value::Number(n) => {
                let i = n
                    .as_i64()
                    .ok_or_else(|| Error::InvalidSpec(format!("scalar literal {n} is not an integer")))?;
                Ok(Scalar::from_integer(i))
            }
            serde_json::Value::String(s) => Ok(Scalar::from_rational(parse_rational(s)?)),
            serde_json::Value::Array(arr) => {
                let mut out = Scalar::zero();
                for (i, term) in arr.iter().enumerate() {
                    let obj = term.as_object().ok_or_else(|| {
                        Error::InvalidSpec(format!("scalar term {i} must be an object"))
                    })?;
                    let coef = obj
                        .get("coef")
                        .and_then(|c| c.as_str())
                        .ok_or_else(|| Error::InvalidSpec(format!("scalar term {i}: missing string field \"coef\"")))?;
                    let radicand = obj
                        .get("radicand")
                        .and_then(|r| r.as_u64())
                        .ok_or_else(|| Error::InvalidSpec(format!("scalar term {i}: missing integer field \"radicand\"")))?;
                    if radicand == 0 {
                        return Err(Error::InvalidSpec(format!("scalar term {i}: radicand must be positive")));
                    }
                    if !is_squarefree(radicand) {
                        return Err(Error::InvalidSpec(format!(
                            "scalar term {i}: radicand {radicand} is not squarefree"
                        )));
                    }
                    let c = parse_rational(coef)?;
                    out = out + Scalar::term(c, radicand);
                }
                if out.radical_count() > MAX_RADICALS {
                    return Err(Error::InvalidSpec(format!(
                        "scalar has {} distinct radicals; at most {MAX_RADICALS} supported",
                        out.radical_count()
                    )));
                }
                Ok(out)
            }
            other => Err(Error::InvalidSpec(format!(
                "scalar must be an integer, a \"p/q\" string or a term array, got {other}"
            ))),
        }
    }
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let parse_int = |t: &str| -> Result<BigInt, Error> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::InvalidSpec(format!("malformed rational {s:?}")))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let d = parse_int(den)?;
            if d.is_zero() {
                return Err(Error::InvalidSpec(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_int(num)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        let mut terms = self.terms;
        for (m, c) in rhs.terms {
            Scalar::insert_term(&mut terms, m, c);
        }
        Scalar { terms }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        for (m, c) in rhs.terms {
            Scalar::insert_term(&mut self.terms, m, c);
        }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self + (-rhs)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        let terms = self.terms.into_iter().map(|(m, c)| (m, -c)).collect();
        Scalar { terms }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        let mut terms = BTreeMap::new();
        for (&ma, ca) in &self.terms {
            for (&mb, cb) in &rhs.terms {
                // sqrt(ma)*sqrt(mb) = g*sqrt(ma*mb/g^2), g = gcd(ma, mb);
                // both radicands squarefree keeps the product squarefree.
                let g = num::integer::gcd(ma, mb);
                let radicand = (ma / g) * (mb / g);
                let coef = ca * cb * big(g as i64);
                Scalar::insert_term(&mut terms, radicand, coef);
            }
        }
        Scalar { terms }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        self.clone() * rhs.clone()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m == RATIONAL {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "sqrt({m})")?;
            } else {
                write!(f, "{}*sqrt({m})", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}
