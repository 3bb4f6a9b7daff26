//! Scalar affine maps `x -> lambda*x + t` on R^n: composition,
//! inversion, fixed points, kind classification and word evaluation.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::scalar::Scalar;
use crate::Error;

/// Point or direction in R^n with exact coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Vector(pub Vec<Scalar>);

impl Vector {
    pub fn zero(dim: usize) -> Self {
        Vector(vec![Scalar::zero(); dim])
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = Vector::zero(dim);
        v.0[axis] = Scalar::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, s: &Scalar) -> Vector {
        Vector(self.0.iter().map(|c| c * s).collect())
    }

    pub fn dot(&self, other: &Vector) -> Scalar {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in dot product");
        let mut acc = Scalar::zero();
        for (a, b) in self.0.iter().zip(&other.0) {
            acc += a * b;
        }
        acc
    }

    pub fn norm_sq(&self) -> Scalar {
        self.dot(self)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Scalar::to_f64).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.0.iter().map(Scalar::to_json).collect())
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Vector, Error> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::InvalidSpec(format!("vector must be an array, got {v}")))?;
        let coords = arr.iter().map(Scalar::from_json).collect::<Result<_, _>>()?;
        Ok(Vector(coords))
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, rhs: Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector add");
        Vector(
            self.0
                .into_iter()
                .zip(rhs.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, rhs: Vector) -> Vector {
        self + (-rhs)
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Classification by ratio: `lambda = 1`, `lambda = -1`, or anything else.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    Translation,
    Symmetry,
    Homothety,
}

/// Fixed-point set of an affine map.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FixedPoints {
    /// Nontrivial translation: no fixed point.
    Empty,
    /// The identity fixes everything.
    All,
    /// Unique fixed point `t/(1-lambda)`.
    One(Vector),
}

/// The map `x -> ratio*x + offset`.  Canonical storage is
/// (ratio, offset); the center `t/(1-lambda)` is a derived view since
/// translations have none.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffineMap {
    ratio: Scalar,
    offset: Vector,
}

impl AffineMap {
    pub fn new(ratio: Scalar, offset: Vector) -> Result<Self, Error> {
        if ratio.is_zero() {
            return Err(Error::InvalidSpec("ratio must be nonzero".into()));
        }
        Ok(AffineMap { ratio, offset })
    }

    pub fn identity(dim: usize) -> Self {
        AffineMap {
            ratio: Scalar::one(),
            offset: Vector::zero(dim),
        }
    }

    pub fn translation(offset: Vector) -> Self {
        AffineMap {
            ratio: Scalar::one(),
            offset,
        }
    }

    /// Center form `x -> lambda*(x - a) + a`, i.e. offset `(1-lambda)*a`.
    pub fn from_center(center: Vector, ratio: Scalar) -> Result<Self, Error> {
        if ratio.is_zero() {
            return Err(Error::InvalidSpec("ratio must be nonzero".into()));
        }
        let one_minus = Scalar::one() - ratio.clone();
        let offset = center.scale(&one_minus);
        Ok(AffineMap { ratio, offset })
    }

    pub fn ratio(&self) -> &Scalar {
        &self.ratio
    }

    pub fn offset(&self) -> &Vector {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.offset.dim()
    }

    pub fn is_identity(&self) -> bool {
        self.ratio.is_one() && self.offset.is_zero()
    }

    /// Center `t/(1-lambda)`; none for translations.
    pub fn center(&self) -> Option<Vector> {
        if self.ratio.is_one() {
            return None;
        }
        let inv = (Scalar::one() - self.ratio.clone())
            .inv()
            .expect("ratio != 1");
        Some(self.offset.scale(&inv))
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        assert_eq!(self.dim(), x.dim(), "dimension mismatch in apply");
        x.scale(&self.ratio) + self.offset.clone()
    }

    /// `(f.compose(g))(x) = f(g(x))`.
    pub fn compose(&self, g: &AffineMap) -> AffineMap {
        assert_eq!(self.dim(), g.dim(), "dimension mismatch in compose");
        AffineMap {
            ratio: &self.ratio * &g.ratio,
            offset: g.offset.scale(&self.ratio) + self.offset.clone(),
        }
    }

    pub fn invert(&self) -> AffineMap {
        let inv = self.ratio.inv().expect("ratio is nonzero");
        AffineMap {
            ratio: inv.clone(),
            offset: -self.offset.scale(&inv),
        }
    }

    pub fn kind(&self) -> Kind {
        if self.ratio.is_one() {
            Kind::Translation
        } else if self.ratio == Scalar::from_integer(-1) {
            Kind::Symmetry
        } else {
            Kind::Homothety
        }
    }

    /// True when `|ratio| = 1`, i.e. the map is an affine symmetry in
    /// the wide sense (translations included).
    pub fn is_wide_symmetry(&self) -> bool {
        (self.ratio.clone() * self.ratio.clone()).is_one()
    }

    pub fn fixed_points(&self) -> FixedPoints {
        if self.ratio.is_one() {
            if self.offset.is_zero() {
                FixedPoints::All
            } else {
                FixedPoints::Empty
            }
        } else {
            FixedPoints::One(self.center().expect("ratio != 1"))
        }
    }

    /// `f^n` with exact power shortcuts: the ratio by fast
    /// exponentiation, the offset by the geometric sum
    /// `t*(lambda^n - 1)/(lambda - 1)` when `lambda != 1`.
    pub fn power(&self, n: i64) -> AffineMap {
        if n == 0 {
            return AffineMap::identity(self.dim());
        }
        if self.ratio.is_one() {
            return AffineMap {
                ratio: Scalar::one(),
                offset: self.offset.scale(&Scalar::from_integer(n)),
            };
        }
        let ratio_n = self.ratio.pow(n).expect("ratio is nonzero");
        let denom_inv = (self.ratio.clone() - Scalar::one())
            .inv()
            .expect("ratio != 1");
        let factor = (ratio_n.clone() - Scalar::one()) * denom_inv;
        AffineMap {
            ratio: ratio_n,
            offset: self.offset.scale(&factor),
        }
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x -> ({})*x + {}", self.ratio, self.offset)
    }
}

/// Word over a generator list: sequence of (index, nonzero exponent).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Word(pub Vec<(usize, i64)>);

impl Word {
    pub fn new(letters: Vec<(usize, i64)>) -> Self {
        Word(letters)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Evaluates `gens[i1]^n1 ∘ ... ∘ gens[iq]^nq` (first letter outermost).
pub fn word_eval(gens: &[AffineMap], word: &Word) -> Result<AffineMap, Error> {
    let dim = gens.first().map_or(0, AffineMap::dim);
    let mut acc = AffineMap::identity(dim);
    for &(index, exp) in &word.0 {
        let g = gens.get(index).ok_or(Error::GeneratorIndex {
            index,
            count: gens.len(),
        })?;
        acc = acc.compose(&g.power(exp));
    }
    Ok(acc)
}
