//! Group-level invariants: non-abelianness, the two-case split, the
//! closure of the ratio group, the invariant affine subspace `E_G`, and
//! generators of the translation subgroup orbit `H_G`.

use std::collections::HashMap;

use num::rational::BigRational;
use num::{BigInt, One, ToPrimitive};

use crate::affine::{AffineMap, Kind, Vector};
use crate::linalg;
use crate::scalar::Scalar;
use crate::Error;

/// Ambient dimension plus a nonempty generator list.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    dim: usize,
    gens: Vec<AffineMap>,
}

impl GroupSpec {
    pub fn new(dim: usize, gens: Vec<AffineMap>) -> Result<Self, Error> {
        if dim == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        if gens.is_empty() {
            return Err(Error::InvalidSpec("at least one generator required".into()));
        }
        for (i, g) in gens.iter().enumerate() {
            if g.dim() != dim {
                return Err(Error::InvalidSpec(format!(
                    "generator {i} has dimension {}, expected {dim}",
                    g.dim()
                )));
            }
            if g.ratio().is_zero() {
                return Err(Error::InvalidSpec(format!("generator {i}: ratio must be nonzero")));
            }
        }
        Ok(GroupSpec { dim, gens })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[AffineMap] {
        &self.gens
    }
}

/// Theorem case split: `Case1` when the group contains a map with
/// `|ratio| != 1`, `Case2` when every element is an affine symmetry.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Case {
    Case1,
    Case2,
}

/// True iff some pair of generators fails to commute.  For a generator
/// set, pairwise commutation is equivalent to abelianness of the
/// generated group.
pub fn check_nonabelian(spec: &GroupSpec) -> bool {
    let gens = spec.gens();
    for i in 0..gens.len() {
        for j in (i + 1)..gens.len() {
            if gens[i].compose(&gens[j]) != gens[j].compose(&gens[i]) {
                return true;
            }
        }
    }
    false
}

/// `|ratio|` is multiplicative, so the group sits inside the symmetry
/// group exactly when every generator does.
pub fn detect_case(spec: &GroupSpec) -> Result<Case, Error> {
    if !check_nonabelian(spec) {
        return Err(Error::AbelianGroup);
    }
    if spec.gens().iter().any(|g| !g.is_wide_symmetry()) {
        Ok(Case::Case1)
    } else {
        Ok(Case::Case2)
    }
}

/// Positive part of the closure of the ratio group in `(0, +inf)`.
#[derive(Clone, Debug)]
pub enum PositivePart {
    /// Only ratio modulus 1 occurs.
    Trivial,
    /// The moduli generate a cyclic group; `base > 1` is its generator,
    /// expressed as a monomial over the generator moduli.
    Cyclic {
        /// `(generator index, rational exponent)` with
        /// `base = prod |ratio_i|^{e_i}`.
        exponents: Vec<(usize, BigRational)>,
        /// Exact base when the monomial lands back in the scalar ring.
        base_exact: Option<Scalar>,
        base_approx: f64,
    },
    /// No multiplicative relation found up to the certification bound;
    /// reported as dense in `(0, +inf)`.
    Dense,
}

/// Structured description of the closure of the ratio group in R.
#[derive(Clone, Debug)]
pub struct ScaleSet {
    pub positive: PositivePart,
    pub contains_negative: bool,
    pub contains_zero: bool,
    pub certification_bound: u32,
}

impl ScaleSet {
    /// Dense positive part plus a negative ratio closes up to all of R.
    pub fn closure_is_all_reals(&self) -> bool {
        matches!(self.positive, PositivePart::Dense) && self.contains_negative
    }

    fn positive_value_in_closure_f64(&self, v: f64, tol: f64) -> bool {
        match &self.positive {
            PositivePart::Trivial => (v - 1.0).abs() <= tol,
            PositivePart::Dense => true,
            PositivePart::Cyclic { base_approx, .. } => {
                let t = v.ln() / base_approx.ln();
                (t - t.round()).abs() * base_approx.ln() <= tol.max(1e-12)
            }
        }
    }

    /// Membership of an exact scalar in the closure of the ratio group.
    /// Exact wherever possible: sign tests are exact, and the cyclic
    /// case verifies `|s| = base^k` in the scalar ring when the base is
    /// exactly representable.
    pub fn contains_exact(&self, s: &Scalar, tol: f64) -> bool {
        match s.sign() {
            0 => self.contains_zero,
            sign => {
                if sign < 0 && !self.contains_negative {
                    return false;
                }
                let mag = s.abs();
                match &self.positive {
                    PositivePart::Trivial => mag.is_one(),
                    PositivePart::Dense => true,
                    PositivePart::Cyclic {
                        base_exact,
                        base_approx,
                        ..
                    } => {
                        let t = mag.approx_f64(64).ln() / base_approx.ln();
                        let k = t.round();
                        if !k.is_finite() || k.abs() > 512.0 {
                            return false;
                        }
                        match base_exact {
                            Some(b) => b.pow(k as i64).map_or(false, |p| p == mag),
                            None => (t - k).abs() * base_approx.ln() <= tol.max(1e-12),
                        }
                    }
                }
            }
        }
    }

    pub fn contains_f64(&self, v: f64, tol: f64) -> bool {
        if v.abs() <= tol {
            return self.contains_zero || (1.0 - v).abs() <= tol;
        }
        if v < 0.0 && !self.contains_negative {
            return false;
        }
        self.positive_value_in_closure_f64(v.abs(), tol)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let positive = match &self.positive {
            PositivePart::Trivial => serde_json::json!("trivial"),
            PositivePart::Dense => serde_json::json!("dense_in_positive_reals"),
            PositivePart::Cyclic {
                exponents,
                base_exact,
                base_approx,
            } => serde_json::json!({
                "cyclic": {
                    "base_approx": base_approx,
                    "base_exact": base_exact.as_ref().map(|b| b.to_json()),
                    "exponents": exponents
                        .iter()
                        .map(|(i, e)| serde_json::json!([i, crate::scalar::format_rational(e)]))
                        .collect::<Vec<_>>(),
                }
            }),
        };
        serde_json::json!({
            "positive_part": positive,
            "contains_negative": self.contains_negative,
            "contains_zero": self.contains_zero,
            "certification_bound": self.certification_bound,
        })
    }
}

/// Searches for `alpha^p = beta^q` with `1 <= p, q <= bound`;
/// both arguments exceed 1.
fn multiplicative_relation(alpha: &Scalar, beta: &Scalar, bound: u32) -> Option<(u32, u32)> {
    let mut powers: HashMap<Scalar, u32> = HashMap::new();
    let mut acc = Scalar::one();
    for p in 1..=bound {
        acc = acc * alpha.clone();
        powers.entry(acc.clone()).or_insert(p);
    }
    let mut acc = Scalar::one();
    for q in 1..=bound {
        acc = acc * beta.clone();
        if let Some(&p) = powers.get(&acc) {
            return Some((p, q));
        }
    }
    None
}

fn gcd_rational(a: &BigRational, b: &BigRational) -> BigRational {
    // gcd(a/b, c/d) = gcd(a*d, c*b) / (b*d)
    let num = num::integer::gcd(
        a.numer() * b.denom(),
        b.numer() * a.denom(),
    );
    BigRational::new(num, a.denom() * b.denom())
}

/// `mu^(num/den)` when it lands back in the rationals (perfect roots).
fn exact_rational_root(mu: &Scalar, exp: &BigRational) -> Option<Scalar> {
    if exp.is_integer() {
        return mu.pow(exp.to_integer().to_i64()?).ok();
    }
    let r = mu.as_rational()?;
    let num = exp.numer().to_i64()?;
    let den = exp.denom().to_u32()?;
    let powered = if num >= 0 {
        r.pow(num as i32)
    } else {
        BigRational::one() / r.pow((-num) as i32)
    };
    let root = |x: &BigInt| -> Option<BigInt> {
        let r = x.nth_root(den);
        if num::pow(r.clone(), den as usize) == *x {
            Some(r)
        } else {
            None
        }
    };
    let n = root(powered.numer())?;
    let d = root(powered.denom())?;
    Some(Scalar::from_rational(BigRational::new(n, d)))
}

/// Describes the closure in R of the multiplicative group generated by
/// the generator ratios.  Relations `|ratio_i|^p = |ratio_j|^q` are
/// searched exactly up to `bound`; if every modulus is commensurable
/// with the first, the positive part reduces to one cyclic base,
/// otherwise it is reported dense with the bound recorded.
pub fn scale_set(spec: &GroupSpec, bound: u32) -> ScaleSet {
    struct Modulus {
        gen_index: usize,
        value: Scalar,           // > 1
        orientation: BigRational, // value = |ratio|^orientation
    }

    let mut contains_negative = false;
    let mut moduli: Vec<Modulus> = Vec::new();
    for (i, g) in spec.gens().iter().enumerate() {
        if g.ratio().is_negative() {
            contains_negative = true;
        }
        let mag = g.ratio().abs();
        if (mag.clone() * mag.clone()).is_one() {
            continue;
        }
        let (value, orientation) = if mag.cmp_value(&Scalar::one()) == std::cmp::Ordering::Greater {
            (mag, BigRational::one())
        } else {
            (mag.inv().expect("ratio nonzero"), -BigRational::one())
        };
        moduli.push(Modulus {
            gen_index: i,
            value,
            orientation,
        });
    }

    let contains_zero = !moduli.is_empty();
    let positive = if moduli.is_empty() {
        PositivePart::Trivial
    } else {
        let reference = &moduli[0];
        let mut log_ratios: Vec<BigRational> = vec![BigRational::one()];
        let mut dense = false;
        for m in &moduli[1..] {
            if m.value == reference.value {
                log_ratios.push(BigRational::one());
                continue;
            }
            match multiplicative_relation(&reference.value, &m.value, bound) {
                // ref^p = mu^q means log mu = (p/q) log ref
                Some((p, q)) => log_ratios.push(BigRational::new(BigInt::from(p), BigInt::from(q))),
                None => {
                    dense = true;
                    break;
                }
            }
        }
        if dense {
            PositivePart::Dense
        } else {
            // combined group of logs = g * Z * log(reference)
            let g = log_ratios
                .iter()
                .skip(1)
                .fold(BigRational::one(), |acc, r| gcd_rational(&acc, r));
            let base_exact = exact_rational_root(&reference.value, &g);
            let base_approx = match &base_exact {
                Some(b) => b.approx_f64(64),
                None => reference
                    .value
                    .approx_f64(64)
                    .powf(g.to_f64().unwrap_or(1.0)),
            };
            PositivePart::Cyclic {
                exponents: vec![(reference.gen_index, &g * &reference.orientation)],
                base_exact,
                base_approx,
            }
        }
    };

    ScaleSet {
        positive,
        contains_negative,
        contains_zero,
        certification_bound: bound,
    }
}

/// Affine subspace `base + span(basis)` with an exactly independent basis.
#[derive(Clone, Debug)]
pub struct AffineSubspace {
    pub base: Vector,
    pub basis: Vec<Vector>,
}

impl AffineSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    pub fn contains(&self, x: &Vector) -> bool {
        // the basis is independent, so full rank means the whole space
        self.is_full() || linalg::in_span(&self.basis, &(x.clone() - self.base.clone()))
    }

    pub fn direction_in_span(&self, d: &Vector) -> bool {
        self.is_full() || linalg::in_span(&self.basis, d)
    }

    /// Same point set: equal spans and bases differing by a span element.
    pub fn same_set(&self, other: &AffineSubspace) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        self.contains(&other.base) && other.basis.iter().all(|d| self.direction_in_span(d))
    }

    pub fn translate(&self, by: &Vector) -> AffineSubspace {
        AffineSubspace {
            base: self.base.clone() + by.clone(),
            basis: self.basis.clone(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "base": self.base.to_json(),
            "basis": self.basis.iter().map(Vector::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Computes `E_G` by saturation: seed with the affine hull of the
/// centers of all non-symmetry generators, then close under generator
/// images (and inverse images) until the dimension stabilizes.  The
/// result is G-invariant and closed, hence contains every fixed point
/// of the group, so it carries the whole case-1 structure.
pub fn compute_eg(spec: &GroupSpec) -> Result<AffineSubspace, Error> {
    match detect_case(spec)? {
        Case::Case1 => {}
        Case::Case2 => return Err(Error::WrongCase { expected: Case::Case1 }),
    }
    let centers: Vec<Vector> = spec
        .gens()
        .iter()
        .filter(|g| !g.is_wide_symmetry())
        .map(|g| g.center().expect("non-symmetry has a center"))
        .collect();
    let base = centers[0].clone();
    let dirs: Vec<Vector> = centers[1..]
        .iter()
        .map(|c| c.clone() - base.clone())
        .collect();
    let mut basis = linalg::echelon_basis(&dirs);

    let maps: Vec<AffineMap> = spec
        .gens()
        .iter()
        .flat_map(|g| [g.clone(), g.invert()])
        .collect();
    for _round in 0..=spec.dim() {
        let mut changed = false;
        for g in &maps {
            let mut points = vec![base.clone()];
            for b in &basis {
                points.push(base.clone() + b.clone());
            }
            for p in points {
                let d = g.apply(&p) - base.clone();
                if !linalg::in_span(&basis, &d) {
                    let mut extended = basis.clone();
                    extended.push(d);
                    basis = linalg::echelon_basis(&extended);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(AffineSubspace { base, basis })
}

/// Additive generators of `H_G` in case 2, plus an anchor in
/// `delta_G`: translation offsets, pairwise differences of symmetry
/// offsets, and the offset of any strict symmetry generator.
pub fn compute_hg_generators(spec: &GroupSpec) -> Result<(Vec<Vector>, Vector), Error> {
    match detect_case(spec)? {
        Case::Case2 => {}
        Case::Case1 => return Err(Error::WrongCase { expected: Case::Case2 }),
    }
    let mut generators: Vec<Vector> = Vec::new();
    let mut symmetry_offsets: Vec<Vector> = Vec::new();
    for g in spec.gens() {
        match g.kind() {
            Kind::Translation => {
                if !g.offset().is_zero() {
                    generators.push(g.offset().clone());
                }
            }
            Kind::Symmetry => symmetry_offsets.push(g.offset().clone()),
            Kind::Homothety => unreachable!("case 2 has symmetry generators only"),
        }
    }
    for i in 0..symmetry_offsets.len() {
        for j in (i + 1)..symmetry_offsets.len() {
            let d = symmetry_offsets[i].clone() - symmetry_offsets[j].clone();
            if !d.is_zero() {
                generators.push(d);
            }
        }
    }
    // a non-abelian subgroup of the symmetries has a strict symmetry
    // among its generators (translations alone commute)
    let anchor = symmetry_offsets
        .first()
        .cloned()
        .expect("non-abelian case-2 spec has a symmetry generator");
    Ok((generators, anchor))
}
