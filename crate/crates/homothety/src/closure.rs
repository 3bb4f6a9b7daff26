//! Symbolic orbit closures and the density / structure predicates.
//!
//! The orbit closure of a point under a non-abelian group of scalar
//! affine maps takes one of three shapes: the invariant flat `E_G`
//! itself, a scaled family `Λ̄_G(x − a) + E_G`, or a symmetric pair of
//! translates of the closed translation subgroup.

use crate::affine::Vector;
use crate::invariants::{
    compute_eg, compute_hg_generators, detect_case, scale_set, AffineSubspace, Case, GroupSpec,
    PositivePart, ScaleSet,
};
use crate::lattice::{additive_closure, AdditiveClosure};
use crate::scalar::Scalar;
use crate::Error;

/// Tunables shared by the closure computations.
#[derive(Clone, Copy, Debug)]
pub struct Params {
    /// Exponent bound for multiplicative relation certification.
    pub relation_bound: u32,
    /// Short-vector threshold for additive closures.
    pub eps: f64,
    /// Internal precision for lattice reduction.
    pub precision_bits: u32,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            relation_bound: 64,
            eps: 1e-9,
            precision_bits: 128,
        }
    }
}

/// Symbolic description of one orbit closure.
#[derive(Clone, Debug)]
pub enum OrbitClosureDesc {
    /// The closure is the invariant flat itself (`x` lies on it).
    AffineFlat { flat: AffineSubspace },
    /// The set `Λ̄_G(x − a) + E_G` for `x` off the invariant flat.
    ScaledFamily {
        scale: ScaleSet,
        anchor: Vector,
        direction: Vector,
        flat: AffineSubspace,
    },
    /// The pair `(x + H̄_G) ∪ (−x + a + H̄_G)`.
    SymmetricPair {
        point: Vector,
        anchor: Vector,
        closure: AdditiveClosure,
    },
}

impl OrbitClosureDesc {
    /// Exact membership of a point with exact coordinates; `tol` only
    /// enters through dense scale sets that are certified, not proved.
    pub fn member_exact(&self, y: &Vector, tol: f64) -> bool {
        match self {
            OrbitClosureDesc::AffineFlat { flat } => flat.contains(y),
            OrbitClosureDesc::ScaledFamily {
                scale,
                anchor,
                direction,
                flat,
            } => {
                let mut cols = vec![direction.clone()];
                cols.extend(flat.basis.iter().cloned());
                let target = y.clone() - anchor.clone();
                match crate::linalg::solve_columns(&cols, &target) {
                    None => false,
                    Some(coeffs) => scale.contains_exact(&coeffs[0], tol),
                }
            }
            OrbitClosureDesc::SymmetricPair {
                point,
                anchor,
                closure,
            } => {
                closure.member_exact(&(y.clone() - point.clone()))
                    || closure.member_exact(&(y.clone() + point.clone() - anchor.clone()))
            }
        }
    }

    /// Floating membership within `tol`.
    pub fn member_f64(&self, y: &[f64], tol: f64) -> bool {
        match self {
            OrbitClosureDesc::AffineFlat { flat } => {
                flat_distance_f64(flat, y).map_or(false, |d| d <= tol)
            }
            OrbitClosureDesc::ScaledFamily {
                scale,
                anchor,
                direction,
                flat,
            } => {
                let mut cols = vec![direction.to_f64()];
                cols.extend(flat.basis.iter().map(Vector::to_f64));
                let a = anchor.to_f64();
                let target: Vec<f64> = y.iter().zip(&a).map(|(yi, ai)| yi - ai).collect();
                let Some(coeffs) = crate::lattice::least_squares(&cols, &target) else {
                    return false;
                };
                let mut residual = target.clone();
                for (c, col) in coeffs.iter().zip(&cols) {
                    for (r, v) in residual.iter_mut().zip(col) {
                        *r -= c * v;
                    }
                }
                let dist: f64 = residual.iter().map(|r| r * r).sum::<f64>().sqrt();
                if dist > tol {
                    return false;
                }
                let s = coeffs[0];
                // the closure of a dense subgroup of (0, inf) is [0, inf)
                if let PositivePart::Dense = scale.positive {
                    if !scale.contains_negative {
                        return s >= -tol;
                    }
                }
                scale.contains_f64(s, tol)
            }
            OrbitClosureDesc::SymmetricPair {
                point,
                anchor,
                closure,
            } => {
                let x = point.to_f64();
                let a = anchor.to_f64();
                let first: Vec<f64> = y.iter().zip(&x).map(|(yi, xi)| yi - xi).collect();
                let second: Vec<f64> = y
                    .iter()
                    .zip(&x)
                    .zip(&a)
                    .map(|((yi, xi), ai)| yi + xi - ai)
                    .collect();
                closure.member_f64(&first, tol) || closure.member_f64(&second, tol)
            }
        }
    }

    /// Number of connected components of the closure, where countable
    /// unions of parallel flats count per-sheet only for the symmetric
    /// pair (the case the structure report needs).
    pub fn component_count(&self) -> usize {
        match self {
            OrbitClosureDesc::AffineFlat { .. } => 1,
            OrbitClosureDesc::ScaledFamily { .. } => 1,
            OrbitClosureDesc::SymmetricPair {
                point,
                anchor,
                closure,
            } => {
                // the sheets coincide iff 2x - a lies in the closed subgroup
                let two_x = point.scale(&Scalar::from_integer(2));
                if closure.member_exact(&(two_x - anchor.clone())) {
                    1
                } else {
                    2
                }
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            OrbitClosureDesc::AffineFlat { flat } => serde_json::json!({
                "variant": "flat",
                "flat": flat.to_json(),
            }),
            OrbitClosureDesc::ScaledFamily {
                scale,
                anchor,
                direction,
                flat,
            } => serde_json::json!({
                "variant": "scaled_family",
                "scale": scale.to_json(),
                "anchor": anchor.to_json(),
                "direction": direction.to_json(),
                "flat": flat.to_json(),
            }),
            OrbitClosureDesc::SymmetricPair {
                point,
                anchor,
                closure,
            } => serde_json::json!({
                "variant": "symmetric_pair",
                "point": point.to_json(),
                "anchor": anchor.to_json(),
                "closure": closure.to_json(),
                "components": self.component_count(),
            }),
        }
    }
}

/// Distance from `y` to the flat, or `None` in degenerate numerics.
fn flat_distance_f64(flat: &AffineSubspace, y: &[f64]) -> Option<f64> {
    let base = flat.base.to_f64();
    let target: Vec<f64> = y.iter().zip(&base).map(|(yi, bi)| yi - bi).collect();
    if flat.basis.is_empty() {
        return Some(target.iter().map(|r| r * r).sum::<f64>().sqrt());
    }
    let cols: Vec<Vec<f64>> = flat.basis.iter().map(Vector::to_f64).collect();
    let coeffs = crate::lattice::least_squares(&cols, &target)?;
    let mut residual = target;
    for (c, col) in coeffs.iter().zip(&cols) {
        for (r, v) in residual.iter_mut().zip(col) {
            *r -= c * v;
        }
    }
    Some(residual.iter().map(|r| r * r).sum::<f64>().sqrt())
}

/// Orbit closure of `x` with the given tunables.
pub fn orbit_closure_with(
    spec: &GroupSpec,
    x: &Vector,
    params: &Params,
) -> Result<OrbitClosureDesc, Error> {
    if x.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: x.dim(),
        });
    }
    match detect_case(spec)? {
        Case::Case1 => {
            let eg = compute_eg(spec)?;
            if eg.contains(x) {
                Ok(OrbitClosureDesc::AffineFlat { flat: eg })
            } else {
                let direction = x.clone() - eg.base.clone();
                Ok(OrbitClosureDesc::ScaledFamily {
                    scale: scale_set(spec, params.relation_bound),
                    anchor: eg.base.clone(),
                    direction,
                    flat: eg,
                })
            }
        }
        Case::Case2 => {
            let (gens, anchor) = compute_hg_generators(spec)?;
            let closure = additive_closure(&gens, params.eps, params.precision_bits);
            Ok(OrbitClosureDesc::SymmetricPair {
                point: x.clone(),
                anchor,
                closure,
            })
        }
    }
}

/// Orbit closure of `x` with default tunables.
pub fn orbit_closure(spec: &GroupSpec, x: &Vector) -> Result<OrbitClosureDesc, Error> {
    orbit_closure_with(spec, x, &Params::default())
}

/// Outcome of the dense-orbit test off the invariant flat.
#[derive(Clone, Debug)]
pub struct DensityVerdict {
    /// True iff some (equivalently every) orbit off `E_G` is dense in
    /// R^n; when `E_G` is already all of R^n every orbit is dense.
    pub dense: bool,
    pub reason: String,
}

/// Dense-orbit criterion in case 1: the flat fills the space, or has
/// codimension one with ratio closure all of R.  One dense orbit off
/// the flat is equivalent to all of them being dense.
pub fn predicate_dense_orbit(spec: &GroupSpec) -> Result<DensityVerdict, Error> {
    match detect_case(spec)? {
        Case::Case1 => {}
        Case::Case2 => return Err(Error::WrongCase { expected: Case::Case1 }),
    }
    let eg = compute_eg(spec)?;
    let n = spec.dim();
    if eg.is_full() {
        return Ok(DensityVerdict {
            dense: true,
            reason: format!("the invariant flat already fills R^{n}"),
        });
    }
    if eg.dim() + 1 == n {
        let set = scale_set(spec, Params::default().relation_bound);
        if set.closure_is_all_reals() {
            return Ok(DensityVerdict {
                dense: true,
                reason: format!(
                    "the invariant flat has codimension 1 and the ratio closure is all of R \
                     (certified to exponent {})",
                    set.certification_bound
                ),
            });
        }
        return Ok(DensityVerdict {
            dense: false,
            reason: "the invariant flat has codimension 1 but the ratio closure misses part of R"
                .into(),
        });
    }
    Ok(DensityVerdict {
        dense: false,
        reason: format!(
            "the invariant flat has dimension {} < {}; orbits are dense only in flats of dimension {}",
            eg.dim(),
            n,
            eg.dim() + 1
        ),
    })
}

/// Case-2 density: every orbit is dense iff the closed translation
/// subgroup is all of R^n (equivalently the orbit of 0 is dense).
pub fn predicate_case2_density(spec: &GroupSpec) -> Result<bool, Error> {
    match detect_case(spec)? {
        Case::Case2 => {}
        Case::Case1 => return Err(Error::WrongCase { expected: Case::Case2 }),
    }
    let (gens, _) = compute_hg_generators(spec)?;
    let p = Params::default();
    let closure = additive_closure(&gens, p.eps, p.precision_bits);
    Ok(closure.is_full_space(spec.dim()))
}

/// Dimension-one dichotomy entry of the structure report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineDichotomy {
    AllDense,
    AllClosedDiscrete,
}

/// Qualitative structure flags for the whole action.
#[derive(Clone, Debug)]
pub struct StructureReport {
    pub case: Case,
    /// Case 1: every orbit off the invariant flat is minimal there.
    /// Case 2: every orbit is minimal outright.
    pub orbits_minimal: bool,
    /// Case 1 only: the invariant flat is a minimal set contained in
    /// every orbit closure.
    pub flat_is_unique_minimal: bool,
    pub no_periodic_orbits: bool,
    /// No orbit of a finitely generated (hence countable) group is
    /// closed in case 1.
    pub no_closed_orbits: bool,
    /// Present only in ambient dimension one.
    pub line_dichotomy: Option<LineDichotomy>,
}

impl StructureReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "case": match self.case { Case::Case1 => 1, Case::Case2 => 2 },
            "orbits_minimal": self.orbits_minimal,
            "flat_is_unique_minimal": self.flat_is_unique_minimal,
            "no_periodic_orbits": self.no_periodic_orbits,
            "no_closed_orbits": self.no_closed_orbits,
            "line_dichotomy": self.line_dichotomy.map(|d| match d {
                LineDichotomy::AllDense => "all_orbits_dense",
                LineDichotomy::AllClosedDiscrete => "all_orbits_closed_and_discrete",
            }),
        })
    }
}

pub fn predicate_structure(spec: &GroupSpec) -> Result<StructureReport, Error> {
    let case = detect_case(spec)?;
    match case {
        Case::Case1 => {
            let line_dichotomy = if spec.dim() == 1 {
                // in dimension one the invariant flat saturates to R for
                // every non-abelian case-1 group, so all orbits are dense
                Some(LineDichotomy::AllDense)
            } else {
                None
            };
            Ok(StructureReport {
                case,
                orbits_minimal: true,
                flat_is_unique_minimal: true,
                no_periodic_orbits: true,
                no_closed_orbits: true,
                line_dichotomy,
            })
        }
        Case::Case2 => {
            let line_dichotomy = if spec.dim() == 1 {
                let dense = predicate_case2_density(spec)?;
                Some(if dense {
                    LineDichotomy::AllDense
                } else {
                    LineDichotomy::AllClosedDiscrete
                })
            } else {
                None
            };
            Ok(StructureReport {
                case,
                orbits_minimal: true,
                flat_is_unique_minimal: false,
                no_periodic_orbits: false,
                no_closed_orbits: false,
                line_dichotomy,
            })
        }
    }
}
