//! Group spec files and the aggregate analysis report.

use serde_json::Value;

use crate::affine::{AffineMap, Vector};
use crate::closure::{predicate_case2_density, predicate_dense_orbit, predicate_structure, Params};
use crate::invariants::{
    check_nonabelian, compute_eg, compute_hg_generators, detect_case, scale_set, Case, GroupSpec,
};
use crate::lattice::additive_closure;
use crate::scalar::Scalar;
use crate::Error;

/// Parses a group spec from its JSON form:
/// `{"dim": n, "generators": [{"ratio": s, "offset": [..]} | {"ratio": s, "center": [..]}]}`.
pub fn parse_spec(value: &Value) -> Result<GroupSpec, Error> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::InvalidSpec("spec must be a JSON object".into()))?;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidSpec("missing positive integer field 'dim'".into()))?
        as usize;
    let gens_json = obj
        .get("generators")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidSpec("missing array field 'generators'".into()))?;
    let mut gens = Vec::with_capacity(gens_json.len());
    for (i, g) in gens_json.iter().enumerate() {
        gens.push(parse_generator(g).map_err(|e| match e {
            Error::InvalidSpec(msg) => Error::InvalidSpec(format!("generator {i}: {msg}")),
            other => other,
        })?);
    }
    GroupSpec::new(dim, gens)
}

fn parse_generator(value: &Value) -> Result<AffineMap, Error> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::InvalidSpec("generator must be a JSON object".into()))?;
    let ratio = match obj.get("ratio") {
        Some(r) => Scalar::from_json(r)?,
        None => Scalar::one(),
    };
    if ratio.is_zero() {
        return Err(Error::InvalidSpec("ratio must be nonzero".into()));
    }
    match (obj.get("offset"), obj.get("center")) {
        (Some(_), Some(_)) => Err(Error::InvalidSpec(
            "give either 'offset' or 'center', not both".into(),
        )),
        (Some(o), None) => AffineMap::new(ratio, Vector::from_json(o)?),
        (None, Some(c)) => {
            if ratio.is_one() {
                return Err(Error::InvalidSpec(
                    "a translation has no center; use 'offset'".into(),
                ));
            }
            AffineMap::from_center(Vector::from_json(c)?, ratio)
        }
        (None, None) => Err(Error::InvalidSpec("missing 'offset' or 'center'".into())),
    }
}

/// Spec back to JSON in offset form (the canonical round-trip form).
pub fn spec_to_json(spec: &GroupSpec) -> Value {
    serde_json::json!({
        "dim": spec.dim(),
        "generators": spec.gens().iter().map(|g| serde_json::json!({
            "ratio": g.ratio().to_json(),
            "offset": g.offset().to_json(),
        })).collect::<Vec<_>>(),
    })
}

/// Full analysis report: case split, ratio closure, invariant flat or
/// translation subgroup, and the density/structure predicates.
pub fn analysis_report(spec: &GroupSpec, params: &Params) -> Result<Value, Error> {
    if !check_nonabelian(spec) {
        return Err(Error::AbelianGroup);
    }
    let case = detect_case(spec)?;
    let scales = scale_set(spec, params.relation_bound);
    let structure = predicate_structure(spec)?;
    let mut report = serde_json::json!({
        "nonabelian": true,
        "case": match case { Case::Case1 => 1, Case::Case2 => 2 },
        "scale_set": scales.to_json(),
        "E_G": Value::Null,
        "H_G": Value::Null,
        "predicates": { "structure": structure.to_json() },
    });
    match case {
        Case::Case1 => {
            let eg = compute_eg(spec)?;
            let verdict = predicate_dense_orbit(spec)?;
            report["E_G"] = serde_json::json!({
                "dim": eg.dim(),
                "flat": eg.to_json(),
            });
            report["predicates"]["dense_orbit"] = serde_json::json!({
                "dense": verdict.dense,
                "reason": verdict.reason,
            });
        }
        Case::Case2 => {
            let (gens, anchor) = compute_hg_generators(spec)?;
            let closure = additive_closure(&gens, params.eps, params.precision_bits);
            let dense = predicate_case2_density(spec)?;
            report["H_G"] = serde_json::json!({
                "generators": gens.iter().map(Vector::to_json).collect::<Vec<_>>(),
                "anchor": anchor.to_json(),
                "closure": closure.to_json(),
            });
            report["predicates"]["dense_orbit"] = serde_json::json!({ "dense": dense });
        }
    }
    Ok(report)
}
