//! Acceptance gate: end-to-end reproductions of the worked scenarios,
//! the constructive density witness, the classification predicates, and
//! compact reruns of the exact property suites.  Each test prints one
//! pass/fail line.

use std::collections::HashSet;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use homothety::affine::{word_eval, AffineMap, Vector, Word};
use homothety::closure::{
    orbit_closure, predicate_dense_orbit, predicate_structure, LineDichotomy, OrbitClosureDesc,
};
use homothety::invariants::{
    check_nonabelian, compute_eg, compute_hg_generators, detect_case, scale_set, Case, GroupSpec,
    PositivePart,
};
use homothety::lattice::additive_closure;
use homothety::linalg;
use homothety::oracle::{
    brute_force_translation_subgroup, dense_scalar_witness, enumerate_orbit, verify_containment,
    verify_covering, witness_word, Region,
};
use homothety::scalar::Scalar;

fn s(n: i64) -> Scalar {
    Scalar::from_integer(n)
}

fn rat(num: i64, den: i64) -> Scalar {
    Scalar::from_ratio(num, den)
}

fn v(coords: Vec<Scalar>) -> Vector {
    Vector(coords)
}

fn report(criterion: usize, name: &str, pass: bool, start: Instant) {
    let line = format!(
        "criterion {criterion} ({name}): {} [{:.2}s]",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    println!("{line}");
    assert!(pass, "{line}");
}

/// Three contracting homotheties with irrational centers spanning the
/// plane: the invariant flat is all of R^2 and every orbit is dense.
#[test]
fn criterion_1_contracting_plane_action() {
    let start = Instant::now();
    let half = rat(1, 2);
    let spec = GroupSpec::new(
        2,
        vec![
            AffineMap::from_center(v(vec![Scalar::sqrt_of(2), s(0)]), half.clone()).unwrap(),
            AffineMap::from_center(v(vec![s(0), s(1)]), half.clone()).unwrap(),
            AffineMap::from_center(v(vec![-Scalar::sqrt_of(3), -Scalar::sqrt_of(2)]), half)
                .unwrap(),
        ],
    )
    .unwrap();
    let mut pass = detect_case(&spec).unwrap() == Case::Case1;
    let eg = compute_eg(&spec).unwrap();
    pass &= eg.dim() == 2 && eg.is_full();
    pass &= predicate_dense_orbit(&spec).unwrap().dense;

    let x = Vector::zero(2);
    let desc = orbit_closure(&spec, &x).unwrap();
    let enumeration = enumerate_orbit(&spec, &x, 10, 200_000);
    let containment = verify_containment(&enumeration, &desc, 1e-9);
    pass &= containment.pass && containment.containment_violations.is_empty();
    let region = Region::parse("-2,2;-2,2").unwrap();
    let covering = verify_covering(&enumeration, &desc, &region, 0.25, 0.125);
    pass &= covering.pass && covering.covering_gaps.is_empty();
    report(1, "contracting plane action is dense", pass, start);
}

/// A single expansion with a full translation basis fills the plane;
/// verified from random rational starting points.
#[test]
fn criterion_2_expansion_with_translation_basis() {
    let start = Instant::now();
    let e1 = v(vec![s(1), s(0)]);
    let e2 = v(vec![s(0), s(1)]);
    let specs = [
        // expansion centered off the translation lattice
        GroupSpec::new(
            2,
            vec![
                AffineMap::from_center(v(vec![s(1), s(1)]), s(2)).unwrap(),
                AffineMap::translation(e1.clone()),
                AffineMap::translation(e2.clone()),
            ],
        )
        .unwrap(),
        // doubling about the origin
        GroupSpec::new(
            2,
            vec![
                AffineMap::translation(e1),
                AffineMap::translation(e2),
                AffineMap::new(s(2), Vector::zero(2)).unwrap(),
            ],
        )
        .unwrap(),
    ];
    let mut rng = StdRng::seed_from_u64(0x2002);
    let mut pass = true;
    let region = Region::parse("-2,2;-2,2").unwrap();
    for spec in &specs {
        let eg = compute_eg(spec).unwrap();
        pass &= eg.is_full();
        for _ in 0..3 {
            let x = v(vec![
                rat(rng.gen_range(-8..=8), rng.gen_range(1..=5)),
                rat(rng.gen_range(-8..=8), rng.gen_range(1..=5)),
            ]);
            let desc = orbit_closure(spec, &x).unwrap();
            let e = enumerate_orbit(spec, &x, 10, 200_000);
            let containment = verify_containment(&e, &desc, 1e-9);
            let covering = verify_covering(&e, &desc, &region, 0.25, 0.125);
            pass &= containment.pass && covering.pass;
        }
    }
    report(2, "expansion plus translation basis", pass, start);
}

/// Symmetric-pair scenario on the plane: translations along an axis by
/// 1 and sqrt(2) plus a point symmetry.  The translation subgroup
/// closes up to the axis; orbits are one line on it, two lines off it.
#[test]
fn criterion_3_symmetric_pair_lines() {
    let start = Instant::now();
    let a = v(vec![s(1), s(0)]);
    let spec = GroupSpec::new(
        2,
        vec![
            AffineMap::translation(a.clone()),
            AffineMap::new(s(-1), a.clone()).unwrap(),
            AffineMap::translation(a.scale(&Scalar::sqrt_of(2))),
        ],
    )
    .unwrap();
    let mut pass = true;

    // derived generators match the brute-force subgroup, both ways
    let (gens, _) = compute_hg_generators(&spec).unwrap();
    let brute = brute_force_translation_subgroup(&spec, 6).unwrap();
    let brute_set: HashSet<Vector> = brute.iter().cloned().collect();
    for g in &gens {
        pass &= brute_set.contains(g);
    }
    for p in &brute {
        // every element is k1*a + k2*sqrt(2)*a with integer k, |k| <= 8
        pass &= p.0[1].is_zero();
        for (radicand, coef) in p.0[0].terms() {
            pass &= radicand == 1 || radicand == 2;
            pass &= coef.is_integer() && coef.numer().magnitude() <= &num::BigUint::from(8u32);
        }
    }

    // the closed subgroup is the axis line
    let closure = additive_closure(&gens, 1e-9, 128);
    pass &= closure.dense_dim() == 1
        && closure.lattice_part.is_empty()
        && closure.dense_part[0].0[1].is_zero();

    // one line through the fixed axis, two lines elsewhere
    let on = orbit_closure(&spec, &Vector::zero(2)).unwrap();
    let off = orbit_closure(&spec, &v(vec![s(0), s(1)])).unwrap();
    pass &= on.component_count() == 1 && off.component_count() == 2;

    // exact containment of the enumerated orbit in the two-line set
    let e = enumerate_orbit(&spec, &v(vec![s(0), s(1)]), 8, 200_000);
    let containment = verify_containment(&e, &off, 0.0);
    pass &= containment.pass;
    report(3, "symmetric pair of lines", pass, start);
}

/// The constructive witness lands strictly inside 100 random intervals,
/// and the explicit word realizes it as an orbit point.
#[test]
fn criterion_4_interval_witness() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x2004);
    let two = s(2);
    let mut pass = true;
    let mut realized = 0;
    let a = v(vec![s(3)]);
    let f = AffineMap::from_center(a.clone(), two.clone()).unwrap();
    let h = AffineMap::new(two.clone(), Vector::zero(1)).unwrap();
    for i in 0..100 {
        let lo = rng.gen_range(-10.0..8.0);
        let hi = lo + rng.gen_range(0.01..2.0);
        let (p, q, value) = dense_scalar_witness(&two, lo, hi);
        pass &= p < 0;
        let approx = value.approx_f64(64);
        pass &= lo < approx && approx < hi;
        // exact strictness against the exact interval endpoints
        let lo_s = Scalar::from_rational(num::BigRational::from_float(lo).unwrap());
        let hi_s = Scalar::from_rational(num::BigRational::from_float(hi).unwrap());
        pass &= (value.clone() - lo_s).sign() > 0 && (hi_s - value.clone()).sign() > 0;
        if i < 10 {
            let map = word_eval(&[f.clone(), h.clone()], &witness_word(p, q)).unwrap();
            pass &= map.apply(&a) == a.scale(&value) + a.clone();
            realized += 1;
        }
    }
    pass &= realized == 10;
    report(4, "interval witness construction", pass, start);
}

/// Ratio classification: incommensurable pair with a sign gives all of
/// R, a power relation collapses to one base, and symmetry-only ratios
/// route to the symmetric case.
#[test]
fn criterion_5_ratio_classification() {
    let start = Instant::now();
    let mut pass = true;

    let spec = GroupSpec::new(
        1,
        vec![
            AffineMap::from_center(v(vec![s(0)]), s(-2)).unwrap(),
            AffineMap::from_center(v(vec![s(1)]), s(3)).unwrap(),
        ],
    )
    .unwrap();
    let set = scale_set(&spec, 64);
    pass &= set.closure_is_all_reals() && set.certification_bound == 64;

    let spec = GroupSpec::new(
        1,
        vec![
            AffineMap::from_center(v(vec![s(0)]), s(2)).unwrap(),
            AffineMap::from_center(v(vec![s(1)]), s(4)).unwrap(),
        ],
    )
    .unwrap();
    let set = scale_set(&spec, 64);
    pass &= matches!(
        &set.positive,
        PositivePart::Cyclic { base_exact: Some(b), .. } if b == &s(2)
    );

    let spec = GroupSpec::new(
        1,
        vec![
            AffineMap::new(s(-1), v(vec![s(0)])).unwrap(),
            AffineMap::translation(v(vec![s(1)])),
        ],
    )
    .unwrap();
    pass &= detect_case(&spec).unwrap() == Case::Case2;
    report(5, "ratio group classification", pass, start);
}

/// Ratios 2 and 3 centered on the x-axis: the closure of any point
/// above the axis is the closed upper half plane.
#[test]
fn criterion_6_half_plane() {
    let start = Instant::now();
    let spec = GroupSpec::new(
        2,
        vec![
            AffineMap::from_center(Vector::zero(2), s(2)).unwrap(),
            AffineMap::from_center(v(vec![s(1), s(0)]), s(3)).unwrap(),
        ],
    )
    .unwrap();
    let x = v(vec![s(0), s(1)]);
    let mut pass = true;
    let e = enumerate_orbit(&spec, &x, 12, 200_000);
    for p in &e.points {
        pass &= p.0[1].sign() > 0;
    }
    let desc = orbit_closure(&spec, &x).unwrap();
    let region = Region::parse("-1,1;0.1,1").unwrap();
    let covering = verify_covering(&e, &desc, &region, 0.2, 0.1);
    pass &= covering.pass;
    pass &= !desc.member_f64(&[0.0, -0.1], 1e-9);
    report(6, "closed upper half plane", pass, start);
}

/// Dimension-one dichotomy: mixed ratios give dense orbits; a unit
/// translation with the point symmetry gives closed discrete orbits.
#[test]
fn criterion_7_line_dichotomy() {
    let start = Instant::now();
    let mut pass = true;

    let dense_spec = GroupSpec::new(
        1,
        vec![
            AffineMap::new(s(2), Vector::zero(1)).unwrap(),
            AffineMap::new(s(3), v(vec![s(1)])).unwrap(),
        ],
    )
    .unwrap();
    pass &= predicate_structure(&dense_spec).unwrap().line_dichotomy
        == Some(LineDichotomy::AllDense);
    let x = Vector::zero(1);
    let desc = orbit_closure(&dense_spec, &x).unwrap();
    pass &= matches!(&desc, OrbitClosureDesc::AffineFlat { flat } if flat.is_full());
    let e = enumerate_orbit(&dense_spec, &x, 14, 200_000);
    let region = Region::parse("-5,5").unwrap();
    let covering = verify_covering(&e, &desc, &region, 0.1, 0.05);
    pass &= covering.pass;

    let discrete_spec = GroupSpec::new(
        1,
        vec![
            AffineMap::translation(v(vec![s(1)])),
            AffineMap::new(s(-1), Vector::zero(1)).unwrap(),
        ],
    )
    .unwrap();
    pass &= predicate_structure(&discrete_spec).unwrap().line_dichotomy
        == Some(LineDichotomy::AllClosedDiscrete);
    let (gens, _) = compute_hg_generators(&discrete_spec).unwrap();
    let closure = additive_closure(&gens, 1e-9, 128);
    pass &= closure.is_discrete() && closure.lattice_part == vec![v(vec![s(1)])];
    let desc = orbit_closure(&discrete_spec, &x).unwrap();
    let e = enumerate_orbit(&discrete_spec, &x, 8, 200_000);
    let covering = verify_covering(&e, &desc, &region, 0.1, 0.05);
    pass &= covering.pass;
    report(7, "line dichotomy", pass, start);
}

/// Compact rerun of the exact identity suites (the full versions live
/// in the properties test file).
#[test]
fn criterion_8_property_suites() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x2008);
    let mut pass = true;

    let random_ratio = |rng: &mut StdRng| -> Scalar {
        let pool = [s(2), s(3), s(-2), rat(1, 2), rat(-1, 3)];
        pool[rng.gen_range(0..pool.len())].clone()
    };
    let random_vec = |rng: &mut StdRng, dim: usize| -> Vector {
        Vector((0..dim).map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect())
    };

    // commutation criterion
    for _ in 0..1000 {
        let dim = rng.gen_range(1..=3);
        let a = random_vec(&mut rng, dim);
        let b = if rng.gen_range(0..3) == 0 { a.clone() } else { random_vec(&mut rng, dim) };
        let alpha = if rng.gen_range(0..4) == 0 { Scalar::one() } else { random_ratio(&mut rng) };
        let beta = if rng.gen_range(0..4) == 0 { Scalar::one() } else { random_ratio(&mut rng) };
        let f = AffineMap::from_center(a.clone(), alpha.clone()).unwrap();
        let g = AffineMap::from_center(b.clone(), beta.clone()).unwrap();
        pass &= (f.compose(&g) == g.compose(&f))
            == (a == b || alpha.is_one() || beta.is_one());
    }

    // word closed form vs fold
    for _ in 0..1000 {
        let dim = rng.gen_range(1..=3);
        let count = rng.gen_range(1..=4);
        let gens: Vec<AffineMap> = (0..count)
            .map(|_| AffineMap::from_center(random_vec(&mut rng, dim), random_ratio(&mut rng)).unwrap())
            .collect();
        let letters: Vec<(usize, i64)> = (0..rng.gen_range(1..=5))
            .map(|_| {
                let e = if rng.gen() { rng.gen_range(1..=3) } else { -rng.gen_range(1..=3) };
                (rng.gen_range(0..count), e)
            })
            .collect();
        let folded = word_eval(&gens, &Word::new(letters.clone())).unwrap();
        let mut ratio = Scalar::one();
        let mut prefix = Vec::new();
        for &(i, e) in &letters {
            ratio = &ratio * &gens[i].ratio().pow(e).unwrap();
            prefix.push(ratio.clone());
        }
        let centers: Vec<Vector> = letters.iter().map(|&(i, _)| gens[i].center().unwrap()).collect();
        let mut offset = centers[0].clone();
        for k in 0..letters.len() {
            offset = offset - centers[k].scale(&prefix[k]);
            if k + 1 < letters.len() {
                offset = offset + centers[k + 1].scale(&prefix[k]);
            }
        }
        pass &= folded.ratio() == &ratio && folded.offset() == &offset;
    }

    // flat invariance and translation conjugation
    for _ in 0..200 {
        let dim = rng.gen_range(1..=3);
        let spec = loop {
            let gens: Vec<AffineMap> = (0..rng.gen_range(2..=3))
                .map(|_| AffineMap::from_center(random_vec(&mut rng, dim), random_ratio(&mut rng)).unwrap())
                .collect();
            let spec = GroupSpec::new(dim, gens).unwrap();
            if check_nonabelian(&spec) {
                break spec;
            }
        };
        let eg = compute_eg(&spec).unwrap();
        for g in spec.gens() {
            pass &= eg.contains(&g.apply(&eg.base));
        }
        let shift = random_vec(&mut rng, dim);
        let t = AffineMap::translation(shift.clone());
        let conj: Vec<AffineMap> = spec.gens().iter().map(|g| t.invert().compose(&g.compose(&t))).collect();
        let conj_eg = compute_eg(&GroupSpec::new(dim, conj).unwrap()).unwrap();
        pass &= conj_eg.same_set(&eg.translate(&-shift));
    }

    // closure agreement along an orbit, 100 membership samples
    let spec = GroupSpec::new(
        2,
        vec![
            AffineMap::from_center(Vector::zero(2), s(2)).unwrap(),
            AffineMap::from_center(v(vec![s(1), s(0)]), s(3)).unwrap(),
        ],
    )
    .unwrap();
    let x = v(vec![rat(1, 2), s(1)]);
    let desc_x = orbit_closure(&spec, &x).unwrap();
    let y = spec.gens()[0].compose(&spec.gens()[1].invert()).apply(&x);
    let desc_y = orbit_closure(&spec, &y).unwrap();
    for _ in 0..100 {
        let p = random_vec(&mut rng, 2);
        pass &= desc_x.member_exact(&p, 1e-9) == desc_y.member_exact(&p, 1e-9);
    }

    // word equivariance for 100 words of length <= 4
    let eg = compute_eg(&spec).unwrap();
    let x = v(vec![rat(1, 2), s(2)]);
    let yy = v(vec![s(-3), rat(1, 3)]);
    let mut cols = vec![x.clone()];
    cols.extend(eg.basis.iter().cloned());
    for _ in 0..100 {
        let letters: Vec<(usize, i64)> = (0..rng.gen_range(1..=4))
            .map(|_| (rng.gen_range(0..2), if rng.gen() { 1 } else { -1 }))
            .collect();
        let w = word_eval(spec.gens(), &Word::new(letters)).unwrap();
        let coeffs = linalg::solve_columns(&cols, &w.apply(&x)).unwrap();
        let mut phi = yy.scale(&coeffs[0]);
        for (c, b) in coeffs[1..].iter().zip(&eg.basis) {
            phi = phi + b.scale(c);
        }
        pass &= phi == w.apply(&yy);
    }

    report(8, "exact property suites", pass, start);
}
