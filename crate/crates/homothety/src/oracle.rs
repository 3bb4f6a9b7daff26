//! Brute-force verification: orbit enumeration, containment and
//! covering checks against symbolic closure descriptions, translation
//! subgroup enumeration, and the constructive density witness.

use std::collections::{HashMap, HashSet};
use std::io::{self, Write};
use std::time::{Duration, Instant};

use num::rational::BigRational;

use crate::affine::{AffineMap, Vector, Word};
use crate::closure::OrbitClosureDesc;
use crate::invariants::{detect_case, Case, GroupSpec};
use crate::scalar::Scalar;
use crate::Error;

/// Exact orbit points reachable by words up to the requested depth.
#[derive(Clone, Debug)]
pub struct OrbitEnumeration {
    pub points: Vec<Vector>,
    pub depth: usize,
    pub truncated: bool,
}

/// Deterministic ordering used when a level must be truncated: points
/// closest to the origin are kept, with an exact lexicographic
/// tiebreak, so the result is a function of (spec, x, depth, cap) only.
fn canonical_cmp(a: &Vector, b: &Vector) -> std::cmp::Ordering {
    let norm = |v: &Vector| v.to_f64().iter().map(|c| c * c).sum::<f64>();
    norm(a).total_cmp(&norm(b)).then_with(|| exact_lex(a, b))
}

fn exact_lex(a: &Vector, b: &Vector) -> std::cmp::Ordering {
    for (x, y) in a.0.iter().zip(&b.0) {
        let c = x.cmp_value(y);
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    std::cmp::Ordering::Equal
}

/// All points `w(x)` over words of length at most `depth` in the
/// generators and their inverses, deduplicated exactly and truncated at
/// `cap` (smallest-norm points admitted first within a level).
pub fn enumerate_orbit(spec: &GroupSpec, x: &Vector, depth: usize, cap: usize) -> OrbitEnumeration {
    let maps: Vec<AffineMap> = spec
        .gens()
        .iter()
        .flat_map(|g| [g.clone(), g.invert()])
        .collect();
    let mut seen: HashSet<Vector> = HashSet::new();
    let mut points: Vec<Vector> = Vec::new();
    let mut truncated = false;
    seen.insert(x.clone());
    points.push(x.clone());
    let mut frontier = vec![x.clone()];
    for _ in 0..depth {
        if frontier.is_empty() {
            break;
        }
        if points.len() >= cap {
            truncated = true;
            break;
        }
        let mut level: Vec<Vector> = Vec::new();
        let mut level_seen: HashSet<Vector> = HashSet::new();
        for p in &frontier {
            for m in &maps {
                let q = m.apply(p);
                if !seen.contains(&q) && level_seen.insert(q.clone()) {
                    level.push(q);
                }
            }
        }
        // cache the float sort keys; exact comparison only breaks ties
        let mut keyed: Vec<(f64, Vec<f64>, Vector)> = level
            .into_iter()
            .map(|q| {
                let coords = q.to_f64();
                let norm = coords.iter().map(|c| c * c).sum();
                (norm, coords, q)
            })
            .collect();
        keyed.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| {
                    a.1.iter()
                        .zip(&b.1)
                        .map(|(x, y)| x.total_cmp(y))
                        .find(|c| *c != std::cmp::Ordering::Equal)
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .then_with(|| exact_lex(&a.2, &b.2))
        });
        let mut admitted = Vec::new();
        for (_, _, q) in keyed {
            if points.len() >= cap {
                truncated = true;
                break;
            }
            seen.insert(q.clone());
            points.push(q.clone());
            admitted.push(q);
        }
        frontier = admitted;
    }
    OrbitEnumeration {
        points,
        depth,
        truncated,
    }
}

/// Outcome of a containment or covering check.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub depth: usize,
    pub points_generated: usize,
    /// Enumerated points outside the description, with an estimated
    /// distance to the described set.
    pub containment_violations: Vec<(Vec<f64>, f64)>,
    /// Grid points of the description not approximated by any
    /// enumerated point.
    pub covering_gaps: Vec<Vec<f64>>,
    pub elapsed: Duration,
    pub pass: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "depth": self.depth,
            "points_generated": self.points_generated,
            "containment_violations": self.containment_violations
                .iter()
                .map(|(p, d)| serde_json::json!({"point": p, "distance": d}))
                .collect::<Vec<_>>(),
            "covering_gaps": self.covering_gaps.clone(),
            "elapsed_ms": self.elapsed.as_secs_f64() * 1e3,
            "pass": self.pass,
        })
    }
}

/// Estimated distance from `y` to the described set, by bisecting the
/// membership tolerance.  Diagnostic only.
fn distance_estimate(desc: &OrbitClosureDesc, y: &[f64]) -> f64 {
    if desc.member_f64(y, 1e-12) {
        return 0.0;
    }
    let mut hi = 1e-9;
    while !desc.member_f64(y, hi) {
        hi *= 2.0;
        if hi > 1e9 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if desc.member_f64(y, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Checks that every enumerated point lies in the described closure,
/// with the exact membership test.
pub fn verify_containment(
    enumeration: &OrbitEnumeration,
    desc: &OrbitClosureDesc,
    tol: f64,
) -> VerificationReport {
    let start = Instant::now();
    let mut violations = Vec::new();
    for p in &enumeration.points {
        if !desc.member_exact(p, tol) {
            let approx = p.to_f64();
            let d = distance_estimate(desc, &approx);
            violations.push((approx, d));
        }
    }
    let pass = violations.is_empty();
    VerificationReport {
        depth: enumeration.depth,
        points_generated: enumeration.points.len(),
        containment_violations: violations,
        covering_gaps: Vec::new(),
        elapsed: start.elapsed(),
        pass,
    }
}

/// Axis-aligned box, one `(lo, hi)` interval per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct Region(pub Vec<(f64, f64)>);

impl Region {
    /// Parses `x0,x1;y0,y1;...`.
    pub fn parse(text: &str) -> Result<Region, Error> {
        let mut axes = Vec::new();
        for part in text.split(';') {
            let nums: Vec<&str> = part.split(',').collect();
            if nums.len() != 2 {
                return Err(Error::InvalidSpec(format!(
                    "region axis '{part}' must be 'lo,hi'"
                )));
            }
            let lo: f64 = nums[0]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad region bound '{}'", nums[0])))?;
            let hi: f64 = nums[1]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad region bound '{}'", nums[1])))?;
            if lo > hi {
                return Err(Error::InvalidSpec(format!("empty region axis '{part}'")));
            }
            axes.push((lo, hi));
        }
        Ok(Region(axes))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Grid points with the given step, endpoints included.
    pub fn grid(&self, step: f64) -> Vec<Vec<f64>> {
        let counts: Vec<usize> = self
            .0
            .iter()
            .map(|&(lo, hi)| ((hi - lo) / step + 1e-9).floor() as usize + 1)
            .collect();
        let mut out = Vec::new();
        let mut index = vec![0usize; self.dim()];
        loop {
            out.push(
                index
                    .iter()
                    .zip(&self.0)
                    .map(|(&k, &(lo, _))| lo + k as f64 * step)
                    .collect(),
            );
            let mut axis = 0;
            loop {
                if axis == self.dim() {
                    return out;
                }
                index[axis] += 1;
                if index[axis] < counts[axis] {
                    break;
                }
                index[axis] = 0;
                axis += 1;
            }
        }
    }
}

/// Spatial hash over the enumerated points for near-neighbor lookups.
struct PointGrid {
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
    points: Vec<Vec<f64>>,
}

impl PointGrid {
    fn build(points: Vec<Vec<f64>>, cell: f64) -> PointGrid {
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            let key: Vec<i64> = p.iter().map(|&c| (c / cell).floor() as i64).collect();
            cells.entry(key).or_default().push(i);
        }
        PointGrid { cell, cells, points }
    }

    /// True when some point lies within `radius <= cell` of `q`.
    fn has_within(&self, q: &[f64], radius: f64) -> bool {
        let key: Vec<i64> = q.iter().map(|&c| (c / self.cell).floor() as i64).collect();
        let dim = q.len();
        let mut offset = vec![-1i64; dim];
        loop {
            let cell_key: Vec<i64> = key.iter().zip(&offset).map(|(k, o)| k + o).collect();
            if let Some(indices) = self.cells.get(&cell_key) {
                for &i in indices {
                    let d2: f64 = self.points[i]
                        .iter()
                        .zip(q)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    if d2 <= radius * radius {
                        return true;
                    }
                }
            }
            let mut axis = 0;
            loop {
                if axis == dim {
                    return false;
                }
                offset[axis] += 1;
                if offset[axis] <= 1 {
                    break;
                }
                offset[axis] = -1;
                axis += 1;
            }
        }
    }
}

/// One-sided covering check: every grid point of the region that lies
/// in the description (tolerance `eps/2`) must be within `eps` of an
/// enumerated point.
pub fn verify_covering(
    enumeration: &OrbitEnumeration,
    desc: &OrbitClosureDesc,
    region: &Region,
    eps: f64,
    grid_step: f64,
) -> VerificationReport {
    let start = Instant::now();
    let approx: Vec<Vec<f64>> = enumeration.points.iter().map(Vector::to_f64).collect();
    let grid_lookup = PointGrid::build(approx, eps);
    let mut gaps = Vec::new();
    for g in region.grid(grid_step) {
        if desc.member_f64(&g, eps / 2.0) && !grid_lookup.has_within(&g, eps) {
            gaps.push(g);
        }
    }
    let pass = gaps.is_empty();
    VerificationReport {
        depth: enumeration.depth,
        points_generated: enumeration.points.len(),
        containment_violations: Vec::new(),
        covering_gaps: gaps,
        elapsed: start.elapsed(),
        pass,
    }
}

/// Translation parts of all words of length at most `depth` whose ratio
/// product is 1.  Case-2 groups only; validates the derived generators
/// of the translation subgroup.
pub fn brute_force_translation_subgroup(
    spec: &GroupSpec,
    depth: usize,
) -> Result<Vec<Vector>, Error> {
    match detect_case(spec)? {
        Case::Case2 => {}
        Case::Case1 => return Err(Error::WrongCase { expected: Case::Case2 }),
    }
    let maps: Vec<AffineMap> = spec
        .gens()
        .iter()
        .flat_map(|g| [g.clone(), g.invert()])
        .collect();
    let mut seen: HashSet<AffineMap> = HashSet::new();
    seen.insert(AffineMap::identity(spec.dim()));
    let mut frontier: Vec<AffineMap> = vec![AffineMap::identity(spec.dim())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for m in &maps {
                let c = m.compose(w);
                if seen.insert(c.clone()) {
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<Vector> = seen
        .into_iter()
        .filter(|m| m.ratio().is_one())
        .map(|m| m.offset().clone())
        .collect();
    out.sort_by(canonical_cmp);
    Ok(out)
}

/// Constructive witness that the set `{q*l^p*(1 - l^p)}` meets any
/// interval: picks the first `p < 0` that makes the quantum smaller
/// than the interval, then the forced integer `q`.  All comparisons are
/// exact.
pub fn dense_scalar_witness(lambda: &Scalar, lo: f64, hi: f64) -> (i64, i64, Scalar) {
    assert!(
        lambda.cmp_value(&Scalar::one()) == std::cmp::Ordering::Greater,
        "witness construction needs a base > 1"
    );
    assert!(lo < hi, "empty interval");
    let lo_exact = Scalar::from_rational(BigRational::from_float(lo).expect("finite bound"));
    let hi_exact = Scalar::from_rational(BigRational::from_float(hi).expect("finite bound"));
    let width = hi_exact.clone() - lo_exact.clone();
    for p in 1..=64i64 {
        let p = -p;
        let lp = lambda.pow(p).expect("base is nonzero");
        let v = lp.clone() * (Scalar::one() - lp);
        if (width.clone() - v.clone()).sign() <= 0 {
            continue;
        }
        // q is forced into (lo/v, hi/v), an interval longer than 1
        let q_guess = (lo / v.approx_f64(64)).floor() as i64;
        for q in (q_guess - 2)..=(q_guess + 3) {
            let value = v.clone() * Scalar::from_integer(q);
            if (value.clone() - lo_exact.clone()).sign() > 0
                && (hi_exact.clone() - value.clone()).sign() > 0
            {
                return (p, q, value);
            }
        }
    }
    unreachable!("the quantum shrinks to zero, so some p <= 64 fits any interval");
}

/// Word over generators `[f, h]` realizing the witness value as an
/// orbit point: `f^{2p} (h^{-p} f^p)^{q-1} h^{-p}` sends the center of
/// `f` to `value * a + a` when `f` is the homothety of ratio `l` at `a`
/// and `h = l * id`.
pub fn witness_word(p: i64, q: i64) -> Word {
    let mut letters = vec![(0usize, 2 * p)];
    if q >= 1 {
        for _ in 0..(q - 1) {
            letters.push((1, -p));
            letters.push((0, p));
        }
    } else {
        for _ in 0..(1 - q) {
            letters.push((0, -p));
            letters.push((1, p));
        }
    }
    letters.push((1, -p));
    Word::new(letters)
}

/// Writes the points as CSV with 17 significant digits.
pub fn export_csv<W: Write>(points: &[Vector], out: &mut W) -> io::Result<()> {
    let dim = points.first().map_or(0, Vector::dim);
    let header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for p in points {
        let row: Vec<String> = p.to_f64().iter().map(|c| format!("{c:.16e}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
