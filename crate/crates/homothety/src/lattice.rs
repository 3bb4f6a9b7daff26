//! Closure of a finitely generated additive subgroup of R^n.
//!
//! Every closed subgroup of R^n decomposes as V + L with V a linear
//! subspace and L a discrete lattice.  Rational inputs are handled
//! exactly through an integer Hermite normal form; irrational inputs go
//! through lattice reduction on high-precision approximations to detect
//! arbitrarily short group elements (the dense directions), with the
//! tolerance recorded in the result.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::Euclid;
use num::{One, Signed, ToPrimitive, Zero};

use crate::affine::Vector;
use crate::scalar::{Scalar, RATIONAL};

/// Whether the decomposition is exact or certified at a tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exactness {
    Exact,
    ToleranceCertified(f64),
}

/// Decomposition `V + L` of the closure of a finitely generated
/// additive subgroup of R^n.  The lattice generators are orthogonal to
/// the dense part by construction.
#[derive(Clone, Debug)]
pub struct AdditiveClosure {
    pub dense_part: Vec<Vector>,
    pub lattice_part: Vec<Vector>,
    pub exactness: Exactness,
}

impl AdditiveClosure {
    pub fn dense_dim(&self) -> usize {
        self.dense_part.len()
    }

    pub fn is_full_space(&self, ambient: usize) -> bool {
        self.dense_dim() == ambient
    }

    pub fn is_discrete(&self) -> bool {
        self.dense_part.is_empty()
    }

    /// Exact membership of `y` in `V + L`: solve for the unique
    /// decomposition and require integer lattice coordinates.
    pub fn member_exact(&self, y: &Vector) -> bool {
        let mut cols: Vec<Vector> = self.dense_part.clone();
        cols.extend(self.lattice_part.iter().cloned());
        if cols.is_empty() {
            return y.is_zero();
        }
        match crate::linalg::solve_columns(&cols, y) {
            None => false,
            Some(coeffs) => coeffs[self.dense_part.len()..]
                .iter()
                .all(|c| c.as_integer().is_some()),
        }
    }

    /// Floating membership within `tol`: subtract the rounded lattice
    /// contribution, then measure the distance to the dense subspace.
    pub fn member_f64(&self, y: &[f64], tol: f64) -> bool {
        let dense: Vec<Vec<f64>> = self.dense_part.iter().map(Vector::to_f64).collect();
        let lattice: Vec<Vec<f64>> = self.lattice_part.iter().map(Vector::to_f64).collect();
        let mut cols = dense.clone();
        cols.extend(lattice.iter().cloned());
        if cols.is_empty() {
            return norm(y) <= tol;
        }
        let Some(coeffs) = least_squares(&cols, y) else {
            return norm(y) <= tol;
        };
        let mut reduced = y.to_vec();
        for (j, l) in lattice.iter().enumerate() {
            let k = coeffs[dense.len() + j].round();
            for (r, &li) in reduced.iter_mut().zip(l) {
                *r -= k * li;
            }
        }
        let residual = match least_squares(&dense, &reduced) {
            Some(c) => {
                let mut r = reduced.clone();
                for (j, d) in dense.iter().enumerate() {
                    for (ri, &di) in r.iter_mut().zip(d) {
                        *ri -= c[j] * di;
                    }
                }
                norm(&r)
            }
            None => norm(&reduced),
        };
        residual <= tol
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dense_part": self.dense_part.iter().map(Vector::to_json).collect::<Vec<_>>(),
            "lattice_part": self.lattice_part.iter().map(Vector::to_json).collect::<Vec<_>>(),
            "exactness": match self.exactness {
                Exactness::Exact => serde_json::json!("exact"),
                Exactness::ToleranceCertified(e) => serde_json::json!({"tolerance_certified": e}),
            },
        })
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Least-squares solve of `cols * x = y` by normal equations; `None`
/// when the normal matrix is singular.
pub(crate) fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let k = cols.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = cols[i].iter().zip(&cols[j]).map(|(x, z)| x * z).sum();
        }
        a[i][k] = cols[i].iter().zip(y).map(|(x, z)| x * z).sum();
    }
    // Gaussian elimination with partial pivoting
    for col in 0..k {
        let (pivot, mag) = (col..k)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, z| x.1.total_cmp(&z.1))?;
        if mag < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Some((0..k).map(|i| a[i][k] / a[i][i]).collect())
}

/// Row-style Hermite normal form; returns the nonzero rows, a Z-basis
/// of the row lattice.
pub fn hnf(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return rows;
    }
    let ncols = rows[0].len();
    let mut pivot_row = 0usize;
    for col in 0..ncols {
        if pivot_row >= rows.len() {
            break;
        }
        loop {
            // smallest nonzero entry in this column at or below pivot_row
            let mut best: Option<usize> = None;
            for r in pivot_row..rows.len() {
                if !rows[r][col].is_zero()
                    && best.map_or(true, |b| rows[r][col].abs() < rows[b][col].abs())
                {
                    best = Some(r);
                }
            }
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            let mut done = true;
            for r in (pivot_row + 1)..rows.len() {
                if !rows[r][col].is_zero() {
                    let q = div_round(&rows[r][col], &rows[pivot_row][col]);
                    for c in 0..ncols {
                        let delta = &q * &rows[pivot_row][c];
                        rows[r][c] -= delta;
                    }
                    if !rows[r][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if rows[pivot_row][col].is_zero() {
            continue;
        }
        if rows[pivot_row][col].is_negative() {
            for c in 0..ncols {
                rows[pivot_row][c] = -rows[pivot_row][c].clone();
            }
        }
        // reduce the entries above the pivot
        for r in 0..pivot_row {
            let q = rows[r][col].div_euclid(&rows[pivot_row][col]);
            if !q.is_zero() {
                for c in 0..ncols {
                    let delta = &q * &rows[pivot_row][c];
                    rows[r][c] -= delta;
                }
            }
        }
        pivot_row += 1;
    }
    rows.truncate(pivot_row);
    rows
}

/// Rounded division used to shrink entries fast during HNF.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two_a = a * BigInt::from(2);
    let q = two_a.div_euclid(b) + BigInt::one();
    q.div_euclid(&BigInt::from(2))
}

/// Exact-arithmetic LLL reduction (delta = 3/4) of the given integer
/// rows, which must be linearly independent.
pub fn lll(mut basis: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let n = basis.len();
    if n <= 1 {
        return basis;
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));

    fn gram_schmidt(basis: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>, Vec<Vec<BigRational>>) {
        let n = basis.len();
        let dim = basis[0].len();
        let to_q = |row: &Vec<BigInt>| -> Vec<BigRational> {
            row.iter().map(|x| BigRational::from_integer(x.clone())).collect()
        };
        let dot = |a: &[BigRational], b: &[BigRational]| -> BigRational {
            a.iter().zip(b).map(|(x, y)| x * y).sum()
        };
        let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut norms: Vec<BigRational> = Vec::with_capacity(n);
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            let mut v = to_q(&basis[i]);
            for j in 0..i {
                mu[i][j] = if norms[j].is_zero() {
                    BigRational::zero()
                } else {
                    dot(&v, &star[j]) / norms[j].clone()
                };
                for c in 0..dim {
                    let delta = &mu[i][j] * &star[j][c];
                    v[c] -= delta;
                }
            }
            norms.push(dot(&v, &v));
            star.push(v);
        }
        (star, norms, mu)
    }

    let round_rational = |r: &BigRational| -> BigInt {
        (r + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer()
    };

    let (_, mut norms, mut mu) = gram_schmidt(&basis);
    let mut k = 1usize;
    while k < n {
        for j in (0..k).rev() {
            let q = round_rational(&mu[k][j]);
            if !q.is_zero() {
                for c in 0..basis[k].len() {
                    let delta = &q * &basis[j][c];
                    basis[k][c] -= delta;
                }
                let (_, new_norms, new_mu) = gram_schmidt(&basis);
                norms = new_norms;
                mu = new_mu;
            }
        }
        let lhs = norms[k].clone();
        let rhs = (delta.clone() - &mu[k][k - 1] * &mu[k][k - 1]) * norms[k - 1].clone();
        if lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            let (_, new_norms, new_mu) = gram_schmidt(&basis);
            norms = new_norms;
            mu = new_mu;
            k = k.max(2) - 1;
        }
    }
    basis
}

/// Radicands appearing anywhere in the vectors; always includes 1.
fn radicand_universe(gens: &[Vector]) -> Vec<u64> {
    let mut set: BTreeSet<u64> = BTreeSet::new();
    set.insert(RATIONAL);
    for g in gens {
        for c in &g.0 {
            set.extend(c.radicands());
        }
    }
    set.into_iter().collect()
}

/// Embeds a vector into rational coordinates, one block per radicand.
fn embed(v: &Vector, universe: &[u64]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); v.dim() * universe.len()];
    for (j, c) in v.0.iter().enumerate() {
        for (m, coef) in c.terms() {
            let idx = universe.binary_search(&m).expect("radicand in universe");
            out[j * universe.len() + idx] = coef.clone();
        }
    }
    out
}

fn unembed(row: &[BigRational], dim: usize, universe: &[u64]) -> Vector {
    let mut coords = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut s = Scalar::zero();
        for (idx, &m) in universe.iter().enumerate() {
            let coef = &row[j * universe.len() + idx];
            if !coef.is_zero() {
                s += Scalar::term(coef.clone(), m);
            }
        }
        coords.push(s);
    }
    Vector(coords)
}

/// Z-basis of the abstract group generated by `gens`, computed exactly
/// through the rational-coordinate embedding and an integer HNF.
fn z_basis(gens: &[Vector]) -> Vec<Vector> {
    let gens: Vec<Vector> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    if gens.is_empty() {
        return Vec::new();
    }
    let dim = gens[0].dim();
    let universe = radicand_universe(&gens);
    let embedded: Vec<Vec<BigRational>> = gens.iter().map(|g| embed(g, &universe)).collect();
    let mut denom = BigInt::one();
    for row in &embedded {
        for x in row {
            denom = num::integer::lcm(denom, x.denom().clone());
        }
    }
    let int_rows: Vec<Vec<BigInt>> = embedded
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| (x * BigRational::from_integer(denom.clone())).to_integer())
                .collect()
        })
        .collect();
    let basis = hnf(int_rows);
    basis
        .into_iter()
        .map(|row| {
            let rational: Vec<BigRational> = row
                .into_iter()
                .map(|x| BigRational::new(x, denom.clone()))
                .collect();
            unembed(&rational, dim, &universe)
        })
        .collect()
}

/// Searches for a nonzero group element shorter than `eps` among
/// LLL-reduced integer combinations of the generators, using
/// `precision_bits` of precision for the embedding.  Returns the exact
/// short vector when one is found.
fn short_combination(gens: &[Vector], eps: &BigRational, precision_bits: u32) -> Option<Vector> {
    let m = gens.len();
    if m == 0 {
        return None;
    }
    let dim = gens[0].dim();
    let scale = BigInt::one() << precision_bits;
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    for (i, g) in gens.iter().enumerate() {
        let mut row: Vec<BigInt> = g
            .0
            .iter()
            .map(|c| {
                let approx = c.approx_rational(precision_bits + 16);
                (approx * BigRational::from_integer(scale.clone())).round().to_integer()
            })
            .collect();
        for j in 0..m {
            row.push(if i == j { BigInt::one() } else { BigInt::zero() });
        }
        rows.push(row);
    }
    let reduced = lll(rows);
    let eps_sq = eps * eps;
    let mut best: Option<(BigRational, Vector)> = None;
    for row in &reduced {
        let combo = &row[dim..];
        if combo.iter().all(Zero::is_zero) {
            continue;
        }
        let mut z = Vector::zero(dim);
        for (c, g) in combo.iter().zip(gens) {
            let c = c.to_i64().unwrap_or(0);
            if c != 0 {
                z = z + g.scale(&Scalar::from_integer(c));
            }
        }
        if z.is_zero() {
            continue;
        }
        let norm_sq = z.norm_sq().approx_rational(64);
        if norm_sq < eps_sq && best.as_ref().map_or(true, |(b, _)| norm_sq < *b) {
            best = Some((norm_sq, z));
        }
    }
    best.map(|(_, z)| z)
}

/// Rescales an exact vector by a power of two so its norm is near 1.
fn normalize_scale(v: &Vector) -> Vector {
    let n = v.norm_sq().approx_f64(64).sqrt();
    if !n.is_finite() || n == 0.0 {
        return v.clone();
    }
    let t = (-n.log2()).round() as i64;
    let factor = Scalar::from_integer(2).pow(t).expect("2 is invertible");
    v.scale(&factor)
}

/// Computes the closure `V + L` of the Z-span of `gens`.
///
/// Rational generators are resolved exactly (the group is discrete).
/// Otherwise, whenever a nonzero combination shorter than `eps` exists
/// the corresponding direction is moved into V, all generators are
/// projected onto its orthogonal complement (exactly, in the scalar
/// ring), and the search repeats.
pub fn additive_closure(gens: &[Vector], eps: f64, precision_bits: u32) -> AdditiveClosure {
    let mut basis = z_basis(gens);
    if basis.is_empty() {
        return AdditiveClosure {
            dense_part: Vec::new(),
            lattice_part: Vec::new(),
            exactness: Exactness::Exact,
        };
    }
    let all_rational = basis.iter().all(|g| g.0.iter().all(|c| c.is_rational()));
    if all_rational {
        return AdditiveClosure {
            dense_part: Vec::new(),
            lattice_part: basis,
            exactness: Exactness::Exact,
        };
    }

    let eps_rational = BigRational::from_float(eps).expect("finite tolerance");
    let mut dense_part: Vec<Vector> = Vec::new();
    let mut certified = false;
    while !basis.is_empty() {
        match short_combination(&basis, &eps_rational, precision_bits) {
            None => break,
            Some(z) => {
                certified = true;
                let norm_sq_inv = z.norm_sq().inv().expect("short vector is nonzero");
                let projected: Vec<Vector> = basis
                    .iter()
                    .map(|g| {
                        let coef = &g.dot(&z) * &norm_sq_inv;
                        g.clone() - z.scale(&coef)
                    })
                    .collect();
                dense_part.push(normalize_scale(&z));
                basis = z_basis(&projected);
            }
        }
    }
    AdditiveClosure {
        dense_part,
        lattice_part: basis,
        exactness: if certified {
            Exactness::ToleranceCertified(eps)
        } else {
            Exactness::Exact
        },
    }
}
