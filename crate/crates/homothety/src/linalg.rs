//! Exact Gaussian elimination over the radical scalar field.

use crate::affine::Vector;
use crate::scalar::Scalar;

/// Row-echelon basis of the span of `vecs`: independent vectors with
/// pivot 1, each pivot column cleared in the others.
pub fn echelon_basis(vecs: &[Vector]) -> Vec<Vector> {
    let mut basis: Vec<(usize, Vector)> = Vec::new(); // (pivot column, row)
    for v in vecs {
        if let Some((col, row)) = reduce_against(&basis, v) {
            // clear the new pivot column in the existing rows
            for (_, b) in basis.iter_mut() {
                let c = b.0[col].clone();
                if !c.is_zero() {
                    *b = b.clone() - row.scale(&c);
                }
            }
            basis.push((col, row));
            basis.sort_by_key(|&(c, _)| c);
        }
    }
    basis.into_iter().map(|(_, v)| v).collect()
}

/// Reduces `v` against the echelon rows; returns the normalized
/// remainder with its pivot column, or `None` if `v` is in the span.
fn reduce_against(basis: &[(usize, Vector)], v: &Vector) -> Option<(usize, Vector)> {
    let mut w = v.clone();
    for (col, b) in basis {
        let c = w.0[*col].clone();
        if !c.is_zero() {
            w = w - b.scale(&c);
        }
    }
    let col = w.0.iter().position(|c| !c.is_zero())?;
    let inv = w.0[col].inv().expect("pivot is nonzero");
    Some((col, w.scale(&inv)))
}

pub fn in_span(basis: &[Vector], v: &Vector) -> bool {
    let rows = echelon_basis(basis);
    reduce_against(
        &rows
            .iter()
            .enumerate()
            .map(|(_, r)| {
                let col = r.0.iter().position(|c| !c.is_zero()).expect("basis row nonzero");
                (col, r.clone())
            })
            .collect::<Vec<_>>(),
        v,
    )
    .is_none()
}

pub fn rank(vecs: &[Vector]) -> usize {
    echelon_basis(vecs).len()
}

/// Solves `sum_j coeffs[j] * cols[j] = target` exactly.  Returns `None`
/// when the system is inconsistent.  When the columns are dependent an
/// arbitrary consistent solution is returned.
pub fn solve_columns(cols: &[Vector], target: &Vector) -> Option<Vec<Scalar>> {
    let dim = target.dim();
    let k = cols.len();
    // augmented rows of the dim x (k+1) system
    let mut rows: Vec<Vec<Scalar>> = (0..dim)
        .map(|i| {
            let mut row: Vec<Scalar> = cols.iter().map(|c| c.0[i].clone()).collect();
            row.push(target.0[i].clone());
            row
        })
        .collect();

    let mut pivot_of_col: Vec<Option<usize>> = vec![None; k];
    let mut next_row = 0usize;
    for col in 0..k {
        let pr = (next_row..dim).find(|&r| !rows[r][col].is_zero());
        let Some(pr) = pr else { continue };
        rows.swap(next_row, pr);
        let inv = rows[next_row][col].inv().expect("pivot is nonzero");
        for c in col..=k {
            rows[next_row][c] = &rows[next_row][c] * &inv;
        }
        for r in 0..dim {
            if r != next_row && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in col..=k {
                    let delta = &rows[next_row][c] * &f;
                    rows[r][c] = rows[r][c].clone() - delta;
                }
            }
        }
        pivot_of_col[col] = Some(next_row);
        next_row += 1;
        if next_row == dim {
            break;
        }
    }
    // inconsistent when a zero row has nonzero augment
    for r in 0..dim {
        if rows[r][..k].iter().all(Scalar::is_zero) && !rows[r][k].is_zero() {
            return None;
        }
    }
    let mut solution = vec![Scalar::zero(); k];
    for (col, pivot) in pivot_of_col.iter().enumerate() {
        if let Some(r) = pivot {
            solution[col] = rows[*r][k].clone();
        }
    }
    Some(solution)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_integer(n)
    }

    fn v(coords: &[i64]) -> Vector {
        Vector(coords.iter().map(|&c| s(c)).collect())
    }

    #[test]
    fn echelon_rank() {
        let vecs = [v(&[1, 2, 3]), v(&[2, 4, 6]), v(&[0, 1, 1])];
        assert_eq!(rank(&vecs), 2);
        assert!(in_span(&vecs, &v(&[1, 3, 4])));
        assert!(!in_span(&vecs, &v(&[0, 0, 1])));
    }

    #[test]
    fn solve_simple() {
        let cols = [v(&[1, 0]), v(&[1, 1])];
        let sol = solve_columns(&cols, &v(&[3, 2])).unwrap();
        assert_eq!(sol, vec![s(1), s(2)]);
        assert!(solve_columns(&[v(&[1, 0])], &v(&[0, 1])).is_none());
    }

    #[test]
    fn solve_with_radicals() {
        let r2 = Scalar::sqrt_of(2);
        let cols = [Vector(vec![r2.clone(), Scalar::zero()])];
        let target = Vector(vec![Scalar::from_integer(2), Scalar::zero()]);
        let sol = solve_columns(&cols, &target).unwrap();
        assert_eq!(sol[0], r2);
    }
}
