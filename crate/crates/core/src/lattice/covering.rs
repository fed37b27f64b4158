//! Bounded-box covering of dyadic grids by a free basis plus a kernel basis.
//!
//! Given `u_1..u_p` and `v_1..v_q` forming a rational basis of `Q^d`, check
//! that every point `g` of `[-n, n]^d ∩ 2^{-m} Z^d` can be written as
//! `y + Σ a_i u_i + Σ b_j v_j` with `y ∈ [-M, M]^d ∩ 2^{-m} Z^d` and all
//! coefficients in `[-Mn, Mn] ∩ 2^{-m} Z`. Coordinates are lattice
//! coordinates (the grid is `2^{-m}` times the integer lattice).

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::matrix::IntegerMatrix;
use crate::error::{Error, Result};

/// Precomputed adjugate form of the basis: `B^{-1} = adj / det`.
struct Solver {
    d: usize,
    adj: Vec<Vec<i128>>,
    det: i128,
}

impl Solver {
    fn new(u: &[Vec<BigInt>], v: &[Vec<BigInt>]) -> Result<Self> {
        let d = u.first().or(v.first()).map_or(0, Vec::len);
        if d == 0 {
            return Err(Error::Dimension("covering basis is empty".into()));
        }
        if u.len() + v.len() != d {
            return Err(Error::Dimension(format!(
                "p + q = {} but vectors live in dimension {d}",
                u.len() + v.len()
            )));
        }
        let cols: Vec<Vec<BigInt>> = u.iter().chain(v).cloned().collect();
        if cols.iter().any(|c| c.len() != d) {
            return Err(Error::Dimension("basis vectors of unequal length".into()));
        }
        let b = IntegerMatrix::from_columns(d, &cols)?;
        let det = b.determinant()?;
        if det == BigInt::from(0) {
            return Err(Error::Dependent(
                "covering vectors u and v are rationally dependent".into(),
            ));
        }
        // adj[i][j] = (-1)^{i+j} * minor(j, i)
        let mut adj = vec![vec![0i128; d]; d];
        for (i, adj_row) in adj.iter_mut().enumerate() {
            for (j, entry) in adj_row.iter_mut().enumerate() {
                let minor = if d == 1 {
                    BigInt::from(1)
                } else {
                    let rows: Vec<Vec<BigInt>> = (0..d)
                        .filter(|&r| r != j)
                        .map(|r| {
                            (0..d)
                                .filter(|&c| c != i)
                                .map(|c| b[(r, c)].clone())
                                .collect()
                        })
                        .collect();
                    IntegerMatrix::from_rows(&rows)?.determinant()?
                };
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                *entry = sign
                    * minor.to_i128().ok_or_else(|| {
                        Error::Unsupported("covering basis entries too large".into())
                    })?;
            }
        }
        let det = det
            .to_i128()
            .ok_or_else(|| Error::Unsupported("covering basis determinant too large".into()))?;
        Ok(Self { d, adj, det })
    }

    /// Scaled coefficients `2^m c` for the scaled difference `2^m (g - y)`,
    /// or `None` when they are not integers.
    fn coefficients(&self, diff: &[i128], out: &mut [i128]) -> bool {
        for (row, slot) in self.adj.iter().zip(out.iter_mut()) {
            let s: i128 = row.iter().zip(diff).map(|(a, x)| a * x).sum();
            if s % self.det != 0 {
                return false;
            }
            *slot = s / self.det;
        }
        true
    }
}

/// Iterates over all integer points of the cube `[-r, r]^d`.
fn cube_points(d: usize, r: i128) -> impl Iterator<Item = Vec<i128>> {
    let side = (2 * r + 1) as u128;
    let total = side.pow(d as u32);
    (0..total).map(move |mut idx| {
        let mut p = vec![0i128; d];
        for x in p.iter_mut() {
            *x = (idx % side) as i128 - r;
            idx /= side;
        }
        p
    })
}

fn check_args(n: u64, level: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Parameter("covering probe n must be positive".into()));
    }
    if level > 16 {
        return Err(Error::Parameter(
            "covering level above 16 is not supported".into(),
        ));
    }
    Ok(())
}

/// Decides the covering inclusion for fixed `M`, `n`, `m`.
///
/// Membership of each grid point is decided by solving the full-rank system
/// `B c = g - y` exactly for every candidate `y`.
pub fn verify_covering(
    bound: u64,
    u: &[Vec<BigInt>],
    v: &[Vec<BigInt>],
    n: u64,
    level: u32,
) -> Result<bool> {
    check_args(n, level)?;
    let solver = Solver::new(u, v)?;
    Ok(covers(&solver, bound, n, level))
}

fn covers(solver: &Solver, bound: u64, n: u64, level: u32) -> bool {
    let d = solver.d;
    let scale = 1i128 << level;
    let grid_r = n as i128 * scale;
    let y_r = bound as i128 * scale;
    let coef_bound = bound as i128 * n as i128 * scale;
    // candidates sorted by sup-norm so that small shifts are tried first
    let mut ys: Vec<Vec<i128>> = cube_points(d, y_r).collect();
    ys.sort_by_key(|y| y.iter().map(|x| x.abs()).max().unwrap_or(0));

    let mut diff = vec![0i128; d];
    let mut coef = vec![0i128; d];
    cube_points(d, grid_r).all(|g| {
        ys.iter().any(|y| {
            for k in 0..d {
                diff[k] = g[k] - y[k];
            }
            solver.coefficients(&diff, &mut coef) && coef.iter().all(|c| c.abs() <= coef_bound)
        })
    })
}

/// Smallest `M <= max_bound` for which the covering holds for every
/// `1 <= n <= n_probe` and `0 <= m <= m_probe`, if any.
pub fn covering_constant_search(
    u: &[Vec<BigInt>],
    v: &[Vec<BigInt>],
    n_probe: u64,
    m_probe: u32,
    max_bound: u64,
) -> Result<Option<u64>> {
    check_args(n_probe, m_probe)?;
    let solver = Solver::new(u, v)?;
    Ok((1..=max_bound)
        .find(|&bound| (1..=n_probe).all(|n| (0..=m_probe).all(|m| covers(&solver, bound, n, m)))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vecs(xs: &[&[i64]]) -> Vec<Vec<BigInt>> {
        xs.iter()
            .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn one_dimensional() {
        let u = vecs(&[&[1]]);
        assert!(verify_covering(1, &u, &[], 3, 0).unwrap());
    }

    #[test]
    fn zero_bound_fails_on_nontrivial_grid() {
        let u = vecs(&[&[1]]);
        assert!(!verify_covering(0, &u, &[], 1, 0).unwrap());
        let u = vecs(&[&[1, 0, 0]]);
        let v = vecs(&[&[1, 1, 0], &[0, 0, 1]]);
        assert!(!verify_covering(0, &u, &v, 2, 1).unwrap());
    }

    #[test]
    fn search_one_dimensional() {
        let u = vecs(&[&[1]]);
        assert_eq!(covering_constant_search(&u, &[], 3, 1, 4).unwrap(), Some(1));
        assert_eq!(covering_constant_search(&u, &[], 3, 1, 0).unwrap(), None);
    }

    #[test]
    fn dependent_rejected() {
        let u = vecs(&[&[1, 1]]);
        let v = vecs(&[&[2, 2]]);
        assert!(matches!(
            verify_covering(1, &u, &v, 1, 0),
            Err(Error::Dependent(_))
        ));
        assert!(verify_covering(1, &u, &[], 1, 0).is_err());
    }

    #[test]
    fn sparse_basis_needs_larger_bound() {
        // u = (3): only multiples of 3 reachable through coefficients, y absorbs the rest
        let u = vecs(&[&[3]]);
        assert!(!verify_covering(0, &u, &[], 2, 0).unwrap());
        assert!(verify_covering(1, &u, &[], 2, 0).unwrap());
    }
}
