use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntegerMatrix;
use crate::error::{Error, Result};

/// Smith normal form `U * M * V = D` with unimodular `U`, `V`.
///
/// `u_inv` is the exact inverse of `u`, kept alongside because the free
/// lift of a quotient decomposition is read off its columns.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SnfResult {
    /// Diagonal of `D`, length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Nonzero invariant factors `d_1 | d_2 | ... | d_r`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal()
            .into_iter()
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

fn min_nonzero(a: &IntegerMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a[(i, j)].abs();
            if x.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, _, b)| x < *b) {
                best = Some((i, j, x));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Computes the Smith normal form of a nonempty integer matrix.
pub fn smith_normal_form(m: &IntegerMatrix) -> Result<SnfResult> {
    if m.is_empty() {
        return Err(Error::Dimension(
            "smith_normal_form of an empty matrix".into(),
        ));
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut u_inv = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);

    // Row op `row[dst] += c * row[src]` on A, mirrored into U and U^{-1}.
    let row_op = |a: &mut IntegerMatrix,
                  u: &mut IntegerMatrix,
                  u_inv: &mut IntegerMatrix,
                  dst: usize,
                  src: usize,
                  c: &BigInt| {
        a.add_row_multiple(dst, src, c);
        u.add_row_multiple(dst, src, c);
        u_inv.add_col_multiple(src, dst, &-c);
    };

    'pivots: for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = min_nonzero(&a, t) else {
                break 'pivots;
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = &a[(i, t)] / &a[(t, t)];
                row_op(&mut a, &mut u, &mut u_inv, i, t, &-q);
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&a[(t, j)] / &a[(t, t)]);
                a.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }

            // pivot must divide the remaining block
            let pivot = a[(t, t)].clone();
            let offending =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match offending {
                Some(i) => row_op(&mut a, &mut u, &mut u_inv, t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }

    Ok(SnfResult { u, u_inv, d: a, v })
}

/// Rank of the lattice spanned by the columns of `gens`.
pub fn lattice_rank(gens: &IntegerMatrix) -> usize {
    if gens.is_empty() || gens.is_zero() {
        return 0;
    }
    smith_normal_form(gens).expect("nonempty matrix").rank()
}

/// Integer solutions of `E n = 0`: a basis (as columns) of the saturated
/// kernel lattice `{ n in Z^cols : E n = 0 }`.
pub fn integer_kernel(e: &IntegerMatrix) -> IntegerMatrix {
    let cols = e.cols();
    if e.rows() == 0 || e.is_zero() {
        return IntegerMatrix::identity(cols);
    }
    let snf = smith_normal_form(e).expect("nonempty matrix");
    let r = snf.rank();
    snf.v.select_columns(r..cols)
}

/// Whether `x` lies in the lattice spanned by the columns of `gens`.
pub fn lattice_contains(gens: &IntegerMatrix, x: &[BigInt]) -> Result<bool> {
    if x.len() != gens.rows() {
        return Err(Error::Dimension(
            "vector length differs from lattice ambient rank".into(),
        ));
    }
    if x.iter().all(Zero::is_zero) {
        return Ok(true);
    }
    if gens.cols() == 0 || gens.is_zero() {
        return Ok(false);
    }
    let snf = smith_normal_form(gens)?;
    let y = snf.u.mul_vec(x)?;
    let diag = snf.diagonal();
    Ok(y.iter().enumerate().all(|(j, yj)| match diag.get(j) {
        Some(dj) if !dj.is_zero() => yj.is_multiple_of(dj),
        _ => yj.is_zero(),
    }))
}

/// Whether every column of `sub` lies in the lattice spanned by `gens`.
pub fn lattice_includes(gens: &IntegerMatrix, sub: &IntegerMatrix) -> Result<bool> {
    for col in sub.columns() {
        if !lattice_contains(gens, &col)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntegerMatrix) -> SnfResult {
        let s = smith_normal_form(m).unwrap();
        let prod = s.u.mul(m).unwrap().mul(&s.v).unwrap();
        assert_eq!(prod, s.d);
        let id = IntegerMatrix::identity(m.rows());
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), id);
        assert_eq!(s.u.determinant().unwrap().abs(), BigInt::from(1));
        assert_eq!(s.v.determinant().unwrap().abs(), BigInt::from(1));
        s
    }

    #[test]
    fn identity_case() {
        let s = check(&IntegerMatrix::identity(2));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn example_kernel_level_two() {
        // K_2 generators (1,1,0), (0,0,4) as columns
        let m = IntegerMatrix::from_i64_rows(&[&[1, 0], &[1, 0], &[0, 4]]);
        let s = check(&m);
        assert_eq!(
            s.invariant_factors(),
            vec![BigInt::from(1), BigInt::from(4)]
        );
    }

    #[test]
    fn non_divisible_block_is_fixed() {
        let m = IntegerMatrix::from_i64_rows(&[&[2, 0], &[0, 3]]);
        let s = check(&m);
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn zero_and_rank() {
        assert_eq!(lattice_rank(&IntegerMatrix::zeros(3, 2)), 0);
        let m = IntegerMatrix::from_columns(3, &[vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(lattice_rank(&m), 2);
        let dep = IntegerMatrix::from_columns(2, &[vec![2, 4], vec![1, 2], vec![3, 6]]).unwrap();
        assert_eq!(lattice_rank(&dep), 1);
    }

    #[test]
    fn containment() {
        let k = IntegerMatrix::from_columns(3, &[vec![1, 1, 0], vec![0, 0, 4]]).unwrap();
        let b = |v: [i64; 3]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert!(lattice_contains(&k, &b([2, 2, 8])).unwrap());
        assert!(!lattice_contains(&k, &b([0, 0, 2])).unwrap());
        assert!(!lattice_contains(&k, &b([1, 0, 0])).unwrap());
        assert!(lattice_contains(&IntegerMatrix::zeros(3, 0), &b([0, 0, 0])).unwrap());
    }

    #[test]
    fn empty_rejected() {
        assert!(smith_normal_form(&IntegerMatrix::zeros(0, 3)).is_err());
    }

    #[test]
    fn kernel_of_difference_row() {
        let e = IntegerMatrix::from_i64_rows(&[&[1, -1, 0]]);
        let k = integer_kernel(&e);
        assert_eq!(k.cols(), 2);
        assert!(e.mul(&k).unwrap().is_zero());
        assert_eq!(lattice_rank(&k), 2);
    }
}
