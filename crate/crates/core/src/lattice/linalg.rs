//! Exact Gaussian elimination over `Q` and over `Q(sqrt D)`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::quadratic::QuadraticNumber;

/// Minimal field interface needed by the elimination routines.
pub trait ExactField: Clone {
    fn is_zero_elem(&self) -> bool;
    fn inv(&self) -> Self;
    fn mul_elem(&self, other: &Self) -> Self;
    fn sub_elem(&self, other: &Self) -> Self;
}

impl ExactField for BigRational {
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn mul_elem(&self, other: &Self) -> Self {
        self * other
    }
    fn sub_elem(&self, other: &Self) -> Self {
        self - other
    }
}

impl ExactField for QuadraticNumber {
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn inv(&self) -> Self {
        self.inverse().expect("pivot is nonzero")
    }
    fn mul_elem(&self, other: &Self) -> Self {
        self * other
    }
    fn sub_elem(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }
}

/// Reduces `rows` to row echelon form in place and returns the rank.
pub fn row_reduce<F: ExactField>(rows: &mut [Vec<F>]) -> usize {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&i| !rows[i][col].is_zero_elem()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].inv();
        for x in rows[rank].iter_mut() {
            *x = x.mul_elem(&inv);
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[col].is_zero_elem() {
                continue;
            }
            let f = row[col].clone();
            for (x, pv) in row.iter_mut().zip(&pivot_row) {
                *x = x.sub_elem(&f.mul_elem(pv));
            }
        }
        rank += 1;
    }
    rank
}

pub fn rank<F: ExactField>(rows: &[Vec<F>]) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m)
}

/// Rank over `Q` of a set of vectors.
pub fn rational_rank(vectors: &[Vec<BigRational>]) -> usize {
    rank(vectors)
}

/// Rank over `Q(sqrt D)` of a set of vectors.
pub fn quadratic_rank(vectors: &[Vec<QuadraticNumber>]) -> usize {
    rank(vectors)
}

/// Splits each quadratic vector into its rational and surd coordinates,
/// giving a vector over `Q` of twice the length.
pub fn split_components(v: &[QuadraticNumber]) -> Vec<BigRational> {
    v.iter()
        .map(|x| x.rational_part().clone())
        .chain(v.iter().map(|x| x.surd_part().clone()))
        .collect()
}

/// Inverse of a square rational matrix, or `None` if singular.
pub fn invert_rational(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut aug: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    if row_reduce(&mut aug) < n || (0..n).any(|i| aug[i][i].is_zero()) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}
