use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use super::matrix::IntegerMatrix;
use super::snf::smith_normal_form;
use crate::error::{Error, Result};

/// Structure of `Z^d / K` for a kernel lattice `K` given by generators.
///
/// The quotient splits as a free part of rank `free_rank` and a finite part
/// with invariant factors `torsion_invariants`. `free_lift_basis` holds
/// preimages in `Z^d` of a basis of the free part; together with the kernel
/// they span a full-rank sublattice.
#[derive(Clone, Debug)]
pub struct QuotientDecomposition {
    pub ambient_rank: usize,
    pub kernel_basis: IntegerMatrix,
    pub kernel_rank: usize,
    pub free_rank: usize,
    pub torsion_invariants: Vec<BigInt>,
    pub free_lift_basis: IntegerMatrix,
    /// Change of basis `U` with `U * K * V` diagonal. Row `j >= kernel_rank`
    /// of `U` is the coordinate functional of the `j`-th free direction.
    pub projection: IntegerMatrix,
}

#[derive(Serialize)]
struct QuotientView {
    ambient_rank: usize,
    kernel_rank: usize,
    free_rank: usize,
    torsion_invariants: Vec<String>,
    free_lift_basis: Vec<Vec<String>>,
    kernel_basis: Vec<Vec<String>>,
}

impl QuotientDecomposition {
    /// Coordinates of `x` in the free part: the image of `x` under the
    /// quotient map followed by projection onto the free summand.
    pub fn free_coordinates(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        let y = self.projection.mul_vec(x)?;
        Ok(y[self.kernel_rank..].to_vec())
    }

    /// Free lift columns as small integers, for display.
    pub fn free_lift_columns(&self) -> Vec<Vec<BigInt>> {
        self.free_lift_basis.columns()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let cols = |m: &IntegerMatrix| {
            m.columns()
                .into_iter()
                .map(|c| c.iter().map(ToString::to_string).collect())
                .collect()
        };
        serde_json::to_value(QuotientView {
            ambient_rank: self.ambient_rank,
            kernel_rank: self.kernel_rank,
            free_rank: self.free_rank,
            torsion_invariants: self
                .torsion_invariants
                .iter()
                .map(ToString::to_string)
                .collect(),
            free_lift_basis: cols(&self.free_lift_basis),
            kernel_basis: cols(&self.kernel_basis),
        })
        .expect("plain data")
    }
}

/// Decomposes `Z^d / <kernel_gens>`.
///
/// An empty kernel (zero columns) is allowed and yields the free group `Z^d`
/// with the identity as free lift.
pub fn quotient_decomposition(
    d: usize,
    kernel_gens: &IntegerMatrix,
) -> Result<QuotientDecomposition> {
    if kernel_gens.rows() != d && !(kernel_gens.cols() == 0 && kernel_gens.rows() == 0) {
        return Err(Error::Dimension(format!(
            "kernel generators have {} rows, ambient rank is {d}",
            kernel_gens.rows()
        )));
    }
    let kernel_basis = if kernel_gens.rows() == d {
        kernel_gens.clone()
    } else {
        IntegerMatrix::zeros(d, 0)
    };

    if kernel_basis.cols() == 0 || kernel_basis.is_zero() {
        return Ok(QuotientDecomposition {
            ambient_rank: d,
            kernel_basis,
            kernel_rank: 0,
            free_rank: d,
            torsion_invariants: Vec::new(),
            free_lift_basis: IntegerMatrix::identity(d),
            projection: IntegerMatrix::identity(d),
        });
    }

    let snf = smith_normal_form(&kernel_basis)?;
    let q = snf.rank();
    let torsion_invariants = snf
        .invariant_factors()
        .into_iter()
        .filter(|x| !x.is_one())
        .collect();
    let free_lift_basis = snf.u_inv.select_columns(q..d);
    Ok(QuotientDecomposition {
        ambient_rank: d,
        kernel_basis,
        kernel_rank: q,
        free_rank: d - q,
        torsion_invariants,
        free_lift_basis,
        projection: snf.u,
    })
}
