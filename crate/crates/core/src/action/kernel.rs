use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::spec::ActionSpec;
use crate::error::Result;
use crate::lattice::quadratic::{common_denominator, QuadraticNumber};
use crate::lattice::{integer_kernel, smith_normal_form, IntegerMatrix};

/// Generators of `K_i = { u in Gamma_i : phi_u = identity }`, written in the
/// coordinates of `Gamma_i = 2^{-i} Gamma_0` (columns of a `d x q` matrix).
#[derive(Clone, Debug)]
pub struct KernelLattice {
    pub level: u32,
    pub basis: IntegerMatrix,
}

impl KernelLattice {
    pub fn rank(&self) -> usize {
        crate::lattice::lattice_rank(&self.basis)
    }
}

/// Clears denominators row by row and drops zero rows.
fn integer_rows(rows: Vec<Vec<BigRational>>, d: usize) -> IntegerMatrix {
    let rows: Vec<Vec<BigInt>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| {
            let den = common_denominator(&r);
            r.iter()
                .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
                .collect()
        })
        .collect();
    if rows.is_empty() {
        IntegerMatrix::zeros(0, d)
    } else {
        IntegerMatrix::from_rows(&rows).expect("rows share length d")
    }
}

/// Computes `K_i` in `Gamma_i` coordinates.
///
/// Step one solves `A Gamma_0 n = 0` together with the vanishing of the surd
/// part of `C Gamma_0 n`, both split into rational systems, giving a saturated
/// lattice `L`. Step two imposes `2^{-i} C Gamma_0 n in Z^r` on `L` as a
/// congruence modulo `2^i` times the common denominator, solved through a
/// Smith normal form.
pub fn kernel_lattice(spec: &ActionSpec, level: u32) -> Result<KernelLattice> {
    let d = spec.dim();
    let trans = spec.translation_in_lattice();
    let rot = spec.rotation_in_lattice();

    let mut equations: Vec<Vec<BigRational>> = Vec::new();
    for row in &trans {
        equations.push(row.iter().map(|x| x.rational_part().clone()).collect());
        equations.push(row.iter().map(|x| x.surd_part().clone()).collect());
    }
    for row in &rot {
        equations.push(row.iter().map(|x| x.surd_part().clone()).collect());
    }
    let saturated = integer_kernel(&integer_rows(equations, d));
    let ell = saturated.cols();
    if ell == 0 || rot.is_empty() {
        return Ok(KernelLattice {
            level,
            basis: saturated,
        });
    }

    // G = Re(C Gamma_0) * L, rational r x ell
    let g: Vec<Vec<BigRational>> = rot
        .iter()
        .map(|row| {
            (0..ell)
                .map(|j| {
                    row.iter()
                        .enumerate()
                        .fold(BigRational::zero(), |acc, (i, x)| {
                            acc + x.rational_part()
                                * BigRational::from_integer(saturated[(i, j)].clone())
                        })
                })
                .collect()
        })
        .collect();
    let den = common_denominator(g.iter().flatten());
    let h_rows: Vec<Vec<BigInt>> = g
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
                .collect()
        })
        .collect();
    let h = IntegerMatrix::from_rows(&h_rows)?;
    if h.is_zero() {
        return Ok(KernelLattice {
            level,
            basis: saturated,
        });
    }
    let modulus = den << level as usize;
    let snf = smith_normal_form(&h)?;
    let diag = snf.diagonal();
    let mut scaled = snf.v.clone();
    for (j, s) in diag.iter().enumerate() {
        if s.is_zero() {
            continue;
        }
        let step = &modulus / modulus.gcd(s);
        if !step.is_one() {
            for i in 0..ell {
                scaled[(i, j)] = &scaled[(i, j)] * &step;
            }
        }
    }
    Ok(KernelLattice {
        level,
        basis: saturated.mul(&scaled)?,
    })
}

/// Direct membership test `n in K_i` (in `Gamma_i` coordinates).
pub fn acts_trivially(spec: &ActionSpec, n: &[BigInt], level: u32) -> bool {
    let f = spec.field();
    let nq: Vec<QuadraticNumber> = n
        .iter()
        .map(|x| QuadraticNumber::rational(BigRational::from_integer(x.clone()), f))
        .collect();
    let dot = |row: &[QuadraticNumber]| {
        row.iter()
            .zip(&nq)
            .fold(QuadraticNumber::zero(f), |acc, (a, b)| acc + a * b)
    };
    let scale = BigRational::new(BigInt::one(), BigInt::one() << level as usize);
    spec.translation_in_lattice()
        .iter()
        .all(|r| dot(r).is_zero())
        && spec.rotation_in_lattice().iter().all(|r| {
            let v = dot(r).scale(&scale);
            v.is_rational() && v.rational_part().is_integer()
        })
}
