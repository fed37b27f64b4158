use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::kernel::{kernel_lattice, KernelLattice};
use super::spec::ActionSpec;
use crate::error::{Error, Result};
use crate::lattice::linalg::{quadratic_rank, rational_rank, split_components};
use crate::lattice::quadratic::QuadraticNumber;
use crate::lattice::{lattice_rank, quotient_decomposition, IntegerMatrix, QuotientDecomposition};

/// Kernel and quotient structure at one refinement level.
#[derive(Clone, Debug)]
pub struct LevelStructure {
    pub kernel: KernelLattice,
    pub quotient: QuotientDecomposition,
}

/// Group-theoretic dimension with the per-level structure it was read from.
#[derive(Clone, Debug)]
pub struct EffectiveDimension {
    pub p: usize,
    pub levels: Vec<LevelStructure>,
}

impl EffectiveDimension {
    pub fn torsion_profile(&self) -> Vec<Vec<BigInt>> {
        self.levels
            .iter()
            .map(|l| l.quotient.torsion_invariants.clone())
            .collect()
    }

    pub fn level(&self, i: usize) -> &LevelStructure {
        &self.levels[i]
    }
}

pub fn level_structure(spec: &ActionSpec, level: u32) -> Result<LevelStructure> {
    let kernel = kernel_lattice(spec, level)?;
    let quotient = quotient_decomposition(spec.dim(), &kernel.basis)?;
    Ok(LevelStructure { kernel, quotient })
}

/// Computes `p_i` for `i = 0..=max_level` and checks that they agree.
pub fn effective_dimension(spec: &ActionSpec, max_level: u32) -> Result<EffectiveDimension> {
    let levels = (0..=max_level)
        .map(|i| level_structure(spec, i))
        .collect::<Result<Vec<_>>>()?;
    let p = levels[0].quotient.free_rank;
    if let Some((i, l)) = levels
        .iter()
        .enumerate()
        .find(|(_, l)| l.quotient.free_rank != p)
    {
        return Err(Error::Consistency(format!(
            "free rank differs across levels: p_0 = {p}, p_{i} = {}",
            l.quotient.free_rank
        )));
    }
    for (i, l) in levels.iter().enumerate() {
        if l.quotient.free_rank + l.quotient.kernel_rank != spec.dim() {
            return Err(Error::Consistency(format!("p + q != d at level {i}")));
        }
    }
    if p == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(EffectiveDimension { p, levels })
}

/// Details behind a conservativity decision.
#[derive(Clone, Debug, Serialize)]
pub struct ConservativityReport {
    /// Number of generators of the free lattice.
    pub free_rank: usize,
    /// Rank over `Z` of the translation image group.
    pub image_z_rank: usize,
    /// Dimension of the real span of the translation image.
    pub image_real_rank: usize,
    /// Translation injective on the free lattice.
    pub injective: bool,
    /// Translation image is a discrete subgroup.
    pub discrete: bool,
    pub conservative: bool,
}

/// Decides conservativity of `{phi_t : t in F}` where the columns of
/// `f_basis` generate `F` in `Gamma_level` coordinates.
///
/// The action restricted to `F` is dissipative exactly when the translation
/// image `{A t : t in F}` is injective and discrete; rotations of the compact
/// torus alone never produce a wandering set.
pub fn conservativity_at(
    spec: &ActionSpec,
    f_basis: &IntegerMatrix,
    level: u32,
) -> Result<ConservativityReport> {
    let d = spec.dim();
    if f_basis.rows() != d {
        return Err(Error::Dimension(format!(
            "free basis has {} rows, expected {d}",
            f_basis.rows()
        )));
    }
    let free_rank = f_basis.cols();
    let kernel = kernel_lattice(spec, level)?;
    let q = kernel.rank();
    if lattice_rank(f_basis) != free_rank
        || lattice_rank(&kernel.basis.hcat(f_basis)?) != q + free_rank
    {
        return Err(Error::FreeBasisMeetsKernel);
    }

    // the 2^{-level} factor is a common scalar and does not affect any rank
    let field = spec.field();
    let trans = spec.translation_in_lattice();
    let images: Vec<Vec<QuadraticNumber>> = f_basis
        .columns()
        .iter()
        .map(|col| {
            trans
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(col)
                        .fold(QuadraticNumber::zero(field), |acc, (a, n)| {
                            acc + a.scale(&BigRational::from_integer(n.clone()))
                        })
                })
                .collect()
        })
        .collect();
    let (image_z_rank, image_real_rank) = if spec.translation_dim() == 0 {
        (0, 0)
    } else {
        let split: Vec<Vec<BigRational>> = images.iter().map(|v| split_components(v)).collect();
        (rational_rank(&split), quadratic_rank(&images))
    };
    let injective = image_z_rank == free_rank;
    let discrete = image_z_rank == image_real_rank;
    Ok(ConservativityReport {
        free_rank,
        image_z_rank,
        image_real_rank,
        injective,
        discrete,
        conservative: !(injective && discrete),
    })
}

/// Conservativity of `{phi_t : t in F}` for `F` given in `Gamma_0` coordinates.
pub fn is_conservative(spec: &ActionSpec, f_basis: &IntegerMatrix) -> Result<bool> {
    Ok(conservativity_at(spec, f_basis, 0)?.conservative)
}

pub fn is_conservative_at(spec: &ActionSpec, f_basis: &IntegerMatrix, level: u32) -> Result<bool> {
    Ok(conservativity_at(spec, f_basis, level)?.conservative)
}
