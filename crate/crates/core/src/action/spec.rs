use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lattice::linalg::quadratic_rank;
use crate::lattice::quadratic::{is_squarefree, QuadraticNumber};

/// A measure-preserving `R^d` action on `R^k x T^r` of translation and
/// rotation type:
///
/// `phi_t(s, zeta) = (s + A t, zeta_j * exp(2 pi i <C_j, t>))`
///
/// indexed through the generating lattice `Gamma_0 = gamma0 * Z^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionSpec {
    d: usize,
    field: u64,
    gamma0: Vec<Vec<QuadraticNumber>>,
    translation: Vec<Vec<QuadraticNumber>>,
    rotation: Vec<Vec<BigRational>>,
}

fn check_row_lengths<T>(what: &str, rows: &[Vec<T>], d: usize) -> Result<()> {
    match rows.iter().position(|r| r.len() != d) {
        Some(i) => Err(Error::InvalidSpec(format!(
            "{what} row {i} has {} entries, expected d = {d}",
            rows[i].len()
        ))),
        None => Ok(()),
    }
}

impl ActionSpec {
    pub fn new(
        d: usize,
        field: u64,
        gamma0: Vec<Vec<QuadraticNumber>>,
        translation: Vec<Vec<QuadraticNumber>>,
        rotation: Vec<Vec<BigRational>>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidSpec(
                "index dimension d must be positive".into(),
            ));
        }
        if !is_squarefree(field) {
            return Err(Error::InvalidSpec(format!(
                "field discriminant D = {field} must be a squarefree positive integer"
            )));
        }
        if gamma0.len() != d {
            return Err(Error::InvalidSpec(format!(
                "gamma0 has {} rows, expected {d}",
                gamma0.len()
            )));
        }
        check_row_lengths("gamma0", &gamma0, d)?;
        check_row_lengths("translation", &translation, d)?;
        check_row_lengths("rotation", &rotation, d)?;
        if translation.is_empty() && rotation.is_empty() {
            return Err(Error::InvalidSpec(
                "action needs at least one translation or rotation coordinate (k + r >= 1)".into(),
            ));
        }
        for x in gamma0.iter().chain(&translation).flatten() {
            if !x.is_rational() && x.discriminant() != field {
                return Err(Error::InvalidSpec(format!(
                    "entry {x} lies outside Q(sqrt {field})"
                )));
            }
        }
        let relabel = |rows: Vec<Vec<QuadraticNumber>>| -> Vec<Vec<QuadraticNumber>> {
            rows.into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|x| {
                            QuadraticNumber::new(
                                x.rational_part().clone(),
                                x.surd_part().clone(),
                                field,
                            )
                            .expect("validated above")
                        })
                        .collect()
                })
                .collect()
        };
        let gamma0 = relabel(gamma0);
        let translation = relabel(translation);
        if quadratic_rank(&gamma0) != d {
            return Err(Error::InvalidSpec(
                "gamma0 is not invertible over the field (rank < d)".into(),
            ));
        }
        Ok(Self {
            d,
            field,
            gamma0,
            translation,
            rotation,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn field(&self) -> u64 {
        self.field
    }

    /// Number of translation coordinates `k`.
    pub fn translation_dim(&self) -> usize {
        self.translation.len()
    }

    /// Number of torus coordinates `r`.
    pub fn rotation_dim(&self) -> usize {
        self.rotation.len()
    }

    pub fn gamma0(&self) -> &[Vec<QuadraticNumber>] {
        &self.gamma0
    }

    pub fn translation(&self) -> &[Vec<QuadraticNumber>] {
        &self.translation
    }

    pub fn rotation(&self) -> &[Vec<BigRational>] {
        &self.rotation
    }

    /// Whether `gamma0` is diagonal.
    pub fn gamma0_is_diagonal(&self) -> bool {
        (0..self.d).all(|i| (0..self.d).all(|j| i == j || self.gamma0[i][j].is_zero()))
    }

    fn times_gamma0(&self, rows: &[Vec<QuadraticNumber>]) -> Vec<Vec<QuadraticNumber>> {
        rows.iter()
            .map(|row| {
                (0..self.d)
                    .map(|j| {
                        row.iter()
                            .zip(&self.gamma0)
                            .fold(QuadraticNumber::zero(self.field), |acc, (a, g)| {
                                acc + a * &g[j]
                            })
                    })
                    .collect()
            })
            .collect()
    }

    /// `A * Gamma_0`: translation applied to lattice coordinates.
    pub fn translation_in_lattice(&self) -> Vec<Vec<QuadraticNumber>> {
        self.times_gamma0(&self.translation)
    }

    /// `C * Gamma_0`: rotation frequencies in lattice coordinates.
    pub fn rotation_in_lattice(&self) -> Vec<Vec<QuadraticNumber>> {
        let c: Vec<Vec<QuadraticNumber>> = self
            .rotation
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| QuadraticNumber::rational(x.clone(), self.field))
                    .collect()
            })
            .collect();
        self.times_gamma0(&c)
    }

    /// Point `Gamma_0 * n` of `R^d`, exactly.
    pub fn lattice_point(&self, n: &[QuadraticNumber]) -> Vec<QuadraticNumber> {
        self.gamma0
            .iter()
            .map(|row| {
                row.iter()
                    .zip(n)
                    .fold(QuadraticNumber::zero(self.field), |acc, (g, x)| acc + g * x)
            })
            .collect()
    }

    /// Same action with a different generating lattice.
    pub fn with_gamma0(&self, gamma0: Vec<Vec<QuadraticNumber>>) -> Result<Self> {
        Self::new(
            self.d,
            self.field,
            gamma0,
            self.translation.clone(),
            self.rotation.clone(),
        )
    }
}
