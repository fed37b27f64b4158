use serde::Serialize;

use super::ks::ks_one_sample;
use super::scaling::Tolerances;
use crate::action::{classify, Classification};
use crate::error::{Error, Result};
use crate::model::FieldModel;
use crate::simulator::{bt_rate_exact, tail_constant, MaximaDataset};

/// Smallest replication count accepted by [`frechet_gof`].
pub const MIN_GOF_REPLICATIONS: usize = 100;

/// `P(K Z <= z) = exp(-(z / K)^{-alpha})` for standard Frechet `Z`.
pub fn frechet_cdf(z: f64, alpha: f64, scale: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else {
        (-(z / scale).powf(-alpha)).exp()
    }
}

/// `K (-ln u)^{-1/alpha}`; NaN outside `0 < u < 1`, `K > 0`.
pub fn frechet_quantile(u: f64, alpha: f64, scale: f64) -> f64 {
    if !(u > 0.0 && u < 1.0 && scale > 0.0) {
        return f64::NAN;
    }
    scale * (-u.ln()).powf(-1.0 / alpha)
}

/// `K = C_alpha^{1/alpha} K_X`, with `K_X^alpha = lim T^{-p} b(T)^alpha`
/// from the closed form of `b(T)`.
pub fn limit_scale_prediction(model: &FieldModel) -> Result<f64> {
    let c = classify(&model.spec, model.alpha)?;
    limit_scale_for(model, &c)
}

pub(crate) fn limit_scale_for(model: &FieldModel, c: &Classification) -> Result<f64> {
    if c.conservative {
        return Err(Error::Conservative);
    }
    let rate = bt_rate_exact(model)?;
    if c.p != 1 {
        return Err(Error::Unsupported(format!(
            "closed-form b(T) limit needs p = 1, got p = {}",
            c.p
        )));
    }
    let alpha = model.alpha;
    Ok((tail_constant(alpha) * rate).powf(1.0 / alpha))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrechetFit {
    pub alpha: f64,
    pub scale: f64,
    /// Normalizing exponent `p / alpha`.
    pub exponent: f64,
    /// `(t, KS distance of t^{-p/alpha} M_t)` along the ladder.
    pub ks_by_t: Vec<(f64, f64)>,
    pub threshold: f64,
    pub max_rise: f64,
    pub pass: bool,
}

/// KS distances between `t^{-p/alpha} M_t` and `K Z_alpha` per scale.
///
/// Passes when the last distance is below `tol.ks_threshold` and no step
/// along the ladder increases it by more than `tol.ks_rise`.
pub fn frechet_gof(
    dataset: &MaximaDataset,
    classification: &Classification,
    scale: f64,
    tol: &Tolerances,
) -> Result<FrechetFit> {
    if classification.conservative {
        return Err(Error::Conservative);
    }
    if dataset.replications() < MIN_GOF_REPLICATIONS {
        return Err(Error::Dataset(format!(
            "Frechet fit needs at least {MIN_GOF_REPLICATIONS} replications, got {}",
            dataset.replications()
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Parameter(format!(
            "limit scale must be positive, got {scale}"
        )));
    }
    let alpha = dataset.meta.alpha;
    let exponent = classification.p as f64 / alpha;
    let ks_by_t: Vec<(f64, f64)> = dataset
        .t_ladder()
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let norm = t.powf(-exponent);
            let xs: Vec<f64> = dataset.column(j).iter().map(|m| m * norm).collect();
            (t, ks_one_sample(&xs, |z| frechet_cdf(z, alpha, scale)))
        })
        .collect();
    let last = ks_by_t.last().map(|p| p.1).unwrap_or(1.0);
    let steady = ks_by_t.windows(2).all(|w| w[1].1 - w[0].1 <= tol.ks_rise);
    Ok(FrechetFit {
        alpha,
        scale,
        exponent,
        ks_by_t,
        threshold: tol.ks_threshold,
        max_rise: tol.ks_rise,
        pass: last < tol.ks_threshold && steady,
    })
}
