use num_bigint::BigInt;
use serde::Serialize;

use super::dimension::{
    conservativity_at, effective_dimension, ConservativityReport, EffectiveDimension,
};
use super::spec::ActionSpec;
use crate::error::{Error, Result};

/// Refinement levels examined when classifying.
pub const DEFAULT_MAX_LEVEL: u32 = 3;

/// Predicted behaviour of `t^{-p/alpha} M_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitBranch {
    /// Converges weakly to `K Z_alpha` with `Z_alpha` standard Frechet.
    ScaledFrechet,
    /// Converges to zero in probability.
    DegenerateZero,
}

impl LimitBranch {
    pub fn label(self) -> &'static str {
        match self {
            Self::ScaledFrechet => "dissipative",
            Self::DegenerateZero => "conservative",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub p: usize,
    pub conservative: bool,
    pub alpha: Option<f64>,
    pub predicted_exponent: Option<f64>,
    pub torsion_profile: Vec<Vec<BigInt>>,
    pub conservativity: ConservativityReport,
    pub dimension: EffectiveDimension,
}

impl Classification {
    pub fn branch(&self) -> LimitBranch {
        if self.conservative {
            LimitBranch::DegenerateZero
        } else {
            LimitBranch::ScaledFrechet
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let level0 = &self.dimension.level(0).quotient;
        serde_json::json!({
            "p": self.p,
            "conservative": self.conservative,
            "branch": self.branch(),
            "alpha": self.alpha,
            "predicted_exponent": self.predicted_exponent,
            "torsion_profile": self
                .torsion_profile
                .iter()
                .map(|l| l.iter().map(ToString::to_string).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "level0": level0.to_json_value(),
            "conservativity": self.conservativity,
        })
    }
}

/// Dimension and conservativity of the action, without a stability index.
pub fn classify_action(spec: &ActionSpec) -> Result<Classification> {
    let dimension = effective_dimension(spec, DEFAULT_MAX_LEVEL)?;
    let free_lift = &dimension.level(0).quotient.free_lift_basis;
    let conservativity = conservativity_at(spec, free_lift, 0)?;
    Ok(Classification {
        p: dimension.p,
        conservative: conservativity.conservative,
        alpha: None,
        predicted_exponent: None,
        torsion_profile: dimension.torsion_profile(),
        conservativity,
        dimension,
    })
}

/// Full classification with predicted growth exponent `p / alpha`.
pub fn classify(spec: &ActionSpec, alpha: f64) -> Result<Classification> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Parameter(format!(
            "stability index must lie in (0, 2), got {alpha}"
        )));
    }
    let mut c = classify_action(spec)?;
    c.alpha = Some(alpha);
    c.predicted_exponent = Some(c.p as f64 / alpha);
    Ok(c)
}
