use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::frechet::{frechet_gof, limit_scale_for, MIN_GOF_REPLICATIONS};
use super::scaling::{estimate_scaling_exponent, Tolerances, Verdict};
use crate::action::{classify, LimitBranch};
use crate::error::{Error, Result};
use crate::model::FieldModel;
use crate::simulator::MaximaDataset;

/// `(t, value)` pairs serialized as a JSON object in ladder order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ByScale(pub Vec<(f64, f64)>);

impl Serialize for ByScale {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (t, v) in &self.0 {
            m.serialize_entry(&t.to_string(), v)?;
        }
        m.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictReport {
    pub slope: f64,
    pub stderr: f64,
    pub predicted: f64,
    pub verdict: Verdict,
    pub ks_by_t: ByScale,
    pub expected: LimitBranch,
    /// Verdict agrees with the classified branch.
    pub matches: bool,
    pub model_digest: String,
    pub p: usize,
    pub alpha: f64,
    pub medians: ByScale,
    pub scaled_medians: ByScale,
    pub limit_scale: Option<f64>,
    pub frechet_pass: Option<bool>,
    pub tolerances: Tolerances,
    pub notes: Vec<String>,
}

impl VerdictReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data") + "\n"
    }
}

/// Scaling regression, plus the Frechet fit when the action is dissipative
/// and the limit scale has a closed form.
pub fn build_report(
    dataset: &MaximaDataset,
    model: &FieldModel,
    tol: &Tolerances,
) -> Result<VerdictReport> {
    if dataset.meta.model_digest != model.digest() {
        return Err(Error::DigestMismatch {
            dataset: dataset.meta.model_digest.clone(),
            model: model.digest().to_string(),
        });
    }
    let c = classify(&model.spec, model.alpha)?;
    let scaling = estimate_scaling_exponent(dataset, c.p, tol)?;
    let mut notes = vec![
        "thresholds are finite-sample engineering choices; the limit theorem gives no convergence rate".to_string(),
    ];
    let (mut limit_scale, mut frechet_pass, mut ks_by_t) = (None, None, ByScale::default());
    if !c.conservative {
        match limit_scale_for(model, &c) {
            Ok(k) => {
                limit_scale = Some(k);
                if dataset.replications() >= MIN_GOF_REPLICATIONS {
                    let fit = frechet_gof(dataset, &c, k, tol)?;
                    frechet_pass = Some(fit.pass);
                    ks_by_t = ByScale(fit.ks_by_t);
                } else {
                    notes.push(format!(
                        "Frechet fit skipped: needs at least {MIN_GOF_REPLICATIONS} replications"
                    ));
                }
            }
            Err(Error::Unsupported(why)) => notes.push(format!("Frechet fit skipped: {why}")),
            Err(e) => return Err(e),
        }
    }
    let matches = matches!(
        (scaling.verdict, c.branch()),
        (Verdict::DissipativeConsistent, LimitBranch::ScaledFrechet)
            | (Verdict::ConservativeConsistent, LimitBranch::DegenerateZero)
    );
    let pair = |v: &[f64]| ByScale(scaling.t.iter().cloned().zip(v.iter().cloned()).collect());
    Ok(VerdictReport {
        slope: scaling.slope,
        stderr: scaling.stderr,
        predicted: scaling.predicted,
        verdict: scaling.verdict,
        ks_by_t,
        expected: c.branch(),
        matches,
        model_digest: model.digest().to_string(),
        p: c.p,
        alpha: model.alpha,
        medians: pair(&scaling.medians),
        scaled_medians: pair(&scaling.scaled_medians),
        limit_scale,
        frechet_pass,
        tolerances: tol.clone(),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn by_scale_keeps_ladder_order() {
        let v = ByScale(vec![(8.0, 0.1), (16.0, 0.2), (0.5, 0.3)]);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"8":0.1,"16":0.2,"0.5":0.3}"#
        );
    }
}
