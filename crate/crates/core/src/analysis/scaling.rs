use serde::{Deserialize, Serialize};

use super::ks::median;
use crate::error::{Error, Result};
use crate::simulator::MaximaDataset;

pub const MIN_SCALES: usize = 3;
pub const MIN_REPLICATIONS: usize = 50;

/// Decision thresholds; all are engineering choices for `R ~ 200`, `t <= 64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Largest accepted `|slope - p/alpha|`.
    pub slope: f64,
    /// Largest accepted max/min ratio of the scaled medians.
    pub median_ratio: f64,
    /// KS threshold at the largest scale.
    pub ks_threshold: f64,
    /// Largest accepted increase of the KS distance between consecutive scales.
    pub ks_rise: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            slope: 0.15,
            median_ratio: 3.0,
            ks_threshold: 0.15,
            ks_rise: 0.05,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    DissipativeConsistent,
    ConservativeConsistent,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::DissipativeConsistent => "dissipative-consistent",
            Self::ConservativeConsistent => "conservative-consistent",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub t: Vec<f64>,
    pub medians: Vec<f64>,
    /// `t^{-p/alpha}` times the medians.
    pub scaled_medians: Vec<f64>,
    pub predicted: f64,
    pub verdict: Verdict,
}

/// Ordinary least squares `y = a + b x`: `(b, se(b), a)`.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let stderr = if x.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (slope, stderr, intercept)
}

/// Medians of `t^{-exponent} M_t` along the ladder.
pub fn scaled_medians(dataset: &MaximaDataset, exponent: f64) -> Vec<f64> {
    dataset
        .t_ladder()
        .iter()
        .enumerate()
        .map(|(j, &t)| median(&dataset.column(j)) * t.powf(-exponent))
        .collect()
}

/// Verdict rules, checked in order:
///
/// 1. dissipative-consistent: `|slope - p/alpha| <= tol.slope` and the
///    scaled medians have max/min ratio below `tol.median_ratio`;
/// 2. conservative-consistent: the scaled medians strictly decrease;
/// 3. inconclusive otherwise.
pub fn verdict(slope: f64, predicted: f64, scaled: &[f64], tol: &Tolerances) -> Verdict {
    let max = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    if (slope - predicted).abs() <= tol.slope && max / min < tol.median_ratio {
        Verdict::DissipativeConsistent
    } else if scaled.windows(2).all(|w| w[1] < w[0]) {
        Verdict::ConservativeConsistent
    } else {
        Verdict::Inconclusive
    }
}

/// Slope of `log median M_t` against `log t`, compared with `p / alpha`.
pub fn estimate_scaling_exponent(
    dataset: &MaximaDataset,
    p: usize,
    tol: &Tolerances,
) -> Result<ScalingReport> {
    let t = dataset.t_ladder().to_vec();
    if t.len() < MIN_SCALES {
        return Err(Error::Dataset(format!(
            "need at least {MIN_SCALES} scales, got {}",
            t.len()
        )));
    }
    if dataset.replications() < MIN_REPLICATIONS {
        return Err(Error::Dataset(format!(
            "need at least {MIN_REPLICATIONS} replications, got {}",
            dataset.replications()
        )));
    }
    if let Some(j) = (0..t.len()).find(|&j| dataset.column(j).iter().all(|&m| m == 0.0)) {
        return Err(Error::Dataset(format!("all maxima vanish at t = {}", t[j])));
    }
    let medians: Vec<f64> = (0..t.len()).map(|j| median(&dataset.column(j))).collect();
    if medians.iter().any(|&m| m <= 0.0) {
        return Err(Error::Dataset(
            "a median maximum is zero; log-log fit undefined".into(),
        ));
    }
    let x: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = medians.iter().map(|v| v.ln()).collect();
    let (slope, stderr, intercept) = ols(&x, &y);
    let predicted = p as f64 / dataset.meta.alpha;
    let scaled = scaled_medians(dataset, predicted);
    Ok(ScalingReport {
        slope,
        stderr,
        intercept,
        verdict: verdict(slope, predicted, &scaled, tol),
        t,
        medians,
        scaled_medians: scaled,
        predicted,
    })
}

/// Medians of `M_t` on two skeleton levels of the same ladder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelComparison {
    pub level: u32,
    pub refined_level: u32,
    pub t: Vec<f64>,
    pub medians: Vec<f64>,
    pub refined_medians: Vec<f64>,
    /// `refined / coarse - 1` per scale.
    pub relative_change: Vec<f64>,
}

/// Compares datasets simulated on `Gamma_n` and a finer `Gamma_{n'}`.
///
/// No rate for the skeleton error is known, so this only reports how much
/// the medians move under refinement.
pub fn compare_levels(coarse: &MaximaDataset, fine: &MaximaDataset) -> Result<LevelComparison> {
    if coarse.meta.model_digest != fine.meta.model_digest {
        return Err(Error::Dataset("datasets come from different models".into()));
    }
    if coarse.t_ladder() != fine.t_ladder() {
        return Err(Error::Dataset("datasets use different t ladders".into()));
    }
    let (level, refined_level) = (coarse.meta.grid.level, fine.meta.grid.level);
    if refined_level <= level {
        return Err(Error::Dataset(format!(
            "refined level {refined_level} is not finer than {level}"
        )));
    }
    let t = coarse.t_ladder().to_vec();
    let medians: Vec<f64> = (0..t.len()).map(|j| median(&coarse.column(j))).collect();
    let refined_medians: Vec<f64> = (0..t.len()).map(|j| median(&fine.column(j))).collect();
    let relative_change = medians
        .iter()
        .zip(&refined_medians)
        .map(|(a, b)| b / a - 1.0)
        .collect();
    Ok(LevelComparison {
        level,
        refined_level,
        t,
        medians,
        refined_medians,
        relative_change,
    })
}
