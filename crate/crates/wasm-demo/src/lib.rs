//! Browser bindings: classify an action, tabulate `b(T)`, and run a small
//! partial-maxima experiment. Every function takes the model as JSON text
//! and returns JSON text.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use stable_field_lab::action::classify;
use stable_field_lab::analysis::{
    build_report, frechet_quantile, limit_scale_prediction, median, Tolerances,
};
use stable_field_lab::model::{parse_field_model, presets};
use stable_field_lab::simulator::{
    bt_alpha_exact_indicator, bt_alpha_numeric, partial_maxima, GridSpec, Method,
    SimulationOptions, DEFAULT_BT_BUDGET,
};

/// Replication cap for the in-browser experiment.
const MAX_REPS: usize = 400;
/// Point budget for the in-browser experiment.
const DEMO_POINT_BUDGET: u128 = 2_000_000;

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// JSON text of a bundled model, for prefilling the editor.
#[wasm_bindgen]
pub fn preset(name: &str) -> Result<String, JsError> {
    match name {
        "example3" => Ok(presets::EXAMPLE3_JSON.into()),
        "nadkarni" => Ok(presets::NADKARNI_JSON.into()),
        "nadkarni_alt_gamma0" => Ok(presets::NADKARNI_ALT_GAMMA0_JSON.into()),
        _ => Err(JsError::new(&format!("unknown preset {name}"))),
    }
}

pub fn classify_value(text: &str) -> Result<Value, String> {
    let m = parse_field_model(text).map_err(|e| e.to_string())?;
    let c = classify(&m.spec, m.alpha).map_err(|e| e.to_string())?;
    let mut v = c.to_json_value();
    v["limit_scale"] = limit_scale_prediction(&m).ok().into();
    Ok(v)
}

/// Dimension, torsion profile, free lift and conservativity.
#[wasm_bindgen]
pub fn classify_model(text: &str) -> Result<String, JsError> {
    classify_value(text).map(|v| v.to_string()).map_err(err)
}

pub fn bt_value(text: &str, t_values: &[f64], mesh: f64, level: u32) -> Result<Value, String> {
    let m = parse_field_model(text).map_err(|e| e.to_string())?;
    let c = classify(&m.spec, m.alpha).map_err(|e| e.to_string())?;
    let exact = m.spec.translation_dim() == 1 && m.kernel.len() == 1;
    let p = c.p as f64;
    let rows = t_values
        .iter()
        .map(|&t| {
            let b_alpha = if exact {
                bt_alpha_exact_indicator(&m, t)
            } else {
                bt_alpha_numeric(&m, t, mesh, level, DEFAULT_BT_BUDGET / 20)
            }
            .map_err(|e| e.to_string())?;
            Ok(json!({
                "t": t,
                "b_alpha": b_alpha,
                "scaled_alpha": b_alpha / t.powf(p),
            }))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(json!({ "exact": exact, "p": c.p, "rows": rows }))
}

/// `b(T)^alpha` and `T^{-p} b(T)^alpha` along `t_values`.
#[wasm_bindgen]
pub fn bt_curve(text: &str, t_values: Vec<f64>, mesh: f64, level: u32) -> Result<String, JsError> {
    bt_value(text, &t_values, mesh, level)
        .map(|v| v.to_string())
        .map_err(err)
}

pub fn maxima_value(
    text: &str,
    ladder: Vec<f64>,
    level: u32,
    reps: usize,
    seed: u64,
    series: bool,
) -> Result<Value, String> {
    if reps > MAX_REPS {
        return Err(format!("at most {MAX_REPS} replications in the browser"));
    }
    let m = parse_field_model(text).map_err(|e| e.to_string())?;
    let grid = GridSpec::new(ladder, level, reps, seed).map_err(|e| e.to_string())?;
    let opts = SimulationOptions {
        point_budget: DEMO_POINT_BUDGET,
        ..SimulationOptions::with_method(if series { Method::Series } else { Method::Cell })
    };
    let data = partial_maxima(&m, &grid, &opts).map_err(|e| e.to_string())?;
    let medians: Vec<f64> = (0..grid.t_ladder.len())
        .map(|j| median(&data.column(j)))
        .collect();
    let report = build_report(&data, &m, &Tolerances::default()).ok();
    let c = classify(&m.spec, m.alpha).map_err(|e| e.to_string())?;
    let exponent = c.p as f64 / m.alpha;
    // empirical vs Frechet quantiles at the largest scale
    let qq = limit_scale_prediction(&m).ok().map(|k| {
        let j = grid.t_ladder.len() - 1;
        let t = grid.t_ladder[j];
        let mut z: Vec<f64> = data
            .column(j)
            .iter()
            .map(|x| x * t.powf(-exponent))
            .collect();
        z.sort_by(f64::total_cmp);
        let n = z.len() as f64;
        z.iter()
            .enumerate()
            .map(|(i, &x)| [frechet_quantile((i as f64 + 0.5) / n, m.alpha, k), x])
            .collect::<Vec<_>>()
    });
    Ok(json!({
        "t": grid.t_ladder,
        "medians": medians,
        "exponent": exponent,
        "report": report,
        "qq": qq,
    }))
}

/// Partial maxima over `ladder`, their medians, the verdict report when the
/// ladder is long enough, and a Frechet QQ table at the largest scale.
#[wasm_bindgen]
pub fn simulate_maxima(
    text: &str,
    ladder: Vec<f64>,
    level: u32,
    reps: usize,
    seed: u64,
    series: bool,
) -> Result<String, JsError> {
    maxima_value(text, ladder, level, reps, seed, series)
        .map(|v| v.to_string())
        .map_err(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_example() {
        let v = classify_value(presets::EXAMPLE3_JSON).unwrap();
        assert_eq!(v["p"], 1);
        assert_eq!(v["conservative"], false);
        assert!((v["limit_scale"].as_f64().unwrap() - 1.36557).abs() < 1e-4);
        let v = classify_value(presets::NADKARNI_JSON).unwrap();
        assert_eq!(v["limit_scale"], Value::Null);
    }

    #[test]
    fn bt_example() {
        let v = bt_value(presets::EXAMPLE3_JSON, &[1.0, 10.0], 0.01, 3).unwrap();
        assert_eq!(v["exact"], true);
        assert_eq!(v["rows"][1]["scaled_alpha"], 4.1);
    }

    #[test]
    fn maxima_small() {
        let v = maxima_value(presets::EXAMPLE3_JSON, vec![2.0, 4.0, 8.0], 1, 60, 1, false).unwrap();
        assert_eq!(v["medians"].as_array().unwrap().len(), 3);
        assert!(v["report"].is_object());
        assert!(maxima_value(presets::EXAMPLE3_JSON, vec![2.0], 1, 10_000, 1, false).is_err());
    }
}
