//! The scale function `b(T)^alpha = ∫ sup_{t ∈ [-T,T]^d} |f(phi_t(s))|^alpha ds`.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed};

use super::grid::ladder_offsets;
use crate::error::{Error, Result};
use crate::lattice::quadratic::{rational_to_f64, QuadraticNumber};
use crate::model::FieldModel;

/// Default cap on `mesh cells x grid offsets` for [`bt_numeric`].
pub const DEFAULT_BT_BUDGET: u128 = 2_000_000_000;

fn single_interval(model: &FieldModel) -> Result<(&BigRational, &BigRational, &BigRational)> {
    if model.spec.translation_dim() != 1 || model.kernel.len() != 1 {
        return Err(Error::Unsupported(
            "exact b(T) needs one translation coordinate and a single box; use the numeric path"
                .into(),
        ));
    }
    let b = &model.kernel[0];
    Ok((&b.weight, &b.lower[0], &b.upper[0]))
}

/// `sum_j |A_j|`: the half-width of `{A t : t ∈ [-1,1]^d}`.
fn translation_spread(model: &FieldModel) -> QuadraticNumber {
    let field = model.spec.field();
    model.spec.translation()[0]
        .iter()
        .fold(QuadraticNumber::zero(field), |acc, a| acc + a.abs())
}

/// Lebesgue measure of `∪_{t ∈ [-T,T]^d} (box - A t) = [a - T s, b + T s]`,
/// `s = sum |A_j|`, exactly.
pub fn union_length_exact(model: &FieldModel, t: &BigRational) -> Result<QuadraticNumber> {
    if t.is_negative() {
        return Err(Error::Parameter("T must be nonnegative".into()));
    }
    let (_, a, b) = single_interval(model)?;
    let field = model.spec.field();
    let two_t = t * BigRational::from_integer(2.into());
    Ok(QuadraticNumber::rational(b - a, field) + translation_spread(model).scale(&two_t))
}

/// `b(T)^alpha = |w|^alpha (len + 2 T sum |A_j|)` for a single-box kernel on
/// one translation coordinate.
pub fn bt_alpha_exact_indicator(model: &FieldModel, t: f64) -> Result<f64> {
    let tr = BigRational::from_f64(t)
        .filter(|x| !x.is_negative())
        .ok_or_else(|| Error::Parameter(format!("T must be finite and nonnegative, got {t}")))?;
    let (w, _, _) = single_interval(model)?;
    let len = union_length_exact(model, &tr)?.to_f64();
    let w = rational_to_f64(w).abs();
    Ok(if w == 1.0 {
        len
    } else {
        w.powf(model.alpha) * len
    })
}

/// `b(T)`; see [`bt_alpha_exact_indicator`].
pub fn bt_exact_indicator(model: &FieldModel, t: f64) -> Result<f64> {
    Ok(bt_alpha_exact_indicator(model, t)?.powf(1.0 / model.alpha))
}

/// `lim_T T^{-1} b(T)^alpha = 2 |w|^alpha sum |A_j|` for the exact path.
pub fn bt_rate_exact(model: &FieldModel) -> Result<f64> {
    let (w, _, _) = single_interval(model)?;
    let wa = rational_to_f64(w).abs().powf(model.alpha);
    Ok(2.0 * wa * translation_spread(model).to_f64())
}

/// Midpoint-rule approximation of `b(T)` with the supremum taken over
/// `Gamma_m ∩ [-T,T]^d`.
///
/// The integration mesh depends only on `T` and `mesh`, so the value is
/// nondecreasing in `m` and in `T`.
pub fn bt_numeric(model: &FieldModel, t: f64, mesh: f64, m: u32, budget: u128) -> Result<f64> {
    Ok(bt_alpha_numeric(model, t, mesh, m, budget)?.powf(1.0 / model.alpha))
}

/// `b(T)^alpha`; see [`bt_numeric`].
pub fn bt_alpha_numeric(
    model: &FieldModel,
    t: f64,
    mesh: f64,
    m: u32,
    budget: u128,
) -> Result<f64> {
    if !(mesh.is_finite() && mesh > 0.0) {
        return Err(Error::Parameter(format!(
            "mesh must be positive, got {mesh}"
        )));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Parameter(format!(
            "T must be finite and nonnegative, got {t}"
        )));
    }
    let k = model.spec.translation_dim();
    let set = if t > 0.0 {
        ladder_offsets(&model.spec, &[t], m, budget)?
    } else {
        ladder_offsets(&model.spec, &[f64::MIN_POSITIVE], m, budget)?
    };
    let spread: Vec<f64> = model
        .spec
        .translation()
        .iter()
        .map(|row| row.iter().map(|a| a.to_f64().abs()).sum::<f64>() * t)
        .collect();
    let boxes: Vec<(f64, Vec<f64>, Vec<f64>)> = model
        .kernel
        .iter()
        .map(|b| (b.weight_f64(), b.lower_f64(), b.upper_f64()))
        .collect();
    let lo: Vec<f64> = (0..k)
        .map(|c| boxes.iter().map(|b| b.1[c]).fold(f64::INFINITY, f64::min) - spread[c])
        .collect();
    let hi: Vec<f64> = (0..k)
        .map(|c| {
            boxes
                .iter()
                .map(|b| b.2[c])
                .fold(f64::NEG_INFINITY, f64::max)
                + spread[c]
        })
        .collect();
    let dims: Vec<usize> = (0..k)
        .map(|c| ((hi[c] - lo[c]) / mesh).ceil().max(1.0) as usize)
        .collect();
    let cells: u128 = dims.iter().map(|&n| n as u128).product();
    if cells.saturating_mul(set.len() as u128) > budget {
        return Err(Error::Budget {
            what: "b(T) mesh cells x grid offsets",
            needed: cells.saturating_mul(set.len() as u128),
            budget,
        });
    }

    let mut offsets = set.offsets.clone();
    offsets.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let first: Vec<f64> = offsets.iter().map(|o| o[0]).collect();
    let (span_lo, span_hi) = (
        boxes.iter().map(|b| b.1[0]).fold(f64::INFINITY, f64::min),
        boxes
            .iter()
            .map(|b| b.2[0])
            .fold(f64::NEG_INFINITY, f64::max),
    );
    let f_at = |s: &[f64]| -> f64 {
        boxes
            .iter()
            .filter(|(_, a, b)| (0..k).all(|c| a[c] <= s[c] && s[c] <= b[c]))
            .map(|b| b.0)
            .sum()
    };
    let alpha = model.alpha;
    let cell_vol = mesh.powi(k as i32);
    let mut total = 0.0;
    let mut idx = vec![0usize; k];
    let mut shifted = vec![0.0; k];
    loop {
        let s: Vec<f64> = (0..k)
            .map(|c| lo[c] + (idx[c] as f64 + 0.5) * mesh)
            .collect();
        let l = first.partition_point(|&x| x < span_lo - s[0]);
        let r = first.partition_point(|&x| x <= span_hi - s[0]);
        let mut sup = 0.0f64;
        for o in &offsets[l..r] {
            for c in 0..k {
                shifted[c] = s[c] + o[c];
            }
            sup = sup.max(f_at(&shifted).abs());
        }
        total += sup.powf(alpha) * cell_vol;
        let mut c = 0;
        loop {
            if c == k {
                return Ok(total);
            }
            idx[c] += 1;
            if idx[c] < dims[c] {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
}
