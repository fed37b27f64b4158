//! JSON documents for action specs and field models.
//!
//! Action parameters are exact: rationals are strings such as `"3/2"` or
//! integers, and quadratic entries are `{"a": "p/q", "b": "r/s"}` meaning
//! `a + b sqrt(D)`. A bare rational is accepted where a quadratic entry is
//! expected. Field models extend the action document with `"alpha"` and a
//! box-indicator `"kernel"`.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::action::ActionSpec;
use crate::error::{Error, Result};
use crate::lattice::quadratic::{
    parse_rational, rational_to_f64, rational_to_string, QuadraticNumber,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawRational {
    Int(i64),
    Str(String),
}

impl RawRational {
    fn parse(&self) -> Result<BigRational> {
        match self {
            Self::Int(i) => Ok(BigRational::from_integer((*i).into())),
            Self::Str(s) => parse_rational(s),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawQuadratic {
    Pair {
        a: RawRational,
        #[serde(default)]
        b: Option<RawRational>,
    },
    Plain(RawRational),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawReal {
    Num(f64),
    Str(String),
}

impl RawReal {
    fn parse(&self) -> Result<BigRational> {
        match self {
            Self::Num(x) => BigRational::from_f64(*x)
                .ok_or_else(|| Error::InvalidModel(format!("non-finite number {x}"))),
            Self::Str(s) => parse_rational(s),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    w: RawReal,
    a: Vec<RawReal>,
    b: Vec<RawReal>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    d: usize,
    #[serde(rename = "D")]
    field: u64,
    gamma0: Vec<Vec<RawQuadratic>>,
    #[serde(default)]
    translation: Vec<Vec<RawQuadratic>>,
    #[serde(default)]
    rotation: Vec<Vec<RawRational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<RawReal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernel: Option<Vec<RawBox>>,
}

fn parse_quadratic(x: &RawQuadratic, field: u64) -> Result<QuadraticNumber> {
    let (a, b) = match x {
        RawQuadratic::Pair { a, b } => (
            a.parse()?,
            b.as_ref()
                .map(RawRational::parse)
                .transpose()?
                .unwrap_or_else(BigRational::zero),
        ),
        RawQuadratic::Plain(a) => (a.parse()?, BigRational::zero()),
    };
    QuadraticNumber::new(a, b, field)
}

fn parse_matrix(rows: &[Vec<RawQuadratic>], field: u64) -> Result<Vec<Vec<QuadraticNumber>>> {
    rows.iter()
        .map(|r| r.iter().map(|x| parse_quadratic(x, field)).collect())
        .collect()
}

fn spec_from_raw(raw: &RawModel) -> Result<ActionSpec> {
    let gamma0 = parse_matrix(&raw.gamma0, raw.field)?;
    let translation = parse_matrix(&raw.translation, raw.field)?;
    let rotation = raw
        .rotation
        .iter()
        .map(|r| r.iter().map(RawRational::parse).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    ActionSpec::new(raw.d, raw.field, gamma0, translation, rotation)
}

/// One weighted box `w * 1_[a, b]` on the translation coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedBox {
    pub weight: BigRational,
    pub lower: Vec<BigRational>,
    pub upper: Vec<BigRational>,
}

impl WeightedBox {
    pub fn weight_f64(&self) -> f64 {
        rational_to_f64(&self.weight)
    }

    pub fn lower_f64(&self) -> Vec<f64> {
        self.lower.iter().map(rational_to_f64).collect()
    }

    pub fn upper_f64(&self) -> Vec<f64> {
        self.upper.iter().map(rational_to_f64).collect()
    }

    pub fn volume(&self) -> BigRational {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| b - a)
            .product()
    }

    pub fn contains(&self, s: &[f64]) -> bool {
        self.lower_f64()
            .iter()
            .zip(self.upper_f64())
            .zip(s)
            .all(|((a, b), x)| *a <= *x && *x <= b)
    }
}

/// Stationary SaS field `X_t = ∫ f(s + A t) M(ds, dzeta)` with a box-indicator
/// kernel `f` that is constant along the torus factor.
#[derive(Clone, Debug)]
pub struct FieldModel {
    pub spec: ActionSpec,
    pub alpha: f64,
    pub kernel: Vec<WeightedBox>,
    digest: String,
}

impl FieldModel {
    pub fn new(spec: ActionSpec, alpha: f64, kernel: Vec<WeightedBox>) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::InvalidModel(format!(
                "alpha must lie in (0, 2), got {alpha}"
            )));
        }
        let k = spec.translation_dim();
        if k == 0 {
            return Err(Error::InvalidModel(
                "field models need at least one translation coordinate".into(),
            ));
        }
        if kernel.is_empty() || kernel.iter().all(|b| b.weight.is_zero()) {
            return Err(Error::InvalidModel("kernel has no nonzero box".into()));
        }
        for (i, b) in kernel.iter().enumerate() {
            if b.lower.len() != k || b.upper.len() != k {
                return Err(Error::InvalidModel(format!(
                    "kernel box {i} has dimension {}, translation dimension is {k}",
                    b.lower.len()
                )));
            }
            if b.lower.iter().zip(&b.upper).any(|(a, c)| a >= c) {
                return Err(Error::InvalidModel(format!(
                    "kernel box {i} has nonpositive volume"
                )));
            }
        }
        let mut m = Self {
            spec,
            alpha,
            kernel,
            digest: String::new(),
        };
        m.digest = digest_of(&m.to_json_string());
        Ok(m)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// Kernel `f` scaled by `c`.
    pub fn scaled(&self, c: &BigRational) -> Result<Self> {
        let kernel = self
            .kernel
            .iter()
            .map(|b| WeightedBox {
                weight: &b.weight * c,
                ..b.clone()
            })
            .collect();
        Self::new(self.spec.clone(), self.alpha, kernel)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.spec.clone(), alpha, self.kernel.clone())
    }

    /// `f(s)` at a point of the translation space.
    pub fn kernel_at(&self, s: &[f64]) -> f64 {
        self.kernel
            .iter()
            .filter(|b| b.contains(s))
            .map(WeightedBox::weight_f64)
            .sum()
    }

    /// `||f||_alpha^alpha` for disjoint boxes; overlapping boxes are
    /// integrated on a mesh.
    pub fn kernel_norm_alpha(&self) -> f64 {
        crate::simulator::kernel_norm_alpha(self)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&to_raw(&self.spec, Some(self))).expect("plain data")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&to_raw(&self.spec, Some(self))).expect("plain data")
    }
}

fn digest_of(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

fn quad_raw(x: &QuadraticNumber) -> RawQuadratic {
    RawQuadratic::Pair {
        a: RawRational::Str(rational_to_string(x.rational_part())),
        b: Some(RawRational::Str(rational_to_string(x.surd_part()))),
    }
}

fn to_raw(spec: &ActionSpec, model: Option<&FieldModel>) -> RawModel {
    let mat = |rows: &[Vec<QuadraticNumber>]| -> Vec<Vec<RawQuadratic>> {
        rows.iter()
            .map(|r| r.iter().map(quad_raw).collect())
            .collect()
    };
    let real = |x: &BigRational| RawReal::Str(rational_to_string(x));
    RawModel {
        d: spec.dim(),
        field: spec.field(),
        gamma0: mat(spec.gamma0()),
        translation: mat(spec.translation()),
        rotation: spec
            .rotation()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| RawRational::Str(rational_to_string(x)))
                    .collect()
            })
            .collect(),
        alpha: model.map(|m| RawReal::Num(m.alpha)),
        kernel: model.map(|m| {
            m.kernel
                .iter()
                .map(|b| RawBox {
                    w: real(&b.weight),
                    a: b.lower.iter().map(real).collect(),
                    b: b.upper.iter().map(real).collect(),
                })
                .collect()
        }),
    }
}

/// Canonical JSON of an action spec.
pub fn spec_to_json(spec: &ActionSpec) -> String {
    serde_json::to_string_pretty(&to_raw(spec, None)).expect("plain data")
}

/// Parses an action spec document. Field-model keys, if present, are ignored.
pub fn parse_action_spec(json: &str) -> Result<ActionSpec> {
    let raw: RawModel = serde_json::from_str(json)?;
    spec_from_raw(&raw)
}

/// Parses a field-model document (action spec plus `alpha` and `kernel`).
pub fn parse_field_model(json: &str) -> Result<FieldModel> {
    let raw: RawModel = serde_json::from_str(json)?;
    let spec = spec_from_raw(&raw)?;
    let alpha = raw
        .alpha
        .as_ref()
        .ok_or_else(|| Error::InvalidModel("missing \"alpha\"".into()))?
        .parse()?;
    let kernel = raw
        .kernel
        .as_ref()
        .ok_or_else(|| Error::InvalidModel("missing \"kernel\"".into()))?
        .iter()
        .map(|b| {
            Ok(WeightedBox {
                weight: b.w.parse()?,
                lower: b.a.iter().map(RawReal::parse).collect::<Result<_>>()?,
                upper: b.b.iter().map(RawReal::parse).collect::<Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if alpha.is_negative() {
        return Err(Error::InvalidModel("alpha must be positive".into()));
    }
    FieldModel::new(spec, rational_to_f64(&alpha), kernel)
}

/// Bundled models.
pub mod presets {
    use super::{parse_field_model, FieldModel};

    pub const EXAMPLE3_JSON: &str = include_str!("../models/example3.json");
    pub const NADKARNI_JSON: &str = include_str!("../models/nadkarni.json");
    pub const NADKARNI_ALT_GAMMA0_JSON: &str = include_str!("../models/nadkarni_alt_gamma0.json");

    /// `R^3` acting on `R x U` by `(s + x - y, zeta e^{2 pi i z})`, `f = 1_[0,1]`.
    pub fn example3() -> FieldModel {
        parse_field_model(EXAMPLE3_JSON).expect("bundled model parses")
    }

    /// `R^2` acting on `R` by `s + u - v sqrt 2` with `Gamma_0 = Z^2`.
    pub fn nadkarni() -> FieldModel {
        parse_field_model(NADKARNI_JSON).expect("bundled model parses")
    }

    /// The same action indexed through `Gamma_0 = sqrt2 Z x Z`.
    pub fn nadkarni_alt_gamma0() -> FieldModel {
        parse_field_model(NADKARNI_ALT_GAMMA0_JSON).expect("bundled model parses")
    }

    pub fn by_name(name: &str) -> Option<FieldModel> {
        match name {
            "example3" => Some(example3()),
            "nadkarni" => Some(nadkarni()),
            "nadkarni_alt_gamma0" => Some(nadkarni_alt_gamma0()),
            _ => None,
        }
    }

    pub const NAMES: [&str; 3] = ["example3", "nadkarni", "nadkarni_alt_gamma0"];
}
