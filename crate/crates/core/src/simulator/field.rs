//! Field realizations at a set of translation offsets.
//!
//! Two engines share one contract: given offsets `tau` they return
//! `X_tau = ∫ f(s + tau) M(ds)` jointly over all offsets.
//!
//! * `cell`: `M` restricted to mesh cells gives independent
//!   `vol^{1/alpha} Z` masses; `X_tau` sums the cells whose centre lies in a
//!   translated box. Exact in law when box edges and offsets sit on the mesh.
//! * `series`: truncated LePage expansion with points uniform on the bounding
//!   box of all translated supports.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::grid::{
    aligned_mesh, enumerate_ladder, OffsetSet, TranslationCode, DEFAULT_POINT_BUDGET,
};
use super::stable::{sample_standard_sas, tail_constant};
use crate::error::{Error, Result};
use crate::model::FieldModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cell,
    Series,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cell => "cell",
            Self::Series => "series",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cell" => Ok(Self::Cell),
            "series" => Ok(Self::Series),
            other => Err(Error::Parameter(format!(
                "unknown method {other:?} (expected cell or series)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimulationOptions {
    pub method: Method,
    /// Cap on grid points visited when enumerating windows.
    pub point_budget: u128,
    /// Cap on mesh cells held by the cell engine.
    pub cell_budget: usize,
    /// Mesh refinement relative to the offset spacing when offsets are
    /// irrational or edges do not align.
    pub refine: u64,
    /// Largest number of LePage terms.
    pub series_cap: usize,
    /// Target residual scale relative to `||f||_alpha`.
    pub series_tolerance: f64,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            method: Method::Cell,
            point_budget: DEFAULT_POINT_BUDGET,
            cell_budget: 50_000_000,
            refine: 8,
            series_cap: 100_000,
            series_tolerance: 1e-3,
        }
    }
}

impl SimulationOptions {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }
}

/// Random stream of replication `r` under a master seed.
pub fn replication_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

/// `∫ |f|^p` over the translation space, exact for any box layout
/// (elementary cells of the edge arrangement).
pub fn kernel_norm_p(model: &FieldModel, p: f64) -> f64 {
    let k = model.spec.translation_dim();
    let boxes: Vec<(f64, Vec<f64>, Vec<f64>)> = model
        .kernel
        .iter()
        .map(|b| (b.weight_f64(), b.lower_f64(), b.upper_f64()))
        .collect();
    let cuts: Vec<Vec<f64>> = (0..k)
        .map(|c| {
            let mut v: Vec<f64> = boxes.iter().flat_map(|b| [b.1[c], b.2[c]]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
        .collect();
    let mut total = 0.0;
    let mut idx = vec![0usize; k];
    if cuts.iter().any(|c| c.len() < 2) {
        return 0.0;
    }
    loop {
        let mid: Vec<f64> = (0..k)
            .map(|c| 0.5 * (cuts[c][idx[c]] + cuts[c][idx[c] + 1]))
            .collect();
        let vol: f64 = (0..k)
            .map(|c| cuts[c][idx[c] + 1] - cuts[c][idx[c]])
            .product();
        let f: f64 = boxes
            .iter()
            .filter(|(_, lo, hi)| (0..k).all(|c| lo[c] <= mid[c] && mid[c] <= hi[c]))
            .map(|b| b.0)
            .sum();
        total += f.abs().powf(p) * vol;
        let mut c = 0;
        loop {
            if c == k {
                return total;
            }
            idx[c] += 1;
            if idx[c] + 1 < cuts[c].len() {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
}

/// `||f||_alpha^alpha`.
pub fn kernel_norm_alpha(model: &FieldModel) -> f64 {
    kernel_norm_p(model, model.alpha)
}

/// Bounding box `[min a - max tau, max b - min tau]` of all translated supports.
pub(crate) fn support_region(model: &FieldModel, offsets: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let k = model.spec.translation_dim();
    let mut lo = vec![f64::INFINITY; k];
    let mut hi = vec![f64::NEG_INFINITY; k];
    let mut tmin = vec![f64::INFINITY; k];
    let mut tmax = vec![f64::NEG_INFINITY; k];
    for o in offsets {
        for c in 0..k {
            tmin[c] = tmin[c].min(o[c]);
            tmax[c] = tmax[c].max(o[c]);
        }
    }
    for b in &model.kernel {
        let (a, bb) = (b.lower_f64(), b.upper_f64());
        for c in 0..k {
            lo[c] = lo[c].min(a[c] - tmax[c]);
            hi[c] = hi[c].max(bb[c] - tmin[c]);
        }
    }
    (lo, hi)
}

/// Range sums over a fixed array without cancellation from outside values.
struct SegmentTree {
    size: usize,
    nodes: Vec<f64>,
}

impl SegmentTree {
    fn new(values: &[f64]) -> Self {
        let size = values.len().next_power_of_two().max(1);
        let mut nodes = vec![0.0; 2 * size];
        nodes[size..size + values.len()].copy_from_slice(values);
        for i in (1..size).rev() {
            nodes[i] = nodes[2 * i] + nodes[2 * i + 1];
        }
        Self { size, nodes }
    }

    /// Sum over `lo..hi` (half open).
    fn sum(&self, lo: usize, hi: usize) -> f64 {
        let (mut l, mut r) = (lo + self.size, hi + self.size);
        let (mut left, mut right) = (0.0, 0.0);
        while l < r {
            if l & 1 == 1 {
                left += self.nodes[l];
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                right += self.nodes[r];
            }
            l >>= 1;
            r >>= 1;
        }
        left + right
    }
}

/// Mesh origin, cells per axis and total cells covering every translated box.
fn cell_grid(
    model: &FieldModel,
    offsets: &[Vec<f64>],
    cells_per_unit: u64,
    opts: &SimulationOptions,
) -> Result<(Vec<f64>, Vec<usize>, usize)> {
    let h = 1.0 / cells_per_unit as f64;
    let hinv = cells_per_unit as f64;
    let (lo, hi) = support_region(model, offsets);
    let origin: Vec<f64> = lo.iter().map(|x| (x * hinv).floor() * h - h).collect();
    let dims: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .zip(&origin)
        .map(|((_, b), o)| ((b - o) * hinv).ceil() as usize + 2)
        .collect();
    let cells = dims
        .iter()
        .try_fold(1usize, |a, &n| a.checked_mul(n))
        .filter(|&n| n <= opts.cell_budget)
        .ok_or(Error::Budget {
            what: "mesh cells",
            needed: dims.iter().map(|&n| n as u128).product(),
            budget: opts.cell_budget as u128,
        })?;
    Ok((origin, dims, cells))
}

/// Resource checks that would otherwise fail inside every replication.
pub(crate) fn preflight(
    model: &FieldModel,
    set: &OffsetSet,
    level: u32,
    opts: &SimulationOptions,
) -> Result<()> {
    if opts.method == Method::Cell {
        let (cells_per_unit, _) = cell_mesh(model, level, opts)?;
        cell_grid(model, &set.offsets, cells_per_unit, opts)?;
    }
    Ok(())
}

/// Half-open index range of mesh cells with centre in `[a, b]`.
fn cell_range(a: f64, b: f64, origin: f64, cells_per_unit: f64, n: usize) -> (usize, usize) {
    let lo = ((a - origin) * cells_per_unit - 0.5).ceil().max(0.0) as usize;
    let hi = (((b - origin) * cells_per_unit - 0.5).floor() + 1.0).clamp(0.0, n as f64) as usize;
    (lo.min(hi), hi)
}

fn cell_values<R: Rng + ?Sized>(
    model: &FieldModel,
    offsets: &[Vec<f64>],
    cells_per_unit: u64,
    opts: &SimulationOptions,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let k = model.spec.translation_dim();
    let h = 1.0 / cells_per_unit as f64;
    let hinv = cells_per_unit as f64;
    let (origin, dims, cells) = cell_grid(model, offsets, cells_per_unit, opts)?;
    let coef = h.powf(k as f64 / model.alpha);
    let last = dims[k - 1];
    let rows = cells / last;
    let mut trees = Vec::with_capacity(rows);
    let mut row = vec![0.0; last];
    for _ in 0..rows {
        for x in row.iter_mut() {
            *x = coef * sample_standard_sas(model.alpha, rng);
        }
        trees.push(SegmentTree::new(&row));
    }

    let boxes: Vec<(f64, Vec<f64>, Vec<f64>)> = model
        .kernel
        .iter()
        .map(|b| (b.weight_f64(), b.lower_f64(), b.upper_f64()))
        .collect();
    let value = |tau: &[f64]| -> f64 {
        let mut total = 0.0;
        for (w, a, b) in &boxes {
            let ranges: Vec<(usize, usize)> = (0..k)
                .map(|c| cell_range(a[c] - tau[c], b[c] - tau[c], origin[c], hinv, dims[c]))
                .collect();
            if ranges.iter().any(|(l, r)| l >= r) {
                continue;
            }
            let (ll, lr) = ranges[k - 1];
            let mut s = 0.0;
            let outer = &ranges[..k - 1];
            let mut idx: Vec<usize> = outer.iter().map(|r| r.0).collect();
            loop {
                let row = idx
                    .iter()
                    .zip(&dims)
                    .fold(0usize, |acc, (&i, &n)| acc * n + i);
                s += trees[row].sum(ll, lr);
                let mut done = true;
                for c in 0..k - 1 {
                    idx[c] += 1;
                    if idx[c] < outer[c].1 {
                        done = false;
                        break;
                    }
                    idx[c] = outer[c].0;
                }
                if done {
                    break;
                }
            }
            total += w * s;
        }
        total
    };
    Ok(offsets.iter().map(|t| value(t)).collect())
}

/// Truncation used by a series realization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    pub terms: usize,
    /// Standard-deviation bound of the discarded tail relative to `||f||_alpha`.
    pub relative_residual: f64,
}

/// Number of LePage terms for a region of volume `vol`.
pub fn series_terms(model: &FieldModel, vol: f64, opts: &SimulationOptions) -> SeriesTruncation {
    let alpha = model.alpha;
    let c = tail_constant(alpha);
    let norm_a = kernel_norm_alpha(model).powf(1.0 / alpha);
    let norm2_sq = kernel_norm_p(model, 2.0);
    let e = 2.0 / alpha - 1.0;
    // tail sum_{j>J} j^{-2/alpha} <= J^{-e} / e
    let var_coef = c.powf(2.0 / alpha) * vol.powf(e) * norm2_sq / e;
    let target = opts.series_tolerance * norm_a;
    let need = (var_coef / (target * target)).powf(1.0 / e).ceil();
    let terms = if need.is_finite() {
        (need as usize).clamp(1, opts.series_cap.max(1))
    } else {
        opts.series_cap.max(1)
    };
    let relative_residual = (var_coef * (terms as f64).powf(-e)).sqrt() / norm_a;
    SeriesTruncation {
        terms,
        relative_residual,
    }
}

fn series_values<R: Rng + ?Sized>(
    model: &FieldModel,
    offsets: &[Vec<f64>],
    opts: &SimulationOptions,
    rng: &mut R,
) -> Result<(Vec<f64>, SeriesTruncation)> {
    let k = model.spec.translation_dim();
    let alpha = model.alpha;
    let (lo, hi) = support_region(model, offsets);
    let vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    if !(vol.is_finite() && vol > 0.0) {
        return Err(Error::Parameter(
            "series truncation region does not cover the translated supports".into(),
        ));
    }
    let trunc = series_terms(model, vol, opts);
    let scale = (tail_constant(alpha) * vol).powf(1.0 / alpha);
    let mut gamma = 0.0;
    let mut pts: Vec<(Vec<f64>, f64)> = (0..trunc.terms)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            gamma += e;
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let v: Vec<f64> = (0..k)
                .map(|c| lo[c] + (hi[c] - lo[c]) * rng.random::<f64>())
                .collect();
            (v, sign * scale * gamma.powf(-1.0 / alpha))
        })
        .collect();
    pts.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]));
    let first: Vec<f64> = pts.iter().map(|p| p.0[0]).collect();
    let tree = SegmentTree::new(&pts.iter().map(|p| p.1).collect::<Vec<_>>());
    let boxes: Vec<(f64, Vec<f64>, Vec<f64>)> = model
        .kernel
        .iter()
        .map(|b| (b.weight_f64(), b.lower_f64(), b.upper_f64()))
        .collect();
    let value = |tau: &[f64]| -> f64 {
        boxes
            .iter()
            .map(|(w, a, b)| {
                let l = first.partition_point(|&x| x < a[0] - tau[0]);
                let r = first.partition_point(|&x| x <= b[0] - tau[0]);
                let s = if k == 1 {
                    tree.sum(l, r)
                } else {
                    pts[l..r]
                        .iter()
                        .filter(|(v, _)| {
                            (1..k).all(|c| a[c] <= v[c] + tau[c] && v[c] + tau[c] <= b[c])
                        })
                        .map(|p| p.1)
                        .sum()
                };
                w * s
            })
            .sum()
    };
    Ok((offsets.iter().map(|t| value(t)).collect(), trunc))
}

/// Field values at every offset of `set`, one joint realization.
pub(crate) fn realize<R: Rng + ?Sized>(
    model: &FieldModel,
    set: &OffsetSet,
    opts: &SimulationOptions,
    rng: &mut R,
) -> Result<(Vec<f64>, Option<SeriesTruncation>)> {
    match opts.method {
        Method::Cell => {
            let edges: Vec<_> = model
                .kernel
                .iter()
                .flat_map(|b| b.lower.iter().chain(&b.upper).cloned())
                .collect();
            let (cells_per_unit, _) = aligned_mesh(&set.code, &edges, opts.refine);
            Ok((
                cell_values(model, &set.offsets, cells_per_unit, opts, rng)?,
                None,
            ))
        }
        Method::Series => {
            let (v, t) = series_values(model, &set.offsets, opts, rng)?;
            Ok((v, Some(t)))
        }
    }
}

/// Cells per unit length the cell engine would use, and whether the mesh is
/// aligned with every offset and box edge.
pub fn cell_mesh(model: &FieldModel, level: u32, opts: &SimulationOptions) -> Result<(u64, bool)> {
    let code = TranslationCode::new(&model.spec, level)?;
    let edges: Vec<_> = model
        .kernel
        .iter()
        .flat_map(|b| b.lower.iter().chain(&b.upper).cloned())
        .collect();
    Ok(aligned_mesh(&code, &edges, opts.refine))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplePoint {
    /// Integer coordinates `m` of `s = 2^{-n} Gamma_0 m`.
    pub lattice: Vec<i64>,
    pub position: Vec<f64>,
    pub value: f64,
}

/// One realization on `Gamma_n ∩ [-t1, t1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldSample {
    pub points: Vec<SamplePoint>,
    pub method: Method,
    pub seed: u64,
    pub truncation: Option<SeriesTruncation>,
}

impl FieldSample {
    pub fn max_abs(&self) -> f64 {
        self.points.iter().fold(0.0, |a, p| a.max(p.value.abs()))
    }
}

/// Samples the field on `Gamma_n ∩ [-t1, t1]` using stream 0 of `seed`
/// (the stream of replication 0 in [`super::partial_maxima`]).
pub fn simulate_field(
    model: &FieldModel,
    t: f64,
    level: u32,
    opts: &SimulationOptions,
    seed: u64,
) -> Result<FieldSample> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Parameter(format!(
            "window half-width must be positive, got {t}"
        )));
    }
    let spec = &model.spec;
    let points = enumerate_ladder(spec, &[t], level, opts.point_budget)?;
    let set = super::grid::ladder_offsets(spec, &[t], level, opts.point_budget)?;
    let mut rng = replication_rng(seed, 0);
    let (values, truncation) = realize(model, &set, opts, &mut rng)?;
    let index: std::collections::HashMap<&[i64], usize> = set
        .keys
        .iter()
        .enumerate()
        .map(|(i, k)| (k.as_slice(), i))
        .collect();
    let scale = 2f64.powi(level as i32);
    let g: Vec<Vec<f64>> = spec
        .gamma0()
        .iter()
        .map(|r| r.iter().map(|x| x.to_f64()).collect())
        .collect();
    let points = points
        .into_iter()
        .map(|(m, _)| {
            let key = set.code.key(&m)?;
            let i = *index
                .get(key.as_slice())
                .ok_or_else(|| Error::Consistency("grid point offset missing".into()))?;
            let position = g
                .iter()
                .map(|row| row.iter().zip(&m).map(|(a, &x)| a * x as f64).sum::<f64>() / scale)
                .collect();
            Ok(SamplePoint {
                lattice: m,
                position,
                value: values[i],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldSample {
        points,
        method: opts.method,
        seed,
        truncation,
    })
}
