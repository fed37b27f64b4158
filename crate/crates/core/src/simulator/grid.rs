//! Skeleton grids `Gamma_n ∩ [-t1, t1]` and the translation offsets they
//! induce.
//!
//! A kernel that is constant along the torus sees a grid point `s` only
//! through `A s`, so field values are computed once per distinct offset.
//! Offsets are keyed exactly: with `L` the common denominator of `A Gamma_0`,
//! `L 2^n A s = P m + sqrt(D) Q m` for integer matrices `P`, `Q`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::action::ActionSpec;
use crate::error::{Error, Result};
use crate::lattice::quadratic::{common_denominator, QuadraticNumber};

/// Default cap on grid points processed per window ladder.
pub const DEFAULT_POINT_BUDGET: u128 = 200_000_000;

/// Scales, skeleton level, replications and master seed of a maxima run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_ladder: Vec<f64>,
    pub level: u32,
    pub replications: usize,
    pub seed: u64,
}

impl GridSpec {
    pub fn new(t_ladder: Vec<f64>, level: u32, replications: usize, seed: u64) -> Result<Self> {
        if t_ladder.is_empty() {
            return Err(Error::Parameter("t-ladder is empty".into()));
        }
        if t_ladder.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Parameter(
                "t values must be positive and finite".into(),
            ));
        }
        if t_ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(
                "t-ladder must be strictly increasing".into(),
            ));
        }
        if level > 30 {
            return Err(Error::Parameter(format!("level {level} exceeds 30")));
        }
        if replications == 0 {
            return Err(Error::Parameter("need at least one replication".into()));
        }
        Ok(Self {
            t_ladder,
            level,
            replications,
            seed,
        })
    }
}

/// Exact integer encoding of `s -> A s` on `Gamma_n`.
#[derive(Clone, Debug)]
pub(crate) struct TranslationCode {
    k: usize,
    p: Vec<Vec<i64>>,
    q: Vec<Vec<i64>>,
    /// `L 2^n`: offsets are integer combinations divided by this.
    pub denominator: u64,
    sqrt_d: f64,
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Unsupported("translation coefficients overflow 64-bit keys".into()))
}

impl TranslationCode {
    pub fn new(spec: &ActionSpec, level: u32) -> Result<Self> {
        let m = spec.translation_in_lattice();
        let l = common_denominator(
            m.iter()
                .flatten()
                .flat_map(|x| [x.rational_part(), x.surd_part()]),
        );
        let lr = BigRational::from_integer(l.clone());
        let part = |f: fn(&QuadraticNumber) -> &BigRational| -> Result<Vec<Vec<i64>>> {
            m.iter()
                .map(|row| {
                    row.iter()
                        .map(|x| to_i64(&(f(x) * &lr).to_integer()))
                        .collect()
                })
                .collect()
        };
        let denominator = to_i64(&(l << level as usize))? as u64;
        Ok(Self {
            k: spec.translation_dim(),
            p: part(QuadraticNumber::rational_part)?,
            q: part(QuadraticNumber::surd_part)?,
            denominator,
            sqrt_d: (spec.field() as f64).sqrt(),
        })
    }

    pub fn is_rational(&self) -> bool {
        self.q.iter().flatten().all(|&x| x == 0)
    }

    /// Column `j` of `(P; Q)`.
    fn column(&self, j: usize) -> Vec<i64> {
        self.p.iter().chain(&self.q).map(|row| row[j]).collect()
    }

    pub fn key(&self, m: &[i64]) -> Result<Vec<i64>> {
        let mut key = vec![0i64; 2 * self.k];
        for (j, &mj) in m.iter().enumerate() {
            for (c, a) in self.column(j).into_iter().enumerate() {
                key[c] = a
                    .checked_mul(mj)
                    .and_then(|x| key[c].checked_add(x))
                    .ok_or_else(|| Error::Unsupported("offset key overflow".into()))?;
            }
        }
        Ok(key)
    }

    pub fn offset(&self, key: &[i64]) -> Vec<f64> {
        let den = self.denominator as f64;
        (0..self.k)
            .map(|c| (key[c] as f64 + key[self.k + c] as f64 * self.sqrt_d) / den)
            .collect()
    }
}

/// Distinct offsets over a ladder of nested windows, each tagged with the
/// first window that reaches it.
#[derive(Clone, Debug)]
pub struct OffsetSet {
    pub k: usize,
    pub offsets: Vec<Vec<f64>>,
    pub first_window: Vec<usize>,
    /// Grid points per window.
    pub grid_points: Vec<u128>,
    pub(crate) keys: Vec<Vec<i64>>,
    pub(crate) code: TranslationCode,
}

impl OffsetSet {
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn windows(&self) -> usize {
        self.grid_points.len()
    }

    /// Offsets sorted by key; deterministic regardless of construction order.
    fn from_map(
        map: HashMap<Vec<i64>, usize>,
        code: TranslationCode,
        grid_points: Vec<u128>,
    ) -> Self {
        let mut entries: Vec<(Vec<i64>, usize)> = map.into_iter().collect();
        entries.sort_unstable();
        let offsets = entries.iter().map(|(key, _)| code.offset(key)).collect();
        let first_window = entries.iter().map(|(_, w)| *w).collect();
        let keys = entries.into_iter().map(|(k, _)| k).collect();
        Self {
            keys,
            k: code.k,
            offsets,
            first_window,
            grid_points,
            code,
        }
    }
}

fn exact_t(t: f64) -> Result<BigRational> {
    BigRational::from_f64(t).ok_or_else(|| Error::Parameter(format!("invalid scale {t}")))
}

fn floor_quadratic(x: &QuadraticNumber) -> BigInt {
    let mut g = BigInt::from_f64(x.to_f64().floor()).unwrap_or_else(BigInt::zero);
    let q = |n: &BigInt| {
        QuadraticNumber::rational(BigRational::from_integer(n.clone()), x.discriminant())
    };
    while q(&g) > *x {
        g -= 1;
    }
    while q(&(&g + 1)) <= *x {
        g += 1;
    }
    g
}

/// Largest `N` with `|gamma| 2^{-n} N <= t`.
fn axis_threshold(gamma: &QuadraticNumber, level: u32, t: &BigRational) -> Result<i64> {
    let inv = gamma.abs().inverse().expect("gamma0 invertible");
    let scaled = inv.scale(&(t * BigRational::from_integer(BigInt::one() << level as usize)));
    floor_quadratic(&scaled).to_i64().ok_or(Error::Budget {
        what: "grid points",
        needed: u128::MAX,
        budget: 0,
    })
}

fn check_budget(needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        Err(Error::Budget {
            what: "grid points",
            needed,
            budget,
        })
    } else {
        Ok(())
    }
}

/// Offsets `A s` for `s` in `Gamma_n ∩ [-t_j 1, t_j 1]` across the ladder.
pub fn ladder_offsets(
    spec: &ActionSpec,
    t_ladder: &[f64],
    level: u32,
    budget: u128,
) -> Result<OffsetSet> {
    if spec.gamma0_is_diagonal() {
        diagonal_offsets(spec, t_ladder, level, budget)
    } else {
        let points = enumerate_ladder(spec, t_ladder, level, budget)?;
        let code = TranslationCode::new(spec, level)?;
        let mut map: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut grid_points = vec![0u128; t_ladder.len()];
        for (m, w) in points {
            grid_points[w] += 1;
            let key = code.key(&m)?;
            let e = map.entry(key).or_insert(w);
            *e = (*e).min(w);
        }
        for j in 1..grid_points.len() {
            grid_points[j] += grid_points[j - 1];
        }
        Ok(OffsetSet::from_map(map, code, grid_points))
    }
}

/// Minkowski-sum construction axis by axis; each axis contributes
/// `m_i * column_i` with `|m_i| <= N_i(t)`.
fn diagonal_offsets(
    spec: &ActionSpec,
    t_ladder: &[f64],
    level: u32,
    budget: u128,
) -> Result<OffsetSet> {
    let d = spec.dim();
    let ts = t_ladder
        .iter()
        .map(|&t| exact_t(t))
        .collect::<Result<Vec<_>>>()?;
    let thresholds: Vec<Vec<i64>> = (0..d)
        .map(|i| {
            ts.iter()
                .map(|t| axis_threshold(&spec.gamma0()[i][i], level, t))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let grid_points: Vec<u128> = (0..t_ladder.len())
        .map(|j| {
            thresholds
                .iter()
                .map(|n| 2 * n[j] as u128 + 1)
                .fold(1u128, |a, b| a.saturating_mul(b))
        })
        .collect();
    let code = TranslationCode::new(spec, level)?;
    let active: Vec<usize> = (0..d)
        .filter(|&i| code.column(i).iter().any(|&x| x != 0))
        .collect();
    let work = active
        .iter()
        .map(|&i| 2 * *thresholds[i].last().unwrap() as u128 + 1)
        .fold(1u128, |a, b| a.saturating_mul(b));
    check_budget(work, budget)?;

    let mut map: HashMap<Vec<i64>, usize> = HashMap::new();
    map.insert(
        vec![0; 2 * code.k],
        first_window_of(&thresholds, &vec![0; d]),
    );
    // windows are nested per axis: the window index of a point is the max
    // over axes of the first window admitting that coordinate
    for &i in &active {
        let col = code.column(i);
        let nmax = *thresholds[i].last().unwrap();
        let mut next: HashMap<Vec<i64>, usize> = HashMap::with_capacity(map.len() * 2);
        for (key, w) in &map {
            for m in -nmax..=nmax {
                let wm = thresholds[i].iter().position(|&n| m.abs() <= n).unwrap();
                let w2 = (*w).max(wm);
                let mut k2 = key.clone();
                for (x, a) in k2.iter_mut().zip(&col) {
                    *x = a
                        .checked_mul(m)
                        .and_then(|y| x.checked_add(y))
                        .ok_or_else(|| Error::Unsupported("offset key overflow".into()))?;
                }
                let e = next.entry(k2).or_insert(w2);
                *e = (*e).min(w2);
            }
        }
        map = next;
    }
    Ok(OffsetSet::from_map(map, code, grid_points))
}

fn first_window_of(thresholds: &[Vec<i64>], m: &[i64]) -> usize {
    thresholds
        .iter()
        .zip(m)
        .map(|(n, &mi)| n.iter().position(|&x| mi.abs() <= x).unwrap_or(usize::MAX))
        .max()
        .unwrap_or(0)
}

fn gamma0_f64(spec: &ActionSpec) -> Vec<Vec<f64>> {
    spec.gamma0()
        .iter()
        .map(|r| r.iter().map(QuadraticNumber::to_f64).collect())
        .collect()
}

fn invert_f64(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))
            .unwrap();
        m.swap(c, p);
        let piv = m[c][c];
        for x in &mut m[c] {
            *x /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    let src = m[c].clone();
                    for (x, s) in m[r].iter_mut().zip(src) {
                        *x -= f * s;
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Exact test `||2^{-n} Gamma_0 m||_inf <= t`.
fn exact_inside(spec: &ActionSpec, m: &[i64], level: u32, t: &BigRational) -> bool {
    let field = spec.field();
    let n: Vec<QuadraticNumber> = m
        .iter()
        .map(|&x| QuadraticNumber::from_int(x, field))
        .collect();
    let bound = t * BigRational::from_integer(BigInt::one() << level as usize);
    spec.lattice_point(&n)
        .iter()
        .all(|x| x.abs().cmp_rational(&bound) != std::cmp::Ordering::Greater)
}

/// Every grid point `(m, first window)` of the largest window, by bounding
/// box and exact membership.
pub(crate) fn enumerate_ladder(
    spec: &ActionSpec,
    t_ladder: &[f64],
    level: u32,
    budget: u128,
) -> Result<Vec<(Vec<i64>, usize)>> {
    let d = spec.dim();
    let g = gamma0_f64(spec);
    let ginv = invert_f64(&g);
    let scale = 2f64.powi(level as i32);
    let tmax = *t_ladder.last().unwrap();
    let bounds: Vec<i64> = ginv
        .iter()
        .map(|row| {
            let b = scale * tmax * row.iter().map(|x| x.abs()).sum::<f64>();
            b.floor() as i64 + 1
        })
        .collect();
    let work = bounds
        .iter()
        .map(|&b| 2 * b as u128 + 1)
        .fold(1u128, |a, b| a.saturating_mul(b));
    check_budget(work, budget)?;
    let ts = t_ladder
        .iter()
        .map(|&t| exact_t(t))
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::new();
    let mut m: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        let s: Vec<f64> = g
            .iter()
            .map(|row| row.iter().zip(&m).map(|(a, &x)| a * x as f64).sum::<f64>() / scale)
            .collect();
        let r = s.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let w = t_ladder.iter().enumerate().position(|(j, &t)| {
            let tol = 1e-9 * t.max(1.0);
            if r < t - tol {
                true
            } else if r > t + tol {
                false
            } else {
                exact_inside(spec, &m, level, &ts[j])
            }
        });
        if let Some(w) = w {
            out.push((m.clone(), w));
        }
        // odometer
        let mut i = 0;
        loop {
            if i == d {
                return Ok(out);
            }
            if m[i] < bounds[i] {
                m[i] += 1;
                break;
            }
            m[i] = -bounds[i];
            i += 1;
        }
    }
}

/// Largest common denominator allowed when aligning a cell mesh with
/// rational box edges.
pub(crate) fn aligned_mesh(
    code: &TranslationCode,
    edges: &[BigRational],
    refine: u64,
) -> (u64, bool) {
    let base = code.denominator;
    if !code.is_rational() {
        return (base.saturating_mul(refine), false);
    }
    let mut h = BigInt::from(base);
    for e in edges {
        h = h.lcm(e.denom());
    }
    match h.to_u64() {
        Some(x) if x <= base.saturating_mul(64) => (x, true),
        _ => (base.saturating_mul(refine), false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(vec![1.0, 2.0], 0, 1, 0).is_ok());
        assert!(GridSpec::new(vec![2.0, 1.0], 0, 1, 0).is_err());
        assert!(GridSpec::new(vec![], 0, 1, 0).is_err());
        assert!(GridSpec::new(vec![1.0], 0, 0, 0).is_err());
        assert!(GridSpec::new(vec![-1.0], 0, 1, 0).is_err());
    }

    #[test]
    fn example_offsets() {
        let spec = presets::example3().spec;
        let set = ladder_offsets(&spec, &[1.0, 2.0], 1, DEFAULT_POINT_BUDGET).unwrap();
        // x - y with x, y in {-2..2}/2 (t = 1) and {-4..4}/2 (t = 2)
        assert_eq!(set.len(), 17);
        assert_eq!(set.grid_points, vec![125, 729]);
        let inner = set.first_window.iter().filter(|&&w| w == 0).count();
        assert_eq!(inner, 9);
        for (o, w) in set.offsets.iter().zip(&set.first_window) {
            let need = if o[0].abs() <= 2.0 { 0 } else { 1 };
            assert_eq!(*w, need, "offset {o:?}");
        }
    }

    #[test]
    fn diagonal_matches_enumeration() {
        for model in [
            presets::example3(),
            presets::nadkarni(),
            presets::nadkarni_alt_gamma0(),
        ] {
            let spec = &model.spec;
            let ladder = [0.5, 1.0, 2.5];
            let fast = ladder_offsets(spec, &ladder, 1, DEFAULT_POINT_BUDGET).unwrap();
            let pts = enumerate_ladder(spec, &ladder, 1, DEFAULT_POINT_BUDGET).unwrap();
            let code = TranslationCode::new(spec, 1).unwrap();
            let mut map: HashMap<Vec<i64>, usize> = HashMap::new();
            for (m, w) in pts {
                let e = map.entry(code.key(&m).unwrap()).or_insert(w);
                *e = (*e).min(w);
            }
            let slow = OffsetSet::from_map(map, code, vec![]);
            assert_eq!(fast.offsets, slow.offsets);
            assert_eq!(fast.first_window, slow.first_window);
        }
    }

    #[test]
    fn irrational_axis_threshold() {
        let s2 = QuadraticNumber::sqrt_d(2).unwrap();
        // floor(4 / sqrt 2) = 2
        let t = BigRational::from_integer(4.into());
        assert_eq!(axis_threshold(&s2, 0, &t).unwrap(), 2);
        assert_eq!(axis_threshold(&s2, 1, &t).unwrap(), 5);
    }

    #[test]
    fn budget_refuses_large_windows() {
        let spec = presets::example3().spec;
        let r = ladder_offsets(&spec, &[1e6], 1, DEFAULT_POINT_BUDGET);
        assert!(matches!(r, Err(Error::Budget { .. })));
    }
}
