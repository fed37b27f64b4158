//! Independent oracles and generators shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stable_field_lab::action::ActionSpec;
use stable_field_lab::lattice::QuadraticNumber;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rational(rng: &mut ChaCha8Rng, dens: &[i64], zero_weight: f64) -> BigRational {
    if rng.random_bool(zero_weight) {
        return BigRational::from_integer(0.into());
    }
    let num = rng.random_range(-5i64..=5);
    let den = dens[rng.random_range(0..dens.len())];
    BigRational::new(num.into(), den.into())
}

/// Random action spec with `d <= 3` and numerators in `[-5, 5]`.
///
/// With `surds` set, the field is drawn from `{1, 2, 3, 5}` and some
/// translation and generator entries carry a `sqrt D` part.
pub fn random_spec(rng: &mut ChaCha8Rng, surds: bool) -> ActionSpec {
    loop {
        let d = rng.random_range(1..=3usize);
        let field = if surds {
            [1u64, 2, 3, 5][rng.random_range(0..4)]
        } else {
            1
        };
        let quad = |rng: &mut ChaCha8Rng, dens: &[i64], zw: f64| {
            let a = small_rational(rng, dens, zw);
            let b = if field > 1 && rng.random_bool(0.25) {
                small_rational(rng, dens, 0.0)
            } else {
                BigRational::from_integer(0.into())
            };
            QuadraticNumber::new(a, b, field).expect("field is squarefree")
        };
        let diagonal = rng.random_bool(0.5);
        let gamma0: Vec<Vec<QuadraticNumber>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        if i == j {
                            quad(rng, &[1, 2], 0.0)
                        } else if diagonal {
                            QuadraticNumber::zero(field)
                        } else {
                            quad(rng, &[1, 2], 0.5)
                        }
                    })
                    .collect()
            })
            .collect();
        let k = rng.random_range(0..=2usize);
        let r = rng.random_range(0..=2usize);
        if k + r == 0 {
            continue;
        }
        let translation = (0..k)
            .map(|_| (0..d).map(|_| quad(rng, &[1, 2, 3, 4], 0.4)).collect())
            .collect();
        let rotation = (0..r)
            .map(|_| {
                (0..d)
                    .map(|_| small_rational(rng, &[1, 2, 3, 4, 6], 0.4))
                    .collect()
            })
            .collect();
        if let Ok(spec) = ActionSpec::new(d, field, gamma0, translation, rotation) {
            return spec;
        }
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * cofactor_det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `k`-th determinantal divisor: gcd of all `k x k` minors.
pub fn determinantal_divisor(m: &[Vec<i64>], k: usize) -> BigInt {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut g = 0i128;
    for rs in subsets(rows, k) {
        for cs in subsets(cols, k) {
            let sub: Vec<Vec<i128>> = rs
                .iter()
                .map(|&r| cs.iter().map(|&c| m[r][c] as i128).collect())
                .collect();
            g = gcd(g, cofactor_det(&sub));
        }
    }
    BigInt::from(g)
}

fn cube(d: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-r..=r).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Covering by enumeration of coefficient vectors.
///
/// Collects every combination `Σ c_i b_i` with `c_i ∈ [-Mn, Mn] ∩ 2^{-m} Z`
/// and checks that each grid point lies within sup-distance `M` of one.
/// Everything is scaled by `2^m` so the arithmetic stays integral.
pub fn brute_force_covers(bound: i64, basis: &[Vec<i64>], n: i64, m: u32) -> bool {
    let d = basis[0].len();
    let s = 1i64 << m;
    let grid_r = n * s;
    let y_r = bound * s;
    let reach = grid_r + y_r;
    let combos: HashSet<Vec<i64>> = cube(basis.len(), bound * n * s)
        .into_iter()
        .map(|c| {
            (0..d)
                .map(|i| c.iter().zip(basis).map(|(ci, b)| ci * b[i]).sum())
                .collect::<Vec<i64>>()
        })
        .filter(|p: &Vec<i64>| p.iter().all(|x| x.abs() <= reach))
        .collect();
    let ys = cube(d, y_r);
    cube(d, grid_r).iter().all(|g| {
        ys.iter().any(|y| {
            let diff: Vec<i64> = g.iter().zip(y).map(|(a, b)| a - b).collect();
            combos.contains(&diff)
        })
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    panels: usize,
    rule: &(Vec<f64>, Vec<f64>),
) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * h;
            rule.0
                .iter()
                .zip(&rule.1)
                .map(|(x, w)| w * f(lo + 0.5 * h * (x + 1.0)))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

/// `∫_0^∞ x^{-alpha} sin x dx` for `0 < alpha < 2`.
///
/// On `[0, π]` the integrand is split as `x^{-alpha} (sin x - x) + x^{1-alpha}`;
/// the second term integrates in closed form and the first is smoothed by
/// substituting `x = u^4`. The tail is summed period by period and the
/// alternating partial sums are accelerated by repeated averaging.
pub fn sine_integral(alpha: f64) -> f64 {
    use std::f64::consts::PI;
    let rule = gauss_legendre(24);
    let q = 4.0;
    let head = PI.powf(2.0 - alpha) / (2.0 - alpha)
        + integrate(
            |u| {
                let x = u.powf(q);
                q * u.powf(q - 1.0) * x.powf(-alpha) * (x.sin() - x)
            },
            0.0,
            PI.powf(1.0 / q),
            16,
            &rule,
        );
    let periods = 80;
    let mut partial = Vec::with_capacity(periods);
    let mut acc = head;
    for k in 1..=periods {
        let lo = k as f64 * PI;
        acc += integrate(|x| x.powf(-alpha) * x.sin(), lo, lo + PI, 2, &rule);
        partial.push(acc);
    }
    let mut s = partial[periods - 40..].to_vec();
    while s.len() > 1 {
        s = s.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    s[0]
}

/// `C_alpha` from its defining integral.
pub fn tail_constant_quadrature(alpha: f64) -> f64 {
    1.0 / sine_integral(alpha)
}

pub fn to_bigint_vecs(xs: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    xs.iter()
        .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

/// Checks every defining property of a Smith normal form of `rows`,
/// comparing the diagonal with determinantal divisors from brute-force
/// minors.
pub fn check_snf(rows: &[Vec<i64>]) -> Result<(), String> {
    use num_integer::Integer;
    use num_traits::{One, Signed, Zero};
    use stable_field_lab::lattice::{smith_normal_form, IntegerMatrix};

    let m = IntegerMatrix::from_rows(rows).map_err(|e| e.to_string())?;
    let snf = smith_normal_form(&m).map_err(|e| e.to_string())?;
    let umv = snf
        .u
        .mul(&m)
        .and_then(|x| x.mul(&snf.v))
        .map_err(|e| e.to_string())?;
    if umv != snf.d {
        return Err(format!("U M V != D for {rows:?}"));
    }
    for (name, x) in [("U", &snf.u), ("V", &snf.v)] {
        let det = x.determinant().map_err(|e| e.to_string())?;
        if det.abs() != BigInt::one() {
            return Err(format!("det {name} = {det} for {rows:?}"));
        }
    }
    let eye = IntegerMatrix::identity(snf.u.rows());
    if snf.u.mul(&snf.u_inv).map_err(|e| e.to_string())? != eye {
        return Err(format!("u_inv is not the inverse of U for {rows:?}"));
    }
    for i in 0..snf.d.rows() {
        for j in 0..snf.d.cols() {
            if i != j && !snf.d[(i, j)].is_zero() {
                return Err(format!("D not diagonal for {rows:?}"));
            }
        }
    }
    let diag = snf.diagonal();
    if diag.iter().any(|x| x.is_negative()) {
        return Err(format!("negative diagonal {diag:?}"));
    }
    for w in diag.windows(2) {
        let ok = if w[0].is_zero() {
            w[1].is_zero()
        } else {
            w[1].is_multiple_of(&w[0])
        };
        if !ok {
            return Err(format!("divisibility chain broken: {diag:?}"));
        }
    }
    let mut prod = BigInt::one();
    for (k, s) in diag.iter().enumerate() {
        prod *= s;
        let dk = determinantal_divisor(rows, k + 1);
        if dk != prod {
            return Err(format!(
                "d_{} = {dk} but product of diagonal = {prod} for {rows:?}",
                k + 1
            ));
        }
    }
    Ok(())
}

/// Random matrix with at most 4 rows, 5 columns, entries in `[-5, 5]`.
pub fn random_matrix(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let r = rng.random_range(1..=4usize);
    let c = rng.random_range(1..=5usize);
    let sparse = rng.random_bool(0.3);
    (0..r)
        .map(|_| {
            (0..c)
                .map(|_| {
                    if sparse && rng.random_bool(0.5) {
                        0
                    } else {
                        rng.random_range(-5i64..=5)
                    }
                })
                .collect()
        })
        .collect()
}
