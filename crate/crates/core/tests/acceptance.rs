//! Acceptance suite: one PASS/FAIL line per criterion, with runtimes.
//!
//! Runs without the libtest harness so the lines always reach stdout.

mod common;

use std::panic;
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use stable_field_lab::action::{
    classify_action, conservativity_at, effective_dimension, level_structure, ActionSpec,
};
use stable_field_lab::analysis::{
    estimate_scaling_exponent, frechet_cdf, frechet_gof, ks_one_sample, limit_scale_prediction,
    scaled_medians, Tolerances, Verdict,
};
use stable_field_lab::lattice::{
    covering_constant_search, verify_covering, IntegerMatrix, QuadraticNumber,
};
use stable_field_lab::model::{presets, FieldModel};
use stable_field_lab::simulator::{
    bt_alpha_exact_indicator, bt_exact_indicator, bt_numeric, partial_maxima, tail_constant,
    union_length_exact, GridSpec, MaximaDataset, Method, SimulationOptions, DEFAULT_BT_BUDGET,
};

/// Seed of the Monte Carlo criteria.
const SEED: u64 = 20240611;
const LADDER: [f64; 4] = [8.0, 16.0, 32.0, 64.0];
const LEVEL: u32 = 2;
const REPS: usize = 200;
const ALPHA: f64 = 1.5;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

fn bundled_specs() -> Vec<(&'static str, ActionSpec)> {
    presets::NAMES
        .iter()
        .map(|n| (*n, presets::by_name(n).unwrap().spec))
        .collect()
}

fn random_specs(seed: u64, count: usize, surds: bool) -> Vec<ActionSpec> {
    let mut rng = common::rng(seed);
    (0..count)
        .map(|_| common::random_spec(&mut rng, surds))
        .collect()
}

fn c1_example_dimension() -> Result<String, String> {
    let spec = presets::example3().spec;
    let dim = effective_dimension(&spec, 3).map_err(|e| e.to_string())?;
    ensure(dim.p == 1, || format!("p = {}, expected 1", dim.p))?;

    let profile = dim.torsion_profile();
    let expected: Vec<Vec<BigInt>> = vec![vec![], vec![int(2)], vec![int(4)], vec![int(8)]];
    ensure(profile == expected, || {
        format!("torsion profile {profile:?}")
    })?;
    for (i, level) in dim.levels.iter().enumerate() {
        ensure(level.quotient.free_rank == 1, || {
            format!("free rank {} at level {i}", level.quotient.free_rank)
        })?;
    }

    // K_0 is spanned by (1,1,0) and (0,0,1); the computed lift must complete
    // it to Z^3, as must the first coordinate axis.
    let q0 = &dim.level(0).quotient;
    let k0 = &q0.kernel_basis;
    let expected_k0 = IntegerMatrix::from_i64_rows(&[&[1, 0], &[1, 0], &[0, 1]]);
    let same_lattice = |a: &IntegerMatrix, b: &IntegerMatrix| {
        stable_field_lab::lattice::lattice_includes(a, b).unwrap()
            && stable_field_lab::lattice::lattice_includes(b, a).unwrap()
    };
    ensure(same_lattice(k0, &expected_k0), || format!("K_0 = {k0:?}"))?;
    let lift = &q0.free_lift_basis;
    let det = lift.hcat(k0).unwrap().determinant().unwrap();
    ensure(det.abs().is_one(), || format!("det [F_0 | K_0] = {det}"))?;
    let axis = IntegerMatrix::from_i64_rows(&[&[1], &[0], &[0]]);
    let det_axis = axis.hcat(k0).unwrap().determinant().unwrap();
    ensure(det_axis.abs().is_one(), || {
        format!("det [e_1 | K_0] = {det_axis}")
    })?;
    let coord = q0.free_coordinates(&[int(1), int(0), int(0)]).unwrap();
    ensure(coord.len() == 1 && coord[0].abs().is_one(), || {
        format!("e_1 has free coordinates {coord:?}")
    })?;
    Ok(format!(
        "p=1, torsion {:?}, free lift {:?}",
        profile
            .iter()
            .map(|l| l.iter().map(ToString::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        lift.columns()
            .iter()
            .map(|c| c.iter().map(ToString::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    ))
}

fn c2_bundled_verdicts() -> Result<String, String> {
    let expected = [
        ("example3", 1, false),
        ("nadkarni", 2, true),
        ("nadkarni_alt_gamma0", 1, false),
    ];
    let mut out = Vec::new();
    for (name, p, conservative) in expected {
        let c =
            classify_action(&presets::by_name(name).unwrap().spec).map_err(|e| e.to_string())?;
        ensure(c.p == p && c.conservative == conservative, || {
            format!(
                "{name}: p={} conservative={}, expected p={p} conservative={conservative}",
                c.p, c.conservative
            )
        })?;
        out.push(format!(
            "{name}={}",
            if conservative {
                "conservative"
            } else {
                "dissipative"
            }
        ));
    }
    Ok(out.join(", "))
}

fn c3_dimension_invariance() -> Result<String, String> {
    let mut specs = bundled_specs();
    specs.extend(
        random_specs(3, 50, false)
            .into_iter()
            .map(|s| ("random", s)),
    );
    let mut p_counts = [0usize; 4];
    for (i, (name, spec)) in specs.iter().enumerate() {
        let d = spec.dim();
        let mut ps = Vec::new();
        for level in 0..=3 {
            let l = level_structure(spec, level).map_err(|e| format!("{name} #{i}: {e}"))?;
            ensure(l.quotient.free_rank + l.quotient.kernel_rank == d, || {
                format!("{name} #{i}: p + q != d at level {level}")
            })?;
            ensure(l.kernel.basis.rows() == d, || {
                format!("{name} #{i}: kernel basis has wrong ambient rank")
            })?;
            ps.push(l.quotient.free_rank);
        }
        ensure(ps.iter().all(|&p| p == ps[0]), || {
            format!("{name} #{i}: p varies across levels: {ps:?}")
        })?;
        p_counts[ps[0]] += 1;
    }
    Ok(format!(
        "{} specs, p distribution {:?} (p = 0..3)",
        specs.len(),
        p_counts
    ))
}

fn c4_snf_properties() -> Result<String, String> {
    let mut rng = common::rng(4);
    let mut rank_deficient = 0;
    for _ in 0..500 {
        let m = common::random_matrix(&mut rng);
        common::check_snf(&m)?;
        let full = m.len().min(m[0].len());
        let snf =
            stable_field_lab::lattice::smith_normal_form(&IntegerMatrix::from_rows(&m).unwrap())
                .unwrap();
        if snf.rank() < full {
            rank_deficient += 1;
        }
    }
    Ok(format!("500 matrices, {rank_deficient} rank-deficient"))
}

fn c5_bt_exactness() -> Result<String, String> {
    let model = presets::example3();
    for t in [1i64, 10, 100] {
        let len = union_length_exact(&model, &rat(t)).map_err(|e| e.to_string())?;
        // unit weight, so b(T)^alpha is the union length itself
        let scaled = len.scale(&BigRational::new(int(1), int(t)));
        let expected = QuadraticNumber::rational(rat(4) + BigRational::new(int(1), int(t)), 1);
        ensure(scaled == expected, || {
            format!("T^-1 b(T)^alpha = {scaled} at T = {t}, expected 4 + 1/{t}")
        })?;
        let f = bt_alpha_exact_indicator(&model, t as f64).map_err(|e| e.to_string())?;
        ensure(f == (4 * t + 1) as f64, || format!("b({t})^alpha = {f}"))?;
    }
    let exact = bt_exact_indicator(&model, 4.0).map_err(|e| e.to_string())?;
    let numeric = bt_numeric(&model, 4.0, 0.01, 3, DEFAULT_BT_BUDGET).map_err(|e| e.to_string())?;
    let rel = (numeric / exact - 1.0).abs();
    ensure(rel < 0.02, || {
        format!("numeric {numeric} vs exact {exact}: rel {rel:.4}")
    })?;
    Ok(format!(
        "T^-1 b^alpha = 5, 41/10, 401/100 exactly; numeric b(4) off by {:.2}%",
        100.0 * rel
    ))
}

fn simulate(model: &FieldModel) -> MaximaDataset {
    let grid = GridSpec::new(LADDER.to_vec(), LEVEL, REPS, SEED).unwrap();
    partial_maxima(model, &grid, &SimulationOptions::with_method(Method::Cell)).unwrap()
}

fn c6_frechet_branch() -> Result<String, String> {
    let model = presets::example3();
    ensure(model.alpha == ALPHA, || format!("alpha = {}", model.alpha))?;
    let tol = Tolerances::default();
    let data = simulate(&model);
    let c = classify_action(&model.spec).map_err(|e| e.to_string())?;
    let report = estimate_scaling_exponent(&data, c.p, &tol).map_err(|e| e.to_string())?;
    let target = 1.0 / ALPHA;
    ensure((report.slope - target).abs() <= 0.15, || {
        format!("slope {:.4} outside {target:.4} ± 0.15", report.slope)
    })?;

    // K from the quadrature value of C_alpha and K_X^alpha = 4
    let k = (common::tail_constant_quadrature(ALPHA) * 4.0).powf(1.0 / ALPHA);
    let k_lib = limit_scale_prediction(&model).map_err(|e| e.to_string())?;
    ensure((k - k_lib).abs() < 1e-6, || {
        format!("K = {k_lib}, oracle {k}")
    })?;

    let ks: Vec<f64> = LADDER
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let z: Vec<f64> = data.column(j).iter().map(|m| m * t.powf(-target)).collect();
            ks_one_sample(&z, |x| frechet_cdf(x, ALPHA, k))
        })
        .collect();
    let last = *ks.last().unwrap();
    ensure(last < 0.15, || {
        format!("KS at t=64 is {last:.4}; ladder {ks:?}")
    })?;
    let rise = ks.windows(2).map(|w| w[1] - w[0]).fold(f64::MIN, f64::max);
    ensure(rise <= 0.05, || format!("KS rises by {rise:.4}: {ks:?}"))?;

    let fit = frechet_gof(
        &data,
        &stable_field_lab::action::classify(&model.spec, ALPHA).unwrap(),
        k,
        &tol,
    )
    .map_err(|e| e.to_string())?;
    ensure(fit.pass, || format!("library fit disagrees: {fit:?}"))?;
    Ok(format!(
        "slope {:.3} ± {:.3} (target {target:.3}), K = {k:.5}, KS by t {:?}, verdict {}",
        report.slope,
        report.stderr,
        ks.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>(),
        report.verdict.as_str()
    ))
}

fn c7_conservative_branch() -> Result<String, String> {
    let model = presets::nadkarni();
    let data = simulate(&model);
    let fast = scaled_medians(&data, 2.0 / ALPHA);
    ensure(fast.windows(2).all(|w| w[1] < w[0]), || {
        format!("t^(-2/alpha) medians not strictly decreasing: {fast:?}")
    })?;
    let slow = scaled_medians(&data, 1.0 / ALPHA);
    let max = slow.iter().cloned().fold(f64::MIN, f64::max);
    let min = slow.iter().cloned().fold(f64::MAX, f64::min);
    ensure(max / min < 3.0, || {
        format!("t^(-1/alpha) medians vary by {:.3}: {slow:?}", max / min)
    })?;
    let report =
        estimate_scaling_exponent(&data, 2, &Tolerances::default()).map_err(|e| e.to_string())?;
    ensure(report.verdict == Verdict::ConservativeConsistent, || {
        format!("verdict {}", report.verdict.as_str())
    })?;
    Ok(format!(
        "t^(-2/alpha) medians {:?}, t^(-1/alpha) ratio {:.3}",
        fast.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>(),
        max / min
    ))
}

fn c8_conservativity_invariance() -> Result<String, String> {
    let mut checked = 0;
    let mut conservative = 0;
    let mut specs = bundled_specs();
    specs.extend(random_specs(8, 50, true).into_iter().map(|s| ("random", s)));
    for (i, (name, spec)) in specs.iter().enumerate() {
        let base_lift = level_structure(spec, 0).unwrap().quotient.free_lift_basis;
        if base_lift.cols() == 0 {
            continue;
        }
        let base = conservativity_at(spec, &base_lift, 0)
            .map_err(|e| format!("{name} #{i}: {e}"))?
            .conservative;
        for level in 0..=3 {
            let lift = level_structure(spec, level)
                .unwrap()
                .quotient
                .free_lift_basis;
            for r in [1i64, 2, 3, 5] {
                let f = lift.scale(&int(r));
                let got = conservativity_at(spec, &f, level)
                    .map_err(|e| format!("{name} #{i} level {level} r {r}: {e}"))?
                    .conservative;
                ensure(got == base, || {
                    format!("{name} #{i}: verdict changes at level {level}, r = {r}")
                })?;
            }
        }
        checked += 1;
        conservative += base as usize;
    }
    Ok(format!(
        "{checked} specs with p >= 1 ({conservative} conservative), levels 0..3, r in 2,3,5"
    ))
}

type Basis = Vec<Vec<i64>>;

/// Bases for the covering comparison: decompositions of random specs plus
/// a few hand-picked non-unimodular ones.
fn covering_bases() -> Vec<(Basis, Basis)> {
    let to_i64 = |m: &IntegerMatrix| -> Vec<Vec<i64>> {
        m.columns()
            .iter()
            .map(|c| c.iter().map(|x| i64::try_from(x).unwrap()).collect())
            .collect()
    };
    let mut out: Vec<(Basis, Basis)> = vec![
        (vec![vec![2]], vec![]),
        (vec![vec![1, 1]], vec![vec![1, -1]]),
        (vec![vec![2, 0]], vec![vec![0, 1]]),
        (vec![vec![1, 0, 0]], vec![vec![1, 1, 0], vec![0, 0, 2]]),
        (vec![vec![1, 2, 0]], vec![vec![0, 1, 1], vec![1, 0, 1]]),
    ];
    let mut rng = common::rng(9);
    while out.len() < 14 {
        let spec = common::random_spec(&mut rng, false);
        let q = level_structure(&spec, 0).unwrap().quotient;
        let (u, v) = (to_i64(&q.free_lift_basis), to_i64(&q.kernel_basis));
        if u.is_empty() || v.iter().flatten().any(|x| x.abs() > 4) {
            continue;
        }
        out.push((u, v));
    }
    out
}

fn c9_covering() -> Result<String, String> {
    let q = level_structure(&presets::example3().spec, 0)
        .unwrap()
        .quotient;
    let (u, v) = (q.free_lift_basis.columns(), q.kernel_basis.columns());
    let found = covering_constant_search(&u, &v, 2, 1, 8).map_err(|e| e.to_string())?;
    ensure(found.is_some(), || "no M <= 8 found for example3".into())?;

    let mut instances = 0;
    let mut covered = 0;
    for (u, v) in covering_bases() {
        let basis: Vec<Vec<i64>> = u.iter().chain(&v).cloned().collect();
        let (ub, vb) = (common::to_bigint_vecs(&u), common::to_bigint_vecs(&v));
        for n in 1..=2u64 {
            for m in 0..=1u32 {
                for bound in 0..=2u64 {
                    let fast = verify_covering(bound, &ub, &vb, n, m).map_err(|e| e.to_string())?;
                    let slow = common::brute_force_covers(bound as i64, &basis, n as i64, m);
                    ensure(fast == slow, || {
                        format!("u={u:?} v={v:?} n={n} m={m} M={bound}: verifier {fast}, brute force {slow}")
                    })?;
                    instances += 1;
                    covered += fast as usize;
                }
            }
        }
    }
    Ok(format!(
        "example3 M = {}; {instances} instances agree ({covered} covered)",
        found.unwrap()
    ))
}

fn c10_tail_constant() -> Result<String, String> {
    let at_one = tail_constant(1.0);
    let err1 = (at_one - 2.0 / std::f64::consts::PI).abs();
    ensure(err1 < 1e-12, || format!("C_1 = {at_one}, |err| = {err1:e}"))?;
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.5] {
        let lib = tail_constant(alpha);
        let quad = common::tail_constant_quadrature(alpha);
        let err = (lib - quad).abs();
        worst = worst.max(err);
        ensure(err < 1e-6, || {
            format!("C_{alpha}: {lib} vs quadrature {quad}")
        })?;
    }
    let jump = [1.0 - 1e-6, 1.0 + 1e-6]
        .iter()
        .map(|&a| (tail_constant(a) - at_one).abs())
        .fold(0.0, f64::max);
    ensure(jump < 1e-4, || {
        format!("C_alpha jumps by {jump:e} at alpha = 1")
    })?;
    Ok(format!(
        "|C_1 - 2/pi| = {err1:.1e}, quadrature gap {worst:.1e}, jump at 1 {jump:.1e}"
    ))
}

fn run_cli(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_stable-field-lab"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

fn c11_determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut artifacts = Vec::new();
    for run in 0..2 {
        let csv = dir.path().join(format!("run{run}.csv"));
        let json = dir.path().join(format!("run{run}.json"));
        let (csv_s, json_s) = (csv.to_str().unwrap(), json.to_str().unwrap());
        let seed = SEED.to_string();
        let reps = REPS.to_string();
        let level = LEVEL.to_string();
        let out = run_cli(&[
            "simulate",
            "--model",
            "example3",
            "--out",
            csv_s,
            "--t-ladder",
            "8,16,32,64",
            "--level",
            &level,
            "--reps",
            &reps,
            "--seed",
            &seed,
            "--method",
            "cell",
        ])?;
        ensure(out.status.success(), || {
            format!("simulate failed: {}", String::from_utf8_lossy(&out.stderr))
        })?;
        let out = run_cli(&[
            "verdict",
            "--model",
            "example3",
            "--dataset",
            csv_s,
            "--out",
            json_s,
        ])?;
        ensure(out.status.success(), || {
            format!("verdict failed: {}", String::from_utf8_lossy(&out.stderr))
        })?;
        let read = |p: &std::path::Path| std::fs::read(p).map_err(|e| e.to_string());
        let meta = stable_field_lab::simulator::meta_path(&csv);
        artifacts.push((read(&csv)?, read(&meta)?, read(&json)?));
    }
    let (a, b) = (&artifacts[0], &artifacts[1]);
    ensure(a.0 == b.0, || "dataset CSV differs between runs".into())?;
    ensure(a.1 == b.1, || {
        "dataset metadata differs between runs".into()
    })?;
    ensure(a.2 == b.2, || "verdict JSON differs between runs".into())?;
    ensure(!a.0.is_empty() && !a.2.is_empty(), || {
        "empty artifacts".into()
    })?;

    // the library pipeline reproduces the CLI bytes
    let lib_csv = simulate(&presets::example3()).to_csv_string();
    ensure(lib_csv.as_bytes() == a.0.as_slice(), || {
        "library CSV differs from CLI CSV".into()
    })?;
    let json: serde_json::Value = serde_json::from_slice(&a.2).map_err(|e| e.to_string())?;
    Ok(format!(
        "CSV {} bytes, meta {} bytes, report {} bytes identical; verdict {}",
        a.0.len(),
        a.1.len(),
        a.2.len(),
        json["verdict"]
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, f64, Check); 11] = [
        (1, "dimension of example3", 1.0, c1_example_dimension),
        (
            2,
            "conservativity of bundled models",
            1.0,
            c2_bundled_verdicts,
        ),
        (3, "level invariance of p", 10.0, c3_dimension_invariance),
        (4, "Smith normal form properties", 30.0, c4_snf_properties),
        (5, "b(T) exactness", f64::INFINITY, c5_bt_exactness),
        (6, "Frechet branch", 300.0, c6_frechet_branch),
        (7, "conservative branch", 300.0, c7_conservative_branch),
        (
            8,
            "conservativity invariance",
            5.0,
            c8_conservativity_invariance,
        ),
        (9, "covering verifier", 30.0, c9_covering),
        (10, "tail constant", f64::INFINITY, c10_tail_constant),
        (11, "determinism", f64::INFINITY, c11_determinism),
    ];
    let filter: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, limit, check) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .map_or_else(|| "panicked".into(), |s| format!("panicked: {s}")))
        });
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(detail) if secs > limit => Err(format!("took {secs:.1}s, limit {limit}s; {detail}")),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!("criterion {id:>2} [{tag}] {name} ({secs:.2}s): {detail}");
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
