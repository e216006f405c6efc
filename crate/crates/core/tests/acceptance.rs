//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! fails. Run with `cargo test --test acceptance`.

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use posswitch::cli::{cmd_analyze, cmd_verify, AnalyzeArgs, VerifyArgs};
use posswitch::hourglass::{check_hourglass, Axiom, HourglassOptions, HourglassStatus};
use posswitch::oracle::{
    exhaustive_extremum, exhaustive_optimal_sequences, finrel_scan, sequence_images, FinrelOptions, DEFAULT_BUDGET,
};
use posswitch::spectral::{dense_spectral_radius, product_bounds, rho_extrema, spectral_radius, SpectralMethod};
use posswitch::{greedy_trajectory, stabilizing_sequence, Direction, Matrix, MatrixSet, Mode, MonotoneObjective, NormKind};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            out.pass = false;
            out.detail += &format!("; exceeded {:.0} s limit", limit.as_secs_f64());
        }
    }
    (out, elapsed)
}

fn close_abs(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn counterexample() -> Outcome {
    let a1 = Matrix::from_rows(&[[2.0, 4.0], [1.0, 2.0]]).unwrap();
    let a2 = Matrix::from_rows(&[[2.0, 1.0], [4.0, 2.0]]).unwrap();
    let r1 = spectral_radius(&a1).unwrap().value;
    let r2 = spectral_radius(&a2).unwrap().value;
    let r12 = spectral_radius(&a1.mul(&a2)).unwrap().value;
    let set = MatrixSet::explicit(vec![a1, a2], Mode::Positive).unwrap();
    let rho_max = rho_extrema(&set, 10).unwrap().rho_max;
    let bounds = product_bounds(&set, 2, NormKind::Inf, DEFAULT_BUDGET).unwrap();
    let verdict =
        check_hourglass(&set, &HourglassOptions { forced: vec![vec![1.0, 1.0]], ..Default::default() }).unwrap();
    let h1_at_ones = verdict.status == HourglassStatus::Fail
        && verdict.witness.as_ref().is_some_and(|w| w.axiom == Axiom::H1 && w.x == [1.0, 1.0]);
    let pass = close_abs(r1, 4.0, 1e-10)
        && close_abs(r2, 4.0, 1e-10)
        && close_abs(r12, 25.0, 1e-10)
        && bounds.jsr_lower >= 5.0 - 1e-9
        && bounds.jsr_lower > rho_max
        && close_abs(rho_max, 4.0, 1e-10)
        && h1_at_ones;
    outcome(
        pass,
        format!(
            "rho(A1)={r1:.12} rho(A2)={r2:.12} rho(A1A2)={r12:.12} jsr_lower(n=2)={:.12} rho_max={rho_max:.12} hourglass H1 fails at (1,1): {h1_at_ones}",
            bounds.jsr_lower
        ),
    )
}

fn scan_all(sets: &[MatrixSet], max_depth: usize) -> (bool, u64, u64, u64, String) {
    let (mut classes, mut sequences, mut exact) = (0u64, 0u64, 0u64);
    for (i, set) in sets.iter().enumerate() {
        let scan = finrel_scan(set, &FinrelOptions { max_depth, ..Default::default() }).unwrap();
        for d in &scan.depths {
            classes += d.cyclic_classes;
            sequences += d.sequences;
            exact += d.exact_evaluations;
        }
        if !scan.holds {
            let bad = scan.depths.iter().find(|d| d.upper_violations + d.lower_violations > 0 || !d.attained);
            return (false, classes, sequences, exact, format!("set {i} fails: {bad:?}"));
        }
    }
    (true, classes, sequences, exact, String::new())
}

fn finrel_consistency() -> Outcome {
    let mut rng = common::rng(2);
    let mut sets: Vec<MatrixSet> = (0..100).map(|_| common::random_iru(&mut rng, 3, 2..=3)).collect();
    for _ in 0..20 {
        let len = rng.gen_range(2..=5);
        sets.push(common::random_chain(&mut rng, 3, 3, len));
    }
    // the per-product certificate must agree with explicit spectral radii
    for set in sets.iter().step_by(10) {
        let exact = finrel_scan(set, &FinrelOptions { max_depth: 4, use_certificate: false, ..Default::default() })
            .unwrap();
        let fast = finrel_scan(set, &FinrelOptions { max_depth: 4, ..Default::default() }).unwrap();
        if exact.holds != fast.holds {
            return outcome(false, "certificate and explicit spectral radii disagree");
        }
    }
    let (pass, classes, sequences, exact, why) = scan_all(&sets, 6);
    outcome(
        pass,
        format!(
            "100 IRU sets + 20 chains, n<=6: {sequences} products in {classes} rotation classes, {exact} explicit spectral radii, bounds within 1e-8 and attained by witness powers {why}"
        ),
    )
}

/// Positive 3x3 IRU set with at most eight members.
fn small_iru(rng: &mut rand_chacha::ChaCha8Rng) -> MatrixSet {
    loop {
        let sizes: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=2)).collect();
        if sizes.iter().product::<usize>() >= 2 {
            return common::iru_with_sizes(rng, 3, &sizes);
        }
    }
}

struct TrajectoryInstance {
    set: MatrixSet,
    x0: Vec<f64>,
    steps: usize,
}

fn trajectory_instances() -> Vec<TrajectoryInstance> {
    let mut rng = common::rng(3);
    (0..50)
        .map(|i| {
            let set = small_iru(&mut rng);
            let x0 = common::positive_vector(&mut rng, 3);
            TrajectoryInstance { set, x0, steps: 1 + i % 7 }
        })
        .collect()
}

fn greedy_optimality(instances: &[TrajectoryInstance]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut comparisons = 0;
    for (i, inst) in instances.iter().enumerate() {
        for dir in [Direction::Max, Direction::Min] {
            let mut traj = greedy_trajectory(&inst.set, &inst.x0, inst.steps, dir).unwrap();
            if traj.selection_passes != inst.steps {
                return outcome(false, format!("instance {i}: {} passes for {} steps", traj.selection_passes, inst.steps));
            }
            let chosen = traj.chosen.clone();
            for nu in MonotoneObjective::NORMS {
                let greedy = *traj.evaluate(&nu).unwrap().values.last().unwrap();
                let brute = exhaustive_extremum(&inst.set, &inst.x0, inst.steps, &nu, dir, DEFAULT_BUDGET).unwrap();
                let rel = (greedy - brute.best_value).abs() / brute.best_value.abs();
                worst = worst.max(rel);
                comparisons += 1;
                if traj.chosen != chosen {
                    return outcome(false, format!("instance {i}: choices changed with {}", nu.name()));
                }
            }
        }
    }
    outcome(
        worst <= 1e-9,
        format!("{comparisons} greedy/exhaustive comparisons over 50 sets (K<=8, n<=7): worst relative gap {worst:.2e}; n passes and shared choices for every objective"),
    )
}

fn images_match(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    a.iter().zip(b).all(|(u, v)| u.iter().zip(v).all(|(x, y)| common::rel_close(*x, *y, tol)))
}

fn strict_image_equality(instances: &[TrajectoryInstance]) -> Outcome {
    let mut checked = 0;
    let mut linf_witness = None;
    for (i, inst) in instances.iter().enumerate() {
        for dir in [Direction::Max, Direction::Min] {
            let greedy = greedy_trajectory(&inst.set, &inst.x0, inst.steps, dir).unwrap().true_states();
            let l1 = exhaustive_optimal_sequences(
                &inst.set,
                &inst.x0,
                inst.steps,
                &MonotoneObjective::L1,
                dir,
                DEFAULT_BUDGET,
                1e-12,
            )
            .unwrap();
            for seq in l1 {
                checked += 1;
                if !images_match(&sequence_images(&inst.set, &inst.x0, &seq).unwrap(), &greedy, 1e-9) {
                    return outcome(false, format!("instance {i} ({dir}): L1-optimal {seq:?} leaves the greedy images"));
                }
            }
            if linf_witness.is_none() {
                let linf = exhaustive_optimal_sequences(
                    &inst.set,
                    &inst.x0,
                    inst.steps,
                    &MonotoneObjective::Linf,
                    dir,
                    DEFAULT_BUDGET,
                    1e-12,
                )
                .unwrap();
                linf_witness = linf
                    .into_iter()
                    .find(|seq| !images_match(&sequence_images(&inst.set, &inst.x0, seq).unwrap(), &greedy, 1e-9))
                    .map(|seq| (i, dir, seq));
            }
        }
    }
    let linf = match linf_witness {
        Some((i, dir, seq)) => format!("Linf-optimal sequence with different images: instance {i} ({dir}) {seq:?}"),
        None => "no Linf-optimal sequence with different images at these sizes".into(),
    };
    outcome(true, format!("{checked} L1-optimal sequences follow the greedy images within 1e-9; {linf}"))
}

fn semiring_closure() -> Outcome {
    let mut rng = common::rng(5);
    let mut sets = Vec::new();
    for i in 0..30 {
        let set = common::random_fig1(&mut rng, 2);
        let v = check_hourglass(&set, &HourglassOptions { samples: 1000, seed: i, ..Default::default() }).unwrap();
        if v.status != HourglassStatus::Pass || v.samples_tested < 1000 {
            return outcome(false, format!("composition {i} fails the hourglass check: {:?}", v.witness));
        }
        sets.push(set);
    }
    let sizes: Vec<String> = sets.iter().map(|s| s.cardinality().to_string()).collect();
    let (pass, classes, sequences, exact, why) = scan_all(&sets, 4);
    outcome(
        pass,
        format!(
            "30 compositions A3(A1 + A2) + A4 (members: {}): hourglass passes 1000 samples each; n<=4: {sequences} products in {classes} rotation classes, {exact} explicit spectral radii {why}",
            sizes.join(",")
        ),
    )
}

fn stabilization() -> Outcome {
    let mut rng = common::rng(6);
    let composed = common::random_fig1(&mut rng, 3);
    let rho_min = rho_extrema(&composed, 1_000_000).unwrap().rho_min;
    let set = composed.scaled(0.5 / rho_min).unwrap();
    let report = stabilizing_sequence(&set, &[1.0, 1.0, 1.0], 30).unwrap();
    let pass = (report.decay_rate - 0.5).abs() <= 0.1 && report.stabilizable == Some(true);
    outcome(
        pass,
        format!(
            "{} members scaled to rho_min={:.12}: empirical L1 decay over 30 steps {:.6}",
            set.cardinality(),
            report.rho_min.unwrap_or(f64::NAN),
            report.decay_rate
        ),
    )
}

fn spectral_kernel() -> Outcome {
    let mut rng = common::rng(7);
    let mut worst_dense: f64 = 0.0;
    let mut worst_scale: f64 = 0.0;
    let mut worst_power: f64 = 0.0;
    let mut by_power = 0;
    for i in 0..500 {
        let n = rng.gen_range(1..=12);
        let density = rng.gen_range(0.2..=1.0);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| if rng.gen_bool(density) { rng.gen_range(0.0..10.0) } else { 0.0 }).collect())
            .collect();
        let a = Matrix::from_rows(&rows).unwrap();
        let sr = spectral_radius(&a).unwrap();
        by_power += (sr.method == SpectralMethod::PowerIteration) as usize;
        let dense = dense_spectral_radius(&a).unwrap();
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
        worst_dense = worst_dense.max(rel(sr.value, dense));
        let t = 10f64.powf(rng.gen_range(-2.0..2.0));
        worst_scale = worst_scale.max(rel(spectral_radius(&a.scale(t)).unwrap().value, t * sr.value));
        let k = 1 + i % 5;
        let rk = spectral_radius(&a.pow(k as u32)).unwrap().value;
        worst_power = worst_power.max(rel(rk, sr.value.powi(k)));
    }
    outcome(
        worst_dense <= 1e-9 && worst_scale <= 1e-10 && worst_power <= 1e-8,
        format!(
            "500 random non-negative matrices up to 12x12 ({by_power} by power iteration): vs dense {worst_dense:.2e}, homogeneity {worst_scale:.2e}, powers {worst_power:.2e} (relative)"
        ),
    )
}

fn cli_determinism() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("systems");
    let mut compared = 0;
    for file in ["counterexample.toml", "fig1.toml", "iru_running.toml", "fig1_stable.toml"] {
        let path = dir.join(file);
        let analyze = || {
            cmd_analyze(&AnalyzeArgs {
                path: path.clone(),
                oracle_depth: Some(3),
                norm: NormKind::Inf,
                samples: 1000,
                seed: 42,
            })
            .map(|d| d.to_json())
            .map_err(|e| e.message)
        };
        let verify = || {
            cmd_verify(&VerifyArgs { path: path.clone(), max_depth: 3, trials: 3, seed: 42 })
                .map(|d| d.to_json())
                .map_err(|e| e.message)
        };
        for (name, f) in [("analyze", &analyze as &dyn Fn() -> Result<String, String>), ("verify", &verify)] {
            match (f(), f()) {
                (Ok(a), Ok(b)) if a == b => compared += 1,
                (Ok(_), Ok(_)) => return outcome(false, format!("{name} {file}: reports differ")),
                (Err(e), _) | (_, Err(e)) => return outcome(false, format!("{name} {file}: {e}")),
            }
        }
    }
    outcome(true, format!("{compared} report pairs byte-identical across runs with seed 42"))
}

fn main() {
    let instances = trajectory_instances();
    let criteria: Vec<(&str, Option<Duration>, Box<dyn FnOnce() -> Outcome + '_>)> = vec![
        ("counterexample reproduction", Some(Duration::from_secs(1)), Box::new(counterexample)),
        ("finrel consistency", Some(Duration::from_secs(60)), Box::new(finrel_consistency)),
        ("greedy optimality", None, Box::new(|| greedy_optimality(&instances))),
        ("strict objective image equality", None, Box::new(|| strict_image_equality(&instances))),
        ("semiring closure", Some(Duration::from_secs(120)), Box::new(semiring_closure)),
        ("stabilization", None, Box::new(stabilization)),
        ("spectral kernel", None, Box::new(spectral_kernel)),
        ("CLI determinism", None, Box::new(cli_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let (out, elapsed) = timed(limit, f);
        let tag = if out.pass { "PASS" } else { "FAIL" };
        failed += !out.pass as usize;
        println!("[{tag}] criterion {}: {name} ({:.2} s): {}", i + 1, elapsed.as_secs_f64(), out.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
