//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the summary lines are always printed.

use std::collections::BTreeMap;
use std::fs;
use std::process::{Command, ExitCode};
use std::time::Instant;

use graphleja::graph::{Measure, SparseSymMatrix};
use graphleja::harness::{
    build_instance, layout_statistics, random_subset_statistics, run_error_experiment,
    verify_bounds, BoundLedger, ExperimentConfig, Fixed, GraphFamily, MeasurePolicy, Quantity,
};
use graphleja::kernel::{
    diag_modified_kernel, householder_kernel, sinkhorn_kernel, verify_equilibrium, DiagMode,
    EquilibriumKernel, SymOperator,
};
use graphleja::leja::{leja_sequence, StartPolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIZES: [usize; 3] = [5, 20, 100];
const SWEEP: usize = 500;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Connected non-negative graph: random spanning tree plus `2n` random edges,
/// weights in `[0.1, 1)`.
fn random_graph(n: usize, rng: &mut ChaCha8Rng) -> SparseSymMatrix {
    let mut edges = BTreeMap::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.insert((j, i), rng.random_range(0.1..1.0));
    }
    for _ in 0..2 * n {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        if i != j {
            edges.insert((i.min(j), i.max(j)), rng.random_range(0.1..1.0));
        }
    }
    SparseSymMatrix::from_entries(n, edges.into_iter().map(|((i, j), w)| (i, j, w))).unwrap()
}

fn random_measure(n: usize, rng: &mut ChaCha8Rng) -> Measure {
    Measure::normalized((0..n).map(|_| rng.random_range(0.05..1.0)).collect()).unwrap()
}

/// Kernels satisfying the sweep hypotheses: entrywise non-negative and
/// conditionally positive semidefinite.
fn sweep_kernels(a: &SparseSymMatrix, v: &Measure) -> Vec<(&'static str, EquilibriumKernel)> {
    vec![
        ("sinkhorn", sinkhorn_kernel(&a.square(), v, 0.05, 1e-12, 100_000).unwrap().0),
        ("diag_strict", diag_modified_kernel(a, v, DiagMode::Strict).unwrap()),
        ("diag_graph", diag_modified_kernel(a, v, DiagMode::GraphPreserving).unwrap()),
    ]
}

/// Bound ledgers over `n = 1..=500` for 20 instances, three kernels each.
fn sweep_ledgers() -> Vec<BoundLedger> {
    let grid: Vec<usize> = (1..=SWEEP).collect();
    let mut out = Vec::new();
    for inst in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + inst);
        let n = SIZES[inst as usize % 3];
        let a = random_graph(n, &mut rng);
        let v = random_measure(n, &mut rng);
        for (_, g) in sweep_kernels(&a, &v) {
            let seq = leja_sequence(&g, SWEEP, StartPolicy::MinDiagonal).unwrap();
            out.push(verify_bounds(&g, &v, seq.points(), None, &grid).unwrap());
        }
    }
    out
}

fn count(ledgers: &[BoundLedger], q: Quantity) -> (usize, usize) {
    let rows = ledgers.iter().flat_map(|l| &l.rows).filter(|r| r.quantity == q);
    rows.fold((0, 0), |(all, bad), r| (all + 1, bad + usize::from(!r.check.passed)))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let mut checks = 0;
    for inst in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(inst);
        let n = SIZES[inst as usize % 3];
        let a = random_graph(n, &mut rng);
        let v = random_measure(n, &mut rng);
        let kernels = [
            diag_modified_kernel(&a, &v, DiagMode::Strict),
            householder_kernel(&a.laplacian(), &v, inst),
            sinkhorn_kernel(&a, &v, 0.05, 1e-10, 100_000).map(|(g, _)| g),
        ];
        for g in kernels {
            checks += 1;
            match g.and_then(|g| verify_equilibrium(&g, &v, 1e-8)) {
                Ok(r) => {
                    worst = worst.max(r.max_dev);
                    failures += usize::from(!r.passed);
                }
                Err(_) => failures += 1,
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures == 0 && secs < 60.0,
        format!("{checks} kernels, {failures} failures, max deviation {worst:.2e} (tol 1e-8), {secs:.1} s (limit 60 s)"),
    )
}

fn criterion_2(ledgers: &[BoundLedger]) -> Outcome {
    let (all, bad) = count(ledgers, Quantity::PotentialDiscrepancy);
    outcome(bad == 0, format!("potential discrepancy <= 3|||G|||/(n+1): {bad} violations in {all} checks, n in [2, {SWEEP}]"))
}

fn criterion_3(ledgers: &[BoundLedger]) -> Outcome {
    let (all, bad) = count(ledgers, Quantity::EnergyDistance);
    outcome(bad == 0, format!("energy distance <= (M - Gamma)/n: {bad} violations in {all} checks, n in [1, {SWEEP}]"))
}

fn criterion_4() -> Outcome {
    let grid = graphleja::harness::log_grid(SWEEP);
    let (mut all, mut bad, mut missing) = (0, 0, 0);
    for pair in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + pair);
        let n = SIZES[pair as usize % 3];
        let a = random_graph(n, &mut rng);
        let v = random_measure(n, &mut rng);
        let (_, g) = sweep_kernels(&a, &v).swap_remove(pair as usize % 3);
        // f = G w lies in the range of G.
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = g.apply_vec(&w);
        let seq = leja_sequence(&g, SWEEP, StartPolicy::MinDiagonal).unwrap();
        let ledger = verify_bounds(&g, &v, seq.points(), Some(&f), &grid).unwrap();
        let rows: Vec<_> = ledger.rows.iter().filter(|r| r.quantity == Quantity::QuadratureError).collect();
        missing += usize::from(rows.is_empty());
        all += rows.len();
        bad += rows.iter().filter(|r| !r.check.passed).count();
    }
    outcome(
        bad == 0 && missing == 0,
        format!("quadrature error <= 3|||G||| |w|_1/(n+1): {bad} violations in {all} checks, {missing} pairs without a witness"),
    )
}

fn criterion_5(ledgers: &[BoundLedger]) -> Outcome {
    let (la, lb) = count(ledgers, Quantity::StepMinimaLower);
    let (ua, ub) = count(ledgers, Quantity::StepMinimaUpper);
    let (sa, sb) = count(ledgers, Quantity::SummabilityDiscrepancy);
    // The uncorrected lower end nΓ/(n−1) − M/n, for information only.
    let literal = ledgers
        .iter()
        .flat_map(|l| {
            l.rows
                .iter()
                .filter(|r| r.quantity == Quantity::StepMinimaLower)
                .map(move |r| (l, r))
        })
        .filter(|(l, r)| {
            let n = r.n as f64;
            r.check.measured < n * l.gamma / (n - 1.0) - l.diag_max / n
        })
        .count();
    outcome(
        lb + ub + sb == 0,
        format!(
            "step minima lower {lb}/{la}, upper {ub}/{ua}, summability 2|||G|||/n {sb}/{sa} violations; uncorrected lower end would be violated {literal} times"
        ),
    )
}

/// Dense recomputation of every step, first strict minimum in id order.
fn brute_force(g: &[f64], n: usize, len: usize, a0: usize) -> Vec<usize> {
    let mut seq = vec![a0];
    while seq.len() < len {
        let mut best: Option<(usize, f64)> = None;
        for x in 0..n {
            let p: f64 = seq.iter().map(|&a| g[x * n + a]).sum();
            if best.is_none_or(|(_, bp)| p < bp) {
                best = Some((x, p));
            }
        }
        seq.push(best.unwrap().0);
    }
    seq
}

fn criterion_6() -> Outcome {
    let mut mismatches = 0;
    let mut cases = 0;
    for inst in 0..12u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + inst);
        let n = [10, 50, 100, 200][inst as usize % 4];
        let a = random_graph(n, &mut rng);
        let v = random_measure(n, &mut rng);
        let mut kernels = sweep_kernels(&a, &v);
        kernels.push(("householder", householder_kernel(&a.laplacian(), &v, inst).unwrap()));
        for (_, g) in kernels {
            let len = 2 * n;
            let seq = leja_sequence(&g, len, StartPolicy::MinDiagonal).unwrap();
            let a0 = StartPolicy::MinDiagonal.resolve(&g).unwrap();
            cases += 1;
            mismatches += usize::from(seq.points() != brute_force(&g.to_dense(), n, len, a0).as_slice());
        }
    }
    outcome(mismatches == 0, format!("{mismatches} of {cases} sequences differ from the dense recomputation (n <= 200)"))
}

fn criterion_7() -> Outcome {
    let rel = |a: f64, b: f64, scale: f64| (a - b).abs() / scale.max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    let mut probes = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(9000);
    while probes < 1000 {
        let n = rng.random_range(2..=200);
        let alpha = rng.random_range(0.01..0.5);
        let a = random_graph(n, &mut rng);
        let v = random_measure(n, &mut rng);
        let (g, s) = sinkhorn_kernel(&a, &v, alpha, 1e-12, 100_000).unwrap();
        let ad = a.to_dense();
        let c: Vec<f64> = s.d.iter().zip(v.values()).map(|(d, v)| d / v).collect();
        let oracle = |x: usize, y: usize| ((1.0 - alpha) * ad[x * n + y] + alpha / n as f64) * c[x] * c[y];
        for _ in 0..100 {
            probes += 1;
            match rng.random_range(0..3) {
                0 => {
                    let (x, y) = (rng.random_range(0..n), rng.random_range(0..n));
                    worst = worst.max(rel(g.entry(x, y), oracle(x, y), oracle(x, y).abs()));
                }
                1 => {
                    let x = rng.random_range(0..n);
                    for (y, gy) in g.column(x).into_iter().enumerate() {
                        worst = worst.max(rel(gy, oracle(y, x), oracle(y, x).abs()));
                    }
                }
                _ => {
                    let f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let got = g.apply_vec(&f);
                    for (x, gx) in got.into_iter().enumerate() {
                        let want: f64 = (0..n).map(|y| oracle(x, y) * f[y]).sum();
                        let scale: f64 = (0..n).map(|y| (oracle(x, y) * f[y]).abs()).sum();
                        worst = worst.max(rel(gx, want, scale));
                    }
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("{probes} probes, max relative error {worst:.2e} (tol 1e-12)"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        n_grid: vec![50, 200],
        ..ExperimentConfig::default()
    };
    let curve = run_error_experiment(&cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let err = |n, e| curve.row(n, e).unwrap().mean_abs_error;
    let (l50, l200, mc200) = (err(50, "leja"), err(200, "leja"), err(200, "monte_carlo"));
    outcome(
        l200 < mc200 && l200 <= 0.5 * l50 && secs < 300.0,
        format!(
            "{} trials: Leja {l50:.2e} at n=50, {l200:.2e} at n=200; Monte Carlo {mc200:.2e} at n=200; {secs:.1} s (limit 300 s)",
            curve.trials_used
        ),
    )
}

fn criterion_9() -> Outcome {
    let cfg = ExperimentConfig {
        family: GraphFamily::UniformKnn,
        vertices: 1000,
        knn_k: 50,
        sigma: 0.05,
        measure: MeasurePolicy::Uniform,
        ..ExperimentConfig::default()
    };
    let fixed = Fixed::load(&cfg).unwrap();
    let inst = build_instance(&cfg, &fixed, 0).unwrap();
    let cloud = inst.cloud.unwrap();
    let (g, _) = sinkhorn_kernel(&inst.base, &inst.measure, cfg.alpha, cfg.sinkhorn_tol, cfg.sinkhorn_max_iter).unwrap();
    let mut seq = leja_sequence(&g, 100, StartPolicy::MinDiagonal).unwrap();
    // Repeats are allowed, so extend until 100 distinct points are chosen.
    while graphleja::harness::first_distinct(seq.points(), 100).len() < 100 && seq.len() < 5000 {
        seq.extend(&g, 100).unwrap();
    }
    let leja = layout_statistics(seq.points(), &cloud, 100).unwrap();
    let mut radii: Vec<f64> = random_subset_statistics(&cloud, 100, 200, 1)
        .unwrap()
        .iter()
        .map(|s| s.covering_radius)
        .collect();
    radii.sort_by(f64::total_cmp);
    let median = 0.5 * (radii[99] + radii[100]);
    outcome(
        leja.points == 100 && leja.covering_radius < median,
        format!(
            "covering radius of 100 Leja points {:.4} (sequence length {}) vs median of 200 random subsets {median:.4}",
            leja.covering_radius,
            seq.len()
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut errs = Vec::new();
    for n in [250, 500, 1000, 2000] {
        let cfg = ExperimentConfig {
            vertices: n,
            n_grid: vec![100],
            trials: 20,
            ..ExperimentConfig::default()
        };
        let curve = run_error_experiment(&cfg).unwrap();
        errs.push((n, curve.row(100, "leja").unwrap().mean_abs_error));
    }
    let ratio = |xs: &[(usize, f64)]| {
        let max = xs.iter().map(|e| e.1).fold(f64::MIN, f64::max);
        let min = xs.iter().map(|e| e.1).fold(f64::MAX, f64::min);
        max / min
    };
    let beyond = ratio(&errs[1..]);
    let list: Vec<String> = errs.iter().map(|(n, e)| format!("N={n}: {e:.2e}")).collect();
    outcome(
        beyond < 2.0,
        format!(
            "Leja error at n=100: {}; max/min over N >= 500 is {beyond:.2} (limit 2), {:.2} including N=250",
            list.join(", "),
            ratio(&errs)
        ),
    )
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = random_graph(40, &mut rng);
    let edges: String = a.upper_entries().map(|(i, j, w)| format!("{i} {j} {w:e}\n")).collect();
    fs::write(p("edges.txt"), edges).unwrap();
    fs::write(p("f.txt"), (0..40).map(|i| format!("{}\n", (i as f64).sin())).collect::<String>()).unwrap();

    let run = |args: Vec<String>| {
        let o = Command::new(env!("CARGO_BIN_EXE_graphleja")).args(&args).output().unwrap();
        o.status.success()
    };
    let commands: Vec<(&str, Vec<String>)> = vec![
        ("kernel", vec!["kernel".into(), "--input".into(), p("edges.txt"), "--measure".into(), "inverse_density".into(), "--set".into(), "square=true".into()]),
        ("leja", vec!["leja".into(), "--input".into(), p("kernel.txt"), "--n".into(), "80".into()]),
        ("estimate", vec!["estimate".into(), "--input".into(), p("kernel.txt"), "--function".into(), p("f.txt"), "--seed".into(), "3".into()]),
        ("verify", vec!["verify".into(), "--input".into(), p("kernel.txt"), "--n".into(), "80".into(), "--format".into(), "json".into()]),
        ("experiment", vec!["experiment".into(), "--set".into(), "vertices=100".into(), "--set".into(), "knn_k=10".into(), "--set".into(), "trials=4".into(), "--seed".into(), "7".into()]),
    ];
    let mut differing = Vec::new();
    let mut failed = Vec::new();
    for (name, args) in &commands {
        let mut outputs = Vec::new();
        // Same output path both times, since the header records it.
        let out = if *name == "kernel" { p("kernel.txt") } else { p(&format!("{name}.out")) };
        for _ in 0..2 {
            let mut a = args.clone();
            a.extend(["--out".to_string(), out.clone()]);
            if !run(a) {
                failed.push(*name);
            }
            outputs.push(fs::read(&out).unwrap_or_default());
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            differing.push(*name);
        }
    }
    outcome(
        differing.is_empty() && failed.is_empty(),
        format!(
            "{} commands run twice; differing outputs: {differing:?}; failed runs: {failed:?}",
            commands.len()
        ),
    )
}

fn main() -> ExitCode {
    let ledgers = sweep_ledgers();
    let checks: Vec<Box<dyn Fn() -> Outcome + '_>> = vec![
        Box::new(criterion_1),
        Box::new(|| criterion_2(&ledgers)),
        Box::new(|| criterion_3(&ledgers)),
        Box::new(criterion_4),
        Box::new(|| criterion_5(&ledgers)),
        Box::new(criterion_6),
        Box::new(criterion_7),
        Box::new(criterion_8),
        Box::new(criterion_9),
        Box::new(criterion_10),
        Box::new(criterion_11),
    ];
    let mut failed = 0;
    for (k, check) in checks.iter().enumerate() {
        let o = check();
        println!("criterion {}: {} {}", k + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of {} criteria passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
