mod settings;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphleja::graph::{inverse_density_measure, load_edge_list, load_measure, Measure, SparseSymMatrix};
use graphleja::harness::{
    curve_csv, curve_json, ledger_csv, ledger_json, log_grid, run_error_experiment, verify_bounds,
    ExperimentConfig,
};
use graphleja::kernel::{
    build_kernel, kernel_fingerprint, read_kernel, verify_equilibrium, write_kernel,
    EquilibriumKernel, KernelOptions, Method, DEFAULT_ALPHA, DEFAULT_SINKHORN_MAX_ITER,
    DEFAULT_SINKHORN_TOL,
};
use graphleja::leja::{
    bound_quadest, equal_weight_estimate, leja_sequence, monte_carlo_estimate, summability_estimate,
    witness_l1, EstimateReport, StartPolicy, DEFAULT_WITNESS_TOL,
};
use settings::{Settings, SettingsError, REQUIRED};
use thiserror::Error;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "graphleja", version, about = "Leja-point quadrature on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an equilibrium kernel from an edge list and a measure.
    Kernel(Common),
    /// Compute a Leja sequence for a kernel file.
    Leja(Common),
    /// Compare equal-weight, summability and Monte Carlo estimates.
    Estimate(Common),
    /// Run an error-curve experiment over regenerated graphs.
    Experiment(Common),
    /// Check the error bounds along a Leja sequence.
    Verify(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// key=value settings file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Edge list (kernel) or kernel file (other commands).
    #[arg(long)]
    input: Option<String>,
    /// `uniform`, `inverse_density` or a measure file.
    #[arg(long)]
    measure: Option<String>,
    /// diag_strict, diag_graph, householder or sinkhorn.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Sequence length, or a comma-separated grid for estimate/experiment.
    #[arg(long)]
    n: Option<String>,
    /// min_diag, a vertex id, or random:<seed>.
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Sinkhorn tolerance (kernel), witness tolerance (estimate), or
    /// equilibrium tolerance (verify, experiment).
    #[arg(long)]
    tol: Option<String>,
    /// Output path, `-` for stdout.
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
    /// Function file (one value per line) or `constant:<c>`.
    #[arg(long)]
    function: Option<String>,
    /// Extra key=value setting; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Settings(#[from] SettingsError),
    #[error(transparent)]
    Lib(#[from] graphleja::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_numerical() => 2,
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn emit(out: &str, text: &str) -> Result<()> {
    if out == "-" {
        print!("{text}");
        Ok(())
    } else {
        fs::write(out, text).map_err(|source| CliError::Io {
            path: out.into(),
            source,
        })
    }
}

fn header(command: &str, s: &Settings) -> Vec<String> {
    let mut h = vec![format!("graphleja {VERSION}"), format!("command {command}")];
    h.extend(s.iter().map(|(k, v)| format!("{k}={v}")));
    h
}

fn comment_block(lines: &[String]) -> String {
    lines.iter().map(|l| format!("# {l}\n")).collect()
}

/// Defaults, then the config file, then flags.
fn layered(defaults: &[(&str, String)], c: &Common) -> Result<Settings> {
    let mut s = Settings::new(defaults);
    if let Some(path) = &c.config {
        s.apply_file(path)?;
    }
    let flags = [
        ("input", &c.input),
        ("measure", &c.measure),
        ("method", &c.method),
        ("alpha", &c.alpha),
        ("n", &c.n),
        ("start", &c.start),
        ("seed", &c.seed),
        ("tol", &c.tol),
        ("out", &c.out),
        ("format", &c.format),
        ("jobs", &c.jobs),
        ("function", &c.function),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            s.set(k, v)?;
        }
    }
    for kv in &c.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        s.set(k.trim(), v)?;
    }
    Ok(s)
}

fn format_of(s: &Settings) -> Result<bool> {
    match s.get("format")? {
        "csv" => Ok(false),
        "json" => Ok(true),
        f => Err(CliError::Usage(format!("unknown format {f:?}; use csv or json"))),
    }
}

fn load_kernel_file(path: &str) -> Result<EquilibriumKernel> {
    Ok(read_kernel(&read(path)?)?)
}

fn read_values(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse()
                .map_err(|_| CliError::Usage(format!("bad function value {l:?}")))
        })
        .collect()
}

fn load_function(spec: &str, n: usize) -> Result<Vec<f64>> {
    let f = match spec.strip_prefix("constant:") {
        Some(c) => vec![c.parse().map_err(|_| CliError::Usage(format!("bad constant {c:?}")))?; n],
        None => read_values(&read(spec)?)?,
    };
    if f.len() != n {
        return Err(CliError::Usage(format!(
            "function has {} values for {n} vertices",
            f.len()
        )));
    }
    Ok(f)
}

fn parse_grid(s: &Settings) -> Result<Vec<usize>> {
    let grid: Vec<usize> = s
        .get("n")?
        .split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad n value {x:?}")))
        })
        .collect::<Result<_>>()?;
    if grid.is_empty() || grid.contains(&0) {
        return Err(CliError::Usage("n must be positive".into()));
    }
    Ok(grid)
}

fn cmd_kernel(c: &Common) -> Result<()> {
    let s = layered(
        &[
            ("input", REQUIRED.into()),
            ("measure", "uniform".into()),
            ("method", Method::Sinkhorn.to_string()),
            ("alpha", DEFAULT_ALPHA.to_string()),
            ("tol", DEFAULT_SINKHORN_TOL.to_string()),
            ("max_iter", DEFAULT_SINKHORN_MAX_ITER.to_string()),
            ("verify_tol", "1e-8".into()),
            ("square", "false".into()),
            ("seed", "0".into()),
            ("out", "-".into()),
        ],
        c,
    )?;
    let graph = load_edge_list(&read(s.get("input")?)?)?;
    let b: SparseSymMatrix = if s.parse("square")? { graph.square() } else { graph.clone() };
    let v = match s.get("measure")? {
        "uniform" => Measure::uniform(b.n())?,
        "inverse_density" => inverse_density_measure(&graph)?,
        path => {
            let (m, raw) = load_measure(&read(path)?)?;
            if let Some(raw) = raw {
                log::warn!("measure file sums to {raw}; normalized");
            }
            m
        }
    };
    let method: Method = s.get("method")?.parse()?;
    let opts = KernelOptions {
        method,
        alpha: s.parse("alpha")?,
        sinkhorn_tol: s.parse("tol")?,
        sinkhorn_max_iter: s.parse("max_iter")?,
        seed: s.parse("seed")?,
    };
    let g = build_kernel(&b, &v, &opts)?;
    let verify_tol: f64 = s.parse("verify_tol")?;
    let report = verify_equilibrium(&g, &v, verify_tol * g.capacity.abs().max(1.0))?;
    eprintln!("gamma {:.16e}", g.capacity);
    eprintln!("max_dev {:.6e}", report.max_dev);
    let text = comment_block(&header("kernel", &s)) + &write_kernel(&g);
    emit(s.get("out")?, &text)?;
    if !report.passed {
        return Err(CliError::Numerical(format!(
            "equilibrium deviation {:e} exceeds tolerance {verify_tol:e}",
            report.max_dev
        )));
    }
    Ok(())
}

fn cmd_leja(c: &Common) -> Result<()> {
    let s = layered(
        &[
            ("input", REQUIRED.into()),
            ("n", "100".into()),
            ("start", "min_diag".into()),
            ("out", "-".into()),
        ],
        c,
    )?;
    let g = load_kernel_file(s.get("input")?)?;
    let start: StartPolicy = s.get("start")?.parse()?;
    let seq = leja_sequence(&g, s.parse("n")?, start)?;
    let mut h = header("leja", &s);
    h.push(format!("kernel {}", kernel_fingerprint(&g)));
    emit(s.get("out")?, &seq.to_text(&h))
}

fn cmd_estimate(c: &Common) -> Result<()> {
    let s = layered(
        &[
            ("input", REQUIRED.into()),
            ("function", REQUIRED.into()),
            ("n", "1,2,5,10,20,50,100".into()),
            ("start", "min_diag".into()),
            ("seed", "0".into()),
            ("tol", DEFAULT_WITNESS_TOL.to_string()),
            ("format", "csv".into()),
            ("out", "-".into()),
        ],
        c,
    )?;
    let json = format_of(&s)?;
    let g = load_kernel_file(s.get("input")?)?;
    let f = load_function(s.get("function")?, g.n())?;
    let grid = parse_grid(&s)?;
    let seed: u64 = s.parse("seed")?;
    let start: StartPolicy = s.get("start")?.parse()?;
    let n_max = *grid.iter().max().unwrap_or(&1);
    let seq = leja_sequence(&g, n_max, start)?;
    let truth = g.measure.integrate(&f)?;
    let witness = match witness_l1(&g, &f, s.parse("tol")?) {
        Ok(w) => Some(w.l1),
        Err(e) => {
            log::warn!("no bound: {e}");
            None
        }
    };
    let reports: Vec<EstimateReport> = grid
        .iter()
        .map(|&n| {
            Ok(EstimateReport {
                n,
                equal_weight: equal_weight_estimate(&f, seq.points(), n)?,
                summability: (n >= 2).then(|| summability_estimate(&f, seq.points(), n)).transpose()?,
                monte_carlo: Some(monte_carlo_estimate(&f, &g.measure, n, seed)?),
                true_value: truth,
                bound: witness.map(|l1| bound_quadest(&g, l1, n)),
            })
        })
        .collect::<std::result::Result<_, graphleja::Error>>()?;
    let mut h = header("estimate", &s);
    h.push(format!("kernel {}", kernel_fingerprint(&g)));
    h.push(format!(
        "witness_l1 {}",
        witness.map(|w| format!("{w:.16e}")).unwrap_or_else(|| "none".into())
    ));
    let text = if json {
        let doc = serde_json::json!({ "header": h, "reports": reports });
        serde_json::to_string_pretty(&doc).map_err(graphleja::Error::from)? + "\n"
    } else {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.16e}")).unwrap_or_default();
        let mut t = comment_block(&h);
        t.push_str("n,equal_weight,summability,monte_carlo,true_value,bound\n");
        for r in &reports {
            t.push_str(&format!(
                "{},{:.16e},{},{},{:.16e},{}\n",
                r.n,
                r.equal_weight,
                opt(r.summability),
                opt(r.monte_carlo),
                r.true_value,
                opt(r.bound)
            ));
        }
        t
    };
    emit(s.get("out")?, &text)
}

fn cmd_experiment(c: &Common) -> Result<()> {
    let mut defaults: Vec<(&str, String)> = ExperimentConfig::default().pairs();
    defaults.push(("format", "csv".into()));
    defaults.push(("out", "-".into()));
    defaults.push(("n", "none".into()));
    defaults.push(("tol", "none".into()));
    let s = layered(&defaults, c)?;
    let mut cfg = ExperimentConfig::default();
    for (k, v) in s.iter() {
        if ExperimentConfig::KEYS.contains(&k) {
            cfg.set(k, v)?;
        }
    }
    // --n and --tol are shorthands for n_grid and equilibrium_tol.
    if s.get("n")? != "none" {
        cfg.n_grid = match parse_grid(&s)?.as_slice() {
            [max] => log_grid(*max),
            grid => grid.to_vec(),
        };
    }
    if s.get("tol")? != "none" {
        cfg.equilibrium_tol = s.parse("tol")?;
    }
    let json = format_of(&s)?;
    let curve = run_error_experiment(&cfg)?;
    let pre = vec![
        format!("graphleja {VERSION}"),
        "command experiment".to_string(),
        format!("format={}", s.get("format")?),
        format!("out={}", s.get("out")?),
    ];
    let text = if json { curve_json(&curve, &pre)? } else { curve_csv(&curve, &pre) };
    emit(s.get("out")?, &text)
}

fn cmd_verify(c: &Common) -> Result<()> {
    let s = layered(
        &[
            ("input", REQUIRED.into()),
            ("n", "100".into()),
            ("start", "min_diag".into()),
            ("function", "none".into()),
            ("tol", "1e-8".into()),
            ("format", "csv".into()),
            ("out", "-".into()),
        ],
        c,
    )?;
    let json = format_of(&s)?;
    let g = load_kernel_file(s.get("input")?)?;
    let tol: f64 = s.parse("tol")?;
    let eq = verify_equilibrium(&g, &g.measure, tol * g.capacity.abs().max(1.0))?;
    let n: usize = s.parse("n")?;
    let seq = leja_sequence(&g, n, s.get("start")?.parse()?)?;
    let f = match s.get("function")? {
        "none" => None,
        spec => Some(load_function(spec, g.n())?),
    };
    let grid: Vec<usize> = (1..=n).collect();
    let ledger = verify_bounds(&g, &g.measure, seq.points(), f.as_deref(), &grid)?;
    let mut h = header("verify", &s);
    h.push(format!("kernel {}", kernel_fingerprint(&g)));
    h.push(format!("equilibrium_max_dev {:.6e} passed={}", eq.max_dev, eq.passed));
    let text = if json {
        ledger_json(&ledger, &h)?
    } else {
        ledger_csv(&ledger, &comment_block(&h))
    };
    emit(s.get("out")?, &text)?;
    let failures = ledger.failures().count();
    eprintln!("equilibrium max_dev {:.6e}; {failures} bound failures", eq.max_dev);
    if !eq.passed || failures > 0 {
        return Err(CliError::Numerical(format!(
            "verification failed: equilibrium passed={}, {failures} bound failures",
            eq.passed
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Kernel(c) => cmd_kernel(c),
        Command::Leja(c) => cmd_leja(c),
        Command::Estimate(c) => cmd_estimate(c),
        Command::Experiment(c) => cmd_experiment(c),
        Command::Verify(c) => cmd_verify(c),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
