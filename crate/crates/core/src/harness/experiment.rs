use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, GraphFamily, MeasurePolicy, WeightKind};
use super::testfn::smooth_test_function;
use crate::error::{Error, Result};
use crate::graph::{
    inverse_density_measure, knn_graph, load_edge_list, load_measure, two_cluster_cloud,
    uniform_square_cloud, watts_strogatz, EdgeWeight, Measure, PointCloud, SparseSymMatrix,
};
use crate::kernel::{build_kernel, verify_equilibrium, EquilibriumKernel, KernelOptions};
use crate::leja::{
    equal_weight_estimate, leja_sequence, monte_carlo_prefix_means, summability_estimate,
    StartPolicy,
};

pub const ESTIMATORS: [&str; 3] = ["leja", "leja_summability", "monte_carlo"];

/// Seeds for the random parts of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSeeds {
    pub graph: u64,
    pub start: u64,
    pub monte_carlo: u64,
}

impl TrialSeeds {
    /// Independent per-trial stream of the base seed.
    pub fn derive(seed: u64, trial: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        Self {
            graph: rng.random(),
            start: rng.random(),
            monte_carlo: rng.random(),
        }
    }
}

/// Graph, optional coordinates and target measure for one trial.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: SparseSymMatrix,
    /// Matrix the kernel is built from: `graph` or its square.
    pub base: SparseSymMatrix,
    pub cloud: Option<PointCloud>,
    pub measure: Measure,
}

/// Inputs read from files once per experiment.
#[derive(Debug, Clone, Default)]
pub struct Fixed {
    pub graph: Option<SparseSymMatrix>,
    pub measure: Option<Measure>,
    pub labels: Option<Vec<i64>>,
}

fn read_text(path: &std::path::Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

/// Parses one integer label per line.
pub fn load_labels(text: &str) -> Result<Vec<i64>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(line, l)| {
            l.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad label {l:?}"),
            })
        })
        .collect()
}

impl Fixed {
    pub fn load(cfg: &ExperimentConfig) -> Result<Self> {
        let mut out = Fixed::default();
        if cfg.family == GraphFamily::EdgeList {
            let path = cfg.input.as_ref().ok_or_else(|| Error::invalid("missing input"))?;
            out.graph = Some(load_edge_list(&read_text(path)?)?);
        }
        if cfg.measure == MeasurePolicy::File {
            let path = cfg.measure_file.as_ref().ok_or_else(|| Error::invalid("missing measure_file"))?;
            out.measure = Some(load_measure(&read_text(path)?)?.0);
        }
        if let Some(path) = &cfg.labels_file {
            out.labels = Some(load_labels(&read_text(path)?)?);
        }
        Ok(out)
    }
}

fn edge_weight(cfg: &ExperimentConfig) -> EdgeWeight {
    match cfg.weight {
        WeightKind::Gaussian => EdgeWeight::Gaussian { sigma: cfg.sigma },
        WeightKind::LogPotential => EdgeWeight::LogPotential { eps: cfg.eps },
    }
}

/// Builds the graph and measure for one trial.
pub fn build_instance(cfg: &ExperimentConfig, fixed: &Fixed, graph_seed: u64) -> Result<Instance> {
    let (graph, cloud) = match cfg.family {
        GraphFamily::TwoClusterKnn => {
            let cloud = two_cluster_cloud(cfg.vertices, cfg.heavy_fraction, cfg.centers, cfg.spread, graph_seed)?;
            (knn_graph(&cloud, cfg.knn_k, edge_weight(cfg), cfg.self_loops)?, Some(cloud))
        }
        GraphFamily::UniformKnn => {
            let cloud = uniform_square_cloud(cfg.vertices, graph_seed)?;
            (knn_graph(&cloud, cfg.knn_k, edge_weight(cfg), cfg.self_loops)?, Some(cloud))
        }
        GraphFamily::WattsStrogatz => {
            let g = watts_strogatz(cfg.vertices, cfg.ws_degree, cfg.ws_beta, graph_seed)?;
            let g = if cfg.self_loops { g.add_diagonal(&vec![1.0; g.n()])? } else { g };
            (g, None)
        }
        GraphFamily::EdgeList => {
            let g = fixed.graph.clone().ok_or_else(|| Error::invalid("edge list not loaded"))?;
            let g = if cfg.self_loops { g.add_diagonal(&vec![1.0; g.n()])? } else { g };
            (g, None)
        }
    };
    let measure = match cfg.measure {
        MeasurePolicy::InverseDensity => inverse_density_measure(&graph)?,
        MeasurePolicy::Uniform => Measure::uniform(graph.n())?,
        MeasurePolicy::File => {
            let m = fixed.measure.clone().ok_or_else(|| Error::invalid("measure not loaded"))?;
            if m.len() != graph.n() {
                return Err(Error::Dimension {
                    expected: graph.n(),
                    got: m.len(),
                });
            }
            m
        }
    };
    let base = if cfg.square { graph.square() } else { graph.clone() };
    Ok(Instance {
        graph,
        base,
        cloud,
        measure,
    })
}

pub fn kernel_options(cfg: &ExperimentConfig, seed: u64) -> KernelOptions {
    KernelOptions {
        method: cfg.method,
        alpha: cfg.alpha,
        sinkhorn_tol: cfg.sinkhorn_tol,
        sinkhorn_max_iter: cfg.sinkhorn_max_iter,
        seed,
    }
}

/// Builds a kernel and checks `max_x |G(x,ν*) − Γ| ≤ tol·max(1, |Γ|)`.
pub fn verified_kernel(b: &SparseSymMatrix, v: &Measure, opts: &KernelOptions, tol: f64) -> Result<(EquilibriumKernel, bool, f64)> {
    let g = build_kernel(b, v, opts)?;
    let report = verify_equilibrium(&g, v, tol * g.capacity.abs().max(1.0))?;
    Ok((g, report.passed, report.max_dev))
}

/// Absolute errors of each estimator at each grid point; `None` where the
/// estimator is undefined.
type TrialErrors = Vec<[Option<f64>; 3]>;

enum TrialOutcome {
    Done(TrialErrors),
    Excluded(String),
}

fn run_trial(cfg: &ExperimentConfig, fixed: &Fixed, trial: usize) -> Result<TrialOutcome> {
    let seeds = TrialSeeds::derive(cfg.seed, trial);
    let inst = build_instance(cfg, fixed, seeds.graph)?;
    let opts = kernel_options(cfg, seeds.graph);
    let (g, passed, max_dev) = verified_kernel(&inst.base, &inst.measure, &opts, cfg.equilibrium_tol)?;
    if !passed {
        return Ok(TrialOutcome::Excluded(format!(
            "equilibrium deviation {max_dev:e} above tolerance"
        )));
    }
    let f = smooth_test_function(&inst.graph, inst.cloud.as_ref(), fixed.labels.as_deref(), cfg.function)?;
    let truth = inst.measure.integrate(&f)?;
    let start = if cfg.random_start || cfg.family == GraphFamily::EdgeList {
        StartPolicy::Random(seeds.start)
    } else {
        StartPolicy::MinDiagonal
    };
    let n_max = *cfg.n_grid.last().unwrap_or(&1);
    let seq = leja_sequence(&g, n_max, start)?;
    let mc = monte_carlo_prefix_means(&f, &inst.measure, &cfg.n_grid, seeds.monte_carlo)?;
    let mut errors = Vec::with_capacity(cfg.n_grid.len());
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        let ew = equal_weight_estimate(&f, seq.points(), n)?;
        let sm = if n >= 2 {
            Some((summability_estimate(&f, seq.points(), n)? - truth).abs())
        } else {
            None
        };
        errors.push([Some((ew - truth).abs()), sm, Some((mc[i] - truth).abs())]);
    }
    Ok(TrialOutcome::Done(errors))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: usize,
    pub estimator: String,
    pub mean_abs_error: f64,
    /// Unbiased (divisor `trials − 1`); zero for a single trial.
    pub std: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedTrial {
    pub trial: usize,
    pub reason: String,
}

/// Mean absolute error per estimator and sample count, over trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub fingerprint: String,
    pub config: ExperimentConfig,
    pub n_grid: Vec<usize>,
    pub trials_used: usize,
    pub excluded: Vec<ExcludedTrial>,
    pub rows: Vec<CurveRow>,
}

impl ErrorCurve {
    pub fn row(&self, n: usize, estimator: &str) -> Option<&CurveRow> {
        self.rows.iter().find(|r| r.n == n && r.estimator == estimator)
    }
}

/// Mean and unbiased standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Runs `cfg.trials` independent trials and aggregates them in trial order.
pub fn run_error_experiment(cfg: &ExperimentConfig) -> Result<ErrorCurve> {
    cfg.validate()?;
    let fixed = Fixed::load(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::invalid(e.to_string()))?;
    let outcomes: Vec<Result<TrialOutcome>> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                run_trial(cfg, &fixed, t).map_err(|e| Error::Trial {
                    trial: t,
                    source: Box::new(e),
                })
            })
            .collect()
    });

    let mut per_trial = Vec::new();
    let mut excluded = Vec::new();
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        match outcome? {
            TrialOutcome::Done(e) => per_trial.push(e),
            TrialOutcome::Excluded(reason) => {
                log::warn!("trial {trial} excluded: {reason}");
                excluded.push(ExcludedTrial { trial, reason });
            }
        }
    }
    if per_trial.is_empty() {
        return Err(Error::Degenerate(format!(
            "all {} trials failed equilibrium verification",
            cfg.trials
        )));
    }

    let mut rows = Vec::new();
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        for (k, name) in ESTIMATORS.iter().enumerate() {
            let xs: Vec<f64> = per_trial.iter().filter_map(|t| t[i][k]).collect();
            if xs.is_empty() {
                continue;
            }
            let (mean, std) = mean_std(&xs);
            rows.push(CurveRow {
                n,
                estimator: name.to_string(),
                mean_abs_error: mean,
                std,
                trials: xs.len(),
            });
        }
    }
    Ok(ErrorCurve {
        fingerprint: cfg.fingerprint(),
        config: cfg.clone(),
        n_grid: cfg.n_grid.clone(),
        trials_used: per_trial.len(),
        excluded,
        rows,
    })
}
