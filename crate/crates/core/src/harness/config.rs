use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kernel::{Method, DEFAULT_ALPHA, DEFAULT_SINKHORN_MAX_ITER, DEFAULT_SINKHORN_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphFamily {
    WattsStrogatz,
    TwoClusterKnn,
    /// kNN graph on uniform points in the unit square.
    UniformKnn,
    EdgeList,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Gaussian,
    LogPotential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurePolicy {
    InverseDensity,
    Uniform,
    File,
}

/// Vertex function to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    Coordinate(usize),
    Fiedler,
    /// Indicator of a class in the label file.
    Indicator(i64),
    Constant(f64),
}

macro_rules! string_enum {
    ($ty:ident { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(&self) -> &'static str {
                match self {
                    $($ty::$variant => $name),+
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    _ => Err(Error::invalid(format!(
                        concat!("unknown ", stringify!($ty), " {:?}"),
                        s
                    ))),
                }
            }
        }
    };
}

string_enum!(GraphFamily {
    WattsStrogatz => "watts_strogatz",
    TwoClusterKnn => "two_cluster_knn",
    UniformKnn => "uniform_knn",
    EdgeList => "edge_list",
});

string_enum!(WeightKind {
    Gaussian => "gaussian",
    LogPotential => "log_potential",
});

string_enum!(MeasurePolicy {
    InverseDensity => "inverse_density",
    Uniform => "uniform",
    File => "file",
});

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Coordinate(a) => write!(f, "coordinate:{a}"),
            TestFunction::Fiedler => f.write_str("fiedler"),
            TestFunction::Indicator(c) => write!(f, "indicator:{c}"),
            TestFunction::Constant(c) => write!(f, "constant:{c}"),
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("bad test function {s:?}"));
        match s.split_once(':') {
            None if s == "fiedler" => Ok(TestFunction::Fiedler),
            Some(("coordinate", a)) => a.parse().map(TestFunction::Coordinate).map_err(|_| bad()),
            Some(("indicator", c)) => c.parse().map(TestFunction::Indicator).map_err(|_| bad()),
            Some(("constant", c)) => c.parse().map(TestFunction::Constant).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

/// Everything that determines an error-curve run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: GraphFamily,
    pub vertices: usize,
    pub knn_k: usize,
    pub weight: WeightKind,
    pub sigma: f64,
    pub eps: f64,
    /// Put the distance-zero weight (unit weight for unweighted graphs) on
    /// the diagonal.
    pub self_loops: bool,
    /// Build the kernel from `A²` rather than `A`; `A²` is positive
    /// semidefinite for any symmetric `A`.
    pub square: bool,
    pub heavy_fraction: f64,
    pub centers: [[f64; 2]; 2],
    pub spread: f64,
    pub ws_degree: usize,
    pub ws_beta: f64,
    pub input: Option<PathBuf>,
    pub method: Method,
    pub alpha: f64,
    pub sinkhorn_tol: f64,
    pub sinkhorn_max_iter: usize,
    pub equilibrium_tol: f64,
    pub measure: MeasurePolicy,
    pub measure_file: Option<PathBuf>,
    pub function: TestFunction,
    pub labels_file: Option<PathBuf>,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Draw a fresh random start per trial; always on for fixed graphs.
    pub random_start: bool,
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            family: GraphFamily::TwoClusterKnn,
            vertices: 500,
            knn_k: 50,
            weight: WeightKind::Gaussian,
            sigma: 0.1,
            eps: 1e-5,
            self_loops: true,
            square: true,
            heavy_fraction: 0.9,
            centers: [[0.0, 0.0], [1.0, 0.0]],
            spread: 0.1,
            ws_degree: 10,
            ws_beta: 0.1,
            input: None,
            method: Method::Sinkhorn,
            alpha: DEFAULT_ALPHA,
            sinkhorn_tol: DEFAULT_SINKHORN_TOL,
            sinkhorn_max_iter: DEFAULT_SINKHORN_MAX_ITER,
            equilibrium_tol: 1e-8,
            measure: MeasurePolicy::InverseDensity,
            measure_file: None,
            function: TestFunction::Coordinate(0),
            labels_file: None,
            n_grid: log_grid(500),
            trials: 50,
            seed: 0,
            random_start: false,
            jobs: 1,
        }
    }
}

/// `1, 2, 5, 10, 20, 50, …` up to and including `max`.
pub fn log_grid(max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut decade = 1;
    'outer: loop {
        for m in [1, 2, 5] {
            let v = m * decade;
            if v > max {
                break 'outer;
            }
            out.push(v);
        }
        decade *= 10;
    }
    if out.last() != Some(&max) && max > 0 {
        out.push(max);
    }
    out
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("bad value {value:?} for {key}")))
}

fn parse_point(key: &str, value: &str) -> Result<[f64; 2]> {
    let (a, b) = value
        .split_once(',')
        .ok_or_else(|| Error::invalid(format!("{key} expects `x,y`, got {value:?}")))?;
    Ok([parse_value(key, a.trim())?, parse_value(key, b.trim())?])
}

fn opt_path(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "none".into())
}

impl ExperimentConfig {
    pub const KEYS: &'static [&'static str] = &[
        "family",
        "vertices",
        "knn_k",
        "weight",
        "sigma",
        "eps",
        "self_loops",
        "square",
        "heavy_fraction",
        "center0",
        "center1",
        "spread",
        "ws_degree",
        "ws_beta",
        "input",
        "method",
        "alpha",
        "sinkhorn_tol",
        "sinkhorn_max_iter",
        "equilibrium_tol",
        "measure",
        "measure_file",
        "function",
        "labels_file",
        "n_grid",
        "trials",
        "seed",
        "random_start",
        "jobs",
    ];

    /// Sets one field from its `key=value` text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let path = |v: &str| if v == "none" { None } else { Some(PathBuf::from(v)) };
        match key {
            "family" => self.family = value.parse()?,
            "vertices" => self.vertices = parse_value(key, value)?,
            "knn_k" => self.knn_k = parse_value(key, value)?,
            "weight" => self.weight = value.parse()?,
            "sigma" => self.sigma = parse_value(key, value)?,
            "eps" => self.eps = parse_value(key, value)?,
            "self_loops" => self.self_loops = parse_value(key, value)?,
            "square" => self.square = parse_value(key, value)?,
            "heavy_fraction" => self.heavy_fraction = parse_value(key, value)?,
            "center0" => self.centers[0] = parse_point(key, value)?,
            "center1" => self.centers[1] = parse_point(key, value)?,
            "spread" => self.spread = parse_value(key, value)?,
            "ws_degree" => self.ws_degree = parse_value(key, value)?,
            "ws_beta" => self.ws_beta = parse_value(key, value)?,
            "input" => self.input = path(value),
            "method" => self.method = value.parse()?,
            "alpha" => self.alpha = parse_value(key, value)?,
            "sinkhorn_tol" => self.sinkhorn_tol = parse_value(key, value)?,
            "sinkhorn_max_iter" => self.sinkhorn_max_iter = parse_value(key, value)?,
            "equilibrium_tol" => self.equilibrium_tol = parse_value(key, value)?,
            "measure" => self.measure = value.parse()?,
            "measure_file" => self.measure_file = path(value),
            "function" => self.function = value.parse()?,
            "labels_file" => self.labels_file = path(value),
            "n_grid" => {
                self.n_grid = value
                    .split(',')
                    .map(|s| parse_value(key, s.trim()))
                    .collect::<Result<_>>()?
            }
            "trials" => self.trials = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "random_start" => self.random_start = parse_value(key, value)?,
            "jobs" => self.jobs = parse_value(key, value)?,
            _ => return Err(Error::invalid(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Effective value of every key, in [`KEYS`](Self::KEYS) order.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let pt = |p: [f64; 2]| format!("{},{}", p[0], p[1]);
        let grid = self.n_grid.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",");
        let values = [
            self.family.to_string(),
            self.vertices.to_string(),
            self.knn_k.to_string(),
            self.weight.to_string(),
            self.sigma.to_string(),
            self.eps.to_string(),
            self.self_loops.to_string(),
            self.square.to_string(),
            self.heavy_fraction.to_string(),
            pt(self.centers[0]),
            pt(self.centers[1]),
            self.spread.to_string(),
            self.ws_degree.to_string(),
            self.ws_beta.to_string(),
            opt_path(&self.input),
            self.method.to_string(),
            self.alpha.to_string(),
            self.sinkhorn_tol.to_string(),
            self.sinkhorn_max_iter.to_string(),
            self.equilibrium_tol.to_string(),
            self.measure.to_string(),
            opt_path(&self.measure_file),
            self.function.to_string(),
            opt_path(&self.labels_file),
            grid,
            self.trials.to_string(),
            self.seed.to_string(),
            self.random_start.to_string(),
            self.jobs.to_string(),
        ];
        Self::KEYS.iter().copied().zip(values).collect()
    }

    /// Parses `key=value` lines (blank lines and `#` comments skipped) on top
    /// of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key=value, got {line:?}"),
            })?;
            self.set(k.trim(), v).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// SHA-256 of the `key=value` listing, excluding `jobs`, which does not
    /// affect results.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.pairs() {
            if k != "jobs" {
                h.update(format!("{k}={v}\n").as_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be positive"));
        }
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return Err(Error::invalid("n_grid must be non-empty with positive entries"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("n_grid must be strictly increasing"));
        }
        if self.jobs == 0 {
            return Err(Error::invalid("jobs must be positive"));
        }
        if self.family == GraphFamily::EdgeList && self.input.is_none() {
            return Err(Error::invalid("edge_list family needs an input file"));
        }
        if self.measure == MeasurePolicy::File && self.measure_file.is_none() {
            return Err(Error::invalid("measure=file needs measure_file"));
        }
        if matches!(self.function, TestFunction::Indicator(_)) && self.labels_file.is_none() {
            return Err(Error::invalid("indicator function needs labels_file"));
        }
        if matches!(self.function, TestFunction::Coordinate(_))
            && matches!(self.family, GraphFamily::WattsStrogatz | GraphFamily::EdgeList)
        {
            return Err(Error::invalid(format!(
                "coordinate function needs a point cloud; family {} has none",
                self.family
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid() {
        assert_eq!(log_grid(500), vec![1, 2, 5, 10, 20, 50, 100, 200, 500]);
        assert_eq!(log_grid(300), vec![1, 2, 5, 10, 20, 50, 100, 200, 300]);
        assert_eq!(log_grid(1), vec![1]);
    }

    #[test]
    fn pairs_round_trip() {
        let mut c = ExperimentConfig::default();
        c.function = TestFunction::Indicator(2);
        c.labels_file = Some("labels.txt".into());
        c.centers[1] = [2.5, -1.0];
        let text: String = c.pairs().iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        let mut back = ExperimentConfig::default();
        back.apply_text(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.fingerprint(), c.fingerprint());
    }

    #[test]
    fn fingerprint_ignores_jobs() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.jobs = 8;
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.seed = 1;
        assert_ne!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn rejects_bad_lines() {
        let mut c = ExperimentConfig::default();
        assert!(c.apply_text("trials 3").is_err());
        assert!(c.apply_text("bogus=1").is_err());
        assert!(c.apply_text("method=newton").is_err());
        assert!(c.apply_text("# comment\n\ntrials = 3\n").is_ok());
        assert_eq!(c.trials, 3);
    }

    #[test]
    fn function_parsing() {
        for f in [
            TestFunction::Coordinate(1),
            TestFunction::Fiedler,
            TestFunction::Indicator(-3),
            TestFunction::Constant(0.25),
        ] {
            assert_eq!(f.to_string().parse::<TestFunction>().unwrap(), f);
        }
        assert!("coordinate".parse::<TestFunction>().is_err());
    }
}
