use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::EquilibriumKernel;

/// How the first point `a₀` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPolicy {
    /// `argmin_x G(x, x)`, lowest id on ties.
    MinDiagonal,
    Vertex(usize),
    /// Uniformly random vertex from a seeded generator.
    Random(u64),
}

impl StartPolicy {
    pub fn resolve(&self, g: &EquilibriumKernel) -> Result<usize> {
        let n = g.n();
        match *self {
            StartPolicy::MinDiagonal => {
                let mut best = 0;
                let mut best_val = g.entry(0, 0);
                for x in 1..n {
                    let d = g.entry(x, x);
                    if d < best_val {
                        best = x;
                        best_val = d;
                    }
                }
                Ok(best)
            }
            StartPolicy::Vertex(x) if x < n => Ok(x),
            StartPolicy::Vertex(x) => Err(Error::invalid(format!(
                "start vertex {x} out of range for {n} vertices"
            ))),
            StartPolicy::Random(seed) => Ok(ChaCha8Rng::seed_from_u64(seed).random_range(0..n)),
        }
    }
}

impl fmt::Display for StartPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StartPolicy::MinDiagonal => f.write_str("min_diag"),
            StartPolicy::Vertex(x) => write!(f, "{x}"),
            StartPolicy::Random(s) => write!(f, "random:{s}"),
        }
    }
}

impl FromStr for StartPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "min_diag" {
            return Ok(StartPolicy::MinDiagonal);
        }
        if let Some(seed) = s.strip_prefix("random:") {
            return seed
                .parse()
                .map(StartPolicy::Random)
                .map_err(|_| Error::invalid(format!("bad random start seed {seed:?}")));
        }
        s.parse()
            .map(StartPolicy::Vertex)
            .map_err(|_| Error::invalid(format!("bad start policy {s:?}")))
    }
}

/// Greedy minimizers of the accumulated potential, with repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LejaSequence {
    points: Vec<usize>,
    /// `p(x) = Σ_{j<len} G(x, a_j)`.
    potential: Vec<f64>,
    /// Entry `k ≥ 1` is `Σ_{j<k} G(a_k, a_j)`, the minimum found at step `k`.
    step_minima: Vec<f64>,
    start: StartPolicy,
}

impl LejaSequence {
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn cumulative_potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn step_minima(&self) -> &[f64] {
        &self.step_minima
    }

    pub fn start(&self) -> StartPolicy {
        self.start
    }

    /// Appends `more` points, continuing the greedy recursion.
    pub fn extend(&mut self, g: &EquilibriumKernel, more: usize) -> Result<()> {
        if g.n() != self.potential.len() {
            return Err(Error::Dimension {
                expected: self.potential.len(),
                got: g.n(),
            });
        }
        let mut col = vec![0.0; g.n()];
        for _ in 0..more {
            let (next, min) = argmin(&self.potential);
            self.step_minima.push(min);
            self.push(g, next, &mut col);
        }
        Ok(())
    }

    fn push(&mut self, g: &EquilibriumKernel, x: usize, col: &mut [f64]) {
        g.column_into(x, col);
        for (p, c) in self.potential.iter_mut().zip(col.iter()) {
            *p += c;
        }
        self.points.push(x);
    }

    /// Text export: header comments, then one vertex id per line.
    pub fn to_text(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            out.push_str("# ");
            out.push_str(h);
            out.push('\n');
        }
        out.push_str(&format!("# start {}\n# n {}\n", self.start, self.len()));
        for p in &self.points {
            out.push_str(&p.to_string());
            out.push('\n');
        }
        out
    }
}

/// Lowest index attaining the minimum, using strict `<`.
fn argmin(p: &[f64]) -> (usize, f64) {
    let mut best = 0;
    let mut best_val = p[0];
    for (x, &v) in p.iter().enumerate().skip(1) {
        if v < best_val {
            best = x;
            best_val = v;
        }
    }
    (best, best_val)
}

/// First `n` points of the Leja sequence of `g` from the given start.
pub fn leja_sequence(g: &EquilibriumKernel, n: usize, start: StartPolicy) -> Result<LejaSequence> {
    if n == 0 {
        return Err(Error::invalid("sequence length must be at least 1"));
    }
    if g.n() == 0 {
        return Err(Error::Empty);
    }
    if !g.nonnegative {
        log::warn!("kernel has negative entries; quadrature guarantees assume G >= 0");
    }
    let a0 = start.resolve(g)?;
    let mut seq = LejaSequence {
        points: Vec::with_capacity(n),
        potential: vec![0.0; g.n()],
        step_minima: Vec::with_capacity(n),
        start,
    };
    let mut col = vec![0.0; g.n()];
    seq.step_minima.push(0.0);
    seq.push(g, a0, &mut col);
    seq.extend(g, n - 1)?;
    Ok(seq)
}

/// Parses a sequence file written by [`LejaSequence::to_text`]; only the ids
/// are read back.
pub fn read_sequence_points(text: &str) -> Result<Vec<usize>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(line, l)| {
            l.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad vertex id {l:?}"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Measure, SparseSymMatrix};
    use crate::kernel::{KernelBody, Method};

    pub(crate) fn worked_kernel() -> EquilibriumKernel {
        let s = SparseSymMatrix::from_dense(2, &[3.0, 1.0, 1.0, 3.0]).unwrap();
        EquilibriumKernel::assemble(
            Method::DiagStrict,
            KernelBody::Structured {
                sparse: s,
                rank_one: None,
            },
            0.0,
            2.0,
            Measure::uniform(2).unwrap(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn worked_replay() {
        let g = worked_kernel();
        let seq = leja_sequence(&g, 4, StartPolicy::Vertex(0)).unwrap();
        assert_eq!(seq.points(), &[0, 1, 0, 1]);
        assert_eq!(seq.cumulative_potential(), &[8.0, 8.0]);
        // minima at steps 1..3: p=(3,1) -> 1, p=(4,4) -> 4, p=(7,5) -> 5
        assert_eq!(&seq.step_minima()[1..], &[1.0, 4.0, 5.0]);
    }

    #[test]
    fn single_point() {
        let g = worked_kernel();
        let seq = leja_sequence(&g, 1, StartPolicy::Vertex(1)).unwrap();
        assert_eq!(seq.points(), &[1]);
        assert_eq!(seq.cumulative_potential(), g.column(1).as_slice());
    }

    #[test]
    fn extend_matches_direct() {
        let g = worked_kernel();
        let mut a = leja_sequence(&g, 2, StartPolicy::MinDiagonal).unwrap();
        a.extend(&g, 5).unwrap();
        let b = leja_sequence(&g, 7, StartPolicy::MinDiagonal).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_input() {
        let g = worked_kernel();
        assert!(leja_sequence(&g, 0, StartPolicy::MinDiagonal).is_err());
        assert!(leja_sequence(&g, 3, StartPolicy::Vertex(2)).is_err());
    }

    #[test]
    fn start_policy_parsing() {
        assert_eq!("min_diag".parse::<StartPolicy>().unwrap(), StartPolicy::MinDiagonal);
        assert_eq!("4".parse::<StartPolicy>().unwrap(), StartPolicy::Vertex(4));
        assert_eq!("random:9".parse::<StartPolicy>().unwrap(), StartPolicy::Random(9));
        assert!("random:x".parse::<StartPolicy>().is_err());
        for p in [StartPolicy::MinDiagonal, StartPolicy::Vertex(3), StartPolicy::Random(11)] {
            assert_eq!(p.to_string().parse::<StartPolicy>().unwrap(), p);
        }
    }

    #[test]
    fn text_round_trip() {
        let g = worked_kernel();
        let seq = leja_sequence(&g, 4, StartPolicy::Vertex(0)).unwrap();
        let text = seq.to_text(&["kernel abc".to_string()]);
        assert!(text.starts_with("# kernel abc\n# start 0\n# n 4\n"));
        assert_eq!(read_sequence_points(&text).unwrap(), vec![0, 1, 0, 1]);
    }
}
