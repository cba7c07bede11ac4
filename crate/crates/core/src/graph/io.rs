//! Text formats: edge lists, point-cloud CSV and measure files.

use std::collections::BTreeMap;

use super::generate::PointCloud;
use super::measure::Measure;
use super::sparse::SparseSymMatrix;
use crate::error::{Error, Result};

/// Sums further than this from 1 are reported when a measure file is loaded.
pub const MEASURE_SUM_WARN: f64 = 1e-6;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses whitespace-separated `u v [w]` lines with 0-based ids; `w`
/// defaults to 1. The vertex count is one past the largest id.
pub fn load_edge_list(text: &str) -> Result<SparseSymMatrix> {
    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut n = 0;
    for (line, l) in content_lines(text) {
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(parse_err(line, format!("expected `u v [w]`, got {l:?}")));
        }
        let id = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(line, format!("bad vertex id {s:?}")))
        };
        let (u, v) = (id(fields[0])?, id(fields[1])?);
        let w = match fields.get(2) {
            Some(s) => s
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("bad weight {s:?}")))?,
            None => 1.0,
        };
        if !w.is_finite() {
            return Err(parse_err(line, "non-finite weight"));
        }
        if w < 0.0 {
            return Err(parse_err(line, format!("negative weight {w}")));
        }
        let key = (u.min(v), u.max(v));
        if let Some(&prev) = edges.get(&key) {
            if prev != w {
                return Err(Error::ConflictingEdge {
                    u: key.0,
                    v: key.1,
                    first: prev,
                    second: w,
                });
            }
        }
        edges.insert(key, w);
        n = n.max(u + 1).max(v + 1);
    }
    if n == 0 {
        return Err(Error::Empty);
    }
    SparseSymMatrix::from_entries(n, edges.into_iter().map(|((u, v), w)| (u, v, w)))
}

/// One point per line, comma-separated coordinates.
pub fn load_point_cloud(text: &str) -> Result<PointCloud> {
    let mut points = Vec::new();
    for (line, l) in content_lines(text) {
        let p = l
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(line, format!("bad coordinate {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        points.push(p);
    }
    PointCloud::new(points)
}

/// One positive weight per line, normalized to unit mass. The second value is
/// the raw sum when it deviated from 1 by more than [`MEASURE_SUM_WARN`].
pub fn load_measure(text: &str) -> Result<(Measure, Option<f64>)> {
    let mut values = Vec::new();
    for (line, l) in content_lines(text) {
        let x = l
            .parse::<f64>()
            .map_err(|_| parse_err(line, format!("bad measure value {l:?}")))?;
        values.push(x);
    }
    let sum: f64 = values.iter().sum();
    let measure = Measure::normalized(values)?;
    let off = ((sum - 1.0).abs() > MEASURE_SUM_WARN).then_some(sum);
    if let Some(s) = off {
        log::warn!("measure sums to {s}; normalized on load");
    }
    Ok((measure, off))
}

pub fn write_point_cloud(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|c| format!("{c:.17e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
