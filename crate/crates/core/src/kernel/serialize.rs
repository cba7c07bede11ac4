//! Line-oriented text container for kernels.
//!
//! ```text
//! format graphleja-kernel-v1
//! method sinkhorn
//! body structured
//! n 3
//! alpha 5.0000000000000003e-2
//! capacity 1.0000000000000000e0
//! measure 3
//! <one value per line>
//! scaling 3            (or `scaling none`)
//! <one value per line>
//! entries <count>
//! <i j w, upper triangle>
//! end
//! ```
//!
//! Reals are written with 17 significant digits, so reading a file back gives
//! bit-identical values. The rank-one vector is recomputed as `d ⊘ v`.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::equilibrium::{EquilibriumKernel, KernelBody, Method, RankOne};
use crate::error::{Error, Result};
use crate::graph::{Measure, SparseSymMatrix};

pub const FORMAT_TAG: &str = "graphleja-kernel-v1";

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_kernel(k: &EquilibriumKernel) -> String {
    let n = k.n();
    let mut out = String::new();
    let _ = writeln!(out, "format {FORMAT_TAG}");
    let _ = writeln!(out, "method {}", k.method);
    let body = match k.body {
        KernelBody::Dense { .. } => "dense",
        KernelBody::Structured { .. } => "structured",
    };
    let _ = writeln!(out, "body {body}");
    let _ = writeln!(out, "n {n}");
    let _ = writeln!(out, "alpha {}", real(k.alpha));
    let _ = writeln!(out, "capacity {}", real(k.capacity));
    let _ = writeln!(out, "measure {n}");
    for v in k.measure.values() {
        let _ = writeln!(out, "{}", real(*v));
    }
    match &k.scaling {
        Some(d) => {
            let _ = writeln!(out, "scaling {}", d.len());
            for x in d {
                let _ = writeln!(out, "{}", real(*x));
            }
        }
        None => {
            let _ = writeln!(out, "scaling none");
        }
    }
    let entries: Vec<(usize, usize, f64)> = match &k.body {
        KernelBody::Dense { n, data } => (0..*n)
            .flat_map(|i| (i..*n).map(move |j| (i, j, data[i * n + j])))
            .filter(|e| e.2 != 0.0)
            .collect(),
        KernelBody::Structured { sparse, .. } => sparse.upper_entries().collect(),
    };
    let _ = writeln!(out, "entries {}", entries.len());
    for (i, j, w) in entries {
        let _ = writeln!(out, "{i} {j} {}", real(w));
    }
    out.push_str("end\n");
    out
}

struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Reader<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        for (i, l) in self.lines.by_ref() {
            let l = l.trim();
            if !l.is_empty() && !l.starts_with('#') {
                return Ok((i + 1, l));
            }
        }
        Err(Error::Parse {
            line: 0,
            msg: "unexpected end of kernel file".to_string(),
        })
    }

    fn keyed(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (line, l) = self.next()?;
        match l.split_once(' ') {
            Some((k, rest)) if k == key => Ok((line, rest.trim())),
            _ => Err(Error::Parse {
                line,
                msg: format!("expected `{key} ...`, got {l:?}"),
            }),
        }
    }

    fn values(&mut self, count: usize) -> Result<Vec<f64>> {
        (0..count)
            .map(|_| {
                let (line, l) = self.next()?;
                parse(line, l)
            })
            .collect()
    }
}

fn parse<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {s:?}"),
    })
}

pub fn read_kernel(text: &str) -> Result<EquilibriumKernel> {
    let mut r = Reader {
        lines: text.lines().enumerate(),
    };
    let (line, tag) = r.keyed("format")?;
    if tag != FORMAT_TAG {
        return Err(Error::Parse {
            line,
            msg: format!("unknown format {tag:?}"),
        });
    }
    let (_, method) = r.keyed("method")?;
    let method: Method = method.parse()?;
    let (line, body) = r.keyed("body")?;
    let dense = match body {
        "dense" => true,
        "structured" => false,
        _ => {
            return Err(Error::Parse {
                line,
                msg: format!("unknown body {body:?}"),
            })
        }
    };
    let (line, n) = r.keyed("n")?;
    let n: usize = parse(line, n)?;
    let (line, alpha) = r.keyed("alpha")?;
    let alpha: f64 = parse(line, alpha)?;
    let (line, capacity) = r.keyed("capacity")?;
    let capacity: f64 = parse(line, capacity)?;
    let (line, count) = r.keyed("measure")?;
    let count: usize = parse(line, count)?;
    if count != n {
        return Err(Error::Dimension { expected: n, got: count });
    }
    let measure = Measure::new(r.values(n)?)?;
    let (line, sc) = r.keyed("scaling")?;
    let scaling = if sc == "none" {
        None
    } else {
        let count: usize = parse(line, sc)?;
        if count != n {
            return Err(Error::Dimension { expected: n, got: count });
        }
        Some(r.values(n)?)
    };
    let (line, count) = r.keyed("entries")?;
    let count: usize = parse(line, count)?;
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let (line, l) = r.next()?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected `i j w`, got {l:?}"),
            });
        }
        entries.push((parse(line, f[0])?, parse(line, f[1])?, parse(line, f[2])?));
    }
    let (line, end) = r.next()?;
    if end != "end" {
        return Err(Error::Parse {
            line,
            msg: format!("expected `end`, got {end:?}"),
        });
    }

    let body = if dense {
        let mut data = vec![0.0; n * n];
        for (i, j, w) in entries {
            if i >= n || j >= n {
                return Err(Error::invalid(format!("entry ({i}, {j}) out of range")));
            }
            data[i * n + j] = w;
            data[j * n + i] = w;
        }
        KernelBody::Dense { n, data }
    } else {
        let sparse = SparseSymMatrix::from_entries(n, entries)?;
        let rank_one = match (&scaling, alpha > 0.0) {
            (Some(d), true) => {
                let c = d.iter().zip(measure.values()).map(|(di, vi)| di / vi).collect();
                Some(RankOne::new(alpha / n as f64, c))
            }
            _ => None,
        };
        KernelBody::Structured { sparse, rank_one }
    };
    EquilibriumKernel::assemble(method, body, alpha, capacity, measure, scaling)
}

/// Hex SHA-256 of the serialized kernel.
pub fn kernel_fingerprint(k: &EquilibriumKernel) -> String {
    let digest = Sha256::digest(write_kernel(k).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{diag_modified_kernel, householder_kernel, sinkhorn_kernel, DiagMode};

    fn graph() -> SparseSymMatrix {
        SparseSymMatrix::from_entries(4, [(0, 1, 1.0), (1, 2, 0.3), (2, 3, 2.0), (0, 3, 0.7)]).unwrap()
    }

    fn measure() -> Measure {
        Measure::normalized(vec![0.1, 0.2, 0.3, 0.4]).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let b = graph();
        let v = measure();
        let kernels = [
            diag_modified_kernel(&b, &v, DiagMode::GraphPreserving).unwrap(),
            householder_kernel(&b.laplacian(), &v, 1).unwrap(),
            sinkhorn_kernel(&b, &v, 0.05, 1e-12, 10_000).unwrap().0,
        ];
        for k in kernels {
            let text = write_kernel(&k);
            let back = read_kernel(&text).unwrap();
            assert_eq!(back, k);
            assert_eq!(write_kernel(&back), text);
        }
    }

    #[test]
    fn rejects_unknown_format() {
        assert!(read_kernel("format other\n").is_err());
        assert!(read_kernel("").is_err());
    }
}
