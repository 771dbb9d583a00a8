//! Trajectory CSV with columns `s,x,z,theta,kappa1,kappa2`.
//!
//! Numbers use the shortest decimal that round-trips to the same `f64`
//! (Rust's `{:?}` formatting), so
//! reading a file and writing it back reproduces it byte for byte.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;

pub const HEADER: &str = "s,x,z,theta,kappa1,kappa2";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub theta: f64,
    pub kappa1: f64,
    pub kappa2: f64,
}

pub fn rows(traj: &Trajectory) -> Vec<CsvRow> {
    let (a, b) = (traj.params.a(), traj.params.b());
    traj.samples
        .iter()
        .map(|st| {
            let kappa2 = st.theta.sin() / st.x;
            CsvRow { s: st.s, x: st.x, z: st.z, theta: st.theta, kappa1: a * kappa2 + b, kappa2 }
        })
        .collect()
}

pub fn write_rows<W: Write>(out: &mut W, rows: &[CsvRow]) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    for r in rows {
        writeln!(out, "{:?},{:?},{:?},{:?},{:?},{:?}", r.s, r.x, r.z, r.theta, r.kappa1, r.kappa2)?;
    }
    Ok(())
}

pub fn write_trajectory<W: Write>(out: &mut W, traj: &Trajectory) -> Result<()> {
    write_rows(out, &rows(traj))
}

pub fn read_rows<R: BufRead>(input: R) -> Result<Vec<CsvRow>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(|h| h.trim_end_matches('\r')) != Some(HEADER) {
        return Err(Error::InvalidSpec(format!("expected CSV header `{HEADER}`")));
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidSpec(format!("line {}: {e}", n + 2)))?;
        let [s, x, z, theta, kappa1, kappa2] = vals[..] else {
            return Err(Error::InvalidSpec(format!("line {}: expected 6 columns, got {}", n + 2, vals.len())));
        };
        out.push(CsvRow { s, x, z, theta, kappa1, kappa2 });
    }
    Ok(out)
}
