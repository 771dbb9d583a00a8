//! Parameter sweeps over `(a, b, x0, theta0)` grids.
//!
//! Cells are classified in parallel and each writes only its own report file;
//! the summary is assembled afterwards in grid order, so the output does not
//! depend on the number of workers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::classifier::{classify_surface, ClassificationReport};
use crate::error::{Error, Result};
use crate::io::json;
use crate::model::{parse_angle, InitialConditions, Params};

/// Inclusive range of values. Deserializes from a number, a list, or an
/// object `{start, stop, step}` / `{start, stop, count}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RangeSpec {
    Single(f64),
    List(Vec<f64>),
    Step { start: f64, stop: f64, step: f64 },
    Count { start: f64, stop: f64, count: usize },
}

impl RangeSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        let v = match *self {
            RangeSpec::Single(v) => vec![v],
            RangeSpec::List(ref v) => v.clone(),
            RangeSpec::Step { start, stop, step } => {
                if !(step > 0.0) || !step.is_finite() {
                    return bad(format!("step must be positive, got {step}"));
                }
                if stop < start {
                    return bad(format!("empty range [{start}, {stop}]"));
                }
                let n = ((stop - start) / step * (1.0 + 1e-12)).floor() as usize + 1;
                (0..n).map(|i| start + i as f64 * step).collect()
            }
            RangeSpec::Count { start, stop, count } => match count {
                0 => return bad("count must be at least 1".into()),
                1 if start == stop => vec![start],
                1 => return bad(format!("count 1 needs start == stop, got [{start}, {stop}]")),
                _ if stop < start => return bad(format!("empty range [{start}, {stop}]")),
                _ => {
                    let h = (stop - start) / (count - 1) as f64;
                    (0..count).map(|i| if i + 1 == count { stop } else { start + i as f64 * h }).collect()
                }
            },
        };
        if v.is_empty() {
            return bad("range is empty".into());
        }
        if v.iter().any(|x| !x.is_finite()) {
            return bad("range contains non-finite values".into());
        }
        Ok(v)
    }
}

fn angles<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Angle {
        Num(f64),
        Text(String),
    }
    Vec::<Angle>::deserialize(d)?
        .into_iter()
        .map(|a| match a {
            Angle::Num(v) => Ok(v),
            Angle::Text(t) => parse_angle(&t).map_err(serde::de::Error::custom),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub a_range: RangeSpec,
    pub b_range: RangeSpec,
    pub x0_range: RangeSpec,
    /// Radians, or symbolic multiples of pi such as `"3pi/2"`.
    #[serde(deserialize_with = "angles")]
    pub theta0_list: Vec<f64>,
    pub output_dir: PathBuf,
}

/// One grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub theta0: f64,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    /// Grid cells in `a`, `b`, `x0`, `theta0` order (last varies fastest).
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let (av, bv, xv) = (self.a_range.values()?, self.b_range.values()?, self.x0_range.values()?);
        if self.theta0_list.is_empty() {
            return Err(Error::InvalidSpec("theta0_list is empty".into()));
        }
        let mut cells = Vec::with_capacity(av.len() * bv.len() * xv.len() * self.theta0_list.len());
        for &a in &av {
            for &b in &bv {
                for &x0 in &xv {
                    for &theta0 in &self.theta0_list {
                        cells.push(Cell { index: cells.len(), a, b, x0, theta0 });
                    }
                }
            }
        }
        Ok(cells)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: Cell,
    pub outcome: Result<ClassificationReport>,
}

impl CellResult {
    /// Class name, or `error:<kind>` for failed cells.
    pub fn label(&self) -> String {
        match &self.outcome {
            Ok(r) => r.class.name().to_string(),
            Err(e) => format!("error:{}", json::error_kind(e)),
        }
    }
}

pub fn classify_cell(cell: &Cell) -> Result<ClassificationReport> {
    let params = Params::new(cell.a, cell.b)?;
    let ic = InitialConditions::new(cell.x0, cell.theta0)?;
    classify_surface(&params, &ic)
}

/// Worker count from `WLW_THREADS`, if set to a positive integer.
pub fn env_threads() -> Option<usize> {
    std::env::var("WLW_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::InvalidSpec(e.to_string()))
}

/// Classifies every cell on a pool of `threads` workers (all cores if `None`).
pub fn run_cells(cells: &[Cell], threads: Option<usize>) -> Result<Vec<CellResult>> {
    let pool = pool(threads)?;
    Ok(pool.install(|| {
        cells
            .par_iter()
            .map(|c| CellResult { cell: *c, outcome: classify_cell(c) })
            .collect()
    }))
}

pub const SUMMARY_HEADER: &str = "a,b,x0,theta0,class";

pub fn summary_csv(results: &[CellResult]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in results {
        let c = &r.cell;
        let _ = writeln!(out, "{:?},{:?},{:?},{:?},{}", c.a, c.b, c.x0, c.theta0, r.label());
    }
    out
}

pub fn cell_path(dir: &Path, cell: &Cell) -> PathBuf {
    dir.join("cells").join(format!("cell_{:06}.json", cell.index))
}

/// Runs the sweep, writing one JSON file per cell plus `summary.csv` into
/// `spec.output_dir`. Failed cells are recorded and do not stop the sweep.
pub fn run_sweep(spec: &SweepSpec, threads: Option<usize>) -> Result<Vec<CellResult>> {
    let cells = spec.cells()?;
    let dir = &spec.output_dir;
    fs::create_dir_all(dir.join("cells"))?;
    let pool = pool(threads)?;
    let results: Vec<Result<CellResult>> = pool.install(|| {
        cells
            .par_iter()
            .map(|c| {
                let outcome = classify_cell(c);
                let body = match &outcome {
                    Ok(r) => json::to_pretty(&serde_json::json!({ "cell": c, "report": r })),
                    Err(e) => json::to_pretty(&serde_json::json!({ "cell": c, "error": json::error_document(e) })),
                };
                fs::write(cell_path(dir, c), body)?;
                Ok(CellResult { cell: *c, outcome })
            })
            .collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    fs::write(dir.join("summary.csv"), summary_csv(&results))?;
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_and_count_ranges_are_inclusive() {
        let v = RangeSpec::Step { start: 2.9, stop: 3.1, step: 0.05 }.values().unwrap();
        assert_eq!(v.len(), 5);
        assert!((v[4] - 3.1).abs() < 1e-12);
        let v = RangeSpec::Count { start: 0.0, stop: 1.0, count: 3 }.values().unwrap();
        assert_eq!(v, [0.0, 0.5, 1.0]);
    }

    #[test]
    fn empty_ranges_are_rejected() {
        for r in [
            RangeSpec::List(vec![]),
            RangeSpec::Step { start: 1.0, stop: 0.0, step: 0.1 },
            RangeSpec::Step { start: 0.0, stop: 1.0, step: 0.0 },
            RangeSpec::Count { start: 0.0, stop: 1.0, count: 0 },
        ] {
            assert!(matches!(r.values(), Err(Error::InvalidSpec(_))), "{r:?}");
        }
    }

    #[test]
    fn spec_parses_symbolic_angles() {
        let s = SweepSpec::from_json(
            r#"{"a_range": -2, "b_range": [1], "x0_range": {"start": 1, "stop": 2, "count": 2},
                "theta0_list": ["pi/2", 0], "output_dir": "out"}"#,
        )
        .unwrap();
        let cells = s.cells().unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[0].theta0, std::f64::consts::FRAC_PI_2);
        assert_eq!(cells[3].x0, 2.0);
    }
}
