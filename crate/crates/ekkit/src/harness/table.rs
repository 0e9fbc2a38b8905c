//! Value tables for `ek`, `g_star` and the lattice Eisenstein series.

use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::classical::{eisenstein, Tau};
use crate::ekseries::{ek, g_star, SeriesParams, Variant};
use crate::error::{EkError, Result};
use crate::lattice::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Ek,
    Gstar,
    Eisenstein,
}

impl FromStr for TableKind {
    type Err = EkError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ek" => Ok(Self::Ek),
            "gstar" | "g" => Ok(Self::Gstar),
            "eisenstein" | "e2k" => Ok(Self::Eisenstein),
            _ => Err(EkError::Domain(format!("unknown table kind {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Json,
    Csv,
}

impl FromStr for TableFormat {
    type Err = EkError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(EkError::Domain(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TableSpec {
    pub kind: TableKind,
    pub amax: usize,
    pub bmax: usize,
    pub z: C64,
    pub w: C64,
    pub tau: Tau,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub kind: TableKind,
    pub a: usize,
    pub b: usize,
    pub value: [f64; 2],
    pub radius_used: f64,
    pub tail_bound: f64,
}

#[derive(Serialize)]
struct CsvRow {
    kind: TableKind,
    a: usize,
    b: usize,
    re: f64,
    im: f64,
    radius_used: f64,
    tail_bound: f64,
}

/// Rows ordered by `a`, then `b`. For `ek`, row `(a, b)` holds
/// `e*_{a,b+1}` so that it lines up with `g*_{a,b}`; Eisenstein rows are
/// `e_{2k}` for even `4 ≤ 2k ≤ bmax` (with `a = 0`).
pub fn table_rows(spec: &TableSpec) -> Result<Vec<TableRow>> {
    let l = spec.tau.lattice();
    let p = SeriesParams::default();
    let (z, w) = (l.strat(spec.z), l.strat(spec.w));
    let mut rows = Vec::new();
    match spec.kind {
        TableKind::Eisenstein => {
            for k in (4..=spec.bmax).step_by(2) {
                let v = eisenstein(&l, k, 1e-15)?;
                rows.push(TableRow {
                    kind: spec.kind,
                    a: 0,
                    b: k,
                    value: [v.re, v.im],
                    radius_used: 0.0,
                    tail_bound: 0.0,
                });
            }
        }
        kind => {
            for a in 0..=spec.amax {
                for b in 0..=spec.bmax {
                    let v = match kind {
                        TableKind::Ek => ek(a, b + 1, &z, &w, &l, &p)?,
                        _ => g_star(a, b, &z, &w, &l, &p, Variant::Plain)?,
                    };
                    rows.push(TableRow {
                        kind,
                        a,
                        b,
                        value: [v.value.re, v.value.im],
                        radius_used: v.radius_used,
                        tail_bound: v.tail_bound,
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn io(e: impl std::fmt::Display) -> EkError {
    EkError::Io(e.to_string())
}

/// Write the table to `path`, or to stdout when `path` is `None`.
pub fn emit_table(spec: &TableSpec, format: TableFormat, path: Option<&Path>) -> Result<()> {
    let rows = table_rows(spec)?;
    let out: Box<dyn std::io::Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p).map_err(io)?),
        None => Box::new(std::io::stdout()),
    };
    match format {
        TableFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &rows).map_err(io)?;
            writeln!(out).map_err(io)?;
        }
        TableFormat::Csv => {
            let mut wr = csv::Writer::from_writer(out);
            for r in rows {
                wr.serialize(CsvRow {
                    kind: r.kind,
                    a: r.a,
                    b: r.b,
                    re: r.value[0],
                    im: r.value[1],
                    radius_used: r.radius_used,
                    tail_bound: r.tail_bound,
                })
                .map_err(io)?;
            }
            wr.flush().map_err(io)?;
        }
    }
    Ok(())
}
