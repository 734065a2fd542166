//! Plain CSV writers. Every file starts with `#` comment lines naming the
//! schema and its version, followed by a single column-header line.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use torus_ns_core::diagnostics::DiagnosticRecord;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub struct CsvWriter {
    out: BufWriter<File>,
    path: String,
}

impl CsvWriter {
    pub fn create(path: &Path, schema: &str, meta: &[(&str, String)], columns: &[String]) -> Result<Self, CliError> {
        let display = path.display().to_string();
        let file = File::create(path).map_err(|e| CliError::io(format!("creating {display}"), e))?;
        let mut w = Self { out: BufWriter::new(file), path: display };
        w.line(&format!("# schema: {schema} v{SCHEMA_VERSION}"))?;
        for (k, v) in meta {
            w.line(&format!("# {k}: {v}"))?;
        }
        w.line(&columns.join(","))?;
        Ok(w)
    }

    fn line(&mut self, s: &str) -> Result<(), CliError> {
        writeln!(self.out, "{s}").map_err(|e| CliError::io(format!("writing {}", self.path), e))
    }

    pub fn row(&mut self, values: &[String]) -> Result<(), CliError> {
        self.line(&values.join(","))
    }

    pub fn row_f64(&mut self, values: &[f64]) -> Result<(), CliError> {
        let cells: Vec<String> = values.iter().map(|v| fmt(*v)).collect();
        self.row(&cells)
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush().map_err(|e| CliError::io(format!("flushing {}", self.path), e))
    }
}

/// Shortest round-trip representation; `nan`/`inf` spelled out.
pub fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn diagnostic_columns(sobolev: &[f64]) -> Vec<String> {
    let mut c: Vec<String> = ["t", "l2", "h1"].iter().map(|s| s.to_string()).collect();
    c.extend(sobolev.iter().map(|s| format!("hs_{s}")));
    c.extend(
        ["grad_l2", "div_max", "energy_residual", "exp_energy", "exp_energy_log", "exp_overflow", "trilinear"]
            .iter()
            .map(|s| s.to_string()),
    );
    c
}

pub fn diagnostic_row(r: &DiagnosticRecord) -> Vec<String> {
    let mut v = vec![fmt(r.t), fmt(r.l2_norm), fmt(r.h1_norm)];
    v.extend(r.h_s_norms.iter().map(|x| fmt(*x)));
    v.push(fmt(r.grad_norm));
    v.push(fmt(r.divergence_max));
    v.push(r.energy_residual.map_or_else(String::new, fmt));
    v.push(r.exp_energy.value.map_or_else(String::new, fmt));
    v.push(fmt(r.exp_energy.log_value));
    v.push(u8::from(r.exp_energy.overflow).to_string());
    v.push(fmt(r.trilinear));
    v
}
