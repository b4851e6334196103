//! JSON-lines and CSV writers for evaluation records and residual reports.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use triplehyp::harness::{ResidualReport, Summary};
use triplehyp::{EvalResult, ParamSet, TriplePoint, Variant};

use crate::config::{MatrixJson, ParamsJson, ScalarJson};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" | "jsonl" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => bail!("unknown format {other:?} (json, csv)"),
        }
    }
}

/// One evaluated point. Field names match the config schema, so a record
/// can be fed back with `--config`.
#[derive(Debug, Serialize)]
pub struct EvalRecord {
    pub family: String,
    pub variant: String,
    pub x: f64,
    pub params: ParamsJson,
    pub z: [ScalarJson; 3],
    pub value: MatrixJson,
    pub error_estimate: f64,
    pub terms_used: usize,
    pub layers: usize,
    pub converged: bool,
}

impl EvalRecord {
    pub fn new(p: &ParamSet, variant: Variant, z: &TriplePoint, r: &EvalResult) -> Self {
        EvalRecord {
            family: p.family.name().to_string(),
            variant: variant.name().to_string(),
            x: p.x,
            params: ParamsJson::from_params(p),
            z: z.as_array().map(ScalarJson::exact),
            value: MatrixJson::from_matrix(&r.value),
            error_estimate: r.error_estimate,
            terms_used: r.terms_used,
            layers: r.layers,
            converged: r.converged,
        }
    }
}

#[derive(Debug, Serialize)]
struct ReportRecord<'a> {
    identity: &'a str,
    family: Option<&'static str>,
    case: &'a str,
    lhs_norm: f64,
    rhs_norm: f64,
    residual_norm: f64,
    relative_residual: f64,
    tolerance: f64,
    passed: bool,
    diagnostics: &'a str,
}

impl<'a> From<&'a ResidualReport> for ReportRecord<'a> {
    fn from(r: &'a ResidualReport) -> Self {
        ReportRecord {
            identity: &r.identity,
            family: r.family.map(|f| f.name()),
            case: &r.case,
            lhs_norm: r.lhs_norm,
            rhs_norm: r.rhs_norm,
            residual_norm: r.residual_norm,
            relative_residual: r.relative_residual,
            tolerance: r.tolerance,
            passed: r.passed,
            diagnostics: &r.diagnostics,
        }
    }
}

// shortest round-trip form, with an exponent when that is shorter
fn num(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Serialize)]
struct Counts {
    total: usize,
    passed: usize,
    failed: usize,
}

#[derive(Serialize)]
struct SummaryLine {
    summary: Counts,
}

fn open(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

enum Inner {
    Json(Box<dyn Write>),
    Csv { w: csv::Writer<Box<dyn Write>>, header: bool },
}

/// Streams records as they are produced.
pub struct EvalSink(Inner);

impl EvalSink {
    pub fn open(format: Format, out: Option<&Path>) -> Result<Self> {
        let w = open(out)?;
        Ok(EvalSink(match format {
            Format::Json => Inner::Json(w),
            Format::Csv => Inner::Csv { w: csv::Writer::from_writer(w), header: false },
        }))
    }

    pub fn write(&mut self, rec: &EvalRecord) -> Result<()> {
        match &mut self.0 {
            Inner::Json(w) => {
                serde_json::to_writer(&mut *w, rec)?;
                writeln!(w)?;
                w.flush()?;
            }
            Inner::Csv { w, header } => {
                let n = rec.value.rows;
                if !*header {
                    let mut cols: Vec<String> = ["family", "variant", "x", "z1_re", "z1_im", "z2_re", "z2_im", "z3_re", "z3_im"]
                        .map(String::from)
                        .to_vec();
                    for part in ["re", "im"] {
                        for i in 0..n {
                            for j in 0..n {
                                cols.push(format!("{part}_{i}_{j}"));
                            }
                        }
                    }
                    cols.extend(["error_estimate", "terms_used", "layers", "converged"].map(String::from));
                    w.write_record(&cols)?;
                    *header = true;
                }
                let mut row = vec![rec.family.clone(), rec.variant.clone(), num(rec.x)];
                for z in rec.z {
                    let z = z.value();
                    row.push(num(z.re));
                    row.push(num(z.im));
                }
                row.extend(rec.value.re.iter().chain(&rec.value.im).map(|&v| num(v)));
                row.push(num(rec.error_estimate));
                row.push(rec.terms_used.to_string());
                row.push(rec.layers.to_string());
                row.push(rec.converged.to_string());
                w.write_record(&row)?;
                w.flush()?;
            }
        }
        Ok(())
    }
}

/// Writes every report, then (for JSON) a trailing summary line.
pub fn write_reports(format: Format, out: Option<&Path>, reports: &[ResidualReport]) -> Result<()> {
    let mut w = open(out)?;
    match format {
        Format::Json => {
            for r in reports {
                serde_json::to_writer(&mut w, &ReportRecord::from(r))?;
                writeln!(w)?;
            }
            let s = Summary::of(reports);
            let line = SummaryLine { summary: Counts { total: s.total, passed: s.passed, failed: s.failed } };
            serde_json::to_writer(&mut w, &line)?;
            writeln!(w)?;
            w.flush()?;
        }
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            for r in reports {
                c.serialize(ReportRecord::from(r))?;
            }
            c.flush()?;
        }
    }
    Ok(())
}
