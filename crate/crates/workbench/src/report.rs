//! CSV and JSON renderings of an [`EvalReport`].

use serde::Serialize;

use crate::experiment::EvalReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// The CSV columns, in order.
pub const CSV_COLUMNS: [&str; 9] = [
    "replicate", "scheme", "n", "lambda", "tau", "h", "theta", "abs_err", "tv",
];

#[derive(Serialize)]
struct Row<'a> {
    replicate: usize,
    scheme: &'a str,
    n: usize,
    lambda: usize,
    tau: usize,
    h: f64,
    theta: f64,
    abs_err: f64,
    tv: f64,
}

pub fn emit_report(report: &EvalReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("reports serialize");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(CSV_COLUMNS).expect("in-memory write");
            let scheme = report.config.scheme.name();
            for r in &report.replicates {
                for e in &r.events {
                    w.serialize(Row {
                        replicate: r.replicate,
                        scheme,
                        n: e.n,
                        lambda: e.lambda,
                        tau: e.tau,
                        h: e.h,
                        theta: e.theta,
                        abs_err: e.abs_err,
                        tv: e.tv,
                    })
                    .expect("in-memory write");
                }
            }
            w.into_inner().expect("in-memory flush")
        }
    }
}

pub fn parse_json_report(bytes: &[u8]) -> Result<EvalReport, serde_json::Error> {
    serde_json::from_slice(bytes)
}
