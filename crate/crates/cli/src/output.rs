//! Report rendering: JSON bodies and RFC-4180 CSV tables.
//!
//! All numbers use Rust's shortest-round-trip float formatting, so a
//! value parses back to the exact bits that were written and identical
//! runs render identical bytes. CSV uses LF terminators and quotes only
//! where required.

use clap::ValueEnum;
use spincert_core::certificates::{CertificateReport, Ell};
use spincert_core::gibbs::Beta;
use spincert_core::report::CheckResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// What a command produced, in both renderings, plus its exit code.
pub struct CommandOutput {
    pub json: String,
    pub csv: String,
    pub exit: i32,
    pub default_format: Format,
}

impl CommandOutput {
    pub fn body(&self, format: Option<Format>) -> &str {
        match format.unwrap_or(self.default_format) {
            Format::Json => &self.json,
            Format::Csv => &self.csv,
        }
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn fmt_beta(b: Beta) -> String {
    match b {
        Beta::Finite(x) => fmt_f64(x),
        Beta::Infinite => "inf".into(),
    }
}

pub fn fmt_ell(e: Ell) -> String {
    match e {
        Ell::Finite(l) => l.to_string(),
        Ell::Limit => "inf".into(),
    }
}

fn finish(wtr: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(wtr.into_inner().expect("csv buffer")).expect("csv utf8")
}

/// One row per check: the CSV twin of the JSON checks array.
pub fn checks_csv(checks: &[CheckResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "pass", "margin", "skipped", "parameters", "statement"])
        .expect("csv header");
    for c in checks {
        w.write_record([
            c.name.as_str(),
            if c.pass { "true" } else { "false" },
            &fmt_opt_f64(c.margin),
            c.skipped.as_deref().unwrap_or(""),
            &serde_json::to_string(&c.parameters).expect("params json"),
            c.paper_ref.as_str(),
        ])
        .expect("csv row");
    }
    finish(w)
}

pub const CERTIFICATE_HEADER: [&str; 13] = [
    "d",
    "two_s",
    "beta",
    "ell",
    "j1",
    "j2",
    "alpha",
    "bound1",
    "bound2",
    "best_bound",
    "lro_proven",
    "condition39",
    "kk_bound_used",
];

pub fn certificate_record(r: &CertificateReport) -> Vec<String> {
    vec![
        r.d.to_string(),
        r.two_s.to_string(),
        fmt_beta(r.beta),
        fmt_ell(r.ell),
        fmt_opt_f64(r.j1),
        fmt_opt_f64(r.j2),
        fmt_opt_f64(r.alpha),
        fmt_opt_f64(r.bound1),
        fmt_opt_f64(r.bound2),
        fmt_opt_f64(r.best_bound()),
        r.lro_proven.to_string(),
        r.condition39.map(|b| b.to_string()).unwrap_or_default(),
        r.kk_bound_used.to_string(),
    ]
}

pub fn certificate_csv(reports: &[&CertificateReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CERTIFICATE_HEADER).expect("csv header");
    for r in reports {
        w.write_record(certificate_record(r)).expect("csv row");
    }
    finish(w)
}
