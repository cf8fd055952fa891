use std::io::Write;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub check: String,
    pub target: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Report {
    pub fn new(check: &str, target: &str, status: Status) -> Report {
        Report { check: check.into(), target: target.into(), status, witness: None, detail: None }
    }

    pub fn pass_if(check: &str, target: &str, ok: bool) -> Report {
        Report::new(check, target, if ok { Status::Pass } else { Status::Fail })
    }

    pub fn witness(mut self, w: impl Into<String>) -> Report {
        self.witness = Some(w.into());
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Report {
        self.detail = Some(d.into());
        self
    }
}

/// Collects reports and writes them in insertion order.
pub struct Sink {
    json: bool,
    reports: Vec<Report>,
}

impl Sink {
    pub fn new(json: bool) -> Sink {
        Sink { json, reports: Vec::new() }
    }

    pub fn push(&mut self, r: Report) {
        self.reports.push(r);
    }

    pub fn count(&self, s: Status) -> usize {
        self.reports.iter().filter(|r| r.status == s).count()
    }

    pub fn emit(&self, out: &mut impl Write) -> std::io::Result<()> {
        for r in &self.reports {
            if self.json {
                writeln!(out, "{}", serde_json::to_string(r).expect("report serialises"))?;
            } else {
                write!(out, "{:<7} {} {}", r.status.as_str(), r.check, r.target)?;
                if let Some(d) = &r.detail {
                    write!(out, " | {d}")?;
                }
                if let Some(w) = &r.witness {
                    write!(out, " | witness: {w}")?;
                }
                writeln!(out)?;
            }
        }
        Ok(())
    }
}
