//! Report JSON shared by `explain`, `candidates` and `oracle`, and the text
//! rendering with highlighted events.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::causality::{Cause, CauseReport, Status};
use crate::io::FORMAT_VERSION;
use crate::model::{render_events, Counterexample, Event, Lasso, Polarity};
use crate::oracle::OracleOutcome;
use crate::satcore::CandidateSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCore {
    pub trace: String,
    pub position: usize,
    pub core: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateJson {
    pub events: Vec<Event>,
    pub per_step_cores: Vec<StepCore>,
    pub formula_support: Vec<Event>,
}

impl From<&CandidateSet> for CandidateJson {
    fn from(c: &CandidateSet) -> Self {
        CandidateJson {
            events: c.events.iter().cloned().collect(),
            per_step_cores: c
                .per_step_cores
                .iter()
                .map(|((trace, position), core)| StepCore {
                    trace: trace.clone(),
                    position: *position,
                    core: core.iter().cloned().collect(),
                })
                .collect(),
            formula_support: c.formula_support.iter().cloned().collect(),
        }
    }
}

impl From<&CandidateJson> for CandidateSet {
    fn from(c: &CandidateJson) -> Self {
        CandidateSet {
            events: c.events.iter().cloned().collect(),
            per_step_cores: c
                .per_step_cores
                .iter()
                .map(|s| ((s.trace.clone(), s.position), s.core.iter().cloned().collect()))
                .collect(),
            formula_support: c.formula_support.iter().cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReportStats {
    pub subsets_checked: usize,
    pub time_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub format: u32,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub oracle: bool,
    /// Absent for oracle reports, which never compute a candidate set.
    pub candidate: Option<CandidateJson>,
    pub causes: Vec<Cause>,
    pub status: Status,
    pub stats: ReportStats,
}

/// Output of `candidates`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub format: u32,
    pub candidate: CandidateJson,
}

impl CandidateReport {
    pub fn new(c: &CandidateSet) -> Self {
        CandidateReport {
            format: FORMAT_VERSION,
            candidate: c.into(),
        }
    }
}

impl Report {
    pub fn from_causes(r: &CauseReport) -> Self {
        Report {
            format: FORMAT_VERSION,
            oracle: false,
            candidate: Some((&r.candidate).into()),
            causes: r.causes.clone(),
            status: r.status,
            stats: ReportStats {
                subsets_checked: r.stats.subsets_checked,
                time_ms: r.stats.time_ms,
                seed: None,
            },
        }
    }

    /// Oracle causes are verified by construction.
    pub fn from_oracle(o: &OracleOutcome, time_ms: u64) -> Self {
        Report {
            format: FORMAT_VERSION,
            oracle: true,
            candidate: None,
            causes: o
                .causes
                .iter()
                .map(|c| Cause {
                    events: c.cause.clone(),
                    contingency: c.contingency.clone(),
                    verified: true,
                })
                .collect(),
            status: if o.causes.is_empty() {
                Status::NoActualCause
            } else {
                Status::Found
            },
            stats: ReportStats {
                subsets_checked: o.subsets_checked,
                time_ms,
                seed: None,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Cause event sets in canonical order, ignoring contingencies.
    pub fn cause_sets(&self) -> BTreeSet<BTreeSet<Event>> {
        self.causes.iter().map(|c| c.events.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Style {
    pub ansi: bool,
}

impl Style {
    pub const PLAIN: Style = Style { ansi: false };
    pub const ANSI: Style = Style { ansi: true };

    fn cause(&self, s: &str) -> String {
        if self.ansi {
            format!("\x1b[1;31m{s}\x1b[0m")
        } else {
            format!("[*]{s}")
        }
    }

    fn contingency(&self, s: &str) -> String {
        if self.ansi {
            format!("\x1b[4m{s}\x1b[0m")
        } else {
            format!("[~]{s}")
        }
    }
}

fn render_letter(
    cex: &Counterexample,
    var: &str,
    position: usize,
    letter: u64,
    cause: &BTreeSet<Event>,
    contingency: &BTreeSet<Event>,
    style: Style,
) -> String {
    let ap = cex.alphabet();
    let mut parts = Vec::new();
    for (bit, p) in ap.props().iter().enumerate() {
        let present = letter & (1 << bit) != 0;
        let ev = Event::new(Polarity::of(present), &p.name, position, var);
        let text = if present { p.name.clone() } else { format!("!{}", p.name) };
        if cause.contains(&ev) {
            parts.push(style.cause(&text));
        } else if contingency.contains(&ev) {
            parts.push(style.contingency(&text));
        } else if present {
            parts.push(text);
        }
    }
    format!("{{{}}}", parts.join(","))
}

/// One trace with cause literals highlighted and contingency literals
/// underlined; absent propositions appear negated only when marked.
pub fn render_trace(
    cex: &Counterexample,
    var: &str,
    cause: &BTreeSet<Event>,
    contingency: &BTreeSet<Event>,
    style: Style,
) -> String {
    let t: &Lasso = cex.trace(var).expect("trace of the counterexample");
    let letter = |i: usize, l: u64| render_letter(cex, var, i, l, cause, contingency, style);
    let u: Vec<String> = t.prefix().iter().enumerate().map(|(i, &l)| letter(i, l)).collect();
    let v: Vec<String> = t
        .period()
        .iter()
        .enumerate()
        .map(|(i, &l)| letter(t.loop_start() + i, l))
        .collect();
    if u.is_empty() {
        format!("({})^w", v.join(" "))
    } else {
        format!("{} ({})^w", u.join(" "), v.join(" "))
    }
}

fn render_counterexample(
    out: &mut String,
    cex: &Counterexample,
    cause: &BTreeSet<Event>,
    contingency: &BTreeSet<Event>,
    style: Style,
) {
    for var in cex.vars() {
        let _ = writeln!(out, "  {var}: {}", render_trace(cex, var, cause, contingency, style));
    }
}

fn status_text(s: Status) -> &'static str {
    match s {
        Status::Found => "found",
        Status::NoActualCause => "no actual cause",
        Status::BoundedOut => "bounds exhausted",
    }
}

pub fn render_candidates(cex: &Counterexample, c: &CandidateSet, style: Style) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "candidate cause {}", render_events(&c.events));
    render_counterexample(&mut out, cex, &c.events, &BTreeSet::new(), style);
    for ((trace, position), core) in &c.per_step_cores {
        let _ = writeln!(out, "  core {trace}@{position}: {}", render_events(core));
    }
    let _ = writeln!(out, "formula support {}", render_events(&c.formula_support));
    out
}

pub fn render_report(cex: &Counterexample, r: &Report, style: Style) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "counterexample");
    render_counterexample(&mut out, cex, &BTreeSet::new(), &BTreeSet::new(), style);
    if let Some(c) = &r.candidate {
        let _ = writeln!(out, "candidate cause {}", render_events(&c.events));
    }
    let source = if r.oracle { ", exhaustive" } else { "" };
    let _ = writeln!(
        out,
        "status: {} ({} causes, {} subsets checked, {} ms{source})",
        status_text(r.status),
        r.causes.len(),
        r.stats.subsets_checked,
        r.stats.time_ms
    );
    for (i, c) in r.causes.iter().enumerate() {
        let verified = if c.verified { "verified" } else { "unverified" };
        let _ = writeln!(out, "cause {}: {} {verified}", i + 1, render_events(&c.events));
        let _ = writeln!(out, "  contingency {}", render_events(&c.contingency));
        render_counterexample(&mut out, cex, &c.events, &c.contingency, style);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alternating::AnnotationPolicy;
    use crate::causality::{all_minimal_causes, Config};
    use crate::satcore::candidate_cause;
    use crate::fixtures::{running_counterexample, running_example, running_formula};
    use crate::oracle::brute_force_causes;

    #[test]
    fn json_round_trip_and_oracle_marker() {
        let m = running_example();
        let cex = running_counterexample(&m);
        let f = running_formula();
        let c = candidate_cause(&m, &f, &cex, AnnotationPolicy::Canonical).unwrap();
        let r = Report::from_causes(&all_minimal_causes(&m, &f, &cex, &c, Config::default()).unwrap());
        let json = r.to_json();
        assert!(!json.contains("\"oracle\""));
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(CandidateSet::from(r.candidate.as_ref().unwrap()).events.len(), 3);

        let o = Report::from_oracle(&brute_force_causes(&m, &f, &cex).unwrap(), 0);
        assert!(o.to_json().contains("\"oracle\": true"));
        assert_eq!(o.cause_sets(), r.cause_sets());
    }

    #[test]
    fn plain_markers() {
        let m = running_example();
        let cex = running_counterexample(&m);
        let cause = BTreeSet::from([Event::pos("hi", 0, "t2")]);
        let w = BTreeSet::from([Event::pos("lo", 2, "t2")]);
        assert_eq!(
            render_trace(&cex, "t2", &cause, &w, Style::PLAIN),
            "{[*]hi} {hi,ho} ({ho,[~]lo})^w"
        );
        assert_eq!(
            render_trace(&cex, "t1", &BTreeSet::from([Event::neg("hi", 0, "t1")]), &w, Style::PLAIN),
            "{[*]!hi} {lo} ({ho,lo})^w"
        );
        assert!(render_trace(&cex, "t2", &cause, &w, Style::ANSI).contains("\x1b[1;31mhi\x1b[0m"));
    }
}
