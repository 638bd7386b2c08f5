use std::collections::BTreeMap;
use std::fmt::Write;

use num_rational::Ratio;
use serde::Serialize;

use super::{MatchReport, ProtocolVerdict, QueryResult, Recommendation, Verdict};

fn decimal(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// A human-readable account of one report: method map with per-method
/// kinds, protocol verdict, counterexample and the reason for the verdict.
pub fn explain(report: &MatchReport) -> String {
    let mut out = String::new();
    let kind = report.kind.map_or("none", |k| k.as_str());
    let coverage = if report.complete {
        kind.to_string()
    } else {
        let n = report.method_map.len() + report.unmatched.len();
        format!("{} of {n} methods, weakest {kind}", report.method_map.len())
    };
    let _ = writeln!(
        out,
        "{}: {} ({coverage}, score {:.2})",
        report.component,
        report.verdict.as_str(),
        decimal(report.score)
    );
    for (q, m) in &report.method_map {
        let _ = write!(out, "  {q} -> {} ({})", m.provided_method, m.kind);
        if m.permutation.iter().enumerate().any(|(i, &j)| i != j) {
            let perm: Vec<String> = m.permutation.iter().map(|j| j.to_string()).collect();
            let _ = write!(out, " parameters [{}]", perm.join(", "));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "  protocol: {}", report.protocol.as_str());
    if let Some(trace) = &report.counterexample {
        let _ = writeln!(out, "  counterexample: {}", trace.as_calls());
    }
    let reason = match report.verdict {
        Verdict::Use if report.protocol == ProtocolVerdict::Holds => {
            "every required call sequence is accepted; component can be plugged in".to_string()
        }
        Verdict::Use => "signatures match and no protocol is required; component can be plugged in".to_string(),
        Verdict::AdaptCandidate if report.complete => {
            "signatures match but the component rejects the counterexample; adapt the component or build a new one"
                .to_string()
        }
        Verdict::AdaptCandidate => format!(
            "covers {} of {} required methods; missing {}",
            report.method_map.len(),
            report.method_map.len() + report.unmatched.len(),
            report.unmatched.join(", ")
        ),
        Verdict::NoMatch => match (report.contradictory.first(), report.unmatched.first()) {
            (Some(m), _) => format!(
                "`{}` is provided with an incompatible signature",
                report.signatures.get(m).unwrap_or(m)
            ),
            (None, Some(m)) => format!("no provided method matches `{}`", report.signatures.get(m).unwrap_or(m)),
            (None, None) => "no match".to_string(),
        },
    };
    let _ = writeln!(out, "  {reason}");
    out
}

/// Recommendation line, then one explanation per report.
pub fn render_text(result: &QueryResult) -> String {
    let mut out = format!("{}\n", result.recommendation);
    if result.reports.is_empty() {
        let _ = writeln!(out, "no candidate components for {}", result.requirement);
    }
    for r in &result.reports {
        out.push('\n');
        out.push_str(&explain(r));
    }
    out
}

#[derive(Serialize)]
struct JsonRecommendation<'a> {
    verdict: &'static str,
    component: Option<&'a str>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonReport<'a> {
    component: &'a str,
    verdict: &'static str,
    kind: Option<&'static str>,
    score: f64,
    score_exact: String,
    method_map: BTreeMap<&'a str, &'a str>,
    protocol: &'static str,
    counterexample: Option<&'a [String]>,
    unmatched: &'a [String],
}

#[derive(Serialize)]
struct JsonResult<'a> {
    version: u32,
    requirement: &'a str,
    recommendation: JsonRecommendation<'a>,
    reports: Vec<JsonReport<'a>>,
}

/// Stable machine-readable form of a query result.
pub fn render_json(result: &QueryResult) -> String {
    let recommendation = match &result.recommendation {
        Recommendation::Use(c) => JsonRecommendation {
            verdict: "USE",
            component: Some(c),
        },
        Recommendation::Adapt(c) => JsonRecommendation {
            verdict: "ADAPT",
            component: Some(c),
        },
        Recommendation::New => JsonRecommendation {
            verdict: "NEW",
            component: None,
        },
    };
    let reports = result
        .reports
        .iter()
        .map(|r| JsonReport {
            component: &r.component,
            verdict: r.verdict.as_str(),
            kind: r.kind.map(|k| k.as_str()),
            score: decimal(r.score),
            score_exact: r.score.to_string(),
            method_map: r
                .method_map
                .iter()
                .map(|(q, m)| (q.as_str(), m.provided_method.as_str()))
                .collect(),
            protocol: r.protocol.as_str(),
            counterexample: r.counterexample.as_ref().map(|t| t.events()),
            unmatched: &r.unmatched,
        })
        .collect();
    let doc = JsonResult {
        version: 1,
        requirement: &result.requirement,
        recommendation,
        reports,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}
