use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::ScenarioDoc;
use crate::error::Result;
use crate::histories::check_consistency_with_tol;
use crate::linalg::EPS_CONS;

/// Machine-readable report: `{scenario, families: [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub families: Vec<FamilyReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub name: String,
    pub consistent: bool,
    pub exhaustive: bool,
    pub violating_pairs: Vec<PairReport>,
    /// Empty unless the family is consistent.
    pub probabilities: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub re: f64,
    pub im: f64,
}

/// Human-facing extras not carried by the machine format.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyDetails {
    pub histories: Vec<String>,
    pub weights: Vec<f64>,
    pub exhaustiveness_issue: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub report: Report,
    pub details: Vec<FamilyDetails>,
}

impl RunOutput {
    pub fn all_consistent(&self) -> bool {
        self.report.families.iter().all(|f| f.consistent)
    }
}

/// Rounds to 12 significant digits and flushes roundoff-sized values to 0.
pub(crate) fn sig12(x: f64) -> f64 {
    if x.abs() < 1e-13 {
        return 0.0;
    }
    format!("{x:.11e}").parse().expect("formatted float")
}

pub fn run_scenario(doc: &ScenarioDoc) -> Result<RunOutput> {
    run_scenario_with_tol(doc, EPS_CONS)
}

/// Checks every family in file order with overlap tolerance `tol`.
pub fn run_scenario_with_tol(doc: &ScenarioDoc, tol: f64) -> Result<RunOutput> {
    let mut families = Vec::new();
    let mut details = Vec::new();
    for family in doc.families()? {
        let r = check_consistency_with_tol(&family, tol);
        families.push(FamilyReport {
            name: family.name().to_string(),
            consistent: r.consistent,
            exhaustive: r.exhaustive,
            violating_pairs: r
                .violating_pairs
                .iter()
                .map(|p| PairReport {
                    i: p.i,
                    j: p.j,
                    re: sig12(p.overlap.re),
                    im: sig12(p.overlap.im),
                })
                .collect(),
            probabilities: if r.consistent {
                r.probabilities.iter().copied().map(sig12).collect()
            } else {
                Vec::new()
            },
        });
        details.push(FamilyDetails {
            histories: family
                .histories()
                .iter()
                .map(|h| h.label_string())
                .collect(),
            weights: r.probabilities.iter().copied().map(sig12).collect(),
            exhaustiveness_issue: r.exhaustiveness_issue,
        });
    }
    Ok(RunOutput {
        report: Report {
            scenario: doc.name.clone(),
            families,
        },
        details,
    })
}

pub fn render_machine(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("plain data");
    s.push('\n');
    s
}

pub fn parse_machine_report(text: &str) -> serde_json::Result<Report> {
    serde_json::from_str(text)
}

pub fn render_text(run: &RunOutput) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario {}", run.report.scenario);
    for (fam, det) in run.report.families.iter().zip(&run.details) {
        let verdict = if fam.consistent {
            "consistent"
        } else {
            "INCONSISTENT"
        };
        let _ = writeln!(
            out,
            "\nfamily {}: {verdict} (exhaustive: {})",
            fam.name,
            if fam.exhaustive { "yes" } else { "no" }
        );
        if let Some(issue) = &det.exhaustiveness_issue {
            let _ = writeln!(out, "  not exhaustive: {issue}");
        }
        if !fam.violating_pairs.is_empty() {
            out.push_str("  interfering pairs:\n");
            for p in &fam.violating_pairs {
                let _ = writeln!(out, "    ({}, {})  overlap {}{:+}i", p.i, p.j, p.re, p.im);
            }
        }
        let width = det
            .histories
            .iter()
            .map(|h| h.chars().count())
            .max()
            .unwrap_or(0);
        let column = if fam.consistent {
            "probability"
        } else {
            "weight (no probability)"
        };
        let _ = writeln!(out, "  histories ({column}):");
        for (k, (h, w)) in det.histories.iter().zip(&det.weights).enumerate() {
            let _ = writeln!(out, "    {:>2}  {h:<width$}  {w}", k + 1);
        }
        if fam.consistent {
            let total: f64 = fam.probabilities.iter().sum();
            let _ = writeln!(out, "  sum {}", sig12(total));
        }
    }
    out
}
