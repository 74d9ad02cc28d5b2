use std::fmt::Write;

use super::{FamilyBody, ScenarioDoc, StateSpec, TokenKind};

/// Canonical scenario text; `parse_scenario(&render_scenario(d)) == d`.
/// Numbers use the shortest representation that round-trips.
pub fn render_scenario(doc: &ScenarioDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario {}", doc.name);
    let _ = writeln!(out, "[system]\nspins {}", doc.spins);

    out.push_str("[state]\n");
    match &doc.state {
        StateSpec::Singlet => out.push_str("singlet\n"),
        StateSpec::Product(factors) => {
            let toks: Vec<String> = factors
                .iter()
                .map(|f| format!("{}{}{}", f.direction.text(), f.sub_text(), f.sign.symbol()))
                .collect();
            let _ = writeln!(out, "{}", toks.join(" "));
        }
        StateSpec::Amplitudes(amps) => {
            out.push_str("amplitudes");
            for (re, im) in amps {
                let _ = write!(out, " {re} {im}");
            }
            out.push('\n');
        }
    }

    let times: Vec<String> = doc.grid.iter().map(|t| t.to_string()).collect();
    let _ = writeln!(out, "[grid]\ntimes {}", times.join(" "));

    out.push_str("[schedule]\n");
    if doc.schedule.is_empty() {
        out.push_str("free\n");
    }
    for seg in &doc.schedule {
        let _ = write!(out, "segment {} {}", seg.start, seg.end);
        for t in &seg.terms {
            let sub = t
                .subsystem
                .map(|s| s.symbol().to_string())
                .unwrap_or_default();
            let _ = write!(out, " {} S{sub}{}", t.coefficient, t.direction.text());
        }
        out.push('\n');
    }

    for fam in &doc.families {
        let _ = writeln!(out, "[family {}]", fam.name);
        match &fam.body {
            FamilyBody::Unitary => out.push_str("unitary\n"),
            FamilyBody::Collapse(dirs) => {
                out.push_str("collapse");
                for (k, d) in dirs.iter().enumerate() {
                    let sub = match (doc.spins, k) {
                        (2, 0) => "A",
                        (2, _) => "B",
                        _ => "",
                    };
                    let _ = write!(out, " {}{sub}", d.text());
                }
                out.push('\n');
            }
            FamilyBody::Histories(hs) => {
                for h in hs {
                    let toks: Vec<String> = h
                        .tokens
                        .iter()
                        .map(|t| match t.kind {
                            TokenKind::Identity => "1".to_string(),
                            TokenKind::Factor(_) => t.text(),
                        })
                        .collect();
                    let _ = writeln!(out, "{}", toks.join(" "));
                }
            }
        }
    }
    out
}
