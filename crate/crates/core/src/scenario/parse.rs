use std::fmt;

use thiserror::Error;

use super::{
    DirSpec, EventToken, Factor, FamilyBody, FamilySpec, HamiltonianTerm, HistorySpec, ScenarioDoc,
    SegmentSpec, StateSpec, TokenKind,
};
use crate::frameworks::Proposition;
use crate::linalg::{c, Operator, Projector, StateVector, EPS_NORM};
use crate::spin::{Direction, Sign, Subsystem};

const DIRECTION: &str = "direction (x, y, z, -x, -y, -z, w(theta,phi))";

/// Syntax error with 1-based position and the tokens that would have been
/// accepted there.
#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" | "))?;
        }
        Ok(())
    }
}

/// Well-formed syntax describing an invalid scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationError {
    /// 1-based line, 0 when the problem is not tied to one line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("parse error at {0}")]
    Parse(ParseError),
    #[error("invalid scenario: {0}")]
    Validation(ValidationError),
}

fn perr(
    line: usize,
    column: usize,
    message: impl Into<String>,
    expected: &[&str],
) -> ScenarioError {
    ScenarioError::Parse(ParseError {
        line,
        column,
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    })
}

fn verr(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation(ValidationError {
        line,
        message: message.into(),
    })
}

/// Whitespace-separated tokens with 1-based columns; whitespace inside
/// parentheses does not split.
fn tokenize(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    let mut depth = 0usize;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() && depth == 0 {
            if !current.is_empty() {
                out.push((start + 1, std::mem::take(&mut current)));
            }
            continue;
        }
        if current.is_empty() {
            start = text[..i].chars().count();
        }
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ => {}
        }
        if !ch.is_whitespace() {
            current.push(ch);
        }
    }
    if !current.is_empty() {
        out.push((start + 1, current));
    }
    out
}

fn parse_number(s: &str, line: usize, col: usize) -> Result<f64, ScenarioError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(perr(
            line,
            col,
            format!("`{s}` is not a finite number"),
            &["number"],
        )),
    }
}

/// Splits a leading direction literal off `s`.
fn parse_dir(s: &str, line: usize, col: usize) -> Result<(DirSpec, &str), ScenarioError> {
    if let Some(rest) = s.strip_prefix("w(") {
        let close = rest
            .find(')')
            .ok_or_else(|| perr(line, col, "unterminated direction literal", &["`)`"]))?;
        let inner = &rest[..close];
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(perr(
                line,
                col,
                format!("`w({inner})` needs two angles"),
                &["w(theta,phi)"],
            ));
        }
        let theta = parse_number(parts[0], line, col)?;
        let phi = parse_number(parts[1], line, col)?;
        if Direction::new(theta, phi).is_err() {
            return Err(verr(
                line,
                format!("direction w({theta},{phi}) needs theta in [0, pi] and phi in [0, 2pi)"),
            ));
        }
        return Ok((DirSpec::Angles { theta, phi }, &rest[close + 1..]));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    match body.chars().next() {
        Some(ch @ ('x' | 'y' | 'z')) => {
            let name = if neg {
                format!("-{ch}")
            } else {
                ch.to_string()
            };
            Ok((DirSpec::Named(name), &body[1..]))
        }
        _ => Err(perr(line, col, format!("unexpected `{s}`"), &[DIRECTION])),
    }
}

fn parse_subsystem(s: &str) -> (Option<Subsystem>, &str) {
    if let Some(r) = s.strip_prefix('A') {
        (Some(Subsystem::A), r)
    } else if let Some(r) = s.strip_prefix('B') {
        (Some(Subsystem::B), r)
    } else {
        (None, s)
    }
}

fn parse_sign(s: &str, line: usize, col: usize) -> Result<Sign, ScenarioError> {
    match s {
        "+" => Ok(Sign::Plus),
        "-" => Ok(Sign::Minus),
        _ => Err(perr(
            line,
            col,
            format!("unexpected `{s}`"),
            &["`+`", "`-`"],
        )),
    }
}

fn check_subsystem(
    sub: Option<Subsystem>,
    spins: usize,
    line: usize,
    token: &str,
) -> Result<(), ScenarioError> {
    match (spins, sub) {
        (1, Some(_)) => Err(verr(
            line,
            format!("`{token}`: one-spin system takes no subsystem tag"),
        )),
        (2, None) => Err(verr(
            line,
            format!("`{token}`: two-spin system needs an A or B tag"),
        )),
        _ => Ok(()),
    }
}

/// `<direction>[A|B]<time><sign>`, or `None` for the identity token.
fn parse_factor_token(
    tok: &str,
    line: usize,
    col: usize,
) -> Result<Option<(usize, Factor)>, ScenarioError> {
    if tok == "1" {
        return Ok(None);
    }
    let (direction, rest) = parse_dir(tok, line, col).map_err(|e| match e {
        ScenarioError::Parse(mut p) => {
            p.expected.push("`1`".into());
            ScenarioError::Parse(p)
        }
        other => other,
    })?;
    let (subsystem, rest) = parse_subsystem(rest);
    let digits: String = rest.chars().take_while(char::is_ascii_digit).collect();
    if digits.is_empty() {
        return Err(perr(
            line,
            col,
            format!("`{tok}` lacks a time index"),
            &["time index"],
        ));
    }
    let time_index: usize = digits.parse().map_err(|_| {
        perr(
            line,
            col,
            format!("time index in `{tok}` is too large"),
            &["time index"],
        )
    })?;
    let sign = parse_sign(&rest[digits.len()..], line, col)?;
    Ok(Some((
        time_index,
        Factor {
            subsystem,
            direction,
            sign,
        },
    )))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    None,
    System,
    State,
    Grid,
    Schedule,
    Family(usize),
}

/// History lines of one family: `(line, [(column, token)])`.
type HistoryLines = Vec<(usize, Vec<(usize, String)>)>;

struct Builder {
    name: Option<String>,
    spins: Option<(usize, usize)>,
    state: Option<(usize, Vec<(usize, String)>)>,
    grid: Option<(usize, Vec<f64>)>,
    schedule: Vec<(usize, SegmentSpec)>,
    schedule_free: bool,
    families: Vec<(usize, String, HistoryLines)>,
}

fn is_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|ch| ch.is_ascii_alphanumeric() || matches!(ch, '-' | '_' | '.' | '\''))
}

/// Parses and validates scenario text.
pub fn parse_scenario(text: &str) -> Result<ScenarioDoc, ScenarioError> {
    let mut b = Builder {
        name: None,
        spins: None,
        state: None,
        grid: None,
        schedule: Vec::new(),
        schedule_free: false,
        families: Vec::new(),
    };
    let mut section = Section::None;
    let mut seen: Vec<&'static str> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        if tokens.is_empty() {
            continue;
        }
        let (col, first) = (&tokens[0].0, tokens[0].1.as_str());
        let col = *col;

        if b.name.is_none() {
            if first != "scenario" {
                return Err(perr(
                    line,
                    col,
                    format!("unexpected `{first}`"),
                    &["`scenario <name>`"],
                ));
            }
            let name = tokens.get(1).ok_or_else(|| {
                perr(
                    line,
                    col + first.len() + 1,
                    "missing scenario name",
                    &["name"],
                )
            })?;
            if !is_name(&name.1) || tokens.len() > 2 {
                return Err(perr(
                    line,
                    name.0,
                    format!("bad scenario name `{}`", name.1),
                    &["name"],
                ));
            }
            b.name = Some(name.1.clone());
            continue;
        }

        if first.starts_with('[') {
            let header = content.trim();
            if !header.ends_with(']') {
                return Err(perr(
                    line,
                    col + header.len(),
                    "unterminated section header",
                    &["`]`"],
                ));
            }
            let inner: Vec<&str> = header[1..header.len() - 1].split_whitespace().collect();
            section = match inner.as_slice() {
                ["system"] => once(&mut seen, line, "system", Section::System)?,
                ["state"] => once(&mut seen, line, "state", Section::State)?,
                ["grid"] => once(&mut seen, line, "grid", Section::Grid)?,
                ["schedule"] => once(&mut seen, line, "schedule", Section::Schedule)?,
                ["family", name] if is_name(name) => {
                    if b.families.iter().any(|(_, n, _)| n == name) {
                        return Err(verr(line, format!("duplicate family `{name}`")));
                    }
                    b.families.push((line, name.to_string(), Vec::new()));
                    Section::Family(b.families.len() - 1)
                }
                _ => {
                    return Err(perr(
                        line,
                        col,
                        format!("unknown section `{header}`"),
                        &[
                            "[system]",
                            "[state]",
                            "[grid]",
                            "[schedule]",
                            "[family <name>]",
                        ],
                    ))
                }
            };
            continue;
        }

        match section {
            Section::None => {
                return Err(perr(
                    line,
                    col,
                    format!("unexpected `{first}`"),
                    &["section header"],
                ))
            }
            Section::System => {
                if first != "spins" || tokens.len() != 2 {
                    return Err(perr(
                        line,
                        col,
                        format!("unexpected `{first}`"),
                        &["`spins <1|2>`"],
                    ));
                }
                if b.spins.is_some() {
                    return Err(verr(line, "spins given twice"));
                }
                let n = match tokens[1].1.as_str() {
                    "1" => 1,
                    "2" => 2,
                    other => {
                        return Err(verr(line, format!("spins must be 1 or 2, got `{other}`")))
                    }
                };
                b.spins = Some((line, n));
            }
            Section::State => {
                if b.state.is_some() {
                    return Err(verr(line, "state given twice"));
                }
                b.state = Some((line, tokens));
            }
            Section::Grid => {
                if first != "times" {
                    return Err(perr(
                        line,
                        col,
                        format!("unexpected `{first}`"),
                        &["`times <t0> <t1> ...`"],
                    ));
                }
                if b.grid.is_some() {
                    return Err(verr(line, "grid given twice"));
                }
                let times = tokens[1..]
                    .iter()
                    .map(|(cl, t)| parse_number(t, line, *cl))
                    .collect::<Result<Vec<_>, _>>()?;
                if times.len() < 2 {
                    return Err(verr(line, "grid needs t0 and at least one event time"));
                }
                if times.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(verr(line, "grid times must be strictly increasing"));
                }
                b.grid = Some((line, times));
            }
            Section::Schedule => match first {
                "free" if tokens.len() == 1 => b.schedule_free = true,
                "segment" => b.schedule.push((line, parse_segment(&tokens, line)?)),
                _ => {
                    return Err(perr(
                        line,
                        col,
                        format!("unexpected `{first}`"),
                        &["`free`", "`segment <start> <end> <coef> <S-op> ...`"],
                    ))
                }
            },
            Section::Family(k) => b.families[k].2.push((line, tokens)),
        }
    }

    finish(b)
}

fn once(
    seen: &mut Vec<&'static str>,
    line: usize,
    name: &'static str,
    s: Section,
) -> Result<Section, ScenarioError> {
    if seen.contains(&name) {
        return Err(verr(line, format!("duplicate section [{name}]")));
    }
    seen.push(name);
    Ok(s)
}

fn parse_segment(tokens: &[(usize, String)], line: usize) -> Result<SegmentSpec, ScenarioError> {
    if tokens.len() < 5 || !(tokens.len() - 3).is_multiple_of(2) {
        let col = tokens.last().map(|t| t.0).unwrap_or(1);
        return Err(perr(
            line,
            col,
            "segment needs start, end and coefficient/operator pairs",
            &["`segment <start> <end> <coef> <S-op> ...`"],
        ));
    }
    let start = parse_number(&tokens[1].1, line, tokens[1].0)?;
    let end = parse_number(&tokens[2].1, line, tokens[2].0)?;
    let mut terms = Vec::new();
    for pair in tokens[3..].chunks(2) {
        let coefficient = parse_number(&pair[0].1, line, pair[0].0)?;
        let (col, op) = (pair[1].0, pair[1].1.as_str());
        let rest = op.strip_prefix('S').ok_or_else(|| {
            perr(
                line,
                col,
                format!("unexpected `{op}`"),
                &["spin operator `S[A|B]<direction>`"],
            )
        })?;
        let (subsystem, rest) = parse_subsystem(rest);
        let (direction, rest) = parse_dir(rest, line, col)?;
        if !rest.is_empty() {
            return Err(perr(
                line,
                col,
                format!("trailing `{rest}` in `{op}`"),
                &["whitespace"],
            ));
        }
        terms.push(HamiltonianTerm {
            coefficient,
            subsystem,
            direction,
        });
    }
    if start >= end {
        return Err(verr(line, format!("segment [{start}, {end}) is empty")));
    }
    Ok(SegmentSpec { start, end, terms })
}

fn parse_state(
    tokens: &[(usize, String)],
    line: usize,
    spins: usize,
) -> Result<StateSpec, ScenarioError> {
    let first = tokens[0].1.as_str();
    if first == "singlet" {
        if tokens.len() != 1 {
            return Err(perr(
                line,
                tokens[1].0,
                "unexpected token after `singlet`",
                &["end of line"],
            ));
        }
        if spins != 2 {
            return Err(verr(line, "singlet needs two spins"));
        }
        return Ok(StateSpec::Singlet);
    }
    if first == "amplitudes" {
        let nums = tokens[1..]
            .iter()
            .map(|(cl, t)| parse_number(t, line, *cl))
            .collect::<Result<Vec<_>, _>>()?;
        if nums.len() % 2 != 0 {
            return Err(verr(line, "amplitudes come as re/im pairs"));
        }
        let amps: Vec<(f64, f64)> = nums.chunks(2).map(|p| (p[0], p[1])).collect();
        let dim = 1 << spins;
        if amps.len() != dim {
            return Err(verr(
                line,
                format!("{} amplitudes for dimension {dim}", amps.len()),
            ));
        }
        let v = StateVector::new(amps.iter().map(|&(re, im)| c(re, im)).collect())
            .map_err(|e| verr(line, e.to_string()))?;
        if (v.norm() - 1.0).abs() > EPS_NORM {
            return Err(verr(
                line,
                format!("initial state has norm {}, expected 1", v.norm()),
            ));
        }
        return Ok(StateSpec::Amplitudes(amps));
    }
    let mut factors = Vec::new();
    for (col, tok) in tokens {
        let (direction, rest) = parse_dir(tok, line, *col).map_err(|e| match e {
            ScenarioError::Parse(mut p) => {
                p.expected
                    .extend(["`singlet`".to_string(), "`amplitudes ...`".to_string()]);
                ScenarioError::Parse(p)
            }
            other => other,
        })?;
        let (subsystem, rest) = parse_subsystem(rest);
        let sign = parse_sign(rest, line, *col)?;
        check_subsystem(subsystem, spins, line, tok)?;
        factors.push(Factor {
            subsystem,
            direction,
            sign,
        });
    }
    if factors.len() != spins {
        return Err(verr(
            line,
            format!("{} state factors for {spins} spin(s)", factors.len()),
        ));
    }
    if spins == 2
        && (factors[0].subsystem != Some(Subsystem::A)
            || factors[1].subsystem != Some(Subsystem::B))
    {
        return Err(verr(
            line,
            "product state lists the A factor, then the B factor",
        ));
    }
    Ok(StateSpec::Product(factors))
}

fn parse_history(
    tokens: &[(usize, String)],
    line: usize,
    spins: usize,
    n: usize,
) -> Result<HistorySpec, ScenarioError> {
    let mut out: Vec<EventToken> = Vec::new();
    let mut prev = 0usize;
    for (col, tok) in tokens {
        let (time_index, kind) = match parse_factor_token(tok, line, *col)? {
            None => (prev + 1, TokenKind::Identity),
            Some((t, f)) => {
                check_subsystem(f.subsystem, spins, line, tok)?;
                (t, TokenKind::Factor(f))
            }
        };
        if time_index == 0 || time_index > n {
            return Err(verr(
                line,
                format!("`{tok}`: time index {time_index} outside the grid's event times 1..={n}"),
            ));
        }
        if time_index < prev {
            return Err(verr(
                line,
                format!("`{tok}`: time index {time_index} after time {prev}"),
            ));
        }
        let same: Vec<&EventToken> = out.iter().filter(|t| t.time_index == time_index).collect();
        let clash = same.iter().any(|t| match (&t.kind, &kind) {
            (TokenKind::Identity, _) | (_, TokenKind::Identity) => true,
            (TokenKind::Factor(a), TokenKind::Factor(b)) => a.subsystem == b.subsystem,
        });
        if clash {
            return Err(verr(
                line,
                format!("`{tok}`: time index {time_index} already has an event on that spin"),
            ));
        }
        prev = time_index;
        out.push(EventToken { time_index, kind });
    }
    Ok(HistorySpec { tokens: out })
}

fn parse_family_body(
    lines: &[(usize, Vec<(usize, String)>)],
    spins: usize,
    n: usize,
    header: usize,
) -> Result<FamilyBody, ScenarioError> {
    let Some((first_line, first)) = lines.first() else {
        return Err(verr(header, "family has no histories"));
    };
    match first[0].1.as_str() {
        "unitary" => {
            if first.len() != 1 || lines.len() != 1 {
                return Err(verr(*first_line, "`unitary` stands alone in its family"));
            }
            Ok(FamilyBody::Unitary)
        }
        "collapse" => {
            if lines.len() != 1 {
                return Err(verr(*first_line, "`collapse` stands alone in its family"));
            }
            let mut dirs = Vec::new();
            for (col, tok) in &first[1..] {
                let (d, rest) = parse_dir(tok, *first_line, *col)?;
                let (sub, rest) = parse_subsystem(rest);
                if !rest.is_empty() {
                    return Err(perr(
                        *first_line,
                        *col,
                        format!("trailing `{rest}`"),
                        &["whitespace"],
                    ));
                }
                let expected_sub = match (spins, dirs.len()) {
                    (2, 0) => Some(Subsystem::A),
                    (2, _) => Some(Subsystem::B),
                    _ => None,
                };
                if sub != expected_sub {
                    return Err(verr(*first_line, format!("`{tok}`: collapse lists one direction per spin, tagged A then B for two spins")));
                }
                dirs.push(d);
            }
            if dirs.len() != spins {
                return Err(verr(
                    *first_line,
                    format!("collapse needs {spins} direction(s)"),
                ));
            }
            Ok(FamilyBody::Collapse(dirs))
        }
        _ => lines
            .iter()
            .map(|(line, toks)| parse_history(toks, *line, spins, n))
            .collect::<Result<Vec<_>, _>>()
            .map(FamilyBody::Histories),
    }
}

fn finish(b: Builder) -> Result<ScenarioDoc, ScenarioError> {
    let name = b
        .name
        .ok_or_else(|| perr(1, 1, "empty scenario", &["`scenario <name>`"]))?;
    let (_, spins) = b.spins.ok_or_else(|| verr(0, "missing [system] section"))?;
    let (state_line, state_tokens) = b.state.ok_or_else(|| verr(0, "missing [state] section"))?;
    let (_, grid) = b.grid.ok_or_else(|| verr(0, "missing [grid] section"))?;
    if b.schedule_free && !b.schedule.is_empty() {
        return Err(verr(
            b.schedule[0].0,
            "schedule is either `free` or a list of segments",
        ));
    }
    if b.families.is_empty() {
        return Err(verr(0, "no [family <name>] section"));
    }
    let state = parse_state(&state_tokens, state_line, spins)?;
    let n = grid.len() - 1;

    for (line, seg) in &b.schedule {
        for t in &seg.terms {
            check_subsystem(
                t.subsystem,
                spins,
                *line,
                &format!("S{}", t.direction.text()),
            )?;
        }
    }

    let families = b
        .families
        .iter()
        .map(|(line, name, lines)| {
            Ok(FamilySpec {
                name: name.clone(),
                body: parse_family_body(lines, spins, n, *line)?,
            })
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;

    let doc = ScenarioDoc {
        name,
        spins,
        state,
        grid,
        schedule: b.schedule.iter().map(|(_, s)| s.clone()).collect(),
        families,
    };
    if let Err(e) = doc.build_schedule() {
        let line = b.schedule.first().map(|s| s.0).unwrap_or(0);
        return Err(verr(line, e.to_string()));
    }
    for (spec, (line, _, _)) in doc.families.iter().zip(&b.families) {
        doc.build_family(spec)
            .map_err(|e| verr(*line, format!("family `{}`: {e}", spec.name)))?;
    }
    Ok(doc)
}

/// Parses an event label such as `x1+` or `zA1+ xB1-` into a proposition on
/// the scenario's Hilbert space.
pub fn parse_event_label(doc: &ScenarioDoc, label: &str) -> Result<Proposition, ScenarioError> {
    let tokens = tokenize(label);
    if tokens.is_empty() {
        return Err(perr(1, 1, "empty event label", &[DIRECTION]));
    }
    let n = doc.grid.len() - 1;
    let dim = doc.dim();
    let mut time = None;
    let mut op = Operator::identity(dim);
    let mut texts = Vec::new();
    let mut subs = Vec::new();
    for (col, tok) in &tokens {
        let Some((t, f)) = parse_factor_token(tok, 1, *col)? else {
            return Err(perr(1, *col, "identity needs no query", &[DIRECTION]));
        };
        check_subsystem(f.subsystem, doc.spins, 1, tok)?;
        if t == 0 || t > n {
            return Err(verr(
                1,
                format!("`{tok}`: time index {t} outside the grid's event times 1..={n}"),
            ));
        }
        if *time.get_or_insert(t) != t {
            return Err(verr(1, "all factors of a proposition share one time index"));
        }
        if subs.contains(&f.subsystem) {
            return Err(verr(1, format!("`{tok}`: spin already constrained")));
        }
        subs.push(f.subsystem);
        let p = f.projector(doc.spins).map_err(|e| verr(1, e.to_string()))?;
        op = op.mul(p.op()).map_err(|e| verr(1, e.to_string()))?;
        texts.push(
            EventToken {
                time_index: t,
                kind: TokenKind::Factor(f),
            }
            .text(),
        );
    }
    let projector = Projector::new(op, texts.join(" ")).map_err(|e| verr(1, e.to_string()))?;
    Ok(Proposition::new(projector, time.expect("non-empty")))
}
