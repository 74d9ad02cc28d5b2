//! Line-oriented scenario files, built-in scenarios and consistency reports.
//!
//! ```text
//! # comments start with '#'
//! scenario eq23
//! [system]
//! spins 1
//! [state]
//! z+
//! [grid]
//! times 0 1 2
//! [schedule]
//! free
//! [family main]
//! x1+ z2+
//! x1+ z2-
//! ```
//!
//! Event tokens are `<direction>[A|B]<time><sign>`, e.g. `x1+`, `zA2-`,
//! `w(0.7853,0)1+`; `1` is the identity at the time after the previous token.
//! Tokens sharing a time index multiply. A family body is either history
//! lines, `unitary`, or `collapse <direction>...` (one direction per spin).

mod builtins;
mod parse;
mod render;
mod report;

pub use builtins::{builtin, builtin_names, builtin_scenarios, builtin_source};
pub use parse::{parse_event_label, parse_scenario, ParseError, ScenarioError, ValidationError};
pub use render::render_scenario;
pub use report::{
    parse_machine_report, render_machine, render_text, run_scenario, run_scenario_with_tol,
    FamilyDetails, FamilyReport, PairReport, Report, RunOutput,
};

use crate::dynamics::{Schedule, Segment, TimeGrid};
use crate::error::Result;
use crate::histories::{collapse_family_labeled, unitary_family, Event, Family, History};
use crate::linalg::{c, tensor_states, Operator, Projector, StateVector};
use crate::spin::{
    basis_for, on_subsystem, singlet, spin_ket, spin_operator, spin_projector, Direction, Sign,
    Subsystem,
};

/// A direction as written in a scenario file.
#[derive(Clone, Debug, PartialEq)]
pub enum DirSpec {
    /// `x`, `y`, `z`, `-x`, `-y`, `-z`.
    Named(String),
    /// `w(theta,phi)` in radians.
    Angles { theta: f64, phi: f64 },
}

impl DirSpec {
    pub fn resolve(&self) -> Result<Direction> {
        match self {
            DirSpec::Named(n) => Direction::named(n).ok_or(crate::Error::InvalidDirection {
                theta: f64::NAN,
                phi: f64::NAN,
            }),
            DirSpec::Angles { theta, phi } => Direction::new(*theta, *phi),
        }
    }

    pub fn text(&self) -> String {
        match self {
            DirSpec::Named(n) => n.clone(),
            DirSpec::Angles { theta, phi } => format!("w({theta},{phi})"),
        }
    }
}

/// `[w±]` on one spin (or one subsystem of two).
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub subsystem: Option<Subsystem>,
    pub direction: DirSpec,
    pub sign: Sign,
}

impl Factor {
    fn projector(&self, spins: usize) -> Result<Projector> {
        let w = self.direction.resolve()?;
        let p = spin_projector(w, self.sign);
        Ok(match self.subsystem {
            Some(s) if spins == 2 => Projector::new(on_subsystem(p.op(), s), p.label())?,
            _ => p,
        })
    }

    fn ket(&self) -> Result<StateVector> {
        Ok(spin_ket(self.direction.resolve()?, self.sign))
    }

    fn sub_text(&self) -> String {
        self.subsystem
            .map(|s| s.symbol().to_string())
            .unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Identity,
    Factor(Factor),
}

/// One whitespace-separated token of a history line.
#[derive(Clone, Debug, PartialEq)]
pub struct EventToken {
    pub time_index: usize,
    pub kind: TokenKind,
}

impl EventToken {
    pub fn text(&self) -> String {
        match &self.kind {
            TokenKind::Identity => "1".to_string(),
            TokenKind::Factor(f) => format!(
                "{}{}{}{}",
                f.direction.text(),
                f.sub_text(),
                self.time_index,
                f.sign.symbol()
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistorySpec {
    pub tokens: Vec<EventToken>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Singlet,
    /// Product of spin eigenkets, one factor per spin.
    Product(Vec<Factor>),
    /// Explicit `(re, im)` amplitudes in Kronecker order.
    Amplitudes(Vec<(f64, f64)>),
}

/// `coefficient · S_direction` on an optional subsystem.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianTerm {
    pub coefficient: f64,
    pub subsystem: Option<Subsystem>,
    pub direction: DirSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentSpec {
    pub start: f64,
    pub end: f64,
    pub terms: Vec<HamiltonianTerm>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyBody {
    Histories(Vec<HistorySpec>),
    Unitary,
    /// Measurement basis directions, one per spin (A first).
    Collapse(Vec<DirSpec>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub name: String,
    pub body: FamilyBody,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioDoc {
    pub name: String,
    pub spins: usize,
    pub state: StateSpec,
    pub grid: Vec<f64>,
    pub schedule: Vec<SegmentSpec>,
    pub families: Vec<FamilySpec>,
}

impl ScenarioDoc {
    pub fn dim(&self) -> usize {
        1 << self.spins
    }

    pub fn initial_state(&self) -> Result<StateVector> {
        match &self.state {
            StateSpec::Singlet => Ok(singlet()),
            StateSpec::Product(factors) => {
                let mut kets = factors.iter().map(Factor::ket);
                let first = kets.next().expect("validated non-empty")?;
                kets.try_fold(first, |acc, k| Ok(tensor_states(&acc, &k?)))
            }
            StateSpec::Amplitudes(a) => {
                StateVector::new(a.iter().map(|&(re, im)| c(re, im)).collect())
            }
        }
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.grid.clone())
    }

    pub fn build_schedule(&self) -> Result<Schedule> {
        let dim = self.dim();
        let segments = self
            .schedule
            .iter()
            .map(|seg| {
                let mut h = Operator::zeros(dim);
                for t in &seg.terms {
                    let s = spin_operator(t.direction.resolve()?);
                    let s = match t.subsystem {
                        Some(sub) if self.spins == 2 => on_subsystem(&s, sub),
                        _ => s,
                    };
                    h = h.add(&s.scale(c(t.coefficient, 0.0)))?;
                }
                Ok(Segment {
                    start: seg.start,
                    end: seg.end,
                    hamiltonian: h,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Schedule::new(dim, segments)
    }

    /// Builds one history's events, multiplying tokens that share a time.
    pub fn build_history(&self, spec: &HistorySpec) -> Result<History> {
        let n = self.grid.len() - 1;
        let dim = self.dim();
        let mut per_time: Vec<Vec<&EventToken>> = vec![Vec::new(); n];
        for t in &spec.tokens {
            per_time[t.time_index - 1].push(t);
        }
        let events = per_time
            .into_iter()
            .enumerate()
            .map(|(j, tokens)| {
                let factors: Vec<&Factor> = tokens
                    .iter()
                    .filter_map(|t| match &t.kind {
                        TokenKind::Factor(f) => Some(f),
                        TokenKind::Identity => None,
                    })
                    .collect();
                if factors.is_empty() {
                    return Ok(Event::identity(j + 1, dim));
                }
                let label = tokens
                    .iter()
                    .filter(|t| matches!(t.kind, TokenKind::Factor(_)))
                    .map(|t| t.text())
                    .collect::<Vec<_>>()
                    .join(" ");
                let mut op = Operator::identity(dim);
                for f in factors {
                    op = op.mul(f.projector(self.spins)?.op())?;
                }
                Ok(Event::new(j + 1, Projector::new(op, label)?))
            })
            .collect::<Result<Vec<_>>>()?;
        History::new(events)
    }

    pub fn build_family(&self, spec: &FamilySpec) -> Result<Family> {
        let psi0 = self.initial_state()?;
        let grid = self.time_grid()?;
        let schedule = self.build_schedule()?;
        let family = match &spec.body {
            FamilyBody::Histories(hs) => {
                let histories = hs
                    .iter()
                    .map(|h| self.build_history(h))
                    .collect::<Result<Vec<_>>>()?;
                Family::new(psi0, grid, schedule, histories)?
            }
            FamilyBody::Unitary => unitary_family(&psi0, &grid, &schedule)?,
            FamilyBody::Collapse(dirs) => {
                let n = grid.event_count();
                let basis = self.collapse_basis(dirs, n)?;
                collapse_family_labeled(&psi0, &grid, &schedule, &basis)?
            }
        };
        Ok(family.named(spec.name.clone()))
    }

    /// Product eigenbasis of the measured directions, A slowest, labelled like
    /// event tokens at time `n`.
    fn collapse_basis(&self, dirs: &[DirSpec], n: usize) -> Result<Vec<(String, StateVector)>> {
        let mut basis: Vec<(Vec<String>, StateVector)> =
            vec![(Vec::new(), StateVector::basis(1, 0))];
        for (k, d) in dirs.iter().enumerate() {
            let w = d.resolve()?;
            let b = basis_for(w);
            let sub = if self.spins == 2 {
                if k == 0 {
                    "A"
                } else {
                    "B"
                }
            } else {
                ""
            };
            let mut next = Vec::with_capacity(basis.len() * 2);
            for (labels, ket) in &basis {
                for sign in Sign::BOTH {
                    let mut l = labels.clone();
                    l.push(format!("{}{sub}{n}{}", d.text(), sign.symbol()));
                    next.push((l, tensor_states(ket, b.ket(sign))));
                }
            }
            basis = next;
        }
        Ok(basis
            .into_iter()
            .map(|(labels, ket)| (labels.join(" "), ket))
            .collect())
    }

    pub fn families(&self) -> Result<Vec<Family>> {
        self.families.iter().map(|f| self.build_family(f)).collect()
    }

    pub fn family(&self, name: &str) -> Option<&FamilySpec> {
        self.families.iter().find(|f| f.name == name)
    }
}
