//! The single-framework rule: a proposition has a probability only relative to
//! a consistent family whose event algebra contains it, and properties or
//! frameworks that do not commute cannot be combined.

use crate::error::{Error, Incompatibility, Result};
use crate::histories::{check_consistency, require_consistent, Event, Family, History};
use crate::linalg::{commutator_norm, Operator, Projector, EPS_CONS, EPS_OP};

/// Subset-sum search over at most this many distinct event projectors.
const MAX_DISTINCT_EVENTS: usize = 20;

/// A property asserted at grid time `t_{time_index}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Proposition {
    pub projector: Projector,
    pub time_index: usize,
}

impl Proposition {
    pub fn new(projector: Projector, time_index: usize) -> Self {
        Self {
            projector,
            time_index,
        }
    }

    pub fn label(&self) -> &str {
        self.projector.label()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QueryResult {
    Probability(f64),
    /// The proposition is not in the framework's event algebra.
    Meaningless(String),
}

impl QueryResult {
    pub fn probability(&self) -> Option<f64> {
        match self {
            QueryResult::Probability(p) => Some(*p),
            QueryResult::Meaningless(_) => None,
        }
    }

    pub fn is_meaningless(&self) -> bool {
        matches!(self, QueryResult::Meaningless(_))
    }
}

/// Probability of `p` in the consistent family `f`, or `Meaningless` when
/// `p` is not a sum of the event projectors `f` uses at that time.
pub fn query(f: &Family, p: &Proposition) -> Result<QueryResult> {
    query_with_tol(f, p, EPS_CONS)
}

/// [`query`] with a custom consistency tolerance.
pub fn query_with_tol(f: &Family, p: &Proposition, tol: f64) -> Result<QueryResult> {
    let report = require_consistent(f, tol)?;
    let n = f.grid().event_count();
    if p.time_index == 0 || p.time_index > n {
        return Ok(QueryResult::Meaningless(format!(
            "time index {} is not an event time of `{}` (1..={n})",
            p.time_index,
            f.name()
        )));
    }
    if p.projector.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: p.projector.dim(),
        });
    }
    if p.projector.is_identity() {
        return Ok(QueryResult::Probability(1.0));
    }

    // distinct event projectors used at this time, with member histories
    let mut distinct: Vec<(&Event, Vec<usize>)> = Vec::new();
    for (k, h) in f.histories().iter().enumerate() {
        let e = h.event_at(p.time_index).expect("validated length");
        match distinct.iter_mut().find(|(d, _)| d.label() == e.label()) {
            Some((_, ks)) => ks.push(k),
            None => distinct.push((e, vec![k])),
        }
    }
    if distinct.len() > MAX_DISTINCT_EVENTS {
        return Ok(QueryResult::Meaningless(format!(
            "{} distinct events at time index {}; membership search limited to {MAX_DISTINCT_EVENTS}",
            distinct.len(),
            p.time_index
        )));
    }

    let target = p.projector.op();
    for mask in 0u32..(1u32 << distinct.len()) {
        let mut sum = Operator::zeros(f.dim());
        for (bit, (e, _)) in distinct.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                sum = sum.add(e.projector().op())?;
            }
        }
        if sum.max_abs_diff(target)? <= EPS_OP {
            let prob = distinct
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask & (1 << bit) != 0)
                .flat_map(|(_, (_, ks))| ks.iter())
                .map(|&k| report.probabilities[k])
                .sum::<f64>();
            return Ok(QueryResult::Probability(prob));
        }
    }

    let labels: Vec<&str> = distinct.iter().map(|(e, _)| e.label()).collect();
    let clash = distinct
        .iter()
        .map(|(e, _)| (e.label(), commutator_norm(e.projector().op(), target)))
        .find(|(_, c)| matches!(c, Ok(v) if *v > EPS_OP));
    let reason = match clash {
        Some((label, Ok(norm))) => format!(
            "{} does not commute with event {label} of `{}` at time index {} (‖[P,Q]‖ = {norm:.3e})",
            p.label(),
            f.name(),
            p.time_index
        ),
        _ => format!(
            "{} is not a sum of the events {{{}}} of `{}` at time index {}",
            p.label(),
            labels.join(", "),
            f.name(),
            p.time_index
        ),
    };
    Ok(QueryResult::Meaningless(reason))
}

/// `p ∧ q` as the product projector when the two commute.
pub fn conjunction(p: &Proposition, q: &Proposition) -> Result<Proposition> {
    if p.time_index != q.time_index {
        return Err(Error::TimeMismatch(p.time_index, q.time_index));
    }
    if commutator_norm(p.projector.op(), q.projector.op())? > EPS_OP {
        return Err(Error::IncompatibleProperties {
            left: p.label().to_string(),
            right: q.label().to_string(),
        });
    }
    Ok(Proposition::new(
        product_projector(&p.projector, &q.projector)?,
        p.time_index,
    ))
}

/// Product of commuting projectors; keeps a factor's label when the product
/// equals that factor.
fn product_projector(a: &Projector, b: &Projector) -> Result<Projector> {
    let prod = a.op().mul(b.op())?;
    if prod.max_abs_diff(a.op())? <= EPS_OP {
        return Ok(a.clone());
    }
    if prod.max_abs_diff(b.op())? <= EPS_OP {
        return Ok(b.clone());
    }
    // symmetrize away roundoff before certifying
    let herm = prod
        .add(&prod.adjoint())?
        .scale(num_complex::Complex64::new(0.5, 0.0));
    Projector::new(herm, format!("{}&{}", a.label(), b.label()))
}

/// Common refinement of two frameworks sharing initial state, grid and
/// dynamics: all event-wise products of their histories, minus null ones.
pub fn refine(f: &Family, g: &Family) -> Result<Family> {
    let mismatch =
        |what: &str| Error::IncompatibleFrameworks(Incompatibility::Mismatched(what.into()));
    if f.initial_state()
        .max_abs_diff(g.initial_state())
        .map_err(|_| mismatch("dimension"))?
        > EPS_OP
    {
        return Err(mismatch("initial states differ"));
    }
    if f.grid() != g.grid() {
        return Err(mismatch("time grids differ"));
    }
    if f.schedule() != g.schedule() {
        return Err(mismatch("schedules differ"));
    }

    for hf in f.histories() {
        for hg in g.histories() {
            for (ef, eg) in hf.events().iter().zip(hg.events()) {
                let norm = commutator_norm(ef.projector().op(), eg.projector().op())?;
                if norm > EPS_OP {
                    return Err(Error::IncompatibleFrameworks(
                        Incompatibility::NonCommuting {
                            time_index: ef.time_index(),
                            left: ef.label().to_string(),
                            right: eg.label().to_string(),
                            commutator: norm,
                        },
                    ));
                }
            }
        }
    }

    let mut histories: Vec<History> = Vec::new();
    for hf in f.histories() {
        'pairs: for hg in g.histories() {
            let mut events = Vec::with_capacity(hf.len());
            for (ef, eg) in hf.events().iter().zip(hg.events()) {
                let p = product_projector(ef.projector(), eg.projector())?;
                if p.is_zero() {
                    continue 'pairs;
                }
                events.push(Event::new(ef.time_index(), p));
            }
            let h = History::new(events)?;
            if !histories.iter().any(|o| o.labels() == h.labels()) {
                histories.push(h);
            }
        }
    }

    let refined = f
        .with_histories(histories)?
        .named(format!("{}&{}", f.name(), g.name()));
    let report = check_consistency(&refined);
    if !report.consistent {
        return Err(Error::IncompatibleFrameworks(
            Incompatibility::Inconsistent {
                violating_pairs: report.violating_pairs.len(),
            },
        ));
    }
    Ok(refined)
}
