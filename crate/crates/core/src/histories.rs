//! Histories as projector sequences on a time grid, chain kets, the history
//! inner product and the consistency conditions that turn a family of
//! histories into a framework with Born-rule probabilities.
//!
//! A family starts from a pure state `|ψ0>` at `t0`; history `k` carries one
//! event projector per later grid time (identity allowed). Its chain ket is
//! `P̂(α_n)···P̂(α_1)|ψ0>` with Heisenberg-picture projectors, and its weight is
//! the squared norm of that ket.
//!
//! History numbers in reports are 1-based: the first history is `1`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{heisenberg_projector, propagator, Schedule, TimeGrid};
use crate::error::{Error, Result};
use crate::linalg::{inner, projector_onto, Operator, Projector, StateVector, EPS_CONS, EPS_OP};

/// A property at grid time `t_{time_index}` (`time_index ≥ 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    time_index: usize,
    projector: Projector,
}

impl Event {
    pub fn new(time_index: usize, projector: Projector) -> Self {
        Self {
            time_index,
            projector,
        }
    }

    pub fn identity(time_index: usize, dim: usize) -> Self {
        Self::new(time_index, Projector::identity(dim))
    }

    pub fn time_index(&self) -> usize {
        self.time_index
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    pub fn label(&self) -> &str {
        self.projector.label()
    }
}

/// One event per grid time `t1 … tn`, in time order.
#[derive(Clone, Debug, PartialEq)]
pub struct History {
    events: Vec<Event>,
}

impl History {
    pub fn new(events: Vec<Event>) -> Result<Self> {
        for (j, e) in events.iter().enumerate() {
            if e.time_index != j + 1 {
                return Err(Error::MalformedFamily(format!(
                    "event `{}` has time index {} at position {}",
                    e.label(),
                    e.time_index,
                    j + 1
                )));
            }
        }
        Ok(Self { events })
    }

    /// Assigns time indices `1, 2, …` in order.
    pub fn from_projectors(projectors: Vec<Projector>) -> Self {
        Self {
            events: projectors
                .into_iter()
                .enumerate()
                .map(|(j, p)| Event::new(j + 1, p))
                .collect(),
        }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.events.iter().map(Event::label).collect()
    }

    /// Labels joined by single spaces; identity events render as `1`.
    pub fn label_string(&self) -> String {
        self.labels().join(" ")
    }

    /// Event at grid time `t_k`, `k ≥ 1`.
    pub fn event_at(&self, time_index: usize) -> Option<&Event> {
        time_index.checked_sub(1).and_then(|j| self.events.get(j))
    }
}

/// A candidate framework: initial state, shared grid and dynamics, histories.
#[derive(Clone, Debug)]
pub struct Family {
    name: String,
    initial_state: StateVector,
    grid: TimeGrid,
    schedule: Schedule,
    histories: Vec<History>,
    /// `U(t_k ← t_0)` for every grid index.
    propagators: Vec<Operator>,
}

impl PartialEq for Family {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.initial_state == other.initial_state
            && self.grid == other.grid
            && self.schedule == other.schedule
            && self.histories == other.histories
    }
}

impl Family {
    pub fn new(
        initial_state: StateVector,
        grid: TimeGrid,
        schedule: Schedule,
        histories: Vec<History>,
    ) -> Result<Self> {
        initial_state.require_normalized()?;
        let dim = initial_state.dim();
        if schedule.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: schedule.dim(),
            });
        }
        let n = grid.event_count();
        for (k, h) in histories.iter().enumerate() {
            if h.len() != n {
                return Err(Error::MalformedFamily(format!(
                    "history {} has {} events, grid has {} event times",
                    k + 1,
                    h.len(),
                    n
                )));
            }
            for e in h.events() {
                if e.projector.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: e.projector.dim(),
                    });
                }
            }
        }
        let t0 = grid.t0();
        let propagators = grid
            .times()
            .iter()
            .map(|&t| propagator(&schedule, t0, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: "family".to_string(),
            initial_state,
            grid,
            schedule,
            histories,
            propagators,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.initial_state
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn histories(&self) -> &[History] {
        &self.histories
    }

    pub fn dim(&self) -> usize {
        self.initial_state.dim()
    }

    /// History by 1-based number.
    pub fn history(&self, number: usize) -> Option<&History> {
        number.checked_sub(1).and_then(|k| self.histories.get(k))
    }

    /// `P̂(t_k) = U(t_k ← t_0)† P U(t_k ← t_0)`.
    pub fn heisenberg(&self, event: &Event) -> Result<Operator> {
        let u = self
            .propagators
            .get(event.time_index)
            .filter(|_| event.time_index >= 1)
            .ok_or_else(|| {
                Error::MalformedFamily(format!("time index {} outside grid", event.time_index))
            })?;
        if self.schedule.is_free() {
            return Ok(event.projector.op().clone());
        }
        u.adjoint().mul(event.projector.op())?.mul(u)
    }

    /// The state `U(t_k ← t_0)|ψ0>`.
    pub fn evolved_state(&self, time_index: usize) -> Result<StateVector> {
        let u = self.propagators.get(time_index).ok_or_else(|| {
            Error::MalformedFamily(format!("time index {time_index} outside grid"))
        })?;
        u.apply(&self.initial_state)
    }

    fn check_member(&self, h: &History) -> Result<()> {
        if h.len() != self.grid.event_count() {
            return Err(Error::MalformedFamily(format!(
                "history has {} events, grid has {} event times",
                h.len(),
                self.grid.event_count()
            )));
        }
        Ok(())
    }

    fn chain_kets(&self) -> Result<Vec<StateVector>> {
        self.histories.iter().map(|h| chain_ket(h, self)).collect()
    }

    /// Same family with the events at `time_index` replaced by the identity,
    /// merging histories that become identical (by label sequence).
    pub fn coarse_grained(&self, time_index: usize) -> Result<Family> {
        if time_index == 0 || time_index > self.grid.event_count() {
            return Err(Error::MalformedFamily(format!(
                "time index {time_index} outside grid"
            )));
        }
        let dim = self.dim();
        let mut out: Vec<History> = Vec::new();
        for h in &self.histories {
            let mut events = h.events.clone();
            events[time_index - 1] = Event::identity(time_index, dim);
            let candidate = History { events };
            if !out.iter().any(|o| o.labels() == candidate.labels()) {
                out.push(candidate);
            }
        }
        Ok(Family {
            histories: out,
            ..self.clone()
        })
    }

    /// Same initial state, grid and dynamics with different histories.
    pub fn with_histories(&self, histories: Vec<History>) -> Result<Family> {
        Ok(Family::new(
            self.initial_state.clone(),
            self.grid.clone(),
            self.schedule.clone(),
            histories,
        )?
        .named(self.name.clone()))
    }
}

/// `|α> = P̂(α_n)···P̂(α_1)|ψ0>`; may be unnormalized or zero.
pub fn chain_ket(h: &History, f: &Family) -> Result<StateVector> {
    f.check_member(h)?;
    let mut ket = f.initial_state.clone();
    for e in &h.events {
        ket = f.heisenberg(e)?.apply(&ket)?;
    }
    Ok(ket)
}

/// `<α|β>` of the two histories' chain kets.
pub fn history_overlap(h1: &History, h2: &History, f: &Family) -> Result<Complex64> {
    inner(&chain_ket(h1, f)?, &chain_ket(h2, f)?)
}

/// Born-rule weight `<α|α>`, refused unless the family is consistent.
pub fn history_probability(h: &History, f: &Family) -> Result<f64> {
    history_probability_with_tol(h, f, EPS_CONS)
}

/// [`history_probability`] with a custom consistency tolerance.
pub fn history_probability_with_tol(h: &History, f: &Family, tol: f64) -> Result<f64> {
    require_consistent(f, tol)?;
    Ok(chain_ket(h, f)?.norm_sqr())
}

pub(crate) fn require_consistent(f: &Family, tol: f64) -> Result<ConsistencyReport> {
    let report = check_consistency_with_tol(f, tol);
    if !report.consistent {
        return Err(Error::QueryOnInconsistentFamily {
            family: f.name.clone(),
        });
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViolatingPair {
    /// 1-based history numbers, `i < j`.
    pub i: usize,
    pub j: usize,
    pub overlap: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub exhaustive: bool,
    /// First failure found by the exhaustiveness test, if any.
    pub exhaustiveness_issue: Option<String>,
    pub violating_pairs: Vec<ViolatingPair>,
    /// Chain-ket weights `<α|α>` in history order.
    pub probabilities: Vec<f64>,
    pub probability_sum: f64,
}

pub fn check_consistency(f: &Family) -> ConsistencyReport {
    check_consistency_with_tol(f, EPS_CONS)
}

/// Consistency with a custom overlap tolerance (`εcons`).
pub fn check_consistency_with_tol(f: &Family, tol: f64) -> ConsistencyReport {
    let kets = match f.chain_kets() {
        Ok(k) => k,
        Err(e) => {
            return ConsistencyReport {
                consistent: false,
                exhaustive: false,
                exhaustiveness_issue: Some(e.to_string()),
                violating_pairs: Vec::new(),
                probabilities: Vec::new(),
                probability_sum: 0.0,
            }
        }
    };
    let exhaustiveness_issue = exhaustiveness(f).err();
    let exhaustive = exhaustiveness_issue.is_none();

    let mut violating_pairs = Vec::new();
    for i in 0..kets.len() {
        for j in i + 1..kets.len() {
            let overlap = inner(&kets[i], &kets[j]).expect("same dimension");
            if overlap.norm() > tol {
                violating_pairs.push(ViolatingPair {
                    i: i + 1,
                    j: j + 1,
                    overlap,
                });
            }
        }
    }
    let probabilities: Vec<f64> = kets.iter().map(StateVector::norm_sqr).collect();
    let probability_sum = probabilities.iter().sum();
    ConsistencyReport {
        consistent: exhaustive && violating_pairs.is_empty(),
        exhaustive,
        exhaustiveness_issue,
        violating_pairs,
        probabilities,
        probability_sum,
    }
}

/// Branch-tree test: histories sharing an event prefix form a node whose
/// children (distinct next-event labels) must be mutually orthogonal and
/// resolve the node's chain ket, `Σ P̂_child |α_prefix> = |α_prefix>`.
/// Histories with identical label sequences are counted twice and fail.
fn exhaustiveness(f: &Family) -> Result<(), String> {
    if f.histories.is_empty() {
        return Err("family has no histories".into());
    }
    let all: Vec<&History> = f.histories.iter().collect();
    check_branch(f, &all, 0, &f.initial_state)
}

fn check_branch(
    f: &Family,
    group: &[&History],
    depth: usize,
    ket: &StateVector,
) -> Result<(), String> {
    if depth == f.grid.event_count() {
        if group.len() > 1 {
            return Err(format!(
                "history `{}` appears {} times",
                group[0].label_string(),
                group.len()
            ));
        }
        return Ok(());
    }
    let mut children: Vec<(&Event, Vec<&History>)> = Vec::new();
    for h in group {
        let e = &h.events[depth];
        match children.iter_mut().find(|(c, _)| c.label() == e.label()) {
            Some((c, members)) => {
                let diff = c
                    .projector
                    .op()
                    .max_abs_diff(e.projector.op())
                    .map_err(|err| err.to_string())?;
                if diff > EPS_OP {
                    return Err(format!(
                        "label `{}` names two different projectors at time index {}",
                        e.label(),
                        depth + 1
                    ));
                }
                members.push(h);
            }
            None => children.push((e, vec![h])),
        }
    }
    for a in 0..children.len() {
        for b in a + 1..children.len() {
            let (pa, pb) = (children[a].0.projector.op(), children[b].0.projector.op());
            let prod = pa.mul(pb).map_err(|e| e.to_string())?.max_abs();
            if prod > EPS_OP {
                return Err(format!(
                    "`{}` and `{}` at time index {} are not exclusive",
                    children[a].0.label(),
                    children[b].0.label(),
                    depth + 1
                ));
            }
        }
    }
    let mut resolved = StateVector::zeros(ket.dim());
    let mut child_kets = Vec::with_capacity(children.len());
    for (e, _) in &children {
        let k = f
            .heisenberg(e)
            .and_then(|p| p.apply(ket))
            .map_err(|err| err.to_string())?;
        resolved = resolved.add(&k).expect("same dimension");
        child_kets.push(k);
    }
    let residual = ket.sub(&resolved).expect("same dimension").norm();
    if residual > EPS_OP {
        let labels: Vec<&str> = children.iter().map(|(e, _)| e.label()).collect();
        return Err(format!(
            "events {{{}}} at time index {} miss a part of the state of weight {:.3e}",
            labels.join(", "),
            depth + 1,
            residual * residual
        ));
    }
    for ((_, members), k) in children.iter().zip(&child_kets) {
        check_branch(f, members, depth + 1, k)?;
    }
    Ok(())
}

/// Gram matrix `G_ij = <α_i|α_j>` of the family's chain kets.
pub fn gram_matrix(f: &Family) -> Result<Vec<Vec<Complex64>>> {
    let kets = f.chain_kets()?;
    Ok(kets
        .iter()
        .map(|a| {
            kets.iter()
                .map(|b| inner(a, b).expect("same dim"))
                .collect()
        })
        .collect())
}

/// Smallest eigenvalue of the chain-ket Gram matrix (PSD check).
pub fn gram_min_eigenvalue(f: &Family) -> Result<f64> {
    let g = gram_matrix(f)?;
    let m = g.len();
    if m == 0 {
        return Ok(0.0);
    }
    let mat = DMatrix::from_fn(m, m, |i, j| g[i][j]);
    let ev = Operator::from_rows(m, mat.transpose().as_slice())?.hermitian_eigenvalues()?;
    Ok(ev[0])
}

fn unitary_projectors(f_probe: &Family) -> Result<Vec<Projector>> {
    (1..=f_probe.grid.event_count())
        .map(|j| projector_onto(&f_probe.evolved_state(j)?, format!("psi{j}")))
        .collect()
}

/// The single history `[ψ1] ⊙ … ⊙ [ψn]` following the unitarily evolved state.
pub fn unitary_family(psi0: &StateVector, grid: &TimeGrid, s: &Schedule) -> Result<Family> {
    let probe = Family::new(psi0.clone(), grid.clone(), s.clone(), Vec::new())?;
    let history = History::from_projectors(unitary_projectors(&probe)?);
    probe
        .with_histories(vec![history])
        .map(|f| f.named("unitary"))
}

/// Histories `[ψ1] ⊙ … ⊙ [ψ_{n-1}] ⊙ [A_k]`, one per basis vector of the
/// measured observable; final events labelled `A<k>`.
pub fn collapse_family(
    psi0: &StateVector,
    grid: &TimeGrid,
    s: &Schedule,
    observable_basis: &[StateVector],
) -> Result<Family> {
    let labelled: Vec<(String, StateVector)> = observable_basis
        .iter()
        .enumerate()
        .map(|(k, v)| (format!("A{}", k + 1), v.clone()))
        .collect();
    collapse_family_labeled(psi0, grid, s, &labelled)
}

/// [`collapse_family`] with caller-chosen labels for the final events.
pub fn collapse_family_labeled(
    psi0: &StateVector,
    grid: &TimeGrid,
    s: &Schedule,
    observable_basis: &[(String, StateVector)],
) -> Result<Family> {
    let dim = psi0.dim();
    if observable_basis.len() != dim {
        return Err(Error::IncompleteBasis(format!(
            "{} vectors for dimension {dim}",
            observable_basis.len()
        )));
    }
    for (a, (la, va)) in observable_basis.iter().enumerate() {
        if va.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: va.dim(),
            });
        }
        for (lb, vb) in &observable_basis[a..] {
            let expected = if la == lb { 1.0 } else { 0.0 };
            let g = inner(va, vb)?;
            if (g - Complex64::new(expected, 0.0)).norm() > EPS_OP {
                return Err(Error::IncompleteBasis(format!(
                    "<{la}|{lb}> = {g}, expected {expected}"
                )));
            }
        }
    }
    let n = grid.event_count();
    if n == 0 {
        return Err(Error::InvalidTimeGrid(
            "collapse family needs at least one event time".into(),
        ));
    }
    let probe = Family::new(psi0.clone(), grid.clone(), s.clone(), Vec::new())?;
    let mut prefix = unitary_projectors(&probe)?;
    prefix.pop();
    let histories = observable_basis
        .iter()
        .map(|(label, v)| {
            let mut ps = prefix.clone();
            ps.push(projector_onto(v, label.clone())?);
            Ok(History::from_projectors(ps))
        })
        .collect::<Result<Vec<_>>>()?;
    probe.with_histories(histories).map(|f| f.named("collapse"))
}

/// Builds the Heisenberg projector of `p` at `tk` for a family's dynamics.
pub fn heisenberg_in(f: &Family, p: &Projector, time_index: usize) -> Result<Projector> {
    let tk = f
        .grid
        .time(time_index)
        .ok_or_else(|| Error::MalformedFamily(format!("time index {time_index} outside grid")))?;
    heisenberg_projector(p, &f.schedule, f.grid.t0(), tk)
}
