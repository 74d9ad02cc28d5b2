//! Singlet correlations, the CHSH combination, the deterministic local bound,
//! and factorization checks for finite hidden-variable models.
//!
//! CHSH stands in for "the Bell inequality": `S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)`.

use crate::dynamics::{Schedule, TimeGrid};
use crate::error::{Error, Result};
use crate::histories::{Event, Family, History};
use crate::linalg::Projector;
use crate::spin::{singlet, subsystem_projector, Direction, Sign, Subsystem};

pub const EPS_BELL: f64 = 1e-9;

/// Outcome order used by every joint table: `(+,+), (+,−), (−,+), (−,−)`.
pub const OUTCOMES: [(Sign, Sign); 4] = [
    (Sign::Plus, Sign::Plus),
    (Sign::Plus, Sign::Minus),
    (Sign::Minus, Sign::Plus),
    (Sign::Minus, Sign::Minus),
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub a: Direction,
    pub b: Direction,
}

impl Settings {
    pub fn new(a: Direction, b: Direction) -> Self {
        Self { a, b }
    }
}

/// Closed-form singlet joint probabilities in [`OUTCOMES`] order:
/// `P(+,+) = P(−,−) = ½ sin²(θ/2)`, `P(+,−) = P(−,+) = ½ cos²(θ/2)`.
pub fn singlet_joint(s: Settings) -> [f64; 4] {
    let half = s.a.angle_to(&s.b) / 2.0;
    let same = 0.5 * half.sin().powi(2);
    let diff = 0.5 * half.cos().powi(2);
    [same, diff, diff, same]
}

/// `E = P(+,+) + P(−,−) − P(+,−) − P(−,+)`.
pub fn correlation_from_joint(joint: &[f64; 4]) -> f64 {
    joint[0] + joint[3] - joint[1] - joint[2]
}

/// Singlet correlation, `−cos θ_ab`.
pub fn correlation(s: Settings) -> f64 {
    correlation_from_joint(&singlet_joint(s))
}

pub fn chsh_from<F: Fn(Direction, Direction) -> f64>(
    e: F,
    a: Direction,
    a2: Direction,
    b: Direction,
    b2: Direction,
) -> f64 {
    e(a, b) - e(a, b2) + e(a2, b) + e(a2, b2)
}

/// Quantum CHSH value for the singlet.
pub fn chsh(a: Direction, a2: Direction, b: Direction, b2: Direction) -> f64 {
    chsh_from(|x, y| correlation(Settings::new(x, y)), a, a2, b, b2)
}

/// Largest `|S|` over the 16 deterministic assignments of ±1 outcomes to the
/// four settings.
pub fn lhv_classical_bound() -> f64 {
    deterministic_strategies()
        .map(|[a, a2, b, b2]| (a * b - a * b2 + a2 * b + a2 * b2).abs())
        .fold(0.0, f64::max)
}

/// All ±1 assignments `[A(a), A(a′), B(b), B(b′)]`.
pub fn deterministic_strategies() -> impl Iterator<Item = [f64; 4]> {
    (0..16u8).map(|bits| {
        let s = |k: u8| if bits & (1 << k) == 0 { 1.0 } else { -1.0 };
        [s(0), s(1), s(2), s(3)]
    })
}

/// Two-time family on the singlet: one history per outcome pair of
/// `S_w^A` and `S_v^B` at `t1`, ordered `(+,+), (−,+), (+,−), (−,−)`.
pub fn singlet_pair_family(w: Direction, v: Direction) -> Result<Family> {
    let mut histories = Vec::with_capacity(4);
    for sb in Sign::BOTH {
        for sa in Sign::BOTH {
            let pa = subsystem_projector(w, sa, Subsystem::A);
            let pb = subsystem_projector(v, sb, Subsystem::B);
            let label = format!(
                "{}A1{} {}B1{}",
                w.label(),
                sa.symbol(),
                v.label(),
                sb.symbol()
            );
            let p = Projector::new(pa.op().mul(pb.op())?, label)?;
            histories.push(History::new(vec![Event::new(1, p)])?);
        }
    }
    Ok(Family::new(
        singlet(),
        TimeGrid::uniform(1),
        Schedule::free(4),
        histories,
    )?
    .named("singlet-pair"))
}

/// Joint table from the chain-ket engine, in [`OUTCOMES`] order.
pub fn singlet_joint_from_histories(s: Settings) -> Result<[f64; 4]> {
    let f = singlet_pair_family(s.a, s.b)?;
    let r = crate::histories::check_consistency(&f);
    if !r.consistent {
        return Err(Error::QueryOnInconsistentFamily {
            family: f.name().to_string(),
        });
    }
    let p = &r.probabilities;
    // family order (+,+), (−,+), (+,−), (−,−)
    Ok([p[0], p[2], p[1], p[3]])
}

/// One side's response: `[P(+), P(−)]` per setting, or one distribution for
/// every setting.
#[derive(Clone, Debug, PartialEq)]
pub enum Response {
    Constant([f64; 2]),
    PerSetting(Vec<(Direction, [f64; 2])>),
}

impl Response {
    pub fn new(entries: Vec<(Direction, [f64; 2])>) -> Result<Self> {
        for (d, dist) in &entries {
            check_distribution(dist).map_err(|e| Error::MalformedModel(format!("at {d}: {e}")))?;
        }
        Ok(Response::PerSetting(entries))
    }

    /// The same outcome for every direction.
    pub fn constant(sign: Sign) -> Self {
        Response::Constant(deterministic(sign))
    }

    pub fn distribution(&self, d: Direction) -> Option<[f64; 2]> {
        match self {
            Response::Constant(dist) => Some(*dist),
            Response::PerSetting(entries) => entries
                .iter()
                .find(|(k, _)| k.approx_eq(&d, 1e-12))
                .map(|(_, dist)| *dist),
        }
    }

    /// `P(+) − P(−)`.
    pub fn mean(&self, d: Direction) -> Option<f64> {
        self.distribution(d).map(|p| p[0] - p[1])
    }

    fn validate(&self) -> Result<()> {
        match self {
            Response::Constant(dist) => check_distribution(dist).map_err(Error::MalformedModel),
            Response::PerSetting(entries) => entries.iter().try_for_each(|(d, dist)| {
                check_distribution(dist).map_err(|e| Error::MalformedModel(format!("at {d}: {e}")))
            }),
        }
    }
}

fn check_distribution(dist: &[f64; 2]) -> Result<(), String> {
    let ok = dist.iter().all(|p| p.is_finite() && *p >= 0.0)
        && (dist[0] + dist[1] - 1.0).abs() <= EPS_BELL;
    if ok {
        Ok(())
    } else {
        Err(format!("not a distribution: {dist:?}"))
    }
}

pub fn deterministic(sign: Sign) -> [f64; 2] {
    match sign {
        Sign::Plus => [1.0, 0.0],
        Sign::Minus => [0.0, 1.0],
    }
}

/// Finite hidden-variable model: each term factorizes by construction into
/// independent A and B responses.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaModel {
    terms: Vec<(f64, Response, Response)>,
}

impl LambdaModel {
    pub fn new(terms: Vec<(f64, Response, Response)>) -> Result<Self> {
        if terms.iter().any(|(w, _, _)| !w.is_finite() || *w < 0.0) {
            return Err(Error::MalformedModel(
                "negative or non-finite weight".into(),
            ));
        }
        for (_, ra, rb) in &terms {
            ra.validate()?;
            rb.validate()?;
        }
        let total: f64 = terms.iter().map(|(w, _, _)| w).sum();
        if (total - 1.0).abs() > EPS_BELL {
            return Err(Error::MalformedModel(format!("weights sum to {total}")));
        }
        Ok(Self { terms })
    }

    /// Mixture of deterministic strategies `[A(a), A(a′), B(b), B(b′)]` with
    /// the given weights.
    pub fn from_strategies(
        settings: [Direction; 4],
        strategies: &[([f64; 4], f64)],
    ) -> Result<Self> {
        let sign = |v: f64| if v > 0.0 { Sign::Plus } else { Sign::Minus };
        let terms = strategies
            .iter()
            .map(|&(s, w)| {
                let ra = Response::new(vec![
                    (settings[0], deterministic(sign(s[0]))),
                    (settings[1], deterministic(sign(s[1]))),
                ])?;
                let rb = Response::new(vec![
                    (settings[2], deterministic(sign(s[2]))),
                    (settings[3], deterministic(sign(s[3]))),
                ])?;
                Ok((w, ra, rb))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    pub fn terms(&self) -> &[(f64, Response, Response)] {
        &self.terms
    }

    /// `Σ_λ w_λ P(A|a,λ) P(B|b,λ)` in [`OUTCOMES`] order.
    pub fn joint(&self, s: Settings) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for (w, ra, rb) in &self.terms {
            let pa = ra
                .distribution(s.a)
                .ok_or_else(|| Error::MalformedModel(format!("no A response for {}", s.a)))?;
            let pb = rb
                .distribution(s.b)
                .ok_or_else(|| Error::MalformedModel(format!("no B response for {}", s.b)))?;
            for (k, (sa, sb)) in OUTCOMES.iter().enumerate() {
                out[k] += w * pa[idx(*sa)] * pb[idx(*sb)];
            }
        }
        Ok(out)
    }

    pub fn correlation(&self, s: Settings) -> Result<f64> {
        Ok(correlation_from_joint(&self.joint(s)?))
    }

    pub fn chsh(&self, a: Direction, a2: Direction, b: Direction, b2: Direction) -> Result<f64> {
        let e = |x, y| self.correlation(Settings::new(x, y));
        Ok(e(a, b)? - e(a, b2)? + e(a2, b)? + e(a2, b2)?)
    }
}

fn idx(s: Sign) -> usize {
    match s {
        Sign::Plus => 0,
        Sign::Minus => 1,
    }
}

/// Joint outcome distributions per setting pair.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorrelationTable {
    pub entries: Vec<(Settings, [f64; 4])>,
}

impl CorrelationTable {
    pub fn singlet(settings: &[Settings]) -> Self {
        Self {
            entries: settings.iter().map(|&s| (s, singlet_joint(s))).collect(),
        }
    }

    /// The four settings pairs of a CHSH experiment.
    pub fn singlet_chsh(a: Direction, a2: Direction, b: Direction, b2: Direction) -> Self {
        Self::singlet(&[
            Settings::new(a, b),
            Settings::new(a, b2),
            Settings::new(a2, b),
            Settings::new(a2, b2),
        ])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationCheck {
    pub factorizes: bool,
    pub max_deviation: f64,
}

/// Whether the model's λ-average reproduces every table entry within
/// [`EPS_BELL`].
pub fn check_factorization(
    m: &LambdaModel,
    table: &CorrelationTable,
) -> Result<FactorizationCheck> {
    let mut max_deviation: f64 = 0.0;
    for (s, row) in &table.entries {
        let predicted = m.joint(*s)?;
        for k in 0..4 {
            max_deviation = max_deviation.max((predicted[k] - row[k]).abs());
        }
    }
    Ok(FactorizationCheck {
        factorizes: max_deviation <= EPS_BELL,
        max_deviation,
    })
}

/// Two-term model: λ = (A +, B −) or (A −, B +), weight ½ each, for any setting.
pub fn bertlmann_socks() -> LambdaModel {
    LambdaModel::new(vec![
        (
            0.5,
            Response::constant(Sign::Plus),
            Response::constant(Sign::Minus),
        ),
        (
            0.5,
            Response::constant(Sign::Minus),
            Response::constant(Sign::Plus),
        ),
    ])
    .expect("valid weights")
}

/// Coplanar direction in the x–z plane at `degrees` from +z toward +x.
pub fn coplanar(degrees: f64) -> Direction {
    let r = degrees.to_radians();
    Direction::from_vector([r.sin(), 0.0, r.cos()]).expect("unit vector")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn singlet_joint_examples() {
        let z = Direction::z();
        let j = singlet_joint(Settings::new(z, z));
        assert!(j[0].abs() < 1e-15 && (j[1] - 0.5).abs() < 1e-15);
        let j = singlet_joint(Settings::new(z, Direction::x()));
        for p in j {
            assert!((p - 0.25).abs() < 1e-12);
        }
        let j = singlet_joint(Settings::new(z, z.opposite()));
        assert!((j[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn joint_agrees_with_chain_kets_on_axes() {
        for (a, b) in [
            (Direction::z(), Direction::z()),
            (Direction::z(), Direction::x()),
            (Direction::x(), Direction::y()),
            (Direction::z(), Direction::named("-z").unwrap()),
        ] {
            let s = Settings::new(a, b);
            let engine = singlet_joint_from_histories(s).unwrap();
            let closed = singlet_joint(s);
            for k in 0..4 {
                assert!((engine[k] - closed[k]).abs() < 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn correlation_examples() {
        let z = Direction::z();
        assert!((correlation(Settings::new(z, z)) + 1.0).abs() < 1e-12);
        assert!(correlation(Settings::new(z, Direction::x())).abs() < 1e-12);
        let e = correlation(Settings::new(coplanar(0.0), coplanar(45.0)));
        assert!((e + 1.0 / SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn chsh_examples() {
        let s = chsh(
            coplanar(0.0),
            coplanar(90.0),
            coplanar(45.0),
            coplanar(135.0),
        );
        assert!((s.abs() - 2.0 * SQRT_2).abs() < 1e-9);
        let z = Direction::z();
        assert!((chsh(z, z, z, z).abs() - 2.0).abs() < 1e-12);
        let (a, b) = (coplanar(10.0), coplanar(70.0));
        let s = chsh(a, a, b, b);
        assert!((s - 2.0 * correlation(Settings::new(a, b))).abs() < 1e-12);
    }

    #[test]
    fn deterministic_bound_is_two() {
        assert_eq!(deterministic_strategies().count(), 16);
        assert_eq!(lhv_classical_bound(), 2.0);
    }

    #[test]
    fn socks_reproduce_same_axis_table() {
        let z = Direction::z();
        let table = CorrelationTable::singlet(&[Settings::new(z, z)]);
        let r = check_factorization(&bertlmann_socks(), &table).unwrap();
        assert!(r.factorizes, "{r:?}");
        let empty = CorrelationTable::default();
        assert!(
            check_factorization(&bertlmann_socks(), &empty)
                .unwrap()
                .factorizes
        );
    }

    #[test]
    fn malformed_models_rejected() {
        assert!(LambdaModel::new(vec![(
            0.4,
            Response::constant(Sign::Plus),
            Response::constant(Sign::Plus)
        )])
        .is_err());
        assert!(Response::new(vec![(Direction::z(), [0.7, 0.7])]).is_err());
        let m = LambdaModel::new(vec![(
            1.0,
            Response::new(vec![(Direction::z(), [1.0, 0.0])]).unwrap(),
            Response::constant(Sign::Plus),
        )])
        .unwrap();
        let t = CorrelationTable::singlet(&[Settings::new(Direction::x(), Direction::z())]);
        assert!(matches!(
            check_factorization(&m, &t),
            Err(Error::MalformedModel(_))
        ));
    }
}
