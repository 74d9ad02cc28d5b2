//! Piecewise-constant Hamiltonian schedules and Heisenberg-picture projectors.
//!
//! Units: ħ = 1, times and couplings are plain numbers. Any stretch of time not
//! covered by a segment evolves freely.

use crate::error::{Error, Result};
use crate::linalg::{unitary_exp, Operator, Projector, EPS_OP};

/// Strictly increasing event times `t0 < t1 < … < tn`; `t0` carries the
/// initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidTimeGrid("no times".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidTimeGrid("non-finite time".into()));
        }
        if let Some(w) = times.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTimeGrid(format!(
                "times not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self { times })
    }

    /// Evenly spaced grid `0, 1, …, n`.
    pub fn uniform(n: usize) -> Self {
        Self {
            times: (0..=n).map(|k| k as f64).collect(),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn t0(&self) -> f64 {
        self.times[0]
    }

    /// Time `t_k`; `k = 0` is the preparation time.
    pub fn time(&self, k: usize) -> Option<f64> {
        self.times.get(k).copied()
    }

    /// Number of event times after `t0`.
    pub fn event_count(&self) -> usize {
        self.times.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub hamiltonian: Operator,
}

/// Time-ordered, non-overlapping Hamiltonian segments on `[start, end)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    dim: usize,
    segments: Vec<Segment>,
}

impl Schedule {
    /// Free evolution on a `dim`-dimensional space.
    pub fn free(dim: usize) -> Self {
        Self {
            dim,
            segments: Vec::new(),
        }
    }

    pub fn new(dim: usize, mut segments: Vec<Segment>) -> Result<Self> {
        for s in &segments {
            if !(s.start.is_finite() && s.end.is_finite()) || s.start >= s.end {
                return Err(Error::InvalidInterval {
                    from: s.start,
                    to: s.end,
                });
            }
            if s.hamiltonian.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.hamiltonian.dim(),
                });
            }
            let deviation = s.hamiltonian.max_abs_diff(&s.hamiltonian.adjoint())?;
            if deviation > EPS_OP {
                return Err(Error::NotSelfAdjoint { deviation });
            }
        }
        segments.sort_by(|a, b| a.start.total_cmp(&b.start));
        if let Some(w) = segments.windows(2).find(|w| w[1].start < w[0].end) {
            return Err(Error::OverlappingSegments(
                w[0].start, w[0].end, w[1].start, w[1].end,
            ));
        }
        Ok(Self { dim, segments })
    }

    /// A single constant Hamiltonian on `[start, end)`.
    pub fn constant(hamiltonian: Operator, start: f64, end: f64) -> Result<Self> {
        let dim = hamiltonian.dim();
        Self::new(
            dim,
            vec![Segment {
                start,
                end,
                hamiltonian,
            }],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_free(&self) -> bool {
        self.segments.is_empty()
    }
}

/// `U(t_b ← t_a)`, the ordered product of segment exponentials; identity for
/// `t_a = t_b`.
pub fn propagator(s: &Schedule, t_a: f64, t_b: f64) -> Result<Operator> {
    if !(t_a.is_finite() && t_b.is_finite()) || t_a > t_b {
        return Err(Error::InvalidInterval { from: t_a, to: t_b });
    }
    let mut u = Operator::identity(s.dim);
    for seg in &s.segments {
        let lo = seg.start.max(t_a);
        let hi = seg.end.min(t_b);
        if hi > lo {
            // later segments act after earlier ones
            u = unitary_exp(&seg.hamiltonian, hi - lo)?.mul(&u)?;
        }
    }
    Ok(u)
}

/// `U(t_k ← t_0)† P U(t_k ← t_0)`, relabelled with the original label.
pub fn heisenberg_projector(p: &Projector, s: &Schedule, t0: f64, tk: f64) -> Result<Projector> {
    if s.is_free() {
        if p.dim() != s.dim {
            return Err(Error::DimensionMismatch {
                expected: s.dim,
                found: p.dim(),
            });
        }
        return Ok(p.clone());
    }
    let u = propagator(s, t0, tk)?;
    let op = u.adjoint().mul(p.op())?.mul(&u)?;
    Projector::new(op, p.label())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::spin::{spin_ket, spin_operator, spin_projector, Direction, Sign};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![]).is_err());
        assert!(TimeGrid::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(TimeGrid::new(vec![0.0, f64::INFINITY]).is_err());
        let g = TimeGrid::new(vec![0.0, 0.5, 2.0]).unwrap();
        assert_eq!(g.event_count(), 2);
        assert_eq!(TimeGrid::uniform(2).times(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn free_schedule_is_identity() {
        let s = Schedule::free(4);
        assert_eq!(propagator(&s, 0.3, 9.0).unwrap(), Operator::identity(4));
        assert_eq!(propagator(&s, 1.0, 1.0).unwrap(), Operator::identity(4));
        assert!(propagator(&s, 2.0, 1.0).is_err());
    }

    #[test]
    fn quarter_turn_about_y_maps_z_up_to_x_up() {
        let omega = 2.0;
        let h = spin_operator(Direction::y()).scale(c(omega, 0.0));
        let s = Schedule::constant(h, 0.0, 10.0).unwrap();
        let u = propagator(&s, 1.0, 1.0 + FRAC_PI_2 / omega).unwrap();
        let out = u.apply(&spin_ket(Direction::z(), Sign::Plus)).unwrap();
        assert!(out
            .same_ray(&spin_ket(Direction::x(), Sign::Plus), 1e-12)
            .unwrap());
    }

    #[test]
    fn overlapping_and_mismatched_segments_rejected() {
        let h = spin_operator(Direction::x());
        let segs = vec![
            Segment {
                start: 0.0,
                end: 2.0,
                hamiltonian: h.clone(),
            },
            Segment {
                start: 1.0,
                end: 3.0,
                hamiltonian: h.clone(),
            },
        ];
        assert!(matches!(
            Schedule::new(2, segs),
            Err(Error::OverlappingSegments(..))
        ));
        let segs = vec![Segment {
            start: 0.0,
            end: 1.0,
            hamiltonian: h,
        }];
        assert!(matches!(
            Schedule::new(4, segs),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gaps_between_segments_are_free() {
        let hx = spin_operator(Direction::x());
        let hz = spin_operator(Direction::z()).scale(c(0.7, 0.0));
        let s = Schedule::new(
            2,
            vec![
                Segment {
                    start: 2.0,
                    end: 3.0,
                    hamiltonian: hz.clone(),
                },
                Segment {
                    start: 0.0,
                    end: 1.0,
                    hamiltonian: hx.clone(),
                },
            ],
        )
        .unwrap();
        let u = propagator(&s, 0.5, 2.5).unwrap();
        let expected = unitary_exp(&hz, 0.5)
            .unwrap()
            .mul(&unitary_exp(&hx, 0.5).unwrap())
            .unwrap();
        assert!(u.max_abs_diff(&expected).unwrap() < 1e-13);
    }

    #[test]
    fn heisenberg_examples() {
        let px = spin_projector(Direction::x(), Sign::Plus);
        let free = Schedule::free(2);
        assert_eq!(heisenberg_projector(&px, &free, 0.0, 5.0).unwrap(), px);

        let h = spin_operator(Direction::y()).scale(c(FRAC_PI_2, 0.0));
        let s = Schedule::constant(h, 0.0, 1.0).unwrap();
        let hp = heisenberg_projector(&px, &s, 0.0, 1.0).unwrap();
        let pz = spin_projector(Direction::z(), Sign::Plus);
        assert!(hp.op().max_abs_diff(pz.op()).unwrap() < EPS_OP);
        assert_eq!(hp.label(), "x+");
    }
}
