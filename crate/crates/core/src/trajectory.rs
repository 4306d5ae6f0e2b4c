//! Orbits `θₙ = gⁿ(θ)` with their interval factors `δₙ = 1 − E(a₁(θₙ))·θₙ`.

use serde::Serialize;

use crate::cf::{parity_floor, CFExpansion, Cursor};
use crate::error::Result;
use crate::exact::ExactReal;

#[derive(Clone, Debug, PartialEq)]
pub struct GapStep {
    pub cf: CFExpansion,
    pub a1: u64,
    /// `E(a₁)`.
    pub e: u64,
    pub delta: ExactReal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapTrajectory {
    pub theta0: CFExpansion,
    pub entries: Vec<GapStep>,
}

/// The first `n + 1` points `θ₀, …, θₙ` of the gap-map orbit.
///
/// Finite expansions fail with [`crate::Error::Exhausted`] as soon as a step
/// would need a quotient that does not exist; the error carries the step.
pub fn gap_trajectory(theta: &CFExpansion, n: usize) -> Result<GapTrajectory> {
    let mut entries = Vec::with_capacity(n + 1);
    let mut cursor = Cursor::new(theta);
    for i in 0..=n {
        if i > 0 {
            cursor.gap_step()?;
        }
        let cf = cursor.materialize()?;
        let a1 = cf.a1();
        let e = parity_floor(a1);
        let delta = ExactReal::one() - ExactReal::from_integer(e) * cf.value();
        entries.push(GapStep { cf, a1, e, delta });
    }
    Ok(GapTrajectory {
        theta0: theta.clone(),
        entries,
    })
}

impl GapTrajectory {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `δ₀·δ₁⋯δ_{n−1}`, the length of the level-`n` return interval.
    pub fn delta_product(&self, n: usize) -> ExactReal {
        self.entries[..n].iter().fold(ExactReal::one(), |acc, s| acc * &s.delta)
    }

    /// `|log(δ₀⋯δ_{n−1})| / n` computed from the exact product.
    pub fn decay_rate(&self, n: usize) -> f64 {
        self.delta_product(n).ln_abs().abs() / n as f64
    }
}

/// The leading quotients `(a₁, a₂, a₃)` of `θ₀, …, θ_{n−1}`, which is all the
/// substitution and matrix machinery needs. Missing `a₂`/`a₃` are reported as
/// `None`; O(1) per step regardless of expansion length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LeadingQuotients {
    pub a1: u64,
    pub a2: Option<u64>,
    pub a3: Option<u64>,
}

/// Streams `(a₁, a₂, a₃)` of successive `gⁿ(θ)`.
pub struct GapOrbit<'a> {
    cursor: Cursor<'a>,
    started: bool,
    failed: bool,
}

impl<'a> GapOrbit<'a> {
    pub fn new(theta: &'a CFExpansion) -> Self {
        GapOrbit {
            cursor: Cursor::new(theta),
            started: false,
            failed: false,
        }
    }
}

impl Iterator for GapOrbit<'_> {
    type Item = Result<LeadingQuotients>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        if self.started {
            if let Err(e) = self.cursor.gap_step() {
                self.failed = true;
                return Some(Err(e));
            }
        }
        self.started = true;
        Some(Ok(LeadingQuotients {
            a1: self.cursor.peek(0).expect("cursor is never empty"),
            a2: self.cursor.peek(1),
            a3: self.cursor.peek(2),
        }))
    }
}

/// Leading quotients of `θ₀, …, θ_{n−1}`.
pub fn leading_quotients(theta: &CFExpansion, n: usize) -> Result<Vec<LeadingQuotients>> {
    GapOrbit::new(theta).take(n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn silver_ratio_is_fixed() {
        let s = CFExpansion::periodic(&[], &[2]).unwrap();
        let t = gap_trajectory(&s, 2).unwrap();
        let delta = ExactReal::surd(rat(3, 1), rat(-2, 1), 2).unwrap();
        assert_eq!(t.len(), 3);
        for e in &t.entries {
            assert_eq!(e.cf, s);
            assert_eq!(e.delta, delta);
        }
    }

    #[test]
    fn delta_is_one_after_a_one() {
        let th = CFExpansion::periodic(&[1], &[2]).unwrap();
        let t = gap_trajectory(&th, 0).unwrap();
        assert_eq!(t.entries[0].delta, ExactReal::one());
    }

    #[test]
    fn first_delta_uses_e_of_a1() {
        let th = CFExpansion::periodic(&[4, 1, 3], &[5]).unwrap();
        let t = gap_trajectory(&th, 0).unwrap();
        assert_eq!(t.entries[0].e, 4);
        let expect = ExactReal::one() - ExactReal::from_integer(4) * th.value();
        assert_eq!(t.entries[0].delta, expect);
    }

    #[test]
    fn exhaustion_reports_step() {
        let th = CFExpansion::finite(&[2, 3, 4, 5]).unwrap();
        // [2,3,4,5] → [4,5] → exhausted (even branch needs 3)
        match gap_trajectory(&th, 3) {
            Err(crate::Error::Exhausted { step, .. }) => assert_eq!(step, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn streaming_matches_materialized() {
        let th = CFExpansion::finite(&[3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3, 2, 3, 8, 4, 6]).unwrap();
        let traj = gap_trajectory(&th, 8).unwrap();
        let lq = leading_quotients(&th, 9).unwrap();
        for (s, q) in traj.entries.iter().zip(&lq) {
            assert_eq!(s.a1, q.a1);
            assert_eq!(s.cf.quotient(1), q.a2);
            assert_eq!(s.cf.quotient(2), q.a3);
        }
    }
}
