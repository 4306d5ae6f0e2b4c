//! The Markov partition of `(0, 1)` for the gap map: `(1/2, 1)`, the odd
//! intervals `(1/(2k+2), 1/(2k+1))` and the even intervals
//! `(m/(2nm+1), (m+1)/(2n(m+1)+1))`.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cf::CFExpansion;
use crate::error::{Error, Result};
use crate::exact::ExactReal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartitionCell {
    /// `(1/2, 1)`: expansions starting with 1.
    Half,
    /// Expansions starting with `2k + 1`, `k ≥ 1`.
    Odd { k: u64 },
    /// Expansions starting with `[2n, m, …]`.
    Even { n: u64, m: u64 },
}

fn r(p: u64, q: u64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

impl PartitionCell {
    /// Open endpoints `(lo, hi)`.
    pub fn endpoints(&self) -> (BigRational, BigRational) {
        match *self {
            PartitionCell::Half => (r(1, 2), r(1, 1)),
            PartitionCell::Odd { k } => (r(1, 2 * k + 2), r(1, 2 * k + 1)),
            PartitionCell::Even { n, m } => (r(m, 2 * n * m + 1), r(m + 1, 2 * n * (m + 1) + 1)),
        }
    }

    pub fn endpoints_f64(&self) -> (f64, f64) {
        match *self {
            PartitionCell::Half => (0.5, 1.0),
            PartitionCell::Odd { k } => {
                let k = k as f64;
                (1.0 / (2.0 * k + 2.0), 1.0 / (2.0 * k + 1.0))
            }
            PartitionCell::Even { n, m } => {
                let (n, m) = (n as f64, m as f64);
                (m / (2.0 * n * m + 1.0), (m + 1.0) / (2.0 * n * (m + 1.0) + 1.0))
            }
        }
    }

    /// Lebesgue length of the cell.
    pub fn length(&self) -> f64 {
        match *self {
            PartitionCell::Half => 0.5,
            PartitionCell::Odd { k } => {
                let k = k as f64;
                1.0 / ((2.0 * k + 1.0) * (2.0 * k + 2.0))
            }
            PartitionCell::Even { n, m } => {
                let (n, m) = (n as f64, m as f64);
                1.0 / ((2.0 * n * m + 1.0) * (2.0 * n * (m + 1.0) + 1.0))
            }
        }
    }

    /// Strict interior membership, decided exactly.
    pub fn contains(&self, x: &ExactReal) -> bool {
        let (lo, hi) = self.endpoints();
        x.try_cmp(&lo.into()) == Some(Ordering::Greater) && x.try_cmp(&hi.into()) == Some(Ordering::Less)
    }

    fn require_interior(&self, x: &ExactReal) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::CellEndpoint {
                value: x.to_string(),
                cell: self.to_string(),
            })
        }
    }

    /// `g` restricted to this cell, evaluated exactly.
    pub fn apply(&self, x: &ExactReal) -> Result<ExactReal> {
        self.require_interior(x)?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &ExactReal) -> ExactReal {
        match *self {
            PartitionCell::Half => ExactReal::one() - x,
            PartitionCell::Odd { k } => {
                let den = ExactReal::one() - ExactReal::from_integer(2 * k) * x;
                x / &den
            }
            PartitionCell::Even { n, m } => {
                let gauss = x.recip().unwrap() - ExactReal::from_integer(2 * n);
                gauss.recip().unwrap() - ExactReal::from_integer(m)
            }
        }
    }

    /// The inverse of `g` on this cell, `y ↦ θ` with `g(θ) = y`, without
    /// range checks.
    pub fn inverse_unchecked(&self, y: &ExactReal) -> ExactReal {
        match *self {
            PartitionCell::Half => ExactReal::one() - y,
            PartitionCell::Odd { k } => {
                let den = ExactReal::one() + ExactReal::from_integer(2 * k) * y;
                y / &den
            }
            PartitionCell::Even { n, m } => {
                let inner = (ExactReal::from_integer(m) + y).recip().unwrap();
                (ExactReal::from_integer(2 * n) + inner).recip().unwrap()
            }
        }
    }

    /// The image `g(cell)` as an open interval.
    pub fn image(&self) -> (BigRational, BigRational) {
        match self {
            PartitionCell::Half => (r(0, 1), r(1, 2)),
            PartitionCell::Odd { .. } => (r(1, 2), r(1, 1)),
            PartitionCell::Even { .. } => (r(0, 1), r(1, 1)),
        }
    }
}

impl fmt::Display for PartitionCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionCell::Half => write!(f, "Half"),
            PartitionCell::Odd { k } => write!(f, "Odd({k})"),
            PartitionCell::Even { n, m } => write!(f, "Even({n},{m})"),
        }
    }
}

/// The cell whose interior contains `cf`'s value. Values on a cell boundary
/// (or at an accumulation point such as `1/(2n)`) are rejected.
pub fn classify_cell(cf: &CFExpansion) -> Result<PartitionCell> {
    let a1 = cf.a1();
    let value = cf.value();
    let cell = if a1 == 1 {
        PartitionCell::Half
    } else if a1 % 2 == 1 {
        PartitionCell::Odd { k: (a1 - 1) / 2 }
    } else {
        match cf.quotient(1) {
            Some(m) => PartitionCell::Even { n: a1 / 2, m },
            None => {
                return Err(Error::CellEndpoint {
                    value: value.to_string(),
                    cell: format!("Even({}, ∞)", a1 / 2),
                })
            }
        }
    };
    cell.require_interior(&value)?;
    Ok(cell)
}

/// Locates the cell of an exact value directly, without a continued fraction.
pub fn classify_value(x: &ExactReal) -> Result<PartitionCell> {
    let half = ExactReal::ratio(1, 2);
    let outside = |x: &ExactReal| Error::OutOfUnitInterval(x.to_string());
    if x.signum() != Ordering::Greater || x.try_cmp(&ExactReal::one()) != Some(Ordering::Less) {
        return Err(outside(x));
    }
    let cell = match x.try_cmp(&half) {
        Some(Ordering::Greater) => PartitionCell::Half,
        Some(Ordering::Equal) => {
            return Err(Error::CellEndpoint {
                value: x.to_string(),
                cell: "Half".into(),
            })
        }
        _ => {
            // a₁ = ⌊1/x⌋, a₂ = ⌊1/γ(x)⌋
            let inv = x.recip()?;
            let a1 = u64::try_from(inv.floor()).map_err(|_| outside(x))?;
            if a1 % 2 == 1 {
                PartitionCell::Odd { k: (a1 - 1) / 2 }
            } else {
                let gauss = inv - ExactReal::from_integer(a1);
                if gauss.is_zero() {
                    return Err(Error::CellEndpoint {
                        value: x.to_string(),
                        cell: format!("Even({}, ∞)", a1 / 2),
                    });
                }
                let a2 = u64::try_from(gauss.recip()?.floor()).map_err(|_| outside(x))?;
                PartitionCell::Even { n: a1 / 2, m: a2 }
            }
        }
    };
    cell.require_interior(x)?;
    Ok(cell)
}

/// `|g′(θ)|` on the given cell.
pub fn gap_derivative(theta: &ExactReal, cell: PartitionCell) -> Result<ExactReal> {
    cell.require_interior(theta)?;
    Ok(match cell {
        PartitionCell::Half => ExactReal::one(),
        PartitionCell::Odd { k } => {
            let den = ExactReal::one() - ExactReal::from_integer(2 * k) * theta;
            (&den * &den).recip()?
        }
        PartitionCell::Even { n, .. } => {
            // |γ′(x)| = 1/x², applied at θ and at γ(θ)
            let gauss = theta.recip()? - ExactReal::from_integer(2 * n);
            let outer = (theta * theta).recip()?;
            let inner = (&gauss * &gauss).recip()?;
            outer * inner
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn cf(q: &[u64]) -> CFExpansion {
        CFExpansion::finite(q).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_cell(&cf(&[1, 5])).unwrap(), PartitionCell::Half);
        let odd = classify_cell(&cf(&[3, 2, 5])).unwrap();
        assert_eq!(odd, PartitionCell::Odd { k: 1 });
        assert_eq!(odd.endpoints(), (rat(1, 4), rat(1, 3)));
        let s = CFExpansion::periodic(&[], &[2]).unwrap();
        let even = classify_cell(&s).unwrap();
        assert_eq!(even, PartitionCell::Even { n: 1, m: 2 });
        assert_eq!(even.endpoints(), (rat(2, 5), rat(3, 7)));
    }

    #[test]
    fn endpoint_hits_are_errors() {
        // 1/3 = [3] is the right end of Odd(1)
        assert!(matches!(classify_cell(&cf(&[3])), Err(Error::CellEndpoint { .. })));
        // 2/5 = [2,2] is the left end of Even(1,2)
        assert!(matches!(classify_cell(&cf(&[2, 2])), Err(Error::CellEndpoint { .. })));
        // 1/2 = [2] is an accumulation point
        assert!(matches!(classify_cell(&cf(&[2])), Err(Error::CellEndpoint { .. })));
        assert!(classify_value(&ExactReal::ratio(1, 2)).is_err());
    }

    #[test]
    fn classify_value_agrees_with_quotients() {
        for q in [[3u64, 2, 5], [2, 7, 3], [1, 4, 2], [6, 1, 9], [4, 3, 2]] {
            let c = cf(&q);
            assert_eq!(classify_value(&c.value()).unwrap(), classify_cell(&c).unwrap());
        }
    }

    #[test]
    fn derivative_examples() {
        let x = ExactReal::ratio(3, 10);
        let d = gap_derivative(&x, PartitionCell::Odd { k: 1 }).unwrap();
        assert_eq!(d, ExactReal::ratio(25, 4));
        let h = gap_derivative(&ExactReal::ratio(3, 4), PartitionCell::Half).unwrap();
        assert_eq!(h, ExactReal::one());
        assert!(gap_derivative(&ExactReal::ratio(1, 4), PartitionCell::Odd { k: 1 }).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let y = ExactReal::ratio(1, 4);
        let even = PartitionCell::Even { n: 1, m: 1 };
        let th = even.inverse_unchecked(&y);
        assert_eq!(th, ExactReal::ratio(5, 14));
        assert_eq!(even.apply(&th).unwrap(), y);
        let y = ExactReal::ratio(3, 4);
        let odd = PartitionCell::Odd { k: 1 };
        let th = odd.inverse_unchecked(&y);
        assert_eq!(th, ExactReal::ratio(3, 10));
        assert!(odd.contains(&th));
    }
}
