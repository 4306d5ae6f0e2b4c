//! Continued fractions `[a₁, a₂, …]` of numbers in `(0, 1)`, the Gauss map,
//! and the gap map `g`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::ExactReal;

/// A continued-fraction expansion with the integer part omitted: either
/// finite (`period` empty) or eventually periodic.
///
/// Always held in canonical form: a finite expansion never ends in 1, a
/// periodic expansion has a primitive period and the shortest preperiod.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CFExpansion {
    pre: Vec<u64>,
    per: Vec<u64>,
}

impl CFExpansion {
    /// Builds a canonical expansion from a preperiod and a (possibly empty)
    /// period.
    pub fn new(pre: Vec<u64>, per: Vec<u64>) -> Result<Self> {
        if pre.is_empty() && per.is_empty() {
            return Err(Error::EmptyExpansion);
        }
        if let Some(&z) = pre.iter().chain(per.iter()).find(|&&a| a == 0) {
            return Err(Error::BadQuotient(z as i128));
        }
        if per.is_empty() {
            return Self::finite_canonical(pre);
        }
        let mut pre = pre;
        let mut per = primitive_period(per);
        while let (Some(&last_pre), Some(&last_per)) = (pre.last(), per.last()) {
            if last_pre != last_per {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        Ok(CFExpansion { pre, per })
    }

    /// A finite expansion (a rational number).
    pub fn finite(quotients: &[u64]) -> Result<Self> {
        Self::new(quotients.to_vec(), Vec::new())
    }

    /// Preperiod followed by an infinitely repeated period.
    pub fn periodic(pre: &[u64], per: &[u64]) -> Result<Self> {
        if per.is_empty() {
            return Err(Error::InvalidArgument(
                "periodic expansion needs a nonempty period".into(),
            ));
        }
        Self::new(pre.to_vec(), per.to_vec())
    }

    fn finite_canonical(mut q: Vec<u64>) -> Result<Self> {
        if q.len() >= 2 && *q.last().unwrap() == 1 {
            q.pop();
            let last = q.last_mut().unwrap();
            *last = last
                .checked_add(1)
                .ok_or_else(|| Error::InvalidArgument("partial quotient overflow".into()))?;
        }
        if q == [1] {
            return Err(Error::OutOfUnitInterval("[1] = 1".into()));
        }
        Ok(CFExpansion {
            pre: q,
            per: Vec::new(),
        })
    }

    /// Expansion of a rational `p/q ∈ (0, 1)` by the Euclidean algorithm.
    pub fn from_rational(r: &BigRational) -> Result<Self> {
        if !r.is_positive() || r >= &BigRational::one() {
            return Err(Error::OutOfUnitInterval(r.to_string()));
        }
        let mut num = r.denom().clone();
        let mut den = r.numer().clone();
        let mut q = Vec::new();
        while !den.is_zero() {
            let (a, rem) = num.div_rem(&den);
            let a = a
                .to_u64()
                .ok_or_else(|| Error::InvalidArgument(format!("partial quotient {a} exceeds 64 bits")))?;
            q.push(a);
            num = den;
            den = rem;
        }
        Self::new(q, Vec::new())
    }

    pub fn preperiod(&self) -> &[u64] {
        &self.pre
    }

    pub fn period(&self) -> &[u64] {
        &self.per
    }

    pub fn is_finite(&self) -> bool {
        self.per.is_empty()
    }

    /// Number of partial quotients, `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then_some(self.pre.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quotients available, saturating at `usize::MAX` for periodic ones.
    pub fn available(&self) -> usize {
        self.len().unwrap_or(usize::MAX)
    }

    /// The partial quotient `a_{i+1}` (zero-based index), if present.
    pub fn quotient(&self, i: usize) -> Option<u64> {
        if i < self.pre.len() {
            Some(self.pre[i])
        } else if self.per.is_empty() {
            None
        } else {
            Some(self.per[(i - self.pre.len()) % self.per.len()])
        }
    }

    pub fn a1(&self) -> u64 {
        self.quotient(0).expect("canonical expansions are nonempty")
    }

    pub fn quotients(&self) -> impl Iterator<Item = u64> + '_ {
        self.pre.iter().copied().chain(self.per.iter().copied().cycle())
    }

    /// The depth-`depth` convergent `[a₁, …, a_depth]`.
    pub fn convergent(&self, depth: usize) -> Result<BigRational> {
        if depth == 0 {
            return Err(Error::InvalidArgument("convergent depth must be positive".into()));
        }
        if depth > self.available() {
            return Err(Error::Exhausted {
                step: 0,
                needed: depth,
                available: self.available(),
            });
        }
        // p/q recurrences with a₀ = 0
        let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
        let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
        for a in self.quotients().take(depth) {
            let a = BigInt::from(a);
            let p2 = &a * &p1 + &p0;
            let q2 = &a * &q1 + &q0;
            p0 = std::mem::replace(&mut p1, p2);
            q0 = std::mem::replace(&mut q1, q2);
        }
        Ok(BigRational::new(p1, q1))
    }

    /// The exact value: a rational for finite expansions, a quadratic surd
    /// for periodic ones.
    pub fn value(&self) -> ExactReal {
        if self.is_finite() {
            return ExactReal::Rational(self.convergent(self.pre.len()).unwrap());
        }
        // purely periodic tail y solves y = (p·y + q)/(r·y + s)
        let [p, q, r, s] = mobius(&self.per);
        let two_r = BigInt::from(2) * &r;
        let disc = (&s - &p) * (&s - &p) + BigInt::from(4) * &q * &r;
        let tail = ExactReal::surd(
            BigRational::new(&p - &s, two_r.clone()),
            BigRational::new(BigInt::one(), two_r),
            disc,
        )
        .expect("discriminant is positive");
        apply_prefix(&self.pre, tail)
    }

    /// The Gauss map: left shift of the quotient sequence.
    pub fn gauss_map(&self) -> Result<Self> {
        let mut c = Cursor::new(self);
        c.skip(1, 2)?;
        c.materialize()
    }

    /// The gap map `g`.
    pub fn gap_map(&self) -> Result<Self> {
        let mut c = Cursor::new(self);
        c.gap_step()?;
        c.materialize()
    }

    /// Canonical θ-spec string (`cf:[…]` or `cfper:[…][…]`).
    pub fn spec(&self) -> String {
        ThetaSpec::from(self).to_string()
    }
}

fn primitive_period(per: Vec<u64>) -> Vec<u64> {
    let n = per.len();
    for p in 1..=n {
        if n.is_multiple_of(p) && (p..n).all(|i| per[i] == per[i - p]) {
            return per[..p].to_vec();
        }
    }
    per
}

/// Integer matrix `[p q; r s]` of the map `t ↦ [a₁, …, a_k + t]`.
fn mobius(quotients: &[u64]) -> [BigInt; 4] {
    let (mut p, mut q, mut r, mut s) = (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
    for &a in quotients {
        // right-multiply by [0 1; 1 a]
        let a = BigInt::from(a);
        let np = q.clone();
        let nq = &p + &a * &q;
        let nr = s.clone();
        let ns = &r + &a * &s;
        p = np;
        q = nq;
        r = nr;
        s = ns;
    }
    [p, q, r, s]
}

fn apply_prefix(prefix: &[u64], tail: ExactReal) -> ExactReal {
    prefix.iter().rev().fold(tail, |x, &a| {
        (ExactReal::from_integer(a) + x).recip().expect("a + x > 0")
    })
}

/// `E(a)`: the largest even integer `≤ a`.
pub fn parity_floor(a: u64) -> u64 {
    a & !1
}

/// A read position inside an expansion, with an optional replaced leading
/// quotient. Applying `g` through a cursor costs O(1) regardless of the
/// expansion's length.
#[derive(Clone, Debug)]
pub struct Cursor<'a> {
    source: &'a CFExpansion,
    head: Option<u64>,
    pos: usize,
    steps: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(source: &'a CFExpansion) -> Self {
        Cursor {
            source,
            head: None,
            pos: 0,
            steps: 0,
        }
    }

    /// Number of gap-map steps applied so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Quotients available from the current position.
    pub fn available(&self) -> usize {
        match self.source.len() {
            None => usize::MAX,
            Some(len) => len - self.pos.min(len) + usize::from(self.head.is_some()),
        }
    }

    /// `a_{i+1}` of the current number.
    pub fn peek(&self, i: usize) -> Option<u64> {
        match (self.head, i) {
            (Some(h), 0) => Some(h),
            (Some(_), i) => self.source.quotient(self.pos + i - 1),
            (None, i) => self.source.quotient(self.pos + i),
        }
    }

    fn require(&self, needed: usize) -> Result<()> {
        let available = self.available();
        if available < needed {
            return Err(Error::Exhausted {
                step: self.steps,
                needed,
                available,
            });
        }
        Ok(())
    }

    fn skip(&mut self, count: usize, needed: usize) -> Result<()> {
        self.require(needed)?;
        for _ in 0..count {
            if self.head.take().is_none() {
                self.pos += 1;
            }
        }
        Ok(())
    }

    /// Applies `g` in place.
    pub fn gap_step(&mut self) -> Result<()> {
        let a1 = self.peek(0).expect("cursor is never empty");
        if a1 == 1 {
            // [1, a₂, a₃, …] ↦ [a₂ + 1, a₃, …]
            self.require(2)?;
            let a2 = self.peek(1).unwrap();
            let new = a2
                .checked_add(1)
                .ok_or_else(|| Error::InvalidArgument("partial quotient overflow".into()))?;
            self.skip(2, 2)?;
            self.head = Some(new);
        } else if a1 % 2 == 1 {
            // [a₁, a₂, …] ↦ [1, a₂, …]; a lone [a₁] would map to 1
            self.require(2)?;
            self.skip(1, 2)?;
            self.head = Some(1);
        } else {
            // [a₁, a₂, a₃, …] ↦ [a₃, …]
            self.skip(2, 3)?;
        }
        self.steps += 1;
        Ok(())
    }

    /// The current number as a canonical expansion.
    pub fn materialize(&self) -> Result<CFExpansion> {
        let src = self.source;
        let mut pre: Vec<u64> = self.head.into_iter().collect();
        let per;
        if self.pos < src.pre.len() {
            pre.extend_from_slice(&src.pre[self.pos..]);
            per = src.per.clone();
        } else if src.per.is_empty() {
            per = Vec::new();
        } else {
            let mut p = src.per.clone();
            p.rotate_left((self.pos - src.pre.len()) % src.per.len());
            per = p;
        }
        if pre.is_empty() && per.is_empty() {
            return Err(Error::Exhausted {
                step: self.steps,
                needed: 1,
                available: 0,
            });
        }
        CFExpansion::new(pre, per)
    }
}

/// The θ input grammar: `cf:[a1,a2,...]`, `cfper:[pre...][per...]`, `rat:p/q`.
///
/// The periodic form also accepts labelled brackets, `cfper:[pre;1,2][per;3]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaSpec {
    Finite(Vec<u64>),
    Periodic(Vec<u64>, Vec<u64>),
    Rational(BigInt, BigInt),
}

impl ThetaSpec {
    pub fn expansion(&self) -> Result<CFExpansion> {
        match self {
            ThetaSpec::Finite(q) => CFExpansion::finite(q),
            ThetaSpec::Periodic(pre, per) => CFExpansion::periodic(pre, per),
            ThetaSpec::Rational(p, q) => {
                if q.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                CFExpansion::from_rational(&BigRational::new(p.clone(), q.clone()))
            }
        }
    }

    pub fn rational(r: &BigRational) -> Self {
        ThetaSpec::Rational(r.numer().clone(), r.denom().clone())
    }
}

impl From<&CFExpansion> for ThetaSpec {
    fn from(cf: &CFExpansion) -> Self {
        if cf.is_finite() {
            ThetaSpec::Finite(cf.pre.clone())
        } else {
            ThetaSpec::Periodic(cf.pre.clone(), cf.per.clone())
        }
    }
}

fn join(q: &[u64]) -> String {
    q.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaSpec::Finite(q) => write!(f, "cf:[{}]", join(q)),
            ThetaSpec::Periodic(pre, per) => write!(f, "cfper:[{}][{}]", join(pre), join(per)),
            ThetaSpec::Rational(p, q) => write!(f, "rat:{p}/{q}"),
        }
    }
}

fn parse_list(spec: &str, body: &str) -> Result<Vec<u64>> {
    let bad = |reason: String| Error::ThetaSpec {
        spec: spec.to_string(),
        reason,
    };
    let body = body.trim();
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|t| {
            let t = t.trim();
            let v: i128 = t.parse().map_err(|_| bad(format!("not an integer: {t:?}")))?;
            if v < 1 {
                return Err(Error::BadQuotient(v));
            }
            u64::try_from(v).map_err(|_| bad(format!("quotient too large: {t}")))
        })
        .collect()
}

fn strip_label<'a>(body: &'a str, label: &str) -> &'a str {
    body.trim()
        .strip_prefix(label)
        .map(|r| r.trim_start().strip_prefix(';').unwrap_or(r))
        .unwrap_or(body)
}

impl std::str::FromStr for ThetaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::ThetaSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let s_trim = s.trim();
        if let Some(rest) = s_trim.strip_prefix("cfper:") {
            let rest = rest.trim();
            let inner = rest
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| bad("expected [pre][per]"))?;
            let (pre, per) = inner.split_once("][").ok_or_else(|| bad("expected [pre][per]"))?;
            let pre = parse_list(s, strip_label(pre, "pre"))?;
            let per = parse_list(s, strip_label(per, "per"))?;
            if per.is_empty() {
                return Err(bad("period must be nonempty"));
            }
            Ok(ThetaSpec::Periodic(pre, per))
        } else if let Some(rest) = s_trim.strip_prefix("cf:") {
            let inner = rest
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| bad("expected [a1,a2,...]"))?;
            let q = parse_list(s, inner)?;
            if q.is_empty() {
                return Err(Error::EmptyExpansion);
            }
            Ok(ThetaSpec::Finite(q))
        } else if let Some(rest) = s_trim.strip_prefix("rat:") {
            let (p, q) = rest.split_once('/').ok_or_else(|| bad("expected p/q"))?;
            let p: BigInt = p.trim().parse().map_err(|_| bad("bad numerator"))?;
            let q: BigInt = q.trim().parse().map_err(|_| bad("bad denominator"))?;
            if !q.is_positive() {
                return Err(bad("denominator must be positive"));
            }
            Ok(ThetaSpec::Rational(p, q))
        } else {
            Err(bad("expected a cf:, cfper: or rat: prefix"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn cf(q: &[u64]) -> CFExpansion {
        CFExpansion::finite(q).unwrap()
    }

    fn per(pre: &[u64], p: &[u64]) -> CFExpansion {
        CFExpansion::periodic(pre, p).unwrap()
    }

    #[test]
    fn normalizes_trailing_one() {
        assert_eq!(cf(&[2, 3, 1]).preperiod(), &[2, 4]);
        assert_eq!(cf(&[2, 3, 1]).value(), cf(&[2, 4]).value());
    }

    #[test]
    fn rejects_degenerate_input() {
        assert_eq!(CFExpansion::finite(&[]), Err(Error::EmptyExpansion));
        assert!(matches!(CFExpansion::finite(&[1]), Err(Error::OutOfUnitInterval(_))));
        assert_eq!(CFExpansion::finite(&[2, 0, 3]), Err(Error::BadQuotient(0)));
        assert!(matches!("cf:[2,-1]".parse::<ThetaSpec>(), Err(Error::BadQuotient(-1))));
    }

    #[test]
    fn periodic_canonical_form() {
        let a = per(&[2, 2], &[2, 2]);
        assert_eq!(a, per(&[], &[2]));
        let b = per(&[3, 1, 2], &[1, 2]);
        assert_eq!(b.preperiod(), &[3]);
        assert_eq!(b.period(), &[1, 2]);
        assert_eq!(b, per(&[3, 1], &[2, 1, 2, 1]));
    }

    #[test]
    fn values() {
        let s = per(&[], &[2]).value();
        assert_eq!(s, ExactReal::surd(rat(-1, 1), rat(1, 1), 2).unwrap());
        assert_eq!(cf(&[2]).convergent(1).unwrap(), rat(1, 2));
        assert_eq!(cf(&[1, 2]).convergent(2).unwrap(), rat(2, 3));
        assert!(cf(&[1, 2]).convergent(3).is_err());
        // golden mean conjugate
        let g = per(&[], &[1]).value();
        assert_eq!(g, ExactReal::surd(rat(-1, 2), rat(1, 2), 5).unwrap());
        // preperiod applied on top of the periodic tail
        let v = per(&[3], &[2]).value();
        let t = per(&[], &[2]).value();
        assert_eq!(v, (ExactReal::from_integer(3) + t).recip().unwrap());
    }

    #[test]
    fn gauss_map_shifts() {
        assert_eq!(cf(&[3, 1, 4]).gauss_map().unwrap(), cf(&[1, 4]));
        assert_eq!(cf(&[5, 2]).gauss_map().unwrap(), cf(&[2]));
        let s = per(&[], &[2]);
        assert_eq!(s.gauss_map().unwrap(), s);
        assert!(matches!(cf(&[5]).gauss_map(), Err(Error::Exhausted { .. })));
    }

    #[test]
    fn gap_map_branches() {
        assert_eq!(cf(&[1, 2, 3]).gap_map().unwrap(), cf(&[3, 3]));
        assert_eq!(cf(&[3, 2, 2]).gap_map().unwrap(), cf(&[1, 2, 2]));
        assert_eq!(cf(&[2, 5, 3, 7]).gap_map().unwrap(), cf(&[3, 7]));
        assert!(matches!(cf(&[2, 5]).gap_map(), Err(Error::Exhausted { needed: 3, .. })));
        assert!(matches!(cf(&[3]).gap_map(), Err(Error::Exhausted { .. })));
        let s = per(&[], &[2]);
        assert_eq!(s.gap_map().unwrap(), s);
        // [1,2,1,2,…] ↦ [3,1,2,1,2,…]
        assert_eq!(per(&[], &[1, 2]).gap_map().unwrap(), per(&[3], &[1, 2]));
        // [3,4,3,4,…] ↦ [1,4,3,4,…]
        assert_eq!(per(&[], &[3, 4]).gap_map().unwrap(), per(&[1], &[4, 3]));
    }

    #[test]
    fn parity_floor_examples() {
        assert_eq!(parity_floor(7), 6);
        assert_eq!(parity_floor(4), 4);
        assert_eq!(parity_floor(1), 0);
    }

    #[test]
    fn euclid_expansion() {
        let c = CFExpansion::from_rational(&rat(2, 5)).unwrap();
        assert_eq!(c, cf(&[2, 2]));
        assert!(CFExpansion::from_rational(&rat(1, 1)).is_err());
        assert!(CFExpansion::from_rational(&rat(0, 1)).is_err());
        assert_eq!(c.value(), ExactReal::ratio(2, 5));
    }

    #[test]
    fn theta_spec_grammar() {
        let s: ThetaSpec = "cfper:[3][1,2]".parse().unwrap();
        assert_eq!(s, ThetaSpec::Periodic(vec![3], vec![1, 2]));
        assert_eq!(s.to_string(), "cfper:[3][1,2]");
        let s: ThetaSpec = "cfper:[pre;][per;2]".parse().unwrap();
        assert_eq!(s.expansion().unwrap(), per(&[], &[2]));
        let s: ThetaSpec = "rat:2/5".parse().unwrap();
        assert_eq!(s.expansion().unwrap(), cf(&[2, 2]));
        let s: ThetaSpec = "cf:[2, 3, 1]".parse().unwrap();
        assert_eq!(s.expansion().unwrap().spec(), "cf:[2,4]");
        assert!("0.4142".parse::<ThetaSpec>().is_err());
        assert!("cfper:[2][]".parse::<ThetaSpec>().is_err());
    }
}
