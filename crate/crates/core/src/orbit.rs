//! Exact rotation orbits `x + jθ mod 1`, their `A/B/C` coding and the
//! discrepancy sums `Sᵢ`, `ρₙ`.
//!
//! Orbit points live on the lattice `(p + q√d)/D`, so each step is a few
//! integer additions and at most one exact sign test. Small lattices run in
//! `i128`; anything larger falls back to `BigInt`.

use std::cmp::Ordering;
use std::io::Write;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::CFExpansion;
use crate::error::{Error, Result};
use crate::exact::ExactReal;
use crate::renorm::{expand_word, level_stats, orbit_rules, Letter};

/// Orbit points that sit exactly on a boundary of the coding intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Endpoint {
    Zero,
    Half,
    OneMinusTheta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitEncoding {
    pub x0: ExactReal,
    pub theta: ExactReal,
    pub symbols: Vec<Letter>,
    pub endpoint_hits: Vec<(usize, Endpoint)>,
    /// `θ` is rational with period shorter than the orbit.
    pub periodic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscrepancyProfile {
    /// `S₁, …, S_N`.
    pub sums: Vec<i64>,
    /// `ρ₁, …, ρ_N`.
    pub rho: Vec<u64>,
}

trait OrbitInt: Clone + Ord + Signed + From<i64> + Send + Sync {}
impl<T: Clone + Ord + Signed + From<i64> + Send + Sync> OrbitInt for T {}

/// Sign of `a + b√d` with `d ≥ 0`.
fn surd_sign<T: OrbitInt>(a: &T, b: &T, d: &T) -> Ordering {
    let (sa, sb) = (a.cmp(&T::zero()), b.cmp(&T::zero()));
    if sb == Ordering::Equal || d.is_zero() {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // opposite signs: compare a² with b²d
    let lhs = a.clone() * a.clone();
    let rhs = b.clone() * b.clone() * d.clone();
    if sa == Ordering::Greater {
        lhs.cmp(&rhs)
    } else {
        rhs.cmp(&lhs)
    }
}

/// `x = (p + q√d)/den` rotating by `θ = (tp + tq√d)/den`.
#[derive(Clone, Debug)]
struct Lattice<T> {
    d: T,
    den: T,
    tp: T,
    tq: T,
    p: T,
    q: T,
}

impl<T: OrbitInt> Lattice<T> {
    fn step(&mut self) -> (Letter, Option<Endpoint>) {
        let two = T::from(2);
        let (np, nq) = (self.p.clone() + self.tp.clone(), self.q.clone() + self.tq.clone());
        let hit = if self.q.is_zero() && self.p.is_zero() {
            Some(Endpoint::Zero)
        } else if self.q.is_zero() && two.clone() * self.p.clone() == self.den {
            Some(Endpoint::Half)
        } else if nq.is_zero() && np == self.den {
            Some(Endpoint::OneMinusTheta)
        } else {
            None
        };
        let wraps = surd_sign(&(np.clone() - self.den.clone()), &nq, &self.d) != Ordering::Less;
        let letter = if wraps {
            Letter::C
        } else if surd_sign(
            &(two.clone() * self.p.clone() - self.den.clone()),
            &(two * self.q.clone()),
            &self.d,
        ) == Ordering::Less
        {
            Letter::A
        } else {
            Letter::B
        };
        self.p = if wraps { np - self.den.clone() } else { np };
        self.q = nq;
        (letter, hit)
    }

    fn run(&mut self, n: usize, mut f: impl FnMut(usize, Letter, Option<Endpoint>) -> ControlFlow<()>) {
        for j in 0..n {
            let (l, hit) = self.step();
            if f(j, l, hit).is_break() {
                return;
            }
        }
    }

    fn map<U>(&self, f: impl Fn(&T) -> Option<U>) -> Option<Lattice<U>> {
        Some(Lattice {
            d: f(&self.d)?,
            den: f(&self.den)?,
            tp: f(&self.tp)?,
            tq: f(&self.tq)?,
            p: f(&self.p)?,
            q: f(&self.q)?,
        })
    }
}

/// A rotation ready to be stepped, in the narrowest integer type that is
/// safe for the requested orbit length.
#[derive(Clone, Debug)]
enum Engine {
    Fast(Lattice<i128>),
    Big(Lattice<BigInt>),
}

impl Engine {
    fn run(&mut self, n: usize, f: impl FnMut(usize, Letter, Option<Endpoint>) -> ControlFlow<()>) {
        match self {
            Engine::Fast(l) => l.run(n, f),
            Engine::Big(l) => l.run(n, f),
        }
    }
}

/// `|x|` never exceeds this along `n` steps, with room for the doubled and
/// squared intermediates.
fn magnitude_bound(l: &Lattice<BigInt>, n: usize) -> BigInt {
    let root = l.d.sqrt() + 1;
    let q = l.q.abs() + (BigInt::from(n) + 2) * l.tq.abs();
    (l.den.clone() + l.tp.abs() + l.p.abs() + q * root) * 4
}

fn engine(l: Lattice<BigInt>, n: usize) -> Engine {
    if 2 * magnitude_bound(&l, n).bits() <= 124 {
        if let Some(fast) = l.map(|x| i128::try_from(x).ok()) {
            return Engine::Fast(fast);
        }
    }
    Engine::Big(l)
}

fn check_theta(theta: &ExactReal) -> Result<()> {
    let ok = theta.signum() == Ordering::Greater && theta.try_cmp(&ExactReal::ratio(1, 2)) == Some(Ordering::Less);
    if ok {
        Ok(())
    } else {
        Err(Error::ThetaRange(theta.to_string()))
    }
}

fn check_start(x0: &ExactReal) -> Result<()> {
    let ok = x0.signum() != Ordering::Less && x0.try_cmp(&ExactReal::one()) == Some(Ordering::Less);
    if ok {
        Ok(())
    } else {
        Err(Error::StartRange(x0.to_string()))
    }
}

fn lattice(x0: &ExactReal, theta: &ExactReal) -> Result<Lattice<BigInt>> {
    check_theta(theta)?;
    check_start(x0)?;
    let (xa, xb, xd) = x0.parts();
    let (ta, tb, td) = theta.parts();
    let d = match (xd.is_zero(), td.is_zero()) {
        (_, true) => xd,
        (true, false) => td,
        (false, false) if xd == td => td,
        _ => return Err(Error::FieldMismatch(xd.to_string(), td.to_string())),
    };
    let den = [&xa, &xb, &ta, &tb]
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let scale = |r: &num_rational::BigRational| r.numer() * (&den / r.denom());
    Ok(Lattice {
        p: scale(&xa),
        q: scale(&xb),
        tp: scale(&ta),
        tq: scale(&tb),
        d,
        den,
    })
}

fn is_periodic(theta: &ExactReal, n: usize) -> bool {
    theta
        .as_rational()
        .map(|r| r.denom() < &BigInt::from(n))
        .unwrap_or(false)
}

/// The first `n` symbols of the orbit of `x0` under rotation by `θ`, with
/// `A = [0, 1/2)`, `B = [1/2, 1 − θ)`, `C = [1 − θ, 1)`.
pub fn encode_orbit(x0: &ExactReal, theta: &ExactReal, n: usize) -> Result<OrbitEncoding> {
    let mut eng = engine(lattice(x0, theta)?, n);
    let mut symbols = Vec::with_capacity(n);
    let mut endpoint_hits = Vec::new();
    eng.run(n, |j, l, hit| {
        symbols.push(l);
        if let Some(e) = hit {
            endpoint_hits.push((j, e));
        }
        ControlFlow::Continue(())
    });
    Ok(OrbitEncoding {
        x0: x0.clone(),
        theta: theta.clone(),
        symbols,
        endpoint_hits,
        periodic: is_periodic(theta, n),
    })
}

/// The same coding computed the slow way, one `fract(x0 + jθ)` at a time.
pub fn encode_orbit_reference(x0: &ExactReal, theta: &ExactReal, n: usize) -> Result<OrbitEncoding> {
    check_theta(theta)?;
    check_start(x0)?;
    let half = ExactReal::ratio(1, 2);
    let one_minus = ExactReal::one().checked_sub(theta)?;
    let mut symbols = Vec::with_capacity(n);
    let mut endpoint_hits = Vec::new();
    for j in 0..n {
        let x = x0
            .checked_add(&ExactReal::from_integer(j as i64).checked_mul(theta)?)?
            .fract();
        let hit = if x.is_zero() {
            Some(Endpoint::Zero)
        } else if x == half {
            Some(Endpoint::Half)
        } else if x == one_minus {
            Some(Endpoint::OneMinusTheta)
        } else {
            None
        };
        if let Some(e) = hit {
            endpoint_hits.push((j, e));
        }
        symbols.push(if x.try_cmp(&half) == Some(Ordering::Less) {
            Letter::A
        } else if x.try_cmp(&one_minus) == Some(Ordering::Less) {
            Letter::B
        } else {
            Letter::C
        });
    }
    Ok(OrbitEncoding {
        x0: x0.clone(),
        theta: theta.clone(),
        symbols,
        endpoint_hits,
        periodic: is_periodic(theta, n),
    })
}

/// `Sᵢ` and `ρᵢ` along an encoding.
pub fn discrepancy_profile(enc: &OrbitEncoding) -> DiscrepancyProfile {
    profile_of_symbols(&enc.symbols)
}

pub fn profile_of_symbols(symbols: &[Letter]) -> DiscrepancyProfile {
    let mut sums = Vec::with_capacity(symbols.len());
    let mut rho = Vec::with_capacity(symbols.len());
    let (mut s, mut hi, mut lo) = (0i64, i64::MIN, i64::MAX);
    for l in symbols {
        s += l.weight();
        hi = hi.max(s);
        lo = lo.min(s);
        sums.push(s);
        rho.push((1 + hi - lo) as u64);
    }
    DiscrepancyProfile { sums, rho }
}

/// `ρ_N(x0)` at each `N` in `checkpoints` (ascending), streaming.
pub fn rho_checkpoints(x0: &ExactReal, theta: &ExactReal, checkpoints: &[usize]) -> Result<Vec<u64>> {
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be ascending".into()));
    }
    let n = checkpoints.last().copied().unwrap_or(0);
    let mut eng = engine(lattice(x0, theta)?, n);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().copied().filter(|&c| c > 0).peekable();
    out.extend(checkpoints.iter().take_while(|&&c| c == 0).map(|_| 0));
    let (mut s, mut hi, mut lo) = (0i64, i64::MIN, i64::MAX);
    eng.run(n, |j, l, _| {
        s += l.weight();
        hi = hi.max(s);
        lo = lo.min(s);
        while next.peek() == Some(&(j + 1)) {
            out.push((1 + hi - lo) as u64);
            next.next();
        }
        ControlFlow::Continue(())
    });
    Ok(out)
}

impl DiscrepancyProfile {
    /// CSV with columns `i, S_i, rho_i`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Io {
            path: "<profile>".into(),
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "S_i", "rho_i"]).map_err(io)?;
        for (i, (s, r)) in self.sums.iter().zip(&self.rho).enumerate() {
            w.write_record([(i + 1).to_string(), s.to_string(), r.to_string()])
                .map_err(io)?;
        }
        w.flush().map_err(|e| io(e.into()))
    }
}

/// Result of searching a uniform grid for a start point coded by `Ωₙ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EncodingMatch {
    pub n: usize,
    pub word_len: usize,
    /// The grid is `{j/M : 0 ≤ j < M}`.
    pub grid_size: u64,
    pub best_y: String,
    pub mismatches: usize,
    pub mismatch_positions: Vec<usize>,
    pub endpoint_hits: Vec<(usize, Endpoint)>,
}

/// Most mismatches tolerated between `Ωₙ` and the coding of `x(θ)`.
pub const MAX_ENCODING_ERRORS: usize = 2;

/// Largest word the grid search will expand.
pub const ENCODING_WORD_LIMIT: u64 = 100_000;

/// Searches the grid `j/M` with `1/M < δ₀⋯δ_{n−1} / (2·refinement)` for a
/// point whose orbit is coded by `Ωₙ = σ⁽ⁿ⁾(A)` up to two errors. The step is
/// below half the length of the nested return interval, so the point `x(θ)`
/// cannot fall between grid points unseen.
pub fn verify_special_encoding(theta: &CFExpansion, n: usize, grid_refinement: u32) -> Result<EncodingMatch> {
    let value = theta.value();
    check_theta(&value)?;
    let rules = orbit_rules(theta, n)?;
    let word = expand_word(&rules, Letter::A, ENCODING_WORD_LIMIT)?;
    let traj = crate::trajectory::gap_trajectory(theta, n.saturating_sub(1))?;
    let len = if n == 0 {
        ExactReal::one()
    } else {
        traj.delta_product(n)
    };
    let target = ExactReal::from_integer(2 * i64::from(grid_refinement.max(1))).checked_div(&len)?;
    let m: BigInt = target.floor() + 1;
    let grid_size = m
        .to_u64()
        .filter(|&g| g <= 1 << 32)
        .ok_or_else(|| Error::InvalidArgument(format!("grid of {m} points")))?;
    let base = lattice(&ExactReal::zero(), &value)?;
    let den = base.den.lcm(&m);
    let k = &den / &base.den;
    let base = Lattice {
        den: den.clone(),
        tp: &base.tp * &k,
        tq: &base.tq * &k,
        p: BigInt::zero(),
        q: BigInt::zero(),
        d: base.d,
    };
    let unit = &den / &m;
    let count = |j: u64| -> usize {
        let mut l = base.clone();
        l.p = &unit * j;
        let mut eng = engine(l, word.len());
        let mut bad = 0;
        eng.run(word.len(), |i, letter, _| {
            if letter != word[i] {
                bad += 1;
                if bad > MAX_ENCODING_ERRORS {
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        });
        bad
    };
    let best = (0..grid_size)
        .into_par_iter()
        .map(|j| (count(j), j))
        .min()
        .expect("grid is nonempty");
    let (bad, j) = best;
    if bad > MAX_ENCODING_ERRORS {
        return Err(Error::NoEncodingMatch {
            max_errors: MAX_ENCODING_ERRORS,
            best: bad,
        });
    }
    let y = ExactReal::ratio(j, grid_size);
    let enc = encode_orbit(&y, &value, word.len())?;
    let mismatch_positions: Vec<usize> = (0..word.len()).filter(|&i| enc.symbols[i] != word[i]).collect();
    Ok(EncodingMatch {
        n,
        word_len: word.len(),
        grid_size,
        best_y: y.to_string(),
        mismatches: mismatch_positions.len(),
        mismatch_positions,
        endpoint_hits: enc.endpoint_hits,
    })
}

/// Additive slack in the sandwich checks: the renormalization error `|ξ| ≤ 5`
/// plus two coding errors, each moving later prefix sums by at most 2.
pub const SANDWICH_SLACK: i64 = 10;

/// Longest orbit the sandwich check will simulate.
pub const SANDWICH_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    pub n: usize,
    pub len_min: u64,
    pub len_max: u64,
    pub rho_omega_prev: u64,
    pub rho_omega: u64,
    /// `ρ_N(y)` at `N = len_min`.
    pub rho_at_min: u64,
    /// `ρ_N(y)` at `N = 2·len_max`.
    pub rho_at_double_max: u64,
    /// `ρ_{2·len_max}(y) ≥ ρ(Ωₙ₋₁) − slack`.
    pub lower_ok: bool,
    /// `ρ_{len_min}(y) ≤ 2ρ(Ωₙ) + slack`.
    pub upper_ok: bool,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Both sandwich inequalities at level `n ≥ 1`.
pub fn sandwich_check(y: &ExactReal, theta: &CFExpansion, n: usize) -> Result<SandwichReport> {
    let all = sandwich_levels(y, theta, n, SANDWICH_BUDGET)?;
    match all.into_iter().find(|r| r.n == n) {
        Some(r) => Ok(r),
        None => Err(Error::LengthBound {
            len: format!("orbit for level {n}"),
            max: SANDWICH_BUDGET,
        }),
    }
}

/// Sandwich reports for every level `1 ≤ n ≤ n_max` whose orbit length
/// `2·max(|σ⁽ⁿ⁾(A)|, |σ⁽ⁿ⁾(C)|)` fits in `budget`, from a single orbit.
pub fn sandwich_levels(y: &ExactReal, theta: &CFExpansion, n_max: usize, budget: u64) -> Result<Vec<SandwichReport>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("sandwich needs n ≥ 1".into()));
    }
    let value = theta.value();
    let levels = level_stats(&orbit_rules(theta, n_max)?);
    let small = |x: &BigInt| x.to_u64().unwrap_or(u64::MAX);
    let mut plan = Vec::new();
    for (n, level) in levels.iter().enumerate().skip(1) {
        let la = small(&level[Letter::A.index()].len);
        let lc = small(&level[Letter::C.index()].len);
        let (lo, hi) = (la.min(lc), la.max(lc));
        if hi.saturating_mul(2) > budget {
            break;
        }
        plan.push((n, lo, hi));
    }
    let mut checkpoints: Vec<usize> = plan
        .iter()
        .flat_map(|&(_, lo, hi)| [lo as usize, 2 * hi as usize])
        .collect();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let rhos = rho_checkpoints(y, &value, &checkpoints)?;
    let at = |n: u64| rhos[checkpoints.binary_search(&(n as usize)).unwrap()];
    Ok(plan
        .into_iter()
        .map(|(n, lo, hi)| {
            let rho_prev = small(&levels[n - 1][0].rho());
            let rho_n = small(&levels[n][0].rho());
            let (rmin, rmax) = (at(lo), at(2 * hi));
            SandwichReport {
                n,
                len_min: lo,
                len_max: hi,
                rho_omega_prev: rho_prev,
                rho_omega: rho_n,
                rho_at_min: rmin,
                rho_at_double_max: rmax,
                lower_ok: rmax as i64 >= rho_prev as i64 - SANDWICH_SLACK,
                upper_ok: rmin as i64 <= 2 * rho_n as i64 + SANDWICH_SLACK,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Letter::*;

    fn silver() -> ExactReal {
        ExactReal::sqrt_of(2).unwrap() - ExactReal::one()
    }

    #[test]
    fn rational_rotation_example() {
        let enc = encode_orbit(&ExactReal::zero(), &ExactReal::ratio(2, 5), 5).unwrap();
        // 0, 2/5, 4/5, 1/5, 3/5 and 3/5 = 1 − θ opens C
        assert_eq!(enc.symbols, vec![A, A, C, A, C]);
        assert!(!enc.periodic);
        assert_eq!(
            enc.endpoint_hits,
            vec![(0, Endpoint::Zero), (4, Endpoint::OneMinusTheta)]
        );
        let p = discrepancy_profile(&enc);
        assert_eq!(p.sums, vec![1, 2, 1, 2, 1]);
        assert_eq!(p.rho, vec![1, 2, 2, 2, 2]);
        let q = profile_of_symbols(&[A, A, C, B, A]);
        assert_eq!(q.sums, vec![1, 2, 1, 0, 1]);
        assert_eq!(q.rho[4], 3);
        assert!(
            encode_orbit(&ExactReal::zero(), &ExactReal::ratio(2, 5), 6)
                .unwrap()
                .periodic
        );
    }

    #[test]
    fn profile_examples() {
        let p = profile_of_symbols(&[A, B, C]);
        assert_eq!(p.sums, vec![1, 0, -1]);
        assert_eq!(p.rho[2], 3);
        assert_eq!(profile_of_symbols(&[A; 7]).rho[6], 7);
    }

    #[test]
    fn fast_and_reference_routes_agree() {
        let th = silver();
        for x0 in [
            ExactReal::zero(),
            ExactReal::ratio(1, 3),
            ExactReal::ratio(5, 7),
            ExactReal::ratio(1, 2),
        ] {
            let a = encode_orbit(&x0, &th, 300).unwrap();
            let b = encode_orbit_reference(&x0, &th, 300).unwrap();
            assert_eq!(a, b);
        }
        let x0 = ExactReal::surd(crate::exact::rat(1, 3), crate::exact::rat(1, 5), 2).unwrap();
        assert_eq!(
            encode_orbit(&x0, &th, 200).unwrap(),
            encode_orbit_reference(&x0, &th, 200).unwrap()
        );
    }

    #[test]
    fn big_lattice_matches_reference() {
        let th = ExactReal::from_rational(
            crate::exact::rat(1, 3) + num_rational::BigRational::new(1.into(), BigInt::one() << 200),
        );
        let x0 = ExactReal::ratio(1, 7);
        let a = encode_orbit(&x0, &th, 100).unwrap();
        assert_eq!(a, encode_orbit_reference(&x0, &th, 100).unwrap());
    }

    #[test]
    fn range_checks() {
        assert!(matches!(
            encode_orbit(&ExactReal::zero(), &ExactReal::ratio(1, 2), 3),
            Err(Error::ThetaRange(_))
        ));
        assert!(matches!(
            encode_orbit(&ExactReal::one(), &silver(), 3),
            Err(Error::StartRange(_))
        ));
    }

    #[test]
    fn checkpoints_match_profile() {
        let th = silver();
        let x0 = ExactReal::ratio(2, 9);
        let p = discrepancy_profile(&encode_orbit(&x0, &th, 1000).unwrap());
        let cps = [0, 1, 10, 10, 999, 1000];
        let r = rho_checkpoints(&x0, &th, &cps).unwrap();
        assert_eq!(r, vec![0, p.rho[0], p.rho[9], p.rho[9], p.rho[998], p.rho[999]]);
    }

    #[test]
    fn special_point_for_silver() {
        let s = CFExpansion::periodic(&[], &[2]).unwrap();
        let m0 = verify_special_encoding(&s, 0, 1).unwrap();
        assert_eq!(m0.mismatches, 0);
        let m = verify_special_encoding(&s, 2, 1).unwrap();
        assert!(m.mismatches <= MAX_ENCODING_ERRORS);
        assert_eq!(m.word_len, 29);
    }

    #[test]
    fn silver_sandwich() {
        let s = CFExpansion::periodic(&[], &[2]).unwrap();
        for y in [
            ExactReal::ratio(1, 11),
            ExactReal::ratio(3, 4),
            ExactReal::ratio(123, 1000),
        ] {
            let r = sandwich_check(&y, &s, 3).unwrap();
            assert!(r.holds(), "{r:?}");
        }
    }

    #[test]
    fn csv_export() {
        let p = profile_of_symbols(&[A, C]);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "i,S_i,rho_i\n1,1,1\n2,0,2\n");
    }
}
