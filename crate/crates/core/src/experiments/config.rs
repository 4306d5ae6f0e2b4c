use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::emit::Format;
use crate::cf::{CFExpansion, ThetaSpec};
use crate::error::{Error, Result};

/// Parameters shared by the experiment drivers. Every field has a default,
/// so a config file only names what it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `θ` in the `cf:`/`cfper:`/`rat:` grammar; `None` means seeded random draws.
    pub theta_spec: Option<String>,
    pub depth: usize,
    pub orbit_len: usize,
    pub seed: u64,
    pub samples: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// Iterated-log order of the growth family.
    pub k: u32,
    pub epsilon: f64,
    /// Lower limit of `F(t) = ∫_C^t f`; defaults per family.
    pub c: Option<f64>,
    /// Starting points for orbit experiments, as `p/q`.
    pub points: Vec<String>,
    /// Levels (or orbit lengths) at which tables are sampled.
    pub checkpoints: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            theta_spec: None,
            depth: 30,
            orbit_len: 1_000_000,
            seed: 2024,
            samples: 20,
            output: None,
            format: Format::Csv,
            k: 2,
            epsilon: 0.0,
            c: None,
            points: Vec::new(),
            checkpoints: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    /// The configured `θ`, if any.
    pub fn theta(&self) -> Result<Option<CFExpansion>> {
        self.theta_spec
            .as_deref()
            .map(|s| s.parse::<ThetaSpec>()?.expansion())
            .transpose()
    }

    /// `theta_spec` as echoed into output headers.
    pub fn theta_label(&self) -> String {
        match self.theta() {
            Ok(Some(cf)) => cf.spec(),
            _ => "sampled".into(),
        }
    }
}

/// Best rational approximation to a decimal string with denominator at most
/// `max_den`. Ties keep the smaller denominator.
pub fn decimal_to_rational(s: &str, max_den: &BigInt) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a decimal number: {s:?}"));
    if !max_den.is_positive() {
        return Err(Error::InvalidArgument("denominator bound must be positive".into()));
    }
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let exact = BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32));
    let exact = if neg { -exact } else { exact };
    if exact.denom() <= max_den {
        return Ok(exact);
    }
    Ok(best_approximation(&exact, max_den))
}

/// Walks the convergents of `x` and finishes with the best semiconvergent.
fn best_approximation(x: &BigRational, max_den: &BigInt) -> BigRational {
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    loop {
        let (a, r) = num.div_mod_floor(&den);
        let q2 = &a * &q1 + &q0;
        if &q2 > max_den {
            // largest t with t·q1 + q0 ≤ max_den
            let t = (max_den - &q0) / &q1;
            let semi = BigRational::new(&t * &p1 + &p0, &t * &q1 + &q0);
            let conv = BigRational::new(p1.clone(), q1.clone());
            let d_semi = (&semi - x).abs();
            let d_conv = (&conv - x).abs();
            return if d_semi < d_conv { semi } else { conv };
        }
        let p2 = &a * &p1 + &p0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if r.is_zero() {
            return BigRational::new(p1, q1);
        }
        (num, den) = (den, r);
    }
}

/// Accepts the θ grammar or, failing that, a decimal that is converted
/// with the given denominator bound.
pub fn parse_theta_arg(s: &str, max_den: &BigInt) -> Result<ThetaSpec> {
    match s.parse::<ThetaSpec>() {
        Ok(spec) => Ok(spec),
        Err(e) if s.contains(':') => Err(e),
        Err(_) => Ok(ThetaSpec::rational(&decimal_to_rational(s, max_den)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn defaults_fill_missing_keys() {
        let c = ExperimentConfig::from_json(r#"{"depth": 50, "format": "json"}"#).unwrap();
        assert_eq!(c.depth, 50);
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.seed, ExperimentConfig::default().seed);
        assert!(ExperimentConfig::from_json(r#"{"dpeth": 50}"#).is_err());
    }

    #[test]
    fn theta_from_config() {
        let c = ExperimentConfig {
            theta_spec: Some("cfper:[][2]".into()),
            ..Default::default()
        };
        assert_eq!(c.theta().unwrap().unwrap(), CFExpansion::periodic(&[], &[2]).unwrap());
        assert_eq!(c.theta_label(), "cfper:[][2]");
        assert_eq!(ExperimentConfig::default().theta_label(), "sampled");
    }

    #[test]
    fn decimals() {
        let big = BigInt::from(1000);
        assert_eq!(decimal_to_rational("0.25", &big).unwrap(), rat(1, 4));
        assert_eq!(decimal_to_rational(".4142", &BigInt::from(100)).unwrap(), rat(41, 99));
        assert_eq!(
            decimal_to_rational("3.14159265", &BigInt::from(200)).unwrap(),
            rat(355, 113)
        );
        assert_eq!(
            decimal_to_rational("3.14159265", &BigInt::from(100)).unwrap(),
            rat(311, 99)
        );
        assert_eq!(decimal_to_rational("-0.5", &big).unwrap(), rat(-1, 2));
        assert!(decimal_to_rational("1e-3", &big).is_err());
        assert!(decimal_to_rational(".", &big).is_err());
    }

    #[test]
    fn brute_force_best_approximation() {
        let x = decimal_to_rational("0.41421356237", &BigInt::from(10).pow(12)).unwrap();
        for bound in 1..60i64 {
            let got = decimal_to_rational("0.41421356237", &BigInt::from(bound)).unwrap();
            let mut best = (rat(0, 1), rat(1, 1));
            for q in 1..=bound {
                for p in 0..=q {
                    let r = rat(p, q);
                    let d = (&r - &x).abs();
                    if d < best.1 {
                        best = (r, d);
                    }
                }
            }
            assert_eq!(got, best.0, "bound {bound}");
        }
    }

    #[test]
    fn theta_arguments() {
        let b = BigInt::from(100);
        assert_eq!(
            parse_theta_arg("0.4", &b).unwrap(),
            ThetaSpec::Rational(2.into(), 5.into())
        );
        assert_eq!(parse_theta_arg("cf:[2,3]", &b).unwrap(), ThetaSpec::Finite(vec![2, 3]));
        assert!(parse_theta_arg("cf:[0]", &b).is_err());
    }
}
