//! Seeded random `θ` for Monte Carlo runs.

use num_bigint::{BigInt, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cf::CFExpansion;

/// Default denominator exponent: `θ = k / 2²⁵⁶`.
pub const DEFAULT_BITS: u64 = 256;

/// The RNG for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index)
}

/// A uniform rational `k / 2^bits` in `(0, 1)` whose expansion has at
/// least `min_depth` quotients, resampling on the rare shortfall.
pub fn random_theta(rng: &mut ChaCha8Rng, bits: u64, min_depth: usize) -> CFExpansion {
    let den = BigInt::one() << bits;
    loop {
        let k = rng.gen_bigint_range(&BigInt::one(), &den);
        if k.is_zero() {
            continue;
        }
        let cf = CFExpansion::from_rational(&BigRational::new(k, den.clone())).expect("0 < k/2^bits < 1");
        if cf.available() >= min_depth {
            return cf;
        }
    }
}

/// Denominator bits giving depth `depth` with overwhelming probability. The
/// expansion of a random `k/2^b` has about `0.58·b` quotients, with
/// fluctuations of order `√b`.
pub fn bits_for_depth(depth: usize) -> u64 {
    DEFAULT_BITS.max(2 * depth as u64 + 64)
}

/// `count` independent samples; sample `i` depends only on `(seed, i)`.
pub fn theta_samples(seed: u64, count: usize, min_depth: usize) -> Vec<CFExpansion> {
    let bits = bits_for_depth(min_depth);
    (0..count as u64)
        .map(|i| random_theta(&mut sample_rng(seed, i), bits, min_depth))
        .collect()
}

/// Folds `θ > 1/2` onto `1 − θ`, which keeps the law uniform on `(0, 1/2)`.
pub fn below_half(cf: &CFExpansion) -> CFExpansion {
    if cf.a1() == 1 {
        cf.gap_map().expect("a₁ = 1 needs only a₂")
    } else {
        cf.clone()
    }
}

/// Like [`theta_samples`] but folded into `(0, 1/2)`.
pub fn theta_samples_below_half(seed: u64, count: usize, min_depth: usize) -> Vec<CFExpansion> {
    theta_samples(seed, count, min_depth + 1)
        .iter()
        .map(below_half)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_index() {
        let a = theta_samples(7, 5, 30);
        let b = theta_samples(7, 5, 30);
        assert_eq!(a, b);
        assert_eq!(a[3], random_theta(&mut sample_rng(7, 3), DEFAULT_BITS, 30));
        assert!(a.iter().all(|c| c.available() >= 30));
    }
}
