use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// A letter of the coding alphabet: `A = [0, 1/2)`, `B = [1/2, 1 − θ)`,
/// `C = [1 − θ, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
    C,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::A, Letter::B, Letter::C];

    /// `χ_[0,1/2) − χ_[1/2,1)` on the letter's interval.
    pub fn weight(self) -> i64 {
        match self {
            Letter::A => 1,
            Letter::B | Letter::C => -1,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::B => 'B',
            Letter::C => 'C',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'A' => Some(Letter::A),
            'B' => Some(Letter::B),
            'C' => Some(Letter::C),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Summary of a word: length, total weight `S`, and the largest and smallest
/// nonempty prefix sums. Concatenation is associative, so words never need
/// to be materialized.
///
/// The empty word has `len == 0`; its `maxp`/`minp` are placeholders and it
/// acts as the identity under [`WordStats::concat`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordStats {
    #[serde(with = "crate::serde_big")]
    pub len: BigInt,
    #[serde(with = "crate::serde_big")]
    pub sum: BigInt,
    #[serde(with = "crate::serde_big")]
    pub maxp: BigInt,
    #[serde(with = "crate::serde_big")]
    pub minp: BigInt,
}

impl Default for WordStats {
    fn default() -> Self {
        Self::empty()
    }
}

impl WordStats {
    pub fn empty() -> Self {
        WordStats {
            len: BigInt::zero(),
            sum: BigInt::zero(),
            maxp: BigInt::zero(),
            minp: BigInt::zero(),
        }
    }

    pub fn letter(l: Letter) -> Self {
        let w = BigInt::from(l.weight());
        WordStats {
            len: BigInt::one(),
            sum: w.clone(),
            maxp: w.clone(),
            minp: w,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len.is_zero()
    }

    pub fn concat(&self, other: &Self) -> Self {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let shifted_max = &self.sum + &other.maxp;
        let shifted_min = &self.sum + &other.minp;
        WordStats {
            len: &self.len + &other.len,
            sum: &self.sum + &other.sum,
            maxp: if shifted_max > self.maxp {
                shifted_max
            } else {
                self.maxp.clone()
            },
            minp: if shifted_min < self.minp {
                shifted_min
            } else {
                self.minp.clone()
            },
        }
    }

    /// Stats of the word repeated `count` times, in O(1).
    pub fn repeat(&self, count: u64) -> Self {
        if count == 0 || self.is_empty() {
            return Self::empty();
        }
        let c = BigInt::from(count);
        let c1 = BigInt::from(count - 1);
        let positive = self.sum > BigInt::zero();
        let negative = self.sum < BigInt::zero();
        WordStats {
            len: &self.len * &c,
            sum: &self.sum * &c,
            // max over j < count of j·S + P⁺, attained at an end of the range
            maxp: if positive {
                &c1 * &self.sum + &self.maxp
            } else {
                self.maxp.clone()
            },
            minp: if negative {
                &c1 * &self.sum + &self.minp
            } else {
                self.minp.clone()
            },
        }
    }

    /// `ρ = 1 + max − min` over nonempty prefixes; zero for the empty word.
    pub fn rho(&self) -> BigInt {
        if self.is_empty() {
            return BigInt::zero();
        }
        BigInt::one() + &self.maxp - &self.minp
    }

    /// Stats of an explicit word, by a single left-to-right scan.
    pub fn of_word(word: &[Letter]) -> Self {
        let mut s = 0i64;
        let (mut hi, mut lo) = (i64::MIN, i64::MAX);
        for l in word {
            s += l.weight();
            hi = hi.max(s);
            lo = lo.min(s);
        }
        if word.is_empty() {
            return Self::empty();
        }
        WordStats {
            len: BigInt::from(word.len()),
            sum: BigInt::from(s),
            maxp: BigInt::from(hi),
            minp: BigInt::from(lo),
        }
    }
}

/// Writes a word in run-length form, e.g. `A2CAC`.
pub fn run_length(word: &[Letter]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < word.len() {
        let l = word[i];
        let mut j = i;
        while j < word.len() && word[j] == l {
            j += 1;
        }
        out.push(l.as_char());
        if j - i > 1 {
            out.push_str(&(j - i).to_string());
        }
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Letter::*;

    fn st(len: i64, sum: i64, maxp: i64, minp: i64) -> WordStats {
        WordStats {
            len: len.into(),
            sum: sum.into(),
            maxp: maxp.into(),
            minp: minp.into(),
        }
    }

    #[test]
    fn letters() {
        assert_eq!(WordStats::letter(A), st(1, 1, 1, 1));
        assert_eq!(WordStats::letter(C), st(1, -1, -1, -1));
        let ac = WordStats::letter(A).concat(&WordStats::letter(C));
        assert_eq!(ac, st(2, 0, 1, 0));
        assert_eq!(ac.rho(), BigInt::from(2));
    }

    #[test]
    fn empty_is_identity() {
        let w = WordStats::of_word(&[A, B, C]);
        assert_eq!(WordStats::empty().concat(&w), w);
        assert_eq!(w.concat(&WordStats::empty()), w);
        assert_eq!(w, st(3, -1, 1, -1));
        assert_eq!(w.rho(), BigInt::from(3));
    }

    #[test]
    fn repeat_matches_concatenation() {
        for word in [vec![A, A, C], vec![A, C], vec![B, C, A], vec![C, A, A, A, B]] {
            let s = WordStats::of_word(&word);
            let mut acc = WordStats::empty();
            for c in 0..6u64 {
                assert_eq!(s.repeat(c), acc, "{word:?} x{c}");
                acc = acc.concat(&s);
            }
        }
    }

    #[test]
    fn run_length_form() {
        assert_eq!(run_length(&[A, A, C, A, C]), "A2CAC");
        assert_eq!(run_length(&[]), "");
    }
}
