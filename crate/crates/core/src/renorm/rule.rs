//! The substitution `σ(θ)` selected by the leading quotients of `θ`.
//!
//! With `X = A^{k+1}B^{k−1}C`, `Y = A^kB^{k−1}C` and `Z = A^kB^kC`:
//!
//! | case              | A            | B            | C            |
//! |-------------------|--------------|--------------|--------------|
//! | a₁ = 2k, a₃ ≠ 1   | X·Y^{a₂−1}   | Z·Y^{a₂−1}   | Z·Y^{a₂}     |
//! | a₁ = 2k, a₃ = 1   | Z·Y^{a₂}     | X·Y^{a₂}     | X·Y^{a₂−1}   |
//! | a₁ = 2k + 1       | Z            | X            | A            |
//! | a₁ = 1            | A            | B            | C            |

use serde::Serialize;

use super::stats::{Letter, WordStats};
use crate::cf::CFExpansion;
use crate::error::{Error, Result};
use crate::trajectory::LeadingQuotients;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RuleCase {
    EvenA3Ne1 { k: u64, a2: u64 },
    EvenA3Eq1 { k: u64, a2: u64 },
    Odd { k: u64 },
    One,
}

/// A block of letter runs repeated `repeat` times.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    pub runs: Vec<(Letter, u64)>,
    pub repeat: u64,
}

impl Segment {
    fn new(runs: Vec<(Letter, u64)>, repeat: u64) -> Self {
        let runs = runs.into_iter().filter(|&(_, c)| c > 0).collect();
        Segment { runs, repeat }
    }

    /// `(#A + #B, #C)` in the segment.
    fn counts(&self) -> (u128, u128) {
        let (mut ab, mut c) = (0u128, 0u128);
        for &(l, n) in &self.runs {
            match l {
                Letter::C => c += n as u128,
                _ => ab += n as u128,
            }
        }
        (ab * self.repeat as u128, c * self.repeat as u128)
    }
}

/// A run-length encoded image word.
pub type Image = Vec<Segment>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubstitutionRule {
    case: RuleCase,
    images: [Image; 3],
}

fn x_block(k: u64) -> Vec<(Letter, u64)> {
    vec![(Letter::A, k + 1), (Letter::B, k - 1), (Letter::C, 1)]
}

fn y_block(k: u64) -> Vec<(Letter, u64)> {
    vec![(Letter::A, k), (Letter::B, k - 1), (Letter::C, 1)]
}

fn z_block(k: u64) -> Vec<(Letter, u64)> {
    vec![(Letter::A, k), (Letter::B, k), (Letter::C, 1)]
}

fn image(parts: Vec<(Vec<(Letter, u64)>, u64)>) -> Image {
    parts
        .into_iter()
        .filter(|(_, r)| *r > 0)
        .map(|(runs, r)| Segment::new(runs, r))
        .collect()
}

impl SubstitutionRule {
    pub fn from_case(case: RuleCase) -> Self {
        let images = match case {
            RuleCase::EvenA3Ne1 { k, a2 } => [
                image(vec![(x_block(k), 1), (y_block(k), a2 - 1)]),
                image(vec![(z_block(k), 1), (y_block(k), a2 - 1)]),
                image(vec![(z_block(k), 1), (y_block(k), a2)]),
            ],
            RuleCase::EvenA3Eq1 { k, a2 } => [
                image(vec![(z_block(k), 1), (y_block(k), a2)]),
                image(vec![(x_block(k), 1), (y_block(k), a2)]),
                image(vec![(x_block(k), 1), (y_block(k), a2 - 1)]),
            ],
            RuleCase::Odd { k } => [
                image(vec![(z_block(k), 1)]),
                image(vec![(x_block(k), 1)]),
                image(vec![(vec![(Letter::A, 1)], 1)]),
            ],
            RuleCase::One => [
                image(vec![(vec![(Letter::A, 1)], 1)]),
                image(vec![(vec![(Letter::B, 1)], 1)]),
                image(vec![(vec![(Letter::C, 1)], 1)]),
            ],
        };
        SubstitutionRule { case, images }
    }

    /// The rule for a number with the given leading quotients.
    pub fn from_quotients(q: &LeadingQuotients) -> Result<Self> {
        Ok(Self::from_case(rule_case(q)?))
    }

    /// The rule `σ(θ)` for an expansion.
    pub fn for_expansion(cf: &CFExpansion) -> Result<Self> {
        Self::from_quotients(&LeadingQuotients {
            a1: cf.a1(),
            a2: cf.quotient(1),
            a3: cf.quotient(2),
        })
    }

    pub fn case(&self) -> RuleCase {
        self.case
    }

    pub fn image(&self, l: Letter) -> &Image {
        &self.images[l.index()]
    }

    /// `(#A + #B, #C)` of the image of `l`.
    pub fn counts(&self, l: Letter) -> (u128, u128) {
        self.image(l).iter().fold((0, 0), |(ab, c), s| {
            let (x, y) = s.counts();
            (ab + x, c + y)
        })
    }

    /// Explicit image of a letter.
    pub fn image_word(&self, l: Letter) -> Vec<Letter> {
        let mut out = Vec::new();
        for seg in self.image(l) {
            for _ in 0..seg.repeat {
                for &(x, n) in &seg.runs {
                    out.extend(std::iter::repeat_n(x, n as usize));
                }
            }
        }
        out
    }

    /// Stats of `image(l)` where each letter `Y` stands for a word with
    /// stats `inner[Y]`.
    pub fn image_stats(&self, l: Letter, inner: &[WordStats; 3]) -> WordStats {
        self.image(l).iter().fold(WordStats::empty(), |acc, seg| {
            let block = seg
                .runs
                .iter()
                .fold(WordStats::empty(), |b, &(x, n)| b.concat(&inner[x.index()].repeat(n)));
            acc.concat(&block.repeat(seg.repeat))
        })
    }
}

pub(crate) fn rule_case(q: &LeadingQuotients) -> Result<RuleCase> {
    let need = |needed: usize| Error::Exhausted {
        step: 0,
        needed,
        available: 1 + usize::from(q.a2.is_some()) + usize::from(q.a3.is_some()),
    };
    Ok(match q.a1 {
        1 => RuleCase::One,
        a1 if a1 % 2 == 1 => RuleCase::Odd { k: (a1 - 1) / 2 },
        a1 => {
            let k = a1 / 2;
            let a2 = q.a2.ok_or_else(|| need(3))?;
            let a3 = q.a3.ok_or_else(|| need(3))?;
            if a3 == 1 {
                RuleCase::EvenA3Eq1 { k, a2 }
            } else {
                RuleCase::EvenA3Ne1 { k, a2 }
            }
        }
    })
}

/// `[stats σ⁽ⁱ⁾(A), stats σ⁽ⁱ⁾(B), stats σ⁽ⁱ⁾(C)]` for `i = 0, …, rules.len()`,
/// where `σ⁽ⁱ⁾ = σ₀ ∘ ⋯ ∘ σ_{i−1}`.
///
/// Level `i + 1` folds rule `i`'s images over level `i`, so the cost is
/// linear in the number of rules and independent of the word lengths.
pub fn level_stats(rules: &[SubstitutionRule]) -> Vec<[WordStats; 3]> {
    let mut levels = Vec::with_capacity(rules.len() + 1);
    let mut cur = Letter::ALL.map(WordStats::letter);
    for rule in rules {
        let next = Letter::ALL.map(|l| rule.image_stats(l, &cur));
        levels.push(std::mem::replace(&mut cur, next));
    }
    levels.push(cur);
    levels
}

/// Stats of `σ⁽ⁿ⁾(letter)` with `n = rules.len()`.
pub fn compose_stats(rules: &[SubstitutionRule], letter: Letter) -> WordStats {
    level_stats(rules).pop().unwrap()[letter.index()].clone()
}

/// The explicit word `σ⁽ⁿ⁾(letter)`, refused when longer than `max_len`.
pub fn expand_word(rules: &[SubstitutionRule], letter: Letter, max_len: u64) -> Result<Vec<Letter>> {
    let len = compose_lengths(rules)[letter.index()];
    if len > max_len as u128 {
        return Err(Error::LengthBound {
            len: len.to_string(),
            max: max_len,
        });
    }
    let mut word = vec![letter];
    for rule in rules.iter().rev() {
        let images = Letter::ALL.map(|l| rule.image_word(l));
        word = word.iter().flat_map(|l| images[l.index()].iter().copied()).collect();
    }
    Ok(word)
}

/// Lengths `|σ⁽ⁿ⁾(A)|, |σ⁽ⁿ⁾(B)|, |σ⁽ⁿ⁾(C)|` from letter counts, saturating.
fn compose_lengths(rules: &[SubstitutionRule]) -> [u128; 3] {
    let mut cur = [1u128; 3];
    for rule in rules {
        cur = Letter::ALL.map(|l| {
            let mut total = 0u128;
            for seg in rule.image(l) {
                let block: u128 = seg
                    .runs
                    .iter()
                    .map(|&(x, n)| cur[x.index()].saturating_mul(n as u128))
                    .fold(0u128, u128::saturating_add);
                total = total.saturating_add(block.saturating_mul(seg.repeat as u128));
            }
            total
        });
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use Letter::*;

    fn lq(a1: u64, a2: u64, a3: u64) -> LeadingQuotients {
        LeadingQuotients {
            a1,
            a2: Some(a2),
            a3: Some(a3),
        }
    }

    fn word(s: &str) -> Vec<Letter> {
        s.chars().map(|c| Letter::from_char(c).unwrap()).collect()
    }

    #[test]
    fn odd_rule() {
        let r = SubstitutionRule::from_quotients(&lq(3, 7, 7)).unwrap();
        assert_eq!(r.image_word(A), word("ABC"));
        assert_eq!(r.image_word(B), word("AAC"));
        assert_eq!(r.image_word(C), word("A"));
    }

    #[test]
    fn identity_rule() {
        let r = SubstitutionRule::from_quotients(&lq(1, 4, 2)).unwrap();
        for l in Letter::ALL {
            assert_eq!(r.image_word(l), vec![l]);
        }
    }

    #[test]
    fn even_rule_k1_a2_2() {
        let r = SubstitutionRule::from_quotients(&lq(2, 2, 2)).unwrap();
        assert_eq!(r.image_word(A), word("AACAC"));
        assert_eq!(r.image_word(B), word("ABCAC"));
        assert_eq!(r.image_word(C), word("ABCACAC"));
        let r = SubstitutionRule::from_quotients(&lq(2, 2, 1)).unwrap();
        assert_eq!(r.image_word(A), word("ABCACAC"));
        assert_eq!(r.image_word(B), word("AACACAC"));
        assert_eq!(r.image_word(C), word("AACAC"));
    }

    #[test]
    fn a_and_b_images_have_equal_length() {
        for a1 in 1..9 {
            for a2 in 1..5 {
                for a3 in 1..3 {
                    let r = SubstitutionRule::from_quotients(&lq(a1, a2, a3)).unwrap();
                    assert_eq!(r.image_word(A).len(), r.image_word(B).len());
                    assert_eq!(r.counts(A), r.counts(B));
                }
            }
        }
    }

    #[test]
    fn even_rule_needs_three_quotients() {
        let q = LeadingQuotients {
            a1: 4,
            a2: Some(2),
            a3: None,
        };
        assert!(matches!(
            SubstitutionRule::from_quotients(&q),
            Err(Error::Exhausted { .. })
        ));
    }

    #[test]
    fn compose_examples() {
        let silver = SubstitutionRule::from_quotients(&lq(2, 2, 2)).unwrap();
        let s = compose_stats(&[silver], A);
        assert_eq!(s, WordStats::of_word(&word("AACAC")));
        assert_eq!(
            (s.len.clone(), s.sum.clone(), s.maxp.clone(), s.minp.clone()),
            (5.into(), 1.into(), 2.into(), 1.into())
        );
        assert_eq!(s.rho(), 2.into());

        let one = SubstitutionRule::from_case(RuleCase::One);
        assert_eq!(
            compose_stats(&[one.clone(), one.clone(), one.clone()], A),
            WordStats::letter(A)
        );

        let odd = SubstitutionRule::from_case(RuleCase::Odd { k: 1 });
        let s = compose_stats(std::slice::from_ref(&odd), A);
        assert_eq!(s, WordStats::of_word(&word("ABC")));
        assert_eq!(s.rho(), 3.into());
    }

    #[test]
    fn expand_examples() {
        let odd = SubstitutionRule::from_case(RuleCase::Odd { k: 1 });
        let one = SubstitutionRule::from_case(RuleCase::One);
        assert_eq!(expand_word(std::slice::from_ref(&odd), A, 10).unwrap(), word("ABC"));
        assert_eq!(expand_word(&[], A, 10).unwrap(), word("A"));
        assert_eq!(expand_word(&[one, odd.clone()], A, 10).unwrap(), word("ABC"));
        assert!(matches!(expand_word(&[odd], A, 2), Err(Error::LengthBound { .. })));
    }

    #[test]
    fn composition_order() {
        // σ⁽²⁾(A) = σ₀(σ₁(A)): apply the later rule first
        let even = SubstitutionRule::from_quotients(&lq(2, 2, 2)).unwrap();
        let odd = SubstitutionRule::from_case(RuleCase::Odd { k: 1 });
        let w = expand_word(&[even.clone(), odd.clone()], A, 100).unwrap();
        let expect: Vec<Letter> = word("ABC").iter().flat_map(|&l| even.image_word(l)).collect();
        assert_eq!(w, expect);
    }
}
