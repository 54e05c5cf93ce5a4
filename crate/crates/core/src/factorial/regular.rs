use std::fmt;

use crate::design::{AliasReport, AliasString, Design};
use crate::error::{Error, Result};

use super::two_level;

/// Largest number of variables for which 2^d rows are enumerated.
pub const MAX_FACTORIAL_VARS: usize = 20;

/// A factorial effect as a set of variables (bit i = variable i, 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub u64);

impl Word {
    pub fn from_vars(vars: &[usize]) -> Self {
        Word(vars.iter().fold(0u64, |acc, &v| acc ^ (1 << v)))
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Product of two effects (x_i² = 1).
    pub fn times(self, other: Word) -> Word {
        Word(self.0 ^ other.0)
    }

    pub fn vars(self) -> Vec<usize> {
        (0..64).filter(|i| self.0 >> i & 1 == 1).collect()
    }

    /// Canonical ordering key: by length, then lexicographic on variables.
    fn order_key(self) -> (u32, Vec<usize>) {
        (self.len(), self.vars())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "I");
        }
        for v in self.vars() {
            write!(f, "x{}", v + 1)?;
        }
        Ok(())
    }
}

/// Generators of a regular 2^(d−q) fraction with their signs.
#[derive(Debug, Clone, PartialEq)]
pub struct DefiningWordSet {
    d: usize,
    words: Vec<Word>,
    signs: Vec<i8>,
}

fn gf2_rank(words: &[Word]) -> usize {
    let mut rows: Vec<u64> = words.iter().map(|w| w.0).collect();
    let mut rank = 0;
    for bit in 0..64 {
        if let Some(p) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) {
            rows.swap(rank, p);
            for r in 0..rows.len() {
                if r != rank && rows[r] >> bit & 1 == 1 {
                    rows[r] ^= rows[rank];
                }
            }
            rank += 1;
        }
    }
    rank
}

impl DefiningWordSet {
    /// Validates generators over `d` variables; signs default to +1.
    pub fn new(d: usize, words: Vec<Word>, signs: Option<Vec<i8>>) -> Result<Self> {
        let q = words.len();
        if q == 0 || q >= d {
            return Err(Error::InvalidGenerator(format!("need 1 <= q < d, got q = {q}, d = {d}")));
        }
        if d > 63 {
            return Err(Error::InvalidGenerator("at most 63 variables".into()));
        }
        if let Some(w) = words.iter().find(|w| w.0 >> d != 0) {
            return Err(Error::InvalidGenerator(format!("word {w} uses a variable beyond x{d}")));
        }
        let signs = signs.unwrap_or_else(|| vec![1; q]);
        if signs.len() != q || signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::InvalidGenerator("one sign of +1 or -1 per word".into()));
        }
        if gf2_rank(&words) != q {
            return Err(Error::InvalidGenerator("words are not independent".into()));
        }
        let set = Self { d, words, signs };
        if let Some((w, _)) = set.relation().into_iter().find(|(w, _)| w.len() < 2) {
            return Err(Error::InvalidGenerator(format!("relation contains {w}, forcing a constant column")));
        }
        Ok(set)
    }

    /// Parses `"1234;235"` (single-digit variables) or `"1,2,11;3,4,12"`.
    pub fn parse(d: usize, spec: &str, signs: Option<Vec<i8>>) -> Result<Self> {
        let mut words = Vec::new();
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let vars: Vec<usize> = if part.contains(',') {
                part.split(',')
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::InvalidGenerator(format!("bad word {part:?}")))?
            } else {
                part.chars()
                    .map(|c| c.to_digit(10).map(|v| v as usize))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::InvalidGenerator(format!("bad word {part:?}")))?
            };
            if vars.iter().any(|&v| v == 0 || v > d) {
                return Err(Error::InvalidGenerator(format!("word {part:?} out of range 1..={d}")));
            }
            let zero_based: Vec<usize> = vars.iter().map(|v| v - 1).collect();
            words.push(Word::from_vars(&zero_based));
        }
        Self::new(d, words, signs)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// All 2^q − 1 products of the generators with their signs, ordered by
    /// word length then lexicographically.
    pub fn relation(&self) -> Vec<(Word, i8)> {
        let q = self.words.len();
        let mut rel: Vec<(Word, i8)> = (1u64..1 << q)
            .map(|mask| {
                (0..q).filter(|j| mask >> j & 1 == 1).fold((Word(0), 1i8), |(w, s), j| {
                    (w.times(self.words[j]), s * self.signs[j])
                })
            })
            .collect();
        rel.sort_by_key(|(w, _)| w.order_key());
        rel
    }

    pub fn resolution(&self) -> u32 {
        self.relation().iter().map(|(w, _)| w.len()).min().unwrap_or(0)
    }

    /// Aliases of an effect: its product with every word in the relation,
    /// with coefficient equal to the word's sign.
    pub fn aliases_of(&self, effect: Word) -> Vec<(Word, i8)> {
        let mut out: Vec<(Word, i8)> = self.relation().into_iter().map(|(w, s)| (effect.times(w), s)).collect();
        out.sort_by_key(|(w, _)| w.order_key());
        out
    }
}

/// Full 2^d factorial in standard order with x1 changing slowest.
pub fn full_factorial(d: usize) -> Result<Design> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if d > MAX_FACTORIAL_VARS {
        return Err(Error::TooLarge { runs: 1u128 << d, limit: 1u128 << MAX_FACTORIAL_VARS });
    }
    Ok(two_level(&full_rows(d), &format!("full factorial 2^{d}")))
}

fn full_rows(d: usize) -> Vec<Vec<i32>> {
    (0..1usize << d)
        .map(|r| (0..d).map(|j| if r >> (d - 1 - j) & 1 == 1 { 1 } else { -1 }).collect())
        .collect()
}

/// Regular 2^(d−q) fraction: the runs of the full factorial (in standard
/// order) on which every generator product equals its sign.
pub fn regular_fraction(words: &DefiningWordSet) -> Result<(Design, AliasReport)> {
    let d = words.d();
    if d > MAX_FACTORIAL_VARS {
        return Err(Error::TooLarge { runs: 1u128 << d, limit: 1u128 << MAX_FACTORIAL_VARS });
    }
    let rows: Vec<Vec<i32>> = full_rows(d)
        .into_iter()
        .filter(|row| {
            words.words().iter().zip(words.signs()).all(|(w, &s)| {
                w.vars().iter().map(|&v| row[v]).product::<i32>() == s as i32
            })
        })
        .collect();
    let q = words.words().len();
    debug_assert_eq!(rows.len(), 1 << (d - q));
    let label = words.words().iter().map(Word::to_string).collect::<Vec<_>>().join(",");
    let design = two_level(&rows, &format!("regular 2^({d}-{q}) I={label}"));
    Ok((design, alias_report(words)))
}

fn alias_report(words: &DefiningWordSet) -> AliasReport {
    let d = words.d();
    let relation = words.relation();
    let sign = |s: i8| if s > 0 { "+" } else { "-" };
    let mut effects: Vec<Word> = (0..d).map(|i| Word::from_vars(&[i])).collect();
    for i in 0..d {
        for j in i + 1..d {
            effects.push(Word::from_vars(&[i, j]));
        }
    }
    let aliased = effects
        .into_iter()
        .map(|e| AliasString {
            term: e.to_string(),
            aliases: words.aliases_of(e).into_iter().map(|(w, s)| (w.to_string(), s as f64)).collect(),
        })
        .collect();
    AliasReport {
        defining_relation: relation.iter().map(|(w, s)| format!("{}{w}", sign(*s))).collect(),
        resolution: Some(words.resolution()),
        aliased,
        ..Default::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_factorial_two_vars_is_orthogonal() {
        let d = full_factorial(2).unwrap();
        let c0 = d.column(0);
        let c1 = d.column(1);
        assert_eq!(c0.iter().zip(&c1).map(|(a, b)| a * b).sum::<f64>(), 0.0);
        assert_eq!(full_factorial(1).unwrap().rows(), vec![vec![-1.0], vec![1.0]]);
    }

    #[test]
    fn full_factorial_guard() {
        assert!(matches!(full_factorial(21), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn dependent_words_rejected() {
        let w = |v: &[usize]| Word::from_vars(v);
        let r = DefiningWordSet::new(5, vec![w(&[0, 1, 2]), w(&[2, 3, 4]), w(&[0, 1, 3, 4])], None);
        assert!(matches!(r, Err(Error::InvalidGenerator(_))));
    }

    #[test]
    fn parse_both_word_formats() {
        let a = DefiningWordSet::parse(4, "1234", None).unwrap();
        let b = DefiningWordSet::parse(4, "1,2,3,4", None).unwrap();
        assert_eq!(a, b);
        assert!(DefiningWordSet::parse(4, "125", None).is_err());
    }

    #[test]
    fn word_products() {
        let a = Word::from_vars(&[0, 1, 2, 3]);
        assert_eq!(Word::from_vars(&[0]).times(a).to_string(), "x2x3x4");
        assert_eq!(a.times(a), Word(0));
    }

    #[test]
    fn negative_sign_selects_complementary_half() {
        let ws = DefiningWordSet::parse(3, "123", Some(vec![-1])).unwrap();
        let (d, _) = regular_fraction(&ws).unwrap();
        for row in d.rows() {
            assert_eq!(row.iter().product::<f64>(), -1.0);
        }
    }
}
