//! Pattern sets (the constraint templates) and the textual pattern shorthand.

use std::collections::BTreeMap;

use super::{letter_from_char, Alphabet, PartialWord, Symbol, WordError};

/// A finite set of patterns together with the period bound and the per-length
/// branching thresholds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    patterns: Vec<PartialWord>,
    period_bound: usize,
    thresholds: BTreeMap<usize, u64>,
}

impl PatternSet {
    /// Validates: patterns non-empty, `period_bound >= 2 * max length`, and
    /// thresholds positive and defined for exactly the occurring lengths.
    pub fn new(
        patterns: Vec<PartialWord>,
        period_bound: usize,
        thresholds: BTreeMap<usize, u64>,
    ) -> Result<Self, WordError> {
        if patterns.is_empty() {
            return Err(WordError::EmptyPatternSet);
        }
        if patterns.iter().any(|p| p.is_empty()) {
            return Err(WordError::EmptyPattern);
        }
        // it is a set: drop exact duplicates, keep first-seen order
        let mut dedup: Vec<PartialWord> = Vec::with_capacity(patterns.len());
        for p in patterns {
            if !dedup.contains(&p) {
                dedup.push(p);
            }
        }
        let max_len = dedup.iter().map(|p| p.len()).max().unwrap();
        if period_bound < 2 * max_len {
            return Err(WordError::PeriodBoundTooSmall {
                bound: period_bound,
                max_len,
            });
        }
        for p in &dedup {
            match thresholds.get(&p.len()) {
                None => return Err(WordError::ThresholdMissing(p.len())),
                Some(0) => return Err(WordError::ThresholdZero(p.len())),
                Some(_) => {}
            }
        }
        for &len in thresholds.keys() {
            if !dedup.iter().any(|p| p.len() == len) {
                return Err(WordError::ThresholdUnusedLength(len));
            }
        }
        Ok(PatternSet {
            patterns: dedup,
            period_bound,
            thresholds,
        })
    }

    pub fn patterns(&self) -> &[PartialWord] {
        &self.patterns
    }

    pub fn period_bound(&self) -> usize {
        self.period_bound
    }

    pub fn threshold(&self, len: usize) -> u64 {
        self.thresholds[&len]
    }

    pub fn thresholds(&self) -> &BTreeMap<usize, u64> {
        &self.thresholds
    }

    /// The distinct pattern lengths, ascending.
    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.thresholds.keys().copied()
    }

    pub fn max_len(&self) -> usize {
        *self.thresholds.keys().last().unwrap()
    }
}

/// Expands a pattern expression into one or more patterns.
///
/// A plain string (`.`, `0.1`, …) is a single pattern. A braced expression
/// expands: tokens are `.`, `.^N`, `.^i` (with an `i=lo..hi` binding after
/// `:`), literal digit letters, and letter variables `a`, `b`, … which range
/// over the whole alphabet. Examples over `k=4`:
///
/// * `{.^9}` — one pattern of nine holes;
/// * `{. a . b}` — the 16 patterns hole,letter,hole,letter;
/// * `{.^i a : i=2..4}` — twelve patterns of 2..4 holes then a letter.
///
/// Letter variables require `k <= 10` so that they cannot collide with the
/// `'a'..'z'` letters of larger alphabets.
pub fn expand_patterns(expr: &str, alphabet: &Alphabet) -> Result<Vec<PartialWord>, WordError> {
    let expr = expr.trim();
    if !expr.starts_with('{') {
        return Ok(vec![PartialWord::parse(expr, alphabet)?]);
    }
    let body = expr
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| WordError::BadPatternExpr(format!("unbalanced braces in {expr:?}")))?;

    let (tokens_part, binding_part) = match body.split_once(':') {
        Some((t, b)) => (t, Some(b)),
        None => (body, None),
    };

    let range = match binding_part {
        None => None,
        Some(b) => Some(parse_binding(b.trim())?),
    };

    #[derive(Clone)]
    enum Token {
        Holes(usize),
        HolesVar,
        Letter(Symbol),
        Var(char),
    }

    let mut tokens = Vec::new();
    let mut vars: Vec<char> = Vec::new();
    for tok in tokens_part.split_whitespace() {
        if tok == "." {
            tokens.push(Token::Holes(1));
        } else if let Some(rest) = tok.strip_prefix(".^") {
            if rest == "i" {
                if range.is_none() {
                    return Err(WordError::BadPatternExpr(format!(
                        "{tok:?} used without an i=lo..hi binding"
                    )));
                }
                tokens.push(Token::HolesVar);
            } else {
                let n: usize = rest.parse().map_err(|_| {
                    WordError::BadPatternExpr(format!("bad hole count in {tok:?}"))
                })?;
                tokens.push(Token::Holes(n));
            }
        } else if tok.len() == 1 {
            let c = tok.chars().next().unwrap();
            if c.is_ascii_digit() {
                let l = letter_from_char(c).unwrap();
                alphabet.check(l)?;
                tokens.push(Token::Letter(Symbol::Letter(l)));
            } else if c.is_ascii_lowercase() {
                if alphabet.size() > 10 {
                    return Err(WordError::BadPatternExpr(format!(
                        "letter variable {c:?} is ambiguous for alphabets larger than 10"
                    )));
                }
                if !vars.contains(&c) {
                    vars.push(c);
                }
                tokens.push(Token::Var(c));
            } else {
                return Err(WordError::BadPatternExpr(format!("bad token {tok:?}")));
            }
        } else {
            return Err(WordError::BadPatternExpr(format!("bad token {tok:?}")));
        }
    }
    if tokens.is_empty() {
        return Err(WordError::BadPatternExpr("empty braces".into()));
    }

    let i_values: Vec<usize> = match range {
        Some((lo, hi)) => (lo..=hi).collect(),
        None => vec![0], // unused
    };
    let k = alphabet.size() as u8;
    let mut out = Vec::new();
    for &i in &i_values {
        // one assignment vector per combination, first variable slowest
        let combos = (k as usize).pow(vars.len() as u32);
        for mut combo in 0..combos {
            let mut assign = BTreeMap::new();
            for &v in vars.iter().rev() {
                assign.insert(v, (combo % k as usize) as u8);
                combo /= k as usize;
            }
            let mut symbols = Vec::new();
            for t in &tokens {
                match t {
                    Token::Holes(n) => symbols.extend(std::iter::repeat_n(Symbol::Hole, *n)),
                    Token::HolesVar => symbols.extend(std::iter::repeat_n(Symbol::Hole, i)),
                    Token::Letter(s) => symbols.push(*s),
                    Token::Var(c) => symbols.push(Symbol::Letter(assign[c])),
                }
            }
            out.push(PartialWord::new(symbols, alphabet)?);
        }
    }
    Ok(out)
}

fn parse_binding(b: &str) -> Result<(usize, usize), WordError> {
    let bad = || WordError::BadPatternExpr(format!("bad binding {b:?}, expected i=lo..hi"));
    let rest = b.strip_prefix("i=").ok_or_else(bad)?;
    let (lo, hi) = rest.split_once("..").ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(k: usize) -> Alphabet {
        Alphabet::new(k).unwrap()
    }

    #[test]
    fn plain_pattern_is_single() {
        let ps = expand_patterns("0.1", &a(3)).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].to_string(), "0.1");
    }

    #[test]
    fn hole_run_macro() {
        let ps = expand_patterns("{.^9}", &a(3)).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].to_string(), ".........");
    }

    #[test]
    fn letter_variables_enumerate_the_alphabet() {
        let ps = expand_patterns("{. a . b}", &a(6)).unwrap();
        assert_eq!(ps.len(), 36);
        assert_eq!(ps[0].to_string(), ".0.0");
        assert_eq!(ps[35].to_string(), ".5.5");
        // all distinct
        let set: std::collections::BTreeSet<_> = ps.iter().collect();
        assert_eq!(set.len(), 36);
    }

    #[test]
    fn indexed_hole_run_with_variable() {
        let ps = expand_patterns("{.^i a : i=18..26}", &a(3)).unwrap();
        assert_eq!(ps.len(), 9 * 3);
        assert_eq!(ps[0].len(), 19);
        assert_eq!(ps[0].to_string(), format!("{}0", ".".repeat(18)));
        assert_eq!(ps.last().unwrap().len(), 27);
    }

    #[test]
    fn macro_errors() {
        assert!(expand_patterns("{.^i a}", &a(3)).is_err());
        assert!(expand_patterns("{xy}", &a(3)).is_err());
        assert!(expand_patterns("{a}", &a(12)).is_err());
        assert!(expand_patterns("{}", &a(3)).is_err());
        assert!(expand_patterns("{. : i=5..2}", &a(3)).is_err());
    }

    #[test]
    fn pattern_set_validation() {
        let al = a(3);
        let p1 = PartialWord::parse(".", &al).unwrap();
        let mut f = BTreeMap::new();
        f.insert(1usize, 2u64);
        let ps = PatternSet::new(vec![p1.clone(), p1.clone()], 2, f.clone()).unwrap();
        assert_eq!(ps.patterns().len(), 1, "duplicates collapse");
        assert_eq!(ps.threshold(1), 2);

        assert_eq!(
            PatternSet::new(vec![p1.clone()], 1, f.clone()).unwrap_err(),
            WordError::PeriodBoundTooSmall { bound: 1, max_len: 1 }
        );
        let mut f2 = f.clone();
        f2.insert(3, 1);
        assert_eq!(
            PatternSet::new(vec![p1.clone()], 2, f2).unwrap_err(),
            WordError::ThresholdUnusedLength(3)
        );
        assert_eq!(
            PatternSet::new(vec![p1.clone()], 2, BTreeMap::new()).unwrap_err(),
            WordError::ThresholdMissing(1)
        );
        let mut f3 = BTreeMap::new();
        f3.insert(1usize, 0u64);
        assert_eq!(
            PatternSet::new(vec![p1], 2, f3).unwrap_err(),
            WordError::ThresholdZero(1)
        );
        assert_eq!(
            PatternSet::new(vec![], 2, f).unwrap_err(),
            WordError::EmptyPatternSet
        );
    }
}
