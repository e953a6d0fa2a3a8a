//! Alphabets, words and partial words, square detection, compatibility.
//!
//! Letters are the integers `0..k` and render as `'0'..'9'` then `'a'..'z'`
//! (so `k <= 36`); the hole renders as `'.'` and matches any letter.

use std::fmt;

use thiserror::Error;

mod pattern;

pub use pattern::{expand_patterns, PatternSet};

/// A letter, always below the size of its alphabet.
pub type Letter = u8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet size {0} must be between 2 and 36")]
    AlphabetSize(usize),
    #[error("letter {letter} out of range for alphabet of size {size}")]
    LetterOutOfRange { letter: Letter, size: usize },
    #[error("character {0:?} is not a letter or hole")]
    BadChar(char),
    #[error("empty block in a periodic partial word")]
    EmptyBlock,
    #[error("a periodic partial word needs a non-empty cycle")]
    EmptyCycle,
    #[error("pattern set is empty")]
    EmptyPatternSet,
    #[error("empty pattern")]
    EmptyPattern,
    #[error("period bound {bound} is below twice the longest pattern length {max_len}")]
    PeriodBoundTooSmall { bound: usize, max_len: usize },
    #[error("threshold given for length {0}, which no pattern has")]
    ThresholdUnusedLength(usize),
    #[error("no threshold for pattern length {0}")]
    ThresholdMissing(usize),
    #[error("threshold for length {0} must be positive")]
    ThresholdZero(usize),
    #[error("bad pattern expression: {0}")]
    BadPatternExpr(String),
}

/// The alphabet `{0, ..., k-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    size: u8,
}

impl Alphabet {
    pub const MAX_SIZE: usize = 36;

    pub fn new(size: usize) -> Result<Self, WordError> {
        if (2..=Self::MAX_SIZE).contains(&size) {
            Ok(Alphabet { size: size as u8 })
        } else {
            Err(WordError::AlphabetSize(size))
        }
    }

    pub fn size(&self) -> usize {
        self.size as usize
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.size
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter < self.size
    }

    pub fn check(&self, letter: Letter) -> Result<(), WordError> {
        if self.contains(letter) {
            Ok(())
        } else {
            Err(WordError::LetterOutOfRange {
                letter,
                size: self.size(),
            })
        }
    }
}

pub fn letter_to_char(letter: Letter) -> char {
    match letter {
        0..=9 => (b'0' + letter) as char,
        10..=35 => (b'a' + letter - 10) as char,
        _ => panic!("letter {letter} not renderable"),
    }
}

pub fn letter_from_char(c: char) -> Option<Letter> {
    match c {
        '0'..='9' => Some(c as Letter - b'0'),
        'a'..='z' => Some(c as Letter - b'a' + 10),
        _ => None,
    }
}

/// Which square periods are forbidden: all of them, or only those strictly
/// below a bound (periods `1..p` for `Below(p)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodBound {
    Unbounded,
    Below(usize),
}

impl PeriodBound {
    fn max_checked(&self, half: usize) -> usize {
        match *self {
            PeriodBound::Unbounded => half,
            PeriodBound::Below(p) => half.min(p.saturating_sub(1)),
        }
    }
}

/// True iff some square `uu` with a forbidden period ends at the last letter.
///
/// Only suffixes are examined, so repeated calls along a growing word check
/// exactly the squares a batch scan would.
pub fn has_square_suffix(w: &[Letter], bound: PeriodBound) -> bool {
    let n = w.len();
    let max_q = bound.max_checked(n / 2);
    for q in 1..=max_q {
        if w[n - 2 * q..n - q] == w[n - q..] {
            return true;
        }
    }
    false
}

/// True iff `w` contains no square with a forbidden period.
pub fn is_square_free(w: &[Letter], bound: PeriodBound) -> bool {
    (1..=w.len()).all(|end| !has_square_suffix(&w[..end], bound))
}

/// Does appending `letter` to a square-free `prefix` keep it square-free?
///
/// Only suffixes ending at the new letter are examined; `prefix` itself is
/// assumed square-free under the same bound.
pub fn extension_square_free(
    alphabet: &Alphabet,
    prefix: &[Letter],
    letter: Letter,
    bound: PeriodBound,
) -> Result<bool, WordError> {
    alphabet.check(letter)?;
    let mut w = Vec::with_capacity(prefix.len() + 1);
    w.extend_from_slice(prefix);
    w.push(letter);
    Ok(!has_square_suffix(&w, bound))
}

/// A finite word over some alphabet; construction validates the letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>, alphabet: &Alphabet) -> Result<Self, WordError> {
        for &l in &letters {
            alphabet.check(l)?;
        }
        Ok(Word { letters })
    }

    pub fn empty() -> Self {
        Word::default()
    }

    /// For letters already known to be valid (e.g. suffixes of a `Word`).
    pub(crate) fn from_validated(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self, WordError> {
        let mut letters = Vec::with_capacity(text.len());
        for c in text.chars() {
            let l = letter_from_char(c).ok_or(WordError::BadChar(c))?;
            alphabet.check(l)?;
            letters.push(l);
        }
        Ok(Word { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl From<Word> for Vec<Letter> {
    fn from(w: Word) -> Vec<Letter> {
        w.letters
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", letter_to_char(l))?;
        }
        Ok(())
    }
}

/// One position of a partial word: a fixed letter or a hole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Hole,
    Letter(Letter),
}

impl Symbol {
    pub fn matches(&self, letter: Letter) -> bool {
        match *self {
            Symbol::Hole => true,
            Symbol::Letter(l) => l == letter,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Symbol::Hole => '.',
            Symbol::Letter(l) => letter_to_char(l),
        }
    }
}

/// A finite partial word: a word over the letters plus the hole.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialWord {
    symbols: Vec<Symbol>,
}

impl PartialWord {
    pub fn new(symbols: Vec<Symbol>, alphabet: &Alphabet) -> Result<Self, WordError> {
        for s in &symbols {
            if let Symbol::Letter(l) = s {
                alphabet.check(*l)?;
            }
        }
        Ok(PartialWord { symbols })
    }

    /// Parses letters as `'0'..'9'`/`'a'..'z'` and holes as `'.'`.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self, WordError> {
        let mut symbols = Vec::with_capacity(text.len());
        for c in text.chars() {
            if c == '.' {
                symbols.push(Symbol::Hole);
            } else {
                let l = letter_from_char(c).ok_or(WordError::BadChar(c))?;
                alphabet.check(l)?;
                symbols.push(Symbol::Letter(l));
            }
        }
        Ok(PartialWord { symbols })
    }

    pub fn all_holes(len: usize) -> Self {
        PartialWord {
            symbols: vec![Symbol::Hole; len],
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> Symbol {
        self.symbols[i]
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `v` is compatible when `|v| <= |self|` and they agree wherever the
    /// partial word has a letter; positions beyond `|v|` are unconstrained.
    pub fn is_compatible(&self, v: &Word) -> bool {
        v.len() <= self.len()
            && v.letters()
                .iter()
                .zip(&self.symbols)
                .all(|(&l, s)| s.matches(l))
    }
}

impl fmt::Display for PartialWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{}", s.to_char())?;
        }
        Ok(())
    }
}

/// An infinite, eventually periodic partial word: a finite prefix of blocks
/// followed by a repeating cycle of blocks.
///
/// Consumers that want an arbitrary (non-periodic) block word instead stream
/// blocks one at a time; see `search::count_compatible_squarefree_blocks`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicPartialWord {
    prefix: Vec<PartialWord>,
    cycle: Vec<PartialWord>,
    prefix_syms: Vec<Symbol>,
    cycle_syms: Vec<Symbol>,
}

impl PeriodicPartialWord {
    pub fn cyclic(
        prefix: Vec<PartialWord>,
        cycle: Vec<PartialWord>,
    ) -> Result<Self, WordError> {
        if cycle.is_empty() {
            return Err(WordError::EmptyCycle);
        }
        if prefix.iter().chain(&cycle).any(|b| b.is_empty()) {
            return Err(WordError::EmptyBlock);
        }
        let flatten = |blocks: &[PartialWord]| -> Vec<Symbol> {
            blocks.iter().flat_map(|b| b.symbols().to_vec()).collect()
        };
        Ok(PeriodicPartialWord {
            prefix_syms: flatten(&prefix),
            cycle_syms: flatten(&cycle),
            prefix,
            cycle,
        })
    }

    /// A single block repeated forever.
    pub fn repeating(block: PartialWord) -> Result<Self, WordError> {
        PeriodicPartialWord::cyclic(Vec::new(), vec![block])
    }

    /// Symbol at 0-based position `pos` of the infinite word.
    pub fn symbol_at(&self, pos: usize) -> Symbol {
        if pos < self.prefix_syms.len() {
            self.prefix_syms[pos]
        } else {
            self.cycle_syms[(pos - self.prefix_syms.len()) % self.cycle_syms.len()]
        }
    }

    /// The infinite block sequence: prefix blocks, then the cycle repeated.
    pub fn blocks(&self) -> impl Iterator<Item = &PartialWord> + '_ {
        self.prefix.iter().chain(self.cycle.iter().cycle())
    }

    pub fn is_compatible(&self, v: &Word) -> bool {
        v.letters()
            .iter()
            .enumerate()
            .all(|(i, &l)| self.symbol_at(i).matches(l))
    }
}

impl fmt::Display for PeriodicPartialWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.prefix {
            write!(f, "{b}")?;
        }
        write!(f, "(")?;
        for b in &self.cycle {
            write!(f, "{b}")?;
        }
        write!(f, ")^w")
    }
}
