//! Exact-arithmetic verification of the weight-system inequality.
//!
//! A certificate fixes the alphabet size `k`, the period bound `p`, the
//! pattern set `W` with thresholds `f`, and per-length weights
//! `x ∈ (0,1)`. For every pattern length `|w|` the checker evaluates
//!
//! ```text
//! f(|w|) - max over lengths |u|,|v| and 1 <= r <= |v| of
//!     beta(r + p - |w| - |v|) * (alpha'(r,|w|) + x_|v| * alpha(|u|,|w|) / (1 - x_|u|))
//!     >= 1 / x_|w|
//! ```
//!
//! with `alpha`, `alpha'` finite sums of capped powers of `k-1` and `beta`
//! the best product of weights over decompositions of an index into pattern
//! lengths. Everything is exact rational arithmetic; no floating point
//! enters any comparison (decimals are printed for display only).

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;

use num::bigint::BigInt;
use num::traits::ToPrimitive;
use num::{One, Signed, Zero};
use thiserror::Error;

use crate::words::{expand_patterns, Alphabet, PartialWord, PatternSet, WordError};

/// Exact fraction; numerator and denominator are arbitrary-precision and the
/// representation is kept canonical (gcd 1, positive denominator).
pub type Rational = num::BigRational;

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("weight given for length {0}, which no pattern has")]
    WeightUnusedLength(usize),
    #[error("no weight for pattern length {0}")]
    WeightMissing(usize),
    #[error("weight for length {len} must lie strictly between 0 and 1, got {value}")]
    WeightOutOfRange { len: usize, value: String },
    #[error("length {0} does not occur in the pattern set")]
    LengthNotInSet(usize),
    #[error("threshold C must be positive")]
    ZeroThreshold,
    #[error("block length {len} does not divide the period bound {p}")]
    NotDivisible { len: usize, p: usize },
    #[error("period bound {p} is below twice the block length {len}")]
    PeriodTooSmall { len: usize, p: usize },
    #[error("certificate file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Full input to the inequality system.
#[derive(Debug, Clone)]
pub struct Certificate {
    alphabet: Alphabet,
    patterns: PatternSet,
    weights: BTreeMap<usize, Rational>,
}

impl Certificate {
    pub fn new(
        alphabet: Alphabet,
        patterns: PatternSet,
        weights: BTreeMap<usize, Rational>,
    ) -> Result<Self, CertificateError> {
        for len in patterns.lengths() {
            match weights.get(&len) {
                None => return Err(CertificateError::WeightMissing(len)),
                Some(x) => {
                    if x <= &Rational::zero() || x >= &Rational::one() {
                        return Err(CertificateError::WeightOutOfRange {
                            len,
                            value: x.to_string(),
                        });
                    }
                }
            }
        }
        for &len in weights.keys() {
            if !patterns.lengths().any(|l| l == len) {
                return Err(CertificateError::WeightUnusedLength(len));
            }
        }
        Ok(Certificate {
            alphabet,
            patterns,
            weights,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn pattern_set(&self) -> &PatternSet {
        &self.patterns
    }

    pub fn weight(&self, len: usize) -> Result<&Rational, CertificateError> {
        self.weights
            .get(&len)
            .ok_or(CertificateError::LengthNotInSet(len))
    }

    fn threshold(&self, len: usize) -> Result<u64, CertificateError> {
        if self.patterns.lengths().any(|l| l == len) {
            Ok(self.patterns.threshold(len))
        } else {
            Err(CertificateError::LengthNotInSet(len))
        }
    }

    /// `alpha(|u|,|v|) = sum over m in 1..=|u|, j in 0..=(|v|-1)/m of
    /// min(f(|v|), (k-1)^(|v|-1-j*m))`, exactly.
    pub fn alpha(&self, len_u: usize, len_v: usize) -> Result<u128, CertificateError> {
        self.threshold(len_u)?;
        let f = self.threshold(len_v)?;
        let base = (self.alphabet.size() - 1) as u64;
        let mut total: u128 = 0;
        for m in 1..=len_u {
            for j in 0..=(len_v - 1) / m {
                total += min_capped_pow(f, base, len_v - 1 - j * m) as u128;
            }
        }
        Ok(total)
    }

    /// `alpha'(i,|v|) = sum over m in 0..i of min(f(|v|), (k-1)^m)`, exactly.
    pub fn alpha_prime(&self, i: usize, len_v: usize) -> Result<u128, CertificateError> {
        let f = self.threshold(len_v)?;
        let base = (self.alphabet.size() - 1) as u64;
        Ok((0..i).map(|m| min_capped_pow(f, base, m) as u128).sum())
    }

    /// `beta(j)` for `j = 0..=p` by the one-step recurrence: the best product
    /// of weights over decompositions of `j` into pattern lengths, 0 when no
    /// decomposition exists, 1 at 0.
    pub fn beta_table(&self) -> BetaTable {
        let p = self.patterns.period_bound();
        let lengths: Vec<usize> = self.patterns.lengths().collect();
        let mut values = Vec::with_capacity(p + 1);
        values.push(Rational::one());
        for j in 1..=p {
            let mut best = Rational::zero();
            for &l in &lengths {
                if l <= j {
                    let cand = &self.weights[&l] * &values[j - l];
                    if cand > best {
                        best = cand;
                    }
                }
            }
            values.push(best);
        }
        BetaTable { values }
    }

    /// Evaluates the full system. The max ranges over pattern *lengths*
    /// because the formula depends on patterns only through their lengths;
    /// the alpha sums are tabulated once per length pair.
    #[allow(clippy::needless_range_loop)] // r is the bound variable of the max
    pub fn check_main(&self) -> CheckReport {
        let p = self.patterns.period_bound();
        let beta = self.beta_table();
        let lengths: Vec<usize> = self.patterns.lengths().collect();
        let max_len = *lengths.last().expect("pattern set is non-empty");
        let mut per_length = Vec::with_capacity(lengths.len());
        for &lw in &lengths {
            let alpha_frac: Vec<Rational> = lengths
                .iter()
                .map(|&lu| {
                    Rational::from_integer(BigInt::from(
                        self.alpha(lu, lw).expect("lengths validated"),
                    )) / (Rational::one() - &self.weights[&lu])
                })
                .collect();
            let aprime: Vec<Rational> = (0..=max_len)
                .map(|r| {
                    Rational::from_integer(BigInt::from(
                        self.alpha_prime(r, lw).expect("lengths validated"),
                    ))
                })
                .collect();
            let mut best: Option<(Rational, MaxWitness)> = None;
            for (ui, &lu) in lengths.iter().enumerate() {
                for &lv in &lengths {
                    let weighted_alpha = &self.weights[&lv] * &alpha_frac[ui];
                    for r in 1..=lv {
                        let idx = (r + p)
                            .checked_sub(lw + lv)
                            .expect("p >= 2*max length keeps the index non-negative");
                        debug_assert!(idx <= p);
                        let beta_j = beta.value(idx);
                        if beta_j.is_zero() && best.is_some() {
                            continue; // a zero term never beats an existing max
                        }
                        let value = beta_j * (&aprime[r] + &weighted_alpha);
                        let improves = match &best {
                            None => true,
                            Some((b, _)) => value > *b,
                        };
                        if improves {
                            best = Some((
                                value,
                                MaxWitness {
                                    len_u: lu,
                                    len_v: lv,
                                    r,
                                },
                            ));
                        }
                    }
                }
            }
            let (max_value, witness) = best.expect("pattern set is non-empty");
            let f = Rational::from_integer(BigInt::from(self.patterns.threshold(lw)));
            let slack = f - max_value - self.weights[&lw].recip();
            per_length.push(LengthVerdict {
                length: lw,
                holds: !slack.is_negative(),
                slack,
                witness,
            });
        }
        CheckReport { per_length }
    }
}

/// `min(cap, base^e)` without materialising the power: multiplication stops
/// as soon as the running value reaches the cap.
fn min_capped_pow(cap: u64, base: u64, e: usize) -> u64 {
    let mut v: u64 = 1;
    for _ in 0..e {
        if v >= cap {
            return cap;
        }
        v = v.saturating_mul(base);
    }
    v.min(cap)
}

/// `beta` values for indices `0..=p`.
#[derive(Debug, Clone)]
pub struct BetaTable {
    values: Vec<Rational>,
}

impl BetaTable {
    pub fn value(&self, j: usize) -> &Rational {
        &self.values[j]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The (|u|, |v|, r) triple realising the max for one pattern length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxWitness {
    pub len_u: usize,
    pub len_v: usize,
    pub r: usize,
}

#[derive(Debug, Clone)]
pub struct LengthVerdict {
    pub length: usize,
    pub slack: Rational,
    pub holds: bool,
    pub witness: MaxWitness,
}

impl fmt::Display for LengthVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|w|={}: {} slack={} (~{:.6}) at |u|={} |v|={} r={}",
            self.length,
            if self.holds { "PASS" } else { "FAIL" },
            self.slack,
            self.slack.to_f64().unwrap_or(f64::NAN),
            self.witness.len_u,
            self.witness.len_v,
            self.witness.r,
        )
    }
}

/// Per-length verdicts of one system evaluation.
#[derive(Debug, Clone)]
pub struct CheckReport {
    per_length: Vec<LengthVerdict>,
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.per_length.iter().all(|v| v.holds)
    }

    pub fn verdicts(&self) -> &[LengthVerdict] {
        &self.per_length
    }

    /// The verdict with the smallest slack (first on ties).
    pub fn worst(&self) -> &LengthVerdict {
        self.per_length
            .iter()
            .min_by(|a, b| a.slack.cmp(&b.slack))
            .expect("non-empty")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.per_length {
            writeln!(f, "{v}")?;
        }
        write!(f, "verdict: {}", if self.pass() { "PASS" } else { "FAIL" })
    }
}

/// Outcome of the single-pattern inequality
/// `C * (1 - x^(p/|w| - 1) * |w|^2 / (1 - x)) >= 1/x`.
#[derive(Debug, Clone)]
pub struct SingletonReport {
    pub slack: Rational,
    pub holds: bool,
}

impl fmt::Display for SingletonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} slack={} (~{:.6})",
            if self.holds { "PASS" } else { "FAIL" },
            self.slack,
            self.slack.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// Exact evaluation of the single-pattern inequality; `len_w` must divide
/// `p` and `p >= 2*len_w`.
pub fn check_singleton(
    c: u64,
    len_w: usize,
    p: usize,
    x: &Rational,
) -> Result<SingletonReport, CertificateError> {
    if c == 0 {
        return Err(CertificateError::ZeroThreshold);
    }
    if len_w == 0 || p < 2 * len_w {
        return Err(CertificateError::PeriodTooSmall { len: len_w, p });
    }
    if !p.is_multiple_of(len_w) {
        return Err(CertificateError::NotDivisible { len: len_w, p });
    }
    if x <= &Rational::zero() || x >= &Rational::one() {
        return Err(CertificateError::WeightOutOfRange {
            len: len_w,
            value: x.to_string(),
        });
    }
    let e = p / len_w - 1;
    let mut pow = Rational::one();
    for _ in 0..e {
        pow *= x;
    }
    let len_sq = Rational::from_integer(BigInt::from(len_w * len_w));
    let lhs = Rational::from_integer(BigInt::from(c))
        * (Rational::one() - pow * len_sq / (Rational::one() - x));
    let slack = lhs - x.recip();
    Ok(SingletonReport {
        holds: !slack.is_negative(),
        slack,
    })
}

/// Contents of a certificate file; the weights may be absent when the file
/// is only used for pruning.
#[derive(Debug, Clone)]
pub struct ParsedCertificate {
    pub alphabet: Alphabet,
    pub period_bound: usize,
    pub patterns: Vec<PartialWord>,
    pub thresholds: BTreeMap<usize, u64>,
    pub weights: BTreeMap<usize, Rational>,
}

impl ParsedCertificate {
    pub fn pattern_set(&self) -> Result<PatternSet, WordError> {
        PatternSet::new(
            self.patterns.clone(),
            self.period_bound,
            self.thresholds.clone(),
        )
    }

    pub fn certificate(&self) -> Result<Certificate, CertificateError> {
        let patterns = self.pattern_set()?;
        Certificate::new(self.alphabet, patterns, self.weights.clone())
    }
}

/// Reads the `CERT v1` format:
///
/// ```text
/// CERT v1
/// k=<int>
/// p=<int>
/// pattern <string>      (repeated; pattern shorthand allowed)
/// f <len> <int>         (repeated)
/// x <len> <num>/<den>   (repeated)
/// ```
///
/// Blank lines and `#` comments are skipped.
pub fn read_certificate<R: BufRead>(input: R) -> Result<ParsedCertificate, CertificateError> {
    let err = |line: usize, msg: String| CertificateError::Parse { line, msg };
    let mut alphabet: Option<Alphabet> = None;
    let mut period_bound: Option<usize> = None;
    let mut patterns: Vec<PartialWord> = Vec::new();
    let mut thresholds: BTreeMap<usize, u64> = BTreeMap::new();
    let mut weights: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut saw_magic = false;

    for (i, line) in input.lines().enumerate() {
        let idx = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_magic {
            if line != "CERT v1" {
                return Err(err(idx, "expected 'CERT v1'".into()));
            }
            saw_magic = true;
            continue;
        }
        if let Some(v) = line.strip_prefix("k=") {
            if alphabet.is_some() {
                return Err(err(idx, "duplicate k=".into()));
            }
            let k: usize = v.parse().map_err(|e| err(idx, format!("bad k: {e}")))?;
            alphabet =
                Some(Alphabet::new(k).map_err(|e| err(idx, e.to_string()))?);
        } else if let Some(v) = line.strip_prefix("p=") {
            if period_bound.is_some() {
                return Err(err(idx, "duplicate p=".into()));
            }
            period_bound = Some(v.parse().map_err(|e| err(idx, format!("bad p: {e}")))?);
        } else if let Some(v) = line.strip_prefix("pattern ") {
            let alphabet = alphabet.ok_or_else(|| err(idx, "pattern before k=".into()))?;
            let expanded =
                expand_patterns(v.trim(), &alphabet).map_err(|e| err(idx, e.to_string()))?;
            patterns.extend(expanded);
        } else if let Some(v) = line.strip_prefix("f ") {
            let (len, value) = split_pair(v).ok_or_else(|| {
                err(idx, "expected 'f <len> <int>'".into())
            })?;
            let len: usize = len.parse().map_err(|e| err(idx, format!("bad length: {e}")))?;
            let value: u64 = value
                .parse()
                .map_err(|e| err(idx, format!("bad threshold: {e}")))?;
            if thresholds.insert(len, value).is_some() {
                return Err(err(idx, format!("duplicate threshold for length {len}")));
            }
        } else if let Some(v) = line.strip_prefix("x ") {
            let (len, value) = split_pair(v).ok_or_else(|| {
                err(idx, "expected 'x <len> <num>/<den>'".into())
            })?;
            let len: usize = len.parse().map_err(|e| err(idx, format!("bad length: {e}")))?;
            let value = parse_rational(value).ok_or_else(|| {
                err(idx, format!("bad rational {value:?}, expected <num>/<den>"))
            })?;
            if weights.insert(len, value).is_some() {
                return Err(err(idx, format!("duplicate weight for length {len}")));
            }
        } else {
            return Err(err(idx, format!("unrecognised line {line:?}")));
        }
    }
    if !saw_magic {
        return Err(err(1, "empty certificate file".into()));
    }
    Ok(ParsedCertificate {
        alphabet: alphabet.ok_or_else(|| err(0, "missing k=".into()))?,
        period_bound: period_bound.ok_or_else(|| err(0, "missing p=".into()))?,
        patterns,
        thresholds,
        weights,
    })
}

fn split_pair(s: &str) -> Option<(&str, &str)> {
    let mut it = s.split_whitespace();
    let a = it.next()?;
    let b = it.next()?;
    if it.next().is_some() {
        return None;
    }
    Some((a, b))
}

/// Parses `num/den` (or a bare integer) into an exact fraction.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}
