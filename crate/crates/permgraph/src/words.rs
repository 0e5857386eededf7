//! Exact combinatorics of cyclically reduced words over the alphabet
//! `{π_1^{±1}, …, π_d^{±1}}` modulo rotation and inversion.
//!
//! A word of length `k` labels a `k`-cycle of the graph: walking around the
//! cycle spells out one of up to `2k` rotations/inversions of the word, so
//! cycles are keyed by dihedral equivalence classes. Everything downstream
//! (immigration rates, stationary means, doubling dynamics) is built from
//! three statistics of a class: the length `|w|`, the primitivity index
//! `h(w)` (largest `m` with `w = u^m`), and the double-letter count `c(w)`.
//!
//! All arithmetic in this module is exact; there is no floating point here.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub mod identities;

/// Exact rational used for word statistics and identity checks.
///
/// Numerators stay far below `i128` range for every enumeration the guard
/// rails admit, so no big-integer fallback is needed.
pub type Rational = Ratio<i128>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("word must be nonempty")]
    Empty,
    #[error("letter {position} is the inverse of its cyclic predecessor; word is not cyclically reduced")]
    NotCyclicallyReduced { position: usize },
    #[error("generator index must be at least 1")]
    ZeroGenerator,
    #[error("position {position} out of range for word of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("cannot parse letter {0:?}: expected forms like `2` or `2'`")]
    Parse(String),
    #[error("alphabet size d and length k must be at least 1")]
    BadParameters,
    #[error("a(d,k) overflow: d={d}, k={k} exceeds exact integer range")]
    Overflow { d: u64, k: u32 },
    #[error("enumeration budget exceeded: a({d},{k}) = {words} words > limit {limit}")]
    BudgetExceeded { d: u64, k: u32, words: u128, limit: u128 },
}

/// One letter `π_g` or `π_g^{-1}`.
///
/// Internally a single code `2(g-1) + inverted`, which makes the fixed total
/// order `π_1 < π_1^{-1} < π_2 < π_2^{-1} < …` the natural integer order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u16);

impl Letter {
    pub fn new(generator: u16, inverted: bool) -> Result<Self, WordError> {
        if generator == 0 {
            return Err(WordError::ZeroGenerator);
        }
        Ok(Letter(2 * (generator - 1) + u16::from(inverted)))
    }

    pub fn generator(self) -> u16 {
        self.0 / 2 + 1
    }

    pub fn inverted(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub(crate) fn code(self) -> u16 {
        self.0
    }

    pub(crate) fn from_code(code: u16) -> Letter {
        Letter(code)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.generator(), if self.inverted() { "'" } else { "" })
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A cyclically reduced word: no letter is cyclically adjacent to its inverse.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self, WordError> {
        if letters.is_empty() {
            return Err(WordError::Empty);
        }
        let k = letters.len();
        for i in 0..k {
            if letters[(i + 1) % k] == letters[i].inverse() {
                return Err(WordError::NotCyclicallyReduced { position: (i + 1) % k + 1 });
            }
        }
        Ok(Word(letters))
    }

    /// Builds a word from `(generator, inverted)` pairs; convenient in tests.
    pub fn from_pairs(pairs: &[(u16, bool)]) -> Result<Self, WordError> {
        let letters = pairs
            .iter()
            .map(|&(g, inv)| Letter::new(g, inv))
            .collect::<Result<Vec<_>, _>>()?;
        Word::new(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn rotated(&self, shift: usize) -> Word {
        let k = self.0.len();
        let shift = shift % k;
        let mut v = Vec::with_capacity(k);
        v.extend_from_slice(&self.0[shift..]);
        v.extend_from_slice(&self.0[..shift]);
        Word(v)
    }

    /// Largest generator index used, i.e. the smallest alphabet containing
    /// this word.
    pub fn max_generator(&self) -> u16 {
        self.0.iter().map(|l| l.generator()).max().unwrap()
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    /// Parses the textual syntax `1 2' 1 1 2` (apostrophe marks an inverse).
    fn from_str(s: &str) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (digits, inverted) = match tok.strip_suffix('\'') {
                Some(d) => (d, true),
                None => (tok, false),
            };
            let g: u16 = digits.parse().map_err(|_| WordError::Parse(tok.to_string()))?;
            letters.push(Letter::new(g, inverted)?);
        }
        Word::new(letters)
    }
}

/// A dihedral equivalence class of cyclically reduced words, held as its
/// canonical representative together with the cached statistics `h` and `c`.
///
/// The canonical representative is the lexicographic minimum over all `2k`
/// rotations and inverted rotations under the letter order
/// `π_1 < π_1^{-1} < π_2 < …`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WordClass {
    canonical: Word,
    h: u32,
    c: u32,
}

impl WordClass {
    pub fn canonical(&self) -> &Word {
        &self.canonical
    }

    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest `m` such that the word is an `m`-th power.
    pub fn h(&self) -> u32 {
        self.h
    }

    /// Number of cyclically adjacent equal-letter pairs (0 for length 1).
    pub fn c(&self) -> u32 {
        self.c
    }

    /// Size of the dihedral orbit, `2k/h(w)`.
    pub fn orbit_size(&self) -> usize {
        2 * self.len() / self.h as usize
    }

    /// Parses and canonicalizes in one step.
    pub fn parse(s: &str) -> Result<Self, WordError> {
        Ok(canonicalize(&s.parse::<Word>()?))
    }
}

impl fmt::Debug for WordClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.canonical)
    }
}

impl fmt::Display for WordClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical)
    }
}

impl Serialize for WordClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.canonical)
    }
}

impl<'de> Deserialize<'de> for WordClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        WordClass::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Compares rotation `a` of `x` with rotation `b` of `y` lexicographically.
fn cmp_rotations(x: &[u16], a: usize, y: &[u16], b: usize) -> std::cmp::Ordering {
    let k = x.len();
    for i in 0..k {
        let ord = x[(a + i) % k].cmp(&y[(b + i) % k]);
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

fn min_rotation(x: &[u16]) -> usize {
    let mut best = 0;
    for r in 1..x.len() {
        if cmp_rotations(x, r, x, best) == std::cmp::Ordering::Less {
            best = r;
        }
    }
    best
}

/// Writes the canonical representative of the class of `codes` into `out`.
///
/// Works on raw letter codes so the enumeration loop can avoid per-word
/// allocations.
fn canonical_codes(codes: &[u16], inv_scratch: &mut Vec<u16>, out: &mut Vec<u16>) {
    let k = codes.len();
    inv_scratch.clear();
    inv_scratch.extend(codes.iter().rev().map(|&c| c ^ 1));
    let rw = min_rotation(codes);
    let ri = min_rotation(inv_scratch);
    let use_inv = cmp_rotations(inv_scratch, ri, codes, rw) == std::cmp::Ordering::Less;
    let (src, r) = if use_inv { (inv_scratch.as_slice(), ri) } else { (codes, rw) };
    out.clear();
    out.extend((0..k).map(|i| src[(r + i) % k]));
}

fn stats_of_codes(codes: &[u16]) -> (u32, u32) {
    let k = codes.len();
    // h = k / p for the smallest period p dividing k.
    let mut h = 1;
    for p in 1..=k {
        if k % p != 0 {
            continue;
        }
        if (0..k).all(|i| codes[i] == codes[(i + p) % k]) {
            h = (k / p) as u32;
            break;
        }
    }
    let c = if k == 1 {
        0
    } else {
        (0..k).filter(|&i| codes[i] == codes[(i + 1) % k]).count() as u32
    };
    (h, c)
}

fn class_from_codes(codes: &[u16]) -> WordClass {
    let mut inv = Vec::new();
    let mut canon = Vec::new();
    canonical_codes(codes, &mut inv, &mut canon);
    let (h, c) = stats_of_codes(&canon);
    let letters = canon.into_iter().map(Letter::from_code).collect();
    WordClass { canonical: Word(letters), h, c }
}

/// Maps a cyclically reduced word to its dihedral class. Idempotent on orbit
/// members: every rotation/inversion of `w` yields the identical class.
pub fn canonicalize(w: &Word) -> WordClass {
    let codes: Vec<u16> = w.0.iter().map(|l| l.code()).collect();
    class_from_codes(&codes)
}

/// `(k, h, c)` of a cyclically reduced word.
pub fn word_stats(w: &Word) -> (usize, u32, u32) {
    let codes: Vec<u16> = w.0.iter().map(|l| l.code()).collect();
    let (h, c) = stats_of_codes(&codes);
    (w.len(), h, c)
}

/// Doubles the `i`-th letter (1-based, referring to the canonical
/// representative) and returns the resulting class of length `|w| + 1`.
pub fn double(w: &WordClass, i: usize) -> Result<WordClass, WordError> {
    let k = w.len();
    if i == 0 || i > k {
        return Err(WordError::PositionOutOfRange { position: i, len: k });
    }
    let mut codes: Vec<u16> = w.canonical.0.iter().map(|l| l.code()).collect();
    codes.insert(i, codes[i - 1]);
    Ok(class_from_codes(&codes))
}

/// All `|w|` doublings of a class, as a multiset.
pub fn doublings(w: &WordClass) -> Vec<WordClass> {
    (1..=w.len()).map(|i| double(w, i).expect("position in range")).collect()
}

/// Halves each pair of double letters, returning one class per pair (the
/// multiset has exactly `c(w)` entries; empty when `c(w) = 0`).
pub fn halvings(w: &WordClass) -> Vec<WordClass> {
    let codes: Vec<u16> = w.canonical.0.iter().map(|l| l.code()).collect();
    let k = codes.len();
    if k == 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 0..k {
        if codes[i] == codes[(i + 1) % k] {
            // Delete the second letter of the pair.
            let mut shorter = Vec::with_capacity(k - 1);
            for (j, &c) in codes.iter().enumerate() {
                if j != (i + 1) % k {
                    shorter.push(c);
                }
            }
            out.push(class_from_codes(&shorter));
        }
    }
    out
}

/// Guard rails for exhaustive enumeration.
#[derive(Clone, Copy, Debug)]
pub struct EnumLimits {
    /// Maximum number of cyclically reduced words `a(d,k)` the enumerator
    /// will walk.
    pub max_words: u128,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits { max_words: 30_000_000 }
    }
}

/// Enumerates all dihedral classes of cyclically reduced words of length `k`
/// over alphabet size `d`, sorted by canonical representative.
///
/// The sum of orbit sizes over the result equals `a(d,k)`.
pub fn enumerate_classes(d: u16, k: usize, limits: EnumLimits) -> Result<Vec<WordClass>, WordError> {
    if d == 0 || k == 0 {
        return Err(WordError::BadParameters);
    }
    let words = a_count(d as u64, k as u32)?;
    if words > limits.max_words {
        return Err(WordError::BudgetExceeded { d: d as u64, k: k as u32, words, limit: limits.max_words });
    }

    let n_letters = 2 * d;
    let mut seen: HashSet<Vec<u16>> = HashSet::new();
    let mut word = vec![0u16; k];
    let mut inv_scratch = Vec::with_capacity(k);
    let mut canon = Vec::with_capacity(k);

    // Depth-first over letter codes with the cyclic-reduction constraint.
    fn rec(
        word: &mut Vec<u16>,
        pos: usize,
        n_letters: u16,
        seen: &mut HashSet<Vec<u16>>,
        inv_scratch: &mut Vec<u16>,
        canon: &mut Vec<u16>,
    ) {
        let k = word.len();
        if pos == k {
            if k > 1 && word[0] == word[k - 1] ^ 1 {
                return;
            }
            canonical_codes(word, inv_scratch, canon);
            if !seen.contains(canon.as_slice()) {
                seen.insert(canon.clone());
            }
            return;
        }
        for code in 0..n_letters {
            if pos > 0 && code == word[pos - 1] ^ 1 {
                continue;
            }
            word[pos] = code;
            rec(word, pos + 1, n_letters, seen, inv_scratch, canon);
        }
    }
    rec(&mut word, 0, n_letters, &mut seen, &mut inv_scratch, &mut canon);

    let mut classes: Vec<WordClass> = seen
        .into_iter()
        .map(|codes| {
            let (h, c) = stats_of_codes(&codes);
            let letters = codes.into_iter().map(Letter::from_code).collect();
            WordClass { canonical: Word(letters), h, c }
        })
        .collect();
    classes.sort();
    Ok(classes)
}

/// Enumerates classes of every length `1..=k_max`, sorted by `(k, word)`.
pub fn enumerate_classes_upto(
    d: u16,
    k_max: usize,
    limits: EnumLimits,
) -> Result<Vec<WordClass>, WordError> {
    let mut all = Vec::new();
    for k in 1..=k_max {
        all.extend(enumerate_classes(d, k, limits)?);
    }
    all.sort_by_key(|c| (c.len(), c.canonical.0.clone()));
    Ok(all)
}

/// Exact count of cyclically reduced words of length `k` over `d` generators:
/// `(2d-1)^k - 1 + 2d` for even `k`, `(2d-1)^k + 1` for odd `k`, and 0 for
/// `k = 0`. Overflow is reported, never wrapped.
pub fn a_count(d: u64, k: u32) -> Result<u128, WordError> {
    if d == 0 {
        return Err(WordError::BadParameters);
    }
    if k == 0 {
        return Ok(0);
    }
    let overflow = || WordError::Overflow { d, k };
    let base = 2u128 * d as u128 - 1;
    let mut pow: u128 = 1;
    for _ in 0..k {
        pow = pow.checked_mul(base).ok_or_else(overflow)?;
    }
    if k % 2 == 0 {
        pow.checked_sub(1)
            .and_then(|v| v.checked_add(2 * d as u128))
            .ok_or_else(overflow)
    } else {
        pow.checked_add(1).ok_or_else(overflow)
    }
}

/// Immigration weight `μ(w) = (|w| - c(w)) / h(w)` of a class.
pub fn mu_weight(w: &WordClass) -> Rational {
    Rational::new(w.len() as i128 - w.c() as i128, w.h() as i128)
}

/// Stationary mean `1/h(w)` of the per-class cycle count.
pub fn stationary_mean(w: &WordClass) -> Rational {
    Rational::new(1, w.h() as i128)
}

fn a_i128(d: u64, k: u32) -> Result<i128, WordError> {
    let v = a_count(d, k)?;
    i128::try_from(v).map_err(|_| WordError::Overflow { d, k })
}

/// Aggregate immigration rate at length `k`: `μ(k) = [a(d,k) - a(d,k-1)]/2`.
pub fn mu_k(d: u64, k: u32) -> Result<Rational, WordError> {
    if d == 0 || k == 0 {
        return Err(WordError::BadParameters);
    }
    let hi = a_i128(d, k)?;
    let lo = if k == 1 { 0 } else { a_i128(d, k - 1)? };
    Ok(Rational::new(hi - lo, 2))
}

/// Immigration rate of the `(d+1)`-versus-`d` increment process at length
/// `k`: `ν(d,k) = [a(d+1,k) - a(d+1,k-1) - a(d,k) + a(d,k-1)]/2`.
pub fn nu_rate(d: u64, k: u32) -> Result<Rational, WordError> {
    if d == 0 || k == 0 {
        return Err(WordError::BadParameters);
    }
    Ok(mu_k(d + 1, k)? - mu_k(d, k)?)
}

/// Stationary mean of the aggregate length-`k` count: `a(d,k) / 2k`.
pub fn stationary_mean_k(d: u64, k: u32) -> Result<Rational, WordError> {
    if d == 0 || k == 0 {
        return Err(WordError::BadParameters);
    }
    Ok(Rational::new(a_i128(d, k)?, 2 * k as i128))
}

/// Multiset of classes as a count map; used by the identity checks.
pub fn count_multiset(items: impl IntoIterator<Item = WordClass>) -> BTreeMap<WordClass, u64> {
    let mut m = BTreeMap::new();
    for it in items {
        *m.entry(it).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn class(s: &str) -> WordClass {
        WordClass::parse(s).unwrap()
    }

    #[test]
    fn rejects_non_reduced_words() {
        assert!(matches!(Word::from_str("1 1'"), Err(WordError::NotCyclicallyReduced { .. })));
        // Cyclic wrap: last letter inverse of first.
        assert!(matches!(Word::from_str("1 2 1'"), Err(WordError::NotCyclicallyReduced { .. })));
        assert!(matches!(Word::from_str(""), Err(WordError::Empty)));
    }

    #[test]
    fn parse_display_round_trip() {
        let word = w("1 2' 1 1 2");
        assert_eq!(word.to_string(), "1 2' 1 1 2");
        assert_eq!(word.len(), 5);
        assert!(word.letters()[1].inverted());
    }

    #[test]
    fn inversion_rotation_equivalence() {
        // π_1 π_2^{-1} and π_2 π_1^{-1} are inverses of each other.
        assert_eq!(class("1 2'"), class("2 1'"));
        // A single letter and its inverse share a class.
        assert_eq!(class("1"), class("1'"));
    }

    #[test]
    fn double_letter_count_example() {
        // c(π_1 π_1 π_2^{-1} π_2^{-1} π_1) = 3.
        let (k, _, c) = word_stats(&w("1 1 2' 2' 1"));
        assert_eq!((k, c), (5, 3));
    }

    #[test]
    fn orbit_of_alternating_word() {
        // π_1 π_2 π_1 π_2 = (π_1 π_2)^2: h = 2, orbit has 2·4/2 = 4 elements.
        let cl = class("1 2 1 2");
        assert_eq!(cl.h(), 2);
        assert_eq!(cl.orbit_size(), 4);
        // Enumerate the 8 rotations/inversions by hand and deduplicate.
        let word = w("1 2 1 2");
        let mut orbit = HashSet::new();
        for r in 0..4 {
            orbit.insert(word.rotated(r).0);
            orbit.insert(word.rotated(r).inverse().0);
        }
        assert_eq!(orbit.len(), 4);
    }

    #[test]
    fn word_stats_examples() {
        assert_eq!(word_stats(&w("1 2")), (2, 1, 0));
        assert_eq!(word_stats(&w("1 1")), (2, 2, 2));
        assert_eq!(word_stats(&w("1 2 1 1 2")), (5, 1, 1));
    }

    #[test]
    fn canonicalize_is_a_class_function_on_small_orbits() {
        for s in ["1", "1 2", "1 2 1 1 2", "1 1 2' 2' 1", "1 2 1 2", "1 1 1"] {
            let word = w(s);
            let expect = canonicalize(&word);
            let k = word.len();
            for r in 0..k {
                let rot = word.rotated(r);
                assert_eq!(canonicalize(&rot), expect);
                assert_eq!(canonicalize(&rot.inverse()), expect);
            }
        }
    }

    #[test]
    fn doubling_examples() {
        assert_eq!(double(&class("1"), 1).unwrap(), class("1 1"));
        assert_eq!(
            count_multiset(doublings(&class("1 2"))),
            count_multiset([class("1 1 2"), class("1 2 2")])
        );
        assert!(matches!(double(&class("1 2"), 3), Err(WordError::PositionOutOfRange { .. })));
        assert!(matches!(double(&class("1 2"), 0), Err(WordError::PositionOutOfRange { .. })));
    }

    #[test]
    fn doubling_and_halving_multiplicities() {
        // u = π_1π_2π_1π_1π_2 doubles to w = π_1π_1π_2π_1π_1π_2 in exactly one
        // way, while w halves to u in exactly two ways; a/h(u) = b/h(w) with
        // h(u) = 1, h(w) = 2.
        let u = class("1 2 1 1 2");
        let target = class("1 1 2 1 1 2");
        assert_eq!(u.h(), 1);
        assert_eq!(target.h(), 2);
        let a = doublings(&u).into_iter().filter(|c| *c == target).count();
        assert_eq!(a, 1);
        let b = halvings(&target).into_iter().filter(|c| *c == u).count();
        assert_eq!(b, 2);
    }

    #[test]
    fn halving_examples() {
        assert!(halvings(&class("1 2")).is_empty());
        assert_eq!(
            count_multiset(halvings(&class("1 1"))),
            count_multiset([class("1"), class("1")])
        );
        let hs = halvings(&class("1 1 2 1 1 2"));
        assert_eq!(hs.len(), 2);
        assert!(hs.iter().all(|c| *c == class("1 2 1 1 2")));
        // Total multiplicity is always c(w).
        for s in ["1 1 2' 2' 1", "1 1 1", "1 2 1 1 2"] {
            let cl = class(s);
            assert_eq!(halvings(&cl).len() as u32, cl.c());
        }
    }

    #[test]
    fn enumerate_small_alphabets() {
        let limits = EnumLimits::default();
        let c13 = enumerate_classes(1, 3, limits).unwrap();
        assert_eq!(c13.len(), 1);
        assert_eq!(c13[0], class("1 1 1"));
        assert_eq!(c13[0].h(), 3);

        let c21 = enumerate_classes(2, 1, limits).unwrap();
        assert_eq!(c21, vec![class("1"), class("2")]);

        let c22 = enumerate_classes(2, 2, limits).unwrap();
        assert_eq!(
            c22.iter().cloned().collect::<HashSet<_>>(),
            [class("1 1"), class("2 2"), class("1 2"), class("1 2'")].into_iter().collect()
        );
        let orbit_total: usize = c22.iter().map(|c| c.orbit_size()).sum();
        assert_eq!(orbit_total as u128, a_count(2, 2).unwrap());
    }

    #[test]
    fn word_count_closed_form() {
        assert_eq!(a_count(2, 1).unwrap(), 4);
        assert_eq!(a_count(2, 2).unwrap(), 12);
        for k in 1..20 {
            assert_eq!(a_count(1, k).unwrap(), 2);
        }
        assert_eq!(a_count(1, 0).unwrap(), 0);
        assert!(matches!(a_count(u64::MAX / 2, 80), Err(WordError::Overflow { .. })));
        assert!(matches!(a_count(0, 3), Err(WordError::BadParameters)));
    }

    #[test]
    fn enumeration_budget_guard() {
        let small = EnumLimits { max_words: 10 };
        assert!(matches!(enumerate_classes(2, 2, small), Err(WordError::BudgetExceeded { .. })));
    }

    #[test]
    fn immigration_weights() {
        assert_eq!(mu_weight(&class("1")), Rational::new(1, 1));
        assert_eq!(mu_weight(&class("1 1")), Rational::new(0, 1));
        let total: Rational = enumerate_classes(2, 2, EnumLimits::default())
            .unwrap()
            .iter()
            .map(mu_weight)
            .sum();
        assert_eq!(total, Rational::new(4, 1));
    }

    #[test]
    fn aggregate_rates() {
        assert_eq!(mu_k(2, 1).unwrap(), Rational::new(2, 1));
        assert_eq!(nu_rate(1, 1).unwrap(), Rational::new(1, 1));
        assert_eq!(mu_k(1, 1).unwrap(), Rational::new(1, 1));
        for k in 2..10 {
            assert_eq!(mu_k(1, k).unwrap(), Rational::new(0, 1));
        }
        assert_eq!(stationary_mean_k(2, 3).unwrap(), Rational::new(14, 3));
    }
}
