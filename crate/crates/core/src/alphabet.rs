//! Alphabets, symbols and finite words.
//!
//! Symbols are stored as indices into their alphabet so that lexicographic
//! order under the declared alphabet order is plain integer order.

use std::fmt;

use crate::error::{Error, Result};

/// Default ceiling on the number of items an exhaustive enumeration may produce.
pub const DEFAULT_ENUM_CAP: u128 = 1 << 22;

/// Environment variable overriding [`DEFAULT_ENUM_CAP`].
pub const ENUM_CAP_ENV: &str = "BPD_ENUM_CAP";

/// Index of a symbol within its alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u16);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Upper bound on exhaustive enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumCap(pub u128);

impl Default for EnumCap {
    fn default() -> Self {
        EnumCap(DEFAULT_ENUM_CAP)
    }
}

impl EnumCap {
    /// Reads `BPD_ENUM_CAP`, falling back to the default when unset or malformed.
    pub fn from_env() -> Self {
        std::env::var(ENUM_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u128>().ok())
            .map(EnumCap)
            .unwrap_or_default()
    }

    pub fn check(self, requested: u128) -> Result<()> {
        if requested > self.0 {
            Err(Error::Capacity {
                requested,
                cap: self.0,
            })
        } else {
            Ok(())
        }
    }
}

/// An ordered set of distinct, visible, single-character symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
}

const RESERVED: [char; 2] = ['~', '#'];

impl Alphabet {
    /// An input alphabet: at least two symbols.
    pub fn new(symbols: &str) -> Result<Self> {
        let a = Self::build(symbols)?;
        if a.len() < 2 {
            return Err(Error::Alphabet(format!(
                "input alphabet {symbols:?} needs at least two symbols"
            )));
        }
        Ok(a)
    }

    /// A stack alphabet: a single symbol is enough.
    pub fn new_stack(symbols: &str) -> Result<Self> {
        Self::build(symbols)
    }

    pub fn from_chars(symbols: Vec<char>) -> Result<Self> {
        Self::build(&symbols.into_iter().collect::<String>())
    }

    fn build(symbols: &str) -> Result<Self> {
        let symbols: Vec<char> = symbols.chars().collect();
        if symbols.is_empty() {
            return Err(Error::Alphabet("empty alphabet".into()));
        }
        if symbols.len() > u16::MAX as usize {
            return Err(Error::Alphabet("alphabet too large".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &symbols {
            if c.is_whitespace() || c.is_control() || RESERVED.contains(c) {
                return Err(Error::Alphabet(format!("symbol {c:?} is not allowed")));
            }
            if !seen.insert(*c) {
                return Err(Error::Alphabet(format!("duplicate symbol {c:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn binary() -> Self {
        Alphabet {
            symbols: vec!['0', '1'],
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn radix(&self) -> u32 {
        self.symbols.len() as u32
    }

    pub fn chars(&self) -> &[char] {
        &self.symbols
    }

    pub fn char_of(&self, s: Symbol) -> char {
        self.symbols[s.index()]
    }

    pub fn symbol(&self, c: char) -> Result<Symbol> {
        self.symbols
            .iter()
            .position(|&x| x == c)
            .map(|i| Symbol(i as u16))
            .ok_or_else(|| Error::UnknownSymbol {
                symbol: c,
                alphabet: self.to_string(),
            })
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.symbols.len()).map(|i| Symbol(i as u16))
    }

    pub fn word(&self, text: &str) -> Result<Word> {
        text.chars().map(|c| self.symbol(c)).collect()
    }

    pub fn render(&self, w: &[Symbol]) -> String {
        w.iter().map(|&s| self.char_of(s)).collect()
    }

    /// Renders a word, writing the empty word as `~`.
    pub fn render_or_lambda(&self, w: &[Symbol]) -> String {
        if w.is_empty() {
            "~".to_string()
        } else {
            self.render(w)
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.symbols {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A finite word; the empty word is lambda.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

/// `x` written in reverse order.
pub fn reverse(w: &Word) -> Word {
    Word(w.0.iter().rev().copied().collect())
}

/// Number of words of length `n`, saturating.
pub fn count_words(radix: u32, n: usize) -> u128 {
    let mut total: u128 = 1;
    for _ in 0..n {
        total = total.saturating_mul(radix as u128);
    }
    total
}

/// All words of length `n` in lexicographic order under the alphabet order.
pub fn lex_enumerate(alphabet: &Alphabet, n: usize, cap: EnumCap) -> Result<Vec<Word>> {
    let radix = alphabet.len();
    cap.check(count_words(radix as u32, n))?;
    let total = count_words(radix as u32, n) as usize;
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0u16; n];
    for _ in 0..total {
        out.push(Word(digits.iter().map(|&d| Symbol(d)).collect()));
        // odometer increment, last position fastest
        for pos in (0..n).rev() {
            digits[pos] += 1;
            if (digits[pos] as usize) < radix {
                break;
            }
            digits[pos] = 0;
        }
    }
    Ok(out)
}

/// All words of length at most `n`, shortest first, each length in lex order.
pub fn enumerate_up_to(alphabet: &Alphabet, n: usize, cap: EnumCap) -> Result<Vec<Word>> {
    let total: u128 = (0..=n).map(|j| count_words(alphabet.radix(), j)).sum();
    cap.check(total)?;
    let mut out = Vec::new();
    for j in 0..=n {
        out.extend(lex_enumerate(alphabet, j, cap)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(s: &str) -> Word {
        Alphabet::binary().word(s).unwrap()
    }

    #[test]
    fn lex_small_cases() {
        let a = Alphabet::binary();
        let cap = EnumCap::default();
        assert_eq!(lex_enumerate(&a, 0, cap).unwrap(), vec![Word::empty()]);
        let one: Vec<String> = lex_enumerate(&a, 1, cap)
            .unwrap()
            .iter()
            .map(|w| a.render(&w.0))
            .collect();
        assert_eq!(one, ["0", "1"]);
        let two: Vec<String> = lex_enumerate(&a, 2, cap)
            .unwrap()
            .iter()
            .map(|w| a.render(&w.0))
            .collect();
        assert_eq!(two, ["00", "01", "10", "11"]);
    }

    #[test]
    fn lex_matches_counting_oracle() {
        // independent oracle: integers 0..radix^n written in base radix
        let a = Alphabet::new("abc").unwrap();
        let words = lex_enumerate(&a, 3, EnumCap::default()).unwrap();
        assert_eq!(words.len(), 27);
        for (i, w) in words.iter().enumerate() {
            let digits = [(i / 9) % 3, (i / 3) % 3, i % 3];
            let expect: Vec<Symbol> = digits.iter().map(|&d| Symbol(d as u16)).collect();
            assert_eq!(w.0, expect);
        }
    }

    #[test]
    fn lex_respects_cap() {
        let a = Alphabet::binary();
        let err = lex_enumerate(&a, 10, EnumCap(100)).unwrap_err();
        assert!(matches!(err, Error::Capacity { requested: 1024, cap: 100 }));
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(reverse(&Word::empty()), Word::empty());
        assert_eq!(reverse(&bin("001")), bin("100"));
        assert_eq!(reverse(&bin("010")), bin("010"));
    }

    #[test]
    fn reverse_involution_exhaustive() {
        let a = Alphabet::binary();
        for w in enumerate_up_to(&a, 12, EnumCap::default()).unwrap() {
            assert_eq!(reverse(&reverse(&w)), w);
        }
    }

    #[test]
    fn alphabet_rejects_bad_symbols() {
        assert!(Alphabet::new("0").is_err());
        assert!(Alphabet::new("00").is_err());
        assert!(Alphabet::new("0~").is_err());
        assert!(Alphabet::new("0 1").is_err());
        assert!(Alphabet::new_stack("z").is_ok());
    }

    #[test]
    fn unknown_symbol_in_word() {
        assert!(matches!(
            Alphabet::binary().word("012"),
            Err(Error::UnknownSymbol { symbol: '2', .. })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn reverse_is_involution(v in proptest::collection::vec(0u16..2, 0..20)) {
                let w = Word(v.into_iter().map(Symbol).collect());
                prop_assert_eq!(reverse(&reverse(&w)), w);
            }

            #[test]
            fn lex_sorted_unique(radix in 2usize..4, n in 0usize..6) {
                let a = Alphabet::new(&"abcd"[..radix]).unwrap();
                let words = lex_enumerate(&a, n, EnumCap::default()).unwrap();
                prop_assert_eq!(words.len() as u128, count_words(radix as u32, n));
                for pair in words.windows(2) {
                    prop_assert!(pair[0] < pair[1]);
                }
            }
        }
    }
}
