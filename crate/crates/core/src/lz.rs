//! LZ78 parsing and output-length accounting.

use std::collections::HashMap;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::alphabet::{Alphabet, Symbol, Word};
use crate::arith::{ceil_log_u, floor_log_u};
use crate::error::{Error, Result};

/// How phrase pointers are coded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PointerCode {
    /// `⌈log i⌉` symbols for the `i`-th phrase (i entries before it, λ included).
    #[default]
    FixedWidth,
    /// Elias gamma in base |Σ| on `parent + 1`: `2⌊log x⌋ + 1` symbols.
    Gamma,
}

impl PointerCode {
    /// Symbols used for the pointer of phrase `i` (1-based) whose parent is `parent`.
    fn pointer_len(self, i: usize, parent: usize, radix: u32) -> usize {
        match self {
            PointerCode::FixedWidth => ceil_log_u(i as u64, radix) as usize,
            PointerCode::Gamma => 2 * floor_log_u(parent as u64 + 1, radix) as usize + 1,
        }
    }
}

/// The dictionary of an LZ78 parse. Phrase 0 is λ; phrase `i >= 1` is
/// `phrase(parent) · symbol`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhraseTable {
    /// `(parent, symbol)` for phrases `1..=C`.
    pub phrases: Vec<(usize, Symbol)>,
    pub lengths: Vec<usize>,
    /// The phrase equal to the unfinished tail, if the input ends mid-phrase.
    pub final_incomplete: Option<usize>,
}

impl PhraseTable {
    /// Number of complete phrases `C(x)`.
    pub fn count(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty() && self.final_incomplete.is_none()
    }

    /// Text of phrase `i` (0 is λ).
    pub fn phrase(&self, i: usize) -> Word {
        let mut rev = Vec::new();
        let mut cur = i;
        while cur != 0 {
            let (parent, b) = self.phrases[cur - 1];
            rev.push(b);
            cur = parent;
        }
        rev.reverse();
        Word(rev)
    }

    /// Concatenation of all phrases and the tail.
    pub fn reconstruct(&self) -> Word {
        let mut out = Word::empty();
        for i in 1..=self.count() {
            out.extend_from(&self.phrase(i));
        }
        if let Some(t) = self.final_incomplete {
            out.extend_from(&self.phrase(t));
        }
        out
    }

    /// Start offsets of the complete phrases, plus the end of the last one.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.count() + 1);
        let mut pos = 0;
        out.push(0);
        for &l in &self.lengths {
            pos += l;
            out.push(pos);
        }
        out
    }

    /// `i parent symbol` lines.
    pub fn dump<W: Write>(&self, alphabet: &Alphabet, mut out: W) -> Result<()> {
        for (i, &(parent, b)) in self.phrases.iter().enumerate() {
            writeln!(out, "{} {} {}", i + 1, parent, alphabet.char_of(b))?;
        }
        if let Some(t) = self.final_incomplete {
            writeln!(out, "{} {} ~", self.count() + 1, t)?;
        }
        Ok(())
    }
}

/// Incremental LZ78 parser with running output length.
#[derive(Debug, Clone)]
pub struct LzStream {
    radix: u32,
    code: PointerCode,
    children: HashMap<(usize, Symbol), usize>,
    table: PhraseTable,
    node: usize,
    node_len: usize,
    complete_len: usize,
    consumed: usize,
}

impl LzStream {
    pub fn new(radix: u32, code: PointerCode) -> Self {
        LzStream {
            radix,
            code,
            children: HashMap::new(),
            table: PhraseTable::default(),
            node: 0,
            node_len: 0,
            complete_len: 0,
            consumed: 0,
        }
    }

    pub fn push(&mut self, b: Symbol) {
        self.consumed += 1;
        if let Some(&next) = self.children.get(&(self.node, b)) {
            self.node = next;
            self.node_len += 1;
            return;
        }
        let i = self.table.phrases.len() + 1;
        self.children.insert((self.node, b), i);
        self.complete_len += self.code.pointer_len(i, self.node, self.radix) + 1;
        self.table.phrases.push((self.node, b));
        self.table.lengths.push(self.node_len + 1);
        self.node = 0;
        self.node_len = 0;
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn phrase_count(&self) -> usize {
        self.table.phrases.len()
    }

    /// `|LZ(x)|` for the input so far; an unfinished tail is a bare pointer.
    pub fn output_len(&self) -> usize {
        if self.node == 0 {
            return self.complete_len;
        }
        let i = self.table.phrases.len() + 1;
        self.complete_len + self.code.pointer_len(i, self.node, self.radix)
    }

    pub fn finish(mut self) -> PhraseTable {
        if self.node != 0 {
            self.table.final_incomplete = Some(self.node);
        }
        self.table
    }
}

/// Greedy parse: each phrase is the shortest unseen prefix of the rest.
pub fn lz_parse(x: &[Symbol], radix: u32) -> PhraseTable {
    let mut s = LzStream::new(radix, PointerCode::FixedWidth);
    for &b in x {
        s.push(b);
    }
    s.finish()
}

/// `Σ_{i=1}^{C} (pointer_i + 1)`, plus a bare pointer for an unfinished tail.
pub fn lz_output_length(t: &PhraseTable, radix: u32, code: PointerCode) -> usize {
    let mut total = 0;
    for (i, &(parent, _)) in t.phrases.iter().enumerate() {
        total += code.pointer_len(i + 1, parent, radix) + 1;
    }
    if let Some(parent) = t.final_incomplete {
        total += code.pointer_len(t.count() + 1, parent, radix);
    }
    total
}

/// `|LZ(x)| / |x|` exactly.
pub fn lz_ratio(x: &[Symbol], radix: u32, code: PointerCode) -> Result<BigRational> {
    if x.is_empty() {
        return Err(Error::Domain("LZ ratio of the empty string".into()));
    }
    let t = lz_parse(x, radix);
    Ok(BigRational::new(
        BigInt::from(lz_output_length(&t, radix, code)),
        BigInt::from(x.len()),
    ))
}

/// Complete phrases lying inside `start..end`, in parse order. Fails on any
/// phrase (or the unfinished tail) that crosses a segment boundary.
pub fn lz_phrases_of_segment(t: &PhraseTable, start: usize, end: usize) -> Result<Vec<Word>> {
    let offsets = t.offsets();
    let mut out = Vec::new();
    for i in 0..t.count() {
        let (s, e) = (offsets[i], offsets[i + 1]);
        if e <= start || s >= end {
            continue;
        }
        if s < start || e > end {
            return Err(Error::StraddlingPhrase { phrase: i + 1, start: s, end: e });
        }
        out.push(t.phrase(i + 1));
    }
    if let Some(tail) = t.final_incomplete {
        let s = offsets[t.count()];
        let e = s + t.phrase(tail).len();
        if s < end && e > start {
            return Err(Error::StraddlingPhrase {
                phrase: t.count() + 1,
                start: s,
                end: e,
            });
        }
    }
    Ok(out)
}

/// `(n, phrase_count, output_len)` at each checkpoint, in increasing order.
pub fn lz_checkpoints(x: &[Symbol], radix: u32, code: PointerCode, checkpoints: &[usize]) -> Vec<(usize, usize, usize)> {
    let mut points: Vec<usize> = checkpoints.iter().copied().filter(|&n| n <= x.len()).collect();
    points.sort_unstable();
    points.dedup();
    let mut s = LzStream::new(radix, code);
    let mut out = Vec::with_capacity(points.len());
    let mut next = 0;
    for i in 0..=x.len() {
        while next < points.len() && points[next] == i {
            out.push((i, s.phrase_count(), s.output_len()));
            next += 1;
        }
        if i < x.len() {
            s.push(x[i]);
        }
    }
    out
}

/// CSV columns: `n,phrase_count,output_len,ratio`; rows with `n = 0` are skipped.
pub fn write_lz_csv<W: Write>(points: &[(usize, usize, usize)], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["n", "phrase_count", "output_len", "ratio"])?;
    for &(n, count, len) in points {
        if n == 0 {
            continue;
        }
        wtr.write_record([
            n.to_string(),
            count.to_string(),
            len.to_string(),
            format!("{:.12}", len as f64 / n as f64),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn bin(s: &str) -> Word {
        Alphabet::binary().word(s).unwrap()
    }

    fn texts(t: &PhraseTable) -> Vec<String> {
        let a = Alphabet::binary();
        (1..=t.count()).map(|i| a.render(t.phrase(i).symbols())).collect()
    }

    #[test]
    fn parse_examples() {
        let t = lz_parse(bin("001011").symbols(), 2);
        assert_eq!(texts(&t), ["0", "01", "011"]);
        assert_eq!(t.final_incomplete, None);
        let t = lz_parse(bin("0000").symbols(), 2);
        assert_eq!(texts(&t), ["0", "00"]);
        assert_eq!(t.final_incomplete, Some(1));
        assert!(lz_parse(&[], 2).is_empty());
    }

    #[test]
    fn output_length_examples() {
        let t = lz_parse(bin("001011").symbols(), 2);
        assert_eq!(lz_output_length(&t, 2, PointerCode::FixedWidth), 6);
        assert_eq!(lz_output_length(&PhraseTable::default(), 2, PointerCode::FixedWidth), 0);
        // (0+1) + (1+1) + ⌈log 3⌉
        let t = lz_parse(bin("0000").symbols(), 2);
        assert_eq!(lz_output_length(&t, 2, PointerCode::FixedWidth), 5);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(lz_ratio(bin("001011").symbols(), 2, PointerCode::FixedWidth).unwrap(), int(1));
        // 0,00,000,0000,00000 then tail 0: (1+2+3+3+4) + ⌈log 6⌉ = 16
        let zeros = Word(vec![Symbol(0); 16]);
        assert_eq!(lz_ratio(zeros.symbols(), 2, PointerCode::FixedWidth).unwrap(), int(1));
        let zeros = Word(vec![Symbol(0); 15]);
        assert_eq!(lz_ratio(zeros.symbols(), 2, PointerCode::FixedWidth).unwrap(), rat(13, 15));
        assert!(lz_ratio(&[], 2, PointerCode::FixedWidth).is_err());
    }

    #[test]
    fn gamma_lengths() {
        let t = lz_parse(bin("001011").symbols(), 2);
        // parents 0, 1, 2 -> gamma(1), gamma(2), gamma(3) = 1, 3, 3
        assert_eq!(lz_output_length(&t, 2, PointerCode::Gamma), 1 + 1 + 3 + 1 + 3 + 1);
    }

    #[test]
    fn segments() {
        let x = bin("001011");
        let t = lz_parse(x.symbols(), 2);
        assert_eq!(lz_phrases_of_segment(&t, 0, 6).unwrap().len(), 3);
        assert_eq!(lz_phrases_of_segment(&t, 1, 3).unwrap(), vec![bin("01")]);
        assert!(lz_phrases_of_segment(&t, 3, 3).unwrap().is_empty());
        assert_eq!(
            lz_phrases_of_segment(&t, 0, 2),
            Err(Error::StraddlingPhrase { phrase: 2, start: 1, end: 3 })
        );
        let t = lz_parse(bin("0000").symbols(), 2);
        assert!(matches!(lz_phrases_of_segment(&t, 3, 4), Err(Error::StraddlingPhrase { phrase: 3, .. })));
    }

    #[test]
    fn checkpoints_match_full_parses() {
        let x = bin("0100011011000111010");
        let pts = lz_checkpoints(x.symbols(), 2, PointerCode::FixedWidth, &[19, 5, 0, 12]);
        for (n, count, len) in pts {
            let t = lz_parse(&x.symbols()[..n], 2);
            assert_eq!(count, t.count());
            assert_eq!(len, lz_output_length(&t, 2, PointerCode::FixedWidth));
        }
    }

    #[test]
    fn dump_format() {
        let t = lz_parse(bin("00010").symbols(), 2);
        let mut buf = Vec::new();
        t.dump(&Alphabet::binary(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1 0 0\n2 1 0\n3 0 1\n4 1 ~\n");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn parse_round_trips(v in proptest::collection::vec(0u16..3, 0..10_000)) {
                let x: Vec<Symbol> = v.into_iter().map(Symbol).collect();
                let t = lz_parse(&x, 3);
                prop_assert_eq!(t.reconstruct(), Word(x.clone()));
                let mut seen = std::collections::HashSet::new();
                for i in 1..=t.count() {
                    let p = t.phrase(i);
                    prop_assert!(seen.insert(p.clone()));
                    // every proper prefix is an earlier phrase
                    let (parent, _) = t.phrases[i - 1];
                    prop_assert!(parent < i);
                    prop_assert_eq!(t.phrase(parent).len() + 1, p.len());
                }
                let independent: usize = (1..=t.count())
                    .map(|i| ceil_log_u(i as u64, 3) as usize + 1)
                    .sum::<usize>()
                    + t.final_incomplete.map_or(0, |_| ceil_log_u(t.count() as u64 + 1, 3) as usize);
                prop_assert_eq!(independent, lz_output_length(&t, 3, PointerCode::FixedWidth));
            }
        }
    }
}
