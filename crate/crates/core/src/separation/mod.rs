//! The sequence `S` that LZ78 compresses poorly but a pushdown gambler
//! exploits, with its zone annotations.

mod gambler;
mod verify;

pub use gambler::*;
pub use verify::*;

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::alphabet::{reverse, EnumCap, Symbol, Word};
use crate::error::{Error, Result};

const ZERO: Symbol = Symbol(0);
const ONE: Symbol = Symbol(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Run-length buffered flag detection at threshold `2k - 1`.
    #[default]
    Corrected,
    /// The machine exactly as described in the proof; fails on `S`.
    Paper,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Corrected => "corrected",
            Mode::Paper => "paper",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(Mode::Corrected),
            "paper" => Ok(Mode::Paper),
            _ => Err(Error::Domain(format!("unknown mode {s:?}, expected corrected or paper"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparationSpec {
    k: usize,
    mode: Mode,
}

impl SeparationSpec {
    pub fn new(k: usize, mode: Mode) -> Result<Self> {
        let min = match mode {
            Mode::Corrected => 3,
            Mode::Paper => 2,
        };
        if k < min {
            return Err(Error::Domain(format!("{} mode needs k >= {min}, got {k}", mode.name())));
        }
        Ok(SeparationSpec { k, mode })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `a = 1 - 1/k`.
    pub fn a(&self) -> BigRational {
        BigRational::new(BigInt::from(self.k - 1), BigInt::from(self.k))
    }

    /// Run threshold of the corrected gambler.
    pub fn tau(&self) -> usize {
        2 * self.k - 1
    }

    /// Length of `S_1 … S_{k-1} 1^k … 1^{2k-1}`.
    pub fn v(&self) -> usize {
        early_len(self.k)
    }
}

pub fn early_len(k: usize) -> usize {
    let stages: usize = (1..k).map(|j| j << j).sum();
    let flags: usize = (k..2 * k).sum();
    stages + flags
}

/// `|T_n|` by counting trailing 1-runs.
pub fn count_t(n: usize, k: usize) -> u128 {
    // by_run[r] = strings ending in exactly r ones
    let mut by_run = vec![0u128; k];
    by_run[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u128; k];
        next[0] = by_run.iter().sum();
        next[1..k].copy_from_slice(&by_run[..k - 1]);
        by_run = next;
    }
    by_run.iter().sum()
}

/// Length-`n` binary strings without `1^k`, in lex order.
pub fn enumerate_t(n: usize, k: usize, cap: EnumCap) -> Result<Vec<Word>> {
    if n == 0 || k < 2 {
        return Err(Error::Domain(format!("enumerate_T needs n >= 1 and k >= 2, got n={n}, k={k}")));
    }
    cap.check(count_t(n, k))?;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    extend_t(&mut cur, 0, n, k, &mut out);
    Ok(out)
}

fn extend_t(cur: &mut Vec<Symbol>, run: usize, n: usize, k: usize, out: &mut Vec<Word>) {
    if cur.len() == n {
        out.push(Word(cur.clone()));
        return;
    }
    cur.push(ZERO);
    extend_t(cur, 0, n, k, out);
    cur.pop();
    if run + 1 < k {
        cur.push(ONE);
        extend_t(cur, run + 1, n, k, out);
        cur.pop();
    }
}

pub fn is_palindrome(w: &Word) -> bool {
    let s = w.symbols();
    s.iter().eq(s.iter().rev())
}

/// `A_n`, `X_n`, `Y_n` for one stage; `y_i = reverse(x_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZoneLayout {
    pub n: usize,
    pub a: Vec<Word>,
    pub x: Vec<Word>,
    pub y: Vec<Word>,
}

impl ZoneLayout {
    pub fn t(&self) -> usize {
        self.x.len()
    }

    pub fn u(&self) -> usize {
        self.a.len()
    }

    /// `|T_n|`.
    pub fn t_size(&self) -> usize {
        self.a.len() + 2 * self.x.len()
    }

    pub fn flag1(&self) -> Word {
        Word(vec![ONE; 2 * self.n])
    }

    pub fn flag2(&self) -> Word {
        Word(vec![ONE; 2 * self.n + 1])
    }

    pub fn a_text(&self) -> Word {
        Word(self.a.iter().flat_map(|w| w.symbols().iter().copied()).collect())
    }

    pub fn x_text(&self) -> Word {
        Word(self.x.iter().flat_map(|w| w.symbols().iter().copied()).collect())
    }

    /// `y_t … y_1`.
    pub fn y_text(&self) -> Word {
        Word(self.y.iter().rev().flat_map(|w| w.symbols().iter().copied()).collect())
    }

    /// `|S_n| = u·n + 2n + t·n + (2n+1) + t·n`.
    pub fn stage_len(&self) -> usize {
        let n = self.n;
        self.u() * n + 2 * n + self.t() * n + 2 * n + 1 + self.t() * n
    }
}

fn starts_with_zero(w: &Word) -> bool {
    w.symbols().first() == Some(&ZERO)
}

fn ends_with_zero(w: &Word) -> bool {
    w.symbols().last() == Some(&ZERO)
}

/// Splits `T_n` into palindromes and oriented reversal pairs.
///
/// Pairs are listed by their smaller element. The first pair is oriented so
/// `x_1` starts with 0. The last orientable pair (an element ending in 0) is
/// swapped into last place and oriented so `x_t` ends with 0. All other pairs
/// put the smaller element in `X`.
pub fn split_zones(n: usize, k: usize, cap: EnumCap) -> Result<ZoneLayout> {
    if n < k {
        return Err(Error::Domain(format!("zones are defined for n >= k, got n={n}, k={k}")));
    }
    let degenerate = |reason: &str| Error::DegenerateZone {
        n,
        k,
        reason: reason.to_string(),
    };
    let t_n = enumerate_t(n, k, cap)?;
    let mut a = Vec::new();
    let mut pairs: Vec<(Word, Word)> = Vec::new();
    for w in t_n {
        if is_palindrome(&w) {
            a.push(w);
        } else {
            let r = reverse(&w);
            if w < r {
                pairs.push((w, r));
            }
        }
    }
    if pairs.is_empty() {
        return Err(degenerate("no non-palindromes"));
    }
    let t = pairs.len();
    let mut x = Vec::with_capacity(t);
    if t == 1 {
        let (lo, hi) = pairs.pop().expect("one pair");
        let pick = [lo, hi]
            .into_iter()
            .find(|w| starts_with_zero(w) && ends_with_zero(w))
            .ok_or_else(|| degenerate("the only reversal pair cannot start and end the X zone with 0"))?;
        x.push(pick);
    } else {
        if !starts_with_zero(&pairs[0].0) {
            return Err(degenerate("no reversal pair starts with 0"));
        }
        let last = (1..t)
            .rev()
            .find(|&i| ends_with_zero(&pairs[i].0) || ends_with_zero(&pairs[i].1))
            .ok_or_else(|| degenerate("no reversal pair can end the X zone with 0"))?;
        pairs.swap(last, t - 1);
        for (i, (lo, hi)) in pairs.into_iter().enumerate() {
            if i == t - 1 && !ends_with_zero(&lo) {
                x.push(hi);
            } else {
                x.push(lo);
            }
        }
    }
    let y = x.iter().map(reverse).collect();
    Ok(ZoneLayout { n, a, x, y })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Zone {
    /// `S_j` for `j < k`: every string of length `j`.
    Early,
    /// An extra flag `1^j`, `k <= j < 2k`.
    EarlyFlag,
    A,
    Flag1,
    X,
    Flag2,
    Y,
}

impl Zone {
    pub fn name(self) -> &'static str {
        match self {
            Zone::Early => "early",
            Zone::EarlyFlag => "early-flag",
            Zone::A => "A",
            Zone::Flag1 => "flag1",
            Zone::X => "X",
            Zone::Flag2 => "flag2",
            Zone::Y => "Y",
        }
    }

    pub fn is_flag(self) -> bool {
        matches!(self, Zone::EarlyFlag | Zone::Flag1 | Zone::Flag2)
    }
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Half-open span `start..end` of `zone` in stage `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZoneSpan {
    pub start: usize,
    pub end: usize,
    pub zone: Zone,
    pub n: usize,
}

impl ZoneSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.start <= pos && pos < self.end
    }
}

/// `S` through `S_upto`.
#[derive(Debug, Clone)]
pub struct SeparationSequence {
    spec: SeparationSpec,
    upto: usize,
    text: Word,
    spans: Vec<ZoneSpan>,
    layouts: Vec<ZoneLayout>,
    stage_bounds: HashMap<usize, (usize, usize)>,
}

pub fn generate_s(spec: &SeparationSpec, upto: usize, cap: EnumCap) -> Result<SeparationSequence> {
    let k = spec.k();
    if upto < k {
        return Err(Error::Domain(format!("sequence must run through S_n with n >= k={k}, got {upto}")));
    }
    let mut text: Vec<Symbol> = Vec::new();
    let mut spans = Vec::new();
    let mut stage_bounds = HashMap::new();
    let mut push = |text: &mut Vec<Symbol>, w: &[Symbol], zone: Zone, n: usize| {
        let start = text.len();
        text.extend_from_slice(w);
        spans.push(ZoneSpan {
            start,
            end: text.len(),
            zone,
            n,
        });
    };
    for j in 1..k {
        let start = text.len();
        let all = enumerate_t(j, j + 1, cap)?;
        let flat: Vec<Symbol> = all.iter().flat_map(|w| w.symbols().iter().copied()).collect();
        push(&mut text, &flat, Zone::Early, j);
        stage_bounds.insert(j, (start, text.len()));
    }
    for j in k..2 * k {
        push(&mut text, &vec![ONE; j], Zone::EarlyFlag, j);
    }
    let mut layouts = Vec::new();
    for n in k..=upto {
        let layout = split_zones(n, k, cap)?;
        let start = text.len();
        push(&mut text, layout.a_text().symbols(), Zone::A, n);
        push(&mut text, layout.flag1().symbols(), Zone::Flag1, n);
        push(&mut text, layout.x_text().symbols(), Zone::X, n);
        push(&mut text, layout.flag2().symbols(), Zone::Flag2, n);
        push(&mut text, layout.y_text().symbols(), Zone::Y, n);
        stage_bounds.insert(n, (start, text.len()));
        layouts.push(layout);
    }
    Ok(SeparationSequence {
        spec: *spec,
        upto,
        text: Word(text),
        spans,
        layouts,
        stage_bounds,
    })
}

impl SeparationSequence {
    pub fn spec(&self) -> &SeparationSpec {
        &self.spec
    }

    pub fn upto(&self) -> usize {
        self.upto
    }

    pub fn text(&self) -> &Word {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn spans(&self) -> &[ZoneSpan] {
        &self.spans
    }

    pub fn layouts(&self) -> &[ZoneLayout] {
        &self.layouts
    }

    /// Layout of stage `n >= k`.
    pub fn layout(&self, n: usize) -> Option<&ZoneLayout> {
        n.checked_sub(self.spec.k()).and_then(|i| self.layouts.get(i))
    }

    /// `start..end` of `S_n`; `None` for the early flags or past `upto`.
    pub fn stage(&self, n: usize) -> Option<(usize, usize)> {
        self.stage_bounds.get(&n).copied()
    }

    pub fn early_len(&self) -> usize {
        self.spec.v()
    }

    pub fn span_at(&self, pos: usize) -> Option<&ZoneSpan> {
        let i = self.spans.partition_point(|s| s.end <= pos);
        self.spans.get(i).filter(|s| s.contains(pos))
    }

    /// The first `len` symbols as a sequence of its own.
    pub fn prefix(&self, len: usize) -> &[Symbol] {
        &self.text.symbols()[..len.min(self.len())]
    }
}

/// Zone annotation CSV: `start,end,zone,n`.
pub fn write_zone_csv<W: Write>(spans: &[ZoneSpan], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["start", "end", "zone", "n"])?;
    for s in spans {
        wtr.write_record([
            s.start.to_string(),
            s.end.to_string(),
            s.zone.name().to_string(),
            s.n.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{lex_enumerate, Alphabet};

    fn bin(s: &str) -> Word {
        Alphabet::binary().word(s).unwrap()
    }

    fn render(ws: &[Word]) -> Vec<String> {
        let a = Alphabet::binary();
        ws.iter().map(|w| a.render(w.symbols())).collect()
    }

    fn has_run(w: &Word, k: usize) -> bool {
        let mut run = 0;
        w.symbols().iter().any(|&s| {
            run = if s == ONE { run + 1 } else { 0 };
            run >= k
        })
    }

    #[test]
    fn t_examples() {
        let cap = EnumCap::default();
        assert_eq!(render(&enumerate_t(3, 2, cap).unwrap()), ["000", "001", "010", "100", "101"]);
        assert_eq!(enumerate_t(3, 3, cap).unwrap().len(), 7);
        assert_eq!(render(&enumerate_t(1, 5, cap).unwrap()), ["0", "1"]);
        assert!(enumerate_t(0, 3, cap).is_err());
        assert!(matches!(enumerate_t(30, 3, EnumCap(1000)), Err(Error::Capacity { .. })));
    }

    #[test]
    fn t_matches_brute_force() {
        let a = Alphabet::binary();
        for k in 2..=5 {
            for n in 1..=10 {
                let brute: Vec<Word> = lex_enumerate(&a, n, EnumCap::default())
                    .unwrap()
                    .into_iter()
                    .filter(|w| !has_run(w, k))
                    .collect();
                assert_eq!(enumerate_t(n, k, EnumCap::default()).unwrap(), brute);
                assert_eq!(count_t(n, k), brute.len() as u128);
            }
        }
    }

    #[test]
    fn zones_k3_n3() {
        let z = split_zones(3, 3, EnumCap::default()).unwrap();
        assert_eq!(render(&z.a), ["000", "010", "101"]);
        assert_eq!(render(&z.x), ["001", "110"]);
        assert_eq!(render(&z.y), ["100", "011"]);
        assert_eq!(z.y_text(), bin("011100"));
        assert_eq!(z.y_text(), reverse(&z.x_text()));
    }

    #[test]
    fn degenerate_k2() {
        assert!(matches!(
            split_zones(3, 2, EnumCap::default()),
            Err(Error::DegenerateZone { n: 3, k: 2, .. })
        ));
    }

    #[test]
    fn zone_algebra() {
        for k in [3, 4, 5] {
            for n in k..=12 {
                let z = split_zones(n, k, EnumCap::default()).unwrap();
                let mut all: Vec<Word> = z.a.iter().chain(&z.x).chain(&z.y).cloned().collect();
                all.sort();
                let len = all.len();
                all.dedup();
                assert_eq!(all.len(), len, "zones overlap");
                assert_eq!(all, enumerate_t(n, k, EnumCap::default()).unwrap());
                assert!(z.a.contains(&Word(vec![ZERO; n])));
                assert!(starts_with_zero(&z.x[0]));
                assert!(ends_with_zero(z.x.last().unwrap()));
                assert_eq!(z.y_text(), reverse(&z.x_text()));
            }
        }
    }

    #[test]
    fn early_segment_k3() {
        let spec = SeparationSpec::new(3, Mode::Corrected).unwrap();
        assert_eq!(spec.v(), 22);
        assert_eq!(SeparationSpec::new(5, Mode::Corrected).unwrap().v(), 133);
        let s = generate_s(&spec, 3, EnumCap::default()).unwrap();
        let a = Alphabet::binary();
        assert_eq!(a.render(s.prefix(22)), "0100011011111111111111");
        assert_eq!(
            a.render(&s.text().symbols()[22..]),
            ["000010101", "111111", "001110", "1111111", "011100"].concat()
        );
        assert_eq!(s.len(), 22 + s.layout(3).unwrap().stage_len());
        assert_eq!(s.stage(3), Some((22, s.len())));
        assert_eq!(s.stage(2), Some((2, 10)));
    }

    #[test]
    fn stage_lengths_and_spans() {
        let spec = SeparationSpec::new(4, Mode::Corrected).unwrap();
        let s = generate_s(&spec, 8, EnumCap::default()).unwrap();
        let mut pos = 0;
        for span in s.spans() {
            assert_eq!(span.start, pos);
            pos = span.end;
            assert_eq!(s.span_at(span.start), Some(span));
        }
        assert_eq!(pos, s.len());
        for n in 4..=8 {
            let (start, end) = s.stage(n).unwrap();
            assert_eq!(end - start, s.layout(n).unwrap().stage_len());
        }
        assert!(s.span_at(s.len()).is_none());
    }

    #[test]
    fn spec_bounds() {
        assert!(SeparationSpec::new(2, Mode::Corrected).is_err());
        assert!(SeparationSpec::new(2, Mode::Paper).is_ok());
        assert!(SeparationSpec::new(1, Mode::Paper).is_err());
        let spec = SeparationSpec::new(3, Mode::Corrected).unwrap();
        assert!(generate_s(&spec, 2, EnumCap::default()).is_err());
    }

    #[test]
    fn zone_csv() {
        let spec = SeparationSpec::new(3, Mode::Corrected).unwrap();
        let s = generate_s(&spec, 3, EnumCap::default()).unwrap();
        let mut buf = Vec::new();
        write_zone_csv(s.spans(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "start,end,zone,n");
        assert_eq!(lines[1], "0,2,early,1");
        assert_eq!(lines[3], "10,13,early-flag,3");
        assert_eq!(lines[6], "22,31,A,3");
        assert_eq!(lines.len(), 1 + 2 + 3 + 5);
    }
}
