use std::collections::BTreeSet;

use num_bigint::BigUint;

use super::{enumerate_t, is_palindrome, SeparationSequence, Zone, ONE};
use crate::alphabet::{enumerate_up_to, Alphabet, EnumCap, Word};
use crate::error::{Error, Result};
use crate::lz::{lz_parse, lz_phrases_of_segment};

/// Which part of `S` a parse check covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    /// `S_1 … S_{k-1} 1^k … 1^{2k-1}`.
    Early,
    Stage(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseClaimFailure {
    Straddle { segment: Segment, error: Error },
    Mismatch {
        segment: Segment,
        missing: Vec<Word>,
        unexpected: Vec<Word>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseClaimReport {
    pub checked: Vec<Segment>,
    pub failure: Option<ParseClaimFailure>,
}

impl ParseClaimReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

fn ones(n: usize) -> Word {
    Word(vec![ONE; n])
}

/// The phrases LZ78 should produce on each segment of `S`.
pub fn expected_phrases(seq: &SeparationSequence, segment: Segment, cap: EnumCap) -> Result<BTreeSet<Word>> {
    let k = seq.spec().k();
    let mut out = BTreeSet::new();
    match segment {
        Segment::Early => {
            out.extend(enumerate_up_to(&Alphabet::binary(), k - 1, cap)?.into_iter().filter(|w| !w.is_empty()));
            out.extend((k..2 * k).map(ones));
        }
        Segment::Stage(n) => {
            out.extend(enumerate_t(n, k, cap)?);
            out.insert(ones(2 * n));
            out.insert(ones(2 * n + 1));
        }
    }
    Ok(out)
}

/// Checks that LZ78 parses the early segment and every `S_n` into exactly
/// the expected phrases, with no phrase crossing a segment boundary.
pub fn verify_parse_claim(seq: &SeparationSequence, cap: EnumCap) -> Result<ParseClaimReport> {
    let k = seq.spec().k();
    let table = lz_parse(seq.text().symbols(), 2);
    let mut segments = vec![(Segment::Early, 0, seq.early_len())];
    for n in k..=seq.upto() {
        let (start, end) = seq.stage(n).expect("generated stage");
        segments.push((Segment::Stage(n), start, end));
    }
    let mut checked = Vec::new();
    for (segment, start, end) in segments {
        let phrases = match lz_phrases_of_segment(&table, start, end) {
            Ok(p) => p,
            Err(error @ Error::StraddlingPhrase { .. }) => {
                return Ok(ParseClaimReport {
                    checked,
                    failure: Some(ParseClaimFailure::Straddle { segment, error }),
                })
            }
            Err(e) => return Err(e),
        };
        let count = phrases.len();
        let got: BTreeSet<Word> = phrases.into_iter().collect();
        let want = expected_phrases(seq, segment, cap)?;
        if got != want || count != want.len() {
            return Ok(ParseClaimReport {
                checked,
                failure: Some(ParseClaimFailure::Mismatch {
                    segment,
                    missing: want.difference(&got).cloned().collect(),
                    unexpected: got.difference(&want).cloned().collect(),
                }),
            });
        }
        checked.push(segment);
    }
    Ok(ParseClaimReport { checked, failure: None })
}

/// Every `x ∈ T_n` has its length `n-1` prefix in `T_{n-1}`, for `2 <= n <= max_n`.
/// Returns the first counterexample.
pub fn check_prefix_extension(k: usize, max_n: usize, cap: EnumCap) -> Result<Option<Word>> {
    for n in 2..=max_n {
        let shorter: BTreeSet<Word> = enumerate_t(n - 1, k, cap)?.into_iter().collect();
        for x in enumerate_t(n, k, cap)? {
            let prefix = Word(x.symbols()[..n - 1].to_vec());
            if !shorter.contains(&prefix) {
                return Ok(Some(x));
            }
        }
    }
    Ok(None)
}

/// `|A_n| <= 2^{⌈n/2⌉}` and `|T_n| >= 2^{(1-1/k)n}` for `1 <= n <= max_n`.
/// Returns the first `n` that breaks either bound.
pub fn check_size_bounds(k: usize, max_n: usize, cap: EnumCap) -> Result<Option<usize>> {
    for n in 1..=max_n {
        let t_n = enumerate_t(n, k, cap)?;
        let palindromes = t_n.iter().filter(|w| is_palindrome(w)).count();
        let palindromes_ok = (palindromes as u128) <= 1u128 << n.div_ceil(2);
        // |T_n|^k >= 2^{(k-1)n}, in integers
        let growth_ok = BigUint::from(t_n.len()).pow(k as u32) >= BigUint::from(1u8) << ((k - 1) * n);
        if !(palindromes_ok && growth_ok) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunViolation {
    /// A 1-run of length `>= τ` inside an `A`, `X` or `Y` zone.
    LongRun { zone: Zone, n: usize, start: usize, len: usize },
    /// A flag shorter than `2k`.
    ShortFlag { zone: Zone, n: usize, len: usize },
}

/// Scans every zone of the annotated sequence for the corrected gambler's
/// preconditions.
pub fn check_run_safety(seq: &SeparationSequence) -> Option<RunViolation> {
    let k = seq.spec().k();
    let tau = seq.spec().tau();
    let text = seq.text().symbols();
    for span in seq.spans() {
        match span.zone {
            Zone::Flag1 | Zone::Flag2 if span.len() < 2 * k => {
                return Some(RunViolation::ShortFlag {
                    zone: span.zone,
                    n: span.n,
                    len: span.len(),
                });
            }
            Zone::A | Zone::X | Zone::Y => {
                let mut run = 0;
                for (p, &b) in text.iter().enumerate().take(span.end).skip(span.start) {
                    run = if b == ONE { run + 1 } else { 0 };
                    if run >= tau {
                        return Some(RunViolation::LongRun {
                            zone: span.zone,
                            n: span.n,
                            start: p + 1 - run,
                            len: run,
                        });
                    }
                }
            }
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separation::{generate_s, Mode, SeparationSpec};

    fn seq(k: usize, upto: usize) -> SeparationSequence {
        let spec = SeparationSpec::new(k, Mode::Corrected).unwrap();
        generate_s(&spec, upto, EnumCap::default()).unwrap()
    }

    #[test]
    fn parse_claim_k3() {
        let report = verify_parse_claim(&seq(3, 6), EnumCap::default()).unwrap();
        assert!(report.holds(), "{:?}", report.failure);
        assert_eq!(report.checked.len(), 5);
    }

    #[test]
    fn parse_claim_other_k() {
        for k in [4, 5] {
            let report = verify_parse_claim(&seq(k, k + 3), EnumCap::default()).unwrap();
            assert!(report.holds(), "k={k}: {:?}", report.failure);
        }
    }

    #[test]
    fn s3_segment_phrases() {
        let s = seq(3, 3);
        let t = lz_parse(s.text().symbols(), 2);
        let (start, end) = s.stage(3).unwrap();
        let got: BTreeSet<Word> = lz_phrases_of_segment(&t, start, end).unwrap().into_iter().collect();
        let mut want: BTreeSet<Word> = enumerate_t(3, 3, EnumCap::default()).unwrap().into_iter().collect();
        want.insert(ones(6));
        want.insert(ones(7));
        assert_eq!(got, want);
    }

    #[test]
    fn corrupted_sequence_is_caught() {
        let s = seq(3, 4);
        let mut text = s.text().symbols().to_vec();
        let (start, _) = s.stage(4).unwrap();
        text.swap(start, start + 5);
        let t = lz_parse(&text, 2);
        let (s4, e4) = s.stage(4).unwrap();
        let ok = match lz_phrases_of_segment(&t, s4, e4) {
            Ok(p) => p.into_iter().collect::<BTreeSet<_>>() == expected_phrases(&s, Segment::Stage(4), EnumCap::default()).unwrap(),
            Err(_) => false,
        };
        assert!(!ok);
    }

    #[test]
    fn prefix_extension_and_bounds() {
        for k in [2, 3, 5] {
            assert_eq!(check_prefix_extension(k, 10, EnumCap::default()).unwrap(), None);
        }
        for k in [2, 3, 5] {
            assert_eq!(check_size_bounds(k, 16, EnumCap::default()).unwrap(), None);
        }
    }

    #[test]
    fn run_safety() {
        for k in [3, 4, 5] {
            assert_eq!(check_run_safety(&seq(k, 12)), None);
        }
    }
}
