use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::alphabet::{Symbol, Word};
use crate::arith::{ceil_log, radix_pow};
use crate::error::{Error, Result};

/// Shannon-Fano-Elias code for a positive distribution over `Σ^k`.
///
/// Words are ordered lexicographically. The codeword of `w` is the first
/// `1 + ⌈log 1/p(w)⌉` base-|Σ| digits of `F(w) + p(w)/2`, where `F` sums the
/// probabilities of the words before `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SfeCode {
    radix: u32,
    k: usize,
    probs: Vec<BigRational>,
    codewords: Vec<Word>,
}

fn digits(mut x: BigRational, radix: u32, len: usize) -> Word {
    let base = BigRational::from_integer(BigInt::from(radix));
    let mut out = Word::empty();
    for _ in 0..len {
        x *= &base;
        let d = x.to_integer();
        x -= BigRational::from_integer(d.clone());
        out.push(Symbol(d.to_u16().expect("digit below radix")));
    }
    out
}

impl SfeCode {
    /// `probs` lists `p(w)` for every `w ∈ Σ^k` in lex order.
    pub fn build(radix: u32, k: usize, probs: Vec<BigRational>) -> Result<Self> {
        let expected = (radix as usize).pow(k as u32);
        if probs.len() != expected {
            return Err(Error::Domain(format!(
                "expected {expected} block probabilities, got {}",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_positive()) {
            return Err(Error::Domain(format!("p must be positive, got {p}")));
        }
        let total: BigRational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::Domain(format!("block probabilities sum to {total}, not 1")));
        }
        let two = BigRational::from_integer(2.into());
        let mut cumulative = BigRational::zero();
        let mut codewords = Vec::with_capacity(probs.len());
        for p in &probs {
            let len = 1 + ceil_log(&p.recip(), radix)? as usize;
            let mid = &cumulative + p / &two;
            codewords.push(digits(mid, radix, len));
            cumulative += p;
        }
        Ok(SfeCode {
            radix,
            k,
            probs,
            codewords,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn codewords(&self) -> &[Word] {
        &self.codewords
    }

    /// Lex index of a block.
    pub fn index_of(&self, w: &[Symbol]) -> usize {
        assert_eq!(w.len(), self.k, "block has the wrong length");
        w.iter().fold(0, |acc, s| acc * self.radix as usize + s.index())
    }

    pub fn codeword(&self, w: &[Symbol]) -> &Word {
        &self.codewords[self.index_of(w)]
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.codewords.iter().map(Word::len).collect()
    }

    pub fn kraft_sum(&self) -> BigRational {
        self.codewords
            .iter()
            .map(|c| radix_pow(self.radix, -(c.len() as i64)))
            .sum()
    }

    pub fn is_prefix_free(&self) -> bool {
        is_prefix_free(&self.codewords)
    }

    /// Whether every length equals `1 + ⌈log 1/p⌉`, recomputed.
    pub fn lengths_match(&self) -> bool {
        self.probs.iter().zip(&self.codewords).all(|(p, c)| {
            let l = c.len() as i64 - 1;
            // |Σ|^{l-1} < 1/p <= |Σ|^l
            let inv = p.recip();
            radix_pow(self.radix, l) >= inv && (l == 0 || radix_pow(self.radix, l - 1) < inv)
        })
    }
}

/// No word is a prefix of another (duplicates count as prefixes).
pub fn is_prefix_free(words: &[Word]) -> bool {
    let mut sorted: Vec<&Word> = words.iter().collect();
    sorted.sort();
    sorted.windows(2).all(|w| !w[0].is_prefix_of(w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::arith::rat;

    fn render(code: &SfeCode) -> Vec<String> {
        let a = Alphabet::binary();
        code.codewords().iter().map(|w| a.render(w.symbols())).collect()
    }

    #[test]
    fn uniform_binary() {
        let code = SfeCode::build(2, 1, vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(render(&code), ["01", "11"]);
        assert!(code.kraft_sum() <= BigRational::one());
    }

    #[test]
    fn skewed_binary() {
        let code = SfeCode::build(2, 1, vec![rat(3, 4), rat(1, 4)]).unwrap();
        assert_eq!(code.lengths(), [2, 3]);
        assert_eq!(render(&code), ["01", "111"]);
        assert!(code.is_prefix_free());
        assert!(code.kraft_sum() <= BigRational::one());
        assert!(code.lengths_match());
    }

    #[test]
    fn rejects_bad_distributions() {
        assert!(SfeCode::build(2, 1, vec![rat(1, 2), rat(1, 3)]).is_err());
        assert!(SfeCode::build(2, 1, vec![rat(1, 1), rat(0, 1)]).is_err());
        assert!(SfeCode::build(2, 2, vec![rat(1, 2), rat(1, 2)]).is_err());
    }

    #[test]
    fn prefix_free_helper() {
        let a = Alphabet::binary();
        let w = |s: &str| a.word(s).unwrap();
        assert!(is_prefix_free(&[w("0"), w("10"), w("11")]));
        assert!(!is_prefix_free(&[w("0"), w("01")]));
        assert!(!is_prefix_free(&[w("1"), w("1")]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn random_distributions_give_valid_codes(
                radix in 2u32..4,
                k in 1usize..4,
                weights in proptest::collection::vec(1u32..1000, 64),
            ) {
                let n = (radix as usize).pow(k as u32);
                let w = &weights[..n];
                let total: u64 = w.iter().map(|&x| x as u64).sum();
                let probs: Vec<BigRational> = w
                    .iter()
                    .map(|&x| BigRational::new(BigInt::from(x), BigInt::from(total)))
                    .collect();
                let code = SfeCode::build(radix, k, probs).unwrap();
                prop_assert!(code.is_prefix_free());
                prop_assert!(code.lengths_match());
                prop_assert!(code.kraft_sum() <= BigRational::one());
            }
        }
    }
}
