//! Running compressors, the information-lossless check and compression ratios.

use std::collections::HashMap;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::alphabet::{count_words, EnumCap, Symbol, Word};
use crate::error::{Error, Result};
use crate::machine::Compressor;

/// `C(w)`: the concatenated per-step outputs.
pub fn compress<C: Compressor>(c: &C, w: &Word) -> Result<Word> {
    let mut out = Word::empty();
    let mut cfg = c.initial();
    for (i, &b) in w.symbols().iter().enumerate() {
        let piece = c.output(&cfg, b).map_err(|e| Error::at(i, e))?;
        out.extend_from(&piece);
        c.advance_in_place(&mut cfg, b).map_err(|e| Error::at(i, e))?;
    }
    Ok(out)
}

/// `|C(w[0..n])|` at the requested prefix lengths, in increasing order.
pub fn output_lengths_at<C: Compressor>(c: &C, w: &[Symbol], checkpoints: &[usize]) -> Result<Vec<(usize, usize)>> {
    let mut points: Vec<usize> = checkpoints.iter().copied().filter(|&n| n <= w.len()).collect();
    points.sort_unstable();
    points.dedup();
    let mut out = Vec::with_capacity(points.len());
    let mut next = 0;
    let mut len = 0;
    let mut cfg = c.initial();
    for i in 0..=w.len() {
        while next < points.len() && points[next] == i {
            out.push((i, len));
            next += 1;
        }
        if i == w.len() {
            break;
        }
        len += c.output(&cfg, w[i]).map_err(|e| Error::at(i, e))?.len();
        c.advance_in_place(&mut cfg, w[i]).map_err(|e| Error::at(i, e))?;
    }
    Ok(out)
}

/// Two inputs with the same output and final state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlCollision {
    pub first: Word,
    pub second: Word,
    pub output: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlReport {
    pub lossless: bool,
    pub checked: usize,
    pub collision: Option<IlCollision>,
}

/// Brute-force injectivity of `w -> (C(w), final state)` over all `|w| <= max_len`.
///
/// Words are visited shortest first, each length in lex order, so the
/// reported pair is the first collision in that order.
pub fn il_check<C: Compressor>(c: &C, max_len: usize, cap: EnumCap) -> Result<IlReport> {
    let radix = c.input_alphabet().radix();
    let total: u128 = (0..=max_len).map(|j| count_words(radix, j)).sum();
    cap.check(total)?;
    let symbols: Vec<Symbol> = c.input_alphabet().symbols().collect();
    let mut seen: HashMap<(Word, C::State), Word> = HashMap::new();
    let mut level = vec![(c.initial(), Word::empty(), Word::empty())];
    let mut checked = 0;
    for depth in 0..=max_len {
        let mut next = Vec::new();
        for (cfg, w, out) in level {
            checked += 1;
            let key = (out.clone(), c.state_of(&cfg));
            if let Some(prev) = seen.get(&key) {
                return Ok(IlReport {
                    lossless: false,
                    checked,
                    collision: Some(IlCollision {
                        first: prev.clone(),
                        second: w,
                        output: out,
                    }),
                });
            }
            seen.insert(key, w.clone());
            if depth == max_len {
                continue;
            }
            for &b in &symbols {
                let piece = c.output(&cfg, b).map_err(|e| Error::at(w.len(), e))?;
                let (ncfg, _) = c.advance(&cfg, b).map_err(|e| Error::at(w.len(), e))?;
                let mut nw = w.clone();
                nw.push(b);
                next.push((ncfg, nw, out.concat(&piece)));
            }
        }
        level = next;
    }
    Ok(IlReport {
        lossless: true,
        checked,
        collision: None,
    })
}

/// `|C(w)| / |w|` exactly.
pub fn compression_ratio<C: Compressor>(c: &C, w: &Word) -> Result<BigRational> {
    if w.is_empty() {
        return Err(Error::Domain("compression ratio of the empty string".into()));
    }
    let out = compress(c, w)?;
    Ok(BigRational::new(BigInt::from(out.len()), BigInt::from(w.len())))
}

/// CSV columns: `n,output_len,ratio_num,ratio_den`; rows with `n = 0` are skipped.
pub fn write_ratio_csv<W: Write>(points: &[(usize, usize)], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["n", "output_len", "ratio_num", "ratio_den"])?;
    for &(n, len) in points {
        if n == 0 {
            continue;
        }
        let r = BigRational::new(BigInt::from(len), BigInt::from(n));
        wtr.write_record([n.to_string(), len.to_string(), r.numer().to_string(), r.denom().to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::arith::{int, rat};
    use crate::fixtures;

    fn bin(s: &str) -> Word {
        Alphabet::binary().word(s).unwrap()
    }

    #[test]
    fn compress_examples() {
        assert_eq!(compress(&fixtures::c_id(), &bin("0110")).unwrap(), bin("0110"));
        assert_eq!(compress(&fixtures::c_drop0(), &bin("0101")).unwrap(), bin("11"));
        assert_eq!(compress(&fixtures::c_drop0(), &Word::empty()).unwrap(), Word::empty());
    }

    #[test]
    fn il_examples() {
        let r = il_check(&fixtures::c_id(), 6, EnumCap::default()).unwrap();
        assert!(r.lossless);
        assert_eq!(r.checked, 127);
        let r = il_check(&fixtures::c_drop0(), 2, EnumCap::default()).unwrap();
        assert!(!r.lossless);
        let c = r.collision.unwrap();
        assert_eq!((c.first, c.second, c.output), (Word::empty(), bin("0"), Word::empty()));
    }

    #[test]
    fn il_respects_cap() {
        let e = il_check(&fixtures::c_id(), 10, EnumCap(100)).unwrap_err();
        assert!(matches!(e, Error::Capacity { .. }));
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(compression_ratio(&fixtures::c_id(), &bin("0110")).unwrap(), int(1));
        assert_eq!(compression_ratio(&fixtures::c_drop0(), &bin("00000000")).unwrap(), int(0));
        assert_eq!(compression_ratio(&fixtures::c_drop0(), &bin("01010101")).unwrap(), rat(1, 2));
        assert!(compression_ratio(&fixtures::c_id(), &Word::empty()).is_err());
    }

    #[test]
    fn lengths_at_checkpoints() {
        let w = bin("01010101");
        let pts = output_lengths_at(&fixtures::c_drop0(), w.symbols(), &[8, 0, 3, 3, 20]).unwrap();
        assert_eq!(pts, vec![(0, 0), (3, 1), (8, 4)]);
        let mut buf = Vec::new();
        write_ratio_csv(&pts, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,output_len,ratio_num,ratio_den\n3,1,1,3\n8,4,1,2\n"
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn word(v: Vec<u16>) -> Word {
            Word(v.into_iter().map(Symbol).collect())
        }

        proptest! {
            #[test]
            fn output_is_additive_and_prefix_monotone(seed in 0u64..100, v in proptest::collection::vec(0u16..2, 0..20), b in 0u16..2) {
                let c = fixtures::random_compressor(seed);
                let w = word(v);
                let trace = c.run(&w).unwrap();
                let out = compress(&c, &w).unwrap();
                prop_assert_eq!(&out, &trace.output());
                let mut wb = w.clone();
                wb.push(Symbol(b));
                prop_assert!(out.is_prefix_of(&compress(&c, &wb).unwrap()));
            }
        }
    }
}
