use num_rational::BigRational;
use num_traits::One;

use super::{ChunkView, SfeCode};
use crate::alphabet::{Alphabet, Symbol, Word};
use crate::arith::ceil_log;
use crate::error::{Error, Result};
use crate::machine::{BpdMachine, Compressor, Configuration, Machine, MachineKind, StateId, StepInfo};

/// `C(G, k)`: buffers `k` symbols, then emits the Shannon-Fano-Elias codeword
/// of the block under `p_{q,z}(x) = |Σ|^{-k} d_{G_{q,z}}(x)`.
#[derive(Debug, Clone)]
pub struct BlockCompressor {
    base: BpdMachine,
    k: usize,
    view: ChunkView,
    beta_min: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockCompressorConfig {
    pub inner: Configuration,
    /// The partial block, shorter than `k`.
    pub buffer: Word,
}

/// Rejects vanishing bets and lambda bounds above one.
pub fn gambler_to_compressor(g: BpdMachine, k: usize) -> Result<BlockCompressor> {
    if g.kind() != MachineKind::Gambler {
        return Err(Error::KindMismatch { expected: "gambler" });
    }
    if k == 0 {
        return Err(Error::Construction("block length must be at least 1".into()));
    }
    if g.lambda_bound() > 1 {
        return Err(Error::Construction(format!(
            "construction requires a 1-BPDG, got lambda bound {}",
            g.lambda_bound()
        )));
    }
    let mut beta_min: Option<BigRational> = None;
    for (&(q, a), bet) in g.bets() {
        if !bet.is_normalized() || !bet.is_nonvanishing() {
            return Err(Error::Construction(format!(
                "p_{{q,z}} must be positive: bet at ({}, {}) is not a nonvanishing distribution",
                g.state_name(q),
                g.stack_alphabet().char_of(a)
            )));
        }
        for p in bet.probs() {
            if beta_min.as_ref().is_none_or(|m| p < m) {
                beta_min = Some(p.clone());
            }
        }
    }
    let beta_min = beta_min.ok_or_else(|| Error::Construction("gambler has no bets".into()))?;
    Ok(BlockCompressor {
        base: g,
        k,
        view: ChunkView::new(k),
        beta_min,
    })
}

impl BlockCompressor {
    pub fn base(&self) -> &BpdMachine {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn view(&self) -> ChunkView {
        self.view
    }

    /// `p_{q,z}` over `Σ^k` in lex order, from the base configuration.
    pub fn block_distribution(&self, inner: &Configuration) -> Result<Vec<BigRational>> {
        let mut out = Vec::new();
        self.collect(inner, self.k, BigRational::one(), &mut out)?;
        Ok(out)
    }

    fn collect(&self, cfg: &Configuration, j: usize, p: BigRational, out: &mut Vec<BigRational>) -> Result<()> {
        if j == 0 {
            out.push(p);
            return Ok(());
        }
        let bet = self.base.bet_at(cfg)?.clone();
        for b in self.base.input().symbols() {
            let mut next = cfg.clone();
            self.base.step_in_place(&mut next, b)?;
            self.collect(&next, j - 1, &p * bet.prob(b), out)?;
        }
        Ok(())
    }

    /// `Θ_{q,z}` for the block starting at `inner`.
    pub fn code_at(&self, inner: &Configuration) -> Result<SfeCode> {
        SfeCode::build(self.base.input().radix(), self.k, self.block_distribution(inner)?)
    }
}

impl Machine for BlockCompressor {
    type Config = BlockCompressorConfig;
    type State = (StateId, Word);

    fn input_alphabet(&self) -> &Alphabet {
        self.base.input()
    }

    fn initial(&self) -> Self::Config {
        BlockCompressorConfig {
            inner: self.base.initial_config(),
            buffer: Word::empty(),
        }
    }

    fn state_of(&self, cfg: &Self::Config) -> Self::State {
        (cfg.inner.state, cfg.buffer.clone())
    }

    fn stack_len(&self, cfg: &Self::Config) -> usize {
        self.view.chunk_count(cfg.inner.stack.len())
    }

    fn state_count(&self) -> usize {
        let r = self.base.input().len();
        let buffers: usize = (0..self.k).map(|j| r.pow(j as u32)).sum();
        self.base.states().len() * buffers
    }

    fn lambda_bound(&self) -> usize {
        1
    }

    fn advance_in_place(&self, cfg: &mut Self::Config, b: Symbol) -> Result<StepInfo> {
        let before = cfg.inner.stack.len();
        if cfg.buffer.len() + 1 < self.k {
            cfg.buffer.push(b);
            return Ok(StepInfo {
                lambda_steps: 0,
                low_water: self.view.chunk_count(before),
            });
        }
        let mut low_water = before;
        let mut block = std::mem::take(&mut cfg.buffer);
        block.push(b);
        for &s in block.symbols() {
            let info = self.base.step_in_place(&mut cfg.inner, s)?;
            low_water = low_water.min(info.low_water);
        }
        self.view.check_within_top(before, low_water)?;
        let after = cfg.inner.stack.len();
        Ok(StepInfo {
            lambda_steps: 0,
            low_water: self.view.untouched_chunks(before, after, low_water),
        })
    }
}

impl Compressor for BlockCompressor {
    fn output(&self, cfg: &Self::Config, b: Symbol) -> Result<Word> {
        if cfg.buffer.len() + 1 < self.k {
            return Ok(Word::empty());
        }
        let code = self.code_at(&cfg.inner)?;
        let mut block = cfg.buffer.clone();
        block.push(b);
        Ok(code.codeword(block.symbols()).clone())
    }

    /// `1 + ⌈log 1/β_min^k⌉`, an upper bound on every codeword length.
    fn max_output_len(&self) -> Result<usize> {
        let p = num_traits::pow(self.beta_min.clone(), self.k);
        Ok(1 + ceil_log(&p.recip(), self.base.input().radix())? as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{enumerate_up_to, EnumCap};
    use crate::arith::rat;
    use crate::compressor::{compress, compression_ratio, il_check};
    use crate::fixtures;
    use crate::gale::nonvanishing_transform;

    fn bin(s: &str) -> Word {
        Alphabet::binary().word(s).unwrap()
    }

    #[test]
    fn uniform_k1_doubles_length() {
        let c = gambler_to_compressor(fixtures::g_uni(), 1).unwrap();
        for w in enumerate_up_to(&Alphabet::binary(), 6, EnumCap::default()).unwrap() {
            assert_eq!(compress(&c, &w).unwrap().len(), 2 * w.len());
        }
    }

    #[test]
    fn uniform_k3_ratio() {
        let c = gambler_to_compressor(fixtures::g_uni(), 3).unwrap();
        assert_eq!(compression_ratio(&c, &bin("011010001")).unwrap(), rat(4, 3));
        assert_eq!(c.max_output_len().unwrap(), 4);
    }

    #[test]
    fn transformed_all0_block_code() {
        let g = nonvanishing_transform(&fixtures::g_all0(), &rat(1, 2)).unwrap();
        let c = gambler_to_compressor(g, 2).unwrap();
        let code = c.code_at(&c.initial().inner).unwrap();
        assert_eq!(code.probs(), &[rat(9, 16), rat(3, 16), rat(3, 16), rat(1, 16)]);
        // p(00) = 9/16: 1 + ⌈log 16/9⌉ = 2
        assert_eq!(code.lengths(), [2, 4, 4, 5]);
        assert!(code.is_prefix_free());
    }

    #[test]
    fn rejects_vanishing_and_lambda_heavy() {
        assert!(matches!(
            gambler_to_compressor(fixtures::g_all0(), 2),
            Err(Error::Construction(_))
        ));
        let mut g = fixtures::g_uni();
        g.set_lambda_bound(2);
        assert!(gambler_to_compressor(g, 2).is_err());
        assert!(gambler_to_compressor(fixtures::c_id(), 2).is_err());
    }

    #[test]
    fn derived_compressor_is_lossless() {
        for k in 1..=3 {
            let c = gambler_to_compressor(fixtures::g_uni(), k).unwrap();
            assert!(il_check(&c, 7, EnumCap::default()).unwrap().lossless);
        }
    }

    #[test]
    fn mid_block_outputs_are_empty() {
        let c = gambler_to_compressor(fixtures::g_uni(), 3).unwrap();
        assert_eq!(compress(&c, &bin("01")).unwrap(), Word::empty());
        assert_eq!(c.state_count(), 7);
    }
}
