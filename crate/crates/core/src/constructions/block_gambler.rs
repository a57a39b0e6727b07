use num_rational::BigRational;
use num_traits::Zero;

use super::{sigma, sigma_by_first, ChunkView};
use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::machine::{BetDistribution, Compressor, Gambler, Machine, StepInfo};

/// `G(C, k)`: bets `σ(q, bΣ^{k-i-1}, a) / σ(q, Σ^{k-i}, a)` at block phase `i`.
#[derive(Debug, Clone)]
pub struct BlockGambler<C> {
    base: C,
    k: usize,
    view: ChunkView,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockGamblerConfig<K> {
    pub inner: K,
    /// Position inside the current block, `0..k`.
    pub phase: usize,
}

/// Rejects compressors with lambda bound above one.
pub fn compressor_to_gambler<C: Compressor>(c: C, k: usize) -> Result<BlockGambler<C>> {
    if k == 0 {
        return Err(Error::Construction("block length must be at least 1".into()));
    }
    if c.lambda_bound() > 1 {
        return Err(Error::Construction(format!(
            "construction requires a 1-BPDC, got lambda bound {}",
            c.lambda_bound()
        )));
    }
    Ok(BlockGambler {
        base: c,
        k,
        view: ChunkView::new(k),
    })
}

impl<C: Compressor> BlockGambler<C> {
    pub fn base(&self) -> &C {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn view(&self) -> ChunkView {
        self.view
    }

    /// `σ(q, Σ^{k-i}, a)` at this configuration.
    pub fn sigma_remaining(&self, cfg: &BlockGamblerConfig<C::Config>) -> Result<BigRational> {
        sigma(&self.base, &cfg.inner, self.k - cfg.phase, self.k)
    }
}

impl<C: Compressor> Machine for BlockGambler<C> {
    type Config = BlockGamblerConfig<C::Config>;
    type State = (C::State, usize);

    fn input_alphabet(&self) -> &Alphabet {
        self.base.input_alphabet()
    }

    fn initial(&self) -> Self::Config {
        BlockGamblerConfig {
            inner: self.base.initial(),
            phase: 0,
        }
    }

    fn state_of(&self, cfg: &Self::Config) -> Self::State {
        (self.base.state_of(&cfg.inner), cfg.phase)
    }

    fn stack_len(&self, cfg: &Self::Config) -> usize {
        self.view.chunk_count(self.base.stack_len(&cfg.inner))
    }

    fn state_count(&self) -> usize {
        self.base.state_count() * self.k
    }

    fn lambda_bound(&self) -> usize {
        1
    }

    fn advance_in_place(&self, cfg: &mut Self::Config, b: Symbol) -> Result<StepInfo> {
        let before = self.base.stack_len(&cfg.inner);
        let info = self.base.advance_in_place(&mut cfg.inner, b)?;
        self.view.check_within_top(before, info.low_water)?;
        let after = self.base.stack_len(&cfg.inner);
        cfg.phase = (cfg.phase + 1) % self.k;
        Ok(StepInfo {
            lambda_steps: 0,
            low_water: self.view.untouched_chunks(before, after, info.low_water),
        })
    }
}

impl<C: Compressor> Gambler for BlockGambler<C> {
    fn bet(&self, cfg: &Self::Config) -> Result<BetDistribution> {
        let parts = sigma_by_first(&self.base, &cfg.inner, self.k - cfg.phase, self.k)?;
        let total = parts.iter().fold(BigRational::zero(), |acc, p| acc + p);
        Ok(BetDistribution::from_raw(parts.into_iter().map(|p| p / &total).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Word;
    use crate::arith::{int, rat};
    use crate::fixtures;
    use crate::gale::{gale_condition_check, martingale};
    use num_rational::Rational64;
    use num_traits::One;

    #[test]
    fn identity_gives_uniform_bets() {
        let g = compressor_to_gambler(fixtures::c_id(), 1).unwrap();
        let bet = g.bet(&g.initial()).unwrap();
        assert_eq!(bet, BetDistribution::uniform(2));
        let w = g.input_alphabet().word("011010").unwrap();
        let t = martingale(&g, &w).unwrap();
        assert!(t.capitals().iter().all(|c| *c.exact().unwrap() == int(1)));
    }

    #[test]
    fn drop0_bets() {
        let g = compressor_to_gambler(fixtures::c_drop0(), 1).unwrap();
        let bet = g.bet(&g.initial()).unwrap();
        assert_eq!(bet.probs(), &[rat(2, 3), rat(1, 3)]);
    }

    #[test]
    fn identity_k2_capital_on_0101() {
        let g = compressor_to_gambler(fixtures::c_id(), 2).unwrap();
        let w = g.input_alphabet().word("0101").unwrap();
        assert_eq!(*martingale(&g, &w).unwrap().capital(4).exact().unwrap(), int(1));
    }

    #[test]
    fn rejects_lambda_bound_above_one() {
        let mut c = fixtures::c_id();
        c.set_lambda_bound(2);
        assert!(matches!(compressor_to_gambler(c, 2), Err(Error::Construction(_))));
    }

    #[test]
    fn derived_gambler_is_fair() {
        for seed in 0..10 {
            let g = compressor_to_gambler(fixtures::random_compressor(seed), 2).unwrap();
            assert!(gale_condition_check(&g, 5, Rational64::one()).unwrap().holds);
        }
    }

    #[test]
    fn phase_cycles_through_the_block() {
        let g = compressor_to_gambler(fixtures::c_id(), 3).unwrap();
        let mut cfg = g.initial();
        let mut phases = Vec::new();
        for &b in Word::from(vec![Symbol(0); 4]).symbols() {
            g.advance_in_place(&mut cfg, b).unwrap();
            phases.push(cfg.phase);
        }
        assert_eq!(phases, vec![1, 2, 0, 1]);
    }
}
