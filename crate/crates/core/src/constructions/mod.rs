//! Block constructions between compressors and gamblers.
//!
//! Both derived machines keep the base machine's flat stack and read the
//! chunked stack alphabet `Γ' = Γ^{2k} ∪ … ∪ Γ^{4k-1}` as a view over it.
//! The bottom unit stands for `z0^{2k}`. Chunking is the hat map applied to
//! the whole stack: non-top chunks hold exactly `2k` symbols and the top one
//! holds `2k + (L mod 2k)`. When a step leaves fewer than `2k` symbols in the
//! top region it is merged with the chunk below, which the canonical chunking
//! does automatically.

mod block_compressor;
mod block_gambler;
mod export;
mod sfe;
mod verify;

use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::radix_pow;
use crate::error::{Error, Result};
use crate::machine::Compressor;

pub use block_compressor::{gambler_to_compressor, BlockCompressor, BlockCompressorConfig};
pub use block_gambler::{compressor_to_gambler, BlockGambler, BlockGamblerConfig};
pub use export::{export_block_compressor, export_block_gambler, TabulatedMachine};
pub use sfe::{is_prefix_free, SfeCode};
pub use verify::{
    lower_bound_params, verify_block_identities, verify_block_identities_with, verify_capital_lower_bound,
    verify_output_upper_bound, BlockIdentityReport, BoundReport, BoundViolation, Identity, IdentityMismatch,
    LowerBoundParams,
};

/// Chunk bookkeeping for block size `k`, in units of the base stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkView {
    k: usize,
}

impl ChunkView {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "block length must be positive");
        ChunkView { k }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn unit(&self) -> usize {
        2 * self.k
    }

    /// Base-symbol length with the bottom unit counted as `2k` symbols.
    pub fn virtual_len(&self, units: usize) -> usize {
        assert!(units >= 1, "stack lost its bottom");
        units - 1 + self.unit()
    }

    pub fn chunk_count(&self, units: usize) -> usize {
        self.virtual_len(units) / self.unit()
    }

    pub fn top_chunk_len(&self, units: usize) -> usize {
        self.unit() + self.virtual_len(units) % self.unit()
    }

    /// Chunk sizes, bottom first.
    pub fn chunk_sizes(&self, units: usize) -> Vec<usize> {
        let n = self.chunk_count(units);
        let mut sizes = vec![self.unit(); n];
        sizes[n - 1] = self.top_chunk_len(units);
        sizes
    }

    /// Virtual position where the top chunk starts.
    pub fn top_boundary(&self, units: usize) -> usize {
        self.virtual_len(units) - self.top_chunk_len(units)
    }

    /// Fails when a run from a stack of `units` entries touched anything below
    /// its top chunk, i.e. read past the chunk the construction hands it.
    pub fn check_within_top(&self, units: usize, low_water: usize) -> Result<()> {
        let reached = self.virtual_len(low_water.max(1));
        let boundary = self.top_boundary(units);
        if reached < boundary {
            return Err(Error::StackUnderflow(format!(
                "run reached base position {reached} below the top chunk starting at {boundary}"
            )));
        }
        Ok(())
    }

    /// Chunks left untouched by a step that kept `low_water` base units.
    pub fn untouched_chunks(&self, before: usize, after: usize, low_water: usize) -> usize {
        let below = self.virtual_len(low_water.max(1)) / self.unit();
        below
            .min(self.chunk_count(before) - 1)
            .min(self.chunk_count(after) - 1)
            .max(1)
    }
}

fn sigma_rec<C: Compressor>(
    c: &C,
    cfg: &C::Config,
    j: usize,
    view: &ChunkView,
    units: usize,
    low_water: usize,
) -> Result<BigRational> {
    if j == 0 {
        view.check_within_top(units, low_water)?;
        return Ok(radix_pow(c.input_alphabet().radix(), 0));
    }
    let mut total = BigRational::zero();
    for part in sigma_parts(c, cfg, j, view, units, low_water)? {
        total += part;
    }
    Ok(total)
}

fn sigma_parts<C: Compressor>(
    c: &C,
    cfg: &C::Config,
    j: usize,
    view: &ChunkView,
    units: usize,
    low_water: usize,
) -> Result<Vec<BigRational>> {
    let radix = c.input_alphabet().radix();
    let mut parts = Vec::with_capacity(radix as usize);
    for b in c.input_alphabet().symbols() {
        let len = c.output(cfg, b)?.len();
        let (next, info) = c.advance(cfg, b)?;
        let lw = low_water.min(info.low_water);
        let rest = sigma_rec(c, &next, j - 1, view, units, lw)?;
        parts.push(radix_pow(radix, -(len as i64)) * rest);
    }
    Ok(parts)
}

/// `σ(q, Σ^j, stack) = Σ_{x ∈ Σ^j} |Σ|^{-|ν(q, x, stack)|}` from `cfg`.
///
/// The completions are checked not to read below the top chunk for block
/// length `k`.
pub fn sigma<C: Compressor>(c: &C, cfg: &C::Config, j: usize, k: usize) -> Result<BigRational> {
    let units = c.stack_len(cfg);
    sigma_rec(c, cfg, j, &ChunkView::new(k), units, units)
}

/// `σ(q, bΣ^{j-1}, stack)` for every symbol `b`, in alphabet order; `j >= 1`.
pub fn sigma_by_first<C: Compressor>(c: &C, cfg: &C::Config, j: usize, k: usize) -> Result<Vec<BigRational>> {
    assert!(j >= 1, "needs at least one symbol");
    let units = c.stack_len(cfg);
    sigma_parts(c, cfg, j, &ChunkView::new(k), units, units)
}

/// `σ(q, A, stack)` for an explicit set of strings.
pub fn sigma_of_set<C: Compressor>(c: &C, cfg: &C::Config, set: &[crate::alphabet::Word]) -> Result<BigRational> {
    let radix = c.input_alphabet().radix();
    let mut total = BigRational::zero();
    for x in set {
        let mut cur = cfg.clone();
        let mut len = 0usize;
        for &b in x.symbols() {
            len += c.output(&cur, b)?.len();
            c.advance_in_place(&mut cur, b)?;
        }
        total += radix_pow(radix, -(len as i64));
    }
    Ok(total)
}
