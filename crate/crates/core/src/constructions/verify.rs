//! Exact checks of the identities and bounds relating the two constructions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{sigma, BlockCompressor, BlockGambler};
use crate::alphabet::{EnumCap, Word};
use crate::arith::{ceil_log_u, radix_pow};
use crate::capital::Capital;
use crate::compressor::{compress, il_check};
use crate::error::{Error, Result};
use crate::gale::martingale;
use crate::machine::{Compressor, Machine};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// `d(wu)` from `d(w)` for block-aligned `w` and `|u| <= k`.
    WithinBlock,
    /// `d(w) = |Σ|^{|w|-|C(w)|} / Π σ` for block-aligned `w`.
    Block,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityMismatch {
    pub identity: Identity,
    pub prefix_len: usize,
    pub interpreted: BigRational,
    pub closed_form: BigRational,
    pub output_len: usize,
    /// `σ(δ(w_0…w_{i-1}), Σ^k, ·)` at every block start up to the prefix.
    pub sigmas: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockIdentityReport {
    pub checked: usize,
    pub mismatch: Option<IdentityMismatch>,
}

impl BlockIdentityReport {
    pub fn holds(&self) -> bool {
        self.mismatch.is_none()
    }
}

fn exact(c: &Capital) -> BigRational {
    c.exact().expect("exact capital").clone()
}

/// Both block identities on every prefix of `w`, with the standard `σ`.
pub fn verify_block_identities<C: Compressor>(g: &BlockGambler<C>, w: &Word) -> Result<BlockIdentityReport> {
    verify_block_identities_with(g, w, |c, cfg, j| sigma(c, cfg, j, g.k()))
}

/// As [`verify_block_identities`], with `σ(cfg, Σ^j)` supplied by the caller
/// for the closed forms.
pub fn verify_block_identities_with<C: Compressor>(
    g: &BlockGambler<C>,
    w: &Word,
    sigma_fn: impl Fn(&C, &C::Config, usize) -> Result<BigRational>,
) -> Result<BlockIdentityReport> {
    let c = g.base();
    let k = g.k();
    let radix = c.input_alphabet().radix();
    let caps: Vec<BigRational> = martingale(g, w)?.capitals().iter().map(exact).collect();

    let mut cfgs = vec![c.initial()];
    let mut out_lens = vec![0usize];
    for (i, &b) in w.symbols().iter().enumerate() {
        let cur = cfgs.last().unwrap();
        let len = c.output(cur, b).map_err(|e| Error::at(i, e))?.len();
        let (next, _) = c.advance(cur, b).map_err(|e| Error::at(i, e))?;
        out_lens.push(out_lens[i] + len);
        cfgs.push(next);
    }

    let mut sigmas = Vec::new();
    let mut product = BigRational::one();
    let mut checked = 0;
    for i in 1..=w.len() {
        let a = (i - 1) / k * k;
        let u = i - a;
        if u == 1 {
            let s = sigma_fn(c, &cfgs[a], k)?;
            product *= &s;
            sigmas.push(s);
        }
        let step_exp = u as i64 - (out_lens[i] - out_lens[a]) as i64;
        let expected = radix_pow(radix, step_exp) * sigma_fn(c, &cfgs[i], k - u)? / &sigmas[sigmas.len() - 1]
            * &caps[a];
        checked += 1;
        if expected != caps[i] {
            return Ok(BlockIdentityReport {
                checked,
                mismatch: Some(IdentityMismatch {
                    identity: Identity::WithinBlock,
                    prefix_len: i,
                    interpreted: caps[i].clone(),
                    closed_form: expected,
                    output_len: out_lens[i],
                    sigmas,
                }),
            });
        }
        if u == k {
            let closed = radix_pow(radix, i as i64 - out_lens[i] as i64) / &product;
            checked += 1;
            if closed != caps[i] {
                return Ok(BlockIdentityReport {
                    checked,
                    mismatch: Some(IdentityMismatch {
                        identity: Identity::Block,
                        prefix_len: i,
                        interpreted: caps[i].clone(),
                        closed_form: closed,
                        output_len: out_lens[i],
                        sigmas,
                    }),
                });
            }
        }
    }
    Ok(BlockIdentityReport { checked, mismatch: None })
}

/// The constants of the capital lower bound: `l = ⌈log |Q|⌉`, `m` the largest
/// single-step output (at least 1 so that `log m` is defined) and `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LowerBoundParams {
    pub l: u32,
    pub m: usize,
    pub k: usize,
}

pub fn lower_bound_params<C: Compressor>(c: &C, k: usize) -> Result<LowerBoundParams> {
    let radix = c.input_alphabet().radix();
    Ok(LowerBoundParams {
        l: ceil_log_u(c.state_count() as u64, radix),
        m: c.max_output_len()?.max(1),
        k,
    })
}

impl LowerBoundParams {
    /// `|w| - |C(w)| - (|w|/k + 1)(l + log m + log k + 1) - km`.
    pub fn exponent(&self, radix: u32, n: usize, out: usize) -> f64 {
        let r = (radix as f64).ln();
        let x = self.l as f64 + (self.m as f64).ln() / r + (self.k as f64).ln() / r + 1.0;
        n as f64 - out as f64 - (n as f64 / self.k as f64 + 1.0) * x - (self.k * self.m) as f64
    }

    /// The bound raised to the `k`-th power, cleared of irrational logs:
    /// `d^k (mk)^{n+k} >= |Σ|^{kn - k|C| - k²m - (l+1)(n+k)}`.
    pub fn holds(&self, radix: u32, d: &BigRational, n: usize, out: usize) -> bool {
        let (k, m, l) = (self.k as i64, self.m as i64, self.l as i64);
        let (n, out) = (n as i64, out as i64);
        let a = k * n - k * out - k * k * m - (l + 1) * (n + k);
        let mk = BigRational::from_integer(BigInt::from(self.m * self.k));
        let lhs = num_traits::pow(d.clone(), self.k) * num_traits::pow(mk, (n + k) as usize);
        lhs >= radix_pow(radix, a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub word: Word,
    /// Both sides as base-|Σ| exponents.
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub checked: usize,
    pub violation: Option<BoundViolation>,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// `d_G(w) >= |Σ|^{|w| - |C(w)| - (|w|/k)(l + log m + log k + 1) - (km + l + log m + log k + 1)}`
/// for `G = G(C, k)` on every word, after checking that `C` is
/// information-lossless up to `il_len`.
pub fn verify_capital_lower_bound<C: Compressor>(
    g: &BlockGambler<C>,
    words: &[Word],
    il_len: usize,
    cap: EnumCap,
) -> Result<BoundReport> {
    let c = g.base();
    let il = il_check(c, il_len, cap)?;
    if let Some(col) = il.collision {
        let a = c.input_alphabet();
        return Err(Error::Domain(format!(
            "precondition failed: compressor is not information-lossless ({} and {} collide)",
            a.render_or_lambda(col.first.symbols()),
            a.render_or_lambda(col.second.symbols())
        )));
    }
    let params = lower_bound_params(c, g.k())?;
    let radix = c.input_alphabet().radix();
    let mut checked = 0;
    for w in words {
        let d = exact(martingale(g, w)?.capital(w.len()));
        let out = compress(c, w)?.len();
        checked += 1;
        if !params.holds(radix, &d, w.len(), out) {
            return Ok(BoundReport {
                checked,
                violation: Some(BoundViolation {
                    word: w.clone(),
                    lhs: Capital::from_rational(d, radix).log(),
                    rhs: params.exponent(radix, w.len(), out),
                }),
            });
        }
    }
    Ok(BoundReport { checked, violation: None })
}

/// `|C(w)| <= (1 + 2/k)|w| - log d_G(w)` for `C = C(G, k)`, checked as
/// `d^k |Σ|^{k|C(w)|} <= |Σ|^{(k+2)|w|}`.
pub fn verify_output_upper_bound(c: &BlockCompressor, words: &[Word]) -> Result<BoundReport> {
    let radix = c.input_alphabet().radix();
    let k = c.k();
    let mut checked = 0;
    for w in words {
        let d = exact(martingale(c.base(), w)?.capital(w.len()));
        let out = compress(c, w)?.len();
        let lhs = num_traits::pow(d.clone(), k) * radix_pow(radix, (k * out) as i64);
        let rhs = radix_pow(radix, ((k + 2) * w.len()) as i64);
        checked += 1;
        if lhs > rhs {
            let log_d = Capital::from_rational(d, radix).log();
            return Ok(BoundReport {
                checked,
                violation: Some(BoundViolation {
                    word: w.clone(),
                    lhs: out as f64,
                    rhs: (1.0 + 2.0 / k as f64) * w.len() as f64 - log_d,
                }),
            });
        }
    }
    Ok(BoundReport { checked, violation: None })
}
