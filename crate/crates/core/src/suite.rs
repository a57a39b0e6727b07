//! Parameterized verification suites shared by the acceptance tests and the
//! command line. Each returns an [`Outcome`] instead of panicking.

use std::fmt;
use std::time::{Duration, Instant};

use num_rational::{BigRational, Rational64};
use num_traits::One;

use crate::alphabet::{enumerate_up_to, lex_enumerate, Alphabet, EnumCap, Word};
use crate::capital::Precision;
use crate::compressor::{compression_ratio, il_check};
use crate::constructions::{
    compressor_to_gambler, gambler_to_compressor, verify_block_identities, verify_capital_lower_bound,
    verify_output_upper_bound, BlockCompressor,
};
use crate::error::Result;
use crate::gale::{gale_condition_check, martingale, nonvanishing_transform};
use crate::lz::{lz_checkpoints, lz_parse, write_lz_csv, PointerCode};
use crate::machine::{BpdMachine, Configuration};
use crate::separation::{
    build_separation_gambler, check_run_safety, first_misfire, generate_s, run_separation, verify_parse_claim,
    write_stage_csv, write_zone_csv, Mode, SeparationSequence, SeparationSpec, Zone,
};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    fn new(pass: bool, detail: String, start: Instant) -> Self {
        Outcome {
            pass,
            detail,
            elapsed: start.elapsed(),
        }
    }

    /// Fails the outcome if it ran longer than `limit`.
    pub fn within(mut self, limit: Duration) -> Self {
        if self.elapsed > limit {
            self.pass = false;
            self.detail = format!("{} (took {:.2?}, limit {:.0?})", self.detail, self.elapsed, limit);
        }
        self
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict} [{:.2?}] {}", self.elapsed, self.detail)
    }
}

fn words(n: usize, cap: EnumCap) -> Result<Vec<Word>> {
    enumerate_up_to(&Alphabet::binary(), n, cap)
}

/// Exact martingale and `s`-gale conditions on every `|w| <= max_len`.
pub fn fairness(gamblers: &[(&str, BpdMachine)], max_len: usize, s_values: &[Rational64]) -> Result<Outcome> {
    let start = Instant::now();
    let mut checked = 0;
    for (name, g) in gamblers {
        for &s in s_values {
            let r = gale_condition_check(g, max_len + 1, s)?;
            checked += r.checked;
            if !r.holds {
                let cx = r.counterexample.expect("counterexample");
                let w = g.input().render_or_lambda(cx.prefix.symbols());
                return Ok(Outcome::new(
                    false,
                    format!("{name}: gale condition fails for s={s} at w={w}"),
                    start,
                ));
            }
        }
    }
    Ok(Outcome::new(
        true,
        format!("{} gamblers, {} s values, {checked} prefixes", gamblers.len(), s_values.len()),
        start,
    ))
}

/// Both block identities on every prefix of every `|w| = len`.
pub fn block_identities(compressors: &[(&str, BpdMachine)], ks: &[usize], len: usize, cap: EnumCap) -> Result<Outcome> {
    let start = Instant::now();
    let mut checked = 0;
    for (name, c) in compressors {
        for &k in ks {
            let g = compressor_to_gambler(c.clone(), k)?;
            for w in lex_enumerate(&Alphabet::binary(), len, cap)? {
                let r = verify_block_identities(&g, &w)?;
                checked += r.checked;
                if let Some(m) = r.mismatch {
                    return Ok(Outcome::new(
                        false,
                        format!(
                            "{name}, k={k}: {:?} identity fails at prefix {} of {}",
                            m.identity,
                            m.prefix_len,
                            Alphabet::binary().render(w.symbols())
                        ),
                        start,
                    ));
                }
            }
        }
    }
    Ok(Outcome::new(true, format!("{checked} identity instances, 0 mismatches"), start))
}

/// The capital lower bound of `G(C, k)` on every `|w| <= len`.
pub fn capital_lower_bound(
    compressors: &[(&str, BaseCompressor)],
    ks: &[usize],
    len: usize,
    cap: EnumCap,
) -> Result<Outcome> {
    let start = Instant::now();
    let ws = words(len, cap)?;
    let mut checked = 0;
    for (name, base) in compressors {
        for &k in ks {
            let r = match base {
                BaseCompressor::Table(c) => verify_capital_lower_bound(&compressor_to_gambler(c.clone(), k)?, &ws, len, cap)?,
                BaseCompressor::Block(c) => verify_capital_lower_bound(&compressor_to_gambler(c.clone(), k)?, &ws, len, cap)?,
            };
            checked += r.checked;
            if let Some(v) = r.violation {
                return Ok(Outcome::new(
                    false,
                    format!(
                        "{name}, k={k}: bound fails at w={} (log d = {:.3}, bound {:.3})",
                        Alphabet::binary().render_or_lambda(v.word.symbols()),
                        v.lhs,
                        v.rhs
                    ),
                    start,
                ));
            }
        }
    }
    Ok(Outcome::new(true, format!("{checked} words, bound holds exactly"), start))
}

/// A compressor given either as a table or as a derived block compressor.
#[derive(Debug, Clone)]
pub enum BaseCompressor {
    Table(BpdMachine),
    Block(BlockCompressor),
}

/// Distinct base configurations at block boundaries over `|w| <= len`.
fn block_configs(c: &BlockCompressor, len: usize, cap: EnumCap) -> Result<Vec<Configuration>> {
    let mut out: Vec<Configuration> = Vec::new();
    for w in words(len, cap)? {
        if w.len() % c.k() != 0 {
            continue;
        }
        let cfg = c.base().run(&w)?.final_config().clone();
        if !out.contains(&cfg) {
            out.push(cfg);
        }
    }
    Ok(out)
}

/// Information-losslessness, block code validity and the output upper bound
/// of `C(G, k)`.
pub fn block_compressor_suite(gamblers: &[(&str, BpdMachine)], ks: &[usize], len: usize, cap: EnumCap) -> Result<Outcome> {
    let start = Instant::now();
    let ws = words(len, cap)?;
    let mut codes = 0;
    for (name, g) in gamblers {
        for &k in ks {
            let c = gambler_to_compressor(g.clone(), k)?;
            let il = il_check(&c, len, cap)?;
            if !il.lossless {
                return Ok(Outcome::new(false, format!("C({name}, {k}) is not lossless"), start));
            }
            for cfg in block_configs(&c, len, cap)? {
                let code = c.code_at(&cfg)?;
                codes += 1;
                if !code.is_prefix_free() || code.kraft_sum() > BigRational::one() || !code.lengths_match() {
                    return Ok(Outcome::new(false, format!("C({name}, {k}): invalid block code"), start));
                }
            }
            let r = verify_output_upper_bound(&c, &ws)?;
            if let Some(v) = r.violation {
                return Ok(Outcome::new(
                    false,
                    format!(
                        "C({name}, {k}): output bound fails at w={}",
                        Alphabet::binary().render_or_lambda(v.word.symbols())
                    ),
                    start,
                ));
            }
        }
    }
    Ok(Outcome::new(
        true,
        format!("{} gamblers x {} block lengths lossless, {codes} block codes valid, output bound holds", gamblers.len(), ks.len()),
        start,
    ))
}

/// `|C(w)| / |w|` for every nonempty block-aligned `|w| <= len`, if constant.
pub fn block_ratio(g: &BpdMachine, k: usize, len: usize, cap: EnumCap) -> Result<Option<BigRational>> {
    let c = gambler_to_compressor(g.clone(), k)?;
    let mut seen: Option<BigRational> = None;
    for w in words(len, cap)? {
        if w.is_empty() || w.len() % k != 0 {
            continue;
        }
        let r = compression_ratio(&c, &w)?;
        match &seen {
            None => seen = Some(r),
            Some(s) if *s != r => return Ok(None),
            _ => {}
        }
    }
    Ok(seen)
}

/// `d_{G'}(w) >= ρ^{|w|} d_G(w)` on every `|w| <= len`.
pub fn nonvanishing(gamblers: &[(&str, BpdMachine)], rhos: &[BigRational], len: usize, cap: EnumCap) -> Result<Outcome> {
    let start = Instant::now();
    let mut checked = 0;
    for (name, g) in gamblers {
        for rho in rhos {
            let t = nonvanishing_transform(g, rho)?;
            for w in lex_enumerate(&Alphabet::binary(), len, cap)? {
                let base = martingale(g, &w)?;
                let moved = martingale(&t, &w)?;
                for i in 0..=w.len() {
                    let d = base.capital(i).exact().expect("exact");
                    let d2 = moved.capital(i).exact().expect("exact");
                    checked += 1;
                    if *d2 < num_traits::pow(rho.clone(), i) * d {
                        return Ok(Outcome::new(
                            false,
                            format!("{name}, rho={rho}: bound fails on prefix {i} of {}", g.input().render(w.symbols())),
                            start,
                        ));
                    }
                }
            }
        }
    }
    Ok(Outcome::new(true, format!("{checked} prefix checks"), start))
}

fn sequence(k: usize, mode: Mode, upto: usize, cap: EnumCap) -> Result<SeparationSequence> {
    generate_s(&SeparationSpec::new(k, mode)?, upto, cap)
}

/// LZ78 parses the early segment and each `S_n` into the predicted phrases.
pub fn parse_claim(k: usize, upto: usize, cap: EnumCap) -> Result<Outcome> {
    let start = Instant::now();
    let seq = sequence(k, Mode::Corrected, upto, cap)?;
    let r = verify_parse_claim(&seq, cap)?;
    let detail = match &r.failure {
        None => format!("k={k}: early segment and S_{k}..S_{upto} parse exactly as claimed"),
        Some(f) => format!("k={k}: {f:?}"),
    };
    Ok(Outcome::new(r.holds(), detail, start))
}

/// `(|S_1 … S_n|, lz_ratio)` at the end of `S_upto`.
pub fn lz_ratio_at_stage(k: usize, upto: usize, cap: EnumCap) -> Result<(usize, f64)> {
    let seq = sequence(k, Mode::Corrected, upto, cap)?;
    let n = seq.len();
    let pts = lz_checkpoints(seq.text().symbols(), 2, PointerCode::FixedWidth, &[n]);
    Ok((n, pts[0].2 as f64 / n as f64))
}

/// `lz_ratio(k_lo) >= floor` and `lz_ratio(k_hi) > lz_ratio(k_lo)`, both
/// through `S_upto`.
pub fn lz_surrogate(k_lo: usize, k_hi: usize, upto: usize, floor: f64, cap: EnumCap) -> Result<Outcome> {
    let start = Instant::now();
    let (n_lo, r_lo) = lz_ratio_at_stage(k_lo, upto, cap)?;
    let (n_hi, r_hi) = lz_ratio_at_stage(k_hi, upto, cap)?;
    let pass = r_lo >= floor && r_hi > r_lo;
    Ok(Outcome::new(
        pass,
        format!("k={k_lo}: ratio {r_lo:.4} at n={n_lo} (floor {floor}); k={k_hi}: ratio {r_hi:.4} at n={n_hi}"),
        start,
    ))
}

/// The corrected gambler's capital against the closed form, exactly through
/// `S_exact_upto` and on the log track through `S_upto`.
pub fn separation_capital(
    k: usize,
    upto: usize,
    exact_upto: usize,
    dim_ceiling: f64,
    monotone_from: usize,
    tolerance: f64,
    cap: EnumCap,
) -> Result<Outcome> {
    let start = Instant::now();
    let spec = SeparationSpec::new(k, Mode::Corrected)?;
    let g = build_separation_gambler(&spec);
    let exact_seq = generate_s(&spec, exact_upto.max(k), cap)?;
    let exact = run_separation(&g, &exact_seq, Precision::Exact)?;
    for p in &exact.points {
        if p.capital.exact().is_none() || !p.matches_expected() {
            return Ok(Outcome::new(
                false,
                format!("S_{}: exact capital is not 2^{}", p.n, p.expected_log2),
                start,
            ));
        }
    }
    let seq = generate_s(&spec, upto, cap)?;
    if let Some(v) = check_run_safety(&seq) {
        return Ok(Outcome::new(false, format!("run safety violated: {v:?}"), start));
    }
    let run = run_separation(&g, &seq, Precision::LogOnly)?;
    if let Some(pos) = run.first_zero {
        return Ok(Outcome::new(false, format!("capital hit 0 at position {pos}"), start));
    }
    for p in &run.points {
        if !p.matches_expected() {
            return Ok(Outcome::new(
                false,
                format!("S_{}: log2 capital {} != {}", p.n, p.capital.log2(), p.expected_log2),
                start,
            ));
        }
    }
    let last = run.points.last().expect("at least one stage");
    let tail: Vec<f64> = run.points.iter().filter(|p| p.n >= monotone_from).map(|p| p.dim_estimate()).collect();
    let monotone = tail.windows(2).all(|w| w[1] <= w[0] + tolerance);
    let pass = last.dim_estimate() <= dim_ceiling && monotone;
    Ok(Outcome::new(
        pass,
        format!(
            "log2 d = {} after S_{upto}; estimate {:.4} (ceiling {dim_ceiling}); estimates S_{monotone_from}..S_{upto}: {}",
            last.expected_log2,
            last.dim_estimate(),
            tail.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>().join(" ")
        ),
        start,
    ))
}

/// The proof's machine loses everything within `S_k`, after a false flag
/// inside an `X` zone run that crosses a string boundary.
pub fn paper_gap(k: usize, cap: EnumCap) -> Result<Outcome> {
    let start = Instant::now();
    let spec = SeparationSpec::new(k, Mode::Paper)?;
    let seq = generate_s(&spec, k, cap)?;
    let g = build_separation_gambler(&spec);
    let run = run_separation(&g, &seq, Precision::Exact)?;
    let misfire = first_misfire(&g, &seq)?;
    let (stage_start, stage_end) = seq.stage(k).expect("stage");
    let zero_ok = run.first_zero.is_some_and(|p| p >= stage_start && p < stage_end);
    let misfire_ok = misfire
        .as_ref()
        .is_some_and(|m| m.zone == Zone::X && m.n == k && m.crosses_boundary);
    let detail = match (&run.first_zero, &misfire) {
        (Some(z), Some(m)) => format!(
            "capital 0 at position {z}; false flag at {} in X-zone run {}..{}",
            m.position, m.run.0, m.run.1
        ),
        _ => format!("zero at {:?}, misfire {:?}", run.first_zero, misfire),
    };
    Ok(Outcome::new(zero_ok && misfire_ok, detail, start))
}

/// The data files behind the parse-claim, LZ-ratio and separation suites.
pub fn separation_csvs(k: usize, upto: usize, cap: EnumCap) -> Result<Vec<(String, Vec<u8>)>> {
    let seq = sequence(k, Mode::Corrected, upto, cap)?;
    let mut out = Vec::new();

    let mut zones = Vec::new();
    write_zone_csv(seq.spans(), &mut zones)?;
    out.push((format!("zones_k{k}.csv"), zones));

    let mut phrases = Vec::new();
    lz_parse(seq.text().symbols(), 2).dump(&Alphabet::binary(), &mut phrases)?;
    out.push((format!("phrases_k{k}.txt"), phrases));

    let ends: Vec<usize> = (k..=upto).filter_map(|n| seq.stage(n).map(|s| s.1)).collect();
    let mut lz = Vec::new();
    write_lz_csv(&lz_checkpoints(seq.text().symbols(), 2, PointerCode::FixedWidth, &ends), &mut lz)?;
    out.push((format!("lz_k{k}.csv"), lz));

    let g = build_separation_gambler(seq.spec());
    let mut stages = Vec::new();
    write_stage_csv(&run_separation(&g, &seq, Precision::default())?.points, &mut stages)?;
    out.push((format!("capital_k{k}.csv"), stages));
    Ok(out)
}
