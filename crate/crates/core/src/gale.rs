//! Martingales and s-gales of gamblers, the gale condition, finite-prefix
//! dimension estimates and the nonvanishing transform.

use std::io::Write;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

use crate::alphabet::{Symbol, Word};
use crate::arith::format_rational;
use crate::capital::{Capital, GaleValue, Precision};
use crate::error::{Error, Result};
use crate::machine::{BetDistribution, BpdMachine, Gambler, MachineKind};

/// Martingale values `d(w[0..i])` for every prefix, viewed as an s-gale.
///
/// The stored capitals are always the martingale (s = 1); the s-gale value at
/// position `i` is `capital[i] · |Σ|^{(s-1)i}`, which keeps irrational
/// factors such as `2^{-1/2}` exact.
#[derive(Debug, Clone)]
pub struct CapitalTrace {
    radix: u32,
    s: Rational64,
    capitals: Vec<Capital>,
}

impl CapitalTrace {
    pub fn s(&self) -> Rational64 {
        self.s
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn len(&self) -> usize {
        self.capitals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.capitals.is_empty()
    }

    /// The martingale capital after `i` symbols.
    pub fn capital(&self, i: usize) -> &Capital {
        &self.capitals[i]
    }

    pub fn capitals(&self) -> &[Capital] {
        &self.capitals
    }

    pub fn value(&self, i: usize) -> GaleValue {
        let shift = (self.s - Rational64::one()) * Rational64::from_integer(i as i64);
        GaleValue::new(self.capitals[i].clone(), shift)
    }

    pub fn values(&self) -> impl Iterator<Item = GaleValue> + '_ {
        (0..self.capitals.len()).map(|i| self.value(i))
    }
}

fn step_factor(bet: &BetDistribution, b: Symbol, radix: u32) -> BigRational {
    bet.prob(b) * BigRational::from_integer(BigInt::from(radix))
}

/// Drives a gambler over `w`, calling `visit(i, capital)` for `i = 0..=|w|`.
pub fn drive<G: Gambler>(
    g: &G,
    w: &[Symbol],
    precision: Precision,
    mut visit: impl FnMut(usize, &Capital),
) -> Result<Capital> {
    let radix = g.input_alphabet().radix();
    let mut cfg = g.initial();
    let mut cap = Capital::one(radix);
    cap.apply_precision(precision);
    visit(0, &cap);
    for (i, &b) in w.iter().enumerate() {
        let bet = g.bet(&cfg).map_err(|e| Error::at(i, e))?;
        cap.mul(&step_factor(&bet, b, radix))?;
        cap.apply_precision(precision);
        g.advance_in_place(&mut cfg, b).map_err(|e| Error::at(i, e))?;
        visit(i + 1, &cap);
    }
    Ok(cap)
}

/// `d_G` on every prefix of `w`, exactly.
pub fn martingale<G: Gambler>(g: &G, w: &Word) -> Result<CapitalTrace> {
    martingale_with(g, w, Precision::Exact)
}

pub fn martingale_with<G: Gambler>(g: &G, w: &Word, precision: Precision) -> Result<CapitalTrace> {
    let mut capitals = Vec::with_capacity(w.len() + 1);
    drive(g, w.symbols(), precision, |_, c| capitals.push(c.clone()))?;
    Ok(CapitalTrace {
        radix: g.input_alphabet().radix(),
        s: Rational64::one(),
        capitals,
    })
}

/// Capital at the requested prefix lengths only (sorted, deduplicated).
pub fn capital_at<G: Gambler>(
    g: &G,
    w: &Word,
    checkpoints: &[usize],
    precision: Precision,
) -> Result<Vec<(usize, Capital)>> {
    let mut points: Vec<usize> = checkpoints.iter().copied().filter(|&n| n <= w.len()).collect();
    points.sort_unstable();
    points.dedup();
    let mut out = Vec::with_capacity(points.len());
    let mut next = 0;
    drive(g, w.symbols(), precision, |i, c| {
        if next < points.len() && points[next] == i {
            out.push((i, c.clone()));
            next += 1;
        }
    })?;
    Ok(out)
}

/// Re-reads a trace as an s-gale: `d'(w) = |Σ|^{(s'-s)|w|} d(w)`.
pub fn s_gale(trace: &CapitalTrace, s: Rational64) -> CapitalTrace {
    CapitalTrace {
        radix: trace.radix,
        s,
        capitals: trace.capitals.clone(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaleCounterexample {
    pub prefix: Word,
    /// `log_|Σ|` of `Σ_a d^s(wa)`.
    pub lhs_log: f64,
    /// `log_|Σ|` of `|Σ|^s d^s(w)`.
    pub rhs_log: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaleCheck {
    pub holds: bool,
    pub checked: usize,
    pub counterexample: Option<GaleCounterexample>,
}

/// Checks `Σ_a d^s(wa) = |Σ|^s d^s(w)` exactly for every `w` with `|w| < max_len`,
/// so that all extensions up to length `max_len` take part.
pub fn gale_condition_check<G: Gambler>(g: &G, max_len: usize, s: Rational64) -> Result<GaleCheck> {
    let radix = g.input_alphabet().radix();
    let symbols: Vec<Symbol> = g.input_alphabet().symbols().collect();
    let mut checked = 0;
    let mut todo = vec![(g.initial(), Capital::one(radix), Word::empty())];
    while let Some((cfg, cap, w)) = todo.pop() {
        if w.len() >= max_len {
            continue;
        }
        let bet = g.bet(&cfg).map_err(|e| Error::at(w.len(), e))?;
        let mut sum = BigRational::zero();
        let mut children = Vec::with_capacity(symbols.len());
        for &b in &symbols {
            let mut child_cap = cap.clone();
            child_cap.mul(&step_factor(&bet, b, radix))?;
            sum += child_cap.exact().expect("exact track");
            let (child_cfg, _) = g.advance(&cfg, b).map_err(|e| Error::at(w.len(), e))?;
            let mut cw = w.clone();
            cw.push(b);
            children.push((child_cfg, child_cap, cw));
        }
        let n = w.len() as i64;
        let one = Rational64::one();
        let lhs = GaleValue::new(Capital::from_rational(sum, radix), (s - one) * (n + 1));
        let rhs = GaleValue::new(cap.clone(), s + (s - one) * n);
        checked += 1;
        if lhs.exact_eq(&rhs) != Some(true) {
            return Ok(GaleCheck {
                holds: false,
                checked,
                counterexample: Some(GaleCounterexample {
                    prefix: w,
                    lhs_log: lhs.log(),
                    rhs_log: rhs.log(),
                }),
            });
        }
        // reverse so the depth-first walk visits prefixes in lex order
        todo.extend(children.into_iter().rev());
    }
    Ok(GaleCheck {
        holds: true,
        checked,
        counterexample: None,
    })
}

/// `1 - log_|Σ| d(w_n) / n` for a single prefix.
pub fn dim_upper_estimate(capital: &Capital, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("dimension estimate needs a nonempty prefix".into()));
    }
    if capital.is_zero() {
        return Err(Error::ZeroCapital);
    }
    Ok(1.0 - capital.log() / n as f64)
}

/// Approximates `1 - limsup log d / n` by the running maximum over checkpoints.
#[derive(Debug, Clone, Default)]
pub struct LimsupTracker {
    best: Option<f64>,
}

impl LimsupTracker {
    pub fn observe(&mut self, capital: &Capital, n: usize) -> Result<f64> {
        let est = dim_upper_estimate(capital, n)?;
        let rate = 1.0 - est;
        self.best = Some(self.best.map_or(rate, |b| b.max(rate)));
        Ok(est)
    }

    /// The running dimension bound, if anything was observed.
    pub fn estimate(&self) -> Option<f64> {
        self.best.map(|b| 1.0 - b)
    }
}

/// Mixes every bet with the uniform distribution:
/// `β'(q,z)(b) = ρ β(q,z)(b) + (1-ρ)/|Σ|`, so `d_{G'}(w) >= ρ^{|w|} d_G(w)`.
pub fn nonvanishing_transform(g: &BpdMachine, rho: &BigRational) -> Result<BpdMachine> {
    if g.kind() != MachineKind::Gambler {
        return Err(Error::KindMismatch { expected: "gambler" });
    }
    if !rho.is_positive() || *rho >= BigRational::one() {
        return Err(Error::Domain(format!("rho must lie in (0,1), got {rho}")));
    }
    let radix = g.input().len();
    let base = (BigRational::one() - rho) / BigRational::from_integer(BigInt::from(radix));
    Ok(g.map_bets(|bet| {
        BetDistribution::from_raw(bet.probs().iter().map(|p| rho * p + &base).collect())
    }))
}

/// CSV columns: `n,capital_num,capital_den,log_capital,dim_estimate`.
/// Fields without a value (no exact track, zero capital, n = 0) are empty.
pub fn write_capital_csv<W: Write>(points: &[(usize, Capital)], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["n", "capital_num", "capital_den", "log_capital", "dim_estimate"])?;
    for (n, cap) in points {
        let (num, den) = match cap.exact() {
            Some(x) => (x.numer().to_string(), x.denom().to_string()),
            None => (String::new(), String::new()),
        };
        let log = if cap.is_zero() { "-inf".to_string() } else { format!("{:.12}", cap.log()) };
        let dim = dim_upper_estimate(cap, *n).map(|d| format!("{d:.12}")).unwrap_or_default();
        wtr.write_record([n.to_string(), num, den, log, dim])?;
    }
    wtr.flush()?;
    Ok(())
}

/// The exact rational of a capital, formatted; `?` without an exact track.
pub fn format_capital(cap: &Capital) -> String {
    cap.exact().map(format_rational).unwrap_or_else(|| "?".into())
}
