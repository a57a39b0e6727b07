use std::io::Write;

use super::{Mode, SeparationSequence, SeparationSpec, Zone, ONE, ZERO};
use crate::alphabet::{Alphabet, Symbol};
use crate::capital::{Capital, Precision};
use crate::error::Result;
use crate::gale::drive;
use crate::machine::{BetDistribution, BpdMachine, MachineKind, StateId, Transition};

const Z: Symbol = Symbol(0);
const S0: Symbol = Symbol(1);
const S1: Symbol = Symbol(2);

struct Table {
    m: BpdMachine,
}

impl Table {
    fn new(names: Vec<String>) -> Self {
        let m = BpdMachine::new(
            MachineKind::Gambler,
            Alphabet::binary(),
            Alphabet::new_stack("z01").expect("stack alphabet"),
            names,
            StateId(0),
            Z,
            0,
        )
        .expect("separation gambler");
        Table { m }
    }

    fn id(&self, name: &str) -> StateId {
        self.m.state_id(name).expect("known state")
    }

    /// `rule(input, top) -> (target, push top-first)` for every input and top.
    fn fill(&mut self, q: &str, rule: impl Fn(Symbol, Symbol) -> (String, Vec<Symbol>)) {
        let id = self.id(q);
        for top in [Z, S0, S1] {
            for b in [ZERO, ONE] {
                let (target, push) = rule(b, top);
                let target = self.id(&target);
                self.m.set_transition(id, Some(b), top, Transition { target, push });
            }
            let bet = match (q, top) {
                ("yb" | "b", t) if t != Z => BetDistribution::point(2, if t == S0 { ZERO } else { ONE }),
                _ => BetDistribution::uniform(2),
            };
            self.m.set_bet(id, top, bet);
        }
    }
}

fn keep(top: Symbol) -> Vec<Symbol> {
    vec![top]
}

/// Pops `top`, except that the bottom symbol stays.
fn pop(top: Symbol) -> Vec<Symbol> {
    if top == Z {
        vec![Z]
    } else {
        Vec::new()
    }
}

/// The gambler that doubles its capital on every bit of each `Y` zone but
/// the first, and never bets elsewhere.
pub fn build_separation_gambler(spec: &SeparationSpec) -> BpdMachine {
    match spec.mode() {
        Mode::Corrected => corrected(spec),
        Mode::Paper => paper(spec),
    }
}

fn corrected(spec: &SeparationSpec) -> BpdMachine {
    let v = spec.v();
    let tau = spec.tau();
    let mut names: Vec<String> = (0..v).map(|i| format!("e{i}")).collect();
    names.extend((0..tau).map(|r| format!("a{r}")));
    names.push("f1".into());
    names.extend((0..tau).map(|r| format!("x{r}")));
    names.push("f2".into());
    names.push("yb".into());
    let mut t = Table::new(names);

    for i in 0..v {
        let next = if i + 1 == v { "a0".to_string() } else { format!("e{}", i + 1) };
        t.fill(&format!("e{i}"), |_, top| (next.clone(), keep(top)));
    }
    for r in 0..tau {
        t.fill(&format!("a{r}"), |b, top| {
            let target = match b {
                ZERO => "a0".to_string(),
                _ if r + 1 == tau => "f1".to_string(),
                _ => format!("a{}", r + 1),
            };
            (target, keep(top))
        });
    }
    t.fill("f1", |b, top| match b {
        ZERO => ("x0".into(), vec![S0, top]),
        _ => ("f1".into(), keep(top)),
    });
    // x_r holds r unpushed ones; a 0 flushes them beneath itself.
    for r in 0..tau {
        t.fill(&format!("x{r}"), |b, top| match b {
            ZERO => {
                let mut push = vec![S0];
                push.extend(std::iter::repeat_n(S1, r));
                push.push(top);
                ("x0".into(), push)
            }
            _ if r + 1 == tau => ("f2".into(), keep(top)),
            _ => (format!("x{}", r + 1), keep(top)),
        });
    }
    t.fill("f2", |b, top| match (b, top) {
        (ONE, _) => ("f2".into(), keep(top)),
        (_, Z) => ("a0".into(), keep(top)),
        _ => ("yb".into(), pop(top)),
    });
    t.fill("yb", |b, top| match top {
        Z => (if b == ONE { "a1" } else { "a0" }.into(), keep(top)),
        _ => ("yb".into(), pop(top)),
    });
    t.m
}

fn paper(spec: &SeparationSpec) -> BpdMachine {
    let v = spec.v();
    let k = spec.k();
    let mut names: Vec<String> = (0..=v).map(|i| format!("q{i}")).collect();
    names.extend((0..=k).map(|i| format!("a{i}")));
    names.push("f1".into());
    names.extend((0..=k).map(|i| format!("X{i}")));
    names.extend((0..=k).map(|i| format!("r{i}")));
    names.push("f2".into());
    names.push("b".into());
    let mut t = Table::new(names);

    for i in 0..=v {
        let next = if i == v { "a0".to_string() } else { format!("q{}", i + 1) };
        t.fill(&format!("q{i}"), |_, top| (next.clone(), keep(top)));
    }
    for i in 0..=k {
        t.fill(&format!("a{i}"), |b, top| {
            let target = if i == k {
                "f1".to_string()
            } else if b == ONE {
                format!("a{}", i + 1)
            } else {
                "a0".to_string()
            };
            (target, keep(top))
        });
    }
    t.fill("f1", |b, top| match b {
        ZERO => ("X0".into(), vec![S0, top]),
        _ => ("f1".into(), keep(top)),
    });
    for i in 0..=k {
        t.fill(&format!("X{i}"), |b, top| {
            if i == k {
                ("r0".into(), keep(top))
            } else if b == ONE {
                (format!("X{}", i + 1), vec![S1, top])
            } else {
                ("X0".into(), vec![S0, top])
            }
        });
    }
    for i in 0..=k {
        t.fill(&format!("r{i}"), |_, top| {
            if i == k {
                ("f2".into(), keep(top))
            } else {
                (format!("r{}", i + 1), pop(top))
            }
        });
    }
    t.fill("f2", |b, top| match b {
        ONE => ("f2".into(), keep(top)),
        _ => ("b".into(), pop(top)),
    });
    t.fill("b", |b, top| match top {
        Z => (if b == ONE { "a1" } else { "a0" }.into(), keep(top)),
        _ => ("b".into(), pop(top)),
    });
    t.m
}

/// `Σ_{j=k}^{n} (j·t_j - 1)`: the corrected gambler's `log2 d` after `S_n`.
pub fn expected_log2_capital(seq: &SeparationSequence, n: usize) -> Option<i64> {
    let k = seq.spec().k();
    if n < k {
        return None;
    }
    (k..=n)
        .map(|j| seq.layout(j).map(|z| (j * z.t()) as i64 - 1))
        .sum()
}

/// Capital at the end of one stage.
#[derive(Debug, Clone)]
pub struct StagePoint {
    pub n: usize,
    pub end: usize,
    pub capital: Capital,
    pub expected_log2: i64,
}

impl StagePoint {
    /// `1 - log2 d / |S_1 … S_n|`.
    pub fn dim_estimate(&self) -> f64 {
        1.0 - self.capital.log2() / self.end as f64
    }

    /// Exact comparison when the rational track survives, else within `1e-6`.
    pub fn matches_expected(&self) -> bool {
        match self.capital.exact() {
            Some(x) => *x == crate::arith::radix_pow(2, self.expected_log2),
            None => (self.capital.log2() - self.expected_log2 as f64).abs() < 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeparationRun {
    pub points: Vec<StagePoint>,
    /// Index of the symbol whose bet lost everything.
    pub first_zero: Option<usize>,
    pub final_capital: Capital,
}

/// Drives `g` over the whole sequence, sampling capital at each stage end.
pub fn run_separation(g: &BpdMachine, seq: &SeparationSequence, precision: Precision) -> Result<SeparationRun> {
    let k = seq.spec().k();
    let ends: Vec<(usize, usize)> = (k..=seq.upto())
        .filter_map(|n| seq.stage(n).map(|(_, end)| (n, end)))
        .collect();
    let mut points = Vec::with_capacity(ends.len());
    let mut first_zero = None;
    let mut next = 0;
    let final_capital = drive(g, seq.text().symbols(), precision, |i, cap| {
        if first_zero.is_none() && cap.is_zero() {
            first_zero = Some(i - 1);
        }
        if next < ends.len() && ends[next].1 == i {
            let n = ends[next].0;
            points.push(StagePoint {
                n,
                end: i,
                capital: cap.clone(),
                expected_log2: expected_log2_capital(seq, n).expect("n >= k"),
            });
            next += 1;
        }
    })?;
    Ok(SeparationRun {
        points,
        first_zero,
        final_capital,
    })
}

/// CSV columns: `n,end,log2_capital,expected_log2,exact,dim_estimate`.
pub fn write_stage_csv<W: Write>(points: &[StagePoint], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["n", "end", "log2_capital", "expected_log2", "exact", "dim_estimate"])?;
    for p in points {
        let log2 = p.capital.log2();
        wtr.write_record([
            p.n.to_string(),
            p.end.to_string(),
            if log2.is_finite() { format!("{log2:.6}") } else { "-inf".into() },
            p.expected_log2.to_string(),
            p.capital.exact().is_some().to_string(),
            if log2.is_finite() { format!("{:.12}", p.dim_estimate()) } else { String::new() },
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// The gambler believed a flag had started while still inside a zone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Misfire {
    pub position: usize,
    pub zone: Zone,
    pub n: usize,
    /// The maximal 1-run containing `position`.
    pub run: (usize, usize),
    /// Whether that run spans a boundary between two zone strings.
    pub crosses_boundary: bool,
}

fn detection_states(g: &BpdMachine, spec: &SeparationSpec) -> Vec<StateId> {
    let names = match spec.mode() {
        Mode::Corrected => vec!["f1".to_string(), "f2".to_string()],
        Mode::Paper => vec![format!("a{}", spec.k()), format!("X{}", spec.k())],
    };
    names.iter().filter_map(|n| g.state_id(n).ok()).collect()
}

/// First position inside an `A` or `X` zone after which `g` sits in a
/// flag-detected state.
pub fn first_misfire(g: &BpdMachine, seq: &SeparationSequence) -> Result<Option<Misfire>> {
    let detect = detection_states(g, seq.spec());
    let text = seq.text().symbols();
    let mut cfg = g.initial_config();
    for (pos, &b) in text.iter().enumerate() {
        g.step_in_place(&mut cfg, b)?;
        if !detect.contains(&cfg.state) {
            continue;
        }
        let Some(span) = seq.span_at(pos) else { continue };
        if !matches!(span.zone, Zone::A | Zone::X) {
            continue;
        }
        let mut start = pos;
        while start > 0 && text[start - 1] == ONE {
            start -= 1;
        }
        let mut end = pos + 1;
        while end < text.len() && text[end] == ONE {
            end += 1;
        }
        let crosses_boundary = (start + 1..end)
            .any(|p| p > span.start && p < span.end && (p - span.start) % span.n == 0);
        return Ok(Some(Misfire {
            position: pos,
            zone: span.zone,
            n: span.n,
            run: (start, end),
            crosses_boundary,
        }));
    }
    Ok(None)
}
