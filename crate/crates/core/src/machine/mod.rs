//! Bounded pushdown machines: gamblers and compressors.
//!
//! A machine reads one input symbol per step. Before the symbol is consumed
//! every available lambda-transition is taken (at most `lambda_bound` of them),
//! then the unique transition on the symbol fires. The bet (gambler) or the
//! output (compressor) of a step is read from the configuration the step
//! starts in, i.e. `β(δ(w))` and `ν(δ_Q(w), b, δ_Γ(w))`.
//!
//! Stacks are stored bottom-first, so the top is the last element. Push
//! strings are written top-first, matching the text format.

mod format;
mod validate;

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::alphabet::{Alphabet, Symbol, Word};
use crate::error::{Error, Result};

pub use format::{parse_machine, serialize_machine};
pub use validate::{validate, ValidationReport, Violation, Warning};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MachineKind {
    Gambler,
    Compressor,
}

impl MachineKind {
    pub fn name(self) -> &'static str {
        match self {
            MachineKind::Gambler => "gambler",
            MachineKind::Compressor => "compressor",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub target: StateId,
    /// Written top-first.
    pub push: Vec<Symbol>,
}

/// A rational probability vector indexed by input symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetDistribution {
    probs: Vec<BigRational>,
}

impl BetDistribution {
    /// Checked constructor: entries in `[0, 1]` summing to exactly one.
    pub fn new(probs: Vec<BigRational>) -> Result<Self> {
        let d = BetDistribution { probs };
        if !d.is_normalized() {
            return Err(Error::Domain(format!(
                "bet distribution {:?} is not a probability vector",
                d.probs.iter().map(|p| p.to_string()).collect::<Vec<_>>()
            )));
        }
        Ok(d)
    }

    /// Unchecked; `validate` reports malformed entries.
    pub fn from_raw(probs: Vec<BigRational>) -> Self {
        BetDistribution { probs }
    }

    pub fn uniform(radix: usize) -> Self {
        let p = BigRational::new(1.into(), (radix as i64).into());
        BetDistribution {
            probs: vec![p; radix],
        }
    }

    /// All-in on one symbol.
    pub fn point(radix: usize, on: Symbol) -> Self {
        let probs = (0..radix)
            .map(|i| {
                if i == on.index() {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        BetDistribution { probs }
    }

    pub fn prob(&self, b: Symbol) -> &BigRational {
        &self.probs[b.index()]
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn sum(&self) -> BigRational {
        self.probs.iter().fold(BigRational::zero(), |acc, p| acc + p)
    }

    pub fn is_normalized(&self) -> bool {
        self.probs
            .iter()
            .all(|p| !p.is_negative() && *p <= BigRational::one())
            && self.sum().is_one()
    }

    /// Every entry strictly inside `(0, 1)`.
    pub fn is_nonvanishing(&self) -> bool {
        self.probs
            .iter()
            .all(|p| p.is_positive() && *p < BigRational::one())
    }
}

/// A state together with its stack (bottom-first).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub stack: Vec<Symbol>,
}

impl Configuration {
    pub fn new(state: StateId, stack: Vec<Symbol>) -> Self {
        Configuration { state, stack }
    }

    pub fn top(&self) -> Option<Symbol> {
        self.stack.last().copied()
    }

    /// The stack written top-first.
    pub fn stack_top_first(&self) -> Vec<Symbol> {
        self.stack.iter().rev().copied().collect()
    }

    /// Ends with `bottom` and contains it exactly once.
    pub fn is_rooted(&self, bottom: Symbol) -> bool {
        self.stack.first() == Some(&bottom) && self.stack.iter().filter(|&&s| s == bottom).count() == 1
    }
}

/// Bookkeeping returned by one input step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepInfo {
    pub lambda_steps: usize,
    /// Number of stack units left untouched by the step. The bottom unit is
    /// never consumed (it is always pushed back), so this is at least one on
    /// rooted stacks.
    pub low_water: usize,
}

/// Common interface of explicit and derived machines.
pub trait Machine {
    type Config: Clone + Debug;
    type State: Clone + Eq + Hash + Ord + Debug;

    fn input_alphabet(&self) -> &Alphabet;
    fn initial(&self) -> Self::Config;
    fn state_of(&self, cfg: &Self::Config) -> Self::State;
    fn stack_len(&self, cfg: &Self::Config) -> usize;
    fn state_count(&self) -> usize;
    fn lambda_bound(&self) -> usize;

    /// Consumes one input symbol, lambda-transitions included.
    fn advance_in_place(&self, cfg: &mut Self::Config, b: Symbol) -> Result<StepInfo>;

    fn advance(&self, cfg: &Self::Config, b: Symbol) -> Result<(Self::Config, StepInfo)> {
        let mut next = cfg.clone();
        let info = self.advance_in_place(&mut next, b)?;
        Ok((next, info))
    }
}

pub trait Gambler: Machine {
    /// The bet placed on the next symbol from this configuration.
    fn bet(&self, cfg: &Self::Config) -> Result<BetDistribution>;
}

pub trait Compressor: Machine {
    /// The output emitted when `b` is read from this configuration.
    fn output(&self, cfg: &Self::Config, b: Symbol) -> Result<Word>;

    /// An upper bound on the output length of a single step.
    fn max_output_len(&self) -> Result<usize>;
}

/// What a step produced besides the new configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepEffect {
    Bet(BetDistribution),
    Output(Word),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub config: Configuration,
    pub lambda_steps: usize,
    pub effect: StepEffect,
}

/// Configurations visited by a run; `configs[0]` is the start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub configs: Vec<Configuration>,
    pub effects: Vec<StepEffect>,
    pub lambda_steps: Vec<usize>,
}

impl Trace {
    /// Concatenated outputs (compressors only; bets contribute nothing).
    pub fn output(&self) -> Word {
        let mut out = Word::empty();
        for e in &self.effects {
            if let StepEffect::Output(w) = e {
                out.extend_from(w);
            }
        }
        out
    }

    pub fn final_config(&self) -> &Configuration {
        self.configs.last().expect("trace starts with a configuration")
    }
}

/// An explicit machine table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpdMachine {
    kind: MachineKind,
    input: Alphabet,
    stack: Alphabet,
    states: Vec<String>,
    start: StateId,
    bottom: Symbol,
    lambda_bound: usize,
    transitions: BTreeMap<(StateId, Option<Symbol>, Symbol), Transition>,
    bets: BTreeMap<(StateId, Symbol), BetDistribution>,
    outputs: BTreeMap<(StateId, Symbol, Symbol), Word>,
}

impl BpdMachine {
    pub fn new(
        kind: MachineKind,
        input: Alphabet,
        stack: Alphabet,
        states: Vec<String>,
        start: StateId,
        bottom: Symbol,
        lambda_bound: usize,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Domain("a machine needs at least one state".into()));
        }
        for (i, s) in states.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) || s == "->" {
                return Err(Error::Domain(format!("bad state name {s:?}")));
            }
            if states[..i].contains(s) {
                return Err(Error::Domain(format!("duplicate state {s:?}")));
            }
        }
        if start.0 >= states.len() || bottom.index() >= stack.len() {
            return Err(Error::Domain("start state or bottom symbol out of range".into()));
        }
        Ok(BpdMachine {
            kind,
            input,
            stack,
            states,
            start,
            bottom,
            lambda_bound,
            transitions: BTreeMap::new(),
            bets: BTreeMap::new(),
            outputs: BTreeMap::new(),
        })
    }

    /// Name-based constructor used by fixtures and builders.
    pub fn with_names(
        kind: MachineKind,
        input: &str,
        stack: &str,
        states: &[&str],
        start: &str,
        bottom: char,
        lambda_bound: usize,
    ) -> Result<Self> {
        let input = Alphabet::new(input)?;
        let stack = Alphabet::new_stack(stack)?;
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let start = states
            .iter()
            .position(|s| s == start)
            .map(StateId)
            .ok_or_else(|| Error::Domain(format!("unknown start state {start:?}")))?;
        let bottom = stack.symbol(bottom)?;
        Self::new(kind, input, stack, states, start, bottom, lambda_bound)
    }

    pub fn kind(&self) -> MachineKind {
        self.kind
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn stack_alphabet(&self) -> &Alphabet {
        &self.stack
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn bottom(&self) -> Symbol {
        self.bottom
    }

    pub fn transitions(&self) -> &BTreeMap<(StateId, Option<Symbol>, Symbol), Transition> {
        &self.transitions
    }

    pub fn bets(&self) -> &BTreeMap<(StateId, Symbol), BetDistribution> {
        &self.bets
    }

    pub fn outputs(&self) -> &BTreeMap<(StateId, Symbol, Symbol), Word> {
        &self.outputs
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0]
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(StateId)
            .ok_or_else(|| Error::Domain(format!("unknown state {name:?}")))
    }

    pub fn set_transition(&mut self, q: StateId, input: Option<Symbol>, top: Symbol, t: Transition) {
        self.transitions.insert((q, input, top), t);
    }

    pub fn set_bet(&mut self, q: StateId, top: Symbol, bet: BetDistribution) {
        self.bets.insert((q, top), bet);
    }

    pub fn set_output(&mut self, q: StateId, input: Symbol, top: Symbol, out: Word) {
        self.outputs.insert((q, input, top), out);
    }

    pub fn set_lambda_bound(&mut self, c: usize) {
        self.lambda_bound = c;
    }

    /// `trans`, by names: `input` of `None` is a lambda-transition, `push` is top-first.
    pub fn add_trans(
        &mut self,
        q: &str,
        input: Option<char>,
        top: char,
        target: &str,
        push: &str,
    ) -> Result<()> {
        let q = self.state_id(q)?;
        let input = input.map(|c| self.input.symbol(c)).transpose()?;
        let top = self.stack.symbol(top)?;
        let target = self.state_id(target)?;
        let push = push.chars().map(|c| self.stack.symbol(c)).collect::<Result<Vec<_>>>()?;
        self.set_transition(q, input, top, Transition { target, push });
        Ok(())
    }

    pub fn add_bet(&mut self, q: &str, top: char, probs: Vec<BigRational>) -> Result<()> {
        let q = self.state_id(q)?;
        let top = self.stack.symbol(top)?;
        self.set_bet(q, top, BetDistribution::from_raw(probs));
        Ok(())
    }

    pub fn add_output(&mut self, q: &str, input: char, top: char, out: &str) -> Result<()> {
        let q = self.state_id(q)?;
        let input = self.input.symbol(input)?;
        let top = self.stack.symbol(top)?;
        let out = self.input.word(out)?;
        self.set_output(q, input, top, out);
        Ok(())
    }

    /// Same machine with every bet replaced.
    pub fn map_bets(&self, f: impl Fn(&BetDistribution) -> BetDistribution) -> BpdMachine {
        let mut m = self.clone();
        for bet in m.bets.values_mut() {
            *bet = f(bet);
        }
        m
    }

    pub fn initial_config(&self) -> Configuration {
        Configuration::new(self.start, vec![self.bottom])
    }

    fn require(&self, kind: MachineKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::KindMismatch {
                expected: kind.name(),
            })
        }
    }

    fn top_of(&self, cfg: &Configuration) -> Result<Symbol> {
        cfg.top().ok_or_else(|| {
            Error::StackUnderflow(format!("empty stack at state {}", self.state_name(cfg.state)))
        })
    }

    fn apply(&self, cfg: &mut Configuration, t: &Transition, untouched: &mut usize) {
        let len = cfg.stack.len();
        let popped = cfg.stack.pop().expect("top checked");
        let kept = if len == 1 && popped == self.bottom { 1 } else { len - 1 };
        *untouched = (*untouched).min(kept);
        cfg.stack.extend(t.push.iter().rev());
        cfg.state = t.target;
    }

    /// One application of `δ**` on `b`, in place.
    pub fn step_in_place(&self, cfg: &mut Configuration, b: Symbol) -> Result<StepInfo> {
        let mut untouched = cfg.stack.len();
        let mut lambda_steps = 0;
        loop {
            let top = self.top_of(cfg)?;
            match self.transitions.get(&(cfg.state, None, top)) {
                Some(t) => {
                    lambda_steps += 1;
                    if lambda_steps > self.lambda_bound {
                        return Err(Error::LambdaOverflow {
                            state: self.state_name(cfg.state).to_string(),
                            bound: self.lambda_bound,
                        });
                    }
                    self.apply(cfg, t, &mut untouched);
                }
                None => break,
            }
        }
        let top = self.top_of(cfg)?;
        let t = self
            .transitions
            .get(&(cfg.state, Some(b), top))
            .ok_or_else(|| Error::UndefinedTransition {
                state: self.state_name(cfg.state).to_string(),
                input: self.input.char_of(b),
                top: self.stack.char_of(top),
            })?;
        self.apply(cfg, t, &mut untouched);
        Ok(StepInfo {
            lambda_steps,
            low_water: untouched,
        })
    }

    pub fn bet_at(&self, cfg: &Configuration) -> Result<&BetDistribution> {
        self.require(MachineKind::Gambler)?;
        let top = self.top_of(cfg)?;
        self.bets.get(&(cfg.state, top)).ok_or_else(|| Error::MissingBet {
            state: self.state_name(cfg.state).to_string(),
            top: self.stack.char_of(top),
        })
    }

    pub fn output_at(&self, cfg: &Configuration, b: Symbol) -> Result<&Word> {
        self.require(MachineKind::Compressor)?;
        let top = self.top_of(cfg)?;
        self.outputs
            .get(&(cfg.state, b, top))
            .ok_or_else(|| Error::MissingOutput {
                state: self.state_name(cfg.state).to_string(),
                input: self.input.char_of(b),
                top: self.stack.char_of(top),
            })
    }

    /// One input step with its bet or output.
    pub fn step(&self, cfg: &Configuration, b: Symbol) -> Result<Step> {
        let effect = match self.kind {
            MachineKind::Gambler => StepEffect::Bet(self.bet_at(cfg)?.clone()),
            MachineKind::Compressor => StepEffect::Output(self.output_at(cfg, b)?.clone()),
        };
        let mut next = cfg.clone();
        let info = self.step_in_place(&mut next, b)?;
        Ok(Step {
            config: next,
            lambda_steps: info.lambda_steps,
            effect,
        })
    }

    /// Full trace on `w`; errors carry the failing input position.
    pub fn run(&self, w: &Word) -> Result<Trace> {
        let mut cfg = self.initial_config();
        let mut trace = Trace {
            configs: vec![cfg.clone()],
            effects: Vec::with_capacity(w.len()),
            lambda_steps: Vec::with_capacity(w.len()),
        };
        for (i, &b) in w.symbols().iter().enumerate() {
            let step = self.step(&cfg, b).map_err(|e| Error::at(i, e))?;
            cfg = step.config;
            trace.configs.push(cfg.clone());
            trace.effects.push(step.effect);
            trace.lambda_steps.push(step.lambda_steps);
        }
        Ok(trace)
    }

    /// Largest output string in the table.
    pub fn max_table_output(&self) -> usize {
        self.outputs.values().map(Word::len).max().unwrap_or(0)
    }
}

impl Machine for BpdMachine {
    type Config = Configuration;
    type State = StateId;

    fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    fn initial(&self) -> Configuration {
        self.initial_config()
    }

    fn state_of(&self, cfg: &Configuration) -> StateId {
        cfg.state
    }

    fn stack_len(&self, cfg: &Configuration) -> usize {
        cfg.stack.len()
    }

    fn state_count(&self) -> usize {
        self.states.len()
    }

    fn lambda_bound(&self) -> usize {
        self.lambda_bound
    }

    fn advance_in_place(&self, cfg: &mut Configuration, b: Symbol) -> Result<StepInfo> {
        self.step_in_place(cfg, b)
    }
}

impl Gambler for BpdMachine {
    fn bet(&self, cfg: &Configuration) -> Result<BetDistribution> {
        self.bet_at(cfg).cloned()
    }
}

impl Compressor for BpdMachine {
    fn output(&self, cfg: &Configuration, b: Symbol) -> Result<Word> {
        self.output_at(cfg, b).cloned()
    }

    fn max_output_len(&self) -> Result<usize> {
        self.require(MachineKind::Compressor)?;
        Ok(self.max_table_output())
    }
}
