//! Line-oriented text format for machine tables.
//!
//! ```text
//! bpd-machine v1
//! kind: gambler
//! input: 01
//! stack: z
//! states: q
//! start: q
//! start-stack: z
//! lambda-bound: 0
//! trans: q 0 z -> q z
//! trans: q 1 z -> q z
//! bet: q z -> 1/2 1/2
//! ```
//!
//! `~` stands for lambda (as input) and for the empty string (as push or
//! output). Push strings are written top-first. `#` starts a comment.

use std::fmt::Write as _;

use super::{BetDistribution, BpdMachine, MachineKind, StateId, Transition};
use crate::alphabet::{Alphabet, Symbol, Word};
use crate::arith::{format_rational, parse_rational};
use crate::error::{Error, Result};

const MAGIC: &str = "bpd-machine v1";

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Default)]
struct Header {
    kind: Option<(usize, MachineKind)>,
    input: Option<(usize, String)>,
    stack: Option<(usize, String)>,
    states: Option<(usize, Vec<String>)>,
    start: Option<(usize, String)>,
    start_stack: Option<(usize, String)>,
    lambda_bound: Option<(usize, usize)>,
}

fn set_once<T>(slot: &mut Option<(usize, T)>, line: usize, key: &str, value: T) -> Result<()> {
    if slot.is_some() {
        return Err(perr(line, format!("duplicate `{key}`")));
    }
    *slot = Some((line, value));
    Ok(())
}

fn single_char(line: usize, what: &str, tok: &str) -> Result<char> {
    let mut it = tok.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(perr(line, format!("{what} must be a single symbol, got {tok:?}"))),
    }
}

struct Resolver<'a> {
    input: &'a Alphabet,
    stack: &'a Alphabet,
    states: &'a [String],
}

impl Resolver<'_> {
    fn state(&self, line: usize, tok: &str) -> Result<StateId> {
        self.states
            .iter()
            .position(|s| s == tok)
            .map(StateId)
            .ok_or_else(|| perr(line, format!("unknown state {tok:?}")))
    }

    fn input_sym(&self, line: usize, tok: &str) -> Result<Symbol> {
        let c = single_char(line, "input symbol", tok)?;
        self.input
            .symbol(c)
            .map_err(|_| perr(line, format!("unknown input symbol {c:?}")))
    }

    fn stack_sym(&self, line: usize, tok: &str) -> Result<Symbol> {
        let c = single_char(line, "stack symbol", tok)?;
        self.stack
            .symbol(c)
            .map_err(|_| perr(line, format!("unknown stack symbol {c:?}")))
    }

    fn stack_string(&self, line: usize, tok: &str) -> Result<Vec<Symbol>> {
        if tok == "~" {
            return Ok(Vec::new());
        }
        tok.chars()
            .map(|c| {
                self.stack
                    .symbol(c)
                    .map_err(|_| perr(line, format!("unknown stack symbol {c:?}")))
            })
            .collect()
    }

    fn input_string(&self, line: usize, tok: &str) -> Result<Word> {
        if tok == "~" {
            return Ok(Word::empty());
        }
        tok.chars()
            .map(|c| {
                self.input
                    .symbol(c)
                    .map_err(|_| perr(line, format!("unknown output symbol {c:?}")))
            })
            .collect()
    }
}

fn split_arrow(line: usize, rest: &str) -> Result<(Vec<&str>, Vec<&str>)> {
    let (lhs, rhs) = rest
        .split_once("->")
        .ok_or_else(|| perr(line, "expected `->`"))?;
    Ok((lhs.split_whitespace().collect(), rhs.split_whitespace().collect()))
}

/// Parses the text format. Structural problems are errors with a line
/// number; semantic ones (normalization, exclusivity, ...) are left to
/// `validate`.
pub fn parse_machine(text: &str) -> Result<BpdMachine> {
    let mut header = Header::default();
    let mut entries: Vec<(usize, &str, &str)> = Vec::new();
    let mut saw_magic = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if !saw_magic {
            if content != MAGIC {
                return Err(perr(line, format!("expected `{MAGIC}`")));
            }
            saw_magic = true;
            continue;
        }
        let (key, rest) = content
            .split_once(':')
            .ok_or_else(|| perr(line, "expected `key: value`"))?;
        let rest = rest.trim();
        match key.trim() {
            "kind" => {
                let kind = match rest {
                    "gambler" => MachineKind::Gambler,
                    "compressor" => MachineKind::Compressor,
                    other => return Err(perr(line, format!("unknown kind {other:?}"))),
                };
                set_once(&mut header.kind, line, "kind", kind)?;
            }
            "input" => set_once(&mut header.input, line, "input", rest.to_string())?,
            "stack" => set_once(&mut header.stack, line, "stack", rest.to_string())?,
            "states" => set_once(
                &mut header.states,
                line,
                "states",
                rest.split_whitespace().map(str::to_string).collect(),
            )?,
            "start" => set_once(&mut header.start, line, "start", rest.to_string())?,
            "start-stack" => set_once(&mut header.start_stack, line, "start-stack", rest.to_string())?,
            "lambda-bound" => {
                let c = rest
                    .parse::<usize>()
                    .map_err(|_| perr(line, format!("bad lambda-bound {rest:?}")))?;
                set_once(&mut header.lambda_bound, line, "lambda-bound", c)?;
            }
            k @ ("trans" | "bet" | "out") => entries.push((line, k, rest)),
            other => return Err(perr(line, format!("unknown key {other:?}"))),
        }
    }
    if !saw_magic {
        return Err(perr(1, format!("expected `{MAGIC}`")));
    }

    let missing = |k: &str| perr(1, format!("missing `{k}`"));
    let (_, kind) = header.kind.ok_or_else(|| missing("kind"))?;
    let (il, input) = header.input.ok_or_else(|| missing("input"))?;
    let (sl, stack) = header.stack.ok_or_else(|| missing("stack"))?;
    let (stl, states) = header.states.ok_or_else(|| missing("states"))?;
    let (startl, start) = header.start.ok_or_else(|| missing("start"))?;
    let (zl, z0) = header.start_stack.ok_or_else(|| missing("start-stack"))?;
    let (_, c) = header.lambda_bound.ok_or_else(|| missing("lambda-bound"))?;

    let input = Alphabet::new(&input).map_err(|e| perr(il, e.to_string()))?;
    let stack = Alphabet::new_stack(&stack).map_err(|e| perr(sl, e.to_string()))?;
    if states.is_empty() {
        return Err(perr(stl, "no states"));
    }
    let resolver = Resolver {
        input: &input,
        stack: &stack,
        states: &states,
    };
    let start = resolver.state(startl, &start)?;
    let bottom = resolver.stack_sym(zl, &z0)?;
    let mut m = BpdMachine::new(kind, input.clone(), stack.clone(), states.clone(), start, bottom, c)
        .map_err(|e| perr(stl, e.to_string()))?;

    for (line, key, rest) in entries {
        let (lhs, rhs) = split_arrow(line, rest)?;
        match key {
            "trans" => {
                let [q, a, top] = lhs[..] else {
                    return Err(perr(line, "trans needs `<q> <a|~> <A> -> <q'> <push|~>`"));
                };
                let [target, push] = rhs[..] else {
                    return Err(perr(line, "trans needs `<q> <a|~> <A> -> <q'> <push|~>`"));
                };
                let q = resolver.state(line, q)?;
                let a = if a == "~" { None } else { Some(resolver.input_sym(line, a)?) };
                let top = resolver.stack_sym(line, top)?;
                let target = resolver.state(line, target)?;
                let push = resolver.stack_string(line, push)?;
                if m.transitions.contains_key(&(q, a, top)) {
                    return Err(perr(line, "duplicate transition"));
                }
                m.set_transition(q, a, top, Transition { target, push });
            }
            "bet" => {
                if kind != MachineKind::Gambler {
                    return Err(perr(line, "bet entry in a compressor"));
                }
                let [q, top] = lhs[..] else {
                    return Err(perr(line, "bet needs `<q> <A> -> <p> ...`"));
                };
                let q = resolver.state(line, q)?;
                let top = resolver.stack_sym(line, top)?;
                if rhs.len() != input.len() {
                    return Err(perr(line, format!("bet needs {} probabilities", input.len())));
                }
                let probs = rhs
                    .iter()
                    .map(|t| parse_rational(t).map_err(|e| perr(line, e.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                if m.bets.contains_key(&(q, top)) {
                    return Err(perr(line, "duplicate bet"));
                }
                m.set_bet(q, top, BetDistribution::from_raw(probs));
            }
            _ => {
                if kind != MachineKind::Compressor {
                    return Err(perr(line, "out entry in a gambler"));
                }
                let [q, a, top] = lhs[..] else {
                    return Err(perr(line, "out needs `<q> <a> <A> -> <string|~>`"));
                };
                let [out] = rhs[..] else {
                    return Err(perr(line, "out needs `<q> <a> <A> -> <string|~>`"));
                };
                let q = resolver.state(line, q)?;
                let a = resolver.input_sym(line, a)?;
                let top = resolver.stack_sym(line, top)?;
                let out = resolver.input_string(line, out)?;
                if m.outputs.contains_key(&(q, a, top)) {
                    return Err(perr(line, "duplicate output"));
                }
                m.set_output(q, a, top, out);
            }
        }
    }
    Ok(m)
}

/// Canonical text: fixed header order, then entries sorted by state,
/// input (lambda first) and stack symbol in declaration order.
pub fn serialize_machine(m: &BpdMachine) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "kind: {}", m.kind.name());
    let _ = writeln!(s, "input: {}", m.input);
    let _ = writeln!(s, "stack: {}", m.stack);
    let _ = writeln!(s, "states: {}", m.states.join(" "));
    let _ = writeln!(s, "start: {}", m.state_name(m.start));
    let _ = writeln!(s, "start-stack: {}", m.stack.char_of(m.bottom));
    let _ = writeln!(s, "lambda-bound: {}", m.lambda_bound);
    for (&(q, a, top), t) in &m.transitions {
        let a = a.map(|a| m.input.char_of(a).to_string()).unwrap_or_else(|| "~".into());
        let _ = writeln!(
            s,
            "trans: {} {} {} -> {} {}",
            m.state_name(q),
            a,
            m.stack.char_of(top),
            m.state_name(t.target),
            m.stack.render_or_lambda(&t.push)
        );
    }
    for (&(q, top), bet) in &m.bets {
        let probs: Vec<String> = bet.probs().iter().map(format_rational).collect();
        let _ = writeln!(
            s,
            "bet: {} {} -> {}",
            m.state_name(q),
            m.stack.char_of(top),
            probs.join(" ")
        );
    }
    for (&(q, a, top), out) in &m.outputs {
        let _ = writeln!(
            s,
            "out: {} {} {} -> {}",
            m.state_name(q),
            m.input.char_of(a),
            m.stack.char_of(top),
            m.input.render_or_lambda(out.symbols())
        );
    }
    s
}
