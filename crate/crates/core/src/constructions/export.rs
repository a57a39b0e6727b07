//! Explicit tables for the derived machines over the chunk alphabet.
//!
//! Each chunk becomes one stack character, allocated from U+4E00 on.
//! Entries the chunk alphabet cannot express are left undefined and counted:
//! steps whose result is shorter than one chunk (they would need the chunk
//! below) and steps on which the base machine itself fails.

use std::collections::HashMap;

use num_rational::BigRational;

use super::BlockCompressor;
use crate::alphabet::{count_words, lex_enumerate, Alphabet, EnumCap, Symbol, Word};
use crate::error::{Error, Result};
use crate::machine::{BetDistribution, BpdMachine, Configuration, Machine, MachineKind, StateId, Transition};

const FIRST_CHAR: u32 = 0x4E00;
const MAX_CHUNKS: u128 = 0x9FFF - 0x4E00;

#[derive(Debug, Clone)]
pub struct TabulatedMachine {
    pub machine: BpdMachine,
    /// Base stack string of every chunk symbol, top-first.
    pub chunks: Vec<Word>,
    /// Table entries left undefined.
    pub undefined: usize,
}

struct Chunks {
    k: usize,
    z0: Symbol,
    /// Top-first content; bottom chunks end in `z0^{2k}`.
    content: Vec<Vec<Symbol>>,
    bottom: Vec<bool>,
    index: HashMap<Vec<Symbol>, usize>,
}

impl Chunks {
    fn build(stack: &Alphabet, z0: Symbol, k: usize, states: usize, inputs: usize, cap: EnumCap) -> Result<Self> {
        let others: Vec<char> = stack.chars().iter().copied().filter(|&c| stack.symbol(c).ok() != Some(z0)).collect();
        let r = others.len() as u32;
        let total: u128 = (0..4 * k).map(|j| count_words(r, j)).sum();
        if total > MAX_CHUNKS {
            return Err(Error::Capacity { requested: total, cap: MAX_CHUNKS });
        }
        cap.check(total.saturating_mul(states as u128).saturating_mul(inputs as u128))?;
        let mut chunks = Chunks {
            k,
            z0,
            content: Vec::new(),
            bottom: Vec::new(),
            index: HashMap::new(),
        };
        let words = |n: usize| -> Result<Vec<Vec<Symbol>>> {
            if others.is_empty() {
                return Ok(if n == 0 { vec![Vec::new()] } else { Vec::new() });
            }
            let a = Alphabet::from_chars(others.clone())?;
            let ws = lex_enumerate(&a, n, EnumCap(u128::MAX))?;
            Ok(ws
                .into_iter()
                .map(|w| w.symbols().iter().map(|s| stack.symbol(a.char_of(*s)).expect("subset")).collect())
                .collect())
        };
        for n in 0..2 * k {
            for mut y in words(n)? {
                y.extend(std::iter::repeat_n(z0, 2 * k));
                chunks.push(y, true);
            }
        }
        for n in 2 * k..4 * k {
            for y in words(n)? {
                chunks.push(y, false);
            }
        }
        Ok(chunks)
    }

    fn push(&mut self, content: Vec<Symbol>, bottom: bool) {
        self.index.insert(content.clone(), self.content.len());
        self.content.push(content);
        self.bottom.push(bottom);
    }

    fn alphabet(&self) -> Result<Alphabet> {
        Alphabet::from_chars((0..self.content.len()).map(char_for).collect())
    }

    /// The base stack, bottom-first, that the chunk stands for when it is the
    /// whole stack (bottom chunks) or the top of a longer one.
    fn flat(&self, i: usize) -> Vec<Symbol> {
        let c = &self.content[i];
        if self.bottom[i] {
            let extra = c.len() - 2 * self.k;
            let mut v = vec![self.z0];
            v.extend(c[..extra].iter().rev());
            v
        } else {
            c.iter().rev().copied().collect()
        }
    }

    /// Re-chunks a base stack produced from chunk `from`; top-first chunk ids.
    fn hat(&self, from: usize, flat: &[Symbol]) -> Option<Vec<usize>> {
        let mut content: Vec<Symbol>;
        if self.bottom[from] {
            if flat.first() != Some(&self.z0) || flat[1..].contains(&self.z0) {
                return None;
            }
            content = flat[1..].iter().rev().copied().collect();
            content.extend(std::iter::repeat_n(self.z0, 2 * self.k));
        } else {
            if flat.contains(&self.z0) {
                return None;
            }
            content = flat.iter().rev().copied().collect();
        }
        let unit = 2 * self.k;
        if content.len() < unit {
            return None;
        }
        let first = unit + content.len() % unit;
        let mut out = vec![*self.index.get(&content[..first])?];
        let mut pos = first;
        while pos < content.len() {
            out.push(*self.index.get(&content[pos..pos + unit])?);
            pos += unit;
        }
        Some(out)
    }
}

fn char_for(i: usize) -> char {
    char::from_u32(FIRST_CHAR + i as u32).expect("CJK block")
}

fn bottom_id(chunks: &Chunks) -> usize {
    chunks.index[&vec![chunks.z0; 2 * chunks.k]]
}

fn chunk_words(chunks: &Chunks) -> Vec<Word> {
    chunks.content.iter().map(|c| Word(c.clone())).collect()
}

/// `G(C, k)` over the chunk alphabet, for an explicit compressor `C`.
pub fn export_block_gambler(c: &BpdMachine, k: usize, cap: EnumCap) -> Result<TabulatedMachine> {
    if c.kind() != MachineKind::Compressor {
        return Err(Error::KindMismatch { expected: "compressor" });
    }
    if k == 0 || c.lambda_bound() > 1 {
        return Err(Error::Construction("export needs k >= 1 and lambda bound at most 1".into()));
    }
    let input = c.input().clone();
    let chunks = Chunks::build(c.stack_alphabet(), c.bottom(), k, c.states().len() * k, input.len(), cap)?;
    let mut names = Vec::new();
    for q in c.states() {
        for i in 0..k {
            names.push(format!("{q}/{i}"));
        }
    }
    let id = |q: StateId, i: usize| StateId(q.0 * k + i);
    let mut m = BpdMachine::new(
        MachineKind::Gambler,
        input.clone(),
        chunks.alphabet()?,
        names,
        id(c.start(), 0),
        Symbol(bottom_id(&chunks) as u16),
        0,
    )?;
    let mut undefined = 0;
    for q in (0..c.states().len()).map(StateId) {
        for i in 0..k {
            let tails = lex_enumerate(&input, k - i - 1, EnumCap(u128::MAX))?;
            for a in 0..chunks.content.len() {
                let top = Symbol(a as u16);
                let start = Configuration::new(q, chunks.flat(a));
                let mut parts = Vec::with_capacity(input.len());
                for b in input.symbols() {
                    let set: Vec<Word> = tails.iter().map(|t| Word(vec![b]).concat(t)).collect();
                    parts.push(super::sigma_of_set(c, &start, &set).ok());
                    let mut cfg = start.clone();
                    let next = c.step_in_place(&mut cfg, b).ok().and_then(|_| chunks.hat(a, &cfg.stack));
                    match next {
                        Some(push) => m.set_transition(
                            id(q, i),
                            Some(b),
                            top,
                            Transition {
                                target: id(cfg.state, (i + 1) % k),
                                push: push.into_iter().map(|x| Symbol(x as u16)).collect(),
                            },
                        ),
                        None => undefined += 1,
                    }
                }
                match parts.into_iter().collect::<Option<Vec<BigRational>>>() {
                    Some(parts) => {
                        let total: BigRational = parts.iter().sum();
                        let bet = BetDistribution::from_raw(parts.into_iter().map(|p| p / &total).collect());
                        m.set_bet(id(q, i), top, bet);
                    }
                    None => undefined += 1,
                }
            }
        }
    }
    Ok(TabulatedMachine {
        machine: m,
        chunks: chunk_words(&chunks),
        undefined,
    })
}

/// `C(G, k)` over the chunk alphabet.
pub fn export_block_compressor(bc: &BlockCompressor, cap: EnumCap) -> Result<TabulatedMachine> {
    let g = bc.base();
    let k = bc.k();
    let input = g.input().clone();
    let buffers: Vec<Word> = (0..k)
        .map(|n| lex_enumerate(&input, n, EnumCap(u128::MAX)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let chunks = Chunks::build(g.stack_alphabet(), g.bottom(), k, g.states().len() * buffers.len(), input.len(), cap)?;
    let buffer_id: HashMap<&Word, usize> = buffers.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut names = Vec::new();
    for q in g.states() {
        for w in &buffers {
            names.push(format!("{q}/{}", input.render(w.symbols())));
        }
    }
    let nb = buffers.len();
    let id = |q: StateId, w: &Word| StateId(q.0 * nb + buffer_id[w]);
    let mut m = BpdMachine::new(
        MachineKind::Compressor,
        input.clone(),
        chunks.alphabet()?,
        names,
        id(g.start(), &Word::empty()),
        Symbol(bottom_id(&chunks) as u16),
        0,
    )?;
    let mut undefined = 0;
    for q in (0..g.states().len()).map(StateId) {
        for w in &buffers {
            for a in 0..chunks.content.len() {
                let top = Symbol(a as u16);
                let start = Configuration::new(q, chunks.flat(a));
                let code = if w.len() + 1 == k { bc.code_at(&start).ok() } else { None };
                for b in input.symbols() {
                    let mut wb = w.clone();
                    wb.push(b);
                    if w.len() + 1 < k {
                        m.set_transition(id(q, w), Some(b), top, Transition { target: id(q, &wb), push: vec![top] });
                        m.set_output(id(q, w), b, top, Word::empty());
                        continue;
                    }
                    let mut cfg = start.clone();
                    let ran = wb.symbols().iter().all(|&s| g.step_in_place(&mut cfg, s).is_ok());
                    let next = if ran { chunks.hat(a, &cfg.stack) } else { None };
                    match (next, &code) {
                        (Some(push), Some(code)) => {
                            m.set_transition(
                                id(q, w),
                                Some(b),
                                top,
                                Transition {
                                    target: id(cfg.state, &Word::empty()),
                                    push: push.into_iter().map(|x| Symbol(x as u16)).collect(),
                                },
                            );
                            m.set_output(id(q, w), b, top, code.codeword(wb.symbols()).clone());
                        }
                        _ => undefined += 1,
                    }
                }
            }
        }
    }
    Ok(TabulatedMachine {
        machine: m,
        chunks: chunk_words(&chunks),
        undefined,
    })
}
