use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_rational::BigRational;

use super::{BpdMachine, MachineKind, StateId};
use crate::alphabet::Symbol;

/// A rule the machine breaks; any violation makes the machine invalid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Both a lambda-transition and an input transition on `(state, top)`.
    Exclusivity { state: String, top: char },
    /// A transition on the bottom symbol that does not keep it at the bottom.
    BottomPopped {
        state: String,
        input: Option<char>,
        push: String,
    },
    /// The bottom symbol pushed above the bottom.
    BottomPushed {
        state: String,
        input: Option<char>,
        top: char,
        push: String,
    },
    BetMalformed {
        state: String,
        top: char,
        probs: Vec<String>,
    },
    /// A chain of `lambda_bound + 1` lambda-transitions, listed as `(state, top)`.
    LambdaChain { chain: Vec<(String, char)> },
    /// Bets on a compressor or outputs on a gambler.
    KindMismatch(String),
}

/// Harmless for validity, but a run may fail on these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    NotInputTotal {
        state: String,
        top: char,
        missing: Vec<char>,
    },
    MissingBet { state: String, top: char },
    MissingOutput { state: String, input: char, top: char },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lam = |i: &Option<char>| i.map(String::from).unwrap_or_else(|| "~".into());
        match self {
            Violation::Exclusivity { state, top } => {
                write!(f, "exclusivity: ({state}, {top}) has lambda and input transitions")
            }
            Violation::BottomPopped { state, input, push } => write!(
                f,
                "bottom: ({state}, {}, bottom) pushes {push}, losing the bottom symbol",
                lam(input)
            ),
            Violation::BottomPushed { state, input, top, push } => write!(
                f,
                "bottom: ({state}, {}, {top}) pushes {push}, placing the bottom symbol above the bottom",
                lam(input)
            ),
            Violation::BetMalformed { state, top, probs } => {
                write!(f, "bet: ({state}, {top}) -> {} is not a probability vector", probs.join(" "))
            }
            Violation::LambdaChain { chain } => {
                let c: Vec<String> = chain.iter().map(|(q, a)| format!("({q},{a})")).collect();
                write!(f, "lambda-bound: chain {} exceeds the bound", c.join(" -> "))
            }
            Violation::KindMismatch(msg) => write!(f, "kind: {msg}"),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NotInputTotal { state, top, missing } => write!(
                f,
                "not input-total: ({state}, {top}) has no transition on {}",
                missing.iter().collect::<String>()
            ),
            Warning::MissingBet { state, top } => write!(f, "no bet at ({state}, {top})"),
            Warning::MissingOutput { state, input, top } => {
                write!(f, "no output at ({state}, {input}, {top})")
            }
        }
    }
}

/// Stack tops that may be exposed after popping `popped`: over-approximated
/// as every symbol, except that the bottom has nothing below it.
fn exposed_after_pop(m: &BpdMachine, popped: Symbol) -> Vec<Symbol> {
    if popped == m.bottom {
        Vec::new()
    } else {
        m.stack.symbols().collect()
    }
}

fn successor_tops(m: &BpdMachine, top: Symbol, push: &[Symbol]) -> Vec<Symbol> {
    match push.first() {
        Some(&s) => vec![s],
        None => exposed_after_pop(m, top),
    }
}

/// `(state, top)` pairs from which an input symbol may be read, by abstract
/// exploration from the start configuration.
fn reachable_pairs(m: &BpdMachine) -> BTreeSet<(StateId, Symbol)> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert((m.start, m.bottom));
    queue.push_back((m.start, m.bottom));
    while let Some((q, a)) = queue.pop_front() {
        for ((sq, _input, sa), t) in m.transitions.range((q, None, a)..) {
            if *sq != q {
                break;
            }
            if *sa != a {
                continue;
            }
            for next in successor_tops(m, a, &t.push) {
                if seen.insert((t.target, next)) {
                    queue.push_back((t.target, next));
                }
            }
        }
    }
    seen
}

fn lambda_chains(m: &BpdMachine, start: (StateId, Symbol), out: &mut Vec<Vec<(StateId, Symbol)>>) {
    let limit = m.lambda_bound + 1;
    let mut stack = vec![vec![start]];
    while let Some(path) = stack.pop() {
        let &(q, a) = path.last().unwrap();
        let Some(t) = m.transitions.get(&(q, None, a)) else {
            continue;
        };
        for next in successor_tops(m, a, &t.push) {
            let mut p = path.clone();
            p.push((t.target, next));
            if p.len() > limit {
                out.push(p);
                return;
            }
            stack.push(p);
        }
    }
}

/// Checks the structural restrictions; never fails, lists every violation.
pub fn validate(m: &BpdMachine) -> ValidationReport {
    let mut report = ValidationReport::default();
    let name = |q: StateId| m.state_name(q).to_string();
    let sc = |s: Symbol| m.stack.char_of(s);
    let ic = |s: Symbol| m.input.char_of(s);

    for q in (0..m.states.len()).map(StateId) {
        for a in m.stack.symbols() {
            let has_lambda = m.transitions.contains_key(&(q, None, a));
            let has_input = m.input.symbols().any(|b| m.transitions.contains_key(&(q, Some(b), a)));
            if has_lambda && has_input {
                report.violations.push(Violation::Exclusivity { state: name(q), top: sc(a) });
            }
        }
    }

    for (&(q, input, a), t) in &m.transitions {
        let push = m.stack.render_or_lambda(&t.push);
        let input_c = input.map(ic);
        let bottoms = t.push.iter().filter(|&&s| s == m.bottom).count();
        if a == m.bottom {
            if t.push.last() != Some(&m.bottom) || bottoms != 1 {
                report.violations.push(Violation::BottomPopped {
                    state: name(q),
                    input: input_c,
                    push,
                });
            }
        } else if bottoms > 0 {
            report.violations.push(Violation::BottomPushed {
                state: name(q),
                input: input_c,
                top: sc(a),
                push,
            });
        }
    }

    match m.kind {
        MachineKind::Gambler => {
            if !m.outputs.is_empty() {
                report
                    .violations
                    .push(Violation::KindMismatch("gambler has output entries".into()));
            }
            for (&(q, a), bet) in &m.bets {
                if bet.len() != m.input.len() || !bet.is_normalized() {
                    report.violations.push(Violation::BetMalformed {
                        state: name(q),
                        top: sc(a),
                        probs: bet.probs().iter().map(BigRational::to_string).collect(),
                    });
                }
            }
        }
        MachineKind::Compressor => {
            if !m.bets.is_empty() {
                report
                    .violations
                    .push(Violation::KindMismatch("compressor has bet entries".into()));
            }
        }
    }

    let reachable = reachable_pairs(m);
    let mut chains = Vec::new();
    for &pair in &reachable {
        lambda_chains(m, pair, &mut chains);
    }
    chains.sort();
    chains.dedup();
    for chain in chains {
        report.violations.push(Violation::LambdaChain {
            chain: chain.into_iter().map(|(q, a)| (name(q), sc(a))).collect(),
        });
    }

    for &(q, a) in &reachable {
        let is_lambda_pair = m.transitions.contains_key(&(q, None, a));
        if !is_lambda_pair {
            let missing: Vec<char> = m
                .input
                .symbols()
                .filter(|&b| !m.transitions.contains_key(&(q, Some(b), a)))
                .map(ic)
                .collect();
            if !missing.is_empty() {
                report.warnings.push(Warning::NotInputTotal {
                    state: name(q),
                    top: sc(a),
                    missing,
                });
            }
        }
        match m.kind {
            MachineKind::Gambler => {
                if !m.bets.contains_key(&(q, a)) {
                    report.warnings.push(Warning::MissingBet { state: name(q), top: sc(a) });
                }
            }
            MachineKind::Compressor => {
                for b in m.input.symbols() {
                    if !m.outputs.contains_key(&(q, b, a)) {
                        report.warnings.push(Warning::MissingOutput {
                            state: name(q),
                            input: ic(b),
                            top: sc(a),
                        });
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::fixtures;
    use crate::machine::MachineKind;

    #[test]
    fn smallest_gambler_is_valid() {
        let r = validate(&fixtures::g_uni());
        assert!(r.is_valid(), "{r:?}");
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn fixtures_are_valid() {
        for m in [
            fixtures::g_all0(),
            fixtures::c_id(),
            fixtures::c_drop0(),
            fixtures::push_machine(),
            fixtures::lambda_machine(),
        ] {
            let r = validate(&m);
            assert!(r.is_valid(), "{r:?}");
        }
        for seed in 0..50 {
            let r = validate(&fixtures::random_compressor(seed));
            assert!(r.is_valid(), "seed {seed}: {r:?}");
            assert!(r.warnings.is_empty(), "seed {seed}: {r:?}");
        }
    }

    #[test]
    fn exclusivity_violation() {
        let mut m = fixtures::g_uni();
        m.add_trans("q", None, 'z', "q", "z").unwrap();
        let r = validate(&m);
        assert!(r
            .violations
            .contains(&Violation::Exclusivity { state: "q".into(), top: 'z' }));
    }

    #[test]
    fn bottom_pop_violation() {
        let mut m = fixtures::g_uni();
        m.add_trans("q", Some('0'), 'z', "q", "").unwrap();
        let r = validate(&m);
        assert!(r.violations.contains(&Violation::BottomPopped {
            state: "q".into(),
            input: Some('0'),
            push: "~".into(),
        }));
    }

    #[test]
    fn bottom_push_violation() {
        let mut m = fixtures::push_machine();
        m.add_trans("q", Some('0'), '1', "q", "z1").unwrap();
        let r = validate(&m);
        assert!(matches!(r.violations[..], [Violation::BottomPushed { top: '1', .. }]));
    }

    #[test]
    fn malformed_bet() {
        let mut m = fixtures::g_uni();
        m.add_bet("q", 'z', vec![rat(1, 2), rat(2, 5)]).unwrap();
        let r = validate(&m);
        assert!(matches!(r.violations[..], [Violation::BetMalformed { .. }]));
    }

    #[test]
    fn lambda_cycle_exceeds_bound() {
        let mut m = BpdMachine::with_names(MachineKind::Gambler, "01", "z", &["p", "q"], "p", 'z', 1)
            .unwrap();
        m.add_trans("p", None, 'z', "q", "z").unwrap();
        m.add_trans("q", None, 'z', "p", "z").unwrap();
        let r = validate(&m);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::LambdaChain { chain } if chain.len() == 3)));
    }

    #[test]
    fn non_total_is_a_warning() {
        let m = fixtures::lambda_machine();
        let r = validate(&m);
        assert!(r.is_valid());
        assert!(r.warnings.iter().any(|w| matches!(w, Warning::NotInputTotal { missing, .. } if missing == &vec!['1'])));
    }
}
