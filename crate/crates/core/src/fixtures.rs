//! Small named machines used by tests, the acceptance suite and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{int, rat};
use crate::machine::{BpdMachine, MachineKind};

fn single_state(kind: MachineKind) -> BpdMachine {
    let mut m = BpdMachine::with_names(kind, "01", "z", &["q"], "q", 'z', 0).expect("fixture");
    m.add_trans("q", Some('0'), 'z', "q", "z").expect("fixture");
    m.add_trans("q", Some('1'), 'z', "q", "z").expect("fixture");
    m
}

/// One state, fair bets.
pub fn g_uni() -> BpdMachine {
    let mut m = single_state(MachineKind::Gambler);
    m.add_bet("q", 'z', vec![rat(1, 2), rat(1, 2)]).expect("fixture");
    m
}

/// One state, everything on 0.
pub fn g_all0() -> BpdMachine {
    let mut m = single_state(MachineKind::Gambler);
    m.add_bet("q", 'z', vec![int(1), int(0)]).expect("fixture");
    m
}

/// Copies its input.
pub fn c_id() -> BpdMachine {
    let mut m = single_state(MachineKind::Compressor);
    m.add_output("q", '0', 'z', "0").expect("fixture");
    m.add_output("q", '1', 'z', "1").expect("fixture");
    m
}

/// Deletes every 0; not information-lossless.
pub fn c_drop0() -> BpdMachine {
    let mut m = single_state(MachineKind::Compressor);
    m.add_output("q", '0', 'z', "").expect("fixture");
    m.add_output("q", '1', 'z', "1").expect("fixture");
    m
}

/// Pushes every input symbol; fair bets.
pub fn push_machine() -> BpdMachine {
    let mut m =
        BpdMachine::with_names(MachineKind::Gambler, "01", "z01", &["q"], "q", 'z', 0).expect("fixture");
    for top in ['z', '0', '1'] {
        for b in ['0', '1'] {
            m.add_trans("q", Some(b), top, "q", &format!("{b}{top}")).expect("fixture");
        }
        m.add_bet("q", top, vec![rat(1, 2), rat(1, 2)]).expect("fixture");
    }
    m
}

/// A lambda-transition from `q` to `r`, then `r` loops on 0 only.
pub fn lambda_machine() -> BpdMachine {
    let mut m =
        BpdMachine::with_names(MachineKind::Gambler, "01", "z", &["q", "r"], "q", 'z', 1).expect("fixture");
    m.add_trans("q", None, 'z', "r", "z").expect("fixture");
    m.add_trans("r", Some('0'), 'z', "r", "z").expect("fixture");
    m.add_bet("q", 'z', vec![rat(1, 2), rat(1, 2)]).expect("fixture");
    m.add_bet("r", 'z', vec![rat(1, 2), rat(1, 2)]).expect("fixture");
    m
}

/// A seeded random valid 2-state compressor with lambda bound 1.
///
/// Only `s0` may have lambda-pairs and lambda-transitions always enter `s1`,
/// which has none, so chains never exceed one step. Every pair gets outputs
/// for both symbols.
pub fn random_compressor(seed: u64) -> BpdMachine {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = BpdMachine::with_names(MachineKind::Compressor, "01", "zab", &["s0", "s1"], "s0", 'z', 1)
        .expect("fixture");
    let states = ["s0", "s1"];
    for q in states {
        for top in ['z', 'a', 'b'] {
            let pushes: Vec<String> = if top == 'z' {
                vec!["z".into(), "az".into(), "bz".into(), "abz".into()]
            } else {
                let t = top.to_string();
                vec!["~".into(), t.clone(), format!("a{t}"), format!("b{t}"), "a".into(), "b".into()]
            };
            let pick = |rng: &mut ChaCha8Rng| {
                let p = &pushes[rng.gen_range(0..pushes.len())];
                if p == "~" { String::new() } else { p.clone() }
            };
            if q == "s0" && rng.gen_bool(0.25) {
                let push = pick(&mut rng);
                m.add_trans(q, None, top, "s1", &push).expect("fixture");
            } else {
                for b in ['0', '1'] {
                    let target = states[rng.gen_range(0..2)];
                    let push = pick(&mut rng);
                    m.add_trans(q, Some(b), top, target, &push).expect("fixture");
                }
            }
            for b in ['0', '1'] {
                let len = rng.gen_range(0..3);
                let out: String = (0..len).map(|_| if rng.gen_bool(0.5) { '1' } else { '0' }).collect();
                m.add_output(q, b, top, &out).expect("fixture");
            }
        }
    }
    m
}
