use std::path::Path;

use num_rational::Rational64;

use bpd_core::arith::{format_rational, parse_rational, rat};
use bpd_core::compressor::{compress, compression_ratio, il_check, output_lengths_at, write_ratio_csv};
use bpd_core::constructions::{
    compressor_to_gambler, export_block_compressor, export_block_gambler, gambler_to_compressor, TabulatedMachine,
};
use bpd_core::fixtures;
use bpd_core::gale::{capital_at, dim_upper_estimate, format_capital, nonvanishing_transform, write_capital_csv};
use bpd_core::lz::{lz_checkpoints, lz_parse, lz_output_length, write_lz_csv, PointerCode};
use bpd_core::machine::{parse_machine, serialize_machine, validate};
use bpd_core::separation::{
    build_separation_gambler, check_run_safety, generate_s, run_separation, write_stage_csv, write_zone_csv, Mode,
    SeparationSpec,
};
use bpd_core::suite::{self, BaseCompressor, Outcome};
use bpd_core::{Alphabet, BpdMachine, Capital, EnumCap, Error, MachineKind, Precision, Word};

use crate::io::{parse_checkpoints, read_file, read_input, Outputs};
use crate::{Cli, CliError, Command, InputArgs, LzAction, LzCode, ModeArg, PrecisionArg, VerifySuite};

/// Print the full compressor output only up to this many symbols.
const MAX_PRINTED_OUTPUT: usize = 200;

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cap = EnumCap::from_env();
    let alphabet = cli.alphabet.as_deref();
    let mut out = Outputs::default();
    match cli.command {
        Command::Validate { file } => validate_cmd(&file)?,
        Command::RunGambler {
            file,
            input,
            checkpoints,
            csv,
            precision,
        } => {
            let g = load(&file, MachineKind::Gambler)?;
            let w = machine_input(&g, alphabet, &input, cap)?;
            let precision = match precision {
                PrecisionArg::Exact => Precision::Exact,
                PrecisionArg::Log => Precision::LogOnly,
                PrecisionArg::Auto => Precision::default(),
            };
            let points = parse_checkpoints(checkpoints.as_deref(), w.len())?;
            let caps = capital_at(&g, &w, &points, precision)?;
            let (n, last) = caps.last().expect("at least one checkpoint");
            print_capital(*n, last);
            if let Some(path) = csv {
                let mut buf = Vec::new();
                write_capital_csv(&caps, &mut buf)?;
                out.add(path, buf);
            }
        }
        Command::RunCompressor {
            file,
            input,
            checkpoints,
            csv,
        } => {
            let c = load(&file, MachineKind::Compressor)?;
            let w = machine_input(&c, alphabet, &input, cap)?;
            let points = parse_checkpoints(checkpoints.as_deref(), w.len())?;
            let lens = output_lengths_at(&c, w.symbols(), &points)?;
            report_compression(&c, c.input(), &w)?;
            if let Some(path) = csv {
                let mut buf = Vec::new();
                write_ratio_csv(&lens, &mut buf)?;
                out.add(path, buf);
            }
        }
        Command::IlCheck { file, max_len } => {
            let c = load(&file, MachineKind::Compressor)?;
            let r = il_check(&c, max_len, cap)?;
            match r.collision {
                None => println!("IL: yes ({} words up to length {max_len})", r.checked),
                Some(col) => {
                    let a = c.input();
                    println!(
                        "IL: no ({} and {} both give output {} and end in the same state)",
                        a.render_or_lambda(col.first.symbols()),
                        a.render_or_lambda(col.second.symbols()),
                        a.render_or_lambda(col.output.symbols())
                    );
                    return Err(CliError::verification("compressor is not information-lossless"));
                }
            }
        }
        Command::C2g { file, k, export, input } => {
            let c = load(&file, MachineKind::Compressor)?;
            let g = compressor_to_gambler(c.clone(), k)?;
            println!("G(C,{k}): {} base states, block length {k}", c.states().len());
            if has_input(&input) {
                let w = machine_input(&c, alphabet, &input, cap)?;
                let caps = capital_at(&g, &w, &[w.len()], Precision::default())?;
                print_capital(w.len(), &caps[0].1);
            }
            if let Some(path) = export {
                let t = export_block_gambler(&c, k, cap)?;
                print_export(&t);
                out.add(path, serialize_machine(&t.machine).into_bytes());
            }
        }
        Command::G2c {
            file,
            k,
            rho,
            export,
            input,
        } => {
            let mut g = load(&file, MachineKind::Gambler)?;
            if let Some(rho) = rho {
                g = nonvanishing_transform(&g, &parse_rational(&rho)?)?;
            }
            let c = gambler_to_compressor(g.clone(), k)?;
            println!(
                "C(G,{k}): {} base states, codewords at most {} symbols",
                g.states().len(),
                bpd_core::Compressor::max_output_len(&c)?
            );
            if has_input(&input) {
                let w = machine_input(&g, alphabet, &input, cap)?;
                report_compression(&c, g.input(), &w)?;
            }
            if let Some(path) = export {
                let t = export_block_compressor(&c, cap)?;
                print_export(&t);
                out.add(path, serialize_machine(&t.machine).into_bytes());
            }
        }
        Command::Lz { action } => lz_cmd(action, alphabet, cap, &mut out)?,
        Command::GenSeq { k, upto, out: path, zones } => {
            let seq = generate_s(&SeparationSpec::new(k, Mode::Corrected)?, upto, cap)?;
            let mut text = Alphabet::binary().render(seq.text().symbols());
            text.push('\n');
            println!("S through S_{upto} with k={k}: {} symbols, early segment {}", seq.len(), seq.early_len());
            out.add(path, text.into_bytes());
            if let Some(zpath) = zones {
                let mut buf = Vec::new();
                write_zone_csv(seq.spans(), &mut buf)?;
                out.add(zpath, buf);
            }
        }
        Command::SepGambler { k, mode, export } => {
            let g = build_separation_gambler(&SeparationSpec::new(k, mode.into())?);
            println!("separation gambler k={k}: {} states", g.states().len());
            out.add(export, serialize_machine(&g).into_bytes());
        }
        Command::Verify { suite } => verify_cmd(suite, cap, &mut out)?,
    }
    out.commit()
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Corrected => Mode::Corrected,
            ModeArg::Paper => Mode::Paper,
        }
    }
}

fn load(path: &Path, kind: MachineKind) -> Result<BpdMachine, CliError> {
    let m = parse_machine(&read_file(path)?)?;
    if m.kind() != kind {
        return Err(Error::KindMismatch { expected: kind.name() }.into());
    }
    let report = validate(&m);
    if let Some(v) = report.violations.first() {
        return Err(CliError::machine(format!("invalid machine: {v}")));
    }
    Ok(m)
}

fn validate_cmd(path: &Path) -> Result<(), CliError> {
    let m = parse_machine(&read_file(path)?)?;
    let report = validate(&m);
    for w in &report.warnings {
        println!("warning: {w}");
    }
    for v in &report.violations {
        println!("violation: {v}");
    }
    if !report.is_valid() {
        return Err(CliError::machine(format!("{} violation(s)", report.violations.len())));
    }
    println!(
        "valid: {}, {} states, lambda bound {}",
        m.kind().name(),
        m.states().len(),
        bpd_core::Machine::lambda_bound(&m)
    );
    Ok(())
}

fn has_input(input: &InputArgs) -> bool {
    input.input.is_some() || input.seq.is_some()
}

/// Input for a machine, over the machine's own alphabet.
fn machine_input(m: &BpdMachine, alphabet: Option<&str>, input: &InputArgs, cap: EnumCap) -> Result<Word, CliError> {
    if let Some(a) = alphabet {
        if Alphabet::new(a)? != *m.input() {
            return Err(CliError::usage(format!(
                "--alphabet {a} does not match the machine's input alphabet {}",
                m.input().chars().iter().collect::<String>()
            )));
        }
    }
    read_input(input.input.as_deref(), input.seq.as_deref(), m.input(), cap)
}

fn print_capital(n: usize, cap: &Capital) {
    let dim = match dim_upper_estimate(cap, n) {
        Ok(d) => format!("{d:.6}"),
        Err(_) => "undefined".into(),
    };
    let log = if cap.is_zero() { "-inf".into() } else { format!("{:.6}", cap.log()) };
    println!("n={n} capital={} log_capital={log} dim_estimate={dim}", format_capital(cap));
}

fn report_compression<C: bpd_core::Compressor>(c: &C, a: &Alphabet, w: &Word) -> Result<(), CliError> {
    let output = compress(c, w)?;
    let ratio = if w.is_empty() {
        "undefined".to_string()
    } else {
        format_rational(&compression_ratio(c, w)?)
    };
    println!("n={} output_len={} ratio={ratio}", w.len(), output.len());
    if output.len() <= MAX_PRINTED_OUTPUT {
        println!("output: {}", a.render_or_lambda(output.symbols()));
    }
    Ok(())
}

fn print_export(t: &TabulatedMachine) {
    println!(
        "exported: {} states, {} chunk symbols, {} undefined entries",
        t.machine.states().len(),
        t.chunks.len(),
        t.undefined
    );
}

fn lz_cmd(action: LzAction, alphabet: Option<&str>, cap: EnumCap, out: &mut Outputs) -> Result<(), CliError> {
    let a = Alphabet::new(alphabet.unwrap_or("01"))?;
    let code = |c: LzCode| match c {
        LzCode::Fixed => PointerCode::FixedWidth,
        LzCode::Gamma => PointerCode::Gamma,
    };
    match action {
        LzAction::Parse {
            input,
            dump,
            csv,
            code: c,
        } => {
            let w = read_input(input.input.as_deref(), input.seq.as_deref(), &a, cap)?;
            let t = lz_parse(w.symbols(), a.radix());
            println!(
                "n={} phrases={} tail={} output_len={}",
                w.len(),
                t.count(),
                if t.final_incomplete.is_some() { "yes" } else { "no" },
                lz_output_length(&t, a.radix(), code(c))
            );
            if let Some(path) = dump {
                let mut buf = Vec::new();
                t.dump(&a, &mut buf)?;
                out.add(path, buf);
            }
            if let Some(path) = csv {
                let mut buf = Vec::new();
                write_lz_csv(&lz_checkpoints(w.symbols(), a.radix(), code(c), &[w.len()]), &mut buf)?;
                out.add(path, buf);
            }
        }
        LzAction::Ratio {
            input,
            checkpoints,
            csv,
            code: c,
        } => {
            let w = read_input(input.input.as_deref(), input.seq.as_deref(), &a, cap)?;
            if w.is_empty() {
                return Err(Error::Domain("LZ ratio of the empty string".into()).into());
            }
            let points = parse_checkpoints(checkpoints.as_deref(), w.len())?;
            let pts = lz_checkpoints(w.symbols(), a.radix(), code(c), &points);
            let len = lz_checkpoints(w.symbols(), a.radix(), code(c), &[w.len()])[0].2;
            println!("n={} output_len={len} ratio={:.6}", w.len(), len as f64 / w.len() as f64);
            if let Some(path) = csv {
                let mut buf = Vec::new();
                write_lz_csv(&pts, &mut buf)?;
                out.add(path, buf);
            }
        }
    }
    Ok(())
}

fn report(name: &str, o: &Outcome) -> bool {
    println!("{name}: {o}");
    o.pass
}

fn verify_cmd(s: VerifySuite, cap: EnumCap, out: &mut Outputs) -> Result<(), CliError> {
    let ok = match s {
        VerifySuite::Lemmas { max_len } => {
            let all0 = nonvanishing_transform(&fixtures::g_all0(), &rat(1, 2))?;
            let gamblers = [
                ("G_uni", fixtures::g_uni()),
                ("G_all0", fixtures::g_all0()),
                ("G_all0'", all0.clone()),
            ];
            let svals = [0, 1, 2, 4].map(|x| Rational64::new(x, 2));
            let compressors = [
                ("C_id", fixtures::c_id()),
                ("C_drop0", fixtures::c_drop0()),
                ("random", fixtures::random_compressor(7)),
            ];
            let lossless = [
                ("C_id", BaseCompressor::Table(fixtures::c_id())),
                ("C(G_uni,2)", BaseCompressor::Block(gambler_to_compressor(fixtures::g_uni(), 2)?)),
            ];
            let nonvanishing = [("G_uni", fixtures::g_uni()), ("G_all0'", all0)];
            let results = [
                ("fairness", suite::fairness(&gamblers, max_len, &svals)?),
                ("block identities", suite::block_identities(&compressors, &[1, 2, 3], max_len, cap)?),
                ("capital lower bound", suite::capital_lower_bound(&lossless, &[2, 3], max_len, cap)?),
                ("block compressor", suite::block_compressor_suite(&nonvanishing, &[1, 2, 3], max_len, cap)?),
                (
                    "nonvanishing transform",
                    suite::nonvanishing(&gamblers, &[rat(1, 2), rat(3, 4)], max_len, cap)?,
                ),
            ];
            results.iter().fold(true, |acc, (name, o)| report(name, o) && acc)
        }
        VerifySuite::ParseClaim { k, upto } => report("parse claim", &suite::parse_claim(k, upto, cap)?),
        VerifySuite::Separation { k, upto, mode, csv } => {
            let spec = SeparationSpec::new(k, mode.into())?;
            let seq = generate_s(&spec, upto, cap)?;
            let g = build_separation_gambler(&spec);
            let run = run_separation(&g, &seq, Precision::default())?;
            for p in &run.points {
                println!(
                    "S_{}: n={} log2_capital={:.3} expected={} dim_estimate={:.6}",
                    p.n,
                    p.end,
                    p.capital.log2(),
                    p.expected_log2,
                    p.dim_estimate()
                );
            }
            if let Some(path) = csv {
                let mut buf = Vec::new();
                write_stage_csv(&run.points, &mut buf)?;
                out.add(path, buf);
            }
            match spec.mode() {
                Mode::Corrected => {
                    let safe = check_run_safety(&seq);
                    if let Some(v) = &safe {
                        println!("run safety violated: {v:?}");
                    }
                    let exact = run.points.iter().all(|p| p.matches_expected());
                    println!("capital matches closed form: {}", if exact { "yes" } else { "no" });
                    safe.is_none() && exact && run.first_zero.is_none()
                }
                Mode::Paper => report("paper-mode gap", &suite::paper_gap(k, cap)?),
            }
        }
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::verification("suite failed"))
    }
}
