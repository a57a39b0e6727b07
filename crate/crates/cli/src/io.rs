use std::fs;
use std::path::{Path, PathBuf};

use bpd_core::separation::{generate_s, Mode, SeparationSpec};
use bpd_core::{Alphabet, EnumCap, Error, Word};

use crate::CliError;

/// `--input STR`, `--input @FILE` or `--seq sep:K:N`.
pub fn read_input(input: Option<&str>, seq: Option<&str>, alphabet: &Alphabet, cap: EnumCap) -> Result<Word, CliError> {
    match (input, seq) {
        (Some(_), Some(_)) => Err(CliError::usage("give either --input or --seq, not both")),
        (None, None) => Err(CliError::usage("one of --input or --seq is required")),
        (Some(text), None) => {
            let text = match text.strip_prefix('@') {
                Some(path) => fs::read_to_string(path).map_err(|e| CliError::usage(format!("{path}: {e}")))?,
                None => text.to_string(),
            };
            let text = text.trim();
            if text == "~" {
                return Ok(Word::empty());
            }
            Ok(alphabet.word(text)?)
        }
        (None, Some(spec)) => {
            let (k, n) = parse_seq_spec(spec)?;
            if alphabet.chars() != ['0', '1'] {
                return Err(CliError::usage("--seq produces binary text; the alphabet must be 01"));
            }
            let s = generate_s(&SeparationSpec::new(k, Mode::Corrected)?, n, cap)?;
            Ok(s.text().clone())
        }
    }
}

/// `sep:K:N`.
pub fn parse_seq_spec(spec: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::usage(format!("bad sequence spec {spec:?}, expected sep:K:N"));
    let mut parts = spec.split(':');
    if parts.next() != Some("sep") {
        return Err(bad());
    }
    let k = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
    let n = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((k, n))
}

/// `a,b,c` or `step:S`; `None` means the final length only.
pub fn parse_checkpoints(list: Option<&str>, len: usize) -> Result<Vec<usize>, CliError> {
    let Some(list) = list else { return Ok(vec![len]) };
    if let Some(step) = list.strip_prefix("step:") {
        let step: usize = step
            .parse()
            .ok()
            .filter(|&s| s > 0)
            .ok_or_else(|| CliError::usage(format!("bad checkpoint step {step:?}")))?;
        let mut out: Vec<usize> = (0..=len).step_by(step).collect();
        if out.last() != Some(&len) {
            out.push(len);
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    for item in list.split(',') {
        let n: usize = item
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad checkpoint {item:?}")))?;
        if n > len {
            return Err(CliError::usage(format!("checkpoint {n} is past the input length {len}")));
        }
        out.push(n);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Files are held in memory and written only once the command succeeds,
/// so a failing command leaves no partial output behind.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, path: impl Into<PathBuf>, bytes: Vec<u8>) {
        self.files.push((path.into(), bytes));
    }

    pub fn commit(self) -> Result<(), CliError> {
        let mut written: Vec<&Path> = Vec::new();
        for (path, bytes) in &self.files {
            if let Err(e) = fs::write(path, bytes) {
                for p in written {
                    let _ = fs::remove_file(p);
                }
                let _ = fs::remove_file(path);
                return Err(Error::Io(format!("{}: {e}", path.display())).into());
            }
            written.push(path);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_lists() {
        assert_eq!(parse_checkpoints(None, 9).unwrap(), vec![9]);
        assert_eq!(parse_checkpoints(Some("5, 2,5"), 9).unwrap(), vec![2, 5]);
        assert_eq!(parse_checkpoints(Some("step:4"), 9).unwrap(), vec![0, 4, 8, 9]);
        assert_eq!(parse_checkpoints(Some("step:3"), 9).unwrap(), vec![0, 3, 6, 9]);
        assert!(parse_checkpoints(Some("10"), 9).is_err());
        assert!(parse_checkpoints(Some("step:0"), 9).is_err());
    }

    #[test]
    fn seq_specs() {
        assert_eq!(parse_seq_spec("sep:3:12").unwrap(), (3, 12));
        for bad in ["sep:3", "lz:3:4", "sep:3:4:5", "sep:x:4"] {
            assert!(parse_seq_spec(bad).is_err(), "{bad}");
        }
    }
}
