//! Path dumps: one line of `0`/`1` characters plus a JSON sidecar.

use std::fs;
use std::io;
use std::path::{Path as FsPath, PathBuf};

use renewal_core::{LawSpec, Path, StartMode};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub seed: u64,
    pub mode: StartMode,
    pub law: LawSpec,
}

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed sidecar: {0}")]
    Json(#[from] serde_json::Error),
    #[error("path line contains {0:?}; only '0' and '1' are allowed")]
    BadSymbol(char),
}

pub fn bits_line(bits: &[u8]) -> String {
    let mut s: String = bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
    s.push('\n');
    s
}

pub fn parse_bits(line: &str) -> Result<Vec<u8>, DumpError> {
    line.trim_end_matches(['\n', '\r'])
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(DumpError::BadSymbol(other)),
        })
        .collect()
}

/// `<file>.json`.
pub fn sidecar_path(file: &FsPath) -> PathBuf {
    let mut name = file.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

pub fn sidecar_json(path: &Path, law: &LawSpec) -> String {
    let side = Sidecar {
        seed: path.seed,
        mode: path.mode,
        law: law.clone(),
    };
    serde_json::to_string(&side).expect("sidecar serializes")
}

pub fn write_dump(path: &Path, law: &LawSpec, file: &FsPath) -> Result<PathBuf, DumpError> {
    let side = sidecar_path(file);
    let io = |p: &FsPath| {
        let p = p.to_path_buf();
        move |source| DumpError::Io { path: p, source }
    };
    fs::write(file, bits_line(&path.bits)).map_err(io(file))?;
    fs::write(&side, sidecar_json(path, law) + "\n").map_err(io(&side))?;
    Ok(side)
}

pub fn read_dump(file: &FsPath) -> Result<(Vec<u8>, Sidecar), DumpError> {
    let io = |p: &FsPath| {
        let p = p.to_path_buf();
        move |source| DumpError::Io { path: p, source }
    };
    let bits = parse_bits(&fs::read_to_string(file).map_err(io(file))?)?;
    let side = sidecar_path(file);
    let sidecar = serde_json::from_str(&fs::read_to_string(&side).map_err(io(&side))?)?;
    Ok((bits, sidecar))
}
