//! Library side of the `carpetq` command-line tool.

pub mod commands;
pub mod document;
pub mod render;

use std::fmt;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "CARPETQ_THREADS";

/// A command failure, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, malformed input files, invalid word subsets: exit 2.
    Input(anyhow::Error),
    /// The output path could not be written: exit 3.
    Output(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Output(_) => 3,
        }
    }

    pub fn input(msg: impl fmt::Display) -> Self {
        Failure::Input(anyhow::anyhow!("{msg}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) | Failure::Output(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<carpet_quant::Error> for Failure {
    fn from(e: carpet_quant::Error) -> Self {
        Failure::Input(e.into())
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Parses `"2,3,5"`, `"1-8"` or a mix such as `"1-4,9"`.
pub fn parse_list(s: &str) -> CliResult<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| Failure::input(format!("bad number {t:?}")));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(Failure::input(format!("empty range {part:?}")));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err(Failure::input("empty list"));
    }
    Ok(out)
}
