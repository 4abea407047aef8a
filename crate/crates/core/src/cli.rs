//! Command-line front end. Exit codes: 0 success, 1 verification failure,
//! 2 usage or I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cumulants::{self, CumulantKind, StatePair};
use crate::partitions::{self, SetPartition};
use crate::verify::{self, VerifyConfig};
use crate::words::{Alphabet, Domain};
use crate::{CumulantTable, Error, MomentTable, Result};

#[derive(Parser, Debug)]
#[command(name = "cfree", version, about = "Exact cumulants and convolutions via shuffle algebra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Free,
    Boolean,
    Monotone,
    Cfree,
}

impl Family {
    fn single(self) -> Option<CumulantKind> {
        match self {
            Family::Free => Some(CumulantKind::Free),
            Family::Boolean => Some(CumulantKind::Boolean),
            Family::Monotone => Some(CumulantKind::Monotone),
            Family::Cfree => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PartitionFamily {
    Nc,
    Boolean,
    NcIrr,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Moments to cumulants (`--to`), cumulants to moments (`--from`), or
    /// cumulants of one family to another (both).
    Transform {
        #[arg(long)]
        to: Option<Family>,
        #[arg(long)]
        from: Option<Family>,
        /// Moment table, cumulant table, or `{"phi","psi"}` pair for `--to cfree`.
        #[arg(long)]
        input: PathBuf,
        /// The state `ψ` for `--from cfree`.
        #[arg(long)]
        input2: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Additive convolution of two states, or of two state pairs for `cfree`.
    Convolve {
        #[arg(long)]
        kind: Family,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        input2: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the identity suite on seeded random tables.
    Verify {
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Identity names to run, comma separated; default all.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "a,b")]
        alphabet: Vec<String>,
        /// List identity names and exit.
        #[arg(long)]
        list: bool,
        #[arg(long, hide = true)]
        corrupt_oracle: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the partitions of a family, one per line.
    Enumerate {
        #[arg(long)]
        family: PartitionFamily,
        #[arg(long)]
        n: usize,
        /// One JSON object per partition with block kinds, nesting parents
        /// and tree factorial.
        #[arg(long)]
        details: bool,
        /// Print only the count, as JSON.
        #[arg(long)]
        summary: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Mismatch(format!("cannot read {}: {e}", path.display())))
}

fn emit(output: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    let io = |e: std::io::Error| Error::Mismatch(format!("cannot write output: {e}"));
    match output {
        Some(path) => fs::write(path, text).map_err(io),
        None => stdout.write_all(text.as_bytes()).map_err(io),
    }
}

fn with_newline(mut text: String) -> String {
    text.push('\n');
    text
}

fn transform(to: Option<Family>, from: Option<Family>, input: &Path, input2: Option<&Path>) -> Result<String> {
    let text = read(input)?;
    let usage = |m: &str| Err(Error::Mismatch(m.to_string()));
    match (from, to) {
        (None, None) => usage("one of --to or --from is required"),
        (None, Some(Family::Cfree)) => {
            let pair = StatePair::from_json(&text)
                .map_err(|e| Error::Mismatch(format!("--to cfree needs a {{\"phi\",\"psi\"}} state pair: {e}")))?;
            Ok(cumulants::cfree_cumulants(&pair)?.to_json())
        }
        (None, Some(to)) => {
            let phi = MomentTable::from_json(&text)?;
            Ok(cumulants::cumulants(&phi, to.single().unwrap())?.to_json())
        }
        (Some(Family::Cfree), None) => {
            let Some(psi_path) = input2 else {
                return usage("--from cfree needs the state psi in --input2");
            };
            let r = CumulantTable::from_json(&text)?;
            let psi = MomentTable::from_json(&read(psi_path)?)?;
            Ok(cumulants::moments_from_cfree(&r, &psi)?.to_json())
        }
        (Some(from), None) => {
            let table = CumulantTable::from_json(&text)?;
            Ok(cumulants::moments(&table, from.single().unwrap())?.to_json())
        }
        (Some(from), Some(to)) => match (from.single(), to.single()) {
            (Some(from), Some(to)) => {
                let table = CumulantTable::from_json(&text)?;
                Ok(cumulants::convert(&table, from, to)?.to_json())
            }
            _ => usage("conversions with --from and --to take free, boolean or monotone"),
        },
    }
}

fn convolve(kind: Family, input: &Path, input2: &Path) -> Result<String> {
    let (a, b) = (read(input)?, read(input2)?);
    if kind == Family::Cfree {
        let joint = cumulants::convolve_cfree(&StatePair::from_json(&a)?, &StatePair::from_json(&b)?)?;
        return Ok(joint.to_json());
    }
    let (phi1, phi2) = (MomentTable::from_json(&a)?, MomentTable::from_json(&b)?);
    let result = match kind {
        Family::Free => cumulants::convolve_free(&phi1, &phi2)?,
        Family::Boolean => cumulants::convolve_boolean(&phi1, &phi2)?,
        Family::Monotone => cumulants::convolve_monotone(&phi1, &phi2)?,
        Family::Cfree => unreachable!(),
    };
    Ok(result.to_json())
}

#[derive(Serialize)]
struct Details<'a> {
    blocks: &'a SetPartition,
    kinds: Vec<partitions::BlockKind>,
    parents: Vec<Option<usize>>,
    tree_factorial: String,
}

#[derive(Serialize)]
struct Summary {
    family: &'static str,
    n: usize,
    count: usize,
}

fn enumerate(family: PartitionFamily, n: usize, details: bool, summary: bool) -> Result<String> {
    let (name, all) = match family {
        PartitionFamily::Nc => ("nc", partitions::enumerate_nc(n)?),
        PartitionFamily::Boolean => ("boolean", partitions::enumerate_boolean(n)?),
        PartitionFamily::NcIrr => ("nc-irr", partitions::enumerate_nc_irreducible(n)?),
    };
    if summary {
        let s = Summary { family: name, n, count: all.len() };
        return Ok(with_newline(serde_json::to_string(&s)?));
    }
    let mut out = String::new();
    for pi in &all {
        let line = if details {
            let d = Details {
                blocks: pi,
                kinds: partitions::classify_blocks(pi)?,
                parents: partitions::nesting_forest(pi)?.parents().to_vec(),
                tree_factorial: partitions::tree_factorial(pi)?.to_string(),
            };
            serde_json::to_string(&d)?
        } else {
            pi.to_string()
        };
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// Runs one command; returns the exit code.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Transform { to, from, input, input2, output } => {
            let text = transform(to, from, &input, input2.as_deref())?;
            emit(&output, &with_newline(text), stdout)?;
        }
        Command::Convolve { kind, input, input2, output } => {
            let text = convolve(kind, &input, &input2)?;
            emit(&output, &with_newline(text), stdout)?;
        }
        Command::Verify { max_len, seed, only, alphabet, list, corrupt_oracle, output } => {
            if list {
                let names = verify::identity_names().join("\n");
                emit(&output, &with_newline(names), stdout)?;
                return Ok(0);
            }
            let domain = Domain::new(Alphabet::new(&alphabet)?, max_len)?;
            let report = verify::run(&VerifyConfig { domain, seed, only, corrupt_oracle })?;
            emit(&output, &report.to_text(), stdout)?;
            return Ok(if report.passed() { 0 } else { 1 });
        }
        Command::Enumerate { family, n, details, summary, output } => {
            emit(&output, &enumerate(family, n, details, summary)?, stdout)?;
        }
    }
    Ok(0)
}

/// Parses arguments and runs, reporting errors on stderr.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
