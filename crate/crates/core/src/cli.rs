//! The `blab` command line.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::bohr_bourgain::{parse_system, BourgainSystem};
use crate::error::{Error, Result};
use crate::group::{parse_group, Group};
use crate::increment::{run_increment, Mode};
use crate::sets::{
    count_ap3, gen_behrend, gen_greedy_apfree, restricted_sumset, sumset, GSet, ZSet,
};
use crate::spectrum::{bogolioubov_chang, dissociated_basis};
use crate::verify::{run_suite, Suite, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "blab",
    version,
    about = "Additive combinatorics laboratory on finite abelian groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random stream.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Absolute tolerance for numerical checks.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SetSource {
    /// Group descriptor such as `Z101`, `Z2^5` or `Z4xZ6`.
    #[arg(long)]
    pub group: String,
    /// Comma-separated flat indices.
    #[arg(long, conflicts_with = "file")]
    pub set: Option<String>,
    /// File holding the flat indices.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Generator {
    Greedy,
    Behrend,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite; one line per checked instance.
    Verify {
        /// fourier, bohr, bourgain, local, spectrum, freiman, increment or all.
        suite: String,
        /// Instances per suite.
        #[arg(long, default_value_t = 40)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate sumset growth of progression-free sets over N = from, 2·from, …, to.
    Scan {
        #[arg(long, default_value_t = 256)]
        from: u64,
        #[arg(long, default_value_t = 16384)]
        to: u64,
        #[arg(long, value_enum, default_value_t = Generator::Greedy)]
        generator: Generator,
        #[command(flatten)]
        common: Common,
    },
    /// Count three-term progressions.
    Ap3 {
        #[command(flatten)]
        source: SetSource,
        #[command(flatten)]
        common: Common,
    },
    /// `A + B`, or the restricted sumset.
    Sumset {
        #[command(flatten)]
        source: SetSource,
        /// The second summand; defaults to A.
        #[arg(long)]
        other: Option<String>,
        #[arg(long)]
        restricted: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Dissociated basis of the large spectrum and the Bohr system of small doubling.
    Chang {
        #[command(flatten)]
        source: SetSource,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the density-increment iteration.
    Trace {
        #[command(flatten)]
        source: SetSource,
        /// Starting system descriptor; defaults to the trivial system.
        #[arg(long)]
        system: Option<String>,
        #[arg(long, default_value = "practical")]
        mode: String,
        #[arg(long, default_value_t = 32)]
        budget: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Materialize a Bohr set and report its regular dilate.
    Bohr {
        #[arg(long)]
        group: String,
        /// Frequencies as flat indices.
        #[arg(long)]
        set: String,
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Verify { common, .. }
            | Command::Scan { common, .. }
            | Command::Ap3 { common, .. }
            | Command::Sumset { common, .. }
            | Command::Chang { common, .. }
            | Command::Trace { common, .. }
            | Command::Bohr { common, .. } => common,
        }
    }
}

fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse(_)
            | Error::OutOfRange(_)
            | Error::BadModulus(_)
            | Error::OverBudget { .. }
            | Error::EmptySet
    )
}

fn load_set(source: &SetSource) -> Result<(Group, GSet)> {
    let g = parse_group(&source.group)?;
    let text = match (&source.set, &source.file) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?,
        (None, None) => return Err(Error::Parse("one of --set or --file is required".into())),
    };
    let a = GSet::parse(&g, &text)?;
    Ok((g, a))
}

/// The scan rows for `N = from, 2·from, …, ≤ to`.
pub fn scan_csv(from: u64, to: u64, generator: Generator) -> Result<String> {
    if from < 8 || to < from {
        return Err(Error::OutOfRange(format!("scan range {from}..{to}")));
    }
    let mut grid = Vec::new();
    let mut n = from;
    while n <= to {
        grid.push(n);
        n *= 2;
    }
    let rows: Vec<String> = grid
        .par_iter()
        .map(|&n| {
            let a: ZSet = match generator {
                Generator::Greedy => gen_greedy_apfree(n)?,
                Generator::Behrend => gen_behrend(n)?,
            };
            let size = a.elements().len();
            let sums = a.sumset(&a).elements().len();
            let k = sums as f64 / size as f64;
            let l = (size as f64).ln();
            let bound = (l / l.ln().powi(3)).cbrt();
            let free = a.is_ap3_free();
            Ok(format!(
                "{n},{size},{sums},{k:.6},{bound:.6},{:.6},{free}",
                k / bound
            ))
        })
        .collect::<Result<_>>()?;
    let mut out = String::from("N,size,sumset_size,K,bound_value,ratio,is_ap3_free\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

/// Execute a parsed command. Returns the text to emit and whether every
/// check passed.
pub fn execute(command: &Command) -> Result<(String, bool)> {
    let mut out = String::new();
    let mut ok = true;
    match command {
        Command::Verify {
            suite,
            count,
            common,
        } => {
            let suite: Suite = suite.parse()?;
            let config = VerifyConfig {
                seed: common.seed,
                tol: common.tol,
                count: *count,
                ..VerifyConfig::default()
            };
            for line in run_suite(suite, &config)? {
                ok &= line.pass;
                writeln!(out, "{line}").unwrap();
            }
        }
        Command::Scan {
            from,
            to,
            generator,
            ..
        } => {
            out = scan_csv(*from, *to, *generator)?;
        }
        Command::Ap3 { source, .. } => {
            let (_, a) = load_set(source)?;
            let c = count_ap3(&a)?;
            writeln!(out, "total={} nontrivial={}", c.total, c.nontrivial).unwrap();
        }
        Command::Sumset {
            source,
            other,
            restricted,
            ..
        } => {
            let (g, a) = load_set(source)?;
            let b = match other {
                Some(text) => GSet::parse(&g, text)?,
                None => a.clone(),
            };
            let s = if *restricted {
                restricted_sumset(&a, &b)?
            } else {
                sumset(&a, &b)?
            };
            writeln!(out, "{}", s.to_text()).unwrap();
        }
        Command::Chang { source, eps, .. } => {
            let (_, a) = load_set(source)?;
            let r = dissociated_basis(&a, *eps)?;
            let basis: Vec<String> = r.basis.iter().map(|x| x.to_string()).collect();
            writeln!(
                out,
                "alpha={} eps={} spectrum={}",
                r.alpha,
                r.eps,
                r.spectrum.len()
            )
            .unwrap();
            writeln!(
                out,
                "basis={} size_bound={} covered={}",
                basis.join(","),
                r.size_bound,
                r.covered
            )
            .unwrap();
            ok &= r.bounds_ok();
            let k = sumset(&a, &a)?.len() as f64 / a.len() as f64;
            let (system, bg) = bogolioubov_chang(&a, k)?;
            writeln!(out, "K={k} system={system}").unwrap();
            writeln!(
                out,
                "dimension={} dimension_bound={} density={} log_density_bound={} sup={}",
                bg.dimension, bg.dimension_bound, bg.density, bg.log_density_bound, bg.sup_density
            )
            .unwrap();
            ok &= bg.all_ok();
        }
        Command::Trace {
            source,
            system,
            mode,
            budget,
            ..
        } => {
            let (g, a) = load_set(source)?;
            let mode: Mode = mode.parse()?;
            let start = match system {
                Some(text) => parse_system(text)?,
                None => BourgainSystem::trivial(&g),
            };
            let trace = run_increment(&a, &start, mode, *budget)?;
            ok &= trace.invariants_hold() && trace.claim_holds();
            out = trace.to_text();
        }
        Command::Bohr {
            group, set, delta, ..
        } => {
            let g = parse_group(group)?;
            let freqs = GSet::parse(&g, set)?.indices();
            let s = BourgainSystem::bohr(&g, &freqs, *delta)?;
            let b = s.materialize(1.0);
            writeln!(out, "system={s}").unwrap();
            writeln!(
                out,
                "size={} density={} regular={}",
                b.len(),
                s.density(),
                s.is_regular()
            )
            .unwrap();
            writeln!(out, "elements={}", b.to_text()).unwrap();
            let (lambda, reg) = s.regular_dilate()?;
            writeln!(out, "regular_dilate={lambda} size={}", reg.size_at(1.0)).unwrap();
        }
    }
    Ok((out, ok))
}

/// Parse `args`, run, write the output, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok((text, ok)) => {
            let written = match &cli.command.common().out {
                Some(path) => std::fs::write(path, text.as_bytes()),
                None => stdout.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "blab: {e}");
                return EXIT_FAILURE;
            }
            if ok {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "blab: {e}");
            if is_usage(&e) {
                EXIT_USAGE
            } else {
                EXIT_FAILURE
            }
        }
    }
}
