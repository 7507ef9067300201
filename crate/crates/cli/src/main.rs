//! `quasilin` command-line front end.

// `!(x > 0.0)` style checks reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};
use quasilin::Execution;

use commands::{CommandDef, Ctx, COMMANDS};
use config::{ConfigFile, Settings};
use output::OutDir;

/// Error carrying the process exit code: 1 invalid input, 2 nonconvergence, 3 tolerance or internal.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }

    pub fn nonconvergence(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }
}

impl From<quasilin::Error> for CliError {
    fn from(e: quasilin::Error) -> Self {
        let message = e.to_string();
        if e.is_nonconvergence() {
            CliError::nonconvergence(message)
        } else if matches!(e, quasilin::Error::Tolerance(_)) {
            CliError::internal(message)
        } else {
            CliError::invalid(message)
        }
    }
}

fn cli() -> Command {
    let mut app = Command::new("quasilin")
        .about("Liouville classification, Bernstein frames and radial solvers for -Δ_m u = u^q |∇u|^p")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("json").long("json").global(true).action(ArgAction::SetTrue).help("Print JSON instead of a table"),
        )
        .arg(Arg::new("out").long("out").global(true).value_name("DIR").help("Write CSV/SVG artifacts to DIR"))
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .help("Read `key = value` settings from FILE"),
        )
        .arg(
            Arg::new("jobs")
                .long("jobs")
                .global(true)
                .value_name("N")
                .help("Worker threads (0 = all cores, 1 = sequential)"),
        )
        .arg(Arg::new("seed").long("seed").global(true).value_name("N").help("Seed for randomized checks (default 0)"));
    for cmd in COMMANDS {
        let mut sub = Command::new(cmd.name).about(cmd.about);
        for (key, help) in cmd.keys {
            sub = sub.arg(Arg::new(*key).long(*key).value_name("VALUE").allow_hyphen_values(true).help(*help));
        }
        app = app.subcommand(sub);
    }
    app
}

fn global<T: std::str::FromStr>(matches: &ArgMatches, file: &ConfigFile, key: &str) -> Result<Option<T>, CliError> {
    let Some(raw) = matches.get_one::<String>(key).map(String::as_str).or_else(|| file.get(key)) else {
        return Ok(None);
    };
    raw.parse().map(Some).map_err(|_| CliError::invalid(format!("--{key} expects a nonnegative integer (got `{raw}`)")))
}

fn execution(jobs: Option<usize>) -> Result<Execution, CliError> {
    match jobs {
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::internal(format!("cannot start thread pool: {e}")))?;
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Execution::Sequential),
        None => Ok(Execution::default()),
    }
}

fn run(cmd: &CommandDef, matches: &ArgMatches) -> Result<String, CliError> {
    let file = match matches.get_one::<String>("config") {
        Some(path) => ConfigFile::load(&PathBuf::from(path))?,
        None => ConfigFile::default(),
    };
    let keys: Vec<&str> = cmd.keys.iter().map(|(k, _)| *k).collect();
    file.check_keys(cmd.name, &keys)?;
    let settings = Settings::resolve(&keys, matches, &file);
    let out = match matches.get_one::<String>("out") {
        Some(dir) => Some(OutDir::new(&PathBuf::from(dir))?),
        None => None,
    };
    let ctx = Ctx {
        json: matches.get_flag("json"),
        out,
        seed: global(matches, &file, "seed")?.unwrap_or(0),
        execution: execution(global(matches, &file, "jobs")?)?,
    };
    (cmd.run)(&settings, &ctx)
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let cmd = COMMANDS.iter().find(|c| c.name == name).expect("every subcommand is in the table");
    match run(cmd, sub) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            let nl = if text.ends_with('\n') { "" } else { "\n" };
            // a closed pipe (e.g. `| head`) is not a failure of the computation
            let _ = write!(stdout, "{text}{nl}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
