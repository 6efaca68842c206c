//! `baker-lab <command> --config <path> [--key value ...]`
//!
//! Five batch commands over the core library: `render` (escape-time
//! phase portrait), `trace` (fixed-point continuation CSV), `perturb`
//! (ray-rescaling sweep CSV), `classify` (Baker-domain step-distance
//! report), and `verify` (the full property battery).
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 unwritable output,
//! 3 continuation branch lost (partial CSV written), 4 classification seed
//! rejected by the oracle, 5 verification failure.

pub mod commands;
pub mod config;
pub mod format;

use std::path::PathBuf;

use config::Config;

#[derive(Debug)]
pub enum CliError {
    InvalidConfig(String),
    Unwritable(String, String),
    BranchLost(String),
    SeedRejected(String),
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidConfig(_) => 1,
            CliError::Unwritable(_, _) => 2,
            CliError::BranchLost(_) => 3,
            CliError::SeedRejected(_) => 4,
            CliError::VerifyFailed(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
            CliError::Unwritable(path, err) => write!(f, "cannot write {path}: {err}"),
            CliError::BranchLost(msg) => write!(f, "{msg}"),
            CliError::SeedRejected(msg) => write!(f, "{msg}"),
            CliError::VerifyFailed(n) => write!(f, "{n} verification check(s) failed"),
        }
    }
}

const USAGE: &str = "usage: baker-lab <render|trace|perturb|classify|verify> \
[--config <path>] [--key value ...]";

/// Parses arguments, runs the command, and returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    match run_inner(args) {
        Ok(Some(line)) => {
            println!("{line}");
            0
        }
        Ok(None) => 0,
        Err(err) => {
            eprintln!("baker-lab: {err}");
            err.exit_code()
        }
    }
}

fn run_inner(args: &[String]) -> Result<Option<String>, CliError> {
    let Some(command) = args.first() else {
        return Err(CliError::InvalidConfig(USAGE.into()));
    };
    let config = parse_flags(&args[1..])?;
    config.check_command(command)?;
    match command.as_str() {
        "render" => commands::render(&config),
        "trace" => commands::trace(&config),
        "perturb" => commands::perturb(&config),
        "classify" => commands::classify(&config),
        "verify" => commands::verify(&config),
        other => Err(CliError::InvalidConfig(format!(
            "unknown command `{other}`; {USAGE}"
        ))),
    }
}

/// `--config <path>` loads a file; every other `--key value` pair overrides
/// one configuration key.
fn parse_flags(rest: &[String]) -> Result<Config, CliError> {
    let mut overrides: Vec<(String, String)> = Vec::new();
    let mut config_path: Option<PathBuf> = None;
    let mut it = rest.iter();
    while let Some(flag) = it.next() {
        let Some(key) = flag.strip_prefix("--") else {
            return Err(CliError::InvalidConfig(format!(
                "expected `--key value`, got `{flag}`"
            )));
        };
        let Some(value) = it.next() else {
            return Err(CliError::InvalidConfig(format!("flag `{flag}` needs a value")));
        };
        if key == "config" {
            config_path = Some(PathBuf::from(value));
        } else {
            overrides.push((key.to_string(), value.clone()));
        }
    }
    let mut config = match config_path {
        Some(path) => Config::from_file(&path)?,
        None => Config::default(),
    };
    for (key, value) in overrides {
        config.set(&key, &value);
    }
    Ok(config)
}
