//! Command-line workbench: instance files in, verification reports out.

pub mod commands;
pub mod error;
pub mod instance;
pub mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use lca_core::linalg::Tolerance;
use serde_json::{json, Value};

pub use commands::Property;
pub use error::CliError;
pub use report::{Record, Report, Verdict};

#[derive(Debug, Parser)]
#[command(name = "lca", version, about = "Verify induced representations of locally C*-algebras")]
pub struct Cli {
    /// Comparison tolerance; overrides LCA_TOL.
    #[arg(long, global = true, env = "LCA_TOL", default_value_t = 1e-9)]
    pub tol: f64,
    /// Omit the timestamp so reports are byte-identical across runs.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Pretty text instead of JSON.
    #[arg(long, global = true)]
    pub human: bool,
    /// Output path: the induced fragment for `induce`, a copy of the report otherwise.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every validator on the objects of a file.
    Validate { file: PathBuf },
    /// Induce a representation over a module action.
    Induce {
        file: PathBuf,
        /// Module action `A → L_B(E)`.
        #[arg(long)]
        phi: String,
        /// Representation of `B`.
        #[arg(long)]
        rep: String,
    },
    /// Check a property on the contexts of a file or on random instances.
    Check {
        file: Option<PathBuf>,
        #[arg(long, value_enum)]
        property: Property,
        /// Restrict to one named context.
        #[arg(long)]
        context: Option<String>,
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Validate everything and check every context of a file.
    Report {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn echo(cli: &Cli) -> BTreeMap<String, Value> {
    let path = |p: &PathBuf| Value::from(p.display().to_string());
    let mut m = BTreeMap::new();
    match &cli.command {
        Command::Validate { file } => {
            m.insert("subcommand".into(), json!("validate"));
            m.insert("file".into(), path(file));
        }
        Command::Induce { file, phi, rep } => {
            m.insert("subcommand".into(), json!("induce"));
            m.insert("file".into(), path(file));
            m.insert("phi".into(), json!(phi));
            m.insert("rep".into(), json!(rep));
        }
        Command::Check { file, property, context, random, trials, seed } => {
            m.insert("subcommand".into(), json!("check"));
            if let Some(f) = file {
                m.insert("file".into(), path(f));
            }
            m.insert("property".into(), json!(property.as_str()));
            if let Some(c) = context {
                m.insert("context".into(), json!(c));
            }
            m.insert("random".into(), json!(random));
            m.insert("trials".into(), json!(trials));
            m.insert("seed".into(), json!(seed));
        }
        Command::Report { file, seed } => {
            m.insert("subcommand".into(), json!("report"));
            m.insert("file".into(), path(file));
            m.insert("seed".into(), json!(seed));
        }
    }
    if let Some(o) = &cli.out {
        m.insert("out".into(), path(o));
    }
    m
}

fn load(path: &PathBuf, tol: &Tolerance<f64>) -> Result<instance::Instance, CliError> {
    let text = std::fs::read_to_string(path)?;
    instance::Instance::resolve(instance::parse(&text)?, tol)
}

fn execute(cli: &Cli, tol: &Tolerance<f64>) -> Result<Vec<Record>, CliError> {
    match &cli.command {
        Command::Validate { file } => commands::validate(&load(file, tol)?, tol),
        Command::Induce { file, phi, rep } => {
            let (record, fragment) = commands::induce_cmd(&load(file, tol)?, phi, rep, tol)?;
            let mut record = record;
            if let Some(frag) = fragment {
                let text = serde_json::to_string_pretty(&frag).expect("fragment serializes");
                match &cli.out {
                    Some(path) => {
                        std::fs::write(path, text + "\n")?;
                        record = record.detail("output", path.display().to_string());
                    }
                    None => {
                        record = record.detail("output", serde_json::to_value(&frag).expect("fragment serializes"));
                    }
                }
            }
            Ok(vec![record])
        }
        Command::Check { file, property, context, random, trials, seed } => {
            if *random {
                if file.is_some() || context.is_some() {
                    return Err(CliError::Input("--random takes no file or context".into()));
                }
                commands::check_random(*property, *trials, *seed, tol)
            } else {
                let file = file.as_ref().ok_or_else(|| CliError::Input("a file or --random is required".into()))?;
                commands::check_file(&load(file, tol)?, *property, context.as_deref(), *seed, tol)
            }
        }
        Command::Report { file, seed } => commands::report_all(&load(file, tol)?, *seed, tol),
    }
}

/// Runs a parsed command line and returns the finished report.
pub fn run(cli: &Cli) -> Report {
    let timestamp = (!cli.no_timestamp)
        .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
    let mut report = Report::new(echo(cli), cli.tol, timestamp);
    match Tolerance::new(cli.tol).map_err(CliError::from).and_then(|tol| execute(cli, &tol)) {
        Ok(records) => report.records = records,
        Err(e) => report.error = Some(e.to_string()),
    }
    report.finish();
    report
}

/// The text printed to stdout for a finished report.
pub fn render(cli: &Cli, report: &Report) -> String {
    if cli.human {
        report.to_human()
    } else {
        report.to_json() + "\n"
    }
}
