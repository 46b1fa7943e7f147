//! The `xprlab` command line: one subcommand per experiment, JSON on stdout,
//! diagnostics on stderr.
//!
//! Exit codes: 0 when the verdict is a pass or the computation succeeded,
//! 1 when a certificate fails or a search or fit comes back empty, 2 on
//! usage or input errors.

mod commands;
pub mod config;
pub mod plot;
pub mod suite;

use clap::Parser;
use serde_json::{json, Value};

pub use config::ExperimentConfig;
pub use plot::emit_plot_data;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{message}")]
    Failed { message: String, detail: Value },
}

impl CliError {
    pub fn failed(e: impl std::fmt::Display) -> Self {
        CliError::Failed { message: e.to_string(), detail: Value::Null }
    }

    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Failed { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn error_outcome(e: &CliError, config: Option<&ExperimentConfig>, stderr: String) -> Outcome {
    let mut body = json!({ "pass": false, "error": e.to_string() });
    if let CliError::Failed { detail, .. } = e {
        if !detail.is_null() {
            body["detail"] = detail.clone();
        }
    }
    if let Some(c) = config {
        body["provenance"] = c.provenance();
    }
    Outcome { code: e.code(), stdout: format!("{body:#}\n"), stderr }
}

/// Runs one command line (program name first) to completion.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match config::expand_config(args) {
        Ok(a) => a,
        Err(e) => return error_outcome(&e, None, format!("error: {e}\n")),
    };
    let cli = match commands::Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { code: 0, stdout: text, stderr: String::new() };
            }
            let err = CliError::Usage(text.lines().next().unwrap_or("usage error").to_string());
            return error_outcome(&err, None, text);
        }
    };
    let bits = cli.bits.unwrap_or(xprlab_bignum::DEFAULT_BITS);
    if !(32..=xprlab_bignum::precision_ceiling()).contains(&bits) {
        let err = CliError::Usage(format!("--bits {bits} outside 32..={}", xprlab_bignum::precision_ceiling()));
        return error_outcome(&err, None, format!("error: {err}\n"));
    }
    xprlab_bignum::set_default_bits(bits);
    let config = ExperimentConfig {
        command: cli.command.path(),
        argv: config::pin(args, cli.seed, bits),
        seed: cli.seed,
        bits,
        output: cli.out.clone(),
    };
    match commands::execute(&cli.command, &config) {
        Ok(report) => {
            let mut body = report.body;
            body["pass"] = Value::Bool(report.pass);
            body["provenance"] = config.provenance();
            let text = format!("{body:#}\n");
            if let Some(path) = &config.output {
                if let Err(e) = std::fs::write(path, &text) {
                    let err = CliError::Input(format!("--out {}: {e}", path.display()));
                    return error_outcome(&err, Some(&config), format!("error: {err}\n"));
                }
            }
            Outcome { code: if report.pass { 0 } else { 1 }, stdout: text, stderr: String::new() }
        }
        Err(e) => error_outcome(&e, Some(&config), format!("error: {e}\n")),
    }
}
