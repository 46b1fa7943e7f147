//! Flag files and the provenance block attached to every result.

use std::path::PathBuf;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// Everything needed to rerun an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Subcommand path, e.g. `["certify", "det"]`.
    pub command: Vec<String>,
    /// Full argument vector with `--config` expanded and `--seed`/`--bits` pinned.
    pub argv: Vec<String>,
    pub seed: u64,
    pub bits: u32,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn provenance(&self) -> Value {
        serde_json::json!({
            "tool": "xprlab",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "bits": self.bits,
            "command": self.argv,
        })
    }
}

fn has_flag(args: &[String], name: &str) -> bool {
    let long = format!("--{name}");
    let eq = format!("--{name}=");
    args.iter().any(|a| *a == long || a.starts_with(&eq))
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn flag_value(v: &Value) -> String {
    match v {
        Value::Array(items) if items.iter().all(|i| scalar(i).is_some()) => {
            items.iter().filter_map(scalar).collect::<Vec<_>>().join(",")
        }
        other => scalar(other).unwrap_or_else(|| other.to_string()),
    }
}

const SUBCOMMANDS: [&str; 8] = ["kronecker", "certify", "limits", "net", "fit", "bound", "suite", "help"];

/// Replaces `--config <path>` by the flags stored in the JSON object at `path`.
///
/// Keys are long flag names; flags already on the command line win. A
/// `"command"` array supplies the subcommand path when none is given.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or_else(|| CliError::Usage("--config needs a path".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Input(format!("--config {path}: {e}")))?;
    let map: Map<String, Value> =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("--config {path}: {e}")))?;
    let positional = rest.iter().skip(1).any(|a| SUBCOMMANDS.contains(&a.as_str()));
    if let Some(Value::Array(cmd)) = map.get("command") {
        if !positional {
            let words: Vec<String> = cmd.iter().filter_map(scalar).collect();
            rest.splice(1..1, words);
        }
    }
    for (key, value) in &map {
        if key == "command" || has_flag(&rest, key) {
            continue;
        }
        match value {
            Value::Bool(true) => rest.push(format!("--{key}")),
            Value::Bool(false) | Value::Null => {}
            v => {
                rest.push(format!("--{key}"));
                rest.push(flag_value(v));
            }
        }
    }
    Ok(rest)
}

/// Appends `--seed` and `--bits` when they were implicit, so the recorded
/// command reproduces the run without the environment.
pub fn pin(mut args: Vec<String>, seed: u64, bits: u32) -> Vec<String> {
    if !has_flag(&args, "seed") {
        args.extend(["--seed".into(), seed.to_string()]);
    }
    if !has_flag(&args, "bits") {
        args.extend(["--bits".into(), bits.to_string()]);
    }
    args
}
