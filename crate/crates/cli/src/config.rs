//! Parameter tables, `key = value` config files and flag overrides.
//!
//! Resolution order is default, then config file, then command-line flag. Every
//! resolved value remembers where it came from so that parse errors can point
//! at the offending line or flag.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::error::CliError;

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
    /// Boolean switch: `--key` alone means `true`.
    pub switch: bool,
}

pub const fn p(key: &'static str, default: &'static str, help: &'static str) -> Param {
    Param { key, default, help, switch: false }
}

pub const fn switch(key: &'static str, help: &'static str) -> Param {
    Param { key, default: "false", help, switch: true }
}

#[derive(Debug, Clone, PartialEq)]
enum Origin {
    Default,
    File { path: String, line: usize },
    Flag,
    Derived,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => write!(f, "default"),
            Origin::File { path, line } => write!(f, "{path} line {line}"),
            Origin::Flag => write!(f, "command line"),
            Origin::Derived => write!(f, "derived"),
        }
    }
}

pub fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

/// Adds one `--flag` per parameter to `cmd`.
pub fn with_params(mut cmd: Command, params: &[Param]) -> Command {
    for prm in params {
        let help = if prm.default.is_empty() {
            prm.help.to_string()
        } else {
            format!("{} [default: {}]", prm.help, prm.default)
        };
        let mut arg = Arg::new(prm.key).long(flag_name(prm.key)).help(help);
        arg = if prm.switch {
            arg.num_args(0..=1).require_equals(true).default_missing_value("true").value_name("BOOL")
        } else {
            arg.value_name("VALUE").allow_hyphen_values(true)
        };
        cmd = cmd.arg(arg);
    }
    cmd
}

pub fn common_args(cmd: Command) -> Command {
    cmd.arg(Arg::new("config").long("config").value_name("FILE").help("key = value parameter file; flags override it"))
        .arg(Arg::new("format").long("format").value_parser(["csv", "json"]).default_value("csv").help("Output format"))
        .arg(Arg::new("output").long("output").short('o').value_name("PATH").help("Output file [default: stdout]"))
        .arg(Arg::new("quiet").long("quiet").short('q').action(ArgAction::SetTrue).help("Suppress the summary on stderr"))
}

#[derive(Debug, Clone)]
pub struct Settings {
    command: String,
    values: BTreeMap<String, (String, Origin)>,
    /// Keys read so far; only these go into the provenance.
    used: RefCell<BTreeSet<String>>,
}

impl Settings {
    /// Resolves `params` from defaults, the optional `--config` file and flags.
    pub fn resolve(command: &str, params: &[Param], matches: &ArgMatches) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, (String, Origin)> =
            params.iter().map(|p| (p.key.to_string(), (p.default.to_string(), Origin::Default))).collect();
        if let Some(path) = matches.get_one::<String>("config") {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config file {path}: {e}")))?;
            for (key, value, line) in parse_config(&text, path)? {
                if !values.contains_key(&key) {
                    return Err(CliError::Config(format!(
                        "{path} line {line}: unknown field '{key}' for `{command}`"
                    )));
                }
                values.insert(key, (value, Origin::File { path: path.clone(), line }));
            }
        }
        for prm in params {
            if let Some(v) = matches.get_one::<String>(prm.key) {
                values.insert(prm.key.to_string(), (v.clone(), Origin::Flag));
            }
        }
        // Anything given explicitly is recorded even if the command ends up ignoring it.
        let used = values.iter().filter(|(_, (_, o))| *o != Origin::Default).map(|(k, _)| k.clone()).collect();
        Ok(Self { command: command.to_string(), values, used: RefCell::new(used) })
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    fn raw(&self, key: &str) -> (&str, &Origin) {
        self.used.borrow_mut().insert(key.to_string());
        let (v, o) = self.values.get(key).unwrap_or_else(|| panic!("parameter {key} is not declared"));
        (v.trim(), o)
    }

    fn mark(&self, key: &str) {
        self.used.borrow_mut().insert(key.to_string());
    }

    fn invalid(&self, key: &str, expected: &str) -> CliError {
        let (v, o) = self.raw(key);
        CliError::Config(format!("invalid value '{v}' for field '{key}' ({o}): expected {expected}"))
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.values.get(key).is_some_and(|(v, _)| !v.trim().is_empty())
    }

    pub fn is_default(&self, key: &str) -> bool {
        self.values.get(key).is_some_and(|(_, o)| *o == Origin::Default)
    }

    pub fn str(&self, key: &str) -> &str {
        self.raw(key).0
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.str(key).parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| self.invalid(key, "a finite number"))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        if self.is_set(key) { self.f64(key).map(Some) } else { Ok(None) }
    }

    pub fn positive(&self, key: &str) -> Result<f64, CliError> {
        let v = self.f64(key)?;
        if v > 0.0 { Ok(v) } else { Err(self.invalid(key, "a positive number")) }
    }

    pub fn u32(&self, key: &str) -> Result<u32, CliError> {
        self.str(key).parse::<u32>().ok().filter(|v| *v > 0).ok_or_else(|| self.invalid(key, "a positive integer"))
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        self.str(key).parse::<usize>().ok().filter(|v| *v > 0).ok_or_else(|| self.invalid(key, "a positive integer"))
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        match self.str(key) {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(self.invalid(key, "true or false")),
        }
    }

    /// Comma-separated numbers; an empty value is an empty list.
    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let s = self.str(key);
        if s.is_empty() {
            return Ok(Vec::new());
        }
        s.split(',')
            .map(|t| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| self.invalid(key, "a comma-separated list of numbers"))
    }

    pub fn choice<'a>(&self, key: &str, options: &[&'a str]) -> Result<&'a str, CliError> {
        let v = self.str(key);
        options.iter().find(|o| **o == v).copied().ok_or_else(|| self.invalid(key, &format!("one of {}", options.join(", "))))
    }

    /// Records a value computed from other parameters, so it appears in the provenance.
    pub fn derive(&mut self, key: &str, value: impl ToString) {
        self.mark(key);
        let entry = self.values.get_mut(key).unwrap_or_else(|| panic!("parameter {key} is not declared"));
        if entry.1 == Origin::Default && entry.0.trim().is_empty() {
            *entry = (value.to_string(), Origin::Derived);
        }
    }

    /// Overwrites a value with one computed from other parameters.
    pub fn force(&mut self, key: &str, value: impl ToString) {
        self.mark(key);
        let entry = self.values.get_mut(key).unwrap_or_else(|| panic!("parameter {key} is not declared"));
        *entry = (value.to_string(), Origin::Derived);
    }

    pub fn config_error(&self, key: &str, msg: &str) -> CliError {
        let (v, o) = self.raw(key);
        CliError::Config(format!("field '{key}' = '{v}' ({o}): {msg}"))
    }

    /// Resolved parameters that were read or given explicitly, for provenance headers.
    pub fn entries(&self) -> Vec<(String, String)> {
        let used = self.used.borrow();
        self.values.iter().filter(|(k, _)| used.contains(*k)).map(|(k, (v, _))| (k.clone(), v.trim().to_string())).collect()
    }
}

/// `key = value` lines; `#` starts a comment. Keys may use `-` or `_`.
pub fn parse_config(text: &str, path: &str) -> Result<Vec<(String, String, usize)>, CliError> {
    let mut out: Vec<(String, String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(CliError::Config(format!("{path} line {line}: expected `key = value`, got '{body}'")));
        };
        let key = k.trim().replace('-', "_");
        if key.is_empty() {
            return Err(CliError::Config(format!("{path} line {line}: missing field name")));
        }
        if let Some((_, _, first)) = out.iter().find(|(k2, _, _)| *k2 == key) {
            return Err(CliError::Config(format!("{path} line {line}: field '{key}' already set on line {first}")));
        }
        out.push((key, v.trim().to_string(), line));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_dashes() {
        let v = parse_config("# top\nomega-hat = 0.8 # trailing\n\n alpha=1.25\n", "c").unwrap();
        assert_eq!(v, vec![("omega_hat".into(), "0.8".into(), 2), ("alpha".into(), "1.25".into(), 4)]);
    }

    #[test]
    fn malformed_line_reports_position() {
        let e = parse_config("alpha = 1\nbogus\n", "run.cfg").unwrap_err();
        assert!(e.to_string().contains("run.cfg line 2"), "{e}");
        let e = parse_config("alpha = 1\nalpha = 2\n", "run.cfg").unwrap_err();
        assert!(e.to_string().contains("already set on line 1"), "{e}");
    }
}
