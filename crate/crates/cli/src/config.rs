//! Sampler configuration files.
//!
//! One `key = value` per line; `#` starts a comment. Every key in [`KEYS`] must be
//! given, by the file or by the matching command-line flag. Flags win.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use dlsm_core::{GibbsConfig, TieRule};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const KEYS: [&str; 12] = [
    "h_star",
    "kappa_mu",
    "kappa_x",
    "a1",
    "a2",
    "n_iter",
    "burn_in",
    "thin",
    "seed",
    "jitter",
    "tie_rule",
    "literal_step4_rate",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub gibbs: GibbsConfig,
    pub tie_rule: TieRule,
}

/// Parses config text into raw key/value pairs.
pub fn parse_text(text: &str, origin: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("{origin}:{}: expected `key = value`", n + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::usage(format!("{origin}:{}: unknown config key `{key}`", n + 1)));
        }
        if out.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(CliError::usage(format!("{origin}:{}: config key `{key}` given twice", n + 1)));
        }
    }
    Ok(out)
}

fn parse_value<T: FromStr>(raw: &BTreeMap<String, String>, key: &str) -> CliResult<T> {
    let value = raw.get(key).ok_or_else(|| CliError::usage(format!("missing config key `{key}`")))?;
    value.parse().map_err(|_| CliError::usage(format!("config key `{key}` has invalid value `{value}`")))
}

/// Merges the file (if any) with flag overrides and validates the result.
pub fn resolve(file: Option<&Path>, overrides: &BTreeMap<String, String>) -> CliResult<RunConfig> {
    let mut raw = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_text(&text, &path.display().to_string())?
        }
        None => BTreeMap::new(),
    };
    for (k, v) in overrides {
        raw.insert(k.clone(), v.clone());
    }
    from_raw(&raw)
}

pub fn from_raw(raw: &BTreeMap<String, String>) -> CliResult<RunConfig> {
    // report the first absent key in documented order
    if let Some(key) = KEYS.iter().find(|k| !raw.contains_key(**k)) {
        return Err(CliError::usage(format!("missing config key `{key}`")));
    }
    let gibbs = GibbsConfig {
        h_star: parse_value(raw, "h_star")?,
        kappa_mu: parse_value(raw, "kappa_mu")?,
        kappa_x: parse_value(raw, "kappa_x")?,
        a1: parse_value(raw, "a1")?,
        a2: parse_value(raw, "a2")?,
        n_iter: parse_value(raw, "n_iter")?,
        burn_in: parse_value(raw, "burn_in")?,
        thin: parse_value(raw, "thin")?,
        seed: parse_value(raw, "seed")?,
        jitter: parse_value(raw, "jitter")?,
        literal_step4_rate: parse_value(raw, "literal_step4_rate")?,
    };
    let tie_rule = parse_value(raw, "tie_rule")?;
    gibbs.validate().map_err(|e| CliError::usage(format!("invalid configuration: {e}")))?;
    Ok(RunConfig { gibbs, tie_rule })
}

impl RunConfig {
    /// Sorted `key=value` lines of the typed values.
    pub fn canonical(&self) -> String {
        let g = &self.gibbs;
        let mut pairs = [
            ("h_star", g.h_star.to_string()),
            ("kappa_mu", g.kappa_mu.to_string()),
            ("kappa_x", g.kappa_x.to_string()),
            ("a1", g.a1.to_string()),
            ("a2", g.a2.to_string()),
            ("n_iter", g.n_iter.to_string()),
            ("burn_in", g.burn_in.to_string()),
            ("thin", g.thin.to_string()),
            ("seed", g.seed.to_string()),
            ("jitter", g.jitter.to_string()),
            ("tie_rule", self.tie_rule.to_string()),
            ("literal_step4_rate", g.literal_step4_rate.to_string()),
        ];
        pairs.sort();
        pairs.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.canonical().as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
