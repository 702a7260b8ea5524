//! `key = value` configuration files.
//!
//! Keys are long flag names without the leading dashes (`M`, `alpha`,
//! `t-max`, `grid-n`, ...). Blank lines and `#` comments are ignored; a value
//! of `true` or `false` switches a bare flag such as `oracle`. The file is
//! expanded into flag tokens placed before the user's own flags, so the
//! command line wins.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected `key = value`, got `{}`", n + 1, raw.trim());
        };
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            bail!("line {}: invalid key `{key}`", n + 1);
        }
        entries.push((key.to_string(), value.to_string()));
    }
    Ok(entries)
}

fn to_tokens(entries: &[(String, String)]) -> Vec<String> {
    let mut tokens = Vec::new();
    for (key, value) in entries {
        match value.as_str() {
            "true" => tokens.push(format!("--{key}")),
            "false" => {}
            _ => tokens.push(format!("--{key}={value}")),
        }
    }
    tokens
}

/// Remove `--config <file>` from `args` and splice the file's settings in
/// right after the subcommand name.
pub fn expand(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut iter = args.into_iter();
    if let Some(program) = iter.next() {
        rest.push(program);
    }
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            path = Some(iter.next().context("--config needs a file name")?);
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(Path::new(&path)).with_context(|| format!("reading config file {path}"))?;
    let tokens = to_tokens(&parse(&text).with_context(|| format!("in config file {path}"))?);
    let at = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|i| i + 2)
        .unwrap_or(rest.len());
    rest.splice(at..at, tokens);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_flags() {
        let entries = parse("# fig 1\nM = 5\nalpha=-0.5  # outside payoff\n\noracle = true\nstrict = false\n").unwrap();
        assert_eq!(to_tokens(&entries), ["--M=5", "--alpha=-0.5", "--oracle"]);
        assert!(parse("alpha 0.5").is_err());
        assert!(parse("= 3").is_err());
    }
}
