//! `--config` files: one `key = value` per line, spliced in right after the
//! subcommand so that flags given on the command line win.

use std::fs;

use crate::CliError;

pub fn expand(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        if arg == "--config" {
            path = Some(
                it.next()
                    .ok_or_else(|| CliError::usage("--config needs a path"))?,
            );
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::usage(format!("cannot read config {path}: {e}")))?;
    let flags = parse(&text).map_err(|msg| CliError::usage(format!("{path}: {msg}")))?;
    let at = 2.min(rest.len());
    rest.splice(at..at, flags);
    Ok(rest)
}

fn parse(text: &str) -> Result<Vec<String>, String> {
    let mut flags = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        match value {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            _ => {
                flags.push(format!("--{key}"));
                flags.push(value.to_string());
            }
        }
    }
    Ok(flags)
}
