//! `key=value` config files. Keys are long flag names; the file's values are
//! spliced into the argument list ahead of the real flags, so anything given
//! on the command line wins.

use std::ffi::OsString;

use anyhow::{bail, Context, Result};
use clap::Command;

/// Parses `key=value` lines. `#` starts a comment line; blank lines are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key=value, got {raw:?}", i + 1);
        };
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Position of the subcommand in `args` and the `--config` path after it.
fn locate(args: &[OsString], cmd: &Command) -> (Option<usize>, Option<OsString>) {
    let names: Vec<&str> = cmd.get_subcommands().map(|s| s.get_name()).collect();
    let sub = args.iter().skip(1).position(|a| a.to_str().is_some_and(|s| names.contains(&s))).map(|p| p + 1);
    let Some(sub) = sub else {
        return (None, None);
    };
    let mut path = None;
    let mut it = args[sub + 1..].iter();
    while let Some(a) = it.next() {
        match a.to_str() {
            Some("--config") => path = it.next().cloned(),
            Some(s) if s.starts_with("--config=") => path = Some(OsString::from(&s["--config=".len()..])),
            Some("--") => break,
            _ => {}
        }
    }
    (Some(sub), path)
}

/// Returns `args` with the config file's entries inserted after the
/// subcommand name. Unknown keys are an error.
pub fn expand(args: Vec<OsString>, cmd: &Command) -> Result<Vec<OsString>> {
    let (Some(sub), Some(path)) = locate(&args, cmd) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config file {}", path.to_string_lossy()))?;
    let entries = parse(&text)?;
    let sub_name = args[sub].to_string_lossy().into_owned();
    let subcmd = cmd.find_subcommand(&sub_name).expect("located above");
    let mut injected = Vec::new();
    for (key, value) in entries {
        let arg = subcmd
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .with_context(|| format!("unknown config key {key:?} for `{sub_name}`"))?;
        if key == "config" {
            bail!("config files cannot include other config files");
        }
        if arg.get_action().takes_values() {
            injected.push(OsString::from(format!("--{key}")));
            injected.push(OsString::from(value));
        } else {
            match value.as_str() {
                "true" | "yes" | "1" | "on" => injected.push(OsString::from(format!("--{key}"))),
                "false" | "no" | "0" | "off" => {}
                other => bail!("config key {key:?} is a switch; expected true or false, got {other:?}"),
            }
        }
    }
    let mut out = args[..=sub].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[sub + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let got = parse("# run settings\nseed = 7\n\n--generations=50\n").unwrap();
        assert_eq!(got, vec![("seed".into(), "7".into()), ("generations".into(), "50".into())]);
        assert!(parse("seed 7").is_err());
        assert!(parse("=7").is_err());
    }
}
