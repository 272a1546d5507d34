//! `--config <file>` support and the resolved-argument view for manifests.
//!
//! The file holds `key = value` lines (`#` starts a comment). Keys are long
//! flag names without dashes. Its entries are spliced in right after the
//! subcommand so explicit flags, which come later, override them.

use std::collections::BTreeMap;

use clap::{ArgAction, ArgMatches, Command};

const VALUED_GLOBALS: [&str; 2] = ["--threads", "--config"];

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn subcommand_index(argv: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < argv.len() {
        let a = &argv[i];
        if VALUED_GLOBALS.contains(&a.as_str()) {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", n + 1))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// `argv` with the config file's entries spliced in.
pub fn expand(root: &Command, argv: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let Some(sub_idx) = subcommand_index(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let sub = root
        .find_subcommand(&argv[sub_idx])
        .ok_or_else(|| format!("unknown command `{}`", argv[sub_idx]))?;
    let mut extra = Vec::new();
    for (key, value) in parse_pairs(&text)? {
        let arg = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| format!("unknown config key `{key}`"))?;
        if key == "config" {
            return Err("config files cannot include other config files".into());
        }
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" | "1" | "yes" => extra.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => return Err(format!("config key `{key}` expects true or false")),
            }
        } else {
            extra.push(format!("--{key}"));
            extra.push(value);
        }
    }
    let mut out = argv[..=sub_idx].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[sub_idx + 1..]);
    Ok(out)
}

/// Every argument of the invoked subcommand with its final value. Argument
/// group ids are skipped.
pub fn resolved(root: &Command, m: &ArgMatches) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let collect = |cmd: &Command, m: &ArgMatches, out: &mut BTreeMap<String, String>| {
        for id in m.ids() {
            if !cmd.get_arguments().any(|a| a.get_id() == id) {
                continue;
            }
            if let Ok(Some(vals)) = m.try_get_raw(id.as_str()) {
                let v: Vec<String> = vals.map(|v| v.to_string_lossy().into_owned()).collect();
                out.insert(id.as_str().to_string(), v.join(","));
            }
        }
    };
    collect(root, m, &mut out);
    if let Some((name, sub)) = m.subcommand() {
        out.insert("command".into(), name.to_string());
        if let Some(cmd) = root.find_subcommand(name) {
            collect(cmd, sub, &mut out);
        }
    }
    out
}
