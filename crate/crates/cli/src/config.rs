//! Flat `key = value` run files merged under command-line flags.

use std::ffi::OsString;
use std::fmt;
use std::path::Path;

use clap::Command;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// One `key = value` entry with its 1-based line number.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parses a run file. Blank lines and lines starting with `#` are skipped.
pub fn parse_config(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected key = value, got {raw:?}", i + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError(format!("line {}: empty key", i + 1)));
        }
        out.push(Entry {
            key: key.to_string(),
            value: value.trim().to_string(),
            line: i + 1,
        });
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Vec<Entry>, ConfigError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

/// Splits `--config PATH` (or `--config=PATH`) out of the arguments.
fn take_config(args: &mut Vec<OsString>) -> Result<Option<OsString>, ConfigError> {
    let mut found = None;
    let mut i = 0;
    while i < args.len() {
        let a = args[i].to_string_lossy().into_owned();
        if a == "--config" {
            if i + 1 >= args.len() {
                return Err(ConfigError("--config needs a path".into()));
            }
            found = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(p) = a.strip_prefix("--config=") {
            found = Some(OsString::from(p));
            args.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

fn flag_name(arg: &OsString) -> Option<String> {
    let s = arg.to_str()?;
    let name = s.strip_prefix("--")?;
    Some(name.split_once('=').map_or(name, |p| p.0).to_string())
}

/// Inserts run-file entries after the verb. Keys also given on the command
/// line are dropped, so flags win.
pub fn merge_args(root: &Command, argv: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let mut argv = argv;
    if argv.len() < 2 {
        return Ok(argv);
    }
    let mut rest = argv.split_off(2);
    let Some(path) = take_config(&mut rest)? else {
        argv.extend(rest);
        return Ok(argv);
    };
    let verb = argv[1].to_string_lossy().into_owned();
    let sub = root
        .find_subcommand(&verb)
        .ok_or_else(|| ConfigError(format!("--config given with unknown verb {verb:?}")))?;
    let given: Vec<String> = rest.iter().filter_map(flag_name).collect();
    let mut injected = Vec::new();
    for e in load_config(Path::new(&path))? {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(e.key.as_str()))
            .ok_or_else(|| ConfigError(format!("line {}: unknown key {:?} for {verb}", e.line, e.key)))?;
        if given.contains(&e.key) {
            continue;
        }
        let flag = OsString::from(format!("--{}", e.key));
        if arg.get_action().takes_values() {
            for v in e.value.split_whitespace() {
                injected.push(flag.clone());
                injected.push(OsString::from(v));
            }
        } else {
            match e.value.as_str() {
                "true" => injected.push(flag),
                "false" => {}
                v => return Err(ConfigError(format!("line {}: {} expects true or false, got {v:?}", e.line, e.key))),
            }
        }
    }
    argv.extend(injected);
    argv.extend(rest);
    Ok(argv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reports_line_numbers() {
        let e = parse_config("# run\n\nlambda = 4\n T=2 \n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!((e[0].key.as_str(), e[0].value.as_str(), e[0].line), ("lambda", "4", 3));
        assert_eq!(e[1].line, 4);
        assert!(parse_config("").unwrap().is_empty());
        let err = parse_config("a = 1\nnonsense\n").unwrap_err();
        assert!(err.0.contains("line 2"), "{err}");
    }
}
