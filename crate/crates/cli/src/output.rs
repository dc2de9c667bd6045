//! Writing outputs with their audit trail.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use netslice::experiment::config_hash;
use serde::Serialize;
use serde_json::Value;

/// Identifies the configuration an output came from.
#[derive(Debug, Clone, Serialize)]
pub struct Audit {
    pub config_hash: String,
    pub master_seed: Option<u64>,
}

impl Audit {
    pub fn new<T: Serialize>(config: &T, master_seed: Option<u64>) -> Self {
        Self {
            config_hash: config_hash(config),
            master_seed,
        }
    }

    pub fn line(&self) -> String {
        match self.master_seed {
            Some(s) => format!("config_hash={} master_seed={s}", self.config_hash),
            None => format!("config_hash={} master_seed=none", self.config_hash),
        }
    }

    pub fn comments(&self) -> Vec<String> {
        vec![self.line()]
    }

    /// Adds `config_hash` and `master_seed` to a JSON object.
    pub fn tag_json(&self, json: &str) -> Result<String> {
        let mut value: Value = serde_json::from_str(json)?;
        if let Value::Object(map) = &mut value {
            map.insert("config_hash".into(), self.config_hash.clone().into());
            map.insert("master_seed".into(), self.master_seed.into());
        }
        Ok(serde_json::to_string_pretty(&value)? + "\n")
    }

    pub fn json<T: Serialize>(&self, body: &T) -> Result<String> {
        self.tag_json(&serde_json::to_string(body)?)
    }

    /// Newick with a leading `[...]` comment.
    pub fn newick(&self, tree: &str) -> String {
        format!("[{}]\n{tree}\n", self.line())
    }
}

pub struct OutDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: PathBuf) -> Result<Self> {
        fs::create_dir_all(&root)
            .with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(Self {
            root,
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Data lines of a CSV: comments, blanks and the header removed, each with
/// its 1-based line number.
pub fn csv_rows<'a>(text: &'a str, header: &str) -> impl Iterator<Item = (usize, &'a str)> {
    let header = header.to_owned();
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(move |(_, l)| !l.is_empty() && !l.starts_with('#') && *l != header)
}

/// Master seed recorded in an earlier output, if any.
pub fn recorded_seed(text: &str) -> Option<u64> {
    if let Ok(Value::Object(map)) = serde_json::from_str::<Value>(text) {
        return map.get("master_seed").and_then(Value::as_u64);
    }
    text.lines()
        .take_while(|l| l.starts_with('#') || l.starts_with('['))
        .flat_map(|l| l.split_whitespace())
        .find_map(|tok| {
            tok.trim_end_matches(']')
                .strip_prefix("master_seed=")
                .and_then(|s| s.parse().ok())
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn audit_round_trips_through_outputs() {
        let a = Audit::new(&("x", 1), Some(42));
        assert_eq!(a.config_hash.len(), 16);
        let csv = format!("# {}\nn,m\n1,2\n", a.line());
        assert_eq!(recorded_seed(&csv), Some(42));
        assert_eq!(recorded_seed(&a.newick("(a:1,b:1)r:0;")), Some(42));
        let json = a.tag_json("{\"k\": 1}").unwrap();
        assert_eq!(recorded_seed(&json), Some(42));
        assert_eq!(recorded_seed("n,m\n1,2\n"), None);
    }

    #[test]
    fn csv_rows_skip_comments_and_header() {
        let rows: Vec<_> = csv_rows("# c\nn,m\n\n1,2\n3,4\n", "n,m").collect();
        assert_eq!(rows, [(4, "1,2"), (5, "3,4")]);
    }
}
