//! Output directory bookkeeping, CSV helpers and the run manifest.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use lsh_core::geometry::LatentConfiguration;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
    meta: Vec<(String, String)>,
}

impl Outputs {
    pub fn create(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("key `out_dir`: cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            meta: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        std::fs::write(self.path(name), contents)?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Records a file written directly through [`Outputs::path`].
    pub fn write_existing(&mut self, name: &str) {
        self.files.push(name.to_string());
    }

    /// Extra `key=value` line for the manifest.
    pub fn note(&mut self, key: &str, value: impl Display) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    /// Writes `<command>.config.txt` (the effective config) and
    /// `<command>.manifest.txt`; call last. Per-command names let several
    /// commands share one directory.
    pub fn finish(mut self, command: &str, cfg: &RunConfig, seed: u64) -> CliResult<()> {
        self.write(&format!("{command}.config.txt"), &cfg.canonical())?;
        let mut m = String::new();
        m.push_str("tool=lsh\n");
        m.push_str(&format!("version={}\n", env!("CARGO_PKG_VERSION")));
        m.push_str(&format!("command={command}\n"));
        m.push_str(&format!("config_sha256={}\n", cfg.sha256()));
        m.push_str(&format!("seed={seed}\n"));
        for (k, v) in &self.meta {
            m.push_str(&format!("{k}={v}\n"));
        }
        m.push_str(&format!("outputs={}\n", self.files.join(",")));
        std::fs::write(self.path(&format!("{command}.manifest.txt")), m)?;
        Ok(())
    }
}

pub fn join<T: Display>(v: impl IntoIterator<Item = T>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn latents_csv(u: &LatentConfiguration) -> String {
    let mut s = String::from("node");
    for j in 1..=u.dim() {
        s.push_str(&format!(",u{j}"));
    }
    s.push('\n');
    for (i, row) in u.rows().enumerate() {
        s.push_str(&format!("{i},{}\n", join(row)));
    }
    s
}

pub fn read_latents_csv(path: &Path) -> CliResult<LatentConfiguration> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CliError::Data(format!("{}: empty file", path.display())))?;
    let d = header.split(',').count().saturating_sub(1);
    let mut coords = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(CliError::Data(format!("{} line {}: expected {} fields", path.display(), i + 2, d + 1)));
        }
        for f in &fields[1..] {
            coords.push(
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Data(format!("{} line {}: bad number {f:?}", path.display(), i + 2)))?,
            );
        }
    }
    LatentConfiguration::new(d, coords).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// `key=value` text file with list values, as written for fitted parameters.
pub fn read_key_values(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Data(format!("{}: malformed line {line:?}", path.display())))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn parse_floats(path: &Path, map: &BTreeMap<String, String>, key: &str) -> CliResult<Vec<f64>> {
    let v = map
        .get(key)
        .ok_or_else(|| CliError::Data(format!("{}: missing `{key}`", path.display())))?;
    v.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Data(format!("{}: bad `{key}`", path.display()))))
        .collect()
}
