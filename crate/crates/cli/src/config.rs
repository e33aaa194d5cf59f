//! Run configuration: a flat TOML file, overridden by command-line flags.
//!
//! Relative paths in the file resolve against the file's own directory.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use citerec::eval::DEFAULT_MIN_CITATIONS;
use citerec::kg_store::ScopingMode;
use citerec::vectorizer::TypeFilter;
use serde::{Deserialize, Serialize};

/// Which KG variants a command works on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KgSelection {
    InDomain,
    CrossDomain,
    Both,
}

impl KgSelection {
    pub fn modes(self) -> Vec<ScopingMode> {
        match self {
            KgSelection::InDomain => vec![ScopingMode::InDomain],
            KgSelection::CrossDomain => vec![ScopingMode::CrossDomain],
            KgSelection::Both => vec![ScopingMode::CrossDomain, ScopingMode::InDomain],
        }
    }

    /// The variant used when a command needs exactly one.
    pub fn preferred(self) -> ScopingMode {
        match self {
            KgSelection::CrossDomain => ScopingMode::CrossDomain,
            _ => ScopingMode::InDomain,
        }
    }
}

impl FromStr for KgSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("both") {
            return Ok(KgSelection::Both);
        }
        match s.parse::<ScopingMode>()? {
            ScopingMode::InDomain => Ok(KgSelection::InDomain),
            ScopingMode::CrossDomain => Ok(KgSelection::CrossDomain),
        }
    }
}

impl fmt::Display for KgSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KgSelection::InDomain => "in-domain",
            KgSelection::CrossDomain => "cross-domain",
            KgSelection::Both => "both",
        })
    }
}

/// File contents as written by the user.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    papers: Option<PathBuf>,
    mentions: Option<PathBuf>,
    citations: Option<PathBuf>,
    #[serde(default)]
    embeddings: BTreeMap<String, PathBuf>,
    kg: Option<String>,
    types: Option<String>,
    k_values: Option<Vec<usize>>,
    min_citations: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    snapshot_dir: Option<PathBuf>,
    threads: Option<usize>,
}

/// Flag values that override the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub kg: Option<KgSelection>,
    pub types: Option<TypeFilter>,
    pub k_values: Option<Vec<usize>>,
    pub min_citations: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub papers: Option<PathBuf>,
    pub mentions: Option<PathBuf>,
    pub citations: Option<PathBuf>,
    pub embeddings: BTreeMap<String, PathBuf>,
    pub kg: KgSelection,
    #[serde(serialize_with = "as_display")]
    pub types: TypeFilter,
    pub k_values: Vec<usize>,
    pub min_citations: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Where `ingest` writes snapshots and other commands read them.
    /// Defaults to the file's `out`, ignoring `--out`.
    pub snapshot_dir: PathBuf,
    pub threads: Option<usize>,
}

fn as_display<S: serde::Serializer, T: fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Malformed or inconsistent configuration.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

impl RunConfig {
    pub fn load(path: &Path, overrides: Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, overrides)
            .map_err(|e| config_error(format!("{}: {e:#}", path.display())))
    }

    pub fn parse(text: &str, base: &Path, overrides: Overrides) -> Result<Self> {
        let file: FileConfig = toml::from_str(text).context("invalid config")?;
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };

        let kg = match (overrides.kg, file.kg) {
            (Some(kg), _) => kg,
            (None, Some(s)) => s.parse().map_err(anyhow::Error::msg)?,
            (None, None) => KgSelection::Both,
        };
        let types = match (overrides.types, file.types) {
            (Some(t), _) => t,
            (None, Some(s)) => s.parse().map_err(anyhow::Error::msg)?,
            (None, None) => TypeFilter::all(),
        };
        let k_values = overrides
            .k_values
            .or(file.k_values)
            .unwrap_or_else(|| vec![10, 20, 50]);
        if k_values.is_empty() || k_values[0] == 0 || k_values.windows(2).any(|w| w[0] >= w[1]) {
            bail!("k values must be non-empty, positive and strictly ascending: {k_values:?}");
        }
        let threads = overrides.threads.or(file.threads);
        if threads == Some(0) {
            bail!("threads must be at least 1");
        }
        let file_out = file.out.map(resolve).unwrap_or_else(|| base.join("out"));
        // `--out` redirects reports; snapshots stay where the file puts them.
        let snapshot_dir = file
            .snapshot_dir
            .map(resolve)
            .unwrap_or_else(|| file_out.clone());
        let out = overrides.out.unwrap_or(file_out);

        Ok(RunConfig {
            papers: file.papers.map(resolve),
            mentions: file.mentions.map(resolve),
            citations: file.citations.map(resolve),
            embeddings: file
                .embeddings
                .into_iter()
                .map(|(label, p)| (label, resolve(p)))
                .collect(),
            kg,
            types,
            k_values,
            min_citations: overrides
                .min_citations
                .or(file.min_citations)
                .unwrap_or(DEFAULT_MIN_CITATIONS),
            seed: overrides.seed.or(file.seed).unwrap_or(0),
            out,
            snapshot_dir,
            threads,
        })
    }

    /// Papers, mentions and citations paths; each must be configured.
    pub fn ingest_inputs(&self) -> Result<[&Path; 3]> {
        fn get<'a>(name: &str, p: &'a Option<PathBuf>) -> Result<&'a Path> {
            p.as_deref()
                .ok_or_else(|| config_error(format!("config does not set `{name}`")))
        }
        Ok([
            get("papers", &self.papers)?,
            get("mentions", &self.mentions)?,
            get("citations", &self.citations)?,
        ])
    }

    pub fn snapshot_path(&self, mode: ScopingMode) -> PathBuf {
        self.snapshot_dir.join(format!("kg-{mode}.json"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_relative_paths() {
        let text = r#"
papers = "data/papers.jsonl"
mentions = "/abs/mentions.tsv"
embeddings.SPECTER = "emb/specter.txt"
"#;
        let c = RunConfig::parse(text, Path::new("/runs/a"), Overrides::default()).unwrap();
        assert_eq!(c.papers.unwrap(), Path::new("/runs/a/data/papers.jsonl"));
        assert_eq!(c.mentions.unwrap(), Path::new("/abs/mentions.tsv"));
        assert!(c.citations.is_none());
        assert_eq!(
            c.embeddings["SPECTER"],
            Path::new("/runs/a/emb/specter.txt")
        );
        assert_eq!(c.kg, KgSelection::Both);
        assert_eq!(c.k_values, vec![10, 20, 50]);
        assert_eq!(c.min_citations, 4);
        assert_eq!(c.out, Path::new("/runs/a/out"));
        assert_eq!(c.snapshot_dir, c.out);
    }

    #[test]
    fn flags_override_file() {
        let text = "kg = \"cross-domain\"\nk_values = [5]\nseed = 3\ntypes = \"m\"\n";
        let overrides = Overrides {
            kg: Some(KgSelection::InDomain),
            k_values: Some(vec![1, 2]),
            seed: Some(9),
            ..Overrides::default()
        };
        let c = RunConfig::parse(text, Path::new("."), overrides).unwrap();
        assert_eq!(c.kg, KgSelection::InDomain);
        assert_eq!(c.k_values, vec![1, 2]);
        assert_eq!(c.seed, 9);
        assert_eq!(c.types.to_string(), "m");
    }

    #[test]
    fn rejects_bad_values() {
        let parse = |t: &str| RunConfig::parse(t, Path::new("."), Overrides::default());
        assert!(parse("k_values = [20, 10]").is_err());
        assert!(parse("k_values = []").is_err());
        assert!(parse("kg = \"sideways\"").is_err());
        assert!(parse("types = \"x\"").is_err());
        assert!(parse("unknown_key = 1").is_err());
        assert!(parse("threads = 0").is_err());
    }

    #[test]
    fn selection_parsing() {
        assert_eq!("both".parse::<KgSelection>().unwrap(), KgSelection::Both);
        assert_eq!(
            "in-domain".parse::<KgSelection>().unwrap(),
            KgSelection::InDomain
        );
        assert_eq!(KgSelection::Both.modes().len(), 2);
        assert_eq!(KgSelection::Both.preferred(), ScopingMode::InDomain);
    }
}
