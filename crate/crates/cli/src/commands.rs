use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use citerec::eval::{pair_similarity_stats, run_benchmark, BenchmarkConfig, KgVariants, PairStats};
use citerec::kg_store::{
    kg_stats, read_citations, read_mentions, read_papers, KgSnapshot, KnowledgeGraph, ScopingMode,
};
use citerec::retrieval::{build_index, IndexConfig, RetrievalError};
use citerec::vectorizer::{load_embeddings, EmbeddingTable};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{config_error, RunConfig};

/// A query the index cannot answer.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct QueryError(pub String);

#[derive(Serialize)]
struct InputRecord {
    role: String,
    path: PathBuf,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    created_unix: u64,
    seed: u64,
    config_sha256: String,
    config: &'a RunConfig,
    inputs: Vec<InputRecord>,
    outputs: Vec<PathBuf>,
}

fn sha256_file(path: &Path) -> Result<String> {
    let mut reader = BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    );
    let mut hasher = Sha256::new();
    loop {
        let chunk = reader
            .fill_buf()
            .with_context(|| format!("cannot read {}", path.display()))?;
        if chunk.is_empty() {
            break;
        }
        hasher.update(chunk);
        let n = chunk.len();
        reader.consume(n);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn write_manifest(
    config: &RunConfig,
    command: &str,
    inputs: &[(String, PathBuf)],
    outputs: Vec<PathBuf>,
) -> Result<PathBuf> {
    let config_json = serde_json::to_vec(config)?;
    let inputs = inputs
        .iter()
        .map(|(role, path)| {
            Ok(InputRecord {
                role: role.clone(),
                path: path.clone(),
                sha256: sha256_file(path)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        created_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        seed: config.seed,
        config_sha256: hex::encode(Sha256::digest(&config_json)),
        config,
        inputs,
        outputs,
    };
    let path = config.out.join(format!("{command}-manifest.json"));
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_file(&path, &text)?;
    Ok(path)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn open_input(path: &Path, what: &str) -> Result<BufReader<File>> {
    if !path.exists() {
        bail!("{what} file not found: {}", path.display());
    }
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

fn load_snapshot(config: &RunConfig, mode: ScopingMode) -> Result<KnowledgeGraph> {
    let path = config.snapshot_path(mode);
    if !path.exists() {
        bail!(
            "{mode} snapshot not found: {} (run `citerec ingest` first)",
            path.display()
        );
    }
    let file = File::open(&path).with_context(|| format!("cannot open {}", path.display()))?;
    KgSnapshot::read_json(BufReader::new(file))
        .and_then(KgSnapshot::into_graph)
        .with_context(|| format!("invalid snapshot {}", path.display()))
}

fn embedding_path<'a>(config: &'a RunConfig, label: &str) -> Result<&'a Path> {
    config
        .embeddings
        .get(label)
        .map(PathBuf::as_path)
        .ok_or_else(|| config_error(format!("no embeddings configured under label {label:?}")))
}

fn load_table(config: &RunConfig, label: &str) -> Result<EmbeddingTable> {
    let path = embedding_path(config, label)?;
    let reader = open_input(path, "embeddings")?;
    load_embeddings(reader).with_context(|| format!("{}", path.display()))
}

pub fn ingest(config: &RunConfig) -> Result<()> {
    let [papers_path, mentions_path, citations_path] = config.ingest_inputs()?;
    let papers = read_papers(open_input(papers_path, "papers")?)
        .with_context(|| format!("{}", papers_path.display()))?;
    let mentions = read_mentions(open_input(mentions_path, "mentions")?)
        .with_context(|| format!("{}", mentions_path.display()))?;
    let citations = read_citations(open_input(citations_path, "citations")?)
        .with_context(|| format!("{}", citations_path.display()))?;

    let mut outputs = Vec::new();
    for mode in config.kg.modes() {
        let (kg, report) =
            KnowledgeGraph::build(mode, papers.clone(), mentions.clone(), citations.clone())
                .with_context(|| format!("building the {mode} KG"))?;
        log::info!("{mode}: {report:?}");

        let snapshot_path = config.snapshot_path(mode);
        if let Some(dir) = snapshot_path.parent() {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        }
        let file = File::create(&snapshot_path)
            .with_context(|| format!("cannot write {}", snapshot_path.display()))?;
        let mut writer = BufWriter::new(file);
        KgSnapshot::from_graph(&kg).write_json(&mut writer)?;
        writer.flush()?;

        let stats_path = config.out.join(format!("stats-{mode}.tsv"));
        write_file(&stats_path, &kg_stats(&kg).to_tsv())?;
        println!(
            "{mode}: {} papers, {} concepts, {} links, {} citations ({} dropped)",
            report.papers,
            report.concepts,
            report.links,
            report.citations,
            report.dropped_out_of_kg + report.dropped_self_loops + report.dropped_duplicates
        );
        outputs.push(snapshot_path);
        outputs.push(stats_path);
    }
    let inputs = [
        ("papers".to_string(), papers_path.to_path_buf()),
        ("mentions".to_string(), mentions_path.to_path_buf()),
        ("citations".to_string(), citations_path.to_path_buf()),
    ];
    write_manifest(config, "ingest", &inputs, outputs)?;
    Ok(())
}

pub fn query(
    config: &RunConfig,
    query_id: &str,
    embedding: Option<&str>,
    use_concepts: bool,
) -> Result<String> {
    if !use_concepts && embedding.is_none() {
        return Err(config_error("--no-concepts needs --embedding"));
    }
    let kg = load_snapshot(config, config.kg.preferred())?;
    let table = embedding
        .map(|label| load_table(config, label))
        .transpose()?;
    let index_config = IndexConfig {
        use_concepts,
        type_filter: config.types,
        use_dense: table.is_some(),
    };
    let index = build_index(&kg, table.as_ref(), index_config)?;
    let k = *config.k_values.last().expect("k values validated");
    match index.rank_all(query_id, k) {
        Ok(list) => Ok(list.to_tsv()),
        Err(RetrievalError::UnknownQuery(id)) => {
            Err(QueryError(format!("unknown query id {id:?}")).into())
        }
        Err(e) => Err(e.into()),
    }
}

pub fn evaluate(config: &RunConfig) -> Result<()> {
    let mut graphs = BTreeMap::new();
    let mut inputs = Vec::new();
    for mode in config.kg.modes() {
        graphs.insert(mode, load_snapshot(config, mode)?);
        inputs.push((format!("snapshot:{mode}"), config.snapshot_path(mode)));
    }
    let mut embeddings = BTreeMap::new();
    for label in config.embeddings.keys() {
        embeddings.insert(label.clone(), load_table(config, label)?);
        inputs.push((
            format!("embeddings:{label}"),
            embedding_path(config, label)?.to_path_buf(),
        ));
    }
    let bench = BenchmarkConfig {
        k_values: config.k_values.clone(),
        min_citations: config.min_citations,
        seed: config.seed,
        labels: embeddings.keys().cloned().collect(),
        type_filter: config.types,
        ..BenchmarkConfig::default()
    };
    let kgs = KgVariants {
        in_domain: graphs.get(&ScopingMode::InDomain),
        cross_domain: graphs.get(&ScopingMode::CrossDomain),
    };
    let report = run_benchmark(kgs, &embeddings, &bench)?;

    let tsv_path = config.out.join("report.tsv");
    let text_path = config.out.join("report.txt");
    write_file(&tsv_path, &report.to_tsv())?;
    write_file(&text_path, &report.to_text())?;
    print!("{}", report.to_text());
    write_manifest(config, "evaluate", &inputs, vec![tsv_path, text_path])?;
    Ok(())
}

pub fn stats(config: &RunConfig) -> Result<()> {
    let mut out = format!("kg\t{}\n", PairStats::TSV_HEADER);
    let mut inputs = Vec::new();
    for mode in config.kg.modes() {
        let kg = load_snapshot(config, mode)?;
        inputs.push((format!("snapshot:{mode}"), config.snapshot_path(mode)));
        let (citing, random) = pair_similarity_stats(&kg, config.seed)
            .with_context(|| format!("pair statistics on the {mode} KG"))?;
        for row in [citing, random] {
            out.push_str(&format!("{mode}\t{}\n", row.to_tsv_row()));
        }
    }
    let path = config.out.join("pair_stats.tsv");
    write_file(&path, &out)?;
    print!("{out}");
    write_manifest(config, "stats", &inputs, vec![path])?;
    Ok(())
}
