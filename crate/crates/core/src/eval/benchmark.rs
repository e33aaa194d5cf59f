use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::metrics::{map_at_ks, validate_ks};
use super::{select_queries, EvalError, QuerySet, DEFAULT_MIN_CITATIONS};
use crate::kg_store::{ConceptType, KnowledgeGraph, ScopingMode};
use crate::retrieval::{build_index, IndexConfig};
use crate::vectorizer::{random_embeddings, EmbeddingTable, TypeFilter};

pub const RANDOM_LABEL: &str = "Random";
pub const RANDOM_DIM: usize = 200;

/// Ablation rows, in report order.
pub const ABLATION_ORDER: [ConceptType; 4] = [
    ConceptType::Material,
    ConceptType::Process,
    ConceptType::Data,
    ConceptType::Method,
];

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub k_values: Vec<usize>,
    pub min_citations: usize,
    pub seed: u64,
    /// Embedding labels to evaluate, in report order.
    pub labels: Vec<String>,
    /// Concept types used by the concept-vector rows other than ablations.
    pub type_filter: TypeFilter,
    pub random_dim: usize,
    pub include_random: bool,
    pub include_ablations: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            k_values: vec![10, 20, 50],
            min_citations: DEFAULT_MIN_CITATIONS,
            seed: 0,
            labels: Vec::new(),
            type_filter: TypeFilter::all(),
            random_dim: RANDOM_DIM,
            include_random: true,
            include_ablations: true,
        }
    }
}

/// The two KG variants over the same papers and citations. At least one
/// must be present.
#[derive(Debug, Clone, Copy, Default)]
pub struct KgVariants<'a> {
    pub in_domain: Option<&'a KnowledgeGraph>,
    pub cross_domain: Option<&'a KnowledgeGraph>,
}

impl<'a> KgVariants<'a> {
    fn primary(&self) -> Option<&'a KnowledgeGraph> {
        self.in_domain.or(self.cross_domain)
    }

    fn each(&self) -> impl Iterator<Item = (ScopingMode, &'a KnowledgeGraph)> {
        [
            (ScopingMode::CrossDomain, self.cross_domain),
            (ScopingMode::InDomain, self.in_domain),
        ]
        .into_iter()
        .filter_map(|(mode, kg)| kg.map(|kg| (mode, kg)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub label: String,
    /// Label of the row this one is compared against.
    pub base: Option<String>,
    /// MAP at each configured k.
    pub map: Vec<f64>,
    /// `map - base.map` at each k, when there is a base.
    pub delta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub k_values: Vec<usize>,
    pub rows: Vec<ReportRow>,
    pub query_count: usize,
    pub relevant_link_count: usize,
}

pub fn concept_row_label(mode: ScopingMode) -> String {
    format!("Concept vector ({mode} KG)")
}

pub fn combined_row_label(embedding: &str, mode: ScopingMode) -> String {
    format!("{embedding} + concept vector ({mode} KG)")
}

pub fn ablation_row_label(concept_type: ConceptType) -> String {
    format!("- {concept_type}")
}

impl EvalReport {
    pub fn row(&self, label: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Machine-readable table: MAP and delta columns as fractions printed
    /// at full precision; `-` marks an absent base or delta.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("config\tbase");
        for k in &self.k_values {
            write!(out, "\tMAP@{k}").unwrap();
        }
        for k in &self.k_values {
            write!(out, "\tdelta@{k}").unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.label);
            out.push('\t');
            out.push_str(row.base.as_deref().unwrap_or("-"));
            for m in &row.map {
                write!(out, "\t{m}").unwrap();
            }
            for i in 0..self.k_values.len() {
                match &row.delta {
                    Some(d) => write!(out, "\t{}", d[i]).unwrap(),
                    None => out.push_str("\t-"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Human-readable table in percent with one decimal and parenthesized
    /// deltas.
    pub fn to_text(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.label.chars().count())
            .max()
            .unwrap_or(6)
            .max(6);
        let mut out = String::new();
        writeln!(
            out,
            "queries: {}  relevant links: {}",
            self.query_count, self.relevant_link_count
        )
        .unwrap();
        write!(out, "{:<width$}", "config").unwrap();
        for k in &self.k_values {
            write!(out, " | {:<14}", format!("MAP@{k}")).unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            write!(out, "{:<width$}", row.label).unwrap();
            for i in 0..self.k_values.len() {
                let cell = match &row.delta {
                    Some(d) => format!("{:>5.1} ({:+.1})", row.map[i] * 100.0, d[i] * 100.0),
                    None => format!("{:>5.1}", row.map[i] * 100.0),
                };
                write!(out, " | {cell:<14}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Runs the configuration matrix: random baseline, concept-only rows for
/// each KG variant, per-type ablations on the in-domain KG, and every
/// embedding alone and combined with each variant's concept vectors.
pub fn run_benchmark(
    kgs: KgVariants<'_>,
    embeddings: &BTreeMap<String, EmbeddingTable>,
    config: &BenchmarkConfig,
) -> Result<EvalReport, EvalError> {
    validate_ks(&config.k_values)?;
    let primary = kgs.primary().ok_or(EvalError::NoKnowledgeGraph)?;
    if let (Some(a), Some(b)) = (kgs.in_domain, kgs.cross_domain) {
        check_same_corpus(a, b)?;
    }
    for label in &config.labels {
        if !embeddings.contains_key(label) {
            return Err(EvalError::MissingEmbedding(label.clone()));
        }
    }

    let queries = select_queries(primary, config.min_citations);
    if queries.is_empty() {
        return Err(EvalError::EmptyQuerySet);
    }
    log::info!(
        "{} queries, {} relevant links",
        queries.len(),
        queries.relevant_link_count()
    );
    let ks = &config.k_values;
    let evaluate = |kg: &KnowledgeGraph,
                    table: Option<&EmbeddingTable>,
                    index_config: IndexConfig,
                    label: &str|
     -> Result<Vec<f64>, EvalError> {
        log::info!("evaluating {label}");
        let index = build_index(kg, table, index_config)?;
        map_at_ks(&queries, &index, ks)
    };

    let mut rows = Vec::new();
    let plain = |label: String, map: Vec<f64>| ReportRow {
        label,
        base: None,
        map,
        delta: None,
    };

    if config.include_random {
        let table = random_embeddings(
            primary.papers().iter().map(|p| p.id.as_str()),
            config.random_dim,
            config.seed,
        )?;
        let map = evaluate(
            primary,
            Some(&table),
            IndexConfig::dense_only(),
            RANDOM_LABEL,
        )?;
        rows.push(plain(RANDOM_LABEL.to_string(), map));
    }

    for (mode, kg) in kgs.each() {
        let label = concept_row_label(mode);
        let map = evaluate(
            kg,
            None,
            IndexConfig::concepts_only(config.type_filter),
            &label,
        )?;
        rows.push(plain(label, map));
    }

    if config.include_ablations {
        if let Some(kg) = kgs.in_domain {
            for t in ABLATION_ORDER {
                let label = ablation_row_label(t);
                let filter = TypeFilter::only(t);
                let map = evaluate(kg, None, IndexConfig::concepts_only(filter), &label)?;
                rows.push(plain(label, map));
            }
        }
    }

    for label in &config.labels {
        let table = &embeddings[label];
        let base = evaluate(primary, Some(table), IndexConfig::dense_only(), label)?;
        for (mode, kg) in kgs.each() {
            let combined_label = combined_row_label(label, mode);
            let map = evaluate(
                kg,
                Some(table),
                IndexConfig::hybrid(config.type_filter),
                &combined_label,
            )?;
            let delta = map.iter().zip(&base).map(|(m, b)| m - b).collect();
            rows.push(ReportRow {
                label: combined_label,
                base: Some(label.clone()),
                map,
                delta: Some(delta),
            });
        }
        // The base row precedes its combined rows.
        let insert_at = rows.len() - kgs.each().count();
        rows.insert(insert_at, plain(label.clone(), base));
    }

    Ok(EvalReport {
        k_values: ks.clone(),
        rows,
        query_count: queries.len(),
        relevant_link_count: queries.relevant_link_count(),
    })
}

fn check_same_corpus(a: &KnowledgeGraph, b: &KnowledgeGraph) -> Result<(), EvalError> {
    let same_papers = a.paper_count() == b.paper_count()
        && a.papers().iter().zip(b.papers()).all(|(x, y)| x.id == y.id);
    if !same_papers {
        return Err(EvalError::VariantMismatch("paper sets differ".into()));
    }
    if a.citation_edges() != b.citation_edges() {
        return Err(EvalError::VariantMismatch("citation edges differ".into()));
    }
    Ok(())
}

/// Convenience for callers that already hold a query set and index config.
pub fn evaluate_config(
    queries: &QuerySet,
    kg: &KnowledgeGraph,
    embeddings: Option<&EmbeddingTable>,
    index_config: IndexConfig,
    ks: &[usize],
) -> Result<Vec<f64>, EvalError> {
    let index = build_index(kg, embeddings, index_config)?;
    map_at_ks(queries, &index, ks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg_store::{Domain, MentionRecord, PaperRecord};

    fn corpus(mode: ScopingMode) -> KnowledgeGraph {
        let ids: Vec<String> = (0..12).map(|i| format!("p{i:02}")).collect();
        let domain_of = |i: usize| if i < 6 { Domain::Cs } else { Domain::Med };
        let papers = ids
            .iter()
            .enumerate()
            .map(|(i, id)| PaperRecord::new(id.clone(), domain_of(i)));
        let mut mentions = Vec::new();
        for (i, id) in ids.iter().enumerate() {
            let domain = domain_of(i);
            for (j, t) in ConceptType::ALL.iter().enumerate() {
                mentions.push(MentionRecord {
                    paper_id: id.clone(),
                    surface: format!("c{}", (i / 3) * 4 + j),
                    concept_type: *t,
                    domain,
                });
            }
        }
        let cites = vec![
            ("p00", "p01"),
            ("p00", "p02"),
            ("p00", "p05"),
            ("p00", "p09"),
            ("p07", "p06"),
            ("p07", "p08"),
            ("p07", "p00"),
            ("p07", "p11"),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()));
        KnowledgeGraph::build(mode, papers, mentions, cites)
            .unwrap()
            .0
    }

    #[test]
    fn matrix_layout_and_deltas() {
        let inner = corpus(ScopingMode::InDomain);
        let cross = corpus(ScopingMode::CrossDomain);
        let mut embeddings = BTreeMap::new();
        embeddings.insert(
            "E".to_string(),
            random_embeddings(inner.papers().iter().map(|p| p.id.as_str()), 8, 3).unwrap(),
        );
        let config = BenchmarkConfig {
            labels: vec!["E".into()],
            seed: 1,
            ..BenchmarkConfig::default()
        };
        let kgs = KgVariants {
            in_domain: Some(&inner),
            cross_domain: Some(&cross),
        };
        let report = run_benchmark(kgs, &embeddings, &config).unwrap();
        let labels: Vec<&str> = report.rows.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(
            labels,
            [
                "Random",
                "Concept vector (cross-domain KG)",
                "Concept vector (in-domain KG)",
                "- Material",
                "- Process",
                "- Data",
                "- Method",
                "E",
                "E + concept vector (cross-domain KG)",
                "E + concept vector (in-domain KG)",
            ]
        );
        assert_eq!(report.query_count, 2);
        assert_eq!(report.relevant_link_count, 8);
        let base = report.row("E").unwrap();
        for row in report.rows.iter().filter(|r| r.base.is_some()) {
            let delta = row.delta.as_ref().unwrap();
            for ((d, m), b) in delta.iter().zip(&row.map).zip(&base.map) {
                assert_eq!(*d, m - b);
            }
        }
        assert!(report
            .rows
            .iter()
            .all(|r| r.map.iter().all(|m| (0.0..=1.0).contains(m))));

        let tsv = report.to_tsv();
        assert_eq!(tsv.lines().count(), 11);
        assert!(tsv.starts_with("config\tbase\tMAP@10\tMAP@20\tMAP@50\tdelta@10"));
        let text = report.to_text();
        assert!(text.contains("E + concept vector (in-domain KG)"));
    }

    #[test]
    fn missing_label_is_an_error() {
        let inner = corpus(ScopingMode::InDomain);
        let config = BenchmarkConfig {
            labels: vec!["SPECTER".into()],
            ..BenchmarkConfig::default()
        };
        let kgs = KgVariants {
            in_domain: Some(&inner),
            cross_domain: None,
        };
        assert_eq!(
            run_benchmark(kgs, &BTreeMap::new(), &config).unwrap_err(),
            EvalError::MissingEmbedding("SPECTER".into())
        );
    }

    #[test]
    fn mismatched_variants_are_rejected() {
        let inner = corpus(ScopingMode::InDomain);
        let other = KnowledgeGraph::build(
            ScopingMode::CrossDomain,
            vec![PaperRecord::new("x", Domain::Cs)],
            vec![],
            vec![],
        )
        .unwrap()
        .0;
        let kgs = KgVariants {
            in_domain: Some(&inner),
            cross_domain: Some(&other),
        };
        assert!(matches!(
            run_benchmark(kgs, &BTreeMap::new(), &BenchmarkConfig::default()),
            Err(EvalError::VariantMismatch(_))
        ));
    }
}
