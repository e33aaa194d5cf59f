//! Research knowledge graph: papers, scientific concepts, paper-concept
//! links and in-corpus citation edges.
//!
//! A graph is assembled once from ingested records and is immutable
//! afterwards, so it can be shared freely between scoring workers.

mod ingest;
mod snapshot;
mod stats;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ingest::{
    ingest_citations, ingest_papers, normalize_surface, read_citations, read_mentions, read_papers,
    resolve_concepts, CitationIngest, ConceptResolution, IngestReport, PaperRecord,
};
pub use snapshot::{KgSnapshot, SNAPSHOT_FORMAT, SNAPSHOT_VERSION};
pub use stats::{kg_stats, DomainCounts, KgStats};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate paper id {0}")]
    DuplicatePaper(String),
    #[error("paper {paper_id}: unknown domain code {code:?}")]
    UnknownDomain { paper_id: String, code: String },
    #[error("paper id must be non-empty")]
    EmptyPaperId,
    #[error("mention references unknown paper {0}")]
    UnknownPaper(String),
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KgError {
    #[error("unknown paper {0}")]
    UnknownPaper(String),
}

/// The ten STM domains, in the column order used by the statistics table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Domain {
    #[serde(rename = "Agr")]
    Agr,
    #[serde(rename = "Ast")]
    Ast,
    #[serde(rename = "Bio")]
    Bio,
    #[serde(rename = "CS")]
    Cs,
    #[serde(rename = "Che")]
    Che,
    #[serde(rename = "ES")]
    Es,
    #[serde(rename = "Eng")]
    Eng,
    #[serde(rename = "MS")]
    Ms,
    #[serde(rename = "Mat")]
    Mat,
    #[serde(rename = "Med")]
    Med,
}

impl Domain {
    pub const ALL: [Domain; 10] = [
        Domain::Agr,
        Domain::Ast,
        Domain::Bio,
        Domain::Cs,
        Domain::Che,
        Domain::Es,
        Domain::Eng,
        Domain::Ms,
        Domain::Mat,
        Domain::Med,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Domain::Agr => "Agr",
            Domain::Ast => "Ast",
            Domain::Bio => "Bio",
            Domain::Cs => "CS",
            Domain::Che => "Che",
            Domain::Es => "ES",
            Domain::Eng => "Eng",
            Domain::Ms => "MS",
            Domain::Mat => "Mat",
            Domain::Med => "Med",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Domain {
    type Err = String;

    /// Codes match case-insensitively (`cs` and `CS` are the same domain).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Domain::ALL
            .into_iter()
            .find(|d| d.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConceptType {
    Material,
    Method,
    Process,
    Data,
}

impl ConceptType {
    pub const ALL: [ConceptType; 4] = [
        ConceptType::Material,
        ConceptType::Method,
        ConceptType::Process,
        ConceptType::Data,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConceptType::Material => "Material",
            ConceptType::Method => "Method",
            ConceptType::Process => "Process",
            ConceptType::Data => "Data",
        }
    }

    pub(crate) fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for ConceptType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConceptType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConceptType::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| s.to_string())
    }
}

/// How concept identity is scoped when resolving mentions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScopingMode {
    /// Identical concepts are shared only between papers of the same domain.
    InDomain,
    /// Identical concepts are shared across all domains.
    CrossDomain,
}

impl ScopingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScopingMode::InDomain => "in-domain",
            ScopingMode::CrossDomain => "cross-domain",
        }
    }
}

impl fmt::Display for ScopingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScopingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "in-domain" | "in_domain" | "indomain" => Ok(ScopingMode::InDomain),
            "cross-domain" | "cross_domain" | "crossdomain" => Ok(ScopingMode::CrossDomain),
            other => Err(format!("unknown KG variant {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    CrossDomain,
    InDomain(Domain),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paper {
    pub id: String,
    pub domain: Domain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, rename = "abstract", skip_serializing_if = "Option::is_none")]
    pub abstract_text: Option<String>,
}

/// Dense concept index; doubles as the concept-vector dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConceptId(pub u32);

impl ConceptId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub id: ConceptId,
    pub key: String,
    pub concept_type: ConceptType,
    pub scope: Scope,
}

/// A raw concept mention before identity resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentionRecord {
    pub paper_id: String,
    pub surface: String,
    pub concept_type: ConceptType,
    pub domain: Domain,
}

#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    mode: ScopingMode,
    papers: Vec<Paper>,
    by_id: HashMap<String, usize>,
    concepts: Vec<Concept>,
    // Sorted, deduplicated concept ids per paper ordinal.
    links: Vec<Vec<ConceptId>>,
    // Sorted, deduplicated (citing, cited) ordinals.
    citations: Vec<(usize, usize)>,
    outgoing: Vec<Vec<usize>>,
}

impl KnowledgeGraph {
    /// Assembles a graph from validated parts.
    ///
    /// Papers are reordered by ascending id; that order defines paper
    /// ordinals everywhere downstream. Concepts must already carry
    /// contiguous ids `0..n` and every link and citation must resolve.
    pub fn from_parts(
        mode: ScopingMode,
        mut papers: Vec<Paper>,
        concepts: Vec<Concept>,
        links: impl IntoIterator<Item = (String, ConceptId)>,
        citations: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, IngestError> {
        papers.sort_by(|a, b| a.id.cmp(&b.id));
        let mut by_id = HashMap::with_capacity(papers.len());
        for (i, p) in papers.iter().enumerate() {
            if p.id.is_empty() {
                return Err(IngestError::EmptyPaperId);
            }
            if by_id.insert(p.id.clone(), i).is_some() {
                return Err(IngestError::DuplicatePaper(p.id.clone()));
            }
        }
        for (i, c) in concepts.iter().enumerate() {
            if c.id.index() != i {
                return Err(IngestError::Snapshot(format!(
                    "concept ids are not contiguous: position {i} holds id {}",
                    c.id.0
                )));
            }
            if c.key.is_empty() {
                return Err(IngestError::Snapshot(format!(
                    "concept {i} has an empty key"
                )));
            }
        }

        let mut paper_links = vec![Vec::new(); papers.len()];
        for (paper_id, concept) in links {
            let &p = by_id
                .get(&paper_id)
                .ok_or(IngestError::UnknownPaper(paper_id))?;
            if concept.index() >= concepts.len() {
                return Err(IngestError::Snapshot(format!(
                    "link to unknown concept {}",
                    concept.0
                )));
            }
            paper_links[p].push(concept);
        }
        for l in &mut paper_links {
            l.sort_unstable();
            l.dedup();
        }

        let mut edges = BTreeSet::new();
        for (citing, cited) in citations {
            let &a = by_id
                .get(&citing)
                .ok_or(IngestError::UnknownPaper(citing))?;
            let &b = by_id.get(&cited).ok_or(IngestError::UnknownPaper(cited))?;
            if a != b {
                edges.insert((a, b));
            }
        }
        let citations: Vec<(usize, usize)> = edges.into_iter().collect();
        let mut outgoing = vec![Vec::new(); papers.len()];
        for &(a, b) in &citations {
            outgoing[a].push(b);
        }

        Ok(KnowledgeGraph {
            mode,
            papers,
            by_id,
            concepts,
            links: paper_links,
            citations,
            outgoing,
        })
    }

    /// Ingests papers, mentions and citations in one pass.
    pub fn build(
        mode: ScopingMode,
        papers: impl IntoIterator<Item = PaperRecord>,
        mentions: impl IntoIterator<Item = MentionRecord>,
        citations: impl IntoIterator<Item = (String, String)>,
    ) -> Result<(Self, IngestReport), IngestError> {
        let papers = ingest_papers(papers)?;
        let resolution = resolve_concepts(&papers, mentions, mode)?;
        let cites = ingest_citations(&papers, citations);
        let report = IngestReport {
            papers: papers.len(),
            concepts: resolution.concepts.len(),
            links: resolution.links.len(),
            skipped_empty_mentions: resolution.skipped_empty,
            domain_mismatches: resolution.domain_mismatches,
            citations: cites.edges.len(),
            dropped_out_of_kg: cites.dropped_out_of_kg,
            dropped_self_loops: cites.dropped_self_loops,
            dropped_duplicates: cites.dropped_duplicates,
        };
        let kg = KnowledgeGraph::from_parts(
            mode,
            papers,
            resolution.concepts,
            resolution.links,
            cites.edges,
        )?;
        Ok((kg, report))
    }

    pub fn mode(&self) -> ScopingMode {
        self.mode
    }

    /// Papers in ascending id order.
    pub fn papers(&self) -> &[Paper] {
        &self.papers
    }

    pub fn paper_count(&self) -> usize {
        self.papers.len()
    }

    pub fn paper(&self, ordinal: usize) -> &Paper {
        &self.papers[ordinal]
    }

    pub fn ordinal(&self, paper_id: &str) -> Option<usize> {
        self.by_id.get(paper_id).copied()
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    /// Concept ids linked to a paper, ascending.
    pub fn paper_concepts(&self, ordinal: usize) -> &[ConceptId] {
        &self.links[ordinal]
    }

    pub fn concepts_of(&self, paper_id: &str) -> Result<&[ConceptId], KgError> {
        self.ordinal(paper_id)
            .map(|i| self.paper_concepts(i))
            .ok_or_else(|| KgError::UnknownPaper(paper_id.to_string()))
    }

    pub fn link_count(&self) -> usize {
        self.links.iter().map(Vec::len).sum()
    }

    /// Directed citation edges as paper ordinals, sorted.
    pub fn citation_edges(&self) -> &[(usize, usize)] {
        &self.citations
    }

    pub fn citation_count(&self) -> usize {
        self.citations.len()
    }

    /// Ordinals of papers cited by `ordinal`, ascending.
    pub fn cited_by(&self, ordinal: usize) -> &[usize] {
        &self.outgoing[ordinal]
    }

    pub fn has_citation(&self, citing: usize, cited: usize) -> bool {
        self.outgoing[citing].binary_search(&cited).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_codes_round_trip() {
        for d in Domain::ALL {
            assert_eq!(d.code().parse::<Domain>().unwrap(), d);
        }
        assert_eq!("cs".parse::<Domain>().unwrap(), Domain::Cs);
        assert!("Physics".parse::<Domain>().is_err());
    }

    #[test]
    fn from_parts_rejects_dangling_link() {
        let papers = vec![Paper {
            id: "a".into(),
            domain: Domain::Bio,
            title: None,
            abstract_text: None,
        }];
        let err = KnowledgeGraph::from_parts(
            ScopingMode::CrossDomain,
            papers,
            vec![],
            vec![("a".to_string(), ConceptId(0))],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::Snapshot(_)));
    }
}
