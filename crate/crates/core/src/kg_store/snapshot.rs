use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Concept, ConceptId, IngestError, KnowledgeGraph, Paper, ScopingMode};

pub const SNAPSHOT_FORMAT: &str = "citerec-kg-snapshot";
pub const SNAPSHOT_VERSION: u32 = 1;

/// On-disk form of a [`KnowledgeGraph`]. Links and citations refer to
/// papers by their position in `papers` (ascending id).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KgSnapshot {
    pub format: String,
    pub version: u32,
    pub scoping_mode: ScopingMode,
    pub papers: Vec<Paper>,
    pub concepts: Vec<Concept>,
    pub links: Vec<(u32, ConceptId)>,
    pub citations: Vec<(u32, u32)>,
}

impl KgSnapshot {
    pub fn from_graph(kg: &KnowledgeGraph) -> Self {
        let links = (0..kg.paper_count())
            .flat_map(|p| kg.paper_concepts(p).iter().map(move |&c| (p as u32, c)))
            .collect();
        let citations = kg
            .citation_edges()
            .iter()
            .map(|&(a, b)| (a as u32, b as u32))
            .collect();
        KgSnapshot {
            format: SNAPSHOT_FORMAT.to_string(),
            version: SNAPSHOT_VERSION,
            scoping_mode: kg.mode(),
            papers: kg.papers().to_vec(),
            concepts: kg.concepts().to_vec(),
            links,
            citations,
        }
    }

    pub fn into_graph(self) -> Result<KnowledgeGraph, IngestError> {
        if self.format != SNAPSHOT_FORMAT || self.version != SNAPSHOT_VERSION {
            return Err(IngestError::Snapshot(format!(
                "unsupported snapshot {} v{} (expected {SNAPSHOT_FORMAT} v{SNAPSHOT_VERSION})",
                self.format, self.version
            )));
        }
        if self.papers.windows(2).any(|w| w[0].id >= w[1].id) {
            return Err(IngestError::Snapshot(
                "papers are not in strictly ascending id order".to_string(),
            ));
        }
        let papers = &self.papers;
        let id_of = |i: u32| -> Result<String, IngestError> {
            papers
                .get(i as usize)
                .map(|p| p.id.clone())
                .ok_or_else(|| IngestError::Snapshot(format!("paper position {i} out of range")))
        };
        let links = self
            .links
            .iter()
            .map(|&(p, c)| Ok((id_of(p)?, c)))
            .collect::<Result<Vec<_>, IngestError>>()?;
        let citations = self
            .citations
            .iter()
            .map(|&(a, b)| Ok((id_of(a)?, id_of(b)?)))
            .collect::<Result<Vec<_>, IngestError>>()?;
        KnowledgeGraph::from_parts(
            self.scoping_mode,
            self.papers,
            self.concepts,
            links,
            citations,
        )
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<(), IngestError> {
        serde_json::to_writer(writer, self).map_err(|e| IngestError::Snapshot(e.to_string()))
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self, IngestError> {
        serde_json::from_reader(reader).map_err(|e| IngestError::Snapshot(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg_store::{kg_stats, ConceptType, Domain, MentionRecord, PaperRecord};

    #[test]
    fn snapshot_preserves_graph() {
        let (kg, _) = KnowledgeGraph::build(
            ScopingMode::InDomain,
            vec![
                PaperRecord::new("x", Domain::Ast),
                PaperRecord::new("y", Domain::Ast),
            ],
            vec![MentionRecord {
                paper_id: "y".into(),
                surface: "dark matter".into(),
                concept_type: ConceptType::Material,
                domain: Domain::Ast,
            }],
            vec![("x".to_string(), "y".to_string())],
        )
        .unwrap();
        let mut buf = Vec::new();
        KgSnapshot::from_graph(&kg).write_json(&mut buf).unwrap();
        let back = KgSnapshot::read_json(buf.as_slice())
            .unwrap()
            .into_graph()
            .unwrap();
        assert_eq!(back.papers(), kg.papers());
        assert_eq!(back.concepts(), kg.concepts());
        assert_eq!(back.citation_edges(), kg.citation_edges());
        assert_eq!(back.paper_concepts(1), kg.paper_concepts(1));
        assert_eq!(kg_stats(&back), kg_stats(&kg));
    }

    #[test]
    fn rejects_foreign_version() {
        let snap = KgSnapshot {
            format: SNAPSHOT_FORMAT.into(),
            version: 99,
            scoping_mode: ScopingMode::InDomain,
            papers: vec![],
            concepts: vec![],
            links: vec![],
            citations: vec![],
        };
        assert!(snap.into_graph().is_err());
    }
}
