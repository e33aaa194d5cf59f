use std::fmt::Write as _;

use super::{Domain, KnowledgeGraph, Scope, ScopingMode};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DomainCounts {
    pub papers: usize,
    pub citations: usize,
    pub concepts: usize,
}

/// Per-domain corpus statistics.
///
/// Citations are attributed to the citing paper's domain. In cross-domain
/// mode a concept linked from papers of more than one domain is counted
/// once under `mix` and under no single domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KgStats {
    pub mode: ScopingMode,
    pub per_domain: [DomainCounts; 10],
    pub mix_concepts: usize,
    pub total: DomainCounts,
}

impl KgStats {
    pub fn domain(&self, domain: Domain) -> DomainCounts {
        self.per_domain[domain.index()]
    }

    /// Tab-separated table: one column per domain, then MIX and Total.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str("metric");
        for d in Domain::ALL {
            write!(out, "\t{d}").unwrap();
        }
        out.push_str("\tMIX\tTotal\n");

        let mut row = |label: &str, pick: fn(&DomainCounts) -> usize, mix: Option<usize>| {
            out.push_str(label);
            for counts in &self.per_domain {
                write!(out, "\t{}", pick(counts)).unwrap();
            }
            match mix {
                Some(m) => write!(out, "\t{m}").unwrap(),
                None => out.push_str("\t-"),
            }
            writeln!(out, "\t{}", pick(&self.total)).unwrap();
        };
        row("# abstracts", |c| c.papers, None);
        row("# citations", |c| c.citations, None);
        let mix = (self.mode == ScopingMode::CrossDomain).then_some(self.mix_concepts);
        let label = format!("KG concepts ({} KG)", self.mode);
        row(&label, |c| c.concepts, mix);
        out
    }
}

pub fn kg_stats(kg: &KnowledgeGraph) -> KgStats {
    let mut per_domain = [DomainCounts::default(); 10];
    for p in kg.papers() {
        per_domain[p.domain.index()].papers += 1;
    }
    for &(citing, _) in kg.citation_edges() {
        per_domain[kg.paper(citing).domain.index()].citations += 1;
    }

    // Bit i set when a paper of domain i links the concept.
    let mut linked_from = vec![0u16; kg.concept_count()];
    for (ordinal, paper) in kg.papers().iter().enumerate() {
        let bit = 1u16 << paper.domain.index();
        for c in kg.paper_concepts(ordinal) {
            linked_from[c.index()] |= bit;
        }
    }
    let mut mix_concepts = 0;
    for (concept, mask) in kg.concepts().iter().zip(linked_from) {
        let home = match concept.scope {
            Scope::InDomain(d) => Some(d),
            Scope::CrossDomain if mask.count_ones() == 1 => {
                Some(Domain::ALL[mask.trailing_zeros() as usize])
            }
            Scope::CrossDomain if mask.count_ones() > 1 => None,
            // Concepts without links only arise from hand-built graphs.
            Scope::CrossDomain => continue,
        };
        match home {
            Some(d) => per_domain[d.index()].concepts += 1,
            None => mix_concepts += 1,
        }
    }

    let total = per_domain.iter().fold(
        DomainCounts {
            concepts: mix_concepts,
            ..DomainCounts::default()
        },
        |acc, c| DomainCounts {
            papers: acc.papers + c.papers,
            citations: acc.citations + c.citations,
            concepts: acc.concepts + c.concepts,
        },
    );

    KgStats {
        mode: kg.mode(),
        per_domain,
        mix_concepts,
        total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg_store::{ConceptType, MentionRecord, PaperRecord};

    fn toy(mode: ScopingMode) -> KnowledgeGraph {
        let papers = vec![
            PaperRecord::new("a", Domain::Cs),
            PaperRecord::new("b", Domain::Cs),
            PaperRecord::new("c", Domain::Med),
        ];
        let m = |p: &str, s: &str, d| MentionRecord {
            paper_id: p.into(),
            surface: s.into(),
            concept_type: ConceptType::Method,
            domain: d,
        };
        let mentions = vec![
            m("a", "neural network", Domain::Cs),
            m("c", "Neural Network", Domain::Med),
            m("b", "svm", Domain::Cs),
            m("c", "mri", Domain::Med),
        ];
        let cites = vec![
            ("a".to_string(), "b".to_string()),
            ("c".to_string(), "a".to_string()),
            ("c".to_string(), "b".to_string()),
        ];
        KnowledgeGraph::build(mode, papers, mentions, cites)
            .unwrap()
            .0
    }

    #[test]
    fn empty_graph_gives_zero_table() {
        let kg = KnowledgeGraph::build(
            ScopingMode::CrossDomain,
            Vec::<PaperRecord>::new(),
            vec![],
            vec![],
        )
        .unwrap()
        .0;
        let s = kg_stats(&kg);
        assert_eq!(s.total, DomainCounts::default());
        assert_eq!(s.mix_concepts, 0);
        assert!(s.per_domain.iter().all(|c| *c == DomainCounts::default()));
    }

    #[test]
    fn cross_domain_counts_mix() {
        let s = kg_stats(&toy(ScopingMode::CrossDomain));
        assert_eq!(s.mix_concepts, 1);
        assert_eq!(s.domain(Domain::Cs).concepts, 1);
        assert_eq!(s.domain(Domain::Med).concepts, 1);
        assert_eq!(s.total.concepts, 3);
        assert_eq!(s.domain(Domain::Cs).citations, 1);
        assert_eq!(s.domain(Domain::Med).citations, 2);
        assert_eq!(s.total.papers, 3);
    }

    #[test]
    fn in_domain_has_no_mix() {
        let s = kg_stats(&toy(ScopingMode::InDomain));
        assert_eq!(s.mix_concepts, 0);
        assert_eq!(s.domain(Domain::Cs).concepts, 2);
        assert_eq!(s.domain(Domain::Med).concepts, 2);
        assert_eq!(s.total.concepts, 4);
    }

    #[test]
    fn tsv_layout() {
        let tsv = kg_stats(&toy(ScopingMode::CrossDomain)).to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[0],
            "metric\tAgr\tAst\tBio\tCS\tChe\tES\tEng\tMS\tMat\tMed\tMIX\tTotal"
        );
        assert_eq!(lines[1], "# abstracts\t0\t0\t0\t2\t0\t0\t0\t0\t0\t1\t-\t3");
        assert_eq!(
            lines[3],
            "KG concepts (cross-domain KG)\t0\t0\t0\t1\t0\t0\t0\t0\t0\t1\t1\t3"
        );
    }
}
