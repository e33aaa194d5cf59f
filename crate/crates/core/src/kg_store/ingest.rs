use std::collections::{BTreeSet, HashMap};
use std::io::BufRead;

use serde::Deserialize;

use super::{
    Concept, ConceptId, ConceptType, Domain, IngestError, MentionRecord, Paper, Scope, ScopingMode,
};

/// One line of the papers file (JSON Lines).
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct PaperRecord {
    pub id: String,
    pub domain: String,
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default, rename = "abstract")]
    pub abstract_text: Option<String>,
}

impl PaperRecord {
    pub fn new(id: impl Into<String>, domain: Domain) -> Self {
        PaperRecord {
            id: id.into(),
            domain: domain.code().to_string(),
            title: None,
            abstract_text: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConceptResolution {
    pub concepts: Vec<Concept>,
    /// Distinct (paper id, concept id) pairs, sorted by paper position then concept.
    pub links: Vec<(String, ConceptId)>,
    /// Mentions whose surface normalized to the empty string.
    pub skipped_empty: usize,
    /// Mentions whose domain column disagreed with the paper's domain.
    pub domain_mismatches: usize,
}

#[derive(Debug, Clone, Default)]
pub struct CitationIngest {
    pub edges: BTreeSet<(String, String)>,
    pub dropped_out_of_kg: usize,
    pub dropped_self_loops: usize,
    pub dropped_duplicates: usize,
}

impl CitationIngest {
    pub fn dropped(&self) -> usize {
        self.dropped_out_of_kg + self.dropped_self_loops + self.dropped_duplicates
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub papers: usize,
    pub concepts: usize,
    pub links: usize,
    pub skipped_empty_mentions: usize,
    pub domain_mismatches: usize,
    pub citations: usize,
    pub dropped_out_of_kg: usize,
    pub dropped_self_loops: usize,
    pub dropped_duplicates: usize,
}

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String), IngestError>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Ok(l) if l.trim().is_empty() => None,
            Ok(l) => Some(Ok((i + 1, l))),
            Err(e) => Some(Err(IngestError::Io(e))),
        })
}

/// Reads the papers file: one JSON object per line with `id`, `domain`
/// and optional `title` / `abstract`.
pub fn read_papers<R: BufRead>(reader: R) -> Result<Vec<PaperRecord>, IngestError> {
    data_lines(reader)
        .map(|item| {
            let (line, text) = item?;
            serde_json::from_str(&text).map_err(|e| IngestError::Parse {
                line,
                message: format!("invalid paper record: {e}"),
            })
        })
        .collect()
}

/// Reads `paper_id<TAB>surface<TAB>concept_type<TAB>domain` lines.
pub fn read_mentions<R: BufRead>(reader: R) -> Result<Vec<MentionRecord>, IngestError> {
    data_lines(reader)
        .map(|item| {
            let (line, text) = item?;
            let fields: Vec<&str> = text.split('\t').collect();
            let parse_err = |message: String| IngestError::Parse { line, message };
            if fields.len() != 4 {
                return Err(parse_err(format!(
                    "expected 4 tab-separated fields, found {}",
                    fields.len()
                )));
            }
            let concept_type = fields[2]
                .parse::<ConceptType>()
                .map_err(|t| parse_err(format!("unknown concept type {t:?}")))?;
            let domain = fields[3]
                .parse::<Domain>()
                .map_err(|d| parse_err(format!("unknown domain code {d:?}")))?;
            Ok(MentionRecord {
                paper_id: fields[0].trim().to_string(),
                surface: fields[1].to_string(),
                concept_type,
                domain,
            })
        })
        .collect()
}

/// Reads `citing_id<TAB>cited_id` lines.
pub fn read_citations<R: BufRead>(reader: R) -> Result<Vec<(String, String)>, IngestError> {
    data_lines(reader)
        .map(|item| {
            let (line, text) = item?;
            let mut fields = text.split('\t');
            match (fields.next(), fields.next(), fields.next()) {
                (Some(a), Some(b), None) => Ok((a.trim().to_string(), b.trim().to_string())),
                _ => Err(IngestError::Parse {
                    line,
                    message: "expected 2 tab-separated fields".to_string(),
                }),
            }
        })
        .collect()
}

/// Validates paper records and returns them sorted by id.
pub fn ingest_papers(
    source: impl IntoIterator<Item = PaperRecord>,
) -> Result<Vec<Paper>, IngestError> {
    let mut seen = BTreeSet::new();
    let mut papers = Vec::new();
    for record in source {
        let id = record.id.trim().to_string();
        if id.is_empty() {
            return Err(IngestError::EmptyPaperId);
        }
        let domain =
            record
                .domain
                .parse::<Domain>()
                .map_err(|code| IngestError::UnknownDomain {
                    paper_id: id.clone(),
                    code,
                })?;
        if !seen.insert(id.clone()) {
            return Err(IngestError::DuplicatePaper(id));
        }
        papers.push(Paper {
            id,
            domain,
            title: record.title,
            abstract_text: record.abstract_text,
        });
    }
    papers.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(papers)
}

/// Lowercases and collapses runs of whitespace into single spaces.
pub fn normalize_surface(surface: &str) -> String {
    let mut out = String::with_capacity(surface.len());
    for word in surface.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

/// Resolves raw mentions to concepts.
///
/// Identity is `(normalized surface, type)` in cross-domain mode and
/// `(normalized surface, type, paper domain)` in in-domain mode. Concept
/// ids follow the sorted order of identity keys. The paper's own domain
/// decides the scope; the mention's domain column is only cross-checked.
pub fn resolve_concepts(
    papers: &[Paper],
    mentions: impl IntoIterator<Item = MentionRecord>,
    mode: ScopingMode,
) -> Result<ConceptResolution, IngestError> {
    let positions: HashMap<&str, (usize, Domain)> = papers
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), (i, p.domain)))
        .collect();

    let mut skipped_empty = 0;
    let mut domain_mismatches = 0;
    let mut interned: HashMap<(String, ConceptType, Scope), u32> = HashMap::new();
    let mut raw_links: Vec<(usize, u32)> = Vec::new();
    for m in mentions {
        let &(paper, domain) = positions
            .get(m.paper_id.as_str())
            .ok_or_else(|| IngestError::UnknownPaper(m.paper_id.clone()))?;
        if domain != m.domain {
            domain_mismatches += 1;
        }
        let key = normalize_surface(&m.surface);
        if key.is_empty() {
            skipped_empty += 1;
            continue;
        }
        let scope = match mode {
            ScopingMode::CrossDomain => Scope::CrossDomain,
            ScopingMode::InDomain => Scope::InDomain(domain),
        };
        let next = interned.len() as u32;
        let tmp = *interned.entry((key, m.concept_type, scope)).or_insert(next);
        raw_links.push((paper, tmp));
    }
    if skipped_empty > 0 {
        log::warn!("skipped {skipped_empty} mentions with an empty surface form");
    }
    if domain_mismatches > 0 {
        log::warn!("{domain_mismatches} mentions carry a domain different from their paper's");
    }

    let mut identities: Vec<((String, ConceptType, Scope), u32)> = interned.into_iter().collect();
    identities.sort_unstable();
    let mut remap = vec![ConceptId(0); identities.len()];
    let mut concepts = Vec::with_capacity(identities.len());
    for (i, ((key, concept_type, scope), tmp)) in identities.into_iter().enumerate() {
        let id = ConceptId(u32::try_from(i).expect("more than u32::MAX concepts"));
        remap[tmp as usize] = id;
        concepts.push(Concept {
            id,
            key,
            concept_type,
            scope,
        });
    }
    let mut resolved: Vec<(usize, ConceptId)> = raw_links
        .into_iter()
        .map(|(paper, tmp)| (paper, remap[tmp as usize]))
        .collect();
    resolved.sort_unstable();
    resolved.dedup();
    let links = resolved
        .into_iter()
        .map(|(paper, id)| (papers[paper].id.clone(), id))
        .collect();

    Ok(ConceptResolution {
        concepts,
        links,
        skipped_empty,
        domain_mismatches,
    })
}

/// Keeps directed edges whose endpoints are both known papers, dropping
/// self-loops and repeats.
pub fn ingest_citations(
    papers: &[Paper],
    source: impl IntoIterator<Item = (String, String)>,
) -> CitationIngest {
    let known: BTreeSet<&str> = papers.iter().map(|p| p.id.as_str()).collect();
    let mut out = CitationIngest::default();
    for (citing, cited) in source {
        if !known.contains(citing.as_str()) || !known.contains(cited.as_str()) {
            out.dropped_out_of_kg += 1;
        } else if citing == cited {
            out.dropped_self_loops += 1;
        } else if !out.edges.insert((citing, cited)) {
            out.dropped_duplicates += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper(id: &str, domain: Domain) -> Paper {
        Paper {
            id: id.into(),
            domain,
            title: None,
            abstract_text: None,
        }
    }

    fn mention(p: &str, s: &str, t: ConceptType, d: Domain) -> MentionRecord {
        MentionRecord {
            paper_id: p.into(),
            surface: s.into(),
            concept_type: t,
            domain: d,
        }
    }

    #[test]
    fn ingest_three_papers() {
        let papers = ingest_papers(vec![
            PaperRecord::new("c", Domain::Med),
            PaperRecord::new("a", Domain::Cs),
            PaperRecord::new("b", Domain::Bio),
        ])
        .unwrap();
        assert_eq!(papers.len(), 3);
        assert_eq!(
            papers.iter().map(|p| p.id.as_str()).collect::<Vec<_>>(),
            ["a", "b", "c"]
        );
    }

    #[test]
    fn duplicate_paper_id_is_rejected() {
        let err = ingest_papers(vec![
            PaperRecord::new("a", Domain::Cs),
            PaperRecord::new("a", Domain::Cs),
        ])
        .unwrap_err();
        assert_eq!(err.to_string(), "duplicate paper id a");
    }

    #[test]
    fn unknown_domain_is_rejected() {
        let mut r = PaperRecord::new("a", Domain::Cs);
        r.domain = "Physics".into();
        assert!(matches!(
            ingest_papers(vec![r]),
            Err(IngestError::UnknownDomain { .. })
        ));
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_surface("  Neural \t  Network "), "neural network");
        assert_eq!(normalize_surface(" \t "), "");
        assert_eq!(normalize_surface("ÉTAT"), "état");
    }

    #[test]
    fn cross_domain_shares_and_in_domain_splits() {
        let papers = vec![paper("p1", Domain::Cs), paper("p2", Domain::Med)];
        let mentions = vec![
            mention("p1", "Neural Network", ConceptType::Method, Domain::Cs),
            mention("p2", "neural  network", ConceptType::Method, Domain::Med),
        ];
        let cross = resolve_concepts(&papers, mentions.clone(), ScopingMode::CrossDomain).unwrap();
        assert_eq!(cross.concepts.len(), 1);
        assert_eq!(cross.links.len(), 2);
        let inner = resolve_concepts(&papers, mentions, ScopingMode::InDomain).unwrap();
        assert_eq!(inner.concepts.len(), 2);
        assert_eq!(inner.links.len(), 2);
    }

    #[test]
    fn repeated_mentions_collapse_to_one_link() {
        let papers = vec![paper("p", Domain::Ms)];
        let mentions = vec![
            mention("p", "graphene", ConceptType::Material, Domain::Ms),
            mention("p", "Graphene", ConceptType::Material, Domain::Ms),
        ];
        let r = resolve_concepts(&papers, mentions, ScopingMode::CrossDomain).unwrap();
        assert_eq!(r.links.len(), 1);
    }

    #[test]
    fn type_is_part_of_identity() {
        let papers = vec![paper("p", Domain::Che)];
        let mentions = vec![
            mention("p", "water", ConceptType::Material, Domain::Che),
            mention("p", "water", ConceptType::Data, Domain::Che),
        ];
        let r = resolve_concepts(&papers, mentions, ScopingMode::CrossDomain).unwrap();
        assert_eq!(r.concepts.len(), 2);
    }

    #[test]
    fn empty_surface_is_skipped_and_unknown_paper_fails() {
        let papers = vec![paper("p", Domain::Che)];
        let r = resolve_concepts(
            &papers,
            vec![mention("p", "   ", ConceptType::Data, Domain::Che)],
            ScopingMode::CrossDomain,
        )
        .unwrap();
        assert_eq!(r.skipped_empty, 1);
        assert!(r.concepts.is_empty());

        let err = resolve_concepts(
            &papers,
            vec![mention("q", "x", ConceptType::Data, Domain::Che)],
            ScopingMode::CrossDomain,
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::UnknownPaper(id) if id == "q"));
    }

    #[test]
    fn concept_ids_follow_sorted_keys() {
        let papers = vec![paper("p", Domain::Agr)];
        let mentions = vec![
            mention("p", "zeta", ConceptType::Data, Domain::Agr),
            mention("p", "alpha", ConceptType::Data, Domain::Agr),
            mention("p", "mid", ConceptType::Data, Domain::Agr),
        ];
        let r = resolve_concepts(&papers, mentions.clone(), ScopingMode::InDomain).unwrap();
        let keys: Vec<_> = r.concepts.iter().map(|c| c.key.as_str()).collect();
        assert_eq!(keys, ["alpha", "mid", "zeta"]);
        let mut reversed = mentions;
        reversed.reverse();
        let again = resolve_concepts(&papers, reversed, ScopingMode::InDomain).unwrap();
        assert_eq!(r.concepts, again.concepts);
        assert_eq!(r.links, again.links);
    }

    #[test]
    fn citations_keep_direction_and_filter() {
        let papers = vec![paper("a", Domain::Cs), paper("b", Domain::Cs)];
        let both = ingest_citations(
            &papers,
            vec![("a".into(), "b".into()), ("b".into(), "a".into())],
        );
        assert_eq!(both.edges.len(), 2);

        let self_loop = ingest_citations(&papers, vec![("a".into(), "a".into())]);
        assert!(self_loop.edges.is_empty());
        assert_eq!(self_loop.dropped_self_loops, 1);

        let mixed = ingest_citations(
            &papers,
            vec![
                ("a".into(), "b".into()),
                ("a".into(), "b".into()),
                ("a".into(), "zz".into()),
            ],
        );
        assert_eq!(mixed.edges.len(), 1);
        assert_eq!(mixed.dropped_duplicates, 1);
        assert_eq!(mixed.dropped_out_of_kg, 1);
        assert_eq!(mixed.dropped(), 2);
    }

    #[test]
    fn readers_report_line_numbers() {
        let text = "a\tgraphene\tMaterial\tMS\n\nb\tbad\n";
        let err = read_mentions(text.as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::Parse { line: 3, .. }), "{err}");

        let text = "{\"id\":\"a\",\"domain\":\"CS\",\"title\":\"T\"}\nnot json\n";
        let err = read_papers(text.as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::Parse { line: 2, .. }));

        let cites = read_citations("a\tb\n\nb\ta\n".as_bytes()).unwrap();
        assert_eq!(cites.len(), 2);
        assert!(read_citations("a\tb\tc\n".as_bytes()).is_err());
    }
}
