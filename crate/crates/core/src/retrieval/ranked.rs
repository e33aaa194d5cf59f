use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct RankedItem {
    pub doc_id: String,
    pub score: f64,
}

/// Top-k documents for one query, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub query_id: String,
    pub k: usize,
    pub items: Vec<RankedItem>,
}

impl RankedList {
    pub fn new(query_id: impl Into<String>, k: usize, items: Vec<RankedItem>) -> Self {
        RankedList {
            query_id: query_id.into(),
            k,
            items,
        }
    }

    /// A list built from ids alone, with descending placeholder scores.
    pub fn from_ids<S: AsRef<str>>(query_id: impl Into<String>, ids: &[S]) -> Self {
        let n = ids.len();
        let items = ids
            .iter()
            .enumerate()
            .map(|(i, id)| RankedItem {
                doc_id: id.as_ref().to_string(),
                score: (n - i) as f64,
            })
            .collect();
        RankedList::new(query_id, n, items)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|i| i.doc_id.as_str())
    }

    /// `query_id<TAB>rank<TAB>doc_id<TAB>score` lines, ranks from 1 and
    /// scores with six decimals.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (rank, item) in self.items.iter().enumerate() {
            writeln!(
                out,
                "{}\t{}\t{}\t{:.6}",
                self.query_id,
                rank + 1,
                item.doc_id,
                item.score
            )
            .unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_format() {
        let list = RankedList::new(
            "q",
            2,
            vec![
                RankedItem {
                    doc_id: "a".into(),
                    score: 1.0,
                },
                RankedItem {
                    doc_id: "b".into(),
                    score: 1.0 / 3.0,
                },
            ],
        );
        assert_eq!(list.to_tsv(), "q\t1\ta\t1.000000\nq\t2\tb\t0.333333\n");
    }
}
