use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Synonym lists keyed by lowercase headword (`word: syn1, syn2, ...` lines).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Thesaurus {
    entries: BTreeMap<String, Vec<String>>,
}

impl Thesaurus {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (head, syns) =
                line.split_once(':').ok_or_else(|| Error::resource(origin, n + 1, "expected `word: syn, ...`"))?;
            let head = head.trim().to_lowercase();
            let list = entries.entry(head.clone()).or_default();
            for syn in syns.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                if !syn.eq_ignore_ascii_case(&head) && !list.iter().any(|s| s == syn) {
                    list.push(syn.to_string());
                }
            }
        }
        entries.retain(|_, v| !v.is_empty());
        Ok(Thesaurus { entries })
    }

    pub fn synonyms(&self, word: &str) -> &[String] {
        self.entries.get(&word.to_lowercase()).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
