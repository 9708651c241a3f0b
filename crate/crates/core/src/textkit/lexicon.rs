use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use super::edit_distance;
use crate::error::{Error, Result};
use crate::resources::ResourceBundle;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhonemeSeq(pub Vec<String>);

impl PhonemeSeq {
    pub fn first(&self) -> Option<&str> {
        self.0.first().map(String::as_str)
    }

    pub fn last(&self) -> Option<&str> {
        self.0.last().map(String::as_str)
    }
}

/// Pronunciation lexicon with a declared phoneme inventory.
///
/// File format: a header `#inventory PH1 PH2 ...`, then `WORD PH1 PH2 ...`
/// per line. Lines starting with `;;;` are comments.
#[derive(Debug, Default)]
pub struct Lexicon {
    inventory: BTreeSet<String>,
    entries: HashMap<String, PhonemeSeq>,
    phone_index: OnceLock<NeighborIndex>,
    letter_index: OnceLock<NeighborIndex>,
}

impl Clone for Lexicon {
    fn clone(&self) -> Self {
        Lexicon {
            inventory: self.inventory.clone(),
            entries: self.entries.clone(),
            phone_index: OnceLock::new(),
            letter_index: OnceLock::new(),
        }
    }
}

impl Lexicon {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut inventory: Option<BTreeSet<String>> = None;
        let mut entries = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with(";;;") {
                continue;
            }
            if let Some(rest) = line.strip_prefix("#inventory") {
                inventory = Some(rest.split_whitespace().map(String::from).collect());
                continue;
            }
            let inv =
                inventory.as_ref().ok_or_else(|| Error::resource(origin, n + 1, "entry before #inventory header"))?;
            let mut fields = line.split_whitespace();
            let word = fields.next().unwrap().to_lowercase();
            let phones: Vec<String> = fields.map(String::from).collect();
            if phones.is_empty() {
                return Err(Error::resource(origin, n + 1, format!("`{word}` has no phonemes")));
            }
            if let Some(bad) = phones.iter().find(|p| !inv.contains(*p)) {
                return Err(Error::resource(origin, n + 1, format!("phoneme `{bad}` not in inventory")));
            }
            entries.entry(word).or_insert(PhonemeSeq(phones));
        }
        Ok(Lexicon { inventory: inventory.unwrap_or_default(), entries, ..Default::default() })
    }

    pub fn inventory(&self) -> &BTreeSet<String> {
        &self.inventory
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, word: &str) -> Option<&PhonemeSeq> {
        if word.is_empty() {
            return None;
        }
        self.entries.get(&word.to_lowercase())
    }

    /// Other lexicon words within phoneme edit distance 1 of `word`
    /// (homophones included), sorted. Out-of-lexicon words are compared by
    /// letter bigrams against the spellings of lexicon words instead.
    pub fn neighbors(&self, word: &str) -> Vec<String> {
        let word = word.to_lowercase();
        match self.entries.get(&word) {
            Some(seq) => {
                let index = self
                    .phone_index
                    .get_or_init(|| NeighborIndex::build(self.entries.iter().map(|(w, s)| (w.clone(), s.0.clone()))));
                index.query(&word, &seq.0)
            }
            None => {
                let key = letter_bigrams(&word);
                if key.is_empty() {
                    return Vec::new();
                }
                let index = self
                    .letter_index
                    .get_or_init(|| NeighborIndex::build(self.entries.keys().map(|w| (w.clone(), letter_bigrams(w)))));
                index.query(&word, &key)
            }
        }
    }
}

/// Dictionary lookup in the bundle's lexicon, after lowercasing.
pub fn phonemes(word: &str, bundle: &ResourceBundle) -> Option<PhonemeSeq> {
    bundle.lexicon.lookup(word).cloned()
}

fn letter_bigrams(word: &str) -> Vec<String> {
    let chars: Vec<char> = word.chars().filter(|c| c.is_alphabetic()).collect();
    chars.windows(2).map(|w| w.iter().collect()).collect()
}

/// Deletion-neighborhood index for edit distance <= 1 queries.
#[derive(Debug)]
struct NeighborIndex {
    words: Vec<(String, Vec<String>)>,
    keys: HashMap<Vec<String>, Vec<usize>>,
}

impl NeighborIndex {
    fn build(items: impl Iterator<Item = (String, Vec<String>)>) -> Self {
        let mut words: Vec<(String, Vec<String>)> = items.collect();
        words.sort();
        let mut keys: HashMap<Vec<String>, Vec<usize>> = HashMap::new();
        for (id, (_, seq)) in words.iter().enumerate() {
            for key in deletion_keys(seq) {
                keys.entry(key).or_default().push(id);
            }
        }
        NeighborIndex { words, keys }
    }

    fn query(&self, word: &str, seq: &[String]) -> Vec<String> {
        let mut ids: BTreeSet<usize> = BTreeSet::new();
        for key in deletion_keys(seq) {
            if let Some(found) = self.keys.get(&key) {
                ids.extend(found);
            }
        }
        ids.into_iter()
            .filter_map(|id| {
                let (w, s) = &self.words[id];
                (w != word && edit_distance(s, seq) <= 1).then(|| w.clone())
            })
            .collect()
    }
}

fn deletion_keys(seq: &[String]) -> Vec<Vec<String>> {
    let mut out = vec![seq.to_vec()];
    for i in 0..seq.len() {
        let mut k = seq.to_vec();
        k.remove(i);
        out.push(k);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "#inventory AH EH ER F IY L R S T TH\nLEICESTER L EH S T ER\nLESTER L EH S T ER\nFREE F R IY\nTHREE TH R IY\nTEA T IY\n";

    #[test]
    fn lookup_is_case_insensitive() {
        let lex = Lexicon::parse(SMALL, "small").unwrap();
        let p = lex.lookup("Leicester").unwrap();
        assert_eq!(p.0, ["L", "EH", "S", "T", "ER"]);
        assert!(lex.lookup("").is_none());
        assert!(lex.lookup("xqzt").is_none());
    }

    #[test]
    fn neighbors_within_one_edit() {
        let lex = Lexicon::parse(SMALL, "small").unwrap();
        assert_eq!(lex.neighbors("leicester"), ["lester"]);
        assert_eq!(lex.neighbors("free"), ["three"]);
        assert!(lex.neighbors("tea").is_empty());
    }

    #[test]
    fn out_of_lexicon_words_use_spelling() {
        let lex = Lexicon::parse(SMALL, "small").unwrap();
        // "lesterr" -> bigrams differ from "lester" by one insertion
        assert_eq!(lex.neighbors("lesterr"), ["lester"]);
        assert!(lex.neighbors("q").is_empty());
    }

    #[test]
    fn unknown_phoneme_is_rejected() {
        let err = Lexicon::parse("#inventory A B\nX A C\n", "bad").unwrap_err();
        assert!(err.to_string().contains("bad:2"));
    }
}
