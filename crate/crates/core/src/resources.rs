//! Bundled linguistic resources and their file loaders.

use std::collections::HashSet;
use std::path::Path;

use crate::aug_sd::DisfluencyDistributions;
use crate::aug_sr::ConfusionTable;
use crate::aug_wp::UnseenValuePool;
use crate::error::{Error, Result};
use crate::textkit::{Lexicon, Thesaurus};

pub const BUNDLED_LEXICON: &str = include_str!("../resources/lexicon.txt");
pub const BUNDLED_THESAURUS: &str = include_str!("../resources/thesaurus.txt");
pub const BUNDLED_STOPWORDS: &str = include_str!("../resources/stopwords.txt");
pub const BUNDLED_CONFUSION: &str = include_str!("../resources/confusion.txt");
pub const BUNDLED_DISFLUENCY: &str = include_str!("../resources/disfluency.txt");
pub const BUNDLED_POOLS: &str = include_str!("../resources/pools.txt");
/// The 200-user-utterance fixture corpus (50 dialogs, train/validation/test).
pub const BUNDLED_FIXTURE: &str = include_str!("../resources/corpus/fixture.json");

#[derive(Debug, Clone)]
pub struct ResourceBundle {
    pub thesaurus: Thesaurus,
    pub stopwords: HashSet<String>,
    pub lexicon: Lexicon,
    pub confusion: ConfusionTable,
    pub disfluency: DisfluencyDistributions,
    pub pools: UnseenValuePool,
}

impl ResourceBundle {
    /// Resources compiled into the library.
    pub fn bundled() -> Self {
        ResourceBundle {
            thesaurus: Thesaurus::parse(BUNDLED_THESAURUS, "thesaurus.txt").expect("bundled thesaurus"),
            stopwords: parse_stopwords(BUNDLED_STOPWORDS),
            lexicon: Lexicon::parse(BUNDLED_LEXICON, "lexicon.txt").expect("bundled lexicon"),
            confusion: ConfusionTable::parse(BUNDLED_CONFUSION, "confusion.txt").expect("bundled confusion table"),
            disfluency: DisfluencyDistributions::parse(BUNDLED_DISFLUENCY, "disfluency.txt")
                .expect("bundled disfluency distributions"),
            pools: UnseenValuePool::parse(BUNDLED_POOLS, "pools.txt").expect("bundled pools"),
        }
    }

    pub fn with_thesaurus_file(mut self, path: &Path) -> Result<Self> {
        self.thesaurus = Thesaurus::parse(&read(path)?, &path.display().to_string())?;
        Ok(self)
    }

    pub fn with_stopwords_file(mut self, path: &Path) -> Result<Self> {
        self.stopwords = parse_stopwords(&read(path)?);
        Ok(self)
    }

    pub fn with_lexicon_file(mut self, path: &Path) -> Result<Self> {
        self.lexicon = Lexicon::parse(&read(path)?, &path.display().to_string())?;
        Ok(self)
    }

    pub fn with_confusion_file(mut self, path: &Path) -> Result<Self> {
        self.confusion = ConfusionTable::parse(&read(path)?, &path.display().to_string())?;
        Ok(self)
    }

    pub fn with_disfluency_file(mut self, path: &Path) -> Result<Self> {
        self.disfluency = DisfluencyDistributions::parse(&read(path)?, &path.display().to_string())?;
        Ok(self)
    }

    pub fn with_pools_file(mut self, path: &Path) -> Result<Self> {
        self.pools = UnseenValuePool::parse(&read(path)?, &path.display().to_string())?;
        Ok(self)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Whitespace-separated lowercase words; `#` starts a comment line.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace)
        .map(str::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textkit::phonemes;

    #[test]
    fn bundled_resources_parse() {
        let b = ResourceBundle::bundled();
        assert!(b.lexicon.len() > 5000);
        assert!(b.stopwords.contains("the"));
        assert!(b.thesaurus.synonyms("want").contains(&"wishing".to_string()));
        assert!(!b.pools.is_empty());
    }

    #[test]
    fn bundled_lexicon_lookup() {
        let b = ResourceBundle::bundled();
        let p = phonemes("Cambridge", &b).unwrap();
        assert_eq!(p.0, ["K", "EY", "M", "B", "R", "IH", "JH"]);
        assert!(p.0.iter().all(|ph| b.lexicon.inventory().contains(ph)));
        assert!(phonemes("", &b).is_none());
        assert!(phonemes("xqzt", &b).is_none());
    }
}
