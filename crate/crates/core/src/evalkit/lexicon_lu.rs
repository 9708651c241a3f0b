use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DialogActItem, LuExample, Split};
use crate::error::{Error, Result};
use crate::resources::{parse_stopwords, BUNDLED_STOPWORDS};
use crate::textkit::{char_slice, lex, Token};

/// A cue word (non-stopword outside value spans) must co-occur with its act
/// or domain in at least this share of the utterances containing it.
const CUE_ASSOCIATION: f64 = 0.6;
const CUE_MIN_COUNT: usize = 2;

type Tuple = (String, String, String);
type ActKey = (String, String, String, String);

/// Lexicon-lookup language understanding: exact value matches plus keyword
/// triggers for valueless acts (requests, greetings, thanks).
///
/// A value seen under several (domain, intent, slot) tuples is resolved with
/// domain cue words from the utterance (or, failing that, its context) and
/// with the words right before and after the match; `value_map` is the
/// fallback when no cue applies.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LexiconLu {
    /// Normalized value -> most frequent (domain, intent, slot).
    pub value_map: BTreeMap<String, Tuple>,
    /// Keyword -> valueless act template (value is `?` or empty).
    pub keyword_map: BTreeMap<String, DialogActItem>,
    /// Keyword -> (domain, share of its utterances labelled with it).
    pub domain_cues: BTreeMap<String, (String, f64)>,
    value_tuples: BTreeMap<String, BTreeMap<Tuple, usize>>,
    /// `<word` / `>word` (word before / after a value) -> tuple counts.
    neighbor_cues: BTreeMap<String, BTreeMap<Tuple, usize>>,
    longest_value: usize,
}

fn stopwords() -> &'static HashSet<String> {
    static WORDS: OnceLock<HashSet<String>> = OnceLock::new();
    WORDS.get_or_init(|| parse_stopwords(BUNDLED_STOPWORDS))
}

fn key_of(words: &[String]) -> String {
    words.join(" ")
}

fn lower_words(text: &str) -> Vec<Token> {
    lex(text).into_iter().filter(Token::is_word).collect()
}

fn most_frequent<K: Ord + Clone>(counts: &BTreeMap<K, usize>) -> Option<(K, usize)> {
    // max_by_key keeps the last maximum; walking in reverse makes ties
    // resolve to the smallest key.
    counts.iter().rev().max_by_key(|(_, &n)| n).map(|(k, &n)| (k.clone(), n))
}

/// Keeps, per word, the label it co-occurs with strongly enough, with the
/// strength of the association.
fn associations<L: Ord + Clone>(
    words: &BTreeMap<String, usize>,
    pairs: &BTreeMap<String, BTreeMap<L, usize>>,
) -> BTreeMap<String, (L, f64)> {
    pairs
        .iter()
        .filter_map(|(w, labels)| {
            let (label, n) = most_frequent(labels)?;
            let share = n as f64 / words[w] as f64;
            (n >= CUE_MIN_COUNT && share >= CUE_ASSOCIATION).then(|| (w.clone(), (label, share)))
        })
        .collect()
}

fn bump<K: Ord, L: Ord>(map: &mut BTreeMap<K, BTreeMap<L, usize>>, key: K, label: L) {
    *map.entry(key).or_default().entry(label).or_default() += 1;
}

impl LexiconLu {
    /// Learns all maps from the training split.
    pub fn train(corpus: &Corpus) -> Result<Self> {
        let mut lu = LexiconLu::default();
        let mut word_counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut act_pairs: BTreeMap<String, BTreeMap<ActKey, usize>> = BTreeMap::new();
        let mut domain_pairs: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        let mut seen_turns = 0;
        for dialog in corpus.dialogs_in(Split::Train) {
            for i in dialog.user_turn_indices() {
                let u = &dialog.turns[i];
                seen_turns += 1;
                let toks = lower_words(&u.text);
                let lowered: Vec<String> = toks.iter().map(|t| t.surface.to_lowercase()).collect();
                for span in &u.spans {
                    let item = &u.da[span.item_index];
                    let words: Vec<String> =
                        lower_words(&item.value).into_iter().map(|t| t.surface.to_lowercase()).collect();
                    if words.is_empty() {
                        continue;
                    }
                    let (d, it, s, _) = item.canonical();
                    let tuple = (d, it, s);
                    bump(&mut lu.value_tuples, key_of(&words), tuple.clone());
                    if let Some(k) = toks.iter().rposition(|t| t.char_end <= span.start) {
                        bump(&mut lu.neighbor_cues, format!("<{}", lowered[k]), tuple.clone());
                    }
                    if let Some(k) = toks.iter().position(|t| t.char_start >= span.end) {
                        bump(&mut lu.neighbor_cues, format!(">{}", lowered[k]), tuple.clone());
                    }
                }
                // Values without a span still count toward the value map.
                let spanned: HashSet<usize> = u.spans.iter().map(|s| s.item_index).collect();
                for (_, item) in u.da.iter().enumerate().filter(|(k, i)| i.has_value() && !spanned.contains(k)) {
                    let words: Vec<String> =
                        lower_words(&item.value).into_iter().map(|t| t.surface.to_lowercase()).collect();
                    if !words.is_empty() {
                        let (d, it, s, _) = item.canonical();
                        bump(&mut lu.value_tuples, key_of(&words), (d, it, s));
                    }
                }
                let inside = |t: &Token| u.spans.iter().any(|s| t.char_start < s.end && s.start < t.char_end);
                let cues: BTreeSet<String> = toks
                    .iter()
                    .zip(&lowered)
                    .filter(|(t, w)| !inside(t) && !stopwords().contains(*w))
                    .map(|(_, w)| w.clone())
                    .collect();
                let acts: BTreeSet<(String, String, String, String)> =
                    u.da.iter().filter(|i| !i.has_value()).map(DialogActItem::canonical).collect();
                let domains: BTreeSet<&str> =
                    u.da.iter().map(|i| i.domain.as_str()).filter(|d| *d != "general").collect();
                for w in &cues {
                    *word_counts.entry(w.clone()).or_default() += 1;
                    for a in &acts {
                        bump(&mut act_pairs, w.clone(), a.clone());
                    }
                    for d in &domains {
                        bump(&mut domain_pairs, w.clone(), d.to_string());
                    }
                }
            }
        }
        if seen_turns == 0 {
            return Err(Error::EmptyTrain);
        }
        for (value, tuples) in &lu.value_tuples {
            if let Some((t, _)) = most_frequent(tuples) {
                lu.longest_value = lu.longest_value.max(value.split(' ').count());
                lu.value_map.insert(value.clone(), t);
            }
        }
        lu.keyword_map = associations(&word_counts, &act_pairs)
            .into_iter()
            .map(|(w, ((d, i, s, v), _))| (w, DialogActItem::new(&d, &i, &s, &v)))
            .collect();
        lu.domain_cues = associations(&word_counts, &domain_pairs);
        Ok(lu)
    }

    /// Domain votes, each cue word adding its association strength.
    fn cued_domains<'a>(&self, words: impl Iterator<Item = &'a String>) -> BTreeMap<String, f64> {
        let mut votes = BTreeMap::new();
        for (d, share) in words.filter_map(|w| self.domain_cues.get(w)) {
            *votes.entry(d.clone()).or_insert(0.0) += share;
        }
        votes
    }

    /// Tags the final utterance; domain cues fall back to the most recent
    /// context turn that has any.
    pub fn predict(&self, example: &LuExample) -> Vec<DialogActItem> {
        let text = example.utterance();
        let own =
            self.cued_domains(lower_words(text).iter().map(|t| t.surface.to_lowercase()).collect::<Vec<_>>().iter());
        let domains = if own.is_empty() {
            example.context[..example.context.len() - 1]
                .iter()
                .rev()
                .map(|t| {
                    self.cued_domains(
                        lower_words(&t.text).iter().map(|t| t.surface.to_lowercase()).collect::<Vec<_>>().iter(),
                    )
                })
                .find(|d| !d.is_empty())
                .unwrap_or_default()
        } else {
            own
        };
        self.tag(text, &domains)
    }

    /// Tags `text` alone, using only its own domain cues.
    pub fn predict_text(&self, text: &str) -> Vec<DialogActItem> {
        let words: Vec<String> = lower_words(text).iter().map(|t| t.surface.to_lowercase()).collect();
        self.tag(text, &self.cued_domains(words.iter()))
    }

    fn resolve(
        &self,
        key: &str,
        prev: Option<&String>,
        next: Option<&String>,
        domains: &BTreeMap<String, f64>,
    ) -> Option<Tuple> {
        let tuples = self.value_tuples.get(key)?;
        let vote = |t: &Tuple| domains.get(&t.0).copied().unwrap_or(0.0);
        let best_vote = tuples.keys().map(vote).fold(0.0, f64::max);
        let pool: Vec<(&Tuple, usize)> =
            tuples.iter().filter(|(t, _)| vote(t) == best_vote).map(|(t, &n)| (t, n)).collect();
        let cue = |t: &Tuple| -> usize {
            [prev.map(|w| format!("<{w}")), next.map(|w| format!(">{w}"))]
                .into_iter()
                .flatten()
                .filter_map(|k| self.neighbor_cues.get(&k)?.get(t))
                .sum()
        };
        pool.into_iter()
            .rev()
            .max_by_key(|&(t, n)| (cue(t), n))
            .map(|(t, _)| t.clone())
            .or_else(|| self.value_map.get(key).cloned())
    }

    /// Longest non-overlapping value matches, left to right, then keyword acts.
    fn tag(&self, text: &str, domains: &BTreeMap<String, f64>) -> Vec<DialogActItem> {
        let toks = lower_words(text);
        let lowered: Vec<String> = toks.iter().map(|t| t.surface.to_lowercase()).collect();
        let mut out: Vec<DialogActItem> = Vec::new();
        let mut covered = vec![false; toks.len()];
        let mut i = 0;
        while i < toks.len() {
            let max = self.longest_value.min(toks.len() - i);
            let hit = (1..=max).rev().find_map(|n| {
                let key = key_of(&lowered[i..i + n]);
                self.value_map.contains_key(&key).then_some((n, key))
            });
            match hit {
                Some((n, key)) => {
                    let prev = i.checked_sub(1).map(|k| &lowered[k]);
                    let (d, it, s) =
                        self.resolve(&key, prev, lowered.get(i + n), domains).expect("key is in the value map");
                    let surface = char_slice(text, toks[i].char_start, toks[i + n - 1].char_end);
                    out.push(DialogActItem::new(&d, &it, &s, surface));
                    covered[i..i + n].iter_mut().for_each(|c| *c = true);
                    i += n;
                }
                None => i += 1,
            }
        }
        for (w, _) in lowered.iter().zip(&covered).filter(|(_, c)| !**c) {
            if let Some(act) = self.keyword_map.get(w) {
                out.push(act.clone());
            }
        }
        crate::corpus::dedup_da(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ContextTurn, Dialog, Ontology, Speaker, Utterance};

    fn corpus() -> Corpus {
        let mut dialogs = Vec::new();
        for (k, (place, day)) in [("Ely", "monday"), ("Leeds", "friday"), ("Ely", "sunday")].into_iter().enumerate() {
            let u = Utterance::user(&format!("I need a train to {place} on {day}, what is the price?"))
                .with_value("train", "inform", "dest", place)
                .with_value("train", "inform", "day", day)
                .with_act("train", "request", "price", "?");
            let thanks = Utterance::user("Thanks, bye.").with_act("general", "thank", "", "");
            dialogs.push(Dialog::new(&format!("d{k}"), Split::Train, vec![u, Utterance::system("Ok."), thanks]));
        }
        for (k, n) in ["2", "3"].into_iter().enumerate() {
            let hotel =
                Utterance::user(&format!("A hotel room for {n} people.")).with_value("hotel", "inform", "people", n);
            let stay =
                Utterance::user(&format!("The hotel stay is {n} nights.")).with_value("hotel", "inform", "stay", n);
            let table = Utterance::user(&format!("Book a table for {n} people.")).with_value(
                "restaurant",
                "inform",
                "people",
                n,
            );
            let short_table =
                Utterance::user(&format!("A table for {n} people.")).with_value("restaurant", "inform", "people", n);
            dialogs.push(Dialog::new(
                &format!("n{k}"),
                Split::Train,
                vec![
                    hotel,
                    Utterance::system("Ok."),
                    stay,
                    Utterance::system("Ok."),
                    table,
                    Utterance::system("Ok."),
                    short_table,
                ],
            ));
        }
        Corpus::from_dialogs(dialogs, Ontology::new())
    }

    #[test]
    fn seen_values_and_keywords() {
        let lu = LexiconLu::train(&corpus()).unwrap();
        let pred = lu.predict_text("Any train to Ely on Friday? And the price please.");
        assert!(pred.contains(&DialogActItem::new("train", "inform", "dest", "ely")));
        assert!(pred.contains(&DialogActItem::new("train", "inform", "day", "Friday")));
        assert!(pred.contains(&DialogActItem::new("train", "request", "price", "?")));
        let thanks = lu.predict_text("thanks a lot");
        assert_eq!(thanks, vec![DialogActItem::new("general", "thank", "", "")]);
    }

    #[test]
    fn unseen_value_is_missed() {
        let lu = LexiconLu::train(&corpus()).unwrap();
        let pred = lu.predict_text("a train to Liverpool");
        assert!(pred.iter().all(|i| i.slot != "dest"));
    }

    #[test]
    fn cues_resolve_shared_values() {
        let lu = LexiconLu::train(&corpus()).unwrap();
        assert_eq!(lu.domain_cues["table"].0, "restaurant");
        assert_eq!(
            lu.predict_text("a table for 3 please"),
            vec![DialogActItem::new("restaurant", "inform", "people", "3")]
        );
        assert_eq!(lu.predict_text("the hotel, 3 nights"), vec![DialogActItem::new("hotel", "inform", "stay", "3")]);
        let ex = LuExample {
            context: vec![
                ContextTurn { speaker: Speaker::User, text: "I need a hotel.".into() },
                ContextTurn { speaker: Speaker::System, text: "Ok.".into() },
                ContextTurn { speaker: Speaker::User, text: "For 2.".into() },
            ],
            gold: vec![],
            dialog: "x".into(),
            turn: 2,
        };
        assert_eq!(lu.predict(&ex), vec![DialogActItem::new("hotel", "inform", "people", "2")]);
    }

    #[test]
    fn needs_training_turns() {
        assert!(matches!(LexiconLu::train(&Corpus::default()), Err(Error::EmptyTrain)));
    }
}
