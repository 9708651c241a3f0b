use serde::{Deserialize, Serialize};

use super::{ContextTurn, Corpus, DialogActItem, Speaker};

/// A context window ending in a user turn, with the gold DA of that turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LuExample {
    pub context: Vec<ContextTurn>,
    pub gold: Vec<DialogActItem>,
    pub dialog: String,
    pub turn: usize,
}

impl LuExample {
    /// Text of the final (current user) turn.
    pub fn utterance(&self) -> &str {
        &self.context.last().expect("context ends in a user turn").text
    }
}

/// One example per user turn: the turn plus up to `m` preceding utterances.
///
/// Augmented single-turn dialogs rebuild their window from the stored source
/// context.
pub fn extract_lu_examples(corpus: &Corpus, m: usize) -> Vec<LuExample> {
    let mut out = Vec::new();
    for dialog in &corpus.dialogs {
        for (i, turn) in dialog.turns.iter().enumerate() {
            if turn.speaker != Speaker::User {
                continue;
            }
            let mut history: Vec<ContextTurn> = match &dialog.augmented_from {
                Some(meta) => meta.context.clone(),
                None => Vec::new(),
            };
            history.extend(dialog.turns[..i].iter().map(|t| ContextTurn { speaker: t.speaker, text: t.text.clone() }));
            let skip = history.len().saturating_sub(m);
            let mut context: Vec<ContextTurn> = history.into_iter().skip(skip).collect();
            context.push(ContextTurn { speaker: Speaker::User, text: turn.text.clone() });
            out.push(LuExample { context, gold: turn.da.clone(), dialog: dialog.id.clone(), turn: i });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Dialog, Ontology, Split, Utterance};

    fn corpus(turns: Vec<Utterance>) -> Corpus {
        Corpus::from_dialogs(vec![Dialog::new("d", Split::Train, turns)], Ontology::new())
    }

    fn texts(ex: &LuExample) -> Vec<&str> {
        ex.context.iter().map(|c| c.text.as_str()).collect()
    }

    #[test]
    fn single_user_turn() {
        let ex = extract_lu_examples(&corpus(vec![Utterance::user("u1")]), 2);
        assert_eq!(ex.len(), 1);
        assert_eq!(texts(&ex[0]), ["u1"]);
    }

    #[test]
    fn window_of_two() {
        let c = corpus(vec![Utterance::user("u1"), Utterance::system("s1"), Utterance::user("u2")]);
        let ex = extract_lu_examples(&c, 2);
        assert_eq!(texts(&ex[0]), ["u1"]);
        assert_eq!(texts(&ex[1]), ["u1", "s1", "u2"]);
        assert_eq!(ex[1].turn, 2);
    }

    #[test]
    fn long_history_is_truncated() {
        let c = corpus(vec![
            Utterance::user("u1"),
            Utterance::system("s1"),
            Utterance::user("u2"),
            Utterance::system("s2"),
            Utterance::user("u3"),
        ]);
        let ex = extract_lu_examples(&c, 2);
        assert_eq!(texts(&ex[2]), ["u2", "s2", "u3"]);
        let ex0 = extract_lu_examples(&c, 0);
        assert!(ex0.iter().all(|e| e.context.len() == 1));
    }

    #[test]
    fn empty_corpus_gives_no_examples() {
        assert!(extract_lu_examples(&Corpus::default(), 2).is_empty());
    }
}
