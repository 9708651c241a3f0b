use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Corpus, Dialog, Ontology};
use crate::error::{Error, Result};
use crate::util::write_atomic;

#[derive(Serialize, Deserialize)]
struct CorpusFile {
    dialogs: Vec<Dialog>,
    #[serde(default, skip_serializing_if = "Ontology::is_empty")]
    ontology: Ontology,
}

/// Parses a native-format corpus document. Dialogs that violate annotation
/// invariants are loaded into quarantine; see [`Corpus::issues`].
pub fn parse_corpus(json: &str, origin: &str) -> Result<Corpus> {
    let file: CorpusFile =
        serde_json::from_str(json).map_err(|e| Error::Parse { origin: origin.to_string(), message: e.to_string() })?;
    Ok(Corpus::from_dialogs(file.dialogs, file.ontology))
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let corpus = parse_corpus(&json, &path.display().to_string())?;
    for issue in corpus.issues() {
        log::warn!("{}: quarantined {}", path.display(), issue);
    }
    Ok(corpus)
}

/// Like [`load_corpus`] but fails on the first file with any validation issue.
pub fn load_corpus_strict(path: impl AsRef<Path>) -> Result<Corpus> {
    let corpus = load_corpus(path)?;
    if corpus.quarantine.is_empty() {
        Ok(corpus)
    } else {
        Err(Error::Validation(corpus.issues().cloned().collect()))
    }
}

/// Serializes with a fixed key order, two-space indentation and a trailing newline.
pub fn to_json_string(corpus: &Corpus) -> String {
    let file = CorpusFile { dialogs: corpus.dialogs.clone(), ontology: corpus.ontology.clone() };
    let mut s = serde_json::to_string_pretty(&file).expect("corpus serializes");
    s.push('\n');
    s
}

pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), to_json_string(corpus).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Split, Utterance};

    const MINIMAL: &str = r#"{ "dialogs": [ { "id": "d1", "split": "train", "turns": [
        { "speaker": "user", "text": "I want to go to Cambridge .",
          "da": [ {"domain":"attraction","intent":"inform","slot":"dest","value":"Cambridge"} ],
          "spans": [ {"item": 0, "start": 16, "end": 25} ] },
        { "speaker": "system", "text": "Sure." } ] } ] }"#;

    #[test]
    fn minimal_file_loads() {
        let c = parse_corpus(MINIMAL, "inline").unwrap();
        assert_eq!(c.dialogs.len(), 1);
        assert_eq!(c.dialogs[0].turns[0].da.len(), 1);
        assert!(c.quarantine.is_empty());
        assert_eq!(c.ontology["attraction-dest"], vec!["Cambridge"]);
    }

    #[test]
    fn span_mismatch_names_the_turn() {
        let bad = MINIMAL.replace("\"start\": 16", "\"start\": 15");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, bad).unwrap();
        match load_corpus_strict(&path) {
            Err(Error::Validation(issues)) => {
                assert_eq!(issues[0].dialog, "d1");
                assert_eq!(issues[0].turn, 0);
            }
            other => panic!("expected validation error, got {other:?}"),
        }
        let lenient = load_corpus(&path).unwrap();
        assert!(lenient.is_quarantined("d1"));
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(parse_corpus("{ \"dialogs\": [", "x"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_corpus(r#"{"dialogs":[{"id":"a","split":"train","turns":[{"speaker":"bot","text":""}]}]}"#, "x"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn empty_corpus_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.json");
        let c = Corpus::default();
        save_corpus(&c, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "{\n  \"dialogs\": []\n}\n");
        assert_eq!(load_corpus(&path).unwrap(), c);
    }

    #[test]
    fn unicode_offsets_survive_round_trip() {
        let u = Utterance::user("Je vais à Zürich, près de Genève.").with_value("train", "inform", "dest", "Genève");
        assert_eq!((u.spans[0].start, u.spans[0].end), (26, 32));
        let c = Corpus::from_dialogs(vec![Dialog::new("u", Split::Test, vec![u])], Ontology::new());
        let back = parse_corpus(&to_json_string(&c), "rt").unwrap();
        assert_eq!(back, c);
        let turn = &back.dialogs[0].turns[0];
        assert_eq!(turn.span_text(&turn.spans[0]), "Genève");
    }
}
