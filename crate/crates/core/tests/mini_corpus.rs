use std::collections::BTreeSet;
use std::path::PathBuf;

use laug::aug_sd::sample_interruption_points;
use laug::aug_tp::{parse_serialized_da, serialize_da};
use laug::corpus::{extract_lu_examples, load_corpus, load_corpus_strict, save_corpus};
use laug::textkit::tokenize_with_spans;
use laug::{Corpus, ResourceBundle, Speaker};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn mini() -> Corpus {
    load_corpus_strict(fixture_path("mini.json")).unwrap()
}

#[test]
fn counts_match_hand_tally() {
    let counts: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture_path("mini.counts.json")).unwrap()).unwrap();
    let c = mini();
    assert_eq!(c.dialogs.len() as u64, counts["dialogs"].as_u64().unwrap());
    let user_turns: usize = c.dialogs.iter().map(|d| d.user_turn_indices().count()).sum();
    assert_eq!(user_turns as u64, counts["user_turns"].as_u64().unwrap());
    for d in &c.dialogs {
        let got: Vec<u64> = d.turns.iter().map(|t| t.da.len() as u64).collect();
        let want: Vec<u64> =
            counts["da_items_per_turn"][&d.id].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        assert_eq!(got, want, "dialog {}", d.id);
    }
    let spans: usize = c.dialogs.iter().flat_map(|d| &d.turns).map(|t| t.spans.len()).sum();
    assert_eq!(spans as u64, counts["value_spans"].as_u64().unwrap());
}

#[test]
fn zero_window_gives_one_example_per_user_turn() {
    let c = mini();
    let examples = extract_lu_examples(&c, 0);
    assert_eq!(examples.len(), 8);
    assert!(examples.iter().all(|e| e.context.len() == 1 && e.context[0].speaker == Speaker::User));
}

#[test]
fn save_load_round_trip_is_byte_stable() {
    let c = mini();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mini.json");
    save_corpus(&c, &path).unwrap();
    let first = std::fs::read(&path).unwrap();
    let back = load_corpus(&path).unwrap();
    assert_eq!(back, c);
    save_corpus(&back, &path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn unicode_offsets_survive_round_trip() {
    let c = mini();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.json");
    save_corpus(&c, &path).unwrap();
    let back = load_corpus(&path).unwrap();
    let turn = back
        .dialogs
        .iter()
        .flat_map(|d| &d.turns)
        .find(|t| t.text.contains("Zürich"))
        .expect("mini corpus has a multi-byte turn");
    let span = turn.spans[0];
    assert_eq!((span.start, span.end), (10, 16));
    assert_eq!(turn.span_text(&span), "Zürich");
}

#[test]
fn empty_corpus_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    save_corpus(&Corpus::default(), &path).unwrap();
    assert_eq!(load_corpus(&path).unwrap(), Corpus::default());
    assert!(std::fs::read_to_string(&path).unwrap().contains("\"dialogs\": []"));
}

#[test]
fn serialized_da_round_trips_on_every_turn() {
    let c = mini();
    for turn in c.dialogs.iter().flat_map(|d| &d.turns).filter(|t| !t.da.is_empty()) {
        let domains: BTreeSet<String> = turn.da.iter().map(|i| i.domain.clone()).collect();
        for starred in [BTreeSet::new(), domains] {
            let (items, marks) = parse_serialized_da(serialize_da(&turn.da, &starred).as_str()).unwrap();
            let mut want = turn.da.clone();
            let mut got = items;
            want.sort_by_key(|i| i.canonical());
            got.sort_by_key(|i| i.canonical());
            assert_eq!(got, want, "{:?}", turn.text);
            assert_eq!(marks, starred);
        }
    }
}

#[test]
fn default_point_table_mean_on_fixture() {
    let c = laug::corpus::parse_corpus(laug::resources::BUNDLED_FIXTURE, "fixture").unwrap();
    let dist = ResourceBundle::bundled().disfluency;
    let seqs: Vec<_> = c
        .dialogs
        .iter()
        .flat_map(|d| &d.turns)
        .filter(|t| t.speaker == Speaker::User)
        .map(|t| tokenize_with_spans(&t.text, &t.spans).unwrap())
        .collect();
    let mut total = 0usize;
    let mut n = 0usize;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let toks = &seqs[seed as usize % seqs.len()];
        total += sample_interruption_points(toks, &dist, &mut rng).len();
        n += 1;
    }
    let mean = total as f64 / n as f64;
    assert!((0.3..=1.5).contains(&mean), "mean points {mean}");
}
