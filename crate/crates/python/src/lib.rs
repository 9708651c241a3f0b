//! Python bindings. Corpora and record lists cross the boundary as JSON
//! strings in the native corpus format; small results come back as Python
//! values.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use laug::corpus::{parse_corpus, to_json_string};
use laug::evalkit::{change_rates as rates, overall_f1 as f1};
use laug::pipeline::{Augmenter as CoreAugmenter, RunConfig};
use laug::{AugmentationRecord, Corpus, Dialog, DialogActItem, Error, Method, Split, Utterance};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::GeneratorUnavailable(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn method(name: &str) -> PyResult<Method> {
    name.parse().map_err(to_py)
}

fn corpus(json: &str) -> PyResult<Corpus> {
    parse_corpus(json, "<python>").map_err(to_py)
}

type Item = (String, String, String, String);

fn items(raw: Vec<Item>) -> Vec<DialogActItem> {
    raw.iter().map(|(d, i, s, v)| DialogActItem::new(d, i, s, v)).collect()
}

/// `2 * LCS / (len(a) + len(b))` over lowercased characters.
#[pyfunction]
fn fuzzy_ratio(a: &str, b: &str) -> f64 {
    laug::textkit::fuzzy_ratio(a, b)
}

/// Clock times, integers and amounts rewritten as spoken words.
#[pyfunction]
fn number_to_spoken(text: &str) -> String {
    laug::textkit::number_to_spoken(text)
}

/// Best token-aligned window for `value`, as `(start, end, score)` in characters.
#[pyfunction]
#[pyo3(signature = (text, value, threshold = 0.7))]
fn detect_value(text: &str, value: &str, threshold: f64) -> Option<(usize, usize, f64)> {
    laug::textkit::detect_value(text, value, threshold).map(|d| (d.start, d.end, d.score))
}

/// Linearized dialog act, with `*` after each domain in `first_mention`.
#[pyfunction]
#[pyo3(signature = (items, first_mention = Vec::new()))]
fn serialize_da(items: Vec<Item>, first_mention: Vec<String>) -> String {
    let da = self::items(items);
    laug::aug_tp::serialize_da(&da, &first_mention.into_iter().collect()).0
}

/// Micro precision, recall and F1 over per-turn lists of
/// `(domain, intent, slot, value)` tuples.
#[pyfunction]
fn overall_f1<'py>(py: Python<'py>, predicted: Vec<Vec<Item>>, gold: Vec<Vec<Item>>) -> PyResult<Bound<'py, PyDict>> {
    let predicted: Vec<_> = predicted.into_iter().map(items).collect();
    let gold: Vec<_> = gold.into_iter().map(items).collect();
    let r = f1(&predicted, &gold).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("true_positives", r.true_positives)?;
    d.set_item("false_positives", r.false_positives)?;
    d.set_item("false_negatives", r.false_negatives)?;
    d.set_item("precision", r.precision)?;
    d.set_item("recall", r.recall)?;
    d.set_item("f1", r.f1)?;
    Ok(d)
}

/// Character, word and slot change rates of records against their corpus.
#[pyfunction]
fn change_rates<'py>(py: Python<'py>, corpus_json: &str, records_json: &str) -> PyResult<Bound<'py, PyDict>> {
    let c = corpus(corpus_json)?;
    let records: Vec<AugmentationRecord> = serde_json::from_str(records_json).map_err(json_err)?;
    let r = rates(&c, &records).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("records", r.records)?;
    d.set_item("char_rate", r.char_rate)?;
    d.set_item("word_rate", r.word_rate)?;
    d.set_item("slot_rate", r.slot_rate)?;
    Ok(d)
}

/// Seeded augmentation runs over corpora.
#[pyclass(name = "Augmenter", frozen)]
struct Augmenter {
    inner: CoreAugmenter,
}

#[pymethods]
impl Augmenter {
    /// `config_json` is a run config document; `seed` overrides its seed.
    #[new]
    #[pyo3(signature = (config_json = None, seed = None))]
    fn new(config_json: Option<&str>, seed: Option<u64>) -> PyResult<Self> {
        let mut cfg: RunConfig = match config_json {
            Some(s) => serde_json::from_str(s).map_err(json_err)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = seed {
            cfg.seed = seed;
        }
        cfg.validate().map_err(to_py)?;
        Ok(Augmenter { inner: CoreAugmenter::new(cfg).map_err(to_py)? })
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.config.seed
    }

    /// Config as JSON, including defaults.
    fn config_json(&self) -> String {
        serde_json::to_string(&self.inner.config).expect("config serializes")
    }

    /// Records (JSON list) for every user turn of `split` ("train",
    /// "validation", "test" or "all").
    #[pyo3(signature = (corpus_json, method, split = "all"))]
    fn augment(&self, py: Python<'_>, corpus_json: &str, method: &str, split: &str) -> PyResult<String> {
        let c = corpus(corpus_json)?;
        let m = self::method(method)?;
        let splits = match split {
            "all" => vec![Split::Train, Split::Validation, Split::Test],
            "train" => vec![Split::Train],
            "validation" => vec![Split::Validation],
            "test" => vec![Split::Test],
            other => return Err(PyValueError::new_err(format!("unknown split {other:?}"))),
        };
        let records = py
            .detach(|| -> laug::Result<Vec<AugmentationRecord>> {
                let mut out = Vec::new();
                for s in splits {
                    out.extend(self.inner.augment_split(&c, m, s)?);
                }
                Ok(out)
            })
            .map_err(to_py)?;
        serde_json::to_string(&records).map_err(json_err)
    }

    /// Perturbs one user utterance. `values` are `(domain, intent, slot,
    /// surface)` tuples whose surface occurs in `text`. Returns a dict with
    /// text, da and spans, or None when the method cannot change it.
    #[pyo3(signature = (text, values, method))]
    fn augment_text<'py>(
        &self,
        py: Python<'py>,
        text: &str,
        values: Vec<Item>,
        method: &str,
    ) -> PyResult<Option<Bound<'py, PyDict>>> {
        let m = self::method(method)?;
        let mut u = Utterance::user(text);
        for (d, i, s, v) in &values {
            if text.contains(v.as_str()) {
                u = u.with_value(d, i, s, v);
            } else {
                u = u.with_act(d, i, s, v);
            }
        }
        let c = Corpus::from_dialogs(vec![Dialog::new("py", Split::Test, vec![u])], Default::default());
        if let Some(issue) = c.issues().next() {
            return Err(PyValueError::new_err(issue.to_string()));
        }
        let pool = self.inner.resources.pools.unseen_in(&c);
        let rec = self.inner.augment_turn(&c, &pool, m, &c.dialogs[0], 0, m.tag()).map_err(to_py)?;
        let Some(rec) = rec else { return Ok(None) };
        let d = PyDict::new(py);
        d.set_item("text", &rec.text)?;
        let da: Vec<Item> =
            rec.da.iter().map(|i| (i.domain.clone(), i.intent.clone(), i.slot.clone(), i.value.clone())).collect();
        d.set_item("da", da)?;
        let spans: Vec<(usize, usize, usize)> = rec.spans.iter().map(|s| (s.item_index, s.start, s.end)).collect();
        d.set_item("spans", spans)?;
        d.set_item("notes", rec.notes.clone())?;
        Ok(Some(d))
    }

    /// Test split with every user turn replaced by its augmented form.
    fn augmented_test_set(&self, py: Python<'_>, corpus_json: &str, method: &str) -> PyResult<String> {
        let c = corpus(corpus_json)?;
        let m = self::method(method)?;
        let out = py.detach(|| self.inner.augmented_test_set(&c, m)).map_err(to_py)?;
        Ok(to_json_string(&out))
    }

    /// Train dialogs plus the composed augmented set, as corpus JSON.
    fn compose(&self, py: Python<'_>, corpus_json: &str) -> PyResult<String> {
        let c = corpus(corpus_json)?;
        let (out, _) = py.detach(|| self.inner.compose(&c)).map_err(to_py)?;
        Ok(to_json_string(&out))
    }

    /// Lexicon-baseline F1 keyed by "Ori." and the method tags.
    fn baseline<'py>(&self, py: Python<'py>, corpus_json: &str) -> PyResult<Bound<'py, PyDict>> {
        let c = corpus(corpus_json)?;
        let r = py.detach(|| self.inner.run_baseline(&c)).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("Ori.", r.original.f1)?;
        for (m, s) in &r.augmented {
            d.set_item(m.tag(), s.f1)?;
        }
        Ok(d)
    }
}

/// The bundled 200-utterance fixture corpus as JSON.
#[pyfunction]
fn fixture_json() -> &'static str {
    laug::resources::BUNDLED_FIXTURE
}

#[pymodule]
#[pyo3(name = "laug")]
pub fn laug_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Augmenter>()?;
    m.add_function(wrap_pyfunction!(fuzzy_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(number_to_spoken, m)?)?;
    m.add_function(wrap_pyfunction!(detect_value, m)?)?;
    m.add_function(wrap_pyfunction!(serialize_da, m)?)?;
    m.add_function(wrap_pyfunction!(overall_f1, m)?)?;
    m.add_function(wrap_pyfunction!(change_rates, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_json, m)?)?;
    Ok(())
}
