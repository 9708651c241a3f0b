//! Run configuration, per-method augmentation over a corpus, composition of
//! augmented training sets, the lexicon baseline and run manifests.

use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aug_sd::sd_augment;
use crate::aug_sr::{sr_augment, SrConfig};
use crate::aug_tp::{tp_augment, HttpGenerator, ParaphraseGenerator, TemplateGenerator};
use crate::aug_wp::{wp_augment, UnseenValuePool, WpConfig};
use crate::corpus::{extract_lu_examples, AugmentedFrom, ContextTurn, Corpus, Dialog, Speaker, Split};
use crate::error::{Error, Result};
use crate::evalkit::{overall_f1, F1Report, LexiconLu};
use crate::record::{AugmentationRecord, Method};
use crate::resources::ResourceBundle;
use crate::util::{sha256_hex, substream, write_atomic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WpParams {
    pub alpha: f64,
    pub p_svr: f64,
}

impl Default for WpParams {
    fn default() -> Self {
        let d = WpConfig::default();
        WpParams { alpha: d.alpha, p_svr: d.p_svr }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TpParams {
    /// Candidates requested per utterance.
    pub candidates: usize,
    /// Paraphrase service; the template generator is used when unset.
    pub endpoint: Option<String>,
    pub timeout_secs: u64,
}

impl Default for TpParams {
    fn default() -> Self {
        TpParams { candidates: 5, endpoint: None, timeout_secs: HttpGenerator::DEFAULT_TIMEOUT.as_secs() }
    }
}

/// Optional replacements for the bundled resource files.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResourcePaths {
    pub thesaurus: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub confusion: Option<PathBuf>,
    pub disfluency: Option<PathBuf>,
    pub pools: Option<PathBuf>,
}

impl ResourcePaths {
    pub fn load(&self) -> Result<ResourceBundle> {
        let mut b = ResourceBundle::bundled();
        if let Some(p) = &self.thesaurus {
            b = b.with_thesaurus_file(p)?;
        }
        if let Some(p) = &self.stopwords {
            b = b.with_stopwords_file(p)?;
        }
        if let Some(p) = &self.lexicon {
            b = b.with_lexicon_file(p)?;
        }
        if let Some(p) = &self.confusion {
            b = b.with_confusion_file(p)?;
        }
        if let Some(p) = &self.disfluency {
            b = b.with_disfluency_file(p)?;
        }
        if let Some(p) = &self.pools {
            b = b.with_pools_file(p)?;
        }
        Ok(b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub methods: Vec<Method>,
    /// Augmented-to-original size for composition.
    pub ratio: f64,
    /// Preceding utterances included in LU examples.
    pub context_window: usize,
    pub wp: WpParams,
    pub tp: TpParams,
    pub sr: SrConfig,
    pub resources: ResourcePaths,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            methods: Method::ALL.to_vec(),
            ratio: 1.0,
            context_window: 2,
            wp: WpParams::default(),
            tp: TpParams::default(),
            sr: SrConfig::default(),
            resources: ResourcePaths::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::config("methods", "select at least one method"));
        }
        if !(self.ratio.is_finite() && self.ratio > 0.0) {
            return Err(Error::config("ratio", "must be a positive number"));
        }
        if self.tp.candidates == 0 {
            return Err(Error::config("tp.candidates", "must be at least 1"));
        }
        if self.tp.timeout_secs == 0 {
            return Err(Error::config("tp.timeout_secs", "must be at least 1"));
        }
        WpConfig { alpha: self.wp.alpha, p_svr: self.wp.p_svr, stopwords: Default::default() }.validate()?;
        self.sr.validate()
    }

    fn wp_config(&self, bundle: &ResourceBundle) -> WpConfig {
        WpConfig { alpha: self.wp.alpha, p_svr: self.wp.p_svr, stopwords: bundle.stopwords.clone() }
    }

    /// Hash of the canonical JSON form, recorded in manifests.
    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serializes").as_bytes())
    }
}

/// Number of records per method: `round(ratio * turns)` split as evenly as
/// possible, earlier methods taking the remainder.
pub fn method_counts(ratio: f64, turns: usize, methods: usize) -> Vec<usize> {
    let total = (ratio * turns as f64).round() as usize;
    (0..methods).map(|k| total / methods + usize::from(k < total % methods)).collect()
}

/// Holds a configuration, its resources and the paraphrase generator.
pub struct Augmenter {
    pub config: RunConfig,
    pub resources: ResourceBundle,
    wp: WpConfig,
    generator: Box<dyn ParaphraseGenerator>,
}

impl Augmenter {
    /// Validates `config`, loads its resources and picks the generator.
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let resources = config.resources.load()?;
        let generator: Box<dyn ParaphraseGenerator> = match &config.tp.endpoint {
            Some(url) => Box::new(HttpGenerator::new(url, Duration::from_secs(config.tp.timeout_secs))),
            None => Box::new(TemplateGenerator),
        };
        Ok(Augmenter { wp: config.wp_config(&resources), config, resources, generator })
    }

    pub fn with_generator(mut self, generator: Box<dyn ParaphraseGenerator>) -> Self {
        self.generator = generator;
        self
    }

    /// Augments one user turn. `None` when the method has nothing to do on
    /// this turn (no candidate, no slot, empty text).
    pub fn augment_turn(
        &self,
        corpus: &Corpus,
        pool: &UnseenValuePool,
        method: Method,
        dialog: &Dialog,
        turn: usize,
        stream: &str,
    ) -> Result<Option<AugmentationRecord>> {
        let mut rng = substream(self.config.seed, &dialog.id, turn, stream);
        let u = &dialog.turns[turn];
        let source = (dialog.id.as_str(), turn);
        let r = &self.resources;
        let out = match method {
            Method::WordPerturbation => wp_augment(u, &self.wp, pool, &r.thesaurus, &mut rng, source).map(Some),
            Method::TextParaphrasing => {
                tp_augment(dialog, turn, self.generator.as_ref(), self.config.tp.candidates, &corpus.ontology, &mut rng)
            }
            Method::SpeechRecognition => {
                Ok(Some(sr_augment(u, &self.config.sr, &r.confusion, &r.lexicon, &mut rng, source)))
            }
            Method::SpeechDisfluency => sd_augment(u, &corpus.ontology, &r.disfluency, &mut rng, source).map(Some),
        };
        match out {
            Err(Error::NoCandidate(_) | Error::NoSlot | Error::NoRepairableSlot | Error::EmptyUtterance) => Ok(None),
            other => other,
        }
    }

    /// Augments every user turn of `split` with one method, in parallel.
    /// Quarantined dialogs are skipped; output order follows the corpus.
    pub fn augment_split(&self, corpus: &Corpus, method: Method, split: Split) -> Result<Vec<AugmentationRecord>> {
        let pool = self.resources.pools.unseen_in(corpus);
        let sources: Vec<(&Dialog, usize)> = corpus
            .dialogs_in(split)
            .filter(|d| !corpus.is_quarantined(&d.id))
            .flat_map(|d| d.user_turn_indices().map(move |t| (d, t)))
            .collect();
        let results: Vec<Result<Option<AugmentationRecord>>> =
            sources.par_iter().map(|&(d, t)| self.augment_turn(corpus, &pool, method, d, t, method.tag())).collect();
        let mut out = Vec::new();
        for r in results {
            if let Some(rec) = r? {
                out.push(rec);
            }
        }
        Ok(out)
    }

    /// Copy of the test split with every user turn replaced by its
    /// augmented form; turns the method cannot change stay as they are.
    pub fn augmented_test_set(&self, corpus: &Corpus, method: Method) -> Result<Corpus> {
        let records = self.augment_split(corpus, method, Split::Test)?;
        let mut dialogs: Vec<Dialog> =
            corpus.dialogs_in(Split::Test).filter(|d| !corpus.is_quarantined(&d.id)).cloned().collect();
        for rec in records {
            if let Some(d) = dialogs.iter_mut().find(|d| d.id == rec.dialog) {
                d.turns[rec.turn] = rec.to_utterance();
            }
        }
        Ok(Corpus::from_dialogs(dialogs, corpus.ontology.clone()))
    }

    /// Original training dialogs plus `round(ratio * train turns)` augmented
    /// single-turn dialogs, split evenly across the configured methods.
    pub fn compose(&self, corpus: &Corpus) -> Result<(Corpus, ComposeSummary)> {
        let sources: Vec<(&Dialog, usize)> = corpus
            .dialogs_in(Split::Train)
            .filter(|d| !corpus.is_quarantined(&d.id))
            .flat_map(|d| d.user_turn_indices().map(move |t| (d, t)))
            .collect();
        if sources.is_empty() {
            return Err(Error::EmptyTrain);
        }
        let pool = self.resources.pools.unseen_in(corpus);
        let counts = method_counts(self.config.ratio, sources.len(), self.config.methods.len());
        let mut dialogs: Vec<Dialog> =
            corpus.dialogs_in(Split::Train).filter(|d| !corpus.is_quarantined(&d.id)).cloned().collect();
        let mut summary =
            ComposeSummary { train_turns: sources.len(), target: counts.iter().sum(), per_method: Vec::new() };
        for (&method, &count) in self.config.methods.iter().zip(&counts) {
            let draws = self.draw_sources(corpus, &pool, &sources, method, count)?;
            summary.per_method.push((method, draws.len()));
            for (k, (d, rec)) in draws.into_iter().enumerate() {
                dialogs.push(package(d, rec, k));
            }
        }
        Ok((Corpus::from_dialogs(dialogs, corpus.ontology.clone()), summary))
    }

    /// Samples sources without replacement until exhausted, then with
    /// replacement, skipping turns the method cannot augment.
    fn draw_sources<'c>(
        &self,
        corpus: &Corpus,
        pool: &UnseenValuePool,
        sources: &[(&'c Dialog, usize)],
        method: Method,
        count: usize,
    ) -> Result<Vec<(&'c Dialog, AugmentationRecord)>> {
        let mut rng = substream(self.config.seed, "compose", 0, method.tag());
        let mut order: Vec<usize> = (0..sources.len()).collect();
        order.shuffle(&mut rng);
        let mut uses = vec![0usize; sources.len()];
        let mut dead = vec![false; sources.len()];
        let mut out = Vec::with_capacity(count);
        let mut cursor = 0;
        while out.len() < count {
            let i = if cursor < order.len() {
                cursor += 1;
                order[cursor - 1]
            } else {
                let alive: Vec<usize> = (0..sources.len()).filter(|&i| !dead[i]).collect();
                *alive.choose(&mut rng).ok_or_else(|| Error::NoCandidate(format!("no {method} augmentable turn")))?
            };
            let (d, t) = sources[i];
            let stream = format!("{}/{}", method.tag(), uses[i]);
            uses[i] += 1;
            match self.augment_turn(corpus, pool, method, d, t, &stream)? {
                Some(rec) => out.push((d, rec)),
                None if uses[i] >= 3 => dead[i] = true,
                None => {}
            }
        }
        Ok(out)
    }

    /// Trains the lexicon baseline on the train split and scores it on the
    /// original test split and on each method's augmented test split.
    pub fn run_baseline(&self, corpus: &Corpus) -> Result<BaselineReport> {
        let lu = LexiconLu::train(corpus)?;
        let score = |c: &Corpus| -> Result<F1Report> {
            let examples: Vec<_> = extract_lu_examples(c, self.config.context_window)
                .into_iter()
                .filter(|e| c.dialog(&e.dialog).is_some_and(|d| d.split == Split::Test))
                .collect();
            let pred: Vec<_> = examples.iter().map(|e| lu.predict(e)).collect();
            let gold: Vec<_> = examples.iter().map(|e| e.gold.clone()).collect();
            overall_f1(&pred, &gold)
        };
        let test = Corpus::from_dialogs(
            corpus.dialogs_in(Split::Test).filter(|d| !corpus.is_quarantined(&d.id)).cloned().collect(),
            corpus.ontology.clone(),
        );
        let original = score(&test)?;
        let mut augmented = Vec::new();
        for &m in &self.config.methods {
            augmented.push((m, score(&self.augmented_test_set(corpus, m)?)?));
        }
        Ok(BaselineReport { original, augmented })
    }
}

fn package(source: &Dialog, rec: AugmentationRecord, k: usize) -> Dialog {
    let context =
        source.turns[..rec.turn].iter().map(|t| ContextTurn { speaker: t.speaker, text: t.text.clone() }).collect();
    let mut d = Dialog::new(
        &format!("{}.{}.{}.{}", source.id, rec.turn, rec.method.tag().to_lowercase(), k),
        Split::Train,
        vec![rec.to_utterance()],
    );
    debug_assert_eq!(d.turns[0].speaker, Speaker::User);
    d.augmented_from =
        Some(AugmentedFrom { method: rec.method.tag().to_string(), dialog: rec.dialog, turn: rec.turn, context });
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposeSummary {
    pub train_turns: usize,
    pub target: usize,
    pub per_method: Vec<(Method, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub original: F1Report,
    pub augmented: Vec<(Method, F1Report)>,
}

impl BaselineReport {
    pub fn to_table(&self) -> String {
        let mut head = format!("{:<8}", "Ori.");
        let mut row = format!("{:<8.1}", 100.0 * self.original.f1);
        for (m, r) in &self.augmented {
            head.push_str(&format!("{:<8}", m.tag()));
            row.push_str(&format!("{:<8.1}", 100.0 * r.f1));
        }
        format!("{}\n{}\n", head.trim_end(), row.trim_end())
    }
}

/// Provenance written next to every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: RunConfig,
    pub inputs: Vec<FileDigest>,
    pub output: FileDigest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(FileDigest { path: path.display().to_string(), sha256: sha256_hex(&bytes) })
    }
}

/// `out.json` -> `out.json.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// Atomically writes `bytes` to `output` and its manifest beside it.
pub fn write_with_manifest(
    output: &Path,
    bytes: &[u8],
    command: &str,
    config: &RunConfig,
    inputs: &[&Path],
) -> Result<Manifest> {
    write_atomic(output, bytes)?;
    let manifest = Manifest {
        tool: "laug".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        seed: config.seed,
        config_hash: config.hash(),
        config: config.clone(),
        inputs: inputs.iter().map(|p| FileDigest::of(p)).collect::<Result<_>>()?,
        output: FileDigest { path: output.display().to_string(), sha256: sha256_hex(bytes) },
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    write_atomic(&manifest_path(output), json.as_bytes())?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_split() {
        assert_eq!(method_counts(1.0, 100, 4), [25, 25, 25, 25]);
        assert_eq!(method_counts(0.1, 100, 4), [3, 3, 2, 2]);
        assert_eq!(method_counts(1.0, 100, 1), [100]);
    }

    #[test]
    fn config_errors_name_the_field() {
        let bad = RunConfig { ratio: 0.0, ..RunConfig::default() };
        match bad.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "ratio"),
            other => panic!("{other:?}"),
        }
        let mut bad = RunConfig::default();
        bad.sr.p_confuse = 2.0;
        assert!(matches!(bad.validate(), Err(Error::Config { field, .. }) if field == "sr.p_confuse"));
    }

    #[test]
    fn manifest_sits_beside_output() {
        assert_eq!(manifest_path(Path::new("/x/out.json")), Path::new("/x/out.json.manifest.json"));
    }
}
