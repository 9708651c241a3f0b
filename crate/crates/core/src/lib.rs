//! Perturbation and robustness evaluation for annotated task-oriented
//! dialog corpora.
//!
//! Four augmentation families rewrite user utterances while keeping their
//! dialog-act labels and character-offset value spans consistent: word
//! perturbation ([`aug_wp`]), paraphrase validation ([`aug_tp`]), simulated
//! speech recognition ([`aug_sr`]) and disfluency injection ([`aug_sd`]).
//! [`evalkit`] scores language-understanding output and measures how much
//! each method changed the data.

pub mod aug_sd;
pub mod aug_sr;
pub mod aug_tp;
pub mod aug_wp;
pub mod corpus;
mod draft;
pub mod error;
pub mod evalkit;
pub mod pipeline;
pub mod record;
pub mod resources;
pub mod textkit;
pub mod util;

pub use corpus::{Corpus, Dialog, DialogActItem, Ontology, SpanAnnotation, Speaker, Split, Utterance};
pub use error::{Error, Result};
pub use record::{AugmentationRecord, Insertion, Method};
pub use resources::ResourceBundle;
