use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{DialogActItem, SpanAnnotation, Speaker, Utterance};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "WP")]
    WordPerturbation,
    #[serde(rename = "TP")]
    TextParaphrasing,
    #[serde(rename = "SR")]
    SpeechRecognition,
    #[serde(rename = "SD")]
    SpeechDisfluency,
}

impl Method {
    pub const ALL: [Method; 4] =
        [Method::WordPerturbation, Method::TextParaphrasing, Method::SpeechRecognition, Method::SpeechDisfluency];

    pub fn tag(self) -> &'static str {
        match self {
            Method::WordPerturbation => "WP",
            Method::TextParaphrasing => "TP",
            Method::SpeechRecognition => "SR",
            Method::SpeechDisfluency => "SD",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "WP" => Ok(Method::WordPerturbation),
            "TP" => Ok(Method::TextParaphrasing),
            "SR" => Ok(Method::SpeechRecognition),
            "SD" => Ok(Method::SpeechDisfluency),
            _ => Err(Error::config("method", format!("unknown method `{s}` (expected wp, tp, sr or sd)"))),
        }
    }
}

/// Text inserted at a character offset of the original utterance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Insertion {
    pub at: usize,
    pub text: String,
}

/// One perturbed user utterance with its updated labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationRecord {
    pub method: Method,
    pub dialog: String,
    pub turn: usize,
    pub text: String,
    pub da: Vec<DialogActItem>,
    pub spans: Vec<SpanAnnotation>,
    /// Which sub-operation fired and which values changed.
    pub notes: Vec<String>,
    /// Pure insertions into the original text, when the method only inserts.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub insertions: Vec<Insertion>,
}

impl AugmentationRecord {
    pub(crate) fn new(
        method: Method,
        source: (&str, usize),
        text: String,
        da: Vec<DialogActItem>,
        spans: Vec<SpanAnnotation>,
    ) -> Self {
        AugmentationRecord {
            method,
            dialog: source.0.to_string(),
            turn: source.1,
            text,
            da,
            spans,
            notes: Vec::new(),
            insertions: Vec::new(),
        }
    }

    pub fn to_utterance(&self) -> Utterance {
        Utterance { speaker: Speaker::User, text: self.text.clone(), da: self.da.clone(), spans: self.spans.clone() }
    }

    /// Re-creates the original text by dropping every recorded insertion.
    pub fn strip_insertions(&self) -> String {
        let mut chars: Vec<char> = self.text.chars().collect();
        // Insertions are recorded against the original text; remove them from
        // the right so earlier output offsets stay valid.
        let mut shifted: Vec<(usize, usize)> = Vec::new();
        let mut sorted: Vec<&Insertion> = self.insertions.iter().collect();
        sorted.sort_by_key(|ins| ins.at);
        let mut offset = 0;
        for ins in sorted {
            let len = ins.text.chars().count();
            shifted.push((ins.at + offset, len));
            offset += len;
        }
        for (at, len) in shifted.into_iter().rev() {
            chars.drain(at..at + len);
        }
        chars.into_iter().collect()
    }
}
