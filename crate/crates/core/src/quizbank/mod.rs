//! Quiz banks, test configurations, seeded question selection and grading.
//!
//! A bank stores each question's correct answer only as an answer digest
//! (see [`crate::digest::answer_digest`]). Grading recomputes the digest of
//! the submitted selection and compares.

mod author;
mod config;
mod grade;
mod select;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

pub use author::hash_answers;
pub use config::TestConfig;
pub use grade::{grade, AnswerMap, Percent, QuestionScore, ScoreReport};
pub use select::{select_questions, SplitMix64};

use crate::schema::{shipped, DocumentError, Violation};
use crate::xml::{Element, ParseError, XmlDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuestionKind {
    Single,
    Multi,
}

impl QuestionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QuestionKind::Single => "single",
            QuestionKind::Multi => "multi",
        }
    }
}

impl fmt::Display for QuestionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QuestionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(QuestionKind::Single),
            "multi" => Ok(QuestionKind::Multi),
            other => Err(format!("unknown question type `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Choice {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub id: String,
    pub kind: QuestionKind,
    pub points: u32,
    pub text: String,
    pub choices: Vec<Choice>,
    /// Hex answer digest of the correct selection.
    pub key_digest: String,
}

impl Question {
    pub fn has_choice(&self, id: &str) -> bool {
        self.choices.iter().any(|c| c.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuizBank {
    pub subject: String,
    pub version: i64,
    pub questions: Vec<Question>,
}

impl QuizBank {
    pub fn question(&self, id: &str) -> Option<&Question> {
        self.questions.iter().find(|q| q.id == id)
    }

    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }

    /// The digest-form XML for this bank.
    pub fn to_document(&self) -> XmlDocument {
        let mut root = Element::new("quizbank")
            .with_attr("subject", &self.subject)
            .with_attr("version", self.version.to_string());
        for q in &self.questions {
            let mut qe = Element::new("question")
                .with_attr("id", &q.id)
                .with_attr("type", q.kind.as_str())
                .with_attr("points", q.points.to_string())
                .with_child(Element::new("text").with_text(&q.text));
            for c in &q.choices {
                qe = qe.with_child(
                    Element::new("choice")
                        .with_attr("id", &c.id)
                        .with_text(&c.text),
                );
            }
            qe = qe.with_child(Element::new("answer").with_attr("digest", &q.key_digest));
            root = root.with_child(qe);
        }
        XmlDocument::new(root)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuizError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{} schema violation(s): {}", .0.len(), .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("question id `{0}` is used more than once")]
    DuplicateQuestion(String),
    #[error("question `{question}`: choice id `{choice}` is used more than once")]
    DuplicateChoice { question: String, choice: String },
    #[error("question `{question}`: points must be a positive integer, found `{value}`")]
    BadPoints { question: String, value: String },
    #[error("question `{question}`: key names unknown choice `{choice}`")]
    UnknownKeyChoice { question: String, choice: String },
    #[error("question `{question}`: single-answer question needs exactly one key, found {found}")]
    KeyCardinality { question: String, found: usize },
    #[error("question `{question}`: {message}")]
    Authoring { question: String, message: String },
    #[error("test config asks for {requested} questions but the bank has {available}")]
    CountExceedsBank { requested: usize, available: usize },
    #[error("answer given for question `{0}`, which was not presented")]
    UnpresentedAnswer(String),
    #[error("invalid test config: {0}")]
    Config(String),
}

impl From<DocumentError> for QuizError {
    fn from(e: DocumentError) -> Self {
        match e {
            DocumentError::Parse(p) => QuizError::Parse(p),
            DocumentError::Invalid(v) => QuizError::Invalid(v),
        }
    }
}

/// Parses, validates and maps a digest-form quiz bank.
pub fn load_bank(input: &[u8]) -> Result<QuizBank, QuizError> {
    let doc = shipped::parse_valid(input, shipped::quizbank())?;
    bank_from_document(&doc)
}

/// Maps a schema-valid quiz-bank document to a [`QuizBank`], enforcing the
/// id-uniqueness and points rules the schema cannot express.
pub fn bank_from_document(doc: &XmlDocument) -> Result<QuizBank, QuizError> {
    let root = &doc.root;
    let attr = |e: &Element, name: &str| e.attr(name).unwrap_or_default().to_owned();
    let version = attr(root, "version").parse().map_err(|_| {
        QuizError::Config(format!(
            "bank version `{}` is out of range",
            attr(root, "version")
        ))
    })?;

    let mut seen = HashSet::new();
    let mut questions = Vec::new();
    for qe in root.elements_named("question") {
        let id = attr(qe, "id");
        if !seen.insert(id.clone()) {
            return Err(QuizError::DuplicateQuestion(id));
        }
        let points_raw = attr(qe, "points");
        let points = match points_raw.parse::<u32>() {
            Ok(p) if p >= 1 => p,
            _ => {
                return Err(QuizError::BadPoints {
                    question: id,
                    value: points_raw,
                })
            }
        };
        let kind = attr(qe, "type").parse().map_err(|m| QuizError::Authoring {
            question: id.clone(),
            message: m,
        })?;
        let mut choices: Vec<Choice> = Vec::new();
        for ce in qe.elements_named("choice") {
            let cid = attr(ce, "id");
            if choices.iter().any(|c| c.id == cid) {
                return Err(QuizError::DuplicateChoice {
                    question: id,
                    choice: cid,
                });
            }
            choices.push(Choice {
                id: cid,
                text: ce.text(),
            });
        }
        let key_digest = qe
            .first_element("answer")
            .and_then(|a| a.attr("digest"))
            .unwrap_or_default()
            .to_owned();
        questions.push(Question {
            text: qe
                .first_element("text")
                .map(Element::text)
                .unwrap_or_default(),
            id,
            kind,
            points,
            choices,
            key_digest,
        });
    }
    Ok(QuizBank {
        subject: attr(root, "subject"),
        version,
        questions,
    })
}
