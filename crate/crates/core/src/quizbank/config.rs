use std::path::PathBuf;

use super::{QuizBank, QuizError};
use crate::schema::shipped;
use crate::xml::{Element, XmlDocument};

/// `<testconfig id="t1" bank="banks/db.xml" questions="10" shuffle="true"/>`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestConfig {
    pub id: String,
    /// Bank location, relative to the data directory.
    pub bank_path: PathBuf,
    pub question_count: usize,
    pub shuffle: bool,
}

impl TestConfig {
    pub fn from_bytes(input: &[u8]) -> Result<TestConfig, QuizError> {
        let doc = shipped::parse_valid(input, shipped::testconfig())?;
        let root = &doc.root;
        let get = |name: &str| root.attr(name).unwrap_or_default();
        let question_count = match get("questions").parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => {
                return Err(QuizError::Config(format!(
                    "questions must be a positive integer, found `{}`",
                    get("questions")
                )))
            }
        };
        Ok(TestConfig {
            id: get("id").to_owned(),
            bank_path: PathBuf::from(get("bank")),
            question_count,
            shuffle: get("shuffle") == "true",
        })
    }

    pub fn to_document(&self) -> XmlDocument {
        XmlDocument::new(
            Element::new("testconfig")
                .with_attr("id", &self.id)
                .with_attr("bank", self.bank_path.to_string_lossy())
                .with_attr("questions", self.question_count.to_string())
                .with_attr("shuffle", if self.shuffle { "true" } else { "false" }),
        )
    }

    /// Checks the question count against a loaded bank.
    pub fn check_against(&self, bank: &QuizBank) -> Result<(), QuizError> {
        if self.question_count > bank.len() {
            return Err(QuizError::CountExceedsBank {
                requested: self.question_count,
                available: bank.len(),
            });
        }
        Ok(())
    }
}
