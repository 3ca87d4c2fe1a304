use std::time::{SystemTime, UNIX_EPOCH};

use quizwright_core::digest::md5;
use quizwright_core::protocol::{SessionState, SessionSummary};
use quizwright_core::quizbank::{AnswerMap, ScoreReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Student {
    pub name: String,
    pub year_of_study: u32,
    pub subject: String,
}

/// One student's sitting. Moves Registered -> InProgress -> Completed only.
#[derive(Debug, Clone)]
pub struct Session {
    pub session_id: String,
    pub student: Student,
    pub state: SessionState,
    /// Question ids in presentation order; empty until started.
    pub presented: Vec<String>,
    pub answers: AnswerMap,
    pub seed: u64,
    /// Present iff Completed.
    pub report: Option<ScoreReport>,
    pub registered_at: u64,
    pub started_at: Option<u64>,
    pub finished_at: Option<u64>,
}

impl Session {
    pub fn new(session_id: String, student: Student, seed: u64) -> Self {
        Session {
            session_id,
            student,
            state: SessionState::Registered,
            presented: Vec::new(),
            answers: AnswerMap::new(),
            seed,
            report: None,
            registered_at: now_secs(),
            started_at: None,
            finished_at: None,
        }
    }

    /// Monitor view; carries no selections or digests.
    pub fn summary(&self) -> SessionSummary {
        SessionSummary {
            session_id: self.session_id.clone(),
            name: self.student.name.clone(),
            subject: self.student.subject.clone(),
            state: self.state,
            answered_count: self.answers.len(),
            percent: self.report.as_ref().map(|r| r.percent),
        }
    }
}

pub fn format_session_id(n: u64) -> String {
    format!("S-{n:06}")
}

/// Inverse of [`format_session_id`]; rejects non-canonical spellings.
pub fn parse_session_id(id: &str) -> Option<u64> {
    let digits = id.strip_prefix("S-")?;
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n: u64 = digits.parse().ok()?;
    (format_session_id(n) == id).then_some(n)
}

/// First 8 bytes of `md5("<session_id>:<nonce>")`, little-endian.
pub fn derive_seed(session_id: &str, nonce: u64) -> u64 {
    let d = md5(format!("{session_id}:{nonce}").as_bytes());
    u64::from_le_bytes(d.0[..8].try_into().unwrap())
}

pub(crate) fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
