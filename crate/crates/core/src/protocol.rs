//! Newline-delimited JSON messages exchanged between the exam server and its
//! student, admin and monitor clients.
//!
//! Every frame is one JSON object with a `type` tag, encoded on a single line
//! and terminated by `\n`. Unrecognised payload fields are ignored on decode.
//! Questions sent to clients never carry answer digests.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::quizbank::{Percent, Question, QuestionKind};

pub const PROTOCOL_VERSION: u32 = 1;

/// Upper bound on an encoded frame, terminator included.
pub const MAX_FRAME_BYTES: usize = 65_536;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Student,
    Admin,
    Monitor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    Registered,
    InProgress,
    Completed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Registered,
    Started,
    Answered,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentedChoice {
    pub id: String,
    pub text: String,
}

/// A question as shown to a student.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentedQuestion {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: QuestionKind,
    pub points: u32,
    pub text: String,
    pub choices: Vec<PresentedChoice>,
}

impl From<&Question> for PresentedQuestion {
    fn from(q: &Question) -> Self {
        PresentedQuestion {
            id: q.id.clone(),
            kind: q.kind,
            points: q.points,
            text: q.text.clone(),
            choices: q
                .choices
                .iter()
                .map(|c| PresentedChoice {
                    id: c.id.clone(),
                    text: c.text.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub name: String,
    pub subject: String,
    pub state: SessionState,
    pub answered_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub percent: Option<Percent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionEvent {
    pub kind: EventKind,
    pub session_id: String,
    pub name: String,
    pub subject: String,
    pub answered_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub percent: Option<Percent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WireMessage {
    Hello {
        role: Role,
        protocol_version: u32,
    },
    Welcome {
        server_version: String,
    },
    Auth {
        user_id: String,
        password: String,
    },
    Ack,
    Register {
        name: String,
        year_of_study: u32,
        subject: String,
    },
    Session {
        session_id: String,
        test_id: String,
    },
    Start {
        session_id: String,
    },
    Test {
        test_id: String,
        questions: Vec<PresentedQuestion>,
    },
    Answer {
        session_id: String,
        question_id: String,
        selected: Vec<String>,
    },
    Finish {
        session_id: String,
    },
    Result {
        points: u32,
        max_points: u32,
        percent: Percent,
    },
    ListSessions,
    Sessions {
        sessions: Vec<SessionSummary>,
    },
    Event(SessionEvent),
    Error {
        code: ErrorCode,
        message: String,
    },
}

impl WireMessage {
    /// The `type` tag as it appears on the wire.
    pub fn tag(&self) -> &'static str {
        match self {
            WireMessage::Hello { .. } => "HELLO",
            WireMessage::Welcome { .. } => "WELCOME",
            WireMessage::Auth { .. } => "AUTH",
            WireMessage::Ack => "ACK",
            WireMessage::Register { .. } => "REGISTER",
            WireMessage::Session { .. } => "SESSION",
            WireMessage::Start { .. } => "START",
            WireMessage::Test { .. } => "TEST",
            WireMessage::Answer { .. } => "ANSWER",
            WireMessage::Finish { .. } => "FINISH",
            WireMessage::Result { .. } => "RESULT",
            WireMessage::ListSessions => "LIST_SESSIONS",
            WireMessage::Sessions { .. } => "SESSIONS",
            WireMessage::Event(_) => "EVENT",
            WireMessage::Error { .. } => "ERROR",
        }
    }
}

impl From<ProtocolError> for WireMessage {
    fn from(e: ProtocolError) -> Self {
        WireMessage::Error {
            code: e.code,
            message: e.message,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorCode {
    #[serde(rename = "E_AUTH")]
    Auth,
    #[serde(rename = "E_STATE")]
    State,
    #[serde(rename = "E_UNKNOWN_SESSION")]
    UnknownSession,
    #[serde(rename = "E_UNKNOWN_QUESTION")]
    UnknownQuestion,
    #[serde(rename = "E_MALFORMED")]
    Malformed,
    #[serde(rename = "E_VERSION")]
    Version,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Auth => "E_AUTH",
            ErrorCode::State => "E_STATE",
            ErrorCode::UnknownSession => "E_UNKNOWN_SESSION",
            ErrorCode::UnknownQuestion => "E_UNKNOWN_QUESTION",
            ErrorCode::Malformed => "E_MALFORMED",
            ErrorCode::Version => "E_VERSION",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ProtocolError {
    pub code: ErrorCode,
    pub message: String,
}

impl ProtocolError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ProtocolError {
            code,
            message: message.into(),
        }
    }

    pub fn auth(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::Auth, message)
    }

    pub fn state(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::State, message)
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::Malformed, message)
    }
}

/// Encodes `msg` as one `\n`-terminated line.
pub fn encode(msg: &WireMessage) -> Result<Vec<u8>, ProtocolError> {
    let mut out = serde_json::to_vec(msg).map_err(|e| ProtocolError::malformed(e.to_string()))?;
    out.push(b'\n');
    if out.len() > MAX_FRAME_BYTES {
        return Err(ProtocolError::malformed(format!(
            "{} message is {} bytes, over the {MAX_FRAME_BYTES}-byte frame limit",
            msg.tag(),
            out.len()
        )));
    }
    Ok(out)
}

/// Decodes one frame given without its terminator. A trailing `\r` is
/// tolerated.
pub fn decode(line: &[u8]) -> Result<WireMessage, ProtocolError> {
    if line.len() >= MAX_FRAME_BYTES {
        return Err(ProtocolError::malformed(format!(
            "frame of {} bytes exceeds the {MAX_FRAME_BYTES}-byte limit",
            line.len()
        )));
    }
    let line = line.strip_suffix(b"\r").unwrap_or(line);
    let msg: WireMessage =
        serde_json::from_slice(line).map_err(|e| ProtocolError::malformed(e.to_string()))?;
    if let WireMessage::Hello {
        protocol_version, ..
    } = &msg
    {
        if *protocol_version != PROTOCOL_VERSION {
            return Err(ProtocolError::new(
                ErrorCode::Version,
                format!("protocol version {protocol_version} is not supported; expected {PROTOCOL_VERSION}"),
            ));
        }
    }
    Ok(msg)
}
