//! HTTP and WebSocket gateway for browser clients.
//!
//! Each POST endpoint takes the JSON payload of the matching protocol message
//! (without the `type` tag) and answers with the protocol reply, tag
//! included. Rejections come back as an `ERROR` message with an HTTP status
//! derived from its code.

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use tokio::sync::mpsc;
use tower_http::services::{ServeDir, ServeFile};

use quizwright_core::protocol::{decode, encode, ErrorCode, ProtocolError, WireMessage};

use crate::connection::{Connection, Flow};
use crate::exam::ExamServer;
use crate::session::Student;

fn status_for(code: ErrorCode) -> StatusCode {
    match code {
        ErrorCode::Auth => StatusCode::UNAUTHORIZED,
        ErrorCode::State => StatusCode::CONFLICT,
        ErrorCode::UnknownSession | ErrorCode::UnknownQuestion => StatusCode::NOT_FOUND,
        ErrorCode::Malformed | ErrorCode::Version => StatusCode::BAD_REQUEST,
    }
}

struct Reply(Result<WireMessage, ProtocolError>);

impl IntoResponse for Reply {
    fn into_response(self) -> Response {
        match self.0 {
            Ok(msg) => Json(msg).into_response(),
            Err(e) => (status_for(e.code), Json(WireMessage::from(e))).into_response(),
        }
    }
}

/// Decodes a request body; syntax errors become an `E_MALFORMED` reply.
fn body<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<T, ProtocolError> {
    serde_json::from_slice(bytes).map_err(|e| ProtocolError::malformed(e.to_string()))
}

#[derive(Deserialize)]
struct RegisterBody {
    name: String,
    year_of_study: u32,
    subject: String,
}

#[derive(Deserialize)]
struct SessionBody {
    session_id: String,
}

#[derive(Deserialize)]
struct AnswerBody {
    session_id: String,
    question_id: String,
    selected: Vec<String>,
}

type Engine = State<Arc<ExamServer>>;

async fn register(State(engine): Engine, bytes: axum::body::Bytes) -> Reply {
    Reply((|| {
        let b: RegisterBody = body(&bytes)?;
        let (session_id, test_id) = engine.register(Student {
            name: b.name,
            year_of_study: b.year_of_study,
            subject: b.subject,
        })?;
        Ok(WireMessage::Session {
            session_id,
            test_id,
        })
    })())
}

async fn start(State(engine): Engine, bytes: axum::body::Bytes) -> Reply {
    Reply((|| {
        let b: SessionBody = body(&bytes)?;
        let questions = engine.start(&b.session_id)?;
        Ok(WireMessage::Test {
            test_id: engine.config().id.clone(),
            questions,
        })
    })())
}

async fn answer(State(engine): Engine, bytes: axum::body::Bytes) -> Reply {
    Reply((|| {
        let b: AnswerBody = body(&bytes)?;
        engine.answer(&b.session_id, &b.question_id, &b.selected)?;
        Ok(WireMessage::Ack)
    })())
}

async fn finish(State(engine): Engine, bytes: axum::body::Bytes) -> Reply {
    Reply((|| {
        let b: SessionBody = body(&bytes)?;
        let r = engine.finish(&b.session_id)?;
        Ok(WireMessage::Result {
            points: r.points,
            max_points: r.max_points,
            percent: r.percent,
        })
    })())
}

/// Splits `user_id:password` at the first colon.
fn credentials(raw: &str) -> Option<(&str, &str)> {
    raw.trim().split_once(':')
}

fn authorize(
    engine: &ExamServer,
    headers: &HeaderMap,
    query: Option<&str>,
) -> Result<(), ProtocolError> {
    let raw = headers
        .get(axum::http::header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .or(query)
        .ok_or_else(|| ProtocolError::auth("missing Authorization credentials"))?;
    let (user, password) = credentials(raw)
        .ok_or_else(|| ProtocolError::auth("credentials must be user_id:password"))?;
    engine.authenticate(user, password)
}

async fn sessions(State(engine): Engine, headers: HeaderMap) -> Reply {
    Reply(
        authorize(&engine, &headers, None).map(|()| WireMessage::Sessions {
            sessions: engine.snapshot_sessions(),
        }),
    )
}

#[derive(Deserialize)]
struct MonitorQuery {
    auth: Option<String>,
}

async fn monitor(
    State(engine): Engine,
    headers: HeaderMap,
    Query(q): Query<MonitorQuery>,
    ws: WebSocketUpgrade,
) -> Response {
    if let Err(e) = authorize(&engine, &headers, q.auth.as_deref()) {
        return Reply(Err(e)).into_response();
    }
    ws.on_upgrade(move |socket| monitor_socket(engine, socket))
}

/// Streams EVENT messages as text frames; also answers LIST_SESSIONS.
async fn monitor_socket(engine: Arc<ExamServer>, mut socket: WebSocket) {
    let (tx, mut rx) = mpsc::unbounded_channel();
    let mut conn = Connection::authenticated_monitor(engine, tx);
    loop {
        tokio::select! {
            out = rx.recv() => {
                let Some(msg) = out else { break };
                let Ok(bytes) = encode(&msg) else { continue };
                let text = String::from_utf8_lossy(&bytes[..bytes.len() - 1]).into_owned();
                if socket.send(Message::Text(text.into())).await.is_err() {
                    break;
                }
            }
            incoming = socket.recv() => {
                match incoming {
                    Some(Ok(Message::Text(t))) => {
                        if conn.handle(decode(t.as_bytes())) == Flow::Close {
                            break;
                        }
                    }
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                    Some(Ok(_)) => {}
                }
            }
        }
    }
}

/// Builds the gateway router. With `web_dir`, unmatched paths are served from
/// that directory, falling back to its `index.html`.
pub fn router(engine: Arc<ExamServer>, web_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/register", post(register))
        .route("/api/start", post(start))
        .route("/api/answer", post(answer))
        .route("/api/finish", post(finish))
        .route("/api/sessions", get(sessions))
        .route("/api/monitor", get(monitor))
        .with_state(engine);
    match web_dir {
        Some(dir) => {
            let index = dir.join("index.html");
            api.fallback_service(ServeDir::new(dir).fallback(ServeFile::new(index)))
        }
        None => api,
    }
}
