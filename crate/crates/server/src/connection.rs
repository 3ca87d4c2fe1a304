//! Per-connection protocol state, shared by the TCP listener and the
//! WebSocket monitor endpoint.

use std::sync::Arc;

use quizwright_core::protocol::{ErrorCode, ProtocolError, Role, WireMessage};

use crate::exam::{ExamServer, Outbox};
use crate::session::Student;

pub const SERVER_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    AwaitHello,
    Open { role: Role, authenticated: bool },
}

/// Whether the transport should keep reading after a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Close,
}

/// Replies are pushed onto the connection's outbox, the same queue monitor
/// events go to, so a client sees them in the order they were produced.
pub struct Connection {
    engine: Arc<ExamServer>,
    outbox: Outbox,
    phase: Phase,
}

impl Connection {
    pub fn new(engine: Arc<ExamServer>, outbox: Outbox) -> Self {
        Connection {
            engine,
            outbox,
            phase: Phase::AwaitHello,
        }
    }

    /// A monitor connection whose credentials were checked out of band.
    /// Subscribes immediately.
    pub fn authenticated_monitor(engine: Arc<ExamServer>, outbox: Outbox) -> Self {
        engine.subscribe(outbox.clone());
        Connection {
            engine,
            outbox,
            phase: Phase::Open {
                role: Role::Monitor,
                authenticated: true,
            },
        }
    }

    pub fn role(&self) -> Option<Role> {
        match self.phase {
            Phase::AwaitHello => None,
            Phase::Open { role, .. } => Some(role),
        }
    }

    fn send(&self, msg: WireMessage) {
        let _ = self.outbox.send(msg);
    }

    /// Handles one decoded frame (or its decode error).
    pub fn handle(&mut self, frame: Result<WireMessage, ProtocolError>) -> Flow {
        let msg = match frame {
            Ok(msg) => msg,
            Err(e) => {
                let close = e.code == ErrorCode::Version;
                self.send(e.into());
                return if close { Flow::Close } else { Flow::Continue };
            }
        };
        match self.dispatch(msg) {
            Ok(Some(reply)) => self.send(reply),
            Ok(None) => {}
            Err(e) => self.send(e.into()),
        }
        Flow::Continue
    }

    fn dispatch(&mut self, msg: WireMessage) -> Result<Option<WireMessage>, ProtocolError> {
        let (role, authenticated) = match self.phase {
            Phase::AwaitHello => {
                return match msg {
                    WireMessage::Hello { role, .. } => {
                        self.phase = Phase::Open {
                            role,
                            authenticated: false,
                        };
                        Ok(Some(WireMessage::Welcome {
                            server_version: SERVER_VERSION.to_owned(),
                        }))
                    }
                    other => Err(ProtocolError::state(format!(
                        "expected HELLO, got {}",
                        other.tag()
                    ))),
                };
            }
            Phase::Open {
                role,
                authenticated,
            } => (role, authenticated),
        };
        let student = || {
            if role == Role::Student {
                Ok(())
            } else {
                Err(ProtocolError::state(format!(
                    "{} is only accepted on student connections",
                    msg.tag()
                )))
            }
        };
        match &msg {
            WireMessage::Hello { .. } => Err(ProtocolError::state("HELLO was already received")),
            WireMessage::Auth { user_id, password } => {
                if role == Role::Student {
                    return Err(ProtocolError::auth(
                        "student connections do not authenticate",
                    ));
                }
                self.engine.authenticate(user_id, password)?;
                self.phase = Phase::Open {
                    role,
                    authenticated: true,
                };
                self.send(WireMessage::Ack);
                if role == Role::Monitor && !authenticated {
                    self.engine.subscribe(self.outbox.clone());
                }
                Ok(None)
            }
            WireMessage::ListSessions => {
                if role == Role::Student || !authenticated {
                    return Err(ProtocolError::auth(
                        "LIST_SESSIONS requires an authenticated admin or monitor connection",
                    ));
                }
                Ok(Some(WireMessage::Sessions {
                    sessions: self.engine.snapshot_sessions(),
                }))
            }
            WireMessage::Register {
                name,
                year_of_study,
                subject,
            } => {
                student()?;
                let (session_id, test_id) = self.engine.register(Student {
                    name: name.clone(),
                    year_of_study: *year_of_study,
                    subject: subject.clone(),
                })?;
                Ok(Some(WireMessage::Session {
                    session_id,
                    test_id,
                }))
            }
            WireMessage::Start { session_id } => {
                student()?;
                let questions = self.engine.start(session_id)?;
                Ok(Some(WireMessage::Test {
                    test_id: self.engine.config().id.clone(),
                    questions,
                }))
            }
            WireMessage::Answer {
                session_id,
                question_id,
                selected,
            } => {
                student()?;
                self.engine.answer(session_id, question_id, selected)?;
                Ok(Some(WireMessage::Ack))
            }
            WireMessage::Finish { session_id } => {
                student()?;
                let r = self.engine.finish(session_id)?;
                Ok(Some(WireMessage::Result {
                    points: r.points,
                    max_points: r.max_points,
                    percent: r.percent,
                }))
            }
            WireMessage::Welcome { .. }
            | WireMessage::Ack
            | WireMessage::Session { .. }
            | WireMessage::Test { .. }
            | WireMessage::Result { .. }
            | WireMessage::Sessions { .. }
            | WireMessage::Event(_)
            | WireMessage::Error { .. } => Err(ProtocolError::state(format!(
                "{} is sent by the server only",
                msg.tag()
            ))),
        }
    }
}
