#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use quizwright_core::digest::answer_digest;
use quizwright_core::quizbank::{Choice, Question, QuestionKind, QuizBank, TestConfig};
use quizwright_core::xml::serialize;
use quizwright_server::{ExamServer, UserStore};

pub const NONCE: u64 = 42;

/// Question `q{i}` has choices a..d. Odd-numbered questions are single with
/// key `a`; even ones are multi with key `{b, d}`.
pub fn key(i: usize) -> BTreeSet<String> {
    if i % 2 == 1 {
        ["a"].map(String::from).into()
    } else {
        ["b", "d"].map(String::from).into()
    }
}

pub fn bank(n: usize) -> QuizBank {
    let questions = (1..=n)
        .map(|i| {
            let id = format!("q{i}");
            Question {
                kind: if i % 2 == 1 {
                    QuestionKind::Single
                } else {
                    QuestionKind::Multi
                },
                points: (i % 3 + 1) as u32,
                text: format!("Question {i}?"),
                choices: ["a", "b", "c", "d"]
                    .iter()
                    .map(|c| Choice {
                        id: (*c).into(),
                        text: format!("option {c}"),
                    })
                    .collect(),
                key_digest: answer_digest(&id, &key(i).into_iter().collect::<Vec<_>>()).unwrap(),
                id,
            }
        })
        .collect();
    QuizBank {
        subject: "Databases".into(),
        version: 1,
        questions,
    }
}

pub fn config(count: usize) -> TestConfig {
    TestConfig {
        id: "t1".into(),
        bank_path: "banks/db.xml".into(),
        question_count: count,
        shuffle: true,
    }
}

/// Writes a complete data directory: a bank of `n` questions, a config
/// asking for `count`, and user `prof1` with password `secret`.
pub fn write_data_dir(dir: &Path, n: usize, count: usize) {
    std::fs::create_dir_all(dir.join("banks")).unwrap();
    std::fs::write(dir.join("banks/db.xml"), serialize(&bank(n).to_document())).unwrap();
    std::fs::write(
        dir.join("testconfig.xml"),
        serialize(&config(count).to_document()),
    )
    .unwrap();
    let mut users = UserStore::new();
    users.set_password("prof1", "secret").unwrap();
    std::fs::write(dir.join("users.xml"), serialize(&users.to_document())).unwrap();
}

pub fn engine(dir: &Path, n: usize, count: usize) -> Arc<ExamServer> {
    write_data_dir(dir, n, count);
    Arc::new(ExamServer::from_data_dir(dir, NONCE).unwrap())
}

use quizwright_core::protocol::{decode, encode, Role, WireMessage, PROTOCOL_VERSION};
use quizwright_server::Server;
use tokio::io::{AsyncBufReadExt, AsyncWriteExt, BufReader};
use tokio::net::tcp::{OwnedReadHalf, OwnedWriteHalf};
use tokio::net::TcpStream;

pub struct Running {
    pub tcp: std::net::SocketAddr,
    pub http: std::net::SocketAddr,
    pub engine: Arc<ExamServer>,
    stop: Option<tokio::sync::oneshot::Sender<()>>,
    pub task: tokio::task::JoinHandle<std::io::Result<()>>,
}

impl Running {
    pub async fn stop(mut self) {
        let _ = self.stop.take().unwrap().send(());
        self.task.await.unwrap().unwrap();
    }
}

pub async fn serve(engine: Arc<ExamServer>, web_dir: Option<std::path::PathBuf>) -> Running {
    let any = "127.0.0.1:0".parse().unwrap();
    let server = Server::bind(engine.clone(), any, any, web_dir)
        .await
        .unwrap();
    let (tcp, http) = (server.tcp_addr(), server.http_addr());
    let (stop, rx) = tokio::sync::oneshot::channel::<()>();
    let task = tokio::spawn(server.run(async move {
        let _ = rx.await;
    }));
    Running {
        tcp,
        http,
        engine,
        stop: Some(stop),
        task,
    }
}

pub struct Client {
    reader: BufReader<OwnedReadHalf>,
    writer: OwnedWriteHalf,
}

impl Client {
    pub async fn connect(addr: std::net::SocketAddr) -> Client {
        let (r, w) = TcpStream::connect(addr).await.unwrap().into_split();
        Client {
            reader: BufReader::new(r),
            writer: w,
        }
    }

    /// Connects and completes the HELLO exchange.
    pub async fn hello(addr: std::net::SocketAddr, role: Role) -> Client {
        let mut c = Client::connect(addr).await;
        let reply = c
            .call(&WireMessage::Hello {
                role,
                protocol_version: PROTOCOL_VERSION,
            })
            .await;
        assert!(matches!(reply, WireMessage::Welcome { .. }), "{reply:?}");
        c
    }

    pub async fn send_raw(&mut self, bytes: &[u8]) {
        self.writer.write_all(bytes).await.unwrap();
    }

    pub async fn send(&mut self, msg: &WireMessage) {
        self.send_raw(&encode(msg).unwrap()).await;
    }

    /// `None` once the server closes the stream.
    pub async fn recv(&mut self) -> Option<WireMessage> {
        let mut line = Vec::new();
        let n = tokio::time::timeout(
            std::time::Duration::from_secs(10),
            self.reader.read_until(b'\n', &mut line),
        )
        .await
        .expect("server reply timed out")
        .unwrap();
        if n == 0 {
            return None;
        }
        assert_eq!(line.pop(), Some(b'\n'));
        Some(decode(&line).unwrap_or_else(|e| {
            panic!(
                "undecodable frame {:?}: {e:?}",
                String::from_utf8_lossy(&line)
            )
        }))
    }

    pub async fn call(&mut self, msg: &WireMessage) -> WireMessage {
        self.send(msg).await;
        self.recv().await.expect("connection closed")
    }
}
