//! Protocol client and server process helpers for end-to-end runs.

use std::net::SocketAddr;
use std::path::Path;
use std::process::Stdio;
use std::time::Duration;

use quizwright_core::protocol::{decode, encode, Role, WireMessage, PROTOCOL_VERSION};
use tokio::io::{AsyncBufReadExt, AsyncWriteExt, BufReader};
use tokio::net::tcp::{OwnedReadHalf, OwnedWriteHalf};
use tokio::net::TcpStream;
use tokio::process::{Child, Command};

pub struct Client {
    reader: BufReader<OwnedReadHalf>,
    writer: OwnedWriteHalf,
}

impl Client {
    pub async fn connect(addr: SocketAddr, role: Role) -> Client {
        let (r, w) = TcpStream::connect(addr)
            .await
            .expect("connect")
            .into_split();
        let mut c = Client {
            reader: BufReader::new(r),
            writer: w,
        };
        match c
            .call(&WireMessage::Hello {
                role,
                protocol_version: PROTOCOL_VERSION,
            })
            .await
        {
            WireMessage::Welcome { .. } => c,
            other => panic!("HELLO answered with {other:?}"),
        }
    }

    pub async fn send(&mut self, msg: &WireMessage) {
        self.writer
            .write_all(&encode(msg).unwrap())
            .await
            .expect("write");
    }

    pub async fn recv(&mut self) -> Option<WireMessage> {
        let mut line = Vec::new();
        let n = tokio::time::timeout(
            Duration::from_secs(20),
            self.reader.read_until(b'\n', &mut line),
        )
        .await
        .expect("timed out waiting for the server")
        .expect("read");
        if n == 0 {
            return None;
        }
        line.pop();
        Some(decode(&line).expect("server sent an undecodable frame"))
    }

    pub async fn call(&mut self, msg: &WireMessage) -> WireMessage {
        self.send(msg).await;
        self.recv().await.expect("server closed the connection")
    }
}

/// A `quizwright serve` child process on ephemeral ports.
pub struct ServerProcess {
    pub child: Child,
    pub tcp: SocketAddr,
    pub http: SocketAddr,
}

impl ServerProcess {
    pub async fn start(data_dir: &Path, nonce: u64) -> ServerProcess {
        let mut child = Command::new(super::bin())
            .args([
                "serve",
                "--host",
                "127.0.0.1",
                "--port",
                "0",
                "--http-port",
                "0",
                "--nonce",
            ])
            .arg(nonce.to_string())
            .arg("--data-dir")
            .arg(data_dir)
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .kill_on_drop(true)
            .spawn()
            .expect("spawn quizwright serve");
        let mut lines = BufReader::new(child.stdout.take().unwrap()).lines();
        let addr = |prefix: &str, line: Option<String>| -> SocketAddr {
            let line = line.unwrap_or_else(|| panic!("server exited before announcing {prefix}"));
            let rest = line
                .strip_prefix(prefix)
                .unwrap_or_else(|| panic!("unexpected line {line:?}"));
            rest.trim_start_matches("http://").parse().unwrap()
        };
        let read = tokio::time::timeout(Duration::from_secs(10), async {
            let a = lines.next_line().await.unwrap();
            let b = lines.next_line().await.unwrap();
            (a, b)
        });
        let (a, b) = read.await.expect("server did not start in time");
        let tcp = addr("protocol listening on ", a);
        let http = addr("gateway listening on ", b);
        ServerProcess { child, tcp, http }
    }

    pub async fn stop(mut self) {
        let _ = self.child.kill().await;
    }
}
