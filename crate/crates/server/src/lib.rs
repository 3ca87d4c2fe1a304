//! The quizwright server: session engine, TCP protocol listener and
//! HTTP/WebSocket gateway.

pub mod config;
pub mod connection;
pub mod exam;
pub mod gateway;
pub mod results;
pub mod session;
pub mod tcp;
pub mod users;

use std::future::Future;
use std::io;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use tokio::net::TcpListener;

pub use config::{DataDir, StartupError};
pub use connection::{Connection, Flow, SERVER_VERSION};
pub use exam::ExamServer;
pub use session::{derive_seed, Session, Student};
pub use users::{UserStore, UserStoreError};

pub const DEFAULT_PORT: u16 = 7401;
pub const DEFAULT_HTTP_PORT: u16 = 7402;

#[derive(Debug, thiserror::Error)]
#[error("cannot bind {addr}: {source}")]
pub struct BindError {
    pub addr: SocketAddr,
    pub source: io::Error,
}

/// Both listeners, bound and ready to serve.
pub struct Server {
    engine: Arc<ExamServer>,
    tcp: TcpListener,
    http: TcpListener,
    web_dir: Option<PathBuf>,
}

impl Server {
    pub async fn bind(
        engine: Arc<ExamServer>,
        tcp_addr: SocketAddr,
        http_addr: SocketAddr,
        web_dir: Option<PathBuf>,
    ) -> Result<Server, BindError> {
        let tcp = TcpListener::bind(tcp_addr)
            .await
            .map_err(|source| BindError {
                addr: tcp_addr,
                source,
            })?;
        let http = TcpListener::bind(http_addr)
            .await
            .map_err(|source| BindError {
                addr: http_addr,
                source,
            })?;
        Ok(Server {
            engine,
            tcp,
            http,
            web_dir,
        })
    }

    pub fn engine(&self) -> &Arc<ExamServer> {
        &self.engine
    }

    pub fn tcp_addr(&self) -> SocketAddr {
        self.tcp
            .local_addr()
            .expect("bound listener has an address")
    }

    pub fn http_addr(&self) -> SocketAddr {
        self.http
            .local_addr()
            .expect("bound listener has an address")
    }

    /// Serves until `shutdown` resolves.
    pub async fn run(self, shutdown: impl Future<Output = ()> + Send + 'static) -> io::Result<()> {
        let app = gateway::router(self.engine.clone(), self.web_dir);
        let tcp = tokio::spawn(tcp::accept_loop(self.engine, self.tcp));
        let result = axum::serve(self.http, app)
            .with_graceful_shutdown(shutdown)
            .await;
        tcp.abort();
        result
    }
}
