//! `quizwright`: bank authoring, professor accounts and the exam server.
//!
//! Exit codes: 0 success, 1 invalid input or startup validation failure,
//! 2 unreadable/unwritable file or port bind failure, 64 usage error.

mod commands;

use std::net::IpAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub const EXIT_INVALID: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "quizwright",
    version,
    about = "Quiz bank tools and exam server"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate or author quiz banks.
    #[command(subcommand)]
    Bank(BankCommand),
    /// Manage professor accounts in users.xml.
    #[command(subcommand)]
    User(UserCommand),
    /// Run the exam server.
    Serve(ServeArgs),
}

#[derive(Subcommand)]
enum BankCommand {
    /// Check a digest-form bank against the bank schema.
    Validate { file: PathBuf },
    /// Turn an authoring bank (plaintext `key` attributes) into digest form.
    Hash {
        input: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum UserCommand {
    /// Add a professor or reset their password.
    Add {
        id: String,
        /// Password on the command line. Visible to other local users; meant
        /// for scripts and tests. Prompted for when omitted.
        #[arg(long)]
        password: Option<String>,
        #[arg(long, env = "QW_DATA_DIR", default_value = "data")]
        data_dir: PathBuf,
    },
}

#[derive(clap::Args)]
pub struct ServeArgs {
    /// Protocol (TCP) port; 0 picks a free one.
    #[arg(long, env = "QW_PORT", default_value_t = quizwright_server::DEFAULT_PORT)]
    pub port: u16,
    /// HTTP/WebSocket gateway port; 0 picks a free one.
    #[arg(long, env = "QW_HTTP_PORT", default_value_t = quizwright_server::DEFAULT_HTTP_PORT)]
    pub http_port: u16,
    #[arg(long, env = "QW_HOST", default_value = "0.0.0.0")]
    pub host: IpAddr,
    #[arg(long, env = "QW_DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,
    /// Seed-derivation nonce; random when omitted.
    #[arg(long, env = "QW_NONCE")]
    pub nonce: Option<u64>,
    /// Directory of built web UI assets served at `/`.
    #[arg(long, env = "QW_WEB_DIR")]
    pub web_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Bank(BankCommand::Validate { file }) => commands::bank_validate(&file),
        Command::Bank(BankCommand::Hash { input, output }) => commands::bank_hash(&input, &output),
        Command::User(UserCommand::Add {
            id,
            password,
            data_dir,
        }) => commands::user_add(&data_dir, &id, password),
        Command::Serve(args) => commands::serve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
