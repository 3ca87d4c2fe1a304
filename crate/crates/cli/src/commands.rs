use std::fs;
use std::io;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use quizwright_core::quizbank::{bank_from_document, hash_answers, load_bank, QuizError};
use quizwright_core::schema::{shipped, validate, DocumentError, Violation};
use quizwright_core::xml::{parse_tree, serialize};
use quizwright_server::{ExamServer, Server, StartupError, UserStore, UserStoreError};

use crate::{ServeArgs, EXIT_INVALID, EXIT_IO};

type Outcome = Result<(), u8>;

fn read(path: &Path) -> Result<Vec<u8>, u8> {
    fs::read(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_IO
    })
}

/// Writes through a sibling temporary file so readers never see a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Outcome {
    let fail = |e: io::Error| {
        eprintln!("error: cannot write {}: {e}", path.display());
        EXIT_IO
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(fail)?;
    }
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(fail)?;
    fs::rename(&tmp, path).map_err(fail)
}

fn print_violations(violations: &[Violation]) {
    for v in violations {
        println!("{v}");
    }
}

/// Prints a quiz error, one violation per line when there are several.
fn report_quiz_error(file: &Path, e: &QuizError) {
    match e {
        QuizError::Invalid(vs) => print_violations(vs),
        other => eprintln!("{}: {other}", file.display()),
    }
}

pub fn bank_validate(file: &Path) -> Outcome {
    let bytes = read(file)?;
    let doc = parse_tree(&bytes).map_err(|e| {
        eprintln!("{}:{e}", file.display());
        EXIT_INVALID
    })?;
    let violations = validate(&doc, shipped::quizbank());
    if !violations.is_empty() {
        print_violations(&violations);
        return Err(EXIT_INVALID);
    }
    let bank = bank_from_document(&doc).map_err(|e| {
        report_quiz_error(file, &e);
        EXIT_INVALID
    })?;
    println!("OK ({} questions)", bank.len());
    Ok(())
}

pub fn bank_hash(input: &Path, output: &Path) -> Outcome {
    let bytes = read(input)?;
    let doc = parse_tree(&bytes).map_err(|e| {
        eprintln!("{}:{e}", input.display());
        EXIT_INVALID
    })?;
    let hashed = hash_answers(&doc).map_err(|e| {
        report_quiz_error(input, &e);
        EXIT_INVALID
    })?;
    let mut out = serialize(&hashed);
    out.push(b'\n');
    if let Err(e) = load_bank(&out) {
        report_quiz_error(input, &e);
        return Err(EXIT_INVALID);
    }
    write_atomic(output, &out)?;
    println!("wrote {}", output.display());
    Ok(())
}

fn prompt_password() -> Result<String, u8> {
    let io_fail = |e: io::Error| {
        eprintln!("error: cannot read password: {e}");
        EXIT_IO
    };
    let first = rpassword::prompt_password("Password: ").map_err(io_fail)?;
    let again = rpassword::prompt_password("Repeat password: ").map_err(io_fail)?;
    if first != again {
        eprintln!("error: passwords do not match");
        return Err(EXIT_INVALID);
    }
    Ok(first)
}

pub fn user_add(data_dir: &Path, id: &str, password: Option<String>) -> Outcome {
    let path = data_dir.join("users.xml");
    let mut store = match fs::read(&path) {
        Ok(bytes) => UserStore::from_bytes(&bytes).map_err(|e| {
            match &e {
                UserStoreError::Document(DocumentError::Invalid(vs)) => print_violations(vs),
                other => eprintln!("{}: {other}", path.display()),
            }
            EXIT_INVALID
        })?,
        Err(e) if e.kind() == io::ErrorKind::NotFound => UserStore::new(),
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(EXIT_IO);
        }
    };
    if !quizwright_core::schema::is_id_token(id) {
        eprintln!("error: {}", UserStoreError::InvalidId(id.to_owned()));
        return Err(EXIT_INVALID);
    }
    let password = match password {
        Some(p) => p,
        None => prompt_password()?,
    };
    store.set_password(id, &password).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID
    })?;
    let mut out = serialize(&store.to_document());
    out.push(b'\n');
    write_atomic(&path, &out)?;
    println!("saved user {id} to {}", path.display());
    Ok(())
}

fn report_startup(e: &StartupError) {
    match e {
        StartupError::Invalid {
            path,
            source: QuizError::Invalid(vs),
        }
        | StartupError::Users {
            path,
            source: UserStoreError::Document(DocumentError::Invalid(vs)),
        } => {
            eprintln!("{}: {} schema violation(s)", path.display(), vs.len());
            print_violations(vs);
        }
        other => eprintln!("error: {other}"),
    }
}

pub fn serve(args: ServeArgs) -> Outcome {
    tracing_subscriber::fmt().with_writer(io::stderr).init();
    let nonce = args.nonce.unwrap_or_else(rand::random);
    let engine = ExamServer::from_data_dir(&args.data_dir, nonce).map_err(|e| {
        report_startup(&e);
        EXIT_INVALID
    })?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| {
        eprintln!("error: cannot start runtime: {e}");
        EXIT_IO
    })?;
    runtime.block_on(async move {
        let server = Server::bind(
            Arc::new(engine),
            SocketAddr::new(args.host, args.port),
            SocketAddr::new(args.host, args.http_port),
            args.web_dir,
        )
        .await
        .map_err(|e| {
            eprintln!("error: {e}");
            EXIT_IO
        })?;
        println!("protocol listening on {}", server.tcp_addr());
        println!("gateway listening on http://{}", server.http_addr());
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        server.run(shutdown).await.map_err(|e| {
            eprintln!("error: {e}");
            EXIT_IO
        })
    })
}
