mod support;

use quizwright_server::{ExamServer, Server, StartupError};

#[test]
fn loads_a_complete_data_dir() {
    let dir = tempfile::tempdir().unwrap();
    support::write_data_dir(dir.path(), 5, 3);
    let engine = ExamServer::from_data_dir(dir.path(), 1).unwrap();
    assert_eq!(engine.bank().len(), 5);
    assert_eq!(engine.config().question_count, 3);
    assert!(dir.path().join("results").is_dir());
}

#[test]
fn missing_file() {
    let dir = tempfile::tempdir().unwrap();
    support::write_data_dir(dir.path(), 5, 3);
    std::fs::remove_file(dir.path().join("users.xml")).unwrap();
    let err = ExamServer::from_data_dir(dir.path(), 1).err().unwrap();
    assert!(
        matches!(&err, StartupError::Io { path, .. } if path.ends_with("users.xml")),
        "{err}"
    );
}

#[test]
fn invalid_bank_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    support::write_data_dir(dir.path(), 5, 3);
    let bank = dir.path().join("banks/db.xml");
    let text = std::fs::read_to_string(&bank)
        .unwrap()
        .replacen(" subject=\"Databases\"", "", 1);
    std::fs::write(&bank, text).unwrap();
    let err = ExamServer::from_data_dir(dir.path(), 1).err().unwrap();
    let msg = err.to_string();
    assert!(
        msg.contains("db.xml") && msg.contains("MissingAttr"),
        "{msg}"
    );
}

#[test]
fn config_asking_for_too_many_questions() {
    let dir = tempfile::tempdir().unwrap();
    support::write_data_dir(dir.path(), 3, 4);
    let err = ExamServer::from_data_dir(dir.path(), 1).err().unwrap();
    assert!(err.to_string().contains("asks for 4 questions"), "{err}");
}

#[tokio::test]
async fn bind_conflict_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let engine = support::engine(dir.path(), 3, 2);
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = taken.local_addr().unwrap();
    let any = "127.0.0.1:0".parse().unwrap();
    let err = Server::bind(engine.clone(), addr, any, None)
        .await
        .err()
        .unwrap();
    assert_eq!(err.addr, addr);
    assert!(Server::bind(engine, any, addr, None).await.is_err());
}
