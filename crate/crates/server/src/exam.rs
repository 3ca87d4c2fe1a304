//! Transport-independent exam engine.
//!
//! Sessions live in a map of individually locked entries. Every mutation of a
//! session, including the monitor event it triggers, happens while holding
//! that session's lock, so monitors and snapshots never observe a half-applied
//! transition and events for one session arrive in transition order.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use tokio::sync::mpsc::UnboundedSender;

use quizwright_core::protocol::{
    ErrorCode, EventKind, PresentedQuestion, ProtocolError, SessionEvent, SessionState,
    SessionSummary, WireMessage,
};
use quizwright_core::quizbank::{
    grade, select_questions, Question, QuestionKind, QuizBank, QuizError, ScoreReport, TestConfig,
};

use crate::config::{DataDir, StartupError};
use crate::results::{result_document, write_result};
use crate::session::{
    derive_seed, format_session_id, now_secs, parse_session_id, Session, Student,
};
use crate::users::UserStore;

pub type Outbox = UnboundedSender<WireMessage>;

pub struct ExamServer {
    bank: QuizBank,
    config: TestConfig,
    users: UserStore,
    nonce: u64,
    results_dir: PathBuf,
    sessions: RwLock<Sessions>,
    monitors: Mutex<Vec<Outbox>>,
}

#[derive(Default)]
struct Sessions {
    next: u64,
    by_number: BTreeMap<u64, Arc<Mutex<Session>>>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

impl ExamServer {
    /// Builds an engine over already-validated data. `results_dir` must exist.
    pub fn new(
        bank: QuizBank,
        config: TestConfig,
        users: UserStore,
        nonce: u64,
        results_dir: impl Into<PathBuf>,
    ) -> Result<Self, QuizError> {
        config.check_against(&bank)?;
        Ok(ExamServer {
            bank,
            config,
            users,
            nonce,
            results_dir: results_dir.into(),
            sessions: RwLock::new(Sessions::default()),
            monitors: Mutex::new(Vec::new()),
        })
    }

    /// Loads `testconfig.xml`, the bank it names and `users.xml` from a data
    /// directory, creating `results/` if needed.
    pub fn from_data_dir(dir: &Path, nonce: u64) -> Result<Self, StartupError> {
        let data = DataDir::load(dir)?;
        let results = dir.join("results");
        std::fs::create_dir_all(&results).map_err(|source| StartupError::Io {
            path: results.clone(),
            source,
        })?;
        ExamServer::new(data.bank, data.config, data.users, nonce, results).map_err(|source| {
            StartupError::Invalid {
                path: dir.join("testconfig.xml"),
                source,
            }
        })
    }

    pub fn config(&self) -> &TestConfig {
        &self.config
    }

    pub fn bank(&self) -> &QuizBank {
        &self.bank
    }

    pub fn results_dir(&self) -> &Path {
        &self.results_dir
    }

    pub fn nonce(&self) -> u64 {
        self.nonce
    }

    fn session(&self, session_id: &str) -> Result<Arc<Mutex<Session>>, ProtocolError> {
        let unknown = || {
            ProtocolError::new(
                ErrorCode::UnknownSession,
                format!("no session `{session_id}`"),
            )
        };
        let n = parse_session_id(session_id).ok_or_else(unknown)?;
        let sessions = self.sessions.read().unwrap_or_else(|p| p.into_inner());
        sessions.by_number.get(&n).cloned().ok_or_else(unknown)
    }

    /// A copy of the current session record.
    pub fn session_record(&self, session_id: &str) -> Result<Session, ProtocolError> {
        let entry = self.session(session_id)?;
        let s = lock(&entry).clone();
        Ok(s)
    }

    fn emit(&self, kind: EventKind, s: &Session) {
        let msg = WireMessage::Event(SessionEvent {
            kind,
            session_id: s.session_id.clone(),
            name: s.student.name.clone(),
            subject: s.student.subject.clone(),
            answered_count: s.answers.len(),
            percent: s.report.as_ref().map(|r| r.percent),
        });
        lock(&self.monitors).retain(|tx| tx.send(msg.clone()).is_ok());
    }

    /// Registers `outbox` to receive every subsequent EVENT message.
    pub fn subscribe(&self, outbox: Outbox) {
        lock(&self.monitors).push(outbox);
    }

    pub fn authenticate(&self, user_id: &str, password: &str) -> Result<(), ProtocolError> {
        if self.users.verify(user_id, password) {
            Ok(())
        } else {
            Err(ProtocolError::auth("invalid user id or password"))
        }
    }

    /// Creates a Registered session. Returns its id and the test id.
    pub fn register(&self, student: Student) -> Result<(String, String), ProtocolError> {
        if student.name.trim().is_empty() {
            return Err(ProtocolError::malformed("name must not be empty"));
        }
        let mut sessions = self.sessions.write().unwrap_or_else(|p| p.into_inner());
        sessions.next += 1;
        let n = sessions.next;
        let session_id = format_session_id(n);
        let seed = derive_seed(&session_id, self.nonce);
        let entry = Arc::new(Mutex::new(Session::new(session_id.clone(), student, seed)));
        let guard = lock(&entry);
        sessions.by_number.insert(n, entry.clone());
        drop(sessions);
        self.emit(EventKind::Registered, &guard);
        Ok((session_id, self.config.id.clone()))
    }

    /// Presents the selected questions and moves the session to InProgress.
    pub fn start(&self, session_id: &str) -> Result<Vec<PresentedQuestion>, ProtocolError> {
        let entry = self.session(session_id)?;
        let mut s = lock(&entry);
        if s.state != SessionState::Registered {
            return Err(ProtocolError::state(format!(
                "session `{session_id}` has already started"
            )));
        }
        let picked = select_questions(&self.bank, &self.config, s.seed)
            .map_err(|e| ProtocolError::state(e.to_string()))?;
        s.presented = picked.iter().map(|q| q.id.clone()).collect();
        s.state = SessionState::InProgress;
        s.started_at = Some(now_secs());
        self.emit(EventKind::Started, &s);
        Ok(picked.into_iter().map(PresentedQuestion::from).collect())
    }

    /// Stores a selection, replacing any earlier one for the same question.
    /// Returns the number of answered questions.
    pub fn answer(
        &self,
        session_id: &str,
        question_id: &str,
        selected: &[String],
    ) -> Result<usize, ProtocolError> {
        let entry = self.session(session_id)?;
        let mut s = lock(&entry);
        if s.state != SessionState::InProgress {
            return Err(ProtocolError::state(format!(
                "session `{session_id}` is not in progress"
            )));
        }
        if !s.presented.iter().any(|id| id == question_id) {
            return Err(ProtocolError::new(
                ErrorCode::UnknownQuestion,
                format!("question `{question_id}` was not presented in this session"),
            ));
        }
        let q = self
            .bank
            .question(question_id)
            .expect("presented questions come from the bank");
        let set = check_selection(q, selected)?;
        s.answers.insert(question_id.to_owned(), set);
        self.emit(EventKind::Answered, &s);
        Ok(s.answers.len())
    }

    /// Grades the session, persists the result file and completes it.
    pub fn finish(&self, session_id: &str) -> Result<ScoreReport, ProtocolError> {
        let entry = self.session(session_id)?;
        let mut s = lock(&entry);
        if s.state != SessionState::InProgress {
            return Err(ProtocolError::state(format!(
                "session `{session_id}` is not in progress"
            )));
        }
        let questions: Vec<&Question> = s
            .presented
            .iter()
            .filter_map(|id| self.bank.question(id))
            .collect();
        let report =
            grade(&questions, &s.answers).map_err(|e| ProtocolError::state(e.to_string()))?;
        let doc = result_document(&s.session_id, &self.config.id, &s.student, &report);
        if let Err(e) = write_result(&self.results_dir, &s.session_id, &doc) {
            tracing::error!(session = %s.session_id, error = %e, "failed to write result file");
        }
        s.report = Some(report.clone());
        s.state = SessionState::Completed;
        s.finished_at = Some(now_secs());
        self.emit(EventKind::Finished, &s);
        Ok(report)
    }

    /// Point-in-time summaries ordered by session id.
    pub fn snapshot_sessions(&self) -> Vec<SessionSummary> {
        let sessions = self.sessions.read().unwrap_or_else(|p| p.into_inner());
        sessions
            .by_number
            .values()
            .map(|entry| lock(entry).summary())
            .collect()
    }
}

fn check_selection(q: &Question, selected: &[String]) -> Result<BTreeSet<String>, ProtocolError> {
    let set: BTreeSet<String> = selected.iter().cloned().collect();
    if let Some(bad) = set.iter().find(|id| !q.has_choice(id)) {
        return Err(ProtocolError::malformed(format!(
            "question `{}` has no choice `{bad}`",
            q.id
        )));
    }
    let ok = match q.kind {
        QuestionKind::Single => set.len() == 1,
        QuestionKind::Multi => !set.is_empty() && set.len() <= q.choices.len(),
    };
    if !ok {
        return Err(ProtocolError::malformed(format!(
            "{} question `{}` cannot take {} selected choice(s)",
            q.kind,
            q.id,
            set.len()
        )));
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use quizwright_core::digest::answer_digest;
    use quizwright_core::quizbank::Choice;

    fn question(id: &str, kind: QuestionKind, key: &[&str]) -> Question {
        Question {
            id: id.into(),
            kind,
            points: 1,
            text: format!("question {id}"),
            choices: ["a", "b", "c"]
                .iter()
                .map(|c| Choice {
                    id: (*c).into(),
                    text: c.to_uppercase(),
                })
                .collect(),
            key_digest: answer_digest(id, key).unwrap(),
        }
    }

    fn engine(dir: &Path) -> ExamServer {
        let bank = QuizBank {
            subject: "DB".into(),
            version: 1,
            questions: vec![
                question("q1", QuestionKind::Single, &["b"]),
                question("q2", QuestionKind::Multi, &["a", "c"]),
                question("q3", QuestionKind::Single, &["a"]),
            ],
        };
        let config = TestConfig {
            id: "t1".into(),
            bank_path: "b.xml".into(),
            question_count: 2,
            shuffle: false,
        };
        let mut users = UserStore::new();
        users.set_password("prof1", "secret").unwrap();
        ExamServer::new(bank, config, users, 7, dir).unwrap()
    }

    fn ana() -> Student {
        Student {
            name: "Ana".into(),
            year_of_study: 2,
            subject: "DB".into(),
        }
    }

    fn code<T: std::fmt::Debug>(r: Result<T, ProtocolError>) -> ErrorCode {
        r.unwrap_err().code
    }

    #[test]
    fn register_assigns_sequential_ids() {
        let dir = tempfile::tempdir().unwrap();
        let e = engine(dir.path());
        assert_eq!(e.register(ana()).unwrap(), ("S-000001".into(), "t1".into()));
        assert_eq!(e.register(ana()).unwrap().0, "S-000002");
        let s = e.session_record("S-000001").unwrap();
        assert_eq!(s.state, SessionState::Registered);
        assert!(s.answers.is_empty());
        let blank = Student {
            name: "  ".into(),
            ..ana()
        };
        assert_eq!(code(e.register(blank)), ErrorCode::Malformed);
    }

    #[test]
    fn start_transitions() {
        let dir = tempfile::tempdir().unwrap();
        let e = engine(dir.path());
        let (id, _) = e.register(ana()).unwrap();
        let qs = e.start(&id).unwrap();
        assert_eq!(
            qs.iter().map(|q| q.id.as_str()).collect::<Vec<_>>(),
            ["q1", "q2"]
        );
        assert_eq!(code(e.start(&id)), ErrorCode::State);
        assert_eq!(code(e.start("S-999999")), ErrorCode::UnknownSession);
    }

    #[test]
    fn answer_rules() {
        let dir = tempfile::tempdir().unwrap();
        let e = engine(dir.path());
        let (id, _) = e.register(ana()).unwrap();
        let sel = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(code(e.answer(&id, "q1", &sel(&["b"]))), ErrorCode::State);
        e.start(&id).unwrap();
        assert_eq!(e.answer(&id, "q1", &sel(&["a"])).unwrap(), 1);
        assert_eq!(e.answer(&id, "q1", &sel(&["b"])).unwrap(), 1);
        assert_eq!(
            code(e.answer(&id, "q1", &sel(&["a", "b"]))),
            ErrorCode::Malformed
        );
        assert_eq!(code(e.answer(&id, "q1", &sel(&[]))), ErrorCode::Malformed);
        assert_eq!(
            code(e.answer(&id, "q2", &sel(&["z"]))),
            ErrorCode::Malformed
        );
        assert_eq!(
            code(e.answer(&id, "q3", &sel(&["a"]))),
            ErrorCode::UnknownQuestion
        );
        assert_eq!(e.answer(&id, "q2", &sel(&["c", "a", "a"])).unwrap(), 2);
        assert_eq!(
            e.session_record(&id).unwrap().answers["q1"],
            ["b".to_string()].into()
        );
    }

    #[test]
    fn finish_grades_and_persists() {
        let dir = tempfile::tempdir().unwrap();
        let e = engine(dir.path());
        let (id, _) = e.register(ana()).unwrap();
        e.start(&id).unwrap();
        e.answer(&id, "q1", &["b".into()]).unwrap();
        e.answer(&id, "q2", &["a".into(), "c".into()]).unwrap();
        let r = e.finish(&id).unwrap();
        assert_eq!(r.percent.to_string(), "100.00");
        assert!(dir.path().join("S-000001.xml").exists());
        assert_eq!(code(e.finish(&id)), ErrorCode::State);
        assert_eq!(code(e.answer(&id, "q1", &["b".into()])), ErrorCode::State);
        let snap = e.snapshot_sessions();
        assert_eq!(snap.len(), 1);
        assert_eq!(snap[0].state, SessionState::Completed);
        assert_eq!(snap[0].percent, Some(r.percent));
    }

    #[test]
    fn finish_without_answers() {
        let dir = tempfile::tempdir().unwrap();
        let e = engine(dir.path());
        let (id, _) = e.register(ana()).unwrap();
        assert_eq!(code(e.finish(&id)), ErrorCode::State);
        e.start(&id).unwrap();
        assert_eq!(e.finish(&id).unwrap().percent.to_string(), "0.00");
    }

    #[test]
    fn events_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let e = engine(dir.path());
        let (tx, mut rx) = tokio::sync::mpsc::unbounded_channel();
        e.subscribe(tx);
        let (id, _) = e.register(ana()).unwrap();
        e.start(&id).unwrap();
        e.answer(&id, "q1", &["b".into()]).unwrap();
        e.finish(&id).unwrap();
        let mut kinds = Vec::new();
        while let Ok(WireMessage::Event(ev)) = rx.try_recv() {
            kinds.push((
                ev.kind,
                ev.answered_count,
                ev.percent.map(|p| p.to_string()),
            ));
        }
        assert_eq!(
            kinds,
            [
                (EventKind::Registered, 0, None),
                (EventKind::Started, 0, None),
                (EventKind::Answered, 1, None),
                (EventKind::Finished, 1, Some("50.00".to_string())),
            ]
        );
    }

    #[test]
    fn authentication() {
        let dir = tempfile::tempdir().unwrap();
        let e = engine(dir.path());
        assert!(e.authenticate("prof1", "secret").is_ok());
        assert_eq!(code(e.authenticate("prof1", "wrong")), ErrorCode::Auth);
        assert_eq!(code(e.authenticate("ghost", "secret")), ErrorCode::Auth);
    }
}
