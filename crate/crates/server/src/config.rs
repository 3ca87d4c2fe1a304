//! Startup data: the files a server reads from its data directory.

use std::io;
use std::path::{Path, PathBuf};

use quizwright_core::quizbank::{load_bank, QuizBank, QuizError, TestConfig};

use crate::users::{UserStore, UserStoreError};

#[derive(Debug, thiserror::Error)]
pub enum StartupError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Invalid { path: PathBuf, source: QuizError },
    #[error("{}: {source}", path.display())]
    Users {
        path: PathBuf,
        source: UserStoreError,
    },
}

/// `testconfig.xml`, the bank it references and `users.xml`, all validated.
#[derive(Debug, Clone)]
pub struct DataDir {
    pub config: TestConfig,
    pub bank: QuizBank,
    pub users: UserStore,
}

fn read(path: PathBuf) -> Result<(PathBuf, Vec<u8>), StartupError> {
    match std::fs::read(&path) {
        Ok(bytes) => Ok((path, bytes)),
        Err(source) => Err(StartupError::Io { path, source }),
    }
}

impl DataDir {
    pub fn load(dir: &Path) -> Result<Self, StartupError> {
        let (path, bytes) = read(dir.join("testconfig.xml"))?;
        let config = TestConfig::from_bytes(&bytes)
            .map_err(|source| StartupError::Invalid { path, source })?;

        let (path, bytes) = read(dir.join(&config.bank_path))?;
        let bank = load_bank(&bytes).map_err(|source| StartupError::Invalid { path, source })?;

        let (path, bytes) = read(dir.join("users.xml"))?;
        let users =
            UserStore::from_bytes(&bytes).map_err(|source| StartupError::Users { path, source })?;

        Ok(DataDir {
            config,
            bank,
            users,
        })
    }
}
