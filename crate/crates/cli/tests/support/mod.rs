#![allow(dead_code)]

pub mod corpus;
pub mod wire;

use std::path::{Path, PathBuf};

pub fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_quizwright")
}
