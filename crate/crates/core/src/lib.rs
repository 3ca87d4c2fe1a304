//! Core library for quizwright, a client-server quiz testing suite.
//!
//! * [`xml`] parses XML as an event stream or a tree and serializes trees.
//! * [`schema`] loads the XML schema language and validates documents.
//! * [`digest`] implements MD5 and the answer-key digests.
//! * [`quizbank`] models banks and test configs, selects and grades questions.
//! * [`protocol`] defines the newline-delimited JSON wire format.

pub mod digest;
pub mod protocol;
pub mod quizbank;
pub mod schema;
pub mod xml;
