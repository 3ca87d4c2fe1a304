use quizwright_core::digest::password_digest;
use quizwright_core::schema::{is_id_token, shipped, DocumentError};
use quizwright_core::xml::{Element, XmlDocument};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UserStoreError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("user id `{0}` appears more than once")]
    Duplicate(String),
    #[error("`{0}` is not a valid user id (letters, digits, `_` and `-` only)")]
    InvalidId(String),
}

/// Professor accounts: user id to hex MD5 of the password, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UserStore {
    users: Vec<(String, String)>,
}

impl UserStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses and validates a users.xml document.
    pub fn from_bytes(input: &[u8]) -> Result<Self, UserStoreError> {
        let doc = shipped::parse_valid(input, shipped::users())?;
        let mut store = UserStore::new();
        for u in doc.root.elements_named("user") {
            let id = u.attr("id").unwrap_or_default();
            if store.digest(id).is_some() {
                return Err(UserStoreError::Duplicate(id.to_owned()));
            }
            store.users.push((
                id.to_owned(),
                u.attr("digest").unwrap_or_default().to_owned(),
            ));
        }
        Ok(store)
    }

    pub fn digest(&self, user_id: &str) -> Option<&str> {
        self.users
            .iter()
            .find(|(id, _)| id == user_id)
            .map(|(_, d)| d.as_str())
    }

    /// True iff `user_id` exists and the MD5 of `password` matches its digest.
    pub fn verify(&self, user_id: &str, password: &str) -> bool {
        self.digest(user_id)
            .is_some_and(|d| d == password_digest(password))
    }

    /// Inserts a user or replaces an existing user's password.
    pub fn set_password(&mut self, user_id: &str, password: &str) -> Result<(), UserStoreError> {
        if !is_id_token(user_id) {
            return Err(UserStoreError::InvalidId(user_id.to_owned()));
        }
        let digest = password_digest(password);
        match self.users.iter_mut().find(|(id, _)| id == user_id) {
            Some(entry) => entry.1 = digest,
            None => self.users.push((user_id.to_owned(), digest)),
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn to_document(&self) -> XmlDocument {
        let mut root = Element::new("users");
        for (id, digest) in &self.users {
            root = root.with_text("\n  ").with_child(
                Element::new("user")
                    .with_attr("id", id)
                    .with_attr("digest", digest),
            );
        }
        if !self.users.is_empty() {
            root = root.with_text("\n");
        }
        XmlDocument::new(root)
    }
}
