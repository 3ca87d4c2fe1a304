use super::{QuestionKind, QuizError};
use crate::digest::answer_digest;
use crate::xml::XmlDocument;

/// Converts an authoring-format bank, whose `<answer>` elements carry
/// plaintext `key="b"` or `key="b,d"`, into digest form.
///
/// The `key` attribute is replaced in place by `digest`. Every key id must
/// name a choice of the enclosing question, and single-answer questions must
/// have exactly one key id.
pub fn hash_answers(plaintext_bank: &XmlDocument) -> Result<XmlDocument, QuizError> {
    let mut doc = plaintext_bank.clone();
    for q in doc.root.elements_mut().filter(|e| e.name == "question") {
        let qid = q.attr("id").unwrap_or_default().to_owned();
        let kind: Option<QuestionKind> = q.attr("type").and_then(|t| t.parse().ok());
        let choice_ids: Vec<String> = q
            .elements_named("choice")
            .filter_map(|c| c.attr("id"))
            .map(str::to_owned)
            .collect();

        for answer in q.elements_mut().filter(|e| e.name == "answer") {
            let Some(key) = answer.attr("key") else {
                continue;
            };
            if qid.is_empty() {
                return Err(QuizError::Authoring {
                    question: qid,
                    message: "question has no id".into(),
                });
            }
            let mut ids: Vec<&str> = key.split(',').map(str::trim).collect();
            if ids.iter().any(|s| s.is_empty()) {
                return Err(QuizError::Authoring {
                    question: qid,
                    message: format!("malformed key `{key}`"),
                });
            }
            ids.sort_unstable();
            ids.dedup();
            if let Some(bad) = ids.iter().find(|id| !choice_ids.iter().any(|c| c == *id)) {
                return Err(QuizError::UnknownKeyChoice {
                    question: qid,
                    choice: (*bad).to_owned(),
                });
            }
            if kind == Some(QuestionKind::Single) && ids.len() != 1 {
                return Err(QuizError::KeyCardinality {
                    question: qid,
                    found: ids.len(),
                });
            }
            let digest = answer_digest(&qid, &ids).expect("key ids are non-empty");
            let slot = answer
                .attributes
                .iter_mut()
                .find(|a| a.name == "key")
                .expect("key attribute present");
            slot.name = "digest".into();
            slot.value = digest;
        }
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quizbank::load_bank;
    use crate::xml::{parse_tree, select_path, serialize};

    const AUTHOR: &str = r#"<quizbank subject="DB" version="1">
  <question id="q1" type="single" points="1">
    <text>T</text><choice id="a">A</choice><choice id="b">B</choice>
    <answer key="b"/>
  </question>
  <question id="q2" type="multi" points="1">
    <text>T</text><choice id="b">B</choice><choice id="c">C</choice><choice id="d">D</choice>
    <answer key="KEY2"/>
  </question>
</quizbank>"#;

    fn hashed(src: &str) -> Result<XmlDocument, QuizError> {
        hash_answers(&parse_tree(src.as_bytes()).unwrap())
    }

    fn digest_of(doc: &XmlDocument, path: &str) -> String {
        select_path(doc, path).unwrap()[0]
            .attr("digest")
            .unwrap()
            .to_owned()
    }

    #[test]
    fn replaces_key_with_digest() {
        let doc = hashed(&AUTHOR.replace("KEY2", "b,d")).unwrap();
        let a1 = select_path(&doc, "quizbank/question[1]/answer").unwrap()[0];
        assert_eq!(a1.attr("key"), None);
        assert_eq!(
            a1.attr("digest").unwrap(),
            answer_digest("q1", &["b"]).unwrap()
        );
        let bank = load_bank(&serialize(&doc)).unwrap();
        assert_eq!(bank.len(), 2);
    }

    #[test]
    fn key_order_is_irrelevant() {
        let x = hashed(&AUTHOR.replace("KEY2", "b,d")).unwrap();
        let y = hashed(&AUTHOR.replace("KEY2", "d,b")).unwrap();
        assert_eq!(
            digest_of(&x, "quizbank/question[2]/answer"),
            digest_of(&y, "quizbank/question[2]/answer")
        );
    }

    #[test]
    fn unknown_choice() {
        let e = hashed(&AUTHOR.replace("KEY2", "z")).unwrap_err();
        assert_eq!(
            e,
            QuizError::UnknownKeyChoice {
                question: "q2".into(),
                choice: "z".into()
            }
        );
        let msg = e.to_string();
        assert!(msg.contains("q2") && msg.contains('z'));
    }

    #[test]
    fn single_needs_one_key() {
        let src = AUTHOR
            .replace("KEY2", "b")
            .replace(r#"key="b"/>"#, r#"key="a,b"/>"#);
        assert_eq!(
            hashed(&src).unwrap_err(),
            QuizError::KeyCardinality {
                question: "q1".into(),
                found: 2
            }
        );
    }

    #[test]
    fn malformed_key() {
        assert!(matches!(
            hashed(&AUTHOR.replace("KEY2", "b,,d")),
            Err(QuizError::Authoring { .. })
        ));
    }
}
