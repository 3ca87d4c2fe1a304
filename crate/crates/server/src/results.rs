use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use quizwright_core::quizbank::ScoreReport;
use quizwright_core::xml::{serialize, Element, XmlDocument};

use crate::session::Student;

/// `<result session test><student/><answers><answer/>...</answers><score/></result>`
pub fn result_document(
    session_id: &str,
    test_id: &str,
    student: &Student,
    report: &ScoreReport,
) -> XmlDocument {
    let mut answers = Element::new("answers");
    for q in &report.per_question {
        answers = answers.with_child(
            Element::new("answer")
                .with_attr("question", &q.question_id)
                .with_attr("selected", q.selected.join(",")),
        );
    }
    XmlDocument::new(
        Element::new("result")
            .with_attr("session", session_id)
            .with_attr("test", test_id)
            .with_child(
                Element::new("student")
                    .with_attr("name", &student.name)
                    .with_attr("year", student.year_of_study.to_string())
                    .with_attr("subject", &student.subject),
            )
            .with_child(answers)
            .with_child(
                Element::new("score")
                    .with_attr("points", report.points.to_string())
                    .with_attr("max", report.max_points.to_string())
                    .with_attr("percent", report.percent.to_string()),
            ),
    )
}

/// Writes `<dir>/<session_id>.xml` via a temporary file and a rename.
pub fn write_result(dir: &Path, session_id: &str, doc: &XmlDocument) -> io::Result<PathBuf> {
    let target = dir.join(format!("{session_id}.xml"));
    let tmp = dir.join(format!(".{session_id}.xml.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&serialize(doc))?;
        f.write_all(b"\n")?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &target)?;
    Ok(target)
}
