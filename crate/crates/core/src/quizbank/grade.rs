use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Question, QuizError};
use crate::digest::answer_digest;

/// Submitted selections, keyed by question id.
pub type AnswerMap = BTreeMap<String, BTreeSet<String>>;

/// A percentage with two fraction digits, stored as hundredths and always
/// rendered as `NN.NN`. Serializes as that string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Percent(u32);

impl Percent {
    pub const ZERO: Percent = Percent(0);
    pub const HUNDRED: Percent = Percent(10_000);

    pub fn from_hundredths(h: u32) -> Self {
        Percent(h)
    }

    pub fn hundredths(self) -> u32 {
        self.0
    }

    /// `100 * points / max` rounded half-up to two decimals. Zero when `max`
    /// is zero.
    pub fn of(points: u32, max: u32) -> Self {
        if max == 0 {
            return Percent::ZERO;
        }
        let (p, m) = (u64::from(points), u64::from(max));
        Percent(((20_000 * p + m) / (2 * m)) as u32)
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

impl FromStr for Percent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("`{s}` is not a percentage with two decimals");
        let (whole, frac) = s.split_once('.').ok_or_else(bad)?;
        if whole.is_empty()
            || frac.len() != 2
            || !whole.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let whole: u32 = whole.parse().map_err(|_| bad())?;
        let frac: u32 = frac.parse().map_err(|_| bad())?;
        whole
            .checked_mul(100)
            .and_then(|w| w.checked_add(frac))
            .map(Percent)
            .ok_or_else(bad)
    }
}

impl Serialize for Percent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Percent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionScore {
    pub question_id: String,
    /// Sorted; empty when unanswered.
    pub selected: Vec<String>,
    pub correct: bool,
    pub points_earned: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreReport {
    pub per_question: Vec<QuestionScore>,
    pub points: u32,
    pub max_points: u32,
    pub percent: Percent,
}

/// Scores `answers` against the presented `questions`, all-or-nothing per
/// question. Unanswered questions score zero.
pub fn grade<Q: Borrow<Question>>(
    questions: &[Q],
    answers: &AnswerMap,
) -> Result<ScoreReport, QuizError> {
    if let Some(stray) = answers
        .keys()
        .find(|id| !questions.iter().any(|q| q.borrow().id == **id))
    {
        return Err(QuizError::UnpresentedAnswer(stray.clone()));
    }

    let mut per_question = Vec::with_capacity(questions.len());
    let mut points = 0;
    let mut max_points = 0;
    for q in questions {
        let q = q.borrow();
        max_points += q.points;
        let selected: Vec<String> = answers
            .get(&q.id)
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default();
        let correct = answer_digest(&q.id, &selected).is_ok_and(|d| d == q.key_digest);
        let earned = if correct { q.points } else { 0 };
        points += earned;
        per_question.push(QuestionScore {
            question_id: q.id.clone(),
            selected,
            correct,
            points_earned: earned,
        });
    }
    Ok(ScoreReport {
        per_question,
        points,
        max_points,
        percent: Percent::of(points, max_points),
    })
}
