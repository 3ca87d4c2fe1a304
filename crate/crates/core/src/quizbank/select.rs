use super::{Question, QuizBank, QuizError, TestConfig};

/// SplitMix64 pseudo-random generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Picks the questions for one sitting.
///
/// With `shuffle` the bank indices are permuted by Fisher–Yates driven by
/// SplitMix64 (`j = next() mod (i + 1)` for `i` from the last index down to 1)
/// and the first `question_count` are taken; otherwise the first
/// `question_count` in bank order.
pub fn select_questions<'b>(
    bank: &'b QuizBank,
    config: &TestConfig,
    seed: u64,
) -> Result<Vec<&'b Question>, QuizError> {
    let n = bank.questions.len();
    if config.question_count > n {
        return Err(QuizError::CountExceedsBank {
            requested: config.question_count,
            available: n,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    if config.shuffle {
        let mut rng = SplitMix64::new(seed);
        for i in (1..n).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            order.swap(i, j);
        }
    }
    Ok(order
        .into_iter()
        .take(config.question_count)
        .map(|i| &bank.questions[i])
        .collect())
}
