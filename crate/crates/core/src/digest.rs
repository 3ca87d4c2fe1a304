//! MD5 message digest (RFC 1321) and the answer-key helpers built on it.
//!
//! MD5 is not collision resistant. It is used here to keep answer keys out of
//! plain sight in quiz-bank files, not as a security boundary: a bank with a
//! handful of choices per question can be brute-forced in microseconds.

use std::fmt;
use std::str::FromStr;

/// Per-step left-rotation amounts, four per round.
const SHIFTS: [[u32; 4]; 4] = [
    [7, 12, 17, 22],
    [5, 9, 14, 20],
    [4, 11, 16, 23],
    [6, 10, 15, 21],
];

/// `floor(abs(sin(i + 1)) * 2^32)` for i in 0..64.
const SINE_TABLE: [u32; 64] = [
    0xd76aa478, 0xe8c7b756, 0x242070db, 0xc1bdceee, 0xf57c0faf, 0x4787c62a, 0xa8304613, 0xfd469501,
    0x698098d8, 0x8b44f7af, 0xffff5bb1, 0x895cd7be, 0x6b901122, 0xfd987193, 0xa679438e, 0x49b40821,
    0xf61e2562, 0xc040b340, 0x265e5a51, 0xe9b6c7aa, 0xd62f105d, 0x02441453, 0xd8a1e681, 0xe7d3fbc8,
    0x21e1cde6, 0xc33707d6, 0xf4d50d87, 0x455a14ed, 0xa9e3e905, 0xfcefa3f8, 0x676f02d9, 0x8d2a4c8a,
    0xfffa3942, 0x8771f681, 0x6d9d6122, 0xfde5380c, 0xa4beea44, 0x4bdecfa9, 0xf6bb4b60, 0xbebfbc70,
    0x289b7ec6, 0xeaa127fa, 0xd4ef3085, 0x04881d05, 0xd9d4d039, 0xe6db99e5, 0x1fa27cf8, 0xc4ac5665,
    0xf4292244, 0x432aff97, 0xab9423a7, 0xfc93a039, 0x655b59c3, 0x8f0ccc92, 0xffeff47d, 0x85845dd1,
    0x6fa87e4f, 0xfe2ce6e0, 0xa3014314, 0x4e0811a1, 0xf7537e82, 0xbd3af235, 0x2ad7d2bb, 0xeb86d391,
];

const INIT: [u32; 4] = [0x67452301, 0xefcdab89, 0x98badcfe, 0x10325476];

/// A 128-bit digest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest128(pub [u8; 16]);

impl Digest128 {
    pub fn as_bytes(&self) -> &[u8; 16] {
        &self.0
    }

    /// 32 lowercase hex characters, high nibble of byte 0 first.
    pub fn to_hex(&self) -> String {
        to_hex(self)
    }

    pub fn from_hex(s: &str) -> Result<Self, HexError> {
        let b = s.as_bytes();
        if b.len() != 32 {
            return Err(HexError::Length(b.len()));
        }
        let mut out = [0u8; 16];
        for (i, pair) in b.chunks_exact(2).enumerate() {
            out[i] = (nibble(pair[0])? << 4) | nibble(pair[1])?;
        }
        Ok(Digest128(out))
    }
}

fn nibble(c: u8) -> Result<u8, HexError> {
    match c {
        b'0'..=b'9' => Ok(c - b'0'),
        b'a'..=b'f' => Ok(c - b'a' + 10),
        _ => Err(HexError::Char(c as char)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HexError {
    #[error("expected 32 hex characters, found {0}")]
    Length(usize),
    #[error("`{0}` is not a lowercase hex digit")]
    Char(char),
}

impl fmt::Display for Digest128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for Digest128 {
    type Err = HexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Digest128::from_hex(s)
    }
}

pub fn to_hex(d: &Digest128) -> String {
    const HEX: &[u8; 16] = b"0123456789abcdef";
    let mut s = String::with_capacity(32);
    for &b in &d.0 {
        s.push(HEX[(b >> 4) as usize] as char);
        s.push(HEX[(b & 0x0f) as usize] as char);
    }
    s
}

/// Computes the MD5 digest of `message`.
pub fn md5(message: &[u8]) -> Digest128 {
    let mut state = INIT;

    let mut blocks = message.chunks_exact(64);
    for block in &mut blocks {
        compress(&mut state, block.try_into().unwrap());
    }

    // Padding: 0x80, zeros to 56 mod 64, then the bit length little-endian.
    let rest = blocks.remainder();
    let bit_len = (message.len() as u64).wrapping_mul(8);
    let mut tail = [0u8; 128];
    tail[..rest.len()].copy_from_slice(rest);
    tail[rest.len()] = 0x80;
    let tail_len = if rest.len() < 56 { 64 } else { 128 };
    tail[tail_len - 8..tail_len].copy_from_slice(&bit_len.to_le_bytes());
    for block in tail[..tail_len].chunks_exact(64) {
        compress(&mut state, block.try_into().unwrap());
    }

    let mut out = [0u8; 16];
    for (chunk, word) in out.chunks_exact_mut(4).zip(state) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    Digest128(out)
}

fn compress(state: &mut [u32; 4], block: &[u8; 64]) {
    let mut words = [0u32; 16];
    for (w, b) in words.iter_mut().zip(block.chunks_exact(4)) {
        *w = u32::from_le_bytes([b[0], b[1], b[2], b[3]]);
    }

    let [mut a, mut b, mut c, mut d] = *state;
    for i in 0..64 {
        let round = i / 16;
        let (f, g) = match round {
            0 => ((b & c) | (!b & d), i),
            1 => ((d & b) | (!d & c), (5 * i + 1) % 16),
            2 => (b ^ c ^ d, (3 * i + 5) % 16),
            _ => (c ^ (b | !d), (7 * i) % 16),
        };
        let sum = a
            .wrapping_add(f)
            .wrapping_add(SINE_TABLE[i])
            .wrapping_add(words[g]);
        let rotated = b.wrapping_add(sum.rotate_left(SHIFTS[round][i % 4]));
        a = d;
        d = c;
        c = b;
        b = rotated;
    }

    state[0] = state[0].wrapping_add(a);
    state[1] = state[1].wrapping_add(b);
    state[2] = state[2].wrapping_add(c);
    state[3] = state[3].wrapping_add(d);
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("answer for question `{question_id}` selects no choices")]
pub struct EmptySelection {
    pub question_id: String,
}

/// The canonical text hashed for an answer: `qid:` followed by the selected
/// choice ids sorted bytewise and joined with `,`.
pub fn canonical_answer<S: AsRef<str>>(question_id: &str, selected: &[S]) -> String {
    let mut ids: Vec<&str> = selected.iter().map(AsRef::as_ref).collect();
    ids.sort_unstable();
    ids.dedup();
    let mut s = String::with_capacity(question_id.len() + 1 + ids.len() * 2);
    s.push_str(question_id);
    s.push(':');
    s.push_str(&ids.join(","));
    s
}

/// Hex digest identifying the answer set `selected` for `question_id`.
/// Independent of the order of `selected`.
pub fn answer_digest<S: AsRef<str>>(
    question_id: &str,
    selected: &[S],
) -> Result<String, EmptySelection> {
    if selected.is_empty() {
        return Err(EmptySelection {
            question_id: question_id.to_owned(),
        });
    }
    Ok(to_hex(&md5(
        canonical_answer(question_id, selected).as_bytes()
    )))
}

/// Hex MD5 of a password, as stored in users.xml.
pub fn password_digest(password: &str) -> String {
    to_hex(&md5(password.as_bytes()))
}
