//! Newline-framed protocol over TCP.

use std::sync::Arc;

use tokio::io::{AsyncBufReadExt, AsyncRead, AsyncWrite, AsyncWriteExt, BufReader};
use tokio::net::TcpListener;
use tokio::sync::mpsc;

use quizwright_core::protocol::{decode, encode, ProtocolError, WireMessage, MAX_FRAME_BYTES};

use crate::connection::{Connection, Flow};
use crate::exam::ExamServer;

/// One frame read from a byte stream.
#[derive(Debug, PartialEq, Eq)]
pub enum Frame {
    Line(Vec<u8>),
    /// A line longer than the frame cap; its bytes were discarded.
    Oversized(usize),
}

/// Reads `\n`-terminated frames without buffering more than the frame cap.
pub struct FrameReader<R> {
    inner: BufReader<R>,
}

impl<R: AsyncRead + Unpin> FrameReader<R> {
    pub fn new(inner: R) -> Self {
        FrameReader {
            inner: BufReader::new(inner),
        }
    }

    /// `Ok(None)` at end of stream. A final unterminated line is returned as
    /// a frame.
    pub async fn next_frame(&mut self) -> std::io::Result<Option<Frame>> {
        let mut line = Vec::new();
        let mut seen = 0usize;
        loop {
            let buf = self.inner.fill_buf().await?;
            if buf.is_empty() {
                return Ok(match seen {
                    0 => None,
                    n if n >= MAX_FRAME_BYTES => Some(Frame::Oversized(n)),
                    _ => Some(Frame::Line(line)),
                });
            }
            let (chunk, done) = match buf.iter().position(|&b| b == b'\n') {
                Some(i) => (&buf[..i], Some(i + 1)),
                None => (buf, None),
            };
            seen += chunk.len();
            if seen < MAX_FRAME_BYTES {
                line.extend_from_slice(chunk);
            } else {
                line = Vec::new();
            }
            let consumed = done.unwrap_or(buf.len());
            self.inner.consume(consumed);
            if done.is_some() {
                return Ok(Some(if seen >= MAX_FRAME_BYTES {
                    Frame::Oversized(seen)
                } else {
                    Frame::Line(line)
                }));
            }
        }
    }
}

fn decode_frame(frame: Frame) -> Result<WireMessage, ProtocolError> {
    match frame {
        Frame::Line(bytes) => decode(&bytes),
        Frame::Oversized(n) => Err(ProtocolError::malformed(format!(
            "frame of {n} bytes exceeds the {MAX_FRAME_BYTES}-byte limit"
        ))),
    }
}

/// Serves one client until it disconnects or the protocol closes it.
pub async fn serve_stream<S>(engine: Arc<ExamServer>, stream: S)
where
    S: AsyncRead + AsyncWrite + Send + 'static,
{
    let (reader, mut writer) = tokio::io::split(stream);
    let (tx, mut rx) = mpsc::unbounded_channel::<WireMessage>();
    let writer_task = tokio::spawn(async move {
        while let Some(msg) = rx.recv().await {
            let bytes = match encode(&msg) {
                Ok(bytes) => bytes,
                Err(e) => encode(&e.into()).expect("error messages fit in a frame"),
            };
            if writer.write_all(&bytes).await.is_err() {
                break;
            }
        }
        let _ = writer.shutdown().await;
    });

    let mut conn = Connection::new(engine, tx);
    let mut frames = FrameReader::new(reader);
    loop {
        match frames.next_frame().await {
            Ok(Some(Frame::Line(l))) if l.iter().all(u8::is_ascii_whitespace) => continue,
            Ok(Some(frame)) => {
                if conn.handle(decode_frame(frame)) == Flow::Close {
                    break;
                }
            }
            Ok(None) => break,
            Err(e) => {
                tracing::debug!(error = %e, "connection read failed");
                break;
            }
        }
    }
    // Dropping the connection releases this handler's sender. A monitor's
    // subscription holds another one, so stop waiting once our replies are out.
    drop(conn);
    let mut writer_task = writer_task;
    if tokio::time::timeout(std::time::Duration::from_millis(200), &mut writer_task)
        .await
        .is_err()
    {
        writer_task.abort();
    }
}

/// Accepts connections forever, one task per client.
pub async fn accept_loop(engine: Arc<ExamServer>, listener: TcpListener) {
    loop {
        match listener.accept().await {
            Ok((stream, peer)) => {
                tracing::debug!(%peer, "tcp client connected");
                let _ = stream.set_nodelay(true);
                tokio::spawn(serve_stream(engine.clone(), stream));
            }
            Err(e) => {
                tracing::warn!(error = %e, "accept failed");
                tokio::time::sleep(std::time::Duration::from_millis(50)).await;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    async fn frames(input: Vec<u8>) -> Vec<Frame> {
        let mut r = FrameReader::new(&input[..]);
        let mut out = Vec::new();
        while let Some(f) = r.next_frame().await.unwrap() {
            out.push(f);
        }
        out
    }

    #[tokio::test]
    async fn splits_lines() {
        let got = frames(b"a\nbc\n\nd".to_vec()).await;
        assert_eq!(
            got,
            [
                Frame::Line(b"a".to_vec()),
                Frame::Line(b"bc".to_vec()),
                Frame::Line(vec![]),
                Frame::Line(b"d".to_vec())
            ]
        );
    }

    #[tokio::test]
    async fn oversized_line_is_discarded_and_reading_continues() {
        let mut input = vec![b'x'; 70_000];
        input.extend_from_slice(b"\n{\"type\":\"ACK\"}\n");
        let got = frames(input).await;
        assert_eq!(
            got,
            [
                Frame::Oversized(70_000),
                Frame::Line(b"{\"type\":\"ACK\"}".to_vec())
            ]
        );
        let limit = vec![b'y'; MAX_FRAME_BYTES - 1];
        assert_eq!(
            frames([limit.clone(), b"\n".to_vec()].concat()).await,
            [Frame::Line(limit)]
        );
    }
}
