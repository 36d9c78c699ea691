use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EstimatorError, QualityEstimate, QualityEstimator, MAX_DETECTION_LABEL};
use crate::imaging::{encode_png, ImageBuffer};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transport {
    /// Child process speaking the protocol on stdin/stdout.
    Stdio { program: String, args: Vec<String> },
    /// `host:port` of a local server.
    Tcp { addr: String },
}

enum Connection {
    Child {
        child: Child,
        stdin: ChildStdin,
        lines: Receiver<std::io::Result<String>>,
    },
    Tcp {
        stream: TcpStream,
        reader: BufReader<TcpStream>,
    },
}

/// Bridges to an out-of-process estimator. Each request is a big-endian
/// `u32` byte count followed by a PNG; each reply is one line, either
/// `label <int>` or `value <float>`.
///
/// A failed exchange drops the connection; the next call reconnects.
pub struct ExternalEstimator {
    transport: Transport,
    timeout: Duration,
    max_label: u32,
    conn: Option<Connection>,
}

/// Parses one reply line.
pub fn parse_response(line: &str, max_label: u32) -> Result<QualityEstimate, EstimatorError> {
    let malformed = || EstimatorError::Malformed(line.trim_end().to_string());
    let mut parts = line.split_whitespace();
    let (Some(kind), Some(arg), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(malformed());
    };
    match kind {
        "label" => {
            let label: u32 = arg.parse().map_err(|_| malformed())?;
            if label > max_label {
                return Err(malformed());
            }
            Ok(QualityEstimate::from_label(label, max_label))
        }
        "value" => {
            let v: f64 = arg.parse().map_err(|_| malformed())?;
            if !(0.0..=1.0).contains(&v) {
                return Err(malformed());
            }
            Ok(QualityEstimate::from_value(v))
        }
        _ => Err(malformed()),
    }
}

fn frame(png: &[u8]) -> Vec<u8> {
    let mut msg = Vec::with_capacity(png.len() + 4);
    msg.extend_from_slice(&(png.len() as u32).to_be_bytes());
    msg.extend_from_slice(png);
    msg
}

impl ExternalEstimator {
    pub fn new(transport: Transport, timeout: Duration) -> Self {
        Self {
            transport,
            timeout,
            max_label: MAX_DETECTION_LABEL,
            conn: None,
        }
    }

    /// Label scale for `label` replies (200 for detection, 100 for
    /// recognition).
    pub fn with_max_label(mut self, max_label: u32) -> Self {
        self.max_label = max_label.max(1);
        self
    }

    fn connect(&self) -> Result<Connection, EstimatorError> {
        match &self.transport {
            Transport::Stdio { program, args } => {
                let mut child = Command::new(program)
                    .args(args)
                    .stdin(Stdio::piped())
                    .stdout(Stdio::piped())
                    .stderr(Stdio::inherit())
                    .spawn()
                    .map_err(|e| EstimatorError::Unavailable(format!("{program}: {e}")))?;
                let stdin = child.stdin.take().expect("stdin is piped");
                let stdout = child.stdout.take().expect("stdout is piped");
                let (tx, lines) = mpsc::channel();
                thread::spawn(move || {
                    let mut reader = BufReader::new(stdout);
                    loop {
                        let mut line = String::new();
                        let res = match reader.read_line(&mut line) {
                            Ok(0) => Err(std::io::ErrorKind::UnexpectedEof.into()),
                            Ok(_) => Ok(line),
                            Err(e) => Err(e),
                        };
                        let stop = res.is_err();
                        if tx.send(res).is_err() || stop {
                            break;
                        }
                    }
                });
                Ok(Connection::Child { child, stdin, lines })
            }
            Transport::Tcp { addr } => {
                let stream = TcpStream::connect(addr).map_err(|e| EstimatorError::Unavailable(format!("{addr}: {e}")))?;
                stream.set_read_timeout(Some(self.timeout))?;
                stream.set_write_timeout(Some(self.timeout))?;
                stream.set_nodelay(true)?;
                let reader = BufReader::new(stream.try_clone()?);
                Ok(Connection::Tcp { stream, reader })
            }
        }
    }

    fn exchange(conn: &mut Connection, msg: &[u8], timeout: Duration) -> Result<String, EstimatorError> {
        match conn {
            Connection::Child { stdin, lines, .. } => {
                stdin.write_all(msg)?;
                stdin.flush()?;
                match lines.recv_timeout(timeout) {
                    Ok(line) => Ok(line?),
                    Err(RecvTimeoutError::Timeout) => Err(EstimatorError::Timeout),
                    Err(RecvTimeoutError::Disconnected) => {
                        Err(EstimatorError::Unavailable("estimator process exited".into()))
                    }
                }
            }
            Connection::Tcp { stream, reader } => {
                stream.write_all(msg)?;
                stream.flush()?;
                let mut line = String::new();
                match reader.read_line(&mut line) {
                    Ok(0) => Err(EstimatorError::Unavailable("connection closed".into())),
                    Ok(_) => Ok(line),
                    Err(e) if matches!(e.kind(), std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut) => {
                        Err(EstimatorError::Timeout)
                    }
                    Err(e) => Err(e.into()),
                }
            }
        }
    }
}

impl QualityEstimator for ExternalEstimator {
    fn name(&self) -> &str {
        "external"
    }

    fn estimate(&mut self, img: &ImageBuffer) -> Result<QualityEstimate, EstimatorError> {
        let msg = frame(&encode_png(img)?);
        if self.conn.is_none() {
            self.conn = Some(self.connect()?);
        }
        let conn = self.conn.as_mut().expect("connected above");
        let reply = Self::exchange(conn, &msg, self.timeout);
        let parsed = reply.and_then(|line| parse_response(&line, self.max_label));
        if parsed.is_err() {
            self.conn = None;
        }
        parsed
    }
}

impl Drop for Connection {
    fn drop(&mut self) {
        if let Connection::Child { child, .. } = self {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}
