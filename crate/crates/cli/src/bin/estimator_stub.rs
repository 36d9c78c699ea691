//! Minimal out-of-process quality estimator for exercising the external
//! estimator bridge.
//!
//! Reads length-prefixed PNG frames on stdin and answers each with one
//! line on stdout: `value <mean luma / 255>` by default, or a fixed reply
//! given as the arguments (`camtune-estimator-stub label 120`).

use std::io::{self, BufWriter, Read, Write};
use std::process::ExitCode;

use camtune::imaging::decode_png;
use camtune::metrics::extract_features;

fn main() -> ExitCode {
    let fixed: Option<String> = {
        let args: Vec<String> = std::env::args().skip(1).collect();
        (!args.is_empty()).then(|| args.join(" "))
    };
    let mut stdin = io::stdin().lock();
    let mut stdout = BufWriter::new(io::stdout().lock());
    loop {
        let mut len = [0u8; 4];
        match stdin.read_exact(&mut len) {
            Ok(()) => {}
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("read failed: {e}");
                return ExitCode::from(3);
            }
        }
        let mut png = vec![0u8; u32::from_be_bytes(len) as usize];
        if let Err(e) = stdin.read_exact(&mut png) {
            eprintln!("read failed: {e}");
            return ExitCode::from(3);
        }
        let reply = match &fixed {
            Some(r) => r.clone(),
            None => match decode_png(&png) {
                Ok(img) => format!("value {}", extract_features(&img).brightness / 255.0),
                Err(e) => {
                    eprintln!("bad frame: {e}");
                    "error".to_string()
                }
            },
        };
        if writeln!(stdout, "{reply}").and_then(|_| stdout.flush()).is_err() {
            return ExitCode::SUCCESS;
        }
    }
}
