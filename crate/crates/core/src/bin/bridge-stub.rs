//! Minimal bridge peer used by the integration tests.
//!
//! Modes (first argument): `first` answers the first mask-true index, `bad`
//! answers the first mask-false index, `sleep` never answers, `die` exits on
//! the first request, `garbage` answers with a malformed line, `old` answers
//! with a wrong protocol version.

use std::io::{BufRead, Write};

use pack3d_core::policies::bridge::{BridgeRequest, BridgeResponse, PROTOCOL_VERSION};

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_else(|| "first".into());
    let stdin = std::io::stdin();
    let mut out = std::io::stdout();
    for line in stdin.lock().lines() {
        let Ok(line) = line else { return };
        let Ok(req) = BridgeRequest::from_line(&line) else { return };
        let reply = match mode.as_str() {
            "first" => pick(&req, 1),
            "bad" => pick(&req, 0),
            "sleep" => {
                std::thread::sleep(std::time::Duration::from_secs(3600));
                return;
            }
            "die" => return,
            "garbage" => "{\"version\":".to_string(),
            "old" => BridgeResponse { version: PROTOCOL_VERSION + 1, action: 0 }.to_line(),
            other => {
                eprintln!("unknown mode {other}");
                std::process::exit(2);
            }
        };
        if writeln!(out, "{reply}").and_then(|_| out.flush()).is_err() {
            return;
        }
    }
}

fn pick(req: &BridgeRequest, want: u8) -> String {
    let action = req.mask.iter().position(|&m| m == want).unwrap_or(0);
    BridgeResponse { version: PROTOCOL_VERSION, action }.to_line()
}
