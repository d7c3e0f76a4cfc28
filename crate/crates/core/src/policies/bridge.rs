//! Line-delimited JSON bridge to a policy running in a child process.
//!
//! Each request is one JSON object on one line of the child's stdin and the
//! child answers with one JSON object on one line of its stdout. Both carry
//! the protocol version. Grids are flattened with `x + L * y`; the mask holds
//! the identity layer followed by the swapped layer, so the answer is the
//! flat action index used everywhere else.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Observation, Policy, PolicyDecision};
use crate::error::PolicyError;
use crate::state::{Action, FeasibilityMask, Orientation};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeRequest {
    pub version: u32,
    pub bin: [u32; 3],
    pub height_map: Vec<u32>,
    pub items: Vec<[u32; 3]>,
    pub mask: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeResponse {
    pub version: u32,
    pub action: usize,
}

impl BridgeRequest {
    pub fn new(obs: &Observation<'_>, mask: &FeasibilityMask) -> Self {
        let bin = *obs.height_map.bin();
        let mut flat = Vec::with_capacity(2 * bin.cells());
        for o in Orientation::ALL {
            flat.extend(mask.layer(o).iter().map(|&b| b as u8));
        }
        Self {
            version: PROTOCOL_VERSION,
            bin: [bin.length, bin.width, bin.height],
            height_map: obs.height_map.cells().to_vec(),
            items: obs.items.iter().map(|i| [i.l, i.w, i.h]).collect(),
            mask: flat,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("request serializes")
    }

    pub fn from_line(line: &str) -> Result<Self, PolicyError> {
        let req: Self = serde_json::from_str(line.trim_end()).map_err(|e| PolicyError::Protocol(e.to_string()))?;
        check_version(req.version)?;
        Ok(req)
    }
}

impl BridgeResponse {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("response serializes")
    }

    pub fn from_line(line: &str) -> Result<Self, PolicyError> {
        let resp: Self = serde_json::from_str(line.trim_end()).map_err(|e| PolicyError::Protocol(e.to_string()))?;
        check_version(resp.version)?;
        Ok(resp)
    }
}

fn check_version(v: u32) -> Result<(), PolicyError> {
    if v == PROTOCOL_VERSION {
        Ok(())
    } else {
        Err(PolicyError::Protocol(format!("version {v}, expected {PROTOCOL_VERSION}")))
    }
}

/// Handle to a child process answering bridge requests, one at a time.
pub struct ExternalPolicy {
    name: String,
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl ExternalPolicy {
    pub fn spawn(program: &str, args: &[String], timeout: Duration) -> Result<Self, PolicyError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| PolicyError::Spawn(format!("{program}: {e}")))?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().ok_or_else(|| PolicyError::Spawn("no stdout pipe".into()))?;
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        Ok(Self { name: format!("external:{program}"), child, stdin, lines: rx, timeout })
    }

    /// Sends one request and waits for the matching response line.
    pub fn request(&mut self, req: &BridgeRequest) -> Result<BridgeResponse, PolicyError> {
        let stdin = self.stdin.as_mut().ok_or(PolicyError::ProcessDied)?;
        let mut line = req.to_line();
        line.push('\n');
        if stdin.write_all(line.as_bytes()).and_then(|_| stdin.flush()).is_err() {
            self.stdin = None;
            return Err(PolicyError::ProcessDied);
        }
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(text)) => BridgeResponse::from_line(&text),
            Ok(Err(_)) | Err(RecvTimeoutError::Disconnected) => Err(PolicyError::ProcessDied),
            Err(RecvTimeoutError::Timeout) => {
                // a late answer would desynchronize the stream, so the handle is retired
                let _ = self.child.kill();
                self.stdin = None;
                Err(PolicyError::Timeout(self.timeout))
            }
        }
    }
}

impl Policy for ExternalPolicy {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn decide(&mut self, obs: &Observation<'_>, mask: &FeasibilityMask) -> Result<PolicyDecision, PolicyError> {
        let resp = self.request(&BridgeRequest::new(obs, mask))?;
        let bin = *mask.bin();
        if resp.action >= 2 * bin.cells() {
            return Err(PolicyError::Protocol(format!("action {} outside [0, {})", resp.action, 2 * bin.cells())));
        }
        let action = Action::from_flat_index(resp.action, &bin).map_err(|e| PolicyError::Protocol(e.to_string()))?;
        if !mask.get(&action) {
            return Err(PolicyError::MaskRejected(resp.action));
        }
        Ok(PolicyDecision { action, score_map: None })
    }

    fn is_deterministic(&self) -> bool {
        false
    }
}

impl Drop for ExternalPolicy {
    fn drop(&mut self) {
        self.stdin = None;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{compute_mask, BinConfig, HeightMap, Item};

    #[test]
    fn request_layout() {
        let bin = BinConfig::new(3, 2, 4).unwrap();
        let mut map = HeightMap::new(bin);
        map.set(2, 1, 1);
        let items = [Item::new(1, 2, 1).unwrap()];
        let mask = compute_mask(&map, &items[0], true);
        let req = BridgeRequest::new(&Observation::new(&map, &items), &mask);
        assert_eq!(req.height_map, vec![0, 0, 0, 0, 0, 1]);
        assert_eq!(req.mask.len(), 12);
        assert_eq!(req.bin, [3, 2, 4]);
        let line = req.to_line();
        assert!(line.starts_with(r#"{"version":1,"bin":[3,2,4],"height_map":[0,0,0,0,0,1]"#), "{line}");
        assert_eq!(BridgeRequest::from_line(&line).unwrap(), req);
    }

    #[test]
    fn version_mismatch_is_protocol_error() {
        assert!(matches!(BridgeResponse::from_line(r#"{"version":2,"action":0}"#), Err(PolicyError::Protocol(_))));
        assert!(matches!(BridgeResponse::from_line("not json"), Err(PolicyError::Protocol(_))));
        assert_eq!(BridgeResponse::from_line(r#"{"version":1,"action":7}"#).unwrap().action, 7);
    }
}
