//! Games persisted as append-only event logs, one file per game.
//!
//! A log starts with a `create` event holding the whole item sequence,
//! followed by `commit` and `reset` events. Loading a game replays its log.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use anyhow::{bail, Context, Result};
use pack3d_core::state::{Action, EpisodeConfig, EpisodeState, Item, RewardMode, StepOutcome};
use serde::{Deserialize, Serialize};

/// Where a game's sequence came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GameSource {
    Generated { origin: String, seed: u64, index: usize },
    Dataset { index: usize },
}

impl GameSource {
    /// Episode index a CLI run would give this sequence.
    pub fn index(&self) -> usize {
        match self {
            GameSource::Generated { index, .. } | GameSource::Dataset { index } => *index,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Created {
    pub source: GameSource,
    pub config: EpisodeConfig,
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "event")]
enum Event {
    Create(Created),
    Commit { action: Action },
    Reset,
}

pub struct Game {
    pub id: u64,
    pub created: Created,
    pub state: EpisodeState,
    log: Option<File>,
}

impl Game {
    fn fresh_state(created: &Created) -> EpisodeState {
        EpisodeState::new(created.config, created.items.clone())
    }

    fn append(&mut self, event: &Event) -> Result<()> {
        if let Some(log) = &mut self.log {
            let mut line = serde_json::to_string(event).expect("events serialize");
            line.push('\n');
            log.write_all(line.as_bytes()).context("appending to game log")?;
            log.flush().context("flushing game log")?;
        }
        Ok(())
    }

    /// Steps the episode. Rejected actions leave the game and its log untouched.
    pub fn commit(&mut self, action: Action, mode: RewardMode) -> Result<StepOutcome, CommitError> {
        let outcome = self.state.step(action, mode).map_err(|e| CommitError::Rejected(e.to_string()))?;
        self.append(&Event::Commit { action }).map_err(CommitError::Store)?;
        self.state = outcome.state.clone();
        Ok(outcome)
    }

    /// Restarts the same sequence from an empty bin.
    pub fn reset(&mut self) -> Result<()> {
        self.append(&Event::Reset)?;
        self.state = Self::fresh_state(&self.created);
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CommitError {
    #[error("placement rejected: {0}")]
    Rejected(String),
    #[error(transparent)]
    Store(anyhow::Error),
}

/// Registry of live games. Each game sits behind its own lock.
pub struct GameStore {
    dir: Option<PathBuf>,
    games: RwLock<HashMap<u64, Arc<Mutex<Game>>>>,
    next_id: AtomicU64,
}

impl GameStore {
    pub fn in_memory() -> Self {
        Self { dir: None, games: RwLock::new(HashMap::new()), next_id: AtomicU64::new(1) }
    }

    /// Opens a store directory, replaying every game log found in it.
    pub fn open(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut games = HashMap::new();
        let mut max_id = 0;
        for entry in std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
            let path = entry?.path();
            let Some(id) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(".events.jsonl"))
                .and_then(|n| n.parse::<u64>().ok())
            else {
                continue;
            };
            let game = replay(id, &path).with_context(|| format!("replaying {}", path.display()))?;
            max_id = max_id.max(id);
            games.insert(id, Arc::new(Mutex::new(game)));
        }
        Ok(Self { dir: Some(dir.to_path_buf()), games: RwLock::new(games), next_id: AtomicU64::new(max_id + 1) })
    }

    fn log_path(&self, id: u64) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{id}.events.jsonl")))
    }

    pub fn create(&self, created: Created) -> Result<(u64, Arc<Mutex<Game>>)> {
        let id = self.next_id.fetch_add(1, Ordering::SeqCst);
        let log = match self.log_path(id) {
            Some(path) => Some(
                OpenOptions::new()
                    .create_new(true)
                    .append(true)
                    .open(&path)
                    .with_context(|| format!("creating {}", path.display()))?,
            ),
            None => None,
        };
        let mut game = Game { id, state: Game::fresh_state(&created), created: created.clone(), log };
        game.append(&Event::Create(created))?;
        let game = Arc::new(Mutex::new(game));
        self.games.write().expect("game registry lock").insert(id, game.clone());
        Ok((id, game))
    }

    pub fn get(&self, id: u64) -> Option<Arc<Mutex<Game>>> {
        self.games.read().expect("game registry lock").get(&id).cloned()
    }

    pub fn len(&self) -> usize {
        self.games.read().expect("game registry lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn replay(id: u64, path: &Path) -> Result<Game> {
    let reader = BufReader::new(File::open(path)?);
    let mut game: Option<Game> = None;
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event: Event = serde_json::from_str(&line).with_context(|| format!("event {}", n + 1))?;
        match (event, game.as_mut()) {
            (Event::Create(created), None) => {
                game = Some(Game { id, state: Game::fresh_state(&created), created, log: None });
            }
            (Event::Commit { action }, Some(g)) => {
                g.state = g
                    .state
                    .step(action, RewardMode::StepWise)
                    .with_context(|| format!("event {}: logged commit no longer applies", n + 1))?
                    .state;
            }
            (Event::Reset, Some(g)) => g.state = Game::fresh_state(&g.created),
            _ => bail!("event {}: log must start with exactly one create event", n + 1),
        }
    }
    let mut game = game.context("empty game log")?;
    game.log = Some(OpenOptions::new().append(true).open(path)?);
    Ok(game)
}
