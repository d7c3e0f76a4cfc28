//! HTTP game service under `/v1/`: humans place items one at a time while the
//! configured solver suggests moves and replays the same sequence.

mod api;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use pack3d_core::datagen::{ItemSequence, ItemSet, Origin, SequenceSpec};
use pack3d_core::state::BinConfig;
use serde::{Deserialize, Serialize};

pub use api::router;
pub use store::{GameSource, GameStore};

use crate::config::{DatasetSource, SolverSpec};
use crate::dataset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ServeConfig {
    pub bin: BinConfig,
    /// Sequences offered by index; games can also be generated from a seed.
    pub dataset: Option<DatasetSource>,
    pub solver: SolverSpec,
    /// Directory of game logs; games live in memory only when unset.
    pub store: Option<PathBuf>,
    pub addr: SocketAddr,
}

/// Everything the handlers share. Only the game registry is mutable.
pub struct AppState {
    pub bin: BinConfig,
    pub solver: SolverSpec,
    pub dataset: Option<Vec<ItemSequence>>,
    /// Item set the heuristic rates spare space against.
    pub item_set: ItemSet,
    pub store: GameStore,
}

impl AppState {
    pub fn new(config: &ServeConfig) -> Result<Self> {
        config.solver.check()?;
        if config.solver.bins != 1 {
            bail!("the game service plays a single bin");
        }
        let (dataset, item_set) = match &config.dataset {
            Some(source) => {
                let loaded = dataset::load(&config.bin, source)?;
                (Some(loaded.sequences), loaded.item_set)
            }
            None => (None, SequenceSpec::standard(Origin::CUT2, config.bin).item_set()?),
        };
        let store = match &config.store {
            Some(dir) => GameStore::open(dir)?,
            None => GameStore::in_memory(),
        };
        Ok(Self { bin: config.bin, solver: config.solver.clone(), dataset, item_set, store })
    }
}

/// Binds and serves until the process is stopped.
pub async fn serve(config: ServeConfig) -> Result<()> {
    let state = Arc::new(AppState::new(&config)?);
    let listener = tokio::net::TcpListener::bind(config.addr)
        .await
        .with_context(|| format!("binding {}", config.addr))?;
    eprintln!("serving /v1/ on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await.context("server stopped")
}
