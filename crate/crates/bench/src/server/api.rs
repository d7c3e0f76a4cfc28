//! Route handlers and request/response bodies.

use std::str::FromStr;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use pack3d_core::datagen::{Origin, SequenceSpec};
use pack3d_core::policies::Observation;
use pack3d_core::rng::derive_seed;
use pack3d_core::runner::decide;
use pack3d_core::state::{Action, EpisodeConfig, EpisodeState, Item, PackedItem};
use pack3d_core::{value_to_f64, Value};
use serde::{Deserialize, Serialize};

use super::store::{CommitError, Created, Game, GameSource};
use super::AppState;
use crate::solver::{build_policy, episode_seed, play};

type Shared = Arc<AppState>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/v1/games", post(create_game))
        .route("/v1/games/{id}", get(get_game))
        .route("/v1/games/{id}/preview", post(preview))
        .route("/v1/games/{id}/commit", post(commit))
        .route("/v1/games/{id}/suggest", get(suggest))
        .route("/v1/games/{id}/ai-replay", get(ai_replay))
        .route("/v1/games/{id}/reset", post(reset))
        .with_state(state)
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("no game with id `{0}`")]
    UnknownGame(String),
    #[error("malformed request: {0}")]
    BadRequest(String),
    #[error("{0}")]
    Rejected(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self {
            ApiError::UnknownGame(_) => StatusCode::NOT_FOUND,
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Rejected(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(serde_json::json!({ "error": self.to_string() }))).into_response()
    }
}

impl From<anyhow::Error> for ApiError {
    fn from(e: anyhow::Error) -> Self {
        ApiError::Internal(format!("{e:#}"))
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload.map(|Json(t)| t).map_err(|e| ApiError::BadRequest(e.body_text()))
}

fn lookup(app: &AppState, id: &str) -> Result<Arc<Mutex<Game>>, ApiError> {
    id.parse::<u64>()
        .ok()
        .and_then(|n| app.store.get(n))
        .ok_or_else(|| ApiError::UnknownGame(id.to_string()))
}

fn lock(game: &Mutex<Game>) -> MutexGuard<'_, Game> {
    game.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

#[derive(Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum CreateRequest {
    Dataset { dataset_index: usize },
    Generated { seed: u64, origin: Option<String>, index: Option<usize> },
}

#[derive(Debug, Deserialize)]
pub struct ActionRequest {
    /// Flat action index: `x + L * y`, plus `L * W` for the swapped orientation.
    pub action: usize,
}

/// Everything a client needs to draw the game.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct GameView {
    pub id: u64,
    pub source: GameSource,
    pub bin: [u32; 3],
    pub rotation: bool,
    pub height_map: Vec<u32>,
    pub packed: Vec<PackedItem>,
    pub current_item: Option<Item>,
    /// Visible items after the current one.
    pub upcoming: Vec<Item>,
    pub step: usize,
    pub total_items: usize,
    /// One entry per flat action index, 1 where the placement is feasible.
    pub mask: Vec<u8>,
    /// The solver policy's score for each feasible action, when it reports scores.
    pub scores: Option<Vec<Option<f64>>>,
    pub utilization: Value,
    pub utilization_f64: f64,
    pub done: bool,
}

fn view(app: &AppState, game: &Game) -> Result<GameView, ApiError> {
    let state = &game.state;
    let bin = *state.bin();
    let mask = state.mask().filter(|_| !state.is_done());
    let flat: Vec<u8> = match &mask {
        Some(m) => (0..2 * bin.cells()).map(|i| m.get_flat(i) as u8).collect(),
        None => vec![0; 2 * bin.cells()],
    };
    let scores = match &mask {
        Some(m) => {
            let mut policy = build_policy(&app.solver.policy, &app.item_set, ai_seed(app, game))?;
            let obs = Observation::new(state.height_map(), state.buffer());
            let decision = policy.decide(&obs, m).map_err(|e| ApiError::Internal(e.to_string()))?;
            decision.score_map.map(|s| s.iter().map(|v| v.as_ref().map(value_to_f64)).collect())
        }
        None => None,
    };
    let buffer = state.buffer();
    Ok(GameView {
        id: game.id,
        source: game.created.source.clone(),
        bin: [bin.length, bin.width, bin.height],
        rotation: state.config().rotation,
        height_map: state.height_map().cells().to_vec(),
        packed: state.packed().to_vec(),
        current_item: buffer.first().copied(),
        upcoming: buffer.iter().skip(1).copied().collect(),
        step: state.cursor(),
        total_items: state.arrivals().len(),
        mask: flat,
        scores,
        utilization: state.utilization(),
        utilization_f64: value_to_f64(&state.utilization()),
        done: state.is_done(),
    })
}

fn ai_seed(app: &AppState, game: &Game) -> u64 {
    episode_seed(&app.solver, game.created.source.index())
}

fn parse_action(state: &EpisodeState, index: usize) -> Result<Action, ApiError> {
    Action::from_flat_index(index, state.bin()).map_err(|e| ApiError::BadRequest(e.to_string()))
}

async fn create_game(State(app): State<Shared>, payload: Result<Json<CreateRequest>, JsonRejection>) -> ApiResult<GameView> {
    let request = body(payload)?;
    let (source, items) = match request {
        CreateRequest::Dataset { dataset_index } => {
            let sequences = app
                .dataset
                .as_ref()
                .ok_or_else(|| ApiError::BadRequest("the service was started without a dataset".into()))?;
            let seq = sequences.get(dataset_index).ok_or_else(|| {
                ApiError::BadRequest(format!("dataset index {dataset_index} outside [0, {})", sequences.len()))
            })?;
            (GameSource::Dataset { index: dataset_index }, seq.items.clone())
        }
        CreateRequest::Generated { seed, origin, index } => {
            let origin = match origin {
                Some(o) => Origin::from_str(&o).map_err(ApiError::BadRequest)?,
                None => Origin::CUT2,
            };
            let index = index.unwrap_or(0);
            let spec = SequenceSpec::standard(origin, app.bin);
            let seq = spec
                .generate(derive_seed(seed, index as u64))
                .map_err(|e| ApiError::Internal(e.to_string()))?;
            (GameSource::Generated { origin: origin.to_string(), seed, index }, seq.items)
        }
    };
    let config = EpisodeConfig::new(app.bin)
        .with_lookahead(app.solver.lookahead)
        .with_rotation(app.solver.rotation);
    let (_, game) = app.store.create(Created { source, config, items })?;
    let game = lock(&game);
    Ok(Json(view(&app, &game)?))
}

async fn get_game(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<GameView> {
    let game = lookup(&app, &id)?;
    let game = lock(&game);
    Ok(Json(view(&app, &game)?))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct PreviewResponse {
    pub action: Action,
    /// Resting height of the item's bottom face.
    pub z: u32,
    pub height_map: Vec<u32>,
}

async fn preview(
    State(app): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<ActionRequest>, JsonRejection>,
) -> ApiResult<PreviewResponse> {
    let game = lookup(&app, &id)?;
    let request = body(payload)?;
    let game = lock(&game);
    let state = &game.state;
    let action = parse_action(state, request.action)?;
    if state.is_done() || !state.mask().is_some_and(|m| m.get(&action)) {
        return Err(ApiError::Rejected(format!("action {} is not feasible", request.action)));
    }
    let item = *state.current_item().expect("a live game has a current item");
    let mut map = state.height_map().clone();
    let z = map
        .apply(&item, action.orientation, action.x, action.y)
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(Json(PreviewResponse { action, z, height_map: map.cells().to_vec() }))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct CommitResponse {
    pub reward: Value,
    pub done: bool,
    pub game: GameView,
}

async fn commit(
    State(app): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<ActionRequest>, JsonRejection>,
) -> ApiResult<CommitResponse> {
    let game = lookup(&app, &id)?;
    let request = body(payload)?;
    let mut game = lock(&game);
    let action = parse_action(&game.state, request.action)?;
    let outcome = game.commit(action, app.solver.reward_mode).map_err(|e| match e {
        CommitError::Rejected(msg) => ApiError::Rejected(msg),
        CommitError::Store(e) => e.into(),
    })?;
    Ok(Json(CommitResponse { reward: outcome.reward, done: outcome.done, game: view(&app, &game)? }))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SuggestResponse {
    pub action: usize,
    pub placement: Action,
}

async fn suggest(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<SuggestResponse> {
    let game = lookup(&app, &id)?;
    let (state, seed) = {
        let game = lock(&game);
        (game.state.clone(), ai_seed(&app, &game))
    };
    if state.is_done() {
        return Err(ApiError::Rejected("the game is over".into()));
    }
    let bin = *state.bin();
    let app2 = app.clone();
    let action = tokio::task::spawn_blocking(move || -> Result<Action, ApiError> {
        let mut policy = build_policy(&app2.solver.policy, &app2.item_set, seed)?;
        let (action, _, _) = decide(&state, &mut policy, &app2.solver.estimator, &app2.solver.search, seed)
            .map_err(|e| ApiError::Internal(e.to_string()))?;
        Ok(action)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(SuggestResponse { action: action.flat_index(&bin), placement: action }))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ReplayResponse {
    pub solver: String,
    pub items_packed: usize,
    pub utilization: Value,
    pub utilization_f64: f64,
}

async fn ai_replay(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<ReplayResponse> {
    let game = lookup(&app, &id)?;
    let (items, seed) = {
        let game = lock(&game);
        (game.created.items.clone(), ai_seed(&app, &game))
    };
    let app2 = app.clone();
    let out = tokio::task::spawn_blocking(move || -> Result<_, ApiError> {
        let mut policy = build_policy(&app2.solver.policy, &app2.item_set, seed)?;
        Ok(play(&app2.solver, &app2.bin, &items, policy.as_mut(), seed)?)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(ReplayResponse {
        solver: app.solver.label(),
        items_packed: out.items_packed,
        utilization: out.utilization,
        utilization_f64: value_to_f64(&out.utilization),
    }))
}

async fn reset(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<GameView> {
    let game = lookup(&app, &id)?;
    let mut game = lock(&game);
    game.reset()?;
    Ok(Json(view(&app, &game)?))
}
