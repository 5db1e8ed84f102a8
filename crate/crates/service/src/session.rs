//! Game sessions played against a solved database.

use std::sync::Arc;

use abalone_core::rules::{apply_move, find_move, is_terminal, legal_moves, Move, MoveKind};
use abalone_core::solver::{GameValue, OutcomeClass};
use abalone_core::{Color, Constellation, SolvedDatabase};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;

pub const DEFAULT_PLY_CAP: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    InProgress,
    BlackWins,
    GrayWins,
    DrawByCap,
}

impl Status {
    fn won_by(color: Color) -> Status {
        match color {
            Color::Black => Status::BlackWins,
            Color::Gray => Status::GrayWins,
        }
    }
}

/// One played move, stored as text so sessions can be snapshotted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayedMove {
    pub mover: String,
    #[serde(rename = "move")]
    pub text: String,
    pub description: String,
    pub by_engine: bool,
    pub board: String,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub db: Arc<SolvedDatabase>,
    pub human: Color,
    pub start: Constellation,
    pub first_to_move: Color,
    pub current: Constellation,
    pub to_move: Color,
    pub history: Vec<PlayedMove>,
    pub ply_cap: u32,
}

/// A legal move annotated with the value of its result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveView {
    #[serde(rename = "move")]
    pub text: String,
    pub cells: Vec<String>,
    pub direction: String,
    pub kind: String,
    pub pushed: u8,
    pub ejects: bool,
    pub description: String,
    pub result: String,
    /// `BlackWin`, `GrayWin` or `Draw`, with the opponent to move.
    pub value: String,
    pub distance: Option<u16>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovesView {
    pub id: String,
    pub to_move: String,
    pub moves: Vec<MoveView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueView {
    pub outcome: String,
    pub distance: Option<u16>,
}

impl From<GameValue> for ValueView {
    fn from(v: GameValue) -> Self {
        Self {
            outcome: v.outcome.name().to_string(),
            distance: v.distance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub shape: String,
    pub k: u8,
    pub board: String,
    pub cells: String,
    pub to_move: String,
    pub human: String,
    pub status: Status,
    pub winner: Option<String>,
    pub outcome_class: String,
    pub value: ValueView,
    pub black_lost: u8,
    pub gray_lost: u8,
    pub ply: u32,
    pub ply_cap: u32,
    pub history: Vec<PlayedMove>,
}

/// Serializable form of a session for snapshots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: String,
    pub shape: String,
    pub k: u8,
    pub human: String,
    pub start: String,
    pub first_to_move: String,
    pub ply_cap: u32,
    pub moves: Vec<String>,
}

impl Session {
    pub fn new(
        id: String,
        db: Arc<SolvedDatabase>,
        human: Color,
        start: Constellation,
        first_to_move: Color,
        ply_cap: u32,
    ) -> Session {
        let start = db.config().normalize(start);
        Session {
            id,
            db,
            human,
            start,
            first_to_move,
            current: start,
            to_move: first_to_move,
            history: Vec::new(),
            ply_cap,
        }
    }

    pub fn ply(&self) -> u32 {
        self.history.len() as u32
    }

    fn moves(&self) -> Vec<Move> {
        legal_moves(&self.current, self.to_move, self.db.config())
    }

    pub fn status(&self) -> Status {
        let config = self.db.config();
        if let Some(winner) = is_terminal(&self.current, config) {
            return Status::won_by(winner);
        }
        if self.moves().is_empty() {
            return Status::won_by(self.to_move.other());
        }
        if self.ply() >= self.ply_cap {
            return Status::DrawByCap;
        }
        Status::InProgress
    }

    fn ensure_playable(&self) -> Result<(), ApiError> {
        match self.status() {
            Status::InProgress => Ok(()),
            other => Err(ApiError::Conflict(format!("the game is over ({other:?})"))),
        }
    }

    pub fn view(&self) -> Result<SessionView, ApiError> {
        let config = self.db.config();
        let board = config.board();
        let status = self.status();
        let value = self.db.value(&self.current, self.to_move)?;
        let class = self.db.outcome_class(&self.current)?;
        let winner = match status {
            Status::BlackWins => Some("black".to_string()),
            Status::GrayWins => Some("gray".to_string()),
            _ => None,
        };
        Ok(SessionView {
            id: self.id.clone(),
            shape: config.shape().to_string(),
            k: config.k(),
            board: self.current.notation(board),
            cells: self.current.cells_string(board),
            to_move: self.to_move.name().to_string(),
            human: self.human.name().to_string(),
            status,
            winner,
            outcome_class: class_name(class),
            value: value.into(),
            black_lost: self.current.lost(Color::Black),
            gray_lost: self.current.lost(Color::Gray),
            ply: self.ply(),
            ply_cap: self.ply_cap,
            history: self.history.clone(),
        })
    }

    /// Every legal move with the value of the resulting position. Empty once
    /// the game is over.
    pub fn annotated_moves(&self) -> Result<MovesView, ApiError> {
        let board = self.db.config().board();
        let mut moves = Vec::new();
        if self.status() == Status::InProgress {
            for mv in self.moves() {
                let next = apply_move(board, &self.current, &mv);
                let value = self.db.value(&next, self.to_move.other())?;
                moves.push(MoveView {
                    text: mv.text(board),
                    cells: mv.cells().iter().map(|&c| board.label(c)).collect(),
                    direction: mv.direction.name().to_string(),
                    kind: match mv.kind {
                        MoveKind::InLine => "inline".into(),
                        MoveKind::Broadside => "broadside".into(),
                    },
                    pushed: mv.pushed,
                    ejects: mv.ejects,
                    description: mv.describe(board),
                    result: next.notation(board),
                    value: value.outcome.name().to_string(),
                    distance: value.distance,
                });
            }
        }
        Ok(MovesView {
            id: self.id.clone(),
            to_move: self.to_move.name().to_string(),
            moves,
        })
    }

    fn play(&mut self, mv: &Move, by_engine: bool) {
        let board = self.db.config().board();
        self.current = apply_move(board, &self.current, mv);
        self.history.push(PlayedMove {
            mover: self.to_move.name().to_string(),
            text: mv.text(board),
            description: mv.describe(board),
            by_engine,
            board: self.current.notation(board),
        });
        self.to_move = self.to_move.other();
    }

    /// Applies a human move given as text such as `"e,f:down"`.
    pub fn human_move(&mut self, text: &str) -> Result<(), ApiError> {
        self.ensure_playable()?;
        if self.to_move != self.human {
            return Err(ApiError::Conflict(format!(
                "it is {}'s turn, not the human player's",
                self.to_move.name()
            )));
        }
        let mv = find_move(self.db.config(), &self.current, self.to_move, text)
            .map_err(|e| ApiError::Conflict(e.to_string()))?;
        self.play(&mv, false);
        Ok(())
    }

    /// Plays the top-ranked move for the side to move, which must be the
    /// engine's side.
    pub fn engine_move(&mut self) -> Result<(), ApiError> {
        self.ensure_playable()?;
        if self.to_move == self.human {
            return Err(ApiError::Conflict(
                "it is the human player's turn".to_string(),
            ));
        }
        let ranked = self.db.best_moves(&self.current, self.to_move)?;
        let best = ranked
            .first()
            .ok_or_else(|| ApiError::Conflict("no legal move".into()))?;
        let mv = best.mv;
        self.play(&mv, true);
        Ok(())
    }

    pub fn record(&self) -> SessionRecord {
        let config = self.db.config();
        SessionRecord {
            id: self.id.clone(),
            shape: config.shape().to_string(),
            k: config.k(),
            human: self.human.name().to_string(),
            start: self.start.notation(config.board()),
            first_to_move: self.first_to_move.name().to_string(),
            ply_cap: self.ply_cap,
            moves: self.history.iter().map(|m| m.text.clone()).collect(),
        }
    }

    /// Rebuilds a session by replaying a snapshot record.
    pub fn replay(record: &SessionRecord, db: Arc<SolvedDatabase>) -> Result<Session, ApiError> {
        let bad = |what: &str| ApiError::BadRequest(format!("snapshot {}: {what}", record.id));
        let human = record.human.parse().map_err(|_| bad("human colour"))?;
        let first = record
            .first_to_move
            .parse()
            .map_err(|_| bad("first mover"))?;
        let start = db
            .config()
            .parse(&record.start)
            .map_err(|e| bad(&e.to_string()))?;
        let mut session = Session::new(record.id.clone(), db, human, start, first, record.ply_cap);
        for (i, text) in record.moves.iter().enumerate() {
            let by_engine = session.to_move != session.human;
            let mv = find_move(session.db.config(), &session.current, session.to_move, text)
                .map_err(|e| bad(&format!("move {}: {e}", i + 1)))?;
            session.play(&mv, by_engine);
        }
        Ok(session)
    }
}

/// Outcome class label for JSON (`N^` and `Nv` spelled out).
pub fn class_name(class: OutcomeClass) -> String {
    match class {
        OutcomeClass::NHat => "N-hat".into(),
        OutcomeClass::NCheck => "N-check".into(),
        other => other.name().into(),
    }
}
