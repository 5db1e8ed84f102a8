//! Retrograde win/loss/draw analysis over the full state graph of a game
//! configuration.
//!
//! Every state is a (constellation, side to move) pair. A state is won for
//! the mover when some successor is lost for the opponent, lost when every
//! successor is won for the opponent (or the mover has no move at all), and
//! drawn otherwise: the graph has cycles, and a state that the fixpoint
//! never labels admits infinite play.
//!
//! Labels are computed in layers of increasing distance (plies to the end of
//! the game under optimal play: the winner hurries, the loser stalls):
//!
//! 1. A forward pass counts each state's distinct successors and labels
//!    stalemates (loss in 0) and states with a game-ending push (win in 1).
//! 2. Each layer walks the predecessors of its states. A predecessor of a
//!    lost state is won at the next distance; a predecessor of a won state
//!    has its counter decremented, and is lost once the counter reaches 0.
//!
//! Positions in which a side has already lost `K` marbles are not stored;
//! moves into them are handled as immediate wins.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU16, AtomicU64, AtomicU8, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::canonical::{canonicalize, match_pattern, Pattern};
use crate::rules::{
    apply_move, for_each_move, for_each_unmove, is_terminal, legal_moves, Color, Constellation,
    GameConfig, Move,
};
use crate::store::{
    get_code, packed_len, set_code, StateIndex, StateSpace, StoreError, CODE_BLACK, CODE_DRAW,
    CODE_GRAY,
};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("state space of {0} states exceeds the 32-bit frontier index")]
    TooLarge(u64),
    #[error("a state has {0} distinct successors, more than the 255 the counters hold")]
    DegreeOverflow(usize),
    #[error("distance {0} exceeds the 15-bit label range")]
    DistanceOverflow(u32),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

/// Who wins under perfect play, if anyone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    BlackWin,
    GrayWin,
    Draw,
}

impl Outcome {
    pub fn win_for(color: Color) -> Outcome {
        match color {
            Color::Black => Outcome::BlackWin,
            Color::Gray => Outcome::GrayWin,
        }
    }

    pub fn winner(self) -> Option<Color> {
        match self {
            Outcome::BlackWin => Some(Color::Black),
            Outcome::GrayWin => Some(Color::Gray),
            Outcome::Draw => None,
        }
    }

    /// The same result with the colours exchanged.
    pub fn color_swapped(self) -> Outcome {
        match self {
            Outcome::BlackWin => Outcome::GrayWin,
            Outcome::GrayWin => Outcome::BlackWin,
            Outcome::Draw => Outcome::Draw,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Outcome::BlackWin => "BlackWin",
            Outcome::GrayWin => "GrayWin",
            Outcome::Draw => "Draw",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// Perfect-play value of one state. Wins carry the number of plies until the
/// game ends; draws carry none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameValue {
    pub outcome: Outcome,
    pub distance: Option<u16>,
}

impl GameValue {
    pub const DRAW: GameValue = GameValue {
        outcome: Outcome::Draw,
        distance: None,
    };

    pub fn win(color: Color, distance: u16) -> GameValue {
        GameValue {
            outcome: Outcome::win_for(color),
            distance: Some(distance),
        }
    }

    pub fn color_swapped(self) -> GameValue {
        GameValue {
            outcome: self.outcome.color_swapped(),
            distance: self.distance,
        }
    }
}

impl fmt::Display for GameValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.distance {
            Some(d) => write!(f, "{} in {d}", self.outcome),
            None => write!(f, "{}", self.outcome),
        }
    }
}

/// Outcome class of a constellation: the pair (value with Black to move,
/// value with Gray to move).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutcomeClass {
    /// Black wins whoever moves.
    L,
    /// Gray wins whoever moves.
    R,
    /// Drawn whoever moves.
    D,
    /// The player to move wins.
    N,
    /// Black wins moving first; drawn if Gray moves.
    NHat,
    /// Gray wins moving first; drawn if Black moves.
    NCheck,
    /// The player who just moved wins.
    XPrevWin,
    /// Gray wins with Black to move; drawn with Gray to move.
    XGD,
    /// Drawn with Black to move; Black wins with Gray to move.
    XDB,
}

impl OutcomeClass {
    pub const ALL: [OutcomeClass; 9] = [
        OutcomeClass::L,
        OutcomeClass::R,
        OutcomeClass::D,
        OutcomeClass::N,
        OutcomeClass::NHat,
        OutcomeClass::NCheck,
        OutcomeClass::XPrevWin,
        OutcomeClass::XGD,
        OutcomeClass::XDB,
    ];

    pub fn from_pair(black_to_move: Outcome, gray_to_move: Outcome) -> OutcomeClass {
        use Outcome::*;
        match (black_to_move, gray_to_move) {
            (BlackWin, BlackWin) => OutcomeClass::L,
            (GrayWin, GrayWin) => OutcomeClass::R,
            (Draw, Draw) => OutcomeClass::D,
            (BlackWin, GrayWin) => OutcomeClass::N,
            (BlackWin, Draw) => OutcomeClass::NHat,
            (Draw, GrayWin) => OutcomeClass::NCheck,
            (GrayWin, BlackWin) => OutcomeClass::XPrevWin,
            (GrayWin, Draw) => OutcomeClass::XGD,
            (Draw, BlackWin) => OutcomeClass::XDB,
        }
    }

    /// Inverse of [`from_pair`](Self::from_pair).
    pub fn pair(self) -> (Outcome, Outcome) {
        use Outcome::*;
        match self {
            OutcomeClass::L => (BlackWin, BlackWin),
            OutcomeClass::R => (GrayWin, GrayWin),
            OutcomeClass::D => (Draw, Draw),
            OutcomeClass::N => (BlackWin, GrayWin),
            OutcomeClass::NHat => (BlackWin, Draw),
            OutcomeClass::NCheck => (Draw, GrayWin),
            OutcomeClass::XPrevWin => (GrayWin, BlackWin),
            OutcomeClass::XGD => (GrayWin, Draw),
            OutcomeClass::XDB => (Draw, BlackWin),
        }
    }

    /// One of the six classes named in the usual outcome-class notation.
    pub fn is_named(self) -> bool {
        !matches!(
            self,
            OutcomeClass::XPrevWin | OutcomeClass::XGD | OutcomeClass::XDB
        )
    }

    /// Class of the colour-swapped constellation.
    pub fn negated(self) -> OutcomeClass {
        let (b, g) = self.pair();
        OutcomeClass::from_pair(g.color_swapped(), b.color_swapped())
    }

    pub fn name(self) -> &'static str {
        match self {
            OutcomeClass::L => "L",
            OutcomeClass::R => "R",
            OutcomeClass::D => "D",
            OutcomeClass::N => "N",
            OutcomeClass::NHat => "N^",
            OutcomeClass::NCheck => "Nv",
            OutcomeClass::XPrevWin => "X-PrevWin",
            OutcomeClass::XGD => "X-GD",
            OutcomeClass::XDB => "X-DB",
        }
    }
}

impl fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for OutcomeClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OutcomeClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown outcome class {s:?}"))
    }
}

/// Knobs for [`solve`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Worker threads; 0 means one per available core.
    pub workers: usize,
    /// Keep the per-state distance array in the finished database.
    pub keep_distances: bool,
    /// Called after each layer with (distance, states labelled in it).
    pub progress: Option<fn(u32, u64)>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            workers: 0,
            keep_distances: true,
            progress: None,
        }
    }
}

impl SolveOptions {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers,
            ..Self::default()
        }
    }
}

/// Perfect-play values for every state of one configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolvedDatabase {
    config: GameConfig,
    space: StateSpace,
    values: Vec<u8>,
    distances: Option<Vec<u16>>,
    stalemates: u64,
}

/// Label word during solving: 0 = unknown, otherwise
/// `1 + (distance << 1 | won)`.
const UNKNOWN: u16 = 0;
const MAX_DISTANCE: u32 = (u16::MAX as u32 - 1) >> 1;

#[inline]
fn win_label(distance: u32) -> u16 {
    1 + ((distance << 1) | 1) as u16
}

#[inline]
fn loss_label(distance: u32) -> u16 {
    1 + (distance << 1) as u16
}

#[inline]
fn label_parts(label: u16) -> Option<(bool, u32)> {
    (label != UNKNOWN).then(|| {
        let raw = (label - 1) as u32;
        (raw & 1 == 1, raw >> 1)
    })
}

/// Successor indices of one state, deduplicated, plus whether the mover can
/// end the game at once.
struct Successors {
    immediate_win: bool,
    moves: usize,
}

#[inline]
fn successors(
    config: &GameConfig,
    space: &StateSpace,
    index: u64,
    out: &mut Vec<u64>,
) -> Successors {
    let mover = space.mover_of(index);
    let (black, gray) = space.unrank_masks(index - space.mover_offset(mover));
    let (own, opp) = match mover {
        Color::Black => (black, gray),
        Color::Gray => (gray, black),
    };
    let marbles = config.marbles() as u32;
    let k = config.k() as u32;
    let opp_lost = marbles - opp.count_ones();
    let next_offset = space.mover_offset(mover.other());
    let mut immediate_win = false;
    let mut moves = 0;
    out.clear();
    for_each_move(config.board(), own, opp, |raw| {
        moves += 1;
        if raw.ejects && opp_lost + 1 >= k {
            immediate_win = true;
            return;
        }
        let (b, g) = match mover {
            Color::Black => (raw.own, raw.opp),
            Color::Gray => (raw.opp, raw.own),
        };
        out.push(next_offset + space.rank_masks(b, g));
    });
    out.sort_unstable();
    out.dedup();
    Successors {
        immediate_win,
        moves,
    }
}

/// Distinct predecessors of state `index` (the other side made the move).
#[inline]
fn predecessors(config: &GameConfig, space: &StateSpace, index: u64, out: &mut Vec<u64>) {
    let to_move = space.mover_of(index);
    let (black, gray) = space.unrank_masks(index - space.mover_offset(to_move));
    let moved = to_move.other();
    let (own, opp) = match moved {
        Color::Black => (black, gray),
        Color::Gray => (gray, black),
    };
    let can_restore = opp.count_ones() < config.marbles() as u32;
    let offset = space.mover_offset(moved);
    out.clear();
    for_each_unmove(config.board(), own, opp, can_restore, |own_b, opp_b| {
        let (b, g) = match moved {
            Color::Black => (own_b, opp_b),
            Color::Gray => (opp_b, own_b),
        };
        out.push(offset + space.rank_masks(b, g));
    });
    out.sort_unstable();
    out.dedup();
}

const CHUNK: u64 = 1 << 12;

/// `0..total` split into ranges of `CHUNK` indices, handed out in parallel.
fn par_ranges(total: u64) -> impl ParallelIterator<Item = std::ops::Range<u64>> {
    (0..total.div_ceil(CHUNK) as usize)
        .into_par_iter()
        .map(move |c| c as u64 * CHUNK..((c as u64 + 1) * CHUNK).min(total))
}

/// Solves every state of `config`.
pub fn solve(config: &GameConfig, options: &SolveOptions) -> Result<SolvedDatabase, SolveError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if options.workers > 0 {
        builder = builder.num_threads(options.workers);
    }
    let pool = builder
        .build()
        .map_err(|e| SolveError::Pool(e.to_string()))?;
    pool.install(|| solve_in_pool(config, options))
}

fn solve_in_pool(
    config: &GameConfig,
    options: &SolveOptions,
) -> Result<SolvedDatabase, SolveError> {
    let space = StateSpace::for_config(config)?;
    let total = space.len();
    if total > u32::MAX as u64 {
        return Err(SolveError::TooLarge(total));
    }
    let labels: Vec<AtomicU16> = (0..total).map(|_| AtomicU16::new(UNKNOWN)).collect();
    let counters: Vec<AtomicU8> = (0..total).map(|_| AtomicU8::new(0)).collect();
    let stalemates = AtomicU64::new(0);
    let max_degree = AtomicU64::new(0);

    // forward pass: out-degrees and the first two layers
    let (stalemated, quick_wins): (Vec<u32>, Vec<u32>) = par_ranges(total)
        .fold(
            || (Vec::new(), Vec::new(), Vec::with_capacity(64)),
            |(mut lost, mut won, mut buf), range| {
                for i in range {
                    let s = successors(config, &space, i, &mut buf);
                    if s.immediate_win {
                        labels[i as usize].store(win_label(1), Ordering::Relaxed);
                        won.push(i as u32);
                    } else if s.moves == 0 {
                        labels[i as usize].store(loss_label(0), Ordering::Relaxed);
                        stalemates.fetch_add(1, Ordering::Relaxed);
                        lost.push(i as u32);
                    } else {
                        max_degree.fetch_max(buf.len() as u64, Ordering::Relaxed);
                        counters[i as usize].store(buf.len().min(255) as u8, Ordering::Relaxed);
                    }
                }
                (lost, won, buf)
            },
        )
        .map(|(lost, won, _)| (lost, won))
        .reduce(
            || (Vec::new(), Vec::new()),
            |(mut l1, mut w1), (l2, w2)| {
                l1.extend(l2);
                w1.extend(w2);
                (l1, w1)
            },
        );
    let degree = max_degree.load(Ordering::Relaxed) as usize;
    if degree > 255 {
        return Err(SolveError::DegreeOverflow(degree));
    }

    let mut pending_wins = quick_wins;
    pending_wins.sort_unstable();
    let mut frontier = stalemated;
    frontier.sort_unstable();
    let mut distance: u32 = 0;
    while !frontier.is_empty() || !pending_wins.is_empty() {
        if distance == 1 {
            // immediate wins join the layer labelled from stalemates
            frontier.extend(std::mem::take(&mut pending_wins));
            frontier.sort_unstable();
            frontier.dedup();
        }
        if let Some(report) = options.progress {
            report(distance, frontier.len() as u64);
        }
        if distance + 1 > MAX_DISTANCE {
            return Err(SolveError::DistanceOverflow(distance + 1));
        }
        let next_win = win_label(distance + 1);
        let next_loss = loss_label(distance + 1);
        let mut next: Vec<u32> = frontier
            .par_chunks(CHUNK as usize)
            .flat_map_iter(|chunk| {
                let mut newly = Vec::new();
                let mut preds = Vec::with_capacity(64);
                for &s in chunk {
                    let (won, _) = label_parts(labels[s as usize].load(Ordering::Relaxed))
                        .expect("frontier states are labelled");
                    predecessors(config, &space, s as u64, &mut preds);
                    for &p in &preds {
                        let slot = &labels[p as usize];
                        if slot.load(Ordering::Relaxed) != UNKNOWN {
                            continue;
                        }
                        if !won {
                            if slot
                                .compare_exchange(
                                    UNKNOWN,
                                    next_win,
                                    Ordering::Relaxed,
                                    Ordering::Relaxed,
                                )
                                .is_ok()
                            {
                                newly.push(p as u32);
                            }
                        } else if counters[p as usize].fetch_sub(1, Ordering::Relaxed) == 1
                            && slot
                                .compare_exchange(
                                    UNKNOWN,
                                    next_loss,
                                    Ordering::Relaxed,
                                    Ordering::Relaxed,
                                )
                                .is_ok()
                        {
                            newly.push(p as u32);
                        }
                    }
                }
                newly
            })
            .collect();
        next.sort_unstable();
        frontier = next;
        distance += 1;
    }
    drop(counters);

    let mut values = vec![0u8; packed_len(total)];
    let distances: Vec<u16> = labels.into_iter().map(AtomicU16::into_inner).collect();
    let mut distances = distances;
    for (i, d) in distances.iter_mut().enumerate() {
        let i = i as u64;
        let code = match label_parts(*d) {
            None => {
                *d = u16::MAX;
                CODE_DRAW
            }
            Some((won, dist)) => {
                *d = dist as u16;
                let mover = space.mover_of(i);
                let winner = if won { mover } else { mover.other() };
                match winner {
                    Color::Black => CODE_BLACK,
                    Color::Gray => CODE_GRAY,
                }
            }
        };
        set_code(&mut values, i, code);
    }
    Ok(SolvedDatabase {
        config: config.clone(),
        space,
        values,
        distances: options.keep_distances.then_some(distances),
        stalemates: stalemates.into_inner(),
    })
}

fn code_outcome(code: u8) -> Outcome {
    match code {
        CODE_BLACK => Outcome::BlackWin,
        CODE_GRAY => Outcome::GrayWin,
        _ => Outcome::Draw,
    }
}

/// One legal move with the value of the position it leads to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedMove {
    pub mv: Move,
    pub successor: Constellation,
    /// Value of the successor with the opponent to move.
    pub value: GameValue,
}

/// Which constellations a census covers, by marbles on the board.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MarbleFilter {
    pub black: Option<u32>,
    pub gray: Option<u32>,
}

impl MarbleFilter {
    pub fn exactly(black: u32, gray: u32) -> Self {
        Self {
            black: Some(black),
            gray: Some(gray),
        }
    }

    pub fn accepts(&self, c: &Constellation) -> bool {
        self.black.is_none_or(|b| c.count(Color::Black) == b)
            && self.gray.is_none_or(|g| c.count(Color::Gray) == g)
    }
}

/// Outcome-class counts over canonical classes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Census {
    pub counts: BTreeMap<OutcomeClass, u64>,
}

impl Census {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, class: OutcomeClass) -> u64 {
        self.counts.get(&class).copied().unwrap_or(0)
    }

    pub fn unnamed(&self) -> u64 {
        self.counts
            .iter()
            .filter(|(c, _)| !c.is_named())
            .map(|(_, n)| n)
            .sum()
    }
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = OutcomeClass::ALL
            .iter()
            .filter(|c| c.is_named() || self.get(**c) > 0)
            .map(|c| format!("{}:{}", c, self.get(*c)))
            .collect();
        write!(f, "{{{}}} total {}", parts.join(", "), self.total())
    }
}

/// Result of [`SolvedDatabase::verify_fixpoint`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FixpointReport {
    pub states_checked: u64,
    pub violations: u64,
    pub draws_without_draw_successor: u64,
    /// A few offending states, for diagnostics.
    pub examples: Vec<String>,
}

impl FixpointReport {
    pub fn is_clean(&self) -> bool {
        self.violations == 0
    }
}

impl SolvedDatabase {
    pub(crate) fn from_parts(
        config: GameConfig,
        space: StateSpace,
        values: Vec<u8>,
        distances: Option<Vec<u16>>,
        stalemates: u64,
    ) -> Self {
        Self {
            config,
            space,
            values,
            distances,
            stalemates,
        }
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// Number of states in which the side to move had no legal move.
    pub fn stalemates(&self) -> u64 {
        self.stalemates
    }

    pub(crate) fn values_raw(&self) -> &[u8] {
        &self.values
    }

    pub(crate) fn distances_raw(&self) -> Option<&[u16]> {
        self.distances.as_deref()
    }

    pub fn has_distances(&self) -> bool {
        self.distances.is_some()
    }

    /// Value at a raw index.
    pub fn value_at(&self, index: StateIndex) -> GameValue {
        let outcome = code_outcome(get_code(&self.values, index.0));
        let distance = match outcome {
            Outcome::Draw => None,
            _ => self.distances.as_ref().map(|d| d[index.0 as usize]),
        };
        GameValue { outcome, distance }
    }

    /// Overwrites one stored value. Meant for repairs and audit tests.
    pub fn set_value(&mut self, index: StateIndex, value: GameValue) {
        let code = match value.outcome {
            Outcome::BlackWin => CODE_BLACK,
            Outcome::GrayWin => CODE_GRAY,
            Outcome::Draw => CODE_DRAW,
        };
        set_code(&mut self.values, index.0, code);
        if let Some(d) = self.distances.as_mut() {
            d[index.0 as usize] = value.distance.unwrap_or(u16::MAX);
        }
    }

    /// Perfect-play value with `to_move` to play. Finished games report
    /// their winner at distance 0.
    pub fn value(&self, c: &Constellation, to_move: Color) -> Result<GameValue, StoreError> {
        let c = self.config.normalize(*c);
        if let Some(winner) = is_terminal(&c, &self.config) {
            return Ok(GameValue::win(winner, 0));
        }
        let index = self.space.index(&c, to_move)?;
        Ok(self.value_at(index))
    }

    pub fn outcome_class(&self, c: &Constellation) -> Result<OutcomeClass, StoreError> {
        let black = self.value(c, Color::Black)?.outcome;
        let gray = self.value(c, Color::Gray)?.outcome;
        Ok(OutcomeClass::from_pair(black, gray))
    }

    /// Legal moves ordered best first for the mover: wins (fastest first),
    /// then draws, then losses (slowest first); ties keep move order.
    pub fn best_moves(
        &self,
        c: &Constellation,
        to_move: Color,
    ) -> Result<Vec<RankedMove>, StoreError> {
        let c = self.config.normalize(*c);
        let board = self.config.board();
        let mut ranked = Vec::new();
        for mv in legal_moves(&c, to_move, &self.config) {
            let successor = apply_move(board, &c, &mv);
            let value = self.value(&successor, to_move.other())?;
            ranked.push(RankedMove {
                mv,
                successor,
                value,
            });
        }
        let win = Outcome::win_for(to_move);
        ranked.sort_by_key(|r| {
            let d = r.value.distance.unwrap_or(0) as i64;
            if r.value.outcome == win {
                (0, d)
            } else if r.value.outcome == Outcome::Draw {
                (1, 0)
            } else {
                (2, -d)
            }
        });
        Ok(ranked)
    }

    /// Outcome classes of every canonical class (board symmetries only)
    /// whose marble counts pass `filter`.
    pub fn class_census(&self, filter: MarbleFilter) -> Census {
        self.census_where(|c| filter.accepts(c))
    }

    /// Outcome classes of the canonical classes (board symmetries only)
    /// that match `pattern` in some orientation.
    pub fn pattern_census(&self, pattern: &Pattern) -> Census {
        let board = self.config.board();
        self.census_where(|c| match_pattern(board, c, pattern))
    }

    fn census_where(&self, accept: impl Fn(&Constellation) -> bool + Sync) -> Census {
        let board = self.config.board();
        let n = board.cell_count();
        let per = self.space.constellations();
        let counts = par_ranges(per)
            .fold(
                BTreeMap::new,
                |mut acc: BTreeMap<OutcomeClass, u64>, range| {
                    for rank in range {
                        let (b, g) = self.space.unrank_masks(rank);
                        let c = Constellation::from_masks(b, g);
                        if !accept(&c) || canonicalize(board, &c, false).key() != c.scan_key(n) {
                            continue;
                        }
                        let black = code_outcome(get_code(&self.values, rank));
                        let gray = code_outcome(get_code(&self.values, per + rank));
                        *acc.entry(OutcomeClass::from_pair(black, gray)).or_default() += 1;
                    }
                    acc
                },
            )
            .reduce(BTreeMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_default() += v;
                }
                a
            });
        Census { counts }
    }

    /// Re-checks the fixpoint conditions for every state using forward move
    /// generation only.
    pub fn verify_fixpoint(&self) -> FixpointReport {
        let config = &self.config;
        let space = &self.space;
        par_ranges(space.len())
            .fold(
                || (FixpointReport::default(), Vec::with_capacity(64)),
                |(mut report, mut buf), range| {
                    for i in range {
                        report.states_checked += 1;
                        let problem = self.check_state(config, space, i, &mut buf, &mut report);
                        if let Some(msg) = problem {
                            report.violations += 1;
                            if report.examples.len() < 8 {
                                report.examples.push(msg);
                            }
                        }
                    }
                    (report, buf)
                },
            )
            .map(|(r, _)| r)
            .reduce(FixpointReport::default, |mut a, b| {
                a.states_checked += b.states_checked;
                a.violations += b.violations;
                a.draws_without_draw_successor += b.draws_without_draw_successor;
                a.examples.extend(b.examples);
                a.examples.truncate(8);
                a
            })
    }

    fn check_state(
        &self,
        config: &GameConfig,
        space: &StateSpace,
        i: u64,
        buf: &mut Vec<u64>,
        report: &mut FixpointReport,
    ) -> Option<String> {
        let mover = space.mover_of(i);
        let here = self.value_at(StateIndex(i));
        let s = successors(config, space, i, buf);
        let describe = || {
            let (c, _) = space.unrank(StateIndex(i)).expect("index in range");
            format!(
                "{} ({} to move): {}",
                c.notation(config.board()),
                mover,
                here
            )
        };
        let win = Outcome::win_for(mover);
        let loss = Outcome::win_for(mover.other());
        let succ: Vec<GameValue> = buf.iter().map(|&j| self.value_at(StateIndex(j))).collect();
        let has_loss_succ = s.immediate_win || succ.iter().any(|v| v.outcome == win);
        if here.outcome == win {
            if !has_loss_succ {
                return Some(format!("{} has no losing successor", describe()));
            }
            if let Some(d) = here.distance {
                let best = if s.immediate_win {
                    Some(1)
                } else {
                    succ.iter()
                        .filter(|v| v.outcome == win)
                        .filter_map(|v| v.distance)
                        .min()
                        .map(|x| x + 1)
                };
                if best.is_some_and(|b| b != d) {
                    return Some(format!("{} distance should be {best:?}", describe()));
                }
            }
        } else if here.outcome == loss {
            if s.immediate_win {
                return Some(format!("{} can end the game at once", describe()));
            }
            if s.moves == 0 {
                if here.distance.is_some_and(|d| d != 0) {
                    return Some(format!("{} stalemate distance", describe()));
                }
                return None;
            }
            if succ.iter().any(|v| v.outcome != loss) {
                return Some(format!("{} has a non-losing move", describe()));
            }
            if let Some(d) = here.distance {
                let worst = succ.iter().filter_map(|v| v.distance).max().map(|x| x + 1);
                if worst.is_some_and(|w| w != d) {
                    return Some(format!("{} distance should be {worst:?}", describe()));
                }
            }
        } else {
            if has_loss_succ {
                return Some(format!("{} is drawn but has a winning move", describe()));
            }
            if s.moves == 0 {
                return Some(format!("{} is drawn but stalemated", describe()));
            }
            if !succ.iter().any(|v| v.outcome == Outcome::Draw) {
                report.draws_without_draw_successor += 1;
                return Some(format!("{} is drawn with no drawn successor", describe()));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b222() -> GameConfig {
        GameConfig::preset("2,2,2".parse().unwrap()).unwrap()
    }

    #[test]
    fn label_encoding() {
        assert_eq!(label_parts(win_label(7)), Some((true, 7)));
        assert_eq!(label_parts(loss_label(0)), Some((false, 0)));
        assert_eq!(
            label_parts(loss_label(MAX_DISTANCE)),
            Some((false, MAX_DISTANCE))
        );
        assert_eq!(label_parts(UNKNOWN), None);
    }

    #[test]
    fn class_pairs_are_a_bijection() {
        for class in OutcomeClass::ALL {
            let (b, g) = class.pair();
            assert_eq!(OutcomeClass::from_pair(b, g), class);
            assert_eq!(class.negated().negated(), class);
            assert_eq!(class.name().parse::<OutcomeClass>().unwrap(), class);
        }
        assert_eq!(OutcomeClass::L.negated(), OutcomeClass::R);
        assert_eq!(OutcomeClass::NHat.negated(), OutcomeClass::NCheck);
        assert_eq!(OutcomeClass::N.negated(), OutcomeClass::N);
        assert_eq!(OutcomeClass::ALL.iter().filter(|c| c.is_named()).count(), 6);
    }

    #[test]
    fn predecessors_invert_successors() {
        for config in [
            b222(),
            GameConfig::preset("2,2,3".parse().unwrap()).unwrap(),
            GameConfig::from_notation("2,2,3:G.BG..BG.B", 2).unwrap(),
        ] {
            let space = StateSpace::for_config(&config).unwrap();
            let mut succ = Vec::new();
            let mut pred = Vec::new();
            let mut forward = std::collections::HashSet::new();
            for i in 0..space.len() {
                successors(&config, &space, i, &mut succ);
                for &j in &succ {
                    forward.insert((i, j));
                }
            }
            let mut backward = std::collections::HashSet::new();
            for j in 0..space.len() {
                predecessors(&config, &space, j, &mut pred);
                for &i in &pred {
                    backward.insert((i, j));
                }
            }
            assert_eq!(forward, backward, "{}", config.shape());
        }
    }

    #[test]
    fn empty_board_is_a_stalemate() {
        let board = crate::geometry::Board::new("1,1,1".parse().unwrap()).unwrap();
        let config = GameConfig::new(board, 1, Constellation::empty()).unwrap();
        let db = solve(&config, &SolveOptions::with_workers(1)).unwrap();
        assert_eq!(db.space().len(), 2);
        assert_eq!(db.stalemates(), 2);
        let v = db.value(&Constellation::empty(), Color::Black).unwrap();
        assert_eq!(v, GameValue::win(Color::Gray, 0));
        assert!(db.verify_fixpoint().is_clean());
    }

    #[test]
    fn finished_games_report_their_winner() {
        let config = b222();
        let db = solve(&config, &SolveOptions::default()).unwrap();
        let over = config.parse("GB...B.").unwrap();
        assert_eq!(
            db.value(&over, Color::Gray).unwrap(),
            GameValue::win(Color::Black, 0)
        );
    }

    #[test]
    fn immediate_push_ranks_first() {
        let config = GameConfig::preset("2,2,3".parse().unwrap()).unwrap();
        let db = solve(&config, &SolveOptions::default()).unwrap();
        let c = (0..db.space().len())
            .map(|i| db.space().unrank(StateIndex(i)).unwrap())
            .find(|(c, mover)| {
                *mover == Color::Black
                    && legal_moves(c, Color::Black, &config)
                        .iter()
                        .any(|m| m.ejects)
            })
            .map(|(c, _)| c)
            .expect("some position allows an eject");
        let ranked = db.best_moves(&c, Color::Black).unwrap();
        assert!(ranked[0].mv.ejects);
        assert_eq!(ranked[0].value, GameValue::win(Color::Black, 0));
        assert_eq!(
            db.value(&c, Color::Black).unwrap(),
            GameValue::win(Color::Black, 1)
        );
    }

    #[test]
    fn pattern_census_restricts_class_census() {
        let config = b222();
        let db = solve(&config, &SolveOptions::with_workers(1)).unwrap();
        let anything = Pattern::parse_cells(config.board(), "???????").unwrap();
        assert_eq!(
            db.pattern_census(&anything),
            db.class_census(MarbleFilter::default())
        );
        let corner = Pattern::parse_cells(config.board(), "BB?????").unwrap();
        let some = db.pattern_census(&corner);
        assert!(some.total() > 0 && some.total() < db.pattern_census(&anything).total());
    }

    #[test]
    fn perturbation_is_detected() {
        let config = b222();
        let mut db = solve(&config, &SolveOptions::default()).unwrap();
        assert!(db.verify_fixpoint().is_clean());
        let b1 = config.initial();
        let idx = db.space().index(&b1, Color::Black).unwrap();
        assert_eq!(db.value_at(idx).outcome, Outcome::Draw);
        db.set_value(idx, GameValue::win(Color::Black, 3));
        assert!(db.verify_fixpoint().violations >= 1);
    }
}
