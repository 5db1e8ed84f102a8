//! Abalone movement rules on an arbitrary [`Board`].
//!
//! A player moves one to three of their marbles that form a contiguous line.
//! The group moves one step either along its own line (in-line) or sideways
//! (broadside). Broadside moves and single-marble moves need empty
//! destinations. An in-line move may push (sumito) a contiguous line of
//! opposing marbles when the pushing line is strictly longer and the cell
//! beyond the opposing line is empty or off the board; in the latter case the
//! last opposing marble is ejected. A player may never push their own marble
//! off the board.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{Board, BoardShape, Cell, Direction, GeometryError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RulesError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("cannot parse board notation {0:?}: {1}")]
    Notation(String, String),
    #[error("invalid game configuration: {0}")]
    Config(String),
    #[error("illegal move {0}")]
    IllegalMove(String),
    #[error("the game is already over")]
    GameOver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Black,
    Gray,
}

impl Color {
    #[inline]
    pub fn other(self) -> Color {
        match self {
            Color::Black => Color::Gray,
            Color::Gray => Color::Black,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Black => "black",
            Color::Gray => "gray",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for Color {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "black" | "b" => Ok(Color::Black),
            "gray" | "grey" | "g" => Ok(Color::Gray),
            _ => Err(format!("unknown color {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Content {
    Empty,
    Black,
    Gray,
}

impl Content {
    pub fn symbol(self) -> char {
        match self {
            Content::Empty => '.',
            Content::Black => 'B',
            Content::Gray => 'G',
        }
    }

    pub fn from_symbol(ch: char) -> Option<Content> {
        match ch {
            '.' => Some(Content::Empty),
            'B' => Some(Content::Black),
            'G' => Some(Content::Gray),
            _ => None,
        }
    }
}

impl From<Color> for Content {
    fn from(c: Color) -> Self {
        match c {
            Color::Black => Content::Black,
            Color::Gray => Content::Gray,
        }
    }
}

/// Board contents plus the number of marbles each side has lost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Constellation {
    black: u64,
    gray: u64,
    black_lost: u8,
    gray_lost: u8,
}

impl Constellation {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds from cell masks. Panics if the masks overlap.
    pub fn from_masks(black: u64, gray: u64) -> Self {
        assert_eq!(black & gray, 0, "a cell cannot hold two marbles");
        Self {
            black,
            gray,
            black_lost: 0,
            gray_lost: 0,
        }
    }

    pub fn with_lost(mut self, black_lost: u8, gray_lost: u8) -> Self {
        self.black_lost = black_lost;
        self.gray_lost = gray_lost;
        self
    }

    /// Parses the cell string of board notation (one of `B`, `G`, `.` per
    /// cell in scan order).
    pub fn parse_cells(board: &Board, cells: &str) -> Result<Self, RulesError> {
        let chars: Vec<char> = cells.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.len() != board.cell_count() {
            return Err(RulesError::Notation(
                cells.to_string(),
                format!(
                    "expected {} cells for board {}, found {}",
                    board.cell_count(),
                    board.shape(),
                    chars.len()
                ),
            ));
        }
        let mut out = Self::empty();
        for (i, ch) in chars.into_iter().enumerate() {
            let content = Content::from_symbol(ch).ok_or_else(|| {
                RulesError::Notation(cells.to_string(), format!("bad cell symbol {ch:?}"))
            })?;
            out = out.with(Cell(i as u8), content);
        }
        Ok(out)
    }

    /// Parses full notation `"a,b,c:cells"`.
    pub fn parse(notation: &str) -> Result<(Board, Self), RulesError> {
        let (shape, cells) = notation.split_once(':').ok_or_else(|| {
            RulesError::Notation(notation.to_string(), "missing ':' separator".into())
        })?;
        let shape: BoardShape = shape.trim().parse()?;
        let board = Board::new(shape)?;
        let c = Self::parse_cells(&board, cells.trim())?;
        Ok((board, c))
    }

    pub fn cells_string(&self, board: &Board) -> String {
        board.cells().map(|c| self.get(c).symbol()).collect()
    }

    pub fn notation(&self, board: &Board) -> String {
        format!("{}:{}", board.shape(), self.cells_string(board))
    }

    /// Multi-line picture of the board, each cell drawn as its label and
    /// content (`aB`, `b.`), rows stepping by half a cell.
    pub fn diagram(&self, board: &Board) -> String {
        let pos: Vec<(i32, i32)> = board.cells().map(|c| board.column_and_height(c)).collect();
        let min_col = pos.iter().map(|p| p.0).min().unwrap_or(0);
        let (lo, hi) = (
            pos.iter().map(|p| p.1).min().unwrap_or(0),
            pos.iter().map(|p| p.1).max().unwrap_or(0),
        );
        let mut lines = Vec::new();
        for h in (lo..=hi).rev() {
            let mut line = String::new();
            for (cell, &(col, height)) in board.cells().zip(&pos) {
                if height != h {
                    continue;
                }
                let at = (col - min_col) as usize * 4;
                while line.len() < at {
                    line.push(' ');
                }
                line.push_str(&board.label(cell));
                line.push(self.get(cell).symbol());
            }
            lines.push(line);
        }
        lines.join("\n")
    }

    #[inline]
    pub fn get(&self, cell: Cell) -> Content {
        if self.black & cell.bit() != 0 {
            Content::Black
        } else if self.gray & cell.bit() != 0 {
            Content::Gray
        } else {
            Content::Empty
        }
    }

    pub fn with(mut self, cell: Cell, content: Content) -> Self {
        self.black &= !cell.bit();
        self.gray &= !cell.bit();
        match content {
            Content::Empty => {}
            Content::Black => self.black |= cell.bit(),
            Content::Gray => self.gray |= cell.bit(),
        }
        self
    }

    #[inline]
    pub fn mask(&self, color: Color) -> u64 {
        match color {
            Color::Black => self.black,
            Color::Gray => self.gray,
        }
    }

    #[inline]
    pub fn occupied(&self) -> u64 {
        self.black | self.gray
    }

    pub fn count(&self, color: Color) -> u32 {
        self.mask(color).count_ones()
    }

    pub fn lost(&self, color: Color) -> u8 {
        match color {
            Color::Black => self.black_lost,
            Color::Gray => self.gray_lost,
        }
    }

    /// Swaps colours and lost counts.
    pub fn negated(&self) -> Self {
        Self {
            black: self.gray,
            gray: self.black,
            black_lost: self.gray_lost,
            gray_lost: self.black_lost,
        }
    }

    /// Scan-order contents as a base-3 number (`.`=0, `B`=1, `G`=2, first
    /// cell most significant). Ordering by key equals lexicographic ordering
    /// of the cell strings.
    pub fn scan_key(&self, cell_count: usize) -> u128 {
        let mut key = 0u128;
        for i in 0..cell_count {
            let bit = 1u64 << i;
            let digit = if self.black & bit != 0 {
                1
            } else if self.gray & bit != 0 {
                2
            } else {
                0
            };
            key = key * 3 + digit;
        }
        key
    }
}

/// Board, win threshold and starting position of one Abalone variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameConfig {
    board: Arc<Board>,
    k: u8,
    marbles: u8,
    initial: Constellation,
}

impl GameConfig {
    /// `k` is the number of opposing marbles to push off to win.
    pub fn new(board: Board, k: u8, initial: Constellation) -> Result<Self, RulesError> {
        if k == 0 {
            return Err(RulesError::Config("K must be at least 1".into()));
        }
        let (nb, ng) = (initial.count(Color::Black), initial.count(Color::Gray));
        if nb != ng {
            return Err(RulesError::Config(format!(
                "initial position must have equal marble counts, found {nb} black and {ng} gray"
            )));
        }
        if initial.black_lost != 0 || initial.gray_lost != 0 {
            return Err(RulesError::Config(
                "initial position must not have lost marbles".into(),
            ));
        }
        if initial.occupied() & !board.full_mask() != 0 {
            return Err(RulesError::Config(
                "initial position is off the board".into(),
            ));
        }
        Ok(Self {
            board: Arc::new(board),
            k,
            marbles: nb as u8,
            initial,
        })
    }

    /// Parses `"a,b,c:cells"` for the starting position.
    pub fn from_notation(notation: &str, k: u8) -> Result<Self, RulesError> {
        let (board, initial) = Constellation::parse(notation)?;
        Self::new(board, k, initial)
    }

    /// The standard start for the small boards: the daisy `B1` on 2,2,2,
    /// `C0` on 2,2,3 (both K=1), and the starts proposed for 2,3,3 and 3,3,3
    /// (both K=2).
    pub fn preset(shape: BoardShape) -> Option<Self> {
        let (notation, k) = match shape.sides() {
            (2, 2, 2) => ("2,2,2:GB...BG", 1),
            (2, 2, 3) => ("2,2,3:G.BG..BG.B", 1),
            (2, 3, 3) => ("2,3,3:BBBBB....GGGGG", 2),
            (3, 3, 3) => ("3,3,3:.GGB.G.BB.BB.G.BGG.", 2),
            _ => return None,
        };
        Some(Self::from_notation(notation, k).expect("preset notation is valid"))
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn shared_board(&self) -> Arc<Board> {
        Arc::clone(&self.board)
    }

    pub fn shape(&self) -> BoardShape {
        self.board.shape()
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    /// Marbles per side at the start.
    pub fn marbles(&self) -> u8 {
        self.marbles
    }

    pub fn initial(&self) -> Constellation {
        self.initial
    }

    /// Sets lost counts from the marble counts on the board.
    pub fn normalize(&self, c: Constellation) -> Constellation {
        let lost = |color| self.marbles.saturating_sub(c.count(color) as u8);
        c.with_lost(lost(Color::Black), lost(Color::Gray))
    }

    /// Parses cell notation for this board and fills in lost counts.
    pub fn parse(&self, notation: &str) -> Result<Constellation, RulesError> {
        let cells = match notation.split_once(':') {
            Some((shape, cells)) => {
                let shape: BoardShape = shape.trim().parse()?;
                if shape != self.shape() {
                    return Err(RulesError::Notation(
                        notation.to_string(),
                        format!("board {shape} does not match {}", self.shape()),
                    ));
                }
                cells
            }
            None => notation,
        };
        let c = Constellation::parse_cells(&self.board, cells.trim())?;
        if c.count(Color::Black) > self.marbles as u32 || c.count(Color::Gray) > self.marbles as u32
        {
            return Err(RulesError::Notation(
                notation.to_string(),
                format!("more than {} marbles of one colour", self.marbles),
            ));
        }
        Ok(self.normalize(c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    InLine,
    Broadside,
}

/// A legal move: the moving marbles (in scan order), the step direction and,
/// for a sumito, how many opposing marbles are pushed and whether the lead
/// one leaves the board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub mover: Color,
    cells: [Cell; 3],
    len: u8,
    pub direction: Direction,
    pub kind: MoveKind,
    pub pushed: u8,
    pub ejects: bool,
}

impl Move {
    pub fn cells(&self) -> &[Cell] {
        &self.cells[..self.len as usize]
    }

    pub fn is_sumito(&self) -> bool {
        self.pushed > 0
    }

    /// Sort key for deterministic tie-breaking: source cells, then direction.
    pub fn order_key(&self) -> ([u8; 3], u8, u8) {
        let mut cells = [u8::MAX; 3];
        for (slot, c) in cells.iter_mut().zip(self.cells()) {
            *slot = c.0;
        }
        (cells, self.len, self.direction as u8)
    }

    /// Human-readable description, e.g. `e,f down (2 on 1 push)`.
    pub fn describe(&self, board: &Board) -> String {
        let mut s = self.text(board);
        if self.pushed > 0 {
            s.push_str(&format!(" ({} on {} push", self.len, self.pushed));
            if self.ejects {
                s.push_str(", ejects");
            }
            s.push(')');
        } else if self.kind == MoveKind::Broadside {
            s.push_str(" (broadside)");
        }
        s
    }

    /// Compact text form accepted by [`find_move`]: `"e,f:down"`.
    pub fn text(&self, board: &Board) -> String {
        let cells: Vec<String> = self.cells().iter().map(|&c| board.label(c)).collect();
        format!("{}:{}", cells.join(","), self.direction.name())
    }
}

/// Winner, if one side has lost `k` marbles.
pub fn is_terminal(c: &Constellation, config: &GameConfig) -> Option<Color> {
    if c.gray_lost >= config.k {
        Some(Color::Black)
    } else if c.black_lost >= config.k {
        Some(Color::Gray)
    } else {
        None
    }
}

/// Result of one generated move on raw masks.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RawMove {
    pub cells: [u8; 3],
    pub len: u8,
    pub dir: u8,
    pub broadside: bool,
    pub pushed: u8,
    pub ejects: bool,
    pub own: u64,
    pub opp: u64,
}

/// The three line axes used to enumerate groups: one direction from each
/// parallel class.
const AXES: [usize; 3] = [0, 1, 2];
const OFF: u8 = u8::MAX;

/// Enumerates every legal move for the side owning `own` against `opp`.
#[inline]
pub(crate) fn for_each_move(board: &Board, own: u64, opp: u64, mut emit: impl FnMut(RawMove)) {
    let occupied = own | opp;
    let mut rest = own;
    while rest != 0 {
        let p = rest.trailing_zeros() as u8;
        rest &= rest - 1;
        for d in 0..6 {
            let t = board.neighbor_raw(p as usize, d);
            if t != OFF && occupied & (1u64 << t) == 0 {
                emit(RawMove {
                    cells: [p, OFF, OFF],
                    len: 1,
                    dir: d as u8,
                    broadside: false,
                    pushed: 0,
                    ejects: false,
                    own: own & !(1u64 << p) | (1u64 << t),
                    opp,
                });
            }
        }
        for e in AXES {
            let q = board.neighbor_raw(p as usize, e);
            if q == OFF || own & (1u64 << q) == 0 {
                continue;
            }
            group_moves(board, own, opp, [p, q, OFF], 2, e, &mut emit);
            let r = board.neighbor_raw(q as usize, e);
            if r != OFF && own & (1u64 << r) != 0 {
                group_moves(board, own, opp, [p, q, r], 3, e, &mut emit);
            }
        }
    }
}

#[inline]
fn group_moves(
    board: &Board,
    own: u64,
    opp: u64,
    group: [u8; 3],
    len: u8,
    axis: usize,
    emit: &mut impl FnMut(RawMove),
) {
    let occupied = own | opp;
    let k = len as usize;
    let mut sorted = group;
    sorted[..k].sort_unstable();
    let group_mask = group[..k].iter().fold(0u64, |m, &c| m | (1u64 << c));
    for d in 0..6 {
        if d % 3 == axis % 3 {
            // group[0] is the back end when moving along `axis`
            let (tail, head) = if d == axis {
                (group[0], group[k - 1])
            } else {
                (group[k - 1], group[0])
            };
            let front = board.neighbor_raw(head as usize, d);
            if front == OFF {
                continue;
            }
            let front_bit = 1u64 << front;
            let moved_own = own & !(1u64 << tail) | front_bit;
            if occupied & front_bit == 0 {
                emit(RawMove {
                    cells: sorted,
                    len,
                    dir: d as u8,
                    broadside: false,
                    pushed: 0,
                    ejects: false,
                    own: moved_own,
                    opp,
                });
                continue;
            }
            if own & front_bit != 0 {
                continue;
            }
            let mut pushed = 0usize;
            let mut cur = front;
            while cur != OFF && opp & (1u64 << cur) != 0 && pushed < k {
                pushed += 1;
                cur = board.neighbor_raw(cur as usize, d);
            }
            if pushed >= k {
                continue;
            }
            let (new_opp, ejects) = if cur == OFF {
                (opp & !front_bit, true)
            } else if occupied & (1u64 << cur) == 0 {
                (opp & !front_bit | (1u64 << cur), false)
            } else {
                // own marble behind the opposing line
                continue;
            };
            emit(RawMove {
                cells: sorted,
                len,
                dir: d as u8,
                broadside: false,
                pushed: pushed as u8,
                ejects,
                own: moved_own,
                opp: new_opp,
            });
        } else {
            let mut dest = 0u64;
            let mut ok = true;
            for &g in &group[..k] {
                let t = board.neighbor_raw(g as usize, d);
                if t == OFF || occupied & (1u64 << t) != 0 {
                    ok = false;
                    break;
                }
                dest |= 1u64 << t;
            }
            if ok {
                emit(RawMove {
                    cells: sorted,
                    len,
                    dir: d as u8,
                    broadside: true,
                    pushed: 0,
                    ejects: false,
                    own: own & !group_mask | dest,
                    opp,
                });
            }
        }
    }
}

/// Enumerates predecessor positions: for the side owning `own`, which has
/// just moved, yields `(own_before, opp_before)` for every legal move that
/// leads to `(own, opp)`. `opp_can_restore` allows predecessors in which an
/// opposing marble was pushed off the board. The same predecessor may be
/// yielded more than once.
#[inline]
pub(crate) fn for_each_unmove(
    board: &Board,
    own: u64,
    opp: u64,
    opp_can_restore: bool,
    mut emit: impl FnMut(u64, u64),
) {
    let occupied = own | opp;
    let empty = |c: u8| c != OFF && occupied & (1u64 << c) == 0;
    let mut rest = own;
    while rest != 0 {
        let p = rest.trailing_zeros() as u8;
        rest &= rest - 1;
        for d in 0..6 {
            let src = board.neighbor_raw(p as usize, (d + 3) % 6);
            if empty(src) {
                emit(own & !(1u64 << p) | (1u64 << src), opp);
            }
        }
        for e in AXES {
            let q = board.neighbor_raw(p as usize, e);
            if q == OFF || own & (1u64 << q) == 0 {
                continue;
            }
            group_unmoves(
                board,
                own,
                opp,
                opp_can_restore,
                [p, q, OFF],
                2,
                e,
                &mut emit,
            );
            let r = board.neighbor_raw(q as usize, e);
            if r != OFF && own & (1u64 << r) != 0 {
                group_unmoves(board, own, opp, opp_can_restore, [p, q, r], 3, e, &mut emit);
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn group_unmoves(
    board: &Board,
    own: u64,
    opp: u64,
    opp_can_restore: bool,
    group: [u8; 3],
    len: u8,
    axis: usize,
    emit: &mut impl FnMut(u64, u64),
) {
    let occupied = own | opp;
    let k = len as usize;
    let group_mask = group[..k].iter().fold(0u64, |m, &c| m | (1u64 << c));
    for d in 0..6 {
        let back = (d + 3) % 6;
        if d % 3 == axis % 3 {
            let (tail, head) = if d == axis {
                (group[0], group[k - 1])
            } else {
                (group[k - 1], group[0])
            };
            let src = board.neighbor_raw(tail as usize, back);
            if src == OFF || occupied & (1u64 << src) != 0 {
                continue;
            }
            let head_bit = 1u64 << head;
            let before_own = own & !head_bit | (1u64 << src);
            // plain slide: head cell was empty
            emit(before_own, opp);
            // sumito of `j` opposing marbles, which now sit one step ahead
            let mut cur = head;
            for _ in 1..k {
                let next = board.neighbor_raw(cur as usize, d);
                if next == OFF {
                    // the j-th marble went off the board
                    if opp_can_restore {
                        emit(before_own, opp | head_bit);
                    }
                    break;
                }
                if opp & (1u64 << next) == 0 {
                    break;
                }
                emit(before_own, opp & !(1u64 << next) | head_bit);
                cur = next;
            }
        } else {
            let mut src = 0u64;
            let mut ok = true;
            for &g in &group[..k] {
                let s = board.neighbor_raw(g as usize, back);
                if s == OFF || occupied & (1u64 << s) != 0 {
                    ok = false;
                    break;
                }
                src |= 1u64 << s;
            }
            if ok {
                emit(own & !group_mask | src, opp);
            }
        }
    }
}

fn raw_to_move(raw: &RawMove, mover: Color) -> Move {
    let mut cells = [Cell(0); 3];
    for (slot, &c) in cells.iter_mut().zip(&raw.cells[..raw.len as usize]) {
        *slot = Cell(c);
    }
    Move {
        mover,
        cells,
        len: raw.len,
        direction: Direction::from_index(raw.dir as usize),
        kind: if raw.broadside {
            MoveKind::Broadside
        } else {
            MoveKind::InLine
        },
        pushed: raw.pushed,
        ejects: raw.ejects,
    }
}

/// All legal moves for `mover`, sorted by source cells then direction.
///
/// Calling this on a terminal position is a contract violation; it returns
/// the moves that would be available anyway.
pub fn legal_moves(c: &Constellation, mover: Color, config: &GameConfig) -> Vec<Move> {
    debug_assert!(
        is_terminal(c, config).is_none(),
        "no moves in a finished game"
    );
    moves_on(config.board(), c, mover)
}

/// Legal moves on a board without a game configuration.
pub fn moves_on(board: &Board, c: &Constellation, mover: Color) -> Vec<Move> {
    let mut out = Vec::new();
    for_each_move(board, c.mask(mover), c.mask(mover.other()), |raw| {
        out.push(raw_to_move(&raw, mover))
    });
    out.sort_by_key(Move::order_key);
    out
}

/// Applies a move produced by [`legal_moves`] for this position.
pub fn apply_move(board: &Board, c: &Constellation, mv: &Move) -> Constellation {
    let mover = mv.mover;
    let own = c.mask(mover);
    let opp = c.mask(mover.other());
    let dir = mv.direction;
    let bit = |cell: Cell| cell.bit();
    let (new_own, new_opp) = match (mv.kind, mv.cells().len()) {
        (MoveKind::Broadside, _) => {
            let mut moved = own;
            for &g in mv.cells() {
                moved &= !bit(g);
            }
            for &g in mv.cells() {
                let t = board
                    .neighbor(g, dir)
                    .expect("broadside destination on board");
                moved |= bit(t);
            }
            (moved, opp)
        }
        (MoveKind::InLine, _) => {
            // head is the group cell with no group member ahead of it
            let cells = mv.cells();
            let head = *cells
                .iter()
                .find(|&&g| board.neighbor(g, dir).is_none_or(|n| !cells.contains(&n)))
                .expect("group has a head");
            let tail = *cells
                .iter()
                .find(|&&g| {
                    board
                        .neighbor(g, dir.opposite())
                        .is_none_or(|n| !cells.contains(&n))
                })
                .expect("group has a tail");
            let front = board
                .neighbor(head, dir)
                .expect("in-line destination on board");
            let moved_own = own & !bit(tail) | bit(front);
            let mut moved_opp = opp;
            if mv.pushed > 0 {
                let mut end = front;
                for _ in 1..mv.pushed {
                    end = board.neighbor(end, dir).expect("pushed line on board");
                }
                moved_opp &= !bit(front);
                if let Some(beyond) = board.neighbor(end, dir) {
                    moved_opp |= bit(beyond);
                }
            }
            (moved_own, moved_opp)
        }
    };
    let mut next = match mover {
        Color::Black => Constellation::from_masks(new_own, new_opp),
        Color::Gray => Constellation::from_masks(new_opp, new_own),
    };
    next.black_lost = c.black_lost;
    next.gray_lost = c.gray_lost;
    if mv.ejects {
        match mover {
            Color::Black => next.gray_lost += 1,
            Color::Gray => next.black_lost += 1,
        }
    }
    next
}

/// Checks that `mv` is legal here before applying it.
pub fn try_apply(
    config: &GameConfig,
    c: &Constellation,
    mover: Color,
    mv: &Move,
) -> Result<Constellation, RulesError> {
    if is_terminal(c, config).is_some() {
        return Err(RulesError::GameOver);
    }
    if mv.mover != mover || !legal_moves(c, mover, config).contains(mv) {
        return Err(RulesError::IllegalMove(mv.describe(config.board())));
    }
    Ok(apply_move(config.board(), c, mv))
}

/// Finds the legal move matching text such as `"e,f:down"` (cell labels in
/// any order, direction by name or short name). Does not check whether the
/// game is already over.
pub fn find_move(
    config: &GameConfig,
    c: &Constellation,
    mover: Color,
    text: &str,
) -> Result<Move, RulesError> {
    let board = config.board();
    let illegal = || RulesError::IllegalMove(text.to_string());
    let (cells, dir) = text.trim().rsplit_once([':', ' ']).ok_or_else(illegal)?;
    let dir: Direction = dir.trim().parse().map_err(|_| illegal())?;
    let mut wanted: Vec<Cell> = cells
        .split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| board.cell_by_label(s.trim()).ok_or_else(illegal))
        .collect::<Result<_, _>>()?;
    wanted.sort();
    moves_on(board, c, mover)
        .into_iter()
        .find(|m| m.direction == dir && m.cells() == wanted.as_slice())
        .ok_or_else(illegal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn b222(cells: &str) -> (GameConfig, Constellation) {
        let config = GameConfig::from_notation("2,2,2:GB...BG", 1).unwrap();
        let c = config.parse(cells).unwrap();
        (config, c)
    }

    fn c223(cells: &str) -> (GameConfig, Constellation) {
        let config = GameConfig::from_notation("2,2,3:G.BG..BG.B", 1).unwrap();
        let c = config.parse(cells).unwrap();
        (config, c)
    }

    fn cell(config: &GameConfig, label: &str) -> Cell {
        config.board().cell_by_label(label).unwrap()
    }

    #[test]
    fn diagram_shows_every_cell_once() {
        let (config, c) = c223("G.BG..BG.B");
        let picture = c.diagram(config.board());
        println!("{picture}");
        for (i, label) in "abcdefghij".chars().enumerate() {
            let want = format!("{label}{}", "G.BG..BG.B".as_bytes()[i] as char);
            assert_eq!(picture.matches(&want).count(), 1, "{want}");
        }
    }

    #[test]
    fn notation_round_trip() {
        let (board, c) = Constellation::parse("2,2,3:G.BG..BG.B").unwrap();
        assert_eq!(c.notation(&board), "2,2,3:G.BG..BG.B");
        assert!(Constellation::parse("2,2,3:G.BG").is_err());
        assert!(Constellation::parse("2,2,3:G.BG..BG.X").is_err());
        assert!(Constellation::parse("G.BG..BG.B").is_err());
    }

    #[test]
    fn b0_black_has_six_moves() {
        // L1 L2 M1 M2 M3 R1 R2
        let (config, c) = b222("BB...GG");
        let moves = legal_moves(&c, Color::Black, &config);
        assert_eq!(moves.len(), 6);
        let singles = moves.iter().filter(|m| m.cells().len() == 1).count();
        let broadsides = moves
            .iter()
            .filter(|m| m.kind == MoveKind::Broadside)
            .count();
        assert_eq!(singles, 4);
        assert_eq!(broadsides, 2);
        assert!(moves
            .iter()
            .all(|m| m.cells().len() == 1 || m.kind == MoveKind::Broadside));
        let targets: HashSet<String> = moves
            .iter()
            .filter(|m| m.cells().len() == 1)
            .map(|m| {
                let to = apply_move(config.board(), &c, m);
                to.cells_string(config.board())
            })
            .collect();
        assert_eq!(
            targets,
            [".BB..GG", ".B.B.GG", "B..B.GG", "B...BGG"]
                .into_iter()
                .map(String::from)
                .collect()
        );
    }

    #[test]
    fn lone_marble_on_single_cell_board_cannot_move() {
        let board = Board::new(BoardShape::new(1, 1, 1).unwrap()).unwrap();
        let c = Constellation::parse_cells(&board, "B").unwrap();
        assert!(moves_on(&board, &c, Color::Black).is_empty());
    }

    #[test]
    fn two_on_one_push() {
        // black f,g above gray e; pushing down moves gray to d
        let (config, c) = c223("....GBB...");
        let mv = find_move(&config, &c, Color::Black, "f,g:down").unwrap();
        assert_eq!(mv.pushed, 1);
        assert!(!mv.ejects);
        let next = apply_move(config.board(), &c, &mv);
        assert_eq!(next.cells_string(config.board()), "...GBB....");
    }

    #[test]
    fn push_off_the_edge_counts_a_loss() {
        let (config, c) = c223("...GBB....");
        let mv = find_move(&config, &c, Color::Black, "e,f:down").unwrap();
        assert!(mv.ejects);
        let next = apply_move(config.board(), &c, &mv);
        assert_eq!(next.cells_string(config.board()), "...BB.....");
        assert_eq!(next.lost(Color::Gray), c.lost(Color::Gray) + 1);
        let fresh = c223("G..GBB..G.").1;
        let mv = find_move(&config, &fresh, Color::Black, "e,f:down").unwrap();
        let next = apply_move(config.board(), &fresh, &mv);
        assert_eq!(next.lost(Color::Gray), 1);
        assert_eq!(is_terminal(&next, &config), Some(Color::Black));
    }

    #[test]
    fn broadside_of_three() {
        let (config, c) = c223("BBB.......");
        let mv = find_move(&config, &c, Color::Black, "a,b,c:up-right").unwrap();
        assert_eq!(mv.kind, MoveKind::Broadside);
        let next = apply_move(config.board(), &c, &mv);
        assert_eq!(next.cells_string(config.board()), "....BBB...");
    }

    #[test]
    fn single_slide_swaps_two_cells() {
        let (config, c) = c223("G.BG..BG.B");
        let mv = find_move(&config, &c, Color::Black, "c:down").unwrap();
        let next = apply_move(config.board(), &c, &mv);
        assert_eq!(next.cells_string(config.board()), "GB.G..BG.B");
    }

    #[test]
    fn equal_lines_cannot_push_and_suicide_is_illegal() {
        let (config, c) = c223("...GGBB...");
        // 2 black (f,g) against 2 gray (d,e) below: blocked
        assert!(find_move(&config, &c, Color::Black, "f,g:down").is_err());
        // gray d,e cannot step down off the board
        assert!(find_move(&config, &c, Color::Gray, "d,e:down").is_err());
        // and a single marble never pushes
        let (config, c) = c223("....GB....");
        assert!(find_move(&config, &c, Color::Black, "f:down").is_err());
    }

    #[test]
    fn own_marble_behind_blocks_push() {
        // d black, e gray, f,g black: push down is blocked by d
        let (config, c) = c223("...BGBB...");
        assert!(find_move(&config, &c, Color::Black, "f,g:down").is_err());
    }

    #[test]
    fn three_push_two() {
        // column d..g: d empty, e f gray, g black? need 3 black: use 3,3,3
        let board = Board::new(BoardShape::new(3, 3, 3).unwrap()).unwrap();
        // centre column has 5 cells (indices 7..=11): G G B B B from bottom
        let mut cells = vec!['.'; 19];
        cells[8] = 'G';
        cells[9] = 'B';
        cells[10] = 'B';
        cells[11] = 'B';
        cells[7] = 'G';
        let s: String = cells.into_iter().collect();
        let c = Constellation::parse_cells(&board, &s).unwrap();
        let moves = moves_on(&board, &c, Color::Black);
        let push = moves
            .iter()
            .find(|m| m.direction == Direction::Down && m.cells().len() == 3)
            .expect("3 on 2 push");
        assert_eq!(push.pushed, 2);
        assert!(push.ejects);
        let next = apply_move(&board, &c, push);
        assert_eq!(next.count(Color::Gray), 1);
        assert_eq!(next.lost(Color::Gray), 1);
    }

    #[test]
    fn fork_threatens_two_marbles() {
        let (config, c) = c223(".B..BB.G.G");
        let ejecting: Vec<Move> = moves_on(config.board(), &c, Color::Black)
            .into_iter()
            .filter(|m| m.ejects)
            .collect();
        let victims: HashSet<u64> = ejecting
            .iter()
            .map(|m| c.mask(Color::Gray) & !apply_move(config.board(), &c, m).mask(Color::Gray))
            .collect();
        assert_eq!(victims.len(), 2);
        assert!(victims.contains(&cell(&config, "h").bit()));
        assert!(victims.contains(&cell(&config, "j").bit()));
    }

    #[test]
    fn terminal_detection() {
        let config = GameConfig::preset("2,2,3".parse().unwrap()).unwrap();
        assert_eq!(is_terminal(&config.initial(), &config), None);
        let c = config.initial().with_lost(0, 1);
        assert_eq!(is_terminal(&c, &config), Some(Color::Black));
        let c = config.initial().with_lost(1, 0);
        assert_eq!(is_terminal(&c, &config), Some(Color::Gray));
        let d = GameConfig::preset("2,3,3".parse().unwrap()).unwrap();
        assert_eq!(is_terminal(&d.initial().with_lost(0, 1), &d), None);
        assert_eq!(
            is_terminal(&d.initial().with_lost(0, 2), &d),
            Some(Color::Black)
        );
    }

    #[test]
    fn config_validation() {
        assert!(GameConfig::from_notation("2,2,2:GB...BG", 0).is_err());
        assert!(GameConfig::from_notation("2,2,2:GB...B.", 1).is_err());
        let config = GameConfig::preset("2,2,2".parse().unwrap()).unwrap();
        assert!(config.parse("2,2,3:G.BG..BG.B").is_err());
        assert!(config.parse("BBB.GG.").is_err());
        assert_eq!(config.parse("B....GG").unwrap().lost(Color::Black), 1);
    }

    #[test]
    fn try_apply_rejects_foreign_moves() {
        let config = GameConfig::preset("2,2,3".parse().unwrap()).unwrap();
        let c = config.initial();
        let gray_move = legal_moves(&c, Color::Gray, &config)[0];
        assert!(try_apply(&config, &c, Color::Black, &gray_move).is_err());
        let black_move = legal_moves(&c, Color::Black, &config)[0];
        assert!(try_apply(&config, &c, Color::Black, &black_move).is_ok());
    }
}
