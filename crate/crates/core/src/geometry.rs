//! Hexagonal boards with side lengths `(a, b, c, a, b, c)`.
//!
//! Cells live on a triangular lattice addressed by axial coordinates
//! `(x, y)` (the third cube coordinate is `-x - y`). A board is the set of
//! lattice points satisfying
//!
//! ```text
//! 0 <= x <= q + r - 2
//! 0 <= y <= p + r - 2
//! r - 1 <= x + y <= p + q + r - 3
//! ```
//!
//! where `(p, q, r)` are the side lengths in drawing order: `p` is the
//! vertical left/right side, `q` the upper-left side and `r` the upper-right
//! side. Cells are drawn in vertical columns (constant `x`), and the scan
//! order runs columns left to right and cells bottom to top within a column.
//!
//! The drawing order is normalized so that a shape with exactly two equal
//! sides puts the odd side vertical. This makes `2,2,3` a board of three
//! columns (3, 4, 3 cells) and `2,3,3` a board of five columns
//! (2, 3, 4, 3, 2 cells).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported cell count; constellations are stored as 64-bit masks.
pub const MAX_CELLS: usize = 64;

const NO_CELL: u8 = u8::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("side lengths must be positive, got {a},{b},{c}")]
    NonPositiveSide { a: i64, b: i64, c: i64 },
    #[error("board {0} has {1} cells, more than the supported {MAX_CELLS}")]
    TooManyCells(BoardShape, usize),
    #[error("cannot parse board shape {0:?}, expected \"a,b,c\"")]
    Parse(String),
}

/// Side lengths of a hexagonal board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoardShape {
    a: u8,
    b: u8,
    c: u8,
}

impl BoardShape {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self, GeometryError> {
        if a < 1 || b < 1 || c < 1 || a > 32 || b > 32 || c > 32 {
            return Err(GeometryError::NonPositiveSide { a, b, c });
        }
        Ok(Self {
            a: a as u8,
            b: b as u8,
            c: c as u8,
        })
    }

    pub fn sides(self) -> (usize, usize, usize) {
        (self.a as usize, self.b as usize, self.c as usize)
    }

    /// `ab + bc + ca - a - b - c + 1`.
    pub fn cell_count(self) -> usize {
        let (a, b, c) = self.sides();
        a * b + b * c + c * a - a - b - c + 1
    }

    /// Side lengths in drawing order (vertical, upper-left, upper-right).
    fn layout(self) -> (i32, i32, i32) {
        let (a, b, c) = (self.a as i32, self.b as i32, self.c as i32);
        // The odd side out, if any, is drawn vertically.
        if a == b && b != c {
            (c, a, b)
        } else if a == c && b != c {
            (b, a, c)
        } else {
            (a, b, c)
        }
    }
}

impl fmt::Display for BoardShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

impl FromStr for BoardShape {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split([',', 'x']).collect();
        if parts.len() != 3 {
            return Err(GeometryError::Parse(s.to_string()));
        }
        let mut sides = [0i64; 3];
        for (slot, part) in sides.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| GeometryError::Parse(s.to_string()))?;
        }
        Self::new(sides[0], sides[1], sides[2])
    }
}

/// Index of a cell in scan order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell(pub u8);

impl Cell {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn bit(self) -> u64 {
        1u64 << self.0
    }
}

/// One of the six lattice directions, in counter-clockwise order starting
/// straight up. `opposite` is `+3 mod 6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Direction {
    Up = 0,
    UpLeft = 1,
    DownLeft = 2,
    Down = 3,
    DownRight = 4,
    UpRight = 5,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::Up,
        Direction::UpLeft,
        Direction::DownLeft,
        Direction::Down,
        Direction::DownRight,
        Direction::UpRight,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Direction {
        Self::ALL[i % 6]
    }

    #[inline]
    pub fn opposite(self) -> Direction {
        Self::from_index(self.index() + 3)
    }

    /// True when `other` is this direction or its opposite.
    #[inline]
    pub fn is_parallel(self, other: Direction) -> bool {
        self.index() % 3 == other.index() % 3
    }

    /// Axial step `(dx, dy)`.
    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::Up => (0, 1),
            Direction::UpLeft => (-1, 1),
            Direction::DownLeft => (-1, 0),
            Direction::Down => (0, -1),
            Direction::DownRight => (1, -1),
            Direction::UpRight => (1, 0),
        }
    }

    fn from_delta(d: (i32, i32)) -> Option<Direction> {
        Self::ALL.into_iter().find(|dir| dir.delta() == d)
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::UpLeft => "up-left",
            Direction::DownLeft => "down-left",
            Direction::Down => "down",
            Direction::DownRight => "down-right",
            Direction::UpRight => "up-right",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|d| d.name() == lower || d.short() == lower)
            .ok_or_else(|| format!("unknown direction {s:?}"))
    }
}

impl Direction {
    pub fn short(self) -> &'static str {
        match self {
            Direction::Up => "u",
            Direction::UpLeft => "ul",
            Direction::DownLeft => "dl",
            Direction::Down => "d",
            Direction::DownRight => "dr",
            Direction::UpRight => "ur",
        }
    }
}

/// Plane isometry of the triangular lattice, as an element of the dihedral
/// group of order 12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Isometry {
    /// Counter-clockwise rotation by `60° * k`.
    Rotation(u8),
    /// Reflection composed with rotation by `60° * k`.
    Reflection(u8),
}

/// Linear part of a lattice isometry acting on cube coordinates: output
/// coordinate `i` is `sign * input[perm[i]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CubeMap {
    perm: [usize; 3],
    sign: i32,
}

impl CubeMap {
    const IDENTITY: CubeMap = CubeMap {
        perm: [0, 1, 2],
        sign: 1,
    };
    // (x, y, z) -> (-z, -x, -y)
    const ROTATE: CubeMap = CubeMap {
        perm: [2, 0, 1],
        sign: -1,
    };
    // (x, y, z) -> (y, x, z)
    const REFLECT: CubeMap = CubeMap {
        perm: [1, 0, 2],
        sign: 1,
    };

    fn apply(self, v: [i32; 3]) -> [i32; 3] {
        [
            self.sign * v[self.perm[0]],
            self.sign * v[self.perm[1]],
            self.sign * v[self.perm[2]],
        ]
    }

    /// `self ∘ inner`
    fn after(self, inner: CubeMap) -> CubeMap {
        CubeMap {
            perm: [
                inner.perm[self.perm[0]],
                inner.perm[self.perm[1]],
                inner.perm[self.perm[2]],
            ],
            sign: self.sign * inner.sign,
        }
    }

    fn apply_axial(self, (x, y): (i32, i32)) -> (i32, i32) {
        let [x2, y2, _] = self.apply([x, y, -x - y]);
        (x2, y2)
    }
}

/// All 12 isometries of the regular hexagon, rotations first.
fn dihedral_group() -> Vec<(Isometry, CubeMap)> {
    let mut out = Vec::with_capacity(12);
    let mut rot = CubeMap::IDENTITY;
    for k in 0..6u8 {
        out.push((Isometry::Rotation(k), rot));
        rot = CubeMap::ROTATE.after(rot);
    }
    let mut rot = CubeMap::IDENTITY;
    for k in 0..6u8 {
        out.push((Isometry::Reflection(k), rot.after(CubeMap::REFLECT)));
        rot = CubeMap::ROTATE.after(rot);
    }
    out
}

/// A symmetry of a particular board, stored as a cell permutation plus the
/// induced direction permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symmetry {
    isometry: Isometry,
    perm: Vec<u8>,
    dirs: [Direction; 6],
}

impl Symmetry {
    pub fn isometry(&self) -> Isometry {
        self.isometry
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    #[inline]
    pub fn map_cell(&self, cell: Cell) -> Cell {
        Cell(self.perm[cell.index()])
    }

    #[inline]
    pub fn map_direction(&self, dir: Direction) -> Direction {
        self.dirs[dir.index()]
    }

    pub fn permutation(&self) -> &[u8] {
        &self.perm
    }

    /// Image of a cell bitmask.
    #[inline]
    pub fn map_mask(&self, mut mask: u64) -> u64 {
        let mut out = 0u64;
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            out |= 1u64 << self.perm[i];
        }
        out
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Symmetry) -> Symmetry {
        let perm = inner.perm.iter().map(|&p| self.perm[p as usize]).collect();
        let mut dirs = [Direction::Up; 6];
        for d in Direction::ALL {
            dirs[d.index()] = self.map_direction(inner.map_direction(d));
        }
        Symmetry {
            isometry: self.isometry,
            perm,
            dirs,
        }
    }

    pub fn inverse(&self) -> Symmetry {
        let mut perm = vec![0u8; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p as usize] = i as u8;
        }
        let mut dirs = [Direction::Up; 6];
        for d in Direction::ALL {
            dirs[self.map_direction(d).index()] = d;
        }
        Symmetry {
            isometry: self.isometry,
            perm,
            dirs,
        }
    }

    /// Same action on cells (the isometry label is not compared).
    pub fn same_action(&self, other: &Symmetry) -> bool {
        self.perm == other.perm
    }
}

/// An immutable board: cell set, adjacency and symmetry group.
#[derive(Debug, Clone)]
pub struct Board {
    shape: BoardShape,
    coords: Vec<(i32, i32)>,
    neighbors: Vec<[u8; 6]>,
    symmetries: Vec<Symmetry>,
    full_mask: u64,
}

impl PartialEq for Board {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape
    }
}

impl Eq for Board {}

impl Board {
    pub fn new(shape: BoardShape) -> Result<Board, GeometryError> {
        let (p, q, r) = shape.layout();
        let mut coords = Vec::new();
        for x in 0..=(q + r - 2) {
            for y in 0..=(p + r - 2) {
                let s = x + y;
                if s >= r - 1 && s <= p + q + r - 3 {
                    coords.push((x, y));
                }
            }
        }
        if coords.len() > MAX_CELLS {
            return Err(GeometryError::TooManyCells(shape, coords.len()));
        }
        debug_assert_eq!(coords.len(), shape.cell_count());

        let lookup = |pt: (i32, i32)| coords.iter().position(|&c| c == pt);
        let neighbors = coords
            .iter()
            .map(|&(x, y)| {
                let mut row = [NO_CELL; 6];
                for d in Direction::ALL {
                    let (dx, dy) = d.delta();
                    if let Some(j) = lookup((x + dx, y + dy)) {
                        row[d.index()] = j as u8;
                    }
                }
                row
            })
            .collect();

        let full_mask = if coords.len() == 64 {
            u64::MAX
        } else {
            (1u64 << coords.len()) - 1
        };
        let mut board = Board {
            shape,
            coords,
            neighbors,
            symmetries: Vec::new(),
            full_mask,
        };
        board.symmetries = board.find_symmetries();
        Ok(board)
    }

    /// Filters the 12 hexagon isometries down to those mapping this cell set
    /// onto itself (after re-centering by a lattice translation).
    fn find_symmetries(&self) -> Vec<Symmetry> {
        let origin = *self.coords.iter().min().expect("board has cells");
        let mut out = Vec::new();
        for (isometry, map) in dihedral_group() {
            let image: Vec<(i32, i32)> = self.coords.iter().map(|&c| map.apply_axial(c)).collect();
            let img_min = *image.iter().min().expect("board has cells");
            let shift = (origin.0 - img_min.0, origin.1 - img_min.1);
            let perm: Option<Vec<u8>> = image
                .iter()
                .map(|&(x, y)| {
                    self.coords
                        .iter()
                        .position(|&c| c == (x + shift.0, y + shift.1))
                        .map(|j| j as u8)
                })
                .collect();
            let Some(perm) = perm else { continue };
            let mut dirs = [Direction::Up; 6];
            for d in Direction::ALL {
                dirs[d.index()] = Direction::from_delta(map.apply_axial(d.delta()))
                    .expect("lattice isometries map unit steps to unit steps");
            }
            out.push(Symmetry {
                isometry,
                perm,
                dirs,
            });
        }
        out
    }

    pub fn shape(&self) -> BoardShape {
        self.shape
    }

    pub fn cell_count(&self) -> usize {
        self.coords.len()
    }

    /// Mask with one bit set per cell.
    pub fn full_mask(&self) -> u64 {
        self.full_mask
    }

    /// Cells in scan order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.coords.len()).map(|i| Cell(i as u8))
    }

    #[inline]
    pub fn neighbor(&self, cell: Cell, dir: Direction) -> Option<Cell> {
        let n = self.neighbors[cell.index()][dir.index()];
        (n != NO_CELL).then_some(Cell(n))
    }

    /// Raw neighbour table entry; `u8::MAX` means off-board.
    #[inline]
    pub(crate) fn neighbor_raw(&self, cell: usize, dir: usize) -> u8 {
        self.neighbors[cell][dir]
    }

    pub fn neighbor_count(&self, cell: Cell) -> usize {
        self.neighbors[cell.index()]
            .iter()
            .filter(|&&n| n != NO_CELL)
            .count()
    }

    /// Axial coordinates `(x, y)` of a cell.
    pub fn axial(&self, cell: Cell) -> (i32, i32) {
        self.coords[cell.index()]
    }

    /// Drawing position: column index and height in half-cell units
    /// (`2y + x`), both increasing right and up.
    pub fn column_and_height(&self, cell: Cell) -> (i32, i32) {
        let (x, y) = self.coords[cell.index()];
        (x, 2 * y + x)
    }

    /// Letter label in scan order (`a`, `b`, ...), the usual labelling of
    /// small boards.
    pub fn label(&self, cell: Cell) -> String {
        let i = cell.index();
        if i < 26 {
            ((b'a' + i as u8) as char).to_string()
        } else {
            format!("c{i}")
        }
    }

    pub fn cell_by_label(&self, label: &str) -> Option<Cell> {
        self.cells().find(|&c| self.label(c) == label)
    }

    pub fn symmetry_group(&self) -> &[Symmetry] {
        &self.symmetries
    }

    pub fn identity(&self) -> &Symmetry {
        self.symmetries
            .iter()
            .find(|s| s.isometry == Isometry::Rotation(0))
            .expect("identity is always a symmetry")
    }

    /// The half-turn, when the board has one (every (a,b,c) hexagon does).
    pub fn half_turn(&self) -> Option<&Symmetry> {
        self.symmetries
            .iter()
            .find(|s| s.isometry == Isometry::Rotation(3))
    }

    /// True when the three cells lie on one lattice line.
    pub fn collinear(&self, a: Cell, b: Cell, c: Cell) -> bool {
        let (ax, ay) = self.axial(a);
        let (bx, by) = self.axial(b);
        let (cx, cy) = self.axial(c);
        let (ux, uy, uz) = (bx - ax, by - ay, -(bx - ax) - (by - ay));
        let (vx, vy, vz) = (cx - ax, cy - ay, -(cx - ax) - (cy - ay));
        // lattice lines keep one cube coordinate fixed
        (ux == 0 && vx == 0) || (uy == 0 && vy == 0) || (uz == 0 && vz == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn board(a: i64, b: i64, c: i64) -> Board {
        Board::new(BoardShape::new(a, b, c).unwrap()).unwrap()
    }

    #[test]
    fn cell_counts() {
        assert_eq!(board(2, 2, 2).cell_count(), 7);
        assert_eq!(board(2, 2, 3).cell_count(), 10);
        assert_eq!(board(3, 3, 3).cell_count(), 19);
        assert_eq!(board(2, 3, 3).cell_count(), 14);
        assert_eq!(board(5, 5, 5).cell_count(), 61);
        let single = board(1, 1, 1);
        assert_eq!(single.cell_count(), 1);
        assert_eq!(single.neighbor_count(Cell(0)), 0);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(BoardShape::new(0, 2, 2).is_err());
        assert!(BoardShape::new(2, -1, 2).is_err());
        assert!("2,2".parse::<BoardShape>().is_err());
        assert!("2,x,2".parse::<BoardShape>().is_err());
        let big = BoardShape::new(6, 6, 6).unwrap();
        assert!(matches!(
            Board::new(big),
            Err(GeometryError::TooManyCells(_, 91))
        ));
    }

    #[test]
    fn shape_round_trips_through_text() {
        let s: BoardShape = "2,2,3".parse().unwrap();
        assert_eq!(s.to_string(), "2,2,3");
        assert_eq!("3x3x3".parse::<BoardShape>().unwrap().cell_count(), 19);
    }

    #[test]
    fn column_layout_matches_drawings() {
        let heights = |b: &Board| {
            let mut cols: Vec<usize> = Vec::new();
            for c in b.cells() {
                let (x, _) = b.column_and_height(c);
                if cols.len() <= x as usize {
                    cols.push(0);
                }
                cols[x as usize] += 1;
            }
            cols
        };
        assert_eq!(heights(&board(2, 2, 2)), vec![2, 3, 2]);
        assert_eq!(heights(&board(2, 2, 3)), vec![3, 4, 3]);
        assert_eq!(heights(&board(3, 2, 2)), vec![3, 4, 3]);
        assert_eq!(heights(&board(2, 3, 3)), vec![2, 3, 4, 3, 2]);
        assert_eq!(heights(&board(3, 3, 3)), vec![3, 4, 5, 4, 3]);
    }

    #[test]
    fn scan_order_is_column_major_bottom_to_top() {
        let b = board(2, 2, 3);
        let pts: Vec<_> = b.cells().map(|c| b.column_and_height(c)).collect();
        let mut sorted = pts.clone();
        sorted.sort();
        assert_eq!(pts, sorted);
        // e and f are the two middle cells of the centre column
        assert_eq!(b.column_and_height(b.cell_by_label("e").unwrap()).0, 1);
        assert_eq!(b.column_and_height(b.cell_by_label("f").unwrap()).0, 1);
    }

    #[test]
    fn neighbors_are_symmetric_and_bounded() {
        for shape in [(2, 2, 2), (2, 2, 3), (2, 3, 3), (3, 3, 3), (5, 5, 5)] {
            let b = board(shape.0, shape.1, shape.2);
            for cell in b.cells() {
                let n = b.neighbor_count(cell);
                assert!((2..=6).contains(&n), "{shape:?} cell {cell:?} has {n}");
                for d in Direction::ALL {
                    if let Some(m) = b.neighbor(cell, d) {
                        assert_eq!(b.neighbor(m, d.opposite()), Some(cell));
                    }
                }
            }
        }
    }

    #[test]
    fn group_orders() {
        for a in 1..=4 {
            for b in 1..=4 {
                for c in 1..=4 {
                    let order = board(a, b, c).symmetry_group().len();
                    let expected = if a == b && b == c {
                        12
                    } else if a == b || b == c || a == c {
                        4
                    } else {
                        2
                    };
                    assert_eq!(order, expected, "shape {a},{b},{c}");
                }
            }
        }
    }

    #[test]
    fn group_axioms() {
        for shape in [(2, 2, 2), (2, 2, 3), (2, 3, 3), (2, 3, 4)] {
            let b = board(shape.0, shape.1, shape.2);
            let g = b.symmetry_group();
            assert!(g.iter().any(Symmetry::is_identity));
            for s in g {
                assert!(g.iter().any(|t| t.same_action(&s.inverse())));
                assert!(s.compose(&s.inverse()).is_identity());
                for t in g {
                    let st = s.compose(t);
                    assert!(g.iter().any(|u| u.same_action(&st)));
                }
            }
        }
    }

    #[test]
    fn symmetries_preserve_adjacency_and_lines() {
        for shape in [(2, 2, 2), (2, 2, 3), (3, 3, 3)] {
            let b = board(shape.0, shape.1, shape.2);
            for s in b.symmetry_group() {
                for cell in b.cells() {
                    for d in Direction::ALL {
                        let img = b.neighbor(cell, d).map(|n| s.map_cell(n));
                        assert_eq!(img, b.neighbor(s.map_cell(cell), s.map_direction(d)));
                    }
                }
                let cells: Vec<Cell> = b.cells().collect();
                for &x in &cells {
                    for &y in &cells {
                        for &z in &cells {
                            if x != y && y != z && x != z && b.collinear(x, y, z) {
                                assert!(b.collinear(s.map_cell(x), s.map_cell(y), s.map_cell(z)));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn direction_negation() {
        for d in Direction::ALL {
            assert_eq!(d.opposite().opposite(), d);
            assert_ne!(d.opposite(), d);
            assert!(d.is_parallel(d.opposite()));
            let (dx, dy) = d.delta();
            assert_eq!(d.opposite().delta(), (-dx, -dy));
            assert_eq!(d.name().parse::<Direction>().unwrap(), d);
        }
    }
}
