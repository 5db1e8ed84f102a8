//! State indexing and the solved-database file format.
//!
//! A configuration's state space is every placement whose marble counts are
//! reachable without the game having ended (each side has lost fewer than
//! `K` marbles), once per side to move. Placements are ranked in
//! lexicographic order of their scan-order cell strings, so indices are
//! monotone in board notation for a fixed side to move:
//!
//! ```text
//! index = mover_offset + rank(cells)      mover_offset = 0 (black) | n (gray)
//! ```
//!
//! # File layout (little-endian)
//!
//! ```text
//! magic         4   "ABDB"
//! version       u16
//! flags         u16   bit 0: distance array present
//! shape         3×u8  a, b, c
//! k             u8
//! marbles       u8    per side at the start
//! cell_count    u8
//! reserved      2
//! initial       2×u64 black mask, gray mask
//! state_count   u64
//! stalemates    u64
//! values        ceil(state_count / 4) bytes, 2 bits per state, LSB first
//! distances     state_count × u16 (when flagged)
//! checksum      u32   CRC-32 of every preceding byte
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::geometry::{Board, BoardShape};
use crate::rules::{Color, Constellation, GameConfig, RulesError};
use crate::solver::SolvedDatabase;

pub const MAGIC: &[u8; 4] = b"ABDB";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 4 + 2 + 2 + 3 + 1 + 1 + 1 + 2 + 16 + 8 + 8;
pub const FLAG_DISTANCES: u16 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("state {0} is outside this configuration's state space")]
    OutOfSpace(String),
    #[error("state index {0} out of range (space has {1} states)")]
    IndexOutOfRange(u64, u64),
    #[error("state space of {0} states does not fit the index")]
    Overflow(u128),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a solved database (bad magic)")]
    BadMagic,
    #[error("unsupported database format version {0}")]
    Version(u16),
    #[error("database is truncated or corrupt: {0}")]
    Integrity(String),
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("database is for {found}, expected {expected}")]
    Mismatch { found: String, expected: String },
    #[error(transparent)]
    Rules(#[from] RulesError),
}

/// Position of a (constellation, side to move) pair in a state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateIndex(pub u64);

/// Ranking and unranking of one configuration's states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    cells: usize,
    marbles: usize,
    min_on_board: usize,
    /// `completions[(i, b, g)]`: number of ways to fill cells `i..` given
    /// `b` black and `g` gray marbles already placed, ending in an allowed
    /// marble count.
    completions: Vec<u64>,
    stride: usize,
    per_mover: u64,
}

impl StateSpace {
    pub fn new(cells: usize, marbles: usize, k: usize) -> Result<Self, StoreError> {
        let min_on_board = marbles.saturating_sub(k.saturating_sub(1));
        let stride = marbles + 2;
        let at = |i: usize, b: usize, g: usize| (i * stride + b) * stride + g;
        let mut completions = vec![0u64; (cells + 1) * stride * stride];
        for b in 0..=marbles {
            for g in 0..=marbles {
                if b >= min_on_board && g >= min_on_board && b + g <= cells {
                    completions[at(cells, b, g)] = 1;
                }
            }
        }
        for i in (0..cells).rev() {
            for b in 0..=marbles {
                for g in 0..=marbles {
                    let total = completions[at(i + 1, b, g)] as u128
                        + completions[at(i + 1, b + 1, g)] as u128
                        + completions[at(i + 1, b, g + 1)] as u128;
                    if total > u64::MAX as u128 / 2 {
                        return Err(StoreError::Overflow(total));
                    }
                    completions[at(i, b, g)] = total as u64;
                }
            }
        }
        let per_mover = completions[at(0, 0, 0)];
        Ok(Self {
            cells,
            marbles,
            min_on_board,
            completions,
            stride,
            per_mover,
        })
    }

    pub fn for_config(config: &GameConfig) -> Result<Self, StoreError> {
        Self::new(
            config.board().cell_count(),
            config.marbles() as usize,
            config.k() as usize,
        )
    }

    /// Constellations per side to move.
    pub fn constellations(&self) -> u64 {
        self.per_mover
    }

    /// Total number of indexed states (both sides to move).
    pub fn len(&self) -> u64 {
        2 * self.per_mover
    }

    pub fn is_empty(&self) -> bool {
        self.per_mover == 0
    }

    #[inline]
    fn completions_at(&self, i: usize, b: usize, g: usize) -> u64 {
        self.completions[(i * self.stride + b) * self.stride + g]
    }

    #[inline]
    pub(crate) fn mover_offset(&self, mover: Color) -> u64 {
        match mover {
            Color::Black => 0,
            Color::Gray => self.per_mover,
        }
    }

    #[inline]
    pub(crate) fn mover_of(&self, index: u64) -> Color {
        if index < self.per_mover {
            Color::Black
        } else {
            Color::Gray
        }
    }

    /// True when the marble counts belong to this space.
    #[inline]
    pub fn contains_counts(&self, black: usize, gray: usize) -> bool {
        black <= self.marbles
            && gray <= self.marbles
            && black >= self.min_on_board
            && gray >= self.min_on_board
            && black + gray <= self.cells
    }

    /// Lexicographic rank of a placement. Counts must be in the space.
    #[inline]
    pub(crate) fn rank_masks(&self, black: u64, gray: u64) -> u64 {
        let mut rank = 0u64;
        let (mut b, mut g) = (0usize, 0usize);
        let mut occupied = black | gray;
        while occupied != 0 {
            let i = occupied.trailing_zeros() as usize;
            occupied &= occupied - 1;
            // every string with '.' here sorts first
            rank += self.completions_at(i + 1, b, g);
            if black & (1u64 << i) != 0 {
                b += 1;
            } else {
                rank += self.completions_at(i + 1, b + 1, g);
                g += 1;
            }
        }
        rank
    }

    #[inline]
    pub(crate) fn unrank_masks(&self, mut rank: u64) -> (u64, u64) {
        let (mut black, mut gray) = (0u64, 0u64);
        let (mut b, mut g) = (0usize, 0usize);
        for i in 0..self.cells {
            let empty = self.completions_at(i + 1, b, g);
            if rank < empty {
                continue;
            }
            rank -= empty;
            let with_black = self.completions_at(i + 1, b + 1, g);
            if rank < with_black {
                black |= 1u64 << i;
                b += 1;
            } else {
                rank -= with_black;
                gray |= 1u64 << i;
                g += 1;
            }
        }
        (black, gray)
    }

    pub fn index(&self, c: &Constellation, to_move: Color) -> Result<StateIndex, StoreError> {
        let (black, gray) = (c.mask(Color::Black), c.mask(Color::Gray));
        let full = if self.cells == 64 {
            u64::MAX
        } else {
            (1u64 << self.cells) - 1
        };
        if (black | gray) & !full != 0
            || !self.contains_counts(black.count_ones() as usize, gray.count_ones() as usize)
        {
            return Err(StoreError::OutOfSpace(format!(
                "{} black / {} gray",
                black.count_ones(),
                gray.count_ones()
            )));
        }
        Ok(StateIndex(
            self.mover_offset(to_move) + self.rank_masks(black, gray),
        ))
    }

    /// Inverse of [`index`](Self::index); lost counts are filled in from
    /// the marble counts.
    pub fn unrank(&self, index: StateIndex) -> Result<(Constellation, Color), StoreError> {
        if index.0 >= self.len() {
            return Err(StoreError::IndexOutOfRange(index.0, self.len()));
        }
        let mover = self.mover_of(index.0);
        let (black, gray) = self.unrank_masks(index.0 - self.mover_offset(mover));
        let lost = |m: u64| (self.marbles - m.count_ones() as usize) as u8;
        let c = Constellation::from_masks(black, gray).with_lost(lost(black), lost(gray));
        Ok((c, mover))
    }
}

/// 2-bit outcome codes stored per state.
pub(crate) const CODE_DRAW: u8 = 0;
pub(crate) const CODE_BLACK: u8 = 1;
pub(crate) const CODE_GRAY: u8 = 2;

pub(crate) fn packed_len(states: u64) -> usize {
    states.div_ceil(4) as usize
}

#[inline]
pub(crate) fn get_code(packed: &[u8], i: u64) -> u8 {
    (packed[(i / 4) as usize] >> ((i % 4) * 2)) & 3
}

#[inline]
pub(crate) fn set_code(packed: &mut [u8], i: u64, code: u8) {
    let byte = &mut packed[(i / 4) as usize];
    let shift = (i % 4) * 2;
    *byte = (*byte & !(3 << shift)) | (code << shift);
}

struct CrcWriter<W: Write> {
    inner: W,
    hasher: crc32fast::Hasher,
}

impl<W: Write> Write for CrcWriter<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Writes `db` to `path`.
pub fn save(db: &SolvedDatabase, path: impl AsRef<Path>) -> Result<(), StoreError> {
    let file = File::create(path)?;
    let mut out = CrcWriter {
        inner: BufWriter::new(file),
        hasher: crc32fast::Hasher::new(),
    };
    let config = db.config();
    let (a, b, c) = config.shape().sides();
    let initial = config.initial();
    let flags = if db.distances_raw().is_some() {
        FLAG_DISTANCES
    } else {
        0
    };
    out.write_all(MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&flags.to_le_bytes())?;
    out.write_all(&[
        a as u8,
        b as u8,
        c as u8,
        config.k(),
        config.marbles(),
        config.board().cell_count() as u8,
        0,
        0,
    ])?;
    out.write_all(&initial.mask(Color::Black).to_le_bytes())?;
    out.write_all(&initial.mask(Color::Gray).to_le_bytes())?;
    out.write_all(&db.space().len().to_le_bytes())?;
    out.write_all(&db.stalemates().to_le_bytes())?;
    out.write_all(db.values_raw())?;
    if let Some(distances) = db.distances_raw() {
        let mut buf = Vec::with_capacity(1 << 16);
        for chunk in distances.chunks(1 << 15) {
            buf.clear();
            for d in chunk {
                buf.extend_from_slice(&d.to_le_bytes());
            }
            out.write_all(&buf)?;
        }
    }
    let checksum = out.hasher.clone().finalize();
    out.inner.write_all(&checksum.to_le_bytes())?;
    out.inner.flush()?;
    Ok(())
}

/// Reads a database, validating magic, version and checksum.
pub fn load(path: impl AsRef<Path>) -> Result<SolvedDatabase, StoreError> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode(&bytes)
}

/// Like [`load`], failing unless the file matches `shape` and `k`.
pub fn load_expecting(
    path: impl AsRef<Path>,
    shape: BoardShape,
    k: u8,
) -> Result<SolvedDatabase, StoreError> {
    let db = load(path)?;
    if db.config().shape() != shape || db.config().k() != k {
        return Err(StoreError::Mismatch {
            found: format!("{} K={}", db.config().shape(), db.config().k()),
            expected: format!("{shape} K={k}"),
        });
    }
    Ok(db)
}

fn decode(bytes: &[u8]) -> Result<SolvedDatabase, StoreError> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(StoreError::BadMagic);
    }
    if bytes.len() < HEADER_LEN + 4 {
        return Err(StoreError::Integrity("header is truncated".into()));
    }
    let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let version = u16_at(4);
    if version != FORMAT_VERSION {
        return Err(StoreError::Version(version));
    }
    let flags = u16_at(6);
    let (a, b, c, k, marbles, cells) = (
        bytes[8], bytes[9], bytes[10], bytes[11], bytes[12], bytes[13],
    );
    let initial_black = u64_at(16);
    let initial_gray = u64_at(24);
    let states = u64_at(32);
    let stalemates = u64_at(40);

    let values_len = packed_len(states);
    let distances_len = if flags & FLAG_DISTANCES != 0 {
        states as usize * 2
    } else {
        0
    };
    let expected_len = HEADER_LEN + values_len + distances_len + 4;
    if bytes.len() != expected_len {
        return Err(StoreError::Integrity(format!(
            "expected {expected_len} bytes, found {}",
            bytes.len()
        )));
    }
    let body = &bytes[..expected_len - 4];
    let stored = u32::from_le_bytes(bytes[expected_len - 4..].try_into().expect("4 bytes"));
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(StoreError::Checksum { stored, computed });
    }

    let shape = BoardShape::new(a as i64, b as i64, c as i64)
        .map_err(|e| StoreError::Integrity(e.to_string()))?;
    let board = Board::new(shape).map_err(|e| StoreError::Integrity(e.to_string()))?;
    if board.cell_count() != cells as usize {
        return Err(StoreError::Integrity(format!(
            "cell count {cells} does not match board {shape}"
        )));
    }
    let initial = Constellation::from_masks(initial_black, initial_gray);
    let config = GameConfig::new(board, k, initial)?;
    if config.marbles() != marbles {
        return Err(StoreError::Integrity(format!(
            "header records {marbles} marbles, initial position has {}",
            config.marbles()
        )));
    }
    let space = StateSpace::for_config(&config)?;
    if space.len() != states {
        return Err(StoreError::Integrity(format!(
            "state count {states} does not match the configuration ({})",
            space.len()
        )));
    }
    let values = body[HEADER_LEN..HEADER_LEN + values_len].to_vec();
    if (0..states).any(|i| get_code(&values, i) == 3) {
        return Err(StoreError::Integrity("invalid value code".into()));
    }
    let distances = (distances_len > 0).then(|| {
        body[HEADER_LEN + values_len..]
            .chunks_exact(2)
            .map(|p| u16::from_le_bytes([p[0], p[1]]))
            .collect()
    });
    Ok(SolvedDatabase::from_parts(
        config, space, values, distances, stalemates,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn space_sizes() {
        assert_eq!(StateSpace::new(7, 2, 1).unwrap().len(), 420);
        assert_eq!(StateSpace::new(10, 3, 1).unwrap().len(), 8400);
        assert_eq!(
            StateSpace::new(10, 3, 1).unwrap().constellations(),
            binomial(10, 3) * binomial(7, 3)
        );
        // 2,3,3 with K=2: strata (5,5), (4,5), (5,4), (4,4) on 14 cells
        let strata = |b: u64, g: u64| binomial(14, b) * binomial(14 - b, g);
        assert_eq!(
            StateSpace::new(14, 5, 2).unwrap().constellations(),
            strata(5, 5) + 2 * strata(4, 5) + strata(4, 4)
        );
    }

    #[test]
    fn all_indices_distinct_and_round_trip() {
        let space = StateSpace::new(7, 2, 1).unwrap();
        let mut seen = HashSet::new();
        for i in 0..space.len() {
            let (c, mover) = space.unrank(StateIndex(i)).unwrap();
            assert_eq!(space.index(&c, mover).unwrap(), StateIndex(i));
            assert!(seen.insert((c, mover)));
        }
        assert_eq!(seen.len(), 420);
        assert!(space.unrank(StateIndex(420)).is_err());
    }

    #[test]
    fn rank_is_lexicographic() {
        let board = Board::new("2,2,3".parse().unwrap()).unwrap();
        let space = StateSpace::new(10, 3, 2).unwrap();
        let mut prev: Option<String> = None;
        for i in 0..space.constellations() {
            let (c, _) = space.unrank(StateIndex(i)).unwrap();
            let s = c.cells_string(&board);
            if let Some(p) = &prev {
                assert!(p < &s, "{p} !< {s}");
            }
            prev = Some(s);
        }
    }

    #[test]
    fn out_of_space_states_are_rejected() {
        let space = StateSpace::new(7, 2, 1).unwrap();
        let c = Constellation::from_masks(0b1, 0b110);
        assert!(matches!(
            space.index(&c, Color::Black),
            Err(StoreError::OutOfSpace(_))
        ));
    }
}
