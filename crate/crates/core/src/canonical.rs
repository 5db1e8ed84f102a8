//! Isomorphism classes of constellations.
//!
//! Two constellations are isomorphic when a symmetry of the board maps one
//! onto the other. The canonical form of a constellation is the
//! lexicographically smallest scan-order string in its orbit (optionally
//! also ranging over the colour-swapped orbit).

use std::collections::BTreeSet;
use std::fmt;

use crate::geometry::{Board, Symmetry};
use crate::rules::{
    apply_move, legal_moves, Color, Constellation, Content, GameConfig, RulesError,
};

/// Swaps black and gray, including lost counts.
pub fn negate(c: &Constellation) -> Constellation {
    c.negated()
}

/// Image of `c` under a board symmetry. Lost counts are unchanged.
pub fn transform(c: &Constellation, symmetry: &Symmetry) -> Constellation {
    Constellation::from_masks(
        symmetry.map_mask(c.mask(Color::Black)),
        symmetry.map_mask(c.mask(Color::Gray)),
    )
    .with_lost(c.lost(Color::Black), c.lost(Color::Gray))
}

/// Minimal scan-order key over an orbit. Compare forms only when they come
/// from the same board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(u128);

impl CanonicalForm {
    pub fn key(self) -> u128 {
        self.0
    }

    /// The representative constellation (lost counts zero).
    pub fn constellation(self, board: &Board) -> Constellation {
        let mut key = self.0;
        let n = board.cell_count();
        let mut c = Constellation::empty();
        for i in (0..n).rev() {
            let content = match key % 3 {
                0 => Content::Empty,
                1 => Content::Black,
                _ => Content::Gray,
            };
            key /= 3;
            c = c.with(crate::geometry::Cell(i as u8), content);
        }
        c
    }

    pub fn notation(self, board: &Board) -> String {
        self.constellation(board).notation(board)
    }

    /// A displayable wrapper carrying the board.
    pub fn display(self, board: &Board) -> impl fmt::Display + '_ {
        struct Shown<'a>(CanonicalForm, &'a Board);
        impl fmt::Display for Shown<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.notation(self.1))
            }
        }
        Shown(self, board)
    }
}

#[inline]
fn key_of(black: u64, gray: u64, cells: usize) -> u128 {
    let mut key = 0u128;
    for i in 0..cells {
        let bit = 1u64 << i;
        key = key * 3
            + if black & bit != 0 {
                1
            } else if gray & bit != 0 {
                2
            } else {
                0
            };
    }
    key
}

pub fn canonicalize(board: &Board, c: &Constellation, identify_negation: bool) -> CanonicalForm {
    let n = board.cell_count();
    let (black, gray) = (c.mask(Color::Black), c.mask(Color::Gray));
    let mut best = u128::MAX;
    for s in board.symmetry_group() {
        let (b, g) = (s.map_mask(black), s.map_mask(gray));
        best = best.min(key_of(b, g, n));
        if identify_negation {
            best = best.min(key_of(g, b, n));
        }
    }
    CanonicalForm(best)
}

pub fn is_isomorphic(board: &Board, a: &Constellation, b: &Constellation) -> bool {
    canonicalize(board, a, false) == canonicalize(board, b, false)
}

/// Isomorphic to its own negative.
pub fn is_self_negative(board: &Board, c: &Constellation) -> bool {
    canonicalize(board, c, false) == canonicalize(board, &negate(c), false)
}

/// Canonical forms of every distinct successor of `c` for `mover`.
pub fn options_up_to_isomorphism(
    c: &Constellation,
    mover: Color,
    config: &GameConfig,
) -> BTreeSet<CanonicalForm> {
    let board = config.board();
    legal_moves(c, mover, config)
        .iter()
        .map(|m| canonicalize(board, &apply_move(board, c, m), false))
        .collect()
}

/// Calls `f` with every placement of `black` and `gray` marbles on the
/// board, as cell masks.
pub fn for_each_placement(board: &Board, black: u32, gray: u32, mut f: impl FnMut(u64, u64)) {
    let n = board.cell_count() as u32;
    if black + gray > n {
        return;
    }
    for_each_subset(n, black, |bmask| {
        let free = board.full_mask() & !bmask;
        for_each_subset(n - black, gray, |packed| f(bmask, deposit(packed, free)));
    });
}

/// Subsets of `{0..n}` of size `k`, in increasing numeric order.
fn for_each_subset(n: u32, k: u32, mut f: impl FnMut(u64)) {
    if k == 0 {
        f(0);
        return;
    }
    if k > n {
        return;
    }
    let mut s: u64 = (1u64 << k) - 1;
    let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    loop {
        f(s);
        // Gosper's hack
        let c = s & s.wrapping_neg();
        let r = s.wrapping_add(c);
        if r == 0 || r > limit {
            return;
        }
        s = (((r ^ s) >> 2) / c) | r;
        if s > limit {
            return;
        }
    }
}

/// Scatters the low bits of `bits` onto the set bits of `mask`.
#[inline]
fn deposit(mut bits: u64, mut mask: u64) -> u64 {
    let mut out = 0u64;
    while bits != 0 && mask != 0 {
        let low = mask & mask.wrapping_neg();
        if bits & 1 != 0 {
            out |= low;
        }
        bits >>= 1;
        mask &= mask - 1;
    }
    out
}

/// Result of an explicit orbit enumeration.
#[derive(Debug, Clone, Default)]
pub struct ClassEnumeration {
    pub count: u64,
    /// Canonical representatives (fixed points of [`canonicalize`]), in
    /// increasing key order. Empty unless requested.
    pub representatives: Vec<CanonicalForm>,
}

/// Counts isomorphism classes of placements by canonicalizing each one.
pub fn enumerate_classes(
    board: &Board,
    black: u32,
    gray: u32,
    identify_negation: bool,
    keep_representatives: bool,
) -> ClassEnumeration {
    let mut forms = BTreeSet::new();
    for_each_placement(board, black, gray, |b, g| {
        forms.insert(canonicalize(
            board,
            &Constellation::from_masks(b, g),
            identify_negation,
        ));
    });
    ClassEnumeration {
        count: forms.len() as u64,
        representatives: if keep_representatives {
            forms.into_iter().collect()
        } else {
            Vec::new()
        },
    }
}

/// Cycle lengths of a permutation.
fn cycle_lengths(perm: &[u8]) -> Vec<usize> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i] as usize;
            len += 1;
        }
        out.push(len);
    }
    out
}

/// Colourings constant on each cycle with exactly the requested counts.
fn fixed_by_permutation(cycles: &[usize], black: usize, gray: usize) -> u128 {
    let mut ways = vec![vec![0u128; gray + 1]; black + 1];
    ways[0][0] = 1;
    for &len in cycles {
        let mut next = ways.clone();
        for b in 0..=black {
            for g in 0..=gray {
                let w = ways[b][g];
                if w == 0 {
                    continue;
                }
                if b + len <= black {
                    next[b + len][g] += w;
                }
                if g + len <= gray {
                    next[b][g + len] += w;
                }
            }
        }
        ways = next;
    }
    ways[black][gray]
}

/// Colourings with `c(σ x) = swap(c(x))`: odd cycles must be empty, even
/// cycles are empty or alternate black and gray in one of two phases.
fn fixed_by_swap(cycles: &[usize], black: usize, gray: usize) -> u128 {
    if black != gray {
        return 0;
    }
    let mut ways = vec![0u128; black + 1];
    ways[0] = 1;
    for &len in cycles.iter().filter(|&&l| l % 2 == 0) {
        let half = len / 2;
        let mut next = ways.clone();
        for b in 0..=black {
            if ways[b] != 0 && b + half <= black {
                next[b + half] += 2 * ways[b];
            }
        }
        ways = next;
    }
    ways[black]
}

/// Counts classes with Burnside's lemma from the cycle structure of each
/// group element; with `identify_negation` the group is extended by the
/// colour swap.
pub fn burnside_count(board: &Board, black: u32, gray: u32, identify_negation: bool) -> u64 {
    let (b, g) = (black as usize, gray as usize);
    if b + g > board.cell_count() {
        return 0;
    }
    let group = board.symmetry_group();
    let mut total = 0u128;
    for s in group {
        let cycles = cycle_lengths(s.permutation());
        total += fixed_by_permutation(&cycles, b, g);
        if identify_negation {
            if b == g {
                total += fixed_by_swap(&cycles, b, g);
            } else {
                // the swapped counts form a second, disjoint colouring set
                total += fixed_by_permutation(&cycles, g, b);
            }
        }
    }
    let order = group.len() as u128 * if identify_negation { 2 } else { 1 };
    debug_assert_eq!(total % order, 0);
    (total / order) as u64
}

/// Per-cell requirement of a [`Pattern`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Requirement {
    MustBeBlack,
    MustBeGray,
    MustBeEmpty,
    DontCare,
}

/// A partial constellation. Text form is board notation with `?` for
/// cells that may hold anything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    must_black: u64,
    must_gray: u64,
    must_empty: u64,
    cells: usize,
}

impl Pattern {
    pub fn from_requirements(reqs: &[Requirement]) -> Self {
        let mut p = Pattern {
            must_black: 0,
            must_gray: 0,
            must_empty: 0,
            cells: reqs.len(),
        };
        for (i, r) in reqs.iter().enumerate() {
            let bit = 1u64 << i;
            match r {
                Requirement::MustBeBlack => p.must_black |= bit,
                Requirement::MustBeGray => p.must_gray |= bit,
                Requirement::MustBeEmpty => p.must_empty |= bit,
                Requirement::DontCare => {}
            }
        }
        p
    }

    /// Parses `"a,b,c:cells"` where cells use `B`, `G`, `.` and `?`.
    pub fn parse(notation: &str) -> Result<(Board, Pattern), RulesError> {
        let (shape, cells) = notation.split_once(':').ok_or_else(|| {
            RulesError::Notation(notation.to_string(), "missing ':' separator".into())
        })?;
        let board = Board::new(shape.trim().parse()?)?;
        let pattern = Self::parse_cells(&board, cells.trim())?;
        Ok((board, pattern))
    }

    pub fn parse_cells(board: &Board, cells: &str) -> Result<Pattern, RulesError> {
        let reqs: Vec<Requirement> = cells
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|ch| match ch {
                'B' => Ok(Requirement::MustBeBlack),
                'G' => Ok(Requirement::MustBeGray),
                '.' => Ok(Requirement::MustBeEmpty),
                '?' => Ok(Requirement::DontCare),
                other => Err(RulesError::Notation(
                    cells.to_string(),
                    format!("bad pattern symbol {other:?}"),
                )),
            })
            .collect::<Result<_, _>>()?;
        if reqs.len() != board.cell_count() {
            return Err(RulesError::Notation(
                cells.to_string(),
                format!(
                    "expected {} cells, found {}",
                    board.cell_count(),
                    reqs.len()
                ),
            ));
        }
        Ok(Self::from_requirements(&reqs))
    }

    pub fn requirement(&self, i: usize) -> Requirement {
        let bit = 1u64 << i;
        if self.must_black & bit != 0 {
            Requirement::MustBeBlack
        } else if self.must_gray & bit != 0 {
            Requirement::MustBeGray
        } else if self.must_empty & bit != 0 {
            Requirement::MustBeEmpty
        } else {
            Requirement::DontCare
        }
    }

    /// The colour-swapped pattern.
    pub fn negated(&self) -> Pattern {
        Pattern {
            must_black: self.must_gray,
            must_gray: self.must_black,
            ..self.clone()
        }
    }

    /// Matches this exact orientation only.
    #[inline]
    pub fn matches_exactly(&self, black: u64, gray: u64) -> bool {
        black & self.must_black == self.must_black
            && gray & self.must_gray == self.must_gray
            && (black | gray) & self.must_empty == 0
    }

    pub fn cell_count(&self) -> usize {
        self.cells
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.cells {
            let ch = match self.requirement(i) {
                Requirement::MustBeBlack => 'B',
                Requirement::MustBeGray => 'G',
                Requirement::MustBeEmpty => '.',
                Requirement::DontCare => '?',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

/// True when some symmetry image of `c` satisfies every specified cell of
/// `pattern`.
pub fn match_pattern(board: &Board, c: &Constellation, pattern: &Pattern) -> bool {
    let (black, gray) = (c.mask(Color::Black), c.mask(Color::Gray));
    board
        .symmetry_group()
        .iter()
        .any(|s| pattern.matches_exactly(s.map_mask(black), s.map_mask(gray)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoardShape;
    use proptest::prelude::*;

    fn board(shape: &str) -> Board {
        Board::new(shape.parse::<BoardShape>().unwrap()).unwrap()
    }

    fn parse(board: &Board, cells: &str) -> Constellation {
        Constellation::parse_cells(board, cells).unwrap()
    }

    #[test]
    fn half_turn_on_daisy_and_standard_start() {
        let b = board("2,2,2");
        let half = b.half_turn().unwrap();
        let b1 = parse(&b, "GB...BG");
        assert_eq!(transform(&b1, half), b1);
        let b0 = parse(&b, "BB...GG");
        assert_eq!(transform(&b0, half), negate(&b0));
    }

    #[test]
    fn identity_and_composition() {
        let b = board("2,2,3");
        let c = parse(&b, "G.BG..BG.B");
        assert_eq!(transform(&c, b.identity()), c);
        for s in b.symmetry_group() {
            for t in b.symmetry_group() {
                assert_eq!(
                    transform(&transform(&c, s), t),
                    transform(&c, &t.compose(s))
                );
            }
        }
    }

    #[test]
    fn c1_images_share_one_form() {
        let b = board("2,2,3");
        let c1 = parse(&b, "G.BG.BBG..");
        let forms: BTreeSet<_> = b
            .symmetry_group()
            .iter()
            .map(|s| canonicalize(&b, &transform(&c1, s), false))
            .collect();
        assert_eq!(forms.len(), 1);
        let images: BTreeSet<String> = b
            .symmetry_group()
            .iter()
            .map(|s| transform(&c1, s).cells_string(&b))
            .collect();
        assert_eq!(images.len(), 4);
    }

    #[test]
    fn self_negativity_of_fixtures() {
        let b = board("2,2,2");
        for s in ["BB...GG", "GB...BG", "GB...GB", "GBB.G..", "GBG.B.."] {
            assert!(is_self_negative(&b, &parse(&b, s)), "{s}");
        }
        for s in ["GGB.B..", "GB..GB.", "GB.B.G.", "GBGB..."] {
            assert!(!is_self_negative(&b, &parse(&b, s)), "{s}");
        }
        let b11 = parse(&b, "GBGB...");
        assert_eq!(
            canonicalize(&b, &negate(&b11), true),
            canonicalize(&b, &b11, true)
        );
    }

    #[test]
    fn class_counts() {
        let b222 = board("2,2,2");
        assert_eq!(enumerate_classes(&b222, 2, 2, false, false).count, 23);
        assert_eq!(enumerate_classes(&b222, 1, 0, false, false).count, 2);
        assert_eq!(burnside_count(&b222, 2, 2, false), 23);
        let b223 = board("2,2,3");
        assert_eq!(enumerate_classes(&b223, 3, 3, false, false).count, 1080);
        assert_eq!(enumerate_classes(&b223, 3, 3, true, false).count, 555);
        assert_eq!(burnside_count(&b223, 3, 3, false), 1080);
        assert_eq!(burnside_count(&b223, 3, 3, true), 555);
        for s in ["1,1,1", "2,2,2", "2,3,3", "3,3,3"] {
            assert_eq!(burnside_count(&board(s), 0, 0, false), 1);
            assert_eq!(enumerate_classes(&board(s), 0, 0, true, false).count, 1);
        }
    }

    #[test]
    fn representatives_are_fixed_points() {
        let b = board("2,2,2");
        let e = enumerate_classes(&b, 2, 2, false, true);
        assert_eq!(e.representatives.len(), 23);
        for form in e.representatives {
            let c = form.constellation(&b);
            assert_eq!(canonicalize(&b, &c, false), form);
        }
    }

    #[test]
    fn burnside_agrees_with_explicit_orbits() {
        for shape in ["2,2,2", "2,2,3", "2,3,2", "1,2,3", "2,3,4", "1,1,3"] {
            let b = board(shape);
            let n = b.cell_count() as u32;
            if n > 12 {
                continue;
            }
            for black in 0..=3.min(n) {
                for gray in 0..=3.min(n - black) {
                    for neg in [false, true] {
                        assert_eq!(
                            burnside_count(&b, black, gray, neg),
                            enumerate_classes(&b, black, gray, neg, false).count,
                            "{shape} {black}B {gray}G negation={neg}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn neutral_and_triangle_patterns() {
        let (b, neutral) = Pattern::parse("2,2,3:GGB?BB????").unwrap();
        let (_, triangle) = Pattern::parse("2,2,3:?B??BB????").unwrap();
        assert!(match_pattern(&b, &parse(&b, "GGB.BB...."), &neutral));
        assert!(match_pattern(&b, &parse(&b, ".B..BB...."), &triangle));
        assert!(!match_pattern(&b, &parse(&b, "G.BG..BG.B"), &neutral));
        // mirrored triangle (b -> i) still matches
        assert!(match_pattern(&b, &parse(&b, "....BB..B."), &triangle));
        assert_eq!(neutral.to_string(), "GGB?BB????");
        assert!(Pattern::parse("2,2,3:GGB?BB???").is_err());
    }

    #[test]
    fn options_of_c0_and_c1() {
        let config = GameConfig::from_notation("2,2,3:G.BG..BG.B", 1).unwrap();
        let c0 = config.initial();
        assert_eq!(
            options_up_to_isomorphism(&c0, Color::Black, &config).len(),
            4
        );
        let c1 = config.parse("G.BG.BBG..").unwrap();
        assert_eq!(
            options_up_to_isomorphism(&c1, Color::Gray, &config).len(),
            7
        );
        let b222 = GameConfig::from_notation("2,2,2:GB...BG", 1).unwrap();
        let b0 = b222.parse("BB...GG").unwrap();
        let b11 = b222.parse("GBGB...").unwrap();
        assert!(
            options_up_to_isomorphism(&b0, Color::Black, &b222).contains(&canonicalize(
                b222.board(),
                &b11,
                false
            ))
        );
    }

    fn arb_constellation(cells: usize) -> impl Strategy<Value = (u64, u64)> {
        proptest::collection::vec(0u8..3, cells).prop_map(|v| {
            let (mut b, mut g) = (0u64, 0u64);
            for (i, x) in v.into_iter().enumerate() {
                match x {
                    1 => b |= 1 << i,
                    2 => g |= 1 << i,
                    _ => {}
                }
            }
            (b, g)
        })
    }

    proptest! {
        #[test]
        fn canonical_form_is_orbit_invariant((black, gray) in arb_constellation(19)) {
            let b = board("3,3,3");
            let c = Constellation::from_masks(black, gray);
            let form = canonicalize(&b, &c, false);
            let rep = form.constellation(&b);
            prop_assert_eq!(canonicalize(&b, &rep, false), form);
            prop_assert!(form.key() <= c.scan_key(19));
            for s in b.symmetry_group() {
                let img = transform(&c, s);
                prop_assert_eq!(canonicalize(&b, &img, false), form);
                // negation commutes with symmetries
                prop_assert_eq!(negate(&img), transform(&negate(&c), s));
            }
            prop_assert_eq!(negate(&negate(&c)), c);
        }

        #[test]
        fn pattern_matching_is_symmetry_invariant((black, gray) in arb_constellation(10)) {
            let (b, neutral) = Pattern::parse("2,2,3:GGB?BB????").unwrap();
            let c = Constellation::from_masks(black, gray);
            let expected = match_pattern(&b, &c, &neutral);
            for s in b.symmetry_group() {
                prop_assert_eq!(match_pattern(&b, &transform(&c, s), &neutral), expected);
            }
        }
    }
}
