//! Named boards and patterns, loaded from a small line-based text format.
//!
//! ```text
//! board   B0      2,2,2:BB...GG
//! pattern neutral 2,2,3:GGB?BB????
//! check   self-negative B0 B1
//! ```
//!
//! A name with a leading `-` refers to the colour-swapped board. `check`
//! lines state properties of the transcriptions that [`FixtureSet::verify`]
//! re-derives, so a typo in a cell string shows up as a failed check.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::canonical::{
    canonicalize, enumerate_classes, is_self_negative, match_pattern, negate,
    options_up_to_isomorphism, Pattern,
};
use crate::geometry::{Board, BoardShape};
use crate::rules::{Color, Constellation, GameConfig, RulesError};
use crate::solver::SolvedDatabase;
use crate::store::StoreError;

/// The fixture file shipped with the crate.
pub const DEFAULT_FIXTURES: &str = include_str!("../fixtures.txt");

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Notation { line: usize, source: RulesError },
    #[error("unknown fixture {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Rules(#[from] RulesError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub board: Arc<Board>,
    pub constellation: Constellation,
}

impl Fixture {
    pub fn shape(&self) -> BoardShape {
        self.board.shape()
    }

    pub fn notation(&self) -> String {
        self.constellation.notation(&self.board)
    }

    /// A game on this board starting here, with the usual `K` for the shape.
    pub fn config(&self) -> Result<GameConfig, RulesError> {
        let k = GameConfig::preset(self.shape()).map_or(1, |p| p.k());
        GameConfig::new((*self.board).clone(), k, self.constellation)
    }
}

#[derive(Debug, Clone)]
pub struct NamedPattern {
    pub name: String,
    pub board: Arc<Board>,
    pub pattern: Pattern,
}

/// One `check` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    SelfNegative(Vec<String>),
    NotSelfNegative(Vec<String>),
    /// The boards are pairwise non-isomorphic and, with their marble counts,
    /// account for every class on the board.
    Covers(Vec<String>),
    /// The boards are pairwise non-isomorphic.
    Distinct(Vec<String>),
    OptionCount {
        board: String,
        mover: Color,
        count: usize,
    },
    OptionContains {
        board: String,
        mover: Color,
        option: String,
    },
    Successor {
        from: String,
        to: String,
        mover: Color,
    },
    Matches {
        board: String,
        pattern: String,
        expected: bool,
    },
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::SelfNegative(names) => write!(f, "self-negative {}", names.join(" ")),
            Check::NotSelfNegative(names) => write!(f, "not-self-negative {}", names.join(" ")),
            Check::Covers(names) => write!(f, "covers {}", names.join(" ")),
            Check::Distinct(names) => write!(f, "distinct {}", names.join(" ")),
            Check::OptionCount {
                board,
                mover,
                count,
            } => write!(f, "options {board} {} {count}", mover.name()),
            Check::OptionContains {
                board,
                mover,
                option,
            } => write!(f, "option-contains {board} {} {option}", mover.name()),
            Check::Successor { from, to, mover } => {
                write!(f, "successor {from} {to} {}", mover.name())
            }
            Check::Matches {
                board,
                pattern,
                expected,
            } => {
                let kind = if *expected { "matches" } else { "not-matches" };
                write!(f, "{kind} {board} {pattern}")
            }
        }
    }
}

/// Outcome of re-deriving one check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct FixtureSet {
    boards: Vec<Fixture>,
    patterns: Vec<NamedPattern>,
    checks: Vec<Check>,
}

impl FixtureSet {
    /// The fixtures shipped with the crate.
    pub fn builtin() -> FixtureSet {
        Self::parse(DEFAULT_FIXTURES).expect("bundled fixtures parse")
    }

    pub fn parse(text: &str) -> Result<FixtureSet, FixtureError> {
        let mut set = FixtureSet::default();
        let mut boards: BTreeMap<BoardShape, Arc<Board>> = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            let syntax = |message: &str| FixtureError::Syntax {
                line,
                message: message.to_string(),
            };
            match words[0] {
                "board" | "pattern" => {
                    let [_, name, notation] = words[..] else {
                        return Err(syntax("expected: board|pattern <name> <a,b,c:cells>"));
                    };
                    let (shape, cells) = notation
                        .split_once(':')
                        .ok_or_else(|| syntax("missing ':' in notation"))?;
                    let notation_err = |source| FixtureError::Notation { line, source };
                    let shape: BoardShape = shape
                        .parse()
                        .map_err(|e| notation_err(RulesError::Geometry(e)))?;
                    let board = match boards.get(&shape) {
                        Some(b) => b.clone(),
                        None => {
                            let b =
                                Arc::new(Board::new(shape).map_err(|e| notation_err(e.into()))?);
                            boards.insert(shape, b.clone());
                            b
                        }
                    };
                    if set.find_name(name) {
                        return Err(syntax(&format!("duplicate name {name:?}")));
                    }
                    if words[0] == "board" {
                        let constellation =
                            Constellation::parse_cells(&board, cells).map_err(notation_err)?;
                        set.boards.push(Fixture {
                            name: name.to_string(),
                            board,
                            constellation,
                        });
                    } else {
                        let pattern = Pattern::parse_cells(&board, cells).map_err(notation_err)?;
                        set.patterns.push(NamedPattern {
                            name: name.to_string(),
                            board,
                            pattern,
                        });
                    }
                }
                "check" => {
                    let check = parse_check(&words[1..]).map_err(|m| syntax(&m))?;
                    set.checks.push(check);
                }
                other => return Err(syntax(&format!("unknown directive {other:?}"))),
            }
        }
        Ok(set)
    }

    fn find_name(&self, name: &str) -> bool {
        self.boards.iter().any(|b| b.name == name) || self.patterns.iter().any(|p| p.name == name)
    }

    pub fn boards(&self) -> &[Fixture] {
        &self.boards
    }

    pub fn patterns(&self) -> &[NamedPattern] {
        &self.patterns
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    /// Looks up a board; `-name` gives its negative.
    pub fn board(&self, name: &str) -> Result<Fixture, FixtureError> {
        let (negative, base) = match name.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, name),
        };
        let found = self
            .boards
            .iter()
            .find(|b| b.name == base)
            .ok_or_else(|| FixtureError::Unknown(name.to_string()))?;
        let mut fixture = found.clone();
        if negative {
            fixture.name = name.to_string();
            fixture.constellation = negate(&fixture.constellation);
        }
        Ok(fixture)
    }

    pub fn constellation(&self, name: &str) -> Result<Constellation, FixtureError> {
        Ok(self.board(name)?.constellation)
    }

    pub fn pattern(&self, name: &str) -> Result<&NamedPattern, FixtureError> {
        self.patterns
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| FixtureError::Unknown(name.to_string()))
    }

    /// Boards on a given shape, in file order.
    pub fn boards_on(&self, shape: BoardShape) -> impl Iterator<Item = &Fixture> {
        self.boards.iter().filter(move |b| b.shape() == shape)
    }

    /// One line per named board on the database's shape that carries full
    /// material: the board's outcome class and that of its negative.
    pub fn outcome_table(&self, db: &SolvedDatabase) -> Result<String, FixtureError> {
        let config = db.config();
        let full = config.marbles() as u32;
        let mut out = format!("{:<5} {:<5} {}\n", "board", "o(C)", "o(-C)");
        for f in self.boards_on(config.shape()) {
            let c = f.constellation;
            if c.count(Color::Black) != full || c.count(Color::Gray) != full {
                continue;
            }
            let class = db.outcome_class(&c)?;
            let negative = db.outcome_class(&negate(&c))?;
            out.push_str(&format!("{:<5} {:<5} {}\n", f.name, class, negative));
        }
        Ok(out)
    }

    /// Re-derives every `check` line.
    pub fn verify(&self) -> Vec<CheckResult> {
        self.checks
            .iter()
            .map(|check| {
                let (passed, detail) = match self.evaluate(check) {
                    Ok(r) => r,
                    Err(e) => (false, e.to_string()),
                };
                CheckResult {
                    check: check.to_string(),
                    passed,
                    detail,
                }
            })
            .collect()
    }

    fn evaluate(&self, check: &Check) -> Result<(bool, String), FixtureError> {
        Ok(match check {
            Check::SelfNegative(names) | Check::NotSelfNegative(names) => {
                let want = matches!(check, Check::SelfNegative(_));
                let mut wrong = Vec::new();
                for name in names {
                    let f = self.board(name)?;
                    if is_self_negative(&f.board, &f.constellation) != want {
                        wrong.push(name.clone());
                    }
                }
                (wrong.is_empty(), format_wrong(&wrong))
            }
            Check::Distinct(names) | Check::Covers(names) => {
                let fixtures = names
                    .iter()
                    .map(|n| self.board(n))
                    .collect::<Result<Vec<_>, _>>()?;
                let forms: BTreeSet<_> = fixtures
                    .iter()
                    .map(|f| canonicalize(&f.board, &f.constellation, false))
                    .collect();
                if forms.len() != fixtures.len() {
                    return Ok((false, "two of the boards are isomorphic".into()));
                }
                if let (Check::Covers(_), Some(first)) = (check, fixtures.first()) {
                    let c = first.constellation;
                    let total = enumerate_classes(
                        &first.board,
                        c.count(Color::Black),
                        c.count(Color::Gray),
                        false,
                        false,
                    )
                    .count;
                    let ok = total == forms.len() as u64;
                    return Ok((ok, format!("{} of {total} classes", forms.len())));
                }
                (true, format!("{} classes", forms.len()))
            }
            Check::OptionCount {
                board,
                mover,
                count,
            } => {
                let f = self.board(board)?;
                let config = f.config()?;
                let n = options_up_to_isomorphism(&f.constellation, *mover, &config).len();
                (n == *count, format!("{n} options"))
            }
            Check::OptionContains {
                board,
                mover,
                option,
            } => {
                let f = self.board(board)?;
                let target = self.board(option)?;
                let config = f.config()?;
                let options = options_up_to_isomorphism(&f.constellation, *mover, &config);
                let form = canonicalize(&f.board, &target.constellation, false);
                (options.contains(&form), String::new())
            }
            Check::Successor { from, to, mover } => {
                let f = self.board(from)?;
                let t = self.board(to)?;
                let options = options_up_to_isomorphism(&f.constellation, *mover, &f.config()?);
                let form = canonicalize(&f.board, &t.constellation, false);
                (options.contains(&form), String::new())
            }
            Check::Matches {
                board,
                pattern,
                expected,
            } => {
                let f = self.board(board)?;
                let p = self.pattern(pattern)?;
                let got = match_pattern(&f.board, &f.constellation, &p.pattern);
                (got == *expected, format!("match = {got}"))
            }
        })
    }
}

fn format_wrong(wrong: &[String]) -> String {
    if wrong.is_empty() {
        String::new()
    } else {
        format!("fails for {}", wrong.join(", "))
    }
}

fn parse_color(word: &str) -> Result<Color, String> {
    word.parse::<Color>()
        .map_err(|_| format!("expected black or gray, found {word:?}"))
}

fn parse_check(words: &[&str]) -> Result<Check, String> {
    let names = |rest: &[&str]| rest.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    match words {
        ["self-negative", rest @ ..] if !rest.is_empty() => Ok(Check::SelfNegative(names(rest))),
        ["not-self-negative", rest @ ..] if !rest.is_empty() => {
            Ok(Check::NotSelfNegative(names(rest)))
        }
        ["covers", rest @ ..] if !rest.is_empty() => Ok(Check::Covers(names(rest))),
        ["distinct", rest @ ..] if !rest.is_empty() => Ok(Check::Distinct(names(rest))),
        ["options", board, mover, count] => Ok(Check::OptionCount {
            board: board.to_string(),
            mover: parse_color(mover)?,
            count: count
                .parse()
                .map_err(|_| format!("bad option count {count:?}"))?,
        }),
        ["option-contains", board, mover, option] => Ok(Check::OptionContains {
            board: board.to_string(),
            mover: parse_color(mover)?,
            option: option.to_string(),
        }),
        ["successor", from, to, mover] => Ok(Check::Successor {
            from: from.to_string(),
            to: to.to_string(),
            mover: parse_color(mover)?,
        }),
        ["matches", board, pattern] | ["not-matches", board, pattern] => Ok(Check::Matches {
            board: board.to_string(),
            pattern: pattern.to_string(),
            expected: words[0] == "matches",
        }),
        _ => Err(format!("cannot parse check {:?}", words.join(" "))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_fixtures_parse_and_verify() {
        let set = FixtureSet::builtin();
        assert_eq!(set.boards_on("2,2,2".parse().unwrap()).count(), 14);
        let results = set.verify();
        assert!(!results.is_empty());
        for r in &results {
            assert!(r.passed, "{}: {}", r.check, r.detail);
        }
    }

    #[test]
    fn negated_lookup() {
        let set = FixtureSet::builtin();
        let b11 = set.constellation("B11").unwrap();
        let neg = set.constellation("-B11").unwrap();
        assert_eq!(neg, negate(&b11));
        assert!(matches!(set.board("B99"), Err(FixtureError::Unknown(_))));
    }

    #[test]
    fn a_wrong_transcription_fails_its_check() {
        let text = "board X 2,2,2:GBG.B..\nboard Y 2,2,2:GGB.B..\ncheck self-negative X Y\n";
        let set = FixtureSet::parse(text).unwrap();
        let results = set.verify();
        assert!(!results[0].passed);
        assert!(results[0].detail.contains('Y'));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = FixtureSet::parse("\nboard A 2,2,2:BB\n").unwrap_err();
        assert!(err.to_string().starts_with("line 2"));
        assert!(FixtureSet::parse("frobnicate x").is_err());
        assert!(FixtureSet::parse("check options B0 purple 3").is_err());
        assert!(FixtureSet::parse("board A 2,2,2:BB...GG\nboard A 2,2,2:BB...GG").is_err());
    }

    #[test]
    fn starts_match_presets() {
        let set = FixtureSet::builtin();
        for (name, shape) in [
            ("B1", "2,2,2"),
            ("C0", "2,2,3"),
            ("D0", "2,3,3"),
            ("E0", "3,3,3"),
        ] {
            let preset = GameConfig::preset(shape.parse().unwrap()).unwrap();
            assert_eq!(set.constellation(name).unwrap(), preset.initial(), "{name}");
        }
    }
}
