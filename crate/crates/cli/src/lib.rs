//! The `abalone` command line: solve variants, print outcome tables, count
//! isomorphism classes, classify boards, play in the terminal and serve the
//! HTTP API.
//!
//! [`run`] takes its input and output streams as arguments so the whole
//! command surface can be driven from tests.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use abalone_core::canonical::{burnside_count, enumerate_classes};
use abalone_core::fixtures::{FixtureSet, DEFAULT_FIXTURES};
use abalone_core::rules::{find_move, is_terminal, moves_on};
use abalone_core::solver::{MarbleFilter, OutcomeClass};
use abalone_core::store::{load, save};
use abalone_core::{solve, Board, BoardShape, Color, GameConfig, SolveOptions, SolvedDatabase};
use abalone_service::{serve, AppState, DEFAULT_PLY_CAP};
use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "abalone",
    version,
    about = "Exhaustive solver for small-board Abalone"
)]
pub struct Cli {
    /// Re-check the fixture file and exit (same as the verify-fixtures command).
    #[arg(long)]
    pub verify_fixtures: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve every state of a variant and optionally save the database.
    Solve(SolveArgs),
    /// Print the outcome class of each named board and its negative.
    Table {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
    /// Count placements up to board symmetry.
    Enumerate {
        #[arg(long)]
        shape: BoardShape,
        #[arg(long)]
        black: u32,
        #[arg(long)]
        gray: u32,
        /// Also identify a constellation with its colour-swapped negative.
        #[arg(long)]
        identify_negation: bool,
        /// List one canonical representative per class.
        #[arg(long)]
        list: bool,
    },
    /// Print the outcome class of one board.
    Classify {
        #[arg(long)]
        db: PathBuf,
        /// Board notation, e.g. `2,2,3:G.BG..BG.B`.
        #[arg(long)]
        board: String,
        /// Also print the value for each side to move.
        #[arg(long)]
        values: bool,
    },
    /// Play against the solver in the terminal.
    Play(PlayArgs),
    /// Serve the JSON play API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Database file; repeat to serve several variants.
        #[arg(long, required = true)]
        db: Vec<PathBuf>,
        /// Keep sessions in this JSON file across restarts.
        #[arg(long)]
        snapshot: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PLY_CAP)]
        ply_cap: u32,
    },
    /// Re-derive the properties stated in a fixture file.
    VerifyFixtures {
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub shape: BoardShape,
    /// Marbles a side may lose before the game ends; defaults to the
    /// variant's usual value.
    #[arg(long)]
    pub k: Option<u8>,
    /// Starting position; defaults to the variant's usual start.
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Store outcomes only, without distances.
    #[arg(long)]
    pub no_distances: bool,
    /// Report layer sizes on stderr.
    #[arg(long)]
    pub progress: bool,
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    /// Database to play from.
    #[arg(long, conflicts_with = "shape")]
    pub db: Option<PathBuf>,
    /// Solve this variant in memory instead of loading a database.
    #[arg(long)]
    pub shape: Option<BoardShape>,
    /// Side played from the keyboard: black, gray or none.
    #[arg(long, default_value = "black")]
    pub human: String,
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long, default_value = "black")]
    pub to_move: Color,
    #[arg(long, default_value_t = DEFAULT_PLY_CAP)]
    pub ply_cap: u32,
    /// Show the value of each offered move.
    #[arg(long)]
    pub hints: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    if cli.verify_fixtures {
        return verify_fixtures(None, out);
    }
    let Some(command) = cli.command else {
        bail!("no command given; try --help");
    };
    match command {
        Command::Solve(args) => solve_command(&args, out),
        Command::Table { db, fixtures } => {
            let db = open_db(&db)?;
            let fixtures = read_fixtures(fixtures.as_deref())?;
            write!(out, "{}", fixtures.outcome_table(&db)?)?;
            Ok(())
        }
        Command::Enumerate {
            shape,
            black,
            gray,
            identify_negation,
            list,
        } => {
            let board = Board::new(shape)?;
            ensure!(
                (black + gray) as usize <= board.cell_count(),
                "{} marbles do not fit on {} cells",
                black + gray,
                board.cell_count()
            );
            let classes = enumerate_classes(&board, black, gray, identify_negation, list);
            let burnside = burnside_count(&board, black, gray, identify_negation);
            writeln!(out, "{}", classes.count)?;
            writeln!(out, "burnside {burnside}")?;
            for form in &classes.representatives {
                writeln!(out, "{}", form.notation(&board))?;
            }
            ensure!(
                burnside == classes.count,
                "orbit count {} disagrees with Burnside count {burnside}",
                classes.count
            );
            Ok(())
        }
        Command::Classify { db, board, values } => {
            let db = open_db(&db)?;
            let c = db.config().parse(&board)?;
            writeln!(out, "{}", db.outcome_class(&c)?)?;
            if values {
                for color in [Color::Black, Color::Gray] {
                    writeln!(out, "{color} to move: {}", db.value(&c, color)?)?;
                }
            }
            Ok(())
        }
        Command::Play(args) => play(&args, input, out),
        Command::Serve {
            port,
            host,
            db,
            snapshot,
            ply_cap,
        } => {
            let dbs = db.iter().map(|p| open_db(p)).collect::<Result<Vec<_>>>()?;
            let mut app = AppState::new(dbs).with_ply_cap(ply_cap);
            if let Some(path) = snapshot {
                app = app.with_snapshot(path)?;
            }
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .with_context(|| format!("bad address {host}:{port}"))?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(addr, Arc::new(app)))?;
            Ok(())
        }
        Command::VerifyFixtures { fixtures } => verify_fixtures(fixtures.as_deref(), out),
    }
}

fn open_db(path: &Path) -> Result<SolvedDatabase> {
    load(path).with_context(|| format!("cannot load database {}", path.display()))
}

fn read_fixtures(path: Option<&Path>) -> Result<FixtureSet> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .with_context(|| format!("cannot read fixtures {}", p.display()))?,
        None => DEFAULT_FIXTURES.to_string(),
    };
    Ok(FixtureSet::parse(&text)?)
}

fn verify_fixtures(path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let fixtures = read_fixtures(path)?;
    let results = fixtures.verify();
    for r in &results {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        if r.detail.is_empty() {
            writeln!(out, "{verdict} {}", r.check)?;
        } else {
            writeln!(out, "{verdict} {}: {}", r.check, r.detail)?;
        }
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(out, "{} checks, {failed} failed", results.len())?;
    ensure!(failed == 0, "{failed} fixture checks failed");
    Ok(())
}

fn report_layer(distance: u32, states: u64) {
    eprintln!("  layer {distance:>3}: {states} states");
}

fn solve_config(shape: BoardShape, k: Option<u8>, start: Option<&str>) -> Result<GameConfig> {
    let preset = GameConfig::preset(shape);
    let k = k.or(preset.as_ref().map(|p| p.k())).unwrap_or(1);
    let initial = match (start, &preset) {
        (Some(text), _) => text.to_string(),
        (None, Some(p)) => p.initial().notation(p.board()),
        (None, None) => bail!("no usual starting position for {shape}; pass --start"),
    };
    let notation = if initial.contains(':') {
        initial
    } else {
        format!("{shape}:{initial}")
    };
    let config = GameConfig::from_notation(&notation, k)?;
    ensure!(
        config.shape() == shape,
        "start is on {}, not {shape}",
        config.shape()
    );
    Ok(config)
}

/// Variants whose results are established; anything larger is reported as
/// exploratory.
fn is_established(shape: BoardShape) -> bool {
    shape.cell_count() <= 10
}

fn solve_command(args: &SolveArgs, out: &mut dyn Write) -> Result<()> {
    let config = solve_config(args.shape, args.k, args.start.as_deref())?;
    let options = SolveOptions {
        workers: args.workers,
        keep_distances: !args.no_distances,
        progress: args.progress.then_some(report_layer as fn(u32, u64)),
    };
    let started = Instant::now();
    let db = solve(&config, &options)?;
    eprintln!(
        "solved {} K={}: {} states in {:.1?}",
        config.shape(),
        config.k(),
        db.space().len(),
        started.elapsed()
    );

    let board = config.board();
    let start = config.initial();
    let black = db.value(&start, Color::Black)?;
    let gray = db.value(&start, Color::Gray)?;
    let class = OutcomeClass::from_pair(black.outcome, gray.outcome);
    let prefix = if is_established(config.shape()) {
        ""
    } else {
        "CONJECTURE: "
    };
    writeln!(
        out,
        "{prefix}start {} K={} is {class} (Black to move: {black}; Gray to move: {gray})",
        start.notation(board),
        config.k()
    )?;
    let m = config.marbles() as u32;
    if board.cell_count() < 19 {
        writeln!(
            out,
            "{prefix}census {}",
            db.class_census(MarbleFilter::exactly(m, m))
        )?;
        let fixtures = FixtureSet::builtin();
        for p in fixtures.patterns() {
            if p.board.shape() == config.shape() && !is_established(config.shape()) {
                writeln!(
                    out,
                    "{prefix}{} family {}",
                    p.name,
                    db.pattern_census(&p.pattern)
                )?;
            }
        }
    }
    writeln!(out, "stalemates {}", db.stalemates())?;
    if let Some(path) = &args.out {
        save(&db, path).with_context(|| format!("cannot write {}", path.display()))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

fn play(args: &PlayArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<()> {
    let db = match (&args.db, args.shape) {
        (Some(path), _) => open_db(path)?,
        (None, Some(shape)) => solve(&solve_config(shape, None, None)?, &SolveOptions::default())?,
        (None, None) => bail!("pass --db or --shape"),
    };
    let human = match args.human.to_ascii_lowercase().as_str() {
        "none" => None,
        other => Some(other.parse::<Color>().map_err(anyhow::Error::msg)?),
    };
    let config = db.config().clone();
    let board = config.board();
    let mut current = match &args.start {
        Some(text) => config.parse(text)?,
        None => config.initial(),
    };
    let mut to_move = args.to_move;
    let mut ply = 0u32;

    writeln!(out, "{}", current.diagram(board))?;
    writeln!(out, "class {}", db.outcome_class(&current)?)?;
    loop {
        if let Some(winner) = is_terminal(&current, &config) {
            let lost = current.lost(winner.other());
            writeln!(
                out,
                "{winner} wins, {} lost {lost} of {}",
                winner.other(),
                config.marbles()
            )?;
            return Ok(());
        }
        let moves = moves_on(board, &current, to_move);
        if moves.is_empty() {
            writeln!(out, "{to_move} cannot move; {} wins", to_move.other())?;
            return Ok(());
        }
        if ply >= args.ply_cap {
            writeln!(out, "draw by ply cap after {ply} plies")?;
            return Ok(());
        }
        let value = db.value(&current, to_move)?;
        writeln!(out, "{to_move} to move ({value})")?;

        let chosen = if human == Some(to_move) {
            let ranked = db.best_moves(&current, to_move)?;
            let mut offered: Vec<_> = ranked.iter().collect();
            offered.sort_by_key(|r| r.mv.order_key());
            for (i, r) in offered.iter().enumerate() {
                let mut line = format!("  {:>2}  {}", i + 1, r.mv.describe(board));
                if args.hints {
                    line.push_str(&format!("  -> {}", r.value));
                }
                writeln!(out, "{line}")?;
            }
            loop {
                write!(out, "move> ")?;
                out.flush()?;
                let mut line = String::new();
                if input.read_line(&mut line)? == 0 {
                    writeln!(out)?;
                    return Ok(());
                }
                let line = line.trim();
                if line == "quit" || line == "q" {
                    return Ok(());
                }
                let pick = match line.parse::<usize>() {
                    Ok(n) if (1..=offered.len()).contains(&n) => Some(offered[n - 1].mv),
                    Ok(_) => None,
                    Err(_) => find_move(&config, &current, to_move, line).ok(),
                };
                match pick {
                    Some(mv) => break mv,
                    None => writeln!(out, "not a legal move: {line:?}")?,
                }
            }
        } else {
            db.best_moves(&current, to_move)?[0].mv
        };

        current = abalone_core::rules::apply_move(board, &current, &chosen);
        ply += 1;
        let class = if is_terminal(&current, &config).is_some() {
            "-".to_string()
        } else {
            db.outcome_class(&current)?.to_string()
        };
        writeln!(
            out,
            "ply {ply}: {to_move} plays {} -> {}",
            chosen.describe(board),
            current.cells_string(board)
        )?;
        writeln!(out, "{}", current.diagram(board))?;
        writeln!(out, "class {class}")?;
        to_move = to_move.other();
    }
}
