//! Plays perfect games: from B0 Black forces B11, and from the 2,2,3
//! start both sides keep the draw until the ply limit.
//!
//! cargo run -p abalone-core --example optimal_play

use abalone_core::fixtures::FixtureSet;
use abalone_core::rules::is_terminal;
use abalone_core::{solve, Color, Constellation, GameConfig, SolveOptions, SolvedDatabase};

fn play_out(db: &SolvedDatabase, mut c: Constellation, mut to_move: Color, plies: usize) {
    let config = db.config();
    let board = config.board();
    for ply in 1..=plies {
        if is_terminal(&c, config).is_some() {
            break;
        }
        let ranked = db.best_moves(&c, to_move).expect("indexable position");
        let Some(best) = ranked.first() else {
            println!("  {to_move} has no move");
            break;
        };
        println!(
            "  {ply:>2}. {to_move:<5} {:<32} {}  (opponent to move: {})",
            best.mv.describe(board),
            best.successor.cells_string(board),
            best.value
        );
        c = best.successor;
        to_move = to_move.other();
    }
    match is_terminal(&c, config) {
        Some(winner) => println!("  {winner} wins"),
        None => println!(
            "  still {} after the line shown",
            db.value(&c, to_move).unwrap()
        ),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = FixtureSet::builtin();

    let b222 = solve(
        &GameConfig::preset("2,2,2".parse()?).unwrap(),
        &SolveOptions::default(),
    )?;
    let b0 = fixtures.constellation("B0")?;
    println!(
        "2,2,2 from B0, Black to move ({}):",
        b222.value(&b0, Color::Black)?
    );
    play_out(&b222, b0, Color::Black, 10);

    let config = GameConfig::preset("2,2,3".parse()?).unwrap();
    let c223 = solve(&config, &SolveOptions::default())?;
    println!();
    println!(
        "2,2,3 from C0, Black to move ({}):",
        c223.value(&config.initial(), Color::Black)?
    );
    play_out(&c223, config.initial(), Color::Black, 12);
    Ok(())
}
