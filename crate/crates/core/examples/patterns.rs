//! Pattern censuses: how outcome classes split among 2,2,3 constellations
//! that contain a given arrangement in some orientation, such as Black
//! holding both middle cells.
//!
//! cargo run -p abalone-core --example patterns

use abalone_core::canonical::Pattern;
use abalone_core::fixtures::FixtureSet;
use abalone_core::{solve, GameConfig, SolveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = GameConfig::preset("2,2,3".parse()?).unwrap();
    let board = config.board();
    let db = solve(&config, &SolveOptions::default())?;
    let fixtures = FixtureSet::builtin();

    let mut patterns: Vec<(String, Pattern)> = vec![
        (
            "black middle".into(),
            Pattern::parse_cells(board, "????BB????")?,
        ),
        (
            "gray middle".into(),
            Pattern::parse_cells(board, "????GG????")?,
        ),
    ];
    for p in fixtures.patterns() {
        if p.board.shape() == config.shape() {
            patterns.push((p.name.clone(), p.pattern.clone()));
        }
    }
    for (name, pattern) in &patterns {
        println!("{name:<13} {pattern}  {}", db.pattern_census(pattern));
    }
    Ok(())
}
