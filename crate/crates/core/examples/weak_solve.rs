//! Weakly solves 2,2,3 Abalone: the start C0 is a draw, and the example
//! shows why by grouping each side's options at C0, C1 and C2 by the value
//! they lead to.
//!
//! cargo run -p abalone-core --example weak_solve

use abalone_core::canonical::canonicalize;
use abalone_core::fixtures::FixtureSet;
use abalone_core::{solve, Color, Constellation, GameConfig, SolveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = GameConfig::preset("2,2,3".parse()?).expect("2,2,3 preset");
    let board = config.board();
    let db = solve(&config, &SolveOptions::default())?;
    let fixtures = FixtureSet::builtin();

    let start = config.initial();
    println!("{}", start.diagram(board));
    println!("o(C0) = {}", db.outcome_class(&start)?);

    // Name a successor after the first fixture it is isomorphic to.
    let name_of = |c: &Constellation| {
        let key = canonicalize(board, c, false);
        fixtures
            .boards_on(config.shape())
            .find(|f| canonicalize(board, &f.constellation, false) == key)
            .map_or_else(|| "?".to_string(), |f| f.name.clone())
    };

    for (from, mover) in [
        ("C0", Color::Black),
        ("C1", Color::Gray),
        ("C2", Color::Black),
    ] {
        let c = fixtures.constellation(from)?;
        println!();
        println!("{from}, {mover} to move ({}):", db.value(&c, mover)?);
        // best_moves ranks best first; keep that order between groups.
        let mut groups: Vec<(String, Vec<String>)> = Vec::new();
        for ranked in db.best_moves(&c, mover)? {
            let label = format!("{} -> {}", ranked.value, name_of(&ranked.successor));
            match groups.iter_mut().find(|(l, _)| *l == label) {
                Some((_, moves)) => moves.push(ranked.mv.text(board)),
                None => groups.push((label, vec![ranked.mv.text(board)])),
            }
        }
        for (label, moves) in groups {
            println!("  {label:<22} {}", moves.join("  "));
        }
    }
    Ok(())
}
