//! Solves a larger K=2 variant from scratch and reports the value of its
//! starting position. These results are exploratory; nothing is asserted.
//!
//! cargo run --release -p abalone-core --example conjecture -- 2,3,3
//! cargo run --release -p abalone-core --example conjecture -- 3,3,3 /tmp/e0.db

use std::time::Instant;

use abalone_core::fixtures::FixtureSet;
use abalone_core::solver::{MarbleFilter, OutcomeClass};
use abalone_core::store::save;
use abalone_core::{solve, Color, GameConfig, SolveOptions};

fn report_layer(distance: u32, states: u64) {
    eprintln!("  layer {distance:>3}: {states} states");
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let shape = args.next().unwrap_or_else(|| "2,3,3".into()).parse()?;
    let out = args.next();
    let config = GameConfig::preset(shape).ok_or("no starting position for this shape")?;
    let options = SolveOptions {
        progress: Some(report_layer),
        keep_distances: out.is_none() || shape.cell_count() < 19,
        ..SolveOptions::default()
    };

    eprintln!("solving {shape} with K={}", config.k());
    let started = Instant::now();
    let db = solve(&config, &options)?;
    eprintln!("{} states in {:.1?}", db.space().len(), started.elapsed());

    let start = config.initial();
    let board = config.board();
    let black = db.value(&start, Color::Black)?;
    let gray = db.value(&start, Color::Gray)?;
    let class = OutcomeClass::from_pair(black.outcome, gray.outcome);
    println!(
        "CONJECTURE: {shape} K={} start {} is {class} (Black to move: {black}; Gray to move: {gray})",
        config.k(),
        start.notation(board)
    );
    println!("stalemates {}", db.stalemates());

    let fixtures = FixtureSet::builtin();
    if let Some(e1) = fixtures.boards_on(shape).find(|f| f.name == "E1") {
        let v = db.value(&e1.constellation, Color::Gray)?;
        println!("CONJECTURE: after Black's broadside E1, Gray to move: {v}");
    }
    if shape.cell_count() < 19 {
        let m = config.marbles() as u32;
        println!("census {}", db.class_census(MarbleFilter::exactly(m, m)));
        for family in ["diamond", "trapezoid"] {
            let Ok(p) = fixtures.pattern(family) else {
                continue;
            };
            if p.board.shape() != shape {
                continue;
            }
            let census = db.pattern_census(&p.pattern);
            println!("CONJECTURE: {family} family classes: {census}");
        }
    }
    if let Some(path) = out {
        save(&db, &path)?;
        eprintln!("wrote {path}");
    }
    Ok(())
}
