//! Strongly solves 2,2,2 Abalone and prints the outcome class of every
//! named board and its negative, followed by the class census.
//!
//! cargo run -p abalone-core --example table

use abalone_core::fixtures::FixtureSet;
use abalone_core::solver::MarbleFilter;
use abalone_core::{solve, GameConfig, SolveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = GameConfig::preset("2,2,2".parse()?).expect("2,2,2 preset");
    let db = solve(&config, &SolveOptions::default())?;

    print!("{}", FixtureSet::builtin().outcome_table(&db)?);
    println!();
    println!("census {}", db.class_census(MarbleFilter::exactly(2, 2)));
    println!("stalemates {}", db.stalemates());
    Ok(())
}
