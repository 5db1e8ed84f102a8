//! Solves a variant, writes the database file, reads it back and checks
//! that every state survived. Damaged files are rejected on load.
//!
//! cargo run -p abalone-core --example database_file -- [2,2,3] [path]

use abalone_core::store::{load, save};
use abalone_core::{solve, Color, GameConfig, SolveOptions, StateIndex};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let shape = args.next().unwrap_or_else(|| "2,2,3".into()).parse()?;
    let path = args
        .next()
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join(format!("abalone-{shape}.db")));
    let config = GameConfig::preset(shape).ok_or("no starting position for this shape")?;
    let db = solve(&config, &SolveOptions::default())?;

    save(&db, &path)?;
    let bytes = std::fs::metadata(&path)?.len();
    println!(
        "wrote {} ({} states, {bytes} bytes)",
        path.display(),
        db.space().len()
    );

    let back = load(&path)?;
    assert_eq!(back, db);
    let space = back.space();
    let (c, to_move) = space.unrank(StateIndex(space.len() / 2))?;
    println!(
        "state {} is {} with {to_move} to move: {}",
        space.len() / 2,
        c.notation(config.board()),
        back.value(&c, to_move)?
    );
    println!(
        "start, Black to move: {}",
        back.value(&config.initial(), Color::Black)?
    );

    let mut damaged = std::fs::read(&path)?;
    let middle = damaged.len() / 2;
    damaged[middle] ^= 0x10;
    std::fs::write(&path, &damaged)?;
    match load(&path) {
        Ok(_) => println!("damaged file loaded?"),
        Err(e) => println!("damaged file rejected: {e}"),
    }
    std::fs::remove_file(&path)?;
    Ok(())
}
