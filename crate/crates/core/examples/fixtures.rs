//! Re-derives the properties stated for the named boards: self-negativity,
//! option counts, pattern matches and single-move successions.
//!
//! cargo run -p abalone-core --example fixtures -- [fixtures.txt]

use abalone_core::fixtures::{FixtureSet, DEFAULT_FIXTURES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT_FIXTURES.to_string(),
    };
    let fixtures = FixtureSet::parse(&text)?;
    println!(
        "{} boards, {} patterns",
        fixtures.boards().len(),
        fixtures.patterns().len()
    );
    let results = fixtures.verify();
    for r in &results {
        let verdict = if r.passed { "ok  " } else { "FAIL" };
        if r.detail.is_empty() {
            println!("{verdict} {}", r.check);
        } else {
            println!("{verdict} {}: {}", r.check, r.detail);
        }
    }
    if results.iter().any(|r| !r.passed) {
        return Err("some checks failed".into());
    }
    Ok(())
}
