//! Drives a play session through the same state object the HTTP handlers
//! use. The human takes a drawing move when one is offered, the engine
//! answers, and the game runs into the ply cap.
//!
//! cargo run -p abalone-service --example session

use abalone_core::{solve, GameConfig, SolveOptions};
use abalone_service::{AppState, NewSession, Status};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = GameConfig::preset("2,2,3".parse()?).expect("preset");
    let app = AppState::new([solve(&config, &SolveOptions::default())?]).with_ply_cap(12);
    let view = app.create_session(&NewSession {
        shape: "2,2,3".into(),
        human: Some("black".into()),
        ..NewSession::default()
    })?;
    let id = view.id.clone();
    println!(
        "session {id}: {} ({}, class {})",
        view.board, view.value.outcome, view.outcome_class
    );

    loop {
        let moves = app.moves(&id)?;
        let choice = moves.moves.iter().find(|m| m.value == "Draw");
        let Some(choice) = choice.or(moves.moves.first()) else {
            break;
        };
        let distance = choice
            .distance
            .map_or(String::new(), |d| format!(" in {d}"));
        println!(
            "  human  {:<28} -> {}{distance}",
            choice.description, choice.value
        );
        let view = app.human_move(&id, &choice.text)?;
        if view.status != Status::InProgress {
            break;
        }
        let view = app.engine_move(&id)?;
        let last = view.history.last().expect("engine moved");
        println!("  engine {:<28} -> {}", last.description, view.board);
        if view.status != Status::InProgress {
            break;
        }
    }
    let view = app.view(&id)?;
    println!("final status {:?} after {} plies", view.status, view.ply);
    Ok(())
}
