//! Solves 2,2,2 and 2,2,3 in memory and serves the play API.
//!
//! cargo run -p abalone-service --example serve -- [port]
//! curl -s -XPOST localhost:8080/sessions -d '{"shape":"2,2,3"}' -H 'content-type: application/json'

use std::net::SocketAddr;
use std::sync::Arc;

use abalone_core::{solve, GameConfig, SolveOptions};
use abalone_service::{serve, AppState};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let port: u16 = std::env::args().nth(1).map_or(Ok(8080), |p| p.parse())?;
    let mut dbs = Vec::new();
    for shape in ["2,2,2", "2,2,3"] {
        let config = GameConfig::preset(shape.parse()?).expect("preset");
        dbs.push(solve(&config, &SolveOptions::default())?);
    }
    let app = Arc::new(AppState::new(dbs));
    serve(SocketAddr::from(([127, 0, 0, 1], port)), app).await?;
    Ok(())
}
