//! Lists every legal move in a position, with the resulting board.
//!
//! cargo run -p abalone-core --example moves -- "2,2,3:....GBB..." black

use abalone_core::rules::{apply_move, moves_on};
use abalone_core::{Color, Constellation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let notation = args.next().unwrap_or_else(|| "2,2,3:G.BG..BG.B".into());
    let mover: Color = args.next().unwrap_or_else(|| "black".into()).parse()?;
    let (board, c) = Constellation::parse(&notation)?;

    println!("{}", c.diagram(&board));
    let moves = moves_on(&board, &c, mover);
    println!("{} moves for {mover}:", moves.len());
    for mv in moves {
        let next = apply_move(&board, &c, &mv);
        println!(
            "  {:<36} {}",
            mv.describe(&board),
            next.cells_string(&board)
        );
    }
    Ok(())
}
