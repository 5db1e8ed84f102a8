//! Counts constellations up to board symmetry two ways, by canonicalizing
//! every placement and by Burnside's lemma, for each board and marble count.
//!
//! cargo run -p abalone-core --example enumerate

use abalone_core::canonical::{burnside_count, enumerate_classes};
use abalone_core::Board;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:<6} {:>5} {:>5} {:>9} {:>9} {:>9}",
        "board", "black", "gray", "classes", "burnside", "with -C"
    );
    for (shape, marbles) in [("2,2,2", 2), ("2,2,3", 3), ("2,3,3", 5)] {
        let board = Board::new(shape.parse()?)?;
        println!(
            "# {shape}: {} cells, symmetry group of order {}",
            board.cell_count(),
            board.symmetry_group().len()
        );
        for black in (1..=marbles).rev() {
            for gray in [marbles, black] {
                let plain = enumerate_classes(&board, black, gray, false, false).count;
                let burnside = burnside_count(&board, black, gray, false);
                let negation = burnside_count(&board, black, gray, true);
                println!("{shape:<6} {black:>5} {gray:>5} {plain:>9} {burnside:>9} {negation:>9}");
                assert_eq!(plain, burnside);
                if black == gray {
                    break;
                }
            }
        }
    }
    Ok(())
}
