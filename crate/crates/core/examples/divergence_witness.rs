// A continuous function on which nested sampling and Faber-Schauder encoders differ.

use edap::codec::{encoder_divergence, encoder_divergence_witness, NestedSampling};
use edap::funcspace::Grid;

pub fn run_example() -> edap::Result<()> {
    let grid = Grid::unit_interval(257)?;
    let seq = NestedSampling::dyadic(grid.domain(), 6)?;
    let w = encoder_divergence_witness(&seq, &grid)?;
    println!("witness at level {} with k = {} points, divergence {:.3e}", w.n, w.k, w.divergence);
    for n in 1..=6 {
        println!("  level {n}: k = {:>2}, divergence {:.3e}", seq.count(n), encoder_divergence(&w.f, &seq, n)?);
    }
    Ok(())
}

fn main() -> edap::Result<()> {
    run_example()
}
