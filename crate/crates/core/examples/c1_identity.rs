// Sampling of the derivative plus integration approximates in C^1.

use edap::codec::c1_sampling_identity;
use edap::funcspace::{c1_distance, Grid, GridFunction};

pub fn run_example() -> edap::Result<()> {
    let grid = Grid::unit_interval(257)?;
    let f = GridFunction::c1_from_fn(grid.clone(), |x| (3.0 * x).sin(), |x| 3.0 * (3.0 * x).cos())?;
    for n in [4, 8, 16, 32] {
        let t = c1_sampling_identity(n, &grid)?;
        println!("n={n:>2}  C1 error {:.4e}", c1_distance(&f, &t.apply(&f)?)?);
    }
    Ok(())
}

fn main() -> edap::Result<()> {
    run_example()
}
