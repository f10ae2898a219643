// Canonical dual of a redundant frame and its reconstruction.

use edap::codec::build_frame;
use edap::funcspace::{Grid, GridFunction, SpaceTag};
use edap::harness::overcomplete_sine_frame;

pub fn run_example() -> edap::Result<()> {
    let grid = Grid::unit_interval(257)?;
    let fs = build_frame(overcomplete_sine_frame(6, &grid)?)?;
    let (a, b) = fs.bounds();
    println!("{} atoms, rank {}, bounds A = {a:.4}, B = {b:.4}", fs.len(), fs.rank());
    let f = GridFunction::from_fn(grid, SpaceTag::L2, |x| {
        let t = std::f64::consts::PI * x[0];
        t.sin() - 0.3 * (3.0 * t).sin() + 0.1 * (6.0 * t).sin()
    })?;
    let err = fs.reconstruct(&f)?.sub(&f)?.l2_norm();
    println!("reconstruction error of a span member: {err:.2e}");
    Ok(())
}

fn main() -> edap::Result<()> {
    run_example()
}
