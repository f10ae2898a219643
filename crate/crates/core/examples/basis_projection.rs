// Truncated expansions in the Faber-Schauder, sine and Legendre bases.

use edap::codec::{basis_identity, BasisSpec};
use edap::funcspace::{Grid, GridFunction};

pub fn run_example() -> edap::Result<()> {
    let grid = Grid::unit_interval(257)?;
    for spec in [BasisSpec::FaberSchauder, BasisSpec::SineOnb, BasisSpec::LegendreOnb] {
        let f = GridFunction::from_fn(grid.clone(), spec.space(), |x| x[0] * (1.0 - x[0]) * (4.0 * x[0]).exp())?;
        let errs = [4, 8, 16]
            .iter()
            .map(|&n| basis_identity(spec, n, &grid)?.error(&f))
            .collect::<edap::Result<Vec<_>>>()?;
        println!("{:>8}: {:.3e} {:.3e} {:.3e}", spec.to_string(), errs[0], errs[1], errs[2]);
    }
    Ok(())
}

fn main() -> edap::Result<()> {
    run_example()
}
