// Replacing basis atoms by nearby functions costs at most `||f|| / n`.

use edap::codec::{dense_decoder_normed, dense_substitution_codec, sampling_identity, BasisSpec, Perturbation};
use edap::funcspace::{Grid, GridFunction, SpaceTag};

pub fn run_example() -> edap::Result<()> {
    let grid = Grid::unit_interval(257)?;
    let f = GridFunction::from_fn(grid.clone(), SpaceTag::L2, |x| (5.0 * x[0]).cos() + x[0])?;
    for n in [2, 4, 8] {
        let (enc, dec, sub) = dense_substitution_codec(n, BasisSpec::SineOnb, &Perturbation::seeded(n as u64), &grid)?;
        let diff = dec.apply(&enc.apply(&f)?)?.sub(&sub.reference_projection(&f)?)?.l2_norm();
        println!("Hilbert n={n}: deviation {:.3e}, |T~f - Tf| = {diff:.3e} <= {:.3e}", sub.total_deviation()?, f.l2_norm() / n as f64);
    }
    // Normed case: sup-norm sampling projection with substituted hat functions.
    let g = f.clone().with_tag(SpaceTag::ContinuousSup)?;
    for n in [4, 8] {
        let base = sampling_identity(n, &grid)?;
        let tf = base.apply(&g)?;
        let (enc, dec, sub) = dense_decoder_normed(base, n, &Perturbation::seeded(7))?;
        let diff = dec.apply(&enc.apply(&g)?)?.sub(&tf)?.sup_norm();
        println!("sup n={n}: per-atom radius {:.3e}, |T~f - Tf| = {diff:.3e} <= {:.3e}", sub.per_atom_radius, g.sup_norm() / n as f64);
    }
    Ok(())
}

fn main() -> edap::Result<()> {
    run_example()
}
