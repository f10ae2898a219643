// The four named architectures assembled from hand-built latent maps.

use edap::approximator::{FitRegion, LatentMap};
use edap::architecture::{basisonet, classical_deeponet, frame_architecture, schauder_deeponet};
use edap::codec::{basis_decoder, basis_encoder, build_frame, BasisSpec};
use edap::covering::build_epsilon_covering;
use edap::funcspace::{Grid, GridFunction, SpaceTag};
use edap::harness::overcomplete_sine_frame;

fn identity_branch(dim: usize, radius: f64) -> edap::Result<Vec<LatentMap>> {
    let region = FitRegion::ball(dim, radius)?;
    let id = LatentMap::identity(&region)?;
    (0..dim).map(|i| {
        let mut a = nalgebra::DMatrix::zeros(1, dim);
        a[(0, i)] = 1.0;
        LatentMap::affine(&a, &[0.0], id.region())
    }).collect()
}

pub fn run_example() -> edap::Result<()> {
    let grid = Grid::unit_interval(257)?;
    let f = GridFunction::from_fn(grid.clone(), SpaceTag::L2, |x| (std::f64::consts::PI * x[0]).sin())?;

    let cov = build_epsilon_covering(grid.domain(), 1.0 / 8.0)?;
    let hats = edap::covering::partition_of_unity(cov.clone())?.atoms_on(&grid)?;
    let deeponet = classical_deeponet(&cov, hats, &identity_branch(cov.len(), 10.0)?)?;
    let fc = f.clone().with_tag(SpaceTag::ContinuousSup)?;
    println!("classical DeepONet    error {:.3e}", deeponet.apply(&fc)?.sub(&fc)?.sup_norm());

    let trunk = BasisSpec::SineOnb.atoms(8, &grid)?;
    let schauder = schauder_deeponet(BasisSpec::SineOnb, 8, trunk, &identity_branch(8, 10.0)?)?;
    println!("Schauder DeepONet     error {:.3e}", schauder.apply(&f)?.sub(&f)?.l2_norm());

    let fs = build_frame(overcomplete_sine_frame(8, &grid)?)?;
    let frame = frame_architecture(&fs, &fs, &identity_branch(fs.len(), 10.0)?)?;
    println!("frame architecture    error {:.3e}", frame.apply(&f)?.sub(&f)?.l2_norm());

    let enc = basis_encoder(BasisSpec::SineOnb, 8, &grid)?;
    let dec = basis_decoder(BasisSpec::SineOnb, 8, &grid)?;
    let bo = basisonet(&enc, &dec, &identity_branch(8, 10.0)?)?;
    println!("BasisONet             error {:.3e}", bo.apply(&f)?.sub(&f)?.l2_norm());
    Ok(())
}

fn main() -> edap::Result<()> {
    run_example()
}
