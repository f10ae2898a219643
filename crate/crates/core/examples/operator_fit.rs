// Fits `G_n = D_n phi_n E_n` to the Poisson solution operator and saves it.

use edap::approximator::ApproximatorSettings;
use edap::architecture::{family_error, fit_architecture, FitConfig};
use edap::funcspace::{Grid, SpaceTag};
use edap::harness::{make_family, CanonicalOperator, CodecChoice, OperatorKind};

pub fn run_example() -> edap::Result<()> {
    let grid = Grid::unit_interval(129)?;
    let op = CanonicalOperator::new(OperatorKind::Poisson1D, grid.clone())?;
    let spec = op.spec(SpaceTag::ContinuousSup);
    let train = make_family(&"sine2".parse()?, &grid, SpaceTag::ContinuousSup)?;
    let test = make_family(&"sine2-mid".parse()?, &grid, SpaceTag::ContinuousSup)?;
    for n in [4, 8, 16] {
        let plan = CodecChoice::Sampling.plan(n, &grid, 0)?;
        let cfg = FitConfig::new(n, ApproximatorSettings::polynomial(1), 0);
        let arch = fit_architecture("poisson-sampling", &spec, &plan, &cfg, &train)?;
        let (err, _) = family_error(&arch, &spec, &test)?;
        println!("n={n:>2}  residual {:.2e} (target {:.2e})  test error {err:.3e}", arch.report.latent_residual, arch.report.residual_target);
        if n == 16 {
            let dir = std::env::temp_dir().join("edap-operator-fit");
            arch.save(&dir)?;
            println!("saved to {}", dir.display());
        }
    }
    Ok(())
}

fn main() -> edap::Result<()> {
    run_example()
}
