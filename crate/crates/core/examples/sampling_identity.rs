// `T_n = D_n E_n` for the sampling codec converges uniformly on a compact family.

use edap::codec::sampling_identity;
use edap::funcspace::{Grid, SpaceTag};
use edap::harness::make_family;

pub fn run_example() -> edap::Result<()> {
    let grid = Grid::unit_interval(257)?;
    let fam = make_family(&"sine2".parse()?, &grid, SpaceTag::ContinuousSup)?;
    let l = fam.lipschitz_bound().unwrap_or(f64::NAN);
    let mut last = f64::INFINITY;
    for n in [4, 8, 16, 32] {
        let t = sampling_identity(n, &grid)?;
        let worst = fam.members().iter().map(|f| t.error(f)).try_fold(0.0f64, |m, e| e.map(|e| m.max(e)))?;
        println!("n={n:>2}  sup error {worst:.4e}  bound L/n = {:.4e}", l / n as f64);
        assert!(worst < last);
        last = worst;
    }
    Ok(())
}

fn main() -> edap::Result<()> {
    run_example()
}
