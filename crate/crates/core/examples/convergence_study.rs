// Nonlinear operator `f -> sin(f)` learned in the sine basis; writes CSV and SVG.

use edap::approximator::ApproximatorSettings;
use edap::codec::BasisSpec;
use edap::funcspace::{Grid, SpaceTag};
use edap::harness::{convergence_study, make_family, render_svg, CanonicalOperator, CodecChoice, OperatorKind, StudySettings};

pub fn run_example() -> edap::Result<()> {
    let grid = Grid::unit_interval(257)?;
    let op = CanonicalOperator::new(OperatorKind::PointwiseSin, grid.clone())?;
    let train = make_family(&"sine2".parse()?, &grid, SpaceTag::L2)?;
    let test = make_family(&"sine2-mid".parse()?, &grid, SpaceTag::L2)?;
    let settings = StudySettings::new(ApproximatorSettings::polynomial(3), 0);
    let (report, _) = convergence_study(&op, CodecChoice::Basis(BasisSpec::SineOnb), &[2, 4, 8], &train, &[train.clone(), test], &settings)?;
    for r in &report.rows {
        println!("{} n={} {:<10} error {:.3e} extrapolated {}", r.arch_id, r.n, r.family, r.sup_error, r.extrapolated);
    }
    let dir = std::env::temp_dir().join("edap-convergence-study");
    std::fs::create_dir_all(&dir)?;
    report.write_csv(std::fs::File::create(dir.join("report.csv"))?)?;
    std::fs::write(dir.join("report.svg"), render_svg(&report, "sin(f) with sine codecs"))?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn main() -> edap::Result<()> {
    run_example()
}
