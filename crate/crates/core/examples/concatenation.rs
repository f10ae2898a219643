// Chaining two fitted architectures approximates the composed operator.

use edap::approximator::ApproximatorSettings;
use edap::architecture::Composition;
use edap::funcspace::{Grid, SpaceTag};
use edap::harness::{convergence_study, make_family, CanonicalOperator, CodecChoice, OperatorKind, StudySettings};

pub fn run_example() -> edap::Result<()> {
    let grid = Grid::unit_interval(257)?;
    let op = CanonicalOperator::new(OperatorKind::Antiderivative, grid.clone())?;
    let spec = op.spec(SpaceTag::ContinuousSup);
    let twice = spec.after(&spec);
    let train = make_family(&"sine2".parse()?, &grid, SpaceTag::ContinuousSup)?;
    let settings = StudySettings::new(ApproximatorSettings::polynomial(1), 0);
    let (_, archs) = convergence_study(&op, CodecChoice::Sampling, &[4, 8, 16], &train, std::slice::from_ref(&train), &settings)?;
    for arch in archs {
        let n = arch.report.n;
        let chain = Composition::new(vec![arch.clone(), arch])?;
        let mut worst = 0.0f64;
        for f in train.members() {
            worst = worst.max(chain.apply(f)?.output.sub(&twice.apply(f)?)?.sup_norm());
        }
        println!("n={n:>2}  double antiderivative error {worst:.3e}");
    }
    Ok(())
}

fn main() -> edap::Result<()> {
    run_example()
}
