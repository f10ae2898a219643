// Midpoint covering of [0, 1]^2 and its bump partition of unity.

use edap::covering::{build_epsilon_covering, partition_of_unity};
use edap::funcspace::Domain;

pub fn run_example() -> edap::Result<()> {
    let domain = Domain::unit(2)?;
    for eps in [0.5, 0.2, 0.1] {
        let pou = partition_of_unity(build_epsilon_covering(&domain, eps)?)?;
        let p = pou.evaluate(&[0.3, 0.7])?;
        let active = p.iter().filter(|v| **v > 0.0).count();
        let sum: f64 = p.iter().sum();
        println!("eps={eps}: {} centers, {active} active at (0.3, 0.7), sum = {sum:.15}", pou.len());
        assert!((sum - 1.0).abs() < 1e-10);
    }
    Ok(())
}

fn main() -> edap::Result<()> {
    run_example()
}
