// Fitting finite-dimensional latent maps: polynomial least squares and kernel ridge.

use edap::approximator::{fit_kernel_ridge, fit_polynomial, FitRegion};

pub fn run_example() -> edap::Result<()> {
    let region = FitRegion::ball(1, 3.0)?;
    let samples: Vec<_> = (0..41).map(|i| {
        let x = -3.0 + 6.0 * i as f64 / 40.0;
        (vec![x], vec![x.sin()])
    }).collect();
    let poly = fit_polynomial(&samples, 7, &region, 0.0)?;
    let kernel = fit_kernel_ridge(&samples, 0.5, 1e-8, &region)?;
    let mut worst = (0.0f64, 0.0f64);
    for i in 0..400 {
        let x = -3.0 + 6.0 * (i as f64 + 0.5) / 400.0;
        worst.0 = worst.0.max((poly.evaluate(&[x])?[0] - x.sin()).abs());
        worst.1 = worst.1.max((kernel.evaluate(&[x])?[0] - x.sin()).abs());
    }
    println!("sin on [-3, 3]: degree-7 polynomial {:.2e}, kernel ridge {:.2e}", worst.0, worst.1);
    Ok(())
}

fn main() -> edap::Result<()> {
    run_example()
}
