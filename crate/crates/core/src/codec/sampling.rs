use crate::covering::{build_epsilon_covering, partition_of_unity, Covering, PartitionOfUnity};
use crate::error::{EdapError, Result};
use crate::funcspace::{Grid, GridFunction, SpaceTag};

use super::{check_n, param, CodecKind, Decoder, Encoder, EncoderRule, IdentityApproximation};

/// Point evaluation at the covering centers. 1-Lipschitz from the sup norm
/// to the max norm.
pub fn sampling_encoder(cov: &Covering) -> Result<Encoder> {
    Encoder::new(
        CodecKind::Sampling,
        EncoderRule::PointSamples { points: cov.centers().to_vec() },
        1.0,
        vec![param("points", cov.len()), param("epsilon", cov.epsilon())],
    )
}

/// `mu -> sum_i mu_i P_i` sampled on `grid`. Since the `P_i` are a
/// nonnegative partition of unity the map is 1-Lipschitz (max norm to sup).
pub fn sampling_decoder(pou: &PartitionOfUnity, grid: &Grid) -> Result<Decoder> {
    Decoder::new(
        CodecKind::Sampling,
        pou.atoms_on(grid)?,
        SpaceTag::ContinuousSup,
        1.0,
        vec![param("atoms", "partition_of_unity"), param("epsilon", pou.covering().epsilon())],
    )
}

/// `T_n f = sum_i f(y_i) P_{1/n,i}` over the midpoint `1/n`-covering of the
/// grid's domain.
pub fn sampling_identity(n: usize, grid: &Grid) -> Result<IdentityApproximation> {
    check_n(n)?;
    let cov = build_epsilon_covering(grid.domain(), 1.0 / n as f64)?;
    let encoder = sampling_encoder(&cov)?;
    let pou = partition_of_unity(cov)?;
    let decoder = sampling_decoder(&pou, grid)?;
    IdentityApproximation::new(encoder, decoder)
}

/// Identity approximation on `C1([a,b])` built from the fundamental theorem
/// of calculus:
/// `f -> f(a) + sum_i f'(y_i) int_a^y P_{1/n,i}`.
///
/// The antiderivatives are integrated on a grid four times finer than
/// `grid` and read back at its nodes; their derivatives are the `P_i`
/// themselves, so the output carries exact derivative samples.
pub fn c1_sampling_identity(n: usize, grid: &Grid) -> Result<IdentityApproximation> {
    check_n(n)?;
    if grid.dim() != 1 {
        return Err(EdapError::UnsupportedDimension(grid.dim()));
    }
    let domain = grid.domain();
    let cov = build_epsilon_covering(domain, 1.0 / n as f64)?;
    let points: Vec<f64> = cov.centers().iter().map(|c| c[0]).collect();
    let pou = partition_of_unity(cov)?;

    let fine = grid.refined(4);
    let table = pou.cumulative_integrals(&fine)?;
    let p_atoms = pou.atoms_on(grid)?;
    let mut atoms = Vec::with_capacity(points.len() + 1);
    atoms.push(GridFunction::constant(grid.clone(), 1.0, SpaceTag::C1)?);
    for (row, p) in table.iter().zip(&p_atoms) {
        let values: Vec<f64> = (0..grid.len()).map(|j| row[4 * j]).collect();
        atoms.push(GridFunction::c1(grid.clone(), values, p.values().to_vec())?);
    }

    let encoder = Encoder::new(
        CodecKind::Sampling,
        EncoderRule::ValueAndDerivativeSamples { left: domain.lower(0), points },
        1.0,
        vec![param("points", atoms.len() - 1), param("derivative_samples", true)],
    )?;
    let decoder = Decoder::new(
        CodecKind::Sampling,
        atoms,
        SpaceTag::C1,
        2.0 + domain.length(0),
        vec![param("atoms", "antiderivatives_of_partition")],
    )?;
    IdentityApproximation::new(encoder, decoder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{c1_distance, sup_distance, Domain};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::unit_interval(257).unwrap()
    }

    fn cfun(f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(grid(), SpaceTag::ContinuousSup, |p| f(p[0])).unwrap()
    }

    #[test]
    fn sampling_encoder_examples() {
        let cov = Covering::from_centers(Domain::unit_interval(), 0.3, vec![vec![0.0], vec![0.5], vec![1.0]]).unwrap();
        let enc = sampling_encoder(&cov).unwrap();
        assert_eq!(enc.apply(&cfun(|x| x * x)).unwrap(), vec![0.0, 0.25, 1.0]);
        assert_eq!(enc.apply(&cfun(|_| 2.5)).unwrap(), vec![2.5; 3]);
        assert_eq!(enc.lipschitz_estimate(), 1.0);
        let l2 = cfun(|x| x).with_tag(SpaceTag::L2).unwrap();
        assert!(matches!(enc.apply(&l2), Err(EdapError::IllDefinedSampling)));
    }

    #[test]
    fn sampling_encoder_is_one_lipschitz() {
        let cov = build_epsilon_covering(&Domain::unit_interval(), 0.1).unwrap();
        let enc = sampling_encoder(&cov).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let f = GridFunction::new(grid(), (0..257).map(|_| rng.gen_range(-1.0..1.0)).collect(), SpaceTag::ContinuousSup).unwrap();
            let g = GridFunction::new(grid(), (0..257).map(|_| rng.gen_range(-1.0..1.0)).collect(), SpaceTag::ContinuousSup).unwrap();
            let (ef, eg) = (enc.apply(&f).unwrap(), enc.apply(&g).unwrap());
            let d = ef.iter().zip(&eg).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(d <= sup_distance(&f, &g).unwrap() + 1e-15);
        }
    }

    #[test]
    fn sampling_decoder_examples() {
        let pou = partition_of_unity(build_epsilon_covering(&Domain::unit_interval(), 0.125).unwrap()).unwrap();
        let dec = sampling_decoder(&pou, &grid()).unwrap();
        let k = dec.in_dim();
        let c = dec.apply(&vec![1.75; k]).unwrap();
        assert!(c.values().iter().all(|v| (v - 1.75).abs() < 1e-12));
        let mut e = vec![0.0; k];
        e[3] = 1.0;
        assert_eq!(dec.apply(&e).unwrap(), dec.atoms()[3]);
        assert!(matches!(dec.apply(&[1.0]), Err(EdapError::Shape(_))));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mu: Vec<f64> = (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let bound = mu.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(dec.apply(&mu).unwrap().sup_norm() <= bound + 1e-12);
        }
    }

    #[test]
    fn sampling_identity_reproduces_constants() {
        for n in [1, 3, 8, 32] {
            let t = sampling_identity(n, &grid()).unwrap();
            let out = t.apply(&cfun(|_| 3.0)).unwrap();
            assert!(out.values().iter().all(|v| (v - 3.0).abs() <= 1e-12));
        }
    }

    #[test]
    fn sampling_identity_error_is_bounded_by_modulus_of_continuity() {
        // |x - 0.3| is 1-Lipschitz; error must stay below 1/n plus the
        // interpolation slack of reading f at off-grid centers.
        let f = cfun(|x| (x - 0.3).abs());
        for n in [2, 4, 8, 16] {
            let err = sampling_identity(n, &grid()).unwrap().error(&f).unwrap();
            assert!(err <= 1.0 / n as f64 + 1.0 / 256.0, "n={n} err={err}");
        }
        let s = cfun(|x| (PI * x).sin());
        let e4 = sampling_identity(4, &grid()).unwrap().error(&s).unwrap();
        let e16 = sampling_identity(16, &grid()).unwrap().error(&s).unwrap();
        assert!(e16 < e4);
    }

    #[test]
    fn sampling_identity_in_two_dimensions() {
        let g = Grid::new(Domain::unit(2).unwrap(), vec![33, 33]).unwrap();
        let f = GridFunction::from_fn(g.clone(), SpaceTag::ContinuousSup, |p| (p[0] + 2.0 * p[1]).sin()).unwrap();
        let e2 = sampling_identity(2, &g).unwrap().error(&f).unwrap();
        let e8 = sampling_identity(8, &g).unwrap().error(&f).unwrap();
        assert!(e8 < e2, "{e8} vs {e2}");
    }

    #[test]
    fn c1_identity_examples() {
        let t = c1_sampling_identity(8, &grid()).unwrap();
        let id = GridFunction::c1_from_fn(grid(), |x| x, |_| 1.0).unwrap();
        let out = t.apply(&id).unwrap();
        assert_eq!(out.tag(), SpaceTag::C1);
        for (k, v) in out.values().iter().enumerate() {
            assert!((v - grid().coord(0, k)).abs() <= 1e-6);
        }
        let c = GridFunction::c1_from_fn(grid(), |_| -2.0, |_| 0.0).unwrap();
        let out = t.apply(&c).unwrap();
        assert!(out.values().iter().all(|&v| v == -2.0));

        let half_sq = GridFunction::c1_from_fn(grid(), |x| 0.5 * x * x, |x| x).unwrap();
        let e4 = c1_distance(&half_sq, &c1_sampling_identity(4, &grid()).unwrap().apply(&half_sq).unwrap()).unwrap();
        let e16 = c1_distance(&half_sq, &c1_sampling_identity(16, &grid()).unwrap().apply(&half_sq).unwrap()).unwrap();
        assert!(e16 < e4, "{e16} vs {e4}");
    }

    #[test]
    fn c1_identity_derivative_matches_sampling_identity_of_derivative() {
        let g = grid();
        let f = GridFunction::c1_from_fn(g.clone(), |x| 0.5 * x * x, |x| x).unwrap();
        let tf = c1_sampling_identity(6, &g).unwrap().apply(&f).unwrap();
        let fprime = cfun(|x| x);
        let t_fprime = sampling_identity(6, &g).unwrap().apply(&fprime).unwrap();
        for (a, b) in tf.derivative_values().unwrap().iter().zip(t_fprime.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn c1_identity_needs_derivatives() {
        let t = c1_sampling_identity(4, &grid()).unwrap();
        assert!(matches!(t.apply(&cfun(|x| x)), Err(EdapError::Precondition(_))));
        assert!(sampling_identity(0, &grid()).is_err());
    }
}
