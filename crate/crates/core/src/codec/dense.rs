//! Substituting basis atoms by nearby elements of a dense set.
//!
//! Two constructions: the Hilbert-space one, where both encoder and decoder
//! use the substitutes `v_i` with `sum_i ||v_i - b_i|| <= 1/(3n)`, and the
//! normed-space one, where an auxiliary encoder reads the range
//! coefficients of a base identity approximation and only the decoder uses
//! substitutes.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{EdapError, Result};
use crate::funcspace::{l2_inner, Grid, GridFunction, SpaceTag};
use crate::linalg::{pinv, symmetric_pinv};

use super::{check_n, param, BasisSpec, CodecKind, Decoder, Encoder, EncoderRule, IdentityApproximation};

/// Extra sine modes mixed into seeded perturbation directions.
const EXTRA_MODES: usize = 8;
/// Margin keeping rescaled perturbations strictly inside their budget.
const BUDGET_MARGIN: f64 = 1.0 - 1e-9;

/// How substitute atoms are derived from reference atoms.
#[derive(Debug, Clone)]
pub enum Perturbation {
    /// `v_i = b_i`.
    None,
    /// Random smooth directions, scaled to `fraction` of the allowed budget.
    Seeded { seed: u64, fraction: f64 },
    /// Caller-chosen deviations `v_i - b_i`; rescaled if they exceed the budget.
    Explicit(Vec<GridFunction>),
}

impl Perturbation {
    pub fn seeded(seed: u64) -> Self {
        Perturbation::Seeded { seed, fraction: 1.0 }
    }

    fn raw_deltas(&self, count: usize, grid: &Grid) -> Result<Vec<GridFunction>> {
        match self {
            Perturbation::None => Ok(vec![GridFunction::zeros(grid.clone(), SpaceTag::L2); count]),
            Perturbation::Seeded { seed, fraction } => {
                if !(*fraction > 0.0 && *fraction <= 1.0) {
                    return Err(EdapError::Parameter(format!("perturbation fraction {fraction} not in (0, 1]")));
                }
                let modes = BasisSpec::SineOnb.atoms(count + EXTRA_MODES, grid)?;
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..count)
                    .map(|_| {
                        let c: Vec<f64> = (0..modes.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
                        GridFunction::linear_combination(grid, &c, &modes, SpaceTag::L2)
                    })
                    .collect()
            }
            Perturbation::Explicit(deltas) => {
                if deltas.len() != count {
                    return Err(EdapError::Shape(format!("{} deviations for {count} atoms", deltas.len())));
                }
                Ok(deltas.clone())
            }
        }
    }

    fn fraction(&self) -> f64 {
        match self {
            Perturbation::Seeded { fraction, .. } => *fraction,
            _ => 1.0,
        }
    }
}

fn norm_in(tag: SpaceTag, f: &GridFunction) -> f64 {
    match tag {
        SpaceTag::L2 => f.l2_norm(),
        _ => f.sup_norm(),
    }
}

/// Reference atoms, their substitutes and the total-deviation budget.
#[derive(Debug, Clone)]
pub struct DenseSubstitution {
    pub reference_atoms: Vec<GridFunction>,
    pub substitute_atoms: Vec<GridFunction>,
    pub budget: f64,
}

impl DenseSubstitution {
    /// `sum_i ||v_i - b_i||`.
    pub fn total_deviation(&self) -> Result<f64> {
        self.reference_atoms
            .iter()
            .zip(&self.substitute_atoms)
            .map(|(b, v)| v.sub(b).map(|d| d.l2_norm()))
            .sum()
    }

    /// Exact projection `T_n f = sum_i <f, b_i> b_i`.
    pub fn reference_projection(&self, f: &GridFunction) -> Result<GridFunction> {
        let c = self.reference_atoms.iter().map(|b| l2_inner(f, b)).collect::<Result<Vec<_>>>()?;
        GridFunction::linear_combination(f.grid(), &c, &self.reference_atoms, SpaceTag::L2)
    }
}

/// Hilbert-space dense codec over an orthonormal reference basis:
/// `E f = (<f, v_i>)_i`, `D mu = sum_i mu_i v_i`.
pub fn dense_substitution_codec(
    n: usize,
    reference: BasisSpec,
    perturbation: &Perturbation,
    grid: &Grid,
) -> Result<(Encoder, Decoder, DenseSubstitution)> {
    check_n(n)?;
    if !reference.is_orthonormal() {
        return Err(EdapError::Configuration(format!("{reference} is not an orthonormal basis")));
    }
    let reference_atoms = reference.atoms(n, grid)?;
    let budget = 1.0 / (3.0 * n as f64);
    let mut deltas = perturbation.raw_deltas(n, grid)?;
    let raw_total: f64 = deltas.iter().map(|d| d.l2_norm()).sum();
    let scale = match perturbation {
        Perturbation::None => 0.0,
        Perturbation::Seeded { .. } if raw_total > 0.0 => perturbation.fraction() * budget * BUDGET_MARGIN / raw_total,
        Perturbation::Explicit(_) if raw_total > budget * (1.0 + 1e-12) => budget * BUDGET_MARGIN / raw_total,
        _ => 1.0,
    };
    if scale != 1.0 {
        deltas = deltas.iter().map(|d| d.scaled(scale)).collect();
    }
    let substitute_atoms = reference_atoms
        .iter()
        .zip(&deltas)
        .map(|(b, d)| b.axpy(1.0, d))
        .collect::<Result<Vec<_>>>()?;
    let sub = DenseSubstitution { reference_atoms, substitute_atoms, budget };
    let total = sub.total_deviation()?;
    if total > budget * (1.0 + 1e-12) {
        return Err(EdapError::Construction(format!("substitutes deviate by {total}, budget {budget}")));
    }
    let frame_norm = sub.substitute_atoms.iter().map(|v| v.l2_norm().powi(2)).sum::<f64>().sqrt();
    let params = vec![param("reference", reference), param("n", n), param("budget", budget), param("deviation", total)];
    let encoder = Encoder::new(
        CodecKind::Dense,
        EncoderRule::InnerProducts { atoms: sub.substitute_atoms.clone() },
        frame_norm,
        params.clone(),
    )?;
    let decoder = Decoder::new(CodecKind::Dense, sub.substitute_atoms.clone(), SpaceTag::L2, frame_norm, params)?;
    Ok((encoder, decoder, sub))
}

/// Linear functionals returning the coordinates of an element of
/// `span(b_1..b_k)` with respect to the `b_i`.
#[derive(Debug, Clone)]
pub struct RangeCoefficients {
    /// `k x nodes`, applied to node values.
    matrix: DMatrix<f64>,
    /// Upper bound for `sum_i |c_i(g)| / ||g||` on the span.
    p_bound: f64,
    norm: SpaceTag,
}

impl RangeCoefficients {
    /// For `L2` the coordinates come from the Gram system; for the sup norm
    /// from the node-value pseudoinverse. Dependent atoms leave the
    /// coordinates undefined and are rejected.
    pub fn from_range_basis(atoms: &[GridFunction], norm: SpaceTag) -> Result<Self> {
        let k = atoms.len();
        if k == 0 {
            return Err(EdapError::Configuration("range basis is empty".into()));
        }
        let grid = atoms[0].grid();
        let nodes = grid.len();
        let b = DMatrix::from_fn(nodes, k, |r, c| atoms[c].values()[r]);
        match norm {
            SpaceTag::L2 => {
                let w = grid.trapezoid_weights();
                let bw = DMatrix::from_fn(k, nodes, |r, c| b[(c, r)] * w[c]);
                let gram = &bw * &b;
                let eig = symmetric_pinv(&gram, 1e-12)?;
                if eig.rank < k {
                    return Err(EdapError::Configuration(format!(
                        "range basis is dependent (rank {} of {k}); coefficient functionals undefined",
                        eig.rank
                    )));
                }
                let matrix = &eig.pinv * bw;
                let p_bound = (k as f64 / eig.eigenvalues[0]).sqrt();
                Ok(Self { matrix, p_bound, norm })
            }
            SpaceTag::ContinuousSup => {
                let svd = b.clone().svd(false, false);
                let top = svd.singular_values.max();
                if svd.rank(1e-12 * top) < k {
                    return Err(EdapError::Configuration(
                        "range basis is dependent; coefficient functionals undefined".into(),
                    ));
                }
                let matrix = pinv(&b, 1e-12)?;
                let p_bound = matrix.iter().map(|v| v.abs()).sum();
                Ok(Self { matrix, p_bound, norm })
            }
            SpaceTag::C1 => Err(EdapError::Configuration("C1 range coefficients are not supported".into())),
        }
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    pub fn p_bound(&self) -> f64 {
        self.p_bound
    }

    pub fn norm(&self) -> SpaceTag {
        self.norm
    }

    pub fn apply(&self, g: &GridFunction) -> Result<Vec<f64>> {
        if g.values().len() != self.matrix.ncols() {
            return Err(EdapError::Shape(format!(
                "function has {} nodes, functionals expect {}",
                g.values().len(),
                self.matrix.ncols()
            )));
        }
        Ok((0..self.matrix.nrows())
            .map(|r| self.matrix.row(r).iter().zip(g.values()).map(|(a, b)| a * b).sum())
            .collect())
    }
}

/// Normed-space substitution: base `T_n`, its range coefficients and the
/// substitutes used by the dense decoder.
#[derive(Debug, Clone)]
pub struct NormedSubstitution {
    pub base: IdentityApproximation,
    pub coefficients: RangeCoefficients,
    pub substitute_atoms: Vec<GridFunction>,
    /// Each `||v_i - b_i||` stays below this radius.
    pub per_atom_radius: f64,
    pub operator_norm: f64,
}

impl NormedSubstitution {
    pub fn max_deviation(&self) -> Result<f64> {
        self.base
            .decoder
            .atoms()
            .iter()
            .zip(&self.substitute_atoms)
            .map(|(b, v)| v.sub(b).map(|d| norm_in(self.coefficients.norm(), &d)))
            .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))
    }
}

/// Auxiliary encoder `f -> c(T_n f)` and dense decoder `mu -> sum mu_i v_i`
/// with `||v_i - b_i|| < 1 / (n p_n ||T_n||)`, which yields
/// `||T~_n f - T_n f|| <= ||f|| / n`.
pub fn dense_decoder_normed(
    base: IdentityApproximation,
    n: usize,
    perturbation: &Perturbation,
) -> Result<(Encoder, Decoder, NormedSubstitution)> {
    check_n(n)?;
    let norm = match base.decoder.out_tag() {
        SpaceTag::C1 => return Err(EdapError::Configuration("normed substitution needs an L2 or sup base".into())),
        t => t,
    };
    let range = base.decoder.atoms().to_vec();
    let coefficients = RangeCoefficients::from_range_basis(&range, norm)?;
    let operator_norm = base.norm_bound();
    let radius = 1.0 / (n as f64 * coefficients.p_bound() * operator_norm);

    let grid = base.decoder.grid().clone();
    let deltas = perturbation.raw_deltas(range.len(), &grid)?;
    let cap = perturbation.fraction() * radius * BUDGET_MARGIN;
    let substitute_atoms = range
        .iter()
        .zip(&deltas)
        .map(|(b, d)| {
            let size = norm_in(norm, d);
            let scale = match perturbation {
                Perturbation::None => 0.0,
                Perturbation::Seeded { .. } if size > 0.0 => cap / size,
                Perturbation::Explicit(_) if size > cap => cap / size,
                _ => 1.0,
            };
            let mut v = b.axpy(scale, d)?;
            if norm == SpaceTag::ContinuousSup {
                v = v.with_tag(SpaceTag::ContinuousSup)?;
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;

    let sub = NormedSubstitution {
        base: base.clone(),
        coefficients: coefficients.clone(),
        substitute_atoms,
        per_atom_radius: radius,
        operator_norm,
    };
    let worst = sub.max_deviation()?;
    if worst >= radius {
        return Err(EdapError::Construction(format!("substitute deviates by {worst}, radius {radius}")));
    }
    let params = vec![param("n", n), param("p_bound", coefficients.p_bound()), param("radius", radius)];
    let encoder = Encoder::new(
        CodecKind::Auxiliary,
        EncoderRule::Auxiliary { base: Box::new(base), coefficients: Box::new(coefficients.clone()) },
        coefficients.p_bound() * operator_norm,
        params.clone(),
    )?;
    let decoder_lipschitz: f64 = sub.substitute_atoms.iter().map(|v| norm_in(norm, v)).sum();
    let decoder = Decoder::new(CodecKind::Dense, sub.substitute_atoms.clone(), norm, decoder_lipschitz, params)?;
    Ok((encoder, decoder, sub))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{basis_identity, sampling_identity};
    use std::f64::consts::{PI, SQRT_2};

    fn grid() -> Grid {
        Grid::unit_interval(257).unwrap()
    }

    fn l2(f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(grid(), SpaceTag::L2, |p| f(p[0])).unwrap()
    }

    fn apply(enc: &Encoder, dec: &Decoder, f: &GridFunction) -> GridFunction {
        dec.apply(&enc.apply(f).unwrap()).unwrap()
    }

    #[test]
    fn zero_perturbation_is_the_exact_projection() {
        let (enc, dec, sub) = dense_substitution_codec(4, BasisSpec::SineOnb, &Perturbation::None, &grid()).unwrap();
        let f = l2(|x| x * (1.0 - x).powi(2));
        let exact = basis_identity(BasisSpec::SineOnb, 4, &grid()).unwrap().apply(&f).unwrap();
        assert!(apply(&enc, &dec, &f).sub(&exact).unwrap().sup_norm() <= 1e-12);
        assert_eq!(sub.total_deviation().unwrap(), 0.0);
    }

    #[test]
    fn seeded_perturbation_hits_the_budget_and_respects_the_bound() {
        for n in [1, 2, 5] {
            let (enc, dec, sub) = dense_substitution_codec(n, BasisSpec::SineOnb, &Perturbation::seeded(17), &grid()).unwrap();
            let dev = sub.total_deviation().unwrap();
            assert!(dev <= sub.budget && dev > 0.99 * sub.budget);
            for k in 1..6 {
                let f = l2(|x| (k as f64 * x).cos() + x);
                let lhs = apply(&enc, &dec, &f).sub(&sub.reference_projection(&f).unwrap()).unwrap().l2_norm();
                assert!(lhs <= f.l2_norm() / n as f64);
            }
        }
    }

    #[test]
    fn single_atom_closed_form() {
        let b1 = l2(|x| SQRT_2 * (PI * x).sin());
        let b2 = l2(|x| SQRT_2 * (2.0 * PI * x).sin());
        let delta = 1.0 / 3.0;
        let pert = Perturbation::Explicit(vec![b2.scaled(delta)]);
        let (enc, dec, _) = dense_substitution_codec(1, BasisSpec::SineOnb, &pert, &grid()).unwrap();
        let out = apply(&enc, &dec, &b1);
        // <b1, b1 + delta b2> = 1, so the output is b1 + delta b2 itself.
        let expected = b1.axpy(delta, &b2).unwrap();
        assert!(out.sub(&expected).unwrap().sup_norm() < 1e-12);
        let deviation = out.sub(&b1).unwrap().l2_norm();
        assert!((deviation - delta).abs() < 1e-12);
        assert!(deviation <= 1.0);
    }

    #[test]
    fn oversized_explicit_deviation_is_rescaled() {
        let b2 = l2(|x| SQRT_2 * (2.0 * PI * x).sin());
        let pert = Perturbation::Explicit(vec![b2.scaled(5.0)]);
        let (_, _, sub) = dense_substitution_codec(1, BasisSpec::SineOnb, &pert, &grid()).unwrap();
        assert!(sub.total_deviation().unwrap() <= sub.budget);
    }

    #[test]
    fn dense_codec_needs_an_orthonormal_reference() {
        assert!(matches!(
            dense_substitution_codec(2, BasisSpec::FaberSchauder, &Perturbation::None, &grid()),
            Err(EdapError::Configuration(_))
        ));
    }

    #[test]
    fn range_coefficients_recover_coordinates() {
        let base = sampling_identity(6, &grid()).unwrap();
        let rc = RangeCoefficients::from_range_basis(base.decoder.atoms(), SpaceTag::ContinuousSup).unwrap();
        let mu = [0.5, -1.0, 2.0, 0.0, 3.0, 1.5];
        let g = base.decoder.apply(&mu).unwrap();
        for (a, b) in rc.apply(&g).unwrap().iter().zip(mu) {
            assert!((a - b).abs() < 1e-9);
        }
        let s = basis_identity(BasisSpec::SineOnb, 3, &grid()).unwrap();
        let rc = RangeCoefficients::from_range_basis(s.decoder.atoms(), SpaceTag::L2).unwrap();
        assert!((rc.p_bound() - 3f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn dependent_range_basis_is_a_configuration_error() {
        let b = BasisSpec::SineOnb.atoms(1, &grid()).unwrap();
        let atoms = vec![b[0].clone(), b[0].scaled(2.0)];
        assert!(matches!(
            RangeCoefficients::from_range_basis(&atoms, SpaceTag::L2),
            Err(EdapError::Configuration(_))
        ));
    }

    #[test]
    fn normed_substitution_identity_and_bound() {
        for base in [
            basis_identity(BasisSpec::SineOnb, 4, &grid()).unwrap(),
            sampling_identity(4, &grid()).unwrap(),
        ] {
            let tag = base.decoder.out_tag();
            let (enc0, dec0, _) = dense_decoder_normed(base.clone(), 4, &Perturbation::None).unwrap();
            let f = GridFunction::from_fn(grid(), tag, |p| (3.0 * p[0]).sin()).unwrap();
            let tf = base.apply(&f).unwrap();
            assert!(apply(&enc0, &dec0, &f).sub(&tf).unwrap().sup_norm() < 1e-9);
            let zero = GridFunction::zeros(grid(), tag);
            assert_eq!(apply(&enc0, &dec0, &zero).sup_norm(), 0.0);

            let (enc, dec, sub) = dense_decoder_normed(base.clone(), 4, &Perturbation::seeded(3)).unwrap();
            assert!(sub.max_deviation().unwrap() < sub.per_atom_radius);
            for k in 1..8 {
                let f = GridFunction::from_fn(grid(), tag, |p| (k as f64 * p[0]).sin() - 0.3 * k as f64).unwrap();
                let diff = apply(&enc, &dec, &f).sub(&base.apply(&f).unwrap()).unwrap();
                assert!(norm_in(tag, &diff) <= norm_in(tag, &f) / 4.0);
            }
        }
    }
}
