//! Encoder-decoder architectures `G_n = D_n^Y o phi_n o E_n^X`.
//!
//! [`fit_architecture`] follows the constructive route: fix the ball
//! `B_n = B(0, r(n))` with `r(n) = |E_n^X(f_0)| + n L_n^X`, sample latent
//! inputs there, and fit `phi_n` to `E_n^Y o G o D_n^X`.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::approximator::{ApproximatorSettings, FitRegion, LatentMap};
use crate::codec::{
    basis_encoder, frame_decoder, frame_encoder, sampling_encoder, BasisSpec, CodecKind, Decoder, Encoder,
    FrameSystem, IdentityApproximation,
};
use crate::covering::Covering;
use crate::error::{EdapError, Result};
use crate::funcspace::{distance_in, CompactFamily, GridFunction, SpaceTag};

/// A fit is flagged when its latent residual exceeds this multiple of the target.
pub const FIT_WARNING_FACTOR: f64 = 10.0;
/// Encoded members outweigh jitter so the fit stays accurate on the data and
/// the jitter only shapes directions the members leave free.
pub const DEFAULT_MEMBER_WEIGHT: f64 = 128.0;

pub type OperatorRule = Arc<dyn Fn(&GridFunction) -> Result<GridFunction> + Send + Sync>;

/// Deterministic operator `G: X -> Y` between tagged spaces.
#[derive(Clone)]
pub struct OperatorSpec {
    name: String,
    input_space: SpaceTag,
    output_space: SpaceTag,
    rule: OperatorRule,
}

impl fmt::Debug for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperatorSpec({}: {} -> {})", self.name, self.input_space, self.output_space)
    }
}

impl OperatorSpec {
    pub fn new(name: impl Into<String>, input_space: SpaceTag, output_space: SpaceTag, rule: OperatorRule) -> Self {
        Self { name: name.into(), input_space, output_space, rule }
    }

    pub fn identity(space: SpaceTag) -> Self {
        Self::new("identity", space, space, Arc::new(|f: &GridFunction| Ok(f.clone())))
    }

    pub fn zero(input_space: SpaceTag, output_space: SpaceTag) -> Self {
        Self::new(
            "zero",
            input_space,
            output_space,
            Arc::new(move |f: &GridFunction| Ok(GridFunction::zeros(f.grid().clone(), output_space))),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input_space(&self) -> SpaceTag {
        self.input_space
    }

    pub fn output_space(&self) -> SpaceTag {
        self.output_space
    }

    /// Applies the rule after viewing `f` in the input space; the result
    /// is tagged with the output space.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        let f = if f.tag() == self.input_space { f.clone() } else { f.clone().with_tag(self.input_space)? };
        let g = (self.rule)(&f)?;
        if g.tag() == self.output_space {
            Ok(g)
        } else {
            g.with_tag(self.output_space)
        }
    }

    /// `self` after `first`.
    pub fn after(&self, first: &OperatorSpec) -> OperatorSpec {
        let (a, b) = (first.clone(), self.clone());
        OperatorSpec::new(
            format!("{}_of_{}", self.name, first.name),
            first.input_space,
            self.output_space,
            Arc::new(move |f: &GridFunction| b.apply(&a.apply(f)?)),
        )
    }
}

/// Input-side and output-side identity approximations used for one `n`.
#[derive(Debug, Clone)]
pub struct CodecPlan {
    pub input: IdentityApproximation,
    pub output: IdentityApproximation,
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub n: usize,
    /// `f_0`; the zero function when `None`.
    pub anchor: Option<GridFunction>,
    pub jitter_per_member: usize,
    /// Jitter standard deviation as a fraction of `r(n)`.
    pub jitter_fraction: f64,
    /// Least-squares weight of an encoded member relative to a jitter point.
    pub member_weight: f64,
    pub seed: u64,
    pub approximator: ApproximatorSettings,
}

impl FitConfig {
    pub fn new(n: usize, approximator: ApproximatorSettings, seed: u64) -> Self {
        Self { n, anchor: None, jitter_per_member: 8, jitter_fraction: 0.05, member_weight: DEFAULT_MEMBER_WEIGHT, seed, approximator }
    }
}

/// What happened during a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub n: usize,
    pub radius: f64,
    pub samples: usize,
    /// Training members whose encoding fell outside the ball and was clipped.
    pub clipped_members: usize,
    /// Max-norm latent training residual.
    pub latent_residual: f64,
    /// `1 / (n L_n^Y)`.
    pub residual_target: f64,
    pub meets_target: bool,
    pub warning: Option<String>,
    pub seed: u64,
    pub approximator: String,
}

impl FitReport {
    /// Report for architectures assembled from a given latent map.
    pub fn assembled(latent: &LatentMap) -> Self {
        Self {
            n: 0,
            radius: latent.region().radius(),
            samples: 0,
            clipped_members: 0,
            latent_residual: latent.fit_residual(),
            residual_target: f64::INFINITY,
            meets_target: true,
            warning: None,
            seed: 0,
            approximator: latent.family().name().to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Architecture {
    pub id: String,
    pub input_space: SpaceTag,
    pub encoder: Encoder,
    pub latent: LatentMap,
    pub decoder: Decoder,
    pub report: FitReport,
}

/// Output of [`apply_architecture`].
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub output: GridFunction,
    /// The encoding left the fit region.
    pub extrapolated: bool,
}

impl Architecture {
    pub fn new(
        id: impl Into<String>,
        input_space: SpaceTag,
        encoder: Encoder,
        latent: LatentMap,
        decoder: Decoder,
        report: FitReport,
    ) -> Result<Self> {
        if encoder.out_dim() != latent.in_dim() || latent.out_dim() != decoder.in_dim() {
            return Err(EdapError::Shape(format!(
                "encoder {} -> latent {}x{} -> decoder {}",
                encoder.out_dim(),
                latent.in_dim(),
                latent.out_dim(),
                decoder.in_dim()
            )));
        }
        Ok(Self { id: id.into(), input_space, encoder, latent, decoder, report })
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        apply_architecture(self, f).map(|e| e.output)
    }

    /// `manifest.txt`, `latent.csv` and `decoder_atoms.csv` in `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let r = &self.report;
        let mut m = String::new();
        m.push_str(&format!("id={}\ninput_space={}\n", self.id, self.input_space));
        m.push_str(&format!("encoder_kind={}\ndecoder_kind={}\n", self.encoder.kind(), self.decoder.kind()));
        m.push_str(&format!("n={}\nseed={}\napproximator={}\n", r.n, r.seed, r.approximator));
        m.push_str(&format!("radius={}\nsamples={}\nclipped_members={}\n", r.radius, r.samples, r.clipped_members));
        m.push_str(&format!("latent_residual={}\nresidual_target={}\nmeets_target={}\n", r.latent_residual, r.residual_target, r.meets_target));
        if let Some(w) = &r.warning {
            m.push_str(&format!("warning={w}\n"));
        }
        for (prefix, block) in [("encoder", self.encoder.descriptor()), ("decoder", self.decoder.descriptor())] {
            for line in block.lines() {
                m.push_str(&format!("{prefix}.{line}\n"));
            }
        }
        fs::write(dir.join("manifest.txt"), m)?;
        self.latent.write_csv(fs::File::create(dir.join("latent.csv"))?)?;
        let mut w = csv::Writer::from_writer(fs::File::create(dir.join("decoder_atoms.csv"))?);
        w.write_record(["atom", "node", "value"])?;
        for (i, a) in self.decoder.atoms().iter().enumerate() {
            for (j, v) in a.values().iter().enumerate() {
                w.write_record(&[i.to_string(), j.to_string(), v.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// `(D o phi o E)(f)` with the extrapolation flag.
pub fn apply_architecture(arch: &Architecture, f: &GridFunction) -> Result<Evaluation> {
    if f.tag() != arch.input_space {
        return Err(EdapError::Precondition(format!(
            "architecture expects {} input, got {}",
            arch.input_space,
            f.tag()
        )));
    }
    let x = arch.encoder.apply(f)?;
    let extrapolated = arch.latent.is_extrapolation(&x);
    let output = arch.decoder.apply(&arch.latent.evaluate(&x)?)?;
    Ok(Evaluation { output, extrapolated })
}

fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Fits `phi_n` on encoded training members plus Gaussian jitter, all inside
/// `B(0, r(n))`, against the latent targets `E^Y(G(D^X x))`.
pub fn fit_architecture(
    id: impl Into<String>,
    op: &OperatorSpec,
    plan: &CodecPlan,
    cfg: &FitConfig,
    train: &CompactFamily,
) -> Result<Architecture> {
    if cfg.n == 0 {
        return Err(EdapError::Parameter("n must be at least 1".into()));
    }
    if train.is_empty() {
        return Err(EdapError::Configuration("empty training family".into()));
    }
    if !(cfg.member_weight > 0.0 && cfg.member_weight.is_finite()) {
        return Err(EdapError::Parameter(format!("member weight {} must be positive", cfg.member_weight)));
    }
    if !(cfg.jitter_fraction >= 0.0 && cfg.jitter_fraction.is_finite()) {
        return Err(EdapError::Parameter(format!("jitter fraction {} must be nonnegative", cfg.jitter_fraction)));
    }
    let (enc_x, dec_x) = (&plan.input.encoder, &plan.input.decoder);
    let (enc_y, dec_y) = (&plan.output.encoder, &plan.output.decoder);
    if enc_x.out_dim() != dec_x.in_dim() || enc_y.out_dim() != dec_y.in_dim() {
        return Err(EdapError::Shape("codec plan encoders and decoders disagree in dimension".into()));
    }

    let anchor_norm = match &cfg.anchor {
        Some(f0) => euclidean_norm(&enc_x.apply(f0)?),
        None => 0.0,
    };
    let radius = anchor_norm + cfg.n as f64 * enc_x.euclidean_lipschitz();
    let dim = enc_x.out_dim();
    let region = FitRegion::ball(dim, radius)?;

    let mut inputs = Vec::with_capacity(train.len() * (cfg.jitter_per_member + 1));
    let mut clipped_members = 0;
    let mut encoded = Vec::with_capacity(train.len());
    for f in train.members() {
        let f = if f.tag() == op.input_space() { f.clone() } else { f.clone().with_tag(op.input_space())? };
        let x = enc_x.apply(&f)?;
        if !region.contains(&x) {
            clipped_members += 1;
        }
        let x = region.clip(&x);
        inputs.push(x.clone());
        encoded.push(x);
    }
    let sigma = cfg.jitter_fraction * radius;
    if sigma > 0.0 {
        let normal = Normal::new(0.0, sigma).map_err(|e| EdapError::Parameter(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for x in &encoded {
            for _ in 0..cfg.jitter_per_member {
                let p: Vec<f64> = x.iter().map(|v| v + normal.sample(&mut rng)).collect();
                inputs.push(region.clip(&p));
            }
        }
    }

    let samples = inputs
        .into_iter()
        .map(|x| {
            let g = op.apply(&dec_x.apply(&x)?)?;
            let y = enc_y.apply(&g)?;
            Ok((x, y))
        })
        .collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> =
        (0..samples.len()).map(|i| if i < encoded.len() { cfg.member_weight } else { 1.0 }).collect();
    let latent = cfg.approximator.fit_weighted(&samples, &weights, &region)?;

    let residual_target = 1.0 / (cfg.n as f64 * dec_y.lipschitz_estimate());
    let latent_residual = latent.fit_residual();
    let warning = (latent_residual > FIT_WARNING_FACTOR * residual_target).then(|| {
        format!("latent residual {latent_residual:e} exceeds {FIT_WARNING_FACTOR}x the target {residual_target:e}")
    });
    let report = FitReport {
        n: cfg.n,
        radius,
        samples: samples.len(),
        clipped_members,
        latent_residual,
        residual_target,
        meets_target: latent_residual <= residual_target,
        warning,
        seed: cfg.seed,
        approximator: cfg.approximator.describe(),
    };
    Architecture::new(id, op.input_space(), enc_x.clone(), latent, dec_y.clone(), report)
}

/// `sup_{f in family} d_Y(G f, G_n f)` and the number of members whose
/// encoding left the fit region.
pub fn family_error(arch: &Architecture, op: &OperatorSpec, family: &CompactFamily) -> Result<(f64, usize)> {
    let mut worst = 0.0f64;
    let mut extrapolated = 0;
    for f in family.members() {
        let f = if f.tag() == arch.input_space { f.clone() } else { f.clone().with_tag(arch.input_space)? };
        let exact = op.apply(&f)?;
        let eval = apply_architecture(arch, &f)?;
        extrapolated += eval.extrapolated as usize;
        worst = worst.max(distance_in(op.output_space(), &exact, &eval.output)?);
    }
    Ok((worst, extrapolated))
}

/// Architectures applied one after another, `H_n o G_n`.
#[derive(Debug, Clone)]
pub struct Composition {
    pub stages: Vec<Architecture>,
}

impl Composition {
    pub fn new(stages: Vec<Architecture>) -> Result<Self> {
        if stages.is_empty() {
            return Err(EdapError::Configuration("empty composition".into()));
        }
        Ok(Self { stages })
    }

    pub fn apply(&self, f: &GridFunction) -> Result<Evaluation> {
        let mut current = f.clone();
        let mut extrapolated = false;
        for stage in &self.stages {
            if current.tag() != stage.input_space {
                current = current.with_tag(stage.input_space)?;
            }
            let e = apply_architecture(stage, &current)?;
            extrapolated |= e.extrapolated;
            current = e.output;
        }
        Ok(Evaluation { output: current, extrapolated })
    }
}

fn dense_decoder(atoms: Vec<GridFunction>) -> Result<Decoder> {
    let tag = atoms.first().map(|a| a.tag()).unwrap_or(SpaceTag::ContinuousSup);
    let tag = if tag == SpaceTag::C1 { SpaceTag::ContinuousSup } else { tag };
    let lipschitz = atoms.iter().map(|a| a.norm()).sum();
    Decoder::new(CodecKind::Dense, atoms, tag, lipschitz, vec![("atoms".into(), "dense".into())])
}

fn assemble(id: &str, input_space: SpaceTag, encoder: Encoder, phis: &[LatentMap], decoder: Decoder) -> Result<Architecture> {
    let latent = LatentMap::stack(phis)?;
    let report = FitReport::assembled(&latent);
    Architecture::new(id, input_space, encoder, latent, decoder, report)
}

/// Sampling encoder at the covering centers, latent stack
/// `phi = (phi_1, ..., phi_p)` and decoder `mu -> sum_i mu_i v_i`.
pub fn classical_deeponet(cov: &Covering, trunk: Vec<GridFunction>, branch: &[LatentMap]) -> Result<Architecture> {
    assemble("classical_deeponet", SpaceTag::ContinuousSup, sampling_encoder(cov)?, branch, dense_decoder(trunk)?)
}

/// Basis-coefficient encoder of the first `n` elements of `basis`, then a
/// dense decoder.
pub fn schauder_deeponet(
    basis: BasisSpec,
    n: usize,
    trunk: Vec<GridFunction>,
    phis: &[LatentMap],
) -> Result<Architecture> {
    let grid = trunk.first().ok_or_else(|| EdapError::Shape("no trunk atoms".into()))?.grid().clone();
    assemble("schauder_deeponet", basis.space(), basis_encoder(basis, n, &grid)?, phis, dense_decoder(trunk)?)
}

/// Dual-frame analysis on `X`, frame synthesis on `Y`.
pub fn frame_architecture(fs_x: &FrameSystem, fs_y: &FrameSystem, phis: &[LatentMap]) -> Result<Architecture> {
    assemble("frame_architecture", SpaceTag::L2, frame_encoder(fs_x)?, phis, frame_decoder(fs_y)?)
}

/// Dense codecs on both sides.
pub fn basisonet(enc_x: &Encoder, dec_y: &Decoder, phis: &[LatentMap]) -> Result<Architecture> {
    assemble("basisonet", SpaceTag::L2, enc_x.clone(), phis, dec_y.clone())
}

/// Writes `key=value` lines.
pub fn write_manifest<W: Write>(mut w: W, entries: &[(String, String)]) -> Result<()> {
    for (k, v) in entries {
        writeln!(w, "{k}={v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{
        basis_identity, build_frame, dense_substitution_codec, sampling_identity, Perturbation,
    };
    use crate::covering::build_epsilon_covering;
    use crate::funcspace::{Domain, Grid};
    use nalgebra::DMatrix;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::unit_interval(257).unwrap()
    }

    fn antiderivative() -> OperatorSpec {
        OperatorSpec::new(
            "antiderivative",
            SpaceTag::ContinuousSup,
            SpaceTag::ContinuousSup,
            Arc::new(|f: &GridFunction| {
                let g = f.grid();
                let h = g.spacing(0);
                let mut acc = vec![0.0; g.len()];
                for i in 1..g.len() {
                    acc[i] = acc[i - 1] + 0.5 * h * (f.values()[i - 1] + f.values()[i]);
                }
                GridFunction::new(g.clone(), acc, SpaceTag::ContinuousSup)
            }),
        )
    }

    fn family(tag: SpaceTag, offset: f64) -> CompactFamily {
        let g = grid();
        let params: Vec<Vec<f64>> =
            [-1.0, -0.5, 0.5, 1.0].iter().flat_map(|&a| [-1.0, 1.0].map(|b| vec![a + offset, b])).collect();
        CompactFamily::new(
            "sine2",
            params,
            Arc::new(move |p: &[f64]| {
                GridFunction::from_fn(g.clone(), tag, |x| p[0] * (PI * x[0]).sin() + p[1] * (2.0 * PI * x[0]).sin() / 4.0)
            }),
            None,
        )
        .unwrap()
    }

    fn sampling_plan(n: usize) -> CodecPlan {
        CodecPlan { input: sampling_identity(n, &grid()).unwrap(), output: sampling_identity(n, &grid()).unwrap() }
    }

    #[test]
    fn identity_operator_reproduces_the_identity_approximation() {
        let plan = sampling_plan(8);
        let cfg = FitConfig::new(8, ApproximatorSettings::Polynomial { degree: 1, ridge: 0.0 }, 1);
        let train = family(SpaceTag::ContinuousSup, 0.0);
        let arch = fit_architecture("id", &OperatorSpec::identity(SpaceTag::ContinuousSup), &plan, &cfg, &train).unwrap();
        for f in train.members() {
            let tf = plan.input.apply(f).unwrap();
            assert!(arch.apply(f).unwrap().sub(&tf).unwrap().sup_norm() <= 1e-8);
        }
    }

    #[test]
    fn linear_operator_is_realizable_with_degree_one() {
        let cfg = FitConfig::new(8, ApproximatorSettings::polynomial(1), 3);
        let arch = fit_architecture("anti", &antiderivative(), &sampling_plan(8), &cfg, &family(SpaceTag::ContinuousSup, 0.0)).unwrap();
        assert!(arch.report.latent_residual <= 1e-6, "{}", arch.report.latent_residual);
        assert!(arch.report.warning.is_none());
    }

    #[test]
    fn zero_operator_gives_zero_output() {
        let cfg = FitConfig::new(4, ApproximatorSettings::polynomial(2), 3);
        let op = OperatorSpec::zero(SpaceTag::ContinuousSup, SpaceTag::ContinuousSup);
        let train = family(SpaceTag::ContinuousSup, 0.0);
        let arch = fit_architecture("zero", &op, &sampling_plan(4), &cfg, &train).unwrap();
        for f in train.members() {
            assert!(arch.apply(f).unwrap().sup_norm() <= 1e-10);
        }
    }

    #[test]
    fn refinement_improves_the_antiderivative() {
        let f = GridFunction::from_fn(grid(), SpaceTag::ContinuousSup, |x| (PI * x[0]).sin()).unwrap();
        let exact = GridFunction::from_fn(grid(), SpaceTag::ContinuousSup, |x| (1.0 - (PI * x[0]).cos()) / PI).unwrap();
        let train = family(SpaceTag::ContinuousSup, 0.0);
        let err = |n: usize| {
            let cfg = FitConfig::new(n, ApproximatorSettings::polynomial(1), 5);
            let arch = fit_architecture("anti", &antiderivative(), &sampling_plan(n), &cfg, &train).unwrap();
            arch.apply(&f).unwrap().sub(&exact).unwrap().sup_norm()
        };
        assert!(err(16) < err(4));
    }

    #[test]
    fn fitting_is_deterministic_and_validated() {
        let dir = tempfile::tempdir().unwrap();
        let train = family(SpaceTag::ContinuousSup, 0.0);
        for k in 0..2 {
            let cfg = FitConfig::new(4, ApproximatorSettings::polynomial(2), 9);
            let arch = fit_architecture("anti", &antiderivative(), &sampling_plan(4), &cfg, &train).unwrap();
            arch.save(&dir.path().join(k.to_string())).unwrap();
        }
        for file in ["manifest.txt", "latent.csv", "decoder_atoms.csv"] {
            let a = fs::read(dir.path().join("0").join(file)).unwrap();
            let b = fs::read(dir.path().join("1").join(file)).unwrap();
            assert_eq!(a, b, "{file}");
        }
        let l2 = family(SpaceTag::L2, 0.0);
        let cfg = FitConfig::new(4, ApproximatorSettings::polynomial(1), 9);
        let arch = fit_architecture("anti", &antiderivative(), &sampling_plan(4), &cfg, &train).unwrap();
        assert!(matches!(apply_architecture(&arch, &l2.members()[0]), Err(EdapError::Precondition(_))));
    }

    #[test]
    fn constant_branch_gives_the_trunk() {
        let cov = build_epsilon_covering(&Domain::unit_interval(), 0.25).unwrap();
        let region = FitRegion::ball(cov.len(), 10.0).unwrap();
        let g = GridFunction::from_fn(grid(), SpaceTag::ContinuousSup, |x| x[0].exp()).unwrap();
        let arch = classical_deeponet(&cov, vec![g.clone()], &[LatentMap::constant(&[1.0], &region).unwrap()]).unwrap();
        for a in [0.0, 0.3, -2.0] {
            let f = GridFunction::constant(grid(), a, SpaceTag::ContinuousSup).unwrap();
            assert_eq!(arch.apply(&f).unwrap(), g);
        }
    }

    #[test]
    fn classical_deeponet_with_partition_trunk_is_the_sampling_identity() {
        let t = sampling_identity(4, &grid()).unwrap();
        let cov = build_epsilon_covering(&Domain::unit_interval(), 0.25).unwrap();
        let region = FitRegion::ball(cov.len(), 10.0).unwrap();
        let arch = classical_deeponet(&cov, t.decoder.atoms().to_vec(), &[LatentMap::identity(&region).unwrap()]).unwrap();
        let f = GridFunction::from_fn(grid(), SpaceTag::ContinuousSup, |x| (3.0 * x[0]).cos()).unwrap();
        assert!(arch.apply(&f).unwrap().sub(&t.apply(&f).unwrap()).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn orthonormal_frames_and_identity_latent_give_the_projection() {
        let atoms = BasisSpec::SineOnb.atoms(5, &grid()).unwrap();
        let fs = build_frame(atoms).unwrap();
        let region = FitRegion::ball(5, 10.0).unwrap();
        let arch = frame_architecture(&fs, &fs, &[LatentMap::identity(&region).unwrap()]).unwrap();
        let f = GridFunction::from_fn(grid(), SpaceTag::L2, |x| x[0] * (1.0 - x[0])).unwrap();
        let t = basis_identity(BasisSpec::SineOnb, 5, &grid()).unwrap();
        assert!(arch.apply(&f).unwrap().sub(&t.apply(&f).unwrap()).unwrap().sup_norm() < 1e-10);
    }

    #[test]
    fn unperturbed_basisonet_matches_the_schauder_pipeline() {
        let (enc, dec, _) = dense_substitution_codec(4, BasisSpec::SineOnb, &Perturbation::None, &grid()).unwrap();
        let region = FitRegion::ball(4, 10.0).unwrap();
        let a = DMatrix::from_fn(4, 4, |i, j| (i as f64 + 1.0) * 0.1 + j as f64 * 0.05);
        let phi = LatentMap::affine(&a, &[0.1, 0.0, -0.2, 0.3], &region).unwrap();
        let b1 = basisonet(&enc, &dec, std::slice::from_ref(&phi)).unwrap();
        let trunk = BasisSpec::SineOnb.atoms(4, &grid()).unwrap();
        let b2 = schauder_deeponet(BasisSpec::SineOnb, 4, trunk, &[phi]).unwrap();
        let f = GridFunction::from_fn(grid(), SpaceTag::L2, |x| (5.0 * x[0]).sin()).unwrap();
        assert!(b1.apply(&f).unwrap().sub(&b2.apply(&f).unwrap()).unwrap().sup_norm() < 1e-10);
    }

    #[test]
    fn latent_dimensions_are_checked() {
        let cov = build_epsilon_covering(&Domain::unit_interval(), 0.25).unwrap();
        let region = FitRegion::ball(3, 1.0).unwrap();
        let g = GridFunction::zeros(grid(), SpaceTag::ContinuousSup);
        assert!(matches!(
            classical_deeponet(&cov, vec![g], &[LatentMap::constant(&[1.0], &region).unwrap()]),
            Err(EdapError::Shape(_))
        ));
    }

    #[test]
    fn composition_of_fitted_antiderivatives_improves() {
        let f = GridFunction::from_fn(grid(), SpaceTag::ContinuousSup, |x| (PI * x[0]).sin()).unwrap();
        let op = antiderivative();
        let twice = op.after(&op);
        let exact = twice.apply(&f).unwrap();
        let train = family(SpaceTag::ContinuousSup, 0.0);
        let err = |n: usize| {
            let cfg = FitConfig::new(n, ApproximatorSettings::polynomial(1), 5);
            let a = fit_architecture("anti", &op, &sampling_plan(n), &cfg, &train).unwrap();
            let comp = Composition::new(vec![a.clone(), a]).unwrap();
            comp.apply(&f).unwrap().output.sub(&exact).unwrap().sup_norm()
        };
        assert!(err(16) < err(4));
    }

    #[test]
    fn empty_family_is_rejected_before_fitting() {
        let g = grid();
        let r = CompactFamily::new("empty", vec![], Arc::new(move |_| Ok(GridFunction::zeros(g.clone(), SpaceTag::L2))), None);
        assert!(matches!(r, Err(EdapError::Configuration(_))));
    }
}
