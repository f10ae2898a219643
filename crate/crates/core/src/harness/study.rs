use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use crate::approximator::ApproximatorSettings;
use crate::architecture::{family_error, fit_architecture, Architecture, CodecPlan, FitConfig};
use crate::codec::{
    basis_identity, build_frame, dense_substitution_codec, frame_identity, sampling_identity, BasisSpec,
    IdentityApproximation, Perturbation,
};
use crate::error::{EdapError, Result};
use crate::funcspace::{distance_in, CompactFamily, Grid, GridFunction, SpaceTag};

use super::operators::CanonicalOperator;

pub const REPORT_HEADER: [&str; 7] = ["arch_id", "n", "family", "sup_error", "latent_residual", "extrapolated", "wall_ms"];

/// Codec family used on both sides of an architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodecChoice {
    Sampling,
    Basis(BasisSpec),
    /// Sine atoms plus normalized neighbour sums; spans the first `n` sines.
    Frame,
    /// Sine basis with seeded substitutes inside the `1/(3n)` budget.
    Dense,
}

impl CodecChoice {
    pub fn space(self) -> SpaceTag {
        match self {
            CodecChoice::Sampling => SpaceTag::ContinuousSup,
            CodecChoice::Basis(b) => b.space(),
            CodecChoice::Frame | CodecChoice::Dense => SpaceTag::L2,
        }
    }

    pub fn identity(self, n: usize, grid: &Grid, seed: u64) -> Result<IdentityApproximation> {
        match self {
            CodecChoice::Sampling => sampling_identity(n, grid),
            CodecChoice::Basis(b) => basis_identity(b, n, grid),
            CodecChoice::Frame => frame_identity(&build_frame(overcomplete_sine_frame(n, grid)?)?),
            CodecChoice::Dense => {
                let (e, d, _) = dense_substitution_codec(n, BasisSpec::SineOnb, &Perturbation::seeded(seed), grid)?;
                IdentityApproximation::new(e, d)
            }
        }
    }

    pub fn plan(self, n: usize, grid: &Grid, seed: u64) -> Result<CodecPlan> {
        Ok(CodecPlan { input: self.identity(n, grid, seed)?, output: self.identity(n, grid, seed)? })
    }
}

impl fmt::Display for CodecChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodecChoice::Sampling => f.write_str("sampling"),
            CodecChoice::Basis(b) => write!(f, "{b}"),
            CodecChoice::Frame => f.write_str("frame"),
            CodecChoice::Dense => f.write_str("dense"),
        }
    }
}

impl FromStr for CodecChoice {
    type Err = EdapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sampling" => Ok(CodecChoice::Sampling),
            "frame" => Ok(CodecChoice::Frame),
            "dense" => Ok(CodecChoice::Dense),
            other => other.parse::<BasisSpec>().map(CodecChoice::Basis).map_err(|_| {
                EdapError::Parameter(format!("unknown codec '{other}' (sampling, faber, sine, legendre, frame, dense)"))
            }),
        }
    }
}

/// `b_1..b_n` and `(b_i + b_{i+1}) / sqrt(2)`.
pub fn overcomplete_sine_frame(n: usize, grid: &Grid) -> Result<Vec<GridFunction>> {
    let b = BasisSpec::SineOnb.atoms(n, grid)?;
    let mut atoms = b.clone();
    for w in b.windows(2) {
        atoms.push(w[0].axpy(1.0, &w[1])?.scaled(std::f64::consts::FRAC_1_SQRT_2));
    }
    Ok(atoms)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub arch_id: String,
    pub n: usize,
    pub family: String,
    pub sup_error: f64,
    pub latent_residual: f64,
    pub extrapolated: usize,
    pub wall_ms: u128,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
    pub warnings: Vec<String>,
}

impl StudyReport {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(REPORT_HEADER)?;
        for r in &self.rows {
            w.write_record(&[
                r.arch_id.clone(),
                r.n.to_string(),
                r.family.clone(),
                format!("{:e}", r.sup_error),
                format!("{:e}", r.latent_residual),
                r.extrapolated.to_string(),
                r.wall_ms.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Errors of one `(arch_id, family)` series in row order.
    pub fn series(&self, arch_id: &str, family: &str) -> Vec<(usize, f64)> {
        self.rows.iter().filter(|r| r.arch_id == arch_id && r.family == family).map(|r| (r.n, r.sup_error)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct StudySettings {
    pub approximator: ApproximatorSettings,
    pub seed: u64,
    pub jitter_per_member: usize,
    /// When false, `wall_ms` is written as 0 so reports are byte-reproducible.
    pub record_timing: bool,
}

impl StudySettings {
    pub fn new(approximator: ApproximatorSettings, seed: u64) -> Self {
        Self { approximator, seed, jitter_per_member: 8, record_timing: false }
    }

    fn fit_config(&self, n: usize) -> FitConfig {
        let mut cfg = FitConfig::new(n, self.approximator, self.seed);
        cfg.jitter_per_member = self.jitter_per_member;
        cfg
    }
}

fn check_n_list(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EdapError::Parameter(format!("n list {n_list:?} must be positive and strictly increasing")));
    }
    Ok(())
}

fn retag(family: &CompactFamily, tag: SpaceTag) -> Result<Vec<GridFunction>> {
    family.members().iter().map(|f| if f.tag() == tag { Ok(f.clone()) } else { f.clone().with_tag(tag) }).collect()
}

/// `sup_{f in family} d(f, T_n f)` for each `n` and family.
pub fn identity_study(
    codec: CodecChoice,
    n_list: &[usize],
    families: &[CompactFamily],
    settings: &StudySettings,
) -> Result<StudyReport> {
    check_n_list(n_list)?;
    let mut report = StudyReport::default();
    let id = format!("identity-{codec}");
    for &n in n_list {
        let grid = families.first().ok_or_else(|| EdapError::Configuration("no families".into()))?.grid();
        let start = Instant::now();
        let t = codec.identity(n, grid, settings.seed)?;
        for fam in families {
            let mut worst = 0.0f64;
            for f in retag(fam, codec.space())? {
                worst = worst.max(distance_in(codec.space(), &f, &t.apply(&f)?)?);
            }
            report.rows.push(StudyRow {
                arch_id: id.clone(),
                n,
                family: fam.name().to_string(),
                sup_error: worst,
                latent_residual: 0.0,
                extrapolated: 0,
                wall_ms: if settings.record_timing { start.elapsed().as_millis() } else { 0 },
            });
        }
    }
    Ok(report)
}

/// Fits one architecture per `n` on `train` and evaluates it on every test
/// family without refitting.
pub fn convergence_study(
    op: &CanonicalOperator,
    codec: CodecChoice,
    n_list: &[usize],
    train: &CompactFamily,
    tests: &[CompactFamily],
    settings: &StudySettings,
) -> Result<(StudyReport, Vec<Architecture>)> {
    check_n_list(n_list)?;
    if tests.is_empty() {
        return Err(EdapError::Configuration("no test families".into()));
    }
    let spec = op.spec(codec.space());
    let id = format!("{}-{codec}", op.kind);
    let mut report = StudyReport::default();
    let mut archs = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let start = Instant::now();
        let plan = codec.plan(n, &op.grid, settings.seed)?;
        let arch = fit_architecture(id.clone(), &spec, &plan, &settings.fit_config(n), train)?;
        if let Some(w) = &arch.report.warning {
            report.warnings.push(format!("n={n}: {w}"));
        }
        for fam in tests {
            let (err, extrapolated) = family_error(&arch, &spec, fam)?;
            report.rows.push(StudyRow {
                arch_id: id.clone(),
                n,
                family: fam.name().to_string(),
                sup_error: err,
                latent_residual: arch.report.latent_residual,
                extrapolated,
                wall_ms: if settings.record_timing { start.elapsed().as_millis() } else { 0 },
            });
        }
        archs.push(arch);
    }
    Ok((report, archs))
}
