use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::approximator::ApproximatorSettings;
use crate::architecture::{family_error, fit_architecture, write_manifest};
use crate::codec::{build_frame, encoder_divergence_witness, NestedSampling};
use crate::error::{EdapError, Result};
use crate::funcspace::{CompactFamily, Grid};

use super::families::{make_family, FamilySpec};
use super::operators::{CanonicalOperator, OperatorKind};
use super::study::{
    convergence_study, identity_study, overcomplete_sine_frame, CodecChoice, StudyReport, StudyRow, StudySettings,
};
use super::svg::render_svg;

#[derive(Debug, Parser)]
#[command(name = "edap", version, about = "Encoder-decoder operator approximation studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Error of T_n = D_n o E_n on a family, per n
    Identity(CommonArgs),
    /// Fit a single architecture and save it
    Fit(CommonArgs),
    /// Convergence study: one fitted architecture per n, several test families
    Study(CommonArgs),
    /// Frame bounds and dual diagnostics of the overcomplete sine frame
    Frames(CommonArgs),
    /// Search for a function separating sampling and Faber-Schauder encoders
    Witness(CommonArgs),
}

fn parse_with<T: std::str::FromStr<Err = EdapError>>(s: &str) -> std::result::Result<T, String> {
    s.parse::<T>().map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// sampling, faber, sine, legendre, frame or dense
    #[arg(long, default_value = "sampling", value_parser = parse_with::<CodecChoice>)]
    codec: CodecChoice,
    /// Comma-separated list of discretization levels
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    n: Vec<usize>,
    /// Total degree of the polynomial latent map
    #[arg(long, default_value_t = 1)]
    degree: usize,
    /// Training family: sine1..sine4, sineM-mid or bumps
    #[arg(long, default_value = "sine2", value_parser = parse_with::<FamilySpec>)]
    family: FamilySpec,
    /// Extra test families evaluated with the same architectures
    #[arg(long = "test-family", value_delimiter = ',', value_parser = parse_with::<FamilySpec>)]
    test_family: Vec<FamilySpec>,
    /// antiderivative, poisson or sin
    #[arg(long, default_value = "antiderivative", value_parser = parse_with::<OperatorKind>)]
    op: OperatorKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Also write report.svg
    #[arg(long)]
    svg: bool,
    /// Grid nodes on [0, 1]
    #[arg(long, default_value_t = 257)]
    nodes: usize,
    /// Record wall-clock milliseconds (reports are then not reproducible)
    #[arg(long)]
    timing: bool,
}

impl CommonArgs {
    fn manifest(&self, command: &str) -> Vec<(String, String)> {
        let tests: Vec<String> = self.test_family.iter().map(|f| f.name()).collect();
        let ns: Vec<String> = self.n.iter().map(|n| n.to_string()).collect();
        [
            ("command", command.to_string()),
            ("codec", self.codec.to_string()),
            ("n", ns.join(",")),
            ("degree", self.degree.to_string()),
            ("family", self.family.name()),
            ("test_families", tests.join(",")),
            ("op", self.op.to_string()),
            ("seed", self.seed.to_string()),
            ("nodes", self.nodes.to_string()),
            ("timing", self.timing.to_string()),
            ("version", env!("CARGO_PKG_VERSION").to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    fn grid(&self) -> Result<Grid> {
        Grid::unit_interval(self.nodes)
    }

    fn families(&self, grid: &Grid) -> Result<(CompactFamily, Vec<CompactFamily>)> {
        let tag = self.codec.space();
        let train = make_family(&self.family, grid, tag)?;
        let mut all = vec![train.clone()];
        for spec in &self.test_family {
            all.push(make_family(spec, grid, tag)?);
        }
        Ok((train, all))
    }

    fn settings(&self) -> StudySettings {
        let mut s = StudySettings::new(ApproximatorSettings::polynomial(self.degree), self.seed);
        s.record_timing = self.timing;
        s
    }
}

fn write_outputs(out: &Path, report: &StudyReport, manifest: &[(String, String)], svg: Option<&str>) -> Result<()> {
    fs::create_dir_all(out)?;
    report.write_csv(fs::File::create(out.join("report.csv"))?)?;
    let mut entries = manifest.to_vec();
    for (i, w) in report.warnings.iter().enumerate() {
        entries.push((format!("warning.{i}"), w.clone()));
    }
    write_manifest(fs::File::create(out.join("run.toml"))?, &entries)?;
    if let Some(title) = svg {
        fs::write(out.join("report.svg"), render_svg(report, title))?;
    }
    Ok(())
}

fn print_rows(report: &StudyReport) {
    for r in &report.rows {
        println!("{} n={} family={} sup_error={:e}", r.arch_id, r.n, r.family, r.sup_error);
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
}

fn run_identity(a: &CommonArgs) -> Result<()> {
    let grid = a.grid()?;
    let (_, families) = a.families(&grid)?;
    let report = identity_study(a.codec, &a.n, &families, &a.settings())?;
    print_rows(&report);
    let title = format!("identity approximation ({})", a.codec);
    write_outputs(&a.out, &report, &a.manifest("identity"), a.svg.then_some(title.as_str()))
}

fn run_study(a: &CommonArgs) -> Result<()> {
    let grid = a.grid()?;
    let (train, families) = a.families(&grid)?;
    let op = CanonicalOperator::new(a.op, grid)?;
    let (report, _) = convergence_study(&op, a.codec, &a.n, &train, &families, &a.settings())?;
    print_rows(&report);
    let title = format!("{} with {} codecs", a.op, a.codec);
    write_outputs(&a.out, &report, &a.manifest("study"), a.svg.then_some(title.as_str()))
}

fn run_fit(a: &CommonArgs) -> Result<()> {
    let [n] = a.n[..] else {
        return Err(EdapError::Parameter("fit takes exactly one --n".into()));
    };
    let grid = a.grid()?;
    let (train, families) = a.families(&grid)?;
    let op = CanonicalOperator::new(a.op, grid.clone())?;
    let spec = op.spec(a.codec.space());
    let settings = a.settings();
    let plan = a.codec.plan(n, &grid, a.seed)?;
    let mut cfg = crate::architecture::FitConfig::new(n, settings.approximator, a.seed);
    cfg.jitter_per_member = settings.jitter_per_member;
    let arch = fit_architecture(format!("{}-{}", a.op, a.codec), &spec, &plan, &cfg, &train)?;
    let mut report = StudyReport::default();
    if let Some(w) = &arch.report.warning {
        report.warnings.push(w.clone());
    }
    for fam in &families {
        let (err, extrapolated) = family_error(&arch, &spec, fam)?;
        report.rows.push(StudyRow {
            arch_id: arch.id.clone(),
            n,
            family: fam.name().to_string(),
            sup_error: err,
            latent_residual: arch.report.latent_residual,
            extrapolated,
            wall_ms: 0,
        });
    }
    print_rows(&report);
    arch.save(&a.out.join("architecture"))?;
    let title = format!("{} fit at n = {n}", a.op);
    write_outputs(&a.out, &report, &a.manifest("fit"), a.svg.then_some(title.as_str()))
}

fn run_frames(a: &CommonArgs) -> Result<()> {
    let grid = a.grid()?;
    fs::create_dir_all(&a.out)?;
    let mut w = csv::Writer::from_writer(fs::File::create(a.out.join("report.csv"))?);
    w.write_record(["n", "atoms", "rank", "lower_bound", "upper_bound", "dual_reconstruction_error"])?;
    for &n in &a.n {
        let fs_n = build_frame(overcomplete_sine_frame(n, &grid)?)?;
        let (lo, hi) = fs_n.bounds();
        let mut worst = 0.0f64;
        for f in fs_n.atoms() {
            worst = worst.max(fs_n.reconstruct(f)?.sub(f)?.l2_norm());
        }
        println!("n={n} atoms={} rank={} A={lo:e} B={hi:e} reconstruction={worst:e}", fs_n.len(), fs_n.rank());
        w.write_record(&[
            n.to_string(),
            fs_n.len().to_string(),
            fs_n.rank().to_string(),
            format!("{lo:e}"),
            format!("{hi:e}"),
            format!("{worst:e}"),
        ])?;
        fs_n.write_gram_csv(fs::File::create(a.out.join(format!("gram_n{n}.csv")))?)?;
    }
    w.flush()?;
    write_manifest(fs::File::create(a.out.join("run.toml"))?, &a.manifest("frames"))
}

fn run_witness(a: &CommonArgs) -> Result<()> {
    let grid = a.grid()?;
    let max_level = a.n.iter().copied().max().unwrap_or(1) as u32;
    let seq = NestedSampling::dyadic(grid.domain(), max_level)?;
    let mut manifest = a.manifest("witness");
    fs::create_dir_all(&a.out)?;
    let mut w = csv::Writer::from_writer(fs::File::create(a.out.join("report.csv"))?);
    w.write_record(["key", "value"])?;
    match encoder_divergence_witness(&seq, &grid) {
        Ok(found) => {
            println!("witness at level {} (k = {}), divergence {:e}", found.n, found.k, found.divergence);
            w.write_record(["found", "true"])?;
            w.write_record(["level", &found.n.to_string()])?;
            w.write_record(["k", &found.k.to_string()])?;
            w.write_record(["divergence", &format!("{:e}", found.divergence)])?;
            found.f.write_csv(fs::File::create(a.out.join("witness.csv"))?)?;
        }
        Err(EdapError::DiagnosticFailure(msg)) => {
            println!("no witness: {msg}");
            w.write_record(["found", "false"])?;
            manifest.push(("diagnostic".into(), msg));
        }
        Err(e) => return Err(e),
    }
    w.flush()?;
    write_manifest(fs::File::create(a.out.join("run.toml"))?, &manifest)
}

/// Parses `args` (program name first) and runs the subcommand. Returns 0 on
/// success, 1 on runtime failure and 2 on usage errors.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Identity(a) => run_identity(a),
        Command::Fit(a) => run_fit(a),
        Command::Study(a) => run_study(a),
        Command::Frames(a) => run_frames(a),
        Command::Witness(a) => run_witness(a),
    };
    match result {
        Ok(()) => 0,
        Err(EdapError::Parameter(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
