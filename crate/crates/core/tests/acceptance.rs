//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line.

use std::f64::consts::PI;
use std::fs;
use std::time::{Duration, Instant};

use edap::approximator::ApproximatorSettings;
use edap::architecture::Composition;
use edap::codec::{
    basis_identity, build_frame, c1_sampling_identity, dense_substitution_codec, encoder_divergence,
    encoder_divergence_witness, frame_identity, sampling_identity, BasisSpec, FrameSystem, NestedSampling,
    Perturbation,
};
use edap::covering::{build_epsilon_covering, partition_of_unity};
use edap::funcspace::{c1_distance, distance, l2_inner, Domain, Grid, GridFunction, SpaceTag};
use edap::harness::{
    convergence_study, make_family, run_cli, CanonicalOperator, CodecChoice, FamilySpec, OperatorKind, StudySettings,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome, u64);

/// Sup-L2 error of the PointwiseSin architecture at n = 8 from the first
/// verified run (3.61281e-3), rounded up in the fifth digit.
const AC8_BASELINE_N8: f64 = 3.6129e-3;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn grid() -> Grid {
    Grid::unit_interval(257).unwrap()
}

fn ac1_partition_of_unity() -> Outcome {
    let mut worst_sum = 0.0f64;
    for dim in [1usize, 2] {
        let domain = Domain::unit(dim).map_err(e)?;
        for n in [2usize, 5, 10] {
            let eps = 1.0 / n as f64;
            let pou = partition_of_unity(build_epsilon_covering(&domain, eps).map_err(e)?).map_err(e)?;
            let centers = pou.covering().centers().to_vec();
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + 10 * dim as u64 + n as u64);
            for _ in 0..200 {
                let y: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..=1.0)).collect();
                let p = pou.evaluate(&y).map_err(e)?;
                let sum: f64 = p.iter().sum();
                worst_sum = worst_sum.max((sum - 1.0).abs());
                for (c, v) in centers.iter().zip(&p) {
                    if distance(&y, c) >= eps {
                        ensure(*v == 0.0, || format!("P nonzero at distance {} >= eps", distance(&y, c)))?;
                    }
                    ensure(*v >= 0.0, || "negative partition value".into())?;
                }
            }
        }
    }
    ensure(worst_sum <= 1e-10, || format!("|sum - 1| = {worst_sum:e}"))?;
    Ok(format!("max |sum P - 1| = {worst_sum:.1e}"))
}

fn ac2_sampling_identity() -> Outcome {
    let fam = make_family(&"sine2".parse::<FamilySpec>().map_err(e)?, &grid(), SpaceTag::ContinuousSup).map_err(e)?;
    let l = fam.lipschitz_bound().ok_or("family has no Lipschitz bound")?;
    let mut summary = Vec::new();
    for n in [4usize, 8, 16, 32] {
        let t = sampling_identity(n, &grid()).map_err(e)?;
        let mut worst = 0.0f64;
        for f in fam.members() {
            worst = worst.max(t.error(f).map_err(e)?);
        }
        let bound = l / n as f64 + 5e-3;
        ensure(worst <= bound, || format!("n={n}: error {worst:e} > L/n + 5e-3 = {bound:e}"))?;
        for c in [-2.0, 0.0, 3.5] {
            let k = GridFunction::constant(grid(), c, SpaceTag::ContinuousSup).map_err(e)?;
            let err = t.apply(&k).map_err(e)?.sub(&k).map_err(e)?.sup_norm();
            ensure(err <= 1e-12, || format!("constant {c} reproduced with error {err:e}"))?;
        }
        summary.push(format!("n={n}:{worst:.2e}"));
    }
    Ok(format!("L = {l:.4}; {}", summary.join(" ")))
}

fn ac3_c1_identity() -> Outcome {
    let id = GridFunction::c1_from_fn(grid(), |x| x, |_| 1.0).map_err(e)?;
    let mut worst_id = 0.0f64;
    for n in [4usize, 8, 16] {
        let out = c1_sampling_identity(n, &grid()).map_err(e)?.apply(&id).map_err(e)?;
        worst_id = worst_id.max(out.sub(&id).map_err(e)?.sup_norm());
    }
    ensure(worst_id <= 1e-6, || format!("f(x) = x reproduced with error {worst_id:e}"))?;
    let tests = [
        GridFunction::c1_from_fn(grid(), |x| (PI * x).sin(), |x| PI * (PI * x).cos()).map_err(e)?,
        GridFunction::c1_from_fn(grid(), |x| 0.5 * x * x, |x| x).map_err(e)?,
        GridFunction::c1_from_fn(grid(), |x| (2.0 * x).exp(), |x| 2.0 * (2.0 * x).exp()).map_err(e)?,
    ];
    let mut notes = Vec::new();
    for f in &tests {
        let e4 = c1_distance(f, &c1_sampling_identity(4, &grid()).map_err(e)?.apply(f).map_err(e)?).map_err(e)?;
        let e16 = c1_distance(f, &c1_sampling_identity(16, &grid()).map_err(e)?.apply(f).map_err(e)?).map_err(e)?;
        ensure(e16 < e4, || format!("C1 error not decreasing: {e4:e} -> {e16:e}"))?;
        notes.push(format!("{e4:.2e}->{e16:.2e}"));
    }
    Ok(format!("identity error {worst_id:.1e}; C1 errors {}", notes.join(", ")))
}

fn ac4_frames() -> Outcome {
    let e_basis = BasisSpec::SineOnb.atoms(3, &grid()).map_err(e)?;
    let combo = |c: &[f64]| GridFunction::linear_combination(&grid(), c, &e_basis[..c.len()], SpaceTag::L2);
    let dirs: Vec<(f64, f64)> = (0..3)
        .map(|k| {
            let t = PI / 2.0 + 2.0 * PI * k as f64 / 3.0;
            (t.cos(), t.sin())
        })
        .collect();
    let atoms = dirs.iter().map(|d| combo(&[d.0, d.1])).collect::<Result<Vec<_>, _>>().map_err(e)?;
    let fs = build_frame(atoms.clone()).map_err(e)?;
    // Closed-form eigenvalues of sum_i u_i u_i^T in the (e1, e2) plane.
    let (a, b, c) = dirs.iter().fold((0.0, 0.0, 0.0), |s, d| (s.0 + d.0 * d.0, s.1 + d.0 * d.1, s.2 + d.1 * d.1));
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let (lo, hi) = (0.5 * (a + c) - rad, 0.5 * (a + c) + rad);
    let (fa, fb) = fs.bounds();
    ensure((fa - 1.5).abs() <= 1e-10 && (fb - 1.5).abs() <= 1e-10, || format!("bounds ({fa}, {fb})"))?;
    ensure((fa - lo).abs() <= 1e-10 && (fb - hi).abs() <= 1e-10, || format!("bounds vs eigen-oracle ({lo}, {hi})"))?;
    for (d, f) in fs.dual_atoms().iter().zip(&atoms) {
        let err = d.sub(&f.scaled(2.0 / 3.0)).map_err(e)?.sup_norm();
        ensure(err <= 1e-10, || format!("dual atom off by {err:e}"))?;
    }
    ensure(FrameSystem::with_dual(atoms, fs.dual_atoms().to_vec()).is_ok(), || "dual validation failed".into())?;

    // Overcomplete frame spanning e1..e3.
    let mut over = e_basis.clone();
    over.push(combo(&[1.0, 1.0, 0.0]).map_err(e)?);
    over.push(combo(&[0.0, 0.5, -2.0]).map_err(e)?);
    let fs = build_frame(over).map_err(e)?;
    let (fa, fb) = fs.bounds();
    let t = frame_identity(&fs).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut worst_rec = 0.0f64;
    for _ in 0..100 {
        let coeffs: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let f = combo(&coeffs).map_err(e)?;
        let n2 = l2_inner(&f, &f).map_err(e)?;
        let energy = fs.analysis_energy(&f).map_err(e)?;
        ensure(fa * n2 <= energy + 1e-8 && energy <= fb * n2 + 1e-8, || format!("frame inequality fails: {energy} vs [{}, {}]", fa * n2, fb * n2))?;
        worst_rec = worst_rec.max(t.apply(&f).map_err(e)?.sub(&f).map_err(e)?.l2_norm());
    }
    ensure(worst_rec <= 1e-8, || format!("reconstruction error {worst_rec:e}"))?;
    Ok(format!("A = B = 1.5; overcomplete bounds ({fa:.3}, {fb:.3}); reconstruction {worst_rec:.1e}"))
}

fn ac5_parseval_tail() -> Outcome {
    let g = grid();
    let full = BasisSpec::SineOnb.atoms(255, &g).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let n = [4usize, 8, 16][trial % 3];
        let (p, q, r, w) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(1.0..9.0));
        let f = GridFunction::from_fn(g.clone(), SpaceTag::L2, |x| {
            let x = x[0];
            x * (1.0 - x) * (p + q * x + r * (w * x).cos())
        })
        .map_err(e)?;
        let t = basis_identity(BasisSpec::SineOnb, n, &g).map_err(e)?;
        let lhs = t.apply(&f).map_err(e)?.sub(&f).map_err(e)?.l2_norm().powi(2);
        let mut tail = 0.0;
        for atom in &full[n..] {
            tail += l2_inner(&f, atom).map_err(e)?.powi(2);
        }
        worst = worst.max((lhs - tail).abs());
    }
    ensure(worst <= 1e-4, || format!("|residual^2 - tail| = {worst:e}"))?;
    Ok(format!("max |‖f - Tf‖² - tail| = {worst:.1e}"))
}

fn ac6_dense_substitution() -> Outcome {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut tightest = f64::INFINITY;
    for n in [2usize, 4, 8] {
        let (enc, dec, sub) = dense_substitution_codec(n, BasisSpec::SineOnb, &Perturbation::seeded(600 + n as u64), &g).map_err(e)?;
        let (enc0, dec0, _) = dense_substitution_codec(n, BasisSpec::SineOnb, &Perturbation::None, &g).map_err(e)?;
        let t = basis_identity(BasisSpec::SineOnb, n, &g).map_err(e)?;
        for _ in 0..50 {
            let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f = GridFunction::from_fn(g.clone(), SpaceTag::L2, |x| {
                c.iter().enumerate().map(|(k, a)| a * ((k as f64 + 0.5) * PI * x[0]).cos()).sum::<f64>() + c[0] * x[0]
            })
            .map_err(e)?;
            let tf = sub.reference_projection(&f).map_err(e)?;
            let diff = dec.apply(&enc.apply(&f).map_err(e)?).map_err(e)?.sub(&tf).map_err(e)?.l2_norm();
            let bound = f.l2_norm() / n as f64;
            ensure(diff <= bound, || format!("n={n}: {diff:e} > ‖f‖/n = {bound:e}"))?;
            tightest = tightest.min(bound - diff);
            let exact = dec0.apply(&enc0.apply(&f).map_err(e)?).map_err(e)?;
            let same = exact.sub(&t.apply(&f).map_err(e)?).map_err(e)?.sup_norm();
            ensure(same <= 1e-12, || format!("zero perturbation differs by {same:e}"))?;
        }
    }
    Ok(format!("bound holds on 150 functions; smallest slack {tightest:.2e}"))
}

fn ac7_operator_convergence() -> Outcome {
    let g = grid();
    let op = CanonicalOperator::new(OperatorKind::Antiderivative, g.clone()).map_err(e)?;
    let train = make_family(&"sine2".parse().map_err(e)?, &g, SpaceTag::ContinuousSup).map_err(e)?;
    let test = make_family(&"sine2-mid".parse().map_err(e)?, &g, SpaceTag::ContinuousSup).map_err(e)?;
    let settings = StudySettings::new(ApproximatorSettings::polynomial(1), 7);
    let (report, _) =
        convergence_study(&op, CodecChoice::Sampling, &[4, 8, 16], &train, &[train.clone(), test], &settings).map_err(e)?;
    let mut notes = Vec::new();
    for fam in ["sine2", "sine2-mid"] {
        let s = report.series("antiderivative-sampling", fam);
        ensure(s.len() == 3, || format!("{fam}: {} rows", s.len()))?;
        ensure(s.windows(2).all(|w| w[1].1 < w[0].1), || format!("{fam} not strictly decreasing: {s:?}"))?;
        ensure(s[2].1 * 2.0 <= s[0].1, || format!("{fam}: n=16 error {:e} not 2x below n=4 {:e}", s[2].1, s[0].1))?;
        notes.push(format!("{fam} {:.2e}/{:.2e}/{:.2e}", s[0].1, s[1].1, s[2].1));
    }
    Ok(notes.join("; "))
}

fn ac8_nonlinear() -> Outcome {
    let g = grid();
    let op = CanonicalOperator::new(OperatorKind::PointwiseSin, g.clone()).map_err(e)?;
    let train = make_family(&"sine2".parse().map_err(e)?, &g, SpaceTag::L2).map_err(e)?;
    let settings = StudySettings::new(ApproximatorSettings::polynomial(3), 7);
    let (report, _) = convergence_study(&op, CodecChoice::Basis(BasisSpec::SineOnb), &[4, 8], &train, std::slice::from_ref(&train), &settings)
        .map_err(e)?;
    let s = report.series("sin-sine", "sine2");
    ensure(s.len() == 2 && s[1].1 < s[0].1, || format!("errors not decreasing: {s:?}"))?;
    ensure(s[1].1 <= AC8_BASELINE_N8, || format!("n=8 error {:e} above baseline {AC8_BASELINE_N8:e}", s[1].1))?;
    Ok(format!("sup L2 error n=4 {:.3e}, n=8 {:.3e}", s[0].1, s[1].1))
}

fn ac9_concatenation() -> Outcome {
    let g = grid();
    let op = CanonicalOperator::new(OperatorKind::Antiderivative, g.clone()).map_err(e)?;
    let spec = op.spec(SpaceTag::ContinuousSup);
    let twice = spec.after(&spec);
    let train = make_family(&"sine2".parse().map_err(e)?, &g, SpaceTag::ContinuousSup).map_err(e)?;
    let settings = StudySettings::new(ApproximatorSettings::polynomial(1), 9);
    let (_, archs) = convergence_study(&op, CodecChoice::Sampling, &[4, 16], &train, std::slice::from_ref(&train), &settings).map_err(e)?;
    let mut errs = Vec::new();
    for arch in &archs {
        let comp = Composition::new(vec![arch.clone(), arch.clone()]).map_err(e)?;
        let mut worst = 0.0f64;
        for f in train.members() {
            let exact = twice.apply(f).map_err(e)?;
            worst = worst.max(comp.apply(f).map_err(e)?.output.sub(&exact).map_err(e)?.sup_norm());
        }
        errs.push(worst);
    }
    ensure(errs[1] < errs[0], || format!("composition error {:e} -> {:e}", errs[0], errs[1]))?;
    Ok(format!("composed sup error n=4 {:.3e}, n=16 {:.3e}", errs[0], errs[1]))
}

fn ac10_witness() -> Outcome {
    let g = grid();
    let seq = NestedSampling::dyadic(g.domain(), 8).map_err(e)?;
    let w = encoder_divergence_witness(&seq, &g).map_err(e)?;
    ensure(w.divergence > 1e-6, || format!("divergence {:e}", w.divergence))?;
    let direct = encoder_divergence(&w.f, &seq, w.n).map_err(e)?;
    ensure((direct - w.divergence).abs() <= 1e-15, || "reported divergence disagrees with direct evaluation".into())?;
    Ok(format!("level {} (k = {}), divergence {:.3e}", w.n, w.k, w.divergence))
}

fn ac11_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let mut bytes = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let args = [
            "edap", "study", "--op", "antiderivative", "--codec", "sampling", "--n", "4,8,16", "--degree", "1",
            "--family", "sine2", "--test-family", "sine2-mid", "--seed", "7", "--out", out.to_str().unwrap(), "--svg",
        ];
        let code = run_cli(args);
        ensure(code == 0, || format!("run {run} exited with {code}"))?;
        bytes.push(fs::read(out.join("report.csv")).map_err(e)?);
    }
    ensure(bytes[0] == bytes[1], || "report.csv differs between runs".into())?;
    Ok(format!("{} identical bytes", bytes[0].len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("AC1", "partition of unity", ac1_partition_of_unity, 1),
        ("AC2", "sampling identity", ac2_sampling_identity, 5),
        ("AC3", "C1 identity", ac3_c1_identity, 5),
        ("AC4", "frames", ac4_frames, 2),
        ("AC5", "ONB Parseval tail", ac5_parseval_tail, 3),
        ("AC6", "dense substitution bound", ac6_dense_substitution, 3),
        ("AC7", "operator convergence on unseen family", ac7_operator_convergence, 30),
        ("AC8", "nonlinear operator", ac8_nonlinear, 60),
        ("AC9", "concatenation stability", ac9_concatenation, 60),
        ("AC10", "divergence witness", ac10_witness, 2),
        ("AC11", "CLI determinism", ac11_determinism, 30),
    ];
    let mut failures = 0;
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(limit) => Err(format!("{msg}; runtime {elapsed:.2?} over {limit} s")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("{id} PASS {name} [{elapsed:.2?}]: {msg}"),
            Err(msg) => {
                failures += 1;
                println!("{id} FAIL {name} [{elapsed:.2?}]: {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
