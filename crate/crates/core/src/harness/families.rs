use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{EdapError, Result};
use crate::funcspace::{CompactFamily, Grid, GridFunction, SpaceTag};

/// Amplitude grid of the default `sineM` families.
pub const DEFAULT_AMPLITUDES: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
/// Amplitudes of the `sineM-mid` families, disjoint from the defaults.
pub const MID_AMPLITUDES: [f64; 4] = [-0.75, -0.25, 0.25, 0.75];

#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    /// `sum_{k<=m} a_k sin(k pi x) / k^2` with every `a` in `amplitudes^m`.
    SineModes { modes: usize, amplitudes: Vec<f64> },
    /// `exp(-(x - c)^2 / (2 w^2))` for each center `c`.
    GaussianBumps { centers: Vec<f64>, width: f64 },
}

impl FamilySpec {
    pub fn name(&self) -> String {
        match self {
            FamilySpec::SineModes { modes, amplitudes } if amplitudes[..] == DEFAULT_AMPLITUDES => format!("sine{modes}"),
            FamilySpec::SineModes { modes, amplitudes } if amplitudes[..] == MID_AMPLITUDES => format!("sine{modes}-mid"),
            FamilySpec::SineModes { modes, amplitudes } => format!("sine{modes}x{}", amplitudes.len()),
            FamilySpec::GaussianBumps { centers, .. } => format!("bumps{}", centers.len()),
        }
    }
}

/// `sineM`, `sineM-mid` or `bumps`.
impl FromStr for FamilySpec {
    type Err = EdapError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "bumps" {
            return Ok(FamilySpec::GaussianBumps { centers: vec![0.2, 0.35, 0.5, 0.65, 0.8], width: 0.1 });
        }
        let (body, amplitudes) = match s.strip_suffix("-mid") {
            Some(b) => (b, MID_AMPLITUDES.to_vec()),
            None => (s, DEFAULT_AMPLITUDES.to_vec()),
        };
        let modes = body
            .strip_prefix("sine")
            .and_then(|m| m.parse::<usize>().ok())
            .filter(|&m| (1..=4).contains(&m))
            .ok_or_else(|| EdapError::Parameter(format!("unknown family '{s}' (expected sine1..sine4[-mid] or bumps)")))?;
        Ok(FamilySpec::SineModes { modes, amplitudes })
    }
}

fn cartesian(values: &[f64], m: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// Builds the family on `grid`, tagging members with `tag`.
pub fn make_family(spec: &FamilySpec, grid: &Grid, tag: SpaceTag) -> Result<CompactFamily> {
    if grid.dim() != 1 {
        return Err(EdapError::UnsupportedDimension(grid.dim()));
    }
    if tag == SpaceTag::C1 {
        return Err(EdapError::Configuration("families are generated in C or L2".into()));
    }
    let a = grid.domain().lower(0);
    let len = grid.domain().length(0);
    let g = grid.clone();
    match spec {
        FamilySpec::SineModes { modes, amplitudes } => {
            if amplitudes.is_empty() || *modes == 0 {
                return Err(EdapError::Configuration("sine family needs modes and amplitudes".into()));
            }
            let a_max = amplitudes.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            // sup |f'| <= sum_k a_max (k pi / L) / k^2.
            let lipschitz = (1..=*modes).map(|k| a_max * PI / (k as f64 * len)).sum();
            let params = cartesian(amplitudes, *modes);
            CompactFamily::new(
                spec.name(),
                params,
                Arc::new(move |p: &[f64]| {
                    GridFunction::from_fn(g.clone(), tag, |x| {
                        let t = (x[0] - a) / len;
                        p.iter().enumerate().map(|(i, c)| {
                            let k = (i + 1) as f64;
                            c * (k * PI * t).sin() / (k * k)
                        }).sum()
                    })
                }),
                Some(lipschitz),
            )
        }
        FamilySpec::GaussianBumps { centers, width } => {
            if centers.is_empty() {
                return Err(EdapError::Configuration("bump family needs centers".into()));
            }
            if *width <= 0.0 || width.is_nan() {
                return Err(EdapError::Parameter(format!("bump width {width} must be positive")));
            }
            let w = *width;
            let lipschitz = 1.0 / (w * std::f64::consts::E.sqrt());
            CompactFamily::new(
                spec.name(),
                centers.iter().map(|&c| vec![c]).collect(),
                Arc::new(move |p: &[f64]| {
                    GridFunction::from_fn(g.clone(), tag, |x| (-(x[0] - p[0]).powi(2) / (2.0 * w * w)).exp())
                }),
                Some(lipschitz),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::unit_interval(257).unwrap()
    }

    #[test]
    fn cardinalities_and_zero_family() {
        let zero = make_family(&FamilySpec::SineModes { modes: 1, amplitudes: vec![0.0] }, &grid(), SpaceTag::ContinuousSup).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero.members()[0].sup_norm(), 0.0);
        let four = make_family(&FamilySpec::SineModes { modes: 2, amplitudes: vec![-1.0, 1.0] }, &grid(), SpaceTag::ContinuousSup).unwrap();
        assert_eq!(four.len(), 4);
        let sine2: FamilySpec = "sine2".parse().unwrap();
        assert_eq!(make_family(&sine2, &grid(), SpaceTag::L2).unwrap().len(), 25);
        assert_eq!(sine2.name(), "sine2");
        assert!(make_family(&FamilySpec::SineModes { modes: 2, amplitudes: vec![] }, &grid(), SpaceTag::L2).is_err());
    }

    #[test]
    fn lipschitz_bound_matches_a_derivative_oracle() {
        let fam = make_family(&FamilySpec::SineModes { modes: 2, amplitudes: vec![-1.0, 1.0] }, &grid(), SpaceTag::ContinuousSup).unwrap();
        let bound = fam.lipschitz_bound().unwrap();
        assert!((bound - PI * 1.5).abs() < 1e-12);
        // Largest finite-difference slope over all members stays below it.
        let h = grid().spacing(0);
        for m in fam.members() {
            let slope = m.values().windows(2).map(|w| ((w[1] - w[0]) / h).abs()).fold(0.0f64, f64::max);
            assert!(slope <= bound);
        }
        // The bound is attained by the derivative at 0 for a = (1, 1).
        let attained: f64 = (1..=2).map(|k| PI / k as f64).sum();
        assert!((attained - bound).abs() < 1e-12);
    }

    #[test]
    fn mid_family_is_disjoint() {
        let train = make_family(&"sine2".parse().unwrap(), &grid(), SpaceTag::ContinuousSup).unwrap();
        let test = make_family(&"sine2-mid".parse().unwrap(), &grid(), SpaceTag::ContinuousSup).unwrap();
        assert_eq!(test.len(), 16);
        for p in test.parameters() {
            assert!(!train.parameters().contains(p));
        }
    }

    #[test]
    fn bumps_and_parse_errors() {
        let b = make_family(&"bumps".parse().unwrap(), &grid(), SpaceTag::ContinuousSup).unwrap();
        assert_eq!(b.len(), 5);
        assert!((b.members()[2].at(0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!("sine9".parse::<FamilySpec>().is_err());
        assert!("cosine2".parse::<FamilySpec>().is_err());
    }
}
