//! Point-sampling encoders on a nested sequence of points versus the
//! Faber-Schauder coefficient encoders that read `f` at the same points.
//!
//! Both encoders map `f` to `k(n)` numbers, but the basis coefficients
//! subtract neighbour averages, so the two disagree on any `f` that is not
//! piecewise constant at the relevant scale.

use crate::error::{EdapError, Result};
use crate::funcspace::{Domain, Grid, GridFunction, SpaceTag};

use super::basis::faber_schauder_coefficients;
use super::faber_schauder_points;

/// Divergence below this is treated as agreement.
const AGREEMENT_TOL: f64 = 1e-6;

/// Dyadic sampling points `a, b, (a+b)/2, ...`; level `n` uses the first
/// `k(n) = 2^n + 1` of them, so every level extends the previous one.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedSampling {
    lower: f64,
    length: f64,
    max_level: u32,
}

impl NestedSampling {
    pub fn dyadic(domain: &Domain, max_level: u32) -> Result<Self> {
        if domain.dim() != 1 {
            return Err(EdapError::UnsupportedDimension(domain.dim()));
        }
        if max_level == 0 || max_level > 20 {
            return Err(EdapError::Parameter(format!("max_level {max_level} not in 1..=20")));
        }
        Ok(Self { lower: domain.lower(0), length: domain.length(0), max_level })
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn count(&self, n: u32) -> usize {
        (1usize << n) + 1
    }

    pub fn points(&self, n: u32) -> Vec<f64> {
        faber_schauder_points(self.count(n)).into_iter().map(|t| self.lower + t * self.length).collect()
    }
}

/// `max_i |E_n(f)_i - E~_{k(n)}(f)_i|` between the first `k(n)`
/// Faber-Schauder coefficients and the samples at the first `k(n)` points.
pub fn encoder_divergence(f: &GridFunction, seq: &NestedSampling, n: u32) -> Result<f64> {
    if n == 0 || n > seq.max_level {
        return Err(EdapError::Parameter(format!("level {n} outside 1..={}", seq.max_level)));
    }
    let k = seq.count(n);
    let coeffs = faber_schauder_coefficients(f, k)?;
    let samples = seq.points(n).into_iter().map(|y| f.at(y)).collect::<Result<Vec<_>>>()?;
    Ok(coeffs.iter().zip(&samples).fold(0.0f64, |m, (c, s)| m.max((c - s).abs())))
}

/// A function on which the two encoders disagree from level `n` onwards.
/// Since both encodings at level `n` are prefixes of those at level `n+1`,
/// the divergence never decreases past `n`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub f: GridFunction,
    pub n: u32,
    pub k: usize,
    pub divergence: f64,
}

/// First candidate and first level with divergence above `1e-6`.
pub fn encoder_divergence_witness_among(candidates: &[GridFunction], seq: &NestedSampling) -> Result<Witness> {
    for f in candidates {
        for n in 1..=seq.max_level {
            let divergence = encoder_divergence(f, seq, n)?;
            if divergence > AGREEMENT_TOL {
                return Ok(Witness { f: f.clone(), n, k: seq.count(n), divergence });
            }
        }
    }
    Err(EdapError::DiagnosticFailure(format!(
        "no witness among {} candidates up to level {}",
        candidates.len(),
        seq.max_level
    )))
}

/// Smooth bump on `(left, right)`, peak 1 at the midpoint.
fn gap_bump(grid: &Grid, left: f64, right: f64) -> Result<GridFunction> {
    let (mid, half) = (0.5 * (left + right), 0.5 * (right - left));
    GridFunction::from_fn(grid.clone(), SpaceTag::ContinuousSup, |p| {
        let s = (p[0] - mid) / half;
        if s.abs() < 1.0 {
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        } else {
            0.0
        }
    })
}

/// Searches bumps supported in the gaps between the level-1, 2 and 3
/// sampling points; the early samples read 0 there.
pub fn encoder_divergence_witness(seq: &NestedSampling, grid: &Grid) -> Result<Witness> {
    if grid.dim() != 1 {
        return Err(EdapError::UnsupportedDimension(grid.dim()));
    }
    let mut candidates = Vec::new();
    for level in 1..=seq.max_level.min(3) {
        let mut pts = seq.points(level);
        pts.sort_by(f64::total_cmp);
        for w in pts.windows(2) {
            candidates.push(gap_bump(grid, w[0], w[1])?);
        }
    }
    encoder_divergence_witness_among(&candidates, seq)
}
