use std::fmt;
use std::str::FromStr;

use crate::error::{EdapError, Result};
use crate::funcspace::{Grid, GridFunction, SpaceTag};

use super::{check_n, param, CodecKind, Decoder, Encoder, EncoderRule, IdentityApproximation};

/// Built-in Schauder bases on a 1-D interval `[a,b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisSpec {
    /// Faber-Schauder system of `C([a,b])`: `1`, the ramp, then dyadic hats
    /// level by level.
    FaberSchauder,
    /// `sqrt(2/L) sin(k pi (x-a)/L)`, `k >= 1`; orthonormal in `L2`.
    SineOnb,
    /// Normalized Legendre polynomials; orthonormal in `L2`.
    LegendreOnb,
}

impl BasisSpec {
    pub fn is_orthonormal(self) -> bool {
        !matches!(self, BasisSpec::FaberSchauder)
    }

    /// Space the basis is a Schauder basis of.
    pub fn space(self) -> SpaceTag {
        match self {
            BasisSpec::FaberSchauder => SpaceTag::ContinuousSup,
            _ => SpaceTag::L2,
        }
    }

    /// The first `n` basis functions sampled on `grid`.
    pub fn atoms(self, n: usize, grid: &Grid) -> Result<Vec<GridFunction>> {
        check_n(n)?;
        if grid.dim() != 1 {
            return Err(EdapError::UnsupportedDimension(grid.dim()));
        }
        let a = grid.domain().lower(0);
        let len = grid.domain().length(0);
        let tag = self.space();
        match self {
            BasisSpec::FaberSchauder => faber_schauder_nodes(n)
                .into_iter()
                .map(|node| {
                    GridFunction::from_fn(grid.clone(), tag, |p| node.atom((p[0] - a) / len))
                })
                .collect(),
            BasisSpec::SineOnb => (1..=n)
                .map(|k| {
                    let scale = (2.0 / len).sqrt();
                    GridFunction::from_fn(grid.clone(), tag, |p| {
                        scale * (k as f64 * std::f64::consts::PI * (p[0] - a) / len).sin()
                    })
                })
                .collect(),
            BasisSpec::LegendreOnb => (0..n)
                .map(|k| {
                    let scale = ((2 * k + 1) as f64 / len).sqrt();
                    GridFunction::from_fn(grid.clone(), tag, |p| {
                        scale * legendre(k, 2.0 * (p[0] - a) / len - 1.0)
                    })
                })
                .collect(),
        }
    }
}

impl fmt::Display for BasisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisSpec::FaberSchauder => "faber",
            BasisSpec::SineOnb => "sine",
            BasisSpec::LegendreOnb => "legendre",
        })
    }
}

impl FromStr for BasisSpec {
    type Err = EdapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "faber" | "faber-schauder" => Ok(BasisSpec::FaberSchauder),
            "sine" => Ok(BasisSpec::SineOnb),
            "legendre" => Ok(BasisSpec::LegendreOnb),
            other => Err(EdapError::Parameter(format!("unknown basis '{other}'"))),
        }
    }
}

fn legendre(k: usize, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if k == 0 {
        return p0;
    }
    for j in 1..k {
        let p2 = ((2 * j + 1) as f64 * t * p1 - j as f64 * p0) / (j + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// One Faber-Schauder index in unit coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
enum FsNode {
    Constant,
    Ramp,
    /// Hat supported on `[left, right]` with peak 1 at the midpoint.
    Hat { left: f64, right: f64 },
}

impl FsNode {
    fn atom(self, t: f64) -> f64 {
        match self {
            FsNode::Constant => 1.0,
            FsNode::Ramp => t,
            FsNode::Hat { left, right } => {
                let half = 0.5 * (right - left);
                let mid = left + half;
                (1.0 - (t - mid).abs() / half).max(0.0)
            }
        }
    }

    /// Point whose value the coefficient first depends on.
    fn point(self) -> f64 {
        match self {
            FsNode::Constant => 0.0,
            FsNode::Ramp => 1.0,
            FsNode::Hat { left, right } => 0.5 * (left + right),
        }
    }

    fn level(self) -> Option<u32> {
        match self {
            FsNode::Hat { left, right } => Some((1.0 / (right - left)).log2().round() as u32),
            _ => None,
        }
    }
}

/// Level-major ordering: constant, ramp, then the `2^j` hats of level `j`
/// from left to right.
fn faber_schauder_nodes(n: usize) -> Vec<FsNode> {
    let mut out = Vec::with_capacity(n);
    out.push(FsNode::Constant);
    if n > 1 {
        out.push(FsNode::Ramp);
    }
    let mut level = 0u32;
    while out.len() < n {
        let count = 1usize << level;
        let width = 1.0 / count as f64;
        for j in 0..count {
            if out.len() == n {
                break;
            }
            out.push(FsNode::Hat { left: j as f64 * width, right: (j + 1) as f64 * width });
        }
        level += 1;
    }
    out
}

/// Dyadic points `0, 1, 1/2, 1/4, 3/4, 1/8, ...` in unit coordinates; the
/// `i`-th Faber-Schauder coefficient is the first to read `f` there.
pub fn faber_schauder_points(n: usize) -> Vec<f64> {
    faber_schauder_nodes(n).into_iter().map(FsNode::point).collect()
}

pub(crate) fn faber_schauder_coefficients(f: &GridFunction, n: usize) -> Result<Vec<f64>> {
    if f.tag() == SpaceTag::L2 {
        return Err(EdapError::Precondition("Faber-Schauder coefficients need point evaluation".into()));
    }
    if f.domain().dim() != 1 {
        return Err(EdapError::UnsupportedDimension(f.domain().dim()));
    }
    let a = f.domain().lower(0);
    let len = f.domain().length(0);
    let at = |t: f64| f.at(a + t * len);
    let (fa, fb) = (at(0.0)?, at(1.0)?);
    faber_schauder_nodes(n)
        .into_iter()
        .map(|node| match node {
            FsNode::Constant => Ok(fa),
            FsNode::Ramp => Ok(fb - fa),
            FsNode::Hat { left, right } => {
                Ok(at(0.5 * (left + right))? - 0.5 * (at(left)? + at(right)?))
            }
        })
        .collect()
}

/// `f -> (c_1(f), ..., c_n(f))`.
pub fn basis_encoder(spec: BasisSpec, n: usize, grid: &Grid) -> Result<Encoder> {
    check_n(n)?;
    let params = vec![param("basis", spec), param("n", n)];
    match spec {
        BasisSpec::FaberSchauder => {
            if grid.dim() != 1 {
                return Err(EdapError::UnsupportedDimension(grid.dim()));
            }
            Encoder::new(CodecKind::Basis, EncoderRule::FaberSchauder { count: n }, 2.0, params)
        }
        _ => Encoder::new(
            CodecKind::Basis,
            EncoderRule::InnerProducts { atoms: spec.atoms(n, grid)? },
            1.0,
            params,
        ),
    }
}

/// `mu -> sum_i mu_i b_i`.
pub fn basis_decoder(spec: BasisSpec, n: usize, grid: &Grid) -> Result<Decoder> {
    let atoms = spec.atoms(n, grid)?;
    let lipschitz = match spec {
        // At any point at most one hat per level is nonzero.
        BasisSpec::FaberSchauder => {
            let levels = faber_schauder_nodes(n).iter().filter_map(|node| node.level()).max().map_or(0, |l| l + 1);
            2.0 + levels as f64
        }
        _ => 1.0,
    };
    Decoder::new(CodecKind::Basis, atoms, spec.space(), lipschitz, vec![param("basis", spec), param("n", n)])
}

/// Projection onto the first `n` basis vectors.
pub fn basis_identity(spec: BasisSpec, n: usize, grid: &Grid) -> Result<IdentityApproximation> {
    IdentityApproximation::new(basis_encoder(spec, n, grid)?, basis_decoder(spec, n, grid)?)
}
