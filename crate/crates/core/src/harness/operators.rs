use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::architecture::OperatorSpec;
use crate::error::{EdapError, Result};
use crate::funcspace::{Grid, GridFunction, SpaceTag};

/// Max-norm residual allowed for the scaled tridiagonal Poisson system.
pub const POISSON_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// `(Gf)(y) = int_a^y f`, cumulative trapezoid rule.
    Antiderivative,
    /// `-u'' = f`, `u(a) = u(b) = 0`, second-order finite differences.
    Poisson1D,
    /// `(Gf)(y) = sin(f(y))`.
    PointwiseSin,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::Antiderivative => "antiderivative",
            OperatorKind::Poisson1D => "poisson",
            OperatorKind::PointwiseSin => "sin",
        })
    }
}

impl FromStr for OperatorKind {
    type Err = EdapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "antiderivative" => Ok(OperatorKind::Antiderivative),
            "poisson" => Ok(OperatorKind::Poisson1D),
            "sin" => Ok(OperatorKind::PointwiseSin),
            other => Err(EdapError::Parameter(format!("unknown operator '{other}'"))),
        }
    }
}

/// Operator bound to the grid it is discretized on.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalOperator {
    pub kind: OperatorKind,
    pub grid: Grid,
}

impl CanonicalOperator {
    pub fn new(kind: OperatorKind, grid: Grid) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(EdapError::UnsupportedDimension(grid.dim()));
        }
        Ok(Self { kind, grid })
    }

    /// Output keeps the tag of `f` (C1 inputs come back as `ContinuousSup`).
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.grid() != &self.grid {
            return Err(EdapError::Shape("function is not on the operator's grid".into()));
        }
        let tag = if f.tag() == SpaceTag::C1 { SpaceTag::ContinuousSup } else { f.tag() };
        let values = match self.kind {
            OperatorKind::Antiderivative => {
                let h = self.grid.spacing(0);
                let v = f.values();
                let mut acc = vec![0.0; v.len()];
                for i in 1..v.len() {
                    acc[i] = acc[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
                }
                acc
            }
            OperatorKind::Poisson1D => poisson_dirichlet(f.values(), self.grid.spacing(0))?,
            OperatorKind::PointwiseSin => f.values().iter().map(|v| v.sin()).collect(),
        };
        GridFunction::new(self.grid.clone(), values, tag)
    }

    /// The operator as an endomorphism of `space`.
    pub fn spec(&self, space: SpaceTag) -> OperatorSpec {
        let op = self.clone();
        OperatorSpec::new(self.kind.to_string(), space, space, Arc::new(move |f: &GridFunction| op.apply(f)))
    }
}

/// Solves `-u_{i-1} + 2 u_i - u_{i+1} = h^2 f_i` on the interior nodes with
/// the Thomas algorithm and checks the residual.
pub fn poisson_dirichlet(f: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = f.len();
    if n < 3 {
        return Err(EdapError::Parameter("Poisson solve needs at least 3 nodes".into()));
    }
    let m = n - 2;
    let rhs: Vec<f64> = f[1..n - 1].iter().map(|v| h * h * v).collect();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = -0.5;
    d[0] = rhs[0] / 2.0;
    for i in 1..m {
        let denom = 2.0 + c[i - 1];
        c[i] = -1.0 / denom;
        d[i] = (rhs[i] + d[i - 1]) / denom;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    let at = |i: isize| if i < 0 || i >= m as isize { 0.0 } else { x[i as usize] };
    let residual = (0..m as isize)
        .map(|i| (-at(i - 1) + 2.0 * at(i) - at(i + 1) - rhs[i as usize]).abs())
        .fold(0.0f64, f64::max);
    if residual > POISSON_RESIDUAL_TOL {
        return Err(EdapError::Conditioning(format!("Poisson residual {residual:e}")));
    }
    let mut u = Vec::with_capacity(n);
    u.push(0.0);
    u.extend(x);
    u.push(0.0);
    Ok(u)
}
