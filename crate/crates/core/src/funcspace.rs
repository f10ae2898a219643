//! Discretized function spaces.
//!
//! Functions on a 1-D or 2-D box are stored as values on a uniform tensor
//! grid. Point evaluation is piecewise multilinear interpolation, the sup
//! distance is taken over grid nodes, and L2 inner products use the composite
//! trapezoid rule on the same grid.

use std::fmt;
use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{EdapError, Result};

/// Index distance below which an evaluation point snaps onto a grid node.
const NODE_SNAP: f64 = 1e-9;
/// Slack allowed when checking that a point lies in the domain.
const DOMAIN_SLACK: f64 = 1e-12;

/// Axis-aligned box `[a_1,b_1] x ... x [a_d,b_d]` with `d` in {1, 2}.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    bounds: Vec<(f64, f64)>,
}

impl Domain {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() || bounds.len() > 2 {
            return Err(EdapError::UnsupportedDimension(bounds.len()));
        }
        for &(lo, hi) in &bounds {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(EdapError::Parameter(format!(
                    "axis bounds must satisfy lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { bounds })
    }

    /// `[0,1]^dim`.
    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(vec![(0.0, 1.0); dim])
    }

    pub fn unit_interval() -> Self {
        Self { bounds: vec![(0.0, 1.0)] }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.bounds[axis].0
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.bounds[axis].1
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.bounds[axis].1 - self.bounds[axis].0
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim()
            && point.iter().zip(&self.bounds).all(|(&x, &(lo, hi))| {
                let slack = DOMAIN_SLACK * (hi - lo).max(1.0);
                x >= lo - slack && x <= hi + slack
            })
    }
}

/// Euclidean distance between two points of equal dimension.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Uniform tensor grid over a [`Domain`]. Node ordering is row-major with
/// axis 0 varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    domain: Domain,
    nodes: Vec<usize>,
}

impl Grid {
    pub fn new(domain: Domain, nodes: Vec<usize>) -> Result<Self> {
        if nodes.len() != domain.dim() {
            return Err(EdapError::Shape(format!(
                "{} node counts for a {}-D domain",
                nodes.len(),
                domain.dim()
            )));
        }
        if nodes.iter().any(|&n| n < 2) {
            return Err(EdapError::Parameter("every axis needs at least 2 nodes".into()));
        }
        Ok(Self { domain, nodes })
    }

    /// Uniform grid on `[0,1]` with `nodes` points.
    pub fn unit_interval(nodes: usize) -> Result<Self> {
        Self::new(Domain::unit_interval(), vec![nodes])
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.domain.length(axis) / (self.nodes[axis] - 1) as f64
    }

    /// Coordinate of node `i` along `axis`. The last node hits the upper
    /// bound exactly.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        if i + 1 == self.nodes[axis] {
            self.domain.upper(axis)
        } else {
            self.domain.lower(axis) + i as f64 * self.spacing(axis)
        }
    }

    /// Per-axis multi-index of a flat node index.
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut rest = flat;
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = rest % self.nodes[axis];
            rest /= self.nodes[axis];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.nodes)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(axis, &i)| self.coord(axis, i))
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |k| self.point(k))
    }

    /// Composite trapezoid weight of a flat node.
    pub fn trapezoid_weight(&self, flat: usize) -> f64 {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(axis, &i)| {
                let h = self.spacing(axis);
                if i == 0 || i + 1 == self.nodes[axis] {
                    0.5 * h
                } else {
                    h
                }
            })
            .product()
    }

    pub fn trapezoid_weights(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.trapezoid_weight(k)).collect()
    }

    /// Same grid refined so that each cell is split into `factor` cells.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            domain: self.domain.clone(),
            nodes: self.nodes.iter().map(|&n| (n - 1) * factor + 1).collect(),
        }
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(EdapError::Shape(format!(
                "grid {:?} on {:?} vs grid {:?} on {:?}",
                self.nodes,
                self.domain.bounds(),
                other.nodes,
                other.domain.bounds()
            )));
        }
        Ok(())
    }
}

/// Which function space a [`GridFunction`] is considered a member of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceTag {
    /// `C(Omega)` with the supremum norm.
    ContinuousSup,
    /// `L2(Omega)`; point evaluation is not meaningful.
    L2,
    /// `C1([a,b])`, carries derivative samples.
    C1,
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpaceTag::ContinuousSup => "C",
            SpaceTag::L2 => "L2",
            SpaceTag::C1 => "C1",
        };
        f.write_str(s)
    }
}

/// A function sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    tag: SpaceTag,
    derivative: Option<Vec<f64>>,
}

impl GridFunction {
    /// Builds a `ContinuousSup` or `L2` function. Use [`GridFunction::c1`]
    /// for the C1 case.
    pub fn new(grid: Grid, values: Vec<f64>, tag: SpaceTag) -> Result<Self> {
        if tag == SpaceTag::C1 {
            return Err(EdapError::Precondition(
                "C1 functions need derivative samples; use GridFunction::c1".into(),
            ));
        }
        check_values(&grid, &values)?;
        Ok(Self { grid, values, tag, derivative: None })
    }

    pub fn c1(grid: Grid, values: Vec<f64>, derivative: Vec<f64>) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(EdapError::UnsupportedDimension(grid.dim()));
        }
        check_values(&grid, &values)?;
        check_values(&grid, &derivative)?;
        Ok(Self { grid, values, tag: SpaceTag::C1, derivative: Some(derivative) })
    }

    pub fn from_fn(grid: Grid, tag: SpaceTag, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = grid.points().map(|p| f(&p)).collect();
        Self::new(grid, values, tag)
    }

    /// C1 function on a 1-D grid from a value rule and its analytic derivative.
    pub fn c1_from_fn(grid: Grid, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(EdapError::UnsupportedDimension(grid.dim()));
        }
        let xs: Vec<f64> = (0..grid.len()).map(|i| grid.coord(0, i)).collect();
        let values = xs.iter().map(|&x| f(x)).collect();
        let derivative = xs.iter().map(|&x| df(x)).collect();
        Self::c1(grid, values, derivative)
    }

    pub fn constant(grid: Grid, c: f64, tag: SpaceTag) -> Result<Self> {
        let n = grid.len();
        match tag {
            SpaceTag::C1 => Self::c1(grid, vec![c; n], vec![0.0; n]),
            _ => Self::new(grid, vec![c; n], tag),
        }
    }

    pub fn zeros(grid: Grid, tag: SpaceTag) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
            tag,
            derivative: (tag == SpaceTag::C1).then(|| vec![0.0; n]),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn domain(&self) -> &Domain {
        self.grid.domain()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivative_values(&self) -> Option<&[f64]> {
        self.derivative.as_deref()
    }

    pub fn tag(&self) -> SpaceTag {
        self.tag
    }

    /// Same samples viewed in another space. Converting to C1 is refused
    /// because derivative data cannot be invented.
    pub fn with_tag(mut self, tag: SpaceTag) -> Result<Self> {
        match (self.tag, tag) {
            (a, b) if a == b => Ok(self),
            (_, SpaceTag::C1) => Err(EdapError::Precondition(
                "cannot retag as C1 without derivative samples".into(),
            )),
            _ => {
                self.tag = tag;
                self.derivative = None;
                Ok(self)
            }
        }
    }

    /// Piecewise multilinear interpolation of the node values at `point`.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        interpolate(&self.grid, &self.values, point)
    }

    /// Interpolated derivative samples (C1 functions only).
    pub fn evaluate_derivative(&self, point: &[f64]) -> Result<f64> {
        let d = self.derivative.as_ref().ok_or_else(|| {
            EdapError::Precondition("function carries no derivative samples".into())
        })?;
        interpolate(&self.grid, d, point)
    }

    /// Evaluation at a 1-D coordinate.
    pub fn at(&self, x: f64) -> Result<f64> {
        self.evaluate(&[x])
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        l2_inner_unchecked(&self.grid, &self.values, &self.values).max(0.0).sqrt()
    }

    /// Norm matching the space tag: sup for C, L2 for L2, and
    /// `sup|f| + sup|f'|` for C1.
    pub fn norm(&self) -> f64 {
        match self.tag {
            SpaceTag::ContinuousSup => self.sup_norm(),
            SpaceTag::L2 => self.l2_norm(),
            SpaceTag::C1 => {
                self.sup_norm()
                    + self
                        .derivative
                        .as_ref()
                        .map_or(0.0, |d| d.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            }
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        if let Some(d) = out.derivative.as_mut() {
            d.iter_mut().for_each(|v| *v *= alpha);
        }
        out
    }

    /// `self + alpha * other`. The result keeps `self`'s tag; derivative
    /// samples are combined when both sides carry them.
    pub fn axpy(&self, alpha: f64, other: &GridFunction) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        for (v, w) in out.values.iter_mut().zip(&other.values) {
            *v += alpha * w;
        }
        match (out.derivative.as_mut(), other.derivative.as_ref()) {
            (Some(d), Some(e)) => d.iter_mut().zip(e).for_each(|(v, w)| *v += alpha * w),
            (Some(_), None) => out.derivative = None,
            _ => {}
        }
        if out.derivative.is_none() && out.tag == SpaceTag::C1 {
            out.tag = SpaceTag::ContinuousSup;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    /// `sum_i coeffs[i] * atoms[i]` tagged with `tag`.
    pub fn linear_combination(
        grid: &Grid,
        coeffs: &[f64],
        atoms: &[GridFunction],
        tag: SpaceTag,
    ) -> Result<Self> {
        if coeffs.len() != atoms.len() {
            return Err(EdapError::Shape(format!(
                "{} coefficients for {} atoms",
                coeffs.len(),
                atoms.len()
            )));
        }
        let mut values = vec![0.0; grid.len()];
        for (c, atom) in coeffs.iter().zip(atoms) {
            grid.check_same(&atom.grid)?;
            for (v, a) in values.iter_mut().zip(&atom.values) {
                *v += c * a;
            }
        }
        if tag == SpaceTag::C1 {
            if atoms.iter().all(|a| a.derivative.is_some()) {
                let mut derivative = vec![0.0; grid.len()];
                for (c, atom) in coeffs.iter().zip(atoms) {
                    let d = atom.derivative.as_ref().expect("checked above");
                    for (v, a) in derivative.iter_mut().zip(d) {
                        *v += c * a;
                    }
                }
                return Self::c1(grid.clone(), values, derivative);
            }
            return Self::new(grid.clone(), values, SpaceTag::ContinuousSup);
        }
        Self::new(grid.clone(), values, tag)
    }

    /// Writes one node per row: coordinates, value and (C1 only) derivative.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = AXIS_NAMES[..self.grid.dim()].iter().map(|s| s.to_string()).collect();
        header.push("value".into());
        if self.derivative.is_some() {
            header.push("derivative".into());
        }
        w.write_record(&header)?;
        for k in 0..self.grid.len() {
            let mut row: Vec<String> = self.grid.point(k).iter().map(|x| x.to_string()).collect();
            row.push(self.values[k].to_string());
            if let Some(d) = &self.derivative {
                row.push(d[k].to_string());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format produced by [`GridFunction::write_csv`]. The domain
    /// and node counts are recovered from the coordinate columns.
    pub fn read_csv<R: Read>(reader: R, tag: SpaceTag) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        let dim = headers.iter().take_while(|h| AXIS_NAMES.contains(h)).count();
        let has_derivative = headers.iter().any(|h| h == "derivative");
        let mut coords: Vec<Vec<f64>> = vec![Vec::new(); dim];
        let mut values = Vec::new();
        let mut derivative = Vec::new();
        for record in r.records() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| EdapError::Shape(format!("bad numeric field {i}")))
            };
            for (axis, c) in coords.iter_mut().enumerate() {
                c.push(parse(axis)?);
            }
            values.push(parse(dim)?);
            if has_derivative {
                derivative.push(parse(dim + 1)?);
            }
        }
        let mut bounds = Vec::new();
        let mut nodes = Vec::new();
        for c in &coords {
            let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut distinct = c.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            bounds.push((lo, hi));
            nodes.push(distinct.len());
        }
        let grid = Grid::new(Domain::new(bounds)?, nodes)?;
        if has_derivative && tag == SpaceTag::C1 {
            Self::c1(grid, values, derivative)
        } else {
            Self::new(grid, values, tag)
        }
    }
}

const AXIS_NAMES: [&str; 2] = ["x", "y"];

fn check_values(grid: &Grid, values: &[f64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(EdapError::Shape(format!(
            "{} values for a grid of {} nodes",
            values.len(),
            grid.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(EdapError::Parameter("function values must be finite".into()));
    }
    Ok(())
}

fn interpolate(grid: &Grid, values: &[f64], point: &[f64]) -> Result<f64> {
    if !grid.domain().contains(point) {
        return Err(EdapError::Domain { point: point.to_vec() });
    }
    // Per axis: lower node index and fractional offset into the cell.
    let mut cells = Vec::with_capacity(grid.dim());
    for (axis, &x) in point.iter().enumerate() {
        let n = grid.nodes()[axis];
        let t = ((x - grid.domain().lower(axis)) / grid.spacing(axis)).clamp(0.0, (n - 1) as f64);
        let nearest = t.round();
        let (i, frac) = if (t - nearest).abs() < NODE_SNAP {
            let i = nearest as usize;
            if i == n - 1 {
                (n - 2, 1.0)
            } else {
                (i, 0.0)
            }
        } else {
            let i = (t.floor() as usize).min(n - 2);
            (i, t - i as f64)
        };
        cells.push((i, frac));
    }
    let mut acc = 0.0;
    let mut idx = vec![0usize; grid.dim()];
    for corner in 0..(1usize << grid.dim()) {
        let mut w = 1.0;
        for (axis, &(i, frac)) in cells.iter().enumerate() {
            let upper = (corner >> axis) & 1 == 1;
            idx[axis] = i + upper as usize;
            w *= if upper { frac } else { 1.0 - frac };
        }
        if w != 0.0 {
            acc += w * values[grid.flat_index(&idx)];
        }
    }
    Ok(acc)
}

fn l2_inner_unchecked(grid: &Grid, a: &[f64], b: &[f64]) -> f64 {
    (0..grid.len())
        .map(|k| grid.trapezoid_weight(k) * a[k] * b[k])
        .sum()
}

/// `max_k |f_k - g_k|` over grid nodes.
pub fn sup_distance(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    f.grid.check_same(&g.grid)?;
    Ok(f.values
        .iter()
        .zip(&g.values)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// Composite trapezoid approximation of `int f g`.
pub fn l2_inner(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    f.grid.check_same(&g.grid)?;
    Ok(l2_inner_unchecked(&f.grid, &f.values, &g.values))
}

pub fn l2_distance(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    Ok(f.sub(g)?.l2_norm())
}

/// `sup|f - g| + sup|f' - g'|`; both functions must carry derivatives.
pub fn c1_distance(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    let (df, dg) = match (f.derivative_values(), g.derivative_values()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(EdapError::Precondition(
                "C1 distance needs derivative samples on both sides".into(),
            ))
        }
    };
    let value_part = sup_distance(f, g)?;
    let deriv_part = df.iter().zip(dg).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
    Ok(value_part + deriv_part)
}

/// Distance in the metric of the given space.
pub fn distance_in(tag: SpaceTag, f: &GridFunction, g: &GridFunction) -> Result<f64> {
    match tag {
        SpaceTag::ContinuousSup => sup_distance(f, g),
        SpaceTag::L2 => l2_distance(f, g),
        SpaceTag::C1 => c1_distance(f, g),
    }
}

pub type Generator = Arc<dyn Fn(&[f64]) -> Result<GridFunction> + Send + Sync>;

/// Finite, parameterized stand-in for a compact subset of a function space.
#[derive(Clone)]
pub struct CompactFamily {
    name: String,
    parameters: Vec<Vec<f64>>,
    generator: Generator,
    lipschitz_bound: Option<f64>,
    members: Vec<GridFunction>,
}

impl fmt::Debug for CompactFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompactFamily")
            .field("name", &self.name)
            .field("parameters", &self.parameters.len())
            .field("lipschitz_bound", &self.lipschitz_bound)
            .finish()
    }
}

impl CompactFamily {
    pub fn new(
        name: impl Into<String>,
        parameters: Vec<Vec<f64>>,
        generator: Generator,
        lipschitz_bound: Option<f64>,
    ) -> Result<Self> {
        if parameters.is_empty() {
            return Err(EdapError::Configuration("compact family needs at least one parameter".into()));
        }
        let members = parameters
            .iter()
            .map(|p| generator(p))
            .collect::<Result<Vec<_>>>()?;
        let grid = members[0].grid();
        if members.iter().any(|m| m.grid() != grid) {
            return Err(EdapError::Shape("family members live on different grids".into()));
        }
        Ok(Self {
            name: name.into(),
            parameters,
            generator,
            lipschitz_bound,
            members,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parameters(&self) -> &[Vec<f64>] {
        &self.parameters
    }

    pub fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz_bound
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        self.members[0].grid()
    }

    /// Members in parameter order.
    pub fn members(&self) -> &[GridFunction] {
        &self.members
    }

    /// Evaluates the generator at an arbitrary parameter.
    pub fn generate(&self, parameter: &[f64]) -> Result<GridFunction> {
        (self.generator)(parameter)
    }
}
