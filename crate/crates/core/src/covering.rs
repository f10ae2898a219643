//! Epsilon-coverings of a domain and the smooth bump partition of unity
//! subordinate to them.

use std::io::Write;

use crate::error::{EdapError, Result};
use crate::funcspace::{distance, Domain, Grid, GridFunction, SpaceTag};

/// Probe points per center cell used to certify the covering property.
const PROBES_PER_CELL: usize = 100;
/// Quadrature cells per center cell for the 1-D antiderivative table.
const QUADRATURE_PER_CELL: usize = 256;

/// Finite set of centers whose open epsilon-balls cover the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Covering {
    domain: Domain,
    epsilon: f64,
    centers: Vec<Vec<f64>>,
    /// Worst probe distance to the nearest center, inflated by the probe
    /// half-diagonal. Always `< epsilon`.
    certified_radius: f64,
}

impl Covering {
    /// Validates an arbitrary center set. The covering property is certified
    /// on a probe grid: every probe point must have a center closer than
    /// `epsilon` minus the probe half-diagonal.
    pub fn from_centers(domain: Domain, epsilon: f64, centers: Vec<Vec<f64>>) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(EdapError::Parameter(format!("epsilon must be positive, got {epsilon}")));
        }
        if centers.is_empty() {
            return Err(EdapError::Parameter("covering needs at least one center".into()));
        }
        if let Some(c) = centers.iter().find(|c| !domain.contains(c)) {
            return Err(EdapError::Domain { point: c.clone() });
        }
        let per_axis = probe_count_per_axis(&domain, epsilon);
        let probe = Grid::new(domain.clone(), per_axis)?;
        let half_diag = (0..domain.dim())
            .map(|a| 0.5 * probe.spacing(a))
            .map(|h| h * h)
            .sum::<f64>()
            .sqrt();
        let mut worst = 0.0f64;
        for p in probe.points() {
            let nearest = centers
                .iter()
                .map(|c| distance(&p, c))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest);
        }
        let certified_radius = worst + half_diag;
        if certified_radius >= epsilon {
            return Err(EdapError::Parameter(format!(
                "centers do not form an {epsilon}-covering (certified radius {certified_radius})"
            )));
        }
        Ok(Self { domain, epsilon, centers, certified_radius })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn certified_radius(&self) -> f64 {
        self.certified_radius
    }

    /// `index,x[,y]` per center.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["index".to_string(), "x".to_string()];
        if self.domain.dim() == 2 {
            header.push("y".into());
        }
        w.write_record(&header)?;
        for (i, c) in self.centers.iter().enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(c.iter().map(|x| x.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn probe_count_per_axis(domain: &Domain, epsilon: f64) -> Vec<usize> {
    let per_axis_factor = match domain.dim() {
        1 => PROBES_PER_CELL,
        _ => (PROBES_PER_CELL as f64).sqrt() as usize,
    };
    (0..domain.dim())
        .map(|a| {
            let cells = (domain.length(a) / epsilon).ceil().max(1.0) as usize;
            cells * per_axis_factor + 1
        })
        .collect()
}

/// Midpoint grid with `ceil(L_axis / epsilon)` centers per axis. Each axis
/// distance to the nearest center is at most `epsilon / 2`.
pub fn build_epsilon_covering(domain: &Domain, epsilon: f64) -> Result<Covering> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(EdapError::Parameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let axes: Vec<Vec<f64>> = (0..domain.dim())
        .map(|a| {
            let len = domain.length(a);
            let k = (len / epsilon).ceil().max(1.0) as usize;
            (0..k)
                .map(|j| domain.lower(a) + (j as f64 + 0.5) * len / k as f64)
                .collect()
        })
        .collect();
    let centers = match axes.as_slice() {
        [xs] => xs.iter().map(|&x| vec![x]).collect(),
        [xs, ys] => xs
            .iter()
            .flat_map(|&x| ys.iter().map(move |&y| vec![x, y]))
            .collect(),
        _ => unreachable!("Domain enforces dim in {{1, 2}}"),
    };
    Covering::from_centers(domain.clone(), epsilon, centers)
}

/// Unnormalized bump `exp(-1 / (eps^2 - d^2))` for `d < eps`, zero otherwise.
pub fn bump_value(y: &[f64], center: &[f64], epsilon: f64) -> f64 {
    match log_bump(y, center, epsilon) {
        Some(l) => l.exp(),
        None => 0.0,
    }
}

fn log_bump(y: &[f64], center: &[f64], epsilon: f64) -> Option<f64> {
    let d2: f64 = y.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
    let gap = epsilon * epsilon - d2;
    (gap > 0.0).then(|| -1.0 / gap)
}

/// Normalized bumps `P_i = B_i / sum_l B_l` over a [`Covering`].
///
/// The quotient is evaluated with the largest log-bump factored out, so the
/// values stay representable for small epsilon where every raw bump
/// underflows.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    covering: Covering,
    /// 1-D only: quadrature grid and cumulative integrals per center.
    antiderivatives: Option<(Grid, Vec<Vec<f64>>)>,
}

pub fn partition_of_unity(cov: Covering) -> Result<PartitionOfUnity> {
    PartitionOfUnity::new(cov)
}

impl PartitionOfUnity {
    pub fn new(covering: Covering) -> Result<Self> {
        let mut pou = Self { covering, antiderivatives: None };
        if pou.covering.domain().dim() == 1 {
            let cells = pou.covering.len().max(4) * QUADRATURE_PER_CELL;
            let grid = Grid::new(pou.covering.domain().clone(), vec![cells + 1])?;
            let table = pou.cumulative_integrals(&grid)?;
            pou.antiderivatives = Some((grid, table));
        }
        Ok(pou)
    }

    pub fn covering(&self) -> &Covering {
        &self.covering
    }

    pub fn len(&self) -> usize {
        self.covering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.covering.is_empty()
    }

    /// All `P_i(y)`. Fails when no center lies within epsilon of `y`.
    pub fn evaluate(&self, y: &[f64]) -> Result<Vec<f64>> {
        let eps = self.covering.epsilon();
        let logs: Vec<Option<f64>> = self
            .covering
            .centers()
            .iter()
            .map(|c| log_bump(y, c, eps))
            .collect();
        let top = logs.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Err(EdapError::CoveringViolation { point: y.to_vec() });
        }
        let mut out: Vec<f64> = logs
            .iter()
            .map(|l| l.map_or(0.0, |l| (l - top).exp()))
            .collect();
        let total: f64 = out.iter().sum();
        if total < 1e-300 {
            return Err(EdapError::CoveringViolation { point: y.to_vec() });
        }
        out.iter_mut().for_each(|v| *v /= total);
        Ok(out)
    }

    pub fn value(&self, i: usize, y: &[f64]) -> Result<f64> {
        self.check_index(i)?;
        Ok(self.evaluate(y)?[i])
    }

    /// The functions `P_i` sampled on `grid`.
    pub fn atoms_on(&self, grid: &Grid) -> Result<Vec<GridFunction>> {
        if grid.domain() != self.covering.domain() {
            return Err(EdapError::Shape("grid domain differs from covering domain".into()));
        }
        let mut columns = vec![Vec::with_capacity(grid.len()); self.len()];
        for p in grid.points() {
            for (col, v) in columns.iter_mut().zip(self.evaluate(&p)?) {
                col.push(v);
            }
        }
        columns
            .into_iter()
            .map(|vals| GridFunction::new(grid.clone(), vals, SpaceTag::ContinuousSup))
            .collect()
    }

    /// Trapezoid values of `int_a^x P_i` at every node of a 1-D grid, one
    /// vector per center.
    pub fn cumulative_integrals(&self, grid: &Grid) -> Result<Vec<Vec<f64>>> {
        if grid.dim() != 1 {
            return Err(EdapError::UnsupportedDimension(grid.dim()));
        }
        let h = grid.spacing(0);
        let mut table = vec![vec![0.0; grid.len()]; self.len()];
        let mut prev = self.evaluate(&[grid.coord(0, 0)])?;
        for j in 1..grid.len() {
            let cur = self.evaluate(&[grid.coord(0, j)])?;
            for (i, row) in table.iter_mut().enumerate() {
                row[j] = row[j - 1] + 0.5 * h * (prev[i] + cur[i]);
            }
            prev = cur;
        }
        Ok(table)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(EdapError::Parameter(format!("index {i} out of range for {} centers", self.len())));
        }
        Ok(())
    }
}

/// `int_a^y P_i(x) dx` by composite trapezoid on the partition's internal
/// quadrature grid (1-D domains only).
pub fn pou_antiderivative(pou: &PartitionOfUnity, i: usize, y: f64) -> Result<f64> {
    let (grid, table) = pou
        .antiderivatives
        .as_ref()
        .ok_or_else(|| EdapError::UnsupportedDimension(pou.covering.domain().dim()))?;
    pou.check_index(i)?;
    let domain = grid.domain();
    if !domain.contains(&[y]) {
        return Err(EdapError::Domain { point: vec![y] });
    }
    let h = grid.spacing(0);
    let t = ((y - domain.lower(0)) / h).clamp(0.0, (grid.len() - 1) as f64);
    let j = (t.floor() as usize).min(grid.len() - 1);
    let xj = grid.coord(0, j);
    let tail = y - xj;
    if tail <= 0.0 {
        return Ok(table[i][j]);
    }
    let left = pou.value(i, &[xj])?;
    let right = pou.value(i, &[y])?;
    Ok(table[i][j] + 0.5 * tail * (left + right))
}
