//! Finite-dimensional maps `phi: R^a -> R^b` fit on a closed ball.
//!
//! Two families: total-degree polynomials (least squares, inputs rescaled to
//! the unit ball) and Gaussian kernel ridge regression.

use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::error::{EdapError, Result};
use crate::linalg::ridge_lstsq;

pub const DEFAULT_POLY_RIDGE: f64 = 1e-10;
/// Above this input dimension the automatic choice switches to kernels.
pub const AUTO_POLY_MAX_DIM: usize = 6;
const REGION_TOL: f64 = 1e-9;
const RANK_CUTOFF: f64 = 1e-12;

/// Closed Euclidean ball `B(center, radius)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitRegion {
    center: Vec<f64>,
    radius: f64,
}

impl FitRegion {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(EdapError::Parameter(format!("radius {radius} must be finite and positive")));
        }
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(EdapError::Parameter("center must be a nonempty finite vector".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Self::new(vec![0.0; dim], radius)
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn distance_from_center(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.distance_from_center(x) <= self.radius * (1.0 + REGION_TOL) + REGION_TOL
    }

    /// Radial projection onto the ball.
    pub fn clip(&self, x: &[f64]) -> Vec<f64> {
        let d = self.distance_from_center(x);
        if d <= self.radius {
            return x.to_vec();
        }
        let s = self.radius / d;
        x.iter().zip(&self.center).map(|(a, c)| c + s * (a - c)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatentFamily {
    Polynomial { degree: usize },
    KernelRidge { bandwidth: f64, ridge: f64 },
}

impl LatentFamily {
    pub fn name(&self) -> &'static str {
        match self {
            LatentFamily::Polynomial { .. } => "polynomial",
            LatentFamily::KernelRidge { .. } => "kernel_ridge",
        }
    }
}

/// Fitted map. Polynomial coefficients refer to the rescaled variable
/// `z = (x - center) / radius`; one row per monomial, one column per output.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentMap {
    family: LatentFamily,
    in_dim: usize,
    out_dim: usize,
    region: FitRegion,
    exponents: Vec<Vec<u32>>,
    nodes: Vec<Vec<f64>>,
    coefficients: DMatrix<f64>,
    fit_residual: f64,
}

/// Exponent vectors of all monomials of total degree at most `degree` in
/// `dim` variables, ordered by degree and then lexicographically.
pub fn total_degree_exponents(dim: usize, degree: usize) -> Vec<Vec<u32>> {
    fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(dim, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for d in 0..=degree as u32 {
        rec(dim, d, &mut Vec::with_capacity(dim), &mut out);
    }
    out
}

fn monomial_row(z: &[f64], exponents: &[Vec<u32>], degree: usize) -> Vec<f64> {
    let powers: Vec<Vec<f64>> = z
        .iter()
        .map(|&v| {
            let mut p = Vec::with_capacity(degree + 1);
            let mut acc = 1.0;
            for _ in 0..=degree {
                p.push(acc);
                acc *= v;
            }
            p
        })
        .collect();
    exponents
        .iter()
        .map(|e| e.iter().enumerate().map(|(i, &k)| powers[i][k as usize]).product())
        .collect()
}

fn gaussian(a: &[f64], b: &[f64], bandwidth: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    (-d2 / (2.0 * bandwidth * bandwidth)).exp()
}

type Samples = [(Vec<f64>, Vec<f64>)];

fn check_samples(samples: &Samples, region: &FitRegion) -> Result<(usize, usize)> {
    let (x0, y0) = samples.first().ok_or_else(|| EdapError::Configuration("no training samples".into()))?;
    let (a, b) = (x0.len(), y0.len());
    if a != region.dim() {
        return Err(EdapError::Shape(format!("inputs have dimension {a}, region {}", region.dim())));
    }
    if b == 0 {
        return Err(EdapError::Shape("targets are empty".into()));
    }
    for (x, y) in samples {
        if x.len() != a || y.len() != b {
            return Err(EdapError::Shape("samples have inconsistent dimensions".into()));
        }
        if !region.contains(x) {
            return Err(EdapError::Precondition(format!(
                "sample at distance {} from the center lies outside radius {}",
                region.distance_from_center(x),
                region.radius()
            )));
        }
    }
    Ok((a, b))
}

fn targets(samples: &Samples, b: usize) -> DMatrix<f64> {
    DMatrix::from_fn(samples.len(), b, |r, c| samples[r].1[c])
}

fn check_weights(weights: &[f64], samples: &Samples) -> Result<()> {
    if weights.len() != samples.len() {
        return Err(EdapError::Shape(format!("{} weights for {} samples", weights.len(), samples.len())));
    }
    if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(EdapError::Parameter("sample weights must be positive and finite".into()));
    }
    Ok(())
}

/// Least-squares fit over monomials of total degree `<= degree`.
pub fn fit_polynomial(samples: &Samples, degree: usize, region: &FitRegion, ridge: f64) -> Result<LatentMap> {
    fit_polynomial_weighted(samples, &vec![1.0; samples.len()], degree, region, ridge)
}

/// Polynomial fit minimizing `sum_s w_s |phi(x_s) - y_s|^2` (plus ridge).
pub fn fit_polynomial_weighted(
    samples: &Samples,
    weights: &[f64],
    degree: usize,
    region: &FitRegion,
    ridge: f64,
) -> Result<LatentMap> {
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(EdapError::Parameter(format!("ridge {ridge} must be nonnegative")));
    }
    let (a, b) = check_samples(samples, region)?;
    check_weights(weights, samples)?;
    let exponents = total_degree_exponents(a, degree);
    let m = exponents.len();
    if ridge == 0.0 && m > samples.len() {
        return Err(EdapError::Conditioning(format!("{m} monomials but only {} samples", samples.len())));
    }
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|(x, _)| {
            let z: Vec<f64> = x.iter().zip(region.center()).map(|(v, c)| (v - c) / region.radius()).collect();
            monomial_row(&z, &exponents, degree)
        })
        .collect();
    let sqrt_w: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let design = DMatrix::from_fn(samples.len(), m, |r, c| sqrt_w[r] * rows[r][c]);
    let y = DMatrix::from_fn(samples.len(), b, |r, c| sqrt_w[r] * samples[r].1[c]);
    let (coefficients, rank) = ridge_lstsq(&design, &y, ridge, RANK_CUTOFF);
    if ridge == 0.0 && rank < m {
        return Err(EdapError::Conditioning(format!("design matrix has rank {rank} < {m}")));
    }
    let mut map = LatentMap {
        family: LatentFamily::Polynomial { degree },
        in_dim: a,
        out_dim: b,
        region: region.clone(),
        exponents,
        nodes: Vec::new(),
        coefficients,
        fit_residual: 0.0,
    };
    map.fit_residual = map.max_residual(samples)?;
    Ok(map)
}

/// Gaussian kernel ridge regression `phi(x) = sum_s alpha_s k(x, x_s)` with
/// `(K + ridge I) alpha = Y`.
pub fn fit_kernel_ridge(samples: &Samples, bandwidth: f64, ridge: f64, region: &FitRegion) -> Result<LatentMap> {
    fit_kernel_ridge_weighted(samples, &vec![1.0; samples.len()], bandwidth, ridge, region)
}

/// Weighted kernel ridge: the ridge on sample `s` becomes `ridge / w_s`.
pub fn fit_kernel_ridge_weighted(
    samples: &Samples,
    weights: &[f64],
    bandwidth: f64,
    ridge: f64,
    region: &FitRegion,
) -> Result<LatentMap> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(EdapError::Parameter(format!("bandwidth {bandwidth} must be positive")));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(EdapError::Parameter(format!("ridge {ridge} must be nonnegative")));
    }
    let (a, b) = check_samples(samples, region)?;
    check_weights(weights, samples)?;
    let s = samples.len();
    let nodes: Vec<Vec<f64>> = samples.iter().map(|(x, _)| x.clone()).collect();
    let mut k = DMatrix::from_fn(s, s, |i, j| gaussian(&nodes[i], &nodes[j], bandwidth));
    let y = targets(samples, b);
    let coefficients = if ridge > 0.0 {
        for i in 0..s {
            k[(i, i)] += ridge / weights[i];
        }
        match k.clone().cholesky() {
            Some(ch) => ch.solve(&y),
            None => k.lu().solve(&y).ok_or_else(|| EdapError::Conditioning("kernel system is singular".into()))?,
        }
    } else {
        let (alpha, _) = ridge_lstsq(&k, &y, 0.0, RANK_CUTOFF);
        let resid = (&k * &alpha - &y).amax();
        if resid > 1e-8 * y.amax().max(1.0) {
            return Err(EdapError::Conditioning(format!("inconsistent kernel system (residual {resid:e})")));
        }
        alpha
    };
    let mut map = LatentMap {
        family: LatentFamily::KernelRidge { bandwidth, ridge },
        in_dim: a,
        out_dim: b,
        region: region.clone(),
        exponents: Vec::new(),
        nodes,
        coefficients,
        fit_residual: 0.0,
    };
    map.fit_residual = map.max_residual(samples)?;
    Ok(map)
}

impl LatentMap {
    /// `x -> A x + c` as a degree-1 polynomial map on `region`.
    pub fn affine(a: &DMatrix<f64>, c: &[f64], region: &FitRegion) -> Result<Self> {
        let (b, dim) = a.shape();
        if dim != region.dim() || c.len() != b {
            return Err(EdapError::Shape(format!("affine map {b}x{dim} with offset {} on a {}-ball", c.len(), region.dim())));
        }
        let exponents = total_degree_exponents(dim, 1);
        let center = region.center();
        let mut coefficients = DMatrix::zeros(dim + 1, b);
        for o in 0..b {
            coefficients[(0, o)] = c[o] + (0..dim).map(|i| a[(o, i)] * center[i]).sum::<f64>();
            for i in 0..dim {
                // Row 1 + i holds the monomial z_i.
                let row = exponents.iter().position(|e| e[i] == 1).expect("degree-1 monomial");
                coefficients[(row, o)] = a[(o, i)] * region.radius();
            }
        }
        Ok(Self {
            family: LatentFamily::Polynomial { degree: 1 },
            in_dim: dim,
            out_dim: b,
            region: region.clone(),
            exponents,
            nodes: Vec::new(),
            coefficients,
            fit_residual: 0.0,
        })
    }

    pub fn identity(region: &FitRegion) -> Result<Self> {
        let d = region.dim();
        Self::affine(&DMatrix::identity(d, d), &vec![0.0; d], region)
    }

    pub fn constant(values: &[f64], region: &FitRegion) -> Result<Self> {
        Self::affine(&DMatrix::zeros(values.len(), region.dim()), values, region)
    }

    /// Concatenates the outputs of maps sharing family, region and
    /// (for kernels) training nodes: `x -> (phi_1(x), ..., phi_p(x))`.
    pub fn stack(parts: &[LatentMap]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| EdapError::Configuration("nothing to stack".into()))?;
        let mut parts: Vec<LatentMap> = parts.to_vec();
        // Lift polynomials to a common degree.
        if let LatentFamily::Polynomial { .. } = first.family {
            let degree = parts
                .iter()
                .map(|p| match p.family {
                    LatentFamily::Polynomial { degree } => Ok(degree),
                    _ => Err(EdapError::Shape("cannot stack maps of different families".into())),
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or(0);
            for p in parts.iter_mut() {
                p.raise_degree(degree);
            }
        }
        let first = &parts[0];
        for p in &parts[1..] {
            if p.family != first.family || p.region != first.region || p.exponents != first.exponents || p.nodes != first.nodes {
                return Err(EdapError::Shape("stacked maps must share family, region and nodes".into()));
            }
        }
        let out_dim = parts.iter().map(|p| p.out_dim).sum();
        let rows = first.coefficients.nrows();
        let mut coefficients = DMatrix::zeros(rows, out_dim);
        let mut col = 0;
        for p in &parts {
            coefficients.view_mut((0, col), (rows, p.out_dim)).copy_from(&p.coefficients);
            col += p.out_dim;
        }
        let fit_residual = parts.iter().fold(0.0f64, |m, p| m.max(p.fit_residual));
        Ok(Self { out_dim, coefficients, fit_residual, ..first.clone() })
    }

    fn raise_degree(&mut self, degree: usize) {
        let LatentFamily::Polynomial { degree: current } = self.family else { return };
        if current >= degree {
            return;
        }
        let exponents = total_degree_exponents(self.in_dim, degree);
        let mut coefficients = DMatrix::zeros(exponents.len(), self.out_dim);
        for (r, e) in self.exponents.iter().enumerate() {
            let target = exponents.iter().position(|f| f == e).expect("lower-degree monomial present");
            coefficients.row_mut(target).copy_from(&self.coefficients.row(r));
        }
        self.family = LatentFamily::Polynomial { degree };
        self.exponents = exponents;
        self.coefficients = coefficients;
    }

    pub fn family(&self) -> LatentFamily {
        self.family
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn region(&self) -> &FitRegion {
        &self.region
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coefficients
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    /// Max over training samples of the max-norm output error.
    pub fn fit_residual(&self) -> f64 {
        self.fit_residual
    }

    /// True when `x` lies outside the fit region.
    pub fn is_extrapolation(&self, x: &[f64]) -> bool {
        !self.region.contains(x)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim {
            return Err(EdapError::Shape(format!("input has dimension {}, map expects {}", x.len(), self.in_dim)));
        }
        let features: Vec<f64> = match self.family {
            LatentFamily::Polynomial { degree } => {
                let z: Vec<f64> =
                    x.iter().zip(self.region.center()).map(|(v, c)| (v - c) / self.region.radius()).collect();
                monomial_row(&z, &self.exponents, degree)
            }
            LatentFamily::KernelRidge { bandwidth, .. } => self.nodes.iter().map(|n| gaussian(x, n, bandwidth)).collect(),
        };
        Ok((0..self.out_dim)
            .map(|o| features.iter().enumerate().map(|(r, f)| f * self.coefficients[(r, o)]).sum())
            .collect())
    }

    fn max_residual(&self, samples: &Samples) -> Result<f64> {
        let mut worst = 0.0f64;
        for (x, y) in samples {
            let p = self.evaluate(x)?;
            for (a, b) in p.iter().zip(y) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst)
    }

    /// Rows `section,i,j,value`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["section", "i", "j", "value"])?;
        let mut put = |s: &str, i: usize, j: usize, v: String| w.write_record(&[s.to_string(), i.to_string(), j.to_string(), v]);
        put("family", 0, 0, self.family.name().to_string())?;
        put("in_dim", 0, 0, self.in_dim.to_string())?;
        put("out_dim", 0, 0, self.out_dim.to_string())?;
        match self.family {
            LatentFamily::Polynomial { degree } => put("degree", 0, 0, degree.to_string())?,
            LatentFamily::KernelRidge { bandwidth, ridge } => {
                put("bandwidth", 0, 0, bandwidth.to_string())?;
                put("ridge", 0, 0, ridge.to_string())?;
            }
        }
        put("radius", 0, 0, self.region.radius().to_string())?;
        put("fit_residual", 0, 0, self.fit_residual.to_string())?;
        for (i, c) in self.region.center().iter().enumerate() {
            put("center", i, 0, c.to_string())?;
        }
        for (i, node) in self.nodes.iter().enumerate() {
            for (j, v) in node.iter().enumerate() {
                put("node", i, j, v.to_string())?;
            }
        }
        for r in 0..self.coefficients.nrows() {
            for c in 0..self.coefficients.ncols() {
                put("coef", r, c, self.coefficients[(r, c)].to_string())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(reader);
        let bad = |m: &str| EdapError::Parameter(format!("latent map csv: {m}"));
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number '{s}'")));
        let idx = |s: &str| s.parse::<usize>().map_err(|_| bad(&format!("bad index '{s}'")));
        let (mut family, mut in_dim, mut out_dim, mut degree) = (String::new(), 0, 0, 0);
        let (mut bandwidth, mut ridge, mut radius, mut fit_residual) = (0.0, 0.0, 0.0, 0.0);
        let mut center = Vec::new();
        let mut nodes: Vec<Vec<f64>> = Vec::new();
        let mut coef: Vec<(usize, usize, f64)> = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            if rec.len() != 4 {
                return Err(bad("expected 4 columns"));
            }
            let (i, j, v) = (idx(&rec[1])?, idx(&rec[2])?, &rec[3]);
            match &rec[0] {
                "family" => family = v.to_string(),
                "in_dim" => in_dim = idx(v)?,
                "out_dim" => out_dim = idx(v)?,
                "degree" => degree = idx(v)?,
                "bandwidth" => bandwidth = num(v)?,
                "ridge" => ridge = num(v)?,
                "radius" => radius = num(v)?,
                "fit_residual" => fit_residual = num(v)?,
                "center" => {
                    let len = center.len().max(i + 1);
                    center.resize(len, 0.0);
                    center[i] = num(v)?;
                }
                "node" => {
                    if nodes.len() <= i {
                        nodes.resize(i + 1, Vec::new());
                    }
                    let len = nodes[i].len().max(j + 1);
                    nodes[i].resize(len, 0.0);
                    nodes[i][j] = num(v)?;
                }
                "coef" => coef.push((i, j, num(v)?)),
                other => return Err(bad(&format!("unknown section '{other}'"))),
            }
        }
        let region = FitRegion::new(center, radius)?;
        let (family, exponents) = match family.as_str() {
            "polynomial" => (LatentFamily::Polynomial { degree }, total_degree_exponents(in_dim, degree)),
            "kernel_ridge" => (LatentFamily::KernelRidge { bandwidth, ridge }, Vec::new()),
            other => return Err(bad(&format!("unknown family '{other}'"))),
        };
        let rows = if exponents.is_empty() { nodes.len() } else { exponents.len() };
        let mut coefficients = DMatrix::zeros(rows, out_dim);
        for (i, j, v) in coef {
            if i >= rows || j >= out_dim {
                return Err(bad("coefficient index out of range"));
            }
            coefficients[(i, j)] = v;
        }
        if region.dim() != in_dim {
            return Err(bad("center dimension disagrees with in_dim"));
        }
        Ok(Self { family, in_dim, out_dim, region, exponents, nodes, coefficients, fit_residual })
    }
}

/// Which family to fit and with what parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApproximatorSettings {
    /// Polynomial of degree 3 up to dimension 6, kernel ridge above.
    Auto,
    Polynomial { degree: usize, ridge: f64 },
    /// `bandwidth: None` uses the median pairwise sample distance.
    KernelRidge { bandwidth: Option<f64>, ridge: f64 },
}

impl ApproximatorSettings {
    pub fn polynomial(degree: usize) -> Self {
        ApproximatorSettings::Polynomial { degree, ridge: DEFAULT_POLY_RIDGE }
    }

    pub fn fit(&self, samples: &Samples, region: &FitRegion) -> Result<LatentMap> {
        self.fit_weighted(samples, &vec![1.0; samples.len()], region)
    }

    pub fn fit_weighted(&self, samples: &Samples, weights: &[f64], region: &FitRegion) -> Result<LatentMap> {
        match *self {
            ApproximatorSettings::Auto if region.dim() <= AUTO_POLY_MAX_DIM => {
                fit_polynomial_weighted(samples, weights, 3, region, DEFAULT_POLY_RIDGE)
            }
            ApproximatorSettings::Auto => {
                ApproximatorSettings::KernelRidge { bandwidth: None, ridge: 1e-8 }.fit_weighted(samples, weights, region)
            }
            ApproximatorSettings::Polynomial { degree, ridge } => {
                fit_polynomial_weighted(samples, weights, degree, region, ridge)
            }
            ApproximatorSettings::KernelRidge { bandwidth, ridge } => {
                let h = match bandwidth {
                    Some(h) => h,
                    None => median_pairwise_distance(samples).unwrap_or(region.radius()),
                };
                fit_kernel_ridge_weighted(samples, weights, h, ridge, region)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ApproximatorSettings::Auto => "auto".into(),
            ApproximatorSettings::Polynomial { degree, ridge } => format!("polynomial(degree={degree},ridge={ridge})"),
            ApproximatorSettings::KernelRidge { bandwidth, ridge } => match bandwidth {
                Some(h) => format!("kernel_ridge(bandwidth={h},ridge={ridge})"),
                None => format!("kernel_ridge(bandwidth=median,ridge={ridge})"),
            },
        }
    }
}

fn median_pairwise_distance(samples: &Samples) -> Option<f64> {
    let mut d = Vec::new();
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            let v: f64 = samples[i].0.iter().zip(&samples[j].0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if v > 0.0 {
                d.push(v);
            }
        }
    }
    if d.is_empty() {
        return None;
    }
    d.sort_by(f64::total_cmp);
    Some(d[d.len() / 2])
}
