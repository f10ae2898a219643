//! Finite frames in a discretized Hilbert space.
//!
//! For atoms `f_1..f_m` with Gram matrix `G`, the frame operator
//! `S = sum_i <., f_i> f_i` restricted to the span has the same nonzero
//! spectrum as `G`, and the canonical dual atoms are
//! `f_i* = S^+ f_i = sum_j (G^+)_{ji} f_j`.

use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{EdapError, Result};
use crate::funcspace::{l2_inner, GridFunction, SpaceTag};
use crate::linalg::symmetric_pinv;

use super::{param, CodecKind, Decoder, Encoder, EncoderRule, IdentityApproximation};

const PINV_CUTOFF: f64 = 1e-12;
const RECONSTRUCTION_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct FrameSystem {
    atoms: Vec<GridFunction>,
    gram: DMatrix<f64>,
    dual_atoms: Vec<GridFunction>,
    lower_bound: f64,
    upper_bound: f64,
    rank: usize,
}

fn gram_matrix(atoms: &[GridFunction]) -> Result<DMatrix<f64>> {
    let m = atoms.len();
    let mut gram = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let g = l2_inner(&atoms[i], &atoms[j])?;
            gram[(i, j)] = g;
            gram[(j, i)] = g;
        }
    }
    Ok(gram)
}

/// Frame operator, canonical dual and optimal bounds on the span of `atoms`.
pub fn build_frame(atoms: Vec<GridFunction>) -> Result<FrameSystem> {
    if atoms.is_empty() {
        return Err(EdapError::DegenerateFrame("no atoms".into()));
    }
    let gram = gram_matrix(&atoms)?;
    let eig = symmetric_pinv(&gram, PINV_CUTOFF)?;
    if eig.rank == 0 {
        return Err(EdapError::DegenerateFrame("all atoms vanish".into()));
    }
    let positive: Vec<f64> = eig.eigenvalues.iter().cloned().filter(|&l| l > eig.cutoff && l > 0.0).collect();
    let lower_bound = positive[0];
    let upper_bound = *positive.last().expect("rank > 0");
    let grid = atoms[0].grid().clone();
    let dual_atoms = (0..atoms.len())
        .map(|i| {
            let coeffs: Vec<f64> = eig.pinv.column(i).iter().cloned().collect();
            GridFunction::linear_combination(&grid, &coeffs, &atoms, SpaceTag::L2)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameSystem { atoms, gram, dual_atoms, lower_bound, upper_bound, rank: eig.rank })
}

impl FrameSystem {
    /// Uses caller-supplied duals after checking `sum_i <f_j, f_i*> f_i = f_j`
    /// for every atom.
    pub fn with_dual(atoms: Vec<GridFunction>, dual_atoms: Vec<GridFunction>) -> Result<Self> {
        if dual_atoms.len() != atoms.len() {
            return Err(EdapError::Shape(format!("{} duals for {} atoms", dual_atoms.len(), atoms.len())));
        }
        let mut fs = build_frame(atoms)?;
        fs.dual_atoms = dual_atoms;
        for f in &fs.atoms {
            let err = fs.reconstruct(f)?.sub(f)?.l2_norm();
            if err > RECONSTRUCTION_TOL * f.l2_norm().max(1.0) {
                return Err(EdapError::Construction(format!(
                    "supplied duals fail reconstruction on the span (error {err:e})"
                )));
            }
        }
        Ok(fs)
    }

    pub fn atoms(&self) -> &[GridFunction] {
        &self.atoms
    }

    pub fn dual_atoms(&self) -> &[GridFunction] {
        &self.dual_atoms
    }

    pub fn gram_matrix(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `(A, B)`: smallest positive and largest eigenvalue of the frame
    /// operator on the span.
    pub fn bounds(&self) -> (f64, f64) {
        (self.lower_bound, self.upper_bound)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `sum_i <f, f_i*> f_i`.
    pub fn reconstruct(&self, f: &GridFunction) -> Result<GridFunction> {
        let coeffs = self.dual_atoms.iter().map(|d| l2_inner(f, d)).collect::<Result<Vec<_>>>()?;
        GridFunction::linear_combination(f.grid(), &coeffs, &self.atoms, SpaceTag::L2)
    }

    /// `sum_i |<f, f_i>|^2`.
    pub fn analysis_energy(&self, f: &GridFunction) -> Result<f64> {
        self.atoms.iter().map(|a| l2_inner(f, a).map(|c| c * c)).sum()
    }

    /// Gram matrix as CSV (`i,j,value`).
    pub fn write_gram_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["i", "j", "value"])?;
        for i in 0..self.gram.nrows() {
            for j in 0..self.gram.ncols() {
                w.write_record(&[i.to_string(), j.to_string(), self.gram[(i, j)].to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// `key,value` rows with the bounds, rank and atom count.
    pub fn write_bounds_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["key", "value"])?;
        w.write_record(&["atoms".to_string(), self.len().to_string()])?;
        w.write_record(&["rank".to_string(), self.rank.to_string()])?;
        w.write_record(&["lower_bound".to_string(), self.lower_bound.to_string()])?;
        w.write_record(&["upper_bound".to_string(), self.upper_bound.to_string()])?;
        w.flush()?;
        Ok(())
    }
}

/// `f -> (<f, f_1*>, ..., <f, f_m*>)`. The dual frame has upper bound
/// `1/A`, hence the Lipschitz constant `sqrt(1/A)`.
pub fn frame_encoder(fs: &FrameSystem) -> Result<Encoder> {
    Encoder::new(
        CodecKind::Frame,
        EncoderRule::InnerProducts { atoms: fs.dual_atoms.clone() },
        (1.0 / fs.lower_bound).sqrt(),
        vec![param("atoms", fs.len()), param("lower_bound", fs.lower_bound), param("upper_bound", fs.upper_bound)],
    )
}

/// `mu -> sum_i mu_i f_i`, Lipschitz `sqrt(B)`.
pub fn frame_decoder(fs: &FrameSystem) -> Result<Decoder> {
    Decoder::new(
        CodecKind::Frame,
        fs.atoms.clone(),
        SpaceTag::L2,
        fs.upper_bound.sqrt(),
        vec![param("atoms", fs.len()), param("upper_bound", fs.upper_bound)],
    )
}

/// Projection onto the span of the frame.
pub fn frame_identity(fs: &FrameSystem) -> Result<IdentityApproximation> {
    IdentityApproximation::new(frame_encoder(fs)?, frame_decoder(fs)?)
}
