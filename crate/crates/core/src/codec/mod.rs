//! Encoders, decoders and the identity approximations `T_n = D_n o E_n`
//! they induce.
//!
//! Every encoder here is a linear map from a [`GridFunction`] to a finite
//! coefficient vector, and every decoder forms a linear combination of a
//! fixed list of atoms. The families differ in how coefficients are read off:
//! point samples, basis coefficient functionals, inner products with dual
//! frame atoms, or inner products with substituted atoms.
//!
//! `lipschitz_estimate` values are analytic and refer to the natural
//! coefficient norm of each family: the max norm for point-evaluation
//! encoders, the Euclidean norm for inner-product encoders.

mod basis;
mod dense;
mod frame;
mod sampling;
mod witness;

use std::fmt;

use crate::error::{EdapError, Result};
use crate::funcspace::{distance_in, l2_inner, Grid, GridFunction, SpaceTag};

pub use basis::{basis_decoder, basis_encoder, basis_identity, faber_schauder_points, BasisSpec};
pub use dense::{
    dense_decoder_normed, dense_substitution_codec, DenseSubstitution, NormedSubstitution, Perturbation,
    RangeCoefficients,
};
pub use frame::{build_frame, frame_decoder, frame_encoder, frame_identity, FrameSystem};
pub use sampling::{c1_sampling_identity, sampling_decoder, sampling_encoder, sampling_identity};
pub use witness::{encoder_divergence, encoder_divergence_witness, encoder_divergence_witness_among, NestedSampling, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodecKind {
    Sampling,
    Basis,
    Frame,
    Dense,
    Auxiliary,
}

impl fmt::Display for CodecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CodecKind::Sampling => "sampling",
            CodecKind::Basis => "basis",
            CodecKind::Frame => "frame",
            CodecKind::Dense => "dense",
            CodecKind::Auxiliary => "auxiliary",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum EncoderRule {
    /// `f -> (f(y_1), ..., f(y_k))`.
    PointSamples { points: Vec<Vec<f64>> },
    /// `f -> (<f, a_1>, ..., <f, a_k>)`.
    InnerProducts { atoms: Vec<GridFunction> },
    /// First `count` Faber-Schauder coefficients on a 1-D interval.
    FaberSchauder { count: usize },
    /// `f -> (f(left), f'(y_1), ..., f'(y_k))` for the C1 construction.
    ValueAndDerivativeSamples { left: f64, points: Vec<f64> },
    /// `f -> c(T f)` with `T` a base identity approximation.
    Auxiliary { base: Box<IdentityApproximation>, coefficients: Box<RangeCoefficients> },
}

/// Linear map `GridFunction -> R^k`.
#[derive(Debug, Clone)]
pub struct Encoder {
    kind: CodecKind,
    rule: EncoderRule,
    out_dim: usize,
    lipschitz: f64,
    params: Vec<(String, String)>,
}

impl Encoder {
    pub(crate) fn new(kind: CodecKind, rule: EncoderRule, lipschitz: f64, params: Vec<(String, String)>) -> Result<Self> {
        let out_dim = match &rule {
            EncoderRule::PointSamples { points } => points.len(),
            EncoderRule::InnerProducts { atoms } => atoms.len(),
            EncoderRule::FaberSchauder { count } => *count,
            EncoderRule::ValueAndDerivativeSamples { points, .. } => points.len() + 1,
            EncoderRule::Auxiliary { coefficients, .. } => coefficients.len(),
        };
        if out_dim == 0 {
            return Err(EdapError::Parameter("encoders need at least one output coordinate".into()));
        }
        Ok(Self { kind, rule, out_dim, lipschitz, params })
    }

    pub fn kind(&self) -> CodecKind {
        self.kind
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// Lipschitz constant `L_n` in the family's coefficient norm.
    pub fn lipschitz_estimate(&self) -> f64 {
        self.lipschitz
    }

    /// Lipschitz constant into the Euclidean norm of `R^k`. Max-norm
    /// estimates pick up the factor `sqrt(k)`.
    pub fn euclidean_lipschitz(&self) -> f64 {
        match self.rule {
            EncoderRule::InnerProducts { .. } => self.lipschitz,
            _ => self.lipschitz * (self.out_dim as f64).sqrt(),
        }
    }

    pub fn apply(&self, f: &GridFunction) -> Result<Vec<f64>> {
        match &self.rule {
            EncoderRule::PointSamples { points } => {
                if f.tag() == SpaceTag::L2 {
                    return Err(EdapError::IllDefinedSampling);
                }
                points.iter().map(|p| f.evaluate(p)).collect()
            }
            EncoderRule::InnerProducts { atoms } => atoms.iter().map(|a| l2_inner(f, a)).collect(),
            EncoderRule::FaberSchauder { count } => basis::faber_schauder_coefficients(f, *count),
            EncoderRule::ValueAndDerivativeSamples { left, points } => {
                if f.derivative_values().is_none() {
                    return Err(EdapError::Precondition("C1 sampling needs derivative samples".into()));
                }
                let mut out = Vec::with_capacity(points.len() + 1);
                out.push(f.at(*left)?);
                for &y in points {
                    out.push(f.evaluate_derivative(&[y])?);
                }
                Ok(out)
            }
            EncoderRule::Auxiliary { base, coefficients } => coefficients.apply(&base.apply(f)?),
        }
    }

    /// Plain `key=value` block describing the encoder.
    pub fn descriptor(&self) -> String {
        descriptor("encoder", self.kind, self.out_dim, self.lipschitz, &self.params)
    }
}

/// Linear map `R^k -> GridFunction`, `mu -> sum_i mu_i a_i`.
#[derive(Debug, Clone)]
pub struct Decoder {
    kind: CodecKind,
    grid: Grid,
    atoms: Vec<GridFunction>,
    out_tag: SpaceTag,
    lipschitz: f64,
    params: Vec<(String, String)>,
}

impl Decoder {
    pub fn new(
        kind: CodecKind,
        atoms: Vec<GridFunction>,
        out_tag: SpaceTag,
        lipschitz: f64,
        params: Vec<(String, String)>,
    ) -> Result<Self> {
        let grid = atoms
            .first()
            .ok_or_else(|| EdapError::Parameter("decoders need at least one atom".into()))?
            .grid()
            .clone();
        if atoms.iter().any(|a| a.grid() != &grid) {
            return Err(EdapError::Shape("decoder atoms live on different grids".into()));
        }
        Ok(Self { kind, grid, atoms, out_tag, lipschitz, params })
    }

    pub fn kind(&self) -> CodecKind {
        self.kind
    }

    pub fn in_dim(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[GridFunction] {
        &self.atoms
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn out_tag(&self) -> SpaceTag {
        self.out_tag
    }

    pub fn lipschitz_estimate(&self) -> f64 {
        self.lipschitz
    }

    pub fn apply(&self, coeffs: &[f64]) -> Result<GridFunction> {
        GridFunction::linear_combination(&self.grid, coeffs, &self.atoms, self.out_tag)
    }

    pub fn descriptor(&self) -> String {
        descriptor("decoder", self.kind, self.atoms.len(), self.lipschitz, &self.params)
    }
}

fn descriptor(role: &str, kind: CodecKind, dim: usize, lipschitz: f64, params: &[(String, String)]) -> String {
    let mut s = format!("role={role}\nkind={kind}\ndim={dim}\nlipschitz={lipschitz}\n");
    for (k, v) in params {
        s.push_str(&format!("{k}={v}\n"));
    }
    s
}

/// `T_n = D_n o E_n`.
#[derive(Debug, Clone)]
pub struct IdentityApproximation {
    pub encoder: Encoder,
    pub decoder: Decoder,
}

impl IdentityApproximation {
    pub fn new(encoder: Encoder, decoder: Decoder) -> Result<Self> {
        if encoder.out_dim() != decoder.in_dim() {
            return Err(EdapError::Shape(format!(
                "encoder emits {} coordinates, decoder expects {}",
                encoder.out_dim(),
                decoder.in_dim()
            )));
        }
        Ok(Self { encoder, decoder })
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        self.decoder.apply(&self.encoder.apply(f)?)
    }

    /// `d(f, T f)` in the metric of the decoder's output space.
    pub fn error(&self, f: &GridFunction) -> Result<f64> {
        let tf = self.apply(f)?;
        distance_in(self.decoder.out_tag(), f, &tf)
    }

    /// Operator-norm bound `L(E) * L(D)`.
    pub fn norm_bound(&self) -> f64 {
        self.encoder.lipschitz_estimate() * self.decoder.lipschitz_estimate()
    }
}

pub(crate) fn param(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(EdapError::Parameter("n must be at least 1".into()));
    }
    Ok(())
}
