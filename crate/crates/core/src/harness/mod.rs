//! Canonical operators, test families, convergence studies and the CLI.

mod cli;
mod families;
mod operators;
mod study;
mod svg;

pub use cli::run_cli;
pub use families::{make_family, FamilySpec, DEFAULT_AMPLITUDES, MID_AMPLITUDES};
pub use operators::{poisson_dirichlet, CanonicalOperator, OperatorKind, POISSON_RESIDUAL_TOL};
pub use study::{
    convergence_study, identity_study, overcomplete_sine_frame, CodecChoice, StudyReport, StudyRow, StudySettings,
    REPORT_HEADER,
};
pub use svg::render_svg;
