//! Exact integer linear algebra and K0 of finitely presented categories with
//! covering families. Nothing in here touches floating point.

mod k0;
mod matrix;
mod normal_form;

pub use k0::{
    build_deck_presentation, build_gamma_leq_presentation, check_covering_invariant,
    present_k0, CoveringCheck, K0Group, K0GroupExport, K0Presentation, PresentationFile,
};
pub use matrix::IntMatrix;
pub use normal_form::{hnf, kernel_basis, rank, snf, snf_tracking, SmithForm, Track};
