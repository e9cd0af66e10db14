//! Derived algebras given by presentations, and the filtered cohomology theories built from them.

mod circle;
mod coeffs;
mod koszul_rees;
mod poly;
mod presentation;
mod tables;
mod theories;

pub use circle::{circle_comparison, filtered_circle_stub, CircleComparison, DMinusDual};
pub use coeffs::{minimize, realize, PolyCoeffs, Realized};
pub use koszul_rees::{
    crystallization_gr_compare, default_bound, derham_stub, infinitesimal_stub, koszul_rees, pd_envelope_stub,
    CrystallizationReport, Flavor, KoszulRees, KrElem, PdAlgebraStub,
};
pub use poly::{Monomial, Poly};
pub use presentation::{cotangent_complex, kahler, AlgebraPresentation, ModulePresentation, Regularity};
pub use tables::{
    free_crystalline_stub, free_crystalline_summands, graded_free_table, qrsp_truncated_check, CrystallineSummand,
    QrspReport, TableFlavor,
};
pub use theories::{gr_consistency, hochschild_stub, hodge_graded_pieces, theory_stub, GrComparison, Theory};
