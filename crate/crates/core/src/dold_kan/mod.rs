//! Simplicial modules, the Dold–Kan correspondence and derived power functors.

mod cells;
mod coeffs;
mod derived;
mod power;
mod simplicial;

pub use coeffs::{BaseCoeffs, Coeffs, TwoBehavior};
pub use derived::{derived_power, derived_power_free, lsym_total, FreeComplex};
pub use power::{power_basis, power_module, power_on_free, PowerKind};
pub use simplicial::{apply_levelwise, dk_gamma, normalize, Normalized, SimplicialModule};
