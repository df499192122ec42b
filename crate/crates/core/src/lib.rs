//! Spectra, exceptional points and coherent-perfect-absorption output spectra of
//! a pseudo-Hermitian cavity-magnonics system: one cavity mode with effective
//! gain coupled to two lossy Kittel modes.
//!
//! All frequencies and rates are `ω/2π` in MHz; times are in µs.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod scattering;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{
    build_effective_hamiltonian, check_pseudo_hermitian, cubic_coefficients, effective_gain,
    family_cubic_coefficients, g_min, realize_family, BranchSign, CavityParams, CubicCoefficients,
    EffectiveHamiltonian, MagnonParams, PseudoHermitianFamily, PseudoHermiticityCheck, SystemParams,
};
pub use spectral::{
    companion_roots, ep2_locate, ep3_critical, eigenvalues, k_from_eta, solve_cubic,
    symmetric_spectrum, two_mode_spectrum, EigenTriple, Ep3Report, SpectralClass, Tolerance,
};
