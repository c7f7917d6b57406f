//! Spin-polarized coherent-transport engine for two-terminal tight-binding
//! junctions, built on non-equilibrium Green's functions.
//!
//! The engine partitions a junction into a finite device region and two
//! semi-infinite periodic leads. Leads enter through retarded self-energies
//! `Σ = v† g_s v`, where the surface Green's function `g_s` is obtained by
//! layer-doubling decimation. From the device Green's function
//! `G^R(z) = [z − H_σ − Σ_L − Σ_R]⁻¹` the engine computes
//!
//! * transmission `T_σ(E) = Tr[Γ_L G^R Γ_R G^A]` with `Γ = i(Σ − Σ†)`,
//! * its eigenchannel decomposition (eigenvalues of
//!   `Γ_L^{1/2} G^R Γ_R G^A Γ_L^{1/2}`),
//! * the equilibrium density matrix by complex-contour integration
//!   (semicircular arc, a line parallel to the real axis, and Matsubara
//!   pole residues),
//! * a mean-field self-consistency loop for the magnetic moment of the
//!   central device site,
//! * spin-resolved Landauer currents
//!   `I_σ(V) = (e/h) ∫ T_σ(E) [f_L(E) − f_R(E)] dE`,
//! * zero-bias conductance and the magnetoresistance
//!   `MR = (G_APC − G_PC)/G_PC` between parallel and antiparallel lead
//!   alignments.
//!
//! Conventions: the broadening `Γ = i(Σ − Σ†) = −2 Im Σ` is normalized so
//! that one perfect channel transmits `T = 1` (trace formulas written with
//! `Im Σ` factors instead of `Γ` differ from this by a factor of 4).
//! Currents are bookkept per spin in units of `e/h`, so a spin-degenerate
//! junction recovers the usual `2e/h` prefactor as an exact factor of two.
//! The basis is orthogonal throughout and all quantities are Γ-point only.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature,
//! enabled by default, only switches float math from `libm` to the standard
//! library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cmatrix;
pub mod density;
pub mod error;
pub(crate) mod fmath;
pub mod greens;
pub mod model;
pub mod observables;
pub mod quad;
pub mod transport;

pub use cmatrix::CMat;
pub use error::Error;
pub use num_complex::Complex64;
pub use model::{
    Alignment, DeviceSpec, DistanceLaw, JunctionModel, LeadSpec, Numerics, SpinChannel,
    SpinResolved,
};

/// Result alias used across the engine.
pub type Result<T> = core::result::Result<T, Error>;
