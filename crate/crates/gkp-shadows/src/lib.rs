//! Logical shadow tomography for Gottesman-Kitaev-Preskill (GKP) codes.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: symplectic lattices, GKP codes, closest-vector queries,
//!   Voronoi shells and theta functions.
//! - [`symplectic`]: real and modular symplectic matrices, elementary Clifford
//!   generators, compilation, random walks and the frame potential.
//! - [`phase_space`]: Gaussian-mixture Wigner functions with exact
//!   characteristic, Husimi and overlap evaluation plus Born-rule samplers.
//! - [`twirl`]: random-walk and lattice-Gaussian displacement twirls.
//! - [`gkp_channels`]: depolarizing coefficients of the heterodyne,
//!   photon-click and parity measurement channels.
//! - [`logical_shadows`]: the decoder, the shadow protocol and
//!   median-of-means estimation.
//! - [`random_lattice`]: Haar-random symplectic lattices, Siegel transforms
//!   and the random-lattice Wigner sampling protocol.
//!
//! # Conventions
//!
//! Phase space is `R^{2n}` with quadratures ordered `(x_1..x_n, p_1..p_n)` and
//! symplectic form `J = [[0, I], [-I, 0]]`. Displacements are
//! `D(xi) = exp(-i sqrt(2 pi) xi^T J x)`, the characteristic function is
//! `chi(eta) = Tr[D(eta) rho]` and the Wigner function is normalised so that
//! `W_vac(x) = 2^n exp(-2 pi |x|^2)`, `Tr[rho sigma] = int W_rho W_sigma` and
//! `<beta|alpha>` has modulus `exp(-pi |alpha - beta|^2 / 2)`.
//!
//! Lattice bases store basis vectors as matrix rows.
//!
//! # Example
//!
//! ```
//! use gkp_shadows::gkp_channels::heterodyne_coefficients;
//! use gkp_shadows::logical_shadows::{decode_records, pointer_decoder, run_shadow_protocol, shadow_logical_estimate};
//! use gkp_shadows::phase_space::{default_grid_truncation, make_grid_state_logical, LogicalState};
//! use gkp_shadows::{GkpCode, TwirlSpec};
//!
//! let code = GkpCode::hexagonal_qubit();
//! let rho = make_grid_state_logical(&code, LogicalState::Zero, 0.2, default_grid_truncation(0.2))?;
//! let records = run_shadow_protocol(&rho, &code, 2_000, &TwirlSpec::Walk { m: 3 }, 7)?;
//! let decoded = decode_records(&pointer_decoder(&code)?, &records)?;
//! let estimate = shadow_logical_estimate(&decoded, &heterodyne_coefficients(&code)?)?;
//! assert!(estimate.get("Z")? > 0.5);
//! # Ok::<(), gkp_shadows::GkpError>(())
//! ```

pub mod error;
pub mod gkp_channels;
pub mod lattice;
pub mod logical_shadows;
pub mod phase_space;
pub mod random_lattice;
pub mod stats;
pub mod symplectic;
pub mod twirl;

pub use error::{GkpError, Result};
pub use lattice::{GkpCode, LatticeBasis, LatticeConstants};
pub use logical_shadows::{Decoder, EstimateReport, LogicalPauliVector, ShadowRecord};
pub use phase_space::{GaussianComponent, MeasurementOutcome, StateModel};
pub use symplectic::{GeneratorSequence, ModSymplecticMatrix, SymplecticMatrix};
pub use twirl::{LatticeGaussianTwirl, RandomWalkTwirl, TwirlSpec};

/// Complex scalar type used for weights and characteristic functions.
pub type Complex = num_complex::Complex64;
