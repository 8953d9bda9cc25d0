//! Centre-of-mass quantum dynamics of a free-falling nanosphere.
//!
//! The wavefunction is kept Gaussian at all times. Between stochastic
//! localization events it evolves under the free Hamiltonian, an optional
//! self-gravitational harmonic term whose stiffness depends on the packet's
//! own spread, and an optional continuous (QMUPL-type) collapse term.
//! Localization events multiply the packet by a Gaussian jump factor at
//! Poisson-distributed times.
//!
//! ```
//! use nanofall::{gravity, state::NanosphereSpec};
//!
//! let gold = NanosphereSpec::new(1e-7, 20000.0)?;
//! let bs = gravity::bound_state(&gravity::SpringModel::new(gold))?;
//! assert!(bs.spread > 1e-8 && bs.spread < 1e-7);
//! # Ok::<(), nanofall::Error>(())
//! ```

pub mod collapse;
pub mod constants;
pub mod decoherence;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod gravity;
pub mod scenario;
pub mod state;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/gaussian-state.md")]
    struct GaussianStates;
    #[doc = include_str!("../../../book/src/self-gravity.md")]
    struct SelfGravity;
    #[doc = include_str!("../../../book/src/dynamics.md")]
    struct Dynamics;
    #[doc = include_str!("../../../book/src/collapse.md")]
    struct Collapse;
    #[doc = include_str!("../../../book/src/decoherence.md")]
    struct Decoherence;
    #[doc = include_str!("../../../book/src/ensembles.md")]
    struct Ensembles;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
