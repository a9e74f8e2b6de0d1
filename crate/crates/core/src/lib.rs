//! Numerical laboratory for the Anderson model on antitrees with normalized
//! edge weights.
//!
//! The kinetic part of these operators couples consecutive shells through a
//! single vector, so the eigenvalue equation reduces to a scalar recursion
//! driven by 2×2 transfer matrices whose entries are harmonic means of the
//! shell potentials. The modules follow that structure:
//!
//! - [`distribution`]: single-site laws and the effective quantities derived
//!   from them (harmonic average, effective variance, growth constant, the
//!   energy windows where the theory applies).
//! - [`geometry`]: shell sequences for prescribed growth dimensions and the
//!   radial-projection combinatorics of the lattice `Z^d`.
//! - [`engine`]: shell sampling, transfer matrices, modified Prüfer
//!   variables, Lyapunov estimates, subordinate solutions and truncated
//!   Weyl functions.
//! - [`spectral`]: density estimates, almost-sure essential spectrum and
//!   the spectral-type classifier.
//! - [`harmonic`]: moment expansions of harmonic means, exact and sampled.
//! - [`rng`]: keyed counter-based random streams.

pub mod distribution;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod interval;
pub mod quadrature;
pub mod rng;
pub mod spectral;
mod stats;

pub use distribution::{EffectiveQuantities, PotentialDistribution, PotentialKind};
pub use engine::{PrueferState, ShellSample, SolutionPair, SubordinacyTrace, TrajectoryRecord, WeylPoint};
pub use error::{Error, Result};
pub use geometry::{GrowthLaw, ShellSequence, ZdShellData};
pub use interval::{Interval, IntervalSet};
pub use rng::{CounterRng, StreamKey};
pub use spectral::{DecayKind, DensityEstimate, SpectralClassification, Verdict};
