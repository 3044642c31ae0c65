//! Discrete inf-sup constants of the lowest-order Taylor-Hood pairs
//! (`Q2^2 x Q1` on parallelograms, `P2^2 x P1` on triangles) on anisotropic
//! patch meshes.
//!
//! The pipeline is
//!
//! 1. [`patchgen`] builds a conforming mesh from a [`patchgen::PatchSpec`],
//! 2. [`assemble`] numbers the unknowns and assembles the stiffness,
//!    divergence and pressure-mass matrices,
//! 3. [`spectra`] computes `beta` from the pressure Schur complement,
//! 4. [`bench`] runs whole tables of such computations.
//!
//! [`lemmalab`] checks the closed-form identities behind the stability
//! argument on concrete macro-elements.

pub mod assemble;
pub mod bench;
pub mod elements;
pub mod field;
pub mod lemmalab;
pub mod patchgen;
pub mod spectra;
