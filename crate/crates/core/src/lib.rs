// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical SU(3) representation theory.
//!
//! The crate builds, from nothing but the Gelfand-Tsetlin lowering rules,
//! the whole chain needed to study SU(3)-symmetric quantum/classical
//! correspondences:
//!
//! * [`rep`] — representation labels `Q(p,q)`, GT basis enumeration, duality;
//! * [`generators`] — explicit ladder/Cartan matrices, `A_{jk}` generators
//!   and Casimir invariants for every class;
//! * [`group`] — group elements, Haar sampling and Wigner D-matrices;
//! * [`coupling`] — Clebsch-Gordan series and coefficient tables with the
//!   mixed-Casimir resolution of multiplicities;
//! * [`wigner`] — coupling, recoupling and product symbols, and the operator
//!   product decomposition they encode;
//! * [`correspondence`] — symbol correspondences on the coadjoint orbits,
//!   via characteristic numbers/matrices and operator kernels;
//! * [`twisted`] — orbit harmonics, twisted products, structure constants,
//!   integral trikernels and their Monte-Carlo verification;
//! * [`verify`] — the named verification suites exposed by the CLI.

pub mod coupling;
pub mod correspondence;
pub mod error;
pub mod generators;
pub mod group;
pub mod json;
pub mod linalg;
pub mod rep;
mod su2;
pub mod twisted;
pub mod verify;
pub mod wigner;

pub use error::{Error, Result};
pub use rep::{GTIndex, IrrepLabel};

/// Internal SU(2) Clebsch-Gordan coefficient with doubled arguments (exposed
/// for verification code).
pub fn su2_cg_doubled(
    two_j1: i64,
    two_m1: i64,
    two_j2: i64,
    two_m2: i64,
    two_j: i64,
    two_m: i64,
) -> f64 {
    su2::clebsch_gordan(two_j1, two_m1, two_j2, two_m2, two_j, two_m)
}
