// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::rep::{GTIndex, IrrepLabel};

#[derive(Error, Debug)]
pub enum Error {
    #[error("index {index:?} does not belong to class {label:?}")]
    LabelMismatch { label: IrrepLabel, index: GTIndex },

    #[error("invalid harmonic label: {0}")]
    InvalidHarmonic(String),

    #[error("casimir matrix is not scalar: off-diagonal residue {residue:e}")]
    NonScalarCasimir { residue: f64 },

    #[error("multiplicity-splitting operator has eigenvalue gap {gap:e} below threshold for class {class:?}")]
    DegenerateSplitting { class: IrrepLabel, gap: f64 },

    #[error("highest-weight subspace of class {class:?} has dimension {found}, expected multiplicity {expected}")]
    KernelDimensionMismatch {
        class: IrrepLabel,
        expected: usize,
        found: usize,
    },

    #[error("normalization failure while generating coupled vectors (norm {norm:e})")]
    NormalizationFailure { norm: f64 },

    #[error("coupling table for {p1:?} x {p2:?} has not been built")]
    TableNotBuilt { p1: IrrepLabel, p2: IrrepLabel },

    #[error("context error: {0}")]
    Context(String),

    #[error("invalid characteristic: {0}")]
    InvalidCharacteristic(String),

    #[error("operator is not invariant under the required stabilizer (residual {residual:e})")]
    NotInvariant { residual: f64 },

    #[error("kernel does not define a correspondence: {0}")]
    NotACorrespondence(String),

    #[error("matrix size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("a dual correspondence must be supplied for a non-semi-conformal characteristic")]
    MustSpecifyDual,
}

pub type Result<T> = std::result::Result<T, Error>;
