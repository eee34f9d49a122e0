// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Irreducible representation labels and the Gelfand-Tsetlin index scheme.
//!
//! A class of irreducible unitary SU(3) representations is named by a pair of
//! nonnegative integers `(p, q)`. Basis vectors inside a representation are
//! indexed by a weight triple `ν = (ν₁,ν₂,ν₃)` together with a nonnegative
//! half-integer spin `J` that resolves weight multiplicity. Half-integers are
//! stored doubled (`two_j = 2J`) so that all label arithmetic stays exact.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::Error;

/// A representation class label `(p, q)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IrrepLabel(pub u32, pub u32);

impl fmt::Debug for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q({},{})", self.0, self.1)
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

impl IrrepLabel {
    pub fn new(p: u32, q: u32) -> Self {
        IrrepLabel(p, q)
    }

    pub fn p(&self) -> u32 {
        self.0
    }

    pub fn q(&self) -> u32 {
        self.1
    }

    /// The dual class: `(p,q)ˇ = (q,p)`.
    pub fn dual(&self) -> Self {
        IrrepLabel(self.1, self.0)
    }

    /// `|p| = p + q`.
    pub fn degree(&self) -> u32 {
        self.0 + self.1
    }

    /// `dim Q(p,q) = (p+1)(q+1)(p+q+2)/2`.
    pub fn dim(&self) -> usize {
        let (p, q) = (self.0 as usize, self.1 as usize);
        (p + 1) * (q + 1) * (p + q + 2) / 2
    }

    pub fn is_trivial(&self) -> bool {
        self.0 == 0 && self.1 == 0
    }

    /// Pure labels are `(p,0)` and `(0,p)` (including the trivial class).
    pub fn is_pure(&self) -> bool {
        self.0 == 0 || self.1 == 0
    }

    pub fn is_self_dual(&self) -> bool {
        self.0 == self.1
    }
}

/// A Gelfand-Tsetlin basis index: the weight triple `ν` plus doubled spin `2J`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GTIndex {
    pub nu: [u32; 3],
    #[serde(rename = "twoJ")]
    pub two_j: u32,
}

impl fmt::Debug for GTIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(({},{},{}),{}/2)",
            self.nu[0], self.nu[1], self.nu[2], self.two_j
        )
    }
}

impl GTIndex {
    pub fn new(nu: [u32; 3], two_j: u32) -> Self {
        GTIndex { nu, two_j }
    }

    /// `2t = ν₁ − ν₂`.
    pub fn two_t(&self) -> i64 {
        self.nu[0] as i64 - self.nu[1] as i64
    }

    /// `2u = ν₂ − ν₃`.
    pub fn two_u(&self) -> i64 {
        self.nu[1] as i64 - self.nu[2] as i64
    }

    /// `2v = ν₁ − ν₃`.
    pub fn two_v(&self) -> i64 {
        self.nu[0] as i64 - self.nu[2] as i64
    }

    /// `(−1)^{2(t+u)}`, the phase relating a GT basis to the induced dual basis.
    pub fn dual_phase(&self) -> f64 {
        if self.two_v() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Weight in fundamental-weight coordinates, `(m, n) = (2t, 2u)`.
    pub fn weight(&self) -> WeightPair {
        WeightPair {
            m: self.two_t(),
            n: self.two_u(),
        }
    }

    /// The `(r₊, r₋)` pattern entries for this index within class `label`.
    pub fn pattern(&self, label: IrrepLabel) -> (i64, i64) {
        let sum = label.p() as i64 + 2 * label.q() as i64 - self.nu[0] as i64;
        let r_plus = (sum + self.two_j as i64) / 2;
        let r_minus = (sum - self.two_j as i64) / 2;
        (r_plus, r_minus)
    }

    /// Whether this index satisfies the pattern constraints of class `label`.
    pub fn is_valid_for(&self, label: IrrepLabel) -> bool {
        let (p, q) = (label.p() as i64, label.q() as i64);
        let sum = p + 2 * q - self.nu[0] as i64;
        if (sum - self.two_j as i64) % 2 != 0 {
            return false;
        }
        let (r_plus, r_minus) = self.pattern(label);
        let nu3 = self.nu[2] as i64;
        0 <= r_minus
            && r_minus <= q
            && q <= r_plus
            && r_plus <= p + q
            && r_minus <= nu3
            && nu3 <= r_plus
            && self.nu[1] as i64 == (r_plus + r_minus) - nu3
    }
}

/// A weight written on the fundamental-weight basis, `ω = m ω₁ + n ω₂`
/// (stored doubled relative to the `t, u` eigenvalues: `m = 2t`, `n = 2u`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct WeightPair {
    pub m: i64,
    pub n: i64,
}

impl WeightPair {
    /// Partial order: `self ≥ other` iff the difference is a nonnegative
    /// integer combination of the simple roots `α₁ = (2,−1)`, `α₂ = (−1,2)`.
    pub fn dominates(&self, other: &WeightPair) -> bool {
        let dm = self.m - other.m;
        let dn = self.n - other.n;
        // dм ω-coords = c1 α1 + c2 α2 with α1=(2,-1), α2=(-1,2):
        // dm = 2c1 - c2, dn = -c1 + 2c2 => c1 = (2dm+dn)/3, c2 = (dm+2dn)/3
        let three_c1 = 2 * dm + dn;
        let three_c2 = dm + 2 * dn;
        three_c1 >= 0 && three_c2 >= 0 && three_c1 % 3 == 0 && three_c2 % 3 == 0
    }
}

/// The highest-weight index of `Q(p,q)`: `ν = (p+q, q, 0)`, `J = q/2`.
pub fn highest_weight_index(label: IrrepLabel) -> GTIndex {
    GTIndex::new([label.degree(), label.q(), 0], label.q())
}

/// The lowest-weight index of `Q(p,q)`: `ν = (0, q, p+q)`, `J = p/2`.
pub fn lowest_weight_index(label: IrrepLabel) -> GTIndex {
    GTIndex::new([0, label.q(), label.degree()], label.p())
}

/// All GT indices of `Q(p,q)` in canonical order: descending lexicographic on
/// `ν`, then ascending `J`. The highest weight always sits at position 0.
pub fn enumerate_basis(label: IrrepLabel) -> Vec<GTIndex> {
    let (p, q) = (label.p(), label.q());
    let mut out = Vec::with_capacity(label.dim());
    for r_minus in 0..=q {
        for r_plus in q..=(p + q) {
            for nu3 in r_minus..=r_plus {
                let nu1 = p + 2 * q - (r_plus + r_minus);
                let nu2 = (r_plus + r_minus) - nu3;
                out.push(GTIndex::new([nu1, nu2, nu3], r_plus - r_minus));
            }
        }
    }
    out.sort_by(|a, b| b.nu.cmp(&a.nu).then(a.two_j.cmp(&b.two_j)));
    debug_assert_eq!(out.len(), label.dim());
    out
}

/// The dual index of `idx` (valid for `label.dual()`): `ν̌ᵢ = p+q−νᵢ`, same `J`.
pub fn dual_index(label: IrrepLabel, idx: GTIndex) -> Result<GTIndex, Error> {
    if !idx.is_valid_for(label) {
        return Err(Error::LabelMismatch {
            label,
            index: idx,
        });
    }
    let d = label.degree();
    Ok(GTIndex::new(
        [d - idx.nu[0], d - idx.nu[1], d - idx.nu[2]],
        idx.two_j,
    ))
}

/// O(1) position lookup within the canonical basis ordering of one class.
#[derive(Clone, Debug)]
pub struct BasisIndexer {
    pub label: IrrepLabel,
    pub indices: Vec<GTIndex>,
    map: std::collections::HashMap<GTIndex, usize>,
}

impl BasisIndexer {
    pub fn new(label: IrrepLabel) -> Self {
        let indices = enumerate_basis(label);
        let map = indices.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        BasisIndexer {
            label,
            indices,
            map,
        }
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn position(&self, idx: &GTIndex) -> Option<usize> {
        self.map.get(idx).copied()
    }
}
