// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Shared oracles for the integration suites. Everything here is computed
//! independently of the code paths under test.

use num_complex::Complex64;
use su3kit::linalg::{re, CMat};
use su3kit::rep::{BasisIndexer, GTIndex, IrrepLabel};

/// The symmetric-power embedding of the unit sphere into `Q(p,0)`: the
/// component at the GT index `ν = (j,k,l)` is `√(p!/(j!k!l!)) z₁ʲ z₂ᵏ z₃ˡ`,
/// written on the canonical basis order.
pub fn phi_embedding(p: u32, z: &[Complex64; 3]) -> Vec<Complex64> {
    let label = IrrepLabel(p, 0);
    let basis = BasisIndexer::new(label);
    let mut out = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for (pos, idx) in basis.indices.iter().enumerate() {
        let (j, k, l) = (idx.nu[0], idx.nu[1], idx.nu[2]);
        debug_assert_eq!(j + k + l, p);
        debug_assert_eq!(idx.two_j, k + l);
        out[pos] = re(multinomial_sqrt(p, j, k, l))
            * z[0].powi(j as i32)
            * z[1].powi(k as i32)
            * z[2].powi(l as i32);
    }
    out
}

fn multinomial_sqrt(p: u32, j: u32, k: u32, l: u32) -> f64 {
    let ln = |n: u32| -> f64 { (1..=n as u64).map(|x| (x as f64).ln()).sum() };
    (0.5 * (ln(p) - ln(j) - ln(k) - ln(l))).exp()
}

/// `⟨Φ_p(n) | A Φ_p(n)⟩` for a unit vector `n`, the independent evaluation
/// of the symmetric Berezin symbol of `A` at the orbit point of `n`.
pub fn berezin_oracle(p: u32, a: &CMat, n: &[Complex64; 3]) -> Complex64 {
    let phi = phi_embedding(p, n);
    let d = phi.len();
    let mut out = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            out += phi[i].conj() * a[[i, j]] * phi[j];
        }
    }
    out
}

/// Random Hermitian matrix with entries of unit scale.
pub fn random_hermitian<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let mut a: CMat = ndarray::Array2::zeros((d, d));
    for i in 0..d {
        for j in i..d {
            let x = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            if i == j {
                a[[i, i]] = re(x.re);
            } else {
                a[[i, j]] = x;
                a[[j, i]] = x.conj();
            }
        }
    }
    a
}

/// Random complex matrix.
#[allow(dead_code)]
pub fn random_matrix<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let mut a: CMat = ndarray::Array2::zeros((d, d));
    for x in a.iter_mut() {
        *x = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    }
    a
}

#[allow(dead_code)]
pub fn gt(nu: [u32; 3], two_j: u32) -> GTIndex {
    GTIndex::new(nu, two_j)
}
