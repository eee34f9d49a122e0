// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Small dense complex linear algebra used throughout the crate.
//!
//! Everything here operates on `ndarray::Array2<Complex64>`. The matrices in
//! this crate are tiny (dimension at most a few hundred), so the
//! implementations favor robustness over asymptotics: scaling-and-squaring
//! Padé(13) for the exponential, cyclic Jacobi for Hermitian eigenproblems,
//! Gaussian elimination with partial pivoting for linear solves.

use ndarray::Array2;
use num_complex::Complex64;

pub type CMat = Array2<Complex64>;
pub type CVec = ndarray::Array1<Complex64>;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn eye(n: usize) -> CMat {
    Array2::from_diag_elem(n, ONE)
}

pub fn adjoint(a: &CMat) -> CMat {
    let mut out = a.t().into_owned();
    out.mapv_inplace(|x| x.conj());
    out
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diag().sum()
}

/// Frobenius norm.
pub fn fro_norm(a: &CMat) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry magnitude.
pub fn max_norm(a: &CMat) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Max column sum of absolute values.
pub fn one_norm(a: &CMat) -> f64 {
    let mut max_sum = 0.0f64;
    for j in 0..a.ncols() {
        let col_sum: f64 = a.column(j).iter().map(|x| x.norm()).sum();
        max_sum = max_sum.max(col_sum);
    }
    max_sum
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) - b.dot(a)
}

/// Kronecker product, row-major convention: `(a ⊗ b)[(i1*n2+i2),(j1*m2+j2)] = a[i1,j1] b[i2,j2]`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i1 in 0..ra {
        for j1 in 0..ca {
            let x = a[[i1, j1]];
            if x == ZERO {
                continue;
            }
            for i2 in 0..rb {
                for j2 in 0..cb {
                    out[[i1 * rb + i2, j1 * cb + j2]] = x * b[[i2, j2]];
                }
            }
        }
    }
    out
}

/// Solve `A X = B` by Gaussian elimination with partial pivoting.
pub fn solve(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, b.nrows());
    let m = b.ncols();

    let mut aug = Array2::<Complex64>::zeros((n, n + m));
    aug.slice_mut(ndarray::s![.., ..n]).assign(a);
    aug.slice_mut(ndarray::s![.., n..]).assign(b);

    for col in 0..n {
        let mut max_val = 0.0;
        let mut max_row = col;
        for row in col..n {
            let v = aug[[row, col]].norm();
            if v > max_val {
                max_val = v;
                max_row = row;
            }
        }
        if max_row != col {
            for j in 0..(n + m) {
                let tmp = aug[[col, j]];
                aug[[col, j]] = aug[[max_row, j]];
                aug[[max_row, j]] = tmp;
            }
        }
        let pivot = aug[[col, col]];
        assert!(pivot.norm() > 0.0, "singular matrix in solve");
        for row in (col + 1)..n {
            let factor = aug[[row, col]] / pivot;
            if factor == ZERO {
                continue;
            }
            for j in col..(n + m) {
                let v = aug[[col, j]];
                aug[[row, j]] -= factor * v;
            }
        }
    }

    let mut x = Array2::<Complex64>::zeros((n, m));
    for col in (0..n).rev() {
        let pivot = aug[[col, col]];
        for j in 0..m {
            let mut sum = aug[[col, n + j]];
            for k in (col + 1)..n {
                sum -= aug[[col, k]] * x[[k, j]];
            }
            x[[col, j]] = sum / pivot;
        }
    }
    x
}

// Padé(13) numerator coefficients, Higham (2005) eq. (10.33).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling-and-squaring with Padé(13).
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return Array2::zeros((0, 0));
    }
    if n == 1 {
        let mut r = Array2::zeros((1, 1));
        r[[0, 0]] = a[[0, 0]].exp();
        return r;
    }

    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let a_s = a * re(1.0 / (1u64 << s) as f64);

    let id = eye(n);
    let a2 = a_s.dot(&a_s);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let w1 = &a6 * re(PADE13[13]) + &a4 * re(PADE13[11]) + &a2 * re(PADE13[9]);
    let w2 = w1.dot(&a6)
        + &a6 * re(PADE13[7])
        + &a4 * re(PADE13[5])
        + &a2 * re(PADE13[3])
        + &id * re(PADE13[1]);
    let u = a_s.dot(&w2);

    let v1 = &a6 * re(PADE13[12]) + &a4 * re(PADE13[10]) + &a2 * re(PADE13[8]);
    let v = v1.dot(&a6)
        + &a6 * re(PADE13[6])
        + &a4 * re(PADE13[4])
        + &a2 * re(PADE13[2])
        + &id * re(PADE13[0]);

    let num = &v + &u;
    let den = &v - &u;
    let mut r = solve(&den, &num);
    for _ in 0..s {
        r = r.dot(&r);
    }
    r
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi.
///
/// Returns `(eigenvalues, v)` with eigenvalues ascending and the columns of
/// `v` the matching orthonormal eigenvectors, `a = v diag(λ) v†`.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.clone();
    let mut v = eye(n);
    if n == 0 {
        return (vec![], v);
    }
    let scale = max_norm(a).max(1e-300);
    let tol = 1e-15 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[[p, q]].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = m[[p, q]];
                let gn = g.norm();
                if gn <= tol * 1e-2 {
                    continue;
                }
                // Unitary rotation annihilating m[p,q].
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                let tau = (aqq - app) / (2.0 * gn);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase = g / re(gn);
                let sp = re(s) * phase;

                // m <- J† m J with J[p,p]=c, J[p,q]=s·phase, J[q,p]=-s·conj(phase)... rows/cols update
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = mkp * re(c) - mkq * sp.conj();
                    m[[k, q]] = mkq * re(c) + mkp * sp;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = mpk * re(c) - mqk * sp;
                    m[[q, k]] = mqk * re(c) + mpk * sp.conj();
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = vkp * re(c) - vkq * sp.conj();
                    v[[k, q]] = vkq * re(c) + vkp * sp;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (m[[i, i]].re, i)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vs = Array2::zeros((n, n));
    for (new, &(_, old)) in pairs.iter().enumerate() {
        for k in 0..n {
            vs[[k, new]] = v[[k, old]];
        }
    }
    (eigenvalues, vs)
}

/// Orthonormal basis of the numerical null space of the stacked operator `a`
/// (shape k×n), i.e. vectors `x` with `a x ≈ 0`. Columns of the result span
/// the null space; `rel_tol` is relative to the largest eigenvalue of `a†a`.
pub fn null_space(a: &CMat, rel_tol: f64) -> CMat {
    let n = a.ncols();
    let g = adjoint(a).dot(a);
    let (vals, vecs) = eigh(&g);
    let vmax = vals.last().copied().unwrap_or(0.0).max(0.0);
    let cut = rel_tol * vmax.max(1e-300);
    let idx: Vec<usize> = (0..n).filter(|&i| vals[i] <= cut).collect();
    let mut out = Array2::zeros((n, idx.len()));
    for (j, &i) in idx.iter().enumerate() {
        for k in 0..n {
            out[[k, j]] = vecs[[k, i]];
        }
    }
    out
}
