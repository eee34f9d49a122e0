// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Group elements, Haar sampling, and Wigner D-matrices.
//!
//! A [`GroupPoint`] is stored as eight real coordinates `θ` on the basis
//! `iλ₁..iλ₈` of the Lie algebra together with its cached fundamental 3×3
//! matrix `exp(Σ θ_k iλ_k)`. The irrep image of a group point in class
//! `Q(p,q)` is `exp(Σ θ_k i F_k)` with `F_k` from
//! [`crate::generators::build_generators`].

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::generators::{build_generators, gell_mann};
use crate::linalg::{adjoint, eigh, expm, max_norm, re, CMat, I, ONE};
use crate::rep::IrrepLabel;

/// A point of SU(3): algebra coordinates plus the cached fundamental matrix.
#[derive(Clone, Debug)]
pub struct GroupPoint {
    pub theta: [f64; 8],
    fundamental: CMat,
}

impl GroupPoint {
    pub fn identity() -> Self {
        GroupPoint {
            theta: [0.0; 8],
            fundamental: crate::linalg::eye(3),
        }
    }

    /// Build from algebra coordinates; the fundamental matrix is computed.
    pub fn from_theta(theta: [f64; 8]) -> Self {
        let lambda = gell_mann();
        let mut h: CMat = Array2::zeros((3, 3));
        for (k, lam) in lambda.iter().enumerate() {
            h = h + lam * re(theta[k]);
        }
        let fundamental = expm(&(h * I));
        GroupPoint { theta, fundamental }
    }

    /// Build from a special unitary 3×3 matrix; coordinates come from the
    /// principal logarithm. Fails (`None`) when an eigenvalue sits on the
    /// branch cut or the spectral split is numerically ambiguous.
    pub fn from_unitary(u: &CMat) -> Option<Self> {
        let theta = principal_log_coords(u)?;
        Some(GroupPoint {
            theta,
            fundamental: u.clone(),
        })
    }

    pub fn fundamental(&self) -> &CMat {
        &self.fundamental
    }

    /// Group product `self · other`, formed in the fundamental and re-logged.
    pub fn compose(&self, other: &GroupPoint) -> GroupPoint {
        let u = self.fundamental.dot(&other.fundamental);
        GroupPoint::from_unitary(&u).unwrap_or_else(|| {
            // nudge off the branch cut with a tiny phase twist, exact in the group
            let eps = GroupPoint::from_theta([1e-7, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
            let u2 = u.dot(eps.fundamental());
            GroupPoint::from_unitary(&u2).expect("perturbed logarithm failed")
        })
    }

    pub fn inverse(&self) -> GroupPoint {
        GroupPoint {
            theta: self.theta.map(|t| -t),
            fundamental: adjoint(&self.fundamental),
        }
    }
}

/// Recover `θ` with `exp(Σ θ_k iλ_k) = u` for special unitary `u`, using the
/// spectral decomposition of the commuting Hermitian pair
/// `(u+u†)/2`, `(u−u†)/2i`. Returns `None` near an eigenphase of ±π or when
/// no generic combination separates the spectrum.
fn principal_log_coords(u: &CMat) -> Option<[f64; 8]> {
    let a = (u + &adjoint(u)) * re(0.5);
    let b = (u - &adjoint(u)) * Complex64::new(0.0, -0.5);
    let mut v_opt: Option<CMat> = None;
    for gamma in [
        0.6180339887498949,
        std::f64::consts::SQRT_2,
        0.3333333333,
        std::f64::consts::E,
    ] {
        let m = &a + &b * re(gamma);
        let (_, v) = eigh(&m);
        let d = adjoint(&v).dot(u).dot(&v);
        let mut off = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    off = off.max(d[[i, j]].norm());
                }
            }
        }
        if off < 1e-10 {
            v_opt = Some(v);
            break;
        }
    }
    let v = v_opt?;
    let d = adjoint(&v).dot(u).dot(&v);
    let mut phases = [0.0f64; 3];
    for i in 0..3 {
        let lam = d[[i, i]];
        phases[i] = lam.im.atan2(lam.re);
        if phases[i].abs() > std::f64::consts::PI - 1e-9 {
            return None; // branch cut
        }
    }
    // det u = 1 forces Σφ ∈ 2πZ; shift one phase to make the sum zero.
    let sum: f64 = phases.iter().sum();
    let wind = (sum / (2.0 * std::f64::consts::PI)).round();
    if wind != 0.0 {
        let (argmax, _) = phases
            .iter()
            .enumerate()
            .max_by(|a, b| (a.1 * wind).partial_cmp(&(b.1 * wind)).unwrap())?;
        phases[argmax] -= wind * 2.0 * std::f64::consts::PI;
    }
    // X = V diag(iφ) V† = Σ θ_k iλ_k, so θ_k = tr(−iX λ_k)/2 = tr(X λ_k)/(2i)
    let mut x: CMat = Array2::zeros((3, 3));
    for i in 0..3 {
        for r in 0..3 {
            for c in 0..3 {
                x[[r, c]] += v[[r, i]] * Complex64::new(0.0, phases[i]) * v[[c, i]].conj();
            }
        }
    }
    let lambda = gell_mann();
    let mut theta = [0.0f64; 8];
    for (k, lam) in lambda.iter().enumerate() {
        let t = crate::linalg::trace(&x.dot(lam)) / Complex64::new(0.0, 2.0);
        theta[k] = t.re;
    }
    Some(theta)
}

/// Draw a Haar-distributed group point: QR of a complex Ginibre matrix with
/// the R-diagonal phases normalized, determinant fixed by a global phase.
/// Logarithm failures trigger a transparent resample.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> GroupPoint {
    loop {
        let mut z: CMat = Array2::zeros((3, 3));
        for i in 0..3 {
            for j in 0..3 {
                let re_part: f64 = rng.sample(StandardNormal);
                let im_part: f64 = rng.sample(StandardNormal);
                z[[i, j]] = Complex64::new(re_part, im_part) / re(2.0f64.sqrt());
            }
        }
        let Some(mut q) = qr_unitary(&z) else {
            continue;
        };
        // det(q) is a unit complex number; divide by its cube root
        let det = det3(&q);
        let phase = Complex64::from_polar(1.0, -det.im.atan2(det.re) / 3.0);
        q.mapv_inplace(|x| x * phase);
        if let Some(g) = GroupPoint::from_unitary(&q) {
            return g;
        }
    }
}

/// Gram-Schmidt QR returning the unitary factor with `R` diagonal made real
/// positive (the map that makes QR of Ginibre exactly Haar on U(3)).
fn qr_unitary(a: &CMat) -> Option<CMat> {
    let n = a.nrows();
    let mut q: CMat = a.clone();
    for j in 0..n {
        for k in 0..j {
            let mut proj = Complex64::new(0.0, 0.0);
            for i in 0..n {
                proj += q[[i, k]].conj() * q[[i, j]];
            }
            for i in 0..n {
                let qik = q[[i, k]];
                q[[i, j]] -= proj * qik;
            }
        }
        let norm: f64 = (0..n).map(|i| q[[i, j]].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return None;
        }
        for i in 0..n {
            q[[i, j]] /= re(norm);
        }
    }
    Some(q)
}

fn det3(m: &CMat) -> Complex64 {
    m[[0, 0]] * (m[[1, 1]] * m[[2, 2]] - m[[1, 2]] * m[[2, 1]])
        - m[[0, 1]] * (m[[1, 0]] * m[[2, 2]] - m[[1, 2]] * m[[2, 0]])
        + m[[0, 2]] * (m[[1, 0]] * m[[2, 1]] - m[[1, 1]] * m[[2, 0]])
}

/// The irrep image `exp(Σ θ_k i F_k)` of `g` in class `label`. Its `(νJ, μL)`
/// entry in canonical basis order is the Wigner D-function value
/// `D^{p}_{νJ,μL}(g)`.
pub fn irrep_matrix(label: IrrepLabel, g: &GroupPoint) -> CMat {
    if label == IrrepLabel(1, 0) {
        return g.fundamental().clone();
    }
    let gens = build_generators(label);
    let f = gens.f_matrices();
    let n = gens.dim();
    // θ are coordinates on iλ_k and F_k is the image of λ_k/2, so the
    // algebra element carried to this representation is Σ θ_k i (2 F_k).
    let mut h: CMat = Array2::zeros((n, n));
    for (k, fk) in f.iter().enumerate() {
        if g.theta[k] != 0.0 {
            h = h + fk * re(2.0 * g.theta[k]);
        }
    }
    expm(&(h * I))
}

/// Unitarity defect `‖ρρ† − 1‖∞` of a candidate representation matrix.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    max_norm(&(m.dot(&adjoint(m)) - crate::linalg::eye(n)))
}

/// Determinant defect `|det U − 1|` of a fundamental matrix.
pub fn det_defect(g: &GroupPoint) -> f64 {
    (det3(g.fundamental()) - ONE).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::GTIndex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn identity_gives_identity_matrix() {
        let g = GroupPoint::identity();
        let d = irrep_matrix(IrrepLabel(1, 1), &g);
        assert!(max_norm(&(d - crate::linalg::eye(8))) < 1e-14);
    }

    #[test]
    fn fundamental_rep_is_the_point_itself() {
        let g = GroupPoint::from_theta([0.3, -0.7, 0.1, 0.9, -0.2, 0.4, 0.05, -0.6]);
        let d = irrep_matrix(IrrepLabel(1, 0), &g);
        assert!(max_norm(&(d - g.fundamental())) < 1e-13);
    }

    #[test]
    fn haar_samples_are_special_unitary() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..200 {
            let g = haar_sample(&mut rng);
            assert!(det_defect(&g) < 1e-12);
            assert!(unitarity_defect(g.fundamental()) < 1e-12);
            // round trip: theta reproduces the fundamental
            let rebuilt = GroupPoint::from_theta(g.theta);
            assert!(max_norm(&(rebuilt.fundamental() - g.fundamental())) < 1e-11);
        }
    }

    #[test]
    fn haar_first_moments() {
        let mut rng = ChaCha12Rng::seed_from_u64(20240811);
        let n = 100_000usize;
        let mut sum_u11 = Complex64::new(0.0, 0.0);
        let mut sum_abs2 = 0.0f64;
        let mut sum_abs4 = 0.0f64;
        for _ in 0..n {
            let g = haar_sample(&mut rng);
            let u11 = g.fundamental()[[0, 0]];
            sum_u11 += u11;
            sum_abs2 += u11.norm_sqr();
            sum_abs4 += u11.norm_sqr() * u11.norm_sqr();
        }
        let mean_abs2 = sum_abs2 / n as f64;
        let var_abs2 = sum_abs4 / n as f64 - mean_abs2 * mean_abs2;
        let sigma_abs2 = (var_abs2 / n as f64).sqrt();
        assert!(
            (mean_abs2 - 1.0 / 3.0).abs() < 3.0 * sigma_abs2,
            "E|U11|^2 = {mean_abs2}, σ = {sigma_abs2}"
        );
        let mean_u11 = sum_u11 / re(n as f64);
        let sigma_u11 = (mean_abs2 / n as f64).sqrt();
        assert!(mean_u11.norm() < 3.0 * sigma_u11, "E U11 = {mean_u11}");
    }

    #[test]
    fn irrep_matrices_are_unitary_and_homomorphic() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for label in [IrrepLabel(1, 1), IrrepLabel(2, 0), IrrepLabel(2, 1)] {
            for _ in 0..5 {
                let g = haar_sample(&mut rng);
                let h = haar_sample(&mut rng);
                let dg = irrep_matrix(label, &g);
                assert!(unitarity_defect(&dg) < 1e-11);
                let dh = irrep_matrix(label, &h);
                let dgh = irrep_matrix(label, &g.compose(&h));
                assert!(
                    max_norm(&(dg.dot(&dh) - dgh)) < 1e-8,
                    "homomorphism defect on {label:?}"
                );
            }
        }
    }

    #[test]
    fn d_function_conjugation_symmetry() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let label = IrrepLabel(2, 1);
        let dual = label.dual();
        let basis = crate::rep::BasisIndexer::new(label);
        let dual_basis = crate::rep::BasisIndexer::new(dual);
        for _ in 0..10 {
            let g = haar_sample(&mut rng);
            let d = irrep_matrix(label, &g);
            let dd = irrep_matrix(dual, &g);
            for (r, nu) in basis.indices.iter().enumerate() {
                for (c, mu) in basis.indices.iter().enumerate() {
                    let nudual = crate::rep::dual_index(label, *nu).unwrap();
                    let mudual = crate::rep::dual_index(label, *mu).unwrap();
                    let rr = dual_basis.position(&nudual).unwrap();
                    let cc = dual_basis.position(&mudual).unwrap();
                    let phase = nu.dual_phase() * mu.dual_phase();
                    let lhs = d[[r, c]].conj();
                    let rhs = dd[[rr, cc]] * re(phase);
                    assert!(
                        (lhs - rhs).norm() < 1e-9,
                        "conjugation symmetry at {nu:?},{mu:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn compose_and_inverse() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let g = haar_sample(&mut rng);
        let e = g.compose(&g.inverse());
        assert!(max_norm(&(e.fundamental() - crate::linalg::eye(3))) < 1e-12);
    }

    #[test]
    fn step_actions_visible_in_d_matrix_support() {
        // D-matrix of the fundamental at a T-direction rotation mixes only
        // the first two canonical basis vectors.
        let g = GroupPoint::from_theta([0.4, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let d = irrep_matrix(IrrepLabel(1, 0), &g);
        let b = crate::rep::BasisIndexer::new(IrrepLabel(1, 0));
        let e3 = b.position(&GTIndex::new([0, 0, 1], 1)).unwrap();
        assert!((d[[e3, e3]] - ONE).norm() < 1e-12);
    }
}
