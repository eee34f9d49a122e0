// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Orbit harmonics, twisted products and integral trikernels.
//!
//! Harmonics are normalized D-function columns attached to stabilizer-fixed
//! vectors; the projective-plane harmonics `Xⁿ` coincide with the `γ = 1`
//! flag-manifold harmonics of the diagonal classes `(n,n)`, so one evaluation
//! path serves both orbits. Twisted products are carried as structure
//! constants over the symbol basis of a correspondence, and the integral
//! trikernel gets two independent evaluation routes (trace form and
//! coefficient expansion) plus Monte-Carlo machinery that checks the double
//! Haar-integral formulation of the product.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;

use crate::correspondence::{
    dual, kernel_from_characteristic, torus_fixed_indices,
    torus_multiplicity, Characteristic, GenericCharacteristic, HarmonicLabel, OperatorKernel,
};
use crate::coupling::{cg_series, cg_table, triangle_ok, CoupledIndex};
use crate::error::{Error, Result};
use crate::group::{irrep_matrix, GroupPoint};
use crate::linalg::{re, CMat};
use crate::rep::{dual_index, BasisIndexer, GTIndex, IrrepLabel};
use crate::wigner::product_coefficients_direct;

/// Which coadjoint orbit a harmonic lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitKind {
    /// The projective plane (pure-quark phase space).
    CP2,
    /// The flag manifold (generic phase space).
    Flag,
}

/// Validate a harmonic label for the given orbit.
pub fn validate_harmonic(kind: OrbitKind, h: &HarmonicLabel) -> Result<()> {
    let class = h.class;
    if kind == OrbitKind::CP2 && (class.p() != class.q() || h.gamma != 1) {
        return Err(Error::InvalidHarmonic(format!(
            "projective harmonics require class (n,n) with γ=1, got {class} γ={}",
            h.gamma
        )));
    }
    if !class.p().abs_diff(class.q()).is_multiple_of(3) {
        return Err(Error::InvalidHarmonic(format!(
            "class {class} has no torus-fixed vectors"
        )));
    }
    if h.gamma == 0 || h.gamma > torus_multiplicity(class) {
        return Err(Error::InvalidHarmonic(format!(
            "γ={} out of range for class {class}",
            h.gamma
        )));
    }
    if !h.idx.is_valid_for(class) {
        return Err(Error::LabelMismatch {
            label: class,
            index: h.idx,
        });
    }
    Ok(())
}

/// Evaluate one harmonic at the orbit point `g·z₀` (or `g·x₀`):
/// `√dim(a,b) · conj D^{(a,b)}_{νJ, ν_a J_γ}(g)`.
pub fn harmonic_value(kind: OrbitKind, h: &HarmonicLabel, g: &GroupPoint) -> Result<Complex64> {
    validate_harmonic(kind, h)?;
    let d = irrep_matrix(h.class, g);
    Ok(harmonic_value_with(h, &d))
}

/// Harmonic evaluation with a precomputed D-matrix of the class.
pub fn harmonic_value_with(h: &HarmonicLabel, d: &CMat) -> Complex64 {
    let basis = BasisIndexer::new(h.class);
    let fixed = torus_fixed_indices(h.class);
    let row = basis.position(&h.idx).expect("validated index");
    let col = basis.position(&fixed[h.gamma - 1]).expect("fixed index");
    d[[row, col]].conj() * re((h.class.dim() as f64).sqrt())
}

/// Pointwise product of two harmonics decomposed over harmonics:
/// coefficients `√(dim a₁ dim a₂ / dim a) · C_{ν₁ν₂ν} · C_{fixed pair}`.
pub fn pointwise_decomposition(
    kind: OrbitKind,
    h1: &HarmonicLabel,
    h2: &HarmonicLabel,
) -> Result<Vec<(HarmonicLabel, f64)>> {
    validate_harmonic(kind, h1)?;
    validate_harmonic(kind, h2)?;
    let table = cg_table(h1.class, h2.class)?;
    let f1 = torus_fixed_indices(h1.class)[h1.gamma - 1];
    let f2 = torus_fixed_indices(h2.class)[h2.gamma - 1];
    let mut out = Vec::new();
    for (class, mult) in cg_series(h1.class, h2.class).entries {
        let fixed = torus_fixed_indices(class);
        if fixed.is_empty() {
            continue;
        }
        let scale = ((h1.class.dim() * h2.class.dim()) as f64 / class.dim() as f64).sqrt();
        let class_basis = BasisIndexer::new(class);
        for sigma in 1..=mult {
            for (gamma_idx, f) in fixed.iter().enumerate() {
                let fixed_cg =
                    table.coefficient(&CoupledIndex::new(class, sigma, *f), &f1, &f2);
                if fixed_cg.abs() < 1e-14 {
                    continue;
                }
                for idx in &class_basis.indices {
                    let cg = table.coefficient(
                        &CoupledIndex::new(class, sigma, *idx),
                        &h1.idx,
                        &h2.idx,
                    );
                    if cg.abs() < 1e-14 {
                        continue;
                    }
                    out.push((
                        HarmonicLabel {
                            class,
                            gamma: gamma_idx + 1,
                            idx: *idx,
                        },
                        scale * fixed_cg * cg,
                    ));
                }
            }
        }
    }
    // merge duplicates (σ-sum)
    let mut merged: std::collections::BTreeMap<HarmonicLabel, f64> = Default::default();
    for (h, v) in out {
        *merged.entry(h).or_insert(0.0) += v;
    }
    Ok(merged.into_iter().filter(|(_, v)| v.abs() > 1e-14).collect())
}

// ---------------------------------------------------------------------------
// Structure constants
// ---------------------------------------------------------------------------

/// The two symbol-basis flavors carried by structure constants.
#[derive(Clone, Debug)]
pub enum BasisFlavor {
    /// Projective harmonics `Xⁿ_{ν,J}` themselves (constants pick up the
    /// `c_n/(c_{n₁}c_{n₂})` ratios).
    PureHarmonic { c: Vec<f64> },
    /// The correspondence's own basis functions `Z𝔠(a)^σ_{ν,J}` (constants
    /// equal the operator-product coefficients, characteristic-free).
    SymbolBasis,
}

/// Twisted-product structure constants over a fixed symbol basis.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    pub label: IrrepLabel,
    pub flavor: BasisFlavor,
    pub basis: Vec<CoupledIndex>,
    index_of: HashMap<CoupledIndex, usize>,
    /// `entries[(i,j)] = [(k, value)]` with `E_i ⋆ E_j = Σ value·E_k`.
    entries: HashMap<(u32, u32), Vec<(u32, f64)>>,
}

/// A function in the symbol space, as coefficients over the basis order of
/// its [`StructureConstants`].
pub type SymbolVector = Vec<Complex64>;

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn position(&self, c: &CoupledIndex) -> Option<usize> {
        self.index_of.get(c).copied()
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.entries
            .get(&(i as u32, j as u32))
            .and_then(|v| v.iter().find(|(kk, _)| *kk == k as u32))
            .map(|(_, v)| *v)
            .unwrap_or(0.0)
    }

    /// The coefficient vector of the constant function 1.
    pub fn unit(&self) -> SymbolVector {
        let mut u = vec![Complex64::new(0.0, 0.0); self.dim()];
        let trivial = CoupledIndex::new(IrrepLabel(0, 0), 1, GTIndex::new([0, 0, 0], 0));
        let pos = self.position(&trivial).expect("trivial basis element");
        u[pos] = match &self.flavor {
            BasisFlavor::PureHarmonic { .. } => re(1.0),
            BasisFlavor::SymbolBasis => re(if self.label.degree().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }),
        };
        u
    }

    /// Twisted product of two coefficient vectors.
    pub fn product(&self, f: &[Complex64], g: &[Complex64]) -> SymbolVector {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (i, fi) in f.iter().enumerate() {
            if fi.norm() == 0.0 {
                continue;
            }
            for (j, gj) in g.iter().enumerate() {
                if gj.norm() == 0.0 {
                    continue;
                }
                if let Some(row) = self.entries.get(&(i as u32, j as u32)) {
                    for &(k, v) in row {
                        out[k as usize] += fi * gj * re(v);
                    }
                }
            }
        }
        out
    }

    /// Star commutator `[f, g]_⋆`.
    pub fn commutator(&self, f: &[Complex64], g: &[Complex64]) -> SymbolVector {
        let fg = self.product(f, g);
        let gf = self.product(g, f);
        fg.iter().zip(&gf).map(|(a, b)| a - b).collect()
    }

    /// Coefficients of the complex conjugate function.
    pub fn conjugate(&self, f: &[Complex64]) -> SymbolVector {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (i, fi) in f.iter().enumerate() {
            if fi.norm() == 0.0 {
                continue;
            }
            let lam = self.basis[i];
            let target_class = match self.flavor {
                BasisFlavor::PureHarmonic { .. } => lam.class,
                BasisFlavor::SymbolBasis => lam.class.dual(),
            };
            let target = CoupledIndex::new(
                target_class,
                lam.sigma,
                dual_index(lam.class, lam.idx).unwrap(),
            );
            let k = self.position(&target).expect("conjugate basis element");
            out[k] += fi.conj() * re(lam.idx.dual_phase());
        }
        out
    }
}

/// Build the structure constants of the twisted product induced by `char`.
/// Pure characteristics yield constants over the projective harmonics,
/// generic ones over the correspondence's symbol basis.
pub fn twisted_constants(char: &Characteristic) -> Result<StructureConstants> {
    char.validate()?;
    let label = char.label();
    let table = cg_table(label, label.dual())?;
    let basis = table.coupled_indices();
    let index_of: HashMap<CoupledIndex, usize> =
        basis.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let dimroot = (label.dim() as f64).sqrt();

    let flavor = match char {
        Characteristic::Pure(p) => BasisFlavor::PureHarmonic {
            c: (0..=p.label.degree() as usize).map(|n| p.number(n)).collect(),
        },
        Characteristic::Generic(_) => BasisFlavor::SymbolBasis,
    };

    let mut entries: HashMap<(u32, u32), Vec<(u32, f64)>> = HashMap::new();
    for (i, l1) in basis.iter().enumerate() {
        for (j, l2) in basis.iter().enumerate() {
            let coeffs = product_coefficients_direct(label, l1, l2)?;
            let mut row = Vec::with_capacity(coeffs.len());
            for (l3, m) in coeffs {
                debug_assert!(triangle_ok(l1.idx.two_j, l2.idx.two_j, l3.idx.two_j));
                let scale = match &flavor {
                    BasisFlavor::PureHarmonic { c } => {
                        let (n1, n2, n3) = (
                            l1.class.p() as usize,
                            l2.class.p() as usize,
                            l3.class.p() as usize,
                        );
                        c[n3] / (c[n1] * c[n2])
                    }
                    BasisFlavor::SymbolBasis => 1.0,
                };
                row.push((index_of[&l3] as u32, dimroot * m * scale));
            }
            if !row.is_empty() {
                entries.insert((i as u32, j as u32), row);
            }
        }
    }
    Ok(StructureConstants {
        label,
        flavor,
        basis,
        index_of,
        entries,
    })
}

/// Express harmonic coefficients on the symbol basis of `char` by the
/// least-norm per-class solve `f = 𝔠̃† h`; the returned residual is the
/// L²-norm of the out-of-space component.
pub fn harmonics_to_basis(
    char: &Characteristic,
    sc: &StructureConstants,
    h: &[(HarmonicLabel, Complex64)],
) -> Result<(SymbolVector, f64)> {
    let generic = char.as_generic();
    let mut out = vec![Complex64::new(0.0, 0.0); sc.dim()];
    let mut residual_sq = 0.0f64;

    // group harmonic coefficients by (class, idx)
    let mut groups: std::collections::BTreeMap<(IrrepLabel, GTIndex), Vec<Complex64>> =
        Default::default();
    for (hl, v) in h {
        let m = torus_multiplicity(hl.class);
        let e = groups
            .entry((hl.class, hl.idx))
            .or_insert_with(|| vec![Complex64::new(0.0, 0.0); m]);
        e[hl.gamma - 1] += v;
    }

    for ((class, idx), hvec) in groups {
        let Some(block) = generic.blocks.get(&class) else {
            // class outside the series: fully out of space
            residual_sq += hvec.iter().map(|x| x.norm_sqr()).sum::<f64>();
            continue;
        };
        // per-basis convention E_λ = Σ_γ c^σ_γ Z: solve 𝔠 f = h in least squares.
        // For the pure flavor the basis is X itself, so f_n = h directly.
        match &sc.flavor {
            BasisFlavor::PureHarmonic { .. } => {
                let lam = CoupledIndex::new(class, 1, idx);
                let pos = sc.position(&lam).ok_or_else(|| {
                    Error::Context("harmonic index outside the coupled basis".into())
                })?;
                out[pos] = hvec[0];
                residual_sq += hvec.iter().skip(1).map(|x| x.norm_sqr()).sum::<f64>();
            }
            BasisFlavor::SymbolBasis => {
                let mult = block.ncols();
                let gram = crate::linalg::adjoint(block).dot(block);
                let mut rhs: CMat = ndarray::Array2::zeros((mult, 1));
                for s in 0..mult {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (g, hv) in hvec.iter().enumerate() {
                        acc += block[[g, s]].conj() * hv;
                    }
                    rhs[[s, 0]] = acc;
                }
                let sol = crate::linalg::solve(&gram, &rhs);
                for sigma in 1..=mult {
                    let lam = CoupledIndex::new(class, sigma, idx);
                    let pos = sc.position(&lam).unwrap();
                    out[pos] = sol[[sigma - 1, 0]];
                }
                // residual of the projection
                for (g, hv) in hvec.iter().enumerate() {
                    let mut fit = Complex64::new(0.0, 0.0);
                    for s in 0..mult {
                        fit += block[[g, s]] * sol[[s, 0]];
                    }
                    residual_sq += (hv - fit).norm_sqr();
                }
            }
        }
    }
    Ok((out, residual_sq.sqrt()))
}

/// Evaluate a symbol-basis coefficient vector at the orbit point `g·z₀`.
pub fn symbol_vector_value(
    char: &Characteristic,
    sc: &StructureConstants,
    f: &[Complex64],
    g: &GroupPoint,
) -> Result<Complex64> {
    let generic = char.as_generic();
    let mut d_cache: HashMap<IrrepLabel, CMat> = HashMap::new();
    let mut out = Complex64::new(0.0, 0.0);
    for (i, fi) in f.iter().enumerate() {
        if fi.norm() == 0.0 {
            continue;
        }
        let lam = sc.basis[i];
        let d = d_cache
            .entry(lam.class)
            .or_insert_with(|| irrep_matrix(lam.class, g));
        match &sc.flavor {
            BasisFlavor::PureHarmonic { .. } => {
                let h = HarmonicLabel {
                    class: lam.class,
                    gamma: 1,
                    idx: lam.idx,
                };
                out += fi * harmonic_value_with(&h, d);
            }
            BasisFlavor::SymbolBasis => {
                let block = &generic.blocks[&lam.class];
                for gamma in 1..=block.nrows() {
                    let c = block[[gamma - 1, lam.sigma - 1]];
                    if c.norm() == 0.0 {
                        continue;
                    }
                    let h = HarmonicLabel {
                        class: lam.class,
                        gamma,
                        idx: lam.idx,
                    };
                    out += fi * c * harmonic_value_with(&h, d);
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Integral trikernels
// ---------------------------------------------------------------------------

/// A correspondence together with the dual used for its integral trikernel.
pub struct TrikernelSpec {
    pub char: Characteristic,
    pub dual_char: Characteristic,
    pub kernel: OperatorKernel,
    pub dual_kernel: OperatorKernel,
}

/// Build a trikernel. The dual is auto-selected only when it is canonical:
/// the unique reciprocal for pure data, the canonical dual for
/// semi-conformal generic data; any other generic characteristic requires an
/// explicit dual.
pub fn trikernel(
    char: &Characteristic,
    explicit_dual: Option<&Characteristic>,
) -> Result<TrikernelSpec> {
    char.validate()?;
    let dual_char = match explicit_dual {
        Some(d) => {
            d.validate()?;
            if d.label() != char.label() {
                return Err(Error::Context("dual lives on a different label".into()));
            }
            d.clone()
        }
        None => match char {
            Characteristic::Pure(_) => dual(char)?.characteristic,
            Characteristic::Generic(g) => {
                if g.semi_conformal_alphas(1e-10).is_some() {
                    dual(char)?.characteristic
                } else {
                    return Err(Error::MustSpecifyDual);
                }
            }
        },
    };
    Ok(TrikernelSpec {
        kernel: kernel_from_characteristic(char)?,
        dual_kernel: kernel_from_characteristic(&dual_char)?,
        char: char.clone(),
        dual_char,
    })
}

impl TrikernelSpec {
    /// Trace route: `dim² · tr(K̃(z₁) K̃(z₂) K(z₃))`.
    pub fn value(&self, g1: &GroupPoint, g2: &GroupPoint, g3: &GroupPoint) -> Complex64 {
        let d = self.char.label().dim() as f64;
        let k1 = self.dual_kernel.conjugated(g1);
        let k2 = self.dual_kernel.conjugated(g2);
        let k3 = self.kernel.conjugated(g3);
        crate::linalg::trace(&k1.dot(&k2).dot(&k3)) * re(d * d)
    }

    /// Coefficient-expansion route (independent of [`Self::value`]):
    /// the product-symbol sum against conjugated basis functions.
    pub fn value_expansion(
        &self,
        g1: &GroupPoint,
        g2: &GroupPoint,
        g3: &GroupPoint,
    ) -> Result<Complex64> {
        let label = self.char.label();
        let table = cg_table(label, label.dual())?;
        let basis = table.coupled_indices();
        let dual_generic = self.dual_char.as_generic();
        let generic = self.char.as_generic();

        // conj(E-dual(λ))(z1), conj(E-dual(λ))(z2) and the third-slot factor
        let eval =
            |gch: &GenericCharacteristic, lam: &CoupledIndex, d: &CMat| -> Complex64 {
                let block = &gch.blocks[&lam.class];
                let mut acc = Complex64::new(0.0, 0.0);
                for gamma in 1..=block.nrows() {
                    let c = block[[gamma - 1, lam.sigma - 1]];
                    if c.norm() == 0.0 {
                        continue;
                    }
                    let h = HarmonicLabel {
                        class: lam.class,
                        gamma,
                        idx: lam.idx,
                    };
                    acc += c * harmonic_value_with(&h, d);
                }
                acc
            };

        let mut d1_cache: HashMap<IrrepLabel, CMat> = HashMap::new();
        let mut d2_cache: HashMap<IrrepLabel, CMat> = HashMap::new();
        let mut d3_cache: HashMap<IrrepLabel, CMat> = HashMap::new();
        let mut e1 = Vec::with_capacity(basis.len());
        let mut e2 = Vec::with_capacity(basis.len());
        let mut f3 = Vec::with_capacity(basis.len());
        for lam in &basis {
            let da = d1_cache
                .entry(lam.class)
                .or_insert_with(|| irrep_matrix(lam.class, g1));
            e1.push(eval(&dual_generic, lam, da).conj());
            let db = d2_cache
                .entry(lam.class)
                .or_insert_with(|| irrep_matrix(lam.class, g2));
            e2.push(eval(&dual_generic, lam, db).conj());
            // third slot: (−1)^{2(t+u)} conj(Z𝔠(λ.class)^{λ.σ}_{dual(λ.idx)})(z3)
            let flipped = CoupledIndex::new(
                lam.class,
                lam.sigma,
                dual_index(lam.class, lam.idx).unwrap(),
            );
            let dc = d3_cache
                .entry(lam.class)
                .or_insert_with(|| irrep_matrix(lam.class, g3));
            f3.push(eval(&generic, &flipped, dc).conj() * re(lam.idx.dual_phase()));
        }

        let dimroot = (label.dim() as f64).sqrt();
        let mut out = Complex64::new(0.0, 0.0);
        for (i, l1) in basis.iter().enumerate() {
            if e1[i].norm() == 0.0 {
                continue;
            }
            for (j, l2) in basis.iter().enumerate() {
                if e2[j].norm() == 0.0 {
                    continue;
                }
                for (mu, m) in product_coefficients_direct(label, l1, l2)? {
                    let k = basis.iter().position(|b| *b == mu).unwrap();
                    out += e1[i] * e2[j] * f3[k] * re(m);
                }
            }
        }
        Ok(out * re(dimroot))
    }

    /// The reproducing-kernel value
    /// `R^W(z₁,z₂) = Σ conj(Z𝔠̃(a)^σ)(z₁) Z𝔠(a)^σ(z₂)`.
    pub fn reproducing_kernel(&self, g1: &GroupPoint, g2: &GroupPoint) -> Result<Complex64> {
        let label = self.char.label();
        let table = cg_table(label, label.dual())?;
        let dual_generic = self.dual_char.as_generic();
        let generic = self.char.as_generic();
        let mut d1_cache: HashMap<IrrepLabel, CMat> = HashMap::new();
        let mut d2_cache: HashMap<IrrepLabel, CMat> = HashMap::new();
        let mut out = Complex64::new(0.0, 0.0);
        for lam in table.coupled_indices() {
            let d1 = d1_cache
                .entry(lam.class)
                .or_insert_with(|| irrep_matrix(lam.class, g1));
            let d2 = d2_cache
                .entry(lam.class)
                .or_insert_with(|| irrep_matrix(lam.class, g2));
            let mut v1 = Complex64::new(0.0, 0.0);
            let mut v2 = Complex64::new(0.0, 0.0);
            let bl_dual = &dual_generic.blocks[&lam.class];
            let bl = &generic.blocks[&lam.class];
            for gamma in 1..=bl.nrows() {
                let h = HarmonicLabel {
                    class: lam.class,
                    gamma,
                    idx: lam.idx,
                };
                v1 += bl_dual[[gamma - 1, lam.sigma - 1]] * harmonic_value_with(&h, d1);
                v2 += bl[[gamma - 1, lam.sigma - 1]] * harmonic_value_with(&h, d2);
            }
            out += v1.conj() * v2;
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Monte-Carlo verification
// ---------------------------------------------------------------------------

/// Outcome of one Monte-Carlo comparison.
#[derive(Clone, Debug, serde::Serialize)]
pub struct McReport {
    pub check: String,
    pub estimate_re: f64,
    pub estimate_im: f64,
    pub target_re: f64,
    pub target_im: f64,
    pub std_error: f64,
    pub samples: usize,
    pub pass: bool,
}

impl McReport {
    fn new(
        check: &str,
        estimate: Complex64,
        target: Complex64,
        std_error: f64,
        samples: usize,
        sigmas: f64,
    ) -> Self {
        let pass = (estimate - target).norm() <= sigmas * std_error.max(1e-14);
        McReport {
            check: check.into(),
            estimate_re: estimate.re,
            estimate_im: estimate.im,
            target_re: target.re,
            target_im: target.im,
            std_error,
            samples,
            pass,
        }
    }
}

/// Monte-Carlo check of the double-integral product formula: the estimate of
/// `∫∫ f₁(z₁) f₂(z₂) 𝕃(z₁,z₂,z) dz₁ dz₂` against the structure-constant
/// product evaluated at `z = g_eval·z₀`. Functions are given as harmonic
/// coefficient vectors; components orthogonal to the symbol space are kept
/// in the integrand (they must annihilate) but dropped from the target.
pub fn verify_integral_product<R: Rng + ?Sized>(
    spec: &TrikernelSpec,
    f1: &[(HarmonicLabel, Complex64)],
    f2: &[(HarmonicLabel, Complex64)],
    g_eval: &GroupPoint,
    samples: usize,
    rng: &mut R,
) -> Result<McReport> {
    let sc = twisted_constants(&spec.char)?;
    let (b1, _r1) = harmonics_to_basis(&spec.char, &sc, f1)?;
    let (b2, _r2) = harmonics_to_basis(&spec.char, &sc, f2)?;
    let product = sc.product(&b1, &b2);
    let target = symbol_vector_value(&spec.char, &sc, &product, g_eval)?;

    let mut mean = Complex64::new(0.0, 0.0);
    let mut m2 = 0.0f64;
    for k in 0..samples {
        let z1 = crate::group::haar_sample(rng);
        let z2 = crate::group::haar_sample(rng);
        let v1 = harmonic_vector_value(f1, &z1)?;
        let v2 = harmonic_vector_value(f2, &z2)?;
        let l = spec.value(&z1, &z2, g_eval);
        let x = v1 * v2 * l;
        // streaming mean/variance
        let delta = x - mean;
        mean += delta / re((k + 1) as f64);
        m2 += (delta.conj() * (x - mean)).re;
    }
    let variance = m2 / (samples as f64 - 1.0);
    let std_error = (variance / samples as f64).sqrt();
    Ok(McReport::new(
        "integral-product",
        mean,
        target,
        std_error,
        samples,
        5.0,
    ))
}

/// Evaluate a harmonic coefficient vector at `g·z₀`.
pub fn harmonic_vector_value(
    f: &[(HarmonicLabel, Complex64)],
    g: &GroupPoint,
) -> Result<Complex64> {
    let mut d_cache: HashMap<IrrepLabel, CMat> = HashMap::new();
    let mut out = Complex64::new(0.0, 0.0);
    for (h, v) in f {
        let d = d_cache
            .entry(h.class)
            .or_insert_with(|| irrep_matrix(h.class, g));
        out += v * harmonic_value_with(h, d);
    }
    Ok(out)
}

/// Monte-Carlo check of the reproducing-kernel marginal
/// `∫ 𝕃(z, z₁, z₂) dz = R^W(z₁, z₂)`.
pub fn verify_reproducing_marginal<R: Rng + ?Sized>(
    spec: &TrikernelSpec,
    g1: &GroupPoint,
    g2: &GroupPoint,
    samples: usize,
    rng: &mut R,
) -> Result<McReport> {
    let target = spec.reproducing_kernel(g1, g2)?;
    let mut mean = Complex64::new(0.0, 0.0);
    let mut m2 = 0.0f64;
    for k in 0..samples {
        let z = crate::group::haar_sample(rng);
        let x = spec.value(&z, g1, g2);
        let delta = x - mean;
        mean += delta / re((k + 1) as f64);
        m2 += (delta.conj() * (x - mean)).re;
    }
    let variance = m2 / (samples as f64 - 1.0);
    let std_error = (variance / samples as f64).sqrt();
    Ok(McReport::new(
        "reproducing-marginal",
        mean,
        target,
        std_error,
        samples,
        5.0,
    ))
}

// ---------------------------------------------------------------------------
// Antipodal reversal
// ---------------------------------------------------------------------------

/// The signed permutation carrying coefficients over the basis of `W` on
/// label `p` to coefficients over the basis of its antipodal `W̌` on `p̌`
/// (the adjoint map in coupled coordinates).
pub fn antipodal_basis_map(label: IrrepLabel) -> Result<Vec<(usize, f64)>> {
    let table = cg_table(label, label.dual())?;
    let dual_table = cg_table(label.dual(), label)?;
    let basis = table.coupled_indices();
    let dual_basis = dual_table.coupled_indices();
    let mut map = Vec::with_capacity(basis.len());
    for lam in &basis {
        let m = table.coupled_operator_matrix(lam)?;
        let star = crate::correspondence::adjoint_map(label, &m)?;
        let coeffs = dual_table.operator_coefficients(&star)?;
        let mut hits: Vec<(usize, f64)> = Vec::new();
        for (mu, v) in coeffs {
            if v.norm() > 1e-9 {
                let pos = dual_basis.iter().position(|b| *b == mu).unwrap();
                hits.push((pos, v.re));
            }
        }
        if hits.len() != 1 || (hits[0].1.abs() - 1.0).abs() > 1e-9 {
            return Err(Error::Context(format!(
                "adjoint of basis element {lam:?} is not a signed basis element"
            )));
        }
        map.push(hits[0]);
    }
    Ok(map)
}

/// Residual of the reverse-dynamics identity `[f₁,f₂]_⋆ = [f₂,f₁]_⋆̌` for a
/// set of coefficient-vector pairs, compared through the antipodal basis
/// map. Returns the max coefficient residual.
pub fn reverse_dynamics_residual(
    char: &Characteristic,
    pairs: &[(SymbolVector, SymbolVector)],
) -> Result<f64> {
    let sc = twisted_constants(char)?;
    let anti = crate::correspondence::antipodal(char)?;
    let sc_anti = twisted_constants(&anti)?;

    match char {
        Characteristic::Pure(_) => {
            // both products act on the same projective harmonics; the basis
            // indices coincide up to the order of the dual table
            let map: Vec<usize> = sc
                .basis
                .iter()
                .map(|lam| sc_anti.position(lam).expect("shared X basis"))
                .collect();
            let mut residual = 0.0f64;
            for (f1, f2) in pairs {
                let lhs = sc.commutator(f1, f2);
                let mut f1m = vec![Complex64::new(0.0, 0.0); sc_anti.dim()];
                let mut f2m = f1m.clone();
                for (i, &k) in map.iter().enumerate() {
                    f1m[k] = f1[i];
                    f2m[k] = f2[i];
                }
                let rhs = sc_anti.commutator(&f2m, &f1m);
                for (i, &k) in map.iter().enumerate() {
                    residual = residual.max((lhs[i] - rhs[k]).norm());
                }
            }
            Ok(residual)
        }
        Characteristic::Generic(_) => {
            let map = antipodal_basis_map(char.label())?;
            let mut residual = 0.0f64;
            for (f1, f2) in pairs {
                let lhs = sc.commutator(f1, f2);
                let push = |f: &[Complex64]| -> SymbolVector {
                    let mut out = vec![Complex64::new(0.0, 0.0); sc_anti.dim()];
                    for (i, x) in f.iter().enumerate() {
                        let (k, s) = map[i];
                        out[k] += x * re(s);
                    }
                    out
                };
                let rhs_anti = sc_anti.commutator(&push(f2), &push(f1));
                // pull the result back through the (involutive) signed map
                for (i, &(k, s)) in map.iter().enumerate() {
                    residual = residual.max((lhs[i] - rhs_anti[k] * re(s)).norm());
                }
            }
            Ok(residual)
        }
    }
}

/// Transport structure constants through the characteristic data of two
/// correspondences on the same label and measure the pullback-intertwining
/// residual (it vanishes: the product is defined through the operators).
pub fn pullback_residual(c1: &Characteristic, c2: &Characteristic) -> Result<f64> {
    let s1 = twisted_constants(c1)?;
    let s2 = twisted_constants(c2)?;
    let mut residual = 0.0f64;
    match (&s1.flavor, &s2.flavor) {
        (BasisFlavor::SymbolBasis, BasisFlavor::SymbolBasis) => {
            // identical coefficients in the respective symbol bases
            for (key, row) in &s1.entries {
                for &(k, v) in row {
                    residual = residual.max((v - s2.constant(key.0 as usize, key.1 as usize, k as usize)).abs());
                }
            }
        }
        (BasisFlavor::PureHarmonic { c: ca }, BasisFlavor::PureHarmonic { c: cb }) => {
            // the pullback map scales X^n by ca_n/cb_n
            for (key, row) in &s1.entries {
                let (i, j) = (key.0 as usize, key.1 as usize);
                let ni = s1.basis[i].class.p() as usize;
                let nj = s1.basis[j].class.p() as usize;
                for &(k, v) in row {
                    let nk = s1.basis[k as usize].class.p() as usize;
                    let transported = s2.constant(i, j, k as usize) * (ca[nk] / cb[nk])
                        / ((ca[ni] / cb[ni]) * (ca[nj] / cb[nj]));
                    residual = residual.max((v - transported).abs());
                }
            }
        }
        _ => return Err(Error::Context("mismatched correspondence flavors".into())),
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::{berezin_pure, random_generic, random_pure};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn x_label(n: u32, idx: GTIndex) -> HarmonicLabel {
        HarmonicLabel {
            class: IrrepLabel(n, n),
            gamma: 1,
            idx,
        }
    }

    #[test]
    fn constant_harmonics() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let g = crate::group::haar_sample(&mut rng);
        let x0 = x_label(0, GTIndex::new([0, 0, 0], 0));
        let v = harmonic_value(OrbitKind::CP2, &x0, &g).unwrap();
        assert!((v - re(1.0)).norm() < 1e-12);
        let z0 = HarmonicLabel {
            class: IrrepLabel(0, 0),
            gamma: 1,
            idx: GTIndex::new([0, 0, 0], 0),
        };
        let v = harmonic_value(OrbitKind::Flag, &z0, &g).unwrap();
        assert!((v - re(1.0)).norm() < 1e-12);
    }

    #[test]
    fn harmonic_label_validation() {
        let bad = HarmonicLabel {
            class: IrrepLabel(1, 0),
            gamma: 1,
            idx: GTIndex::new([1, 0, 0], 0),
        };
        assert!(harmonic_value(OrbitKind::Flag, &bad, &GroupPoint::identity()).is_err());
        let bad_gamma = HarmonicLabel {
            class: IrrepLabel(1, 1),
            gamma: 3,
            idx: GTIndex::new([1, 1, 1], 0),
        };
        assert!(harmonic_value(OrbitKind::Flag, &bad_gamma, &GroupPoint::identity()).is_err());
    }

    #[test]
    fn harmonic_conjugation_relation() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for _ in 0..20 {
            let g = crate::group::haar_sample(&mut rng);
            for class in [IrrepLabel(1, 1), IrrepLabel(3, 0)] {
                for idx in crate::rep::enumerate_basis(class) {
                    for gamma in 1..=torus_multiplicity(class) {
                        let h = HarmonicLabel { class, gamma, idx };
                        let v = harmonic_value(OrbitKind::Flag, &h, &g).unwrap();
                        let hd = HarmonicLabel {
                            class: class.dual(),
                            gamma,
                            idx: dual_index(class, idx).unwrap(),
                        };
                        let vd = harmonic_value(OrbitKind::Flag, &hd, &g).unwrap();
                        assert!(
                            (v.conj() - vd * re(idx.dual_phase())).norm() < 1e-9,
                            "conjugation at {class} {idx:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn pointwise_product_matches_at_samples() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        // X¹·X¹ on the projective plane: support inside 0 ≤ n ≤ 2
        let basis = crate::rep::enumerate_basis(IrrepLabel(1, 1));
        for idx1 in basis.iter().take(4) {
            for idx2 in basis.iter().take(4) {
                let h1 = x_label(1, *idx1);
                let h2 = x_label(1, *idx2);
                let table = pointwise_decomposition(OrbitKind::CP2, &h1, &h2).unwrap();
                for (h, _) in &table {
                    assert!(h.class.p() <= 2 && h.class.p() == h.class.q());
                    assert_eq!(h.gamma, 1);
                }
                for _ in 0..3 {
                    let g = crate::group::haar_sample(&mut rng);
                    let lhs = harmonic_value(OrbitKind::CP2, &h1, &g).unwrap()
                        * harmonic_value(OrbitKind::CP2, &h2, &g).unwrap();
                    let mut rhs = Complex64::new(0.0, 0.0);
                    for (h, c) in &table {
                        rhs += re(*c) * harmonic_value(OrbitKind::CP2, h, &g).unwrap();
                    }
                    assert!((lhs - rhs).norm() < 1e-7, "pointwise {idx1:?}·{idx2:?}");
                }
            }
        }
    }

    #[test]
    fn pointwise_unit_factor() {
        let h0 = x_label(0, GTIndex::new([0, 0, 0], 0));
        let h = x_label(1, GTIndex::new([2, 1, 0], 1));
        let table = pointwise_decomposition(OrbitKind::CP2, &h0, &h).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table[0].0, h);
        assert!((table[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flag_pointwise_product_at_samples() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let class = IrrepLabel(1, 1);
        let idxs = crate::rep::enumerate_basis(class);
        for gamma1 in 1..=2usize {
            for gamma2 in 1..=2usize {
                let h1 = HarmonicLabel {
                    class,
                    gamma: gamma1,
                    idx: idxs[1],
                };
                let h2 = HarmonicLabel {
                    class,
                    gamma: gamma2,
                    idx: idxs[3],
                };
                let table = pointwise_decomposition(OrbitKind::Flag, &h1, &h2).unwrap();
                for _ in 0..3 {
                    let g = crate::group::haar_sample(&mut rng);
                    let lhs = harmonic_value(OrbitKind::Flag, &h1, &g).unwrap()
                        * harmonic_value(OrbitKind::Flag, &h2, &g).unwrap();
                    let mut rhs = Complex64::new(0.0, 0.0);
                    for (h, c) in &table {
                        rhs += re(*c) * harmonic_value(OrbitKind::Flag, h, &g).unwrap();
                    }
                    assert!(
                        (lhs - rhs).norm() < 1e-7,
                        "flag pointwise γ=({gamma1},{gamma2}): {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn unit_is_two_sided_for_twisted_product() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for char in [
            Characteristic::Pure(random_pure(IrrepLabel(1, 0), &mut rng).unwrap()),
            Characteristic::Generic(random_generic(IrrepLabel(1, 1), &mut rng).unwrap()),
        ] {
            let sc = twisted_constants(&char).unwrap();
            let unit = sc.unit();
            for i in 0..sc.dim() {
                let mut f = vec![Complex64::new(0.0, 0.0); sc.dim()];
                f[i] = re(1.0);
                let left = sc.product(&unit, &f);
                let right = sc.product(&f, &unit);
                for k in 0..sc.dim() {
                    assert!((left[k] - f[k]).norm() < 1e-9, "left unit at {i},{k}");
                    assert!((right[k] - f[k]).norm() < 1e-9, "right unit at {i},{k}");
                }
            }
        }
    }

    #[test]
    fn twisted_product_represents_operator_multiplication() {
        // SW characteristic on Q(1,0): constants reproduce operator
        // multiplication after pullback, exhaustively
        let label = IrrepLabel(1, 0);
        let sw = crate::correspondence::symmetric_sw_pure(label).unwrap();
        let char = Characteristic::Pure(sw.clone());
        let sc = twisted_constants(&char).unwrap();
        let table = cg_table(label, label.dual()).unwrap();
        let dimroot = (label.dim() as f64).sqrt();
        for (i, l1) in sc.basis.iter().enumerate() {
            let m1 = table.coupled_operator_matrix(l1).unwrap();
            for (j, l2) in sc.basis.iter().enumerate() {
                let m2 = table.coupled_operator_matrix(l2).unwrap();
                // W(√dim e(λ)) = c_n X; coefficient vectors of the two symbols
                let mut f1 = vec![Complex64::new(0.0, 0.0); sc.dim()];
                f1[i] = re(sw.number(l1.class.p() as usize));
                let mut f2 = vec![Complex64::new(0.0, 0.0); sc.dim()];
                f2[j] = re(sw.number(l2.class.p() as usize));
                let prod = sc.product(&f1, &f2);
                // expected: dim·W(e(λ1)e(λ2))/√dim = √dim Σ m_k c_{nk} X_k
                let coeffs = table.operator_coefficients(&m1.dot(&m2)).unwrap();
                for (k, lk) in sc.basis.iter().enumerate() {
                    let m = coeffs
                        .iter()
                        .find(|(c, _)| c == lk)
                        .map(|(_, v)| *v)
                        .unwrap_or(Complex64::new(0.0, 0.0));
                    let expected = m * re(dimroot * sw.number(lk.class.p() as usize));
                    assert!(
                        (prod[k] - expected).norm() < 1e-9,
                        "constants vs operators at ({i},{j},{k})"
                    );
                }
            }
        }
    }

    #[test]
    fn star_involution_residual() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        for char in [
            Characteristic::Pure(random_pure(IrrepLabel(1, 0), &mut rng).unwrap()),
            Characteristic::Generic(random_generic(IrrepLabel(1, 1), &mut rng).unwrap()),
        ] {
            let sc = twisted_constants(&char).unwrap();
            for _ in 0..5 {
                let f: SymbolVector = (0..sc.dim())
                    .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect();
                let g: SymbolVector = (0..sc.dim())
                    .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect();
                let lhs = sc.conjugate(&sc.product(&f, &g));
                let rhs = sc.product(&sc.conjugate(&g), &sc.conjugate(&f));
                for k in 0..sc.dim() {
                    assert!(
                        (lhs[k] - rhs[k]).norm() < 1e-8,
                        "star involution at {k}: {} vs {}",
                        lhs[k],
                        rhs[k]
                    );
                }
            }
        }
    }

    #[test]
    fn associativity_exhaustive_fundamental() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let char = Characteristic::Pure(random_pure(IrrepLabel(1, 0), &mut rng).unwrap());
        let sc = twisted_constants(&char).unwrap();
        let n = sc.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut fi = vec![Complex64::new(0.0, 0.0); n];
                    fi[i] = re(1.0);
                    let mut fj = vec![Complex64::new(0.0, 0.0); n];
                    fj[j] = re(1.0);
                    let mut fk = vec![Complex64::new(0.0, 0.0); n];
                    fk[k] = re(1.0);
                    let lhs = sc.product(&sc.product(&fi, &fj), &fk);
                    let rhs = sc.product(&fi, &sc.product(&fj, &fk));
                    for x in 0..n {
                        assert!(
                            (lhs[x] - rhs[x]).norm() < 1e-8,
                            "associativity at ({i},{j},{k},{x})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn trikernel_routes_agree_fundamental() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let b = berezin_pure(IrrepLabel(1, 0)).unwrap();
        let spec = trikernel(&Characteristic::Pure(b), None).unwrap();
        for _ in 0..5 {
            let g1 = crate::group::haar_sample(&mut rng);
            let g2 = crate::group::haar_sample(&mut rng);
            let g3 = crate::group::haar_sample(&mut rng);
            let v1 = spec.value(&g1, &g2, &g3);
            let v2 = spec.value_expansion(&g1, &g2, &g3).unwrap();
            assert!((v1 - v2).norm() < 1e-7, "trikernel routes: {v1} vs {v2}");
        }
    }

    #[test]
    fn trikernel_symmetries() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let b = berezin_pure(IrrepLabel(1, 0)).unwrap();
        let char = Characteristic::Pure(b);
        let spec = trikernel(&char, None).unwrap();
        for _ in 0..5 {
            let g = crate::group::haar_sample(&mut rng);
            let g1 = crate::group::haar_sample(&mut rng);
            let g2 = crate::group::haar_sample(&mut rng);
            let g3 = crate::group::haar_sample(&mut rng);
            // invariance
            let a = spec.value(&g1, &g2, &g3);
            let b2 = spec.value(&g.compose(&g1), &g.compose(&g2), &g.compose(&g3));
            assert!((a - b2).norm() < 1e-8, "invariance {a} vs {b2}");
            // conjugation
            let c = spec.value(&g2, &g1, &g3).conj();
            assert!((a - c).norm() < 1e-8, "conjugation {a} vs {c}");
        }
        // antipodal reversal: 𝕃(x1,x2,x3) = 𝕃̌(x2,x1,x3)
        let anti = crate::correspondence::antipodal(&char).unwrap();
        let anti_dual = crate::correspondence::antipodal(&dual(&char).unwrap().characteristic)
            .unwrap();
        let anti_spec = trikernel(&anti, Some(&anti_dual)).unwrap();
        for _ in 0..5 {
            let g1 = crate::group::haar_sample(&mut rng);
            let g2 = crate::group::haar_sample(&mut rng);
            let g3 = crate::group::haar_sample(&mut rng);
            let a = spec.value(&g1, &g2, &g3);
            let b2 = anti_spec.value(&g2, &g1, &g3);
            assert!((a - b2).norm() < 1e-8, "antipodal reversal {a} vs {b2}");
        }
    }

    #[test]
    fn trikernel_requires_dual_when_not_semi_conformal() {
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        // random generic characteristics are essentially never semi-conformal
        let g = random_generic(IrrepLabel(1, 1), &mut rng).unwrap();
        let char = Characteristic::Generic(g);
        match trikernel(&char, None) {
            Err(Error::MustSpecifyDual) => {}
            Err(other) => panic!("expected MustSpecifyDual, got {other:?}"),
            Ok(_) => panic!("expected MustSpecifyDual, got a trikernel"),
        }
        let d = dual(&char).unwrap().characteristic;
        assert!(trikernel(&char, Some(&d)).is_ok());
    }

    #[test]
    fn reverse_dynamics_pure_exhaustive() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let char = Characteristic::Pure(random_pure(IrrepLabel(1, 0), &mut rng).unwrap());
        let sc = twisted_constants(&char).unwrap();
        let n = sc.dim();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let mut f1 = vec![Complex64::new(0.0, 0.0); n];
                f1[i] = re(1.0);
                let mut f2 = vec![Complex64::new(0.0, 0.0); n];
                f2[j] = re(1.0);
                pairs.push((f1, f2));
            }
        }
        let r = reverse_dynamics_residual(&char, &pairs).unwrap();
        assert!(r < 1e-8, "reverse dynamics residual {r:e}");
    }

    #[test]
    fn reverse_dynamics_generic_sampled() {
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let char = Characteristic::Generic(random_generic(IrrepLabel(1, 1), &mut rng).unwrap());
        let sc = twisted_constants(&char).unwrap();
        let n = sc.dim();
        let mut pairs = Vec::new();
        for _ in 0..10 {
            let f1: SymbolVector = (0..n)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let f2: SymbolVector = (0..n)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            pairs.push((f1, f2));
        }
        let r = reverse_dynamics_residual(&char, &pairs).unwrap();
        assert!(r < 1e-8, "reverse dynamics residual {r:e}");
    }

    #[test]
    fn pullback_isomorphism_exact() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let c1 = Characteristic::Pure(random_pure(IrrepLabel(2, 0), &mut rng).unwrap());
        let c2 = Characteristic::Pure(random_pure(IrrepLabel(2, 0), &mut rng).unwrap());
        assert!(pullback_residual(&c1, &c2).unwrap() < 1e-9);
        let g1 = Characteristic::Generic(random_generic(IrrepLabel(1, 1), &mut rng).unwrap());
        let g2 = Characteristic::Generic(random_generic(IrrepLabel(1, 1), &mut rng).unwrap());
        assert!(pullback_residual(&g1, &g2).unwrap() < 1e-12);
    }

    #[test]
    fn orthogonal_top_blocks_yield_orthogonal_images() {
        // two characteristics whose top-class data are orthogonal span
        // orthogonal top-class symbol spaces
        let label = IrrepLabel(1, 0);
        let series = cg_series(label, label.dual());
        let top = IrrepLabel(label.degree(), label.degree());
        let mut blocks1 = std::collections::BTreeMap::new();
        let mut blocks2 = std::collections::BTreeMap::new();
        for (class, mult) in series.entries {
            let rows = torus_multiplicity(class);
            let mut m1: CMat = ndarray::Array2::zeros((rows, mult));
            let mut m2: CMat = ndarray::Array2::zeros((rows, mult));
            if class.is_trivial() {
                let pin = re(if label.degree().is_multiple_of(2) { 1.0 } else { -1.0 });
                m1[[0, 0]] = pin;
                m2[[0, 0]] = pin;
            } else if class == top {
                m1[[0, 0]] = re(1.0);
                m2[[1, 0]] = re(1.0);
            } else {
                m1[[0, 0]] = re(1.0);
                m2[[0, 0]] = re(1.0);
            }
            blocks1.insert(class, m1);
            blocks2.insert(class, m2);
        }
        let c1 = GenericCharacteristic {
            label,
            blocks: blocks1,
        };
        let c2 = GenericCharacteristic {
            label,
            blocks: blocks2,
        };
        c1.validate().unwrap();
        c2.validate().unwrap();
        // harmonic coefficient vectors of top-class basis functions are
        // supported on disjoint γ, hence exactly orthogonal
        let b1 = &c1.blocks[&top];
        let b2 = &c2.blocks[&top];
        let mut dot = Complex64::new(0.0, 0.0);
        for g in 0..torus_multiplicity(top) {
            dot += b1[[g, 0]].conj() * b2[[g, 0]];
        }
        assert!(dot.norm() < 1e-14);
    }

    #[test]
    fn structure_constant_support_is_exact() {
        let mut rng = ChaCha12Rng::seed_from_u64(14);
        let char = Characteristic::Generic(random_generic(IrrepLabel(1, 1), &mut rng).unwrap());
        let sc = twisted_constants(&char).unwrap();
        for (key, row) in &sc.entries {
            let l1 = sc.basis[key.0 as usize];
            let l2 = sc.basis[key.1 as usize];
            for &(k, _v) in row {
                let l3 = sc.basis[k as usize];
                assert_eq!(l3.idx.two_t(), l1.idx.two_t() + l2.idx.two_t());
                assert_eq!(l3.idx.two_u(), l1.idx.two_u() + l2.idx.two_u());
                assert!(triangle_ok(l1.idx.two_j, l2.idx.two_j, l3.idx.two_j));
            }
        }
    }

    #[test]
    fn integral_product_small_mc() {
        // fast smoke test of the Monte-Carlo integral product (the full
        // 2·10⁵-sample run lives in the acceptance suite)
        let mut rng = ChaCha12Rng::seed_from_u64(15);
        let b = berezin_pure(IrrepLabel(1, 0)).unwrap();
        let spec = trikernel(&Characteristic::Pure(b), None).unwrap();
        let unit = vec![(
            HarmonicLabel {
                class: IrrepLabel(0, 0),
                gamma: 1,
                idx: GTIndex::new([0, 0, 0], 0),
            },
            re(1.0),
        )];
        let g_eval = crate::group::haar_sample(&mut rng);
        let rep =
            verify_integral_product(&spec, &unit, &unit, &g_eval, 4000, &mut rng).unwrap();
        assert!(rep.pass, "1·1 = 1 within 5σ: {rep:?}");
        assert!((re(rep.target_re) - re(1.0)).norm() < 1e-9);
    }
}
