// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Symbol correspondences for quark systems.
//!
//! A correspondence maps operators on `Q(p,q)` equivariantly to functions on
//! a coadjoint orbit. It is parameterized per class `(a,b)` of
//! `Q(p)⊗Q(p̌)` by a full-rank complex matrix of shape
//! `m(a)×𝔪(p;a)` (the characteristic matrix); for pure labels `(p,0)`/`(0,p)`
//! everything collapses to one nonzero real number per level `n`
//! (characteristic numbers). Internally the pure case is stored in its
//! embedded generic form, `c¹_γ(n,n) = c_n δ_{γ,1}`, so a single code path
//! serves both.

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;

use crate::coupling::{cg_series, cg_table, CoupledIndex};
use crate::error::{Error, Result};
use crate::generators::build_generators;
use crate::group::{irrep_matrix, GroupPoint};
use crate::linalg::{adjoint, commutator, eigh, max_norm, re, trace, CMat};
use crate::rep::{BasisIndexer, GTIndex, IrrepLabel};

/// Stabilizer subgroups of the two orbit base points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stabilizer {
    /// `U(2)`-type subgroup fixing the projective base point.
    H,
    /// The maximal torus fixing the flag-manifold base point.
    T,
}

/// GT indices of vectors in `Q(label)` fixed by the given stabilizer.
pub fn invariant_vectors(label: IrrepLabel, subgroup: Stabilizer) -> Vec<GTIndex> {
    match subgroup {
        Stabilizer::H => {
            if label.p() == label.q() {
                vec![GTIndex::new([label.p(), label.p(), label.p()], 0)]
            } else {
                vec![]
            }
        }
        Stabilizer::T => torus_fixed_indices(label),
    }
}

/// `m(a,b) = min(a,b)+1`, the torus-fixed multiplicity of a class.
pub fn torus_multiplicity(class: IrrepLabel) -> usize {
    class.p().min(class.q()) as usize + 1
}

/// The torus-fixed GT indices `(ν_{(a,b)}, J_γ)`, empty unless `a ≡ b (mod 3)`.
pub fn torus_fixed_indices(class: IrrepLabel) -> Vec<GTIndex> {
    let (a, b) = (class.p(), class.q());
    if !a.abs_diff(b).is_multiple_of(3) {
        return vec![];
    }
    if class.is_trivial() {
        return vec![GTIndex::new([0, 0, 0], 0)];
    }
    let x = (a + 2 * b) / 3;
    let k = a.abs_diff(b) / 3;
    (1..=torus_multiplicity(class) as u32)
        .map(|gamma| GTIndex::new([x, x, x], 2 * (gamma - 1 + k)))
        .collect()
}

// ---------------------------------------------------------------------------
// Characteristics
// ---------------------------------------------------------------------------

/// Characteristic numbers of a pure-quark correspondence: `c_n ≠ 0` for
/// `1 ≤ n ≤ p`, with `c₀ = (−1)^p` implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct PureCharacteristic {
    pub label: IrrepLabel,
    pub c: Vec<f64>,
}

impl PureCharacteristic {
    pub fn new(label: IrrepLabel, c: Vec<f64>) -> Result<Self> {
        if !label.is_pure() || label.is_trivial() {
            return Err(Error::InvalidCharacteristic(format!(
                "{label} is not a nontrivial pure label"
            )));
        }
        if c.len() != label.degree() as usize {
            return Err(Error::InvalidCharacteristic(format!(
                "expected {} numbers, got {}",
                label.degree(),
                c.len()
            )));
        }
        if c.iter().any(|x| x.abs() < 1e-300 || !x.is_finite()) {
            return Err(Error::InvalidCharacteristic(
                "characteristic numbers must be nonzero".into(),
            ));
        }
        Ok(PureCharacteristic { label, c })
    }

    /// `c_n` with the implicit `c₀ = (−1)^p`.
    pub fn number(&self, n: usize) -> f64 {
        if n == 0 {
            if self.label.degree().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        } else {
            self.c[n - 1]
        }
    }

    /// Embed as a generic characteristic, `c¹_γ(n,n) = c_n δ_{γ,1}`.
    pub fn to_generic(&self) -> GenericCharacteristic {
        let mut blocks = BTreeMap::new();
        for (class, mult) in cg_series(self.label, self.label.dual()).entries {
            debug_assert_eq!(mult, 1);
            debug_assert_eq!(class.p(), class.q());
            let n = class.p() as usize;
            let mut m: CMat = Array2::zeros((torus_multiplicity(class), 1));
            m[[0, 0]] = re(self.number(n));
            blocks.insert(class, m);
        }
        GenericCharacteristic {
            label: self.label,
            blocks,
        }
    }
}

/// Characteristic matrices of a generic correspondence: per class `(a,b)` in
/// the series of `Q(p)⊗Q(p̌)` one full-rank matrix of shape `m(a)×𝔪(p;a)`.
#[derive(Clone, Debug)]
pub struct GenericCharacteristic {
    pub label: IrrepLabel,
    pub blocks: BTreeMap<IrrepLabel, CMat>,
}

impl GenericCharacteristic {
    /// Validate shapes, the conjugation pairing, the trivial-class pin and
    /// full rank of every block.
    pub fn validate(&self) -> Result<()> {
        let series = cg_series(self.label, self.label.dual());
        if self.blocks.len() != series.entries.len() {
            return Err(Error::InvalidCharacteristic(format!(
                "expected {} classes, got {}",
                series.entries.len(),
                self.blocks.len()
            )));
        }
        for (class, mult) in &series.entries {
            let m = self
                .blocks
                .get(class)
                .ok_or_else(|| Error::InvalidCharacteristic(format!("missing class {class}")))?;
            let rows = torus_multiplicity(*class);
            if m.nrows() != rows || m.ncols() != *mult {
                return Err(Error::InvalidCharacteristic(format!(
                    "class {class}: expected {rows}x{mult}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let dual = self.blocks.get(&class.dual()).ok_or_else(|| {
                Error::InvalidCharacteristic(format!("missing dual class of {class}"))
            })?;
            let conj_residual = m
                .indexed_iter()
                .map(|((i, j), x)| (x.conj() - dual[[i, j]]).norm())
                .fold(0.0, f64::max);
            if conj_residual > 1e-10 {
                return Err(Error::InvalidCharacteristic(format!(
                    "conj(C({class})) != C(dual), residual {conj_residual:e}"
                )));
            }
            if smallest_singular_ratio(m) < 1e-10 {
                return Err(Error::InvalidCharacteristic(format!(
                    "class {class}: characteristic matrix is rank deficient"
                )));
            }
        }
        let trivial = &self.blocks[&IrrepLabel(0, 0)];
        let pin = re(if self.label.degree().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        });
        if (trivial[[0, 0]] - pin).norm() > 1e-10 {
            return Err(Error::InvalidCharacteristic(
                "trivial-class entry must be (−1)^{|p|}".into(),
            ));
        }
        Ok(())
    }

    /// Thin pure facade: succeeds when the label is pure and every block has
    /// support only on its first row.
    pub fn to_pure(&self) -> Result<PureCharacteristic> {
        if !self.label.is_pure() {
            return Err(Error::InvalidCharacteristic(format!(
                "{} is not a pure label",
                self.label
            )));
        }
        let p = self.label.degree() as usize;
        let mut c = vec![0.0; p];
        for (class, m) in &self.blocks {
            let n = class.p() as usize;
            for ((i, _), x) in m.indexed_iter() {
                if i > 0 && x.norm() > 1e-10 {
                    return Err(Error::InvalidCharacteristic(format!(
                        "class {class} has support beyond γ=1; not a pure correspondence"
                    )));
                }
            }
            if m[[0, 0]].im.abs() > 1e-10 {
                return Err(Error::InvalidCharacteristic(
                    "pure characteristic numbers must be real".into(),
                ));
            }
            if n > 0 {
                c[n - 1] = m[[0, 0]].re;
            }
        }
        PureCharacteristic::new(self.label, c)
    }

    /// `α(a)` map when every block is semi-conformal (`C†C = α·1`), else `None`.
    pub fn semi_conformal_alphas(&self, tol: f64) -> Option<BTreeMap<IrrepLabel, f64>> {
        let mut out = BTreeMap::new();
        for (class, m) in &self.blocks {
            let g = adjoint(m).dot(m);
            let k = g.nrows();
            let alpha = trace(&g).re / k as f64;
            let residual = max_norm(&(&g - &(crate::linalg::eye(k) * re(alpha))));
            if residual > tol * alpha.abs().max(1.0) || alpha <= 0.0 {
                return None;
            }
            out.insert(*class, alpha);
        }
        // α(ǎ) = α(a) follows from the conjugation pairing; the trivial
        // normalization α(0,0)=1 is enforced by validate()
        Some(out)
    }
}

/// Either flavor of characteristic data.
#[derive(Clone, Debug)]
pub enum Characteristic {
    Pure(PureCharacteristic),
    Generic(GenericCharacteristic),
}

impl Characteristic {
    pub fn label(&self) -> IrrepLabel {
        match self {
            Characteristic::Pure(c) => c.label,
            Characteristic::Generic(c) => c.label,
        }
    }

    pub fn as_generic(&self) -> GenericCharacteristic {
        match self {
            Characteristic::Pure(c) => c.to_generic(),
            Characteristic::Generic(c) => c.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.as_generic().validate()
    }
}

fn smallest_singular_ratio(m: &CMat) -> f64 {
    let g = adjoint(m).dot(m);
    let (vals, _) = eigh(&g);
    let hi = vals.last().copied().unwrap_or(0.0);
    if hi <= 0.0 {
        return 0.0;
    }
    (vals[0].max(0.0) / hi).sqrt()
}

// ---------------------------------------------------------------------------
// Operator kernels
// ---------------------------------------------------------------------------

/// A stabilizer-invariant Hermitian unit-trace operator realizing a
/// correspondence by `W_A(g·x₀) = tr(A K^g)`.
#[derive(Clone, Debug)]
pub struct OperatorKernel {
    pub label: IrrepLabel,
    pub matrix: CMat,
}

impl OperatorKernel {
    pub fn hermiticity_defect(&self) -> f64 {
        max_norm(&(&self.matrix - &adjoint(&self.matrix)))
    }

    pub fn trace_defect(&self) -> f64 {
        (trace(&self.matrix) - re(1.0)).norm()
    }

    /// Max commutator norm with the realized generators of the stabilizer.
    pub fn invariance_defect(&self, subgroup: Stabilizer) -> f64 {
        let g = build_generators(self.label);
        let mut gens: Vec<&CMat> = vec![&g.t3, &g.y];
        if subgroup == Stabilizer::H {
            gens.push(&g.u_plus);
            gens.push(&g.u_minus);
            gens.push(&g.u3);
        }
        gens.iter()
            .map(|m| max_norm(&commutator(&self.matrix, m)))
            .fold(0.0, f64::max)
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        let (vals, _) = eigh(&self.matrix);
        vals[0]
    }

    /// Conjugated kernel `K^g = ρ(g) K ρ(g)⁻¹`.
    pub fn conjugated(&self, g: &GroupPoint) -> CMat {
        let d = irrep_matrix(self.label, g);
        d.dot(&self.matrix).dot(&adjoint(&d))
    }
}

/// Build the operator kernel of a characteristic:
/// `K = Σ_{(a;σ),γ} conj(c^σ_γ(a)) √(dim a / dim p) e((a;σ); ν_a, J_γ)`.
pub fn kernel_from_characteristic(char: &Characteristic) -> Result<OperatorKernel> {
    let generic = char.as_generic();
    generic.validate()?;
    let label = generic.label;
    let table = cg_table(label, label.dual())?;
    let d = label.dim();
    let mut k: CMat = Array2::zeros((d, d));
    for (class, block) in &generic.blocks {
        let fixed = torus_fixed_indices(*class);
        let scale = ((class.dim() as f64) / (d as f64)).sqrt();
        for (gamma_idx, idx) in fixed.iter().enumerate() {
            for sigma in 1..=block.ncols() {
                let c = block[[gamma_idx, sigma - 1]];
                if c.norm() == 0.0 {
                    continue;
                }
                let e = table.coupled_operator_matrix(&CoupledIndex::new(*class, sigma, *idx))?;
                k = k + e * (c.conj() * re(scale));
            }
        }
    }
    let kernel = OperatorKernel { label, matrix: k };
    debug_assert!(kernel.hermiticity_defect() < 1e-10);
    debug_assert!(kernel.trace_defect() < 1e-10);
    Ok(kernel)
}

/// Extraction mode for [`characteristic_from_kernel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMode {
    Pure,
    Generic,
}

/// Recover the characteristic data from a kernel matrix; rejects
/// non-invariant kernels and degenerate characteristics.
pub fn characteristic_from_kernel(
    label: IrrepLabel,
    k: &CMat,
    mode: KernelMode,
) -> Result<Characteristic> {
    let d = label.dim();
    if k.nrows() != d || k.ncols() != d {
        return Err(Error::SizeMismatch {
            expected: d,
            got: k.nrows(),
        });
    }
    let probe = OperatorKernel {
        label,
        matrix: k.clone(),
    };
    if probe.hermiticity_defect() > 1e-9 {
        return Err(Error::NotACorrespondence("kernel is not Hermitian".into()));
    }
    if probe.trace_defect() > 1e-9 {
        return Err(Error::NotACorrespondence("kernel trace is not 1".into()));
    }
    let subgroup = if mode == KernelMode::Pure {
        Stabilizer::H
    } else {
        Stabilizer::T
    };
    let inv = probe.invariance_defect(subgroup);
    if inv > 1e-9 * max_norm(k).max(1.0) {
        return Err(Error::NotInvariant { residual: inv });
    }

    let table = cg_table(label, label.dual())?;
    let coeffs = table.operator_coefficients(k)?;
    let mut blocks: BTreeMap<IrrepLabel, CMat> = BTreeMap::new();
    for (class, mult) in cg_series(label, label.dual()).entries {
        blocks.insert(class, Array2::zeros((torus_multiplicity(class), mult)));
    }
    for (c, v) in coeffs {
        if v.norm() <= 1e-12 {
            continue;
        }
        let fixed = torus_fixed_indices(c.class);
        let Some(gamma_idx) = fixed.iter().position(|i| *i == c.idx) else {
            return Err(Error::NotInvariant { residual: v.norm() });
        };
        let scale = ((label.dim() as f64) / (c.class.dim() as f64)).sqrt();
        blocks.get_mut(&c.class).unwrap()[[gamma_idx, c.sigma - 1]] = v.conj() * re(scale);
    }
    let generic = GenericCharacteristic { label, blocks };
    generic.validate().map_err(|e| match e {
        Error::InvalidCharacteristic(msg) => Error::NotACorrespondence(msg),
        other => other,
    })?;
    match mode {
        KernelMode::Pure => Ok(Characteristic::Pure(generic.to_pure().map_err(
            |e| match e {
                Error::InvalidCharacteristic(msg) => Error::NotACorrespondence(msg),
                other => other,
            },
        )?)),
        KernelMode::Generic => Ok(Characteristic::Generic(generic)),
    }
}

// ---------------------------------------------------------------------------
// Named correspondences
// ---------------------------------------------------------------------------

/// Which extreme-weight projector seeds a Berezin correspondence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BerezinKind {
    Highest,
    Lowest,
}

/// Characteristic matrices of the highest/lowest Berezin correspondence,
/// extracted from the CG entries at the extreme-weight pair.
pub fn berezin_generic(label: IrrepLabel, which: BerezinKind) -> Result<GenericCharacteristic> {
    if label.is_trivial() {
        return Err(Error::InvalidCharacteristic(
            "trivial label has no correspondences".into(),
        ));
    }
    let table = cg_table(label, label.dual())?;
    let sign = if label.degree().is_multiple_of(2) { 1.0 } else { -1.0 };
    let (idx, dual_idx) = match which {
        BerezinKind::Highest => {
            let h = crate::rep::highest_weight_index(label);
            (h, crate::rep::dual_index(label, h)?)
        }
        BerezinKind::Lowest => {
            let l = crate::rep::lowest_weight_index(label);
            (l, crate::rep::dual_index(label, l)?)
        }
    };
    let mut blocks = BTreeMap::new();
    for (class, mult) in cg_series(label, label.dual()).entries {
        let fixed = torus_fixed_indices(class);
        let scale = ((label.dim() as f64) / (class.dim() as f64)).sqrt();
        let mut m: CMat = Array2::zeros((fixed.len(), mult));
        for (gamma_idx, f) in fixed.iter().enumerate() {
            for sigma in 1..=mult {
                let cg = table.coefficient(&CoupledIndex::new(class, sigma, *f), &idx, &dual_idx);
                m[[gamma_idx, sigma - 1]] = re(sign * scale * cg);
            }
        }
        if smallest_singular_ratio(&m) < 1e-10 {
            return Err(Error::InvalidCharacteristic(format!(
                "Berezin block {class} is rank deficient"
            )));
        }
        blocks.insert(class, m);
    }
    Ok(GenericCharacteristic { label, blocks })
}

/// Characteristic numbers of the symmetric Berezin correspondence of a pure
/// label (highest projector for `(p,0)`, lowest for `(0,p)`).
pub fn berezin_pure(label: IrrepLabel) -> Result<PureCharacteristic> {
    if !label.is_pure() || label.is_trivial() {
        return Err(Error::InvalidCharacteristic(format!(
            "{label} is not a nontrivial pure label"
        )));
    }
    let which = if label.q() == 0 {
        BerezinKind::Highest
    } else {
        BerezinKind::Lowest
    };
    berezin_generic(label, which)?.to_pure()
}

/// The symmetric Stratonovich-Weyl numbers `c_n = b_n/|b_n|`.
pub fn symmetric_sw_pure(label: IrrepLabel) -> Result<PureCharacteristic> {
    let b = berezin_pure(label)?;
    let c = b.c.iter().map(|x| x.signum()).collect();
    PureCharacteristic::new(label, c)
}

// ---------------------------------------------------------------------------
// Dual, antipodal, classification, moduli
// ---------------------------------------------------------------------------

/// The canonical dual characteristic. For pure data the dual is the unique
/// reciprocal; for generic data it is the least-norm solution
/// `C̃ = C (C†C)⁻¹` of `C̃†C = 1`, and `unique` records whether the solution
/// set is a point (`𝔪 = m(a)` everywhere) or an affine family.
#[derive(Clone, Debug)]
pub struct DualCharacteristic {
    pub characteristic: Characteristic,
    pub unique: bool,
}

pub fn dual(char: &Characteristic) -> Result<DualCharacteristic> {
    match char {
        Characteristic::Pure(p) => {
            let c = p.c.iter().map(|x| 1.0 / x).collect();
            Ok(DualCharacteristic {
                characteristic: Characteristic::Pure(PureCharacteristic::new(p.label, c)?),
                unique: true,
            })
        }
        Characteristic::Generic(g) => {
            g.validate()?;
            let mut unique = true;
            let mut blocks = BTreeMap::new();
            for (class, m) in &g.blocks {
                if m.nrows() != m.ncols() {
                    unique = false;
                }
                let gram = adjoint(m).dot(m);
                let inv = crate::linalg::solve(&gram, &crate::linalg::eye(gram.nrows()));
                blocks.insert(*class, m.dot(&inv));
            }
            Ok(DualCharacteristic {
                characteristic: Characteristic::Generic(GenericCharacteristic {
                    label: g.label,
                    blocks,
                }),
                unique,
            })
        }
    }
}

/// The antipodal characteristic, defined on the dual system label through
/// the defining property `W̌_{A*} = W_A`: the antipodal kernel is the
/// adjoint-map image of the kernel. Pure numbers carry over unchanged;
/// generic blocks pick up `(−1)^{|a|}` and the σ-reversal (possibly with the
/// per-block signs of the phase convention). Involutive.
pub fn antipodal(char: &Characteristic) -> Result<Characteristic> {
    let label = char.label();
    let kernel = kernel_from_characteristic(char)?;
    let star = adjoint_map(label, &kernel.matrix)?;
    let mode = match char {
        Characteristic::Pure(_) => KernelMode::Pure,
        Characteristic::Generic(_) => KernelMode::Generic,
    };
    characteristic_from_kernel(label.dual(), &star, mode)
}

/// Classification flags of one correspondence.
#[derive(Clone, Debug)]
pub struct ClassifyReport {
    pub is_stratonovich_weyl: bool,
    /// `α(a)` per class when the characteristic is semi-conformal.
    pub semi_conformal: Option<BTreeMap<IrrepLabel, f64>>,
    pub is_mapping_positive: bool,
    pub is_positive_dual: bool,
    pub kernel_smallest_eigenvalue: f64,
}

/// Positivity threshold for kernel eigenvalues.
pub const POSITIVITY_TOL: f64 = 1e-10;

pub fn classify(char: &Characteristic) -> Result<ClassifyReport> {
    let generic = char.as_generic();
    generic.validate()?;
    let semi_conformal = generic.semi_conformal_alphas(1e-10);
    let is_sw = semi_conformal
        .as_ref()
        .map(|alphas| alphas.values().all(|&a| (a - 1.0).abs() < 1e-10))
        .unwrap_or(false);
    let kernel = kernel_from_characteristic(char)?;
    let min_eig = kernel.smallest_eigenvalue();
    let dual_char = dual(char)?;
    let dual_kernel = kernel_from_characteristic(&dual_char.characteristic)?;
    Ok(ClassifyReport {
        is_stratonovich_weyl: is_sw,
        semi_conformal,
        is_mapping_positive: min_eig >= -POSITIVITY_TOL,
        is_positive_dual: dual_kernel.smallest_eigenvalue() >= -POSITIVITY_TOL,
        kernel_smallest_eigenvalue: min_eig,
    })
}

/// One factor of the moduli space of correspondences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuliFactor {
    /// `ℝ*`, one per pure level `n`.
    RStar { n: u32 },
    /// Noncompact real Stiefel factor `V_k(ℝ^n)` of a diagonal class.
    RealStiefel {
        k: usize,
        n: usize,
        class: IrrepLabel,
    },
    /// Noncompact complex Stiefel factor `V_k(ℂ^n)` of an off-diagonal pair.
    ComplexStiefel {
        k: usize,
        n: usize,
        classes: (IrrepLabel, IrrepLabel),
    },
}

/// The moduli-space shape of all correspondences of `label`.
pub fn moduli_shape(label: IrrepLabel) -> Vec<ModuliFactor> {
    if label.is_trivial() {
        return vec![];
    }
    if label.is_pure() {
        return (1..=label.degree())
            .map(|n| ModuliFactor::RStar { n })
            .collect();
    }
    let mut out = Vec::new();
    for (class, mult) in cg_series(label, label.dual()).entries {
        if class.p() == class.q() {
            out.push(ModuliFactor::RealStiefel {
                k: mult,
                n: class.p() as usize + 1,
                class,
            });
        } else if class.p() < class.q() {
            out.push(ModuliFactor::ComplexStiefel {
                k: mult,
                n: torus_multiplicity(class),
                classes: (class, class.dual()),
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Symbols
// ---------------------------------------------------------------------------

/// Index of one orbit harmonic: class, torus-multiplet counter γ (1-based),
/// and the GT index of the D-function row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HarmonicLabel {
    pub class: IrrepLabel,
    pub gamma: usize,
    pub idx: GTIndex,
}

/// Decompose `W_A` over the orbit harmonics:
/// `h_{(a,γ),(ν,J)} = (1/√dim p) Σ_σ ⟨e((a;σ);ν,J), A⟩ c^σ_γ(a)`.
pub fn symbol_coefficients(
    char: &Characteristic,
    a: &CMat,
) -> Result<Vec<(HarmonicLabel, Complex64)>> {
    let generic = char.as_generic();
    let label = generic.label;
    let table = cg_table(label, label.dual())?;
    let coeffs = table.operator_coefficients(a)?;
    let norm = 1.0 / (label.dim() as f64).sqrt();
    let mut acc: BTreeMap<HarmonicLabel, Complex64> = BTreeMap::new();
    for (c, v) in coeffs {
        let block = &generic.blocks[&c.class];
        for gamma in 1..=block.nrows() {
            let coef = v * block[[gamma - 1, c.sigma - 1]] * re(norm);
            if coef.norm() == 0.0 {
                continue;
            }
            *acc.entry(HarmonicLabel {
                class: c.class,
                gamma,
                idx: c.idx,
            })
            .or_insert(Complex64::new(0.0, 0.0)) += coef;
        }
    }
    Ok(acc.into_iter().collect())
}

/// Evaluate `W_A(g·z₀) = tr(A ρ(g) K ρ(g)⁻¹)` through the kernel.
pub fn symbol_value(char: &Characteristic, a: &CMat, g: &GroupPoint) -> Result<Complex64> {
    let kernel = kernel_from_characteristic(char)?;
    symbol_value_with_kernel(&kernel, a, g)
}

/// Same as [`symbol_value`] with a prebuilt kernel (for hot loops).
pub fn symbol_value_with_kernel(
    kernel: &OperatorKernel,
    a: &CMat,
    g: &GroupPoint,
) -> Result<Complex64> {
    let d = kernel.label.dim();
    if a.nrows() != d || a.ncols() != d {
        return Err(Error::SizeMismatch {
            expected: d,
            got: a.nrows(),
        });
    }
    Ok(trace(&a.dot(&kernel.conjugated(g))))
}

/// Evaluate `W_A` through the harmonic expansion (independent route used to
/// cross-check [`symbol_value`]).
pub fn symbol_value_expansion(
    char: &Characteristic,
    a: &CMat,
    g: &GroupPoint,
) -> Result<Complex64> {
    let coeffs = symbol_coefficients(char, a)?;
    let mut level: BTreeMap<IrrepLabel, Vec<(HarmonicLabel, Complex64)>> = BTreeMap::new();
    for (h, v) in coeffs {
        level.entry(h.class).or_default().push((h, v));
    }
    let mut out = Complex64::new(0.0, 0.0);
    for (class, entries) in level {
        let basis = BasisIndexer::new(class);
        let fixed = torus_fixed_indices(class);
        let d = irrep_matrix(class, g);
        let scale = (class.dim() as f64).sqrt();
        for (h, v) in entries {
            let row = basis.position(&h.idx).unwrap();
            let col = basis.position(&fixed[h.gamma - 1]).unwrap();
            out += v * d[[row, col]].conj() * re(scale);
        }
    }
    Ok(out)
}

/// The adjoint map `* : B(H_p) → B(H_p̌)` written in canonical GT bases:
/// `(A*)_{ν̌,μ̌} = (−1)^{2(t_μ+u_μ+t_ν+u_ν)} A_{μ,ν}`.
pub fn adjoint_map(label: IrrepLabel, a: &CMat) -> Result<CMat> {
    let d = label.dim();
    if a.nrows() != d || a.ncols() != d {
        return Err(Error::SizeMismatch {
            expected: d,
            got: a.nrows(),
        });
    }
    let basis = BasisIndexer::new(label);
    let dual_basis = BasisIndexer::new(label.dual());
    let mut out: CMat = Array2::zeros((d, d));
    for (i, nu) in basis.indices.iter().enumerate() {
        let ni = dual_basis
            .position(&crate::rep::dual_index(label, *nu)?)
            .unwrap();
        for (j, mu) in basis.indices.iter().enumerate() {
            let mj = dual_basis
                .position(&crate::rep::dual_index(label, *mu)?)
                .unwrap();
            let phase = nu.dual_phase() * mu.dual_phase();
            out[[ni, mj]] = a[[j, i]] * re(phase);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Random characteristics (seeded; used by verification sweeps)
// ---------------------------------------------------------------------------

/// A random valid pure characteristic with numbers in `±[0.3, 2]`.
pub fn random_pure<R: rand::Rng + ?Sized>(
    label: IrrepLabel,
    rng: &mut R,
) -> Result<PureCharacteristic> {
    let c = (0..label.degree())
        .map(|_| {
            let mag = 0.3 + 1.7 * rng.random::<f64>();
            if rng.random::<bool>() {
                mag
            } else {
                -mag
            }
        })
        .collect();
    PureCharacteristic::new(label, c)
}

/// A random valid generic characteristic (full-rank blocks, conjugation
/// pairing respected, trivial class pinned).
pub fn random_generic<R: rand::Rng + ?Sized>(
    label: IrrepLabel,
    rng: &mut R,
) -> Result<GenericCharacteristic> {
    let series = cg_series(label, label.dual());
    let mut blocks: BTreeMap<IrrepLabel, CMat> = BTreeMap::new();
    for (class, mult) in &series.entries {
        if blocks.contains_key(class) {
            continue;
        }
        let rows = torus_multiplicity(*class);
        if class.is_trivial() {
            let pin = re(if label.degree().is_multiple_of(2) { 1.0 } else { -1.0 });
            blocks.insert(*class, Array2::from_elem((1, 1), pin));
            continue;
        }
        let diagonal = class.p() == class.q();
        loop {
            let mut m: CMat = Array2::zeros((rows, *mult));
            for x in m.iter_mut() {
                let re_part = rng.random::<f64>() * 2.0 - 1.0;
                let im_part = if diagonal {
                    0.0
                } else {
                    rng.random::<f64>() * 2.0 - 1.0
                };
                *x = Complex64::new(re_part, im_part);
            }
            if smallest_singular_ratio(&m) > 1e-3 {
                blocks.insert(*class, m.clone());
                if !diagonal {
                    blocks.insert(class.dual(), m.mapv(|x| x.conj()));
                }
                break;
            }
        }
    }
    let g = GenericCharacteristic { label, blocks };
    g.validate()?;
    Ok(g)
}
