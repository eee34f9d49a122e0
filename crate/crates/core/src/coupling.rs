// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Clebsch-Gordan series and coefficient tables.
//!
//! Tables are built constructively: for every class in the series the
//! highest-weight subspace of the tensor product is the joint kernel of the
//! total raising operators on the matching weight space. Degenerate classes
//! are split by the Hermitian invariant
//! `S = S₁₂ − C₃⁽¹⁾/3 + C₃⁽²⁾/3`, whose eigenvalues are distinct and ordered
//! increasingly to fix the multiplicity counter σ. All remaining coupled
//! vectors follow from the exact SU(2)-type lowering coefficients, so every
//! coefficient comes out real.
//!
//! Phase convention (`"v1"`): the trivial-class vector in `Q(p)⊗Q(p̌)` is
//! pinned to `(−1)^{|p|}/√dim · 1`; every other highest-weight coupled vector
//! is normalized with its first nonzero component positive in canonical
//! uncoupled order — except that in a `Q(p)⊗Q(p̌)` table the block of a
//! non-self-dual class `ǎ` takes its sign from the block of `a` through the
//! Hermitian-conjugation relation
//! `e†((a;σ);ν,J) = (−1)^{2(t+u)} e((ǎ;σ);ν̌,J)`, which must hold exactly for
//! operator kernels to come out Hermitian. The symmetry relations of the
//! coefficients then hold up to one global sign per `(class; σ)` block, which
//! [`verify_symmetries`] measures and reports.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{
    build_generators, casimir2_closed, casimir3_closed, t_minus_coeffs, u_minus_coeff,
};
use crate::linalg::CMat;
use crate::rep::{dual_index, BasisIndexer, GTIndex, IrrepLabel};

/// Current table schema version (participates in cache keys).
pub const SCHEMA_VERSION: u32 = 1;
/// Name of the phase convention implemented here.
pub const PHASE_CONVENTION: &str = "v1";
/// Entries below this threshold are dropped from sparse rows.
pub const PRUNE_THRESHOLD: f64 = 1e-12;
/// Minimal admissible gap between splitting-operator eigenvalues.
pub const S_GAP_THRESHOLD: f64 = 1e-6;

// ---------------------------------------------------------------------------
// Clebsch-Gordan series
// ---------------------------------------------------------------------------

/// The decomposition of `Q(p₁)⊗Q(p₂)` into classes with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CGSeries {
    pub p1: IrrepLabel,
    pub p2: IrrepLabel,
    /// `(class, multiplicity)`, descending degree then ascending p.
    pub entries: Vec<(IrrepLabel, usize)>,
}

impl CGSeries {
    pub fn multiplicity(&self, class: IrrepLabel) -> usize {
        self.entries
            .iter()
            .find(|(c, _)| *c == class)
            .map(|(_, m)| *m)
            .unwrap_or(0)
    }

    /// `Σ multiplicity · dim(class)`, which must equal `dim(p₁)·dim(p₂)`.
    pub fn total_dim(&self) -> usize {
        self.entries.iter().map(|(c, m)| c.dim() * m).sum()
    }

    pub fn dims_reconcile(&self) -> bool {
        self.total_dim() == self.p1.dim() * self.p2.dim()
    }
}

/// The exact integer Clebsch-Gordan series of `Q(p₁)⊗Q(p₂)`.
pub fn cg_series(p1: IrrepLabel, p2: IrrepLabel) -> CGSeries {
    let mut mult: HashMap<IrrepLabel, usize> = HashMap::new();
    let mut add = |a: u32, b: u32| {
        *mult.entry(IrrepLabel(a, b)).or_insert(0) += 1;
    };
    for n in 0..=p1.p().min(p2.q()) {
        for m in 0..=p2.p().min(p1.q()) {
            let r1 = p1.p() - n;
            let r2 = p2.p() - m;
            let s1 = p1.q() - m;
            let s2 = p2.q() - n;
            add(r1 + r2, s1 + s2);
            for k in 1..=r1.min(r2) {
                add(r1 + r2 - 2 * k, s1 + s2 + k);
            }
            for k in 1..=s1.min(s2) {
                add(r1 + r2 + k, s1 + s2 - 2 * k);
            }
        }
    }
    let mut entries: Vec<(IrrepLabel, usize)> = mult.into_iter().collect();
    entries.sort_by(|a, b| {
        b.0.degree()
            .cmp(&a.0.degree())
            .then(a.0.p().cmp(&b.0.p()))
    });
    CGSeries { p1, p2, entries }
}

/// Multiplicity of `class` in the series of `Q(p₁)⊗Q(p₂)`.
pub fn multiplicity(p1: IrrepLabel, p2: IrrepLabel, class: IrrepLabel) -> usize {
    cg_series(p1, p2).multiplicity(class)
}

/// The multiplicity counter involution `σ̌ = 𝔪 − σ + 1` (σ is 1-based).
pub fn sigma_check(mult: usize, sigma: usize) -> usize {
    mult - sigma + 1
}

// ---------------------------------------------------------------------------
// Tensor-product machinery
// ---------------------------------------------------------------------------

/// Real dense matrix extracted from a generator matrix (which is real in the
/// GT basis).
fn real_mat(m: &CMat) -> Array2<f64> {
    let mut out = Array2::zeros(m.dim());
    for ((i, j), x) in m.indexed_iter() {
        debug_assert!(x.im.abs() < 1e-14);
        out[[i, j]] = x.re;
    }
    out
}

/// Working state for building tables over one tensor product.
struct TensorContext {
    p1: IrrepLabel,
    p2: IrrepLabel,
    basis1: BasisIndexer,
    basis2: BasisIndexer,
    d1: usize,
    d2: usize,
    t_plus1: Array2<f64>,
    t_plus2: Array2<f64>,
    u_plus1: Array2<f64>,
    u_plus2: Array2<f64>,
    t_minus1: Array2<f64>,
    t_minus2: Array2<f64>,
    u_minus1: Array2<f64>,
    u_minus2: Array2<f64>,
    a1: [[Array2<f64>; 3]; 3],
    a2: [[Array2<f64>; 3]; 3],
}

impl TensorContext {
    fn new(p1: IrrepLabel, p2: IrrepLabel) -> Self {
        let g1 = build_generators(p1);
        let g2 = build_generators(p2);
        let ra = |s: &crate::generators::AjkSet| -> [[Array2<f64>; 3]; 3] {
            std::array::from_fn(|j| std::array::from_fn(|k| real_mat(s.get(j, k))))
        };
        TensorContext {
            p1,
            p2,
            basis1: BasisIndexer::new(p1),
            basis2: BasisIndexer::new(p2),
            d1: p1.dim(),
            d2: p2.dim(),
            t_plus1: real_mat(&g1.t_plus),
            t_plus2: real_mat(&g2.t_plus),
            u_plus1: real_mat(&g1.u_plus),
            u_plus2: real_mat(&g2.u_plus),
            t_minus1: real_mat(&g1.t_minus),
            t_minus2: real_mat(&g2.t_minus),
            u_minus1: real_mat(&g1.u_minus),
            u_minus2: real_mat(&g2.u_minus),
            a1: ra(&g1.a_matrices()),
            a2: ra(&g2.a_matrices()),
        }
    }

    /// Apply `M₁⊗1 + 1⊗M₂` to a tensor vector (row-major pairing).
    fn apply_total(&self, m1: &Array2<f64>, m2: &Array2<f64>, v: &[f64]) -> Vec<f64> {
        let w = ndarray::ArrayView2::from_shape((self.d1, self.d2), v).unwrap();
        let out = m1.dot(&w) + w.dot(&m2.t());
        out.into_raw_vec_and_offset().0
    }

    fn apply_total_t_plus(&self, v: &[f64]) -> Vec<f64> {
        self.apply_total(&self.t_plus1, &self.t_plus2, v)
    }

    fn apply_total_u_plus(&self, v: &[f64]) -> Vec<f64> {
        self.apply_total(&self.u_plus1, &self.u_plus2, v)
    }

    fn apply_total_t_minus(&self, v: &[f64]) -> Vec<f64> {
        self.apply_total(&self.t_minus1, &self.t_minus2, v)
    }

    fn apply_total_u_minus(&self, v: &[f64]) -> Vec<f64> {
        self.apply_total(&self.u_minus1, &self.u_minus2, v)
    }

    /// Apply the splitting operator: the restriction of the triple-product
    /// invariant `S₁₂₃ = (S₁₂+S₂₃+S₃₁)/3` to the two-factor system,
    /// `S = S₁₂ − C₃⁽¹⁾/3 + C₃⁽²⁾/3 + C₂⁽¹⁾ − C₂⁽²⁾`, with
    /// `S₁₂ = ½ Σ_{jkl} (A⁽¹⁾_{jk} A⁽²⁾_{kl} A⁽²⁾_{lj} − A⁽¹⁾_{kl} A⁽¹⁾_{lj} A⁽²⁾_{jk})`.
    ///
    /// The `C₂` difference is absent from the usual display of this
    /// reduction, but eliminating the third factor reverses same-factor
    /// operator orders and produces it; without it the spectra fail the
    /// dualization antisymmetry (see `s_matches_triple_product_invariant`).
    fn apply_s(&self, v: &[f64]) -> Vec<f64> {
        let w = ndarray::ArrayView2::from_shape((self.d1, self.d2), v).unwrap();
        let mut out: Array2<f64> = Array2::zeros((self.d1, self.d2));
        for j in 0..3 {
            for k in 0..3 {
                let mut p2 = Array2::zeros((self.d2, self.d2));
                let mut p1 = Array2::zeros((self.d1, self.d1));
                for l in 0..3 {
                    p2 = p2 + self.a2[k][l].dot(&self.a2[l][j]);
                    p1 = p1 + self.a1[k][l].dot(&self.a1[l][j]);
                }
                out = out + self.a1[j][k].dot(&w).dot(&p2.t())
                    - p1.dot(&w).dot(&self.a2[j][k].t());
            }
        }
        out *= 0.5;
        let shift = (casimir3_closed(self.p2) - casimir3_closed(self.p1)) / 3.0
            + casimir2_closed(self.p1)
            - casimir2_closed(self.p2);
        if shift != 0.0 {
            out = out + &w * shift;
        }
        out.into_raw_vec_and_offset().0
    }

    /// Tensor indices of the weight subspace with total `2t`, `2u` as given.
    fn weight_subspace(&self, two_t: i64, two_u: i64) -> Vec<usize> {
        let mut out = Vec::new();
        for (i1, x1) in self.basis1.indices.iter().enumerate() {
            for (i2, x2) in self.basis2.indices.iter().enumerate() {
                if x1.two_t() + x2.two_t() == two_t && x1.two_u() + x2.two_u() == two_u {
                    out.push(i1 * self.d2 + i2);
                }
            }
        }
        out
    }

    /// Orthonormal basis of the joint kernel of the total raising operators
    /// on the highest-weight subspace of `class`.
    fn highest_weight_kernel(&self, class: IrrepLabel) -> Result<Vec<Vec<f64>>> {
        let expected = multiplicity(self.p1, self.p2, class);
        let sub = self.weight_subspace(class.p() as i64, class.q() as i64);
        let w = sub.len();
        if w == 0 || expected == 0 {
            return Err(Error::KernelDimensionMismatch {
                class,
                expected,
                found: 0,
            });
        }
        let mut images: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(w);
        for &i in &sub {
            let mut v = vec![0.0; self.d1 * self.d2];
            v[i] = 1.0;
            images.push((self.apply_total_t_plus(&v), self.apply_total_u_plus(&v)));
        }
        let mut gram = Array2::<f64>::zeros((w, w));
        for i in 0..w {
            for j in i..w {
                let dot =
                    |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
                let g = dot(&images[i].0, &images[j].0) + dot(&images[i].1, &images[j].1);
                gram[[i, j]] = g;
                gram[[j, i]] = g;
            }
        }
        let gram_c = gram.mapv(crate::linalg::re);
        let (vals, vecs) = crate::linalg::eigh(&gram_c);
        let vmax = vals.last().copied().unwrap_or(0.0).max(1.0);
        let kernel_cols: Vec<usize> = (0..w).filter(|&i| vals[i] <= 1e-10 * vmax).collect();
        if kernel_cols.len() != expected {
            return Err(Error::KernelDimensionMismatch {
                class,
                expected,
                found: kernel_cols.len(),
            });
        }
        let mut out = Vec::with_capacity(expected);
        for &c in &kernel_cols {
            let mut v = vec![0.0; self.d1 * self.d2];
            for (r, &i) in sub.iter().enumerate() {
                v[i] = vecs[[r, c]].re;
            }
            out.push(v);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

/// One sparse coupled-basis row: `(uncoupled pair index, coefficient)`,
/// pair index `= i₁·dim(p₂) + i₂` in canonical per-factor order.
pub type SparseRow = Vec<(u32, f64)>;

/// All coupled vectors of one `(class; σ=1..𝔪)` family.
#[derive(Clone, Debug)]
pub struct CGBlock {
    pub class: IrrepLabel,
    pub multiplicity: usize,
    /// Splitting-operator eigenvalues, ascending; only stored when 𝔪 > 1.
    pub s_eigenvalues: Option<Vec<f64>>,
    /// `rows[σ-1][position in canonical class basis]`.
    pub rows: Vec<Vec<SparseRow>>,
}

/// The real unitary change of basis from uncoupled to coupled GT basis of
/// `Q(p₁)⊗Q(p₂)`, stored sparsely.
#[derive(Clone, Debug)]
pub struct CGTable {
    pub p1: IrrepLabel,
    pub p2: IrrepLabel,
    pub series: CGSeries,
    pub blocks: Vec<CGBlock>,
    block_of: HashMap<IrrepLabel, usize>,
    basis1: BasisIndexer,
    basis2: BasisIndexer,
    class_bases: HashMap<IrrepLabel, BasisIndexer>,
}

/// Identifier of one coupled-basis vector of `Q(p₁)⊗Q(p₂)`:
/// `((a,b); σ; (ν,J))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoupledIndex {
    pub class: IrrepLabel,
    /// 1-based multiplicity counter.
    pub sigma: usize,
    pub idx: GTIndex,
}

impl CoupledIndex {
    pub fn new(class: IrrepLabel, sigma: usize, idx: GTIndex) -> Self {
        CoupledIndex { class, sigma, idx }
    }
}

impl CGTable {
    pub fn basis1(&self) -> &BasisIndexer {
        &self.basis1
    }

    pub fn basis2(&self) -> &BasisIndexer {
        &self.basis2
    }

    pub fn block(&self, class: IrrepLabel) -> Option<&CGBlock> {
        self.block_of.get(&class).map(|&i| &self.blocks[i])
    }

    fn class_basis(&self, class: IrrepLabel) -> Option<&BasisIndexer> {
        self.class_bases.get(&class)
    }

    /// Sparse row of one coupled vector, if the identifiers are valid.
    pub fn row(&self, c: &CoupledIndex) -> Option<&SparseRow> {
        let block = self.block(c.class)?;
        if c.sigma == 0 || c.sigma > block.multiplicity {
            return None;
        }
        let pos = self.class_basis(c.class)?.position(&c.idx)?;
        Some(&block.rows[c.sigma - 1][pos])
    }

    /// One coefficient `C^{p₁p₂(a;σ)}_{ν₁J₁ ν₂J₂ νJ}`.
    pub fn coefficient(&self, c: &CoupledIndex, idx1: &GTIndex, idx2: &GTIndex) -> f64 {
        let (Some(i1), Some(i2)) = (self.basis1.position(idx1), self.basis2.position(idx2))
        else {
            return 0.0;
        };
        let pair = (i1 * self.basis2.dim() + i2) as u32;
        match self.row(c) {
            Some(row) => row
                .iter()
                .find(|(p, _)| *p == pair)
                .map(|(_, v)| *v)
                .unwrap_or(0.0),
            None => 0.0,
        }
    }

    /// All coupled indices in deterministic order.
    pub fn coupled_indices(&self) -> Vec<CoupledIndex> {
        let mut out = Vec::new();
        for b in &self.blocks {
            let cb = self.class_basis(b.class).unwrap();
            for sigma in 1..=b.multiplicity {
                for idx in &cb.indices {
                    out.push(CoupledIndex::new(b.class, sigma, *idx));
                }
            }
        }
        out
    }

    /// Split a pair index back into per-factor GT indices.
    pub fn pair_indices(&self, pair: u32) -> (GTIndex, GTIndex) {
        let i1 = pair as usize / self.d2();
        let i2 = pair as usize % self.d2();
        (self.basis1.indices[i1], self.basis2.indices[i2])
    }

    pub fn d1(&self) -> usize {
        self.basis1.dim()
    }

    pub fn d2(&self) -> usize {
        self.basis2.dim()
    }

    /// Realize a coupled basis element of `Q(p)⊗Q(p̌)` as a `dim(p)×dim(p)`
    /// complex matrix. Requires `p₂ = p̌₁`.
    pub fn coupled_operator_matrix(&self, c: &CoupledIndex) -> Result<CMat> {
        if self.p2 != self.p1.dual() {
            return Err(Error::Context(format!(
                "operator realization needs Q(p)⊗Q(p̌), got {:?}x{:?}",
                self.p1, self.p2
            )));
        }
        let row = self.row(c).ok_or(Error::TableNotBuilt {
            p1: self.p1,
            p2: self.p2,
        })?;
        let d = self.d1();
        let mut m: CMat = Array2::zeros((d, d));
        for &(pair, v) in row {
            let (idx1, idx2) = self.pair_indices(pair);
            let col_idx = dual_index(self.p2, idx2)?;
            let col = self.basis1.position(&col_idx).unwrap();
            let i1 = self.basis1.position(&idx1).unwrap();
            m[[i1, col]] += crate::linalg::re(v * idx2.dual_phase());
        }
        Ok(m)
    }

    /// Project a `dim(p)×dim(p)` matrix onto the coupled basis (trace inner
    /// product). Requires `p₂ = p̌₁`.
    pub fn operator_coefficients(
        &self,
        a: &CMat,
    ) -> Result<Vec<(CoupledIndex, num_complex::Complex64)>> {
        if self.p2 != self.p1.dual() {
            return Err(Error::Context("operator projection needs Q(p)⊗Q(p̌)".into()));
        }
        let d = self.d1();
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::SizeMismatch {
                expected: d,
                got: a.nrows(),
            });
        }
        let mut out = Vec::new();
        for c in self.coupled_indices() {
            let row = self.row(&c).unwrap();
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for &(pair, v) in row {
                let (idx1, idx2) = self.pair_indices(pair);
                let col_idx = dual_index(self.p2, idx2)?;
                let col = self.basis1.position(&col_idx).unwrap();
                let i1 = self.basis1.position(&idx1).unwrap();
                acc += crate::linalg::re(v * idx2.dual_phase()) * a[[i1, col]];
            }
            out.push((c, acc));
        }
        Ok(out)
    }
}

impl CGTable {
    /// Reassemble a table from stored blocks (cache loads). The blocks must
    /// be complete and in series order; light shape checks only, integrity
    /// is the caller's concern (checksums).
    pub fn from_blocks(p1: IrrepLabel, p2: IrrepLabel, blocks: Vec<CGBlock>) -> Result<CGTable> {
        let series = cg_series(p1, p2);
        if blocks.len() != series.entries.len()
            || blocks
                .iter()
                .zip(&series.entries)
                .any(|(b, (c, m))| b.class != *c || b.multiplicity != *m)
        {
            return Err(Error::Context(format!(
                "stored blocks do not match the series of {p1}x{p2}"
            )));
        }
        let class_bases: HashMap<IrrepLabel, BasisIndexer> = blocks
            .iter()
            .map(|b| (b.class, BasisIndexer::new(b.class)))
            .collect();
        for b in &blocks {
            let dim = class_bases[&b.class].dim();
            if b.rows.len() != b.multiplicity || b.rows.iter().any(|r| r.len() != dim) {
                return Err(Error::Context("stored block has wrong row counts".into()));
            }
        }
        let block_of = blocks
            .iter()
            .enumerate()
            .map(|(i, b)| (b.class, i))
            .collect();
        Ok(CGTable {
            p1,
            p2,
            series,
            blocks,
            block_of,
            basis1: BasisIndexer::new(p1),
            basis2: BasisIndexer::new(p2),
            class_bases,
        })
    }
}

/// Dense splitting-operator matrix on the highest-weight multiplicity
/// subspace of `class` inside `Q(p₁)⊗Q(p₂)`, in an orthonormal basis of that
/// subspace (real symmetric). Classes with 𝔪 ≤ 1 are rejected: there is
/// nothing to split.
pub fn build_s_operator(
    p1: IrrepLabel,
    p2: IrrepLabel,
    class: IrrepLabel,
) -> Result<Array2<f64>> {
    let m = multiplicity(p1, p2, class);
    if m <= 1 {
        return Err(Error::Context(format!(
            "class {class:?} has multiplicity {m}; splitting operator not needed"
        )));
    }
    let ctx = TensorContext::new(p1, p2);
    let kernel = ctx.highest_weight_kernel(class)?;
    Ok(s_restriction(&ctx, &kernel))
}

fn s_restriction(ctx: &TensorContext, kernel: &[Vec<f64>]) -> Array2<f64> {
    let m = kernel.len();
    let mut s = Array2::<f64>::zeros((m, m));
    let images: Vec<Vec<f64>> = kernel.iter().map(|v| ctx.apply_s(v)).collect();
    for i in 0..m {
        for j in 0..m {
            s[[i, j]] = kernel[i]
                .iter()
                .zip(&images[j])
                .map(|(x, y)| x * y)
                .sum::<f64>();
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            let avg = 0.5 * (s[[i, j]] + s[[j, i]]);
            s[[i, j]] = avg;
            s[[j, i]] = avg;
        }
    }
    s
}

fn pattern_index(class: IrrepLabel, r_plus: u32, r_minus: u32, nu3: u32) -> GTIndex {
    let nu1 = class.p() + 2 * class.q() - (r_plus + r_minus);
    let nu2 = (r_plus + r_minus) - nu3;
    GTIndex::new([nu1, nu2, nu3], r_plus - r_minus)
}

/// Build the full CG table for `Q(p₁)⊗Q(p₂)`.
pub fn build_cg_table(p1: IrrepLabel, p2: IrrepLabel) -> Result<CGTable> {
    let ctx = TensorContext::new(p1, p2);
    let series = cg_series(p1, p2);
    debug_assert!(series.dims_reconcile());
    let operator_table = p2 == p1.dual();
    let mut blocks = Vec::with_capacity(series.entries.len());
    let mut class_bases = HashMap::new();
    // dense coupled vectors of finished blocks, kept while dual partners
    // may still need a dagger-pinned phase
    let mut built: HashMap<IrrepLabel, Vec<Vec<Vec<f64>>>> = HashMap::new();

    for &(class, mult) in &series.entries {
        let kernel = ctx.highest_weight_kernel(class)?;

        let (mut hw_vectors, s_eigenvalues) = if mult == 1 {
            (vec![kernel.into_iter().next().unwrap()], None)
        } else {
            let s = s_restriction(&ctx, &kernel);
            let (vals, vecs) = crate::linalg::eigh(&s.mapv(crate::linalg::re));
            for w in vals.windows(2) {
                let gap = w[1] - w[0];
                if gap < S_GAP_THRESHOLD {
                    return Err(Error::DegenerateSplitting { class, gap });
                }
            }
            let mut ordered = Vec::with_capacity(mult);
            for sigma in 0..mult {
                let mut v = vec![0.0; ctx.d1 * ctx.d2];
                for (i, k) in kernel.iter().enumerate() {
                    let c = vecs[[i, sigma]].re;
                    for (x, y) in v.iter_mut().zip(k) {
                        *x += c * y;
                    }
                }
                ordered.push(v);
            }
            (ordered, Some(vals))
        };

        for v in hw_vectors.iter_mut() {
            normalize_phase(v)?;
        }
        if class.is_trivial() && operator_table {
            let exact = identity_coupled_vector(&ctx);
            let overlap: f64 = exact.iter().zip(&hw_vectors[0]).map(|(x, y)| x * y).sum();
            if overlap.abs() < 0.999 {
                return Err(Error::NormalizationFailure {
                    norm: overlap.abs(),
                });
            }
            hw_vectors[0] = exact;
        } else if operator_table && class.dual() != class {
            if let Some(partner) = built.get(&class.dual()) {
                // pin this block's sign through Hermitian conjugation of the
                // already-built dual block, so that
                // e†((a;σ);ν,J) = (−1)^{2(t+u)} e((ǎ;σ);ν̌,J) holds exactly
                let partner_basis = BasisIndexer::new(class.dual());
                let lw = crate::rep::lowest_weight_index(class.dual());
                let lw_pos = partner_basis.position(&lw).unwrap();
                for (sigma_idx, hw) in hw_vectors.iter_mut().enumerate() {
                    let image = dagger_image(&ctx, &partner[sigma_idx][lw_pos]);
                    let sign = if lw.two_v() % 2 == 0 { 1.0 } else { -1.0 };
                    let pinned: Vec<f64> = image.iter().map(|x| sign * x).collect();
                    let overlap: f64 = pinned.iter().zip(hw.iter()).map(|(x, y)| x * y).sum();
                    if overlap.abs() < 1.0 - 1e-8 {
                        return Err(Error::Context(format!(
                            "dagger pinning inconsistent for class {class:?} σ{} (overlap {overlap})",
                            sigma_idx + 1
                        )));
                    }
                    *hw = pinned;
                    normalize_phase_norm_only(hw)?;
                }
            }
        }

        let class_basis = BasisIndexer::new(class);
        let mut vector_families: Vec<Vec<Vec<f64>>> = Vec::with_capacity(mult);
        for hw in hw_vectors {
            vector_families.push(lower_family(&ctx, class, &class_basis, hw)?);
        }
        let mut rows: Vec<Vec<SparseRow>> = Vec::with_capacity(mult);
        for vectors in &vector_families {
            rows.push(
                vectors
                    .iter()
                    .enumerate()
                    .map(|(pos, v)| to_sparse_row(&ctx, &class_basis.indices[pos], v))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        if operator_table && class.dual() != class {
            built.insert(class, vector_families);
        }

        class_bases.entry(class).or_insert(class_basis);
        blocks.push(CGBlock {
            class,
            multiplicity: mult,
            s_eigenvalues,
            rows,
        });
    }

    let block_of = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| (b.class, i))
        .collect();
    Ok(CGTable {
        p1,
        p2,
        series,
        blocks,
        block_of,
        basis1: ctx.basis1,
        basis2: ctx.basis2,
        class_bases,
    })
}

/// `(−1)^{|p|}/√dim(p) · 1` expanded on the uncoupled basis of `Q(p)⊗Q(p̌)`.
fn identity_coupled_vector(ctx: &TensorContext) -> Vec<f64> {
    let sign = if ctx.p1.degree().is_multiple_of(2) { 1.0 } else { -1.0 };
    let norm = 1.0 / (ctx.d1 as f64).sqrt();
    let mut v = vec![0.0; ctx.d1 * ctx.d2];
    for (i1, idx) in ctx.basis1.indices.iter().enumerate() {
        let dual = dual_index(ctx.p1, *idx).unwrap();
        let i2 = ctx.basis2.position(&dual).unwrap();
        v[i1 * ctx.d2 + i2] = sign * idx.dual_phase() * norm;
    }
    v
}

/// The Hermitian conjugate of a coupled vector of `Q(p)⊗Q(p̌)`, expressed on
/// the same uncoupled basis: the vector of `M†` when `v` is the vector of
/// `M = Σ v[(ν₁,ν₂)] (−1)^{2(t₂+u₂)} |ν₁⟩⟨ν̌₂|`.
fn dagger_image(ctx: &TensorContext, v: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; ctx.d1 * ctx.d2];
    for (pair, &x) in v.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        let n1 = ctx.basis1.indices[pair / ctx.d2];
        let n2 = ctx.basis2.indices[pair % ctx.d2];
        let m1 = dual_index(ctx.p2, n2).unwrap();
        let m2 = dual_index(ctx.p1, n1).unwrap();
        let i1 = ctx.basis1.position(&m1).unwrap();
        let i2 = ctx.basis2.position(&m2).unwrap();
        w[i1 * ctx.d2 + i2] = x * n1.dual_phase() * n2.dual_phase();
    }
    w
}

/// Renormalize without touching the sign.
fn normalize_phase_norm_only(v: &mut [f64]) -> Result<()> {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NormalizationFailure { norm });
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    Ok(())
}

/// Make the first component above threshold positive (canonical order).
fn normalize_phase(v: &mut [f64]) -> Result<()> {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NormalizationFailure { norm });
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8) {
        if *first < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
    Ok(())
}

/// Generate all coupled vectors of one `Q(a,b)` copy from its highest-weight
/// vector by the exact lowering coefficients, walking patterns in an order
/// where each new vector follows from already-known ones.
fn lower_family(
    ctx: &TensorContext,
    class: IrrepLabel,
    class_basis: &BasisIndexer,
    hw: Vec<f64>,
) -> Result<Vec<Vec<f64>>> {
    let (a, b) = (class.p(), class.q());
    let dim = class_basis.dim();
    let mut vectors: Vec<Option<Vec<f64>>> = vec![None; dim];
    let hw_pos = class_basis
        .position(&crate::rep::highest_weight_index(class))
        .unwrap();
    vectors[hw_pos] = Some(hw);

    let fetch = |vectors: &Vec<Option<Vec<f64>>>, idx: &GTIndex| -> Vec<f64> {
        vectors[class_basis.position(idx).unwrap()]
            .clone()
            .expect("dependency vector must be built before use")
    };
    // per-weight-sector pair lists and the union of total U-spin values a
    // sector can carry (for the exact cleanup projections below)
    let mut sectors: HashMap<(i64, i64), (Vec<usize>, Vec<u32>)> = HashMap::new();
    for (i1, x1) in ctx.basis1.indices.iter().enumerate() {
        for (i2, x2) in ctx.basis2.indices.iter().enumerate() {
            let key = (x1.two_t() + x2.two_t(), x1.two_u() + x2.two_u());
            let e = sectors.entry(key).or_default();
            e.0.push(i1 * ctx.d2 + i2);
            let lo = x1.two_j.abs_diff(x2.two_j);
            let hi = x1.two_j + x2.two_j;
            let mut jj = lo;
            while jj <= hi {
                if !e.1.contains(&jj) {
                    e.1.push(jj);
                }
                jj += 2;
            }
        }
    }

    // project onto the exact weight sector AND the exact total U-spin of the
    // target index: the true vector lives there, and scrubbing both channels
    // stops roundoff from compounding along long lowering chains
    let project = |target: &GTIndex, v: Vec<f64>| -> Vec<f64> {
        let key = (target.two_t(), target.two_u());
        let Some((pairs, j_values)) = sectors.get(&key) else {
            return v;
        };
        let mut out = vec![0.0; v.len()];
        for &i in pairs {
            out[i] = v[i];
        }
        // U-spin Casimir polynomial projector: Π_{J'≠J} (C_U − J'(J'+1)) / (J(J+1) − J'(J'+1))
        let casimir = |two_j: u32| -> f64 { (two_j * (two_j + 2)) as f64 / 4.0 };
        let u = target.two_u() as f64 / 2.0;
        for &jp in j_values {
            if jp == target.two_j {
                continue;
            }
            let w1 = ctx.apply_total_u_minus(&ctx.apply_total_u_plus(&out));
            let w2 = ctx.apply_total_u_plus(&ctx.apply_total_u_minus(&out));
            let denom = casimir(target.two_j) - casimir(jp);
            for (i, x) in out.iter_mut().enumerate() {
                // C_U = U₃² + (U₊U₋ + U₋U₊)/2 with U₃ constant on the sector
                *x = (u * u * *x + 0.5 * (w1[i] + w2[i]) - casimir(jp) * *x) / denom;
            }
        }
        out
    };

    for r_minus in 0..=b {
        for r_plus in b..=(a + b) {
            let top = pattern_index(class, r_plus, r_minus, r_minus);
            let top_pos = class_basis.position(&top).unwrap();
            if vectors[top_pos].is_none() {
                let v = if r_plus > b {
                    // T₋ from (r₊−1, r₋): only the J+1/2 branch fires there
                    let src = pattern_index(class, r_plus - 1, r_minus, r_minus);
                    let (_, c_up) = t_minus_coeffs(class, &src);
                    debug_assert!(c_up > 0.0);
                    let tv = ctx.apply_total_t_minus(&fetch(&vectors, &src));
                    tv.into_iter().map(|x| x / c_up).collect::<Vec<f64>>()
                } else {
                    // r₊ = b, r₋ ≥ 1: T₋ from (b, r₋−1), subtracting the
                    // J+1/2 component which lives at (b+1, r₋−1)
                    let src = pattern_index(class, b, r_minus - 1, r_minus);
                    let (c_down, c_up) = t_minus_coeffs(class, &src);
                    debug_assert!(c_down > 0.0);
                    let mut tv = ctx.apply_total_t_minus(&fetch(&vectors, &src));
                    if c_up > 0.0 {
                        let other = pattern_index(class, b + 1, r_minus - 1, r_minus);
                        let ov = fetch(&vectors, &other);
                        for (x, y) in tv.iter_mut().zip(&ov) {
                            *x -= c_up * y;
                        }
                    }
                    tv.into_iter().map(|x| x / c_down).collect()
                };
                vectors[top_pos] = Some(renormalize(project(&top, v))?);
            }
            for nu3 in (r_minus + 1)..=r_plus {
                let src = pattern_index(class, r_plus, r_minus, nu3 - 1);
                let cu = u_minus_coeff(&src);
                debug_assert!(cu > 0.0);
                let uv = ctx.apply_total_u_minus(&fetch(&vectors, &src));
                let v: Vec<f64> = uv.into_iter().map(|x| x / cu).collect();
                let target = pattern_index(class, r_plus, r_minus, nu3);
                let pos = class_basis.position(&target).unwrap();
                vectors[pos] = Some(renormalize(project(&target, v))?);
            }
        }
    }

    Ok(vectors
        .into_iter()
        .map(|v| v.expect("all class basis vectors generated"))
        .collect())
}

fn renormalize(mut v: Vec<f64>) -> Result<Vec<f64>> {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NormalizationFailure { norm });
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    Ok(v)
}

/// Prune to sparse storage, enforcing the selection-rule zero pattern. The
/// rules are exact theorems, so any component violating them is lowering
/// noise and gets dropped; magnitudes beyond the noise floor indicate a
/// construction bug and abort instead.
fn to_sparse_row(ctx: &TensorContext, coupled: &GTIndex, v: &[f64]) -> Result<SparseRow> {
    let mut row = SparseRow::new();
    for (i, &x) in v.iter().enumerate() {
        if x.abs() <= PRUNE_THRESHOLD {
            continue;
        }
        let idx1 = ctx.basis1.indices[i / ctx.d2];
        let idx2 = ctx.basis2.indices[i % ctx.d2];
        let nabla = idx1.two_t() + idx2.two_t() == coupled.two_t()
            && idx1.two_u() + idx2.two_u() == coupled.two_u();
        let triangle = triangle_ok(idx1.two_j, idx2.two_j, coupled.two_j);
        if !(nabla && triangle) {
            if x.abs() > 1e-9 {
                return Err(Error::Context(format!(
                    "selection-rule violation: |{x:e}| at pair ({idx1:?},{idx2:?}) -> {coupled:?}"
                )));
            }
            continue;
        }
        row.push((i as u32, x));
    }
    Ok(row)
}

pub fn triangle_ok(two_j1: u32, two_j2: u32, two_j: u32) -> bool {
    (two_j as i64) >= (two_j1 as i64 - two_j2 as i64).abs()
        && two_j <= two_j1 + two_j2
        && (two_j1 + two_j2 + two_j).is_multiple_of(2)
}

// ---------------------------------------------------------------------------
// Shared table cache
// ---------------------------------------------------------------------------

type TableCache = Mutex<HashMap<(IrrepLabel, IrrepLabel), Arc<CGTable>>>;

static TABLE_CACHE: LazyLock<TableCache> = LazyLock::new(|| Mutex::new(HashMap::new()));

/// Build or fetch the CG table for `Q(p₁)⊗Q(p₂)` from the in-process cache.
pub fn cg_table(p1: IrrepLabel, p2: IrrepLabel) -> Result<Arc<CGTable>> {
    if let Some(t) = TABLE_CACHE.lock().unwrap().get(&(p1, p2)) {
        return Ok(t.clone());
    }
    let table = Arc::new(build_cg_table(p1, p2)?);
    Ok(TABLE_CACHE
        .lock()
        .unwrap()
        .entry((p1, p2))
        .or_insert(table)
        .clone())
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

/// Residual and per-block sign map of one symmetry relation.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetryRelationReport {
    pub relation: String,
    pub max_residual: f64,
    /// `(class, σ, global sign)` for every checked block.
    pub block_signs: Vec<(IrrepLabel, usize, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub p1: IrrepLabel,
    pub p2: IrrepLabel,
    pub relations: Vec<SymmetryRelationReport>,
    pub max_residual: f64,
}

pub(crate) fn parity_sign(deg: u32) -> f64 {
    if deg.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Check the exchange, dualization and class-exchange symmetry relations of
/// the coefficients, each up to one global sign per `(class; σ)` block.
pub fn verify_symmetries(p1: IrrepLabel, p2: IrrepLabel) -> Result<SymmetryReport> {
    let t12 = cg_table(p1, p2)?;
    let t21 = cg_table(p2, p1)?;
    let tdd = cg_table(p1.dual(), p2.dual())?;

    let mut relations = Vec::new();

    // (1) exchange: C^{p1p2(a;σ)}_{ν1ν2ν} = (−1)^{|p1|+|p2|+|a|} C^{p2p1(a;σ̌)}_{ν2ν1ν}
    relations.push(check_relation(&t12, "exchange", |c, i1, i2| {
        let phase = parity_sign(p1.degree() + p2.degree() + c.class.degree());
        let block = t12.block(c.class).unwrap();
        let other = CoupledIndex::new(c.class, sigma_check(block.multiplicity, c.sigma), c.idx);
        Ok(phase * t21.coefficient(&other, i2, i1))
    })?);

    // (3) dualization
    relations.push(check_relation(&t12, "dualization", |c, i1, i2| {
        let phase = parity_sign(p1.degree() + p2.degree() + c.class.degree());
        let block = t12.block(c.class).unwrap();
        let other = CoupledIndex::new(
            c.class.dual(),
            sigma_check(block.multiplicity, c.sigma),
            dual_index(c.class, c.idx)?,
        );
        Ok(phase * tdd.coefficient(&other, &dual_index(p1, *i1)?, &dual_index(p2, *i2)?))
    })?);

    // (2) class exchange against tables (p1, ǎ)
    {
        let mut tables: HashMap<IrrepLabel, Arc<CGTable>> = HashMap::new();
        for (class, _) in &t12.series.entries {
            tables.insert(*class, cg_table(p1, class.dual())?);
        }
        relations.push(check_relation(&t12, "class-exchange", |c, i1, i2| {
            let t1a = &tables[&c.class];
            let scale = ((c.class.dim() as f64) / (p2.dim() as f64)).sqrt();
            let phase = parity_sign(p1.degree()) * i1.dual_phase();
            let block = t12.block(c.class).unwrap();
            let other = CoupledIndex::new(
                p2.dual(),
                sigma_check(block.multiplicity, c.sigma),
                dual_index(p2, *i2)?,
            );
            Ok(phase * scale * t1a.coefficient(&other, i1, &dual_index(c.class, c.idx)?))
        })?);
    }

    let max_residual = relations.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    Ok(SymmetryReport {
        p1,
        p2,
        relations,
        max_residual,
    })
}

fn check_relation<F>(table: &CGTable, name: &str, other: F) -> Result<SymmetryRelationReport>
where
    F: Fn(&CoupledIndex, &GTIndex, &GTIndex) -> Result<f64>,
{
    let mut rep = SymmetryRelationReport {
        relation: name.into(),
        max_residual: 0.0,
        block_signs: Vec::new(),
    };
    for block in &table.blocks {
        for sigma in 1..=block.multiplicity {
            let mut dot = 0.0;
            let mut pairs: Vec<(f64, f64)> = Vec::new();
            let cb = table.class_basis(block.class).unwrap();
            for idx in &cb.indices {
                let c = CoupledIndex::new(block.class, sigma, *idx);
                for &(pair, v) in table.row(&c).unwrap() {
                    let (i1, i2) = table.pair_indices(pair);
                    let o = other(&c, &i1, &i2)?;
                    dot += v * o;
                    pairs.push((v, o));
                }
            }
            let s = if dot >= 0.0 { 1.0 } else { -1.0 };
            for (v, o) in pairs {
                rep.max_residual = rep.max_residual.max((v - s * o).abs());
            }
            rep.block_signs.push((block.class, sigma, s));
        }
    }
    Ok(rep)
}

/// Max deviation of both orthogonality sums from the identity pattern.
pub fn orthogonality_residual(table: &CGTable) -> f64 {
    let coupled = table.coupled_indices();
    let n = table.d1() * table.d2();
    let mut u = vec![vec![0.0f64; n]; coupled.len()];
    for (r, c) in coupled.iter().enumerate() {
        for &(pair, v) in table.row(c).unwrap() {
            u[r][pair as usize] = v;
        }
    }
    let mut residual = 0.0f64;
    for i in 0..coupled.len() {
        for j in i..coupled.len() {
            let dot: f64 = u[i].iter().zip(&u[j]).map(|(a, b)| a * b).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            residual = residual.max((dot - expected).abs());
        }
    }
    for a in 0..n {
        for b in a..n {
            let mut dot = 0.0;
            for row in &u {
                dot += row[a] * row[b];
            }
            let expected = if a == b { 1.0 } else { 0.0 };
            residual = residual.max((dot - expected).abs());
        }
    }
    residual
}

/// Max spread of the isoscalar ratio `CG(SU3)/CG(SU2)` over the `u`-direction
/// of every block: the factorization that defines the isoscalar factor. A
/// U-spin multiplet is labeled by `(ν₁, J)` — `ν₁` is the multiplet invariant
/// (the eigenvalue of the `U(1)` commuting with the U-spin `SU(2)`), so the
/// isoscalar key fixes `(ν₁, J)` of all three slots and the ratio must be
/// constant as the `u`-split varies.
pub fn isoscalar_spread(table: &CGTable) -> f64 {
    use std::collections::BTreeMap;
    #[allow(clippy::type_complexity)]
    let mut groups: BTreeMap<(IrrepLabel, usize, u32, u32, u32, u32, u32, u32), Vec<f64>> =
        BTreeMap::new();
    for c in table.coupled_indices() {
        for &(pair, v) in table.row(&c).unwrap() {
            let (i1, i2) = table.pair_indices(pair);
            let su2 = crate::su2::clebsch_gordan(
                i1.two_j as i64,
                i1.two_u(),
                i2.two_j as i64,
                i2.two_u(),
                c.idx.two_j as i64,
                c.idx.two_u(),
            );
            if su2.abs() < 1e-10 {
                continue;
            }
            let key = (
                c.class,
                c.sigma,
                c.idx.two_j,
                c.idx.nu[0],
                i1.two_j,
                i1.nu[0],
                i2.two_j,
                i2.nu[0],
            );
            groups.entry(key).or_default().push(v / su2);
        }
    }
    let mut spread = 0.0f64;
    for ratios in groups.values() {
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        spread = spread.max(hi - lo);
    }
    spread
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_examples() {
        let s = cg_series(IrrepLabel(1, 0), IrrepLabel(0, 1));
        assert_eq!(s.entries, vec![(IrrepLabel(1, 1), 1), (IrrepLabel(0, 0), 1)]);
        let s = cg_series(IrrepLabel(1, 1), IrrepLabel(1, 1));
        assert_eq!(
            s.entries,
            vec![
                (IrrepLabel(2, 2), 1),
                (IrrepLabel(0, 3), 1),
                (IrrepLabel(3, 0), 1),
                (IrrepLabel(1, 1), 2),
                (IrrepLabel(0, 0), 1),
            ]
        );
        assert_eq!(
            multiplicity(IrrepLabel(2, 1), IrrepLabel(1, 2), IrrepLabel(1, 1)),
            2
        );
    }

    #[test]
    fn series_dimensions_reconcile() {
        for p1 in 0..=4u32 {
            for q1 in 0..=(4 - p1) {
                for p2 in 0..=4u32 {
                    for q2 in 0..=(4 - p2) {
                        let s = cg_series(IrrepLabel(p1, q1), IrrepLabel(p2, q2));
                        assert!(s.dims_reconcile(), "dims for {:?}x{:?}", s.p1, s.p2);
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicity_chain_on_triples() {
        let labels: Vec<IrrepLabel> = (0..=3u32)
            .flat_map(|p| (0..=(3 - p)).map(move |q| IrrepLabel(p, q)))
            .collect();
        for &l1 in &labels {
            for &l2 in &labels {
                for &l3 in &labels {
                    let m1 = multiplicity(l1, l2, l3.dual());
                    let m2 = multiplicity(l2, l1, l3.dual());
                    let m3 = multiplicity(l1, l3, l2.dual());
                    let m4 = multiplicity(l1.dual(), l2.dual(), l3);
                    assert!(m1 == m2 && m2 == m3 && m3 == m4, "{l1} {l2} {l3}");
                }
            }
        }
    }

    #[test]
    fn s_operator_appendix_regression() {
        let s = build_s_operator(IrrepLabel(1, 1), IrrepLabel(1, 1), IrrepLabel(1, 1)).unwrap();
        let (vals, _) = crate::linalg::eigh(&s.mapv(crate::linalg::re));
        assert_eq!(vals.len(), 2);
        let gap = vals[1] - vals[0];
        let expected = 3.0 * 5.0f64.sqrt();
        assert!((gap - expected).abs() < 1e-8, "gap = {gap}");
        assert!((vals[0] + vals[1]).abs() < 1e-8, "not symmetric: {vals:?}");
    }

    #[test]
    fn s_operator_rejects_multiplicity_free_class() {
        let r = build_s_operator(IrrepLabel(1, 0), IrrepLabel(0, 1), IrrepLabel(1, 1));
        assert!(r.is_err());
    }

    #[test]
    fn trivial_class_coefficient_example() {
        let t = cg_table(IrrepLabel(1, 0), IrrepLabel(0, 1)).unwrap();
        let c = CoupledIndex::new(IrrepLabel(0, 0), 1, GTIndex::new([0, 0, 0], 0));
        let v = t.coefficient(&c, &GTIndex::new([1, 0, 0], 0), &GTIndex::new([0, 1, 1], 0));
        assert!((v - 1.0 / 3.0f64.sqrt()).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn unitarity_small_tables() {
        for (p1, p2) in [
            (IrrepLabel(1, 0), IrrepLabel(0, 1)),
            (IrrepLabel(1, 1), IrrepLabel(1, 1)),
            (IrrepLabel(2, 0), IrrepLabel(0, 2)),
            (IrrepLabel(1, 0), IrrepLabel(1, 0)),
            (IrrepLabel(2, 1), IrrepLabel(1, 2)),
        ] {
            let t = cg_table(p1, p2).unwrap();
            let r = orthogonality_residual(&t);
            assert!(r < 1e-9, "orthogonality residual {r:e} for {p1}x{p2}");
        }
    }

    #[test]
    fn selection_rules_hold_statically() {
        let t = cg_table(IrrepLabel(1, 1), IrrepLabel(1, 1)).unwrap();
        for c in t.coupled_indices() {
            for &(pair, _v) in t.row(&c).unwrap() {
                let (i1, i2) = t.pair_indices(pair);
                assert_eq!(i1.two_t() + i2.two_t(), c.idx.two_t());
                assert_eq!(i1.two_u() + i2.two_u(), c.idx.two_u());
                assert!(triangle_ok(i1.two_j, i2.two_j, c.idx.two_j));
            }
        }
    }

    #[test]
    fn s_eigenvalues_recorded_and_ordered() {
        let t = cg_table(IrrepLabel(1, 1), IrrepLabel(1, 1)).unwrap();
        let block = t.block(IrrepLabel(1, 1)).unwrap();
        let vals = block.s_eigenvalues.as_ref().unwrap();
        assert_eq!(vals.len(), 2);
        assert!(vals[0] < vals[1]);
        let expected = 3.0 * 5.0f64.sqrt() / 2.0;
        assert!((vals[1] - expected).abs() < 1e-8);
        assert!((vals[0] + expected).abs() < 1e-8);
    }

    #[test]
    fn s_spectrum_antisymmetric_under_dualization() {
        let t = cg_table(IrrepLabel(2, 1), IrrepLabel(1, 2)).unwrap();
        let td = cg_table(IrrepLabel(1, 2), IrrepLabel(2, 1)).unwrap();
        for block in &t.blocks {
            if let Some(vals) = &block.s_eigenvalues {
                let dual_block = td.block(block.class.dual()).unwrap();
                let dual_vals = dual_block.s_eigenvalues.as_ref().unwrap();
                for (i, v) in vals.iter().enumerate() {
                    let mirrored = -dual_vals[vals.len() - 1 - i];
                    assert!((v - mirrored).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn symmetry_relations_up_to_block_signs() {
        for (p1, p2) in [
            (IrrepLabel(1, 0), IrrepLabel(0, 1)),
            (IrrepLabel(1, 1), IrrepLabel(1, 1)),
            (IrrepLabel(2, 0), IrrepLabel(1, 1)),
        ] {
            let rep = verify_symmetries(p1, p2).unwrap();
            assert!(
                rep.max_residual < 1e-9,
                "symmetry residual {:e} for {p1}x{p2}",
                rep.max_residual
            );
        }
    }

    #[test]
    fn isoscalar_factorization() {
        for (p1, p2) in [
            (IrrepLabel(1, 1), IrrepLabel(1, 1)),
            (IrrepLabel(2, 0), IrrepLabel(0, 2)),
            (IrrepLabel(2, 1), IrrepLabel(1, 2)),
        ] {
            let t = cg_table(p1, p2).unwrap();
            let s = isoscalar_spread(&t);
            assert!(s < 1e-8, "isoscalar spread {s:e} for {p1}x{p2}");
        }
    }

    #[test]
    fn coupled_operator_matrices_are_orthonormal() {
        let t = cg_table(IrrepLabel(1, 0), IrrepLabel(0, 1)).unwrap();
        let all = t.coupled_indices();
        for (i, ci) in all.iter().enumerate() {
            let mi = t.coupled_operator_matrix(ci).unwrap();
            for cj in all.iter().skip(i) {
                let mj = t.coupled_operator_matrix(cj).unwrap();
                let dot = crate::linalg::trace(&crate::linalg::adjoint(&mi).dot(&mj));
                let expected = if ci == cj { 1.0 } else { 0.0 };
                assert!(
                    (dot.re - expected).abs() < 1e-10 && dot.im.abs() < 1e-10,
                    "trace orthonormality {ci:?} {cj:?}"
                );
            }
        }
    }

    /// Independent oracle for the splitting operator: realize
    /// `S₁₂₃ = (S₁₂+S₂₃+S₃₁)/3` honestly on `H₁⊗H₂⊗H₃` with `p₃ = ǎ`,
    /// restrict to the invariant subspace, and compare spectra with the
    /// two-factor construction used for the tables.
    fn triple_product_s_spectrum(p1: IrrepLabel, p2: IrrepLabel, class: IrrepLabel) -> Vec<f64> {
        use crate::generators::build_generators;
        let p3 = class.dual();
        let labels = [p1, p2, p3];
        let d = [p1.dim(), p2.dim(), p3.dim()];
        let n = d[0] * d[1] * d[2];
        let gens: Vec<_> = labels.iter().map(|l| build_generators(*l)).collect();
        let realm = |m: &crate::linalg::CMat| -> Array2<f64> {
            let mut out = Array2::zeros(m.dim());
            for ((i, j), x) in m.indexed_iter() {
                out[[i, j]] = x.re;
            }
            out
        };
        let a: Vec<[[Array2<f64>; 3]; 3]> = gens
            .iter()
            .map(|g| {
                let s = g.a_matrices();
                std::array::from_fn(|j| std::array::from_fn(|k| realm(s.get(j, k))))
            })
            .collect();
        let apply = |which: usize, m: &Array2<f64>, v: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for i1 in 0..d[0] {
                for i2 in 0..d[1] {
                    for i3 in 0..d[2] {
                        let idx = (i1 * d[1] + i2) * d[2] + i3;
                        let x = v[idx];
                        if x == 0.0 {
                            continue;
                        }
                        match which {
                            0 => {
                                for r in 0..d[0] {
                                    let c = m[[r, i1]];
                                    if c != 0.0 {
                                        out[(r * d[1] + i2) * d[2] + i3] += c * x;
                                    }
                                }
                            }
                            1 => {
                                for r in 0..d[1] {
                                    let c = m[[r, i2]];
                                    if c != 0.0 {
                                        out[(i1 * d[1] + r) * d[2] + i3] += c * x;
                                    }
                                }
                            }
                            _ => {
                                for r in 0..d[2] {
                                    let c = m[[r, i3]];
                                    if c != 0.0 {
                                        out[(i1 * d[1] + i2) * d[2] + r] += c * x;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            out
        };

        // invariant subspace: joint kernel of total T±, U± on the zero-weight part
        let bases: Vec<_> = labels.iter().map(|l| BasisIndexer::new(*l)).collect();
        let mut sub = vec![];
        for (i1, x1) in bases[0].indices.iter().enumerate() {
            for (i2, x2) in bases[1].indices.iter().enumerate() {
                for (i3, x3) in bases[2].indices.iter().enumerate() {
                    if x1.two_t() + x2.two_t() + x3.two_t() == 0
                        && x1.two_u() + x2.two_u() + x3.two_u() == 0
                    {
                        sub.push((i1 * d[1] + i2) * d[2] + i3);
                    }
                }
            }
        }
        let ops = [
            [realm(&gens[0].t_plus), realm(&gens[1].t_plus), realm(&gens[2].t_plus)],
            [realm(&gens[0].u_plus), realm(&gens[1].u_plus), realm(&gens[2].u_plus)],
            [realm(&gens[0].t_minus), realm(&gens[1].t_minus), realm(&gens[2].t_minus)],
            [realm(&gens[0].u_minus), realm(&gens[1].u_minus), realm(&gens[2].u_minus)],
        ];
        let total = |op: &[Array2<f64>; 3], v: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (w, m) in op.iter().enumerate() {
                for (o, x) in out.iter_mut().zip(apply(w, m, v)) {
                    *o += x;
                }
            }
            out
        };
        let w = sub.len();
        let mut imgs = Vec::with_capacity(w);
        for &i in &sub {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            imgs.push(ops.iter().map(|op| total(op, &v)).collect::<Vec<_>>());
        }
        let mut gram = Array2::<f64>::zeros((w, w));
        for i in 0..w {
            for j in i..w {
                let mut g = 0.0;
                for (ik, jk) in imgs[i].iter().zip(&imgs[j]) {
                    g += ik.iter().zip(jk).map(|(a, b)| a * b).sum::<f64>();
                }
                gram[[i, j]] = g;
                gram[[j, i]] = g;
            }
        }
        let (vals, vecs) = crate::linalg::eigh(&gram.mapv(crate::linalg::re));
        let kernel: Vec<usize> = (0..w)
            .filter(|&i| vals[i] <= 1e-9 * vals[w - 1].max(1.0))
            .collect();
        let h0: Vec<Vec<f64>> = kernel
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; n];
                for (r, &i) in sub.iter().enumerate() {
                    v[i] = vecs[[r, c]].re;
                }
                v
            })
            .collect();

        let s_xy = |x: usize, y: usize, v: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let t1 = apply(x, &a[x][j][k], &apply(y, &a[y][k][l], &apply(y, &a[y][l][j], v)));
                        let t2 = apply(y, &a[y][j][k], &apply(x, &a[x][k][l], &apply(x, &a[x][l][j], v)));
                        for i in 0..n {
                            out[i] += 0.5 * (t1[i] - t2[i]);
                        }
                    }
                }
            }
            out
        };
        let m = h0.len();
        let mut smat = Array2::<f64>::zeros((m, m));
        for j in 0..m {
            let s12 = s_xy(0, 1, &h0[j]);
            let s23 = s_xy(1, 2, &h0[j]);
            let s31 = s_xy(2, 0, &h0[j]);
            let img: Vec<f64> = (0..n).map(|i| (s12[i] + s23[i] + s31[i]) / 3.0).collect();
            for i in 0..m {
                smat[[i, j]] = h0[i].iter().zip(&img).map(|(x, y)| x * y).sum();
            }
        }
        let (svals, _) = crate::linalg::eigh(&smat.mapv(crate::linalg::re));
        svals
    }

    #[test]
    fn s_matches_triple_product_invariant() {
        // asymmetric contexts where the scalar corrections matter
        for (p1, p2, class) in [
            (IrrepLabel(2, 2), IrrepLabel(1, 1), IrrepLabel(2, 2)),
            (IrrepLabel(2, 1), IrrepLabel(1, 1), IrrepLabel(2, 1)),
        ] {
            let honest = triple_product_s_spectrum(p1, p2, class);
            let s = build_s_operator(p1, p2, class).unwrap();
            let (vals, _) = crate::linalg::eigh(&s.mapv(crate::linalg::re));
            assert_eq!(honest.len(), vals.len(), "multiplicity at {p1}x{p2}:{class}");
            for (h, v) in honest.iter().zip(&vals) {
                assert!(
                    (h - v).abs() < 1e-8,
                    "S spectrum mismatch at {p1}x{p2}:{class}: {honest:?} vs {vals:?}"
                );
            }
        }
    }

    #[test]
    fn hermitian_conjugation_relation_exact() {
        // e†((a;σ);ν,J) = (−1)^{2(t+u)} e((ǎ;σ);ν̌,J) on operator tables
        for p in [
            IrrepLabel(1, 0),
            IrrepLabel(1, 1),
            IrrepLabel(2, 0),
            IrrepLabel(2, 1),
        ] {
            let t = cg_table(p, p.dual()).unwrap();
            for c in t.coupled_indices() {
                let m = t.coupled_operator_matrix(&c).unwrap();
                let partner = CoupledIndex::new(
                    c.class.dual(),
                    c.sigma,
                    crate::rep::dual_index(c.class, c.idx).unwrap(),
                );
                let expected = t.coupled_operator_matrix(&partner).unwrap()
                    * crate::linalg::re(c.idx.dual_phase());
                let defect =
                    crate::linalg::max_norm(&(crate::linalg::adjoint(&m) - expected));
                assert!(defect < 1e-10, "dagger relation at {p} {c:?}: {defect:e}");
            }
        }
    }

    #[test]
    fn identity_block_is_identity_matrix() {
        let t = cg_table(IrrepLabel(1, 1), IrrepLabel(1, 1)).unwrap();
        let c = CoupledIndex::new(IrrepLabel(0, 0), 1, GTIndex::new([0, 0, 0], 0));
        let m = t.coupled_operator_matrix(&c).unwrap();
        let expected = crate::linalg::eye(8) * crate::linalg::re(1.0 / 8.0f64.sqrt());
        assert!(crate::linalg::max_norm(&(m - expected)) < 1e-12);
    }
}
