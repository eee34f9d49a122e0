// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic JSON emission for exported tables and reports.
//!
//! Output is byte-identical across runs: keys in fixed order, floats always
//! written with 17 significant digits (`{:.16e}`), which round-trips f64
//! exactly. Parsing goes through serde.

use serde::Deserialize;

use crate::coupling::{CGBlock, CGTable, SparseRow, PHASE_CONVENTION, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::rep::{BasisIndexer, GTIndex, IrrepLabel};
use crate::twisted::McReport;

/// Format a float with 17 significant digits (round-trip exact).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_label(l: &IrrepLabel) -> String {
    format!("[{},{}]", l.0, l.1)
}

fn fmt_nu(nu: &[u32; 3]) -> String {
    format!("[{},{},{}]", nu[0], nu[1], nu[2])
}

// ---------------------------------------------------------------------------
// Table envelope
// ---------------------------------------------------------------------------

/// Parsed form of one stored table file (any body kind).
#[derive(Debug, Deserialize)]
pub struct TableFile {
    pub header: TableHeader,
    #[serde(default)]
    pub body: Vec<CgRow>,
    #[serde(default, rename = "sEigenvalues")]
    pub s_eigenvalues: Vec<SEigenvalueEntry>,
}

#[derive(Debug, Deserialize)]
pub struct TableHeader {
    pub p1: IrrepLabel,
    pub p2: IrrepLabel,
    pub version: u32,
    pub tolerance: f64,
    #[serde(rename = "phaseConvention")]
    pub phase_convention: String,
    pub kind: String,
}

#[derive(Debug, Deserialize)]
pub struct CgRow {
    pub class: IrrepLabel,
    pub sigma: usize,
    pub nu: [u32; 3],
    #[serde(rename = "twoJ")]
    pub two_j: u32,
    pub entries: Vec<CgEntry>,
}

#[derive(Debug, Deserialize)]
pub struct CgEntry {
    pub nu1: [u32; 3],
    #[serde(rename = "twoJ1")]
    pub two_j1: u32,
    pub nu2: [u32; 3],
    #[serde(rename = "twoJ2")]
    pub two_j2: u32,
    pub value: f64,
}

#[derive(Debug, Deserialize)]
pub struct SEigenvalueEntry {
    pub class: IrrepLabel,
    pub values: Vec<f64>,
}

/// Serialize a CG table to its canonical JSON envelope.
pub fn cg_table_to_json(table: &CGTable) -> String {
    let mut out = String::with_capacity(1 << 16);
    out.push_str("{\"header\":");
    push_header(&mut out, table.p1, table.p2, "cgTable");
    out.push_str(",\"body\":[");
    let mut first = true;
    for block in &table.blocks {
        let class_basis = BasisIndexer::new(block.class);
        for sigma in 1..=block.multiplicity {
            for (pos, idx) in class_basis.indices.iter().enumerate() {
                if !first {
                    out.push(',');
                }
                first = false;
                out.push_str(&format!(
                    "{{\"class\":{},\"sigma\":{},\"nu\":{},\"twoJ\":{},\"entries\":[",
                    fmt_label(&block.class),
                    sigma,
                    fmt_nu(&idx.nu),
                    idx.two_j
                ));
                let row = &block.rows[sigma - 1][pos];
                for (k, &(pair, v)) in row.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    let (i1, i2) = table.pair_indices(pair);
                    out.push_str(&format!(
                        "{{\"nu1\":{},\"twoJ1\":{},\"nu2\":{},\"twoJ2\":{},\"value\":{}}}",
                        fmt_nu(&i1.nu),
                        i1.two_j,
                        fmt_nu(&i2.nu),
                        i2.two_j,
                        fmt_f64(v)
                    ));
                }
                out.push_str("]}");
            }
        }
    }
    out.push_str("],\"sEigenvalues\":[");
    let mut first = true;
    for block in &table.blocks {
        if let Some(vals) = &block.s_eigenvalues {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&format!(
                "{{\"class\":{},\"values\":[{}]}}",
                fmt_label(&block.class),
                vals.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(",")
            ));
        }
    }
    out.push_str("]}");
    out
}

fn push_header(out: &mut String, p1: IrrepLabel, p2: IrrepLabel, kind: &str) {
    out.push_str(&format!(
        "{{\"p1\":{},\"p2\":{},\"version\":{},\"tolerance\":{},\"phaseConvention\":\"{}\",\"kind\":\"{}\"}}",
        fmt_label(&p1),
        fmt_label(&p2),
        SCHEMA_VERSION,
        fmt_f64(1e-9),
        PHASE_CONVENTION,
        kind
    ));
}

/// Rebuild a CG table from its JSON envelope.
pub fn cg_table_from_json(s: &str) -> Result<CGTable> {
    let file: TableFile =
        serde_json::from_str(s).map_err(|e| Error::Context(format!("table parse: {e}")))?;
    if file.header.kind != "cgTable" {
        return Err(Error::Context(format!(
            "expected kind cgTable, got {}",
            file.header.kind
        )));
    }
    if file.header.version != SCHEMA_VERSION || file.header.phase_convention != PHASE_CONVENTION {
        return Err(Error::Context("schema version mismatch".into()));
    }
    let (p1, p2) = (file.header.p1, file.header.p2);
    let series = crate::coupling::cg_series(p1, p2);
    let basis1 = BasisIndexer::new(p1);
    let basis2 = BasisIndexer::new(p2);
    let d2 = basis2.dim();

    let mut blocks: Vec<CGBlock> = series
        .entries
        .iter()
        .map(|&(class, mult)| {
            let dim = class.dim();
            CGBlock {
                class,
                multiplicity: mult,
                s_eigenvalues: None,
                rows: vec![vec![SparseRow::new(); dim]; mult],
            }
        })
        .collect();
    for row in &file.body {
        let bi = blocks
            .iter()
            .position(|b| b.class == row.class)
            .ok_or_else(|| Error::Context(format!("unknown class {:?}", row.class)))?;
        let class_basis = BasisIndexer::new(row.class);
        let pos = class_basis
            .position(&GTIndex::new(row.nu, row.two_j))
            .ok_or_else(|| Error::Context("bad coupled index in stored row".into()))?;
        if row.sigma == 0 || row.sigma > blocks[bi].multiplicity {
            return Err(Error::Context("bad sigma in stored row".into()));
        }
        let mut sparse = SparseRow::with_capacity(row.entries.len());
        for e in &row.entries {
            let i1 = basis1
                .position(&GTIndex::new(e.nu1, e.two_j1))
                .ok_or_else(|| Error::Context("bad uncoupled index".into()))?;
            let i2 = basis2
                .position(&GTIndex::new(e.nu2, e.two_j2))
                .ok_or_else(|| Error::Context("bad uncoupled index".into()))?;
            sparse.push(((i1 * d2 + i2) as u32, e.value));
        }
        blocks[bi].rows[row.sigma - 1][pos] = sparse;
    }
    for se in &file.s_eigenvalues {
        if let Some(b) = blocks.iter_mut().find(|b| b.class == se.class) {
            b.s_eigenvalues = Some(se.values.clone());
        }
    }
    CGTable::from_blocks(p1, p2, blocks)
}

// ---------------------------------------------------------------------------
// Symbol-table bodies (product symbols, twist constants)
// ---------------------------------------------------------------------------

/// One triple-indexed row of a `productSymbols` or `twistConstants` body.
pub struct TripleRow {
    pub a1: IrrepLabel,
    pub sigma1: usize,
    pub idx1: GTIndex,
    pub a2: IrrepLabel,
    pub sigma2: usize,
    pub idx2: GTIndex,
    pub a3: IrrepLabel,
    pub sigma3: usize,
    pub idx3: GTIndex,
    pub value: f64,
}

/// Serialize triple-indexed rows in the table envelope with the given kind.
pub fn triples_to_json(
    p1: IrrepLabel,
    p2: IrrepLabel,
    kind: &str,
    rows: &[TripleRow],
) -> String {
    let mut out = String::with_capacity(1 << 16);
    out.push_str("{\"header\":");
    push_header(&mut out, p1, p2, kind);
    out.push_str(",\"body\":[");
    for (k, r) in rows.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "{{\"a1\":{},\"sigma1\":{},\"nu1\":{},\"twoJ1\":{},\"a2\":{},\"sigma2\":{},\"nu2\":{},\"twoJ2\":{},\"a3\":{},\"sigma3\":{},\"nu3\":{},\"twoJ3\":{},\"value\":{}}}",
            fmt_label(&r.a1),
            r.sigma1,
            fmt_nu(&r.idx1.nu),
            r.idx1.two_j,
            fmt_label(&r.a2),
            r.sigma2,
            fmt_nu(&r.idx2.nu),
            r.idx2.two_j,
            fmt_label(&r.a3),
            r.sigma3,
            fmt_nu(&r.idx3.nu),
            r.idx3.two_j,
            fmt_f64(r.value)
        ));
    }
    out.push_str("],\"sEigenvalues\":[]}");
    out
}

// ---------------------------------------------------------------------------
// Reports and characteristic payloads
// ---------------------------------------------------------------------------

/// One named check outcome.
#[derive(Clone, Debug, serde::Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, residual: f64, tolerance: f64, samples: usize) -> Self {
        let check = check.into();
        CheckReport {
            pass: residual <= tolerance,
            check,
            residual,
            tolerance,
            samples,
        }
    }

    pub fn from_mc(mc: &McReport) -> Self {
        let estimate = num_complex::Complex64::new(mc.estimate_re, mc.estimate_im);
        let target = num_complex::Complex64::new(mc.target_re, mc.target_im);
        CheckReport {
            check: mc.check.clone(),
            residual: (estimate - target).norm(),
            tolerance: 5.0 * mc.std_error.max(1e-14),
            samples: mc.samples,
            pass: mc.pass,
        }
    }
}

/// Serialize a report list deterministically.
pub fn reports_to_json(reports: &[CheckReport]) -> String {
    let mut out = String::from("[");
    for (k, r) in reports.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "{{\"check\":\"{}\",\"residual\":{},\"tolerance\":{},\"samples\":{},\"pass\":{}}}",
            r.check,
            fmt_f64(r.residual),
            fmt_f64(r.tolerance),
            r.samples,
            r.pass
        ));
    }
    out.push(']');
    out
}

/// Serialize a characteristic (with its kernel) for the `kernel` command:
/// `{label, kind, c, matrices:[{class, rows, cols, re, im}], kernel:{re,im}}`.
pub fn characteristic_to_json(
    char: &crate::correspondence::Characteristic,
    kernel: &crate::correspondence::OperatorKernel,
) -> String {
    let generic = char.as_generic();
    let mut out = String::from("{");
    out.push_str(&format!("\"label\":{},", fmt_label(&generic.label)));
    match char {
        crate::correspondence::Characteristic::Pure(p) => {
            out.push_str("\"kind\":\"pure\",\"c\":[");
            out.push_str(
                &p.c.iter()
                    .map(|x| fmt_f64(*x))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.push_str("],");
        }
        crate::correspondence::Characteristic::Generic(_) => {
            out.push_str("\"kind\":\"generic\",\"c\":null,");
        }
    }
    out.push_str("\"matrices\":[");
    for (k, (class, m)) in generic.blocks.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        let re_vals: Vec<String> = m.iter().map(|x| fmt_f64(x.re)).collect();
        let im_vals: Vec<String> = m.iter().map(|x| fmt_f64(x.im)).collect();
        out.push_str(&format!(
            "{{\"class\":{},\"rows\":{},\"cols\":{},\"re\":[{}],\"im\":[{}]}}",
            fmt_label(class),
            m.nrows(),
            m.ncols(),
            re_vals.join(","),
            im_vals.join(",")
        ));
    }
    out.push_str("],\"kernel\":{");
    let re_vals: Vec<String> = kernel.matrix.iter().map(|x| fmt_f64(x.re)).collect();
    let im_vals: Vec<String> = kernel.matrix.iter().map(|x| fmt_f64(x.im)).collect();
    out.push_str(&format!(
        "\"dim\":{},\"re\":[{}],\"im\":[{}]}}",
        kernel.matrix.nrows(),
        re_vals.join(","),
        im_vals.join(",")
    ));
    out.push('}');
    out
}
