// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: table generation, verification suites, JSON
//! export, and a persistent content-addressed cache.

mod cache;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use su3kit::correspondence::{
    berezin_generic, berezin_pure, classify, dual, kernel_from_characteristic, random_generic,
    random_pure, symmetric_sw_pure, BerezinKind, Characteristic,
};
use su3kit::coupling::CoupledIndex;
use su3kit::json;
use su3kit::rep::enumerate_basis;
use su3kit::twisted::{twisted_constants, BasisFlavor};
use su3kit::IrrepLabel;

#[derive(Parser)]
#[command(
    name = "su3kit",
    about = "SU(3) representation tables, symbol correspondences and twisted products",
    version
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for every randomized quantity (sampling, random characteristics).
    #[arg(long, global = true, default_value_t = 20260808)]
    seed: u64,

    /// Monte-Carlo sample count where applicable.
    #[arg(long, global = true, default_value_t = 100_000)]
    samples: usize,

    /// Tolerance override for verification suites (0 keeps the per-check defaults).
    #[arg(long, global = true, default_value_t = 0.0)]
    tol: f64,

    /// Cache directory (falls back to $SU3KIT_CACHE, then the user cache dir).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CharKind {
    Berezin,
    BerezinLowest,
    Toeplitz,
    Sw,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension of Q(p,q).
    Dim { p: u32, q: u32 },
    /// Canonical Gelfand-Tsetlin basis of Q(p,q).
    Basis { p: u32, q: u32 },
    /// Clebsch-Gordan series of Q(p1,q1) ⊗ Q(p2,q2).
    Series { p1: u32, q1: u32, p2: u32, q2: u32 },
    /// Clebsch-Gordan coefficient table of Q(p1,q1) ⊗ Q(p2,q2).
    Cgc { p1: u32, q1: u32, p2: u32, q2: u32 },
    /// All nonzero Wigner product symbols of the operator algebra of Q(p,q).
    Wigner { p: u32, q: u32 },
    /// Operator kernel and characteristic data of a named correspondence.
    Kernel {
        p: u32,
        q: u32,
        #[arg(long, value_enum, default_value_t = CharKind::Berezin)]
        char: CharKind,
    },
    /// Classification flags of a named correspondence.
    Classify {
        p: u32,
        q: u32,
        #[arg(long, value_enum, default_value_t = CharKind::Berezin)]
        char: CharKind,
    },
    /// Twisted-product structure constants of a named correspondence.
    Twist {
        p: u32,
        q: u32,
        #[arg(long, value_enum, default_value_t = CharKind::Berezin)]
        char: CharKind,
    },
    /// Harmonic labels of one orbit class (projective requires a = b).
    Harmonics {
        #[arg(value_parser = ["cp2", "flag"])]
        kind: String,
        a: u32,
        b: u32,
    },
    /// Run a named verification suite; exits 1 on any failed check.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Degree bound used by the label sweeps of the suite.
        #[arg(long, default_value_t = 4)]
        max_weight: u32,
    },
}

fn named_characteristic(
    label: IrrepLabel,
    kind: CharKind,
    seed: u64,
) -> su3kit::Result<Characteristic> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok(match (kind, label.is_pure()) {
        (CharKind::Berezin, true) => Characteristic::Pure(berezin_pure(label)?),
        (CharKind::Berezin, false) => {
            Characteristic::Generic(berezin_generic(label, BerezinKind::Highest)?)
        }
        (CharKind::BerezinLowest, true) => {
            // the symmetric correspondences of pure labels come from one
            // projector each; the other extreme lives on the flag manifold
            Characteristic::Generic(berezin_generic(label, BerezinKind::Lowest)?)
        }
        (CharKind::BerezinLowest, false) => {
            Characteristic::Generic(berezin_generic(label, BerezinKind::Lowest)?)
        }
        (CharKind::Toeplitz, true) => {
            dual(&Characteristic::Pure(berezin_pure(label)?))?.characteristic
        }
        (CharKind::Toeplitz, false) => {
            dual(&Characteristic::Generic(berezin_generic(
                label,
                BerezinKind::Highest,
            )?))?
            .characteristic
        }
        (CharKind::Sw, true) => Characteristic::Pure(symmetric_sw_pure(label)?),
        (CharKind::Sw, false) => {
            return Err(su3kit::Error::InvalidCharacteristic(
                "the symmetric Stratonovich-Weyl numbers are defined for pure labels only".into(),
            ))
        }
        (CharKind::Random, true) => Characteristic::Pure(random_pure(label, &mut rng)?),
        (CharKind::Random, false) => Characteristic::Generic(random_generic(label, &mut rng)?),
    })
}

fn run(cli: &Cli) -> su3kit::Result<ExitCode> {
    let cache = cache::Cache::open(cli.cache_dir.as_deref(), false);
    match &cli.command {
        Command::Dim { p, q } => {
            println!("{}", IrrepLabel(*p, *q).dim());
        }
        Command::Basis { p, q } => {
            let basis = enumerate_basis(IrrepLabel(*p, *q));
            match cli.format {
                Format::Json => {
                    let items: Vec<String> = basis
                        .iter()
                        .map(|i| {
                            format!(
                                "{{\"nu\":[{},{},{}],\"twoJ\":{}}}",
                                i.nu[0], i.nu[1], i.nu[2], i.two_j
                            )
                        })
                        .collect();
                    println!("[{}]", items.join(","));
                }
                Format::Text => {
                    println!("{:>4} {:>12} {:>6}", "#", "nu", "2J");
                    for (k, i) in basis.iter().enumerate() {
                        println!(
                            "{k:>4} ({:>2},{:>2},{:>2}) {:>6}",
                            i.nu[0], i.nu[1], i.nu[2], i.two_j
                        );
                    }
                }
            }
        }
        Command::Series { p1, q1, p2, q2 } => {
            let s = su3kit::coupling::cg_series(IrrepLabel(*p1, *q1), IrrepLabel(*p2, *q2));
            match cli.format {
                Format::Json => {
                    let items: Vec<String> = s
                        .entries
                        .iter()
                        .map(|(c, m)| {
                            format!("{{\"class\":[{},{}],\"multiplicity\":{m}}}", c.p(), c.q())
                        })
                        .collect();
                    println!("[{}]", items.join(","));
                }
                Format::Text => {
                    for (c, m) in &s.entries {
                        println!("Q({},{}) x{m}", c.p(), c.q());
                    }
                }
            }
        }
        Command::Cgc { p1, q1, p2, q2 } => {
            let table = cache.cg_table(IrrepLabel(*p1, *q1), IrrepLabel(*p2, *q2))?;
            match cli.format {
                Format::Json => println!("{}", json::cg_table_to_json(&table)),
                Format::Text => {
                    for c in table.coupled_indices() {
                        for &(pair, v) in table.row(&c).unwrap() {
                            let (i1, i2) = table.pair_indices(pair);
                            println!(
                                "({},{});{} {:?} | {:?} {:?} -> {v:+.12}",
                                c.class.p(),
                                c.class.q(),
                                c.sigma,
                                c.idx,
                                i1,
                                i2
                            );
                        }
                    }
                }
            }
        }
        Command::Wigner { p, q } => {
            let label = IrrepLabel(*p, *q);
            let table = cache.cg_table(label, label.dual())?;
            let basis = table.coupled_indices();
            let mut rows = Vec::new();
            for l1 in &basis {
                for l2 in &basis {
                    for (mu, m) in
                        su3kit::wigner::product_coefficients_direct(label, l1, l2)?
                    {
                        // report as product symbols: third slot dualized
                        let a3 = mu.class.dual();
                        let idx3 = su3kit::rep::dual_index(mu.class, mu.idx)?;
                        let phase = if (label.degree() as i64 + idx3.two_v()) % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        };
                        rows.push(json::TripleRow {
                            a1: l1.class,
                            sigma1: l1.sigma,
                            idx1: l1.idx,
                            a2: l2.class,
                            sigma2: l2.sigma,
                            idx2: l2.idx,
                            a3,
                            sigma3: mu.sigma,
                            idx3,
                            value: phase * m,
                        });
                    }
                }
            }
            match cli.format {
                Format::Json => {
                    println!(
                        "{}",
                        json::triples_to_json(label, label.dual(), "productSymbols", &rows)
                    )
                }
                Format::Text => {
                    for r in &rows {
                        println!(
                            "[{} {:?} | {} {:?} | {} {:?}] = {:+.12}",
                            r.a1, r.idx1, r.a2, r.idx2, r.a3, r.idx3, r.value
                        );
                    }
                }
            }
        }
        Command::Kernel { p, q, char } => {
            let label = IrrepLabel(*p, *q);
            let c = named_characteristic(label, *char, cli.seed)?;
            let kernel = kernel_from_characteristic(&c)?;
            match cli.format {
                Format::Json => println!("{}", json::characteristic_to_json(&c, &kernel)),
                Format::Text => {
                    println!("label Q({},{})", label.p(), label.q());
                    for (class, m) in c.as_generic().blocks {
                        println!("class {class}:");
                        for i in 0..m.nrows() {
                            let row: Vec<String> = (0..m.ncols())
                                .map(|j| format!("{:+.9}{:+.9}i", m[[i, j]].re, m[[i, j]].im))
                                .collect();
                            println!("  [{}]", row.join(", "));
                        }
                    }
                }
            }
        }
        Command::Classify { p, q, char } => {
            let label = IrrepLabel(*p, *q);
            let c = named_characteristic(label, *char, cli.seed)?;
            let rep = classify(&c)?;
            match cli.format {
                Format::Json => {
                    let alphas = match &rep.semi_conformal {
                        None => "null".to_string(),
                        Some(map) => {
                            let items: Vec<String> = map
                                .iter()
                                .map(|(c, a)| {
                                    format!(
                                        "{{\"class\":[{},{}],\"alpha\":{}}}",
                                        c.p(),
                                        c.q(),
                                        json::fmt_f64(*a)
                                    )
                                })
                                .collect();
                            format!("[{}]", items.join(","))
                        }
                    };
                    println!(
                        "{{\"isSW\":{},\"isSemiConformal\":{},\"alphas\":{},\"isMappingPositive\":{},\"isPositiveDual\":{},\"kernelSmallestEigenvalue\":{}}}",
                        rep.is_stratonovich_weyl,
                        rep.semi_conformal.is_some(),
                        alphas,
                        rep.is_mapping_positive,
                        rep.is_positive_dual,
                        json::fmt_f64(rep.kernel_smallest_eigenvalue)
                    );
                }
                Format::Text => {
                    println!("stratonovich-weyl: {}", rep.is_stratonovich_weyl);
                    println!("semi-conformal:    {}", rep.semi_conformal.is_some());
                    println!("mapping-positive:  {}", rep.is_mapping_positive);
                    println!("positive-dual:     {}", rep.is_positive_dual);
                    println!(
                        "kernel min eigenvalue: {:+.12e}",
                        rep.kernel_smallest_eigenvalue
                    );
                }
            }
        }
        Command::Twist { p, q, char } => {
            let label = IrrepLabel(*p, *q);
            let c = named_characteristic(label, *char, cli.seed)?;
            let sc = twisted_constants(&c)?;
            let mut rows = Vec::new();
            for i in 0..sc.dim() {
                for j in 0..sc.dim() {
                    for k in 0..sc.dim() {
                        let v = sc.constant(i, j, k);
                        if v != 0.0 {
                            let (l1, l2, l3): (CoupledIndex, CoupledIndex, CoupledIndex) =
                                (sc.basis[i], sc.basis[j], sc.basis[k]);
                            rows.push(json::TripleRow {
                                a1: l1.class,
                                sigma1: l1.sigma,
                                idx1: l1.idx,
                                a2: l2.class,
                                sigma2: l2.sigma,
                                idx2: l2.idx,
                                a3: l3.class,
                                sigma3: l3.sigma,
                                idx3: l3.idx,
                                value: v,
                            });
                        }
                    }
                }
            }
            let flavor = match sc.flavor {
                BasisFlavor::PureHarmonic { .. } => "twistConstants",
                BasisFlavor::SymbolBasis => "twistConstants",
            };
            match cli.format {
                Format::Json => {
                    println!("{}", json::triples_to_json(label, label.dual(), flavor, &rows))
                }
                Format::Text => {
                    for r in &rows {
                        println!(
                            "[{} {:?} ; {} {:?}] -> {} {:?} = {:+.12}",
                            r.a1, r.idx1, r.a2, r.idx2, r.a3, r.idx3, r.value
                        );
                    }
                }
            }
        }
        Command::Harmonics { kind, a, b } => {
            let class = IrrepLabel(*a, *b);
            let orbit = if kind == "cp2" {
                su3kit::twisted::OrbitKind::CP2
            } else {
                su3kit::twisted::OrbitKind::Flag
            };
            let fixed = su3kit::correspondence::torus_fixed_indices(class);
            if fixed.is_empty() || (orbit == su3kit::twisted::OrbitKind::CP2 && *a != *b) {
                return Err(su3kit::Error::InvalidHarmonic(format!(
                    "class {class} carries no harmonics on that orbit"
                )));
            }
            let basis = enumerate_basis(class);
            match cli.format {
                Format::Json => {
                    let mut items = Vec::new();
                    for gamma in 1..=fixed.len() {
                        if orbit == su3kit::twisted::OrbitKind::CP2 && gamma > 1 {
                            break;
                        }
                        for idx in &basis {
                            items.push(format!(
                                "{{\"class\":[{},{}],\"gamma\":{gamma},\"nu\":[{},{},{}],\"twoJ\":{}}}",
                                class.p(), class.q(), idx.nu[0], idx.nu[1], idx.nu[2], idx.two_j
                            ));
                        }
                    }
                    println!("[{}]", items.join(","));
                }
                Format::Text => {
                    for gamma in 1..=fixed.len() {
                        if orbit == su3kit::twisted::OrbitKind::CP2 && gamma > 1 {
                            break;
                        }
                        for idx in &basis {
                            println!("class ({},{}) gamma {gamma} {idx:?}", class.p(), class.q());
                        }
                    }
                }
            }
        }
        Command::Verify { suite, max_weight } => {
            let reports =
                su3kit::verify::run_suite(suite, cli.seed, cli.samples, *max_weight)?;
            let reports: Vec<json::CheckReport> = reports
                .into_iter()
                .map(|mut r| {
                    if cli.tol > 0.0 {
                        r.tolerance = cli.tol;
                        r.pass = r.residual <= cli.tol;
                    }
                    r
                })
                .collect();
            match cli.format {
                Format::Json => println!("{}", json::reports_to_json(&reports)),
                Format::Text => {
                    for r in &reports {
                        println!(
                            "{} {:<55} residual {:.3e} (tol {:.1e})",
                            if r.pass { "PASS" } else { "FAIL" },
                            r.check,
                            r.residual,
                            r.tolerance
                        );
                    }
                }
            }
            if reports.iter().any(|r| !r.pass) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
