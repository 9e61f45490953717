//! The `hyspectra` command line.
//!
//! Exit codes: `0` success, `2` usage or input error, `3` resource budget
//! refusal, `4` a failed `verify` check. Diagnostics go to stderr as one line
//! prefixed `error[CODE]:`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use crate::budget::Budget;
use crate::chebyshev::AngleFraction;
use crate::eigenvectors::{
    eigenvector_gamma_prime, eigenvector_interior, eigenvector_top, keys_with_denominator, residual,
    stationary_vector, Eigenvector,
};
use crate::error::{Error, Result};
use crate::fmt::f64_17;
use crate::matrix::{AdjacencyMatrix, StructureFormat};
use crate::oracle::{charpoly_of, verify_lemma_recursions, LemmaStatus};
use crate::spectrum::{char_poly_factored, chebyshev_root_multiset, spectrum, spectrum_diff, SpectralKey, SpectrumTable};
use crate::staircase::{
    devils_staircase, jump_form, jump_size, left_limit_closed_form, limit_distribution, rational_to_f64, totient_sum,
    StaircaseArg, StaircaseMode, Value,
};
use crate::state::{parse_bits, MemoryState, Variant};
use crate::stochastic::{empirical_stationary, power_iteration_stationary, simulate_absorbing, WalkConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Gamma,
    GammaPrime,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Gamma => Variant::Gamma,
            VariantArg::GammaPrime => Variant::GammaPrime,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hyspectra", version, about = "Spectra and random walks of the discrete Preisach transition graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Number of memory elements.
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long, global = true, value_enum, default_value = "gamma")]
    variant: VariantArg,
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress informational messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CharpolyMethod {
    Closed,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StaircaseModeArg {
    Floor,
    Jump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EigClass {
    Interior,
    Top,
    TopPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StationaryMethod {
    Closed,
    Power,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Structure,
    Charpoly,
    Spectrum,
    Staircase,
    Eigenvectors,
    Stationary,
    Lemmas,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Vertices and edges of the transition graph.
    Graph,
    /// Sparse structure of the adjacency matrix.
    Matrix,
    /// Characteristic polynomial.
    Charpoly {
        #[arg(long, value_enum, default_value = "closed")]
        method: CharpolyMethod,
        /// Print the Chebyshev factorization instead of the expansion.
        #[arg(long)]
        factored: bool,
    },
    /// Exact eigenvalues with algebraic multiplicities.
    Spectrum,
    /// Empirical eigenvalue distribution against its limit.
    Dist {
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long, default_value_t = 60)]
        terms: u32,
    },
    /// The Devil's staircase function.
    Staircase {
        /// Argument, as `r/q` or a decimal.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, value_enum, default_value = "floor")]
        mode: StaircaseModeArg,
        #[arg(long, default_value_t = 60)]
        terms: u32,
        /// Print the totient sum up to this denominator instead.
        #[arg(long)]
        totient: Option<u64>,
    },
    /// An explicit eigenvector.
    Eigvec {
        /// Eigenvalue key `r/q` of `cos(πr/q)`.
        #[arg(long)]
        key: String,
        #[arg(long, value_enum)]
        class: Option<EigClass>,
        #[arg(long)]
        ell: Option<u32>,
        /// Prefix bitstring of length `N - ℓ - 2` (default all zeros).
        #[arg(long)]
        prefix: Option<String>,
    },
    /// Stationary distribution of the Γ′ chain.
    Stationary {
        #[arg(long, value_enum, default_value = "closed")]
        method: StationaryMethod,
        #[arg(long, default_value_t = 100)]
        replications: u64,
        #[arg(long, default_value_t = 10_000)]
        max_steps: u64,
    },
    /// Random walks: termination times on Γ, occupancy on Γ′.
    Simulate {
        #[arg(long, default_value_t = 1000)]
        replications: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
        /// Start state for the Γ walk (default all zeros).
        #[arg(long)]
        start: Option<String>,
        /// Burn-in for the Γ′ occupancy (default 10·2^N).
        #[arg(long)]
        burn_in: Option<u64>,
    },
    /// Run the built-in consistency checks.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
    },
}

/// Parses `argv` (including the program name) and runs it.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let first = e.to_string();
                    let line = first.lines().next().unwrap_or("invalid arguments");
                    let line = line.trim_start_matches("error: ");
                    let _ = writeln!(stderr, "error[usage]: {line}");
                    EXIT_USAGE
                }
            };
        }
    };
    let budget = match Budget::from_env() {
        Ok(b) => b,
        Err(e) => return report(stderr, &e),
    };
    match execute(&cli, &budget, stderr) {
        Ok((text, code)) => {
            let text = if text.ends_with('\n') || text.is_empty() { text } else { text + "\n" };
            let written = match &cli.out {
                Some(path) => std::fs::write(path, text.as_bytes()).map_err(|e| e.to_string()),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error[io]: {e}");
                return EXIT_USAGE;
            }
            code
        }
        Err(e) => report(stderr, &e),
    }
}

fn report(stderr: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(stderr, "error[{}]: {e}", e.code());
    match e {
        Error::Budget { .. } => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

fn need_n(cli: &Cli) -> Result<u32> {
    cli.n.ok_or_else(|| Error::Usage("--n is required".into()))
}

fn execute(cli: &Cli, budget: &Budget, stderr: &mut dyn Write) -> Result<(String, i32)> {
    let variant: Variant = cli.variant.into();
    let ok = |s: String| Ok((s, EXIT_OK));
    match &cli.command {
        Command::Graph => ok(graph(need_n(cli)?, variant, cli.format.unwrap_or(Format::Text), budget)?),
        Command::Matrix => ok(matrix(need_n(cli)?, variant, cli.format.unwrap_or(Format::Text), budget)?),
        Command::Charpoly { method, factored } => ok(charpoly(
            need_n(cli)?,
            variant,
            *method,
            *factored,
            cli.format.unwrap_or(Format::Text),
            budget,
        )?),
        Command::Spectrum => {
            let t = spectrum(need_n(cli)?, variant)?;
            ok(spectrum_output(&t, cli.format.unwrap_or(Format::Csv)))
        }
        Command::Dist { points, terms } => {
            let t = spectrum(need_n(cli)?, variant)?;
            let grid = GridSpec {
                points: *points,
                terms: *terms,
                ..GridSpec::default()
            };
            if grid.points < 2 {
                return Err(Error::Usage("--points must be at least 2".into()));
            }
            ok(dist_output(&dist_table(&t, &grid), cli.format.unwrap_or(Format::Csv)))
        }
        Command::Staircase { x, mode, terms, totient } => {
            ok(staircase(x.as_deref(), *mode, *terms, *totient, cli.format.unwrap_or(Format::Text))?)
        }
        Command::Eigvec { key, class, ell, prefix } => {
            let n = need_n(cli)?;
            let key: AngleFraction = key.parse()?;
            let v = build_eigvec(n, key, *class, *ell, prefix.as_deref())?;
            ok(eigvec_output(&v, cli.format.unwrap_or(Format::Json)))
        }
        Command::Stationary {
            method,
            replications,
            max_steps,
        } => {
            let n = need_n(cli)?;
            let (name, vector) = match method {
                StationaryMethod::Closed => ("closed", stationary_vector(n)?),
                StationaryMethod::Power => ("power", power_iteration_stationary(n, budget)?.vector),
                StationaryMethod::MonteCarlo => {
                    let cfg = WalkConfig {
                        n,
                        variant: Variant::GammaPrime,
                        seed: cli.seed,
                        max_steps: *max_steps,
                        replications: *replications,
                    };
                    ("monte-carlo", empirical_stationary(&cfg, None)?)
                }
            };
            ok(vector_output(n, name, &vector, cli.format.unwrap_or(Format::Csv), "probability"))
        }
        Command::Simulate {
            replications,
            max_steps,
            start,
            burn_in,
        } => {
            let n = need_n(cli)?;
            let cfg = WalkConfig {
                n,
                variant,
                seed: cli.seed,
                max_steps: *max_steps,
                replications: *replications,
            };
            match variant {
                Variant::Gamma => {
                    let start = match start {
                        Some(s) => s.parse::<MemoryState>()?,
                        None => MemoryState::zeros(n)?,
                    };
                    let s = simulate_absorbing(&cfg, start)?;
                    let summary = s.summary();
                    if !cli.quiet {
                        let _ = writeln!(
                            stderr,
                            "mean termination step {} over {} samples ({} censored)",
                            f64_17(summary.mean),
                            summary.count,
                            summary.censored_count
                        );
                    }
                    match cli.format.unwrap_or(Format::Json) {
                        Format::Csv => ok(s.to_csv()),
                        Format::Json => ok(pretty(&json!({
                            "n": n,
                            "start": start.to_string(),
                            "mean": f64_17(summary.mean),
                            "variance": f64_17(summary.variance),
                            "count": summary.count,
                            "censored_count": summary.censored_count,
                            "seed": summary.seed,
                        }))),
                        Format::Text => ok(format!(
                            "mean {}\nvariance {}\ncount {}\ncensored {}\nseed {}",
                            f64_17(summary.mean),
                            f64_17(summary.variance),
                            summary.count,
                            summary.censored_count,
                            summary.seed
                        )),
                    }
                }
                Variant::GammaPrime => {
                    let v = empirical_stationary(&cfg, *burn_in)?;
                    ok(vector_output(n, "monte-carlo", &v, cli.format.unwrap_or(Format::Csv), "frequency"))
                }
            }
        }
        Command::Verify { suite, n_max } => {
            let checks = verify(*suite, *n_max, budget, if cli.quiet { None } else { Some(stderr) })?;
            let failed = checks.iter().filter(|c| !c.pass).count();
            let text = match cli.format.unwrap_or(Format::Text) {
                Format::Json => pretty(&serde_json::to_value(&checks).expect("serializable")),
                Format::Csv => {
                    let mut s = String::from("# schema: hyspectra.verify.v1\nsuite,check,n,status,detail\n");
                    for c in &checks {
                        let _ = writeln!(s, "{},{},{},{},{}", c.suite, c.check, c.n, status(c.pass), c.detail.replace(',', ";"));
                    }
                    s
                }
                Format::Text => {
                    let mut s = String::new();
                    for c in &checks {
                        let _ = writeln!(s, "{} {}/{} n={} {}", status(c.pass), c.suite, c.check, c.n, c.detail);
                    }
                    let _ = write!(s, "{} checks, {} failed", checks.len(), failed);
                    s
                }
            };
            Ok((text, if failed == 0 { EXIT_OK } else { EXIT_VERIFY }))
        }
    }
}

fn status(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn graph(n: u32, variant: Variant, format: Format, budget: &Budget) -> Result<String> {
    let a = AdjacencyMatrix::build_recursive(n, variant, budget)?;
    let edges = a.export_structure(StructureFormat::EdgeList);
    Ok(match format {
        Format::Text => edges,
        Format::Csv => {
            let mut s = String::from("# schema: hyspectra.graph.v1\nsource,target\n");
            for line in edges.lines() {
                s.push_str(&line.replace(' ', ","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let vertices: Vec<String> = MemoryState::all(n)?.map(|s| s.to_string()).collect();
            let edges: Vec<Vec<&str>> = edges.lines().map(|l| l.split(' ').collect()).collect();
            pretty(&json!({"n": n, "variant": variant, "vertices": vertices, "edges": edges}))
        }
    })
}

fn matrix(n: u32, variant: Variant, format: Format, budget: &Budget) -> Result<String> {
    let a = AdjacencyMatrix::build_recursive(n, variant, budget)?;
    Ok(match format {
        Format::Text => a.export_structure(StructureFormat::CoordinateList),
        Format::Csv => {
            let mut s = String::from("# schema: hyspectra.matrix.v1\nrow,col\n");
            for line in a.export_structure(StructureFormat::CoordinateList).lines() {
                s.push_str(&line.replace(' ', ","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let entries: Vec<[u32; 2]> = a.entries().iter().map(|&(r, c)| [r + 1, c + 1]).collect();
            let mut v = serde_json::to_value(a.metadata()).expect("serializable");
            v["entries"] = json!(entries);
            pretty(&v)
        }
    })
}

fn charpoly(
    n: u32,
    variant: Variant,
    method: CharpolyMethod,
    factored: bool,
    format: Format,
    budget: &Budget,
) -> Result<String> {
    let f = char_poly_factored(n, variant)?;
    if factored {
        return Ok(match format {
            Format::Json => pretty(&serde_json::to_value(&f).expect("serializable")),
            _ => f.to_text(),
        });
    }
    let poly = match method {
        CharpolyMethod::Closed => f.expand(budget)?,
        CharpolyMethod::Oracle => charpoly_of(&AdjacencyMatrix::build_recursive(n, variant, budget)?, budget)?,
        CharpolyMethod::Both => {
            let closed = f.expand(budget)?;
            let oracle = charpoly_of(&AdjacencyMatrix::build_recursive(n, variant, budget)?, budget)?;
            if closed != oracle {
                return Err(Error::Precondition(format!(
                    "closed form and oracle disagree at N = {n}: {closed} vs {oracle}"
                )));
            }
            closed
        }
    };
    Ok(match format {
        Format::Text => poly.to_string(),
        Format::Json => pretty(&json!({"n": n, "variant": variant, "coefficients": poly})),
        Format::Csv => {
            let mut s = String::from("# schema: hyspectra.charpoly.v1\ndegree,coefficient\n");
            for (i, c) in poly.coeffs().iter().enumerate() {
                let _ = writeln!(s, "{i},{c}");
            }
            s
        }
    })
}

fn spectrum_output(t: &SpectrumTable, format: Format) -> String {
    match format {
        Format::Csv => t.to_csv(),
        Format::Json => {
            let rows: Vec<serde_json::Value> = t
                .rows()
                .into_iter()
                .map(|r| json!({"r": r.r, "q": r.q, "eigenvalue_float": f64_17(r.eigenvalue_float), "multiplicity": r.multiplicity}))
                .collect();
            pretty(&json!({"n": t.n, "variant": t.variant, "entries": rows}))
        }
        Format::Text => {
            let mut s = String::new();
            for r in t.rows() {
                let key = if r.q == 1 { "1".to_string() } else { format!("{}/{}", r.r, r.q) };
                let _ = writeln!(s, "{key}\t{}\t{}", f64_17(r.eigenvalue_float), r.multiplicity);
            }
            s
        }
    }
}

/// Grid for comparing `F_N` with its limit.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Equally spaced points on `[-1, 1]`, endpoints included.
    pub points: usize,
    /// Rows with `arccos(x)/π` within `guard_width` of a reduced `r/q`,
    /// `q ≤ guard_q`, are flagged.
    pub guard_q: u64,
    pub guard_width: f64,
    /// Floor-series terms for the limit.
    pub terms: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: 512,
            guard_q: 12,
            guard_width: 1e-3,
            terms: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistRow {
    pub x: f64,
    pub f_n: f64,
    pub f_limit: f64,
    pub diff: f64,
    /// Inside a guard band about a low-denominator jump, or within
    /// rounding distance of an eigenvalue.
    pub flagged: bool,
}

pub fn dist_table(t: &SpectrumTable, grid: &GridSpec) -> Vec<DistRow> {
    let guards: Vec<f64> = (2..=grid.guard_q)
        .flat_map(keys_with_denominator)
        .map(|a| a.turn())
        .collect();
    (0..grid.points)
        .map(|i| {
            let x = if i + 1 == grid.points {
                1.0
            } else {
                -1.0 + 2.0 * i as f64 / (grid.points - 1) as f64
            };
            let d = t.distribution(x);
            let f_n = rational_to_f64(&d.value);
            let f_limit = limit_distribution(x, grid.terms).value;
            let tt = x.clamp(-1.0, 1.0).acos() / std::f64::consts::PI;
            let guarded = guards.iter().any(|g| (tt - g).abs() < grid.guard_width);
            DistRow {
                x,
                f_n,
                f_limit,
                diff: (f_n - f_limit).abs(),
                flagged: guarded || d.ambiguous,
            }
        })
        .collect()
}

pub fn dist_to_csv(rows: &[DistRow]) -> String {
    let mut s = String::from("# schema: hyspectra.dist.v1\nx,F_N,F_limit,diff,flagged\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", f64_17(r.x), f64_17(r.f_n), f64_17(r.f_limit), f64_17(r.diff), r.flagged);
    }
    s
}

fn dist_output(rows: &[DistRow], format: Format) -> String {
    match format {
        Format::Csv => dist_to_csv(rows),
        Format::Json => {
            let v: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    json!({"x": f64_17(r.x), "F_N": f64_17(r.f_n), "F_limit": f64_17(r.f_limit), "diff": f64_17(r.diff), "flagged": r.flagged})
                })
                .collect();
            pretty(&json!(v))
        }
        Format::Text => {
            let max = rows.iter().filter(|r| !r.flagged).map(|r| r.diff).fold(0.0, f64::max);
            let flagged = rows.iter().filter(|r| r.flagged).count();
            format!("points {}\nflagged {}\nmax_diff {}", rows.len(), flagged, f64_17(max))
        }
    }
}

fn parse_staircase_arg(s: &str) -> Result<StaircaseArg> {
    if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a.trim().parse().map_err(|_| Error::Usage(format!("bad rational {s:?}")))?;
        let b: i64 = b.trim().parse().map_err(|_| Error::Usage(format!("bad rational {s:?}")))?;
        if b <= 0 {
            return Err(Error::Usage(format!("bad rational {s:?}")));
        }
        return Ok(StaircaseArg::Exact(Ratio::new(a, b)));
    }
    if let Ok(i) = s.parse::<i64>() {
        return Ok(StaircaseArg::Exact(Ratio::from_integer(i)));
    }
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .map(StaircaseArg::Float)
        .ok_or_else(|| Error::Usage(format!("bad staircase argument {s:?}")))
}

fn staircase(x: Option<&str>, mode: StaircaseModeArg, terms: u32, totient: Option<u64>, format: Format) -> Result<String> {
    if let Some(q) = totient {
        let s = totient_sum(q)?;
        return Ok(match format {
            Format::Json => pretty(&json!({"totient_sum_to": q, "exact": s.to_string(), "float": f64_17(rational_to_f64(&s))})),
            _ => format!("{s}\n{}", f64_17(rational_to_f64(&s))),
        });
    }
    let x = x.ok_or_else(|| Error::Usage("--x or --totient is required".into()))?;
    let arg = parse_staircase_arg(x)?;
    let mode = match mode {
        StaircaseModeArg::Floor => {
            if terms == 0 {
                return Err(Error::Usage("--terms must be ≥ 1".into()));
            }
            StaircaseMode::FloorSeries(terms)
        }
        StaircaseModeArg::Jump => StaircaseMode::JumpForm,
    };
    let v = devils_staircase(&arg, mode)?;
    let exact = match &v.value {
        Value::Exact(r) => Some(r.to_string()),
        Value::Float(_) => None,
    };
    Ok(match format {
        Format::Json => pretty(&json!({
            "x": x,
            "exact": exact,
            "float": f64_17(v.value.to_f64()),
            "error_bound": f64_17(v.error_bound),
        })),
        Format::Csv => format!(
            "# schema: hyspectra.staircase.v1\nx,exact,float,error_bound\n{x},{},{},{}",
            exact.unwrap_or_default(),
            f64_17(v.value.to_f64()),
            f64_17(v.error_bound)
        ),
        Format::Text => match exact {
            Some(e) => format!("{e}\n{} ± {}", f64_17(v.value.to_f64()), f64_17(v.error_bound)),
            None => format!("{} ± {}", f64_17(v.value.to_f64()), f64_17(v.error_bound)),
        },
    })
}

fn build_eigvec(n: u32, key: AngleFraction, class: Option<EigClass>, ell: Option<u32>, prefix: Option<&str>) -> Result<Eigenvector> {
    let class = class.unwrap_or(if ell.is_some() { EigClass::Interior } else { EigClass::Top });
    match class {
        EigClass::Top => eigenvector_top(n, key),
        EigClass::TopPrime => eigenvector_gamma_prime(n, key),
        EigClass::Interior => {
            let ell = match ell {
                Some(l) => l,
                None => key
                    .q()
                    .checked_sub(2)
                    .and_then(|l| u32::try_from(l).ok())
                    .ok_or_else(|| Error::Usage("cannot infer ℓ".into()))?,
            };
            let plen = n.checked_sub(ell + 2).ok_or_else(|| {
                Error::Precondition(format!("need ℓ ≤ N - 2, got ℓ = {ell}, N = {n}"))
            })?;
            let bits = match prefix {
                Some(p) => parse_bits(p)?,
                None => vec![0; plen as usize],
            };
            eigenvector_interior(n, ell, key, &bits)
        }
    }
}

fn eigvec_output(v: &Eigenvector, format: Format) -> String {
    match format {
        Format::Json => pretty(&v.to_json()),
        Format::Csv | Format::Text => {
            let values = v.values();
            let mut s = if format == Format::Csv {
                String::from("# schema: hyspectra.eigvec.v1\nstate,sign,u_indices_num,u_indices_den,float\n")
            } else {
                String::new()
            };
            let join = |xs: &[usize]| xs.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
            for (i, c) in v.coefficients.iter().enumerate() {
                let st = MemoryState::from_index(v.n, i as u64).expect("index in range");
                if format == Format::Csv {
                    let _ = writeln!(s, "{st},{},{},{},{}", c.sign, join(&c.num), join(&c.den), f64_17(values[i]));
                } else {
                    let _ = writeln!(s, "{st} {}", f64_17(values[i]));
                }
            }
            s
        }
    }
}

fn vector_output(n: u32, method: &str, v: &[f64], format: Format, column: &str) -> String {
    match format {
        Format::Json => {
            let vals: Vec<String> = v.iter().map(|x| f64_17(*x)).collect();
            pretty(&json!({"n": n, "method": method, "vector": vals}))
        }
        Format::Csv | Format::Text => {
            let mut s = if format == Format::Csv {
                format!("# schema: hyspectra.stationary.v1\nstate,{column}\n")
            } else {
                String::new()
            };
            let sep = if format == Format::Csv { ',' } else { ' ' };
            for (i, x) in v.iter().enumerate() {
                let st = MemoryState::from_index(n, i as u64).expect("index in range");
                let _ = writeln!(s, "{st}{sep}{}", f64_17(*x));
            }
            s
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct VerifyCheck {
    pub suite: &'static str,
    pub check: &'static str,
    pub n: u32,
    pub pass: bool,
    pub detail: String,
}

fn vc(suite: &'static str, check: &'static str, n: u32, pass: bool, detail: String) -> VerifyCheck {
    VerifyCheck {
        suite,
        check,
        n,
        pass,
        detail,
    }
}

/// The built-in consistency checks up to `n_max`.
pub fn verify(suite: Suite, n_max: u32, budget: &Budget, mut progress: Option<&mut dyn Write>) -> Result<Vec<VerifyCheck>> {
    let want = |s: Suite| suite == Suite::All || suite == s;
    let mut out = Vec::new();
    let mut note = |msg: &str| {
        if let Some(p) = progress.as_mut() {
            let _ = writeln!(p, "verifying {msg}");
        }
    };
    if want(Suite::Structure) {
        note("structure");
        for n in 1..=n_max.min(12) {
            for v in [Variant::Gamma, Variant::GammaPrime] {
                let a = AdjacencyMatrix::build_recursive(n, v, budget)?;
                let b = AdjacencyMatrix::build_from_rules(n, v, budget)?;
                out.push(vc("structure", "recursive-equals-rules", n, a == b, v.to_string()));
            }
        }
    }
    if want(Suite::Charpoly) {
        note("characteristic polynomials");
        for n in 1..=n_max.min(8) {
            for v in [Variant::Gamma, Variant::GammaPrime] {
                let closed = char_poly_factored(n, v)?.expand(budget)?;
                let oracle = charpoly_of(&AdjacencyMatrix::build_recursive(n, v, budget)?, budget)?;
                out.push(vc("charpoly", "closed-equals-oracle", n, closed == oracle, v.to_string()));
            }
        }
    }
    if want(Suite::Spectrum) {
        note("spectra");
        for n in 1..=n_max.max(20) {
            for v in [Variant::Gamma, Variant::GammaPrime] {
                let t = spectrum(n, v)?;
                let ok = t.total_multiplicity() == BigUint::one() << n;
                out.push(vc("spectrum", "multiplicity-sum", n, ok, v.to_string()));
            }
        }
        for n in 1..=n_max.max(12) {
            let (removed, added) = spectrum_diff(&spectrum(n, Variant::Gamma)?, &spectrum(n, Variant::GammaPrime)?);
            let mut want_added = chebyshev_root_multiset(u64::from(n));
            want_added.push((SpectralKey::Unit, BigUint::one()));
            let want_removed = chebyshev_root_multiset(u64::from(n) + 1);
            let ok = net_change(&removed, &added) == net_change(&want_removed, &want_added);
            out.push(vc("spectrum", "gamma-prime-diff", n, ok, String::new()));
        }
    }
    if want(Suite::Staircase) {
        note("staircase");
        for q in 2..=12u64 {
            for a in keys_with_denominator(q) {
                let exact = jump_form(a.r(), a.q());
                let fl = devils_staircase(&StaircaseArg::Float(a.turn()), StaircaseMode::FloorSeries(60))?;
                let err = (rational_to_f64(&exact) - fl.value.to_f64()).abs();
                // a float x rounded below r/q may land on the left limit
                let left = rational_to_f64(&left_limit_closed_form(a.r(), a.q()));
                let err_left = (left - fl.value.to_f64()).abs();
                let ok = err.min(err_left) <= fl.error_bound + 1e-15;
                out.push(vc("staircase", "jump-vs-floor", q as u32, ok, a.to_string()));
                let jump = &exact - left_limit_closed_form(a.r(), a.q()) == jump_size(q);
                out.push(vc("staircase", "jump-size", q as u32, jump, a.to_string()));
            }
        }
        let s = rational_to_f64(&totient_sum(40)?);
        out.push(vc("staircase", "totient-sum", 40, (1.0 - s).abs() <= 1e-10, f64_17(s)));
    }
    if want(Suite::Eigenvectors) {
        note("eigenvectors");
        for n in 2..=n_max.min(8) {
            let a = AdjacencyMatrix::build_recursive(n, Variant::Gamma, budget)?;
            let mut worst = 0.0f64;
            for ell in 0..=n - 2 {
                for k in keys_with_denominator(u64::from(ell) + 2) {
                    let plen = (n - ell - 2) as usize;
                    for p in 0..(1usize << plen) {
                        let bits: Vec<u8> = (0..plen).rev().map(|i| ((p >> i) & 1) as u8).collect();
                        let v = eigenvector_interior(n, ell, k, &bits)?;
                        worst = worst.max(residual(&v.values(), &a, k.cos())?);
                    }
                }
            }
            for k in keys_with_denominator(u64::from(n) + 2) {
                let v = eigenvector_top(n, k)?;
                worst = worst.max(residual(&v.values(), &a, k.cos())?);
            }
            out.push(vc("eigenvectors", "residual", n, worst <= 1e-10, f64_17(worst)));
        }
    }
    if want(Suite::Stationary) {
        note("stationary distribution");
        for n in 1..=n_max.min(12) {
            let c = stationary_vector(n)?;
            let p = power_iteration_stationary(n, budget)?;
            let d = c.iter().zip(&p.vector).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            out.push(vc("stationary", "closed-vs-power", n, d <= 1e-12, f64_17(d)));
        }
    }
    if want(Suite::Lemmas) {
        note("lemma identities");
        let k_max = budget.max_minor_k.saturating_sub(1).min(5);
        for c in verify_lemma_recursions(k_max, 50, budget)? {
            out.push(vc("lemmas", c.identity, c.k, c.status == LemmaStatus::Pass, c.witness.unwrap_or_default()));
        }
    }
    Ok(out)
}

fn net_change(removed: &[(SpectralKey, BigUint)], added: &[(SpectralKey, BigUint)]) -> Vec<(SpectralKey, i64)> {
    let mut m = std::collections::BTreeMap::new();
    for (k, v) in removed {
        *m.entry(*k).or_insert(0i64) -= v.to_i64().unwrap_or(i64::MAX);
    }
    for (k, v) in added {
        *m.entry(*k).or_insert(0i64) += v.to_i64().unwrap_or(i64::MAX);
    }
    m.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}
