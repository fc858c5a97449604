//! Command-line front end: argument parsing, input resolution, dispatch,
//! and report rendering.
//!
//! Every command emits a report either as human-readable text (default) or
//! as machine-readable JSON with a schema that is stable across releases
//! and bit-identical across thread counts. Exit codes separate validation
//! failures (2: unreadable or malformed input, bad parameters) from
//! computation failures (3: empty convergence domain, non-convergent
//! integral).

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cmrep_core::mellin::{analyticity_strip, delta_witness, leading_power, CmMode, CmRep, StripBound};
use cmrep_core::poles::{scan_poles, strip_is_clear, PoleOrigin};
use cmrep_core::poly::{hu_gw, hu_lsz, hv_imag_gw, hv_real_gw, symanzik_u, symanzik_v};
use cmrep_core::poly::{PolynomialSum, RibbonData, RibbonModel};
use cmrep_core::rat::{self, Rat};
use cmrep_core::CoreError;
use cmrep_core::graph::FeynmanGraph;
use num_complex::Complex64;
use num_traits::One;
use serde::Serialize;

use crate::fixtures;
use crate::formats::{CmFile, FormatError, GraphFile, RibbonFile};
use crate::numerics::{
    beta_massive, beta_std, eval_cm_contour, eval_parametric_commutative, eval_parametric_nc,
    heaviside_lemma_check, EvalResult, LemmaCheck, NumericsError, QuadratureSpec, TestFn,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;

const DEFAULT_TRUNCATION: f64 = 12.0;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, bad flag values.
    Validation(String),
    /// The requested quantity does not exist or cannot be computed.
    Computation(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Computation(_) => EXIT_COMPUTATION,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Computation(m) => m,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::Infeasible(_) | NumericsError::NonConvergent(_) => {
                CliError::Computation(e.to_string())
            }
            NumericsError::BadArgument(_) | NumericsError::Core(_) => {
                CliError::Validation(e.to_string())
            }
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cmrep",
    version,
    about = "Complete Mellin representations of Feynman amplitudes",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    verb: Verb,

    /// Report rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Write the report to this file instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Worker threads for quadrature and sampling; never changes results.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Plain text for reading.
    Human,
    /// JSON with a stable schema, bit-identical across thread counts.
    Machine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Mellin-Barnes contour integral of the representation.
    Contour,
    /// Direct integral over the line parameters.
    Parametric,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TestFunction {
    /// Shifted Gaussian, supported on the whole half-line.
    Gaussian,
    /// Smooth compactly supported bump on (1, 2).
    Bump,
}

/// Exactly one input source. A value is tried first as a filesystem path,
/// then as the name of a bundled fixture.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Scalar multigraph file (or bundled fixture name).
    #[arg(long, value_name = "FILE")]
    graph: Option<String>,

    /// Ribbon-graph data file (or bundled fixture name).
    #[arg(long, value_name = "FILE")]
    ribbon: Option<String>,

    /// Previously exported representation file (or bundled fixture name).
    #[arg(long, value_name = "FILE")]
    cm: Option<String>,
}

#[derive(Subcommand)]
enum Verb {
    /// Print the integrand polynomials of the input.
    Polys {
        #[command(flatten)]
        input: InputArgs,
    },

    /// Export the complete Mellin representation as a TOML document.
    ///
    /// The document can be fed back to any command through --cm.
    Cm {
        #[command(flatten)]
        input: InputArgs,
    },

    /// Decide whether a convergence contour exists at a fixed dimension.
    Domain {
        #[command(flatten)]
        input: InputArgs,

        /// Dimension, as an exact rational.
        #[arg(long = "D", value_name = "p/q")]
        dim: String,
    },

    /// Exact upper end of the dimensional analyticity interval (0, D_max).
    Strip {
        #[command(flatten)]
        input: InputArgs,
    },

    /// Enumerate dimensional pole candidates inside a window.
    Poles {
        #[command(flatten)]
        input: InputArgs,

        /// Highest Gamma-pole order offset to scan.
        #[arg(long, default_value_t = 2)]
        n_cutoff: u32,

        /// Dimension window "lo,hi", exact rationals.
        #[arg(long, value_name = "lo,hi", default_value = "-10,10", allow_hyphen_values = true)]
        window: String,
    },

    /// Numerically evaluate the amplitude at a fixed dimension.
    Eval {
        #[command(flatten)]
        input: InputArgs,

        /// Dimension, as an exact rational.
        #[arg(long = "D", value_name = "p/q")]
        dim: String,

        /// Contour truncation half-width; defaults to the value recorded
        /// for the bundled fixture, else 12.
        #[arg(long, value_name = "T")]
        truncation: Option<f64>,

        /// Target tolerance passed to the quadrature.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,

        /// Seed for stochastic sampling schemes.
        #[arg(long, default_value_t = 1)]
        seed: u64,

        /// Invariant value "symbol=p/q"; repeatable. Unset symbols
        /// default to 1.
        #[arg(long = "set", value_name = "sym=p/q")]
        set: Vec<String>,

        /// Evaluation route.
        #[arg(long, value_enum, default_value_t = Method::Contour)]
        method: Method,
    },

    /// Upper bound on the power of a common rescaling of the invariants.
    LeadingPower {
        #[command(flatten)]
        input: InputArgs,

        /// Dimension, as an exact rational.
        #[arg(long = "D", value_name = "p/q")]
        dim: String,

        /// Rescaling weight "symbol=p/q"; repeatable. Unnamed symbols
        /// weigh 0.
        #[arg(long = "scale", value_name = "sym=p/q")]
        scale: Vec<String>,
    },

    /// Convergence study of the truncated half-line Mellin inversion
    /// against a smeared step function.
    VerifyAppendixA {
        /// Largest truncation half-width; the study runs at T/4, T/2,
        /// 3T/4 and T.
        #[arg(long, value_name = "T", default_value_t = 16.0)]
        truncation: f64,

        /// Mellin line real part, an exact rational strictly in (-1, 0).
        #[arg(long, value_name = "p/q", default_value = "-1/2", allow_hyphen_values = true)]
        s: String,

        /// Smearing test function.
        #[arg(long, value_enum, default_value_t = TestFunction::Gaussian)]
        test_function: TestFunction,
    },

    /// Check the massive hyperbolic line-factor integral against its
    /// massless Gamma-function form.
    VerifyAppendixB {
        /// Line exponent, an exact rational.
        #[arg(long, value_name = "p/q")]
        phi: String,

        /// Dimension, as an exact rational.
        #[arg(long = "D", value_name = "p/q")]
        dim: String,

        /// Squared mass, an exact rational (non-negative).
        #[arg(long, value_name = "p/q")]
        m2: String,
    },
}

/// A resolved input: the echo string used in reports plus the loaded data.
enum LoadedInput {
    Graph {
        echo: String,
        graph: FeynmanGraph,
    },
    Ribbon {
        echo: String,
        ribbon: RibbonData,
        externals: Vec<Rat>,
    },
    Rep {
        echo: String,
        rep: CmRep,
    },
}

impl LoadedInput {
    fn echo(&self) -> &str {
        match self {
            LoadedInput::Graph { echo, .. }
            | LoadedInput::Ribbon { echo, .. }
            | LoadedInput::Rep { echo, .. } => echo,
        }
    }

    fn rep(&self) -> Result<CmRep, CliError> {
        match self {
            LoadedInput::Graph { graph, .. } => Ok(CmRep::commutative(graph)?),
            LoadedInput::Ribbon {
                ribbon, externals, ..
            } => Ok(CmRep::noncommutative(ribbon, externals)?),
            LoadedInput::Rep { rep, .. } => Ok(rep.clone()),
        }
    }
}

/// Text of a named input: the file at `arg` if one exists, else the
/// bundled fixture of that name and kind.
fn resolve_text(
    arg: &str,
    kind: fixtures::FixtureKind,
    flag: &str,
) -> Result<String, CliError> {
    if Path::new(arg).is_file() {
        return std::fs::read_to_string(arg).map_err(|e| {
            CliError::Validation(format!("{arg}: {e}"))
        });
    }
    match fixtures::bundled(arg) {
        Some(f) if f.kind == kind => Ok(String::from(f.text)),
        Some(f) => Err(CliError::Validation(format!(
            "bundled fixture {arg:?} is a --{} input, not --{flag}",
            match f.kind {
                fixtures::FixtureKind::Graph => "graph",
                fixtures::FixtureKind::Ribbon => "ribbon",
            }
        ))),
        None => Err(CliError::Validation(format!(
            "{arg:?} is neither a readable file nor a bundled fixture \
             (bundled: {})",
            fixtures::names().join(", ")
        ))),
    }
}

fn load_input(input: &InputArgs) -> Result<LoadedInput, CliError> {
    if let Some(arg) = &input.graph {
        let text = resolve_text(arg, fixtures::FixtureKind::Graph, "graph")?;
        let graph = GraphFile::parse(&text, arg)?.to_graph()?;
        return Ok(LoadedInput::Graph {
            echo: arg.clone(),
            graph,
        });
    }
    if let Some(arg) = &input.ribbon {
        let text = resolve_text(arg, fixtures::FixtureKind::Ribbon, "ribbon")?;
        let (ribbon, externals) = RibbonFile::parse(&text, arg)?.to_ribbon()?;
        return Ok(LoadedInput::Ribbon {
            echo: arg.clone(),
            ribbon,
            externals,
        });
    }
    let arg = input.cm.as_ref().expect("clap group guarantees one input");
    if !Path::new(arg).is_file() {
        return Err(CliError::Validation(format!(
            "{arg}: no such file (--cm takes a representation exported by the cm command)"
        )));
    }
    let text = std::fs::read_to_string(arg)
        .map_err(|e| CliError::Validation(format!("{arg}: {e}")))?;
    let rep = CmFile::parse(&text, arg)?.to_rep()?;
    Ok(LoadedInput::Rep {
        echo: arg.clone(),
        rep,
    })
}

fn parse_rat_flag(text: &str, flag: &str) -> Result<Rat, CliError> {
    rat::from_text(text)
        .map_err(|_| CliError::Validation(format!("--{flag}: bad rational literal {text:?}")))
}

/// Parse one "symbol=p/q" binding.
fn parse_binding(text: &str, flag: &str) -> Result<(String, Rat), CliError> {
    let Some((name, value)) = text.split_once('=') else {
        return Err(CliError::Validation(format!(
            "--{flag} {text:?}: expected symbol=p/q"
        )));
    };
    if name.is_empty() {
        return Err(CliError::Validation(format!(
            "--{flag} {text:?}: empty symbol name"
        )));
    }
    let v = rat::from_text(value).map_err(|_| {
        CliError::Validation(format!("--{flag} {name}: bad rational literal {value:?}"))
    })?;
    Ok((String::from(name), v))
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Machine-readable envelope; the variant tag is the verb name.
#[derive(Serialize)]
#[serde(tag = "verb", rename_all = "kebab-case")]
enum Report {
    Polys(PolysReport),
    Domain(DomainReport),
    Strip(StripReport),
    Poles(PolesReport),
    Eval(EvalReport),
    LeadingPower(LeadingPowerReport),
    VerifyAppendixA(LemmaReport),
    VerifyAppendixB(BetaReport),
}

#[derive(Serialize)]
struct TermReport {
    coeff: String,
    exponents: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    symbol: Option<String>,
}

#[derive(Serialize)]
struct PolyReport {
    name: String,
    rendered: String,
    terms: Vec<TermReport>,
}

#[derive(Serialize)]
struct PolysReport {
    input: String,
    mode: String,
    num_lines: usize,
    variables: Vec<String>,
    polynomials: Vec<PolyReport>,
}

#[derive(Serialize)]
struct WitnessReport {
    /// "name=p/q" per contour variable.
    coords: Vec<String>,
    /// Uniform margin by which the witness clears every strict constraint.
    slack: String,
}

#[derive(Serialize)]
struct DomainReport {
    input: String,
    dim: String,
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessReport>,
}

#[derive(Serialize)]
struct StripReport {
    input: String,
    lower: String,
    bounded: bool,
    /// Present exactly when `bounded`.
    #[serde(skip_serializing_if = "Option::is_none")]
    upper: Option<String>,
}

#[derive(Serialize)]
struct CandidateReport {
    dim: String,
    origin: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    conditions: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_index: Option<u32>,
}

#[derive(Serialize)]
struct PolesReport {
    input: String,
    n_cutoff: u32,
    window: [String; 2],
    candidates: Vec<CandidateReport>,
    /// No candidate falls inside the open interval (0, 2).
    strip_clear: bool,
}

#[derive(Serialize)]
struct EvalReport {
    input: String,
    dim: String,
    /// Effective "symbol=p/q" invariant values, sorted by symbol.
    assignments: Vec<String>,
    result: EvalResult,
}

#[derive(Serialize)]
struct LeadingPowerReport {
    input: String,
    dim: String,
    /// "symbol=p/q" rescaling weights, sorted by symbol.
    weights: Vec<String>,
    /// Exact supremum of the weighted contour real parts: under s_k ->
    /// lambda^{a_k} s_k the amplitude is O(lambda^bound) for small lambda.
    bound: String,
}

#[derive(Serialize)]
struct LemmaReport {
    test_function: String,
    s: String,
    rows: Vec<LemmaCheck>,
    /// Deviations never increase along the truncation grid.
    monotone_nonincreasing: bool,
}

#[derive(Serialize)]
struct BetaReport {
    phi: String,
    dim: String,
    m2: String,
    /// Massless closed form: Gamma(phi/2) Gamma(D/2) / (2 Gamma((phi+D)/2)).
    beta: f64,
    /// Massive integral, by quadrature.
    beta_massive: f64,
    difference: f64,
}

// ---------------------------------------------------------------------------
// Polynomial rendering
// ---------------------------------------------------------------------------

fn var_prefix(mode: CmMode) -> &'static str {
    match mode {
        CmMode::Commutative => "a",
        CmMode::NonCommutative => "t",
    }
}

fn render_term(coeff: &Rat, symbol: Option<&str>, exponents: &[u8], prefix: &str) -> String {
    let mut factors: Vec<String> = Vec::new();
    if let Some(sym) = symbol {
        factors.push(String::from(sym));
    }
    for (i, &e) in exponents.iter().enumerate() {
        match e {
            0 => {}
            1 => factors.push(format!("{prefix}{}", i + 1)),
            _ => factors.push(format!("{prefix}{}^{e}", i + 1)),
        }
    }
    let c = rat::to_text(coeff);
    if factors.is_empty() {
        c
    } else if c == "1" {
        factors.join("*")
    } else if c == "-1" {
        format!("-{}", factors.join("*"))
    } else {
        format!("{c}*{}", factors.join("*"))
    }
}

/// " + "/" - " joined term list, or "0".
fn join_terms(terms: Vec<String>) -> String {
    let mut out = String::new();
    for t in terms {
        if out.is_empty() {
            out = t;
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&t);
        }
    }
    if out.is_empty() {
        String::from("0")
    } else {
        out
    }
}

fn poly_report(p: &PolynomialSum, prefix: &str) -> PolyReport {
    let terms: Vec<TermReport> = p
        .monomials()
        .iter()
        .map(|m| TermReport {
            coeff: rat::to_text(&m.coeff),
            exponents: m.exponents.clone(),
            symbol: m.symbol.clone(),
        })
        .collect();
    let rendered = join_terms(
        p.monomials()
            .iter()
            .map(|m| render_term(&m.coeff, m.symbol.as_deref(), &m.exponents, prefix))
            .collect(),
    );
    PolyReport {
        name: String::from(p.name()),
        rendered,
        terms,
    }
}

/// Report rows rebuilt from a stored representation (no polynomial
/// objects survive the round-trip, only their monomials).
fn rows_report(name: &str, rows: &[cmrep_core::mellin::CmRow], prefix: &str) -> PolyReport {
    let terms: Vec<TermReport> = rows
        .iter()
        .map(|r| TermReport {
            coeff: rat::to_text(&r.coeff),
            exponents: r.exponents.clone(),
            symbol: r.symbol.clone(),
        })
        .collect();
    let rendered = join_terms(
        rows.iter()
            .map(|r| render_term(&r.coeff, r.symbol.as_deref(), &r.exponents, prefix))
            .collect(),
    );
    PolyReport {
        name: String::from(name),
        rendered,
        terms,
    }
}

// ---------------------------------------------------------------------------
// Verb implementations
// ---------------------------------------------------------------------------

fn run_polys(input: &InputArgs) -> Result<Report, CliError> {
    let loaded = load_input(input)?;
    let report = match &loaded {
        LoadedInput::Graph { echo, graph } => {
            let u = symanzik_u(graph)?;
            let v = symanzik_v(graph)?;
            PolysReport {
                input: echo.clone(),
                mode: String::from("commutative"),
                num_lines: graph.num_lines(),
                variables: (1..=graph.num_lines()).map(|i| format!("a{i}")).collect(),
                polynomials: vec![poly_report(&u, "a"), poly_report(&v, "a")],
            }
        }
        LoadedInput::Ribbon {
            echo,
            ribbon,
            externals,
        } => {
            let polynomials = match ribbon.model {
                RibbonModel::GrosseWulkenhaar => vec![
                    poly_report(&hu_gw(ribbon)?, "t"),
                    poly_report(&hv_real_gw(ribbon, externals)?, "t"),
                    poly_report(&hv_imag_gw(ribbon, externals)?, "t"),
                ],
                RibbonModel::Lsz => vec![poly_report(&hu_lsz(ribbon)?, "t")],
            };
            PolysReport {
                input: echo.clone(),
                mode: String::from("noncommutative"),
                num_lines: ribbon.num_lines,
                variables: (1..=ribbon.num_lines).map(|i| format!("t{i}")).collect(),
                polynomials,
            }
        }
        LoadedInput::Rep { echo, rep } => {
            let prefix = var_prefix(rep.mode());
            let (mode, names) = match rep.mode() {
                CmMode::Commutative => ("commutative", ["U", "V", "V_I"]),
                CmMode::NonCommutative => ("noncommutative", ["HU", "HV_R", "HV_I"]),
            };
            let mut polynomials = vec![
                rows_report(names[0], rep.u_rows(), prefix),
                rows_report(names[1], rep.v_real_rows(), prefix),
            ];
            if !rep.v_imag_rows().is_empty() {
                polynomials.push(rows_report(names[2], rep.v_imag_rows(), prefix));
            }
            PolysReport {
                input: echo.clone(),
                mode: String::from(mode),
                num_lines: rep.num_lines(),
                variables: (1..=rep.num_lines())
                    .map(|i| format!("{prefix}{i}"))
                    .collect(),
                polynomials,
            }
        }
    };
    Ok(Report::Polys(report))
}

fn run_domain(input: &InputArgs, dim: &str) -> Result<Report, CliError> {
    let loaded = load_input(input)?;
    let d = parse_rat_flag(dim, "D")?;
    let rep = loaded.rep()?;
    let witness = delta_witness(&rep, &d).map(|w| WitnessReport {
        coords: rep
            .var_names()
            .iter()
            .zip(&w.coords)
            .map(|(n, v)| format!("{n}={}", rat::to_text(v)))
            .collect(),
        slack: rat::to_text(&w.slack),
    });
    Ok(Report::Domain(DomainReport {
        input: String::from(loaded.echo()),
        dim: rat::to_text(&d),
        feasible: witness.is_some(),
        witness,
    }))
}

fn run_strip(input: &InputArgs) -> Result<Report, CliError> {
    let loaded = load_input(input)?;
    let rep = loaded.rep()?;
    let report = match analyticity_strip(&rep) {
        StripBound::Finite(d) => StripReport {
            input: String::from(loaded.echo()),
            lower: String::from("0"),
            bounded: true,
            upper: Some(rat::to_text(&d)),
        },
        StripBound::Unbounded => StripReport {
            input: String::from(loaded.echo()),
            lower: String::from("0"),
            bounded: false,
            upper: None,
        },
    };
    Ok(Report::Strip(report))
}

fn run_poles(input: &InputArgs, n_cutoff: u32, window: &str) -> Result<Report, CliError> {
    let loaded = load_input(input)?;
    let Some((lo_text, hi_text)) = window.split_once(',') else {
        return Err(CliError::Validation(format!(
            "--window {window:?}: expected lo,hi"
        )));
    };
    let lo = parse_rat_flag(lo_text, "window")?;
    let hi = parse_rat_flag(hi_text, "window")?;
    if lo >= hi {
        return Err(CliError::Validation(format!(
            "--window {window:?}: empty window"
        )));
    }
    let rep = loaded.rep()?;
    let scan = scan_poles(&rep, n_cutoff, (lo.clone(), hi.clone()));
    let names = rep.var_names();
    let candidates = scan
        .candidates
        .iter()
        .map(|c| match &c.origin {
            PoleOrigin::Pinch { conditions, point } => CandidateReport {
                dim: rat::to_text(&c.dim),
                origin: String::from("pinch"),
                conditions: Some(conditions.clone()),
                point: Some(
                    names
                        .iter()
                        .zip(point)
                        .map(|(n, v)| format!("{n}={}", rat::to_text(v)))
                        .collect(),
                ),
                gamma_index: None,
            },
            PoleOrigin::DimensionGamma { n } => CandidateReport {
                dim: rat::to_text(&c.dim),
                origin: String::from("gamma"),
                conditions: None,
                point: None,
                gamma_index: Some(*n),
            },
        })
        .collect();
    Ok(Report::Poles(PolesReport {
        input: String::from(loaded.echo()),
        n_cutoff,
        window: [rat::to_text(&lo), rat::to_text(&hi)],
        candidates,
        strip_clear: strip_is_clear(&rep, n_cutoff),
    }))
}

/// Symbols appearing in the representation rows, sorted.
fn row_symbols(rep: &CmRep) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for rows in [rep.u_rows(), rep.v_real_rows(), rep.v_imag_rows()] {
        for r in rows {
            if let Some(s) = &r.symbol {
                out.insert(s.clone());
            }
        }
    }
    out
}

/// Fill `overrides` so every symbol resolves, defaulting to 1, and return
/// the effective "symbol=value" assignments.
fn effective_assignments(
    rep: &CmRep,
    overrides: &mut BTreeMap<String, Rat>,
) -> Vec<String> {
    let stored = rep.symbol_values();
    let mut echo = Vec::new();
    for sym in row_symbols(rep) {
        let value = match (overrides.get(&sym), stored.get(&sym)) {
            (Some(v), _) => v.clone(),
            (None, Some(v)) => v.clone(),
            (None, None) => {
                overrides.insert(sym.clone(), Rat::one());
                Rat::one()
            }
        };
        echo.push(format!("{sym}={}", rat::to_text(&value)));
    }
    echo
}

#[allow(clippy::too_many_arguments)]
fn run_eval(
    input: &InputArgs,
    dim: &str,
    truncation: Option<f64>,
    tol: f64,
    seed: u64,
    set: &[String],
    method: Method,
    threads: u16,
) -> Result<Report, CliError> {
    let loaded = load_input(input)?;
    let d = parse_rat_flag(dim, "D")?;
    if !(tol > 0.0) {
        return Err(CliError::Validation(format!(
            "--tol must be positive, got {tol}"
        )));
    }
    let mut overrides = BTreeMap::new();
    for binding in set {
        let (name, value) = parse_binding(binding, "set")?;
        overrides.insert(name, value);
    }
    let truncation = truncation.unwrap_or_else(|| {
        fixtures::recorded_truncation(loaded.echo()).unwrap_or(DEFAULT_TRUNCATION)
    });
    if !(truncation > 0.0) {
        return Err(CliError::Validation(format!(
            "--truncation must be positive, got {truncation}"
        )));
    }
    let q = QuadratureSpec {
        tolerance: tol,
        seed,
        threads: usize::from(threads),
        ..QuadratureSpec::default()
    };
    let rep = loaded.rep()?;
    let mut assignments_map = overrides.clone();
    let assignments = effective_assignments(&rep, &mut assignments_map);
    let result = match method {
        Method::Contour => eval_cm_contour(&rep, &assignments_map, &d, truncation, &q)?,
        Method::Parametric => match &loaded {
            LoadedInput::Graph { graph, .. } => {
                eval_parametric_commutative(graph, &assignments_map, &d, &q)?
            }
            LoadedInput::Ribbon {
                ribbon, externals, ..
            } => match ribbon.model {
                RibbonModel::GrosseWulkenhaar => eval_parametric_nc(
                    &hu_gw(ribbon)?,
                    &hv_real_gw(ribbon, externals)?,
                    &hv_imag_gw(ribbon, externals)?,
                    &assignments_map,
                    &d,
                    &q,
                )?,
                RibbonModel::Lsz => {
                    let empty =
                        PolynomialSum::new("HV", ribbon.num_lines, vec![], BTreeMap::new())?;
                    eval_parametric_nc(
                        &hu_lsz(ribbon)?,
                        &empty,
                        &empty.clone(),
                        &assignments_map,
                        &d,
                        &q,
                    )?
                }
            },
            LoadedInput::Rep { .. } => {
                return Err(CliError::Validation(String::from(
                    "--method parametric needs the integrand polynomials; \
                     pass the original --graph or --ribbon input",
                )));
            }
        },
    };
    Ok(Report::Eval(EvalReport {
        input: String::from(loaded.echo()),
        dim: rat::to_text(&d),
        assignments,
        result,
    }))
}

fn run_leading_power(input: &InputArgs, dim: &str, scale: &[String]) -> Result<Report, CliError> {
    let loaded = load_input(input)?;
    let d = parse_rat_flag(dim, "D")?;
    let mut weights = BTreeMap::new();
    for binding in scale {
        let (name, value) = parse_binding(binding, "scale")?;
        weights.insert(name, value);
    }
    let rep = loaded.rep()?;
    let bound = leading_power(&rep, &weights, &d).map_err(|e| match e {
        CoreError::EmptyDomainAt { dim } => {
            CliError::Computation(format!("empty convergence domain at D = {dim}"))
        }
        other => CliError::Validation(other.to_string()),
    })?;
    Ok(Report::LeadingPower(LeadingPowerReport {
        input: String::from(loaded.echo()),
        dim: rat::to_text(&d),
        weights: weights
            .iter()
            .map(|(k, v)| format!("{k}={}", rat::to_text(v)))
            .collect(),
        bound: rat::to_text(&bound),
    }))
}

fn run_lemma(
    truncation: f64,
    s: &str,
    test_function: TestFunction,
    threads: u16,
) -> Result<Report, CliError> {
    let s_rat = parse_rat_flag(s, "s")?;
    if !(truncation > 0.0) || !truncation.is_finite() {
        return Err(CliError::Validation(format!(
            "--truncation must be positive and finite, got {truncation}"
        )));
    }
    let testfn = match test_function {
        TestFunction::Gaussian => TestFn::Gaussian,
        TestFunction::Bump => TestFn::Bump,
    };
    let q = QuadratureSpec {
        threads: usize::from(threads),
        ..QuadratureSpec::default()
    };
    let s_val = crate::numerics::rf(&s_rat);
    let mut rows = Vec::new();
    for k in 1..=4 {
        let t = truncation * f64::from(k) / 4.0;
        rows.push(heaviside_lemma_check(testfn, s_val, t, &q)?);
    }
    let monotone = rows.windows(2).all(|w| w[1].deviation <= w[0].deviation);
    Ok(Report::VerifyAppendixA(LemmaReport {
        test_function: String::from(testfn.label()),
        s: rat::to_text(&s_rat),
        rows,
        monotone_nonincreasing: monotone,
    }))
}

fn run_beta(phi: &str, dim: &str, m2: &str) -> Result<Report, CliError> {
    let phi_rat = parse_rat_flag(phi, "phi")?;
    let d_rat = parse_rat_flag(dim, "D")?;
    let m2_rat = parse_rat_flag(m2, "m2")?;
    let phi_c = Complex64::new(crate::numerics::rf(&phi_rat), 0.0);
    let d_c = Complex64::new(crate::numerics::rf(&d_rat), 0.0);
    let beta = beta_std(phi_c, d_c)?;
    let massive = beta_massive(phi_c, d_c, crate::numerics::rf(&m2_rat))?;
    Ok(Report::VerifyAppendixB(BetaReport {
        phi: rat::to_text(&phi_rat),
        dim: rat::to_text(&d_rat),
        m2: rat::to_text(&m2_rat),
        beta: beta.re,
        beta_massive: massive.re,
        difference: massive.re - beta.re,
    }))
}

// ---------------------------------------------------------------------------
// Human rendering
// ---------------------------------------------------------------------------

fn human(report: &Report) -> String {
    let mut out = String::new();
    match report {
        Report::Polys(r) => {
            out.push_str(&format!(
                "input: {} ({}, {} line{})\n",
                r.input,
                r.mode,
                r.num_lines,
                if r.num_lines == 1 { "" } else { "s" }
            ));
            for p in &r.polynomials {
                out.push_str(&format!("{} = {}\n", p.name, p.rendered));
            }
        }
        Report::Domain(r) => {
            out.push_str(&format!("input: {}\n", r.input));
            match &r.witness {
                Some(w) => {
                    out.push_str(&format!(
                        "D = {}: feasible (witness slack {})\n",
                        r.dim, w.slack
                    ));
                    out.push_str(&format!("contour: {}\n", w.coords.join(" ")));
                }
                None => {
                    out.push_str(&format!("D = {}: infeasible, no contour exists\n", r.dim));
                }
            }
        }
        Report::Strip(r) => {
            out.push_str(&format!("input: {}\n", r.input));
            match &r.upper {
                Some(u) => out.push_str(&format!("analytic for D in ({}, {u})\n", r.lower)),
                None => out.push_str(&format!(
                    "analytic for D in ({}, inf): no constraint binds\n",
                    r.lower
                )),
            }
        }
        Report::Poles(r) => {
            out.push_str(&format!(
                "input: {}  window [{}, {}]  n_cutoff {}\n",
                r.input, r.window[0], r.window[1], r.n_cutoff
            ));
            out.push_str(&format!("candidates: {}\n", r.candidates.len()));
            for c in &r.candidates {
                match c.origin.as_str() {
                    "pinch" => out.push_str(&format!(
                        "D = {}  pinch of {{{}}} at {}\n",
                        c.dim,
                        c.conditions.as_deref().unwrap_or_default().join(", "),
                        c.point.as_deref().unwrap_or_default().join(" "),
                    )),
                    _ => out.push_str(&format!(
                        "D = {}  explicit Gamma factor, n = {}\n",
                        c.dim,
                        c.gamma_index.unwrap_or(0)
                    )),
                }
            }
            out.push_str(&format!("strip (0, 2) clear: {}\n", r.strip_clear));
        }
        Report::Eval(r) => {
            out.push_str(&format!("input: {}  D = {}\n", r.input, r.dim));
            if !r.assignments.is_empty() {
                out.push_str(&format!("invariants: {}\n", r.assignments.join(" ")));
            }
            out.push_str(&format!(
                "value = {} + {}i\n",
                r.result.value_re, r.result.value_im
            ));
            out.push_str(&format!(
                "method {} ({}), error estimate {}, {} evaluations, seed {}\n",
                r.result.method,
                r.result.scheme,
                r.result.error_estimate,
                r.result.evaluations,
                r.result.seed
            ));
            if r.result.truncation > 0.0 {
                out.push_str(&format!("truncation half-width {}\n", r.result.truncation));
            }
            if !r.result.contour_real_parts.is_empty() {
                out.push_str(&format!(
                    "contour: {}\n",
                    r.result.contour_real_parts.join(" ")
                ));
            }
        }
        Report::LeadingPower(r) => {
            out.push_str(&format!("input: {}  D = {}\n", r.input, r.dim));
            if !r.weights.is_empty() {
                out.push_str(&format!("weights: {}\n", r.weights.join(" ")));
            }
            out.push_str(&format!("leading power bound: {}\n", r.bound));
        }
        Report::VerifyAppendixA(r) => {
            out.push_str(&format!(
                "test function {}, s = {}\n",
                r.test_function, r.s
            ));
            out.push_str("T\tlhs_re\tlhs_im\trhs_re\trhs_im\tdeviation\n");
            for row in &r.rows {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    row.truncation, row.lhs_re, row.lhs_im, row.rhs_re, row.rhs_im, row.deviation
                ));
            }
            out.push_str(&format!(
                "deviation monotone non-increasing: {}\n",
                r.monotone_nonincreasing
            ));
        }
        Report::VerifyAppendixB(r) => {
            out.push_str(&format!("phi = {}, D = {}, m2 = {}\n", r.phi, r.dim, r.m2));
            out.push_str(&format!("beta          = {}\n", r.beta));
            out.push_str(&format!("beta_massive  = {}\n", r.beta_massive));
            out.push_str(&format!("difference    = {}\n", r.difference));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            CliError::Validation(format!("{}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    // The cm verb emits the representation document itself in both
    // formats: the TOML is the stable machine schema, and feeding it back
    // through --cm is the round-trip the format exists for.
    if let Verb::Cm { input } = &cli.verb {
        let loaded = load_input(input)?;
        let document = CmFile::from_rep(&loaded.rep()?).render();
        return emit(&document, cli.out.as_deref());
    }
    let report = match &cli.verb {
        Verb::Cm { .. } => unreachable!("handled above"),
        Verb::Polys { input } => run_polys(input)?,
        Verb::Domain { input, dim } => run_domain(input, dim)?,
        Verb::Strip { input } => run_strip(input)?,
        Verb::Poles {
            input,
            n_cutoff,
            window,
        } => run_poles(input, *n_cutoff, window)?,
        Verb::Eval {
            input,
            dim,
            truncation,
            tol,
            seed,
            set,
            method,
        } => run_eval(
            input,
            dim,
            *truncation,
            *tol,
            *seed,
            set,
            *method,
            cli.threads,
        )?,
        Verb::LeadingPower { input, dim, scale } => run_leading_power(input, dim, scale)?,
        Verb::VerifyAppendixA {
            truncation,
            s,
            test_function,
        } => run_lemma(*truncation, s, *test_function, cli.threads)?,
        Verb::VerifyAppendixB { phi, dim, m2 } => run_beta(phi, dim, m2)?,
    };
    let text = match cli.format {
        Format::Human => human(&report),
        Format::Machine => {
            let mut json = serde_json::to_string_pretty(&report)
                .expect("reports contain no non-serializable values");
            json.push('\n');
            json
        }
    };
    emit(&text, cli.out.as_deref())
}

/// Parse arguments and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn every_numerics_error_has_a_distinct_exit_lane() {
        let comp: CliError = NumericsError::Infeasible(String::from("D = 4")).into();
        assert_eq!(comp.code(), EXIT_COMPUTATION);
        let comp: CliError = NumericsError::NonConvergent(String::from("tail")).into();
        assert_eq!(comp.code(), EXIT_COMPUTATION);
        let val: CliError = NumericsError::BadArgument(String::from("m2")).into();
        assert_eq!(val.code(), EXIT_VALIDATION);
    }

    #[test]
    fn term_rendering_covers_signs_units_and_powers() {
        use cmrep_core::rat::{int, ratio};
        assert_eq!(render_term(&int(1), None, &[1, 1], "a"), "a1*a2");
        assert_eq!(render_term(&int(-1), None, &[2, 0], "t"), "-t1^2");
        assert_eq!(render_term(&ratio(1, 2), Some("s"), &[0, 0], "a"), "1/2*s");
        assert_eq!(render_term(&int(3), None, &[0, 0], "a"), "3");
        assert_eq!(
            join_terms(vec![String::from("a1"), String::from("-a2"), String::from("3")]),
            "a1 - a2 + 3"
        );
        assert_eq!(join_terms(vec![]), "0");
    }

    #[test]
    fn bindings_parse_and_reject() {
        let (k, v) = parse_binding("s=-3/2", "set").unwrap();
        assert_eq!(k, "s");
        assert_eq!(rat::to_text(&v), "-3/2");
        assert!(parse_binding("s", "set").is_err());
        assert!(parse_binding("=1", "set").is_err());
        assert!(parse_binding("s=abc", "set").is_err());
    }

    #[test]
    fn fixture_names_resolve_against_their_kind_only() {
        assert!(resolve_text("bubble", fixtures::FixtureKind::Graph, "graph").is_ok());
        let err = resolve_text("bubble", fixtures::FixtureKind::Ribbon, "ribbon").unwrap_err();
        assert!(err.message().contains("--graph"));
        let err = resolve_text("no_such", fixtures::FixtureKind::Graph, "graph").unwrap_err();
        assert!(err.message().contains("bundled"));
    }
}
