//! Command-line interface to the pinchlab verifiers.
//!
//! Subcommands cover spectrahedron membership, single-instance verification
//! of the generalized/reverse inequalities, the converse witness check,
//! gentle-measurement analysis, boundary sampling, and seeded campaigns.
//! Input and output are JSON documents on files or stdio; exit code 0 means
//! all checks passed, 1 a verified inequality violation, 2 a usage or input
//! error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use pinchlab::gentle::{check_sandwich, gentle_bounds, trace_norm_report, GentleInstance};
use pinchlab::harness::{
    random_projective_povm, random_psd, run_campaign, CampaignConfig, CampaignMode,
};
use pinchlab::matrix::{ComplexMatrix, Tolerance};
use pinchlab::pinching::{
    converse_check, verify_generalized, verify_reverse, OperatorFamily, ProjectivePovm,
};
use pinchlab::spectrahedron::{
    in_lower_direct, in_upper3_closed_form, in_upper_direct, in_upper_recursive_or_direct,
    sample_lower2_boundary, sample_upper_boundary, WeightVector,
};

#[derive(Parser)]
#[command(
    name = "pinchlab",
    version,
    about = "Verifiers for pinching-type operator inequalities and their weight spectrahedra"
)]
struct Cli {
    /// Relative eigenvalue floor for PSD decisions.
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_PSD_SLACK)]
    psd_slack: f64,

    /// Half-width of the boundary classification band.
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_EQUALITY_BAND)]
    band: f64,

    /// Also write the output document to this path.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Single JSON document.
    Json,
    /// Header + one row of the top-level scalar fields.
    CsvSummary,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "UPPER")]
enum SetArg {
    /// Upper spectrahedron: weights valid for the generalized upper bound.
    #[value(alias = "a")]
    A,
    /// Lower spectrahedron: weights valid for the reverse bound.
    #[value(alias = "b")]
    B,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Eigenvalue test of the linear matrix inequality.
    Direct,
    /// Schur-complement polynomial recursion (direct fallback in the band).
    Recursive,
    /// Arity-3 closed form.
    Closed3,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Generalized,
    Reverse,
    Converse,
    Gentle,
    Membership,
}

impl From<ModeArg> for CampaignMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Generalized => CampaignMode::Generalized,
            ModeArg::Reverse => CampaignMode::Reverse,
            ModeArg::Converse => CampaignMode::Converse,
            ModeArg::Gentle => CampaignMode::Gentle,
            ModeArg::Membership => CampaignMode::Membership,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Test membership of a weight vector in a spectrahedron.
    Membership {
        #[arg(long, value_enum)]
        set: SetArg,
        /// Inline JSON weight vector: [2,2] or {"values":[2,2]}.
        #[arg(long)]
        vector: Option<String>,
        /// Path to a weight-vector JSON file.
        #[arg(long = "in", value_name = "PATH")]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
        method: MethodArg,
    },
    /// Verify the generalized upper inequality on one instance.
    Verify {
        /// Inline JSON weights.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long = "alpha-in", value_name = "PATH")]
        alpha_in: Option<PathBuf>,
        /// Operator family JSON file.
        #[arg(long = "family-in", value_name = "PATH")]
        family_in: Option<PathBuf>,
        /// Projective measurement JSON file, used as the family.
        #[arg(long = "povm-in", value_name = "PATH")]
        povm_in: Option<PathBuf>,
        /// State JSON file; omit to draw a seeded random state.
        #[arg(long = "rho-in", value_name = "PATH")]
        rho_in: Option<PathBuf>,
        /// Dimension of the random state (with --seed).
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Verify the reverse inequality on one instance.
    Reverse {
        #[arg(long)]
        beta: Option<String>,
        #[arg(long = "beta-in", value_name = "PATH")]
        beta_in: Option<PathBuf>,
        #[arg(long = "family-in", value_name = "PATH")]
        family_in: Option<PathBuf>,
        #[arg(long = "povm-in", value_name = "PATH")]
        povm_in: Option<PathBuf>,
        #[arg(long = "rho-in", value_name = "PATH")]
        rho_in: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare the converse witness check against direct membership.
    Converse {
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long = "alpha-in", value_name = "PATH")]
        alpha_in: Option<PathBuf>,
        /// Measurement JSON file; omit to draw a seeded random one.
        #[arg(long = "povm-in", value_name = "PATH")]
        povm_in: Option<PathBuf>,
        /// Dimension of the random measurement (defaults to the arity).
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Gentle-measurement bounds and trace-norm report for one instance.
    Gentle {
        /// Instance JSON file {"rho":…, "P":…, "epsilon":…}.
        #[arg(long = "in", value_name = "PATH")]
        input: Option<PathBuf>,
        #[arg(long = "rho-in", value_name = "PATH")]
        rho_in: Option<PathBuf>,
        #[arg(long = "projector-in", value_name = "PATH")]
        projector_in: Option<PathBuf>,
        /// Hypothesis slack; omitted means tight-epsilon mode.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run a randomized verification campaign.
    Campaign {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Hilbert-space dimensions drawn per trial.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 4, 5, 6])]
        dims: Vec<usize>,
        /// Measurement/family arities drawn per trial.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 4])]
        arities: Vec<usize>,
        /// Append the report to this JSON-lines log.
        #[arg(long, value_name = "PATH")]
        log: Option<PathBuf>,
    },
    /// Sample a boundary point of a spectrahedron.
    SampleBoundary {
        #[arg(long, value_enum)]
        set: SetArg,
        /// Arity of the sampled vector.
        #[arg(long)]
        n: usize,
        /// Curve parameter: set A uses prefix (1+t), set B the point (1-t, 1-1/t).
        #[arg(long)]
        t: Option<f64>,
        /// Inline JSON prefix of length n-1 (set A).
        #[arg(long)]
        prefix: Option<String>,
        /// Seed for random prefix sampling (set A).
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let tol = Tolerance::new(cli.psd_slack, cli.band).map_err(|e| e.to_string())?;
    let (document, exit) = match &cli.command {
        Command::Membership {
            set,
            vector,
            input,
            method,
        } => membership(*set, vector.as_deref(), input.as_deref(), *method, &tol)?,
        Command::Verify {
            alpha,
            alpha_in,
            family_in,
            povm_in,
            rho_in,
            dim,
            seed,
        } => verify(
            Direction::Generalized,
            alpha.as_deref(),
            alpha_in.as_deref(),
            family_in.as_deref(),
            povm_in.as_deref(),
            rho_in.as_deref(),
            *dim,
            *seed,
            &tol,
        )?,
        Command::Reverse {
            beta,
            beta_in,
            family_in,
            povm_in,
            rho_in,
            dim,
            seed,
        } => verify(
            Direction::Reverse,
            beta.as_deref(),
            beta_in.as_deref(),
            family_in.as_deref(),
            povm_in.as_deref(),
            rho_in.as_deref(),
            *dim,
            *seed,
            &tol,
        )?,
        Command::Converse {
            alpha,
            alpha_in,
            povm_in,
            dim,
            seed,
        } => converse(
            alpha.as_deref(),
            alpha_in.as_deref(),
            povm_in.as_deref(),
            *dim,
            *seed,
            &tol,
        )?,
        Command::Gentle {
            input,
            rho_in,
            projector_in,
            epsilon,
        } => gentle(
            input.as_deref(),
            rho_in.as_deref(),
            projector_in.as_deref(),
            *epsilon,
            &tol,
        )?,
        Command::Campaign {
            mode,
            trials,
            seed,
            dims,
            arities,
            log,
        } => campaign(*mode, *trials, *seed, dims, arities, log.as_deref(), &tol)?,
        Command::SampleBoundary {
            set,
            n,
            t,
            prefix,
            seed,
        } => sample_boundary(*set, *n, *t, prefix.as_deref(), *seed, &tol)?,
    };
    emit(&cli, &document)?;
    Ok(exit)
}

// ---------------------------------------------------------------------------
// Subcommand handlers. Each returns (document, exit code).
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct MembershipOutput {
    member: bool,
    on_boundary: bool,
    certificate: f64,
    set: &'static str,
    method: &'static str,
    values: Vec<f64>,
}

fn membership(
    set: SetArg,
    inline: Option<&str>,
    input: Option<&std::path::Path>,
    method: MethodArg,
    tol: &Tolerance,
) -> Result<(Value, u8), String> {
    let w = load_weights(inline, input)?;
    let (verdict, method_name) = match (set, method) {
        (SetArg::A, MethodArg::Direct) => (fail2(in_upper_direct(&w, tol))?, "direct"),
        (SetArg::A, MethodArg::Recursive) => {
            (fail2(in_upper_recursive_or_direct(&w, tol))?, "recursive")
        }
        (SetArg::A, MethodArg::Closed3) => (fail2(in_upper3_closed_form(&w, tol))?, "closed3"),
        (SetArg::B, MethodArg::Direct) => (fail2(in_lower_direct(&w, tol))?, "direct"),
        (SetArg::B, _) => {
            return Err("set B supports only the direct method".into());
        }
    };
    let doc = to_value(&MembershipOutput {
        member: verdict.member,
        on_boundary: verdict.on_boundary,
        certificate: verdict.certificate,
        set: set_name(set),
        method: method_name,
        values: w.values().to_vec(),
    })?;
    Ok((doc, 0))
}

enum Direction {
    Generalized,
    Reverse,
}

#[derive(Serialize)]
struct VerifyOutput {
    holds: bool,
    min_gap_eigenvalue: f64,
    scale: f64,
    tolerance_used: f64,
    direction: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[allow(clippy::too_many_arguments)]
fn verify(
    direction: Direction,
    inline: Option<&str>,
    weights_in: Option<&std::path::Path>,
    family_in: Option<&std::path::Path>,
    povm_in: Option<&std::path::Path>,
    rho_in: Option<&std::path::Path>,
    dim: Option<usize>,
    seed: Option<u64>,
    tol: &Tolerance,
) -> Result<(Value, u8), String> {
    let weights = load_weights(inline, weights_in)?;
    let family: OperatorFamily = match (family_in, povm_in) {
        (Some(path), None) => read_json_file(path)?,
        (None, Some(path)) => read_json_file::<ProjectivePovm>(path)?.as_family(),
        _ => return Err("provide exactly one of --family-in or --povm-in".into()),
    };
    let (rho, echoed_seed) = match rho_in {
        Some(path) => (read_json_file::<ComplexMatrix>(path)?, None),
        None => {
            let seed = seed.ok_or("random state needs --seed (or pass --rho-in)")?;
            let dim = dim.unwrap_or(family.in_dim());
            (random_psd(dim, seed, true), Some(seed))
        }
    };
    let verdict = match direction {
        Direction::Generalized => fail2(verify_generalized(&family, &weights, &rho, tol))?,
        Direction::Reverse => fail2(verify_reverse(&family, &weights, &rho, tol))?,
    };
    let doc = to_value(&VerifyOutput {
        holds: verdict.holds,
        min_gap_eigenvalue: verdict.min_gap_eigenvalue,
        scale: verdict.scale,
        tolerance_used: verdict.tolerance_used,
        direction: match direction {
            Direction::Generalized => "generalized",
            Direction::Reverse => "reverse",
        },
        seed: echoed_seed,
    })?;
    Ok((doc, if verdict.holds { 0 } else { 1 }))
}

#[derive(Serialize)]
struct ConverseOutput {
    witnessed: bool,
    direct_member: bool,
    agree: bool,
    certificate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

fn converse(
    inline: Option<&str>,
    weights_in: Option<&std::path::Path>,
    povm_in: Option<&std::path::Path>,
    dim: Option<usize>,
    seed: Option<u64>,
    tol: &Tolerance,
) -> Result<(Value, u8), String> {
    let weights = load_weights(inline, weights_in)?;
    let n = weights.arity();
    let (povm, echoed_seed) = match povm_in {
        Some(path) => (read_json_file::<ProjectivePovm>(path)?, None),
        None => {
            let seed = seed.ok_or("random measurement needs --seed (or pass --povm-in)")?;
            let dim = dim.unwrap_or(n).max(n);
            (fail2(random_projective_povm(dim, n, seed))?, Some(seed))
        }
    };
    let witnessed = fail2(converse_check(&povm, &weights, tol))?;
    let direct = fail2(in_upper_direct(&weights, tol))?;
    let agree = witnessed == direct.member;
    let doc = to_value(&ConverseOutput {
        witnessed,
        direct_member: direct.member,
        agree,
        certificate: direct.certificate,
        seed: echoed_seed,
    })?;
    Ok((doc, if agree { 0 } else { 1 }))
}

#[derive(Serialize)]
struct SandwichSide {
    holds: bool,
    min_gap_eigenvalue: f64,
}

#[derive(Serialize)]
struct GentleOutput {
    epsilon: f64,
    trace_norm_report: pinchlab::gentle::TraceNormReport,
    trace_bound_holds: bool,
    sandwich_lower: SandwichSide,
    sandwich_upper: SandwichSide,
    sandwich_upper_tightened: SandwichSide,
}

fn gentle(
    input: Option<&std::path::Path>,
    rho_in: Option<&std::path::Path>,
    projector_in: Option<&std::path::Path>,
    epsilon: Option<f64>,
    tol: &Tolerance,
) -> Result<(Value, u8), String> {
    let inst: GentleInstance = match (input, rho_in, projector_in) {
        (Some(path), None, None) => read_json_file(path)?,
        (None, Some(rho_path), Some(p_path)) => {
            let rho: ComplexMatrix = read_json_file(rho_path)?;
            let projector: ComplexMatrix = read_json_file(p_path)?;
            match epsilon {
                Some(eps) => fail2(GentleInstance::new(rho, projector, eps, tol))?,
                None => fail2(GentleInstance::with_tight_epsilon(rho, projector, tol))?,
            }
        }
        _ => return Err("provide --in, or both --rho-in and --projector-in".into()),
    };
    let bounds = fail2(gentle_bounds(&inst, tol))?;
    let sandwich = fail2(check_sandwich(&inst, &bounds, tol))?;
    let report = fail2(trace_norm_report(&inst))?;
    let trace_bound_holds = report.within_new_bound(tol.equality_band);
    let ok = sandwich.holds() && trace_bound_holds;
    let doc = to_value(&GentleOutput {
        epsilon: inst.epsilon(),
        trace_norm_report: report,
        trace_bound_holds,
        sandwich_lower: SandwichSide {
            holds: sandwich.lower.holds,
            min_gap_eigenvalue: sandwich.lower.min_gap_eigenvalue,
        },
        sandwich_upper: SandwichSide {
            holds: sandwich.upper.holds,
            min_gap_eigenvalue: sandwich.upper.min_gap_eigenvalue,
        },
        sandwich_upper_tightened: SandwichSide {
            holds: sandwich.upper_tightened.holds,
            min_gap_eigenvalue: sandwich.upper_tightened.min_gap_eigenvalue,
        },
    })?;
    Ok((doc, if ok { 0 } else { 1 }))
}

fn campaign(
    mode: ModeArg,
    trials: u64,
    seed: u64,
    dims: &[usize],
    arities: &[usize],
    log: Option<&std::path::Path>,
    tol: &Tolerance,
) -> Result<(Value, u8), String> {
    let cfg = CampaignConfig {
        master_seed: seed,
        trials,
        dims: dims.to_vec(),
        arities: arities.to_vec(),
        mode: mode.into(),
    };
    let report = fail2(run_campaign(&cfg, tol))?;
    let doc = to_value(&report)?;
    if let Some(path) = log {
        let line = serde_json::to_string(&report).map_err(|e| e.to_string())?;
        let mut file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        writeln!(file, "{line}").map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok((doc, if report.fail_count == 0 { 0 } else { 1 }))
}

fn sample_boundary(
    set: SetArg,
    n: usize,
    t: Option<f64>,
    prefix: Option<&str>,
    seed: Option<u64>,
    tol: &Tolerance,
) -> Result<(Value, u8), String> {
    let w = match set {
        SetArg::A => {
            if let Some(text) = prefix {
                let prefix = parse_values(text)?;
                fail2(sample_upper_boundary(n, Some(&prefix), 0, tol))?
            } else if let Some(t) = t {
                if n != 2 {
                    return Err("--t parametrizes the arity-2 boundary; use --prefix or --seed for higher arity".into());
                }
                fail2(sample_upper_boundary(2, Some(&[1.0 + t]), 0, tol))?
            } else if let Some(seed) = seed {
                fail2(sample_upper_boundary(n, None, seed, tol))?
            } else {
                return Err("set A sampling needs --t, --prefix, or --seed".into());
            }
        }
        SetArg::B => {
            if n != 2 {
                return Err("set B boundary sampling is implemented for arity 2 only".into());
            }
            let t = t.ok_or("set B sampling needs --t")?;
            fail2(sample_lower2_boundary(t))?
        }
    };
    Ok((to_value(&w)?, 0))
}

// ---------------------------------------------------------------------------
// Plumbing.
// ---------------------------------------------------------------------------

fn set_name(set: SetArg) -> &'static str {
    match set {
        SetArg::A => "A",
        SetArg::B => "B",
    }
}

fn fail2<T>(r: pinchlab::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn to_value<T: Serialize>(value: &T) -> Result<Value, String> {
    serde_json::to_value(value).map_err(|e| e.to_string())
}

fn read_json_file<T: DeserializeOwned>(path: &std::path::Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    if let Ok(values) = serde_json::from_str::<Vec<f64>>(text) {
        return Ok(values);
    }
    #[derive(serde::Deserialize)]
    struct Wrapper {
        values: Vec<f64>,
    }
    serde_json::from_str::<Wrapper>(text)
        .map(|w| w.values)
        .map_err(|e| format!("weight vector: {e}"))
}

fn load_weights(
    inline: Option<&str>,
    path: Option<&std::path::Path>,
) -> Result<WeightVector, String> {
    match (inline, path) {
        (Some(text), None) => fail2(WeightVector::new(parse_values(text)?)),
        (None, Some(path)) => read_json_file(path),
        _ => Err("provide the weights inline or via --in, not both".into()),
    }
}

fn emit(cli: &Cli, document: &Value) -> Result<(), String> {
    let text = match cli.format {
        Format::Json => serde_json::to_string(document).map_err(|e| e.to_string())?,
        Format::CsvSummary => csv_summary(document),
    };
    println!("{text}");
    if let Some(path) = &cli.out {
        fs::write(path, format!("{text}\n")).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

// Flattens the top-level scalar fields of the document into a two-line CSV.
fn csv_summary(document: &Value) -> String {
    let mut header = Vec::new();
    let mut row = Vec::new();
    if let Value::Object(map) = document {
        for (key, value) in map {
            match value {
                Value::Bool(_) | Value::Number(_) => {
                    header.push(key.clone());
                    row.push(value.to_string());
                }
                Value::String(s) => {
                    header.push(key.clone());
                    row.push(s.clone());
                }
                _ => {}
            }
        }
    }
    format!("{}\n{}", header.join(","), row.join(","))
}
