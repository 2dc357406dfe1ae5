//! `nu-solve`: raw NU problems and the two built-in parameter families.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use nuspectra::angular::{angular_nu_problem, nu_branch_index};
use nuspectra::model::{angular_constants_from, AngularBranch, AngularConstants, RadialBranch, ReducedParams};
use nuspectra::nu::{self, NuBranch, NuProblem};
use nuspectra::radial::radial_nu_problem;
use nuspectra::report::to_json_string;

use crate::{read_file, write_output, Failure};

#[derive(Args)]
pub struct NuSolveArgs {
    /// Problem JSON: raw coefficients or a `family` description.
    problem: PathBuf,
    /// Polynomial degree for λ_n and the quantization root.
    #[arg(long, default_value_t = 0)]
    n: u32,
    /// Bracket `lo,hi` for the eigen-parameter of a family.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    bracket: Vec<f64>,
    /// Also write the result as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Radial: eigen-parameter ε. Angular: eigen-parameter Γ.
#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
enum Family {
    Radial {
        abar: f64,
        gamma: f64,
        epsilon: Option<f64>,
        branch: Option<RadialBranch>,
    },
    Angular {
        kappa: f64,
        dbar: f64,
        gamma_theta: Option<f64>,
        branch: Option<AngularBranch>,
    },
}

enum ProblemFile {
    Family(Family),
    Raw(NuProblem),
}

impl ProblemFile {
    /// Files with a `family` key describe a family, anything else is raw.
    fn parse(text: &str) -> serde_json::Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        if v.get("family").is_some() {
            serde_json::from_value(v).map(ProblemFile::Family)
        } else {
            serde_json::from_value(v).map(ProblemFile::Raw)
        }
    }
}

#[derive(Serialize)]
struct BranchRow {
    k: f64,
    sign: nu::RootSign,
    pi: Vec<f64>,
    tau: Vec<f64>,
    tau_slope: f64,
    lambda0: f64,
    lambda_n: f64,
    admissible: bool,
}

#[derive(Serialize)]
struct NuSolveReport {
    n: u32,
    k_candidates: Vec<f64>,
    branches: Vec<BranchRow>,
    eigen_parameter: Option<f64>,
}

fn row(b: &NuBranch, n: u32) -> BranchRow {
    BranchRow {
        k: b.k,
        sign: b.sign,
        pi: b.pi.coeffs().to_vec(),
        tau: b.tau.coeffs().to_vec(),
        tau_slope: b.tau_slope(),
        lambda0: b.lambda0,
        lambda_n: nu::lambda_n(b, n),
        admissible: b.is_admissible(),
    }
}

fn describe(p: &NuProblem, n: u32, eigen_parameter: Option<f64>) -> Result<NuSolveReport, Failure> {
    let ks = nu::find_k_candidates(p)?;
    let branches = ks
        .iter()
        .flat_map(|&k| nu::build_branches(p, k))
        .map(|b| row(&b, n))
        .collect();
    Ok(NuSolveReport {
        n,
        k_candidates: ks,
        branches,
        eigen_parameter,
    })
}

fn text(r: &NuSolveReport) -> String {
    let mut s = String::new();
    let ks: Vec<String> = r.k_candidates.iter().map(|k| format!("{k:.10}")).collect();
    let _ = writeln!(s, "k candidates: {}", ks.join(", "));
    let _ = writeln!(
        s,
        "{:>14} {:>5} {:>28} {:>28} {:>14} {:>14} {:>14}  admissible",
        "k", "sign", "pi", "tau", "tau'", "lambda0", "lambda_n"
    );
    let poly = |c: &[f64]| c.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" ");
    for b in &r.branches {
        let _ = writeln!(
            s,
            "{:>14.8} {:>5} {:>28} {:>28} {:>14.8} {:>14.8} {:>14.8}  {}",
            b.k,
            match b.sign {
                nu::RootSign::Minus => "-",
                nu::RootSign::Plus => "+",
            },
            poly(&b.pi),
            poly(&b.tau),
            b.tau_slope,
            b.lambda0,
            b.lambda_n,
            if b.admissible { "yes" } else { "no" }
        );
    }
    if let Some(x) = r.eigen_parameter {
        let _ = writeln!(s, "eigen-parameter (n = {}): {x:.12}", r.n);
    }
    s
}

fn bracket(args: &NuSolveArgs) -> Result<Option<(f64, f64)>, Failure> {
    match args.bracket.as_slice() {
        [] => Ok(None),
        [lo, hi] if lo < hi => Ok(Some((*lo, *hi))),
        _ => Err(Failure::input("--bracket takes lo,hi with lo < hi".into())),
    }
}

/// Root of a family: bracketed if given, otherwise scanned upward from `start`.
fn family_root(
    family: &dyn Fn(f64) -> nuspectra::Result<NuProblem>,
    index: usize,
    n: u32,
    bracket: Option<(f64, f64)>,
    start: f64,
) -> Result<f64, Failure> {
    let b = match bracket {
        Some(b) => b,
        None => nu::expand_bracket(|x| nu::quantization_residual(&family(x)?, index, n), start, 1.0)?,
    };
    Ok(nu::solve_eigenparameter(family, n, b, index)?)
}

pub fn run(args: &NuSolveArgs) -> Result<u8, Failure> {
    let raw = read_file(&args.problem)?;
    let file = ProblemFile::parse(&raw)
        .map_err(|e| Failure::input(format!("{}: not a valid NU problem: {e}", args.problem.display())))?;
    let bracket = bracket(args)?;
    let report = match file {
        ProblemFile::Raw(p) => {
            if bracket.is_some() {
                eprintln!("note: --bracket is ignored for a fixed problem");
            }
            let report = describe(&p, args.n, None)?;
            // surfaces "no admissible branch" as its own exit status
            nu::all_admissible_branches(&p)?;
            report
        }
        ProblemFile::Family(Family::Radial {
            abar,
            gamma,
            epsilon,
            branch,
        }) => {
            let r = ReducedParams::dimensionless(abar, 0.0, 0.0, 0.0)?;
            let family = |eps: f64| radial_nu_problem(&r, gamma, eps);
            let index = match branch.unwrap_or(RadialBranch::Plus) {
                RadialBranch::Plus => 0,
                RadialBranch::Minus => 1,
            };
            match epsilon {
                Some(eps) => describe(&family(eps)?, args.n, None)?,
                None => {
                    let start = -1e3 * (1.0 + abar.sqrt());
                    let root = family_root(&family, index, args.n, bracket, start)?;
                    describe(&family(root)?, args.n, Some(root))?
                }
            }
        }
        ProblemFile::Family(Family::Angular {
            kappa,
            dbar,
            gamma_theta,
            branch,
        }) => {
            let ac: AngularConstants = angular_constants_from(kappa + 0.25, dbar, 0)?;
            let family = |g: f64| angular_nu_problem(&ac, g);
            match gamma_theta {
                Some(g) => describe(&family(g)?, args.n, None)?,
                None => {
                    let start = -100.0 * (1.0 + kappa.abs() + dbar.abs());
                    let index = nu_branch_index(&family(start)?, &ac, branch.unwrap_or(AngularBranch::S1))?;
                    let root = family_root(&family, index, args.n, bracket, start)?;
                    describe(&family(root)?, args.n, Some(root))?
                }
            }
        }
    };
    if let Some(path) = &args.out {
        write_output(path, &to_json_string(&report)?)?;
    }
    print!("{}", text(&report));
    Ok(0)
}
