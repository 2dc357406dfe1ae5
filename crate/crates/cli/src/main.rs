use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nuspectra::assembly::{
    assemble_total, build_spectrum, classify_special_case, spectrum_entry, BranchPolicy, Ranges,
};
use nuspectra::model::{reduce_params, AngularBranch, PhysicalParams, QuantumNumbers, RadialBranch, SpectrumEntry};
use nuspectra::oracle::verify::{
    run_audits, verify_golden, verify_params, Erratum, Tolerances, Verdict, VerificationReport, VerifyConfig,
};
use nuspectra::report::{sample_wavefunction, samples_to_csv, to_json_string, SampleLattice};
use nuspectra::Error;

mod nu_solve;

#[derive(Parser)]
#[command(name = "nuspectra", version, about = "Bound states of the oscillator with inverse-square ring terms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate energies over quantum-number ranges.
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        ranges: RangeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample Ψ(r, θ, φ) of one state as CSV.
    Wavefunction(WavefunctionArgs),
    /// Check closed forms against the numerical oracles.
    Verify(VerifyArgs),
    /// Run the NU engine on a problem file.
    NuSolve(nu_solve::NuSolveArgs),
    /// Identify the special case a parameter set reduces to.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct ParamArgs {
    /// Oscillator strength.
    #[arg(long = "A", allow_hyphen_values = true)]
    a: Option<f64>,
    /// Inverse-square strength.
    #[arg(long = "B", allow_hyphen_values = true)]
    b: Option<f64>,
    /// 1/sin² ring strength.
    #[arg(long = "C", allow_hyphen_values = true)]
    c: Option<f64>,
    /// 1/cos² ring strength.
    #[arg(long = "D", allow_hyphen_values = true)]
    d: Option<f64>,
    /// Deformation multiplying the ring terms (default 1).
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mass: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hbar: Option<f64>,
    /// JSON file with keys A, B, C, D, q, mass, hbar; flags override it.
    #[arg(long)]
    params: Option<PathBuf>,
}

impl ParamArgs {
    fn any_given(&self) -> bool {
        self.params.is_some()
            || [self.a, self.b, self.c, self.d, self.q, self.mass, self.hbar]
                .iter()
                .any(Option::is_some)
    }

    fn resolve(&self) -> Result<PhysicalParams, Failure> {
        let mut p = match &self.params {
            Some(path) => {
                let text = read_file(path)?;
                serde_json::from_str::<PhysicalParams>(&text)
                    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
            }
            None => {
                let a = self.a.ok_or_else(|| Failure::input("--A or --params is required".into()))?;
                PhysicalParams::new(a, 0.0, 0.0, 0.0, 1.0)
            }
        };
        let overrides = [
            (self.a, &mut p.a),
            (self.b, &mut p.b),
            (self.c, &mut p.c),
            (self.d, &mut p.d),
            (self.q, &mut p.q),
            (self.mass, &mut p.mass),
            (self.hbar, &mut p.hbar),
        ];
        for (flag, slot) in overrides {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    S1,
    S2,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum RadialArg {
    Plus,
    Minus,
    Both,
}

#[derive(Args, Clone)]
struct RangeArgs {
    /// Largest radial index; a negative value gives an empty range.
    #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
    n_max: i64,
    #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
    nbar_max: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    mbar_max: i64,
    #[arg(long, value_enum, default_value = "both")]
    branch: BranchArg,
    #[arg(long, value_enum, default_value = "plus")]
    radial_branch: RadialArg,
}

impl RangeArgs {
    /// `None` when a range is empty.
    fn ranges(&self) -> Result<Option<Ranges>, Failure> {
        let lims = [self.n_max, self.nbar_max, self.mbar_max];
        if lims.iter().any(|&v| v < 0) {
            return Ok(None);
        }
        let conv = |v: i64| u32::try_from(v).map_err(|_| Failure::input(format!("range limit {v} is too large")));
        Ok(Some(Ranges::new(conv(lims[0])?, conv(lims[1])?, conv(lims[2])?)))
    }

    fn policy(&self) -> BranchPolicy {
        let angular: &[AngularBranch] = match self.branch {
            BranchArg::S1 => &[AngularBranch::S1],
            BranchArg::S2 => &[AngularBranch::S2],
            BranchArg::Both => &[AngularBranch::S1, AngularBranch::S2],
        };
        let radial: &[RadialBranch] = match self.radial_branch {
            RadialArg::Plus => &[RadialBranch::Plus],
            RadialArg::Minus => &[RadialBranch::Minus],
            RadialArg::Both => &[RadialBranch::Plus, RadialBranch::Minus],
        };
        BranchPolicy::new(angular, radial)
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output file; `-` writes the document to stdout instead of the table.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to JSON for spectra and CSV for wavefunction samples.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct WavefunctionArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    n: u32,
    #[arg(long, default_value_t = 0)]
    nbar: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    mbar: i32,
    #[arg(long, value_enum, default_value = "s1")]
    branch: BranchArg,
    #[arg(long, value_enum, default_value = "plus")]
    radial_branch: RadialArg,
    /// Explicit radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    r: Vec<f64>,
    /// Explicit polar angles in (0, π/2), comma separated.
    #[arg(long, value_delimiter = ',')]
    theta: Vec<f64>,
    /// Explicit azimuths, comma separated.
    #[arg(long, value_delimiter = ',')]
    phi: Vec<f64>,
    /// Lattice sizes `nr,ntheta,nphi` used for axes not given explicitly.
    #[arg(long, value_delimiter = ',', default_values_t = [8, 8, 4])]
    grid: Vec<usize>,
    /// Upper radius of the default lattice; defaults to the decay radius.
    #[arg(long)]
    r_max: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Parameters to verify; without any, the built-in golden suite runs.
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    ranges: RangeArgs,
    #[arg(long, default_value_t = 1e-5)]
    tol_fd: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol_residual: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol_gram: f64,
    #[arg(long, default_value_t = nuspectra::oracle::fd::DEFAULT_POINTS)]
    fd_points: usize,
    /// Substitute a known erratum for the implemented formula.
    #[arg(long, value_parser = ["remark-iv"])]
    inject_erratum: Option<String>,
    /// Report file (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit status with a message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: String) -> Self {
        Self { code: 2, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Inadmissible(_) | Error::SingularPoint(_) => 3,
            Error::NoAdmissibleBranch(_) | Error::NoReduction(_) => 4,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &PathBuf, text: &str) -> Result<(), Failure> {
    if path.as_os_str() == "-" {
        print!("{text}");
        return Ok(());
    }
    std::fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn spectrum_csv(entries: &[SpectrumEntry]) -> Result<String, Failure> {
    let mut out = String::from("n,nbar,mbar,branch_radial,branch_angular,Lambda,gamma,E,admissible,reason\n");
    let rows = nuspectra::report::canonical_value(entries)?;
    for row in rows.as_array().into_iter().flatten() {
        let cols: Vec<String> = ["n", "nbar", "mbar", "branch_radial", "branch_angular", "Lambda", "gamma", "E", "admissible", "reason"]
            .iter()
            .map(|k| match &row[*k] {
                serde_json::Value::String(s) => csv_field(s),
                other => other.to_string(),
            })
            .collect();
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    Ok(out)
}

fn spectrum_table(entries: &[SpectrumEntry]) -> String {
    let mut s = format!(
        "{:>3} {:>4} {:>4} {:>6} {:>7} {:>16} {:>16} {:>16}  status\n",
        "n", "nbar", "mbar", "radial", "angular", "Lambda", "gamma", "E"
    );
    for e in entries {
        let status = match &e.admissibility {
            nuspectra::model::Admissibility::Admissible => "ok".to_string(),
            other => other.reason(),
        };
        let _ = writeln!(
            s,
            "{:>3} {:>4} {:>4} {:>6} {:>7} {:>16.10} {:>16.10} {:>16.10}  {}",
            e.quantum.n,
            e.quantum.nbar,
            e.quantum.mbar,
            e.radial_branch.as_str(),
            e.angular_branch.as_str(),
            e.lambda,
            e.gamma,
            e.energy,
            status
        );
    }
    let _ = writeln!(s, "{} entries", entries.len());
    s
}

fn cmd_spectrum(params: &ParamArgs, ranges: &RangeArgs, output: &OutputArgs) -> Result<u8, Failure> {
    let p = params.resolve()?;
    let entries = match ranges.ranges()? {
        Some(r) => build_spectrum(&p, &r, &ranges.policy())?,
        None => Vec::new(),
    };
    let doc = match output.format.unwrap_or(Format::Json) {
        Format::Json => to_json_string(&entries)?,
        Format::Csv => spectrum_csv(&entries)?,
    };
    match &output.out {
        Some(path) if path.as_os_str() == "-" => print!("{doc}"),
        Some(path) => {
            write_output(path, &doc)?;
            print!("{}", spectrum_table(&entries));
        }
        None => print!("{}", spectrum_table(&entries)),
    }
    Ok(0)
}

fn cmd_wavefunction(args: &WavefunctionArgs) -> Result<u8, Failure> {
    let p = args.params.resolve()?;
    let r = reduce_params(&p)?;
    let angular = match args.branch {
        BranchArg::S1 => AngularBranch::S1,
        BranchArg::S2 => AngularBranch::S2,
        BranchArg::Both => return Err(Failure::input("select a single angular branch".into())),
    };
    let radial = match args.radial_branch {
        RadialArg::Plus => RadialBranch::Plus,
        RadialArg::Minus => RadialBranch::Minus,
        RadialArg::Both => return Err(Failure::input("select a single radial branch".into())),
    };
    let entry = spectrum_entry(&r, QuantumNumbers::new(args.n, args.nbar, args.mbar), radial, angular)?;
    let psi = assemble_total(&r, &entry)?;
    if args.grid.len() != 3 {
        return Err(Failure::input("--grid takes three sizes: nr,ntheta,nphi".into()));
    }
    let r_max = args.r_max.unwrap_or_else(|| psi.radial.decay_radius());
    let mut lattice = SampleLattice::interior(r_max, args.grid[0], args.grid[1], args.grid[2]);
    for (given, axis) in [(&args.r, &mut lattice.r), (&args.theta, &mut lattice.theta), (&args.phi, &mut lattice.phi)] {
        if !given.is_empty() {
            axis.clone_from(given);
        }
    }
    let (rows, warnings) = sample_wavefunction(&psi, &lattice);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let doc = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => samples_to_csv(&rows),
        Format::Json => to_json_string(&rows)?,
    };
    match &args.output.out {
        Some(path) => write_output(path, &doc)?,
        None => print!("{doc}"),
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, Failure> {
    for (name, v) in [("--tol-fd", args.tol_fd), ("--tol-residual", args.tol_residual), ("--tol-gram", args.tol_gram)] {
        if !(v > 0.0) {
            return Err(Failure::input(format!("{name} must be positive")));
        }
    }
    let cfg = VerifyConfig {
        tolerances: Tolerances {
            fd: args.tol_fd,
            residual: args.tol_residual,
            gram: args.tol_gram,
        },
        fd_points: args.fd_points,
        residual_points: 25,
        inject: args.inject_erratum.as_deref().map(str::parse::<Erratum>).transpose()?,
    };
    let ranges = args.ranges.ranges()?;
    let policy = args.ranges.policy();
    let report = match (args.params.any_given(), ranges) {
        (true, Some(r)) => {
            let p = args.params.resolve()?;
            VerificationReport::new(verify_params(&p, &r, &policy, &cfg)?, run_audits(&cfg)?, &cfg)
        }
        (true, None) => {
            args.params.resolve()?;
            VerificationReport::new(Vec::new(), run_audits(&cfg)?, &cfg)
        }
        (false, Some(r)) => verify_golden(&r, &policy, &cfg)?,
        (false, None) => VerificationReport::new(Vec::new(), run_audits(&cfg)?, &cfg),
    };
    if let Some(path) = &args.out {
        write_output(path, &to_json_string(&report)?)?;
    }
    print!("{}", verify_summary(&report));
    Ok(if report.all_passed() { 0 } else { 1 })
}

fn verify_summary(report: &VerificationReport) -> String {
    let mut s = String::new();
    if let Some(e) = report.injected {
        let _ = writeln!(s, "injected erratum: {}", e.as_str());
    }
    for e in report.entries.iter().filter(|e| e.verdict == Verdict::Fail) {
        let q = &e.entry.quantum;
        let _ = write!(
            s,
            "FAIL {}(n={}, nbar={}, mbar={}, {}/{})",
            e.case.as_deref().map(|c| format!("{c} ")).unwrap_or_default(),
            q.n,
            q.nbar,
            q.mbar,
            e.entry.radial_branch.as_str(),
            e.entry.angular_branch.as_str()
        );
        if let Some(fd) = &e.fd {
            let _ = write!(s, " E closed={:.10} fd={:.10} rel={:.3e}", fd.closed_form, fd.value, fd.rel_error);
        }
        if let Some(r) = e.residual {
            let _ = write!(s, " residual={r:.3e}");
        }
        if let Some(g) = e.gram_defect {
            let _ = write!(s, " gram={g:.3e}");
        }
        s.push('\n');
    }
    for a in &report.audits {
        let _ = writeln!(
            s,
            "audit {}: oracle={:.10} {}",
            a.name,
            a.oracle,
            if a.confirmed { "erratum refuted, implemented form agrees" } else { "inconclusive" }
        );
        for c in &a.candidates {
            let _ = writeln!(s, "  {} = {:.10} (rel {:.3e})", c.label, c.value, c.rel_error);
        }
    }
    let sm = &report.summary;
    let _ = writeln!(
        s,
        "{} entries: {} passed, {} failed, {} skipped",
        sm.total, sm.passed, sm.failed, sm.skipped
    );
    s
}

fn cmd_classify(params: &ParamArgs, out: &Option<PathBuf>) -> Result<u8, Failure> {
    let p = params.resolve()?;
    let doc = to_json_string(&classify_special_case(&p)?)?;
    match out {
        Some(path) => write_output(path, &doc)?,
        None => print!("{doc}"),
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Spectrum { params, ranges, output } => cmd_spectrum(params, ranges, output),
        Command::Wavefunction(args) => cmd_wavefunction(args),
        Command::Verify(args) => cmd_verify(args),
        Command::NuSolve(args) => nu_solve::run(args),
        Command::Classify { params, out } => cmd_classify(params, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match nuspectra::assembly::with_worker_pool(|| run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
