//! Independent checks of spectrum entries: finite differences on the
//! separated equations, ODE residuals and Gram matrices.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::angular::{angular_gamma_nu, angular_wavefunction, AngularScaling};
use crate::assembly::{build_spectrum_reduced, with_worker_pool, BranchPolicy, Ranges};
use crate::error::{Error, Result};
use crate::model::{
    angular_constants, angular_constants_from, reduce_params, AngularBranch, Admissibility, PhysicalParams,
    RadialBranch, ReducedParams, SpectrumEntry,
};
use crate::oracle::fd::{angular_fd_eigenvalues, radial_fd_eigenvalues, Endpoint, DEFAULT_POINTS};
use crate::oracle::gram::{gram_defect, orthonormality_matrix};
use crate::oracle::residual::{interior_points, ode_residual};
use crate::radial::{radial_energy, radial_wavefunction_branch};

/// Largest index the FD oracle resolves.
const FD_MAX_INDEX: u32 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub fd: f64,
    pub residual: f64,
    pub gram: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fd: 1e-5,
            residual: 1e-8,
            gram: 1e-8,
        }
    }
}

/// Known errata that can be substituted for the implemented formula to
/// show that the oracle catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Erratum {
    /// `E = Ã[(2n+1) + √(1 + 4Λ + B̄)]`.
    RemarkIv,
}

impl Erratum {
    pub fn as_str(&self) -> &'static str {
        match self {
            Erratum::RemarkIv => "remark-iv",
        }
    }
}

impl std::str::FromStr for Erratum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "remark-iv" => Ok(Erratum::RemarkIv),
            other => Err(Error::InvalidInput(format!("unknown erratum {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub tolerances: Tolerances,
    pub fd_points: usize,
    pub residual_points: usize,
    pub inject: Option<Erratum>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            fd_points: DEFAULT_POINTS,
            residual_points: 25,
            inject: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

/// Oracle value next to the closed form it checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub value: f64,
    pub closed_form: f64,
    pub rel_error: f64,
}

impl Comparison {
    fn new(value: f64, closed_form: f64) -> Self {
        Self {
            value,
            closed_form,
            rel_error: (value - closed_form).abs() / closed_form.abs().max(f64::MIN_POSITIVE),
        }
    }
}

/// FD results: the energy from chaining the angular and radial oracles,
/// plus each separated eigenvalue on its own.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdCheck {
    pub value: f64,
    pub closed_form: f64,
    pub rel_error: f64,
    pub angular: Option<Comparison>,
    pub radial: Option<Comparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub entry: SpectrumEntry,
    pub fd: Option<FdCheck>,
    pub residual: Option<f64>,
    pub gram_defect: Option<f64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditCandidate {
    pub label: String,
    pub value: f64,
    pub rel_error: f64,
    pub within_tolerance: bool,
}

/// An erroneous formula and its replacement, both checked against the oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRecord {
    pub name: String,
    pub description: String,
    pub inputs: BTreeMap<String, f64>,
    pub oracle: f64,
    pub candidates: Vec<AuditCandidate>,
    /// True when the implemented formula agrees and the erroneous one does not.
    pub confirmed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub injected: Option<Erratum>,
    pub tolerances: Tolerances,
    pub entries: Vec<EntryReport>,
    pub audits: Vec<AuditRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(entries: Vec<EntryReport>, audits: Vec<AuditRecord>, cfg: &VerifyConfig) -> Self {
        let mut summary = Summary {
            total: entries.len(),
            ..Summary::default()
        };
        for e in &entries {
            match e.verdict {
                Verdict::Pass => summary.passed += 1,
                Verdict::Fail => summary.failed += 1,
                Verdict::Skipped => summary.skipped += 1,
            }
        }
        Self {
            injected: cfg.inject,
            tolerances: cfg.tolerances,
            entries,
            audits,
            summary,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }
}

/// Closed-form energy under test, with an erratum substituted if requested.
pub fn energy_under_test(r: &ReducedParams, entry: &SpectrumEntry, inject: Option<Erratum>) -> f64 {
    match inject {
        Some(Erratum::RemarkIv) if entry.radial_branch == RadialBranch::Plus => {
            remark_iv_erratum(r.atilde, entry.quantum.n, entry.lambda, r.bbar)
        }
        _ => entry.energy,
    }
}

fn remark_iv_erratum(atilde: f64, n: u32, lambda: f64, bbar: f64) -> f64 {
    atilde * ((2 * n + 1) as f64 + (1.0 + 4.0 * lambda + bbar).sqrt())
}

/// Right-hand boundary the FD oracle should use for an entry, if any.
fn angular_endpoint(entry: &SpectrumEntry, dbar: f64) -> Option<Endpoint> {
    match entry.angular_branch {
        AngularBranch::S1 => Some(Endpoint::InverseSquare(dbar)),
        AngularBranch::S2 if dbar == 0.0 => Some(Endpoint::Neumann),
        AngularBranch::S2 => None,
    }
}

type AngularKey = (u64, u64, bool);

fn angular_key(kappa: f64, dbar: f64, right: Endpoint) -> AngularKey {
    (kappa.to_bits(), dbar.to_bits(), right == Endpoint::Neumann)
}

/// Batch FD solves: each distinct separated equation is solved once for as
/// many levels as any entry needs.
fn solve_batch<K: Ord + Copy + Send + Sync>(
    requests: &BTreeMap<K, u32>,
    solve: impl Fn(K, usize) -> Result<Vec<f64>> + Sync,
) -> BTreeMap<K, Result<Vec<f64>>> {
    let jobs: Vec<(K, u32)> = requests.iter().map(|(k, v)| (*k, *v)).collect();
    jobs.par_iter()
        .map(|&(k, top)| (k, solve(k, top as usize + 1)))
        .collect()
}

fn lookup<K: Ord>(table: &BTreeMap<K, Result<Vec<f64>>>, key: &K, index: u32) -> std::result::Result<f64, String> {
    match table.get(key) {
        Some(Ok(v)) => v.get(index as usize).copied().ok_or_else(|| "fd level missing".to_string()),
        Some(Err(e)) => Err(e.to_string()),
        None => Err("fd level missing".to_string()),
    }
}

/// Verify a list of entries sharing one set of reduced parameters.
pub fn verify_entries(r: &ReducedParams, entries: &[SpectrumEntry], cfg: &VerifyConfig) -> Result<Vec<EntryReport>> {
    with_worker_pool(|| verify_entries_inner(r, entries, cfg))
}

fn verify_entries_inner(r: &ReducedParams, entries: &[SpectrumEntry], cfg: &VerifyConfig) -> Result<Vec<EntryReport>> {
    let mut consts = BTreeMap::new();
    for e in entries {
        if let std::collections::btree_map::Entry::Vacant(slot) = consts.entry(e.quantum.mbar) {
            slot.insert(angular_constants(r, e.quantum.mbar)?);
        }
    }
    let fd_wanted =
        |e: &SpectrumEntry| e.admissibility.is_admissible() && e.quantum.n <= FD_MAX_INDEX && e.quantum.nbar <= FD_MAX_INDEX;

    // angular levels first, since the chained radial check needs them
    let mut ang_req: BTreeMap<AngularKey, u32> = BTreeMap::new();
    let mut ang_endpoint: BTreeMap<AngularKey, Endpoint> = BTreeMap::new();
    for e in entries.iter().filter(|e| fd_wanted(e)) {
        let ac = &consts[&e.quantum.mbar];
        if let Some(right) = angular_endpoint(e, ac.dbar) {
            let key = angular_key(ac.kappa, ac.dbar, right);
            ang_endpoint.insert(key, right);
            let top = ang_req.entry(key).or_insert(0);
            *top = (*top).max(e.quantum.nbar);
        }
    }
    let ang_fd = solve_batch(&ang_req, |key, count| {
        let (kappa, dbar) = (f64::from_bits(key.0), f64::from_bits(key.1));
        angular_fd_eigenvalues(kappa, dbar, ang_endpoint[&key], count, cfg.fd_points)
    });

    let angular_of = |e: &SpectrumEntry| -> Option<std::result::Result<f64, String>> {
        let ac = &consts[&e.quantum.mbar];
        let right = angular_endpoint(e, ac.dbar)?;
        Some(lookup(&ang_fd, &angular_key(ac.kappa, ac.dbar, right), e.quantum.nbar))
    };

    let mut rad_req: BTreeMap<u64, u32> = BTreeMap::new();
    for e in entries.iter().filter(|e| fd_wanted(e) && e.radial_branch == RadialBranch::Plus) {
        let mut gammas = vec![e.gamma];
        if let Some(Ok(g)) = angular_of(e) {
            gammas.push(r.bbar + g - 0.25);
        }
        for g in gammas {
            let top = rad_req.entry(g.to_bits()).or_insert(0);
            *top = (*top).max(e.quantum.n);
        }
    }
    let rad_fd = solve_batch(&rad_req, |key, count| {
        radial_fd_eigenvalues(r.abar, f64::from_bits(key), count, cfg.fd_points)
    });

    let reports = entries
        .par_iter()
        .map(|e| {
            let mut notes = Vec::new();
            if let Admissibility::Rejected(why) = &e.admissibility {
                notes.push(why.clone());
                return Ok(EntryReport {
                    case: None,
                    entry: e.clone(),
                    fd: None,
                    residual: None,
                    gram_defect: None,
                    verdict: Verdict::Skipped,
                    notes,
                    tolerances: cfg.tolerances,
                });
            }
            let ac = &consts[&e.quantum.mbar];
            let energy = energy_under_test(r, e, cfg.inject);
            let fd = fd_check(r, e, energy, &angular_of, &rad_fd, &mut notes);
            let (residual, gram) = analytic_checks(r, e, energy, ac, cfg)?;
            let tol = cfg.tolerances;
            let mut ok = residual <= tol.residual && gram <= tol.gram;
            if let Some(f) = &fd {
                ok &= f.rel_error <= tol.fd;
                ok &= f.angular.is_none_or(|c| c.rel_error <= tol.fd);
                ok &= f.radial.is_none_or(|c| c.rel_error <= tol.fd);
            }
            Ok(EntryReport {
                case: None,
                entry: e.clone(),
                fd,
                residual: Some(residual),
                gram_defect: Some(gram),
                verdict: if ok { Verdict::Pass } else { Verdict::Fail },
                notes,
                tolerances: tol,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reports)
}

fn fd_check(
    r: &ReducedParams,
    e: &SpectrumEntry,
    energy: f64,
    angular_of: &(dyn Fn(&SpectrumEntry) -> Option<std::result::Result<f64, String>> + Sync),
    rad_fd: &BTreeMap<u64, Result<Vec<f64>>>,
    notes: &mut Vec<String>,
) -> Option<FdCheck> {
    if e.admissibility.is_conditional() {
        notes.push("fd skipped: the oracle only realises the Friedrichs boundary condition".into());
        return None;
    }
    if e.quantum.n > FD_MAX_INDEX || e.quantum.nbar > FD_MAX_INDEX {
        notes.push(format!("fd skipped: levels above {FD_MAX_INDEX} are not resolved by the oracle"));
        return None;
    }
    let gamma_fd = match angular_of(e) {
        Some(Ok(g)) => g,
        Some(Err(why)) => {
            notes.push(format!("angular fd failed: {why}"));
            return None;
        }
        None => {
            notes.push("fd skipped: no boundary condition for this angular branch".into());
            return None;
        }
    };
    let angular = Comparison::new(gamma_fd, e.lambda + 0.25);
    let radial_eps = |g: f64| lookup(rad_fd, &g.to_bits(), e.quantum.n);
    let radial = match radial_eps(e.gamma) {
        Ok(v) => match radial_energy(r, e.gamma, e.quantum.n, e.radial_branch) {
            Ok(closed) => Some(Comparison::new(v, closed.epsilon)),
            Err(err) => {
                notes.push(format!("radial closed form failed: {err}"));
                None
            }
        },
        Err(why) => {
            notes.push(format!("radial fd failed: {why}"));
            None
        }
    };
    match radial_eps(r.bbar + gamma_fd - 0.25) {
        Ok(eps) => {
            let c = Comparison::new(r.energy_from_epsilon(eps), energy);
            Some(FdCheck {
                value: c.value,
                closed_form: c.closed_form,
                rel_error: c.rel_error,
                angular: Some(angular),
                radial,
            })
        }
        Err(why) => {
            notes.push(format!("radial fd failed: {why}"));
            None
        }
    }
}

/// Worst ODE residual of the two components and worst Gram defect against
/// the lower states of the same families.
fn analytic_checks(
    r: &ReducedParams,
    e: &SpectrumEntry,
    energy: f64,
    ac: &crate::model::AngularConstants,
    cfg: &VerifyConfig,
) -> Result<(f64, f64)> {
    let radial: Vec<_> = (0..=e.quantum.n)
        .map(|n| radial_wavefunction_branch(r, e.gamma, n, e.radial_branch))
        .collect::<Result<_>>()?;
    let angular: Vec<_> = (0..=e.quantum.nbar)
        .map(|nb| angular_wavefunction(ac, nb, e.angular_branch))
        .collect::<Result<_>>()?;
    let (rs, asp) = (radial.last().unwrap(), angular.last().unwrap());
    let eps = r.epsilon_from_energy(energy);
    let res_r = ode_residual(rs, eps, &interior_points(rs, cfg.residual_points))?;
    let res_a = ode_residual(asp, e.lambda + 0.25, &interior_points(asp, cfg.residual_points))?;
    let gram = gram_defect(&orthonormality_matrix(&radial)?).max(gram_defect(&orthonormality_matrix(&angular)?));
    Ok((res_r.max(res_a), gram))
}

/// Build and verify the spectrum of one parameter set.
pub fn verify_params(
    p: &PhysicalParams,
    ranges: &Ranges,
    policy: &BranchPolicy,
    cfg: &VerifyConfig,
) -> Result<Vec<EntryReport>> {
    let r = reduce_params(p)?;
    let entries = build_spectrum_reduced(&r, ranges, policy)?;
    verify_entries(&r, &entries, cfg)
}

/// Reference parameter sets checked by default.
pub fn golden_suite() -> Vec<(&'static str, PhysicalParams)> {
    vec![
        ("spherical_oscillator", PhysicalParams::new(0.5, 0.0, 0.0, 0.0, 1.0)),
        ("oscillator_inverse_square", PhysicalParams::new(0.5, 1.5, 0.0, 0.0, 0.0)),
        ("double_ring", PhysicalParams::new(0.5, 0.0, 1.125, 1.0, 1.0)),
    ]
}

/// Verify every golden case and attach the formula audits.
pub fn verify_golden(ranges: &Ranges, policy: &BranchPolicy, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let mut all = Vec::new();
    for (name, p) in golden_suite() {
        for mut rep in verify_params(&p, ranges, policy, cfg)? {
            rep.case = Some(name.to_string());
            all.push(rep);
        }
    }
    Ok(VerificationReport::new(all, run_audits(cfg)?, cfg))
}

fn candidate(label: &str, value: f64, oracle: f64, tol: f64) -> AuditCandidate {
    let rel_error = (value - oracle).abs() / oracle.abs();
    AuditCandidate {
        label: label.to_string(),
        value,
        rel_error,
        within_tolerance: rel_error <= tol,
    }
}

/// Erroneous energy formula against the implemented one at `Ã = 1`, `B̄ = 3`,
/// `Λ = 2`, `n = 0`.
pub fn audit_energy_formula(cfg: &VerifyConfig) -> Result<AuditRecord> {
    let (bbar, lambda) = (3.0, 2.0);
    let r = ReducedParams::dimensionless(1.0, bbar, 0.0, 0.0)?;
    let gamma = bbar + lambda;
    let oracle = r.energy_from_epsilon(radial_fd_eigenvalues(r.abar, gamma, 1, cfg.fd_points)?[0]);
    let implemented = radial_energy(&r, gamma, 0, RadialBranch::Plus)?.energy;
    let erratum = remark_iv_erratum(r.atilde, 0, lambda, bbar);
    let tol = cfg.tolerances.fd;
    let candidates = vec![
        candidate("erratum: A~[(2n+1) + sqrt(1 + 4 Lambda + Bbar)]", erratum, oracle, tol),
        candidate("implemented: A~[(2n+1) + sqrt(1/4 + Lambda + Bbar)]", implemented, oracle, tol),
    ];
    let confirmed = !candidates[0].within_tolerance && candidates[1].within_tolerance;
    Ok(AuditRecord {
        name: "remark-iv".into(),
        description: "ground-state energy with a centrifugal term".into(),
        inputs: BTreeMap::from([
            ("atilde".to_string(), r.atilde),
            ("bbar".to_string(), bbar),
            ("lambda".to_string(), lambda),
            ("n".to_string(), 0.0),
        ]),
        oracle,
        candidates,
        confirmed,
    })
}

/// `Γ` from the NU condition under both coefficient scalings, against FD,
/// at `κ = D̄ = 2`, `n̄ = 0`.
pub fn audit_angular_scaling(cfg: &VerifyConfig) -> Result<AuditRecord> {
    let ac = angular_constants_from(2.25, 2.0, 0)?;
    let oracle = angular_fd_eigenvalues(ac.kappa, ac.dbar, Endpoint::InverseSquare(ac.dbar), 1, cfg.fd_points)?[0];
    let quarter = angular_gamma_nu(&ac, 0, AngularBranch::S1, AngularScaling::Quarter)?;
    let half = angular_gamma_nu(&ac, 0, AngularBranch::S1, AngularScaling::Half)?;
    let tol = cfg.tolerances.fd;
    let candidates = vec![
        candidate("erratum: Gamma/2 scaling", half, oracle, tol),
        candidate("implemented: Gamma/4 scaling", quarter, oracle, tol),
    ];
    let confirmed = !candidates[0].within_tolerance && candidates[1].within_tolerance;
    Ok(AuditRecord {
        name: "angular-scaling".into(),
        description: "angular separation constant from the NU condition".into(),
        inputs: BTreeMap::from([
            ("kappa".to_string(), ac.kappa),
            ("dbar".to_string(), ac.dbar),
            ("nbar".to_string(), 0.0),
        ]),
        oracle,
        candidates,
        confirmed,
    })
}

pub fn run_audits(cfg: &VerifyConfig) -> Result<Vec<AuditRecord>> {
    Ok(vec![audit_energy_formula(cfg)?, audit_angular_scaling(cfg)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::QuantumNumbers;

    fn small() -> Ranges {
        Ranges::new(1, 1, 0)
    }

    #[test]
    fn golden_cases_pass() {
        let report = verify_golden(&small(), &BranchPolicy::default(), &VerifyConfig::default()).unwrap();
        assert!(report.all_passed(), "{:#?}", report.summary);
        assert!(report.summary.passed > 0);
        for e in &report.entries {
            if e.verdict == Verdict::Pass {
                let fd = e.fd.as_ref().expect("fd ran");
                assert!(fd.rel_error <= 1e-5);
            }
        }
        // the double ring s2 rows are rejected and skipped
        assert!(report
            .entries
            .iter()
            .any(|e| e.verdict == Verdict::Skipped && e.notes[0].contains("b = -1")));
        assert!(report.audits.iter().all(|a| a.confirmed));
    }

    #[test]
    fn injected_erratum_fails() {
        let cfg = VerifyConfig {
            inject: Some(Erratum::RemarkIv),
            ..VerifyConfig::default()
        };
        let p = PhysicalParams::new(0.5, 0.0, 0.0, 0.0, 1.0);
        let reps = verify_params(&p, &Ranges::new(0, 0, 0), &BranchPolicy::s1_only(), &cfg).unwrap();
        assert_eq!(reps[0].verdict, Verdict::Fail);
        assert!(reps[0].fd.as_ref().unwrap().rel_error > 0.1);
    }

    #[test]
    fn audits_match_known_values() {
        let cfg = VerifyConfig::default();
        let iv = audit_energy_formula(&cfg).unwrap();
        assert!((iv.candidates[0].value - (1.0 + 12f64.sqrt())).abs() < 1e-12);
        assert!((iv.oracle - (1.0 + 5.25f64.sqrt())).abs() < 1e-6);
        let sc = audit_angular_scaling(&cfg).unwrap();
        assert!((sc.candidates[0].value - 8.0).abs() < 1e-8);
        assert!((sc.oracle - 16.0).abs() < 1e-4);
        assert!(iv.confirmed && sc.confirmed);
    }

    #[test]
    fn conditional_entries_skip_fd_only() {
        // γ = B̄ + Λ = 0.5 puts the minus radial root inside the limit-circle range
        let r = ReducedParams::dimensionless(1.0, -1.5, 0.0, 0.0).unwrap();
        let entry = crate::assembly::spectrum_entry(&r, QuantumNumbers::new(0, 0, 0), RadialBranch::Minus, AngularBranch::S1)
            .unwrap();
        assert!(entry.admissibility.is_conditional(), "{:?}", entry.admissibility);
        let rep = &verify_entries(&r, &[entry], &VerifyConfig::default()).unwrap()[0];
        assert!(rep.fd.is_none());
        assert!(rep.residual.unwrap() <= 1e-8);
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    #[test]
    fn erratum_names_round_trip() {
        let e: Erratum = "remark-iv".parse().unwrap();
        assert_eq!(e.as_str(), "remark-iv");
        assert!("other".parse::<Erratum>().is_err());
    }
}
