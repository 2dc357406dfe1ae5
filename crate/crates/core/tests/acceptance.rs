//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::time::Instant;

use nuspectra::angular::{
    angular_gamma_nu, angular_lambda, angular_wavefunction, poschl_teller_level, poschl_teller_parameters,
    AngularScaling,
};
use nuspectra::assembly::{assemble_total, build_spectrum, spectrum_entry, BranchPolicy, Ranges};
use nuspectra::model::{
    angular_constants, angular_constants_from, reduce_params, AngularBranch, AngularConstants, PhysicalParams,
    QuantumNumbers, RadialBranch, ReducedParams,
};
use nuspectra::oracle::fd::{angular_fd_eigenvalues, radial_fd_eigenvalues, Endpoint, DEFAULT_POINTS};
use nuspectra::oracle::gram::{gram_defect, orthonormality_matrix};
use nuspectra::oracle::residual::{interior_points, ode_residual, SeparatedSolution};
use nuspectra::oracle::verify::{golden_suite, run_audits, verify_golden, VerifyConfig};
use nuspectra::radial::{radial_admissibility, radial_energy, radial_epsilon_nu, radial_wavefunction};
use nuspectra::report::to_json_string;

type Outcome = Result<String, String>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: nuspectra::Error) -> String {
    e.to_string()
}

/// Angular branches with a closed-form eigenfunction for these constants.
fn usable_branches(ac: &AngularConstants) -> Vec<AngularBranch> {
    [AngularBranch::S1, AngularBranch::S2]
        .into_iter()
        .filter(|&b| angular_wavefunction(ac, 0, b).is_ok())
        .collect()
}

fn spherical_oscillator() -> Outcome {
    let p = PhysicalParams::new(0.5, 0.0, 0.0, 0.0, 1.0);
    let omega = (2.0 * p.a / p.mass).sqrt();
    let entries = build_spectrum(&p, &Ranges::new(3, 3, 0), &BranchPolicy::s1_only()).map_err(err)?;
    check(entries.len() == 16, format!("expected 16 entries, got {}", entries.len()))?;
    let mut worst: f64 = 0.0;
    for e in &entries {
        let ell = 2 * e.quantum.nbar + 1 + e.quantum.mbar.unsigned_abs();
        let exact = p.hbar * omega * (f64::from(2 * e.quantum.n + ell) + 1.5);
        worst = worst.max(rel(e.energy, exact));
    }
    check(worst <= 1e-12, format!("max rel deviation {worst:.3e}"))?;
    Ok(format!("16 states, max rel deviation {worst:.1e}"))
}

fn nu_independence() -> Outcome {
    // (κ, D̄, B̄)
    let sets = [
        (-0.25, 0.0, 0.0),
        (-0.25, 10.0, 0.5),
        (0.0, 0.0, 1.0),
        (0.75, 0.25, 0.0),
        (2.0, 2.0, 0.0),
        (2.0, -0.25, 3.0),
        (5.0, 1.0, -1.0),
        (10.0, 10.0, 0.0),
        (3.5, 7.25, 2.0),
        (0.1, 4.0, 0.0),
    ];
    let mut worst: f64 = 0.0;
    let mut solves = 0;
    for (kappa, dbar, bbar) in sets {
        let ac = angular_constants_from(kappa + 0.25, dbar, 0).map_err(err)?;
        let r = ReducedParams::dimensionless(1.3, bbar, kappa + 0.25, dbar).map_err(err)?;
        for nbar in 0..=4 {
            let closed = angular_lambda(&ac, nbar, AngularBranch::S1).map_err(err)?.gamma_theta;
            let numeric = angular_gamma_nu(&ac, nbar, AngularBranch::S1, AngularScaling::Quarter).map_err(err)?;
            worst = worst.max(rel(numeric, closed));
            solves += 1;
        }
        let gamma = (bbar + angular_lambda(&ac, 0, AngularBranch::S1).map_err(err)?.lambda).clamp(0.0, 16.0);
        for n in 0..=4 {
            let closed = radial_energy(&r, gamma, n, RadialBranch::Plus).map_err(err)?.epsilon;
            let numeric = radial_epsilon_nu(&r, gamma, n, RadialBranch::Plus).map_err(err)?;
            worst = worst.max(rel(numeric, closed));
            solves += 1;
        }
    }
    check(worst <= 1e-10, format!("max rel deviation {worst:.3e}"))?;
    Ok(format!("{solves} root solves on 10 parameter sets, max rel deviation {worst:.1e}"))
}

fn fd_agreement() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for (name, p) in golden_suite() {
        let r = reduce_params(&p).map_err(err)?;
        let ac = angular_constants(&r, 0).map_err(err)?;
        for branch in usable_branches(&ac) {
            let right = match branch {
                AngularBranch::S1 => Endpoint::InverseSquare(ac.dbar),
                AngularBranch::S2 => Endpoint::Neumann,
            };
            let fd = angular_fd_eigenvalues(ac.kappa, ac.dbar, right, 4, DEFAULT_POINTS).map_err(err)?;
            for (nbar, v) in fd.iter().enumerate() {
                let closed = angular_lambda(&ac, nbar as u32, branch).map_err(err)?.gamma_theta;
                let d = rel(*v, closed);
                check(d <= 1e-5, format!("{name} angular {} nbar={nbar}: rel {d:.3e}", branch.as_str()))?;
                worst = worst.max(d);
                compared += 1;
            }
            let gamma = r.bbar + angular_lambda(&ac, 0, branch).map_err(err)?.lambda;
            let fd = radial_fd_eigenvalues(r.abar, gamma, 4, DEFAULT_POINTS).map_err(err)?;
            for (n, v) in fd.iter().enumerate() {
                let closed = radial_energy(&r, gamma, n as u32, RadialBranch::Plus).map_err(err)?.epsilon;
                let d = rel(*v, closed);
                check(d <= 1e-5, format!("{name} radial gamma={gamma} n={n}: rel {d:.3e}"))?;
                worst = worst.max(d);
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} eigenvalues, max rel error {worst:.1e}"))
}

fn residual_pair<S: SeparatedSolution>(spec: &S) -> Result<(f64, f64), String> {
    let pts = interior_points(spec, 25);
    let exact = ode_residual(spec, spec.eigenvalue(), &pts).map_err(err)?;
    let shifted = ode_residual(spec, 1.01 * spec.eigenvalue(), &pts).map_err(err)?;
    Ok((exact, shifted))
}

fn residuals() -> Outcome {
    let (mut worst, mut least_sensitive, mut count) = (0.0_f64, f64::INFINITY, 0);
    for (name, p) in golden_suite() {
        let r = reduce_params(&p).map_err(err)?;
        let ac = angular_constants(&r, 0).map_err(err)?;
        for branch in usable_branches(&ac) {
            for k in 0..=4 {
                let ang = angular_wavefunction(&ac, k, branch).map_err(err)?;
                let gamma = r.bbar + ang.gamma_theta - 0.25;
                let rad = radial_wavefunction(&r, gamma, k).map_err(err)?;
                for (label, (exact, shifted)) in [("angular", residual_pair(&ang)?), ("radial", residual_pair(&rad)?)] {
                    check(exact <= 1e-8, format!("{name} {label} index {k}: residual {exact:.3e}"))?;
                    check(shifted > 1e-3, format!("{name} {label} index {k}: perturbed residual {shifted:.3e}"))?;
                    worst = worst.max(exact);
                    least_sensitive = least_sensitive.min(shifted);
                    count += 1;
                }
            }
        }
    }
    Ok(format!(
        "{count} eigenfunctions, max residual {worst:.1e}, min residual after 1% shift {least_sensitive:.1e}"
    ))
}

fn orthonormality() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for (name, p) in golden_suite() {
        let r = reduce_params(&p).map_err(err)?;
        let ac = angular_constants(&r, 0).map_err(err)?;
        for branch in usable_branches(&ac) {
            let ang: Vec<_> = (0..5).map(|k| angular_wavefunction(&ac, k, branch)).collect::<Result<_, _>>().map_err(err)?;
            let gamma = r.bbar + ang[0].gamma_theta - 0.25;
            let rad: Vec<_> = (0..5).map(|n| radial_wavefunction(&r, gamma, n)).collect::<Result<_, _>>().map_err(err)?;
            let d = gram_defect(&orthonormality_matrix(&ang).map_err(err)?)
                .max(gram_defect(&orthonormality_matrix(&rad).map_err(err)?));
            check(d <= 1e-8, format!("{name} {}: Gram defect {d:.3e}", branch.as_str()))?;
            worst = worst.max(d);
            for (n, nbar) in [(0, 0), (1, 1)] {
                let e = spectrum_entry(&r, QuantumNumbers::new(n, nbar, 0), RadialBranch::Plus, branch).map_err(err)?;
                let norm = assemble_total(&r, &e).map_err(err)?.norm_3d();
                check((norm - 1.0).abs() <= 1e-8, format!("{name} ({n},{nbar}): 3D norm {norm}"))?;
                worst_norm = worst_norm.max((norm - 1.0).abs());
            }
        }
    }
    Ok(format!("max Gram defect {worst:.1e}, max |3D norm - 1| {worst_norm:.1e}"))
}

fn poschl_teller() -> Outcome {
    let ac = angular_constants_from(2.25, 2.0, 0).map_err(err)?;
    let (chi, lam) = poschl_teller_parameters(&ac);
    check((chi - 2.0).abs() < 1e-12 && (lam - 2.0).abs() < 1e-12, format!("depths ({chi}, {lam})"))?;
    let fd = angular_fd_eigenvalues(ac.kappa, ac.dbar, Endpoint::InverseSquare(ac.dbar), 4, DEFAULT_POINTS).map_err(err)?;
    let (mut closed_err, mut fd_err) = (0.0_f64, 0.0_f64);
    for nbar in 0..4u32 {
        let target = (4.0 + 2.0 * f64::from(nbar)).powi(2);
        let g = angular_lambda(&ac, nbar, AngularBranch::S1).map_err(err)?.gamma_theta;
        closed_err = closed_err.max(rel(g, target)).max(rel(poschl_teller_level(chi, lam, nbar), target));
        fd_err = fd_err.max(rel(fd[nbar as usize], target));
    }
    check(closed_err <= 1e-10, format!("closed form rel {closed_err:.3e}"))?;
    check(fd_err <= 1e-5, format!("FD rel {fd_err:.3e}"))?;
    Ok(format!("(4+2n)^2 for n <= 3: closed form {closed_err:.1e}, FD {fd_err:.1e}"))
}

fn branch_admissibility() -> Outcome {
    for i in 0..=64 {
        let gamma = -0.25 + i as f64 * 0.03125;
        let v = radial_admissibility(gamma, RadialBranch::Minus).map_err(err)?;
        let rejected = !v.is_admissible();
        check(rejected == (gamma >= 0.75), format!("gamma = {gamma}: rejected = {rejected}"))?;
    }
    let r = ReducedParams::dimensionless(1.0, 0.0, 2.25, 2.0).map_err(err)?;
    let e = spectrum_entry(&r, QuantumNumbers::new(0, 0, 0), RadialBranch::Plus, AngularBranch::S2).map_err(err)?;
    check(!e.admissibility.is_admissible(), "s2 at kappa = Dbar = 2 was not rejected")?;
    let why = e.admissibility.reason();
    check(why.contains("non-normalizable") && why.contains("b = -1"), format!("reason {why:?}"))?;
    Ok(format!("minus branch rejected exactly for gamma >= 3/4; s2 rejected: {why}"))
}

fn erratum_audits() -> Outcome {
    let cfg = VerifyConfig::default();
    let audits = run_audits(&cfg).map_err(err)?;
    let report = verify_golden(&Ranges::new(0, 0, 0), &BranchPolicy::default(), &cfg).map_err(err)?;
    check(report.audits == audits, "audits missing from the verification report")?;
    let mut parts = Vec::new();
    for a in &audits {
        check(a.confirmed, format!("audit {} not confirmed", a.name))?;
        let wrong = &a.candidates[0];
        let implemented = &a.candidates[1];
        parts.push(format!(
            "{}: erratum rel {:.2e}, implemented rel {:.1e}",
            a.name, wrong.rel_error, implemented.rel_error
        ));
    }
    Ok(parts.join("; "))
}

fn determinism() -> Outcome {
    let cfg = VerifyConfig::default();
    let ranges = Ranges::new(3, 3, 0);
    let run = || -> Result<String, String> {
        to_json_string(&verify_golden(&ranges, &BranchPolicy::default(), &cfg).map_err(err)?).map_err(err)
    };
    let (a, b) = (run()?, run()?);
    check(a == b, "reports differ between runs")?;
    Ok(format!("two verify runs, {} identical bytes", a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("spherical-oscillator reduction", spherical_oscillator),
        ("NU-engine independence", nu_independence),
        ("FD oracle agreement", fd_agreement),
        ("ODE residuals and sensitivity", residuals),
        ("orthonormality and 3D norm", orthonormality),
        ("Poschl-Teller mapping", poschl_teller),
        ("branch admissibility", branch_admissibility),
        ("erratum audits", erratum_audits),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
