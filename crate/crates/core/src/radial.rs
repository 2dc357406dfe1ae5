//! Radial equation `u'' + (ε − Ā r² − γ/r²) u = 0` on `(0, ∞)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Admissibility, RadialBranch, ReducedParams};
use crate::nu::{self, NuProblem};
use crate::specfun::{laguerre_log_norm, laguerre_with_derivatives};

/// Closed-form radial eigenvalue for one branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialEnergy {
    pub energy: f64,
    /// `2mE/ħ²`.
    pub epsilon: f64,
    pub branch: RadialBranch,
    pub normalizable: bool,
    pub admissibility: Admissibility,
}

fn indicial_root(gamma: f64) -> Result<f64> {
    let disc = 1.0 + 4.0 * gamma;
    if !(disc >= 0.0) {
        return Err(Error::ComplexIndex(format!(
            "1 + 4γ = {disc} < 0 gives a complex radial exponent"
        )));
    }
    Ok(disc.sqrt())
}

/// Power `s` in `u ~ r^s` at the origin for the given branch.
pub fn radial_exponent(gamma: f64, branch: RadialBranch) -> Result<f64> {
    let root = indicial_root(gamma)?;
    Ok(match branch {
        RadialBranch::Plus => 0.5 * (1.0 + root),
        RadialBranch::Minus => 0.5 * (1.0 - root),
    })
}

pub fn radial_admissibility(gamma: f64, branch: RadialBranch) -> Result<Admissibility> {
    let s = radial_exponent(gamma, branch)?;
    Ok(match branch {
        RadialBranch::Plus => Admissibility::Admissible,
        RadialBranch::Minus if s > -0.5 => Admissibility::Conditional(format!(
            "minus radial branch: u ~ r^{s:.6} at r = 0 is square-integrable only under a non-Friedrichs boundary condition"
        )),
        RadialBranch::Minus => Admissibility::Rejected(format!(
            "minus radial branch is non-normalizable: u ~ r^{s:.6} at r = 0 with gamma = {gamma} >= 3/4"
        )),
    })
}

/// `E = Ã[(2n+1) ± ½√(1+4γ)]`.
pub fn radial_energy(r: &ReducedParams, gamma: f64, n: u32, branch: RadialBranch) -> Result<RadialEnergy> {
    let root = indicial_root(gamma)?;
    let sign = match branch {
        RadialBranch::Plus => 1.0,
        RadialBranch::Minus => -1.0,
    };
    let epsilon = r.abar.sqrt() * (4.0 * f64::from(n) + 2.0 + sign * root);
    let admissibility = radial_admissibility(gamma, branch)?;
    Ok(RadialEnergy {
        energy: r.energy_from_epsilon(epsilon),
        epsilon,
        branch,
        normalizable: admissibility.is_admissible(),
        admissibility,
    })
}

/// Hypergeometric form of the radial equation in `z = r²`.
pub fn radial_nu_problem(r: &ReducedParams, gamma: f64, epsilon: f64) -> Result<NuProblem> {
    NuProblem::from_coeffs(&[1.0], &[0.0, 2.0], &[-gamma, epsilon, -r.abar])
}

/// Reduced eigenvalue ε found numerically from the NU quantization
/// condition, without using the closed form.
pub fn radial_epsilon_nu(r: &ReducedParams, gamma: f64, n: u32, branch: RadialBranch) -> Result<f64> {
    let index = match branch {
        RadialBranch::Plus => 0,
        RadialBranch::Minus => 1,
    };
    let family = |eps: f64| radial_nu_problem(r, gamma, eps);
    let f = |eps: f64| -> Result<f64> { nu::quantization_residual(&family(eps)?, index, n) };
    let lo = -1e3 * (1.0 + r.abar.sqrt());
    let (lo, hi) = nu::expand_bracket(f, lo, 1.0)?;
    nu::solve_eigenparameter(family, n, (lo, hi), index)
}

/// `u(r) = norm · r^s · exp(−c r²/2) · L_n^μ(c r²)` with `c = √Ā`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialWavefunctionSpec {
    pub branch: RadialBranch,
    pub power_exponent: f64,
    /// `c/2`, the rate in `exp(−rate·r²)`.
    pub gaussian_rate: f64,
    pub mu: f64,
    pub laguerre_argument_scale: f64,
    pub n: u32,
    pub norm: f64,
    pub abar: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

pub fn radial_wavefunction(r: &ReducedParams, gamma: f64, n: u32) -> Result<RadialWavefunctionSpec> {
    radial_wavefunction_branch(r, gamma, n, RadialBranch::Plus)
}

pub fn radial_wavefunction_branch(
    r: &ReducedParams,
    gamma: f64,
    n: u32,
    branch: RadialBranch,
) -> Result<RadialWavefunctionSpec> {
    let verdict = radial_admissibility(gamma, branch)?;
    if !verdict.is_admissible() {
        return Err(Error::Inadmissible(verdict.reason()));
    }
    let s = radial_exponent(gamma, branch)?;
    let mu = s - 0.5;
    let c = r.abar.sqrt();
    let epsilon = radial_energy(r, gamma, n, branch)?.epsilon;
    // ∫ u² dr = norm² · Γ(n+μ+1) / (2 n! Ā^{(μ+1)/2})
    let log_norm_sq = 2f64.ln() + 0.5 * (mu + 1.0) * r.abar.ln() - laguerre_log_norm(n, mu);
    Ok(RadialWavefunctionSpec {
        branch,
        power_exponent: s,
        gaussian_rate: 0.5 * c,
        mu,
        laguerre_argument_scale: c,
        n,
        norm: (0.5 * log_norm_sq).exp(),
        abar: r.abar,
        gamma,
        epsilon,
    })
}

impl RadialWavefunctionSpec {
    /// `(u, u', u'')` at `r > 0`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let c = self.laguerre_argument_scale;
        let s = self.power_exponent;
        let log_f = s * r.ln() - 0.5 * c * r * r;
        if log_f < -745.0 {
            return (0.0, 0.0, 0.0);
        }
        let f = self.norm * log_f.exp();
        let g1 = s / r - c * r;
        let g2 = g1 * g1 - s / (r * r) - c;
        let (l, lx, lxx) = laguerre_with_derivatives(self.n, self.mu, c * r * r);
        let dx = 2.0 * c * r;
        let u = f * l;
        let du = f * (g1 * l + lx * dx);
        let d2u = f * (g2 * l + 2.0 * g1 * lx * dx + lxx * dx * dx + lx * 2.0 * c);
        (u, du, d2u)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    /// The separated-equation potential `Ā r² + γ/r²`.
    pub fn potential(&self, r: f64) -> f64 {
        self.abar * r * r + self.gamma / (r * r)
    }

    /// Classical turning point `Ā r² + γ/r² = ε` (outer root).
    pub fn turning_point(&self) -> f64 {
        let disc = (self.epsilon * self.epsilon - 4.0 * self.abar * self.gamma).max(0.0);
        ((self.epsilon + disc.sqrt()) / (2.0 * self.abar)).sqrt()
    }

    /// Radius beyond which the Gaussian factor is negligible.
    pub fn decay_radius(&self) -> f64 {
        self.turning_point().max((40.0 / self.laguerre_argument_scale).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nu::{all_admissible_branches, classify_polynomial_family, factor_spec, PolynomialFamily};
    use crate::specfun::CompositeRule;

    fn rp(abar: f64) -> ReducedParams {
        ReducedParams::dimensionless(abar, 0.0, 0.0, 0.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn energy_examples() {
        let e = radial_energy(&rp(1.0), 2.0, 0, RadialBranch::Plus).unwrap();
        assert!(rel(e.energy, 2.5) < 1e-14 && rel(e.epsilon, 5.0) < 1e-14);
        let e = radial_energy(&rp(1.0), 0.0, 1, RadialBranch::Plus).unwrap();
        assert!(rel(e.energy, 3.5) < 1e-14);
        let e = radial_energy(&rp(1.0), 3.0, 0, RadialBranch::Plus).unwrap();
        assert!(rel(e.energy, 1.0 + 0.5 * 13f64.sqrt()) < 1e-14);
        let e = radial_energy(&rp(1.0), 0.0, 0, RadialBranch::Minus).unwrap();
        assert!(rel(e.energy, 0.5) < 1e-14 && e.normalizable);
        assert!(e.admissibility.is_conditional());
    }

    #[test]
    fn minus_branch_rejected_from_three_quarters() {
        for (gamma, ok) in [(0.0, true), (0.74, true), (0.75, false), (2.0, false)] {
            let e = radial_energy(&rp(1.0), gamma, 0, RadialBranch::Minus).unwrap();
            assert_eq!(e.normalizable, ok, "gamma {gamma}");
        }
        assert!(radial_wavefunction_branch(&rp(1.0), 2.0, 0, RadialBranch::Minus).is_err());
    }

    #[test]
    fn complex_exponent_is_an_error() {
        assert!(matches!(
            radial_energy(&rp(1.0), -0.3, 0, RadialBranch::Plus),
            Err(Error::ComplexIndex(_))
        ));
    }

    #[test]
    fn nu_problem_examples() {
        let p = radial_nu_problem(&rp(1.0), 0.0, 3.0).unwrap();
        assert_eq!(p.sigma_tilde.coeffs(), &[0.0, 3.0, -1.0]);
        let p = radial_nu_problem(&rp(4.0), 2.0, 0.0).unwrap();
        assert_eq!(p.sigma_tilde.coeffs(), &[-2.0, 0.0, -4.0]);
    }

    #[test]
    fn nu_pipeline_reproduces_closed_form() {
        for abar in [1.0, 4.0, 0.3] {
            for gamma in [0.0, 0.5, 2.0, 3.0, 15.75] {
                for n in 0..=4 {
                    let r = rp(abar);
                    let eps = radial_epsilon_nu(&r, gamma, n, RadialBranch::Plus).unwrap();
                    let closed = radial_energy(&r, gamma, n, RadialBranch::Plus).unwrap();
                    assert!(rel(r.energy_from_epsilon(eps), closed.energy) < 1e-10);
                }
            }
        }
        let r = rp(1.0);
        let eps = radial_epsilon_nu(&r, 0.5, 2, RadialBranch::Minus).unwrap();
        let closed = radial_energy(&r, 0.5, 2, RadialBranch::Minus).unwrap();
        assert!(rel(eps, closed.epsilon) < 1e-10);
    }

    #[test]
    fn nu_factors_match_wavefunction_spec() {
        let (abar, gamma) = (4.0, 2.0);
        let r = rp(abar);
        let spec = radial_wavefunction(&r, gamma, 1).unwrap();
        let p = radial_nu_problem(&r, gamma, spec.epsilon).unwrap();
        let branch = &all_admissible_branches(&p).unwrap()[0];
        let fs = factor_spec(&p, branch).unwrap();
        // φ(z) = z^{s/2} e^{−c z/2}
        assert!(rel(fs.phi_exponents[0], spec.power_exponent / 2.0) < 1e-12);
        assert!(rel(fs.phi_exp_rate, -spec.gaussian_rate) < 1e-12);
        match classify_polynomial_family(&p, &fs).unwrap() {
            PolynomialFamily::Laguerre { mu, argument } => {
                assert!(rel(mu, spec.mu) < 1e-12);
                assert!(rel(argument.scale, spec.laguerre_argument_scale) < 1e-12);
            }
            other => panic!("expected Laguerre, got {other:?}"),
        }
    }

    #[test]
    fn wavefunction_examples() {
        let s = radial_wavefunction(&rp(1.0), 0.0, 0).unwrap();
        assert_eq!((s.power_exponent, s.mu), (1.0, 0.5));
        assert!(rel(s.norm, 2.0 / std::f64::consts::PI.powf(0.25)) < 1e-14);
        let s = radial_wavefunction(&rp(1.0), 2.0, 0).unwrap();
        assert_eq!((s.power_exponent, s.mu), (2.0, 1.5));
        let s = radial_wavefunction(&rp(4.0), 0.0, 1).unwrap();
        assert_eq!((s.gaussian_rate, s.laguerre_argument_scale), (1.0, 2.0));
    }

    #[test]
    fn residual_and_derivatives() {
        for abar in [1.0, 4.0] {
            for gamma in [0.0, 2.0, 3.0, 15.75] {
                for n in 0..=4 {
                    let s = radial_wavefunction(&rp(abar), gamma, n).unwrap();
                    let rmax = s.decay_radius();
                    let mut worst: f64 = 0.0;
                    let mut scale: f64 = 0.0;
                    for i in 1..=25 {
                        let x = rmax * f64::from(i) / 26.0;
                        let (u, _, d2u) = s.eval(x);
                        worst = worst.max((d2u + (s.epsilon - s.potential(x)) * u).abs());
                        scale = scale.max(d2u.abs());
                    }
                    assert!(worst <= 1e-8 * scale, "abar {abar} gamma {gamma} n {n}");
                }
            }
        }
        // first derivative against a central difference
        let s = radial_wavefunction(&rp(1.0), 3.0, 3).unwrap();
        for x in [0.4, 1.1, 2.5] {
            let h = 1e-5;
            let fd = (s.value(x + h) - s.value(x - h)) / (2.0 * h);
            assert!((fd - s.eval(x).1).abs() < 1e-7);
        }
    }

    #[test]
    fn node_count_and_orthonormality() {
        let rule = CompositeRule::half_line(2.0);
        for gamma in [0.0, 2.0, 3.0] {
            let specs: Vec<_> = (0..=4).map(|n| radial_wavefunction(&rp(1.0), gamma, n).unwrap()).collect();
            for (i, a) in specs.iter().enumerate() {
                let rmax = a.decay_radius();
                let mut sign_changes = 0;
                let mut prev = a.value(1e-3 * rmax);
                for k in 2..4000 {
                    let v = a.value(rmax * f64::from(k) / 4000.0);
                    if v * prev < 0.0 {
                        sign_changes += 1;
                    }
                    if v != 0.0 {
                        prev = v;
                    }
                }
                assert_eq!(sign_changes, a.n as usize);
                for (j, b) in specs.iter().enumerate() {
                    let g = rule.integrate(|x| a.value(x) * b.value(x));
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((g - target).abs() < 1e-9, "gamma {gamma} ({i},{j}): {g}");
                }
            }
        }
    }
}
