//! Polar equation. With `Θ = (sin θ)^{−1/2} y` the polar equation becomes
//! `y'' + [Γ − κ/sin²θ − D̄/cos²θ] y = 0` on `(0, π/2)`, and `t = sin²θ`
//! turns that into hypergeometric form.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Admissibility, AngularBranch, AngularConstants};
use crate::nu::{self, ArgumentMap, NuBranch, NuProblem};
use crate::specfun::{jacobi_log_norm_unit, jacobi_with_derivatives};

/// Separation constant for one `(n̄, branch)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularEigenvalue {
    pub lambda: f64,
    /// `Γ = Λ + ¼ = s²`.
    pub gamma_theta: f64,
    pub s_value: f64,
    pub branch: AngularBranch,
    pub admissibility: Admissibility,
}

/// Endpoint exponents `(a, b)` of `sin^a θ cos^b θ` for a branch.
pub fn angular_exponents(ac: &AngularConstants, branch: AngularBranch) -> (f64, f64) {
    let a = 0.5 * (1.0 + ac.nu1);
    let b = match branch {
        AngularBranch::S1 => 0.5 * (1.0 + ac.nu2),
        AngularBranch::S2 => 0.5 * (1.0 - ac.nu2),
    };
    (a, b)
}

pub fn angular_admissibility(ac: &AngularConstants, branch: AngularBranch) -> Admissibility {
    let (_, b) = angular_exponents(ac, branch);
    match branch {
        AngularBranch::S1 => Admissibility::Admissible,
        // D̄ = 0 leaves no barrier at π/2; b = 0 is the Neumann (even) solution
        AngularBranch::S2 if ac.dbar == 0.0 => Admissibility::Admissible,
        AngularBranch::S2 if b > -0.5 => Admissibility::Conditional(format!(
            "s2 angular branch: cos^{b:.6} theta at theta = pi/2 lies in the limit-circle regime"
        )),
        AngularBranch::S2 => Admissibility::Rejected(format!(
            "s2 angular branch is non-normalizable: cos^b theta with b = {b:.6} <= -1/2 at theta = pi/2"
        )),
    }
}

/// Radicand of the `s₁` formula in expanded form.
pub fn s1_radicand(ac: &AngularConstants, nbar: u32) -> f64 {
    let m = 2.0 * f64::from(nbar) + 1.0;
    m * (m + (ac.nu1 + ac.nu2)) + 0.5 * (1.0 + ac.nu1 * ac.nu2) + (ac.kappa + ac.dbar)
}

/// Alternative expanded radicand sometimes quoted for the second branch.
/// It equals `((2n̄+1) − (ν₁−ν₂)/2)²`, the square for exponents
/// `(−ν₁, +ν₂)`, so it does not belong to `s₂`. Kept for audits.
pub fn s2_alternate_radicand(ac: &AngularConstants, nbar: u32) -> f64 {
    let m = 2.0 * f64::from(nbar) + 1.0;
    m * (m - (ac.nu1 - ac.nu2)) + 0.5 * (1.0 - ac.nu1 * ac.nu2) + (ac.kappa + ac.dbar)
}

/// `s` with `Γ = s²` for the branch.
pub fn s_value(ac: &AngularConstants, nbar: u32, branch: AngularBranch) -> f64 {
    let m = 2.0 * f64::from(nbar) + 1.0;
    match branch {
        AngularBranch::S1 => s1_radicand(ac, nbar).max(0.0).sqrt(),
        AngularBranch::S2 => m + 0.5 * (ac.nu1 - ac.nu2),
    }
}

pub fn angular_lambda(ac: &AngularConstants, nbar: u32, branch: AngularBranch) -> Result<AngularEigenvalue> {
    if !(ac.nu1.is_finite() && ac.nu2.is_finite()) {
        return Err(Error::Domain("angular indices nu1, nu2 must be real".into()));
    }
    let s = s_value(ac, nbar, branch);
    let gamma_theta = s * s;
    Ok(AngularEigenvalue {
        lambda: gamma_theta - 0.25,
        gamma_theta,
        s_value: s,
        branch,
        admissibility: angular_admissibility(ac, branch),
    })
}

/// Coefficient scaling used when casting the `t`-equation into NU form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AngularScaling {
    /// `Γ/4, κ/4, D̄/4`: the consistent choice.
    Quarter,
    /// `Γ/2` with quarter-scaled barriers, kept for the scaling audit.
    Half,
}

/// `τ̃ = ½ − t`, `σ = t(1−t)`, `σ̃ = −Γ̃t² + ζt − κ̃`.
pub fn angular_nu_problem(ac: &AngularConstants, gamma_theta: f64) -> Result<NuProblem> {
    angular_nu_problem_scaled(ac, gamma_theta, AngularScaling::Quarter)
}

pub fn angular_nu_problem_scaled(ac: &AngularConstants, gamma_theta: f64, scaling: AngularScaling) -> Result<NuProblem> {
    let g = match scaling {
        AngularScaling::Quarter => gamma_theta / 4.0,
        AngularScaling::Half => gamma_theta / 2.0,
    };
    let (k, d) = (ac.kappa / 4.0, ac.dbar / 4.0);
    NuProblem::from_coeffs(&[0.5, -1.0], &[0.0, 1.0, -1.0], &[-k, g + k - d, -g])
}

/// Whether an NU branch is the one whose φ behaves as `t^{a/2}` at `t = 0`
/// and `(1−t)^{b/2}` at `t = 1` for the requested angular branch.
fn matches_branch(nb: &NuBranch, ac: &AngularConstants, branch: AngularBranch) -> bool {
    let (a, b) = angular_exponents(ac, branch);
    // φ'/φ = π/σ: exponent at t=0 is π(0), at t=1 it is −π(1)
    let at0 = nb.pi.eval(0.0);
    let at1 = -nb.pi.eval(1.0);
    let tol = 1e-8 * (1.0 + ac.nu1 + ac.nu2);
    (at0 - 0.5 * a).abs() <= tol && (at1 - 0.5 * b).abs() <= tol
}

/// Index of the requested branch in [`nu::all_admissible_branches`].
pub fn nu_branch_index(p: &NuProblem, ac: &AngularConstants, branch: AngularBranch) -> Result<usize> {
    nu::all_admissible_branches(p)?
        .iter()
        .position(|nb| matches_branch(nb, ac, branch))
        .ok_or_else(|| {
            Error::NoAdmissibleBranch(format!(
                "no admissible NU branch realises the {} angular exponents",
                branch.as_str()
            ))
        })
}

/// Γ found numerically from the NU quantization condition.
pub fn angular_gamma_nu(
    ac: &AngularConstants,
    nbar: u32,
    branch: AngularBranch,
    scaling: AngularScaling,
) -> Result<f64> {
    let family = |g: f64| angular_nu_problem_scaled(ac, g, scaling);
    let lo = -100.0 * (1.0 + ac.kappa.abs() + ac.dbar.abs());
    let index = nu_branch_index(&family(lo)?, ac, branch)?;
    let f = |g: f64| -> Result<f64> { nu::quantization_residual(&family(g)?, index, nbar) };
    let bracket = nu::expand_bracket(f, lo, 1.0)?;
    nu::solve_eigenparameter(family, nbar, bracket, index)
}

/// Pöschl–Teller depths `(χ, λ)` with `κ = χ(χ−1)`, `D̄ = λ(λ−1)`.
pub fn poschl_teller_parameters(ac: &AngularConstants) -> (f64, f64) {
    (0.5 * (1.0 + ac.nu1), 0.5 * (1.0 + ac.nu2))
}

/// Pöschl–Teller I level `(χ + λ + 2n̄)²`.
pub fn poschl_teller_level(chi: f64, lam: f64, nbar: u32) -> f64 {
    let s = chi + lam + 2.0 * f64::from(nbar);
    s * s
}

/// Change of variables at one polar angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaTransform {
    pub theta: f64,
    /// `(sin θ)^{−1/2}`, taking the reduced function back to the polar one.
    pub p: f64,
    /// `t = sin²θ`.
    pub t: f64,
    /// `dt/dθ = sin 2θ`.
    pub dt_dtheta: f64,
    /// `d²t/dθ² = 2 cos 2θ`.
    pub d2t_dtheta2: f64,
}

impl ThetaTransform {
    pub fn to_polar(&self, reduced: f64) -> f64 {
        self.p * reduced
    }

    pub fn to_reduced(&self, polar: f64) -> f64 {
        polar / self.p
    }

    /// `dF/dt` from `dy/dθ` for `y(θ) = F(t)`.
    pub fn derivative_to_t(&self, dy_dtheta: f64) -> f64 {
        dy_dtheta / self.dt_dtheta
    }

    /// Residual of the polar equation given the residual of the reduced one.
    pub fn residual_to_polar(&self, reduced_residual: f64) -> f64 {
        self.p * reduced_residual
    }
}

pub fn theta_transform_chain(theta_samples: &[f64]) -> Result<Vec<ThetaTransform>> {
    theta_samples
        .iter()
        .map(|&theta| {
            if !(theta > 0.0 && theta < FRAC_PI_2) {
                return Err(Error::SingularPoint(format!(
                    "theta = {theta} is outside the open interval (0, pi/2); the barriers are singular at the ends"
                )));
            }
            let (s, c) = theta.sin_cos();
            Ok(ThetaTransform {
                theta,
                p: s.powf(-0.5),
                t: s * s,
                dt_dtheta: 2.0 * s * c,
                d2t_dtheta2: 2.0 * (c * c - s * s),
            })
        })
        .collect()
}

/// `y(θ) = norm · sin^a θ · cos^b θ · P_n̄^{(α,β)}(1 − 2 sin²θ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularWavefunctionSpec {
    pub branch: AngularBranch,
    pub sin_exponent: f64,
    pub cos_exponent: f64,
    pub jacobi_alpha: f64,
    pub jacobi_beta: f64,
    /// Map from `t = sin²θ` to the Jacobi argument.
    pub jacobi_argument: ArgumentMap,
    pub nbar: u32,
    /// Apply `(sin θ)^{−1/2}` in [`AngularWavefunctionSpec::value`].
    pub include_measure_factor: bool,
    pub norm: f64,
    pub kappa: f64,
    pub dbar: f64,
    pub gamma_theta: f64,
}

pub fn angular_wavefunction(ac: &AngularConstants, nbar: u32, branch: AngularBranch) -> Result<AngularWavefunctionSpec> {
    let verdict = angular_admissibility(ac, branch);
    if !verdict.is_admissible() {
        return Err(Error::Inadmissible(verdict.reason()));
    }
    let (a, b) = angular_exponents(ac, branch);
    let (alpha, beta) = (a - 0.5, b - 0.5);
    // ∫₀^{π/2} y² dθ = norm²/2 · ∫₀¹ t^α (1−t)^β P² dt
    let log_h = jacobi_log_norm_unit(nbar, alpha, beta);
    let ev = angular_lambda(ac, nbar, branch)?;
    Ok(AngularWavefunctionSpec {
        branch,
        sin_exponent: a,
        cos_exponent: b,
        jacobi_alpha: alpha,
        jacobi_beta: beta,
        jacobi_argument: ArgumentMap {
            scale: -2.0,
            offset: 1.0,
        },
        nbar,
        include_measure_factor: false,
        norm: (0.5 * (2f64.ln() - log_h)).exp(),
        kappa: ac.kappa,
        dbar: ac.dbar,
        gamma_theta: ev.gamma_theta,
    })
}

impl AngularWavefunctionSpec {
    pub fn with_measure_factor(mut self) -> Self {
        self.include_measure_factor = true;
        self
    }

    /// `(y, y', y'')` at θ in `(0, π/2)`; `comp = π/2 − θ` is passed
    /// separately so the upper endpoint keeps full precision.
    pub fn eval_split(&self, theta: f64, comp: f64) -> (f64, f64, f64) {
        let (s, c) = if theta <= comp {
            (theta.sin(), theta.cos())
        } else {
            (comp.cos(), comp.sin())
        };
        let (a, b) = (self.sin_exponent, self.cos_exponent);
        let log_f = a * s.ln() + b * c.ln();
        if log_f < -745.0 {
            return (0.0, 0.0, 0.0);
        }
        let f = self.norm * log_f.exp();
        let x = if s <= c { 1.0 - 2.0 * s * s } else { 2.0 * c * c - 1.0 };
        let sin2 = 2.0 * s * c;
        let g1 = a * c / s - b * s / c;
        let g2 = g1 * g1 - a / (s * s) - b / (c * c);
        let (pv, px, pxx) = jacobi_with_derivatives(self.nbar, self.jacobi_alpha, self.jacobi_beta, x);
        let dx = -2.0 * sin2;
        let d2x = -4.0 * x;
        let y = f * pv;
        let dy = f * (g1 * pv + px * dx);
        let d2y = f * (g2 * pv + 2.0 * g1 * px * dx + pxx * dx * dx + px * d2x);
        (y, dy, d2y)
    }

    pub fn eval(&self, theta: f64) -> (f64, f64, f64) {
        self.eval_split(theta, FRAC_PI_2 - theta)
    }

    /// The reduced function, or the polar one when the measure factor is on.
    pub fn value(&self, theta: f64) -> f64 {
        self.value_split(theta, FRAC_PI_2 - theta)
    }

    pub fn value_split(&self, theta: f64, comp: f64) -> f64 {
        let y = self.eval_split(theta, comp).0;
        if self.include_measure_factor {
            let s = if theta <= comp { theta.sin() } else { comp.cos() };
            y / s.sqrt()
        } else {
            y
        }
    }

    /// `κ/sin²θ + D̄/cos²θ`.
    pub fn potential_split(&self, theta: f64, comp: f64) -> f64 {
        let (s, c) = if theta <= comp {
            (theta.sin(), theta.cos())
        } else {
            (comp.cos(), comp.sin())
        };
        self.kappa / (s * s) + self.dbar / (c * c)
    }

    pub fn potential(&self, theta: f64) -> f64 {
        self.potential_split(theta, FRAC_PI_2 - theta)
    }
}
