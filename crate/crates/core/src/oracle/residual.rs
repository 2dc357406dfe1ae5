//! Analytic ODE residuals of the separated equations `y'' + (λ − V) y = 0`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::angular::AngularWavefunctionSpec;
use crate::error::{Error, Result};
use crate::radial::RadialWavefunctionSpec;
use crate::specfun::CompositeRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    Radial,
    Angular,
}

/// A closed-form eigenfunction of one separated equation.
pub trait SeparatedSolution {
    fn equation(&self) -> Equation;
    /// `(y, y', y'')`, with the distances to both endpoints supplied for
    /// precision near a finite upper endpoint.
    fn eval_split(&self, x: f64, from_left: f64, from_right: f64) -> (f64, f64, f64);
    fn potential(&self, x: f64) -> f64;
    fn eigenvalue(&self) -> f64;
    fn domain(&self) -> (f64, f64);
    /// Rule that integrates products of solutions over the domain.
    fn quadrature(&self) -> CompositeRule;
    /// Parameters that must agree for two solutions to be compared.
    fn family_key(&self) -> Vec<f64>;
    /// Span used for sample points; finite even on a half-line.
    fn sample_span(&self) -> (f64, f64);

    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let (lo, hi) = self.domain();
        self.eval_split(x, x - lo, hi - x)
    }
}

impl SeparatedSolution for RadialWavefunctionSpec {
    fn equation(&self) -> Equation {
        Equation::Radial
    }

    fn eval_split(&self, x: f64, _: f64, _: f64) -> (f64, f64, f64) {
        RadialWavefunctionSpec::eval(self, x)
    }

    fn potential(&self, x: f64) -> f64 {
        RadialWavefunctionSpec::potential(self, x)
    }

    fn eigenvalue(&self) -> f64 {
        self.epsilon
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn quadrature(&self) -> CompositeRule {
        CompositeRule::half_line(2.0 / self.laguerre_argument_scale.sqrt())
    }

    fn family_key(&self) -> Vec<f64> {
        vec![self.abar, self.gamma, self.power_exponent]
    }

    fn sample_span(&self) -> (f64, f64) {
        (0.0, self.decay_radius())
    }
}

impl SeparatedSolution for AngularWavefunctionSpec {
    fn equation(&self) -> Equation {
        Equation::Angular
    }

    fn eval_split(&self, x: f64, from_left: f64, from_right: f64) -> (f64, f64, f64) {
        AngularWavefunctionSpec::eval_split(self, x.min(from_left), from_right)
    }

    fn potential(&self, x: f64) -> f64 {
        AngularWavefunctionSpec::potential(self, x)
    }

    fn eigenvalue(&self) -> f64 {
        self.gamma_theta
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, FRAC_PI_2)
    }

    fn quadrature(&self) -> CompositeRule {
        CompositeRule::standard(0.0, FRAC_PI_2)
    }

    fn family_key(&self) -> Vec<f64> {
        vec![self.kappa, self.dbar, self.sin_exponent, self.cos_exponent]
    }

    fn sample_span(&self) -> (f64, f64) {
        (0.0, FRAC_PI_2)
    }
}

/// `count` equally spaced points strictly inside the sample span.
pub fn interior_points<S: SeparatedSolution + ?Sized>(spec: &S, count: usize) -> Vec<f64> {
    let (lo, hi) = spec.sample_span();
    (1..=count)
        .map(|i| lo + (hi - lo) * i as f64 / (count + 1) as f64)
        .collect()
}

/// Max over points of `|y'' + (λ − V) y|` divided by the largest of
/// `|y''|, |λ y|, |V y|` at that point. The per-point scale is floored at
/// 1e−3 of its maximum over all points so that points near a node of `y`
/// do not turn rounding noise into a large ratio.
pub fn residual_from_samples(samples: &[(f64, f64, f64, f64)], eigenvalue: f64) -> f64 {
    let terms: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(y, d2y, v, _)| {
            let res = d2y + (eigenvalue - v) * y;
            let scale = d2y.abs().max((eigenvalue * y).abs()).max((v * y).abs());
            (res.abs(), scale)
        })
        .collect();
    let global = terms.iter().fold(0.0_f64, |m, t| m.max(t.1));
    if global == 0.0 {
        return 0.0;
    }
    let floor = 1e-3 * global;
    terms.iter().fold(0.0_f64, |m, &(r, s)| m.max(r / s.max(floor)))
}

/// Residual of a closed-form solution against its equation at `eigenvalue`.
pub fn ode_residual<S: SeparatedSolution + ?Sized>(spec: &S, eigenvalue: f64, points: &[f64]) -> Result<f64> {
    let (lo, hi) = spec.domain();
    let mut samples = Vec::with_capacity(points.len());
    for &x in points {
        if !(x > lo && x < hi) {
            return Err(Error::Domain(format!("residual point {x} is not inside ({lo}, {hi})")));
        }
        let (y, _, d2y) = spec.eval(x);
        samples.push((y, d2y, spec.potential(x), x));
    }
    Ok(residual_from_samples(&samples, eigenvalue))
}

/// Residual for an arbitrary function `x ↦ (y, y', y'')`.
pub fn ode_residual_fn(
    f: impl Fn(f64) -> (f64, f64, f64),
    potential: impl Fn(f64) -> f64,
    eigenvalue: f64,
    points: &[f64],
) -> f64 {
    let samples: Vec<_> = points
        .iter()
        .map(|&x| {
            let (y, _, d2y) = f(x);
            (y, d2y, potential(x), x)
        })
        .collect();
    residual_from_samples(&samples, eigenvalue)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::angular_wavefunction;
    use crate::model::{angular_constants_from, AngularBranch, ReducedParams};
    use crate::radial::radial_wavefunction;

    #[test]
    fn radial_examples() {
        let r = ReducedParams::dimensionless(1.0, 0.0, 0.0, 0.0).unwrap();
        let spec = radial_wavefunction(&r, 0.0, 0).unwrap();
        let pts: Vec<f64> = (0..25).map(|i| 0.1 + 5.9 * i as f64 / 24.0).collect();
        assert!(ode_residual(&spec, 3.0, &pts).unwrap() <= 1e-10);
        let constant = ode_residual_fn(|_| (1.0, 0.0, 0.0), |r| r * r, 3.0, &[2.0]);
        assert!(constant > 0.1);
        assert!(matches!(ode_residual(&spec, 3.0, &[0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn angular_example() {
        let ac = angular_constants_from(2.25, 2.0, 0).unwrap();
        let spec = angular_wavefunction(&ac, 1, AngularBranch::S1).unwrap();
        let pts = interior_points(&spec, 25);
        assert!(ode_residual(&spec, 36.0, &pts).unwrap() <= 1e-10);
    }

    #[test]
    fn perturbation_is_detected() {
        let r = ReducedParams::dimensionless(1.0, 0.0, 0.0, 0.0).unwrap();
        for gamma in [0.0, 2.0, 3.0, 15.75] {
            for n in 0..=4 {
                let spec = radial_wavefunction(&r, gamma, n).unwrap();
                let pts = interior_points(&spec, 25);
                assert!(ode_residual(&spec, spec.epsilon, &pts).unwrap() <= 1e-8);
                assert!(ode_residual(&spec, 1.01 * spec.epsilon, &pts).unwrap() > 1e-3);
            }
        }
    }
}
