//! Spectrum tables, total wavefunctions and the reductions to known cases.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::angular::{angular_lambda, angular_wavefunction, poschl_teller_parameters, AngularWavefunctionSpec};
use crate::error::{Error, Result};
use crate::model::{
    angular_constants, reduce_params, AngularBranch, PhysicalParams, QuantumNumbers, RadialBranch, ReducedParams,
    SpectrumEntry,
};
use crate::radial::{radial_energy, radial_wavefunction_branch, RadialWavefunctionSpec};
use crate::specfun::CompositeRule;

/// Inclusive upper limits on `n`, `n̄` and `|m̄|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ranges {
    pub n_max: u32,
    pub nbar_max: u32,
    pub mbar_max: u32,
}

impl Ranges {
    pub fn new(n_max: u32, nbar_max: u32, mbar_max: u32) -> Self {
        Self { n_max, nbar_max, mbar_max }
    }
}

/// Which branches to tabulate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchPolicy {
    pub angular: Vec<AngularBranch>,
    pub radial: Vec<RadialBranch>,
}

impl BranchPolicy {
    pub fn new(angular: &[AngularBranch], radial: &[RadialBranch]) -> Self {
        Self {
            angular: angular.to_vec(),
            radial: radial.to_vec(),
        }
    }

    pub fn s1_only() -> Self {
        Self::new(&[AngularBranch::S1], &[RadialBranch::Plus])
    }

    pub fn both_angular() -> Self {
        Self::new(&[AngularBranch::S1, AngularBranch::S2], &[RadialBranch::Plus])
    }
}

impl Default for BranchPolicy {
    fn default() -> Self {
        Self::both_angular()
    }
}

/// Run `f` on a pool capped by `NUSPECTRA_THREADS` when that is set.
pub fn with_worker_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var("NUSPECTRA_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    match threads.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

/// Key used to order spectrum rows.
pub fn entry_order(a: &SpectrumEntry, b: &SpectrumEntry) -> std::cmp::Ordering {
    let key = |e: &SpectrumEntry| {
        (
            e.quantum.n,
            e.quantum.nbar,
            e.quantum.mbar.unsigned_abs(),
            e.quantum.mbar,
            e.radial_branch,
            e.angular_branch,
        )
    };
    a.energy.total_cmp(&b.energy).then_with(|| key(a).cmp(&key(b)))
}

pub fn spectrum_entry(
    r: &ReducedParams,
    quantum: QuantumNumbers,
    radial_branch: RadialBranch,
    angular_branch: AngularBranch,
) -> Result<SpectrumEntry> {
    let ac = angular_constants(r, quantum.mbar)?;
    let ang = angular_lambda(&ac, quantum.nbar, angular_branch)?;
    let gamma = r.bbar + ang.lambda;
    let rad = radial_energy(r, gamma, quantum.n, radial_branch)?;
    Ok(SpectrumEntry {
        quantum,
        radial_branch,
        angular_branch,
        lambda: ang.lambda,
        gamma,
        energy: rad.energy,
        admissibility: ang.admissibility.and(rad.admissibility),
    })
}

pub fn build_spectrum(p: &PhysicalParams, ranges: &Ranges, policy: &BranchPolicy) -> Result<Vec<SpectrumEntry>> {
    let r = reduce_params(p)?;
    build_spectrum_reduced(&r, ranges, policy)
}

pub fn build_spectrum_reduced(r: &ReducedParams, ranges: &Ranges, policy: &BranchPolicy) -> Result<Vec<SpectrumEntry>> {
    let m = ranges.mbar_max as i32;
    let mut tasks = Vec::new();
    for n in 0..=ranges.n_max {
        for nbar in 0..=ranges.nbar_max {
            for mbar in -m..=m {
                for &rb in &policy.radial {
                    for &ab in &policy.angular {
                        tasks.push((QuantumNumbers::new(n, nbar, mbar), rb, ab));
                    }
                }
            }
        }
    }
    let mut entries = with_worker_pool(|| {
        tasks
            .par_iter()
            .map(|&(qn, rb, ab)| spectrum_entry(r, qn, rb, ab))
            .collect::<Result<Vec<_>>>()
    })?;
    entries.sort_by(entry_order);
    Ok(entries)
}

/// `Ψ = (1/r) u(r) · (sin θ)^{−1/2} y(θ) · e^{i m̄ φ}/√(2π)` on the half-space
/// `θ ∈ (0, π/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TotalWavefunction {
    pub radial: RadialWavefunctionSpec,
    pub angular: AngularWavefunctionSpec,
    pub mbar: i32,
}

pub fn assemble_total(r: &ReducedParams, entry: &SpectrumEntry) -> Result<TotalWavefunction> {
    if !entry.admissibility.is_admissible() {
        return Err(Error::Inadmissible(entry.admissibility.reason()));
    }
    let ac = angular_constants(r, entry.quantum.mbar)?;
    Ok(TotalWavefunction {
        radial: radial_wavefunction_branch(r, entry.gamma, entry.quantum.n, entry.radial_branch)?,
        angular: angular_wavefunction(&ac, entry.quantum.nbar, entry.angular_branch)?,
        mbar: entry.quantum.mbar,
    })
}

impl TotalWavefunction {
    pub fn eval(&self, r: f64, theta: f64, phi: f64) -> Result<Complex64> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("r = {r} must be positive")));
        }
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(Error::SingularPoint(format!(
                "theta = {theta} is outside (0, pi/2); the polar barriers are singular at the ends"
            )));
        }
        Ok(self.eval_split(r, theta, FRAC_PI_2 - theta, phi))
    }

    /// Unchecked evaluation with `comp = π/2 − θ` supplied separately.
    pub fn eval_split(&self, r: f64, theta: f64, comp: f64, phi: f64) -> Complex64 {
        let radial = self.radial.value(r) / r;
        let sin = if theta <= comp { theta.sin() } else { comp.cos() };
        let polar = self.angular.eval_split(theta, comp).0 / sin.sqrt();
        Complex64::from_polar(1.0, f64::from(self.mbar) * phi) * (radial * polar / (2.0 * PI).sqrt())
    }

    fn radial_rule(&self) -> CompositeRule {
        let r_max = 1.5 * self.radial.decay_radius();
        CompositeRule::graded(0.0, r_max, 16, 0.25, 12, 0)
    }

    fn angular_rule(&self) -> CompositeRule {
        // a negative cos exponent needs deep grading at π/2
        let right = if self.angular.cos_exponent < 0.0 { 100 } else { 12 };
        CompositeRule::graded(0.0, FRAC_PI_2, 16, 0.25, 12, right)
    }

    /// `(∫u² dr, ∫y² dθ)` on the rules used by [`TotalWavefunction::norm_3d`].
    pub fn component_norms(&self) -> (f64, f64) {
        let rr = self.radial_rule();
        let ra = self.angular_rule();
        let nr = rr.integrate(|x| self.radial.value(x).powi(2));
        let na = ra.integrate_split(|_, dl, dr| self.angular.value_split(dl, dr).powi(2));
        (nr, na)
    }

    /// `∫|Ψ|² r² sin θ dr dθ dφ` over `(0, ∞) × (0, π/2) × [0, 2π)` by a
    /// tensor-product rule, evaluating Ψ point by point.
    pub fn norm_3d(&self) -> f64 {
        let rr = self.radial_rule();
        let ra = self.angular_rule();
        let phis = 3;
        let dphi = 2.0 * PI / f64::from(phis);
        let mut total = 0.0;
        for i in 0..rr.len() {
            let r = rr.nodes[i];
            for j in 0..ra.len() {
                let (theta, comp) = (ra.from_left[j], ra.from_right[j]);
                let sin = if theta <= comp { theta.sin() } else { comp.cos() };
                let w = rr.weights[i] * ra.weights[j] * dphi * r * r * sin;
                for k in 0..phis {
                    let psi = self.eval_split(r, theta, comp, dphi * f64::from(k));
                    total += w * psi.norm_sqr();
                }
            }
        }
        total
    }
}

/// Analytic normalization constants with quadrature cross-checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationConstants {
    pub radial_norm: f64,
    pub angular_norm: f64,
    pub azimuthal_norm: f64,
    pub total: f64,
    /// `|∫u² − 1|` and `|∫y² − 1|` by quadrature.
    pub radial_quadrature_defect: f64,
    pub angular_quadrature_defect: f64,
    pub verified: bool,
}

pub fn normalization_constants(r: &ReducedParams, entry: &SpectrumEntry) -> Result<NormalizationConstants> {
    let psi = assemble_total(r, entry)?;
    let radial_rule = CompositeRule::half_line(2.0 / psi.radial.laguerre_argument_scale.sqrt());
    let nr = radial_rule.integrate(|x| psi.radial.value(x).powi(2));
    let na = CompositeRule::standard(0.0, FRAC_PI_2)
        .integrate_split(|_, dl, dr| psi.angular.value_split(dl, dr).powi(2));
    if !(nr.is_finite() && na.is_finite()) {
        return Err(Error::Inadmissible("normalization integral diverges".into()));
    }
    let azimuthal = 1.0 / (2.0 * PI).sqrt();
    let (dr, da) = ((nr - 1.0).abs(), (na - 1.0).abs());
    Ok(NormalizationConstants {
        radial_norm: psi.radial.norm,
        angular_norm: psi.angular.norm,
        azimuthal_norm: azimuthal,
        total: psi.radial.norm * psi.angular.norm * azimuthal,
        radial_quadrature_defect: dr,
        angular_quadrature_defect: da,
        verified: dr <= 1e-9 && da <= 1e-9,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    SphericalOscillator,
    OscillatorPlusInverseSquare,
    RingShaped,
    NonsphericalRing,
    DoubleRing,
    PoschlTellerTheta,
    General,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::SphericalOscillator => "spherical_oscillator",
            CaseTag::OscillatorPlusInverseSquare => "oscillator_plus_inverse_square",
            CaseTag::RingShaped => "ring_shaped",
            CaseTag::NonsphericalRing => "nonspherical_ring",
            CaseTag::DoubleRing => "double_ring",
            CaseTag::PoschlTellerTheta => "poschl_teller_theta",
            CaseTag::General => "general",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MappedParameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    pub atilde: f64,
    pub bbar: f64,
    pub cbar: f64,
    pub dbar: f64,
    /// Pöschl–Teller depths at `m̄ = 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_pt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyRow {
    /// `N = 2n_r + ℓ`.
    pub principal: u32,
    pub energy: f64,
    /// `(N+1)(N+2)/2`, counting every `(ℓ, m)`.
    pub full_count: u32,
    pub representable_count: u32,
    /// `(n_r, ℓ, m̄, branch)` of each representable state.
    pub states: Vec<(u32, u32, i32, AngularBranch)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialCaseReport {
    pub tag: CaseTag,
    pub extra_tags: Vec<CaseTag>,
    pub mapped: MappedParameters,
    pub closed_form: String,
    pub agreement: bool,
    pub max_rel_deviation: f64,
    pub checked_states: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub degeneracy: Vec<DegeneracyRow>,
}

pub fn case_tag(p: &PhysicalParams) -> CaseTag {
    let (b0, c0, d0) = (p.b == 0.0, p.c == 0.0, p.d == 0.0);
    if b0 && c0 && d0 {
        CaseTag::SphericalOscillator
    } else if p.q == 0.0 || (c0 && d0) {
        CaseTag::OscillatorPlusInverseSquare
    } else if b0 && d0 && p.q == 1.0 {
        CaseTag::RingShaped
    } else if d0 {
        CaseTag::NonsphericalRing
    } else if b0 {
        CaseTag::DoubleRing
    } else {
        CaseTag::General
    }
}

fn closed_form_text(tag: CaseTag) -> &'static str {
    match tag {
        CaseTag::SphericalOscillator => "E = hbar*omega*(2*n_r + l + 3/2), omega = sqrt(2A/m), l = 2*nbar + |mbar| + (1 for s1, 0 for s2)",
        CaseTag::OscillatorPlusInverseSquare => "E = Atilde*[(2n+1) + sqrt((l+1/2)^2 + Bbar)], l = 2*nbar + |mbar| + (1 for s1, 0 for s2)",
        CaseTag::RingShaped => "E = Atilde*(2n + 2*nbar + 5/2 + sqrt(mbar^2 + Cbar)) for s1; 3/2 in place of 5/2 for s2",
        CaseTag::NonsphericalRing => "E = Atilde*[(2n+1) + sqrt(Bbar + (2*nbar + 3/2 + sqrt(mbar^2 + Cbar))^2)] for s1; 1/2 in place of 3/2 for s2",
        CaseTag::DoubleRing => "E = Atilde*[(2n+1) + 2*nbar + 1 + (nu1 +/- nu2)/2], nu1 = sqrt(1+4*kappa), nu2 = sqrt(1+4*Dbar)",
        CaseTag::PoschlTellerTheta | CaseTag::General => "E = Atilde*[(2n+1) + sqrt(Bbar + Gamma)], Gamma = (2*nbar + 1 + (nu1 +/- nu2)/2)^2",
    }
}

/// Energy of an entry from the case's own closed form.
pub fn closed_form_energy(tag: CaseTag, p: &PhysicalParams, r: &ReducedParams, entry: &SpectrumEntry) -> Result<f64> {
    let qn = entry.quantum;
    let (n, nbar, m) = (f64::from(qn.n), f64::from(qn.nbar), f64::from(qn.mbar.unsigned_abs()));
    let odd = match entry.angular_branch {
        AngularBranch::S1 => 1.0,
        AngularBranch::S2 => 0.0,
    };
    let sign = match entry.radial_branch {
        RadialBranch::Plus => 1.0,
        RadialBranch::Minus => -1.0,
    };
    let base = 2.0 * n + 1.0;
    let ell = 2.0 * nbar + m + odd;
    let root = (m * m + r.cbar).sqrt();
    let e = match tag {
        CaseTag::SphericalOscillator => {
            let omega = (2.0 * p.a / p.mass).sqrt();
            p.hbar * omega * (base + sign * (ell + 0.5))
        }
        CaseTag::OscillatorPlusInverseSquare => r.atilde * (base + sign * ((ell + 0.5).powi(2) + r.bbar).sqrt()),
        CaseTag::RingShaped => r.atilde * (base + sign * (2.0 * nbar + 0.5 + odd + root)),
        CaseTag::NonsphericalRing => r.atilde * (base + sign * (r.bbar + (2.0 * nbar + 0.5 + odd + root).powi(2)).sqrt()),
        CaseTag::DoubleRing | CaseTag::PoschlTellerTheta | CaseTag::General => {
            let ac = angular_constants(r, qn.mbar)?;
            let s = match entry.angular_branch {
                AngularBranch::S1 => 2.0 * nbar + 1.0 + 0.5 * (ac.nu1 + ac.nu2),
                AngularBranch::S2 => 2.0 * nbar + 1.0 + 0.5 * (ac.nu1 - ac.nu2),
            };
            if tag == CaseTag::DoubleRing {
                r.atilde * (base + sign * s.abs())
            } else {
                r.atilde * (base + sign * (r.bbar + s * s).sqrt())
            }
        }
    };
    Ok(e)
}

/// Degeneracy of the spherical oscillator up to principal number `n_max`.
pub fn degeneracy_table(p: &PhysicalParams, n_max: u32, policy: &BranchPolicy) -> Result<Vec<DegeneracyRow>> {
    let hw = p.hbar * (2.0 * p.a / p.mass).sqrt();
    let ranges = Ranges::new(n_max / 2, n_max / 2, n_max);
    let entries = build_spectrum(p, &ranges, policy)?;
    let mut rows: Vec<DegeneracyRow> = (0..=n_max)
        .map(|big_n| DegeneracyRow {
            principal: big_n,
            energy: hw * (f64::from(big_n) + 1.5),
            full_count: (big_n + 1) * (big_n + 2) / 2,
            representable_count: 0,
            states: Vec::new(),
        })
        .collect();
    for e in entries.iter().filter(|e| e.radial_branch == RadialBranch::Plus && e.admissibility.is_admissible()) {
        let principal = (e.energy / hw - 1.5).round();
        if principal < 0.0 || principal > f64::from(n_max) {
            continue;
        }
        let odd = u32::from(e.angular_branch == AngularBranch::S1);
        let ell = 2 * e.quantum.nbar + e.quantum.mbar.unsigned_abs() + odd;
        let row = &mut rows[principal as usize];
        row.states.push((e.quantum.n, ell, e.quantum.mbar, e.angular_branch));
        row.representable_count += 1;
    }
    for row in &mut rows {
        row.states.sort();
    }
    Ok(rows)
}

pub fn classify_special_case(p: &PhysicalParams) -> Result<SpecialCaseReport> {
    let r = reduce_params(p)?;
    let tag = case_tag(p);
    let mut extra_tags = Vec::new();
    if p.q != 0.0 && p.d != 0.0 {
        extra_tags.push(CaseTag::PoschlTellerTheta);
    }
    let mut mapped = MappedParameters {
        atilde: r.atilde,
        bbar: r.bbar,
        cbar: r.cbar,
        dbar: r.dbar,
        ..Default::default()
    };
    if tag == CaseTag::SphericalOscillator {
        mapped.omega = Some((2.0 * p.a / p.mass).sqrt());
    }
    if extra_tags.contains(&CaseTag::PoschlTellerTheta) {
        let (chi, lam) = poschl_teller_parameters(&angular_constants(&r, 0)?);
        mapped.chi = Some(chi);
        mapped.lambda_pt = Some(lam);
    }

    let entries = build_spectrum_reduced(&r, &Ranges::new(2, 2, 2), &BranchPolicy::both_angular())?;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for e in entries.iter().filter(|e| e.admissibility.is_admissible()) {
        let closed = closed_form_energy(tag, p, &r, e)?;
        worst = worst.max((closed - e.energy).abs() / e.energy.abs().max(f64::MIN_POSITIVE));
        checked += 1;
    }
    let degeneracy = if tag == CaseTag::SphericalOscillator {
        degeneracy_table(p, 4, &BranchPolicy::both_angular())?
    } else {
        Vec::new()
    };
    Ok(SpecialCaseReport {
        tag,
        extra_tags,
        mapped,
        closed_form: closed_form_text(tag).to_string(),
        agreement: worst <= 1e-10,
        max_rel_deviation: worst,
        checked_states: checked,
        degeneracy,
    })
}
