//! Physical inputs, reduced parameters and the records shared by the solvers.
//!
//! The potential is
//!
//! ```text
//! V(r, θ) = A r² + B / r² + (q / r²) (C / sin²θ + D / cos²θ)
//! ```
//!
//! and every solver works with the dimensionless strengths obtained by
//! multiplying through by `2m/ħ²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn one() -> f64 {
    1.0
}

/// Potential strengths, deformation and units of the noncentral oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B", default)]
    pub b: f64,
    #[serde(rename = "C", default)]
    pub c: f64,
    #[serde(rename = "D", default)]
    pub d: f64,
    #[serde(default)]
    pub q: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

impl PhysicalParams {
    /// Parameters in units `m = ħ = 1`.
    pub fn new(a: f64, b: f64, c: f64, d: f64, q: f64) -> Self {
        Self {
            a,
            b,
            c,
            d,
            q,
            mass: 1.0,
            hbar: 1.0,
        }
    }

    pub fn with_units(mut self, mass: f64, hbar: f64) -> Self {
        self.mass = mass;
        self.hbar = hbar;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("A", self.a),
            ("B", self.b),
            ("C", self.c),
            ("D", self.d),
            ("q", self.q),
            ("mass", self.mass),
            ("hbar", self.hbar),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be finite")));
            }
        }
        if self.mass <= 0.0 {
            return Err(Error::InvalidInput(format!("mass must be positive, got {}", self.mass)));
        }
        if self.hbar <= 0.0 {
            return Err(Error::InvalidInput(format!("hbar must be positive, got {}", self.hbar)));
        }
        if self.q < 0.0 {
            return Err(Error::InvalidInput(format!(
                "deformation q must be non-negative, got {}",
                self.q
            )));
        }
        if self.a <= 0.0 {
            return Err(Error::NoConfinement(self.a));
        }
        Ok(())
    }

    /// `2m/ħ²`, the factor converting energies to the dimensionless scale.
    pub fn energy_to_reduced(&self) -> f64 {
        2.0 * self.mass / (self.hbar * self.hbar)
    }
}

/// Strengths scaled by `2m/ħ²` plus the energy unit `Ã = (ħ²/m)·√Ā`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    pub abar: f64,
    pub bbar: f64,
    pub cbar: f64,
    pub dbar: f64,
    pub atilde: f64,
    /// `ħ²/(2m)`, converts a reduced eigenvalue ε back to an energy.
    pub energy_unit: f64,
}

impl ReducedParams {
    /// Reduced parameters given directly, in units `m = ħ = 1`
    /// (so `ħ²/(2m) = 1/2` and `Ã = √Ā`).
    pub fn dimensionless(abar: f64, bbar: f64, cbar: f64, dbar: f64) -> Result<Self> {
        if !(abar > 0.0) || !abar.is_finite() {
            return Err(Error::NoConfinement(abar));
        }
        Ok(Self {
            abar,
            bbar,
            cbar,
            dbar,
            atilde: abar.sqrt(),
            energy_unit: 0.5,
        })
    }

    /// Energy corresponding to the reduced eigenvalue `epsilon = 2mE/ħ²`.
    pub fn energy_from_epsilon(&self, epsilon: f64) -> f64 {
        self.energy_unit * epsilon
    }

    pub fn epsilon_from_energy(&self, energy: f64) -> f64 {
        energy / self.energy_unit
    }
}

pub fn reduce_params(p: &PhysicalParams) -> Result<ReducedParams> {
    p.validate()?;
    let scale = p.energy_to_reduced();
    let abar = scale * p.a;
    Ok(ReducedParams {
        abar,
        bbar: scale * p.b,
        cbar: scale * p.q * p.c,
        dbar: scale * p.q * p.d,
        atilde: p.hbar * p.hbar / p.mass * abar.sqrt(),
        energy_unit: 1.0 / scale,
    })
}

/// Radial, polar and azimuthal quantum numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub n: u32,
    pub nbar: u32,
    pub mbar: i32,
}

impl QuantumNumbers {
    pub fn new(n: u32, nbar: u32, mbar: i32) -> Self {
        Self { n, nbar, mbar }
    }
}

/// Constants of the polar equation after the `(sin θ)^{-1/2}` transform.
///
/// `gamma_theta` is the eigenvalue Γ of the Liouville-form polar equation;
/// it stays `None` until an angular branch fixes it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularConstants {
    pub ctilde: f64,
    pub kappa: f64,
    pub dbar: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub gamma_theta: Option<f64>,
}

impl AngularConstants {
    pub fn with_gamma_theta(mut self, gamma_theta: f64) -> Self {
        self.gamma_theta = Some(gamma_theta);
        self
    }

    /// Λ = Γ − 1/4, once Γ is known.
    pub fn lambda(&self) -> Option<f64> {
        self.gamma_theta.map(|g| g - 0.25)
    }
}

pub fn angular_constants(r: &ReducedParams, mbar: i32) -> Result<AngularConstants> {
    angular_constants_from(r.cbar, r.dbar, mbar)
}

/// Same as [`angular_constants`] from the bare `C̄`, `D̄` values.
pub fn angular_constants_from(cbar: f64, dbar: f64, mbar: i32) -> Result<AngularConstants> {
    let m2 = f64::from(mbar) * f64::from(mbar);
    let ctilde = cbar + m2;
    let kappa = ctilde - 0.25;
    let disc1 = 1.0 + 4.0 * kappa;
    let disc2 = 1.0 + 4.0 * dbar;
    if disc1 < 0.0 {
        return Err(Error::ComplexIndex(format!(
            "kappa = {kappa} < -1/4 makes nu1 imaginary"
        )));
    }
    if disc2 < 0.0 {
        return Err(Error::ComplexIndex(format!(
            "Dbar = {dbar} < -1/4 makes nu2 imaginary"
        )));
    }
    Ok(AngularConstants {
        ctilde,
        kappa,
        dbar,
        nu1: disc1.sqrt(),
        nu2: disc2.sqrt(),
        gamma_theta: None,
    })
}

/// Sign choice of the radial spectrum: `+½√(1+4γ)` or `−½√(1+4γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadialBranch {
    Plus,
    Minus,
}

impl RadialBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            RadialBranch::Plus => "plus",
            RadialBranch::Minus => "minus",
        }
    }
}

/// Polar branch: `s1` keeps the principal exponent at both polar endpoints,
/// `s2` takes the second exponent at θ = π/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngularBranch {
    S1,
    S2,
}

impl AngularBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            AngularBranch::S1 => "s1",
            AngularBranch::S2 => "s2",
        }
    }
}

/// Verdict on whether a closed-form state is a physical bound state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "lowercase")]
pub enum Admissibility {
    Admissible,
    /// Square-integrable, but both endpoint exponents are; the state belongs
    /// to a non-Friedrichs boundary condition.
    Conditional(String),
    Rejected(String),
}

impl Admissibility {
    /// True for admissible and conditional states.
    pub fn is_admissible(&self) -> bool {
        !matches!(self, Admissibility::Rejected(_))
    }

    pub fn is_conditional(&self) -> bool {
        matches!(self, Admissibility::Conditional(_))
    }

    pub fn reason(&self) -> String {
        match self {
            Admissibility::Admissible => String::new(),
            Admissibility::Conditional(r) => format!("conditional: {r}"),
            Admissibility::Rejected(r) => r.clone(),
        }
    }

    /// Combine two verdicts; the worse one wins, reasons are joined.
    pub fn and(self, other: Admissibility) -> Admissibility {
        use Admissibility::*;
        match (self, other) {
            (Rejected(a), Rejected(b)) => Rejected(format!("{a}; {b}")),
            (Rejected(a), _) | (_, Rejected(a)) => Rejected(a),
            (Conditional(a), Conditional(b)) => Conditional(format!("{a}; {b}")),
            (Conditional(a), Admissible) | (Admissible, Conditional(a)) => Conditional(a),
            (Admissible, Admissible) => Admissible,
        }
    }
}

/// One row of the spectrum table.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "EntryRecord")]
pub struct SpectrumEntry {
    pub quantum: QuantumNumbers,
    pub radial_branch: RadialBranch,
    pub angular_branch: AngularBranch,
    /// Separation constant Λ.
    pub lambda: f64,
    /// γ = B̄ + Λ.
    pub gamma: f64,
    pub energy: f64,
    pub admissibility: Admissibility,
}

/// Flat JSON layout of a [`SpectrumEntry`].
#[derive(Serialize, Deserialize)]
struct EntryRecord {
    n: u32,
    nbar: u32,
    mbar: i32,
    branch_radial: RadialBranch,
    branch_angular: AngularBranch,
    #[serde(rename = "Lambda")]
    lambda: f64,
    gamma: f64,
    #[serde(rename = "E")]
    energy: f64,
    admissible: bool,
    reason: String,
}

impl Serialize for SpectrumEntry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EntryRecord {
            n: self.quantum.n,
            nbar: self.quantum.nbar,
            mbar: self.quantum.mbar,
            branch_radial: self.radial_branch,
            branch_angular: self.angular_branch,
            lambda: self.lambda,
            gamma: self.gamma,
            energy: self.energy,
            admissible: self.admissibility.is_admissible(),
            reason: self.admissibility.reason(),
        }
        .serialize(s)
    }
}

impl TryFrom<EntryRecord> for SpectrumEntry {
    type Error = String;

    fn try_from(r: EntryRecord) -> std::result::Result<Self, String> {
        let admissibility = match (r.admissible, r.reason.strip_prefix("conditional: ")) {
            (true, Some(why)) => Admissibility::Conditional(why.to_string()),
            (true, None) if r.reason.is_empty() => Admissibility::Admissible,
            (true, None) => return Err(format!("admissible entry with unexpected reason {:?}", r.reason)),
            (false, _) => Admissibility::Rejected(r.reason),
        };
        Ok(SpectrumEntry {
            quantum: QuantumNumbers::new(r.n, r.nbar, r.mbar),
            radial_branch: r.branch_radial,
            angular_branch: r.branch_angular,
            lambda: r.lambda,
            gamma: r.gamma,
            energy: r.energy,
            admissibility,
        })
    }
}
