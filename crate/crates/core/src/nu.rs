//! Nikiforov–Uvarov reduction of hypergeometric-type equations
//!
//! ```text
//! u'' + (τ̃/σ) u' + (σ̃/σ²) u = 0,   deg τ̃ ≤ 1, deg σ, σ̃ ≤ 2.
//! ```
//!
//! The substitution `u = φ y` with `φ'/φ = π/σ` turns this into
//! `σ y'' + τ y' + λ y = 0` where `τ = τ̃ + 2π` and `λ = k + π'`. The constant
//! `k` is fixed by requiring
//!
//! ```text
//! Q(z) = ((σ' − τ̃)/2)² + kσ − σ̃
//! ```
//!
//! to be the square of a real polynomial, and polynomial solutions exist when
//! `λ = λ_n = −nτ' − n(n−1)σ''/2`.
//!
//! Everything here is numeric: a parameter-dependent equation is handled as
//! a closure from the parameter to an [`NuProblem`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on the discriminant of `Q`.
pub const DISCRIMINANT_TOL: f64 = 1e-10;

/// Real polynomial with at most three coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: &[f64]) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("polynomial coefficients must be finite".into()));
        }
        let mut coeffs = coeffs.to_vec();
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.len() > 3 {
            return Err(Error::InvalidInput(format!(
                "polynomial degree {} exceeds 2",
                coeffs.len() - 1
            )));
        }
        Ok(Self { coeffs })
    }

    fn from_array(c: [f64; 3]) -> Self {
        let mut coeffs = c.to_vec();
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `z^i`, zero past the stored degree.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_array([self.coeff(1), 2.0 * self.coeff(2), 0.0])
    }

    fn as_array(&self) -> [f64; 3] {
        [self.coeff(0), self.coeff(1), self.coeff(2)]
    }
}

impl TryFrom<Vec<f64>> for Poly {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Poly::new(&v)
    }
}

impl From<Poly> for Vec<f64> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

/// Coefficient triple `(τ̃, σ, σ̃)` of a hypergeometric-type equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem")]
pub struct NuProblem {
    pub tau_tilde: Poly,
    pub sigma: Poly,
    pub sigma_tilde: Poly,
}

#[derive(Deserialize)]
struct RawProblem {
    tau_tilde: Poly,
    sigma: Poly,
    sigma_tilde: Poly,
}

impl TryFrom<RawProblem> for NuProblem {
    type Error = Error;

    fn try_from(r: RawProblem) -> Result<Self> {
        NuProblem::new(r.tau_tilde, r.sigma, r.sigma_tilde)
    }
}

impl NuProblem {
    pub fn new(tau_tilde: Poly, sigma: Poly, sigma_tilde: Poly) -> Result<Self> {
        if tau_tilde.degree().unwrap_or(0) > 1 {
            return Err(Error::InvalidInput("tau_tilde must have degree <= 1".into()));
        }
        if sigma.degree().is_none() {
            return Err(Error::InvalidInput("sigma must not be identically zero".into()));
        }
        Ok(Self {
            tau_tilde,
            sigma,
            sigma_tilde,
        })
    }

    pub fn from_coeffs(tau_tilde: &[f64], sigma: &[f64], sigma_tilde: &[f64]) -> Result<Self> {
        Self::new(Poly::new(tau_tilde)?, Poly::new(sigma)?, Poly::new(sigma_tilde)?)
    }

    /// `(σ' − τ̃)/2`.
    fn half_shift(&self) -> [f64; 3] {
        let ds = self.sigma.derivative();
        [
            0.5 * (ds.coeff(0) - self.tau_tilde.coeff(0)),
            0.5 * (ds.coeff(1) - self.tau_tilde.coeff(1)),
            0.0,
        ]
    }

    /// Coefficients of `Q(z)` split as `base + k·sigma`.
    fn q_affine(&self) -> ([f64; 3], [f64; 3]) {
        let h = self.half_shift();
        let st = self.sigma_tilde.as_array();
        let base = [
            h[0] * h[0] - st[0],
            2.0 * h[0] * h[1] - st[1],
            h[1] * h[1] - st[2],
        ];
        (base, self.sigma.as_array())
    }

    /// Coefficients of `Q(z)` at a given `k`.
    pub fn q_poly(&self, k: f64) -> [f64; 3] {
        let (a, s) = self.q_affine();
        [a[0] + k * s[0], a[1] + k * s[1], a[2] + k * s[2]]
    }

    fn q_scale(&self, k: f64) -> f64 {
        let q = self.q_poly(k);
        q.iter().fold(1.0_f64, |m, c| m.max(c.abs()))
    }

    /// Discriminant `q₁² − 4 q₂ q₀` of `Q` at `k`.
    pub fn q_discriminant(&self, k: f64) -> f64 {
        let q = self.q_poly(k);
        q[1] * q[1] - 4.0 * q[2] * q[0]
    }

    /// Whether `Q` is a perfect square at `k` within [`DISCRIMINANT_TOL`].
    pub fn is_perfect_square(&self, k: f64) -> bool {
        let s = self.q_scale(k);
        self.q_discriminant(k).abs() <= DISCRIMINANT_TOL * s * s
    }
}

/// Sign taken in front of the square root when forming π.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootSign {
    Minus,
    Plus,
}

impl RootSign {
    fn factor(self) -> f64 {
        match self {
            RootSign::Minus => -1.0,
            RootSign::Plus => 1.0,
        }
    }
}

/// One `(k, ±)` choice with its π, τ and `λ = k + π'`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuBranch {
    pub k: f64,
    pub sign: RootSign,
    pub pi: Poly,
    pub tau: Poly,
    pub lambda0: f64,
    /// σ'' of the problem, carried for [`lambda_n`].
    pub sigma_second: f64,
}

impl NuBranch {
    pub fn tau_slope(&self) -> f64 {
        self.tau.coeff(1)
    }

    pub fn is_admissible(&self) -> bool {
        self.tau_slope() < 0.0
    }
}

/// Solve `a x² + b x + c = 0` for real roots; `tol` decides when the
/// discriminant counts as zero.
fn real_quadratic_roots(a: f64, b: f64, c: f64, tol: f64) -> Option<Vec<f64>> {
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs()).max(f64::MIN_POSITIVE);
    if disc < -tol * scale {
        return None;
    }
    if disc.abs() <= tol * scale {
        return Some(vec![-b / (2.0 * a)]);
    }
    let sq = disc.sqrt();
    let t = if b >= 0.0 { -0.5 * (b + sq) } else { -0.5 * (b - sq) };
    let r1 = t / a;
    let r2 = c / t;
    Some(vec![r1, r2])
}

/// Values of `k` for which `Q` is a perfect square of a real polynomial.
pub fn find_k_candidates(p: &NuProblem) -> Result<Vec<f64>> {
    let (a, s) = p.q_affine();
    // disc(k) = (a1 + k s1)² − 4 (a2 + k s2)(a0 + k s0)
    let c2 = s[1] * s[1] - 4.0 * s[2] * s[0];
    let c1 = 2.0 * a[1] * s[1] - 4.0 * (a[2] * s[0] + s[2] * a[0]);
    let c0 = a[1] * a[1] - 4.0 * a[2] * a[0];
    let scale = [c2, c1, c0].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let tiny = 1e-14 * scale.max(1e-300);

    let raw: Vec<f64> = if c2.abs() > tiny {
        real_quadratic_roots(c2, c1, c0, 1e-13).ok_or_else(|| {
            Error::NoReduction("the k-quadratic has a negative discriminant".into())
        })?
    } else if c1.abs() > tiny {
        vec![-c0 / c1]
    } else if c0.abs() <= tiny {
        return Err(Error::NoReduction("every k makes Q a square; problem is indeterminate".into()));
    } else {
        return Err(Error::NoReduction("no k makes Q a perfect square".into()));
    };

    let mut ks: Vec<f64> = raw
        .into_iter()
        .filter(|&k| {
            let q = p.q_poly(k);
            let sc = p.q_scale(k);
            let tol = DISCRIMINANT_TOL.sqrt() * sc;
            // a negative leading (or constant) coefficient cannot be a real square
            q[2] >= -tol && (q[2].abs() > tol || q[0] >= -tol)
        })
        .collect();
    ks.sort_by(|x, y| x.total_cmp(y));
    ks.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs())));
    if ks.is_empty() {
        return Err(Error::NoReduction("Q is never the square of a real polynomial".into()));
    }
    Ok(ks)
}

/// Root polynomial `r` with `r² = Q` at this `k`.
fn square_root_poly(p: &NuProblem, k: f64) -> [f64; 2] {
    let q = p.q_poly(k);
    let sc = p.q_scale(k);
    if q[2] > 1e-12 * sc {
        let r1 = q[2].sqrt();
        [q[1] / (2.0 * r1), r1]
    } else {
        [q[0].max(0.0).sqrt(), 0.0]
    }
}

/// The two branches `π = (σ' − τ̃)/2 ∓ √Q` at `k`, minus sign first.
pub fn build_branches(p: &NuProblem, k: f64) -> [NuBranch; 2] {
    let h = p.half_shift();
    let r = square_root_poly(p, k);
    let sigma_second = 2.0 * p.sigma.coeff(2);
    let make = |sign: RootSign| {
        let f = sign.factor();
        let pi = Poly::from_array([h[0] + f * r[0], h[1] + f * r[1], 0.0]);
        let tau = Poly::from_array([
            p.tau_tilde.coeff(0) + 2.0 * pi.coeff(0),
            p.tau_tilde.coeff(1) + 2.0 * pi.coeff(1),
            0.0,
        ]);
        let lambda0 = k + pi.coeff(1);
        NuBranch {
            k,
            sign,
            pi,
            tau,
            lambda0,
            sigma_second,
        }
    };
    [make(RootSign::Minus), make(RootSign::Plus)]
}

/// Keep the branches with `τ' < 0`, preserving order.
pub fn admissible_branches(branches: &[NuBranch]) -> Result<Vec<NuBranch>> {
    let kept: Vec<NuBranch> = branches.iter().filter(|b| b.is_admissible()).cloned().collect();
    if kept.is_empty() {
        return Err(Error::NoAdmissibleBranch(
            "no branch has a decreasing tau (tau' < 0)".into(),
        ));
    }
    Ok(kept)
}

/// All admissible branches of a problem, ordered by ascending `k` and then
/// minus before plus. Branch indices refer to this order.
pub fn all_admissible_branches(p: &NuProblem) -> Result<Vec<NuBranch>> {
    let mut out = Vec::new();
    for k in find_k_candidates(p)? {
        out.extend(build_branches(p, k).into_iter().filter(NuBranch::is_admissible));
    }
    if out.is_empty() {
        return Err(Error::NoAdmissibleBranch(
            "no k-candidate yields tau' < 0".into(),
        ));
    }
    Ok(out)
}

/// `λ_n = −nτ' − n(n−1)σ''/2`.
pub fn lambda_n(branch: &NuBranch, n: u32) -> f64 {
    let n = f64::from(n);
    -n * branch.tau_slope() - 0.5 * n * (n - 1.0) * branch.sigma_second
}

/// `λ − λ_n` on the selected admissible branch; zero when the problem's
/// coefficients satisfy the quantization condition for level `n`.
pub fn quantization_residual(p: &NuProblem, branch_index: usize, n: u32) -> Result<f64> {
    let branches = all_admissible_branches(p)?;
    let b = branches.get(branch_index).ok_or_else(|| {
        Error::NoAdmissibleBranch(format!(
            "branch index {branch_index} out of range ({} admissible)",
            branches.len()
        ))
    })?;
    Ok(b.lambda0 - lambda_n(b, n))
}

/// Find the parameter value in `bracket` where the quantization residual of
/// `family(parameter)` vanishes (Brent's method).
pub fn solve_eigenparameter<F>(family: F, n: u32, bracket: (f64, f64), branch_index: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<NuProblem>,
{
    let f = |x: f64| -> Result<f64> { quantization_residual(&family(x)?, branch_index, n) };
    let (mut a, mut b) = bracket;
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::Bracket(format!("invalid bracket [{a}, {b}]")));
    }
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!(
            "residual does not change sign on [{a}, {b}] ({fa:e}, {fb:e})"
        )));
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let m = 0.5 * (c - b);
        if fb.abs() <= 1e-13 || m.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut pp, mut qq);
            if a == c {
                pp = 2.0 * m * s;
                qq = 1.0 - s;
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                pp = s * (2.0 * m * q0 * (q0 - r) - (b - a) * (r - 1.0));
                qq = (q0 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if pp > 0.0 {
                qq = -qq;
            } else {
                pp = -pp;
            }
            if 2.0 * pp < (3.0 * m * qq - (tol * qq).abs()).min((e * qq).abs()) {
                e = d;
                d = pp / qq;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Ok(b)
}

/// Grow `[lo, lo + step·2^j]` until `f` changes sign.
pub fn expand_bracket<F>(f: F, lo: f64, step: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let f_lo = f(lo)?;
    let mut a = lo;
    let mut width = step;
    for _ in 0..80 {
        let b = lo + width;
        let fb = f(b)?;
        if fb == 0.0 || fb.signum() != f_lo.signum() {
            return Ok((a, b));
        }
        a = b;
        width *= 2.0;
    }
    Err(Error::Bracket(format!("no sign change found above {lo}")))
}

/// Power/exponential factorization of φ (from `φ'/φ = π/σ`) and of the
/// weight ρ (from `(σρ)' = τρ`).
///
/// `φ(z) = Π |z − root_i|^{phi_exponents[i]} · exp(phi_exp_rate·z + phi_gauss_rate·z²)`,
/// and likewise for ρ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorSpec {
    pub roots: Vec<f64>,
    pub phi_exponents: Vec<f64>,
    pub phi_exp_rate: f64,
    pub phi_gauss_rate: f64,
    pub rho_exponents: Vec<f64>,
    pub rho_exp_rate: f64,
    pub rho_gauss_rate: f64,
}

impl FactorSpec {
    fn log_derivative(exponents: &[f64], roots: &[f64], rate: f64, gauss: f64, z: f64) -> f64 {
        roots
            .iter()
            .zip(exponents)
            .map(|(r, e)| e / (z - r))
            .sum::<f64>()
            + rate
            + 2.0 * gauss * z
    }

    /// `φ'/φ` from the stored exponents.
    pub fn phi_log_derivative(&self, z: f64) -> f64 {
        Self::log_derivative(&self.phi_exponents, &self.roots, self.phi_exp_rate, self.phi_gauss_rate, z)
    }

    /// `ρ'/ρ` from the stored exponents.
    pub fn rho_log_derivative(&self, z: f64) -> f64 {
        Self::log_derivative(&self.rho_exponents, &self.roots, self.rho_exp_rate, self.rho_gauss_rate, z)
    }

    pub fn rho(&self, z: f64) -> f64 {
        let powers: f64 = self
            .roots
            .iter()
            .zip(&self.rho_exponents)
            .map(|(r, e)| (z - r).abs().powf(*e))
            .product();
        powers * (self.rho_exp_rate * z + self.rho_gauss_rate * z * z).exp()
    }
}

/// Partial fractions of `num/σ` for linear `num`.
fn partial_fractions(sigma: &Poly, num: [f64; 2]) -> Result<(Vec<f64>, Vec<f64>, f64, f64)> {
    let eval = |z: f64| num[0] + num[1] * z;
    match sigma.degree() {
        Some(0) => {
            let s0 = sigma.coeff(0);
            Ok((Vec::new(), Vec::new(), num[0] / s0, 0.5 * num[1] / s0))
        }
        Some(1) => {
            let s1 = sigma.coeff(1);
            let root = -sigma.coeff(0) / s1;
            Ok((vec![root], vec![eval(root) / s1], num[1] / s1, 0.0))
        }
        Some(2) => {
            let (c, b, a) = (sigma.coeff(0), sigma.coeff(1), sigma.coeff(2));
            let disc = b * b - 4.0 * a * c;
            let scale = (b * b).max((4.0 * a * c).abs());
            if disc <= 1e-14 * scale {
                return Err(Error::UnsupportedClass(
                    "sigma has a double or complex root pair".into(),
                ));
            }
            let sq = disc.sqrt();
            let mut z1 = (-b - sq) / (2.0 * a);
            let mut z2 = (-b + sq) / (2.0 * a);
            if z1 > z2 {
                std::mem::swap(&mut z1, &mut z2);
            }
            let e1 = eval(z1) / (a * (z1 - z2));
            let e2 = eval(z2) / (a * (z2 - z1));
            Ok((vec![z1, z2], vec![e1, e2], 0.0, 0.0))
        }
        _ => Err(Error::UnsupportedClass("sigma is zero".into())),
    }
}

pub fn factor_spec(p: &NuProblem, branch: &NuBranch) -> Result<FactorSpec> {
    let (roots, phi_exponents, phi_exp_rate, phi_gauss_rate) =
        partial_fractions(&p.sigma, [branch.pi.coeff(0), branch.pi.coeff(1)])?;
    let ds = p.sigma.derivative();
    let g = [
        branch.tau.coeff(0) - ds.coeff(0),
        branch.tau.coeff(1) - ds.coeff(1),
    ];
    let (_, rho_exponents, rho_exp_rate, rho_gauss_rate) = partial_fractions(&p.sigma, g)?;
    Ok(FactorSpec {
        roots,
        phi_exponents,
        phi_exp_rate,
        phi_gauss_rate,
        rho_exponents,
        rho_exp_rate,
        rho_gauss_rate,
    })
}

/// `(σρ)' − τρ` divided by `ρ`, i.e. `σ' + σ·ρ'/ρ − τ`, at a point.
pub fn weight_identity_defect(p: &NuProblem, branch: &NuBranch, fs: &FactorSpec, z: f64) -> f64 {
    p.sigma.derivative().eval(z) + p.sigma.eval(z) * fs.rho_log_derivative(z) - branch.tau.eval(z)
}

/// `x = scale·z + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArgumentMap {
    pub scale: f64,
    pub offset: f64,
}

impl ArgumentMap {
    pub fn apply(&self, z: f64) -> f64 {
        self.scale * z + self.offset
    }
}

/// Classical polynomial family produced by the Rodrigues formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum PolynomialFamily {
    /// `L_n^μ(x)`, weight `x^μ e^{−x}` on `[0, ∞)`.
    Laguerre { mu: f64, argument: ArgumentMap },
    /// `P_n^{(α,β)}(x)`, weight `(1−x)^α (1+x)^β` on `[−1, 1]`.
    Jacobi { alpha: f64, beta: f64, argument: ArgumentMap },
    /// `H_n(x)`, weight `e^{−x²}`.
    Hermite { argument: ArgumentMap },
}

pub fn classify_polynomial_family(p: &NuProblem, fs: &FactorSpec) -> Result<PolynomialFamily> {
    match p.sigma.degree() {
        Some(0) => {
            let g = fs.rho_gauss_rate;
            if !(g < 0.0) {
                return Err(Error::UnsupportedClass("constant sigma without a decaying gaussian weight".into()));
            }
            // ρ ∝ exp(g z² + r z) = exp(−(√−g z − r/(2√−g))²) up to a constant
            let s = (-g).sqrt();
            Ok(PolynomialFamily::Hermite {
                argument: ArgumentMap {
                    scale: s,
                    offset: -fs.rho_exp_rate / (2.0 * s),
                },
            })
        }
        Some(1) => {
            let rate = fs.rho_exp_rate;
            if !(rate < 0.0) {
                return Err(Error::UnsupportedClass(
                    "linear sigma without a decaying exponential weight".into(),
                ));
            }
            let c = -rate;
            let root = fs.roots[0];
            Ok(PolynomialFamily::Laguerre {
                mu: fs.rho_exponents[0],
                argument: ArgumentMap {
                    scale: c,
                    offset: -c * root,
                },
            })
        }
        Some(2) => {
            let (z1, z2) = (fs.roots[0], fs.roots[1]);
            let w = z2 - z1;
            Ok(PolynomialFamily::Jacobi {
                alpha: fs.rho_exponents[0],
                beta: fs.rho_exponents[1],
                argument: ArgumentMap {
                    scale: -2.0 / w,
                    offset: (z1 + z2) / w,
                },
            })
        }
        _ => Err(Error::UnsupportedClass("unrecognized sigma".into())),
    }
}
