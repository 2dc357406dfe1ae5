//! Finite-difference Sturm–Liouville eigensolver for `−u'' + V u = ε u`.
//!
//! Endpoints with an inverse-square barrier `c/x²` make `u ~ x^s` with
//! `s(s−1) = c`, which wrecks the accuracy of a plain 3-point stencil when
//! `s` is not an integer. The solver writes `u = g·w` with
//! `g = (x−lo)^{s_l} (hi−x)^{s_r}` and discretizes the equivalent problem
//! `−(g² w')' + g² (V − g''/g) w = ε g² w` for the smooth factor `w`.
//! On a quarter-period interval `g = sin^{s_l} cos^{s_r}` of the rescaled
//! coordinate is used instead, which has zero slope at a Neumann end.

use crate::error::{Error, Result};

/// Boundary behaviour at one end of the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    /// `u = 0` at a regular endpoint.
    Dirichlet,
    /// `u' = 0` at a regular endpoint.
    Neumann,
    /// Barrier `c/x²`; selects the square-integrable root
    /// `s = (1 + √(1+4c))/2`.
    InverseSquare(f64),
    /// Explicit power `u ~ x^s`.
    Power(f64),
}

impl Endpoint {
    pub fn exponent(self) -> Result<f64> {
        match self {
            Endpoint::Dirichlet => Ok(1.0),
            Endpoint::Neumann => Ok(0.0),
            Endpoint::InverseSquare(c) => {
                if !(1.0 + 4.0 * c >= 0.0) {
                    return Err(Error::Grid(format!("barrier coefficient {c} < -1/4 has no real exponent")));
                }
                Ok(0.5 * (1.0 + (1.0 + 4.0 * c).sqrt()))
            }
            Endpoint::Power(s) => Ok(s),
        }
    }
}

/// Shape of the endpoint factor `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// `(x−lo)^{s_l} (hi−x)^{s_r}`.
    Algebraic,
    /// `sin^{s_l}(k(x−lo)) cos^{s_r}(k(x−lo))` with `k = π / (2(hi−lo))`.
    Trigonometric,
}

/// Cell-centred grid: `N` nodes at `lo + (i + ½)h`, `h = (hi − lo)/N`,
/// so no node sits on a singular endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub left: Endpoint,
    pub right: Endpoint,
    pub factor: Factor,
}

impl FdGrid {
    pub const MIN_POINTS: usize = 100;

    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Grid(format!("invalid domain ({lo}, {hi})")));
        }
        if n < Self::MIN_POINTS {
            return Err(Error::Grid(format!("need at least {} points, got {n}", Self::MIN_POINTS)));
        }
        Ok(Self {
            lo,
            hi,
            n,
            left: Endpoint::Dirichlet,
            right: Endpoint::Dirichlet,
            factor: Factor::Algebraic,
        })
    }

    pub fn with_endpoints(mut self, left: Endpoint, right: Endpoint) -> Self {
        self.left = left;
        self.right = right;
        self
    }

    pub fn with_factor(mut self, factor: Factor) -> Self {
        self.factor = factor;
        self
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.spacing()
    }

    fn refined(&self) -> Self {
        Self { n: 2 * self.n, ..*self }
    }
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] / q };
            q = self.diag[i] - x - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue by bisection.
    fn eigenvalue(&self, k: usize, bounds: (f64, f64)) -> f64 {
        let (mut a, mut b) = bounds;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.count_below(mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        0.5 * (a + b)
    }
}

fn assemble(potential: &dyn Fn(f64) -> f64, grid: &FdGrid) -> Result<Tridiagonal> {
    let sl = grid.left.exponent()?;
    let sr = grid.right.exponent()?;
    let h = grid.spacing();
    let n = grid.n;
    let k = std::f64::consts::FRAC_PI_2 / (grid.hi - grid.lo);
    // (g², g''/g) at x, written with the endpoint distances a and b
    let factor = |x: f64| -> (f64, f64) {
        let (a, b) = (x - grid.lo, grid.hi - x);
        match grid.factor {
            Factor::Algebraic => (
                a.powf(2.0 * sl) * b.powf(2.0 * sr),
                sl * (sl - 1.0) / (a * a) + sr * (sr - 1.0) / (b * b) - 2.0 * sl * sr / (a * b),
            ),
            Factor::Trigonometric => {
                let (s, c) = ((k * a).sin(), (k * b).sin());
                let g1 = sl * c / s - sr * s / c;
                (
                    s.powf(2.0 * sl) * c.powf(2.0 * sr),
                    k * k * (g1 * g1 - sl / (s * s) - sr / (c * c)),
                )
            }
        }
    };
    // g²(x_i) and g²(V − g''/g) at the nodes
    let mut weight = Vec::with_capacity(n);
    let mut reaction = Vec::with_capacity(n);
    for i in 0..n {
        let x = grid.node(i);
        let v = potential(x);
        if !v.is_finite() {
            return Err(Error::Grid(format!("potential is not finite at x = {x}")));
        }
        let (w, g_ratio) = factor(x);
        weight.push(w);
        reaction.push(w * (v - g_ratio));
    }
    // flux coefficients g² at interior faces; end faces carry no flux
    let face: Vec<f64> = (1..n).map(|i| factor(grid.lo + i as f64 * h).0).collect();
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let left = if i > 0 { face[i - 1] } else { 0.0 };
        let right = if i + 1 < n { face[i] } else { 0.0 };
        let k = (left + right) / (h * h) + reaction[i];
        diag.push(k / weight[i]);
        if i + 1 < n {
            off.push(-face[i] / (h * h) / (weight[i] * weight[i + 1]).sqrt());
        }
    }
    if diag.iter().chain(&off).any(|v| !v.is_finite()) {
        return Err(Error::Grid("matrix entries overflowed; shrink the domain or exponents".into()));
    }
    Ok(Tridiagonal { diag, off })
}

/// Lowest `count` eigenvalues on a single grid (O(h²) accurate).
pub fn fd_eigen_single(potential: &dyn Fn(f64) -> f64, grid: &FdGrid, count: usize) -> Result<Vec<f64>> {
    if count == 0 || count > 10 {
        return Err(Error::Grid(format!("eigenvalue count must be in 1..=10, got {count}")));
    }
    let t = assemble(potential, grid)?;
    let bounds = t.gershgorin();
    Ok((0..count).map(|k| t.eigenvalue(k, bounds)).collect())
}

/// Lowest `count` eigenvalues, Richardson-extrapolated from grids `N` and `2N`.
pub fn fd_eigen(potential: &dyn Fn(f64) -> f64, grid: &FdGrid, count: usize) -> Result<Vec<f64>> {
    let coarse = fd_eigen_single(potential, grid, count)?;
    let fine = fd_eigen_single(potential, &grid.refined(), count)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}

/// Default grid size for oracle runs.
pub const DEFAULT_POINTS: usize = 4000;

/// Lowest `count` eigenvalues of `−u'' + (Ā r² + γ/r²) u = ε u` on `(0, ∞)`.
///
/// The box is sized from a coarse first pass: 1.8 times the turning point
/// of the highest requested level, and at least where `√Ā r² = 40`.
pub fn radial_fd_eigenvalues(abar: f64, gamma: f64, count: usize, points: usize) -> Result<Vec<f64>> {
    let c = abar.sqrt();
    let v = move |r: f64| abar * r * r + gamma / (r * r);
    let turning = |eps: f64| {
        let disc = (eps * eps - 4.0 * abar * gamma).max(0.0);
        ((eps + disc.sqrt()) / (2.0 * abar)).sqrt()
    };
    let floor = (40.0 / c).sqrt();
    let left = Endpoint::InverseSquare(gamma);
    let pilot_box = 2.0 * floor.max(turning(c * (4.0 * count as f64 + 2.0 * (1.0 + gamma.max(0.0)).sqrt() + 4.0)));
    let pilot = FdGrid::new(0.0, pilot_box, 400)?.with_endpoints(left, Endpoint::Dirichlet);
    let estimate = fd_eigen_single(&v, &pilot, count)?;
    let r_max = (1.8 * turning(estimate[count - 1])).max(floor);
    let grid = FdGrid::new(0.0, r_max, points)?.with_endpoints(left, Endpoint::Dirichlet);
    fd_eigen(&v, &grid, count)
}

/// Lowest `count` eigenvalues `Γ` of `−y'' + (κ/sin²θ + D̄/cos²θ) y = Γ y`
/// on `(0, π/2)`. `right` overrides the boundary behaviour at `π/2`.
pub fn angular_fd_eigenvalues(kappa: f64, dbar: f64, right: Endpoint, count: usize, points: usize) -> Result<Vec<f64>> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let v = move |th: f64| {
        let (s, c) = if th <= 0.5 * half_pi {
            (th.sin(), th.cos())
        } else {
            ((half_pi - th).cos(), (half_pi - th).sin())
        };
        kappa / (s * s) + dbar / (c * c)
    };
    let grid = FdGrid::new(0.0, half_pi, points)?
        .with_endpoints(Endpoint::InverseSquare(kappa), right)
        .with_factor(Factor::Trigonometric);
    fd_eigen(&v, &grid, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn particle_in_a_box() {
        let grid = FdGrid::new(0.0, PI, 2000).unwrap();
        let e = fd_eigen(&|_| 0.0, &grid, 3).unwrap();
        for (k, v) in e.iter().enumerate() {
            let exact = ((k + 1) * (k + 1)) as f64;
            assert!(rel(*v, exact) < 1e-6, "{v} vs {exact}");
        }
    }

    #[test]
    fn radial_oscillator_in_fixed_box() {
        let grid = FdGrid::new(0.0, 12.0, 4000).unwrap();
        let e = fd_eigen(&|r| r * r, &grid, 3).unwrap();
        for (got, exact) in e.iter().zip([3.0, 7.0, 11.0]) {
            assert!(rel(*got, exact) < 1e-5, "{got} vs {exact}");
        }
    }

    #[test]
    fn half_integer_endpoint_exponent() {
        // κ = −¼: y ~ θ^{1/2} at 0, Dirichlet at π/2
        let e = angular_fd_eigenvalues(-0.25, 0.0, Endpoint::Dirichlet, 2, 4000).unwrap();
        assert!(rel(e[0], 2.25) < 1e-5 && rel(e[1], 12.25) < 1e-5, "{e:?}");
        let e = angular_fd_eigenvalues(-0.25, 0.0, Endpoint::Neumann, 2, 4000).unwrap();
        assert!(rel(e[0], 0.25) < 1e-5 && rel(e[1], 6.25) < 1e-5, "{e:?}");
    }

    #[test]
    fn poschl_teller_barriers() {
        let e = angular_fd_eigenvalues(2.0, 2.0, Endpoint::InverseSquare(2.0), 4, 4000).unwrap();
        for (k, v) in e.iter().enumerate() {
            let exact = (4.0 + 2.0 * k as f64).powi(2);
            assert!(rel(*v, exact) < 1e-5, "{v} vs {exact}");
        }
    }

    #[test]
    fn radial_with_barrier() {
        for gamma in [0.0, 2.0, 3.0, 15.75] {
            let e = radial_fd_eigenvalues(1.0, gamma, 4, 4000).unwrap();
            for (n, v) in e.iter().enumerate() {
                let exact = 4.0 * n as f64 + 2.0 + (1.0 + 4.0 * gamma).sqrt();
                assert!(rel(*v, exact) < 1e-5, "gamma {gamma} n {n}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn richardson_converges() {
        let single = |n| {
            let grid = FdGrid::new(0.0, FRAC_PI_2, n)
                .unwrap()
                .with_endpoints(Endpoint::InverseSquare(2.0), Endpoint::InverseSquare(2.0));
            let v = |th: f64| 2.0 / th.sin().powi(2) + 2.0 / th.cos().powi(2);
            (fd_eigen_single(&v, &grid, 1).unwrap()[0], fd_eigen(&v, &grid, 1).unwrap()[0])
        };
        let (a, ra) = single(1000);
        let (b, rb) = single(2000);
        let (c, rc) = single(4000);
        let ratio = (a - b) / (b - c);
        assert!((ratio - 4.0).abs() < 0.3, "ratio {ratio}");
        assert!(rel(ra, rb) < 1e-5 && rel(rb, rc) < 1e-6);
    }

    #[test]
    fn grid_guards() {
        assert!(FdGrid::new(0.0, 1.0, 50).is_err());
        assert!(FdGrid::new(1.0, 0.0, 500).is_err());
        let grid = FdGrid::new(0.0, 1.0, 200).unwrap();
        assert!(matches!(fd_eigen(&|_| f64::NAN, &grid, 1), Err(Error::Grid(_))));
    }
}
