//! Classical orthogonal polynomials, log-gamma and Gauss–Legendre rules.

use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the series argument away from zero.
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let z = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}

/// Generalized Laguerre polynomial `L_n^μ(x)` by upward recurrence.
pub fn laguerre(n: u32, mu: f64, x: f64) -> Result<f64> {
    if !(mu > -1.0) {
        return Err(Error::InvalidInput(format!("Laguerre index mu must exceed -1, got {mu}")));
    }
    Ok(laguerre_raw(n, mu, x))
}

pub(crate) fn laguerre_raw(n: u32, mu: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut curr = 1.0 + mu - x;
    for k in 1..n {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0 + mu - x) * curr - (k + mu) * prev) / (k + 1.0);
        prev = curr;
        curr = next;
    }
    curr
}

/// `(L, dL/dx, d²L/dx²)` via `d/dx L_n^μ = −L_{n−1}^{μ+1}`.
pub fn laguerre_with_derivatives(n: u32, mu: f64, x: f64) -> (f64, f64, f64) {
    let value = laguerre_raw(n, mu, x);
    let d1 = if n >= 1 { -laguerre_raw(n - 1, mu + 1.0, x) } else { 0.0 };
    let d2 = if n >= 2 { laguerre_raw(n - 2, mu + 2.0, x) } else { 0.0 };
    (value, d1, d2)
}

/// Jacobi polynomial `P_n^{(α,β)}(x)` by the three-term recurrence.
pub fn jacobi(n: u32, alpha: f64, beta: f64, x: f64) -> Result<f64> {
    if !(alpha > -1.0) || !(beta > -1.0) {
        return Err(Error::InvalidInput(format!(
            "Jacobi indices must exceed -1, got ({alpha}, {beta})"
        )));
    }
    Ok(jacobi_raw(n, alpha, beta, x))
}

pub(crate) fn jacobi_raw(n: u32, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ab = alpha + beta;
    let mut prev = 1.0;
    let mut curr = 0.5 * ((ab + 2.0) * x + (alpha - beta));
    for k in 2..=n {
        let k = f64::from(k);
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta);
        let a3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c;
        let next = (a2 * curr - a3 * prev) / a1;
        prev = curr;
        curr = next;
    }
    curr
}

/// `(P, dP/dx, d²P/dx²)` via the index-shift derivative identity.
pub fn jacobi_with_derivatives(n: u32, alpha: f64, beta: f64, x: f64) -> (f64, f64, f64) {
    let value = jacobi_raw(n, alpha, beta, x);
    let nf = f64::from(n);
    let s = nf + alpha + beta;
    let d1 = if n >= 1 {
        0.5 * (s + 1.0) * jacobi_raw(n - 1, alpha + 1.0, beta + 1.0, x)
    } else {
        0.0
    };
    let d2 = if n >= 2 {
        0.25 * (s + 1.0) * (s + 2.0) * jacobi_raw(n - 2, alpha + 2.0, beta + 2.0, x)
    } else {
        0.0
    };
    (value, d1, d2)
}

/// ln of `∫₀^∞ x^μ e^{−x} [L_n^μ(x)]² dx = Γ(n+μ+1)/n!`.
pub fn laguerre_log_norm(n: u32, mu: f64) -> f64 {
    let nf = f64::from(n);
    ln_gamma_pos(nf + mu + 1.0) - ln_gamma_pos(nf + 1.0)
}

/// ln of `∫₀¹ t^α (1−t)^β [P_n^{(α,β)}(1−2t)]² dt`.
pub fn jacobi_log_norm_unit(n: u32, alpha: f64, beta: f64) -> f64 {
    let nf = f64::from(n);
    if n == 0 {
        return ln_gamma_pos(alpha + 1.0) + ln_gamma_pos(beta + 1.0)
            - ln_gamma_pos(alpha + beta + 2.0);
    }
    ln_gamma_pos(nf + alpha + 1.0) + ln_gamma_pos(nf + beta + 1.0)
        - (2.0 * nf + alpha + beta + 1.0).ln()
        - ln_gamma_pos(nf + alpha + beta + 1.0)
        - ln_gamma_pos(nf + 1.0)
}

/// Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Legendre P_n and P_n' at x.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

pub fn gauss_legendre(order: usize) -> QuadratureRule {
    let n = order.max(1);
    if n == 1 {
        return QuadratureRule {
            nodes: vec![0.0],
            weights: vec![2.0],
            order: 1,
        };
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // roots come out descending from +1
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule {
        nodes,
        weights,
        order: n,
    }
}

/// Composite Gauss–Legendre rule whose panels shrink geometrically toward
/// both ends of the interval, for integrands with endpoint power laws.
///
/// Each node also stores its exact distance to either endpoint, so
/// integrands singular at a nonzero endpoint can be evaluated without
/// cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub from_left: Vec<f64>,
    pub from_right: Vec<f64>,
}

impl CompositeRule {
    pub fn graded(a: f64, b: f64, order: usize, ratio: f64, levels_left: usize, levels_right: usize) -> Self {
        let base = gauss_legendre(order);
        let half = 0.5 * (b - a);

        // panel offsets measured from the endpoint they are graded toward
        let mut left_breaks = vec![0.0];
        left_breaks.extend((1..=levels_left).rev().map(|k| half * ratio.powi(k as i32)));
        left_breaks.extend((1..=4).map(|k| half * f64::from(k) / 4.0));
        let mut right_breaks = vec![0.0];
        right_breaks.extend((1..=levels_right).rev().map(|k| half * ratio.powi(k as i32)));
        right_breaks.extend((1..=4).map(|k| half * f64::from(k) / 4.0));

        let cap = (left_breaks.len() + right_breaks.len()) * order;
        let mut rule = Self {
            nodes: Vec::with_capacity(cap),
            weights: Vec::with_capacity(cap),
            from_left: Vec::with_capacity(cap),
            from_right: Vec::with_capacity(cap),
        };
        for pair in left_breaks.windows(2) {
            let (c, h) = (0.5 * (pair[0] + pair[1]), 0.5 * (pair[1] - pair[0]));
            for (x, w) in base.nodes.iter().zip(&base.weights) {
                let d = c + h * x;
                rule.nodes.push(a + d);
                rule.weights.push(h * w);
                rule.from_left.push(d);
                rule.from_right.push(2.0 * half - d);
            }
        }
        for pair in right_breaks.windows(2).rev() {
            let (c, h) = (0.5 * (pair[0] + pair[1]), 0.5 * (pair[1] - pair[0]));
            for (x, w) in base.nodes.iter().zip(&base.weights).rev() {
                let d = c + h * x;
                rule.nodes.push(b - d);
                rule.weights.push(h * w);
                rule.from_left.push(2.0 * half - d);
                rule.from_right.push(d);
            }
        }
        rule
    }

    /// Default rule for (a, b): 16-point panels, ratio 1/4, deep grading.
    pub fn standard(a: f64, b: f64) -> Self {
        Self::graded(a, b, 16, 0.25, 120, 120)
    }

    /// Rule on [0, ∞) through `x = scale·s/(1−s)`.
    pub fn half_line(scale: f64) -> Self {
        Self::half_line_graded(scale, 24, 120, 30)
    }

    pub fn half_line_graded(scale: f64, order: usize, levels_left: usize, levels_right: usize) -> Self {
        let unit = Self::graded(0.0, 1.0, order, 0.25, levels_left, levels_right);
        let n = unit.nodes.len();
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let (s, one_minus) = (unit.from_left[i], unit.from_right[i]);
            nodes.push(scale * s / one_minus);
            weights.push(unit.weights[i] * scale / (one_minus * one_minus));
        }
        Self {
            from_left: nodes.clone(),
            from_right: vec![f64::INFINITY; n],
            nodes,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integrate `f(x, x − a, b − x)`.
    pub fn integrate_split<F: Fn(f64, f64, f64) -> f64>(&self, f: F) -> f64 {
        (0..self.nodes.len())
            .map(|i| self.weights[i] * f(self.nodes[i], self.from_left[i], self.from_right[i]))
            .sum()
    }
}
