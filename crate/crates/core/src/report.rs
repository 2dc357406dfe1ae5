//! Deterministic JSON and CSV output.
//!
//! Every float is rounded to 12 significant digits and then written in its
//! shortest round-trip form, so identical inputs give byte-identical files.

use serde::Serialize;
use serde_json::Value;

use crate::assembly::TotalWavefunction;
use crate::error::{Error, Result};

/// Round to 12 significant digits; non-finite values pass through.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn canonicalize(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = round_sig(num.as_f64().unwrap_or(f64::NAN));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

/// JSON tree with rounded floats; NaN and infinities become `null`.
pub fn canonical_value<T: Serialize + ?Sized>(value: &T) -> Result<Value> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    canonicalize(&mut v);
    Ok(v)
}

/// Pretty-printed canonical JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = canonical_value(value)?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::InvalidInput(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub const CSV_HEADER: &str = "r,theta,phi,psi_re,psi_im,abs2";

/// One sample of Ψ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavefunctionSample {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub psi_re: f64,
    pub psi_im: f64,
    pub abs2: f64,
}

/// Tensor-product lattice of sample coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleLattice {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

impl SampleLattice {
    /// `count` evenly spaced interior points of `(lo, hi)` per axis.
    pub fn interior(r_max: f64, nr: usize, ntheta: usize, nphi: usize) -> Self {
        let inner = |lo: f64, hi: f64, k: usize| -> Vec<f64> {
            (1..=k).map(|i| lo + (hi - lo) * i as f64 / (k + 1) as f64).collect()
        };
        Self {
            r: inner(0.0, r_max, nr),
            theta: inner(0.0, std::f64::consts::FRAC_PI_2, ntheta),
            phi: (0..nphi).map(|i| 2.0 * std::f64::consts::PI * i as f64 / nphi.max(1) as f64).collect(),
        }
    }
}

/// Samples Ψ on the lattice. Points outside the domain are returned as
/// warnings rather than rows.
pub fn sample_wavefunction(psi: &TotalWavefunction, lattice: &SampleLattice) -> (Vec<WavefunctionSample>, Vec<String>) {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &r in &lattice.r {
        for &theta in &lattice.theta {
            for &phi in &lattice.phi {
                match psi.eval(r, theta, phi) {
                    Ok(v) => rows.push(WavefunctionSample {
                        r,
                        theta,
                        phi,
                        psi_re: v.re,
                        psi_im: v.im,
                        abs2: v.norm_sqr(),
                    }),
                    Err(e) => warnings.push(format!("skipped (r={r}, theta={theta}, phi={phi}): {e}")),
                }
            }
        }
    }
    (rows, warnings)
}

fn fmt_float(x: f64) -> String {
    let x = round_sig(x);
    if x.is_finite() {
        format!("{x}")
    } else {
        "nan".into()
    }
}

pub fn samples_to_csv(rows: &[WavefunctionSample]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in rows {
        let cols = [s.r, s.theta, s.phi, s.psi_re, s.psi_im, s.abs2].map(fmt_float);
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}
