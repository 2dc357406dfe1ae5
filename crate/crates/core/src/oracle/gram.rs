//! Gram matrices of closed-form eigenfunctions by quadrature.

use crate::error::{Error, Result};
use crate::oracle::residual::SeparatedSolution;

/// `G[i][j] = ∫ y_i y_j` over the common domain.
pub fn orthonormality_matrix<S: SeparatedSolution>(specs: &[S]) -> Result<Vec<Vec<f64>>> {
    let Some(first) = specs.first() else {
        return Ok(Vec::new());
    };
    let key = first.family_key();
    for s in specs {
        let same = s.equation() == first.equation()
            && s.family_key()
                .iter()
                .zip(&key)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        if !same {
            return Err(Error::InvalidInput(
                "Gram matrix needs solutions of one equation with shared parameters".into(),
            ));
        }
    }
    let rule = first.quadrature();
    // tabulate every solution once on the rule
    let table: Vec<Vec<f64>> = specs
        .iter()
        .map(|s| {
            (0..rule.len())
                .map(|i| s.eval_split(rule.nodes[i], rule.from_left[i], rule.from_right[i]).0)
                .collect()
        })
        .collect();
    let n = specs.len();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = (0..rule.len()).map(|k| rule.weights[k] * table[i][k] * table[j][k]).sum();
            if !v.is_finite() {
                return Err(Error::Inadmissible("inner product diverges".into()));
            }
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

/// `max |G − I|`.
pub fn gram_defect(g: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    worst
}
