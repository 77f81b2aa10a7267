//! The root of `Σ m_i e^{−β λ_i} = 1` in `β`, shared by critical
//! temperatures and similarity dimensions.

use crate::error::{Error, Result};

/// Residual tolerance on `|Σ − 1|`.
pub const ROOT_TOLERANCE: f64 = 1e-12;

pub const MAX_BISECTIONS: usize = 200;

const LOWER_BRACKET: f64 = 1e-9;

/// One group of equal terms: `multiplicity` copies of `e^{−βλ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub multiplicity: f64,
    pub lambda: f64,
}

impl Term {
    pub fn single(lambda: f64) -> Self {
        Term { multiplicity: 1.0, lambda }
    }
}

/// `Σ m e^{−βλ}`, summed in log space so huge multiplicities stay finite.
pub fn weighted_sum(terms: &[Term], beta: f64) -> f64 {
    terms
        .iter()
        .map(|t| (t.multiplicity.ln() - beta * t.lambda).exp())
        .sum()
}

/// Solves `Σ m e^{−βλ} = 1` for `β ≥ 0` by bisection.
///
/// The sum is strictly decreasing in `β`. When it is already at most 1 near
/// `β = 0` (a single unit term) the root is the boundary value 0.
pub fn keane_root(terms: &[Term]) -> Result<f64> {
    if terms.is_empty() {
        return Err(Error::precondition("no weights"));
    }
    for t in terms {
        if !(t.lambda.is_finite() && t.lambda > 0.0) {
            return Err(Error::precondition(format!("weight exponent {} must be positive", t.lambda)));
        }
        if !(t.multiplicity.is_finite() && t.multiplicity > 0.0) {
            return Err(Error::precondition(format!("multiplicity {} must be positive", t.multiplicity)));
        }
    }
    let f = |beta: f64| weighted_sum(terms, beta) - 1.0;
    let mut lo = LOWER_BRACKET;
    if f(lo) <= 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0f64;
    while f(hi) >= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NonConvergence { iterations: 0, residual: f(hi) });
        }
    }
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    // pick the endpoint with the smaller residual
    let beta = if f(lo).abs() <= f(hi).abs() { lo } else { hi };
    let residual = f(beta).abs();
    if residual < ROOT_TOLERANCE {
        Ok(beta)
    } else {
        Err(Error::NonConvergence { iterations, residual })
    }
}
