//! Dimension formulas for the fractal `S_C ⊂ [0,1]^n` of points whose
//! `q`-ary digit rows all lie in `C`, and for its intersections with
//! coordinate subspaces. Everything reduces to counting codewords.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::{compare_log_ratios, exact_log, log_q_big, Code};
use crate::error::{Error, Result};
use crate::numeric::{keane_root, Term};

/// Largest length scanned over all coordinate subsets.
pub const EXHAUSTIVE_MAX_N: usize = 16;

/// Subsets sampled per `ℓ` above [`EXHAUSTIVE_MAX_N`].
pub const SAMPLED_SUBSETS: usize = 4096;

/// The affine coordinate subspace `{x : x_i = a_i for the fixed i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoordinateSubspace {
    n: usize,
    fixed: BTreeMap<usize, u8>,
}

impl CoordinateSubspace {
    pub fn new(n: usize, fixed: impl IntoIterator<Item = (usize, u8)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, a) in fixed {
            if i >= n {
                return Err(Error::InvalidInput(format!("fixed position {i} ≥ {n}")));
            }
            if map.insert(i, a).is_some() {
                return Err(Error::InvalidInput(format!("position {i} fixed twice")));
            }
        }
        Ok(CoordinateSubspace { n, fixed: map })
    }

    /// No fixed coordinates.
    pub fn whole(n: usize) -> Self {
        CoordinateSubspace { n, fixed: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension `ℓ = n − #fixed`.
    pub fn ell(&self) -> usize {
        self.n - self.fixed.len()
    }

    pub fn fixed(&self) -> &BTreeMap<usize, u8> {
        &self.fixed
    }

    pub fn matches(&self, word: &[u8]) -> bool {
        self.fixed.iter().all(|(&i, &a)| word[i] == a)
    }
}

impl fmt::Display for CoordinateSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.fixed.iter().map(|(i, a)| format!("x{i}={a}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn check_subspace(code: &Code, pi: &CoordinateSubspace) -> Result<()> {
    if pi.n != code.n() {
        return Err(Error::LengthMismatch { left: code.n(), right: pi.n });
    }
    if let Some(&a) = pi.fixed.values().find(|&&a| a as u32 >= code.q()) {
        return Err(Error::DigitOutOfRange { digit: a as u32, q: code.q() });
    }
    Ok(())
}

/// `#(C ∩ π)`.
pub fn subspace_count(code: &Code, pi: &CoordinateSubspace) -> Result<usize> {
    check_subspace(code, pi)?;
    Ok(code.words().iter().filter(|w| pi.matches(w.digits())).count())
}

/// A Hausdorff dimension, or the empty set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Empty,
    Value(f64),
}

impl Dimension {
    pub fn value(&self) -> Option<f64> {
        match self {
            Dimension::Empty => None,
            Dimension::Value(v) => Some(*v),
        }
    }
}

/// `log_q(count)/denominator`, or empty for count 0.
pub(crate) fn count_dimension(count: usize, q: u32, denominator: usize) -> Dimension {
    if count == 0 {
        Dimension::Empty
    } else {
        Dimension::Value(log_q_big(&BigUint::from(count), q) / denominator as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractalDimensions {
    /// `dim S_C = k/n`.
    pub sc: f64,
    /// `dim S_π = ℓ/n`.
    pub spi: f64,
    /// `dim(S_C ∩ π) = log_q #(C∩π) / ℓ`.
    pub sc_cap_pi: Dimension,
    /// `dim(S_C ∩ S_π) = log_q #(C∩π) / n`.
    pub sc_cap_spi: Dimension,
    pub count: usize,
    pub ell: usize,
}

/// All four dimensions attached to `(C, π)`. Fails for `ℓ = 0`.
pub fn fractal_dimensions(code: &Code, pi: &CoordinateSubspace) -> Result<FractalDimensions> {
    let count = subspace_count(code, pi)?;
    let ell = pi.ell();
    if ell == 0 {
        return Err(Error::precondition("dim(S_C ∩ π) needs ℓ ≥ 1"));
    }
    let n = code.n();
    Ok(FractalDimensions {
        sc: code.k_real() / n as f64,
        spi: ell as f64 / n as f64,
        sc_cap_pi: count_dimension(count, code.q(), ell),
        sc_cap_spi: count_dimension(count, code.q(), n),
        count,
        ell,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub ell: usize,
    /// `max_{π ∈ Π_ℓ} #(C∩π)` over the scanned subspaces.
    pub max_count: usize,
    /// A subspace attaining the maximum.
    #[serde(skip)]
    pub witness: CoordinateSubspace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdScan {
    pub d: usize,
    /// One row per `ℓ = 0..=n`.
    pub rows: Vec<ThresholdRow>,
    /// False when coordinate subsets were sampled.
    pub exhaustive: bool,
}

impl ThresholdScan {
    /// Maxima are at most 1 below `d` and at least 2 from `d` on.
    pub fn threshold_holds(&self) -> bool {
        self.rows
            .iter()
            .all(|r| if r.ell < self.d { r.max_count <= 1 } else { r.max_count >= 2 })
    }
}

/// Largest group of codewords agreeing on `positions`, with its common
/// values. Ties go to the smallest value tuple.
fn largest_group(code: &Code, positions: &[usize]) -> (usize, Vec<u8>) {
    let mut groups: HashMap<Vec<u8>, usize> = HashMap::new();
    for w in code.words() {
        let key: Vec<u8> = positions.iter().map(|&i| w.digits()[i]).collect();
        *groups.entry(key).or_insert(0) += 1;
    }
    groups
        .into_iter()
        .max_by(|(ka, ca), (kb, cb)| ca.cmp(cb).then_with(|| kb.cmp(ka)))
        .map(|(k, c)| (c, k))
        .expect("nonempty code")
}

/// For each `ℓ`, the largest `#(C∩π)` over `π ∈ Π_ℓ`.
///
/// Codewords are grouped by their restriction to each set of `n − ℓ` fixed
/// coordinates. All subsets are visited for `n ≤ 16`; above that
/// [`SAMPLED_SUBSETS`] subsets per `ℓ` are drawn with `seed`.
pub fn threshold_scan(code: &Code, seed: u64) -> Result<ThresholdScan> {
    let d = code.min_distance()?;
    let n = code.n();
    let exhaustive = n <= EXHAUSTIVE_MAX_N;
    let subsets: Vec<Vec<usize>> = if exhaustive {
        (0u32..1 << n)
            .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..=n)
            .flat_map(|fixed| {
                (0..SAMPLED_SUBSETS)
                    .map(|_| {
                        let mut s = index::sample(&mut rng, n, fixed).into_vec();
                        s.sort_unstable();
                        s
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let results: Vec<(usize, Vec<u8>)> = subsets.par_iter().map(|s| largest_group(code, s)).collect();

    let mut rows: Vec<Option<ThresholdRow>> = vec![None; n + 1];
    for (positions, (count, values)) in subsets.iter().zip(results) {
        let ell = n - positions.len();
        let better = rows[ell].as_ref().is_none_or(|r| count > r.max_count);
        if better {
            let witness = CoordinateSubspace::new(n, positions.iter().copied().zip(values))?;
            rows[ell] = Some(ThresholdRow { ell, max_count: count, witness });
        }
    }
    Ok(ThresholdScan {
        d,
        rows: rows.into_iter().map(|r| r.expect("every ℓ scanned")).collect(),
        exhaustive,
    })
}

/// `log_q(count) / denominator` kept exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogQuotient {
    pub q: u32,
    pub count: BigUint,
    pub denominator: u64,
}

impl LogQuotient {
    pub fn to_f64(&self) -> f64 {
        log_q_big(&self.count, self.q) / self.denominator as f64
    }

    /// The value as a rational when `count` is a power of `q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        exact_log(&self.count, self.q).map(|e| BigRational::new(e.into(), self.denominator.into()))
    }

    /// Exact equality of two quotients over the same base.
    pub fn exactly_equals(&self, other: &LogQuotient) -> bool {
        self.q == other.q
            && compare_log_ratios(
                &self.count,
                self.denominator as u32,
                &other.count,
                other.denominator as u32,
            )
            .is_eq()
    }
}

/// The rate `log_q(#C)/n` as an exact quotient.
pub fn exact_rate(code: &Code) -> LogQuotient {
    LogQuotient { q: code.q(), count: code.size_big(), denominator: code.n() as u64 }
}

/// Box-counting dimension at depth `m`: `(#C)^m` boxes of side `q^{−m}`
/// cover `S_C`, giving `log_q((#C)^m)/(m n)`.
pub fn box_count_estimate(code: &Code, depth: u32) -> Result<LogQuotient> {
    if depth == 0 {
        return Err(Error::precondition("box counting needs depth ≥ 1"));
    }
    Ok(LogQuotient {
        q: code.q(),
        count: code.size_big().pow(depth),
        denominator: depth as u64 * code.n() as u64,
    })
}

/// The `s` with `Σ w_a^s = 1` for contraction ratios `w_a ∈ (0, 1)`.
pub fn similarity_dimension(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::precondition("no contraction ratios"));
    }
    if let Some(w) = weights.iter().find(|&&w| !(w > 0.0 && w < 1.0)) {
        return Err(Error::precondition(format!("contraction ratio {w} outside (0, 1)")));
    }
    let terms: Vec<Term> = weights.iter().map(|w| Term::single(-w.ln())).collect();
    keane_root(&terms)
}

/// Same for `multiplicity` copies of each ratio.
pub fn similarity_dimension_grouped(groups: &[(f64, f64)]) -> Result<f64> {
    if groups.is_empty() {
        return Err(Error::precondition("no contraction ratios"));
    }
    let mut terms = Vec::with_capacity(groups.len());
    for &(multiplicity, w) in groups {
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::precondition(format!("contraction ratio {w} outside (0, 1)")));
        }
        terms.push(Term { multiplicity, lambda: -w.ln() });
    }
    keane_root(&terms)
}
