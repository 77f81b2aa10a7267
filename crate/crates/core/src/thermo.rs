//! Partition functions, KMS values and critical temperatures for the
//! statistical mechanics of a code, of products of codes and of code
//! families.
//!
//! With uniform energies `λ_a = n ln q` the partition function of a code is
//! the geometric series `Σ_m q^{(R−β)nm}`, finite exactly for `β > R`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::{compare_log_ratios, log_q_big, Code, Word};
use crate::error::{Error, Result};
use crate::fractal::{subspace_count, CoordinateSubspace, Dimension};
use crate::numeric::{keane_root, Term};

/// Energies `λ_a > 0` of the letters of a code.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    lambda: Vec<f64>,
}

impl Weights {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::precondition("no weights"));
        }
        if let Some(l) = lambda.iter().find(|&&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::precondition(format!("energy {l} must be positive")));
        }
        Ok(Weights { lambda })
    }

    /// `λ_a = n ln q` for every codeword.
    pub fn uniform(code: &Code) -> Self {
        Weights { lambda: vec![code.n() as f64 * (code.q() as f64).ln(); code.size()] }
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// `Σ_a e^{−βλ_a}`.
    pub fn sum(&self, beta: f64) -> f64 {
        self.lambda.iter().map(|l| (-beta * l).exp()).sum()
    }
}

/// The `β` with `Σ_a e^{−βλ_a} = 1`; 0 for a single weight.
pub fn critical_beta(w: &Weights) -> Result<f64> {
    let terms: Vec<Term> = w.lambda.iter().map(|&l| Term::single(l)).collect();
    keane_root(&terms)
}

/// A value that may be the symbol "divergent".
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZValue {
    Finite(f64),
    Divergent,
}

impl ZValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            ZValue::Finite(v) => Some(*v),
            ZValue::Divergent => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, ZValue::Divergent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    Closed,
    /// Terms `m = 0..=M`.
    Series(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionValue {
    pub beta: f64,
    pub value: ZValue,
    pub terms_used: usize,
    pub closed_form_used: bool,
    /// Bound on the omitted tail of a truncated series.
    pub tail_bound: Option<f64>,
}

/// `(R − β) n ln q`, the log of the series ratio. Negative iff `β > R`.
fn log_ratio(code: &Code, beta: f64) -> f64 {
    (code.rate_f64() - beta) * code.n() as f64 * (code.q() as f64).ln()
}

/// `Z_C(β) = Σ_m q^{(R−β)nm}`, divergent for `β ≤ R`.
pub fn partition_function(code: &Code, beta: f64, mode: SumMode) -> Result<PartitionValue> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::precondition(format!("β = {beta} must be positive")));
    }
    let divergent = beta <= code.rate_f64();
    let e = log_ratio(code, beta);
    Ok(match mode {
        SumMode::Closed => PartitionValue {
            beta,
            value: if divergent { ZValue::Divergent } else { ZValue::Finite(-1.0 / e.exp_m1()) },
            terms_used: 0,
            closed_form_used: true,
            tail_bound: None,
        },
        SumMode::Series(m) => {
            if divergent {
                PartitionValue { beta, value: ZValue::Divergent, terms_used: m + 1, closed_form_used: false, tail_bound: None }
            } else {
                let x = e.exp();
                let mut sum = 0.0;
                let mut term = 1.0;
                for _ in 0..=m {
                    sum += term;
                    term *= x;
                }
                PartitionValue {
                    beta,
                    value: ZValue::Finite(sum),
                    terms_used: m + 1,
                    closed_form_used: false,
                    tail_bound: Some(((m + 1) as f64 * e).exp() / -e.exp_m1()),
                }
            }
        }
    })
}

/// `φ_β(S_w S_{w′}^*)`: `q^{−βnm}` when `w = w′` has `m` letters, else 0.
pub fn kms_state_value(code: &Code, beta: f64, w: &[Word], w_prime: &[Word]) -> Result<f64> {
    for letter in w.iter().chain(w_prime) {
        if !code.contains(letter.digits()) {
            return Err(Error::InvalidInput(format!("{letter} is not a codeword")));
        }
    }
    if w != w_prime {
        return Ok(0.0);
    }
    let m = w.len() as f64;
    Ok((code.q() as f64).powf(-beta * code.n() as f64 * m))
}

/// `Σ_a φ_β(T_a T_a^*)`, equal to 1 only at `β = R`.
pub fn keane_sum(code: &Code, beta: f64) -> Result<f64> {
    code.words()
        .iter()
        .map(|a| kms_state_value(code, beta, std::slice::from_ref(a), std::slice::from_ref(a)))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionState {
    pub count: usize,
    /// `q^{−k}·#(C∩π) = #(C∩π)/#C`, exact.
    #[serde(skip)]
    pub vn_dim_exact: BigRational,
    pub vn_dim: f64,
    /// `φ(P_π)`, equal to the von Neumann dimension.
    pub phi_value: f64,
    /// `(k + log_q Dim)/ℓ`; absent for `ℓ = 0`.
    pub dim_check_pi: Option<Dimension>,
    /// `(k + log_q Dim)/n`.
    pub dim_check_spi: Dimension,
}

/// State value and von Neumann dimension of the projection onto `π`, and
/// the dimensions they predict.
pub fn projection_state_and_vn_dim(code: &Code, pi: &CoordinateSubspace) -> Result<ProjectionState> {
    let count = subspace_count(code, pi)?;
    let vn_dim_exact = BigRational::new(count.into(), code.size().into());
    let vn_dim = count as f64 / code.size() as f64;
    let q = code.q();
    let k = code.k_real();
    let log_dim = if count == 0 {
        None
    } else {
        // log_q(count/#C) from the two logs separately
        Some(log_q_big(&BigUint::from(count), q) - log_q_big(&code.size_big(), q))
    };
    let check = |denominator: usize| match log_dim {
        None => Dimension::Empty,
        Some(l) => Dimension::Value((k + l) / denominator as f64),
    };
    let ell = pi.ell();
    Ok(ProjectionState {
        count,
        vn_dim_exact,
        vn_dim,
        phi_value: vn_dim,
        dim_check_pi: (ell > 0).then(|| check(ell)),
        dim_check_spi: check(code.n()),
    })
}

/// `Π_j Z_{C_j}(β_j)` from closed forms; divergent if any factor is.
pub fn product_partition(systems: &[(&Code, f64)]) -> Result<ZValue> {
    if systems.is_empty() {
        return Err(Error::precondition("empty product"));
    }
    let mut product = 1.0;
    let mut divergent = false;
    for &(code, beta) in systems {
        match partition_function(code, beta, SumMode::Closed)?.value {
            ZValue::Finite(v) => product *= v,
            ZValue::Divergent => divergent = true,
        }
    }
    Ok(if divergent { ZValue::Divergent } else { ZValue::Finite(product) })
}

/// One cell of a product-system scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub betas: Vec<f64>,
    pub value: ZValue,
}

/// [`product_partition`] on the Cartesian grid of per-system `β` axes,
/// in row-major order (last system varies fastest).
pub fn product_partition_grid(codes: &[&Code], axes: &[Vec<f64>]) -> Result<Vec<GridCell>> {
    if codes.len() != axes.len() || codes.is_empty() {
        return Err(Error::InvalidInput("one β axis per system is required".into()));
    }
    let total: usize = axes.iter().map(Vec::len).product();
    (0..total)
        .into_par_iter()
        .map(|mut index| {
            let mut betas = vec![0.0; axes.len()];
            for (slot, axis) in betas.iter_mut().zip(axes).rev() {
                *slot = axis[index % axis.len()];
                index /= axis.len();
            }
            let systems: Vec<(&Code, f64)> = codes.iter().copied().zip(betas.iter().copied()).collect();
            Ok(GridCell { value: product_partition(&systems)?, betas })
        })
        .collect()
}

/// Parameters of one family member. The code itself is kept when known.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub q: u32,
    pub n: usize,
    pub size: BigUint,
    pub d: Option<usize>,
    pub code: Option<Code>,
}

impl FamilyMember {
    pub fn from_code(code: Code) -> Self {
        FamilyMember { q: code.q(), n: code.n(), size: code.size_big(), d: code.distance(), code: Some(code) }
    }

    pub fn from_parameters(q: u32, n: usize, size: BigUint, d: Option<usize>) -> Result<Self> {
        if q < 2 || n == 0 || size.is_zero() {
            return Err(Error::InvalidInput("family member needs q ≥ 2, n ≥ 1, #C ≥ 1".into()));
        }
        if size > BigUint::from(q).pow(n as u32) {
            return Err(Error::InvalidInput(format!("#C = {size} exceeds q^n")));
        }
        if d.is_some_and(|d| d == 0 || d > n) {
            return Err(Error::InvalidInput("distance outside 1..=n".into()));
        }
        Ok(FamilyMember { q, n, size, d, code: None })
    }

    pub fn k_real(&self) -> f64 {
        log_q_big(&self.size, self.q)
    }
}

/// An ordered list of codes over one alphabet.
#[derive(Debug, Clone)]
pub struct CodeFamily {
    members: Vec<FamilyMember>,
    monotone: bool,
}

impl CodeFamily {
    pub fn new(members: Vec<FamilyMember>) -> Result<Self> {
        let q = members.first().ok_or_else(|| Error::precondition("empty family"))?.q;
        if members.iter().any(|m| m.q != q) {
            return Err(Error::InvalidInput("family members over different alphabets".into()));
        }
        let monotone = members.windows(2).all(|p| {
            let (a, b) = (&p[0], &p[1]);
            let rate_up = compare_log_ratios(&a.size, a.n as u32, &b.size, b.n as u32).is_le();
            let delta_up = match (a.d, b.d) {
                (Some(da), Some(db)) => da * b.n <= db * a.n,
                _ => false,
            };
            rate_up && delta_up
        });
        Ok(CodeFamily { members, monotone })
    }

    /// `k_r = r`, `n_r = ratio·r` for `r = 1..=count`, with `d_r = r` as a
    /// placeholder distance.
    pub fn synthetic(q: u32, ratio: usize, count: usize) -> Result<Self> {
        let members = (1..=count)
            .map(|r| FamilyMember::from_parameters(q, ratio * r, BigUint::from(q).pow(r as u32), Some(r)))
            .collect::<Result<Vec<_>>>()?;
        CodeFamily::new(members)
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn q(&self) -> u32 {
        self.members[0].q
    }

    /// Both `k_r/n_r` and `d_r/n_r` are nondecreasing (exact check).
    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// `sup_r k_r/n_r` as a float; the maximizing member is found exactly.
    pub fn sup_rate(&self) -> f64 {
        let best = self
            .members
            .iter()
            .reduce(|a, b| {
                if compare_log_ratios(&a.size, a.n as u32, &b.size, b.n as u32).is_lt() {
                    b
                } else {
                    a
                }
            })
            .expect("nonempty");
        best.k_real() / best.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "class")]
pub enum ZetaClass {
    /// `β > sup k_r/n_r` with strictly increasing lengths; the bound covers
    /// the geometric continuation of the family past the truncation.
    Convergent { tail_bound: f64 },
    /// The terms grow.
    Divergent,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyZeta {
    pub beta: f64,
    pub partial_sum: f64,
    pub terms_used: usize,
    pub class: ZetaClass,
}

/// Partial sum of `Σ_r q^{k_r − β n_r}` over the first `terms` members.
pub fn family_zeta(family: &CodeFamily, beta: f64, terms: usize) -> Result<FamilyZeta> {
    if terms == 0 {
        return Err(Error::precondition("at least one term is needed"));
    }
    let used = &family.members[..terms.min(family.members.len())];
    let ln_q = (family.q() as f64).ln();
    let log_terms: Vec<f64> = used.iter().map(|m| (m.k_real() - beta * m.n as f64) * ln_q).collect();
    let partial_sum = log_terms.iter().map(|l| l.exp()).sum();

    let sup = family.sup_rate();
    let gaps: Vec<usize> = used.windows(2).map(|p| p[1].n.saturating_sub(p[0].n)).collect();
    let increasing = gaps.iter().all(|&g| g > 0);
    let growing = log_terms.len() >= 2 && log_terms.windows(2).all(|p| p[1] > p[0]);
    let class = if beta > sup && increasing {
        let min_gap = gaps.iter().copied().min().unwrap_or(1).max(1) as f64;
        let log_y = (sup - beta) * ln_q;
        let next_n = used.last().expect("nonempty").n as f64 + min_gap;
        ZetaClass::Convergent { tail_bound: (log_y * next_n).exp() / -(log_y * min_gap).exp_m1() }
    } else if growing {
        ZetaClass::Divergent
    } else {
        ZetaClass::Unclassified
    };
    Ok(FamilyZeta { beta, partial_sum, terms_used: used.len(), class })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanguageReport {
    /// `(N, s(N))` for `N = 0..=cap`: `q^{km}` at `N = nm`, else 0.
    #[serde(skip)]
    pub structure: Vec<(usize, BigUint)>,
    pub g_value: ZValue,
    pub entropy: f64,
    pub radius: f64,
}

/// Structure function and generating function `G(t) = (1 − #C t^n)^{−1}`
/// of the language of concatenated codewords.
pub fn language_generating(code: &Code, t: f64, cap: usize) -> Result<LanguageReport> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::precondition(format!("t = {t} must be a nonnegative real")));
    }
    let n = code.n();
    let size = code.size_big();
    let structure = (0..=cap)
        .map(|big_n| {
            let s = if big_n % n == 0 { size.pow((big_n / n) as u32) } else { BigUint::zero() };
            (big_n, s)
        })
        .collect();
    let radius = (code.size() as f64).powf(-1.0 / n as f64);
    let x = code.size() as f64 * t.powi(n as i32);
    let g_value = if x < 1.0 { ZValue::Finite(1.0 / (1.0 - x)) } else { ZValue::Divergent };
    Ok(LanguageReport {
        structure,
        g_value,
        entropy: -radius.ln() / (code.q() as f64).ln(),
        radius,
    })
}

/// [`language_generating`] at `t = q^{−β}`.
pub fn language_generating_at_beta(code: &Code, beta: f64, cap: usize) -> Result<LanguageReport> {
    language_generating(code, (code.q() as f64).powf(-beta), cap)
}

/// Grouped letter energies of a family: each letter gets `λ_a = n_r ln q`
/// for the first member containing it.
pub fn family_letter_terms(family: &CodeFamily, terms: usize) -> Vec<Term> {
    let used = &family.members[..terms.min(family.members.len())];
    let ln_q = (family.q() as f64).ln();
    let mut out = Vec::with_capacity(used.len());
    for (r, m) in used.iter().enumerate() {
        let fresh = match &m.code {
            Some(code) => {
                let earlier: Vec<&Code> = used[..r]
                    .iter()
                    .filter(|e| e.n == m.n)
                    .filter_map(|e| e.code.as_ref())
                    .collect();
                code.words()
                    .iter()
                    .filter(|w| !earlier.iter().any(|e| e.contains(w.digits())))
                    .count() as f64
            }
            None => crate::code::big_to_f64(&m.size),
        };
        if fresh > 0.0 {
            out.push(Term { multiplicity: fresh, lambda: m.n as f64 * ln_q });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaValue {
    pub beta: f64,
    pub lambda: f64,
    /// `(1 − Λ)^{−1}`.
    pub z: ZValue,
}

/// `Λ(β) = Σ_a e^{−βλ_a}` and `Z = (1 − Λ)^{−1}`.
pub fn lambda_series(terms: &[Term], beta: f64) -> LambdaValue {
    let lambda = crate::numeric::weighted_sum(terms, beta);
    let z = if lambda < 1.0 { ZValue::Finite(1.0 / (1.0 - lambda)) } else { ZValue::Divergent };
    LambdaValue { beta, lambda, z }
}

/// Critical `β` of the truncated family, where `Λ = 1`.
pub fn family_critical_beta(family: &CodeFamily, terms: usize) -> Result<f64> {
    keane_root(&family_letter_terms(family, terms))
}
