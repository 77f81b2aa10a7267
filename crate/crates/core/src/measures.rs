//! Cylinder measures and semi-measures on sequences of codewords.
//!
//! Letters are codeword indices `0..N`. A [`CylinderAssignment`] stores the
//! mass of every word of length `0..=m`; level `j` has `N^j` entries indexed
//! by the word read as a base-`N` number, most significant letter first.
//! Values are generic over [`MassValue`] so the same constructions run in
//! `f64` and in exact rationals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::code::{distance_unchecked, exact_log, index_to_word, Code};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, fmt_rational};
use crate::numeric::{keane_root, ROOT_TOLERANCE, Term};

/// Absolute tolerance for float mass identities.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Largest number of cells materialized at the deepest level.
pub const MAX_CELLS: usize = 1 << 22;

pub const PF_MAX_ITERATIONS: usize = 10_000;

pub const PF_TOLERANCE: f64 = 1e-12;

/// Arithmetic needed by cylinder constructions.
pub trait MassValue: Clone + Send + Sync + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: u64, den: u64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn is_negative(&self) -> bool;
    /// Equality, exact or within [`MASS_TOLERANCE`].
    fn approx_eq(&self, other: &Self) -> bool;
    /// `self ≤ other`, exact or within [`MASS_TOLERANCE`].
    fn approx_le(&self, other: &Self) -> bool;
    fn to_f64(&self) -> f64;
    fn render(&self) -> String;
}

impl MassValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= MASS_TOLERANCE
    }
    fn approx_le(&self, other: &Self) -> bool {
        *self <= other + MASS_TOLERANCE
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn render(&self) -> String {
        fmt_f64(*self)
    }
}

impl MassValue for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(num.into(), den.into())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn approx_le(&self, other: &Self) -> bool {
        self <= other
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn render(&self) -> String {
        fmt_rational(self)
    }
}

/// Index of `word` among words of its length.
pub fn word_index(word: &[usize], letters: usize) -> usize {
    word.iter().fold(0, |acc, &a| acc * letters + a)
}

/// The word of length `len` with the given index.
pub fn index_word(mut index: usize, letters: usize, len: usize) -> Vec<usize> {
    let mut w = vec![0; len];
    for slot in w.iter_mut().rev() {
        *slot = index % letters;
        index /= letters;
    }
    w
}

fn level_size(letters: usize, depth: usize) -> Result<usize> {
    letters
        .checked_pow(depth as u32)
        .filter(|&c| c <= MAX_CELLS)
        .ok_or_else(|| Error::precondition(format!("{letters}^{depth} cylinders exceed the budget of {MAX_CELLS}")))
}

/// Masses of all cylinders up to a depth.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderAssignment<V> {
    letters: usize,
    levels: Vec<Vec<V>>,
}

impl<V: MassValue> CylinderAssignment<V> {
    /// `levels[j]` must have `letters^j` entries.
    pub fn new(letters: usize, levels: Vec<Vec<V>>) -> Result<Self> {
        if letters == 0 || levels.is_empty() {
            return Err(Error::InvalidInput("assignment needs letters and a root level".into()));
        }
        for (j, level) in levels.iter().enumerate() {
            if level.len() != level_size(letters, j)? {
                return Err(Error::InvalidInput(format!("level {j} has {} entries", level.len())));
            }
        }
        Ok(CylinderAssignment { letters, levels })
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, j: usize) -> &[V] {
        &self.levels[j]
    }

    pub fn levels(&self) -> &[Vec<V>] {
        &self.levels
    }

    pub fn value(&self, word: &[usize]) -> Option<&V> {
        if word.iter().any(|&a| a >= self.letters) {
            return None;
        }
        self.levels.get(word.len()).map(|l| &l[word_index(word, self.letters)])
    }

    /// `Σ_{|w|=j} μ(w)`.
    pub fn layer_mass(&self, j: usize) -> V {
        self.levels[j].iter().fold(V::zero(), |acc, v| acc.add(v))
    }

    pub fn to_f64(&self) -> CylinderAssignment<f64> {
        CylinderAssignment {
            letters: self.letters,
            levels: self.levels.iter().map(|l| l.iter().map(MassValue::to_f64).collect()).collect(),
        }
    }

    /// Every value scaled by `factor`.
    pub fn scaled(&self, factor: &V) -> Self {
        CylinderAssignment {
            letters: self.letters,
            levels: self.levels.iter().map(|l| l.iter().map(|v| v.mul(factor)).collect()).collect(),
        }
    }
}

/// Transition weights `W(a | prev)`: depth 1 ignores the previous letter.
pub trait Transition<V> {
    fn letters(&self) -> usize;
    fn depth(&self) -> usize;
    fn weight(&self, a: usize, prev: usize) -> V;
    /// `Σ_a W(a | b) = 1` for every `b`.
    fn is_keane(&self) -> bool;
}

/// Letter energies `λ` at inverse temperature `β`, `W = e^{−βλ}`.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Depth1(Vec<f64>),
    /// `λ[a][b]`: letter `a` following letter `b`.
    Depth2(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    beta: f64,
}

impl Potential {
    pub fn new(kind: PotentialKind, beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::precondition("β must be finite"));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match &kind {
            PotentialKind::Depth1(l) => {
                if l.is_empty() || !finite(l) {
                    return Err(Error::InvalidInput("depth-1 potential needs finite energies".into()));
                }
            }
            PotentialKind::Depth2(m) => {
                if m.is_empty() || m.iter().any(|row| row.len() != m.len() || !finite(row)) {
                    return Err(Error::InvalidInput("depth-2 potential needs a square finite matrix".into()));
                }
            }
        }
        Ok(Potential { kind, beta })
    }

    /// `β = 1` and `λ = −ln W` for given positive weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::precondition("weights must be positive"));
        }
        Potential::new(PotentialKind::Depth1(weights.iter().map(|w| -w.ln()).collect()), 1.0)
    }

    /// Same for a matrix `W[a][b]`.
    pub fn from_weight_matrix(weights: Vec<Vec<f64>>) -> Result<Self> {
        if weights.iter().flatten().any(|&w| !(w > 0.0)) {
            return Err(Error::precondition("weights must be positive"));
        }
        let lambda = weights.iter().map(|r| r.iter().map(|w| -w.ln()).collect()).collect();
        Potential::new(PotentialKind::Depth2(lambda), 1.0)
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `max_b |Σ_a W(a|b) − 1|`.
    pub fn keane_defect(&self) -> f64 {
        let n = Transition::<f64>::letters(self);
        (0..n)
            .map(|b| ((0..n).map(|a| Transition::<f64>::weight(self, a, b)).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `Σ_a W(a|b)` for each `b`; all equal for depth 1.
    pub fn column_sums(&self) -> Vec<f64> {
        let n = Transition::<f64>::letters(self);
        (0..n)
            .map(|b| (0..n).map(|a| Transition::<f64>::weight(self, a, b)).sum())
            .collect()
    }
}

impl Transition<f64> for Potential {
    fn letters(&self) -> usize {
        match &self.kind {
            PotentialKind::Depth1(l) => l.len(),
            PotentialKind::Depth2(m) => m.len(),
        }
    }

    fn depth(&self) -> usize {
        match &self.kind {
            PotentialKind::Depth1(_) => 1,
            PotentialKind::Depth2(_) => 2,
        }
    }

    fn weight(&self, a: usize, prev: usize) -> f64 {
        let lambda = match &self.kind {
            PotentialKind::Depth1(l) => l[a],
            PotentialKind::Depth2(m) => m[a][prev],
        };
        (-self.beta * lambda).exp()
    }

    fn is_keane(&self) -> bool {
        self.keane_defect() < MASS_TOLERANCE
    }
}

/// Rational transition weights.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactWeights {
    Depth1(Vec<BigRational>),
    /// `W[a][b]`: letter `a` following letter `b`.
    Depth2(Vec<Vec<BigRational>>),
}

impl ExactWeights {
    pub fn new(self) -> Result<Self> {
        let ok = match &self {
            ExactWeights::Depth1(w) => !w.is_empty() && w.iter().all(|x| x.is_positive()),
            ExactWeights::Depth2(m) => {
                !m.is_empty() && m.iter().all(|r| r.len() == m.len() && r.iter().all(|x| x.is_positive()))
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidInput("exact weights must be positive (and square at depth 2)".into()))
        }
    }

    /// `1/#C` for every codeword: the Hausdorff measure of `S_C`.
    pub fn uniform(code: &Code) -> Self {
        ExactWeights::Depth1(vec![BigRational::new(BigInt::one(), code.size().into()); code.size()])
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        match self {
            ExactWeights::Depth1(w) => vec![w.iter().map(MassValue::to_f64).collect()],
            ExactWeights::Depth2(m) => m.iter().map(|r| r.iter().map(MassValue::to_f64).collect()).collect(),
        }
    }
}

impl Transition<BigRational> for ExactWeights {
    fn letters(&self) -> usize {
        match self {
            ExactWeights::Depth1(w) => w.len(),
            ExactWeights::Depth2(m) => m.len(),
        }
    }

    fn depth(&self) -> usize {
        match self {
            ExactWeights::Depth1(_) => 1,
            ExactWeights::Depth2(_) => 2,
        }
    }

    fn weight(&self, a: usize, prev: usize) -> BigRational {
        match self {
            ExactWeights::Depth1(w) => w[a].clone(),
            ExactWeights::Depth2(m) => m[a][prev].clone(),
        }
    }

    fn is_keane(&self) -> bool {
        let n = self.letters();
        (0..n).all(|b| (0..n).map(|a| self.weight(a, b)).sum::<BigRational>().is_one())
    }
}

/// An eventually periodic infinite word `prefix · period^∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    prefix: Vec<usize>,
    period: Vec<usize>,
}

impl Seed {
    pub fn new(prefix: Vec<usize>, period: Vec<usize>, letters: usize) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidInput("seed period must be nonempty".into()));
        }
        if let Some(&a) = prefix.iter().chain(&period).find(|&&a| a >= letters) {
            return Err(Error::InvalidInput(format!("seed letter {a} ≥ {letters}")));
        }
        Ok(Seed { prefix, period })
    }

    /// `aaa…`.
    pub fn constant(letter: usize) -> Self {
        Seed { prefix: Vec::new(), period: vec![letter] }
    }

    pub fn letter(&self, i: usize) -> usize {
        match self.prefix.get(i) {
            Some(&a) => a,
            None => self.period[(i - self.prefix.len()) % self.period.len()],
        }
    }

    pub fn first(&self) -> usize {
        self.letter(0)
    }
}

/// `μ(w_1…w_j) = Π_i W(w_i | w_{i−1})` with `w_0` the first seed letter and
/// root mass 1. No normalization is checked.
pub fn cylinder_products<V, T>(t: &T, x0: &Seed, depth: usize) -> Result<CylinderAssignment<V>>
where
    V: MassValue,
    T: Transition<V> + Sync,
{
    let n = t.letters();
    if x0.first() >= n {
        return Err(Error::InvalidInput("seed letter outside the alphabet".into()));
    }
    level_size(n, depth)?;
    let mut levels: Vec<Vec<V>> = vec![vec![V::one()]];
    for j in 0..depth {
        let prev_level = &levels[j];
        let next: Vec<V> = (0..prev_level.len() * n)
            .into_par_iter()
            .map(|idx| {
                let parent = idx / n;
                let a = idx % n;
                let prev = if j == 0 { x0.first() } else { parent % n };
                prev_level[parent].mul(&t.weight(a, prev))
            })
            .collect();
        levels.push(next);
    }
    CylinderAssignment::new(n, levels)
}

/// The measure of a Keane potential seeded at `x0`.
pub fn measure_from_potential<V, T>(t: &T, x0: &Seed, depth: usize) -> Result<CylinderAssignment<V>>
where
    V: MassValue,
    T: Transition<V> + Sync,
{
    if !t.is_keane() {
        return Err(Error::precondition("potential does not satisfy the Keane condition"));
    }
    cylinder_products(t, x0, depth)
}

/// Exact Hausdorff measure values `(#C)^{−|w|}`.
pub fn hausdorff_assignment(code: &Code, depth: usize) -> Result<CylinderAssignment<BigRational>> {
    measure_from_potential(&ExactWeights::uniform(code), &Seed::constant(0), depth)
}

/// `q^{−k} = 1/#C`.
pub fn radon_nikodym_constant(code: &Code) -> f64 {
    1.0 / code.size() as f64
}

pub fn radon_nikodym_exact(code: &Code) -> BigRational {
    BigRational::new(BigInt::one(), code.size().into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureClass {
    Measure,
    Semimeasure,
    Neither,
}

impl fmt::Display for MeasureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureClass::Measure => "measure",
            MeasureClass::Semimeasure => "semimeasure",
            MeasureClass::Neither => "neither",
        })
    }
}

/// Checks `μ(w) ≥ Σ_a μ(wa)` at every available depth and `μ(∅) ≤ 1`;
/// equality throughout with root mass 1 makes a measure.
pub fn check_semimeasure<V: MassValue>(mu: &CylinderAssignment<V>) -> MeasureClass {
    let n = mu.letters;
    if mu.levels.iter().flatten().any(MassValue::is_negative) {
        return MeasureClass::Neither;
    }
    let root = &mu.levels[0][0];
    if !root.approx_le(&V::one()) {
        return MeasureClass::Neither;
    }
    let mut exact = root.approx_eq(&V::one());
    for j in 0..mu.depth() {
        for (idx, parent) in mu.levels[j].iter().enumerate() {
            let children = mu.levels[j + 1][idx * n..(idx + 1) * n]
                .iter()
                .fold(V::zero(), |acc, v| acc.add(v));
            if !children.approx_le(parent) {
                return MeasureClass::Neither;
            }
            exact &= children.approx_eq(parent);
        }
    }
    if exact {
        MeasureClass::Measure
    } else {
        MeasureClass::Semimeasure
    }
}

/// A monotone map given by a block table: each source block of length `b`
/// over `A_q` maps to one target letter, or to nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneMap {
    source_q: u32,
    block: usize,
    targets: usize,
    table: Vec<Option<usize>>,
}

impl MonotoneMap {
    /// `table[i]` is the image of the block with base-`q` index `i`.
    pub fn new(source_q: u32, block: usize, targets: usize, table: Vec<Option<usize>>) -> Result<Self> {
        let expected = (source_q as usize).checked_pow(block as u32);
        if source_q < 2 || block == 0 || expected != Some(table.len()) {
            return Err(Error::InvalidInput("block table must have q^b entries".into()));
        }
        if table.iter().flatten().any(|&t| t >= targets) {
            return Err(Error::InvalidInput("block table maps outside the target letters".into()));
        }
        Ok(MonotoneMap { source_q, block, targets, table })
    }

    /// An encoder `A^k → C` for `#C = q^k`: block `i` maps to codeword `i`.
    pub fn encoder(code: &Code) -> Result<Self> {
        let k = exact_log(&code.size_big(), code.q())
            .ok_or_else(|| Error::precondition("encoder needs #C to be a power of q"))?;
        if k == 0 {
            return Err(Error::precondition("encoder needs k ≥ 1"));
        }
        MonotoneMap::new(code.q(), k as usize, code.size(), (0..code.size()).map(Some).collect())
    }

    /// Nearest-codeword decoder `A^n → C`; ties go to the lexicographically
    /// smallest codeword.
    pub fn nearest_decoder(code: &Code) -> Result<Self> {
        let total = (code.q() as usize)
            .checked_pow(code.n() as u32)
            .filter(|&t| t <= MAX_CELLS)
            .ok_or_else(|| Error::precondition("decoder table q^n exceeds the budget"))?;
        let mut order: Vec<usize> = (0..code.size()).collect();
        order.sort_by(|&a, &b| code.words()[a].cmp(&code.words()[b]));
        let table = (0..total)
            .into_par_iter()
            .map(|i| {
                let x = index_to_word(i as u128, code.q(), code.n());
                let mut best = (usize::MAX, 0);
                for &c in &order {
                    let d = distance_unchecked(x.digits(), code.words()[c].digits());
                    if d < best.0 {
                        best = (d, c);
                    }
                }
                Some(best.1)
            })
            .collect();
        MonotoneMap::new(code.q(), code.n(), code.size(), table)
    }

    pub fn targets(&self) -> usize {
        self.targets
    }

    pub fn block(&self) -> usize {
        self.block
    }

    /// Preimage sizes per target letter.
    pub fn preimage_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.targets];
        for t in self.table.iter().flatten() {
            counts[*t] += 1;
        }
        counts
    }

    /// Image of a source word whose length is a multiple of the block.
    pub fn apply(&self, source: &[u8]) -> Option<Vec<usize>> {
        if !source.len().is_multiple_of(self.block) {
            return None;
        }
        source
            .chunks(self.block)
            .map(|chunk| {
                let i = chunk.iter().fold(0usize, |acc, &d| acc * self.source_q as usize + d as usize);
                self.table[i]
            })
            .collect()
    }
}

/// `μ_f(u_1…u_j) = Π_i #f^{−1}(u_i) · q^{−b j}`.
pub fn pushforward_semimeasure<V: MassValue>(f: &MonotoneMap, depth: usize) -> Result<CylinderAssignment<V>> {
    let blocks = (f.source_q as u64).pow(f.block as u32);
    let letter_mass: Vec<V> = f.preimage_counts().iter().map(|&c| V::from_ratio(c, blocks)).collect();
    let weights = LetterMasses(letter_mass);
    cylinder_products(&weights, &Seed::constant(0), depth)
}

struct LetterMasses<V>(Vec<V>);

impl<V: MassValue> Transition<V> for LetterMasses<V> {
    fn letters(&self) -> usize {
        self.0.len()
    }
    fn depth(&self) -> usize {
        1
    }
    fn weight(&self, a: usize, _prev: usize) -> V {
        self.0[a].clone()
    }
    fn is_keane(&self) -> bool {
        self.0.iter().fold(V::zero(), |acc, v| acc.add(v)).approx_eq(&V::one())
    }
}

/// `Σ_i α_i μ_i` with `α_i > 0`, `Σ α_i ≤ 1`.
pub fn mixture_semimeasure<V: MassValue>(
    components: &[&CylinderAssignment<V>],
    alphas: &[V],
) -> Result<CylinderAssignment<V>> {
    let first = components.first().ok_or_else(|| Error::precondition("empty mixture"))?;
    if components.len() != alphas.len() {
        return Err(Error::InvalidInput("one coefficient per component".into()));
    }
    if components.iter().any(|c| c.letters != first.letters || c.depth() != first.depth()) {
        return Err(Error::precondition("mixture components differ in letters or depth"));
    }
    if alphas.iter().any(|a| a.is_negative() || a.approx_eq(&V::zero())) {
        return Err(Error::precondition("mixture coefficients must be positive"));
    }
    let total = alphas.iter().fold(V::zero(), |acc, a| acc.add(a));
    if !total.approx_le(&V::one()) {
        return Err(Error::precondition("mixture coefficients sum above 1"));
    }
    let levels = (0..=first.depth())
        .map(|j| {
            (0..first.levels[j].len())
                .map(|i| {
                    components
                        .iter()
                        .zip(alphas)
                        .fold(V::zero(), |acc, (c, a)| acc.add(&a.mul(&c.levels[j][i])))
                })
                .collect()
        })
        .collect();
    CylinderAssignment::new(first.letters, levels)
}

/// The `β_c` with `Σ_a μ(a)^{β_c} = 1` for letter masses in `(0, 1)` with
/// total at most 1.
pub fn critical_beta_semimeasure(mu_letters: &[f64]) -> Result<f64> {
    if mu_letters.is_empty() {
        return Err(Error::precondition("no letters"));
    }
    if let Some(m) = mu_letters.iter().find(|&&m| !(m > 0.0 && m < 1.0)) {
        return Err(Error::precondition(format!("letter mass {m} outside (0, 1)")));
    }
    if mu_letters.iter().sum::<f64>() > 1.0 + ROOT_TOLERANCE {
        return Err(Error::precondition("letter masses sum above 1"));
    }
    let terms: Vec<Term> = mu_letters.iter().map(|m| Term::single(-m.ln())).collect();
    keane_root(&terms)
}

/// The depth-1 potential `W(a) = μ(a)^β`.
pub fn renormalized_potential(mu_letters: &[f64], beta: f64) -> Result<Potential> {
    Potential::new(PotentialKind::Depth1(mu_letters.iter().map(|m| -m.ln()).collect()), beta)
}

/// A function of the first `depth` letters, stored like one assignment level.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderFunction<V> {
    letters: usize,
    depth: usize,
    values: Vec<V>,
}

impl<V: MassValue> CylinderFunction<V> {
    pub fn new(letters: usize, depth: usize, values: Vec<V>) -> Result<Self> {
        if letters == 0 || values.len() != level_size(letters, depth)? {
            return Err(Error::InvalidInput("cylinder function needs letters^depth values".into()));
        }
        Ok(CylinderFunction { letters, depth, values })
    }

    pub fn constant(letters: usize, depth: usize, value: V) -> Result<Self> {
        CylinderFunction::new(letters, depth, vec![value; level_size(letters, depth)?])
    }

    /// Indicator of the cylinder of `word`.
    pub fn indicator(letters: usize, word: &[usize]) -> Result<Self> {
        let mut values = vec![V::zero(); level_size(letters, word.len())?];
        values[word_index(word, letters)] = V::one();
        CylinderFunction::new(letters, word.len(), values)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn value(&self, word: &[usize]) -> &V {
        &self.values[word_index(&word[..self.depth], self.letters)]
    }
}

/// `(Rf)(x) = Σ_a W(a | x_1) f(a x)`, a function of the first
/// `max(m − 1, depth(W) − 1)` letters.
pub fn ruelle_apply<V, T>(t: &T, f: &CylinderFunction<V>) -> Result<CylinderFunction<V>>
where
    V: MassValue,
    T: Transition<V> + Sync,
{
    let n = t.letters();
    if f.letters != n {
        return Err(Error::InvalidInput("function and potential use different letters".into()));
    }
    if f.depth == 0 {
        return Err(Error::precondition("transfer operator needs a function of depth ≥ 1"));
    }
    let tail = f.depth - 1;
    let out_depth = tail.max(t.depth() - 1);
    let size = level_size(n, out_depth)?;
    let stride = n.pow(tail as u32);
    let shift = n.pow((out_depth - tail) as u32);
    let values = (0..size)
        .into_par_iter()
        .map(|x| {
            let first = if out_depth > 0 { x / n.pow(out_depth as u32 - 1) } else { 0 };
            let rest = x / shift;
            (0..n).fold(V::zero(), |acc, a| acc.add(&t.weight(a, first).mul(&f.values[a * stride + rest])))
        })
        .collect();
    CylinderFunction::new(n, out_depth, values)
}

/// `μ(w) = Π_j e^{−βλ_{w_j}} / Z^{|w|}` with `Z = Σ_a e^{−βλ_a}`.
pub fn induced_multifractal_uniform(lambda: &[f64], beta: f64, depth: usize) -> Result<CylinderAssignment<f64>> {
    let pot = Potential::new(PotentialKind::Depth1(lambda.to_vec()), beta)?;
    let z: f64 = lambda.iter().map(|l| (-beta * l).exp()).sum();
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::precondition("normalizing sum must be positive and finite"));
    }
    let raw = cylinder_products::<f64, _>(&pot, &Seed::constant(0), depth)?;
    let levels = raw
        .levels
        .into_iter()
        .enumerate()
        .map(|(j, l)| {
            let zj = z.powi(j as i32);
            l.into_iter().map(|v| v / zj).collect()
        })
        .collect();
    CylinderAssignment::new(lambda.len(), levels)
}

/// Positive left eigenvector of a positive matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronFrobenius {
    pub rho: f64,
    /// Normalized to maximum 1.
    pub eigenvector: Vec<f64>,
    /// `max_b |Σ_a W[a][b] f_a − ρ f_b|`.
    pub residual: f64,
    pub iterations: usize,
}

fn check_positive_matrix(w: &[Vec<f64>]) -> Result<()> {
    if w.is_empty() || w.iter().any(|r| r.len() != w.len()) {
        return Err(Error::InvalidInput("weight matrix must be square and nonempty".into()));
    }
    if w.iter().flatten().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::precondition("weight matrix entries must be positive"));
    }
    Ok(())
}

/// Power iteration for `Σ_a W[a][b] f_a = ρ f_b` from the uniform vector.
pub fn perron_frobenius(w: &[Vec<f64>]) -> Result<PerronFrobenius> {
    check_positive_matrix(w)?;
    let n = w.len();
    let mut f = vec![1.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 1..=PF_MAX_ITERATIONS {
        let h: Vec<f64> = (0..n).map(|b| (0..n).map(|a| w[a][b] * f[a]).sum()).collect();
        let rho = h.iter().copied().fold(0.0, f64::max);
        residual = h.iter().zip(&f).map(|(x, y)| (x - rho * y).abs()).fold(0.0, f64::max);
        if residual < PF_TOLERANCE {
            assert!(f.iter().all(|&x| x > 0.0), "eigenvector of a positive matrix is positive");
            return Ok(PerronFrobenius { rho, eigenvector: f, residual, iterations: iteration });
        }
        f = h.iter().map(|x| x / rho).collect();
    }
    Err(Error::NonConvergence { iterations: PF_MAX_ITERATIONS, residual })
}

/// `μ(w) = Π_j W[w_j][w_{j−1}] · f_{w_m} / (ρ^m f_{x_0})`.
pub fn induced_multifractal_pf(
    w: &[Vec<f64>],
    x0: usize,
    depth: usize,
) -> Result<(PerronFrobenius, CylinderAssignment<f64>)> {
    let pf = perron_frobenius(w)?;
    let n = w.len();
    if x0 >= n {
        return Err(Error::InvalidInput("seed letter outside the alphabet".into()));
    }
    level_size(n, depth)?;
    let f = &pf.eigenvector;
    let levels = (0..=depth)
        .map(|m| {
            (0..n.pow(m as u32))
                .into_par_iter()
                .map(|idx| {
                    if m == 0 {
                        return 1.0;
                    }
                    let word = index_word(idx, n, m);
                    let mut product = 1.0;
                    let mut prev = x0;
                    for &a in &word {
                        product *= w[a][prev];
                        prev = a;
                    }
                    product * f[prev] / (pf.rho.powi(m as i32) * f[x0])
                })
                .collect()
        })
        .collect();
    Ok((pf.clone(), CylinderAssignment::new(n, levels)?))
}

/// The depth-2 Keane potential `W[a][b] f_a / (ρ f_b)`.
pub fn normalized_pf_potential(w: &[Vec<f64>], pf: &PerronFrobenius) -> Result<Potential> {
    let f = &pf.eigenvector;
    let n = w.len();
    let m = (0..n)
        .map(|a| (0..n).map(|b| w[a][b] * f[a] / (pf.rho * f[b])).collect())
        .collect();
    Potential::from_weight_matrix(m)
}
