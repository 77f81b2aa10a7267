//! Exact geometry of code points in the `(R, δ)` square.
//!
//! Points are exact rationals. For `P = (R_P, δ_P)` inside the triangle
//! `Δ = {R + δ < 1}` two lines pass through `P`: `L_A` towards the corner
//! `(R = 1, δ = 0)` and `L_B` towards `(R = 0, δ = 1)`. They split the square
//! into four cones; the lower cone lies on or below both lines. All side
//! tests are sign tests of rational cross products, so boundary cases are
//! decided exactly.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::code::{big_pow, floor_log, Code};
use crate::error::{Error, Result};
use crate::spoiling::{numeric_spoil, SpoilKind};

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn from_ratio(r: Ratio<i64>) -> BigRational {
    rational(*r.numer(), *r.denom())
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A point `(R, δ)` of the unit square with provenance.
///
/// Ordering, equality and hashing only look at the coordinates.
#[derive(Clone, Debug)]
pub struct CodePoint {
    pub rate: BigRational,
    pub delta: BigRational,
    /// Code parameters when the point came from a code.
    pub source: Option<PointSource>,
    pub tag: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSource {
    pub q: u32,
    pub n: usize,
    pub size: BigUint,
    pub d: usize,
}

impl PartialEq for CodePoint {
    fn eq(&self, other: &Self) -> bool {
        self.rate == other.rate && self.delta == other.delta
    }
}

impl Eq for CodePoint {}

impl PartialOrd for CodePoint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CodePoint {
    /// δ ascending, then R ascending.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.delta, &self.rate).cmp(&(&other.delta, &other.rate))
    }
}

impl fmt::Display for CodePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(R={}, δ={})", self.rate, self.delta)
    }
}

impl CodePoint {
    pub fn new(rate: BigRational, delta: BigRational) -> Result<Self> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        if rate < zero || rate > one || delta < zero || delta > one {
            return Err(Error::InvalidInput(format!(
                "point (R={rate}, δ={delta}) outside the unit square"
            )));
        }
        Ok(CodePoint { rate, delta, source: None, tag: String::new() })
    }

    pub fn from_ratios(rate: (i64, i64), delta: (i64, i64)) -> Result<Self> {
        CodePoint::new(rational(rate.0, rate.1), rational(delta.0, delta.1))
    }

    /// `([k]/n, d/n)` of a code with at least two words.
    pub fn from_code(code: &Code, tag: impl Into<String>) -> Result<Self> {
        let d = code.min_distance()?;
        Ok(CodePoint {
            rate: from_ratio(code.rate_floor()),
            delta: rational(d as i64, code.n() as i64),
            source: Some(PointSource {
                q: code.q(),
                n: code.n(),
                size: code.size_big(),
                d,
            }),
            tag: tag.into(),
        })
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    /// `R + δ < 1`.
    pub fn in_domain(&self) -> bool {
        &self.rate + &self.delta < BigRational::one()
    }

    pub fn rate_f64(&self) -> f64 {
        rational_to_f64(&self.rate)
    }

    pub fn delta_f64(&self) -> f64 {
        rational_to_f64(&self.delta)
    }
}

/// Sign of `Q` relative to the line through `P` and `(R = 1, δ = 0)`:
/// positive below, zero on, negative above.
fn side_a(p: &CodePoint, q: &CodePoint) -> BigRational {
    let one = BigRational::one();
    &p.delta * (&one - &q.rate) - (&one - &p.rate) * &q.delta
}

/// Same for the line through `P` and `(R = 0, δ = 1)`.
fn side_b(p: &CodePoint, q: &CodePoint) -> BigRational {
    let one = BigRational::one();
    &p.rate * (&one - &q.delta) - &q.rate * (&one - &p.delta)
}

fn require_domain(p: &CodePoint) -> Result<()> {
    if p.in_domain() {
        Ok(())
    } else {
        Err(Error::precondition(format!("apex {p} is outside the domain R + δ < 1")))
    }
}

/// `Q` lies in the closed lower cone of `P`.
///
/// For `δ_P = 0` the line towards `(1, 0)` is vertical and the cone
/// degenerates to the segment `δ = 0, R ≤ R_P`.
pub fn lower_cone_contains(p: &CodePoint, q: &CodePoint) -> Result<bool> {
    require_domain(p)?;
    Ok(!side_a(p, q).is_negative() && !side_b(p, q).is_negative())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cone {
    Upper,
    Lower,
    Left,
    Right,
}

/// The cones containing a point. Points on a boundary ray belong to both
/// adjacent cones, and the apex to all four.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeMembership(BTreeSet<Cone>);

impl ConeMembership {
    pub fn contains(&self, cone: Cone) -> bool {
        self.0.contains(&cone)
    }

    pub fn is_boundary(&self) -> bool {
        self.0.len() > 1
    }

    /// The single cone of an interior point.
    pub fn unique(&self) -> Option<Cone> {
        (self.0.len() == 1).then(|| *self.0.iter().next().expect("nonempty"))
    }

    pub fn iter(&self) -> impl Iterator<Item = Cone> + '_ {
        self.0.iter().copied()
    }
}

/// Classifies `Q` against the four cones of `P`.
pub fn cone_partition(p: &CodePoint, q: &CodePoint) -> Result<ConeMembership> {
    require_domain(p)?;
    let one = BigRational::one();
    let zero = BigRational::zero();
    if q.rate < zero || q.delta < zero || q.rate > one || q.delta > one || &q.rate + &q.delta > one {
        return Err(Error::precondition(format!("{q} lies outside the closed domain")));
    }
    let a = side_a(p, q);
    let b = side_b(p, q);
    let mut set = BTreeSet::new();
    if !a.is_negative() && !b.is_negative() {
        set.insert(Cone::Lower);
    }
    if !a.is_positive() && !b.is_positive() {
        set.insert(Cone::Upper);
    }
    if !a.is_negative() && !b.is_positive() {
        set.insert(Cone::Left);
    }
    if !a.is_positive() && !b.is_negative() {
        set.insert(Cone::Right);
    }
    Ok(ConeMembership(set))
}

/// Upper boundary of the lower cone of `P`, as a function of `δ`.
fn cone_profile(p: &CodePoint, delta: &BigRational) -> BigRational {
    let one = BigRational::one();
    let zero = BigRational::zero();
    let value = if delta <= &p.delta {
        // along L_B: R = R_P (1 − δ) / (1 − δ_P)
        &p.rate * (&one - delta) / (&one - &p.delta)
    } else if p.delta.is_zero() {
        // the cone of an apex on δ = 0 is a segment of the axis
        zero.clone()
    } else {
        // along L_A: R = 1 − (1 − R_P) δ / δ_P
        &one - (&one - &p.rate) * delta / &p.delta
    };
    if value.is_negative() {
        zero
    } else {
        value
    }
}

/// Upper boundary of a union of lower cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    /// Non-dominated apexes, δ strictly increasing and R strictly decreasing.
    pub vertices: Vec<CodePoint>,
}

impl Envelope {
    /// Height of the envelope at `δ` (0 outside every cone).
    pub fn value_at(&self, delta: &BigRational) -> BigRational {
        self.vertices
            .iter()
            .map(|p| cone_profile(p, delta))
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// Exact piecewise-linear polyline `(δ, R)` from `δ = 0` to the last
    /// zero crossing.
    pub fn polyline(&self) -> Vec<(BigRational, BigRational)> {
        let one = BigRational::one();
        let zero = BigRational::zero();
        // Each profile is made of two lines; collect them as (slope, intercept)
        // in R = intercept + slope·δ.
        let mut lines = Vec::new();
        let mut breaks: BTreeSet<BigRational> = BTreeSet::new();
        breaks.insert(zero.clone());
        for p in &self.vertices {
            breaks.insert(p.delta.clone());
            let slope_b = -(&p.rate) / (&one - &p.delta);
            lines.push((slope_b, p.rate.clone() / (&one - &p.delta)));
            if p.delta.is_positive() {
                let slope_a = -(&one - &p.rate) / &p.delta;
                breaks.insert(&p.delta / (&one - &p.rate));
                lines.push((slope_a, one.clone()));
            }
        }
        for (i, (s1, c1)) in lines.iter().enumerate() {
            for (s2, c2) in &lines[i + 1..] {
                if s1 != s2 {
                    let x = (c2 - c1) / (s1 - s2);
                    if !x.is_negative() && x <= one {
                        breaks.insert(x);
                    }
                }
            }
        }
        let mut out: Vec<(BigRational, BigRational)> = Vec::new();
        for x in breaks {
            let y = self.value_at(&x);
            let done = y.is_zero() && out.last().is_some_and(|(_, py)| py.is_zero());
            if !done {
                out.push((x, y));
            }
        }
        // drop interior collinear points
        let mut simplified: Vec<(BigRational, BigRational)> = Vec::with_capacity(out.len());
        for pt in out {
            while simplified.len() >= 2 {
                let (x0, y0) = &simplified[simplified.len() - 2];
                let (x1, y1) = &simplified[simplified.len() - 1];
                let cross = (x1 - x0) * (&pt.1 - y0) - (y1 - y0) * (&pt.0 - x0);
                if cross.is_zero() {
                    simplified.pop();
                } else {
                    break;
                }
            }
            simplified.push(pt);
        }
        simplified
    }
}

/// Result of [`empirical_envelope`]: the envelope plus the input points that
/// were left out because they lie outside `Δ`.
#[derive(Debug, Clone)]
pub struct EnvelopeReport {
    pub envelope: Envelope,
    pub excluded: Vec<CodePoint>,
}

/// Upper boundary of the union of lower cones of `points`.
///
/// Points with `R + δ ≥ 1` are excluded (and logged); duplicates collapse.
pub fn empirical_envelope(points: &[CodePoint]) -> Result<EnvelopeReport> {
    if points.is_empty() {
        return Err(Error::precondition("empty point set"));
    }
    let (inside, excluded): (Vec<_>, Vec<_>) = points.iter().cloned().partition(CodePoint::in_domain);
    if !excluded.is_empty() {
        log::warn!("{} point(s) with R + δ ≥ 1 excluded from cone computations", excluded.len());
        for p in &excluded {
            log::debug!("excluded {p}");
        }
    }
    let mut unique: Vec<CodePoint> = inside;
    unique.sort();
    unique.dedup();
    if unique.is_empty() {
        return Err(Error::precondition("no point lies inside R + δ < 1"));
    }
    let survivors: Vec<CodePoint> = unique
        .par_iter()
        .enumerate()
        .filter(|(i, q)| {
            !unique.iter().enumerate().any(|(j, p)| {
                *i != j && side_a(p, q) >= BigRational::zero() && side_b(p, q) >= BigRational::zero()
            })
        })
        .map(|(_, q)| q.clone())
        .collect();
    Ok(EnvelopeReport {
        envelope: Envelope { vertices: survivors },
        excluded,
    })
}

/// Singleton boundary `1 − δ + 1/(q+1)` and Plotkin bound `1 − δ − δ/(q−1)`,
/// both clamped below at 0.
pub fn classical_bounds(q: u32, delta: &BigRational) -> Result<(BigRational, BigRational)> {
    let one = BigRational::one();
    if delta.is_negative() || delta > &one || q < 2 {
        return Err(Error::precondition("classical bounds need q ≥ 2 and 0 ≤ δ ≤ 1"));
    }
    let q = BigInt::from(q);
    let singleton = &one - delta + BigRational::new(BigInt::one(), &q + 1);
    let plotkin = &one - delta - delta / BigRational::from_integer(&q - 1);
    let clamp = |x: BigRational| if x.is_negative() { BigRational::zero() } else { x };
    Ok((clamp(singleton), clamp(plotkin)))
}

/// A multiplicity witness: an `[a·n, a·[k], a·d]_q` code found by the probe.
#[derive(Debug, Clone)]
pub struct MultiplicityWitness {
    pub a: usize,
    pub code: Code,
    /// How the witness was obtained.
    pub route: String,
}

#[derive(Debug, Clone)]
pub struct MultiplicityReport {
    pub found: Vec<MultiplicityWitness>,
    /// Multipliers the search did not reach. Not a proof of nonexistence.
    pub not_found: Vec<usize>,
}

impl MultiplicityReport {
    pub fn found_multipliers(&self) -> Vec<usize> {
        self.found.iter().map(|w| w.a).collect()
    }
}

/// Searches for codes with parameters `[a·n, a·[k], a·d]_q`, `a = 1..=a_max`.
///
/// Candidates are the code itself, direct sums and repetitions of it, a
/// greedy lexicographic code, and codes reached from `supplied` by numeric
/// spoiling. `budget` caps the words any construction may enumerate and the
/// number of spoiled codes visited. A candidate of length `a·n` with at
/// least `q^{a[k]}` words and distance at least `a·d` dominates the target;
/// it is trimmed to exactly `q^{a[k]}` words and its distance is lowered by
/// puncture-then-pad passes, and the result is re-verified.
pub fn multiplicity_probe(
    code: &Code,
    a_max: usize,
    supplied: &[Code],
    budget: usize,
) -> Result<MultiplicityReport> {
    let d = code.min_distance()?;
    let n = code.n();
    let q = code.q();
    let k = code.k_floor() as usize;

    let mut candidates: Vec<(Code, String)> = vec![(code.clone(), "the code itself".into())];
    for a in 2..=a_max {
        if let Some(c) = direct_sum_power(code, a, budget) {
            candidates.push((c, format!("direct sum of {a} copies")));
        }
        if let Some(c) = repeat_words(code, a) {
            candidates.push((c, format!("{a}-fold word repetition")));
        }
        let target_size = (q as u128).checked_pow((a * k) as u32);
        if let Some(t) = target_size {
            if let Some(c) = lexicode(q, a * n, a * d, t as usize, budget) {
                candidates.push((c, "greedy lexicographic code".into()));
            }
        }
    }
    // spoiling descendants of supplied codes
    let mut frontier: Vec<(Code, String)> = supplied
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), format!("supplied code #{i}")))
        .collect();
    let mut explored = 0usize;
    let mut seen = BTreeSet::new();
    while let Some((c, route)) = frontier.pop() {
        if explored >= budget || !seen.insert((c.n(), c.canonical_words())) {
            continue;
        }
        explored += 1;
        if c.n() > n {
            for kind in [SpoilKind::Puncture, SpoilKind::Shorten] {
                if let Ok(s) = numeric_spoil(&c, kind) {
                    frontier.push((s.code, format!("{route} → {kind:?}")));
                }
            }
        }
        candidates.push((c, route));
    }

    let mut found = Vec::new();
    let mut not_found = Vec::new();
    for a in 1..=a_max {
        let target_n = a * n;
        let target_d = a * d;
        let target_size = big_pow(q, (a * k) as u32);
        let hit = candidates.iter().find_map(|(c, route)| {
            if c.q() != q || c.n() != target_n || c.size_big() < target_size {
                return None;
            }
            let cd = c.distance()?;
            if cd < target_d {
                return None;
            }
            let exact = exact_parameters(c, a * k, target_d).ok()?;
            Some(MultiplicityWitness { a, code: exact, route: route.clone() })
        });
        match hit {
            Some(w) => found.push(w),
            None => not_found.push(a),
        }
    }
    Ok(MultiplicityReport { found, not_found })
}

/// Trims a dominating code to `q^k` words and distance exactly `d`, keeping
/// the length. Verified by recomputation.
fn exact_parameters(code: &Code, k: usize, d: usize) -> Result<Code> {
    let size = (code.q() as usize).pow(k as u32);
    let mut current = Code::new(code.q(), code.n(), code.words()[..size].to_vec())?;
    while current.min_distance()? > d {
        let punctured = numeric_spoil(&current, SpoilKind::Puncture)?.code;
        current = numeric_spoil(&punctured, SpoilKind::Pad)?.code;
    }
    let ok = current.n() == code.n()
        && floor_log(current.size() as u128, code.q() as u128) as usize == k
        && current.min_distance()? == d;
    if ok {
        Ok(current)
    } else {
        Err(Error::precondition("witness trimming failed verification"))
    }
}

fn direct_sum_power(code: &Code, a: usize, budget: usize) -> Option<Code> {
    let total = code.size().checked_pow(a as u32)?;
    if total > budget {
        return None;
    }
    let mut words: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..a {
        words = words
            .into_iter()
            .flat_map(|prefix| {
                code.words().iter().map(move |w| {
                    let mut v = prefix.clone();
                    v.extend_from_slice(w.digits());
                    v
                })
            })
            .collect();
    }
    Code::new(code.q(), code.n() * a, words.into_iter().map(Into::into).collect()).ok()
}

fn repeat_words(code: &Code, a: usize) -> Option<Code> {
    let words = code
        .words()
        .iter()
        .map(|w| w.digits().repeat(a).into())
        .collect();
    Code::new(code.q(), code.n() * a, words).ok()
}

/// Greedy lexicographic code of length `n` and distance `d`, stopping at
/// `want` words or when `q^n` exceeds the scan budget.
fn lexicode(q: u32, n: usize, d: usize, want: usize, budget: usize) -> Option<Code> {
    let total = (q as u128).checked_pow(n as u32)?;
    if total > budget as u128 {
        return None;
    }
    let mut chosen: Vec<crate::code::Word> = Vec::new();
    for i in 0..total {
        let w = crate::code::index_to_word(i, q, n);
        if chosen
            .iter()
            .all(|c| crate::code::distance_unchecked(c.digits(), w.digits()) >= d)
        {
            chosen.push(w);
            if chosen.len() >= want {
                break;
            }
        }
    }
    Code::new(q, n, chosen).ok()
}

/// Code points reachable from `code` by at most `steps` numeric spoilings,
/// deduplicated as exact rationals and sorted by `(δ, R)`.
pub fn spoil_descendants(code: &Code, steps: usize) -> Result<Vec<CodePoint>> {
    let mut seen_codes = BTreeSet::new();
    seen_codes.insert((code.n(), code.canonical_words()));
    let mut points = BTreeSet::new();
    points.insert(CodePoint::from_code(code, "root")?);
    let mut frontier = vec![code.clone()];
    for step in 1..=steps {
        let children: Vec<Code> = frontier
            .par_iter()
            .flat_map_iter(|c| {
                [SpoilKind::Pad, SpoilKind::Puncture, SpoilKind::Shorten]
                    .into_iter()
                    .filter_map(move |kind| numeric_spoil(c, kind).ok().map(|s| s.code))
            })
            .collect();
        frontier.clear();
        for child in children {
            if seen_codes.insert((child.n(), child.canonical_words())) {
                if let Ok(p) = CodePoint::from_code(&child, format!("step{step}")) {
                    points.insert(p);
                }
                frontier.push(child);
            }
        }
    }
    Ok(points.into_iter().collect())
}
