//! Codes as finite sets of equal-length words over the digit alphabet
//! `{0, …, q−1}`, their parameters `[n, k, d]_q`, and constructors for the
//! families used throughout the crate (linear, Reed–Solomon, random).
//!
//! `k = log_q #C` is generally irrational, so a code keeps `#C` and derives
//! `k` on demand. Every ordering decision between rates goes through the
//! integer test `#C₁^{n₂} ≤ #C₂^{n₁}`; floats are only used for reporting.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest alphabet representable with `u8` digits.
pub const MAX_Q: u32 = 256;

/// Alphabets above this size cannot be written in the one-character-per-digit
/// JSON format.
pub const MAX_TEXT_Q: u32 = 36;

/// A word of digits in `[0, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(digits: Vec<u8>) -> Self {
        Word(digits)
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_digits(self) -> Vec<u8> {
        self.0
    }

    /// Parses a word written with one base-36 character per digit.
    pub fn parse(text: &str, q: u32) -> Result<Self> {
        let mut digits = Vec::with_capacity(text.len());
        for c in text.chars() {
            let d = c
                .to_digit(36)
                .ok_or_else(|| Error::InvalidInput(format!("bad digit {c:?} in word {text:?}")))?;
            if d >= q {
                return Err(Error::DigitOutOfRange { digit: d, q });
            }
            digits.push(d as u8);
        }
        Ok(Word(digits))
    }

    /// Weight: number of nonzero digits.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&d| d != 0).count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.0 {
            let c = char::from_digit(d as u32, 36).unwrap_or('?');
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl From<Vec<u8>> for Word {
    fn from(digits: Vec<u8>) -> Self {
        Word(digits)
    }
}

impl AsRef<[u8]> for Word {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming_distance(a: &[u8], b: &[u8]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(distance_unchecked(a, b))
}

#[inline]
pub(crate) fn distance_unchecked(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// A nonempty set of distinct words of common length `n` over `q` letters.
///
/// Word order is preserved as given; it fixes the letter indices used by
/// potentials, cylinder assignments and encoders.
#[derive(Clone)]
pub struct Code {
    q: u32,
    n: usize,
    words: Vec<Word>,
    linear: bool,
    distance: OnceLock<Option<usize>>,
    index: OnceLock<HashMap<Word, usize>>,
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Code")
            .field("q", &self.q)
            .field("n", &self.n)
            .field("size", &self.words.len())
            .field("linear", &self.linear)
            .finish()
    }
}

impl PartialEq for Code {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.n == other.n && self.words == other.words
    }
}

impl Eq for Code {}

impl Code {
    pub fn new(q: u32, n: usize, words: Vec<Word>) -> Result<Self> {
        if !(2..=MAX_Q).contains(&q) {
            return Err(Error::InvalidCode(format!("alphabet size {q} outside 2..={MAX_Q}")));
        }
        if n == 0 {
            return Err(Error::InvalidCode("word length must be at least 1".into()));
        }
        if words.is_empty() {
            return Err(Error::InvalidCode("a code needs at least one word".into()));
        }
        let mut seen = HashSet::with_capacity(words.len());
        for w in &words {
            if w.len() != n {
                return Err(Error::LengthMismatch { left: n, right: w.len() });
            }
            if let Some(&d) = w.digits().iter().find(|&&d| d as u32 >= q) {
                return Err(Error::DigitOutOfRange { digit: d as u32, q });
            }
            if !seen.insert(w) {
                return Err(Error::InvalidCode(format!("duplicate word {w}")));
            }
        }
        Ok(Code::from_parts(q, n, words, false))
    }

    /// Trusted constructor for words already known to be valid and distinct.
    pub(crate) fn from_parts(q: u32, n: usize, words: Vec<Word>, linear: bool) -> Self {
        Code {
            q,
            n,
            words,
            linear,
            distance: OnceLock::new(),
            index: OnceLock::new(),
        }
    }

    /// Builds a code from textual words such as `"0110"`.
    pub fn from_strs(q: u32, words: &[&str]) -> Result<Self> {
        let parsed = words
            .iter()
            .map(|w| Word::parse(w, q))
            .collect::<Result<Vec<_>>>()?;
        let n = parsed.first().map_or(0, Word::len);
        Code::new(q, n, parsed)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn size_big(&self) -> BigUint {
        BigUint::from(self.words.len())
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Whether the constructor guarantees closure under the field operations.
    pub fn is_known_linear(&self) -> bool {
        self.linear
    }

    pub fn contains(&self, word: &[u8]) -> bool {
        self.index_of(word).is_some()
    }

    pub fn index_of(&self, word: &[u8]) -> Option<usize> {
        let index = self.index.get_or_init(|| {
            self.words
                .iter()
                .enumerate()
                .map(|(i, w)| (w.clone(), i))
                .collect()
        });
        index.get(&Word(word.to_vec())).copied()
    }

    /// Minimum distance, `None` for a single-word code.
    ///
    /// Known-linear codes use the minimum nonzero weight; everything else the
    /// pairwise scan.
    pub fn distance(&self) -> Option<usize> {
        *self.distance.get_or_init(|| {
            if self.words.len() < 2 {
                None
            } else if self.linear {
                Some(min_weight_distance(self))
            } else {
                Some(pairwise_min_distance(&self.words))
            }
        })
    }

    pub fn min_distance(&self) -> Result<usize> {
        self.distance().ok_or(Error::DistanceUndefined)
    }

    /// Largest integer `k` with `q^k ≤ #C`.
    pub fn k_floor(&self) -> u32 {
        floor_log(self.words.len() as u128, self.q as u128)
    }

    /// `log_q #C`; exact whenever `#C` is a power of `q`.
    pub fn k_real(&self) -> f64 {
        log_q_exact_int(self.words.len() as u128, self.q)
    }

    /// Transmission rate `k/n` as a float.
    pub fn rate_f64(&self) -> f64 {
        self.k_real() / self.n as f64
    }

    /// Rational rate `[k]/n` used for code-point geometry.
    pub fn rate_floor(&self) -> Ratio<i64> {
        Ratio::new(self.k_floor() as i64, self.n as i64)
    }

    pub fn relative_distance(&self) -> Option<Ratio<i64>> {
        self.distance().map(|d| Ratio::new(d as i64, self.n as i64))
    }

    pub fn params(&self) -> CodeParams {
        let d = self.distance();
        CodeParams {
            q: self.q,
            n: self.n,
            size: self.words.len(),
            k_real: self.k_real(),
            k_floor: self.k_floor(),
            d,
            rate_real: self.rate_f64(),
            rate_floor: self.rate_floor(),
            delta: d.map(|d| Ratio::new(d as i64, self.n as i64)),
        }
    }

    /// Same code with words sorted; used as a canonical set representative.
    pub fn canonical_words(&self) -> Vec<Word> {
        let mut words = self.words.clone();
        words.sort();
        words
    }

    pub fn same_word_set(&self, other: &Code) -> bool {
        self.q == other.q && self.n == other.n && self.canonical_words() == other.canonical_words()
    }

    /// Finite Singleton bound `k ≤ n − d + 1`, checked as `#C ≤ q^{n−d+1}`.
    pub fn satisfies_singleton(&self) -> Option<bool> {
        let d = self.distance()?;
        Some(self.size_big() <= BigUint::from(self.q).pow((self.n - d + 1) as u32))
    }

    /// `#C = q^{n−d+1}`: the code is MDS.
    pub fn meets_singleton(&self) -> Option<bool> {
        let d = self.distance()?;
        Some(self.size_big() == BigUint::from(self.q).pow((self.n - d + 1) as u32))
    }

    /// Serializable textual form.
    pub fn to_file(&self) -> Result<CodeFile> {
        if self.q > MAX_TEXT_Q {
            return Err(Error::InvalidInput(format!(
                "alphabet size {} cannot be written with single-character digits",
                self.q
            )));
        }
        Ok(CodeFile {
            q: self.q,
            n: self.n,
            words: self.words.iter().map(Word::to_string).collect(),
        })
    }
}

/// Parameters of a code. `d` and `δ` are absent for single-word codes.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeParams {
    pub q: u32,
    pub n: usize,
    pub size: usize,
    pub k_real: f64,
    pub k_floor: u32,
    pub d: Option<usize>,
    pub rate_real: f64,
    pub rate_floor: Ratio<i64>,
    pub delta: Option<Ratio<i64>>,
}

pub fn code_params(code: &Code) -> CodeParams {
    code.params()
}

/// The on-disk JSON shape `{"q": int, "n": int, "words": [string]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    pub q: u32,
    pub n: usize,
    pub words: Vec<String>,
}

impl CodeFile {
    pub fn into_code(self) -> Result<Code> {
        let words = self
            .words
            .iter()
            .map(|w| Word::parse(w, self.q))
            .collect::<Result<Vec<_>>>()?;
        Code::new(self.q, self.n, words)
    }
}

/// Compares the rates of two codes over the same alphabet exactly.
pub fn compare_rates(a: &Code, b: &Code) -> Result<Ordering> {
    if a.q != b.q {
        return Err(Error::precondition("rates compared across different alphabets"));
    }
    Ok(compare_log_ratios(
        &a.size_big(),
        a.n as u32,
        &b.size_big(),
        b.n as u32,
    ))
}

/// Compares `log(x)/m` with `log(y)/n` via `x^n` vs `y^m`.
pub fn compare_log_ratios(x: &BigUint, m: u32, y: &BigUint, n: u32) -> Ordering {
    x.pow(n).cmp(&y.pow(m))
}

/// Exhaustive minimum over unordered distinct pairs; the reference oracle.
pub fn pairwise_min_distance(words: &[Word]) -> usize {
    let mut best = usize::MAX;
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            let d = distance_unchecked(a.digits(), b.digits());
            if d < best {
                best = d;
                if best <= 1 {
                    return best;
                }
            }
        }
    }
    best
}

/// Minimum weight of a nonzero codeword. Equals the minimum distance only
/// for linear codes.
pub fn min_weight_distance(code: &Code) -> usize {
    code.words
        .iter()
        .map(Word::weight)
        .filter(|&w| w > 0)
        .min()
        .unwrap_or(0)
}

/// Checks `x − y ∈ C` for all pairs (prime `q` only).
pub fn is_closed_under_subtraction(code: &Code) -> bool {
    let q = code.q as u16;
    code.words.iter().all(|x| {
        code.words.iter().all(|y| {
            let diff: Vec<u8> = x
                .digits()
                .iter()
                .zip(y.digits())
                .map(|(&a, &b)| ((a as u16 + q - b as u16) % q) as u8)
                .collect();
            code.contains(&diff)
        })
    })
}

pub fn is_prime(q: u32) -> bool {
    q >= 2 && (2..).take_while(|p| p * p <= q).all(|p| !q.is_multiple_of(p))
}

pub(crate) fn floor_log(value: u128, base: u128) -> u32 {
    let mut k = 0;
    let mut power: u128 = 1;
    while let Some(next) = power.checked_mul(base) {
        if next > value {
            break;
        }
        power = next;
        k += 1;
    }
    k
}

/// `log_q(value)` computed as `[k] + log_q(value / q^[k])` so that exact
/// powers of `q` come out as exact integers.
pub(crate) fn log_q_exact_int(value: u128, q: u32) -> f64 {
    let k = floor_log(value, q as u128);
    let power = (q as u128).pow(k);
    if power == value {
        k as f64
    } else {
        k as f64 + (value as f64 / power as f64).ln() / (q as f64).ln()
    }
}

/// A `k × n` matrix over the prime field `F_q` with independent rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    q: u32,
    rows: Vec<Vec<u32>>,
}

impl GeneratorMatrix {
    pub fn new(q: u32, rows: Vec<Vec<u32>>) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if q > MAX_Q {
            return Err(Error::InvalidInput(format!("field size {q} too large")));
        }
        let n = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || n == 0 {
            return Err(Error::InvalidInput("empty generator matrix".into()));
        }
        for row in &rows {
            if row.len() != n {
                return Err(Error::LengthMismatch { left: n, right: row.len() });
            }
            if let Some(&e) = row.iter().find(|&&e| e >= q) {
                return Err(Error::DigitOutOfRange { digit: e, q });
            }
        }
        let rank = rank_mod_p(&rows, q);
        if rank < rows.len() {
            return Err(Error::DependentRows { rank, rows: rows.len() });
        }
        Ok(GeneratorMatrix { q, rows })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Encodes a message of `k` field elements.
    pub fn encode(&self, message: &[u32]) -> Word {
        let q = self.q as u64;
        let mut out = vec![0u64; self.n()];
        for (coef, row) in message.iter().zip(&self.rows) {
            if *coef == 0 {
                continue;
            }
            for (acc, &g) in out.iter_mut().zip(row) {
                *acc = (*acc + *coef as u64 * g as u64) % q;
            }
        }
        Word(out.into_iter().map(|d| d as u8).collect())
    }
}

fn rank_mod_p(rows: &[Vec<u32>], p: u32) -> usize {
    let p = p as u64;
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as u64).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = mod_pow(m[rank][col], p - 2, p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let factor = m[r][col];
                for c in 0..cols {
                    m[r][c] = (m[r][c] + p - factor * m[rank][c] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Row space of `g`. Codeword `i` encodes the message whose base-`q`
/// expansion (most significant digit first) is `i`.
pub fn make_linear_code(g: &GeneratorMatrix) -> Result<Code> {
    let q = g.q;
    let k = g.k() as u32;
    let total = (q as u128)
        .checked_pow(k)
        .filter(|&t| t <= 1 << 26)
        .ok_or_else(|| Error::precondition(format!("q^k = {q}^{k} codewords is too many to enumerate")))?;
    let mut message = vec![0u32; g.k()];
    let mut words = Vec::with_capacity(total as usize);
    for i in 0..total {
        let mut rest = i;
        for slot in message.iter_mut().rev() {
            *slot = (rest % q as u128) as u32;
            rest /= q as u128;
        }
        words.push(g.encode(&message));
    }
    Ok(Code::from_parts(q, g.n(), words, true))
}

/// Reed–Solomon evaluation code: `(f(x))_{x ∈ F_q}` for all `deg f < k`.
pub fn make_reed_solomon(q: u32, k: usize) -> Result<Code> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if k == 0 || k > q as usize {
        return Err(Error::precondition(format!("Reed–Solomon dimension {k} outside 1..={q}")));
    }
    let rows = (0..k as u32)
        .map(|j| (0..q).map(|x| mod_pow(x as u64, j as u64, q as u64) as u32).collect())
        .collect();
    make_linear_code(&GeneratorMatrix::new(q, rows)?)
}

/// The binary Hamming `[7,4,3]` code with the systematic generator `[I | P]`.
pub fn hamming_7_4() -> Code {
    let rows = vec![
        vec![1, 0, 0, 0, 1, 1, 0],
        vec![0, 1, 0, 0, 1, 0, 1],
        vec![0, 0, 1, 0, 0, 1, 1],
        vec![0, 0, 0, 1, 1, 1, 1],
    ];
    let g = GeneratorMatrix::new(2, rows).expect("standard generator is valid");
    make_linear_code(&g).expect("16 codewords")
}

/// The extended binary Hamming `[8,4,4]` code (parity bit appended).
pub fn extended_hamming_8_4() -> Code {
    let rows = vec![
        vec![1, 0, 0, 0, 1, 1, 0, 1],
        vec![0, 1, 0, 0, 1, 0, 1, 1],
        vec![0, 0, 1, 0, 0, 1, 1, 1],
        vec![0, 0, 0, 1, 1, 1, 1, 0],
    ];
    let g = GeneratorMatrix::new(2, rows).expect("standard generator is valid");
    make_linear_code(&g).expect("16 codewords")
}

/// `A^n`, every word of length `n`.
pub fn full_space(q: u32, n: usize) -> Result<Code> {
    let total = (q as u128)
        .checked_pow(n as u32)
        .filter(|&t| t <= 1 << 24)
        .ok_or_else(|| Error::precondition("full space too large to enumerate"))?;
    let words = (0..total).map(|i| index_to_word(i, q, n)).collect();
    Ok(Code::from_parts(q, n, words, is_prime(q)))
}

/// Repetition code `{aa…a : a ∈ A}`.
pub fn repetition(q: u32, n: usize) -> Result<Code> {
    if !(2..=MAX_Q).contains(&q) || n == 0 {
        return Err(Error::InvalidCode("repetition code needs q ≥ 2 and n ≥ 1".into()));
    }
    let words = (0..q).map(|a| Word(vec![a as u8; n])).collect();
    Ok(Code::from_parts(q, n, words, is_prime(q)))
}

pub(crate) fn index_to_word(mut index: u128, q: u32, n: usize) -> Word {
    let mut digits = vec![0u8; n];
    for slot in digits.iter_mut().rev() {
        *slot = (index % q as u128) as u8;
        index /= q as u128;
    }
    Word(digits)
}

/// `size` distinct words drawn uniformly from `A^n`, sorted; deterministic in
/// `seed`.
pub fn random_code(q: u32, n: usize, size: usize, seed: u64) -> Result<Code> {
    if !(2..=MAX_Q).contains(&q) || n == 0 {
        return Err(Error::InvalidCode(format!("invalid alphabet/length ({q}, {n})")));
    }
    if size == 0 {
        return Err(Error::precondition("a code needs at least one word"));
    }
    let total = (q as u128).checked_pow(n as u32);
    if let Some(t) = total {
        if size as u128 > t {
            return Err(Error::precondition(format!("{size} words requested but q^n = {t}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices: BTreeSet<u128> = match total {
        Some(t) if t <= 1 << 24 => index::sample(&mut rng, t as usize, size)
            .into_iter()
            .map(|i| i as u128)
            .collect(),
        _ => {
            let mut set = BTreeSet::new();
            while set.len() < size {
                let w: Vec<u8> = (0..n).map(|_| rng.gen_range(0..q) as u8).collect();
                set.insert(Word(w));
            }
            return Ok(Code::from_parts(q, n, set.into_iter().collect(), false));
        }
    };
    let words = indices.into_iter().map(|i| index_to_word(i, q, n)).collect();
    Ok(Code::from_parts(q, n, words, false))
}

/// `q^e` as a big integer.
pub fn big_pow(q: u32, e: u32) -> BigUint {
    BigUint::from(q).pow(e)
}

/// `x` as `f64`, saturating to infinity.
pub fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// `log_q x` for `x ≥ 1`; exact when `x` is a power of `q`.
pub fn log_q_big(x: &BigUint, q: u32) -> f64 {
    if let Some(e) = exact_log(x, q) {
        return e as f64;
    }
    let bits = x.bits();
    let ln = if bits <= 1000 {
        big_to_f64(x).ln()
    } else {
        let shift = bits - 64;
        big_to_f64(&(x >> shift)).ln() + shift as f64 * std::f64::consts::LN_2
    };
    ln / (q as f64).ln()
}

/// `true` when `x` is a power of `q`; returns the exponent.
pub fn exact_log(x: &BigUint, q: u32) -> Option<u32> {
    let base = BigUint::from(q);
    let mut power = BigUint::one();
    let mut e = 0;
    while &power < x {
        power *= &base;
        e += 1;
    }
    (&power == x).then_some(e)
}
