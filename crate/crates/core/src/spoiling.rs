//! Spoiling: inserting, deleting and restricting coordinates, and the three
//! numeric spoilings built from them.
//!
//! Positions are 0-based throughout.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;

use crate::code::{distance_unchecked, Code, Word};
use crate::error::{Error, Result};

/// The letter written by an insertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InsertFn {
    Constant(u8),
    /// One letter per codeword, in the code's word order.
    Table(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpoilOp {
    /// Insert `f(x)` so that it becomes coordinate `position` of the new word.
    Insert { position: usize, f: InsertFn },
    /// Project away coordinate `position`; colliding images merge.
    Delete { position: usize },
    /// Keep the words with `letter` at `position`.
    Restrict { letter: u8, position: usize },
}

impl fmt::Display for SpoilOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpoilOp::Insert { position, f: InsertFn::Constant(a) } => write!(f, "insert({position}, const {a})"),
            SpoilOp::Insert { position, f: InsertFn::Table(_) } => write!(f, "insert({position}, table)"),
            SpoilOp::Delete { position } => write!(f, "delete({position})"),
            SpoilOp::Restrict { letter, position } => write!(f, "restrict({letter}@{position})"),
        }
    }
}

pub fn apply_spoiling(code: &Code, op: &SpoilOp) -> Result<Code> {
    let q = code.q();
    let n = code.n();
    match op {
        SpoilOp::Insert { position, f } => {
            if *position > n {
                return Err(Error::precondition(format!("insert position {position} > {n}")));
            }
            let letters: Vec<u8> = match f {
                InsertFn::Constant(a) => vec![*a; code.size()],
                InsertFn::Table(t) => {
                    if t.len() != code.size() {
                        return Err(Error::InvalidInput(format!(
                            "insert table has {} entries for {} codewords",
                            t.len(),
                            code.size()
                        )));
                    }
                    t.clone()
                }
            };
            if let Some(&a) = letters.iter().find(|&&a| a as u32 >= q) {
                return Err(Error::DigitOutOfRange { digit: a as u32, q });
            }
            let words = code
                .words()
                .iter()
                .zip(&letters)
                .map(|(w, &a)| {
                    let mut v = w.digits().to_vec();
                    v.insert(*position, a);
                    Word::new(v)
                })
                .collect();
            let linear = code.is_known_linear() && matches!(f, InsertFn::Constant(0));
            Ok(Code::from_parts(q, n + 1, words, linear))
        }
        SpoilOp::Delete { position } => {
            if *position >= n {
                return Err(Error::precondition(format!("delete position {position} ≥ {n}")));
            }
            if n < 2 {
                return Err(Error::precondition("cannot delete the only coordinate"));
            }
            let mut seen = HashSet::with_capacity(code.size());
            let words: Vec<Word> = code
                .words()
                .iter()
                .filter_map(|w| {
                    let mut v = w.digits().to_vec();
                    v.remove(*position);
                    let w = Word::new(v);
                    seen.insert(w.clone()).then_some(w)
                })
                .collect();
            Ok(Code::from_parts(q, n - 1, words, code.is_known_linear()))
        }
        SpoilOp::Restrict { letter, position } => {
            if *position >= n {
                return Err(Error::precondition(format!("restrict position {position} ≥ {n}")));
            }
            if *letter as u32 >= q {
                return Err(Error::DigitOutOfRange { digit: *letter as u32, q });
            }
            let words: Vec<Word> = code
                .words()
                .iter()
                .filter(|w| w.digits()[*position] == *letter)
                .cloned()
                .collect();
            if words.is_empty() {
                return Err(Error::precondition(format!(
                    "no codeword has letter {letter} at position {position}"
                )));
            }
            let linear = code.is_known_linear() && *letter == 0;
            Ok(Code::from_parts(q, n, words, linear))
        }
    }
}

/// Sizes `#C(a, i)` for every letter `a`.
pub fn letter_classes(code: &Code, position: usize) -> Result<Vec<usize>> {
    if position >= code.n() {
        return Err(Error::precondition(format!("position {position} ≥ {}", code.n())));
    }
    let mut counts = vec![0usize; code.q() as usize];
    for w in code.words() {
        counts[w.digits()[position] as usize] += 1;
    }
    Ok(counts)
}

/// The three numeric spoilings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpoilKind {
    /// Kind I: `[n, k, d] → [n+1, k, d]` by a constant coordinate.
    Pad,
    /// Kind II: `[n, k, d] → [n−1, k, d−1]` by deleting a coordinate.
    Puncture,
    /// Kind III: `[n, k, d] → [n−1, k′, d]` with `[k]−1 ≤ k′ < k`.
    Shorten,
}

impl SpoilKind {
    pub const ALL: [SpoilKind; 3] = [SpoilKind::Pad, SpoilKind::Puncture, SpoilKind::Shorten];
}

/// Which outcome a deletion produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeleteBranch {
    /// Every minimum-distance pair agrees at the deleted coordinate.
    DistanceKept,
    /// Some minimum-distance pair differs there, so `d` drops by one.
    DistanceDropped,
}

#[derive(Debug, Clone)]
pub struct Spoiled {
    pub code: Code,
    pub kind: SpoilKind,
    /// Set for [`SpoilKind::Puncture`].
    pub branch: Option<DeleteBranch>,
    /// Primitive operations in the order they were applied.
    pub ops: Vec<SpoilOp>,
}

/// Minimum distance and, per coordinate, whether some minimum-distance pair
/// differs there.
pub fn minimum_pair_support(code: &Code) -> Result<(usize, Vec<bool>)> {
    let d = code.min_distance()?;
    let n = code.n();
    let words = code.words();
    let support = if code.is_known_linear() {
        // minimum pairs are (x, x + c) for minimum-weight c
        let mut mask = vec![false; n];
        for w in words {
            if w.weight() == d {
                for (m, &a) in mask.iter_mut().zip(w.digits()) {
                    *m |= a != 0;
                }
            }
        }
        mask
    } else {
        (0..words.len())
            .into_par_iter()
            .map(|i| {
                let mut mask = vec![false; n];
                let a = words[i].digits();
                for b in &words[i + 1..] {
                    let b = b.digits();
                    if distance_unchecked(a, b) == d {
                        for (j, m) in mask.iter_mut().enumerate() {
                            *m |= a[j] != b[j];
                        }
                    }
                }
                mask
            })
            .reduce(
                || vec![false; n],
                |mut x, y| {
                    for (a, b) in x.iter_mut().zip(y) {
                        *a |= b;
                    }
                    x
                },
            )
    };
    Ok((d, support))
}

/// Branch of a deletion at `position`, decided before deleting.
pub fn delete_branch(code: &Code, position: usize) -> Result<DeleteBranch> {
    let (_, support) = minimum_pair_support(code)?;
    match support.get(position) {
        Some(true) => Ok(DeleteBranch::DistanceDropped),
        Some(false) => Ok(DeleteBranch::DistanceKept),
        None => Err(Error::precondition(format!("position {position} ≥ {}", code.n()))),
    }
}

/// Applies a numeric spoiling.
///
/// Puncturing needs `n > 1`, `#C ≥ 2` and `d ≥ 2` (at `d = 1` the deletion
/// merges words). Shortening needs `n > 1` and `#C > q`.
pub fn numeric_spoil(code: &Code, kind: SpoilKind) -> Result<Spoiled> {
    match kind {
        SpoilKind::Pad => {
            let op = SpoilOp::Insert { position: 0, f: InsertFn::Constant(0) };
            Ok(Spoiled { code: apply_spoiling(code, &op)?, kind, branch: None, ops: vec![op] })
        }
        SpoilKind::Puncture => puncture(code),
        SpoilKind::Shorten => shorten(code),
    }
}

fn puncture(code: &Code) -> Result<Spoiled> {
    if code.n() < 2 {
        return Err(Error::precondition("puncturing needs n > 1"));
    }
    let (d, support) = minimum_pair_support(code)?;
    if d < 2 {
        return Err(Error::precondition("puncturing needs d ≥ 2"));
    }
    let position = support
        .iter()
        .position(|&s| s)
        .expect("a minimum pair differs somewhere");
    let branch = if support[position] {
        DeleteBranch::DistanceDropped
    } else {
        DeleteBranch::DistanceKept
    };
    let op = SpoilOp::Delete { position };
    Ok(Spoiled {
        code: apply_spoiling(code, &op)?,
        kind: SpoilKind::Puncture,
        branch: Some(branch),
        ops: vec![op],
    })
}

fn shorten(code: &Code) -> Result<Spoiled> {
    let n = code.n();
    let q = code.q() as usize;
    if n < 2 {
        return Err(Error::precondition("shortening needs n > 1"));
    }
    if code.size() <= q {
        return Err(Error::precondition("shortening needs k > 1"));
    }
    let d = code.min_distance()?;
    let mut ops = Vec::new();

    // Drop coordinates no minimum pair depends on: keeps both #C and d.
    let (projected, removal) = injective_projection(code)?;
    ops.extend(removal);

    let position = (0..projected.n())
        .find(|&i| {
            letter_classes(&projected, i)
                .map(|c| c.iter().filter(|&&x| x > 0).count() >= 2)
                .unwrap_or(false)
        })
        .expect("two distinct words differ somewhere");
    let classes = letter_classes(&projected, position)?;
    let letter = classes
        .iter()
        .position(|&c| c * q >= projected.size())
        .expect("some class holds at least #C/q words") as u8;
    let restrict = SpoilOp::Restrict { letter, position };
    let delete = SpoilOp::Delete { position };
    let mut current = apply_spoiling(&apply_spoiling(&projected, &restrict)?, &delete)?;
    ops.push(restrict);
    ops.push(delete);

    while current.min_distance()? > d {
        let p = puncture(&current)?;
        let padded = numeric_spoil(&p.code, SpoilKind::Pad)?;
        ops.extend(p.ops);
        ops.extend(padded.ops);
        current = padded.code;
    }
    while current.n() < n - 1 {
        let padded = numeric_spoil(&current, SpoilKind::Pad)?;
        ops.extend(padded.ops);
        current = padded.code;
    }
    Ok(Spoiled { code: current, kind: SpoilKind::Shorten, branch: None, ops })
}

/// Greedily deletes coordinates on which no minimum-distance pair differs.
///
/// Such deletions are injective and keep `d`. The scan is repeated from each
/// of the `n` starting offsets and the shortest projection is kept (ties go
/// to the smallest offset). Pair distances are kept in a table and lowered
/// as coordinates go.
fn injective_projection(code: &Code) -> Result<(Code, Vec<SpoilOp>)> {
    let n = code.n();
    let words: Vec<&[u8]> = code.words().iter().map(|w| w.digits()).collect();
    let d = code.min_distance()?;
    let m = words.len();
    let mut base = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            base.push(distance_unchecked(words[i], words[j]) as u32);
        }
    }

    let scan = |start: usize| -> Vec<usize> {
        let mut dist = base.clone();
        let mut deleted = Vec::new();
        for offset in 0..n {
            if n - deleted.len() < 2 {
                break;
            }
            let c = (start + offset) % n;
            let mut k = 0;
            let mut needed = false;
            'pairs: for i in 0..m {
                for j in i + 1..m {
                    if dist[k] == d as u32 && words[i][c] != words[j][c] {
                        needed = true;
                        break 'pairs;
                    }
                    k += 1;
                }
            }
            if !needed {
                let mut k = 0;
                for i in 0..m {
                    for j in i + 1..m {
                        if words[i][c] != words[j][c] {
                            dist[k] -= 1;
                        }
                        k += 1;
                    }
                }
                deleted.push(c);
            }
        }
        deleted
    };
    let (_, deleted) = (0..n)
        .into_par_iter()
        .map(|start| (start, scan(start)))
        .max_by(|(sa, a), (sb, b)| a.len().cmp(&b.len()).then(sb.cmp(sa)))
        .expect("n ≥ 1 starting offsets");

    // Delete ops in the shrinking index space, in the order found.
    let mut alive: Vec<usize> = (0..n).collect();
    let mut ops = Vec::with_capacity(deleted.len());
    for c in &deleted {
        let pos = alive.iter().position(|x| x == c).expect("alive coordinate");
        alive.remove(pos);
        ops.push(SpoilOp::Delete { position: pos });
    }
    let projected = code
        .words()
        .iter()
        .map(|w| Word::new(alive.iter().map(|&c| w.digits()[c]).collect()))
        .collect();
    Ok((Code::from_parts(code.q(), alive.len(), projected, code.is_known_linear()), ops))
}
