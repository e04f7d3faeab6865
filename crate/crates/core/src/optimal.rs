//! Closed-form optimal sets of n-means, their number, and their error.
//!
//! For `n ≥ 4` write `n = m·4^ℓ + k` with `m ∈ {1,2,3}` and `0 ≤ k < 4^ℓ`.
//! An optimal set places a copy of an optimal `m`-set in every level-`ℓ`
//! cylinder, except for the `k` cylinders in a chosen subset `t`, which get
//! an optimal `(m+1)`-set instead.

use num::bigint::{BigInt, BigUint};
use num::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::Codebook;
use crate::measure::{word_apply, Word};
use crate::point::{rat, Point, Rational, Symmetry};

/// Number of optimal `m`-sets for `m = 1..=4`.
pub fn variant_count(m: u32) -> Result<usize> {
    match m {
        1 => Ok(1),
        2 => Ok(2),
        3 => Ok(4),
        4 => Ok(1),
        _ => Err(Error::InvalidVariant { m, variant: 0 }),
    }
}

/// `V_1..V_4`.
pub fn base_error(m: u32) -> Rational {
    match m {
        1 => rat(1, 4),
        2 => rat(5, 36),
        3 => rat(1, 12),
        4 => rat(1, 36),
        _ => panic!("no base error for m = {m}"),
    }
}

fn alpha3() -> Vec<Point> {
    vec![Point::frac(1, 6, 1, 6), Point::frac(5, 6, 1, 6), Point::frac(1, 2, 5, 6)]
}

/// The optimal `m`-sets. Variants of `α_3` are the base triangle followed by
/// its images under the half turn, and the two quarter turns.
pub fn base_set(m: u32, variant: usize) -> Result<Codebook> {
    if variant >= variant_count(m)? {
        return Err(Error::InvalidVariant { m, variant });
    }
    let points = match (m, variant) {
        (1, _) => vec![Point::center()],
        (2, 0) => vec![Point::frac(1, 6, 1, 2), Point::frac(5, 6, 1, 2)],
        (2, _) => vec![Point::frac(1, 2, 1, 6), Point::frac(1, 2, 5, 6)],
        (3, v) => {
            let g = [Symmetry::Identity, Symmetry::Rot180, Symmetry::Rot270, Symmetry::Rot90][v];
            alpha3().iter().map(|p| g.apply(p)).collect()
        }
        (4, _) => vec![
            Point::frac(1, 6, 1, 6),
            Point::frac(5, 6, 1, 6),
            Point::frac(1, 6, 5, 6),
            Point::frac(5, 6, 5, 6),
        ],
        _ => unreachable!(),
    };
    Codebook::new(points)
}

/// `n = m·4^level + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decomposition {
    pub n: u64,
    pub level: u32,
    pub m: u32,
    pub k: u64,
}

impl Decomposition {
    pub fn cylinders(&self) -> u64 {
        1u64 << (2 * self.level)
    }
}

pub fn decompose(n: u64) -> Result<Decomposition> {
    if n < 4 {
        return Err(Error::TooSmall { n, min: 4 });
    }
    let level = (63 - n.leading_zeros()) / 2;
    let p = 1u64 << (2 * level);
    let m = (n / p) as u32;
    Ok(Decomposition { n, level, m, k: n - m as u64 * p })
}

/// Like [`decompose`], but maps `n ∈ {1,2,3}` to level 0 with `m = n`.
pub fn decompose_any(n: u64) -> Result<Decomposition> {
    match n {
        0 => Err(Error::TooSmall { n, min: 1 }),
        1..=3 => Ok(Decomposition { n, level: 0, m: n as u32, k: 0 }),
        _ => decompose(n),
    }
}

/// One optimal set together with the choices that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalSet {
    pub decomposition: Decomposition,
    /// Level-`ℓ` words receiving `m + 1` points, sorted.
    pub t: Vec<Word>,
    /// Variant of the base set used in each level-`ℓ` cylinder, in
    /// lexicographic word order. A single entry for `n ≤ 3`.
    pub variants: Vec<usize>,
    pub codebook: Codebook,
}

fn validate_t(d: &Decomposition, t: &[Word]) -> Result<Vec<Word>> {
    let mut sorted = t.to_vec();
    sorted.sort_by_key(Word::lex_index);
    sorted.dedup();
    if sorted.len() != t.len() {
        return Err(Error::InvalidSubset("repeated word in t".into()));
    }
    if let Some(w) = sorted.iter().find(|w| w.len() as u32 != d.level) {
        return Err(Error::InvalidSubset(format!("word {w} does not have length {}", d.level)));
    }
    if sorted.len() as u64 != d.k {
        return Err(Error::InvalidSubset(format!(
            "n = {} needs |t| = {}, got {}",
            d.n,
            d.k,
            sorted.len()
        )));
    }
    Ok(sorted)
}

/// Builds the optimal set for `n` from the subset `t` and per-cylinder
/// variants (`None` means variant 0 everywhere). Points are listed cylinder
/// by cylinder in lexicographic word order.
pub fn optimal_set(n: u64, t: &[Word], variants: Option<&[usize]>) -> Result<OptimalSet> {
    let d = decompose_any(n)?;
    let t = validate_t(&d, t)?;
    let words = Word::all_of_length(d.level);
    let variants = match variants {
        Some(v) if v.len() != words.len() => {
            return Err(Error::InvalidSubset(format!("expected {} variants, got {}", words.len(), v.len())))
        }
        Some(v) => v.to_vec(),
        None => vec![0; words.len()],
    };
    let mut points = Vec::with_capacity(n as usize);
    let mut ti = 0;
    for (word, &variant) in words.iter().zip(&variants) {
        let m = if ti < t.len() && &t[ti] == word {
            ti += 1;
            d.m + 1
        } else {
            d.m
        };
        for p in base_set(m, variant)?.points() {
            points.push(word_apply(word, p));
        }
    }
    let codebook = Codebook::new(points)?;
    Ok(OptimalSet { decomposition: d, t, variants, codebook })
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of distinct optimal sets of `n`-means.
pub fn optimal_count(n: u64) -> BigUint {
    match n {
        0 => BigUint::zero(),
        1 => BigUint::one(),
        2 => BigUint::from(2u32),
        3 => BigUint::from(4u32),
        _ => {
            let d = decompose(n).expect("n ≥ 4");
            let cyl = d.cylinders();
            let base = BigUint::from(2u32).pow(d.m - 1);
            let mut count = base.pow(
                u32::try_from(cyl - d.k).expect("level too large for counting"),
            ) * binomial(cyl, d.k);
            if d.m < 3 {
                count *= BigUint::from(2u32).pow(d.m * d.k as u32);
            }
            count
        }
    }
}

/// `V_n`, exact.
pub fn quantization_error(n: u64) -> Rational {
    quantization_error_big(&BigUint::from(n))
}

/// `V_n` for arbitrarily large `n`.
pub fn quantization_error_big(n: &BigUint) -> Rational {
    assert!(!n.is_zero(), "V_0 is undefined");
    if let Some(small) = n.to_u32() {
        if small <= 4 {
            return base_error(small);
        }
    }
    let level = (n.bits() - 1) / 2;
    let p = BigUint::one() << (2 * level);
    let m = (n / &p).to_u32().expect("m < 4");
    let nn = BigInt::from(n.clone());
    let pp = BigInt::from(p);
    let low = BigInt::from(m + 1) * &pp - &nn;
    let high = &nn - BigInt::from(m) * &pp;
    let v = Rational::from_integer(low) * base_error(m) + Rational::from_integer(high) * base_error(m + 1);
    v / Rational::from_integer(BigInt::from(36u32).pow(level as u32))
}

fn radices(d: &Decomposition) -> (usize, usize) {
    if d.level == 0 {
        (variant_count(d.m).unwrap(), 1)
    } else {
        (variant_count(d.m).unwrap(), variant_count(d.m + 1).unwrap())
    }
}

/// Total enumeration length, computed from the construction (not from the
/// counting formula).
pub fn enumeration_len(n: u64) -> Result<BigUint> {
    let d = decompose_any(n)?;
    let (out_r, in_r) = radices(&d);
    let cyl = if d.level == 0 { 1 } else { d.cylinders() };
    let per_t = BigUint::from(out_r).pow((cyl - d.k) as u32) * BigUint::from(in_r).pow(d.k as u32);
    Ok(binomial(cyl, d.k) * per_t)
}

/// The `index`-th optimal set in enumeration order: subsets `t` in
/// lexicographic order (outer), then variant maps in mixed radix with the
/// last cylinder varying fastest.
pub fn optimal_by_index(n: u64, index: &BigUint) -> Result<OptimalSet> {
    let d = decompose_any(n)?;
    let total = enumeration_len(n)?;
    if index >= &total {
        return Err(Error::InvalidSubset(format!("index {index} out of range for n = {n} ({total} sets)")));
    }
    let (out_r, in_r) = radices(&d);
    let cyl = if d.level == 0 { 1 } else { d.cylinders() };
    let per_t = &total / binomial(cyl, d.k);
    let mut t_rank = index / &per_t;
    let mut v_rank = index % &per_t;

    // Unrank the k-subset of 0..cyl in lexicographic order.
    let mut chosen = Vec::with_capacity(d.k as usize);
    let mut next = 0u64;
    while (chosen.len() as u64) < d.k {
        let remaining = d.k - chosen.len() as u64;
        let block = binomial(cyl - next - 1, remaining - 1);
        if t_rank < block {
            chosen.push(next);
        } else {
            t_rank -= block;
        }
        next += 1;
    }

    let mut variants = vec![0usize; cyl as usize];
    for i in (0..cyl as usize).rev() {
        let r = BigUint::from(if chosen.contains(&(i as u64)) { in_r } else { out_r });
        variants[i] = (&v_rank % &r).to_usize().unwrap();
        v_rank /= r;
    }
    let t: Vec<Word> = chosen.iter().map(|&i| Word::from_lex_index(d.level, i)).collect();
    optimal_set(n, &t, Some(&variants))
}

/// The first `limit` optimal sets in enumeration order.
pub fn enumerate_optimal(n: u64, limit: usize) -> Result<Vec<OptimalSet>> {
    let total = enumeration_len(n)?;
    let take = total.to_usize().map_or(limit, |t| t.min(limit));
    (0..take).map(|i| optimal_by_index(n, &BigUint::from(i))).collect()
}

/// Optimal sets with `t` fixed: every variant map for that subset.
pub fn enumerate_with_t(n: u64, t: &[Word], limit: usize) -> Result<Vec<OptimalSet>> {
    let d = decompose_any(n)?;
    let t = validate_t(&d, t)?;
    let (out_r, in_r) = radices(&d);
    let cyl = if d.level == 0 { 1 } else { d.cylinders() as usize };
    let radix: Vec<usize> = (0..cyl)
        .map(|i| if t.iter().any(|w| w.lex_index() as usize == i) { in_r } else { out_r })
        .collect();
    let mut out = Vec::new();
    let mut digits = vec![0usize; cyl];
    loop {
        if out.len() >= limit {
            break;
        }
        out.push(optimal_set(n, &t, Some(&digits))?);
        let mut i = cyl;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < radix[i] {
                break;
            }
            digits[i] = 0;
        }
    }
    Ok(out)
}
