//! Brute-force cross-checks: seeded multi-start Lloyd on depth-`k` atoms.
//!
//! Restart `r` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `r`,
//! so every restart is reproducible on its own and independent of thread
//! scheduling.

use num::bigint::BigUint;
use num::ToPrimitive;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distortion::{
    discretization_gap, distortion_bounds, exact_distortion, is_cvt, lloyd_run_on, partial_sum_lower_bound,
    AtomMeasure, Interval, LloydReport, TieRule,
};
use crate::error::{Error, Result};
use crate::geometry::Codebook;
use crate::measure::{atoms, Word};
use crate::optimal::{enumerate_optimal, enumeration_len};
use crate::point::{rat, Point, Rational};

/// L∞ tolerance for declaring two codebooks equal up to relabeling.
pub const MATCH_TOL: f64 = 1e-6;

/// Optimal sets are only searched when there are at most this many.
pub const MATCH_ENUMERATION_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    pub n: usize,
    pub depth: u32,
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
}

impl OracleConfig {
    pub fn new(n: usize, depth: u32, restarts: usize, seed: u64) -> Self {
        OracleConfig { n, depth, restarts, seed, max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RestartOutcome {
    Finished(LloydReport),
    /// Some site lost all its atoms.
    Degenerate { site: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub config: OracleConfig,
    pub best: LloydReport,
    pub best_restart: usize,
    /// `best.distortion + (1/4)·9^-k`.
    pub corrected_distortion: Rational,
    /// Index into `enumerate_optimal(n, ·)` of the matched optimal set.
    pub matched_optimal: Option<usize>,
    /// Bottleneck L∞ distance to the matched set.
    pub match_distance: Option<f64>,
    pub degenerate_restarts: usize,
    /// Restarts whose final codebook matches some optimal set; `None` when
    /// the optimal sets were not enumerated.
    pub optimal_restarts: Option<usize>,
    pub outcomes: Vec<RestartOutcome>,
}

/// k-means++ seeding: first atom uniform by mass, then by mass times squared
/// distance to the nearest chosen atom. Chosen atoms have weight zero, so
/// sampling is without replacement.
pub fn seed_codebook(measure: &AtomMeasure, n: usize, rng: &mut impl Rng) -> Result<Codebook> {
    let pts = measure.approx_points();
    let masses: Vec<f64> = (0..measure.len()).map(|i| measure.mass_f64(i)).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut d2 = vec![f64::INFINITY; pts.len()];
    while chosen.len() < n {
        let weights: Vec<f64> = if chosen.is_empty() {
            masses.clone()
        } else {
            masses.iter().zip(&d2).map(|(m, d)| m * d).collect()
        };
        let next = match WeightedIndex::new(&weights) {
            Ok(dist) => dist.sample(rng),
            // Every remaining atom coincides with a chosen one in f64.
            Err(_) => (0..pts.len())
                .find(|i| !chosen.contains(i))
                .ok_or_else(|| Error::InvalidConfig("not enough atoms".into()))?,
        };
        chosen.push(next);
        let (cx, cy) = pts[next];
        for (d, &(x, y)) in d2.iter_mut().zip(pts) {
            *d = d.min((x - cx).powi(2) + (y - cy).powi(2));
        }
    }
    Codebook::new(chosen.iter().map(|&i| measure.points()[i].clone()).collect())
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Bottleneck matching: the smallest `t` such that some bijection pairs
/// points at L∞ distance `≤ t`. `None` when the sizes differ.
pub fn match_distance(a: &Codebook, b: &Codebook) -> Option<f64> {
    let n = a.len();
    if n != b.len() {
        return None;
    }
    let dist: Vec<Vec<f64>> = a.points().iter().map(|p| b.points().iter().map(|q| p.linf_f64(q)).collect()).collect();
    let mut levels: Vec<f64> = dist.iter().flatten().cloned().collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let (mut lo, mut hi) = (0, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(&dist, levels[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(levels[lo])
}

fn perfect_matching(dist: &[Vec<f64>], t: f64) -> bool {
    fn augment(u: usize, dist: &[Vec<f64>], t: f64, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for v in 0..dist.len() {
            if dist[u][v] <= t && !seen[v] {
                seen[v] = true;
                if owner[v].is_none_or(|w| augment(w, dist, t, seen, owner)) {
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; dist.len()];
    (0..dist.len()).all(|u| augment(u, dist, t, &mut vec![false; dist.len()], &mut owner))
}

fn find_match(codebook: &Codebook, optima: &[Codebook]) -> Option<(usize, f64)> {
    optima
        .iter()
        .enumerate()
        .filter_map(|(i, o)| match_distance(codebook, o).map(|d| (i, d)))
        .filter(|&(_, d)| d <= MATCH_TOL)
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

pub fn brute_force(config: &OracleConfig) -> Result<OracleResult> {
    if config.n == 0 || config.restarts == 0 {
        return Err(Error::InvalidConfig("n and restarts must be positive".into()));
    }
    let atom_count = 1u128 << (2 * config.depth);
    if config.n as u128 > atom_count {
        return Err(Error::InvalidConfig(format!(
            "n = {} exceeds the {atom_count} atoms at depth {}",
            config.n, config.depth
        )));
    }
    let measure = AtomMeasure::new(&atoms(config.depth)?)?;
    let outcomes: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(config.seed, r);
            let init = seed_codebook(&measure, config.n, &mut rng)?;
            match lloyd_run_on(&init, &measure, config.max_iter, TieRule::LowestIndex) {
                Ok(report) => Ok(RestartOutcome::Finished(report)),
                Err(Error::DegenerateCell { site }) => Ok(RestartOutcome::Degenerate { site }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let (best_restart, best) = outcomes
        .iter()
        .enumerate()
        .filter_map(|(i, o)| match o {
            RestartOutcome::Finished(r) => Some((i, r)),
            RestartOutcome::Degenerate { .. } => None,
        })
        .min_by(|a, b| a.1.distortion.cmp(&b.1.distortion).then(a.0.cmp(&b.0)))
        .ok_or_else(|| Error::InvalidConfig("every restart ended in a degenerate cell".into()))?;
    let best = best.clone();
    let degenerate_restarts = outcomes.iter().filter(|o| matches!(o, RestartOutcome::Degenerate { .. })).count();

    let optima: Option<Vec<Codebook>> = match enumeration_len(config.n as u64)?.to_usize() {
        Some(len) if len <= MATCH_ENUMERATION_LIMIT => Some(
            enumerate_optimal(config.n as u64, len)?.into_iter().map(|s| s.codebook).collect(),
        ),
        _ => None,
    };
    let matched = optima.as_ref().and_then(|o| find_match(&best.codebook, o));
    let optimal_restarts = optima.as_ref().map(|o| {
        outcomes
            .par_iter()
            .filter(|out| match out {
                RestartOutcome::Finished(r) => find_match(&r.codebook, o).is_some(),
                RestartOutcome::Degenerate { .. } => false,
            })
            .count()
    });

    Ok(OracleResult {
        config: config.clone(),
        corrected_distortion: &best.distortion + discretization_gap(config.depth),
        best,
        best_restart,
        matched_optimal: matched.map(|m| m.0),
        match_distance: matched.map(|m| m.1),
        degenerate_restarts,
        optimal_restarts,
        outcomes,
    })
}

/// Fifteen disjoint cylinders under the point (7/10, 3/10).
pub const DIAGONAL_WORDS: [&str; 15] = [
    "2", "12", "42", "112", "412", "142", "442", "1112", "1412", "1142", "1442", "4112", "4412", "4142", "4442",
];

/// Twenty-two disjoint cylinders under the point (13/90, 19/30).
pub const BETA3_WORDS: [&str; 22] = [
    "3", "13", "113", "143", "1113", "1143", "1413", "1443", "11113", "11143", "11413", "11443", "14113", "14143",
    "14413", "14443", "111113", "111143", "111413", "111443", "114113", "114143",
];

pub fn diagonal_cvt() -> Codebook {
    Codebook::new(vec![Point::frac(7, 10, 3, 10), Point::frac(3, 10, 7, 10)]).unwrap()
}

pub fn beta3() -> Codebook {
    Codebook::new(vec![Point::frac(5, 6, 5, 6), Point::frac(13, 90, 19, 30), Point::frac(19, 30, 13, 90)]).unwrap()
}

pub fn parse_words(words: &[&str]) -> Vec<Word> {
    words.iter().map(|w| Word::parse(w).expect("static word list")).collect()
}

/// `2·Σ` over the diagonal word family at (7/10, 3/10).
pub fn diagonal_partial_sum() -> Rational {
    let s = partial_sum_lower_bound(&Point::frac(7, 10, 3, 10), &parse_words(&DIAGONAL_WORDS), true).unwrap();
    rat(2, 1) * s
}

/// `V/36 + 2·Σ` over the β_3 word family at (13/90, 19/30).
pub fn beta3_partial_sum() -> Rational {
    let s = partial_sum_lower_bound(&Point::frac(13, 90, 19, 30), &parse_words(&BETA3_WORDS), true).unwrap();
    rat(1, 144) + rat(2, 1) * s
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrapCase {
    pub start: Codebook,
    /// CVT on the true measure under the diagonal half-split rule.
    pub is_cvt: bool,
    pub exact_distortion: Rational,
    pub bounds: Interval,
    /// Lower bound from a fixed family of cylinders.
    pub partial_sum: Rational,
    /// Split-tie Lloyd on depth-`k` atoms, started at `start`.
    pub lloyd: LloydReport,
    /// Bottleneck L∞ distance from `start` to the Lloyd limit.
    pub drift: f64,
    pub corrected_distortion: Rational,
    /// Error of the true optimum this configuration competes with.
    pub optimum: Rational,
}

impl TrapCase {
    pub fn is_trap(&self) -> bool {
        self.is_cvt && self.corrected_distortion > self.optimum && self.bounds.lo > self.optimum
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalTrapReport {
    pub depth: u32,
    pub diagonal: TrapCase,
    pub beta3: TrapCase,
    pub alpha3_distortion: Rational,
}

fn trap_case(start: Codebook, measure: &AtomMeasure, k: u32, bounds_depth: u32, partial: Rational, optimum: Rational) -> Result<TrapCase> {
    let lloyd = lloyd_run_on(&start, measure, 200, TieRule::Split)?;
    let drift = match_distance(&start, &lloyd.codebook).unwrap();
    Ok(TrapCase {
        is_cvt: is_cvt(&start, bounds_depth)?,
        exact_distortion: exact_distortion(&start, bounds_depth)?,
        bounds: distortion_bounds(&start, bounds_depth)?,
        partial_sum: partial,
        corrected_distortion: &lloyd.distortion + discretization_gap(k),
        drift,
        lloyd,
        optimum,
        start,
    })
}

/// Runs the diagonal two-point CVT and β_3 through the exact evaluators
/// and through split-tie Lloyd on depth-`k` atoms.
pub fn diagonal_trap_check(k: u32) -> Result<DiagonalTrapReport> {
    if k < 6 {
        return Err(Error::InvalidConfig(format!("diagonal trap check needs k ≥ 6, got {k}")));
    }
    let measure = AtomMeasure::new(&atoms(k)?)?;
    let diagonal = trap_case(diagonal_cvt(), &measure, k, 12, diagonal_partial_sum(), rat(5, 36))?;
    let beta3 = trap_case(beta3(), &measure, k, 12, beta3_partial_sum(), rat(1, 12))?;
    let alpha3 = crate::optimal::base_set(3, 0)?;
    Ok(DiagonalTrapReport { depth: k, diagonal, beta3, alpha3_distortion: exact_distortion(&alpha3, 2)? })
}

/// Total number of optimal sets, for reporting alongside a match index.
pub fn optimal_set_total(n: usize) -> Result<BigUint> {
    enumeration_len(n as u64)
}
