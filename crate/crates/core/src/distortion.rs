//! Distortion of arbitrary codebooks: certified intervals from recursive
//! cylinder descent, exact Voronoi-cell centroids, and exact Lloyd iteration
//! on atomic discretizations.

use std::fmt;

use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{corner_sets, resolve_half, resolve_square, CellAssignment, Codebook};
use crate::measure::{
    cell_point_distortion, cylinder_point_distortion, half_cell_point_distortion, side_at, variance,
    word_apply, GridCell, Half, WeightedPoint, Word, MAX_GRID_DEPTH,
};
use crate::point::{rat, Point, Rational};

/// Rational upper bound on √2/2, used for the half-diagonal of a cylinder.
pub fn half_diagonal_factor() -> Rational {
    rat(17, 24)
}

/// Levels of the descent that are split across threads.
const PAR_LEVELS: u32 = 3;

/// A certified enclosure `lo ≤ value ≤ hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn exact(v: Rational) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// A region of the partition produced by the descent.
#[derive(Debug, Clone)]
enum Piece {
    Cell(GridCell, usize),
    Half(GridCell, Half, usize),
    Open(GridCell),
}

fn check_depth(depth_cap: u32) -> Result<()> {
    if depth_cap > MAX_GRID_DEPTH {
        return Err(Error::DepthTooLarge { depth: depth_cap, max: MAX_GRID_DEPTH });
    }
    Ok(())
}

/// Splits the carpet into cylinders (and, with `halves`, diagonal halves of
/// cylinders) that each lie in one closed Voronoi cell. Cylinders still
/// ambiguous at `depth_cap` come back as `Piece::Open`. The output order is
/// the sequential depth-first order regardless of threading.
fn partition(codebook: &Codebook, depth_cap: u32, halves: bool) -> Vec<Piece> {
    fn go(cb: &Codebook, cell: GridCell, cap: u32, halves: bool, out: &mut Vec<Piece>) {
        let sets = corner_sets(cb, &cell);
        if let CellAssignment::Resolved(j) = resolve_square(&sets) {
            out.push(Piece::Cell(cell, j));
            return;
        }
        if halves {
            for half in [Half::BelowMain, Half::BelowAnti] {
                let a = resolve_half(&sets, half);
                let b = resolve_half(&sets, half.opposite());
                if let (CellAssignment::Resolved(i), CellAssignment::Resolved(j)) = (a, b) {
                    out.push(Piece::Half(cell, half, i));
                    out.push(Piece::Half(cell, half.opposite(), j));
                    return;
                }
            }
        }
        if cell.depth >= cap {
            out.push(Piece::Open(cell));
            return;
        }
        if cell.depth < PAR_LEVELS {
            let parts: Vec<Vec<Piece>> = cell
                .children()
                .into_par_iter()
                .map(|child| {
                    let mut v = Vec::new();
                    go(cb, child, cap, halves, &mut v);
                    v
                })
                .collect();
            out.extend(parts.into_iter().flatten());
        } else {
            for child in cell.children() {
                go(cb, child, cap, halves, out);
            }
        }
    }
    let mut out = Vec::new();
    go(codebook, GridCell::root(), depth_cap, halves, &mut out);
    out
}

/// Smallest-effort rational `s ≥ √q`.
fn sqrt_upper(q: &Rational) -> Rational {
    if q.is_zero() {
        return Rational::zero();
    }
    let approx = q.to_f64().unwrap_or(f64::MAX).sqrt();
    let mut s = Rational::from_float(approx * (1.0 + 1e-12)).unwrap_or_else(|| q.clone() + Rational::one());
    while &(&s * &s) < q {
        s = &s * rat(1_000_001, 1_000_000) + rat(1, 1_000_000_000);
    }
    s
}

/// Certified `[lo, hi] ∋ ∫ min_a ‖x − a‖² dP`.
///
/// Cylinders lying in a single closed Voronoi cell contribute their exact
/// closed-form integral. A cylinder still ambiguous at `depth_cap` with
/// centroid distance `d` to the codebook contributes
/// `w·[max(0, d − r)², (d + r)²]`, where `r = (17/24)·3^-K` bounds the
/// half-diagonal from above and `d` is bounded by a rational `≥ √d²`.
pub fn distortion_bounds(codebook: &Codebook, depth_cap: u32) -> Result<Interval> {
    check_depth(depth_cap)?;
    let pieces = partition(codebook, depth_cap, false);
    let (lo, hi) = pieces
        .par_iter()
        .map(|piece| match piece {
            Piece::Cell(cell, j) => {
                let v = cell_point_distortion(cell, codebook.get(*j));
                (v.clone(), v)
            }
            Piece::Open(cell) => leaf_bracket(codebook, cell),
            Piece::Half(..) => unreachable!("halves are disabled for bounds"),
        })
        .reduce(
            || (Rational::zero(), Rational::zero()),
            |(a, b), (c, d)| (a + c, b + d),
        );
    Ok(Interval::new(lo, hi))
}

fn leaf_bracket(codebook: &Codebook, cell: &GridCell) -> (Rational, Rational) {
    let c = cell.centroid();
    let j = codebook.minimizers(&c, cell.centroid_f64())[0];
    let d2 = c.dist2(codebook.get(j));
    let d_hat = sqrt_upper(&d2);
    let r = half_diagonal_factor() * side_at(cell.depth);
    let r2 = &r * &r;
    let cross = Rational::from_integer(BigInt::from(2)) * &d_hat * &r;
    let w = cell.weight();
    let lo = if d2 <= r2 {
        Rational::zero()
    } else {
        let v = &d2 - &cross + &r2;
        if v.is_negative() { Rational::zero() } else { v }
    };
    let hi = &d2 + &cross + &r2;
    (&w * lo, &w * hi)
}

/// Exact distortion, using the diagonal half-split wherever a cylinder's
/// two triangular halves each fall in one cell. Fails if anything is still
/// ambiguous at `depth_cap`.
pub fn exact_distortion(codebook: &Codebook, depth_cap: u32) -> Result<Rational> {
    check_depth(depth_cap)?;
    let pieces = partition(codebook, depth_cap, true);
    pieces
        .par_iter()
        .map(|piece| match piece {
            Piece::Cell(cell, j) => Ok(cell_point_distortion(cell, codebook.get(*j))),
            Piece::Half(cell, half, j) => Ok(half_cell_point_distortion(cell, *half, codebook.get(*j))),
            Piece::Open(_) => Err(Error::Ambiguous { depth: depth_cap }),
        })
        .try_reduce(Rational::zero, |a, b| Ok(a + b))
}

/// `Σ_σ ∫_{J_σ} ‖x − point‖² dP` over pairwise non-overlapping words; with
/// `include_variance_terms = false` the `9^-k V` parts are dropped and only
/// the centroid terms `4^-k ‖S_σ(1/2,1/2) − point‖²` are summed.
pub fn partial_sum_lower_bound(point: &Point, words: &[Word], include_variance_terms: bool) -> Result<Rational> {
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            if a.extends(b) || b.extends(a) {
                return Err(Error::OverlappingWords(a.to_string(), b.to_string()));
            }
        }
    }
    Ok(words
        .iter()
        .map(|w| {
            if include_variance_terms {
                cylinder_point_distortion(w, point)
            } else {
                let k = w.len() as u32;
                crate::measure::weight_at(k) * word_apply(w, &Point::center()).dist2(point)
            }
        })
        .sum())
}

/// Exact centroid and mass of every Voronoi cell.
pub fn cell_centroids(codebook: &Codebook, depth_cap: u32) -> Result<Vec<(Point, Rational)>> {
    check_depth(depth_cap)?;
    let n = codebook.len();
    let mut mass = vec![Rational::zero(); n];
    let mut moment = vec![Point::origin(); n];
    let half_moments: Vec<(Half, Point)> = Half::ALL.iter().map(|&h| (h, h.moments().0)).collect();
    for piece in partition(codebook, depth_cap, true) {
        match piece {
            Piece::Cell(cell, j) => {
                let w = cell.weight();
                moment[j] = moment[j].add(&cell.centroid().scale(&w));
                mass[j] += w;
            }
            Piece::Half(cell, half, j) => {
                let w = cell.weight() / Rational::from_integer(2.into());
                let c = &half_moments.iter().find(|(h, _)| *h == half).unwrap().1;
                moment[j] = moment[j].add(&cell.map_point(c).scale(&w));
                mass[j] += w;
            }
            Piece::Open(_) => return Err(Error::Ambiguous { depth: depth_cap }),
        }
    }
    mass.into_iter()
        .zip(moment)
        .enumerate()
        .map(|(site, (m, mom))| {
            if m.is_zero() {
                Err(Error::DegenerateCell { site })
            } else {
                Ok((mom.scale(&m.recip()), m))
            }
        })
        .collect()
}

/// Conditional mean `E(X | X ∈ M(a_site | α))` and the cell mass.
pub fn cell_centroid(codebook: &Codebook, site: usize, depth_cap: u32) -> Result<(Point, Rational)> {
    if site >= codebook.len() {
        return Err(Error::SiteOutOfRange { site, len: codebook.len() });
    }
    let mut all = cell_centroids(codebook, depth_cap)?;
    Ok(all.swap_remove(site))
}

/// True iff every site is exactly the centroid of its own cell.
pub fn is_cvt(codebook: &Codebook, depth_cap: u32) -> Result<bool> {
    let centroids = cell_centroids(codebook, depth_cap)?;
    Ok(centroids.iter().zip(codebook.points()).all(|((c, _), p)| c == p))
}

/// How atoms equidistant from several sites are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    /// The whole atom goes to the lowest-index nearest site.
    #[default]
    LowestIndex,
    /// The atom's mass is shared equally among all nearest sites.
    Split,
}

#[derive(Debug, Clone, Copy)]
struct IntAtom {
    x: i128,
    y: i128,
    m: i128,
}

/// A finite atomic measure stored on a common integer grid: coordinates
/// `x / coord_den`, masses `m / mass_den`. Lloyd sums then run in `i128`.
#[derive(Debug, Clone)]
pub struct AtomMeasure {
    coord_den: i128,
    mass_den: i128,
    atoms: Vec<IntAtom>,
    exact: Vec<Point>,
    approx: Vec<(f64, f64)>,
}

fn lcm_i128(a: i128, b: i128) -> Option<i128> {
    let g = num::integer::gcd(a, b);
    (a / g).checked_mul(b)
}

fn big_to_i128(v: &BigInt) -> Result<i128> {
    v.to_i128().ok_or_else(|| Error::Overflow(format!("{v} does not fit in i128")))
}

impl AtomMeasure {
    pub fn new(atoms: &[WeightedPoint]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidCodebook("empty atom list".into()));
        }
        let overflow = || Error::Overflow("atom denominators too large".into());
        let mut coord_den = 1i128;
        let mut mass_den = 1i128;
        for a in atoms {
            if !a.mass.is_positive() {
                return Err(Error::InvalidCodebook("atom masses must be positive".into()));
            }
            coord_den = lcm_i128(coord_den, big_to_i128(a.point.x.denom())?).ok_or_else(overflow)?;
            coord_den = lcm_i128(coord_den, big_to_i128(a.point.y.denom())?).ok_or_else(overflow)?;
            mass_den = lcm_i128(mass_den, big_to_i128(a.mass.denom())?).ok_or_else(overflow)?;
        }
        let d = Rational::from_integer(BigInt::from(coord_den));
        let m = Rational::from_integer(BigInt::from(mass_den));
        let mut int_atoms = Vec::with_capacity(atoms.len());
        let mut total = 0i128;
        let mut max_abs = 0i128;
        for a in atoms {
            let x = big_to_i128((&a.point.x * &d).numer())?;
            let y = big_to_i128((&a.point.y * &d).numer())?;
            let mi = big_to_i128((&a.mass * &m).numer())?;
            total = total.checked_add(mi).ok_or_else(overflow)?;
            max_abs = max_abs.max(x.abs()).max(y.abs());
        int_atoms.push(IntAtom { x, y, m: mi });
        }
        if total != mass_den {
            return Err(Error::InvalidCodebook("atom masses do not sum to 1".into()));
        }
        // Every partial sum is bounded by mass_den * 2 * max_abs^2.
        let bound = max_abs
            .checked_mul(max_abs)
            .and_then(|v| v.checked_mul(2))
            .and_then(|v| v.checked_mul(mass_den))
            .and_then(|v| v.checked_mul(4));
        if bound.is_none() {
            return Err(overflow());
        }
        Ok(AtomMeasure {
            coord_den,
            mass_den,
            atoms: int_atoms,
            exact: atoms.iter().map(|a| a.point.clone()).collect(),
            approx: atoms.iter().map(|a| a.point.to_f64()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.exact
    }

    pub fn approx_points(&self) -> &[(f64, f64)] {
        &self.approx
    }

    pub fn mass_f64(&self, i: usize) -> f64 {
        self.atoms[i].m as f64 / self.mass_den as f64
    }

    /// One assignment pass: returns the distortion of `codebook` on this
    /// measure together with the per-site cell moments.
    fn assign(&self, codebook: &Codebook, rule: TieRule) -> CellSums {
        let n = codebook.len();
        let chunk = 256;
        self.atoms
            .par_chunks(chunk)
            .enumerate()
            .map(|(ci, atoms)| {
                let mut sums = CellSums::new(n);
                for (k, atom) in atoms.iter().enumerate() {
                    let idx = ci * chunk + k;
                    let near = codebook.minimizers(&self.exact[idx], self.approx[idx]);
                    if near.len() == 1 || rule == TieRule::LowestIndex {
                        sums.add_int(near[0], atom);
                    } else {
                        let share = self.rational_mass(atom) / Rational::from_integer(BigInt::from(near.len()));
                        for &j in &near {
                            sums.add_share(j, &share, &self.exact[idx]);
                        }
                    }
                }
                sums
            })
            .reduce(|| CellSums::new(n), CellSums::merge)
    }

    fn rational_mass(&self, atom: &IntAtom) -> Rational {
        Rational::new(BigInt::from(atom.m), BigInt::from(self.mass_den))
    }

    fn finish(&self, codebook: &Codebook, sums: &CellSums) -> (Rational, Vec<Option<(Point, Rational)>>) {
        let d = Rational::from_integer(BigInt::from(self.coord_den));
        let m = Rational::from_integer(BigInt::from(self.mass_den));
        let dm = &d * &m;
        let ddm = &d * &dm;
        let mut distortion = Rational::zero();
        let mut cells = Vec::with_capacity(codebook.len());
        for (j, a) in codebook.points().iter().enumerate() {
            let s = &sums.int[j];
            let r = &sums.shared[j];
            let mass = Rational::from_integer(BigInt::from(s.m)) / &m + &r.m;
            if mass.is_zero() {
                cells.push(None);
                continue;
            }
            let mx = Rational::from_integer(BigInt::from(s.mx)) / &dm + &r.mx;
            let my = Rational::from_integer(BigInt::from(s.my)) / &dm + &r.my;
            let m2 = Rational::from_integer(BigInt::from(s.m2)) / &ddm + &r.m2;
            let two = Rational::from_integer(BigInt::from(2));
            distortion += &m2 - two * (&a.x * &mx + &a.y * &my) + a.norm2() * &mass;
            cells.push(Some((Point::new(mx / &mass, my / &mass), mass)));
        }
        (distortion, cells)
    }

    /// `Σ mass · min_a ‖x − a‖²`, exact.
    pub fn distortion(&self, codebook: &Codebook) -> Rational {
        let sums = self.assign(codebook, TieRule::LowestIndex);
        self.finish(codebook, &sums).0
    }

    /// Distortion of `codebook` and the Lloyd update computed from the same
    /// assignment.
    pub fn step(&self, codebook: &Codebook, rule: TieRule) -> Result<(Rational, Codebook)> {
        let sums = self.assign(codebook, rule);
        let (distortion, cells) = self.finish(codebook, &sums);
        let points = cells
            .into_iter()
            .enumerate()
            .map(|(site, c)| c.map(|(p, _)| p).ok_or(Error::DegenerateCell { site }))
            .collect::<Result<Vec<_>>>()?;
        Ok((distortion, Codebook::new(points)?))
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct IntSums {
    m: i128,
    mx: i128,
    my: i128,
    m2: i128,
}

#[derive(Debug, Clone)]
struct RatSums {
    m: Rational,
    mx: Rational,
    my: Rational,
    m2: Rational,
}

impl Default for RatSums {
    fn default() -> Self {
        RatSums { m: Rational::zero(), mx: Rational::zero(), my: Rational::zero(), m2: Rational::zero() }
    }
}

#[derive(Debug, Clone)]
struct CellSums {
    int: Vec<IntSums>,
    shared: Vec<RatSums>,
}

impl CellSums {
    fn new(n: usize) -> Self {
        CellSums { int: vec![IntSums::default(); n], shared: vec![RatSums::default(); n] }
    }

    fn add_int(&mut self, j: usize, a: &IntAtom) {
        let s = &mut self.int[j];
        s.m += a.m;
        s.mx += a.m * a.x;
        s.my += a.m * a.y;
        s.m2 += a.m * (a.x * a.x + a.y * a.y);
    }

    fn add_share(&mut self, j: usize, share: &Rational, p: &Point) {
        let s = &mut self.shared[j];
        s.m += share;
        s.mx += share * &p.x;
        s.my += share * &p.y;
        s.m2 += share * p.norm2();
    }

    fn merge(mut self, other: CellSums) -> CellSums {
        for (a, b) in self.int.iter_mut().zip(other.int) {
            a.m += b.m;
            a.mx += b.mx;
            a.my += b.my;
            a.m2 += b.m2;
        }
        for (a, b) in self.shared.iter_mut().zip(other.shared) {
            a.m += b.m;
            a.mx += b.mx;
            a.my += b.my;
            a.m2 += b.m2;
        }
        self
    }
}

/// Replaces every site by the mass-weighted mean of the atoms assigned to
/// it (ties to the lowest index).
pub fn lloyd_step(codebook: &Codebook, atoms: &[WeightedPoint]) -> Result<Codebook> {
    Ok(AtomMeasure::new(atoms)?.step(codebook, TieRule::LowestIndex)?.1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LloydReport {
    pub codebook: Codebook,
    /// Distortion of `codebook` on the atom measure.
    pub distortion: Rational,
    /// Number of assignment/update passes performed.
    pub iterations: usize,
    /// True when the last pass left the codebook unchanged.
    pub converged: bool,
    /// Distortion of every codebook visited, starting with the initial one.
    pub history: Vec<Rational>,
}

pub fn lloyd_run(initial: &Codebook, atoms: &[WeightedPoint], max_iter: usize) -> Result<LloydReport> {
    lloyd_run_on(initial, &AtomMeasure::new(atoms)?, max_iter, TieRule::LowestIndex)
}

/// Iterates Lloyd updates until the codebook is exactly unchanged or
/// `max_iter` passes have been made.
pub fn lloyd_run_on(initial: &Codebook, measure: &AtomMeasure, max_iter: usize, rule: TieRule) -> Result<LloydReport> {
    let mut current = initial.clone();
    let mut history = Vec::new();
    for iteration in 1..=max_iter {
        let (distortion, next) = measure.step(&current, rule)?;
        history.push(distortion.clone());
        if next == current {
            return Ok(LloydReport { codebook: current, distortion, iterations: iteration, converged: true, history });
        }
        current = next;
    }
    let distortion = match rule {
        TieRule::LowestIndex => measure.distortion(&current),
        TieRule::Split => measure.step(&current, rule).map(|(d, _)| d)?,
    };
    history.push(distortion.clone());
    Ok(LloydReport { codebook: current, distortion, iterations: max_iter, converged: false, history })
}

/// `V · 9^-k`: exact gap between the true distortion and the depth-`k`
/// atom distortion for codebooks whose cells are unions of cylinders.
pub fn discretization_gap(k: u32) -> Rational {
    variance() * side_at(k).pow(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::atoms;
    use crate::point::int;

    fn book(pts: &[(i64, i64, i64, i64)]) -> Codebook {
        Codebook::new(pts.iter().map(|&(a, b, c, d)| Point::frac(a, b, c, d)).collect()).unwrap()
    }

    fn alpha3() -> Codebook {
        book(&[(1, 6, 1, 6), (5, 6, 1, 6), (1, 2, 5, 6)])
    }

    fn beta3() -> Codebook {
        book(&[(5, 6, 5, 6), (13, 90, 19, 30), (19, 30, 13, 90)])
    }

    fn words(list: &str) -> Vec<Word> {
        list.split(',').map(|w| Word::parse(w).unwrap()).collect()
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(distortion_bounds(&book(&[(1, 2, 1, 2)]), 1).unwrap(), Interval::exact(rat(1, 4)));
        assert_eq!(distortion_bounds(&book(&[(1, 6, 1, 2), (5, 6, 1, 2)]), 2).unwrap(), Interval::exact(rat(5, 36)));
        assert_eq!(distortion_bounds(&alpha3(), 2).unwrap(), Interval::exact(rat(1, 12)));
    }

    #[test]
    fn bounds_bracket_when_unresolved() {
        let diag = book(&[(7, 10, 3, 10), (3, 10, 7, 10)]);
        let b = distortion_bounds(&diag, 4).unwrap();
        assert!(!b.is_exact());
        assert!(b.contains(&rat(17, 100)));
        let tighter = distortion_bounds(&diag, 6).unwrap();
        assert!(tighter.lo >= b.lo && tighter.hi <= b.hi);
        assert!(distortion_bounds(&diag, 40).is_err());
    }

    #[test]
    fn sqrt_upper_is_an_upper_bound() {
        for (n, d) in [(2, 1), (1, 3), (17, 100), (1, 1_000_000_007), (0, 1)] {
            let q = rat(n, d);
            let s = sqrt_upper(&q);
            assert!(&s * &s >= q);
            assert!(to_f(&s) <= (n as f64 / d as f64).sqrt() * (1.0 + 1e-9) + 1e-300);
        }
    }

    fn to_f(q: &Rational) -> f64 {
        q.to_f64().unwrap()
    }

    #[test]
    fn partial_sums() {
        let p = Point::frac(1, 6, 1, 6);
        assert_eq!(partial_sum_lower_bound(&p, &words("1"), true).unwrap(), rat(1, 144));
        let err = partial_sum_lower_bound(&p, &words("1,13"), true).unwrap_err();
        assert_eq!(err, Error::OverlappingWords("1".into(), "13".into()));
        assert!(partial_sum_lower_bound(&p, &[Word::empty(), Word::parse("2").unwrap()], true).is_err());
    }

    #[test]
    fn centroid_examples() {
        let two = book(&[(1, 6, 1, 2), (5, 6, 1, 2)]);
        assert_eq!(cell_centroid(&two, 0, 1).unwrap(), (Point::frac(1, 6, 1, 2), rat(1, 2)));
        assert_eq!(cell_centroid(&alpha3(), 2, 1).unwrap(), (Point::frac(1, 2, 5, 6), rat(1, 2)));
        assert_eq!(cell_centroid(&book(&[(1, 2, 1, 2)]), 0, 0).unwrap(), (Point::center(), int(1)));
        assert_eq!(cell_centroid(&alpha3(), 3, 1), Err(Error::SiteOutOfRange { site: 3, len: 3 }));
        assert_eq!(cell_centroid(&alpha3(), 0, 0), Err(Error::Ambiguous { depth: 0 }));
    }

    #[test]
    fn cvt_examples() {
        assert!(is_cvt(&alpha3(), 2).unwrap());
        assert!(is_cvt(&book(&[(1, 2, 1, 2)]), 0).unwrap());
        assert!(!is_cvt(&book(&[(1, 4, 1, 2), (3, 4, 1, 2)]), 4).unwrap());
        assert!(is_cvt(&beta3(), 12).unwrap());
        assert!(is_cvt(&book(&[(7, 10, 3, 10), (3, 10, 7, 10)]), 3).unwrap());
    }

    #[test]
    fn exact_distortion_with_half_split() {
        assert_eq!(exact_distortion(&alpha3(), 2).unwrap(), rat(1, 12));
        assert_eq!(exact_distortion(&book(&[(7, 10, 3, 10), (3, 10, 7, 10)]), 2).unwrap(), rat(17, 100));
        let b = exact_distortion(&beta3(), 4).unwrap();
        assert_eq!(b, rat(233, 2700));
        assert!(distortion_bounds(&beta3(), 8).unwrap().contains(&b));
    }

    #[test]
    fn lloyd_step_examples() {
        let a4 = atoms(4).unwrap();
        let two = book(&[(1, 6, 1, 2), (5, 6, 1, 2)]);
        assert_eq!(lloyd_step(&two, &atoms(2).unwrap()).unwrap(), two);
        let one = book(&[(1, 2, 1, 2)]);
        assert_eq!(lloyd_step(&one, &atoms(1).unwrap()).unwrap(), one);
        let corners = book(&[(0, 1, 0, 1), (1, 1, 1, 1)]);
        assert_eq!(lloyd_step(&corners, &atoms(1).unwrap()).unwrap(), book(&[(7, 18, 7, 18), (5, 6, 5, 6)]));
        let far = book(&[(1, 2, 1, 2), (0, 1, 1, 100)]);
        let far_atoms = vec![WeightedPoint { point: Point::frac(1, 2, 1, 2), mass: int(1) }];
        assert_eq!(lloyd_step(&far, &far_atoms), Err(Error::DegenerateCell { site: 1 }));
        assert!(lloyd_step(&two, &a4).is_ok());
    }

    #[test]
    fn lloyd_run_examples() {
        let a4 = atoms(4).unwrap();
        let two = book(&[(1, 6, 1, 2), (5, 6, 1, 2)]);
        let r = lloyd_run(&two, &a4, 100).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.codebook, two);
        assert_eq!(r.distortion, rat(5, 36) - discretization_gap(4));

        let r = lloyd_run(&book(&[(1, 4, 1, 2), (3, 4, 1, 2)]), &a4, 100).unwrap();
        assert!(r.converged);
        assert_eq!(r.codebook, two);

        let r = lloyd_run(&book(&[(3, 7, 2, 11)]), &atoms(3).unwrap(), 100).unwrap();
        assert_eq!(r.codebook, book(&[(1, 2, 1, 2)]));
        assert_eq!(r.iterations, 2);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn lloyd_run_respects_max_iter() {
        let r = lloyd_run(&book(&[(0, 1, 0, 1), (1, 1, 1, 1), (1, 1, 0, 1)]), &atoms(3).unwrap(), 1).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(!r.converged);
        assert_eq!(r.history.len(), 2);
        assert!(r.history[1] < r.history[0]);
    }

    #[test]
    fn split_rule_shares_tied_atoms() {
        let diag = book(&[(7, 10, 3, 10), (3, 10, 7, 10)]);
        let m = AtomMeasure::new(&atoms(1).unwrap()).unwrap();
        // Atoms (1/6,1/6) and (5/6,5/6) sit on the bisector.
        let (_, next) = m.step(&diag, TieRule::Split).unwrap();
        assert_eq!(next, book(&[(2, 3, 1, 3), (1, 3, 2, 3)]));
        let (_, lowest) = m.step(&diag, TieRule::LowestIndex).unwrap();
        assert_eq!(lowest, book(&[(11, 18, 7, 18), (1, 6, 5, 6)]));
    }

    #[test]
    fn atom_measure_rejects_bad_masses() {
        let bad = vec![WeightedPoint { point: Point::center(), mass: rat(1, 2) }];
        assert!(AtomMeasure::new(&bad).is_err());
        assert!(AtomMeasure::new(&[]).is_err());
    }
}
