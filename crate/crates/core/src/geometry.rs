//! Nearest-site assignment and exact square-versus-cell classification.
//!
//! Every distance comparison is exact. An f64 pass first discards sites that
//! are clearly farther than the best one; only the survivors are compared in
//! rational arithmetic, so near-ties always get the exact answer.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::measure::{GridCell, Half};
use crate::point::{Point, Rational, Symmetry};

/// Relative slack for the f64 pre-filter. Rounding error on squared
/// distances between points of the unit square is around 1e-15.
const FILTER_TOL: f64 = 1e-9;

/// A finite set of distinct quantizer points in the unit square.
#[derive(Clone)]
pub struct Codebook {
    points: Vec<Point>,
    approx: Vec<(f64, f64)>,
}

impl PartialEq for Codebook {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl Eq for Codebook {}

impl std::hash::Hash for Codebook {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.points.hash(state);
    }
}

impl std::fmt::Debug for Codebook {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.points).finish()
    }
}

impl Codebook {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidCodebook("empty codebook".into()));
        }
        if let Some(p) = points.iter().find(|p| !p.in_unit_square()) {
            return Err(Error::InvalidCodebook(format!("{p} lies outside the unit square")));
        }
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if !seen.insert(p) {
                return Err(Error::InvalidCodebook(format!("duplicate point {p}")));
            }
        }
        let approx = points.iter().map(Point::to_f64).collect();
        Ok(Codebook { points, approx })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize) -> &Point {
        &self.points[i]
    }

    /// Image under a square symmetry; point order is preserved.
    pub fn transform(&self, g: Symmetry) -> Codebook {
        let points = self.points.iter().map(|p| g.apply(p)).collect();
        Codebook::new(points).expect("symmetries preserve distinct points in the unit square")
    }

    /// Points in sorted order, for order-insensitive comparison.
    pub fn sorted_points(&self) -> Vec<Point> {
        let mut pts = self.points.clone();
        pts.sort();
        pts
    }

    pub fn same_set(&self, other: &Codebook) -> bool {
        self.sorted_points() == other.sorted_points()
    }

    /// All indices whose sites are at minimal squared distance from `p`,
    /// ascending. `approx` must be the f64 image of `p`.
    pub(crate) fn minimizers(&self, p: &Point, approx: (f64, f64)) -> Vec<usize> {
        let d: Vec<f64> = self
            .approx
            .iter()
            .map(|&(x, y)| (x - approx.0).powi(2) + (y - approx.1).powi(2))
            .collect();
        let best = d.iter().cloned().fold(f64::INFINITY, f64::min);
        let cutoff = best + FILTER_TOL * (1.0 + best.abs());
        let candidates: Vec<usize> = (0..d.len()).filter(|&i| d[i] <= cutoff).collect();
        if candidates.len() == 1 {
            return candidates;
        }
        let exact: Vec<Rational> = candidates.iter().map(|&i| self.points[i].dist2(p)).collect();
        let min = exact.iter().min().unwrap();
        candidates.iter().zip(&exact).filter(|(_, e)| *e == min).map(|(&i, _)| i).collect()
    }
}

/// Outcome of testing a region against the Voronoi cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellAssignment {
    Resolved(usize),
    Ambiguous,
}

impl CellAssignment {
    pub fn site(self) -> Option<usize> {
        match self {
            CellAssignment::Resolved(j) => Some(j),
            CellAssignment::Ambiguous => None,
        }
    }
}

/// An axis-aligned square with exact lower-left corner and side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Square {
    pub corner: Point,
    pub side: Rational,
}

impl Square {
    pub fn new(corner: Point, side: Rational) -> Self {
        Square { corner, side }
    }

    /// Lower-left, lower-right, upper-left, upper-right.
    pub fn corners(&self) -> [Point; 4] {
        let s = &self.side;
        let c = &self.corner;
        [
            c.clone(),
            Point::new(&c.x + s, c.y.clone()),
            Point::new(c.x.clone(), &c.y + s),
            Point::new(&c.x + s, &c.y + s),
        ]
    }

    pub fn of_cell(cell: &GridCell) -> Self {
        Square::new(cell.corner(0, 0), cell.side())
    }
}

/// Index of the nearest site; ties go to the lowest index.
pub fn nearest_site(codebook: &Codebook, p: &Point) -> usize {
    codebook.minimizers(p, p.to_f64())[0]
}

/// Resolves a convex polygon (given by its vertices) to the lowest-index
/// site whose closed Voronoi cell contains every vertex, if there is one.
/// A convex cell contains the polygon iff it contains all its vertices.
pub fn classify_polygon(codebook: &Codebook, vertices: &[Point]) -> CellAssignment {
    let sets: Vec<Vec<usize>> = vertices.iter().map(|v| codebook.minimizers(v, v.to_f64())).collect();
    let refs: Vec<&[usize]> = sets.iter().map(Vec::as_slice).collect();
    lowest_common(&refs)
}

pub fn classify_square(codebook: &Codebook, square: &Square) -> CellAssignment {
    classify_polygon(codebook, &square.corners())
}

/// Minimizer sets of the four corners of a grid cell, in
/// [`GridCell::corners`] order.
pub(crate) fn corner_sets(codebook: &Codebook, cell: &GridCell) -> [Vec<usize>; 4] {
    let exact = cell.corners();
    let approx = cell.corners_f64();
    let mut it = exact.iter().zip(approx).map(|(p, a)| codebook.minimizers(p, a));
    [it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
}

pub(crate) fn resolve_square(sets: &[Vec<usize>; 4]) -> CellAssignment {
    lowest_common(&[&sets[0], &sets[1], &sets[2], &sets[3]])
}

pub(crate) fn resolve_half(sets: &[Vec<usize>; 4], half: Half) -> CellAssignment {
    let [a, b, c] = half.corner_indices();
    lowest_common(&[&sets[a], &sets[b], &sets[c]])
}

pub fn classify_cell(codebook: &Codebook, cell: &GridCell) -> CellAssignment {
    resolve_square(&corner_sets(codebook, cell))
}

fn lowest_common(sets: &[&[usize]]) -> CellAssignment {
    let (first, rest) = sets.split_first().expect("at least one vertex");
    first
        .iter()
        .find(|j| rest.iter().all(|s| s.contains(j)))
        .map_or(CellAssignment::Ambiguous, |&j| CellAssignment::Resolved(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{cylinder, Word};
    use crate::point::{int, rat};

    fn book(pts: &[(i64, i64, i64, i64)]) -> Codebook {
        Codebook::new(pts.iter().map(|&(a, b, c, d)| Point::frac(a, b, c, d)).collect()).unwrap()
    }

    fn alpha3() -> Codebook {
        book(&[(1, 6, 1, 6), (5, 6, 1, 6), (1, 2, 5, 6)])
    }

    #[test]
    fn codebook_validation() {
        assert!(Codebook::new(vec![]).is_err());
        assert!(Codebook::new(vec![Point::frac(1, 2, 1, 2), Point::frac(2, 4, 1, 2)]).is_err());
        assert!(Codebook::new(vec![Point::frac(3, 2, 1, 2)]).is_err());
        assert!(Codebook::new(vec![Point::frac(-1, 2, 1, 2)]).is_err());
    }

    #[test]
    fn nearest_site_examples() {
        let two = book(&[(1, 6, 1, 2), (5, 6, 1, 2)]);
        assert_eq!(nearest_site(&two, &Point::origin()), 0);
        assert_eq!(nearest_site(&two, &Point::center()), 0);
        assert_eq!(nearest_site(&alpha3(), &Point::frac(1, 6, 5, 6)), 2);
        let swapped = book(&[(5, 6, 1, 2), (1, 6, 1, 2)]);
        assert_eq!(nearest_site(&swapped, &Point::center()), 0);
    }

    #[test]
    fn nearest_site_resolves_ties_below_f64_resolution() {
        // Sites differ by 1e-30; f64 cannot separate them but the exact pass can.
        let eps = Rational::new(1.into(), num::pow(num::BigInt::from(10), 30));
        let a = Point::new(rat(1, 3), rat(1, 3));
        let b = Point::new(rat(1, 3) + &eps, rat(1, 3));
        let cb = Codebook::new(vec![b.clone(), a.clone()]).unwrap();
        assert_eq!(nearest_site(&cb, &Point::origin()), 1);
        assert_eq!(nearest_site(&cb, &Point::new(int(1), rat(1, 3))), 0);
    }

    #[test]
    fn classify_square_examples() {
        let two = book(&[(1, 6, 1, 2), (5, 6, 1, 2)]);
        let j1 = Square::new(Point::origin(), rat(1, 3));
        assert_eq!(classify_square(&two, &j1), CellAssignment::Resolved(0));
        let j3 = cylinder(&Word::parse("3").unwrap());
        let sq = Square::new(j3.lower_corner, j3.side);
        assert_eq!(classify_square(&alpha3(), &sq), CellAssignment::Resolved(2));
        let unit = Square::new(Point::origin(), int(1));
        assert_eq!(classify_square(&alpha3(), &unit), CellAssignment::Ambiguous);
    }

    #[test]
    fn grid_and_exact_paths_agree() {
        let cb = alpha3();
        for k in 0..=3 {
            for word in Word::all_of_length(k) {
                let cell = GridCell::of_word(&word).unwrap();
                assert_eq!(classify_cell(&cb, &cell), classify_square(&cb, &Square::of_cell(&cell)));
            }
        }
    }

    #[test]
    fn halves_resolve_on_diagonal_bisector() {
        let diag = book(&[(7, 10, 3, 10), (3, 10, 7, 10)]);
        let root = GridCell::root();
        let sets = corner_sets(&diag, &root);
        assert_eq!(resolve_square(&sets), CellAssignment::Ambiguous);
        assert_eq!(resolve_half(&sets, Half::BelowMain), CellAssignment::Resolved(0));
        assert_eq!(resolve_half(&sets, Half::AboveMain), CellAssignment::Resolved(1));
        assert_eq!(resolve_half(&sets, Half::BelowAnti), CellAssignment::Ambiguous);
    }
}
