//! The carpet IFS, its cylinder squares, exact moments and finite atomic
//! discretizations.
//!
//! The measure `P` is the invariant measure of the four similitudes
//! `S_i(p) = p/3 + t_i` with translations `t_1 = (0,0)`, `t_2 = (2/3,0)`,
//! `t_3 = (0,2/3)`, `t_4 = (2/3,2/3)`, each chosen with probability 1/4.
//! For a word `σ = σ_1…σ_k` the map `S_σ = S_{σ_1} ∘ … ∘ S_{σ_k}` sends the
//! unit square onto the cylinder square `J_σ`, which carries mass `4^-k`.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use num::bigint::BigInt;
use num::{One, Zero};

use crate::error::{Error, Result};
use crate::point::{int, rat, Point, Rational};

/// Largest depth `atoms` will materialize unless told otherwise.
pub const DEFAULT_MAX_ATOM_DEPTH: u32 = 12;

/// Largest cylinder depth representable on the integer grid (`3^40 < 2^64`).
pub const MAX_GRID_DEPTH: u32 = 39;

/// `E‖X − (1/2,1/2)‖²` for `X ~ P`.
pub fn variance() -> Rational {
    rat(1, 4)
}

pub fn pow_rat(base: i64, exp: u32) -> Rational {
    Rational::from_integer(num::pow(BigInt::from(base), exp as usize))
}

/// `4^-k`.
pub fn weight_at(k: u32) -> Rational {
    pow_rat(4, k).recip()
}

/// `3^-k`.
pub fn side_at(k: u32) -> Rational {
    pow_rat(3, k).recip()
}

/// A finite word over the alphabet {1, 2, 3, 4}.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| !(1..=4).contains(&l)) {
            return Err(Error::InvalidSymbol(bad));
        }
        Ok(Word(letters))
    }

    /// Parses a string of digits such as `"143"`. The empty string, `"-"`
    /// and `"∅"` all denote the empty word.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "-" || s == "∅" {
            return Ok(Word::empty());
        }
        let letters = s
            .bytes()
            .map(|b| match b {
                b'1'..=b'4' => Ok(b - b'0'),
                other => Err(Error::InvalidSymbol(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn child(&self, i: u8) -> Result<Word> {
        if !(1..=4).contains(&i) {
            return Err(Error::InvalidSymbol(i));
        }
        let mut letters = self.0.clone();
        letters.push(i);
        Ok(Word(letters))
    }

    /// True if `self = prefix · x` for some word `x` (including `x = ∅`).
    pub fn extends(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// All `4^k` words of length `k`, in lexicographic order (1 < 2 < 3 < 4).
    pub fn all_of_length(k: u32) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..k {
            out = out
                .iter()
                .flat_map(|w| (1..=4u8).map(move |i| w.child(i).unwrap()))
                .collect();
        }
        out
    }

    /// Position of the word among `all_of_length(self.len())`.
    pub fn lex_index(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &l| acc * 4 + (l as u64 - 1))
    }

    pub fn from_lex_index(k: u32, mut index: u64) -> Word {
        let mut letters = vec![0u8; k as usize];
        for slot in letters.iter_mut().rev() {
            *slot = (index % 4) as u8 + 1;
            index /= 4;
        }
        Word(letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "Word(∅)")
        } else {
            write!(f, "Word({self})")
        }
    }
}

/// One of the four generating maps `S_i(p) = p/3 + t_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Similitude {
    index: u8,
}

impl Similitude {
    pub fn new(index: u8) -> Result<Self> {
        if (1..=4).contains(&index) {
            Ok(Similitude { index })
        } else {
            Err(Error::InvalidSymbol(index))
        }
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn ratio(&self) -> Rational {
        rat(1, 3)
    }

    /// Integer offsets of the translation in units of 2/3.
    fn offsets(&self) -> (u64, u64) {
        match self.index {
            1 => (0, 0),
            2 => (1, 0),
            3 => (0, 1),
            _ => (1, 1),
        }
    }

    pub fn translation(&self) -> Point {
        let (ox, oy) = self.offsets();
        Point::new(rat(2 * ox as i64, 3), rat(2 * oy as i64, 3))
    }

    pub fn apply(&self, p: &Point) -> Point {
        let third = self.ratio();
        p.scale(&third).add(&self.translation())
    }
}

pub fn similitude_apply(i: u8, p: &Point) -> Result<Point> {
    Ok(Similitude::new(i)?.apply(p))
}

/// `S_σ(p)`; the last letter of the word is applied first.
pub fn word_apply(word: &Word, p: &Point) -> Point {
    word.letters().iter().rev().fold(p.clone(), |acc, &l| {
        Similitude { index: l }.apply(&acc)
    })
}

/// Geometric and measure data of a cylinder square `J_σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderSquare {
    pub word: Word,
    pub lower_corner: Point,
    pub side: Rational,
    pub centroid: Point,
    pub weight: Rational,
}

impl CylinderSquare {
    pub fn depth(&self) -> u32 {
        self.word.len() as u32
    }

    pub fn children(&self) -> [CylinderSquare; 4] {
        [1, 2, 3, 4].map(|i| cylinder(&self.word.child(i).unwrap()))
    }

    pub fn contains(&self, p: &Point) -> bool {
        let right = &self.lower_corner.x + &self.side;
        let top = &self.lower_corner.y + &self.side;
        p.x >= self.lower_corner.x && p.x <= right && p.y >= self.lower_corner.y && p.y <= top
    }
}

pub fn cylinder(word: &Word) -> CylinderSquare {
    let k = word.len() as u32;
    CylinderSquare {
        word: word.clone(),
        lower_corner: word_apply(word, &Point::origin()),
        side: side_at(k),
        centroid: word_apply(word, &Point::center()),
        weight: weight_at(k),
    }
}

/// Mean and total variance of `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentData {
    pub mean: Point,
    pub variance: Rational,
}

impl MomentData {
    pub fn of_carpet() -> Self {
        MomentData { mean: Point::center(), variance: variance() }
    }

    /// Variance of each coordinate; both marginals are the Cantor measure.
    pub fn coordinate_variance() -> Rational {
        rat(1, 8)
    }
}

/// A point mass.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedPoint {
    pub point: Point,
    pub mass: Rational,
}

/// A cylinder on the integer grid: lower corner `(ix, iy) / 3^depth`.
///
/// This is the hot-path representation used by the recursive evaluators;
/// it agrees with [`cylinder`] on every field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridCell {
    pub depth: u32,
    pub ix: u64,
    pub iy: u64,
}

impl GridCell {
    pub fn root() -> Self {
        GridCell { depth: 0, ix: 0, iy: 0 }
    }

    pub fn of_word(word: &Word) -> Result<Self> {
        let depth = word.len() as u32;
        if depth > MAX_GRID_DEPTH {
            return Err(Error::DepthTooLarge { depth, max: MAX_GRID_DEPTH });
        }
        Ok(word.letters().iter().fold(GridCell::root(), |c, &l| c.child(l)))
    }

    /// Child `J_{σi}`; `i` must be in 1..=4.
    pub fn child(&self, i: u8) -> Self {
        let (ox, oy) = Similitude { index: i }.offsets();
        GridCell { depth: self.depth + 1, ix: 3 * self.ix + 2 * ox, iy: 3 * self.iy + 2 * oy }
    }

    pub fn children(&self) -> [GridCell; 4] {
        [self.child(1), self.child(2), self.child(3), self.child(4)]
    }

    pub fn scale(&self) -> u64 {
        3u64.pow(self.depth)
    }

    pub fn corner(&self, dx: u64, dy: u64) -> Point {
        let s = self.scale() as i64;
        Point::frac((self.ix + dx) as i64, s, (self.iy + dy) as i64, s)
    }

    /// Corners in the order lower-left, lower-right, upper-left, upper-right.
    pub fn corners(&self) -> [Point; 4] {
        [self.corner(0, 0), self.corner(1, 0), self.corner(0, 1), self.corner(1, 1)]
    }

    pub fn corners_f64(&self) -> [(f64, f64); 4] {
        let s = self.scale() as f64;
        let (x, y) = (self.ix as f64, self.iy as f64);
        [
            (x / s, y / s),
            ((x + 1.0) / s, y / s),
            (x / s, (y + 1.0) / s),
            ((x + 1.0) / s, (y + 1.0) / s),
        ]
    }

    pub fn centroid(&self) -> Point {
        let s = 2 * self.scale() as i64;
        Point::frac(2 * self.ix as i64 + 1, s, 2 * self.iy as i64 + 1, s)
    }

    pub fn centroid_f64(&self) -> (f64, f64) {
        let s = 2.0 * self.scale() as f64;
        ((2 * self.ix + 1) as f64 / s, (2 * self.iy + 1) as f64 / s)
    }

    pub fn weight(&self) -> Rational {
        weight_at(self.depth)
    }

    pub fn side(&self) -> Rational {
        side_at(self.depth)
    }

    /// Maps a point of the unit square through `S_σ` (no rotation is involved,
    /// only scaling and translation).
    pub fn map_point(&self, p: &Point) -> Point {
        let s = Rational::from_integer(BigInt::from(self.scale()));
        Point::new(
            (&p.x + Rational::from_integer(BigInt::from(self.ix))) / &s,
            (&p.y + Rational::from_integer(BigInt::from(self.iy))) / &s,
        )
    }
}

/// Closed-form integral `∫_{J_σ} ‖x − a‖² dP = 4^-k (9^-k V + ‖S_σ(1/2,1/2) − a‖²)`.
pub fn cylinder_point_distortion(word: &Word, a: &Point) -> Rational {
    let k = word.len() as u32;
    let c = word_apply(word, &Point::center());
    weight_at(k) * (side_at(k).pow(2) * variance() + c.dist2(a))
}

/// Same integral for a grid cell.
pub fn cell_point_distortion(cell: &GridCell, a: &Point) -> Rational {
    let side = cell.side();
    cell.weight() * (&side * &side * variance() + cell.centroid().dist2(a))
}

/// The depth-`k` discretization with the default depth limit.
pub fn atoms(k: u32) -> Result<Vec<WeightedPoint>> {
    atoms_with_limit(k, DEFAULT_MAX_ATOM_DEPTH)
}

/// `4^k` atoms of mass `4^-k` at the level-`k` cylinder centroids, in
/// lexicographic word order.
pub fn atoms_with_limit(k: u32, max_depth: u32) -> Result<Vec<WeightedPoint>> {
    Ok(labeled_atoms_with_limit(k, max_depth)?.into_iter().map(|(_, a)| a).collect())
}

pub fn labeled_atoms(k: u32) -> Result<Vec<(Word, WeightedPoint)>> {
    labeled_atoms_with_limit(k, DEFAULT_MAX_ATOM_DEPTH)
}

fn labeled_atoms_with_limit(k: u32, max_depth: u32) -> Result<Vec<(Word, WeightedPoint)>> {
    let max = max_depth.min(MAX_GRID_DEPTH);
    if k > max {
        return Err(Error::DepthTooLarge { depth: k, max });
    }
    let mass = weight_at(k);
    let mut out = Vec::with_capacity(4usize.pow(k));
    let mut stack = vec![(Word::empty(), GridCell::root())];
    // Depth-first with children pushed in reverse keeps lexicographic order.
    while let Some((word, cell)) = stack.pop() {
        if cell.depth == k {
            out.push((word, WeightedPoint { point: cell.centroid(), mass: mass.clone() }));
            continue;
        }
        for i in (1..=4u8).rev() {
            stack.push((word.child(i).unwrap(), cell.child(i)));
        }
    }
    Ok(out)
}

/// Atom list as CSV with columns
/// `word,x_num,x_den,y_num,y_den,mass_num,mass_den`.
pub fn atoms_csv(k: u32) -> Result<String> {
    let mut out = String::from("word,x_num,x_den,y_num,y_den,mass_num,mass_den\n");
    for (word, a) in labeled_atoms(k)? {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            word,
            a.point.x.numer(),
            a.point.x.denom(),
            a.point.y.numer(),
            a.point.y.denom(),
            a.mass.numer(),
            a.mass.denom()
        )
        .unwrap();
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Projection of `atoms(k)` onto one axis with equal coordinates merged,
/// sorted by coordinate.
pub fn marginal_atoms(k: u32, axis: Axis) -> Result<Vec<(Rational, Rational)>> {
    let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
    for a in atoms_with_limit(k, MAX_GRID_DEPTH)? {
        let coord = match axis {
            Axis::X => a.point.x,
            Axis::Y => a.point.y,
        };
        *merged.entry(coord).or_insert_with(Rational::zero) += a.mass;
    }
    Ok(merged.into_iter().collect())
}

/// Depth-`k` atoms of the Cantor measure built from `U_1(x) = x/3` and
/// `U_2(x) = x/3 + 2/3`: `2^k` points `U_w(1/2)` of mass `2^-k`, sorted.
pub fn cantor_atoms(k: u32) -> Vec<(Rational, Rational)> {
    let third = rat(1, 3);
    let two_thirds = rat(2, 3);
    let mut points = vec![rat(1, 2)];
    for _ in 0..k {
        // U_w(1/2) for w one letter longer: prepend a letter, i.e. apply U_i last.
        points = points
            .iter()
            .flat_map(|x| {
                let scaled = x * &third;
                [scaled.clone(), scaled + &two_thirds]
            })
            .collect();
    }
    points.sort();
    let mass = pow_rat(2, k).recip();
    points.into_iter().map(|x| (x, mass.clone())).collect()
}

/// One of the two triangular halves of a cylinder square cut along one of
/// its diagonals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Half {
    /// Below the main diagonal (`y < x` in local coordinates).
    BelowMain,
    AboveMain,
    /// Below the anti-diagonal (`x + y < 1` locally).
    BelowAnti,
    AboveAnti,
}

enum ChildPart {
    Full,
    Empty,
    Split,
}

impl Half {
    pub const ALL: [Half; 4] = [Half::BelowMain, Half::AboveMain, Half::BelowAnti, Half::AboveAnti];

    /// The complementary half across the same diagonal.
    pub fn opposite(self) -> Half {
        match self {
            Half::BelowMain => Half::AboveMain,
            Half::AboveMain => Half::BelowMain,
            Half::BelowAnti => Half::AboveAnti,
            Half::AboveAnti => Half::BelowAnti,
        }
    }

    /// Indices into [`GridCell::corners`] of the triangle's vertices.
    pub fn corner_indices(self) -> [usize; 3] {
        match self {
            Half::BelowMain => [0, 1, 3],
            Half::AboveMain => [0, 2, 3],
            Half::BelowAnti => [0, 1, 2],
            Half::AboveAnti => [1, 2, 3],
        }
    }

    fn child_part(self, i: u8) -> ChildPart {
        use ChildPart::*;
        match (self, i) {
            (Half::BelowMain, 2) | (Half::AboveMain, 3) => Full,
            (Half::BelowMain, 3) | (Half::AboveMain, 2) => Empty,
            (Half::BelowMain | Half::AboveMain, _) => Split,
            (Half::BelowAnti, 1) | (Half::AboveAnti, 4) => Full,
            (Half::BelowAnti, 4) | (Half::AboveAnti, 1) => Empty,
            (Half::BelowAnti | Half::AboveAnti, _) => Split,
        }
    }

    /// Conditional mean and conditional variance of `P` restricted to this
    /// half of the unit square. The half has mass 1/2 by the diagonal
    /// symmetry of `P`; its two split children are scaled copies of itself,
    /// so both moments solve a linear self-similarity equation.
    pub fn moments(self) -> (Point, Rational) {
        let quarter = rat(1, 4);
        let eighth = rat(1, 8);
        let mut full_sum = Point::origin();
        let mut split_trans = Point::origin();
        let mut full = Vec::new();
        let mut split = Vec::new();
        for i in 1..=4u8 {
            let s = Similitude { index: i };
            match self.child_part(i) {
                ChildPart::Full => {
                    full_sum = full_sum.add(&s.apply(&Point::center()).scale(&quarter));
                    full.push(s);
                }
                ChildPart::Split => {
                    split_trans = split_trans.add(&s.translation().scale(&eighth));
                    split.push(s);
                }
                ChildPart::Empty => {}
            }
        }
        // (1/2) c = Σ_full (1/4) S_i(m) + Σ_split (1/8) (c/3 + t_i)
        let coeff = rat(1, 2) - rat(split.len() as i64, 24);
        let c = full_sum.add(&split_trans).scale(&coeff.recip());

        // W = ∫_H ‖x − c‖² dP satisfies
        // W = Σ_full (1/4)(V/9 + ‖S_i m − c‖²) + Σ_split (1/4)(W/9 + (1/2)‖S_i c − c‖²)
        let mut rhs = Rational::zero();
        for s in &full {
            rhs += &quarter * (variance() / int(9) + s.apply(&Point::center()).dist2(&c));
        }
        for s in &split {
            rhs += &eighth * s.apply(&c).dist2(&c);
        }
        let w = rhs / (Rational::one() - rat(split.len() as i64, 36));
        let conditional_variance = w * int(2);
        (c, conditional_variance)
    }
}

/// `∫_{half of J_σ} ‖x − a‖² dP`, exact.
pub fn half_cell_point_distortion(cell: &GridCell, half: Half, a: &Point) -> Rational {
    let (c, var) = half.moments();
    let side = cell.side();
    cell.weight() / int(2) * (&side * &side * var + cell.map_point(&c).dist2(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn similitudes_on_the_center() {
        let c = Point::center();
        assert_eq!(similitude_apply(1, &c).unwrap(), Point::frac(1, 6, 1, 6));
        assert_eq!(similitude_apply(2, &c).unwrap(), Point::frac(5, 6, 1, 6));
        assert_eq!(similitude_apply(4, &Point::origin()).unwrap(), Point::frac(2, 3, 2, 3));
        assert_eq!(similitude_apply(5, &c), Err(Error::InvalidSymbol(5)));
        assert_eq!(similitude_apply(0, &c), Err(Error::InvalidSymbol(0)));
    }

    #[test]
    fn word_composition_order() {
        let c = Point::center();
        assert_eq!(word_apply(&Word::empty(), &c), c);
        assert_eq!(word_apply(&w("12"), &c), Point::frac(5, 18, 1, 18));
        assert_eq!(word_apply(&w("44"), &c), Point::frac(17, 18, 17, 18));
    }

    #[test]
    fn word_parsing() {
        assert_eq!(w("").len(), 0);
        assert_eq!(w("∅"), Word::empty());
        assert_eq!(Word::parse("125"), Err(Error::InvalidSymbol(b'5')));
        assert_eq!(Word::new(vec![1, 0]), Err(Error::InvalidSymbol(0)));
        assert_eq!(w("1432").to_string(), "1432");
        assert!(w("143").extends(&w("14")));
        assert!(w("14").extends(&Word::empty()));
        assert!(!w("14").extends(&w("143")));
        let a = w("12");
        let b = w("3");
        let c = w("41");
        assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
        assert_eq!(a.concat(&Word::empty()), a);
    }

    #[test]
    fn lex_enumeration_and_indexing() {
        let words = Word::all_of_length(2);
        assert_eq!(words.len(), 16);
        assert_eq!(words[0], w("11"));
        assert_eq!(words[15], w("44"));
        for (i, word) in words.iter().enumerate() {
            assert_eq!(word.lex_index(), i as u64);
            assert_eq!(&Word::from_lex_index(2, i as u64), word);
        }
        assert!(words.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn cylinder_examples() {
        let root = cylinder(&Word::empty());
        assert_eq!(root.lower_corner, Point::origin());
        assert_eq!(root.side, int(1));
        assert_eq!(root.centroid, Point::center());
        assert_eq!(root.weight, int(1));

        let j3 = cylinder(&w("3"));
        assert_eq!(j3.lower_corner, Point::frac(0, 1, 2, 3));
        assert_eq!(j3.side, rat(1, 3));
        assert_eq!(j3.centroid, Point::frac(1, 6, 5, 6));
        assert_eq!(j3.weight, rat(1, 4));

        let j12 = cylinder(&w("12"));
        assert_eq!(j12.lower_corner, Point::frac(2, 9, 0, 1));
        assert_eq!(j12.side, rat(1, 9));
        assert_eq!(j12.centroid, Point::frac(5, 18, 1, 18));
        assert_eq!(j12.weight, rat(1, 16));
    }

    #[test]
    fn grid_cells_agree_with_cylinders() {
        for k in 0..=3 {
            for word in Word::all_of_length(k) {
                let cyl = cylinder(&word);
                let cell = GridCell::of_word(&word).unwrap();
                assert_eq!(cell.corner(0, 0), cyl.lower_corner);
                assert_eq!(cell.centroid(), cyl.centroid);
                assert_eq!(cell.weight(), cyl.weight);
                assert_eq!(cell.side(), cyl.side);
                assert_eq!(cyl.centroid, cyl.lower_corner.add(&Point::new(&cyl.side / int(2), &cyl.side / int(2))));
            }
        }
    }

    #[test]
    fn child_weights_partition_parent() {
        for k in 0..=4 {
            for word in Word::all_of_length(k) {
                let parent = cylinder(&word);
                let total: Rational = parent.children().iter().map(|c| c.weight.clone()).sum();
                assert_eq!(total, parent.weight);
                for c in parent.children() {
                    assert!(parent.contains(&c.lower_corner));
                    assert!(parent.contains(&c.centroid));
                }
            }
        }
    }

    #[test]
    fn atom_examples() {
        let a0 = atoms(0).unwrap();
        assert_eq!(a0, vec![WeightedPoint { point: Point::center(), mass: int(1) }]);
        let a1 = atoms(1).unwrap();
        let expected = [(1, 1), (5, 1), (1, 5), (5, 5)];
        assert_eq!(a1.len(), 4);
        for (a, (x, y)) in a1.iter().zip(expected) {
            assert_eq!(a.point, Point::frac(x, 6, y, 6));
            assert_eq!(a.mass, rat(1, 4));
        }
        let a2 = atoms(2).unwrap();
        assert_eq!(a2.len(), 16);
        assert_eq!(a2[0].point, Point::frac(1, 18, 1, 18));
        assert_eq!(a2[0].mass, rat(1, 16));
        let total: Rational = atoms(5).unwrap().into_iter().map(|a| a.mass).sum();
        assert_eq!(total, int(1));
        assert_eq!(atoms(13), Err(Error::DepthTooLarge { depth: 13, max: 12 }));
        assert!(atoms_with_limit(3, 2).is_err());
    }

    #[test]
    fn atoms_follow_word_order() {
        let labeled = labeled_atoms(3).unwrap();
        for (i, (word, a)) in labeled.iter().enumerate() {
            assert_eq!(word.lex_index(), i as u64);
            assert_eq!(a.point, word_apply(word, &Point::center()));
        }
    }

    #[test]
    fn cylinder_distortion_examples() {
        assert_eq!(cylinder_point_distortion(&Word::empty(), &Point::center()), rat(1, 4));
        assert_eq!(cylinder_point_distortion(&w("1"), &Point::frac(1, 6, 1, 6)), rat(1, 144));
        assert_eq!(cylinder_point_distortion(&w("3"), &Point::frac(1, 2, 5, 6)), rat(5, 144));
        let cell = GridCell::of_word(&w("3")).unwrap();
        assert_eq!(cell_point_distortion(&cell, &Point::frac(1, 2, 5, 6)), rat(5, 144));
    }

    #[test]
    fn csv_has_exact_columns() {
        let csv = atoms_csv(1).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "word,x_num,x_den,y_num,y_den,mass_num,mass_den");
        assert_eq!(lines[1], "1,1,6,1,6,1,4");
        assert_eq!(lines[4], "4,5,6,5,6,1,4");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn marginal_examples() {
        assert_eq!(marginal_atoms(1, Axis::X).unwrap(), vec![(rat(1, 6), rat(1, 2)), (rat(5, 6), rat(1, 2))]);
        assert_eq!(marginal_atoms(0, Axis::Y).unwrap(), vec![(rat(1, 2), int(1))]);
        let m2 = marginal_atoms(2, Axis::X).unwrap();
        let xs: Vec<_> = [1, 5, 13, 17].iter().map(|&n| (rat(n, 18), rat(1, 4))).collect();
        assert_eq!(m2, xs);
    }

    #[test]
    fn moments_match_constants() {
        let m = MomentData::of_carpet();
        assert_eq!(m.variance, MomentData::coordinate_variance() * int(2));
        let mean = atoms(4).unwrap().iter().fold(Point::origin(), |acc, a| acc.add(&a.point.scale(&a.mass)));
        assert_eq!(mean, m.mean);
    }

    #[test]
    fn diagonal_half_moments() {
        let (c, var) = Half::BelowMain.moments();
        assert_eq!(c, Point::frac(7, 10, 3, 10));
        assert_eq!(var, rat(17, 100));
        assert_eq!(Half::AboveMain.moments(), (Point::frac(3, 10, 7, 10), rat(17, 100)));
        assert_eq!(Half::BelowAnti.moments(), (Point::frac(3, 10, 3, 10), rat(17, 100)));
        assert_eq!(Half::AboveAnti.moments(), (Point::frac(7, 10, 7, 10), rat(17, 100)));
        // The two halves recombine into the whole-square moments.
        for half in [Half::BelowMain, Half::BelowAnti] {
            let (c1, v1) = half.moments();
            let (c2, v2) = half.opposite().moments();
            let mean = c1.add(&c2).scale(&rat(1, 2));
            assert_eq!(mean, Point::center());
            let total = (v1 + c1.dist2(&mean) + v2 + c2.dist2(&mean)) / int(2);
            assert_eq!(total, variance());
        }
    }

    #[test]
    fn half_distortions_sum_to_cylinder_distortion() {
        let cell = GridCell::of_word(&w("14")).unwrap();
        let a = Point::frac(2, 7, 1, 5);
        for half in [Half::BelowMain, Half::BelowAnti] {
            let sum = half_cell_point_distortion(&cell, half, &a)
                + half_cell_point_distortion(&cell, half.opposite(), &a);
            assert_eq!(sum, cell_point_distortion(&cell, &a));
        }
    }
}
