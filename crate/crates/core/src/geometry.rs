//! Points, affine simplices, barycentric coordinates and small dense linear algebra.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point of `S^D`.
#[derive(Clone, PartialEq, PartialOrd, Debug)]
pub struct Point<S: Scalar> {
    coords: Vec<S>,
}

impl<S: Scalar> Point<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Point { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Point {
            coords: vec![S::zero(); dim],
        }
    }

    /// The `i`-th standard basis vector of `S^dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut p = Self::zeros(dim);
        p.coords[i] = S::one();
        p
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Point::new(coords.iter().map(|&c| S::from_ratio(c, 1)).collect())
    }

    pub fn from_ratios(coords: &[(i64, i64)]) -> Self {
        Point::new(coords.iter().map(|&(n, d)| S::from_ratio(n, d)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn scale(&self, k: &S) -> Self {
        Point::new(self.coords.iter().map(|c| c.clone() * k.clone()).collect())
    }

    pub fn dot(&self, other: &Self) -> S {
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    pub fn max_norm(&self) -> S {
        self.coords
            .iter()
            .fold(S::zero(), |acc, c| S::max_of(acc, c.abs()))
    }

    pub fn dist_sq(&self, other: &Self) -> S {
        (self.clone() - other.clone()).norm_sq()
    }

    pub fn max_dist(&self, other: &Self) -> S {
        (self.clone() - other.clone()).max_norm()
    }

    pub fn distance(&self, other: &Self, norm: Norm) -> S {
        match norm {
            Norm::Euclidean => self.dist_sq(other).sqrt_upper(),
            Norm::Max => self.max_dist(other),
        }
    }

    /// `sum_i weights[i] * points[i]`.
    pub fn combination(points: &[&Point<S>], weights: &[S]) -> Self {
        debug_assert_eq!(points.len(), weights.len());
        let dim = points.first().map_or(0, |p| p.dim());
        let mut acc = vec![S::zero(); dim];
        for (p, w) in points.iter().zip(weights) {
            if w.is_zero() {
                continue;
            }
            for (a, c) in acc.iter_mut().zip(&p.coords) {
                *a = a.clone() + w.clone() * c.clone();
            }
        }
        Point::new(acc)
    }

    /// `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &Self, t: &S) -> Self {
        let s = S::one() - t.clone();
        Point::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| s.clone() * a.clone() + t.clone() * b.clone())
                .collect(),
        )
    }

    /// Indices of non-zero coordinates (up to tolerance on the float backend).
    pub fn support(&self) -> BTreeSet<usize> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_negligible())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_negligible())
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(a, b)| a.approx_eq(b))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.to_f64_lossy()).collect()
    }

    /// Zeroes every coordinate outside `keep`.
    pub fn project_to(&self, keep: &BTreeSet<usize>) -> Self {
        Point::new(
            self.coords
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if keep.contains(&i) {
                        c.clone()
                    } else {
                        S::zero()
                    }
                })
                .collect(),
        )
    }

    /// Appends one coordinate.
    pub fn extended(&self, last: S) -> Self {
        let mut coords = self.coords.clone();
        coords.push(last);
        Point::new(coords)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            })
        }
    }
}

impl<S: Scalar> Index<usize> for Point<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.coords[i]
    }
}

impl<S: Scalar> IndexMut<usize> for Point<S> {
    fn index_mut(&mut self, i: usize) -> &mut S {
        &mut self.coords[i]
    }
}

impl<S: Scalar> Add for Point<S> {
    type Output = Point<S>;
    fn add(self, rhs: Self) -> Self {
        Point::new(
            self.coords
                .into_iter()
                .zip(rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl<S: Scalar> Sub for Point<S> {
    type Output = Point<S>;
    fn sub(self, rhs: Self) -> Self {
        Point::new(
            self.coords
                .into_iter()
                .zip(rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl<S: Scalar> Sub for &Point<S> {
    type Output = Point<S>;
    fn sub(self, rhs: Self) -> Point<S> {
        Point::new(
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }
}

impl<S: Scalar> fmt::Display for Point<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl<S: Scalar> Serialize for Point<S> {
    fn serialize<Ser: Serializer>(&self, ser: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        crate::scalar::serde_scalars::serialize(&self.coords, ser)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Point<S> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let coords = crate::scalar::serde_scalars::deserialize(de)?;
        if coords.is_empty() {
            return Err(D::Error::custom("a point needs at least one coordinate"));
        }
        Ok(Point::new(coords))
    }
}

/// Norms supported for diameters and distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    #[default]
    Euclidean,
    Max,
}

/// Result of locating a point relative to a simplex.
#[derive(Clone, Debug, PartialEq)]
pub enum Barycentric<S: Scalar> {
    /// Non-negative coefficients summing to one.
    Inside(Vec<S>),
    Outside(Outside<S>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outside<S: Scalar> {
    /// In the affine hull; `coefficients[index]` is the most negative coefficient.
    Coefficient { coefficients: Vec<S>, index: usize },
    /// Not in the affine hull; squared distance of the projection residual.
    OffHull { residual_sq: S },
}

impl<S: Scalar> Barycentric<S> {
    pub fn inside(self) -> Option<Vec<S>> {
        match self {
            Barycentric::Inside(c) => Some(c),
            Barycentric::Outside(_) => None,
        }
    }

    pub fn is_inside(&self) -> bool {
        matches!(self, Barycentric::Inside(_))
    }
}

/// An affine simplex `conv{v_1, ..., v_r}`; `rank = r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex<S: Scalar> {
    vertices: Vec<Point<S>>,
}

impl<S: Scalar> Simplex<S> {
    /// Checks common dimension and affine independence.
    pub fn new(vertices: Vec<Point<S>>) -> Result<Self> {
        let s = Simplex { vertices };
        s.validate()?;
        Ok(s)
    }

    pub(crate) fn new_unchecked(vertices: Vec<Point<S>>) -> Self {
        Simplex { vertices }
    }

    fn validate(&self) -> Result<()> {
        let first = self
            .vertices
            .first()
            .ok_or_else(|| Error::input("a simplex needs at least one vertex"))?;
        for v in &self.vertices {
            v.check_dim(first.dim())?;
        }
        if !affinely_independent(&self.vertices) {
            return Err(Error::input("simplex vertices are affinely dependent"));
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point<S>] {
        &self.vertices
    }

    pub fn rank(&self) -> usize {
        self.vertices.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn barycenter(&self) -> Point<S> {
        let r = S::from_count(self.rank());
        let w = vec![S::one() / r; self.rank()];
        let refs: Vec<&Point<S>> = self.vertices.iter().collect();
        Point::combination(&refs, &w)
    }

    pub fn point_at(&self, coefficients: &[S]) -> Point<S> {
        let refs: Vec<&Point<S>> = self.vertices.iter().collect();
        Point::combination(&refs, coefficients)
    }

    /// Coefficients `s` with `sum s_i = 1` and `sum s_i v_i` the orthogonal
    /// projection of `x` onto the affine hull, plus the squared residual.
    pub fn affine_coordinates(&self, x: &Point<S>) -> Result<(Vec<S>, S)> {
        x.check_dim(self.ambient_dim())?;
        let r = self.rank();
        if r == 1 {
            return Ok((vec![S::one()], x.dist_sq(&self.vertices[0])));
        }
        let base = &self.vertices[0];
        let edges: Vec<Point<S>> = self.vertices[1..].iter().map(|v| v - base).collect();
        let rel = x - base;
        let gram: Vec<Vec<S>> = edges
            .iter()
            .map(|a| edges.iter().map(|b| a.dot(b)).collect())
            .collect();
        let rhs: Vec<S> = edges.iter().map(|a| a.dot(&rel)).collect();
        let tail = solve_linear(gram, rhs)
            .ok_or_else(|| Error::input("degenerate simplex in barycentric solve"))?;
        let head = tail.iter().fold(S::one(), |acc, s| acc - s.clone());
        let mut coeffs = Vec::with_capacity(r);
        coeffs.push(head);
        coeffs.extend(tail);
        let residual = x.dist_sq(&self.point_at(&coeffs));
        Ok((coeffs, residual))
    }

    pub fn barycentric_coordinates(&self, x: &Point<S>) -> Result<Barycentric<S>> {
        let (coeffs, residual_sq) = self.affine_coordinates(x)?;
        if !residual_sq.is_negligible() {
            return Ok(Barycentric::Outside(Outside::OffHull { residual_sq }));
        }
        let (index, worst) = coeffs
            .iter()
            .enumerate()
            .fold((0, S::zero()), |(bi, bv), (i, c)| {
                if *c < bv {
                    (i, c.clone())
                } else {
                    (bi, bv)
                }
            });
        if worst.is_nonnegative() {
            Ok(Barycentric::Inside(coeffs))
        } else {
            Ok(Barycentric::Outside(Outside::Coefficient {
                coefficients: coeffs,
                index,
            }))
        }
    }

    pub fn contains(&self, x: &Point<S>) -> bool {
        matches!(self.barycentric_coordinates(x), Ok(Barycentric::Inside(_)))
    }

    /// `true` if `x` lies in a proper face (some coefficient vanishes).
    pub fn on_boundary(&self, x: &Point<S>) -> bool {
        match self.barycentric_coordinates(x) {
            Ok(Barycentric::Inside(c)) => self.rank() >= 2 && c.iter().any(|s| s.is_negligible()),
            _ => false,
        }
    }

    pub fn diameter_sq(&self) -> S {
        let mut best = S::zero();
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = S::max_of(best, a.dist_sq(b));
            }
        }
        best
    }

    /// Max pairwise vertex distance. For the euclidean norm on the exact
    /// backend this is a certified upper bound unless the square is a
    /// perfect square; use [`Simplex::diameter_sq`] for exact comparisons.
    pub fn diameter(&self, norm: Norm) -> S {
        match norm {
            Norm::Euclidean => self.diameter_sq().sqrt_upper(),
            Norm::Max => {
                let mut best = S::zero();
                for (i, a) in self.vertices.iter().enumerate() {
                    for b in &self.vertices[i + 1..] {
                        best = S::max_of(best, a.max_dist(b));
                    }
                }
                best
            }
        }
    }

    /// Points with barycentric coordinates in `(1/k) Z`, vertices included.
    pub fn grid_points(&self, k: usize) -> Vec<Point<S>> {
        let r = self.rank();
        let mut out = Vec::new();
        let mut counts = vec![0usize; r];
        fn rec<S: Scalar>(
            s: &Simplex<S>,
            k: usize,
            i: usize,
            left: usize,
            counts: &mut Vec<usize>,
            out: &mut Vec<Point<S>>,
        ) {
            if i + 1 == counts.len() {
                counts[i] = left;
                let denom = S::from_count(k.max(1));
                let w: Vec<S> = counts
                    .iter()
                    .map(|&c| S::from_count(c) / denom.clone())
                    .collect();
                out.push(s.point_at(&w));
                return;
            }
            for c in 0..=left {
                counts[i] = c;
                rec(s, k, i + 1, left - c, counts, out);
            }
        }
        rec(self, k.max(1), 0, k.max(1), &mut counts, &mut out);
        out
    }

    /// A random point with dyadic barycentric weights (exact on the rational backend).
    pub fn random_point(&self, rng: &mut impl rand::Rng) -> Point<S> {
        const DENOM: u64 = 1 << 20;
        let raw: Vec<u64> = (0..self.rank())
            .map(|_| rng.random_range(1..=DENOM))
            .collect();
        let total = S::from_count(raw.iter().sum::<u64>() as usize);
        let w: Vec<S> = raw
            .iter()
            .map(|&a| S::from_count(a as usize) / total.clone())
            .collect();
        self.point_at(&w)
    }

    pub fn face(&self, indices: &[usize]) -> Simplex<S> {
        Simplex::new_unchecked(indices.iter().map(|&i| self.vertices[i].clone()).collect())
    }

    /// Volume relative to `self` of an equal-dimensional simplex lying in its
    /// affine hull: `|det|` of the barycentric coordinate matrix.
    pub fn relative_volume(&self, inner: &Simplex<S>) -> Result<S> {
        if inner.rank() != self.rank() {
            return Err(Error::input("relative volume needs equal ranks"));
        }
        let mut rows = Vec::with_capacity(self.rank());
        for v in inner.vertices() {
            let (c, residual) = self.affine_coordinates(v)?;
            if !residual.is_negligible() {
                return Err(Error::input("inner simplex leaves the affine hull"));
            }
            rows.push(c);
        }
        Ok(determinant(rows).abs())
    }

    /// Full-dimensional volume `|det(v_i - v_0)| / (r-1)!`; requires `rank = D + 1`.
    pub fn volume(&self) -> Result<S> {
        let k = self.rank() - 1;
        if k != self.ambient_dim() {
            return Err(Error::input("volume() needs a full-dimensional simplex"));
        }
        let base = &self.vertices[0];
        let rows: Vec<Vec<S>> = self.vertices[1..]
            .iter()
            .map(|v| (v - base).into_coords())
            .collect();
        let mut fact = S::one();
        for i in 2..=k {
            fact = fact * S::from_count(i);
        }
        Ok(determinant(rows).abs() / fact)
    }
}

impl<S: Scalar> Serialize for Simplex<S> {
    fn serialize<Ser: Serializer>(&self, ser: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        #[derive(Serialize)]
        #[serde(bound = "S: Scalar")]
        struct Repr<'a, S: Scalar> {
            vertices: &'a [Point<S>],
        }
        Repr {
            vertices: &self.vertices,
        }
        .serialize(ser)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Simplex<S> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound = "S: Scalar")]
        struct Repr<S: Scalar> {
            vertices: Vec<Point<S>>,
        }
        let r = Repr::<S>::deserialize(de)?;
        Simplex::new(r.vertices).map_err(D::Error::custom)
    }
}

pub fn affinely_independent<S: Scalar>(points: &[Point<S>]) -> bool {
    if points.len() <= 1 {
        return true;
    }
    let base = &points[0];
    let rows: Vec<Vec<S>> = points[1..]
        .iter()
        .map(|p| (p - base).into_coords())
        .collect();
    matrix_rank(rows) == points.len() - 1
}

fn pivot_row<S: Scalar>(m: &[Vec<S>], col: usize, from: usize) -> Option<usize> {
    if S::EXACT {
        (from..m.len()).find(|&r| !m[r][col].is_zero())
    } else {
        let (best, val) = (from..m.len()).map(|r| (r, m[r][col].abs())).fold(
            (from, S::zero()),
            |(br, bv), (r, v)| if v > bv { (r, v) } else { (br, bv) },
        );
        if val.is_strictly_positive() {
            Some(best)
        } else {
            None
        }
    }
}

/// Row rank; the float backend treats pivots below tolerance as zero.
pub fn matrix_rank<S: Scalar>(mut m: Vec<Vec<S>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = pivot_row(&m, col, rank) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for r in rank + 1..rows {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() / pivot.clone();
            for c in col..cols {
                let sub = f.clone() * m[rank][c].clone();
                m[r][c] = m[r][c].clone() - sub;
            }
        }
        rank += 1;
    }
    rank
}

/// Solves a square system; `None` if singular.
pub fn solve_linear<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = b.len();
    for col in 0..n {
        let p = pivot_row(&a, col, col)?;
        a.swap(col, p);
        b.swap(col, p);
        let pivot = a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / pivot.clone();
            for c in col..n {
                let sub = f.clone() * a[col][c].clone();
                a[r][c] = a[r][c].clone() - sub;
            }
            let sub = f * b[col].clone();
            b[r] = b[r].clone() - sub;
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for c in row + 1..n {
            acc = acc - a[row][c].clone() * x[c].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Some(x)
}

pub fn determinant<S: Scalar>(mut a: Vec<Vec<S>>) -> S {
    let n = a.len();
    let mut det = S::one();
    for col in 0..n {
        let Some(p) = pivot_row(&a, col, col) else {
            return S::zero();
        };
        if p != col {
            a.swap(col, p);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det = det * pivot.clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / pivot.clone();
            for c in col..n {
                let sub = f.clone() * a[col][c].clone();
                a[r][c] = a[r][c].clone() - sub;
            }
        }
    }
    det
}
