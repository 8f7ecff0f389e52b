//! Exact membership in `conv_n(Y)` and `conv_2(X, Y)` for finite point sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{affinely_independent, Point, Simplex};
use crate::lp::feasible_point;
use crate::scalar::{serde_scalar, serde_scalars, Scalar};

/// A non-empty finite set of points of a common dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    bound = "S: Scalar",
    try_from = "Vec<Point<S>>",
    into = "Vec<Point<S>>"
)]
pub struct FinitePointSet<S: Scalar> {
    points: Vec<Point<S>>,
}

impl<S: Scalar> TryFrom<Vec<Point<S>>> for FinitePointSet<S> {
    type Error = Error;
    fn try_from(points: Vec<Point<S>>) -> Result<Self> {
        Self::new(points)
    }
}

impl<S: Scalar> From<FinitePointSet<S>> for Vec<Point<S>> {
    fn from(set: FinitePointSet<S>) -> Self {
        set.points
    }
}

impl<S: Scalar> FinitePointSet<S> {
    pub fn new(points: Vec<Point<S>>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::input("empty point set"))?;
        let d = first.dim();
        for p in &points {
            p.check_dim(d)?;
        }
        Ok(FinitePointSet { points })
    }

    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn contains(&self, x: &Point<S>) -> bool {
        self.points.iter().any(|p| p.approx_eq(x))
    }
}

/// `x = sum_i coefficients[i] * points[indices[i]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ConvexCertificate<S: Scalar> {
    pub indices: Vec<usize>,
    pub points: Vec<Point<S>>,
    #[serde(with = "serde_scalars")]
    pub coefficients: Vec<S>,
}

impl<S: Scalar> ConvexCertificate<S> {
    /// Re-checks the certificate against `x`.
    pub fn verify(&self, x: &Point<S>) -> bool {
        let sum = self
            .coefficients
            .iter()
            .fold(S::zero(), |a, c| a + c.clone());
        let refs: Vec<&Point<S>> = self.points.iter().collect();
        self.coefficients.iter().all(Scalar::is_nonnegative)
            && sum.approx_eq(&S::one())
            && Point::combination(&refs, &self.coefficients).approx_eq(x)
    }
}

/// `p = t * x + (1 - t) * y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SegmentCertificate<S: Scalar> {
    pub x: Point<S>,
    pub y: Point<S>,
    #[serde(with = "serde_scalar")]
    pub t: S,
}

impl<S: Scalar> SegmentCertificate<S> {
    pub fn verify(&self, p: &Point<S>) -> bool {
        let t_ok = self.t.is_nonnegative() && (S::one() - self.t.clone()).is_nonnegative();
        t_ok && self.y.lerp(&self.x, &self.t).approx_eq(p)
    }
}

/// Calls `f` on index subsets of `0..n` of size `1..=k` in size-then-lex order;
/// stops when `f` returns `Some`.
fn first_subset<T>(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> Option<T>) -> Option<T> {
    fn rec<T>(
        start: usize,
        n: usize,
        size: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> Option<T>,
    ) -> Option<T> {
        if cur.len() == size {
            return f(cur);
        }
        for i in start..n {
            cur.push(i);
            if let Some(r) = rec(i + 1, n, size, cur, f) {
                return Some(r);
            }
            cur.pop();
        }
        None
    }
    let mut cur = Vec::new();
    (1..=k.min(n)).find_map(|size| rec(0, n, size, &mut cur, &mut f))
}

/// Is `x` a convex combination of at most `n` points of `y`?
///
/// Only affinely independent subsets of size `<= min(n, d + 1)` are tried;
/// this loses nothing since every convex combination reduces to one.
pub fn conv_n_contains<S: Scalar>(
    y: &FinitePointSet<S>,
    n: usize,
    x: &Point<S>,
) -> Result<Option<ConvexCertificate<S>>> {
    if n == 0 {
        return Err(Error::input("conv_n needs n >= 1"));
    }
    x.check_dim(y.dim())?;
    let pts = y.points();
    Ok(first_subset(pts.len(), n.min(y.dim() + 1), |idx| {
        let chosen: Vec<Point<S>> = idx.iter().map(|&i| pts[i].clone()).collect();
        if !affinely_independent(&chosen) {
            return None;
        }
        let coefficients = Simplex::new(chosen.clone())
            .ok()?
            .barycentric_coordinates(x)
            .ok()?
            .inside()?;
        Some(ConvexCertificate {
            indices: idx.to_vec(),
            points: chosen,
            coefficients,
        })
    }))
}

/// Is `p` in `conv_2(X, Y)`?
pub fn conv2_pair_contains<S: Scalar>(
    xs: &FinitePointSet<S>,
    ys: &FinitePointSet<S>,
    p: &Point<S>,
) -> Result<Option<SegmentCertificate<S>>> {
    p.check_dim(xs.dim())?;
    p.check_dim(ys.dim())?;
    for x in xs.points() {
        for y in ys.points() {
            if let Some(t) = segment_parameter(x, y, p) {
                return Ok(Some(SegmentCertificate {
                    x: x.clone(),
                    y: y.clone(),
                    t,
                }));
            }
        }
    }
    Ok(None)
}

/// `t` in `[0, 1]` with `p = t x + (1 - t) y`, if any.
pub fn segment_parameter<S: Scalar>(x: &Point<S>, y: &Point<S>, p: &Point<S>) -> Option<S> {
    if p.approx_eq(x) {
        return Some(S::one());
    }
    let dir = x - y;
    let len = dir.norm_sq();
    if len.is_negligible() {
        return None;
    }
    let t = (p - y).dot(&dir) / len;
    let ok =
        t.is_nonnegative() && (S::one() - t.clone()).is_nonnegative() && y.lerp(x, &t).approx_eq(p);
    ok.then_some(t)
}

/// Certificate for `p = t x + (1 - t) q` with `x` in `X` and `q` in `conv_n(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessorCertificate<S: Scalar> {
    pub segment: SegmentCertificate<S>,
    pub inner: ConvexCertificate<S>,
}

impl<S: Scalar> SuccessorCertificate<S> {
    pub fn verify(&self, p: &Point<S>, n: usize) -> bool {
        self.segment.verify(p) && self.inner.verify(&self.segment.y) && self.inner.points.len() <= n
    }
}

/// Decides `p in conv_2(X, conv_n X)` directly: for every `x` in `X` and
/// `n`-subset `T`, an exact LP looks for `q in conv(T)` on the ray from `x`
/// through `p` beyond `p`.
pub fn conv2_with_hull_contains<S: Scalar>(
    xs: &FinitePointSet<S>,
    n: usize,
    p: &Point<S>,
) -> Result<Option<SuccessorCertificate<S>>> {
    if n == 0 {
        return Err(Error::input("conv_n needs n >= 1"));
    }
    p.check_dim(xs.dim())?;
    let pts = xs.points();
    let d = xs.dim();
    for x in pts {
        if p.approx_eq(x) {
            let inner = ConvexCertificate {
                indices: vec![0],
                points: vec![pts[0].clone()],
                coefficients: vec![S::one()],
            };
            let segment = SegmentCertificate {
                x: x.clone(),
                y: pts[0].clone(),
                t: S::one(),
            };
            return Ok(Some(SuccessorCertificate { segment, inner }));
        }
        let dir = p - x;
        let found = first_subset(pts.len(), n.min(d + 1), |idx| {
            // variables: lambda_i (i in idx), s >= 0;  sum lambda_i y_i - s (p - x) = p,  sum lambda = 1
            let mut rows: Vec<Vec<S>> = (0..d)
                .map(|k| {
                    let mut row: Vec<S> = idx.iter().map(|&i| pts[i][k].clone()).collect();
                    row.push(-dir[k].clone());
                    row
                })
                .collect();
            let mut ones = vec![S::one(); idx.len()];
            ones.push(S::zero());
            rows.push(ones);
            let mut rhs = p.coords().to_vec();
            rhs.push(S::one());
            let sol = feasible_point(&rows, &rhs)?;
            let lambda = sol[..idx.len()].to_vec();
            let s = S::one() + sol[idx.len()].clone();
            let chosen: Vec<Point<S>> = idx.iter().map(|&i| pts[i].clone()).collect();
            let refs: Vec<&Point<S>> = chosen.iter().collect();
            let q = Point::combination(&refs, &lambda);
            let t = S::one() - S::one() / s;
            Some(SuccessorCertificate {
                segment: SegmentCertificate {
                    x: x.clone(),
                    y: q,
                    t,
                },
                inner: ConvexCertificate {
                    indices: idx.to_vec(),
                    points: chosen,
                    coefficients: lambda,
                },
            })
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Splits a `conv_{n+1}` certificate into `x` and a `conv_n` remainder.
pub fn split_certificate<S: Scalar>(cert: &ConvexCertificate<S>) -> SuccessorCertificate<S> {
    let c0 = cert.coefficients[0].clone();
    let rest_mass = S::one() - c0.clone();
    if cert.points.len() == 1 || rest_mass.is_negligible() {
        let inner = ConvexCertificate {
            indices: vec![cert.indices[0]],
            points: vec![cert.points[0].clone()],
            coefficients: vec![S::one()],
        };
        let segment = SegmentCertificate {
            x: cert.points[0].clone(),
            y: cert.points[0].clone(),
            t: S::one(),
        };
        return SuccessorCertificate { segment, inner };
    }
    let coefficients: Vec<S> = cert.coefficients[1..]
        .iter()
        .map(|c| c.clone() / rest_mass.clone())
        .collect();
    let points = cert.points[1..].to_vec();
    let refs: Vec<&Point<S>> = points.iter().collect();
    let q = Point::combination(&refs, &coefficients);
    SuccessorCertificate {
        segment: SegmentCertificate {
            x: cert.points[0].clone(),
            y: q,
            t: c0,
        },
        inner: ConvexCertificate {
            indices: cert.indices[1..].to_vec(),
            points,
            coefficients,
        },
    }
}

/// Full convex-hull membership by one exact LP over all points.
pub fn hull_contains<S: Scalar>(y: &FinitePointSet<S>, x: &Point<S>) -> Result<bool> {
    x.check_dim(y.dim())?;
    let mut rows: Vec<Vec<S>> = (0..y.dim())
        .map(|k| y.points().iter().map(|p| p[k].clone()).collect())
        .collect();
    rows.push(vec![S::one(); y.len()]);
    let mut rhs = x.coords().to_vec();
    rhs.push(S::one());
    Ok(feasible_point(&rows, &rhs).is_some())
}
