//! Winding numbers of closed polygonal curves around a codimension-two
//! coordinate plane, and loops as PL maps on a square-perimeter polygon.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::plmap::PLMap;
use crate::scalar::Scalar;
use crate::simplicial::SimplicialComplex;

/// A closed polygonal curve in `S^D`; the basepoint is the first vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct LoopModel<S: Scalar> {
    /// Vertices with `first == last`.
    pub points: Vec<Point<S>>,
    /// The removed plane is `{x_i = x_j = 0}`.
    pub axis: (usize, usize),
}

impl<S: Scalar> LoopModel<S> {
    pub fn new(points: Vec<Point<S>>, axis: (usize, usize)) -> Result<Self> {
        let l = LoopModel { points, axis };
        l.validate()?;
        Ok(l)
    }

    /// Closes the cyclic vertex list by repeating the first vertex.
    pub fn from_cycle(mut cycle: Vec<Point<S>>, axis: (usize, usize)) -> Result<Self> {
        let first = cycle
            .first()
            .cloned()
            .ok_or_else(|| Error::input("empty loop"))?;
        cycle.push(first);
        Self::new(cycle, axis)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.len() < 2 {
            return Err(Error::input("a loop needs at least two vertices"));
        }
        if self.points[0] != self.points[self.points.len() - 1] {
            return Err(Error::input("the loop is not closed"));
        }
        let d = self.points[0].dim();
        let (i, j) = self.axis;
        if i == j || i >= d || j >= d {
            return Err(Error::input(format!(
                "axis ({i}, {j}) is not a coordinate pair in dimension {d}"
            )));
        }
        for p in &self.points {
            p.check_dim(d)?;
            if p[i].is_negligible() && p[j].is_negligible() {
                return Err(Error::input(format!(
                    "vertex {p} lies on the removed plane"
                )));
            }
        }
        Ok(())
    }

    pub fn basepoint(&self) -> &Point<S> {
        &self.points[0]
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// The cyclic vertex list without the repeated endpoint.
    pub fn cycle(&self) -> &[Point<S>] {
        &self.points[..self.points.len() - 1]
    }

    /// Splits every edge into `factor` equal pieces.
    pub fn resample(&self, factor: usize) -> Self {
        let factor = factor.max(1);
        let mut points = Vec::with_capacity((self.points.len() - 1) * factor + 1);
        for w in self.points.windows(2) {
            for k in 0..factor {
                points.push(w[0].lerp(&w[1], &(S::from_count(k) / S::from_count(factor))));
            }
        }
        points.push(self.points[0].clone());
        LoopModel {
            points,
            axis: self.axis,
        }
    }

    /// Drops vertices lying on the segment between their neighbours.
    pub fn simplify(&self) -> Self {
        let mut cycle: Vec<Point<S>> = self.cycle().to_vec();
        let mut k = 1;
        while cycle.len() > 3 && k < cycle.len() {
            let (a, b) = (&cycle[k - 1], &cycle[(k + 1) % cycle.len()]);
            if on_segment(a, b, &cycle[k]) {
                cycle.remove(k);
            } else {
                k += 1;
            }
        }
        cycle.push(cycle[0].clone());
        LoopModel {
            points: cycle,
            axis: self.axis,
        }
    }

    /// Coordinate support of all vertices.
    pub fn support(&self) -> std::collections::BTreeSet<usize> {
        self.points.iter().flat_map(Point::support).collect()
    }
}

/// `x = a + t (b - a)` for some `t` in `[0, 1]`.
fn on_segment<S: Scalar>(a: &Point<S>, b: &Point<S>, x: &Point<S>) -> bool {
    let d = b - a;
    let len = d.norm_sq();
    if len.is_negligible() {
        return (x - a).norm_sq().is_negligible();
    }
    let t = (x - a).dot(&d) / len;
    t.is_nonnegative() && (S::one() - t.clone()).is_nonnegative() && a.lerp(b, &t).approx_eq(x)
}

fn sign<S: Scalar>(x: &S) -> i32 {
    if x.is_negligible() {
        0
    } else if x.is_strictly_positive() {
        1
    } else {
        -1
    }
}

fn cross<S: Scalar>(d: &(S, S), p: &(S, S)) -> S {
    d.0.clone() * p.1.clone() - d.1.clone() * p.0.clone()
}

/// Signed count of crossings of a ray from the origin, with the ray
/// direction moved off every vertex.
pub fn winding_number<S: Scalar>(l: &LoopModel<S>) -> Result<i64> {
    l.validate()?;
    let (i, j) = l.axis;
    let pts: Vec<(S, S)> = l
        .points
        .iter()
        .map(|p| (p[i].clone(), p[j].clone()))
        .collect();
    for w in pts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let c = a.0.clone() * b.1.clone() - a.1.clone() * b.0.clone();
        let dot = a.0.clone() * b.0.clone() + a.1.clone() * b.1.clone();
        if c.is_negligible() && !dot.is_strictly_positive() {
            return Err(Error::input("a loop edge meets the removed plane"));
        }
    }
    let dir = (0..)
        .map(|m: i64| {
            if m == 0 {
                (S::one(), S::zero())
            } else {
                (S::from_ratio(m, 1), S::one())
            }
        })
        .find(|d| pts.iter().all(|p| sign(&cross(d, p)) != 0))
        .expect("finitely many directions hit a vertex");
    let mut total = 0i64;
    for w in pts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let (ca, cb) = (cross(&dir, a), cross(&dir, b));
        let (sa, sb) = (sign(&ca), sign(&cb));
        if sa == sb {
            continue;
        }
        // crossing point a + t (b - a) on the line through the ray
        let t = ca.clone() / (ca - cb);
        let c = (
            a.0.clone() + t.clone() * (b.0.clone() - a.0.clone()),
            a.1.clone() + t * (b.1.clone() - a.1.clone()),
        );
        if (dir.0.clone() * c.0 + dir.1.clone() * c.1).is_strictly_positive() {
            total += if sa < 0 { 1 } else { -1 };
        }
    }
    Ok(total)
}

/// Position of a point of the unit square's boundary along its perimeter,
/// counterclockwise from the origin, in `[0, 4)`.
pub fn perimeter_parameter<S: Scalar>(x: &Point<S>) -> Result<S> {
    let (u, v) = (x[0].clone(), x[1].clone());
    let one = S::one();
    let on = |a: &S| a.is_negligible();
    if on(&v) && u.is_nonnegative() && (one.clone() - u.clone()).is_strictly_positive() {
        Ok(u)
    } else if on(&(u.clone() - one.clone()))
        && v.is_nonnegative()
        && (one.clone() - v.clone()).is_strictly_positive()
    {
        Ok(one + v)
    } else if on(&(v.clone() - one.clone()))
        && u.is_strictly_positive()
        && (one.clone() - u.clone()).is_nonnegative()
    {
        Ok(S::from_count(3) - u)
    } else if on(&u) && v.is_strictly_positive() && (one.clone() - v.clone()).is_nonnegative() {
        Ok(S::from_count(4) - v)
    } else {
        Err(Error::input(format!(
            "{x} is not on the unit square's boundary"
        )))
    }
}

/// Point of the unit square's boundary at perimeter parameter `s` in `[0, 4)`.
fn perimeter_point<S: Scalar>(s: S) -> Point<S> {
    let one = S::one();
    let two = S::from_count(2);
    let three = S::from_count(3);
    if s < one {
        Point::new(vec![s, S::zero()])
    } else if s < two {
        Point::new(vec![one.clone(), s - one])
    } else if s < three {
        Point::new(vec![three - s, one])
    } else {
        Point::new(vec![S::zero(), S::from_count(4) - s])
    }
}

/// The boundary of the unit square cut into `n` equal edges, vertex `k` at
/// perimeter parameter `4k/n`.
pub fn polygon_domain<S: Scalar>(n: usize) -> Result<SimplicialComplex<S>> {
    if n < 4 || !n.is_multiple_of(4) {
        return Err(Error::input(format!(
            "a square polygon needs a positive multiple of 4 vertices, got {n}"
        )));
    }
    let vertices = (0..n)
        .map(|k| perimeter_point(S::from_count(4 * k) / S::from_count(n)))
        .collect();
    let simplices = (0..n).map(|k| vec![k, (k + 1) % n]).collect();
    SimplicialComplex::new(vertices, simplices)
}

/// The loop as a PL map on `polygon_domain(n)`, `n` = its vertex count.
pub fn loop_to_map<S: Scalar>(l: &LoopModel<S>) -> Result<PLMap<S>> {
    PLMap::new(polygon_domain(l.cycle().len())?, l.cycle().to_vec())
}

/// Reads off the loop traced by a PL map on a subdivision of a square
/// polygon, starting at the vertex with parameter zero.
pub fn trace_loop<S: Scalar>(map: &PLMap<S>, axis: (usize, usize)) -> Result<LoopModel<S>> {
    let dom = map.domain();
    let mut keyed: Vec<(S, usize)> = (0..dom.vertices().len())
        .map(|v| Ok((perimeter_parameter(dom.vertex(v))?, v)))
        .collect::<Result<_>>()?;
    keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    if !keyed[0].0.is_negligible() {
        return Err(Error::input("the domain has no vertex at the basepoint"));
    }
    let cycle = keyed
        .into_iter()
        .map(|(_, v)| map.value(v).clone())
        .collect();
    LoopModel::from_cycle(cycle, axis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn pt(c: &[i64]) -> Point<Rational> {
        Point::from_i64(c)
    }

    fn square() -> Vec<Point<Rational>> {
        vec![
            pt(&[0, 1, -1]),
            pt(&[0, 1, 1]),
            pt(&[0, -1, 1]),
            pt(&[0, -1, -1]),
        ]
    }

    #[test]
    fn unit_square_around_origin_winds_once() {
        let l = LoopModel::from_cycle(square(), (1, 2)).unwrap();
        assert_eq!(winding_number(&l).unwrap(), 1);
    }

    #[test]
    fn reversed_double_traversal_winds_minus_two() {
        let mut c = square();
        c.reverse();
        let twice: Vec<_> = c.iter().chain(c.iter()).cloned().collect();
        let l = LoopModel::from_cycle(twice, (1, 2)).unwrap();
        assert_eq!(winding_number(&l).unwrap(), -2);
    }

    #[test]
    fn loop_away_from_origin_winds_zero() {
        let c: Vec<_> = square().into_iter().map(|p| p + pt(&[0, 5, 0])).collect();
        let l = LoopModel::from_cycle(c, (1, 2)).unwrap();
        assert_eq!(winding_number(&l).unwrap(), 0);
    }

    #[test]
    fn vertex_on_plane_is_rejected() {
        let mut c = square();
        c.push(pt(&[3, 0, 0]));
        assert!(LoopModel::from_cycle(c, (1, 2)).is_err());
    }

    #[test]
    fn edge_through_origin_is_rejected() {
        let c = vec![pt(&[1, 0]), pt(&[-1, 0]), pt(&[0, 1])];
        let l = LoopModel::from_cycle(c, (0, 1)).unwrap();
        assert!(winding_number(&l).is_err());
    }

    #[test]
    fn vertices_on_the_ray_are_avoided() {
        // two vertices on the positive x-axis force a perturbed direction
        let c = vec![pt(&[1, 0]), pt(&[2, 0]), pt(&[0, 2]), pt(&[-2, -2])];
        let l = LoopModel::from_cycle(c, (0, 1)).unwrap();
        assert_eq!(winding_number(&l).unwrap(), 1);
    }

    #[test]
    fn polygon_round_trip() {
        let c = square();
        let l = LoopModel::from_cycle(c, (1, 2)).unwrap();
        let m = loop_to_map(&l).unwrap();
        let back = trace_loop(&m, (1, 2)).unwrap();
        assert_eq!(back, l);
        let fine = l.resample(3);
        assert_eq!(fine.cycle().len(), 12);
        assert_eq!(winding_number(&fine).unwrap(), 1);
        assert_eq!(fine.simplify(), l);
    }
}
