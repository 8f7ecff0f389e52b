//! Shape predicates over `S^D` with exact membership and conservative
//! symbolic containment tests for euclidean balls.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::convexity::{hull_contains, FinitePointSet};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::{serde_scalar, serde_scalars, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "S: Scalar")]
pub enum Region<S: Scalar> {
    OpenBall {
        center: Point<S>,
        #[serde(with = "serde_scalar")]
        radius: S,
    },
    ClosedBall {
        center: Point<S>,
        #[serde(with = "serde_scalar")]
        radius: S,
    },
    /// `normal . x < offset` (or `<=` when `closed`).
    HalfSpace {
        normal: Point<S>,
        #[serde(with = "serde_scalar")]
        offset: S,
        #[serde(default)]
        closed: bool,
    },
    /// `normals[k] . x = offsets[k]` for all `k`.
    AffineSubspace {
        normals: Vec<Point<S>>,
        #[serde(with = "serde_scalars")]
        offsets: Vec<S>,
    },
    /// Everything except `{x_i = x_j = 0}` (0-based coordinates).
    CoordinatePlaneComplement {
        i: usize,
        j: usize,
    },
    Translate {
        region: Box<Region<S>>,
        by: Point<S>,
    },
    FullSpace,
    Empty,
    Intersection {
        regions: Vec<Region<S>>,
    },
    Union {
        regions: Vec<Region<S>>,
    },
    Complement {
        region: Box<Region<S>>,
    },
}

/// Outcome of a containment test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Containment {
    Certified,
    Refuted,
    Unknown,
}

fn dot<S: Scalar>(a: &Point<S>, b: &Point<S>) -> S {
    a.dot(b)
}

/// `|u| <= m` (`< m` when strict) for `m` possibly negative.
fn norm_le<S: Scalar>(u_sq: &S, m: &S, strict: bool) -> bool {
    if m.is_negative() || (strict && m.is_zero()) {
        return false;
    }
    let m_sq = m.clone() * m.clone();
    if strict {
        *u_sq < m_sq
    } else {
        *u_sq <= m_sq
    }
}

impl<S: Scalar> Region<S> {
    pub fn open_ball(center: Point<S>, radius: S) -> Self {
        Region::OpenBall { center, radius }
    }

    pub fn intersection(regions: Vec<Region<S>>) -> Self {
        let mut flat = Vec::new();
        for r in regions {
            match r {
                Region::FullSpace => {}
                Region::Intersection { regions } => flat.extend(regions),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Region::FullSpace,
            1 => flat.pop().unwrap(),
            _ => Region::Intersection { regions: flat },
        }
    }

    pub fn contains(&self, x: &Point<S>) -> bool {
        match self {
            Region::OpenBall { center, radius } => {
                x.dist_sq(center) < radius.clone() * radius.clone()
            }
            Region::ClosedBall { center, radius } => {
                x.dist_sq(center) <= radius.clone() * radius.clone()
            }
            Region::HalfSpace {
                normal,
                offset,
                closed,
            } => {
                let v = dot(normal, x);
                if *closed {
                    v <= *offset
                } else {
                    v < *offset
                }
            }
            Region::AffineSubspace { normals, offsets } => normals
                .iter()
                .zip(offsets)
                .all(|(n, o)| dot(n, x).approx_eq(o)),
            Region::CoordinatePlaneComplement { i, j } => !(x[*i].is_zero() && x[*j].is_zero()),
            Region::Translate { region, by } => region.contains(&(x - by)),
            Region::FullSpace => true,
            Region::Empty => false,
            Region::Intersection { regions } => regions.iter().all(|r| r.contains(x)),
            Region::Union { regions } => regions.iter().any(|r| r.contains(x)),
            Region::Complement { region } => !region.contains(x),
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Region::OpenBall { .. }
            | Region::ClosedBall { .. }
            | Region::HalfSpace { .. }
            | Region::AffineSubspace { .. }
            | Region::FullSpace
            | Region::Empty => true,
            Region::Translate { region, .. } => region.is_convex(),
            Region::Intersection { regions } => regions.iter().all(Region::is_convex),
            _ => false,
        }
    }

    pub fn is_open(&self) -> bool {
        match self {
            Region::OpenBall { .. }
            | Region::CoordinatePlaneComplement { .. }
            | Region::FullSpace
            | Region::Empty => true,
            Region::HalfSpace { closed, .. } => !closed,
            Region::ClosedBall { .. } | Region::AffineSubspace { .. } => false,
            Region::Translate { region, .. } => region.is_open(),
            Region::Intersection { regions } | Region::Union { regions } => {
                regions.iter().all(Region::is_open)
            }
            Region::Complement { region } => region.is_closed(),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Region::ClosedBall { .. }
            | Region::AffineSubspace { .. }
            | Region::FullSpace
            | Region::Empty => true,
            Region::HalfSpace { closed, .. } => *closed,
            Region::OpenBall { .. } | Region::CoordinatePlaneComplement { .. } => false,
            Region::Translate { region, .. } => region.is_closed(),
            Region::Intersection { regions } | Region::Union { regions } => {
                regions.iter().all(Region::is_closed)
            }
            Region::Complement { region } => region.is_open(),
        }
    }

    /// `self + v`, pushing the shift into the primitives.
    pub fn shifted(&self, v: &Point<S>) -> Self {
        match self {
            Region::OpenBall { center, radius } => Region::OpenBall {
                center: center.clone() + v.clone(),
                radius: radius.clone(),
            },
            Region::ClosedBall { center, radius } => Region::ClosedBall {
                center: center.clone() + v.clone(),
                radius: radius.clone(),
            },
            Region::HalfSpace {
                normal,
                offset,
                closed,
            } => Region::HalfSpace {
                normal: normal.clone(),
                offset: offset.clone() + dot(normal, v),
                closed: *closed,
            },
            Region::AffineSubspace { normals, offsets } => Region::AffineSubspace {
                normals: normals.clone(),
                offsets: normals
                    .iter()
                    .zip(offsets)
                    .map(|(n, o)| o.clone() + dot(n, v))
                    .collect(),
            },
            Region::CoordinatePlaneComplement { .. } if !v.is_zero() => Region::Translate {
                region: Box::new(self.clone()),
                by: v.clone(),
            },
            Region::Translate { region, by } => region.shifted(&(by.clone() + v.clone())),
            Region::Intersection { regions } => Region::Intersection {
                regions: regions.iter().map(|r| r.shifted(v)).collect(),
            },
            Region::Union { regions } => Region::Union {
                regions: regions.iter().map(|r| r.shifted(v)).collect(),
            },
            Region::Complement { region } => Region::Complement {
                region: Box::new(region.shifted(v)),
            },
            other => other.clone(),
        }
    }

    /// Conservative test of `B(c, r) subset self`, for the open ball, or the
    /// closed ball when `closed`.
    pub fn contains_ball(&self, c: &Point<S>, r: &S, closed: bool) -> bool {
        match self {
            Region::OpenBall { center, radius } => {
                norm_le(&c.dist_sq(center), &(radius.clone() - r.clone()), closed)
            }
            Region::ClosedBall { center, radius } => {
                norm_le(&c.dist_sq(center), &(radius.clone() - r.clone()), false)
            }
            Region::HalfSpace {
                normal,
                offset,
                closed: hs_closed,
            } => {
                // sup of normal.x over the ball is normal.c + r |normal|
                let slack = offset.clone() - dot(normal, c);
                let strict = closed && !hs_closed;
                if slack.is_negative() || (strict && slack.is_zero()) {
                    return false;
                }
                let lhs = r.clone() * r.clone() * normal.norm_sq();
                let rhs = slack.clone() * slack;
                if strict {
                    lhs < rhs
                } else {
                    lhs <= rhs
                }
            }
            Region::AffineSubspace { .. } => r.is_zero() && closed && self.contains(c),
            Region::CoordinatePlaneComplement { i, j } => {
                let d = c[*i].clone() * c[*i].clone() + c[*j].clone() * c[*j].clone();
                let rr = r.clone() * r.clone();
                if closed {
                    d > rr
                } else {
                    d >= rr && !d.is_zero()
                }
            }
            Region::Translate { region, by } => region.contains_ball(&(c - by), r, closed),
            Region::FullSpace => true,
            Region::Empty => false,
            Region::Intersection { regions } => {
                regions.iter().all(|g| g.contains_ball(c, r, closed))
            }
            Region::Union { regions } => regions.iter().any(|g| g.contains_ball(c, r, closed)),
            Region::Complement { region } => match region.as_ref() {
                // disjoint balls: |c - c'| >= r + r'
                Region::OpenBall { center, radius } | Region::ClosedBall { center, radius } => {
                    let m = r.clone() + radius.clone();
                    let d = c.dist_sq(center);
                    let strict = closed || matches!(region.as_ref(), Region::ClosedBall { .. });
                    let mm = m.clone() * m;
                    if strict {
                        d > mm
                    } else {
                        d >= mm
                    }
                }
                Region::Complement { region } => region.contains_ball(c, r, closed),
                _ => false,
            },
        }
    }

    /// A lower bound `R > 0` on the radius of an open ball around `x`
    /// inside `self`, capped at `cap`; `None` when no ball is certified.
    pub fn inner_radius(&self, x: &Point<S>, cap: &S) -> Option<S> {
        let r = self.inner_radius_raw(x, cap)?;
        let r = S::min_of(r, cap.clone());
        r.is_strictly_positive().then_some(r)
    }

    fn inner_radius_raw(&self, x: &Point<S>, cap: &S) -> Option<S> {
        let positive = |v: S| v.is_strictly_positive().then_some(v);
        match self {
            Region::OpenBall { center, radius } | Region::ClosedBall { center, radius } => {
                positive(radius.clone() - x.dist_sq(center).sqrt_upper())
            }
            Region::HalfSpace { normal, offset, .. } => {
                positive((offset.clone() - dot(normal, x)) / normal.norm_sq().sqrt_upper())
            }
            Region::AffineSubspace { .. } | Region::Empty => None,
            Region::CoordinatePlaneComplement { i, j } => positive(
                (x[*i].clone() * x[*i].clone() + x[*j].clone() * x[*j].clone()).sqrt_lower(),
            ),
            Region::Translate { region, by } => region.inner_radius_raw(&(x - by), cap),
            Region::FullSpace => Some(cap.clone()),
            Region::Intersection { regions } => regions
                .iter()
                .map(|g| g.inner_radius_raw(x, cap))
                .try_fold(cap.clone(), |acc, r| r.map(|r| S::min_of(acc, r))),
            Region::Union { regions } => regions
                .iter()
                .filter_map(|g| g.inner_radius_raw(x, cap))
                .reduce(S::max_of),
            Region::Complement { region } => match region.as_ref() {
                Region::OpenBall { center, radius } | Region::ClosedBall { center, radius } => {
                    positive(x.dist_sq(center).sqrt_lower() - radius.clone())
                }
                _ => None,
            },
        }
    }

    /// Conservative test that the closed segment `[a, b]` lies in `self`.
    pub fn contains_segment(&self, a: &Point<S>, b: &Point<S>) -> bool {
        match self {
            _ if self.is_convex() => self.contains(a) && self.contains(b),
            Region::CoordinatePlaneComplement { i, j } => {
                let (ax, ay, bx, by) = (a[*i].clone(), a[*j].clone(), b[*i].clone(), b[*j].clone());
                if !self.contains(a) || !self.contains(b) {
                    return false;
                }
                // the 2D segment passes through the origin iff collinear with it
                // and the endpoints lie on opposite sides
                let cross = ax.clone() * by.clone() - ay.clone() * bx.clone();
                let dotp = ax * bx + ay * by;
                !(cross.is_zero() && !dotp.is_strictly_positive())
            }
            Region::Translate { region, by } => region.contains_segment(&(a - by), &(b - by)),
            Region::Intersection { regions } => regions.iter().all(|g| g.contains_segment(a, b)),
            Region::Union { regions } => regions.iter().any(|g| g.contains_segment(a, b)),
            Region::Complement { region } => match region.as_ref() {
                Region::OpenBall { center, radius } | Region::ClosedBall { center, radius } => {
                    let d = segment_dist_sq(a, b, center);
                    let rr = radius.clone() * radius.clone();
                    if matches!(region.as_ref(), Region::OpenBall { .. }) {
                        d >= rr
                    } else {
                        d > rr
                    }
                }
                _ => false,
            },
            _ => false,
        }
    }

    /// Symbolic test of `self subset other`.
    pub fn subset_of(&self, other: &Region<S>) -> Containment {
        match self {
            Region::Empty => Containment::Certified,
            Region::OpenBall { center, radius } => {
                bool_cert(other.contains_ball(center, radius, false))
            }
            Region::ClosedBall { center, radius } => {
                bool_cert(other.contains_ball(center, radius, true))
            }
            Region::Translate { region, by } => region.shifted(by).subset_of(other),
            Region::Intersection { regions } => {
                if regions
                    .iter()
                    .any(|r| r.subset_of(other) == Containment::Certified)
                {
                    Containment::Certified
                } else {
                    Containment::Unknown
                }
            }
            Region::Union { regions } => {
                if regions
                    .iter()
                    .all(|r| r.subset_of(other) == Containment::Certified)
                {
                    Containment::Certified
                } else {
                    Containment::Unknown
                }
            }
            _ if matches!(other, Region::FullSpace) => Containment::Certified,
            _ if self == other => Containment::Certified,
            _ => Containment::Unknown,
        }
    }

    /// Axis-aligned box containing the region, if one is known.
    pub fn bounding_box(&self) -> Option<(Point<S>, Point<S>)> {
        match self {
            Region::OpenBall { center, radius } | Region::ClosedBall { center, radius } => {
                let lo = Point::new(
                    center
                        .coords()
                        .iter()
                        .map(|c| c.clone() - radius.clone())
                        .collect(),
                );
                let hi = Point::new(
                    center
                        .coords()
                        .iter()
                        .map(|c| c.clone() + radius.clone())
                        .collect(),
                );
                Some((lo, hi))
            }
            Region::Translate { region, by } => region
                .bounding_box()
                .map(|(lo, hi)| (lo + by.clone(), hi + by.clone())),
            Region::Intersection { regions } => regions
                .iter()
                .filter_map(Region::bounding_box)
                .reduce(|(alo, ahi), (blo, bhi)| {
                    let lo = Point::new(
                        alo.coords()
                            .iter()
                            .zip(blo.coords())
                            .map(|(a, b)| S::max_of(a.clone(), b.clone()))
                            .collect(),
                    );
                    let hi = Point::new(
                        ahi.coords()
                            .iter()
                            .zip(bhi.coords())
                            .map(|(a, b)| S::min_of(a.clone(), b.clone()))
                            .collect(),
                    );
                    (lo, hi)
                }),
            Region::Union { regions } => {
                let boxes: Option<Vec<_>> = regions.iter().map(Region::bounding_box).collect();
                boxes?.into_iter().reduce(|(alo, ahi), (blo, bhi)| {
                    let lo = Point::new(
                        alo.coords()
                            .iter()
                            .zip(blo.coords())
                            .map(|(a, b)| S::min_of(a.clone(), b.clone()))
                            .collect(),
                    );
                    let hi = Point::new(
                        ahi.coords()
                            .iter()
                            .zip(bhi.coords())
                            .map(|(a, b)| S::max_of(a.clone(), b.clone()))
                            .collect(),
                    );
                    (lo, hi)
                })
            }
            _ => None,
        }
    }

    /// Rejection sample of up to `n` points of the region inside `bbox`
    /// (or its own bounding box), on a dyadic grid of step `2^-20`.
    pub fn sample(
        &self,
        n: usize,
        bbox: Option<&(Point<S>, Point<S>)>,
        rng: &mut impl Rng,
    ) -> Result<Vec<Point<S>>> {
        let own;
        let (lo, hi) = match bbox {
            Some(b) => b,
            None => {
                own = self
                    .bounding_box()
                    .ok_or_else(|| Error::input("region has no bounding box for sampling"))?;
                &own
            }
        };
        let lo = lo.to_f64();
        let hi = hi.to_f64();
        let mut out = Vec::with_capacity(n);
        let attempts = n.saturating_mul(200).max(1000);
        for _ in 0..attempts {
            if out.len() == n {
                break;
            }
            let x = Point::new(
                lo.iter()
                    .zip(&hi)
                    .map(|(&a, &b)| S::round_from_f64(a + (b - a) * rng.random::<f64>(), 1 << 20))
                    .collect(),
            );
            if self.contains(&x) {
                out.push(x);
            }
        }
        Ok(out)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            Region::OpenBall { center, .. } | Region::ClosedBall { center, .. } => {
                center.check_dim(dim)
            }
            Region::HalfSpace { normal, .. } => normal.check_dim(dim),
            Region::AffineSubspace { normals, offsets } => {
                if normals.len() != offsets.len() {
                    return Err(Error::input("affine subspace needs one offset per normal"));
                }
                normals.iter().try_for_each(|n| n.check_dim(dim))
            }
            Region::CoordinatePlaneComplement { i, j } => {
                if *i >= dim || *j >= dim || i == j {
                    Err(Error::input(format!(
                        "bad coordinate plane ({i}, {j}) in dimension {dim}"
                    )))
                } else {
                    Ok(())
                }
            }
            Region::Translate { region, by } => {
                by.check_dim(dim)?;
                region.check_dim(dim)
            }
            Region::FullSpace | Region::Empty => Ok(()),
            Region::Intersection { regions } | Region::Union { regions } => {
                regions.iter().try_for_each(|r| r.check_dim(dim))
            }
            Region::Complement { region } => region.check_dim(dim),
        }
    }
}

fn bool_cert(b: bool) -> Containment {
    if b {
        Containment::Certified
    } else {
        Containment::Unknown
    }
}

impl<S: Scalar> Region<S> {
    /// Decides `conv(points) subset self` when an exact test is available.
    pub fn hull_inside(&self, points: &[Point<S>]) -> Option<bool> {
        if points.is_empty() {
            return Some(true);
        }
        match self {
            _ if self.is_convex() => Some(points.iter().all(|p| self.contains(p))),
            Region::CoordinatePlaneComplement { i, j } => {
                if points.iter().any(|p| !self.contains(p)) {
                    return Some(false);
                }
                // conv avoids the plane iff the projected hull avoids the origin
                let flat: Vec<Point<S>> = points
                    .iter()
                    .map(|p| Point::new(vec![p[*i].clone(), p[*j].clone()]))
                    .collect();
                let set = FinitePointSet::new(flat).ok()?;
                hull_contains(&set, &Point::zeros(2)).ok().map(|hit| !hit)
            }
            Region::Translate { region, by } => {
                let moved: Vec<Point<S>> = points.iter().map(|p| p - by).collect();
                region.hull_inside(&moved)
            }
            Region::Intersection { regions } => {
                let mut all = true;
                for g in regions {
                    match g.hull_inside(points) {
                        Some(false) => return Some(false),
                        None => all = false,
                        Some(true) => {}
                    }
                }
                all.then_some(true)
            }
            Region::Union { regions } => regions
                .iter()
                .any(|g| g.hull_inside(points) == Some(true))
                .then_some(true),
            _ if points.iter().any(|p| !self.contains(p)) => Some(false),
            _ if points.len() <= 2
                && self.contains_segment(&points[0], &points[points.len() - 1]) =>
            {
                Some(true)
            }
            _ => None,
        }
    }
}

/// Squared distance from `p` to the segment `[a, b]`.
pub fn segment_dist_sq<S: Scalar>(a: &Point<S>, b: &Point<S>, p: &Point<S>) -> S {
    let d = b - a;
    let len = d.norm_sq();
    if len.is_zero() {
        return p.dist_sq(a);
    }
    let t = (p - a).dot(&d) / len;
    let t = S::min_of(S::max_of(t, S::zero()), S::one());
    a.lerp(b, &t).dist_sq(p)
}
