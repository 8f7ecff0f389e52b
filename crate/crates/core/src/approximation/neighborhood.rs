//! Finite intersections of subbasic neighbourhoods `[K, W]` of maps.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Simplex};
use crate::lp::{minimize, LpOutcome};
use crate::plmap::{MapEval, PLMap};
use crate::region::Region;
use crate::scalar::Scalar;
use crate::simplicial::SimplicialComplex;

/// A compact subset of the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    content = "items",
    rename_all = "snake_case",
    bound = "S: Scalar"
)]
pub enum CompactSet<S: Scalar> {
    /// Union of closed simplices.
    Simplices(Vec<Simplex<S>>),
    Points(Vec<Point<S>>),
}

impl<S: Scalar> CompactSet<S> {
    pub fn contains(&self, x: &Point<S>) -> bool {
        match self {
            CompactSet::Simplices(s) => s.iter().any(|s| s.contains(x)),
            CompactSet::Points(p) => p.iter().any(|p| p == x),
        }
    }

    /// Exact max-norm distance from `x`.
    pub fn max_distance(&self, x: &Point<S>) -> S {
        match self {
            CompactSet::Simplices(s) => s
                .iter()
                .map(|s| max_norm_distance(s, x))
                .fold(None, min_opt)
                .unwrap_or_else(S::zero),
            CompactSet::Points(p) => p
                .iter()
                .map(|p| p.max_dist(x))
                .fold(None, min_opt)
                .unwrap_or_else(S::zero),
        }
    }
}

fn min_opt<S: Scalar>(acc: Option<S>, v: S) -> Option<S> {
    Some(match acc {
        None => v,
        Some(a) => S::min_of(a, v),
    })
}

/// `{ f : f(K) subset W }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Constraint<S: Scalar> {
    pub set: CompactSet<S>,
    pub region: Region<S>,
}

/// `[K_1, W_1] cap ... cap [K_l, W_l]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct NeighborhoodSpec<S: Scalar> {
    pub constraints: Vec<Constraint<S>>,
}

/// File form: simplices are referenced by index into the domain complex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct NeighborhoodFile<S: Scalar> {
    pub constraints: Vec<ConstraintFile<S>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ConstraintFile<S: Scalar> {
    #[serde(default)]
    pub simplices: Vec<usize>,
    #[serde(default)]
    pub points: Vec<Point<S>>,
    pub region: Region<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct ConstraintCheck<S: Scalar> {
    pub index: usize,
    pub holds: bool,
    /// Decided without sampling.
    pub exact: bool,
    pub samples: usize,
    /// A domain point whose image escapes.
    pub witness: Option<Point<S>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct MembershipReport<S: Scalar> {
    pub holds: bool,
    pub exact: bool,
    pub checks: Vec<ConstraintCheck<S>>,
}

impl<S: Scalar> MembershipReport<S> {
    fn from_checks(checks: Vec<ConstraintCheck<S>>) -> Self {
        MembershipReport {
            holds: checks.iter().all(|c| c.holds),
            exact: checks.iter().all(|c| c.exact),
            checks,
        }
    }

    /// Constraint-wise conjunction of two reports on the same spec.
    pub fn and(self, other: MembershipReport<S>) -> Self {
        let checks = self
            .checks
            .into_iter()
            .zip(other.checks)
            .map(|(a, b)| {
                let holds = a.holds && b.holds;
                let exact = if holds {
                    a.exact && b.exact
                } else {
                    (!a.holds && a.exact) || (!b.holds && b.exact)
                };
                ConstraintCheck {
                    index: a.index,
                    holds,
                    exact,
                    samples: a.samples + b.samples,
                    witness: a.witness.or(b.witness),
                }
            })
            .collect();
        Self::from_checks(checks)
    }
}

const GRID_MESH: usize = 4;

impl<S: Scalar> NeighborhoodSpec<S> {
    pub fn new(constraints: Vec<Constraint<S>>) -> Self {
        NeighborhoodSpec { constraints }
    }

    /// `[|K|, W]` for the whole domain.
    pub fn whole(complex: &SimplicialComplex<S>, region: Region<S>) -> Self {
        let simplices = complex
            .maximal_simplices()
            .into_iter()
            .map(|i| complex.simplex(i))
            .collect();
        NeighborhoodSpec {
            constraints: vec![Constraint {
                set: CompactSet::Simplices(simplices),
                region,
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn from_file(file: NeighborhoodFile<S>, complex: &SimplicialComplex<S>) -> Result<Self> {
        let mut constraints = Vec::new();
        for (j, c) in file.constraints.into_iter().enumerate() {
            let set = match (c.simplices.is_empty(), c.points.is_empty()) {
                (false, true) => {
                    let mut s = Vec::new();
                    for &i in &c.simplices {
                        if i >= complex.len() {
                            return Err(Error::input(format!(
                                "constraint {j}: simplex {i} is out of range"
                            )));
                        }
                        s.push(complex.simplex(i));
                    }
                    CompactSet::Simplices(s)
                }
                (true, false) => {
                    for p in &c.points {
                        p.check_dim(complex.ambient_dim())?;
                        if !complex.contains_point(p) {
                            return Err(Error::input(format!(
                                "constraint {j}: point {p} is outside the domain"
                            )));
                        }
                    }
                    CompactSet::Points(c.points)
                }
                _ => {
                    return Err(Error::input(format!(
                        "constraint {j}: give exactly one of simplices or points"
                    )))
                }
            };
            constraints.push(Constraint {
                set,
                region: c.region,
            });
        }
        Ok(NeighborhoodSpec { constraints })
    }

    /// Adds `[K, W]` for every constraint of `other`.
    pub fn extend(&mut self, other: NeighborhoodSpec<S>) {
        self.constraints.extend(other.constraints);
    }

    /// Decides membership of a PL map: exact wherever the domain simplices
    /// of `map` tile the constraint simplices and the region admits an exact
    /// hull test, grid-sampled elsewhere.
    pub fn check_pl(&self, map: &PLMap<S>) -> Result<MembershipReport<S>> {
        let dom = map.domain();
        let mut by_rank: Vec<Vec<(usize, Bbox)>> = vec![Vec::new(); dom.rank() + 1];
        for (i, sx) in dom.simplices().iter().enumerate() {
            by_rank[sx.len()].push((i, bbox(sx.iter().map(|&v| dom.vertex(v)))));
        }
        let mut checks = Vec::new();
        for (index, c) in self.constraints.iter().enumerate() {
            let mut check = ConstraintCheck {
                index,
                holds: true,
                exact: true,
                samples: 0,
                witness: None,
            };
            match &c.set {
                CompactSet::Points(ps) => {
                    for p in ps {
                        if !c.region.contains(&map.eval(p)?) {
                            check.holds = false;
                            check.witness = Some(p.clone());
                            break;
                        }
                    }
                }
                CompactSet::Simplices(ks) => {
                    'outer: for k in ks {
                        let kb = bbox(k.vertices().iter());
                        let mut covered = S::zero();
                        let candidates = by_rank.get(k.rank()).map_or(&[][..], Vec::as_slice);
                        for (i, b) in candidates {
                            if !kb.encloses(b) {
                                continue;
                            }
                            let cell = dom.simplex(*i);
                            if !cell.vertices().iter().all(|v| k.contains(v)) {
                                continue;
                            }
                            covered = covered + k.relative_volume(&cell)?;
                            let images: Vec<Point<S>> = dom.simplices()[*i]
                                .iter()
                                .map(|&v| map.value(v).clone())
                                .collect();
                            match c.region.hull_inside(&images) {
                                Some(true) => {}
                                Some(false) => {
                                    check.holds = false;
                                    check.exact = true;
                                    check.witness = Some(escaping_point(&cell, &images, &c.region));
                                    break 'outer;
                                }
                                None => {
                                    check.exact = false;
                                    for (x, y) in grid_images(&cell, &images) {
                                        check.samples += 1;
                                        if !c.region.contains(&y) {
                                            check.holds = false;
                                            check.exact = true;
                                            check.witness = Some(x);
                                            break 'outer;
                                        }
                                    }
                                }
                            }
                        }
                        if !covered.approx_eq(&S::one()) {
                            check.exact = false;
                            for x in k.grid_points(GRID_MESH) {
                                check.samples += 1;
                                if !c.region.contains(&map.eval(&x)?) {
                                    check.holds = false;
                                    check.exact = true;
                                    check.witness = Some(x);
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
            checks.push(check);
        }
        Ok(MembershipReport::from_checks(checks))
    }

    /// Sampled membership for an arbitrary map: vertices plus `per_simplex`
    /// random points of every constraint simplex.
    pub fn check_sampled(
        &self,
        map: &dyn MapEval<S>,
        per_simplex: usize,
        rng: &mut impl Rng,
    ) -> Result<MembershipReport<S>> {
        let mut checks = Vec::new();
        for (index, c) in self.constraints.iter().enumerate() {
            let mut check = ConstraintCheck {
                index,
                holds: true,
                exact: false,
                samples: 0,
                witness: None,
            };
            let probe = |x: Point<S>, check: &mut ConstraintCheck<S>| -> Result<bool> {
                check.samples += 1;
                if c.region.contains(&map.eval(&x)?) {
                    return Ok(true);
                }
                check.holds = false;
                check.witness = Some(x);
                Ok(false)
            };
            match &c.set {
                CompactSet::Points(ps) => {
                    check.exact = true;
                    for p in ps {
                        if !probe(p.clone(), &mut check)? {
                            break;
                        }
                    }
                }
                CompactSet::Simplices(ks) => {
                    'outer: for k in ks {
                        let pts = k
                            .vertices()
                            .iter()
                            .cloned()
                            .chain(std::iter::once(k.barycenter()));
                        let random: Vec<Point<S>> =
                            (0..per_simplex).map(|_| k.random_point(rng)).collect();
                        for x in pts.chain(random) {
                            if !probe(x, &mut check)? {
                                break 'outer;
                            }
                        }
                    }
                }
            }
            if !check.holds {
                check.exact = true;
            }
            checks.push(check);
        }
        Ok(MembershipReport::from_checks(checks))
    }
}

#[derive(Clone, Debug)]
struct Bbox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Bbox {
    fn encloses(&self, other: &Bbox) -> bool {
        const SLACK: f64 = 1e-9;
        self.lo.iter().zip(&other.lo).all(|(a, b)| *b >= a - SLACK)
            && self.hi.iter().zip(&other.hi).all(|(a, b)| *b <= a + SLACK)
    }
}

fn bbox<'a, S: Scalar>(points: impl Iterator<Item = &'a Point<S>>) -> Bbox {
    let mut b = Bbox {
        lo: Vec::new(),
        hi: Vec::new(),
    };
    for p in points {
        let f = p.to_f64();
        if b.lo.is_empty() {
            b.lo = f.clone();
            b.hi = f;
            continue;
        }
        for (k, v) in f.into_iter().enumerate() {
            b.lo[k] = b.lo[k].min(v);
            b.hi[k] = b.hi[k].max(v);
        }
    }
    b
}

fn grid_images<S: Scalar>(cell: &Simplex<S>, images: &[Point<S>]) -> Vec<(Point<S>, Point<S>)> {
    let image = Simplex::new_unchecked(images.to_vec());
    let (xs, ys) = (cell.grid_points(GRID_MESH), image.grid_points(GRID_MESH));
    xs.into_iter().zip(ys).collect()
}

fn escaping_point<S: Scalar>(
    cell: &Simplex<S>,
    images: &[Point<S>],
    region: &Region<S>,
) -> Point<S> {
    grid_images(cell, images)
        .into_iter()
        .find(|(_, y)| !region.contains(y))
        .map(|(x, _)| x)
        .unwrap_or_else(|| cell.barycenter())
}

/// Exact `min_{y in simplex} |x - y|_inf` by linear programming.
pub fn max_norm_distance<S: Scalar>(simplex: &Simplex<S>, x: &Point<S>) -> S {
    let n = simplex.rank();
    let d = x.dim();
    // variables: lambda (n), s, slack (2d)
    let cols = n + 1 + 2 * d;
    let mut a = Vec::with_capacity(2 * d + 1);
    let mut b = Vec::with_capacity(2 * d + 1);
    for k in 0..d {
        for (sign, off) in [(S::one(), 0), (-S::one(), d)] {
            let mut row = vec![S::zero(); cols];
            for (i, v) in simplex.vertices().iter().enumerate() {
                row[i] = sign.clone() * v[k].clone();
            }
            row[n] = -S::one();
            row[n + 1 + off + k] = S::one();
            a.push(row);
            b.push(sign.clone() * x[k].clone());
        }
    }
    let mut row = vec![S::zero(); cols];
    for r in row.iter_mut().take(n) {
        *r = S::one();
    }
    a.push(row);
    b.push(S::one());
    let mut c = vec![S::zero(); cols];
    c[n] = S::one();
    match minimize(&a, &b, &c) {
        LpOutcome::Optimal { value, .. } => value,
        _ => unreachable!("the distance program is feasible and bounded below"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type P = Point<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn max_norm_distance_examples() {
        let s = Simplex::new(vec![
            P::from_i64(&[0, 0]),
            P::from_i64(&[2, 0]),
            P::from_i64(&[0, 2]),
        ])
        .unwrap();
        assert_eq!(max_norm_distance(&s, &P::from_i64(&[3, 3])), q(2, 1));
        assert_eq!(
            max_norm_distance(&s, &P::from_ratios(&[(1, 2), (1, 2)])),
            q(0, 1)
        );
        assert_eq!(max_norm_distance(&s, &P::from_i64(&[-1, 1])), q(1, 1));
    }

    #[test]
    fn pl_membership_is_exact_on_convex_regions() {
        let k = SimplicialComplex::from_simplex(
            &Simplex::new(vec![P::from_i64(&[0]), P::from_i64(&[1])]).unwrap(),
        );
        let f = PLMap::new(k.clone(), vec![P::from_i64(&[1, 0]), P::from_i64(&[0, 1])]).unwrap();
        let ball = Region::open_ball(P::zeros(2), q(11, 10));
        let r = NeighborhoodSpec::whole(&k, ball).check_pl(&f).unwrap();
        assert!(r.holds && r.exact);
        let r = NeighborhoodSpec::whole(&k, Region::CoordinatePlaneComplement { i: 0, j: 1 })
            .check_pl(&f)
            .unwrap();
        assert!(r.holds && r.exact);
        let g = PLMap::new(k.clone(), vec![P::from_i64(&[1, 0]), P::from_i64(&[-1, 0])]).unwrap();
        let r = NeighborhoodSpec::whole(&k, Region::CoordinatePlaneComplement { i: 0, j: 1 })
            .check_pl(&g)
            .unwrap();
        assert!(!r.holds && r.exact);
    }
}
