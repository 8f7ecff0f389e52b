//! Path components of sampled steps and of the ambient space, and the
//! comparison of the ambient components with the direct limit of the
//! step components.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::direct_limits::{
    set_colimit, universal_map, Cone, DirectSystemOfSets, UniversalMapReport, Witness,
};
use crate::error::{Error, Result};
use crate::filtered::{FilteredSpaceModel, Filtration};
use crate::geometry::Point;
use crate::region::Region;
use crate::scalar::Scalar;

/// Sample points joined by edges whose segments lie in a region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SampleGraph<S: Scalar> {
    pub points: Vec<Point<S>>,
    pub edges: Vec<(usize, usize)>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl<S: Scalar> SampleGraph<S> {
    /// All pairs at distance at most `max_len` whose segment is certified
    /// inside `region`.
    pub fn certified(points: Vec<Point<S>>, region: &Region<S>, max_len: Option<&S>) -> Self {
        let cap = max_len.map(|c| c.clone() * c.clone());
        let mut edges = Vec::new();
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                if cap
                    .as_ref()
                    .is_some_and(|c| points[a].dist_sq(&points[b]) > *c)
                {
                    continue;
                }
                if region.contains_segment(&points[a], &points[b]) {
                    edges.push((a, b));
                }
            }
        }
        SampleGraph { points, edges }
    }

    /// First point or edge not certified inside `region`.
    pub fn check(&self, region: &Region<S>) -> Option<String> {
        if let Some(p) = self.points.iter().find(|p| !region.contains(p)) {
            return Some(format!("point {p} is outside"));
        }
        self.edges.iter().find_map(|&(a, b)| {
            if a >= self.points.len() || b >= self.points.len() {
                Some(format!("edge ({a}, {b}) is out of range"))
            } else if !region.contains_segment(&self.points[a], &self.points[b]) {
                Some(format!(
                    "segment {} to {} is not certified inside",
                    self.points[a], self.points[b]
                ))
            } else {
                None
            }
        })
    }

    /// Component label of every point, numbered by first occurrence.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.points.len());
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        let mut label: HashMap<usize, usize> = HashMap::new();
        (0..self.points.len())
            .map(|i| {
                let r = uf.find(i);
                let next = label.len();
                *label.entry(r).or_insert(next)
            })
            .collect()
    }

    fn lookup(&self) -> HashMap<String, usize> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.to_string(), i))
            .collect()
    }
}

/// Sample graphs of the steps `M_alpha` and of `M`, with a basepoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ComponentModel<S: Scalar> {
    pub space: FilteredSpaceModel<S>,
    /// `(alpha, graph of M_alpha)` in increasing `alpha`; each graph
    /// contains the points of the previous one.
    pub steps: Vec<(usize, SampleGraph<S>)>,
    pub ambient: SampleGraph<S>,
    pub basepoint: Point<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepComponents {
    pub index: usize,
    pub points: usize,
    pub edges: usize,
    pub components: usize,
    pub basepoint_component: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pi0Report {
    pub steps: Vec<StepComponents>,
    pub ambient_points: usize,
    pub ambient_components: usize,
    pub colimit_classes: usize,
    /// Merges of step components at higher indices.
    pub witnesses: Vec<Witness>,
    pub witnesses_verified: bool,
    pub psi: UniversalMapReport,
    /// Points or edges of a graph not certified in its region.
    pub violations: Vec<String>,
    /// The ambient component of the basepoint equals the union of its step
    /// components, as point sets.
    pub basepoint_union_equal: bool,
    pub basepoint_ambient_points: usize,
    pub basepoint_union_points: usize,
}

impl Pi0Report {
    pub fn holds(&self) -> bool {
        self.psi.bijective() && self.witnesses_verified && self.violations.is_empty()
    }
}

/// Maps each component of `from` to the component of `to` containing its
/// points; fails when the points of one component split.
fn induced(
    from: &SampleGraph<impl Scalar>,
    from_comp: &[usize],
    to: &HashMap<String, usize>,
    to_comp: &[usize],
    what: &str,
) -> Result<Vec<usize>> {
    let n = from_comp.iter().max().map_or(0, |m| m + 1);
    let mut map: Vec<Option<usize>> = vec![None; n];
    for (i, p) in from.points.iter().enumerate() {
        let j = *to
            .get(&p.to_string())
            .ok_or_else(|| Error::input(format!("point {p} is missing from {what}")))?;
        let c = to_comp[j];
        match map[from_comp[i]] {
            Some(prev) if prev != c => {
                return Err(Error::input(format!("a component splits in {what} at {p}")));
            }
            _ => map[from_comp[i]] = Some(c),
        }
    }
    Ok(map
        .into_iter()
        .map(|c| c.expect("components are non-empty"))
        .collect())
}

/// Components per step and ambiently, their direct limit and the map from
/// it to the ambient components.
pub fn pi0_report<S: Scalar>(model: &ComponentModel<S>) -> Result<Pi0Report> {
    if model.steps.is_empty() {
        return Err(Error::input("component model without steps"));
    }
    let space = &model.space;
    let mut violations = Vec::new();
    for (alpha, g) in &model.steps {
        let coords = &space.filtration.step(*alpha)?.coords;
        if let Some(p) = g.points.iter().find(|p| !p.support().is_subset(coords)) {
            violations.push(format!("step {alpha}: point {p} leaves the step"));
        }
        if let Some(v) = g.check(&space.carrier) {
            violations.push(format!("step {alpha}: {v}"));
        }
    }
    if let Some(v) = model.ambient.check(&space.carrier) {
        violations.push(format!("ambient: {v}"));
    }
    let comps: Vec<Vec<usize>> = model.steps.iter().map(|(_, g)| g.components()).collect();
    let ambient_comp = model.ambient.components();
    let ambient_lookup = model.ambient.lookup();

    let labels = model.steps.iter().map(|(a, _)| format!("M_{a}")).collect();
    let elements = comps
        .iter()
        .map(|c| {
            (0..c.iter().max().map_or(0, |m| m + 1))
                .map(|k| format!("c{k}"))
                .collect()
        })
        .collect();
    let mut edges = Vec::new();
    for k in 0..model.steps.len().saturating_sub(1) {
        let next = &model.steps[k + 1];
        let map = induced(
            &model.steps[k].1,
            &comps[k],
            &next.1.lookup(),
            &comps[k + 1],
            &format!("step {}", next.0),
        )?;
        edges.push((k, k + 1, map));
    }
    let sys = DirectSystemOfSets::new(labels, elements, edges)?;
    let colimit = set_colimit(&sys);
    let ambient_count = ambient_comp.iter().max().map_or(0, |m| m + 1);
    let maps = model
        .steps
        .iter()
        .zip(&comps)
        .map(|((_, g), c)| induced(g, c, &ambient_lookup, &ambient_comp, "the ambient graph"))
        .collect::<Result<_>>()?;
    let cone = Cone {
        target: (0..ambient_count).map(|k| format!("a{k}")).collect(),
        maps,
    };
    let psi = universal_map(&sys, &colimit, &cone)?;

    let p = model.basepoint.to_string();
    let mut union: BTreeSet<String> = BTreeSet::new();
    let mut steps = Vec::new();
    for ((alpha, g), c) in model.steps.iter().zip(&comps) {
        let at = g.points.iter().position(|q| q.to_string() == p);
        if let Some(i) = at {
            union.extend(
                g.points
                    .iter()
                    .zip(c)
                    .filter(|(_, &k)| k == c[i])
                    .map(|(q, _)| q.to_string()),
            );
        }
        steps.push(StepComponents {
            index: *alpha,
            points: g.points.len(),
            edges: g.edges.len(),
            components: c.iter().max().map_or(0, |m| m + 1),
            basepoint_component: at.map(|i| c[i]),
        });
    }
    let ambient_set: BTreeSet<String> = match ambient_lookup.get(&p) {
        Some(&i) => model
            .ambient
            .points
            .iter()
            .zip(&ambient_comp)
            .filter(|(_, &k)| k == ambient_comp[i])
            .map(|(q, _)| q.to_string())
            .collect(),
        None => BTreeSet::new(),
    };
    Ok(Pi0Report {
        steps,
        ambient_points: model.ambient.points.len(),
        ambient_components: ambient_count,
        colimit_classes: colimit.classes.len(),
        witnesses_verified: colimit.verify(&sys),
        witnesses: colimit.witnesses,
        psi,
        violations,
        basepoint_union_equal: !ambient_set.is_empty() && ambient_set == union,
        basepoint_ambient_points: ambient_set.len(),
        basepoint_union_points: union.len(),
    })
}

/// Certified graphs on nested point sets: step `alpha` gets the points of
/// the earlier steps plus `fresh[alpha]`; the ambient graph gets every
/// point plus `extra`.
pub fn nested_model<S: Scalar>(
    space: FilteredSpaceModel<S>,
    fresh: Vec<Vec<Point<S>>>,
    extra: Vec<Point<S>>,
    basepoint: Point<S>,
    max_len: Option<&S>,
) -> Result<ComponentModel<S>> {
    let indices: Vec<usize> = space.filtration.steps().iter().map(|s| s.index).collect();
    if fresh.len() != indices.len() {
        return Err(Error::input("one point list per step is required"));
    }
    let mut acc: Vec<Point<S>> = Vec::new();
    let mut steps = Vec::new();
    for (alpha, pts) in indices.into_iter().zip(fresh) {
        for p in pts {
            if !acc.contains(&p) {
                acc.push(p);
            }
        }
        steps.push((
            alpha,
            SampleGraph::certified(acc.clone(), &space.carrier, max_len),
        ));
    }
    for p in extra {
        if !acc.contains(&p) {
            acc.push(p);
        }
    }
    let ambient = SampleGraph::certified(acc, &space.carrier, max_len);
    Ok(ComponentModel {
        space,
        steps,
        ambient,
        basepoint,
    })
}

fn dyadic<S: Scalar>(rng: &mut impl Rng, lo: i64, hi: i64) -> S {
    S::from_ratio(rng.random_range(lo * 4..=hi * 4), 4)
}

/// A random union of balls in `S^3` filtered by `E_1, E_2, E_3`, sampled
/// by nested point sets; the first ball is centred on the first axis at
/// the basepoint.
pub fn random_component_model<S: Scalar>(rng: &mut impl Rng) -> Result<ComponentModel<S>> {
    let dim = 3;
    let balls = rng.random_range(2..=4);
    let mut regions = Vec::new();
    let base = Point::new(vec![dyadic(rng, -2, 2), S::zero(), S::zero()]);
    for k in 0..balls {
        let c = if k == 0 {
            base.clone()
        } else {
            Point::new((0..dim).map(|_| dyadic(rng, -3, 3)).collect())
        };
        regions.push(Region::open_ball(
            c,
            S::from_ratio(rng.random_range(4..=8), 4),
        ));
    }
    let carrier = Region::Union { regions };
    let space = FilteredSpaceModel::new(Filtration::coordinate_chain(dim), carrier, S::one())?;
    let mut fresh = Vec::new();
    for n in 1..=dim {
        let mut pts = if n == 1 {
            vec![base.clone()]
        } else {
            Vec::new()
        };
        let mut tries = 0;
        while pts.len() < 8 && tries < 400 {
            tries += 1;
            let p = Point::new(
                (0..dim)
                    .map(|i| if i < n { dyadic(rng, -4, 4) } else { S::zero() })
                    .collect(),
            );
            if space.carrier.contains(&p) {
                pts.push(p);
            }
        }
        fresh.push(pts);
    }
    nested_model(space, fresh, Vec::new(), base, Some(&S::from_count(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(c: &[i64]) -> Point<Rational> {
        Point::from_i64(c)
    }

    fn two_balls() -> FilteredSpaceModel<Rational> {
        let ball = |x| Region::open_ball(pt(&[x, 0]), Rational::from_ratio(3, 2));
        let carrier = Region::Union {
            regions: vec![ball(-2), ball(2)],
        };
        FilteredSpaceModel::new(
            Filtration::coordinate_chain(2),
            carrier,
            Rational::from_count(1),
        )
        .unwrap()
    }

    #[test]
    fn two_balls_have_two_classes_everywhere() {
        let fresh = vec![
            vec![pt(&[2, 0]), pt(&[-2, 0])],
            vec![pt(&[2, 1]), pt(&[-2, 1])],
        ];
        let m = nested_model(two_balls(), fresh, vec![], pt(&[2, 0]), None).unwrap();
        let r = pi0_report(&m).unwrap();
        assert!(r.holds());
        assert!(r.steps.iter().all(|s| s.components == 2));
        assert_eq!(r.colimit_classes, 2);
        assert!(r.basepoint_union_equal);
    }

    #[test]
    fn merge_is_witnessed_at_the_higher_step() {
        // the bridge point (0,1) only exists in the second step
        let carrier = Region::Union {
            regions: vec![
                Region::open_ball(pt(&[-1, 0]), Rational::from_ratio(3, 2)),
                Region::open_ball(pt(&[1, 0]), Rational::from_ratio(3, 2)),
                Region::open_ball(pt(&[0, 1]), Rational::from_ratio(3, 2)),
            ],
        };
        let space = FilteredSpaceModel::new(
            Filtration::coordinate_chain(2),
            carrier,
            Rational::from_count(1),
        )
        .unwrap();
        let fresh = vec![
            vec![pt(&[-2, 0]), pt(&[2, 0])],
            vec![pt(&[-1, 1]), pt(&[1, 1])],
        ];
        let m = nested_model(
            space,
            fresh,
            vec![],
            pt(&[2, 0]),
            Some(&Rational::from_ratio(5, 2)),
        )
        .unwrap();
        let r = pi0_report(&m).unwrap();
        assert_eq!(r.steps[0].components, 2);
        assert_eq!(r.steps[1].components, 1);
        assert_eq!(r.colimit_classes, 1);
        assert!(r.witnesses.iter().any(|w| w.gamma == 1));
        assert!(r.holds());
    }

    #[test]
    fn convex_carrier_has_one_class() {
        let carrier = Region::open_ball(pt(&[0, 0]), Rational::from_count(5));
        let space = FilteredSpaceModel::new(
            Filtration::coordinate_chain(2),
            carrier,
            Rational::from_count(1),
        )
        .unwrap();
        let fresh = vec![vec![pt(&[0, 0]), pt(&[3, 0])], vec![pt(&[1, 2])]];
        let r =
            pi0_report(&nested_model(space, fresh, vec![], pt(&[0, 0]), None).unwrap()).unwrap();
        assert!(r.steps.iter().all(|s| s.components == 1));
        assert!(r.holds() && r.basepoint_union_equal);
    }

    #[test]
    fn random_models_satisfy_the_union_equality() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let m = random_component_model::<Rational>(&mut rng).unwrap();
            let r = pi0_report(&m).unwrap();
            assert!(r.holds() && r.basepoint_union_equal, "{r:?}");
        }
    }
}
