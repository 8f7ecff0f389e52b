//! The simultaneous approximation homotopy `Theta`, built level by level
//! over the skeleta of an iterated barycentric subdivision.
//!
//! A level of rank `r` owns a subdivision of its input complex, a convex
//! chart for every free top simplex and the constraint regions handed down
//! to the level below (the `(r-1)`-skeleton). On `[0, 1/2]` a level
//! straightens each top simplex towards the filling of the boundary values
//! inside its chart; on `[1/2, 1]` it runs the level below on the boundary
//! at double speed and keeps filling.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filling::{cone_decomposition, ConeDecomposition};
use crate::filtered::{FilteredSpaceModel, WellFilledChart};
use crate::geometry::{Point, Simplex};
use crate::plmap::{MapEval, PLMap};
use crate::region::Region;
use crate::scalar::{serde_scalar, Scalar};
use crate::simplicial::{SimplicialComplex, SubcomplexCarrier, Subdivision};

use super::neighborhood::{CompactSet, Constraint, NeighborhoodSpec};

/// A baked cell with the index of the top-complex simplex containing it.
pub type Home = (Vec<usize>, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EngineConfig {
    /// Cap on barycentric subdivisions per level.
    pub max_subdivision: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { max_subdivision: 6 }
    }
}

/// Chart of a free top simplex of some level.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct ChartAssignment<S: Scalar> {
    pub rank: usize,
    /// Vertex tuple in the level complex.
    pub simplex: Vec<usize>,
    /// Domain point whose image is the chart centre.
    pub center: Point<S>,
    #[serde(with = "serde_scalar")]
    pub radius: S,
    pub chart: WellFilledChart<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelReport {
    pub rank: usize,
    pub subdivisions: usize,
    pub simplices: usize,
    pub top_simplices: usize,
    pub frozen_top_simplices: usize,
    /// Largest diameter of a simplex of the level complex; every simplex of
    /// this size lies in a chart domain.
    pub mesh: f64,
}

#[derive(Clone, Debug)]
struct Level<S: Scalar> {
    rank: usize,
    complex: Arc<SimplicialComplex<S>>,
    subdivisions: usize,
    origin: Vec<usize>,
    /// Input simplex -> complex simplices of equal rank inside it.
    children: Vec<Vec<usize>>,
    frozen: Vec<bool>,
    charts: BTreeMap<usize, ChartAssignment<S>>,
    regions: Vec<Region<S>>,
    to_sub: Vec<usize>,
    from_sub: Vec<usize>,
    sub: Option<Box<Level<S>>>,
}

struct LevelInput<S: Scalar> {
    input: Arc<SimplicialComplex<S>>,
    parts: Vec<Vec<Region<S>>>,
    points: Vec<(Vec<Point<S>>, Region<S>)>,
    frozen: BTreeSet<usize>,
}

struct Fit<S: Scalar> {
    parts: Vec<Vec<Region<S>>>,
    charts: BTreeMap<usize, ChartAssignment<S>>,
}

/// Adds the parts of `r` not yet listed, splitting intersections so that
/// convex factors never limit chart radii.
fn push_part<S: Scalar>(list: &mut Vec<Region<S>>, r: &Region<S>) {
    match r {
        Region::Intersection { regions } => regions.iter().for_each(|g| push_part(list, g)),
        _ if !list.contains(r) => list.push(r.clone()),
        _ => {}
    }
}

/// Splits nested intersections into their distinct parts.
pub(crate) fn flatten<S: Scalar>(regions: Vec<Region<S>>) -> Vec<Region<S>> {
    let mut out: Vec<Region<S>> = Vec::new();
    for r in regions {
        let parts = match r {
            Region::Intersection { regions } => flatten(regions),
            other => vec![other],
        };
        for p in parts {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Largest multiple of `2^-20` not above `r`.
fn dyadic_floor<S: Scalar>(r: &S) -> S {
    const D: u64 = 1 << 20;
    let x = r.round_to(D);
    if x > *r {
        x - S::one() / S::from_count(D as usize)
    } else {
        x
    }
}

/// `B(q, R) cap (convex parts)` with `R` bounded by the inner radius of
/// every non-convex part; `None` when `q` misses a part.
pub(crate) fn convex_chart<S: Scalar>(
    q: &Point<S>,
    parts: &[Region<S>],
    max_radius: &S,
) -> Option<(S, Region<S>)> {
    let mut radius = max_radius.clone();
    let mut convex = Vec::new();
    for w in parts {
        if w.is_convex() {
            if !w.contains(q) {
                return None;
            }
            if *w != Region::FullSpace {
                convex.push(w.clone());
            }
        } else {
            radius = S::min_of(radius.clone(), w.inner_radius(q, &radius)?);
        }
    }
    let radius = dyadic_floor(&radius);
    if !radius.is_strictly_positive() {
        return None;
    }
    let mut all = vec![Region::open_ball(q.clone(), radius.clone())];
    all.extend(convex);
    Some((radius, Region::intersection(all)))
}

pub(crate) fn chart_from_image<S: Scalar>(
    image: Region<S>,
    model: &FilteredSpaceModel<S>,
) -> WellFilledChart<S> {
    WellFilledChart {
        translation: Point::zeros(model.dim()),
        core: Some(image.clone()),
        quarter: Some(image.clone()),
        image,
        alpha0: model.filtration.bottom(),
    }
}

fn choose_chart<S: Scalar>(
    complex: &SimplicialComplex<S>,
    d: usize,
    rank: usize,
    parts: &[Region<S>],
    images: &[Point<S>],
    gamma0: &PLMap<S>,
    model: &FilteredSpaceModel<S>,
) -> Result<Option<ChartAssignment<S>>> {
    let simplex = complex.simplex(d);
    let b = simplex.barycenter();
    let q0 = gamma0.eval(&b)?;
    let mut corners: Vec<(Point<S>, Point<S>)> = simplex
        .vertices()
        .iter()
        .cloned()
        .zip(images.iter().cloned())
        .collect();
    corners.sort_by(|a, b| {
        a.1.dist_sq(&q0)
            .partial_cmp(&b.1.dist_sq(&q0))
            .expect("ordered scalars")
    });
    let convex: Vec<&Region<S>> = parts.iter().filter(|w| w.is_convex()).collect();
    for (x, q) in std::iter::once((b, q0.clone())).chain(corners) {
        let Some((radius, image)) = convex_chart(&q, parts, &model.max_radius) else {
            continue;
        };
        let half = radius.clone() * S::half();
        let half_sq = half.clone() * half;
        if images
            .iter()
            .all(|p| p.dist_sq(&q) < half_sq && convex.iter().all(|w| w.contains(p)))
        {
            return Ok(Some(ChartAssignment {
                rank,
                simplex: complex.simplices()[d].clone(),
                center: x,
                radius,
                chart: chart_from_image(image, model),
            }));
        }
    }
    Ok(None)
}

/// Whether the image of a simplex under an affine map lies in `w`.
fn hull_in<S: Scalar>(w: &Region<S>, images: &[Point<S>]) -> bool {
    w.hull_inside(images).unwrap_or_else(|| {
        Simplex::new_unchecked(images.to_vec())
            .grid_points(4)
            .iter()
            .all(|p| w.contains(p))
    })
}

fn fit_level<S: Scalar>(
    sub: &Subdivision<S>,
    inp: &LevelInput<S>,
    gamma0: &PLMap<S>,
    model: &FilteredSpaceModel<S>,
) -> Result<Option<Fit<S>>> {
    let complex = &sub.complex;
    let n = complex.len();
    let rank = inp.input.rank();
    let vimg: Vec<Point<S>> = complex
        .vertices()
        .iter()
        .map(|v| gamma0.eval(v))
        .collect::<Result<_>>()?;
    let mut own: Vec<Vec<Region<S>>> = (0..n).map(|i| inp.parts[sub.origin[i]].clone()).collect();
    for (i, list) in own.iter_mut().enumerate() {
        push_part(list, &model.carrier);
        if inp.points.is_empty() {
            continue;
        }
        let s = complex.simplex(i);
        for (pts, w) in &inp.points {
            if pts.iter().any(|p| s.contains(p)) {
                push_part(list, w);
            }
        }
    }
    for (i, list) in own.iter().enumerate() {
        let images: Vec<Point<S>> = complex.simplices()[i]
            .iter()
            .map(|&v| vimg[v].clone())
            .collect();
        if !list.iter().all(|w| hull_in(w, &images)) {
            return Ok(None);
        }
    }
    let mut parts = own.clone();
    for (i, list) in own.iter().enumerate() {
        for f in complex.proper_faces(i) {
            for w in list {
                push_part(&mut parts[f], w);
            }
        }
    }
    let mut charts = BTreeMap::new();
    for d in complex.simplices_of_rank(rank).collect::<Vec<_>>() {
        if inp.frozen.contains(&sub.origin[d]) {
            continue;
        }
        let images: Vec<Point<S>> = complex.simplices()[d]
            .iter()
            .map(|&v| vimg[v].clone())
            .collect();
        match choose_chart(complex, d, rank, &parts[d], &images, gamma0, model)? {
            Some(c) => {
                charts.insert(d, c);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(Fit { parts, charts }))
}

fn build_level<S: Scalar>(
    inp: LevelInput<S>,
    gamma0: &PLMap<S>,
    model: &FilteredSpaceModel<S>,
    cfg: &EngineConfig,
) -> Result<Level<S>> {
    let rank = inp.input.rank();
    if rank <= 1 {
        let n = inp.input.len();
        let mut regions = Vec::with_capacity(n);
        for i in 0..n {
            let mut list = inp.parts[i].clone();
            push_part(&mut list, &model.carrier);
            let v = inp.input.simplex(i).barycenter();
            for (pts, w) in &inp.points {
                if pts.contains(&v) {
                    push_part(&mut list, w);
                }
            }
            regions.push(Region::intersection(list));
        }
        return Ok(Level {
            rank: 1,
            complex: Arc::clone(&inp.input),
            subdivisions: 0,
            origin: (0..n).collect(),
            children: (0..n).map(|i| vec![i]).collect(),
            frozen: (0..n).map(|i| inp.frozen.contains(&i)).collect(),
            charts: BTreeMap::new(),
            regions,
            to_sub: Vec::new(),
            from_sub: Vec::new(),
            sub: None,
        });
    }
    let mut sub = Subdivision::identity((*inp.input).clone());
    let mut fit = None;
    for m in 0..=cfg.max_subdivision {
        if m > 0 {
            sub = sub.refine();
        }
        if let Some(f) = fit_level(&sub, &inp, gamma0, model)? {
            fit = Some(f);
            break;
        }
    }
    let Fit { parts, charts } = fit.ok_or_else(|| {
        Error::resolution(format!(
            "the rank-{rank} simplices admit no convex chart cover after {} subdivisions",
            cfg.max_subdivision
        ))
    })?;
    let Subdivision {
        complex,
        origin,
        level,
    } = sub;
    let complex = Arc::new(complex);
    let n = complex.len();
    let frozen: Vec<bool> = origin.iter().map(|o| inp.frozen.contains(o)).collect();
    let mut children = vec![Vec::new(); inp.input.len()];
    for i in 0..n {
        if complex.simplices()[i].len() == inp.input.simplices()[origin[i]].len() {
            children[origin[i]].push(i);
        }
    }
    let mut zparts = parts.clone();
    for (&d, ch) in &charts {
        for f in complex.proper_faces(d) {
            push_part(&mut zparts[f], &ch.chart.image);
        }
    }
    let regions: Vec<Region<S>> = (0..n)
        .map(|i| match charts.get(&i) {
            Some(ch) => ch.chart.image.clone(),
            None if complex.simplices()[i].len() == rank => Region::intersection(parts[i].clone()),
            None => Region::intersection(zparts[i].clone()),
        })
        .collect();
    let skeleton = Arc::new(complex.skeleton(rank - 1));
    let from_sub: Vec<usize> = skeleton
        .simplices()
        .iter()
        .map(|s| {
            complex
                .index_of(s)
                .expect("skeleton simplices belong to the complex")
        })
        .collect();
    let mut to_sub = vec![usize::MAX; n];
    for (k, &i) in from_sub.iter().enumerate() {
        to_sub[i] = k;
    }
    let sub_input = LevelInput {
        parts: from_sub.iter().map(|&i| zparts[i].clone()).collect(),
        frozen: (0..from_sub.len())
            .filter(|&k| frozen[from_sub[k]])
            .collect(),
        input: skeleton,
        points: Vec::new(),
    };
    let lower = build_level(sub_input, gamma0, model, cfg)?;
    Ok(Level {
        rank,
        complex,
        subdivisions: level,
        origin,
        children,
        frozen,
        charts,
        regions,
        to_sub,
        from_sub,
        sub: Some(Box::new(lower)),
    })
}

/// Cells of a baked slice with the level simplex each one lies in.
struct Piece<S: Scalar> {
    vertices: Vec<Point<S>>,
    values: Vec<Point<S>>,
    cells: Vec<Vec<usize>>,
    homes: Vec<usize>,
}

impl<S: Scalar> Level<S> {
    fn lower(&self) -> &Level<S> {
        self.sub
            .as_deref()
            .expect("levels above rank one have a lower level")
    }

    fn locate_child(&self, s0: usize, x: &Point<S>) -> Result<usize> {
        for &c in &self.children[s0] {
            let Some(coords) = self.complex.simplex(c).barycentric_coordinates(x)?.inside() else {
                continue;
            };
            let verts = &self.complex.simplices()[c];
            let face: Vec<usize> = verts
                .iter()
                .zip(&coords)
                .filter(|(_, w)| !w.is_negligible())
                .map(|(&v, _)| v)
                .collect();
            return Ok(self
                .complex
                .index_of(&face)
                .expect("faces belong to the complex"));
        }
        Err(Error::input(format!(
            "point {x} is not in the expected simplex"
        )))
    }

    fn eval(&self, gamma: &dyn MapEval<S>, s0: usize, x: &Point<S>, t: &S) -> Result<Point<S>> {
        if self.rank == 1 {
            return gamma.eval(x);
        }
        let f = self.locate_child(s0, x)?;
        if self.complex.simplices()[f].len() < self.rank {
            if *t <= S::half() {
                return gamma.eval(x);
            }
            let s = t.clone() + t.clone() - S::one();
            return self.lower().eval(gamma, self.to_sub[f], x, &s);
        }
        self.eval_top(gamma, f, x, t)
    }

    fn eval_top(&self, gamma: &dyn MapEval<S>, d: usize, x: &Point<S>, t: &S) -> Result<Point<S>> {
        if self.frozen[d] {
            return gamma.eval(x);
        }
        let chart = &self.charts[&d].chart;
        let simplex = self.complex.simplex(d);
        let dec = cone_decomposition(&simplex, x)?;
        if *t <= S::half() {
            let fill = self.fill(d, &simplex, &dec, |p, _| Ok(chart.phi(&gamma.eval(p)?)))?;
            let gx = chart.phi(&gamma.eval(x)?);
            let two_t = t.clone() + t.clone();
            Ok(chart.phi_inv(&gx.lerp(&fill, &two_t)))
        } else {
            let s = t.clone() + t.clone() - S::one();
            let lower = self.lower();
            let fill = self.fill(d, &simplex, &dec, |p, face| {
                Ok(chart.phi(&lower.eval(gamma, self.to_sub[face], p, &s)?))
            })?;
            Ok(chart.phi_inv(&fill))
        }
    }

    /// `t_c g(anchor) + (1 - t_c) g(y)` with `g` given on faces of `d`.
    fn fill(
        &self,
        d: usize,
        simplex: &Simplex<S>,
        dec: &ConeDecomposition<S>,
        boundary: impl Fn(&Point<S>, usize) -> Result<Point<S>>,
    ) -> Result<Point<S>> {
        let verts = &self.complex.simplices()[d];
        let anchor_face = self
            .complex
            .index_of(&verts[..1])
            .expect("vertices belong to the complex");
        let a = boundary(&simplex.vertices()[0], anchor_face)?;
        match dec.projection(simplex, &dec.j) {
            None => Ok(a),
            Some(y) => {
                let tuple: Vec<usize> = dec.j.iter().map(|&i| verts[i]).collect();
                let face = self
                    .complex
                    .index_of(&tuple)
                    .expect("faces belong to the complex");
                Ok(boundary(&y, face)?.lerp(&a, &dec.t))
            }
        }
    }

    fn bake(&self, gamma: &dyn MapEval<S>, t: &S) -> Result<Piece<S>> {
        let c = &self.complex;
        let values_on = |pts: &[Point<S>]| {
            pts.iter()
                .map(|v| gamma.eval(v))
                .collect::<Result<Vec<_>>>()
        };
        if self.rank == 1 {
            let cells: Vec<Vec<usize>> = c.simplices().to_vec();
            return Ok(Piece {
                vertices: c.vertices().to_vec(),
                values: values_on(c.vertices())?,
                homes: (0..cells.len()).collect(),
                cells,
            });
        }
        let mut piece = if *t <= S::half() {
            let idx: Vec<usize> = (0..c.len())
                .filter(|&i| c.simplices()[i].len() < self.rank)
                .collect();
            Piece {
                vertices: c.vertices().to_vec(),
                values: values_on(c.vertices())?,
                cells: idx.iter().map(|&i| c.simplices()[i].clone()).collect(),
                homes: idx,
            }
        } else {
            let s = t.clone() + t.clone() - S::one();
            let lower = self.lower();
            let mut p = lower.bake(gamma, &s)?;
            for h in p.homes.iter_mut() {
                *h = self.from_sub[lower.origin[*h]];
            }
            p
        };
        let mut by_home: HashMap<usize, Vec<usize>> = HashMap::new();
        for (k, &h) in piece.homes.iter().enumerate() {
            by_home.entry(h).or_default().push(k);
        }
        let mut cones = Vec::new();
        for d in c.simplices_of_rank(self.rank) {
            let b = c.simplex(d).barycenter();
            let value = self.eval_top(gamma, d, &b, t)?;
            let apex = piece.vertices.len();
            piece.vertices.push(b);
            piece.values.push(value);
            for f in c.proper_faces(d) {
                for &k in by_home.get(&f).map_or(&[][..], Vec::as_slice) {
                    let mut cell = piece.cells[k].clone();
                    cell.push(apex);
                    cones.push((cell, d));
                }
            }
        }
        for (cell, d) in cones {
            piece.cells.push(cell);
            piece.homes.push(d);
        }
        Ok(piece)
    }

    fn anchors(&self) -> Vec<Point<S>> {
        match &self.sub {
            None => self.complex.vertices().to_vec(),
            Some(l) => l.anchors(),
        }
    }

    fn for_each<'a>(&'a self, out: &mut Vec<&'a Level<S>>) {
        out.push(self);
        if let Some(l) = &self.sub {
            l.for_each(out);
        }
    }

    fn report(&self) -> LevelReport {
        let tops: Vec<usize> = self.complex.simplices_of_rank(self.rank).collect();
        LevelReport {
            rank: self.rank,
            subdivisions: self.subdivisions,
            simplices: self.complex.len(),
            top_simplices: tops.len(),
            frozen_top_simplices: tops.iter().filter(|&&d| self.frozen[d]).count(),
            mesh: self.complex.max_diameter_sq().to_f64_lossy().sqrt(),
        }
    }
}

/// Evaluator of `Theta(gamma, x, t)` for maps `gamma` near the initial map.
#[derive(Clone, Debug)]
pub struct ThetaEvaluator<S: Scalar> {
    domain: Arc<SimplicialComplex<S>>,
    top: Level<S>,
    relative: SubcomplexCarrier,
    target_dim: usize,
}

/// `x -> Theta(gamma, x, t)` for a fixed `gamma` and `t`.
pub struct ThetaSlice<'a, S: Scalar> {
    pub theta: &'a ThetaEvaluator<S>,
    pub gamma: &'a dyn MapEval<S>,
    pub t: S,
}

impl<S: Scalar> MapEval<S> for ThetaSlice<'_, S> {
    fn target_dim(&self) -> usize {
        self.theta.target_dim
    }

    fn eval(&self, x: &Point<S>) -> Result<Point<S>> {
        self.theta.evaluate(self.gamma, x, &self.t)
    }
}

impl<S: Scalar> ThetaEvaluator<S> {
    pub fn domain(&self) -> &SimplicialComplex<S> {
        &self.domain
    }

    pub fn relative(&self) -> &SubcomplexCarrier {
        &self.relative
    }

    pub fn evaluate(&self, gamma: &dyn MapEval<S>, x: &Point<S>, t: &S) -> Result<Point<S>> {
        if *t < S::zero() || *t > S::one() {
            return Err(Error::input(format!("time {t} is outside [0, 1]")));
        }
        let (s0, _) = self
            .domain
            .locate(x)
            .ok_or_else(|| Error::input(format!("point {x} is outside the domain")))?;
        self.top.eval(gamma, s0, x, t)
    }

    pub fn slice<'a>(&'a self, gamma: &'a dyn MapEval<S>, t: S) -> ThetaSlice<'a, S> {
        ThetaSlice {
            theta: self,
            gamma,
            t,
        }
    }

    /// The slice at `t` as a PL map; exact when `gamma` is affine on the
    /// simplices of every level complex.
    pub fn bake_slice(&self, gamma: &dyn MapEval<S>, t: &S) -> Result<PLMap<S>> {
        Ok(self.bake_with_homes(gamma, t)?.0)
    }

    /// Baked slice plus, per maximal domain cell of the result, the top-level
    /// simplex containing it.
    pub fn bake_with_homes(&self, gamma: &dyn MapEval<S>, t: &S) -> Result<(PLMap<S>, Vec<Home>)> {
        let piece = self.top.bake(gamma, t)?;
        let complex = SimplicialComplex::new(piece.vertices.clone(), piece.cells.clone())?;
        let homes = piece.cells.into_iter().zip(piece.homes).collect();
        Ok((PLMap::new(complex, piece.values)?, homes))
    }

    /// The finite set `S` kept fixed for all `t`.
    pub fn anchors(&self) -> Vec<Point<S>> {
        self.top.anchors()
    }

    pub fn levels(&self) -> Vec<LevelReport> {
        let mut out = Vec::new();
        self.top.for_each(&mut out);
        out.into_iter().map(Level::report).collect()
    }

    /// Charts of all free top simplices, by level.
    pub fn charts(&self) -> Vec<&ChartAssignment<S>> {
        let mut out = Vec::new();
        self.top.for_each(&mut out);
        out.into_iter().flat_map(|l| l.charts.values()).collect()
    }

    /// Charts of the top level only, keyed by simplex index of the top complex.
    pub fn top_charts(&self) -> &BTreeMap<usize, ChartAssignment<S>> {
        &self.top.charts
    }

    /// Top-level complex.
    pub fn top_complex(&self) -> &SimplicialComplex<S> {
        &self.top.complex
    }

    /// Whether the top-level simplex `d` has its origin in the relative carrier.
    pub fn top_frozen(&self, d: usize) -> bool {
        self.top.frozen[d]
    }

    /// `P`: one constraint per simplex of every level complex.
    pub fn neighborhood(&self) -> NeighborhoodSpec<S> {
        let mut out = Vec::new();
        self.top.for_each(&mut out);
        let mut constraints = Vec::new();
        for l in out {
            for (i, region) in l.regions.iter().enumerate() {
                if *region == Region::FullSpace {
                    continue;
                }
                constraints.push(Constraint {
                    set: CompactSet::Simplices(vec![l.complex.simplex(i)]),
                    region: region.clone(),
                });
            }
        }
        NeighborhoodSpec::new(constraints)
    }

    /// Every constraint simplex of `P`, across all levels.
    pub fn constraint_simplices(&self) -> Vec<Simplex<S>> {
        let mut out = Vec::new();
        self.top.for_each(&mut out);
        out.into_iter()
            .flat_map(|l| (0..l.complex.len()).map(|i| l.complex.simplex(i)))
            .collect()
    }

    /// Regions of `P` whose constraint simplex contains `x`.
    pub fn regions_at(&self, x: &Point<S>) -> Vec<Region<S>> {
        let mut out = Vec::new();
        self.top.for_each(&mut out);
        let mut regions = Vec::new();
        for l in out {
            for (i, region) in l.regions.iter().enumerate() {
                if l.complex.simplex(i).contains(x) {
                    push_part(&mut regions, region);
                }
            }
        }
        regions
    }
}

/// Output of the simultaneous approximation engine.
#[derive(Clone, Debug)]
pub struct SimultaneousApproximation<S: Scalar> {
    pub anchors: Vec<Point<S>>,
    pub neighborhood: NeighborhoodSpec<S>,
    pub theta: ThetaEvaluator<S>,
}

/// Builds `S`, `P` and `Theta` for `gamma0` in `Q`, relative to the
/// subcomplex `relative` of the domain.
pub fn simultaneous_approximation<S: Scalar>(
    sigma: &SimplicialComplex<S>,
    gamma0: &PLMap<S>,
    q: &NeighborhoodSpec<S>,
    relative: &SubcomplexCarrier,
    model: &FilteredSpaceModel<S>,
    cfg: &EngineConfig,
) -> Result<SimultaneousApproximation<S>> {
    let dom = gamma0.domain();
    if dom.vertices() != sigma.vertices() || dom.simplices() != sigma.simplices() {
        return Err(Error::input(
            "the initial map is not defined on the given complex",
        ));
    }
    if gamma0.target_dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: gamma0.target_dim(),
        });
    }
    relative.validate(sigma)?;
    let in_carrier = NeighborhoodSpec::whole(sigma, model.carrier.clone()).check_pl(gamma0)?;
    if !in_carrier.holds {
        return Err(Error::precondition("the initial map leaves the carrier"));
    }
    if !q.check_pl(gamma0)?.holds {
        return Err(Error::precondition(
            "the initial map is not in the neighbourhood",
        ));
    }
    let mut parts = vec![Vec::new(); sigma.len()];
    let mut points = Vec::new();
    for (j, c) in q.constraints.iter().enumerate() {
        match &c.set {
            CompactSet::Points(p) => points.push((p.clone(), c.region.clone())),
            CompactSet::Simplices(ks) => {
                for k in ks {
                    let mut covered = S::zero();
                    for i in 0..sigma.len() {
                        let s = sigma.simplex(i);
                        if !s.vertices().iter().all(|v| k.contains(v)) {
                            continue;
                        }
                        push_part(&mut parts[i], &c.region);
                        if s.rank() == k.rank() {
                            covered = covered + k.relative_volume(&s)?;
                        }
                    }
                    if !covered.approx_eq(&S::one()) {
                        return Err(Error::input(format!(
                            "constraint {j}: simplices must be unions of simplices of the complex; use points for other compact sets"
                        )));
                    }
                }
            }
        }
    }
    let frozen: BTreeSet<usize> = (0..sigma.len())
        .filter(|&i| relative.contains_simplex(i))
        .collect();
    let domain = Arc::new(sigma.clone());
    let top = build_level(
        LevelInput {
            input: Arc::clone(&domain),
            parts,
            points,
            frozen,
        },
        gamma0,
        model,
        cfg,
    )?;
    let theta = ThetaEvaluator {
        domain,
        top,
        relative: relative.clone(),
        target_dim: model.dim(),
    };
    let neighborhood = if sigma.rank() <= 1 {
        q.clone()
    } else {
        theta.neighborhood()
    };
    Ok(SimultaneousApproximation {
        anchors: theta.anchors(),
        neighborhood,
        theta,
    })
}
