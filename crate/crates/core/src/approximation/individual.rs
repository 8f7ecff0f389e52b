//! Individual approximation: push the anchor values that miss the target
//! step into it inside small max-norm balls, then run `Theta` on the pushed
//! maps. The result is a homotopy relative to the frozen subcomplex ending
//! in a PL map with support in a single step.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtered::FilteredSpaceModel;
use crate::geometry::{Point, Simplex};
use crate::plmap::{MapEval, PLMap, PLMapFile};
use crate::region::Region;
use crate::scalar::{serde_scalar, Scalar};
use crate::simplicial::{SimplicialComplex, SubcomplexCarrier};

use super::neighborhood::{max_norm_distance, NeighborhoodSpec};
use super::theta::{
    convex_chart, flatten, simultaneous_approximation, EngineConfig, LevelReport,
    SimultaneousApproximation,
};

/// Denominator of the rounding applied to push targets.
pub const PUSH_DENOMINATOR: u64 = 1 << 40;

/// Deepest dyadic radius tried by the push-radius search.
pub const MAX_EPSILON_EXPONENT: u32 = 40;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndividualConfig {
    pub engine: EngineConfig,
    /// Number of equally spaced times checked along the homotopy.
    pub t_grid: usize,
    /// Random points per constraint simplex in sampled checks.
    pub samples_per_simplex: usize,
    pub seed: u64,
}

impl Default for IndividualConfig {
    fn default() -> Self {
        IndividualConfig {
            engine: EngineConfig::default(),
            t_grid: 50,
            samples_per_simplex: 4,
            seed: 0,
        }
    }
}

/// An anchor whose value is moved by the push map.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct PushedPoint<S: Scalar> {
    pub x: Point<S>,
    pub from: Point<S>,
    pub to: Point<S>,
    /// The original value is outside the top step.
    pub required: bool,
}

/// `G(., t)`: `gamma0` with each pushed value moved towards its target by
/// a radial bump of max-norm radius `epsilon`.
#[derive(Clone, Debug)]
pub struct PushMap<S: Scalar> {
    gamma0: PLMap<S>,
    pushed: Arc<Vec<PushedPoint<S>>>,
    epsilon: S,
    t: S,
}

impl<S: Scalar> PushMap<S> {
    pub fn new(gamma0: PLMap<S>, pushed: Arc<Vec<PushedPoint<S>>>, epsilon: S, t: S) -> Self {
        PushMap {
            gamma0,
            pushed,
            epsilon,
            t,
        }
    }
}

impl<S: Scalar> MapEval<S> for PushMap<S> {
    fn target_dim(&self) -> usize {
        self.gamma0.target_dim()
    }

    fn eval(&self, z: &Point<S>) -> Result<Point<S>> {
        let g = self.gamma0.eval(z)?;
        if self.t.is_zero() {
            return Ok(g);
        }
        let zf = z.to_f64();
        let reach = self.epsilon.to_f64_lossy() * (1.0 + 1e-9) + 1e-12;
        for p in self.pushed.iter() {
            if p.x
                .to_f64()
                .iter()
                .zip(&zf)
                .any(|(a, b)| (a - b).abs() > reach)
            {
                continue;
            }
            let d = p.x.max_dist(z);
            if d < self.epsilon {
                let w = d / self.epsilon.clone();
                let target = p.to.lerp(&g, &w);
                return Ok(g.lerp(&target, &self.t));
            }
        }
        Ok(g)
    }
}

/// Checks of one time slice `H(., t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceReport {
    pub index: usize,
    pub t: String,
    /// The baked slice lies in `Q`.
    pub q_baked: bool,
    /// The baked slice is `H(., t)` itself and its check was exact.
    pub q_exact: bool,
    /// `H(., t)` lies in `Q` at every sampled point.
    pub q_sampled: bool,
    pub samples: usize,
    /// `H(x, t) = gamma0(x)` on the relative subcomplex.
    pub relative_fixed: bool,
}

impl SliceReport {
    pub fn holds(&self) -> bool {
        self.q_baked && self.q_sampled && self.relative_fixed
    }
}

/// `H`, its endpoint `eta`, the step `beta` and the certificates.
#[derive(Clone, Debug)]
pub struct HomotopyRecord<S: Scalar> {
    pub gamma0: PLMap<S>,
    pub eta: PLMap<S>,
    pub relative: SubcomplexCarrier,
    pub q: NeighborhoodSpec<S>,
    pub alpha: usize,
    pub beta: usize,
    /// Largest step certified by absorbing `eta` into the top-level charts.
    pub chart_beta: usize,
    pub support: BTreeSet<usize>,
    pub epsilon: S,
    pub pushed: Arc<Vec<PushedPoint<S>>>,
    pub slices: Vec<SliceReport>,
    pub approximation: SimultaneousApproximation<S>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct HomotopyRecordFile<S: Scalar> {
    pub alpha: usize,
    pub beta: usize,
    pub chart_beta: usize,
    pub support: BTreeSet<usize>,
    #[serde(with = "serde_scalar")]
    pub epsilon: S,
    pub anchors: usize,
    pub pushed: Vec<PushedPoint<S>>,
    pub relative: SubcomplexCarrier,
    pub levels: Vec<LevelReport>,
    pub slices: Vec<SliceReport>,
    pub homotopy_certified: bool,
    pub eta: PLMapFile<S>,
}

impl<S: Scalar> HomotopyRecord<S> {
    /// `G(., t)`.
    pub fn push_map(&self, t: S) -> PushMap<S> {
        PushMap::new(
            self.gamma0.clone(),
            Arc::clone(&self.pushed),
            self.epsilon.clone(),
            t,
        )
    }

    /// `H(x, t) = Theta(G(., t), x, t)`.
    pub fn h(&self, x: &Point<S>, t: &S) -> Result<Point<S>> {
        let g = self.push_map(t.clone());
        self.approximation.theta.evaluate(&g, x, t)
    }

    pub fn certified(&self) -> bool {
        self.slices.iter().all(SliceReport::holds)
    }

    pub fn to_file(&self) -> HomotopyRecordFile<S> {
        HomotopyRecordFile {
            alpha: self.alpha,
            beta: self.beta,
            chart_beta: self.chart_beta,
            support: self.support.clone(),
            epsilon: self.epsilon.clone(),
            anchors: self.approximation.anchors.len(),
            pushed: self.pushed.as_ref().clone(),
            relative: self.relative.clone(),
            levels: self.approximation.theta.levels(),
            slices: self.slices.clone(),
            homotopy_certified: self.certified(),
            eta: PLMapFile::from_map(&self.eta),
        }
    }
}

/// `H(., t)` as an evaluator.
pub struct HomotopySlice<'a, S: Scalar> {
    pub record: &'a HomotopyRecord<S>,
    pub t: S,
}

impl<S: Scalar> MapEval<S> for HomotopySlice<'_, S> {
    fn target_dim(&self) -> usize {
        self.record.gamma0.target_dim()
    }

    fn eval(&self, x: &Point<S>) -> Result<Point<S>> {
        self.record.h(x, &self.t)
    }
}

fn round_point<S: Scalar>(p: &Point<S>) -> Point<S> {
    Point::new(
        p.coords()
            .iter()
            .map(|c| c.round_to(PUSH_DENOMINATOR))
            .collect(),
    )
}

/// Lower bound of the max-norm distance from `x` to a bounding box.
fn box_gap(lo: &[f64], hi: &[f64], x: &[f64]) -> f64 {
    lo.iter()
        .zip(hi)
        .zip(x)
        .map(|((l, h), v)| (l - v).max(v - h).max(0.0))
        .fold(0.0, f64::max)
}

/// Exact max-norm distance from `x` to the nearest listed simplex not
/// containing it; `None` when every simplex contains `x`.
fn distance_to_others<S: Scalar>(
    simplices: &[(Simplex<S>, Vec<f64>, Vec<f64>)],
    x: &Point<S>,
) -> Option<S> {
    let xf = x.to_f64();
    let mut order: Vec<(f64, usize)> = simplices
        .iter()
        .enumerate()
        .map(|(i, (_, lo, hi))| (box_gap(lo, hi, &xf), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: Option<S> = None;
    for (gap, i) in order {
        if let Some(b) = &best {
            if gap > b.to_f64_lossy() * (1.0 + 1e-9) + 1e-12 {
                break;
            }
        }
        let s = &simplices[i].0;
        if s.contains(x) {
            continue;
        }
        let d = max_norm_distance(s, x);
        best = Some(match best {
            None => d,
            Some(b) => S::min_of(b, d),
        });
    }
    best
}

/// Builds `G`, `H` and `eta` with `eta(|Sigma|) subset M_beta`, `beta >= alpha`.
pub fn individual_approximation<S: Scalar>(
    sigma: &SimplicialComplex<S>,
    gamma0: &PLMap<S>,
    q: &NeighborhoodSpec<S>,
    relative: &SubcomplexCarrier,
    model: &FilteredSpaceModel<S>,
    alpha: usize,
    cfg: &IndividualConfig,
) -> Result<HomotopyRecord<S>> {
    model.filtration.step(alpha)?;
    relative.validate(sigma)?;
    for v in relative.vertex_indices(sigma) {
        if !model.filtration.in_step(alpha, gamma0.value(v)) {
            return Err(Error::precondition(format!(
                "the value at relative vertex {v} is not in step {alpha}"
            )));
        }
    }
    let approx = simultaneous_approximation(sigma, gamma0, q, relative, model, &cfg.engine)?;
    let theta = &approx.theta;
    let top = model.filtration.top();

    let mut pushed = Vec::new();
    let mut charts = Vec::new();
    for x in &approx.anchors {
        let from = gamma0.eval(x)?;
        if model.filtration.in_step(alpha, &from) {
            continue;
        }
        let mut parts = theta.regions_at(x);
        parts.push(model.carrier.clone());
        let parts = flatten(parts);
        let (_, image) = convex_chart(&from, &parts, &model.max_radius).ok_or_else(|| {
            Error::ChartCover(format!("no convex chart around the value at anchor {x}"))
        })?;
        let required = !model.filtration.in_step(top, &from);
        let mut to = round_point(&model.filtration.project(alpha, &from)?);
        if !image.contains(&to) {
            if !required {
                continue;
            }
            to = round_point(&model.filtration.project(top, &from)?);
            if !image.contains(&to) {
                return Err(Error::ChartCover(format!(
                    "no push target for anchor {x} inside its chart"
                )));
            }
        }
        pushed.push(PushedPoint {
            x: x.clone(),
            from,
            to,
            required,
        });
        charts.push(image);
    }

    let epsilon = push_radius(
        sigma,
        gamma0,
        theta.constraint_simplices(),
        &pushed,
        &charts,
    )?;
    let pushed = Arc::new(pushed);
    let g1 = PushMap::new(
        gamma0.clone(),
        Arc::clone(&pushed),
        epsilon.clone(),
        S::one(),
    );
    let (eta, homes) = theta.bake_with_homes(&g1, &S::one())?;
    let support = eta.support();
    let beta = model
        .filtration
        .least_step_for(&support, alpha)
        .ok_or_else(|| Error::AbsorptionFailure {
            witness: format!("coordinates {support:?}"),
        })?;

    let mut chart_beta = alpha;
    for (&d, ch) in theta.top_charts() {
        let pts: BTreeSet<usize> = homes
            .iter()
            .filter(|(_, h)| *h == d)
            .flat_map(|(c, _)| c.iter().copied())
            .collect();
        let points: Vec<Point<S>> = pts.into_iter().map(|v| eta.value(v).clone()).collect();
        if points.is_empty() {
            continue;
        }
        let sample = crate::filtered::CompactSample::new(points, true)?;
        chart_beta = chart_beta.max(ch.chart.absorb_compact(model, &sample, alpha)?);
    }

    let mut record = HomotopyRecord {
        gamma0: gamma0.clone(),
        eta,
        relative: relative.clone(),
        q: q.clone(),
        alpha,
        beta,
        chart_beta,
        support,
        epsilon,
        pushed,
        slices: Vec::new(),
        approximation: approx,
    };
    record.slices = check_slices(&record, sigma, cfg)?;
    Ok(record)
}

/// Largest `2^-k` keeping the bump balls disjoint, away from every other
/// constraint simplex and mapped by `gamma0` inside the chart images.
fn push_radius<S: Scalar>(
    sigma: &SimplicialComplex<S>,
    gamma0: &PLMap<S>,
    simplices: Vec<Simplex<S>>,
    pushed: &[PushedPoint<S>],
    charts: &[Region<S>],
) -> Result<S> {
    if pushed.is_empty() {
        return Ok(S::one());
    }
    let boxed: Vec<(Simplex<S>, Vec<f64>, Vec<f64>)> = simplices
        .into_iter()
        .map(|s| {
            let f: Vec<Vec<f64>> = s.vertices().iter().map(Point::to_f64).collect();
            let lo = (0..f[0].len())
                .map(|k| f.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min))
                .collect();
            let hi = (0..f[0].len())
                .map(|k| f.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            (s, lo, hi)
        })
        .collect();
    let mut bound: Option<S> = None;
    let mut tighten = |d: S| {
        bound = Some(match bound.take() {
            None => d,
            Some(b) => S::min_of(b, d),
        })
    };
    for p in pushed {
        if let Some(d) = distance_to_others(&boxed, &p.x) {
            tighten(d);
        }
    }
    for (i, a) in pushed.iter().enumerate() {
        for b in &pushed[i + 1..] {
            tighten(a.x.max_dist(&b.x) * S::half());
        }
    }
    let stretch = gamma0.lipschitz_bound() * S::from_count(sigma.ambient_dim()).sqrt_upper();
    let mut eps = S::one();
    for _ in 0..=MAX_EPSILON_EXPONENT {
        let apart = bound.as_ref().is_none_or(|b| eps < *b);
        let r = stretch.clone() * eps.clone();
        if apart
            && pushed
                .iter()
                .zip(charts)
                .all(|(p, v)| v.contains_ball(&p.from, &r, true))
        {
            return Ok(eps);
        }
        eps = eps * S::half();
    }
    Err(Error::resolution(format!(
        "no push radius down to 2^-{MAX_EPSILON_EXPONENT}"
    )))
}

fn check_slices<S: Scalar>(
    record: &HomotopyRecord<S>,
    sigma: &SimplicialComplex<S>,
    cfg: &IndividualConfig,
) -> Result<Vec<SliceReport>> {
    let n = cfg.t_grid.max(2);
    let mut rel_points: Vec<Point<S>> = record
        .relative
        .vertex_indices(sigma)
        .into_iter()
        .map(|v| sigma.vertex(v).clone())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..sigma.len() {
        if record.relative.contains_simplex(i) && sigma.simplices()[i].len() > 1 {
            let s = sigma.simplex(i);
            rel_points.push(s.barycenter());
            rel_points.push(s.random_point(&mut rng));
        }
    }
    let theta = &record.approximation.theta;
    let pl = record.pushed.is_empty();
    (0..n)
        .into_par_iter()
        .map(|k| {
            let t = S::from_count(k) / S::from_count(n - 1);
            let g = record.push_map(t.clone());
            let baked = if k == n - 1 {
                record.eta.clone()
            } else {
                theta.bake_slice(&g, &t)?
            };
            let qb = record.q.check_pl(&baked)?;
            let slice = HomotopySlice {
                record,
                t: t.clone(),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(k as u64 + 1));
            let qs = record
                .q
                .check_sampled(&slice, cfg.samples_per_simplex, &mut rng)?;
            let mut relative_fixed = true;
            for x in &rel_points {
                if slice.eval(x)? != record.gamma0.eval(x)? {
                    relative_fixed = false;
                    break;
                }
            }
            Ok(SliceReport {
                index: k,
                t: t.to_string(),
                q_baked: qb.holds,
                q_exact: qb.exact && (pl || k == 0 || k == n - 1),
                q_sampled: qs.holds,
                samples: qs.checks.iter().map(|c| c.samples).sum(),
                relative_fixed,
            })
        })
        .collect()
}
