//! Comparison of a dense union of steps with the ambient open set on
//! `pi_0` and `pi_1`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtered::{CompactSample, DensityReport, FilteredSpaceModel, Filtration};
use crate::geometry::Point;
use crate::region::Region;
use crate::scalar::Scalar;

use super::components::{nested_model, pi0_report, Pi0Report};
use super::pi1::{pi1_directlimit_experiment, Pi1Config, Pi1Report};
use super::winding::LoopModel;

/// Ambient sample points and loops fed to the comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct PalaisInput<S: Scalar> {
    /// Ambient points; the first is the basepoint and must lie in the bottom step.
    pub points: Vec<Point<S>>,
    /// Ambient loops.
    pub loops: Vec<LoopModel<S>>,
    /// Loops already in a step, paired by winding in the injectivity leg.
    #[serde(default)]
    pub step_loops: Vec<LoopModel<S>>,
}

/// `pi_1` comparison when every loop lies in a convex part of the carrier.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexLoops {
    /// Per loop: it and its projection to the top step lie in one convex part.
    pub contractible: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum FundamentalGroupComparison {
    /// Both sides trivial: straight-line contractions in convex parts.
    Convex(ConvexLoops),
    /// Windings through both legs of the approximation engine.
    Winding(Box<Pi1Report>),
}

impl FundamentalGroupComparison {
    pub fn bijective(&self) -> bool {
        match self {
            FundamentalGroupComparison::Convex(c) => c.contractible.iter().all(|&b| b),
            FundamentalGroupComparison::Winding(r) => r.holds(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct PalaisReport<S: Scalar> {
    pub density: DensityReport<S>,
    /// Each ambient point is joined to its projection into the top step by
    /// a certified segment.
    pub projection_witnesses: usize,
    pub projection_witnesses_verified: bool,
    pub pi0: Pi0Report,
    pub pi1: FundamentalGroupComparison,
    /// Least step absorbing the vertex values of each step loop used.
    pub absorbed_steps: Vec<usize>,
}

impl<S: Scalar> PalaisReport<S> {
    pub fn holds(&self) -> bool {
        self.density.passed
            && self.projection_witnesses_verified
            && self.pi0.holds()
            && self.pi1.bijective()
    }
}

fn convex_parts<S: Scalar>(r: &Region<S>) -> Vec<&Region<S>> {
    match r {
        Region::Union { regions } => regions.iter().flat_map(convex_parts).collect(),
        _ if r.is_convex() => vec![r],
        _ => Vec::new(),
    }
}

/// `sigma_*` on `pi_0` and `pi_1` for the inclusion of the union of the
/// steps into the carrier.
pub fn palais_experiment<S: Scalar>(
    model: &FilteredSpaceModel<S>,
    input: &PalaisInput<S>,
    density_samples: usize,
    cfg: &Pi1Config,
) -> Result<PalaisReport<S>> {
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.individual.seed);
    let density = model.check_density(density_samples, &mut rng)?;
    let f = &model.filtration;
    let top = f.top();
    let basepoint = input
        .points
        .first()
        .ok_or_else(|| Error::input("no sample points"))?
        .clone();
    if !model.in_step(f.bottom(), &basepoint) {
        return Err(Error::precondition(format!(
            "basepoint {basepoint} is not in the bottom step"
        )));
    }

    // pi_0: step graphs on the projections that stay in the carrier
    let mut fresh = Vec::new();
    let mut seen: Vec<Point<S>> = Vec::new();
    for step in f.steps() {
        let mut pts = Vec::new();
        for p in &input.points {
            let q = f.project(step.index, p)?;
            if model.carrier.contains(&q) && !seen.contains(&q) {
                seen.push(q.clone());
                pts.push(q);
            }
        }
        fresh.push(pts);
    }
    let mut witnesses = 0;
    let mut verified = true;
    for p in &input.points {
        let q = f.project(top, p)?;
        witnesses += 1;
        verified &= model.carrier.contains(p) && model.carrier.contains_segment(p, &q);
    }
    let components = nested_model(model.clone(), fresh, input.points.clone(), basepoint, None)?;
    let pi0 = pi0_report(&components)?;

    // pi_1
    let parts = convex_parts(&model.carrier);
    let convex = !input.loops.is_empty()
        && input
            .loops
            .iter()
            .chain(&input.step_loops)
            .all(|l| parts.iter().any(|r| r.hull_inside(&l.points) == Some(true)));
    let mut absorbed_steps = Vec::new();
    let pi1 = if convex || input.loops.is_empty() {
        let mut contractible = Vec::new();
        for l in &input.loops {
            let proj: Vec<Point<S>> = l
                .points
                .iter()
                .map(|p| f.project(top, p))
                .collect::<Result<_>>()?;
            absorbed_steps
                .push(model.check_compact_retractivity(&CompactSample::new(proj.clone(), true)?)?);
            contractible.push(parts.iter().any(|r| {
                r.hull_inside(&l.points) == Some(true) && r.hull_inside(&proj) == Some(true)
            }));
        }
        FundamentalGroupComparison::Convex(ConvexLoops { contractible })
    } else {
        let report = pi1_directlimit_experiment(model, &input.loops, &input.step_loops, cfg)?;
        for l in &input.step_loops {
            absorbed_steps.push(
                model.check_compact_retractivity(&CompactSample::new(l.points.clone(), true)?)?,
            );
        }
        FundamentalGroupComparison::Winding(Box::new(report))
    };
    Ok(PalaisReport {
        density,
        projection_witnesses: witnesses,
        projection_witnesses_verified: verified,
        pi0,
        pi1,
        absorbed_steps,
    })
}

fn dyadic<S: Scalar>(rng: &mut impl Rng, lo: i64, hi: i64, denom: i64) -> S {
    S::from_ratio(rng.random_range(lo * denom..=hi * denom), denom)
}

/// Two unit balls at `(+-2, 0, 0)` in `S^3` filtered by `E_1, E_2`.
pub fn two_ball_model<S: Scalar>() -> Result<FilteredSpaceModel<S>> {
    let ball = |x: i64| {
        Region::open_ball(
            Point::new(vec![S::from_ratio(x, 1), S::zero(), S::zero()]),
            S::one(),
        )
    };
    let f = Filtration::new(3, Filtration::coordinate_chain(3).steps()[..2].to_vec())?;
    Ok(FilteredSpaceModel::new(
        f,
        Region::Union {
            regions: vec![ball(-2), ball(2)],
        },
        S::one(),
    )?
    .with_sample_box(Point::from_i64(&[-3, -1, -1]), Point::from_i64(&[3, 1, 1])))
}

/// Points of both balls (the first is the basepoint `(2, 0, 0)`) and two
/// small loops, one per ball.
pub fn two_ball_input<S: Scalar>(rng: &mut impl Rng, samples: usize) -> Result<PalaisInput<S>> {
    let model = two_ball_model::<S>()?;
    let mut points = vec![Point::from_i64(&[2, 0, 0]), Point::from_i64(&[-2, 0, 0])];
    while points.len() < samples.max(2) {
        let p = Point::new(vec![
            dyadic(rng, -3, 3, 8),
            dyadic(rng, -1, 1, 8),
            dyadic(rng, -1, 1, 8),
        ]);
        if model.carrier.contains(&p) {
            points.push(p);
        }
    }
    let lp = |cx: i64| {
        let h = S::from_ratio(1, 4);
        let c = |dx: S, dy: S, dz: S| Point::new(vec![S::from_ratio(cx, 1) + dx, dy, dz]);
        LoopModel::from_cycle(
            vec![
                c(S::zero(), S::zero(), S::zero()),
                c(h.clone(), S::zero(), h.clone()),
                c(S::zero(), h.clone(), h.clone()),
                c(-h.clone(), h.clone(), S::zero()),
            ],
            (0, 1),
        )
    };
    Ok(PalaisInput {
        points,
        loops: vec![lp(2)?, lp(-2)?],
        step_loops: Vec::new(),
    })
}

/// `R^8` minus `{x_0 = x_1 = 0}`, cut to the slab `|x_7| < 1/4`, filtered
/// by `E_2, ..., E_7`; the union of the steps is dense at radius `1/4`.
pub fn punctured_slab_model<S: Scalar>() -> Result<FilteredSpaceModel<S>> {
    let dim = 8;
    let quarter = S::from_ratio(1, 4);
    let e7 = Point::basis(dim, 7);
    let carrier = Region::intersection(vec![
        Region::CoordinatePlaneComplement { i: 0, j: 1 },
        Region::HalfSpace {
            normal: e7.clone(),
            offset: quarter.clone(),
            closed: false,
        },
        Region::HalfSpace {
            normal: e7.scale(&-S::one()),
            offset: quarter.clone(),
            closed: false,
        },
    ]);
    let mut lo = vec![S::from_ratio(-2, 1); dim];
    let mut hi = vec![S::from_ratio(2, 1); dim];
    lo[7] = -quarter.clone();
    hi[7] = quarter.clone();
    let f = Filtration::new(
        dim,
        Filtration::coordinate_chain_from(2, 7)?.steps().to_vec(),
    )?;
    Ok(FilteredSpaceModel::new(f, carrier, quarter)?
        .with_sample_box(Point::new(lo), Point::new(hi)))
}

/// Sample points around the removed plane (first = `(1, 0, ..., 0)`), the
/// default probes with a slab-sized perturbation and two step loops.
pub fn punctured_slab_input<S: Scalar>(
    rng: &mut impl Rng,
    samples: usize,
) -> Result<PalaisInput<S>> {
    let model = punctured_slab_model::<S>()?;
    let mut points = vec![Point::basis(8, 0)];
    while points.len() < samples.max(1) {
        let mut c: Vec<S> = (0..7).map(|_| dyadic(rng, -2, 2, 8)).collect();
        c.push(dyadic::<S>(rng, -1, 1, 64));
        let p = Point::new(c);
        if model.carrier.contains(&p) {
            points.push(p);
        }
    }
    let loops = super::pi1::default_probes(8, (0, 1), &S::from_ratio(1, 8))?;
    let step_loops = super::pi1::default_step_loops(8, (0, 1), 16)?;
    Ok(PalaisInput {
        points,
        loops,
        step_loops,
    })
}
