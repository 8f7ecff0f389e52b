//! Filtered-space models over `S^D` with coordinate-subspace steps, and
//! translation charts with cores.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::region::{Containment, Region};
use crate::scalar::{serde_scalar, Scalar};

pub const BISECTION_DEPTH: usize = 40;

/// One step `E_index`: the span of the listed (0-based) coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub index: usize,
    pub coords: BTreeSet<usize>,
}

/// A finite chain of coordinate subspaces, increasing in both index and span.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FiltrationRepr")]
pub struct Filtration {
    ambient_dim: usize,
    steps: Vec<Step>,
}

#[derive(Deserialize)]
struct FiltrationRepr {
    ambient_dim: usize,
    steps: Vec<Step>,
}

impl TryFrom<FiltrationRepr> for Filtration {
    type Error = Error;
    fn try_from(r: FiltrationRepr) -> Result<Self> {
        Filtration::new(r.ambient_dim, r.steps)
    }
}

impl Filtration {
    pub fn new(ambient_dim: usize, steps: Vec<Step>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::input("filtration without steps"));
        }
        for s in &steps {
            if let Some(&c) = s.coords.iter().find(|&&c| c >= ambient_dim) {
                return Err(Error::input(format!(
                    "step {} uses coordinate {c} outside dimension {ambient_dim}",
                    s.index
                )));
            }
        }
        for w in steps.windows(2) {
            if w[0].index >= w[1].index || !w[0].coords.is_subset(&w[1].coords) {
                return Err(Error::input(format!(
                    "steps {} and {} are not nested",
                    w[0].index, w[1].index
                )));
            }
        }
        Ok(Filtration { ambient_dim, steps })
    }

    /// `E_n` = span of the first `n` coordinates, `n = 1..=dim`.
    pub fn coordinate_chain(dim: usize) -> Self {
        let steps = (1..=dim)
            .map(|n| Step {
                index: n,
                coords: (0..n).collect(),
            })
            .collect();
        Filtration {
            ambient_dim: dim,
            steps,
        }
    }

    /// `E_n` for `n = start..=dim` only.
    pub fn coordinate_chain_from(start: usize, dim: usize) -> Result<Self> {
        if start == 0 || start > dim {
            return Err(Error::input(format!(
                "no coordinate chain from {start} in dimension {dim}"
            )));
        }
        let steps = (start..=dim)
            .map(|n| Step {
                index: n,
                coords: (0..n).collect(),
            })
            .collect();
        Ok(Filtration {
            ambient_dim: dim,
            steps,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn bottom(&self) -> usize {
        self.steps[0].index
    }

    pub fn top(&self) -> usize {
        self.steps[self.steps.len() - 1].index
    }

    pub fn step(&self, index: usize) -> Result<&Step> {
        self.steps
            .iter()
            .find(|s| s.index == index)
            .ok_or_else(|| Error::input(format!("{index} is not a step index")))
    }

    pub fn in_step<S: Scalar>(&self, index: usize, x: &Point<S>) -> bool {
        self.step(index)
            .is_ok_and(|s| x.support().is_subset(&s.coords))
    }

    /// Least index `>= at_least` whose step contains every listed coordinate.
    pub fn least_step_for(&self, support: &BTreeSet<usize>, at_least: usize) -> Option<usize> {
        self.steps
            .iter()
            .find(|s| s.index >= at_least && support.is_subset(&s.coords))
            .map(|s| s.index)
    }

    /// Zeroes every coordinate outside `E_index`.
    pub fn project<S: Scalar>(&self, index: usize, x: &Point<S>) -> Result<Point<S>> {
        Ok(x.project_to(&self.step(index)?.coords))
    }
}

/// `M` = an open region of `S^D`; `M_alpha = M cap E_alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct FilteredSpaceModel<S: Scalar> {
    pub filtration: Filtration,
    pub carrier: Region<S>,
    /// Radius of the sampled density check of `M_infinity` in `M`.
    #[serde(with = "serde_scalar")]
    pub density_radius: S,
    /// Box used to sample the carrier when it is unbounded.
    #[serde(default)]
    pub sample_box: Option<(Point<S>, Point<S>)>,
    /// Cap on chart radii; a power of two keeps bisection on dyadics.
    #[serde(with = "serde_scalar", default = "default_max_radius")]
    pub max_radius: S,
}

fn default_max_radius<S: Scalar>() -> S {
    S::from_ratio(1024, 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct DensityReport<S: Scalar> {
    pub samples: usize,
    pub passed: bool,
    pub witness: Option<Point<S>>,
}

impl<S: Scalar> FilteredSpaceModel<S> {
    pub fn new(filtration: Filtration, carrier: Region<S>, density_radius: S) -> Result<Self> {
        carrier.check_dim(filtration.ambient_dim())?;
        Ok(FilteredSpaceModel {
            filtration,
            carrier,
            density_radius,
            sample_box: None,
            max_radius: default_max_radius(),
        })
    }

    pub fn with_sample_box(mut self, lo: Point<S>, hi: Point<S>) -> Self {
        self.sample_box = Some((lo, hi));
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.carrier.check_dim(self.filtration.ambient_dim())?;
        if !self.carrier.is_open() {
            return Err(Error::input("the carrier must be open"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.filtration.ambient_dim()
    }

    pub fn in_step(&self, index: usize, x: &Point<S>) -> bool {
        self.carrier.contains(x) && self.filtration.in_step(index, x)
    }

    pub fn in_union(&self, x: &Point<S>) -> bool {
        self.in_step(self.filtration.top(), x)
    }

    /// `A_p`: indices of the steps containing `p`.
    pub fn steps_containing(&self, p: &Point<S>) -> Vec<usize> {
        self.filtration
            .steps()
            .iter()
            .map(|s| s.index)
            .filter(|&i| self.in_step(i, p))
            .collect()
    }

    /// Samples the carrier and looks for a point of the top step within the
    /// density radius of each sample (its coordinate projection).
    pub fn check_density(&self, n: usize, rng: &mut impl Rng) -> Result<DensityReport<S>> {
        let samples = self.carrier.sample(n, self.sample_box.as_ref(), rng)?;
        let top = self.filtration.top();
        let rr = self.density_radius.clone() * self.density_radius.clone();
        for p in &samples {
            let proj = self.filtration.project(top, p)?;
            if !(self.carrier.contains(&proj) && proj.dist_sq(p) <= rr) {
                return Ok(DensityReport {
                    samples: samples.len(),
                    passed: false,
                    witness: Some(p.clone()),
                });
            }
        }
        Ok(DensityReport {
            samples: samples.len(),
            passed: true,
            witness: None,
        })
    }

    /// Identity chart on the largest certified ball around `q`, with the
    /// ball itself as core.
    pub fn base_chart(&self, q: &Point<S>) -> Result<WellFilledChart<S>> {
        q.check_dim(self.dim())?;
        let r = self
            .carrier
            .inner_radius(q, &self.max_radius)
            .ok_or_else(|| {
                Error::ChartCover(format!(
                    "no ball around {q} is certified inside the carrier"
                ))
            })?;
        let ball = Region::open_ball(q.clone(), r);
        Ok(WellFilledChart {
            translation: Point::zeros(self.dim()),
            image: ball.clone(),
            core: Some(ball),
            quarter: None,
            alpha0: self.filtration.bottom(),
        })
    }

    /// Least `alpha` with `K subset M_alpha`.
    pub fn check_compact_retractivity(&self, k: &CompactSample<S>) -> Result<usize> {
        if let Some(p) = k.points.iter().find(|p| !self.carrier.contains(p)) {
            return Err(Error::precondition(format!("{p} is not in the carrier")));
        }
        let support = k.support();
        self.filtration
            .least_step_for(&support, self.filtration.bottom())
            .ok_or_else(|| Error::AbsorptionFailure {
                witness: k.escaping_point(&self.filtration).to_string(),
            })
    }
}

/// Finite stand-in for a compact set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct CompactSample<S: Scalar> {
    pub points: Vec<Point<S>>,
    /// `true` when the points are the vertex images of a PL map, so the
    /// compact set is their convex-piecewise hull; `false` for a sample.
    #[serde(default)]
    pub exact: bool,
}

impl<S: Scalar> CompactSample<S> {
    pub fn new(points: Vec<Point<S>>, exact: bool) -> Result<Self> {
        let d = points
            .first()
            .ok_or_else(|| Error::input("empty compact sample"))?
            .dim();
        for p in &points {
            p.check_dim(d)?;
        }
        Ok(CompactSample { points, exact })
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.points.iter().flat_map(Point::support).collect()
    }

    fn escaping_point(&self, f: &Filtration) -> &Point<S> {
        let top = &f.steps()[f.steps().len() - 1].coords;
        self.points
            .iter()
            .find(|p| !p.support().is_subset(top))
            .unwrap_or(&self.points[0])
    }
}

/// A chart `phi(x) = x - g` from `U = V + g` onto `V`, with `V_alpha = V cap E_alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct WellFilledChart<S: Scalar> {
    pub translation: Point<S>,
    pub image: Region<S>,
    /// `V^(2)`; derived by the validator when absent.
    #[serde(default)]
    pub core: Option<Region<S>>,
    #[serde(default)]
    pub quarter: Option<Region<S>>,
    pub alpha0: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case", bound = "S: Scalar")]
pub enum ConditionStatus<S: Scalar> {
    Certified {
        reason: String,
    },
    SampleVerified {
        samples: usize,
    },
    Failed {
        reason: String,
        witness: Option<Point<S>>,
    },
}

impl<S: Scalar> ConditionStatus<S> {
    fn certified(reason: &str) -> Self {
        ConditionStatus::Certified {
            reason: reason.to_string(),
        }
    }

    fn failed(reason: &str, witness: Option<Point<S>>) -> Self {
        ConditionStatus::Failed {
            reason: reason.to_string(),
            witness,
        }
    }

    pub fn holds(&self) -> bool {
        !matches!(self, ConditionStatus::Failed { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ChartReport<S: Scalar> {
    pub a: ConditionStatus<S>,
    pub b: ConditionStatus<S>,
    pub d: ConditionStatus<S>,
    pub e: ConditionStatus<S>,
    pub f: ConditionStatus<S>,
    /// Where the core came from: `declared`, `convex_image` or `open_image_ball`.
    pub core_source: String,
    pub core: Region<S>,
    pub well_filled: bool,
}

/// Samples drawn per sampled condition.
pub const CHART_SAMPLES: usize = 500;

impl<S: Scalar> WellFilledChart<S> {
    pub fn phi(&self, x: &Point<S>) -> Point<S> {
        x - &self.translation
    }

    pub fn phi_inv(&self, v: &Point<S>) -> Point<S> {
        v.clone() + self.translation.clone()
    }

    /// `U = phi^{-1}(V)`.
    pub fn domain(&self) -> Region<S> {
        self.image.shifted(&self.translation)
    }

    pub fn domain_core(&self) -> Option<Region<S>> {
        self.core.as_ref().map(|c| c.shifted(&self.translation))
    }

    pub fn domain_quarter(&self) -> Option<Region<S>> {
        self.quarter.as_ref().map(|c| c.shifted(&self.translation))
    }

    /// The declared core, or `V` when convex, or a ball inside an open `V`.
    pub fn effective_core(&self) -> Result<(Region<S>, &'static str)> {
        if let Some(c) = &self.core {
            return Ok((c.clone(), "declared"));
        }
        if self.image.is_convex() {
            return Ok((self.image.clone(), "convex_image"));
        }
        if self.image.is_open() {
            // v + W with W + W inside V - v
            let (lo, hi) = self.image.bounding_box().ok_or_else(|| {
                Error::input("cannot derive a core: the image has no bounding box")
            })?;
            let v = lo.lerp(&hi, &S::half());
            let cap = S::from_ratio(1024, 1);
            if let Some(r) = self.image.inner_radius(&v, &cap) {
                return Ok((
                    Region::open_ball(v, r / S::from_ratio(2, 1)),
                    "open_image_ball",
                ));
            }
        }
        Err(Error::input("no core declared and none can be derived"))
    }

    fn check_model(&self, model: &FilteredSpaceModel<S>) -> Result<()> {
        self.translation.check_dim(model.dim())?;
        self.image.check_dim(model.dim())?;
        model.filtration.step(self.alpha0).map_err(|_| {
            Error::input(format!(
                "chart index {} does not belong to the model filtration",
                self.alpha0
            ))
        })?;
        Ok(())
    }

    /// Checks the chart conditions (a), (b), (d), (e), (f).
    pub fn validate(
        &self,
        model: &FilteredSpaceModel<S>,
        rng: &mut impl Rng,
    ) -> Result<ChartReport<S>> {
        self.check_model(model)?;
        let (core, core_source) = self.effective_core()?;
        let step0 = model.filtration.step(self.alpha0)?;
        let a = if self.translation.support().is_subset(&step0.coords) {
            ConditionStatus::certified("translation lies in the first step")
        } else {
            ConditionStatus::failed(
                "translation leaves the first step",
                Some(self.translation.clone()),
            )
        };
        let b = match &a {
            ConditionStatus::Certified { .. } => {
                ConditionStatus::certified("restrictions of one translation")
            }
            _ => ConditionStatus::failed("depends on (a)", None),
        };
        let domain = self.domain();
        let d = match domain.subset_of(&model.carrier) {
            Containment::Certified => ConditionStatus::certified("domain inside the carrier"),
            _ => sampled_subset(&domain, &model.carrier, model.sample_box.as_ref(), rng)?,
        };
        let e = self.check_core(&core, model, rng)?;
        let f = match &e {
            ConditionStatus::Certified { .. } => ConditionStatus::certified(
                "slices of the core are closed under conv_2 in each step",
            ),
            ConditionStatus::SampleVerified { samples } => {
                ConditionStatus::SampleVerified { samples: *samples }
            }
            ConditionStatus::Failed { .. } => ConditionStatus::failed("depends on (e)", None),
        };
        let well_filled = [&a, &b, &d, &e, &f].iter().all(|c| c.holds());
        Ok(ChartReport {
            a,
            b,
            d,
            e,
            f,
            core_source: core_source.to_string(),
            core,
            well_filled,
        })
    }

    fn check_core(
        &self,
        core: &Region<S>,
        model: &FilteredSpaceModel<S>,
        rng: &mut impl Rng,
    ) -> Result<ConditionStatus<S>> {
        if matches!(core, Region::Empty) {
            return Ok(ConditionStatus::failed("empty core", None));
        }
        if !core.is_open() {
            return Ok(ConditionStatus::failed("core is not open", None));
        }
        let inside = core.subset_of(&self.image);
        if inside == Containment::Certified && core.is_convex() {
            return Ok(ConditionStatus::certified("convex core inside the image"));
        }
        if let Some(w) = boundary_witness(core, &self.image) {
            return Ok(ConditionStatus::failed(
                "core point outside the image",
                Some(w),
            ));
        }
        // conv_2 by sampling point pairs of the core
        let bbox = core.bounding_box().or_else(|| model.sample_box.clone());
        let pts = core.sample(2 * CHART_SAMPLES, bbox.as_ref(), rng)?;
        for pair in pts.chunks(2) {
            if let [x, y] = pair {
                let t = S::round_from_f64(rng.random::<f64>(), 1 << 20);
                let p = y.lerp(x, &t);
                if !self.image.contains(&p) {
                    return Ok(ConditionStatus::failed(
                        "conv_2 of the core leaves the image",
                        Some(p),
                    ));
                }
            }
        }
        Ok(ConditionStatus::SampleVerified {
            samples: pts.len() / 2,
        })
    }

    /// Shrinks to the chart with image `(phi(q) + Q + Q) cap V` and core
    /// `(phi(q) + Q) cap V^(2)`, for a ball `Q` with `q + Q + Q` inside `w`.
    pub fn shrink(
        &self,
        q: &Point<S>,
        w: &Region<S>,
        max_radius: &S,
    ) -> Result<WellFilledChart<S>> {
        let (core, _) = self.effective_core()?;
        let p = self.phi(q);
        if !core.contains(&p) {
            return Err(Error::precondition(format!("{q} is not in the core")));
        }
        let rho = balanced_radius(w, q, max_radius)?;
        let two = rho.clone() + rho.clone();
        Ok(WellFilledChart {
            translation: self.translation.clone(),
            image: intersect_ball(&p, &two, &self.image),
            core: Some(intersect_ball(&p, &rho, &core)),
            quarter: None,
            alpha0: self.alpha0,
        })
    }

    /// An open `V^(4)` around `phi(q)` with `conv_2(V^(4)) subset V^(2)`.
    pub fn quarter_core(&self, q: &Point<S>, max_radius: &S) -> Result<Region<S>> {
        let (core, _) = self.effective_core()?;
        if matches!(core, Region::Empty) {
            return Err(Error::precondition("chart has an empty core"));
        }
        let domain_core = core.shifted(&self.translation);
        let shrunk = self.shrink(q, &domain_core, max_radius)?;
        let v4 = shrunk.core.expect("shrink sets a core");
        debug_assert!(v4.is_convex());
        Ok(v4)
    }

    pub fn with_quarter(mut self, q: &Point<S>, max_radius: &S) -> Result<Self> {
        self.quarter = Some(self.quarter_core(q, max_radius)?);
        Ok(self)
    }

    /// Least `beta >= alpha` with `K subset U^(2)_beta`.
    pub fn absorb_compact(
        &self,
        model: &FilteredSpaceModel<S>,
        k: &CompactSample<S>,
        alpha: usize,
    ) -> Result<usize> {
        let core = self.domain_core().unwrap_or_else(|| self.domain());
        if let Some(p) = k.points.iter().find(|p| !core.contains(p)) {
            return Err(Error::precondition(format!("{p} is not in the core")));
        }
        model
            .filtration
            .least_step_for(&k.support(), alpha.max(self.alpha0))
            .ok_or_else(|| Error::AbsorptionFailure {
                witness: k.escaping_point(&model.filtration).to_string(),
            })
    }

    /// The chart `x -> phi(x - g)` on `g + U`.
    pub fn translate(
        &self,
        g: &Point<S>,
        model: &FilteredSpaceModel<S>,
    ) -> Result<WellFilledChart<S>> {
        g.check_dim(model.dim())?;
        if !model.in_union(g) {
            return Err(Error::input(format!(
                "{g} is not in the union of the steps"
            )));
        }
        let need = model
            .filtration
            .least_step_for(&g.support(), self.alpha0)
            .ok_or_else(|| Error::input(format!("{g} is not in any step")))?;
        Ok(WellFilledChart {
            translation: self.translation.clone() + g.clone(),
            image: self.image.clone(),
            core: self.core.clone(),
            quarter: self.quarter.clone(),
            alpha0: need,
        })
    }
}

/// Largest dyadic `rho` (up to bisection depth) with `B(q, 2 rho) subset w`,
/// halved for safety; `max_radius` itself when `w` swallows everything.
pub fn balanced_radius<S: Scalar>(w: &Region<S>, q: &Point<S>, max_radius: &S) -> Result<S> {
    let fits = |rho: &S| w.contains_ball(q, &(rho.clone() + rho.clone()), false);
    if fits(max_radius) {
        return Ok(max_radius.clone());
    }
    let mut lo = S::zero();
    let mut hi = max_radius.clone();
    for _ in 0..BISECTION_DEPTH {
        let mid = (lo.clone() + hi.clone()) * S::half();
        if fits(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !lo.is_strictly_positive() {
        return Err(Error::resolution(format!(
            "no admissible ball around {q} at bisection depth {BISECTION_DEPTH}"
        )));
    }
    Ok(lo * S::half())
}

/// `B(c, r) cap region`, simplified to the ball when it already fits.
pub fn intersect_ball<S: Scalar>(c: &Point<S>, r: &S, region: &Region<S>) -> Region<S> {
    let ball = Region::open_ball(c.clone(), r.clone());
    if region.contains_ball(c, r, false) {
        ball
    } else if region.subset_of(&ball) == Containment::Certified {
        region.clone()
    } else {
        Region::intersection(vec![ball, region.clone()])
    }
}

/// Probes `c +- r (1 - 2^-k) e_i` of a ball-shaped core for a point outside `v`.
fn boundary_witness<S: Scalar>(core: &Region<S>, v: &Region<S>) -> Option<Point<S>> {
    let (c, r) = match core {
        Region::OpenBall { center, radius } => (center, radius),
        _ => return None,
    };
    for k in 1..=20 {
        let scale = r.clone() * (S::one() - S::one() / S::from_count(1usize << k));
        for i in 0..c.dim() {
            for sign in [S::one(), -S::one()] {
                let p = c.clone() + Point::basis(c.dim(), i).scale(&(scale.clone() * sign.clone()));
                if core.contains(&p) && !v.contains(&p) {
                    return Some(p);
                }
            }
        }
    }
    None
}

fn sampled_subset<S: Scalar>(
    a: &Region<S>,
    b: &Region<S>,
    sample_box: Option<&(Point<S>, Point<S>)>,
    rng: &mut impl Rng,
) -> Result<ConditionStatus<S>> {
    let bbox = a.bounding_box().or_else(|| sample_box.cloned());
    let pts = a.sample(CHART_SAMPLES, bbox.as_ref(), rng)?;
    if let Some(p) = pts.iter().find(|p| !b.contains(p)) {
        return Ok(ConditionStatus::failed(
            "domain point outside the carrier",
            Some(p.clone()),
        ));
    }
    Ok(ConditionStatus::SampleVerified { samples: pts.len() })
}
