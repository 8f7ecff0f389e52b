//! Winding classes of loops in a punctured model: loops outside every step
//! are pushed into a step (surjectivity), step loops with equal winding are
//! joined by a step-level homotopy on a prism (injectivity), and the direct
//! limit of the step classes is compared with the ambient windings.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::approximation::{
    individual_approximation, HomotopyRecord, IndividualConfig, NeighborhoodSpec,
};
use crate::direct_limits::{
    set_colimit, universal_map, Cone, DirectSystemOfSets, UniversalMapReport,
};
use crate::error::{Error, Result};
use crate::filtered::{FilteredSpaceModel, Filtration};
use crate::geometry::Point;
use crate::plmap::{MapEval, PLMap};
use crate::region::Region;
use crate::scalar::Scalar;
use crate::simplicial::{Prism, SimplicialComplex, SubcomplexCarrier};

use super::winding::{loop_to_map, polygon_domain, trace_loop, winding_number, LoopModel};

/// Denominator of the rounded polar coordinates of the annulus oracle.
pub const ANGLE_DENOMINATOR: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pi1Config {
    pub individual: IndividualConfig,
    /// Doublings of prism layers and loop resolution tried by the oracle.
    pub max_refinements: usize,
    /// Height of the bump pushing the oracle homotopy off the loops' step.
    pub bump: (i64, i64),
}

impl Default for Pi1Config {
    fn default() -> Self {
        Pi1Config {
            individual: IndividualConfig::default(),
            max_refinements: 4,
            bump: (1, 8),
        }
    }
}

/// Surjectivity run on one ambient loop.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub index: usize,
    pub vertices: usize,
    pub support: BTreeSet<usize>,
    pub winding_before: i64,
    pub winding_after: i64,
    pub alpha: usize,
    pub beta: usize,
    pub chart_beta: usize,
    pub pushed: usize,
    pub epsilon: String,
    /// Every grid slice of the homotopy lies in the carrier.
    pub certified: bool,
    pub eta_in_carrier: bool,
    /// The endpoint takes the probe's values at every vertex of its domain.
    pub eta_equals_probe: bool,
}

impl ProbeReport {
    pub fn holds(&self) -> bool {
        self.certified && self.eta_in_carrier && self.winding_before == self.winding_after
    }
}

/// Injectivity run on two step loops.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InjectivityReport {
    pub left: usize,
    pub right: usize,
    pub winding: (i64, i64),
    pub base_vertices: usize,
    pub layers: usize,
    /// The oracle homotopy lies in the carrier (exact check).
    pub oracle_in_carrier: bool,
    pub oracle_support: BTreeSet<usize>,
    pub alpha: usize,
    pub beta: Option<usize>,
    pub ends_fixed: bool,
    pub basepoint_fixed: bool,
    pub eta_in_carrier: bool,
    pub certified: bool,
    pub end_windings: (i64, i64),
    /// Failure of the oracle or the engine, if any.
    pub error: Option<String>,
}

impl InjectivityReport {
    pub fn holds(&self) -> bool {
        self.error.is_none()
            && self.oracle_in_carrier
            && self.beta.is_some()
            && self.ends_fixed
            && self.basepoint_fixed
            && self.eta_in_carrier
            && self.certified
            && self.end_windings == self.winding
    }
}

/// A loop lying in a step, as an element of the direct system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepLoop {
    pub source: String,
    pub step: usize,
    pub winding: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindingColimit {
    pub loops: Vec<StepLoop>,
    /// Classes of step loops per step index.
    pub classes_per_step: Vec<(usize, usize)>,
    pub colimit_classes: usize,
    pub witnesses_verified: bool,
    /// Ambient winding classes: those of the probes and the step loops.
    pub targets: Vec<i64>,
    pub psi: Option<UniversalMapReport>,
    pub error: Option<String>,
}

impl WindingColimit {
    pub fn bijective(&self) -> bool {
        self.error.is_none()
            && self.witnesses_verified
            && self.psi.as_ref().is_some_and(UniversalMapReport::bijective)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pi1Report {
    pub surjectivity: Vec<ProbeReport>,
    pub injectivity: Vec<InjectivityReport>,
    pub colimit: WindingColimit,
}

impl Pi1Report {
    pub fn holds(&self) -> bool {
        self.surjectivity.iter().all(ProbeReport::holds)
            && self.injectivity.iter().all(InjectivityReport::holds)
            && self.colimit.bijective()
    }
}

/// Pushes one ambient loop into the bottom step relative to its basepoint.
pub fn surjectivity_leg<S: Scalar>(
    model: &FilteredSpaceModel<S>,
    probe: &LoopModel<S>,
    cfg: &Pi1Config,
) -> Result<(HomotopyRecord<S>, LoopModel<S>)> {
    check_axis(model, probe)?;
    let gamma0 = loop_to_map(probe)?;
    let sigma = gamma0.domain().clone();
    let q = NeighborhoodSpec::whole(&sigma, model.carrier.clone());
    let base = sigma.index_of(&[0]).expect("vertex 0 exists");
    let rel = SubcomplexCarrier::from_simplices(&sigma, &[base])?;
    let alpha = model.filtration.bottom();
    let rec = individual_approximation(&sigma, &gamma0, &q, &rel, model, alpha, &cfg.individual)?;
    let eta = trace_loop(&rec.eta, probe.axis)?.simplify();
    Ok((rec, eta))
}

fn check_axis<S: Scalar>(model: &FilteredSpaceModel<S>, l: &LoopModel<S>) -> Result<()> {
    l.validate()?;
    if l.dim() != model.dim() {
        return Err(Error::input(format!(
            "loop in dimension {} for a model in dimension {}",
            l.dim(),
            model.dim()
        )));
    }
    if !model.in_step(model.filtration.bottom(), l.basepoint()) {
        return Err(Error::precondition(format!(
            "basepoint {} is not in the bottom step",
            l.basepoint()
        )));
    }
    Ok(())
}

fn probe_report<S: Scalar>(
    model: &FilteredSpaceModel<S>,
    index: usize,
    probe: &LoopModel<S>,
    cfg: &Pi1Config,
) -> Result<(ProbeReport, LoopModel<S>)> {
    let (rec, eta) = surjectivity_leg(model, probe, cfg)?;
    let dom = rec.eta.domain();
    let eta_equals_probe = (0..dom.vertices().len()).all(|v| {
        rec.gamma0
            .eval(dom.vertex(v))
            .is_ok_and(|y| y == *rec.eta.value(v))
    });
    let r = ProbeReport {
        index,
        vertices: probe.cycle().len(),
        support: probe.support(),
        winding_before: winding_number(probe)?,
        winding_after: winding_number(&eta)?,
        alpha: rec.alpha,
        beta: rec.beta,
        chart_beta: rec.chart_beta,
        pushed: rec.pushed.len(),
        epsilon: rec.epsilon.to_string(),
        certified: rec.certified(),
        eta_in_carrier: rec.q.check_pl(&rec.eta)?.holds,
        eta_equals_probe,
    };
    Ok((r, eta))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Unwrapped polar angles of the `(i, j)` projection along the cycle,
/// closing up to `2 pi * winding`.
fn lifted_angles<S: Scalar>(l: &LoopModel<S>) -> Vec<f64> {
    let (i, j) = l.axis;
    let raw: Vec<f64> = l
        .points
        .iter()
        .map(|p| p[j].to_f64_lossy().atan2(p[i].to_f64_lossy()))
        .collect();
    let mut out = vec![raw[0]];
    for w in raw.windows(2) {
        let mut d = w[1] - w[0];
        while d > PI {
            d -= 2.0 * PI;
        }
        while d <= -PI {
            d += 2.0 * PI;
        }
        out.push(out[out.len() - 1] + d);
    }
    out
}

/// The annulus-interpolation homotopy between two loops with a common
/// basepoint and equal vertex counts, on a prism with `layers` layers:
/// polar interpolation in the axis plane, affine elsewhere, plus a bump in
/// `bump_coord` vanishing on the ends and the basepoint column.
pub fn annulus_homotopy<S: Scalar>(
    a: &LoopModel<S>,
    b: &LoopModel<S>,
    layers: usize,
    bump_coord: usize,
    bump: &S,
) -> Result<(SimplicialComplex<S>, Prism<S>, PLMap<S>)> {
    let n = a.cycle().len();
    if b.cycle().len() != n || a.axis != b.axis || a.basepoint() != b.basepoint() {
        return Err(Error::input(
            "the loops need equal vertex counts, axis and basepoint",
        ));
    }
    let (i, j) = a.axis;
    let (ta, tb) = (lifted_angles(a), lifted_angles(b));
    let radius = |p: &Point<S>| p[i].to_f64_lossy().hypot(p[j].to_f64_lossy());
    let base = polygon_domain::<S>(n)?;
    let prism = base.triangulate_prism_layers(layers);
    let mut values = Vec::with_capacity(n * (layers + 1));
    for l in 0..=layers {
        let tau = S::from_count(l) / S::from_count(layers);
        let tf = l as f64 / layers as f64;
        for k in 0..n {
            let (pa, pb) = (&a.points[k], &b.points[k]);
            if l == 0 || k == 0 {
                values.push(pa.clone());
                continue;
            }
            if l == layers {
                values.push(pb.clone());
                continue;
            }
            let mut v = pa.lerp(pb, &tau);
            let r = (1.0 - tf) * radius(pa) + tf * radius(pb);
            let th = (1.0 - tf) * ta[k] + tf * tb[k];
            v[i] = S::round_from_f64(r * th.cos(), ANGLE_DENOMINATOR);
            v[j] = S::round_from_f64(r * th.sin(), ANGLE_DENOMINATOR);
            // 4 tau (1 - tau) * (distance to the basepoint column) / (n / 2)
            let w = S::from_count(k.min(n - k) * 2) / S::from_count(n);
            let h = S::from_count(4) * tau.clone() * (S::one() - tau.clone()) * w * bump.clone();
            v[bump_coord] = v[bump_coord].clone() + h;
            values.push(v);
        }
    }
    let gamma = PLMap::new(prism.complex.clone(), values)?;
    Ok((base, prism, gamma))
}

/// Restriction of a PL map on a prism subdivision to one end, as a loop.
fn end_loop<S: Scalar>(map: &PLMap<S>, height: &S, axis: (usize, usize)) -> Result<LoopModel<S>> {
    let dom = map.domain();
    let mut verts = Vec::new();
    let mut values = Vec::new();
    for v in 0..dom.vertices().len() {
        let x = dom.vertex(v);
        if x[2] == *height {
            verts.push(Point::new(x.coords()[..2].to_vec()));
            values.push(map.value(v).clone());
        }
    }
    let singletons = (0..verts.len()).map(|k| vec![k]).collect();
    let flat = PLMap::new(SimplicialComplex::new(verts, singletons)?, values)?;
    trace_loop(&flat, axis)
}

/// Joins two step loops of equal winding by a step-level homotopy.
pub fn injectivity_leg<S: Scalar>(
    model: &FilteredSpaceModel<S>,
    left: (usize, &LoopModel<S>),
    right: (usize, &LoopModel<S>),
    cfg: &Pi1Config,
) -> InjectivityReport {
    let (a, b) = (left.1, right.1);
    let mut rep = InjectivityReport {
        left: left.0,
        right: right.0,
        winding: (
            winding_number(a).unwrap_or(i64::MIN),
            winding_number(b).unwrap_or(i64::MIN),
        ),
        base_vertices: 0,
        layers: 0,
        oracle_in_carrier: false,
        oracle_support: BTreeSet::new(),
        alpha: 0,
        beta: None,
        ends_fixed: false,
        basepoint_fixed: false,
        eta_in_carrier: false,
        certified: false,
        end_windings: (0, 0),
        error: None,
    };
    if let Err(e) = run_injectivity(model, a, b, cfg, &mut rep) {
        rep.error = Some(e.to_string());
    }
    rep
}

fn run_injectivity<S: Scalar>(
    model: &FilteredSpaceModel<S>,
    a: &LoopModel<S>,
    b: &LoopModel<S>,
    cfg: &Pi1Config,
    rep: &mut InjectivityReport,
) -> Result<()> {
    check_axis(model, a)?;
    check_axis(model, b)?;
    if a.basepoint() != b.basepoint() {
        return Err(Error::input("the loops have different basepoints"));
    }
    if rep.winding.0 != rep.winding.1 {
        return Err(Error::input("the loops have different windings"));
    }
    let support: BTreeSet<usize> = a.support().union(&b.support()).copied().collect();
    let bottom = model.filtration.bottom();
    let alpha = model
        .filtration
        .least_step_for(&support, bottom)
        .ok_or_else(|| Error::precondition("the loops lie in no single step"))?;
    rep.alpha = alpha;
    let step = &model.filtration.step(alpha)?.coords;
    let bump_coord = (0..model.dim())
        .rev()
        .find(|c| !step.contains(c))
        .ok_or_else(|| Error::precondition("no coordinate outside the loops' step"))?;
    let bump = S::from_ratio(cfg.bump.0, cfg.bump.1);
    let (na, nb) = (a.cycle().len(), b.cycle().len());
    let n = na / gcd(na, nb) * nb;
    let (mut a, mut b) = (a.resample(n / na), b.resample(n / nb));
    let mut layers = 2;
    let mut found = None;
    for round in 0..=cfg.max_refinements {
        if round > 0 {
            a = a.resample(2);
            b = b.resample(2);
            layers *= 2;
        }
        let (base, prism, gamma) = annulus_homotopy(&a, &b, layers, bump_coord, &bump)?;
        let whole = NeighborhoodSpec::whole(&prism.complex, model.carrier.clone());
        let check = whole.check_pl(&gamma)?;
        if check.holds && check.exact {
            found = Some((base, prism, gamma, whole));
            break;
        }
    }
    let (base, prism, gamma, q) = found.ok_or_else(|| {
        Error::resolution("the annulus oracle leaves the carrier at every refinement")
    })?;
    rep.oracle_in_carrier = true;
    rep.oracle_support = gamma.support();
    rep.base_vertices = base.vertices().len();
    rep.layers = layers;
    let column =
        SubcomplexCarrier::from_simplices(&base, &[base.index_of(&[0]).expect("vertex 0 exists")])?;
    let rel = prism
        .ends_carrier()
        .union(&prism.prism_carrier(&base, &column));
    let rec = individual_approximation(
        &prism.complex,
        &gamma,
        &q,
        &rel,
        model,
        alpha,
        &cfg.individual,
    )?;
    rep.beta = model.filtration.least_step_for(&rec.eta.support(), alpha);
    rep.certified = rec.certified();
    rep.eta_in_carrier = q.check_pl(&rec.eta)?.holds;
    let dom = rec.eta.domain();
    let mut ends = true;
    let mut col = true;
    for v in 0..dom.vertices().len() {
        let x = dom.vertex(v);
        let on_end = x[2].is_zero() || x[2] == S::one();
        let on_column = x[0].is_zero() && x[1].is_zero();
        if on_end || on_column {
            let same = gamma.eval(x)? == *rec.eta.value(v);
            ends &= !on_end || same;
            col &= !on_column || same;
        }
    }
    rep.ends_fixed = ends;
    rep.basepoint_fixed = col;
    rep.end_windings = (
        winding_number(&end_loop(&rec.eta, &S::zero(), a.axis)?)?,
        winding_number(&end_loop(&rec.eta, &S::one(), a.axis)?)?,
    );
    Ok(())
}

/// Direct system of step classes of loops, merged by the step-level
/// homotopies, with the ambient winding as cone.
fn winding_colimit<S: Scalar>(
    model: &FilteredSpaceModel<S>,
    loops: &[(String, LoopModel<S>)],
    merges: &[(usize, usize, usize)],
    probe_windings: &[i64],
) -> WindingColimit {
    let bottom = model.filtration.bottom();
    let mut out = WindingColimit {
        loops: Vec::new(),
        classes_per_step: Vec::new(),
        colimit_classes: 0,
        witnesses_verified: false,
        targets: Vec::new(),
        psi: None,
        error: None,
    };
    let mut info = Vec::new();
    for (name, l) in loops {
        match (
            model.filtration.least_step_for(&l.support(), bottom),
            winding_number(l),
        ) {
            (Some(step), Ok(w)) => info.push(StepLoop {
                source: name.clone(),
                step,
                winding: w,
            }),
            _ => {
                out.error = Some(format!("{name} lies in no step or has no winding"));
                return out;
            }
        }
    }
    let targets: BTreeSet<i64> = info
        .iter()
        .map(|s| s.winding)
        .chain(probe_windings.iter().copied())
        .collect();
    out.targets = targets.iter().copied().collect();
    let target_index: BTreeMap<i64, usize> = out
        .targets
        .iter()
        .enumerate()
        .map(|(k, &w)| (w, k))
        .collect();

    let indices: Vec<usize> = model.filtration.steps().iter().map(|s| s.index).collect();
    // per step: members and their class representative
    let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
    for &alpha in &indices {
        let members: Vec<usize> = (0..info.len()).filter(|&k| info[k].step <= alpha).collect();
        let mut parent: Vec<usize> = (0..info.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        for &(l, r, beta) in merges {
            if beta <= alpha {
                let (x, y) = (find(&mut parent, l), find(&mut parent, r));
                parent[x.max(y)] = x.min(y);
            }
        }
        let mut reps: Vec<usize> = Vec::new();
        let mut rows = Vec::new();
        for &m in &members {
            let root = find(&mut parent, m);
            let c = match reps.iter().position(|&r| r == root) {
                Some(c) => c,
                None => {
                    reps.push(root);
                    reps.len() - 1
                }
            };
            rows.push((m, c));
        }
        out.classes_per_step.push((alpha, reps.len()));
        classes.push(rows);
    }
    let class_of = |a: usize, m: usize| classes[a].iter().find(|(x, _)| *x == m).map(|(_, c)| *c);
    let elements: Vec<Vec<String>> = out
        .classes_per_step
        .iter()
        .map(|&(_, n)| (0..n).map(|c| format!("class{c}")).collect())
        .collect();
    let mut edges = Vec::new();
    for a in 0..indices.len().saturating_sub(1) {
        let n = out.classes_per_step[a].1;
        let mut map = vec![0; n];
        for &(m, c) in &classes[a] {
            map[c] = class_of(a + 1, m).expect("members persist");
        }
        edges.push((a, a + 1, map));
    }
    let mut maps = Vec::new();
    for (a, rows) in classes.iter().enumerate() {
        let mut row = vec![0; out.classes_per_step[a].1];
        for &(m, c) in rows {
            row[c] = target_index[&info[m].winding];
        }
        maps.push(row);
    }
    out.loops = info;
    let labels = indices.iter().map(|a| format!("pi1(M_{a})")).collect();
    let result = DirectSystemOfSets::new(labels, elements, edges).and_then(|sys| {
        let colimit = set_colimit(&sys);
        let cone = Cone {
            target: out.targets.iter().map(|w| w.to_string()).collect(),
            maps,
        };
        let psi = universal_map(&sys, &colimit, &cone)?;
        Ok((colimit.classes.len(), colimit.verify(&sys), psi))
    });
    match result {
        Ok((n, verified, psi)) => {
            out.colimit_classes = n;
            out.witnesses_verified = verified;
            out.psi = Some(psi);
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

/// Both legs on the probes and the extra step loops, then the comparison
/// of the direct limit of step classes with the ambient windings.
pub fn pi1_directlimit_experiment<S: Scalar>(
    model: &FilteredSpaceModel<S>,
    probes: &[LoopModel<S>],
    step_loops: &[LoopModel<S>],
    cfg: &Pi1Config,
) -> Result<Pi1Report> {
    let runs: Vec<(ProbeReport, LoopModel<S>)> = probes
        .par_iter()
        .enumerate()
        .map(|(k, p)| probe_report(model, k, p, cfg))
        .collect::<Result<_>>()?;
    let mut loops: Vec<(String, LoopModel<S>)> = runs
        .iter()
        .map(|(r, l)| (format!("probe{}_endpoint", r.index), l.clone()))
        .collect();
    loops.extend(
        step_loops
            .iter()
            .enumerate()
            .map(|(k, l)| (format!("step_loop{k}"), l.clone())),
    );
    for (name, l) in &loops {
        check_axis(model, l).map_err(|e| Error::input(format!("{name}: {e}")))?;
    }
    let windings: Vec<Option<i64>> = loops.iter().map(|(_, l)| winding_number(l).ok()).collect();
    let mut pairs = Vec::new();
    let mut last: BTreeMap<i64, usize> = BTreeMap::new();
    for (k, w) in windings.iter().enumerate() {
        if let Some(w) = w {
            if let Some(prev) = last.insert(*w, k) {
                pairs.push((prev, k));
            }
        }
    }
    let injectivity: Vec<InjectivityReport> = pairs
        .par_iter()
        .map(|&(l, r)| injectivity_leg(model, (l, &loops[l].1), (r, &loops[r].1), cfg))
        .collect();
    let merges: Vec<(usize, usize, usize)> = injectivity
        .iter()
        .filter(|r| r.holds())
        .map(|r| (r.left, r.right, r.beta.expect("holds implies a step")))
        .collect();
    let probe_windings: Vec<i64> = runs.iter().map(|(r, _)| r.winding_before).collect();
    let colimit = winding_colimit(model, &loops, &merges, &probe_windings);
    Ok(Pi1Report {
        surjectivity: runs.into_iter().map(|(r, _)| r).collect(),
        injectivity,
        colimit,
    })
}

fn round_point<S: Scalar>(x: f64, y: f64, dim: usize, axis: (usize, usize)) -> Point<S> {
    let mut c = vec![S::zero(); dim];
    c[axis.0] = S::round_from_f64(x, ANGLE_DENOMINATOR);
    c[axis.1] = S::round_from_f64(y, ANGLE_DENOMINATOR);
    Point::new(c)
}

/// `S^dim` minus `{x_0 = x_1 = 0}` filtered by `E_2, ..., E_dim`.
pub fn punctured_model<S: Scalar>(dim: usize) -> Result<FilteredSpaceModel<S>> {
    let f = Filtration::coordinate_chain_from(2, dim)?;
    FilteredSpaceModel::new(
        f,
        Region::CoordinatePlaneComplement { i: 0, j: 1 },
        S::from_ratio(1, 4),
    )
}

/// `n` points on the circle of radius `r` in the axis plane, winding
/// `winding` times, starting at `(r, 0)`.
pub fn circle_loop<S: Scalar>(
    dim: usize,
    axis: (usize, usize),
    r: f64,
    winding: i64,
    n: usize,
) -> Result<LoopModel<S>> {
    let mut cycle = vec![round_point(r, 0.0, dim, axis)];
    for k in 1..n {
        let th = 2.0 * PI * winding as f64 * k as f64 / n as f64;
        cycle.push(round_point(r * th.cos(), r * th.sin(), dim, axis));
    }
    LoopModel::from_cycle(cycle, axis)
}

/// Adds `amplitude * ((k mod m) + 1) / m` to coordinate `coords[k mod len]`
/// at every vertex but the basepoint.
pub fn perturb_loop<S: Scalar>(l: &LoopModel<S>, coords: &[usize], amplitude: &S) -> LoopModel<S> {
    let m = coords.len().max(1);
    let mut cycle = l.cycle().to_vec();
    for (k, p) in cycle.iter_mut().enumerate().skip(1) {
        let c = coords[k % m];
        let h = amplitude.clone() * S::from_count(k % m + 1) / S::from_count(m);
        p[c] = p[c].clone() + h;
    }
    LoopModel::from_cycle(cycle, l.axis)
        .expect("perturbing off-axis coordinates keeps the loop valid")
}

/// Default probes in a punctured model of dimension `dim >= 3`: a planar
/// winding-one loop and a winding-three loop perturbed into every
/// coordinate outside the axis plane.
pub fn default_probes<S: Scalar>(
    dim: usize,
    axis: (usize, usize),
    amplitude: &S,
) -> Result<Vec<LoopModel<S>>> {
    let planar = circle_loop(dim, axis, 1.0, 1, 8)?;
    let three = circle_loop(dim, axis, 1.0, 3, 24)?;
    let others: Vec<usize> = (0..dim).filter(|&c| c != axis.0 && c != axis.1).collect();
    Ok(vec![planar, perturb_loop(&three, &others, amplitude)])
}

/// Two winding-one loops of different shapes through `(1, 0)`: a circle
/// and an ellipse stretched along the second axis, `n` vertices each.
pub fn default_step_loops<S: Scalar>(
    dim: usize,
    axis: (usize, usize),
    n: usize,
) -> Result<Vec<LoopModel<S>>> {
    let ring = |stretch: f64| {
        let cycle = (0..n)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                round_point(th.cos(), stretch * th.sin(), dim, axis)
            })
            .collect();
        LoopModel::from_cycle(cycle, axis)
    };
    Ok(vec![ring(1.0)?, ring(1.5)?])
}
