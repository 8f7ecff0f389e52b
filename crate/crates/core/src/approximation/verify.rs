//! Checkable forms of the properties of `Theta` on a sampling plan.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtered::FilteredSpaceModel;
use crate::geometry::{Point, Simplex};
use crate::plmap::{MapEval, PLMap};
use crate::scalar::Scalar;

use super::neighborhood::NeighborhoodSpec;
use super::theta::SimultaneousApproximation;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingPlan {
    /// Random domain points for pointwise checks.
    pub points: usize,
    /// Equally spaced times.
    pub t_grid: usize,
    /// Random points compared in the twin-input check.
    pub twin_samples: usize,
    /// Random points per constraint simplex in sampled membership checks.
    pub per_simplex: usize,
    pub seed: u64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            points: 100,
            t_grid: 50,
            twin_samples: 200,
            per_simplex: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub property: char,
    pub holds: bool,
    pub exact: bool,
    pub samples: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaPropertyReport {
    pub checks: Vec<PropertyCheck>,
    /// Step of the endpoint when its support is finite.
    pub beta: Option<usize>,
}

impl ThetaPropertyReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn get(&self, property: char) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.property == property)
    }
}

/// `gamma + a * t_c(z) * e_0` with `t_c = rank * min barycentric` on one
/// simplex and zero elsewhere.
pub struct TwinBump<'a, S: Scalar> {
    pub base: &'a PLMap<S>,
    pub simplex: Simplex<S>,
    pub amplitude: S,
}

impl<S: Scalar> MapEval<S> for TwinBump<'_, S> {
    fn target_dim(&self) -> usize {
        self.base.target_dim()
    }

    fn eval(&self, z: &Point<S>) -> Result<Point<S>> {
        let g = self.base.eval(z)?;
        let Some(s) = self.simplex.barycentric_coordinates(z)?.inside() else {
            return Ok(g);
        };
        let m = s.into_iter().fold(S::one(), S::min_of);
        let bump = S::from_count(self.simplex.rank()) * m * self.amplitude.clone();
        Ok(g + Point::basis(self.target_dim(), 0).scale(&bump))
    }
}

fn check(
    property: char,
    holds: bool,
    exact: bool,
    samples: usize,
    detail: impl Into<String>,
) -> PropertyCheck {
    PropertyCheck {
        property,
        holds,
        exact,
        samples,
        detail: detail.into(),
    }
}

/// Runs the checks (a)-(h) for `gamma` in `P` against the outer neighbourhood `q`.
pub fn verify_theta_properties<S: Scalar>(
    approx: &SimultaneousApproximation<S>,
    gamma: &PLMap<S>,
    q: &NeighborhoodSpec<S>,
    model: &FilteredSpaceModel<S>,
    alpha: usize,
    plan: &SamplingPlan,
) -> Result<ThetaPropertyReport> {
    let theta = &approx.theta;
    let sigma = theta.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let tops = sigma.maximal_simplices();
    if tops.is_empty() {
        return Err(Error::input("empty domain"));
    }
    let samples: Vec<Point<S>> = (0..plan.points)
        .map(|k| sigma.simplex(tops[k % tops.len()]).random_point(&mut rng))
        .collect();
    let n = plan.t_grid.max(2);
    let times: Vec<S> = (0..n)
        .map(|k| S::from_count(k) / S::from_count(n - 1))
        .collect();
    let on_sigma = gamma.domain().vertices() == sigma.vertices()
        && gamma.domain().simplices() == sigma.simplices();
    let eta = theta.bake_slice(gamma, &S::one())?;
    let mut checks = Vec::new();

    // (a)
    let mut ok = true;
    for x in &samples {
        ok &= theta.evaluate(gamma, x, &S::zero())? == gamma.eval(x)?;
    }
    checks.push(check(
        'a',
        ok,
        true,
        samples.len(),
        "time zero returns the input",
    ));

    // (b)
    let slices: Vec<(bool, bool, usize)> = times
        .par_iter()
        .enumerate()
        .map(|(k, t)| {
            let baked = theta.bake_slice(gamma, t)?;
            let rb = q.check_pl(&baked)?;
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed.wrapping_add(k as u64 + 1));
            let rs = q.check_sampled(&theta.slice(gamma, t.clone()), plan.per_simplex, &mut rng)?;
            let samples = rs.checks.iter().map(|c| c.samples).sum::<usize>();
            Ok((rb.holds && rs.holds, rb.exact && on_sigma, samples))
        })
        .collect::<Result<_>>()?;
    checks.push(check(
        'b',
        slices.iter().all(|s| s.0),
        slices.iter().all(|s| s.1),
        slices.iter().map(|s| s.2).sum(),
        format!("membership in the outer neighbourhood on {n} times"),
    ));

    // (c)
    checks.push(twin_check(approx, gamma, &eta, plan, &mut rng)?);

    // (d)
    let support = eta.support();
    let beta = model.filtration.least_step_for(&support, alpha);
    let frozen_support: BTreeSet<usize> = approx
        .anchors
        .iter()
        .map(|x| gamma.eval(x))
        .chain(
            theta
                .relative()
                .vertex_indices(sigma)
                .into_iter()
                .map(|v| Ok(gamma.value(v).clone())),
        )
        .collect::<Result<Vec<_>>>()?
        .iter()
        .flat_map(Point::support)
        .collect();
    let applies = model.filtration.least_step_for(&frozen_support, alpha) == Some(alpha);
    checks.push(match (applies, beta) {
        (false, _) => check(
            'd',
            true,
            true,
            0,
            "anchor values leave the given step; nothing to check",
        ),
        (true, Some(b)) => check(
            'd',
            true,
            true,
            eta.values().len(),
            format!("endpoint support {support:?} lies in step {b}"),
        ),
        (true, None) => check(
            'd',
            false,
            true,
            eta.values().len(),
            format!("endpoint support {support:?} lies in no step"),
        ),
    });

    // (e)
    let mut ok = true;
    for x in &samples {
        ok &= theta.evaluate(gamma, x, &S::zero())? == gamma.eval(x)?;
        ok &= theta.evaluate(gamma, x, &S::one())? == eta.eval(x)?;
    }
    checks.push(check(
        'e',
        ok,
        true,
        2 * samples.len(),
        "endpoints are the input and the baked endpoint",
    ));

    // (f)
    let gamma_support = gamma.support();
    if model.filtration.least_step_for(&gamma_support, alpha) == Some(alpha) {
        let mut all = gamma_support.clone();
        for t in &times {
            all.extend(theta.bake_slice(gamma, t)?.support());
        }
        let b = model.filtration.least_step_for(&all, alpha);
        checks.push(check(
            'f',
            b.is_some(),
            on_sigma,
            n,
            format!("homotopy support {all:?} lies in step {b:?}"),
        ));
    } else {
        checks.push(check(
            'f',
            true,
            true,
            0,
            "input leaves the given step; nothing to check",
        ));
    }

    // (g)
    let mut ok = true;
    let mut count = 0;
    for &d in &tops {
        let verts = &sigma.simplices()[d];
        let y = gamma.value(verts[0]);
        if verts.iter().any(|&v| gamma.value(v) != y) {
            continue;
        }
        let s = sigma.simplex(d);
        for t in &times {
            let x = s.random_point(&mut rng);
            ok &= theta.evaluate(gamma, &x, t)? == *y;
            count += 1;
        }
    }
    checks.push(check(
        'g',
        ok,
        true,
        count,
        "constant simplices stay constant",
    ));

    // (h)
    let mut frozen: Vec<Point<S>> = approx.anchors.clone();
    for i in 0..sigma.len() {
        if theta.relative().contains_simplex(i) {
            frozen.push(sigma.simplex(i).random_point(&mut rng));
        }
    }
    let ok = times
        .par_iter()
        .map(|t| -> Result<bool> {
            for x in &frozen {
                if theta.evaluate(gamma, x, t)? != gamma.eval(x)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);
    checks.push(check(
        'h',
        ok,
        true,
        frozen.len() * n,
        "anchors and the relative part stay fixed",
    ));

    Ok(ThetaPropertyReport { checks, beta })
}

fn twin_check<S: Scalar>(
    approx: &SimultaneousApproximation<S>,
    gamma: &PLMap<S>,
    eta: &PLMap<S>,
    plan: &SamplingPlan,
    rng: &mut ChaCha8Rng,
) -> Result<PropertyCheck> {
    let theta = &approx.theta;
    let top = theta.top_complex();
    let Some((&d, ch)) = theta.top_charts().iter().next() else {
        return Ok(check(
            'c',
            true,
            true,
            0,
            "no free top simplex; the endpoint is frozen",
        ));
    };
    let simplex = top.simplex(d);
    let images: Vec<Point<S>> = simplex
        .vertices()
        .iter()
        .map(|v| gamma.eval(v))
        .collect::<Result<_>>()?;
    let v = ch.chart.domain();
    let mut amplitude = S::one();
    let mut found = false;
    for _ in 0..=40 {
        if images.iter().all(|p| v.contains_ball(p, &amplitude, true)) {
            found = true;
            break;
        }
        amplitude = amplitude * S::half();
    }
    if !found {
        return Ok(check('c', false, false, 0, "no admissible bump amplitude"));
    }
    let twin = TwinBump {
        base: gamma,
        simplex: simplex.clone(),
        amplitude,
    };
    if twin.eval(&simplex.barycenter())? == gamma.eval(&simplex.barycenter())? {
        return Ok(check(
            'c',
            false,
            false,
            0,
            "the twin input does not differ",
        ));
    }
    let sigma = theta.domain();
    let tops = sigma.maximal_simplices();
    let pts: Vec<Point<S>> = (0..plan.twin_samples)
        .map(|k| sigma.simplex(tops[k % tops.len()]).random_point(rng))
        .collect();
    let ok = pts
        .par_iter()
        .map(|x| Ok(theta.evaluate(&twin, x, &S::one())? == eta.eval(x)?))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);
    Ok(check(
        'c',
        ok,
        false,
        pts.len(),
        "inputs agreeing on anchors and the relative part share the endpoint",
    ))
}
