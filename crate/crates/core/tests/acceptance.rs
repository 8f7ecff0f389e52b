//! Acceptance run: every criterion at its stated scale and time limit.
//! Prints one `PASS`/`FAIL` line per criterion and exits nonzero on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wellfilled::approximation::{
    simultaneous_approximation, verify_theta_properties, EngineConfig, NeighborhoodSpec,
    SamplingPlan,
};
use wellfilled::convexity::{
    conv2_with_hull_contains, conv_n_contains, hull_contains, FinitePointSet,
};
use wellfilled::direct_limits::{
    factorization_failure, set_colimit, universal_map, Cone, DirectSystemOfSets,
};
use wellfilled::filling::Filling;
use wellfilled::invariants::{
    default_probes, default_step_loops, palais_experiment, pi0_report, pi1_directlimit_experiment,
    punctured_model, punctured_slab_input, punctured_slab_model, random_component_model,
    two_ball_input, two_ball_model, Pi1Config,
};
use wellfilled::{ExactComplex, ExactPoint, MapEval, PLMap, Rational, Scalar, SubcomplexCarrier};

type Outcome = Result<String, String>;

/// Name, time limit in seconds and check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn filling() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let mut points = 0;
    for i in 0..100 {
        let rank = 2 + i % 3;
        let s = random_simplex(&mut r, rank, 6);
        let g1 = random_boundary_map(&mut r, &s, 6);
        let g2 = random_boundary_map(&mut r, &s, 6);
        let (a, b) = (rand_q(&mut r, 2, 3), rand_q(&mut r, 2, 3));
        let sum = PLMap::lincomb(&[(a.clone(), &g1), (b.clone(), &g2)]).unwrap();
        let c = random_point(&mut r, 6, 3, 3);
        let constant = PLMap::new(g1.domain().clone(), vec![c.clone(); g1.values().len()]).unwrap();
        let f1 = Filling::new(s.clone(), &g1).unwrap();
        let f2 = Filling::new(s.clone(), &g2).unwrap();
        let fs = Filling::new(s.clone(), &sum).unwrap();
        let fc = Filling::new(s.clone(), &constant).unwrap();
        for _ in 0..20 {
            let drop = r.random_range(0..rank);
            let face: Vec<ExactPoint> = (0..rank)
                .filter(|&k| k != drop)
                .map(|k| s.vertices()[k].clone())
                .collect();
            let x = combination(&face, &random_weights(&mut r, rank - 1));
            ensure(f1.eval(&x).unwrap() == g1.eval(&x).unwrap(), || {
                format!("instance {i}: boundary value at {x}")
            })?;
            let x = combination(s.vertices(), &random_weights(&mut r, rank));
            let cert = f1.eval_certified(&x).unwrap();
            ensure(cert.verify(), || {
                format!("instance {i}: certificate at {x}")
            })?;
            ensure(cert.value == filled_value(&s, &g1, &x), || {
                format!("instance {i}: cone formula at {x}")
            })?;
            let lin = f1.eval(&x).unwrap().scale(&a) + f2.eval(&x).unwrap().scale(&b);
            ensure(fs.eval(&x).unwrap() == lin, || {
                format!("instance {i}: linearity at {x}")
            })?;
            ensure(fc.eval(&x).unwrap() == c, || {
                format!("instance {i}: constant at {x}")
            })?;
            points += 2;
        }
    }
    Ok(format!("100 instances, {points} points"))
}

fn subdivision() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    for i in 0..500 {
        let rank = 2 + i % 4;
        let s = random_simplex(&mut r, rank, 6);
        let b = ExactComplex::from_simplex(&s).barycentric_subdivide();
        let k = Rational::from_count(rank);
        let d = diameter_sq(s.vertices());
        let shrink = (k.clone() - Rational::one()) / k;
        ensure(b.max_diameter_sq() <= d * shrink.clone() * shrink, || {
            format!("simplex {i}: diameter bound")
        })?;
        let coords: Vec<Vec<Rational>> = b
            .vertices()
            .iter()
            .map(|v| barycentric(s.vertices(), v).unwrap())
            .collect();
        ensure(
            coords.iter().flatten().all(|c| *c >= Rational::zero()),
            || format!("simplex {i}: containment"),
        )?;
        let mut total = Rational::zero();
        for t in b.simplices_of_rank(rank) {
            let rows: Vec<&Vec<Rational>> = b.simplices()[t].iter().map(|&v| &coords[v]).collect();
            total += volume_from_barycentric(&rows);
        }
        ensure(total == Rational::one(), || {
            format!("simplex {i}: volumes sum to {total}")
        })?;
    }
    let tri = ExactComplex::from_simplex(
        &wellfilled::ExactSimplex::new(vec![
            ExactPoint::from_i64(&[0, 0]),
            ExactPoint::from_i64(&[1, 0]),
            ExactPoint::from_i64(&[0, 1]),
        ])
        .unwrap(),
    );
    let m = tri.barycentric_subdivide().max_diameter_sq();
    ensure(m == q(5, 9), || {
        format!("triangle max diameter squared {m}")
    })?;
    Ok("500 simplices; triangle max diameter squared 5/9".into())
}

fn convexity() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let mut inside = 0;
    for i in 0..50 {
        let pts = point_set_3d(&mut r);
        let set = FinitePointSet::new(pts.clone()).unwrap();
        for _ in 0..100 {
            let p = hull_probe(&mut r, &pts);
            let n = r.random_range(1..=3);
            let direct = conv_n_contains(&set, n + 1, &p).unwrap();
            let split = conv2_with_hull_contains(&set, n, &p).unwrap();
            ensure(direct.is_some() == split.is_some(), || {
                format!("set {i}: membership differs at {p}")
            })?;
            ensure(direct.as_ref().is_none_or(|c| c.verify(&p)), || {
                format!("set {i}: certificate at {p}")
            })?;
            ensure(split.as_ref().is_none_or(|c| c.verify(&p, n)), || {
                format!("set {i}: split certificate at {p}")
            })?;
            let oracle = hull_oracle_3d(&pts, &p);
            let saturated = conv_n_contains(&set, 4, &p).unwrap().is_some();
            ensure(
                saturated == oracle && hull_contains(&set, &p).unwrap() == oracle,
                || format!("set {i}: saturation at {p}"),
            )?;
            inside += usize::from(oracle);
        }
    }
    Ok(format!("5000 probes, {inside} in the hull"))
}

fn colimits() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    let mut perturbed = 0;
    for i in 0..100 {
        let (rs, sys) = loop {
            let rs = RandomSystem::generate(&mut r, 5, 6, 2);
            if let Ok(sys) = DirectSystemOfSets::new(rs.labels(), rs.elements(), rs.edges.clone()) {
                break (rs, sys);
            }
        };
        let c = set_colimit(&sys);
        let rel = rs.brute_force_relation();
        let flat: Vec<usize> = c.class_of.iter().flatten().copied().collect();
        for u in 0..flat.len() {
            for v in 0..flat.len() {
                ensure(rel[u][v] == (flat[u] == flat[v]), || {
                    format!("system {i}: elements {u} and {v}")
                })?;
            }
        }
        ensure(c.witnesses.iter().all(|w| w.verify(&sys)), || {
            format!("system {i}: witness")
        })?;
        let targets = r.random_range(1..=4);
        let g: Vec<usize> = (0..c.classes.len())
            .map(|_| r.random_range(0..targets))
            .collect();
        let cone = Cone {
            target: (0..targets).map(|t| format!("t{t}")).collect(),
            maps: c
                .class_of
                .iter()
                .map(|row| row.iter().map(|&k| g[k]).collect())
                .collect(),
        };
        let psi = universal_map(&sys, &c, &cone).unwrap().psi;
        ensure(psi == g, || format!("system {i}: induced map"))?;
        for k in 0..g.len() {
            for other in (0..targets).filter(|&o| o != g[k]) {
                let mut bad = g.clone();
                bad[k] = other;
                ensure(factorization_failure(&c, &cone, &bad).is_some(), || {
                    format!("system {i}: perturbation accepted")
                })?;
                perturbed += 1;
            }
        }
    }
    Ok(format!("100 systems, {perturbed} perturbations rejected"))
}

/// Least coordinate-prefix step holding every value, by a direct scan.
fn scanned_step(values: &[ExactPoint], at_least: usize) -> usize {
    let top = values
        .iter()
        .flat_map(|v| (0..v.dim()).filter(|&k| !v[k].is_zero()))
        .max()
        .map_or(0, |k| k + 1);
    top.max(at_least)
}

fn theta_case(
    name: &str,
    sigma: ExactComplex,
    values: Vec<ExactPoint>,
    dim: usize,
) -> Result<String, String> {
    let gamma = PLMap::new(sigma.clone(), values).unwrap();
    let model = punctured_model::<Rational>(dim).unwrap();
    let alpha = scanned_step(gamma.values(), 2);
    let qn = NeighborhoodSpec::whole(&sigma, model.carrier.clone());
    let out = simultaneous_approximation(
        &sigma,
        &gamma,
        &qn,
        &SubcomplexCarrier::empty(),
        &model,
        &EngineConfig::default(),
    )
    .map_err(|e| format!("{name}: {e}"))?;
    let plan = SamplingPlan::default();
    let rep = verify_theta_properties(&out, &gamma, &qn, &model, alpha, &plan)
        .map_err(|e| format!("{name}: {e}"))?;
    for c in &rep.checks {
        ensure(c.holds, || format!("{name}: ({}) {}", c.property, c.detail))?;
    }
    for p in ['a', 'd', 'g', 'h'] {
        ensure(rep.get(p).unwrap().exact, || {
            format!("{name}: ({p}) not exact")
        })?;
    }
    ensure(rep.get('c').unwrap().samples >= plan.twin_samples, || {
        format!("{name}: twin samples")
    })?;
    // support certificates against a scan of the baked slices
    let eta = out.theta.bake_slice(&gamma, &Rational::one()).unwrap();
    let beta = scanned_step(eta.values(), alpha);
    ensure(rep.beta == Some(beta), || {
        format!("{name}: endpoint step {:?}, scan gives {beta}", rep.beta)
    })?;
    let mut all = gamma.values().to_vec();
    for k in 0..plan.t_grid {
        let t = Rational::from_count(k) / Rational::from_count(plan.t_grid - 1);
        all.extend(
            out.theta
                .bake_slice(&gamma, &t)
                .unwrap()
                .values()
                .iter()
                .cloned(),
        );
    }
    let f = scanned_step(&all, alpha);
    ensure(f <= dim, || format!("{name}: homotopy leaves every step"))?;
    Ok(format!(
        "{name}: alpha {alpha}, beta {beta}, homotopy in step {f}"
    ))
}

fn theta() -> Outcome {
    let p = ExactPoint::from_i64;
    let triangle = ExactComplex::new(
        vec![p(&[0, 0]), p(&[1, 0]), p(&[0, 1])],
        vec![vec![0, 1, 2]],
    )
    .unwrap();
    let a = theta_case(
        "triangle",
        triangle,
        vec![
            p(&[1, 0, 0, 1, 0, 0]),
            p(&[1, 1, 1, 0, 0, 0]),
            p(&[2, -1, 0, 0, 1, 0]),
        ],
        6,
    )?;
    let square = ExactComplex::new(
        vec![p(&[0, 0]), p(&[1, 0]), p(&[1, 1]), p(&[0, 1])],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
    )
    .unwrap();
    let b = theta_case(
        "square",
        square,
        vec![
            p(&[1, 0, 0, 0, 0, 1, 0, 0]),
            p(&[0, 1, 1, 0, 0, 0, 0, 0]),
            p(&[-1, 0, 0, 1, 0, 0, 0, 0]),
            p(&[0, -1, 0, 0, 1, 0, 0, 0]),
        ],
        8,
    )?;
    Ok(format!("{a}; {b}"))
}

fn pi1() -> Outcome {
    let m = punctured_model::<Rational>(8).unwrap();
    let probes = default_probes::<Rational>(8, (0, 1), &q(1, 4)).unwrap();
    let steps = default_step_loops::<Rational>(8, (0, 1), 16).unwrap();
    let r = pi1_directlimit_experiment(&m, &probes, &steps, &Pi1Config::default())
        .map_err(|e| e.to_string())?;
    for (p, rep) in probes.iter().zip(&r.surjectivity) {
        ensure(angle_winding(p) == rep.winding_before, || {
            format!("probe {}: winding oracle", rep.index)
        })?;
    }
    let w3 = r
        .surjectivity
        .iter()
        .find(|p| p.winding_before == 3)
        .ok_or("no winding-3 probe")?;
    ensure(w3.support.len() == 8, || {
        "winding-3 probe does not use all coordinates".into()
    })?;
    ensure(w3.winding_after == 3 && w3.certified, || {
        format!("winding-3 probe: {w3:?}")
    })?;
    ensure(!r.injectivity.is_empty(), || "no injectivity leg".into())?;
    ensure(r.holds(), || {
        format!("report fails: {}", serde_json::to_string(&r).unwrap())
    })?;
    Ok(format!(
        "winding 3 kept in step {}; {} injectivity legs; targets {:?}",
        w3.beta,
        r.injectivity.len(),
        r.colimit.targets
    ))
}

fn palais() -> Outcome {
    let cfg = Pi1Config::default();
    let m = two_ball_model::<Rational>().unwrap();
    let input = two_ball_input(&mut ChaCha8Rng::seed_from_u64(7), 30).unwrap();
    let a = palais_experiment(&m, &input, 500, &cfg).map_err(|e| e.to_string())?;
    ensure(a.holds(), || {
        format!("two balls: {}", serde_json::to_string(&a).unwrap())
    })?;
    let m = punctured_slab_model::<Rational>().unwrap();
    let input = punctured_slab_input(&mut ChaCha8Rng::seed_from_u64(11), 24).unwrap();
    let b = palais_experiment(&m, &input, 500, &cfg).map_err(|e| e.to_string())?;
    ensure(b.holds(), || {
        format!("punctured slab: {}", serde_json::to_string(&b).unwrap())
    })?;
    Ok(format!(
        "two balls: {} classes; punctured slab: {} classes",
        a.pi0.colimit_classes, b.pi0.colimit_classes
    ))
}

fn pi0() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    for i in 0..20 {
        let m = random_component_model::<Rational>(&mut r).unwrap();
        let rep = pi0_report(&m).map_err(|e| e.to_string())?;
        let (equal, size) = pi0_union_oracle(&m);
        ensure(equal, || {
            format!("model {i}: oracle finds the union differs")
        })?;
        ensure(rep.holds() && rep.basepoint_union_equal, || {
            format!("model {i}: {:?}", rep.violations)
        })?;
        ensure(rep.basepoint_ambient_points == size, || {
            format!("model {i}: component size")
        })?;
    }
    Ok("20 models".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 filling", 10, filling),
        ("2 subdivision", 30, subdivision),
        ("3 convexity", 60, convexity),
        ("4 colimit", 30, colimits),
        ("5 theta properties", 300, theta),
        ("6 pi1 direct limit", 600, pi1),
        ("7 palais", 600, palais),
        ("8 pi0 components", 10, pi0),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let out = out.and_then(|d| {
            ensure(took <= Duration::from_secs(limit), || {
                format!("over the {limit} s limit ({d})")
            })?;
            Ok(d)
        });
        match out {
            Ok(d) => println!(
                "PASS {name} ({:.1} s, limit {limit} s): {d}",
                took.as_secs_f64()
            ),
            Err(e) => {
                failed += 1;
                println!(
                    "FAIL {name} ({:.1} s, limit {limit} s): {e}",
                    took.as_secs_f64()
                );
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
