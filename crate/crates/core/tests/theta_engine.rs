use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wellfilled::approximation::{simultaneous_approximation, EngineConfig, NeighborhoodSpec};
use wellfilled::filtered::{FilteredSpaceModel, Filtration};
use wellfilled::region::Region;
use wellfilled::{
    ExactComplex, ExactPoint, MapEval, PLMap, Rational, Scalar, Simplex, SubcomplexCarrier,
};

type P = ExactPoint;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn square_boundary() -> ExactComplex {
    let v = vec![
        P::from_i64(&[0, 0]),
        P::from_i64(&[1, 0]),
        P::from_i64(&[1, 1]),
        P::from_i64(&[0, 1]),
    ];
    ExactComplex::new(v, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).unwrap()
}

fn punctured_model(dim: usize) -> FilteredSpaceModel<Rational> {
    let f = Filtration::coordinate_chain_from(2, dim).unwrap();
    FilteredSpaceModel::new(f, Region::CoordinatePlaneComplement { i: 0, j: 1 }, q(1, 4)).unwrap()
}

fn lift(xy: (i64, i64), rest: &[i64], dim: usize) -> P {
    let mut c = vec![xy.0, xy.1];
    c.extend_from_slice(rest);
    c.resize(dim, 0);
    P::from_i64(&c)
}

#[test]
fn loop_in_punctured_space_is_fixed_on_anchors() {
    let dim = 5;
    let sigma = square_boundary();
    let images: Vec<P> = sigma
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let xy = [(1, 0), (0, 1), (-1, 0), (0, -1)][i];
            lift(xy, &[0, 0, (i as i64) - 1], dim)
        })
        .collect();
    let gamma0 = PLMap::new(sigma.clone(), images).unwrap();
    let model = punctured_model(dim);
    let qn = NeighborhoodSpec::whole(&sigma, model.carrier.clone());
    let out = simultaneous_approximation(
        &sigma,
        &gamma0,
        &qn,
        &SubcomplexCarrier::empty(),
        &model,
        &EngineConfig::default(),
    )
    .unwrap();
    let theta = &out.theta;
    assert!(!out.anchors.is_empty());
    for s in &out.anchors {
        for k in 0..=8 {
            let t = q(k, 8);
            assert_eq!(
                theta.evaluate(&gamma0, s, &t).unwrap(),
                gamma0.eval(s).unwrap()
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let eta = theta.bake_slice(&gamma0, &q(1, 1)).unwrap();
    for e in 0..sigma.len() {
        let x = sigma.simplex(e).random_point(&mut rng);
        assert_eq!(
            theta.evaluate(&gamma0, &x, &q(0, 1)).unwrap(),
            gamma0.eval(&x).unwrap()
        );
        assert_eq!(
            eta.eval(&x).unwrap(),
            theta.evaluate(&gamma0, &x, &q(1, 1)).unwrap()
        );
        let mid = theta.bake_slice(&gamma0, &q(3, 4)).unwrap();
        assert_eq!(
            mid.eval(&x).unwrap(),
            theta.evaluate(&gamma0, &x, &q(3, 4)).unwrap()
        );
    }
    assert!(out.neighborhood.check_pl(&gamma0).unwrap().holds);
    let r = out.neighborhood.check_pl(&eta).unwrap();
    for c in r.checks.iter().filter(|c| !c.holds || !c.exact) {
        eprintln!("{:?} {:?}", c, out.neighborhood.constraints[c.index]);
    }
    assert!(r.holds && r.exact);
    assert!(qn.check_pl(&eta).unwrap().holds);
}

#[test]
fn constant_map_on_triangle_is_constant() {
    let tri = Simplex::new(vec![
        P::from_i64(&[0, 0]),
        P::from_i64(&[1, 0]),
        P::from_i64(&[0, 1]),
    ])
    .unwrap();
    let sigma = ExactComplex::from_simplex(&tri);
    let c = lift((1, 1), &[2], 3);
    let gamma0 = PLMap::new(sigma.clone(), vec![c.clone(); 3]).unwrap();
    let model = punctured_model(3);
    let qn = NeighborhoodSpec::whole(&sigma, model.carrier.clone());
    let out = simultaneous_approximation(
        &sigma,
        &gamma0,
        &qn,
        &SubcomplexCarrier::empty(),
        &model,
        &EngineConfig::default(),
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..=4 {
        let x = tri.random_point(&mut rng);
        assert_eq!(out.theta.evaluate(&gamma0, &x, &q(k, 4)).unwrap(), c);
    }
    let eta = out.theta.bake_slice(&gamma0, &q(1, 1)).unwrap();
    assert!(eta.values().iter().all(|v| *v == c));
}

#[test]
fn affine_triangle_relative_to_an_edge() {
    let tri = Simplex::new(vec![
        P::from_i64(&[0, 0]),
        P::from_i64(&[1, 0]),
        P::from_i64(&[0, 1]),
    ])
    .unwrap();
    let sigma = ExactComplex::from_simplex(&tri);
    let images = vec![
        lift((1, 0), &[0, 1], 4),
        lift((2, 1), &[1, 0], 4),
        lift((1, 2), &[0, 0], 4),
    ];
    let gamma0 = PLMap::new(sigma.clone(), images).unwrap();
    let model = punctured_model(4);
    let e = sigma.simplices().iter().position(|s| s.len() == 2).unwrap();
    let rel = SubcomplexCarrier::from_simplices(&sigma, &[e]).unwrap();
    let qn = NeighborhoodSpec::whole(&sigma, model.carrier.clone());
    let out =
        simultaneous_approximation(&sigma, &gamma0, &qn, &rel, &model, &EngineConfig::default())
            .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let es = sigma.simplex(e);
    for k in 0..=4 {
        let x = es.random_point(&mut rng);
        assert_eq!(
            out.theta.evaluate(&gamma0, &x, &q(k, 4)).unwrap(),
            gamma0.eval(&x).unwrap()
        );
    }
    let eta = out.theta.bake_slice(&gamma0, &q(1, 1)).unwrap();
    let r = out.neighborhood.check_pl(&eta).unwrap();
    assert!(r.holds);
    for l in out.theta.levels() {
        assert!(l.rank == 1 || l.mesh > 0.0);
    }
}

#[test]
fn property_report_on_square_loop() {
    use wellfilled::approximation::{verify_theta_properties, SamplingPlan};
    let dim = 4;
    let sigma = square_boundary();
    let images: Vec<P> = (0..4)
        .map(|i| {
            lift(
                [(1, 0), (0, 1), (-1, 0), (0, -1)][i],
                &[0, (i as i64) % 2],
                dim,
            )
        })
        .collect();
    let gamma0 = PLMap::new(sigma.clone(), images).unwrap();
    let model = punctured_model(dim);
    let qn = NeighborhoodSpec::whole(&sigma, model.carrier.clone());
    let out = simultaneous_approximation(
        &sigma,
        &gamma0,
        &qn,
        &SubcomplexCarrier::empty(),
        &model,
        &EngineConfig::default(),
    )
    .unwrap();
    let plan = SamplingPlan {
        t_grid: 9,
        points: 40,
        twin_samples: 40,
        ..SamplingPlan::default()
    };
    let r = verify_theta_properties(&out, &gamma0, &qn, &model, 2, &plan).unwrap();
    for c in &r.checks {
        assert!(c.holds, "{c:?}");
    }
    assert_eq!(r.beta, Some(4));
    assert!(r.get('c').unwrap().samples == 40);
}
