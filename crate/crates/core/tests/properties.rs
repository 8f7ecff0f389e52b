mod common;

use std::collections::BTreeSet;

use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wellfilled::convexity::{
    conv2_with_hull_contains, conv_n_contains, hull_contains, split_certificate, FinitePointSet,
};
use wellfilled::direct_limits::{
    factorization_failure, set_colimit, universal_map, Cone, DirectSystemOfSets, SetSystemFile,
};
use wellfilled::filling::{cone_decomposition, Filling};
use wellfilled::filtered::{CompactSample, FilteredSpaceModel, Filtration, WellFilledChart};
use wellfilled::invariants::{
    circle_loop, perturb_loop, pi0_report, random_component_model, winding_number,
};
use wellfilled::region::Region;
use wellfilled::{ExactComplex, ExactPoint, ExactSimplex, MapEval, PLMap, Rational, Scalar};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// geometry

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn barycentric_coordinates_reconstruct_combinations(seed in any::<u64>(), rank in 1usize..=5) {
        let mut r = rng(seed);
        let s = random_simplex(&mut r, rank, 6);
        let w = random_weights(&mut r, rank);
        let x = combination(s.vertices(), &w);
        let got = s.barycentric_coordinates(&x).unwrap().inside().unwrap();
        prop_assert_eq!(got, w);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn diameter_ignores_order_and_translation(seed in any::<u64>(), rank in 1usize..=5) {
        let mut r = rng(seed);
        let s = random_simplex(&mut r, rank, 6);
        let mut vs = s.vertices().to_vec();
        vs.reverse();
        vs.rotate_left(rank / 2);
        let g = random_point(&mut r, 6, 8, 3);
        let moved: Vec<ExactPoint> = vs.iter().map(|v| v.clone() + g.clone()).collect();
        let d = s.diameter_sq();
        prop_assert_eq!(&d, &diameter_sq(s.vertices()));
        prop_assert_eq!(&ExactSimplex::new(vs).unwrap().diameter_sq(), &d);
        prop_assert_eq!(&ExactSimplex::new(moved).unwrap().diameter_sq(), &d);
    }
}

// simplicial

fn face_closed(c: &ExactComplex) -> bool {
    let all: BTreeSet<Vec<usize>> = c
        .simplices()
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort();
            s
        })
        .collect();
    all.iter().all(|s| {
        (0..s.len()).all(|i| {
            let mut f = s.clone();
            f.remove(i);
            f.is_empty() || all.contains(&f)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn subdivision_contracts_diameters(seed in any::<u64>(), rank in 2usize..=5) {
        let mut r = rng(seed);
        let s = random_simplex(&mut r, rank, 5);
        let b = ExactComplex::from_simplex(&s).barycentric_subdivide();
        let k = Rational::from_count(rank);
        let lhs = b.max_diameter_sq() * k.clone() * k.clone();
        let rhs = diameter_sq(s.vertices()) * (k.clone() - Rational::one()) * (k - Rational::one());
        prop_assert!(lhs <= rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn subdivision_refines_every_face(seed in any::<u64>(), rank in 2usize..=4) {
        let mut r = rng(seed);
        let s = random_simplex(&mut r, rank, 4);
        let c = ExactComplex::from_simplex(&s);
        let b = c.barycentric_subdivide();
        prop_assert!(face_closed(&b));
        b.validate_geometry().unwrap();
        for f in 0..c.len() {
            let face = c.simplex(f);
            if face.rank() < 2 {
                continue;
            }
            let inside: Vec<ExactSimplex> = b
                .simplices_of_rank(face.rank())
                .map(|i| b.simplex(i))
                .filter(|t| t.vertices().iter().all(|v| in_simplex(face.vertices(), v)))
                .collect();
            let total = inside.iter().fold(Rational::zero(), |a, t| a + relative_volume(face.vertices(), t.vertices()));
            prop_assert_eq!(total, Rational::one());
        }
        for t in b.maximal_simplices() {
            prop_assert!(b.simplex(t).vertices().iter().all(|v| in_simplex(s.vertices(), v)));
        }
    }

    #[test]
    fn subdivision_keeps_the_carrier(seed in any::<u64>(), rank in 2usize..=4) {
        let mut r = rng(seed);
        let s = random_simplex(&mut r, rank, 4);
        let b = ExactComplex::from_simplex(&s).barycentric_subdivide();
        let tops = b.maximal_simplices();
        for _ in 0..25 {
            let x = combination(s.vertices(), &random_weights(&mut r, rank));
            prop_assert!(tops.iter().any(|&t| in_simplex(b.simplex(t).vertices(), &x)));
            let t = b.simplex(tops[r.random_range(0..tops.len())]);
            let y = combination(t.vertices(), &random_weights(&mut r, rank));
            prop_assert!(in_simplex(s.vertices(), &y));
        }
    }

    #[test]
    fn prisms_are_valid_and_fill_the_volume(seed in any::<u64>(), rank in 2usize..=3, layers in 1usize..=3) {
        let mut r = rng(seed);
        let s = random_simplex(&mut r, rank, rank - 1);
        let c = ExactComplex::from_simplex(&s);
        let p = c.triangulate_prism_layers(layers);
        prop_assert!(face_closed(&p.complex));
        p.complex.validate_geometry().unwrap();
        // volume of |s| x [0,1] relative to the unit-height lift of s
        let mut lift = s.vertices().iter().map(|v| {
            let mut c = v.coords().to_vec();
            c.push(Rational::zero());
            ExactPoint::new(c)
        }).collect::<Vec<_>>();
        let mut top = s.vertices()[0].coords().to_vec();
        top.push(Rational::one());
        lift.push(ExactPoint::new(top));
        let total = p.complex.simplices_of_rank(rank + 1)
            .map(|i| relative_volume(&lift, p.complex.simplex(i).vertices()))
            .fold(Rational::zero(), |a, b| a + b);
        // the prism has (rank) times the volume of the cone over s
        prop_assert_eq!(total, Rational::from_count(rank));
    }
}

// convexity

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn successor_membership_matches_conv_n(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let pts = point_set_3d(&mut r);
        let set = FinitePointSet::new(pts.clone()).unwrap();
        for _ in 0..100 {
            let p = hull_probe(&mut r, &pts);
            let direct = conv_n_contains(&set, n + 1, &p).unwrap();
            let split = conv2_with_hull_contains(&set, n, &p).unwrap();
            prop_assert_eq!(direct.is_some(), split.is_some(), "probe {}", p);
            if let Some(c) = &direct {
                prop_assert!(c.verify(&p));
                prop_assert!(split_certificate(c).verify(&p, n.max(c.points.len().saturating_sub(1)).max(1)));
            }
            if let Some(c) = &split {
                prop_assert!(c.verify(&p, n));
            }
        }
    }

    #[test]
    fn conv_n_is_monotone_and_saturates(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pts = point_set_3d(&mut r);
        let set = FinitePointSet::new(pts.clone()).unwrap();
        for _ in 0..100 {
            let p = hull_probe(&mut r, &pts);
            for n in 1..4 {
                if conv_n_contains(&set, n, &p).unwrap().is_some() {
                    prop_assert!(conv_n_contains(&set, n + 1, &p).unwrap().is_some());
                }
            }
            let oracle = hull_oracle_3d(&pts, &p);
            prop_assert_eq!(conv_n_contains(&set, pts.len() * 4, &p).unwrap().is_some(), oracle);
            prop_assert_eq!(hull_contains(&set, &p).unwrap(), oracle);
        }
    }
}

// filling

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn filling_agrees_on_the_boundary(seed in any::<u64>(), rank in 2usize..=4) {
        let mut r = rng(seed);
        let s = random_simplex(&mut r, rank, 6);
        let g = random_boundary_map(&mut r, &s, 3);
        let f = Filling::new(s.clone(), &g).unwrap();
        for _ in 0..200 {
            let drop = r.random_range(0..rank);
            let face: Vec<ExactPoint> = (0..rank).filter(|&i| i != drop).map(|i| s.vertices()[i].clone()).collect();
            let x = combination(&face, &random_weights(&mut r, rank - 1));
            prop_assert_eq!(f.eval(&x).unwrap(), g.eval(&x).unwrap());
        }
    }

    #[test]
    fn filling_matches_definition_with_certificates(seed in any::<u64>(), rank in 2usize..=4) {
        let mut r = rng(seed);
        let s = random_simplex(&mut r, rank, 6);
        let g = random_boundary_map(&mut r, &s, 3);
        let f = Filling::new(s.clone(), &g).unwrap();
        for _ in 0..20 {
            let x = combination(s.vertices(), &random_weights(&mut r, rank));
            let c = f.eval_certified(&x).unwrap();
            prop_assert!(c.verify());
            prop_assert!(c.t >= Rational::zero() && c.t <= Rational::one());
            if let Some(y) = &c.y {
                prop_assert!(barycentric(s.vertices(), y).unwrap().iter().any(Zero::is_zero));
            }
            prop_assert_eq!(c.value, filled_value(&s, &g, &x));
        }
    }

    #[test]
    fn filling_is_linear_and_keeps_constants(seed in any::<u64>(), rank in 2usize..=4) {
        let mut r = rng(seed);
        let s = random_simplex(&mut r, rank, 6);
        let g1 = random_boundary_map(&mut r, &s, 3);
        let g2 = random_boundary_map(&mut r, &s, 3);
        let (a, b) = (rand_q(&mut r, 2, 3), rand_q(&mut r, 2, 3));
        let sum = PLMap::lincomb(&[(a.clone(), &g1), (b.clone(), &g2)]).unwrap();
        let c = random_point(&mut r, 3, 3, 3);
        let constant = PLMap::new(g1.domain().clone(), vec![c.clone(); g1.values().len()]).unwrap();
        let (f1, f2, fs, fc) = (
            Filling::new(s.clone(), &g1).unwrap(),
            Filling::new(s.clone(), &g2).unwrap(),
            Filling::new(s.clone(), &sum).unwrap(),
            Filling::new(s.clone(), &constant).unwrap(),
        );
        for _ in 0..20 {
            let x = combination(s.vertices(), &random_weights(&mut r, rank));
            let expect = f1.eval(&x).unwrap().scale(&a) + f2.eval(&x).unwrap().scale(&b);
            prop_assert_eq!(fs.eval(&x).unwrap(), expect);
            prop_assert_eq!(fc.eval(&x).unwrap(), c.clone());
        }
    }

    #[test]
    fn filling_is_well_defined_at_ties(seed in any::<u64>(), rank in 3usize..=4) {
        let mut r = rng(seed);
        let s = random_simplex(&mut r, rank, 6);
        let g = random_boundary_map(&mut r, &s, 3);
        let f = Filling::new(s.clone(), &g).unwrap();
        // two equal minimal coordinates
        let mut w = random_weights(&mut r, rank);
        let m = w.iter().cloned().fold(Rational::one(), |a, b| if b < a { b } else { a });
        let i = w.iter().position(|v| *v == m).unwrap();
        let j = (i + 1) % rank;
        let excess = w[j].clone() - &m;
        w[j] = m.clone();
        w[(j + 1) % rank] += excess;
        let x = combination(s.vertices(), &w);
        let dec = cone_decomposition(&s, &x).unwrap();
        let sets = dec.admissible_index_sets();
        prop_assert!(sets.len() >= 2);
        let values: Vec<ExactPoint> = sets.iter().map(|js| f.eval_with_index_set(&dec, js).unwrap().value).collect();
        prop_assert!(values.windows(2).all(|p| p[0] == p[1]));
    }
}

// filtered spaces

fn chain_model(dim: usize) -> FilteredSpaceModel<Rational> {
    FilteredSpaceModel::new(
        Filtration::coordinate_chain(dim),
        Region::FullSpace,
        q(1, 4),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn chart_surgery_outputs_validate(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = FilteredSpaceModel::new(
            Filtration::coordinate_chain(3),
            Region::open_ball(ExactPoint::from_i64(&[0, 0, 0]), q(4, 1)),
            q(1, 4),
        ).unwrap();
        let base = WellFilledChart {
            translation: ExactPoint::from_i64(&[0, 0, 0]),
            image: Region::open_ball(ExactPoint::from_i64(&[0, 0, 0]), q(4, 1)),
            core: None,
            quarter: None,
            alpha0: 1,
        };
        let qp = random_point(&mut r, 3, 1, 4);
        let w = Region::open_ball(random_point(&mut r, 3, 1, 8) + qp.clone(), q(r.random_range(2..=8), 4));
        prop_assume!(w.contains(&qp));
        let max = q(1, 1);
        let shrunk = base.shrink(&qp, &w, &max).unwrap();
        prop_assert!(shrunk.validate(&model, &mut r).unwrap().well_filled);
        let quartered = base.clone().with_quarter(&qp, &max).unwrap();
        prop_assert!(quartered.validate(&model, &mut r).unwrap().well_filled);
        let g = ExactPoint::new(vec![rand_q(&mut r, 1, 4), Rational::zero(), Rational::zero()]);
        // translation invariance needs a translation-invariant carrier
        let flat = chain_model(3);
        let moved = base.translate(&g, &flat).unwrap();
        prop_assert!(moved.validate(&flat, &mut r).unwrap().well_filled);
    }

    #[test]
    fn absorption_of_unions_is_the_max(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = chain_model(6);
        let sample = |r: &mut ChaCha8Rng| {
            let top = r.random_range(1..=6);
            let pts: Vec<ExactPoint> = (0..r.random_range(1..=5))
                .map(|_| {
                    let mut p = random_point(r, 6, 2, 4);
                    for k in top..6 {
                        p[k] = Rational::zero();
                    }
                    p
                })
                .collect();
            pts
        };
        let (a, b) = (sample(&mut r), sample(&mut r));
        let absorb = |pts: &[ExactPoint]| model.check_compact_retractivity(&CompactSample::new(pts.to_vec(), true).unwrap()).unwrap();
        let both: Vec<ExactPoint> = a.iter().chain(&b).cloned().collect();
        prop_assert_eq!(absorb(&both), absorb(&a).max(absorb(&b)));
    }
}

// direct limits

fn system_from(rs: &RandomSystem) -> Option<DirectSystemOfSets> {
    DirectSystemOfSets::new(rs.labels(), rs.elements(), rs.edges.clone()).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn colimit_matches_brute_force_closure(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (rs, sys) = loop {
            let rs = RandomSystem::generate(&mut r, 5, 6, 2);
            if let Some(sys) = system_from(&rs) {
                break (rs, sys);
            }
        };
        let c = set_colimit(&sys);
        let rel = rs.brute_force_relation();
        let flat: Vec<usize> = c.class_of.iter().flatten().copied().collect();
        for u in 0..flat.len() {
            for v in 0..flat.len() {
                prop_assert_eq!(rel[u][v], flat[u] == flat[v]);
            }
        }
        prop_assert!(c.witnesses.iter().all(|w| w.verify(&sys)));
        let text = serde_json::to_string(&sys.to_file()).unwrap();
        let back = DirectSystemOfSets::from_file(&serde_json::from_str::<SetSystemFile>(&text).unwrap()).unwrap();
        back.check_functoriality().unwrap();
        prop_assert_eq!(back, sys);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn universal_map_is_unique(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = loop {
            if let Some(sys) = system_from(&RandomSystem::generate(&mut r, 5, 6, 2)) {
                break sys;
            }
        };
        let c = set_colimit(&sys);
        let targets = r.random_range(1..=4);
        let g: Vec<usize> = (0..c.classes.len()).map(|_| r.random_range(0..targets)).collect();
        let cone = Cone {
            target: (0..targets).map(|t| format!("t{t}")).collect(),
            maps: c.class_of.iter().map(|row| row.iter().map(|&k| g[k]).collect()).collect(),
        };
        let report = universal_map(&sys, &c, &cone).unwrap();
        prop_assert_eq!(&report.psi, &g);
        prop_assert!(factorization_failure(&c, &cone, &g).is_none());
        for k in 0..g.len() {
            for other in 0..targets {
                if other != g[k] {
                    let mut bad = g.clone();
                    bad[k] = other;
                    prop_assert!(factorization_failure(&c, &cone, &bad).is_some());
                }
            }
        }
    }
}

// invariants

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn winding_matches_turning_angle(seed in any::<u64>(), w in -3i64..=3, n in 4usize..=12) {
        let mut r = rng(seed);
        let n = n * 4 * w.unsigned_abs().max(1) as usize;
        let base = circle_loop::<Rational>(4, (0, 1), 1.0 + r.random::<f64>(), w, n).unwrap();
        let l = perturb_loop(&base, &[0, 1, 2, 3], &q(1, 16));
        prop_assert_eq!(winding_number(&l).unwrap(), w);
        prop_assert_eq!(angle_winding(&l), w);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn basepoint_component_is_the_union_of_steps(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_component_model::<Rational>(&mut r).unwrap();
        let report = pi0_report(&m).unwrap();
        prop_assert!(report.holds());
        prop_assert!(report.basepoint_union_equal);
        prop_assert_eq!(pi0_union_oracle(&m), (true, report.basepoint_ambient_points));
        prop_assert_eq!(pi0_report(&m).unwrap(), report);
    }
}

#[test]
fn rank_one_theta_is_evaluation() {
    use wellfilled::approximation::{simultaneous_approximation, EngineConfig, NeighborhoodSpec};
    use wellfilled::SubcomplexCarrier;
    let mut r = rng(11);
    for _ in 0..20 {
        let n = r.random_range(1..=5);
        let pts: Vec<ExactPoint> = (0..n)
            .map(|k| ExactPoint::new(vec![Rational::from_count(k)]))
            .collect();
        let sigma = ExactComplex::new(pts, (0..n).map(|k| vec![k]).collect()).unwrap();
        let values: Vec<ExactPoint> = (0..n).map(|_| random_point(&mut r, 3, 3, 7)).collect();
        let gamma = PLMap::new(sigma.clone(), values).unwrap();
        let model = chain_model(3);
        let qn = NeighborhoodSpec::whole(&sigma, Region::FullSpace);
        let out = simultaneous_approximation(
            &sigma,
            &gamma,
            &qn,
            &SubcomplexCarrier::empty(),
            &model,
            &EngineConfig::default(),
        )
        .unwrap();
        for x in sigma.vertices() {
            for k in 0..=4 {
                assert_eq!(
                    out.theta.evaluate(&gamma, x, &q(k, 4)).unwrap(),
                    gamma.eval(x).unwrap()
                );
            }
        }
    }
}
