use std::time::Instant;

use wellfilled::filtered::FilteredSpaceModel;
use wellfilled::invariants::{
    circle_loop, default_probes, default_step_loops, injectivity_leg, pi1_directlimit_experiment,
    punctured_model, surjectivity_leg, winding_number, Pi1Config,
};
use wellfilled::{Rational, Scalar};

fn punctured(dim: usize) -> FilteredSpaceModel<Rational> {
    punctured_model(dim).unwrap()
}

#[test]
fn planar_probe_is_its_own_endpoint() {
    let m = punctured(3);
    let probe = circle_loop::<Rational>(3, (0, 1), 1.0, 1, 8).unwrap();
    let (rec, eta) = surjectivity_leg(&m, &probe, &Pi1Config::default()).unwrap();
    assert!(rec.pushed.is_empty());
    assert_eq!(rec.beta, 2);
    assert!(rec.certified());
    assert_eq!(winding_number(&eta).unwrap(), 1);
    assert_eq!(eta, probe);
}

#[test]
fn winding_three_probe_lands_in_the_plane() {
    let m = punctured(8);
    let probes = default_probes::<Rational>(8, (0, 1), &Rational::from_ratio(1, 4)).unwrap();
    let start = Instant::now();
    let (rec, eta) = surjectivity_leg(&m, &probes[1], &Pi1Config::default()).unwrap();
    eprintln!("surjectivity leg: {:?}", start.elapsed());
    assert_eq!(probes[1].support().len(), 8);
    assert_eq!(winding_number(&probes[1]).unwrap(), 3);
    assert_eq!(rec.beta, 2);
    assert!(rec.certified());
    assert_eq!(winding_number(&eta).unwrap(), 3);
}

#[test]
fn equal_winding_step_loops_are_joined_in_a_step() {
    let m = punctured(4);
    let loops = default_step_loops::<Rational>(4, (0, 1), 16).unwrap();
    let start = Instant::now();
    let r = injectivity_leg(&m, (0, &loops[0]), (1, &loops[1]), &Pi1Config::default());
    eprintln!("injectivity leg: {:?} {r:?}", start.elapsed());
    assert!(r.holds(), "{r:?}");
    assert_eq!(r.beta, Some(2));
    assert!(r.oracle_support.contains(&3));
}

#[test]
fn experiment_compares_step_classes_with_windings() {
    let m = punctured(4);
    let probes = vec![
        circle_loop::<Rational>(4, (0, 1), 1.0, 1, 8).unwrap(),
        circle_loop(4, (0, 1), 1.0, -1, 8).unwrap(),
    ];
    let steps = default_step_loops::<Rational>(4, (0, 1), 16).unwrap();
    let r = pi1_directlimit_experiment(&m, &probes, &steps[..1], &Pi1Config::default()).unwrap();
    assert!(r.holds(), "{r:?}");
    assert_eq!(r.colimit.targets, vec![-1, 1]);
    assert_eq!(r.colimit.colimit_classes, 2);
    assert_eq!(r.injectivity.len(), 1);
}
