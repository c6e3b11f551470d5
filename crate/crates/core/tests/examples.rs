//! Worked examples, checked through the public API against hand counts.

use gridjunta::constructions::{
    cuboid, cuboid_sharpness, decision_tree_function, dictator_tuple_map, identity_map, parity_set, random_set,
    tribes_grid, TribesSpec,
};
use gridjunta::encode::{choose_embedding_side, lift_to_cube, phi_decode, phi_encode, tilde_fibre_boundary};
use gridjunta::extract::{boundary_cost, grid_junta_extract, iso_lower_diag, refined_cost, torus_junta_extract, Method};
use gridjunta::hfunc::{claim42_details, h_eval, interval_decompose, Interval};
use gridjunta::io::encode_table;
use gridjunta::lipschitz::{
    analyze_grid_map, analyze_torus_map, displacement_sum, lipschitz_constant, select_good_coordinates, TorusMap,
};
use gridjunta::numeric::{q, Q};
use gridjunta::{
    best_junta_search, bollobas_leader_bound, cyclic_distance, edge_boundary, fibre_stats, cube_junta_extract,
    l1_distance, plurality_junta, Budget, CubeFunction, GridFunction, GridShape, HVariant, Metric, Mode,
};
use num_rational::BigRational;

fn strip() -> GridFunction {
    // [2] x [4] inside [4]^2
    GridFunction::indicator(4, 2, |x| x[0] < 2).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

#[test]
fn boundaries_of_a_strip() {
    let a = strip();
    assert_eq!(edge_boundary(&a, Mode::Grid, None).unwrap(), 4);
    assert_eq!(edge_boundary(&a, Mode::Torus, None).unwrap(), 8);
    let empty = GridFunction::indicator(4, 2, |_| false).unwrap();
    assert_eq!(edge_boundary(&empty, Mode::Grid, None).unwrap(), 0);
    assert_eq!(edge_boundary(&empty.complement().unwrap(), Mode::Torus, None).unwrap(), 0);
}

#[test]
fn isoperimetric_minimum() {
    let b = bollobas_leader_bound(8, 4, 2).unwrap();
    assert!(close(b.value, 4.0));
    assert_eq!(b.argmin_r, 1);
    assert!(close(bollobas_leader_bound(32, 4, 3).unwrap().value, 16.0));
    assert!(close(bollobas_leader_bound(0, 4, 3).unwrap().value, 0.0));
}

#[test]
fn distances() {
    assert_eq!(cyclic_distance(0, 5, 6).unwrap(), 1);
    assert_eq!(cyclic_distance(3, 3, 6).unwrap(), 0);
    assert_eq!(cyclic_distance(1, 4, 6).unwrap(), 3);
    let shape = GridShape::new(3, 2, 5).unwrap();
    let zero = GridFunction::constant(shape.clone(), 0).unwrap();
    let top = GridFunction::constant(shape, 4).unwrap();
    assert_eq!(l1_distance(&zero, &top, Metric::Cyclic).unwrap().value(), 1.0);
}

#[test]
fn fibre_statistics() {
    let f = GridFunction::indicator(4, 1, |x| x[0] == 0 || x[0] == 2).unwrap();
    let s = fibre_stats(&f, 0, &[]).unwrap();
    assert_eq!((s.ell, s.m), (2, 3));
    assert!(close(s.var, 0.25));
    assert!(close(s.h[HVariant::HStar.position()], 0.25 * 12f64.log2()));
}

#[test]
fn cube_influences() {
    let and = CubeFunction::new(2, |i| i == 3).unwrap();
    assert_eq!(and.influence(0).unwrap(), q(1, 2));
    assert_eq!(and.total_influence(), q(1, 1));
    let parity = CubeFunction::new(4, |i| i.count_ones() % 2 == 1).unwrap();
    assert_eq!(parity.total_influence(), q(4, 1));
    let dictator = CubeFunction::new(3, |i| i & 1 == 1).unwrap();
    let (j, _) = cube_junta_extract(&dictator, 0.1).unwrap();
    assert_eq!(j.coords(), &[0]);
}

#[test]
fn plurality_and_search() {
    let parity = parity_set(2, 3).unwrap();
    let g = plurality_junta(&parity, &[0, 1]).unwrap();
    assert_eq!(l1_distance(&parity, &g.to_grid_function().unwrap(), Metric::Absolute).unwrap().value(), 0.5);
    let search = best_junta_search(&parity, 2, 0.25, 1 << 20).unwrap();
    assert!(search.found.is_none());
    let dictator = GridFunction::indicator(2, 3, |x| x[0] == 1).unwrap();
    let g = plurality_junta(&dictator, &[1]).unwrap();
    assert!(g.table().iter().all(|&v| v == 0));
}

#[test]
fn binary_encoding() {
    assert_eq!(phi_encode(1, 4).unwrap(), vec![0, 0]);
    assert_eq!(phi_encode(2, 4).unwrap(), vec![1, 0]);
    assert_eq!(phi_encode(3, 4).unwrap(), vec![0, 1]);
    assert_eq!(phi_encode(4, 4).unwrap(), vec![1, 1]);
    assert_eq!(phi_decode(&[1, 1, 1]).unwrap(), 8);

    // 1_{1,2} on [4] lifts to the indicator of a zero high bit
    let f = GridFunction::indicator(4, 1, |x| x[0] < 2).unwrap();
    let cube = lift_to_cube(&f).unwrap();
    assert_eq!(cube.influence(0).unwrap(), q(0, 1));
    assert_eq!(cube.influence(1).unwrap(), q(1, 1));

    assert_eq!(tilde_fibre_boundary(&[1, 1, 0, 0]).unwrap(), 2);
    assert_eq!(tilde_fibre_boundary(&[1, 0, 1, 0]).unwrap(), 2);
    assert_eq!(tilde_fibre_boundary(&[1, 1, 1, 1]).unwrap(), 0);

    assert_eq!(choose_embedding_side(3, 2).unwrap(), 16);
    assert_eq!(choose_embedding_side(3, 3).unwrap(), 16);
    assert_eq!(choose_embedding_side(5, 4).unwrap(), 32);
}

#[test]
fn h_functionals() {
    let half = [1, 1, 0, 0];
    assert!(close(h_eval(&half, HVariant::HStar).unwrap(), 0.5));
    for variant in HVariant::ALL {
        assert_eq!(h_eval(&[0, 0, 0, 0], variant).unwrap(), 0.0);
    }
    let c = claim42_details(&[1, 1, 1, 1, 0, 0, 0, 0]).unwrap();
    assert!(close(c.h_star, 0.5));
    assert_eq!(c.entropy, Some(1.0));
    assert!(c.holds());
}

#[test]
fn interval_decompositions() {
    let f = [1, 1, 0, 0, 1, 1, 1, 0];
    let d = interval_decompose(&f);
    assert_eq!(d.intervals, vec![Interval::new(1, 2), Interval::new(5, 7)]);
    assert_eq!(interval_decompose(&[1, 1, 1, 1]).intervals.len(), 1);
    assert_eq!(interval_decompose(&[0, 1, 0, 0]).intervals, vec![Interval::new(2, 2)]);
}

#[test]
fn slab_costs_and_extraction() {
    let slab = GridFunction::indicator(4, 2, |x| x[0] < 2).unwrap();
    assert!(close(refined_cost(&slab, HVariant::HStar).unwrap(), 0.5));
    assert_eq!(boundary_cost(&slab).unwrap(), Q::new(1, 1));
    let budget = Budget::default();
    for e in [
        grid_junta_extract(&slab, 0.1, Method::Main, &budget).unwrap(),
        grid_junta_extract(&slab, 0.1, Method::Refined, &budget).unwrap(),
        torus_junta_extract(&slab, 0.1, &budget).unwrap(),
    ] {
        assert_eq!(e.junta.coords(), &[0]);
        assert!(e.distance.is_zero());
    }
    let diag = iso_lower_diag(&slab, 0.1).unwrap();
    assert!(diag.holds());
    assert!(close(diag.lower_bound, std::f64::consts::E * 2.0 * 2f64.ln()));
}

#[test]
fn small_sets_extract_to_zero() {
    let point = GridFunction::indicator(4, 2, |x| x == [0, 0]).unwrap();
    let e = grid_junta_extract(&point, 0.1, Method::Main, &Budget::default()).unwrap();
    assert_eq!(e.junta.size(), 0);
    assert!(e.flags.iter().any(|f| f.starts_with("trivial")));
}

#[test]
fn lipschitz_examples() {
    let id = identity_map(6, 2).unwrap();
    assert_eq!(lipschitz_constant(&id, Mode::Torus), q(1, 1));
    let proj = TorusMap::new(vec![GridFunction::from_fn(GridShape::new(6, 2, 6).unwrap(), |i| (i % 6) as u16).unwrap()])
        .unwrap();
    assert_eq!(lipschitz_constant(&proj, Mode::Torus), q(2, 1));
    assert_eq!(displacement_sum(proj.component(0), Mode::Torus), q(1, 1));
    let constant = TorusMap::new(vec![GridFunction::constant(GridShape::new(3, 2, 4).unwrap(), 2).unwrap()]).unwrap();
    assert_eq!(lipschitz_constant(&constant, Mode::Grid), q(0, 1));

    let sel = select_good_coordinates(&id, 0.5, Mode::Torus).unwrap();
    assert_eq!(sel.selected, vec![0, 1]);

    let budget = Budget::default();
    let a = analyze_torus_map(&id, 0.5, 0.5, &budget, 1).unwrap();
    assert!(a.coordinates.iter().all(|c| c.distance.is_zero()));
    let dict = dictator_tuple_map(4, 2, 3, &[1, 0]).unwrap();
    for a in [analyze_torus_map(&dict, 0.3, 0.3, &budget, 1).unwrap(), analyze_grid_map(&dict, 0.3, 0.3, &budget).unwrap()] {
        assert!(a.coordinates.iter().all(|c| c.junta.size() == 1));
    }
}

#[test]
fn tribes_example() {
    let spec = TribesSpec::new(4, 1, 1).unwrap();
    assert_eq!(spec.n, 4);
    let seven_sixteenths = BigRational::new(7.into(), 16.into());
    assert_eq!(spec.measure(), seven_sixteenths);
    assert_eq!(spec.eps_exact(), BigRational::new(1.into(), 12.into()));
    assert!(spec.window_holds());
    let (f, _) = tribes_grid(4, 1, 1, &Budget::default()).unwrap();
    assert_eq!(f.support_size(), 7 * 16);
}

#[test]
fn decision_tree_is_balanced() {
    let (f, spec) = decision_tree_function(4, 2, 7, &Budget::default()).unwrap();
    assert_eq!(spec.n, 5);
    assert_eq!(f.shape().n, 5);
    // one leaf-parent label per root branch, each cell has k/2 ones
    let search = best_junta_search(&f, 2, 0.25, 1 << 20).unwrap();
    assert!(search.found.is_none());
}

#[test]
fn cuboids() {
    let c = cuboid(2, 2, 4, 3).unwrap();
    assert_eq!(c.support_size(), 16);
    assert_eq!(edge_boundary(&c, Mode::Grid, None).unwrap(), 16);
    assert!(cuboid_sharpness(2, 2, 4, 3).unwrap().attains_term);
    let corner = cuboid(3, 3, 4, 3).unwrap();
    assert_eq!(edge_boundary(&corner, Mode::Grid, None).unwrap(), 3 * 9);
    let slab = cuboid(2, 1, 4, 3).unwrap();
    assert_eq!(edge_boundary(&slab, Mode::Grid, None).unwrap(), 16);
}

#[test]
fn seeded_sets_are_reproducible() {
    assert_eq!(random_set(3, 3, 0.0, 5).unwrap().support_size(), 0);
    let a = encode_table(&random_set(3, 3, 0.5, 42).unwrap());
    let b = encode_table(&random_set(3, 3, 0.5, 42).unwrap());
    assert_eq!(a, b);
    let parity = parity_set(5, 1).unwrap();
    assert_eq!(edge_boundary(&parity, Mode::Grid, None).unwrap(), 4);
}
