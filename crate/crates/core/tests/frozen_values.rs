//! Reference values computed by hand from the definitions and frozen here
//! before the implementation was trusted.

use dcell_paths::graphcore::{connect, disjoint_paths, fan, link_two, Graph};
use dcell_paths::oracle::{exact_pi3, exact_pi_s, max_common_neighbors, upper_bound_pi3, OracleBudget, Triples};
use dcell_paths::packer::{pack_complete, pack_kn, pi3_formula, SteinerTriple};
use dcell_paths::topology::{build_graph, build_params, coord_from_uid, copy_vertices, cross_neighbor, edge_list, uid};
use dcell_paths::verify::{audit_kappa, audit_lemma1, check_packing, PairSample};
use dcell_paths::{Coord, Packing};

fn c(d: &[usize]) -> Coord {
    Coord::new(d.to_vec())
}

fn triple(x: usize, y: usize, z: usize) -> SteinerTriple {
    SteinerTriple::new(x, y, z).unwrap()
}

#[test]
fn size_table() {
    assert_eq!(build_params(0, 6).unwrap().t, vec![6]);
    assert_eq!(build_params(1, 6).unwrap().t, vec![6, 42]);
    assert_eq!(build_params(2, 6).unwrap().t, vec![6, 42, 1806]);
    assert_eq!(build_params(2, 3).unwrap().t, vec![3, 12, 156]);
}

#[test]
fn uids_and_coordinates() {
    let p12 = build_params(1, 2).unwrap();
    let p22 = build_params(2, 2).unwrap();
    let p16 = build_params(1, 6).unwrap();
    assert_eq!(uid(&c(&[2, 1]), 0, &p12).unwrap(), 1);
    assert_eq!(uid(&c(&[0, 1, 0]), 1, &p22).unwrap(), 2);
    assert_eq!(coord_from_uid(41, &p16).unwrap(), c(&[6, 5]));
    assert_eq!(coord_from_uid(3, &p12).unwrap(), c(&[1, 1]));
    assert_eq!(cross_neighbor(&c(&[0, 0]), 1, &p12).unwrap(), c(&[1, 0]));
    assert_eq!(cross_neighbor(&c(&[2, 1]), 1, &p12).unwrap(), c(&[1, 1]));
    assert_eq!(cross_neighbor(&c(&[0, 0]), 1, &p16).unwrap(), c(&[1, 0]));
    assert_eq!(copy_vertices(&p12, 1, &[0]).unwrap(), vec![0, 1]);
    assert_eq!(copy_vertices(&p16, 1, &[6]).unwrap(), (36..42).collect::<Vec<_>>());
}

#[test]
fn small_networks() {
    let p = build_params(1, 2).unwrap();
    let g = build_graph(&p).unwrap();
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    edges.sort_unstable();
    assert_eq!(edges, vec![(0, 1), (0, 2), (1, 4), (2, 3), (3, 5), (4, 5)]);
    assert_eq!(edge_list(&p, &g).lines().count(), 7);
    let k6 = build_graph(&build_params(0, 6).unwrap()).unwrap();
    assert_eq!(k6.edge_count(), 15);
    let d16 = build_graph(&build_params(1, 6).unwrap()).unwrap();
    assert_eq!(d16.vertex_count(), 42);
    assert!((0..42).all(|v| d16.degree(v) == 6));
    // (0,0) to (2,1) in D_{1,2}: three edges.
    assert_eq!(connect(&g, 0, 5, &[]).unwrap().len(), 4);
}

#[test]
fn path_primitives() {
    let k4 = Graph::complete(4);
    let mut ps = disjoint_paths(&k4, 0, 1, 3).unwrap();
    ps.sort();
    assert_eq!(ps, vec![vec![0, 1], vec![0, 2, 1], vec![0, 3, 1]]);
    assert!(disjoint_paths(&k4, 0, 1, 0).unwrap().is_empty());
    let mut f = fan(&k4, 0, &[1, 2, 3], 3).unwrap();
    f.sort();
    assert_eq!(f, vec![vec![0, 1], vec![0, 2], vec![0, 3]]);
    let c4 = Graph::cycle(4);
    let lt = link_two(&c4, [0, 2], [1, 3]).unwrap();
    assert_eq!(lt.paths.iter().map(|p| p.len()).sum::<usize>(), 4);
    let d16 = build_graph(&build_params(1, 6).unwrap()).unwrap();
    assert_eq!(disjoint_paths(&d16, 0, 41, 6).unwrap().len(), 6);
}

#[test]
fn formula_and_templates() {
    assert_eq!(pi3_formula(1, 6), 3);
    assert_eq!(pi3_formula(0, 6), 3);
    assert_eq!(pi3_formula(2, 7), 5);
    assert_eq!(pi3_formula(1, 8), 4);
    let k4 = pack_complete(4, &triple(1, 2, 3)).unwrap();
    assert_eq!(k4.paths, vec![vec![1, 2, 3], vec![1, 3, 0, 2]]);
    assert_eq!(pack_complete(3, &triple(0, 1, 2)).unwrap().paths, vec![vec![0, 1, 2]]);
    assert_eq!(pack_complete(6, &triple(0, 1, 2)).unwrap().len(), 3);
    // Two copies, z next to the cross edge of x.
    let pk = pack_kn(1, 6, &triple(0, 1, 6)).unwrap();
    assert_eq!(pk.len(), 3);
    assert_eq!(pack_kn(1, 7, &triple(0, 8, 16)).unwrap().len(), 4);
}

#[test]
fn oracle_and_bounds() {
    let b = OracleBudget::default();
    assert_eq!(exact_pi3(&Graph::complete(4), &Triples::All, &b).unwrap().value, 2);
    assert_eq!(exact_pi3(&Graph::complete(3), &Triples::All, &b).unwrap().value, 1);
    assert_eq!(exact_pi3(&Graph::complete(5), &Triples::All, &b).unwrap().value, 2);
    let d16 = build_graph(&build_params(1, 6).unwrap()).unwrap();
    assert_eq!(upper_bound_pi3(&d16).unwrap(), 3);
    assert_eq!(upper_bound_pi3(&Graph::complete(6)).unwrap(), 3);
    let (r, w) = max_common_neighbors(&d16);
    let w = w.unwrap();
    assert_eq!(r, 3);
    assert!(w[0] / 6 == w[1] / 6 && w[1] / 6 == w[2] / 6);
    assert_eq!(max_common_neighbors(&Graph::cycle(6)).0, 0);
    assert_eq!(max_common_neighbors(&Graph::complete(5)).0, 2);
    let one = exact_pi_s(&d16, &triple(0, 1, 2), &b).unwrap();
    assert_eq!((one.value, one.exact), (3, true));
}

#[test]
fn verifier_examples() {
    let k4 = Graph::complete(4);
    let s = triple(1, 2, 3);
    let good = Packing::new(s, vec![vec![1, 2, 3], vec![1, 3, 0, 2]]);
    assert!(check_packing(&k4, &s, &good).ok());
    let bad = Packing::new(s, vec![vec![1, 2, 3], vec![1, 2, 0, 3]]);
    let rep = check_packing(&k4, &s, &bad);
    assert!(rep.failures().any(|c| c.name == "pairwise.edges"));
    let tri = Graph::complete(3);
    let s0 = triple(0, 1, 2);
    assert!(check_packing(&tri, &s0, &Packing::new(s0, vec![vec![0, 1, 2]])).ok());
}

#[test]
fn audits() {
    assert!(audit_lemma1(&build_params(1, 6).unwrap()).unwrap().ok());
    assert!(audit_lemma1(&build_params(1, 2).unwrap()).unwrap().ok());
    assert!(audit_lemma1(&build_params(2, 3).unwrap()).unwrap().ok());
    // At n = 4 a non-clique triple reaches the maximum: 1, 2 and the cross
    // neighbor of 0 all see 0.
    let g14 = build_graph(&build_params(1, 4).unwrap()).unwrap();
    let c0 = g14.neighbors(0).find(|&w| w >= 4).unwrap();
    let counts = dcell_paths::oracle::common_neighbor_counts(&g14);
    let mut t = [1, 2, c0];
    t.sort_unstable();
    assert_eq!(counts.get(&t), Some(&1));
    assert_eq!(max_common_neighbors(&g14).0, 1);
    assert!(!audit_lemma1(&build_params(1, 4).unwrap()).unwrap().ok());
    let p13 = build_params(1, 3).unwrap();
    assert!(audit_kappa(&p13, &[vec![0, 1, 2]], &PairSample::All, &PairSample::Random { count: 0, seed: 1 })
        .unwrap()
        .ok());
    assert!(audit_kappa(&p13, &[vec![0, 1]], &PairSample::All, &PairSample::All).is_err());
    let p16 = build_params(1, 6).unwrap();
    assert!(audit_kappa(&p16, &[], &PairSample::All, &PairSample::Random { count: 50, seed: 7 }).unwrap().ok());
}
