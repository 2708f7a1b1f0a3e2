mod common;

use std::sync::Arc;

use common::{connect, fiber_labels, gf};
use conley_core::conley::{self, connecting_block, ConleyOptions, Strategy};
use conley_core::morse::{self, Matching};
use conley_core::persistence::{diagram_total_order, persistent_betti};
use conley_core::{fixtures, oracle, BitSet, GradedComplex};

fn ids(g: &GradedComplex) -> Vec<String> {
    let mut v: Vec<String> = g.complex().cells().iter().map(|c| c.id.clone()).collect();
    v.sort();
    v
}

fn sorted(v: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = v.iter().map(|s| s.to_string()).collect();
    v.sort();
    v
}

#[test]
fn branching_interval_connection_matrix() {
    let g = fixtures::branching_interval(gf(2));
    assert_eq!(oracle::dense_homology(g.complex()).unwrap(), vec![1]);
    let r = connect(&g, Strategy::Coreduction);
    assert!(r.result.is_strict());
    assert_eq!(r.result.len(), 3);
    assert_eq!(r.stages, 1);
    // one graded pass leaves three critical cells; ignoring the grading,
    // coreduction runs on until a single vertex is left
    let x = g.complex();
    assert_eq!(morse::matching_graded_coreduction(x, g.grades(), &g.grade_positions()).num_critical(), 3);
    assert_eq!(morse::matching_coreduction(x).num_critical(), 1);
    let fg = conley::conley_morse_graph(&r);
    assert_eq!(fg.polynomial_of("p").unwrap().fiber_label(), "t^0");
    assert_eq!(fg.polynomial_of("r").unwrap().fiber_label(), "t^0");
    assert_eq!(fg.polynomial_of("q").unwrap().fiber_label(), "t^1");
    let one = |l: &str| BitSet::from_indices(3, [g.poset().index_of(l).unwrap()]);
    for low in ["p", "r"] {
        let b = connecting_block(&r.result, &one(low), &one("q"), Some(1)).unwrap();
        assert_eq!(b.shape(), (1, 1));
        assert_eq!(b.rank(), 1);
    }
    // the full block into {p, r} is the column (1; 1)
    let pr = BitSet::from_indices(3, [0, 2]);
    let b = connecting_block(&r.result, &pr, &one("q"), Some(1)).unwrap();
    assert_eq!(b.shape(), (2, 1));
    assert_eq!((b.entry(0, 0), b.entry(1, 0)), (1, 1));
}

#[test]
fn hand_matching_reproduces_printed_maps() {
    // pairing v1 with e1 leaves v0, v2, e0
    let g = fixtures::branching_interval(gf(2));
    let x = g.complex().clone();
    let (v1, e1) = (x.index_of("v1").unwrap(), x.index_of("e1").unwrap());
    let m = Matching::from_pairs(&x, &[(v1, e1)]).unwrap();
    let red = morse::build_reduction(x.clone(), m).unwrap();
    let target: Vec<&str> = red.target().cells().iter().map(|c| c.id.as_str()).collect();
    assert_eq!(target, ["v0", "v2", "e0"]);
    let mats = oracle::reduction_matrices(&red).unwrap();
    let f = gf(2);
    // source order v0 v1 v2 e0 e1, target order v0 v2 e0
    let psi = oracle::DenseMatrix::from_rows(f, &[vec![1, 0, 0, 0, 0], vec![0, 1, 1, 0, 0], vec![0, 0, 0, 1, 0]]);
    let phi = oracle::DenseMatrix::from_rows(
        f,
        &[vec![1, 0, 0], vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 1]],
    );
    let mut gamma = oracle::DenseMatrix::zeros(f, 5, 5);
    gamma.set(4, 1, 1);
    assert_eq!(mats.psi, psi);
    assert_eq!(mats.phi, phi);
    assert_eq!(mats.gamma, gamma);
    assert!(oracle::check_reduction(&red).unwrap().is_empty());
}

#[test]
fn slit_lower_piece_homology_tower() {
    let k = fixtures::slit_grid_lower(gf(2));
    assert_eq!(k.complex().f_polynomial().coeffs(), &[9, 14, 4]);
    assert_eq!(oracle::dense_homology(k.complex()).unwrap(), vec![0, 1]);
    let r = conley::homology_with(k.complex().clone(), ConleyOptions::with_strategy(Strategy::Coordinate)).unwrap();
    assert_eq!(r.result.complex().f_polynomial().to_string(), "t^1");
    let stages = r.stage_cells();
    assert_eq!(stages.len(), 2);
    let mut first = stages[0].clone();
    first.sort();
    assert_eq!(first, sorted(&["[1]x[0,1]", "[1]x[1,2]", "[1]x[1]"]));
    assert_eq!(stages[1], ["[1]x[0,1]"]);

    let r = conley::homology(k.complex().clone());
    assert_eq!(r.result.complex().f_polynomial().to_string(), "t^1");
}

#[test]
fn slit_grid_connection_matrix() {
    let g = fixtures::slit_grid(gf(2));
    assert_eq!(
        fiber_labels(&g),
        [("0".to_string(), "9t^0+14t^1+4t^2".to_string()), ("1".to_string(), "t^1+2t^2".to_string())]
    );
    let r = connect(&g, Strategy::Coordinate);
    let stages = r.stage_cells();
    assert_eq!(stages.len(), 2);
    let mut first = stages[0].clone();
    first.sort();
    assert_eq!(
        first,
        sorted(&["[1]x[0,1]", "[1]x[1,2]", "[1]x[1]", "[1,2]x[0,1]", "[1,2]x[1,2]", "[1,2]x[1]"])
    );
    assert_eq!(ids(&r.result), sorted(&["[1]x[0,1]", "[1,2]x[0,1]"]));
    for strategy in [Strategy::Coordinate, Strategy::Coreduction] {
        let r = connect(&g, strategy);
        assert_eq!(r.result.len(), 2);
        assert_eq!(
            fiber_labels(&r.result),
            [("0".to_string(), "t^1".to_string()), ("1".to_string(), "t^2".to_string())]
        );
        let block = connecting_block(
            &r.result,
            &BitSet::from_indices(2, [0]),
            &BitSet::from_indices(2, [1]),
            Some(2),
        )
        .unwrap();
        assert_eq!(block.shape(), (1, 1));
        assert_eq!(block.rank(), 1);
    }
}

#[test]
fn compression_interval_fiber_graphs() {
    for n in [9_000usize, 90_000] {
        let m = n / 3;
        let g = fixtures::compression_interval(gf(2), n);
        let fg = g.fiber_graph();
        assert_eq!(fg.polynomial_of("q").unwrap().fiber_label(), format!("{}t^0+{m}t^1", m - 1));
        assert_eq!(fg.polynomial_of("p").unwrap().fiber_label(), format!("{}t^0+{m}t^1", m + 1));
        assert_eq!(fg.polynomial_of("r").unwrap().fiber_label(), format!("{}t^0+{m}t^1", m + 1));
        let r = connect(&g, Strategy::Coreduction);
        let cm = conley::conley_morse_graph(&r);
        assert_eq!(cm.polynomial_of("q").unwrap().fiber_label(), "t^1");
        assert_eq!(cm.polynomial_of("p").unwrap().fiber_label(), "t^0");
        assert_eq!(cm.polynomial_of("r").unwrap().fiber_label(), "t^0");
    }
}

#[test]
fn pair_regrading_gives_connecting_map() {
    let g = fixtures::branching_interval_pair(gf(2));
    let r = connect(&g, Strategy::Coreduction);
    assert!(r.result.is_strict());
    let lower = BitSet::from_indices(2, [0]);
    let upper = BitSet::from_indices(2, [1]);
    let b = connecting_block(&r.result, &lower, &upper, Some(1)).unwrap();
    assert_eq!(b.shape(), (2, 1));
    assert_eq!(b.rank(), 1);
    assert_eq!((b.entry(0, 0), b.entry(1, 0)), (1, 1));
    let ranks = conley::interval_ranks(&r.result);
    let nonzero: Vec<_> = ranks.iter().filter(|(_, &r)| r > 0).collect();
    assert_eq!(nonzero, [(&(0, 1, 1), &1)]);
}

#[test]
fn filtered_interval_persistence() {
    let g = fixtures::filtered_interval(gf(2));
    let d = diagram_total_order(&g, &[0, 1, 2]).unwrap();
    assert_eq!(d.to_csv(), "dim,birth,death\n0,0,inf\n0,1,2\n");
    let c = conley::connection_matrix(&g, ConleyOptions::default()).unwrap();
    assert_eq!(diagram_total_order(&c.result, &[0, 1, 2]).unwrap().to_csv(), d.to_csv());
    let down = |k: usize| g.poset().principal_down_set(k);
    assert_eq!(persistent_betti(&g, &down(0), &down(1), 0).unwrap(), 1);
    assert_eq!(oracle::dense_persistent_betti(&g, &down(0), &down(1), 0).unwrap(), 1);
    assert_eq!(oracle::dense_persistent_betti(&g, &down(1), &down(1), 0).unwrap(), 2);
    assert_eq!(oracle::dense_persistent_betti(&g, &down(1), &down(2), 0).unwrap(), 1);
}

#[test]
fn torus_homology() {
    for p in [2, 3, 5] {
        let x = Arc::new(fixtures::torus(gf(p), 4));
        assert!(x.validate().is_valid());
        assert_eq!(oracle::dense_homology(&x).unwrap(), vec![1, 2, 1]);
        let r = conley::homology(x.clone());
        assert_eq!(r.result.complex().f_polynomial().to_string(), "1 + 2t^1 + t^2");
        assert!(r.composed.is_perfect());
    }
}

#[test]
fn circle_and_point() {
    let f = gf(3);
    let point = Arc::new(conley_core::cubical::interval_complex(f, 0));
    assert_eq!(conley::homology(point).result.complex().f_polynomial().to_string(), "1");
    // a square loop v0 -> v1 -> v2 -> v3 -> v0
    let mut b = conley_core::ComplexBuilder::new(f);
    for k in 0..4 {
        b.add_cell(format!("v{k}"), 0).unwrap();
    }
    for k in 0..4 {
        let e = b.add_cell(format!("e{k}"), 1).unwrap();
        b.add_incidence(e, (k + 1) % 4, 1).unwrap();
        b.add_incidence(e, k, -1).unwrap();
    }
    let x = b.build();
    assert_eq!(oracle::dense_homology(&x).unwrap(), vec![1, 1]);
    assert_eq!(conley::homology(Arc::new(x)).result.complex().f_polynomial().to_string(), "1 + t^1");
}
