use khcover::dinv::d_table;
use khcover::goeritz::{black_graph, build_lattice, det_additivity_check, det_matrix_tree, goeritz_determinant};
use khcover::homalg::{flatten_cube, spectral_pages};
use khcover::khovanov::{
    assemble, face_commutativity, graded_euler, homology, jones_determinant, kauffman_oracle, khovanov_homology,
    mark_invariance_check,
};
use khcover::quasialt::{qa_certify, validate, QaBudget, QaOutcome};
use khcover::{parse_pd, BigInt, Lattice, LinkDiagram};
use num_rational::Ratio;
use num_traits::Signed;

fn corpus_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn load(name: &str) -> LinkDiagram {
    let text = std::fs::read_to_string(corpus_dir().join(format!("{name}.pd"))).unwrap();
    parse_pd(&text).unwrap()
}

fn corpus() -> Vec<(String, LinkDiagram)> {
    let mut paths: Vec<_> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "pd"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name.clone(), load(&name))
        })
        .collect()
}

fn alternating() -> Vec<(String, LinkDiagram)> {
    corpus().into_iter().filter(|(_, d)| d.crossing_count() > 0 && d.is_alternating() && d.is_connected()).collect()
}

fn marked(d: &LinkDiagram) -> LinkDiagram {
    d.clone().with_mark(Some(1)).unwrap()
}

#[test]
fn euler_characteristic_is_state_sum() {
    for (name, d) in corpus() {
        let kh = khovanov_homology(&d, false).unwrap();
        assert_eq!(graded_euler(&kh), kauffman_oracle(&d).unwrap(), "{name}");
    }
}

#[test]
fn reduced_rank_is_determinant_on_alternating_knots() {
    for (name, d) in alternating() {
        let det: i64 = goeritz_determinant(&d).unwrap();
        let tree: i64 = det_matrix_tree(&black_graph(&d).unwrap());
        assert_eq!(det, tree, "{name}");
        assert_eq!(jones_determinant(&d).unwrap(), det, "{name}");
        if d.component_count() == 1 {
            let rank = khovanov_homology(&marked(&d), true).unwrap().total_rank();
            assert_eq!(rank as i64, det, "{name}");
        }
    }
}

#[test]
fn torus_knot_gap() {
    let d = load("t35");
    assert_eq!(goeritz_determinant::<i64>(&d).unwrap(), 1);
    assert_eq!(jones_determinant(&d).unwrap(), 1);
    let rank = khovanov_homology(&marked(&d), true).unwrap().total_rank();
    assert_eq!(rank, 7);
}

#[test]
fn non_alternating_nine47() {
    let d = load("nine47");
    assert!(!d.is_alternating());
    assert_eq!(goeritz_determinant::<i64>(&d).unwrap(), 27);
    assert_eq!(jones_determinant(&d).unwrap(), 27);
    assert_eq!(khovanov_homology(&marked(&d), true).unwrap().total_rank(), 27);
}

#[test]
fn lattices_of_alternating_diagrams() {
    for (name, d) in alternating() {
        let g = black_graph(&d).unwrap();
        let trees: BigInt = det_matrix_tree(&g);
        let mut multisets = Vec::new();
        for seed in 0..3 {
            let l: Lattice = build_lattice(&g, seed).unwrap();
            assert!(l.rank() == 0 || l.q.is_negative_definite(), "{name}");
            let det = if l.rank() == 0 { BigInt::from(1) } else { l.q.determinant().unwrap().abs() };
            assert_eq!(det, trees, "{name}");
            let t = d_table(&l.q).unwrap();
            assert_eq!(BigInt::from(t.classes.len()), trees, "{name}");
            assert!(t.is_conjugation_symmetric(), "{name}");
            multisets.push(t.d_multiset());
        }
        assert!(multisets.windows(2).all(|w| w[0] == w[1]), "{name}");
    }
}

#[test]
fn determinant_adds_over_resolutions() {
    for (name, d) in alternating() {
        for x in 0..d.crossing_count() {
            assert!(det_additivity_check(&d, x).unwrap(), "{name} crossing {x}");
        }
    }
}

fn published_table() -> Vec<Ratio<BigInt>> {
    let text = std::fs::read_to_string(corpus_dir().join("nine40.d.txt")).unwrap();
    let mut v: Vec<Ratio<BigInt>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect::<Vec<_>>())
        .collect();
    v.sort();
    v
}

#[test]
fn nine40_correction_terms() {
    let d = load("nine40");
    let l: Lattice = build_lattice(&black_graph(&d).unwrap(), 0).unwrap();
    let t = d_table(&l.q).unwrap();
    assert_eq!(t.det, BigInt::from(75));
    assert_eq!(t.invariant_factors, vec![BigInt::from(5), BigInt::from(15)]);
    let table = published_table();
    assert_eq!(table.len(), 75);
    assert_eq!(t.d_multiset(), table);
    // The origin is the spin structure.
    assert_eq!(t.classes[0].d, Ratio::new(BigInt::from(-1), BigInt::from(2)));
    // The mirror computes the invariants of the oppositely oriented cover.
    let m: Lattice = build_lattice(&black_graph(&d.mirror()).unwrap(), 0).unwrap();
    let mut negated: Vec<_> = d_table(&m.q).unwrap().d_multiset().into_iter().map(|x| -x).collect();
    negated.sort();
    assert_eq!(negated, table);
}

#[test]
fn cube_faces_commute_and_square_to_zero() {
    for (name, d) in corpus() {
        if d.crossing_count() > 8 {
            continue;
        }
        for reduced in [false, true] {
            let d = if reduced { marked(&d) } else { d.clone() };
            if reduced && d.arc_count() == 0 {
                continue;
            }
            assert!(face_commutativity(&d, reduced).unwrap(), "{name}");
            assemble(&d, reduced).unwrap().check_d_squared().unwrap();
        }
    }
}

#[test]
fn reduced_homology_ignores_the_mark() {
    for (name, d) in corpus() {
        if d.arc_count() > 0 && d.crossing_count() <= 9 {
            assert!(mark_invariance_check(&d).unwrap(), "{name}");
        }
    }
}

#[test]
fn mirror_negates_gradings() {
    for (name, d) in corpus() {
        let kh = khovanov_homology(&d, false).unwrap();
        assert_eq!(khovanov_homology(&d.mirror(), false).unwrap(), kh.negated(), "{name}");
    }
}

#[test]
fn cube_spectral_sequence_collapses_for_alternating_knots() {
    for (name, d) in alternating().into_iter().filter(|(_, d)| d.component_count() == 1) {
        let cube = assemble(&marked(&d), true).unwrap();
        let total = homology(&cube).total_rank();
        let pages = spectral_pages(&flatten_cube(&cube).unwrap(), 0);
        assert_eq!(pages.infinity().ranks_by_level.iter().sum::<usize>(), total, "{name}");
        assert_eq!(pages.page(2).unwrap().ranks_by_level.iter().sum::<usize>(), total, "{name}");
    }
}

#[test]
fn certificates_for_alternating_diagrams() {
    for (name, d) in alternating() {
        let det: i64 = goeritz_determinant(&d).unwrap();
        match qa_certify(&d, QaBudget::for_diagram(&d)) {
            QaOutcome::Certified { certificate, .. } => {
                assert_eq!(certificate.det, det, "{name}");
                validate(&certificate).unwrap();
            }
            QaOutcome::Unknown { diagnostics } => panic!("{name}: {diagnostics:?}"),
        }
    }
}

#[test]
fn torus_knot_is_not_certified() {
    let d = load("t35");
    assert!(matches!(qa_certify(&d, QaBudget::for_diagram(&d)), QaOutcome::Unknown { .. }));
}
