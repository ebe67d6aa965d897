use std::collections::BTreeMap;

use khcover::diagram::{braid_closure, DiagramJson};
use khcover::dinv::{d_table, ClassLabeler};
use khcover::homalg::{induced_rank, is_homotopy, iterated_cone, mapping_cone, spectral_pages, ChainComplex};
use khcover::khovanov::{assemble, face_commutativity, graded_euler, homology, kauffman_oracle};
use khcover::linalg::{smith_normal_form, IntMatrix};
use khcover::{parse_pd, random, BigInt, LinkDiagram, MatF2, SparseF2};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn f2_matrix(max: usize) -> impl Strategy<Value = MatF2> {
    (0..=max, 0..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| MatF2::from_fn(r, c, |i, j| bits[i * c + j]))
    })
}

fn int_matrix(max: usize) -> impl Strategy<Value = IntMatrix<BigInt>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(-6i64..=6, r * c)
            .prop_map(move |v| IntMatrix::from_i64_rows(&v.chunks(c).map(<[i64]>::to_vec).collect::<Vec<_>>()))
    })
}

fn diagram(max_crossings: usize) -> impl Strategy<Value = LinkDiagram> {
    any::<u64>().prop_map(move |s| random::diagram(&mut rng(s), max_crossings))
}

/// Characteristic covectors with `|K_i| <= |Q_ii|`, grouped by class.
fn box_oracle(q: &IntMatrix<i64>) -> Vec<(Vec<i64>, Ratio<i64>)> {
    let b = q.rows();
    let det = q.determinant().unwrap();
    let adj = q.adjugate().unwrap();
    let ranges: Vec<Vec<i64>> = (0..b)
        .map(|i| {
            let m = q[(i, i)].abs();
            (-m..=m).filter(|k| (k - q[(i, i)]).is_even()).collect()
        })
        .collect();
    let mut all: Vec<Vec<i64>> = vec![vec![]];
    for r in &ranges {
        all = all.into_iter().flat_map(|p| r.iter().map(move |&k| [p.clone(), vec![k]].concat())).collect();
    }
    // Same class iff adj (K - K') / 2 is divisible by det.
    let same = |a: &[i64], c: &[i64]| {
        let diff: Vec<i64> = a.iter().zip(c).map(|(x, y)| (x - y) / 2).collect();
        adj.apply(&diff).iter().all(|v| v.is_multiple_of(&det))
    };
    let mut classes: Vec<(Vec<i64>, Ratio<i64>)> = Vec::new();
    for k in all {
        let sq = Ratio::new(adj.bilinear(&k, &k), det);
        match classes.iter_mut().find(|(rep, _)| same(rep, &k)) {
            Some((_, best)) => {
                if sq > *best {
                    *best = sq;
                }
            }
            None => classes.push((k, sq)),
        }
    }
    classes
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f2_rank_bounds(a in f2_matrix(24), b in f2_matrix(24)) {
        let r = a.rank();
        prop_assert!(r <= a.rows().min(a.cols()));
        prop_assert_eq!(r, a.transpose().rank());
        prop_assert_eq!(r, SparseF2::from_dense(&a).rank_sparse());
        if a.cols() == b.rows() {
            let ab = a.mul(&b).unwrap();
            prop_assert!(ab.rank() <= r.min(b.rank()));
        }
        if (a.rows(), a.cols()) == (b.rows(), b.cols()) {
            prop_assert!(a.add(&b).unwrap().rank() <= r + b.rank());
        }
        prop_assert_eq!(a.kernel().rows(), a.cols() - r);
    }

    #[test]
    fn smith_form_is_equivalent_and_divisible(a in int_matrix(5)) {
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&s.d).unwrap().mul(&s.v).unwrap(), a.clone());
        prop_assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(a.rows()));
        prop_assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(a.cols()));
        let diag = s.diagonal();
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                prop_assert!(i == j || s.d[(i, j)].is_zero());
            }
        }
        prop_assert!(diag.iter().all(|x| !x.is_negative()));
        for w in diag.windows(2) {
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
        if a.is_square() {
            let prod: BigInt = diag.iter().product();
            prop_assert_eq!(prod, a.determinant().unwrap().abs());
        }
    }

    #[test]
    fn pd_round_trip(d in diagram(10)) {
        let text = d.to_pd_string();
        let back = parse_pd(&text).unwrap();
        prop_assert_eq!(back.canonical(), d.canonical());
        let json: DiagramJson = serde_json::from_str(&serde_json::to_string(&d.to_json()).unwrap()).unwrap();
        prop_assert_eq!(LinkDiagram::from_json(&json).unwrap().canonical(), d.canonical());
        prop_assert_eq!(d.mirror().mirror().canonical(), d.canonical());
    }

    #[test]
    fn cube_structure(d in diagram(6)) {
        prop_assert!(face_commutativity(&d, false).unwrap());
        let c = assemble(&d, false).unwrap();
        c.check_d_squared().unwrap();
        prop_assert_eq!(graded_euler(&homology(&c)), kauffman_oracle(&d).unwrap());
        let marked = d.with_mark(Some(1)).unwrap();
        prop_assert!(face_commutativity(&marked, true).unwrap());
    }

    #[test]
    fn d_table_matches_box_search(seed in any::<u64>(), b in 1usize..=3) {
        let q = random::negative_definite_form(&mut rng(seed), b);
        let q64 = IntMatrix::from_i64_rows(&q.to_i64_rows().unwrap());
        let t = d_table(&q).unwrap();
        let det = q.determinant().unwrap().abs();
        prop_assert_eq!(BigInt::from(t.classes.len()), det);
        prop_assert!(t.is_conjugation_symmetric());
        let oracle = box_oracle(&q64);
        prop_assert_eq!(oracle.len(), t.classes.len());
        let labeler = ClassLabeler::new(&q);
        let mut by_label: BTreeMap<Vec<BigInt>, Ratio<BigInt>> = BTreeMap::new();
        for (k, sq) in oracle {
            let kb: Vec<BigInt> = k.iter().map(|&x| BigInt::from(x)).collect();
            by_label.insert(labeler.label(&kb), Ratio::new(BigInt::from(*sq.numer()), BigInt::from(*sq.denom())));
        }
        for c in &t.classes {
            prop_assert_eq!(Some(&c.max_square), by_label.get(&c.label));
            prop_assert_eq!(labeler.label(&c.representative), c.label.clone());
        }
    }

    #[test]
    fn cone_long_exact_sequence(seed in any::<u64>()) {
        let inst = random::chain_map(&mut rng(seed), 12);
        let (a, b) = (&inst.source.complex, &inst.target.complex);
        prop_assert_eq!(a.homology_rank(), inst.source_homology);
        prop_assert_eq!(b.homology_rank(), inst.target_homology);
        let cone = mapping_cone(a, b, &inst.f).unwrap();
        let expected = inst.source_homology + inst.target_homology - 2 * inst.induced_rank;
        prop_assert_eq!(cone.complex.homology_rank(), expected);
    }

    #[test]
    fn cone_sequence_hypotheses(seed in any::<u64>()) {
        let s = random::cone_sequence(&mut rng(seed), 8);
        let [a1, a2, a3, a4] = &s.complexes;
        let [f1, f2, f3] = &s.f;
        let [h1, h2] = &s.h;
        prop_assert!(is_homotopy(a1, a3, h1, &f2.mul(f1).unwrap()).unwrap());
        prop_assert!(is_homotopy(a2, a4, h2, &f3.mul(f2).unwrap()).unwrap());
        let psi = f3.mul(h1).unwrap().add(&h2.mul(f1).unwrap()).unwrap();
        prop_assert_eq!(induced_rank(a1, a4, &psi).unwrap(), s.end_homology);
        let it = iterated_cone([a1, a2, a3], f1, f2, h1).unwrap();
        let d = it.complex.differential();
        prop_assert!(d.mul(d).unwrap().is_zero());
        let cone = mapping_cone(a2, a3, f2).unwrap();
        prop_assert_eq!(cone.complex.homology_rank(), a4.homology_rank());
        prop_assert_eq!(a4.homology_rank(), s.end_homology);
    }

    #[test]
    fn spectral_sequence_converges(seed in any::<u64>()) {
        let (f, h) = random::filtered_complex(&mut rng(seed), 14, 4);
        let pages = spectral_pages(&f, 0);
        prop_assert_eq!(pages.infinity().ranks_by_level.iter().sum::<usize>(), h);
        // E^1 is the homology of the level-preserving part, level by level.
        let d = f.differential().to_dense();
        let levels = f.levels();
        let e1: Vec<usize> = (f.min_level()..=f.max_level())
            .map(|p| {
                let idx: Vec<usize> = (0..f.dim()).filter(|&i| levels[i] == p).collect();
                let block = MatF2::from_fn(idx.len(), idx.len(), |r, c| d.get(idx[r], idx[c]));
                idx.len() - 2 * block.rank()
            })
            .collect();
        if f.dim() > 0 {
            prop_assert_eq!(&pages.page(1).unwrap().ranks_by_level, &e1);
        }
        for w in pages.pages.windows(2) {
            prop_assert!(w[1].ranks_by_level.iter().sum::<usize>() <= w[0].ranks_by_level.iter().sum::<usize>());
        }
    }
}

#[test]
fn braid_mirror_flips_signs() {
    let d = braid_closure(3, &[1, -2, 1, 1, -2]).unwrap();
    let (p, n) = d.crossing_signs();
    assert_eq!(d.mirror().crossing_signs(), (n, p));
}

#[test]
fn trivial_cones() {
    let d = MatF2::from_rows(&[vec![0, 0], vec![1, 0]]);
    let c = ChainComplex::new(d).unwrap();
    let id = MatF2::identity(2);
    assert_eq!(mapping_cone(&c, &c, &id).unwrap().complex.homology_rank(), 0);
    let z = ChainComplex::zero(3);
    assert_eq!(mapping_cone(&z, &c, &MatF2::zeros(2, 3)).unwrap().complex.homology_rank(), 3);
}
