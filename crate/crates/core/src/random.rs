//! Seeded random instances: braid-closure diagrams, negative-definite forms,
//! chain maps, homotopy-coherent cone sequences and filtered complexes.
//!
//! Every complex is built in a standard form whose homology is known, then
//! disguised by a random change of basis.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{braid_closure, LinkDiagram};
use crate::homalg::{ChainComplex, FilteredComplex};
use crate::linalg::{IntMatrix, MatF2, SparseF2};

/// A braid word on at most `max_strands` strands using every generator, so
/// that its closure is a non-split diagram.
pub fn braid_word<R: Rng>(rng: &mut R, max_strands: usize, max_len: usize) -> (usize, Vec<i32>) {
    let strands = rng.gen_range(2..=max_strands.max(2));
    let min_len = strands - 1;
    let len = rng.gen_range(min_len.max(1)..=max_len.max(min_len).max(1));
    let mut word: Vec<i32> = (1..strands as i32).collect();
    while word.len() < len {
        word.push(rng.gen_range(1..strands as i32));
    }
    word.shuffle(rng);
    for g in &mut word {
        if rng.gen_bool(0.5) {
            *g = -*g;
        }
    }
    (strands, word)
}

/// Connected diagram with at most `max_crossings` crossings.
pub fn diagram<R: Rng>(rng: &mut R, max_crossings: usize) -> LinkDiagram {
    let (strands, word) = braid_word(rng, 4.min(max_crossings + 1), max_crossings);
    braid_closure(strands, &word).expect("braid closures are valid diagrams")
}

/// `-(A A^T)` for a random nonsingular `b x b` matrix `A` with entries in `-2..=2`.
pub fn negative_definite_form<R: Rng>(rng: &mut R, b: usize) -> IntMatrix<BigInt> {
    loop {
        let a: Vec<Vec<i64>> = (0..b).map(|_| (0..b).map(|_| rng.gen_range(-2..=2)).collect()).collect();
        let q: Vec<Vec<i64>> = (0..b)
            .map(|i| (0..b).map(|j| -(0..b).map(|k| a[i][k] * a[j][k]).sum::<i64>()).collect())
            .collect();
        let q = IntMatrix::from_i64_rows(&q);
        if b == 0 || q.is_negative_definite() {
            return q;
        }
    }
}

fn random_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.gen_bool(0.5)).collect()
}

/// Random invertible matrix and its inverse, as a product of elementary row
/// additions `row i += row j` allowed by `allowed(i, j)`.
fn elementary_product<R: Rng>(rng: &mut R, n: usize, allowed: impl Fn(usize, usize) -> bool) -> (MatF2, MatF2) {
    let mut p = MatF2::identity(n);
    let mut inv = MatF2::identity(n);
    if n < 2 {
        return (p, inv);
    }
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j || !allowed(i, j) {
            continue;
        }
        // E = I + e_ij: p <- E p, inv <- inv E.
        for c in 0..n {
            if p.get(j, c) {
                p.flip(i, c);
            }
        }
        for r in 0..n {
            if inv.get(r, i) {
                inv.flip(r, j);
            }
        }
    }
    (p, inv)
}

/// Random element of GL(n, F2) with its inverse.
pub fn invertible<R: Rng>(rng: &mut R, n: usize) -> (MatF2, MatF2) {
    elementary_product(rng, n, |_, _| true)
}

/// Standard-form complex: `h` cycles and `pairs` pairs `a_k -> b_k`.
/// Basis order `h..., a_1, b_1, a_2, b_2, ...`.
#[derive(Clone, Debug)]
pub struct StandardComplex {
    pub homology: usize,
    pub pairs: usize,
}

impl StandardComplex {
    pub fn dim(&self) -> usize {
        self.homology + 2 * self.pairs
    }

    fn a(&self, k: usize) -> usize {
        self.homology + 2 * k
    }

    fn b(&self, k: usize) -> usize {
        self.homology + 2 * k + 1
    }

    pub fn differential(&self) -> MatF2 {
        let mut d = MatF2::zeros(self.dim(), self.dim());
        for k in 0..self.pairs {
            d.set(self.b(k), self.a(k), true);
        }
        d
    }

    fn random<R: Rng>(rng: &mut R, max_dim: usize) -> Self {
        let pairs = rng.gen_range(0..=max_dim / 2);
        let homology = rng.gen_range(0..=max_dim - 2 * pairs);
        Self { homology, pairs }
    }
}

/// Random chain map `f: x -> y` between standard-form complexes, returned
/// as a matrix in standard bases.
fn standard_chain_map<R: Rng>(rng: &mut R, x: &StandardComplex, y: &StandardComplex) -> MatF2 {
    let dy = y.differential();
    let mut f = MatF2::zeros(y.dim(), x.dim());
    let cycles: Vec<usize> = (0..y.homology).chain((0..y.pairs).map(|k| y.b(k))).collect();
    for h in 0..x.homology {
        for &c in &cycles {
            if rng.gen_bool(0.5) {
                f.set(c, h, true);
            }
        }
    }
    for k in 0..x.pairs {
        let u = random_vector(rng, y.dim());
        for (r, &bit) in u.iter().enumerate() {
            if bit {
                f.set(r, x.a(k), true);
                for t in (0..dy.rows()).filter(|&t| dy.get(t, r)) {
                    f.flip(t, x.b(k));
                }
            }
        }
    }
    f
}

/// A chain complex in disguise, with its change of basis.
#[derive(Clone, Debug)]
pub struct Disguised {
    pub complex: ChainComplex,
    /// Standard basis to disguised basis.
    pub p: MatF2,
    pub p_inv: MatF2,
}

fn conjugate<R: Rng>(rng: &mut R, d: &MatF2) -> Disguised {
    let (p, p_inv) = invertible(rng, d.rows());
    let d = p.mul(d).and_then(|m| m.mul(&p_inv)).expect("square");
    Disguised { complex: ChainComplex::new(d).expect("conjugate of a complex"), p, p_inv }
}

fn disguise<R: Rng>(rng: &mut R, s: &StandardComplex) -> Disguised {
    conjugate(rng, &s.differential())
}

fn transport(f: &MatF2, source: &Disguised, target: &Disguised) -> MatF2 {
    target.p.mul(f).and_then(|m| m.mul(&source.p_inv)).expect("compatible sizes")
}

/// A chain map with the rank of its action on homology.
#[derive(Clone, Debug)]
pub struct ChainMapInstance {
    pub source: Disguised,
    pub target: Disguised,
    pub f: MatF2,
    pub source_homology: usize,
    pub target_homology: usize,
    pub induced_rank: usize,
}

/// Random chain map between random complexes of dimension at most `max_dim`.
pub fn chain_map<R: Rng>(rng: &mut R, max_dim: usize) -> ChainMapInstance {
    let (xs, ys) = (StandardComplex::random(rng, max_dim), StandardComplex::random(rng, max_dim));
    let f = standard_chain_map(rng, &xs, &ys);
    // Homology generators map to homology generators plus boundaries.
    let induced_rank = f.submatrix(0..ys.homology, 0..xs.homology).rank();
    let (x, y) = (disguise(rng, &xs), disguise(rng, &ys));
    let f = transport(&f, &x, &y);
    ChainMapInstance { source: x, target: y, f, source_homology: xs.homology, target_homology: ys.homology, induced_rank }
}

/// `A_1 -> A_2 -> A_3 -> A_4` with homotopies `H_1: f_2 f_1 ~ 0`,
/// `H_2: f_3 f_2 ~ 0` such that `f_3 H_1 + H_2 f_1` is a quasi-isomorphism.
#[derive(Clone, Debug)]
pub struct ConeSequence {
    pub complexes: [ChainComplex; 4],
    pub f: [MatF2; 3],
    pub h: [MatF2; 2],
    /// Homology rank of `A_1`, equal to that of `A_4`.
    pub end_homology: usize,
}

/// Instance built from the exact triangle `X -f-> Y -> Cone(f) -> X`,
/// each term disguised independently.
pub fn cone_sequence<R: Rng>(rng: &mut R, max_dim: usize) -> ConeSequence {
    let xs = StandardComplex::random(rng, max_dim);
    let ys = StandardComplex::random(rng, max_dim);
    let f = standard_chain_map(rng, &xs, &ys);
    let (nx, ny) = (xs.dim(), ys.dim());
    let n = nx + ny;
    let dx = xs.differential();
    let dy = ys.differential();
    let dc = MatF2::from_fn(n, n, |r, c| match (r < nx, c < nx) {
        (true, true) => dx.get(r, c),
        (false, true) => f.get(r - nx, c),
        (false, false) => dy.get(r - nx, c - nx),
        (true, false) => false,
    });
    let iota = MatF2::from_fn(n, ny, |r, c| r == nx + c);
    let pi = MatF2::from_fn(nx, n, |r, c| r == c);
    let h1 = MatF2::from_fn(n, nx, |r, c| r == c);
    let h2 = MatF2::zeros(nx, ny);

    let a1 = conjugate(rng, &dx);
    let a2 = conjugate(rng, &dy);
    let a3 = conjugate(rng, &dc);
    let a4 = conjugate(rng, &dx);
    ConeSequence {
        f: [transport(&f, &a1, &a2), transport(&iota, &a2, &a3), transport(&pi, &a3, &a4)],
        h: [transport(&h1, &a1, &a3), transport(&h2, &a2, &a4)],
        complexes: [a1.complex, a2.complex, a3.complex, a4.complex],
        end_homology: xs.homology,
    }
}

/// Filtered complex with known total homology rank.
pub fn filtered_complex<R: Rng>(rng: &mut R, max_dim: usize, max_level: i64) -> (FilteredComplex, usize) {
    let s = StandardComplex::random(rng, max_dim);
    let n = s.dim();
    let mut levels = vec![0i64; n];
    let mut gradings = vec![0i64; n];
    for h in 0..s.homology {
        levels[h] = rng.gen_range(0..=max_level);
        gradings[h] = rng.gen_range(0..3);
    }
    for k in 0..s.pairs {
        let la = rng.gen_range(0..=max_level);
        levels[s.a(k)] = la;
        levels[s.b(k)] = rng.gen_range(la..=max_level);
        let g = rng.gen_range(0..3);
        gradings[s.a(k)] = g;
        gradings[s.b(k)] = g;
    }
    // Row additions that move a vector only into equal or higher levels.
    let (p, p_inv) = elementary_product(rng, n, |i, j| {
        gradings[i] == gradings[j] && (levels[i], i) > (levels[j], j)
    });
    let d = p.mul(&s.differential()).and_then(|m| m.mul(&p_inv)).expect("square");
    let f = FilteredComplex::new(SparseF2::from_dense(&d), levels, Some(gradings)).expect("filtration preserved");
    (f, s.homology)
}
