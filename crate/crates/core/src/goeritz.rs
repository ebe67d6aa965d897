//! Checkerboard colorings, the black graph, link determinants and the
//! circuit lattice of a connected alternating diagram.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conventions::BLACK_ON_EVEN_CORNERS;
use crate::diagram::{LinkDiagram, Smoothing};
use crate::linalg::IntMatrix;
use crate::scalar::{int, IntScalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GoeritzError {
    #[error("diagram is not connected")]
    Disconnected,
    #[error("diagram is not alternating")]
    NotAlternating,
    #[error("circuit form is not negative definite")]
    IndefiniteForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Black,
    White,
}

/// Face 2-coloring. `face_of_corner[x][k]` is the face containing corner
/// `(x, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkerboard {
    pub colors: Vec<Color>,
    pub face_of_corner: Vec<[usize; 4]>,
}

impl Checkerboard {
    pub fn black_faces(&self) -> Vec<usize> {
        (0..self.colors.len()).filter(|&f| self.colors[f] == Color::Black).collect()
    }
}

/// Color the faces so that faces sharing an arc differ. At crossing 0 the
/// even corners get the color fixed by [`BLACK_ON_EVEN_CORNERS`]; for an
/// alternating diagram this then holds at every crossing.
pub fn checkerboard(d: &LinkDiagram) -> Result<Checkerboard, GoeritzError> {
    if !d.is_connected() {
        return Err(GoeritzError::Disconnected);
    }
    let faces = d.faces();
    if d.crossing_count() == 0 {
        return Ok(Checkerboard { colors: vec![Color::Black, Color::White], face_of_corner: vec![] });
    }
    let mut face_of_corner = vec![[usize::MAX; 4]; d.crossing_count()];
    for (i, f) in faces.iter().enumerate() {
        for &(x, k) in &f.corners {
            face_of_corner[x][k] = i;
        }
    }
    // Corners (x, s-1) and (x, s) lie on the two sides of the arc at slot s.
    let mut adjacent = vec![Vec::new(); faces.len()];
    for fc in &face_of_corner {
        for s in 0..4 {
            let (a, b) = (fc[(s + 3) % 4], fc[s]);
            adjacent[a].push(b);
            adjacent[b].push(a);
        }
    }
    let even = if BLACK_ON_EVEN_CORNERS { Color::Black } else { Color::White };
    let odd = if BLACK_ON_EVEN_CORNERS { Color::White } else { Color::Black };
    let mut colors: Vec<Option<Color>> = vec![None; faces.len()];
    let start = face_of_corner[0][0];
    colors[start] = Some(even);
    let mut queue = VecDeque::from([start]);
    while let Some(f) = queue.pop_front() {
        let c = colors[f].expect("colored");
        let other = if c == even { odd } else { even };
        for &g in &adjacent[f] {
            match colors[g] {
                None => {
                    colors[g] = Some(other);
                    queue.push_back(g);
                }
                Some(cg) => debug_assert_eq!(cg, other, "planar diagrams are 2-colorable"),
            }
        }
    }
    Ok(Checkerboard { colors: colors.into_iter().map(|c| c.expect("connected")).collect(), face_of_corner })
}

/// Planar multigraph on black faces, one edge per crossing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlackGraph {
    pub vertices: usize,
    /// Endpoints of the edge of crossing `i`.
    pub edges: Vec<(usize, usize)>,
    /// `+1` when the crossing's black corners are its even corners.
    pub edge_types: Vec<i8>,
}

impl BlackGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// First Betti number `E - V + 1` of the connected graph.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + 1 - self.vertices
    }
}

fn graph_of(d: &LinkDiagram, cb: &Checkerboard) -> BlackGraph {
    let mut index = vec![usize::MAX; cb.colors.len()];
    let mut next = 0;
    for f in cb.black_faces() {
        index[f] = next;
        next += 1;
    }
    let mut edges = Vec::with_capacity(d.crossing_count());
    let mut edge_types = Vec::with_capacity(d.crossing_count());
    for fc in &cb.face_of_corner {
        let even_black = cb.colors[fc[0]] == Color::Black;
        let (a, b) = if even_black { (fc[0], fc[2]) } else { (fc[1], fc[3]) };
        edges.push((index[a], index[b]));
        edge_types.push(if even_black { 1 } else { -1 });
    }
    BlackGraph { vertices: next, edges, edge_types }
}

pub fn black_graph(d: &LinkDiagram) -> Result<BlackGraph, GoeritzError> {
    let cb = checkerboard(d)?;
    if !d.is_alternating() {
        return Err(GoeritzError::NotAlternating);
    }
    Ok(graph_of(d, &cb))
}

/// Reduced weighted Laplacian: edge `e` contributes weight `w(e)`.
fn reduced_laplacian<T: IntScalar>(g: &BlackGraph, weight: impl Fn(usize) -> i64) -> IntMatrix<T> {
    let n = g.vertices;
    let mut l = vec![vec![0i64; n]; n];
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        if a == b {
            continue;
        }
        let w = weight(e);
        l[a][a] += w;
        l[b][b] += w;
        l[a][b] -= w;
        l[b][a] -= w;
    }
    let rows: Vec<Vec<i64>> = l.into_iter().skip(1).map(|r| r.into_iter().skip(1).collect()).collect();
    IntMatrix::from_i64_rows(&rows)
}

fn det_or_one<T: IntScalar>(m: &IntMatrix<T>) -> T {
    if m.rows() == 0 {
        T::one()
    } else {
        m.determinant().expect("square")
    }
}

/// Spanning-tree count via a cofactor of the Laplacian (zero when disconnected).
pub fn det_matrix_tree<T: IntScalar>(g: &BlackGraph) -> T {
    det_or_one(&reduced_laplacian::<T>(g, |_| 1))
}

/// `|det|` of the reduced Goeritz matrix; any connected diagram.
pub fn goeritz_determinant<T: IntScalar>(d: &LinkDiagram) -> Result<T, GoeritzError> {
    let cb = checkerboard(d)?;
    let g = graph_of(d, &cb);
    Ok(det_or_one(&reduced_laplacian::<T>(&g, |e| g.edge_types[e] as i64)).abs())
}

/// The circuit lattice: extra edges `e_i` outside a spanning tree, each
/// closing an oriented circuit `C_i`, with `Q = -Z Z^T` where row `i` of
/// `Z` is the signed edge vector of `C_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoeritzLattice<T> {
    pub graph: BlackGraph,
    pub tree: Vec<usize>,
    pub extra: Vec<usize>,
    /// Whether extra edge `i` is traversed head to tail.
    pub flipped: Vec<bool>,
    pub circuits: Vec<Vec<i64>>,
    pub q: IntMatrix<T>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub black_graph: BlackGraph,
    pub tree: Vec<usize>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<String>>,
    pub det: String,
}

impl<T: IntScalar> GoeritzLattice<T> {
    pub fn rank(&self) -> usize {
        self.extra.len()
    }

    /// Reverse the orientation of extra edge `i`.
    pub fn flip_edge(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.flipped[i] = !out.flipped[i];
        out.circuits[i].iter_mut().for_each(|c| *c = -*c);
        out.q = form_of(&out.circuits);
        out
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            black_graph: self.graph.clone(),
            tree: self.tree.clone(),
            q: self.q.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            det: det_or_one(&self.q).abs().to_string(),
        }
    }
}

fn form_of<T: IntScalar>(circuits: &[Vec<i64>]) -> IntMatrix<T> {
    let b = circuits.len();
    IntMatrix::from_fn(b, b, |i, j| {
        let dot: i64 = circuits[i].iter().zip(&circuits[j]).map(|(x, y)| x * y).sum();
        int(-dot)
    })
}

/// Spanning tree by breadth-first search from vertex 0. Seed 0 scans edges in
/// index order; other seeds shuffle the scan order, the root, and the
/// orientations of the extra edges.
pub fn build_lattice<T: IntScalar>(g: &BlackGraph, tree_seed: u64) -> Result<GoeritzLattice<T>, GoeritzError> {
    let n = g.vertices;
    let mut order: Vec<usize> = (0..g.edges.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
    let root = if tree_seed == 0 {
        0
    } else {
        order.shuffle(&mut rng);
        rng.gen_range(0..n.max(1))
    };
    let mut incident = vec![Vec::new(); n];
    for &e in &order {
        let (a, b) = g.edges[e];
        if a != b {
            incident[a].push(e);
            incident[b].push(e);
        }
    }
    // parent edge and depth
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut in_tree = vec![false; g.edges.len()];
    if n > 0 {
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &e in &incident[v] {
                let (a, b) = g.edges[e];
                let u = if a == v { b } else { a };
                if depth[u] == usize::MAX {
                    depth[u] = depth[v] + 1;
                    parent[u] = Some(e);
                    in_tree[e] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    if depth.iter().any(|&d| d == usize::MAX) {
        return Err(GoeritzError::Disconnected);
    }
    let tree: Vec<usize> = (0..g.edges.len()).filter(|&e| in_tree[e]).collect();
    let extra: Vec<usize> = (0..g.edges.len()).filter(|&e| !in_tree[e]).collect();
    let flipped: Vec<bool> = extra.iter().map(|_| tree_seed != 0 && rng.gen_bool(0.5)).collect();

    let up = |v: usize| -> (usize, usize) {
        let e = parent[v].expect("non-root");
        let (a, b) = g.edges[e];
        (e, if a == v { b } else { a })
    };
    let circuits: Vec<Vec<i64>> = extra
        .iter()
        .zip(&flipped)
        .map(|(&e, &flip)| {
            let mut z = vec![0i64; g.edges.len()];
            let (mut tail, mut head) = g.edges[e];
            if flip {
                std::mem::swap(&mut tail, &mut head);
            }
            z[e] += if flip { -1 } else { 1 };
            // Tree path head -> tail, signed by edge direction.
            let step = |z: &mut Vec<i64>, from: usize, to: usize, edge: usize| {
                let (a, _) = g.edges[edge];
                z[edge] += if a == from && from != to { 1 } else { -1 };
            };
            let (mut x, mut y) = (head, tail);
            let mut tail_side: Vec<(usize, usize, usize)> = Vec::new();
            while x != y {
                if depth[x] >= depth[y] {
                    let (edge, p) = up(x);
                    step(&mut z, x, p, edge);
                    x = p;
                } else {
                    let (edge, p) = up(y);
                    tail_side.push((p, y, edge));
                    y = p;
                }
            }
            for (from, to, edge) in tail_side.into_iter().rev() {
                step(&mut z, from, to, edge);
            }
            z
        })
        .collect();
    let q = form_of::<T>(&circuits);
    if !q.is_negative_definite() {
        return Err(GoeritzError::IndefiniteForm);
    }
    Ok(GoeritzLattice { graph: g.clone(), tree, extra, flipped, circuits, q })
}

/// Whether `det = det(L_0) + det(L_1)` at `crossing` via spanning-tree counts.
/// A split resolution counts as determinant zero.
pub fn det_additivity_check(d: &LinkDiagram, crossing: usize) -> Result<bool, GoeritzError> {
    let g = black_graph(d)?;
    let total: i64 = det_matrix_tree(&g);
    let mut parts = 0i64;
    for s in [Smoothing::Zero, Smoothing::One] {
        let r = d.smoothing(crossing, s);
        if !r.is_connected() {
            continue;
        }
        parts += det_matrix_tree::<i64>(&black_graph(&r)?);
    }
    Ok(total == parts)
}
