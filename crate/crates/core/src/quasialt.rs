//! Quasi-alternating certificates: recursive splittings `det L = det L_0 +
//! det L_1` with both resolutions again certified, bottoming out at unknots.
//!
//! Only diagrams reachable from the input projection by resolutions and
//! crossing-removing Reidemeister I/II moves are explored.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::diagram::{Arc, LinkDiagram, Smoothing};
use crate::goeritz::{goeritz_determinant, GoeritzError};
use crate::khovanov::jones_determinant;

/// Limits on a certificate search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QaBudget {
    pub max_nodes: usize,
    pub time: Option<Duration>,
}

impl QaBudget {
    pub fn nodes(max_nodes: usize) -> Self {
        Self { max_nodes, time: None }
    }

    pub fn time(limit: Duration) -> Self {
        Self { max_nodes: usize::MAX, time: Some(limit) }
    }

    /// `2^l` nodes for an `l`-crossing diagram, capped.
    pub fn for_diagram(d: &LinkDiagram) -> Self {
        Self::nodes(1usize << d.crossing_count().clamp(4, 24))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafReason {
    /// Reidemeister simplification reached a crossingless unknot.
    Simplified,
    /// Connected alternating diagram of determinant one.
    AlternatingDetOne,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QaNode {
    Leaf { reason: LeafReason },
    Split { crossing: usize, zero: Box<QaCertificate>, one: Box<QaCertificate> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaCertificate {
    /// PD code of the node diagram after simplification.
    pub diagram: String,
    pub det: i64,
    pub node: QaNode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaDiagnostics {
    pub nodes_visited: usize,
    pub budget_exhausted: bool,
    pub root_det: i64,
    /// Crossings of the root whose resolutions split the determinant.
    pub splitting_crossings: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum QaOutcome {
    Certified { certificate: QaCertificate, nodes_visited: usize },
    Unknown { diagnostics: QaDiagnostics },
}

impl QaOutcome {
    pub fn certificate(&self) -> Option<&QaCertificate> {
        match self {
            QaOutcome::Certified { certificate, .. } => Some(certificate),
            QaOutcome::Unknown { .. } => None,
        }
    }
}

impl QaCertificate {
    pub fn depth(&self) -> usize {
        match &self.node {
            QaNode::Leaf { .. } => 0,
            QaNode::Split { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    pub fn node_count(&self) -> usize {
        match &self.node {
            QaNode::Leaf { .. } => 1,
            QaNode::Split { zero, one, .. } => 1 + zero.node_count() + one.node_count(),
        }
    }

    /// Determinants `(det L_0, det L_1)` at the root, if it is a split.
    pub fn split_dets(&self) -> Option<(usize, i64, i64)> {
        match &self.node {
            QaNode::Split { crossing, zero, one } => Some((*crossing, zero.det, one.det)),
            QaNode::Leaf { .. } => None,
        }
    }

    /// Indented proof tree.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, "", &mut out);
        out
    }

    fn render_into(&self, depth: usize, tag: &str, out: &mut String) {
        let pad = "  ".repeat(depth);
        match &self.node {
            QaNode::Leaf { reason } => {
                let why = match reason {
                    LeafReason::Simplified => "unknot",
                    LeafReason::AlternatingDetOne => "alternating, det 1",
                };
                out.push_str(&format!("{pad}{tag}det {} leaf ({why}) {}\n", self.det, self.diagram));
            }
            QaNode::Split { crossing, zero, one } => {
                out.push_str(&format!(
                    "{pad}{tag}det {} = {} + {} at crossing {} {}\n",
                    self.det, zero.det, one.det, crossing, self.diagram
                ));
                zero.render_into(depth + 1, "L0: ", out);
                one.render_into(depth + 1, "L1: ", out);
            }
        }
    }
}

/// Determinant, zero for split diagrams.
pub fn determinant(d: &LinkDiagram) -> i64 {
    match goeritz_determinant::<i64>(d) {
        Ok(v) => v,
        Err(GoeritzError::Disconnected) => 0,
        Err(e) => panic!("unexpected determinant failure: {e}"),
    }
}

fn r1_site(d: &LinkDiagram) -> Option<(usize, Smoothing)> {
    d.crossings().iter().enumerate().find_map(|(x, c)| {
        let a = c.arcs();
        (0..4).find(|&k| a[k] == a[(k + 1) % 4]).map(|k| {
            let loop_slots = [k, (k + 1) % 4];
            let s = [Smoothing::Zero, Smoothing::One]
                .into_iter()
                .find(|s| s.pairs().iter().all(|p| p.iter().filter(|q| loop_slots.contains(q)).count() == 1))
                .expect("one smoothing separates the loop slots");
            (x, s)
        })
    })
}

/// A bigon between two crossings where one arc is over at both ends.
fn r2_site(d: &LinkDiagram) -> Option<(usize, usize, [(Arc, Arc); 4])> {
    let slot_at = |a: Arc, x: usize| -> usize {
        let ends = d.arc_ends(a).expect("arc in diagram");
        ends.iter().find(|e| e.0 == x).expect("arc touches crossing").1
    };
    for f in d.faces() {
        if f.corners.len() != 2 || f.arcs.len() != 2 || f.arcs[0] == f.arcs[1] {
            continue;
        }
        let (x, y) = (f.corners[0].0, f.corners[1].0);
        if x == y {
            continue;
        }
        let (a, b) = (f.arcs[0], f.arcs[1]);
        let (ax, ay, bx, by) = (slot_at(a, x), slot_at(a, y), slot_at(b, x), slot_at(b, y));
        let over = |s: usize| s % 2 == 1;
        if over(ax) != over(ay) || over(bx) != over(by) {
            continue;
        }
        let cx = d.crossings()[x].arcs();
        let cy = d.crossings()[y].arcs();
        let through = |c: [Arc; 4], s: usize| (c[s], c[(s + 2) % 4]);
        return Some((x, y, [through(cx, ax), through(cy, ay), through(cx, bx), through(cy, by)]));
    }
    None
}

/// Greedy crossing-removing Reidemeister I and II moves.
pub fn simplify(d: &LinkDiagram) -> LinkDiagram {
    let mut cur = d.clone();
    loop {
        if let Some((x, s)) = r1_site(&cur) {
            cur = cur.smoothing(x, s);
            continue;
        }
        if let Some((x, y, unions)) = r2_site(&cur) {
            cur = cur.rebuild_without(&[x, y], &unions);
            continue;
        }
        return cur;
    }
}

struct Search {
    budget: QaBudget,
    start: Instant,
    nodes: AtomicUsize,
    exhausted: AtomicBool,
    memo: Mutex<HashMap<String, Option<QaCertificate>>>,
}

impl Search {
    fn out_of_budget(&self) -> bool {
        let over = self.nodes.load(Ordering::Relaxed) >= self.budget.max_nodes
            || self.budget.time.is_some_and(|t| self.start.elapsed() >= t);
        if over {
            self.exhausted.store(true, Ordering::Relaxed);
        }
        over
    }

    fn certify(&self, d: &LinkDiagram) -> Option<QaCertificate> {
        let s = simplify(d).canonical();
        let key = s.to_pd_string();
        if let Some(hit) = self.memo.lock().expect("memo lock").get(&key) {
            return hit.clone();
        }
        if self.out_of_budget() {
            return None;
        }
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let found = self.certify_fresh(&s, &key);
        // Failures under an exhausted budget are not definitive.
        if found.is_some() || !self.exhausted.load(Ordering::Relaxed) {
            self.memo.lock().expect("memo lock").insert(key, found.clone());
        }
        found
    }

    fn certify_fresh(&self, s: &LinkDiagram, key: &str) -> Option<QaCertificate> {
        let det = determinant(s);
        if det == 0 {
            return None;
        }
        if s.crossing_count() == 0 {
            let leaf = QaNode::Leaf { reason: LeafReason::Simplified };
            return (s.component_count() == 1).then(|| QaCertificate { diagram: key.to_string(), det, node: leaf });
        }
        if det == 1 {
            let leaf = QaNode::Leaf { reason: LeafReason::AlternatingDetOne };
            return (s.is_connected() && s.is_alternating())
                .then(|| QaCertificate { diagram: key.to_string(), det, node: leaf });
        }
        for (x, d0, d1) in splitting_crossings(s, det) {
            if self.out_of_budget() {
                return None;
            }
            let (zero, one) = rayon::join(
                || self.certify(&s.smoothing(x, Smoothing::Zero)),
                || self.certify(&s.smoothing(x, Smoothing::One)),
            );
            if let (Some(zero), Some(one)) = (zero, one) {
                debug_assert_eq!((zero.det, one.det), (d0, d1));
                let node = QaNode::Split { crossing: x, zero: Box::new(zero), one: Box::new(one) };
                return Some(QaCertificate { diagram: key.to_string(), det, node });
            }
        }
        None
    }
}

/// Crossings with `det = det L_0 + det L_1`, both nonzero, most balanced first.
pub fn splitting_crossings(d: &LinkDiagram, det: i64) -> Vec<(usize, i64, i64)> {
    let mut out: Vec<(usize, i64, i64)> = (0..d.crossing_count())
        .filter_map(|x| {
            let d0 = determinant(&d.smoothing(x, Smoothing::Zero));
            let d1 = determinant(&d.smoothing(x, Smoothing::One));
            (d0 != 0 && d1 != 0 && d0 + d1 == det).then_some((x, d0, d1))
        })
        .collect();
    out.sort_by_key(|&(x, d0, d1)| ((d0 - d1).abs(), x));
    out
}

/// Searches for a certificate. `Unknown` is never a negative answer.
pub fn qa_certify(d: &LinkDiagram, budget: QaBudget) -> QaOutcome {
    let search = Search {
        budget,
        start: Instant::now(),
        nodes: AtomicUsize::new(0),
        exhausted: AtomicBool::new(false),
        memo: Mutex::new(HashMap::new()),
    };
    let found = search.certify(d);
    let nodes_visited = search.nodes.load(Ordering::Relaxed);
    match found {
        Some(certificate) => QaOutcome::Certified { certificate, nodes_visited },
        None => {
            let s = simplify(d);
            let root_det = determinant(&s);
            let splitting = if root_det > 1 { splitting_crossings(&s, root_det) } else { Vec::new() };
            QaOutcome::Unknown {
                diagnostics: QaDiagnostics {
                    nodes_visited,
                    budget_exhausted: search.exhausted.load(Ordering::Relaxed),
                    root_det,
                    splitting_crossings: splitting.into_iter().map(|t| t.0).collect(),
                },
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationError {
    Unparsable(String),
    WrongDeterminant { diagram: String, claimed: i64, actual: i64 },
    NotASplit { diagram: String },
    BadChild { diagram: String, crossing: usize },
    BadLeaf { diagram: String },
}

/// Rechecks every node with determinants from the Jones polynomial side.
pub fn validate(cert: &QaCertificate) -> Result<(), ValidationError> {
    let d = crate::diagram::parse_pd(&cert.diagram).map_err(|e| ValidationError::Unparsable(e.to_string()))?;
    let actual = jones_determinant(&d).map_err(|e| ValidationError::Unparsable(e.to_string()))?;
    if actual != cert.det {
        return Err(ValidationError::WrongDeterminant { diagram: cert.diagram.clone(), claimed: cert.det, actual });
    }
    match &cert.node {
        QaNode::Leaf { reason } => {
            let ok = match reason {
                LeafReason::Simplified => d.crossing_count() == 0 && d.component_count() == 1,
                LeafReason::AlternatingDetOne => d.is_connected() && d.is_alternating() && actual == 1,
            };
            ok.then_some(()).ok_or(ValidationError::BadLeaf { diagram: cert.diagram.clone() })
        }
        QaNode::Split { crossing, zero, one } => {
            if *crossing >= d.crossing_count() || zero.det == 0 || one.det == 0 || zero.det + one.det != cert.det {
                return Err(ValidationError::NotASplit { diagram: cert.diagram.clone() });
            }
            for (child, s) in [(zero, Smoothing::Zero), (one, Smoothing::One)] {
                let expect = simplify(&d.smoothing(*crossing, s)).canonical().to_pd_string();
                if expect != child.diagram {
                    return Err(ValidationError::BadChild { diagram: cert.diagram.clone(), crossing: *crossing });
                }
                validate(child)?;
            }
            Ok(())
        }
    }
}
