//! Planar link diagrams given by PD codes.
//!
//! A crossing is written `X[a,b,c,d]`: the four arcs meeting it, read
//! counterclockwise starting at the incoming under-strand. Zero-crossing
//! unknotted components are written `O<k>` (k of them), and an optional
//! `mark=<arc>` item marks an arc for the reduced theory.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conventions::{ONE_SMOOTHING, ZERO_SMOOTHING};

/// Arc label; labels run over `1..=arc_count`.
pub type Arc = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("malformed PD code: {0}")]
    MalformedCode(String),
    #[error("diagram is not planar (V - E + F = {euler}, expected {expected})")]
    NonPlanar { euler: i64, expected: i64 },
    #[error("bad arc labels: {0}")]
    BadArcCount(String),
    #[error("state has length {got}, diagram has {expected} crossings")]
    LengthMismatch { expected: usize, got: usize },
}

/// One crossing: arcs counterclockwise from the incoming under-strand, plus
/// the sign induced by the orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Crossing {
    arcs: [Arc; 4],
    sign: i8,
}

impl Crossing {
    pub fn arcs(&self) -> [Arc; 4] {
        self.arcs
    }

    pub fn arc(&self, slot: usize) -> Arc {
        self.arcs[slot % 4]
    }

    /// +1 when the over-strand enters at slot 3, -1 when it enters at slot 1.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }
}

/// Which way a crossing is smoothed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Smoothing {
    Zero,
    One,
}

impl Smoothing {
    pub fn pairs(self) -> [[usize; 2]; 2] {
        match self {
            Smoothing::Zero => ZERO_SMOOTHING,
            Smoothing::One => ONE_SMOOTHING,
        }
    }
}

/// Region of the diagram complement: the crossing corners around it and the
/// arcs on its boundary. Corner `(x, k)` lies between slots `k` and `k+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub corners: Vec<(usize, usize)>,
    pub arcs: Vec<Arc>,
}

/// Circles of a resolved diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionState {
    pub state: Vec<bool>,
    /// Arc lists, ordered by least arc label.
    pub circles: Vec<Vec<Arc>>,
    pub weight: usize,
}

impl ResolutionState {
    pub fn circle_count(&self) -> usize {
        self.circles.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    free_loops: u32,
    mark: Option<Arc>,
    name: Option<String>,
    /// Components as arc sequences in traversal order; free loops last.
    components: Vec<Vec<Arc>>,
    /// For each crossing arc (index `arc - 1`), its two `(crossing, slot)` ends.
    ends: Vec<[(usize, usize); 2]>,
}

/// Serialized form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub crossings: Vec<[Arc; 4]>,
    #[serde(default)]
    pub free_loops: u32,
    pub mark: Option<Arc>,
    pub name: Option<String>,
    /// Arc sequence of each component in traversal order.
    #[serde(default)]
    pub orientation: Vec<Vec<Arc>>,
    #[serde(default)]
    pub signs: Vec<i8>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn ends_table(raw: &[[Arc; 4]]) -> Vec<[(usize, usize); 2]> {
    let mut ends = vec![[(usize::MAX, 0); 2]; 2 * raw.len()];
    let mut seen = vec![0u8; 2 * raw.len()];
    for (x, c) in raw.iter().enumerate() {
        for (s, &a) in c.iter().enumerate() {
            let i = a as usize - 1;
            ends[i][seen[i] as usize] = (x, s);
            seen[i] += 1;
        }
    }
    ends
}

fn other_end(ends: &[[(usize, usize); 2]], raw: &[[Arc; 4]], at: (usize, usize)) -> (usize, usize) {
    let a = raw[at.0][at.1] as usize - 1;
    if ends[a][0] == at {
        ends[a][1]
    } else {
        ends[a][0]
    }
}

/// Entries `(crossing, slot)` visited when entering the diagram at `head`.
fn trace(raw: &[[Arc; 4]], ends: &[[(usize, usize); 2]], head: (usize, usize)) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut cur = head;
    loop {
        out.push(cur);
        let exit = (cur.0, (cur.1 + 2) % 4);
        let next = other_end(ends, raw, exit);
        if next == head {
            break;
        }
        cur = next;
    }
    out
}

fn validate_labels(raw: &[[Arc; 4]]) -> Result<(), DiagramError> {
    let n = 2 * raw.len();
    let mut count = vec![0usize; n + 1];
    for c in raw {
        for &a in c {
            if a == 0 || a as usize > n {
                return Err(DiagramError::BadArcCount(format!(
                    "label {a} outside 1..={n} for {} crossings",
                    raw.len()
                )));
            }
            count[a as usize] += 1;
        }
    }
    if let Some(a) = (1..=n).find(|&a| count[a] != 2) {
        return Err(DiagramError::BadArcCount(format!("arc {a} used {} times", count[a])));
    }
    Ok(())
}

impl LinkDiagram {
    /// The empty diagram (no components).
    pub fn empty() -> Self {
        Self { crossings: vec![], free_loops: 0, mark: None, name: None, components: vec![], ends: vec![] }
    }

    /// Zero-crossing unknot.
    pub fn unknot() -> Self {
        Self::from_raw(vec![], 1, None, Some("unknot".into()), true, &[]).expect("valid")
    }

    /// Builds and validates a diagram. With `strict`, an under-strand read
    /// against the traversal direction is an error; otherwise the crossing
    /// tuple is rotated to start at the incoming under-strand.
    fn from_raw(
        raw: Vec<[Arc; 4]>,
        free_loops: u32,
        mark: Option<Arc>,
        name: Option<String>,
        strict: bool,
        reverse: &[usize],
    ) -> Result<Self, DiagramError> {
        validate_labels(&raw)?;
        let (raw, entries) = orient(raw, strict, reverse)?;
        let ends = ends_table(&raw);

        let mut over_entry = vec![None; raw.len()];
        let mut components: Vec<Vec<Arc>> = Vec::new();
        for comp in &entries {
            components.push(comp.iter().map(|&(x, s)| raw[x][s]).collect());
            for &(x, s) in comp {
                if s % 2 == 1 {
                    over_entry[x] = Some(s);
                }
            }
        }
        let crossings = raw
            .iter()
            .zip(&over_entry)
            .map(|(arcs, e)| Crossing { arcs: *arcs, sign: if *e == Some(3) { 1 } else { -1 } })
            .collect::<Vec<_>>();
        let base = 2 * crossings.len() as Arc;
        for k in 0..free_loops {
            components.push(vec![base + k + 1]);
        }
        let d = Self { crossings, free_loops, mark: None, name, components, ends };
        d.check_planar()?;
        d.with_mark(mark)
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn arc_count(&self) -> usize {
        2 * self.crossings.len() + self.free_loops as usize
    }

    pub fn free_loops(&self) -> u32 {
        self.free_loops
    }

    pub fn components(&self) -> &[Vec<Arc>] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn mark(&self) -> Option<Arc> {
        self.mark
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: Option<String>) -> Self {
        self.name = name;
        self
    }

    pub fn with_mark(mut self, mark: Option<Arc>) -> Result<Self, DiagramError> {
        if let Some(m) = mark {
            if m == 0 || m as usize > self.arc_count() {
                return Err(DiagramError::MalformedCode(format!("mark {m} is not an arc label")));
            }
        }
        self.mark = mark;
        Ok(self)
    }

    /// The two `(crossing, slot)` ends of a crossing arc.
    pub fn arc_ends(&self, a: Arc) -> Option<[(usize, usize); 2]> {
        self.ends.get((a as usize).checked_sub(1)?).copied()
    }

    /// `(n_+, n_-)`.
    pub fn crossing_signs(&self) -> (usize, usize) {
        let p = self.crossings.iter().filter(|c| c.is_positive()).count();
        (p, self.crossings.len() - p)
    }

    pub fn writhe(&self) -> i64 {
        let (p, n) = self.crossing_signs();
        p as i64 - n as i64
    }

    fn raw(&self) -> Vec<[Arc; 4]> {
        self.crossings.iter().map(|c| c.arcs).collect()
    }

    /// Swap over and under at every crossing.
    pub fn mirror(&self) -> Self {
        let raw = self
            .crossings
            .iter()
            .map(|c| {
                let [a, b, cc, d] = c.arcs;
                if c.is_positive() {
                    [d, a, b, cc]
                } else {
                    [b, cc, d, a]
                }
            })
            .collect();
        let mut m = Self::from_raw(raw, self.free_loops, self.mark, self.name.clone(), true, &[])
            .expect("mirror of a valid diagram is valid");
        m.name = self.name.as_ref().map(|n| mirror_name(n));
        m
    }

    /// Reverse the orientation of the listed components (indices into
    /// [`components`](Self::components)).
    pub fn reversed(&self, comps: &[usize]) -> Result<Self, DiagramError> {
        let n_crossing_comps = self.components.len() - self.free_loops as usize;
        if let Some(&bad) = comps.iter().find(|&&k| k >= self.components.len()) {
            return Err(DiagramError::MalformedCode(format!("no component {bad}")));
        }
        let comps: Vec<usize> = comps.iter().copied().filter(|&k| k < n_crossing_comps).collect();
        Self::from_raw(self.raw(), self.free_loops, self.mark, self.name.clone(), false, &comps)
    }

    /// Reverse every component.
    pub fn reversed_all(&self) -> Self {
        let all: Vec<usize> = (0..self.components.len()).collect();
        self.reversed(&all).expect("indices in range")
    }

    /// Faces of the diagram graph; each free loop contributes two faces.
    pub fn faces(&self) -> Vec<Face> {
        let raw = self.raw();
        let n = raw.len();
        let mut seen = vec![[false; 4]; n];
        let mut faces = Vec::new();
        for x in 0..n {
            for k in 0..4 {
                if seen[x][k] {
                    continue;
                }
                let mut corners = Vec::new();
                let mut arcs = Vec::new();
                let (mut cx, mut ck) = (x, k);
                while !seen[cx][ck] {
                    seen[cx][ck] = true;
                    corners.push((cx, ck));
                    let out = (cx, (ck + 1) % 4);
                    arcs.push(raw[out.0][out.1]);
                    (cx, ck) = other_end(&self.ends, &raw, out);
                }
                faces.push(Face { corners, arcs });
            }
        }
        let base = 2 * n as Arc;
        for k in 0..self.free_loops {
            for _ in 0..2 {
                faces.push(Face { corners: vec![], arcs: vec![base + k + 1] });
            }
        }
        faces
    }

    /// Connected pieces of the crossing graph (free loops excluded).
    fn crossing_pieces(&self) -> usize {
        let n = self.crossings.len();
        let mut uf = UnionFind::new(n);
        for e in &self.ends {
            uf.union(e[0].0, e[1].0);
        }
        (0..n).filter(|&x| uf.find(x) == x).count()
    }

    fn check_planar(&self) -> Result<(), DiagramError> {
        let v = self.crossings.len() as i64;
        let e = 2 * v;
        let f = self.faces().iter().filter(|f| !f.corners.is_empty()).count() as i64;
        let expected = 2 * self.crossing_pieces() as i64;
        let euler = v - e + f;
        if euler != expected {
            return Err(DiagramError::NonPlanar { euler, expected });
        }
        Ok(())
    }

    /// One piece: either a single free loop, or crossings forming one
    /// connected graph and no free loops.
    pub fn is_connected(&self) -> bool {
        if self.crossings.is_empty() {
            self.free_loops == 1
        } else {
            self.free_loops == 0 && self.crossing_pieces() == 1
        }
    }

    /// Over and under alternate along every component.
    pub fn is_alternating(&self) -> bool {
        let raw = self.raw();
        self.components.iter().take(self.components.len() - self.free_loops as usize).all(|comp| {
            let first = comp[0];
            let ends = self.ends[first as usize - 1];
            // Find the entry at which this component's traversal entered `first`.
            let head = ends.iter().copied().find(|&(x, s)| {
                let next = raw[x][(s + 2) % 4];
                comp.len() == 1 || next == comp[1]
            });
            let Some(head) = head else { return false };
            let entries = trace(&raw, &self.ends, head);
            let n = entries.len();
            (0..n).all(|i| entries[i].1 % 2 != entries[(i + 1) % n].1 % 2)
        })
    }

    /// Circle label of every arc (index `arc - 1`) in the resolution given by
    /// the bits of `state` (bit `x` set means crossing `x` is 1-smoothed),
    /// and the number of circles. Circles are numbered by least arc label.
    pub fn circles_of_state(&self, state: u64) -> (Vec<u16>, usize) {
        let total = self.arc_count();
        let mut uf = UnionFind::new(total);
        for (x, c) in self.crossings.iter().enumerate() {
            let pairs = if state >> x & 1 == 1 { ONE_SMOOTHING } else { ZERO_SMOOTHING };
            for [p, q] in pairs {
                uf.union(c.arcs[p] as usize - 1, c.arcs[q] as usize - 1);
            }
        }
        let mut label = vec![u16::MAX; total];
        let mut of_arc = vec![0u16; total];
        let mut count = 0u16;
        for a in 0..total {
            let r = uf.find(a);
            if label[r] == u16::MAX {
                label[r] = count;
                count += 1;
            }
            of_arc[a] = label[r];
        }
        (of_arc, count as usize)
    }

    /// Resolve every crossing according to `state` (`true` = 1-smoothing).
    pub fn resolve(&self, state: &[bool]) -> Result<ResolutionState, DiagramError> {
        if state.len() != self.crossings.len() {
            return Err(DiagramError::LengthMismatch { expected: self.crossings.len(), got: state.len() });
        }
        let bits = state.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i));
        let (of_arc, count) = self.circles_of_state(bits);
        let mut circles = vec![Vec::new(); count];
        for (a, &c) in of_arc.iter().enumerate() {
            circles[c as usize].push(a as Arc + 1);
        }
        Ok(ResolutionState { state: state.to_vec(), circles, weight: state.iter().filter(|&&b| b).count() })
    }

    /// Diagram obtained by smoothing crossing `x`.
    pub fn smoothing(&self, x: usize, s: Smoothing) -> Self {
        let c = self.crossings[x].arcs;
        let unions: Vec<(Arc, Arc)> = s.pairs().iter().map(|&[p, q]| (c[p], c[q])).collect();
        self.rebuild_without(&[x], &unions)
    }

    /// Drops the crossings in `removed`, identifies the arc pairs in
    /// `unions`, and rebuilds a normalized diagram with canonical labels.
    pub(crate) fn rebuild_without(&self, removed: &[usize], unions: &[(Arc, Arc)]) -> Self {
        let total = self.arc_count();
        let mut uf = UnionFind::new(total + 1);
        for &(a, b) in unions {
            uf.union(a as usize, b as usize);
        }
        let kept: Vec<[Arc; 4]> = self
            .crossings
            .iter()
            .enumerate()
            .filter(|(x, _)| !removed.contains(x))
            .map(|(_, c)| c.arcs.map(|a| uf.find(a as usize) as Arc))
            .collect();
        let mut relabel: BTreeMap<Arc, Arc> = BTreeMap::new();
        for c in &kept {
            for &a in c {
                let next = relabel.len() as Arc + 1;
                relabel.entry(a).or_insert(next);
            }
        }
        let raw: Vec<[Arc; 4]> = kept.iter().map(|c| c.map(|a| relabel[&a])).collect();

        // Classes touching the removed crossings with no remaining ends close up.
        let mut closed: Vec<usize> = Vec::new();
        for &x in removed {
            for a in self.crossings[x].arcs {
                let r = uf.find(a as usize);
                if !relabel.contains_key(&(r as Arc)) && !closed.contains(&r) {
                    closed.push(r);
                }
            }
        }
        let base_free = 2 * self.crossings.len();
        let old_free: Vec<usize> = (base_free + 1..=total).collect();
        let free_loops = (closed.len() + old_free.len()) as u32;
        let new_base = 2 * raw.len() as Arc;
        let mark = self.mark.map(|m| {
            let r = uf.find(m as usize);
            if let Some(&l) = relabel.get(&(r as Arc)) {
                l
            } else if let Some(i) = closed.iter().position(|&c| c == r) {
                new_base + 1 + i as Arc
            } else {
                let i = old_free.iter().position(|&f| f == m as usize).expect("mark on a free loop");
                new_base + 1 + (closed.len() + i) as Arc
            }
        });
        Self::from_raw(raw, free_loops, mark, None, false, &[])
            .expect("rebuilt diagram is valid")
            .canonical()
    }

    /// Relabel arcs consecutively along the components.
    pub fn canonical(&self) -> Self {
        let mut new_label = vec![0 as Arc; self.arc_count() + 1];
        let mut next = 1;
        for comp in &self.components {
            for &a in comp {
                new_label[a as usize] = next;
                next += 1;
            }
        }
        let raw = self.raw().iter().map(|c| c.map(|a| new_label[a as usize])).collect();
        let mark = self.mark.map(|m| new_label[m as usize]);
        Self::from_raw(raw, self.free_loops, mark, self.name.clone(), true, &[])
            .expect("relabeling preserves validity")
    }

    /// PD text that [`parse_pd`] reads back to an identical diagram.
    pub fn to_pd_string(&self) -> String {
        let mut items: Vec<String> = self
            .crossings
            .iter()
            .map(|c| format!("X[{},{},{},{}]", c.arcs[0], c.arcs[1], c.arcs[2], c.arcs[3]))
            .collect();
        if self.free_loops > 0 {
            items.push(format!("O{}", self.free_loops));
        }
        if let Some(m) = self.mark {
            items.push(format!("mark={m}"));
        }
        items.join(";")
    }

    pub fn to_json(&self) -> DiagramJson {
        DiagramJson {
            crossings: self.raw(),
            free_loops: self.free_loops,
            mark: self.mark,
            name: self.name.clone(),
            orientation: self.components.clone(),
            signs: self.crossings.iter().map(|c| c.sign).collect(),
        }
    }

    pub fn from_json(j: &DiagramJson) -> Result<Self, DiagramError> {
        Self::from_raw(j.crossings.clone(), j.free_loops, j.mark, j.name.clone(), true, &[])
    }
}

fn mirror_name(n: &str) -> String {
    match n.strip_prefix("mirror(").and_then(|s| s.strip_suffix(')')) {
        Some(inner) => inner.to_string(),
        None => format!("mirror({n})"),
    }
}

/// Orient every component. Returns the (possibly rotated) crossing tuples
/// and, per component, the `(crossing, slot)` entries in traversal order.
fn orient(
    mut raw: Vec<[Arc; 4]>,
    strict: bool,
    reverse: &[usize],
) -> Result<(Vec<[Arc; 4]>, Vec<Vec<(usize, usize)>>), DiagramError> {
    let ends = ends_table(&raw);
    let n_arcs = ends.len();
    let mut visited = vec![false; n_arcs];
    let mut chosen: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut rotate = vec![false; raw.len()];

    for start in 0..n_arcs {
        if visited[start] {
            continue;
        }
        let [o1, o2] = ends[start];
        let fwd = trace(&raw, &ends, o1);
        let bwd = trace(&raw, &ends, o2);
        let bad = |t: &[(usize, usize)]| t.iter().filter(|&&(_, s)| s == 2).count();
        let (bf, bb) = (bad(&fwd), bad(&bwd));
        let label = start as Arc + 1;
        let next_is_successor = |o: (usize, usize)| raw[o.0][(o.1 + 2) % 4] == label + 1;
        let mut use_fwd = if bf == 0 && bb == 0 {
            // No under-crossings: prefer the direction in which labels increase.
            !(next_is_successor(o2) && !next_is_successor(o1))
        } else if bf == 0 {
            true
        } else if bb == 0 {
            false
        } else if strict {
            return Err(DiagramError::MalformedCode(format!(
                "under-strands on the component through arc {label} disagree on orientation"
            )));
        } else {
            bf <= bb
        };
        if reverse.contains(&chosen.len()) {
            use_fwd = !use_fwd;
        }
        let entries = if use_fwd { fwd } else { bwd };
        for &(x, s) in &entries {
            visited[raw[x][s] as usize - 1] = true;
            if s == 2 {
                rotate[x] = true;
            }
        }
        chosen.push(entries);
    }

    for (x, r) in rotate.iter().enumerate() {
        if *r {
            let [a, b, c, d] = raw[x];
            raw[x] = [c, d, a, b];
        }
    }
    for comp in chosen.iter_mut() {
        for e in comp.iter_mut() {
            if rotate[e.0] {
                e.1 = (e.1 + 2) % 4;
            }
        }
    }
    Ok((raw, chosen))
}

/// Parse PD text. Items are separated by `;`, `,` or newlines; `#` starts a
/// comment line. Accepted items: `X[a,b,c,d]`, `O<k>`, `mark=<arc>`,
/// `name=<text>`. A `PD[...]` wrapper is tolerated.
pub fn parse_pd(text: &str) -> Result<LinkDiagram, DiagramError> {
    let mut raw: Vec<[Arc; 4]> = Vec::new();
    let mut free_loops = 0u32;
    let mut mark = None;
    let mut name = None;

    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    let mut body = body.trim();
    if let Some(inner) = body.strip_prefix("PD[").and_then(|s| s.strip_suffix(']')) {
        body = inner;
    }
    let bad = |msg: String| DiagramError::MalformedCode(msg);
    let mut rest = body;
    loop {
        rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ';' || c == ',');
        if rest.is_empty() {
            break;
        }
        if let Some(r) = rest.strip_prefix("X[") {
            let close = r.find(']').ok_or_else(|| bad("unterminated X[".into()))?;
            let nums: Result<Vec<Arc>, _> = r[..close].split(',').map(|t| t.trim().parse::<Arc>()).collect();
            let nums = nums.map_err(|e| bad(format!("bad arc label in X[{}]: {e}", &r[..close])))?;
            let tuple: [Arc; 4] = nums
                .try_into()
                .map_err(|v: Vec<Arc>| bad(format!("crossing needs 4 arcs, got {}", v.len())))?;
            raw.push(tuple);
            rest = &r[close + 1..];
        } else if let Some(r) = rest.strip_prefix("mark=") {
            let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
            let m = r[..end].parse::<Arc>().map_err(|e| bad(format!("bad mark: {e}")))?;
            mark = Some(m);
            rest = &r[end..];
        } else if let Some(r) = rest.strip_prefix("name=") {
            let end = r.find([';', '\n']).unwrap_or(r.len());
            name = Some(r[..end].trim().to_string());
            rest = &r[end..];
        } else if let Some(r) = rest.strip_prefix('O') {
            let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
            let k = if end == 0 { 1 } else { r[..end].parse::<u32>().map_err(|e| bad(format!("bad O token: {e}")))? };
            free_loops += k;
            rest = &r[end..];
        } else {
            let snippet: String = rest.chars().take(12).collect();
            return Err(bad(format!("unexpected input near '{snippet}'")));
        }
    }
    LinkDiagram::from_raw(raw, free_loops, mark, name, true, &[])
}

/// Closure of a braid on `strands` strands. Letter `k > 0` is the positive
/// crossing between strands `k` and `k+1`, `-k` its inverse. Strands never
/// crossed become free loops.
pub fn braid_closure(strands: usize, word: &[i32]) -> Result<LinkDiagram, DiagramError> {
    let bad = |msg: String| DiagramError::MalformedCode(msg);
    if let Some(&g) = word.iter().find(|&&g| g == 0 || g.unsigned_abs() as usize >= strands) {
        return Err(bad(format!("generator {g} out of range for {strands} strands")));
    }
    // Provisional labels: 0..strands are the bottom ends, then two per crossing.
    let mut current: Vec<usize> = (0..strands).collect();
    let mut next = strands;
    let mut raw: Vec<[usize; 4]> = Vec::with_capacity(word.len());
    for &g in word {
        let i = g.unsigned_abs() as usize - 1;
        let (bl, br) = (current[i], current[i + 1]);
        let (tl, tr) = (next, next + 1);
        next += 2;
        // Bottom-left runs to top-right, bottom-right to top-left.
        raw.push(if g > 0 { [br, tr, tl, bl] } else { [bl, br, tr, tl] });
        current[i] = tl;
        current[i + 1] = tr;
    }
    let mut uf = UnionFind::new(next);
    for (p, &top) in current.iter().enumerate() {
        uf.union(p, top);
    }
    let mut relabel: BTreeMap<usize, Arc> = BTreeMap::new();
    for c in &raw {
        for &a in c {
            let r = uf.find(a);
            let fresh = relabel.len() as Arc + 1;
            relabel.entry(r).or_insert(fresh);
        }
    }
    let raw: Vec<[Arc; 4]> = raw.iter().map(|c| c.map(|a| relabel[&uf.find(a)])).collect();
    let touched: BTreeSet<usize> = word.iter().flat_map(|g| {
        let i = g.unsigned_abs() as usize - 1;
        [i, i + 1]
    }).collect();
    let free = (strands - touched.len()) as u32;
    LinkDiagram::from_raw(raw, free, None, None, true, &[])
}

impl fmt::Display for LinkDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pd_string())
    }
}
