//! Oriented link diagrams in PD form, braid closures, smoothings, and the
//! combinatorial data of the cube of resolutions.
//!
//! Conventions (fixed once, used everywhere):
//! * A crossing stores its four arc labels counterclockwise starting from
//!   the incoming under-strand, plus an explicit sign.
//! * The under-strand runs slot 0 -> slot 2. The over-strand runs
//!   slot 3 -> slot 1 at a positive crossing and slot 1 -> slot 3 at a
//!   negative one.
//! * The 0-smoothing joins slots (0,1) and (2,3); the 1-smoothing joins
//!   slots (0,3) and (1,2).
//! * Crossing order is input order; the cube sign rule uses this order.
//! * Circles of a smoothing are ordered by their minimal arc label.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Display};

use crate::poly::Laurent;

pub type Arc = u32;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Crossing {
    /// Arc labels at slots 0..4, counterclockwise from the incoming under-strand.
    pub arcs: [Arc; 4],
    /// +1 or -1.
    pub sign: i8,
}

impl Crossing {
    /// (head slots, tail slots): a head slot is where an arc ends (flows in).
    fn head_slots(&self) -> [usize; 2] {
        if self.sign > 0 {
            [0, 3]
        } else {
            [0, 1]
        }
    }
    fn tail_slots(&self) -> [usize; 2] {
        if self.sign > 0 {
            [1, 2]
        } else {
            [2, 3]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagError {
    Parse(String),
    ArcUse(String),
    Orientation(String),
    NonPlanar(String),
    Braid(String),
}

impl Display for DiagError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagError::Parse(m) => write!(f, "parse error: {m}"),
            DiagError::ArcUse(m) => write!(f, "arc usage error: {m}"),
            DiagError::Orientation(m) => write!(f, "orientation error: {m}"),
            DiagError::NonPlanar(m) => write!(f, "non-planar diagram: {m}"),
            DiagError::Braid(m) => write!(f, "braid error: {m}"),
        }
    }
}

impl std::error::Error for DiagError {}

/// An oriented link diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkDiagram {
    pub crossings: Vec<Crossing>,
    /// Arcs of zero-crossing components.
    pub free_loops: Vec<Arc>,
    /// All arc labels, sorted.
    pub arcs: Vec<Arc>,
    /// Oriented components as arcs in traversal order, each rotated to start
    /// at its minimal arc; components sorted by minimal arc.
    pub components: Vec<Vec<Arc>>,
    pub n_plus: usize,
    pub n_minus: usize,
}

/// A smoothing of a diagram at a cube vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smoothing {
    pub vertex: u32,
    /// Circles as sorted arc lists, ordered by minimal arc.
    pub circles: Vec<Vec<Arc>>,
}

impl Smoothing {
    pub fn circle_count(&self) -> usize {
        self.circles.len()
    }
    pub fn circle_of(&self, arc: Arc) -> usize {
        self.circles
            .iter()
            .position(|c| c.binary_search(&arc).is_ok())
            .expect("arc not found in smoothing")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Merge,
    Split,
}

/// Circle correspondence along a cube edge (one crossing switched 0 -> 1).
#[derive(Clone, Debug)]
pub struct EdgeData {
    pub kind: EdgeKind,
    /// Merge: the two source circles joined, and the target they land on.
    pub merge: Option<((usize, usize), usize)>,
    /// Split: the source circle and the two targets it splits into.
    pub split: Option<(usize, (usize, usize))>,
    /// (source, target) pairs for all untouched circles.
    pub untouched: Vec<(usize, usize)>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl LinkDiagram {
    pub fn n(&self) -> usize {
        self.crossings.len()
    }

    pub fn writhe(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    /// Build and fully validate a diagram from raw crossings and free loops.
    pub fn new(crossings: Vec<Crossing>, free_loops: Vec<Arc>) -> Result<Self, DiagError> {
        // arc usage counts
        let mut use_count: BTreeMap<Arc, usize> = BTreeMap::new();
        for x in &crossings {
            if x.sign != 1 && x.sign != -1 {
                return Err(DiagError::Parse(format!("crossing sign must be +1 or -1, got {}", x.sign)));
            }
            for a in x.arcs {
                *use_count.entry(a).or_insert(0) += 1;
            }
        }
        for (a, c) in &use_count {
            if *c != 2 {
                return Err(DiagError::ArcUse(format!("arc {} appears {} times (want 2)", a, c)));
            }
        }
        let mut loops_sorted = free_loops.clone();
        loops_sorted.sort_unstable();
        loops_sorted.dedup();
        if loops_sorted.len() != free_loops.len() {
            return Err(DiagError::ArcUse("duplicate free loop label".into()));
        }
        for a in &loops_sorted {
            if use_count.contains_key(a) {
                return Err(DiagError::ArcUse(format!("free loop arc {} also used at a crossing", a)));
            }
        }

        // orientation: each arc has exactly one head and one tail slot
        let mut heads: BTreeMap<Arc, (usize, usize)> = BTreeMap::new();
        let mut tails: BTreeMap<Arc, (usize, usize)> = BTreeMap::new();
        for (ci, x) in crossings.iter().enumerate() {
            for s in x.head_slots() {
                let a = x.arcs[s];
                if heads.insert(a, (ci, s)).is_some() {
                    return Err(DiagError::Orientation(format!("arc {} flows into two crossings", a)));
                }
            }
            for s in x.tail_slots() {
                let a = x.arcs[s];
                if tails.insert(a, (ci, s)).is_some() {
                    return Err(DiagError::Orientation(format!("arc {} flows out of two crossings", a)));
                }
            }
        }
        for a in use_count.keys() {
            if !heads.contains_key(a) || !tails.contains_key(a) {
                return Err(DiagError::Orientation(format!(
                    "arc {} is not coherently oriented (check crossing signs)",
                    a
                )));
            }
        }

        // strand following: successor of arc a = arc leaving the crossing a flows into
        let successor = |a: Arc| -> Arc {
            let (ci, s) = heads[&a];
            let x = &crossings[ci];
            match (s, x.sign > 0) {
                (0, _) => x.arcs[2],          // under in -> under out
                (3, true) => x.arcs[1],       // over in -> over out (positive)
                (1, false) => x.arcs[3],      // over in -> over out (negative)
                _ => unreachable!("slot {} is not a head slot", s),
            }
        };
        let mut components: Vec<Vec<Arc>> = Vec::new();
        let mut seen: BTreeSet<Arc> = BTreeSet::new();
        for a in use_count.keys() {
            if seen.contains(a) {
                continue;
            }
            let mut cycle = vec![*a];
            seen.insert(*a);
            let mut cur = successor(*a);
            while cur != *a {
                cycle.push(cur);
                seen.insert(cur);
                cur = successor(cur);
            }
            components.push(cycle);
        }
        for a in &loops_sorted {
            components.push(vec![*a]);
        }
        for c in &mut components {
            let min_pos = c.iter().enumerate().min_by_key(|(_, a)| **a).unwrap().0;
            c.rotate_left(min_pos);
        }
        components.sort_by_key(|c| c[0]);

        let n_plus = crossings.iter().filter(|x| x.sign > 0).count();
        let n_minus = crossings.len() - n_plus;
        let mut arcs: Vec<Arc> = use_count.keys().copied().chain(loops_sorted.iter().copied()).collect();
        arcs.sort_unstable();

        let d = LinkDiagram { crossings, free_loops: loops_sorted, arcs, components, n_plus, n_minus };
        d.check_planar()?;
        Ok(d)
    }

    /// Euler-formula planarity check via the rotation system.
    fn check_planar(&self) -> Result<(), DiagError> {
        let n = self.n();
        if n == 0 {
            return Ok(());
        }
        // endpoint darts per arc
        let mut ends: BTreeMap<Arc, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, x) in self.crossings.iter().enumerate() {
            for (s, a) in x.arcs.iter().enumerate() {
                ends.entry(*a).or_default().push((ci, s));
            }
        }
        let other_end = |ci: usize, s: usize| -> (usize, usize) {
            let a = self.crossings[ci].arcs[s];
            let e = &ends[&a];
            if e[0] == (ci, s) {
                e[1]
            } else {
                e[0]
            }
        };
        // trace faces: arrive at (c,s), leave via (s+1) mod 4, hop the arc
        let mut visited = vec![false; 4 * n];
        let mut faces = 0usize;
        for start in 0..4 * n {
            if visited[start] {
                continue;
            }
            faces += 1;
            let mut cur = start;
            while !visited[cur] {
                visited[cur] = true;
                let (ci, s) = (cur / 4, cur % 4);
                let leave = (s + 1) % 4;
                let (cj, t) = other_end(ci, leave);
                cur = 4 * cj + t;
            }
        }
        // connected components of the crossing graph
        let mut uf = UnionFind::new(n);
        for e in ends.values() {
            uf.union(e[0].0, e[1].0);
        }
        let cc = (0..n).filter(|i| uf.find(*i) == *i).count();
        // each crossing-connected component traces the faces of its own
        // sphere, so a planar rotation system has n + 2 cc orbits in total
        if faces != n + 2 * cc {
            return Err(DiagError::NonPlanar(format!("face count {} != {}", faces, n + 2 * cc)));
        }
        Ok(())
    }

    /// Parse the PD file format: `pd <n>` header, `x <a> <b> <c> <d> <sign>`
    /// lines, optional `component <a>[,<b>,...]` lines. `#` starts a comment.
    pub fn parse_pd(text: &str) -> Result<Self, DiagError> {
        let mut crossings = Vec::new();
        let mut free_loops = Vec::new();
        let mut declared: Vec<Vec<Arc>> = Vec::new();
        let mut header: Option<usize> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let at = |m: &str| DiagError::Parse(format!("line {}: {}", lineno + 1, m));
            match toks[0] {
                "pd" => {
                    if toks.len() != 2 {
                        return Err(at("want: pd <n_crossings>"));
                    }
                    header = Some(toks[1].parse().map_err(|_| at("bad crossing count"))?);
                }
                "x" => {
                    if toks.len() != 6 {
                        return Err(at("want: x <a> <b> <c> <d> <sign>"));
                    }
                    let mut arcs = [0u32; 4];
                    for i in 0..4 {
                        arcs[i] = toks[i + 1].parse().map_err(|_| at("bad arc label"))?;
                    }
                    let sign = match toks[5] {
                        "+" | "+1" | "1" => 1,
                        "-" | "-1" => -1,
                        other => return Err(at(&format!("bad sign {:?}", other))),
                    };
                    crossings.push(Crossing { arcs, sign });
                }
                "component" => {
                    if toks.len() != 2 {
                        return Err(at("want: component <a>[,<b>,...]"));
                    }
                    let arcs: Result<Vec<Arc>, _> = toks[1].split(',').map(|t| t.parse()).collect();
                    declared.push(arcs.map_err(|_| at("bad arc label"))?);
                }
                other => return Err(at(&format!("unknown directive {:?}", other))),
            }
        }
        if let Some(h) = header {
            if h != crossings.len() {
                return Err(DiagError::Parse(format!(
                    "header says {} crossings, found {}",
                    h,
                    crossings.len()
                )));
            }
        }
        // free loops: declared components not appearing at any crossing
        let used: BTreeSet<Arc> = crossings.iter().flat_map(|x| x.arcs).collect();
        for comp in &declared {
            if comp.len() == 1 && !used.contains(&comp[0]) {
                free_loops.push(comp[0]);
            }
        }
        let d = Self::new(crossings, free_loops)?;
        // declared multi-arc components must match computed ones
        for comp in &declared {
            if comp.len() > 1 {
                let mut sorted = comp.clone();
                sorted.sort_unstable();
                if !d.components.iter().any(|c| {
                    let mut cs = c.clone();
                    cs.sort_unstable();
                    cs == sorted
                }) {
                    return Err(DiagError::Parse(format!("declared component {:?} does not match", comp)));
                }
            }
        }
        Ok(d)
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("pd {}\n", self.n());
        for x in &self.crossings {
            out.push_str(&format!(
                "x {} {} {} {} {}\n",
                x.arcs[0],
                x.arcs[1],
                x.arcs[2],
                x.arcs[3],
                if x.sign > 0 { "+1" } else { "-1" }
            ));
        }
        for a in &self.free_loops {
            out.push_str(&format!("component {}\n", a));
        }
        out
    }

    /// Closure of a braid word. Positive letter k crosses strands k, k+1
    /// with a positive crossing; crossing order is word order.
    pub fn from_braid(word: &[i32], strands: usize) -> Result<Self, DiagError> {
        if strands == 0 {
            return Err(DiagError::Braid("need at least one strand".into()));
        }
        for w in word {
            let k = w.unsigned_abs() as usize;
            if k == 0 || k >= strands {
                return Err(DiagError::Braid(format!("letter {} out of range for {} strands", w, strands)));
            }
        }
        let mut cur: Vec<Arc> = (1..=strands as Arc).collect();
        let mut next_arc = strands as Arc + 1;
        let mut crossings = Vec::new();
        for w in word {
            let k = w.unsigned_abs() as usize - 1; // 0-based left position
            let (o1, o2) = (next_arc, next_arc + 1);
            next_arc += 2;
            let (i1, i2) = (cur[k], cur[k + 1]);
            if *w > 0 {
                crossings.push(Crossing { arcs: [i1, o1, o2, i2], sign: 1 });
            } else {
                crossings.push(Crossing { arcs: [i2, i1, o1, o2], sign: -1 });
            }
            cur[k] = o1;
            cur[k + 1] = o2;
        }
        // closure: identify the final arc at each position with the initial one
        let mut rename: BTreeMap<Arc, Arc> = BTreeMap::new();
        for (p, a) in cur.iter().enumerate() {
            rename.insert(*a, p as Arc + 1);
        }
        for x in &mut crossings {
            for a in &mut x.arcs {
                if let Some(r) = rename.get(a) {
                    *a = *r;
                }
            }
        }
        // canonical labels 1..m by first appearance; untouched strands = free loops
        let mut canon: BTreeMap<Arc, Arc> = BTreeMap::new();
        let mut m = 0;
        for x in &crossings {
            for a in x.arcs {
                canon.entry(a).or_insert_with(|| {
                    m += 1;
                    m
                });
            }
        }
        for x in &mut crossings {
            for a in &mut x.arcs {
                *a = canon[a];
            }
        }
        // a strand position with no crossings keeps its initial id: free loop
        let mut free_loops = Vec::new();
        let mut next = m + 1;
        for p in 0..strands {
            if cur[p] == p as Arc + 1 {
                free_loops.push(next);
                next += 1;
            }
        }
        Self::new(crossings, free_loops)
    }

    pub fn mirror(&self) -> Self {
        let crossings = self
            .crossings
            .iter()
            .map(|x| Crossing { arcs: [x.arcs[0], x.arcs[3], x.arcs[2], x.arcs[1]], sign: -x.sign })
            .collect();
        Self::new(crossings, self.free_loops.clone()).expect("mirror of a valid diagram is valid")
    }

    fn arc_index(&self) -> BTreeMap<Arc, usize> {
        self.arcs.iter().enumerate().map(|(i, a)| (*a, i)).collect()
    }

    /// Resolve every crossing per the vertex bits (bit i = crossing i).
    pub fn resolve(&self, vertex: u32) -> Smoothing {
        let idx = self.arc_index();
        let mut uf = UnionFind::new(self.arcs.len());
        for (ci, x) in self.crossings.iter().enumerate() {
            let r = (vertex >> ci) & 1;
            let (p1, p2) = if r == 0 { ((0, 1), (2, 3)) } else { ((0, 3), (1, 2)) };
            uf.union(idx[&x.arcs[p1.0]], idx[&x.arcs[p1.1]]);
            uf.union(idx[&x.arcs[p2.0]], idx[&x.arcs[p2.1]]);
        }
        let mut groups: BTreeMap<usize, Vec<Arc>> = BTreeMap::new();
        for (i, a) in self.arcs.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().push(*a);
        }
        let mut circles: Vec<Vec<Arc>> = groups.into_values().collect();
        for c in &mut circles {
            c.sort_unstable();
        }
        circles.sort_by_key(|c| c[0]);
        Smoothing { vertex, circles }
    }

    pub fn circle_count(&self, vertex: u32) -> usize {
        self.resolve(vertex).circle_count()
    }

    /// Circle correspondence data for the edge switching crossing `i` from 0 to 1.
    pub fn edge_data(&self, vertex: u32, i: usize) -> EdgeData {
        assert_eq!((vertex >> i) & 1, 0, "crossing {} already 1-resolved", i);
        let src = self.resolve(vertex);
        let tgt = self.resolve(vertex | (1 << i));
        let x = &self.crossings[i];
        // source circles touched by the switch: those through the crossing's arcs
        let c1 = src.circle_of(x.arcs[0]);
        let c2 = src.circle_of(x.arcs[2]);
        let mut untouched = Vec::new();
        for (si, circle) in src.circles.iter().enumerate() {
            if si == c1 || si == c2 {
                continue;
            }
            untouched.push((si, tgt.circle_of(circle[0])));
        }
        if c1 != c2 {
            let t = tgt.circle_of(x.arcs[0]);
            debug_assert_eq!(t, tgt.circle_of(x.arcs[2]));
            EdgeData { kind: EdgeKind::Merge, merge: Some(((c1, c2), t)), split: None, untouched }
        } else {
            let mut tgts: Vec<usize> = src.circles[c1].iter().map(|a| tgt.circle_of(*a)).collect();
            tgts.sort_unstable();
            tgts.dedup();
            assert_eq!(tgts.len(), 2, "split must produce two circles");
            EdgeData { kind: EdgeKind::Split, merge: None, split: Some((c1, (tgts[0], tgts[1]))), untouched }
        }
    }

    /// The vertex with 0 at positive crossings and 1 at negative ones.
    pub fn oriented_resolution(&self) -> u32 {
        let mut v = 0u32;
        for (i, x) in self.crossings.iter().enumerate() {
            if x.sign < 0 {
                v |= 1 << i;
            }
        }
        v
    }

    /// Kauffman state sum for the unnormalized Jones polynomial
    /// (unknot -> q + 1/q), matching the graded Euler characteristic of the
    /// Khovanov complex. Independent of the complex machinery.
    pub fn kauffman_jones(&self) -> Laurent {
        let n = self.n();
        assert!(n <= 26, "state sum limited to 26 crossings");
        let shift = self.n_plus as i64 - 2 * self.n_minus as i64;
        let mut total = Laurent::zero();
        let circle = Laurent::circle();
        for v in 0u32..(1 << n) {
            let w = v.count_ones() as i64;
            // free loops are already counted by resolve()
            let c = self.circle_count(v) as u32;
            let sign = if (w - self.n_minus as i64) % 2 == 0 { 1 } else { -1 };
            let mono = Laurent::monomial(w + shift, sign);
            total = &total + &(&mono * &circle.pow(c));
        }
        total
    }
}


/// An unoriented crossing: arc labels counterclockwise with the convention
/// that slots 0 and 2 carry the under-strand.
pub type ProtoCrossing = [Arc; 4];

impl LinkDiagram {
    /// Orient an unoriented diagram: choose a direction for every component,
    /// rotate each crossing so slot 0 is the incoming under-strand, and set
    /// signs from the over-strand direction.
    pub fn from_unoriented(protos: &[ProtoCrossing], free_loops: Vec<Arc>) -> Result<Self, DiagError> {
        // endpoints of each arc: (crossing, slot)
        let mut ends: BTreeMap<Arc, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, p) in protos.iter().enumerate() {
            for (s, a) in p.iter().enumerate() {
                ends.entry(*a).or_default().push((ci, s));
            }
        }
        for (a, e) in &ends {
            if e.len() != 2 {
                return Err(DiagError::ArcUse(format!("arc {} appears {} times", a, e.len())));
            }
        }
        // walk the underlying curve: through a crossing, slot s connects to
        // slot (s+2) mod 4
        let mut direction: BTreeMap<Arc, (usize, usize)> = BTreeMap::new(); // arc -> chosen head endpoint
        let mut assigned: BTreeSet<Arc> = BTreeSet::new();
        for start in ends.keys().copied().collect::<Vec<_>>() {
            if assigned.contains(&start) {
                continue;
            }
            // orient the component of `start`: declare its head and walk
            let mut arc = start;
            let mut head = ends[&start][1];
            loop {
                direction.insert(arc, head);
                assigned.insert(arc);
                let (ci, s) = head;
                let out_slot = (s + 2) % 4;
                let next_arc = protos[ci][out_slot];
                if next_arc == start {
                    break;
                }
                let e = &ends[&next_arc];
                head = if e[0] == (ci, out_slot) { e[1] } else { e[0] };
                arc = next_arc;
            }
        }
        // canonicalize each crossing
        let mut crossings = Vec::new();
        for (ci, p) in protos.iter().enumerate() {
            // under-strand occupies slots 0 and 2: incoming = the one that is
            // a head of its arc here
            let under_in = if direction[&p[0]] == (ci, 0) {
                0
            } else if direction[&p[2]] == (ci, 2) {
                2
            } else {
                return Err(DiagError::Orientation(format!("crossing {}: under-strand incoherent", ci + 1)));
            };
            let rot = |s: usize| p[(under_in + s) % 4];
            let arcs = [rot(0), rot(1), rot(2), rot(3)];
            // over strand at rotated slots 1, 3: sign + when slot 3 is incoming
            let over_slot3 = (under_in + 3) % 4;
            let sign = if direction[&p[over_slot3]] == (ci, over_slot3) { 1 } else { -1 };
            crossings.push(Crossing { arcs, sign });
        }
        Self::new(crossings, free_loops)
    }
}
