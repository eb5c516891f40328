//! The bigraded chain complex of a diagram for a chosen theory, and its
//! homology as explicit bigraded modules with retained solvers.
//!
//! Generators are labeled smoothings: a cube vertex plus one label per
//! circle. Labels are packed as a bitmask indexed by the circle order of the
//! smoothing (bit set = label x). Gradings:
//!
//! ```text
//!   h = |v| - n_minus
//!   q = (#1-labels - #x-labels) + h + n_plus - n_minus   (deg H = -2)
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Display};

use crate::algebra::{Label, Theory, TheoryKind};
use crate::diagram::{Arc, LinkDiagram};
use crate::linalg::{block_homology, BlockHomology, Col, ColMat};
use crate::poly::Laurent;
use crate::ring::{prime_power_factors, EucRing, F2Poly, Int, Ring, F2};

/// A labeled smoothing: generator of the chain complex.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Gen {
    pub vertex: u32,
    /// bit i set = circle i carries the label x.
    pub labels: u32,
}

impl Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(v{:b};l{:b})", self.vertex, self.labels)
    }
}

/// Finitely supported sum of generators with ring coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Chain<R: Ring>(pub BTreeMap<Gen, R>);

impl<R: Ring> Chain<R> {
    pub fn zero() -> Self {
        Chain(BTreeMap::new())
    }
    pub fn gen(g: Gen) -> Self {
        let mut m = BTreeMap::new();
        m.insert(g, R::one());
        Chain(m)
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn add_term(&mut self, g: Gen, f: R) {
        if f.is_zero() {
            return;
        }
        match self.0.get_mut(&g) {
            Some(e) => {
                *e = e.add(&f);
                if e.is_zero() {
                    self.0.remove(&g);
                }
            }
            None => {
                self.0.insert(g, f);
            }
        }
    }
    pub fn add_scaled(&mut self, f: &R, other: &Chain<R>) {
        for (g, v) in &other.0 {
            self.add_term(*g, f.mul(v));
        }
    }
    pub fn scaled(&self, f: &R) -> Chain<R> {
        let mut out = Chain::zero();
        out.add_scaled(f, self);
        out
    }
    pub fn sub(&self, other: &Chain<R>) -> Chain<R> {
        let mut out = self.clone();
        out.add_scaled(&R::one().neg(), other);
        out
    }
}

/// Circle structure of one smoothing, in arc-index form.
#[derive(Clone, Debug)]
pub struct CircleMap {
    pub count: usize,
    /// arc index -> circle index (circles ordered by minimal arc).
    pub assign: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComplexError {
    Budget { needed: u128, budget: u128 },
    TooManyCrossings(usize),
    TooManyCircles(usize),
}

impl Display for ComplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexError::Budget { needed, budget } => write!(
                f,
                "complex needs {} generators, over the budget of {} (raise --budget to proceed)",
                needed, budget
            ),
            ComplexError::TooManyCrossings(n) => write!(f, "{} crossings exceed the 26-crossing limit", n),
            ComplexError::TooManyCircles(c) => write!(f, "{} circles exceed the 32-circle label limit", c),
        }
    }
}

impl std::error::Error for ComplexError {}

/// The chain complex of a diagram over a theory. Generators are enumerated
/// *per homological grading* on construction; differentials are computed on
/// demand and assembled into sparse blocks for homology.
pub struct GradedComplex<R: EucRing> {
    pub diagram: LinkDiagram,
    pub theory: Theory<R>,
    arc_index: BTreeMap<Arc, usize>,
    /// per-vertex circle structure (cached when the cube is small enough)
    maps: Option<Vec<CircleMap>>,
    /// generators grouped by homological grading, each group sorted
    pub gens_by_h: BTreeMap<i64, Vec<Gen>>,
    index: BTreeMap<Gen, usize>,
}

pub const DEFAULT_BUDGET: u128 = 1 << 26;
const MAP_CACHE_MAX_N: usize = 20;

impl<R: EucRing> GradedComplex<R> {
    pub fn build(diagram: LinkDiagram, theory: Theory<R>, budget: u128) -> Result<Self, ComplexError> {
        let n = diagram.n();
        if n > 26 {
            return Err(ComplexError::TooManyCrossings(n));
        }
        let arc_index: BTreeMap<Arc, usize> = diagram.arcs.iter().enumerate().map(|(i, a)| (*a, i)).collect();

        // budget pass: count generators without materializing them
        let mut needed: u128 = 0;
        for v in 0u32..(1u32 << n) {
            let c = circle_map_of(&diagram, &arc_index, v).count;
            if c > 32 {
                return Err(ComplexError::TooManyCircles(c));
            }
            needed = needed.saturating_add(1u128 << c);
            if needed > budget {
                return Err(ComplexError::Budget { needed, budget });
            }
        }

        let maps = if n <= MAP_CACHE_MAX_N {
            Some((0u32..(1u32 << n)).map(|v| circle_map_of(&diagram, &arc_index, v)).collect::<Vec<_>>())
        } else {
            None
        };

        let mut gens_by_h: BTreeMap<i64, Vec<Gen>> = BTreeMap::new();
        for v in 0u32..(1u32 << n) {
            let c = match &maps {
                Some(ms) => ms[v as usize].count,
                None => circle_map_of(&diagram, &arc_index, v).count,
            };
            let h = v.count_ones() as i64 - diagram.n_minus as i64;
            let group = gens_by_h.entry(h).or_default();
            for labels in 0u32..(1u32 << c) {
                group.push(Gen { vertex: v, labels });
            }
        }
        let mut index = BTreeMap::new();
        for gens in gens_by_h.values() {
            for (i, g) in gens.iter().enumerate() {
                index.insert(*g, i);
            }
        }

        let cx = GradedComplex { diagram, theory, arc_index, maps, gens_by_h, index };
        #[cfg(debug_assertions)]
        if n <= 8 {
            cx.verify_d_squared();
        }
        Ok(cx)
    }

    pub fn circle_map(&self, v: u32) -> CircleMap {
        match &self.maps {
            Some(ms) => ms[v as usize].clone(),
            None => circle_map_of(&self.diagram, &self.arc_index, v),
        }
    }

    pub fn circle_of_arc(&self, v: u32, arc: Arc) -> usize {
        let m = self.circle_map(v);
        m.assign[self.arc_index[&arc]] as usize
    }

    pub fn gen_count(&self) -> usize {
        self.gens_by_h.values().map(|v| v.len()).sum()
    }

    pub fn h_of(&self, g: Gen) -> i64 {
        g.vertex.count_ones() as i64 - self.diagram.n_minus as i64
    }

    pub fn q_of(&self, g: Gen) -> i64 {
        let c = self.circle_map(g.vertex).count as i64;
        let vm = g.labels.count_ones() as i64;
        (c - 2 * vm) + self.h_of(g) + self.diagram.n_plus as i64 - self.diagram.n_minus as i64
    }

    /// q-grading of a chain, None when inhomogeneous. Coefficient H-powers
    /// count with degree -2 each.
    pub fn chain_q(&self, z: &Chain<R>) -> Option<i64> {
        let mut q = None;
        for (g, f) in &z.0 {
            let fq = coeff_q_degree(f)?;
            let total = self.q_of(*g) + fq;
            match q {
                None => q = Some(total),
                Some(prev) if prev != total => return None,
                _ => {}
            }
        }
        q
    }

    pub fn label_of(&self, g: Gen, circle: usize) -> Label {
        if (g.labels >> circle) & 1 == 1 {
            Label::X
        } else {
            Label::One
        }
    }

    /// The cube differential applied to one generator.
    pub fn d_gen(&self, g: Gen) -> Chain<R> {
        let n = self.diagram.n();
        let src = self.circle_map(g.vertex);
        let mut out = Chain::zero();
        for i in 0..n {
            if (g.vertex >> i) & 1 == 1 {
                continue;
            }
            let sign_neg = (g.vertex & ((1u32 << i) - 1)).count_ones() % 2 == 1;
            let tv = g.vertex | (1 << i);
            let tgt = self.circle_map(tv);
            self.edge_apply(g, &src, tv, &tgt, i, sign_neg, &mut out);
        }
        out
    }

    fn edge_apply(
        &self,
        g: Gen,
        src: &CircleMap,
        tv: u32,
        tgt: &CircleMap,
        i: usize,
        sign_neg: bool,
        out: &mut Chain<R>,
    ) {
        let x = &self.diagram.crossings[i];
        let a0 = self.arc_index[&x.arcs[0]];
        let a1 = self.arc_index[&x.arcs[1]];
        let a2 = self.arc_index[&x.arcs[2]];
        let c1 = src.assign[a0] as usize;
        let c2 = src.assign[a2] as usize;

        // representative arc per source circle, for transporting labels
        let mut rep = vec![usize::MAX; src.count];
        for (ai, ci) in src.assign.iter().enumerate() {
            let ci = *ci as usize;
            if rep[ci] == usize::MAX {
                rep[ci] = ai;
            }
        }

        let transport = |skip1: usize, skip2: usize| -> u32 {
            let mut labels = 0u32;
            for (ci, r) in rep.iter().enumerate() {
                if ci == skip1 || ci == skip2 {
                    continue;
                }
                if (g.labels >> ci) & 1 == 1 {
                    labels |= 1 << tgt.assign[*r];
                }
            }
            labels
        };

        if c1 != c2 {
            // merge
            let tm = tgt.assign[a0] as usize;
            let base = transport(c1, c2);
            let (l1, l2) = (self.label_of(g, c1), self.label_of(g, c2));
            for (lab, coeff) in self.theory.mul(l1, l2) {
                let mut labels = base;
                if *lab == Label::X {
                    labels |= 1 << tm;
                }
                let f = if sign_neg { coeff.neg() } else { coeff.clone() };
                out.add_term(Gen { vertex: tv, labels }, f);
            }
        } else {
            // split: the two daughters contain arcs[0] and arcs[1]
            let t1 = tgt.assign[a0] as usize;
            let t2 = tgt.assign[a1] as usize;
            debug_assert_ne!(t1, t2, "split daughters must differ");
            let base = transport(c1, c1);
            let l = self.label_of(g, c1);
            for (la, lb, coeff) in self.theory.comul(l) {
                let mut labels = base;
                if *la == Label::X {
                    labels |= 1 << t1;
                }
                if *lb == Label::X {
                    labels |= 1 << t2;
                }
                let f = if sign_neg { coeff.neg() } else { coeff.clone() };
                out.add_term(Gen { vertex: tv, labels }, f);
            }
        }
    }

    pub fn d_chain(&self, z: &Chain<R>) -> Chain<R> {
        let mut out = Chain::zero();
        for (g, f) in &z.0 {
            out.add_scaled(f, &self.d_gen(*g));
        }
        out
    }

    /// Cycle test. For Khovanov theories a labeled smoothing is a cycle iff
    /// every 0-resolution, when switched, merges two x-labeled circles; the
    /// criterion fails for Bar-Natan, which falls back to applying d.
    pub fn is_cycle(&self, g: Gen) -> bool {
        assert!(self.index.contains_key(&g), "generator does not belong to this complex");
        if self.theory.kind == TheoryKind::Khovanov {
            let src = self.circle_map(g.vertex);
            for i in 0..self.diagram.n() {
                if (g.vertex >> i) & 1 == 1 {
                    continue;
                }
                let x = &self.diagram.crossings[i];
                let c1 = src.assign[self.arc_index[&x.arcs[0]]] as usize;
                let c2 = src.assign[self.arc_index[&x.arcs[2]]] as usize;
                if c1 == c2 {
                    return false; // split is never zero
                }
                if self.label_of(g, c1) != Label::X || self.label_of(g, c2) != Label::X {
                    return false;
                }
            }
            debug_assert!(self.d_gen(g).is_zero());
            true
        } else {
            self.d_gen(g).is_zero()
        }
    }

    pub fn verify_d_squared(&self) {
        for gens in self.gens_by_h.values() {
            for g in gens {
                let dd = self.d_chain(&self.d_gen(*g));
                assert!(dd.is_zero(), "d^2 != 0 at {}", g);
            }
        }
    }

    /// Graded Euler characteristic over the fraction field: the chain ranks
    /// alone, since free modules have no torsion correction.
    pub fn graded_euler(&self) -> Laurent {
        let mut p = Laurent::zero();
        for (h, gens) in &self.gens_by_h {
            let sign = if h.rem_euclid(2) == 0 { 1 } else { -1 };
            for g in gens {
                p.add_term(self.q_of(*g), sign);
            }
        }
        p
    }

    fn chain_to_col(&self, h: i64, z: &Chain<R>) -> Col<R> {
        let mut col = Col::new();
        for (g, f) in &z.0 {
            assert_eq!(self.h_of(*g), h, "chain not homogeneous in h");
            col.insert(self.index[g], f.clone());
        }
        col
    }

    fn block_matrix(&self, h: i64) -> ColMat<R> {
        let rows = self.gens_by_h.get(&(h + 1)).map_or(0, |v| v.len());
        let cols = match self.gens_by_h.get(&h) {
            Some(gens) => gens,
            None => return ColMat::zero(rows, 0),
        };
        let mut m = ColMat::zero(rows, cols.len());
        for (j, g) in cols.iter().enumerate() {
            for (tg, f) in self.d_gen(*g).0 {
                m.cols[j].insert(self.index[&tg], f);
            }
        }
        m
    }

    /// Full homology with retained solvers, one block per homological grading.
    pub fn homology(&self) -> ComplexHomology<R> {
        let hs: Vec<i64> = self.gens_by_h.keys().copied().collect();
        let mut blocks = BTreeMap::new();
        for h in hs {
            blocks.insert(h, self.homology_at(h));
        }
        ComplexHomology { blocks }
    }

    /// Homology at a single homological grading.
    pub fn homology_at(&self, h: i64) -> HBlock<R> {
        let d_out = self.block_matrix(h);
        let d_in = match self.gens_by_h.get(&(h - 1)) {
            Some(_) => self.block_matrix(h - 1),
            None => ColMat::zero(d_out.ncols(), 0),
        };
        let hom = block_homology(&d_out, &d_in);
        let gens = self.gens_by_h.get(&h).cloned().unwrap_or_default();
        let summand_q: Vec<i64> = hom
            .summands
            .iter()
            .map(|s| {
                let mut q = None;
                for (idx, f) in &s.chain {
                    let gq = self.q_of(gens[*idx]) + coeff_q_degree(f).expect("inhomogeneous coefficient");
                    match q {
                        None => q = Some(gq),
                        Some(prev) => assert_eq!(prev, gq, "inhomogeneous homology generator"),
                    }
                }
                q.expect("empty homology generator")
            })
            .collect();
        HBlock { h, gens, hom, summand_q }
    }
}

/// One homological grading of homology, with coordinates.
pub struct HBlock<R: EucRing> {
    pub h: i64,
    pub gens: Vec<Gen>,
    pub hom: BlockHomology<R>,
    pub summand_q: Vec<i64>,
}

impl<R: EucRing> HBlock<R> {
    pub fn chain_of_summand(&self, i: usize) -> Chain<R> {
        let mut z = Chain::zero();
        for (idx, f) in &self.hom.summands[i].chain {
            z.add_term(self.gens[*idx], f.clone());
        }
        z
    }
}

pub struct ComplexHomology<R: EucRing> {
    pub blocks: BTreeMap<i64, HBlock<R>>,
}

impl<R: EucRing> ComplexHomology<R> {
    /// Canonical bigraded module report.
    pub fn module(&self) -> HomologyModule {
        let mut entries: BTreeMap<(i64, i64), ModuleEntry> = BTreeMap::new();
        for (h, block) in &self.blocks {
            for (i, s) in block.hom.summands.iter().enumerate() {
                let q = block.summand_q[i];
                let e = entries.entry((*h, q)).or_default();
                match &s.order {
                    None => e.free += 1,
                    Some(d) => e.torsion.extend(torsion_orders_of(d)),
                }
            }
        }
        for e in entries.values_mut() {
            e.torsion.sort_unstable();
        }
        entries.retain(|_, e| e.free > 0 || !e.torsion.is_empty());
        HomologyModule { entries }
    }

    /// Coordinates of a cycle, per summand of its h-block. None if the input
    /// is not a cycle (or spans several h-gradings).
    pub fn coords(&self, cx: &GradedComplex<R>, z: &Chain<R>) -> Option<Vec<R>> {
        if z.is_zero() {
            return Some(Vec::new());
        }
        let h = cx.h_of(*z.0.keys().next().unwrap());
        if z.0.keys().any(|g| cx.h_of(*g) != h) {
            return None;
        }
        let block = self.blocks.get(&h)?;
        block.hom.coords(&cx.chain_to_col(h, z))
    }

    pub fn is_zero_class(&self, cx: &GradedComplex<R>, z: &Chain<R>) -> Option<bool> {
        self.coords(cx, z).map(|c| c.iter().all(|v| v.is_zero()))
    }
}

/// Ring-erased canonical form of a bigraded module: free ranks plus torsion
/// orders (prime powers over Z, H-exponents over F2\[H\]).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HomologyModule {
    pub entries: BTreeMap<(i64, i64), ModuleEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ModuleEntry {
    pub free: usize,
    pub torsion: Vec<u128>,
}

impl HomologyModule {
    pub fn total_free_rank(&self) -> usize {
        self.entries.values().map(|e| e.free).sum()
    }
}

impl Display for HomologyModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((h, q), e) in &self.entries {
            write!(f, "h={:3} q={:3}: ", h, q)?;
            let mut parts = Vec::new();
            if e.free > 0 {
                parts.push(if e.free == 1 { "free".to_string() } else { format!("free^{}", e.free) });
            }
            for t in &e.torsion {
                parts.push(format!("t{}", t));
            }
            writeln!(f, "{}", parts.join(" + "))?;
        }
        Ok(())
    }
}

/// Torsion order of one diagonal entry, as canonical integers: prime powers
/// for Int, the exponent k of H^k for F2\[H\], the norm otherwise.
pub fn torsion_orders_of<R: EucRing>(d: &R) -> Vec<u128> {
    use std::any::Any;
    let any = d as &dyn Any;
    if let Some(i) = any.downcast_ref::<Int>() {
        return prime_power_factors(i.0.unsigned_abs());
    }
    if let Some(p) = any.downcast_ref::<F2Poly>() {
        assert!(p.is_monomial(), "graded torsion order must be a monomial, got {}", p);
        return vec![p.degree().unwrap() as u128];
    }
    vec![d.norm()]
}

/// q-degree carried by a coefficient: 0 for integers, -2k for H^k. None for
/// inhomogeneous polynomials.
pub fn coeff_q_degree<R: EucRing>(f: &R) -> Option<i64> {
    use std::any::Any;
    if f.is_zero() {
        return Some(0);
    }
    let any = f as &dyn Any;
    if let Some(p) = any.downcast_ref::<F2Poly>() {
        if !p.is_monomial() {
            return None;
        }
        return Some(-2 * p.degree().unwrap() as i64);
    }
    Some(0)
}

fn circle_map_of(diagram: &LinkDiagram, arc_index: &BTreeMap<Arc, usize>, v: u32) -> CircleMap {
    let n_arcs = diagram.arcs.len();
    let mut parent: Vec<usize> = (0..n_arcs).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (ci, x) in diagram.crossings.iter().enumerate() {
        let r = (v >> ci) & 1;
        let pairs = if r == 0 { [(0, 1), (2, 3)] } else { [(0, 3), (1, 2)] };
        for (s, t) in pairs {
            let a = find(&mut parent, arc_index[&x.arcs[s]]);
            let b = find(&mut parent, arc_index[&x.arcs[t]]);
            if a != b {
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
        }
    }
    // roots in increasing order = circles ordered by minimal arc
    let mut assign = vec![0u8; n_arcs];
    let mut order: BTreeMap<usize, u8> = BTreeMap::new();
    for i in 0..n_arcs {
        let r = find(&mut parent, i);
        let next = order.len() as u8;
        let id = *order.entry(r).or_insert(next);
        assign[i] = id;
    }
    CircleMap { count: order.len(), assign }
}

/// Build a complex with the default generator budget.
pub fn build_complex<R: EucRing>(d: &LinkDiagram, t: &Theory<R>) -> Result<GradedComplex<R>, ComplexError> {
    GradedComplex::build(d.clone(), t.clone(), DEFAULT_BUDGET)
}

/// Homology of the dual (transposed) complex, with negated bigradings.
/// Matches the homology of the mirror diagram at the module level.
pub fn dual_homology<R: EucRing>(cx: &GradedComplex<R>) -> HomologyModule {
    // transposed blocks: d_dual at grading h is the transpose of d at -h-1
    let hs: Vec<i64> = cx.gens_by_h.keys().copied().collect();
    let transpose = |h: i64| -> ColMat<R> {
        // original d: C^h -> C^{h+1}; transpose: rows=|C^h|, cols=|C^{h+1}|
        let src = cx.gens_by_h.get(&h).cloned().unwrap_or_default();
        let tgt_len = cx.gens_by_h.get(&(h + 1)).map_or(0, |v| v.len());
        let mut m = ColMat::zero(src.len(), tgt_len);
        for (j, g) in src.iter().enumerate() {
            for (tg, f) in cx.d_gen(*g).0 {
                m.cols[cx.index[&tg]].insert(j, f);
            }
        }
        m
    };
    let mut entries: BTreeMap<(i64, i64), ModuleEntry> = BTreeMap::new();
    for h in &hs {
        // dual block at grading -h: d_out = transpose(d^{h-1}), d_in = transpose(d^{h})
        let d_out = transpose(h - 1);
        let d_in = transpose(*h);
        let hom = block_homology(&d_out, &d_in);
        let gens = cx.gens_by_h.get(h).cloned().unwrap_or_default();
        for s in &hom.summands {
            let mut q = None;
            for (idx, f) in &s.chain {
                let gq = -(cx.q_of(gens[*idx]) + coeff_q_degree(f).expect("inhomogeneous"));
                match q {
                    None => q = Some(gq),
                    Some(prev) => assert_eq!(prev, gq),
                }
            }
            let e = entries.entry((-h, q.unwrap())).or_default();
            match &s.order {
                None => e.free += 1,
                Some(d) => e.torsion.extend(torsion_orders_of(d)),
            }
        }
    }
    for e in entries.values_mut() {
        e.torsion.sort_unstable();
    }
    entries.retain(|_, e| e.free > 0 || !e.torsion.is_empty());
    HomologyModule { entries }
}

/// The H=0 reduction of a Bar-Natan complex: the F2 Khovanov complex on the
/// same generators, plus the generator-wise projection.
pub fn quotient_to_kh(cx: &GradedComplex<F2Poly>) -> (GradedComplex<F2>, impl Fn(&Chain<F2Poly>) -> Chain<F2>) {
    assert_eq!(cx.theory.kind, TheoryKind::BarNatan, "quotient_to_kh needs a Bar-Natan complex");
    let kh = GradedComplex::build(cx.diagram.clone(), Theory::<F2>::khovanov(), u128::MAX)
        .expect("same cube cannot exceed budget");
    let project = |z: &Chain<F2Poly>| -> Chain<F2> {
        let mut out = Chain::zero();
        for (g, f) in &z.0 {
            let constant = !f.is_zero() && f.0[0] & 1 == 1;
            if constant {
                out.add_term(*g, F2(true));
            }
        }
        out
    };
    (kh, project)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bn_f2h, kh_f2, kh_z};
    use crate::diagram::LinkDiagram;

    fn trefoil() -> LinkDiagram {
        LinkDiagram::from_braid(&[1, 1, 1], 2).unwrap()
    }

    fn module(entries: &[(i64, i64, usize, &[u128])]) -> HomologyModule {
        let mut m = HomologyModule::default();
        for (h, q, free, tors) in entries {
            m.entries.insert((*h, *q), ModuleEntry { free: *free, torsion: tors.to_vec() });
        }
        m
    }

    #[test]
    fn unknot_homology() {
        let d = LinkDiagram::parse_pd("pd 0\ncomponent 1").unwrap();
        let cx = build_complex(&d, &kh_z()).unwrap();
        assert_eq!(cx.gen_count(), 2);
        let m = cx.homology().module();
        assert_eq!(m, module(&[(0, -1, 1, &[]), (0, 1, 1, &[])]));
    }

    #[test]
    fn empty_link_homology() {
        let d = LinkDiagram::parse_pd("pd 0").unwrap();
        let cx = build_complex(&d, &kh_z()).unwrap();
        let m = cx.homology().module();
        assert_eq!(m, module(&[(0, 0, 1, &[])]));
    }

    #[test]
    fn trefoil_homology_z() {
        // brute-force cube reduction, cross-checked against the Jones oracle
        let d = trefoil();
        let cx = build_complex(&d, &kh_z()).unwrap();
        cx.verify_d_squared();
        let m = cx.homology().module();
        assert_eq!(
            m,
            module(&[(0, 1, 1, &[]), (0, 3, 1, &[]), (2, 5, 1, &[]), (3, 7, 0, &[2]), (3, 9, 1, &[])])
        );
    }

    #[test]
    fn trefoil_euler_matches_jones() {
        let d = trefoil();
        let cx = build_complex(&d, &kh_z()).unwrap();
        assert_eq!(cx.graded_euler(), d.kauffman_jones());
    }

    #[test]
    fn mirror_duality_trefoil() {
        let d = trefoil();
        let cx = build_complex(&d, &kh_z()).unwrap();
        let dual = dual_homology(&cx);
        let mcx = build_complex(&d.mirror(), &kh_z()).unwrap();
        assert_eq!(dual, mcx.homology().module());
    }

    #[test]
    fn double_dual_is_identity() {
        let d = trefoil();
        let cx = build_complex(&d, &kh_z()).unwrap();
        let dd = dual_homology(&build_complex(&d.mirror(), &kh_z()).unwrap());
        assert_eq!(dd, cx.homology().module());
    }

    #[test]
    fn cycle_criterion_matches_d() {
        let d = trefoil();
        let cx = build_complex(&d, &kh_z()).unwrap();
        for gens in cx.gens_by_h.values() {
            for g in gens {
                assert_eq!(cx.is_cycle(*g), cx.d_gen(*g).is_zero());
            }
        }
    }

    #[test]
    fn all_x_at_all_ones_is_cycle() {
        let d = trefoil();
        let cx = build_complex(&d, &kh_z()).unwrap();
        let v = 0b111;
        let c = cx.circle_map(v).count;
        let g = Gen { vertex: v, labels: (1 << c) - 1 };
        assert!(cx.is_cycle(g));
    }

    #[test]
    fn budget_guard() {
        let d = trefoil();
        match GradedComplex::build(d, kh_z(), 4) {
            Err(ComplexError::Budget { .. }) => {}
            other => panic!("expected budget error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn bn_trefoil_towers() {
        let d = trefoil();
        let cx = build_complex(&d, &bn_f2h()).unwrap();
        cx.verify_d_squared();
        let m = cx.homology().module();
        // two towers at h=0, q = s -+ 1 with s = 2, plus H-torsion
        assert_eq!(m.entries[&(0, 1)], ModuleEntry { free: 1, torsion: vec![] });
        assert_eq!(m.entries[&(0, 3)], ModuleEntry { free: 1, torsion: vec![] });
        assert_eq!(m.total_free_rank(), 2);
        assert_eq!(m.entries[&(3, 7)], ModuleEntry { free: 0, torsion: vec![1] });
        assert_eq!(m.entries[&(3, 9)], ModuleEntry { free: 0, torsion: vec![1] });
    }

    #[test]
    fn bn_quotient_commutes_with_d() {
        let d = trefoil();
        let bn = build_complex(&d, &bn_f2h()).unwrap();
        let (kh, project) = quotient_to_kh(&bn);
        for gens in bn.gens_by_h.values() {
            for g in gens {
                let lhs = project(&bn.d_gen(*g));
                let rhs = kh.d_chain(&project(&Chain::gen(*g)));
                assert_eq!(lhs, rhs);
            }
        }
        // H-multiples die
        let g = *bn.gens_by_h.values().next().unwrap().first().unwrap();
        let z = Chain::gen(g).scaled(&F2Poly::h());
        assert!(project(&z).is_zero());
    }

    #[test]
    fn f2_graded_euler_equals_jones() {
        let d = LinkDiagram::from_braid(&[1, 1], 2).unwrap(); // hopf
        let cx = build_complex(&d, &kh_f2()).unwrap();
        assert_eq!(cx.graded_euler(), d.kauffman_jones());
    }
}
