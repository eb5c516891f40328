//! Derived invariants: the transverse braid class, Lee-type generators in
//! Bar-Natan homology, the s-invariant, the H-torsion page profile, and the
//! ribbon-concordance doubling check.

use std::collections::BTreeMap;

use crate::algebra::{bn_f2h, Theory};
use crate::complex::{build_complex, Chain, ComplexError, Gen};
use crate::diagram::{Arc, DiagError, LinkDiagram};
use crate::movie::{induced_on_homology, movie_map, Move, Movie, MovieError, MovieOptions};
use crate::ring::{EucRing, F2Poly, F2};

#[derive(Debug)]
pub enum InvariantError {
    Diagram(DiagError),
    Complex(ComplexError),
    Movie(MovieError),
    NotAKnot(usize),
    TowerStructure(String),
    NotRibbon(String),
}

impl std::fmt::Display for InvariantError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InvariantError::Diagram(e) => write!(f, "{e}"),
            InvariantError::Complex(e) => write!(f, "{e}"),
            InvariantError::Movie(e) => write!(f, "{e}"),
            InvariantError::NotAKnot(n) => write!(f, "expected a knot, found {} components", n),
            InvariantError::TowerStructure(m) => write!(f, "tower structure violated: {m}"),
            InvariantError::NotRibbon(m) => write!(f, "not a ribbon movie: {m}"),
        }
    }
}

impl std::error::Error for InvariantError {}

impl From<DiagError> for InvariantError {
    fn from(e: DiagError) -> Self {
        InvariantError::Diagram(e)
    }
}
impl From<ComplexError> for InvariantError {
    fn from(e: ComplexError) -> Self {
        InvariantError::Complex(e)
    }
}
impl From<MovieError> for InvariantError {
    fn from(e: MovieError) -> Self {
        InvariantError::Movie(e)
    }
}

// ------------------------------------------------------- Plamenevskaya

/// The braided-smoothing class of a braid closure: the oriented resolution
/// with every circle labeled x.
pub struct Psi {
    pub diagram: LinkDiagram,
    pub gen: Gen,
    pub h: i64,
    pub q: i64,
    pub writhe: i64,
    pub strands: usize,
}

pub fn plamenevskaya(word: &[i32], strands: usize) -> Result<Psi, InvariantError> {
    let diagram = LinkDiagram::from_braid(word, strands)?;
    let vertex = diagram.oriented_resolution();
    let circles = diagram.resolve(vertex).circle_count();
    let gen = Gen { vertex, labels: (1u32 << circles) - 1 };
    let writhe = diagram.writhe();
    let h = vertex.count_ones() as i64 - diagram.n_minus as i64;
    // q = (0 - circles) + h + n+ - n-; braided smoothing circles = strands
    let q = -(circles as i64) + h + writhe;
    Ok(Psi { diagram, gen, h, q, writhe, strands })
}

impl Psi {
    pub fn certify_cycle<R: EucRing>(&self, theory: &Theory<R>) -> Result<bool, InvariantError> {
        let cx = build_complex(&self.diagram, theory)?;
        Ok(cx.is_cycle(self.gen))
    }

    pub fn nonzero_in_homology<R: EucRing>(&self, theory: &Theory<R>) -> Result<bool, InvariantError> {
        let cx = build_complex(&self.diagram, theory)?;
        let hom = cx.homology();
        let z = Chain::gen(self.gen);
        Ok(!hom.is_zero_class(&cx, &z).unwrap_or(true))
    }
}

// --------------------------------------------------- Lee-type generators

/// One Bar-Natan generator: the oriented resolution of a reorientation of
/// the link, circles alternately labeled x and y = x + H 1, expanded into
/// the {1, x} basis.
pub struct BnGenerator {
    /// components reversed relative to the diagram (never the first one)
    pub reversed: Vec<usize>,
    pub vertex: u32,
    /// circle -> true for a y-label
    pub y_pattern: Vec<bool>,
    pub chain: Chain<F2Poly>,
}

/// Lee-type cycle generators of the Bar-Natan complex, a pair for each
/// orientation class of the link. Every output is certified a cycle by
/// evaluating the differential; a failure is reported loudly.
pub fn bn_generators(d: &LinkDiagram) -> Result<Vec<BnGenerator>, InvariantError> {
    let cx = build_complex(d, &bn_f2h())?;
    let ncomp = d.components.len();
    let mut comp_of: BTreeMap<Arc, usize> = BTreeMap::new();
    for (ci, comp) in d.components.iter().enumerate() {
        for a in comp {
            comp_of.insert(*a, ci);
        }
    }
    let mut out = Vec::new();
    let classes = 1u32 << ncomp.saturating_sub(1).min(20);
    for subset in 0..classes {
        let reversed: Vec<usize> = (1..ncomp).filter(|k| (subset >> (k - 1)) & 1 == 1).collect();
        let rev = |a: Arc| -> bool { reversed.contains(&comp_of[&a]) };
        // reorientation flips a crossing sign iff exactly one strand reverses
        let mut vertex = 0u32;
        for (i, x) in d.crossings.iter().enumerate() {
            let under_rev = rev(x.arcs[0]);
            let over_arc = if x.sign > 0 { x.arcs[3] } else { x.arcs[1] };
            let over_rev = rev(over_arc);
            let sign = if under_rev != over_rev { -x.sign } else { x.sign };
            if sign < 0 {
                vertex |= 1 << i;
            }
        }
        let sm = d.resolve(vertex);
        let circles = sm.circle_count();
        // 2-color the circle adjacency graph; every crossing joins two
        // distinct circles that must take opposite labels
        let mut color: Vec<Option<bool>> = vec![None; circles];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); circles];
        for x in &d.crossings {
            let c1 = sm.circle_of(x.arcs[0]);
            let c2 = sm.circle_of(x.arcs[2]);
            if c1 == c2 {
                return Err(InvariantError::TowerStructure(
                    "oriented resolution joins a circle to itself".into(),
                ));
            }
            adj[c1].push(c2);
            adj[c2].push(c1);
        }
        for start in 0..circles {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(false);
            let mut stack = vec![start];
            while let Some(c) = stack.pop() {
                let mine = color[c].unwrap();
                for n in adj[c].clone() {
                    match color[n] {
                        None => {
                            color[n] = Some(!mine);
                            stack.push(n);
                        }
                        Some(v) if v == mine => {
                            return Err(InvariantError::TowerStructure(
                                "circle adjacency graph is not bipartite".into(),
                            ));
                        }
                        _ => {}
                    }
                }
            }
        }
        for flip in [false, true] {
            let y_pattern: Vec<bool> = color.iter().map(|c| c.unwrap() != flip).collect();
            let chain = expand_xy(vertex, &y_pattern);
            let dz = cx.d_chain(&chain);
            if !dz.is_zero() {
                return Err(InvariantError::TowerStructure("produced labeling is not a cycle".into()));
            }
            out.push(BnGenerator { reversed: reversed.clone(), vertex, y_pattern, chain });
        }
    }
    Ok(out)
}

/// Expand a labeling with x on plain circles and y = x + H 1 on flagged
/// circles into the {1, x} basis.
pub fn expand_xy(vertex: u32, y_pattern: &[bool]) -> Chain<F2Poly> {
    let mut chain = Chain::zero();
    let ys: Vec<usize> = y_pattern.iter().enumerate().filter(|(_, y)| **y).map(|(i, _)| i).collect();
    let all_x = (1u32 << y_pattern.len()) - 1;
    for mask in 0u32..(1 << ys.len()) {
        let mut labels = all_x;
        let mut hpow = 0usize;
        for (k, ci) in ys.iter().enumerate() {
            if (mask >> k) & 1 == 1 {
                labels &= !(1 << ci);
                hpow += 1;
            }
        }
        chain.add_term(Gen { vertex, labels }, F2Poly::h_pow(hpow));
    }
    chain
}

/// The difference-certificate class of a diagram: the oriented
/// resolution with an x/y 2-coloring on the circles touched by 0-resolution
/// arcs and the label 1 on untouched circles. Returns the two colorings;
/// both are certified cycles in the Bar-Natan complex.
pub fn theta_classes(d: &LinkDiagram) -> Result<[Chain<F2Poly>; 2], InvariantError> {
    let cx = build_complex(d, &bn_f2h())?;
    let vertex = d.oriented_resolution();
    let sm = d.resolve(vertex);
    let circles = sm.circle_count();
    let mut color: Vec<Option<bool>> = vec![None; circles];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); circles];
    for (i, x) in d.crossings.iter().enumerate() {
        if (vertex >> i) & 1 == 1 {
            continue; // only 0-resolved crossings leave resolution arcs
        }
        let c1 = sm.circle_of(x.arcs[0]);
        let c2 = sm.circle_of(x.arcs[2]);
        if c1 == c2 {
            return Err(InvariantError::TowerStructure("0-resolution arc joins a circle to itself".into()));
        }
        adj[c1].push(c2);
        adj[c2].push(c1);
    }
    for start in 0..circles {
        if color[start].is_some() || adj[start].is_empty() {
            continue;
        }
        color[start] = Some(false);
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            let mine = color[c].unwrap();
            for n in adj[c].clone() {
                match color[n] {
                    None => {
                        color[n] = Some(!mine);
                        stack.push(n);
                    }
                    Some(v) if v == mine => {
                        return Err(InvariantError::TowerStructure(
                            "touched circles are not 2-colorable".into(),
                        ));
                    }
                    _ => {}
                }
            }
        }
    }
    let mut out = Vec::new();
    for flip in [false, true] {
        // untouched circles keep the label 1; touched are x or y by color
        let x_mask: u32 = (0..circles)
            .filter(|c| color[*c] == Some(flip))
            .fold(0, |m, c| m | (1 << c));
        let y_circles: Vec<usize> = (0..circles).filter(|c| color[*c] == Some(!flip)).collect();
        let mut chain = Chain::zero();
        for mask in 0u32..(1 << y_circles.len()) {
            let mut labels = x_mask;
            let mut hpow = 0usize;
            for (k, ci) in y_circles.iter().enumerate() {
                if (mask >> k) & 1 == 1 {
                    hpow += 1; // the H 1 branch leaves the bit unset
                } else {
                    labels |= 1 << ci;
                }
            }
            chain.add_term(Gen { vertex, labels }, F2Poly::h_pow(hpow));
        }
        if !cx.d_chain(&chain).is_zero() {
            return Err(InvariantError::TowerStructure("theta candidate is not a cycle".into()));
        }
        out.push(chain);
    }
    Ok([out.remove(0), out.remove(0)])
}

// ------------------------------------------------------- s-invariant

/// The even integer locating the two free towers of a knot's Bar-Natan
/// homology at quantum gradings s -+ 1.
pub fn s_invariant(d: &LinkDiagram) -> Result<i64, InvariantError> {
    if d.components.len() != 1 {
        return Err(InvariantError::NotAKnot(d.components.len()));
    }
    let cx = build_complex(d, &bn_f2h())?;
    let block = cx.homology_at(0);
    let mut tower_q: Vec<i64> = block
        .hom
        .summands
        .iter()
        .enumerate()
        .filter(|(_, s)| s.order.is_none())
        .map(|(i, _)| block.summand_q[i])
        .collect();
    tower_q.sort_unstable();
    if tower_q.len() != 2 {
        return Err(InvariantError::TowerStructure(format!(
            "expected 2 free towers at h=0, found {}",
            tower_q.len()
        )));
    }
    let s = (tower_q[0] + tower_q[1]) / 2;
    if tower_q[1] - tower_q[0] != 2 || s % 2 != 0 {
        return Err(InvariantError::TowerStructure(format!("towers at q = {:?}", tower_q)));
    }
    Ok(s)
}

// ------------------------------------------------------ torsion profile

/// Page-by-page dimensions of the H-power spectral sequence, read off the
/// F2\[H\]-module structure: a summand F2\[H\]/H^k contributes to pages 1..k at
/// its anchor (h, q) and at (h-1, q-2k); free towers survive every page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionProfile {
    /// pages[r-1] holds the dimensions of page r
    pub pages: Vec<BTreeMap<(i64, i64), usize>>,
    pub stable_page: usize,
    pub total_stable_rank: usize,
}

pub fn torsion_profile(d: &LinkDiagram) -> Result<TorsionProfile, InvariantError> {
    let cx = build_complex(d, &bn_f2h())?;
    let hom = cx.homology();
    let mut towers: Vec<(i64, i64)> = Vec::new();
    let mut torsion: Vec<(i64, i64, usize)> = Vec::new();
    for (h, block) in &hom.blocks {
        for (i, s) in block.hom.summands.iter().enumerate() {
            let q = block.summand_q[i];
            match &s.order {
                None => towers.push((*h, q)),
                Some(o) => {
                    assert!(o.is_monomial(), "graded torsion order must be a monomial");
                    torsion.push((*h, q, o.degree().unwrap()));
                }
            }
        }
    }
    let max_k = torsion.iter().map(|(_, _, k)| *k).max().unwrap_or(0);
    let stable_page = max_k + 1;
    let mut pages = Vec::new();
    for r in 1..=stable_page {
        let mut page: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        for (h, q) in &towers {
            *page.entry((*h, *q)).or_insert(0) += 1;
        }
        for (h, q, k) in &torsion {
            if *k >= r {
                *page.entry((*h, *q)).or_insert(0) += 1;
                *page.entry((*h - 1, *q - 2 * *k as i64)).or_insert(0) += 1;
            }
        }
        pages.push(page);
    }
    let total_stable_rank = towers.len();
    Ok(TorsionProfile { pages, stable_page, total_stable_rank })
}

impl TorsionProfile {
    pub fn dim(&self, page: usize, h: i64, q: i64) -> usize {
        self.pages
            .get((page - 1).min(self.pages.len().saturating_sub(1)))
            .and_then(|p| p.get(&(h, q)).copied())
            .unwrap_or(0)
    }

    pub fn is_monotone(&self) -> bool {
        self.pages.windows(2).all(|w| {
            w[1].iter().all(|(k, v)| w[0].get(k).copied().unwrap_or(0) >= *v)
        })
    }
}

// ----------------------------------------------------- ribbon doubling

pub struct RibbonReport {
    pub doubled_chi: i64,
    pub map_is_identity: bool,
}

/// Verify that the double C-bar . C of a claimed ribbon concordance induces
/// the identity on homology over F2 (hence C induces an injection).
/// A ribbon movie may not contain deaths (no local maxima).
pub fn ribbon_double_check(c: &Movie, opts: MovieOptions) -> Result<RibbonReport, InvariantError> {
    for (k, m) in c.moves.iter().enumerate() {
        if matches!(m, Move::Death { .. }) {
            return Err(InvariantError::NotRibbon(format!("move {} is a death (local maximum)", k + 1)));
        }
    }
    let doubled = c.concat(&c.reverse())?;
    let theory: Theory<F2> = Theory::khovanov();
    let f = movie_map(&doubled, &theory, opts)?;
    let src_h = f.source.homology();
    let tgt_h = f.target.homology();
    let map = induced_on_homology(&f, &src_h, &tgt_h);
    Ok(RibbonReport { doubled_chi: doubled.chi(), map_is_identity: map.is_identity(&src_h) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{kh_f2, kh_z};

    #[test]
    fn psi_gradings_small_braids() {
        for (word, strands) in [(&[1i32, 1, 1][..], 2usize), (&[1, -2, 1, -2][..], 3), (&[-1, -1][..], 2)] {
            let psi = plamenevskaya(word, strands).unwrap();
            let w: i64 = word.iter().map(|x| x.signum() as i64).sum();
            assert_eq!(psi.h, 0);
            assert_eq!(psi.q, w - strands as i64);
            assert!(psi.certify_cycle(&kh_z()).unwrap());
            assert!(psi.certify_cycle(&kh_f2()).unwrap());
        }
    }

    #[test]
    fn psi_positive_trefoil_nonzero() {
        let psi = plamenevskaya(&[1, 1, 1], 2).unwrap();
        assert!(psi.nonzero_in_homology(&kh_f2()).unwrap());
        assert!(psi.nonzero_in_homology(&kh_z()).unwrap());
    }

    #[test]
    fn psi_quasipositive_cycle() {
        let psi = plamenevskaya(&[-2, -2, 1, 2, 2, 2, 1, -2, 1, 1], 3).unwrap();
        assert_eq!(psi.h, 0);
        assert_eq!(psi.q, 4 - 3);
        assert!(psi.certify_cycle(&kh_f2()).unwrap());
    }

    #[test]
    fn unknot_bn_generators() {
        let d = LinkDiagram::parse_pd("pd 0\ncomponent 1").unwrap();
        let gens = bn_generators(&d).unwrap();
        assert_eq!(gens.len(), 2);
        // x and y = x + H 1: one single-term chain and one two-term chain
        let sizes: Vec<usize> = gens.iter().map(|g| g.chain.0.len()).collect();
        assert!(sizes.contains(&1) && sizes.contains(&2));
    }

    #[test]
    fn trefoil_bn_generators_are_cycles() {
        let d = LinkDiagram::from_braid(&[1, 1, 1], 2).unwrap();
        let gens = bn_generators(&d).unwrap();
        assert_eq!(gens.len(), 2);
    }

    #[test]
    fn hopf_has_four_generators() {
        let d = LinkDiagram::from_braid(&[1, 1], 2).unwrap();
        let gens = bn_generators(&d).unwrap();
        assert_eq!(gens.len(), 4);
    }

    #[test]
    fn s_of_unknot_and_trefoils() {
        let u = LinkDiagram::parse_pd("pd 0\ncomponent 1").unwrap();
        assert_eq!(s_invariant(&u).unwrap(), 0);
        let t = LinkDiagram::from_braid(&[1, 1, 1], 2).unwrap();
        assert_eq!(s_invariant(&t).unwrap(), 2);
        assert_eq!(s_invariant(&t.mirror()).unwrap(), -2);
    }

    #[test]
    fn unknot_profile() {
        let u = LinkDiagram::parse_pd("pd 0\ncomponent 1").unwrap();
        let p = torsion_profile(&u).unwrap();
        assert_eq!(p.total_stable_rank, 2);
        assert_eq!(p.dim(1, 0, 1), 1);
        assert_eq!(p.dim(1, 0, -1), 1);
        assert!(p.is_monotone());
    }

    #[test]
    fn trefoil_profile_matches_f2_homology_on_page_one() {
        let t = LinkDiagram::from_braid(&[1, 1, 1], 2).unwrap();
        let p = torsion_profile(&t).unwrap();
        let f2 = build_complex(&t, &kh_f2()).unwrap().homology().module();
        for ((h, q), e) in &f2.entries {
            assert_eq!(p.dim(1, *h, *q), e.free, "page 1 vs Kh/F2 at ({h},{q})");
        }
        let page1_total: usize = p.pages[0].values().sum();
        assert_eq!(page1_total, f2.total_free_rank());
        assert!(p.is_monotone());
        assert_eq!(p.total_stable_rank, 2);
    }

    #[test]
    fn identity_concordance_is_ribbon_identity() {
        let text = "frame\npd 0\ncomponent 2\nr1- 1\nframe\npd 1\nx 2 1 1 2 -1\nr1- 1\nframe\npd 0\ncomponent 2\n";
        let m = Movie::parse(text).unwrap();
        let rep = ribbon_double_check(&m, MovieOptions::default()).unwrap();
        assert_eq!(rep.doubled_chi, 0);
        assert!(rep.map_is_identity);
    }

    #[test]
    fn death_movies_rejected_as_ribbon() {
        let text = "frame\npd 0\ncomponent 1\ncomponent 2\ndeath 2\nframe\npd 0\ncomponent 1\n";
        let m = Movie::parse(text).unwrap();
        match ribbon_double_check(&m, MovieOptions::default()) {
            Err(InvariantError::NotRibbon(_)) => {}
            _ => panic!("expected ribbon rejection"),
        }
    }
}
