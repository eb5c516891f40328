//! Movies of link diagrams and the chain maps they induce.
//!
//! A movie is a sequence of frames (diagrams) joined by elementary moves.
//! Every move is validated combinatorially: the deterministic rewrite of the
//! move applied to one frame must reproduce the neighboring frame exactly.
//! Site arcs are named in the frame where they exist (the loop arc of a
//! kink, the two middle arcs of an R2 bigon); insertion or removal is
//! inferred by comparing crossing counts.
//!
//! Step maps follow the ornament calculus, with square = m.Delta the
//! genus-adding operator:
//!
//! ```text
//!   r1 insert (neg kink):  birth of a 1-labeled circle at the 1-resolution
//!   r1 remove (neg kink):  m(strand, loop) - square(strand).counit(loop)
//!   r1 insert (pos kink):  Delta(strand) - square(strand) (x) 1
//!   r1 remove (pos kink):  strand . counit(loop), from the 0-resolution
//!   r2 insert:  identity into the oriented smoothing
//!               + (saddle (x) 1-labeled circle) into the disoriented one
//!   r2 remove:  identity from the oriented smoothing
//!               - counit(circle) . saddle from the disoriented one
//! ```
//!
//! all transported by Koszul signs for the positions of the affected
//! crossings in the cube.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Display};

use crate::algebra::{Label, Theory};
use crate::complex::{Chain, ComplexError, Gen, GradedComplex, DEFAULT_BUDGET};
use crate::diagram::{Arc, Crossing, DiagError, LinkDiagram};
use crate::ring::EucRing;

#[derive(Debug)]
pub enum MovieError {
    Parse(String),
    Validate { step: usize, msg: String },
    Diagram(DiagError),
    Complex(ComplexError),
    R3Rejected { step: usize },
}

impl Display for MovieError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MovieError::Parse(m) => write!(f, "movie parse error: {m}"),
            MovieError::Validate { step, msg } => write!(f, "move {} invalid: {}", step + 1, msg),
            MovieError::Diagram(e) => write!(f, "{e}"),
            MovieError::Complex(e) => write!(f, "{e}"),
            MovieError::R3Rejected { step } => write!(
                f,
                "move {}: R3 rejected in strict mode (--allow-r3 attempts the cone construction)",
                step + 1
            ),
        }
    }
}

impl std::error::Error for MovieError {}

impl From<DiagError> for MovieError {
    fn from(e: DiagError) -> Self {
        MovieError::Diagram(e)
    }
}

impl From<ComplexError> for MovieError {
    fn from(e: ComplexError) -> Self {
        MovieError::Complex(e)
    }
}

/// A raw move as written in a movie file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveSpec {
    Birth { arc: Arc },
    Death { arc: Arc },
    Saddle { a: Arc, b: Arc },
    /// kink crossing sign; the arc is the kink loop in whichever frame has
    /// it; `side` is optional on insertions and validated when present
    R1 { sign: i8, arc: Arc, side: Option<char> },
    /// arcs are the bigon middles, over-strand middle first, in the frame
    /// that has them
    R2 { insert: bool, over: Arc, under: Arc },
    R3 { site: Vec<Arc> },
    Relabel { map: Vec<(Arc, Arc)> },
    Square { arc: Arc },
}

impl MoveSpec {
    pub fn line(&self) -> String {
        match self {
            MoveSpec::Birth { arc } => format!("birth {arc}"),
            MoveSpec::Death { arc } => format!("death {arc}"),
            MoveSpec::Saddle { a, b } => format!("saddle {a} {b}"),
            MoveSpec::R1 { sign, arc, side } => {
                let kw = if *sign > 0 { "r1+" } else { "r1-" };
                match side {
                    Some(s) => format!("{kw} {arc} {s}"),
                    None => format!("{kw} {arc}"),
                }
            }
            MoveSpec::R2 { insert, over, under } => {
                format!("{} {} {}", if *insert { "r2+" } else { "r2-" }, over, under)
            }
            MoveSpec::R3 { site } => {
                let s: Vec<String> = site.iter().map(|a| a.to_string()).collect();
                format!("r3 {}", s.join(" "))
            }
            MoveSpec::Relabel { map } => {
                let s: Vec<String> = map.iter().map(|(a, b)| format!("{a}={b}")).collect();
                format!("relabel {}", s.join(","))
            }
            MoveSpec::Square { arc } => format!("square {arc}"),
        }
    }
}

/// A validated move with resolved site data for the step maps.
#[derive(Clone, Debug)]
pub enum Move {
    Birth { arc: Arc },
    Death { arc: Arc },
    Saddle { a: Arc, b: Arc, new_loop: Option<Arc> },
    /// pos: kink crossing index in the kinked frame; strand: an arc of the
    /// kink's strand present in both frames; loop_arc: kinked frame only
    R1 { sign: i8, insert: bool, pos: usize, strand: Arc, loop_arc: Arc },
    /// positions and arcs of the bigon in the bigger frame; pu/py survive in
    /// both frames, su/sy are the strand continuations, x/y the middles.
    /// ring_bits are the resolutions at which x and y close into a circle
    /// (the oriented resolutions for an antiparallel bigon).
    R2 {
        insert: bool,
        pos: [usize; 2],
        ring_bits: [u32; 2],
        pu: Arc,
        py: Arc,
        su: Arc,
        sy: Arc,
        x: Arc,
        y: Arc,
    },
    R3Cone { iso0: CubeIso, iso1: CubeIso, pos_prev: usize, pos_next: usize },
    Relabel { map: BTreeMap<Arc, Arc> },
    Square { arc: Arc },
}

/// An isomorphism of cube complexes: a crossing bijection (prev crossing i
/// corresponds to next crossing `perm[i]`) plus an arc bijection.
#[derive(Clone, Debug)]
pub struct CubeIso {
    pub perm: Vec<usize>,
    pub arcs: BTreeMap<Arc, Arc>,
}

/// A validated movie.
#[derive(Clone, Debug)]
pub struct Movie {
    pub frames: Vec<LinkDiagram>,
    pub moves: Vec<Move>,
    pub specs: Vec<MoveSpec>,
}

impl Movie {
    /// births + deaths - saddles - 2 squares.
    pub fn chi(&self) -> i64 {
        let mut chi = 0i64;
        for m in &self.moves {
            match m {
                Move::Birth { .. } | Move::Death { .. } => chi += 1,
                Move::Saddle { .. } => chi -= 1,
                Move::Square { .. } => chi -= 2,
                _ => {}
            }
        }
        chi
    }

    pub fn source(&self) -> &LinkDiagram {
        self.frames.first().unwrap()
    }

    pub fn target(&self) -> &LinkDiagram {
        self.frames.last().unwrap()
    }

    pub fn parse(text: &str) -> Result<Movie, MovieError> {
        parse_movie_with(text, false)
    }

    pub fn concat(&self, then: &Movie) -> Result<Movie, MovieError> {
        if self.target() != then.source() {
            return Err(MovieError::Parse("concatenation endpoint mismatch".into()));
        }
        let mut frames = self.frames.clone();
        frames.extend_from_slice(&then.frames[1..]);
        let mut moves = self.moves.clone();
        moves.extend_from_slice(&then.moves);
        let mut specs = self.specs.clone();
        specs.extend_from_slice(&then.specs);
        Ok(Movie { frames, moves, specs })
    }

    /// The time-reversed mirror movie: frames mirrored and reversed, moves
    /// dualized (birth <-> death, kink signs flipped, r2 direction flipped).
    pub fn reverse_mirror(&self) -> Movie {
        self.reversed_with(true)
    }

    /// Time reversal without mirroring: the same surface read backwards,
    /// viewed as a cobordism from the old target to the old source.
    pub fn reverse(&self) -> Movie {
        self.reversed_with(false)
    }

    fn reversed_with(&self, mirror: bool) -> Movie {
        let frames: Vec<LinkDiagram> =
            self.frames.iter().rev().map(|f| if mirror { f.mirror() } else { f.clone() }).collect();
        let mut specs = Vec::new();
        for (k, m) in self.moves.iter().enumerate().rev() {
            let spec = match m {
                Move::Birth { arc } => MoveSpec::Death { arc: *arc },
                Move::Death { arc } => MoveSpec::Birth { arc: *arc },
                Move::Saddle { a, b, new_loop } => match new_loop {
                    Some(l) => MoveSpec::Saddle { a: *a, b: *l },
                    None => MoveSpec::Saddle { a: *a, b: *b },
                },
                Move::R1 { sign, loop_arc, .. } => {
                    let sign = if mirror { -sign } else { *sign };
                    MoveSpec::R1 { sign, arc: *loop_arc, side: None }
                }
                Move::R2 { insert, x, y, .. } => {
                    // a plane reflection keeps over-strands over
                    MoveSpec::R2 { insert: !insert, over: *y, under: *x }
                }
                Move::R3Cone { .. } => self.specs[k].clone(),
                Move::Relabel { map } => {
                    MoveSpec::Relabel { map: map.iter().map(|(a, b)| (*b, *a)).collect() }
                }
                Move::Square { arc } => MoveSpec::Square { arc: *arc },
            };
            specs.push(spec);
        }
        validate_movie(frames, specs, true).expect("reversal of a valid movie is valid")
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (i, f) in self.frames.iter().enumerate() {
            out.push_str("frame\n");
            out.push_str(&f.serialize());
            if i < self.specs.len() {
                out.push_str(&self.specs[i].line());
                out.push('\n');
            }
        }
        out
    }
}

pub fn parse_movie_with(text: &str, allow_r3: bool) -> Result<Movie, MovieError> {
    let move_keywords =
        ["birth", "death", "saddle", "r1+", "r1-", "r2+", "r2-", "r3", "relabel", "square"];
    let mut frames_text: Vec<String> = Vec::new();
    let mut specs: Vec<MoveSpec> = Vec::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let head = line.split_whitespace().next().unwrap();
        let err = |m: String| MovieError::Parse(format!("line {}: {}", lineno + 1, m));
        if head == "frame" {
            if let Some(c) = current.take() {
                frames_text.push(c);
            }
            current = Some(String::new());
        } else if move_keywords.contains(&head) {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let arc = |i: usize| -> Result<Arc, MovieError> {
                toks.get(i)
                    .ok_or_else(|| err(format!("{} needs more arguments", head)))?
                    .parse()
                    .map_err(|_| err("bad arc label".into()))
            };
            let spec = match head {
                "birth" => MoveSpec::Birth { arc: arc(1)? },
                "death" => MoveSpec::Death { arc: arc(1)? },
                "saddle" => MoveSpec::Saddle { a: arc(1)?, b: arc(2)? },
                "r1+" | "r1-" => {
                    let side = toks.get(2).map(|s| s.chars().next().unwrap());
                    MoveSpec::R1 { sign: if head == "r1+" { 1 } else { -1 }, arc: arc(1)?, side }
                }
                "r2+" | "r2-" => MoveSpec::R2 { insert: head == "r2+", over: arc(1)?, under: arc(2)? },
                "r3" => {
                    let site: Result<Vec<Arc>, _> = toks[1..].iter().map(|t| t.parse()).collect();
                    MoveSpec::R3 { site: site.map_err(|_| err("bad arc label".into()))? }
                }
                "relabel" => {
                    let mut map = Vec::new();
                    for part in toks[1..].join("").split(',') {
                        let mut it = part.split('=');
                        let a: Arc = it
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| err("bad relabel pair".into()))?;
                        let b: Arc = it
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| err("bad relabel pair".into()))?;
                        map.push((a, b));
                    }
                    MoveSpec::Relabel { map }
                }
                "square" => MoveSpec::Square { arc: arc(1)? },
                _ => unreachable!(),
            };
            match current.take() {
                Some(c) => frames_text.push(c),
                None => return Err(err("move before the first frame".into())),
            }
            specs.push(spec);
        } else {
            match &mut current {
                Some(c) => {
                    c.push_str(line);
                    c.push('\n');
                }
                None => return Err(err("PD text before the first frame".into())),
            }
        }
    }
    if let Some(c) = current.take() {
        frames_text.push(c);
    }
    if frames_text.len() != specs.len() + 1 {
        return Err(MovieError::Parse(format!(
            "{} frames with {} moves (want moves = frames - 1)",
            frames_text.len(),
            specs.len()
        )));
    }
    let mut frames = Vec::new();
    for t in &frames_text {
        frames.push(LinkDiagram::parse_pd(t)?);
    }
    validate_movie(frames, specs, allow_r3)
}

fn validate_movie(
    frames: Vec<LinkDiagram>,
    specs: Vec<MoveSpec>,
    allow_r3: bool,
) -> Result<Movie, MovieError> {
    let mut moves = Vec::new();
    for (k, spec) in specs.iter().enumerate() {
        moves.push(validate_move(&frames[k], &frames[k + 1], spec, k, allow_r3)?);
    }
    Ok(Movie { frames, moves, specs })
}

fn fail(step: usize, msg: impl Into<String>) -> MovieError {
    MovieError::Validate { step, msg: msg.into() }
}

fn validate_move(
    prev: &LinkDiagram,
    next: &LinkDiagram,
    spec: &MoveSpec,
    step: usize,
    allow_r3: bool,
) -> Result<Move, MovieError> {
    match spec {
        MoveSpec::Birth { arc } => {
            if prev.arcs.contains(arc) {
                return Err(fail(step, format!("birth arc {} already used", arc)));
            }
            let mut loops = prev.free_loops.clone();
            loops.push(*arc);
            let expect = LinkDiagram::new(prev.crossings.clone(), loops)?;
            if &expect != next {
                return Err(fail(step, "next frame does not match the birth"));
            }
            Ok(Move::Birth { arc: *arc })
        }
        MoveSpec::Death { arc } => {
            if !prev.free_loops.contains(arc) {
                return Err(fail(step, format!("death needs a crossingless circle, {} is not one", arc)));
            }
            let loops: Vec<Arc> = prev.free_loops.iter().copied().filter(|a| a != arc).collect();
            let expect = LinkDiagram::new(prev.crossings.clone(), loops)?;
            if &expect != next {
                return Err(fail(step, "next frame does not match the death"));
            }
            Ok(Move::Death { arc: *arc })
        }
        MoveSpec::Saddle { a, b } => {
            let (expect, new_loop) = apply_saddle(prev, *a, *b).map_err(|m| fail(step, m))?;
            if &expect != next {
                return Err(fail(step, "next frame does not match the saddle"));
            }
            Ok(Move::Saddle { a: *a, b: *b, new_loop })
        }
        MoveSpec::R1 { sign, arc, side } => {
            let insert = next.n() == prev.n() + 1;
            let (big, small) = if insert { (next, prev) } else { (prev, next) };
            if big.n() != small.n() + 1 {
                return Err(fail(step, "r1 frames must differ by exactly one crossing"));
            }
            let (data, reduced) = r1_remove(big, *arc).map_err(|m| fail(step, m))?;
            if &reduced != small {
                return Err(fail(step, "frames do not match the kink move"));
            }
            if data.sign != *sign {
                return Err(fail(step, format!("kink at {} has sign {}", arc, data.sign)));
            }
            if let Some(s) = side {
                if *s != data.side {
                    return Err(fail(step, format!("kink at {} lies on side {}", arc, data.side)));
                }
            }
            Ok(Move::R1 { sign: *sign, insert, pos: data.pos, strand: data.strand, loop_arc: *arc })
        }
        MoveSpec::R2 { insert, over, under } => {
            let (big, small) = if *insert { (next, prev) } else { (prev, next) };
            if big.n() != small.n() + 2 {
                return Err(fail(step, "r2 frames must differ by exactly two crossings"));
            }
            let (data, reduced) = r2_remove(big, *over, *under).map_err(|m| fail(step, m))?;
            if &reduced != small {
                return Err(fail(step, "frames do not match the r2 move"));
            }
            Ok(Move::R2 {
                insert: *insert,
                pos: data.pos,
                ring_bits: data.ring_bits,
                pu: data.pu,
                py: data.py,
                su: data.su,
                sy: data.sy,
                x: *under,
                y: *over,
            })
        }
        MoveSpec::R3 { site } => {
            if !allow_r3 {
                return Err(MovieError::R3Rejected { step });
            }
            r3_cone(prev, next, site, step)
        }
        MoveSpec::Relabel { map } => {
            let m: BTreeMap<Arc, Arc> = map.iter().copied().collect();
            let rename = |a: Arc| -> Arc { m.get(&a).copied().unwrap_or(a) };
            let crossings: Vec<Crossing> = prev
                .crossings
                .iter()
                .map(|x| Crossing {
                    arcs: [rename(x.arcs[0]), rename(x.arcs[1]), rename(x.arcs[2]), rename(x.arcs[3])],
                    sign: x.sign,
                })
                .collect();
            let loops: Vec<Arc> = prev.free_loops.iter().map(|a| rename(*a)).collect();
            let expect = LinkDiagram::new(crossings, loops)?;
            if &expect != next {
                return Err(fail(step, "next frame does not match the relabeling"));
            }
            Ok(Move::Relabel { map: m })
        }
        MoveSpec::Square { arc } => {
            if !prev.arcs.contains(arc) {
                return Err(fail(step, format!("square arc {} not in frame", arc)));
            }
            if prev != next {
                return Err(fail(step, "square move must keep the frame fixed"));
            }
            Ok(Move::Square { arc: *arc })
        }
    }
}

// ------------------------------------------------------------ rewrites

/// (heads, tails): where each arc flows in / out, as (crossing, slot).
fn endpoints(d: &LinkDiagram) -> (BTreeMap<Arc, (usize, usize)>, BTreeMap<Arc, (usize, usize)>) {
    let mut heads = BTreeMap::new();
    let mut tails = BTreeMap::new();
    for (ci, x) in d.crossings.iter().enumerate() {
        let (hs, ts) = if x.sign > 0 { ([0usize, 3], [1usize, 2]) } else { ([0usize, 1], [2usize, 3]) };
        for s in hs {
            heads.insert(x.arcs[s], (ci, s));
        }
        for s in ts {
            tails.insert(x.arcs[s], (ci, s));
        }
    }
    (heads, tails)
}

fn smallest_unused(d: &LinkDiagram) -> Arc {
    let mut a = 1;
    while d.arcs.binary_search(&a).is_ok() {
        a += 1;
    }
    a
}

/// Apply an oriented saddle between two arcs. Returns the rewritten diagram
/// and the label of a split-off crossingless circle, if any.
pub fn apply_saddle(d: &LinkDiagram, a: Arc, b: Arc) -> Result<(LinkDiagram, Option<Arc>), String> {
    if !d.arcs.contains(&a) || !d.arcs.contains(&b) {
        return Err(format!("saddle arcs {} {} must exist in the frame", a, b));
    }
    let a_loop = d.free_loops.contains(&a);
    let b_loop = d.free_loops.contains(&b);
    if a == b {
        // both feet on one arc: a crossingless circle splits off
        let fresh = smallest_unused(d);
        let mut loops = d.free_loops.clone();
        loops.push(fresh);
        return Ok((LinkDiagram::new(d.crossings.clone(), loops).map_err(|e| e.to_string())?, Some(fresh)));
    }
    if a_loop || b_loop {
        // a crossingless circle merges away (into the other arc's strand)
        let gone = if b_loop { b } else { a };
        let loops: Vec<Arc> = d.free_loops.iter().copied().filter(|x| *x != gone).collect();
        return Ok((LinkDiagram::new(d.crossings.clone(), loops).map_err(|e| e.to_string())?, None));
    }
    // generic resplice: a keeps its tail and takes b's head; b vice versa
    let (heads, _) = endpoints(d);
    let ha = heads[&a];
    let hb = heads[&b];
    let mut crossings = d.crossings.clone();
    crossings[hb.0].arcs[hb.1] = a;
    crossings[ha.0].arcs[ha.1] = b;
    Ok((LinkDiagram::new(crossings, d.free_loops.clone()).map_err(|e| e.to_string())?, None))
}

struct R1Data {
    pos: usize,
    sign: i8,
    strand: Arc,
    side: char,
}

/// Remove the kink whose loop arc is `l`.
fn r1_remove(d: &LinkDiagram, l: Arc) -> Result<(R1Data, LinkDiagram), String> {
    let pos = d
        .crossings
        .iter()
        .position(|x| x.arcs.iter().filter(|a| **a == l).count() == 2)
        .ok_or_else(|| format!("arc {} is not a kink loop", l))?;
    let x = d.crossings[pos];
    let slots: Vec<usize> = (0..4).filter(|s| x.arcs[*s] == l).collect();
    let (u, v, side) = match (slots[0], slots[1], x.sign > 0) {
        (0, 1, true) => (x.arcs[3], x.arcs[2], 'r'),
        (2, 3, true) => (x.arcs[0], x.arcs[1], 'l'),
        (1, 2, false) => (x.arcs[0], x.arcs[3], 'l'),
        (0, 3, false) => (x.arcs[1], x.arcs[2], 'r'),
        _ => return Err(format!("arc {} does not sit as a kink loop of crossing {}", l, pos + 1)),
    };
    let mut crossings = d.crossings.clone();
    crossings.remove(pos);
    let mut loops = d.free_loops.clone();
    if u == v {
        loops.push(u); // the kink was a one-crossing unknot component
    } else {
        for c in &mut crossings {
            for a in &mut c.arcs {
                if *a == v {
                    *a = u;
                }
            }
        }
    }
    let reduced = LinkDiagram::new(crossings, loops).map_err(|e| e.to_string())?;
    Ok((R1Data { pos, sign: x.sign, strand: u, side }, reduced))
}

struct R2Data {
    pos: [usize; 2],
    ring_bits: [u32; 2],
    pu: Arc,
    py: Arc,
    su: Arc,
    sy: Arc,
}

/// Remove the R2 bigon whose middle arcs are `y` (over at both crossings)
/// and `x` (under at both).
fn r2_remove(d: &LinkDiagram, y: Arc, x: Arc) -> Result<(R2Data, LinkDiagram), String> {
    let occ = |a: Arc| -> Vec<usize> {
        d.crossings.iter().enumerate().filter(|(_, c)| c.arcs.contains(&a)).map(|(i, _)| i).collect()
    };
    let cx = occ(x);
    let cy = occ(y);
    if cx.len() != 2 || cx != cy || cx[0] == cx[1] {
        return Err(format!("arcs {} {} do not span an r2 bigon", y, x));
    }
    let (i, j) = (cx[0], cx[1]);
    if d.crossings[i].sign + d.crossings[j].sign != 0 {
        return Err("r2 bigon crossings must have opposite signs".into());
    }
    let mut ring_bits = [0u32; 2];
    for (k, c) in [i, j].into_iter().enumerate() {
        let cr = &d.crossings[c];
        let xs: Vec<usize> = (0..4).filter(|s| cr.arcs[*s] == x).collect();
        let ys: Vec<usize> = (0..4).filter(|s| cr.arcs[*s] == y).collect();
        if xs.len() != 1 || ys.len() != 1 || xs[0] % 2 != 0 || ys[0] % 2 != 1 {
            return Err(format!("arcs {} (over) {} (under) are not the middles of a bigon", y, x));
        }
        // the resolution joining x to y at this crossing
        ring_bits[k] = if ys[0] == (xs[0] + 1) % 4 { 0 } else { 1 };
    }
    if ring_bits[0] + ring_bits[1] != 1 {
        return Err("bigon middles do not close into a circle at a middle vertex".into());
    }
    let (heads, tails) = endpoints(d);
    let x_tail_c = tails[&x].0;
    let x_head_c = heads[&x].0;
    let pu = d.crossings[x_tail_c].arcs[0];
    let su = d.crossings[x_head_c].arcs[2];
    let over_in = |c: usize| -> Arc {
        let cr = &d.crossings[c];
        if cr.sign > 0 {
            cr.arcs[3]
        } else {
            cr.arcs[1]
        }
    };
    let over_out = |c: usize| -> Arc {
        let cr = &d.crossings[c];
        if cr.sign > 0 {
            cr.arcs[1]
        } else {
            cr.arcs[3]
        }
    };
    let y_tail_c = tails[&y].0;
    let y_head_c = heads[&y].0;
    let py = over_in(y_tail_c);
    let sy = over_out(y_head_c);

    let mut crossings: Vec<Crossing> =
        d.crossings.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, c)| *c).collect();
    let mut loops = d.free_loops.clone();
    let mut subst: BTreeMap<Arc, Arc> = BTreeMap::new();
    if su == pu && sy == py {
        loops.push(pu);
        loops.push(py);
    } else if su == py && sy == pu {
        loops.push(pu.min(py));
    } else if su == pu {
        loops.push(pu);
        subst.insert(sy, py);
    } else if sy == py {
        loops.push(py);
        subst.insert(su, pu);
    } else if su == py {
        subst.insert(sy, pu);
    } else if sy == pu {
        subst.insert(su, py);
    } else {
        subst.insert(su, pu);
        subst.insert(sy, py);
    }
    for c in &mut crossings {
        for a in &mut c.arcs {
            if let Some(r) = subst.get(a) {
                *a = *r;
            }
        }
    }
    let reduced = LinkDiagram::new(crossings, loops).map_err(|e| e.to_string())?;
        let ring_bits = if i < j { ring_bits } else { [ring_bits[1], ring_bits[0]] };
    Ok((R2Data { pos: [i.min(j), i.max(j)], ring_bits, pu, py, su, sy }, reduced))
}

/// Attempt the R3 cone: the distinguished crossing is resolved both ways and
/// each pair of resolved frames must match by pure relabeling. Resolutions
/// are compared as unoriented diagrams, since the disoriented smoothing of
/// an oriented diagram carries no coherent orientation.
fn r3_cone(prev: &LinkDiagram, next: &LinkDiagram, site: &[Arc], step: usize) -> Result<Move, MovieError> {
    if prev.n() != next.n() {
        return Err(fail(step, "r3 frames must have equal crossing counts"));
    }
    let hits = |d: &LinkDiagram, i: usize| site.iter().filter(|a| d.crossings[i].arcs.contains(a)).count();
    let cand_prev: Vec<usize> = (0..prev.n()).filter(|i| hits(prev, *i) >= 2).collect();
    let cand_next: Vec<usize> = (0..next.n()).filter(|i| hits(next, *i) >= 2).collect();
    for pp in &cand_prev {
        for pn in &cand_next {
            if prev.crossings[*pp].sign != next.crossings[*pn].sign {
                continue;
            }
            let p0 = proto_resolve(prev, *pp, 0);
            let p1 = proto_resolve(prev, *pp, 1);
            let n0 = proto_resolve(next, *pn, 0);
            let n1 = proto_resolve(next, *pn, 1);
            let (Some(iso0), Some(iso1)) =
                (proto_isomorphism(&p0, &n0), proto_isomorphism(&p1, &n1))
            else {
                continue;
            };
            return Ok(Move::R3Cone { iso0, iso1, pos_prev: *pp, pos_next: *pn });
        }
    }
    Err(fail(step, "r3 cone: no relabel matching found for either resolution (configuration unsupported)"))
}

type ProtoDiagram = (Vec<[Arc; 4]>, Vec<Arc>);

/// Replace crossing `pos` by its `bit`-resolution, forgetting orientations.
fn proto_resolve(d: &LinkDiagram, pos: usize, bit: u8) -> ProtoDiagram {
    let x = d.crossings[pos];
    let pairs: [(usize, usize); 2] = if bit == 0 { [(0, 1), (2, 3)] } else { [(0, 3), (1, 2)] };
    let mut crossings: Vec<[Arc; 4]> =
        d.crossings.iter().enumerate().filter(|(i, _)| *i != pos).map(|(_, c)| c.arcs).collect();
    let mut loops = d.free_loops.clone();
    let mut subst: BTreeMap<Arc, Arc> = BTreeMap::new();
    for (s, t) in pairs {
        let (a, b) = (x.arcs[s], x.arcs[t]);
        if a == b {
            loops.push(a);
        } else {
            subst.insert(a.max(b), a.min(b));
        }
    }
    let resolve = |mut a: Arc, subst: &BTreeMap<Arc, Arc>| -> Arc {
        while let Some(n) = subst.get(&a) {
            if *n == a {
                break;
            }
            a = *n;
        }
        a
    };
    for c in &mut crossings {
        for a in c.iter_mut() {
            *a = resolve(*a, &subst);
        }
    }
    let mut loops: Vec<Arc> = loops.into_iter().map(|a| resolve(a, &subst)).collect();
    loops.sort_unstable();
    (crossings, loops)
}

/// Unoriented isomorphism of proto-diagrams: a crossing bijection matching
/// slots up to rotation by two (which preserves the under-strand and both
/// smoothing pairings), inducing an arc bijection.
fn proto_isomorphism(a: &ProtoDiagram, b: &ProtoDiagram) -> Option<CubeIso> {
    if a.0.len() != b.0.len() || a.1.len() != b.1.len() {
        return None;
    }
    fn bt(
        i: usize,
        a: &ProtoDiagram,
        b: &ProtoDiagram,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        arcs: &mut BTreeMap<Arc, Arc>,
    ) -> bool {
        let n = a.0.len();
        if i == n {
            let vals: BTreeSet<Arc> = arcs.values().copied().collect();
            if vals.len() != arcs.len() {
                return false;
            }
            // free loops must correspond to free loops
            let mut lb: Vec<Arc> = a.1.iter().map(|x| arcs.get(x).copied().unwrap_or(*x)).collect();
            lb.sort_unstable();
            return lb == b.1;
        }
        for j in 0..n {
            if used[j] {
                continue;
            }
            for rot in [0usize, 2] {
                let mut added: Vec<Arc> = Vec::new();
                let mut ok = true;
                for s in 0..4 {
                    let (x, y) = (a.0[i][s], b.0[j][(s + rot) % 4]);
                    match arcs.get(&x) {
                        Some(z) if *z != y => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            arcs.insert(x, y);
                            added.push(x);
                        }
                    }
                }
                if ok {
                    perm[i] = j;
                    used[j] = true;
                    if bt(i + 1, a, b, perm, used, arcs) {
                        return true;
                    }
                    used[j] = false;
                    perm[i] = usize::MAX;
                }
                for x in added {
                    arcs.remove(&x);
                }
            }
        }
        false
    }
    let n = a.0.len();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut arcs = BTreeMap::new();
    if bt(0, a, b, &mut perm, &mut used, &mut arcs) {
        // extend over loop labels for completeness
        for (x, y) in a.1.iter().zip(b.1.iter()) {
            arcs.entry(*x).or_insert(*y);
        }
        Some(CubeIso { perm, arcs })
    } else {
        None
    }
}

/// Apply a removal-direction R1 or R2 move spec, returning the reduced
/// diagram when the site matches.
pub fn apply_removal(d: &LinkDiagram, spec: &MoveSpec) -> Option<LinkDiagram> {
    match spec {
        MoveSpec::R1 { sign, arc, .. } => {
            let (data, reduced) = r1_remove(d, *arc).ok()?;
            if data.sign == *sign {
                Some(reduced)
            } else {
                None
            }
        }
        MoveSpec::R2 { insert: false, over, under } => {
            let (_, reduced) = r2_remove(d, *over, *under).ok()?;
            Some(reduced)
        }
        _ => None,
    }
}

/// Backtracking isomorphism between diagrams: a crossing bijection matching
/// slots and signs (slot 0 is canonical), inducing an arc bijection.
pub fn pd_isomorphism(a: &LinkDiagram, b: &LinkDiagram) -> Option<CubeIso> {
    if a.n() != b.n() || a.free_loops.len() != b.free_loops.len() {
        return None;
    }
    fn bt(
        i: usize,
        a: &LinkDiagram,
        b: &LinkDiagram,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        arcs: &mut BTreeMap<Arc, Arc>,
    ) -> bool {
        let n = a.n();
        if i == n {
            let vals: BTreeSet<Arc> = arcs.values().copied().collect();
            return vals.len() == arcs.len();
        }
        for j in 0..n {
            if used[j] || a.crossings[i].sign != b.crossings[j].sign {
                continue;
            }
            let mut added: Vec<Arc> = Vec::new();
            let mut ok = true;
            for s in 0..4 {
                let (x, y) = (a.crossings[i].arcs[s], b.crossings[j].arcs[s]);
                match arcs.get(&x) {
                    Some(z) if *z != y => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        arcs.insert(x, y);
                        added.push(x);
                    }
                }
            }
            if ok {
                perm[i] = j;
                used[j] = true;
                if bt(i + 1, a, b, perm, used, arcs) {
                    return true;
                }
                used[j] = false;
                perm[i] = usize::MAX;
            }
            for x in added {
                arcs.remove(&x);
            }
        }
        false
    }
    let n = a.n();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut arcs = BTreeMap::new();
    if bt(0, a, b, &mut perm, &mut used, &mut arcs) {
        Some(CubeIso { perm, arcs })
    } else {
        None
    }
}

// ------------------------------------------------ move constructors

/// Insert a kink of the given sign on an arc; the loop sits on side 'l' or
/// 'r'. Returns the rewritten diagram and the move line.
pub fn insert_kink(d: &LinkDiagram, on_arc: Arc, sign: i8, side: char) -> Result<(LinkDiagram, MoveSpec), String> {
    if !d.arcs.contains(&on_arc) {
        return Err(format!("arc {} not in diagram", on_arc));
    }
    let l = smallest_unused(d);
    let is_loop = d.free_loops.contains(&on_arc);
    let mut crossings = d.crossings.clone();
    let mut loops = d.free_loops.clone();
    let (w, v);
    if is_loop {
        loops.retain(|a| *a != on_arc);
        w = on_arc;
        v = on_arc;
    } else {
        w = on_arc;
        v = {
            // second fresh label
            let mut x = l + 1;
            while d.arcs.binary_search(&x).is_ok() {
                x += 1;
            }
            x
        };
        let (heads, _) = endpoints(d);
        let (ci, s) = heads[&on_arc];
        crossings[ci].arcs[s] = v;
    }
    let x = match (sign > 0, side) {
        (true, 'r') => Crossing { arcs: [l, l, v, w], sign: 1 },
        (true, 'l') => Crossing { arcs: [w, v, l, l], sign: 1 },
        (false, 'l') => Crossing { arcs: [w, l, l, v], sign: -1 },
        (false, 'r') => Crossing { arcs: [l, w, v, l], sign: -1 },
        _ => return Err(format!("bad side {:?}", side)),
    };
    crossings.push(x);
    let next = LinkDiagram::new(crossings, loops).map_err(|e| e.to_string())?;
    Ok((next, MoveSpec::R1 { sign, arc: l, side: None }))
}

/// Slide the strand of `over` across the strand of `under` (an R2
/// insertion). The two variants are the two relative orientations of the
/// bigon. Returns the rewritten diagram and the move line.
pub fn insert_r2(d: &LinkDiagram, over: Arc, under: Arc, variant: u8) -> Result<(LinkDiagram, MoveSpec), String> {
    if over == under {
        return Err("r2 insertion needs two distinct arcs".into());
    }
    if !d.arcs.contains(&over) || !d.arcs.contains(&under) {
        return Err("r2 arcs must exist".into());
    }
    let p = over;
    let q = under;
    // fresh labels p2, p3, q2, q3 (p3/q3 reuse the old label for free loops)
    let mut fresh = Vec::new();
    let mut cand = 1;
    while fresh.len() < 4 {
        if d.arcs.binary_search(&cand).is_err() {
            fresh.push(cand);
        }
        cand += 1;
    }
    let p_loop = d.free_loops.contains(&p);
    let q_loop = d.free_loops.contains(&q);
    let p2 = fresh[0];
    let q2 = fresh[1];
    let p3 = if p_loop { p } else { fresh[2] };
    let q3 = if q_loop { q } else { if p_loop { fresh[2] } else { fresh[3] } };
    let mut crossings = d.crossings.clone();
    let mut loops = d.free_loops.clone();
    let (heads, _) = endpoints(d);
    if p_loop {
        loops.retain(|a| *a != p);
    } else {
        let (ci, s) = heads[&p];
        crossings[ci].arcs[s] = p3;
    }
    if q_loop {
        loops.retain(|a| *a != q);
    } else {
        let (ci, s) = heads[&q];
        crossings[ci].arcs[s] = q3;
    }
    match variant {
        0 => {
            crossings.push(Crossing { arcs: [q, p2, q2, p], sign: 1 });
            crossings.push(Crossing { arcs: [q2, p2, q3, p3], sign: -1 });
        }
        1 => {
            // antiparallel strands: the over strand runs against the under
            crossings.push(Crossing { arcs: [q, p2, q2, p3], sign: -1 });
            crossings.push(Crossing { arcs: [q2, p2, q3, p], sign: 1 });
        }
        _ => return Err("variant must be 0 or 1".into()),
    }
    let next = LinkDiagram::new(crossings, loops).map_err(|e| e.to_string())?;
    Ok((next, MoveSpec::R2 { insert: true, over: p2, under: q2 }))
}

// ------------------------------------------------------------ step maps

/// Koszul sign for moving the cube coordinates at `positions` (bit values
/// from `vertex`) to the end of the crossing order.
fn koszul_sign(vertex: u32, n: usize, positions: &[usize]) -> i64 {
    let mut sign = 0u32;
    for &i in positions {
        if (vertex >> i) & 1 == 0 {
            continue;
        }
        for j in (i + 1)..n {
            if positions.contains(&j) {
                continue;
            }
            sign ^= (vertex >> j) & 1;
        }
    }
    if sign & 1 == 1 {
        -1
    } else {
        1
    }
}

fn insert_bit(v: u32, pos: usize, bit: u32) -> u32 {
    let low = v & ((1 << pos) - 1);
    let high = v >> pos;
    low | (bit << pos) | (high << (pos + 1))
}

fn insert_bits2(v: u32, pos: [usize; 2], bits: [u32; 2]) -> u32 {
    insert_bit(insert_bit(v, pos[0], bits[0]), pos[1], bits[1])
}

fn remove_bit(v: u32, pos: usize) -> u32 {
    let low = v & ((1 << pos) - 1);
    let high = v >> (pos + 1);
    low | (high << pos)
}

/// One elementary chain map between the complexes of consecutive frames.
pub struct StepMap<'a, R: EucRing> {
    pub prev: &'a GradedComplex<R>,
    pub next: &'a GradedComplex<R>,
    mv: &'a Move,
}

impl<'a, R: EucRing> StepMap<'a, R> {
    pub fn new(prev: &'a GradedComplex<R>, next: &'a GradedComplex<R>, mv: &'a Move) -> Self {
        StepMap { prev, next, mv }
    }

    /// Transport x-labels of non-skipped circles from a prev smoothing to a
    /// next smoothing. Each circle is located in the target by the first of
    /// its arcs that survives the move (optionally renamed).
    fn transport(
        &self,
        vp: u32,
        vn: u32,
        labels: u32,
        skip: &[usize],
        rename: &dyn Fn(Arc) -> Option<Arc>,
    ) -> u32 {
        let pm = self.prev.circle_map(vp);
        let mut out = 0u32;
        for ci in 0..pm.count {
            if skip.contains(&ci) || (labels >> ci) & 1 == 0 {
                continue;
            }
            let mut done = false;
            for (ai, c) in pm.assign.iter().enumerate() {
                if *c as usize != ci {
                    continue;
                }
                let arc = self.prev.diagram.arcs[ai];
                if let Some(na) = rename(arc) {
                    if self.next.diagram.arcs.binary_search(&na).is_ok() {
                        out |= 1 << self.next.circle_of_arc(vn, na);
                        done = true;
                        break;
                    }
                }
            }
            assert!(done, "no surviving arc to transport circle {}", ci);
        }
        out
    }

    fn transport_id(&self, vp: u32, vn: u32, labels: u32, skip: &[usize]) -> u32 {
        self.transport(vp, vn, labels, skip, &Some)
    }

    pub fn apply_gen(&self, g: Gen) -> Chain<R> {
        let th = &self.prev.theory;
        let n_prev = self.prev.diagram.n();
        let n_next = self.next.diagram.n();
        let mut out = Chain::zero();
        match self.mv {
            Move::Birth { .. } => {
                let labels = self.transport_id(g.vertex, g.vertex, g.labels, &[]);
                out.add_term(Gen { vertex: g.vertex, labels }, R::one());
            }
            Move::Death { arc } => {
                let c = self.prev.circle_of_arc(g.vertex, *arc);
                let coeff = th.counit(self.prev.label_of(g, c));
                if !coeff.is_zero() {
                    let labels = self.transport_id(g.vertex, g.vertex, g.labels, &[c]);
                    out.add_term(Gen { vertex: g.vertex, labels }, coeff);
                }
            }
            Move::Saddle { a, b, new_loop } => {
                let ca = self.prev.circle_of_arc(g.vertex, *a);
                let cb = self.prev.circle_of_arc(g.vertex, *b);
                if ca != cb {
                    let base = self.transport_id(g.vertex, g.vertex, g.labels, &[ca, cb]);
                    let tc = self.next.circle_of_arc(g.vertex, *a);
                    for (l, f) in th.mul(self.prev.label_of(g, ca), self.prev.label_of(g, cb)) {
                        let mut labels = base;
                        if *l == Label::X {
                            labels |= 1 << tc;
                        }
                        out.add_term(Gen { vertex: g.vertex, labels }, f.clone());
                    }
                } else {
                    let base = self.transport_id(g.vertex, g.vertex, g.labels, &[ca]);
                    let rep_b = new_loop.unwrap_or(*b);
                    let t1 = self.next.circle_of_arc(g.vertex, *a);
                    let t2 = self.next.circle_of_arc(g.vertex, rep_b);
                    debug_assert_ne!(t1, t2, "split daughters must differ");
                    for (l1, l2, f) in th.comul(self.prev.label_of(g, ca)) {
                        let mut labels = base;
                        if *l1 == Label::X {
                            labels |= 1 << t1;
                        }
                        if *l2 == Label::X {
                            labels |= 1 << t2;
                        }
                        out.add_term(Gen { vertex: g.vertex, labels }, f.clone());
                    }
                }
            }
            Move::R1 { sign, insert: true, pos, strand, loop_arc } => {
                let bit = if *sign < 0 { 1 } else { 0 };
                let vn = insert_bit(g.vertex, *pos, bit);
                let ks = koszul_sign(vn, n_next, &[*pos]);
                let cs = self.prev.circle_of_arc(g.vertex, *strand);
                let base = self.transport_id(g.vertex, vn, g.labels, &[cs]);
                let t_strand = self.next.circle_of_arc(vn, *strand);
                let t_loop = self.next.circle_of_arc(vn, *loop_arc);
                let ls = self.prev.label_of(g, cs);
                if *sign < 0 {
                    let mut labels = base;
                    if ls == Label::X {
                        labels |= 1 << t_strand;
                    }
                    out.add_term(Gen { vertex: vn, labels }, ring_sign::<R>(ks));
                } else {
                    for (l1, l2, f) in th.comul(ls) {
                        let mut labels = base;
                        if *l1 == Label::X {
                            labels |= 1 << t_strand;
                        }
                        if *l2 == Label::X {
                            labels |= 1 << t_loop;
                        }
                        out.add_term(Gen { vertex: vn, labels }, signed(f.clone(), ks));
                    }
                    for (l, f) in th.square(ls) {
                        let mut labels = base;
                        if l == Label::X {
                            labels |= 1 << t_strand;
                        }
                        out.add_term(Gen { vertex: vn, labels }, signed(f, -ks));
                    }
                }
            }
            Move::R1 { sign, insert: false, pos, strand, loop_arc } => {
                let bit = (g.vertex >> pos) & 1;
                let want = if *sign < 0 { 1 } else { 0 };
                if bit != want {
                    return out;
                }
                let ks = koszul_sign(g.vertex, n_prev, &[*pos]);
                let vn = remove_bit(g.vertex, *pos);
                let cs = self.prev.circle_of_arc(g.vertex, *strand);
                let cl = self.prev.circle_of_arc(g.vertex, *loop_arc);
                debug_assert_ne!(cs, cl);
                let base = self.transport_id(g.vertex, vn, g.labels, &[cs, cl]);
                let t_strand = self.next.circle_of_arc(vn, *strand);
                let ls = self.prev.label_of(g, cs);
                let ll = self.prev.label_of(g, cl);
                if *sign < 0 {
                    for (l, f) in th.mul(ls, ll) {
                        let mut labels = base;
                        if *l == Label::X {
                            labels |= 1 << t_strand;
                        }
                        out.add_term(Gen { vertex: vn, labels }, signed(f.clone(), ks));
                    }
                    let eps = th.counit(ll);
                    if !eps.is_zero() {
                        for (l, f) in th.square(ls) {
                            let mut labels = base;
                            if l == Label::X {
                                labels |= 1 << t_strand;
                            }
                            out.add_term(Gen { vertex: vn, labels }, signed(f.mul(&eps), -ks));
                        }
                    }
                } else {
                    let eps = th.counit(ll);
                    if !eps.is_zero() {
                        let mut labels = base;
                        if ls == Label::X {
                            labels |= 1 << t_strand;
                        }
                        out.add_term(Gen { vertex: vn, labels }, signed(eps, ks));
                    }
                }
            }
            Move::R2 { insert: true, pos, ring_bits, pu, py, su, x, .. } => {
                let ibits = [1 - ring_bits[0], 1 - ring_bits[1]];
                // pass-through term: identity transport
                let vo = insert_bits2(g.vertex, *pos, ibits);
                let ks = koszul_sign(vo, n_next, &[pos[0], pos[1]]);
                let labels = self.transport_id(g.vertex, vo, g.labels, &[]);
                out.add_term(Gen { vertex: vo, labels }, ring_sign::<R>(ks));
                // ring term: saddle tensor a 1-labeled bigon circle
                let vd = insert_bits2(g.vertex, *pos, *ring_bits);
                let ksd = koszul_sign(vd, n_next, &[pos[0], pos[1]]);
                let cp = self.prev.circle_of_arc(g.vertex, *pu);
                let cq = self.prev.circle_of_arc(g.vertex, *py);
                if cp != cq {
                    let base = self.transport_id(g.vertex, vd, g.labels, &[cp, cq]);
                    let t = self.next.circle_of_arc(vd, *pu);
                    debug_assert_eq!(t, self.next.circle_of_arc(vd, *py));
                    debug_assert_ne!(t, self.next.circle_of_arc(vd, *x));
                    for (l, f) in th.mul(self.prev.label_of(g, cp), self.prev.label_of(g, cq)) {
                        let mut labels = base;
                        if *l == Label::X {
                            labels |= 1 << t;
                        }
                        out.add_term(Gen { vertex: vd, labels }, signed(f.clone(), ksd));
                    }
                } else {
                    let base = self.transport_id(g.vertex, vd, g.labels, &[cp]);
                    let t1 = self.next.circle_of_arc(vd, *pu);
                    let t2 = self.next.circle_of_arc(vd, *su);
                    debug_assert_ne!(t1, t2, "r2 insert split daughters must differ");
                    for (l1, l2, f) in th.comul(self.prev.label_of(g, cp)) {
                        let mut labels = base;
                        if *l1 == Label::X {
                            labels |= 1 << t1;
                        }
                        if *l2 == Label::X {
                            labels |= 1 << t2;
                        }
                        out.add_term(Gen { vertex: vd, labels }, signed(f.clone(), ksd));
                    }
                }
            }
            Move::R2 { insert: false, pos, ring_bits, pu, py, su, sy, x, y } => {
                let ibits = [1 - ring_bits[0], 1 - ring_bits[1]];
                let bits = [(g.vertex >> pos[0]) & 1, (g.vertex >> pos[1]) & 1];
                let ks = koszul_sign(g.vertex, n_prev, &[pos[0], pos[1]]);
                let vn = remove_bit(remove_bit(g.vertex, pos[1]), pos[0]);
                let rename = |a: Arc| -> Option<Arc> {
                    if a == *su {
                        Some(*pu)
                    } else if a == *sy {
                        Some(*py)
                    } else {
                        Some(a)
                    }
                };
                if bits == ibits {
                    let labels = self.transport(g.vertex, vn, g.labels, &[], &rename);
                    out.add_term(Gen { vertex: vn, labels }, ring_sign::<R>(ks));
                } else if bits == *ring_bits {
                    let c_ring = self.prev.circle_of_arc(g.vertex, *x);
                    debug_assert_eq!(c_ring, self.prev.circle_of_arc(g.vertex, *y));
                    let eps = th.counit(self.prev.label_of(g, c_ring));
                    if eps.is_zero() {
                        return out;
                    }
                    let cp = self.prev.circle_of_arc(g.vertex, *pu);
                    let cq = self.prev.circle_of_arc(g.vertex, *su);
                    if cp != cq {
                        let base = self.transport(g.vertex, vn, g.labels, &[cp, cq, c_ring], &rename);
                        let t = self.next.circle_of_arc(vn, *pu);
                        for (l, f) in th.mul(self.prev.label_of(g, cp), self.prev.label_of(g, cq)) {
                            let mut labels = base;
                            if *l == Label::X {
                                labels |= 1 << t;
                            }
                            out.add_term(Gen { vertex: vn, labels }, signed(f.mul(&eps), -ks));
                        }
                    } else {
                        let base = self.transport(g.vertex, vn, g.labels, &[cp, c_ring], &rename);
                        let t1 = self.next.circle_of_arc(vn, *pu);
                        let t2 = self.next.circle_of_arc(vn, *py);
                        debug_assert_ne!(t1, t2, "r2 removal split daughters must differ");
                        for (l1, l2, f) in th.comul(self.prev.label_of(g, cp)) {
                            let mut labels = base;
                            if *l1 == Label::X {
                                labels |= 1 << t1;
                            }
                            if *l2 == Label::X {
                                labels |= 1 << t2;
                            }
                            out.add_term(Gen { vertex: vn, labels }, signed(f.mul(&eps), -ks));
                        }
                    }
                }
                // mixed corners map to zero
            }
            Move::R3Cone { iso0, iso1, pos_prev, pos_next } => {
                let bit = (g.vertex >> pos_prev) & 1;
                let iso = if bit == 0 { iso0 } else { iso1 };
                let v_rest = remove_bit(g.vertex, *pos_prev);
                let np = n_prev - 1;
                let mut sign = 1i64;
                for i in 0..np {
                    for j in (i + 1)..np {
                        if iso.perm[i] > iso.perm[j] && (v_rest >> i) & 1 == 1 && (v_rest >> j) & 1 == 1 {
                            sign = -sign;
                        }
                    }
                }
                let mut vn_rest = 0u32;
                for i in 0..np {
                    vn_rest |= ((v_rest >> i) & 1) << iso.perm[i];
                }
                let vn = insert_bit(vn_rest, *pos_next, bit);
                let s1 = koszul_sign(g.vertex, n_prev, &[*pos_prev]);
                let s2 = koszul_sign(vn, n_prev, &[*pos_next]);
                let labels = self.transport(g.vertex, vn, g.labels, &[], &|a| iso.arcs.get(&a).copied());
                out.add_term(Gen { vertex: vn, labels }, ring_sign::<R>(sign * s1 * s2));
            }
            Move::Relabel { map } => {
                let labels = self
                    .transport(g.vertex, g.vertex, g.labels, &[], &|a| Some(map.get(&a).copied().unwrap_or(a)));
                out.add_term(Gen { vertex: g.vertex, labels }, R::one());
            }
            Move::Square { arc } => {
                let c = self.prev.circle_of_arc(g.vertex, *arc);
                let base = self.transport_id(g.vertex, g.vertex, g.labels, &[c]);
                for (l, f) in th.square(self.prev.label_of(g, c)) {
                    let mut labels = base;
                    if l == Label::X {
                        labels |= 1 << c;
                    }
                    out.add_term(Gen { vertex: g.vertex, labels }, f.clone());
                }
            }
        }
        out
    }

    pub fn apply(&self, z: &Chain<R>) -> Chain<R> {
        let mut out = Chain::zero();
        for (g, f) in &z.0 {
            out.add_scaled(f, &self.apply_gen(*g));
        }
        out
    }

    /// Exact chain-map verification on every generator of the source frame.
    pub fn verify_chain_map(&self) -> Result<(), String> {
        for gens in self.prev.gens_by_h.values() {
            for g in gens {
                let lhs = self.apply(&self.prev.d_gen(*g));
                let rhs = self.next.d_chain(&self.apply_gen(*g));
                if lhs != rhs {
                    return Err(format!("step map fails d.f = f.d at {}", g));
                }
            }
        }
        Ok(())
    }
}

fn ring_sign<R: EucRing>(s: i64) -> R {
    if s < 0 {
        R::one().neg()
    } else {
        R::one()
    }
}

fn signed<R: EucRing>(f: R, s: i64) -> R {
    if s < 0 {
        f.neg()
    } else {
        f
    }
}

/// The composite chain map of a movie, materialized on the source complex.
pub struct MovieMap<R: EucRing> {
    pub source: GradedComplex<R>,
    pub target: GradedComplex<R>,
    pub images: BTreeMap<Gen, Chain<R>>,
    pub chi: i64,
}

#[derive(Clone, Copy, Debug)]
pub struct MovieOptions {
    pub budget: u128,
    /// verify every elementary step on its full source complex
    pub verify_steps: bool,
}

impl Default for MovieOptions {
    fn default() -> Self {
        MovieOptions { budget: DEFAULT_BUDGET, verify_steps: false }
    }
}

pub fn movie_map<R: EucRing>(
    movie: &Movie,
    theory: &Theory<R>,
    opts: MovieOptions,
) -> Result<MovieMap<R>, MovieError> {
    let source = GradedComplex::build(movie.frames[0].clone(), theory.clone(), opts.budget)?;
    let mut images: BTreeMap<Gen, Chain<R>> = BTreeMap::new();
    for gens in source.gens_by_h.values() {
        for g in gens {
            images.insert(*g, Chain::gen(*g));
        }
    }
    let mut prev = GradedComplex::build(movie.frames[0].clone(), theory.clone(), opts.budget)?;
    for (k, mv) in movie.moves.iter().enumerate() {
        let next = GradedComplex::build(movie.frames[k + 1].clone(), theory.clone(), opts.budget)?;
        let step = StepMap::new(&prev, &next, mv);
        if opts.verify_steps {
            step.verify_chain_map().map_err(|msg| MovieError::Validate { step: k, msg })?;
        }
        for img in images.values_mut() {
            *img = step.apply(img);
        }
        prev = next;
    }
    let mm = MovieMap { source, target: prev, images, chi: movie.chi() };
    mm.verify().map_err(|msg| MovieError::Validate { step: 0, msg })?;
    Ok(mm)
}

impl<R: EucRing> MovieMap<R> {
    pub fn apply(&self, z: &Chain<R>) -> Chain<R> {
        let mut out = Chain::zero();
        for (g, f) in &z.0 {
            if let Some(img) = self.images.get(g) {
                out.add_scaled(f, img);
            }
        }
        out
    }

    /// d.F = F.d on every source generator, and q-degree(image) = q + chi.
    pub fn verify(&self) -> Result<(), String> {
        for (g, img) in &self.images {
            let lhs = self.apply(&self.source.d_gen(*g));
            let rhs = self.target.d_chain(img);
            if lhs != rhs {
                return Err(format!("movie map fails d.F = F.d at {}", g));
            }
            if !img.is_zero() {
                let q_in = self.source.q_of(*g);
                match self.target.chain_q(img) {
                    Some(q_out) if q_out == q_in + self.chi => {}
                    other => {
                        return Err(format!(
                            "image of {} has q-degree {:?}, want {}",
                            g,
                            other,
                            q_in + self.chi
                        ))
                    }
                }
            }
        }
        Ok(())
    }
}


#[cfg(test)]
mod move_gen_tests {
    use super::*;
    use crate::algebra::{bn_f2h, kh_z};
    use crate::complex::build_complex;

    fn opts() -> MovieOptions {
        MovieOptions { budget: DEFAULT_BUDGET, verify_steps: true }
    }

    fn trefoil() -> LinkDiagram {
        LinkDiagram::from_braid(&[1, 1, 1], 2).unwrap()
    }

    #[test]
    fn kink_on_trefoil_all_variants() {
        // chain maps with nontrivial koszul transport, both theories
        let d = trefoil();
        for sign in [1i8, -1] {
            for side in ['l', 'r'] {
                for arc in [1u32, 3, 5] {
                    let (next, spec) = insert_kink(&d, arc, sign, side).unwrap();
                    let text = format!("frame\n{}{}\nframe\n{}", d.serialize(), spec.line(), next.serialize());
                    let m = Movie::parse(&text)
                        .unwrap_or_else(|e| panic!("kink {sign} {side} {arc}: {e}"));
                    movie_map(&m, &kh_z(), opts())
                        .unwrap_or_else(|e| panic!("kink map {sign} {side} {arc}: {e}"));
                    movie_map(&m, &bn_f2h(), opts())
                        .unwrap_or_else(|e| panic!("bn kink map {sign} {side} {arc}: {e}"));
                }
            }
        }
    }

    #[test]
    fn r2_on_trefoil_planar_sites() {
        // only face-adjacent arc pairs give planar insertions; search them
        let d = trefoil();
        let h1 = build_complex(&d, &kh_z()).unwrap().homology().module();
        let mut hits = 0;
        for variant in [0u8, 1] {
            for a in 1u32..=6 {
                for b in 1u32..=6 {
                    if a == b {
                        continue;
                    }
                    let Ok((next, spec)) = insert_r2(&d, a, b, variant) else { continue };
                    hits += 1;
                    let text =
                        format!("frame\n{}{}\nframe\n{}", d.serialize(), spec.line(), next.serialize());
                    let m = Movie::parse(&text).unwrap_or_else(|e| panic!("r2 {variant} {a} {b}: {e}"));
                    movie_map(&m, &kh_z(), opts())
                        .unwrap_or_else(|e| panic!("r2 map {variant} {a} {b}: {e}"));
                    movie_map(&m, &bn_f2h(), opts())
                        .unwrap_or_else(|e| panic!("bn r2 map {variant} {a} {b}: {e}"));
                    let h2 = build_complex(&next, &kh_z()).unwrap().homology().module();
                    assert_eq!(h1, h2, "homology changed by r2 {variant} {a} {b}");
                }
            }
        }
        assert!(hits >= 8, "too few planar r2 sites found: {hits}");
    }

    #[test]
    fn kink_preserves_homology() {
        let d = trefoil();
        let (next, _) = insert_kink(&d, 2, -1, 'l').unwrap();
        let h1 = build_complex(&d, &kh_z()).unwrap().homology().module();
        let h2 = build_complex(&next, &kh_z()).unwrap().homology().module();
        assert_eq!(h1, h2);
    }
}

// ------------------------------------------------------- homology maps

use crate::complex::ComplexHomology;

/// The map induced on homology, as matrices per source bigrading. Entries
/// are coordinates of pushed-forward basis classes in the target summand
/// basis. Over the integers the matrix is canonical only up to a global
/// sign; `sign_normalized` flips it so the first nonzero entry is positive.
pub struct HomologyMap<R: EucRing> {
    pub chi: i64,
    /// (h, q) -> (target summand count, matrix: per source summand, the
    /// coordinate vector over the target summands at (h, q + chi))
    pub blocks: BTreeMap<(i64, i64), Vec<Vec<R>>>,
}

pub fn induced_on_homology<R: EucRing>(
    f: &MovieMap<R>,
    src_h: &ComplexHomology<R>,
    tgt_h: &ComplexHomology<R>,
) -> HomologyMap<R> {
    let mut blocks: BTreeMap<(i64, i64), Vec<Vec<R>>> = BTreeMap::new();
    for (h, block) in &src_h.blocks {
        for (i, _s) in block.hom.summands.iter().enumerate() {
            let q = block.summand_q[i];
            let z = block.chain_of_summand(i);
            let img = f.apply(&z);
            let coords = tgt_h
                .coords(&f.target, &img)
                .expect("image of a cycle is not a cycle");
            // keep only target summands at the expected bigrading
            let tb = &tgt_h.blocks[h];
            let filtered: Vec<R> = coords
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    if tb.summand_q[j] == q + f.chi {
                        c.clone()
                    } else {
                        assert!(c.is_zero(), "homology map not homogeneous");
                        R::zero()
                    }
                })
                .collect();
            blocks.entry((*h, q)).or_default().push(filtered);
        }
    }
    HomologyMap { chi: f.chi, blocks }
}

impl<R: EucRing> HomologyMap<R> {
    /// Globally flip the sign so the first nonzero entry is positive
    /// (canonical-up-to-sign reporting over the integers).
    pub fn sign_normalized(&self) -> HomologyMap<R> {
        let mut flip = false;
        'outer: for m in self.blocks.values() {
            for row in m {
                for e in row {
                    if !e.is_zero() {
                        let (_, unit) = e.unit_normalize();
                        flip = !unit.is_one();
                        break 'outer;
                    }
                }
            }
        }
        if !flip {
            return HomologyMap { chi: self.chi, blocks: self.blocks.clone() };
        }
        let blocks = self
            .blocks
            .iter()
            .map(|(k, m)| (*k, m.iter().map(|row| row.iter().map(|e| e.neg()).collect()).collect()))
            .collect();
        HomologyMap { chi: self.chi, blocks }
    }

    pub fn is_identity(&self, src_h: &ComplexHomology<R>) -> bool {
        // square blocks matching the identity, for every bigrading with summands
        let mut count = 0;
        for ((h, q), m) in &self.blocks {
            let tb = &src_h.blocks[h];
            for (i, row) in m.iter().enumerate() {
                // locate this source summand's index among same-bigrading ones
                let mut seen = 0;
                let mut my_abs = usize::MAX;
                for (j, qq) in tb.summand_q.iter().enumerate() {
                    if *qq == *q {
                        if seen == i {
                            my_abs = j;
                        }
                        seen += 1;
                    }
                }
                for (j, e) in row.iter().enumerate() {
                    let want_one = j == my_abs;
                    if want_one && !e.is_one() {
                        return false;
                    }
                    if !want_one && !e.is_zero() {
                        return false;
                    }
                }
                count += 1;
            }
        }
        let total: usize = src_h.blocks.values().map(|b| b.hom.summands.len()).sum();
        count == total
    }
}

/// The scalar H(Sigma)(1) of a closed-surface movie (empty to empty).
pub fn closed_surface_value<R: EucRing>(
    movie: &Movie,
    theory: &Theory<R>,
    opts: MovieOptions,
) -> Result<R, MovieError> {
    if movie.source().n() != 0
        || !movie.source().free_loops.is_empty()
        || movie.target().n() != 0
        || !movie.target().free_loops.is_empty()
    {
        return Err(MovieError::Parse("closed-surface movie must start and end empty".into()));
    }
    let f = movie_map(movie, theory, opts)?;
    let img = f.apply(&Chain::gen(Gen { vertex: 0, labels: 0 }));
    Ok(img.0.get(&Gen { vertex: 0, labels: 0 }).cloned().unwrap_or_else(R::zero))
}

/// The difference class F1(g) - F2(g) of two movies with equal endpoints,
/// with its homology verdict.
pub struct DifferenceClass<R: EucRing> {
    pub chain: Chain<R>,
    pub is_zero_class: bool,
}

pub fn difference_class<R: EucRing>(
    m1: &Movie,
    m2: &Movie,
    theory: &Theory<R>,
    class: &Chain<R>,
    opts: MovieOptions,
) -> Result<(DifferenceClass<R>, MovieMap<R>, MovieMap<R>), MovieError> {
    if m1.source() != m2.source() || m1.target() != m2.target() {
        return Err(MovieError::Parse("difference class needs movies with equal endpoints".into()));
    }
    if m1.chi() != m2.chi() {
        return Err(MovieError::Parse("difference class needs movies of equal euler characteristic".into()));
    }
    let f1 = movie_map(m1, theory, opts)?;
    let f2 = movie_map(m2, theory, opts)?;
    let delta = f1.apply(class).sub(&f2.apply(class));
    let hom = f1.target.homology();
    let is_zero = if delta.is_zero() {
        true
    } else {
        hom.is_zero_class(&f1.target, &delta).unwrap_or(false)
    };
    Ok((DifferenceClass { chain: delta, is_zero_class: is_zero }, f1, f2))
}
