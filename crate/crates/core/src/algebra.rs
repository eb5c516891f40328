//! The rank-2 Frobenius algebras driving the two theories: Khovanov's
//! A = R<1, x> with x^2 = 0, and the deformation over F2\[H\] with x^2 = Hx.
//!
//! Structure maps, in the {1, x} basis:
//!
//! ```text
//!   unit      i(1) = 1
//!   counit    e(1) = 0, e(x) = 1
//!   merge     m(1,1) = 1, m(1,x) = m(x,1) = x, m(x,x) = 0        (+ Hx)
//!   split     D(1) = 1(x)x + x(x)1 (+ H 1(x)1), D(x) = x(x)x
//! ```
//!
//! deg 1 = +1, deg x = -1, deg H = -2; i, e have degree +1 and m, D degree -1.

use std::fmt::{self, Display};

use crate::ring::{F2Poly, Ring, F2, Int};


/// Basis label on a smoothing circle.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Label {
    One,
    X,
}

impl Label {
    pub fn degree(self) -> i64 {
        match self {
            Label::One => 1,
            Label::X => -1,
        }
    }
}

impl Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if *self == Label::One { "1" } else { "x" })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TheoryKind {
    Khovanov,
    BarNatan,
}

/// A Frobenius theory over a concrete coefficient ring: the structure
/// constants of unit, counit, multiplication and comultiplication.
#[derive(Clone, Debug)]
pub struct Theory<R: Ring> {
    pub kind: TheoryKind,
    /// m(a,b) as a linear combination of labels.
    mul_table: [[Vec<(Label, R)>; 2]; 2],
    /// Delta(a) as a linear combination of label pairs.
    comul_table: [Vec<(Label, Label, R)>; 2],
    /// e(a)
    counit_table: [R; 2],
}

fn li(l: Label) -> usize {
    match l {
        Label::One => 0,
        Label::X => 1,
    }
}

impl<R: Ring> Theory<R> {
    pub fn khovanov() -> Self {
        let one = R::one;
        Theory {
            kind: TheoryKind::Khovanov,
            mul_table: [
                [vec![(Label::One, one())], vec![(Label::X, one())]],
                [vec![(Label::X, one())], vec![]],
            ],
            comul_table: [
                vec![(Label::One, Label::X, one()), (Label::X, Label::One, one())],
                vec![(Label::X, Label::X, one())],
            ],
            counit_table: [R::zero(), one()],
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            TheoryKind::Khovanov => "khovanov",
            TheoryKind::BarNatan => "bar_natan",
        }
    }

    pub fn unit(&self) -> Vec<(Label, R)> {
        vec![(Label::One, R::one())]
    }

    pub fn counit(&self, a: Label) -> R {
        self.counit_table[li(a)].clone()
    }

    pub fn mul(&self, a: Label, b: Label) -> &[(Label, R)] {
        &self.mul_table[li(a)][li(b)]
    }

    pub fn comul(&self, a: Label) -> &[(Label, Label, R)] {
        &self.comul_table[li(a)]
    }

    /// The genus-one operator m(Delta(a)): 2x in Khovanov, H in Bar-Natan.
    pub fn square(&self, a: Label) -> Vec<(Label, R)> {
        let mut acc: Vec<(Label, R)> = Vec::new();
        for (b, c, f) in self.comul(a) {
            for (d, g) in self.mul(*b, *c) {
                add_term(&mut acc, *d, f.mul(g));
            }
        }
        acc
    }

    /// Scalar of the closed genus-g surface: e . (m Delta)^g . i.
    pub fn closed_surface(&self, genus: usize) -> R {
        let mut v: Vec<(Label, R)> = self.unit();
        for _ in 0..genus {
            let mut next: Vec<(Label, R)> = Vec::new();
            for (l, f) in &v {
                for (l2, g) in self.square(*l) {
                    add_term(&mut next, l2, f.mul(&g));
                }
            }
            v = next;
        }
        let mut out = R::zero();
        for (l, f) in &v {
            out = out.add(&f.mul(&self.counit(*l)));
        }
        out
    }

    /// Verify the Frobenius axioms on all basis tensors. Returns the name of
    /// the first broken identity, if any.
    pub fn check_axioms(&self) -> Result<(), String> {
        use Label::*;
        let labels = [One, X];
        type Lin<R> = Vec<(Label, R)>;
        type Lin2<R> = Vec<((Label, Label), R)>;
        type Lin3<R> = Vec<((Label, Label, Label), R)>;

        let mul = |a: Label, b: Label| -> Lin<R> { self.mul(a, b).to_vec() };
        let com = |a: Label| -> Lin2<R> { self.comul(a).iter().map(|(b, c, f)| ((*b, *c), f.clone())).collect() };

        // unit laws: m(1, a) = a = m(a, 1)
        for a in labels {
            if !lin_eq(&mul(One, a), &[(a, R::one())]) || !lin_eq(&mul(a, One), &[(a, R::one())]) {
                return Err(format!("unit law fails at {}", a));
            }
        }
        // associativity
        for a in labels {
            for b in labels {
                for c in labels {
                    let mut lhs: Lin<R> = Vec::new();
                    for (ab, f) in mul(a, b) {
                        for (abc, g) in mul(ab, c) {
                            add_term(&mut lhs, abc, f.mul(&g));
                        }
                    }
                    let mut rhs: Lin<R> = Vec::new();
                    for (bc, f) in mul(b, c) {
                        for (abc, g) in mul(a, bc) {
                            add_term(&mut rhs, abc, f.mul(&g));
                        }
                    }
                    if !lin_eq(&lhs, &rhs) {
                        return Err(format!("associativity fails at ({},{},{})", a, b, c));
                    }
                }
            }
        }
        // counit laws: (id x e) Delta = id = (e x id) Delta
        for a in labels {
            let mut left: Lin<R> = Vec::new();
            let mut right: Lin<R> = Vec::new();
            for ((b, c), f) in com(a) {
                add_term(&mut right, b, f.mul(&self.counit(c)));
                add_term(&mut left, c, f.mul(&self.counit(b)));
            }
            if !lin_eq(&right, &[(a, R::one())]) {
                return Err(format!("(id x e) Delta != id at {}", a));
            }
            if !lin_eq(&left, &[(a, R::one())]) {
                return Err(format!("(e x id) Delta != id at {}", a));
            }
        }
        // coassociativity
        for a in labels {
            let mut lhs: Lin3<R> = Vec::new();
            let mut rhs: Lin3<R> = Vec::new();
            for ((b, c), f) in com(a) {
                for ((b1, b2), g) in com(b) {
                    add_term3(&mut lhs, (b1, b2, c), f.mul(&g));
                }
                for ((c1, c2), g) in com(c) {
                    add_term3(&mut rhs, (b, c1, c2), f.mul(&g));
                }
            }
            if !lin_eq3(&lhs, &rhs) {
                return Err(format!("coassociativity fails at {}", a));
            }
        }
        // Frobenius compatibility: Delta m = (id x m)(Delta x id) = (m x id)(id x Delta)
        for a in labels {
            for b in labels {
                let mut mid: Lin2<R> = Vec::new();
                for (ab, f) in mul(a, b) {
                    for ((p, q), g) in com(ab) {
                        add_term2(&mut mid, (p, q), f.mul(&g));
                    }
                }
                let mut left: Lin2<R> = Vec::new();
                for ((p, q), f) in com(a) {
                    for (qb, g) in mul(q, b) {
                        add_term2(&mut left, (p, qb), f.mul(&g));
                    }
                }
                let mut right: Lin2<R> = Vec::new();
                for ((p, q), f) in com(b) {
                    for (ap, g) in mul(a, p) {
                        add_term2(&mut right, (ap, q), f.mul(&g));
                    }
                }
                if !lin_eq2(&mid, &left) {
                    return Err(format!("Frobenius square (Delta x id) fails at ({},{})", a, b));
                }
                if !lin_eq2(&mid, &right) {
                    return Err(format!("Frobenius square (id x Delta) fails at ({},{})", a, b));
                }
            }
        }
        Ok(())
    }
}

impl Theory<F2Poly> {
    /// The deformation over F2\[H\]: m(x,x) = Hx, Delta(1) gains H 1(x)1.
    pub fn bar_natan() -> Self {
        let one = F2Poly::one;
        let h = F2Poly::h;
        Theory {
            kind: TheoryKind::BarNatan,
            mul_table: [
                [vec![(Label::One, one())], vec![(Label::X, one())]],
                [vec![(Label::X, one())], vec![(Label::X, h())]],
            ],
            comul_table: [
                vec![(Label::One, Label::X, one()), (Label::X, Label::One, one()), (Label::One, Label::One, h())],
                vec![(Label::X, Label::X, one())],
            ],
            counit_table: [F2Poly::zero(), one()],
        }
    }

    /// Corrupted table for negative controls: e(x) = 0 breaks the counit law.
    pub fn broken_for_tests() -> Self {
        let mut t = Self::bar_natan();
        t.counit_table[1] = F2Poly::zero();
        t
    }
}

fn add_term<R: Ring>(acc: &mut Vec<(Label, R)>, l: Label, f: R) {
    if f.is_zero() {
        return;
    }
    if let Some(e) = acc.iter_mut().find(|(k, _)| *k == l) {
        e.1 = e.1.add(&f);
    } else {
        acc.push((l, f));
    }
    acc.retain(|(_, f)| !f.is_zero());
}

fn add_term2<R: Ring>(acc: &mut Vec<((Label, Label), R)>, l: (Label, Label), f: R) {
    if f.is_zero() {
        return;
    }
    if let Some(e) = acc.iter_mut().find(|(k, _)| *k == l) {
        e.1 = e.1.add(&f);
    } else {
        acc.push((l, f));
    }
    acc.retain(|(_, f)| !f.is_zero());
}

fn add_term3<R: Ring>(acc: &mut Vec<((Label, Label, Label), R)>, l: (Label, Label, Label), f: R) {
    if f.is_zero() {
        return;
    }
    if let Some(e) = acc.iter_mut().find(|(k, _)| *k == l) {
        e.1 = e.1.add(&f);
    } else {
        acc.push((l, f));
    }
    acc.retain(|(_, f)| !f.is_zero());
}

fn lin_eq<R: Ring>(a: &[(Label, R)], b: &[(Label, R)]) -> bool {
    let mut diff = a.to_vec();
    for (l, f) in b {
        add_term(&mut diff, *l, f.neg());
    }
    diff.is_empty()
}

fn lin_eq2<R: Ring>(a: &[((Label, Label), R)], b: &[((Label, Label), R)]) -> bool {
    let mut diff = a.to_vec();
    for (l, f) in b {
        add_term2(&mut diff, *l, f.neg());
    }
    diff.is_empty()
}

fn lin_eq3<R: Ring>(a: &[((Label, Label, Label), R)], b: &[((Label, Label, Label), R)]) -> bool {
    let mut diff = a.to_vec();
    for (l, f) in b {
        add_term3(&mut diff, *l, f.neg());
    }
    diff.is_empty()
}

/// Khovanov over the integers.
pub fn kh_z() -> Theory<Int> {
    Theory::khovanov()
}

/// Khovanov over F2.
pub fn kh_f2() -> Theory<F2> {
    Theory::khovanov()
}

/// Bar-Natan over F2\[H\].
pub fn bn_f2h() -> Theory<F2Poly> {
    Theory::bar_natan()
}


/// Runtime theory selection for the CLI: a named theory over a named ring.
pub enum AnyTheory {
    KhZ(Theory<Int>),
    KhF2(Theory<F2>),
    BnF2H(Theory<F2Poly>),
}

impl AnyTheory {
    pub fn flag(&self) -> &'static str {
        match self {
            AnyTheory::KhZ(_) => "kh-z",
            AnyTheory::KhF2(_) => "kh-f2",
            AnyTheory::BnF2H(_) => "bn-f2h",
        }
    }
}

/// Build a theory from (name, ring) and reject unsupported pairs:
/// khovanov over int or f2, bar_natan over f2h only.
pub fn make_theory(name: &str, ring: &str) -> Result<AnyTheory, String> {
    match (name, ring) {
        ("khovanov", "int") => Ok(AnyTheory::KhZ(Theory::khovanov())),
        ("khovanov", "f2") => Ok(AnyTheory::KhF2(Theory::khovanov())),
        ("bar_natan", "f2h") => Ok(AnyTheory::BnF2H(Theory::bar_natan())),
        _ => Err(format!("unsupported theory/ring pair: {} over {}", name, ring)),
    }
}

/// Parse the CLI flag form `kh-z | kh-f2 | bn-f2h`.
pub fn theory_from_flag(flag: &str) -> Result<AnyTheory, String> {
    match flag {
        "kh-z" => make_theory("khovanov", "int"),
        "kh-f2" => make_theory("khovanov", "f2"),
        "bn-f2h" => make_theory("bar_natan", "f2h"),
        other => Err(format!("unknown theory {:?} (want kh-z, kh-f2 or bn-f2h)", other)),
    }
}
