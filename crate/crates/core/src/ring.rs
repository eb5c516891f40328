//! Coefficient rings: `Int` (checked 128-bit integers), `F2`, and
//! `F2Poly` = F2\[H\] with deg H = -2 in the quantum grading.

use std::fmt::{self, Debug, Display};

/// Commutative ring with enough structure for chain complexes.
pub trait Ring: Clone + PartialEq + Eq + Debug + Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(n: i64) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    /// True iff the coefficient ring has characteristic 2 (signs are moot).
    fn char_two() -> bool {
        Self::from_i64(2).is_zero()
    }
}

/// Euclidean domain: enough for Smith normal form and kernel computations.
pub trait EucRing: Ring {
    /// Euclidean division: `self = q * d + r` with `norm(r) < norm(d)`.
    fn div_rem(&self, d: &Self) -> (Self, Self);
    /// Euclidean norm; 0 only for the zero element.
    fn norm(&self) -> u128;
    fn is_unit(&self) -> bool;
    /// Write `self = unit * canonical`; returns `(canonical, unit)`.
    fn unit_normalize(&self) -> (Self, Self);

    fn divides(&self, other: &Self) -> bool {
        if other.is_zero() {
            return true;
        }
        if self.is_zero() {
            return false;
        }
        other.div_rem(self).1.is_zero()
    }
    /// Exact division; panics if the division leaves a remainder.
    fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "non-exact division: {} / {}", self, d);
        q
    }
}

// ---------------------------------------------------------------- Int

/// Integers in a checked 128-bit representation. All arithmetic panics on
/// overflow rather than wrapping; at the matrix sizes this crate targets,
/// entries stay far below the bound.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Int(pub i128);

impl Ring for Int {
    fn zero() -> Self {
        Int(0)
    }
    fn one() -> Self {
        Int(1)
    }
    fn add(&self, other: &Self) -> Self {
        Int(self.0.checked_add(other.0).expect("integer overflow"))
    }
    fn neg(&self) -> Self {
        Int(self.0.checked_neg().expect("integer overflow"))
    }
    fn mul(&self, other: &Self) -> Self {
        Int(self.0.checked_mul(other.0).expect("integer overflow"))
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn from_i64(n: i64) -> Self {
        Int(n as i128)
    }
}

impl EucRing for Int {
    fn div_rem(&self, d: &Self) -> (Self, Self) {
        // round-toward-zero division is fine for the euclidean property
        let q = self.0 / d.0;
        let r = self.0 - q * d.0;
        (Int(q), Int(r))
    }
    fn norm(&self) -> u128 {
        self.0.unsigned_abs()
    }
    fn is_unit(&self) -> bool {
        self.0 == 1 || self.0 == -1
    }
    fn unit_normalize(&self) -> (Self, Self) {
        if self.0 < 0 {
            (Int(-self.0), Int(-1))
        } else {
            (*self, Int(1))
        }
    }
}

impl Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Debug for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}

/// Prime-power factorization (trial division; torsion orders are tiny).
pub fn prime_power_factors(n: u128) -> Vec<u128> {
    let mut n = n;
    let mut out = Vec::new();
    let mut p = 2u128;
    while p * p <= n {
        if n % p == 0 {
            let mut pk = 1u128;
            while n % p == 0 {
                n /= p;
                pk *= p;
            }
            out.push(pk);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---------------------------------------------------------------- F2

/// The field with two elements.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct F2(pub bool);

impl Ring for F2 {
    fn zero() -> Self {
        F2(false)
    }
    fn one() -> Self {
        F2(true)
    }
    fn add(&self, other: &Self) -> Self {
        F2(self.0 ^ other.0)
    }
    fn neg(&self) -> Self {
        *self
    }
    fn mul(&self, other: &Self) -> Self {
        F2(self.0 & other.0)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn from_i64(n: i64) -> Self {
        F2(n % 2 != 0)
    }
}

impl EucRing for F2 {
    fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(d.0, "division by zero in F2");
        (*self, F2(false))
    }
    fn norm(&self) -> u128 {
        self.0 as u128
    }
    fn is_unit(&self) -> bool {
        self.0
    }
    fn unit_normalize(&self) -> (Self, Self) {
        (*self, F2(true))
    }
}

impl Display for F2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.0 { 1 } else { 0 })
    }
}

impl Debug for F2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------- F2[H]

/// Polynomials over F2 in the variable `H`, stored as a bitmask of
/// exponents: bit k set means the monomial `H^k` is present.
///
/// `H` has quantum degree -2. Degrees appearing in link computations stay
/// tiny, but the representation widens automatically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct F2Poly(pub Vec<u64>);

impl F2Poly {
    pub fn h() -> Self {
        F2Poly(vec![2])
    }
    pub fn h_pow(k: usize) -> Self {
        let mut v = vec![0u64; k / 64 + 1];
        v[k / 64] = 1 << (k % 64);
        F2Poly(v)
    }
    pub fn degree(&self) -> Option<usize> {
        for (i, w) in self.0.iter().enumerate().rev() {
            if *w != 0 {
                return Some(i * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }
    pub fn is_monomial(&self) -> bool {
        self.0.iter().map(|w| w.count_ones()).sum::<u32>() == 1
    }
    fn trim(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }
    fn shifted(&self, k: usize) -> Self {
        // self * H^k
        let (wq, wr) = (k / 64, k % 64);
        let mut v = vec![0u64; self.0.len() + wq + 1];
        for (i, w) in self.0.iter().enumerate() {
            v[i + wq] |= w << wr;
            if wr > 0 {
                v[i + wq + 1] |= w >> (64 - wr);
            }
        }
        F2Poly(v).trim()
    }
}

impl Ring for F2Poly {
    fn zero() -> Self {
        F2Poly(Vec::new())
    }
    fn one() -> Self {
        F2Poly(vec![1])
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut v = vec![0u64; n];
        for i in 0..n {
            v[i] = self.0.get(i).copied().unwrap_or(0) ^ other.0.get(i).copied().unwrap_or(0);
        }
        F2Poly(v).trim()
    }
    fn neg(&self) -> Self {
        self.clone()
    }
    fn mul(&self, other: &Self) -> Self {
        let mut acc = F2Poly::zero();
        for (i, w) in self.0.iter().enumerate() {
            for b in 0..64 {
                if w & (1 << b) != 0 {
                    acc = acc.add(&other.shifted(i * 64 + b));
                }
            }
        }
        acc
    }
    fn is_zero(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }
    fn from_i64(n: i64) -> Self {
        if n % 2 != 0 {
            Self::one()
        } else {
            Self::zero()
        }
    }
}

impl EucRing for F2Poly {
    fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero in F2[H]");
        let mut r = self.clone();
        let mut q = F2Poly::zero();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let m = F2Poly::h_pow(rd - dd);
            q = q.add(&m);
            r = r.add(&d.mul(&m));
        }
        (q, r)
    }
    fn norm(&self) -> u128 {
        match self.degree() {
            None => 0,
            Some(d) => 1u128 << d.min(126),
        }
    }
    fn is_unit(&self) -> bool {
        self.degree() == Some(0)
    }
    fn unit_normalize(&self) -> (Self, Self) {
        (self.clone(), Self::one())
    }
}

impl Display for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..=self.degree().unwrap()).rev() {
            if self.0[k / 64] & (1 << (k % 64)) != 0 {
                if !first {
                    write!(f, "+")?;
                }
                match k {
                    0 => write!(f, "1")?,
                    1 => write!(f, "H")?,
                    _ => write!(f, "H^{}", k)?,
                }
                first = false;
            }
        }
        Ok(())
    }
}

impl Debug for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}
