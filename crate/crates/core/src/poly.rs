//! Laurent polynomials in `q` with integer coefficients, used for the
//! Kauffman state sum and graded Euler characteristics.

use std::collections::BTreeMap;
use std::fmt::{self, Display};
use std::ops::{Add, Mul, Neg};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Laurent {
    terms: BTreeMap<i64, i64>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn one() -> Self {
        Laurent::monomial(0, 1)
    }

    pub fn monomial(deg: i64, coeff: i64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0 {
            terms.insert(deg, coeff);
        }
        Laurent { terms }
    }

    /// q + q^{-1}
    pub fn circle() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(-1, 1);
        terms.insert(1, 1);
        Laurent { terms }
    }

    pub fn add_term(&mut self, deg: i64, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let e = self.terms.entry(deg).or_insert(0);
        *e = e.checked_add(coeff).expect("coefficient overflow");
        if *e == 0 {
            self.terms.remove(&deg);
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Laurent::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(|(d, c)| (*d, *c))
    }
}

impl Add for &Laurent {
    type Output = Laurent;
    fn add(self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(*d, *c);
        }
        out
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (d1, c1) in &self.terms {
            for (d2, c2) in &other.terms {
                out.add_term(d1 + d2, c1.checked_mul(*c2).expect("coefficient overflow"));
            }
        }
        out
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        let mut out = Laurent::zero();
        for (d, c) in &self.terms {
            out.add_term(*d, -c);
        }
        out
    }
}

impl Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in &self.terms {
            let sign = if *c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            let coeff = if mag == 1 && *d != 0 { String::new() } else { mag.to_string() };
            let var = match d {
                0 => String::new(),
                1 => "q".to_string(),
                _ => format!("q^{}", d),
            };
            write!(f, "{}{}{}", sign, coeff, var)?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_square() {
        let c = Laurent::circle();
        let c2 = &c * &c;
        assert_eq!(c2, {
            let mut p = Laurent::zero();
            p.add_term(-2, 1);
            p.add_term(0, 2);
            p.add_term(2, 1);
            p
        });
        assert_eq!(format!("{}", c2), "q^-2+2+q^2");
    }
}
