//! Laurent polynomials with Gaussian-rational coefficients in a fixed set of
//! commuting symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::rational::{GaussianRational, Ring};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Z,
    P,
    Q,
    /// p″, independent of p.
    Pdd,
    /// e^{z}
    ExpZ,
    /// e^{iz}
    ExpIz,
}

pub const SYMBOLS: [Symbol; 6] = [Symbol::Z, Symbol::P, Symbol::Q, Symbol::Pdd, Symbol::ExpZ, Symbol::ExpIz];

impl Symbol {
    pub fn name(self) -> &'static str {
        match self {
            Symbol::Z => "z",
            Symbol::P => "p",
            Symbol::Q => "q",
            Symbol::Pdd => "p''",
            Symbol::ExpZ => "e^z",
            Symbol::ExpIz => "e^(iz)",
        }
    }
}

/// Exponent vector indexed like [`SYMBOLS`].
pub type Monomial = [i32; 6];

pub fn monomial_name(m: &Monomial) -> String {
    let parts: Vec<String> = SYMBOLS
        .iter()
        .zip(m)
        .filter(|(_, &e)| e != 0)
        .map(|(s, &e)| if e == 1 { s.name().to_string() } else { format!("{}^{e}", s.name()) })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("·")
    }
}

#[derive(Clone, PartialEq, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Poly {
    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial(c, [0; 6])
    }

    pub fn monomial(c: GaussianRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    /// `c · s^power`.
    pub fn symbol_pow(c: GaussianRational, s: Symbol, power: i32) -> Self {
        let mut m = [0; 6];
        m[s as usize] = power;
        Self::monomial(c, m)
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::symbol_pow(GaussianRational::one(), s, 1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Numeric value with `values[k]` substituted for `SYMBOLS[k]`.
    pub fn eval(&self, values: &[Complex64; 6]) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let (re, im) = c.to_f64_pair();
                let mut v = Complex64::new(re, im);
                for (k, &e) in m.iter().enumerate() {
                    if e != 0 {
                        v *= values[k].powi(e);
                    }
                }
                v
            })
            .sum()
    }

    fn combine(mut self, other: Self, sign: bool) -> Self {
        for (m, c) in other.terms {
            let c = if sign { c } else { -c };
            let sum = match self.terms.remove(&m) {
                Some(prev) => prev + c,
                None => c,
            };
            if !sum.is_zero() {
                self.terms.insert(m, sum);
            }
        }
        self
    }
}

impl Ring for Poly {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::constant(GaussianRational::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Add for Poly {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.combine(o, true)
    }
}

impl Sub for Poly {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.combine(o, false)
    }
}

impl Neg for Poly {
    type Output = Self;
    fn neg(self) -> Self {
        Self { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Mul for Poly {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m: Monomial = std::array::from_fn(|k| ma[k] + mb[k]);
                out = out + Poly::monomial(ca.clone() * cb.clone(), m);
            }
        }
        out
    }
}

impl From<GaussianRational> for Poly {
    fn from(c: GaussianRational) -> Self {
        Poly::constant(c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c})·{}", monomial_name(m))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_cancellation() {
        let z = Poly::symbol(Symbol::Z);
        let zinv = Poly::symbol_pow(GaussianRational::one(), Symbol::Z, -1);
        assert_eq!(z.clone() * zinv, Poly::one());
        let a = z.clone() + Poly::symbol(Symbol::P);
        let diff = a.clone() * a.clone() - (z.clone() * z.clone() + Poly::symbol(Symbol::P) * Poly::symbol(Symbol::P));
        let two_zp = Poly::constant(2.into()) * z * Poly::symbol(Symbol::P);
        assert_eq!(diff, two_zp);
        assert!((a.clone() - a).is_zero());
    }

    #[test]
    fn evaluation() {
        let e = Poly::symbol_pow(GaussianRational::i(), Symbol::ExpIz, -2);
        let mut v = [Complex64::new(1.0, 0.0); 6];
        v[Symbol::ExpIz as usize] = Complex64::new(0.0, 2.0);
        assert!((e.eval(&v) - Complex64::new(0.0, -0.25)).norm() < 1e-15);
    }
}
