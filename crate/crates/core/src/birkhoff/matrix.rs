//! 4×4 matrices over an exact ring.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::rational::{GaussianRational, Ring};

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix4<R> {
    pub entries: [[R; 4]; 4],
}

/// 4×4 matrix of Gaussian rationals.
pub type ExactMatrix4 = Matrix4<GaussianRational>;

impl<R: Ring> Matrix4<R> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> R) -> Self {
        Self { entries: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))) }
    }

    pub fn zero() -> Self {
        Self::from_fn(|_, _| R::zero())
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { R::one() } else { R::zero() })
    }

    pub fn diag(d: [R; 4]) -> Self {
        Self::from_fn(|i, j| if i == j { d[i].clone() } else { R::zero() })
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.entries[i][j] = v;
    }

    pub fn scale(&self, s: &R) -> Self {
        Self::from_fn(|i, j| s.clone() * self.entries[i][j].clone())
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.clone() * other.clone() - other.clone() * self.clone()
    }

    pub fn trace(&self) -> R {
        (0..4).fold(R::zero(), |acc, i| acc + self.entries[i][i].clone())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(), |acc, _| acc * self.clone())
    }

    /// Leibniz expansion over the 24 permutations (valid over any commutative ring).
    pub fn det(&self) -> R {
        let mut acc = R::zero();
        for perm in PERMUTATIONS4 {
            let mut term = R::one();
            for (i, &j) in perm.0.iter().enumerate() {
                term = term * self.entries[i][j].clone();
            }
            acc = if perm.1 { acc + term } else { acc - term };
        }
        acc
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Matrix4<S> {
        Matrix4::from_fn(|i, j| f(&self.entries[i][j]))
    }

    /// First entry (row-major) where `self − other` is nonzero, with the difference.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize, R)> {
        for i in 0..4 {
            for j in 0..4 {
                let d = self.entries[i][j].clone() - other.entries[i][j].clone();
                if !d.is_zero() {
                    return Some((i, j, d));
                }
            }
        }
        None
    }
}

/// All permutations of 0..4 with their parity (true = even).
const PERMUTATIONS4: [([usize; 4], bool); 24] = {
    let mut out = [([0usize; 4], true); 24];
    let mut k = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                let mut d = 0;
                while d < 4 {
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        let p = [a, b, c, d];
                        let mut inv = 0;
                        let mut i = 0;
                        while i < 4 {
                            let mut j = i + 1;
                            while j < 4 {
                                if p[i] > p[j] {
                                    inv += 1;
                                }
                                j += 1;
                            }
                            i += 1;
                        }
                        out[k] = (p, inv % 2 == 0);
                        k += 1;
                    }
                    d += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

impl<R: Ring> Add for Matrix4<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.entries[i][j].clone() + o.entries[i][j].clone())
    }
}

impl<R: Ring> Sub for Matrix4<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.entries[i][j].clone() - o.entries[i][j].clone())
    }
}

impl<R: Ring> Neg for Matrix4<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.entries[i][j].clone())
    }
}

impl<R: Ring> Mul for Matrix4<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::from_fn(|i, j| {
            (0..4).fold(R::zero(), |acc, k| acc + self.entries[i][k].clone() * o.entries[k][j].clone())
        })
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Matrix4<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}
