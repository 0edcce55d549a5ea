//! Exact algebra of the Birkhoff reduction: the constant matrices, a small
//! Laurent-polynomial ring for symbolic checks, and the identity verifiers.
//! [`build_t`] evaluates the diagonal exponent matrices in floating point.

pub mod constants;
pub mod identities;
pub mod matrix;
pub mod poly;
pub mod rational;

use num_complex::Complex64;

use crate::coefficients::PeriodicCoefficient;

pub use constants::{Constants, ConstantsError};
pub use identities::{det_omega, trace_w1_squared, verify_all, verify_all_with, IdentityReport};
pub use matrix::{ExactMatrix4, Matrix4};
pub use poly::{Poly, Symbol};
pub use rational::{GaussianRational, Ring};

/// `ω₁..ω₄ = i, 1, −1, −i`, the diagonal of 𝒯.
pub const OMEGA: [Complex64; 4] = [
    Complex64::new(0.0, 1.0),
    Complex64::new(1.0, 0.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// Diagonal of `T_σ(x, z)`, σ ∈ 1..=4 (`T₂ = T₁`). Returns `None` for any
/// other σ or `z = 0`.
pub fn build_t(
    sigma: u32,
    x: f64,
    z: Complex64,
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
) -> Option<[Complex64; 4]> {
    if !(1..=4).contains(&sigma) || z == Complex64::new(0.0, 0.0) {
        return None;
    }
    let pv = p.value(x);
    let qv = q.value(x);
    let i = Complex64::i();
    Some(std::array::from_fn(|k| {
        let w = OMEGA[k];
        let mut t = w + pv / (4.0 * z * z) * w.powi(3);
        if sigma >= 3 {
            t += (-qv / 4.0 + pv * pv / 32.0) / z.powi(4) * w;
        }
        if sigma == 4 {
            let dp = p.eval(x, 1).unwrap_or(0.0);
            let dq = q.eval(x, 1).unwrap_or(0.0);
            t += dq / (4.0 * z.powi(5)) * w + i * pv * dp / (64.0 * z.powi(5)) * (-3.0 + 4.0 * i * w);
        }
        t
    }))
}
