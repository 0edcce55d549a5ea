//! The characteristic function
//! `D(λ) = −(φ₁(1)φ₃''(1) − φ₃(1)φ₁''(1))`, its unperturbed form
//! `D₀(λ) = −cos z cosh z`, and the branch `z = λ^{1/4}`.
//!
//! `D` is assembled from the `(0, 2)` component of the exterior product of the
//! first and third columns of `A(x, λ)`, integrated directly as a 6-vector.
//! Forming the same 2×2 minor from the 4×4 matrix subtracts two products of
//! size `e^{2 Re z}` to get something of size `e^{Re z}`, which is hopeless
//! beyond `z ≈ 20`; [`char_det_via_fundamental`] keeps that route for
//! cross-checking at small `|z|`.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::coefficients::PeriodicCoefficient;
use crate::ode::{self, OdeError, OdeOptions};

/// `mantissa · e^{log_scale}`, together with the branch value `z = λ^{1/4}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharValue {
    pub mantissa: Complex64,
    pub log_scale: f64,
    pub z: Complex64,
}

impl CharValue {
    /// The represented value; overflows to infinity for very large `log_scale`.
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    /// `ln |D|`.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }

    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    /// `self / other` computed by subtracting exponents first.
    pub fn ratio(&self, other: &CharValue) -> Complex64 {
        (self.mantissa / other.mantissa) * (self.log_scale - other.log_scale).exp()
    }
}

/// Principal quartic root with `arg z ∈ (−π/4, π/4]`. The negative real axis
/// (including `−0.0` imaginary part) maps to `arg z = π/4`.
pub fn z_of_lambda(lambda: Complex64) -> Complex64 {
    if lambda.re == 0.0 && lambda.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let r = lambda.norm().powf(0.25);
    let theta = if lambda.im == 0.0 && lambda.re < 0.0 {
        std::f64::consts::PI
    } else {
        lambda.arg()
    };
    Complex64::from_polar(r, theta / 4.0)
}

/// `D(λ)` in double precision.
pub fn char_det(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    lambda: Complex64,
    tolerance: f64,
) -> Result<CharValue, OdeError> {
    char_det_with(p, q, lambda, &OdeOptions::double(tolerance))
}

/// `D(λ)` from the compound system. The mantissa is normalized by the largest
/// component of the propagated bivector, so `|mantissa| ≤ 1` and a small
/// mantissa means `D` is small relative to the solution growth at this λ.
pub fn char_det_with(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    lambda: Complex64,
    opts: &OdeOptions,
) -> Result<CharValue, OdeError> {
    let bv = ode::integrate_exterior_pair(p, q, lambda, (0, 2), opts)?;
    let m = bv.components.iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(CharValue {
        mantissa: -bv.component(0, 2) / m,
        log_scale: bv.log_scale + m.ln(),
        z: z_of_lambda(lambda),
    })
}

/// `D(λ)` as the 2×2 minor of the full transfer matrix. Accurate only while
/// `e^{Re z + |Im z|}` is well inside the working precision.
pub fn char_det_via_fundamental(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    lambda: Complex64,
    opts: &OdeOptions,
) -> Result<CharValue, OdeError> {
    let a = ode::integrate_fundamental_with(p, q, lambda, opts)?;
    let m = &a.mantissa;
    Ok(CharValue {
        mantissa: -(m[0][0] * m[2][2] - m[0][2] * m[2][0]),
        log_scale: 2.0 * a.log_scale,
        z: z_of_lambda(lambda),
    })
}

/// `D₀(λ) = −cos z · cosh z`.
pub fn char_det_unperturbed(lambda: Complex64) -> Complex64 {
    char_det_unperturbed_scaled(lambda).value()
}

/// `D₀` with the growth `e^{|Re z| + |Im z|}` split off, valid for any `z`.
pub fn char_det_unperturbed_scaled(lambda: Complex64) -> CharValue {
    let z = z_of_lambda(lambda);
    let i = Complex64::i();
    let (ax, ay) = (z.re.abs(), z.im.abs());
    // cos z · e^{−|Im z|} and cosh z · e^{−|Re z|}: every exponent has Re ≤ 0.
    let cos_s = ((i * z - ay).exp() + (-i * z - ay).exp()) * 0.5;
    let cosh_s = ((z - ax).exp() + (-z - ax).exp()) * 0.5;
    CharValue { mantissa: -cos_s * cosh_s, log_scale: ax + ay, z }
}

/// `D(λ)/D₀(λ)` via log-magnitude subtraction.
pub fn ratio_to_unperturbed(d: &CharValue) -> Complex64 {
    let d0 = char_det_unperturbed_scaled(d.z.powi(4));
    d.ratio(&d0)
}

/// The real coordinate used for root finding on the real λ axis:
/// `λ = s|s|³`, so `s = z` for `λ ≥ 0` and `s = −|z|` for `λ < 0`.
pub fn lambda_of_real_coordinate(s: f64) -> f64 {
    s * s.abs().powi(3)
}

/// Inverse of [`lambda_of_real_coordinate`].
pub fn real_coordinate_of_lambda(lambda: f64) -> f64 {
    lambda.signum() * lambda.abs().powf(0.25)
}

/// Centre `π/2 + πn` of the n-th isolating disk in z.
pub fn disk_center(n: u32) -> f64 {
    std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * n as f64
}

/// Default isolating disk radius in z.
pub const DISK_RADIUS: f64 = FRAC_PI_4;

#[cfg(test)]
mod tests {
    use super::*;

    fn zero() -> PeriodicCoefficient {
        PeriodicCoefficient::zero()
    }

    #[test]
    fn branch_examples() {
        assert!((z_of_lambda(Complex64::new(16.0, 0.0)) - 2.0).norm() < 1e-15);
        let z = std::f64::consts::FRAC_PI_2 + 3.0 * std::f64::consts::PI;
        assert!((z_of_lambda(Complex64::new(z.powi(4), 0.0)) - z).norm() < 1e-13);
        let e = Complex64::from_polar(1.0, FRAC_PI_4);
        assert!((z_of_lambda(Complex64::new(-1.0, 0.0)) - e).norm() < 1e-15);
        assert!((z_of_lambda(Complex64::new(-1.0, -0.0)) - e).norm() < 1e-15);
        assert_eq!(z_of_lambda(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn branch_round_trip() {
        for k in 0..40 {
            let th = -3.1 + 0.155 * k as f64;
            let lam = Complex64::from_polar(1.0 + 37.0 * k as f64, th);
            let z = z_of_lambda(lam);
            assert!((z.powi(4) - lam).norm() / lam.norm() < 1e-14);
            assert!(z.arg() > -FRAC_PI_4 && z.arg() <= FRAC_PI_4 + 1e-15);
        }
    }

    #[test]
    fn unperturbed_values() {
        assert!((char_det_unperturbed(Complex64::new(0.0, 0.0)) + 1.0).norm() < 1e-15);
        let d1 = char_det_unperturbed(Complex64::new(1.0, 0.0));
        assert!((d1.re + 1f64.cos() * 1f64.cosh()).abs() < 1e-15);
        let d16 = char_det_unperturbed(Complex64::new(16.0, 0.0));
        assert!((d16.re - 1.565_625_835_315_743_7).abs() < 1e-12, "{d16}");
        for n in 0..6 {
            let mu = disk_center(n).powi(4);
            let d = char_det_unperturbed_scaled(Complex64::new(mu, 0.0));
            assert!(d.mantissa.norm() < 1e-12, "n={n} {:?}", d);
        }
        // far beyond f64 overflow of cosh
        let big = char_det_unperturbed_scaled(Complex64::new(800f64.powi(4), 0.0));
        assert!(big.mantissa.is_finite() && (big.log_scale - 800.0).abs() < 1e-9);
    }

    #[test]
    fn char_det_matches_closed_form_for_zero_coefficients() {
        let opts = OdeOptions::double(1e-12);
        let d = char_det_with(&zero(), &zero(), Complex64::new(0.0, 0.0), &opts).unwrap();
        assert!((d.value() + 1.0).norm() < 1e-12, "{:?}", d.value());
        let d = char_det_with(&zero(), &zero(), Complex64::new(1.0, 0.0), &opts).unwrap();
        assert!((d.value().re + 0.833_730_025_131_149).abs() < 1e-11);
        let d = char_det_with(&zero(), &zero(), Complex64::new(FRAC_PI_2_POW4, 0.0), &opts).unwrap();
        assert!(d.mantissa.norm() < 1e-10, "{:?}", d);
    }

    const FRAC_PI_2_POW4: f64 = std::f64::consts::FRAC_PI_2
        * std::f64::consts::FRAC_PI_2
        * std::f64::consts::FRAC_PI_2
        * std::f64::consts::FRAC_PI_2;

    #[test]
    fn ratio_to_unperturbed_on_grid() {
        let opts = OdeOptions::double(1e-12);
        for k in 0..12 {
            // real z between zeros and a few off-axis points
            let z = if k < 8 {
                Complex64::new(std::f64::consts::PI * (k as f64 + 1.0) * 2.37, 0.0)
            } else {
                Complex64::new(8.0 * k as f64, 3.0)
            };
            let d = char_det_with(&zero(), &zero(), z.powi(4), &opts).unwrap();
            let r = ratio_to_unperturbed(&d);
            assert!((r - 1.0).norm() < 1e-8, "z={z} r={r}");
        }
    }

    #[test]
    fn compound_route_agrees_with_fundamental_route_at_small_z() {
        let p = PeriodicCoefficient::sine(1, 1.0);
        let q = PeriodicCoefficient::cosine(1, 1.0);
        let opts = OdeOptions::double(1e-12);
        for &z in &[Complex64::new(1.3, 0.0), Complex64::new(4.0, 1.0), Complex64::new(5.5, -0.7)] {
            let a = char_det_with(&p, &q, z.powi(4), &opts).unwrap();
            let b = char_det_via_fundamental(&p, &q, z.powi(4), &opts).unwrap();
            let r = a.ratio(&b);
            assert!((r - 1.0).norm() < 1e-7, "z={z} r={r}");
        }
    }

    #[test]
    fn real_and_schwarz_symmetric() {
        let p = PeriodicCoefficient::sine(1, 1.0);
        let q = PeriodicCoefficient::cosine(1, 1.0);
        let opts = OdeOptions::double(1e-12);
        for &lam in &[3.0, 250.0, 4.1e4, 2.0e6] {
            let d = char_det_with(&p, &q, Complex64::new(lam, 0.0), &opts).unwrap();
            assert!(d.mantissa.im.abs() / d.mantissa.norm() < 1e-8, "λ={lam} {:?}", d);
        }
        let lam = Complex64::new(5.0e4, 2.0e4);
        let a = char_det_with(&p, &q, lam, &opts).unwrap();
        let b = char_det_with(&p, &q, lam.conj(), &opts).unwrap();
        let diff = a.ratio(&CharValue { mantissa: b.mantissa.conj(), ..b });
        assert!((diff - 1.0).norm() < 1e-8);
    }

    #[test]
    fn real_coordinate_round_trip() {
        for &s in &[-3.0, -0.5, 0.0, 0.7, 12.0] {
            let lam = lambda_of_real_coordinate(s);
            assert!((real_coordinate_of_lambda(lam) - s).abs() < 1e-14);
        }
    }
}
