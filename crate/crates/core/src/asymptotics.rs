//! High-energy eigenvalue expansions, the κ sequences, phase functions, the
//! leading γ terms and the asymptotic form of `D` on the circles between
//! eigenvalues; plus an empirical fit of the remainder order.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::characteristic::{z_of_lambda, CharValue};
use crate::coefficients::{CoefficientError, PeriodicCoefficient};
use crate::quadrature;
use crate::scalar::Precision;
use crate::spectrum::EigenvalueRecord;

/// Truncation order of the eigenvalue expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    /// `(π/2+πn)⁴`.
    Rough,
    /// Adds `(π/2+πn)²(p̂_cn − p₀)`.
    L1,
    /// `−(π/2+πn)p̂′_sn/2` in place of the `p̂_cn` term; needs `p′`.
    P1,
    /// Constant block and `−p̂″_cn/4 + q̂_cn`; needs `p″`.
    P2,
    /// Constant block plus `q̂_cn`, error `O(n⁻²)`; needs `p‴`, `q′`.
    P3Full,
}

impl Order {
    pub const ALL: [Order; 5] = [Order::Rough, Order::L1, Order::P1, Order::P2, Order::P3Full];

    pub fn name(self) -> &'static str {
        match self {
            Order::Rough => "rough",
            Order::L1 => "L1",
            Order::P1 => "p1",
            Order::P2 => "p2",
            Order::P3Full => "p3_full",
        }
    }

    /// Derivatives of (p, q) the formula consumes.
    pub fn required_smoothness(self) -> (u32, u32) {
        match self {
            Order::Rough | Order::L1 => (0, 0),
            Order::P1 => (1, 0),
            Order::P2 => (2, 0),
            Order::P3Full => (3, 1),
        }
    }
}

impl std::str::FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Order::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown order `{s}` (expected rough, L1, p1, p2 or p3_full)"))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("order {order} needs more smoothness: {source}")]
    UnsupportedOrder { order: &'static str, source: CoefficientError },
    #[error("index n must be at least 1")]
    BadIndex,
    #[error("σ must be in 1..=4, got {0}")]
    BadSigma(u32),
    #[error("asymptotic form of D needs |z| > 10, got |z| = {0}")]
    SmallZ(f64),
    #[error("need at least {need} records with consecutive indices n ≥ 4, got {got}")]
    TooFewRecords { need: usize, got: usize },
}

/// Named pieces of a truncated expansion; `value` is their sum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Terms {
    /// `(π/2+πn)⁴`.
    pub leading: f64,
    /// Terms proportional to `(π/2+πn)²`.
    pub p_term: f64,
    /// `−(π/2+πn)p̂′_sn/2`.
    pub p_prime_term: f64,
    /// `(p₀²−‖p‖²)/8 + q₀`, with `−p′(0)/2` where the formula displays it.
    pub constant: f64,
    /// Remaining n-dependent Fourier terms.
    pub oscillatory: f64,
}

impl Terms {
    pub fn sum(&self) -> f64 {
        self.leading + self.p_term + self.p_prime_term + self.constant + self.oscillatory
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticEigenvalue {
    pub n: u32,
    pub order: Order,
    pub value: f64,
    pub terms: Terms,
    /// For [`Order::P3Full`]: the same order written with `p̂‴_sn` and `q̂′_sn`.
    pub derivative_form: Option<Terms>,
}

struct Data {
    m: f64,
    p0: f64,
    q0: f64,
    p_norm_sq: f64,
    dp0: f64,
    p_cn: f64,
    dp_sn: f64,
    ddp_cn: f64,
    dddp_sn: f64,
    q_cn: f64,
    dq_sn: f64,
}

fn fourier_of(c: &PeriodicCoefficient, k: u32, n: u32) -> Result<crate::coefficients::FourierRecord, CoefficientError> {
    Ok(c.derivative(k)?.fourier(n))
}

fn gather(p: &PeriodicCoefficient, q: &PeriodicCoefficient, n: u32, order: Order) -> Result<Data, AsymptoticsError> {
    let (dp, dq) = order.required_smoothness();
    let wrap = |source| AsymptoticsError::UnsupportedOrder { order: order.name(), source };
    let pd = |k: u32| if k <= dp { fourier_of(p, k, n).map_err(wrap) } else { Ok(p.fourier(n)) };
    let qd = |k: u32| if k <= dq { fourier_of(q, k, n).map_err(wrap) } else { Ok(q.fourier(n)) };
    Ok(Data {
        m: PI / 2.0 + PI * n as f64,
        p0: p.mean(),
        q0: q.mean(),
        p_norm_sq: p.l2_norm_sq(),
        dp0: if dp >= 1 { p.eval(0.0, 1).map_err(wrap)? } else { 0.0 },
        p_cn: p.fourier(n).f_hat_cn,
        dp_sn: if dp >= 1 { pd(1)?.f_hat_sn } else { 0.0 },
        ddp_cn: if dp >= 2 { pd(2)?.f_hat_cn } else { 0.0 },
        dddp_sn: if dp >= 3 { pd(3)?.f_hat_sn } else { 0.0 },
        q_cn: q.fourier(n).f_hat_cn,
        dq_sn: if dq >= 1 { qd(1)?.f_hat_sn } else { 0.0 },
    })
}

/// Truncated expansion of `μₙ`, each order exactly as displayed.
pub fn mu_asymptotic(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    n: u32,
    order: Order,
) -> Result<AsymptoticEigenvalue, AsymptoticsError> {
    if n == 0 {
        return Err(AsymptoticsError::BadIndex);
    }
    let d = gather(p, q, n, order)?;
    let m2 = d.m * d.m;
    let base = (d.p0 * d.p0 - d.p_norm_sq) / 8.0 + d.q0;
    let mut terms = Terms { leading: m2 * m2, ..Terms::default() };
    let mut derivative_form = None;
    match order {
        Order::Rough => {}
        Order::L1 => terms.p_term = m2 * (d.p_cn - d.p0),
        Order::P1 => {
            terms.p_term = -m2 * d.p0;
            terms.p_prime_term = -d.m * d.dp_sn / 2.0;
        }
        Order::P2 => {
            terms.p_term = -m2 * d.p0;
            terms.constant = base - d.dp0 / 2.0;
            terms.oscillatory = -d.ddp_cn / 4.0 + d.q_cn;
        }
        Order::P3Full => {
            terms.p_term = m2 * (d.p_cn - d.p0);
            terms.constant = base;
            terms.oscillatory = d.q_cn;
            let b = PI * (2 * n + 1) as f64;
            derivative_form = Some(Terms {
                leading: terms.leading,
                p_term: -m2 * d.p0,
                p_prime_term: 0.0,
                constant: base - d.dp0 / 2.0,
                oscillatory: d.dddp_sn / (4.0 * b) - d.dq_sn / b,
            });
        }
    }
    Ok(AsymptoticEigenvalue { n, order, value: terms.sum(), terms, derivative_form })
}

/// Graded levels per endpoint for the κ integrals.
const KAPPA_LEVELS: usize = 24;

/// `ϰ_{σ,n}`: an integral of `e^{−π(2n+1)s}` against a symmetric or
/// antisymmetric combination of derivatives of p and q.
pub fn kappa(p: &PeriodicCoefficient, q: &PeriodicCoefficient, sigma: u32, n: u32) -> Result<f64, AsymptoticsError> {
    let order = match sigma {
        1 => Order::L1,
        2 => Order::P1,
        3 => Order::P2,
        4 => Order::P3Full,
        s => return Err(AsymptoticsError::BadSigma(s)),
    };
    let wrap = |source| AsymptoticsError::UnsupportedOrder { order: order.name(), source };
    let b = PI * (2 * n + 1) as f64;
    let (scale, pk, qk, sign, q_weight) = match sigma {
        1 => (0.25, 0, None, -1.0, 0.0),
        2 => (0.125, 1, None, 1.0, 0.0),
        3 => (1.0 / 16.0, 2, Some(0), -1.0, -4.0),
        _ => (1.0 / 32.0, 3, Some(1), 1.0, -4.0),
    };
    let dp = p.derivative(pk).map_err(wrap)?;
    let dq = match qk {
        Some(k) => q.derivative(k).map_err(wrap)?,
        None => PeriodicCoefficient::zero(),
    };
    let integral = quadrature::graded(KAPPA_LEVELS, |s| {
        let f = |x: f64| dp.value(x) + q_weight * dq.value(x);
        (-b * s).exp() * (f(s) + sign * f(1.0 - s))
    });
    Ok(scale * integral)
}

/// `(ψ₁, ψ₂) = ((1−i)p′(0)/8, (1+i)p′(0)/8)`.
pub fn psi_pair(p: &PeriodicCoefficient) -> Result<(Complex64, Complex64), AsymptoticsError> {
    let dp0 = p
        .eval(0.0, 1)
        .map_err(|source| AsymptoticsError::UnsupportedOrder { order: Order::P2.name(), source })?;
    Ok((Complex64::new(1.0, -1.0) * dp0 / 8.0, Complex64::new(1.0, 1.0) * dp0 / 8.0))
}

/// `(α_σ(z), β_σ(z))`, the integrals of the second and first diagonal entries of `T_σ`.
pub fn phase_pair(p: &PeriodicCoefficient, q: &PeriodicCoefficient, sigma: u32, z: Complex64) -> Result<(Complex64, Complex64), AsymptoticsError> {
    let i = Complex64::i();
    let z2 = z * z;
    let (p0, q0, pn) = (p.mean(), q.mean(), p.l2_norm_sq());
    match sigma {
        1 | 2 => Ok((1.0 + p0 / (4.0 * z2), i - i * p0 / (4.0 * z2))),
        3 | 4 => {
            let z4 = z2 * z2;
            let quartic = pn / (32.0 * z4) - q0 / (4.0 * z4);
            Ok((1.0 + quartic + p0 / (4.0 * z2), i + i * quartic - i * p0 / (4.0 * z2)))
        }
        s => Err(AsymptoticsError::BadSigma(s)),
    }
}

/// Leading terms of `(γ_{σ,1}(z), γ_{σ,2}(z))`, remainders dropped.
pub fn gamma_leading(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    sigma: u32,
    n: u32,
    z: Complex64,
) -> Result<(Complex64, Complex64), AsymptoticsError> {
    let i = Complex64::i();
    let k = kappa(p, q, sigma, n)?;
    let order = match sigma {
        1 => Order::L1,
        2 => Order::P1,
        3 => Order::P2,
        _ => Order::P3Full,
    };
    let d = gather(p, q, n, order)?;
    Ok(match sigma {
        1 => (i * d.p_cn / (2.0 * z) + k / z, k / z + 0.0 * i),
        2 => {
            let z2 = z * z;
            (-i * d.dp_sn / (4.0 * z2) + k / z2, k / z2 + 0.0 * i)
        }
        3 => {
            let (psi1, psi2) = psi_pair(p)?;
            let z3 = z * z * z;
            ((psi1 - i * d.ddp_cn / 8.0 + i * d.q_cn / 2.0 + k) / z3, (psi2 + k) / z3)
        }
        _ => {
            let (psi1, psi2) = psi_pair(p)?;
            let z3 = z * z * z;
            let z4 = z3 * z;
            let p00 = p.value(0.0);
            let common = (3.0 * p00 * p00 / 32.0 + k) / z4;
            (psi1 / z3 + common + (i * d.dddp_sn / 16.0 - i * d.dq_sn / 4.0) / z4, psi2 / z3 + common)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharAsymptotic {
    pub value: CharValue,
    /// Disk index used for `ϰ_{4,n}`.
    pub n: u32,
    /// `|cos α₄z| < 1e−3`: the tangent term is unreliable here.
    pub near_zero: bool,
}

/// `−e^{−iβ₄z} cos(α₄z)/2 · (1 + ϰ_{4,n}/z⁴ + p′(0)(1 − tan α₄z)/(8z³))`.
pub fn char_asymptotic(p: &PeriodicCoefficient, q: &PeriodicCoefficient, lambda: Complex64) -> Result<CharAsymptotic, AsymptoticsError> {
    let z = z_of_lambda(lambda);
    if z.norm() <= 10.0 {
        return Err(AsymptoticsError::SmallZ(z.norm()));
    }
    let i = Complex64::i();
    let n = ((z.re - PI / 2.0) / PI).round().max(1.0) as u32;
    let (alpha, beta) = phase_pair(p, q, 4, z)?;
    let k4 = kappa(p, q, 4, n)?;
    let dp0 = p
        .eval(0.0, 1)
        .map_err(|source| AsymptoticsError::UnsupportedOrder { order: Order::P3Full.name(), source })?;
    let w = alpha * z;
    let growth = w.im.abs();
    let e1 = (i * w - growth).exp();
    let e2 = (-i * w - growth).exp();
    let cos_s = (e1 + e2) * 0.5;
    let sin_s = (e1 - e2) / (2.0 * i);
    let tan = sin_s / cos_s;
    let near_zero = cos_s.norm().ln() + growth < 1e-3f64.ln();
    let bracket = 1.0 + k4 / z.powi(4) + dp0 * (1.0 - tan) / (8.0 * z.powi(3));
    let expo = -i * beta * z;
    let mantissa = -Complex64::from_polar(1.0, expo.im) * cos_s * bracket * 0.5;
    Ok(CharAsymptotic { value: CharValue { mantissa, log_scale: expo.re + growth, z }, n, near_zero })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualPoint {
    pub n: u32,
    pub numeric: f64,
    pub asymptotic: f64,
    pub residual: f64,
    /// Below the noise floor and left out of the fit.
    pub excluded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStatus {
    Fitted,
    /// Fewer than two usable points: every residual sat at the noise floor.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualFit {
    pub order: Order,
    pub status: FitStatus,
    /// Least-squares slope of `ln|r|` against `ln n` (NaN if inconclusive).
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<ResidualPoint>,
}

impl ResidualFit {
    pub fn excluded_points(&self) -> usize {
        self.points.iter().filter(|p| p.excluded).count()
    }
}

/// Noise floor for a residual against `μ`: the larger of storage rounding
/// and the integrator's accuracy. Observed relative error in `μ` runs at a
/// few times the ODE tolerance, hence the factor 16.
pub fn noise_floor(mu: f64, precision: Precision, ode_tolerance: f64) -> f64 {
    let eps = match precision {
        Precision::Double => f64::EPSILON,
        // results are stored as f64, so the floor only shrinks by the rounding of the final value
        Precision::Extended => f64::EPSILON / 8.0,
    };
    (64.0 * eps).max(16.0 * ode_tolerance) * mu.abs()
}

/// Fits `ln|μₙ − μₙ^{asym}| ≈ slope · ln n + intercept`.
pub fn fit_residual_order(
    numeric: &[EigenvalueRecord],
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    order: Order,
) -> Result<ResidualFit, AsymptoticsError> {
    const NEED: usize = 6;
    let mut recs: Vec<&EigenvalueRecord> = numeric.iter().filter(|r| r.index >= 4).collect();
    recs.sort_by_key(|r| r.index);
    let consecutive = recs.windows(2).all(|w| w[1].index == w[0].index + 1);
    if recs.len() < NEED || !consecutive {
        return Err(AsymptoticsError::TooFewRecords { need: NEED, got: if consecutive { recs.len() } else { 0 } });
    }
    let mut points = Vec::with_capacity(recs.len());
    for r in recs {
        let a = mu_asymptotic(p, q, r.index, order)?.value;
        let residual = r.mu - a;
        let excluded = residual.abs() < noise_floor(r.mu, r.precision, r.ode_tolerance);
        points.push(ResidualPoint { n: r.index, numeric: r.mu, asymptotic: a, residual, excluded });
    }
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|pt| !pt.excluded)
        .map(|pt| ((pt.n as f64).ln(), pt.residual.abs().ln()))
        .collect();
    if xy.len() < 2 {
        return Ok(ResidualFit { order, status: FitStatus::Inconclusive, slope: f64::NAN, intercept: f64::NAN, points });
    }
    let k = xy.len() as f64;
    let (mx, my) = (xy.iter().map(|v| v.0).sum::<f64>() / k, xy.iter().map(|v| v.1).sum::<f64>() / k);
    let sxy: f64 = xy.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xy.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(ResidualFit { order, status: FitStatus::Fitted, slope, intercept: my - slope * mx, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristic::char_det_unperturbed_scaled;
    use crate::coefficients::Harmonic;

    fn zero() -> PeriodicCoefficient {
        PeriodicCoefficient::zero()
    }

    fn trig(c: f64, h: &[(u32, f64, f64)]) -> PeriodicCoefficient {
        PeriodicCoefficient::new(c, h.iter().map(|&(k, a, b)| Harmonic { k, a, b }).collect()).unwrap()
    }

    #[test]
    fn unperturbed_all_orders() {
        for order in Order::ALL {
            for n in [1, 5, 17] {
                let a = mu_asymptotic(&zero(), &zero(), n, order).unwrap();
                let m = PI / 2.0 + PI * n as f64;
                assert!((a.value - m.powi(4)).abs() <= 1e-15 * a.value);
                assert_eq!(a.terms.p_term + a.terms.p_prime_term + a.terms.constant + a.terms.oscillatory, 0.0);
            }
        }
    }

    #[test]
    fn constant_q_shift() {
        let q = PeriodicCoefficient::constant(3.5);
        let a = mu_asymptotic(&zero(), &q, 7, Order::P3Full).unwrap();
        assert!((a.value - ((PI / 2.0 + 7.0 * PI).powi(4) + 3.5)).abs() < 1e-9);
        assert!(q.fourier(7).f_hat_cn.abs() < 1e-16);
    }

    #[test]
    fn l1_example() {
        let p = PeriodicCoefficient::sine(1, 1.0);
        let m = PI / 2.0 + 6.0 * PI;
        let want = m.powi(4) + m * m * (4.0 / (PI * 15.0 * -11.0));
        let got = mu_asymptotic(&p, &zero(), 6, Order::L1).unwrap().value;
        assert!((got - want).abs() < 1e-9 * want, "{got} {want}");
    }

    #[test]
    fn forms_agree() {
        let p = trig(0.3, &[(1, 0.7, -0.4), (3, 0.1, 0.25)]);
        let q = trig(-1.2, &[(2, 0.5, 0.9), (1, -0.3, 0.0)]);
        for n in 3..=30 {
            let a = mu_asymptotic(&p, &q, n, Order::P3Full).unwrap();
            let b = a.derivative_form.unwrap().sum();
            assert!((a.value - b).abs() <= 1e-10 * a.value.abs(), "n={n}");
            // lower orders are rearrangements of the same leading terms
            let l1 = mu_asymptotic(&p, &q, n, Order::L1).unwrap();
            let p1 = mu_asymptotic(&p, &q, n, Order::P1).unwrap();
            assert!((l1.value - p1.value).abs() <= 1e-11 * l1.value);
        }
    }

    #[test]
    fn insufficient_smoothness_is_reported() {
        let samples: Vec<f64> = (0..32).map(|k| (2.0 * PI * k as f64 / 32.0).sin()).collect();
        let p = PeriodicCoefficient::from_samples(&samples, 1).unwrap();
        assert!(mu_asymptotic(&p, &zero(), 4, Order::P1).is_ok());
        assert!(matches!(mu_asymptotic(&p, &zero(), 4, Order::P2), Err(AsymptoticsError::UnsupportedOrder { .. })));
        assert!(matches!(mu_asymptotic(&zero(), &zero(), 0, Order::L1), Err(AsymptoticsError::BadIndex)));
    }

    #[test]
    fn kappa_examples() {
        let c = PeriodicCoefficient::cosine(1, 1.0);
        let s = PeriodicCoefficient::sine(1, 1.0);
        assert!(kappa(&c, &zero(), 1, 3).unwrap().abs() < 1e-16);
        let want = (1.0 - (-3.0 * PI).exp()) / (13.0 * PI);
        assert!((kappa(&s, &zero(), 1, 1).unwrap() - want).abs() < 1e-14);
        assert!((want - 0.024483).abs() < 1e-6);
        assert_eq!(kappa(&PeriodicCoefficient::constant(2.0), &zero(), 2, 5).unwrap(), 0.0);
    }

    #[test]
    fn kappa_closed_form_all_sigma() {
        // ∫₀¹ e^{−bs} cos(cs) ds and ∫₀¹ e^{−bs} sin(cs) ds for c = 2πk
        let ec = |b: f64, c: f64| b * (1.0 - (-b).exp()) / (b * b + c * c);
        let es = |b: f64, c: f64| c * (1.0 - (-b).exp()) / (b * b + c * c);
        let p = PeriodicCoefficient::sine(2, 1.0);
        let q = PeriodicCoefficient::cosine(1, 1.0);
        for n in [1u32, 4, 11] {
            let b = PI * (2 * n + 1) as f64;
            let (w1, w2) = (4.0 * PI, 2.0 * PI);
            // p = sin w1 s: p − p(1−·) = 2 sin, p′ + p′(1−·) = 2w1 cos, p″ − … = −2w1² sin, p‴ + … = −2w1³ cos
            // q = cos w2 s: q − q(1−·) = 0, q′ + q′(1−·) = 0
            let want = [
                0.25 * 2.0 * es(b, w1),
                0.125 * 2.0 * w1 * ec(b, w1),
                (1.0 / 16.0) * -2.0 * w1 * w1 * es(b, w1),
                (1.0 / 32.0) * -2.0 * w1.powi(3) * ec(b, w1),
            ];
            let _ = w2;
            for sigma in 1..=4 {
                let got = kappa(&p, &q, sigma, n).unwrap();
                assert!((got - want[sigma as usize - 1]).abs() < 1e-12 * (1.0 + want[sigma as usize - 1].abs()), "σ={sigma} n={n}");
            }
        }
        // an antisymmetric q feeds σ = 3, 4
        let qs = PeriodicCoefficient::sine(1, 1.0);
        let b = 3.0 * PI;
        let got = kappa(&zero(), &qs, 3, 1).unwrap();
        assert!((got - (1.0 / 16.0) * -4.0 * 2.0 * es(b, 2.0 * PI)).abs() < 1e-14);
        let got = kappa(&zero(), &qs, 4, 1).unwrap();
        assert!((got - (1.0 / 32.0) * -4.0 * 2.0 * 2.0 * PI * ec(b, 2.0 * PI)).abs() < 1e-13);
    }

    #[test]
    fn kappa_bounded_and_decaying() {
        let p = trig(0.0, &[(1, 0.4, 1.0), (2, -0.3, 0.6)]);
        let q = trig(0.5, &[(1, 0.8, -0.5)]);
        for sigma in 1..=4 {
            let k1 = kappa(&p, &q, sigma, 1).unwrap().abs();
            let k2 = kappa(&p, &q, sigma, 2).unwrap().abs();
            for n in 1..=40 {
                let k = kappa(&p, &q, sigma, n).unwrap().abs();
                assert!(k <= 2.0 * k1.max(1e-300) + 1e-15, "σ={sigma} n={n}");
                assert!(k <= 2.0 * k2 * 2.0 / n as f64 + 1e-15, "σ={sigma} n={n} decay");
            }
        }
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_pair(&PeriodicCoefficient::constant(3.0)).unwrap(), (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
        let (a, b) = psi_pair(&PeriodicCoefficient::sine(1, 1.0)).unwrap();
        assert!((a - Complex64::new(PI / 4.0, -PI / 4.0)).norm() < 1e-15);
        assert!((b - Complex64::new(PI / 4.0, PI / 4.0)).norm() < 1e-15);
        let p = trig(0.1, &[(3, 0.2, -0.7)]);
        let (a, b) = psi_pair(&p).unwrap();
        assert!((a + b - p.eval(0.0, 1).unwrap() / 4.0).norm() < 1e-15);
    }

    #[test]
    fn phases_tend_to_limits() {
        let p = trig(0.7, &[(1, 0.3, 0.2)]);
        let q = trig(1.1, &[(2, 0.4, 0.0)]);
        for sigma in 1..=4 {
            for r in [20.0, 40.0, 80.0] {
                let z = Complex64::from_polar(r, 0.3);
                let (a, b) = phase_pair(&p, &q, sigma, z).unwrap();
                assert!((a - 1.0).norm() <= 1.0 / (r * r));
                assert!((b - Complex64::i()).norm() <= 1.0 / (r * r));
            }
        }
        // σ = 3 against direct quadrature of the second diagonal entry of T₃
        let z = Complex64::new(12.0, 0.4);
        let (a, _) = phase_pair(&p, &q, 3, z).unwrap();
        let re = quadrature::composite(0.0, 1.0, 8, |x| crate::birkhoff::build_t(3, x, z, &p, &q).unwrap()[1].re);
        let im = quadrature::composite(0.0, 1.0, 8, |x| crate::birkhoff::build_t(3, x, z, &p, &q).unwrap()[1].im);
        assert!((a - Complex64::new(re, im)).norm() < 1e-14);
    }

    #[test]
    fn gamma_vanishing_cases() {
        let z = Complex64::new(20.0, 1.0);
        let zero_pair = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(gamma_leading(&zero(), &zero(), 1, 6, z).unwrap(), zero_pair);
        let (g1, g2) = gamma_leading(&PeriodicCoefficient::cosine(1, 1.0), &zero(), 1, 6, z).unwrap();
        assert!(g1.norm() < 1e-16 && g2.norm() < 1e-16);
        let (g1, g2) = gamma_leading(&PeriodicCoefficient::constant(2.0), &zero(), 3, 6, z).unwrap();
        assert!(g1.norm() < 1e-16 && g2.norm() < 1e-16);
    }

    #[test]
    fn char_asymptotic_unperturbed() {
        for k in 0..16 {
            let z = 10.5 + 2.0 * k as f64;
            let lam = Complex64::new(z.powi(4), 0.0);
            let a = char_asymptotic(&zero(), &zero(), lam).unwrap();
            let d0 = char_det_unperturbed_scaled(lam);
            let r = d0.ratio(&a.value);
            assert!((r - 1.0).norm() < (-2.0 * z).exp() + 1e-10, "z={z} r={r}");
        }
        assert!(matches!(char_asymptotic(&zero(), &zero(), Complex64::new(81.0, 0.0)), Err(AsymptoticsError::SmallZ(_))));
    }

    #[test]
    fn char_asymptotic_constant_p() {
        let p = PeriodicCoefficient::constant(2.0);
        let z = Complex64::from_polar(PI * 8.0, 0.5);
        let a = char_asymptotic(&p, &zero(), z.powi(4)).unwrap();
        assert!(a.value.mantissa.is_finite() && !a.near_zero);
        let (al, be) = phase_pair(&p, &zero(), 4, z).unwrap();
        let z2 = z * z;
        assert!((al - (1.0 + 0.5 / z2 + 4.0 / (32.0 * z2 * z2))).norm() < 1e-15);
        assert!((be - Complex64::i() * (1.0 + 4.0 / (32.0 * z2 * z2) - 0.5 / z2)).norm() < 1e-15);
        assert_eq!(kappa(&p, &zero(), 4, a.n).unwrap(), 0.0);
    }

    #[test]
    fn order_parse() {
        for o in Order::ALL {
            assert_eq!(o.name().parse::<Order>().unwrap(), o);
        }
        assert!("p4".parse::<Order>().is_err());
    }
}
