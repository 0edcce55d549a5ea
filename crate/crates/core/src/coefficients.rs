//! Real 1-periodic coefficients as finite trigonometric polynomials.
//!
//! A coefficient is `a0 + Σ_k (a_k cos 2πkx + b_k sin 2πkx)`. Derivatives,
//! pointwise values and the half-integer Fourier functionals
//! `∫ f(x) cos π(2n+1)x dx`, `∫ f(x) sin π(2n+1)x dx` all have closed forms.

use std::f64::consts::PI;
use std::ops::Add;

use num_complex::Complex64;
use thiserror::Error;

use crate::quadrature;

/// Highest harmonic accepted by the solver.
pub const MAX_DEGREE: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoefficientError {
    #[error("derivative of order {requested} requested but the coefficient only declares smoothness {declared}")]
    UnsupportedDerivative { requested: u32, declared: u32 },
    #[error("harmonic index {0} outside 1..={MAX_DEGREE}")]
    BadHarmonic(u32),
    #[error("smoothness order {0} outside 0..=4")]
    BadSmoothness(u32),
    #[error("non-finite coefficient value")]
    NonFinite,
    #[error("need at least one sample")]
    NoSamples,
    #[error("quadrature did not converge: estimated error {estimate:e}")]
    Accuracy { estimate: f64 },
}

/// One term `a cos 2πkx + b sin 2πkx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub k: u32,
    pub a: f64,
    pub b: f64,
}

/// How the coefficient was supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Trigonometric,
    /// Converted from uniform samples; derivatives beyond the declared
    /// smoothness are refused.
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicCoefficient {
    constant_term: f64,
    harmonics: Vec<Harmonic>,
    smoothness_order: u32,
    representation: Representation,
}

/// Half-integer-frequency Fourier data of a coefficient at index `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierRecord {
    pub n: u32,
    pub f0: f64,
    pub f_hat_cn: f64,
    pub f_hat_sn: f64,
    pub f_hat_n: Complex64,
}

impl FourierRecord {
    fn new(n: u32, f0: f64, cn: f64, sn: f64) -> Self {
        Self {
            n,
            f0,
            f_hat_cn: cn,
            f_hat_sn: sn,
            f_hat_n: Complex64::new(cn, -sn),
        }
    }
}

impl PeriodicCoefficient {
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            constant_term: c,
            harmonics: Vec::new(),
            smoothness_order: 4,
            representation: Representation::Trigonometric,
        }
    }

    /// Builds a trig polynomial. Repeated `k` entries are summed; zero terms are kept
    /// so the harmonic list round-trips through configuration files unchanged.
    pub fn new(constant_term: f64, harmonics: Vec<Harmonic>) -> Result<Self, CoefficientError> {
        if !constant_term.is_finite() {
            return Err(CoefficientError::NonFinite);
        }
        let mut merged: Vec<Harmonic> = Vec::with_capacity(harmonics.len());
        for h in harmonics {
            if h.k == 0 || h.k > MAX_DEGREE {
                return Err(CoefficientError::BadHarmonic(h.k));
            }
            if !h.a.is_finite() || !h.b.is_finite() {
                return Err(CoefficientError::NonFinite);
            }
            match merged.iter_mut().find(|m| m.k == h.k) {
                Some(m) => {
                    m.a += h.a;
                    m.b += h.b;
                }
                None => merged.push(h),
            }
        }
        merged.sort_by_key(|h| h.k);
        Ok(Self {
            constant_term,
            harmonics: merged,
            smoothness_order: 4,
            representation: Representation::Trigonometric,
        })
    }

    /// `sin 2πkx` scaled by `amp`.
    pub fn sine(k: u32, amp: f64) -> Self {
        Self::new(0.0, vec![Harmonic { k, a: 0.0, b: amp }]).expect("valid harmonic")
    }

    /// `cos 2πkx` scaled by `amp`.
    pub fn cosine(k: u32, amp: f64) -> Self {
        Self::new(0.0, vec![Harmonic { k, a: amp, b: 0.0 }]).expect("valid harmonic")
    }

    /// Trigonometric interpolant of samples `f(j/M)`, `j = 0..M`.
    pub fn from_samples(samples: &[f64], smoothness_order: u32) -> Result<Self, CoefficientError> {
        if samples.is_empty() {
            return Err(CoefficientError::NoSamples);
        }
        if smoothness_order > 4 {
            return Err(CoefficientError::BadSmoothness(smoothness_order));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(CoefficientError::NonFinite);
        }
        let m = samples.len();
        let mf = m as f64;
        let a0 = samples.iter().sum::<f64>() / mf;
        let kmax = (m / 2).min(MAX_DEGREE as usize);
        let mut harmonics = Vec::new();
        for k in 1..=kmax {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, &v) in samples.iter().enumerate() {
                let theta = 2.0 * PI * (k * j % m) as f64 / mf;
                a += v * theta.cos();
                b += v * theta.sin();
            }
            // Nyquist term for even M carries weight 1/M, others 2/M.
            let w = if 2 * k == m { 1.0 / mf } else { 2.0 / mf };
            let (a, b) = if 2 * k == m { (a * w, 0.0) } else { (a * w, b * w) };
            harmonics.push(Harmonic { k: k as u32, a, b });
        }
        let mut c = Self::new(a0, harmonics)?;
        c.smoothness_order = smoothness_order;
        c.representation = Representation::Sampled;
        Ok(c)
    }

    pub fn with_smoothness(mut self, order: u32) -> Result<Self, CoefficientError> {
        if order > 4 {
            return Err(CoefficientError::BadSmoothness(order));
        }
        self.smoothness_order = order;
        Ok(self)
    }

    pub fn constant_term(&self) -> f64 {
        self.constant_term
    }

    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    pub fn smoothness_order(&self) -> u32 {
        self.smoothness_order
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn degree(&self) -> u32 {
        self.harmonics.iter().map(|h| h.k).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.constant_term == 0.0 && self.harmonics.iter().all(|h| h.a == 0.0 && h.b == 0.0)
    }

    /// Mean over a period; exactly the constant term.
    pub fn mean(&self) -> f64 {
        self.constant_term
    }

    fn check_order(&self, order: u32) -> Result<(), CoefficientError> {
        if self.representation == Representation::Sampled && order > self.smoothness_order {
            return Err(CoefficientError::UnsupportedDerivative {
                requested: order,
                declared: self.smoothness_order,
            });
        }
        Ok(())
    }

    /// The `order`-th derivative as a trig polynomial.
    pub fn derivative(&self, order: u32) -> Result<Self, CoefficientError> {
        self.check_order(order)?;
        if order == 0 {
            return Ok(self.clone());
        }
        let harmonics = self
            .harmonics
            .iter()
            .map(|h| {
                let w = 2.0 * PI * h.k as f64;
                let scale = w.powi(order as i32);
                // d/dx (a cos + b sin) = w(b cos − a sin): a rotation by a quarter turn.
                let (a, b) = match order % 4 {
                    0 => (h.a, h.b),
                    1 => (h.b, -h.a),
                    2 => (-h.a, -h.b),
                    _ => (-h.b, h.a),
                };
                Harmonic { k: h.k, a: a * scale, b: b * scale }
            })
            .collect();
        Ok(Self {
            constant_term: 0.0,
            harmonics,
            smoothness_order: self.smoothness_order.saturating_sub(order),
            representation: self.representation,
        })
    }

    /// `f^{(order)}(x)`; periodic in `x`.
    pub fn eval(&self, x: f64, order: u32) -> Result<f64, CoefficientError> {
        self.check_order(order)?;
        let x = x.rem_euclid(1.0);
        let mut acc = if order == 0 { self.constant_term } else { 0.0 };
        for h in &self.harmonics {
            let w = 2.0 * PI * h.k as f64;
            let (s, c) = (w * x).sin_cos();
            let (a, b) = match order % 4 {
                0 => (h.a, h.b),
                1 => (h.b, -h.a),
                2 => (-h.a, -h.b),
                _ => (-h.b, h.a),
            };
            acc += w.powi(order as i32) * (a * c + b * s);
        }
        Ok(acc)
    }

    /// Fast value for the ODE right-hand side. Harmonics are generated by
    /// rotating `e^{2πix}` so only one sin/cos pair is evaluated.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        if self.harmonics.is_empty() {
            return self.constant_term;
        }
        let (s1, c1) = (2.0 * PI * x).sin_cos();
        let (mut ck, mut sk) = (1.0, 0.0);
        let mut kcur = 0;
        let mut acc = self.constant_term;
        for h in &self.harmonics {
            while kcur < h.k {
                let c = ck * c1 - sk * s1;
                sk = sk * c1 + ck * s1;
                ck = c;
                kcur += 1;
            }
            acc += h.a * ck + h.b * sk;
        }
        acc
    }

    /// Closed-form half-integer Fourier data.
    ///
    /// With `a = 2πk` and `b = π(2n+1)`, `a ± b` is an odd multiple of π, so
    /// `∫cos(ax)cos(bx) = ∫sin(ax)sin(bx) = 0`, `∫cos(ax)sin(bx) = 2b/(b²−a²)`
    /// and `∫sin(ax)cos(bx) = 2a/(a²−b²)`.
    pub fn fourier(&self, n: u32) -> FourierRecord {
        let b = PI * (2 * n + 1) as f64;
        let mut cn = 0.0;
        let mut sn = self.constant_term * 2.0 / b;
        for h in &self.harmonics {
            let a = 2.0 * PI * h.k as f64;
            let d = a * a - b * b;
            cn += h.b * 2.0 * a / d;
            sn -= h.a * 2.0 * b / d;
        }
        FourierRecord::new(n, self.constant_term, cn, sn)
    }

    /// Fourier data by composite 16-point Gauss–Legendre panels of length
    /// at most `1/(2n+2)`. The result is compared against the same rule on
    /// twice as many panels.
    pub fn fourier_by_quadrature(&self, n: u32) -> Result<FourierRecord, CoefficientError> {
        let b = PI * (2 * n + 1) as f64;
        let degree = self.degree() as usize;
        let base = (2 * n as usize + 2).max(2 * degree + 2);
        let run = |panels: usize| {
            let cn = quadrature::composite(0.0, 1.0, panels, |x| self.value(x) * (b * x).cos());
            let sn = quadrature::composite(0.0, 1.0, panels, |x| self.value(x) * (b * x).sin());
            (cn, sn)
        };
        let (cn, sn) = run(base);
        let (cn2, sn2) = run(2 * base);
        let scale = 1.0 + self.l2_norm_sq().sqrt();
        let estimate = (cn - cn2).abs().max((sn - sn2).abs());
        if estimate > 1e-12 * scale {
            return Err(CoefficientError::Accuracy { estimate });
        }
        let f0 = quadrature::composite(0.0, 1.0, base, |x| self.value(x));
        Ok(FourierRecord::new(n, f0, cn2, sn2))
    }

    /// `∫₀¹ f²` by Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        self.constant_term * self.constant_term
            + 0.5 * self.harmonics.iter().map(|h| h.a * h.a + h.b * h.b).sum::<f64>()
    }

    /// `x ↦ f(1 − x)`.
    pub fn reflected(&self) -> Self {
        // cos 2πk(1−x) = cos 2πkx, sin 2πk(1−x) = −sin 2πkx
        let mut out = self.clone();
        for h in &mut out.harmonics {
            h.b = -h.b;
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.constant_term *= s;
        for h in &mut out.harmonics {
            h.a *= s;
            h.b *= s;
        }
        out
    }

    /// Adds a constant to the coefficient.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.constant_term += c;
        out
    }
}

impl Add for &PeriodicCoefficient {
    type Output = PeriodicCoefficient;

    fn add(self, rhs: &PeriodicCoefficient) -> PeriodicCoefficient {
        let mut harmonics = self.harmonics.clone();
        harmonics.extend(rhs.harmonics.iter().copied());
        let mut out = PeriodicCoefficient::new(self.constant_term + rhs.constant_term, harmonics)
            .expect("sum of valid coefficients is valid");
        out.smoothness_order = self.smoothness_order.min(rhs.smoothness_order);
        if self.representation == Representation::Sampled
            || rhs.representation == Representation::Sampled
        {
            out.representation = Representation::Sampled;
        }
        out
    }
}

/// Fourier data of `f, f', f'', f'''` at index `n`, the bundle the
/// eigenvalue expansions consume.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeFourier {
    pub f: FourierRecord,
    pub d1: FourierRecord,
    pub d2: FourierRecord,
    pub d3: FourierRecord,
}

impl DerivativeFourier {
    pub fn of(c: &PeriodicCoefficient, n: u32, max_order: u32) -> Result<Self, CoefficientError> {
        let zero = FourierRecord::new(n, 0.0, 0.0, 0.0);
        let get = |k: u32| -> Result<FourierRecord, CoefficientError> {
            if k <= max_order {
                Ok(c.derivative(k)?.fourier(n))
            } else {
                Ok(zero)
            }
        };
        Ok(Self { f: get(0)?, d1: get(1)?, d2: get(2)?, d3: get(3)? })
    }
}
