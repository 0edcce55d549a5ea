//! Fundamental system of `y'''' + (p y')' + q y = λ y` on [0, 1].
//!
//! The state is `(y, y', y'', y''' + p y')`, so `A' = 𝒫 A` with
//!
//! ```text
//!     [ 0      1   0   0 ]
//! 𝒫 = [ 0      0   1   0 ]
//!     [ 0     −p   0   1 ]
//!     [ λ − q  0   0   0 ]
//! ```
//!
//! Two propagators are provided. [`integrate_fundamental`] carries the full
//! 4×4 matrix, re-orthonormalizing its columns after every accepted step and
//! accumulating the triangular factor in mantissa/exponent form, which keeps
//! `det A` meaningful at any λ. [`integrate_exterior_pair`] carries a single
//! exterior product of two columns (the second compound system); its growth is
//! that of the two dominant modes only, which is what makes 2×2 minors of
//! `A(1)` computable without cancellation.

use num_complex::{Complex, Complex64};
use thiserror::Error;
use twofloat::TwoFloat;

use crate::characteristic::z_of_lambda;
use crate::coefficients::PeriodicCoefficient;
use crate::integrator::{self, Flow, HasTableau, IntegrationFailure, IntegrationStats, StepControl};
use crate::scalar::{Precision, Scalar};

/// Upper bound of the mantissa between renormalizations.
pub const RENORM_LOG_THRESHOLD: f64 = 20.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("integration failed: {0}")]
    Integration(#[from] IntegrationFailure),
    #[error("tolerance {tolerance:e} outside [{lo:e}, {hi:e}] for {precision} precision")]
    ToleranceOutOfRange { tolerance: f64, lo: f64, hi: f64, precision: &'static str },
    #[error("spectral parameter must be finite")]
    NonFiniteLambda,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub tolerance: f64,
    pub precision: Precision,
    /// Overrides the default step cap `0.25 / (1 + |z|)`.
    pub max_step: Option<f64>,
}

impl OdeOptions {
    pub fn double(tolerance: f64) -> Self {
        Self { tolerance, precision: Precision::Double, max_step: None }
    }

    pub fn extended(tolerance: f64) -> Self {
        Self { tolerance, precision: Precision::Extended, max_step: None }
    }

    fn validate(&self) -> Result<(), OdeError> {
        let (lo, hi) = self.precision.tolerance_range();
        if !(lo..=hi).contains(&self.tolerance) {
            return Err(OdeError::ToleranceOutOfRange {
                tolerance: self.tolerance,
                lo,
                hi,
                precision: self.precision.name(),
            });
        }
        Ok(())
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self::double(Precision::Double.default_ode_tolerance())
    }
}

/// Pointwise evaluation of the system matrix 𝒫(x).
#[derive(Debug, Clone, Copy)]
pub struct SystemMatrixEvaluator<'a> {
    pub p: &'a PeriodicCoefficient,
    pub q: &'a PeriodicCoefficient,
    pub lambda: Complex64,
}

impl SystemMatrixEvaluator<'_> {
    pub fn matrix_at(&self, x: f64) -> [[Complex64; 4]; 4] {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let p = self.p.value(x);
        let q = self.q.value(x);
        [
            [zero, one, zero, zero],
            [zero, zero, one, zero],
            [zero, Complex64::new(-p, 0.0), zero, one],
            [self.lambda - q, zero, zero, zero],
        ]
    }
}

/// Nonzero entries of 𝒫 at one point, in working precision.
#[derive(Clone, Copy)]
struct Entries<T> {
    minus_p: T,
    lambda_minus_q: Complex<T>,
}

struct SystemFlow<'a, T> {
    p: &'a PeriodicCoefficient,
    q: &'a PeriodicCoefficient,
    lambda: Complex<T>,
}

impl<'a, T: Scalar> SystemFlow<'a, T> {
    fn new(p: &'a PeriodicCoefficient, q: &'a PeriodicCoefficient, lambda: Complex64) -> Self {
        Self { p, q, lambda: Complex::new(T::lift(lambda.re), T::lift(lambda.im)) }
    }

    #[inline]
    fn entries(&self, x: T) -> Entries<T> {
        let xf = x.lower();
        let p = self.p.value(xf);
        let q = self.q.value(xf);
        Entries {
            minus_p: T::lift(-p),
            lambda_minus_q: Complex::new(self.lambda.re - T::lift(q), self.lambda.im),
        }
    }
}

/// Four columns stored column-major, `y[4c + r]`.
struct FundamentalFlow<'a, T>(SystemFlow<'a, T>);

impl<T: Scalar> Flow<T> for FundamentalFlow<'_, T> {
    fn dim(&self) -> usize {
        16
    }

    fn rhs(&self, x: T, y: &[Complex<T>], dy: &mut [Complex<T>]) {
        let e = self.0.entries(x);
        for c in 0..4 {
            let v = &y[4 * c..4 * c + 4];
            let d = &mut dy[4 * c..4 * c + 4];
            d[0] = v[1];
            d[1] = v[2];
            d[2] = v[1] * e.minus_p + v[3];
            d[3] = v[0] * e.lambda_minus_q;
        }
    }
}

/// Index pairs (i < j) of the exterior square, in lexicographic order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn pair_index(i: usize, j: usize) -> usize {
    PAIRS.iter().position(|&pr| pr == (i, j)).expect("i < j")
}

/// Second compound system: `u_ij = a_i b_j − a_j b_i` for two solution columns
/// `a`, `b`, with `u' = Σ_k 𝒫_ik u_kj + 𝒫_jk u_ik`.
struct CompoundFlow<'a, T>(SystemFlow<'a, T>);

impl<T: Scalar> Flow<T> for CompoundFlow<'_, T> {
    fn dim(&self) -> usize {
        6
    }

    fn rhs(&self, x: T, u: &[Complex<T>], du: &mut [Complex<T>]) {
        let e = self.0.entries(x);
        let m = e.minus_p;
        let l = e.lambda_minus_q;
        // u = [u01, u02, u03, u12, u13, u23]; u_kk = 0, u_kj = −u_jk.
        let (u01, u02, u03, u12, u13, u23) = (u[0], u[1], u[2], u[3], u[4], u[5]);
        du[0] = u02;
        du[1] = u12 + u01 * m + u03;
        du[2] = u13;
        du[3] = u13;
        du[4] = u23 - u01 * l;
        du[5] = u13 * m - u02 * l;
    }
}

/// Result of propagating the fundamental matrix to x = 1.
///
/// The true matrix is `mantissa · e^{log_scale}`; `log_det` is the natural
/// log of its determinant, accumulated from the triangular factors of the
/// step-wise re-orthonormalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledTransferMatrix {
    pub mantissa: [[Complex64; 4]; 4],
    pub log_scale: f64,
    pub log_det: Complex64,
    pub stats: IntegrationStats,
}

impl ScaledTransferMatrix {
    pub fn identity() -> Self {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        Self { mantissa: m, log_scale: 0.0, log_det: Complex64::new(0.0, 0.0), stats: IntegrationStats::default() }
    }

    /// Entry of the true matrix; may overflow for large log_scale.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mantissa[i][j] * self.log_scale.exp()
    }

    pub fn max_mantissa(&self) -> f64 {
        self.mantissa.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |A − B| / max |A|` between the represented matrices.
    pub fn relative_difference(&self, other: &Self) -> f64 {
        let shift = other.log_scale - self.log_scale;
        let s = shift.exp();
        let mut num = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                num = num.max((self.mantissa[i][j] - other.mantissa[i][j] * s).norm());
            }
        }
        num / self.max_mantissa()
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        let mut out = *self;
        for row in &mut out.mantissa {
            for v in row.iter_mut() {
                *v = v.conj();
            }
        }
        out.log_det = self.log_det.conj();
        out
    }

    /// `det` of the mantissa alone; cancellation-prone once `log_scale` is large.
    pub fn mantissa_det(&self) -> Complex64 {
        det4(&self.mantissa)
    }
}

/// `|det A(1) − 1|`. The determinant at x = 0 is `det I = 1` and 𝒫 is
/// traceless, so the exact value is zero.
pub fn wronskian_drift(result: &ScaledTransferMatrix) -> f64 {
    (result.log_det.exp() - 1.0).norm()
}

/// Max step `0.25 / (1 + |z|)` with `z = λ^{1/4}`.
pub fn step_cap(lambda: Complex64) -> f64 {
    0.25 / (1.0 + z_of_lambda(lambda).norm())
}

fn controls(lambda: Complex64, opts: &OdeOptions) -> StepControl {
    let h_max = opts.max_step.unwrap_or_else(|| step_cap(lambda));
    StepControl { tol: opts.tolerance, h_max, h_min: 1e-12 }
}

/// `A(1, λ)` for `A' = 𝒫A`, `A(0) = I`, in double precision.
pub fn integrate_fundamental(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    lambda: Complex64,
    tolerance: f64,
) -> Result<ScaledTransferMatrix, OdeError> {
    integrate_fundamental_with(p, q, lambda, &OdeOptions::double(tolerance))
}

pub fn integrate_fundamental_with(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    lambda: Complex64,
    opts: &OdeOptions,
) -> Result<ScaledTransferMatrix, OdeError> {
    opts.validate()?;
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(OdeError::NonFiniteLambda);
    }
    match opts.precision {
        Precision::Double => fundamental_impl::<f64>(p, q, lambda, opts),
        Precision::Extended => fundamental_impl::<TwoFloat>(p, q, lambda, opts),
    }
}

type Mat4<T> = [[Complex<T>; 4]; 4];

fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn fundamental_impl<T: HasTableau>(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    lambda: Complex64,
    opts: &OdeOptions,
) -> Result<ScaledTransferMatrix, OdeError> {
    let flow = FundamentalFlow(SystemFlow::<T>::new(p, q, lambda));
    let mut y = vec![czero::<T>(); 16];
    for c in 0..4 {
        y[4 * c + c] = Complex::new(T::one(), T::zero());
    }
    // A = Q · R · e^{r_log}; Q is the state.
    let mut r: Mat4<T> = [[czero(); 4]; 4];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = Complex::new(T::one(), T::zero());
    }
    let mut r_log = 0.0f64;
    let mut log_diag = 0.0f64;

    let stats = integrator::integrate(&flow, &mut y, controls(lambda, opts), |state| {
        let step_r = orthonormalize(state);
        for i in 0..4 {
            log_diag += step_r[i][i].re.lower().ln();
        }
        r = upper_mul(&step_r, &r);
        let m = r.iter().flatten().map(|v| v.norm().lower()).fold(0.0, f64::max);
        if let Some((factor, log)) = renormalization::<T>(m) {
            for v in r.iter_mut().flatten() {
                *v = *v * factor;
            }
            r_log += log;
        }
    })?;

    let mut q_mat: Mat4<T> = [[czero(); 4]; 4];
    for c in 0..4 {
        for row in 0..4 {
            q_mat[row][c] = y[4 * c + row];
        }
    }
    let full = mat_mul(&q_mat, &r);
    let mut mantissa = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            mantissa[i][j] = Complex64::new(full[i][j].re.lower(), full[i][j].im.lower());
        }
    }
    let m = mantissa.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    for v in mantissa.iter_mut().flatten() {
        *v /= m;
    }
    let det_q = det4(&q_mat);
    let log_det = Complex64::new(det_q.norm().lower().ln() + log_diag, det_q.im.lower().atan2(det_q.re.lower()));
    Ok(ScaledTransferMatrix { mantissa, log_scale: r_log + m.ln(), log_det, stats })
}

/// When the max magnitude `m` leaves `[1, e^20]`, the power of two that brings
/// it back near 1 (so rescaling is exact in any binary precision) and the log
/// of the amount removed.
fn renormalization<T: Scalar>(m: f64) -> Option<(T, f64)> {
    if (1.0..=RENORM_LOG_THRESHOLD.exp()).contains(&m) || m == 0.0 || !m.is_finite() {
        return None;
    }
    let k = m.log2().floor() as i32;
    Some((T::lift(2f64.powi(-k)), k as f64 * std::f64::consts::LN_2))
}

/// Modified Gram–Schmidt on the four columns of `state` (column-major);
/// returns the upper-triangular factor with positive real diagonal.
fn orthonormalize<T: Scalar>(state: &mut [Complex<T>]) -> Mat4<T> {
    let mut r: Mat4<T> = [[czero(); 4]; 4];
    for j in 0..4 {
        for i in 0..j {
            let mut dot = czero::<T>();
            for k in 0..4 {
                dot = dot + state[4 * i + k].conj() * state[4 * j + k];
            }
            r[i][j] = dot;
            for k in 0..4 {
                let qi = state[4 * i + k];
                state[4 * j + k] = state[4 * j + k] - qi * dot;
            }
        }
        let mut nrm = T::zero();
        for k in 0..4 {
            nrm = nrm + state[4 * j + k].norm_sqr();
        }
        let nrm = nrm.sqrt();
        r[j][j] = Complex::new(nrm, T::zero());
        for k in 0..4 {
            let v = state[4 * j + k];
            state[4 * j + k] = Complex::new(v.re.div_accurate(nrm), v.im.div_accurate(nrm));
        }
    }
    r
}

fn mat_mul<T: Scalar>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut out: Mat4<T> = [[czero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = czero::<T>();
            for k in 0..4 {
                acc = acc + a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

fn upper_mul<T: Scalar>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut out: Mat4<T> = [[czero(); 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let mut acc = czero::<T>();
            for k in i..=j {
                acc = acc + a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Laplace expansion along the first row.
fn det4<T: Scalar>(m: &Mat4<T>) -> Complex<T> {
    let det3 = |r: [usize; 3], c: [usize; 3]| {
        m[r[0]][c[0]] * (m[r[1]][c[1]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[1]])
            - m[r[0]][c[1]] * (m[r[1]][c[0]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[0]])
            + m[r[0]][c[2]] * (m[r[1]][c[0]] * m[r[2]][c[1]] - m[r[1]][c[1]] * m[r[2]][c[0]])
    };
    let rows = [1, 2, 3];
    let mut acc = czero::<T>();
    for j in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&c| c != j).collect();
        let minor = det3(rows, [cols[0], cols[1], cols[2]]);
        let term = m[0][j] * minor;
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Exterior product of two columns of `A(1, λ)`: `components[k]` is
/// `a_i b_j − a_j b_i` for `(i, j) = PAIRS[k]`, scaled by `e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBivector {
    pub components: [Complex64; 6],
    pub log_scale: f64,
    pub stats: IntegrationStats,
}

impl ScaledBivector {
    /// Component `(i, j)` with the antisymmetric sign convention.
    pub fn component(&self, i: usize, j: usize) -> Complex64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.components[pair_index(i, j)],
            std::cmp::Ordering::Greater => -self.components[pair_index(j, i)],
            std::cmp::Ordering::Equal => Complex64::new(0.0, 0.0),
        }
    }
}

/// Propagates `e_{first} ∧ e_{second}` from x = 0 to x = 1.
pub fn integrate_exterior_pair(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    lambda: Complex64,
    columns: (usize, usize),
    opts: &OdeOptions,
) -> Result<ScaledBivector, OdeError> {
    opts.validate()?;
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(OdeError::NonFiniteLambda);
    }
    assert!(columns.0 < columns.1 && columns.1 < 4, "column pair must satisfy i < j < 4");
    match opts.precision {
        Precision::Double => exterior_impl::<f64>(p, q, lambda, columns, opts),
        Precision::Extended => exterior_impl::<TwoFloat>(p, q, lambda, columns, opts),
    }
}

fn exterior_impl<T: HasTableau>(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    lambda: Complex64,
    columns: (usize, usize),
    opts: &OdeOptions,
) -> Result<ScaledBivector, OdeError> {
    let flow = CompoundFlow(SystemFlow::<T>::new(p, q, lambda));
    let mut u = vec![czero::<T>(); 6];
    u[pair_index(columns.0, columns.1)] = Complex::new(T::one(), T::zero());
    let mut log_scale = 0.0f64;
    let stats = integrator::integrate(&flow, &mut u, controls(lambda, opts), |state| {
        let m = state.iter().map(|v| v.norm().lower()).fold(0.0, f64::max);
        if let Some((factor, log)) = renormalization::<T>(m) {
            for v in state.iter_mut() {
                *v = *v * factor;
            }
            log_scale += log;
        }
    })?;
    let components = std::array::from_fn(|k| Complex64::new(u[k].re.lower(), u[k].im.lower()));
    Ok(ScaledBivector { components, log_scale, stats })
}
