//! Localization, counting and refinement of the eigenvalues μₙ.
//!
//! Real roots are found in the coordinate `s` with `λ = s|s|³` (so `s = z` on
//! the positive axis and `s = −|z|` on the negative one), where eigenvalues of
//! the unperturbed problem are equally spaced. Above the crossover index N*
//! each μₙ is bracketed inside its disk `|z − π/2 − πn| < π/4`; below it a
//! grid scan over `|s| ≤ low_region_z_max` collects every sign change and the
//! total is checked against the argument-principle count of the ball
//! `|z| < π N*`.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use thiserror::Error;

use crate::characteristic::{self, disk_center, lambda_of_real_coordinate, CharValue, DISK_RADIUS};
use crate::coefficients::PeriodicCoefficient;
use crate::ode::{OdeError, OdeOptions};
use crate::par::Execution;
use crate::scalar::Precision;

/// Initial number of contour samples.
pub const CONTOUR_START_POINTS: usize = 64;
const CONTOUR_MAX_ROUNDS: usize = 14;
const LOW_SCAN_STEP: f64 = PI / 16.0;
const MAX_REFINEMENT_ITERATIONS: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootMethod {
    /// Sign change inside the isolating disk of its index.
    DiskBracket,
    /// Grid scan of the low region, labelled by ascending order.
    LowScan,
}

impl RootMethod {
    pub fn name(self) -> &'static str {
        match self {
            RootMethod::DiskBracket => "disk-bracket",
            RootMethod::LowScan => "low-scan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvalueRecord {
    pub index: u32,
    pub mu: f64,
    /// Real coordinate `s` of the root, `mu = s|s|³`.
    pub z_root: f64,
    pub bracket: (f64, f64),
    /// |D| mantissa at `z_root`, relative to the size of the propagated solutions.
    pub char_residual: f64,
    pub refinement_iterations: u32,
    pub method: RootMethod,
    pub precision: Precision,
    /// Integrator tolerance the record was computed with.
    pub ode_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchPlan {
    pub n_min: u32,
    pub n_max: u32,
    /// N*: indices below it are found by the low-region scan.
    pub crossover: u32,
    pub low_region_z_max: f64,
    pub z_abs_tol: f64,
    pub residual_tol: f64,
    pub ode: OdeOptions,
    pub execution: Execution,
}

impl SearchPlan {
    pub const DEFAULT_CROSSOVER: u32 = 4;

    pub fn new(n_min: u32, n_max: u32) -> Self {
        let crossover = Self::DEFAULT_CROSSOVER;
        Self {
            n_min,
            n_max,
            crossover,
            low_region_z_max: PI * crossover as f64,
            z_abs_tol: 1e-11,
            residual_tol: 1e-9,
            ode: OdeOptions::default(),
            execution: Execution::default(),
        }
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.ode = OdeOptions {
            tolerance: precision.default_ode_tolerance(),
            precision,
            max_step: self.ode.max_step,
        };
        self
    }

    pub fn with_crossover(mut self, crossover: u32) -> Self {
        self.crossover = crossover;
        self.low_region_z_max = PI * crossover as f64;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<(), SpectrumError> {
        let bad = |m: &str| Err(SpectrumError::InvalidPlan(m.to_string()));
        if self.n_min > self.n_max {
            return bad("n_min > n_max");
        }
        if !(self.z_abs_tol > 0.0 && self.z_abs_tol < 0.1) {
            return bad("z_abs_tol must lie in (0, 0.1)");
        }
        if !(self.residual_tol > 0.0 && self.residual_tol < 1.0) {
            return bad("residual_tol must lie in (0, 1)");
        }
        if !(self.low_region_z_max >= 0.0 && self.low_region_z_max.is_finite()) {
            return bad("low_region_z_max must be finite and nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("invalid search plan: {0}")]
    InvalidPlan(String),
    #[error("contour passes within {modulus:e} of a zero of D at λ = {lambda}")]
    ContourTooClose { lambda: Complex64, modulus: f64 },
    #[error("argument principle did not resolve: total phase {turns} turns after {samples} samples")]
    Unresolved { turns: f64, samples: usize },
    #[error("missing roots: {detail}")]
    MissingRoot { detail: String, expected: usize, found: usize, records: Vec<EigenvalueRecord> },
}

/// Outcome of one argument-principle evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourReport {
    pub winding: i64,
    pub samples: usize,
    /// Smallest |D mantissa| seen on the contour.
    pub min_modulus: f64,
}

fn eval_d(p: &PeriodicCoefficient, q: &PeriodicCoefficient, lambda: Complex64, ode: &OdeOptions) -> Result<CharValue, OdeError> {
    characteristic::char_det_with(p, q, lambda, ode)
}

/// Winding number of `D(λ(t))` for `t ∈ [0, 1)` on a closed curve, refining
/// every segment whose phase increment reaches π/2.
pub fn winding_number<C>(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    curve: C,
    plan: &SearchPlan,
) -> Result<ContourReport, SpectrumError>
where
    C: Fn(f64) -> Complex64 + Sync + Send,
{
    let eval = |t: &f64| -> Result<Complex64, SpectrumError> {
        let lam = curve(*t);
        let d = eval_d(p, q, lam, &plan.ode)?;
        let m = d.mantissa.norm();
        if m < plan.residual_tol {
            return Err(SpectrumError::ContourTooClose { lambda: lam, modulus: m });
        }
        Ok(d.mantissa)
    };
    let mut ts: Vec<f64> = (0..CONTOUR_START_POINTS).map(|k| k as f64 / CONTOUR_START_POINTS as f64).collect();
    let mut vals = plan.execution.try_map(&ts, eval)?;

    for _ in 0..CONTOUR_MAX_ROUNDS {
        let n = ts.len();
        let coarse: Vec<usize> = (0..n).filter(|&i| phase_step(vals[i], vals[(i + 1) % n]).abs() >= PI / 2.0).collect();
        if coarse.is_empty() {
            let total: f64 = (0..n).map(|i| phase_step(vals[i], vals[(i + 1) % n])).sum();
            let turns = total / TAU;
            let winding = turns.round();
            if (turns - winding).abs() > 1e-6 {
                return Err(SpectrumError::Unresolved { turns, samples: n });
            }
            let min_modulus = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
            return Ok(ContourReport { winding: winding as i64, samples: n, min_modulus });
        }
        let mids: Vec<f64> = coarse
            .iter()
            .map(|&i| {
                let b = if i + 1 == n { 1.0 } else { ts[i + 1] };
                0.5 * (ts[i] + b)
            })
            .collect();
        let mid_vals = plan.execution.try_map(&mids, eval)?;
        let mut merged: Vec<(f64, Complex64)> = ts.into_iter().zip(vals).collect();
        merged.extend(mids.into_iter().zip(mid_vals));
        merged.sort_by(|a, b| a.0.total_cmp(&b.0));
        (ts, vals) = merged.into_iter().unzip();
    }
    let n = ts.len();
    let total: f64 = (0..n).map(|i| phase_step(vals[i], vals[(i + 1) % n])).sum();
    Err(SpectrumError::Unresolved { turns: total / TAU, samples: n })
}

fn phase_step(a: Complex64, b: Complex64) -> f64 {
    (b / a).arg()
}

/// Zeros of D inside the image of `|z − π/2 − πn| < π/4`.
pub fn count_zeros_in_disk(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    n: u32,
    plan: &SearchPlan,
) -> Result<u32, SpectrumError> {
    count_zeros_in_disk_with_radius(p, q, n, DISK_RADIUS, plan).map(|r| r.winding as u32)
}

pub fn count_zeros_in_disk_with_radius(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    n: u32,
    radius: f64,
    plan: &SearchPlan,
) -> Result<ContourReport, SpectrumError> {
    if n == 0 {
        return Err(SpectrumError::InvalidPlan("disk counting needs n ≥ 1".into()));
    }
    let c = disk_center(n);
    winding_number(p, q, |t| (c + Complex64::from_polar(radius, TAU * t)).powi(4), plan)
}

/// Radius in z of the ball `|λ| < (π/2 + π(N + 1/2))⁴`.
pub fn ball_radius(big_n: u32) -> f64 {
    PI / 2.0 + PI * (big_n as f64 + 0.5)
}

/// Zeros of D inside `|λ| < (π/2 + π(N + 1/2))⁴`.
pub fn count_zeros_in_ball(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    big_n: u32,
    plan: &SearchPlan,
) -> Result<u32, SpectrumError> {
    count_zeros_in_ball_report(p, q, big_n, plan).map(|r| r.winding as u32)
}

pub fn count_zeros_in_ball_report(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    big_n: u32,
    plan: &SearchPlan,
) -> Result<ContourReport, SpectrumError> {
    let r4 = ball_radius(big_n).powi(4);
    winding_number(p, q, |t| Complex64::from_polar(r4, PI * (2.0 * t - 1.0)), plan)
}

/// Disk localization with the ±5% radius retry used when the contour runs
/// into a zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskLocalization {
    pub n: u32,
    pub interval: (f64, f64),
    pub radius: f64,
    pub report: ContourReport,
}

pub fn localize_disk(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    n: u32,
    plan: &SearchPlan,
) -> Result<DiskLocalization, SpectrumError> {
    let mut last = None;
    for factor in [1.0, 1.05, 0.95] {
        let radius = DISK_RADIUS * factor;
        match count_zeros_in_disk_with_radius(p, q, n, radius, plan) {
            Ok(report) => {
                let c = disk_center(n);
                return Ok(DiskLocalization { n, interval: (c - radius, c + radius), radius, report });
            }
            Err(e @ SpectrumError::ContourTooClose { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Sign of D along the real coordinate `s`.
struct RealSection<'a> {
    p: &'a PeriodicCoefficient,
    q: &'a PeriodicCoefficient,
    ode: OdeOptions,
}

impl RealSection<'_> {
    fn eval(&self, s: f64) -> Result<CharValue, OdeError> {
        eval_d(self.p, self.q, Complex64::new(lambda_of_real_coordinate(s), 0.0), &self.ode)
    }

    fn f(&self, s: f64) -> Result<f64, OdeError> {
        self.eval(s).map(|d| d.mantissa.re)
    }
}

#[derive(Debug, Clone, Copy)]
struct Refined {
    lo: f64,
    hi: f64,
    root: f64,
    iterations: u32,
}

/// Illinois-modified regula falsi on a sign-changing bracket, with steps kept
/// at least `tol/2` from the ends and a bisection whenever the bracket fails
/// to halve in three iterations.
fn refine_bracket<F>(f: F, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64, tol: f64) -> Result<Refined, OdeError>
where
    F: Fn(f64) -> Result<f64, OdeError>,
{
    debug_assert!(a < b && fa * fb <= 0.0);
    let (mut ga, mut gb) = (fa, fb);
    let mut side = 0i8;
    let mut iterations = 0;
    let mut width_check = b - a;
    while b - a > tol && iterations < MAX_REFINEMENT_ITERATIONS {
        iterations += 1;
        let mut x = if iterations % 3 == 0 && b - a > 0.5 * width_check {
            0.5 * (a + b)
        } else {
            (a * gb - b * ga) / (gb - ga)
        };
        if iterations % 3 == 0 {
            width_check = b - a;
        }
        if !x.is_finite() {
            x = 0.5 * (a + b);
        }
        x = x.clamp(a + 0.5 * tol, b - 0.5 * tol);
        let fx = f(x)?;
        if fx == 0.0 {
            let r = Refined { lo: x - 0.25 * tol, hi: x + 0.25 * tol, root: x, iterations };
            return Ok(r);
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
            ga = fx;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            gb = fx;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    let root = if fb != fa { (a * fb - b * fa) / (fb - fa) } else { 0.5 * (a + b) };
    let root = root.clamp(a, b);
    let root = if root <= a || root >= b { 0.5 * (a + b) } else { root };
    Ok(Refined { lo: a, hi: b, root, iterations })
}

fn finish_record(
    section: &RealSection<'_>,
    index: u32,
    r: Refined,
    method: RootMethod,
) -> Result<EigenvalueRecord, OdeError> {
    let residual = section.eval(r.root)?.mantissa.norm();
    Ok(EigenvalueRecord {
        index,
        mu: lambda_of_real_coordinate(r.root),
        z_root: r.root,
        bracket: (r.lo, r.hi),
        char_residual: residual,
        refinement_iterations: r.iterations,
        method,
        precision: section.ode.precision,
        ode_tolerance: section.ode.tolerance,
    })
}

/// Finds the root in disk n, or reports how many sign changes were seen.
fn solve_disk(section: &RealSection<'_>, n: u32, tol: f64) -> Result<Result<EigenvalueRecord, usize>, OdeError> {
    let c = disk_center(n);
    let (a, b) = (c - FRAC_PI_4, c + FRAC_PI_4);
    let (fa, fb) = (section.f(a)?, section.f(b)?);
    // The bracket is certified by a sub-grid so a pair of nearby roots is not
    // mistaken for a single one.
    const SUB: usize = 8;
    let mut xs = vec![a];
    let mut fs = vec![fa];
    for k in 1..SUB {
        let x = a + (b - a) * k as f64 / SUB as f64;
        xs.push(x);
        fs.push(section.f(x)?);
    }
    xs.push(b);
    fs.push(fb);
    let changes: Vec<usize> = (0..SUB).filter(|&i| fs[i] * fs[i + 1] <= 0.0).collect();
    if changes.len() != 1 {
        return Ok(Err(changes.len()));
    }
    let i = changes[0];
    let r = refine_bracket(|s| section.f(s), xs[i], fs[i], xs[i + 1], fs[i + 1], tol)?;
    finish_record(section, n, r, RootMethod::DiskBracket).map(Ok)
}

/// All real roots with `|s| ≤ z_max`, ascending.
fn scan_low_region(section: &RealSection<'_>, z_max: f64, tol: f64, exec: Execution) -> Result<Vec<Refined>, OdeError> {
    if z_max <= 0.0 {
        return Ok(Vec::new());
    }
    let steps = (2.0 * z_max / LOW_SCAN_STEP).ceil() as usize;
    let h = 2.0 * z_max / steps as f64;
    let xs: Vec<f64> = (0..=steps).map(|k| -z_max + h * k as f64).collect();
    let fs = exec.try_map(&xs, |&s| section.f(s))?;
    let brackets: Vec<usize> = (0..steps).filter(|&i| fs[i] * fs[i + 1] <= 0.0 && fs[i] != 0.0).collect();
    exec.try_map(&brackets, |&i| refine_bracket(|s| section.f(s), xs[i], fs[i], xs[i + 1], fs[i + 1], tol))
}

/// Eigenvalue records for `plan.n_min ..= plan.n_max`, sorted by index.
pub fn solve_range(
    p: &PeriodicCoefficient,
    q: &PeriodicCoefficient,
    plan: &SearchPlan,
) -> Result<Vec<EigenvalueRecord>, SpectrumError> {
    plan.validate()?;
    let section = RealSection { p, q, ode: plan.ode };
    let mut records = Vec::new();
    let mut problems = Vec::new();
    let mut expected_total = 0usize;

    if plan.n_min < plan.crossover {
        let roots = scan_low_region(&section, plan.low_region_z_max, plan.z_abs_tol, plan.execution)?;
        let ball_r = PI * plan.crossover as f64;
        let inside = roots.iter().filter(|r| r.root.abs() < ball_r).count();
        let winding = count_zeros_in_ball(p, q, plan.crossover - 1, plan)? as usize;
        let labelled = roots.into_iter().enumerate().take(plan.crossover as usize);
        let wanted: Vec<(usize, Refined)> =
            labelled.filter(|(i, _)| (plan.n_min as usize..=plan.n_max as usize).contains(i)).collect();
        let found =
            plan.execution.try_map(&wanted, |(i, r)| finish_record(&section, *i as u32, *r, RootMethod::LowScan))?;
        let lo_hi = plan.n_max.min(plan.crossover - 1) - plan.n_min + 1;
        expected_total += lo_hi as usize;
        if inside != winding {
            problems.push(format!(
                "low region: {inside} real sign changes with |z| < {ball_r:.6} but winding number {winding}"
            ));
        }
        records.extend(found);
    }

    let high: Vec<u32> = (plan.n_min.max(plan.crossover)..=plan.n_max).collect();
    expected_total += high.len();
    let solved = plan.execution.try_map(&high, |&n| solve_disk(&section, n, plan.z_abs_tol))?;
    for (n, r) in high.iter().zip(solved) {
        match r {
            Ok(rec) => records.push(rec),
            Err(k) => problems.push(format!("disk {n}: {k} sign changes on the real axis (expected 1)")),
        }
    }
    records.sort_by_key(|r| r.index);

    if problems.is_empty() && records.len() == expected_total {
        Ok(records)
    } else {
        Err(SpectrumError::MissingRoot {
            detail: problems.join("; "),
            expected: expected_total,
            found: records.len(),
            records,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero() -> PeriodicCoefficient {
        PeriodicCoefficient::zero()
    }

    #[test]
    fn refine_finds_simple_root() {
        let f = |x: f64| Ok::<f64, OdeError>((x - 0.3).powi(3) + 0.01 * (x - 0.3));
        let r = refine_bracket(f, 0.0, f(0.0).unwrap(), 2.0, f(2.0).unwrap(), 1e-12).unwrap();
        assert!(r.hi - r.lo <= 1e-12);
        assert!(r.lo < 0.3 + 1e-15 && 0.3 - 1e-15 < r.hi);
        assert!((r.root - 0.3).abs() < 1e-12);
        assert!(r.iterations < 60, "{}", r.iterations);
    }

    #[test]
    fn unperturbed_spectrum() {
        let plan = SearchPlan::new(0, 8);
        let recs = solve_range(&zero(), &zero(), &plan).unwrap();
        assert_eq!(recs.len(), 9);
        for r in &recs {
            let want = disk_center(r.index).powi(4);
            assert!((r.mu / want - 1.0).abs() < 1e-10, "{r:?}");
            assert!(r.bracket.0 < r.z_root && r.z_root < r.bracket.1);
            assert!(r.bracket.1 - r.bracket.0 <= plan.z_abs_tol);
        }
        assert_eq!(recs[0].method, RootMethod::LowScan);
        assert_eq!(recs[8].method, RootMethod::DiskBracket);
    }

    #[test]
    fn constant_q_shifts_spectrum() {
        let c = 7.5;
        let plan = SearchPlan::new(0, 6);
        let recs = solve_range(&zero(), &PeriodicCoefficient::constant(c), &plan).unwrap();
        for r in &recs {
            let want = disk_center(r.index).powi(4) + c;
            assert!((r.mu - want).abs() <= 1e-8 * (1.0 + want), "{r:?} want {want}");
        }
    }

    #[test]
    fn negative_eigenvalue_is_found() {
        // q = −200 pushes μ₀ = (π/2)⁴ − 200 below zero.
        let plan = SearchPlan::new(0, 2);
        let recs = solve_range(&zero(), &PeriodicCoefficient::constant(-200.0), &plan).unwrap();
        let want = disk_center(0).powi(4) - 200.0;
        assert!(recs[0].mu < 0.0 && (recs[0].mu - want).abs() < 1e-8 * 200.0, "{:?}", recs[0]);
        assert!(recs[0].z_root < 0.0);
    }

    #[test]
    fn disk_and_ball_counts_unperturbed() {
        let plan = SearchPlan::new(0, 0);
        assert_eq!(count_zeros_in_disk(&zero(), &zero(), 4, &plan).unwrap(), 1);
        let r = count_zeros_in_disk_with_radius(&zero(), &zero(), 4, PI / 8.0, &plan).unwrap();
        assert_eq!(r.winding, 1);
        assert_eq!(count_zeros_in_ball(&zero(), &zero(), 3, &plan).unwrap(), 4);
        assert_eq!(count_zeros_in_ball(&zero(), &zero(), 0, &plan).unwrap(), 1);
    }

    #[test]
    fn contour_through_a_zero_is_reported() {
        let plan = SearchPlan::new(0, 0);
        // The circle |z − (π/2 + 4π)| = π passes through the zero at π/2 + 3π.
        let err = count_zeros_in_disk_with_radius(&zero(), &zero(), 4, PI, &plan).unwrap_err();
        assert!(matches!(err, SpectrumError::ContourTooClose { .. }), "{err:?}");
    }

    #[test]
    fn localize_retries_radius() {
        let plan = SearchPlan::new(0, 0);
        let loc = localize_disk(&zero(), &zero(), 5, &plan).unwrap();
        assert_eq!(loc.report.winding, 1);
        assert_eq!(loc.radius, DISK_RADIUS);
    }

    #[test]
    fn invalid_plans() {
        let mut plan = SearchPlan::new(3, 2);
        assert!(matches!(solve_range(&zero(), &zero(), &plan), Err(SpectrumError::InvalidPlan(_))));
        plan = SearchPlan::new(0, 2);
        plan.z_abs_tol = 0.0;
        assert!(plan.validate().is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let p = PeriodicCoefficient::sine(1, 1.0);
        let q = PeriodicCoefficient::cosine(1, 1.0);
        let a = solve_range(&p, &q, &SearchPlan::new(0, 7).with_execution(Execution::Sequential)).unwrap();
        let b = solve_range(&p, &q, &SearchPlan::new(0, 7).with_execution(Execution::Parallel)).unwrap();
        assert_eq!(a, b);
    }
}
