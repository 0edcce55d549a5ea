use std::io::Write;

use quartic_core::asymptotics::{fit_residual_order, mu_asymptotic, FitStatus, Order};
use quartic_core::birkhoff::{self, Constants};
use quartic_core::coefficients::PeriodicCoefficient;
use quartic_core::par;
use quartic_core::spectrum::{localize_disk, solve_range, EigenvalueRecord, SpectrumError};
use quartic_core::{OdeOptions, Precision, SearchPlan};
use serde::Serialize;

use crate::config::{OutputFormat, ProblemConfig};
use crate::output::{json, num, Csv};
use crate::{Cli, Command, Exit, FormatArg, GlobalArgs, OrderArg, PrecisionArg};

pub const THREADS_ENV: &str = "QUARTIC_THREADS";

/// Everything a command needs after merging flags, environment and config.
struct Resolved {
    p: PeriodicCoefficient,
    q: PeriodicCoefficient,
    plan: SearchPlan,
    format: OutputFormat,
    threads: Option<usize>,
}

fn fail(code: Exit, msg: impl std::fmt::Display) -> Exit {
    eprintln!("error: {msg}");
    code
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

/// `--threads` beats `QUARTIC_THREADS`, which beats the config file.
fn resolve_threads(flag: Option<usize>, env: Option<&str>, config: Option<usize>) -> Result<Option<usize>, String> {
    if let Some(n) = flag {
        return if n == 0 { Err("--threads must be positive".into()) } else { Ok(Some(n)) };
    }
    if let Some(v) = env.filter(|v| !v.trim().is_empty()) {
        return match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV}={v} is not a positive integer")),
        };
    }
    Ok(config)
}

fn order_of(arg: Option<OrderArg>) -> Option<Order> {
    arg.map(|o| match o {
        OrderArg::Rough => Order::Rough,
        OrderArg::L1 => Order::L1,
        OrderArg::P1 => Order::P1,
        OrderArg::P2 => Order::P2,
        OrderArg::P3Full => Order::P3Full,
    })
}

fn resolve(g: &GlobalArgs) -> Result<Resolved, Exit> {
    let path = g.config.as_ref().ok_or_else(|| fail(Exit::ConfigError, "--config is required for this command"))?;
    let cfg = ProblemConfig::from_path(path).map_err(|e| fail(Exit::ConfigError, e))?;
    let precision = match g.precision {
        Some(PrecisionArg::Double) => Precision::Double,
        Some(PrecisionArg::Extended) => Precision::Extended,
        None => cfg.precision.into(),
    };
    let env = std::env::var(THREADS_ENV).ok();
    let threads = resolve_threads(g.threads, env.as_deref(), cfg.threads).map_err(|e| fail(Exit::ConfigError, e))?;
    let format = match g.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => cfg.output,
    };
    let mut plan = SearchPlan::new(cfg.n_range[0], cfg.n_range[1]).with_precision(precision);
    if let Some(t) = cfg.tolerances.ode_tol {
        let (lo, hi) = precision.tolerance_range();
        if !(lo..=hi).contains(&t) {
            return Err(fail(Exit::ConfigError, format!("ode_tol {t:e} outside [{lo:e}, {hi:e}] for {} precision", precision.name())));
        }
        plan.ode = OdeOptions { tolerance: t, ..plan.ode };
    }
    plan.z_abs_tol = cfg.tolerances.z_abs_tol;
    plan.validate().map_err(|e| fail(Exit::ConfigError, e))?;
    Ok(Resolved { p: cfg.p.build("p").map_err(|e| fail(Exit::ConfigError, e))?, q: cfg.q.build("q").map_err(|e| fail(Exit::ConfigError, e))?, plan, format, threads })
}

pub fn run(cli: &Cli) -> Exit {
    match &cli.command {
        Command::VerifyAlgebra { constants } => verify_algebra(constants.as_deref(), cli.global.format),
        cmd => {
            let r = match resolve(&cli.global) {
                Ok(r) => r,
                Err(code) => return code,
            };
            let order = order_of(cli.global.order);
            par::with_threads(r.threads, || match cmd {
                Command::Solve => solve(&r),
                Command::Asymptote => asymptote(&r, order),
                Command::Compare => compare(&r, order.unwrap_or(Order::P3Full)),
                Command::Localize => localize(&r),
                Command::VerifyAlgebra { .. } => unreachable!(),
            })
        }
    }
}

#[derive(Serialize)]
struct RecordOut {
    n: u32,
    mu: f64,
    z_root: f64,
    bracket_width: f64,
    char_residual: f64,
    method: &'static str,
    iterations: u32,
    precision: &'static str,
}

impl From<&EigenvalueRecord> for RecordOut {
    fn from(r: &EigenvalueRecord) -> Self {
        RecordOut {
            n: r.index,
            mu: r.mu,
            z_root: r.z_root,
            bracket_width: r.bracket.1 - r.bracket.0,
            char_residual: r.char_residual,
            method: r.method.name(),
            iterations: r.refinement_iterations,
            precision: r.precision.name(),
        }
    }
}

fn records_table(format: OutputFormat, records: &[EigenvalueRecord], diagnostic: Option<&str>) -> String {
    match format {
        OutputFormat::Csv => {
            let mut csv = Csv::new("solve", &["n", "mu", "z_root", "bracket_width", "char_residual", "method", "iterations", "precision"]);
            for r in records {
                let o = RecordOut::from(r);
                csv.row(&[o.n.to_string(), num(o.mu), num(o.z_root), num(o.bracket_width), num(o.char_residual), o.method.into(), o.iterations.to_string(), o.precision.into()]);
            }
            csv.finish()
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                records: Vec<RecordOut>,
                diagnostic: Option<&'a str>,
            }
            json("solve", Body { records: records.iter().map(RecordOut::from).collect(), diagnostic })
        }
    }
}

fn spectral_failure(format: OutputFormat, err: SpectrumError) -> Exit {
    match err {
        SpectrumError::MissingRoot { detail, expected, found, records } => {
            emit(&records_table(format, &records, Some(&detail)));
            eprintln!("spectral count mismatch: expected {expected} roots, found {found}\n  {detail}");
            Exit::SpectralMismatch
        }
        SpectrumError::InvalidPlan(m) => fail(Exit::ConfigError, m),
        other => fail(Exit::SpectralMismatch, other),
    }
}

fn solve(r: &Resolved) -> Exit {
    match solve_range(&r.p, &r.q, &r.plan) {
        Ok(records) => {
            emit(&records_table(r.format, &records, None));
            Exit::Success
        }
        Err(e) => spectral_failure(r.format, e),
    }
}

#[derive(Serialize)]
struct AsymptoteOut {
    n: u32,
    order: &'static str,
    value: f64,
    leading: f64,
    p_term: f64,
    p_prime_term: f64,
    constant: f64,
    oscillatory: f64,
}

fn asymptote(r: &Resolved, order: Option<Order>) -> Exit {
    let orders: Vec<Order> = order.map_or_else(|| Order::ALL.to_vec(), |o| vec![o]);
    let mut rows = Vec::new();
    for n in r.plan.n_min.max(1)..=r.plan.n_max {
        for &o in &orders {
            match mu_asymptotic(&r.p, &r.q, n, o) {
                Ok(a) => rows.push(AsymptoteOut {
                    n,
                    order: o.name(),
                    value: a.value,
                    leading: a.terms.leading,
                    p_term: a.terms.p_term,
                    p_prime_term: a.terms.p_prime_term,
                    constant: a.terms.constant,
                    oscillatory: a.terms.oscillatory,
                }),
                Err(e) => return fail(Exit::ConfigError, e),
            }
        }
    }
    let text = match r.format {
        OutputFormat::Csv => {
            let mut csv = Csv::new("asymptote", &["n", "order", "value", "leading", "p_term", "p_prime_term", "constant", "oscillatory"]);
            for a in &rows {
                csv.row(&[a.n.to_string(), a.order.into(), num(a.value), num(a.leading), num(a.p_term), num(a.p_prime_term), num(a.constant), num(a.oscillatory)]);
            }
            csv.finish()
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Body {
                rows: Vec<AsymptoteOut>,
            }
            json("asymptote", Body { rows })
        }
    };
    emit(&text);
    Exit::Success
}

#[derive(Serialize)]
struct Summary {
    order: &'static str,
    status: &'static str,
    slope: Option<f64>,
    intercept: Option<f64>,
    excluded_points: usize,
}

#[derive(Serialize)]
struct ResidualOut {
    n: u32,
    numeric: f64,
    asymptotic: f64,
    residual: f64,
    excluded: bool,
}

fn compare(r: &Resolved, order: Order) -> Exit {
    let records = match solve_range(&r.p, &r.q, &r.plan) {
        Ok(recs) => recs,
        Err(e) => return spectral_failure(r.format, e),
    };
    let fit = match fit_residual_order(&records, &r.p, &r.q, order) {
        Ok(f) => f,
        Err(e) => return fail(Exit::ConfigError, e),
    };
    let fitted = fit.status == FitStatus::Fitted;
    let summary = Summary {
        order: order.name(),
        status: if fitted { "fitted" } else { "inconclusive" },
        slope: fitted.then_some(fit.slope),
        intercept: fitted.then_some(fit.intercept),
        excluded_points: fit.excluded_points(),
    };
    let points: Vec<ResidualOut> = fit
        .points
        .iter()
        .map(|p| ResidualOut { n: p.n, numeric: p.numeric, asymptotic: p.asymptotic, residual: p.residual, excluded: p.excluded })
        .collect();
    let text = match r.format {
        OutputFormat::Csv => {
            let mut csv = Csv::new("compare", &["n", "numeric", "asymptotic", "residual", "excluded"]);
            for p in &points {
                csv.row(&[p.n.to_string(), num(p.numeric), num(p.asymptotic), num(p.residual), p.excluded.to_string()]);
            }
            csv.comment(&format!("summary {}", serde_json::to_string(&summary).expect("serializable")));
            csv.finish()
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Body {
                summary: Summary,
                residuals: Vec<ResidualOut>,
            }
            json("compare", Body { summary, residuals: points })
        }
    };
    emit(&text);
    Exit::Success
}

#[derive(Serialize)]
struct DiskOut {
    n: u32,
    lo: f64,
    hi: f64,
    radius: f64,
    winding: i64,
    samples: usize,
    min_modulus: f64,
}

fn localize(r: &Resolved) -> Exit {
    // index 0 has no disk of its own; it is covered by the ball counts
    let ns: Vec<u32> = (r.plan.n_min.max(1)..=r.plan.n_max).collect();
    if ns.is_empty() {
        return fail(Exit::ConfigError, "localize needs an index range reaching n ≥ 1");
    }
    let disks = match r.plan.execution.try_map(&ns, |&n| localize_disk(&r.p, &r.q, n, &r.plan)) {
        Ok(d) => d,
        Err(e) => return spectral_failure(r.format, e),
    };
    let rows: Vec<DiskOut> = disks
        .iter()
        .map(|d| DiskOut {
            n: d.n,
            lo: d.interval.0,
            hi: d.interval.1,
            radius: d.radius,
            winding: d.report.winding,
            samples: d.report.samples,
            min_modulus: d.report.min_modulus,
        })
        .collect();
    let text = match r.format {
        OutputFormat::Csv => {
            let mut csv = Csv::new("localize", &["n", "lo", "hi", "radius", "winding", "samples", "min_modulus"]);
            for d in &rows {
                csv.row(&[d.n.to_string(), num(d.lo), num(d.hi), num(d.radius), d.winding.to_string(), d.samples.to_string(), num(d.min_modulus)]);
            }
            csv.finish()
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Body {
                disks: Vec<DiskOut>,
            }
            json("localize", Body { disks: rows })
        }
    };
    emit(&text);
    if disks.iter().all(|d| d.report.winding == 1) {
        Exit::Success
    } else {
        eprintln!("some disks do not contain exactly one zero");
        Exit::SpectralMismatch
    }
}

#[derive(Serialize)]
struct IdentityOut {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn verify_algebra(constants: Option<&std::path::Path>, format: Option<FormatArg>) -> Exit {
    let owned;
    let table = match constants {
        Some(path) => match Constants::from_path(path) {
            Ok(c) => {
                owned = c;
                &owned
            }
            Err(e) => return fail(Exit::ConfigError, format!("{}: {e}", path.display())),
        },
        None => Constants::embedded(),
    };
    let reports = birkhoff::verify_all_with(table);
    let all = reports.iter().all(|r| r.passed);
    let text = match format {
        Some(FormatArg::Json) => {
            #[derive(Serialize)]
            struct Body {
                all_passed: bool,
                identities: Vec<IdentityOut>,
            }
            let identities = reports.into_iter().map(|r| IdentityOut { name: r.name, passed: r.passed, detail: r.detail }).collect();
            json("verify-algebra", Body { all_passed: all, identities })
        }
        _ => {
            let width = reports.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
            let mut s = String::new();
            for r in &reports {
                let pad = width - r.name.chars().count();
                s.push_str(&format!("{}  {}{}  {}\n", if r.passed { "PASS" } else { "FAIL" }, r.name, " ".repeat(pad), r.detail));
            }
            s
        }
    };
    emit(&text);
    if all {
        Exit::Success
    } else {
        Exit::IdentityFailure
    }
}
