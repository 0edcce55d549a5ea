//! Adaptive DOP853 integration of linear complex systems on [0, 1].
//!
//! The stepper is generic over the working scalar so the same code runs in
//! `f64` and in double-double. Coefficients of the tableau are parsed from
//! their 30-digit decimal expansions once per scalar type.

use num_complex::Complex;
use std::sync::OnceLock;
use thiserror::Error;
use twofloat::TwoFloat;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("step size underflow at x = {x} (h = {h:e})")]
pub struct IntegrationFailure {
    pub x: f64,
    pub h: f64,
}

/// A linear system `y' = M(x) y` in some state space of complex vectors.
pub(crate) trait Flow<T: Scalar>: Sync {
    fn dim(&self) -> usize;
    fn rhs(&self, x: T, y: &[Complex<T>], dy: &mut [Complex<T>]);
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepControl {
    /// Relative local error target, measured against the max-norm of the state.
    pub tol: f64,
    pub h_max: f64,
    pub h_min: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
}

pub(crate) struct Tableau<T> {
    c: [T; 12],
    a: Vec<Vec<(usize, T)>>,
    b: Vec<(usize, T)>,
    e3: [T; 12],
    e5: [T; 12],
}

impl<T: Scalar> Tableau<T> {
    fn build() -> Self {
        let c = std::array::from_fn(|i| T::from_decimal(dop853::C[i]));
        let mut a = vec![Vec::new(); 12];
        for &(i, j, v) in dop853::A {
            a[i].push((j, T::from_decimal(v)));
        }
        let b: Vec<(usize, T)> = dop853::B.iter().map(|&(j, v)| (j, T::from_decimal(v))).collect();
        let mut e3 = [T::zero(); 12];
        for &(j, v) in &b {
            e3[j] = v;
        }
        for &(j, v) in dop853::E3_SHIFT {
            e3[j] = e3[j] - T::from_decimal(v);
        }
        let mut e5 = [T::zero(); 12];
        for &(j, v) in dop853::E5 {
            e5[j] = T::from_decimal(v);
        }
        Self { c, a, b, e3, e5 }
    }
}

pub(crate) trait HasTableau: Scalar {
    fn tableau() -> &'static Tableau<Self>;
}

impl HasTableau for f64 {
    fn tableau() -> &'static Tableau<Self> {
        static T: OnceLock<Tableau<f64>> = OnceLock::new();
        T.get_or_init(Tableau::build)
    }
}

impl HasTableau for TwoFloat {
    fn tableau() -> &'static Tableau<Self> {
        static T: OnceLock<Tableau<TwoFloat>> = OnceLock::new();
        T.get_or_init(Tableau::build)
    }
}

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

/// Integrates `y` from x = 0 to x = 1 in place. `after_accept` may rescale or
/// re-orthonormalize the state between steps (the system is linear, so any
/// invertible right action commutes with the flow).
pub(crate) fn integrate<T, F, A>(
    flow: &F,
    y: &mut [Complex<T>],
    ctl: StepControl,
    mut after_accept: A,
) -> Result<IntegrationStats, IntegrationFailure>
where
    T: HasTableau,
    F: Flow<T>,
    A: FnMut(&mut [Complex<T>]),
{
    let tab = T::tableau();
    let n = flow.dim();
    debug_assert_eq!(y.len(), n);
    let zero = Complex::new(T::zero(), T::zero());
    let mut k = vec![vec![zero; n]; 12];
    let mut ytmp = vec![zero; n];
    let mut ynew = vec![zero; n];
    let one = T::one();
    let mut x = T::zero();
    let mut h = ctl.h_max.min(0.01);
    let mut stats = IntegrationStats::default();
    let mut rejected_last = false;
    let exponent = -1.0 / 8.0;

    while x < one {
        let remaining = (one - x).lower();
        let last = h >= remaining;
        let ht = if last { one - x } else { T::lift(h) };

        flow.rhs(x, y, &mut k[0]);
        for s in 1..12 {
            for i in 0..n {
                let mut acc = zero;
                for &(j, a) in &tab.a[s] {
                    acc = acc + k[j][i] * a;
                }
                ytmp[i] = y[i] + acc * ht;
            }
            flow.rhs(x + tab.c[s] * ht, &ytmp, &mut k[s]);
        }
        let mut ymax = 0.0f64;
        for i in 0..n {
            let mut acc = zero;
            for &(j, b) in &tab.b {
                acc = acc + k[j][i] * b;
            }
            ynew[i] = y[i] + acc * ht;
            ymax = ymax.max(y[i].norm().lower()).max(ynew[i].norm().lower());
        }

        let scale = ctl.tol * ymax.max(f64::MIN_POSITIVE);
        let (mut err5, mut err3) = (0.0f64, 0.0f64);
        for i in 0..n {
            let (mut a5, mut a3) = (zero, zero);
            for j in 0..12 {
                a5 = a5 + k[j][i] * tab.e5[j];
                a3 = a3 + k[j][i] * tab.e3[j];
            }
            err5 += (a5.norm().lower() / scale).powi(2);
            err3 += (a3.norm().lower() / scale).powi(2);
        }
        let hf = ht.lower();
        let err = if err5 == 0.0 && err3 == 0.0 {
            0.0
        } else {
            hf * err5 / ((err5 + 0.01 * err3) * n as f64).sqrt()
        };

        if err <= 1.0 {
            x = if last { one } else { x + ht };
            y.copy_from_slice(&ynew);
            after_accept(y);
            stats.accepted += 1;
            let mut factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(exponent)).min(MAX_FACTOR)
            };
            if rejected_last {
                factor = factor.min(1.0);
            }
            rejected_last = false;
            h = (hf * factor).min(ctl.h_max);
        } else {
            stats.rejected += 1;
            rejected_last = true;
            h = hf * (SAFETY * err.powf(exponent)).max(MIN_FACTOR);
            if h < ctl.h_min {
                return Err(IntegrationFailure { x: x.lower(), h });
            }
        }
    }
    Ok(stats)
}

mod dop853 {
    pub(crate) const C: [&str; 12] = [
        "0.0",
        "0.526001519587677318785587544488e-01",
        "0.789002279381515978178381316732e-01",
        "0.118350341907227396726757197510",
        "0.281649658092772603273242802490",
        "0.333333333333333333333333333333",
        "0.25",
        "0.307692307692307692307692307692",
        "0.651282051282051282051282051282",
        "0.6",
        "0.857142857142857142857142857142",
        "1.0",
    ];

    /// Nonzero (row, column, value) entries of the stage matrix, rows 1..=11.
    pub(crate) const A: &[(usize, usize, &str)] = &[
        (1, 0, "5.26001519587677318785587544488e-2"),
        (2, 0, "1.97250569845378994544595329183e-2"),
        (2, 1, "5.91751709536136983633785987549e-2"),
        (3, 0, "2.95875854768068491816892993775e-2"),
        (3, 2, "8.87627564304205475450678981324e-2"),
        (4, 0, "2.41365134159266685502369798665e-1"),
        (4, 2, "-8.84549479328286085344864962717e-1"),
        (4, 3, "9.24834003261792003115737966543e-1"),
        (5, 0, "3.7037037037037037037037037037e-2"),
        (5, 3, "1.70828608729473871279604482173e-1"),
        (5, 4, "1.25467687566822425016691814123e-1"),
        (6, 0, "3.7109375e-2"),
        (6, 3, "1.70252211019544039314978060272e-1"),
        (6, 4, "6.02165389804559606850219397283e-2"),
        (6, 5, "-1.7578125e-2"),
        (7, 0, "3.70920001185047927108779319836e-2"),
        (7, 3, "1.70383925712239993810214054705e-1"),
        (7, 4, "1.07262030446373284651809199168e-1"),
        (7, 5, "-1.53194377486244017527936158236e-2"),
        (7, 6, "8.27378916381402288758473766002e-3"),
        (8, 0, "6.24110958716075717114429577812e-1"),
        (8, 3, "-3.36089262944694129406857109825"),
        (8, 4, "-8.68219346841726006818189891453e-1"),
        (8, 5, "2.75920996994467083049415600797e1"),
        (8, 6, "2.01540675504778934086186788979e1"),
        (8, 7, "-4.34898841810699588477366255144e1"),
        (9, 0, "4.77662536438264365890433908527e-1"),
        (9, 3, "-2.48811461997166764192642586468"),
        (9, 4, "-5.90290826836842996371446475743e-1"),
        (9, 5, "2.12300514481811942347288949897e1"),
        (9, 6, "1.52792336328824235832596922938e1"),
        (9, 7, "-3.32882109689848629194453265587e1"),
        (9, 8, "-2.03312017085086261358222928593e-2"),
        (10, 0, "-9.3714243008598732571704021658e-1"),
        (10, 3, "5.18637242884406370830023853209"),
        (10, 4, "1.09143734899672957818500254654"),
        (10, 5, "-8.14978701074692612513997267357"),
        (10, 6, "-1.85200656599969598641566180701e1"),
        (10, 7, "2.27394870993505042818970056734e1"),
        (10, 8, "2.49360555267965238987089396762"),
        (10, 9, "-3.0467644718982195003823669022"),
        (11, 0, "2.27331014751653820792359768449"),
        (11, 3, "-1.05344954667372501984066689879e1"),
        (11, 4, "-2.00087205822486249909675718444"),
        (11, 5, "-1.79589318631187989172765950534e1"),
        (11, 6, "2.79488845294199600508499808837e1"),
        (11, 7, "-2.85899827713502369474065508674"),
        (11, 8, "-8.87285693353062954433549289258"),
        (11, 9, "1.23605671757943030647266201528e1"),
        (11, 10, "6.43392746015763530355970484046e-1"),
    ];

    /// Nonzero weights of the 8th-order solution.
    pub(crate) const B: &[(usize, &str)] = &[
        (0, "5.42937341165687622380535766363e-2"),
        (5, "4.45031289275240888144113950566"),
        (6, "1.89151789931450038304281599044"),
        (7, "-5.8012039600105847814672114227"),
        (8, "3.1116436695781989440891606237e-1"),
        (9, "-1.52160949662516078556178806805e-1"),
        (10, "2.01365400804030348374776537501e-1"),
        (11, "4.47106157277725905176885569043e-2"),
    ];

    /// Amounts subtracted from `B` to form the 3rd-order error weights.
    pub(crate) const E3_SHIFT: &[(usize, &str)] = &[
        (0, "0.244094488188976377952755905512"),
        (8, "0.733846688281611857341361741547"),
        (11, "0.220588235294117647058823529412e-1"),
    ];

    pub(crate) const E5: &[(usize, &str)] = &[
        (0, "0.1312004499419488073250102996e-1"),
        (5, "-0.1225156446376204440720569753e+1"),
        (6, "-0.4957589496572501915214079952"),
        (7, "0.1664377182454986536961530415e+1"),
        (8, "-0.3503288487499736816886487290"),
        (9, "0.3341791187130174790297318841"),
        (10, "0.8192320648511571246570742613e-1"),
        (11, "-0.2235530786388629525884427845e-1"),
    ];
}
