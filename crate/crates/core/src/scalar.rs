//! Floating scalar abstraction: plain `f64` or double-double.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};
use twofloat::TwoFloat;

/// Working precision of the shooting integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Precision {
    #[default]
    Double,
    /// Software double-double (~31 significant digits).
    Extended,
}

impl Precision {
    /// Default integrator tolerance for this precision.
    pub fn default_ode_tolerance(self) -> f64 {
        match self {
            Precision::Double => 1e-12,
            Precision::Extended => 1e-20,
        }
    }

    /// Accepted tolerance range `[lo, hi]`.
    pub fn tolerance_range(self) -> (f64, f64) {
        match self {
            Precision::Double => (1e-14, 1e-6),
            Precision::Extended => (1e-24, 1e-6),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision `{other}` (expected double or extended)")),
        }
    }
}

pub trait Scalar: Float + FromPrimitive + Debug + Send + Sync + 'static {
    fn lift(x: f64) -> Self;
    fn lower(self) -> f64;

    /// Parses a plain decimal literal (`-1.25e-3`) at full working precision.
    fn from_decimal(s: &str) -> Self {
        decimal_to_scalar(s)
    }

    /// Division correctly rounded to the working precision.
    fn div_accurate(self, rhs: Self) -> Self {
        self / rhs
    }
}

impl Scalar for f64 {
    #[inline]
    fn lift(x: f64) -> Self {
        x
    }
    #[inline]
    fn lower(self) -> f64 {
        self
    }
    fn from_decimal(s: &str) -> Self {
        s.parse().expect("valid decimal literal")
    }
}

impl Scalar for TwoFloat {
    #[inline]
    fn lift(x: f64) -> Self {
        TwoFloat::from(x)
    }
    #[inline]
    fn lower(self) -> f64 {
        self.hi() + self.lo()
    }

    // `TwoFloat / TwoFloat` in twofloat 0.8 forms `1 − b·(1/b)` without an
    // FMA and so is only accurate to ~1e-16. One correction step using the
    // exact mixed `TwoFloat · f64` product restores full precision.
    fn div_accurate(self, rhs: Self) -> Self {
        let th = self.hi() / rhs.hi();
        let r = self - rhs * th;
        TwoFloat::new_add(th, r.hi() / rhs.hi())
    }
}

fn decimal_to_scalar<T: Scalar>(s: &str) -> T {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().expect("exponent")),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let ten = T::lift(10.0);
    let mut acc = T::zero();
    let mut frac_digits = 0i32;
    let mut seen_point = false;
    for ch in digits.chars() {
        match ch {
            '.' => seen_point = true,
            d => {
                let v = d.to_digit(10).expect("decimal digit") as f64;
                acc = acc * ten + T::lift(v);
                if seen_point {
                    frac_digits += 1;
                }
            }
        }
    }
    let e = exp - frac_digits;
    let mut scale = T::one();
    for _ in 0..e.abs() {
        scale = scale * ten;
    }
    let v = if e >= 0 { acc * scale } else { acc.div_accurate(scale) };
    if neg {
        -v
    } else {
        v
    }
}
