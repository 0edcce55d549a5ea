#![allow(dead_code)]

pub mod collocation;

use quartic_core::coefficients::{Harmonic, PeriodicCoefficient};

/// p = sin 2πx + 0.3 cos 4πx.
pub fn smooth_p() -> PeriodicCoefficient {
    PeriodicCoefficient::new(0.0, vec![Harmonic { k: 1, a: 0.0, b: 1.0 }, Harmonic { k: 2, a: 0.3, b: 0.0 }]).unwrap()
}

/// q = cos 2πx + 0.2 sin 6πx.
pub fn smooth_q() -> PeriodicCoefficient {
    PeriodicCoefficient::new(0.0, vec![Harmonic { k: 1, a: 1.0, b: 0.0 }, Harmonic { k: 3, a: 0.0, b: 0.2 }]).unwrap()
}
