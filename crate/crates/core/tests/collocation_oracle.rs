mod common;

use quartic_core::coefficients::PeriodicCoefficient;

#[test]
fn unperturbed_matches_closed_form() {
    let z = PeriodicCoefficient::zero();
    let got = common::collocation::eigenvalues(&z, &z, 200, 8);
    for (n, mu) in got.iter().enumerate() {
        let want = (std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * n as f64).powi(4);
        assert!((mu / want - 1.0).abs() < 1e-9, "n={n} {mu} {want}");
    }
}

#[test]
fn resolution_converged() {
    let (p, q) = (common::smooth_p(), common::smooth_q());
    let a = common::collocation::eigenvalues(&p, &q, 200, 7);
    let b = common::collocation::eigenvalues(&p, &q, 240, 7);
    for (x, y) in a.iter().zip(&b) {
        assert!((x / y - 1.0).abs() < 1e-9, "{x} {y}");
    }
}
