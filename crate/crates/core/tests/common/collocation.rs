//! Independent eigenvalue oracle: Chebyshev spectral discretization in
//! integrated form.
//!
//! The unknown is `u = y⁗` as a Chebyshev series of degree N on [0, 1];
//! `y` and its derivatives follow from exact repeated integration of the
//! series plus a cubic whose four coefficients are eliminated with the
//! boundary rows. Collocating `u + p y″ + p′ y′ + q y = λ y` at the N+1
//! Chebyshev–Lobatto points gives `L u = λ M u`; the small eigenvalues
//! are the reciprocals of the large eigenvalues of `L⁻¹M`. No
//! differentiation matrices are formed, so the conditioning stays mild.

use nalgebra::{DMatrix, DVector};
use quartic_core::coefficients::PeriodicCoefficient;

/// Coefficient map of `∫ dx` on [0, 1] acting on Chebyshev coefficients in
/// `t = 2x − 1`, size `k × k` (degree grows by one; the top row must be unused).
fn integration_matrix(k: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(k, k);
    // ∫T₀ = T₁, ∫T₁ = T₂/4, ∫T_m = T_{m+1}/(2(m+1)) − T_{m−1}/(2(m−1)); dx = dt/2
    for m in 0..k - 1 {
        match m {
            0 => j[(1, 0)] += 0.5,
            1 => j[(2, 1)] += 0.125,
            _ => {
                j[(m + 1, m)] += 0.25 / (m + 1) as f64;
                j[(m - 1, m)] -= 0.25 / (m - 1) as f64;
            }
        }
    }
    j
}

/// `T_k(t)` for k < `len`.
fn cheb_row(t: f64, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    out[0] = 1.0;
    if len > 1 {
        out[1] = t;
    }
    for k in 2..len {
        out[k] = 2.0 * t * out[k - 1] - out[k - 2];
    }
    out
}

/// Value rows of `d^r/dx^r (c₀ + c₁x + c₂x² + c₃x³)` at `x`.
fn cubic_row(x: f64, r: usize) -> [f64; 4] {
    match r {
        0 => [1.0, x, x * x, x * x * x],
        1 => [0.0, 1.0, 2.0 * x, 3.0 * x * x],
        2 => [0.0, 0.0, 2.0, 6.0 * x],
        _ => [0.0, 0.0, 0.0, 6.0],
    }
}

/// The lowest `count` eigenvalues, sorted by real part, from a degree-`n` discretization.
pub fn eigenvalues(p: &PeriodicCoefficient, q: &PeriodicCoefficient, n: usize, count: usize) -> Vec<f64> {
    let nu = n + 1;
    let k = n + 5;
    let j = integration_matrix(k);
    // embed u (length nu) into the padded coefficient space
    let mut embed = DMatrix::zeros(k, nu);
    for i in 0..nu {
        embed[(i, i)] = 1.0;
    }
    // J^{4−r}: coefficients of y^{(r)} minus the cubic part
    let mut jp = vec![embed.clone()];
    for _ in 0..4 {
        let next = &j * jp.last().unwrap();
        jp.push(next);
    }
    let integ = |r: usize| &jp[4 - r];

    let row_at = |x: f64, r: usize| -> (DVector<f64>, [f64; 4]) {
        let e = DVector::from_vec(cheb_row(2.0 * x - 1.0, k));
        ((integ(r).transpose() * e), cubic_row(x, r))
    };

    // boundary rows: y′(0), y‴(0) + p(0)y′(0), y(1), y″(1)
    let p0 = p.value(0.0);
    let (a1, c1) = row_at(0.0, 1);
    let (a3, c3) = row_at(0.0, 3);
    let (b0, d0) = row_at(1.0, 0);
    let (b2, d2) = row_at(1.0, 2);
    let bu_rows = [a1.clone(), &a3 + &a1 * p0, b0, b2];
    let bc_rows = [c1, std::array::from_fn::<f64, 4, _>(|i| c3[i] + p0 * c1[i]), d0, d2];
    let bu = DMatrix::from_fn(4, nu, |r, c| bu_rows[r][c]);
    let bc = DMatrix::from_fn(4, 4, |r, c| bc_rows[r][c]);
    // cubic coefficients = −Bc⁻¹ Bu u
    let elim = -bc.lu().solve(&bu).expect("boundary block is invertible");

    let xs: Vec<f64> = (0..nu).map(|i| 0.5 * (1.0 + (std::f64::consts::PI * i as f64 / n as f64).cos())).collect();
    let deriv_values = |r: usize| -> DMatrix<f64> {
        let mut m = DMatrix::zeros(nu, nu);
        for (row, &x) in xs.iter().enumerate() {
            let (a, c) = row_at(x, r);
            let cv = nalgebra::RowDVector::from_row_slice(&c);
            let full = a.transpose() + cv * &elim;
            m.set_row(row, &full);
        }
        m
    };
    let m0 = deriv_values(0);
    let m1 = deriv_values(1);
    let m2 = deriv_values(2);
    let u_vals = DMatrix::from_fn(nu, nu, |r, c| cheb_row(2.0 * xs[r] - 1.0, nu)[c]);
    let mut l = u_vals;
    for (r, &x) in xs.iter().enumerate() {
        let (pv, dpv, qv) = (p.value(x), p.eval(x, 1).unwrap(), q.value(x));
        for c in 0..nu {
            l[(r, c)] += pv * m2[(r, c)] + dpv * m1[(r, c)] + qv * m0[(r, c)];
        }
    }
    let a = l.lu().solve(&m0).expect("λ = 0 is not an eigenvalue");
    let mut lams: Vec<f64> = a
        .complex_eigenvalues()
        .iter()
        .filter(|s| s.norm() > 1e-14)
        .map(|s| 1.0 / s)
        .filter(|l| l.im.abs() <= 1e-6 * l.norm())
        .map(|l| l.re)
        .collect();
    lams.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lams.truncate(count);
    lams
}

#[cfg(test)]
mod tests {}
