//! Independent reference formulas shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use ptsusy::Complex64;

/// Transmission through a rectangular barrier (`v0 > 0`) or well
/// (`v0 < 0`) of width `a`, for `ħ = 2m = 1`.
pub fn textbook_transmission(v0: f64, a: f64, e: f64) -> f64 {
    if e < v0 {
        let kappa = (v0 - e).sqrt();
        1.0 / (1.0 + v0 * v0 * (kappa * a).sinh().powi(2) / (4.0 * e * (v0 - e)))
    } else if e > v0 {
        let kp = (e - v0).sqrt();
        1.0 / (1.0 + v0 * v0 * (kp * a).sin().powi(2) / (4.0 * e * (e - v0)))
    } else {
        1.0 / (1.0 + v0 * a * a / 4.0)
    }
}

/// Exact eigenvalues of the three-point Laplacian on `n` interior nodes of
/// `[0, L]`, shifted by a constant `v`.
pub fn discrete_box_level(n: usize, length: f64, v: f64, level: usize) -> f64 {
    let h = length / (n + 1) as f64;
    let s = ((level + 1) as f64 * PI / (2.0 * (n + 1) as f64)).sin();
    4.0 / (h * h) * s * s + v
}

/// Superpotentials written out directly from their definitions, for
/// cross-checking the library closed forms.
pub fn reference_w(family: &str, k: f64, q: f64, x: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    match family {
        "cot" => -k * (k * x).cos() / (k * x).sin() + i * q / (k * x).sin(),
        "tan" => k * (k * x).tan() + i * q / (k * x).cos(),
        "right" => -i * k + q * (-i * k * x).exp(),
        "left" => i * k + q * (i * k * x).exp(),
        _ => unreachable!(),
    }
}
