use num_complex::Complex64;

use crate::error::Result;

/// A complex scalar function of position.
///
/// Potentials, superpotentials and wave functions all present this
/// interface so that the discretizer, the residual checker and the
/// PT test can consume any of them.
pub trait ComplexField {
    fn eval(&self, x: f64) -> Result<Complex64>;

    /// Distance from `x` to the nearest point where the field diverges or
    /// stops being defined. `None` for fields that are regular everywhere.
    fn singularity_distance(&self, _x: f64) -> Option<f64> {
        None
    }

    fn sample(&self, xs: &[f64]) -> Result<Vec<Complex64>> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

impl<F> ComplexField for F
where
    F: Fn(f64) -> Complex64,
{
    fn eval(&self, x: f64) -> Result<Complex64> {
        Ok(self(x))
    }
}

/// Constant potential, e.g. the `V = -1` baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub Complex64);

impl Constant {
    pub fn real(v: f64) -> Self {
        Self(Complex64::new(v, 0.0))
    }
}

impl ComplexField for Constant {
    fn eval(&self, _x: f64) -> Result<Complex64> {
        Ok(self.0)
    }
}

/// `n` evenly spaced points covering the closed interval `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|j| if j == n - 1 { b } else { a + j as f64 * step })
                .collect()
        }
    }
}
