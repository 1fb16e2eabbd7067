//! Ground states `ψ = N exp(-∫W)` of the partner `V1`, superpositions,
//! densities and the PT test for fields.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{linspace, ComplexField};
use crate::susy::{Family, SuperpotentialSpec};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Number of Simpson nodes used by [`WaveFunctionSpec::normalized`].
pub const NORMALIZATION_NODES: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Box,
    Line,
}

/// Interval on which states and spectra live.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub x_min: f64,
    pub x_max: f64,
    pub kind: DomainKind,
}

impl Domain {
    pub fn new(x_min: f64, x_max: f64, kind: DomainKind) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidInput(format!(
                "domain needs x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Self { x_min, x_max, kind })
    }

    /// The square well `[0, π]`.
    pub fn well_box() -> Self {
        Self {
            x_min: 0.0,
            x_max: PI,
            kind: DomainKind::Box,
        }
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    /// Parity center: the box midpoint, or the origin on the line.
    pub fn center(&self) -> f64 {
        match self.kind {
            DomainKind::Box => 0.5 * (self.x_min + self.x_max),
            DomainKind::Line => 0.0,
        }
    }
}

/// Closed-form ground state of `V1` for one family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveFunctionSpec {
    pub family: Family,
    pub k: f64,
    pub q: f64,
    pub norm: Complex64,
}

impl WaveFunctionSpec {
    /// Unit normalization constant.
    pub fn new(family: Family, k: f64, q: f64) -> Result<Self> {
        // Reuse the superpotential validation.
        SuperpotentialSpec::new(family, k, q)?;
        Ok(Self {
            family,
            k,
            q,
            norm: Complex64::new(1.0, 0.0),
        })
    }

    pub fn with_norm(mut self, norm: Complex64) -> Self {
        self.norm = norm;
        self
    }

    /// The superpotential this state is built from (`α = k`).
    pub fn superpotential(&self) -> SuperpotentialSpec {
        SuperpotentialSpec::new(self.family, self.k, self.q)
            .expect("parameters validated on construction")
    }

    /// Open cell on which the phase logarithm stays on its principal branch.
    pub fn cell(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::CotangentWell => Some((0.0, PI / self.k)),
            Family::TangentWell => Some((-0.5 * PI / self.k, 0.5 * PI / self.k)),
            Family::PlaneRight | Family::PlaneLeft => None,
        }
    }

    /// Box domain matching the cell, for the well families.
    pub fn box_domain(&self) -> Option<Domain> {
        self.cell().map(|(lo, hi)| Domain {
            x_min: lo,
            x_max: hi,
            kind: DomainKind::Box,
        })
    }

    fn check_inside(&self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite position {x}")));
        }
        if let Some((lo, hi)) = self.cell() {
            let eps = 1e-6 * PI / self.k;
            if x < lo - eps || x > hi + eps {
                return Err(Error::DomainViolation { x, lo, hi });
            }
            for edge in [lo, hi] {
                if (x - edge).abs() <= eps {
                    return Err(Error::SingularPoint {
                        x,
                        singularity: edge,
                    });
                }
            }
        }
        Ok(())
    }

    /// `ψ(x)`.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        self.check_inside(x)?;
        let (k, q) = (self.k, self.q);
        let psi = match self.family {
            Family::CotangentWell => {
                // csc(kx) - cot(kx) = tan(kx/2) > 0 on (0, π/k)
                let arg = (0.5 * k * x).tan();
                if arg <= 0.0 {
                    let (lo, hi) = self.cell().unwrap();
                    return Err(Error::DomainViolation { x, lo, hi });
                }
                (k * x).sin() * Complex64::from_polar(1.0, -(q / k) * arg.ln())
            }
            Family::TangentWell => {
                // sec(kx) + tan(kx) = tan(π/4 + kx/2) > 0 on (-π/2k, π/2k)
                let arg = (0.25 * PI + 0.5 * k * x).tan();
                if arg <= 0.0 {
                    let (lo, hi) = self.cell().unwrap();
                    return Err(Error::DomainViolation { x, lo, hi });
                }
                (k * x).cos() * Complex64::from_polar(1.0, -(q / k) * arg.ln())
            }
            Family::PlaneRight => {
                let e = Complex64::from_polar(1.0, -k * x);
                Complex64::from_polar(1.0, k * x) * (-I * q * e / k).exp()
            }
            Family::PlaneLeft => {
                let e = Complex64::from_polar(1.0, k * x);
                Complex64::from_polar(1.0, -k * x) * (I * q * e / k).exp()
            }
        };
        Ok(self.norm * psi)
    }

    /// `ψ'(x) = -W(x) ψ(x)`.
    pub fn derivative(&self, x: f64) -> Result<Complex64> {
        let psi = self.eval(x)?;
        Ok(-self.superpotential().superpotential(x)? * psi)
    }

    /// `|ψ(x)|²`.
    pub fn probability_density(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.norm_sqr())
    }

    /// Rescales `norm` so that `∫|ψ|² = 1` over the cell, using composite
    /// Simpson on [`NORMALIZATION_NODES`] nodes. The density at the walls
    /// is its Dirichlet limit, zero.
    pub fn normalized(&self) -> Result<Self> {
        let Some((lo, hi)) = self.cell() else {
            return Err(Error::InvalidInput(
                "normalization is defined on box domains only".into(),
            ));
        };
        let xs = linspace(lo, hi, NORMALIZATION_NODES);
        let rho = xs
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                if j == 0 || j == xs.len() - 1 {
                    Ok(0.0)
                } else {
                    self.probability_density(x)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let integral = simpson(&rho, (hi - lo) / (NORMALIZATION_NODES - 1) as f64);
        if integral <= 0.0 {
            return Err(Error::InvalidInput("state has zero norm".into()));
        }
        Ok(self.with_norm(self.norm / integral.sqrt()))
    }
}

impl ComplexField for WaveFunctionSpec {
    fn eval(&self, x: f64) -> Result<Complex64> {
        WaveFunctionSpec::eval(self, x)
    }

    fn singularity_distance(&self, x: f64) -> Option<f64> {
        self.cell()
            .map(|(lo, hi)| (x - lo).abs().min((hi - x).abs()))
    }
}

/// Composite Simpson rule on an odd number of equally spaced samples.
pub fn simpson(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd number of nodes");
    let inner: f64 = values[1..n - 1]
        .iter()
        .enumerate()
        .map(|(j, v)| if j % 2 == 0 { 4.0 * v } else { 2.0 * v })
        .sum();
    step / 3.0 * (values[0] + inner + values[n - 1])
}

/// `a ψ1(x) + b ψ2(x)`.
pub fn superpose(
    a: Complex64,
    psi1: &WaveFunctionSpec,
    b: Complex64,
    psi2: &WaveFunctionSpec,
    x: f64,
) -> Result<Complex64> {
    Ok(a * psi1.eval(x)? + b * psi2.eval(x)?)
}

/// `max |F(2c - x) - conj(F(x))|` over the samples. Zero means the field is
/// PT-symmetric about `center`.
pub fn pt_asymmetry<F: ComplexField + ?Sized>(
    field: &F,
    center: f64,
    sample_points: &[f64],
) -> Result<f64> {
    sample_points.iter().try_fold(0.0_f64, |acc, &x| {
        let mirrored = field.eval(2.0 * center - x)?;
        let direct = field.eval(x)?;
        Ok(acc.max((mirrored - direct.conj()).norm()))
    })
}

/// `[-ψ'' + (V - E) ψ] / max(|ψ|, 1e-30)` at `x`, with `ψ''` from the
/// three-point central difference of step `h`.
pub fn schrodinger_residual<V: ComplexField + ?Sized>(
    potential: &V,
    psi: &WaveFunctionSpec,
    energy: f64,
    x: f64,
    h: f64,
) -> Result<Complex64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidInput(format!(
            "step must be positive, got {h}"
        )));
    }
    let distance = [
        potential.singularity_distance(x),
        ComplexField::singularity_distance(psi, x),
    ]
    .into_iter()
    .flatten()
    .fold(f64::INFINITY, f64::min);
    let v = potential.eval(x)?;
    let centre = psi.eval(x)?;
    if h > 0.1 * distance {
        return Err(Error::StepTooLarge { h, distance });
    }
    // Use the steps actually represented in floating point so that the
    // rounding of x ± h does not leak into ψ''.
    let (xp, xm) = (x + h, x - h);
    let (hp, hm) = (xp - x, x - xm);
    let second = 2.0 * ((psi.eval(xp)? - centre) / hp - (centre - psi.eval(xm)?) / hm) / (hp + hm);
    let residual = -second + (v - energy) * centre;
    Ok(residual / centre.norm().max(1e-30))
}
