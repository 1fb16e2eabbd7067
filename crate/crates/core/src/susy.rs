//! Complexified superpotentials and their supersymmetric partners.
//!
//! Four families are supported. The two well families add an imaginary
//! term to the cotangent/tangent superpotentials of the square well, the
//! two plane families add a complex function to the plane-wave
//! superpotential `∓ik`:
//!
//! | family          | W(x)                          | f(x) (shape invariant) |
//! |-----------------|-------------------------------|------------------------|
//! | `CotangentWell` | `-k cot(αx) + i f(x)`         | `q csc(αx)`            |
//! | `TangentWell`   | ` k tan(αx) + i f(x)`         | `q sec(αx)`            |
//! | `PlaneRight`    | `-ik + f(x)`                  | `q exp(-iαx)`          |
//! | `PlaneLeft`     | ` ik + f(x)`                  | `q exp(iαx)`           |
//!
//! Partners follow `V1 = W² - W'` and `V2 = W² + W'`. With the listed `f`
//! the remainder `V2(k, x) - V1(k + α, x)` is the constant `α(α + 2k)`,
//! i.e. `3k²` once `α = k`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{linspace, ComplexField};

/// Default central-difference step for [`partner_from_superpotential`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    CotangentWell,
    TangentWell,
    PlaneRight,
    PlaneLeft,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::CotangentWell,
        Family::TangentWell,
        Family::PlaneRight,
        Family::PlaneLeft,
    ];

    pub fn is_well(self) -> bool {
        matches!(self, Family::CotangentWell | Family::TangentWell)
    }

    pub fn is_plane(self) -> bool {
        !self.is_well()
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::CotangentWell => "cotangent-well",
            Family::TangentWell => "tangent-well",
            Family::PlaneRight => "plane-right",
            Family::PlaneLeft => "plane-left",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cotangent-well" | "cotangent" | "cot" | "c" => Ok(Family::CotangentWell),
            "tangent-well" | "tangent" | "tan" | "t" => Ok(Family::TangentWell),
            "plane-right" | "right" | "r" => Ok(Family::PlaneRight),
            "plane-left" | "left" | "l" => Ok(Family::PlaneLeft),
            other => Err(Error::InvalidInput(format!("unknown family '{other}'"))),
        }
    }
}

/// Which member of the partner pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Partner {
    /// `W² - W'`
    V1,
    /// `W² + W'`
    V2,
}

impl Partner {
    fn sign(self) -> f64 {
        match self {
            Partner::V1 => -1.0,
            Partner::V2 => 1.0,
        }
    }
}

/// Choice of the added function `f`.
///
/// `DoubledFrequency` replaces the argument `αx` of `f` by `2αx`. It violates
/// the shape-invariance constraint and only serves as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Constraint {
    #[default]
    ShapeInvariant,
    DoubledFrequency,
}

/// One closed-form superpotential: family plus `(k, q, α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpotentialSpec {
    family: Family,
    k: f64,
    q: f64,
    alpha: f64,
    constraint: Constraint,
    exclusion: f64,
}

impl SuperpotentialSpec {
    /// Spec with `α = k` and the shape-invariant constraint.
    pub fn new(family: Family, k: f64, q: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
        }
        if !q.is_finite() {
            return Err(Error::InvalidInput(format!("q must be finite, got {q}")));
        }
        Ok(Self {
            family,
            k,
            q,
            alpha: k,
            constraint: Constraint::ShapeInvariant,
            exclusion: default_exclusion(k),
        })
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidInput(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        self.alpha = alpha;
        self.exclusion = default_exclusion(alpha);
        Ok(self)
    }

    /// Same `α`, `q` and constraint at a different wave number.
    pub fn with_k(mut self, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
        }
        self.k = k;
        Ok(self)
    }

    /// Same family, `k`, `α` and constraint with a different strength.
    pub fn with_q(mut self, q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::InvalidInput(format!("q must be finite, got {q}")));
        }
        self.q = q;
        Ok(self)
    }

    pub fn with_constraint(mut self, constraint: Constraint) -> Self {
        self.constraint = constraint;
        self
    }

    pub fn with_exclusion(mut self, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "exclusion radius must be non-negative, got {radius}"
            )));
        }
        self.exclusion = radius;
        Ok(self)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn constraint(&self) -> Constraint {
        self.constraint
    }

    pub fn exclusion(&self) -> f64 {
        self.exclusion
    }

    /// Lattices `offset + n * period` on which the closed forms diverge.
    fn singular_lattices(&self) -> Vec<(f64, f64)> {
        let p = PI / self.alpha;
        let doubled = self.constraint == Constraint::DoubledFrequency;
        match self.family {
            Family::CotangentWell if doubled => vec![(0.0, 0.5 * p)],
            Family::CotangentWell => vec![(0.0, p)],
            Family::TangentWell if doubled => vec![(0.5 * p, p), (0.25 * p, 0.5 * p)],
            Family::TangentWell => vec![(0.5 * p, p)],
            Family::PlaneRight | Family::PlaneLeft => Vec::new(),
        }
    }

    /// Nearest divergence of the closed forms, if the family has any.
    pub fn nearest_singularity(&self, x: f64) -> Option<f64> {
        self.singular_lattices()
            .into_iter()
            .map(|(offset, period)| offset + ((x - offset) / period).round() * period)
            .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
    }

    pub fn singularity_distance(&self, x: f64) -> Option<f64> {
        self.nearest_singularity(x).map(|s| (s - x).abs())
    }

    /// Divergence positions inside `[a, b]`, ascending.
    pub fn singularities_in(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .singular_lattices()
            .into_iter()
            .flat_map(|(offset, period)| {
                let first = ((a - offset) / period).ceil() as i64;
                let last = ((b - offset) / period).floor() as i64;
                (first..=last).map(move |n| offset + n as f64 * period)
            })
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        out
    }

    pub fn check_regular(&self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite position {x}")));
        }
        match self.nearest_singularity(x) {
            Some(s) if (s - x).abs() <= self.exclusion => {
                Err(Error::SingularPoint { x, singularity: s })
            }
            _ => Ok(()),
        }
    }

    /// Open interval between consecutive divergences that contains the
    /// usual box, `None` for the plane families.
    pub fn regular_cell(&self) -> Option<(f64, f64)> {
        let p = PI / self.alpha;
        let doubled = self.constraint == Constraint::DoubledFrequency;
        match self.family {
            Family::CotangentWell if doubled => Some((0.0, 0.5 * p)),
            Family::CotangentWell => Some((0.0, p)),
            Family::TangentWell if doubled => Some((-0.25 * p, 0.25 * p)),
            Family::TangentWell => Some((-0.5 * p, 0.5 * p)),
            Family::PlaneRight | Family::PlaneLeft => None,
        }
    }

    /// `n` uniform samples inside the regular cell, keeping `margin / α`
    /// away from its ends. Plane families sample `[-π/α, π/α]`.
    pub fn regular_samples(&self, n: usize, margin: f64) -> Vec<f64> {
        match self.regular_cell() {
            Some((lo, hi)) => {
                let m = margin / self.alpha;
                linspace(lo + m, hi - m, n)
            }
            None => linspace(-PI / self.alpha, PI / self.alpha, n),
        }
    }

    fn theta(&self, x: f64) -> f64 {
        self.alpha * x
    }

    /// The added function `f(x)`.
    pub fn constraint_function(&self, x: f64) -> Result<Complex64> {
        self.check_regular(x)?;
        Ok(self.f_and_derivative(x).0)
    }

    /// `(f, f')` without the regularity check.
    fn f_and_derivative(&self, x: f64) -> (Complex64, Complex64) {
        let (q, a) = (self.q, self.alpha);
        let (m, th) = match self.constraint {
            Constraint::ShapeInvariant => (1.0, self.theta(x)),
            Constraint::DoubledFrequency => (2.0, 2.0 * self.theta(x)),
        };
        match self.family {
            Family::CotangentWell => {
                let (s, c) = th.sin_cos();
                let csc = 1.0 / s;
                let f = q * csc;
                let df = -m * a * q * csc * (c / s);
                (Complex64::from(f), Complex64::from(df))
            }
            Family::TangentWell => {
                let (s, c) = th.sin_cos();
                let sec = 1.0 / c;
                let f = q * sec;
                let df = m * a * q * sec * (s / c);
                (Complex64::from(f), Complex64::from(df))
            }
            Family::PlaneRight => {
                let f = q * Complex64::from_polar(1.0, -th);
                (f, -I * m * a * f)
            }
            Family::PlaneLeft => {
                let f = q * Complex64::from_polar(1.0, th);
                (f, I * m * a * f)
            }
        }
    }

    /// The superpotential `W(x)`.
    pub fn superpotential(&self, x: f64) -> Result<Complex64> {
        self.check_regular(x)?;
        Ok(self.w_unchecked(x))
    }

    fn w_unchecked(&self, x: f64) -> Complex64 {
        let k = self.k;
        let (f, _) = self.f_and_derivative(x);
        match self.family {
            Family::CotangentWell => {
                let (s, c) = self.theta(x).sin_cos();
                Complex64::from(-k * c / s) + I * f
            }
            Family::TangentWell => {
                let (s, c) = self.theta(x).sin_cos();
                Complex64::from(k * s / c) + I * f
            }
            Family::PlaneRight => -I * k + f,
            Family::PlaneLeft => I * k + f,
        }
    }

    /// `W'(x)` from the analytic derivative.
    pub fn superpotential_derivative(&self, x: f64) -> Result<Complex64> {
        self.check_regular(x)?;
        let (k, a) = (self.k, self.alpha);
        let (_, df) = self.f_and_derivative(x);
        Ok(match self.family {
            Family::CotangentWell => {
                let csc = 1.0 / self.theta(x).sin();
                Complex64::from(k * a * csc * csc) + I * df
            }
            Family::TangentWell => {
                let sec = 1.0 / self.theta(x).cos();
                Complex64::from(k * a * sec * sec) + I * df
            }
            Family::PlaneRight | Family::PlaneLeft => df,
        })
    }

    /// Closed-form partner potential.
    pub fn partner(&self, which: Partner, x: f64) -> Result<Complex64> {
        self.check_regular(x)?;
        if self.constraint != Constraint::ShapeInvariant {
            // No closed form off the constraint; fall back to W² ∓ W'.
            let w = self.w_unchecked(x);
            let dw = self.superpotential_derivative(x)?;
            return Ok(w * w + which.sign() * dw);
        }
        let (k, q, a) = (self.k, self.q, self.alpha);
        let th = self.theta(x);
        Ok(match (self.family, which) {
            (Family::CotangentWell, _) => {
                let (s, c) = th.sin_cos();
                let csc = 1.0 / s;
                let cot = c / s;
                let (coef, im) = match which {
                    Partner::V1 => (k * (k - a) - q * q, q * (a - 2.0 * k)),
                    Partner::V2 => (k * (k + a) - q * q, -q * (a + 2.0 * k)),
                };
                Complex64::new(coef * csc * csc - k * k, im * cot * csc)
            }
            (Family::TangentWell, _) => {
                let (s, c) = th.sin_cos();
                let sec = 1.0 / c;
                let tan = s / c;
                let (coef, im) = match which {
                    Partner::V1 => (k * (k - a) - q * q, q * (2.0 * k - a)),
                    Partner::V2 => (k * (k + a) - q * q, q * (2.0 * k + a)),
                };
                Complex64::new(coef * sec * sec - k * k, im * tan * sec)
            }
            (Family::PlaneRight, _) => {
                let e = Complex64::from_polar(1.0, -th);
                let lin = match which {
                    Partner::V1 => q * (a - 2.0 * k),
                    Partner::V2 => -q * (a + 2.0 * k),
                };
                Complex64::from(-k * k) + q * q * e * e + I * lin * e
            }
            (Family::PlaneLeft, _) => {
                let e = Complex64::from_polar(1.0, th);
                let lin = match which {
                    Partner::V1 => q * (2.0 * k - a),
                    Partner::V2 => q * (2.0 * k + a),
                };
                Complex64::from(-k * k) + q * q * e * e + I * lin * e
            }
        })
    }

    pub fn partner_pair(&self) -> PartnerPair {
        PartnerPair {
            spec: *self,
            v1: PartnerField::new(*self, Partner::V1),
            v2: PartnerField::new(*self, Partner::V2),
        }
    }

    pub fn partner_field(&self, which: Partner) -> PartnerField {
        PartnerField::new(*self, which)
    }
}

fn default_exclusion(period_scale: f64) -> f64 {
    1e-6 * PI / period_scale
}

/// The superpotential itself as a field.
impl ComplexField for SuperpotentialSpec {
    fn eval(&self, x: f64) -> Result<Complex64> {
        self.superpotential(x)
    }

    fn singularity_distance(&self, x: f64) -> Option<f64> {
        SuperpotentialSpec::singularity_distance(self, x)
    }
}

/// One partner potential viewed as a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartnerField {
    pub spec: SuperpotentialSpec,
    pub which: Partner,
}

impl PartnerField {
    pub fn new(spec: SuperpotentialSpec, which: Partner) -> Self {
        Self { spec, which }
    }
}

impl ComplexField for PartnerField {
    fn eval(&self, x: f64) -> Result<Complex64> {
        self.spec.partner(self.which, x)
    }

    fn singularity_distance(&self, x: f64) -> Option<f64> {
        self.spec.singularity_distance(x)
    }
}

/// Both partners generated by one superpotential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartnerPair {
    pub spec: SuperpotentialSpec,
    pub v1: PartnerField,
    pub v2: PartnerField,
}

impl PartnerPair {
    pub fn get(&self, which: Partner) -> &PartnerField {
        match which {
            Partner::V1 => &self.v1,
            Partner::V2 => &self.v2,
        }
    }

    pub fn singularities(&self, a: f64, b: f64) -> Vec<f64> {
        self.spec.singularities_in(a, b)
    }
}

/// `W² ∓ W'` with `W'` from a central difference of the closed-form `W`.
pub fn partner_from_superpotential(
    spec: &SuperpotentialSpec,
    which: Partner,
    x: f64,
    h: f64,
) -> Result<Complex64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidInput(format!(
            "step must be positive, got {h}"
        )));
    }
    spec.check_regular(x)?;
    if let Some(distance) = spec.singularity_distance(x) {
        if h > 0.1 * distance {
            return Err(Error::StepTooLarge { h, distance });
        }
    }
    let w = spec.superpotential(x)?;
    let dw = (spec.superpotential(x + h)? - spec.superpotential(x - h)?) / (2.0 * h);
    Ok(w * w + which.sign() * dw)
}

/// `R1(x) = V2(k, x) - V1(k + α, x)`.
pub fn remainder(spec: &SuperpotentialSpec, x: f64) -> Result<Complex64> {
    let shifted = spec.with_k(spec.k + spec.alpha)?;
    Ok(spec.partner(Partner::V2, x)? - shifted.partner(Partner::V1, x)?)
}

/// Summary of the remainder over a set of sample points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeInvariance {
    pub mean: Complex64,
    pub max_abs_deviation: f64,
}

impl ShapeInvariance {
    pub const RELATIVE_TOL: f64 = 1e-10;
    pub const ABSOLUTE_TOL: f64 = 1e-12;

    /// Deviation within `1e-10 |mean|`, or `1e-12` when the mean vanishes.
    pub fn holds(&self) -> bool {
        self.max_abs_deviation <= self.tolerance()
    }

    pub fn tolerance(&self) -> f64 {
        let scale = self.mean.norm();
        if scale > Self::ABSOLUTE_TOL / Self::RELATIVE_TOL {
            Self::RELATIVE_TOL * scale
        } else {
            Self::ABSOLUTE_TOL
        }
    }
}

/// Evaluates the remainder at every sample and measures its spread.
pub fn check_shape_invariance(
    spec: &SuperpotentialSpec,
    sample_points: &[f64],
) -> Result<ShapeInvariance> {
    if sample_points.len() < 2 {
        return Err(Error::InvalidInput(
            "shape invariance needs at least two sample points".into(),
        ));
    }
    let values = sample_points
        .iter()
        .map(|&x| remainder(spec, x))
        .collect::<Result<Vec<_>>>()?;
    let mean = values.iter().sum::<Complex64>() / values.len() as f64;
    let max_abs_deviation = values.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
    Ok(ShapeInvariance {
        mean,
        max_abs_deviation,
    })
}
