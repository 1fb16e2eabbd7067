//! Transfer-matrix scattering through piecewise potentials on the line.
//!
//! Inside each segment the solution is propagated as the pair `(ψ, ψ')`;
//! outside the structure it is written as `A e^{ik₀x} + B e^{-ik₀x}` with
//! `k₀² = E - V_∞`. The transfer matrix maps `(A, B)` on the left to
//! `(A, B)` on the right.

use std::fmt;
use std::ops::Mul;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::output;
use crate::states::WaveFunctionSpec;
use crate::susy::{Family, Partner, SuperpotentialSpec};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Largest `|Im K| w` a constant segment may carry.
pub const MAX_EXPONENT: f64 = 700.0;
/// Wronskian magnitude below which a local basis counts as degenerate.
pub const MIN_WRONSKIAN: f64 = 1e-12;
/// Relative `|E - V₀| / |V₀|` below which a constant segment switches to
/// its linear (zero-momentum) solutions.
pub const RESONANCE_TOL: f64 = 1e-9;
pub const DEFAULT_SLICES: usize = 2000;
pub const MIN_SLICES: usize = 1000;
/// Accepted change of `T` under slice doubling.
pub const SLICE_TOL: f64 = 1e-6;

pub const CSV_HEADER: [&str; 8] = [
    "energy",
    "r_re",
    "r_im",
    "t_re",
    "t_im",
    "R",
    "T",
    "flux_defect",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix(pub [[Complex64; 2]; 2]);

impl TransferMatrix {
    pub fn identity() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let m = &self.0;
        Some(Self([
            [m[1][1] / d, -m[0][1] / d],
            [-m[1][0] / d, m[0][0] / d],
        ]))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }
}

impl Mul for TransferMatrix {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self(out)
    }
}

/// Potential on one interval between breakpoints.
#[derive(Clone)]
pub enum Segment {
    Constant(Complex64),
    /// A smooth field approximated by `slices` constant slices sampled at
    /// their midpoints.
    Sliced {
        field: Arc<dyn ComplexField + Send + Sync>,
        slices: usize,
    },
    /// The potential `V1 + energy_offset` of the basis states, propagated
    /// with the closed forms themselves. Valid only at `E = energy_offset`
    /// and only when both states belong to the same `V1`.
    ClosedForm {
        basis: [WaveFunctionSpec; 2],
        energy_offset: f64,
    },
}

impl fmt::Debug for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            Segment::Sliced { slices, .. } => f
                .debug_struct("Sliced")
                .field("slices", slices)
                .finish_non_exhaustive(),
            Segment::ClosedForm {
                basis,
                energy_offset,
            } => f
                .debug_struct("ClosedForm")
                .field("basis", basis)
                .field("energy_offset", energy_offset)
                .finish(),
        }
    }
}

impl Segment {
    pub fn real(v: f64) -> Self {
        Segment::Constant(Complex64::new(v, 0.0))
    }

    pub fn sliced<F: ComplexField + Send + Sync + 'static>(field: F, slices: usize) -> Self {
        Segment::Sliced {
            field: Arc::new(field),
            slices,
        }
    }

    /// Right- and left-moving plane states of the free (`q = 0`) partner
    /// `V1 = -k²`, shifted so that they solve the segment at `energy`.
    pub fn plane_closed_form(k: f64, energy: f64) -> Result<Self> {
        Ok(Segment::ClosedForm {
            basis: [
                WaveFunctionSpec::new(Family::PlaneRight, k, 0.0)?,
                WaveFunctionSpec::new(Family::PlaneLeft, k, 0.0)?,
            ],
            energy_offset: energy,
        })
    }

    /// Propagator of `(ψ, ψ')` from `a` to `b`.
    pub fn propagator(&self, a: f64, b: f64, energy: f64) -> Result<TransferMatrix> {
        match self {
            Segment::Constant(v) => constant_propagator(*v, b - a, energy),
            Segment::Sliced { field, slices } => {
                if *slices == 0 {
                    return Err(Error::InvalidInput(
                        "sliced segment needs slices ≥ 1".into(),
                    ));
                }
                let w = (b - a) / *slices as f64;
                let mut p = TransferMatrix::identity();
                for j in 0..*slices {
                    let mid = a + (j as f64 + 0.5) * w;
                    p = constant_propagator(field.eval(mid)?, w, energy)? * p;
                }
                Ok(p)
            }
            Segment::ClosedForm {
                basis,
                energy_offset,
            } => closed_form_propagator(basis, *energy_offset, a, b, energy),
        }
    }

    /// Whether the potential is real on `[a, b]`; sliced fields are
    /// checked at their sample points.
    pub fn is_real_on(&self, a: f64, b: f64) -> Result<bool> {
        match self {
            Segment::Constant(v) => Ok(v.im == 0.0),
            Segment::Sliced { field, slices } => {
                let w = (b - a) / (*slices).max(1) as f64;
                for j in 0..*slices {
                    if field.eval(a + (j as f64 + 0.5) * w)?.im != 0.0 {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Segment::ClosedForm { basis, .. } => Ok(basis.iter().all(|s| s.q == 0.0)),
        }
    }
}

fn constant_propagator(v: Complex64, w: f64, energy: f64) -> Result<TransferMatrix> {
    let kk = Complex64::new(energy, 0.0) - v;
    if kk.norm() < RESONANCE_TOL * v.norm() || kk.norm() == 0.0 {
        // ψ'' ≈ -K²ψ with K² negligible: linear solutions plus the first
        // correction.
        let c = ONE - kk * w * w / 2.0;
        let s = w * (ONE - kk * w * w / 6.0);
        return Ok(TransferMatrix([[c, s], [-kk * s, c]]));
    }
    let k = kk.sqrt();
    let exponent = (k.im * w).abs();
    if exponent > MAX_EXPONENT {
        return Err(Error::EvanescentOverflow { exponent });
    }
    let (s, c) = ((k * w).sin(), (k * w).cos());
    Ok(TransferMatrix([[c, s / k], [-k * s, c]]))
}

fn basis_matrix(basis: &[WaveFunctionSpec; 2], x: f64) -> Result<TransferMatrix> {
    Ok(TransferMatrix([
        [basis[0].eval(x)?, basis[1].eval(x)?],
        [basis[0].derivative(x)?, basis[1].derivative(x)?],
    ]))
}

fn closed_form_propagator(
    basis: &[WaveFunctionSpec; 2],
    energy_offset: f64,
    a: f64,
    b: f64,
    energy: f64,
) -> Result<TransferMatrix> {
    if (energy - energy_offset).abs() > 1e-12 * energy.abs().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "closed-form segment solves E = {energy_offset} only, asked for E = {energy}"
        )));
    }
    let (s0, s1) = (basis[0].superpotential(), basis[1].superpotential());
    for x in [a, 0.5 * (a + b), b] {
        let (v0, v1) = (s0.partner(Partner::V1, x)?, s1.partner(Partner::V1, x)?);
        if (v0 - v1).norm() > 1e-12 * v0.norm().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "closed-form basis states solve different potentials at x = {x}"
            )));
        }
    }
    let lo = basis_matrix(basis, a)?;
    let wronskian = lo.det().norm();
    if wronskian < MIN_WRONSKIAN {
        return Err(Error::DegenerateMatch { x: a, wronskian });
    }
    let hi = basis_matrix(basis, b)?;
    Ok(hi * lo.inverse().expect("nonzero Wronskian"))
}

/// Segments between ascending breakpoints, with a real constant potential
/// outside `[first, last]`.
#[derive(Debug, Clone)]
pub struct PiecewisePotential {
    breakpoints: Vec<f64>,
    segments: Vec<Segment>,
    asymptotic: f64,
}

impl PiecewisePotential {
    /// Breakpoints must be finite and non-decreasing (zero-width segments
    /// are allowed), one more than the segments.
    pub fn new(breakpoints: Vec<f64>, segments: Vec<Segment>, asymptotic: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidInput("need at least one segment".into()));
        }
        if breakpoints.len() != segments.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} segments need {} breakpoints, got {}",
                segments.len(),
                segments.len() + 1,
                breakpoints.len()
            )));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) || !asymptotic.is_finite() {
            return Err(Error::InvalidInput(
                "breakpoints and asymptote must be finite".into(),
            ));
        }
        if breakpoints.windows(2).any(|p| p[1] < p[0]) {
            return Err(Error::InvalidInput("breakpoints must be ascending".into()));
        }
        Ok(Self {
            breakpoints,
            segments,
            asymptotic,
        })
    }

    /// Single constant barrier (or well) of height `v0` on `[a, b]`, zero
    /// outside.
    pub fn constant_barrier(v0: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![Segment::real(v0)], 0.0)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn asymptotic(&self) -> f64 {
        self.asymptotic
    }

    /// The structure followed by `other`, which must start where this one
    /// ends and share its asymptote.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if other.breakpoints[0] != *self.breakpoints.last().unwrap()
            || other.asymptotic != self.asymptotic
        {
            return Err(Error::InvalidInput(
                "structures must be adjacent and share the asymptote".into(),
            ));
        }
        let mut breakpoints = self.breakpoints.clone();
        breakpoints.extend_from_slice(&other.breakpoints[1..]);
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        Self::new(breakpoints, segments, self.asymptotic)
    }

    pub fn is_real(&self) -> Result<bool> {
        for (j, seg) in self.segments.iter().enumerate() {
            if !seg.is_real_on(self.breakpoints[j], self.breakpoints[j + 1])? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `[[e^{ik₀x}, e^{-ik₀x}], [ik₀ e^{ik₀x}, -ik₀ e^{-ik₀x}]]`.
fn asymptotic_basis(k0: f64, x: f64) -> TransferMatrix {
    let p = Complex64::from_polar(1.0, k0 * x);
    let m = p.conj();
    TransferMatrix([[p, m], [I * k0 * p, -I * k0 * m]])
}

pub fn transfer_matrix(potential: &PiecewisePotential, energy: f64) -> Result<TransferMatrix> {
    if !(energy.is_finite() && energy > potential.asymptotic) {
        return Err(Error::InvalidInput(format!(
            "energy {energy} must exceed the asymptotic potential {}",
            potential.asymptotic
        )));
    }
    let k0 = (energy - potential.asymptotic).sqrt();
    let bp = &potential.breakpoints;
    let (first, last) = (bp[0], bp[bp.len() - 1]);
    let wronskian = 2.0 * k0;
    if wronskian < MIN_WRONSKIAN {
        return Err(Error::DegenerateMatch {
            x: first,
            wronskian,
        });
    }
    let mut p = TransferMatrix::identity();
    for (j, seg) in potential.segments.iter().enumerate() {
        p = seg.propagator(bp[j], bp[j + 1], energy)? * p;
    }
    let out = asymptotic_basis(k0, last)
        .inverse()
        .expect("plane waves are independent");
    Ok(out * p * asymptotic_basis(k0, first))
}

/// Amplitudes for a unit wave incident from the left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringResult {
    pub energy: f64,
    pub r: Complex64,
    pub t: Complex64,
    /// `|r|² + |t|² - 1`.
    pub flux_defect: f64,
}

impl ScatteringResult {
    pub fn reflectance(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr()
    }

    fn csv_row(&self) -> Vec<f64> {
        vec![
            self.energy,
            self.r.re,
            self.r.im,
            self.t.re,
            self.t.im,
            self.reflectance(),
            self.transmittance(),
            self.flux_defect,
        ]
    }
}

pub fn transmission_reflection(
    potential: &PiecewisePotential,
    energy: f64,
) -> Result<ScatteringResult> {
    let m = transfer_matrix(potential, energy)?;
    let m22 = m.0[1][1];
    if m22.norm() == 0.0 {
        return Err(Error::DegenerateMatch {
            x: *potential.breakpoints.last().unwrap(),
            wronskian: 0.0,
        });
    }
    let r = -m.0[1][0] / m22;
    let t = m.det() / m22;
    Ok(ScatteringResult {
        energy,
        r,
        t,
        flux_defect: r.norm_sqr() + t.norm_sqr() - 1.0,
    })
}

/// Slice schedule for [`plane_partner_sweep_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSchedule {
    pub initial: usize,
    pub max: usize,
    pub tolerance: f64,
}

impl Default for SliceSchedule {
    fn default() -> Self {
        Self {
            initial: DEFAULT_SLICES,
            max: DEFAULT_SLICES << 6,
            tolerance: SLICE_TOL,
        }
    }
}

/// The partner of a plane family on `window`, zero outside, cut into
/// `slices` constant slices.
pub fn windowed_partner(
    spec: &SuperpotentialSpec,
    which: Partner,
    window: (f64, f64),
    slices: usize,
) -> Result<PiecewisePotential> {
    if !spec.family().is_plane() {
        return Err(Error::InvalidInput(format!(
            "windowed partners need a plane family, got {}",
            spec.family()
        )));
    }
    let (a, b) = window;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidInput(format!(
            "window [{a}, {b}] must be finite and ordered"
        )));
    }
    PiecewisePotential::new(
        vec![a, b],
        vec![Segment::sliced(spec.partner_field(which), slices)],
        0.0,
    )
}

/// [`plane_partner_sweep_with`] on the default schedule.
pub fn plane_partner_sweep(
    spec: &SuperpotentialSpec,
    which: Partner,
    window: (f64, f64),
    energies: &[f64],
) -> Result<Vec<ScatteringResult>> {
    plane_partner_sweep_with(spec, which, window, energies, SliceSchedule::default())
}

/// Scattering off a windowed plane-family partner at each energy, doubling
/// the slice count until `T` moves by at most `schedule.tolerance`.
/// Results come back in input order.
pub fn plane_partner_sweep_with(
    spec: &SuperpotentialSpec,
    which: Partner,
    window: (f64, f64),
    energies: &[f64],
    schedule: SliceSchedule,
) -> Result<Vec<ScatteringResult>> {
    if schedule.initial < MIN_SLICES {
        return Err(Error::InvalidInput(format!(
            "at least {MIN_SLICES} slices are required, got {}",
            schedule.initial
        )));
    }
    if let Some(e) = energies.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "energies must be positive, got {e}"
        )));
    }
    windowed_partner(spec, which, window, schedule.initial)?;
    energies
        .par_iter()
        .map(|&energy| {
            let solve = |n: usize| {
                transmission_reflection(&windowed_partner(spec, which, window, n)?, energy)
            };
            let mut n = schedule.initial;
            let mut coarse = solve(n)?;
            loop {
                n *= 2;
                let fine = solve(n)?;
                let change = (fine.transmittance() - coarse.transmittance()).abs();
                if change <= schedule.tolerance {
                    return Ok(fine);
                }
                if n >= schedule.max {
                    return Err(Error::SliceTooCoarse { slices: n, change });
                }
                coarse = fine;
            }
        })
        .collect()
}

/// CSV with columns `energy, r_re, r_im, t_re, t_im, R, T, flux_defect`.
pub fn sweep_csv(results: &[ScatteringResult]) -> String {
    let rows: Vec<Vec<f64>> = results.iter().map(ScatteringResult::csv_row).collect();
    output::csv_table(&CSV_HEADER, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Textbook transmission through a rectangular barrier or well of
    /// height `v0` and width `a`, in units `ħ = 2m = 1`.
    fn textbook_t(v0: f64, a: f64, e: f64) -> f64 {
        if e < v0 {
            let kappa = (v0 - e).sqrt();
            1.0 / (1.0 + v0 * v0 * (kappa * a).sinh().powi(2) / (4.0 * e * (v0 - e)))
        } else {
            let kp = (e - v0).sqrt();
            1.0 / (1.0 + v0 * v0 * (kp * a).sin().powi(2) / (4.0 * e * (e - v0)))
        }
    }

    #[test]
    fn empty_barrier_is_identity() {
        let pot = PiecewisePotential::constant_barrier(0.0, -1.0, 2.0).unwrap();
        let m = transfer_matrix(&pot, 1.0).unwrap();
        assert!(m.max_abs_diff(&TransferMatrix::identity()) < 1e-14);
        let s = transmission_reflection(&pot, 1.0).unwrap();
        assert!(s.r.norm() < 1e-14);
        assert!((s.t - ONE).norm() < 1e-14);
        assert!(s.flux_defect.abs() < 1e-14);
    }

    #[test]
    fn zero_width_segment_is_identity() {
        let pot = PiecewisePotential::constant_barrier(7.0, 0.5, 0.5).unwrap();
        let m = transfer_matrix(&pot, 2.0).unwrap();
        assert!(m.max_abs_diff(&TransferMatrix::identity()) < 1e-15);
    }

    #[test]
    fn tunnelling_matches_textbook() {
        let pot = PiecewisePotential::constant_barrier(4.0, 0.0, 1.0).unwrap();
        let s = transmission_reflection(&pot, 1.0).unwrap();
        let exact = textbook_t(4.0, 1.0, 1.0);
        assert!((s.transmittance() - exact).abs() < 1e-8 * exact);
        assert!(s.flux_defect.abs() < 1e-10);
    }

    #[test]
    fn well_matches_textbook() {
        let pot = PiecewisePotential::constant_barrier(-5.0, 0.0, 1.0).unwrap();
        let s = transmission_reflection(&pot, 2.0).unwrap();
        let exact = textbook_t(-5.0, 1.0, 2.0);
        assert!((s.transmittance() - exact).abs() < 1e-8 * exact);
        assert!(s.flux_defect.abs() < 1e-10);
    }

    #[test]
    fn barrier_top_uses_linear_branch() {
        // E = V₀ limit of the textbook formula: T = 1 / (1 + V₀ a² / 4)
        let (v0, a) = (4.0, 1.0);
        let pot = PiecewisePotential::constant_barrier(v0, 0.0, a).unwrap();
        let s = transmission_reflection(&pot, v0).unwrap();
        let limit = 1.0 / (1.0 + v0 * a * a / 4.0);
        assert!((s.transmittance() - limit).abs() < 1e-12);
        let near = transmission_reflection(&pot, v0 * (1.0 + 1e-6)).unwrap();
        assert!((near.transmittance() - limit).abs() < 1e-5);
    }

    #[test]
    fn composition_is_matrix_product() {
        let a = PiecewisePotential::new(
            vec![-1.0, 0.0, 0.3],
            vec![
                Segment::real(3.0),
                Segment::Constant(Complex64::new(-2.0, 0.5)),
            ],
            0.0,
        )
        .unwrap();
        let b = PiecewisePotential::constant_barrier(1.5, 0.3, 1.1).unwrap();
        let whole = transfer_matrix(&a.then(&b).unwrap(), 2.5).unwrap();
        let prod = transfer_matrix(&b, 2.5).unwrap() * transfer_matrix(&a, 2.5).unwrap();
        assert!(whole.max_abs_diff(&prod) < 1e-10);
    }

    #[test]
    fn deep_barrier_overflows() {
        let pot = PiecewisePotential::constant_barrier(1e6, 0.0, 1.0).unwrap();
        assert!(matches!(
            transfer_matrix(&pot, 1.0),
            Err(Error::EvanescentOverflow { .. })
        ));
    }

    #[test]
    fn invalid_structures_rejected() {
        assert!(PiecewisePotential::new(vec![0.0], vec![], 0.0).is_err());
        assert!(PiecewisePotential::new(vec![1.0, 0.0], vec![Segment::real(1.0)], 0.0).is_err());
        assert!(
            PiecewisePotential::new(vec![0.0, 1.0, 2.0], vec![Segment::real(1.0)], 0.0).is_err()
        );
        let pot = PiecewisePotential::constant_barrier(1.0, 0.0, 1.0).unwrap();
        assert!(transfer_matrix(&pot, 0.0).is_err());
        assert!(transfer_matrix(&pot, -1.0).is_err());
    }

    #[test]
    fn free_closed_form_matches_constant() {
        // ψ^R, ψ^L at q = 0 solve V = -k² + E at energy E
        let (k, e) = (2.0, 1.5);
        let closed = PiecewisePotential::new(
            vec![0.0, 1.0],
            vec![Segment::plane_closed_form(k, e).unwrap()],
            0.0,
        )
        .unwrap();
        let constant = PiecewisePotential::constant_barrier(-k * k + e, 0.0, 1.0).unwrap();
        let a = transfer_matrix(&closed, e).unwrap();
        let b = transfer_matrix(&constant, e).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
        assert!(transfer_matrix(&closed, e + 0.1).is_err());
    }

    #[test]
    fn mixed_closed_form_rejected() {
        let seg = Segment::ClosedForm {
            basis: [
                WaveFunctionSpec::new(Family::PlaneRight, 1.0, 1.0).unwrap(),
                WaveFunctionSpec::new(Family::PlaneLeft, 1.0, 1.0).unwrap(),
            ],
            energy_offset: 1.0,
        };
        let pot = PiecewisePotential::new(vec![0.0, 1.0], vec![seg], 0.0).unwrap();
        assert!(matches!(
            transfer_matrix(&pot, 1.0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn free_plane_partner_is_constant_well() {
        let k = 1.5;
        let spec = SuperpotentialSpec::new(Family::PlaneRight, k, 0.0).unwrap();
        let e = k * k;
        let out = plane_partner_sweep(&spec, Partner::V1, (0.0, 1.0), &[e]).unwrap();
        let exact = textbook_t(-k * k, 1.0, e);
        assert!((out[0].transmittance() - exact).abs() < 1e-10);
    }

    #[test]
    fn sweep_keeps_input_order() {
        let spec = SuperpotentialSpec::new(Family::PlaneRight, 1.0, 0.5).unwrap();
        let energies = [3.0, 0.5, 1.0];
        let out = plane_partner_sweep(&spec, Partner::V2, (0.0, 1.0), &energies).unwrap();
        let got: Vec<f64> = out.iter().map(|s| s.energy).collect();
        assert_eq!(got, energies);
        assert!(plane_partner_sweep(&spec, Partner::V1, (0.0, 1.0), &[0.0]).is_err());
        let well = SuperpotentialSpec::new(Family::CotangentWell, 1.0, 0.5).unwrap();
        assert!(plane_partner_sweep(&well, Partner::V1, (0.1, 1.0), &[1.0]).is_err());
    }

    #[test]
    fn csv_shape() {
        let pot = PiecewisePotential::constant_barrier(4.0, 0.0, 1.0).unwrap();
        let s = transmission_reflection(&pot, 1.0).unwrap();
        let text = sweep_csv(&[s, s]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "energy,r_re,r_im,t_re,t_im,R,T,flux_defect");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 8);
        assert!(!text.contains('\r'));
    }
}
