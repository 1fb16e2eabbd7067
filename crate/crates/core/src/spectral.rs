//! Finite-difference spectra of `H = -d²/dx² + V(x)` with Dirichlet ends,
//! Richardson extrapolation over grids, the analytic square-well ladder,
//! and the isospectrality / reality checks.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::susy::{Partner, SuperpotentialSpec};
use crate::tridiag;

pub const MIN_INTERIOR_POINTS: usize = 16;
/// Grid used for acceptance-grade spectra.
pub const DEFAULT_INTERIOR_POINTS: usize = 4000;
/// Grids combined by Richardson extrapolation.
pub const DEFAULT_RICHARDSON_GRIDS: [usize; 3] = [1000, 2000, 4000];
/// Accepted `‖Hv - λv‖ / (‖v‖ max(1, |λ|))`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Uniform grid with the Dirichlet endpoints excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_interior: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_interior: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidInput(format!(
                "grid needs x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_interior < MIN_INTERIOR_POINTS {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {MIN_INTERIOR_POINTS} interior points, got {n_interior}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_interior,
        })
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_interior + 1) as f64
    }

    /// `x_min + j h` for `j = 1..=n_interior`.
    pub fn node(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (1..=self.n_interior).map(|j| self.node(j)).collect()
    }
}

/// Three-point discretization of `-d²/dx² + V`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedHamiltonian {
    pub grid: Grid1D,
    pub diagonal: Vec<Complex64>,
    pub off_diagonal: f64,
}

impl DiscretizedHamiltonian {
    pub fn is_real(&self) -> bool {
        self.diagonal.iter().all(|z| z.im == 0.0)
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    fn off(&self) -> Vec<Complex64> {
        vec![Complex64::new(self.off_diagonal, 0.0); self.dim().saturating_sub(1)]
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        tridiag::apply(&self.diagonal, &self.off(), v)
    }
}

/// Builds the tridiagonal operator; the potential is sampled at interior
/// nodes only.
pub fn discretize<V: ComplexField + ?Sized>(
    potential: &V,
    grid: Grid1D,
) -> Result<DiscretizedHamiltonian> {
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let diagonal = (1..=grid.n_interior)
        .map(|j| potential.eval(grid.node(j)).map(|v| 2.0 * inv_h2 + v))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscretizedHamiltonian {
        grid,
        diagonal,
        off_diagonal: -inv_h2,
    })
}

/// Eigenvalues sorted by real part, with convergence metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    pub max_imag: f64,
    pub grid_sizes_used: Vec<usize>,
    pub richardson_estimates: Vec<f64>,
    /// Relative residual of each eigenpair on the finest grid.
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl SpectrumReport {
    pub fn new(mut eigenvalues: Vec<Complex64>, grid_sizes_used: Vec<usize>) -> Self {
        sort_eigenvalues(&mut eigenvalues);
        let max_imag = max_imag(&eigenvalues);
        Self {
            eigenvalues,
            max_imag,
            grid_sizes_used,
            richardson_estimates: Vec::new(),
            residuals: Vec::new(),
        }
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    /// Same report with the extrapolated values promoted to eigenvalues.
    pub fn extrapolated(&self) -> Result<Self> {
        if self.richardson_estimates.is_empty() {
            return Err(Error::InvalidInput(
                "report carries no Richardson estimates".into(),
            ));
        }
        let mut out = Self::new(
            self.richardson_estimates
                .iter()
                .map(|&re| Complex64::new(re, 0.0))
                .collect(),
            self.grid_sizes_used.clone(),
        );
        out.richardson_estimates = self.richardson_estimates.clone();
        Ok(out)
    }

    pub fn classification(&self) -> PtPhase {
        reality_classification(self, None)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report is always serializable")
    }
}

fn max_imag(values: &[Complex64]) -> f64 {
    values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Ascending real part, ties by ascending imaginary part.
pub fn sort_eigenvalues(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Which eigen-kernel to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenPath {
    /// Symmetric bisection for real diagonals, complex QL otherwise.
    Auto,
    Symmetric,
    Complex,
}

/// The `count` eigenvalues of smallest real part.
pub fn eigenvalues(h: &DiscretizedHamiltonian, count: usize) -> Result<SpectrumReport> {
    eigenvalues_with(h, count, EigenPath::Auto)
}

pub fn eigenvalues_with(
    h: &DiscretizedHamiltonian,
    count: usize,
    path: EigenPath,
) -> Result<SpectrumReport> {
    let n = h.dim();
    if count == 0 || count > n {
        return Err(Error::InvalidInput(format!(
            "requested {count} eigenvalues of a {n}x{n} operator"
        )));
    }
    let off = h.off();
    let symmetric = match path {
        EigenPath::Auto => h.is_real(),
        EigenPath::Symmetric => {
            if !h.is_real() {
                return Err(Error::InvalidInput(
                    "symmetric path needs a real potential".into(),
                ));
            }
            true
        }
        EigenPath::Complex => false,
    };

    // (estimate, how far refinement may move it)
    let estimates: Vec<(Complex64, f64)> = if symmetric {
        let d: Vec<f64> = h.diagonal.iter().map(|z| z.re).collect();
        let e = vec![h.off_diagonal; n - 1];
        (0..count)
            .map(|j| {
                let z = Complex64::new(tridiag::bisect_eigenvalue(&d, &e, j), 0.0);
                (z, 1e-6 * z.norm().max(1.0))
            })
            .collect()
    } else {
        let mut all = tridiag::complex_symmetric_eigenvalues(&h.diagonal, &off)?;
        sort_eigenvalues(&mut all);
        (0..count)
            .map(|j| {
                let gap = all
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, z)| (z - all[j]).norm())
                    .fold(f64::INFINITY, f64::min);
                (all[j], (0.25 * gap).min(1e-2 * all[j].norm().max(1.0)))
            })
            .collect()
    };

    let mut pairs = Vec::with_capacity(count);
    for (j, (est, radius)) in estimates.into_iter().enumerate() {
        let pair = tridiag::refine_eigenpair_within(&h.diagonal, &off, est, radius);
        // Bisection is already exact to the floating-point grid; keep it.
        let value = if symmetric { est } else { pair.value };
        let relative = pair.residual / value.norm().max(1.0);
        if relative.is_nan() || relative > RESIDUAL_TOL {
            return Err(Error::ConvergenceFailure(format!(
                "eigenpair {j} (λ = {value}) has relative residual {relative:e} > {RESIDUAL_TOL:e}"
            )));
        }
        pairs.push((value, relative));
    }
    pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let (values, residuals): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let mut report = SpectrumReport::new(values, vec![n]);
    report.residuals = residuals;
    Ok(report)
}

/// Extrapolates `values(h)` to `h = 0` assuming an even power series in `h`
/// (Neville's scheme in `h²`).
pub fn richardson_extrapolate(spacings: &[f64], values: &[f64]) -> Result<f64> {
    if spacings.len() != values.len() || spacings.is_empty() {
        return Err(Error::InvalidInput(
            "Richardson needs matching, non-empty spacing and value lists".into(),
        ));
    }
    let t: Vec<f64> = spacings.iter().map(|h| h * h).collect();
    let mut p = values.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (t[i] * p[i + 1] - t[i + m] * p[i]) / (t[i] - t[i + m]);
        }
    }
    Ok(p[0])
}

/// Spectrum on every grid in `sizes`; the eigenvalues come from the finest
/// grid and each level is extrapolated in the spacing.
pub fn converged_spectrum<V: ComplexField + Sync + ?Sized>(
    potential: &V,
    x_min: f64,
    x_max: f64,
    sizes: &[usize],
    count: usize,
) -> Result<SpectrumReport> {
    if sizes.is_empty() {
        return Err(Error::InvalidInput("no grid sizes given".into()));
    }
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let runs = sorted
        .par_iter()
        .map(|&n| {
            let grid = Grid1D::new(x_min, x_max, n)?;
            let h = discretize(potential, grid)?;
            Ok((grid.spacing(), eigenvalues(&h, count)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (_, finest) = runs.last().expect("at least one grid");
    let mut report = finest.clone();
    report.grid_sizes_used = sorted.clone();
    if runs.len() > 1 {
        let spacings: Vec<f64> = runs.iter().map(|(h, _)| *h).collect();
        report.richardson_estimates = (0..count)
            .map(|level| {
                let vals: Vec<f64> = runs.iter().map(|(_, r)| r.eigenvalues[level].re).collect();
                richardson_extrapolate(&spacings, &vals)
            })
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(report)
}

/// `E_n = k_n² - 1 = n(n + 2)` for the unit-length-π box.
pub fn well_spectrum_analytic(n: u32) -> f64 {
    let n = n as f64;
    n * (n + 2.0)
}

/// Sum of the remainders `α(α + 2k_j)` up the shape-invariance ladder
/// `k_j = k_base + (j - 1) α`, `α = k_base`, for `j = 1..=n`.
pub fn remainder_spectrum(n: u32, k_base: f64) -> Result<f64> {
    if !(k_base.is_finite() && k_base > 0.0) {
        return Err(Error::InvalidInput(format!(
            "k_base must be positive, got {k_base}"
        )));
    }
    let alpha = k_base;
    Ok((1..=n)
        .map(|j| {
            let kj = k_base + (j - 1) as f64 * alpha;
            alpha * (alpha + 2.0 * kj)
        })
        .sum())
}

/// Result of pairing two spectra level by level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsospectralMatch {
    pub matched: usize,
    pub max_error: f64,
    pub passed: bool,
}

/// Pairs `spec2[j]` with `spec1[j + shift]`. Unbroken SUSY is `shift = 1`.
pub fn isospectral_check(
    spec1: &SpectrumReport,
    spec2: &SpectrumReport,
    shift: usize,
    tol: f64,
) -> Result<IsospectralMatch> {
    let available = spec1.eigenvalues.len().saturating_sub(shift);
    let matched = available.min(spec2.eigenvalues.len());
    if matched == 0 {
        return Err(Error::InsufficientEigenvalues {
            needed: shift + 1,
            available: spec1.eigenvalues.len(),
        });
    }
    let max_error = (0..matched)
        .map(|j| (spec2.eigenvalues[j] - spec1.eigenvalues[j + shift]).norm())
        .fold(0.0, f64::max);
    Ok(IsospectralMatch {
        matched,
        max_error,
        passed: max_error <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PtPhase {
    UnbrokenPT,
    BrokenPT,
}

/// `UnbrokenPT` when every `|Im λ|` is within `tol_imag`, which defaults to
/// `1e-6 max(1, max |Re λ|)`.
pub fn reality_classification(report: &SpectrumReport, tol_imag: Option<f64>) -> PtPhase {
    let scale = report
        .eigenvalues
        .iter()
        .map(|z| z.re.abs())
        .fold(1.0, f64::max);
    let tol = tol_imag.unwrap_or(1e-6 * scale);
    if report.max_imag <= tol {
        PtPhase::UnbrokenPT
    } else {
        PtPhase::BrokenPT
    }
}

/// One row of the endpoint-truncation study for singular complex partners.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationRow {
    pub epsilon: f64,
    pub n_interior: usize,
    pub eigenvalues: Vec<Complex64>,
    pub max_imag: Option<f64>,
    pub phase: Option<PtPhase>,
    pub error: Option<String>,
}

/// Spectra of one partner on the regular cell shrunk by `ε` at both ends,
/// for every `(ε, n)` combination. Failures are recorded per row.
pub fn truncation_study(
    spec: &SuperpotentialSpec,
    which: Partner,
    epsilons: &[f64],
    sizes: &[usize],
    count: usize,
) -> Result<Vec<TruncationRow>> {
    let (lo, hi) = spec
        .regular_cell()
        .ok_or_else(|| Error::InvalidInput("truncation study needs a well family".into()))?;
    let field = spec.partner_field(which);
    let jobs: Vec<(f64, usize)> = epsilons
        .iter()
        .flat_map(|&eps| sizes.iter().map(move |&n| (eps, n)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(epsilon, n)| {
            let run = Grid1D::new(lo + epsilon, hi - epsilon, n)
                .and_then(|g| discretize(&field, g))
                .and_then(|h| eigenvalues(&h, count.min(n)));
            match run {
                Ok(r) => TruncationRow {
                    epsilon,
                    n_interior: n,
                    max_imag: Some(r.max_imag),
                    phase: Some(r.classification()),
                    eigenvalues: r.eigenvalues,
                    error: None,
                },
                Err(e) => TruncationRow {
                    epsilon,
                    n_interior: n,
                    eigenvalues: Vec::new(),
                    max_imag: None,
                    phase: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}
