//! Eigenvalue kernels for symmetric tridiagonal matrices.
//!
//! Real matrices go through Sturm-sequence bisection, which pins every
//! eigenvalue to the resolution of the floating-point grid around it.
//! Complex symmetric (non-Hermitian) matrices go through implicit QL with
//! complex orthogonal rotations, followed by inverse iteration to refine
//! the eigenvalues that are handed back.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 60;

/// Number of eigenvalues of the real symmetric tridiagonal matrix strictly
/// below `sigma`.
pub fn sturm_count(diag: &[f64], off: &[f64], sigma: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - sigma;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - sigma - off[i - 1] * off[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the whole spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// The `index`-th smallest eigenvalue (0-based) by bisection.
pub fn bisect_eigenvalue(diag: &[f64], off: &[f64], index: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * scale);
    // Widen slightly so the bracket strictly contains the spectrum.
    let pad = 2.0 * f64::EPSILON * scale + pivmin;
    lo -= pad;
    hi += pad;
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid, pivmin) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All eigenvalues of a complex symmetric tridiagonal matrix, unordered.
///
/// `off[i]` couples rows `i` and `i + 1`.
pub fn complex_symmetric_eigenvalues(
    diag: &[Complex64],
    off: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    if off.len() + 1 != n.max(1) {
        return Err(Error::InvalidInput(format!(
            "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
            n,
            off.len()
        )));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(Complex64::new(0.0, 0.0));

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].norm() + d[m + 1].norm();
                if e[m].norm() <= f64::EPSILON * dd || e[m].norm() < f64::MIN_POSITIVE {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == MAX_QL_ITERATIONS {
                return Err(Error::ConvergenceFailure(format!(
                    "QL did not isolate eigenvalue {l} of {n} after {iter} sweeps (|e| = {:e})",
                    e[l].norm()
                )));
            }
            iter += 1;
            // Exceptional shifts every tenth sweep break cycles.
            let exceptional = iter % 10 == 0;
            if !ql_sweep(&mut d, &mut e, l, m, exceptional, iter) {
                // Rotation broke down; retry with a perturbed shift.
                if !ql_sweep(&mut d, &mut e, l, m, true, iter + 1) {
                    return Err(Error::ConvergenceFailure(format!(
                        "complex rotation broke down at eigenvalue {l} of {n}"
                    )));
                }
            }
        }
    }
    Ok(d)
}

/// One implicit QL sweep on rows `l..=m`. Returns `false` (leaving the
/// matrix untouched) when a complex rotation is too ill-conditioned.
fn ql_sweep(
    d: &mut [Complex64],
    e: &mut [Complex64],
    l: usize,
    m: usize,
    exceptional: bool,
    iter: usize,
) -> bool {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut dw: Vec<Complex64> = d[l..=m].to_vec();
    let mut ew: Vec<Complex64> = e[l..=m].to_vec();

    let mut g = (dw[1] - dw[0]) / (2.0 * ew[0]);
    let r = (g * g + one).sqrt();
    let denom = if (g + r).norm() >= (g - r).norm() {
        g + r
    } else {
        g - r
    };
    let mut shift = dw[0] - ew[0] / denom;
    if exceptional {
        let t = 0.3 + 0.1 * (iter as f64).sin();
        shift += ew[0].norm() * Complex64::new(t, 0.5 * t);
    }
    g = dw[m - l] - shift;

    let (mut s, mut c, mut p) = (one, one, zero);
    let mut i = m - l;
    while i > 0 {
        i -= 1;
        let f = s * ew[i];
        let b = c * ew[i];
        let scale = f.norm() + g.norm();
        let r = (f * f + g * g).sqrt();
        if r.norm() <= f64::MIN_POSITIVE {
            // Exact deflation.
            dw[i + 1] -= p;
            ew[m - l] = zero;
            d[l..=m].copy_from_slice(&dw);
            e[l..=m].copy_from_slice(&ew);
            return true;
        }
        if r.norm() < 1e-6 * scale {
            return false;
        }
        ew[i + 1] = r;
        s = f / r;
        c = g / r;
        g = dw[i + 1] - p;
        let t = (dw[i] - g) * s + 2.0 * c * b;
        p = s * t;
        dw[i + 1] = g + p;
        g = c * t - b;
    }
    dw[0] -= p;
    ew[0] = g;
    ew[m - l] = zero;
    d[l..=m].copy_from_slice(&dw);
    e[l..=m].copy_from_slice(&ew);
    true
}

/// Solves `(T - shift I) x = rhs` for a symmetric tridiagonal `T` by
/// Gaussian elimination with partial pivoting. Exactly singular pivots are
/// nudged to a tiny value, as usual for inverse iteration.
pub fn solve_shifted(
    diag: &[Complex64],
    off: &[Complex64],
    shift: Complex64,
    rhs: &[Complex64],
) -> Vec<Complex64> {
    let n = diag.len();
    let zero = Complex64::new(0.0, 0.0);
    let scale = diag.iter().map(|z| z.norm()).fold(0.0, f64::max)
        + 2.0 * off.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    // U has up to two super-diagonals after pivoting.
    let mut u0 = vec![zero; n];
    let mut u1 = vec![zero; n];
    let mut u2 = vec![zero; n];
    let mut b = rhs.to_vec();

    let mut cur_d = diag[0] - shift;
    let mut cur_u = if n > 1 { off[0] } else { zero };
    let mut cur_u2 = zero;
    for i in 0..n {
        if i + 1 < n {
            let below = off[i];
            let next_d = diag[i + 1] - shift;
            let next_u = if i + 2 < n { off[i + 1] } else { zero };
            if below.norm() > cur_d.norm() {
                // swap rows i and i + 1
                u0[i] = below;
                u1[i] = next_d;
                u2[i] = next_u;
                b.swap(i, i + 1);
                let factor = cur_d / below;
                cur_d = cur_u - factor * next_d;
                cur_u = cur_u2 - factor * next_u;
                cur_u2 = zero;
                let bi = b[i];
                b[i + 1] -= factor * bi;
            } else {
                if cur_d.norm() < tiny {
                    cur_d = Complex64::new(tiny, 0.0);
                }
                u0[i] = cur_d;
                u1[i] = cur_u;
                u2[i] = cur_u2;
                let factor = below / cur_d;
                cur_d = next_d - factor * cur_u;
                cur_u = next_u - factor * cur_u2;
                cur_u2 = zero;
                let bi = b[i];
                b[i + 1] -= factor * bi;
            }
        } else {
            if cur_d.norm() < tiny {
                cur_d = Complex64::new(tiny, 0.0);
            }
            u0[i] = cur_d;
            u1[i] = zero;
            u2[i] = zero;
        }
    }
    let mut x = vec![zero; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        if i + 1 < n {
            acc -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            acc -= u2[i] * x[i + 2];
        }
        x[i] = acc / u0[i];
    }
    x
}

/// `T v` for a symmetric tridiagonal `T`.
pub fn apply(diag: &[Complex64], off: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut acc = diag[i] * v[i];
            if i > 0 {
                acc += off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += off[i] * v[i + 1];
            }
            acc
        })
        .collect()
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Refined eigenpair from inverse iteration.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
    /// `‖T v - λ v‖ / ‖v‖`
    pub residual: f64,
}

/// Inverse iteration followed by Rayleigh-quotient iteration with the
/// complex-symmetric quotient `vᵀTv / vᵀv` (no conjugation). The shift is
/// only allowed to move within `radius` of the starting estimate; the pair
/// with the smallest residual seen is returned.
pub fn refine_eigenpair(diag: &[Complex64], off: &[Complex64], estimate: Complex64) -> EigenPair {
    refine_eigenpair_within(diag, off, estimate, 1e-6 * estimate.norm().max(1.0))
}

pub fn refine_eigenpair_within(
    diag: &[Complex64],
    off: &[Complex64],
    estimate: Complex64,
    radius: f64,
) -> EigenPair {
    let n = diag.len();
    let residual_of = |lambda: Complex64, v: &[Complex64]| {
        let tv = apply(diag, off, v);
        let r: Vec<Complex64> = tv.iter().zip(v).map(|(a, b)| a - lambda * b).collect();
        norm2(&r) / norm2(v)
    };
    let mut v: Vec<Complex64> = (0..n)
        .map(|j| Complex64::new(1.0 + 0.25 * ((j as f64) * 0.7).sin(), 0.0))
        .collect();
    let mut shift = estimate;
    let mut best: Option<EigenPair> = None;
    for step in 0..8 {
        let mut y = solve_shifted(diag, off, shift, &v);
        let nrm = norm2(&y);
        if !(nrm.is_finite() && nrm > 0.0) {
            break;
        }
        y.iter_mut().for_each(|z| *z /= nrm);
        v = y;
        if step < 2 {
            continue;
        }
        let tv = apply(diag, off, &v);
        let den: Complex64 = v.iter().map(|a| a * a).sum();
        let candidate = if den.norm() > 1e-8 {
            let num: Complex64 = v.iter().zip(&tv).map(|(a, b)| a * b).sum();
            num / den
        } else {
            // quasi-null vector: fall back to the Hermitian quotient
            let num: Complex64 = v.iter().zip(&tv).map(|(a, b)| a.conj() * b).sum();
            num
        };
        let lambda = if (candidate - estimate).norm() <= radius {
            candidate
        } else {
            shift
        };
        let residual = residual_of(lambda, &v);
        let improved = best.as_ref().is_none_or(|b| residual < b.residual);
        if improved {
            best = Some(EigenPair {
                value: lambda,
                vector: v.clone(),
                residual,
            });
        }
        if !improved || lambda == shift {
            break;
        }
        shift = lambda;
    }
    best.unwrap_or_else(|| EigenPair {
        value: estimate,
        residual: residual_of(estimate, &v),
        vector: v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Dense characteristic polynomial by the three-term recurrence.
    fn char_poly(diag: &[Complex64], off: &[Complex64], z: Complex64) -> Complex64 {
        let mut p_prev = c(1.0);
        let mut p = diag[0] - z;
        for i in 1..diag.len() {
            let next = (diag[i] - z) * p - off[i - 1] * off[i - 1] * p_prev;
            p_prev = p;
            p = next;
        }
        p
    }

    #[test]
    fn bisection_reproduces_discrete_laplacian() {
        // tridiag(-1, 2, -1) has eigenvalues 2 - 2 cos(jπ/(n+1))
        let n = 50;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        for j in 0..5 {
            let exact =
                2.0 - 2.0 * (((j + 1) as f64) * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((bisect_eigenvalue(&d, &e, j) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn sturm_count_is_monotone() {
        let d = vec![1.0, -3.0, 4.0, 0.5];
        let e = vec![0.3, -1.2, 2.0];
        let mut last = 0;
        for s in [-10.0, -3.5, -1.0, 0.0, 1.0, 3.0, 10.0] {
            let c = sturm_count(&d, &e, s, 1e-300);
            assert!(c >= last);
            last = c;
        }
        assert_eq!(last, 4);
    }

    #[test]
    fn complex_ql_roots_annihilate_characteristic_polynomial() {
        let d: Vec<Complex64> = (0..8)
            .map(|j| Complex64::new(j as f64, 0.3 * (j as f64 - 3.5)))
            .collect();
        let e = vec![c(-0.7); 7];
        let ev = complex_symmetric_eigenvalues(&d, &e).unwrap();
        assert_eq!(ev.len(), 8);
        for z in &ev {
            let p = refine_eigenpair(&d, &e, *z);
            assert!(p.residual < 1e-12, "{z}: {}", p.residual);
            // |p(z)| small relative to the product of distances scale
            let scale: f64 = d.iter().map(|di| (di - z).norm() + 1.0).product();
            assert!(char_poly(&d, &e, p.value).norm() < 1e-10 * scale);
        }
        // trace is preserved
        let tr: Complex64 = d.iter().sum();
        let sum: Complex64 = ev.iter().sum();
        assert!((tr - sum).norm() < 1e-12);
    }

    #[test]
    fn complex_ql_agrees_with_bisection_on_real_input() {
        let n = 40;
        let dr: Vec<f64> = (0..n).map(|j| 2.0 + (j as f64 * 0.37).cos()).collect();
        let er = vec![-1.0; n - 1];
        let dc: Vec<Complex64> = dr.iter().map(|&x| c(x)).collect();
        let ec: Vec<Complex64> = er.iter().map(|&x| c(x)).collect();
        let mut ev = complex_symmetric_eigenvalues(&dc, &ec).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (j, z) in ev.iter().enumerate() {
            assert!(z.im.abs() < 1e-13);
            assert!((z.re - bisect_eigenvalue(&dr, &er, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn pt_dimer_has_conjugate_pair_when_broken() {
        // [[iγ, 1], [1, -iγ]]: eigenvalues ±sqrt(1 - γ²)
        let g = 2.0;
        let d = vec![Complex64::new(0.0, g), Complex64::new(0.0, -g)];
        let e = vec![c(1.0)];
        let mut ev = complex_symmetric_eigenvalues(&d, &e).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        let s = (g * g - 1.0_f64).sqrt();
        assert!((ev[0] - Complex64::new(0.0, -s)).norm() < 1e-12);
        assert!((ev[1] - Complex64::new(0.0, s)).norm() < 1e-12);
    }

    #[test]
    fn shifted_solve_matches_apply() {
        let d: Vec<Complex64> = (0..6)
            .map(|j| Complex64::new(0.1 * j as f64, 1.0))
            .collect();
        let e: Vec<Complex64> = (0..5)
            .map(|j| Complex64::new(2.0 + j as f64, -0.5))
            .collect();
        let rhs: Vec<Complex64> = (0..6).map(|j| Complex64::new(j as f64, 1.0)).collect();
        let shift = Complex64::new(0.3, -0.2);
        let x = solve_shifted(&d, &e, shift, &rhs);
        let tx = apply(&d, &e, &x);
        for i in 0..6 {
            assert!((tx[i] - shift * x[i] - rhs[i]).norm() < 1e-12);
        }
    }
}
