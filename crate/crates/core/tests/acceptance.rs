//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p ptsusy --test acceptance -- --nocapture`.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ptsusy::cli::partner_columns;
use ptsusy::field::linspace;
use ptsusy::scattering::{transmission_reflection, PiecewisePotential, Segment};
use ptsusy::spectral::{
    converged_spectrum, isospectral_check, truncation_study, well_spectrum_analytic,
};
use ptsusy::states::{pt_asymmetry, schrodinger_residual, WaveFunctionSpec};
use ptsusy::susy::{check_shape_invariance, Constraint, Family, Partner, SuperpotentialSpec};
use ptsusy::Constant;
use tempfile::TempDir;

use common::textbook_transmission;

struct Verdict {
    id: &'static str,
    title: &'static str,
    gating: bool,
    passed: bool,
    detail: String,
}

impl Verdict {
    fn line(&self) -> String {
        let status = match (self.gating, self.passed) {
            (false, _) => "INFO",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        format!("[{status}] {} {}: {}", self.id, self.title, self.detail)
    }
}

fn spectrum_reproduction() -> Verdict {
    let start = Instant::now();
    let report =
        converged_spectrum(&Constant::real(-1.0), 0.0, PI, &[1000, 2000, 4000], 5).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let mut raw = 0.0f64;
    let mut extrapolated = 0.0f64;
    for (n, (z, r)) in report
        .eigenvalues
        .iter()
        .zip(&report.richardson_estimates)
        .enumerate()
    {
        let exact = well_spectrum_analytic(n as u32);
        raw = raw.max((z.re - exact).abs());
        extrapolated = extrapolated.max((r - exact).abs());
    }
    Verdict {
        id: "1",
        title: "spectrum of V = -1 on [0, π]",
        gating: true,
        passed: raw < 1e-3 && extrapolated < 1e-6 && elapsed < 10.0,
        detail: format!(
            "raw {raw:.2e} (< 1e-3) at n = 4000, Richardson {extrapolated:.2e} (< 1e-6), {elapsed:.2} s (< 10 s)"
        ),
    }
}

fn isospectrality() -> Verdict {
    let spec = SuperpotentialSpec::new(Family::CotangentWell, 1.0, 0.0).unwrap();
    let v1 = converged_spectrum(&spec.partner_field(Partner::V1), 0.0, PI, &[4000], 6).unwrap();
    let v2 = converged_spectrum(&spec.partner_field(Partner::V2), 0.0, PI, &[4000], 5).unwrap();
    let m = isospectral_check(&v1, &v2, 1, 1e-4).unwrap();
    Verdict {
        id: "2",
        title: "V2 matches V1 shifted by one level (q = 0)",
        gating: true,
        passed: m.passed && m.matched == 5,
        detail: format!(
            "max error {:.2e} (< 1e-4) over {} levels",
            m.max_error, m.matched
        ),
    }
}

fn shape_invariance() -> Verdict {
    let mut spread = 0.0f64;
    let mut mean_error = 0.0f64;
    let mut all_hold = true;
    for family in Family::ALL {
        for q in [0.0, 1.0, 2.0, 5.0] {
            for k in [1.0, 2.0, 3.0] {
                let spec = SuperpotentialSpec::new(family, k, q).unwrap();
                let si = check_shape_invariance(&spec, &spec.regular_samples(1000, 0.05)).unwrap();
                all_hold &= si.holds();
                spread = spread.max(si.max_abs_deviation / (3.0 * k * k));
                mean_error = mean_error
                    .max((si.mean.re - 3.0 * k * k).abs().max(si.mean.im.abs()) / (3.0 * k * k));
            }
        }
    }
    let control_fails = Family::ALL.iter().all(|&family| {
        let spec = SuperpotentialSpec::new(family, 1.0, 2.0)
            .unwrap()
            .with_constraint(Constraint::DoubledFrequency);
        !check_shape_invariance(&spec, &spec.regular_samples(1000, 0.05))
            .unwrap()
            .holds()
    });
    Verdict {
        id: "3",
        title: "constant remainder 3k² on 4 families × q × k",
        gating: true,
        passed: all_hold && spread < 1e-10 && mean_error < 1e-10 && control_fails,
        detail: format!(
            "relative spread {spread:.2e}, relative mean error {mean_error:.2e} (< 1e-10), negative control {}",
            if control_fails { "fails as designed" } else { "UNEXPECTEDLY HOLDS" }
        ),
    }
}

fn residual_profile(family: Family, k: f64, q: f64) -> (f64, f64) {
    let psi = WaveFunctionSpec::new(family, k, q).unwrap();
    let v1 = psi.superpotential().partner_field(Partner::V1);
    let (lo, hi) = psi.cell().unwrap_or((-PI / k, PI / k));
    let (mut r3, mut r4) = (0.0f64, 0.0f64);
    for u in linspace(0.2, 0.8, 5) {
        let x = lo + u * (hi - lo);
        r3 = r3.max(
            schrodinger_residual(&v1, &psi, 0.0, x, 1e-3)
                .unwrap()
                .norm(),
        );
        r4 = r4.max(
            schrodinger_residual(&v1, &psi, 0.0, x, 1e-4)
                .unwrap()
                .norm(),
        );
    }
    (r4, (r3 / r4).log10())
}

fn ground_state_annihilation() -> Vec<Verdict> {
    let mut worst = 0.0f64;
    let mut slowest = f64::INFINITY;
    let mut parts = Vec::new();
    for family in Family::ALL {
        let (r4, order) = residual_profile(family, 1.0, 2.0);
        worst = worst.max(r4);
        slowest = slowest.min(order);
        parts.push(format!("{family} {r4:.1e}/p={order:.2}"));
    }
    let mut strong = Vec::new();
    for family in Family::ALL {
        let (r4, order) = residual_profile(family, 1.0, 5.0);
        strong.push(format!("{family} {r4:.1e}/p={order:.2}"));
    }
    vec![
        Verdict {
            id: "4",
            title: "ground states annihilated by V1 (k = 1, q = 2)",
            gating: true,
            passed: worst < 1e-6 && slowest >= 1.5,
            detail: format!(
                "max residual {worst:.2e} (< 1e-6) at h = 1e-4, min order {slowest:.2} (≥ 1.5): {}",
                parts.join(", ")
            ),
        },
        Verdict {
            id: "4b",
            title: "ground-state residual at q = 5 (k = 1)",
            gating: false,
            passed: true,
            detail: strong.join(", "),
        },
    ]
}

fn density_equality() -> Verdict {
    let mut worst = 0.0f64;
    for well in [Family::CotangentWell, Family::TangentWell] {
        let free = WaveFunctionSpec::new(well, 1.0, 0.0).unwrap();
        let (lo, hi) = free.cell().unwrap();
        let xs = linspace(lo, hi, 2002);
        for q in [1.0, 2.0, 5.0] {
            let psi = WaveFunctionSpec::new(well, 1.0, q).unwrap();
            for &x in &xs[1..xs.len() - 1] {
                let d = psi.probability_density(x).unwrap() - free.probability_density(x).unwrap();
                worst = worst.max(d.abs());
            }
        }
    }
    Verdict {
        id: "5",
        title: "|ψ_q|² = |ψ_0|² for both wells, q ∈ {1, 2, 5}",
        gating: true,
        passed: worst < 1e-12,
        detail: format!("max difference {worst:.2e} (< 1e-12) over 2000 points"),
    }
}

fn pt_symmetry() -> Verdict {
    let margin = PI / 16.0;
    let xs = linspace(margin, PI - margin, 2000);
    let mut worst = 0.0f64;
    for q in [1.0, 2.0] {
        let spec = SuperpotentialSpec::new(Family::CotangentWell, 1.0, q).unwrap();
        for which in [Partner::V1, Partner::V2] {
            worst = worst.max(pt_asymmetry(&spec.partner_field(which), PI / 2.0, &xs).unwrap());
        }
    }
    Verdict {
        id: "6",
        title: "cotangent partners PT-symmetric about π/2 (k = 1, q ∈ {1, 2})",
        gating: true,
        passed: worst < 1e-12,
        detail: format!("max asymmetry {worst:.2e} (< 1e-12) on [π/16, 15π/16]"),
    }
}

fn scattering_flux() -> Verdict {
    let factors = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];
    let mut flux = 0.0f64;
    let mut oracle = 0.0f64;
    for (v0, a) in [(4.0, 1.0), (-5.0, 1.0), (10.0, 0.5), (1.0, 2.0)] {
        let barrier = PiecewisePotential::constant_barrier(v0, 0.0, a).unwrap();
        for f in factors {
            let e = f * f64::abs(v0);
            let s = transmission_reflection(&barrier, e).unwrap();
            let t = textbook_transmission(v0, a, e);
            oracle = oracle.max((s.transmittance() - t).abs() / t);
            if e != v0 {
                flux = flux.max(s.flux_defect.abs());
            }
        }
    }
    let stack = PiecewisePotential::new(
        vec![-1.0, -0.2, 0.3, 1.5],
        vec![Segment::real(3.0), Segment::real(-2.0), Segment::real(6.0)],
        0.0,
    )
    .unwrap();
    for f in factors {
        flux = flux.max(
            transmission_reflection(&stack, f * 6.0)
                .unwrap()
                .flux_defect
                .abs(),
        );
    }
    Verdict {
        id: "7",
        title: "flux conservation and square-barrier oracle",
        gating: true,
        passed: flux <= 1e-10 && oracle <= 1e-8,
        detail: format!(
            "max |R + T - 1| {flux:.2e} (≤ 1e-10), max relative T error {oracle:.2e} (≤ 1e-8)"
        ),
    }
}

fn run_figures(dir: &Path) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_ptsusy"))
        .args(["figures", "--out"])
        .arg(dir)
        .output()
        .unwrap();
    out.status.code().unwrap_or(-1)
}

fn figure_data() -> Verdict {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let codes = (run_figures(a.path()), run_figures(b.path()));
    let identical = ["fig1.csv", "fig2.csv"]
        .iter()
        .all(|f| fs::read(a.path().join(f)).unwrap() == fs::read(b.path().join(f)).unwrap());
    let centre =
        partner_columns(Family::CotangentWell, Partner::V1, 1.0, 2.0, 1.0, PI / 2.0).unwrap();
    let text = fs::read_to_string(a.path().join("fig1.csv")).unwrap();
    let free_deviation = text
        .lines()
        .skip(1)
        .map(|l| (l.rsplit(',').next().unwrap().parse::<f64>().unwrap() + 1.0).abs())
        .fold(0.0, f64::max);
    let centre_ok = centre[0] == -5.0 && centre[1].abs() <= 1e-15;
    Verdict {
        id: "8",
        title: "figure tables",
        gating: true,
        passed: codes == (0, 0) && identical && centre_ok && free_deviation <= 1e-12,
        detail: format!(
            "rerun byte-identical: {identical}, V1_c(π/2) = {} {:+.1e}i (re = -5 exactly, |im| ≤ 1e-15), max |V1(q=0) + 1| {free_deviation:.1e} (≤ 1e-12)",
            centre[0], centre[1]
        ),
    }
}

fn truncation_reality() -> Verdict {
    let spec = SuperpotentialSpec::new(Family::CotangentWell, 1.0, 2.0).unwrap();
    let mut parts = Vec::new();
    for which in [Partner::V1, Partner::V2] {
        let rows =
            truncation_study(&spec, which, &[1e-2, 1e-3, 1e-4], &[1000, 2000, 4000], 5).unwrap();
        for row in rows {
            let value = match (row.max_imag, &row.error) {
                (Some(m), _) => format!("{m:.1e}"),
                (None, Some(e)) => format!("failed ({e})"),
                _ => "-".into(),
            };
            parts.push(format!(
                "{which:?} ε={:e} n={} max|Im|={value}",
                row.epsilon, row.n_interior
            ));
        }
    }
    Verdict {
        id: "9",
        title: "reality of the q = 2 well spectra under truncation (exploratory)",
        gating: false,
        passed: true,
        detail: parts.join("; "),
    }
}

#[test]
fn acceptance_criteria() {
    let mut verdicts = vec![
        spectrum_reproduction(),
        isospectrality(),
        shape_invariance(),
    ];
    verdicts.extend(ground_state_annihilation());
    verdicts.extend([
        density_equality(),
        pt_symmetry(),
        scattering_flux(),
        figure_data(),
        truncation_reality(),
    ]);
    for v in &verdicts {
        println!("{}", v.line());
    }
    let failed: Vec<&str> = verdicts
        .iter()
        .filter(|v| v.gating && !v.passed)
        .map(|v| v.id)
        .collect();
    println!(
        "gating criteria failed: {}",
        if failed.is_empty() {
            "none".into()
        } else {
            failed.join(", ")
        }
    );
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
