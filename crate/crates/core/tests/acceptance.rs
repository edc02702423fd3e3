//! End-to-end acceptance checks, one numbered criterion per test. Each test
//! prints a single pass/fail line (visible with `--nocapture`) and enforces
//! its runtime budget.

use std::time::Instant;

use casimir_core::dielectric::{
    kramers_kronig_to_imag, log_grid, DielectricModel, LorentzOscillator, TailModel,
};
use casimir_core::lifshitz::{lifshitz_finite_t, lifshitz_zero_t, PlanarCavity};
use casimir_core::modesum::{casimir_pressure, mode_sum_energy, Geometry, Regulator};
use casimir_core::polariton::{
    CouplingForm, Defect, LatticeModel, SeparationFamily,
};
use casimir_core::units::{C, HBAR, HBAR_C, KB};

const ZETA3: f64 = 1.2020569031595943;

fn report(n: u32, name: &str, pass: bool) {
    println!(
        "criterion {n} ({name}): {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} ({name}) failed");
}

fn mirrors(gap: f64) -> PlanarCavity<f64> {
    PlanarCavity {
        left: DielectricModel::PerfectMirror,
        right: DielectricModel::PerfectMirror,
        gap,
    }
}

#[test]
fn criterion_1_ideal_mirror_pressure() {
    let t0 = Instant::now();
    let d = 1e-6;
    let r = lifshitz_zero_t(&mirrors(d), 1e-8).unwrap();
    let exact = -std::f64::consts::PI.powi(2) * HBAR_C / (240.0 * d.powi(4));
    let rel = (r.pressure - exact).abs() / exact.abs();
    let in_budget = t0.elapsed().as_secs_f64() < 5.0;
    // -1.300e-3 Pa within 0.1%.
    report(
        1,
        "ideal-mirror pressure",
        rel < 1e-3 && (r.pressure + 1.300e-3).abs() / 1.300e-3 < 1e-3 && in_budget,
    );
}

#[test]
fn criterion_2_cross_route_identity() {
    let mut ok = true;
    for d in [1e-7, 1e-6, 1e-5] {
        let p_modesum = casimir_pressure(Geometry::Em3d, d, &Regulator::ZetaAbel).unwrap();
        let p_lifshitz = lifshitz_zero_t(&mirrors(d), 1e-8).unwrap().pressure;
        let rel = (p_modesum - p_lifshitz).abs() / p_lifshitz.abs();
        ok &= rel < 1e-3;
    }
    report(2, "mode-sum vs Lifshitz identity", ok);
}

#[test]
fn criterion_3_regulator_universality() {
    let d = 1e-6;
    let mut ok = true;
    for geometry in [Geometry::Scalar1d, Geometry::Em3d] {
        let zeta: f64 = mode_sum_energy(geometry, d, &Regulator::ZetaAbel)
            .unwrap()
            .finite_part;
        for reg in [
            Regulator::ExpCutoff { xi_reg: 0.2 * d },
            Regulator::EulerMaclaurin { order: 4 },
        ] {
            let v = mode_sum_energy(geometry, d, &reg).unwrap().finite_part;
            ok &= (v - zeta).abs() / zeta.abs() < 1e-6;
        }
    }
    let one_d = mode_sum_energy(Geometry::Scalar1d, d, &Regulator::ZetaAbel)
        .unwrap()
        .finite_part;
    let exact = -std::f64::consts::PI * HBAR_C / (24.0 * d);
    ok &= (one_d - exact).abs() / exact.abs() < 1e-6;
    report(3, "regulator universality", ok);
}

#[test]
fn criterion_4_residual_divergence() {
    // After bulk subtraction the 3D cutoff energy still carries a 1/xi^3
    // plate self-energy term; its coefficient is gap independent and it
    // leaves the pressure untouched.
    let mut ok = true;
    let mut c3: Vec<f64> = Vec::new();
    for d in [1e-6f64, 3.16e-6, 1e-5] {
        let r = mode_sum_energy(Geometry::Em3d, d, &Regulator::ExpCutoff { xi_reg: 0.2 * d })
            .unwrap();
        ok &= r.divergences.contains_key(&3);
        c3.push(r.divergences[&3]);
        let p_cut = casimir_pressure(Geometry::Em3d, d, &Regulator::ExpCutoff { xi_reg: 0.2 * d })
            .unwrap();
        let p_zeta = casimir_pressure(Geometry::Em3d, d, &Regulator::ZetaAbel).unwrap();
        ok &= (p_cut - p_zeta).abs() / p_zeta.abs() < 1e-5;
    }
    let spread = c3
        .iter()
        .map(|&c| (c - c3[0]).abs() / c3[0].abs())
        .fold(0.0, f64::max);
    ok &= spread < 1e-4;
    report(4, "residual power-3 divergence", ok);
}

#[test]
fn criterion_5_thermal_limits() {
    let t0 = Instant::now();
    let d = 1e-6;
    let mut ok = true;

    // Classical limit at kB T d / (hbar c) = 20. For ideal mirrors both
    // polarizations reflect at n = 0 and the classical pressure is
    // -zeta(3) kB T/(4 pi d^3); the Drude mirror loses its TE zero mode and
    // lands at exactly half of that.
    let t_hot = 20.0 * HBAR_C / (KB * d);
    let ideal = lifshitz_finite_t(&mirrors(d), t_hot, 1e-9).unwrap();
    let classical = -ZETA3 * KB * t_hot / (4.0 * std::f64::consts::PI * d.powi(3));
    ok &= (ideal.pressure - classical).abs() / classical.abs() < 1e-2;

    let drude_model = DielectricModel::Drude {
        omega_p: 1.4e16,
        gamma: 5.3e13,
    };
    let drude = lifshitz_finite_t(
        &PlanarCavity {
            left: drude_model.clone(),
            right: drude_model,
            gap: d,
        },
        t_hot,
        1e-9,
    )
    .unwrap();
    ok &= (drude.pressure / ideal.pressure - 0.5).abs() < 1e-2;

    // Cold limit at kB T d / (hbar c) = 1e-3 recovers the T = 0 pressure.
    let t_cold = 1e-3 * HBAR_C / (KB * d);
    let cold = lifshitz_finite_t(&mirrors(d), t_cold, 1e-8).unwrap();
    let zero = lifshitz_zero_t(&mirrors(d), 1e-8).unwrap();
    let tol = 1e-4
        + (cold.quadrature.pressure_error + zero.quadrature.pressure_error) / zero.pressure.abs();
    ok &= (cold.pressure - zero.pressure).abs() / zero.pressure.abs() < tol;

    let in_budget = t0.elapsed().as_secs_f64() < 60.0;
    report(5, "thermal limits", ok && in_budget);
}

#[test]
fn criterion_6_kramers_kronig() {
    let drude = DielectricModel::Drude {
        omega_p: 1.4e16,
        gamma: 5.3e13,
    };
    let lorentz = DielectricModel::LorentzOscillators(vec![LorentzOscillator {
        omega_0: 5e15,
        plasma: 1.2e16,
        gamma: 2e14,
    }]);
    let mut ok = true;
    for model in [&drude, &lorentz] {
        let grid = log_grid(1e10f64, 1e20, 6000);
        let table = model.tabulate(&grid).unwrap();
        // xi spanning 3 decades around the models' characteristic scales.
        for xi in log_grid(3e13f64, 3e16, 16) {
            let kk = kramers_kronig_to_imag(&table, xi, 1e-4, TailModel::InverseCube).unwrap();
            let exact = model.eval_eps_imag(xi).unwrap();
            ok &= (kk - exact).abs() / exact < 1e-4;
        }
    }
    report(6, "Kramers-Kronig ingestion", ok);
}

// ---------------------------------------------------------------------------
// Criterion 7: independent brute-force oracle (classical Jacobi rotations)
// for the N = 8 toy lattice, then the strong-coupling scaling law.
// ---------------------------------------------------------------------------

/// Plain Jacobi eigenvalue sweep; deliberately independent of the library's
/// nalgebra-based path.
fn jacobi_eigenvalues(mut m: Vec<Vec<f64>>) -> Vec<f64> {
    let n = m.len();
    for _sweep in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (2.0 * m[p][q]).atan2(m[q][q] - m[p][p]);
                let (s, c) = theta.sin_cos();
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// Hand-assembled quadratic form for the probe configuration: pinned chain
/// plus two screened defects, written out without using the library builder.
fn oracle_matrix(n: usize, sites: [usize; 2], wm: f64, lambda: f64, w0: f64) -> Vec<Vec<f64>> {
    let dim = n + 2;
    let mut m = vec![vec![0.0; dim]; dim];
    for i in 0..n {
        m[i][i] = 2.0 * w0 * w0;
        if i + 1 < n {
            m[i][i + 1] = -w0 * w0;
            m[i + 1][i] = -w0 * w0;
        }
    }
    for (k, &s) in sites.iter().enumerate() {
        let q = n + k;
        m[q][q] = wm * wm + lambda;
        m[s][s] += lambda;
        m[s][q] -= lambda;
        m[q][s] -= lambda;
    }
    m
}

fn oracle_energy(n: usize, sep: usize, wm: f64, lambda: f64, w0: f64) -> f64 {
    let i1 = (n - sep) / 2;
    let m = oracle_matrix(n, [i1, i1 + sep], wm, lambda, w0);
    let mut lambdas = jacobi_eigenvalues(m);
    lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    0.5 * HBAR * lambdas.iter().map(|&l| l.max(0.0).sqrt()).sum::<f64>()
}

#[test]
fn criterion_7_polariton_toy() {
    let t0 = Instant::now();
    let a = 1e-9;
    let w0 = C / a;
    let mut ok = true;

    let family = |n: usize, coupling: f64| SeparationFamily {
        chain: LatticeModel::<f64>::new(n, a),
        probe: Defect {
            site: 0,
            omega_m: 3.0 * w0,
            coupling,
            form: CouplingForm::Screened,
            bath: vec![],
        },
    };

    // Decoupled probes: force is identically zero.
    ok &= family(64, 0.0).force_at(8).unwrap() == 0.0;

    // N = 8 brute-force oracle.
    let lambda = 40.0 * w0 * w0;
    let fam8 = family(8, lambda);
    for sep in [2usize, 4] {
        let lib = fam8.force_at(sep).unwrap();
        let oracle = -(oracle_energy(8, sep + 1, 3.0 * w0, lambda, w0)
            - oracle_energy(8, sep, 3.0 * w0, lambda, w0))
            / a;
        ok &= (lib - oracle).abs() <= 1e-12 * oracle.abs();
    }

    // Strong-coupling scaling law over d in [8, 64] sites at N = 512.
    let fam = family(512, lambda);
    let (exponent, _amp) = fam
        .scaling_exponent(&[8, 11, 16, 23, 32, 45, 64])
        .unwrap();
    ok &= (exponent - 2.0).abs() < 0.2;

    let in_budget = t0.elapsed().as_secs_f64() < 120.0;
    report(7, "polariton toy model", ok && in_budget);
}
