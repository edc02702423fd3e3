//! Discretized coupled field-matter ("polariton") lattice model.
//!
//! A massless scalar field lives on a 1D chain of `n_sites` oscillators with
//! spacing `a` and wave speed `c`; matter defects (single oscillators, each
//! optionally dressed with a bath of reservoir oscillators) couple to the
//! field locally. Everything is a single quadratic form, so the exact ground
//! state energy is `hbar/2` times the sum of normal-mode frequencies -- no
//! perturbation theory. Embedding two strong defects and differencing the
//! ground energy against their separation reproduces Casimir-like attraction
//! from nothing but coupled harmonic degrees of freedom.
//!
//! Two coupling forms are provided. The bare bilinear `lambda phi_i Q`
//! destabilizes the chain once `lambda^2 (a/c)^2 G_ii > omega_m^2` (G is the
//! chain Green function at the site, ~N/4 mid-chain), which caps how
//! mirror-like a bare defect can get. The screened form
//! `(lambda/2)(phi_i - Q)^2` is positive semi-definite at any strength and is
//! the one that reaches the strong-coupling (Dirichlet) regime.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use nalgebra::{DMatrix, RealField, SymmetricEigen};
use num_traits::Float;
use thiserror::Error;

use crate::fit::{fit_power_law, FitError};
use crate::real::{KahanSum, Real};
use crate::units::{C, HBAR};

#[derive(Debug, Error)]
pub enum PolaritonError {
    #[error("invalid lattice: {0}")]
    BadLattice(String),
    #[error("defect site {site} out of range for {n_sites} sites")]
    BadSite { site: usize, n_sites: usize },
    #[error(
        "quadratic form is not positive semi-definite (min eigenvalue {min_eigenvalue:e} rad^2/s^2){hint}"
    )]
    UnstableModel {
        min_eigenvalue: f64,
        hint: String,
    },
    #[error(
        "separation {separation} does not fit strictly inside a {n_sites}-site chain \
         (both probes need at least one clean site outboard)"
    )]
    BadSeparation { separation: usize, n_sites: usize },
    #[error("scaling fit needs at least 5 separations spanning a factor >= 3, got {0}")]
    BadScalingInput(String),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Chain boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Field vanishes beyond both ends (Dirichlet walls).
    Pinned,
    /// Ring topology; carries one exact zero mode.
    Periodic,
}

/// How a defect oscillator attaches to the field at its site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingForm {
    /// Bilinear `lambda phi Q`; simplest, but unstable at strong coupling.
    #[default]
    Bare,
    /// Difference form `(lambda/2)(phi - Q)^2`; stable at any strength.
    Screened,
}

/// Reservoir oscillator attached bilinearly to a defect coordinate.
/// Frequencies in rad/s, coupling in rad^2/s^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathOscillator<R> {
    pub omega: R,
    pub coupling: R,
}

/// Matter oscillator coupled to the field at one lattice site.
#[derive(Debug, Clone, PartialEq)]
pub struct Defect<R> {
    pub site: usize,
    /// Bare defect frequency (rad/s).
    pub omega_m: R,
    /// Field-defect coupling strength lambda (rad^2/s^2).
    pub coupling: R,
    pub form: CouplingForm,
    pub bath: Vec<BathOscillator<R>>,
}

/// The full lattice: field chain plus any number of defects.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel<R> {
    pub n_sites: usize,
    /// Lattice spacing (m).
    pub spacing: R,
    /// Field propagation speed (m/s).
    pub wave_speed: R,
    pub boundary: Boundary,
    pub defects: Vec<Defect<R>>,
}

impl<R: Real> LatticeModel<R> {
    /// Vacuum-speed chain with no defects.
    pub fn new(n_sites: usize, spacing: R) -> Self {
        Self {
            n_sites,
            spacing,
            wave_speed: R::lit(C),
            boundary: Boundary::Pinned,
            defects: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), PolaritonError> {
        if self.n_sites < 2 {
            return Err(PolaritonError::BadLattice(format!(
                "need at least 2 sites, got {}",
                self.n_sites
            )));
        }
        if !self.spacing.is_finite() || self.spacing <= R::zero() {
            return Err(PolaritonError::BadLattice(format!(
                "spacing must be positive, got {:?}",
                self.spacing
            )));
        }
        if !self.wave_speed.is_finite() || self.wave_speed <= R::zero() {
            return Err(PolaritonError::BadLattice(format!(
                "wave speed must be positive, got {:?}",
                self.wave_speed
            )));
        }
        for d in &self.defects {
            if d.site >= self.n_sites {
                return Err(PolaritonError::BadSite {
                    site: d.site,
                    n_sites: self.n_sites,
                });
            }
            if !d.omega_m.is_finite() || d.omega_m <= R::zero() {
                return Err(PolaritonError::BadLattice(format!(
                    "defect frequency must be positive, got {:?}",
                    d.omega_m
                )));
            }
            if !d.coupling.is_finite() || d.coupling < R::zero() {
                return Err(PolaritonError::BadLattice(format!(
                    "defect coupling must be nonnegative, got {:?}",
                    d.coupling
                )));
            }
            for b in &d.bath {
                if !b.omega.is_finite() || b.omega <= R::zero() || !b.coupling.is_finite() {
                    return Err(PolaritonError::BadLattice(
                        "bath oscillators need positive frequency and finite coupling".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Total number of coordinates: field sites + defects + bath modes.
    pub fn dim(&self) -> usize {
        self.n_sites + self.defects.iter().map(|d| 1 + d.bath.len()).sum::<usize>()
    }
}

/// Pinned-chain Green function of tridiag(-1, 2, -1) at the diagonal,
/// dimensionless: G_ii = (i+1)(N-i)/(N+1) for 0-based site i.
fn chain_green_diag<R: Real>(site: usize, n: usize) -> R {
    R::from_usize((site + 1) * (n - site)).unwrap() / R::from_usize(n + 1).unwrap()
}

/// Assemble the (symmetric) quadratic form V = x^T M x / 2 in rad^2/s^2.
/// Coordinate layout: field sites 0..N, then per defect its Q followed by
/// its bath modes.
pub fn build_quadratic_form<R: Real + RealField>(
    model: &LatticeModel<R>,
) -> Result<DMatrix<R>, PolaritonError> {
    model.validate()?;
    let n = model.n_sites;
    let dim = model.dim();
    let w0 = model.wave_speed / model.spacing; // c/a, rad/s
    let w0sq = w0 * w0;
    let mut m = DMatrix::<R>::zeros(dim, dim);

    let two = R::lit(2.0);
    for i in 0..n {
        m[(i, i)] = two * w0sq;
    }
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = -w0sq;
        m[(i + 1, i)] = -w0sq;
    }
    match model.boundary {
        Boundary::Pinned => {}
        Boundary::Periodic => {
            m[(0, n - 1)] = m[(0, n - 1)] - w0sq;
            m[(n - 1, 0)] = m[(n - 1, 0)] - w0sq;
        }
    }

    let mut idx = n;
    for d in &model.defects {
        let q = idx;
        idx += 1;
        m[(q, q)] = d.omega_m * d.omega_m;
        match d.form {
            CouplingForm::Bare => {
                m[(d.site, q)] = m[(d.site, q)] + d.coupling;
                m[(q, d.site)] = m[(q, d.site)] + d.coupling;
            }
            CouplingForm::Screened => {
                m[(d.site, d.site)] = m[(d.site, d.site)] + d.coupling;
                m[(q, q)] = m[(q, q)] + d.coupling;
                m[(d.site, q)] = m[(d.site, q)] - d.coupling;
                m[(q, d.site)] = m[(q, d.site)] - d.coupling;
            }
        }
        for b in &d.bath {
            let bi = idx;
            idx += 1;
            m[(bi, bi)] = b.omega * b.omega;
            m[(q, bi)] = m[(q, bi)] + b.coupling;
            m[(bi, q)] = m[(bi, q)] + b.coupling;
        }
    }
    Ok(m)
}

/// Normal-mode spectrum and exact ground-state energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult<R> {
    /// Normal-mode frequencies (rad/s), ascending.
    pub eigenfrequencies: Vec<R>,
    /// hbar/2 times the frequency sum (J).
    pub ground_energy: R,
    /// Fingerprint of the assembled quadratic form, for reproducibility
    /// bookkeeping.
    pub model_hash: u64,
}

fn hash_matrix<R: Real>(m: &DMatrix<R>) -> u64 {
    let mut h = DefaultHasher::new();
    m.nrows().hash(&mut h);
    for v in m.iter() {
        v.to_f64().unwrap_or(f64::NAN).to_bits().hash(&mut h);
    }
    h.finish()
}

/// Instability diagnostic: the worst bare-coupling ratio
/// lambda^2 (a/c)^2 G_ii / omega_m^2 (> 1 means guaranteed unstable).
fn worst_bare_hint<R: Real>(model: &LatticeModel<R>) -> String {
    if model.boundary != Boundary::Pinned {
        return String::new();
    }
    let w0 = model.wave_speed / model.spacing;
    let mut worst: Option<(usize, f64)> = None;
    for d in &model.defects {
        if d.form != CouplingForm::Bare {
            continue;
        }
        let g: R = chain_green_diag(d.site, model.n_sites);
        let ratio = d.coupling * d.coupling * g / (w0 * w0 * d.omega_m * d.omega_m);
        let r = ratio.to_f64().unwrap_or(f64::NAN);
        if worst.map_or(true, |(_, w)| r > w) {
            worst = Some((d.site, r));
        }
    }
    match worst {
        Some((site, r)) if r > 1.0 => format!(
            "; bare-coupled defect at site {site} exceeds the stability ceiling \
             (ratio {r:.2} > 1) -- use the screened coupling form"
        ),
        _ => String::new(),
    }
}

/// Diagonalize the model. Zero modes (e.g. the periodic translation mode)
/// are kept at zero frequency; genuinely negative curvature is an error.
pub fn ground_energy<R: Real + RealField>(
    model: &LatticeModel<R>,
) -> Result<SpectrumResult<R>, PolaritonError> {
    let m = build_quadratic_form(model)?;
    let model_hash = hash_matrix(&m);
    let eig = SymmetricEigen::new(m);
    let mut lambdas: Vec<R> = eig.eigenvalues.iter().copied().collect();
    lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = lambdas
        .iter()
        .fold(R::zero(), |acc, &l| Float::max(acc, Float::abs(l)));
    let tol = scale * R::lit(1e-10);
    if lambdas[0] < -tol {
        return Err(PolaritonError::UnstableModel {
            min_eigenvalue: lambdas[0].to_f64().unwrap_or(f64::NAN),
            hint: worst_bare_hint(model),
        });
    }
    let eigenfrequencies: Vec<R> = lambdas
        .iter()
        .map(|&l| Float::sqrt(Float::max(l, R::zero())))
        .collect();
    let mut acc = KahanSum::new();
    for &w in &eigenfrequencies {
        acc.add(w);
    }
    let ground_energy = R::lit(HBAR) * R::lit(0.5) * acc.value();
    Ok(SpectrumResult {
        eigenfrequencies,
        ground_energy,
        model_hash,
    })
}

/// Two identical probe defects embedded symmetrically in a clean chain,
/// evaluated as a function of their separation.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationFamily<R> {
    /// Chain template; must carry no defects of its own.
    pub chain: LatticeModel<R>,
    /// Probe template; its `site` field is ignored and overwritten.
    pub probe: Defect<R>,
}

impl<R: Real + RealField> SeparationFamily<R> {
    fn placed(&self, separation: usize) -> Result<LatticeModel<R>, PolaritonError> {
        if !self.chain.defects.is_empty() {
            return Err(PolaritonError::BadLattice(
                "separation-family chain template must have no defects".into(),
            ));
        }
        let n = self.chain.n_sites;
        if separation == 0 {
            return Err(PolaritonError::BadSeparation {
                separation,
                n_sites: n,
            });
        }
        let i1 = (n - separation.min(n)) / 2;
        let i2 = i1 + separation;
        // Probes must sit strictly inside the chain; scaling studies should
        // additionally leave generous clean padding outboard of each probe.
        if separation >= n || i1 < 1 || i2 > n - 2 {
            return Err(PolaritonError::BadSeparation {
                separation,
                n_sites: n,
            });
        }
        let mut model = self.chain.clone();
        for site in [i1, i2] {
            let mut probe = self.probe.clone();
            probe.site = site;
            model.defects.push(probe);
        }
        Ok(model)
    }

    /// Ground energy with the probes `separation` lattice sites apart.
    pub fn energy_at(&self, separation: usize) -> Result<R, PolaritonError> {
        // Decoupled probes leave the chain spectrum untouched: the quadratic
        // form is block diagonal, so the separation dependence is exactly
        // zero and no diagonalization is needed.
        if self.probe.coupling == R::zero() {
            self.placed(separation)?; // still validate geometry
            let mut chain_only = self.chain.clone();
            chain_only.defects.clear();
            let base = ground_energy(&chain_only)?.ground_energy;
            let mut probes = KahanSum::new();
            probes.add(self.probe.omega_m);
            probes.add(self.probe.omega_m);
            // Bath-dressed decoupled probes would need their own small
            // eigenproblem; keep the short-circuit to the bare case.
            if self.probe.bath.is_empty() {
                return Ok(base + R::lit(HBAR) * R::lit(0.5) * probes.value());
            }
        }
        Ok(ground_energy(&self.placed(separation)?)?.ground_energy)
    }

    /// Discrete Casimir-like force at `separation`:
    /// F = -[E(sep + 1) - E(sep)] / a, in newtons; negative = attraction.
    pub fn force_at(&self, separation: usize) -> Result<R, PolaritonError> {
        if self.probe.coupling == R::zero() && self.probe.bath.is_empty() {
            self.placed(separation + 1)?;
            return Ok(R::zero());
        }
        let e0 = self.energy_at(separation)?;
        let e1 = self.energy_at(separation + 1)?;
        Ok(-(e1 - e0) / self.chain.spacing)
    }

    /// Fit |F| ~ A d^-s over the given separations; returns (s, A) with d in
    /// meters. Requires at least 5 separations spanning a factor of 3 and
    /// forces of a single sign.
    pub fn scaling_exponent(&self, separations: &[usize]) -> Result<(R, R), PolaritonError> {
        if separations.len() < 5 {
            return Err(PolaritonError::BadScalingInput(format!(
                "{} separations",
                separations.len()
            )));
        }
        let lo = *separations.iter().min().unwrap();
        let hi = *separations.iter().max().unwrap();
        if lo == 0 || hi < 3 * lo {
            return Err(PolaritonError::BadScalingInput(format!(
                "range {lo}..{hi}"
            )));
        }
        let mut samples = Vec::with_capacity(separations.len());
        for &sep in separations {
            let f = self.force_at(sep)?;
            samples.push((R::from_usize(sep).unwrap() * self.chain.spacing, f));
        }
        let (slope, amp) = fit_power_law(&samples)?;
        Ok((-slope, amp))
    }
}

/// Continuum 1D Dirichlet benchmark the lattice model is compared against:
/// F(d) = -pi hbar c / (24 d^2), newtons.
pub fn continuum_force_1d<R: Real>(wave_speed: R, separation: R) -> R {
    -R::pi() * R::lit(HBAR) * wave_speed / (R::lit(24.0) * separation * separation)
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: f64 = 1e-9;

    fn w0() -> f64 {
        C / A
    }

    #[test]
    fn pinned_chain_spectrum_is_exact() {
        let model = LatticeModel::<f64>::new(8, A);
        let r = ground_energy(&model).unwrap();
        let n = 8usize;
        for (k, &w) in r.eigenfrequencies.iter().enumerate() {
            let exact =
                2.0 * w0() * (std::f64::consts::PI * (k + 1) as f64 / (2.0 * (n + 1) as f64)).sin();
            assert!((w - exact).abs() / exact < 1e-12, "mode {k}: {w} vs {exact}");
        }
    }

    #[test]
    fn periodic_chain_has_zero_mode_and_exact_spectrum() {
        let n = 9usize;
        let mut model = LatticeModel::<f64>::new(n, A);
        model.boundary = Boundary::Periodic;
        let r = ground_energy(&model).unwrap();
        let mut exact: Vec<f64> = (0..n)
            .map(|k| 2.0 * w0() * (std::f64::consts::PI * k as f64 / n as f64).sin().abs())
            .collect();
        exact.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(r.eigenfrequencies[0] < 1e-4 * w0());
        for (w, e) in r.eigenfrequencies.iter().zip(&exact).skip(1) {
            assert!((w - e).abs() / e < 1e-10);
        }
    }

    #[test]
    fn ground_energy_is_half_hbar_frequency_sum() {
        let model = LatticeModel::<f64>::new(16, A);
        let r = ground_energy(&model).unwrap();
        let sum: f64 = r.eigenfrequencies.iter().sum();
        assert!((r.ground_energy - 0.5 * HBAR * sum).abs() / r.ground_energy < 1e-14);
    }

    #[test]
    fn defect_spectrum_reflection_symmetric() {
        let make = |site: usize| {
            let mut m = LatticeModel::<f64>::new(32, A);
            m.defects.push(Defect {
                site,
                omega_m: 2.5 * w0(),
                coupling: 3.0 * w0() * w0(),
                form: CouplingForm::Screened,
                bath: vec![],
            });
            ground_energy(&m).unwrap()
        };
        let a = make(7);
        let b = make(32 - 1 - 7);
        for (x, y) in a.eigenfrequencies.iter().zip(&b.eigenfrequencies) {
            assert!((x - y).abs() <= 1e-9 * x.abs());
        }
    }

    #[test]
    fn bath_coupling_sign_is_a_gauge_choice() {
        let make = |sign: f64| {
            let mut m = LatticeModel::<f64>::new(24, A);
            m.defects.push(Defect {
                site: 11,
                omega_m: 2.0 * w0(),
                coupling: 1.5 * w0() * w0(),
                form: CouplingForm::Screened,
                bath: vec![BathOscillator {
                    omega: 0.8 * w0(),
                    coupling: sign * 0.3 * w0() * w0(),
                }],
            });
            ground_energy(&m).unwrap()
        };
        let plus = make(1.0);
        let minus = make(-1.0);
        for (x, y) in plus.eigenfrequencies.iter().zip(&minus.eigenfrequencies) {
            assert!((x - y).abs() <= 1e-10 * x.abs().max(w0()));
        }
    }

    #[test]
    fn strong_bare_coupling_is_flagged_unstable_with_hint() {
        let mut m = LatticeModel::<f64>::new(64, A);
        m.defects.push(Defect {
            site: 31,
            omega_m: 3.0 * w0(),
            coupling: 40.0 * w0() * w0(),
            form: CouplingForm::Bare,
            bath: vec![],
        });
        match ground_energy(&m) {
            Err(PolaritonError::UnstableModel { min_eigenvalue, hint }) => {
                assert!(min_eigenvalue < 0.0);
                assert!(hint.contains("site 31"), "hint: {hint}");
            }
            other => panic!("expected instability, got {other:?}"),
        }
        // The same strength in screened form is fine.
        m.defects[0].form = CouplingForm::Screened;
        assert!(ground_energy(&m).is_ok());
    }

    #[test]
    fn weak_bare_coupling_is_stable() {
        let mut m = LatticeModel::<f64>::new(64, A);
        m.defects.push(Defect {
            site: 31,
            omega_m: 3.0 * w0(),
            coupling: 0.5 * w0() * w0(),
            form: CouplingForm::Bare,
            bath: vec![],
        });
        assert!(ground_energy(&m).is_ok());
    }

    fn family(n: usize, coupling: f64) -> SeparationFamily<f64> {
        SeparationFamily {
            chain: LatticeModel::new(n, A),
            probe: Defect {
                site: 0,
                omega_m: 3.0 * w0(),
                coupling,
                form: CouplingForm::Screened,
                bath: vec![],
            },
        }
    }

    #[test]
    fn decoupled_probes_feel_exactly_no_force() {
        let fam = family(64, 0.0);
        assert_eq!(fam.force_at(8).unwrap(), 0.0);
        assert_eq!(fam.force_at(12).unwrap(), 0.0);
    }

    #[test]
    fn coupled_probes_attract_and_weaken_with_distance() {
        let fam = family(128, 40.0 * w0() * w0());
        let f8 = fam.force_at(8).unwrap();
        let f16 = fam.force_at(16).unwrap();
        let f24 = fam.force_at(24).unwrap();
        assert!(f8 < 0.0 && f16 < 0.0 && f24 < 0.0, "{f8} {f16} {f24}");
        assert!(f8.abs() > f16.abs() && f16.abs() > f24.abs());
    }

    #[test]
    fn separation_that_does_not_fit_is_rejected() {
        let fam = family(64, w0() * w0());
        assert!(matches!(
            fam.force_at(62),
            Err(PolaritonError::BadSeparation { .. })
        ));
        assert!(matches!(
            fam.force_at(0),
            Err(PolaritonError::BadSeparation { .. })
        ));
    }

    #[test]
    fn scaling_input_validation() {
        let fam = family(128, w0() * w0());
        assert!(matches!(
            fam.scaling_exponent(&[8, 10, 12]),
            Err(PolaritonError::BadScalingInput(_))
        ));
        assert!(matches!(
            fam.scaling_exponent(&[8, 9, 10, 11, 12]),
            Err(PolaritonError::BadScalingInput(_))
        ));
    }

    #[test]
    fn continuum_benchmark_value() {
        // d = 10 nm: F = -pi hbar c/(24 d^2) ~ -4.1 nN... check the formula
        // against a direct evaluation.
        let d = 1e-8;
        let f = continuum_force_1d(C, d);
        let expect = -std::f64::consts::PI * HBAR * C / (24.0 * d * d);
        assert_eq!(f, expect);
        assert!(f < 0.0);
    }

    #[test]
    fn invalid_models_rejected() {
        let mut m = LatticeModel::<f64>::new(1, A);
        assert!(matches!(
            ground_energy(&m),
            Err(PolaritonError::BadLattice(_))
        ));
        m = LatticeModel::new(8, -1.0);
        assert!(matches!(
            ground_energy(&m),
            Err(PolaritonError::BadLattice(_))
        ));
        m = LatticeModel::new(8, A);
        m.defects.push(Defect {
            site: 99,
            omega_m: w0(),
            coupling: 0.0,
            form: CouplingForm::Bare,
            bath: vec![],
        });
        assert!(matches!(
            ground_energy(&m),
            Err(PolaritonError::BadSite { site: 99, .. })
        ));
    }

    #[test]
    fn spectrum_hash_is_reproducible_and_parameter_sensitive() {
        let m = LatticeModel::<f64>::new(16, A);
        let a = ground_energy(&m).unwrap();
        let b = ground_energy(&m).unwrap();
        assert_eq!(a.model_hash, b.model_hash);
        let m2 = LatticeModel::<f64>::new(17, A);
        assert_ne!(a.model_hash, ground_energy(&m2).unwrap().model_hash);
    }
}
