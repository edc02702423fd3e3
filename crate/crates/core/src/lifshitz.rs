//! Lifshitz theory for two planar half-spaces separated by a vacuum gap.
//!
//! The force between real dielectric bodies is computed from their reflection
//! coefficients evaluated at imaginary frequencies: at zero temperature as a
//! double integral over imaginary frequency and transverse momentum, at
//! finite temperature as a sum over Matsubara frequencies
//! `xi_n = 2 pi n kB T / hbar` with the n = 0 term at half weight.
//!
//! Internally the integrals run over reduced variables `u = 2 kappa d`
//! (dimensionless round-trip phase) and `t = xi / (c kappa)`, which keeps the
//! integrands O(1) for every material and gap. Pressures are negative for
//! attraction; the reported value is the renormalized normal-normal stress in
//! the gap (the divergent free-space vacuum stress is already subtracted by
//! construction -- only the scattering part of the mode density enters).

use std::cell::{Cell, RefCell};

use thiserror::Error;

use crate::dielectric::{DielectricError, DielectricModel, StaticLimit};
use crate::quad::{integrate, QuadError};
use crate::real::{KahanSum, Real};
use crate::units::{C, HBAR, HBAR_C, KB};

/// Round-trip phase beyond which integrands are exponentially negligible;
/// the dropped tail is bounded analytically and folded into the error.
const U_CUT: f64 = 60.0;
/// Matsubara terms allowed before the sum is declared impractical.
const N_GUARD: usize = 10_000;
const MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Te,
    Tm,
}

/// Sign/normalization convention of the reported pressure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StressConvention {
    /// Net normal stress on either plate with the free-space vacuum stress
    /// subtracted; negative means the plates attract.
    RenormalizedNormal,
}

/// Two half-spaces facing each other across a vacuum gap (meters).
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCavity<R> {
    pub left: DielectricModel<R>,
    pub right: DielectricModel<R>,
    pub gap: R,
}

#[derive(Debug, Error)]
pub enum LifshitzError {
    #[error("gap must be finite and positive, got {0}")]
    BadGap(f64),
    #[error("temperature must be finite and nonnegative, got {0}")]
    BadTemperature(f64),
    #[error("wavevector and frequency must be nonnegative and not both zero")]
    BadWavevector,
    #[error(transparent)]
    Dielectric(#[from] DielectricError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(
        "Matsubara sum needs {needed} terms (spacing Delta = {delta:e}); below ~1 K-um this \
         route is impractical, use the zero-temperature evaluation instead"
    )]
    LowTemperature { needed: usize, delta: f64 },
}

/// Integration effort bookkeeping, aggregated over every panel of every
/// frequency term.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadratureDiagnostics<R> {
    pub evals: usize,
    pub panels: usize,
    /// Absolute error estimate on the pressure (Pa), including truncation.
    pub pressure_error: R,
    /// Absolute error estimate on the energy per area (J/m^2).
    pub energy_error: R,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifshitzResult<R> {
    /// Casimir pressure (Pa); negative = attractive.
    pub pressure: R,
    /// Energy per unit area at T = 0, free energy per unit area otherwise
    /// (J/m^2).
    pub energy_per_area: R,
    /// Temperature of the evaluation (K).
    pub temperature: R,
    /// Number of Matsubara terms actually summed (0 for the T = 0 route).
    pub matsubara_n_used: usize,
    pub quadrature: QuadratureDiagnostics<R>,
    pub stress_convention: StressConvention,
}

impl<R: Real> PlanarCavity<R> {
    pub fn validate(&self) -> Result<(), LifshitzError> {
        if !self.gap.is_finite() || self.gap <= R::zero() {
            return Err(LifshitzError::BadGap(self.gap.to_f64().unwrap_or(f64::NAN)));
        }
        self.left.validate()?;
        self.right.validate()?;
        Ok(())
    }
}

/// Fresnel reflection coefficient of a half-space at imaginary frequency
/// `xi` (rad/s) and transverse wavevector `k` (1/m), SI throughout.
///
/// `kappa = sqrt(k^2 + xi^2/c^2)` in the gap, `kappa_m` the same inside the
/// medium; TE is `(kappa - kappa_m)/(kappa + kappa_m)`, TM is
/// `(eps kappa - kappa_m)/(eps kappa + kappa_m)`. A perfect mirror returns
/// -1 (TE) and +1 (TM) without touching any permittivity.
pub fn reflection_coeff<R: Real>(
    model: &DielectricModel<R>,
    pol: Polarization,
    xi: R,
    k: R,
) -> Result<R, LifshitzError> {
    if !xi.is_finite() || !k.is_finite() || xi < R::zero() || k < R::zero()
        || (xi == R::zero() && k == R::zero())
    {
        return Err(LifshitzError::BadWavevector);
    }
    if let DielectricModel::PerfectMirror = model {
        return Ok(match pol {
            Polarization::Te => -R::one(),
            Polarization::Tm => R::one(),
        });
    }
    let c = R::lit(C);
    let q = xi / c;
    let eps = model.eval_eps_imag(xi)?;
    let kappa = (k * k + q * q).sqrt();
    let kappa_m = (k * k + eps * q * q).sqrt();
    Ok(match pol {
        Polarization::Te => (kappa - kappa_m) / (kappa + kappa_m),
        Polarization::Tm => (eps * kappa - kappa_m) / (eps * kappa + kappa_m),
    })
}

// ---------------------------------------------------------------------------
// Reduced-variable evaluation.
// ---------------------------------------------------------------------------

/// One side of the cavity at a fixed imaginary frequency.
#[derive(Clone, Copy)]
enum Side<R> {
    Mirror,
    Eps(R),
}

impl<R: Real> Side<R> {
    /// Reduced reflection coefficient at t = xi / (c kappa), via
    /// s = sqrt(1 + (eps - 1) t^2).
    fn r(&self, pol: Polarization, t: R) -> R {
        match self {
            Side::Mirror => match pol {
                Polarization::Te => -R::one(),
                Polarization::Tm => R::one(),
            },
            Side::Eps(eps) => {
                let s = (R::one() + (*eps - R::one()) * t * t).sqrt();
                match pol {
                    Polarization::Te => (R::one() - s) / (R::one() + s),
                    Polarization::Tm => (*eps - s) / (*eps + s),
                }
            }
        }
    }
}

/// One side of the cavity in the static (n = 0) limit; the metallic TE case
/// keeps a wavevector dependence through beta = 2 d omega_p / c.
#[derive(Clone, Copy)]
enum StaticSide<R> {
    Mirror,
    Dielectric { eps0: R },
    Metal { beta: R },
}

impl<R: Real> StaticSide<R> {
    fn from_limit(limit: StaticLimit<R>, gap: R) -> Self {
        match limit {
            StaticLimit::Mirror => StaticSide::Mirror,
            StaticLimit::Dielectric { eps0 } => StaticSide::Dielectric { eps0 },
            StaticLimit::Metal { plasma_sq } => StaticSide::Metal {
                beta: R::lit(2.0) * gap * plasma_sq.sqrt() / R::lit(C),
            },
        }
    }

    fn r(&self, pol: Polarization, u: R) -> R {
        match (self, pol) {
            (StaticSide::Mirror, Polarization::Te) => -R::one(),
            (StaticSide::Mirror, Polarization::Tm) => R::one(),
            (StaticSide::Dielectric { .. }, Polarization::Te) => R::zero(),
            (StaticSide::Dielectric { eps0 }, Polarization::Tm) => {
                (*eps0 - R::one()) / (*eps0 + R::one())
            }
            (StaticSide::Metal { beta }, Polarization::Te) => {
                let root = (u * u + *beta * *beta).sqrt();
                (u - root) / (u + root)
            }
            (StaticSide::Metal { .. }, Polarization::Tm) => R::one(),
        }
    }
}

/// Scattering kernel for the pressure: p e^-u / (1 - p e^-u) = p/(e^u - p).
#[inline]
fn kernel_g<R: Real>(p: R, u: R) -> R {
    p / (u.exp() - p)
}

/// Scattering kernel for the energy: ln(1 - p e^-u).
#[inline]
fn kernel_ln<R: Real>(p: R, u: R) -> R {
    (-p * (-u).exp()).ln_1p()
}

struct Effort<R> {
    evals: Cell<usize>,
    panels: Cell<usize>,
    err: RefCell<Option<LifshitzError>>,
    _marker: std::marker::PhantomData<R>,
}

impl<R: Real> Effort<R> {
    fn new() -> Self {
        Self {
            evals: Cell::new(0),
            panels: Cell::new(0),
            err: RefCell::new(None),
            _marker: std::marker::PhantomData,
        }
    }

    /// Run an inner quadrature inside an outer integrand: record effort,
    /// stash the first error and poison the outer integral with NaN.
    fn inner(&self, res: Result<crate::quad::QuadResult<R>, QuadError>) -> R {
        match res {
            Ok(q) => {
                self.evals.set(self.evals.get() + q.evals);
                self.panels.set(self.panels.get() + q.panels);
                q.value
            }
            Err(e) => {
                self.err.borrow_mut().get_or_insert(e.into());
                R::nan()
            }
        }
    }

    fn take_err(&self) -> Option<LifshitzError> {
        self.err.borrow_mut().take()
    }
}

fn side_at_xi<R: Real>(
    model: &DielectricModel<R>,
    xi: R,
) -> Result<Side<R>, LifshitzError> {
    if let DielectricModel::PerfectMirror = model {
        Ok(Side::Mirror)
    } else {
        Ok(Side::Eps(model.eval_eps_imag(xi)?))
    }
}

/// Zero-temperature Lifshitz evaluation to relative tolerance `rel_tol`.
pub fn lifshitz_zero_t<R: Real>(
    cavity: &PlanarCavity<R>,
    rel_tol: R,
) -> Result<LifshitzResult<R>, LifshitzError> {
    cavity.validate()?;
    let d = cavity.gap;
    let c_over_2d = R::lit(C) / (R::lit(2.0) * d);
    let inner_tol = rel_tol * R::lit(0.1);
    let effort = Effort::<R>::new();

    // Outer integral over u of u^q * inner(u), with the inner t-integral
    // summing both polarizations of the chosen kernel.
    let outer = |q: i32, use_g: bool| -> Result<crate::quad::QuadResult<R>, LifshitzError> {
        let res = integrate(
            |u: R| {
                let inner = integrate(
                    |t: R| {
                        let xi = c_over_2d * t * u;
                        let left = match side_at_xi(&cavity.left, xi) {
                            Ok(s) => s,
                            Err(e) => {
                                effort.err.borrow_mut().get_or_insert(e);
                                return R::nan();
                            }
                        };
                        let right = match side_at_xi(&cavity.right, xi) {
                            Ok(s) => s,
                            Err(e) => {
                                effort.err.borrow_mut().get_or_insert(e);
                                return R::nan();
                            }
                        };
                        let mut acc = R::zero();
                        for pol in [Polarization::Te, Polarization::Tm] {
                            let p = left.r(pol, t) * right.r(pol, t);
                            acc = acc
                                + if use_g {
                                    kernel_g(p, u)
                                } else {
                                    kernel_ln(p, u)
                                };
                        }
                        acc
                    },
                    R::zero(),
                    R::one(),
                    R::zero(),
                    inner_tol,
                    MAX_PANELS,
                );
                u.powi(q) * effort.inner(inner)
            },
            R::zero(),
            R::lit(U_CUT),
            R::zero(),
            rel_tol,
            MAX_PANELS,
        );
        if let Some(e) = effort.take_err() {
            return Err(e);
        }
        let q = res?;
        effort.evals.set(effort.evals.get() + q.evals);
        effort.panels.set(effort.panels.get() + q.panels);
        Ok(q)
    };

    let ip = outer(3, true)?;
    let ie = outer(2, false)?;

    // Dropped tail: |integrand| <= 2 u^q e^{U_CUT - u} * |integrand(U_CUT)|
    // is already astronomically small; bound with the ideal-mirror envelope.
    let ucut = U_CUT;
    let tail_p = R::lit(2.0 * (-ucut).exp() * (ucut.powi(3) + 3.0 * ucut.powi(2) + 6.0 * ucut + 6.0));
    let tail_e = R::lit(2.0 * (-ucut).exp() * (ucut.powi(2) + 2.0 * ucut + 2.0));

    let hc = R::lit(HBAR_C);
    let d2 = d * d;
    let pref_p = -hc / (R::lit(32.0) * R::pi() * R::pi() * d2 * d2);
    let pref_e = hc / (R::lit(32.0) * R::pi() * R::pi() * d2 * d);

    Ok(LifshitzResult {
        pressure: pref_p * ip.value,
        energy_per_area: pref_e * ie.value,
        temperature: R::zero(),
        matsubara_n_used: 0,
        quadrature: QuadratureDiagnostics {
            evals: effort.evals.get(),
            panels: effort.panels.get(),
            pressure_error: pref_p.abs() * (ip.error + tail_p),
            energy_error: pref_e.abs() * (ie.error + tail_e),
        },
        stress_convention: StressConvention::RenormalizedNormal,
    })
}

/// Finite-temperature Lifshitz evaluation (Matsubara sum) to relative
/// tolerance `rel_tol`. Temperatures low enough to need more than 10^4 terms
/// are rejected; use [`lifshitz_zero_t`] there.
pub fn lifshitz_finite_t<R: Real>(
    cavity: &PlanarCavity<R>,
    temperature: R,
    rel_tol: R,
) -> Result<LifshitzResult<R>, LifshitzError> {
    cavity.validate()?;
    if !temperature.is_finite() || temperature <= R::zero() {
        return Err(LifshitzError::BadTemperature(
            temperature.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let d = cavity.gap;
    // Matsubara spacing in the reduced variable: u_n = n * delta.
    let delta = R::lit(4.0) * R::pi() * d * R::lit(KB) * temperature / R::lit(HBAR_C);
    let n_max = (R::lit(U_CUT) / delta)
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
        .max(1);
    if n_max > N_GUARD {
        return Err(LifshitzError::LowTemperature {
            needed: n_max,
            delta: delta.to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut evals = 0usize;
    let mut panels = 0usize;
    let mut err_p = KahanSum::new();
    let mut err_e = KahanSum::new();
    let mut sum_p = KahanSum::new();
    let mut sum_e = KahanSum::new();

    let term_tol = rel_tol * R::lit(0.1);
    let mut track = |q: crate::quad::QuadResult<R>, err: &mut KahanSum<R>| -> R {
        evals += q.evals;
        panels += q.panels;
        err.add(q.error);
        q.value
    };

    // n = 0 at half weight, with the static-limit reflection coefficients.
    {
        let left = StaticSide::from_limit(cavity.left.static_limit()?, d);
        let right = StaticSide::from_limit(cavity.right.static_limit()?, d);
        let both = |u: R, use_g: bool| {
            let mut acc = R::zero();
            for pol in [Polarization::Te, Polarization::Tm] {
                let p = left.r(pol, u) * right.r(pol, u);
                acc = acc + if use_g { kernel_g(p, u) } else { kernel_ln(p, u) };
            }
            acc
        };
        let i0 = track(
            integrate(
                |u: R| u * u * both(u, true),
                R::zero(),
                R::lit(U_CUT),
                R::zero(),
                term_tol,
                MAX_PANELS,
            )?,
            &mut err_p,
        );
        let j0 = track(
            integrate(
                |u: R| u * both(u, false),
                R::zero(),
                R::lit(U_CUT),
                R::zero(),
                term_tol,
                MAX_PANELS,
            )?,
            &mut err_e,
        );
        sum_p.add(R::lit(0.5) * i0);
        sum_e.add(R::lit(0.5) * j0);
    }

    // n >= 1: the permittivities are fixed per term, so evaluate them once.
    let hbar = R::lit(HBAR);
    let mut last_p = R::zero();
    let mut last_e = R::zero();
    for n in 1..=n_max {
        let u_n = delta * R::from_usize(n).unwrap();
        let xi_n = R::lit(2.0) * R::pi() * R::from_usize(n).unwrap() * R::lit(KB) * temperature
            / hbar;
        let left = side_at_xi(&cavity.left, xi_n)?;
        let right = side_at_xi(&cavity.right, xi_n)?;
        let both = |u: R, use_g: bool| {
            let t = u_n / u;
            let mut acc = R::zero();
            for pol in [Polarization::Te, Polarization::Tm] {
                let p = left.r(pol, t) * right.r(pol, t);
                acc = acc + if use_g { kernel_g(p, u) } else { kernel_ln(p, u) };
            }
            acc
        };
        let hi = u_n + R::lit(U_CUT);
        let i_n = track(
            integrate(
                |u: R| u * u * both(u, true),
                u_n,
                hi,
                R::zero(),
                term_tol,
                MAX_PANELS,
            )?,
            &mut err_p,
        );
        let j_n = track(
            integrate(|u: R| u * both(u, false), u_n, hi, R::zero(), term_tol, MAX_PANELS)?,
            &mut err_e,
        );
        sum_p.add(i_n);
        sum_e.add(j_n);
        last_p = i_n;
        last_e = j_n;
    }

    // Geometric bound on the dropped n > n_max terms (each term carries at
    // least an extra e^{-delta} relative to its predecessor).
    let rho = (-delta * R::lit(0.5)).exp().min(R::lit(0.9));
    err_p.add(last_p.abs() * rho / (R::one() - rho));
    err_e.add(last_e.abs() * rho / (R::one() - rho));

    let kbt = R::lit(KB) * temperature;
    let d3 = d * d * d;
    let pref_p = -kbt / (R::lit(8.0) * R::pi() * d3);
    let pref_e = kbt / (R::lit(8.0) * R::pi() * d * d);

    Ok(LifshitzResult {
        pressure: pref_p * sum_p.value(),
        energy_per_area: pref_e * sum_e.value(),
        temperature,
        matsubara_n_used: n_max,
        quadrature: QuadratureDiagnostics {
            evals,
            panels,
            pressure_error: pref_p.abs() * err_p.value(),
            energy_error: pref_e.abs() * err_e.value(),
        },
        stress_convention: StressConvention::RenormalizedNormal,
    })
}

/// Dispatch on temperature: exactly zero selects the T = 0 route.
pub fn lifshitz<R: Real>(
    cavity: &PlanarCavity<R>,
    temperature: R,
    rel_tol: R,
) -> Result<LifshitzResult<R>, LifshitzError> {
    if temperature == R::zero() {
        lifshitz_zero_t(cavity, rel_tol)
    } else {
        lifshitz_finite_t(cavity, temperature, rel_tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: f64 = 1e-6;
    const TOL: f64 = 1e-8;
    const ZETA3: f64 = 1.2020569031595943;

    fn mirrors() -> PlanarCavity<f64> {
        PlanarCavity {
            left: DielectricModel::PerfectMirror,
            right: DielectricModel::PerfectMirror,
            gap: D,
        }
    }

    fn eps2() -> PlanarCavity<f64> {
        PlanarCavity {
            left: DielectricModel::ConstantEps { eps: 2.0 },
            right: DielectricModel::ConstantEps { eps: 2.0 },
            gap: D,
        }
    }

    #[test]
    fn fresnel_hand_values() {
        // eps = 4, xi = c k: kappa = k sqrt2, kappa_m = k sqrt5.
        let k = 1e6;
        let xi = C * k;
        let m = DielectricModel::ConstantEps { eps: 4.0 };
        let te = reflection_coeff(&m, Polarization::Te, xi, k).unwrap();
        let tm = reflection_coeff(&m, Polarization::Tm, xi, k).unwrap();
        let s2 = 2f64.sqrt();
        let s5 = 5f64.sqrt();
        assert!((te - (s2 - s5) / (s2 + s5)).abs() < 1e-14);
        assert!((tm - (4.0 * s2 - s5) / (4.0 * s2 + s5)).abs() < 1e-14);
    }

    #[test]
    fn mirror_reflections_are_unimodular() {
        let m = DielectricModel::<f64>::PerfectMirror;
        assert_eq!(reflection_coeff(&m, Polarization::Te, 1e15, 1e6).unwrap(), -1.0);
        assert_eq!(reflection_coeff(&m, Polarization::Tm, 1e15, 1e6).unwrap(), 1.0);
    }

    #[test]
    fn vacuum_does_not_reflect() {
        let m = DielectricModel::<f64>::Vacuum;
        for pol in [Polarization::Te, Polarization::Tm] {
            assert!(reflection_coeff(&m, pol, 1e15, 1e6).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn bad_wavevector_rejected() {
        let m = DielectricModel::<f64>::Vacuum;
        assert!(matches!(
            reflection_coeff(&m, Polarization::Te, 0.0, 0.0),
            Err(LifshitzError::BadWavevector)
        ));
        assert!(matches!(
            reflection_coeff(&m, Polarization::Te, -1.0, 1.0),
            Err(LifshitzError::BadWavevector)
        ));
    }

    #[test]
    fn ideal_mirrors_recover_zero_t_closed_form() {
        let r = lifshitz_zero_t(&mirrors(), TOL).unwrap();
        let pi = std::f64::consts::PI;
        let p_exact = -pi * pi * HBAR_C / (240.0 * D.powi(4));
        let e_exact = -pi * pi * HBAR_C / (720.0 * D.powi(3));
        assert!((r.pressure - p_exact).abs() / p_exact.abs() < 1e-7, "{}", r.pressure);
        assert!((r.energy_per_area - e_exact).abs() / e_exact.abs() < 1e-7);
        assert!((r.pressure + 1.3001257724e-3).abs() < 1e-10);
        assert_eq!(r.matsubara_n_used, 0);
    }

    #[test]
    fn dielectric_reduction_factor_eps_two() {
        // Frozen by an independent dense-grid double quadrature.
        let eta = 0.03902693372713184;
        let mirror = lifshitz_zero_t(&mirrors(), TOL).unwrap();
        let diel = lifshitz_zero_t(&eps2(), TOL).unwrap();
        let ratio = diel.pressure / mirror.pressure;
        assert!((ratio - eta).abs() / eta < 1e-6, "ratio = {ratio}");
        assert!((diel.pressure + 5.0740e-5).abs() / 5.0740e-5 < 1e-4);
    }

    #[test]
    fn pressure_energy_consistent_via_gap_derivative() {
        // P = -d(E/A)/dd by central difference, dielectric cavity so the
        // check is not just the mirror power law.
        let h = 1e-3 * D;
        let mut cav = eps2();
        cav.gap = D + h;
        let ep = lifshitz_zero_t(&cav, 1e-10).unwrap().energy_per_area;
        cav.gap = D - h;
        let em = lifshitz_zero_t(&cav, 1e-10).unwrap().energy_per_area;
        let p_fd = -(ep - em) / (2.0 * h);
        let p = lifshitz_zero_t(&eps2(), 1e-10).unwrap().pressure;
        assert!((p - p_fd).abs() / p.abs() < 1e-5, "p={p} fd={p_fd}");
    }

    #[test]
    fn classical_limit_ideal_mirrors() {
        // Delta ~ 30: only n = 0 survives; P -> -zeta(3) kB T / (4 pi d^3).
        let t = 30.0 * HBAR_C / (4.0 * std::f64::consts::PI * D * KB);
        let r = lifshitz_finite_t(&mirrors(), t, 1e-10).unwrap();
        let p_classical = -ZETA3 * KB * t / (4.0 * std::f64::consts::PI * D.powi(3));
        assert!((r.pressure - p_classical).abs() / p_classical.abs() < 1e-9);
        // J0 = 2 * integral of u ln(1-e^-u) = -2 zeta(3); at half weight the
        // free energy is F/A = -zeta(3) kB T / (8 pi d^2).
        let f_classical = -ZETA3 * KB * t / (8.0 * std::f64::consts::PI * D * D);
        assert!((r.energy_per_area - f_classical).abs() / f_classical.abs() < 1e-9);
    }

    #[test]
    fn classical_drude_is_half_of_ideal() {
        let t = 30.0 * HBAR_C / (4.0 * std::f64::consts::PI * D * KB);
        let drude = PlanarCavity {
            left: DielectricModel::Drude {
                omega_p: 1.4e16,
                gamma: 5.3e13,
            },
            right: DielectricModel::Drude {
                omega_p: 1.4e16,
                gamma: 5.3e13,
            },
            gap: D,
        };
        let rd = lifshitz_finite_t(&drude, t, 1e-10).unwrap();
        let rm = lifshitz_finite_t(&mirrors(), t, 1e-10).unwrap();
        let ratio = rd.pressure / rm.pressure;
        assert!((ratio - 0.5).abs() < 1e-6, "ratio = {ratio}");
    }

    #[test]
    fn plasma_classical_te_term_bridges_drude_and_mirror() {
        // Plasma keeps part of the n = 0 TE reflection, so classically it
        // sits strictly between Drude (1/2) and ideal mirrors (1).
        let t = 30.0 * HBAR_C / (4.0 * std::f64::consts::PI * D * KB);
        let plasma = PlanarCavity {
            left: DielectricModel::Plasma { omega_p: 1.4e16 },
            right: DielectricModel::Plasma { omega_p: 1.4e16 },
            gap: D,
        };
        let rp = lifshitz_finite_t(&plasma, t, 1e-10).unwrap();
        let rm = lifshitz_finite_t(&mirrors(), t, 1e-10).unwrap();
        let ratio = rp.pressure / rm.pressure;
        assert!(ratio > 0.5 && ratio < 1.0, "ratio = {ratio}");
        assert!(ratio > 0.9, "large beta should be near the mirror value");
    }

    #[test]
    fn finite_t_approaches_zero_t_as_t_drops() {
        let r0 = lifshitz_zero_t(&mirrors(), 1e-9).unwrap();
        let r10 = lifshitz_finite_t(&mirrors(), 10.0, 1e-9).unwrap();
        assert!((r10.pressure - r0.pressure).abs() / r0.pressure.abs() < 1e-3);
        assert!(r10.matsubara_n_used > 100);
    }

    #[test]
    fn too_cold_is_rejected_with_guidance() {
        match lifshitz_finite_t(&mirrors(), 0.5, TOL) {
            Err(LifshitzError::LowTemperature { needed, .. }) => assert!(needed > N_GUARD),
            other => panic!("expected LowTemperature, got {other:?}"),
        }
    }

    #[test]
    fn dispatch_on_zero_temperature() {
        let a = lifshitz(&mirrors(), 0.0, TOL).unwrap();
        assert_eq!(a.temperature, 0.0);
        assert_eq!(a.matsubara_n_used, 0);
        let b = lifshitz(&mirrors(), 300.0, TOL).unwrap();
        assert!(b.matsubara_n_used > 0);
    }

    #[test]
    fn invalid_inputs_rejected() {
        let mut cav = mirrors();
        cav.gap = 0.0;
        assert!(matches!(
            lifshitz_zero_t(&cav, TOL),
            Err(LifshitzError::BadGap(_))
        ));
        assert!(matches!(
            lifshitz_finite_t(&mirrors(), -1.0, TOL),
            Err(LifshitzError::BadTemperature(_))
        ));
        let bad = PlanarCavity {
            left: DielectricModel::Drude {
                omega_p: 1e16,
                gamma: -1.0,
            },
            right: DielectricModel::PerfectMirror,
            gap: D,
        };
        assert!(matches!(
            lifshitz_zero_t(&bad, TOL),
            Err(LifshitzError::Dielectric(_))
        ));
    }

    #[test]
    fn asymmetric_cavity_is_order_independent() {
        let a = PlanarCavity {
            left: DielectricModel::ConstantEps { eps: 2.0 },
            right: DielectricModel::PerfectMirror,
            gap: D,
        };
        let b = PlanarCavity {
            left: DielectricModel::PerfectMirror,
            right: DielectricModel::ConstantEps { eps: 2.0 },
            gap: D,
        };
        let pa = lifshitz_zero_t(&a, TOL).unwrap().pressure;
        let pb = lifshitz_zero_t(&b, TOL).unwrap().pressure;
        assert!((pa - pb).abs() / pa.abs() < 1e-12);
        // And strictly between the symmetric extremes.
        let pm = lifshitz_zero_t(&mirrors(), TOL).unwrap().pressure;
        let pd = lifshitz_zero_t(&eps2(), TOL).unwrap().pressure;
        assert!(pa.abs() > pd.abs() && pa.abs() < pm.abs());
    }

    #[test]
    fn drude_at_room_temperature_is_attractive_and_weaker_than_mirrors() {
        let drude = PlanarCavity {
            left: DielectricModel::Drude {
                omega_p: 1.4e16,
                gamma: 5.3e13,
            },
            right: DielectricModel::Drude {
                omega_p: 1.4e16,
                gamma: 5.3e13,
            },
            gap: D,
        };
        let rd = lifshitz_finite_t(&drude, 300.0, 1e-7).unwrap();
        let rm = lifshitz_finite_t(&mirrors(), 300.0, 1e-7).unwrap();
        assert!(rd.pressure < 0.0);
        assert!(rd.pressure.abs() < rm.pressure.abs());
        assert!(rd.energy_per_area < 0.0);
    }
}
