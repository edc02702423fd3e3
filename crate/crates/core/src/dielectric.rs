//! Dielectric response models evaluable on the positive imaginary frequency
//! axis, including ingestion of tabulated real-frequency absorption data.
//!
//! On the imaginary axis every passive model is real, ≥ 1, and monotonically
//! decreasing toward 1, which is what makes the Lifshitz integrals well
//! behaved. Tabulated data is carried over to the imaginary axis with the
//! Kramers-Kronig integral
//!
//! ```text
//! eps(i xi) = 1 + (2/pi) ∫_0^∞ w Im eps(w) / (w^2 + xi^2) dw
//! ```

use std::io::BufRead;
use std::path::Path;

use thiserror::Error;

use crate::real::Real;

/// Default relative tolerance when a `Tabulated` model is evaluated through
/// [`DielectricModel::eval_eps_imag`].
pub const DEFAULT_KK_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum DielectricError {
    #[error("imaginary frequency must be positive, got {0}")]
    NonpositiveFrequency(f64),
    #[error("perfect mirror has no permittivity; use the reflection-coefficient shortcut")]
    PerfectMirror,
    #[error("invalid model parameter: {0}")]
    InvalidModel(String),
    #[error("tabulated grid error at line {line}: {message}")]
    BadTable { line: usize, message: String },
    #[error(
        "Kramers-Kronig quadrature did not reach tolerance {tolerance:e}: \
         achieved estimate {achieved:e} with error estimate {error_estimate:e} \
         (grid too sparse)"
    )]
    Convergence {
        achieved: f64,
        error_estimate: f64,
        tolerance: f64,
    },
    #[error("model {0} has no closed-form absorption spectrum")]
    NoAbsorptionSpectrum(String),
    #[error("i/o error reading optical data: {0}")]
    Io(#[from] std::io::Error),
}

/// One Lorentz absorption line: resonance, plasma (strength) and damping
/// frequencies, all rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzOscillator<R> {
    pub omega_0: R,
    pub plasma: R,
    pub gamma: R,
}

/// Validated table of (omega [rad/s], Im eps) samples, strictly increasing in
/// omega with nonnegative Im eps (passivity).
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedData<R> {
    omega: Vec<R>,
    im_eps: Vec<R>,
}

/// Treatment of the absorption spectrum beyond the last grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailModel {
    /// Im eps ∝ w^-3 matched to the last sample (Drude-like high-frequency
    /// behaviour); integrated in closed form.
    #[default]
    InverseCube,
    /// No absorption beyond the grid.
    Truncate,
}

impl<R: Real> TabulatedData<R> {
    /// Build from (omega, Im eps) pairs, validating passivity and ordering.
    /// Reported "line" numbers are 1-based point indices.
    pub fn new(points: Vec<(R, R)>) -> Result<Self, DielectricError> {
        Self::from_labeled(
            points
                .into_iter()
                .enumerate()
                .map(|(i, (w, e))| (i + 1, w, e))
                .collect(),
        )
    }

    /// As [`Self::new`], with an explicit source-line label per point.
    fn from_labeled(points: Vec<(usize, R, R)>) -> Result<Self, DielectricError> {
        if points.len() < 2 {
            return Err(DielectricError::InvalidModel(format!(
                "tabulated data needs at least 2 points, got {}",
                points.len()
            )));
        }
        let mut omega = Vec::with_capacity(points.len());
        let mut im_eps = Vec::with_capacity(points.len());
        for (line, w, e) in points {
            if !w.is_finite() || w <= R::zero() {
                return Err(DielectricError::BadTable {
                    line,
                    message: "omega must be finite and positive".into(),
                });
            }
            if let Some(prev) = omega.last() {
                if w <= *prev {
                    return Err(DielectricError::BadTable {
                        line,
                        message: "omega grid must be strictly increasing".into(),
                    });
                }
            }
            if !e.is_finite() || e < R::zero() {
                return Err(DielectricError::BadTable {
                    line,
                    message: "Im eps must be finite and nonnegative (passivity)".into(),
                });
            }
            omega.push(w);
            im_eps.push(e);
        }
        Ok(Self { omega, im_eps })
    }

    /// Parse the two-column text format: `omega_rad_per_s  im_eps`, blank
    /// lines and `#` comments allowed, first column strictly increasing.
    pub fn from_reader(reader: impl BufRead) -> Result<Self, DielectricError> {
        let mut points = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut cols = body.split_whitespace();
            let parse = |tok: Option<&str>, what: &str| -> Result<R, DielectricError> {
                let tok = tok.ok_or_else(|| DielectricError::BadTable {
                    line: idx + 1,
                    message: format!("missing {what} column"),
                })?;
                let v: f64 = tok.parse().map_err(|_| DielectricError::BadTable {
                    line: idx + 1,
                    message: format!("cannot parse {what} value {tok:?}"),
                })?;
                Ok(R::lit(v))
            };
            let w = parse(cols.next(), "omega")?;
            let e = parse(cols.next(), "im_eps")?;
            if cols.next().is_some() {
                return Err(DielectricError::BadTable {
                    line: idx + 1,
                    message: "expected exactly two columns".into(),
                });
            }
            points.push((idx + 1, w, e));
        }
        Self::from_labeled(points)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, DielectricError> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(std::io::BufReader::new(file))
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn omega(&self) -> &[R] {
        &self.omega
    }

    pub fn im_eps(&self) -> &[R] {
        &self.im_eps
    }
}

/// Dielectric response model; `PerfectMirror` bypasses permittivity entirely
/// and is handled by the reflection-coefficient shortcut in the Lifshitz
/// module.
#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel<R> {
    Vacuum,
    ConstantEps { eps: R },
    Plasma { omega_p: R },
    Drude { omega_p: R, gamma: R },
    LorentzOscillators(Vec<LorentzOscillator<R>>),
    PerfectMirror,
    Tabulated(TabulatedData<R>),
}

impl<R: Real> DielectricModel<R> {
    /// Check the model invariants; called by consumers at ingestion so that
    /// bad parameters fail loudly instead of being silently corrected.
    pub fn validate(&self) -> Result<(), DielectricError> {
        let positive = |v: R, what: &str| -> Result<(), DielectricError> {
            if !v.is_finite() || v <= R::zero() {
                Err(DielectricError::InvalidModel(format!(
                    "{what} must be finite and strictly positive, got {v:?}"
                )))
            } else {
                Ok(())
            }
        };
        match self {
            Self::Vacuum | Self::PerfectMirror => Ok(()),
            Self::ConstantEps { eps } => {
                if !eps.is_finite() || *eps < R::one() {
                    Err(DielectricError::InvalidModel(format!(
                        "constant eps must be >= 1, got {eps:?}"
                    )))
                } else {
                    Ok(())
                }
            }
            Self::Plasma { omega_p } => positive(*omega_p, "plasma frequency"),
            Self::Drude { omega_p, gamma } => {
                positive(*omega_p, "plasma frequency")?;
                positive(*gamma, "Drude relaxation rate")
            }
            Self::LorentzOscillators(oscs) => {
                if oscs.is_empty() {
                    return Err(DielectricError::InvalidModel(
                        "Lorentz model needs at least one oscillator".into(),
                    ));
                }
                for o in oscs {
                    positive(o.omega_0, "Lorentz resonance frequency")?;
                    positive(o.plasma, "Lorentz oscillator strength")?;
                    positive(o.gamma, "Lorentz damping rate")?;
                }
                Ok(())
            }
            Self::Tabulated(_) => Ok(()), // validated at construction
        }
    }

    /// Permittivity at imaginary frequency, eps(i xi).
    ///
    /// Real and ≥ 1 for every passive model; decreases toward 1 as xi grows.
    pub fn eval_eps_imag(&self, xi: R) -> Result<R, DielectricError> {
        if !xi.is_finite() || xi <= R::zero() {
            return Err(DielectricError::NonpositiveFrequency(
                xi.to_f64().unwrap_or(f64::NAN),
            ));
        }
        match self {
            Self::Vacuum => Ok(R::one()),
            Self::ConstantEps { eps } => Ok(*eps),
            Self::Plasma { omega_p } => Ok(R::one() + *omega_p * *omega_p / (xi * xi)),
            Self::Drude { omega_p, gamma } => {
                Ok(R::one() + *omega_p * *omega_p / (xi * (xi + *gamma)))
            }
            Self::LorentzOscillators(oscs) => {
                let mut eps = R::one();
                for o in oscs {
                    eps = eps
                        + o.plasma * o.plasma / (o.omega_0 * o.omega_0 + xi * xi + o.gamma * xi);
                }
                Ok(eps)
            }
            Self::PerfectMirror => Err(DielectricError::PerfectMirror),
            Self::Tabulated(data) => {
                kramers_kronig_to_imag(data, xi, R::lit(DEFAULT_KK_TOL), TailModel::default())
            }
        }
    }

    /// Closed-form absorption spectrum Im eps(omega) on the real axis, where
    /// one exists; used to generate tabulated data.
    pub fn im_eps_real_axis(&self, omega: R) -> Result<R, DielectricError> {
        if !omega.is_finite() || omega <= R::zero() {
            return Err(DielectricError::NonpositiveFrequency(
                omega.to_f64().unwrap_or(f64::NAN),
            ));
        }
        match self {
            Self::Vacuum | Self::ConstantEps { .. } => Ok(R::zero()),
            Self::Drude { omega_p, gamma } => {
                // Im[1 - wp^2/(w(w + i g))] = wp^2 g / (w (w^2 + g^2))
                Ok(*omega_p * *omega_p * *gamma / (omega * (omega * omega + *gamma * *gamma)))
            }
            Self::LorentzOscillators(oscs) => {
                let mut im = R::zero();
                for o in oscs {
                    let d = o.omega_0 * o.omega_0 - omega * omega;
                    let denom = d * d + o.gamma * o.gamma * omega * omega;
                    im = im + o.plasma * o.plasma * o.gamma * omega / denom;
                }
                Ok(im)
            }
            Self::Plasma { .. } => Err(DielectricError::NoAbsorptionSpectrum(
                "plasma (lossless)".into(),
            )),
            Self::PerfectMirror => Err(DielectricError::PerfectMirror),
            Self::Tabulated(_) => Err(DielectricError::NoAbsorptionSpectrum("tabulated".into())),
        }
    }

    /// Sample the closed-form absorption spectrum onto a grid.
    pub fn tabulate(&self, grid: &[R]) -> Result<TabulatedData<R>, DielectricError> {
        let points = grid
            .iter()
            .map(|&w| Ok((w, self.im_eps_real_axis(w)?)))
            .collect::<Result<Vec<_>, DielectricError>>()?;
        TabulatedData::new(points)
    }

    /// Short human-readable tag used in CLI output.
    pub fn name(&self) -> String {
        match self {
            Self::Vacuum => "vacuum".into(),
            Self::ConstantEps { eps } => format!("constant({eps})"),
            Self::Plasma { omega_p } => format!("plasma({omega_p:e})"),
            Self::Drude { omega_p, gamma } => format!("drude({omega_p:e},{gamma:e})"),
            Self::LorentzOscillators(o) => format!("lorentz[{}]", o.len()),
            Self::PerfectMirror => "perfect_mirror".into(),
            Self::Tabulated(t) => format!("tabulated[{}]", t.len()),
        }
    }

    /// Static (xi -> 0+) response classification, used for the n = 0
    /// Matsubara term. The Drude limit is taken inside the reflection
    /// coefficient: lim xi->0 of xi^2 eps(i xi) is 0 for Drude (gamma > 0)
    /// but omega_p^2 for plasma, which is what splits their thermal TE terms.
    pub(crate) fn static_limit(&self) -> Result<StaticLimit<R>, DielectricError> {
        match self {
            Self::PerfectMirror => Ok(StaticLimit::Mirror),
            Self::Vacuum => Ok(StaticLimit::Dielectric { eps0: R::one() }),
            Self::ConstantEps { eps } => Ok(StaticLimit::Dielectric { eps0: *eps }),
            Self::Plasma { omega_p } => Ok(StaticLimit::Metal {
                plasma_sq: *omega_p * *omega_p,
            }),
            Self::Drude { .. } => Ok(StaticLimit::Metal {
                plasma_sq: R::zero(),
            }),
            Self::LorentzOscillators(oscs) => {
                let mut eps0 = R::one();
                for o in oscs {
                    eps0 = eps0 + o.plasma * o.plasma / (o.omega_0 * o.omega_0);
                }
                Ok(StaticLimit::Dielectric { eps0 })
            }
            Self::Tabulated(data) => {
                // Evaluate the KK integral well below the grid; diverging
                // (Drude-like) tables saturate the reflection limits the same
                // way a true metal does.
                let xi = data.omega()[0] * R::lit(1e-2);
                let eps0 =
                    kramers_kronig_to_imag(data, xi, R::lit(DEFAULT_KK_TOL), TailModel::default())?;
                Ok(StaticLimit::Dielectric { eps0 })
            }
        }
    }
}

/// Zero-frequency response class for Matsubara n = 0 reflection limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum StaticLimit<R> {
    Mirror,
    Dielectric { eps0: R },
    /// eps(i xi) xi^2 -> plasma_sq as xi -> 0 while eps itself diverges.
    Metal { plasma_sq: R },
}

/// Kramers-Kronig transform of tabulated absorption data to the imaginary
/// axis: `1 + (2/pi) ∫ w Im eps(w)/(w^2 + xi^2) dw`, trapezoid over the grid
/// plus the configured tail treatment.
///
/// The error estimate compares the full-grid trapezoid against the
/// half-resolution one; if it exceeds `tol` (relative) the grid is too sparse
/// and a convergence error carrying the achieved estimate is returned.
pub fn kramers_kronig_to_imag<R: Real>(
    data: &TabulatedData<R>,
    xi: R,
    tol: R,
    tail: TailModel,
) -> Result<R, DielectricError> {
    if !xi.is_finite() || xi <= R::zero() {
        return Err(DielectricError::NonpositiveFrequency(
            xi.to_f64().unwrap_or(f64::NAN),
        ));
    }
    if !tol.is_finite() || tol <= R::zero() {
        return Err(DielectricError::InvalidModel(format!(
            "tolerance must be positive, got {tol:?}"
        )));
    }
    let w = data.omega();
    let e = data.im_eps();
    let xi2 = xi * xi;
    let g: Vec<R> = w
        .iter()
        .zip(e)
        .map(|(&wi, &ei)| wi * ei / (wi * wi + xi2))
        .collect();

    let trapezoid = |stride: usize| -> R {
        let mut acc = R::zero();
        let mut i = 0;
        let half = R::lit(0.5);
        loop {
            let j = (i + stride).min(w.len() - 1);
            if j == i {
                break;
            }
            acc = acc + half * (g[i] + g[j]) * (w[j] - w[i]);
            i = j;
        }
        acc
    };

    let fine = trapezoid(1);
    let coarse = trapezoid(2);
    // Trapezoid halving: error ~ |fine - coarse| / 3.
    let quad_err = (fine - coarse).abs() / R::lit(3.0);

    // Head segment [0, w_0]: extrapolate the integrand linearly to 0 from the
    // first two samples, clamped nonnegative.
    let head = {
        let slope = (g[1] - g[0]) / (w[1] - w[0]);
        let g0 = (g[0] - slope * w[0]).max(R::zero());
        R::lit(0.5) * (g0 + g[0]) * w[0]
    };

    // Tail beyond the last point.
    let tail_val = match tail {
        TailModel::Truncate => R::zero(),
        TailModel::InverseCube => {
            let wn = *w.last().unwrap();
            let en = *e.last().unwrap();
            // Im eps = A / w^3 with A matched at the last sample:
            // ∫_W^∞ A/(w^2 (w^2 + xi^2)) dw, closed form; series branch when
            // xi << W to avoid cancellation.
            let a = en * wn * wn * wn;
            let ratio = xi / wn;
            if ratio < R::lit(1e-3) {
                let w3 = wn * wn * wn;
                let w5 = w3 * wn * wn;
                a * (R::one() / (R::lit(3.0) * w3) - xi2 / (R::lit(5.0) * w5))
            } else {
                let half_pi = R::pi() * R::lit(0.5);
                a / xi2 * (R::one() / wn - (half_pi - (wn / xi).atan()) / xi)
            }
        }
    };

    let integral = fine + head + tail_val;
    let two_over_pi = R::lit(2.0) / R::pi();
    let value = R::one() + two_over_pi * integral;
    let rel_err = two_over_pi * quad_err / value.abs().max(R::one());
    if rel_err > tol {
        return Err(DielectricError::Convergence {
            achieved: value.to_f64().unwrap_or(f64::NAN),
            error_estimate: rel_err.to_f64().unwrap_or(f64::NAN),
            tolerance: tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(value)
}

/// Log-spaced grid helper, mostly for building absorption tables.
pub fn log_grid<R: Real>(lo: R, hi: R, n: usize) -> Vec<R> {
    assert!(n >= 2 && lo > R::zero() && hi > lo, "invalid log grid");
    let l0 = lo.ln();
    let l1 = hi.ln();
    (0..n)
        .map(|i| {
            let t = R::from_usize(i).unwrap() / R::from_usize(n - 1).unwrap();
            (l0 + (l1 - l0) * t).exp()
        })
        .collect()
}

/// Default omega grid for evaluating eval_eps_imag-style checks, spanning
/// `decades` around a characteristic frequency.
pub fn xi_grid_around<R: Real>(omega_c: R, decades: i32, per_decade: usize) -> Vec<R> {
    let half = R::lit(10.0f64.powi(decades / 2));
    log_grid(omega_c / half, omega_c * half, per_decade * decades as usize)
}
