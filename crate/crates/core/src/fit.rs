//! Small least-squares helpers: power-series fits over a prescribed exponent
//! set, and log-log power-law fits.
//!
//! These systems are tiny (a handful of exponents, a dozen samples), so the
//! normal equations with a hand-rolled Cholesky are adequate and keep the
//! scalar bound at [`Real`] rather than dragging in matrix traits.

use thiserror::Error;

use crate::real::{KahanSum, Real};

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least as many samples ({samples}) as basis functions ({basis})")]
    Underdetermined { samples: usize, basis: usize },
    #[error("exponent list must be non-empty and free of duplicates")]
    BadBasis,
    #[error("sample abscissae must be finite, positive and distinct")]
    BadSamples,
    #[error("normal equations are ill-conditioned (estimate {0:e}); reduce the basis or spread the samples")]
    IllConditioned(f64),
}

/// Result of [`fit_power_series`].
#[derive(Debug, Clone, PartialEq)]
pub struct PowerFit<R> {
    /// Coefficient per entry of the exponent list, in input order.
    pub coefficients: Vec<R>,
    /// RMS residual relative to the RMS of the data.
    pub relative_residual: R,
    /// Rough condition estimate of the (scaled) normal equations.
    pub condition_estimate: R,
}

/// Cholesky solve of the symmetric positive-definite system `a x = b`
/// (row-major, n x n). Returns `None` if a pivot collapses.
fn cholesky_solve<R: Real>(a: &mut [R], b: &mut [R], n: usize) -> Option<()> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d = d - a[j * n + k] * a[j * n + k];
        }
        if d <= R::zero() {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    // Forward then back substitution with the factor L.
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s = s - a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s = s - a[k * n + i] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    Some(())
}

/// Least-squares fit of `y(x) = sum_j c_j x^{p_j}` over the given integer
/// exponents. Abscissae are rescaled by their geometric mean and the basis
/// columns normalized before forming the normal equations, which keeps mixed
/// positive/negative exponent sets well conditioned.
pub fn fit_power_series<R: Real>(
    samples: &[(R, R)],
    exponents: &[i32],
) -> Result<PowerFit<R>, FitError> {
    let n = exponents.len();
    if n == 0 {
        return Err(FitError::BadBasis);
    }
    for (i, p) in exponents.iter().enumerate() {
        if exponents[..i].contains(p) {
            return Err(FitError::BadBasis);
        }
    }
    let m = samples.len();
    if m < n {
        return Err(FitError::Underdetermined {
            samples: m,
            basis: n,
        });
    }
    for (i, (x, y)) in samples.iter().enumerate() {
        if !x.is_finite() || *x <= R::zero() || !y.is_finite() {
            return Err(FitError::BadSamples);
        }
        if samples[..i].iter().any(|(xp, _)| *xp == *x) {
            return Err(FitError::BadSamples);
        }
    }

    // Geometric-mean scaling of x.
    let log_mean = samples.iter().map(|(x, _)| x.ln()).sum::<R>() / R::from_usize(m).unwrap();
    let scale = log_mean.exp();

    // Design matrix in scaled x, with per-column RMS normalization.
    let mut design = vec![R::zero(); m * n];
    for (i, (x, _)) in samples.iter().enumerate() {
        let u = *x / scale;
        for (j, &p) in exponents.iter().enumerate() {
            design[i * n + j] = u.powi(p);
        }
    }
    let mut col_norm = vec![R::zero(); n];
    for j in 0..n {
        let mut s = KahanSum::new();
        for i in 0..m {
            let v = design[i * n + j];
            s.add(v * v);
        }
        let norm = (s.value() / R::from_usize(m).unwrap()).sqrt();
        col_norm[j] = if norm > R::zero() { norm } else { R::one() };
        for i in 0..m {
            design[i * n + j] = design[i * n + j] / col_norm[j];
        }
    }

    // Normal equations.
    let mut ata = vec![R::zero(); n * n];
    let mut atb = vec![R::zero(); n];
    for j in 0..n {
        for k in j..n {
            let mut s = KahanSum::new();
            for i in 0..m {
                s.add(design[i * n + j] * design[i * n + k]);
            }
            ata[j * n + k] = s.value();
            ata[k * n + j] = s.value();
        }
        let mut s = KahanSum::new();
        for (i, (_, y)) in samples.iter().enumerate() {
            s.add(design[i * n + j] * *y);
        }
        atb[j] = s.value();
    }

    // Condition estimate from the diagonal spread of the Cholesky factor
    // (cheap, adequate for a guard).
    let mut chol = ata.clone();
    let mut coeffs = atb.clone();
    if cholesky_solve(&mut chol, &mut coeffs, n).is_none() {
        return Err(FitError::IllConditioned(f64::INFINITY));
    }
    let mut dmin = R::infinity();
    let mut dmax = R::zero();
    for j in 0..n {
        let d = chol[j * n + j];
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    let cond = (dmax / dmin) * (dmax / dmin);
    if cond > R::lit(1e12) {
        return Err(FitError::IllConditioned(cond.to_f64().unwrap_or(f64::NAN)));
    }

    // Undo the column and x scalings.
    let mut coefficients = Vec::with_capacity(n);
    for (j, &p) in exponents.iter().enumerate() {
        coefficients.push(coeffs[j] / col_norm[j] / scale.powi(p));
    }

    // Residual in original coordinates.
    let mut res2 = KahanSum::new();
    let mut dat2 = KahanSum::new();
    for (x, y) in samples {
        let mut model = KahanSum::new();
        for (j, &p) in exponents.iter().enumerate() {
            model.add(coefficients[j] * x.powi(p));
        }
        let r = *y - model.value();
        res2.add(r * r);
        dat2.add(*y * *y);
    }
    let denom = dat2.value().sqrt().max(R::min_positive_value());
    Ok(PowerFit {
        coefficients,
        relative_residual: res2.value().sqrt() / denom,
        condition_estimate: cond,
    })
}

/// Fit `|y| = A x^s` by linear regression in log-log space; returns `(s, A)`.
/// All y must share one sign and be nonzero.
pub fn fit_power_law<R: Real>(samples: &[(R, R)]) -> Result<(R, R), FitError> {
    if samples.len() < 2 {
        return Err(FitError::Underdetermined {
            samples: samples.len(),
            basis: 2,
        });
    }
    let sign = samples[0].1.signum();
    for (x, y) in samples {
        if !x.is_finite() || *x <= R::zero() || !y.is_finite() || *y == R::zero() {
            return Err(FitError::BadSamples);
        }
        if y.signum() != sign {
            return Err(FitError::BadSamples);
        }
    }
    let m = R::from_usize(samples.len()).unwrap();
    let (mut sx, mut sy, mut sxx, mut sxy) = (
        KahanSum::new(),
        KahanSum::new(),
        KahanSum::new(),
        KahanSum::new(),
    );
    for (x, y) in samples {
        let lx = x.ln();
        let ly = y.abs().ln();
        sx.add(lx);
        sy.add(ly);
        sxx.add(lx * lx);
        sxy.add(lx * ly);
    }
    let det = m * sxx.value() - sx.value() * sx.value();
    if det.abs() < R::epsilon() * m * sxx.value().abs() {
        return Err(FitError::BadSamples);
    }
    let slope = (m * sxy.value() - sx.value() * sy.value()) / det;
    let intercept = (sy.value() - slope * sx.value()) / m;
    Ok((slope, intercept.exp()))
}
