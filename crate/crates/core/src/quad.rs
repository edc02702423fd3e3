//! Adaptive Gauss-Kronrod (7,15) quadrature.
//!
//! Deterministic worst-interval refinement with a global error budget. Only
//! interior points are ever evaluated, so integrands may be singular at the
//! endpoints as long as the integral converges.

use thiserror::Error;

use crate::real::{KahanSum, Real};

/// Kronrod-15 abscissae on [0, 1] (symmetric, positive half).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];

/// Kronrod-15 weights.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// Gauss-7 weights (applied to the even-indexed Kronrod nodes).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("integration bounds must be finite with a < b, got [{0}, {1}]")]
    BadInterval(f64, f64),
    #[error(
        "quadrature did not converge: error estimate {error_estimate:e} > tolerance {tolerance:e} \
         after {panels} panels"
    )]
    NoConvergence {
        error_estimate: f64,
        tolerance: f64,
        panels: usize,
    },
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFinite(f64),
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<R> {
    pub value: R,
    /// Absolute error estimate (sum of per-panel Gauss/Kronrod differences).
    pub error: R,
    /// Number of integrand evaluations.
    pub evals: usize,
    /// Number of panels in the final subdivision.
    pub panels: usize,
}

struct Panel<R> {
    a: R,
    b: R,
    value: R,
    error: R,
}

fn gk15<R: Real>(f: &mut impl FnMut(R) -> R, a: R, b: R) -> Result<(R, R), QuadError> {
    let half = (b - a) * R::lit(0.5);
    let center = (a + b) * R::lit(0.5);
    let mut kronrod = KahanSum::new();
    let mut gauss = KahanSum::new();
    for i in 0..8 {
        let x = R::lit(XGK[i]);
        let wk = R::lit(WGK[i]);
        let eval = |t: R, f: &mut dyn FnMut(R) -> R| -> Result<R, QuadError> {
            let v = f(t);
            if !v.is_finite() {
                return Err(QuadError::NonFinite(t.to_f64().unwrap_or(f64::NAN)));
            }
            Ok(v)
        };
        let fsum = if i == 7 {
            eval(center, f)?
        } else {
            eval(center - half * x, f)? + eval(center + half * x, f)?
        };
        kronrod.add(wk * fsum);
        if i % 2 == 1 {
            gauss.add(R::lit(WG[i / 2]) * fsum);
        }
    }
    let value = kronrod.value() * half;
    let raw = ((kronrod.value() - gauss.value()) * half).abs();
    // QUADPACK-style sharpening of the raw Gauss/Kronrod difference.
    let err = raw.min(raw * raw.sqrt() * R::lit(200.0)).max(value.abs() * R::epsilon() * R::lit(50.0));
    Ok((value, err))
}

/// Integrate `f` over [a, b] to absolute tolerance `abs_tol` or relative
/// tolerance `rel_tol`, whichever is looser, with at most `max_panels`
/// subdivisions. Deterministic: the worst panel is always split next, ties
/// broken by position.
pub fn integrate<R: Real>(
    mut f: impl FnMut(R) -> R,
    a: R,
    b: R,
    abs_tol: R,
    rel_tol: R,
    max_panels: usize,
) -> Result<QuadResult<R>, QuadError> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(QuadError::BadInterval(
            a.to_f64().unwrap_or(f64::NAN),
            b.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let (v0, e0) = gk15(&mut f, a, b)?;
    let mut panels = vec![Panel {
        a,
        b,
        value: v0,
        error: e0,
    }];
    let mut evals = 15usize;
    loop {
        let mut total = KahanSum::new();
        let mut err = KahanSum::new();
        for p in &panels {
            total.add(p.value);
            err.add(p.error);
        }
        let budget = abs_tol.max(rel_tol * total.value().abs());
        if err.value() <= budget {
            return Ok(QuadResult {
                value: total.value(),
                error: err.value(),
                evals,
                panels: panels.len(),
            });
        }
        if panels.len() >= max_panels {
            return Err(QuadError::NoConvergence {
                error_estimate: err.value().to_f64().unwrap_or(f64::NAN),
                tolerance: budget.to_f64().unwrap_or(f64::NAN),
                panels: panels.len(),
            });
        }
        // Split the worst panel; on ties pick the leftmost for determinism.
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let Panel { a: pa, b: pb, .. } = panels.swap_remove(worst);
        let mid = (pa + pb) * R::lit(0.5);
        if mid <= pa || mid >= pb {
            // Interval at machine resolution; accept what we have.
            return Err(QuadError::NoConvergence {
                error_estimate: err.value().to_f64().unwrap_or(f64::NAN),
                tolerance: budget.to_f64().unwrap_or(f64::NAN),
                panels: panels.len() + 1,
            });
        }
        let (vl, el) = gk15(&mut f, pa, mid)?;
        let (vr, er) = gk15(&mut f, mid, pb)?;
        evals += 30;
        panels.push(Panel {
            a: pa,
            b: mid,
            value: vl,
            error: el,
        });
        panels.push(Panel {
            a: mid,
            b: pb,
            value: vr,
            error: er,
        });
    }
}
