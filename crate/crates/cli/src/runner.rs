//! Sweep execution and machine-readable output.
//!
//! Grid points are dispatched to a rayon worker pool but collected and
//! written in spec order, with floats printed at 17 significant digits, so a
//! given spec always produces byte-identical output.

use std::fmt::Write as _;
use std::io::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use casimir_core::dielectric::DielectricError;
use casimir_core::fit::FitError;
use casimir_core::lifshitz::{lifshitz, LifshitzError, PlanarCavity};
use casimir_core::modesum::{
    casimir_pressure, mode_sum_energy, Geometry, ModeSumError, Regulator,
};
use casimir_core::polariton::{
    continuum_force_1d, Defect, LatticeModel, PolaritonError, SeparationFamily,
};
use casimir_core::quad::QuadError;

use crate::config::{OutputFormat, Route, SweepSpec, ToySettings};

/// Runner failure, carrying the process exit code class.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("model instability: {0}")]
    Instability(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 2,
            RunError::Convergence(_) => 3,
            RunError::Instability(_) => 4,
        }
    }
}

impl From<LifshitzError> for RunError {
    fn from(e: LifshitzError) -> Self {
        match &e {
            LifshitzError::Quadrature(QuadError::NoConvergence { .. })
            | LifshitzError::Dielectric(DielectricError::Convergence { .. })
            | LifshitzError::LowTemperature { .. } => RunError::Convergence(e.to_string()),
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<ModeSumError> for RunError {
    fn from(e: ModeSumError) -> Self {
        match &e {
            ModeSumError::Fit(FitError::IllConditioned(_)) => RunError::Convergence(e.to_string()),
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<PolaritonError> for RunError {
    fn from(e: PolaritonError) -> Self {
        match &e {
            PolaritonError::UnstableModel { .. } => RunError::Instability(e.to_string()),
            PolaritonError::Fit(_) => RunError::Convergence(e.to_string()),
            _ => RunError::Config(e.to_string()),
        }
    }
}

/// 17-significant-digit scientific float, the fixed output format.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_f(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// Row types (one per route).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
struct LifshitzRow {
    route: &'static str,
    d_m: f64,
    #[serde(rename = "T_K")]
    t_k: f64,
    model_left: String,
    model_right: String,
    #[serde(rename = "pressure_Pa")]
    pressure_pa: f64,
    #[serde(rename = "energy_Jm2")]
    energy_jm2: f64,
    err_est: f64,
    matsubara_n_used: usize,
}

#[derive(Debug, Clone, Serialize)]
struct ModeSumRow {
    route: &'static str,
    d_m: f64,
    geometry: String,
    regulator: String,
    #[serde(rename = "energy_J")]
    energy_j: f64,
    #[serde(rename = "pressure_Pa")]
    pressure_pa: f64,
    err_est: f64,
    /// `power:coefficient` pairs of the divergent terms, `;`-separated.
    divergences: String,
}

#[derive(Debug, Clone, Serialize)]
struct ToyRow {
    route: &'static str,
    n_sites: usize,
    spacing_m: f64,
    separation_sites: usize,
    d_m: f64,
    #[serde(rename = "energy_J")]
    energy_j: f64,
    #[serde(rename = "force_N")]
    force_n: f64,
    #[serde(rename = "continuum_force_N")]
    continuum_force_n: f64,
}

#[derive(Debug, Clone, Serialize)]
struct CompareRow {
    route: &'static str,
    d_m: f64,
    #[serde(rename = "T_K")]
    t_k: f64,
    #[serde(rename = "p_modesum_Pa")]
    p_modesum_pa: f64,
    #[serde(rename = "p_lifshitz_Pa")]
    p_lifshitz_pa: f64,
    rel_dev: f64,
    toy_separation_sites: Option<usize>,
    #[serde(rename = "toy_force_N")]
    toy_force_n: Option<f64>,
    #[serde(rename = "toy_continuum_N")]
    toy_continuum_n: Option<f64>,
    toy_rel_dev: Option<f64>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum Row {
    Lifshitz(LifshitzRow),
    ModeSum(ModeSumRow),
    Toy(ToyRow),
    Compare(CompareRow),
}

impl Row {
    fn csv_header(route: Route) -> &'static str {
        match route {
            Route::Lifshitz => {
                "route,d_m,T_K,model_left,model_right,pressure_Pa,energy_Jm2,err_est,matsubara_n_used"
            }
            Route::ModeSum => "route,d_m,geometry,regulator,energy_J,pressure_Pa,err_est,divergences",
            Route::Toy => {
                "route,n_sites,spacing_m,separation_sites,d_m,energy_J,force_N,continuum_force_N"
            }
            Route::Compare => {
                "route,d_m,T_K,p_modesum_Pa,p_lifshitz_Pa,rel_dev,toy_separation_sites,\
                 toy_force_N,toy_continuum_N,toy_rel_dev"
            }
        }
    }

    fn csv_line(&self) -> String {
        match self {
            Row::Lifshitz(r) => format!(
                "{},{},{},{},{},{},{},{},{}",
                r.route,
                fmt_f(r.d_m),
                fmt_f(r.t_k),
                r.model_left,
                r.model_right,
                fmt_f(r.pressure_pa),
                fmt_f(r.energy_jm2),
                fmt_f(r.err_est),
                r.matsubara_n_used
            ),
            Row::ModeSum(r) => format!(
                "{},{},{},{},{},{},{},{}",
                r.route,
                fmt_f(r.d_m),
                r.geometry,
                r.regulator,
                fmt_f(r.energy_j),
                fmt_f(r.pressure_pa),
                fmt_f(r.err_est),
                r.divergences
            ),
            Row::Toy(r) => format!(
                "{},{},{},{},{},{},{},{}",
                r.route,
                r.n_sites,
                fmt_f(r.spacing_m),
                r.separation_sites,
                fmt_f(r.d_m),
                fmt_f(r.energy_j),
                fmt_f(r.force_n),
                fmt_f(r.continuum_force_n)
            ),
            Row::Compare(r) => format!(
                "{},{},{},{},{},{},{},{},{},{}",
                r.route,
                fmt_f(r.d_m),
                fmt_f(r.t_k),
                fmt_f(r.p_modesum_pa),
                fmt_f(r.p_lifshitz_pa),
                fmt_f(r.rel_dev),
                r.toy_separation_sites
                    .map(|s| s.to_string())
                    .unwrap_or_default(),
                opt_f(r.toy_force_n),
                opt_f(r.toy_continuum_n),
                opt_f(r.toy_rel_dev)
            ),
        }
    }
}

// ---------------------------------------------------------------------------
// Per-route computations.
// ---------------------------------------------------------------------------

/// The CLI stores the cutoff as a gap fraction so one spec serves a whole
/// gap grid; rescale to meters for the core call.
fn regulator_for_gap(settings: &Regulator<f64>, gap: f64) -> Regulator<f64> {
    match settings {
        Regulator::ExpCutoff { xi_reg } => Regulator::ExpCutoff {
            xi_reg: xi_reg * gap,
        },
        other => other.clone(),
    }
}

fn regulator_tag(reg: &Regulator<f64>) -> String {
    match reg {
        Regulator::ZetaAbel => "zeta".into(),
        Regulator::ExpCutoff { xi_reg } => format!("expcutoff({xi_reg:e})"),
        Regulator::EulerMaclaurin { order } => format!("euler-maclaurin({order})"),
    }
}

fn modesum_row(spec: &SweepSpec, gap: f64) -> Result<Row, RunError> {
    let geometry = spec.modesum.geometry;
    let reg = regulator_for_gap(&spec.modesum.regulator, gap);
    let result = mode_sum_energy(geometry, gap, &reg)?;
    let pressure = casimir_pressure(geometry, gap, &reg)?;
    let mut divergences = String::new();
    for (i, (p, c)) in result.divergences.iter().enumerate() {
        if i > 0 {
            divergences.push(';');
        }
        let _ = write!(divergences, "{p}:{}", fmt_f(*c));
    }
    Ok(Row::ModeSum(ModeSumRow {
        route: Route::ModeSum.tag(),
        d_m: gap,
        geometry: match geometry {
            Geometry::Scalar1d => "scalar1d".into(),
            Geometry::Em3d => "em3d".into(),
        },
        regulator: regulator_tag(&reg),
        energy_j: result.finite_part,
        pressure_pa: pressure,
        err_est: result.error_estimate,
        divergences,
    }))
}

fn lifshitz_row(spec: &SweepSpec, gap: f64, t_k: f64) -> Result<Row, RunError> {
    let cavity = PlanarCavity {
        left: spec.left.clone(),
        right: spec.right.clone(),
        gap,
    };
    let r = lifshitz(&cavity, t_k, spec.tol)?;
    Ok(Row::Lifshitz(LifshitzRow {
        route: Route::Lifshitz.tag(),
        d_m: gap,
        t_k,
        model_left: spec.left.name(),
        model_right: spec.right.name(),
        pressure_pa: r.pressure,
        energy_jm2: r.energy_per_area,
        err_est: r.quadrature.pressure_error,
        matsubara_n_used: r.matsubara_n_used,
    }))
}

fn toy_family(toy: &ToySettings) -> SeparationFamily<f64> {
    SeparationFamily {
        chain: LatticeModel::new(toy.n_sites, toy.spacing),
        probe: Defect {
            site: 0,
            omega_m: toy.omega_m,
            coupling: toy.coupling,
            form: toy.form,
            bath: vec![],
        },
    }
}

fn toy_row(toy: &ToySettings, separation: usize) -> Result<Row, RunError> {
    let family = toy_family(toy);
    let energy = family.energy_at(separation)?;
    let force = family.force_at(separation)?;
    let d_m = separation as f64 * toy.spacing;
    Ok(Row::Toy(ToyRow {
        route: Route::Toy.tag(),
        n_sites: toy.n_sites,
        spacing_m: toy.spacing,
        separation_sites: separation,
        d_m,
        energy_j: energy,
        force_n: force,
        continuum_force_n: continuum_force_1d(family.chain.wave_speed, d_m),
    }))
}

fn compare_row(spec: &SweepSpec, gap: f64, t_k: f64) -> Result<Row, RunError> {
    // The mode-sum side of the comparison is always the 3D EM pressure; a
    // scalar1d geometry in [modesum] would not be commensurable with the
    // Lifshitz pascals.
    let reg = regulator_for_gap(&spec.modesum.regulator, gap);
    let p_modesum = casimir_pressure(Geometry::Em3d, gap, &reg)?;
    let cavity = PlanarCavity {
        left: spec.left.clone(),
        right: spec.right.clone(),
        gap,
    };
    let p_lifshitz = lifshitz(&cavity, t_k, spec.tol)?.pressure;
    let rel_dev = (p_modesum - p_lifshitz).abs() / p_lifshitz.abs().max(f64::MIN_POSITIVE);

    // Optional third route: the nearest toy separation to this gap, checked
    // against the 1D continuum law it discretizes.
    let mut toy_sep = None;
    let mut toy_force = None;
    let mut toy_continuum = None;
    let mut toy_dev = None;
    if let Some(toy) = &spec.toy {
        let sep = (gap / toy.spacing).round() as usize;
        let family = toy_family(toy);
        if sep >= 1 && sep + 2 < toy.n_sites {
            let f = family.force_at(sep)?;
            let d_m = sep as f64 * toy.spacing;
            let cont = continuum_force_1d(family.chain.wave_speed, d_m);
            toy_sep = Some(sep);
            toy_force = Some(f);
            toy_continuum = Some(cont);
            toy_dev = Some((f - cont).abs() / cont.abs());
        }
    }
    Ok(Row::Compare(CompareRow {
        route: Route::Compare.tag(),
        d_m: gap,
        t_k,
        p_modesum_pa: p_modesum,
        p_lifshitz_pa: p_lifshitz,
        rel_dev,
        toy_separation_sites: toy_sep,
        toy_force_n: toy_force,
        toy_continuum_n: toy_continuum,
        toy_rel_dev: toy_dev,
    }))
}

// ---------------------------------------------------------------------------
// Sweep driver.
// ---------------------------------------------------------------------------

fn grid_points(spec: &SweepSpec) -> Vec<(f64, f64)> {
    let mut points = Vec::new();
    for &g in &spec.gaps {
        for &t in &spec.temperatures {
            points.push((g, t));
        }
    }
    points
}

/// Execute the sweep and return the rendered output (CSV or JSON).
///
/// Rows are computed in parallel but emitted in spec order; on failure the
/// error of the earliest grid point wins, deterministically.
pub fn run(spec: &SweepSpec) -> Result<String, RunError> {
    let results: Vec<Result<Row, RunError>> = match spec.route {
        Route::ModeSum => spec
            .gaps
            .par_iter()
            .map(|&g| modesum_row(spec, g))
            .collect(),
        Route::Lifshitz => grid_points(spec)
            .par_iter()
            .map(|&(g, t)| lifshitz_row(spec, g, t))
            .collect(),
        Route::Compare => grid_points(spec)
            .par_iter()
            .map(|&(g, t)| compare_row(spec, g, t))
            .collect(),
        Route::Toy => {
            let toy = spec
                .toy
                .as_ref()
                .ok_or_else(|| RunError::Config("toy route without [toy] section".into()))?;
            toy.separations
                .par_iter()
                .map(|&s| toy_row(toy, s))
                .collect()
        }
    };
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        rows.push(r?);
    }
    render(spec, &rows)
}

fn render(spec: &SweepSpec, rows: &[Row]) -> Result<String, RunError> {
    match spec.format {
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str(Row::csv_header(spec.route));
            out.push('\n');
            for row in rows {
                out.push_str(&row.csv_line());
                out.push('\n');
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(rows)
                .map_err(|e| RunError::Config(format!("json serialization: {e}")))?;
            Ok(text + "\n")
        }
    }
}

/// Write the rendered output to the spec's `out` path, or stdout.
pub fn emit(spec: &SweepSpec, rendered: &str) -> Result<(), RunError> {
    match &spec.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(rendered.as_bytes())?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(rendered.as_bytes())?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{RawConfig, Route, SweepSpec};

    fn spec(text: &str, route: Route) -> SweepSpec {
        let (raw, diags) = RawConfig::parse(text);
        assert!(diags.is_empty(), "{diags:?}");
        SweepSpec::from_raw(raw, route).unwrap()
    }

    const MIRRORS: &str = "\
[sweep]
tol = 1e-8

[grid]
gap_m = 1e-6

[material.left]
model = mirror

[material.right]
model = mirror
";

    #[test]
    fn lifshitz_sweep_contains_the_ideal_pressure() {
        let s = spec(MIRRORS, Route::Lifshitz);
        let out = run(&s).unwrap();
        let mut lines = out.lines();
        assert_eq!(
            lines.next().unwrap(),
            "route,d_m,T_K,model_left,model_right,pressure_Pa,energy_Jm2,err_est,matsubara_n_used"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("lifshitz,"), "{row}");
        // -1.300e-3 Pa at 1 um.
        let pressure: f64 = row.split(',').nth(5).unwrap().parse().unwrap();
        assert!((pressure + 1.3001257724e-3).abs() < 1e-9, "{pressure}");
        assert!(row.ends_with(",0"), "T = 0 row should use 0 Matsubara terms");
    }

    #[test]
    fn rows_follow_grid_order_deterministically() {
        let text = MIRRORS.replace("gap_m = 1e-6", "gap_m = 1e-6, 2e-6, 4e-6");
        let s = spec(&text, Route::Lifshitz);
        let a = run(&s).unwrap();
        let b = run(&s).unwrap();
        assert_eq!(a, b);
        let gaps: Vec<f64> = a
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(gaps, vec![1e-6, 2e-6, 4e-6]);
    }

    #[test]
    fn modesum_row_reports_divergences_under_expcutoff() {
        let text = "\
[sweep]
tol = 1e-8

[grid]
gap_m = 1e-6

[modesum]
geometry = em3d
regulator = expcutoff
";
        let s = spec(text, Route::ModeSum);
        let out = run(&s).unwrap();
        let row = out.lines().nth(1).unwrap();
        let divergences = row.split(',').nth(7).unwrap();
        assert!(divergences.contains("3:"), "{divergences}");
        assert!(divergences.contains("4:"), "{divergences}");
    }

    #[test]
    fn compare_route_deviation_is_small_for_mirrors() {
        let s = spec(MIRRORS, Route::Compare);
        let out = run(&s).unwrap();
        let row = out.lines().nth(1).unwrap();
        let dev: f64 = row.split(',').nth(5).unwrap().parse().unwrap();
        assert!(dev < 1e-3, "{row}");
    }

    #[test]
    fn toy_route_emits_one_row_per_separation() {
        let text = "\
[toy]
n_sites = 64
spacing_m = 1e-9
separations = 4, 6, 8
";
        let s = spec(text, Route::Toy);
        let out = run(&s).unwrap();
        assert_eq!(out.lines().count(), 4); // header + 3 rows
        for line in out.lines().skip(1) {
            let force: f64 = line.split(',').nth(6).unwrap().parse().unwrap();
            assert!(force < 0.0, "attractive: {line}");
        }
    }

    #[test]
    fn json_format_round_trips() {
        let mut s = spec(MIRRORS, Route::Lifshitz);
        s.format = OutputFormat::Json;
        let out = run(&s).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
        let rows = parsed.as_array().unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0]["route"], "lifshitz");
        assert!(rows[0]["pressure_Pa"].as_f64().unwrap() < 0.0);
    }

    #[test]
    fn unstable_toy_maps_to_instability_error() {
        let text = "\
[toy]
n_sites = 64
spacing_m = 1e-9
form = bare
separations = 4, 6, 8, 10, 12
";
        let s = spec(text, Route::Toy);
        let err = run(&s).unwrap_err();
        assert_eq!(err.exit_code(), 4, "{err}");
    }

    #[test]
    fn low_temperature_maps_to_convergence_error() {
        let text = MIRRORS.replace(
            "gap_m = 1e-6",
            "gap_m = 1e-6\ntemperature_K = 0.5",
        );
        let s = spec(&text, Route::Lifshitz);
        let err = run(&s).unwrap_err();
        assert_eq!(err.exit_code(), 3, "{err}");
    }
}
