//! Sweep-spec ingestion: a flat key-value format with `[section]` headers.
//!
//! ```text
//! [sweep]
//! tol = 1e-8
//! format = csv
//!
//! [grid]
//! gap_m = range(1e-7, 1e-5, 7, log)   # or an explicit comma list
//! temperature_K = 0, 300
//!
//! [material.left]
//! model = drude
//! omega_p = 1.4e16
//! gamma = 5.3e13
//!
//! [material.right]
//! model = mirror
//! ```
//!
//! Validation collects *every* violation with its source line rather than
//! stopping at the first, so `casimir validate` can report a complete
//! diagnosis of a broken spec.

use std::fmt;
use std::path::{Path, PathBuf};

use casimir_core::dielectric::{DielectricModel, LorentzOscillator, TabulatedData};
use casimir_core::modesum::{Geometry, Regulator};
use casimir_core::polariton::CouplingForm;

/// One validation or parse problem, tagged with its source line when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

// ---------------------------------------------------------------------------
// Raw layer: sections of (key, value, line).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct RawEntry {
    key: String,
    value: String,
    line: usize,
    used: bool,
}

#[derive(Debug, Clone)]
struct RawSection {
    name: String,
    line: usize,
    entries: Vec<RawEntry>,
}

#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    sections: Vec<RawSection>,
}

impl RawConfig {
    /// Parse the section/key-value text. Structural problems (bad headers,
    /// lines without `=`, duplicate keys) are reported with line numbers;
    /// parsing continues past them so later errors are found too.
    pub fn parse(text: &str) -> (Self, Vec<Diagnostic>) {
        let mut cfg = RawConfig::default();
        let mut diags = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let body = raw_line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(inner) = body.strip_prefix('[') {
                match inner.strip_suffix(']') {
                    Some(name) if !name.trim().is_empty() => {
                        let name = name.trim().to_string();
                        if cfg.sections.iter().any(|s| s.name == name) {
                            diags.push(Diagnostic::at(
                                line_no,
                                format!("duplicate section [{name}]"),
                            ));
                        }
                        cfg.sections.push(RawSection {
                            name,
                            line: line_no,
                            entries: Vec::new(),
                        });
                    }
                    _ => diags.push(Diagnostic::at(
                        line_no,
                        format!("malformed section header {body:?}"),
                    )),
                }
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                diags.push(Diagnostic::at(
                    line_no,
                    format!("expected `key = value`, got {body:?}"),
                ));
                continue;
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            let Some(section) = cfg.sections.last_mut() else {
                diags.push(Diagnostic::at(
                    line_no,
                    format!("key {key:?} appears before any [section] header"),
                ));
                continue;
            };
            if section.entries.iter().any(|e| e.key == key) {
                diags.push(Diagnostic::at(
                    line_no,
                    format!("duplicate key {key:?} in section [{}]", section.name),
                ));
                continue;
            }
            section.entries.push(RawEntry {
                key,
                value,
                line: line_no,
                used: false,
            });
        }
        (cfg, diags)
    }

    /// Read a key without consuming it (used to sniff `sweep.route` before
    /// the route is known).
    pub fn peek(&self, section: &str, key: &str) -> Option<String> {
        self.sections
            .iter()
            .find(|s| s.name == section)?
            .entries
            .iter()
            .find(|e| e.key == key)
            .map(|e| e.value.clone())
    }

    /// Apply a `section.key=value` override (from a `--set` flag), creating
    /// the section or replacing the key as needed.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), Diagnostic> {
        let Some((path, value)) = spec.split_once('=') else {
            return Err(Diagnostic::global(format!(
                "override {spec:?} is not of the form section.key=value"
            )));
        };
        let Some((section_name, key)) = path.trim().rsplit_once('.') else {
            return Err(Diagnostic::global(format!(
                "override {spec:?} is not of the form section.key=value"
            )));
        };
        let (section_name, key, value) = (section_name.trim(), key.trim(), value.trim());
        let section = match self.sections.iter_mut().find(|s| s.name == section_name) {
            Some(s) => s,
            None => {
                self.sections.push(RawSection {
                    name: section_name.to_string(),
                    line: 0,
                    entries: Vec::new(),
                });
                self.sections.last_mut().unwrap()
            }
        };
        match section.entries.iter_mut().find(|e| e.key == key) {
            Some(e) => e.value = value.to_string(),
            None => section.entries.push(RawEntry {
                key: key.to_string(),
                value: value.to_string(),
                line: 0,
                used: false,
            }),
        }
        Ok(())
    }
}

/// Cursor over one section that tracks which keys were consumed so unknown
/// keys can be reported afterwards.
struct SectionView<'a> {
    section: Option<&'a mut RawSection>,
}

impl<'a> SectionView<'a> {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let section = self.section.as_deref_mut()?;
        let entry = section.entries.iter_mut().find(|e| e.key == key)?;
        entry.used = true;
        Some((entry.value.clone(), entry.line))
    }

    fn exists(&self) -> bool {
        self.section.is_some()
    }

    fn complain_about_unknown_keys(&self, diags: &mut Vec<Diagnostic>) {
        if let Some(section) = self.section.as_deref() {
            for e in &section.entries {
                if !e.used {
                    diags.push(Diagnostic::at(
                        e.line,
                        format!("unknown key {:?} in section [{}]", e.key, section.name),
                    ));
                }
            }
        }
    }
}

fn view<'a>(cfg: &'a mut RawConfig, name: &str) -> SectionView<'a> {
    SectionView {
        section: cfg.sections.iter_mut().find(|s| s.name == name),
    }
}

// ---------------------------------------------------------------------------
// Typed spec.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    ModeSum,
    Lifshitz,
    Toy,
    Compare,
}

impl Route {
    pub fn tag(self) -> &'static str {
        match self {
            Route::ModeSum => "modesum",
            Route::Lifshitz => "lifshitz",
            Route::Toy => "toy",
            Route::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSumSettings {
    pub geometry: Geometry,
    pub regulator: Regulator<f64>,
}

impl Default for ModeSumSettings {
    fn default() -> Self {
        Self {
            geometry: Geometry::Em3d,
            regulator: Regulator::ZetaAbel,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToySettings {
    pub n_sites: usize,
    pub spacing: f64,
    pub omega_m: f64,
    pub coupling: f64,
    pub form: CouplingForm,
    pub separations: Vec<usize>,
}

/// Fully validated sweep description; `run()` starts iff construction
/// produced no diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub route: Route,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub gaps: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub left: DielectricModel<f64>,
    pub right: DielectricModel<f64>,
    pub modesum: ModeSumSettings,
    pub toy: Option<ToySettings>,
}

fn parse_f64(value: &str, line: usize, key: &str, diags: &mut Vec<Diagnostic>) -> Option<f64> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        _ => {
            diags.push(Diagnostic::at(
                line,
                format!("{key}: cannot parse {value:?} as a finite number"),
            ));
            None
        }
    }
}

fn parse_usize(value: &str, line: usize, key: &str, diags: &mut Vec<Diagnostic>) -> Option<usize> {
    match value.parse::<usize>() {
        Ok(v) => Some(v),
        Err(_) => {
            diags.push(Diagnostic::at(
                line,
                format!("{key}: cannot parse {value:?} as a nonnegative integer"),
            ));
            None
        }
    }
}

/// A grid: `a, b, c` or `range(start, stop, count, lin|log)`.
fn parse_grid(value: &str, line: usize, key: &str, diags: &mut Vec<Diagnostic>) -> Vec<f64> {
    let body = value.trim();
    if let Some(args) = body
        .strip_prefix("range(")
        .and_then(|s| s.strip_suffix(')'))
    {
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            diags.push(Diagnostic::at(
                line,
                format!("{key}: range() takes (start, stop, count, lin|log)"),
            ));
            return Vec::new();
        }
        let (Some(start), Some(stop), Some(count)) = (
            parse_f64(parts[0], line, key, diags),
            parse_f64(parts[1], line, key, diags),
            parse_usize(parts[2], line, key, diags),
        ) else {
            return Vec::new();
        };
        let log = match parts[3] {
            "lin" => false,
            "log" => true,
            other => {
                diags.push(Diagnostic::at(
                    line,
                    format!("{key}: grid spacing must be `lin` or `log`, got {other:?}"),
                ));
                return Vec::new();
            }
        };
        if count < 2 || start >= stop || (log && start <= 0.0) {
            diags.push(Diagnostic::at(
                line,
                format!(
                    "{key}: range needs count >= 2 and start < stop (positive start for log)"
                ),
            ));
            return Vec::new();
        }
        return (0..count)
            .map(|i| {
                let t = i as f64 / (count - 1) as f64;
                if log {
                    (start.ln() + (stop.ln() - start.ln()) * t).exp()
                } else {
                    start + (stop - start) * t
                }
            })
            .collect();
    }
    body.split(',')
        .filter(|s| !s.trim().is_empty())
        .filter_map(|s| parse_f64(s.trim(), line, key, diags))
        .collect()
}

fn parse_material(
    cfg: &mut RawConfig,
    section: &str,
    diags: &mut Vec<Diagnostic>,
) -> DielectricModel<f64> {
    let mut v = view(cfg, section);
    if !v.exists() {
        diags.push(Diagnostic::global(format!(
            "missing section [{section}] (required by this route)"
        )));
        return DielectricModel::Vacuum;
    }
    let Some((model, model_line)) = v.take("model") else {
        diags.push(Diagnostic::global(format!(
            "section [{section}] is missing the `model` key"
        )));
        v.complain_about_unknown_keys(diags);
        return DielectricModel::Vacuum;
    };
    let need_f64 = |v: &mut SectionView, key: &str, diags: &mut Vec<Diagnostic>| {
        match v.take(key) {
            Some((val, line)) => parse_f64(&val, line, key, diags),
            None => {
                diags.push(Diagnostic::at(
                    model_line,
                    format!("model {model:?} requires key `{key}` in [{section}]"),
                ));
                None
            }
        }
    };
    let built = match model.as_str() {
        "vacuum" => DielectricModel::Vacuum,
        "mirror" => DielectricModel::PerfectMirror,
        "constant" => {
            let eps = need_f64(&mut v, "eps", diags).unwrap_or(1.0);
            DielectricModel::ConstantEps { eps }
        }
        "plasma" => {
            let omega_p = need_f64(&mut v, "omega_p", diags).unwrap_or(1.0);
            DielectricModel::Plasma { omega_p }
        }
        "drude" => {
            let omega_p = need_f64(&mut v, "omega_p", diags).unwrap_or(1.0);
            let gamma = need_f64(&mut v, "gamma", diags).unwrap_or(1.0);
            DielectricModel::Drude { omega_p, gamma }
        }
        "lorentz" => {
            // lines = omega0:plasma:gamma, omega0:plasma:gamma, ...
            let mut oscs = Vec::new();
            match v.take("lines") {
                Some((val, line)) => {
                    for part in val.split(',').filter(|s| !s.trim().is_empty()) {
                        let fields: Vec<&str> = part.trim().split(':').collect();
                        if fields.len() != 3 {
                            diags.push(Diagnostic::at(
                                line,
                                format!(
                                    "lines: each oscillator is omega0:plasma:gamma, got {part:?}"
                                ),
                            ));
                            continue;
                        }
                        let omega_0 = parse_f64(fields[0], line, "lines.omega0", diags);
                        let plasma = parse_f64(fields[1], line, "lines.plasma", diags);
                        let gamma = parse_f64(fields[2], line, "lines.gamma", diags);
                        if let (Some(omega_0), Some(plasma), Some(gamma)) =
                            (omega_0, plasma, gamma)
                        {
                            oscs.push(LorentzOscillator {
                                omega_0,
                                plasma,
                                gamma,
                            });
                        }
                    }
                }
                None => diags.push(Diagnostic::at(
                    model_line,
                    format!("model \"lorentz\" requires key `lines` in [{section}]"),
                )),
            }
            DielectricModel::LorentzOscillators(oscs)
        }
        "tabulated" => match v.take("file") {
            Some((path, line)) => {
                if !Path::new(&path).exists() {
                    diags.push(Diagnostic::at(
                        line,
                        format!("file: optical data file {path:?} does not exist"),
                    ));
                    DielectricModel::Vacuum
                } else {
                    match TabulatedData::from_path(&path) {
                        Ok(data) => DielectricModel::Tabulated(data),
                        Err(e) => {
                            diags.push(Diagnostic::at(line, format!("file {path:?}: {e}")));
                            DielectricModel::Vacuum
                        }
                    }
                }
            }
            None => {
                diags.push(Diagnostic::at(
                    model_line,
                    format!("model \"tabulated\" requires key `file` in [{section}]"),
                ));
                DielectricModel::Vacuum
            }
        },
        other => {
            diags.push(Diagnostic::at(
                model_line,
                format!(
                    "unknown model {other:?} (expected vacuum, mirror, constant, plasma, \
                     drude, lorentz or tabulated)"
                ),
            ));
            DielectricModel::Vacuum
        }
    };
    if let Err(e) = built.validate() {
        diags.push(Diagnostic::at(model_line, format!("[{section}]: {e}")));
    }
    v.complain_about_unknown_keys(diags);
    built
}

fn parse_modesum(cfg: &mut RawConfig, diags: &mut Vec<Diagnostic>) -> ModeSumSettings {
    let mut v = view(cfg, "modesum");
    let mut settings = ModeSumSettings::default();
    if !v.exists() {
        return settings;
    }
    if let Some((val, line)) = v.take("geometry") {
        settings.geometry = match val.as_str() {
            "scalar1d" => Geometry::Scalar1d,
            "em3d" => Geometry::Em3d,
            other => {
                diags.push(Diagnostic::at(
                    line,
                    format!("geometry: expected scalar1d or em3d, got {other:?}"),
                ));
                Geometry::Em3d
            }
        };
    }
    if let Some((val, line)) = v.take("regulator") {
        settings.regulator = match val.as_str() {
            "zeta" => Regulator::ZetaAbel,
            "expcutoff" => {
                // Interpreted as a fraction of the gap so one sweep spec can
                // serve every gap in the grid.
                let frac = match v.take("xi_reg_over_gap") {
                    Some((fv, fl)) => parse_f64(&fv, fl, "xi_reg_over_gap", diags).unwrap_or(0.2),
                    None => 0.2,
                };
                if frac <= 0.0 || frac >= 1.0 {
                    diags.push(Diagnostic::at(
                        line,
                        format!("xi_reg_over_gap must lie in (0, 1), got {frac}"),
                    ));
                }
                Regulator::ExpCutoff { xi_reg: frac }
            }
            "euler-maclaurin" => {
                let order = match v.take("order") {
                    Some((ov, ol)) => parse_usize(&ov, ol, "order", diags).unwrap_or(4),
                    None => 4,
                };
                if order < 2 || order > 6 || order % 2 != 0 {
                    diags.push(Diagnostic::at(
                        line,
                        format!("order must be even and in 2..=6, got {order}"),
                    ));
                }
                Regulator::EulerMaclaurin { order }
            }
            other => {
                diags.push(Diagnostic::at(
                    line,
                    format!(
                        "regulator: expected zeta, expcutoff or euler-maclaurin, got {other:?}"
                    ),
                ));
                Regulator::ZetaAbel
            }
        };
    }
    v.complain_about_unknown_keys(diags);
    settings
}

fn parse_toy(cfg: &mut RawConfig, diags: &mut Vec<Diagnostic>) -> Option<ToySettings> {
    let mut v = view(cfg, "toy");
    if !v.exists() {
        return None;
    }
    let take_f64 = |v: &mut SectionView, key: &str, default: f64, diags: &mut Vec<Diagnostic>| {
        match v.take(key) {
            Some((val, line)) => parse_f64(&val, line, key, diags).unwrap_or(default),
            None => default,
        }
    };
    let n_sites = match v.take("n_sites") {
        Some((val, line)) => {
            let n = parse_usize(&val, line, "n_sites", diags).unwrap_or(0);
            if n < 2 {
                diags.push(Diagnostic::at(line, format!("n_sites must be >= 2, got {n}")));
            }
            n
        }
        None => {
            diags.push(Diagnostic::global(
                "section [toy] is missing the `n_sites` key",
            ));
            0
        }
    };
    let spacing = take_f64(&mut v, "spacing_m", 1e-9, diags);
    if spacing <= 0.0 {
        diags.push(Diagnostic::global(format!(
            "[toy] spacing_m must be positive, got {spacing}"
        )));
    }
    // Defaults put the probes deep in the strong-coupling (mirror-like)
    // regime, in units of c/a.
    let w0 = casimir_core::units::C / spacing.max(f64::MIN_POSITIVE);
    let omega_m = take_f64(&mut v, "omega_m", 3.0 * w0, diags);
    let coupling = take_f64(&mut v, "coupling", 40.0 * w0 * w0, diags);
    let form = match v.take("form") {
        Some((val, line)) => match val.as_str() {
            "bare" => CouplingForm::Bare,
            "screened" => CouplingForm::Screened,
            other => {
                diags.push(Diagnostic::at(
                    line,
                    format!("form: expected bare or screened, got {other:?}"),
                ));
                CouplingForm::Screened
            }
        },
        None => CouplingForm::Screened,
    };
    let separations = match v.take("separations") {
        Some((val, line)) => {
            let seps: Vec<usize> = val
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .filter_map(|s| parse_usize(s.trim(), line, "separations", diags))
                .collect();
            if seps.is_empty() {
                diags.push(Diagnostic::at(line, "separations: empty grid".to_string()));
            }
            for &s in &seps {
                if s == 0 || s + 2 >= n_sites.max(2) {
                    diags.push(Diagnostic::at(
                        line,
                        format!("separations: {s} does not fit in a {n_sites}-site chain"),
                    ));
                }
            }
            seps
        }
        None => {
            diags.push(Diagnostic::global(
                "section [toy] is missing the `separations` key",
            ));
            Vec::new()
        }
    };
    if omega_m <= 0.0 || coupling < 0.0 {
        diags.push(Diagnostic::global(
            "[toy] omega_m must be positive and coupling nonnegative",
        ));
    }
    v.complain_about_unknown_keys(diags);
    Some(ToySettings {
        n_sites,
        spacing,
        omega_m,
        coupling,
        form,
        separations,
    })
}

impl SweepSpec {
    /// Number of rows this sweep will produce.
    pub fn grid_size(&self) -> usize {
        match self.route {
            Route::ModeSum => self.gaps.len(),
            Route::Lifshitz | Route::Compare => self.gaps.len() * self.temperatures.len(),
            Route::Toy => self.toy.as_ref().map_or(0, |t| t.separations.len()),
        }
    }

    /// Build and fully validate a spec for `route`. On failure the complete
    /// list of diagnostics is returned; an empty error list never happens.
    pub fn from_raw(mut cfg: RawConfig, route: Route) -> Result<SweepSpec, Vec<Diagnostic>> {
        let mut diags = Vec::new();

        let mut sweep = view(&mut cfg, "sweep");
        let mut tol = 1e-8;
        let mut out = None;
        let mut format = OutputFormat::default();
        if let Some((val, line)) = sweep.take("tol") {
            if let Some(v) = parse_f64(&val, line, "tol", &mut diags) {
                if v <= 0.0 {
                    diags.push(Diagnostic::at(line, format!("tol must be > 0, got {v}")));
                } else {
                    tol = v;
                }
            }
        }
        if let Some((val, _)) = sweep.take("out") {
            out = Some(PathBuf::from(val));
        }
        if let Some((val, line)) = sweep.take("format") {
            format = match val.as_str() {
                "csv" => OutputFormat::Csv,
                "json" => OutputFormat::Json,
                other => {
                    diags.push(Diagnostic::at(
                        line,
                        format!("format: expected csv or json, got {other:?}"),
                    ));
                    OutputFormat::Csv
                }
            };
        }
        if let Some((val, line)) = sweep.take("route") {
            if val != route.tag() {
                diags.push(Diagnostic::at(
                    line,
                    format!(
                        "route {val:?} in the spec disagrees with the `{}` subcommand",
                        route.tag()
                    ),
                ));
            }
        }
        sweep.complain_about_unknown_keys(&mut diags);

        let needs_gap_grid = route != Route::Toy;
        let mut grid = view(&mut cfg, "grid");
        let mut gaps = Vec::new();
        let mut temperatures = vec![0.0];
        match grid.take("gap_m") {
            Some((val, line)) => {
                gaps = parse_grid(&val, line, "gap_m", &mut diags);
                if gaps.is_empty() && needs_gap_grid {
                    diags.push(Diagnostic::at(line, "gap_m: empty grid".to_string()));
                }
                for &g in &gaps {
                    if g <= 0.0 {
                        diags.push(Diagnostic::at(
                            line,
                            format!("gap_m: gaps must be positive, got {g:e}"),
                        ));
                    }
                }
            }
            None if needs_gap_grid => diags.push(Diagnostic::global(
                "section [grid] must define `gap_m` for this route",
            )),
            None => {}
        }
        if let Some((val, line)) = grid.take("temperature_K") {
            temperatures = parse_grid(&val, line, "temperature_K", &mut diags);
            if temperatures.is_empty() {
                diags.push(Diagnostic::at(line, "temperature_K: empty grid".to_string()));
            }
            for &t in &temperatures {
                if t < 0.0 {
                    diags.push(Diagnostic::at(
                        line,
                        format!("temperature_K: temperatures must be >= 0, got {t:e}"),
                    ));
                }
            }
        }
        grid.complain_about_unknown_keys(&mut diags);

        let needs_materials = matches!(route, Route::Lifshitz | Route::Compare);
        let (left, right) = if needs_materials {
            (
                parse_material(&mut cfg, "material.left", &mut diags),
                parse_material(&mut cfg, "material.right", &mut diags),
            )
        } else {
            (DielectricModel::PerfectMirror, DielectricModel::PerfectMirror)
        };

        let modesum = parse_modesum(&mut cfg, &mut diags);
        let toy = parse_toy(&mut cfg, &mut diags);
        if route == Route::Toy && toy.is_none() {
            diags.push(Diagnostic::global(
                "the toy route requires a [toy] section",
            ));
        }

        for section in &cfg.sections {
            if !matches!(
                section.name.as_str(),
                "sweep" | "grid" | "material.left" | "material.right" | "modesum" | "toy"
            ) {
                diags.push(Diagnostic::at(
                    section.line,
                    format!("unknown section [{}]", section.name),
                ));
            }
        }

        if diags.is_empty() {
            Ok(SweepSpec {
                route,
                tol,
                out,
                format,
                gaps,
                temperatures,
                left,
                right,
                modesum,
                toy,
            })
        } else {
            Err(diags)
        }
    }
}
