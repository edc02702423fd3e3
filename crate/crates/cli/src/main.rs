//! `casimir` — sweep driver for the three Casimir routes.

mod config;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Diagnostic, RawConfig, Route, SweepSpec};
use runner::RunError;

#[derive(Debug, Parser)]
#[command(
    name = "casimir",
    about = "Casimir pressure via mode summation, Lifshitz theory and a lattice toy model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Sweep spec file ([sweep]/[grid]/[material.*]/[modesum]/[toy] sections).
    #[arg(long)]
    config: PathBuf,
    /// Output path; stdout when omitted. Overrides `sweep.out` in the spec.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format. Overrides `sweep.format` in the spec.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Relative tolerance for quadrature and Matsubara truncation.
    /// Overrides `sweep.tol` in the spec.
    #[arg(long)]
    tol: Option<f64>,
    /// Extra `section.key=value` override; may be given repeatedly.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Regularized vacuum mode summation (divergences reported explicitly).
    Modesum(CommonArgs),
    /// Lifshitz theory for planar dielectrics at zero or finite temperature.
    Lifshitz(CommonArgs),
    /// Discretized coupled field-matter lattice model.
    Toy(CommonArgs),
    /// Run the mode-sum and Lifshitz routes (plus the toy model when
    /// configured) on a shared grid and report their relative deviation.
    Compare(CommonArgs),
    /// Parse and validate a spec, reporting every problem; computes nothing.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// Route the spec is intended for (defaults to `sweep.route` or,
        /// failing that, lifshitz).
        #[arg(long, value_parser = ["modesum", "lifshitz", "toy", "compare"])]
        route: Option<String>,
    },
}

fn route_from_tag(tag: &str) -> Route {
    match tag {
        "modesum" => Route::ModeSum,
        "toy" => Route::Toy,
        "compare" => Route::Compare,
        _ => Route::Lifshitz,
    }
}

/// Read the spec file, apply CLI overrides, and build the typed spec,
/// accumulating every diagnostic.
fn load_spec(common: &CommonArgs, route: Route) -> Result<SweepSpec, Vec<Diagnostic>> {
    let text = std::fs::read_to_string(&common.config).map_err(|e| {
        vec![Diagnostic {
            line: None,
            message: format!("cannot read {}: {e}", common.config.display()),
        }]
    })?;
    let (mut raw, mut diags) = RawConfig::parse(&text);
    for spec in &common.set {
        if let Err(d) = raw.apply_override(spec) {
            diags.push(d);
        }
    }
    if let Some(tol) = common.tol {
        let _ = raw.apply_override(&format!("sweep.tol={tol}"));
    }
    if let Some(format) = &common.format {
        let _ = raw.apply_override(&format!("sweep.format={format}"));
    }
    match SweepSpec::from_raw(raw, route) {
        Ok(mut spec) if diags.is_empty() => {
            if let Some(out) = &common.out {
                spec.out = Some(out.clone());
            }
            Ok(spec)
        }
        Ok(_) => Err(diags),
        Err(mut more) => {
            diags.append(&mut more);
            Err(diags)
        }
    }
}

fn report_diagnostics(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("error: {d}");
    }
    eprintln!(
        "{} problem{} found",
        diags.len(),
        if diags.len() == 1 { "" } else { "s" }
    );
}

fn run_route(common: &CommonArgs, route: Route) -> ExitCode {
    let spec = match load_spec(common, route) {
        Ok(spec) => spec,
        Err(diags) => {
            report_diagnostics(&diags);
            return ExitCode::from(2);
        }
    };
    let rendered = match runner::run(&spec) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match runner::emit(&spec, &rendered) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(RunError::exit_code(&e) as u8)
        }
    }
}

/// Sniff `sweep.route` out of the raw text so `validate` can check a spec
/// without being told its route twice.
fn sniff_route(path: &PathBuf) -> Option<Route> {
    let text = std::fs::read_to_string(path).ok()?;
    let (raw, _) = RawConfig::parse(&text);
    raw.peek("sweep", "route").map(|tag| route_from_tag(&tag))
}

fn validate(common: &CommonArgs, route_flag: Option<&str>) -> ExitCode {
    let route = route_flag
        .map(route_from_tag)
        .or_else(|| sniff_route(&common.config))
        .unwrap_or(Route::Lifshitz);
    match load_spec(common, route) {
        Ok(spec) => {
            println!(
                "ok: {} route, {} grid point{}",
                spec.route.tag(),
                spec.grid_size(),
                if spec.grid_size() == 1 { "" } else { "s" }
            );
            ExitCode::SUCCESS
        }
        Err(diags) => {
            report_diagnostics(&diags);
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Modesum(c) => run_route(c, Route::ModeSum),
        Command::Lifshitz(c) => run_route(c, Route::Lifshitz),
        Command::Toy(c) => run_route(c, Route::Toy),
        Command::Compare(c) => run_route(c, Route::Compare),
        Command::Validate { common, route } => validate(common, route.as_deref()),
    }
}
