use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use xpm_core::diagonalization::nonlinear_shift;
use xpm_core::perturbation::{evaluate_perturbative, phi_gaussian};
use xpm_core::sweep::{convention_sensitivity, divergence_report, find_max_phase, run_sweep};
use xpm_core::table::{emit_table, TableFormat};
use xpm_core::validate::run_checks;
use xpm_core::{Config, DerivedQuantities, Error};

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_IO: u8 = 4;

/// Single-photon cross-phase modulation in a cavity-enhanced ladder medium.
#[derive(Debug, Parser)]
#[command(name = "xpm", version)]
struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true, env = "XPM_CONFIG")]
    config: Option<PathBuf>,

    /// Override one configuration key; applied after the file. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    /// Print the report on standard output as JSON.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mode geometry, fields, couplings and atom numbers.
    Derive,
    /// Both methods at one control detuning.
    Phase {
        /// Δ/2π in MHz.
        #[arg(long, allow_hyphen_values = true)]
        delta_mhz: f64,
        /// Also integrate the perturbative shift over the Gaussian mode.
        #[arg(long)]
        gauss: bool,
    },
    /// Control-detuning sweep written as a table.
    Sweep {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Fill the phi_gauss_rad column.
        #[arg(long)]
        gauss: bool,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        min_mhz: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        max_mhz: Option<f64>,
    },
    /// Run the built-in consistency checks.
    Validate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

impl From<Format> for TableFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => TableFormat::Csv,
            Format::Jsonl => TableFormat::Jsonl,
        }
    }
}

#[derive(Debug, Serialize)]
struct DerivedBlock {
    waist_m: f64,
    rayleigh_range_m: f64,
    reference_wavelength_m: f64,
    cylinder_volume_m3: f64,
    lifetime_formula: &'static str,
    interaction_time_s: f64,
    interaction_time_field_decay_s: f64,
    interaction_time_energy_decay_s: f64,
    control_field_v_per_m: f64,
    signal_field_v_per_m: f64,
    g1_rad_per_s: f64,
    g2_rad_per_s: f64,
    g3_rad_per_s: f64,
    n_total: f64,
    n_eff: f64,
    splitting_rad_per_s: f64,
}

impl DerivedBlock {
    fn new(d: &DerivedQuantities, config: &Config) -> Self {
        Self {
            waist_m: d.mode.waist,
            rayleigh_range_m: d.mode.rayleigh_range,
            reference_wavelength_m: d.mode.reference_wavelength,
            cylinder_volume_m3: d.mode.cylinder_volume,
            lifetime_formula: config.lifetime_formula.as_str(),
            interaction_time_s: d.mode.interaction_time,
            interaction_time_field_decay_s: d.interaction_time_field_decay,
            interaction_time_energy_decay_s: d.interaction_time_energy_decay,
            control_field_v_per_m: d.control_field,
            signal_field_v_per_m: d.signal_field,
            g1_rad_per_s: d.couplings.g1,
            g2_rad_per_s: d.couplings.g2,
            g3_rad_per_s: d.couplings.g3,
            n_total: d.n_total,
            n_eff: d.n_eff,
            splitting_rad_per_s: d.splitting,
        }
    }
}

/// What a command produced: the report body and the exit status.
struct Outcome {
    result: Value,
    warnings: Vec<String>,
    code: u8,
}

struct Failure {
    error: Error,
    partial: Option<Value>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            error,
            partial: None,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => EXIT_CONFIG,
        Error::Io { .. } | Error::Parse { .. } => EXIT_IO,
        _ => EXIT_DOMAIN,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = match cli.command {
        Command::Derive => "derive",
        Command::Phase { .. } => "phase",
        Command::Sweep { .. } => "sweep",
        Command::Validate => "validate",
    };

    let mut overrides = cli.overrides.clone();
    if let Command::Sweep {
        gauss,
        points,
        min_mhz,
        max_mhz,
        ..
    } = &cli.command
    {
        if *gauss {
            overrides.push("sweep_gauss=true".into());
        }
        if let Some(n) = points {
            overrides.push(format!("sweep_points={n}"));
        }
        if let Some(x) = min_mhz {
            overrides.push(format!("sweep_min_mhz={x}"));
        }
        if let Some(x) = max_mhz {
            overrides.push(format!("sweep_max_mhz={x}"));
        }
    }

    let mut report = Map::new();
    report.insert("command".into(), json!(name));
    let outcome = Config::load(cli.config.as_deref(), &overrides)
        .map_err(Failure::from)
        .and_then(|config| {
            let echo: Map<String, Value> = config
                .entries()
                .into_iter()
                .map(|(k, v)| (k.to_string(), json!(v)))
                .collect();
            report.insert("config".into(), Value::Object(echo));
            match &cli.command {
                Command::Derive => cmd_derive(&config, &mut report),
                Command::Phase { delta_mhz, gauss } => {
                    cmd_phase(&config, *delta_mhz, *gauss, &mut report)
                }
                Command::Sweep { out, format, .. } => {
                    cmd_sweep(&config, out, (*format).into(), &mut report)
                }
                Command::Validate => cmd_validate(&config),
            }
        });

    let code = match outcome {
        Ok(o) => {
            report.insert("result".into(), o.result);
            for w in &o.warnings {
                eprintln!("warning: {w}");
            }
            report.insert("warnings".into(), json!(o.warnings));
            o.code
        }
        Err(Failure { error, partial }) => {
            eprintln!("error: {error}");
            if let Some(p) = partial {
                report.insert("result".into(), p);
            }
            report.insert(
                "error".into(),
                json!({ "kind": error.tag(), "message": error.to_string() }),
            );
            exit_code(&error)
        }
    };
    print_report(&Value::Object(report), cli.json);
    ExitCode::from(code)
}

fn print_report(report: &Value, as_json: bool) {
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(report).expect("report serializes")
        );
    } else {
        let mut lines = Vec::new();
        flatten("", report, &mut lines);
        for l in lines {
            println!("{l}");
        }
    }
}

/// `a.b.c = value` lines, one per leaf.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Value::String(s) => out.push(format!("{prefix} = {s}")),
        Value::Null => out.push(format!("{prefix} =")),
        other => out.push(format!("{prefix} = {other}")),
    }
}

fn derive_block(
    config: &Config,
    report: &mut Map<String, Value>,
) -> Result<(xpm_core::CavitySystem, DerivedQuantities), Failure> {
    let system = config.system()?;
    let derived = system.derive()?;
    report.insert("derived".into(), json!(DerivedBlock::new(&derived, config)));
    Ok((system, derived))
}

fn density_warning(d: &DerivedQuantities) -> Option<String> {
    (d.n_eff == 0.0)
        .then(|| "density is zero: N_eff = 0 and no cross phase is produced".to_string())
}

fn cmd_derive(config: &Config, report: &mut Map<String, Value>) -> Result<Outcome, Failure> {
    let (_, d) = derive_block(config, report)?;
    eprintln!(
        "w0 = {:.2} um, V = {:.4e} m^3, t = {:.1} ns ({} ns with energy decay), N_eff = {:.4e}",
        d.mode.waist * 1e6,
        d.mode.cylinder_volume,
        d.interaction_time_field_decay * 1e9,
        (d.interaction_time_energy_decay * 1e9 * 10.0).round() / 10.0,
        d.n_eff
    );
    Ok(Outcome {
        result: json!({}),
        warnings: density_warning(&d).into_iter().collect(),
        code: 0,
    })
}

fn cmd_phase(
    config: &Config,
    delta_mhz: f64,
    gauss: bool,
    report: &mut Map<String, Value>,
) -> Result<Outcome, Failure> {
    let (system, d) = derive_block(config, report)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let s = system.scenario_from(
        &d,
        two_pi * delta_mhz * 1e6,
        two_pi * config.small_delta_mhz * 1e6,
    );
    let mut warnings: Vec<String> = density_warning(&d).into_iter().collect();
    let mut result = Map::new();
    result.insert("delta_hz".into(), json!(delta_mhz * 1e6));

    let pert = evaluate_perturbative(&s, system.options.validity_threshold);
    let mut first_error = None;
    match pert {
        Ok(p) => {
            result.insert("phi_pert_rad".into(), json!(p.phase));
            result.insert("n1".into(), json!(p.n1));
            result.insert("valid_pert".into(), json!(p.valid));
            if !p.valid {
                warnings.push(format!(
                    "perturbative result invalid: N1 = {:.3e} is not below {}",
                    p.n1, system.options.validity_threshold
                ));
            }
            eprintln!(
                "perturbative: phi = {:.6e} rad, N1 = {:.3e}, valid = {}",
                p.phase, p.n1, p.valid
            );
        }
        Err(e) => {
            eprintln!("perturbative: {e}");
            first_error = Some(e);
        }
    }
    if gauss {
        match phi_gaussian(&d.mode, system.medium.density, &s, &config.quadrature()) {
            Ok(g) => {
                result.insert("phi_gauss_rad".into(), json!(g));
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    match nonlinear_shift(&s, system.options.overlap_threshold) {
        Ok(r) => {
            result.insert("phi_diag_rad".into(), json!(r.phase));
            result.insert("dressed_overlap".into(), json!(r.dressed_overlap));
            result.insert("nonlinear_shift_rad_per_s".into(), json!(r.nonlinear));
            result.insert("full_shift_rad_per_s".into(), json!(r.full_shift));
            eprintln!(
                "diagonalization: phi = {:.6e} rad, overlap = {:.4}",
                r.phase, r.dressed_overlap
            );
        }
        Err(e) => {
            if let Error::StrongMixing { overlap, .. } = &e {
                result.insert("dressed_overlap".into(), json!(overlap));
                warnings.push(e.to_string());
            }
            first_error.get_or_insert(e);
        }
    }
    match first_error {
        None => Ok(Outcome {
            result: Value::Object(result),
            warnings,
            code: 0,
        }),
        Some(error) => {
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            report.insert("warnings".into(), json!(warnings));
            Err(Failure {
                error,
                partial: Some(Value::Object(result)),
            })
        }
    }
}

fn cmd_sweep(
    config: &Config,
    out: &std::path::Path,
    format: TableFormat,
    report: &mut Map<String, Value>,
) -> Result<Outcome, Failure> {
    let (system, d) = derive_block(config, report)?;
    let spec = config.sweep_spec()?;
    let points = run_sweep(&spec)?;
    emit_table(&points, format, out)?;
    let mut warnings: Vec<String> = density_warning(&d).into_iter().collect();
    let failed = points.iter().filter(|p| p.error.is_some()).count();
    if failed > 0 {
        warnings.push(format!(
            "{failed} of {} points carry an error tag",
            points.len()
        ));
    }

    let threshold = system.options.overlap_threshold;
    let max = find_max_phase(&points, threshold).ok();
    let divergence = divergence_report(&points);
    match max {
        Some(m) => eprintln!(
            "max |phi_diag| = {:.4} mrad at Delta/2pi = {:.4e} Hz",
            m.phi_rad.abs() * 1e3,
            m.delta_hz
        ),
        None => eprintln!("max |phi_diag|: no point with an identified dressed state"),
    }
    match (divergence.converged_delta_hz, divergence.n1_at_convergence) {
        (Some(f), n1) => eprintln!(
            "methods agree within 2% for Delta/2pi >= {f:.4e} Hz (N1 = {})",
            n1.map_or("n/a".into(), |x| format!("{x:.3e}"))
        ),
        (None, _) => eprintln!("methods do not agree within 2% at the top of the sweep"),
    }
    let sensitivity = match convention_sensitivity(&spec) {
        Ok(rows) => {
            for r in &rows {
                match r.max {
                    Some(m) => eprintln!("  {:<48} {:>9.3} mrad", r.label, m.phi_rad.abs() * 1e3),
                    None => eprintln!("  {:<48} {:>9}", r.label, "n/a"),
                }
            }
            json!(rows)
        }
        Err(e) => {
            warnings.push(format!("convention sensitivity skipped: {e}"));
            Value::Null
        }
    };
    eprintln!("wrote {} rows to {}", points.len(), out.display());
    Ok(Outcome {
        result: json!({
            "output": out.display().to_string(),
            "format": format.as_str(),
            "rows": points.len(),
            "max_phase": max,
            "divergence": divergence,
            "convention_sensitivity": sensitivity,
        }),
        warnings,
        code: 0,
    })
}

fn cmd_validate(config: &Config) -> Result<Outcome, Failure> {
    let report = run_checks(config);
    for c in &report.checks {
        eprintln!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let failing: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    let warnings = failing
        .iter()
        .map(|n| format!("check failed: {n}"))
        .collect();
    Ok(Outcome {
        result: json!(report),
        warnings,
        code: if failing.is_empty() {
            0
        } else {
            EXIT_VALIDATION
        },
    })
}
