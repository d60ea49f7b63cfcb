//! `qst` command line: argument parsing, config files, presets and dispatch.
//!
//! Parameters come from three layers, later ones winning: a figure preset
//! (`--preset figN`), a TOML config file (`--config path`), explicit flags.
//! Config keys are the flag names with `-` replaced by `_`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::chain::{ChainConfig, ChainSpec};
use crate::dynamics::{default_time_step, evolve, uniform_grid};
use crate::eigen::decompose;
use crate::error::{QstError, Result};
use crate::experiments::{
    compare_tstar, experimental_ratio, report_point, run_sweep, scan_spectrum_vs_p, threads_from_env, Axis,
    LatticeParams, SweepGrid, DEFAULT_MAX_POINTS,
};
use crate::metrics::{identify_dimer_modes, t_star_estimate, TransferOptions};
use crate::table::{
    eigen_table, report_table, spectrum_table, sweep_table, trajectory_table, tstar_table, write_table_to, Cell,
    Format, Table, UNITS_NOTE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Fields,
    Spectrum,
    Evolve,
    Report,
    Sweep,
    Tstar,
    ExpRatio,
}

impl Verb {
    pub fn name(&self) -> &'static str {
        match self {
            Verb::Fields => "fields",
            Verb::Spectrum => "spectrum",
            Verb::Evolve => "evolve",
            Verb::Report => "report",
            Verb::Sweep => "sweep",
            Verb::Tstar => "tstar",
            Verb::ExpRatio => "exp-ratio",
        }
    }
}

/// Every setting a command can take. Absent keys fall back to per-verb defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_edge: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_bulk: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relevance_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_metrics: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis1: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis1_values: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis2_values: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trap_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_spacing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hopping_hz: Option<f64>,
    /// Reserved; nothing in the tool is random.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),* $(,)?) => {
        RunConfig { $($field: $top.$field.or($base.$field),)* }
    };
}

impl RunConfig {
    /// Keys set in `top` win over `self`.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        overlay!(
            self, top, n_sites, a, p, j_edge, j_bulk, fields, couplings, source, target, horizon, dt, threshold,
            window, relevance_floor, max_horizon, peak_tolerance, time_metrics, amplitudes, axis1, axis1_values,
            axis2, axis2_values, max_points, p_grid, a_grid, format, mass, trap_hz, lattice_spacing, hopping_hz,
            seed,
        )
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| QstError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| QstError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| QstError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text).map_err(|e| QstError::Config(format!("{}: {e}", path.display())))
    }

    fn require<T: Clone>(value: &Option<T>, name: &'static str) -> Result<T> {
        value
            .clone()
            .ok_or_else(|| QstError::invalid(name, "missing (pass a flag, --config or --preset)"))
    }

    pub fn chain_config(&self) -> Result<ChainConfig> {
        let n_sites = match (&self.n_sites, &self.fields) {
            (Some(n), _) => *n,
            (None, Some(f)) => f.len(),
            (None, None) => Self::require(&self.n_sites, "n_sites")?,
        };
        Ok(ChainConfig {
            n_sites,
            a: self.a.unwrap_or(0.0),
            p: self.p.unwrap_or(0.0),
            j_edge: self.j_edge.unwrap_or(1.0),
            j_bulk: self.j_bulk.unwrap_or(1.0),
            fields: self.fields.clone(),
            couplings: self.couplings.clone(),
        })
    }

    pub fn chain(&self) -> Result<ChainSpec> {
        self.chain_config()?.to_chain()
    }

    pub fn transfer_options(&self) -> TransferOptions {
        let d = TransferOptions::default();
        TransferOptions {
            source: self.source.unwrap_or(d.source),
            target: self.target.or(d.target),
            threshold: self.threshold.unwrap_or(d.threshold),
            horizon: self.horizon.or(d.horizon),
            window: self.window.or(d.window),
            relevance_floor: self.relevance_floor.unwrap_or(d.relevance_floor),
            max_horizon: self.max_horizon.unwrap_or(d.max_horizon),
            peak_tolerance: self.peak_tolerance.unwrap_or(d.peak_tolerance),
            time_metrics: self.time_metrics.unwrap_or(d.time_metrics),
        }
    }

    pub fn output_format(&self) -> Result<Format> {
        self.format.as_deref().map_or(Ok(Format::Csv), Format::from_str)
    }
}

/// Parses a grid: `start:stop:step` (inclusive), `log:start:stop:count`, or
/// a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| QstError::invalid("grid", format!("`{spec}`: {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number")));
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        ["log", start, stop, count] => {
            let (start, stop) = (num(start)?, num(stop)?);
            let count: usize = count.trim().parse().map_err(|_| bad("count must be an integer"))?;
            if !(start > 0.0 && stop >= start) || count == 0 {
                return Err(bad("need 0 < start <= stop and count >= 1"));
            }
            if count == 1 {
                vec![start]
            } else {
                let (l0, l1) = (start.log10(), stop.log10());
                (0..count)
                    .map(|k| {
                        if k + 1 == count {
                            stop
                        } else {
                            10f64.powf(l0 + (l1 - l0) * k as f64 / (count - 1) as f64)
                        }
                    })
                    .collect()
            }
        }
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(bad("need step > 0 and stop >= start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 10_000_000 {
                return Err(bad("too many points"));
            }
            // Rounded to 12 significant digits so 0.2 + 2*0.05 prints as 0.3.
            (0..count)
                .map(|k| {
                    let v = start + step * k as f64;
                    format!("{v:.11e}").parse::<f64>().unwrap_or(v)
                })
                .collect()
        }
        [_] => spec.split(',').map(num).collect::<Result<Vec<f64>>>()?,
        _ => return Err(bad("expected start:stop:step, log:start:stop:count or a list")),
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad("values must be finite"));
    }
    Ok(values)
}

pub const PRESET_NAMES: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];

pub fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "fig2" => Some(include_str!("../presets/fig2.toml")),
        "fig3" => Some(include_str!("../presets/fig3.toml")),
        "fig4" => Some(include_str!("../presets/fig4.toml")),
        "fig5" => Some(include_str!("../presets/fig5.toml")),
        "fig6" => Some(include_str!("../presets/fig6.toml")),
        _ => None,
    }
}

pub fn preset(name: &str) -> Result<RunConfig> {
    let text = preset_text(name).ok_or_else(|| {
        QstError::invalid("preset", format!("unknown preset `{name}` ({})", PRESET_NAMES.join(", ")))
    })?;
    RunConfig::from_toml(text)
}

#[derive(Debug, Parser)]
#[command(name = "qst", version, about = "Quantum state transfer in XX chains with on-site potentials")]
struct Cli {
    #[command(subcommand)]
    verb: VerbArgs,
}

#[derive(Debug, Subcommand)]
enum VerbArgs {
    /// On-site fields B_n of the power-law potential.
    Fields(Flags),
    /// Eigendecomposition, or the spectrum versus p with --p-grid.
    Spectrum(Flags),
    /// Site populations after an excitation starts on the source site.
    Evolve(Flags),
    /// QST drop, dimer energies and transfer times for one chain.
    Report(Flags),
    /// Transfer reports over a one- or two-axis parameter grid.
    Sweep(Flags),
    /// Threshold transfer time versus the two-level estimate along --a-grid.
    Tstar(Flags),
    /// Trap potential over hopping for an optical lattice.
    #[command(name = "exp-ratio")]
    ExpRatio(Flags),
}

#[derive(Debug, Clone, Default, Args)]
struct Flags {
    /// TOML file with default parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Figure preset (fig2 … fig6).
    #[arg(long)]
    preset: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "n", visible_alias = "n-sites")]
    n_sites: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    j_edge: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    j_bulk: Option<f64>,
    /// Explicit fields, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    fields: Option<Vec<f64>>,
    /// Explicit couplings, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    couplings: Option<Vec<f64>>,
    #[arg(long)]
    source: Option<usize>,
    #[arg(long)]
    target: Option<usize>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    window: Option<f64>,
    #[arg(long)]
    relevance_floor: Option<f64>,
    #[arg(long)]
    max_horizon: Option<f64>,
    #[arg(long)]
    peak_tolerance: Option<f64>,
    #[arg(long)]
    time_metrics: Option<bool>,
    /// Add re_k,im_k columns to `evolve` output.
    #[arg(long)]
    amplitudes: bool,
    #[arg(long)]
    axis1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    axis1_values: Option<String>,
    #[arg(long)]
    axis2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    axis2_values: Option<String>,
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    p_grid: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a_grid: Option<String>,
    /// csv (default) or jsonl.
    #[arg(long)]
    format: Option<String>,
    /// Atomic mass in kg.
    #[arg(long)]
    mass: Option<f64>,
    /// Trap frequency ω/2π in Hz.
    #[arg(long)]
    trap_hz: Option<f64>,
    /// Lattice spacing in m.
    #[arg(long)]
    lattice_spacing: Option<f64>,
    /// Hopping J/ħ in 1/s.
    #[arg(long)]
    hopping_hz: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Flags {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            n_sites: self.n_sites,
            a: self.a,
            p: self.p,
            j_edge: self.j_edge,
            j_bulk: self.j_bulk,
            fields: self.fields.clone(),
            couplings: self.couplings.clone(),
            source: self.source,
            target: self.target,
            horizon: self.horizon,
            dt: self.dt,
            threshold: self.threshold,
            window: self.window,
            relevance_floor: self.relevance_floor,
            max_horizon: self.max_horizon,
            peak_tolerance: self.peak_tolerance,
            time_metrics: self.time_metrics,
            amplitudes: self.amplitudes.then_some(true),
            axis1: self.axis1.clone(),
            axis1_values: self.axis1_values.clone(),
            axis2: self.axis2.clone(),
            axis2_values: self.axis2_values.clone(),
            max_points: self.max_points,
            p_grid: self.p_grid.clone(),
            a_grid: self.a_grid.clone(),
            format: self.format.clone(),
            mass: self.mass,
            trap_hz: self.trap_hz,
            lattice_spacing: self.lattice_spacing,
            hopping_hz: self.hopping_hz,
            seed: self.seed,
        }
    }
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    pub verb: Verb,
    pub params: RunConfig,
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    /// Argument syntax errors, and `--help` / `--version`.
    Clap(clap::Error),
    Run(QstError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Clap(e) => write!(f, "{e}"),
            CliError::Run(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<QstError> for CliError {
    fn from(e: QstError) -> Self {
        CliError::Run(e)
    }
}

impl CliError {
    /// 0 for help/version, 2 for usage errors, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Run(e) if e.is_numerical() => 3,
            CliError::Run(QstError::Io { .. }) => 1,
            CliError::Run(_) => 2,
        }
    }
}

/// Parses `argv` (including the program name) into a [`Command`].
pub fn parse_command<I, T>(argv: I) -> std::result::Result<Command, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    let (verb, flags) = match cli.verb {
        VerbArgs::Fields(f) => (Verb::Fields, f),
        VerbArgs::Spectrum(f) => (Verb::Spectrum, f),
        VerbArgs::Evolve(f) => (Verb::Evolve, f),
        VerbArgs::Report(f) => (Verb::Report, f),
        VerbArgs::Sweep(f) => (Verb::Sweep, f),
        VerbArgs::Tstar(f) => (Verb::Tstar, f),
        VerbArgs::ExpRatio(f) => (Verb::ExpRatio, f),
    };
    let mut params = RunConfig::default();
    if let Some(name) = &flags.preset {
        params = params.overlay(preset(name)?);
    }
    if let Some(path) = &flags.config {
        params = params.overlay(RunConfig::load(path)?);
    }
    params = params.overlay(flags.to_config());
    params.output_format()?;
    Ok(Command {
        verb,
        params,
        out: flags.out,
    })
}

/// Produces the output table of a command and the comment lines above it.
pub fn execute(cmd: &Command) -> Result<(Table, String)> {
    let params = &cmd.params;
    let mut preamble = UNITS_NOTE.to_string();
    let table = match cmd.verb {
        Verb::Fields => {
            let chain = params.chain()?;
            let mut t = Table::new(["site", "field"]);
            for (k, b) in chain.fields().iter().enumerate() {
                t.push(vec![(k + 1).into(), (*b).into()]);
            }
            t
        }
        Verb::Spectrum => match &params.p_grid {
            Some(grid) => {
                let n = RunConfig::require(&params.n_sites, "n_sites")?;
                let rows = scan_spectrum_vs_p(
                    n,
                    params.a.unwrap_or(0.0),
                    params.j_edge.unwrap_or(1.0),
                    params.j_bulk.unwrap_or(1.0),
                    &parse_grid(grid)?,
                )?;
                spectrum_table(&rows)
            }
            None => eigen_table(&decompose(&params.chain()?.to_single_excitation())?),
        },
        Verb::Evolve => {
            let chain = params.chain()?;
            let ed = decompose(&chain.to_single_excitation())?;
            let opts = params.transfer_options();
            let horizon = match params.horizon {
                Some(h) => h,
                None => {
                    let dimer = identify_dimer_modes(&ed);
                    let est = dimer
                        .is_identified()
                        .then(|| t_star_estimate(dimer.e_plus, dimer.e_minus).ok())
                        .flatten();
                    est.map_or(200.0, |t| 20.0 * t).min(opts.max_horizon)
                }
            };
            let dt = params.dt.unwrap_or_else(|| default_time_step(&ed));
            let traj = evolve(&ed, opts.source, &uniform_grid(horizon, dt)?)?;
            trajectory_table(&traj, params.amplitudes.unwrap_or(false))
        }
        Verb::Report => {
            let cfg = params.chain_config()?;
            let report = report_point(&cfg, &params.transfer_options())?;
            preamble.push_str(&format!(
                "\n# status: {}; horizon: {}",
                report.status,
                report.horizon.map_or("none".to_string(), crate::table::format_float)
            ));
            report_table(&[(cfg, report)])
        }
        Verb::Sweep => {
            let base = params.chain_config()?;
            let axis1: Axis = RunConfig::require(&params.axis1, "axis1")?.parse()?;
            let values1 = parse_grid(&RunConfig::require(&params.axis1_values, "axis1_values")?)?;
            let axis2 = match (&params.axis2, &params.axis2_values) {
                (Some(name), Some(values)) => Some((name.parse::<Axis>()?, parse_grid(values)?)),
                (None, None) => None,
                _ => return Err(QstError::invalid("axis2", "axis2 and axis2_values go together")),
            };
            let grid = SweepGrid::new(
                base,
                (axis1, values1),
                axis2,
                params.max_points.unwrap_or(DEFAULT_MAX_POINTS),
            )?;
            let rows = run_sweep(&grid, &params.transfer_options(), threads_from_env())?;
            sweep_table(&rows)
        }
        Verb::Tstar => {
            let n = RunConfig::require(&params.n_sites, "n_sites")?;
            let grid = parse_grid(&RunConfig::require(&params.a_grid, "a_grid")?)?;
            let rows = compare_tstar(
                n,
                params.p.unwrap_or(0.0),
                params.j_edge.unwrap_or(1.0),
                params.j_bulk.unwrap_or(1.0),
                &grid,
                &params.transfer_options(),
            )?;
            tstar_table(&rows)
        }
        Verb::ExpRatio => {
            let reference = LatticeParams::rubidium_reference();
            let lattice = LatticeParams {
                mass: params.mass.unwrap_or(reference.mass),
                trap_angular_frequency: params
                    .trap_hz
                    .map_or(reference.trap_angular_frequency, |f| 2.0 * std::f64::consts::PI * f),
                lattice_spacing: params.lattice_spacing.unwrap_or(reference.lattice_spacing),
                hopping_over_hbar: params.hopping_hz.unwrap_or(reference.hopping_over_hbar),
            };
            let ratio = experimental_ratio(&lattice)?;
            let mut t = Table::new(["mass", "omega_trap", "lattice_spacing", "hopping_over_hbar", "ratio"]);
            t.push(vec![
                lattice.mass.into(),
                lattice.trap_angular_frequency.into(),
                lattice.lattice_spacing.into(),
                lattice.hopping_over_hbar.into(),
                Cell::Float(ratio),
            ]);
            preamble = "# ratio = (m*omega_trap^2*a_lat^2/2) / (hbar*J/hbar), SI inputs".to_string();
            t
        }
    };
    Ok((table, preamble))
}

/// Runs a parsed command, writing its table to `--out` or standard output.
pub fn run(cmd: &Command) -> Result<()> {
    let (table, preamble) = execute(cmd)?;
    let format = cmd.params.output_format()?;
    write_table_to(&table, format, Some(&preamble), cmd.out.as_deref())
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_command(argv).and_then(|cmd| run(&cmd).map_err(CliError::Run));
    match result {
        Ok(()) => 0,
        Err(CliError::Clap(e)) => {
            let code = e.exit_code();
            let _ = e.print();
            code
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fields_flags() {
        let cmd = parse_command(["qst", "fields", "--n", "8", "--a", "0.5", "--p", "2"]).unwrap();
        assert_eq!(cmd.verb, Verb::Fields);
        assert_eq!(cmd.params.n_sites, Some(8));
        assert_eq!(cmd.params.a, Some(0.5));
        assert_eq!(cmd.params.p, Some(2.0));
    }

    #[test]
    fn preset_expands_and_flags_win() {
        let cmd = parse_command(["qst", "sweep", "--preset", "fig2", "--out", "fig2.csv"]).unwrap();
        assert_eq!(cmd.verb, Verb::Sweep);
        assert_eq!(cmd.params.axis1.as_deref(), Some("p"));
        assert_eq!(cmd.params.a, Some(0.5));
        assert_eq!(cmd.out, Some(PathBuf::from("fig2.csv")));
        let cmd = parse_command(["qst", "sweep", "--preset", "fig2", "--a", "0.25"]).unwrap();
        assert_eq!(cmd.params.a, Some(0.25));
    }

    #[test]
    fn unknown_inputs_are_usage_errors() {
        let err = parse_command(["qst", "fields", "--bogus", "1"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("--bogus"));
        let err = parse_command(["qst", "fields", "--n", "eight"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = parse_command(["qst", "sweep", "--preset", "fig9"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = parse_command(["qst", "report", "--format", "xml"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = RunConfig::from_toml("n_sites = 4\nwidth = 3\n").unwrap_err();
        assert!(err.to_string().contains("width"));
    }

    #[test]
    fn presets_round_trip() {
        for name in PRESET_NAMES {
            let cfg = preset(name).unwrap();
            assert_eq!(RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap(), cfg, "{name}");
        }
    }

    #[test]
    fn grids() {
        let g = parse_grid("0:4:0.05").unwrap();
        assert_eq!(g.len(), 81);
        assert_eq!(g[80], 4.0);
        assert_eq!(parse_grid("0.2:1:0.05").unwrap()[2], 0.3);
        let g = parse_grid("log:0.01:1:21").unwrap();
        assert_eq!(g.len(), 21);
        assert!((g[0] - 0.01).abs() < 1e-15 && g[20] == 1.0 && (g[10] - 0.1).abs() < 1e-12);
        assert_eq!(parse_grid("0.3,0.5,1").unwrap(), vec![0.3, 0.5, 1.0]);
        assert_eq!(parse_grid("2").unwrap(), vec![2.0]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("log:0:1:3").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Run(QstError::DegeneratePair).exit_code(), 3);
        assert_eq!(CliError::Run(QstError::invalid("a", "x")).exit_code(), 2);
    }

    #[test]
    fn report_table_from_command() {
        let cmd = parse_command([
            "qst", "report", "--n", "8", "--a", "0.5", "--p", "2", "--j-edge", "1", "--j-bulk", "1",
        ])
        .unwrap();
        let (table, preamble) = execute(&cmd).unwrap();
        assert_eq!(table.columns.len(), 14);
        assert_eq!(table.rows.len(), 1);
        assert!(preamble.contains("hbar/J"));
    }
}
