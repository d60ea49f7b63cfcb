//! Parameter sweeps and the optical-lattice conversion.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::chain::ChainConfig;
use crate::eigen::decompose;
use crate::error::{QstError, Result};
use crate::metrics::{identify_dimer_modes, transfer_report, TransferOptions, TransferReport};

/// CODATA 2018 values.
pub mod constants {
    /// Reduced Planck constant, J·s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Mass of a ⁸⁷Rb atom, kg.
    pub const RB87_MASS: f64 = 1.443_160_6e-25;
}

/// Chain parameter a sweep axis overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    A,
    P,
    JEdge,
    JBulk,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::A => "a",
            Axis::P => "p",
            Axis::JEdge => "j_edge",
            Axis::JBulk => "j_bulk",
        }
    }

    fn apply(&self, cfg: &mut ChainConfig, value: f64) {
        match self {
            Axis::A => cfg.a = value,
            Axis::P => cfg.p = value,
            Axis::JEdge => cfg.j_edge = value,
            Axis::JBulk => cfg.j_bulk = value,
        }
    }
}

impl FromStr for Axis {
    type Err = QstError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Axis::A),
            "p" => Ok(Axis::P),
            "j_edge" | "j-edge" => Ok(Axis::JEdge),
            "j_bulk" | "j-bulk" => Ok(Axis::JBulk),
            other => Err(QstError::invalid("axis", format!("unknown axis `{other}` (a, p, j_edge, j_bulk)"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const DEFAULT_MAX_POINTS: usize = 1_000_000;

/// One- or two-axis grid over a base chain; axis 1 is the outer (slow) index.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    axis1: (Axis, Vec<f64>),
    axis2: Option<(Axis, Vec<f64>)>,
    base: ChainConfig,
}

fn check_axis(axis: Axis, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(QstError::invalid("axis", format!("axis `{axis}` has no values")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(QstError::invalid("axis", format!("axis `{axis}` has non-finite values")));
    }
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err(QstError::invalid("axis", format!("axis `{axis}` must be ascending")));
    }
    Ok(())
}

impl SweepGrid {
    pub fn new(
        base: ChainConfig,
        axis1: (Axis, Vec<f64>),
        axis2: Option<(Axis, Vec<f64>)>,
        max_points: usize,
    ) -> Result<Self> {
        check_axis(axis1.0, &axis1.1)?;
        if let Some((axis, values)) = &axis2 {
            check_axis(*axis, values)?;
            if *axis == axis1.0 {
                return Err(QstError::invalid("axis2", "must differ from axis1"));
            }
        }
        if base.fields.is_some() || base.couplings.is_some() {
            return Err(QstError::invalid(
                "base",
                "sweeps need the power-law chain, not explicit fields/couplings",
            ));
        }
        let grid = Self { axis1, axis2, base };
        if grid.len() > max_points {
            return Err(QstError::invalid(
                "grid",
                format!("{} points exceed the limit of {max_points}", grid.len()),
            ));
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.axis1.1.len() * self.axis2.as_ref().map_or(1, |(_, v)| v.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn base(&self) -> &ChainConfig {
        &self.base
    }

    /// Chain configuration at flat index `k` (axis 1 major).
    pub fn point(&self, k: usize) -> ChainConfig {
        let inner = self.axis2.as_ref().map_or(1, |(_, v)| v.len());
        let mut cfg = self.base.clone();
        self.axis1.0.apply(&mut cfg, self.axis1.1[k / inner]);
        if let Some((axis, values)) = &self.axis2 {
            axis.apply(&mut cfg, values[k % inner]);
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: ChainConfig,
    pub outcome: std::result::Result<TransferReport, String>,
}

/// Report for a single chain configuration.
pub fn report_point(cfg: &ChainConfig, opts: &TransferOptions) -> Result<TransferReport> {
    let chain = cfg.to_chain()?;
    let ed = decompose(&chain.to_single_excitation())?;
    transfer_report(&ed, opts)
}

/// Worker count from `QST_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("QST_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Evaluates every grid point independently; row order is the grid order.
pub fn run_sweep(grid: &SweepGrid, opts: &TransferOptions, threads: Option<usize>) -> Result<Vec<SweepRow>> {
    let eval = |k: usize| {
        let params = grid.point(k);
        let outcome = report_point(&params, opts).map_err(|e| e.to_string());
        SweepRow { params, outcome }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| QstError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..grid.len()).into_par_iter().map(eval).collect()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub p: f64,
    pub values: Vec<f64>,
    pub index_plus: usize,
    pub index_minus: usize,
}

/// Full spectrum and dimer-mode indices (0-based into `values`) for each p.
pub fn scan_spectrum_vs_p(
    n_sites: usize,
    a: f64,
    j_edge: f64,
    j_bulk: f64,
    p_grid: &[f64],
) -> Result<Vec<SpectrumRow>> {
    check_axis(Axis::P, p_grid)?;
    p_grid
        .par_iter()
        .map(|&p| {
            let chain = ChainConfig::power_law(n_sites, a, p, j_edge, j_bulk).to_chain()?;
            let ed = decompose(&chain.to_single_excitation())?;
            let dimer = identify_dimer_modes(&ed);
            Ok(SpectrumRow {
                p,
                values: ed.values().to_vec(),
                index_plus: dimer.index_plus,
                index_minus: dimer.index_minus,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TstarRow {
    pub a: f64,
    pub t_threshold: Option<f64>,
    pub t_est: Option<f64>,
}

/// Threshold-crossing t* next to π/|E₊ − E₋| along a grid of potential depths.
pub fn compare_tstar(
    n_sites: usize,
    p: f64,
    j_edge: f64,
    j_bulk: f64,
    a_grid: &[f64],
    opts: &TransferOptions,
) -> Result<Vec<TstarRow>> {
    check_axis(Axis::A, a_grid)?;
    let opts = TransferOptions {
        time_metrics: true,
        ..opts.clone()
    };
    a_grid
        .par_iter()
        .map(|&a| {
            let cfg = ChainConfig::power_law(n_sites, a, p, j_edge, j_bulk);
            let chain = cfg.to_chain()?;
            let ed = decompose(&chain.to_single_excitation())?;
            let dimer = identify_dimer_modes(&ed);
            let t_est = if dimer.is_identified() {
                crate::metrics::t_star_estimate(dimer.e_plus, dimer.e_minus).ok()
            } else {
                None
            };
            let horizon = opts
                .horizon
                .unwrap_or(t_est.map_or(200.0, |t| 20.0 * t))
                .min(opts.max_horizon);
            let target = opts.target.unwrap_or(n_sites);
            let t_threshold =
                crate::metrics::first_crossing(&ed, opts.source, target, opts.threshold, horizon)?;
            Ok(TstarRow { a, t_threshold, t_est })
        })
        .collect()
}

/// Optical-lattice parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    pub mass: f64,
    pub trap_angular_frequency: f64,
    pub lattice_spacing: f64,
    pub hopping_over_hbar: f64,
}

impl LatticeParams {
    /// ⁸⁷Rb in a 532 nm lattice, ω_trap = 2π·103 Hz, J⁽⁰⁾/ħ = 940 s⁻¹.
    pub fn rubidium_reference() -> Self {
        Self {
            mass: constants::RB87_MASS,
            trap_angular_frequency: 2.0 * std::f64::consts::PI * 103.0,
            lattice_spacing: 532e-9,
            hopping_over_hbar: 940.0,
        }
    }
}

/// V_ext / J⁽⁰⁾ with V_ext = m·ω²·a_lat²/2.
pub fn experimental_ratio(params: &LatticeParams) -> Result<f64> {
    let fields = [
        ("mass", params.mass, false),
        ("trap_angular_frequency", params.trap_angular_frequency, true),
        ("lattice_spacing", params.lattice_spacing, false),
        ("hopping_over_hbar", params.hopping_over_hbar, false),
    ];
    for (name, value, zero_ok) in fields {
        let ok = value.is_finite() && (value > 0.0 || (zero_ok && value == 0.0));
        if !ok {
            return Err(QstError::invalid(name, format!("must be positive and finite, got {value}")));
        }
    }
    let v_ext = 0.5
        * params.mass
        * params.trap_angular_frequency.powi(2)
        * params.lattice_spacing.powi(2);
    Ok(v_ext / (constants::HBAR * params.hopping_over_hbar))
}
