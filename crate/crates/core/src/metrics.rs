//! Figures of merit for sender → receiver transfer.
//!
//! * QST drop ℱ = max_i |⟨1|ε_i⟩| − 1/√2. Zero means (|1⟩ ± |N⟩)/√2 are
//!   eigenstates; it depends on eigenvectors only.
//! * Dimer modes: the eigenstates closest to (|1⟩ ± |N⟩)/√2 and their
//!   energies E±, which set the two-level estimate t* ≈ π/|E₊ − E₋|.
//! * Transfer times from the dynamics: first crossing of a population
//!   threshold, and first relevant maximum of the moving-averaged population.
//!
//! Long horizons are scanned without a fixed grid. For the receiver
//! population, |dP_k/dt| ≤ |H_{k−1,k}| + |H_{k,k+1}|, so from a point where
//! P < θ the next step of length (θ − P)/L cannot jump over a crossing.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::chain::ChainSpec;
use crate::dynamics::{amplitude, check_site, Trajectory};
use crate::eigen::{decompose, EigenDecomposition, Parity};
use crate::error::{QstError, Result};

/// ℱ computed from the sender site.
pub fn qst_drop(ed: &EigenDecomposition) -> f64 {
    max_overlap(ed, 1) - FRAC_1_SQRT_2
}

/// ℱ with an arbitrary reference site.
pub fn qst_drop_from(ed: &EigenDecomposition, site: usize) -> Result<f64> {
    check_site(site, ed.dim())?;
    Ok(max_overlap(ed, site) - FRAC_1_SQRT_2)
}

fn max_overlap(ed: &EigenDecomposition, site: usize) -> f64 {
    ed.vectors()
        .iter()
        .map(|v| v[site - 1].abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimerStatus {
    /// Distinct eigenstates won the ψ₊ and ψ₋ overlaps.
    Resolved,
    /// One eigenstate won both; the tie was broken by parity or overlap.
    Degenerate,
    /// Both winning overlaps are below 1/√2: no two-level structure.
    Ambiguous,
}

/// Eigenstates closest to ψ± = (|1⟩ ± |N⟩)/√2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerModes {
    pub index_plus: usize,
    pub index_minus: usize,
    pub e_plus: f64,
    pub e_minus: f64,
    pub overlap_plus: f64,
    pub overlap_minus: f64,
    pub status: DimerStatus,
}

impl DimerModes {
    pub fn is_identified(&self) -> bool {
        self.status != DimerStatus::Ambiguous
    }
}

fn argmax_excluding(values: &[f64], skip: Option<usize>) -> usize {
    let mut best = usize::MAX;
    for (i, &x) in values.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        if best == usize::MAX || x > values[best] {
            best = i;
        }
    }
    best
}

pub fn identify_dimer_modes(ed: &EigenDecomposition) -> DimerModes {
    let n = ed.dim();
    let overlaps = |sign: f64| -> Vec<f64> {
        ed.vectors()
            .iter()
            .map(|v| (v[0] + sign * v[n - 1]).abs() * FRAC_1_SQRT_2)
            .collect()
    };
    let plus = overlaps(1.0);
    let minus = overlaps(-1.0);
    let mut ip = argmax_excluding(&plus, None);
    let mut im = argmax_excluding(&minus, None);
    let mut status = DimerStatus::Resolved;
    if ip == im && n > 1 {
        status = DimerStatus::Degenerate;
        let label = ed.parity().map(|p| p[ip]).unwrap_or(Parity::None);
        let keep_plus = match label {
            Parity::Even => true,
            Parity::Odd => false,
            Parity::None => plus[ip] >= minus[im],
        };
        if keep_plus {
            im = argmax_excluding(&minus, Some(ip));
        } else {
            ip = argmax_excluding(&plus, Some(im));
        }
    }
    if plus[ip] < FRAC_1_SQRT_2 && minus[im] < FRAC_1_SQRT_2 {
        status = DimerStatus::Ambiguous;
    }
    DimerModes {
        index_plus: ip,
        index_minus: im,
        e_plus: ed.values()[ip],
        e_minus: ed.values()[im],
        overlap_plus: plus[ip],
        overlap_minus: minus[im],
        status,
    }
}

/// Two-level transfer time π/|E₊ − E₋|.
pub fn t_star_estimate(e_plus: f64, e_minus: f64) -> Result<f64> {
    if !(e_plus.is_finite() && e_minus.is_finite()) {
        return Err(QstError::invalid("E±", "must be finite"));
    }
    let split = (e_plus - e_minus).abs();
    if split == 0.0 {
        return Err(QstError::DegeneratePair);
    }
    Ok(PI / split)
}

/// Transition amplitude ⟨target|e^{−iHt}|source⟩ as a sum of phasors.
struct TransitionSignal {
    freqs: Vec<f64>,
    weights: Vec<f64>,
    /// Bound on d|c_target|/dt, the sum of the target's hopping magnitudes.
    /// Scans step in amplitude modulus, which moves no faster than this.
    lipschitz: f64,
}

impl TransitionSignal {
    fn new(ed: &EigenDecomposition, source: usize, target: usize) -> Self {
        let n = ed.dim();
        let (freqs, weights) = ed
            .values()
            .iter()
            .zip(ed.vectors())
            .map(|(l, v)| (*l, v[target - 1] * v[source - 1]))
            .filter(|(_, w)| *w != 0.0)
            .unzip();
        // H_{k,k±1} reconstructed from the decomposition.
        let coupling = |a: usize, b: usize| -> f64 {
            ed.values()
                .iter()
                .zip(ed.vectors())
                .map(|(l, v)| l * v[a] * v[b])
                .sum::<f64>()
                .abs()
        };
        let k = target - 1;
        let mut lipschitz = 0.0;
        if k > 0 {
            lipschitz += coupling(k - 1, k);
        }
        if k + 1 < n {
            lipschitz += coupling(k, k + 1);
        }
        Self {
            freqs,
            weights,
            lipschitz: lipschitz * (1.0 + 1e-9) + f64::MIN_POSITIVE,
        }
    }

    fn amplitude(&self, t: f64) -> Complex64 {
        self.freqs
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| {
                let (s, c) = (l * t).sin_cos();
                Complex64::new(w * c, -w * s)
            })
            .sum()
    }

    fn population(&self, t: f64) -> f64 {
        self.amplitude(t).norm_sqr()
    }
}

/// Smallest step of the safe-step scans, relative to the local time.
fn min_step(t: f64, lipschitz: f64) -> f64 {
    (1e-7 / lipschitz).max(8.0 * f64::EPSILON * t.abs())
}

/// Bisection for the left end of a bracket [lo, hi] with `pred(lo)` false and
/// `pred(hi)` true.
fn bisect(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(QstError::invalid("horizon", format!("must be finite and > 0, got {horizon}")));
    }
    Ok(())
}

fn check_threshold(threshold: f64) -> Result<()> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(QstError::invalid("threshold", format!("must lie in (0, 1), got {threshold}")));
    }
    Ok(())
}

/// First time in [0, horizon] at which P_target ≥ `threshold`, without a grid.
pub fn first_crossing(
    ed: &EigenDecomposition,
    source: usize,
    target: usize,
    threshold: f64,
    horizon: f64,
) -> Result<Option<f64>> {
    check_site(source, ed.dim())?;
    check_site(target, ed.dim())?;
    check_threshold(threshold)?;
    check_horizon(horizon)?;
    let signal = TransitionSignal::new(ed, source, target);
    let mut t = 0.0;
    let mut pop = signal.population(0.0);
    if pop >= threshold {
        return Ok(Some(0.0));
    }
    loop {
        let dt = ((threshold.sqrt() - pop.sqrt()) / signal.lipschitz).max(min_step(t, signal.lipschitz));
        let next = (t + dt).min(horizon);
        let next_pop = signal.population(next);
        if next_pop >= threshold {
            return Ok(Some(bisect(t, next, |x| signal.population(x) >= threshold)));
        }
        if next >= horizon {
            return Ok(None);
        }
        t = next;
        pop = next_pop;
    }
}

/// Largest P_target over [0, horizon], within `tol` of the true supremum.
/// Returns (peak, time of peak).
pub fn peak_population(
    ed: &EigenDecomposition,
    source: usize,
    target: usize,
    horizon: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    check_site(source, ed.dim())?;
    check_site(target, ed.dim())?;
    check_horizon(horizon)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(QstError::invalid("tol", format!("must be finite and > 0, got {tol}")));
    }
    let signal = TransitionSignal::new(ed, source, target);
    let mut t = 0.0;
    let mut pop = signal.population(0.0);
    let (mut best, mut t_best) = (pop, 0.0);
    while t < horizon {
        let dt = (((best + tol).sqrt() - pop.sqrt()) / signal.lipschitz).max(min_step(t, signal.lipschitz));
        t = (t + dt).min(horizon);
        pop = signal.population(t);
        if pop > best {
            best = pop;
            t_best = t;
        }
    }
    Ok((best, t_best))
}

/// Continuous centered moving average of P_target with width `window`:
/// S(t) = Σ_ij A_i A_j cos(ω_ij t)·sinc(ω_ij·window/2).
struct SmoothedSignal {
    constant: f64,
    terms: Vec<(f64, f64)>,
    slope_bound: f64,
    curvature_bound: f64,
}

impl SmoothedSignal {
    fn new(ed: &EigenDecomposition, source: usize, target: usize, window: f64) -> Self {
        let base = TransitionSignal::new(ed, source, target);
        let constant = base.weights.iter().map(|w| w * w).sum();
        let mut terms = Vec::new();
        for i in 0..base.freqs.len() {
            for j in i + 1..base.freqs.len() {
                let omega = base.freqs[j] - base.freqs[i];
                let x = 0.5 * omega * window;
                let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
                let coeff = 2.0 * base.weights[i] * base.weights[j] * sinc;
                if coeff.abs() > 1e-16 {
                    terms.push((omega, coeff));
                }
            }
        }
        let slope_bound = terms.iter().map(|(w, c)| (w * c).abs()).sum::<f64>();
        let curvature_bound = terms.iter().map(|(w, c)| (w * w * c).abs()).sum::<f64>();
        Self {
            constant,
            terms,
            slope_bound: slope_bound * (1.0 + 1e-9) + f64::MIN_POSITIVE,
            curvature_bound: curvature_bound * (1.0 + 1e-9) + f64::MIN_POSITIVE,
        }
    }

    fn value(&self, t: f64) -> f64 {
        self.constant + self.terms.iter().map(|(w, c)| c * (w * t).cos()).sum::<f64>()
    }

    fn slope(&self, t: f64) -> f64 {
        -self.terms.iter().map(|(w, c)| c * w * (w * t).sin()).sum::<f64>()
    }
}

/// First local maximum above `floor` of the moving-averaged P_target,
/// evaluated in closed form from the spectrum.
pub fn smoothed_peak_time(
    ed: &EigenDecomposition,
    source: usize,
    target: usize,
    window: f64,
    floor: f64,
    horizon: f64,
) -> Result<Option<f64>> {
    check_site(source, ed.dim())?;
    check_site(target, ed.dim())?;
    check_window(window)?;
    check_horizon(horizon)?;
    let s = SmoothedSignal::new(ed, source, target, window);

    let mut t = 0.0;
    let mut value = s.value(0.0);
    while value < floor {
        let dt = ((floor - value) / s.slope_bound).max(min_step(t, s.slope_bound));
        let next = (t + dt).min(horizon);
        let next_value = s.value(next);
        if next_value >= floor {
            t = bisect(t, next, |x| s.value(x) >= floor);
            break;
        }
        if next >= horizon {
            return Ok(None);
        }
        t = next;
        value = next_value;
    }

    loop {
        let slope = s.slope(t);
        if slope <= 0.0 {
            return Ok(Some(t));
        }
        let dt = (slope / s.curvature_bound).max(min_step(t, s.curvature_bound.sqrt()));
        let next = (t + dt).min(horizon);
        if s.slope(next) <= 0.0 {
            return Ok(Some(bisect(t, next, |x| s.slope(x) <= 0.0)));
        }
        if next >= horizon {
            return Ok(None);
        }
        t = next;
    }
}

fn check_window(window: f64) -> Result<()> {
    if !(window.is_finite() && window > 0.0) {
        return Err(QstError::invalid("window", format!("must be finite and > 0, got {window}")));
    }
    Ok(())
}

/// First grid time with P_target ≥ `threshold`, refined by bisection on the
/// exact amplitude between the bracketing samples.
pub fn t_star_threshold(
    ed: &EigenDecomposition,
    traj: &Trajectory,
    source: usize,
    target: usize,
    threshold: f64,
    horizon: f64,
) -> Result<Option<f64>> {
    check_threshold(threshold)?;
    check_horizon(horizon)?;
    check_site(source, ed.dim())?;
    if traj.n_sites() != ed.dim() {
        return Err(QstError::DimensionMismatch {
            expected: ed.dim(),
            got: traj.n_sites(),
        });
    }
    let pops = traj.population_of(target)?;
    let times = traj.times();
    match times.last() {
        Some(&last) if last >= horizon * (1.0 - 1e-12) => {}
        _ => {
            return Err(QstError::invalid(
                "horizon",
                format!("trajectory does not cover [0, {horizon}]"),
            ))
        }
    }
    let pop_at = |t: f64| amplitude(ed, source, target, t).map(|c| c.norm_sqr());
    for (k, (&t, &p)) in times.iter().zip(&pops).enumerate() {
        if t > horizon {
            break;
        }
        if p >= threshold {
            if k == 0 {
                return Ok(Some(t));
            }
            let lo = times[k - 1];
            return Ok(Some(bisect(lo, t, |x| {
                pop_at(x).map(|p| p >= threshold).unwrap_or(true)
            })));
        }
    }
    Ok(None)
}

/// First relevant maximum of the moving-averaged target population on a
/// sampled trajectory.
pub fn t_star_smoothed(traj: &Trajectory, target: usize, window: f64, floor: f64) -> Result<Option<f64>> {
    let pops = traj.population_of(target)?;
    smoothed_first_peak(traj.times(), &pops, window, floor)
}

/// Centered moving average (width `window`, truncated at the ends), then the
/// first local maximum ≥ `floor`, refined by a parabola through the three
/// samples around it.
pub fn smoothed_first_peak(times: &[f64], values: &[f64], window: f64, floor: f64) -> Result<Option<f64>> {
    check_window(window)?;
    if times.len() != values.len() {
        return Err(QstError::DimensionMismatch {
            expected: times.len(),
            got: values.len(),
        });
    }
    if times.len() < 3 {
        return Err(QstError::invalid("times", "need at least three samples"));
    }
    let span = times[times.len() - 1] - times[0];
    if window > span {
        return Err(QstError::invalid(
            "window",
            format!("window {window} exceeds trajectory span {span}"),
        ));
    }
    let max_gap = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if max_gap > window / 10.0 {
        return Err(QstError::invalid(
            "window",
            format!("grid spacing {max_gap} is coarser than window/10"),
        ));
    }

    let mut prefix = Vec::with_capacity(values.len() + 1);
    prefix.push(0.0);
    for v in values {
        prefix.push(prefix.last().unwrap() + v);
    }
    let half = 0.5 * window;
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut averaged = Vec::with_capacity(values.len());
    for &t in times {
        while times[lo] < t - half {
            lo += 1;
        }
        while hi < times.len() && times[hi] <= t + half {
            hi += 1;
        }
        averaged.push((prefix[hi] - prefix[lo]) / (hi - lo) as f64);
    }

    for i in 1..averaged.len() - 1 {
        let (a, b, c) = (averaged[i - 1], averaged[i], averaged[i + 1]);
        if b >= floor && b >= a && b > c {
            let (t0, t1, t2) = (times[i - 1], times[i], times[i + 1]);
            let denom = (t0 - t1) * (t0 - t2) * (t1 - t2);
            let qa = (t2 * (b - a) + t1 * (a - c) + t0 * (c - b)) / denom;
            let qb = (t2 * t2 * (a - b) + t1 * t1 * (c - a) + t0 * t0 * (b - c)) / denom;
            let vertex = if qa < 0.0 { -qb / (2.0 * qa) } else { t1 };
            return Ok(Some(vertex.clamp(t0, t2)));
        }
    }
    Ok(None)
}

/// Potential exponent at which a·(|d_m|^p − |d_{m+1}|^p) = j², with
/// d_k = k − (N+1)/2. `m` is the left site of the pair (m, m+1).
pub fn p_threshold(n_sites: usize, a: f64, j: f64, m: usize) -> Result<f64> {
    const LO: f64 = 0.0;
    const HI: f64 = 64.0;
    if !(a.is_finite() && a > 0.0) {
        return Err(QstError::invalid("a", format!("must be finite and > 0, got {a}")));
    }
    if !(j.is_finite() && j > 0.0) {
        return Err(QstError::invalid("j", format!("must be finite and > 0, got {j}")));
    }
    if m == 0 || m + 1 > n_sites / 2 {
        return Err(QstError::invalid(
            "site_pair",
            format!("pair ({m}, {}) must lie within 1..={}", m + 1, n_sites / 2),
        ));
    }
    let center = (n_sites as f64 + 1.0) / 2.0;
    let outer = (m as f64 - center).abs();
    let inner = (m as f64 + 1.0 - center).abs();
    let target = j * j;
    if outer <= 1.0 {
        return Err(QstError::NoRoot {
            lo: LO,
            hi: HI,
            reason: format!("|d_m| = {outer} <= 1, the field gap is not monotone in p"),
        });
    }
    let gap = |p: f64| a * (outer.powf(p) - inner.powf(p)) - target;
    if gap(HI) <= 0.0 {
        return Err(QstError::NoRoot {
            lo: LO,
            hi: HI,
            reason: format!("field gap at p = {HI} is still below j^2 = {target}"),
        });
    }
    let (mut lo, mut hi) = (LO, HI);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Knobs for [`transfer_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct TransferOptions {
    pub source: usize,
    /// Defaults to the last site.
    pub target: Option<usize>,
    pub threshold: f64,
    /// Defaults to 20·t_est when the dimer pair is identified, else 200.
    pub horizon: Option<f64>,
    /// Defaults to three periods of the fastest frequency, 3·2π/(λ_max − λ_min).
    pub window: Option<f64>,
    /// Smoothed maxima below this are not "relevant".
    pub relevance_floor: f64,
    /// Hard cap on any scanned horizon.
    pub max_horizon: f64,
    pub peak_tolerance: f64,
    /// When false only spectral quantities (ℱ, E±, t_est) are computed.
    pub time_metrics: bool,
}

impl Default for TransferOptions {
    fn default() -> Self {
        Self {
            source: 1,
            target: None,
            threshold: 0.95,
            horizon: None,
            window: None,
            relevance_floor: 0.5,
            max_horizon: 1e7,
            peak_tolerance: 1e-3,
            time_metrics: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReportStatus {
    pub ambiguous_dimer: bool,
    pub degenerate_dimer: bool,
    pub horizon_capped: bool,
}

impl fmt::Display for ReportStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flags: Vec<&str> = [
            (self.ambiguous_dimer, "ambiguous_dimer"),
            (self.degenerate_dimer, "degenerate_dimer"),
            (self.horizon_capped, "horizon_capped"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, name)| *name)
        .collect();
        if flags.is_empty() {
            f.write_str("ok")
        } else {
            f.write_str(&flags.join(";"))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub drop: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub overlap_plus: f64,
    pub overlap_minus: f64,
    pub t_est: Option<f64>,
    pub t_threshold: Option<f64>,
    pub t_smoothed: Option<f64>,
    pub p_max: Option<f64>,
    /// Horizon actually scanned (absent without time metrics).
    pub horizon: Option<f64>,
    pub status: ReportStatus,
}

/// Default window: three periods of the fastest frequency in the spectrum.
pub fn default_window(ed: &EigenDecomposition) -> f64 {
    let v = ed.values();
    let spread = v[v.len() - 1] - v[0];
    if spread > 0.0 {
        3.0 * 2.0 * PI / spread
    } else {
        1.0
    }
}

pub fn transfer_report(ed: &EigenDecomposition, opts: &TransferOptions) -> Result<TransferReport> {
    let n = ed.dim();
    if n < 2 {
        return Err(QstError::invalid("n_sites", "transfer needs at least two sites"));
    }
    let target = opts.target.unwrap_or(n);
    check_site(opts.source, n)?;
    check_site(target, n)?;

    let dimer = identify_dimer_modes(ed);
    let mut status = ReportStatus {
        ambiguous_dimer: dimer.status == DimerStatus::Ambiguous,
        degenerate_dimer: dimer.status == DimerStatus::Degenerate,
        horizon_capped: false,
    };
    let t_est = if dimer.is_identified() {
        t_star_estimate(dimer.e_plus, dimer.e_minus).ok()
    } else {
        None
    };
    let mut report = TransferReport {
        drop: qst_drop(ed),
        e_plus: dimer.e_plus,
        e_minus: dimer.e_minus,
        overlap_plus: dimer.overlap_plus,
        overlap_minus: dimer.overlap_minus,
        t_est,
        t_threshold: None,
        t_smoothed: None,
        p_max: None,
        horizon: None,
        status,
    };
    if !opts.time_metrics {
        return Ok(report);
    }

    let mut horizon = opts.horizon.unwrap_or(match t_est {
        Some(t) => 20.0 * t,
        None => 200.0,
    });
    if horizon > opts.max_horizon {
        horizon = opts.max_horizon;
        status.horizon_capped = true;
    }
    let window = opts.window.unwrap_or_else(|| default_window(ed));
    report.t_threshold = first_crossing(ed, opts.source, target, opts.threshold, horizon)?;
    report.t_smoothed = smoothed_peak_time(ed, opts.source, target, window, opts.relevance_floor, horizon)?;
    report.p_max = Some(peak_population(ed, opts.source, target, horizon, opts.peak_tolerance)?.0);
    report.horizon = Some(horizon);
    report.status = status;
    Ok(report)
}

/// Decompose `chain` and report on it.
pub fn report_for_chain(chain: &ChainSpec, opts: &TransferOptions) -> Result<TransferReport> {
    let ed = decompose(&chain.to_single_excitation())?;
    transfer_report(&ed, opts)
}
