//! Single-excitation time evolution.
//!
//! `evolve` propagates in the eigenbasis: c_k(t) = Σ_i v_i(k)·v_i(s)·e^{−iλ_i t}.
//! `integrate_oracle` integrates i·dc/dt = H·c with classical RK4 and exists
//! only to cross-check the spectral route. Sites are 1-based throughout.

use num_complex::Complex64;

use crate::chain::Hamiltonian1Ex;
use crate::eigen::EigenDecomposition;
use crate::error::{QstError, Result};

/// Sampled amplitudes c_k(t) and populations |c_k(t)|².
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    amplitudes: Vec<Vec<Complex64>>,
    populations: Vec<Vec<f64>>,
}

impl Trajectory {
    fn from_amplitudes(times: Vec<f64>, amplitudes: Vec<Vec<Complex64>>) -> Self {
        let populations = amplitudes
            .iter()
            .map(|row| row.iter().map(|c| c.norm_sqr()).collect())
            .collect();
        Self {
            times,
            amplitudes,
            populations,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_sites(&self) -> usize {
        self.amplitudes.first().map_or(0, Vec::len)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Row t, column k−1.
    pub fn amplitudes(&self) -> &[Vec<Complex64>] {
        &self.amplitudes
    }

    pub fn populations(&self) -> &[Vec<f64>] {
        &self.populations
    }

    /// P_site(t) over the whole grid.
    pub fn population_of(&self, site: usize) -> Result<Vec<f64>> {
        check_site(site, self.n_sites())?;
        Ok(self.populations.iter().map(|row| row[site - 1]).collect())
    }
}

pub(crate) fn check_site(site: usize, n_sites: usize) -> Result<()> {
    if site == 0 || site > n_sites {
        Err(QstError::InvalidSite { site, n_sites })
    } else {
        Ok(())
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    let first = *times.first().ok_or(QstError::EmptyTimeGrid)?;
    if times.iter().any(|t| !t.is_finite()) {
        return Err(QstError::invalid("times", "must be finite"));
    }
    if first < 0.0 {
        return Err(QstError::invalid("times", "must start at t >= 0"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(QstError::invalid("times", "must be ascending"));
    }
    Ok(())
}

/// Spectral propagation of an excitation initially on `source`.
pub fn evolve(ed: &EigenDecomposition, source: usize, times: &[f64]) -> Result<Trajectory> {
    let n = ed.dim();
    check_site(source, n)?;
    check_times(times)?;
    let weights: Vec<f64> = ed.vectors().iter().map(|v| v[source - 1]).collect();
    let mut phases = vec![Complex64::new(0.0, 0.0); n];
    let amplitudes = times
        .iter()
        .map(|&t| {
            for ((ph, lambda), w) in phases.iter_mut().zip(ed.values()).zip(&weights) {
                let (s, c) = (lambda * t).sin_cos();
                *ph = Complex64::new(w * c, -w * s);
            }
            let mut row = vec![Complex64::new(0.0, 0.0); n];
            for (v, ph) in ed.vectors().iter().zip(&phases) {
                for (c, x) in row.iter_mut().zip(v) {
                    *c += ph * x;
                }
            }
            if t == 0.0 {
                // c(0) = δ_{k,source} exactly rather than up to rounding.
                row.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
                row[source - 1] = Complex64::new(1.0, 0.0);
            }
            row
        })
        .collect();
    Ok(Trajectory::from_amplitudes(times.to_vec(), amplitudes))
}

/// ⟨target| e^{−iHt} |source⟩.
pub fn amplitude(ed: &EigenDecomposition, source: usize, target: usize, t: f64) -> Result<Complex64> {
    let n = ed.dim();
    check_site(source, n)?;
    check_site(target, n)?;
    if !t.is_finite() {
        return Err(QstError::invalid("t", "must be finite"));
    }
    Ok(ed
        .values()
        .iter()
        .zip(ed.vectors())
        .map(|(lambda, v)| {
            let w = v[target - 1] * v[source - 1];
            let (s, c) = (lambda * t).sin_cos();
            Complex64::new(w * c, -w * s)
        })
        .sum())
}

/// ‖H − σ‖·dt for the oracle; well below the RK4 stability edge so that the
/// accumulated phase error over t ≤ 50 stays under 1e-6.
const ORACLE_STEP_SCALE: f64 = 0.005;
const ORACLE_MAX_STEPS: u64 = 2_000_000_000;

/// Fixed-step RK4 integration of i·dc/dt = H·c, sampled at `times`.
pub fn integrate_oracle(h: &Hamiltonian1Ex, source: usize, times: &[f64]) -> Result<Trajectory> {
    let n = h.dim();
    check_site(source, n)?;
    check_times(times)?;

    // Integrate H − σ (σ = Gershgorin midpoint) and restore e^{−iσt} afterwards.
    let (lo, hi) = gershgorin(h);
    let sigma = 0.5 * (lo + hi);
    let half_width = 0.5 * (hi - lo);
    let shifted = Hamiltonian1Ex::new(
        h.diag().iter().map(|d| d - sigma).collect(),
        h.offdiag().to_vec(),
    )?;
    let max_dt = if half_width > 0.0 {
        ORACLE_STEP_SCALE / half_width
    } else {
        f64::INFINITY
    };
    if max_dt.is_nan() || max_dt <= f64::MIN_POSITIVE {
        return Err(QstError::StepUnderflow(format!("‖H‖ = {half_width:e}")));
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut c = vec![zero; n];
    c[source - 1] = Complex64::new(1.0, 0.0);
    let mut scratch = Rk4Scratch::new(n);
    let mut now = 0.0;
    let mut amplitudes = Vec::with_capacity(times.len());
    let mut total_steps: u64 = 0;
    for &t in times {
        let span = t - now;
        if span > 0.0 {
            let steps = (span / max_dt).ceil();
            if steps > (ORACLE_MAX_STEPS - total_steps) as f64 {
                return Err(QstError::StepUnderflow(format!(
                    "{steps:e} steps needed to reach t = {t}"
                )));
            }
            let steps = (steps as u64).max(1);
            let dt = span / steps as f64;
            for _ in 0..steps {
                scratch.step(&shifted, &mut c, dt);
            }
            total_steps += steps;
            now = t;
        }
        let (s, co) = (sigma * t).sin_cos();
        let global = Complex64::new(co, -s);
        amplitudes.push(c.iter().map(|x| x * global).collect());
    }
    Ok(Trajectory::from_amplitudes(times.to_vec(), amplitudes))
}

fn gershgorin(h: &Hamiltonian1Ex) -> (f64, f64) {
    let n = h.dim();
    let o = h.offdiag();
    (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), k| {
        let r = if k > 0 { o[k - 1].abs() } else { 0.0 } + o.get(k).map_or(0.0, |x| x.abs());
        (lo.min(h.diag()[k] - r), hi.max(h.diag()[k] + r))
    })
}

struct Rk4Scratch {
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Rk4Scratch {
    fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self {
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }

    /// One step of dc/dt = −i·H·c.
    fn step(&mut self, h: &Hamiltonian1Ex, c: &mut [Complex64], dt: f64) {
        let minus_i = Complex64::new(0.0, -1.0);
        let stages = [0.0, 0.5, 0.5, 1.0];
        for s in 0..4 {
            if s == 0 {
                self.tmp.copy_from_slice(c);
            } else {
                let (prev, _) = self.k.split_at(s);
                for ((t, x), kp) in self.tmp.iter_mut().zip(c.iter()).zip(&prev[s - 1]) {
                    *t = x + kp * (stages[s] * dt);
                }
            }
            h.apply(&self.tmp, &mut self.k[s]);
            self.k[s].iter_mut().for_each(|x| *x *= minus_i);
        }
        for (i, x) in c.iter_mut().enumerate() {
            *x += (self.k[0][i] + self.k[1][i] * 2.0 + self.k[2][i] * 2.0 + self.k[3][i]) * (dt / 6.0);
        }
    }
}

/// Default sampling step: max|λ|·dt = 0.1.
pub fn default_time_step(ed: &EigenDecomposition) -> f64 {
    let max = ed.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max > 0.0 {
        0.1 / max
    } else {
        0.1
    }
}

/// `0, dt, 2dt, …` up to and including `horizon` (last point clamped).
pub fn uniform_grid(horizon: f64, dt: f64) -> Result<Vec<f64>> {
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(QstError::invalid("horizon", format!("must be finite and >= 0, got {horizon}")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(QstError::invalid("dt", format!("must be finite and > 0, got {dt}")));
    }
    let steps = (horizon / dt).ceil();
    if steps > 1e8 {
        return Err(QstError::invalid("dt", format!("grid of {steps:e} points is too large")));
    }
    let steps = steps as usize;
    Ok((0..=steps).map(|k| (k as f64 * dt).min(horizon)).collect())
}

/// ⟨ψ|H|ψ⟩ for a single-excitation amplitude vector.
pub fn expected_energy(h: &Hamiltonian1Ex, c: &[Complex64]) -> f64 {
    let mut hc = vec![Complex64::new(0.0, 0.0); c.len()];
    h.apply(c, &mut hc);
    c.iter().zip(&hc).map(|(x, y)| (x.conj() * y).re).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::decompose;

    fn dimer() -> (Hamiltonian1Ex, EigenDecomposition) {
        let h = Hamiltonian1Ex::new(vec![0.0, 0.0], vec![2.0]).unwrap();
        let ed = decompose(&h).unwrap();
        (h, ed)
    }

    #[test]
    fn dimer_rabi_oscillation() {
        let (_, ed) = dimer();
        let times: Vec<f64> = (0..200).map(|k| k as f64 * 0.01).collect();
        let traj = evolve(&ed, 1, &times).unwrap();
        for (t, row) in traj.times().iter().zip(traj.populations()) {
            assert!((row[1] - (2.0 * t).sin().powi(2)).abs() < 1e-14);
        }
        let quarter = amplitude(&ed, 1, 2, std::f64::consts::FRAC_PI_4).unwrap();
        assert!((quarter.norm() - 1.0).abs() < 1e-14);
        assert!((amplitude(&ed, 2, 2, 0.0).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn initial_state_is_exact() {
        let h = Hamiltonian1Ex::new(vec![1.0, 0.3, -0.2, 0.4], vec![0.5, 1.0, 0.7]).unwrap();
        let ed = decompose(&h).unwrap();
        let traj = evolve(&ed, 3, &[0.0, 1.0]).unwrap();
        let row = &traj.amplitudes()[0];
        assert_eq!(row[2], Complex64::new(1.0, 0.0));
        assert!(row.iter().enumerate().all(|(k, c)| k == 2 || *c == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn oracle_matches_dimer() {
        let (h, _) = dimer();
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.5).collect();
        let traj = integrate_oracle(&h, 1, &times).unwrap();
        for (t, row) in traj.times().iter().zip(traj.populations()) {
            assert!((row[1] - (2.0 * t).sin().powi(2)).abs() < 1e-6);
            assert!((row[0] + row[1] - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let (h, ed) = dimer();
        assert!(matches!(evolve(&ed, 0, &[0.0]), Err(QstError::InvalidSite { .. })));
        assert!(matches!(evolve(&ed, 3, &[0.0]), Err(QstError::InvalidSite { .. })));
        assert!(matches!(evolve(&ed, 1, &[]), Err(QstError::EmptyTimeGrid)));
        assert!(evolve(&ed, 1, &[0.0, 2.0, 1.0]).is_err());
        assert!(evolve(&ed, 1, &[-1.0]).is_err());
        assert!(amplitude(&ed, 1, 5, 0.0).is_err());
        assert!(integrate_oracle(&h, 1, &[]).is_err());
        let extreme = Hamiltonian1Ex::new(vec![0.0, 0.0], vec![1e300]).unwrap();
        assert!(matches!(
            integrate_oracle(&extreme, 1, &[0.0, 1.0]),
            Err(QstError::StepUnderflow(_))
        ));
    }

    #[test]
    fn grid_helpers() {
        let g = uniform_grid(1.0, 0.3).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(uniform_grid(1.0, 0.0).is_err());
        let (h, ed) = dimer();
        assert_eq!(default_time_step(&ed), 0.05);
        let c = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(expected_energy(&h, &c), 0.0);
    }
}
