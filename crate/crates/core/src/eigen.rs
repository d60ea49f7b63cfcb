//! Eigendecomposition of real symmetric tridiagonal matrices.
//!
//! The workhorse is the implicit-shift QL iteration (Wilkinson-type shift
//! taken from the leading 2×2 block), accumulating Givens rotations into the
//! eigenvector matrix. When the matrix is exactly invariant under site
//! reflection it is first split into even and odd blocks in the basis
//! (|n⟩ ± |N+1−n⟩)/√2. The sender/receiver doublet of a strongly localizing
//! potential can be split by far less than the resolution of a full QL
//! solve; in the block form its two members never meet in the same block,
//! so both come out with exact parity.

use crate::chain::Hamiltonian1Ex;
use crate::error::{QstError, Result};

/// Reflection parity of an eigenvector under n → N+1−n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::None => "none",
        }
    }
}

/// Ascending eigenvalues with orthonormal, phase-fixed eigenvectors.
///
/// `vectors()[i]` belongs to `values()[i]`; its first component of magnitude
/// above 1e-12 is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    parity: Option<Vec<Parity>>,
}

/// Entries below this magnitude are skipped when fixing the sign.
const PHASE_FLOOR: f64 = 1e-12;
/// Tolerance of the parity labels on general (non block-reduced) output.
const PARITY_TOL: f64 = 1e-8;
/// Relative gap below which eigenvalues form a degenerate cluster.
const CLUSTER_GAP: f64 = 1e-12;

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn parity(&self) -> Option<&[Parity]> {
        self.parity.as_deref()
    }

    /// ⟨site|ε_i⟩ with 1-based `site`.
    pub fn component(&self, i: usize, site: usize) -> f64 {
        self.vectors[i][site - 1]
    }
}

/// Full decomposition; uses the parity-block reduction for exactly
/// mirror-symmetric input.
pub fn decompose(h: &Hamiltonian1Ex) -> Result<EigenDecomposition> {
    if h.dim() > 1 && h.mirror_asymmetry() == 0.0 {
        decompose_by_parity(h)
    } else {
        decompose_full(h)
    }
}

/// Decomposition of the whole matrix at once, without the parity reduction.
pub fn decompose_full(h: &Hamiltonian1Ex) -> Result<EigenDecomposition> {
    let n = h.dim();
    let (values, vectors) = tridiagonal_ql(h.diag(), h.offdiag())?;
    let mut pairs: Vec<(f64, Vec<f64>)> = values.into_iter().zip(vectors).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (values, mut vectors): (Vec<f64>, Vec<Vec<f64>>) = pairs.into_iter().unzip();

    let norm = h.frobenius_norm();
    let symmetric = n > 1 && h.mirror_asymmetry() <= CLUSTER_GAP * norm;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] < CLUSTER_GAP * norm {
            end += 1;
        }
        if end - start > 1 {
            settle_cluster(&mut vectors[start..end], symmetric);
        }
        start = end;
    }
    for v in &mut vectors {
        fix_phase(v);
    }
    let parity = symmetric.then(|| vectors.iter().map(|v| label_parity(v)).collect());
    Ok(EigenDecomposition {
        values,
        vectors,
        parity,
    })
}

fn decompose_by_parity(h: &Hamiltonian1Ex) -> Result<EigenDecomposition> {
    let n = h.dim();
    let d = h.diag();
    let o = h.offdiag();
    let half = n / 2;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;

    let (even_diag, even_off, odd_diag, odd_off) = if n.is_multiple_of(2) {
        let mut ed = d[..half].to_vec();
        let mut od = d[..half].to_vec();
        ed[half - 1] += o[half - 1];
        od[half - 1] -= o[half - 1];
        let off = o[..half - 1].to_vec();
        (ed, off.clone(), od, off)
    } else {
        let ed = d[..=half].to_vec();
        let mut eo = o[..half].to_vec();
        eo[half - 1] *= std::f64::consts::SQRT_2;
        (ed, eo, d[..half].to_vec(), o[..half - 1].to_vec())
    };

    let mut modes: Vec<(f64, Parity, Vec<f64>)> = Vec::with_capacity(n);
    let (values, blocks) = tridiagonal_ql(&even_diag, &even_off)?;
    for (value, u) in values.into_iter().zip(blocks) {
        let mut v = vec![0.0; n];
        for k in 0..half {
            v[k] = u[k] * inv_sqrt2;
            v[n - 1 - k] = v[k];
        }
        if n % 2 == 1 {
            v[half] = u[half];
        }
        modes.push((value, Parity::Even, v));
    }
    let (values, blocks) = tridiagonal_ql(&odd_diag, &odd_off)?;
    for (value, u) in values.into_iter().zip(blocks) {
        let mut v = vec![0.0; n];
        for k in 0..half {
            v[k] = u[k] * inv_sqrt2;
            v[n - 1 - k] = -v[k];
        }
        modes.push((value, Parity::Odd, v));
    }
    modes.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then_with(|| (x.1 == Parity::Odd).cmp(&(y.1 == Parity::Odd)))
    });

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    let mut parity = Vec::with_capacity(n);
    for (value, label, mut v) in modes {
        fix_phase(&mut v);
        values.push(value);
        vectors.push(v);
        parity.push(label);
    }
    Ok(EigenDecomposition {
        values,
        vectors,
        parity: Some(parity),
    })
}

/// Implicit-shift QL on a symmetric tridiagonal matrix.
///
/// Returns unsorted eigenvalues and the matching eigenvectors (one `Vec` per
/// eigenvalue). The total number of QL sweeps is capped at 50·N.
fn tridiagonal_ql(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    // Row-major, column j is the j-th eigenvector.
    let mut z = vec![0.0; n * n];
    for k in 0..n {
        z[k * n + k] = 1.0;
    }

    let max_sweeps = 50 * n;
    let mut sweeps = 0;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > max_sweeps {
                return Err(QstError::NoConvergence {
                    iterations: max_sweeps,
                });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let row = k * n;
                    let zf = z[row + i + 1];
                    z[row + i + 1] = s * z[row + i] + c * zf;
                    z[row + i] = c * z[row + i] - s * zf;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let vectors = (0..n)
        .map(|j| (0..n).map(|k| z[k * n + j]).collect())
        .collect();
    Ok((d, vectors))
}

/// Re-orthonormalizes a degenerate cluster; with `symmetric`, prefers
/// vectors of definite parity spanning the same subspace.
fn settle_cluster(vectors: &mut [Vec<f64>], symmetric: bool) {
    let k = vectors.len();
    let n = vectors[0].len();
    let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(2 * k);
    if symmetric {
        for sign in [1.0, -1.0] {
            for v in vectors.iter() {
                candidates.push((0..n).map(|i| 0.5 * (v[i] + sign * v[n - 1 - i])).collect());
            }
        }
    }
    candidates.extend(vectors.iter().cloned());

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    for mut c in candidates {
        if basis.len() == k {
            break;
        }
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(&c, b);
                c.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let norm = dot(&c, &c).sqrt();
        if norm > 1e-6 {
            c.iter_mut().for_each(|x| *x /= norm);
            basis.push(c);
        }
    }
    for (v, b) in vectors.iter_mut().zip(basis) {
        *v = b;
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn fix_phase(v: &mut [f64]) {
    if let Some(&lead) = v.iter().find(|x| x.abs() > PHASE_FLOOR) {
        if lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn label_parity(v: &[f64]) -> Parity {
    let dev = |sign: f64| {
        v.iter()
            .zip(v.iter().rev())
            .map(|(x, y)| (x - sign * y).abs())
            .fold(0.0, f64::max)
    };
    if dev(1.0) <= PARITY_TOL {
        Parity::Even
    } else if dev(-1.0) <= PARITY_TOL {
        Parity::Odd
    } else {
        Parity::None
    }
}

/// Closed-form decomposition of the flat chain with uniform hopping `tau`:
/// λ_k = 2τ·cos(kπ/(N+1)), v_k(n) = √(2/(N+1))·sin(nkπ/(N+1)).
pub fn uniform_chain_reference(n_sites: usize, tau: f64) -> Result<EigenDecomposition> {
    if n_sites == 0 {
        return Err(QstError::invalid("n_sites", "must be >= 1"));
    }
    if !(tau.is_finite() && tau != 0.0) {
        return Err(QstError::invalid("tau", format!("must be finite and nonzero, got {tau}")));
    }
    let np1 = (n_sites + 1) as f64;
    let scale = (2.0 / np1).sqrt();
    let pi = std::f64::consts::PI;
    let mut modes: Vec<(f64, Parity, Vec<f64>)> = (1..=n_sites)
        .map(|k| {
            let value = 2.0 * tau * (k as f64 * pi / np1).cos();
            let mut v: Vec<f64> = (1..=n_sites)
                .map(|n| scale * ((n * k) as f64 * pi / np1).sin())
                .collect();
            fix_phase(&mut v);
            let parity = if k % 2 == 1 { Parity::Even } else { Parity::Odd };
            (value, parity, v)
        })
        .collect();
    modes.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut values = Vec::with_capacity(n_sites);
    let mut vectors = Vec::with_capacity(n_sites);
    let mut parity = Vec::with_capacity(n_sites);
    for (value, label, v) in modes {
        values.push(value);
        vectors.push(v);
        parity.push(label);
    }
    Ok(EigenDecomposition {
        values,
        vectors,
        parity: Some(parity),
    })
}

/// max_i ‖H·v_i − λ_i·v_i‖₂ / ‖H‖_F.
pub fn residual_norm(h: &Hamiltonian1Ex, ed: &EigenDecomposition) -> Result<f64> {
    let n = h.dim();
    if ed.dim() != n {
        return Err(QstError::DimensionMismatch {
            expected: n,
            got: ed.dim(),
        });
    }
    if let Some(v) = ed.vectors.iter().find(|v| v.len() != n) {
        return Err(QstError::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    let mut hv = vec![0.0; n];
    let mut worst = 0.0f64;
    for (lambda, v) in ed.values.iter().zip(&ed.vectors) {
        h.apply(v, &mut hv);
        let r: f64 = hv
            .iter()
            .zip(v)
            .map(|(x, y)| (x - lambda * y).powi(2))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    let norm = h.frobenius_norm();
    Ok(if norm > 0.0 { worst / norm } else { worst })
}
