//! XX chain description and its single-excitation Hamiltonian.
//!
//! The spin Hamiltonian
//!
//! ```text
//! H = Σ_n J_n (σˣ_n σˣ_{n+1} + σʸ_n σʸ_{n+1}) + Σ_n B_n σᶻ_n
//! ```
//!
//! conserves total magnetization, so the sector with a single spin up is
//! invariant and has dimension N. In the basis |k⟩ (spin up on site k) the
//! hopping term has matrix element 2·J_k between neighbours and the field
//! term contributes 2·B_k on the diagonal, up to the constant −Σ B_n which is
//! kept only as metadata. All energies are in units of J, times in ħ/J.

use serde::{Deserialize, Serialize};

use crate::error::{QstError, Result};

/// Power-law field profile `a·|n − c|^p` centered on the chain midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    a: f64,
    p: f64,
}

impl PotentialSpec {
    pub fn new(a: f64, p: f64) -> Result<Self> {
        if !a.is_finite() || a < 0.0 {
            return Err(QstError::invalid("a", format!("must be finite and >= 0, got {a}")));
        }
        if !p.is_finite() || p < 0.0 {
            return Err(QstError::invalid("p", format!("must be finite and >= 0, got {p}")));
        }
        Ok(Self { a, p })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// On-site fields `B_n = a·|n − (N+1)/2|^p` for n = 1..N.
///
/// The center (N+1)/2 makes the profile exactly mirror symmetric, and
/// `0^0 = 1` so that p = 0 gives the flat field `a` on every site.
pub fn build_fields(n_sites: usize, pot: &PotentialSpec) -> Result<Vec<f64>> {
    if n_sites < 2 {
        return Err(QstError::invalid("n_sites", format!("must be >= 2, got {n_sites}")));
    }
    let center = (n_sites as f64 + 1.0) / 2.0;
    Ok((1..=n_sites)
        .map(|n| pot.a * (n as f64 - center).abs().powf(pot.p))
        .collect())
}

/// A chain of N sites: N−1 positive couplings and N fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    couplings: Vec<f64>,
    fields: Vec<f64>,
}

impl ChainSpec {
    pub fn new(couplings: Vec<f64>, fields: Vec<f64>) -> Result<Self> {
        let n = fields.len();
        if n < 2 {
            return Err(QstError::invalid("n_sites", format!("must be >= 2, got {n}")));
        }
        if couplings.len() != n - 1 {
            return Err(QstError::DimensionMismatch {
                expected: n - 1,
                got: couplings.len(),
            });
        }
        if let Some(j) = couplings.iter().find(|j| !(j.is_finite() && **j > 0.0)) {
            return Err(QstError::invalid("couplings", format!("must be finite and > 0, got {j}")));
        }
        if let Some(b) = fields.iter().find(|b| !b.is_finite()) {
            return Err(QstError::invalid("fields", format!("must be finite, got {b}")));
        }
        Ok(Self { couplings, fields })
    }

    pub fn n_sites(&self) -> usize {
        self.fields.len()
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    /// Same chain with every field shifted by `c`.
    pub fn with_field_shift(&self, c: f64) -> Result<Self> {
        Self::new(
            self.couplings.clone(),
            self.fields.iter().map(|b| b + c).collect(),
        )
    }

    /// True iff couplings and fields are invariant under n → N+1−n within `tol`.
    pub fn is_mirror_symmetric(&self, tol: f64) -> bool {
        let mirrored = |v: &[f64]| {
            v.iter()
                .zip(v.iter().rev())
                .all(|(x, y)| (x - y).abs() <= tol)
        };
        mirrored(&self.couplings) && mirrored(&self.fields)
    }

    pub fn to_single_excitation(&self) -> Hamiltonian1Ex {
        Hamiltonian1Ex {
            diag: self.fields.iter().map(|b| 2.0 * b).collect(),
            offdiag: self.couplings.iter().map(|j| 2.0 * j).collect(),
            energy_offset: -self.fields.iter().sum::<f64>(),
        }
    }
}

/// Chain with edge couplings `J_1 = J_{N−1} = j_edge` and bulk couplings `j_bulk`.
pub fn build_chain(n_sites: usize, j_edge: f64, j_bulk: f64, fields: Vec<f64>) -> Result<ChainSpec> {
    if !(j_edge.is_finite() && j_edge > 0.0) {
        return Err(QstError::invalid("j_edge", format!("must be finite and > 0, got {j_edge}")));
    }
    if !(j_bulk.is_finite() && j_bulk > 0.0) {
        return Err(QstError::invalid("j_bulk", format!("must be finite and > 0, got {j_bulk}")));
    }
    if fields.len() != n_sites {
        return Err(QstError::DimensionMismatch {
            expected: n_sites,
            got: fields.len(),
        });
    }
    if n_sites < 2 {
        return Err(QstError::invalid("n_sites", format!("must be >= 2, got {n_sites}")));
    }
    let couplings = (0..n_sites - 1)
        .map(|k| if k == 0 || k == n_sites - 2 { j_edge } else { j_bulk })
        .collect();
    ChainSpec::new(couplings, fields)
}

/// Real symmetric tridiagonal matrix of the single-excitation sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian1Ex {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    /// Dropped identity term; absolute energies are `λ + energy_offset`.
    energy_offset: f64,
}

impl Hamiltonian1Ex {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(QstError::invalid("diag", "matrix must have at least one row"));
        }
        if offdiag.len() != n - 1 {
            return Err(QstError::DimensionMismatch {
                expected: n - 1,
                got: offdiag.len(),
            });
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(QstError::invalid("diag/offdiag", "entries must be finite"));
        }
        if offdiag.contains(&0.0) {
            return Err(QstError::invalid("offdiag", "entries must be nonzero"));
        }
        Ok(Self {
            diag,
            offdiag,
            energy_offset: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn energy_offset(&self) -> f64 {
        self.energy_offset
    }

    pub fn frobenius_norm(&self) -> f64 {
        let d: f64 = self.diag.iter().map(|x| x * x).sum();
        let o: f64 = self.offdiag.iter().map(|x| x * x).sum();
        (d + 2.0 * o).sqrt()
    }

    /// Largest absolute row sum; bounds the spectral norm.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim())
            .map(|k| {
                let left = if k > 0 { self.offdiag[k - 1].abs() } else { 0.0 };
                let right = self.offdiag.get(k).map_or(0.0, |x| x.abs());
                self.diag[k].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// Largest entrywise difference between H and its site-reflected copy.
    pub fn mirror_asymmetry(&self) -> f64 {
        let diff = |v: &[f64]| {
            v.iter()
                .zip(v.iter().rev())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        };
        diff(&self.diag).max(diff(&self.offdiag))
    }

    /// `y = H·x` for any scalar type that real numbers can scale.
    pub fn apply<T>(&self, x: &[T], y: &mut [T])
    where
        T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let n = self.dim();
        for k in 0..n {
            let mut acc = x[k] * self.diag[k];
            if k > 0 {
                acc = acc + x[k - 1] * self.offdiag[k - 1];
            }
            if k + 1 < n {
                acc = acc + x[k + 1] * self.offdiag[k];
            }
            y[k] = acc;
        }
    }
}

fn default_coupling() -> f64 {
    1.0
}

/// Serializable chain description: either the power-law family or explicit arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub n_sites: usize,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub p: f64,
    #[serde(default = "default_coupling")]
    pub j_edge: f64,
    #[serde(default = "default_coupling")]
    pub j_bulk: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<f64>>,
}

impl ChainConfig {
    pub fn power_law(n_sites: usize, a: f64, p: f64, j_edge: f64, j_bulk: f64) -> Self {
        Self {
            n_sites,
            a,
            p,
            j_edge,
            j_bulk,
            fields: None,
            couplings: None,
        }
    }

    pub fn to_chain(&self) -> Result<ChainSpec> {
        let fields = match &self.fields {
            Some(f) => f.clone(),
            None => build_fields(self.n_sites, &PotentialSpec::new(self.a, self.p)?)?,
        };
        if fields.len() != self.n_sites {
            return Err(QstError::DimensionMismatch {
                expected: self.n_sites,
                got: fields.len(),
            });
        }
        match &self.couplings {
            Some(c) => ChainSpec::new(c.clone(), fields),
            None => build_chain(self.n_sites, self.j_edge, self.j_bulk, fields),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| QstError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| QstError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pot(a: f64, p: f64) -> PotentialSpec {
        PotentialSpec::new(a, p).unwrap()
    }

    #[test]
    fn flat_field_for_zero_exponent() {
        assert_eq!(build_fields(8, &pot(0.5, 0.0)).unwrap(), vec![0.5; 8]);
    }

    #[test]
    fn harmonic_field_is_centered() {
        let b = build_fields(8, &pot(0.5, 2.0)).unwrap();
        assert_eq!(b, vec![6.125, 3.125, 1.125, 0.125, 0.125, 1.125, 3.125, 6.125]);
    }

    #[test]
    fn odd_chain_has_zero_center_field() {
        let b = build_fields(9, &pot(1.0, 1.0)).unwrap();
        assert_eq!(b, vec![4.0, 3.0, 2.0, 1.0, 0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn rejects_bad_potentials() {
        assert!(PotentialSpec::new(-0.1, 2.0).is_err());
        assert!(PotentialSpec::new(0.1, -2.0).is_err());
        assert!(PotentialSpec::new(f64::NAN, 2.0).is_err());
        assert!(PotentialSpec::new(0.1, f64::INFINITY).is_err());
        assert!(build_fields(1, &pot(1.0, 1.0)).is_err());
    }

    #[test]
    fn edge_couplings() {
        let c = build_chain(4, 0.01, 1.0, vec![0.0; 4]).unwrap();
        assert_eq!(c.couplings(), &[0.01, 1.0, 0.01]);
        let c = build_chain(2, 1.0, 3.0, vec![0.0; 2]).unwrap();
        assert_eq!(c.couplings(), &[1.0]);
        let c = build_chain(3, 0.2, 3.0, vec![0.0; 3]).unwrap();
        assert_eq!(c.couplings(), &[0.2, 0.2]);
        let c = build_chain(8, 1.0, 1.0, build_fields(8, &pot(0.5, 2.0)).unwrap()).unwrap();
        assert_eq!(c.couplings(), &[1.0; 7]);
    }

    #[test]
    fn rejects_bad_couplings() {
        assert!(build_chain(4, 0.0, 1.0, vec![0.0; 4]).is_err());
        assert!(build_chain(4, 1.0, -1.0, vec![0.0; 4]).is_err());
        assert!(build_chain(4, 1.0, 1.0, vec![0.0; 3]).is_err());
        assert!(ChainSpec::new(vec![1.0, 0.0], vec![0.0; 3]).is_err());
        assert!(ChainSpec::new(vec![1.0], vec![0.0; 3]).is_err());
    }

    #[test]
    fn pauli_factor_two() {
        let h = ChainSpec::new(vec![1.0], vec![0.0, 0.0]).unwrap().to_single_excitation();
        assert_eq!((h.diag(), h.offdiag()), (&[0.0, 0.0][..], &[2.0][..]));
        let h = ChainSpec::new(vec![1.0], vec![1.0, 1.0]).unwrap().to_single_excitation();
        assert_eq!((h.diag(), h.offdiag()), (&[2.0, 2.0][..], &[2.0][..]));
        assert_eq!(h.energy_offset(), -2.0);
        let h = ChainSpec::new(vec![0.5, 0.5], vec![1.0, 0.0, 1.0])
            .unwrap()
            .to_single_excitation();
        assert_eq!((h.diag(), h.offdiag()), (&[2.0, 0.0, 2.0][..], &[1.0, 1.0][..]));
    }

    #[test]
    fn mirror_symmetry_check() {
        let c = build_chain(8, 0.3, 1.0, build_fields(8, &pot(0.7, 2.3)).unwrap()).unwrap();
        assert!(c.is_mirror_symmetric(0.0));
        let c = ChainSpec::new(vec![1.0, 1.0], vec![1.0, 0.0, 2.0]).unwrap();
        assert!(!c.is_mirror_symmetric(1e-12));
        assert!(c.is_mirror_symmetric(1.0));
        let c = ChainSpec::new(vec![0.01, 1.0, 0.01], vec![0.5; 4]).unwrap();
        assert!(c.is_mirror_symmetric(0.0));
    }

    #[test]
    fn hamiltonian_norms_and_apply() {
        let h = Hamiltonian1Ex::new(vec![1.0, -2.0, 3.0], vec![0.5, 1.5]).unwrap();
        assert!((h.frobenius_norm() - (1.0f64 + 4.0 + 9.0 + 2.0 * (0.25 + 2.25)).sqrt()).abs() < 1e-15);
        assert_eq!(h.inf_norm(), 4.5);
        let mut y = vec![0.0; 3];
        h.apply(&[1.0, 1.0, 1.0], &mut y);
        assert_eq!(y, vec![1.5, 0.0, 4.5]);
        assert!(Hamiltonian1Ex::new(vec![0.0, 0.0], vec![0.0]).is_err());
        assert!(Hamiltonian1Ex::new(vec![], vec![]).is_err());
    }

    #[test]
    fn config_round_trip() {
        let cfg = ChainConfig::power_law(8, 0.5, 2.0, 1.0, 1.0);
        let back = ChainConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, back);
        let explicit = ChainConfig::from_toml("n_sites = 3\nfields = [1.0, 0.0, 1.0]\ncouplings = [0.5, 0.5]\n")
            .unwrap();
        let chain = explicit.to_chain().unwrap();
        assert_eq!(chain.fields(), &[1.0, 0.0, 1.0]);
        assert_eq!(chain.couplings(), &[0.5, 0.5]);
        let err = ChainConfig::from_toml("n_sites = 3\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }
}
