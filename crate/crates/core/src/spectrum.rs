use serde::{Deserialize, Serialize};

/// Default validity floor for `1 - eigenvalue` in double precision.
pub const VALIDITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    Prolate,
    FockSquare,
    FockDisk,
}

impl SpectrumKind {
    pub fn name(self) -> &'static str {
        match self {
            SpectrumKind::Prolate => "prolate",
            SpectrumKind::FockSquare => "fock-square",
            SpectrumKind::FockDisk => "fock-disk",
        }
    }
}

impl std::str::FromStr for SpectrumKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "prolate" => Ok(SpectrumKind::Prolate),
            "fock-square" => Ok(SpectrumKind::FockSquare),
            "fock-disk" => Ok(SpectrumKind::FockDisk),
            other => Err(format!("unknown spectrum kind `{other}`")),
        }
    }
}

/// A computed eigenvalue sequence of a localization operator.
///
/// `eigenvalues` is sorted non-increasing and indexed from 1 in every public
/// accessor. `complements[i]` is `1 - eigenvalues[i]` as computed directly by
/// the solver, so it keeps absolute accuracy near zero; values below
/// `validity_floor` are reported but flagged untrusted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub kind: SpectrumKind,
    /// Time-bandwidth product `|I||J|` or phase-space area `|Q|`.
    pub c: f64,
    pub eigenvalues: Vec<f64>,
    pub complements: Vec<f64>,
    /// Quadrature order `m` (prolate) or basis size `N` (Fock).
    pub discretization: usize,
    pub validity_floor: f64,
    pub converged: bool,
    /// Largest movement seen by the convergence test (doubling for prolate,
    /// last basis eigenvalue for Fock squares).
    pub convergence_gap: f64,
}

impl Spectrum {
    /// Builds a spectrum from unsorted complements `1 - eigenvalue`.
    pub(crate) fn from_complements(
        kind: SpectrumKind,
        c: f64,
        mut complements: Vec<f64>,
        discretization: usize,
        converged: bool,
        convergence_gap: f64,
    ) -> Self {
        complements.sort_by(|a, b| a.total_cmp(b));
        let eigenvalues = complements.iter().map(|d| 1.0 - d).collect();
        Spectrum {
            kind,
            c,
            eigenvalues,
            complements,
            discretization,
            validity_floor: VALIDITY_FLOOR,
            converged,
            convergence_gap,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `λ_n`, 1-based.
    pub fn eigenvalue(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.eigenvalues.get(i).copied())
    }

    /// `1 - λ_n`, 1-based.
    pub fn one_minus(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.complements.get(i).copied())
    }

    /// Whether `1 - λ_n` lies at or above the validity floor.
    pub fn is_trusted(&self, n: usize) -> bool {
        self.one_minus(n).is_some_and(|d| d >= self.validity_floor)
    }

    pub fn trace(&self) -> f64 {
        let mut v = self.eigenvalues.clone();
        v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        v.iter().sum()
    }

    /// Copies of the eigenvalues clipped into `[0, 1]`.
    pub fn clipped(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|v| v.clamp(0.0, 1.0)).collect()
    }
}
