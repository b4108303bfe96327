//! Spectral calculus for the Laplacian and sub-Laplacians on SU(2).
//!
//! The sub-Laplacian `-Σ_{i∈S} X_i²` has symbol `L̂(l)` with eigenvalues
//! `ν²`; functions of it are the symbols `U diag(φ(ν²)) U*`. Heat traces at
//! the identity use closed-form eigenvalues (`l(l+1)` for the Laplacian,
//! `l(l+1) - m²` for two generators, `m²` for one) so that very large bands
//! are cheap.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fourier::FourierCoefficients;
use crate::repr::{sublaplacian_symbol, SpectralWeight};
use crate::symcalc::MultiplierSymbol;
use crate::{CMatrix, HalfInt, C64};

/// Relative contribution of the last shell accepted by the truncation guard.
pub const SHELL_TOL: f64 = 1e-12;

/// Eigenvalues below this are treated as the zero mode.
pub const ZERO_MODE_TOL: f64 = 1e-9;

/// The operator whose spectral calculus is used.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OperatorChoice {
    /// `-X_1² - X_2² - X_3²`.
    Laplacian,
    /// `-Σ_{i∈S} X_i²` for a nonempty set of 0-based indices into `{X_1, X_2, X_3}`.
    Sublaplacian(Vec<usize>),
}

impl OperatorChoice {
    pub fn sublaplacian(system: &[usize]) -> Result<Self> {
        let mut s = system.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return Err(Error::Precondition("sub-Laplacian system must be nonempty".into()));
        }
        if s.iter().any(|&i| i > 2) {
            return Err(Error::InvalidParameter("su(2) basis indices are 1, 2, 3".into()));
        }
        Ok(OperatorChoice::Sublaplacian(s))
    }

    /// The 0-based generator set (all three for the Laplacian).
    pub fn system(&self) -> Vec<usize> {
        match self {
            OperatorChoice::Laplacian => vec![0, 1, 2],
            OperatorChoice::Sublaplacian(s) => s.clone(),
        }
    }

    /// `-X_3²` is the only one-generator operator that is diagonal in the
    /// weight basis; two generators are diagonal only for `{X_1, X_2}`.
    pub fn diagonal_in_weight_basis(&self) -> bool {
        matches!(self.system().as_slice(), [0, 1] | [0, 1, 2] | [2])
    }

    /// Closed-form eigenvalues of the symbol at `l`, as a multiset: ordered
    /// by ascending weight when the symbol is diagonal in the weight basis,
    /// ascending otherwise.
    pub fn eigenvalues(&self, l: HalfInt) -> Vec<f64> {
        let lambda = l.casimir();
        let sys = self.system();
        let mut v: Vec<f64> = match sys.len() {
            3 => vec![lambda; l.dim()],
            2 => l.weights().map(|m| lambda - m * m).collect(),
            _ => l.weights().map(|m| m * m).collect(),
        };
        if !self.diagonal_in_weight_basis() {
            v.sort_by(f64::total_cmp);
        }
        v
    }

    /// `Σ_i e^{-t ν_i²}` over one irrep, summed from the smallest eigenvalue
    /// upward and stopping once the remaining terms cannot matter.
    pub fn shell_heat_trace(&self, t: f64, l: HalfInt) -> f64 {
        let lambda = l.casimir();
        let n = l.dim() as f64;
        match self.system().len() {
            3 => n * (-t * lambda).exp(),
            2 => {
                // ν² = λ - m², smallest at |m| = l
                let mut sum = 0.0;
                let mut two_m = l.twice() as i32;
                while two_m >= 0 {
                    let m = two_m as f64 / 2.0;
                    let term = (-t * (lambda - m * m)).exp();
                    sum += if two_m == 0 { term } else { 2.0 * term };
                    if (two_m as f64 + 1.0) * term < 1e-17 * sum {
                        break;
                    }
                    two_m -= 2;
                }
                sum
            }
            _ => l.weights().map(|m| (-t * m * m).exp()).sum(),
        }
    }
}

impl fmt::Display for OperatorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorChoice::Laplacian => write!(f, "laplacian"),
            OperatorChoice::Sublaplacian(s) => {
                let idx: Vec<String> = s.iter().map(|i| (i + 1).to_string()).collect();
                write!(f, "sublaplacian:{}", idx.join(","))
            }
        }
    }
}

impl FromStr for OperatorChoice {
    type Err = Error;

    /// `laplacian` or `sublaplacian:<1-based indices>`, e.g. `sublaplacian:1,2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "laplacian" {
            return Ok(OperatorChoice::Laplacian);
        }
        let Some(rest) = s.strip_prefix("sublaplacian:") else {
            return Err(Error::InvalidParameter(format!(
                "unknown operator {s:?} (expected laplacian or sublaplacian:<indices>)"
            )));
        };
        let idx = rest
            .split(',')
            .map(|p| match p.trim().parse::<usize>() {
                Ok(i) if (1..=3).contains(&i) => Ok(i - 1),
                _ => Err(Error::InvalidParameter(format!("bad generator index {p:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::sublaplacian(&idx)
    }
}

fn weight_data(op: &OperatorChoice, l: HalfInt) -> Result<SpectralWeight> {
    sublaplacian_symbol(l, &op.system())
}

/// `φ(L̂)` for `l ≤ band`: `φ(λ_l) I` for the Laplacian and
/// `U diag(φ(ν²)) U*` for a sub-Laplacian.
pub fn spectral_symbol(phi: impl Fn(f64) -> f64, op: &OperatorChoice, band: HalfInt) -> Result<MultiplierSymbol> {
    let mut blocks = Vec::new();
    for l in band.up_to() {
        let w = weight_data(op, l)?;
        for &v in &w.nu_sq {
            let value = phi(v);
            if !value.is_finite() {
                return Err(Error::NonFinite { eigenvalue: v, value });
            }
        }
        blocks.push(match op {
            OperatorChoice::Laplacian => CMatrix::identity(l.dim(), l.dim()) * C64::new(phi(w.lambda), 0.0),
            OperatorChoice::Sublaplacian(_) => w.apply_function(&phi),
        });
    }
    Ok(MultiplierSymbol::from_coefficients(FourierCoefficients::from_entries(blocks)?))
}

/// Bessel potential `(1 + L)^{-a/2}`.
pub fn bessel_symbol(a: f64, op: &OperatorChoice, band: HalfInt) -> Result<MultiplierSymbol> {
    spectral_symbol(|v| (1.0 + v).powf(-a / 2.0), op, band)
}

/// Heat semigroup `e^{-tL}`.
pub fn heat_symbol(t: f64, op: &OperatorChoice, band: HalfInt) -> Result<MultiplierSymbol> {
    check_time(t)?;
    spectral_symbol(|v| (-t * v).exp(), op, band)
}

/// `L^{-a/2}` on the orthogonal complement of the kernel, zero on the kernel.
pub fn riesz_symbol(a: f64, op: &OperatorChoice, band: HalfInt) -> Result<MultiplierSymbol> {
    spectral_symbol(|v| if v < ZERO_MODE_TOL { 0.0 } else { v.powf(-a / 2.0) }, op, band)
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    Ok(())
}

/// Partial heat trace `Σ_{l≤band} (2l+1) Tr e^{-tL̂(l)}` and the share of the
/// last shell `l = band` in it.
pub fn heat_trace_sum(t: f64, op: &OperatorChoice, band: HalfInt) -> Result<(f64, f64)> {
    check_time(t)?;
    let mut sum = 0.0;
    let mut last = 0.0;
    for l in band.up_to() {
        last = l.dim() as f64 * op.shell_heat_trace(t, l);
        sum += last;
    }
    Ok((sum, last / sum))
}

/// Heat kernel at the identity, `h_t(e) = Σ_{l≤band} (2l+1) Tr e^{-tL̂(l)}`,
/// failing with [`Error::TruncationInsufficient`] if the shell `l = band`
/// contributes `≥ 1e-12` of the total.
pub fn heat_trace_identity(t: f64, op: &OperatorChoice, band: HalfInt) -> Result<f64> {
    let (sum, share) = heat_trace_sum(t, op, band)?;
    if share >= SHELL_TOL {
        return Err(Error::TruncationInsufficient { lmax: band.value(), relative_shell: share });
    }
    Ok(sum)
}

/// [`heat_trace_identity`] with the band doubled from `start` until the
/// guard passes; returns the value and the band used. Fails if `cap` is
/// reached first.
pub fn heat_trace_adaptive(t: f64, op: &OperatorChoice, start: HalfInt, cap: HalfInt) -> Result<(f64, HalfInt)> {
    check_time(t)?;
    let mut band = start.max(HalfInt::HALF);
    let mut sum = 0.0;
    let mut next = HalfInt::ZERO;
    loop {
        let mut last = 0.0;
        for two_l in next.twice()..=band.twice() {
            let l = HalfInt::from_twice(two_l);
            last = l.dim() as f64 * op.shell_heat_trace(t, l);
            sum += last;
        }
        let share = last / sum;
        if share < SHELL_TOL {
            return Ok((sum, band));
        }
        if band >= cap {
            return Err(Error::TruncationInsufficient { lmax: band.value(), relative_shell: share });
        }
        next = band.add_half();
        band = HalfInt::from_twice((band.twice() * 2).min(cap.twice()));
    }
}
