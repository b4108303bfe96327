//! Kernels of symbols that are diagonal in the weight basis.
//!
//! If `σ(l) = diag(φ(ν²(l, m)))` in the weight basis, the kernel depends on
//! `x = (α, β, γ)` only through `β` and `ψ = α + γ`:
//! `K(ψ, β) = Σ_m e^{-imψ} c_m(β)` with `c_m(β) = Σ_{l≥|m|} (2l+1) d^l_{mm}(β) φ(l, m)`.
//! For the Laplacian and the sub-Laplacian of `{X_1, X_2}` the eigenvalue only
//! depends on `|m|`, the kernel is real and even about `ψ = 2π`, and
//! `∫_G F = (1/2)∫_0^π sin β dβ · (1/2π)∫_0^{2π} g(ψ, β) dψ`.
//!
//! This gives accurate `L^p` norms of heat kernels and Bessel potentials of
//! heat kernels at bands far beyond what tensor grids allow.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::gauss_legendre;
use crate::repr::WignerRecurrence;
use crate::speccalc::OperatorChoice;
use crate::HalfInt;

/// Terms with `(2l+1)|φ|` below this fraction of the largest term are dropped
/// once `|φ|` is decreasing.
pub const TAIL_TOL: f64 = 1e-17;

/// Default hard cap on `l`.
pub const DEFAULT_CAP: u32 = 200_000;

type Phi = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Kernel of `φ(L)` for an operator whose symbol is diagonal in the weight
/// basis with eigenvalues depending on `|m|` only.
pub struct AxialKernel {
    op: OperatorChoice,
    phi: Phi,
    cap: HalfInt,
    /// Largest `(2l+1)|φ|` over all `(l, m)`; sets the tail tolerance.
    scale: f64,
}

impl std::fmt::Debug for AxialKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AxialKernel").field("op", &self.op).field("cap", &self.cap).finish()
    }
}

impl AxialKernel {
    /// Fails with [`Error::Unsupported`] unless `op` is the Laplacian or the
    /// sub-Laplacian of `{X_1, X_2}` (or of all three fields).
    pub fn new(op: &OperatorChoice, phi: impl Fn(f64) -> f64 + Send + Sync + 'static, cap: HalfInt) -> Result<Self> {
        if !matches!(op.system().as_slice(), [0, 1] | [0, 1, 2]) {
            return Err(Error::Unsupported(format!(
                "kernel norms need a symbol diagonal in the weight basis with |m|-symmetric spectrum; {op} is not supported"
            )));
        }
        let mut k = AxialKernel { op: op.clone(), phi: Box::new(phi), cap, scale: 1.0 };
        k.scale = k.peak()?;
        Ok(k)
    }

    /// Heat kernel `h_t`.
    pub fn heat(op: &OperatorChoice, t: f64) -> Result<Self> {
        Self::bessel_heat(op, 0.0, t)
    }

    /// Kernel of `(1 + L)^{-a/2} e^{-tL}`, i.e. `B_a h_t`.
    pub fn bessel_heat(op: &OperatorChoice, a: f64, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
        }
        Self::new(op, move |v| (1.0 + v).powf(-a / 2.0) * (-t * v).exp(), HalfInt::from_int(DEFAULT_CAP))
    }

    fn nu_sq(&self, l: f64, m: f64) -> f64 {
        let lambda = l * (l + 1.0);
        match self.op.system().len() {
            3 => lambda,
            _ => lambda - m * m,
        }
    }

    /// Largest `(2l+1)|φ(l, m)|`, scanning shells until they are negligible.
    fn peak(&self) -> Result<f64> {
        let mut peak: f64 = 0.0;
        let mut prev_shell = f64::INFINITY;
        for two_l in 0..=self.cap.twice() {
            let l = two_l as f64 / 2.0;
            let shell = (0..=two_l)
                .map(|k| (self.phi)(self.nu_sq(l, k as f64 - l)).abs() * (2.0 * l + 1.0))
                .fold(0.0, f64::max);
            peak = peak.max(shell);
            if shell < TAIL_TOL * peak && shell <= prev_shell {
                return Ok(peak.max(f64::MIN_POSITIVE));
            }
            prev_shell = shell;
        }
        Err(Error::TruncationInsufficient { lmax: self.cap.value(), relative_shell: prev_shell / peak })
    }

    /// `c_m(β)` for `2m = 0, 1, 2, ...`, indexed by `2m`, up to the last
    /// non-negligible weight.
    pub fn coefficients(&self, beta: f64) -> Result<Vec<f64>> {
        let tol = TAIL_TOL * self.scale;
        let mut out = Vec::new();
        let mut prev_first = f64::INFINITY;
        for two_m in 0..=self.cap.twice() as i32 {
            let m = two_m as f64 / 2.0;
            let first = (2.0 * m + 1.0) * (self.phi)(self.nu_sq(m, m)).abs();
            if first < tol && first <= prev_first {
                return Ok(out);
            }
            prev_first = first;
            let mut acc = 0.0;
            let mut prev_term = f64::INFINITY;
            let mut rec = WignerRecurrence::new(two_m, two_m, beta);
            loop {
                let l = rec.current_l();
                if l > self.cap {
                    return Err(Error::TruncationInsufficient { lmax: self.cap.value(), relative_shell: prev_term / self.scale });
                }
                let lv = l.value();
                let w = (2.0 * lv + 1.0) * (self.phi)(self.nu_sq(lv, m));
                if w.abs() < tol && w.abs() <= prev_term {
                    break;
                }
                prev_term = w.abs();
                acc += w * rec.current();
                rec.advance();
            }
            out.push(acc);
        }
        Err(Error::TruncationInsufficient { lmax: self.cap.value(), relative_shell: prev_first / self.scale })
    }

    /// `K(ψ, β)` from precomputed coefficients.
    pub fn evaluate(coeffs: &[f64], psi: f64) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(two_m, c)| {
                let mult = if two_m == 0 { 1.0 } else { 2.0 };
                mult * c * (two_m as f64 / 2.0 * psi).cos()
            })
            .sum()
    }

    pub fn value(&self, psi: f64, beta: f64) -> Result<f64> {
        Ok(Self::evaluate(&self.coefficients(beta)?, psi))
    }

    /// `‖K‖_p` for each `p` in `ps` (`p = ∞` allowed), using `quad`.
    pub fn lp_norms(&self, ps: &[f64], quad: &AxialQuadrature) -> Result<Vec<f64>> {
        if let Some(&p) = ps.iter().find(|&&p| !(p >= 1.0)) {
            return Err(Error::InvalidParameter(format!("p = {p} < 1")));
        }
        let coeffs: Vec<Vec<f64>> = quad.betas.par_iter().map(|&b| self.coefficients(b)).collect::<Result<_>>()?;
        let width = coeffs.iter().map(Vec::len).max().unwrap_or(0);
        let cos_table: Vec<Vec<f64>> = quad
            .psis
            .par_iter()
            .map(|&psi| {
                (0..width)
                    .map(|tm| if tm == 0 { 1.0 } else { 2.0 * (tm as f64 / 2.0 * psi).cos() })
                    .collect()
            })
            .collect();
        let rows: Vec<(Vec<f64>, f64)> = coeffs
            .par_iter()
            .zip(&quad.beta_weights)
            .map(|(c, &wb)| {
                let mut acc = vec![0.0; ps.len()];
                let mut sup: f64 = 0.0;
                for (tab, &wp) in cos_table.iter().zip(&quad.psi_weights) {
                    let v: f64 = c.iter().zip(tab).map(|(a, b)| a * b).sum::<f64>().abs();
                    sup = sup.max(v);
                    for (s, &p) in acc.iter_mut().zip(ps) {
                        if p.is_finite() {
                            *s += wb * wp * v.powf(p);
                        }
                    }
                }
                (acc, sup)
            })
            .collect();
        let at_identity = Self::evaluate(&self.coefficients(0.0)?, 0.0).abs();
        Ok(ps
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                if p.is_infinite() {
                    rows.iter().map(|r| r.1).fold(at_identity, f64::max)
                } else {
                    rows.iter().map(|r| r.0[i]).sum::<f64>().powf(1.0 / p)
                }
            })
            .collect())
    }
}

/// Product quadrature in `(β, ψ)` for the normalized Haar measure of
/// functions of `β` and `ψ = α + γ` that are even about `ψ = 2π`.
///
/// Both directions use Gauss–Legendre panels whose widths grow geometrically
/// away from the identity, resolving kernels concentrated there.
#[derive(Debug, Clone)]
pub struct AxialQuadrature {
    pub betas: Vec<f64>,
    /// Includes the factor `sin β / 2`.
    pub beta_weights: Vec<f64>,
    pub psis: Vec<f64>,
    /// Includes the factor `1 / 2π`.
    pub psi_weights: Vec<f64>,
}

fn graded_panels(hi: f64, first: f64, ratio: f64, points: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(points);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let (mut lo, mut width) = (0.0, first.min(hi));
    while lo < hi {
        let b = (lo + width).min(hi);
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push((lo + b) / 2.0 + (b - lo) / 2.0 * xi);
            weights.push((b - lo) / 2.0 * wi);
        }
        lo = b;
        width *= ratio;
    }
    (nodes, weights)
}

impl AxialQuadrature {
    /// Panels starting at widths `beta_first` and `psi_first`, growing by `ratio`.
    pub fn graded(beta_first: f64, psi_first: f64, ratio: f64, points: usize) -> Self {
        let (betas, wb) = graded_panels(PI, beta_first, ratio, points);
        let (psis, wp) = graded_panels(2.0 * PI, psi_first, ratio, points);
        AxialQuadrature {
            beta_weights: betas.iter().zip(&wb).map(|(b, w)| w * b.sin() / 2.0).collect(),
            betas,
            psi_weights: wp.iter().map(|w| w / (2.0 * PI)).collect(),
            psis,
        }
    }

    /// Quadrature adapted to heat-type kernels at time `t`: resolution `√t`
    /// along `β` and `t` (sub-Laplacian) or `√t` (Laplacian) along `ψ`.
    pub fn for_heat(op: &OperatorChoice, t: f64) -> Self {
        let psi_scale = if op.system().len() == 3 { t.sqrt() } else { t };
        Self::graded(t.sqrt() / 20.0, psi_scale / 20.0, 1.3, 8)
    }

    pub fn len(&self) -> usize {
        self.betas.len() * self.psis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
