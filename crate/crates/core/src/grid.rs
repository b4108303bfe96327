//! SU(2) coordinates and Haar-exact quadrature grids.
//!
//! Grids are tensor products: `α` and `γ` are uniform on the double-cover
//! period `[0, 4π)` and `β` uses Gauss–Legendre nodes in `cos β`. For a grid of
//! band `L` this integrates every product of two matrix coefficients of band
//! `≤ L` exactly.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::repr::{attach_phases, wigner_small_d_all};
use crate::{CMatrix, HalfInt, C64};

/// Default cap on the number of grid nodes.
pub const DEFAULT_NODE_CAP: usize = 20_000_000;

/// Tolerance used by [`grid_selftest`].
pub const SELFTEST_TOL: f64 = 1e-10;

/// ZYZ Euler angles of an element of SU(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    /// In `[0, π]`.
    pub beta: f64,
    /// Taken modulo `4π`.
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidParameter("Euler angles must be finite".into()));
        }
        if !(0.0..=PI).contains(&beta) {
            return Err(Error::InvalidParameter(format!("beta = {beta} outside [0, π]")));
        }
        Ok(EulerAngles { alpha, beta, gamma })
    }

    pub fn identity() -> Self {
        EulerAngles { alpha: 0.0, beta: 0.0, gamma: 0.0 }
    }
}

/// An element of SU(2), stored as the pair `(a, b)` of the matrix
/// `[[a, -b̄], [b, ā]]` in the ascending weight basis of the spin-1/2 irrep.
///
/// With this layout the matrix is exactly `t^{1/2}(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2 {
    pub a: C64,
    pub b: C64,
}

impl Su2 {
    pub fn identity() -> Self {
        Su2 { a: C64::new(1.0, 0.0), b: C64::new(0.0, 0.0) }
    }

    pub fn from_euler(x: &EulerAngles) -> Self {
        let (c, s) = ((x.beta / 2.0).cos(), (x.beta / 2.0).sin());
        Su2 {
            a: C64::from_polar(c, (x.alpha + x.gamma) / 2.0),
            b: -C64::from_polar(s, -(x.alpha - x.gamma) / 2.0),
        }
    }

    /// Euler angles with `α ∈ [0, 2π)` and `γ ∈ [0, 4π)`.
    ///
    /// At `β = 0` or `β = π` only `α + γ` (resp. `α - γ`) is determined; the
    /// free angle is set to zero.
    pub fn to_euler(&self) -> EulerAngles {
        let (na, nb) = (self.a.norm(), self.b.norm());
        let beta = 2.0 * nb.atan2(na);
        let (mut alpha, mut gamma) = if nb < 1e-15 {
            (0.0, 2.0 * self.a.arg())
        } else if na < 1e-15 {
            (-2.0 * (-self.b).arg(), 0.0)
        } else {
            let (pa, pb) = (self.a.arg(), (-self.b).arg());
            (pa - pb, pa + pb)
        };
        let shift = (alpha / (2.0 * PI)).floor();
        alpha -= shift * 2.0 * PI;
        gamma -= shift * 2.0 * PI;
        gamma = gamma.rem_euclid(4.0 * PI);
        if alpha >= 2.0 * PI {
            alpha -= 2.0 * PI;
            gamma = (gamma - 2.0 * PI).rem_euclid(4.0 * PI);
        }
        EulerAngles { alpha, beta: beta.clamp(0.0, PI), gamma }
    }

    pub fn mul(&self, other: &Su2) -> Su2 {
        Su2 {
            a: self.a * other.a - self.b.conj() * other.b,
            b: self.b * other.a + self.a.conj() * other.b,
        }
    }

    pub fn inverse(&self) -> Su2 {
        Su2 { a: self.a.conj(), b: -self.b }
    }

    /// `exp(c_1 X_1 + c_2 X_2 + c_3 X_3)`.
    pub fn exp_algebra(c: &[f64; 3]) -> Su2 {
        let theta = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt() / 2.0;
        let sinc = if theta < 1e-8 { 1.0 - theta * theta / 6.0 } else { theta.sin() / theta };
        Su2 {
            a: C64::new(theta.cos(), sinc * c[2] / 2.0),
            b: C64::new(-sinc * c[1] / 2.0, -sinc * c[0] / 2.0),
        }
    }

    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[self.a, -self.b.conj(), self.b, self.a.conj()])
    }

    /// Distance to `other` in the max-entry norm of the spin-1/2 matrices.
    pub fn distance(&self, other: &Su2) -> f64 {
        (self.a - other.a).norm().max((self.b - other.b).norm())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (weights sum to 2).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Tensor-product quadrature on SU(2) for the normalized Haar measure.
///
/// Node `k` has index decomposition `k = (i_β · n_α + i_α) · n_γ + i_γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    band: HalfInt,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    gammas: Vec<f64>,
    /// Gauss–Legendre weights in `cos β`, normalized to sum 1.
    beta_weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn band_limit(&self) -> HalfInt {
        self.band
    }

    pub fn len(&self) -> usize {
        self.betas.len() * self.alphas.len() * self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn beta_weights(&self) -> &[f64] {
        &self.beta_weights
    }

    /// Weight shared by all nodes on the `β` slice `ib`.
    pub fn slice_weight(&self, ib: usize) -> f64 {
        self.beta_weights[ib] / (self.alphas.len() * self.gammas.len()) as f64
    }

    pub fn index(&self, ib: usize, ia: usize, ig: usize) -> usize {
        (ib * self.alphas.len() + ia) * self.gammas.len() + ig
    }

    pub fn node(&self, k: usize) -> EulerAngles {
        let ng = self.gammas.len();
        let na = self.alphas.len();
        let (ig, rest) = (k % ng, k / ng);
        let (ia, ib) = (rest % na, rest / na);
        EulerAngles { alpha: self.alphas[ia], beta: self.betas[ib], gamma: self.gammas[ig] }
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.slice_weight(k / (self.alphas.len() * self.gammas.len()))
    }

    pub fn nodes(&self) -> impl Iterator<Item = EulerAngles> + '_ {
        (0..self.len()).map(|k| self.node(k))
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.weight(k)).collect()
    }

    /// Samples `f` at every node, in node order.
    pub fn sample<T>(&self, f: impl Fn(&EulerAngles) -> T) -> Vec<T> {
        self.nodes().map(|x| f(&x)).collect()
    }
}

pub fn build_grid(band: HalfInt) -> Result<QuadratureGrid> {
    build_grid_with_cap(band, DEFAULT_NODE_CAP)
}

/// Builds the grid of band `L`: `2·(2L)+1` points in each of `α`, `γ` and
/// `⌊L⌋+1` Gauss–Legendre points in `cos β`.
pub fn build_grid_with_cap(band: HalfInt, cap: usize) -> Result<QuadratureGrid> {
    let n_ag = 2 * band.twice() as usize + 1;
    let n_b = band.twice() as usize / 2 + 1;
    let nodes = n_ag.saturating_mul(n_ag).saturating_mul(n_b);
    if nodes > cap {
        return Err(Error::Resource { nodes, cap });
    }
    let uniform = |n: usize| (0..n).map(|i| 4.0 * PI * i as f64 / n as f64).collect::<Vec<_>>();
    let (x, w) = gauss_legendre(n_b);
    // Descending cos β gives ascending β.
    let betas = x.iter().rev().map(|c| c.clamp(-1.0, 1.0).acos()).collect();
    let beta_weights = w.iter().rev().map(|v| v / 2.0).collect();
    Ok(QuadratureGrid {
        band,
        alphas: uniform(n_ag),
        betas,
        gammas: uniform(n_ag),
        beta_weights,
    })
}

/// `Σ_k w_k f(x_k)`.
pub fn integrate(samples: &[C64], grid: &QuadratureGrid) -> Result<C64> {
    if samples.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), found: samples.len() });
    }
    let per_slice = grid.alphas.len() * grid.gammas.len();
    Ok(samples
        .chunks(per_slice)
        .enumerate()
        .map(|(ib, chunk)| chunk.iter().sum::<C64>() * grid.slice_weight(ib))
        .sum())
}

/// Outcome of [`grid_selftest`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfTestReport {
    pub pass: bool,
    pub max_residual: f64,
    /// Number of matrix coefficients included.
    pub functions: usize,
}

/// Checks `∫ D^l_{mn} conj(D^{l'}_{m'n'}) = δ δ δ / (2l+1)` for all `l, l' ≤ band`.
pub fn grid_selftest(grid: &QuadratureGrid, band: HalfInt) -> Result<SelfTestReport> {
    if band > grid.band {
        return Err(Error::Precondition(format!(
            "self-test band {band} exceeds grid band {}",
            grid.band
        )));
    }
    let functions: usize = band.up_to().map(|l| l.dim() * l.dim()).sum();
    let mut samples = CMatrix::zeros(grid.len(), functions);
    let mut expected = Vec::with_capacity(functions);
    for l in band.up_to() {
        expected.extend(std::iter::repeat_n(1.0 / l.dim() as f64, l.dim() * l.dim()));
    }
    for (ib, &beta) in grid.betas.iter().enumerate() {
        let small = wigner_small_d_all(band, beta);
        let sw = grid.slice_weight(ib).sqrt();
        for (ia, &alpha) in grid.alphas.iter().enumerate() {
            for (ig, &gamma) in grid.gammas.iter().enumerate() {
                let row = grid.index(ib, ia, ig);
                let mut col = 0;
                for l in band.up_to() {
                    let d = attach_phases(l, &small[l.twice() as usize], alpha, gamma);
                    for v in d.iter() {
                        samples[(row, col)] = v * sw;
                        col += 1;
                    }
                }
            }
        }
    }
    let gram = samples.adjoint() * &samples;
    let target = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(expected));
    let max_residual = gram
        .iter()
        .zip(target.iter())
        .map(|(g, t)| (g - C64::new(*t, 0.0)).norm())
        .fold(0.0, f64::max);
    Ok(SelfTestReport { pass: max_residual < SELFTEST_TOL, max_residual, functions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::wigner_matrix;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn euler_round_trip() {
        let x = EulerAngles::new(1.2, 0.8, 5.5).unwrap();
        let back = Su2::from_euler(&x).to_euler();
        assert!((x.alpha - back.alpha).abs() < 1e-13);
        assert!((x.beta - back.beta).abs() < 1e-13);
        assert!((x.gamma - back.gamma).abs() < 1e-13);
    }

    #[test]
    fn su2_matrix_is_spin_half_rep() {
        let x = EulerAngles::new(0.4, 2.2, 3.9).unwrap();
        let m = Su2::from_euler(&x).matrix();
        let d = wigner_matrix(HalfInt::HALF, &x);
        assert!((m - d).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn group_law_matches_matrix_product() {
        let x = Su2::from_euler(&EulerAngles::new(0.3, 1.0, 2.0).unwrap());
        let y = Su2::from_euler(&EulerAngles::new(4.0, 2.5, 0.1).unwrap());
        let prod = x.matrix() * y.matrix();
        assert!((x.mul(&y).matrix() - prod).iter().all(|z| z.norm() < 1e-14));
        assert!(x.mul(&x.inverse()).distance(&Su2::identity()) < 1e-14);
    }

    #[test]
    fn exponentials_of_basis_elements() {
        let t = 0.9;
        let cases = [
            ([t, 0.0, 0.0], EulerAngles { alpha: -PI / 2.0, beta: t, gamma: PI / 2.0 }),
            ([0.0, t, 0.0], EulerAngles { alpha: 0.0, beta: t, gamma: 0.0 }),
            ([0.0, 0.0, t], EulerAngles { alpha: t, beta: 0.0, gamma: 0.0 }),
        ];
        for (c, x) in cases {
            assert!(Su2::exp_algebra(&c).distance(&Su2::from_euler(&x)) < 1e-14);
        }
    }

    #[test]
    fn trivial_grid() {
        let g = build_grid(HalfInt::ZERO).unwrap();
        assert_eq!(g.len(), 1);
        assert!((g.weight(0) - 1.0).abs() < 1e-15);
        let r = grid_selftest(&g, HalfInt::ZERO).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn spin_half_coefficients_integrate_to_zero() {
        let g = build_grid(HalfInt::HALF).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let s: Vec<C64> = g.sample(|x| wigner_matrix(HalfInt::HALF, x)[(i, k)]);
                assert!(integrate(&s, &g).unwrap().norm() < 1e-10);
            }
        }
    }

    #[test]
    fn integrate_examples() {
        let g = build_grid(HalfInt::from_int(1)).unwrap();
        let ones = vec![C64::new(1.0, 0.0); g.len()];
        assert!((integrate(&ones, &g).unwrap() - 1.0).norm() < 1e-12);
        let d00: Vec<C64> = g.sample(|x| wigner_matrix(HalfInt::ONE, x)[(1, 1)]);
        assert!(integrate(&d00, &g).unwrap().norm() < 1e-10);
        let sq: Vec<C64> = g.sample(|x| C64::new(wigner_matrix(HalfInt::HALF, x)[(1, 1)].norm_sqr(), 0.0));
        assert!((integrate(&sq, &g).unwrap() - 0.5).norm() < 1e-10);
        assert!(matches!(integrate(&ones[1..], &g), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn weights_positive_and_normalized() {
        let g = build_grid(HalfInt::from_int(2)).unwrap();
        let w = g.weights();
        assert!(w.iter().all(|&v| v > 0.0));
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(grid_selftest(&g, HalfInt::from_int(2)).unwrap().pass);
    }

    #[test]
    fn selftest_band_precondition() {
        let g = build_grid(HalfInt::HALF).unwrap();
        assert!(matches!(
            grid_selftest(&g, HalfInt::from_twice(3)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn node_cap() {
        assert!(matches!(
            build_grid_with_cap(HalfInt::from_int(10), 1000),
            Err(Error::Resource { .. })
        ));
    }
}
