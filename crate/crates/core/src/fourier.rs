//! Group Fourier transform on SU(2).
//!
//! `f̂(l) = ∫ f(x) t^l(x)* dx` and `f(x) = Σ_l (2l+1) Tr(t^l(x) f̂(l))`.
//! Transforms on a [`QuadratureGrid`] are evaluated slice by slice in `β`,
//! separating the `α` and `γ` sums. Slices run in parallel and are reduced in
//! slice order, so results do not depend on scheduling.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{EulerAngles, QuadratureGrid};
use crate::repr::{wigner_matrices_up_to, wigner_small_d_all};
use crate::{CMatrix, HalfInt, C64};

/// Fourier coefficients `f̂(l)` for `0 ≤ l ≤ band`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    band: HalfInt,
    /// Indexed by `2l`.
    entries: Vec<CMatrix>,
    /// Band of the grid the coefficients were computed on, if any. When it
    /// exceeds `band`, content of the samples above `band` was discarded.
    pub source_band: Option<HalfInt>,
}

impl FourierCoefficients {
    pub fn zeros(band: HalfInt) -> Self {
        FourierCoefficients {
            band,
            entries: band.up_to().map(|l| CMatrix::zeros(l.dim(), l.dim())).collect(),
            source_band: None,
        }
    }

    /// Builds coefficients from matrices indexed by `2l`, checking sizes.
    pub fn from_entries(entries: Vec<CMatrix>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("at least the l = 0 entry is required".into()));
        }
        for (two_l, m) in entries.iter().enumerate() {
            let d = two_l + 1;
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::InvalidParameter(format!(
                    "entry for 2l = {two_l} is {}x{}, expected {d}x{d}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let band = HalfInt::from_twice(entries.len() as u32 - 1);
        Ok(FourierCoefficients { band, entries, source_band: None })
    }

    /// Coefficients `c(l) = f(l) · I`.
    pub fn scalar(band: HalfInt, f: impl Fn(HalfInt) -> C64) -> Self {
        let entries = band
            .up_to()
            .map(|l| CMatrix::identity(l.dim(), l.dim()) * f(l))
            .collect();
        FourierCoefficients { band, entries, source_band: None }
    }

    pub fn band(&self) -> HalfInt {
        self.band
    }

    pub fn get(&self, l: HalfInt) -> &CMatrix {
        &self.entries[l.twice() as usize]
    }

    pub fn get_mut(&mut self, l: HalfInt) -> &mut CMatrix {
        &mut self.entries[l.twice() as usize]
    }

    pub fn entries(&self) -> &[CMatrix] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (HalfInt, &CMatrix)> {
        self.band.up_to().zip(&self.entries)
    }

    /// Drops all `l` above `band`.
    pub fn truncate(&self, band: HalfInt) -> Result<Self> {
        if band > self.band {
            return Err(Error::BandMismatch(format!(
                "cannot truncate band {} to larger band {band}",
                self.band
            )));
        }
        Ok(FourierCoefficients {
            band,
            entries: self.entries[..=band.twice() as usize].to_vec(),
            source_band: self.source_band,
        })
    }

    /// Pads with zero blocks up to `band`.
    pub fn extend(&self, band: HalfInt) -> Self {
        let mut out = self.clone();
        for l in band.up_to().skip(self.entries.len()) {
            out.entries.push(CMatrix::zeros(l.dim(), l.dim()));
        }
        out.band = band.max(self.band);
        out
    }

    pub fn map(&self, mut f: impl FnMut(HalfInt, &CMatrix) -> CMatrix) -> Self {
        FourierCoefficients {
            band: self.band,
            entries: self.iter().map(|(l, m)| f(l, m)).collect(),
            source_band: self.source_band,
        }
    }

    /// Largest entrywise difference, treating missing blocks as zero.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.entries.len().max(other.entries.len());
        (0..n)
            .map(|i| match (self.entries.get(i), other.entries.get(i)) {
                (Some(a), Some(b)) => max_abs(&(a - b)),
                (Some(a), None) | (None, Some(a)) => max_abs(a),
                (None, None) => 0.0,
            })
            .fold(0.0, f64::max)
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `e^{i s m x}` for `2m = -tl..=tl`, indexed by `2m + tl`.
fn phase_table(tl: i32, x: f64, sign: f64) -> Vec<C64> {
    (-tl..=tl)
        .map(|tm| C64::from_polar(1.0, sign * tm as f64 / 2.0 * x))
        .collect()
}

/// Forward transform `f̂(l) = Σ_k w_k f(x_k) t^l(x_k)*` for `l ≤ band`.
pub fn forward(samples: &[C64], grid: &QuadratureGrid, band: HalfInt) -> Result<FourierCoefficients> {
    if samples.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), found: samples.len() });
    }
    if band > grid.band_limit() {
        return Err(Error::BandMismatch(format!(
            "requested band {band} exceeds grid band {}",
            grid.band_limit()
        )));
    }
    let tl = band.twice() as i32;
    let width = (2 * tl + 1) as usize;
    let alpha_phases: Vec<Vec<C64>> = grid.alphas().iter().map(|&a| phase_table(tl, a, 1.0)).collect();
    let gamma_phases: Vec<Vec<C64>> = grid.gammas().iter().map(|&g| phase_table(tl, g, 1.0)).collect();
    let (na, ng) = (grid.alphas().len(), grid.gammas().len());

    let slices: Vec<Vec<CMatrix>> = (0..grid.betas().len())
        .into_par_iter()
        .map(|ib| {
            let chunk = &samples[ib * na * ng..(ib + 1) * na * ng];
            // h[ia][n] = Σ_γ f e^{inγ}
            let mut h = vec![C64::new(0.0, 0.0); na * width];
            for ia in 0..na {
                for ig in 0..ng {
                    let f = chunk[ia * ng + ig];
                    if f == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let row = &mut h[ia * width..(ia + 1) * width];
                    for (slot, p) in row.iter_mut().zip(&gamma_phases[ig]) {
                        *slot += f * p;
                    }
                }
            }
            // g[m][n] = Σ_α e^{imα} h[ia][n]
            let mut g = DMatrix::<C64>::zeros(width, width);
            for ia in 0..na {
                for (mi, pa) in alpha_phases[ia].iter().enumerate() {
                    for ni in 0..width {
                        g[(mi, ni)] += pa * h[ia * width + ni];
                    }
                }
            }
            let w = grid.slice_weight(ib);
            let small = wigner_small_d_all(band, grid.betas()[ib]);
            band.up_to()
                .map(|l| {
                    let ltl = l.twice() as i32;
                    let off = (tl - ltl) as usize;
                    let d = &small[l.twice() as usize];
                    CMatrix::from_fn(l.dim(), l.dim(), |a, b| {
                        g[(off + 2 * b, off + 2 * a)] * (w * d[(b, a)])
                    })
                })
                .collect()
        })
        .collect();

    let mut out = FourierCoefficients::zeros(band);
    for slice in slices {
        for (acc, part) in out.entries.iter_mut().zip(slice) {
            *acc += part;
        }
    }
    out.source_band = Some(grid.band_limit());
    Ok(out)
}

/// `Σ_l (2l+1) Tr(t^l(x) c(l))` at each point.
pub fn inverse(coeffs: &FourierCoefficients, points: &[EulerAngles]) -> Vec<C64> {
    points
        .par_iter()
        .map(|x| {
            wigner_matrices_up_to(coeffs.band, x)
                .iter()
                .zip(coeffs.iter())
                .map(|(d, (l, c))| trace_of_product(d, c) * l.dim() as f64)
                .sum()
        })
        .collect()
}

fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

/// Inverse transform evaluated at every node of `grid`, in node order.
///
/// Uses the separable structure of the grid; equivalent to [`inverse`] on
/// `grid.nodes()`.
pub fn inverse_on_grid(coeffs: &FourierCoefficients, grid: &QuadratureGrid) -> Vec<C64> {
    let band = coeffs.band;
    let tl = band.twice() as i32;
    let width = (2 * tl + 1) as usize;
    let alpha_phases: Vec<Vec<C64>> = grid.alphas().iter().map(|&a| phase_table(tl, a, -1.0)).collect();
    let gamma_phases: Vec<Vec<C64>> = grid.gammas().iter().map(|&g| phase_table(tl, g, -1.0)).collect();
    let (na, ng) = (grid.alphas().len(), grid.gammas().len());
    let slices: Vec<Vec<C64>> = grid
        .betas()
        .par_iter()
        .map(|&beta| {
            let small = wigner_small_d_all(band, beta);
            // h[m][n] = Σ_l (2l+1) d^l_{mn} c(l)_{nm}
            let mut h = DMatrix::<C64>::zeros(width, width);
            for (l, c) in coeffs.iter() {
                let off = (tl - l.twice() as i32) as usize;
                let d = &small[l.twice() as usize];
                let dim = l.dim() as f64;
                for a in 0..l.dim() {
                    for b in 0..l.dim() {
                        h[(off + 2 * a, off + 2 * b)] += c[(b, a)] * (dim * d[(a, b)]);
                    }
                }
            }
            // q[ia][n] = Σ_m e^{-imα} h[m][n]
            let mut q = vec![C64::new(0.0, 0.0); na * width];
            for ia in 0..na {
                for (mi, pa) in alpha_phases[ia].iter().enumerate() {
                    for ni in 0..width {
                        q[ia * width + ni] += pa * h[(mi, ni)];
                    }
                }
            }
            let mut vals = Vec::with_capacity(na * ng);
            for ia in 0..na {
                let row = &q[ia * width..(ia + 1) * width];
                for gp in gamma_phases.iter() {
                    vals.push(row.iter().zip(gp).map(|(a, b)| a * b).sum());
                }
            }
            vals
        })
        .collect();
    slices.into_iter().flatten().collect()
}

/// `sqrt(Σ_l (2l+1) ‖c(l)‖²_HS)`.
pub fn plancherel_norm(coeffs: &FourierCoefficients) -> f64 {
    coeffs
        .iter()
        .map(|(l, c)| l.dim() as f64 * c.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}

/// Coefficients of `f ∗ g`, `(f∗g)(x) = ∫ f(y) g(y⁻¹x) dy`.
///
/// With `f̂(l) = ∫ f t^l*`, the convolution theorem reads
/// `(f∗g)^(l) = ĝ(l) · f̂(l)`.
pub fn convolve(fhat: &FourierCoefficients, ghat: &FourierCoefficients) -> Result<FourierCoefficients> {
    if fhat.band != ghat.band {
        return Err(Error::BandMismatch(format!(
            "convolution of bands {} and {}",
            fhat.band, ghat.band
        )));
    }
    Ok(FourierCoefficients {
        band: fhat.band,
        entries: fhat.entries.iter().zip(&ghat.entries).map(|(f, g)| g * f).collect(),
        source_band: None,
    })
}
