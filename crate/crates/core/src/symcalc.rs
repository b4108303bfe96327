//! Matrix symbols on SU(2): quantization, kernels, difference operators
//! and seminorms.
//!
//! A multiplier symbol `σ(l)` acts by `(Af)^(l) = σ(l) f̂(l)`, i.e.
//! `Af(x) = Σ_l (2l+1) Tr(t^l(x) σ(l) f̂(l))`. It is the Fourier transform of
//! the right-convolution kernel `κ`, `Af = f ∗ κ`, and the symbol product
//! `σ·τ` corresponds to the kernel `κ_τ ∗ κ_σ`.
//!
//! Difference operators use the coefficients of the spin-1/2 representation,
//! `q_ij(x) = t^{1/2}(x)_ij - δ_ij` with `i, j ∈ {0, 1}` indexing the ascending
//! weight basis: `𝔻_ij σ = F(q_ij · F⁻¹σ)`. Because `q_ij(xy) = q_ij(x) +
//! q_ij(y) + Σ_k q_ik(x) q_kj(y)`, these satisfy the finite Leibniz rule
//! `𝔻_ij(στ) = (𝔻_ij σ)τ + σ(𝔻_ij τ) + Σ_k (𝔻_kj σ)(𝔻_ik τ)`.

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{forward, inverse, inverse_on_grid, FourierCoefficients};
use crate::grid::{build_grid, EulerAngles, QuadratureGrid};
use crate::repr::{derived_rep, sublaplacian_symbol, wigner_matrices_up_to};
use crate::{CMatrix, HalfInt, C64};

/// Operator norm (largest singular value) of a complex matrix.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// An `x`-independent symbol `σ(l)`, `0 ≤ l ≤ band`, in the weight basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSymbol {
    coeffs: FourierCoefficients,
}

impl MultiplierSymbol {
    pub fn from_coefficients(coeffs: FourierCoefficients) -> Self {
        MultiplierSymbol { coeffs }
    }

    pub fn from_fn(band: HalfInt, mut f: impl FnMut(HalfInt) -> CMatrix) -> Result<Self> {
        Ok(MultiplierSymbol {
            coeffs: FourierCoefficients::from_entries(band.up_to().map(&mut f).collect())?,
        })
    }

    pub fn identity(band: HalfInt) -> Self {
        Self::scalar(band, |_| 1.0)
    }

    /// `σ(l) = f(l) · I`.
    pub fn scalar(band: HalfInt, f: impl Fn(HalfInt) -> f64) -> Self {
        MultiplierSymbol { coeffs: FourierCoefficients::scalar(band, |l| C64::new(f(l), 0.0)) }
    }

    pub fn band(&self) -> HalfInt {
        self.coeffs.band()
    }

    pub fn get(&self, l: HalfInt) -> &CMatrix {
        self.coeffs.get(l)
    }

    pub fn iter(&self) -> impl Iterator<Item = (HalfInt, &CMatrix)> {
        self.coeffs.iter()
    }

    pub fn as_coefficients(&self) -> &FourierCoefficients {
        &self.coeffs
    }

    pub fn map(&self, f: impl FnMut(HalfInt, &CMatrix) -> CMatrix) -> Self {
        MultiplierSymbol { coeffs: self.coeffs.map(f) }
    }

    fn check_band(&self, other: &Self) -> Result<()> {
        if self.band() != other.band() {
            return Err(Error::BandMismatch(format!(
                "symbols of band {} and {}",
                self.band(),
                other.band()
            )));
        }
        Ok(())
    }

    /// Pointwise product `(σ·τ)(l) = σ(l) τ(l)`, the symbol of `A_σ ∘ A_τ`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_band(other)?;
        Ok(self.map(|l, s| s * other.get(l)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_band(other)?;
        Ok(self.map(|l, s| s + other.get(l)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_band(other)?;
        Ok(self.map(|l, s| s - other.get(l)))
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|_, s| s * c)
    }

    pub fn truncate(&self, band: HalfInt) -> Result<Self> {
        Ok(MultiplierSymbol { coeffs: self.coeffs.truncate(band)? })
    }

    /// `sup_l ‖σ(l)‖_op`, the L² operator norm of the quantization.
    pub fn sup_op_norm(&self) -> f64 {
        self.iter().map(|(_, m)| op_norm(m)).fold(0.0, f64::max)
    }

    /// `max_l ‖σ(l) - τ(l)‖_op`, treating missing blocks as zero.
    pub fn max_op_diff(&self, other: &Self) -> f64 {
        let band = self.band().max(other.band());
        let a = self.coeffs.extend(band);
        let b = other.coeffs.extend(band);
        a.iter().map(|(l, m)| op_norm(&(m - b.get(l)))).fold(0.0, f64::max)
    }

    /// JSON dump: `{"blocks": [{"two_l": .., "re": [...], "im": [...]}, ...]}`
    /// with row-major entries.
    pub fn to_json(&self) -> String {
        let blocks = self
            .iter()
            .map(|(l, m)| SymbolBlock {
                two_l: l.twice(),
                re: m.transpose().iter().map(|z| z.re).collect(),
                im: m.transpose().iter().map(|z| z.im).collect(),
            })
            .collect();
        serde_json::to_string(&SymbolDump { blocks }).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dump: SymbolDump = serde_json::from_str(text)?;
        let mut entries = Vec::with_capacity(dump.blocks.len());
        for (expected, b) in dump.blocks.iter().enumerate() {
            let d = b.two_l as usize + 1;
            if b.two_l as usize != expected || b.re.len() != d * d || b.im.len() != d * d {
                return Err(Error::Schema(format!("malformed block for two_l = {}", b.two_l)));
            }
            entries.push(CMatrix::from_fn(d, d, |i, k| C64::new(b.re[i * d + k], b.im[i * d + k])));
        }
        Ok(MultiplierSymbol { coeffs: FourierCoefficients::from_entries(entries)? })
    }
}

#[derive(Serialize, Deserialize)]
struct SymbolDump {
    blocks: Vec<SymbolBlock>,
}

#[derive(Serialize, Deserialize)]
struct SymbolBlock {
    two_l: u32,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// `Σ_l (2l+1) Tr(t^l(x) σ(l) f̂(l))` at each point.
pub fn quantize_apply(
    sigma: &MultiplierSymbol,
    fhat: &FourierCoefficients,
    points: &[EulerAngles],
) -> Result<Vec<C64>> {
    Ok(inverse(&apply_multiplier(sigma, fhat)?, points))
}

/// Coefficients `σ(l) f̂(l)` of `A_σ f`.
pub fn apply_multiplier(sigma: &MultiplierSymbol, fhat: &FourierCoefficients) -> Result<FourierCoefficients> {
    if sigma.band() != fhat.band() {
        return Err(Error::BandMismatch(format!(
            "symbol band {} vs function band {}",
            sigma.band(),
            fhat.band()
        )));
    }
    Ok(fhat.map(|l, f| sigma.get(l) * f))
}

/// The right-convolution kernel `F⁻¹σ` at each point.
pub fn kernel_from_symbol(sigma: &MultiplierSymbol, points: &[EulerAngles]) -> Vec<C64> {
    inverse(sigma.as_coefficients(), points)
}

/// An `x`-dependent symbol sampled at the nodes of a grid.
#[derive(Debug, Clone)]
pub struct FullSymbol {
    grid: QuadratureGrid,
    values: Vec<MultiplierSymbol>,
}

impl FullSymbol {
    /// Samples `σ(x, ·)` at every node of `grid`.
    pub fn from_fn(grid: QuadratureGrid, f: impl Fn(&EulerAngles) -> MultiplierSymbol) -> Result<Self> {
        let values: Vec<MultiplierSymbol> = grid.nodes().map(|x| f(&x)).collect();
        Self::new(grid, values)
    }

    pub fn new(grid: QuadratureGrid, values: Vec<MultiplierSymbol>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: values.len() });
        }
        if let Some(first) = values.first() {
            if values.iter().any(|v| v.band() != first.band()) {
                return Err(Error::BandMismatch("node symbols have different bands".into()));
            }
        }
        Ok(FullSymbol { grid, values })
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn band(&self) -> HalfInt {
        self.values.first().map(|v| v.band()).unwrap_or(HalfInt::ZERO)
    }

    pub fn at_node(&self, k: usize) -> &MultiplierSymbol {
        &self.values[k]
    }

    /// `X_j σ(·, l)`, computed entrywise through the Fourier transform in `x`
    /// on the symbol's grid. Exact when the `x`-dependence has band at most
    /// the grid band.
    pub fn derivative(&self, j: usize) -> Result<FullSymbol> {
        if j > 2 {
            return Err(Error::InvalidParameter(format!("derivative index {j} out of range")));
        }
        let gband = self.grid.band_limit();
        let reps: Vec<CMatrix> = gband.up_to().map(|l| derived_rep(l).matrices[j].clone()).collect();
        let mut values = self.values.clone();
        for l in self.band().up_to() {
            let d = l.dim();
            for a in 0..d {
                for b in 0..d {
                    let samples: Vec<C64> = self.values.iter().map(|v| v.get(l)[(a, b)]).collect();
                    let fhat = forward(&samples, &self.grid, gband)?;
                    let dhat = fhat.map(|ll, c| &reps[ll.twice() as usize] * c);
                    let dvals = inverse_on_grid(&dhat, &self.grid);
                    for (v, x) in values.iter_mut().zip(dvals) {
                        v.coeffs.get_mut(l)[(a, b)] = x;
                    }
                }
            }
        }
        Ok(FullSymbol { grid: self.grid.clone(), values })
    }
}

/// `Σ_l (2l+1) Tr(t^l(x_k) σ(x_k, l) f̂(l))` at the grid nodes `points`.
pub fn quantize_apply_full(sym: &FullSymbol, fhat: &FourierCoefficients, points: &[EulerAngles]) -> Result<Vec<C64>> {
    if fhat.band() != sym.band() {
        return Err(Error::BandMismatch(format!(
            "symbol band {} vs function band {}",
            sym.band(),
            fhat.band()
        )));
    }
    if points.len() != sym.grid.len()
        || points.iter().zip(sym.grid.nodes()).any(|(p, n)| {
            (p.alpha - n.alpha).abs() > 1e-12 || (p.beta - n.beta).abs() > 1e-12 || (p.gamma - n.gamma).abs() > 1e-12
        })
    {
        return Err(Error::Precondition("full symbols are evaluated at their grid nodes only".into()));
    }
    let band = sym.band();
    Ok(points
        .iter()
        .zip(&sym.values)
        .map(|(x, s)| {
            wigner_matrices_up_to(band, x)
                .iter()
                .zip(fhat.iter())
                .map(|(d, (l, f))| (d * s.get(l) * f).trace() * l.dim() as f64)
                .sum()
        })
        .collect())
}

/// Entry `(i, j)` of the spin-1/2 representation (0-based, ascending weights).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Entry {
    pub i: usize,
    pub j: usize,
}

impl Entry {
    /// The fixed application order of multi-index components: 11, 12, 21, 22.
    pub const ORDER: [Entry; 4] = [
        Entry { i: 0, j: 0 },
        Entry { i: 0, j: 1 },
        Entry { i: 1, j: 0 },
        Entry { i: 1, j: 1 },
    ];

    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i > 1 || j > 1 {
            return Err(Error::InvalidParameter(format!("entry ({i}, {j}) outside the 2x2 representation")));
        }
        Ok(Entry { i, j })
    }
}

/// `q_ij(x) = t^{1/2}(x)_ij - δ_ij`.
fn q_values(grid: &QuadratureGrid, e: Entry) -> Vec<C64> {
    let shift = if e.i == e.j { 1.0 } else { 0.0 };
    grid.sample(|x| {
        let s = crate::grid::Su2::from_euler(x).matrix();
        s[(e.i, e.j)] - shift
    })
}

/// `𝔻_ij σ`, truncated to band `L - 1/2`.
pub fn difference_op(sigma: &MultiplierSymbol, e: Entry) -> Result<MultiplierSymbol> {
    let band = sigma.band();
    let Some(out_band) = band.checked_sub_half() else {
        return Err(Error::BandTooSmall(format!("difference of a band-{band} symbol")));
    };
    let grid = build_grid(band.add_half())?;
    let kernel = inverse_on_grid(&sigma.coeffs.extend(grid.band_limit()), &grid);
    let q = q_values(&grid, e);
    let product: Vec<C64> = kernel.iter().zip(&q).map(|(k, q)| k * q).collect();
    let coeffs = forward(&product, &grid, out_band)?;
    Ok(MultiplierSymbol { coeffs })
}

/// Multi-index `α` over the entries `11, 12, 21, 22`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct DiffIndex(pub [u32; 4]);

impl DiffIndex {
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn single(e: Entry) -> Self {
        let mut a = [0; 4];
        a[2 * e.i + e.j] = 1;
        DiffIndex(a)
    }
}

/// `𝔻^α σ`: applies `𝔻_11^{α_11}`, then `𝔻_12^{α_12}`, `𝔻_21^{α_21}`, `𝔻_22^{α_22}`.
pub fn difference_multi(sigma: &MultiplierSymbol, alpha: DiffIndex) -> Result<MultiplierSymbol> {
    if sigma.band().twice() < alpha.order() {
        return Err(Error::BandTooSmall(format!(
            "order-{} difference of a band-{} symbol",
            alpha.order(),
            sigma.band()
        )));
    }
    let mut out = sigma.clone();
    for (e, &n) in Entry::ORDER.iter().zip(&alpha.0) {
        for _ in 0..n {
            out = difference_op(&out, *e)?;
        }
    }
    Ok(out)
}

/// `max_l ‖𝔻(στ) - (𝔻σ)τ - σ(𝔻τ) - Σ_k (𝔻_kj σ)(𝔻_ik τ)‖_op` over `l ≤ L - 1/2`.
pub fn leibniz_residual(sigma: &MultiplierSymbol, tau: &MultiplierSymbol, e: Entry) -> Result<f64> {
    sigma.check_band(tau)?;
    let band = sigma.band();
    let low = band
        .checked_sub_half()
        .ok_or_else(|| Error::BandTooSmall("Leibniz residual needs band ≥ 1/2".into()))?;
    let lhs = difference_op(&sigma.product(tau)?, e)?;
    let ds = difference_op(sigma, e)?;
    let dt = difference_op(tau, e)?;
    let (s, t) = (sigma.truncate(low)?, tau.truncate(low)?);
    let mut rhs = ds.product(&t)?.add(&s.product(&dt)?)?;
    for k in 0..2 {
        let a = difference_op(sigma, Entry { i: k, j: e.j })?;
        let b = difference_op(tau, Entry { i: e.i, j: k })?;
        rhs = rhs.add(&a.product(&b)?)?;
    }
    Ok(lhs.max_op_diff(&rhs))
}

/// Which weight `M̂(l)` a seminorm is measured in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightSource {
    /// `⟨l⟩ = (1 + λ_l)^{1/2}`.
    Elliptic,
    /// `(1 + ν_ii(l)²)^{1/2}` for the sub-Laplacian of the given 0-based system.
    Subelliptic(Vec<usize>),
}

impl WeightSource {
    /// `M̂(l)^s` in the weight basis.
    pub fn power(&self, l: HalfInt, s: f64) -> Result<CMatrix> {
        match self {
            WeightSource::Elliptic => {
                let v = (1.0 + l.casimir()).powf(s / 2.0);
                Ok(CMatrix::identity(l.dim(), l.dim()) * C64::new(v, 0.0))
            }
            WeightSource::Subelliptic(system) => Ok(sublaplacian_symbol(l, system)?.weight_matrix(s)),
        }
    }
}

/// Placement of the weight in a seminorm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `‖M̂^e 𝔻^α σ‖`.
    Left,
    /// `‖(𝔻^α σ) M̂^e‖`.
    Right,
}

/// Parameters of a symbol seminorm.
#[derive(Debug, Clone, PartialEq)]
pub struct SeminormSpec {
    pub alpha: DiffIndex,
    /// Order of `x`-derivatives (only used for full symbols; `≤ 1`).
    pub beta_order: u32,
    pub m: f64,
    pub rho: f64,
    pub delta: f64,
    pub weight: WeightSource,
    pub side: Side,
    /// Factor applied to the weight exponent (1, or `1/κ` for the
    /// equivalent-condition normalization).
    pub kappa_scaling: f64,
}

impl SeminormSpec {
    pub fn new(m: f64, weight: WeightSource) -> Self {
        SeminormSpec {
            alpha: DiffIndex::default(),
            beta_order: 0,
            m,
            rho: 1.0,
            delta: 0.0,
            weight,
            side: Side::Left,
            kappa_scaling: 1.0,
        }
    }

    /// `κ_s (ρ|α| - δ|β| - m)`.
    pub fn exponent(&self) -> f64 {
        self.kappa_scaling * (self.rho * self.alpha.order() as f64 - self.delta * self.beta_order as f64 - self.m)
    }
}

fn weighted_sup(sym: &MultiplierSymbol, spec: &SeminormSpec) -> Result<f64> {
    let e = spec.exponent();
    let mut sup: f64 = 0.0;
    for (l, s) in sym.iter() {
        let w = spec.weight.power(l, e)?;
        let m = match spec.side {
            Side::Left => &w * s,
            Side::Right => s * &w,
        };
        sup = sup.max(op_norm(&m));
    }
    Ok(sup)
}

/// `sup_l ‖M̂(l)^{κ_s(ρ|α| - m)} 𝔻^α σ(l)‖_op` (or with the weight on the right).
pub fn seminorm(sigma: &MultiplierSymbol, spec: &SeminormSpec) -> Result<f64> {
    if spec.beta_order != 0 {
        return Err(Error::InvalidParameter("multipliers have no x-derivatives; use beta_order = 0".into()));
    }
    weighted_sup(&difference_multi(sigma, spec.alpha)?, spec)
}

/// Seminorm of a full symbol: sup over grid nodes and `l` of the weighted
/// `X_j`-derivative (`beta = Some(j)`, `|β| = 1`) or of the symbol itself.
pub fn seminorm_full(sym: &FullSymbol, beta: Option<usize>, spec: &SeminormSpec) -> Result<f64> {
    let mut spec = spec.clone();
    spec.beta_order = u32::from(beta.is_some());
    let target = match beta {
        Some(j) => sym.derivative(j)?,
        None => sym.clone(),
    };
    let mut sup: f64 = 0.0;
    for v in &target.values {
        sup = sup.max(weighted_sup(&difference_multi(v, spec.alpha)?, &spec)?);
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::convolve;
    use crate::grid::Su2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symbol(band: HalfInt, rng: &mut ChaCha8Rng) -> MultiplierSymbol {
        MultiplierSymbol::from_fn(band, |l| {
            CMatrix::from_fn(l.dim(), l.dim(), |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        })
        .unwrap()
    }

    #[test]
    fn identity_symbol_reproduces_function() {
        let band = HalfInt::from_int(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_symbol(band, &mut rng);
        let g = build_grid(band).unwrap();
        let pts: Vec<EulerAngles> = g.nodes().collect();
        let a = quantize_apply(&MultiplierSymbol::identity(band), f.as_coefficients(), &pts).unwrap();
        let b = inverse(f.as_coefficients(), &pts);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-10));
    }

    #[test]
    fn convolution_symbol_matches_fourier_convolve() {
        let band = HalfInt::from_twice(3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_symbol(band, &mut rng).as_coefficients().clone();
        let g = random_symbol(band, &mut rng).as_coefficients().clone();
        let grid = build_grid(band).unwrap();
        let pts: Vec<EulerAngles> = grid.nodes().collect();
        let sigma = MultiplierSymbol::from_coefficients(g.clone());
        let a = quantize_apply(&sigma, &f, &pts).unwrap();
        let b = inverse(&convolve(&f, &g).unwrap(), &pts);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-9));
    }

    #[test]
    fn kernel_examples() {
        let band = HalfInt::from_twice(3);
        let mut one = FourierCoefficients::zeros(band);
        one.get_mut(HalfInt::ZERO)[(0, 0)] = C64::new(1.0, 0.0);
        let k = kernel_from_symbol(&MultiplierSymbol::from_coefficients(one), &[EulerAngles::new(1.0, 2.0, 3.0).unwrap()]);
        assert!((k[0] - 1.0).norm() < 1e-14);
        let id = kernel_from_symbol(&MultiplierSymbol::identity(band), &[EulerAngles::identity()]);
        let expect: f64 = band.up_to().map(|l| (l.dim() * l.dim()) as f64).sum();
        assert!((id[0].re - expect).abs() < 1e-10);
    }

    #[test]
    fn difference_matches_definition() {
        let band = HalfInt::ONE;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sigma = random_symbol(band, &mut rng);
        let grid = build_grid(HalfInt::from_int(2)).unwrap();
        let kernel = inverse_on_grid(sigma.as_coefficients(), &grid);
        for e in Entry::ORDER {
            let q: Vec<C64> = grid.sample(|x| {
                let t = Su2::from_euler(x).matrix()[(e.i, e.j)];
                if e.i == e.j { t - 1.0 } else { t }
            });
            let prod: Vec<C64> = kernel.iter().zip(&q).map(|(a, b)| a * b).collect();
            let oracle = forward(&prod, &grid, HalfInt::HALF).unwrap();
            let d = difference_op(&sigma, e).unwrap();
            assert!(d.as_coefficients().max_abs_diff(&oracle) < 1e-10);
        }
        assert!(matches!(
            difference_op(&MultiplierSymbol::identity(HalfInt::ZERO), Entry::ORDER[0]),
            Err(Error::BandTooSmall(_))
        ));
    }

    #[test]
    fn differences_commute_and_compose() {
        let band = HalfInt::from_twice(4);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sigma = random_symbol(band, &mut rng);
        assert_eq!(difference_multi(&sigma, DiffIndex::default()).unwrap(), sigma);
        let both = difference_multi(&sigma, DiffIndex([1, 1, 0, 0])).unwrap();
        let seq = difference_op(&difference_op(&sigma, Entry::ORDER[0]).unwrap(), Entry::ORDER[1]).unwrap();
        assert!(both.max_op_diff(&seq) < 1e-12);
        let rev = difference_op(&difference_op(&sigma, Entry::ORDER[1]).unwrap(), Entry::ORDER[0]).unwrap();
        assert!(seq.max_op_diff(&rev) < 1e-10);
        assert!(difference_multi(&MultiplierSymbol::identity(HalfInt::HALF), DiffIndex([2, 0, 0, 0])).is_err());
    }

    #[test]
    fn difference_is_linear() {
        let band = HalfInt::from_twice(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (a, b) = (random_symbol(band, &mut rng), random_symbol(band, &mut rng));
        let c = C64::new(0.3, -1.2);
        let e = Entry::ORDER[2];
        let lhs = difference_op(&a.scale(c).add(&b).unwrap(), e).unwrap();
        let rhs = difference_op(&a, e).unwrap().scale(c).add(&difference_op(&b, e).unwrap()).unwrap();
        assert!(lhs.max_op_diff(&rhs) < 1e-10);
    }

    #[test]
    fn leibniz_exact_on_random_pairs() {
        let band = HalfInt::from_twice(4);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..3 {
            let (s, t) = (random_symbol(band, &mut rng), random_symbol(band, &mut rng));
            for e in Entry::ORDER {
                assert!(leibniz_residual(&s, &t, e).unwrap() < 1e-9);
            }
        }
        let id = MultiplierSymbol::identity(band);
        assert!(leibniz_residual(&id, &id, Entry::ORDER[1]).unwrap() < 1e-9);
    }

    #[test]
    fn seminorm_examples() {
        let band = HalfInt::from_int(3);
        let id = MultiplierSymbol::identity(band);
        let spec = SeminormSpec::new(0.0, WeightSource::Elliptic);
        assert!((seminorm(&id, &spec).unwrap() - 1.0).abs() < 1e-12);

        let system = vec![0, 1];
        let m0 = -1.5;
        let bessel = MultiplierSymbol::from_fn(band, |l| {
            sublaplacian_symbol(l, &system).unwrap().apply_function(|v| (1.0 + v).powf(m0 / 2.0))
        })
        .unwrap();
        let spec = SeminormSpec::new(m0, WeightSource::Subelliptic(system));
        assert!((seminorm(&bessel, &spec).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn left_and_right_agree_without_differences() {
        let band = HalfInt::from_twice(5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = random_symbol(band, &mut rng);
        let mut spec = SeminormSpec::new(-0.7, WeightSource::Subelliptic(vec![1, 2]));
        let left = seminorm(&s, &spec).unwrap();
        spec.side = Side::Right;
        let right = seminorm(&s, &spec).unwrap();
        assert!(left > 0.0 && right > 0.0);
        // Only diagonal-in-weight-basis symbols are guaranteed to agree.
        let diag = MultiplierSymbol::scalar(band, |l| 1.0 / (1.0 + l.value()));
        let mut spec = SeminormSpec::new(-0.7, WeightSource::Elliptic);
        let left = seminorm(&diag, &spec).unwrap();
        spec.side = Side::Right;
        assert!((left - seminorm(&diag, &spec).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn full_symbol_quantization_and_derivative() {
        let band = HalfInt::HALF;
        let grid = build_grid(HalfInt::ONE).unwrap();
        // σ(x, l) = (1 + Re t^{1/2}(x)_00) I : x-band 1/2
        let full = FullSymbol::from_fn(grid.clone(), |x| {
            let c = Su2::from_euler(x).matrix()[(0, 0)].re;
            MultiplierSymbol::scalar(band, move |_| 1.0 + c)
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = random_symbol(band, &mut rng).as_coefficients().clone();
        let pts: Vec<EulerAngles> = grid.nodes().collect();
        let a = quantize_apply_full(&full, &f, &pts).unwrap();
        let plain = inverse(&f, &pts);
        for (k, x) in pts.iter().enumerate() {
            let c = 1.0 + Su2::from_euler(x).matrix()[(0, 0)].re;
            assert!((a[k] - plain[k] * c).norm() < 1e-10);
        }
        assert!(quantize_apply_full(&full, &f, &pts[1..]).is_err());

        // X_2 derivative of Re a(x) against finite differences along exp(sX_2)
        let d = full.derivative(1).unwrap();
        let h = 1e-6;
        for k in [0, 7, 40] {
            let x = Su2::from_euler(&grid.node(k));
            let val = |s: f64| x.mul(&Su2::exp_algebra(&[0.0, s, 0.0])).matrix()[(0, 0)].re;
            let fd = (val(h) - val(-h)) / (2.0 * h);
            assert!((d.at_node(k).get(HalfInt::ZERO)[(0, 0)] - fd).norm() < 1e-8);
        }
        let spec = SeminormSpec::new(0.0, WeightSource::Elliptic);
        let s0 = seminorm_full(&full, None, &spec).unwrap();
        assert!(s0 <= 2.0 + 1e-12 && s0 > 1.5);
        assert!(seminorm_full(&full, Some(1), &spec).unwrap() > 0.0);
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = random_symbol(HalfInt::from_twice(3), &mut rng);
        assert_eq!(MultiplierSymbol::from_json(&s.to_json()).unwrap(), s);
        assert!(MultiplierSymbol::from_json(r#"{"blocks":[{"two_l":1,"re":[],"im":[]}]}"#).is_err());
    }
}
