//! `L^p` norms, `L^p → L^q` operator-norm lower bounds, and the heat-decay
//! and Bessel-sharpness experiments.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde_json::json;

use crate::axial::{AxialKernel, AxialQuadrature};
use crate::error::{Error, Result};
use crate::fourier::{forward, inverse_on_grid, FourierCoefficients};
use crate::grid::QuadratureGrid;
use crate::liealg::{flag, LieAlgebra};
use crate::report::ExperimentReport;
use crate::speccalc::{heat_symbol, heat_trace_adaptive, heat_trace_identity, OperatorChoice};
use crate::symcalc::{apply_multiplier, MultiplierSymbol};
use crate::{CMatrix, HalfInt, C64};

/// Slopes below `-SLOPE_THRESHOLD` are classified as unbounded-like.
pub const SLOPE_THRESHOLD: f64 = 0.1;

/// `(Σ_k w_k |f_k|^p)^{1/p}`, or `max_k |f_k|` for `p = ∞`.
pub fn lp_norm(samples: &[C64], grid: &QuadratureGrid, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} < 1")));
    }
    if samples.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), found: samples.len() });
    }
    if p.is_infinite() {
        return Ok(samples.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let per_slice = grid.alphas().len() * grid.gammas().len();
    let sum: f64 = samples
        .chunks(per_slice)
        .enumerate()
        .map(|(ib, chunk)| grid.slice_weight(ib) * chunk.iter().map(|z| z.norm().powf(p)).sum::<f64>())
        .sum();
    Ok(sum.powf(1.0 / p))
}

/// `m* = -Q(1/p - 1/q + (1-ρ) max{1/2 - 1/p, 1/q - 1/2, 0})`.
pub fn critical_order(p: f64, q: f64, rho: f64, hausdorff_q: f64) -> Result<f64> {
    check_order_args(p > 1.0 && q.is_finite(), p <= q, (0.0..=1.0).contains(&rho), hausdorff_q >= 1.0, p, q)?;
    let (ip, iq) = (1.0 / p, 1.0 / q);
    let gap = (0.5 - ip).max(iq - 0.5).max(0.0);
    Ok(-hausdorff_q * (ip - iq + (1.0 - rho) * gap))
}

/// [`critical_order`] in exact rational arithmetic.
pub fn critical_order_exact(p: &BigRational, q: &BigRational, rho: &BigRational, hausdorff_q: &BigRational) -> Result<BigRational> {
    let one = BigRational::one();
    let check = check_order_args(
        p > &one,
        p <= q,
        !rho.is_negative() && rho <= &one,
        hausdorff_q >= &one,
        0.0,
        0.0,
    );
    if check.is_err() {
        return Err(Error::InvalidParameter(format!(
            "need 1 < p ≤ q < ∞, 0 ≤ ρ ≤ 1, Q ≥ 1 (got p = {p}, q = {q}, ρ = {rho}, Q = {hausdorff_q})"
        )));
    }
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let (ip, iq) = (p.recip(), q.recip());
    let mut gap = BigRational::zero();
    for c in [&half - &ip, &iq - &half] {
        if c > gap {
            gap = c;
        }
    }
    Ok(-(hausdorff_q * (&ip - &iq + (&one - rho) * gap)))
}

fn check_order_args(range: bool, ordered: bool, rho_ok: bool, q_ok: bool, p: f64, q: f64) -> Result<()> {
    if !ordered {
        return Err(Error::InvalidParameter(format!(
            "p > q: nontrivial L^p → L^q bounds for invariant operators need p ≤ q (p = {p}, q = {q})"
        )));
    }
    if !(range && rho_ok && q_ok) {
        return Err(Error::InvalidParameter("need 1 < p ≤ q < ∞, 0 ≤ ρ ≤ 1 and Q ≥ 1".into()));
    }
    Ok(())
}

/// Ordinary least-squares fit `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; `None` with fewer than three points.
    pub stderr: Option<f64>,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(Error::InvalidParameter("a line fit needs at least two (x, y) pairs".into()));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = (n > 2).then(|| {
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        (rss / (n - 2) as f64 / sxx).sqrt()
    });
    Ok(LineFit { slope, intercept, stderr })
}

/// `n` logarithmically spaced points from `lo` to `hi`.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(Error::InvalidParameter(format!("need 0 < lo < hi and n ≥ 2 (lo = {lo}, hi = {hi}, n = {n})")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

/// Hausdorff dimension of the control distance of `op`.
pub fn hausdorff_of(op: &OperatorChoice) -> Result<usize> {
    Ok(flag(&LieAlgebra::su2(), &op.system())?.hausdorff_q)
}

/// How the band of a heat-trace sum is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmaxPolicy {
    pub start: HalfInt,
    /// Doubling stops here; ignored when `adaptive` is false.
    pub cap: HalfInt,
    pub adaptive: bool,
}

impl LmaxPolicy {
    pub fn fixed(band: HalfInt) -> Self {
        LmaxPolicy { start: band, cap: band, adaptive: false }
    }

    pub fn adaptive(start: HalfInt, cap: HalfInt) -> Self {
        LmaxPolicy { start, cap, adaptive: true }
    }
}

fn policy_json(p: &LmaxPolicy) -> serde_json::Value {
    json!({"start": p.start.value(), "cap": p.cap.value(), "adaptive": p.adaptive})
}

/// Fits `log h_t(e)` against `log t` on a log-spaced grid of `t`.
///
/// The verdict compares the slope with `-Q/2`, `Q` the Hausdorff dimension
/// of `op`.
pub fn heat_decay_slope(op: &OperatorChoice, t_lo: f64, t_hi: f64, n: usize, policy: LmaxPolicy) -> Result<ExperimentReport> {
    if n < 5 {
        return Err(Error::InvalidParameter("heat decay needs at least 5 points".into()));
    }
    let ts = log_space(t_lo, t_hi, n)?;
    let values: Vec<(f64, HalfInt)> = ts
        .par_iter()
        .map(|&t| {
            if policy.adaptive {
                heat_trace_adaptive(t, op, policy.start, policy.cap)
            } else {
                heat_trace_identity(t, op, policy.start).map(|v| (v, policy.start))
            }
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.0.ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    let mut report = ExperimentReport::new("heat-decay")
        .param("op", op.to_string())
        .param("tmin", t_lo)
        .param("tmax", t_hi)
        .param("points", n)
        .param("lmax", policy_json(&policy))
        .param("lmax_used", values.iter().map(|v| v.1.value()).collect::<Vec<_>>());
    if let Ok(q) = hausdorff_of(op) {
        let expected = -(q as f64) / 2.0;
        report = report.param("hausdorff_q", q).param("expected_slope", expected);
        report.verdict = Some(
            if (fit.slope - expected).abs() <= SLOPE_THRESHOLD { "consistent" } else { "inconsistent" }.into(),
        );
    }
    report.rows = ts.iter().zip(&values).map(|(&t, v)| (t, v.0)).collect();
    report.slope = Some(fit.slope);
    report.stderr = fit.stderr;
    Ok(report)
}

fn in_iff_regime(p: f64, q: f64) -> bool {
    1.0 < p && p <= 2.0 && 2.0 <= q && q.is_finite()
}

/// `R(t) = ‖B_a h_t‖_q / ‖h_t‖_p` on a log-spaced grid of `t`, with a slope fit
/// of `log R` against `log t`. `cap` bounds the band of the kernel sums.
pub fn bessel_sharpness(
    p: f64,
    q: f64,
    a: f64,
    op: &OperatorChoice,
    t_lo: f64,
    t_hi: f64,
    n: usize,
    cap: HalfInt,
) -> Result<ExperimentReport> {
    if !(p >= 1.0 && q >= p) {
        return Err(Error::InvalidParameter(format!("need 1 ≤ p ≤ q (p = {p}, q = {q})")));
    }
    let ts = log_space(t_lo, t_hi, n)?;
    let ratios: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let quad = AxialQuadrature::for_heat(op, t);
            let heat = AxialKernel::new(op, move |v| (-t * v).exp(), cap)?;
            let np = heat.lp_norms(&[p], &quad)?[0];
            let bessel = AxialKernel::new(op, move |v| (1.0 + v).powf(-a / 2.0) * (-t * v).exp(), cap)?;
            let nq = bessel.lp_norms(&[q], &quad)?[0];
            Ok(nq / np)
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    let mut report = ExperimentReport::new("bessel-sharpness")
        .param("p", p)
        .param("q", q)
        .param("a", a)
        .param("op", op.to_string())
        .param("tmin", t_lo)
        .param("tmax", t_hi)
        .param("points", n)
        .param("lmax_cap", cap.value())
        .param("slope_threshold", SLOPE_THRESHOLD);
    if let Ok(hq) = hausdorff_of(op) {
        report = report.param("critical_a", hq as f64 * (1.0 / p - 1.0 / q));
    }
    report.verdict = Some(if !in_iff_regime(p, q) {
        "no-verdict".into()
    } else if fit.slope < -SLOPE_THRESHOLD {
        "unbounded-like".into()
    } else {
        "bounded-like".into()
    });
    report.rows = ts.into_iter().zip(ratios).collect();
    report.slope = Some(fit.slope);
    report.stderr = fit.stderr;
    Ok(report)
}

/// Settings shared by the runs of a threshold experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessWindow {
    pub t_lo: f64,
    pub t_hi: f64,
    pub points: usize,
    pub cap: HalfInt,
}

impl Default for SharpnessWindow {
    fn default() -> Self {
        SharpnessWindow { t_lo: 0.02, t_hi: 0.2, points: 5, cap: HalfInt::from_int(crate::axial::DEFAULT_CAP) }
    }
}

/// Runs [`bessel_sharpness`] at `a = -m` for `m = m* + offset` and
/// `m = m* - offset`, and reports whether the verdicts flip across `m*`.
pub fn threshold_experiment(
    p: f64,
    q: f64,
    rho: f64,
    op: &OperatorChoice,
    offset: f64,
    window: SharpnessWindow,
) -> Result<ExperimentReport> {
    let hq = hausdorff_of(op)?;
    let m_star = critical_order(p, q, rho, hq as f64)?;
    let mut runs = Vec::new();
    for m in [m_star + offset, m_star - offset] {
        let mut r = bessel_sharpness(p, q, -m, op, window.t_lo, window.t_hi, window.points, window.cap)?;
        r.parameters.insert("m".into(), json!(m));
        runs.push(r);
    }
    let mut report = ExperimentReport::new("threshold")
        .param("p", p)
        .param("q", q)
        .param("rho", rho)
        .param("op", op.to_string())
        .param("hausdorff_q", hq)
        .param("critical_m", m_star)
        .param("offset", offset);
    let above = runs[0].verdict.as_deref();
    let below = runs[1].verdict.as_deref();
    report.verdict = Some(
        match (above, below) {
            (Some("unbounded-like"), Some("bounded-like")) => "flip",
            (Some("no-verdict"), _) | (_, Some("no-verdict")) => "no-verdict",
            _ => "no-flip",
        }
        .into(),
    );
    report.runs = runs;
    Ok(report)
}

/// Best ratio `‖Af‖_q / ‖f‖_p` found and the test function that achieved it.
#[derive(Debug, Clone, PartialEq)]
pub struct OpnormBound {
    pub value: f64,
    pub source: String,
}

fn apply_on_grid(sigma: &MultiplierSymbol, f: &FourierCoefficients, grid: &QuadratureGrid) -> Result<Vec<C64>> {
    Ok(inverse_on_grid(&apply_multiplier(sigma, f)?, grid))
}

fn adjoint(sigma: &MultiplierSymbol) -> MultiplierSymbol {
    sigma.map(|_, m| m.adjoint())
}

/// `|z|^{r-1} z/|z|`, the exponent-duality map.
fn duality(values: &[C64], r: f64) -> Vec<C64> {
    values
        .iter()
        .map(|z| {
            let n = z.norm();
            if n == 0.0 {
                C64::new(0.0, 0.0)
            } else if r.is_infinite() {
                z / n
            } else {
                z / n * n.powf(r - 1.0)
            }
        })
        .collect()
}

fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Lower bound for `‖A_σ‖_{L^p → L^q}` over band-limited functions, measured
/// with the grid quadrature.
///
/// Combines a dual-exponent power iteration from a seeded random start
/// (skipped when `p = 1` or `q = ∞`) with a test family of heat kernels of
/// the Laplacian and of `{X_1, X_2}`, characters, and the constant function.
pub fn opnorm_lower_bound(
    sigma: &MultiplierSymbol,
    p: f64,
    q: f64,
    grid: &QuadratureGrid,
    max_iters: usize,
    seed: u64,
) -> Result<OpnormBound> {
    if !(p >= 1.0 && q >= 1.0) {
        return Err(Error::InvalidParameter(format!("exponents must be ≥ 1 (p = {p}, q = {q})")));
    }
    let band = sigma.band();
    if band > grid.band_limit() {
        return Err(Error::BandMismatch(format!("symbol band {band} exceeds grid band {}", grid.band_limit())));
    }
    let ratio = |f: &FourierCoefficients| -> Result<f64> {
        let fv = inverse_on_grid(f, grid);
        let denom = lp_norm(&fv, grid, p)?;
        if denom == 0.0 {
            return Ok(0.0);
        }
        Ok(lp_norm(&apply_on_grid(sigma, f, grid)?, grid, q)? / denom)
    };
    let mut best = OpnormBound { value: 0.0, source: "none".into() };
    let mut consider = |value: f64, source: String| {
        if value > best.value {
            best = OpnormBound { value, source };
        }
    };

    let mut family: Vec<(String, FourierCoefficients)> = vec![(
        "constant".into(),
        FourierCoefficients::scalar(band, |l| C64::new(if l == HalfInt::ZERO { 1.0 } else { 0.0 }, 0.0)),
    )];
    for l in band.up_to() {
        // character χ_l has coefficients I / (2l+1) at l
        let mut c = FourierCoefficients::zeros(band);
        *c.get_mut(l) = CMatrix::identity(l.dim(), l.dim()) / C64::new(l.dim() as f64, 0.0);
        family.push((format!("character l={l}"), c));
    }
    let smallest = 1.0 / (band.value() + 1.0).powi(2);
    for op in [OperatorChoice::Laplacian, OperatorChoice::Sublaplacian(vec![0, 1])] {
        for s in log_space(smallest, 1.0, 12)? {
            let h = heat_symbol(s, &op, band)?;
            family.push((format!("heat {op} s={s:.4e}"), h.as_coefficients().clone()));
        }
    }
    for (name, f) in &family {
        consider(ratio(f)?, name.clone());
    }

    if p > 1.0 && q.is_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = FourierCoefficients::from_entries(
            band.up_to()
                .map(|l| {
                    CMatrix::from_fn(l.dim(), l.dim(), |_, _| {
                        C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
                    })
                })
                .collect(),
        )?;
        let sigma_adj = adjoint(sigma);
        let pd = conjugate_exponent(p);
        for _ in 0..max_iters {
            consider(ratio(&f)?, format!("power iteration (seed {seed})"));
            let g = apply_on_grid(sigma, &f, grid)?;
            let dual = duality(&g, q);
            let h = apply_on_grid(&sigma_adj, &forward(&dual, grid, band)?, grid)?;
            let next = forward(&duality(&h, pd), grid, band)?;
            if next.max_abs_diff(&FourierCoefficients::zeros(band)) == 0.0 {
                break;
            }
            let scale = crate::fourier::plancherel_norm(&next);
            f = next.map(|_, m| m / C64::new(scale, 0.0));
        }
        consider(ratio(&f)?, format!("power iteration (seed {seed})"));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::speccalc::bessel_symbol;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn lp_norm_examples() {
        let g = build_grid(HalfInt::from_int(2)).unwrap();
        let two = vec![C64::new(2.0, 0.0); g.len()];
        assert!((lp_norm(&two, &g, 3.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(lp_norm(&two, &g, 0.5).is_err());
        let f: Vec<C64> = g.sample(|x| C64::new(x.beta.cos() + 0.3 * x.alpha.sin(), x.gamma.cos()));
        let ps = [1.0, 1.5, 2.0, 4.0, f64::INFINITY];
        let norms: Vec<f64> = ps.iter().map(|&p| lp_norm(&f, &g, p).unwrap()).collect();
        assert!(norms.windows(2).all(|w| w[0] <= w[1] + 1e-12));
        let scaled: Vec<C64> = f.iter().map(|z| z * C64::new(0.0, -3.0)).collect();
        assert!((lp_norm(&scaled, &g, 1.5).unwrap() - 3.0 * norms[1]).abs() < 1e-12 * norms[1]);
    }

    #[test]
    fn critical_order_examples() {
        assert_eq!(critical_order(2.0, 2.0, 1.0, 4.0).unwrap(), 0.0);
        assert!((critical_order(4.0 / 3.0, 4.0, 0.3, 4.0).unwrap() + 2.0).abs() < 1e-15);
        assert!((critical_order(4.0, 4.0, 0.0, 4.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(critical_order(3.0, 2.0, 1.0, 4.0).is_err());
        assert_eq!(critical_order_exact(&rat(4, 3), &rat(4, 1), &rat(1, 2), &rat(4, 1)).unwrap(), rat(-2, 1));
        assert_eq!(critical_order_exact(&rat(4, 1), &rat(4, 1), &rat(0, 1), &rat(4, 1)).unwrap(), rat(-1, 1));
        assert!(critical_order_exact(&rat(3, 1), &rat(2, 1), &rat(1, 1), &rat(4, 1)).is_err());
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14 && (f.intercept - 2.0).abs() < 1e-14);
        assert!(f.stderr.unwrap() < 1e-14);
        assert!(fit_line(&xs[..2], &ys[..2]).unwrap().stderr.is_none());
    }

    #[test]
    fn log_space_endpoints() {
        let t = log_space(1e-3, 1e-2, 9).unwrap();
        assert_eq!((t[0], t[8]), (1e-3, 1e-2));
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn heat_decay_saturates_for_large_t() {
        let op = OperatorChoice::sublaplacian(&[0, 1]).unwrap();
        let r = heat_decay_slope(&op, 10.0, 100.0, 5, LmaxPolicy::fixed(HalfInt::from_int(10))).unwrap();
        assert!(r.slope.unwrap().abs() < 0.02);
        assert!(r.validate().is_ok());
    }

    #[test]
    fn identity_symbol_has_unit_l2_bound() {
        let band = HalfInt::from_int(2);
        let g = build_grid(HalfInt::from_int(3)).unwrap();
        let b = opnorm_lower_bound(&MultiplierSymbol::identity(band), 2.0, 2.0, &g, 5, 1).unwrap();
        assert!(b.value >= 1.0 - 1e-9 && b.value <= 1.0 + 1e-9);
    }

    #[test]
    fn l2_lower_bound_never_exceeds_exact_norm() {
        let band = HalfInt::from_twice(5);
        let g = build_grid(HalfInt::from_int(3)).unwrap();
        let op = OperatorChoice::sublaplacian(&[1, 2]).unwrap();
        let sigma = bessel_symbol(-1.0, &op, band).unwrap();
        let b = opnorm_lower_bound(&sigma, 2.0, 2.0, &g, 30, 3).unwrap();
        let exact = sigma.sup_op_norm();
        assert!(b.value <= exact + 1e-9);
        assert!(b.value >= 0.9 * exact, "power iteration reached {} of {exact}", b.value);
    }

    #[test]
    fn sharpness_contraction_at_p_equals_q_two() {
        let op = OperatorChoice::sublaplacian(&[0, 1]).unwrap();
        let r = bessel_sharpness(2.0, 2.0, 1.0, &op, 0.05, 0.2, 3, HalfInt::from_int(5000)).unwrap();
        assert!(r.rows.iter().all(|&(_, v)| v <= 1.0 + 1e-9));
    }
}
