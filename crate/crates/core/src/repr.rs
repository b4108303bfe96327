//! Irreducible representations of SU(2).
//!
//! Weight-basis convention, fixed for the whole crate: the representation
//! space of `t^l` has basis `|l, m>` with `m = -l, ..., l` in ascending order,
//! so matrix index `i` carries weight `m = i - l`. Angular momentum operators
//! act in the usual way (`J_z |m> = m |m>`, `J_± |m> = sqrt(l(l+1) - m(m±1)) |m±1>`),
//! and the group element with Euler angles `(α, β, γ)` acts as
//! `exp(-iαJ_z) exp(-iβJ_y) exp(-iγJ_z)`.
//!
//! The su(2) basis is `X_k = -i J_k`, so that `[X_1, X_2] = X_3` and, with
//! the ladder operators `∂_± = J_±` and `∂_0 = J_z`,
//! `X_1 = -(i/2)(∂_- + ∂_+)`, `X_2 = (1/2)(∂_- - ∂_+)`, `X_3 = -i ∂_0`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grid::EulerAngles;
use crate::{CMatrix, HalfInt, C64};

/// Label of an irreducible representation (`l` with `d = 2l + 1`).
pub type IrrepIndex = HalfInt;

/// Tolerance for the scalarity check of the Casimir matrix.
pub const CASIMIR_TOL: f64 = 1e-10;

/// Three-term recurrence in `l` for the Wigner small-d function
/// `d^l_{m'm}(β)` at fixed `(m', m)`, starting from `l = max(|m'|, |m|)`.
///
/// Yields `(l, d^l_{m'm}(β))` for increasing `l`.
#[derive(Debug, Clone)]
pub struct WignerRecurrence {
    mp: f64,
    m: f64,
    cos_beta: f64,
    two_l: u32,
    prev: f64,
    cur: f64,
}

impl WignerRecurrence {
    /// `two_mp` and `two_m` are `2m'` and `2m`; they must have equal parity.
    pub fn new(two_mp: i32, two_m: i32, beta: f64) -> Self {
        assert!(
            (two_mp - two_m) % 2 == 0,
            "weights must have the same parity"
        );
        let two_j = two_mp.unsigned_abs().max(two_m.unsigned_abs());
        let mp = two_mp as f64 / 2.0;
        let m = two_m as f64 / 2.0;
        WignerRecurrence {
            mp,
            m,
            cos_beta: beta.cos(),
            two_l: two_j,
            prev: 0.0,
            cur: seed(two_j, mp, m, beta),
        }
    }

    pub fn current_l(&self) -> HalfInt {
        HalfInt::from_twice(self.two_l)
    }

    pub fn current(&self) -> f64 {
        self.cur
    }

    /// Advances from `l` to `l + 1`.
    pub fn advance(&mut self) {
        let j = self.two_l as f64 / 2.0;
        let (mp, m) = (self.mp, self.m);
        let j1 = j + 1.0;
        let a = j1 * (2.0 * j + 1.0) / ((j1 * j1 - mp * mp) * (j1 * j1 - m * m)).sqrt();
        let next = if self.two_l == 0 {
            a * self.cos_beta * self.cur
        } else {
            let b = ((j * j - mp * mp) * (j * j - m * m)).max(0.0).sqrt() / (j * (2.0 * j + 1.0));
            a * ((self.cos_beta - mp * m / (j * j1)) * self.cur - b * self.prev)
        };
        self.prev = self.cur;
        self.cur = next;
        self.two_l += 2;
    }
}

impl Iterator for WignerRecurrence {
    type Item = (HalfInt, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let out = (self.current_l(), self.cur);
        self.advance();
        Some(out)
    }
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (1..=k)
        .map(|i| ((n - k + i) as f64 / i as f64).ln())
        .sum()
}

/// `sqrt(C(n, k)) · c^e1 · s^e2` evaluated in log space.
fn seed_term(n: u32, k: u32, c: f64, e1: u32, s: f64, e2: u32) -> f64 {
    let mut log = 0.5 * ln_binomial(n, k);
    for (base, e) in [(c, e1), (s, e2)] {
        if e == 0 {
            continue;
        }
        if base == 0.0 {
            return 0.0;
        }
        log += e as f64 * base.abs().ln();
    }
    let sign = if (c < 0.0 && e1 % 2 == 1) ^ (s < 0.0 && e2 % 2 == 1) {
        -1.0
    } else {
        1.0
    };
    sign * log.exp()
}

/// Closed form of `d^j_{m'm}(β)` at `j = max(|m'|, |m|)`.
fn seed(two_j: u32, mp: f64, m: f64, beta: f64) -> f64 {
    let j = two_j as f64 / 2.0;
    let c = (beta / 2.0).cos();
    let s = (beta / 2.0).sin();
    let int = |x: f64| x.round() as u32;
    let parity = |x: f64| if int(x.abs()) % 2 == 0 { 1.0 } else { -1.0 };
    if mp.abs() >= m.abs() {
        if mp > 0.0 || (mp == 0.0 && two_j == 0) {
            parity(j - m) * seed_term(two_j, int(j + m), c, int(j + m), s, int(j - m))
        } else {
            seed_term(two_j, int(j + m), c, int(j - m), s, int(j + m))
        }
    } else if m > 0.0 {
        seed_term(two_j, int(j + mp), c, int(j + mp), s, int(j - mp))
    } else {
        parity(mp + j) * seed_term(two_j, int(j + mp), c, int(j - mp), s, int(j + mp))
    }
}

/// Wigner small-d matrices `d^l(β)` for every `l ≤ lmax`, indexed by `2l`.
pub fn wigner_small_d_all(lmax: HalfInt, beta: f64) -> Vec<DMatrix<f64>> {
    let tl = lmax.twice() as i32;
    let mut out: Vec<DMatrix<f64>> = lmax.up_to().map(|l| DMatrix::zeros(l.dim(), l.dim())).collect();
    for two_mp in -tl..=tl {
        for two_m in -tl..=tl {
            if (two_mp - two_m) % 2 != 0 {
                continue;
            }
            for (l, v) in WignerRecurrence::new(two_mp, two_m, beta) {
                if l > lmax {
                    break;
                }
                let tlv = l.twice() as i32;
                let i = ((two_mp + tlv) / 2) as usize;
                let k = ((two_m + tlv) / 2) as usize;
                out[l.twice() as usize][(i, k)] = v;
            }
        }
    }
    out
}

/// Wigner small-d matrix `d^l(β)` with entries `<l m'| exp(-iβJ_y) |l m>`.
pub fn wigner_small_d(l: IrrepIndex, beta: f64) -> DMatrix<f64> {
    let tl = l.twice() as i32;
    let mut d = DMatrix::zeros(l.dim(), l.dim());
    for i in 0..l.dim() {
        for k in 0..l.dim() {
            let two_mp = 2 * i as i32 - tl;
            let two_m = 2 * k as i32 - tl;
            let mut rec = WignerRecurrence::new(two_mp, two_m, beta);
            while rec.current_l() < l {
                rec.advance();
            }
            d[(i, k)] = rec.current();
        }
    }
    d
}

/// Attaches the Euler phases to a small-d matrix.
pub fn attach_phases(l: IrrepIndex, small: &DMatrix<f64>, alpha: f64, gamma: f64) -> CMatrix {
    let weights: Vec<f64> = l.weights().collect();
    CMatrix::from_fn(l.dim(), l.dim(), |i, k| {
        let phase = -(weights[i] * alpha + weights[k] * gamma);
        C64::from_polar(small[(i, k)], phase)
    })
}

/// The representation matrix `t^l(x)` (the Wigner D-matrix).
pub fn wigner_matrix(l: IrrepIndex, x: &EulerAngles) -> CMatrix {
    attach_phases(l, &wigner_small_d(l, x.beta), x.alpha, x.gamma)
}

/// `t^l(x)` for every `l ≤ lmax`, indexed by `2l`.
pub fn wigner_matrices_up_to(lmax: HalfInt, x: &EulerAngles) -> Vec<CMatrix> {
    wigner_small_d_all(lmax, x.beta)
        .iter()
        .zip(lmax.up_to())
        .map(|(d, l)| attach_phases(l, d, x.alpha, x.gamma))
        .collect()
}

/// Angular momentum matrices `[J_x, J_y, J_z]` in the weight basis.
pub fn angular_momentum(l: IrrepIndex) -> [CMatrix; 3] {
    let n = l.dim();
    let lv = l.value();
    let weights: Vec<f64> = l.weights().collect();
    let mut jplus = CMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        let m = weights[i];
        jplus[(i + 1, i)] = C64::new((lv * (lv + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let jminus = jplus.transpose();
    let jx = (&jplus + &jminus).map(|z| z * 0.5);
    let jy = (&jplus - &jminus).map(|z| z / C64::new(0.0, 2.0));
    let jz = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        weights.iter().map(|&m| C64::new(m, 0.0)),
    ));
    [jx, jy, jz]
}

/// Derived representation `dt^l` of the su(2) basis `{X_1, X_2, X_3}`.
#[derive(Debug, Clone)]
pub struct DerivedRep {
    pub l: IrrepIndex,
    /// `dt^l(X_1)`, `dt^l(X_2)`, `dt^l(X_3)`.
    pub matrices: [CMatrix; 3],
}

impl DerivedRep {
    /// `dt^l(Σ c_k X_k)`.
    pub fn element(&self, coeffs: &[f64; 3]) -> CMatrix {
        let n = self.l.dim();
        let mut out = CMatrix::zeros(n, n);
        for (c, m) in coeffs.iter().zip(&self.matrices) {
            out += m.map(|z| z * *c);
        }
        out
    }

    /// `-Σ_{i ∈ system} dt^l(X_i)^2` (indices are 0-based).
    pub fn negative_square_sum(&self, system: &[usize]) -> CMatrix {
        let n = self.l.dim();
        let mut out = CMatrix::zeros(n, n);
        for &i in system {
            out -= &self.matrices[i] * &self.matrices[i];
        }
        out
    }
}

pub fn derived_rep(l: IrrepIndex) -> DerivedRep {
    let minus_i = C64::new(0.0, -1.0);
    let [jx, jy, jz] = angular_momentum(l);
    DerivedRep {
        l,
        matrices: [jx * minus_i, jy * minus_i, jz * minus_i],
    }
}

/// Positive-Laplacian eigenvalue `λ_l`, read off the Casimir matrix.
pub fn laplacian_symbol(l: IrrepIndex) -> Result<f64> {
    let casimir = derived_rep(l).negative_square_sum(&[0, 1, 2]);
    let n = l.dim();
    let lambda = casimir.trace().re / n as f64;
    let deviation = (0..n)
        .flat_map(|i| (0..n).map(move |k| (i, k)))
        .map(|(i, k)| {
            let target = if i == k { lambda } else { 0.0 };
            (casimir[(i, k)] - C64::new(target, 0.0)).norm()
        })
        .fold(0.0, f64::max);
    if deviation > CASIMIR_TOL {
        return Err(Error::NotScalar { deviation });
    }
    Ok(lambda)
}

/// Eigen-data of a sub-Laplacian symbol at one irrep.
///
/// `basis` is the unitary `U` with `L̂(l) = U · diag(nu_sq) · U*`. For systems
/// whose symbol is already diagonal in the weight basis (for instance
/// `{X_1, X_2}`) `U` is the identity and `nu_sq` is ordered by ascending `m`;
/// otherwise `nu_sq` is ascending.
#[derive(Debug, Clone)]
pub struct SpectralWeight {
    pub l: IrrepIndex,
    pub lambda: f64,
    pub nu_sq: Vec<f64>,
    pub basis: CMatrix,
    /// Whether `basis` is the identity.
    pub diagonal: bool,
}

impl SpectralWeight {
    /// The diagonal matrix `diag((1 + ν_ii²)^{s/2})` in the diagonalizing basis.
    pub fn diagonal_weight(&self, s: f64) -> CMatrix {
        subelliptic_weight(self, s)
    }

    /// `M̂(l)^s` expressed in the weight basis, `U · diag(...) · U*`.
    pub fn weight_matrix(&self, s: f64) -> CMatrix {
        self.apply_function(|nu| (1.0 + nu).powf(s / 2.0))
    }

    /// `U · diag(f(ν_ii²)) · U*`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.l.dim();
        let diag = nalgebra::DVector::from_iterator(n, self.nu_sq.iter().map(|&v| C64::new(f(v), 0.0)));
        if self.diagonal {
            CMatrix::from_diagonal(&diag)
        } else {
            let scaled = CMatrix::from_fn(n, n, |i, k| self.basis[(i, k)] * diag[k]);
            scaled * self.basis.adjoint()
        }
    }
}

/// Symbol of the sub-Laplacian `-Σ_{i∈system} X_i²` at `l`, diagonalized.
///
/// `system` holds 0-based indices into `{X_1, X_2, X_3}`.
pub fn sublaplacian_symbol(l: IrrepIndex, system: &[usize]) -> Result<SpectralWeight> {
    if system.is_empty() {
        return Err(Error::Precondition("sub-Laplacian system must be nonempty".into()));
    }
    if let Some(&bad) = system.iter().find(|&&i| i > 2) {
        return Err(Error::InvalidParameter(format!(
            "su(2) basis index {bad} out of range (0-based, < 3)"
        )));
    }
    let n = l.dim();
    let lambda = l.casimir();
    let lhat = derived_rep(l).negative_square_sum(system);
    let off_diag = (0..n)
        .flat_map(|i| (0..n).map(move |k| (i, k)))
        .filter(|(i, k)| i != k)
        .map(|(i, k)| lhat[(i, k)].norm())
        .fold(0.0, f64::max);
    let scale = 1.0 + lambda;
    if off_diag <= 1e-14 * scale {
        let nu_sq = (0..n).map(|i| lhat[(i, i)].re.max(0.0)).collect();
        return Ok(SpectralWeight {
            l,
            lambda,
            nu_sq,
            basis: CMatrix::identity(n, n),
            diagonal: true,
        });
    }
    // Hermitize before the eigensolver so rounding cannot leak an imaginary part.
    let herm = (&lhat + lhat.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let nu_sq = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let basis = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralWeight {
        l,
        lambda,
        nu_sq,
        basis,
        diagonal: false,
    })
}

/// `diag[(1 + ν_ii²)^{s/2}]` in the diagonalizing basis of `w`.
pub fn subelliptic_weight(w: &SpectralWeight, s: f64) -> CMatrix {
    let n = w.l.dim();
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        w.nu_sq.iter().map(|&v| C64::new((1.0 + v).powf(s / 2.0), 0.0)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Su2;

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Matrix exponential by scaling and squaring of a Taylor series.
    fn expm(a: &CMatrix) -> CMatrix {
        let n = a.nrows();
        let norm = max_abs(a) * n as f64;
        let mut k = 0;
        while norm / 2f64.powi(k) > 0.1 {
            k += 1;
        }
        let scaled = a.map(|z| z / 2f64.powi(k));
        let mut term = CMatrix::identity(n, n);
        let mut sum = CMatrix::identity(n, n);
        for i in 1..30 {
            term = &term * &scaled / C64::new(i as f64, 0.0);
            sum += &term;
        }
        for _ in 0..k {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn trivial_and_identity() {
        let x = EulerAngles::new(0.3, 1.1, -0.7).unwrap();
        let d0 = wigner_matrix(HalfInt::ZERO, &x);
        assert!((d0[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        let id = wigner_matrix(HalfInt::HALF, &EulerAngles::identity());
        assert!(max_abs(&(id - CMatrix::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn small_d_matches_matrix_exponential() {
        for two_l in 0..=12u32 {
            let l = HalfInt::from_twice(two_l);
            let gen = derived_rep(l).matrices[1].clone();
            for &beta in &[0.0, 0.4, 1.3, 2.9, std::f64::consts::PI] {
                let oracle = expm(&gen.map(|z| z * beta));
                let d = wigner_small_d(l, beta).map(|v| C64::new(v, 0.0));
                assert!(max_abs(&(d - oracle)) < 1e-11, "l = {l}, beta = {beta}");
            }
        }
    }

    #[test]
    fn full_euler_matches_exponentials() {
        let (a, b, g) = (0.7, 1.9, -2.3);
        let x = EulerAngles::new(a, b, g).unwrap();
        for two_l in 0..=6u32 {
            let l = HalfInt::from_twice(two_l);
            let dr = derived_rep(l);
            let oracle = expm(&dr.matrices[2].map(|z| z * a))
                * expm(&dr.matrices[1].map(|z| z * b))
                * expm(&dr.matrices[2].map(|z| z * g));
            assert!(max_abs(&(wigner_matrix(l, &x) - oracle)) < 1e-11);
        }
    }

    #[test]
    fn all_at_once_agrees_with_single() {
        let lmax = HalfInt::from_twice(9);
        let all = wigner_small_d_all(lmax, 1.234);
        for l in lmax.up_to() {
            let single = wigner_small_d(l, 1.234);
            assert!((&all[l.twice() as usize] - single).abs().max() < 1e-14);
        }
    }

    #[test]
    fn large_l_is_orthogonal() {
        let l = HalfInt::from_int(100);
        let d = wigner_small_d(l, 1.0);
        let err = (&d * d.transpose() - DMatrix::<f64>::identity(l.dim(), l.dim())).abs().max();
        assert!(err < 1e-10, "orthogonality error {err}");
    }

    #[test]
    fn derived_rep_basics() {
        let d0 = derived_rep(HalfInt::ZERO);
        assert!(d0.matrices.iter().all(|m| m[(0, 0)].norm() == 0.0));

        let half = derived_rep(HalfInt::HALF);
        let x1 = &half.matrices[0];
        assert!(max_abs(&(x1 + x1.adjoint())) < 1e-15);
        // eigenvalues of a traceless anti-Hermitian 2x2: ±i sqrt(-det)
        let det = x1[(0, 0)] * x1[(1, 1)] - x1[(0, 1)] * x1[(1, 0)];
        assert!((det - C64::new(0.25, 0.0)).norm() < 1e-15);
        assert!(x1.trace().norm() < 1e-15);
    }

    #[test]
    fn bracket_homomorphism() {
        for two_l in 0..=8u32 {
            let dr = derived_rep(HalfInt::from_twice(two_l));
            let [x1, x2, x3] = &dr.matrices;
            assert!(max_abs(&(x1 * x2 - x2 * x1 - x3)) < 1e-10);
            assert!(max_abs(&(x2 * x3 - x3 * x2 - x1)) < 1e-10);
            assert!(max_abs(&(x3 * x1 - x1 * x3 - x2)) < 1e-10);
        }
    }

    #[test]
    fn derived_rep_matches_finite_differences() {
        let h = 1e-5;
        for two_l in 0..=6u32 {
            let l = HalfInt::from_twice(two_l);
            let dr = derived_rep(l);
            for k in 0..3 {
                let mut e = [0.0; 3];
                e[k] = h;
                let plus = wigner_matrix(l, &Su2::exp_algebra(&e).to_euler());
                e[k] = -h;
                let minus = wigner_matrix(l, &Su2::exp_algebra(&e).to_euler());
                let fd = (plus - minus).map(|z| z / (2.0 * h));
                assert!(max_abs(&(fd - &dr.matrices[k])) < 1e-8, "l={l} k={k}");
            }
        }
    }

    #[test]
    fn laplacian_values() {
        assert_eq!(laplacian_symbol(HalfInt::ZERO).unwrap(), 0.0);
        assert!((laplacian_symbol(HalfInt::HALF).unwrap() - 0.75).abs() < 1e-14);
        assert!((laplacian_symbol(HalfInt::ONE).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sublaplacian_examples() {
        let w0 = sublaplacian_symbol(HalfInt::ZERO, &[0, 1]).unwrap();
        assert_eq!(w0.nu_sq, vec![0.0]);
        let w = sublaplacian_symbol(HalfInt::HALF, &[0, 1]).unwrap();
        assert!(w.diagonal);
        assert!(w.nu_sq.iter().all(|v| (v - 0.5).abs() < 1e-14));
        let w1 = sublaplacian_symbol(HalfInt::ONE, &[0, 1]).unwrap();
        for (a, b) in w1.nu_sq.iter().zip([1.0, 2.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(sublaplacian_symbol(HalfInt::ONE, &[]).is_err());
    }

    #[test]
    fn non_diagonal_system_reconstructs() {
        let l = HalfInt::from_twice(5);
        let w = sublaplacian_symbol(l, &[1, 2]).unwrap();
        assert!(!w.diagonal);
        let lhat = derived_rep(l).negative_square_sum(&[1, 2]);
        assert!(max_abs(&(w.apply_function(|v| v) - lhat)) < 1e-12);
        let mut expect: Vec<f64> = l.weights().map(|m| l.casimir() - m * m).collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in w.nu_sq.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn weight_examples() {
        let w = sublaplacian_symbol(HalfInt::HALF, &[0, 1]).unwrap();
        assert!(max_abs(&(subelliptic_weight(&w, 0.0) - CMatrix::identity(2, 2))) < 1e-15);
        let m = subelliptic_weight(&w, 2.0);
        assert!((m[(0, 0)].re - 1.5).abs() < 1e-14 && (m[(1, 1)].re - 1.5).abs() < 1e-14);
        let w1 = sublaplacian_symbol(HalfInt::ONE, &[0, 1]).unwrap();
        let m1 = subelliptic_weight(&w1, -2.0);
        for (i, v) in [0.5, 1.0 / 3.0, 0.5].iter().enumerate() {
            assert!((m1[(i, i)].re - v).abs() < 1e-14);
        }
    }
}
