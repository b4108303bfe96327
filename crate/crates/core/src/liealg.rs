//! Exact Lie-algebra computations over the rationals.
//!
//! An algebra is given by structure constants `c^k_{ij}` with
//! `[X_i, X_j] = Σ_k c^k_{ij} X_k`. Indices are 0-based in the API and
//! 1-based in the JSON file format and in messages.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// A finite-dimensional Lie algebra with named basis and rational structure constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    basis: Vec<String>,
    /// `structure[i][j][k] = c^k_{ij}`.
    structure: Vec<Vec<Vec<Rational>>>,
}

/// First failure found by [`LieAlgebra::validate`] (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `c^k_{ij} ≠ -c^k_{ji}`.
    Antisymmetry { i: usize, j: usize, k: usize },
    /// `[X_i,[X_j,X_l]] + [X_j,[X_l,X_i]] + [X_l,[X_i,X_j]]` has a nonzero component `k`.
    Jacobi { i: usize, j: usize, l: usize, k: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Antisymmetry { i, j, k } => write!(
                f,
                "antisymmetry fails: c^{}_({},{}) != -c^{}_({},{})",
                k + 1,
                i + 1,
                j + 1,
                k + 1,
                j + 1,
                i + 1
            ),
            Violation::Jacobi { i, j, l, k } => write!(
                f,
                "Jacobi identity fails for (X{}, X{}, X{}) in component X{}",
                i + 1,
                j + 1,
                l + 1,
                k + 1
            ),
        }
    }
}

impl LieAlgebra {
    /// Builds an algebra from `(i, j, k, c^k_{ij})` entries (0-based); unlisted
    /// constants are zero. No validation is performed.
    pub fn from_entries(
        basis: Vec<String>,
        entries: impl IntoIterator<Item = (usize, usize, usize, Rational)>,
    ) -> Result<Self> {
        let n = basis.len();
        let mut structure = vec![vec![vec![Rational::zero(); n]; n]; n];
        for (i, j, k, c) in entries {
            if i >= n || j >= n || k >= n {
                return Err(Error::Schema(format!(
                    "bracket index ({}, {}, {}) out of range for dimension {n}",
                    i + 1,
                    j + 1,
                    k + 1
                )));
            }
            structure[i][j][k] = c;
        }
        Ok(LieAlgebra { basis, structure })
    }

    /// Like [`from_entries`](Self::from_entries) for `i < j`, filling in
    /// `c^k_{ji} = -c^k_{ij}`.
    fn from_upper(basis: &[&str], upper: &[(usize, usize, &[(usize, i64)])]) -> Self {
        let mut entries = Vec::new();
        for &(i, j, terms) in upper {
            for &(k, c) in terms {
                entries.push((i - 1, j - 1, k - 1, int(c)));
                entries.push((j - 1, i - 1, k - 1, int(-c)));
            }
        }
        Self::from_entries(basis.iter().map(|s| s.to_string()).collect(), entries)
            .expect("built-in algebra indices are in range")
    }

    /// su(2) with `[X1,X2] = X3`, `[X2,X3] = X1`, `[X3,X1] = X2`.
    pub fn su2() -> Self {
        Self::from_upper(
            &["X1", "X2", "X3"],
            &[(1, 2, &[(3, 1)]), (2, 3, &[(1, 1)]), (1, 3, &[(2, -1)])],
        )
    }

    /// su(3) in the basis `X1..X6` of off-diagonal anti-Hermitian matrices,
    /// `X7 = -[X1,X2]` and `X8 = -[X3,X4]`.
    pub fn su3() -> Self {
        Self::from_upper(
            &["X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8"],
            &[
                (1, 2, &[(7, -1)]),
                (1, 3, &[(5, 1)]),
                (1, 4, &[(6, -1)]),
                (1, 5, &[(3, -1)]),
                (1, 6, &[(4, 1)]),
                (1, 7, &[(2, 4)]),
                (1, 8, &[(2, 2)]),
                (2, 3, &[(6, 1)]),
                (2, 4, &[(5, 1)]),
                (2, 5, &[(4, -1)]),
                (2, 6, &[(3, -1)]),
                (2, 7, &[(1, -4)]),
                (2, 8, &[(1, -2)]),
                (3, 4, &[(8, -1)]),
                (3, 5, &[(1, 1)]),
                (3, 6, &[(2, 1)]),
                (3, 7, &[(4, 2)]),
                (3, 8, &[(4, 4)]),
                (4, 5, &[(2, 1)]),
                (4, 6, &[(1, -1)]),
                (4, 7, &[(3, -2)]),
                (4, 8, &[(3, -4)]),
                (5, 6, &[(8, 1), (7, -1)]),
                (5, 7, &[(6, 2)]),
                (5, 8, &[(6, -2)]),
                (6, 7, &[(5, -2)]),
                (6, 8, &[(5, 2)]),
            ],
        )
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    /// `c^k_{ij}`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.structure[i][j][k]
    }

    /// Coordinates of the basis vector `X_i`.
    pub fn unit(&self, i: usize) -> Vec<Rational> {
        (0..self.dim()).map(|k| if k == i { Rational::one() } else { Rational::zero() }).collect()
    }

    /// `[u, v]` for coordinate vectors `u`, `v`.
    pub fn bracket(&self, u: &[Rational], v: &[Rational]) -> Result<Vec<Rational>> {
        let n = self.dim();
        if u.len() != n || v.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: if u.len() != n { u.len() } else { v.len() } });
        }
        let mut out = vec![Rational::zero(); n];
        for (i, ui) in u.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, vj) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let coef = ui * vj;
                for (k, c) in self.structure[i][j].iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    out[k] += &coef * c;
                }
            }
        }
        Ok(out)
    }

    /// Checks antisymmetry, then the Jacobi identity, in exact arithmetic.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    if self.structure[i][j][k] != -&self.structure[j][i][k] {
                        return Err(Violation::Antisymmetry { i, j, k });
                    }
                }
            }
        }
        let br = |a: &[Rational], b: &[Rational]| self.bracket(a, b).expect("dimensions agree");
        for i in 0..n {
            for j in i + 1..n {
                for l in j + 1..n {
                    let (xi, xj, xl) = (self.unit(i), self.unit(j), self.unit(l));
                    let a = br(&xi, &br(&xj, &xl));
                    let b = br(&xj, &br(&xl, &xi));
                    let c = br(&xl, &br(&xi, &xj));
                    for k in 0..n {
                        if !(&a[k] + &b[k] + &c[k]).is_zero() {
                            return Err(Violation::Jacobi { i, j, l, k });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// JSON document with 1-based indices listing every nonzero constant.
    pub fn to_json(&self) -> String {
        let n = self.dim();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = &self.structure[i][j][k];
                    if !c.is_zero() {
                        brackets.push(BracketEntry { i: i + 1, j: j + 1, k: k + 1, c: c.to_string() });
                    }
                }
            }
        }
        let file = AlgebraFile { dim: n, basis: self.basis.clone(), brackets };
        serde_json::to_string_pretty(&file).expect("serializable")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    dim: usize,
    basis: Vec<String>,
    brackets: Vec<BracketEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BracketEntry {
    i: usize,
    j: usize,
    k: usize,
    c: String,
}

/// Parses and validates an algebra file:
/// `{"dim": n, "basis": [...], "brackets": [{"i":1,"j":2,"k":3,"c":"1"}, ...]}`.
pub fn parse_algebra(text: &str) -> Result<LieAlgebra> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if file.dim == 0 {
        return Err(Error::Schema("dim must be positive".into()));
    }
    if file.basis.len() != file.dim {
        return Err(Error::Schema(format!(
            "basis lists {} names for dimension {}",
            file.basis.len(),
            file.dim
        )));
    }
    if file.basis.iter().any(|s| s.trim().is_empty()) {
        return Err(Error::Schema("basis names must be nonempty".into()));
    }
    let mut seen = std::collections::HashSet::new();
    let mut entries = Vec::with_capacity(file.brackets.len());
    for e in &file.brackets {
        if e.i == 0 || e.j == 0 || e.k == 0 || e.i > file.dim || e.j > file.dim || e.k > file.dim {
            return Err(Error::Schema(format!(
                "bracket index ({}, {}, {}) outside 1..={}",
                e.i, e.j, e.k, file.dim
            )));
        }
        if !seen.insert((e.i, e.j, e.k)) {
            return Err(Error::Schema(format!("duplicate entry for ({}, {}, {})", e.i, e.j, e.k)));
        }
        let c: Rational = e
            .c
            .trim()
            .parse()
            .map_err(|_| Error::Schema(format!("invalid rational {:?}", e.c)))?;
        entries.push((e.i - 1, e.j - 1, e.k - 1, c));
    }
    let alg = LieAlgebra::from_entries(file.basis, entries)?;
    alg.validate().map_err(Error::Validation)?;
    Ok(alg)
}

/// Incrementally maintained row-echelon basis of a subspace of `Q^n`.
#[derive(Debug, Clone, Default)]
struct Echelon {
    /// Rows with pivot columns; each row is normalized to 1 at its pivot.
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Echelon {
    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *x -= &f * r;
                    }
                }
            }
        }
        v
    }

    /// Adds `v` if independent; returns whether the rank grew.
    fn insert(&mut self, v: &[Rational]) -> bool {
        let r = self.reduce(v);
        match r.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(p) => {
                let inv = r[p].recip();
                let r: Vec<Rational> = r.iter().map(|x| x * &inv).collect();
                self.rows.push((p, r));
                true
            }
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// The flag `H^1 ⊂ H^2 ⊂ ... ⊂ H^κ = g` generated by a system of vector fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HoermanderFlag {
    /// 0-based generator indices.
    pub generators: Vec<usize>,
    /// `dim H^s` for `s = 1..=κ`.
    pub dims: Vec<usize>,
    pub kappa: usize,
    pub hausdorff_q: usize,
}

/// Computes the bracket flag of the span of `generators`.
///
/// `H^s` is spanned by all brackets of total length `≤ s` in the generators.
/// Brackets of length exactly `s` are obtained as `[A, B]` with `A`, `B`
/// brackets of lengths `a + b = s`.
pub fn flag(alg: &LieAlgebra, generators: &[usize]) -> Result<HoermanderFlag> {
    let n = alg.dim();
    if generators.is_empty() {
        return Err(Error::Precondition("generator set must be nonempty".into()));
    }
    if let Some(&g) = generators.iter().find(|&&g| g >= n) {
        return Err(Error::InvalidParameter(format!("generator index {} out of range", g + 1)));
    }
    let mut total = Echelon::default();
    // by_length[s-1]: independent spanning set of brackets of length exactly s
    let mut by_length: Vec<Vec<Vec<Rational>>> = Vec::new();
    let mut level = Echelon::default();
    let mut first = Vec::new();
    for &g in generators {
        let v = alg.unit(g);
        if level.insert(&v) {
            first.push(v.clone());
        }
        total.insert(&v);
    }
    by_length.push(first);
    let mut dims = vec![total.rank()];
    while total.rank() < n {
        let s = by_length.len() + 1;
        let mut level = Echelon::default();
        let mut fresh = Vec::new();
        for a in 1..s {
            let b = s - a;
            if a > b {
                break;
            }
            for u in &by_length[a - 1] {
                for v in &by_length[b - 1] {
                    let w = alg.bracket(u, v)?;
                    if level.insert(&w) {
                        fresh.push(w);
                    }
                }
            }
        }
        let before = total.rank();
        for w in &fresh {
            total.insert(w);
        }
        if total.rank() == before {
            return Err(Error::NotHoermander { dims, reached: before, dim: n });
        }
        by_length.push(fresh);
        dims.push(total.rank());
    }
    let hausdorff_q = hausdorff_dimension(&dims);
    Ok(HoermanderFlag { generators: generators.to_vec(), kappa: dims.len(), dims, hausdorff_q })
}

/// `Q = dim H^1 + Σ_{i≥1} (i+1)(dim H^{i+1} - dim H^i)`.
pub fn hausdorff_dimension(dims: &[usize]) -> usize {
    let Some(&first) = dims.first() else { return 0 };
    first
        + dims
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i + 2) * (w[1] - w[0]))
            .sum::<usize>()
}

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("invalid rational {s:?}")))
}

/// Whether `r` is a nonnegative integer.
pub fn is_nonnegative_integer(r: &Rational) -> bool {
    r.is_integer() && !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_of(n: usize, terms: &[(usize, i64)]) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); n];
        for &(k, c) in terms {
            v[k - 1] = int(c);
        }
        v
    }

    #[test]
    fn brackets_of_builtins() {
        let su2 = LieAlgebra::su2();
        assert_eq!(su2.bracket(&su2.unit(0), &su2.unit(1)).unwrap(), vec_of(3, &[(3, 1)]));
        let su3 = LieAlgebra::su3();
        assert_eq!(su3.bracket(&su3.unit(0), &su3.unit(1)).unwrap(), vec_of(8, &[(7, -1)]));
        assert_eq!(su3.bracket(&su3.unit(4), &su3.unit(5)).unwrap(), vec_of(8, &[(8, 1), (7, -1)]));
        assert!(su2.bracket(&su2.unit(0), &su3.unit(0)).is_err());
    }

    #[test]
    fn builtins_validate() {
        assert_eq!(LieAlgebra::su2().validate(), Ok(()));
        assert_eq!(LieAlgebra::su3().validate(), Ok(()));
    }

    #[test]
    fn one_slot_sign_flip_breaks_antisymmetry() {
        let mut a = LieAlgebra::su2();
        a.structure[0][1][2] = int(-1);
        assert_eq!(a.validate(), Err(Violation::Antisymmetry { i: 0, j: 1, k: 2 }));
    }

    #[test]
    fn jacobi_violation_detected() {
        // antisymmetric, but [X1,[X2,X3]] + cyclic = X3 ≠ 0
        let entries = [(0, 1, 2, 1), (1, 0, 2, -1), (0, 2, 0, 1), (2, 0, 0, -1)];
        let a = LieAlgebra::from_entries(
            vec!["A".into(), "B".into(), "C".into()],
            entries.iter().map(|&(i, j, k, c)| (i, j, k, int(c))),
        )
        .unwrap();
        assert!(matches!(a.validate(), Err(Violation::Jacobi { .. })));
    }

    #[test]
    fn flags_and_dimensions() {
        let su2 = LieAlgebra::su2();
        let f = flag(&su2, &[0, 1]).unwrap();
        assert_eq!((f.dims.clone(), f.kappa, f.hausdorff_q), (vec![2, 3], 2, 4));
        let f = flag(&su2, &[0, 1, 2]).unwrap();
        assert_eq!((f.dims.clone(), f.kappa, f.hausdorff_q), (vec![3], 1, 3));
        let su3 = LieAlgebra::su3();
        let f = flag(&su3, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!((f.dims.clone(), f.kappa, f.hausdorff_q), (vec![6, 8], 2, 10));
        assert!(matches!(flag(&su2, &[2]), Err(Error::NotHoermander { .. })));
        assert!(flag(&su2, &[]).is_err());
    }

    #[test]
    fn hausdorff_formula() {
        assert_eq!(hausdorff_dimension(&[2, 3]), 4);
        assert_eq!(hausdorff_dimension(&[6, 8]), 10);
        assert_eq!(hausdorff_dimension(&[5]), 5);
        assert_eq!(hausdorff_dimension(&[2, 3, 5]), 2 + 2 + 6);
    }

    #[test]
    fn json_round_trip_and_errors() {
        for alg in [LieAlgebra::su2(), LieAlgebra::su3()] {
            assert_eq!(parse_algebra(&alg.to_json()).unwrap(), alg);
        }
        let missing = r#"{"dim": 3, "basis": ["X1", "X2"], "brackets": []}"#;
        assert!(matches!(parse_algebra(missing), Err(Error::Schema(_))));
        let bad_rational = r#"{"dim": 1, "basis": ["X"], "brackets": [{"i":1,"j":1,"k":1,"c":"x/2"}]}"#;
        assert!(matches!(parse_algebra(bad_rational), Err(Error::Schema(_))));
        let flipped = LieAlgebra::su2().to_json().replacen("\"c\": \"1\"", "\"c\": \"-1\"", 1);
        assert!(matches!(parse_algebra(&flipped), Err(Error::Validation(Violation::Antisymmetry { .. }))));
        let rational = r#"{"dim": 2, "basis": ["A", "B"], "brackets": [
            {"i":1,"j":2,"k":2,"c":"3/2"}, {"i":2,"j":1,"k":2,"c":"-3/2"}]}"#;
        let alg = parse_algebra(rational).unwrap();
        assert_eq!(alg.structure_constant(0, 1, 1), &Rational::new(BigInt::from(3), BigInt::from(2)));
    }
}
