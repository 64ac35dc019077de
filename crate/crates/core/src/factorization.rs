//! Matrix exponential and the factorisation `exp(tX) = g₊ g₋⁻¹`, which
//! solves a Lax flow by conjugation: `L(t) = g₊⁻¹ Λ g₊ = g₋⁻¹ Λ g₋`.
//!
//! Two splits of `sl(n)` are supported:
//!
//! * [`SplitKind::Qr`]: orthogonal × upper triangular, from `g = QR` with
//!   `diag(R) > 0`, so `g₊ = Q` and `g₋ = R⁻¹`.
//! * [`SplitKind::Ldu`]: `g = W₊ Y² W₋⁻¹` with `W₊` unit upper, `W₋` unit
//!   lower and `Y` positive diagonal, so `g₊ = W₊Y` and `g₋ = W₋Y⁻¹`.
//!
//! The solved equation is `dL/dt = [L, R₊∇H(L)]`, where `R₊` projects onto
//! the Lie algebra of the `g₊` factors.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::liealg::{gradient, AlgebraElement, PolynomialObservable};
use crate::{Error, Result};

/// Default bound on `‖tX‖₁` accepted by [`expm`].
pub const EXPM_NORM_BOUND: f64 = 500.0;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.37;

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(tX)` by degree-13 Padé approximation with scaling and squaring.
pub fn expm(x: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    expm_with_bound(x, t, EXPM_NORM_BOUND)
}

pub fn expm_with_bound(x: &DMatrix<f64>, t: f64, bound: f64) -> Result<DMatrix<f64>> {
    if !x.is_square() {
        return Err(Error::BadSize(format!("expm needs a square matrix, got {:?}", x.shape())));
    }
    let a = x * t;
    let norm = norm1(&a);
    if !norm.is_finite() || norm > bound {
        return Err(Error::Overflow { norm, bound });
    }
    let n = a.nrows();
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * 2f64.powi(-s);
    let b = &PADE13;
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];
    let mut r = (&v - &u)
        .lu()
        .solve(&(&v + &u))
        .ok_or(Error::Singular)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    Qr,
    Ldu,
}

/// Triangular pieces of an LDU-kind factorisation.
#[derive(Debug, Clone)]
pub struct LduParts {
    pub w_plus: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub w_minus: DMatrix<f64>,
}

/// `g = g₊ g₋⁻¹` with the reassembly residual `‖g − g₊g₋⁻¹‖_F`.
#[derive(Debug, Clone)]
pub struct GroupFactors {
    pub g_plus: DMatrix<f64>,
    pub g_minus: DMatrix<f64>,
    pub kind: SplitKind,
    pub residual: f64,
    pub ldu: Option<LduParts>,
}

fn invert(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone().try_inverse().ok_or(Error::Singular)
}

/// QR with positive diagonal in `R`: `g₊ = Q`, `g₋ = R⁻¹`.
pub fn factor_qr(g: &DMatrix<f64>) -> Result<GroupFactors> {
    if !g.is_square() {
        return Err(Error::BadSize(format!("expected a square matrix, got {:?}", g.shape())));
    }
    let n = g.nrows();
    let qr = g.clone().qr();
    let (mut q, mut r) = (qr.q(), qr.r());
    let scale = g.amax().max(f64::MIN_POSITIVE);
    for i in 0..n {
        let d = r[(i, i)];
        if d.abs() <= 1e-14 * scale * n as f64 {
            return Err(Error::Singular);
        }
        if d < 0.0 {
            q.column_mut(i).neg_mut();
            r.row_mut(i).neg_mut();
        }
    }
    let residual = (g - &q * &r).norm();
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(n, n))
        .ok_or(Error::Singular)?;
    Ok(GroupFactors {
        g_plus: q,
        g_minus: r_inv,
        kind: SplitKind::Qr,
        residual,
        ldu: None,
    })
}

/// Doolittle `A = L D U` without pivoting; pivots must be positive.
fn doolittle(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let mut l = DMatrix::<f64>::identity(n, n);
    let mut u = DMatrix::<f64>::zeros(n, n);
    let scale = a.amax().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in i..n {
            let s: f64 = (0..i).map(|k| l[(i, k)] * u[(k, j)]).sum();
            u[(i, j)] = a[(i, j)] - s;
        }
        let pivot = u[(i, i)];
        if pivot.is_nan() || pivot <= 1e-14 * scale {
            return Err(Error::OutsideFactorisationDomain { index: i, pivot });
        }
        for j in (i + 1)..n {
            let s: f64 = (0..i).map(|k| l[(j, k)] * u[(k, i)]).sum();
            l[(j, i)] = (a[(j, i)] - s) / pivot;
        }
    }
    let d: Vec<f64> = (0..n).map(|i| u[(i, i)]).collect();
    for i in 0..n {
        let p = d[i];
        for j in i..n {
            u[(i, j)] /= p;
        }
    }
    Ok((l, d, u))
}

fn reverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(r, c, |i, j| m[(r - 1 - i, c - 1 - j)])
}

/// `g = W₊ Y² W₋⁻¹`; returns `g₊ = W₊Y`, `g₋ = W₋Y⁻¹`.
///
/// The domain is the set of matrices whose trailing principal minors are
/// all positive, which contains a neighbourhood of the identity.
pub fn factor_ldu(g: &DMatrix<f64>) -> Result<GroupFactors> {
    if !g.is_square() {
        return Err(Error::BadSize(format!("expected a square matrix, got {:?}", g.shape())));
    }
    let n = g.nrows();
    // Reversing rows and columns turns an upper·diag·lower product into lower·diag·upper.
    let (l, d, u) = doolittle(&reverse(g)).map_err(|e| match e {
        Error::OutsideFactorisationDomain { index, pivot } => Error::OutsideFactorisationDomain {
            index: n - 1 - index,
            pivot,
        },
        other => other,
    })?;
    let w_plus = reverse(&l);
    let w_minus_inv = reverse(&u);
    let ysq: Vec<f64> = d.into_iter().rev().collect();
    let y = DMatrix::from_diagonal(&ysq.iter().map(|v| v.sqrt()).collect::<Vec<_>>().into());
    let y_inv = DMatrix::from_diagonal(&ysq.iter().map(|v| 1.0 / v.sqrt()).collect::<Vec<_>>().into());
    let w_minus = w_minus_inv
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .ok_or(Error::Singular)?;
    let g_plus = &w_plus * &y;
    let g_minus = &w_minus * &y_inv;
    let residual = (g - &g_plus * &y * &w_minus_inv).norm();
    Ok(GroupFactors {
        g_plus,
        g_minus,
        kind: SplitKind::Ldu,
        residual,
        ldu: Some(LduParts { w_plus, y, w_minus }),
    })
}

pub fn factor(g: &DMatrix<f64>, kind: SplitKind) -> Result<GroupFactors> {
    match kind {
        SplitKind::Qr => factor_qr(g),
        SplitKind::Ldu => factor_ldu(g),
    }
}

impl GroupFactors {
    /// `g₊ g₋⁻¹`.
    pub fn reassemble(&self) -> Result<DMatrix<f64>> {
        Ok(&self.g_plus * invert(&self.g_minus)?)
    }
}

/// Output of [`propagate`].
#[derive(Debug, Clone)]
pub struct Propagation {
    /// `g₊⁻¹ Λ g₊`.
    pub state: AlgebraElement,
    /// `g₋⁻¹ Λ g₋`.
    pub via_minus: AlgebraElement,
    /// Largest entry of the difference between the two conjugations.
    pub discrepancy: f64,
    /// Frobenius norm of the part of `g₊⁻¹ Λ g₊` outside the algebra.
    pub projection_defect: f64,
    pub factors: GroupFactors,
}

/// `L(t)` for `dL/dt = [L, R₊∇H(L)]`, `L(0) = Λ`, from the factorisation of
/// `exp(t ∇H(Λ))`.
pub fn propagate(
    lambda: &AlgebraElement,
    h: &PolynomialObservable,
    t: f64,
    kind: SplitKind,
) -> Result<Propagation> {
    let x = gradient(h, lambda)?.matrix();
    let factors = factor(&expm(&x, t)?, kind)?;
    let lm = lambda.matrix();
    let g_plus_inv = match kind {
        SplitKind::Qr => factors.g_plus.transpose(),
        SplitKind::Ldu => invert(&factors.g_plus)?,
    };
    let plus = g_plus_inv * &lm * &factors.g_plus;
    let minus = invert(&factors.g_minus)? * &lm * &factors.g_minus;
    let discrepancy = (&plus - &minus).amax();
    let alg = lambda.algebra();
    let (state, projection_defect) = alg.project_matrix(&plus)?;
    let (via_minus, _) = alg.project_matrix(&minus)?;
    Ok(Propagation {
        state,
        via_minus,
        discrepancy,
        projection_defect,
        factors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::sl;

    fn path(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 })
    }

    #[test]
    fn expm_basic_cases() {
        let z = DMatrix::<f64>::zeros(3, 3);
        assert_eq!(expm(&z, 1.0).unwrap(), DMatrix::identity(3, 3));
        let d = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let e = expm(&d, 1.0).unwrap();
        assert!((e[(0, 0)] - std::f64::consts::E).abs() < 1e-14);
        assert!((e[(1, 1)] - 1.0 / std::f64::consts::E).abs() < 1e-15);
        assert_eq!(e[(0, 1)], 0.0);
        let x = DMatrix::from_row_slice(3, 3, &[0.0, 2.0, -1.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0]);
        let taylor = DMatrix::identity(3, 3) + &x + &x * &x * 0.5;
        assert!((expm(&x, 1.0).unwrap() - taylor).amax() < 1e-15);
    }

    #[test]
    fn expm_inverse_pair_for_skew_argument() {
        let k = DMatrix::from_row_slice(3, 3, &[0.0, 4.0, -7.0, -4.0, 0.0, 5.5, 7.0, -5.5, 0.0]);
        let scale = 19.9 / norm1(&k);
        let p = expm(&k, scale).unwrap() * expm(&k, -scale).unwrap();
        assert!((p - DMatrix::identity(3, 3)).amax() < 1e-11);
    }

    #[test]
    fn expm_overflow_guard() {
        let x = DMatrix::from_row_slice(1, 1, &[1.0]);
        assert!(matches!(expm(&x, 1e4), Err(Error::Overflow { .. })));
    }

    #[test]
    fn qr_examples() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let f = factor_qr(&rot).unwrap();
        assert!((&f.g_plus - &rot).amax() < 1e-15);
        assert!((&f.g_minus - DMatrix::identity(2, 2)).amax() < 1e-15);

        let up = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 0.5]);
        let f = factor_qr(&up).unwrap();
        assert!((&f.g_plus - DMatrix::identity(2, 2)).amax() < 1e-15);
        assert!((&f.g_minus - up.clone().try_inverse().unwrap()).amax() < 1e-15);

        let g = expm(&path(3), 0.3).unwrap();
        let f = factor_qr(&g).unwrap();
        assert!(f.residual < 1e-12);
        assert!((f.g_plus.transpose() * &f.g_plus - DMatrix::identity(3, 3)).amax() < 1e-12);
        assert!((f.g_plus.determinant() - 1.0).abs() < 1e-12);
        let rinv = invert(&f.g_minus).unwrap();
        for i in 0..3 {
            assert!(rinv[(i, i)] > 0.0);
            for j in 0..i {
                assert!(rinv[(i, j)].abs() < 1e-15);
            }
        }
        assert!(matches!(factor_qr(&DMatrix::zeros(2, 2)), Err(Error::Singular)));
    }

    #[test]
    fn ldu_examples() {
        let f = factor_ldu(&DMatrix::identity(3, 3)).unwrap();
        let parts = f.ldu.unwrap();
        assert_eq!(parts.w_plus, DMatrix::identity(3, 3));
        assert_eq!(parts.y, DMatrix::identity(3, 3));

        let d = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.25]);
        let parts = factor_ldu(&d).unwrap().ldu.unwrap();
        assert_eq!(parts.y, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]));
        assert_eq!(parts.w_minus, DMatrix::identity(2, 2));

        let g = expm(&path(3), 0.1).unwrap();
        let f = factor_ldu(&g).unwrap();
        assert!(f.residual < 1e-12);
        let p = f.ldu.as_ref().unwrap();
        for i in 0..3 {
            assert_eq!(p.w_plus[(i, i)], 1.0);
            assert!((p.w_minus[(i, i)] - 1.0).abs() < 1e-15);
            for j in (i + 1)..3 {
                assert_eq!(p.w_plus[(j, i)], 0.0);
                assert!(p.w_minus[(i, j)].abs() < 1e-15);
            }
        }
        assert!((f.reassemble().unwrap() - g).amax() < 1e-12);
    }

    #[test]
    fn ldu_rejects_nonpositive_trailing_minor() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            factor_ldu(&g),
            Err(Error::OutsideFactorisationDomain { index: 1, .. })
        ));
    }

    #[test]
    fn propagate_at_zero_and_isospectral() {
        let g = sl(3).unwrap();
        let lambda = g.from_matrix(&path(3)).unwrap();
        let h1 = PolynomialObservable::trace_power(1);
        let p0 = propagate(&lambda, &h1, 0.0, SplitKind::Qr).unwrap();
        assert!((p0.state.coeffs() - lambda.coeffs()).amax() < 1e-15);

        let p = propagate(&lambda, &h1, 0.5, SplitKind::Qr).unwrap();
        let mut e0: Vec<f64> = path(3).symmetric_eigenvalues().iter().copied().collect();
        let mut e1: Vec<f64> = p.state.matrix().symmetric_eigenvalues().iter().copied().collect();
        e0.sort_by(f64::total_cmp);
        e1.sort_by(f64::total_cmp);
        for (a, b) in e0.iter().zip(&e1) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(p.discrepancy < 1e-12);

        let q = propagate(&lambda, &h1, 0.5, SplitKind::Ldu).unwrap();
        assert!(q.discrepancy < 1e-12);
    }
}
