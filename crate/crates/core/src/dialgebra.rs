//! Endomorphism r-matrices `R ∈ End(g)` and the second bracket
//! `[X,Y]_R = ½([RX,Y] + [X,RY])`.
//!
//! Verification routines scan basis pairs or triples; by multilinearity a
//! zero residual on the basis certifies the identity on the whole algebra.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::liealg::{gradient, AlgebraElement, LieAlgebra, PolynomialObservable};
use crate::{Error, Result};

/// Which of `R₊ = ½(R + I)`, `R₋ = ½(R − I)` or `½R` to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
    Symmetric,
}

/// Bases of `g₊` and `g₋` (as coefficient columns) for an R built from a
/// direct-sum decomposition.
#[derive(Debug, Clone)]
pub struct Split {
    pub plus: DMatrix<f64>,
    pub minus: DMatrix<f64>,
}

/// A linear map on the coefficient space of an algebra.
#[derive(Debug, Clone)]
pub struct REndomorphism {
    algebra: Arc<LieAlgebra>,
    matrix: DMatrix<f64>,
    split: Option<Split>,
}

/// Result of a modified Yang-Baxter scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCYBEReport {
    pub c: f64,
    pub max_residual: f64,
    pub worst_pair: (usize, usize),
}

fn span_defect(basis: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    if basis.ncols() == 0 {
        return v.norm();
    }
    let svd = basis.clone().svd(true, true);
    let coeffs = svd.solve(v, 1e-12).unwrap_or_else(|_| DVector::zeros(basis.ncols()));
    (v - basis * coeffs).norm()
}

fn columns(vs: &[DVector<f64>], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, vs.len());
    for (j, v) in vs.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

impl REndomorphism {
    /// Wrap an arbitrary `n × n` matrix acting on coefficient vectors.
    pub fn from_matrix(algebra: &Arc<LieAlgebra>, matrix: DMatrix<f64>) -> Result<Self> {
        let n = algebra.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        Ok(Self {
            algebra: algebra.clone(),
            matrix,
            split: None,
        })
    }

    pub fn identity(algebra: &Arc<LieAlgebra>) -> Self {
        Self::from_matrix(algebra, DMatrix::identity(algebra.dim(), algebra.dim())).unwrap()
    }

    pub fn zero(algebra: &Arc<LieAlgebra>) -> Self {
        Self::from_matrix(algebra, DMatrix::zeros(algebra.dim(), algebra.dim())).unwrap()
    }

    /// Build `R` from a map on matrices whose image stays in the algebra.
    pub fn from_matrix_map(
        algebra: &Arc<LieAlgebra>,
        f: impl Fn(&DMatrix<f64>) -> DMatrix<f64>,
    ) -> Result<Self> {
        let n = algebra.dim();
        let mut m = DMatrix::zeros(n, n);
        for (j, e) in algebra.basis().iter().enumerate() {
            let image = algebra.from_matrix(&f(e))?;
            m.set_column(j, image.coeffs());
        }
        Self::from_matrix(algebra, m)
    }

    /// `R = P₊ − P₋` for `g = span(plus) ⊕ span(minus)`, both given as
    /// coefficient vectors. Each span must be a subalgebra.
    pub fn from_subspaces(
        algebra: &Arc<LieAlgebra>,
        plus: &[DVector<f64>],
        minus: &[DVector<f64>],
    ) -> Result<Self> {
        let n = algebra.dim();
        if plus.len() + minus.len() != n || plus.iter().chain(minus).any(|v| v.len() != n) {
            return Err(Error::NotComplementary);
        }
        let bp = columns(plus, n);
        let bm = columns(minus, n);
        let tol = algebra.tolerances().closure;
        for (which, vs, b) in [("+", plus, &bp), ("-", minus, &bm)] {
            for i in 0..vs.len() {
                for j in (i + 1)..vs.len() {
                    let br = algebra.bracket_coeffs(&vs[i], &vs[j]);
                    let defect = span_defect(b, &br);
                    if defect > tol * (vs[i].norm() * vs[j].norm()).max(1.0) {
                        return Err(Error::NotSubalgebra { which, defect });
                    }
                }
            }
        }
        let mut full = DMatrix::zeros(n, n);
        full.columns_mut(0, plus.len()).copy_from(&bp);
        full.columns_mut(plus.len(), minus.len()).copy_from(&bm);
        let inv = full.clone().try_inverse().ok_or(Error::NotComplementary)?;
        let smin = full.clone().svd(false, false).singular_values.min();
        if smin < 1e-10 {
            return Err(Error::NotComplementary);
        }
        let signs = DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| {
            if i < plus.len() {
                1.0
            } else {
                -1.0
            }
        }));
        Ok(Self {
            algebra: algebra.clone(),
            matrix: &full * signs * inv,
            split: Some(Split { plus: bp, minus: bm }),
        })
    }

    /// Split along basis index sets: `R = +1` on `plus`, `−1` on `minus`.
    pub fn from_split(algebra: &Arc<LieAlgebra>, plus: &[usize], minus: &[usize]) -> Result<Self> {
        let n = algebra.dim();
        let mut seen = vec![false; n];
        for &i in plus.iter().chain(minus) {
            if i >= n || seen[i] {
                return Err(Error::NotComplementary);
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::NotComplementary);
        }
        let unit = |i: usize| {
            let mut v = DVector::zeros(n);
            v[i] = 1.0;
            v
        };
        let p: Vec<_> = plus.iter().map(|&i| unit(i)).collect();
        let m: Vec<_> = minus.iter().map(|&i| unit(i)).collect();
        Self::from_subspaces(algebra, &p, &m)
    }

    /// `R = P₊ − P₋` for the decomposition of `sl(n)` (or `gl(n)`) into
    /// skew-symmetric matrices (`g₊`) and upper triangular matrices (`g₋`).
    pub fn skew_upper_split(algebra: &Arc<LieAlgebra>) -> Result<Self> {
        let mut r = Self::from_matrix_map(algebra, |x| {
            let low = x.lower_triangle() - DMatrix::from_diagonal(&x.diagonal());
            let skew = &low - low.transpose();
            &skew * 2.0 - x
        })?;
        r.split = Some(r.eigen_split());
        Ok(r)
    }

    /// `R = P_{n₊} − P_{n₋}` for the triangular decomposition
    /// `n₋ ⊕ h ⊕ n₊`; `R` vanishes on the diagonal part.
    pub fn cartan(algebra: &Arc<LieAlgebra>) -> Result<Self> {
        Self::from_matrix_map(algebra, |x| {
            let d = DMatrix::from_diagonal(&x.diagonal());
            (x.upper_triangle() - &d) - (x.lower_triangle() - &d)
        })
    }

    fn eigen_split(&self) -> Split {
        let n = self.algebra.dim();
        let i = DMatrix::<f64>::identity(n, n);
        let pick = |p: DMatrix<f64>| {
            let svd = p.svd(true, false);
            let u = svd.u.unwrap();
            let cols: Vec<_> = svd
                .singular_values
                .iter()
                .enumerate()
                .filter(|(_, s)| **s > 0.5)
                .map(|(k, _)| u.column(k).into_owned())
                .collect();
            columns(&cols, n)
        };
        Split {
            plus: pick((&self.matrix + &i) * 0.5),
            minus: pick((&i - &self.matrix) * 0.5),
        }
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn split(&self) -> Option<&Split> {
        self.split.as_ref()
    }

    fn check(&self, x: &AlgebraElement) -> Result<()> {
        if self.algebra.same_as(x.algebra()) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn apply(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(x)?;
        Ok(x.with_coeffs(&self.matrix * x.coeffs()))
    }

    /// `R₊ = ½(R + I)`.
    pub fn r_plus(&self) -> DMatrix<f64> {
        let n = self.algebra.dim();
        (&self.matrix + DMatrix::identity(n, n)) * 0.5
    }

    /// `R₋ = ½(R − I)`.
    pub fn r_minus(&self) -> DMatrix<f64> {
        let n = self.algebra.dim();
        (&self.matrix - DMatrix::identity(n, n)) * 0.5
    }

    pub fn side_matrix(&self, side: Side) -> DMatrix<f64> {
        match side {
            Side::Plus => self.r_plus(),
            Side::Minus => self.r_minus(),
            Side::Symmetric => &self.matrix * 0.5,
        }
    }

    /// Adjoint with respect to the trace pairing, `R* = G⁻¹ Rᵀ G`.
    pub fn trace_adjoint(&self) -> Result<DMatrix<f64>> {
        let ginv = self.algebra.pairing_gram_inv().ok_or(Error::DegeneratePairing)?;
        Ok(ginv * self.matrix.transpose() * self.algebra.pairing_gram())
    }

    /// `max |R* + R|`; zero iff `R` is skew for the trace pairing.
    pub fn skew_residual(&self) -> Result<f64> {
        Ok((self.trace_adjoint()? + &self.matrix).amax())
    }

    pub fn is_skew(&self) -> Result<bool> {
        Ok(self.skew_residual()? <= self.algebra.tolerances().closure)
    }

    /// `max |R² − I|`.
    pub fn involution_residual(&self) -> f64 {
        let n = self.algebra.dim();
        (&self.matrix * &self.matrix - DMatrix::identity(n, n)).amax()
    }

    fn bracket_r_coeffs(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let g = &self.algebra;
        (g.bracket_coeffs(&(&self.matrix * x), y) + g.bracket_coeffs(x, &(&self.matrix * y))) * 0.5
    }

    /// `B_R(X,Y) = [RX,RY] − R([RX,Y] + [X,RY])`.
    fn b_coeffs(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let g = &self.algebra;
        let rx = &self.matrix * x;
        let ry = &self.matrix * y;
        g.bracket_coeffs(&rx, &ry) - &self.matrix * (g.bracket_coeffs(&rx, y) + g.bracket_coeffs(x, &ry))
    }

    fn unit(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.algebra.dim());
        v[i] = 1.0;
        v
    }
}

/// `[X,Y]_R = ½([RX,Y] + [X,RY])`.
pub fn bracket_r(r: &REndomorphism, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    r.check(x)?;
    r.check(y)?;
    Ok(x.with_coeffs(r.bracket_r_coeffs(x.coeffs(), y.coeffs())))
}

/// Scan `‖[RX,RY] − R([RX,Y] + [X,RY]) + c[X,Y]‖_F` over basis pairs.
pub fn mcybe_residual(r: &REndomorphism, c: f64) -> MCYBEReport {
    let g = &r.algebra;
    let n = g.dim();
    let mut report = MCYBEReport {
        c,
        max_residual: 0.0,
        worst_pair: (0, 0),
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let (x, y) = (r.unit(i), r.unit(j));
            let res = r.b_coeffs(&x, &y) + g.bracket_coeffs(&x, &y) * c;
            let norm = g.frobenius_norm(&res);
            if norm > report.max_residual {
                report.max_residual = norm;
                report.worst_pair = (i, j);
            }
        }
    }
    report
}

/// Least-squares constant `c` minimising the mCYBE residual, with the
/// resulting scan.
pub fn fit_mcybe_constant(r: &REndomorphism) -> MCYBEReport {
    let g = &r.algebra;
    let n = g.dim();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let (x, y) = (r.unit(i), r.unit(j));
            let b = g.matrix_of(&r.b_coeffs(&x, &y));
            let br = g.matrix_of(&g.bracket_coeffs(&x, &y));
            num += b.dot(&br);
            den += br.dot(&br);
        }
    }
    let c = if den > 0.0 { -num / den } else { 0.0 };
    mcybe_residual(r, c)
}

/// `max ‖Σ_cyc [B_R(e_i,e_j), e_k]‖_F` over basis triples, with
/// `B_R(X,Y) = [RX,RY] − R([RX,Y] + [X,RY])`.
pub fn jacobi_residual_r(r: &REndomorphism) -> f64 {
    let g = &r.algebra;
    let n = g.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let (x, y, z) = (r.unit(i), r.unit(j), r.unit(k));
                let s = g.bracket_coeffs(&r.b_coeffs(&x, &y), &z)
                    + g.bracket_coeffs(&r.b_coeffs(&z, &x), &y)
                    + g.bracket_coeffs(&r.b_coeffs(&y, &z), &x);
                worst = worst.max(g.frobenius_norm(&s));
            }
        }
    }
    worst
}

/// `max ‖[[X,Y]_R,Z]_R + cyclic‖_F` over basis triples: the Jacobi
/// identity of the R-bracket itself.
pub fn bracket_r_jacobi_residual(r: &REndomorphism) -> f64 {
    let g = &r.algebra;
    let n = g.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let (x, y, z) = (r.unit(i), r.unit(j), r.unit(k));
                let s = r.bracket_r_coeffs(&r.bracket_r_coeffs(&x, &y), &z)
                    + r.bracket_r_coeffs(&r.bracket_r_coeffs(&y, &z), &x)
                    + r.bracket_r_coeffs(&r.bracket_r_coeffs(&z, &x), &y);
                worst = worst.max(g.frobenius_norm(&s));
            }
        }
    }
    worst
}

/// `max ‖[R±X, R±Y] − R±[X,Y]_R‖_F` over basis pairs and both signs.
pub fn homomorphism_residual(r: &REndomorphism) -> f64 {
    let g = &r.algebra;
    let n = g.dim();
    let mut worst = 0.0f64;
    for rs in [r.r_plus(), r.r_minus()] {
        for i in 0..n {
            for j in (i + 1)..n {
                let (x, y) = (r.unit(i), r.unit(j));
                let lhs = g.bracket_coeffs(&(&rs * &x), &(&rs * &y));
                let rhs = &rs * r.bracket_r_coeffs(&x, &y);
                worst = worst.max(g.frobenius_norm(&(lhs - rhs)));
            }
        }
    }
    worst
}

/// `{φ,ψ}_R(L) = <L|[∇φ(L), ∇ψ(L)]_R>`.
pub fn lie_poisson_r(
    r: &REndomorphism,
    phi: &PolynomialObservable,
    psi: &PolynomialObservable,
    l: &AlgebraElement,
) -> Result<f64> {
    let dphi = gradient(phi, l)?;
    let dpsi = gradient(psi, l)?;
    l.pairing(&bracket_r(r, &dphi, &dpsi)?)
}

/// `M = R_side(∇H(L))`: `½R∇H` for [`Side::Symmetric`], `R±∇H` otherwise.
pub fn m_matrix(
    r: &REndomorphism,
    h: &PolynomialObservable,
    l: &AlgebraElement,
    side: Side,
) -> Result<AlgebraElement> {
    r.check(l)?;
    let grad = gradient(h, l)?;
    Ok(grad.with_coeffs(r.side_matrix(side) * grad.coeffs()))
}

/// The double `d = g ⊕ g` with componentwise bracket and the two
/// complementary projections onto `g_R = {(R₊X, R₋X)}` and the diagonal
/// `g^δ = {(X, X)}`.
#[derive(Debug, Clone)]
pub struct DialgebraDouble {
    base: Arc<LieAlgebra>,
    ambient: Arc<LieAlgebra>,
    p_gr: REndomorphism,
    p_delta: REndomorphism,
}

impl DialgebraDouble {
    pub fn base(&self) -> &Arc<LieAlgebra> {
        &self.base
    }

    pub fn ambient(&self) -> &Arc<LieAlgebra> {
        &self.ambient
    }

    /// `P_{g_R}(X,Y) = (R₊(X − Y), R₋(X − Y))`.
    pub fn p_gr(&self) -> &REndomorphism {
        &self.p_gr
    }

    /// `P_{g^δ}(X,Y) = (R₊Y − R₋X, R₊Y − R₋X)`.
    pub fn p_delta(&self) -> &REndomorphism {
        &self.p_delta
    }

    /// `r_d = P_{g_R} − P_{g^δ}`.
    pub fn r_d(&self) -> REndomorphism {
        REndomorphism::from_matrix(&self.ambient, self.p_gr.matrix() - self.p_delta.matrix())
            .expect("same dimension")
    }

    /// Pair `(X, Y)` as an element of the ambient algebra.
    pub fn pair(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        x.check_same(y)?;
        let n = self.base.dim();
        let mut c = DVector::zeros(2 * n);
        c.rows_mut(0, n).copy_from(x.coeffs());
        c.rows_mut(n, n).copy_from(y.coeffs());
        self.ambient.element_from_vector(c)
    }

    /// Largest of `|P² − P|` for both projections and `|P_{g_R} + P_{g^δ} − I|`.
    pub fn projection_residual(&self) -> f64 {
        let a = self.p_gr.matrix();
        let b = self.p_delta.matrix();
        let i = DMatrix::identity(a.nrows(), a.ncols());
        (a * a - a)
            .amax()
            .max((b * b - b).amax())
            .max((a + b - i).amax())
    }
}

/// Build the double of `(g, R)`; requires mCYBE with `c = 1` within 1e−8.
pub fn build_double(r: &REndomorphism) -> Result<DialgebraDouble> {
    let report = mcybe_residual(r, 1.0);
    if report.max_residual > 1e-8 {
        return Err(Error::NotMCYBE {
            residual: report.max_residual,
        });
    }
    let g = &r.algebra;
    let (n, m) = (g.dim(), g.matrix_size());
    let mut basis = Vec::with_capacity(2 * n);
    for block in 0..2 {
        for e in g.basis() {
            let mut b = DMatrix::zeros(2 * m, 2 * m);
            b.view_mut((block * m, block * m), (m, m)).copy_from(e);
            basis.push(b);
        }
    }
    let ambient = LieAlgebra::build_with(
        format!("{0} ⊕ {0}", g.name()),
        basis,
        *g.tolerances(),
    )?;

    let (rp, rm) = (r.r_plus(), r.r_minus());
    let mut p_gr = DMatrix::zeros(2 * n, 2 * n);
    p_gr.view_mut((0, 0), (n, n)).copy_from(&rp);
    p_gr.view_mut((0, n), (n, n)).copy_from(&(-&rp));
    p_gr.view_mut((n, 0), (n, n)).copy_from(&rm);
    p_gr.view_mut((n, n), (n, n)).copy_from(&(-&rm));
    let mut p_delta = DMatrix::zeros(2 * n, 2 * n);
    for block in 0..2 {
        p_delta.view_mut((block * n, 0), (n, n)).copy_from(&(-&rm));
        p_delta.view_mut((block * n, n), (n, n)).copy_from(&rp);
    }
    Ok(DialgebraDouble {
        base: g.clone(),
        p_gr: REndomorphism::from_matrix(&ambient, p_gr)?,
        p_delta: REndomorphism::from_matrix(&ambient, p_delta)?,
        ambient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{gl, sl, sl2};

    fn tridiagonal(n: usize, a: &[f64], b: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = a[i];
        }
        for i in 0..n - 1 {
            m[(i, i + 1)] = b[i];
            m[(i + 1, i)] = b[i];
        }
        m
    }

    #[test]
    fn sl2_adapted_split_is_an_involution() {
        let base = sl2();
        let (h, x, y) = (&base.basis()[0], &base.basis()[1], &base.basis()[2]);
        let adapted = LieAlgebra::build("sl(2) adapted", vec![x - y, h.clone(), x.clone()]).unwrap();
        let r = REndomorphism::from_split(&adapted, &[0], &[1, 2]).unwrap();
        assert!(r.involution_residual() < 1e-12);
        let eig = r.matrix().diagonal();
        assert_eq!(eig.as_slice(), &[1.0, -1.0, -1.0]);
    }

    #[test]
    fn trivial_split_is_identity() {
        let h = LieAlgebra::build("h", vec![DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])]).unwrap();
        let r = REndomorphism::from_split(&h, &[0], &[]).unwrap();
        assert_eq!(r.matrix()[(0, 0)], 1.0);
    }

    #[test]
    fn skew_upper_split_trace() {
        let g = sl(3).unwrap();
        let r = REndomorphism::skew_upper_split(&g).unwrap();
        assert!((r.matrix().trace() + 2.0).abs() < 1e-12);
        assert!(r.involution_residual() < 1e-12);
        let s = r.split().unwrap();
        assert_eq!((s.plus.ncols(), s.minus.ncols()), (3, 5));
        // not skew for the trace pairing
        assert!(!r.is_skew().unwrap());
    }

    #[test]
    fn split_rejects_non_subalgebra_and_overlap() {
        let g = sl2();
        // span{X, Y} is not closed
        let err = REndomorphism::from_split(&g, &[1, 2], &[0]).unwrap_err();
        assert!(matches!(err, Error::NotSubalgebra { which: "+", .. }));
        let err = REndomorphism::from_split(&g, &[0, 1], &[1]).unwrap_err();
        assert!(matches!(err, Error::NotComplementary));
    }

    #[test]
    fn bracket_r_on_split_components() {
        let g = sl(3).unwrap();
        let r = REndomorphism::skew_upper_split(&g).unwrap();
        let s = r.split().unwrap();
        let xp = g.element_from_vector(s.plus.column(0).into_owned()).unwrap();
        let yp = g.element_from_vector(s.plus.column(1).into_owned()).unwrap();
        let ym = g.element_from_vector(s.minus.column(2).into_owned()).unwrap();
        let same = bracket_r(&r, &xp, &yp).unwrap();
        assert!((same.coeffs() - xp.bracket(&yp).unwrap().coeffs()).amax() < 1e-12);
        assert!(bracket_r(&r, &xp, &ym).unwrap().coeffs().amax() < 1e-12);
    }

    #[test]
    fn bracket_r_matches_projection_formula_for_cartan() {
        let g = sl(3).unwrap();
        let r = REndomorphism::cartan(&g).unwrap();
        let x = g.element((0..8).map(|i| (i as f64 * 0.7).sin()).collect()).unwrap();
        let y = g.element((0..8).map(|i| (i as f64 * 1.3).cos()).collect()).unwrap();
        // [X,Y]_R = [X₊,Y₊] − [X₋,Y₋] with X± = R±X
        let rp = |v: &AlgebraElement| v.with_coeffs(r.r_plus() * v.coeffs());
        let rm = |v: &AlgebraElement| v.with_coeffs(r.r_minus() * v.coeffs());
        let oracle = rp(&x).bracket(&rp(&y)).unwrap() - rm(&x).bracket(&rm(&y)).unwrap();
        let got = bracket_r(&r, &x, &y).unwrap();
        assert!((got.coeffs() - oracle.coeffs()).amax() < 1e-12);
    }

    #[test]
    fn mcybe_for_identity_and_zero() {
        let g = sl(3).unwrap();
        let id = REndomorphism::identity(&g);
        assert!(mcybe_residual(&id, 1.0).max_residual < 1e-14);
        let off = mcybe_residual(&id, 0.25).max_residual;
        // (c − 1)[e_i, e_j] with the largest bracket norm over basis pairs
        let mut largest = 0.0f64;
        for i in 0..8 {
            for j in 0..8 {
                largest = largest.max(g.frobenius_norm(&g.structure_constants().column(i, j)));
            }
        }
        assert!((off - 0.75 * largest).abs() < 1e-12);
        let zero = REndomorphism::zero(&g);
        assert_eq!(mcybe_residual(&zero, 0.0).max_residual, 0.0);
        assert_eq!(jacobi_residual_r(&zero), 0.0);
    }

    #[test]
    fn split_and_cartan_satisfy_mcybe_on_shipped_algebras() {
        for g in [sl2(), sl(3).unwrap(), sl(4).unwrap(), gl(2).unwrap()] {
            for r in [
                REndomorphism::skew_upper_split(&g).unwrap(),
                REndomorphism::cartan(&g).unwrap(),
            ] {
                assert!(mcybe_residual(&r, 1.0).max_residual <= 1e-12, "{}", g.name());
                assert!(jacobi_residual_r(&r) <= 1e-12);
                assert!(bracket_r_jacobi_residual(&r) <= 1e-12);
                assert!(homomorphism_residual(&r) <= 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_residual_tracks_bracket_jacobi_for_random_r() {
        let g = sl(3).unwrap();
        let m = DMatrix::from_fn(8, 8, |i, j| ((3 * i + 5 * j) as f64 * 0.37).sin());
        let r = REndomorphism::from_matrix(&g, m).unwrap();
        let b = jacobi_residual_r(&r);
        let direct = bracket_r_jacobi_residual(&r);
        assert!(b > 1e-3);
        // Jacobiator of [,]_R equals −¼ Σ_cyc [B_R(X,Y), Z]
        assert!((direct - 0.25 * b).abs() < 1e-10 * b.max(1.0));
    }

    #[test]
    fn fitted_constant_recovers_one_for_split() {
        let g = sl(3).unwrap();
        let rep = fit_mcybe_constant(&REndomorphism::cartan(&g).unwrap());
        assert!((rep.c - 1.0).abs() < 1e-12);
        assert!(rep.max_residual < 1e-12);
    }

    #[test]
    fn m_matrix_on_tridiagonal_state() {
        let g = sl(3).unwrap();
        let r = REndomorphism::skew_upper_split(&g).unwrap();
        let lm = tridiagonal(3, &[0.5, -0.2, -0.3], &[1.1, -0.4]);
        let l = g.from_matrix(&lm).unwrap();
        let h1 = PolynomialObservable::trace_power(1);
        let mp = m_matrix(&r, &h1, &l, Side::Plus).unwrap().matrix();
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, -1.1, 0.0, 1.1, 0.0, 0.4, 0.0, -0.4, 0.0]);
        assert!((mp - expected).amax() < 1e-12);

        let diag = g.from_matrix(&DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, -3.0]))).unwrap();
        assert!(m_matrix(&r, &h1, &diag, Side::Plus).unwrap().coeffs().amax() < 1e-12);

        let h2 = PolynomialObservable::trace_power(2);
        let plus = m_matrix(&r, &h2, &l, Side::Plus).unwrap();
        let minus = m_matrix(&r, &h2, &l, Side::Minus).unwrap();
        let grad = gradient(&h2, &l).unwrap();
        assert!(((plus - minus).coeffs() - grad.coeffs()).amax() < 1e-12);
    }

    #[test]
    fn casimirs_are_in_involution_for_r_bracket() {
        let g = sl(3).unwrap();
        let r = REndomorphism::skew_upper_split(&g).unwrap();
        let l = g.from_matrix(&tridiagonal(3, &[0.3, 0.1, -0.4], &[0.8, 1.7])).unwrap();
        let h1 = PolynomialObservable::trace_power(1);
        let h2 = PolynomialObservable::trace_power(2);
        assert!(lie_poisson_r(&r, &h1, &h2, &l).unwrap().abs() < 1e-10);
        assert!(lie_poisson_r(&r, &h1, &h1, &l).unwrap().abs() < 1e-14);

        let (x, y) = (g.basis_element(3), g.basis_element(6));
        let lin = lie_poisson_r(
            &r,
            &PolynomialObservable::linear(x.clone()),
            &PolynomialObservable::linear(y.clone()),
            &l,
        )
        .unwrap();
        let direct = l.pairing(&bracket_r(&r, &x, &y).unwrap()).unwrap();
        assert!((lin - direct).abs() < 1e-14);
    }

    #[test]
    fn double_projections() {
        let g = sl2();
        let r = REndomorphism::cartan(&g).unwrap();
        let d = build_double(&r).unwrap();
        assert_eq!(d.ambient().dim(), 6);
        assert!(d.projection_residual() < 1e-12);
        let x = g.element(vec![0.3, -1.2, 0.7]).unwrap();
        let xx = d.pair(&x, &x).unwrap();
        assert!(d.p_gr().apply(&xx).unwrap().coeffs().amax() < 1e-15);
        assert!((d.p_delta().apply(&xx).unwrap().coeffs() - xx.coeffs()).amax() < 1e-15);
        assert!(mcybe_residual(&d.r_d(), 1.0).max_residual <= 1e-10);
    }

    #[test]
    fn double_rejects_non_r_matrix() {
        let g = sl2();
        let m = DMatrix::from_fn(3, 3, |i, j| (i + 2 * j) as f64);
        let r = REndomorphism::from_matrix(&g, m).unwrap();
        assert!(matches!(build_double(&r), Err(Error::NotMCYBE { .. })));
    }
}
