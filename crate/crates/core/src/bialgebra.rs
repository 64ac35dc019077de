//! Tensor r-matrices `r = r^{ij} e_i ⊗ e_j` and coboundary Lie bialgebras.
//!
//! Dual elements are written in the abstract dual basis `e^i` with
//! `<e^i, e_j> = δ^i_j`; [`DualElement::from_trace`] and
//! [`DualElement::to_trace`] convert to and from the trace identification.
//!
//! The map `r̄ : g* → g` contracts the left slot, `(r̄ξ)^j = Σ_i ξ_i r^{ij}`,
//! so that `<η, r̄ξ> = r(ξ, η)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dialgebra::REndomorphism;
use crate::liealg::{AlgebraElement, LieAlgebra, StructureConstants};
use crate::{Error, Result};

/// An element of `g*` in the abstract dual basis.
#[derive(Debug, Clone)]
pub struct DualElement {
    algebra: Arc<LieAlgebra>,
    coeffs: DVector<f64>,
}

impl DualElement {
    pub fn new(algebra: &Arc<LieAlgebra>, coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.len() != algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim(),
                found: coeffs.len(),
            });
        }
        Ok(Self {
            algebra: algebra.clone(),
            coeffs,
        })
    }

    /// `e^i`.
    pub fn basis(algebra: &Arc<LieAlgebra>, i: usize) -> Self {
        let mut c = DVector::zeros(algebra.dim());
        c[i] = 1.0;
        Self {
            algebra: algebra.clone(),
            coeffs: c,
        }
    }

    /// The functional `<Y|·>` of an algebra element under the trace pairing.
    pub fn from_trace(y: &AlgebraElement) -> Self {
        Self {
            algebra: y.algebra().clone(),
            coeffs: y.algebra().to_trace_dual(y.coeffs()),
        }
    }

    /// The algebra element `Y` with `<Y|·> = ξ`.
    pub fn to_trace(&self) -> Result<AlgebraElement> {
        let c = self.algebra.from_trace_dual(&self.coeffs)?;
        self.algebra.element_from_vector(c)
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    /// Natural pairing `<ξ, X>`.
    pub fn eval(&self, x: &AlgebraElement) -> f64 {
        self.coeffs.dot(x.coeffs())
    }
}

/// `r ∈ g ⊗ g`, split as `r = a + s` into skew and symmetric parts.
#[derive(Debug, Clone)]
pub struct TensorR {
    algebra: Arc<LieAlgebra>,
    coeffs: DMatrix<f64>,
}

impl TensorR {
    pub fn new(algebra: &Arc<LieAlgebra>, coeffs: DMatrix<f64>) -> Result<Self> {
        let n = algebra.dim();
        if coeffs.nrows() != n || coeffs.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: coeffs.nrows(),
            });
        }
        Ok(Self {
            algebra: algebra.clone(),
            coeffs,
        })
    }

    /// `Σ_k c_k x_k ⊗ y_k`.
    pub fn from_terms(algebra: &Arc<LieAlgebra>, terms: &[(f64, usize, usize)]) -> Result<Self> {
        let n = algebra.dim();
        let mut m = DMatrix::zeros(n, n);
        for &(c, i, j) in terms {
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: i.max(j) + 1,
                });
            }
            m[(i, j)] += c;
        }
        Self::new(algebra, m)
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    /// Skew part `a = ½(r − rᵀ)`.
    pub fn skew(&self) -> TensorR {
        self.with((&self.coeffs - self.coeffs.transpose()) * 0.5)
    }

    /// Symmetric part `s = ½(r + rᵀ)`.
    pub fn sym(&self) -> TensorR {
        self.with((&self.coeffs + self.coeffs.transpose()) * 0.5)
    }

    fn with(&self, coeffs: DMatrix<f64>) -> TensorR {
        TensorR {
            algebra: self.algebra.clone(),
            coeffs,
        }
    }

    /// The `m² × m²` matrix `Σ r^{ij} e_i ⊗ e_j` in the defining representation.
    pub fn kronecker_lift(&self) -> DMatrix<f64> {
        let b = self.algebra.basis();
        let m = self.algebra.matrix_size();
        let mut out = DMatrix::zeros(m * m, m * m);
        for i in 0..b.len() {
            for j in 0..b.len() {
                let c = self.coeffs[(i, j)];
                if c != 0.0 {
                    out += b[i].kronecker(&b[j]) * c;
                }
            }
        }
        out
    }
}

/// A dense `n × n × n` array, indexed `T^{ijk}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeTensor {
    n: usize,
    data: Vec<f64>,
}

impl ThreeTensor {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t.data[(i * n + j) * n + k] = f(i, j, k);
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Largest deviation from total antisymmetry.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    for w in [self.get(j, i, k), self.get(i, k, j), self.get(k, j, i)] {
                        worst = worst.max((v + w).abs());
                    }
                }
            }
        }
        worst
    }
}

/// `r̄ξ`, with `(r̄ξ)^j = Σ_i ξ_i r^{ij}`.
pub fn rbar(r: &TensorR, xi: &DualElement) -> Result<AlgebraElement> {
    if !r.algebra.same_as(&xi.algebra) {
        return Err(Error::AlgebraMismatch);
    }
    r.algebra.element_from_vector(r.coeffs.transpose() * &xi.coeffs)
}

fn ad(g: &LieAlgebra, x: &DVector<f64>) -> DMatrix<f64> {
    g.structure_constants().ad(x)
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

/// `ad_X` acting on both legs of a 2-tensor.
fn ad2(a: &DMatrix<f64>, t: &DMatrix<f64>) -> DMatrix<f64> {
    a * t + t * a.transpose()
}

/// `δr(X) = [X ⊗ 1 + 1 ⊗ X, r]` as an `n × n` coefficient array:
/// `δr(X)^{ij} = X^k (c^i_{kl} r^{lj} + c^j_{kl} r^{il})`.
pub fn cocycle(r: &TensorR, x: &AlgebraElement) -> Result<DMatrix<f64>> {
    if !r.algebra.same_as(x.algebra()) {
        return Err(Error::AlgebraMismatch);
    }
    Ok(ad2(&ad(&r.algebra, x.coeffs()), &r.coeffs))
}

fn cocycle_basis(r: &TensorR, k: usize) -> DMatrix<f64> {
    let n = r.algebra.dim();
    ad2(&ad(&r.algebra, &unit(n, k)), &r.coeffs)
}

/// `max_k ‖δs(e_k)‖_F`; zero iff the symmetric part is ad-invariant.
pub fn sym_invariance_residual(r: &TensorR) -> f64 {
    let s = r.sym();
    (0..r.algebra.dim())
        .map(|k| cocycle_basis(&s, k).norm())
        .fold(0.0, f64::max)
}

fn require_invariant_sym(r: &TensorR) -> Result<()> {
    let residual = sym_invariance_residual(r);
    if residual > r.algebra.tolerances().invariance {
        Err(Error::SymPartNotInvariant { residual })
    } else {
        Ok(())
    }
}

/// Residual of the cocycle condition
/// `γ([X,Y]) = ad_X γ(Y) − ad_Y γ(X)` for `γ = δr` over basis pairs.
pub fn cocycle_residual(r: &TensorR) -> f64 {
    let g = &r.algebra;
    let n = g.dim();
    let gamma: Vec<_> = (0..n).map(|k| cocycle_basis(r, k)).collect();
    let ads: Vec<_> = (0..n).map(|k| ad(g, &unit(n, k))).collect();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let c = g.structure_constants().column(i, j);
            let mut lhs = DMatrix::zeros(n, n);
            for k in 0..n {
                lhs += &gamma[k] * c[k];
            }
            let rhs = ad2(&ads[i], &gamma[j]) - ad2(&ads[j], &gamma[i]);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

/// Structure constants `f^{ij}_k` of the bracket on `g*` defined by
/// transposing the cocycle: `<[ξ,η]_r, Z> = <ξ ⊗ η, δr(Z)>`.
pub fn dual_structure(r: &TensorR) -> StructureConstants {
    let n = r.algebra.dim();
    let mut f = StructureConstants::zeros(n);
    for k in 0..n {
        let d = cocycle_basis(r, k);
        for i in 0..n {
            for j in 0..n {
                f.set(i, j, k, d[(i, j)]);
            }
        }
    }
    f
}

/// Coadjoint action on `g*` in the abstract dual basis:
/// `(ad*_X ξ)_j = −X^i c^k_{ij} ξ_k`.
pub fn coadjoint_dual(x: &AlgebraElement, xi: &DualElement) -> Result<DualElement> {
    if !x.algebra().same_as(&xi.algebra) {
        return Err(Error::AlgebraMismatch);
    }
    let a = ad(x.algebra(), x.coeffs());
    DualElement::new(&xi.algebra, -(a.transpose() * &xi.coeffs))
}

/// `[ξ,η]_r = ad*_{āξ} η − ad*_{āη} ξ`, using the skew part `a` of `r`;
/// valid when the symmetric part is ad-invariant.
pub fn bracket_star(r: &TensorR, xi: &DualElement, eta: &DualElement) -> Result<DualElement> {
    require_invariant_sym(r)?;
    let a = r.skew();
    let ax = rbar(&a, xi)?;
    let ae = rbar(&a, eta)?;
    let t1 = coadjoint_dual(&ax, eta)?;
    let t2 = coadjoint_dual(&ae, xi)?;
    DualElement::new(&xi.algebra, t1.coeffs - t2.coeffs)
}

fn skew_bracket_unchecked(a: &DMatrix<f64>, g: &LieAlgebra, xi: &DVector<f64>, eta: &DVector<f64>) -> DVector<f64> {
    let ad_t = |y: DVector<f64>| ad(g, &y).transpose();
    let ax = a.transpose() * xi;
    let ae = a.transpose() * eta;
    -(ad_t(ax) * eta) + ad_t(ae) * xi
}

/// Schouten bracket `[[a,a]](ξ,η,ζ) = −2 Σ_cyc <ζ, [āξ, āη]>` on dual basis triples.
pub fn schouten(a: &TensorR) -> Result<ThreeTensor> {
    let residual = (&a.coeffs + a.coeffs.transpose()).amax();
    if residual > a.algebra.tolerances().identity * a.coeffs.amax().max(1.0) {
        return Err(Error::NotAntisymmetric { residual });
    }
    let g = &a.algebra;
    let n = g.dim();
    let images: Vec<_> = (0..n).map(|i| a.coeffs.row(i).transpose()).collect();
    let br = |p: usize, q: usize| g.bracket_coeffs(&images[p], &images[q]);
    let pairs: Vec<Vec<DVector<f64>>> = (0..n).map(|p| (0..n).map(|q| br(p, q)).collect()).collect();
    Ok(ThreeTensor::from_fn(n, |i, j, k| {
        -2.0 * (pairs[i][j][k] + pairs[j][k][i] + pairs[k][i][j])
    }))
}

fn rr_unchecked(r: &TensorR, use_bracket: bool) -> ThreeTensor {
    let g = &r.algebra;
    let n = g.dim();
    let a = r.skew().coeffs;
    let images: Vec<_> = (0..n).map(|i| r.coeffs.row(i).transpose()).collect();
    ThreeTensor::from_fn(n, |i, j, k| {
        let mut v = g.bracket_coeffs(&images[i], &images[j]);
        if use_bracket {
            let d = skew_bracket_unchecked(&a, g, &unit(n, i), &unit(n, j));
            v -= r.coeffs.transpose() * d;
        }
        v[k]
    })
}

/// `<r,r>(ξ,η,ζ) = <ζ, [r̄ξ, r̄η] − r̄[ξ,η]_r>` on dual basis triples.
pub fn rr_bracket(r: &TensorR) -> Result<ThreeTensor> {
    require_invariant_sym(r)?;
    Ok(rr_unchecked(r, true))
}

/// `<s,s>(ξ,η,ζ) = <ζ, [s̄ξ, s̄η]>` for the symmetric part of `r`.
pub fn ss_bracket(r: &TensorR) -> ThreeTensor {
    rr_unchecked(&r.sym(), false)
}

/// `[r₁₂,r₁₃] + [r₁₂,r₂₃] + [r₁₃,r₂₃]` as a coefficient array over `g⊗g⊗g`.
pub fn cybe_tensor(r: &TensorR) -> ThreeTensor {
    let g = &r.algebra;
    let c = g.structure_constants();
    let n = g.dim();
    let rc = &r.coeffs;
    ThreeTensor::from_fn(n, |i, j, k| {
        let mut acc = 0.0;
        for p in 0..n {
            for q in 0..n {
                // [r12, r13]: c^i_{pq} r^{pj} r^{qk}
                acc += c.get(p, q, i) * rc[(p, j)] * rc[(q, k)];
                // [r12, r23]: r^{ip} r^{qk} c^j_{pq}
                acc += rc[(i, p)] * rc[(q, k)] * c.get(p, q, j);
                // [r13, r23]: r^{ip} r^{jq} c^k_{pq}
                acc += rc[(i, p)] * rc[(j, q)] * c.get(p, q, k);
            }
        }
        acc
    })
}

/// `{L ⊗, L} = [L ⊗ 1 + 1 ⊗ L, r]` in the defining representation.
pub fn russian_formula(r: &TensorR, l: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = r.algebra.matrix_size();
    if l.nrows() != m || l.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: l.nrows(),
        });
    }
    let id = DMatrix::<f64>::identity(m, m);
    let big = l.kronecker(&id) + id.kronecker(l);
    let rm = r.kronecker_lift();
    Ok(&big * &rm - &rm * &big)
}

/// `R = ā ∘ s̄⁻¹` for a factorisable `r` (invertible, ad-invariant `s`).
pub fn factorisable_to_r(r: &TensorR) -> Result<REndomorphism> {
    require_invariant_sym(r)?;
    let s = r.sym().coeffs;
    let sv = s.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 || sv.min() < 1e-12 * smax {
        return Err(Error::SingularSymmetricPart);
    }
    let sinv = s.try_inverse().ok_or(Error::SingularSymmetricPart)?;
    REndomorphism::from_matrix(&r.algebra, r.skew().coeffs.transpose() * sinv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Triangular,
    QuasiTriangular,
    Factorisable,
    None,
}

/// Residuals behind a [`Classification`].
#[derive(Debug, Clone, Serialize)]
pub struct BialgebraReport {
    pub sym_invariance: f64,
    pub sym_norm: f64,
    pub schouten_norm: f64,
    /// `None` when the symmetric part is not ad-invariant.
    pub rr_norm: Option<f64>,
    pub cocycle_residual: f64,
    pub classification: Classification,
}

/// Classify `r` as triangular (`s = 0`, `[[a,a]] = 0`), factorisable
/// (`<r,r> = 0` with invertible ad-invariant `s`), quasi-triangular
/// (`<r,r> = 0`, `s` singular) or none of these.
pub fn classify(r: &TensorR, tol: f64) -> BialgebraReport {
    let sym_invariance = sym_invariance_residual(r);
    let s = r.sym();
    let sym_norm = s.coeffs.norm();
    let schouten_norm = schouten(&r.skew()).map(|t| t.norm()).unwrap_or(f64::INFINITY);
    let invariant = sym_invariance <= r.algebra.tolerances().invariance;
    let rr_norm = invariant.then(|| rr_unchecked(r, true).norm());
    let classification = if sym_norm <= tol && schouten_norm <= tol {
        Classification::Triangular
    } else if rr_norm.is_some_and(|v| v <= tol) {
        let sv = s.coeffs.svd(false, false).singular_values;
        if sv.min() > 1e-12 * sv.max() {
            Classification::Factorisable
        } else {
            Classification::QuasiTriangular
        }
    } else {
        Classification::None
    };
    BialgebraReport {
        sym_invariance,
        sym_norm,
        schouten_norm,
        rr_norm,
        cocycle_residual: cocycle_residual(r),
        classification,
    }
}

/// The double `d = g ⊕ g*` with basis `(e_1..e_n, e^1..e^n)` and invariant
/// form `<(X,ξ)|(Y,η)> = <ξ,Y> + <η,X>`.
#[derive(Debug, Clone)]
pub struct BialgebraDouble {
    base: Arc<LieAlgebra>,
    structure: StructureConstants,
    form: DMatrix<f64>,
}

impl BialgebraDouble {
    pub fn base(&self) -> &Arc<LieAlgebra> {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        &self.structure
    }

    pub fn form(&self) -> &DMatrix<f64> {
        &self.form
    }

    pub fn bracket(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.structure.bracket(u, v)
    }

    /// `max |<[u,v]|w> + <v|[u,w]>|` over basis triples.
    pub fn invariance_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for u in 0..d {
            for v in 0..d {
                let uv = self.structure.column(u, v);
                for w in 0..d {
                    let uw = self.structure.column(u, w);
                    let lhs = (uv.transpose() * &self.form).dot(&unit(d, w).transpose())
                        + (unit(d, v).transpose() * &self.form).dot(&uw.transpose());
                    worst = worst.max(lhs.abs());
                }
            }
        }
        worst
    }

    pub fn jacobi_residual(&self) -> f64 {
        self.structure.jacobi_residual()
    }
}

/// Jacobi residual of the cocycle-transpose bracket on `g*`.
pub fn dual_jacobi_residual(r: &TensorR) -> f64 {
    let f = dual_structure(r);
    f.jacobi_residual().max(f.antisymmetry_residual())
}

/// Assemble `g ⊕ g*` with
/// `[e_i, e^j] = −c^j_{il} e^l + f^{jl}_i e_l`.
pub fn build_bialgebra_double(r: &TensorR) -> Result<BialgebraDouble> {
    let residual = dual_jacobi_residual(r);
    if residual > 1e-8 {
        return Err(Error::DualJacobiFails { residual });
    }
    let g = &r.algebra;
    let c = g.structure_constants();
    let f = dual_structure(r);
    let n = g.dim();
    let mut s = StructureConstants::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                s.set(i, j, k, c.get(i, j, k));
                s.set(n + i, n + j, n + k, f.get(i, j, k));
            }
            for l in 0..n {
                let dual_part = -c.get(i, l, j);
                let base_part = f.get(j, l, i);
                s.set(i, n + j, n + l, dual_part);
                s.set(i, n + j, l, base_part);
                s.set(n + j, i, n + l, -dual_part);
                s.set(n + j, i, l, -base_part);
            }
        }
    }
    let mut form = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        form[(i, n + i)] = 1.0;
        form[(n + i, i)] = 1.0;
    }
    Ok(BialgebraDouble {
        base: g.clone(),
        structure: s,
        form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dialgebra::mcybe_residual;
    use crate::liealg::{sl2, two_dimensional};

    // sl(2) basis order: H = 0, X = 1, Y = 2
    fn factorisable() -> TensorR {
        TensorR::from_terms(&sl2(), &[(0.125, 0, 0), (0.5, 1, 2)]).unwrap()
    }

    fn x_wedge_h() -> TensorR {
        TensorR::from_terms(&sl2(), &[(1.0, 1, 0), (-1.0, 0, 1)]).unwrap()
    }

    fn wedge_2d() -> TensorR {
        TensorR::from_terms(&two_dimensional(), &[(1.0, 0, 1), (-1.0, 1, 0)]).unwrap()
    }

    fn casimir() -> TensorR {
        TensorR::from_terms(&sl2(), &[(0.5, 0, 0), (1.0, 1, 2), (1.0, 2, 1)]).unwrap()
    }

    #[test]
    fn rbar_satisfies_defining_relation() {
        let g = sl2();
        let r = TensorR::new(&g, DMatrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64 - 2.5)).unwrap();
        for i in 0..3 {
            let img = rbar(&r, &DualElement::basis(&g, i)).unwrap();
            for j in 0..3 {
                let eta = DualElement::basis(&g, j);
                assert_eq!(eta.eval(&img), r.coeffs()[(i, j)]);
            }
        }
        let e12 = TensorR::from_terms(&g, &[(1.0, 0, 1)]).unwrap();
        let img = rbar(&e12, &DualElement::basis(&g, 0)).unwrap();
        assert_eq!(img.coeffs().as_slice(), &[0.0, 1.0, 0.0]);
        let zero = rbar(&e12, &DualElement::new(&g, DVector::zeros(3)).unwrap()).unwrap();
        assert_eq!(zero.coeffs().amax(), 0.0);
        let h8 = rbar(&factorisable(), &DualElement::basis(&g, 0)).unwrap();
        assert_eq!(h8.coeffs().as_slice(), &[0.125, 0.0, 0.0]);
    }

    #[test]
    fn trace_dual_conversion_round_trip() {
        let g = sl2();
        let y = g.element(vec![0.3, -1.0, 2.0]).unwrap();
        let xi = DualElement::from_trace(&y);
        // <Y|X> = tr(YX) = Y^Y coefficient for X = E12
        assert!((xi.coeffs()[1] - 2.0).abs() < 1e-15);
        let back = xi.to_trace().unwrap();
        assert!((back.coeffs() - y.coeffs()).amax() < 1e-15);
    }

    #[test]
    fn cocycle_matches_kronecker_commutator() {
        let g = sl2();
        let r = x_wedge_h();
        let m = g.matrix_size();
        let id = DMatrix::<f64>::identity(m, m);
        for k in 0..3 {
            let x = g.basis_element(k);
            let d = cocycle(&r, &x).unwrap();
            let big = x.matrix().kronecker(&id) + id.kronecker(&x.matrix());
            let rm = r.kronecker_lift();
            let oracle = &big * &rm - &rm * &big;
            let lifted = TensorR::new(&g, d).unwrap().kronecker_lift();
            assert!((oracle - lifted).amax() < 1e-14);
        }
        assert_eq!(cocycle(&r, &g.zero()).unwrap().amax(), 0.0);
    }

    #[test]
    fn casimir_tensor_is_invariant() {
        let om = casimir();
        for k in 0..3 {
            assert!(cocycle(&om, &om.algebra().basis_element(k)).unwrap().amax() < 1e-15);
        }
        assert!(sym_invariance_residual(&factorisable()) < 1e-15);
    }

    #[test]
    fn dual_bracket_sl2() {
        let g = sl2();
        let r = factorisable();
        let e = |i| DualElement::basis(&g, i);
        let hx = bracket_star(&r, &e(0), &e(1)).unwrap();
        let hy = bracket_star(&r, &e(0), &e(2)).unwrap();
        let xy = bracket_star(&r, &e(1), &e(2)).unwrap();
        assert!((hx.coeffs() - DVector::from_vec(vec![0.0, -0.25, 0.0])).amax() < 1e-15);
        assert!((hy.coeffs() - DVector::from_vec(vec![0.0, 0.0, -0.25])).amax() < 1e-15);
        assert!(xy.coeffs().amax() < 1e-15);
        // contracting the right slot instead flips the sign
        let flipped = TensorR::new(&g, r.coeffs().transpose()).unwrap();
        let hx_right = bracket_star(&flipped, &e(0), &e(1)).unwrap();
        assert!((hx_right.coeffs()[1] - 0.25).abs() < 1e-15);
        assert_eq!(bracket_star(&r, &e(1), &e(1)).unwrap().coeffs().amax(), 0.0);
    }

    #[test]
    fn bracket_star_matches_cocycle_transpose() {
        for r in [wedge_2d(), factorisable(), x_wedge_h()] {
            let g = r.algebra().clone();
            let f = dual_structure(&r);
            let n = g.dim();
            for i in 0..n {
                for j in 0..n {
                    let b = bracket_star(&r, &DualElement::basis(&g, i), &DualElement::basis(&g, j)).unwrap();
                    assert!((b.coeffs() - f.column(i, j)).amax() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn bracket_star_rejects_non_invariant_sym() {
        let g = sl2();
        let r = TensorR::from_terms(&g, &[(1.0, 1, 1)]).unwrap();
        let e = DualElement::basis(&g, 0);
        assert!(matches!(bracket_star(&r, &e, &e), Err(Error::SymPartNotInvariant { .. })));
    }

    #[test]
    fn schouten_examples() {
        assert!(schouten(&wedge_2d()).unwrap().norm() < 1e-15);
        assert!(schouten(&x_wedge_h()).unwrap().norm() < 1e-14);
        let zero = TensorR::new(&sl2(), DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(schouten(&zero).unwrap().norm(), 0.0);
        assert!(matches!(schouten(&factorisable()), Err(Error::NotAntisymmetric { .. })));
        let a = factorisable().skew();
        let t = schouten(&a).unwrap();
        assert!(t.norm() > 0.1);
        assert!(t.antisymmetry_residual() < 1e-15);
    }

    #[test]
    fn rr_identities_on_factorisable_example() {
        let r = factorisable();
        let a = r.skew();
        let rr = rr_bracket(&r).unwrap();
        assert!(rr.norm() < 1e-12);
        let aa = rr_bracket(&a).unwrap();
        let sch = schouten(&a).unwrap();
        assert!(aa.max_abs_diff(&sch.scale(-0.5)) < 1e-15);
        let ss = ss_bracket(&r);
        assert!(rr.max_abs_diff(&aa.add(&ss)) < 1e-15);
        // <r,r> = 0 forces [[a,a]] = 2<s,s>
        assert!(sch.max_abs_diff(&ss.scale(2.0)) < 1e-15);
        assert!(cybe_tensor(&r).max_abs_diff(&rr) < 1e-15);
    }

    #[test]
    fn rr_grows_linearly_under_skew_perturbation() {
        let r = factorisable();
        let noise = DMatrix::from_fn(3, 3, |i, j| ((i as f64) - (j as f64)) * 0.7);
        let norm = |eps: f64| {
            let p = TensorR::new(r.algebra(), r.coeffs() + &noise * eps).unwrap();
            rr_bracket(&p).unwrap().norm()
        };
        let (a, b) = (norm(1e-3), norm(1e-4));
        assert!(a > 0.0);
        let slope = (a / b).log10();
        assert!((slope - 1.0).abs() < 0.05, "log-log slope {slope}");
    }

    #[test]
    fn cybe_tensor_on_triangular_examples() {
        assert!(cybe_tensor(&wedge_2d()).norm() < 1e-15);
        assert!(cybe_tensor(&x_wedge_h()).norm() < 1e-14);
        assert_eq!(cybe_tensor(&TensorR::new(&sl2(), DMatrix::zeros(3, 3)).unwrap()).norm(), 0.0);
    }

    #[test]
    fn russian_formula_examples() {
        let r = factorisable();
        let id = DMatrix::<f64>::identity(2, 2);
        assert_eq!(russian_formula(&r, &id).unwrap().amax(), 0.0);

        let h = sl2().basis()[0].clone();
        let got = russian_formula(&r, &h).unwrap();
        let b = sl2().basis().to_vec();
        let rm = b[0].kronecker(&b[0]) * 0.125 + b[1].kronecker(&b[2]) * 0.5;
        let big = h.kronecker(&id) + id.kronecker(&h);
        assert!((got - (&big * &rm - &rm * &big)).amax() < 1e-15);

        let a = x_wedge_h();
        let l = DMatrix::from_row_slice(2, 2, &[0.3, 1.2, -0.7, -0.3]);
        let m = russian_formula(&a, &l).unwrap();
        let swap = DMatrix::from_fn(4, 4, |p, q| if q == (p % 2) * 2 + p / 2 { 1.0 } else { 0.0 });
        assert!((&swap * &m * &swap + &m).amax() < 1e-15);
        assert!(matches!(
            russian_formula(&a, &DMatrix::identity(3, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn factorisable_to_r_examples() {
        let big_r = factorisable_to_r(&factorisable()).unwrap();
        assert!(mcybe_residual(&big_r, 1.0).max_residual < 1e-12);
        let zero = factorisable_to_r(&casimir()).unwrap();
        assert_eq!(zero.matrix().amax(), 0.0);
        assert!(matches!(factorisable_to_r(&x_wedge_h()), Err(Error::SingularSymmetricPart)));
    }

    #[test]
    fn classification_of_examples() {
        assert_eq!(classify(&factorisable(), 1e-10).classification, Classification::Factorisable);
        assert_eq!(classify(&wedge_2d(), 1e-10).classification, Classification::Triangular);
        assert_eq!(classify(&x_wedge_h(), 1e-10).classification, Classification::Triangular);
        let generic = TensorR::from_terms(&sl2(), &[(1.0, 1, 1), (0.3, 0, 2)]).unwrap();
        assert_eq!(classify(&generic, 1e-10).classification, Classification::None);
    }

    #[test]
    fn double_of_sl2() {
        let r = factorisable();
        let d = build_bialgebra_double(&r).unwrap();
        assert_eq!(d.dim(), 6);
        assert!(d.invariance_residual() <= 1e-12);
        assert!(d.jacobi_residual() <= 1e-12);
        let u = unit(6, 0);
        let v = unit(6, 1);
        let uv = d.bracket(&u, &v);
        assert_eq!(uv.rows(0, 3).into_owned(), sl2().structure_constants().column(0, 1));
        let f = dual_structure(&r);
        assert_eq!(d.bracket(&unit(6, 3), &unit(6, 4)).rows(3, 3).into_owned(), f.column(0, 1));
    }

    #[test]
    fn cocycle_condition_holds() {
        for r in [factorisable(), wedge_2d(), x_wedge_h(), casimir()] {
            assert!(cocycle_residual(&r) < 1e-12);
        }
    }
}
