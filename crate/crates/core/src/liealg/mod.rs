//! Finite-dimensional matrix Lie algebras.
//!
//! An algebra is described by an explicit basis of square matrices. At
//! construction the basis is checked for independence and closure, and the
//! structure constants, the trace Gram matrix `G_{ij} = tr(e_i e_j)` and a
//! least-squares re-expansion operator are precomputed. Elements are stored as
//! coefficient vectors and only materialised as matrices on demand.
//!
//! Dual elements are identified with algebra elements through the trace
//! pairing `<X|Y> = tr(XY)`.

mod algebras;
mod element;
mod observable;
mod structure;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

pub use algebras::{gl, sl, sl2, two_dimensional, AlgebraSpec};
pub use element::{coadjoint, AlgebraElement};
pub use observable::{gradient, gradient_with_defect, lie_poisson, PolynomialObservable};
pub use structure::StructureConstants;

use crate::{Error, Result, Tolerances};

/// A matrix Lie algebra with precomputed structure constants.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    name: String,
    matrix_size: usize,
    basis: Vec<DMatrix<f64>>,
    structure: StructureConstants,
    pairing_gram: DMatrix<f64>,
    pairing_gram_inv: Option<DMatrix<f64>>,
    frobenius_gram: DMatrix<f64>,
    /// Vectorised basis, one column per basis matrix (row-major vectorisation).
    vectorised: DMatrix<f64>,
    /// Left pseudo-inverse of `vectorised`.
    expansion: DMatrix<f64>,
    tolerances: Tolerances,
}

fn vectorise(m: &DMatrix<f64>) -> DVector<f64> {
    let (r, c) = m.shape();
    DVector::from_iterator(r * c, (0..r).flat_map(|i| (0..c).map(move |j| m[(i, j)])))
}

impl LieAlgebra {
    /// Build an algebra from a basis with the default tolerances.
    pub fn build(name: impl Into<String>, basis: Vec<DMatrix<f64>>) -> Result<Arc<Self>> {
        Self::build_with(name, basis, Tolerances::default())
    }

    pub fn build_with(
        name: impl Into<String>,
        basis: Vec<DMatrix<f64>>,
        tolerances: Tolerances,
    ) -> Result<Arc<Self>> {
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::BadBasis);
        }
        let m = basis[0].nrows();
        if m == 0 || basis.iter().any(|b| b.nrows() != m || b.ncols() != m) {
            return Err(Error::BadBasis);
        }

        let mut vectorised = DMatrix::zeros(m * m, dim);
        for (i, b) in basis.iter().enumerate() {
            vectorised.set_column(i, &vectorise(b));
        }

        let svd = vectorised.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-10 * smax.max(1.0))
            .count();
        if rank < dim || smax == 0.0 {
            return Err(Error::DependentBasis { rank, dim });
        }
        let expansion = svd
            .pseudo_inverse(1e-12 * smax)
            .map_err(|_| Error::DependentBasis { rank, dim })?;

        let mut structure = StructureConstants::zeros(dim);
        for i in 0..dim {
            for j in (i + 1)..dim {
                let comm = &basis[i] * &basis[j] - &basis[j] * &basis[i];
                let v = vectorise(&comm);
                let coeffs = &expansion * &v;
                let defect = (&v - &vectorised * &coeffs).norm();
                let scale = (basis[i].norm() * basis[j].norm()).max(1.0);
                if defect > tolerances.closure * scale {
                    return Err(Error::NotClosed { i, j, defect });
                }
                for k in 0..dim {
                    structure.set(i, j, k, coeffs[k]);
                    structure.set(j, i, k, -coeffs[k]);
                }
            }
        }

        let pairing_gram =
            DMatrix::from_fn(dim, dim, |i, j| (&basis[i] * &basis[j]).trace());
        let frobenius_gram = vectorised.transpose() * &vectorised;

        let pairing_gram_inv = {
            let sv = pairing_gram.clone().svd(false, false).singular_values;
            let gmax = sv.max();
            if gmax > 0.0 && sv.min() > 1e-12 * gmax {
                pairing_gram.clone().try_inverse()
            } else {
                None
            }
        };

        Ok(Arc::new(Self {
            name: name.into(),
            matrix_size: m,
            basis,
            structure,
            pairing_gram,
            pairing_gram_inv,
            frobenius_gram,
            vectorised,
            expansion,
            tolerances,
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Size `m` of the defining `m × m` matrices.
    pub fn matrix_size(&self) -> usize {
        self.matrix_size
    }

    pub fn basis(&self) -> &[DMatrix<f64>] {
        &self.basis
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        &self.structure
    }

    /// `G_{ij} = tr(e_i e_j)`.
    pub fn pairing_gram(&self) -> &DMatrix<f64> {
        &self.pairing_gram
    }

    /// Inverse trace Gram matrix, when the trace pairing is non-degenerate.
    pub fn pairing_gram_inv(&self) -> Option<&DMatrix<f64>> {
        self.pairing_gram_inv.as_ref()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub(crate) fn same_as(&self, other: &LieAlgebra) -> bool {
        std::ptr::eq(self, other)
            || (self.name == other.name
                && self.matrix_size == other.matrix_size
                && self.basis == other.basis)
    }

    /// Matrix `Σ c_i e_i`.
    pub fn matrix_of(&self, coeffs: &DVector<f64>) -> DMatrix<f64> {
        let m = self.matrix_size;
        let mut out = DMatrix::zeros(m, m);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c != 0.0 {
                out += b * *c;
            }
        }
        out
    }

    /// Least-squares coefficients of `m` and the Frobenius norm of the part
    /// of `m` outside the span.
    pub fn expand(&self, m: &DMatrix<f64>) -> Result<(DVector<f64>, f64)> {
        if m.nrows() != self.matrix_size || m.ncols() != self.matrix_size {
            return Err(Error::DimensionMismatch {
                expected: self.matrix_size,
                found: m.nrows(),
            });
        }
        let v = vectorise(m);
        let coeffs = &self.expansion * &v;
        let defect = (&v - &self.vectorised * &coeffs).norm();
        Ok((coeffs, defect))
    }

    pub fn bracket_coeffs(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.structure.bracket(x, y)
    }

    /// `tr(XY)` from coefficients.
    pub fn pairing_coeffs(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.pairing_gram * y)[(0, 0)]
    }

    /// Frobenius norm of the materialised matrix.
    pub fn frobenius_norm(&self, coeffs: &DVector<f64>) -> f64 {
        (coeffs.transpose() * &self.frobenius_gram * coeffs)[(0, 0)]
            .max(0.0)
            .sqrt()
    }

    /// Coefficients of the trace-dual: the element `Y` with `tr(Y e_j) = ξ_j`.
    pub fn from_trace_dual(&self, xi: &DVector<f64>) -> Result<DVector<f64>> {
        let ginv = self.pairing_gram_inv.as_ref().ok_or(Error::DegeneratePairing)?;
        Ok(ginv * xi)
    }

    /// Components `ξ_j = tr(Y e_j)` of the functional `<Y|·>`.
    pub fn to_trace_dual(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.pairing_gram * y
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<f64>) -> Result<AlgebraElement> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: coeffs.len(),
            });
        }
        Ok(AlgebraElement::new(self.clone(), DVector::from_vec(coeffs)))
    }

    pub fn element_from_vector(self: &Arc<Self>, coeffs: DVector<f64>) -> Result<AlgebraElement> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: coeffs.len(),
            });
        }
        Ok(AlgebraElement::new(self.clone(), coeffs))
    }

    pub fn zero(self: &Arc<Self>) -> AlgebraElement {
        AlgebraElement::new(self.clone(), DVector::zeros(self.dim()))
    }

    pub fn basis_element(self: &Arc<Self>, i: usize) -> AlgebraElement {
        let mut c = DVector::zeros(self.dim());
        c[i] = 1.0;
        AlgebraElement::new(self.clone(), c)
    }

    /// Re-expand a matrix that must lie in the span (defect within the
    /// closure tolerance).
    pub fn from_matrix(self: &Arc<Self>, m: &DMatrix<f64>) -> Result<AlgebraElement> {
        let (coeffs, defect) = self.expand(m)?;
        if defect > self.tolerances.closure * m.norm().max(1.0) {
            return Err(Error::ProjectionLoss { defect });
        }
        Ok(AlgebraElement::new(self.clone(), coeffs))
    }

    /// Least-squares projection of an arbitrary matrix onto the span, with the
    /// discarded Frobenius defect.
    pub fn project_matrix(self: &Arc<Self>, m: &DMatrix<f64>) -> Result<(AlgebraElement, f64)> {
        let (coeffs, defect) = self.expand(m)?;
        Ok((AlgebraElement::new(self.clone(), coeffs), defect))
    }

    /// Largest deviation between the structure-constant bracket and the
    /// re-expanded matrix commutator over all basis pairs.
    pub fn commutator_consistency(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let comm = &self.basis[i] * &self.basis[j] - &self.basis[j] * &self.basis[i];
                let from_c = self.matrix_of(&self.structure.column(i, j));
                worst = worst.max((comm - from_c).abs().max());
            }
        }
        worst
    }
}
