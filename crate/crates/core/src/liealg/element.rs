use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::LieAlgebra;
use crate::{Error, Result};

/// An element of a matrix Lie algebra, stored by its basis coefficients.
///
/// Dual elements `L ∈ g*` use the same type through the trace pairing.
#[derive(Clone)]
pub struct AlgebraElement {
    algebra: Arc<LieAlgebra>,
    coeffs: DVector<f64>,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraElement")
            .field("algebra", &self.algebra.name())
            .field("coeffs", &self.coeffs.as_slice())
            .finish()
    }
}

impl AlgebraElement {
    pub(crate) fn new(algebra: Arc<LieAlgebra>, coeffs: DVector<f64>) -> Self {
        Self { algebra, coeffs }
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DVector<f64> {
        self.coeffs
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        self.algebra.matrix_of(&self.coeffs)
    }

    /// Same algebra, new coefficients.
    pub fn with_coeffs(&self, coeffs: DVector<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), self.coeffs.len());
        Self::new(self.algebra.clone(), coeffs)
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.algebra.same_as(&other.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    /// `[self, other]`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_coeffs(self.algebra.bracket_coeffs(&self.coeffs, &other.coeffs)))
    }

    /// Trace pairing `tr(self · other)`.
    pub fn pairing(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self.algebra.pairing_coeffs(&self.coeffs, &other.coeffs))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.algebra.frobenius_norm(&self.coeffs)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.with_coeffs(&self.coeffs * s)
    }
}

/// Coadjoint action `ad*_X L` under the trace identification.
///
/// The result `L'` satisfies `<L'|Y> = -<L|[X,Y]>` for all `Y`, which for the
/// trace pairing is the commutator `[X, L]`.
pub fn coadjoint(x: &AlgebraElement, l: &AlgebraElement) -> Result<AlgebraElement> {
    x.bracket(l)
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&AlgebraElement> for &AlgebraElement {
            type Output = AlgebraElement;
            fn $method(self, rhs: &AlgebraElement) -> AlgebraElement {
                assert!(
                    self.algebra.same_as(&rhs.algebra),
                    "arithmetic on elements of different algebras"
                );
                self.with_coeffs(&self.coeffs $op &rhs.coeffs)
            }
        }
        impl $trait<AlgebraElement> for AlgebraElement {
            type Output = AlgebraElement;
            fn $method(self, rhs: AlgebraElement) -> AlgebraElement {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl Mul<f64> for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: f64) -> AlgebraElement {
        self.scale(rhs)
    }
}

impl Mul<f64> for AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: f64) -> AlgebraElement {
        self.scale(rhs)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(-1.0)
    }
}
