use nalgebra::DMatrix;

use super::AlgebraElement;
use crate::Result;

/// Polynomial functions on `g* ≅ g` whose gradients are known in closed form.
#[derive(Debug, Clone)]
pub enum PolynomialObservable {
    /// `coeff · tr(L^{ell+1}) / (ell+1)`, a Casimir of the Lie-Poisson bracket.
    TracePower { ell: u32, coeff: f64 },
    /// `X(L) = <L|X>`.
    Linear(AlgebraElement),
}

impl PolynomialObservable {
    /// `H_ell(L) = tr(L^{ell+1}) / (ell+1)`.
    pub fn trace_power(ell: u32) -> Self {
        assert!(ell >= 1, "trace powers start at ell = 1");
        Self::TracePower { ell, coeff: 1.0 }
    }

    pub fn scaled_trace_power(ell: u32, coeff: f64) -> Self {
        assert!(ell >= 1, "trace powers start at ell = 1");
        Self::TracePower { ell, coeff }
    }

    pub fn linear(x: AlgebraElement) -> Self {
        Self::Linear(x)
    }

    pub fn is_casimir(&self) -> bool {
        matches!(self, Self::TracePower { .. })
    }

    pub fn evaluate(&self, l: &AlgebraElement) -> Result<f64> {
        match self {
            Self::TracePower { ell, coeff } => {
                let p = matrix_power(&l.matrix(), ell + 1);
                Ok(coeff * p.trace() / (*ell as f64 + 1.0))
            }
            Self::Linear(x) => l.pairing(x),
        }
    }
}

pub(crate) fn matrix_power(m: &DMatrix<f64>, k: u32) -> DMatrix<f64> {
    let mut out = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// Gradient with respect to the trace pairing together with the Frobenius
/// norm of the part of `coeff · L^ell` that lies outside the algebra.
///
/// For `sl(n)` the discarded part is the identity component, so the gradient
/// of a trace power is the trace-free part of `L^ell`.
pub fn gradient_with_defect(
    phi: &PolynomialObservable,
    l: &AlgebraElement,
) -> Result<(AlgebraElement, f64)> {
    match phi {
        PolynomialObservable::TracePower { ell, coeff } => {
            let alg = l.algebra();
            let p = matrix_power(&l.matrix(), *ell) * *coeff;
            let dphi = alg
                .basis()
                .iter()
                .map(|e| (&p * e).trace())
                .collect::<Vec<_>>();
            let coeffs = alg.from_trace_dual(&dphi.into())?;
            let grad = l.with_coeffs(coeffs);
            let defect = (p - grad.matrix()).norm();
            Ok((grad, defect))
        }
        PolynomialObservable::Linear(x) => {
            x.check_same(l)?;
            Ok((x.clone(), 0.0))
        }
    }
}

/// `∇φ(L)`: the element with `<∇φ(L)|Y> = dφ(L)(Y)` for every `Y` in the algebra.
pub fn gradient(phi: &PolynomialObservable, l: &AlgebraElement) -> Result<AlgebraElement> {
    gradient_with_defect(phi, l).map(|(g, _)| g)
}

/// Lie-Poisson bracket `{φ, ψ}(L) = <L|[∇φ(L), ∇ψ(L)]>`.
pub fn lie_poisson(
    phi: &PolynomialObservable,
    psi: &PolynomialObservable,
    l: &AlgebraElement,
) -> Result<f64> {
    let dphi = gradient(phi, l)?;
    let dpsi = gradient(psi, l)?;
    l.pairing(&dphi.bracket(&dpsi)?)
}
