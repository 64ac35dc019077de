use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::LieAlgebra;
use crate::{Error, Result, Tolerances};

fn unit(m: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(m, m);
    e[(i, j)] = 1.0;
    e
}

/// `sl(2)` with the basis `H = diag(1,-1)`, `X = E_12`, `Y = E_21`.
pub fn sl2() -> Arc<LieAlgebra> {
    sl(2).expect("sl(2) basis is valid")
}

/// `sl(n)` with basis ordered as Cartan elements `H_k = E_kk - E_{k+1,k+1}`,
/// then `E_ij` for `i < j` (row-major), then `E_ji` for `i < j`.
pub fn sl(n: usize) -> Result<Arc<LieAlgebra>> {
    if n < 2 {
        return Err(Error::BadSize(format!("sl(n) needs n >= 2, got {n}")));
    }
    let mut basis = Vec::with_capacity(n * n - 1);
    for k in 0..n - 1 {
        basis.push(unit(n, k, k) - unit(n, k + 1, k + 1));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            basis.push(unit(n, i, j));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            basis.push(unit(n, j, i));
        }
    }
    LieAlgebra::build(format!("sl({n})"), basis)
}

/// `gl(n)` with the elementary matrices `E_ij` in row-major order.
pub fn gl(n: usize) -> Result<Arc<LieAlgebra>> {
    if n < 1 {
        return Err(Error::BadSize("gl(n) needs n >= 1".into()));
    }
    let basis = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| unit(n, i, j))
        .collect();
    LieAlgebra::build(format!("gl({n})"), basis)
}

/// The non-abelian two-dimensional algebra `[X, Y] = X`, realised by
/// `X = E_12` and `Y = -E_11`.
pub fn two_dimensional() -> Arc<LieAlgebra> {
    let x = unit(2, 0, 1);
    let y = -unit(2, 0, 0);
    LieAlgebra::build("aff(1)", vec![x, y]).expect("two-dimensional basis is valid")
}

/// JSON description of an algebra: each basis matrix is given row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub name: String,
    pub matrix_size: usize,
    pub basis: Vec<Vec<f64>>,
}

impl AlgebraSpec {
    pub fn from_algebra(alg: &LieAlgebra) -> Self {
        let m = alg.matrix_size();
        Self {
            name: alg.name().to_string(),
            matrix_size: m,
            basis: alg
                .basis()
                .iter()
                .map(|b| (0..m).flat_map(|i| (0..m).map(move |j| b[(i, j)])).collect())
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Arc<LieAlgebra>> {
        self.build_with(Tolerances::default())
    }

    pub fn build_with(&self, tolerances: Tolerances) -> Result<Arc<LieAlgebra>> {
        let m = self.matrix_size;
        let basis = self
            .basis
            .iter()
            .enumerate()
            .map(|(idx, entries)| {
                if entries.len() != m * m {
                    return Err(Error::Input(format!(
                        "basis matrix {idx} has {} entries, expected {}",
                        entries.len(),
                        m * m
                    )));
                }
                Ok(DMatrix::from_row_slice(m, m, entries))
            })
            .collect::<Result<Vec<_>>>()?;
        LieAlgebra::build_with(self.name.clone(), basis, tolerances)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_structure_constants() {
        let g = sl2();
        let c = g.structure_constants();
        // [H,X] = 2X, [H,Y] = -2Y, [X,Y] = H
        assert_eq!(c.get(0, 1, 1), 2.0);
        assert_eq!(c.get(0, 2, 2), -2.0);
        assert_eq!(c.get(1, 2, 0), 1.0);
        assert_eq!(c.get(1, 0, 1), -2.0);
        for (i, j, k) in [(0, 1, 0), (0, 1, 2), (1, 2, 1), (1, 2, 2)] {
            assert_eq!(c.get(i, j, k), 0.0);
        }
    }

    #[test]
    fn abelian_line_has_zero_structure_constants() {
        let g = LieAlgebra::build("h", vec![DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])]).unwrap();
        assert_eq!(g.dim(), 1);
        assert_eq!(g.structure_constants().get(0, 0, 0), 0.0);
    }

    #[test]
    fn gl2_matches_elementary_commutators() {
        // [E_ij, E_kl] = δ_jk E_il − δ_li E_kj
        let g = gl(2).unwrap();
        let idx = |i: usize, j: usize| 2 * i + j;
        for (i, j, k, l) in (0..16).map(|t| ((t >> 3) & 1, (t >> 2) & 1, (t >> 1) & 1, t & 1)) {
            let mut expect = [0.0; 4];
            if j == k {
                expect[idx(i, l)] += 1.0;
            }
            if l == i {
                expect[idx(k, j)] -= 1.0;
            }
            let got = g.structure_constants().column(idx(i, j), idx(k, l));
            for t in 0..4 {
                assert!((got[t] - expect[t]).abs() < 1e-12, "E{i}{j},E{k}{l}");
            }
        }
    }

    #[test]
    fn two_dimensional_relation() {
        let g = two_dimensional();
        let xy = g.basis_element(0).bracket(&g.basis_element(1)).unwrap();
        assert!((xy.coeffs() - g.basis_element(0).coeffs()).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_closed_span() {
        // E_12 and E_21 alone do not close: their commutator is diag(1,-1).
        let err = LieAlgebra::build("bad", vec![unit(2, 0, 1), unit(2, 1, 0)]).unwrap_err();
        assert!(matches!(err, Error::NotClosed { .. }));
    }

    #[test]
    fn rejects_dependent_basis() {
        let err = LieAlgebra::build("dup", vec![unit(2, 0, 1), unit(2, 0, 1) * 2.0]).unwrap_err();
        assert!(matches!(err, Error::DependentBasis { .. }));
    }

    #[test]
    fn json_round_trip() {
        let g = sl(3).unwrap();
        let spec = AlgebraSpec::from_algebra(&g);
        let text = serde_json::to_string(&spec).unwrap();
        let back = AlgebraSpec::from_json(&text).unwrap().build().unwrap();
        assert!(back.same_as(&g));
    }

    #[test]
    fn shipped_algebras_satisfy_invariants() {
        for g in [sl2(), sl(3).unwrap(), sl(4).unwrap(), gl(2).unwrap(), two_dimensional()] {
            let c = g.structure_constants();
            assert!(c.antisymmetry_residual() == 0.0, "{}", g.name());
            assert!(c.jacobi_residual() <= 1e-12, "{}", g.name());
            assert!(g.commutator_consistency() <= 1e-12, "{}", g.name());
        }
    }
}
