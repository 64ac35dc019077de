//! Toda chains: the open chain in Flaschka variables (skew/upper split),
//! the same chain in Cartan-split coordinates, and the periodic
//! shift-operator lattice `L = a_n S⁻¹ + b_n + S`.
//!
//! Both Lax descriptions of the open chain produce
//!
//! ```text
//! ȧ_1 = 2b_1²,  ȧ_j = 2(b_j² − b_{j−1}²),  ȧ_{N+1} = −2b_N²,  ḃ_j = b_j (a_{j+1} − a_j).
//! ```
//!
//! With the skew/upper split the equation is `dL/dt = [L, R₊∇H(L)]` for
//! `H = ½ tr L²`; with the Cartan split it is `dL/dt = [R₊∇H(L), L]` for
//! `H = tr L²`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dialgebra::{REndomorphism, Side};
use crate::lax::{rk4_integrate, IntegratorConfig, LaxOrientation, LaxSystem};
use crate::liealg::{gl, sl, AlgebraElement, LieAlgebra, PolynomialObservable};
use crate::{Error, Result};

/// Flaschka state of an `N+1`-site open chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TodaChain {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl TodaChain {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if b.is_empty() || a.len() != b.len() + 1 {
            return Err(Error::LengthMismatch(format!(
                "need len(a) = len(b) + 1 >= 2, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        Ok(Self { a, b })
    }

    /// `a = 0`, `b = 1`: the state whose Lax matrix is `Λ`.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n + 1], vec![1.0; n])
    }

    /// Number of bonds `N`.
    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_iterator(self.a.len() + self.b.len(), self.a.iter().chain(&self.b).copied())
    }

    pub fn from_vector(n: usize, v: &DVector<f64>) -> Self {
        Self {
            a: v.rows(0, n + 1).iter().copied().collect(),
            b: v.rows(n + 1, n).iter().copied().collect(),
        }
    }

    /// Symmetric tridiagonal matrix with diagonal `a` and off-diagonal `b`.
    pub fn lax_matrix(&self) -> DMatrix<f64> {
        let m = self.a.len();
        let mut l = DMatrix::from_diagonal(&DVector::from_column_slice(&self.a));
        for (i, &b) in self.b.iter().enumerate() {
            l[(i, i + 1)] = b;
            l[(i + 1, i)] = b;
        }
        debug_assert_eq!(l.nrows(), m);
        l
    }

    /// Read `(a, b)` back from a tridiagonal matrix, averaging the two
    /// off-diagonals.
    pub fn from_lax_matrix(l: &DMatrix<f64>) -> Result<Self> {
        let m = l.nrows();
        if m < 2 || !l.is_square() {
            return Err(Error::BadSize(format!("expected a square matrix of size >= 2, got {:?}", l.shape())));
        }
        let a = (0..m).map(|i| l[(i, i)]).collect();
        let b = (0..m - 1).map(|i| 0.5 * (l[(i, i + 1)] + l[(i + 1, i)])).collect();
        Self::new(a, b)
    }
}

/// `Λ`: zero diagonal, ones on the first off-diagonals, as an element of `sl(N+1)`.
pub fn lambda_matrix(n: usize) -> Result<AlgebraElement> {
    if n == 0 {
        return Err(Error::BadSize("lambda_matrix needs N >= 1".into()));
    }
    let g = sl(n + 1)?;
    g.from_matrix(&TodaChain::standard(n)?.lax_matrix())
}

/// Lax matrix of a chain as an element of `algebra` (`sl(N+1)` needs `Σa = 0`).
pub fn lax_from_flaschka(chain: &TodaChain, algebra: &Arc<LieAlgebra>) -> Result<AlgebraElement> {
    if algebra.matrix_size() != chain.a.len() {
        return Err(Error::DimensionMismatch {
            expected: algebra.matrix_size(),
            found: chain.a.len(),
        });
    }
    algebra.from_matrix(&chain.lax_matrix())
}

/// Flaschka form of the open Toda equations.
pub fn toda_rhs(chain: &TodaChain) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (&chain.a, &chain.b);
    let n = b.len();
    let sq: Vec<f64> = b.iter().map(|x| x * x).collect();
    let mut da = vec![0.0; n + 1];
    for j in 0..=n {
        let right = if j < n { sq[j] } else { 0.0 };
        let left = if j > 0 { sq[j - 1] } else { 0.0 };
        da[j] = 2.0 * (right - left);
    }
    let db = (0..n).map(|j| b[j] * (a[j + 1] - a[j])).collect();
    (da, db)
}

/// RK4 on the Flaschka equations.
pub fn integrate_flaschka(chain: &TodaChain, config: &IntegratorConfig) -> Result<(Vec<f64>, Vec<TodaChain>)> {
    let n = chain.n();
    let f = |y: &DVector<f64>| {
        let (da, db) = toda_rhs(&TodaChain::from_vector(n, y));
        Ok(DVector::from_iterator(2 * n + 1, da.into_iter().chain(db)))
    };
    let (times, ys) = rk4_integrate(f, chain.to_vector(), config)?;
    Ok((times, ys.iter().map(|y| TodaChain::from_vector(n, y)).collect()))
}

/// `sl(N+1)` when `Σa` vanishes (to rounding), `gl(N+1)` otherwise.
pub fn toda_algebra(chain: &TodaChain) -> Result<Arc<LieAlgebra>> {
    let m = chain.a.len();
    let sum: f64 = chain.a.iter().sum();
    let scale: f64 = chain.a.iter().map(|x| x.abs()).sum();
    if sum.abs() <= 1e-13 * (1.0 + scale) {
        sl(m)
    } else {
        gl(m)
    }
}

/// Open Toda as `dL/dt = [L, R₊L]` with the skew/upper split of `algebra`.
pub fn open_toda_lax(algebra: &Arc<LieAlgebra>) -> Result<LaxSystem> {
    Ok(LaxSystem::new(
        REndomorphism::skew_upper_split(algebra)?,
        PolynomialObservable::trace_power(1),
        Side::Plus,
    ))
}

/// Open Toda as `dL/dt = [R₊∇H(L), L]`, `H = tr L²`, with the triangular split.
pub fn cartan_toda_lax(algebra: &Arc<LieAlgebra>) -> Result<LaxSystem> {
    Ok(LaxSystem::new(
        REndomorphism::cartan(algebra)?,
        PolynomialObservable::scaled_trace_power(1, 2.0),
        Side::Plus,
    )
    .with_orientation(LaxOrientation::MMinusL))
}

/// [`open_toda_lax`] on `sl(N+1)`.
pub fn open_toda_system(n: usize) -> Result<LaxSystem> {
    open_toda_lax(&sl(n + 1)?)
}

/// [`cartan_toda_lax`] on `sl(N+1)`.
pub fn cartan_toda_system(n: usize) -> Result<LaxSystem> {
    cartan_toda_lax(&sl(n + 1)?)
}

/// `R₊ = P₊ + P₀/2` or `R₋ = −(P₋ + P₀/2)` for the triangular decomposition.
pub fn cartan_r_action(x: &AlgebraElement, side: Side) -> Result<AlgebraElement> {
    let r = REndomorphism::cartan(x.algebra())?;
    Ok(x.with_coeffs(r.side_matrix(side) * x.coeffs()))
}

/// Group data `W₊ = I + ω⁺`, `W₋ = I + ω⁻`, `Y = diag(η)` of the Cartan
/// parametrisation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CartanCoordinates {
    pub eta: Vec<f64>,
    /// Strictly upper triangular part of `W₊`.
    pub omega_plus: Vec<Vec<f64>>,
    /// Strictly lower triangular part of `W₋`.
    pub omega_minus: Vec<Vec<f64>>,
}

impl CartanCoordinates {
    pub fn new(eta: Vec<f64>, omega_plus: DMatrix<f64>, omega_minus: DMatrix<f64>) -> Result<Self> {
        let m = eta.len();
        if m < 2 {
            return Err(Error::BadSize("need at least two sites".into()));
        }
        if omega_plus.shape() != (m, m) || omega_minus.shape() != (m, m) {
            return Err(Error::LengthMismatch(format!("omega blocks must be {m}x{m}")));
        }
        let coords = Self {
            eta,
            omega_plus: rows(&omega_plus.upper_triangle()),
            omega_minus: rows(&omega_minus.lower_triangle()),
        };
        coords.validate()?;
        Ok(coords)
    }

    /// Identity group data (`W± = I`, `Y = I`).
    pub fn identity(n: usize) -> Self {
        let m = n + 1;
        Self {
            eta: vec![1.0; m],
            omega_plus: vec![vec![0.0; m]; m],
            omega_minus: vec![vec![0.0; m]; m],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.eta.iter().any(|&e| e.is_nan() || e <= 0.0) {
            return Err(Error::NonPositiveEta);
        }
        let det: f64 = self.eta.iter().product();
        if (det - 1.0).abs() > 1e-12 {
            return Err(Error::Input(format!("det Y = {det}, expected 1")));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.eta.len() - 1
    }

    pub fn w_plus(&self) -> DMatrix<f64> {
        let m = self.eta.len();
        DMatrix::from_fn(m, m, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => self.omega_plus[i][j],
            std::cmp::Ordering::Greater => 0.0,
        })
    }

    pub fn w_minus(&self) -> DMatrix<f64> {
        let m = self.eta.len();
        DMatrix::from_fn(m, m, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Greater => self.omega_minus[i][j],
            std::cmp::Ordering::Less => 0.0,
        })
    }

    pub fn y(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.eta))
    }

    /// `w_i = (ω⁺_{i,i+1} − ω⁻_{i+1,i})/2`.
    pub fn w(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| 0.5 * (self.omega_plus[i][i + 1] - self.omega_minus[i + 1][i]))
            .collect()
    }

    /// `z_i = 2η_{i+1}/η_i`.
    pub fn z(&self) -> Vec<f64> {
        (0..self.n()).map(|i| 2.0 * self.eta[i + 1] / self.eta[i]).collect()
    }

    /// Coadjoint-orbit evaluation of `L` at `Λ`:
    /// `(P₋ + P₀/2)(W₊YΛY⁻¹W₊⁻¹) + (P₊ + P₀/2)(W₋Y⁻¹ΛYW₋⁻¹)`.
    pub fn orbit_matrix(&self) -> Result<DMatrix<f64>> {
        self.validate()?;
        let lam = TodaChain::standard(self.n())?.lax_matrix();
        let (wp, wm, y) = (self.w_plus(), self.w_minus(), self.y());
        let y_inv = DMatrix::from_diagonal(&DVector::from_iterator(y.nrows(), self.eta.iter().map(|e| 1.0 / e)));
        let inv = |m: &DMatrix<f64>| m.clone().try_inverse().ok_or(Error::Singular);
        let a = &wp * &y * &lam * &y_inv * inv(&wp)?;
        let b = &wm * &y_inv * &lam * &y * inv(&wm)?;
        let strict_lower = |m: &DMatrix<f64>| m.lower_triangle() - DMatrix::from_diagonal(&m.diagonal());
        let strict_upper = |m: &DMatrix<f64>| m.upper_triangle() - DMatrix::from_diagonal(&m.diagonal());
        Ok(strict_lower(&a)
            + strict_upper(&b)
            + DMatrix::from_diagonal(&((a.diagonal() + b.diagonal()) * 0.5)))
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Flaschka coordinates from Cartan coordinates:
/// `a_1 = w_1z_1/2`, `a_i = (w_iz_i − w_{i−1}z_{i−1})/2`, `a_{N+1} = −w_Nz_N/2`,
/// `b_i = z_i/2`.
pub fn cartan_to_flaschka(coords: &CartanCoordinates) -> Result<TodaChain> {
    coords.validate()?;
    let (w, z) = (coords.w(), coords.z());
    let n = coords.n();
    let wz: Vec<f64> = w.iter().zip(&z).map(|(w, z)| w * z).collect();
    let a = (0..=n)
        .map(|i| {
            let right = if i < n { wz[i] } else { 0.0 };
            let left = if i > 0 { wz[i - 1] } else { 0.0 };
            0.5 * (right - left)
        })
        .collect();
    let b = z.iter().map(|z| 0.5 * z).collect();
    TodaChain::new(a, b)
}

/// Periodic lattice `L = a_n S⁻¹ + b_n + S` with `n_sites` sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftLattice {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl ShiftLattice {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch(format!("bands have lengths {} and {}", a.len(), b.len())));
        }
        if a.len() < 2 {
            return Err(Error::BadPeriod(a.len()));
        }
        Ok(Self { a, b })
    }

    pub fn n_sites(&self) -> usize {
        self.a.len()
    }

    fn to_vector(&self) -> DVector<f64> {
        DVector::from_iterator(2 * self.a.len(), self.a.iter().chain(&self.b).copied())
    }

    fn from_vector(n: usize, v: &DVector<f64>) -> Self {
        Self {
            a: v.rows(0, n).iter().copied().collect(),
            b: v.rows(n, n).iter().copied().collect(),
        }
    }
}

/// Dense `Σ_k band_k S^k` for `k ∈ {−1, 0, 1}` on `n` periodic sites;
/// `(S f)_j = f_{j+1}`. Overlapping bands (`n = 2`) add.
pub fn band_matrix(lower: &[f64], diag: &[f64], upper: &[f64]) -> DMatrix<f64> {
    let n = diag.len();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        m[(j, (j + n - 1) % n)] += lower[j];
        m[(j, j)] += diag[j];
        m[(j, (j + 1) % n)] += upper[j];
    }
    m
}

pub fn bm_lax_matrix(lattice: &ShiftLattice) -> DMatrix<f64> {
    band_matrix(&lattice.a, &lattice.b, &vec![1.0; lattice.n_sites()])
}

/// `dL/dt = [b_n + S, L]`: `ȧ_n = a_n(b_n − b_{n−1})`, `ḃ_n = a_{n+1} − a_n`.
pub fn bm_rhs(lattice: &ShiftLattice) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (&lattice.a, &lattice.b);
    let n = a.len();
    let da = (0..n).map(|j| a[j] * (b[j] - b[(j + n - 1) % n])).collect();
    let db = (0..n).map(|j| a[(j + 1) % n] - a[j]).collect();
    (da, db)
}

pub fn integrate_bm(lattice: &ShiftLattice, config: &IntegratorConfig) -> Result<(Vec<f64>, Vec<ShiftLattice>)> {
    let n = lattice.n_sites();
    let f = |y: &DVector<f64>| {
        let (da, db) = bm_rhs(&ShiftLattice::from_vector(n, y));
        Ok(DVector::from_iterator(2 * n, da.into_iter().chain(db)))
    };
    let (times, ys) = rk4_integrate(f, lattice.to_vector(), config)?;
    Ok((times, ys.iter().map(|y| ShiftLattice::from_vector(n, y)).collect()))
}

/// Whether `g_{≥k}` and `g_{<k}` are both closed under the commutator of
/// shift operators: `2k ≥ k` and `2k − 2 < k`.
pub fn subalgebra_admissibility(k: i64) -> bool {
    2 * k >= k && 2 * k - 2 < k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_examples() {
        let l1 = lambda_matrix(1).unwrap().matrix();
        assert_eq!(l1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let l2 = lambda_matrix(2).unwrap().matrix();
        let mut e: Vec<f64> = l2.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        let s = 2f64.sqrt();
        for (x, y) in e.iter().zip([-s, 0.0, s]) {
            assert!((x - y).abs() < 1e-14);
        }
        for n in 1..6 {
            assert_eq!(lambda_matrix(n).unwrap().matrix().trace(), 0.0);
        }
        assert!(matches!(lambda_matrix(0), Err(Error::BadSize(_))));
    }

    #[test]
    fn flaschka_matrix_round_trip() {
        let c = TodaChain::new(vec![1.0, -1.0], vec![2.0]).unwrap();
        assert_eq!(c.lax_matrix(), DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -1.0]));
        assert_eq!(TodaChain::from_lax_matrix(&c.lax_matrix()).unwrap(), c);
        let std = TodaChain::standard(3).unwrap();
        assert!((std.lax_matrix() - lambda_matrix(3).unwrap().matrix()).amax() < 1e-14);
        assert!(TodaChain::new(vec![0.0; 3], vec![1.0]).is_err());
        let off = TodaChain::new(vec![1.0, 2.0], vec![0.5]).unwrap();
        assert!(lax_from_flaschka(&off, &sl(2).unwrap()).is_err());
        assert!(lax_from_flaschka(&off, &gl(2).unwrap()).is_ok());
    }

    #[test]
    fn rhs_examples() {
        let (da, db) = toda_rhs(&TodaChain::standard(1).unwrap());
        assert_eq!((da, db), (vec![2.0, -2.0], vec![0.0]));
        let (da, db) = toda_rhs(&TodaChain::new(vec![0.3, -0.1, 0.5], vec![0.0, 0.0]).unwrap());
        assert!(da.iter().chain(&db).all(|&x| x == 0.0));
    }

    #[test]
    fn both_lax_forms_reproduce_flaschka() {
        let c = TodaChain::new(vec![0.4, -0.9, 0.2, 0.3], vec![1.1, -0.6, 0.8]).unwrap();
        let (da, db) = toda_rhs(&c);
        for sys in [open_toda_system(3).unwrap(), cartan_toda_system(3).unwrap()] {
            let l = lax_from_flaschka(&c, sys.algebra()).unwrap();
            let d = sys.rhs(&l).unwrap().matrix();
            for i in 0..4 {
                assert!((d[(i, i)] - da[i]).abs() < 1e-12);
            }
            for i in 0..3 {
                assert!((d[(i, i + 1)] - db[i]).abs() < 1e-12);
                assert!((d[(i + 1, i)] - db[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cartan_r_action_examples() {
        let g = sl(3).unwrap();
        let y = g.from_matrix(&DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -3.0, 2.0]))).unwrap();
        let yp = cartan_r_action(&y, Side::Plus).unwrap();
        let ym = cartan_r_action(&y, Side::Minus).unwrap();
        assert!((yp.coeffs() - y.coeffs() * 0.5).amax() < 1e-15);
        assert!((ym.coeffs() + y.coeffs() * 0.5).amax() < 1e-15);
        let mut up = DMatrix::zeros(3, 3);
        up[(0, 2)] = 1.5;
        up[(1, 2)] = -0.5;
        let w = g.from_matrix(&up).unwrap();
        assert!(cartan_r_action(&w, Side::Minus).unwrap().coeffs().amax() < 1e-15);
        assert!((cartan_r_action(&w, Side::Plus).unwrap().coeffs() - w.coeffs()).amax() < 1e-15);
        let x = g.element((0..8).map(|i| i as f64 - 3.5).collect()).unwrap();
        let diff = cartan_r_action(&x, Side::Plus).unwrap() - cartan_r_action(&x, Side::Minus).unwrap();
        assert!((diff.coeffs() - x.coeffs()).amax() < 1e-14);
    }

    #[test]
    fn cartan_coordinates_examples() {
        let c = cartan_to_flaschka(&CartanCoordinates::identity(3)).unwrap();
        assert_eq!(c, TodaChain::standard(3).unwrap());
        assert_eq!(CartanCoordinates::identity(3).orbit_matrix().unwrap(), c.lax_matrix());

        let two = CartanCoordinates::new(vec![2.0, 0.5], DMatrix::zeros(2, 2), DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(two.z(), vec![0.5]);
        assert_eq!(cartan_to_flaschka(&two).unwrap().b, vec![0.25]);

        let bad = CartanCoordinates::new(vec![-1.0, -1.0], DMatrix::zeros(2, 2), DMatrix::zeros(2, 2));
        assert!(matches!(bad, Err(Error::NonPositiveEta)));
    }

    #[test]
    fn cartan_formulas_match_orbit_evaluation() {
        let eta = vec![1.3, 0.6, 1.0 / (1.3 * 0.6)];
        let wp = DMatrix::from_row_slice(3, 3, &[0.0, 0.4, -0.7, 0.0, 0.0, 1.2, 0.0, 0.0, 0.0]);
        let wm = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, -0.3, 0.0, 0.0, 0.9, 0.25, 0.0]);
        let coords = CartanCoordinates::new(eta, wp, wm).unwrap();
        let chain = cartan_to_flaschka(&coords).unwrap();
        assert!(chain.a.iter().sum::<f64>().abs() < 1e-15);
        let oracle = coords.orbit_matrix().unwrap();
        assert!((oracle - chain.lax_matrix()).amax() < 1e-12);
    }

    #[test]
    fn shift_lattice_examples() {
        let zero_a = ShiftLattice::new(vec![0.0; 3], vec![0.5; 3]).unwrap();
        let m = bm_lax_matrix(&zero_a);
        assert_eq!(m[(2, 0)], 1.0);
        assert_eq!(m[(0, 2)], 0.0);
        let (da, db) = bm_rhs(&zero_a);
        assert!(da.iter().chain(&db).all(|&x| x == 0.0));

        let lat = ShiftLattice::new(vec![0.7, -0.2, 1.1, 0.4], vec![0.3, 1.0, -0.5, 2.0]).unwrap();
        assert!((bm_lax_matrix(&lat).trace() - lat.b.iter().sum::<f64>()).abs() < 1e-15);
        let (_, db) = bm_rhs(&lat);
        assert!(db.iter().sum::<f64>().abs() < 1e-15);

        assert!(matches!(ShiftLattice::new(vec![1.0], vec![1.0]), Err(Error::BadPeriod(1))));
    }

    #[test]
    fn admissible_shift_subalgebras() {
        assert!(subalgebra_admissibility(0));
        assert!(subalgebra_admissibility(1));
        assert!(!subalgebra_admissibility(2));
        assert!(!subalgebra_admissibility(-1));
    }
}
