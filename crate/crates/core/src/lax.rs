//! Fixed-step RK4 integration of Lax equations and invariant monitoring.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dialgebra::{lie_poisson_r, m_matrix, REndomorphism, Side};
use crate::liealg::{AlgebraElement, LieAlgebra, PolynomialObservable};
use crate::{Error, Result};

/// Sign convention of the Lax equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaxOrientation {
    /// `dL/dt = [L, M]`; with the skew/upper split and `H₁ = ½ tr L²` this
    /// gives the open Toda chain in Flaschka variables.
    #[default]
    LMinusM,
    /// `dL/dt = [M, L]`.
    MMinusL,
}

/// `dL/dt = ±[L, R_side ∇H(L)]`.
#[derive(Debug, Clone)]
pub struct LaxSystem {
    pub r: REndomorphism,
    pub h: PolynomialObservable,
    pub side: Side,
    pub orientation: LaxOrientation,
}

impl LaxSystem {
    pub fn new(r: REndomorphism, h: PolynomialObservable, side: Side) -> Self {
        Self {
            r,
            h,
            side,
            orientation: LaxOrientation::default(),
        }
    }

    pub fn with_orientation(mut self, orientation: LaxOrientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn algebra(&self) -> &std::sync::Arc<LieAlgebra> {
        self.r.algebra()
    }

    pub fn rhs(&self, l: &AlgebraElement) -> Result<AlgebraElement> {
        let lm = lax_rhs(&self.r, &self.h, l, self.side)?;
        Ok(match self.orientation {
            LaxOrientation::LMinusM => lm,
            LaxOrientation::MMinusL => -&lm,
        })
    }
}

/// `[L, M]` with `M = m_matrix(R, H, L, side)`.
pub fn lax_rhs(
    r: &REndomorphism,
    h: &PolynomialObservable,
    l: &AlgebraElement,
    side: Side,
) -> Result<AlgebraElement> {
    let m = m_matrix(r, h, l, side)?;
    l.bracket(&m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            record_every: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            record_every: 1,
        }
    }

    pub fn record_every(mut self, k: usize) -> Self {
        self.record_every = k;
        self
    }

    /// Number of steps and the step actually taken; the step is shrunk
    /// slightly when `t_end` is not a multiple of `dt`.
    pub fn steps(&self) -> Result<(usize, f64)> {
        if self.dt.is_nan() || self.dt < 1e-12 {
            return Err(Error::StepUnderflow { dt: self.dt });
        }
        if !self.t_end.is_finite() || self.t_end < 0.0 {
            return Err(Error::InvalidConfig(format!("t_end = {} must be finite and >= 0", self.t_end)));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be positive".into()));
        }
        let n = (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize;
        let h = if n == 0 { self.dt } else { self.t_end / n as f64 };
        Ok((n, h))
    }
}

/// One classical RK4 step.
pub fn rk4_step<F>(f: &F, y: &DVector<f64>, h: f64) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let k1 = f(y)?;
    let k2 = f(&(y + &k1 * (h / 2.0)))?;
    let k3 = f(&(y + &k2 * (h / 2.0)))?;
    let k4 = f(&(y + &k3 * h))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// RK4 on an arbitrary vector field, recording `(t, y)` every
/// `record_every` steps and at the final time.
pub fn rk4_integrate<F>(f: F, y0: DVector<f64>, config: &IntegratorConfig) -> Result<(Vec<f64>, Vec<DVector<f64>>)>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let (n, h) = config.steps()?;
    let mut times = vec![0.0];
    let mut states = vec![y0.clone()];
    let mut y = y0;
    for step in 1..=n {
        y = rk4_step(&f, &y, h)?;
        if step % config.record_every == 0 || step == n {
            times.push(step as f64 * h);
            states.push(y.clone());
        }
    }
    Ok((times, states))
}

/// Time-sampled Lax matrices with the Casimirs and sorted spectrum at each
/// recorded time.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<AlgebraElement>,
    /// `hamiltonians[t][ℓ-1] = tr(L^{ℓ+1})/(ℓ+1)` for `ℓ = 1..m-1`.
    pub hamiltonians: Vec<Vec<f64>>,
    pub eigenvalues: Vec<Vec<Complex<f64>>>,
}

impl Trajectory {
    pub fn from_states(times: Vec<f64>, states: Vec<AlgebraElement>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        let m = states[0].algebra().matrix_size();
        let casimirs: Vec<_> = (1..m.max(2) as u32)
            .map(PolynomialObservable::trace_power)
            .collect();
        let mut hamiltonians = Vec::with_capacity(states.len());
        let mut eigenvalues = Vec::with_capacity(states.len());
        for s in &states {
            hamiltonians.push(
                casimirs
                    .iter()
                    .map(|h| h.evaluate(s))
                    .collect::<Result<Vec<_>>>()?,
            );
            eigenvalues.push(sorted_spectrum(&s.matrix()));
        }
        Ok(Self {
            times,
            states,
            hamiltonians,
            eigenvalues,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&AlgebraElement> {
        self.states.last()
    }
}

/// Eigenvalues sorted by real then imaginary part. Symmetric input uses the
/// symmetric solver.
pub fn sorted_spectrum(m: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let symmetric = (m - m.transpose()).amax() <= 1e-13 * m.amax().max(1.0);
    let mut eig: Vec<Complex<f64>> = if symmetric {
        m.clone()
            .symmetric_eigenvalues()
            .iter()
            .map(|&x| Complex::new(x, 0.0))
            .collect()
    } else {
        m.clone().complex_eigenvalues().iter().copied().collect()
    };
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    eig
}

/// Integrate `dL/dt = F(L)` from `l0` with RK4.
pub fn integrate_with<F>(l0: &AlgebraElement, config: &IntegratorConfig, rhs: F) -> Result<Trajectory>
where
    F: Fn(&AlgebraElement) -> Result<AlgebraElement>,
{
    let f = |y: &DVector<f64>| rhs(&l0.with_coeffs(y.clone())).map(|d| d.into_coeffs());
    let (times, ys) = rk4_integrate(f, l0.coeffs().clone(), config)?;
    let states = ys.into_iter().map(|y| l0.with_coeffs(y)).collect();
    Trajectory::from_states(times, states)
}

pub fn integrate(system: &LaxSystem, l0: &AlgebraElement, config: &IntegratorConfig) -> Result<Trajectory> {
    integrate_with(l0, config, |l| system.rhs(l))
}

/// Largest deviation of each invariant from its initial value.
#[derive(Debug, Clone, Serialize)]
pub struct ConservationReport {
    pub hamiltonian_drift: Vec<f64>,
    pub eigenvalue_drift: Vec<f64>,
}

impl ConservationReport {
    pub fn max_hamiltonian_drift(&self) -> f64 {
        self.hamiltonian_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_eigenvalue_drift(&self) -> f64 {
        self.eigenvalue_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max_hamiltonian_drift() <= tol && self.max_eigenvalue_drift() <= tol
    }
}

pub fn conservation_report(traj: &Trajectory) -> Result<ConservationReport> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let h0 = &traj.hamiltonians[0];
    let e0 = &traj.eigenvalues[0];
    let mut hd = vec![0.0f64; h0.len()];
    let mut ed = vec![0.0f64; e0.len()];
    for (h, e) in traj.hamiltonians.iter().zip(&traj.eigenvalues) {
        for (k, v) in h.iter().enumerate() {
            hd[k] = hd[k].max((v - h0[k]).abs());
        }
        for (k, v) in e.iter().enumerate() {
            ed[k] = ed[k].max((v - e0[k]).norm());
        }
    }
    Ok(ConservationReport {
        hamiltonian_drift: hd,
        eigenvalue_drift: ed,
    })
}

/// Random traceless symmetric tridiagonal state in an algebra of matrices.
pub fn random_tridiagonal<R: Rng>(algebra: &std::sync::Arc<LieAlgebra>, rng: &mut R) -> Result<AlgebraElement> {
    let m = algebra.matrix_size();
    let mut l = DMatrix::zeros(m, m);
    for i in 0..m {
        l[(i, i)] = rng.gen_range(-1.0..1.0);
    }
    let shift = l.trace() / m as f64;
    for i in 0..m {
        l[(i, i)] -= shift;
    }
    for i in 0..m - 1 {
        let b = rng.gen_range(-1.5..1.5);
        l[(i, i + 1)] = b;
        l[(i + 1, i)] = b;
    }
    algebra.from_matrix(&l)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InvolutionReport {
    pub max_abs: f64,
    pub worst_pair: (usize, usize),
    pub samples: usize,
}

/// `max |{H_i, H_j}_R(L)|` over all pairs `i < j` and `samples` random
/// tridiagonal states.
pub fn involution_scan<R: Rng>(
    r: &REndomorphism,
    hamiltonians: &[PolynomialObservable],
    samples: usize,
    rng: &mut R,
) -> Result<InvolutionReport> {
    if hamiltonians.len() < 2 {
        return Err(Error::Input("involution scan needs at least two observables".into()));
    }
    let mut report = InvolutionReport {
        max_abs: 0.0,
        worst_pair: (0, 1),
        samples,
    };
    for _ in 0..samples {
        let l = random_tridiagonal(r.algebra(), rng)?;
        for i in 0..hamiltonians.len() {
            for j in (i + 1)..hamiltonians.len() {
                let v = lie_poisson_r(r, &hamiltonians[i], &hamiltonians[j], &l)?.abs();
                if v > report.max_abs {
                    report.max_abs = v;
                    report.worst_pair = (i, j);
                }
            }
        }
    }
    Ok(report)
}
