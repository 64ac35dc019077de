use nalgebra::DVector;

/// Structure constants `c^k_{ij}` of a Lie bracket, `[e_i, e_j] = c^k_{ij} e_k`.
///
/// Stored densely with `k` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    data: Vec<f64>,
}

impl StructureConstants {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    /// `c^k_{ij}`.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let idx = self.idx(i, j, k);
        self.data[idx] = value;
    }

    /// Coefficients of `[e_i, e_j]`.
    pub fn column(&self, i: usize, j: usize) -> DVector<f64> {
        let start = self.idx(i, j, 0);
        DVector::from_column_slice(&self.data[start..start + self.dim])
    }

    /// `[x, y]^k = x^i y^j c^k_{ij}`.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        let mut out = DVector::zeros(n);
        for i in 0..n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = xi * y[j];
                if w == 0.0 {
                    continue;
                }
                let start = self.idx(i, j, 0);
                for (k, c) in self.data[start..start + n].iter().enumerate() {
                    out[k] += w * c;
                }
            }
        }
        out
    }

    /// Matrix of `ad_x` acting on coefficient vectors.
    pub fn ad(&self, x: &DVector<f64>) -> nalgebra::DMatrix<f64> {
        let n = self.dim;
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    m[(k, j)] += x[i] * self.get(i, j, k);
                }
            }
        }
        m
    }

    /// Largest `|c^k_{ij} + c^k_{ji}|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.get(i, j, k) + self.get(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Largest Jacobi defect
    /// `Σ_m (c^m_{ij} c^l_{mk} + c^m_{jk} c^l_{mi} + c^m_{ki} c^l_{mj})` over all `i, j, k, l`.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = 0.0;
                        for m in 0..n {
                            acc += self.get(i, j, m) * self.get(m, k, l)
                                + self.get(j, k, m) * self.get(m, i, l)
                                + self.get(k, i, m) * self.get(m, j, l);
                        }
                        worst = worst.max(acc.abs());
                    }
                }
            }
        }
        worst
    }

    /// Nested `[i][j][k] = c^k_{ij}` table for serialisation.
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|j| self.column(i, j).iter().copied().collect()).collect())
            .collect()
    }
}
