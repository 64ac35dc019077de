use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DMatrix;
use rmatrix::bialgebra::TensorR;
use rmatrix::dialgebra::REndomorphism;
use rmatrix::liealg::{AlgebraSpec, LieAlgebra};
use rmatrix::Tolerances;
use serde::Deserialize;

use crate::CliError;

/// Any of the accepted r-matrix file layouts.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RMatrixFile {
    Split {
        g_plus: Vec<usize>,
        g_minus: Vec<usize>,
        #[serde(default)]
        algebra: Option<PathBuf>,
    },
    Matrix {
        entries: Vec<Vec<f64>>,
        #[serde(default)]
        algebra: Option<PathBuf>,
    },
    SkewUpper {
        #[serde(default)]
        algebra: Option<PathBuf>,
    },
    Cartan {
        #[serde(default)]
        algebra: Option<PathBuf>,
    },
    Tensor {
        coeffs: Vec<Vec<f64>>,
        #[serde(default)]
        algebra: Option<PathBuf>,
    },
}

impl RMatrixFile {
    fn algebra(&self) -> Option<&PathBuf> {
        match self {
            Self::Split { algebra, .. }
            | Self::Matrix { algebra, .. }
            | Self::SkewUpper { algebra }
            | Self::Cartan { algebra }
            | Self::Tensor { algebra, .. } => algebra.as_ref(),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Read(path.to_path_buf(), e))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Parse(path.to_path_buf(), e))
}

pub fn load_algebra(path: &Path, scale: f64) -> Result<Arc<LieAlgebra>, CliError> {
    let spec: AlgebraSpec = parse(path)?;
    Ok(spec.build_with(Tolerances::default().scaled(scale))?)
}

pub fn load_r_file(path: &Path) -> Result<RMatrixFile, CliError> {
    parse(path)
}

/// The algebra named on the command line, or else the one referenced by the
/// r-matrix file (relative to that file).
pub fn resolve_algebra(
    explicit: Option<&Path>,
    r_path: &Path,
    file: &RMatrixFile,
    scale: f64,
) -> Result<Arc<LieAlgebra>, CliError> {
    let path = match (explicit, file.algebra()) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(rel)) => r_path.parent().unwrap_or(Path::new(".")).join(rel),
        (None, None) => {
            return Err(CliError::Usage(format!(
                "{} does not name an algebra; pass --algebra",
                r_path.display()
            )))
        }
    };
    load_algebra(&path, scale)
}

fn square(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Usage(format!("{what} must be a non-empty square array")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn build_endomorphism(file: &RMatrixFile, algebra: &Arc<LieAlgebra>) -> Result<REndomorphism, CliError> {
    Ok(match file {
        RMatrixFile::Split { g_plus, g_minus, .. } => REndomorphism::from_split(algebra, g_plus, g_minus)?,
        RMatrixFile::Matrix { entries, .. } => REndomorphism::from_matrix(algebra, square(entries, "entries")?)?,
        RMatrixFile::SkewUpper { .. } => REndomorphism::skew_upper_split(algebra)?,
        RMatrixFile::Cartan { .. } => REndomorphism::cartan(algebra)?,
        RMatrixFile::Tensor { .. } => {
            return Err(CliError::Usage(
                "tensor r-matrices are checked with verify-bialgebra".into(),
            ))
        }
    })
}

pub fn build_tensor(file: &RMatrixFile, algebra: &Arc<LieAlgebra>) -> Result<TensorR, CliError> {
    match file {
        RMatrixFile::Tensor { coeffs, .. } => Ok(TensorR::new(algebra, square(coeffs, "coeffs")?)?),
        _ => Err(CliError::Usage("verify-bialgebra expects a tensor r-matrix".into())),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Bare(Vec<Vec<f64>>),
    Rows { rows: Vec<Vec<f64>> },
}

pub fn load_matrix(path: &Path) -> Result<DMatrix<f64>, CliError> {
    let rows = match parse::<MatrixFile>(path)? {
        MatrixFile::Bare(r) | MatrixFile::Rows { rows: r } => r,
    };
    square(&rows, "matrix")
}

pub fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}
