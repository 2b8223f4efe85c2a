use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{is_controllable, max_real_eig, TOL_HURWITZ};
use crate::{Error, Result};

/// Continuous-time LTI plant `x' = A x + B w`, `z = C x + D w`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateSpaceJson {
    #[serde(rename = "A")]
    a: Option<Vec<Vec<f64>>>,
    #[serde(rename = "B")]
    b: Option<Vec<Vec<f64>>>,
    #[serde(rename = "C")]
    c: Option<Vec<Vec<f64>>>,
    #[serde(rename = "D")]
    d: Option<Vec<Vec<f64>>>,
}

impl StateSpace {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::dims(format!(
                "A must be square and non-empty, got {}x{}",
                n,
                a.ncols()
            )));
        }
        if b.nrows() != n || b.ncols() == 0 {
            return Err(Error::dims(format!(
                "B must be {n}x n_w with n_w >= 1, got {}x{}",
                b.nrows(),
                b.ncols()
            )));
        }
        if c.ncols() != n || c.nrows() == 0 {
            return Err(Error::dims(format!(
                "C must be n_z x{n} with n_z >= 1, got {}x{}",
                c.nrows(),
                c.ncols()
            )));
        }
        if d.nrows() != c.nrows() || d.ncols() != b.ncols() {
            return Err(Error::dims(format!(
                "D must be {}x{}, got {}x{}",
                c.nrows(),
                b.ncols(),
                d.nrows(),
                d.ncols()
            )));
        }
        Ok(Self { a, b, c, d })
    }

    /// Builds a system from row-major slices.
    pub fn from_rows(a: &[&[f64]], b: &[&[f64]], c: &[&[f64]], d: &[&[f64]]) -> Result<Self> {
        Self::new(
            rows_to_matrix(a),
            rows_to_matrix(b),
            rows_to_matrix(c),
            rows_to_matrix(d),
        )
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_w(&self) -> usize {
        self.b.ncols()
    }

    pub fn n_z(&self) -> usize {
        self.c.nrows()
    }

    pub fn max_real_eig(&self) -> Result<f64> {
        max_real_eig(&self.a)
    }

    pub fn ensure_hurwitz(&self) -> Result<f64> {
        let lambda = self.max_real_eig()?;
        if lambda >= -TOL_HURWITZ {
            return Err(Error::NotHurwitz {
                max_real_eig: lambda,
            });
        }
        Ok(lambda)
    }

    /// Checks the standing assumptions of the analysis: Hurwitz `A` and
    /// controllable `(A, B)`.
    pub fn validate_for_analysis(&self) -> Result<()> {
        self.ensure_hurwitz()?;
        if !is_controllable(&self.a, &self.b) {
            return Err(Error::NotControllable);
        }
        Ok(())
    }

    /// Same plant with output map scaled: `(C, D) -> (k C, k D)`.
    pub fn scale_output(&self, k: f64) -> Self {
        Self {
            a: self.a.clone(),
            b: self.b.clone(),
            c: &self.c * k,
            d: &self.d * k,
        }
    }

    /// State similarity `x = T x~`: `(T^-1 A T, T^-1 B, C T, D)`.
    pub fn similarity(&self, t: &DMatrix<f64>) -> Result<Self> {
        let t_inv = t
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Solver("similarity transform is singular".into()))?;
        Self::new(
            &t_inv * &self.a * t,
            &t_inv * &self.b,
            &self.c * t,
            self.d.clone(),
        )
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: StateSpaceJson =
            serde_json::from_str(text).map_err(|e| Error::schema("<document>", e.to_string()))?;
        let a = json_matrix("A", raw.a)?;
        let b = json_matrix("B", raw.b)?;
        let c = json_matrix("C", raw.c)?;
        let d = json_matrix("D", raw.d)?;
        Self::new(a, b, c, d)
    }

    pub fn to_json_string(&self) -> String {
        let raw = StateSpaceJson {
            a: Some(matrix_rows(&self.a)),
            b: Some(matrix_rows(&self.b)),
            c: Some(matrix_rows(&self.c)),
            d: Some(matrix_rows(&self.d)),
        };
        serde_json::to_string_pretty(&raw).expect("finite matrices serialize")
    }

    pub fn read_json(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}

fn rows_to_matrix(rows: &[&[f64]]) -> DMatrix<f64> {
    let ncols = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

fn json_matrix(field: &str, rows: Option<Vec<Vec<f64>>>) -> Result<DMatrix<f64>> {
    let rows = rows.ok_or_else(|| Error::schema(field, "missing"))?;
    if rows.is_empty() {
        return Err(Error::schema(field, "matrix has no rows"));
    }
    let ncols = rows[0].len();
    if ncols == 0 {
        return Err(Error::schema(field, "matrix has no columns"));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::schema(
            field,
            format!("row {i} has {} entries, expected {ncols}", rows[i].len()),
        ));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::schema(field, "entries must be finite"));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}
