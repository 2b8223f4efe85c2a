//! Backend-neutral conic problem encoding.
//!
//! A problem is a linear objective over a real variable vector `x` and a list
//! of blocks, each an affine function `F_b(x) = F_b0 + sum_j x_j F_bj`
//! constrained to a cone:
//!
//! - `Psd`: `F_b(x)` is a symmetric `dim x dim` matrix, stored by its upper
//!   triangle (`row <= col`), required positive semidefinite;
//! - `Nonnegative`: `F_b(x)` is a `dim` vector (`col = 0`), required `>= 0`;
//! - `Zero`: `F_b(x)` is a `dim` vector required to vanish.
//!
//! The text dump writes one line per nonzero coefficient as
//! `block row col var coef`, where block `0` is the objective (`row = col = 0`)
//! and `var = -1` marks the constant term `F_b0`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::linsys::min_sym_eig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeKind {
    Psd,
    Nonnegative,
    Zero,
}

impl ConeKind {
    fn tag(self) -> &'static str {
        match self {
            ConeKind::Psd => "psd",
            ConeKind::Nonnegative => "nonneg",
            ConeKind::Zero => "zero",
        }
    }

    fn parse(tag: &str) -> Option<Self> {
        match tag {
            "psd" => Some(ConeKind::Psd),
            "nonneg" => Some(ConeKind::Nonnegative),
            "zero" => Some(ConeKind::Zero),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineBlock {
    pub name: String,
    pub cone: ConeKind,
    pub dim: usize,
    /// `(row, col) -> value` of `F_b0`.
    pub constant: BTreeMap<(usize, usize), f64>,
    /// `(var, row, col) -> coefficient`.
    pub terms: BTreeMap<(usize, usize, usize), f64>,
}

impl AffineBlock {
    pub fn new(name: impl Into<String>, cone: ConeKind, dim: usize) -> Self {
        Self {
            name: name.into(),
            cone,
            dim,
            constant: BTreeMap::new(),
            terms: BTreeMap::new(),
        }
    }

    /// Number of scalar rows once vectorised.
    pub fn rows(&self) -> usize {
        match self.cone {
            ConeKind::Psd => self.dim * (self.dim + 1) / 2,
            _ => self.dim,
        }
    }

    fn key(&self, row: usize, col: usize) -> (usize, usize) {
        match self.cone {
            ConeKind::Psd => (row.min(col), row.max(col)),
            _ => {
                debug_assert_eq!(col, 0, "vector blocks use col = 0");
                (row, 0)
            }
        }
    }

    /// Adds `value` to the constant entry `(row, col)`; for PSD blocks the
    /// entry is symmetric, so `(row, col)` and `(col, row)` are the same slot.
    pub fn add_constant(&mut self, row: usize, col: usize, value: f64) {
        if value != 0.0 {
            *self.constant.entry(self.key(row, col)).or_insert(0.0) += value;
        }
    }

    pub fn add_term(&mut self, var: usize, row: usize, col: usize, coef: f64) {
        if coef != 0.0 {
            let (r, c) = self.key(row, col);
            *self.terms.entry((var, r, c)).or_insert(0.0) += coef;
        }
    }

    /// `F_b(x)`: a symmetric matrix for PSD blocks, a column otherwise.
    pub fn evaluate(&self, x: &[f64]) -> DMatrix<f64> {
        let mut out = match self.cone {
            ConeKind::Psd => DMatrix::zeros(self.dim, self.dim),
            _ => DMatrix::zeros(self.dim, 1),
        };
        let mut put = |r: usize, c: usize, v: f64| {
            out[(r, c)] += v;
            if self.cone == ConeKind::Psd && r != c {
                out[(c, r)] += v;
            }
        };
        for (&(r, c), &v) in &self.constant {
            put(r, c, v);
        }
        for (&(j, r, c), &v) in &self.terms {
            put(r, c, v * x[j]);
        }
        out
    }

    /// Distance-like violation of the cone constraint at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.violation_with_margin(x, 0.0)
    }

    /// Violation of `F_b(x) - margin * I` (PSD) or `F_b(x) - margin` (vector).
    pub fn violation_with_margin(&self, x: &[f64], margin: f64) -> f64 {
        let f = self.evaluate(x);
        match self.cone {
            ConeKind::Psd => (margin - min_sym_eig(&f)).max(0.0),
            ConeKind::Nonnegative => (margin - f.min()).max(0.0),
            ConeKind::Zero => f.abs().max(),
        }
    }

    /// `<Z, F_bj>` for every variable `j` (length `num_vars`).
    pub(crate) fn adjoint(&self, z: &DMatrix<f64>, num_vars: usize) -> DVector<f64> {
        let mut g = DVector::zeros(num_vars);
        for (&(j, r, c), &v) in &self.terms {
            let w = if self.cone == ConeKind::Psd && r != c {
                2.0
            } else {
                1.0
            };
            g[j] += w * v * z[(r, c)];
        }
        g
    }

    /// `<Z, F_b0>`.
    pub(crate) fn constant_inner(&self, z: &DMatrix<f64>) -> f64 {
        self.constant
            .iter()
            .map(|(&(r, c), &v)| {
                let w = if self.cone == ConeKind::Psd && r != c {
                    2.0
                } else {
                    1.0
                };
                w * v * z[(r, c)]
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeProblem {
    pub sense: Sense,
    /// Strict-feasibility margin applied to every PSD and nonnegative block.
    pub margin: f64,
    pub objective: Vec<f64>,
    pub blocks: Vec<AffineBlock>,
}

impl ConeProblem {
    pub fn new(sense: Sense, num_vars: usize) -> Self {
        Self {
            sense,
            margin: 0.0,
            objective: vec![0.0; num_vars],
            blocks: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn block(&self, name: &str) -> Option<&AffineBlock> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest cone violation over all blocks at `x`.
    pub fn primal_violation(&self, x: &[f64]) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.violation_with_margin(x, self.margin))
            .fold(0.0, f64::max)
    }

    /// Checks finiteness and index ranges.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.objective.iter().any(|v| !v.is_finite())
            || !self.margin.is_finite()
            || self.margin < 0.0
        {
            return Err(Error::Solver("objective has non-finite entries".into()));
        }
        for b in &self.blocks {
            let bad = |r: usize, c: usize| match b.cone {
                ConeKind::Psd => r > c || c >= b.dim,
                _ => c != 0 || r >= b.dim,
            };
            if b.constant
                .iter()
                .any(|(&(r, c), v)| bad(r, c) || !v.is_finite())
                || b.terms
                    .iter()
                    .any(|(&(j, r, c), v)| j >= n || bad(r, c) || !v.is_finite())
            {
                return Err(Error::Solver(format!(
                    "block `{}` has malformed entries",
                    b.name
                )));
            }
        }
        Ok(())
    }

    /// Sparse text dump (see module docs).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let sense = match self.sense {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        };
        let _ = writeln!(out, "# l2plus conic problem v1");
        let _ = writeln!(out, "# sense {sense}");
        let _ = writeln!(out, "# vars {}", self.num_vars());
        if self.margin != 0.0 {
            let _ = writeln!(out, "# margin {:e}", self.margin);
        }
        for (k, b) in self.blocks.iter().enumerate() {
            let _ = writeln!(
                out,
                "# block {} {} {} {}",
                k + 1,
                b.cone.tag(),
                b.dim,
                b.name
            );
        }
        let _ = writeln!(out, "# entries: block row col var coef");
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                let _ = writeln!(out, "0 0 0 {j} {c:e}");
            }
        }
        for (k, b) in self.blocks.iter().enumerate() {
            for (&(r, c), &v) in &b.constant {
                let _ = writeln!(out, "{} {r} {c} -1 {v:e}", k + 1);
            }
            for (&(j, r, c), &v) in &b.terms {
                let _ = writeln!(out, "{} {r} {c} {j} {v:e}", k + 1);
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| {
            Error::Solver(format!("problem dump line {}: {msg}", line + 1))
        };
        let mut sense = None;
        let mut nvars = None;
        let mut margin = 0.0;
        let mut blocks: Vec<AffineBlock> = Vec::new();
        let mut entries = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let f: Vec<&str> = rest.split_whitespace().collect();
                match f.as_slice() {
                    ["sense", "minimize"] => sense = Some(Sense::Minimize),
                    ["sense", "maximize"] => sense = Some(Sense::Maximize),
                    ["margin", v] => margin = v.parse::<f64>().map_err(|_| bad(ln, "margin"))?,
                    ["vars", v] => nvars = Some(v.parse::<usize>().map_err(|_| bad(ln, "vars"))?),
                    ["block", idx, kind, dim, name] => {
                        let idx: usize = idx.parse().map_err(|_| bad(ln, "block index"))?;
                        if idx != blocks.len() + 1 {
                            return Err(bad(ln, "blocks must be numbered consecutively from 1"));
                        }
                        let cone = ConeKind::parse(kind).ok_or_else(|| bad(ln, "cone kind"))?;
                        let dim = dim.parse().map_err(|_| bad(ln, "block dim"))?;
                        blocks.push(AffineBlock::new(*name, cone, dim));
                    }
                    _ => {}
                }
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 {
                return Err(bad(ln, "expected `block row col var coef`"));
            }
            let blk: usize = f[0].parse().map_err(|_| bad(ln, "block"))?;
            let row: usize = f[1].parse().map_err(|_| bad(ln, "row"))?;
            let col: usize = f[2].parse().map_err(|_| bad(ln, "col"))?;
            let var: i64 = f[3].parse().map_err(|_| bad(ln, "var"))?;
            let coef: f64 = f[4].parse().map_err(|_| bad(ln, "coef"))?;
            entries.push((ln, blk, row, col, var, coef));
        }
        let sense = sense.ok_or_else(|| Error::Solver("problem dump lacks `# sense`".into()))?;
        let nvars = nvars.ok_or_else(|| Error::Solver("problem dump lacks `# vars`".into()))?;
        let mut problem = ConeProblem::new(sense, nvars);
        problem.margin = margin;
        for (ln, blk, row, col, var, coef) in entries {
            if blk == 0 {
                let j = usize::try_from(var).map_err(|_| bad(ln, "objective needs a variable"))?;
                *problem
                    .objective
                    .get_mut(j)
                    .ok_or_else(|| bad(ln, "variable out of range"))? += coef;
                continue;
            }
            let b = blocks
                .get_mut(blk - 1)
                .ok_or_else(|| bad(ln, "unknown block"))?;
            if var < 0 {
                b.add_constant(row, col, coef);
            } else {
                b.add_term(var as usize, row, col, coef);
            }
        }
        problem.blocks = blocks;
        problem.validate()?;
        Ok(problem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ConeProblem {
        // min x0  s.t.  [[x0, 1], [1, x1]] psd,  x1 - 1 = 0,  x0 >= 0
        let mut p = ConeProblem::new(Sense::Minimize, 2);
        p.objective[0] = 1.0;
        let mut psd = AffineBlock::new("lmi", ConeKind::Psd, 2);
        psd.add_term(0, 0, 0, 1.0);
        psd.add_constant(1, 0, 1.0);
        psd.add_term(1, 1, 1, 1.0);
        let mut eq = AffineBlock::new("eq", ConeKind::Zero, 1);
        eq.add_term(1, 0, 0, 1.0);
        eq.add_constant(0, 0, -1.0);
        let mut nn = AffineBlock::new("nn", ConeKind::Nonnegative, 1);
        nn.add_term(0, 0, 0, 1.0);
        p.blocks = vec![psd, eq, nn];
        p
    }

    #[test]
    fn evaluate_and_violation() {
        let p = tiny();
        let f = p.blocks[0].evaluate(&[2.0, 3.0]);
        assert_eq!(f, DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]));
        assert_eq!(p.primal_violation(&[1.0, 1.0]), 0.0);
        assert!(p.primal_violation(&[0.5, 1.0]) > 0.0);
        assert_eq!(p.blocks[1].violation(&[0.0, 1.5]), 0.5);
    }

    #[test]
    fn text_dump_round_trip() {
        let p = tiny();
        let text = p.to_text();
        assert!(text.contains("1 0 1 -1 1e0"));
        assert_eq!(ConeProblem::from_text(&text).unwrap(), p);
        let mut q = tiny();
        q.margin = 0.25;
        assert_eq!(ConeProblem::from_text(&q.to_text()).unwrap(), q);
        assert!(q.primal_violation(&[1.0, 1.0]) > 0.0);
    }

    #[test]
    fn malformed_entries_rejected() {
        let mut p = tiny();
        p.blocks[2].terms.insert((5, 0, 0), 1.0);
        assert!(p.validate().is_err());
    }
}
