//! Dense semidefinite programs in moment (dual) form.
//!
//! A problem asks for `y` with `S_j(y) = A_j0 + Σ_i y_i A_ji ⪰ 0` for every block,
//! `E y = e`, minimizing `c·y`. Equalities are eliminated up front; the remaining
//! conic problem is solved by a homogeneous self-dual interior-point method, which
//! needs no starting point and returns rays for infeasible instances. With a zero
//! objective the iterates stay on the central path and the limit has maximal rank.

mod hsd;
pub(crate) mod linalg;

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

pub use hsd::solve_sdp;

/// One symmetric entry; only `row ≤ col` is stored, the mirror is implied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl Entry {
    fn new(row: usize, col: usize, value: f64) -> Self {
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        Entry { row, col, value }
    }
}

/// A PSD constraint `A_0 + Σ_i y_i A_i ⪰ 0` with sparse symmetric coefficients.
#[derive(Clone, Debug, Default)]
pub struct Block {
    pub dim: usize,
    pub constant: Vec<Entry>,
    /// `(variable, entry)` pairs; repeated positions accumulate.
    pub terms: Vec<(usize, Entry)>,
}

impl Block {
    pub fn new(dim: usize) -> Self {
        Block { dim, constant: Vec::new(), terms: Vec::new() }
    }

    pub fn add_constant(&mut self, row: usize, col: usize, value: f64) {
        self.constant.push(Entry::new(row, col, value));
    }

    pub fn add_term(&mut self, var: usize, row: usize, col: usize, value: f64) {
        self.terms.push((var, Entry::new(row, col, value)));
    }

    pub fn eval(&self, y: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        let mut put = |e: &Entry, w: f64| {
            m[(e.row, e.col)] += w * e.value;
            if e.row != e.col {
                m[(e.col, e.row)] += w * e.value;
            }
        };
        for e in &self.constant {
            put(e, 1.0);
        }
        for (i, e) in &self.terms {
            put(e, y[*i]);
        }
        m
    }

    /// `⟨A_0, X⟩` and `(⟨A_i, X⟩)_i` accumulated into `grad`.
    fn pair(&self, x: &DMatrix<f64>, grad: &mut [f64]) -> f64 {
        let w = |e: &Entry| if e.row == e.col { 1.0 } else { 2.0 } * e.value * x[(e.row, e.col)];
        for (i, e) in &self.terms {
            grad[*i] += w(e);
        }
        self.constant.iter().map(w).sum()
    }
}

/// A sparse linear equality `Σ coeffs·y = rhs`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Equality {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SdpProblem {
    pub nvars: usize,
    pub blocks: Vec<Block>,
    pub equalities: Vec<Equality>,
    /// Minimized linear objective; empty means zero.
    pub objective: Vec<f64>,
}

impl SdpProblem {
    pub fn new(nvars: usize) -> Self {
        SdpProblem { nvars, ..Default::default() }
    }

    pub fn add_block(&mut self, block: Block) -> usize {
        self.blocks.push(block);
        self.blocks.len() - 1
    }

    pub fn add_equality(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        self.equalities.push(Equality { coeffs, rhs });
    }

    pub fn set_objective(&mut self, c: Vec<f64>) {
        self.objective = c;
    }

    pub fn objective_value(&self, y: &[f64]) -> f64 {
        self.objective.iter().zip(y).map(|(c, y)| c * y).sum()
    }

    pub fn validate(&self) -> crate::Result<()> {
        use crate::Error;
        use alloc::format;
        if !self.objective.is_empty() && self.objective.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: self.objective.len() });
        }
        for (j, b) in self.blocks.iter().enumerate() {
            let bad = b.constant.iter().chain(b.terms.iter().map(|t| &t.1)).any(|e| e.col >= b.dim);
            if bad || b.terms.iter().any(|t| t.0 >= self.nvars) {
                return Err(Error::InvalidInput(format!("block {} has an out-of-range entry", j)));
            }
        }
        if self.equalities.iter().flat_map(|e| &e.coeffs).any(|c| c.0 >= self.nvars) {
            return Err(Error::InvalidInput(format!("equality refers to a variable ≥ {}", self.nvars)));
        }
        Ok(())
    }

    /// Independent feasibility re-check of a candidate point.
    pub fn check(&self, y: &[f64]) -> FeasibilityReport {
        let equality_residual = self
            .equalities
            .iter()
            .map(|e| (e.coeffs.iter().map(|(i, c)| c * y[*i]).sum::<f64>() - e.rhs).abs())
            .fold(0.0, f64::max);
        let min_eigenvalues = self.blocks.iter().map(|b| linalg::min_eigenvalue(&b.eval(y))).collect();
        FeasibilityReport { equality_residual, min_eigenvalues }
    }

    /// Residual of an infeasibility certificate, recomputed from the original data.
    ///
    /// A valid certificate has PSD blocks `X_j` and multipliers `λ` with
    /// `Σ_j ⟨A_ji, X_j⟩ + (Eᵀλ)_i = 0` for every variable and
    /// `Σ_j ⟨A_j0, X_j⟩ − eᵀλ < 0`; the residual is the largest violation of the
    /// first condition relative to the magnitude of the second, or `∞`.
    pub fn certificate_residual(&self, cert: &InfeasibilityCertificate) -> f64 {
        let mut grad = vec![0.0; self.nvars];
        let mut value = 0.0;
        for (b, x) in self.blocks.iter().zip(&cert.blocks) {
            value += b.pair(x, &mut grad);
            let lmin = linalg::min_eigenvalue(x);
            if lmin < -1e-12 * x.norm().max(1.0) {
                return f64::INFINITY;
            }
        }
        for (e, l) in self.equalities.iter().zip(cert.multipliers.iter()) {
            for (i, c) in &e.coeffs {
                grad[*i] += c * l;
            }
            value -= e.rhs * l;
        }
        if !(value < 0.0) {
            return f64::INFINITY;
        }
        grad.iter().map(|g| g.abs()).fold(0.0, f64::max) / -value
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityReport {
    pub equality_residual: f64,
    pub min_eigenvalues: Vec<f64>,
}

impl FeasibilityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.equality_residual <= tol && self.min_eigenvalues.iter().all(|&l| l >= -tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    /// The objective is unbounded below on the feasible set.
    Unbounded,
    MaxIterations,
    NumericalFailure,
}

/// Farkas-type ray proving that no `y` satisfies the constraints.
#[derive(Clone, Debug)]
pub struct InfeasibilityCertificate {
    pub blocks: Vec<DMatrix<f64>>,
    pub multipliers: DVector<f64>,
    /// Residual as measured by [`SdpProblem::certificate_residual`].
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub y: Vec<f64>,
    pub objective: f64,
    pub min_eigenvalues: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
    pub certificate: Option<InfeasibilityCertificate>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpOptions {
    pub feasibility_tol: f64,
    pub gap_tol: f64,
    /// Ray residual below which infeasibility is declared.
    pub infeasibility_tol: f64,
    pub max_iterations: usize,
    /// Fraction of the distance to the boundary taken per step.
    pub step_fraction: f64,
    /// Rank deficiency threshold of the equality system, relative to its largest row.
    pub equality_rank_tol: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            feasibility_tol: 1e-8,
            gap_tol: 1e-8,
            infeasibility_tol: 1e-8,
            max_iterations: 200,
            step_fraction: 0.95,
            equality_rank_tol: 1e-10,
        }
    }
}

/// Number of eigenvalues with `|λ| > τ · max(1, |λ|_max)`.
pub fn numeric_rank(m: &DMatrix<f64>, tau: f64) -> usize {
    let eig = symmetric_eigenvalues(m);
    let lmax = eig.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let cut = tau * lmax.max(1.0);
    eig.iter().filter(|l| l.abs() > cut).count()
}

/// Eigenvalues of the symmetric part, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut s = m.clone();
    linalg::symmetrize(&mut s);
    let mut eig: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    eig
}

/// Eigenvalues ascending with matching eigenvectors as columns.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let mut s = m.clone();
    linalg::symmetrize(&mut s);
    let eig = s.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0, 1e-12]));
        assert_eq!(numeric_rank(&d, 1e-8), 1);
        assert_eq!(numeric_rank(&DMatrix::zeros(4, 4), 1e-6), 0);
    }

    proptest! {
        #[test]
        fn outer_product_has_rank_one(v in proptest::collection::vec(-3.0f64..3.0, 6)) {
            let v = DVector::from_vec(v);
            prop_assume!(v.norm() > 0.1);
            let m = &v * v.transpose();
            let (vals, vecs) = symmetric_eigen(&m);
            prop_assert!((vals[5] - v.norm_squared()).abs() < 1e-9 * v.norm_squared());
            prop_assert!((vecs.column(5).dot(&v).abs() - v.norm()).abs() < 1e-9);
            prop_assert_eq!(numeric_rank(&m, 1e-6), 1);
        }
    }
}
