//! Dense helpers shared by the interior-point solver.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

const SQRT2: f64 = core::f64::consts::SQRT_2;

/// Position of `(r, c)`, `r ≤ c`, in the packed upper triangle.
#[inline]
pub(crate) fn packed_index(r: usize, c: usize) -> usize {
    debug_assert!(r <= c);
    c * (c + 1) / 2 + r
}

pub(crate) fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Isometric packing: off-diagonal entries scaled by √2 so that
/// `svec(A)·svec(B) = ⟨A, B⟩`.
pub(crate) fn svec(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    let mut v = DVector::zeros(packed_len(n));
    for c in 0..n {
        for r in 0..c {
            v[packed_index(r, c)] = SQRT2 * 0.5 * (m[(r, c)] + m[(c, r)]);
        }
        v[packed_index(c, c)] = m[(c, c)];
    }
    v
}

pub(crate) fn smat(v: &[f64], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for c in 0..n {
        for r in 0..c {
            let x = v[packed_index(r, c)] / SQRT2;
            m[(r, c)] = x;
            m[(c, r)] = x;
        }
        m[(c, c)] = v[packed_index(c, c)];
    }
    m
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for c in 0..n {
        for r in 0..c {
            let x = 0.5 * (m[(r, c)] + m[(c, r)]);
            m[(r, c)] = x;
            m[(c, r)] = x;
        }
    }
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let mut s = m.clone();
    symmetrize(&mut s);
    s.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

pub(crate) fn lower_inverse(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut inv = DMatrix::identity(n, n);
    l.solve_lower_triangular_mut(&mut inv);
    inv
}

/// `x ← (I − β v vᵀ) x`.
fn reflect(x: &mut [f64], v: &[f64], beta: f64) {
    let dot: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
    let s = beta * dot;
    for (a, b) in x.iter_mut().zip(v) {
        *a -= s * b;
    }
}

/// Householder QR with column pivoting by remaining column norm.
///
/// Factors `A P = Q R`; used on the transposed equality matrix so that the trailing
/// columns of `Q` span its null space.
pub(crate) struct PivotedQr {
    rows: usize,
    reflectors: Vec<(DVector<f64>, f64)>,
    r: DMatrix<f64>,
    perm: Vec<usize>,
    rank: usize,
}

impl PivotedQr {
    pub(crate) fn new(mut a: DMatrix<f64>, rel_tol: f64) -> Self {
        let (m, n) = a.shape();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::new();
        let mut norms: Vec<f64> = (0..n).map(|j| a.column(j).norm_squared()).collect();
        let scale = norms.iter().copied().fold(0.0, f64::max).sqrt();
        let mut rank = 0;
        for k in 0..m.min(n) {
            let (best, best_norm) = (k..n)
                .map(|j| (j, norms[j]))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            // Downdated norms drift; recompute the winner exactly before trusting it.
            let exact = a.view((k, best), (m - k, 1)).norm();
            if exact <= rel_tol * scale || best_norm < 0.0 {
                break;
            }
            if best != k {
                a.swap_columns(k, best);
                perm.swap(k, best);
                norms.swap(k, best);
            }
            let x = a.view((k, k), (m - k, 1)).clone_owned();
            let alpha = -x[0].signum() * x.norm();
            let mut v = DVector::from_column_slice(x.as_slice());
            v[0] -= alpha;
            let vv = v.norm_squared();
            let beta = if vv > 0.0 { 2.0 / vv } else { 0.0 };
            for j in k + 1..n {
                reflect(&mut a.as_mut_slice()[j * m + k..(j + 1) * m], v.as_slice(), beta);
                let top = a[(k, j)];
                norms[j] -= top * top;
                if norms[j] < 1e-3 * exact * exact {
                    norms[j] = a.view((k + 1, j), (m - k - 1, 1)).norm_squared();
                }
            }
            a[(k, k)] = alpha;
            for i in k + 1..m {
                a[(i, k)] = 0.0;
            }
            reflectors.push((v, beta));
            rank += 1;
        }
        let r = a.rows(0, rank).clone_owned();
        PivotedQr { rows: m, reflectors, r, perm, rank }
    }

    #[cfg(test)]
    pub(crate) fn rank(&self) -> usize {
        self.rank
    }

    /// `Q x` in place.
    fn apply_q(&self, x: &mut DMatrix<f64>) {
        for (k, (v, beta)) in self.reflectors.iter().enumerate().rev() {
            let m = self.rows;
            for j in 0..x.ncols() {
                reflect(&mut x.as_mut_slice()[j * m + k..(j + 1) * m], v.as_slice(), *beta);
            }
        }
    }

    /// `Qᵀ x` in place.
    fn apply_qt(&self, x: &mut DVector<f64>) {
        for (k, (v, beta)) in self.reflectors.iter().enumerate() {
            reflect(&mut x.as_mut_slice()[k..], v.as_slice(), *beta);
        }
    }

    /// Orthonormal basis of the orthogonal complement of the column space.
    pub(crate) fn complement(&self) -> DMatrix<f64> {
        let k = self.rows - self.rank;
        let mut e = DMatrix::zeros(self.rows, k);
        for j in 0..k {
            e[(self.rank + j, j)] = 1.0;
        }
        self.apply_q(&mut e);
        e
    }

    /// Minimum-norm `y` with `Aᵀ y = rhs`, the largest residual among the dependent
    /// equations and the column attaining it.
    pub(crate) fn solve_transposed(&self, rhs: &DVector<f64>) -> (DVector<f64>, f64, Option<usize>) {
        let r = self.rank;
        let mut w = DVector::zeros(self.rows);
        for i in 0..r {
            let mut acc = rhs[self.perm[i]];
            for k in 0..i {
                acc -= self.r[(k, i)] * w[k];
            }
            w[i] = acc / self.r[(i, i)];
        }
        let mut worst: f64 = 0.0;
        let mut worst_col = None;
        for i in r..self.perm.len() {
            let mut acc = -rhs[self.perm[i]];
            for k in 0..r {
                acc += self.r[(k, i)] * w[k];
            }
            if acc.abs() > worst || worst_col.is_none() {
                worst = worst.max(acc.abs());
                worst_col = Some(self.perm[i]);
            }
        }
        let mut y = DMatrix::from_column_slice(self.rows, 1, w.as_slice());
        self.apply_q(&mut y);
        (DVector::from_column_slice(y.as_slice()), worst, worst_col)
    }

    /// Coefficients `λ` with `A λ = g` for `g` in the column space, supported on the
    /// pivot columns.
    pub(crate) fn combination(&self, g: &DVector<f64>) -> DVector<f64> {
        let r = self.rank;
        let mut t = g.clone();
        self.apply_qt(&mut t);
        let mut mu = DVector::zeros(r);
        for i in (0..r).rev() {
            let mut acc = t[i];
            for k in i + 1..r {
                acc -= self.r[(i, k)] * mu[k];
            }
            mu[i] = acc / self.r[(i, i)];
        }
        let mut lambda = DVector::zeros(self.perm.len());
        for i in 0..r {
            lambda[self.perm[i]] = mu[i];
        }
        lambda
    }

    /// Coefficients of a dependent column `j` in terms of the pivot columns:
    /// returns `λ` with `A λ ≈ 0` and `λ_j = 1`.
    pub(crate) fn dependency(&self, j: usize) -> DVector<f64> {
        let pos = self.perm.iter().position(|&p| p == j).expect("column index");
        let r = self.rank;
        let mut c = DVector::zeros(r);
        for i in (0..r).rev() {
            let mut acc = self.r[(i, pos)];
            for k in i + 1..r {
                acc -= self.r[(i, k)] * c[k];
            }
            c[i] = acc / self.r[(i, i)];
        }
        let mut lambda = DVector::zeros(self.perm.len());
        lambda[j] = 1.0;
        for i in 0..r {
            lambda[self.perm[i]] -= c[i];
        }
        lambda
    }

    /// Dependent columns, in pivot order.
    #[cfg(test)]
    pub(crate) fn dependent_columns(&self) -> &[usize] {
        &self.perm[self.rank..]
    }
}
