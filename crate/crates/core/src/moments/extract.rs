//! Rank profiles and recovery of atoms from flat moment sequences.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::polycore::{hankel_matrix, Monomial, MomentSequence};
use crate::sdp::{numeric_rank, symmetric_eigen};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericityReport {
    /// `rank H_σ^k` for `k = 0..=d`.
    pub ranks: Vec<usize>,
    /// Smallest `k ≥ 1` with `rank H^k = rank H^{k−1}`.
    pub stabilization: Option<u32>,
    /// Ranks are non-decreasing in `k`.
    pub monotone: bool,
}

pub fn check_genericity(sigma: &MomentSequence, d: u32, tau_rank: f64) -> Result<GenericityReport> {
    if 2 * d > sigma.degree() {
        return Err(Error::DegreeOverflow { needed: 2 * d, available: sigma.degree() });
    }
    let full = hankel_matrix(sigma, d)?.entries;
    let n = sigma.nvars();
    let ranks: Vec<usize> = (0..=d)
        .map(|k| {
            let m = crate::polycore::count_up_to(n, k);
            numeric_rank(&full.view((0, 0), (m, m)).clone_owned(), tau_rank)
        })
        .collect();
    let stabilization = (1..=d).find(|&k| ranks[k as usize] == ranks[k as usize - 1]);
    let monotone = ranks.windows(2).all(|w| w[0] <= w[1]);
    Ok(GenericityReport { ranks, stabilization, monotone })
}

/// Atoms `ξ_i` and weights `w_i ≥ 0` with `σ ≈ Σ w_i e_{ξ_i}` up to degree `2(k−1)`.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Flat order `k` used.
    pub order: u32,
    /// Largest moment mismatch of the reconstruction relative to `max(1, ‖σ‖_∞)`.
    pub residual: f64,
}

/// Points closer than this are merged.
const CLUSTER_GAP: f64 = 1e-5;

/// Recovers the atoms of a flat moment sequence from its multiplication operators.
pub fn extract_minimizers(sigma: &MomentSequence, tau_rank: f64) -> Result<Extraction> {
    let d = sigma.degree() / 2;
    let report = check_genericity(sigma, d, tau_rank)?;
    let k = report.stabilization.ok_or(Error::NoFlatness)?;
    let r = report.ranks[k as usize];
    let n = sigma.nvars();
    if r == 0 {
        return Ok(Extraction { points: Vec::new(), weights: Vec::new(), order: k, residual: sigma.max_abs() });
    }
    let basis = sigma.basis();
    let size = basis.prefix_len(k - 1);
    let rows = &basis.monomials()[..size];
    let h = DMatrix::from_fn(size, size, |i, j| sigma.values()[basis.index_of(&rows[i].mul(&rows[j])).unwrap()]);
    let (vals, vecs) = symmetric_eigen(&h);
    // σ-orthonormal polynomials spanning the quotient, as coefficient columns.
    let p = DMatrix::from_fn(size, r, |i, c| {
        let col = size - 1 - c;
        vecs[(i, col)] / vals[col].max(f64::MIN_POSITIVE).sqrt()
    });
    let mult: Vec<DMatrix<f64>> = (0..n)
        .map(|v| {
            let xv = Monomial::var(n, v);
            let hv = DMatrix::from_fn(size, size, |i, j| {
                sigma.values()[basis.index_of(&rows[i].mul(&rows[j]).mul(&xv)).unwrap()]
            });
            p.transpose() * hv * &p
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6f6d);
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut combo = DMatrix::zeros(r, r);
    for (m, w) in mult.iter().zip(&weights) {
        combo += m * (w / total);
    }
    let (_, q) = symmetric_eigen(&combo);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(r);
    for c in 0..r {
        let qc = q.column(c);
        let pt: Vec<f64> = mult.iter().map(|m| qc.dot(&(m * qc))).collect();
        let close = points.iter().any(|o| distance(o, &pt) < CLUSTER_GAP);
        if !close {
            points.push(pt);
        }
    }
    let (weights, residual) = fit_weights(sigma, &points, 2 * (k - 1));
    Ok(Extraction { points, weights, order: k, residual })
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Least-squares weights matching the moments of degree `≤ t`.
fn fit_weights(sigma: &MomentSequence, points: &[Vec<f64>], t: u32) -> (Vec<f64>, f64) {
    let basis = sigma.basis();
    let m = basis.prefix_len(t);
    let v = DMatrix::from_fn(m, points.len(), |i, j| basis.get(i).eval(&points[j]));
    let target = DVector::from_column_slice(&sigma.values()[..m]);
    let w = v.clone().svd(true, true).solve(&target, 1e-14).unwrap_or_else(|_| DVector::zeros(points.len()));
    let scale = sigma.values()[..m].iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let residual = (&v * &w - &target).amax() / scale;
    (w.iter().copied().collect(), residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::evaluation_functional;

    #[test]
    fn two_atoms() {
        let a = evaluation_functional(&[0.0, 1.0], 4);
        let b = evaluation_functional(&[1.0, 0.0], 4);
        let sigma = a.plus(&b).unwrap().scaled(0.5);
        let ex = extract_minimizers(&sigma, 1e-6).unwrap();
        assert_eq!(ex.points.len(), 2);
        let mut pts = ex.points.clone();
        pts.sort_by(|p, q| p[0].total_cmp(&q[0]));
        assert!(distance(&pts[0], &[0.0, 1.0]) < 1e-9);
        assert!(distance(&pts[1], &[1.0, 0.0]) < 1e-9);
        assert!(ex.residual < 1e-9);
        assert!(ex.weights.iter().all(|w| (w - 0.5).abs() < 1e-9));
    }

    #[test]
    fn single_atom() {
        let xi = [0.3, -1.2, 2.0];
        let ex = extract_minimizers(&evaluation_functional(&xi, 4), 1e-6).unwrap();
        assert_eq!(ex.points.len(), 1);
        assert!(distance(&ex.points[0], &xi) < 1e-9);
    }

    #[test]
    fn profiles() {
        let e = evaluation_functional(&[0.5, 2.0], 6);
        assert_eq!(check_genericity(&e, 3, 1e-6).unwrap().ranks, [1, 1, 1, 1]);
        let z = MomentSequence::zeros(2, 4);
        let rep = check_genericity(&z, 2, 1e-6).unwrap();
        assert_eq!(rep.ranks, [0, 0, 0]);
        assert!(matches!(extract_minimizers(&evaluation_functional(&[1.0], 1), 1e-6), Err(Error::DegreeOverflow { .. }) | Err(Error::NoFlatness)));
    }
}
