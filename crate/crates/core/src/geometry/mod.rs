//! Generic projections, elimination to hypersurfaces and exact ideal oracles.
//!
//! Numeric annihilator bases are rationalized and handed to an exact Buchberger
//! implementation. Elimination happens after a rational change of coordinates
//! whose first `k + 1` rows are the projection.

mod groebner;
mod rational;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::polycore::{Monomial, MonomialOrder, RationalPoly, RealPoly};

pub use groebner::{buchberger, buchberger_with, normal_form_exact, GroebnerLimits};
pub use rational::{primitive_part, rationalize, rationalize_value};

/// Tolerance used when floating generators enter exact elimination.
pub const RATIONALIZE_TOL: f64 = 1e-4;

/// Projection entries are snapped to simple rationals at this resolution.
const PROJECTION_GRID: f64 = 0.05;

/// A full-rank linear map `ℝⁿ → ℝ^{k+1}` with exact rational entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionMap {
    pub matrix: DMatrix<f64>,
    pub exact: Vec<Vec<BigRational>>,
    pub seed: u64,
}

impl ProjectionMap {
    pub fn from_exact(rows: Vec<Vec<BigRational>>, seed: u64) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || rows.iter().any(|r| r.len() != n) || rows.len() > n {
            return Err(Error::InvalidInput(String::from("projection rows must be nonempty, equal-length and at most n")));
        }
        if exact_rank(&rows) != rows.len() {
            return Err(Error::InvalidInput(String::from("projection is rank deficient")));
        }
        let matrix = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j].to_f64_lossy());
        Ok(ProjectionMap { matrix, exact: rows, seed })
    }

    /// The first `k + 1` coordinates.
    pub fn coordinate(n: usize, k: usize) -> Self {
        let rows = (0..=k)
            .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        ProjectionMap::from_exact(rows, 0).expect("coordinate projection")
    }

    pub fn identity(n: usize) -> Self {
        ProjectionMap::coordinate(n, n - 1)
    }

    /// `k + 1`.
    pub fn rows(&self) -> usize {
        self.exact.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows()).map(|i| (0..self.cols()).map(|j| self.matrix[(i, j)] * x[j]).sum()).collect()
    }

    /// The linear forms `(π x)_i` as polynomials in `x`.
    pub fn linear_forms(&self) -> Vec<RationalPoly> {
        let n = self.cols();
        self.exact
            .iter()
            .map(|row| {
                RationalPoly::from_terms(n, row.iter().enumerate().map(|(j, c)| (Monomial::var(n, j), c.clone())))
            })
            .collect()
    }
}

trait LossyF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl LossyF64 for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Standard normal entries snapped to simple rationals, re-drawn until full rank.
pub fn random_projection(n: usize, k: usize, seed: u64) -> Result<ProjectionMap> {
    if k >= n {
        return Err(Error::InvalidInput(format!("projection to dimension {} needs k < n = {}", k + 1, n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let rows: Vec<Vec<BigRational>> = (0..=k)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        rationalize_value(z, PROJECTION_GRID)
                    })
                    .collect()
            })
            .collect();
        if let Ok(p) = ProjectionMap::from_exact(rows, seed) {
            return Ok(p);
        }
    }
}

/// Rank by exact Gaussian elimination.
fn exact_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in 0..a.len() {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                for j in c..cols {
                    let t = &f * &a[rank][j];
                    a[r][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Inverse of a square rational matrix, `None` when singular.
fn exact_inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..2 * n {
                    let t = &f * &a[c][j];
                    a[r][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Generators {
    Float(Vec<RealPoly>),
    Exact(Vec<RationalPoly>),
}

/// An ideal given by generators in a shared context.
#[derive(Clone, Debug, PartialEq)]
pub struct Ideal {
    pub nvars: usize,
    pub generators: Generators,
}

impl Ideal {
    pub fn float(nvars: usize, gens: Vec<RealPoly>) -> Result<Self> {
        check_context(nvars, gens.iter().map(|p| p.nvars()))?;
        Ok(Ideal { nvars, generators: Generators::Float(gens) })
    }

    pub fn exact(nvars: usize, gens: Vec<RationalPoly>) -> Result<Self> {
        check_context(nvars, gens.iter().map(|p| p.nvars()))?;
        Ok(Ideal { nvars, generators: Generators::Exact(gens) })
    }

    /// Exact generators; floating ones are rationalized with tolerance `tau`.
    pub fn exact_generators(&self, tau: f64) -> Vec<RationalPoly> {
        match &self.generators {
            Generators::Exact(g) => g.clone(),
            Generators::Float(g) => g.iter().map(|p| rationalize(p, tau)).collect(),
        }
    }

    pub fn float_generators(&self) -> Vec<RealPoly> {
        match &self.generators {
            Generators::Float(g) => g.clone(),
            Generators::Exact(g) => g.iter().map(RationalPoly::to_f64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match &self.generators {
            Generators::Float(g) => g.len(),
            Generators::Exact(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn check_context(nvars: usize, ctx: impl Iterator<Item = usize>) -> Result<()> {
    let mut any = false;
    for c in ctx {
        any = true;
        if c != nvars {
            return Err(Error::DimensionMismatch { expected: nvars, found: c });
        }
    }
    if !any {
        return Err(Error::InvalidInput(String::from("an ideal needs at least one generator")));
    }
    Ok(())
}

/// An irreducible component with its dimension and optional sample points.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub ideal: Ideal,
    pub dimension: usize,
    pub samples: Vec<Vec<f64>>,
}

impl Component {
    pub fn new(ideal: Ideal, dimension: usize) -> Result<Self> {
        if dimension > ideal.nvars {
            return Err(Error::InvalidInput(format!("dimension {} exceeds {}", dimension, ideal.nvars)));
        }
        Ok(Component { ideal, dimension, samples: Vec::new() })
    }
}

/// Exact generator of `(I + (u − πx)) ∩ ℚ[u]`, in `k + 1` variables.
pub fn eliminate_exact(ideal: &Ideal, pi: &ProjectionMap) -> Result<RationalPoly> {
    let n = ideal.nvars;
    if pi.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: pi.cols() });
    }
    let rows = pi.rows();
    let front = n - rows;
    // Complete π to an invertible matrix with unit rows.
    let mut full = pi.exact.clone();
    for j in 0..n {
        if full.len() == n {
            break;
        }
        let mut cand = full.clone();
        cand.push((0..n).map(|c| if c == j { BigRational::one() } else { BigRational::zero() }).collect());
        if exact_rank(&cand) == cand.len() {
            full = cand;
        }
    }
    let inv = exact_inverse(&full).ok_or_else(|| Error::EliminationFailure(String::from("singular coordinate change")))?;
    // New variable for row j of `full`: projections go last, completions first.
    let slot = |j: usize| if j < rows { front + j } else { j - rows };
    let images: Vec<RationalPoly> = (0..n)
        .map(|i| RationalPoly::from_terms(n, (0..n).map(|j| (Monomial::var(n, slot(j)), inv[i][j].clone()))))
        .collect();
    let gens: Vec<RationalPoly> =
        ideal.exact_generators(RATIONALIZE_TOL).iter().map(|g| g.substitute(&images)).collect();
    let order = MonomialOrder::BlockElimination(front);
    let gb = buchberger(&gens, order)?;
    let elim: Vec<&RationalPoly> =
        gb.iter().filter(|p| p.support_vars().iter().all(|&v| v >= front)).collect();
    let [h] = elim.as_slice() else {
        return Err(Error::EliminationFailure(format!("elimination ideal has {} generators", elim.len())));
    };
    if h.degree() == 0 {
        return Err(Error::EliminationFailure(String::from("elimination ideal is the unit ideal")));
    }
    let map: Vec<usize> = (0..n).map(|v| v.saturating_sub(front)).collect();
    Ok(primitive_part(&h.remap(rows, &map)))
}

/// The hypersurface `π(𝒱(I))`, scaled so its largest coefficient has magnitude one.
pub fn eliminate_to_hypersurface(ideal: &Ideal, pi: &ProjectionMap) -> Result<RealPoly> {
    let h = eliminate_exact(ideal, pi)?.to_f64();
    let s = h.max_abs_coeff();
    Ok(h.scale(&(1.0 / s)))
}

/// Generators of `I ∩ J`, eliminating `t` from `t·I + (1 − t)·J`.
pub fn intersect(i: &[RationalPoly], j: &[RationalPoly]) -> Result<Vec<RationalPoly>> {
    let n = i.first().or(j.first()).map_or(0, |p| p.nvars());
    let shift: Vec<usize> = (1..=n).collect();
    let t = RationalPoly::var(n + 1, 0);
    let one_minus_t = RationalPoly::constant(n + 1, BigRational::one()).sub(&t);
    let gens: Vec<RationalPoly> = i
        .iter()
        .map(|p| t.mul(&p.remap(n + 1, &shift)))
        .chain(j.iter().map(|p| one_minus_t.mul(&p.remap(n + 1, &shift))))
        .collect();
    let gb = buchberger(&gens, MonomialOrder::BlockElimination(1))?;
    let back: Vec<usize> = (0..=n).map(|v| v.saturating_sub(1)).collect();
    let out: Vec<RationalPoly> = gb
        .iter()
        .filter(|p| !p.support_vars().contains(&0))
        .map(|p| p.remap(n, &back))
        .collect();
    buchberger(&out, MonomialOrder::Grevlex)
}

/// Largest variable subset on which no leading monomial is supported.
pub fn dimension_of_staircase(l: &[Monomial], n: usize) -> usize {
    assert!(n < 32, "staircase dimension is brute force over variable subsets");
    let masks: Vec<u32> = l.iter().map(|m| m.support().fold(0u32, |a, v| a | (1 << v))).collect();
    (0u32..(1 << n))
        .filter(|s| masks.iter().all(|&m| m & !s != 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Numeric rank of the Jacobian of `f` at `xi`, singular values relative to `max(1, s_max)`.
pub fn jacobian_rank(f: &[RealPoly], xi: &[f64], tau_rank: f64) -> usize {
    let n = xi.len();
    if f.is_empty() || n == 0 {
        return 0;
    }
    let jac = DMatrix::from_fn(f.len(), n, |i, j| f[i].derivative(j).eval(xi));
    let sv = jac.singular_values();
    let smax = sv.iter().fold(0.0f64, |a, s| a.max(*s));
    let cut = tau_rank * smax.max(1.0);
    sv.iter().filter(|s| **s > cut).count()
}

pub fn ideal_membership(f: &RationalPoly, ideal: &[RationalPoly]) -> Result<bool> {
    let gb = buchberger(ideal, MonomialOrder::Grevlex)?;
    Ok(normal_form_exact(f, &gb, MonomialOrder::Grevlex).is_zero())
}

pub fn ideal_equal(i: &[RationalPoly], j: &[RationalPoly]) -> Result<bool> {
    let gi = buchberger(i, MonomialOrder::Grevlex)?;
    let gj = buchberger(j, MonomialOrder::Grevlex)?;
    Ok(gi == gj)
}

/// Exact Krull dimension of `ℚ[x]/I` from the leading monomials of its Gröbner basis.
pub fn exact_dimension(ideal: &[RationalPoly]) -> Result<usize> {
    let n = ideal.first().map_or(0, |p| p.nvars());
    let gb = buchberger(ideal, MonomialOrder::Grevlex)?;
    if gb.iter().any(|p| p.degree() == 0) {
        return Ok(0);
    }
    let l: Vec<Monomial> = gb.iter().filter_map(|p| p.leading_monomial().cloned()).collect();
    Ok(dimension_of_staircase(&l, n))
}

/// Largest `|h(π ξ)|` over sample points relative to the coefficient scale.
pub fn hypersurface_residual(h: &RealPoly, pi: &ProjectionMap, samples: &[Vec<f64>]) -> f64 {
    samples.iter().map(|x| h.eval(&pi.apply(x)).abs()).fold(0.0, f64::max) / h.max_abs_coeff().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn qv(n: usize, i: usize) -> RationalPoly {
        RationalPoly::var(n, i)
    }

    fn qc(n: usize, c: i64) -> RationalPoly {
        RationalPoly::constant(n, q(c))
    }

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn projections() {
        let p = random_projection(3, 1, 7).unwrap();
        assert_eq!((p.rows(), p.cols()), (2, 3));
        assert_eq!(exact_rank(&p.exact), 2);
        assert_eq!(p, random_projection(3, 1, 7).unwrap());
        let sq = random_projection(2, 1, 3).unwrap();
        assert!(exact_inverse(&sq.exact).is_some());
        assert!(random_projection(2, 2, 0).is_err());
    }

    #[test]
    fn identity_elimination() {
        let (x, y) = (qv(2, 0), qv(2, 1));
        let line = Ideal::exact(2, vec![y.clone()]).unwrap();
        let h = eliminate_to_hypersurface(&line, &ProjectionMap::identity(2)).unwrap();
        assert_eq!(h, RealPoly::var(2, 1));
        let circle = x.mul(&x).add(&y.mul(&y)).sub(&qc(2, 1));
        let h = eliminate_to_hypersurface(&Ideal::exact(2, vec![circle.clone()]).unwrap(), &ProjectionMap::identity(2)).unwrap();
        assert_eq!(h, circle.to_f64());
    }

    #[test]
    fn conic_from_a_space_curve() {
        let (x, y, z) = (qv(3, 0), qv(3, 1), qv(3, 2));
        let ideal = Ideal::exact(3, vec![z.sub(&x), x.mul(&x).sub(&y)]).unwrap();
        for seed in 0..4 {
            let pi = random_projection(3, 1, seed).unwrap();
            let h = eliminate_to_hypersurface(&ideal, &pi).unwrap();
            assert_eq!(h.degree(), 2);
            // Implicitization check on the parametrization (t, t², t).
            let samples: Vec<Vec<f64>> = (0..20).map(|i| {
                let t = -2.0 + 0.2 * i as f64;
                vec![t, t * t, t]
            }).collect();
            assert!(hypersurface_residual(&h, &pi, &samples) < 1e-8);
        }
    }

    #[test]
    fn non_principal_elimination_fails() {
        // A point in the plane keeps two equations under the identity.
        let (x, y) = (qv(2, 0), qv(2, 1));
        let ideal = Ideal::exact(2, vec![x, y]).unwrap();
        assert!(matches!(eliminate_exact(&ideal, &ProjectionMap::identity(2)), Err(Error::EliminationFailure(_))));
    }

    #[test]
    fn staircase_dimensions() {
        assert_eq!(dimension_of_staircase(&[m(&[1, 0]), m(&[0, 1])], 2), 0);
        assert_eq!(dimension_of_staircase(&[m(&[2, 0])], 2), 1);
        assert_eq!(dimension_of_staircase(&[m(&[1, 0, 1]), m(&[0, 2, 0]), m(&[0, 1, 1]), m(&[0, 0, 2])], 3), 1);
        assert_eq!(dimension_of_staircase(&[], 3), 3);
    }

    #[test]
    fn jacobian_ranks() {
        let (x, y) = (RealPoly::var(2, 0), RealPoly::var(2, 1));
        let sq = x.mul(&x).add(&y.mul(&y));
        assert_eq!(jacobian_rank(core::slice::from_ref(&sq), &[0.0, 0.0], 1e-8), 0);
        let circle = sq.sub(&RealPoly::constant(2, 1.0));
        assert_eq!(jacobian_rank(&[circle], &[1.0, 0.0], 1e-8), 1);
        assert_eq!(jacobian_rank(&[x, y], &[0.0, 0.0], 1e-8), 2);
    }

    #[test]
    fn membership_and_equality() {
        let (x, y) = (qv(2, 0), qv(2, 1));
        assert!(ideal_membership(&x.mul(&x).add(&y.mul(&y)), &[x.clone(), y.clone()]).unwrap());
        assert!(!ideal_membership(&x, &[x.mul(&x)]).unwrap());
        assert!(ideal_equal(&[x.add(&y), y.clone()], &[x.clone(), y.clone()]).unwrap());
    }

    #[test]
    fn brake_radical_is_an_intersection() {
        let (x, y, z) = (qv(3, 0), qv(3, 1), qv(3, 2));
        let half = RationalPoly::constant(3, BigRational::new(1.into(), 2.into()));
        let p = [y.clone(), z.clone()];
        let mm = [x.clone(), y.scale(&q(2)).add(&qc(3, 1)), z.scale(&q(2)).sub(&qc(3, 1))];
        let both = intersect(&p, &mm).unwrap();
        let stated = [y.mul(&x), z.add(&y), y.mul(&y).add(&y.mul(&half))];
        assert!(ideal_equal(&both, &stated).unwrap());
        assert_eq!(exact_dimension(&stated).unwrap(), 1);
    }
}
