//! Graded basis of the annihilator of a positive functional.
//!
//! Monomials are visited degree by degree in grevlex order and orthogonalized
//! against `⟨·,·⟩_σ` by modified Gram-Schmidt. A monomial whose projection has
//! vanishing σ-norm contributes an annihilator element with that leading monomial;
//! otherwise it becomes a standard monomial with an orthogonal polynomial.

use core::cmp::Ordering;

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DVector;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::polycore::{hankel_matrix, monomials_up_to, MomentSequence, Monomial, MonomialBasis, MonomialOrder, RealPoly};

#[derive(Clone, Debug)]
pub struct GradedBasisResult {
    pub nvars: usize,
    pub degree: u32,
    /// Annihilator elements, monic in grevlex.
    pub k: Vec<RealPoly>,
    /// Leading monomial of each element of `k`.
    pub l: Vec<Monomial>,
    /// σ-orthogonal polynomials, one per standard monomial.
    pub p: Vec<RealPoly>,
    /// Standard monomials.
    pub b: Vec<Monomial>,
    /// `⟨p_β, p_β⟩_σ`.
    pub values: Vec<f64>,
    /// Absolute zero threshold in force at the end of the run.
    pub threshold: f64,
}

/// Projections whose norm falls by more than this factor are orthogonalized twice.
const REORTHOGONALIZE: f64 = 100.0;

pub fn graded_basis(sigma: &MomentSequence, d: u32, tau_zero: f64) -> Result<GradedBasisResult> {
    if sigma.degree() < 2 * d + 2 {
        return Err(Error::DegreeOverflow { needed: 2 * d + 2, available: sigma.degree() });
    }
    let n = sigma.nvars();
    let h = hankel_matrix(sigma, d)?.entries;
    let basis = MonomialBasis::new(n, d);
    let size = basis.len();
    let candidates = monomials_up_to(n, d);

    let mut b: Vec<Monomial> = Vec::new();
    let mut l: Vec<Monomial> = Vec::new();
    let mut p_coords: Vec<DVector<f64>> = Vec::new();
    let mut hp: Vec<DVector<f64>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut k_coords: Vec<DVector<f64>> = Vec::new();
    let mut v_max: f64 = 0.0;

    loop {
        let batch = next_monomials(&candidates, &b, &l);
        if batch.is_empty() {
            break;
        }
        for alpha in batch {
            let idx = basis.index_of(&alpha).unwrap();
            let mut p = DVector::zeros(size);
            p[idx] = 1.0;
            let before = h[(idx, idx)];
            v_max = v_max.max(before);
            project(&mut p, &p_coords, &hp, &values);
            let mut hv = &h * &p;
            let mut v = p.dot(&hv);
            if v.max(0.0).sqrt() < before.max(0.0).sqrt() / REORTHOGONALIZE {
                project(&mut p, &p_coords, &hp, &values);
                hv = &h * &p;
                v = p.dot(&hv);
            }
            let threshold = tau_zero * v_max.max(1.0);
            if v < -threshold {
                return Err(Error::NegativeSquare { monomial: format!("{}", alpha), value: v });
            }
            if v <= threshold {
                k_coords.push(p);
                l.push(alpha);
            } else {
                p_coords.push(p);
                hp.push(hv);
                values.push(v);
                b.push(alpha);
            }
        }
    }
    let to_poly = |c: &DVector<f64>| basis.poly(c.as_slice());
    Ok(GradedBasisResult {
        nvars: n,
        degree: d,
        k: k_coords.iter().map(to_poly).collect(),
        l,
        p: p_coords.iter().map(to_poly).collect(),
        b,
        values,
        threshold: tau_zero * v_max.max(1.0),
    })
}

/// Modified Gram-Schmidt sweep of `p` against the orthogonal family.
fn project(p: &mut DVector<f64>, family: &[DVector<f64>], h_family: &[DVector<f64>], values: &[f64]) {
    for ((q, hq), v) in family.iter().zip(h_family).zip(values) {
        let c = hq.dot(p) / v;
        p.axpy(-c, q, 1.0);
    }
}

/// The next batch: lowest-degree candidates, in order, neither in `b` nor divisible
/// by an element of `l`.
pub fn next_monomials(s: &[Monomial], b: &[Monomial], l: &[Monomial]) -> Vec<Monomial> {
    let alive = |m: &&Monomial| !b.contains(m) && !l.iter().any(|g| g.divides(m));
    let Some(deg) = s.iter().filter(alive).map(Monomial::degree).min() else {
        return Vec::new();
    };
    s.iter().filter(alive).filter(|m| m.degree() == deg).cloned().collect()
}

/// Remainder of multivariate division of `f` by the annihilator basis.
pub fn normal_form(f: &RealPoly, gb: &GradedBasisResult) -> Result<RealPoly> {
    if f.degree() > gb.degree {
        return Err(Error::DegreeOverflow { needed: f.degree(), available: gb.degree });
    }
    if f.nvars() != gb.nvars {
        return Err(Error::DimensionMismatch { expected: gb.nvars, found: f.nvars() });
    }
    Ok(reduce(f, &gb.k, &gb.l))
}

pub(crate) fn reduce(f: &RealPoly, k: &[RealPoly], l: &[Monomial]) -> RealPoly {
    let mut rest = f.clone();
    let mut remainder = RealPoly::zero(f.nvars());
    while let Some((m, c)) = rest.leading().map(|(m, c)| (m.clone(), *c)) {
        match l.iter().position(|g| g.divides(&m)) {
            Some(i) => {
                let q = l[i].quotient_of(&m).unwrap();
                let lc = *k[i].leading().unwrap().1;
                let mut next = rest.sub(&k[i].mul_monomial(&q, &(c / lc)));
                // The leading term cancels up to rounding; remove it outright.
                next.add_term(m.clone(), -next.coeff(&m));
                rest = next;
            }
            None => {
                remainder.add_term(m.clone(), c);
                rest.add_term(m, -c);
            }
        }
    }
    remainder
}

/// Every variable has a pure power among the leading monomials.
pub fn flat_initial_test(l: &[Monomial], n: usize) -> bool {
    (0..n).all(|i| l.iter().any(|m| m.pure_power_var() == Some(i)))
}

/// `proj(x^α, p_{≺α})`: the monomial orthogonalized against the standard polynomials
/// whose leading monomial precedes `α`.
pub fn project_monomial(alpha: &Monomial, gb: &GradedBasisResult, sigma: &MomentSequence) -> Result<RealPoly> {
    let basis = MonomialBasis::new(gb.nvars, gb.degree);
    let h = hankel_matrix(sigma, gb.degree)?.entries;
    let idx = basis
        .index_of(alpha)
        .ok_or(Error::DegreeOverflow { needed: alpha.degree(), available: gb.degree })?;
    let earlier: Vec<usize> =
        (0..gb.b.len()).filter(|&i| MonomialOrder::Grevlex.cmp(&gb.b[i], alpha) == Ordering::Less).collect();
    let coords: Vec<DVector<f64>> = earlier
        .iter()
        .map(|&i| basis.coords(&gb.p[i], gb.degree).map(DVector::from_vec))
        .collect::<Result<_>>()?;
    let hp: Vec<DVector<f64>> = coords.iter().map(|c| &h * c).collect();
    let values: Vec<f64> = earlier.iter().map(|&i| gb.values[i]).collect();
    let mut p = DVector::zeros(basis.len());
    p[idx] = 1.0;
    project(&mut p, &coords, &hp, &values);
    project(&mut p, &coords, &hp, &values);
    Ok(basis.poly(p.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::evaluation_functional;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn origin_functional() {
        let sigma = evaluation_functional(&[0.0, 0.0], 6);
        let gb = graded_basis(&sigma, 2, 1e-7).unwrap();
        assert_eq!(gb.l, [m(&[1, 0]), m(&[0, 1])]);
        assert_eq!(gb.b, [m(&[0, 0])]);
        assert_eq!(gb.k, [RealPoly::var(2, 0), RealPoly::var(2, 1)]);
        assert!(flat_initial_test(&gb.l, 2));
    }

    #[test]
    fn batches() {
        let s = monomials_up_to(2, 2);
        let got = next_monomials(&s, &[m(&[0, 0]), m(&[1, 0]), m(&[0, 1])], &[m(&[2, 0])]);
        assert_eq!(got, [m(&[1, 1]), m(&[0, 2])]);
        assert!(next_monomials(&s, &[m(&[0, 0])], &[m(&[1, 0]), m(&[0, 1])]).is_empty());
        let s1 = monomials_up_to(2, 1);
        assert_eq!(next_monomials(&s1, &[m(&[0, 0])], &[]), [m(&[1, 0]), m(&[0, 1])]);
    }

    #[test]
    fn reductions() {
        let (x, y) = (RealPoly::var(2, 0), RealPoly::var(2, 1));
        let gb = GradedBasisResult {
            nvars: 2,
            degree: 2,
            k: alloc::vec![x.clone(), y.clone()],
            l: alloc::vec![m(&[1, 0]), m(&[0, 1])],
            p: alloc::vec![],
            b: alloc::vec![],
            values: alloc::vec![],
            threshold: 0.0,
        };
        assert!(normal_form(&x.mul(&x).add(&y.mul(&y)), &gb).unwrap().is_zero());
        let parabola = x.mul(&x).sub(&y);
        let gb2 = GradedBasisResult { k: alloc::vec![parabola], l: alloc::vec![m(&[2, 0])], ..gb };
        assert_eq!(normal_form(&y, &gb2).unwrap(), y);
        assert!(normal_form(&x.pow(3), &gb2).is_err());
    }

    #[test]
    fn pure_powers() {
        assert!(flat_initial_test(&[m(&[2, 0]), m(&[0, 3])], 2));
        assert!(!flat_initial_test(&[m(&[1, 1])], 2));
    }

    #[test]
    fn two_point_functional() {
        let a = evaluation_functional(&[1.0, 2.0], 6);
        let b = evaluation_functional(&[-1.0, 0.5], 6);
        let sigma = a.plus(&b).unwrap();
        let gb = graded_basis(&sigma, 2, 1e-9).unwrap();
        assert_eq!(gb.b.len(), 2);
        for k in &gb.k {
            assert!(k.eval(&[1.0, 2.0]).abs() < 1e-8);
            assert!(k.eval(&[-1.0, 0.5]).abs() < 1e-8);
        }
    }
}
