//! Exact Buchberger algorithm over the rationals.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::polycore::{Monomial, MonomialOrder, RationalPoly};

/// Desk-scale guard on the S-pair loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroebnerLimits {
    pub max_pairs: usize,
    pub max_basis: usize,
}

impl Default for GroebnerLimits {
    fn default() -> Self {
        GroebnerLimits { max_pairs: 20_000, max_basis: 2_000 }
    }
}

pub(crate) fn lead(p: &RationalPoly, order: MonomialOrder) -> Option<(&Monomial, &BigRational)> {
    match order {
        MonomialOrder::Grevlex => p.leading(),
        _ => p.terms().max_by(|a, b| order.cmp(a.0, b.0)),
    }
}

fn monic(p: &RationalPoly, order: MonomialOrder) -> RationalPoly {
    match lead(p, order) {
        Some((_, c)) => p.scale(&(BigRational::one() / c.clone())),
        None => p.clone(),
    }
}

/// Fully reduced remainder of `f` modulo `g` (elements need not be monic).
pub fn normal_form_exact(f: &RationalPoly, g: &[RationalPoly], order: MonomialOrder) -> RationalPoly {
    let leads: Vec<(Monomial, BigRational)> =
        g.iter().filter_map(|p| lead(p, order).map(|(m, c)| (m.clone(), c.clone()))).collect();
    let g: Vec<&RationalPoly> = g.iter().filter(|p| !p.is_zero()).collect();
    let mut rest = f.clone();
    let mut remainder = RationalPoly::zero(f.nvars());
    while let Some((m, c)) = lead(&rest, order).map(|(m, c)| (m.clone(), c.clone())) {
        match leads.iter().position(|(lm, _)| lm.divides(&m)) {
            Some(i) => {
                let q = leads[i].0.quotient_of(&m).unwrap();
                rest = rest.sub(&g[i].mul_monomial(&q, &(c / leads[i].1.clone())));
            }
            None => {
                rest.add_term(m.clone(), -c.clone());
                remainder.add_term(m, c);
            }
        }
    }
    remainder
}

fn s_polynomial(f: &RationalPoly, g: &RationalPoly, order: MonomialOrder) -> RationalPoly {
    let (mf, cf) = lead(f, order).unwrap();
    let (mg, cg) = lead(g, order).unwrap();
    let l = mf.lcm(mg);
    let a = f.mul_monomial(&mf.quotient_of(&l).unwrap(), &(BigRational::one() / cf.clone()));
    let b = g.mul_monomial(&mg.quotient_of(&l).unwrap(), &(BigRational::one() / cg.clone()));
    a.sub(&b)
}

/// Reduced Gröbner basis, monic, sorted by ascending leading monomial.
pub fn buchberger(gens: &[RationalPoly], order: MonomialOrder) -> Result<Vec<RationalPoly>> {
    buchberger_with(gens, order, GroebnerLimits::default())
}

pub fn buchberger_with(gens: &[RationalPoly], order: MonomialOrder, limits: GroebnerLimits) -> Result<Vec<RationalPoly>> {
    let mut basis: Vec<RationalPoly> = gens.iter().filter(|p| !p.is_zero()).map(|p| monic(p, order)).collect();
    if basis.is_empty() {
        return Ok(basis);
    }
    let lm = |p: &RationalPoly| lead(p, order).unwrap().0.clone();
    let mut leads: Vec<Monomial> = basis.iter().map(lm).collect();
    let mut queue: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            queue.push((i, j));
        }
    }
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut processed = 0usize;
    while !queue.is_empty() {
        // Normal selection strategy: smallest lcm first.
        let pos = (0..queue.len())
            .min_by(|&a, &b| {
                let la = leads[queue[a].0].lcm(&leads[queue[a].1]);
                let lb = leads[queue[b].0].lcm(&leads[queue[b].1]);
                order.cmp(&la, &lb)
            })
            .unwrap();
        let (i, j) = queue.swap_remove(pos);
        done.insert((i, j));
        processed += 1;
        if processed > limits.max_pairs {
            return Err(Error::ResourceCap(format!("more than {} S-pairs", limits.max_pairs)));
        }
        if leads[i].is_coprime(&leads[j]) {
            continue;
        }
        let l = leads[i].lcm(&leads[j]);
        let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
        let chain = (0..basis.len()).any(|k| {
            k != i && k != j && leads[k].divides(&l) && done.contains(&key(i, k)) && done.contains(&key(j, k))
        });
        if chain {
            continue;
        }
        let r = normal_form_exact(&s_polynomial(&basis[i], &basis[j], order), &basis, order);
        if r.is_zero() {
            continue;
        }
        let r = monic(&r, order);
        let n = basis.len();
        leads.push(lm(&r));
        basis.push(r);
        if basis.len() > limits.max_basis {
            return Err(Error::ResourceCap(format!("basis larger than {}", limits.max_basis)));
        }
        for i in 0..n {
            queue.push((i, n));
        }
    }
    Ok(reduce_basis(basis, order))
}

fn reduce_basis(basis: Vec<RationalPoly>, order: MonomialOrder) -> Vec<RationalPoly> {
    let leads: Vec<Monomial> = basis.iter().map(|p| lead(p, order).unwrap().0.clone()).collect();
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..basis.len() {
        let redundant = (0..basis.len()).any(|j| {
            j != i && leads[j].divides(&leads[i]) && (leads[j] != leads[i] || j < i)
        });
        if !redundant {
            keep.push(i);
        }
    }
    let minimal: Vec<RationalPoly> = keep.iter().map(|&i| basis[i].clone()).collect();
    let mut reduced: Vec<RationalPoly> = (0..minimal.len())
        .map(|i| {
            let others: Vec<RationalPoly> =
                minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
            let (m, c) = lead(&minimal[i], order).map(|(m, c)| (m.clone(), c.clone())).unwrap();
            let mut tail = minimal[i].clone();
            tail.add_term(m.clone(), -c.clone());
            let mut p = normal_form_exact(&tail, &others, order);
            p.add_term(m, c);
            monic(&p, order)
        })
        .collect();
    reduced.sort_by(|a, b| order.cmp(lead(a, order).unwrap().0, lead(b, order).unwrap().0));
    reduced
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn var(n: usize, i: usize) -> RationalPoly {
        RationalPoly::var(n, i)
    }

    #[test]
    fn single_s_pair() {
        let (x, y) = (var(2, 0), var(2, 1));
        let gb = buchberger(&[x.mul(&x).add(&y.mul(&y)), x.clone()], MonomialOrder::Grevlex).unwrap();
        assert_eq!(gb, [x, y.mul(&y)]);
    }

    #[test]
    fn linear_generator() {
        let x = var(1, 0);
        let p = x.sub(&RationalPoly::constant(1, q(1)));
        assert_eq!(buchberger(core::slice::from_ref(&p), MonomialOrder::Grevlex).unwrap(), [p]);
    }

    #[test]
    fn twisted_cubic_elimination() {
        // (y − x², z − x³) eliminating x leaves (y³ − z²) in the elimination ideal.
        let (x, y, z) = (var(3, 0), var(3, 1), var(3, 2));
        let gens = [y.sub(&x.pow(2)), z.sub(&x.pow(3))];
        let gb = buchberger(&gens, MonomialOrder::BlockElimination(1)).unwrap();
        let elim: Vec<_> = gb.iter().filter(|p| p.support_vars().iter().all(|&v| v != 0)).collect();
        assert_eq!(elim.len(), 1);
        let target = y.pow(3).sub(&z.pow(2));
        assert!(normal_form_exact(&target, &gb, MonomialOrder::BlockElimination(1)).is_zero());
        let ratio = monic(elim[0], MonomialOrder::Grevlex);
        assert_eq!(ratio, monic(&target, MonomialOrder::Grevlex));
    }

    #[test]
    fn resource_cap_is_reported() {
        let (x, y, z) = (var(3, 0), var(3, 1), var(3, 2));
        let gens = [x.pow(3).sub(&y.mul(&z)), y.pow(3).sub(&x.mul(&z)), z.pow(3).sub(&x.mul(&y))];
        let limits = GroebnerLimits { max_pairs: 2, max_basis: 100 };
        assert!(matches!(buchberger_with(&gens, MonomialOrder::Grevlex, limits), Err(Error::ResourceCap(_))));
    }
}
