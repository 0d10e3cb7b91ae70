use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Neg;

use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

use super::monomial::Monomial;

/// Coefficient field of a [`Polynomial`]: `f64` for the numeric pipeline,
/// [`BigRational`] for exact verification.
pub trait Coeff: Num + Clone + Neg<Output = Self> + fmt::Debug {}

impl<T: Num + Clone + Neg<Output = T> + fmt::Debug> Coeff for T {}

/// Sparse multivariate polynomial; terms are keyed by monomial in grevlex order.
#[derive(Clone, PartialEq)]
pub struct Polynomial<C: Coeff> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

pub type RealPoly = Polynomial<f64>;
pub type RationalPoly = Polynomial<BigRational>;

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::from_terms(nvars, [(Monomial::one(nvars), c)])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from_terms(nvars, [(Monomial::var(nvars, i), C::one())])
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        let nvars = m.nvars();
        Self::from_terms(nvars, [(m, c)])
    }

    /// Builds a polynomial, summing repeated monomials and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(nvars: usize, terms: I) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending grevlex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        assert_eq!(m.nvars(), self.nvars, "monomial lives in a different context");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Total degree; `0` for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Leading term with respect to grevlex.
    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Polynomial::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.mul(b), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c.clone())).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &C) -> Self {
        Polynomial::from_terms(
            self.nvars,
            self.terms.iter().map(|(k, v)| (k.mul(m), v.clone() * c.clone())),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Polynomial::constant(self.nvars, C::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn negate(&self) -> Self {
        self.scale(&-C::one())
    }

    /// Partial derivative with respect to `x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exps()[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[i] -= 1;
            let mut k = C::zero();
            for _ in 0..e {
                k = k + C::one();
            }
            out.add_term(Monomial::new(exps), c.clone() * k);
        }
        out
    }

    /// Substitutes `x_i ↦ images[i]`; the result lives in the images' context.
    pub fn substitute(&self, images: &[Polynomial<C>]) -> Polynomial<C> {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = Polynomial::zero(target);
        // cache powers per variable
        let maxdeg: Vec<u32> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|m| m.exps()[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<Polynomial<C>>> = images
            .iter()
            .zip(&maxdeg)
            .map(|(img, &d)| {
                let mut v = Vec::with_capacity(d as usize + 1);
                v.push(Polynomial::constant(target, C::one()));
                for k in 1..=d as usize {
                    let next = v[k - 1].mul(img);
                    v.push(next);
                }
                v
            })
            .collect();
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t = t.mul(&powers[i][e as usize]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Re-embeds the polynomial in a context with `nvars` variables, moving variable `i`
    /// to position `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Self {
        Polynomial::from_terms(
            nvars,
            self.terms.iter().map(|(m, c)| {
                let mut exps = alloc::vec![0u32; nvars];
                for (i, &e) in m.exps().iter().enumerate() {
                    exps[map[i]] += e;
                }
                (Monomial::new(exps), c.clone())
            }),
        )
    }

    /// Variables that occur in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        let mut used = alloc::vec![false; self.nvars];
        for m in self.terms.keys() {
            for i in m.support() {
                used[i] = true;
            }
        }
        (0..self.nvars).filter(|&i| used[i]).collect()
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

impl Polynomial<f64> {
    pub fn eval(&self, point: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| c * m.eval(point)).sum()
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    /// Drops coefficients with `|c| ≤ tol`.
    pub fn prune(&self, tol: f64) -> Self {
        Polynomial::from_terms(
            self.nvars,
            self.terms.iter().filter(|(_, c)| c.abs() > tol).map(|(m, c)| (m.clone(), *c)),
        )
    }

    /// Infinity norm of the coefficient difference.
    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).max_abs_coeff()
    }

    pub fn to_display_string(&self, names: &[&str]) -> String {
        let mut s = String::new();
        let _ = self.write_with(&mut s, names);
        s
    }
}

impl Polynomial<BigRational> {
    pub fn to_f64(&self) -> Polynomial<f64> {
        self.map_coeffs(|c| c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn from_f64_exact(p: &Polynomial<f64>) -> Self {
        p.map_coeffs(|c| BigRational::from_float(*c).expect("finite coefficient"))
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, lc)) => {
                let inv = BigRational::from_integer(1.into()) / lc.clone();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    pub fn to_display_string(&self, names: &[&str]) -> String {
        let mut s = String::new();
        let _ = self.write_with(&mut s, names);
        s
    }
}

/// Printing of a single coefficient inside a sum.
pub trait CoeffFormat {
    fn is_negative(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn write_abs<W: fmt::Write>(&self, f: &mut W) -> fmt::Result;
}

impl CoeffFormat for f64 {
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn is_unit(&self) -> bool {
        self.abs() == 1.0
    }
    fn write_abs<W: fmt::Write>(&self, f: &mut W) -> fmt::Result {
        write!(f, "{}", self.abs())
    }
}

impl CoeffFormat for BigRational {
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_integer() && self.abs().numer() == &1.into()
    }
    fn write_abs<W: fmt::Write>(&self, f: &mut W) -> fmt::Result {
        let a = self.abs();
        if a.is_integer() {
            write!(f, "{}", a.numer())
        } else {
            write!(f, "{}/{}", a.numer(), a.denom())
        }
    }
}

impl<C: Coeff + CoeffFormat> Polynomial<C> {
    /// Canonical text form: terms in descending grevlex, `*` between factors, `^` for powers.
    pub fn write_with<W: fmt::Write>(&self, f: &mut W, names: &[&str]) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                c.write_abs(f)?;
            } else {
                if !c.is_unit() {
                    c.write_abs(f)?;
                    f.write_str("*")?;
                }
                m.write_with(f, names)?;
            }
        }
        Ok(())
    }
}

impl<C: Coeff + CoeffFormat> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &[])
    }
}

impl<C: Coeff + CoeffFormat> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &[])
    }
}
