//! Truncated linear functionals on `ℝ[x]` and the operators built from them.
//!
//! A functional `σ ∈ (ℝ[x]_t)*` is stored through its raw values
//! `σ_α = ⟨σ, x^α⟩` for `|α| ≤ t`, indexed by the grevlex-ascending monomial basis.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::monomial::{count_up_to, monomials_up_to, Monomial};
use super::polynomial::RealPoly;
use crate::error::{Error, Result};

/// The monomials of degree `≤ degree`, ascending in grevlex, with a reverse index.
///
/// Being graded, the basis of degree `t` is a prefix of the basis of any higher degree.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    nvars: usize,
    degree: u32,
    monomials: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, degree: u32) -> Self {
        let monomials = monomials_up_to(nvars, degree);
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        MonomialBasis { nvars, degree, monomials, index }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn get(&self, i: usize) -> &Monomial {
        &self.monomials[i]
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Number of basis elements of degree `≤ t`.
    pub fn prefix_len(&self, t: u32) -> usize {
        count_up_to(self.nvars, t.min(self.degree))
    }

    /// Coefficient vector of `p` in the prefix of degree `≤ t`.
    pub fn coords(&self, p: &RealPoly, t: u32) -> Result<Vec<f64>> {
        if p.degree() > t {
            return Err(Error::DegreeOverflow { needed: p.degree(), available: t });
        }
        let mut v = alloc::vec![0.0; self.prefix_len(t)];
        for (m, c) in p.terms() {
            v[self.index[m]] = *c;
        }
        Ok(v)
    }

    /// Polynomial with the given coordinates in the basis prefix.
    pub fn poly(&self, coords: &[f64]) -> RealPoly {
        RealPoly::from_terms(
            self.nvars,
            coords.iter().enumerate().map(|(i, &c)| (self.monomials[i].clone(), c)),
        )
    }
}

/// A truncated linear functional `σ ∈ (ℝ[x]_t)*`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    nvars: usize,
    degree: u32,
    values: Vec<f64>,
}

impl MomentSequence {
    pub fn new(nvars: usize, degree: u32, values: Vec<f64>) -> Result<Self> {
        let expected = count_up_to(nvars, degree);
        if values.len() != expected {
            return Err(Error::InvalidInput(alloc::format!(
                "moment vector of length {} for {} monomials",
                values.len(),
                expected
            )));
        }
        Ok(MomentSequence { nvars, degree, values })
    }

    pub fn zeros(nvars: usize, degree: u32) -> Self {
        MomentSequence { nvars, degree, values: alloc::vec![0.0; count_up_to(nvars, degree)] }
    }

    pub fn from_fn(nvars: usize, degree: u32, f: impl Fn(&Monomial) -> f64) -> Self {
        let values = monomials_up_to(nvars, degree).iter().map(f).collect();
        MomentSequence { nvars, degree, values }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Values in grevlex-ascending monomial order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn basis(&self) -> MonomialBasis {
        MonomialBasis::new(self.nvars, self.degree)
    }

    /// `⟨σ, f⟩`.
    pub fn pair(&self, f: &RealPoly) -> Result<f64> {
        self.check_vars(f.nvars())?;
        if f.degree() > self.degree {
            return Err(Error::DegreeOverflow { needed: f.degree(), available: self.degree });
        }
        let basis = self.basis();
        Ok(f.terms().map(|(m, c)| c * self.values[basis.index_of(m).unwrap()]).sum())
    }

    /// Restriction `σ^[t]`.
    pub fn truncate(&self, t: u32) -> Result<Self> {
        if t > self.degree {
            return Err(Error::DegreeOverflow { needed: t, available: self.degree });
        }
        let n = count_up_to(self.nvars, t);
        Ok(MomentSequence { nvars: self.nvars, degree: t, values: self.values[..n].to_vec() })
    }

    pub fn scaled(&self, c: f64) -> Self {
        MomentSequence { values: self.values.iter().map(|v| v * c).collect(), ..self.clone() }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if other.nvars != self.nvars || other.degree != self.degree {
            return Err(Error::InvalidInput("functionals of different shape".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(MomentSequence { nvars: self.nvars, degree: self.degree, values })
    }

    /// Largest absolute moment.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    fn check_vars(&self, n: usize) -> Result<()> {
        if n != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: n });
        }
        Ok(())
    }
}

/// The moment matrix `H_σ^t = (σ_{α+β})_{|α|,|β| ≤ t}`.
#[derive(Clone, Debug)]
pub struct HankelMatrix {
    pub order: u32,
    pub index: Vec<Monomial>,
    pub entries: DMatrix<f64>,
}

/// `g ⋆ σ` truncated to degree `t`: `τ_α = Σ_β g_β σ_{α+β}`.
pub fn convolve(g: &RealPoly, sigma: &MomentSequence, t: u32) -> Result<MomentSequence> {
    sigma.check_vars(g.nvars())?;
    let needed = t + g.degree();
    if needed > sigma.degree {
        return Err(Error::DegreeOverflow { needed, available: sigma.degree });
    }
    let basis = sigma.basis();
    let n = count_up_to(sigma.nvars, t);
    let values = basis.monomials()[..n]
        .iter()
        .map(|a| {
            g.terms()
                .map(|(b, c)| c * sigma.values[basis.index_of(&a.mul(b)).unwrap()])
                .sum()
        })
        .collect();
    Ok(MomentSequence { nvars: sigma.nvars, degree: t, values })
}

/// Assembles `H_σ^t`; needs `degree(σ) ≥ 2t`.
pub fn hankel_matrix(sigma: &MomentSequence, t: u32) -> Result<HankelMatrix> {
    if 2 * t > sigma.degree {
        return Err(Error::DegreeOverflow { needed: 2 * t, available: sigma.degree });
    }
    let basis = sigma.basis();
    let n = basis.prefix_len(t);
    let index: Vec<Monomial> = basis.monomials()[..n].to_vec();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = sigma.values[basis.index_of(&index[i].mul(&index[j])).unwrap()];
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
    }
    Ok(HankelMatrix { order: t, index, entries })
}

/// `⟨p, q⟩_σ = ⟨σ, p q⟩`.
pub fn sigma_inner_product(p: &RealPoly, q: &RealPoly, sigma: &MomentSequence) -> Result<f64> {
    sigma.pair(&p.mul(q))
}

/// The evaluation `e_ξ` truncated to degree `t`.
pub fn evaluation_functional(xi: &[f64], t: u32) -> MomentSequence {
    MomentSequence::from_fn(xi.len(), t, |m| m.eval(xi))
}
