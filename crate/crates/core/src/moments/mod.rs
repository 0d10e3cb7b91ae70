//! Moment relaxations as semidefinite programs.
//!
//! The decision variables are the moments `σ_α`, `|α| ≤ 2d`, shared by the moment
//! matrix `H_σ^d` and the localizing matrices `H_{g⋆σ}^{d − ⌈deg g/2⌉}`.

mod extract;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::polycore::{MomentSequence, MonomialBasis, RealPoly};
use crate::sdp::{solve_sdp, Block, SdpOptions, SdpProblem, SdpStatus};

pub use extract::{check_genericity, extract_minimizers, Extraction, GenericityReport};

/// The constraint `r² − ‖x − center‖² ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn polynomial(&self) -> RealPoly {
        let n = self.center.len();
        let mut p = RealPoly::constant(n, self.radius * self.radius);
        for (i, &c) in self.center.iter().enumerate() {
            let shifted = RealPoly::var(n, i).sub(&RealPoly::constant(n, c));
            p = p.sub(&shifted.mul(&shifted));
        }
        p
    }
}

#[derive(Clone, Debug)]
pub struct MOPProblem {
    pub nvars: usize,
    /// Minimized objective; `None` asks for a generic (maximal-rank) element.
    pub objective: Option<RealPoly>,
    pub equalities: Vec<RealPoly>,
    pub inequalities: Vec<RealPoly>,
    pub order: u32,
    pub normalize: bool,
    pub ball: Option<Ball>,
}

impl MOPProblem {
    pub fn new(nvars: usize, order: u32) -> Self {
        MOPProblem {
            nvars,
            objective: None,
            equalities: Vec::new(),
            inequalities: Vec::new(),
            order,
            normalize: true,
            ball: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let polys = self.objective.iter().chain(&self.equalities).chain(&self.inequalities);
        for p in polys {
            if p.nvars() != self.nvars {
                return Err(Error::DimensionMismatch { expected: self.nvars, found: p.nvars() });
            }
            if p.degree() > 2 * self.order {
                return Err(Error::DegreeOverflow { needed: p.degree(), available: 2 * self.order });
            }
        }
        if let Some(b) = &self.ball {
            if b.center.len() != self.nvars {
                return Err(Error::DimensionMismatch { expected: self.nvars, found: b.center.len() });
            }
            if !(b.radius > 0.0) {
                return Err(Error::InvalidInput(format!("ball radius {} is not positive", b.radius)));
            }
        }
        Ok(())
    }

    /// Inequalities including the ball.
    pub fn all_inequalities(&self) -> Vec<RealPoly> {
        let mut g = self.inequalities.clone();
        if let Some(b) = &self.ball {
            g.push(b.polynomial());
        }
        g
    }

    /// Half-degree of the constraints: the step used by the flatness test.
    pub fn constraint_half_degree(&self) -> u32 {
        self.equalities
            .iter()
            .chain(&self.all_inequalities())
            .map(|p| p.degree().div_ceil(2))
            .max()
            .unwrap_or(1)
            .max(1)
    }
}

/// Builds the SDP whose variable `i` is the moment of the `i`-th monomial of
/// `MonomialBasis::new(n, 2d)`.
pub fn build_mop(p: &MOPProblem) -> Result<SdpProblem> {
    p.validate()?;
    let d = p.order;
    let basis = MonomialBasis::new(p.nvars, 2 * d);
    let mut sdp = SdpProblem::new(basis.len());
    sdp.add_block(localizing_block(&basis, &RealPoly::constant(p.nvars, 1.0), d));
    for g in p.all_inequalities() {
        let half = g.degree().div_ceil(2);
        if half > d {
            return Err(Error::DegreeOverflow { needed: 2 * half, available: 2 * d });
        }
        sdp.add_block(localizing_block(&basis, &g, d - half));
    }
    for h in &p.equalities {
        let shifts = basis.prefix_len(2 * d - h.degree());
        for a in &basis.monomials()[..shifts] {
            let coeffs: Vec<(usize, f64)> =
                h.terms().map(|(m, c)| (basis.index_of(&a.mul(m)).unwrap(), *c)).collect();
            sdp.add_equality(coeffs, 0.0);
        }
    }
    if p.normalize {
        sdp.add_equality(vec![(0, 1.0)], 1.0);
    }
    if let Some(f) = &p.objective {
        let mut c = vec![0.0; basis.len()];
        for (m, v) in f.terms() {
            c[basis.index_of(m).unwrap()] += v;
        }
        sdp.set_objective(c);
    }
    Ok(sdp)
}

/// `H_{g⋆σ}^k` as an affine block in the moment variables.
fn localizing_block(basis: &MonomialBasis, g: &RealPoly, k: u32) -> Block {
    let n = basis.prefix_len(k);
    let rows = &basis.monomials()[..n];
    let mut block = Block::new(n);
    for (i, a) in rows.iter().enumerate() {
        for (j, b) in rows.iter().enumerate().skip(i) {
            let ab = a.mul(b);
            for (m, c) in g.terms() {
                block.add_term(basis.index_of(&ab.mul(m)).unwrap(), i, j, *c);
            }
        }
    }
    block
}

#[derive(Clone, Debug)]
pub struct MOPSolution {
    pub status: SdpStatus,
    pub sigma: MomentSequence,
    /// `⟨σ, f⟩`, zero without objective.
    pub value: f64,
    /// `rank H_σ^k` for `k = 0..=d`.
    pub rank_profile: Vec<usize>,
    /// Smallest `k` with `rank H^k = rank H^{k−v}`, `v` the constraint half-degree.
    pub flat_order: Option<u32>,
    pub iterations: usize,
    pub gap: f64,
    pub min_eigenvalues: Vec<f64>,
    /// Residual of the infeasibility certificate, when one was produced.
    pub certificate_residual: Option<f64>,
}

impl MOPSolution {
    pub fn is_flat(&self) -> bool {
        self.flat_order.is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MopOptions {
    pub sdp: SdpOptions,
    pub tau_rank: f64,
}

impl Default for MopOptions {
    fn default() -> Self {
        MopOptions { sdp: SdpOptions::default(), tau_rank: 1e-6 }
    }
}

pub fn minimize(p: &MOPProblem) -> Result<MOPSolution> {
    minimize_with(p, &MopOptions::default())
}

pub fn minimize_with(p: &MOPProblem, opts: &MopOptions) -> Result<MOPSolution> {
    let sdp = build_mop(p)?;
    let sol = solve_sdp(&sdp, &opts.sdp)?;
    let sigma = MomentSequence::new(p.nvars, 2 * p.order, sol.y.clone())?;
    let value = match &p.objective {
        Some(f) => sigma.pair(f)?,
        None => 0.0,
    };
    let report = check_genericity(&sigma, p.order, opts.tau_rank)?;
    let step = p.constraint_half_degree();
    let flat_order = (step..=p.order)
        .find(|&k| report.ranks[k as usize] == report.ranks[(k - step) as usize])
        .filter(|_| sol.status == SdpStatus::Optimal);
    Ok(MOPSolution {
        status: sol.status,
        sigma,
        value,
        rank_profile: report.ranks,
        flat_order,
        iterations: sol.iterations,
        gap: sol.gap,
        min_eigenvalues: sol.min_eigenvalues,
        certificate_residual: sol.certificate.map(|c| c.residual),
    })
}

/// A normalized maximal-rank element of `𝓛_{2d}(±h, g)`.
pub fn generic_element(nvars: usize, h: &[RealPoly], g: &[RealPoly], d: u32) -> Result<MOPSolution> {
    generic_element_with(nvars, h, g, d, &MopOptions::default())
}

pub fn generic_element_with(
    nvars: usize,
    h: &[RealPoly],
    g: &[RealPoly],
    d: u32,
    opts: &MopOptions,
) -> Result<MOPSolution> {
    let mut p = MOPProblem::new(nvars, d);
    p.equalities = h.to_vec();
    p.inequalities = g.to_vec();
    minimize_with(&p, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::evaluation_functional;

    fn var(n: usize, i: usize) -> RealPoly {
        RealPoly::var(n, i)
    }

    #[test]
    fn block_and_equality_counts() {
        let (x, y) = (var(2, 0), var(2, 1));
        let mut p = MOPProblem::new(2, 2);
        p.equalities.push(x.mul(&x).add(&y.mul(&y)));
        let sdp = build_mop(&p).unwrap();
        assert_eq!(sdp.blocks.len(), 1);
        assert_eq!(sdp.blocks[0].dim, 6);
        assert_eq!(sdp.equalities.len(), 6 + 1);

        let p = MOPProblem::new(2, 1);
        let sdp = build_mop(&p).unwrap();
        assert_eq!(sdp.blocks[0].dim, 3);
        assert_eq!(sdp.equalities.len(), 1);

        let mut p = MOPProblem::new(2, 2);
        p.inequalities.push(RealPoly::constant(2, 1.0).sub(&x.mul(&x)));
        let sdp = build_mop(&p).unwrap();
        assert_eq!(sdp.blocks[1].dim, 3);
    }

    #[test]
    fn rejects_degree_overflow() {
        let x = var(1, 0);
        let mut p = MOPProblem::new(1, 1);
        p.equalities.push(x.pow(3));
        assert!(matches!(build_mop(&p), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn evaluations_on_the_variety_are_feasible() {
        let (x, y) = (var(2, 0), var(2, 1));
        let circle = x.mul(&x).add(&y.mul(&y)).sub(&RealPoly::constant(2, 1.0));
        let mut p = MOPProblem::new(2, 3);
        p.equalities.push(circle);
        p.inequalities.push(RealPoly::constant(2, 4.0).sub(&x.mul(&x)));
        let sdp = build_mop(&p).unwrap();
        let t: f64 = 0.7;
        let e = evaluation_functional(&[t.cos(), t.sin()], 6);
        let report = sdp.check(e.values());
        assert!(report.equality_residual <= 1e-12);
        assert!(report.min_eigenvalues.iter().all(|&l| l >= -1e-12));
    }

    #[test]
    fn unconstrained_square_has_zero_bound() {
        let x = var(1, 0);
        let mut p = MOPProblem::new(1, 1);
        p.objective = Some(x.mul(&x));
        let sol = minimize(&p).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!(sol.value.abs() < 1e-6);
    }

    #[test]
    fn generic_element_on_a_line() {
        let sol = generic_element(2, &[var(2, 0)], &[], 2).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert_eq!(sol.rank_profile, [1, 2, 3]);
    }

    #[test]
    fn generic_element_of_a_point() {
        let (x, y) = (var(2, 0), var(2, 1));
        let sol = generic_element(2, &[x.mul(&x).add(&y.mul(&y))], &[], 2).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert_eq!(sol.rank_profile[1], 1);
        assert!(sol.is_flat());
        let sx = sol.sigma.pair(&x).unwrap();
        assert!(sx.abs() < 1e-6);
        assert!((sol.sigma.values()[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unconstrained_line_is_full_rank() {
        let sol = generic_element(1, &[], &[], 1).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert_eq!(sol.rank_profile, [1, 2]);
    }
}
