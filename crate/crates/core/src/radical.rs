//! The real-radical pipeline with degree escalation.
//!
//! For each annihilator degree `d` a generic element of `𝓛_{2d+2}(±f, g)` is
//! computed, its graded annihilator basis `K` extracted, and `K` is accepted when
//! its initial ideal is zero-dimensional, or when every component it describes
//! passes the sign-change test.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::annihilator::{flat_initial_test, graded_basis, reduce, GradedBasisResult};
use crate::error::{Error, Result};
use crate::geometry::{
    buchberger, dimension_of_staircase, eliminate_to_hypersurface, exact_dimension, random_projection, Component,
    Ideal, RATIONALIZE_TOL,
};
use crate::moments::{extract_minimizers, generic_element_with, Ball, MOPSolution, MopOptions};
use crate::polycore::{MomentSequence, Monomial, MonomialOrder, RealPoly};
use crate::realness::{project_component, test_real_radicality, Evidence, RealnessCertificate, RealnessOptions, Verdict};
use crate::sdp::SdpStatus;

/// How the variety of `K` is split into irreducible components.
#[derive(Clone, Debug, PartialEq)]
pub enum Provider {
    /// `(K)` is taken to be prime.
    Whole,
    /// Atoms of a flat generic element, one component per point.
    ZeroDimCluster,
    /// Components given by the caller, validated against `K`.
    UserSupplied(Vec<Component>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shortcut {
    /// The initial ideal of `K` is zero-dimensional.
    FlatZeroDim,
    /// `(K)` is prime and real.
    PrimeWhole,
    /// Every supplied component is real.
    Decomposed,
    /// No positive functional exists: the real variety is empty and the radical is `(1)`.
    EmptyVariety,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadicalOptions {
    /// First annihilator degree; defaults to `max deg f`.
    pub d_start: Option<u32>,
    pub d_max: u32,
    /// Relaxation order floor; the order used at degree `d` is `max(order, d + 1)`.
    pub order: Option<u32>,
    pub tau_zero: f64,
    pub tau_rank: f64,
    /// Radius of the ball `r² − ‖x‖² ≥ 0` added when there are no inequalities.
    pub auto_ball: Option<f64>,
    pub provider: Provider,
    pub seed: u64,
    pub epsilon: f64,
    pub radius: f64,
    pub mop: MopOptions,
}

impl Default for RadicalOptions {
    fn default() -> Self {
        RadicalOptions {
            d_start: None,
            d_max: 6,
            order: None,
            tau_zero: 1e-7,
            tau_rank: 1e-6,
            auto_ball: Some(5.0),
            provider: Provider::Whole,
            seed: 0,
            epsilon: 0.01,
            radius: 3.0,
            mop: MopOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ComponentReport {
    pub component: Component,
    pub certificate: RealnessCertificate,
    /// Pullbacks of hypersurface equations of `n + 1` generic projections.
    pub equations: Vec<RealPoly>,
}

#[derive(Clone, Debug)]
pub struct RadicalResult {
    pub nvars: usize,
    pub generators: Vec<RealPoly>,
    /// Leading monomials of `generators`.
    pub leading: Vec<Monomial>,
    pub components: Vec<ComponentReport>,
    /// Annihilator degree accepted.
    pub degree: u32,
    /// Relaxation order of the accepted generic element.
    pub order: u32,
    pub shortcut: Shortcut,
    /// `(order, rank H^k for k = 0..=order)` for every relaxation solved.
    pub rank_profiles: Vec<(u32, Vec<usize>)>,
    pub warnings: Vec<String>,
    pub basis: Option<GradedBasisResult>,
    pub sigma: Option<MomentSequence>,
}

/// Real radical of `(f)`.
pub fn real_radical(f: &[RealPoly], opts: &RadicalOptions) -> Result<RadicalResult> {
    let n = context(f)?;
    pipeline(n, f, &[], opts)
}

/// `√ˢ(f)` for `S = {g ≥ 0}` with `g` entering as localizing constraints.
pub fn s_radical_localizing(f: &[RealPoly], g: &[RealPoly], opts: &RadicalOptions) -> Result<RadicalResult> {
    let n = context(f)?;
    pipeline(n, f, g, opts)
}

/// `√ˢ(f)` through slack variables: the real radical of `f ∪ {g_j − s_j²}`
/// restricted to the original variables.
pub fn s_radical(f: &[RealPoly], g: &[RealPoly], opts: &RadicalOptions) -> Result<RadicalResult> {
    let slack = s_radical_transform(f, g)?;
    // The inequalities already bound the set; a ball would only cost accuracy.
    let bounded = RadicalOptions { auto_ball: if g.is_empty() { opts.auto_ball } else { None }, ..opts.clone() };
    let mut res = pipeline(slack.nvars(), &slack.equalities, &[], &bounded)?;
    if slack.slacks == 0 {
        return Ok(res);
    }
    let kept: Vec<(RealPoly, Monomial)> = res
        .generators
        .iter()
        .zip(&res.leading)
        .filter_map(|(p, m)| slack.restrict(p).map(|r| (r, restrict_monomial(m, slack.original))))
        .collect();
    res.generators = kept.iter().map(|k| k.0.clone()).collect();
    res.leading = kept.into_iter().map(|k| k.1).collect();
    res.nvars = slack.original;
    res.warnings.push(String::from("generators restricted to the original variables"));
    Ok(res)
}

fn restrict_monomial(m: &Monomial, n: usize) -> Monomial {
    Monomial::new(m.exps()[..n].to_vec())
}

fn context(f: &[RealPoly]) -> Result<usize> {
    let n = f.first().ok_or_else(|| Error::InvalidInput(String::from("no equations")))?.nvars();
    if let Some(p) = f.iter().find(|p| p.nvars() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.nvars() });
    }
    Ok(n)
}

/// `f ∪ {g_j − s_j²}` with the slack variables appended after the original ones.
#[derive(Clone, Debug, PartialEq)]
pub struct SlackSystem {
    pub original: usize,
    pub slacks: usize,
    pub equalities: Vec<RealPoly>,
}

impl SlackSystem {
    pub fn nvars(&self) -> usize {
        self.original + self.slacks
    }

    /// The polynomial in the original variables, or `None` when it involves a slack.
    pub fn restrict(&self, p: &RealPoly) -> Option<RealPoly> {
        if p.support_vars().iter().any(|&v| v >= self.original) {
            return None;
        }
        let map: Vec<usize> = (0..self.nvars()).map(|v| v.min(self.original.saturating_sub(1))).collect();
        Some(p.remap(self.original, &map))
    }
}

pub fn s_radical_transform(f: &[RealPoly], g: &[RealPoly]) -> Result<SlackSystem> {
    let n = context(f)?;
    if let Some(p) = g.iter().find(|p| p.nvars() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.nvars() });
    }
    let total = n + g.len();
    let embed: Vec<usize> = (0..n).collect();
    let mut equalities: Vec<RealPoly> = f.iter().map(|p| p.remap(total, &embed)).collect();
    for (j, gj) in g.iter().enumerate() {
        let s = RealPoly::var(total, n + j);
        equalities.push(gj.remap(total, &embed).sub(&s.mul(&s)));
    }
    Ok(SlackSystem { original: n, slacks: g.len(), equalities })
}

/// Relative residual under which a supplied component is accepted as a piece of `𝒱(K)`.
const VALIDATION_TOL: f64 = 1e-4;

/// Splits `𝒱(K)` into components according to the provider.
pub fn split_components(gb: &GradedBasisResult, provider: &Provider, sigma: &MomentSequence, tau_rank: f64) -> Result<Vec<Component>> {
    let n = gb.nvars;
    match provider {
        Provider::Whole => {
            let ideal = Ideal::float(n, gb.k.clone())?;
            Component::new(ideal, dimension_of_staircase(&gb.l, n)).map(|c| vec![c])
        }
        Provider::ZeroDimCluster => {
            if !flat_initial_test(&gb.l, n) {
                return Err(Error::ProviderMismatch(format!(
                    "staircase has dimension {}, clusters need 0",
                    dimension_of_staircase(&gb.l, n)
                )));
            }
            let ex = extract_minimizers(sigma, tau_rank)?;
            ex.points
                .into_iter()
                .map(|pt| {
                    let gens = (0..n).map(|i| RealPoly::var(n, i).sub(&RealPoly::constant(n, pt[i]))).collect();
                    let mut c = Component::new(Ideal::float(n, gens)?, 0)?;
                    c.samples.push(pt);
                    Ok(c)
                })
                .collect()
        }
        Provider::UserSupplied(list) => {
            for (i, c) in list.iter().enumerate() {
                if c.ideal.nvars != n {
                    return Err(Error::ProviderMismatch(format!("component {} lives in {} variables", i, c.ideal.nvars)));
                }
                let exact = c.ideal.exact_generators(RATIONALIZE_TOL);
                let dim = exact_dimension(&exact)?;
                if dim != c.dimension {
                    return Err(Error::ProviderMismatch(format!("component {} has dimension {}, not {}", i, dim, c.dimension)));
                }
                let worst = containment_residual(&gb.k, c)?;
                if worst > VALIDATION_TOL {
                    return Err(Error::ProviderMismatch(format!("component {} does not lie on 𝒱(K): residual {:e}", i, worst)));
                }
            }
            Ok(list.clone())
        }
    }
}

/// Largest normal form of an element of `K` modulo the component's ideal, relative to its size.
pub fn containment_residual(k: &[RealPoly], c: &Component) -> Result<f64> {
    let gb: Vec<RealPoly> = buchberger(&c.ideal.exact_generators(RATIONALIZE_TOL), MonomialOrder::Grevlex)?
        .iter()
        .map(|p| p.to_f64())
        .collect();
    let leads: Vec<Monomial> = gb.iter().filter_map(|p| p.leading_monomial().cloned()).collect();
    Ok(k.iter()
        .map(|p| reduce(p, &gb, &leads).max_abs_coeff() / p.max_abs_coeff().max(1.0))
        .fold(0.0, f64::max))
}

/// Hypersurface equations of `n + 1` projections of `V`, pulled back to `ℝⁿ`.
pub fn defining_equations(v: &Component, seed: u64) -> Result<Vec<RealPoly>> {
    let n = v.ideal.nvars;
    let k = v.dimension;
    if k >= n {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..=n as u64 {
        let (pi, h) = if j == 0 {
            project_component(v, seed)?
        } else {
            let s = seed.wrapping_add(2 * j);
            let pi = random_projection(n, k, s)?;
            match eliminate_to_hypersurface(&v.ideal, &pi) {
                Ok(h) => (pi, h),
                Err(Error::EliminationFailure(_)) => {
                    let pi = random_projection(n, k, s.wrapping_add(1))?;
                    let h = eliminate_to_hypersurface(&v.ideal, &pi)?;
                    (pi, h)
                }
                Err(e) => return Err(e),
            }
        };
        let forms: Vec<RealPoly> = pi.linear_forms().iter().map(|p| p.to_f64()).collect();
        out.push(h.substitute(&forms));
    }
    Ok(out)
}

/// The generic element of one relaxation order, reused while the order is unchanged.
struct Relaxation {
    order: u32,
    sol: MOPSolution,
}

fn pipeline(n: usize, f: &[RealPoly], g: &[RealPoly], opts: &RadicalOptions) -> Result<RadicalResult> {
    let max_deg = f.iter().map(RealPoly::degree).max().unwrap_or(1).max(1);
    let d_start = opts.d_start.unwrap_or(max_deg);
    if opts.d_max < d_start {
        return Err(Error::InvalidInput(format!("d_max = {} is below the starting degree {}", opts.d_max, d_start)));
    }
    let mut ineq = g.to_vec();
    if ineq.is_empty() {
        if let Some(r) = opts.auto_ball {
            ineq.push(Ball { center: vec![0.0; n], radius: r }.polynomial());
        }
    }
    let mop = MopOptions { tau_rank: opts.tau_rank, ..opts.mop };
    let mut warnings = vec![String::from("embedded components of (K) are not excluded")];
    let mut rank_profiles: Vec<(u32, Vec<usize>)> = Vec::new();
    let mut cache: Option<Relaxation> = None;
    let mut diagnostics: Vec<String> = Vec::new();

    for d in d_start..=opts.d_max {
        let order = opts.order.unwrap_or(0).max(d + 1);
        if cache.as_ref().map(|c| c.order) != Some(order) {
            let sol = generic_element_with(n, f, &ineq, order, &mop)?;
            rank_profiles.push((order, sol.rank_profile.clone()));
            cache = Some(Relaxation { order, sol });
        }
        let sol = &cache.as_ref().unwrap().sol;
        match sol.status {
            SdpStatus::Optimal => {}
            SdpStatus::Infeasible => {
                return Ok(RadicalResult {
                    nvars: n,
                    generators: vec![RealPoly::constant(n, 1.0)],
                    leading: vec![Monomial::one(n)],
                    components: Vec::new(),
                    degree: d,
                    order,
                    shortcut: Shortcut::EmptyVariety,
                    rank_profiles,
                    warnings,
                    basis: None,
                    sigma: None,
                });
            }
            status => return Err(Error::Solver { status, order }),
        }
        let gb = graded_basis(&sol.sigma, d, opts.tau_zero)?;
        let done = |shortcut, components, warnings| RadicalResult {
            nvars: n,
            generators: gb.k.clone(),
            leading: gb.l.clone(),
            components,
            degree: d,
            order,
            shortcut,
            rank_profiles: rank_profiles.clone(),
            warnings,
            basis: Some(gb.clone()),
            sigma: Some(sol.sigma.clone()),
        };

        if flat_initial_test(&gb.l, n) {
            let mut components = Vec::new();
            if opts.provider == Provider::ZeroDimCluster {
                for c in split_components(&gb, &opts.provider, &sol.sigma, opts.tau_rank)? {
                    let certificate = atom_certificate(&c, opts);
                    components.push(ComponentReport { component: c, certificate, equations: Vec::new() });
                }
            }
            return Ok(done(Shortcut::FlatZeroDim, components, warnings));
        }

        let components = split_components(&gb, &opts.provider, &sol.sigma, opts.tau_rank)?;
        let mut reports = Vec::with_capacity(components.len());
        let mut failed = None;
        for (i, c) in components.iter().enumerate() {
            match certify_with_redraw(c, opts) {
                Ok(cert) if cert.verdict == Verdict::Real => {
                    reports.push(ComponentReport { component: c.clone(), certificate: cert, equations: Vec::new() })
                }
                Ok(cert) => {
                    failed = Some(format!("d = {}: component {} is {:?}", d, i, cert.verdict));
                    break;
                }
                Err(Error::EliminationFailure(e)) => {
                    failed = Some(format!("d = {}: component {}: {}", d, i, e));
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        match failed {
            None if opts.provider == Provider::Whole => return Ok(done(Shortcut::PrimeWhole, reports, warnings)),
            None => {
                for (i, r) in reports.iter_mut().enumerate() {
                    r.equations = defining_equations(&r.component, opts.seed.wrapping_add(100 * i as u64))?;
                }
                return Ok(done(Shortcut::Decomposed, reports, warnings));
            }
            Some(msg) => {
                diagnostics.push(format!("{}; ranks {:?}", msg, sol.rank_profile));
                warnings.push(msg);
            }
        }
    }
    Err(Error::DegreeExhausted { d_max: opts.d_max, diagnostics: diagnostics.join("\n") })
}

fn realness_options(opts: &RadicalOptions, seed: u64) -> RealnessOptions {
    RealnessOptions { epsilon: opts.epsilon, radius: opts.radius, seed, mop: opts.mop, ..RealnessOptions::default() }
}

/// One re-draw of the projection and base point before a component is given up.
fn certify_with_redraw(c: &Component, opts: &RadicalOptions) -> Result<RealnessCertificate> {
    let first = test_real_radicality(c, &realness_options(opts, opts.seed));
    match first {
        Ok(cert) if cert.verdict == Verdict::Real => Ok(cert),
        Ok(_) | Err(Error::EliminationFailure(_)) => {
            test_real_radicality(c, &realness_options(opts, opts.seed.wrapping_add(0x5eed)))
        }
        Err(e) => Err(e),
    }
}

/// Atoms of a positive functional are real points.
fn atom_certificate(c: &Component, opts: &RadicalOptions) -> RealnessCertificate {
    let pt = c.samples.first().cloned().unwrap_or_default();
    RealnessCertificate {
        verdict: Verdict::Real,
        h: RealPoly::zero(c.ideal.nvars),
        projection: None,
        xi: pt.clone(),
        s: 0.0,
        epsilon: opts.epsilon,
        radius: opts.radius,
        order: 0,
        evidence: Evidence::SignChange { eta: pt, h_eta: 0.0, flat_order: 0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(n: usize, i: usize) -> RealPoly {
        RealPoly::var(n, i)
    }

    #[test]
    fn sum_of_two_squares() {
        let (x, y) = (var(2, 0), var(2, 1));
        let res = real_radical(&[x.mul(&x).add(&y.mul(&y))], &RadicalOptions::default()).unwrap();
        assert_eq!(res.shortcut, Shortcut::FlatZeroDim);
        assert_eq!(res.leading, [Monomial::var(2, 0), Monomial::var(2, 1)]);
        assert!(res.generators[0].distance(&x) < 1e-6);
        assert!(res.generators[1].distance(&y) < 1e-6);
    }

    #[test]
    fn zero_dim_clusters() {
        let (x, y) = (var(2, 0), var(2, 1));
        let opts = RadicalOptions { provider: Provider::ZeroDimCluster, ..RadicalOptions::default() };
        let res = real_radical(&[x.mul(&x).add(&y.mul(&y))], &opts).unwrap();
        assert_eq!(res.components.len(), 1);
        let pt = &res.components[0].component.samples[0];
        assert!(pt.iter().all(|c| c.abs() < 1e-4));
    }

    #[test]
    fn circle_is_prime_and_real() {
        let (x, y) = (var(2, 0), var(2, 1));
        let circle = x.mul(&x).add(&y.mul(&y)).sub(&RealPoly::constant(2, 1.0));
        let res = real_radical(core::slice::from_ref(&circle), &RadicalOptions::default()).unwrap();
        assert_eq!(res.shortcut, Shortcut::PrimeWhole);
        assert_eq!(res.generators.len(), 1);
        assert!(res.generators[0].distance(&circle) < 1e-6);
        assert_eq!(res.components[0].component.dimension, 1);
    }

    #[test]
    fn empty_real_variety() {
        let x = var(1, 0);
        let res = real_radical(&[x.mul(&x).add(&RealPoly::constant(1, 1.0))], &RadicalOptions::default()).unwrap();
        assert_eq!(res.shortcut, Shortcut::EmptyVariety);
    }

    #[test]
    fn slack_transform() {
        let (x, y) = (var(2, 0), var(2, 1));
        let t = s_radical_transform(core::slice::from_ref(&x), &[]).unwrap();
        assert_eq!(t.equalities, [x.clone()]);
        let t = s_radical_transform(core::slice::from_ref(&x), core::slice::from_ref(&y)).unwrap();
        assert_eq!(t.nvars(), 3);
        let s = var(3, 2);
        assert_eq!(t.equalities[1], var(3, 1).sub(&s.mul(&s)));
        assert_eq!(t.restrict(&var(3, 1)), Some(y));
        assert_eq!(t.restrict(&s), None);
    }

    #[test]
    fn pulled_back_equations_vanish() {
        let (x, y, z) = (var(3, 0), var(3, 1), var(3, 2));
        let parabola = Component::new(Ideal::float(3, vec![z.sub(&x), x.mul(&x).sub(&y)]).unwrap(), 1).unwrap();
        let eqs = defining_equations(&parabola, 11).unwrap();
        assert_eq!(eqs.len(), 4);
        for e in &eqs {
            for i in 0..20 {
                let t = -1.5 + 0.15 * i as f64;
                assert!(e.eval(&[t, t * t, t]).abs() < 1e-8);
            }
        }
        let one = RealPoly::constant(3, 1.0);
        let point = Component::new(Ideal::float(3, vec![x.sub(&one), y.sub(&one), z.sub(&one)]).unwrap(), 0).unwrap();
        for e in defining_equations(&point, 3).unwrap() {
            assert_eq!(e.degree(), 1);
            assert!(e.eval(&[1.0, 1.0, 1.0]).abs() < 1e-12);
        }
        let line = Component::new(Ideal::float(3, vec![y.clone(), z.clone()]).unwrap(), 1).unwrap();
        for e in defining_equations(&line, 5).unwrap() {
            assert!(e.eval(&[0.7, 0.0, 0.0]).abs() < 1e-12);
        }
    }
}
