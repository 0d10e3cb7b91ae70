//! Real-radicality of irreducible components through sign changes.
//!
//! A component of dimension `k` is projected to a hypersurface `h = 0` in
//! `ℝ^{k+1}`. From a base point `ξ` with `h(ξ) ≠ 0` we look for the closest
//! point of `h + sε = 0`, `s = sign h(ξ)`, inside a ball around `ξ`. Infeasibility
//! means `h` keeps its sign there; a flat minimizer `η` with `h(ξ)h(η) < 0`
//! certifies the sign change.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{
    eliminate_to_hypersurface, random_projection, rationalize, Component, Generators, ProjectionMap,
    RATIONALIZE_TOL,
};
use crate::moments::{extract_minimizers, minimize_with, Ball, MOPProblem, MOPSolution, MopOptions};
use crate::polycore::RealPoly;
use crate::sdp::SdpStatus;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Real,
    NotReal,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Evidence {
    /// A flat minimizer on the other side of the hypersurface.
    SignChange { eta: Vec<f64>, h_eta: f64, flat_order: u32 },
    /// The shifted hypersurface misses the ball at this relaxation order.
    Infeasible { order: u32, certificate_residual: Option<f64> },
    /// Rationalized generators drifted too far from the numeric ones.
    Unrationalizable { residual: f64 },
    /// The component is the whole space.
    Ambient,
    /// No decision was reached; one status per order tried.
    Undecided { statuses: Vec<(u32, SdpStatus)> },
}

#[derive(Clone, Debug)]
pub struct RealnessCertificate {
    pub verdict: Verdict,
    pub h: RealPoly,
    pub projection: Option<ProjectionMap>,
    pub xi: Vec<f64>,
    /// `sign h(ξ)`.
    pub s: f64,
    pub epsilon: f64,
    pub radius: f64,
    /// Relaxation order of the last MOP solved.
    pub order: u32,
    pub evidence: Evidence,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealnessOptions {
    pub epsilon: f64,
    pub radius: f64,
    /// Orders tried beyond the first, `⌈deg h/2⌉ + 1`.
    pub extra_orders: u32,
    /// Keep the ball `r² − ‖x − ξ‖² ≥ 0`; dropping it is sound when `𝒱_ℝ(h)` is compact.
    pub ball: bool,
    pub seed: u64,
    pub mop: MopOptions,
}

impl Default for RealnessOptions {
    fn default() -> Self {
        RealnessOptions { epsilon: 0.01, radius: 3.0, extra_orders: 3, ball: true, seed: 0, mop: MopOptions::default() }
    }
}

/// Base points are re-drawn until `|h(ξ)|` exceeds this multiple of `ε`.
const BASE_POINT_MARGIN: f64 = 10.0;
const BASE_POINT_DRAWS: usize = 10_000;
/// Doublings of the ball radius when the ball alone causes infeasibility.
const MAX_RADIUS_GROWTH: u32 = 3;

/// `inf ⟨σ, ‖x − ξ‖²⟩` over `𝓛_{2d}(±(h + sε), r² − ‖x − ξ‖²)`, `⟨σ, 1⟩ = 1`.
pub fn sign_change_mop(
    h: &RealPoly,
    xi: &[f64],
    s: f64,
    epsilon: f64,
    radius: Option<f64>,
    d: u32,
    opts: &MopOptions,
) -> Result<MOPSolution> {
    let n = h.nvars();
    if xi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: xi.len() });
    }
    let mut dist = RealPoly::zero(n);
    for (i, &c) in xi.iter().enumerate() {
        let t = RealPoly::var(n, i).sub(&RealPoly::constant(n, c));
        dist = dist.add(&t.mul(&t));
    }
    let mut p = MOPProblem::new(n, d);
    p.objective = Some(dist);
    p.equalities.push(h.add(&RealPoly::constant(n, s * epsilon)));
    p.ball = radius.map(|r| Ball { center: xi.to_vec(), radius: r });
    minimize_with(&p, opts)
}

/// Draws `ξ ~ (r/2)·N(0, I)` until `|h(ξ)| > 10ε`.
pub fn draw_base_point(h: &RealPoly, epsilon: f64, radius: f64, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7369_676e);
    for _ in 0..BASE_POINT_DRAWS {
        let xi: Vec<f64> = (0..h.nvars())
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                0.5 * radius * z
            })
            .collect();
        if h.eval(&xi).abs() > BASE_POINT_MARGIN * epsilon {
            return Ok(xi);
        }
    }
    Err(Error::InvalidInput(String::from("no base point with h(ξ) away from zero")))
}

/// The sign-change test on an explicit hypersurface; `xi = None` draws a base point.
pub fn certify_hypersurface(h: &RealPoly, xi: Option<&[f64]>, opts: &RealnessOptions) -> Result<RealnessCertificate> {
    if !(opts.epsilon > 0.0 && opts.radius > 0.0) {
        return Err(Error::InvalidInput(format!("ε = {} and r = {} must be positive", opts.epsilon, opts.radius)));
    }
    let xi = match xi {
        Some(x) => x.to_vec(),
        None => draw_base_point(h, opts.epsilon, opts.radius, opts.seed)?,
    };
    let hxi = h.eval(&xi);
    if hxi == 0.0 {
        return Err(Error::InvalidInput(String::from("h vanishes at the base point")));
    }
    let s = hxi.signum();
    let start = h.degree().div_ceil(2) + 1;
    let mut cert = RealnessCertificate {
        verdict: Verdict::Inconclusive,
        h: h.clone(),
        projection: None,
        xi: xi.clone(),
        s,
        epsilon: opts.epsilon,
        radius: opts.radius,
        order: start,
        evidence: Evidence::Undecided { statuses: Vec::new() },
    };
    let mut statuses = Vec::new();
    let mut radius = opts.radius;
    let mut growths = 0;
    let mut d = start;
    while d <= start + opts.extra_orders {
        cert.order = d;
        let ball = opts.ball.then_some(radius);
        let sol = sign_change_mop(h, &xi, s, opts.epsilon, ball, d, &opts.mop)?;
        statuses.push((d, sol.status));
        match sol.status {
            SdpStatus::Infeasible => {
                // Emptiness inside the ball only matters if the unrestricted program agrees.
                let confirmed = if ball.is_some() {
                    let open = sign_change_mop(h, &xi, s, opts.epsilon, None, d, &opts.mop)?;
                    open.status == SdpStatus::Infeasible
                } else {
                    true
                };
                if confirmed {
                    cert.verdict = Verdict::NotReal;
                    cert.radius = radius;
                    cert.evidence = Evidence::Infeasible { order: d, certificate_residual: sol.certificate_residual };
                    return Ok(cert);
                }
                if growths < MAX_RADIUS_GROWTH {
                    growths += 1;
                    radius *= 2.0;
                    continue;
                }
            }
            SdpStatus::Optimal if sol.is_flat() => {
                let flat_order = sol.flat_order.unwrap();
                if let Ok(ex) = extract_minimizers(&sol.sigma, opts.mop.tau_rank) {
                    let best = ex
                        .points
                        .iter()
                        .map(|eta| (eta, h.eval(eta)))
                        .filter(|(_, v)| v.abs() > 0.5 * opts.epsilon && hxi * v < 0.0)
                        .min_by(|a, b| distance(a.0, &xi).total_cmp(&distance(b.0, &xi)));
                    if let Some((eta, h_eta)) = best {
                        cert.verdict = Verdict::Real;
                        cert.radius = radius;
                        cert.evidence = Evidence::SignChange { eta: eta.clone(), h_eta, flat_order };
                        return Ok(cert);
                    }
                    // A flat minimizer too close to h = 0 settles nothing.
                    break;
                }
            }
            _ => {}
        }
        d += 1;
    }
    cert.evidence = Evidence::Undecided { statuses };
    Ok(cert)
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Projects the component to a hypersurface and runs the sign-change test there.
pub fn test_real_radicality(v: &Component, opts: &RealnessOptions) -> Result<RealnessCertificate> {
    let n = v.ideal.nvars;
    let k = v.dimension;
    if k >= n {
        return Ok(RealnessCertificate {
            verdict: Verdict::Real,
            h: RealPoly::zero(n),
            projection: None,
            xi: Vec::new(),
            s: 0.0,
            epsilon: opts.epsilon,
            radius: opts.radius,
            order: 0,
            evidence: Evidence::Ambient,
        });
    }
    let drift = rationalization_drift(v);
    let (pi, h) = project_component(v, opts.seed)?;
    if drift > RATIONALIZE_TOL {
        return Ok(RealnessCertificate {
            verdict: Verdict::Inconclusive,
            h,
            projection: Some(pi),
            xi: Vec::new(),
            s: 0.0,
            epsilon: opts.epsilon,
            radius: opts.radius,
            order: 0,
            evidence: Evidence::Unrationalizable { residual: drift },
        });
    }
    let mut cert = certify_hypersurface(&h, None, opts)?;
    cert.projection = Some(pi);
    Ok(cert)
}

/// A projection and the hypersurface equation of the image, re-drawing once on failure.
pub fn project_component(v: &Component, seed: u64) -> Result<(ProjectionMap, RealPoly)> {
    let n = v.ideal.nvars;
    let k = v.dimension;
    let first = if k + 1 == n { ProjectionMap::identity(n) } else { random_projection(n, k, seed)? };
    match eliminate_to_hypersurface(&v.ideal, &first) {
        Ok(h) => Ok((first, h)),
        Err(Error::EliminationFailure(_)) => {
            let pi = random_projection(n, k, seed.wrapping_add(1))?;
            let h = eliminate_to_hypersurface(&v.ideal, &pi)?;
            Ok((pi, h))
        }
        Err(e) => Err(e),
    }
}

/// Largest coefficient change caused by rationalizing the generators.
pub fn rationalization_drift(v: &Component) -> f64 {
    match &v.ideal.generators {
        Generators::Exact(_) => 0.0,
        Generators::Float(g) => {
            g.iter().map(|p| p.distance(&rationalize(p, RATIONALIZE_TOL).to_f64())).fold(0.0, f64::max)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Ideal;
    use crate::polycore::RationalPoly;

    fn circle() -> RealPoly {
        let (x, y) = (RealPoly::var(2, 0), RealPoly::var(2, 1));
        x.mul(&x).add(&y.mul(&y)).sub(&RealPoly::constant(2, 1.0))
    }

    #[test]
    fn sum_of_squares_is_infeasible() {
        let (x, y) = (RealPoly::var(2, 0), RealPoly::var(2, 1));
        let h = x.mul(&x).add(&y.mul(&y));
        let sol = sign_change_mop(&h, &[1.0, 1.0], 1.0, 0.01, Some(3.0), 2, &MopOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn concentric_circle_distance() {
        let xi = [2.0, 0.0];
        let sol = sign_change_mop(&circle(), &xi, 1.0, 0.01, Some(3.0), 2, &MopOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        let gap = 2.0 - 0.99f64.sqrt();
        assert!((sol.value - gap * gap).abs() < 1e-6);
    }

    #[test]
    fn shifted_line() {
        let h = RealPoly::var(2, 0);
        let sol = sign_change_mop(&h, &[1.0, 0.0], 1.0, 0.01, Some(3.0), 2, &MopOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        let ex = extract_minimizers(&sol.sigma, 1e-6).unwrap();
        assert!(distance(&ex.points[0], &[-0.01, 0.0]) < 1e-5);
    }

    #[test]
    fn fixed_base_point_certificates() {
        let xi = [-1.5667884102749219, -0.5028780359864093];
        let cert = certify_hypersurface(&circle(), Some(&xi), &RealnessOptions::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::Real);
        let Evidence::SignChange { eta, .. } = &cert.evidence else { panic!("{:?}", cert.evidence) };
        assert!(circle().eval(&xi) * circle().eval(eta) < 0.0);
        assert!(distance(eta, &[-0.9473807839956285, -0.30408822493309284]) < 1e-4);
    }

    #[test]
    fn cone_component_is_not_real() {
        let v: Vec<RationalPoly> = (0..3).map(|i| RationalPoly::var(3, i)).collect();
        let f = v[0].mul(&v[0]).add(&v[1].mul(&v[1])).add(&v[2].mul(&v[2]));
        let comp = Component::new(Ideal::exact(3, alloc::vec![f]).unwrap(), 2).unwrap();
        let cert = test_real_radicality(&comp, &RealnessOptions::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::NotReal);
    }

    #[test]
    fn points_and_lines_are_real() {
        let (x, y, z) = (RealPoly::var(3, 0), RealPoly::var(3, 1), RealPoly::var(3, 2));
        let one = RealPoly::constant(3, 1.0);
        let point = Component::new(Ideal::float(3, alloc::vec![x.sub(&one), y.sub(&one), z.sub(&one)]).unwrap(), 0).unwrap();
        let c = test_real_radicality(&point, &RealnessOptions::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Real, "{:?} {:?} {:?}", c.h, c.xi, c.evidence);
        let line = Component::new(Ideal::float(3, alloc::vec![x.sub(&z), y]).unwrap(), 1).unwrap();
        assert_eq!(test_real_radicality(&line, &RealnessOptions::default()).unwrap().verdict, Verdict::Real);
    }
}
