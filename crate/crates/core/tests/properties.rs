use nalgebra::DVector;
use proptest::prelude::*;

use realrad_core::annihilator::graded_basis;
use realrad_core::geometry::{Component, Ideal};
use realrad_core::moments::{generic_element, minimize, Ball, MOPProblem, MopOptions};
use realrad_core::polycore::{evaluation_functional, hankel_matrix, MomentSequence, Monomial, MonomialBasis, RealPoly};
use realrad_core::realness::{
    certify_hypersurface, project_component, sign_change_mop, test_real_radicality, Evidence, RealnessOptions,
    Verdict,
};
use realrad_core::sdp::SdpStatus;

fn circle() -> RealPoly {
    let (x, y) = (RealPoly::var(2, 0), RealPoly::var(2, 1));
    x.mul(&x).add(&y.mul(&y)).sub(&RealPoly::constant(2, 1.0))
}

fn evaluation_sum(points: &[(Vec<f64>, f64)], degree: u32) -> MomentSequence {
    let n = points[0].0.len();
    points
        .iter()
        .fold(MomentSequence::zeros(n, degree), |s, (p, w)| s.plus(&evaluation_functional(p, degree).scaled(*w)).unwrap())
}

#[test]
fn smaller_offsets_stay_feasible() {
    let xi = [2.0, 0.5];
    for eps in [0.01, 0.001] {
        let sol = sign_change_mop(&circle(), &xi, 1.0, eps, Some(3.0), 2, &MopOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal, "ε = {eps}");
    }
}

#[test]
fn ball_is_irrelevant_on_compact_hypersurfaces() {
    let (x, y) = (RealPoly::var(2, 0), RealPoly::var(2, 1));
    let ellipse = x.mul(&x).add(&y.mul(&y).scale(&4.0)).sub(&RealPoly::constant(2, 1.0));
    let squares = x.mul(&x).add(&y.mul(&y));
    for (h, xi) in [(circle(), [0.3, -0.2]), (ellipse, [1.5, 0.4]), (squares, [0.7, 0.6])] {
        let with = RealnessOptions::default();
        let without = RealnessOptions { ball: false, ..with };
        let a = certify_hypersurface(&h, Some(&xi), &with).unwrap();
        let b = certify_hypersurface(&h, Some(&xi), &without).unwrap();
        assert_eq!(a.verdict, b.verdict, "{}", h);
    }
}

#[test]
fn ranks_grow_with_the_relaxation_order() {
    let (x, y, z) = (RealPoly::var(3, 0), RealPoly::var(3, 1), RealPoly::var(3, 2));
    let cases: Vec<(usize, Vec<RealPoly>, Option<Ball>)> = vec![
        (2, vec![circle()], None),
        (3, vec![x.sub(&z), y], Some(Ball { center: vec![0.0; 3], radius: 2.0 })),
    ];
    for (n, h, ball) in cases {
        let mut profiles = Vec::new();
        for order in [3, 4] {
            let mut p = MOPProblem::new(n, order);
            p.equalities = h.clone();
            p.ball = ball.clone();
            let sol = minimize(&p).unwrap();
            assert_eq!(sol.status, SdpStatus::Optimal);
            profiles.push(sol.rank_profile);
        }
        for (k, (lo, hi)) in profiles[0].iter().zip(&profiles[1]).enumerate() {
            assert!(lo <= hi, "k = {k}: {:?}", profiles);
        }
    }
}

#[test]
fn generic_elements_are_supported_on_the_variety() {
    let sol = generic_element(2, &[circle()], &[], 3).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    let gb = graded_basis(&sol.sigma, 2, 1e-7).unwrap();
    assert_eq!(gb.k.len(), 1);
    let k = gb.k[0].scale(&(1.0 / gb.k[0].max_abs_coeff()));
    let c = circle();
    for (m, v) in c.terms() {
        assert!((k.coeff(m) - v).abs() < 1e-5, "{}", k);
    }
}

#[test]
fn independent_projections_agree() {
    let (x, y, z) = (RealPoly::var(3, 0), RealPoly::var(3, 1), RealPoly::var(3, 2));
    let parabola = Component::new(Ideal::float(3, vec![z.sub(&x), x.mul(&x).sub(&y)]).unwrap(), 1).unwrap();
    let (_, h1) = project_component(&parabola, 1).unwrap();
    let (_, h2) = project_component(&parabola, 2).unwrap();
    assert_eq!(h1.degree(), h2.degree());
    let v1 = test_real_radicality(&parabola, &RealnessOptions { seed: 1, ..Default::default() }).unwrap();
    let v2 = test_real_radicality(&parabola, &RealnessOptions { seed: 2, ..Default::default() }).unwrap();
    assert_eq!(v1.verdict, v2.verdict);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn real_verdicts_come_with_a_sign_change(seed in 0u64..1000) {
        let opts = RealnessOptions { seed, ..Default::default() };
        let cert = certify_hypersurface(&circle(), None, &opts).unwrap();
        if cert.verdict == Verdict::Real {
            let Evidence::SignChange { eta, .. } = &cert.evidence else { panic!("{:?}", cert.evidence) };
            prop_assert!(cert.h.eval(&cert.xi) * cert.h.eval(eta) < 0.0);
        }
    }
}

fn atoms() -> impl Strategy<Value = Vec<(Vec<f64>, f64)>> {
    (2usize..=3).prop_flat_map(|n| {
        proptest::collection::vec((proptest::collection::vec(-2.0f64..2.0, n), 0.2f64..2.0), 1..=6)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn standard_monomials_form_a_staircase(points in atoms()) {
        let sigma = evaluation_sum(&points, 6);
        let gb = graded_basis(&sigma, 2, 1e-7).unwrap();
        for b in &gb.b {
            for i in 0..b.nvars() {
                if let Some(lower) = Monomial::var(b.nvars(), i).quotient_of(b) {
                    prop_assert!(gb.b.contains(&lower), "{} in B but {} is not", b, lower);
                }
            }
        }
    }

    #[test]
    fn orthogonal_family_is_orthogonal(points in atoms()) {
        let sigma = evaluation_sum(&points, 6);
        let gb = graded_basis(&sigma, 2, 1e-7).unwrap();
        let basis = MonomialBasis::new(gb.nvars, 2);
        let h = hankel_matrix(&sigma, 2).unwrap().entries;
        let coords: Vec<DVector<f64>> = gb.p.iter().map(|p| DVector::from_vec(basis.coords(p, 2).unwrap())).collect();
        for i in 0..coords.len() {
            let vi = coords[i].dot(&(&h * &coords[i]));
            prop_assert!(vi > 0.0);
            for j in 0..i {
                let vj = coords[j].dot(&(&h * &coords[j]));
                let off = coords[i].dot(&(&h * &coords[j]));
                prop_assert!(off.abs() <= 1e-8 * vi.max(vj).max(1.0), "⟨p{}, p{}⟩ = {:e}", i, j, off);
            }
        }
    }

    #[test]
    fn small_squares_are_nearly_annihilated(points in atoms()) {
        // For PSD H: ‖Hk‖² ≤ λ_max · kᵀHk.
        let sigma = evaluation_sum(&points, 6);
        let gb = graded_basis(&sigma, 2, 1e-7).unwrap();
        let basis = MonomialBasis::new(gb.nvars, 2);
        let h = hankel_matrix(&sigma, 2).unwrap().entries;
        let lmax = h.clone().symmetric_eigen().eigenvalues.amax();
        for k in &gb.k {
            let c = DVector::from_vec(basis.coords(k, 2).unwrap());
            let hk = &h * &c;
            let square = c.dot(&hk);
            prop_assert!(square <= gb.threshold);
            // kᵀHk is only known up to rounding of order ε·λ_max·‖k‖².
            let rounding = 1e3 * f64::EPSILON * lmax * c.norm_squared();
            prop_assert!(hk.norm_squared() <= lmax * (square.max(0.0) + rounding));
        }
    }
}
