//! Homogeneous self-dual interior-point method.
//!
//! After eliminating equalities (`y = y0 + N z`) the problem reads
//! `max bᵀz  s.t.  C − A*(z) ⪰ 0` with primal `min ⟨C, X⟩, A(X) = b, X ⪰ 0`, where
//! `A*(z) = Σ_k z_k F_k`. The embedding
//!
//! ```text
//! A(X) − bτ = 0,   A*(z) + S − Cτ = 0,   ⟨C, X⟩ − bᵀz + κ = 0
//! ```
//!
//! is followed with Nesterov-Todd scaling and Mehrotra's predictor-corrector.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use super::linalg::{lower_inverse, min_eigenvalue, packed_index, packed_len, smat, svec, symmetrize, PivotedQr};
use super::{InfeasibilityCertificate, SdpOptions, SdpProblem, SdpSolution, SdpStatus};

const SQRT2: f64 = core::f64::consts::SQRT_2;

/// Equality elimination `y = y0 + N z`.
struct Reduction {
    y0: DVector<f64>,
    null: DMatrix<f64>,
    qr: Option<PivotedQr>,
    row_scale: Vec<f64>,
}

fn reduce(p: &SdpProblem, opts: &SdpOptions) -> Result<Reduction, InfeasibilityCertificate> {
    let n = p.nvars;
    let e = p.equalities.len();
    let inconsistent = |lambda: DVector<f64>| InfeasibilityCertificate {
        blocks: p.blocks.iter().map(|b| DMatrix::zeros(b.dim, b.dim)).collect(),
        multipliers: lambda,
        residual: 0.0,
    };
    if e == 0 {
        return Ok(Reduction { y0: DVector::zeros(n), null: DMatrix::identity(n, n), qr: None, row_scale: vec![] });
    }
    let mut bt = DMatrix::zeros(n, e);
    let mut rhs = DVector::zeros(e);
    let mut row_scale = vec![1.0; e];
    let rhs_max = p.equalities.iter().fold(1.0f64, |a, q| a.max(q.rhs.abs()));
    for (j, eq) in p.equalities.iter().enumerate() {
        for &(i, c) in &eq.coeffs {
            bt[(i, j)] += c;
        }
        let norm = bt.column(j).norm();
        if norm == 0.0 {
            if eq.rhs.abs() > opts.equality_rank_tol * rhs_max {
                let mut lambda = DVector::zeros(e);
                lambda[j] = 1.0 / eq.rhs;
                return Err(inconsistent(lambda));
            }
            continue;
        }
        bt.column_mut(j).scale_mut(1.0 / norm);
        rhs[j] = eq.rhs / norm;
        row_scale[j] = norm;
    }
    let qr = PivotedQr::new(bt, opts.equality_rank_tol);
    let (y0, worst, worst_col) = qr.solve_transposed(&rhs);
    let scale = rhs.iter().fold(1.0f64, |a, r| a.max(r.abs()));
    if worst > 1e3 * opts.equality_rank_tol * scale {
        let col = worst_col.expect("dependent column");
        let dep = qr.dependency(col);
        let t = dep.dot(&rhs);
        let lambda = DVector::from_fn(e, |i, _| dep[i] / row_scale[i] / t);
        let mut cert = inconsistent(lambda);
        cert.residual = p.certificate_residual(&cert);
        return Err(cert);
    }
    let null = qr.complement();
    Ok(Reduction { y0, null, qr: Some(qr), row_scale })
}

/// The conic problem left after elimination, with `C` and `b` scaled to unit size.
struct Reduced {
    dims: Vec<usize>,
    f: Vec<DMatrix<f64>>,
    c: Vec<DVector<f64>>,
    cm: Vec<DMatrix<f64>>,
    b: DVector<f64>,
    c_scale: f64,
    m: usize,
}

impl Reduced {
    fn build(p: &SdpProblem, red: &Reduction) -> Self {
        let m = red.null.ncols();
        let dims: Vec<usize> = p.blocks.iter().map(|b| b.dim).collect();
        let mut f = Vec::with_capacity(dims.len());
        let mut c = Vec::with_capacity(dims.len());
        for blk in &p.blocks {
            let mut fj = DMatrix::zeros(packed_len(blk.dim), m);
            for (i, e) in &blk.terms {
                let w = if e.row == e.col { 1.0 } else { SQRT2 };
                let row = packed_index(e.row, e.col);
                for k in 0..m {
                    fj[(row, k)] -= w * e.value * red.null[(*i, k)];
                }
            }
            f.push(fj);
            c.push(svec(&blk.eval(red.y0.as_slice())));
        }
        let mut b = if p.objective.is_empty() {
            DVector::zeros(m)
        } else {
            -(red.null.transpose() * DVector::from_column_slice(&p.objective))
        };
        let c_scale = c.iter().fold(1.0f64, |a, cj| a.max(cj.norm()));
        for cj in &mut c {
            cj.scale_mut(1.0 / c_scale);
        }
        let b_scale = b.norm().max(1.0);
        b.scale_mut(1.0 / b_scale);
        let cm = c.iter().zip(&dims).map(|(cj, &n)| smat(cj.as_slice(), n)).collect();
        Reduced { dims, f, c, cm, b, c_scale, m }
    }

    fn a_op(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for (fj, xj) in self.f.iter().zip(x) {
            out.gemv_tr(1.0, fj, &svec(xj), 1.0);
        }
        out
    }

    fn a_adj(&self, z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.f.iter().zip(&self.dims).map(|(fj, &n)| smat((fj * z).as_slice(), n)).collect()
    }

    fn c_dot(&self, x: &[DMatrix<f64>]) -> f64 {
        self.cm.iter().zip(x).map(|(c, x)| c.dot(x)).sum()
    }
}

/// Nesterov-Todd scaling of one block: `W = G Gᵀ` with `Gᵀ S G = G⁻¹ X G⁻ᵀ = Λ`.
struct Scaling {
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    lambda: DVector<f64>,
    lx_inv: DMatrix<f64>,
    ls_inv: DMatrix<f64>,
}

impl Scaling {
    fn new(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Option<Self> {
        let lx = x.clone().cholesky()?.unpack();
        let ls = s.clone().cholesky()?.unpack();
        let svd = (ls.transpose() * &lx).svd(true, true);
        let v = svd.v_t?.transpose();
        let d = svd.singular_values;
        if d.iter().any(|&l| !(l > 0.0)) {
            return None;
        }
        let dm = d.map(|l| 1.0 / l.sqrt());
        let g = &lx * &v * DMatrix::from_diagonal(&dm);
        let lx_inv = lower_inverse(&lx);
        let g_inv = DMatrix::from_diagonal(&d.map(|l| l.sqrt())) * v.transpose() * &lx_inv;
        Some(Scaling { g, g_inv, lambda: d, lx_inv, ls_inv: lower_inverse(&ls) })
    }

    /// `Gᵀ M G`.
    fn congruence(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        self.g.transpose() * m * &self.g
    }

    /// `G M Gᵀ`.
    fn expand(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        &self.g * m * self.g.transpose()
    }
}

struct Iterate {
    x: Vec<DMatrix<f64>>,
    s: Vec<DMatrix<f64>>,
    z: DVector<f64>,
    tau: f64,
    kappa: f64,
}

struct Direction {
    x: Vec<DMatrix<f64>>,
    s: Vec<DMatrix<f64>>,
    z: DVector<f64>,
    tau: f64,
    kappa: f64,
}

struct Residuals {
    r1: DVector<f64>,
    r2: Vec<DMatrix<f64>>,
    r3: f64,
}

/// Newton system data shared by predictor and corrector.
struct Newton<'a> {
    red: &'a Reduced,
    scal: Vec<Scaling>,
    ftil: Vec<DMatrix<f64>>,
    ctil: Vec<DMatrix<f64>>,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    a_c: DVector<f64>,
    c2: f64,
    v: DVector<f64>,
}

impl<'a> Newton<'a> {
    fn new(red: &'a Reduced, scal: Vec<Scaling>) -> Option<Self> {
        let m = red.m;
        let mut schur = DMatrix::zeros(m, m);
        let mut a_c = DVector::zeros(m);
        let mut c2 = 0.0;
        let mut ftil = Vec::with_capacity(scal.len());
        let mut ctil = Vec::with_capacity(scal.len());
        for ((sc, fj), (cm, &n)) in scal.iter().zip(&red.f).zip(red.cm.iter().zip(&red.dims)) {
            let mut ft = DMatrix::zeros(packed_len(n), m);
            for l in 0..m {
                let fl = smat(fj.column(l).as_slice(), n);
                ft.set_column(l, &svec(&sc.congruence(&fl)));
            }
            schur.gemm_tr(1.0, &ft, &ft, 1.0);
            let ct = sc.congruence(cm);
            a_c.gemv_tr(1.0, &ft, &svec(&ct), 1.0);
            c2 += ct.norm_squared();
            ftil.push(ft);
            ctil.push(ct);
        }
        symmetrize(&mut schur);
        let diag_max = (0..m).map(|i| schur[(i, i)]).fold(0.0, f64::max).max(1e-300);
        let mut chol = None;
        let mut reg = 0.0;
        for _ in 0..6 {
            let mut mm = schur.clone();
            for i in 0..m {
                mm[(i, i)] += reg * diag_max;
            }
            if let Some(c) = mm.cholesky() {
                chol = Some(c);
                break;
            }
            reg = if reg == 0.0 { 1e-14 } else { reg * 100.0 };
        }
        let chol = chol?;
        let v = chol.solve(&(&a_c + &red.b));
        Some(Newton { red, scal, ftil, ctil, chol, a_c, c2, v })
    }

    fn solve(&self, it: &Iterate, res: &Residuals, rx: &[DMatrix<f64>], rtau: f64, eta: f64) -> Direction {
        let red = self.red;
        let mut rhs = -eta * &res.r1;
        let mut c1 = 0.0;
        for j in 0..red.dims.len() {
            let t = self.scal[j].congruence(&res.r2[j]);
            rhs.gemv_tr(-1.0, &red.f[j], &svec(&rx[j]), 1.0);
            rhs.gemv_tr(-eta, &self.ftil[j], &svec(&t), 1.0);
            c1 += red.cm[j].dot(&rx[j]) + eta * self.ctil[j].dot(&t);
        }
        let u = self.chol.solve(&rhs);
        let ab = &self.a_c - &red.b;
        let num = -eta * res.r3 - c1 - ab.dot(&u) - rtau / it.tau;
        let den = ab.dot(&self.v) - self.c2 - it.kappa / it.tau;
        let dtau = num / den;
        let dz = u + dtau * &self.v;
        let atz = red.a_adj(&dz);
        let mut ds = Vec::with_capacity(red.dims.len());
        let mut dx = Vec::with_capacity(red.dims.len());
        for j in 0..red.dims.len() {
            let mut s = -eta * &res.r2[j] - &atz[j] + &red.cm[j] * dtau;
            symmetrize(&mut s);
            let mut x = &rx[j] - self.scal[j].expand(&self.scal[j].congruence(&s));
            symmetrize(&mut x);
            dx.push(x);
            ds.push(s);
        }
        let dkappa = (rtau - it.kappa * dtau) / it.tau;
        Direction { x: dx, s: ds, z: dz, tau: dtau, kappa: dkappa }
    }

    /// Largest `α` keeping the iterate in the cone.
    fn max_step(&self, it: &Iterate, d: &Direction) -> f64 {
        let mut alpha = f64::INFINITY;
        let ratio = |v: f64, dv: f64| if dv < 0.0 { -v / dv } else { f64::INFINITY };
        alpha = alpha.min(ratio(it.tau, d.tau)).min(ratio(it.kappa, d.kappa));
        for (j, sc) in self.scal.iter().enumerate() {
            let lx = min_eigenvalue(&(&sc.lx_inv * &d.x[j] * sc.lx_inv.transpose()));
            let ls = min_eigenvalue(&(&sc.ls_inv * &d.s[j] * sc.ls_inv.transpose()));
            alpha = alpha.min(ratio(1.0, lx)).min(ratio(1.0, ls));
        }
        alpha
    }
}

fn residuals(red: &Reduced, it: &Iterate) -> Residuals {
    let r1 = red.a_op(&it.x) - &red.b * it.tau;
    let atz = red.a_adj(&it.z);
    let r2 = (0..red.dims.len()).map(|j| &it.s[j] + &atz[j] - &red.cm[j] * it.tau).collect();
    let r3 = red.c_dot(&it.x) - red.b.dot(&it.z) + it.kappa;
    Residuals { r1, r2, r3 }
}

fn complementarity(it: &Iterate, d: Option<(&Direction, f64)>) -> f64 {
    let mut total = 0.0;
    for j in 0..it.x.len() {
        total += match d {
            None => it.x[j].dot(&it.s[j]),
            Some((d, a)) => (&it.x[j] + &d.x[j] * a).dot(&(&it.s[j] + &d.s[j] * a)),
        };
    }
    total
        + match d {
            None => it.tau * it.kappa,
            Some((d, a)) => (it.tau + a * d.tau) * (it.kappa + a * d.kappa),
        }
}

/// Solves the SDP; see the module documentation for the conventions.
pub fn solve_sdp(p: &SdpProblem, opts: &SdpOptions) -> crate::Result<SdpSolution> {
    p.validate()?;
    let red = match reduce(p, opts) {
        Ok(r) => r,
        Err(cert) => {
            return Ok(SdpSolution {
                status: SdpStatus::Infeasible,
                y: vec![0.0; p.nvars],
                objective: f64::NAN,
                min_eigenvalues: vec![],
                gap: f64::NAN,
                iterations: 0,
                certificate: Some(cert),
            })
        }
    };
    let problem = Reduced::build(p, &red);
    if problem.m == 0 || problem.dims.is_empty() {
        return Ok(trivial(p, &red, &problem, opts));
    }
    Ok(interior_point(p, &red, &problem, opts))
}

fn finish(p: &SdpProblem, red: &Reduction, z: &DVector<f64>, status: SdpStatus, gap: f64, iterations: usize) -> SdpSolution {
    let y = &red.y0 + &red.null * z;
    let y: Vec<f64> = y.iter().copied().collect();
    let report = p.check(&y);
    SdpSolution {
        status,
        objective: p.objective_value(&y),
        y,
        min_eigenvalues: report.min_eigenvalues,
        gap,
        iterations,
        certificate: None,
    }
}

/// No free directions or no cones: the point is determined by the equalities.
fn trivial(p: &SdpProblem, red: &Reduction, problem: &Reduced, opts: &SdpOptions) -> SdpSolution {
    let z = DVector::zeros(problem.m);
    let mut sol = finish(p, red, &z, SdpStatus::Optimal, 0.0, 0);
    if problem.m > 0 && problem.b.norm() > 0.0 {
        sol.status = SdpStatus::Unbounded;
        return sol;
    }
    // Eigenvalues relative to each block's scale; a point set pinned by the equalities
    // is typically singular but feasible.
    let worst = sol
        .min_eigenvalues
        .iter()
        .zip(&p.blocks)
        .map(|(&l, b)| l / b.eval(&sol.y).amax().max(1.0))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (j, l)| if l < acc.1 { (j, l) } else { acc });
    if worst.1 < -opts.feasibility_tol {
        let mut blocks: Vec<DMatrix<f64>> = p.blocks.iter().map(|b| DMatrix::zeros(b.dim, b.dim)).collect();
        let (vals, vecs) = super::symmetric_eigen(&p.blocks[worst.0].eval(&sol.y));
        let v = vecs.column(0);
        blocks[worst.0] = (v * v.transpose()) / -vals[0];
        let cert = certificate_from_blocks(p, red, blocks);
        sol.status = SdpStatus::Infeasible;
        sol.certificate = Some(cert);
    }
    sol
}

/// Completes PSD blocks `X_j` with `A(X) ≈ 0` in the reduced space into a certificate
/// for the original problem by solving for equality multipliers.
fn certificate_from_blocks(p: &SdpProblem, red: &Reduction, blocks: Vec<DMatrix<f64>>) -> InfeasibilityCertificate {
    let e = p.equalities.len();
    let mut multipliers = DVector::zeros(e);
    if let Some(qr) = &red.qr {
        let mut grad = vec![0.0; p.nvars];
        for (b, x) in p.blocks.iter().zip(&blocks) {
            b.pair(x, &mut grad);
        }
        let g = DVector::from_vec(grad);
        let g_range = &g - &red.null * (red.null.transpose() * &g);
        let mu = qr.combination(&g_range);
        multipliers = DVector::from_fn(e, |i, _| -mu[i] / red.row_scale[i]);
    }
    let mut cert = InfeasibilityCertificate { blocks, multipliers, residual: 0.0 };
    cert.residual = p.certificate_residual(&cert);
    cert
}

fn interior_point(p: &SdpProblem, red: &Reduction, problem: &Reduced, opts: &SdpOptions) -> SdpSolution {
    let nu: usize = problem.dims.iter().sum();
    let mut it = Iterate {
        x: problem.dims.iter().map(|&n| DMatrix::identity(n, n)).collect(),
        s: problem.dims.iter().map(|&n| DMatrix::identity(n, n)).collect(),
        z: DVector::zeros(problem.m),
        tau: 1.0,
        kappa: 1.0,
    };
    let b_norm = problem.b.norm();
    let c_norm = problem.c.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt();
    let mut gap = f64::INFINITY;
    let mut stalls = 0;
    for iter in 0..opts.max_iterations {
        let res = residuals(problem, &it);
        let mu = complementarity(&it, None) / (nu as f64 + 1.0);
        let pobj = problem.c_dot(&it.x) / it.tau;
        let dobj = problem.b.dot(&it.z) / it.tau;
        let pinf = res.r1.norm() / it.tau / (1.0 + b_norm);
        let dinf = res.r2.iter().map(|r| r.norm_squared()).sum::<f64>().sqrt() / it.tau / (1.0 + c_norm);
        gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let z_true = &it.z * (problem.c_scale / it.tau);
        if pinf <= opts.feasibility_tol && dinf <= opts.feasibility_tol && gap <= opts.gap_tol {
            return finish(p, red, &z_true, SdpStatus::Optimal, gap, iter);
        }

        let cx = problem.c_dot(&it.x);
        if cx < 0.0 && problem.a_op(&it.x).norm() <= opts.infeasibility_tol * -cx {
            let scale = 1.0 / (-cx * problem.c_scale);
            let blocks = it.x.iter().map(|x| x * scale).collect();
            let cert = certificate_from_blocks(p, red, blocks);
            if cert.residual <= opts.infeasibility_tol {
                let mut sol = finish(p, red, &z_true, SdpStatus::Infeasible, gap, iter);
                sol.certificate = Some(cert);
                return sol;
            }
        }
        let bz = problem.b.dot(&it.z);
        if bz > 0.0 {
            let atz = problem.a_adj(&it.z);
            let ray: f64 =
                atz.iter().zip(&it.s).map(|(a, s)| (a + s).norm_squared()).sum::<f64>().sqrt();
            if ray <= opts.infeasibility_tol * bz {
                return finish(p, red, &z_true, SdpStatus::Unbounded, gap, iter);
            }
        }

        let scal: Option<Vec<Scaling>> = it.x.iter().zip(&it.s).map(|(x, s)| Scaling::new(x, s)).collect();
        let Some(scal) = scal else {
            return finish(p, red, &z_true, SdpStatus::NumericalFailure, gap, iter);
        };
        let Some(newton) = Newton::new(problem, scal) else {
            return finish(p, red, &z_true, SdpStatus::NumericalFailure, gap, iter);
        };

        let rx_aff: Vec<DMatrix<f64>> = it.x.iter().map(|x| -x).collect();
        let aff = newton.solve(&it, &res, &rx_aff, -it.tau * it.kappa, 1.0);
        let alpha_aff = newton.max_step(&it, &aff).min(1.0);
        let mu_aff = complementarity(&it, Some((&aff, alpha_aff))) / (nu as f64 + 1.0);
        let sigma = (mu_aff / mu).max(0.0).min(1.0).powi(3);

        let mut rx = Vec::with_capacity(problem.dims.len());
        for (j, sc) in newton.scal.iter().enumerate() {
            let n = problem.dims[j];
            let dxh = &sc.g_inv * &aff.x[j] * sc.g_inv.transpose();
            let dsh = sc.congruence(&aff.s[j]);
            let second = &dxh * &dsh + &dsh * &dxh;
            let mut t = DMatrix::zeros(n, n);
            for c in 0..n {
                for r in 0..n {
                    let mut v = -second[(r, c)];
                    if r == c {
                        let l = sc.lambda[r];
                        v += 2.0 * sigma * mu - 2.0 * l * l;
                    }
                    t[(r, c)] = v / (sc.lambda[r] + sc.lambda[c]);
                }
            }
            let mut m = sc.expand(&t);
            symmetrize(&mut m);
            rx.push(m);
        }
        let rtau = sigma * mu - it.tau * it.kappa - aff.tau * aff.kappa;
        let dir = newton.solve(&it, &res, &rx, rtau, 1.0 - sigma);
        let alpha = (opts.step_fraction * newton.max_step(&it, &dir)).min(1.0);
        if alpha < 1e-10 {
            stalls += 1;
            if stalls >= 3 {
                return finish(p, red, &z_true, SdpStatus::NumericalFailure, gap, iter);
            }
        } else {
            stalls = 0;
        }
        for j in 0..it.x.len() {
            it.x[j] += &dir.x[j] * alpha;
            it.s[j] += &dir.s[j] * alpha;
            symmetrize(&mut it.x[j]);
            symmetrize(&mut it.s[j]);
        }
        it.z += &dir.z * alpha;
        it.tau += alpha * dir.tau;
        it.kappa += alpha * dir.kappa;
    }
    let z_true = &it.z * (problem.c_scale / it.tau);
    finish(p, red, &z_true, SdpStatus::MaxIterations, gap, opts.max_iterations)
}

#[cfg(test)]
mod tests {
    use super::super::Block;
    use super::*;
    use proptest::prelude::*;

    fn opts() -> SdpOptions {
        SdpOptions::default()
    }

    #[test]
    fn two_by_two_minimum() {
        // [[x, 1], [1, x]] ⪰ 0, minimize x
        let mut p = SdpProblem::new(1);
        let mut b = Block::new(2);
        b.add_term(0, 0, 0, 1.0);
        b.add_term(0, 1, 1, 1.0);
        b.add_constant(0, 1, 1.0);
        p.add_block(b);
        p.set_objective(vec![1.0]);
        let sol = solve_sdp(&p, &opts()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.y[0] - 1.0).abs() < 1e-6, "{:?}", sol.y);
    }

    #[test]
    fn analytic_center_of_interval() {
        // diag(a, 1 − a) ⪰ 0 with zero objective
        let mut p = SdpProblem::new(1);
        let mut b = Block::new(2);
        b.add_term(0, 0, 0, 1.0);
        b.add_term(0, 1, 1, -1.0);
        b.add_constant(1, 1, 1.0);
        p.add_block(b);
        let sol = solve_sdp(&p, &opts()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.y[0] - 0.5).abs() < 1e-6, "{:?}", sol.y);
        let m = p.blocks[0].eval(&sol.y);
        assert_eq!(crate::sdp::numeric_rank(&m, 1e-6), 2);
    }

    #[test]
    fn forced_indefinite_matrix_is_infeasible() {
        // [[y0, y1], [y1, y2]] with y = (1, 2, 1) fixed by equalities
        let mut p = SdpProblem::new(3);
        let mut b = Block::new(2);
        b.add_term(0, 0, 0, 1.0);
        b.add_term(1, 0, 1, 1.0);
        b.add_term(2, 1, 1, 1.0);
        p.add_block(b);
        p.add_equality(vec![(0, 1.0)], 1.0);
        p.add_equality(vec![(1, 1.0)], 2.0);
        p.add_equality(vec![(2, 1.0)], 1.0);
        let sol = solve_sdp(&p, &opts()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
        let cert = sol.certificate.unwrap();
        assert!(p.certificate_residual(&cert) <= 1e-8);
    }

    #[test]
    fn infeasible_by_ray() {
        // [[y0, 1], [1, -y0]] ⪰ 0 is impossible (determinant −y0² − 1)
        let mut p = SdpProblem::new(1);
        let mut b = Block::new(2);
        b.add_term(0, 0, 0, 1.0);
        b.add_term(0, 1, 1, -1.0);
        b.add_constant(0, 1, 1.0);
        p.add_block(b);
        let sol = solve_sdp(&p, &opts()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
        assert!(sol.certificate.unwrap().residual <= 1e-8);
    }

    #[test]
    fn inconsistent_equalities_are_infeasible() {
        let mut p = SdpProblem::new(2);
        let mut b = Block::new(1);
        b.add_term(0, 0, 0, 1.0);
        p.add_block(b);
        p.add_equality(vec![(0, 1.0), (1, 1.0)], 1.0);
        p.add_equality(vec![(0, 2.0), (1, 2.0)], 3.0);
        let sol = solve_sdp(&p, &opts()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
        assert!(sol.certificate.unwrap().residual <= 1e-8);
    }

    fn diagonal_instance(c: &[f64], lo: &[f64], hi: &[f64]) -> SdpProblem {
        // blocks diag(y_i − lo_i, hi_i − y_i), minimize c·y
        let mut p = SdpProblem::new(c.len());
        for i in 0..c.len() {
            let mut b = Block::new(2);
            b.add_term(i, 0, 0, 1.0);
            b.add_constant(0, 0, -lo[i]);
            b.add_term(i, 1, 1, -1.0);
            b.add_constant(1, 1, hi[i]);
            p.add_block(b);
        }
        p.set_objective(c.to_vec());
        p
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn diagonal_optima(data in proptest::collection::vec((-3.0f64..3.0, -2.0f64..2.0, 0.1f64..3.0), 1..5)) {
            let c: Vec<f64> = data.iter().map(|d| d.0).collect();
            let lo: Vec<f64> = data.iter().map(|d| d.1).collect();
            let hi: Vec<f64> = data.iter().map(|d| d.1 + d.2).collect();
            let p = diagonal_instance(&c, &lo, &hi);
            let sol = solve_sdp(&p, &opts()).unwrap();
            prop_assert_eq!(sol.status, SdpStatus::Optimal);
            let best: f64 = (0..c.len()).map(|i| if c[i] >= 0.0 { c[i] * lo[i] } else { c[i] * hi[i] }).sum();
            prop_assert!((sol.objective - best).abs() <= 1e-6 * best.abs().max(1.0));
            prop_assert!(p.check(&sol.y).passes(1e-7));
        }

        #[test]
        fn known_feasible_point_is_never_infeasible(
            y in proptest::collection::vec(-2.0f64..2.0, 3),
            shift in 0.0f64..1.0,
            fix in proptest::bool::ANY,
        ) {
            // H = [[y0, y1], [y1, y2]] shifted to be PSD at the given y
            let h = DMatrix::from_row_slice(2, 2, &[y[0], y[1], y[1], y[2]]);
            let lmin = min_eigenvalue(&h);
            let mut p = SdpProblem::new(3);
            let mut b = Block::new(2);
            b.add_term(0, 0, 0, 1.0);
            b.add_term(1, 0, 1, 1.0);
            b.add_term(2, 1, 1, 1.0);
            let offset = (-lmin).max(0.0) + shift * 0.1;
            b.add_constant(0, 0, offset);
            b.add_constant(1, 1, offset);
            p.add_block(b);
            if fix {
                p.add_equality(vec![(0, 1.0), (2, 1.0)], y[0] + y[2]);
            }
            let sol = solve_sdp(&p, &opts()).unwrap();
            prop_assert_ne!(sol.status, SdpStatus::Infeasible);
            if sol.status == SdpStatus::Optimal {
                prop_assert!(p.check(&sol.y).passes(1e-7));
            }
        }
    }
}
