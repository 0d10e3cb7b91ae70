//! JSON documents written to stdout. The layout is described by `schema/output.schema.json`.

use std::collections::BTreeMap;

use serde::Serialize;

use realrad_core::geometry::{rationalize, Component, ProjectionMap, RATIONALIZE_TOL};
use realrad_core::moments::MOPSolution;
use realrad_core::polycore::{Monomial, RationalPoly, RealPoly};
use realrad_core::radical::{ComponentReport, RadicalResult, Shortcut};
use realrad_core::realness::{Evidence, RealnessCertificate, Verdict};
use realrad_core::sdp::SdpStatus;

#[derive(Clone, Debug, Serialize)]
pub struct PolyJson {
    /// Canonical text with coefficients snapped to the simplest rationals within `RATIONALIZE_TOL`.
    pub text: String,
    pub leading: Option<String>,
    /// Raw coefficients keyed by monomial text.
    pub coefficients: BTreeMap<String, f64>,
}

pub fn monomial_text(m: &Monomial, names: &[&str]) -> String {
    let mut s = String::new();
    let _ = m.write_with(&mut s, names);
    s
}

pub fn real_poly(p: &RealPoly, names: &[&str]) -> PolyJson {
    PolyJson {
        text: rationalize(p, RATIONALIZE_TOL).to_display_string(names),
        leading: p.leading_monomial().map(|m| monomial_text(m, names)),
        coefficients: p.terms().map(|(m, c)| (monomial_text(m, names), *c)).collect(),
    }
}

pub fn exact_poly(p: &RationalPoly, names: &[&str]) -> PolyJson {
    let mut j = real_poly(&p.to_f64(), names);
    j.text = p.to_display_string(names);
    j
}

pub fn status_name(s: SdpStatus) -> String {
    format!("{:?}", s)
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorDoc {
    pub command: String,
    pub status: &'static str,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionJson {
    /// Exact rational entries, row by row.
    pub rows: Vec<Vec<String>>,
    pub seed: u64,
}

fn projection(p: &ProjectionMap) -> ProjectionJson {
    let rows = p
        .exact
        .iter()
        .map(|r| r.iter().map(|c| if c.is_integer() { c.numer().to_string() } else { format!("{}/{}", c.numer(), c.denom()) }).collect())
        .collect();
    ProjectionJson { rows, seed: p.seed }
}

#[derive(Clone, Debug, Serialize)]
pub struct StatusAt {
    pub order: u32,
    pub status: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum EvidenceJson {
    SignChange { eta: Vec<f64>, h_eta: f64, flat_order: u32 },
    Infeasible { order: u32, certificate_residual: Option<f64> },
    Unrationalizable { residual: f64 },
    Ambient,
    Undecided { statuses: Vec<StatusAt> },
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateJson {
    pub verdict: String,
    /// Solver status behind the verdict.
    pub status: String,
    pub h: PolyJson,
    /// Variable names of `h`; projected coordinates are `u0, u1, ...`.
    pub h_variables: Vec<String>,
    pub projection: Option<ProjectionJson>,
    pub xi: Vec<f64>,
    pub s: f64,
    pub epsilon: f64,
    pub radius: f64,
    pub order: u32,
    pub evidence: EvidenceJson,
}

pub fn verdict_name(v: Verdict) -> String {
    format!("{:?}", v)
}

pub fn evidence_status(e: &Evidence) -> String {
    match e {
        Evidence::SignChange { .. } | Evidence::Ambient => status_name(SdpStatus::Optimal),
        Evidence::Infeasible { .. } => status_name(SdpStatus::Infeasible),
        Evidence::Unrationalizable { .. } => status_name(SdpStatus::NumericalFailure),
        Evidence::Undecided { statuses } => {
            statuses.last().map_or_else(|| status_name(SdpStatus::NumericalFailure), |(_, s)| status_name(*s))
        }
    }
}

pub fn certificate(c: &RealnessCertificate, names: &[&str]) -> CertificateJson {
    let h_variables: Vec<String> = match &c.projection {
        Some(p) => (0..p.rows()).map(|i| format!("u{}", i)).collect(),
        None => names.iter().map(|s| s.to_string()).collect(),
    };
    let hv: Vec<&str> = h_variables.iter().map(String::as_str).collect();
    let evidence = match &c.evidence {
        Evidence::SignChange { eta, h_eta, flat_order } => {
            EvidenceJson::SignChange { eta: eta.clone(), h_eta: *h_eta, flat_order: *flat_order }
        }
        Evidence::Infeasible { order, certificate_residual } => {
            EvidenceJson::Infeasible { order: *order, certificate_residual: *certificate_residual }
        }
        Evidence::Unrationalizable { residual } => EvidenceJson::Unrationalizable { residual: *residual },
        Evidence::Ambient => EvidenceJson::Ambient,
        Evidence::Undecided { statuses } => EvidenceJson::Undecided {
            statuses: statuses.iter().map(|(o, s)| StatusAt { order: *o, status: status_name(*s) }).collect(),
        },
    };
    CertificateJson {
        verdict: verdict_name(c.verdict),
        status: evidence_status(&c.evidence),
        h: real_poly(&c.h, &hv),
        h_variables,
        projection: c.projection.as_ref().map(projection),
        xi: c.xi.clone(),
        s: c.s,
        epsilon: c.epsilon,
        radius: c.radius,
        order: c.order,
        evidence,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RankProfile {
    pub order: u32,
    pub ranks: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentJson {
    pub dimension: usize,
    /// Variables of the component generators; slack variables follow the declared ones.
    pub variables: Vec<String>,
    pub generators: Vec<PolyJson>,
    pub verdict: String,
    pub certificate: CertificateJson,
    pub equations: Vec<PolyJson>,
}

fn component_generators(c: &Component, names: &[&str]) -> Vec<PolyJson> {
    match &c.ideal.generators {
        realrad_core::geometry::Generators::Exact(g) => g.iter().map(|p| exact_poly(p, names)).collect(),
        realrad_core::geometry::Generators::Float(g) => g.iter().map(|p| real_poly(p, names)).collect(),
    }
}

fn component(r: &ComponentReport, names: &[String]) -> ComponentJson {
    let n = r.component.ideal.nvars;
    let mut vars: Vec<String> = names.iter().take(n).cloned().collect();
    let mut j = 1;
    while vars.len() < n {
        let s = format!("slack{}", j);
        if !names.contains(&s) {
            vars.push(s);
        }
        j += 1;
    }
    let v: Vec<&str> = vars.iter().map(String::as_str).collect();
    ComponentJson {
        dimension: r.component.dimension,
        generators: component_generators(&r.component, &v),
        verdict: verdict_name(r.certificate.verdict),
        certificate: certificate(&r.certificate, &v),
        equations: r.equations.iter().map(|p| real_poly(p, &v)).collect(),
        variables: vars,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RealradDoc {
    pub command: &'static str,
    pub status: String,
    pub seed: u64,
    pub variables: Vec<String>,
    pub inequalities: String,
    pub shortcut: String,
    pub degree: u32,
    pub order: u32,
    pub generators: Vec<PolyJson>,
    pub leading: Vec<String>,
    pub rank_profiles: Vec<RankProfile>,
    pub components: Vec<ComponentJson>,
    pub warnings: Vec<String>,
    pub timings: Timings,
}

pub fn realrad(r: &RadicalResult, names: &[String], seed: u64, inequalities: String, total_ms: f64) -> RealradDoc {
    let v: Vec<&str> = names.iter().map(String::as_str).collect();
    let status = if r.shortcut == Shortcut::EmptyVariety { SdpStatus::Infeasible } else { SdpStatus::Optimal };
    RealradDoc {
        command: "realrad",
        status: status_name(status),
        seed,
        variables: names.to_vec(),
        inequalities,
        shortcut: format!("{:?}", r.shortcut),
        degree: r.degree,
        order: r.order,
        generators: r.generators.iter().map(|p| real_poly(p, &v)).collect(),
        leading: r.leading.iter().map(|m| monomial_text(m, &v)).collect(),
        rank_profiles: r.rank_profiles.iter().map(|(o, ranks)| RankProfile { order: *o, ranks: ranks.clone() }).collect(),
        components: r.components.iter().map(|c| component(c, names)).collect(),
        warnings: r.warnings.clone(),
        timings: Timings { total_ms },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnihilatorDoc {
    pub command: &'static str,
    pub status: String,
    pub variables: Vec<String>,
    pub degree: u32,
    pub order: u32,
    pub generators: Vec<PolyJson>,
    pub leading: Vec<String>,
    pub standard_monomials: Vec<String>,
    pub rank_profile: Vec<usize>,
    pub flat_order: Option<u32>,
    pub threshold: Option<f64>,
    pub timings: Timings,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimizersJson {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub order: u32,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MopDoc {
    pub command: &'static str,
    pub status: String,
    pub variables: Vec<String>,
    pub order: u32,
    pub value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub rank_profile: Vec<usize>,
    pub flat_order: Option<u32>,
    pub certificate_residual: Option<f64>,
    pub minimizers: Option<MinimizersJson>,
    pub warnings: Vec<String>,
    pub timings: Timings,
}

pub fn mop(
    sol: &MOPSolution,
    names: &[String],
    order: u32,
    minimizers: Option<MinimizersJson>,
    warnings: Vec<String>,
    total_ms: f64,
) -> MopDoc {
    MopDoc {
        command: "mop",
        status: status_name(sol.status),
        variables: names.to_vec(),
        order,
        value: sol.value,
        gap: sol.gap,
        iterations: sol.iterations,
        rank_profile: sol.rank_profile.clone(),
        flat_order: sol.flat_order,
        certificate_residual: sol.certificate_residual,
        minimizers,
        warnings,
        timings: Timings { total_ms },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SigncheckDoc {
    pub command: &'static str,
    pub verdict: String,
    pub status: String,
    pub seed: u64,
    pub variables: Vec<String>,
    pub certificate: CertificateJson,
    pub timings: Timings,
}
