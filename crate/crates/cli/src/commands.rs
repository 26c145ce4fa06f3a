use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use g2loop::factorization::{factors, normalize, normalize_family};
use g2loop::frenet::{
    build_w, evaluate_phi, frenet_residual, grid, is_nonconstant, segal_certificate, solve_frenet, symmetric_reduction,
    w_generators, CaseTag, CurveJson, Gauge, Pin, PolyCurve, SolveOptions, Template,
};
use g2loop::grassmannian::{GrassmannPoint, PointJson};
use g2loop::lattice::{stratum_readout, ChainElement, LatticeElement};
use g2loop::octonion::{complex_json, oct_product, Vector7, DIM, LINE_NAMES, TABLE};
use g2loop::sampling::{random_unstable_point, DEFAULT_SIGMA};
use g2loop::{Cyclo8, Scalar, Tol};
use num_complex::Complex64;

use crate::report::{Failure, Outcome};
use crate::{Backend, Cli, Command};

const FACTOR_EPS: f64 = 1e-8;
const NORMALIZE_EPS: f64 = 1e-9;
const FRENET_EPS: f64 = 1e-9;
const HARMONIC_EPS: f64 = 1e-8;
const LOOP_SAMPLES: usize = 16;

pub fn run(cmd: Command, cli: &Cli) -> Result<Outcome, Failure> {
    let exact = cli.backend == Backend::Exact;
    match cmd {
        Command::Table if exact => Ok(table::<Cyclo8>()),
        Command::Table => Ok(table::<Complex64>()),
        Command::CheckPoint if exact => check_point::<Cyclo8>(cli),
        Command::CheckPoint => check_point::<Complex64>(cli),
        Command::Factorize if exact => factorize::<Cyclo8>(cli),
        Command::Factorize => factorize::<Complex64>(cli),
        Command::Normalize if exact => normalize_cmd::<Cyclo8>(cli),
        Command::Normalize => normalize_cmd::<Complex64>(cli),
        _ if exact => Err(Failure::parse(format!("{} supports only the float backend", cmd.name()))),
        Command::RandomPoint => random_point(cli),
        Command::FrenetVerify => frenet_verify(cli),
        Command::FrenetSolve => frenet_solve(cli),
        Command::HarmonicEval => harmonic_eval(cli),
    }
}

fn tol(cli: &Cli) -> Tol {
    Tol { rank: cli.rank_tol, eps: cli.tol.unwrap_or(Tol::default().eps) }
}

fn read_input<T: DeserializeOwned>(cli: &Cli) -> Result<T, Failure> {
    let path = cli.input.as_ref().ok_or_else(|| Failure::parse("--input is required"))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)?;
    if let Some(obj) = value.as_object_mut() {
        if obj.contains_key("header") {
            value = obj.remove("result").ok_or_else(|| Failure::parse("report has no result"))?;
        }
    }
    Ok(serde_json::from_value(value)?)
}

fn lattice(xi: Option<LatticeElement>, xi_h: Option<ChainElement>) -> Result<LatticeElement, Failure> {
    match (xi, xi_h) {
        (Some(x), None) => Ok(LatticeElement::new(x.k, x.l)?),
        (None, Some(h)) => h
            .canonical()
            .ok_or_else(|| Failure::parse(format!("xiH ({}, {}) is outside the chamber", h.h1, h.h2))),
        _ => Err(Failure::parse("exactly one of \"xi\" and \"xiH\" is required")),
    }
}

fn table<S: Scalar>() -> Outcome {
    let mut cells = Vec::new();
    let mut matches = 0;
    for i in 0..DIM {
        for j in 0..DIM {
            let p = oct_product(&Vector7::<S>::unit(i), &Vector7::unit(j));
            let support: Vec<usize> = (0..DIM).filter(|&m| !p.0[m].is_zero()).collect();
            let observed = match support.as_slice() {
                [] => Some(None),
                [m] => Some(Some(*m)),
                _ => None,
            };
            let ok = observed == Some(TABLE[i][j]);
            matches += ok as usize;
            cells.push(json!({
                "left": LINE_NAMES[i],
                "right": LINE_NAMES[j],
                "expected": TABLE[i][j].map(|m| LINE_NAMES[m]),
                "observed": support.iter().map(|&m| LINE_NAMES[m]).collect::<Vec<_>>(),
                "coefficients": support.iter().map(|&m| complex_json(&p.0[m].to_c64())).collect::<Vec<_>>(),
                "match": ok,
            }));
        }
    }
    Outcome {
        ok: matches == DIM * DIM,
        result: json!({ "cells": cells }),
        checks: json!({ "cells": DIM * DIM, "matches": matches }),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "S: Scalar"))]
struct PointInput<S: Scalar> {
    #[serde(default)]
    xi: Option<LatticeElement>,
    #[serde(default, rename = "xiH")]
    xi_h: Option<ChainElement>,
    point: PointJson<S>,
    #[serde(default)]
    require: Option<Vec<String>>,
}

const CLASSES: [&str; 4] = ["gr", "gr_so7", "gr_g2", "gr_involution"];

fn check_point<S: Scalar>(cli: &Cli) -> Result<Outcome, Failure> {
    let input: PointInput<S> = read_input(cli)?;
    let required = input.require.unwrap_or_else(|| CLASSES.iter().map(|s| s.to_string()).collect());
    if let Some(bad) = required.iter().find(|r| !CLASSES.contains(&r.as_str())) {
        return Err(Failure::parse(format!("unknown certificate class {bad:?}")));
    }
    let w = GrassmannPoint::<S>::from_json(input.point, tol(cli))?;
    let certs = [w.is_in_gr(), w.is_in_gr_so7(), w.is_in_gr_g2(), w.is_in_gr_involution()];
    let mut ok = CLASSES.iter().zip(&certs).all(|(name, c)| c.verdict || !required.iter().any(|r| r == name));
    let mut checks = json!({ "required": required });
    if input.xi.is_some() || input.xi_h.is_some() {
        let xi = lattice(input.xi, input.xi_h)?;
        let readout = stratum_readout(&w, xi.k.max(1)).ok();
        ok &= readout == Some(xi);
        checks["stratum"] = json!({ "expected": xi, "readout": readout });
    }
    Ok(Outcome {
        ok,
        result: json!({
            "window": w.window(),
            "dim": w.dim(),
            "virtual_dim": w.virtual_dim(),
            "flag_dims": w.flag_dims(),
            "certificates": certs,
        }),
        checks,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct XiInput {
    #[serde(default)]
    xi: Option<LatticeElement>,
    #[serde(default, rename = "xiH")]
    xi_h: Option<ChainElement>,
    #[serde(default)]
    sigma: Option<f64>,
}

fn random_point(cli: &Cli) -> Result<Outcome, Failure> {
    let input: XiInput = read_input(cli)?;
    let xi = lattice(input.xi, input.xi_h)?;
    let sigma = input.sigma.unwrap_or(DEFAULT_SIGMA);
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Failure::parse(format!("sigma must be finite and non-negative, got {sigma}")));
    }
    let rp = random_unstable_point(&xi.chain(), cli.seed, sigma, tol(cli));
    let cert = rp.point.is_in_gr_g2();
    let readout = stratum_readout(&rp.point, xi.k.max(1)).ok();
    Ok(Outcome {
        ok: cert.verdict && readout == Some(xi),
        result: json!({ "xi": xi, "point": rp.point.to_json() }),
        checks: json!({ "sigma": sigma, "gr_g2": cert, "stratum": { "expected": xi, "readout": readout } }),
    })
}

fn factorize<S: Scalar>(cli: &Cli) -> Result<Outcome, Failure> {
    let input: PointInput<S> = read_input(cli)?;
    if input.require.is_some() {
        return Err(Failure::parse("factorize does not take \"require\""));
    }
    let xi = lattice(input.xi, input.xi_h)?;
    let t = tol(cli);
    let w = GrassmannPoint::<S>::from_json(input.point, t)?;
    let f = factors(&w, &xi)?;
    let gamma = w.extract_loop()?;
    let product = f.product_residual(&gamma, LOOP_SAMPLES, &t)?;
    let support = f.support_excess();
    let eps = cli.tol.unwrap_or(FACTOR_EPS);
    Ok(Outcome {
        ok: product < eps && support < eps,
        result: json!({
            "xi": xi,
            "chain": f.chain,
            "type_vector": f.type_vector,
            "factors": f.factors,
        }),
        checks: json!({
            "threshold": eps,
            "samples": LOOP_SAMPLES,
            "product_residual": product,
            "support_excess": support,
            "min_extreme_coefficient": f.min_extreme_coefficient(),
        }),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "S: Scalar"))]
struct NormalizeInput<S: Scalar> {
    #[serde(default)]
    xi: Option<LatticeElement>,
    #[serde(default, rename = "xiH")]
    xi_h: Option<ChainElement>,
    #[serde(default)]
    point: Option<PointJson<S>>,
    #[serde(default)]
    family: Option<Vec<PointJson<S>>>,
}

fn normalize_cmd<S: Scalar>(cli: &Cli) -> Result<Outcome, Failure> {
    let input: NormalizeInput<S> = read_input(cli)?;
    let xi = lattice(input.xi, input.xi_h)?;
    let t = tol(cli);
    let eps = cli.tol.unwrap_or(NORMALIZE_EPS);
    let (points, single) = match (input.point, input.family) {
        (Some(p), None) => (vec![p], true),
        (None, Some(f)) if !f.is_empty() => (f, false),
        _ => return Err(Failure::parse("exactly one of \"point\" and a non-empty \"family\" is required")),
    };
    let points = points
        .into_iter()
        .map(|p| GrassmannPoint::<S>::from_json(p, t))
        .collect::<g2loop::Result<Vec<_>>>()?;
    let (results, variation) = if single {
        (vec![normalize(&points[0], &xi)?], 0.0)
    } else {
        normalize_family(&points, &xi, eps)?
    };
    let mut ok = variation < eps || single;
    let mut out = Vec::new();
    let mut checks = Vec::new();
    for r in &results {
        let b = r.bound as i32;
        let upper = r.w_n.contains_point(&GrassmannPoint::power(b, t));
        let lower = GrassmannPoint::power(-b, t).contains_point(&r.w_n);
        let cert = r.w_n.is_in_gr_g2();
        ok &= upper && lower && cert.verdict;
        out.push(json!({ "xi_n": r.xi_n, "bound": r.bound, "gamma": r.gamma, "w_n": r.w_n.to_json() }));
        checks.push(json!({ "contains_lambda_b_hplus": upper, "inside_lambda_minus_b_hplus": lower, "gr_g2": cert }));
    }
    let mut check = json!({ "threshold": eps, "points": checks });
    if !single {
        check["variation"] = json!(variation);
    }
    Ok(Outcome { ok, result: json!({ "xi": xi, "normalized": out }), checks: check })
}

fn read_curve(cli: &Cli) -> Result<PolyCurve, Failure> {
    let c: CurveJson = read_input(cli)?;
    Ok(PolyCurve::from_json(c)?)
}

fn frenet_verify(cli: &Cli) -> Result<Outcome, Failure> {
    let curve = read_curve(cli)?;
    let t = tol(cli);
    let eps = cli.tol.unwrap_or(FRENET_EPS);
    let residual = frenet_residual(&curve);
    let mut ok = residual.norm < eps;
    let gens = w_generators(&curve);
    let mut samples = Vec::new();
    for z in grid(cli.grid) {
        let w = build_w(&curve, z, t)?;
        let mut certs = vec![w.is_in_gr(), w.is_in_gr_so7(), w.is_in_gr_g2(), segal_certificate(&w, &gens, z)];
        if curve.case().is_symmetric() {
            certs.push(w.is_in_gr_involution());
        }
        ok &= certs.iter().all(|c| c.verdict);
        samples.push(json!({ "z": z, "dim": w.dim(), "certificates": certs }));
    }
    Ok(Outcome {
        ok,
        result: json!({ "residual": residual }),
        checks: json!({
            "threshold": eps,
            "lead_rank": curve.lead_rank(&t),
            "nonconstant": is_nonconstant(&curve, t),
            "samples": samples,
        }),
    })
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct OptionsInput {
    restarts: Option<usize>,
    max_iter: Option<usize>,
    target: Option<f64>,
    sigma: Option<f64>,
    require_nonconstant: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveInput {
    case: CaseTag,
    zdegs: Vec<usize>,
    #[serde(default)]
    pinned: Vec<Pin>,
    /// Default gauge of the template when absent.
    #[serde(default)]
    gauge: Option<Vec<Gauge>>,
    #[serde(default)]
    options: OptionsInput,
}

fn frenet_solve(cli: &Cli) -> Result<Outcome, Failure> {
    let input: SolveInput = read_input(cli)?;
    let mut template = Template::new(input.case, input.zdegs);
    template.pinned = input.pinned;
    if let Some(g) = input.gauge {
        template.gauge = g;
    }
    let d = SolveOptions::default();
    let o = input.options;
    let opts = SolveOptions {
        restarts: o.restarts.unwrap_or(d.restarts),
        max_iter: o.max_iter.unwrap_or(d.max_iter),
        target: o.target.or(cli.tol).unwrap_or(d.target),
        sigma: o.sigma.unwrap_or(d.sigma),
        require_nonconstant: o.require_nonconstant.unwrap_or(d.require_nonconstant),
    };
    let sol = solve_frenet(&template, cli.seed, &opts)?;
    let t = tol(cli);
    Ok(Outcome {
        ok: sol.residual.norm < opts.target,
        result: serde_json::to_value(sol.curve.to_json())?,
        checks: json!({
            "target": opts.target,
            "residual": sol.residual,
            "gauge_residual": sol.gauge_residual,
            "restart": sol.restart,
            "iterations": sol.iterations,
            "lead_rank": sol.curve.lead_rank(&t),
            "nonconstant": is_nonconstant(&sol.curve, t),
        }),
    })
}

fn harmonic_eval(cli: &Cli) -> Result<Outcome, Failure> {
    let curve = read_curve(cli)?;
    let t = tol(cli);
    let eps = cli.tol.unwrap_or(HARMONIC_EPS);
    let symmetric = curve.case().is_symmetric();
    let mut samples = Vec::new();
    let mut failing = Vec::new();
    let (mut unitarity, mut automorphism) = (0.0f64, 0.0f64);
    for (i, z) in grid(cli.grid).into_iter().enumerate() {
        let s = if symmetric { symmetric_reduction(&curve, z, t)? } else { evaluate_phi(&curve, z, t)? };
        unitarity = unitarity.max(s.unitarity_residual);
        automorphism = automorphism.max(s.automorphism_residual);
        let mut good = s.in_g2(eps);
        if let Some(d) = &s.symmetric {
            good &= d.even_dim_sum == 3
                && s.square_residual < eps
                && d.projector_residual < eps
                && d.associativity_residual < eps;
        }
        if !good {
            failing.push(i);
        }
        samples.push(s);
    }
    Ok(Outcome {
        ok: failing.is_empty(),
        result: json!({ "case": curve.case(), "samples": samples }),
        checks: json!({
            "threshold": eps,
            "max_unitarity_residual": unitarity,
            "max_automorphism_residual": automorphism,
            "failing": failing,
        }),
    })
}
