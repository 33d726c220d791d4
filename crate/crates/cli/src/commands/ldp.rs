use hyperwalk::exact::{self, Side};
use hyperwalk::ldp::{
    analytic_rate_free, assemble_rate, berger_wang as bw, chernoff_upper, enumerate_displacements,
    joint_spectrum, legendre as conjugate, non_arithmetic, rate_curve_enum, rate_curve_exact, rate_curve_mc,
    rate_curve_tau_exact, Arithmeticity, RateCurve,
};
use hyperwalk::walk::{simulate as run_walks, Observables, WalkRun};
use hyperwalk::{FreeGroup, Word};

use super::{backend, json, side, side_name};
use crate::backend::{with_backend, Backend, ParseElement};
use crate::config::RunConfig;
use crate::error::{config_error, CliError};
use crate::report::{Cell, Report, Table};

fn default_alphas() -> Vec<f64> {
    (1..20).map(|i| 0.05 * i as f64).collect()
}

fn source(cfg: &RunConfig) -> Result<String, CliError> {
    match &cfg.source {
        Some(s) => Ok(s.clone()),
        None if cfg.measure.is_none() && matches!(backend(cfg)?, Backend::Free(_)) => Ok("exact".into()),
        None => Err(config_error("give --source enum or --source mc for a custom measure or backend")),
    }
}

/// Rate curves on one side, together with the drift that separates sides.
fn curves(cfg: &RunConfig, sides: &[(Side, Vec<f64>)]) -> Result<(Vec<RateCurve>, Option<f64>), CliError> {
    let ns = cfg.ns.clone().or(cfg.n.map(|n| vec![n])).ok_or_else(|| config_error("give --ns or --n"))?;
    let last = *ns.iter().max().expect("non-empty");
    let src = source(cfg)?;
    match src.as_str() {
        "exact" | "tau" => {
            if cfg.measure.is_some() || !matches!(backend(cfg)?, Backend::Free(_)) {
                return Err(config_error("exact sources cover the simple walk on free:q=K only"));
            }
            let q = match backend(cfg)? {
                Backend::Free(g) => g.rank(),
                Backend::Sl2(_) => unreachable!(),
            };
            let out = sides
                .iter()
                .map(|(s, a)| {
                    if src == "exact" {
                        rate_curve_exact(q, *s, a, &ns)
                    } else {
                        rate_curve_tau_exact(q, *s, a, &ns)
                    }
                })
                .collect::<hyperwalk::Result<Vec<_>>>()?;
            Ok((out, Some(exact::drift(q))))
        }
        "enum" | "mc" => with_backend!(&backend(cfg)?, space => {
            let mu = space.parse_measure(cfg.measure.as_deref().unwrap_or("uniform-gens"))?;
            if src == "enum" {
                let out = sides
                    .iter()
                    .map(|(s, a)| rate_curve_enum(space, &mu, *s, a, &ns))
                    .collect::<hyperwalk::Result<Vec<_>>>()?;
                let law = enumerate_displacements(space, &mu, last)?;
                let mean = law.iter().map(|(v, p)| v * p).sum::<f64>() / last as f64;
                Ok((out, Some(mean)))
            } else {
                let samples = cfg.require(&cfg.samples, "samples")?;
                let seed = cfg.seed()?;
                let out = sides
                    .iter()
                    .map(|(s, a)| rate_curve_mc(space, &mu, *s, a, &ns, samples, seed, cfg.workers))
                    .collect::<hyperwalk::Result<Vec<_>>>()?;
                let run = WalkRun::new(last, samples, seed)?;
                let recs = run_walks(space, &mu, &run, &Observables::default(), cfg.workers)?;
                let mean = recs.iter().map(|r| r.d).sum::<f64>() / (recs.len() as f64 * last as f64);
                Ok((out, Some(mean)))
            }
        }),
        other => Err(config_error(format!("unknown --source {other:?} for rate curves"))),
    }
}

fn curve_table(curve: &RateCurve) -> Table {
    let mut t = Table::new(side_name(curve.direction), &["n", "alpha", "rate", "rate_lo", "rate_hi", "censored"]);
    for row in &curve.rows {
        for c in &row.cells {
            t.push(vec![row.n.into(), c.alpha.into(), c.rate.into(), c.rate_lo.into(), c.rate_hi.into(), c.censored.into()]);
        }
    }
    t
}

pub fn rate(cfg: &RunConfig) -> Result<Report, CliError> {
    let s = side(cfg)?;
    let alphas = cfg.alphas.clone().unwrap_or_else(default_alphas);
    let (curves, drift) = curves(cfg, &[(s, alphas)])?;
    let curve = &curves[0];
    let mut report = Report::default();
    report.set("side", side_name(s));
    report.set("provenance", json(&curve.provenance));
    report.set("drift", drift);
    let mut env = Table::new("envelope", &["alpha", "rate"]);
    for (a, v) in curve.alphas.iter().zip(curve.envelope()) {
        env.push(vec![(*a).into(), v.into()]);
    }
    report.add(curve_table(curve));
    report.add(env);
    Ok(report)
}

pub fn assemble(cfg: &RunConfig) -> Result<Report, CliError> {
    let alphas = cfg.alphas.clone().unwrap_or_else(default_alphas);
    // The drift is needed to split the grid before the curves exist.
    let drift = match cfg.drift {
        Some(d) => d,
        None => curves(cfg, &[])?.1.expect("every source reports a drift"),
    };
    let above: Vec<f64> = alphas.iter().copied().filter(|a| *a > drift + 1e-12).collect();
    let below: Vec<f64> = alphas.iter().copied().filter(|a| *a < drift - 1e-12).collect();
    if above.is_empty() || below.is_empty() {
        return Err(config_error(format!("the alpha grid must straddle the drift {drift}")));
    }
    let (curves, _) = curves(cfg, &[(Side::Above, above), (Side::Below, below)])?;
    let rf = assemble_rate(&curves[0], &curves[1], drift)?;
    let (worst, tol) = rf.convexity_violation();
    let mut report = Report::default();
    report.set("drift", drift);
    report.set("provenance", rf.provenance.clone());
    report.set("argmin_alpha", rf.alphas[rf.argmin()]);
    report.set("convexity_worst", worst);
    report.set("convexity_tolerance", tol);
    match rf.effective_support() {
        Some((lo, hi)) => {
            report.set("support_lo", lo);
            report.set("support_hi", hi);
        }
        None => report.set("support_lo", Cell::Missing),
    }
    let mut t = Table::new("rate_function", &["alpha", "rate"]);
    for (a, v) in rf.alphas.iter().zip(&rf.values) {
        t.push(vec![(*a).into(), (*v).into()]);
    }
    report.add(t);
    Ok(report)
}

pub fn legendre(cfg: &RunConfig) -> Result<Report, CliError> {
    let q = cfg.q();
    let mut report = Report::default();
    report.set("q", q);
    match cfg.source.as_deref().unwrap_or("analytic") {
        "analytic" => {
            let alphas = cfg.alphas.clone().unwrap_or_else(|| (0..=200).map(|i| 0.005 * i as f64).collect());
            let lambdas = cfg.lambdas.clone().unwrap_or_else(|| (0..=400).map(|i| -10.0 + 0.05 * i as f64).collect());
            let rates = alphas.iter().map(|&a| analytic_rate_free(q, a)).collect::<hyperwalk::Result<Vec<_>>>()?;
            let conj = conjugate(&alphas, &rates, &lambdas)?;
            let mut t = Table::new("conjugate", &["lambda", "value"]);
            for (l, v) in lambdas.iter().zip(conj) {
                t.push(vec![(*l).into(), v.into()]);
            }
            report.set("source", "analytic");
            report.add(t);
        }
        "mgf" => {
            let n = cfg.require(&cfg.n, "n")?;
            let alphas = cfg.alphas.clone().unwrap_or_else(default_alphas);
            let lambdas = cfg.lambdas.clone().unwrap_or_else(|| (0..=2000).map(|i| -10.0 + 0.01 * i as f64).collect());
            let lam = exact::log_mgf(q, n, &lambdas)?;
            let rate = conjugate(&lambdas, &lam, &alphas)?;
            let mut t = Table::new("rate", &["alpha", "conjugate", "analytic"]);
            for (a, v) in alphas.iter().zip(rate) {
                t.push(vec![(*a).into(), v.into(), analytic_rate_free(q, *a)?.into()]);
            }
            report.set("source", "mgf");
            report.set("n", n);
            report.add(t);
        }
        other => return Err(config_error(format!("unknown --source {other:?} for legendre"))),
    }
    Ok(report)
}

pub fn chernoff(cfg: &RunConfig) -> Result<Report, CliError> {
    let (q, n) = (cfg.q(), cfg.require(&cfg.n, "n")?);
    let levels = cfg.alphas.clone().or(cfg.alpha.map(|a| vec![a])).ok_or_else(|| config_error("give --alphas"))?;
    let lambdas = cfg.lambdas.clone().unwrap_or_else(|| (0..=1000).map(|i| 0.01 * i as f64).collect());
    let law = exact::dist_law(q, n)?;
    let lam: Vec<f64> = lambdas.iter().map(|&l| law.log_mgf(l)).collect();
    let mut t = Table::new("chernoff", &["a", "bound", "exact_rate"]);
    for a in levels {
        let bound = chernoff_upper(a, &lambdas, &lam)?;
        let exact_rate = -law.deviation(a, Side::Above) / n as f64;
        t.push(vec![a.into(), bound.into(), exact_rate.into()]);
    }
    let mut report = Report::default();
    report.set("q", q);
    report.set("n", n);
    report.add(t);
    Ok(report)
}

pub fn analytic(cfg: &RunConfig) -> Result<Report, CliError> {
    let q = cfg.q();
    let alphas = cfg.alphas.clone().or(cfg.alpha.map(|a| vec![a])).unwrap_or_else(default_alphas);
    let mut t = Table::new("analytic", &["alpha", "rate"]);
    for a in &alphas {
        t.push(vec![(*a).into(), analytic_rate_free(q, *a)?.into()]);
    }
    let mut report = Report::default();
    report.set("q", q);
    if let [a] = alphas.as_slice() {
        report.set("rate", analytic_rate_free(q, *a)?);
    }
    report.add(t);
    Ok(report)
}

fn joint_input(cfg: &RunConfig) -> Result<(FreeGroup, Vec<Word>, usize), CliError> {
    let group = match backend(cfg)? {
        Backend::Free(g) => g,
        Backend::Sl2(_) => return Err(config_error("joint spectra need the free backend")),
    };
    let b = group.parse_elements(&cfg.require(&cfg.elements, "elements")?)?;
    let n_max = cfg.require(&cfg.n_max, "n-max")?;
    Ok((group, b, n_max))
}

fn bracket(report: &mut Report, name: &str, b: &hyperwalk::ldp::Bracket) {
    report.set(&format!("{name}_best"), b.best);
    report.set(&format!("{name}_last"), b.last);
}

pub fn spectrum(cfg: &RunConfig) -> Result<Report, CliError> {
    let (group, b, n_max) = joint_input(cfg)?;
    let js = joint_spectrum(&group, &b, n_max)?;
    let mut report = Report::default();
    bracket(&mut report, "ell_sub", &js.ell_sub);
    bracket(&mut report, "ell", &js.ell);
    bracket(&mut report, "ell_inf", &js.ell_inf);
    report.set("partial", js.partial);
    let mut t = Table::new(
        "levels",
        &["n", "distinct", "values", "min_disp", "max_disp", "min_tau", "max_tau", "hausdorff"],
    );
    for l in &js.levels {
        t.push(vec![
            l.n.into(),
            l.distinct.into(),
            l.values.len().into(),
            l.min_disp.into(),
            l.max_disp.into(),
            l.min_tau.into(),
            l.max_tau.into(),
            l.hausdorff.into(),
        ]);
    }
    report.add(t);
    Ok(report)
}

pub fn arithmetic(cfg: &RunConfig) -> Result<Report, CliError> {
    let (group, b, n_max) = joint_input(cfg)?;
    let mut report = Report::default();
    match non_arithmetic(&group, &b, n_max)? {
        Arithmeticity::NonArithmetic { n, g1, g2, ell1, ell2 } => {
            report.set("result", "non-arithmetic");
            report.set("n", n);
            report.set("g1", g1.to_string());
            report.set("g2", g2.to_string());
            report.set("ell1", ell1);
            report.set("ell2", ell2);
        }
        Arithmeticity::Arithmetic { n_max } => {
            report.set("result", "arithmetic");
            report.set("n_max", n_max);
        }
    }
    Ok(report)
}

pub fn berger_wang(cfg: &RunConfig) -> Result<Report, CliError> {
    let (group, b, n_max) = joint_input(cfg)?;
    let r = bw(&group, &b, n_max)?;
    let mut report = Report::default();
    bracket(&mut report, "ell_inf", &r.ell_inf);
    bracket(&mut report, "ell", &r.ell);
    report.set("gap", r.gap);
    Ok(report)
}
