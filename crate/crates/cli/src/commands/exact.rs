use hyperwalk::exact::{self, Side, RATIONAL_CAP};
use hyperwalk::ldp::{mgf_derivatives_at_zero, rate_curve_exact, rate_curve_tau_exact};
use num_rational::BigRational;

use super::Outcome;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{Cell, Report, Table};

fn rational(r: &BigRational) -> Cell {
    Cell::Text(format!("{}/{}", r.numer(), r.denom()))
}

fn check_rational_cap(n: usize) -> Result<(), CliError> {
    if n > RATIONAL_CAP {
        return Err(hyperwalk::Error::CapExceeded {
            what: "exact rational horizon",
            requested: n,
            cap: RATIONAL_CAP,
        }
        .into());
    }
    Ok(())
}

fn law_report(
    cfg: &RunConfig,
    name: &str,
    law: impl Fn() -> hyperwalk::Result<exact::DistanceDistribution>,
    rational_law: impl Fn() -> hyperwalk::Result<Vec<BigRational>>,
) -> Result<Report, CliError> {
    let n = cfg.require(&cfg.n, "n")?;
    let mut report = Report::default();
    report.set("q", cfg.q());
    report.set("n", n);
    if cfg.exact == Some(true) {
        check_rational_cap(n)?;
        let probs = rational_law()?;
        let mut t = Table::new(name, &["k", "prob"]);
        for (k, p) in probs.iter().enumerate() {
            t.push(vec![k.into(), rational(p)]);
        }
        report.add(t);
    } else {
        let law = law()?;
        report.set("mean", law.mean());
        report.set("variance", law.variance());
        let mut t = Table::new(name, &["k", "prob", "log_prob"]);
        for k in 0..=n {
            t.push(vec![k.into(), law.prob(k).into(), law.log_prob(k).into()]);
        }
        report.add(t);
    }
    Ok(report)
}

pub fn exact_dist(cfg: &RunConfig) -> Result<Report, CliError> {
    let (q, n) = (cfg.q(), cfg.n.unwrap_or(0));
    law_report(
        cfg,
        "distance",
        || exact::dist_law(q, n),
        || exact::dist_law_linear::<BigRational>(q, n),
    )
}

pub fn tau_dist(cfg: &RunConfig) -> Result<Report, CliError> {
    let (q, n) = (cfg.q(), cfg.n.unwrap_or(0));
    law_report(cfg, "translation", || exact::tau_law(q, n), || exact::tau_law_rational(q, n))
}

pub fn return_rate(cfg: &RunConfig) -> Result<Report, CliError> {
    let n_max = cfg.require(&cfg.n_max, "n-max")?;
    let rates = exact::return_rate(cfg.q(), n_max)?;
    let mut report = Report::default();
    report.set("q", cfg.q());
    report.set("limit", exact::kesten_rate(cfg.q()));
    let mut t = Table::new("return", &["n", "rate", "running_inf"]);
    let mut inf = f64::INFINITY;
    for (i, r) in rates.iter().enumerate() {
        inf = inf.min(*r);
        t.push(vec![(i + 1).into(), (*r).into(), inf.into()]);
    }
    report.set("last", rates.last().copied());
    report.set("running_inf", inf);
    report.add(t);
    Ok(report)
}

pub fn mgf(cfg: &RunConfig) -> Result<Report, CliError> {
    let n = cfg.require(&cfg.n, "n")?;
    let lambdas = cfg.lambdas.clone().unwrap_or_else(|| (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect());
    let law = exact::dist_law(cfg.q(), n)?;
    let (d1, d2) = mgf_derivatives_at_zero(&law, 1e-3);
    let mut report = Report::default();
    report.set("q", cfg.q());
    report.set("n", n);
    report.set("derivative_at_0", d1);
    report.set("second_derivative_at_0", d2);
    report.set("variance_over_n", law.variance() / n.max(1) as f64);
    let mut t = Table::new("mgf", &["lambda", "log_mgf"]);
    for (l, v) in lambdas.iter().zip(exact::log_mgf(cfg.q(), n, &lambdas)?) {
        t.push(vec![(*l).into(), v.into()]);
    }
    report.add(t);
    Ok(report)
}

pub fn compare_tau_vs_dist(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n.unwrap_or(2048);
    let tol = cfg.tol.unwrap_or(2e-2);
    let alphas = cfg
        .alphas
        .clone()
        .unwrap_or_else(|| (0..8).map(|i| 0.55 + 0.05 * i as f64).collect());
    let d = rate_curve_exact(cfg.q(), Side::Above, &alphas, &[n])?.values();
    let t = rate_curve_tau_exact(cfg.q(), Side::Above, &alphas, &[n])?.values();
    let mut table = Table::new("compare", &["alpha", "d_rate", "tau_rate", "difference"]);
    let mut sup = 0.0f64;
    for ((a, x), y) in alphas.iter().zip(&d).zip(&t) {
        let diff = if x == y { 0.0 } else { (x - y).abs() };
        sup = sup.max(diff);
        table.push(vec![(*a).into(), (*x).into(), (*y).into(), diff.into()]);
    }
    let mut report = Report::default();
    report.set("q", cfg.q());
    report.set("n", n);
    report.set("sup_difference", sup);
    report.set("tolerance", tol);
    report.set("pass", sup <= tol);
    report.add(table);
    let failure = (sup > tol).then(|| format!("sup difference {sup} exceeds {tol}"));
    Ok(Outcome { report, failure })
}
