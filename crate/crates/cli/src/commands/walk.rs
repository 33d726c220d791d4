use hyperwalk::tails::{cylinder_measure, harmonic_cylinders, harmonic_decay, HarmonicOptions, HarmonicRun};
use hyperwalk::walk::{
    gromov_deviation_probe, simulate as run_walks, walking_away_probe, GromovMode, Observables, ProbeReport, WalkRun,
    DEFAULT_CHUNK_SIZE,
};
use hyperwalk::PointedAction;

use super::{backend, json};
use crate::backend::{with_backend, ParseElement};
use crate::config::RunConfig;
use crate::error::{config_error, CliError};
use crate::report::{Report, Table};

fn walk_run(cfg: &RunConfig, horizon: usize) -> Result<WalkRun, CliError> {
    let samples = cfg.require(&cfg.samples, "samples")?;
    let run = WalkRun::new(horizon, samples, cfg.seed()?)?;
    Ok(run.with_chunk_size(cfg.chunk_size.unwrap_or(DEFAULT_CHUNK_SIZE))?)
}

pub fn simulate(cfg: &RunConfig) -> Result<Report, CliError> {
    let n = cfg.require(&cfg.n, "n")?;
    let run = walk_run(cfg, n)?;
    with_backend!(&backend(cfg)?, space => {
        let mu = space.parse_measure(cfg.measure.as_deref().unwrap_or("uniform-gens"))?;
        let observables = Observables {
            ell_n_max: cfg.n_max.map(|m| m as u64),
            gromov_points: Vec::new(),
        };
        let records = run_walks(space, &mu, &run, &observables, cfg.workers)?;
        let count = records.len() as f64;
        let mut report = Report::default();
        report.set("samples", records.len());
        report.set("mean_d", records.iter().map(|r| r.d).sum::<f64>() / count);
        report.set("mean_tau", records.iter().map(|r| r.tau).sum::<f64>() / count);
        report.set("mean_d_over_n", records.iter().map(|r| r.d).sum::<f64>() / (count * n as f64));
        let mut t = Table::new("records", &["sample_id", "n", "d", "tau", "ell_lo", "ell_hi"]);
        for r in &records {
            t.push(vec![r.sample_id.into(), r.n.into(), r.d.into(), r.tau.into(), r.ell_lo.into(), r.ell_hi.into()]);
        }
        report.add(t);
        Ok(report)
    })
}

fn probe_report(p: &ProbeReport) -> Report {
    let mut report = Report::default();
    report.set("parameter", p.parameter);
    match &p.fit {
        Some(f) => {
            report.set("slope", f.slope);
            report.set("intercept", f.intercept);
            report.set("r_squared", f.r_squared);
            report.set("fit_points", f.points);
        }
        None => report.set("slope", Option::<f64>::None),
    }
    report.set("mean_statistic", p.mean_statistic);
    report.set("note", p.note.clone());
    let mut t = Table::new(
        "probe",
        &["parameter", "hits", "samples", "prob", "log_prob", "lower", "upper", "censored"],
    );
    for c in &p.cells {
        let e = &c.estimate;
        t.push(vec![
            c.parameter.into(),
            e.hits.into(),
            e.samples.into(),
            e.prob().into(),
            e.log_prob.into(),
            e.lower.into(),
            e.upper.into(),
            e.censored.into(),
        ]);
    }
    report.add(t);
    report
}

fn r_grid(cfg: &RunConfig) -> Vec<f64> {
    cfg.r.clone().unwrap_or_else(|| (1..=6).map(f64::from).collect())
}

pub fn gromov(cfg: &RunConfig) -> Result<Report, CliError> {
    let n = cfg.require(&cfg.n, "n")?;
    let i = cfg.require(&cfg.i, "i")?;
    let run = walk_run(cfg, n)?;
    with_backend!(&backend(cfg)?, space => {
        let mu = space.parse_measure(cfg.measure.as_deref().unwrap_or("uniform-gens"))?;
        let p = gromov_deviation_probe(space, &mu, &run, &GromovMode::Intermediate { i }, &r_grid(cfg), cfg.workers)?;
        Ok(probe_report(&p))
    })
}

pub fn punctual(cfg: &RunConfig) -> Result<Report, CliError> {
    let n = cfg.require(&cfg.n, "n")?;
    let x = cfg.require(&cfg.x, "x")?;
    let run = walk_run(cfg, n)?;
    with_backend!(&backend(cfg)?, space => {
        let mu = space.parse_measure(cfg.measure.as_deref().unwrap_or("uniform-gens"))?;
        let point = space.orbit(&space.parse_element(&x)?)?;
        let p = gromov_deviation_probe(space, &mu, &run, &GromovMode::Punctual { x: point }, &r_grid(cfg), cfg.workers)?;
        Ok(probe_report(&p))
    })
}

pub fn walk_away(cfg: &RunConfig) -> Result<Report, CliError> {
    let ns = cfg.ns.clone().ok_or_else(|| config_error("walk-away needs --ns"))?;
    let horizon = *ns.iter().max().ok_or_else(|| config_error("--ns must not be empty"))?;
    let eps = cfg.eps.unwrap_or(0.25);
    let run = walk_run(cfg, horizon)?;
    with_backend!(&backend(cfg)?, space => {
        let mu = space.parse_measure(cfg.measure.as_deref().unwrap_or("uniform-gens"))?;
        let point = match &cfg.x {
            Some(x) => space.orbit(&space.parse_element(x)?)?,
            None => space.basepoint(),
        };
        let p = walking_away_probe(space, &mu, &run, &point, eps, &ns, cfg.workers)?;
        let mut report = probe_report(&p);
        report.set("eps", eps);
        Ok(report)
    })
}

fn cylinder_table(runs: &[HarmonicRun]) -> Table {
    let mut t = Table::new(
        "cylinders",
        &["prefix", "depth", "hits", "samples", "estimate", "ci_lo", "ci_hi", "exact"],
    );
    for run in runs {
        let exact = cylinder_measure(run.q, run.depth);
        for c in &run.cylinders {
            t.push(vec![
                c.prefix.clone().into(),
                c.depth.into(),
                c.hits.into(),
                c.samples.into(),
                c.estimate.into(),
                c.ci_lo.into(),
                c.ci_hi.into(),
                exact.into(),
            ]);
        }
    }
    t
}

pub fn harmonic(cfg: &RunConfig) -> Result<Report, CliError> {
    let q = cfg.q();
    let k = cfg.require(&cfg.k, "k")?;
    let mut options = HarmonicOptions::new(cfg.require(&cfg.samples, "samples")?, cfg.seed()?);
    options.workers = cfg.workers;
    if let Some(c) = cfg.chunk_size {
        options.chunk_size = c;
    }
    let mut report = Report::default();
    report.set("q", q);
    report.set("exact_decay", ((2 * q - 1) as f64).ln());
    let runs = if k >= 3 {
        let (runs, fit) = harmonic_decay(q, k, &options)?;
        report.set("d", fit.d);
        report.set("log_c", fit.log_c);
        report.set("r_squared", fit.r_squared);
        report.set("degenerate", fit.degenerate);
        report.set("fit", json(&fit));
        runs
    } else {
        vec![harmonic_cylinders(q, k, &options)?]
    };
    let deepest = runs.last().expect("at least one depth");
    report.set("horizon", deepest.horizon);
    report.set("resimulated", deepest.resimulated);
    report.add(cylinder_table(&runs));
    Ok(report)
}
