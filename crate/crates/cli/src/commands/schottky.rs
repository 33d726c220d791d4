use hyperwalk::schottky::{
    boost_translation, construct_pingpong, construct_pingpong_tree, minimal_constant, minimal_constant_sampled,
    moving_tau_from_lengths, rotation_lengths, verify_sampled, verify_tree, PingPong, PingPongOptions,
    SchottkyCertificate,
};
use hyperwalk::PointedAction;

use super::{backend, json};
use crate::backend::{with_backend, Backend, ParseElement};
use crate::config::RunConfig;
use crate::error::{config_error, CliError};
use crate::report::{Report, Table};

const DEFAULT_TRIALS: u64 = 10_000;

fn certificate_report(cert: Option<&SchottkyCertificate>, c_max: Option<usize>) -> Report {
    let mut report = Report::default();
    match cert {
        Some(c) => {
            report.set("valid", c.valid);
            report.set("constant", c.constant);
            report.set("worst_failures", c.worst_failures);
            report.set("allowed_failures", c.allowed_failures);
            report.set("worst_fraction", c.worst_fraction);
            report.set("certificate", json(c));
        }
        None => {
            report.set("valid", false);
            report.set("constant", Option::<f64>::None);
            report.set("c_max", c_max);
        }
    }
    report
}

pub fn verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let list = cfg.require(&cfg.elements, "elements")?;
    let b = backend(cfg)?;
    let mode = cfg.source.clone().unwrap_or_else(|| match b {
        Backend::Free(_) => "exact".into(),
        Backend::Sl2(_) => "sampled".into(),
    });
    let name = b.name();
    match (mode.as_str(), &b) {
        ("exact", Backend::Free(group)) => {
            let set = group.parse_elements(&list)?;
            match cfg.constant {
                Some(c) => {
                    if c < 0.0 || c.fract() != 0.0 {
                        return Err(config_error("the exact checker needs a non-negative integer --constant"));
                    }
                    Ok(certificate_report(Some(&verify_tree(group, &set, c as usize)?), None))
                }
                None => {
                    let c_max = cfg.c_max.unwrap_or(8);
                    Ok(certificate_report(minimal_constant(group, &set, c_max)?.as_ref(), Some(c_max)))
                }
            }
        }
        ("exact", Backend::Sl2(_)) => Err(config_error("exact verification needs the free backend")),
        ("sampled", _) => with_backend!(&b, space => {
            let set = space.parse_elements(&list)?;
            let labels: Vec<String> = set.iter().map(|g| space.label(g)).collect();
            let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
            let seed = cfg.seed()?;
            match cfg.constant {
                Some(c) => {
                    let cert = verify_sampled(space, &name, &set, labels, c, trials, seed)?;
                    Ok(certificate_report(Some(&cert), None))
                }
                None => {
                    let c_max = cfg.c_max.unwrap_or(50);
                    let cert = minimal_constant_sampled(space, &name, &set, labels, c_max as u32, trials, seed)?;
                    Ok(certificate_report(cert.as_ref(), Some(c_max)))
                }
            }
        }),
        (other, _) => Err(config_error(format!("unknown --source {other:?}; use exact or sampled"))),
    }
}

fn pingpong_report<A: ParseElement>(space: &A, pp: &PingPong<A::Element>) -> Report {
    let mut report = certificate_report(Some(&pp.certificate), None);
    report.set("n", pp.n);
    let mut attempts = Table::new("attempts", &["n", "check", "holds", "points", "detail", "certified"]);
    for a in &pp.attempts {
        for c in &a.checks {
            attempts.push(vec![
                a.n.into(),
                c.name.clone().into(),
                c.holds.into(),
                c.points.into(),
                c.detail.clone().into(),
                a.certified.into(),
            ]);
        }
    }
    let mut elements = Table::new("elements", &["label", "element", "translation_length"]);
    for (g, l) in pp.elements.iter().zip(&pp.labels) {
        elements.push(vec![l.clone().into(), space.label(g).into(), space.translation_length(g).into()]);
    }
    report.add(attempts);
    report.add(elements);
    report
}

pub fn construct(cfg: &RunConfig) -> Result<Report, CliError> {
    let options = PingPongOptions::default();
    let g1 = cfg.require(&cfg.g1, "g1")?;
    let g2 = cfg.require(&cfg.g2, "g2")?;
    match backend(cfg)? {
        Backend::Free(group) => {
            let (a, b) = (group.parse_element(&g1)?, group.parse_element(&g2)?);
            let pp = construct_pingpong_tree(&group, &a, &b, &options, cfg.c_max.unwrap_or(8))?;
            Ok(pingpong_report(&group, &pp))
        }
        Backend::Sl2(plane) => {
            let (a, b) = (plane.parse_element(&g1)?, plane.parse_element(&g2)?);
            let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
            let seed = cfg.seed()?;
            let c_max = cfg.c_max.unwrap_or(50) as u32;
            let pp = construct_pingpong(&plane, &a, &b, &options, |set, labels| {
                minimal_constant_sampled(&plane, "sl2", set, labels.to_vec(), c_max, trials, seed)
            })?;
            Ok(pingpong_report(&plane, &pp))
        }
    }
}

pub fn boost(cfg: &RunConfig) -> Result<Report, CliError> {
    let list = cfg.require(&cfg.elements, "elements")?;
    let word = cfg.require(&cfg.word, "word")?;
    with_backend!(&backend(cfg)?, space => {
        let set = space.parse_elements(&list)?;
        let g = space.parse_element(&word)?;
        let b = boost_translation(space, &set, &g)?;
        let mut report = Report::default();
        report.set("index", b.index);
        report.set("element", list[b.index].clone());
        report.set("tau", b.tau);
        report.set("displacement", b.displacement);
        report.set("deficit", b.deficit);
        let mut t = Table::new("candidates", &["index", "element", "tau"]);
        for (i, s) in set.iter().enumerate() {
            t.push(vec![i.into(), list[i].clone().into(), space.translation_length(&space.compose(s, &g)).into()]);
        }
        report.add(t);
        Ok(report)
    })
}

pub fn moving_tau(cfg: &RunConfig) -> Result<Report, CliError> {
    let group = match backend(cfg)? {
        Backend::Free(g) => g,
        Backend::Sl2(_) => return Err(config_error("moving-tau works on free-group words only")),
    };
    let text = cfg.require(&cfg.word, "word")?;
    // Letters are read one at a time so the step sequence stays unreduced.
    let mut letters = Vec::new();
    for ch in text.chars().filter(|c| !c.is_whitespace()) {
        let w = group.parse_element(&ch.to_string())?;
        letters.extend_from_slice(w.letters());
    }
    if letters.is_empty() {
        return Err(config_error("--word must contain at least one letter"));
    }
    let product = hyperwalk::Word::reduce(letters.iter().copied());
    let (tau, d) = (product.translation_length(), product.len());
    let targets = cfg.r.clone().unwrap_or_else(|| (tau..=d).map(|r| r as f64).collect());
    let lengths = rotation_lengths(&letters);
    let mut t = Table::new("targets", &["r", "index", "length", "gap"]);
    for r in targets {
        let m = moving_tau_from_lengths(&letters, &lengths, r)?;
        t.push(vec![r.into(), m.index.into(), m.length.into(), m.gap.into()]);
    }
    let mut report = Report::default();
    report.set("steps", letters.len());
    report.set("tau", tau);
    report.set("displacement", d);
    report.add(t);
    Ok(report)
}
