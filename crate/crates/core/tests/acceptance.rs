//! End-to-end acceptance run. Every criterion prints one `PASS`/`FAIL`
//! line; the test fails if any criterion does.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hyperwalk::exact::{dist_law, dist_law_linear, drift, kesten_rate, return_rate, tau_law_rational, Side};
use hyperwalk::ldp::*;
use hyperwalk::schottky::{
    boost_translation, construct_pingpong_tree, moving_tau_from_lengths, rotation_lengths, verify_tree,
    PingPongOptions,
};
use hyperwalk::sl2::{dist_disc, mobius_act, norm_displacement, spectral_log, tau_trace};
use hyperwalk::space::stable_length_dyadic;
use hyperwalk::stats::linear_fit;
use hyperwalk::tails::{cylinder_measure, harmonic_decay, HarmonicOptions};
use hyperwalk::walk::{
    gromov_deviation_probe, map_chunks, sample_endpoint, uniform_generators, walking_away_probe, FiniteMeasure,
    GromovMode, WalkRun,
};
use hyperwalk::{Disc, FreeGroup, Letter, Mobius, Plane, Word};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_time(start: Instant, limit_s: u64) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took <= Duration::from_secs(limit_s), format!("took {took:.2?}, limit {limit_s} s"))?;
    Ok(took)
}

fn f2() -> FreeGroup {
    FreeGroup::new(2).unwrap()
}

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

fn letters(codes: &[u8]) -> Vec<Letter> {
    codes.iter().map(|&c| Letter::from_code(c as usize)).collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    for n in 0..=10usize {
        let (d, _) = common::brute_laws(2, n);
        let total = BigInt::from(4u64.pow(n as u32));
        let law = dist_law_linear::<BigRational>(2, n).map_err(|e| e.to_string())?;
        for k in 0..=n {
            let want = BigRational::new(BigInt::from(d[k]), total.clone());
            ensure(law[k] == want, format!("n={n} k={k}: {} vs {want}", law[k]))?;
        }
    }
    let took = within_time(start, 10)?;
    Ok(format!("rational laws equal enumeration for n <= 10 in {took:.2?}"))
}

fn drift_check() -> Outcome {
    let start = Instant::now();
    let law = dist_law(2, 2000).map_err(|e| e.to_string())?;
    let mean = law.mean() / 2000.0;
    ensure((mean - 0.5).abs() < 1e-3, format!("E[d_n]/n = {mean}"))?;
    let took = within_time(start, 1)?;
    Ok(format!("E[d_2000]/2000 = {mean:.6} in {took:.2?}"))
}

fn kesten_radius() -> Outcome {
    let target = -(3f64.sqrt() / 2.0).ln();
    ensure((kesten_rate(2) - target).abs() < 1e-12, "closed form")?;
    ensure((target - 0.1438410).abs() < 1e-6, format!("closed form value {target}"))?;
    let rates = return_rate(2, 2048).map_err(|e| e.to_string())?;
    let last = *rates.last().unwrap();
    ensure((last - target).abs() < 1e-2, format!("rate at n=2048: {last}"))?;
    let mut fekete = f64::INFINITY;
    for (i, r) in rates.iter().enumerate() {
        let next = fekete.min(*r);
        ensure(next <= fekete, "running infimum increased")?;
        ensure(next >= target - 1e-12, format!("infimum below the limit at n={}", i + 1))?;
        fekete = next;
    }
    Ok(format!("rate(2048) = {last:.6}, Fekete inf = {fekete:.6}, limit {target:.7}"))
}

fn rate_function_curve() -> Outcome {
    let start = Instant::now();
    let alphas = grid(0.05, 0.95, 0.05);
    let (below_a, above_a): (Vec<f64>, Vec<f64>) = alphas.iter().partition(|&&a| a < 0.5 - 1e-12);
    let above = rate_curve_exact(2, Side::Above, &above_a, &[4096]).map_err(|e| e.to_string())?;
    let below = rate_curve_exact(2, Side::Below, &below_a, &[4096]).map_err(|e| e.to_string())?;
    let mut sup = 0.0f64;
    for (a, v) in above_a.iter().chain(&below_a).zip(above.values().iter().chain(&below.values())) {
        let exact = analytic_rate_free(2, *a).map_err(|e| e.to_string())?;
        sup = sup.max((v - exact).abs());
    }
    ensure(sup < 1e-2, format!("sup-norm {sup}"))?;
    let rf = assemble_rate(&above, &below, drift(2)).map_err(|e| e.to_string())?;
    let (worst, tol) = rf.convexity_violation();
    ensure(worst <= tol, format!("convexity violation {worst} > {tol}"))?;
    let at = rf.alphas[rf.argmin()];
    ensure((at - 0.5).abs() < 1e-12, format!("minimum at {at}"))?;
    let took = within_time(start, 30)?;
    Ok(format!("sup-norm {sup:.2e}, convex, minimum at 0.50, {took:.2?}"))
}

fn translation_length_ldp() -> Outcome {
    let alphas = grid(0.55, 0.90, 0.05);
    let d = rate_curve_exact(2, Side::Above, &alphas, &[2048]).map_err(|e| e.to_string())?.values();
    let t = rate_curve_tau_exact(2, Side::Above, &alphas, &[2048]).map_err(|e| e.to_string())?.values();
    let sup = d.iter().zip(&t).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    ensure(sup < 2e-2, format!("tau vs d sup-norm {sup}"))?;
    let (_, brute) = common::brute_laws(2, 10);
    let total = BigInt::from(4u64.pow(10));
    let tau = tau_law_rational(2, 10).map_err(|e| e.to_string())?;
    let mut tv = BigRational::zero();
    for k in 0..=10 {
        let diff = &tau[k] - BigRational::new(BigInt::from(brute[k]), total.clone());
        tv += if diff < BigRational::zero() { -diff } else { diff };
    }
    ensure(tv.is_zero(), format!("total variation {tv}"))?;
    Ok(format!("tau/d sup-norm {sup:.2e}; tau law at n=10 has TV 0"))
}

fn sandwich_lemmas() -> Outcome {
    let below_ns: Vec<usize> = (100..=1000).collect();
    let rep = tau_sandwich_check(2, 0.3, 0.05, &below_ns, &[], 0).map_err(|e| e.to_string())?;
    let bad: Vec<usize> = rep.below.iter().filter(|c| !c.holds).map(|c| c.n).collect();
    ensure(rep.below_all_hold && bad.is_empty(), format!("below fails at n = {bad:?}"))?;
    let above_ns: Vec<usize> = (100..=1000).step_by(50).collect();
    let rep = tau_sandwich_check(2, 0.7, 0.05, &[], &above_ns, 16).map_err(|e| e.to_string())?;
    let fit = rep.above.ok_or("no above fit")?;
    ensure(fit.passes && fit.p <= 16, format!("above fit {fit:?}"))?;
    Ok(format!("below holds on 100..=1000; above holds with c = {:.4e}, p = {}", fit.c, fit.p))
}

fn subadditivity() -> Outcome {
    let g: Vec<usize> = (20..=200).step_by(20).collect();
    let fit = fit_upper_constant(2, &g, 16, 16).map_err(|e| e.to_string())?;
    let worst = check_upper_inequality(2, &g, fit.c, fit.p).map_err(|e| e.to_string())?;
    ensure(worst <= 0.0, format!("upper inequality excess {worst}"))?;
    let rep = below_subadditivity(2, 512, &[0.1, 0.2, 0.3, 0.4]).map_err(|e| e.to_string())?;
    ensure(rep.holds, format!("below-subadditivity excess {}", rep.worst_excess))?;
    Ok(format!("upper holds with c = {:.3}, p = {}; below holds for n, m <= 512", fit.c, fit.p))
}

fn schottky_pipeline() -> Outcome {
    let start = Instant::now();
    let g = f2();
    let pp = construct_pingpong_tree(&g, &w("a"), &w("b"), &PingPongOptions::default(), 8).map_err(|e| e.to_string())?;
    ensure(pp.elements.len() == 128, format!("{} elements", pp.elements.len()))?;
    ensure(pp.certificate.valid, "certificate invalid")?;
    for c in 0..=5 {
        let cert = verify_tree(&g, &[w("a"), w("A")], c).map_err(|e| e.to_string())?;
        ensure(!cert.valid, format!("{{a, A}} accepted at C = {c}"))?;
    }
    let took = within_time(start, 60)?;
    Ok(format!("n = {}, C = {}, {{a, A}} rejected for C <= 5, {took:.2?}", pp.n, pp.certificate.constant))
}

fn boost_deficit() -> Outcome {
    let g = f2();
    let pp = construct_pingpong_tree(&g, &w("a"), &w("b"), &PingPongOptions::default(), 8).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xb005);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for _ in 0..10_000 {
        let len = rng.gen_range(50..=400);
        let word = hyperwalk::free_group::uniform_sphere_sample(2, len, &mut rng).map_err(|e| e.to_string())?;
        let b = boost_translation(&g, &pp.elements, &word).map_err(|e| e.to_string())?;
        xs.push(len as f64);
        ys.push(b.deficit);
    }
    let slope = linear_fit(&xs, &ys).map_err(|e| e.to_string())?.slope;
    let max = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ensure(slope.abs() <= 0.01, format!("slope {slope}"))?;
    Ok(format!("deficit slope {slope:.2e}, max deficit {max}"))
}

fn moving_tau() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let steps = common::random_steps(2, 400, &mut rng);
        let ls = letters(&steps);
        let lengths = rotation_lengths(&ls);
        let word = Word::reduce(ls.iter().copied());
        let (tau, d) = (word.translation_length() as f64, word.len() as f64);
        for j in 0..50 {
            let r = tau + (d - tau) * j as f64 / 49.0;
            let m = moving_tau_from_lengths(&ls, &lengths, r).map_err(|e| e.to_string())?;
            worst = worst.max(m.gap);
        }
    }
    ensure(worst <= 2.0, format!("worst gap {worst}"))?;
    Ok(format!("worst gap {worst}"))
}

fn joint_spectrum_check() -> Outcome {
    let g = f2();
    let js = joint_spectrum(&g, &[w("a"), w("ab")], 12).map_err(|e| e.to_string())?;
    ensure(!js.partial, "enumeration truncated")?;
    let h: Vec<f64> = js.levels.iter().map(|l| hausdorff_to_interval(&l.values, 1.0, 2.0)).collect();
    ensure(h.windows(2).all(|p| p[1] <= p[0] + 1e-12), format!("Hausdorff distances {h:?}"))?;
    let last = *h.last().unwrap();
    ensure(last < 0.2, format!("Hausdorff at n = 12: {last}"))?;
    ensure(
        matches!(non_arithmetic(&g, &[w("a"), w("ab")], 12).map_err(|e| e.to_string())?, Arithmeticity::NonArithmetic { .. }),
        "no non-arithmetic witness for {a, ab}",
    )?;
    let ab = joint_spectrum(&g, &[w("a"), w("b")], 12).map_err(|e| e.to_string())?;
    ensure(ab.levels.iter().all(|l| l.values == vec![1.0]), "spectrum of {a, b} is not {1}")?;
    ensure(
        non_arithmetic(&g, &[w("a"), w("b")], 12).map_err(|e| e.to_string())? == Arithmeticity::Arithmetic { n_max: 12 },
        "{a, b} reported non-arithmetic",
    )?;
    Ok(format!("Hausdorff distance at n = 12: {last:.4}; arithmeticity as expected"))
}

fn legendre_duality() -> Outcome {
    let step = 0.005;
    let alphas = grid(0.0, 1.0, step);
    let rates: Vec<f64> = alphas.iter().map(|&a| analytic_rate_free(2, a).unwrap()).collect();
    let lambdas = grid(-40.0, 40.0, 0.005);
    let conj = legendre(&alphas, &rates, &lambdas).map_err(|e| e.to_string())?;
    let back = legendre(&lambdas, &conj, &alphas).map_err(|e| e.to_string())?;
    for i in 0..alphas.len() {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(alphas.len() - 1);
        let tol = (rates[hi] - rates[i]).abs().max((rates[i] - rates[lo]).abs());
        ensure(
            (back[i] - rates[i]).abs() <= tol + 1e-12,
            format!("alpha {}: I** = {} vs I = {}", alphas[i], back[i], rates[i]),
        )?;
    }
    let n = 2000;
    let law = dist_law(2, n).map_err(|e| e.to_string())?;
    let (d1, d2) = mgf_derivatives_at_zero(&law, 1e-3);
    let var = law.variance() / n as f64;
    ensure((d1 - 0.5).abs() < 1e-3, format!("Lambda'(0) = {d1}"))?;
    ensure((d2 - var).abs() < 5e-3, format!("Lambda''(0) = {d2} vs Var/n = {var}"))?;
    let lam_grid = grid(-5.0, 10.0, 0.01);
    let lam: Vec<f64> = lam_grid.iter().map(|&l| law.log_mgf(l)).collect();
    for a in grid(0.55, 1.0, 0.05) {
        let bound = chernoff_upper(a, &lam_grid, &lam).map_err(|e| e.to_string())?;
        let exact = -law.deviation(a, Side::Above) / n as f64;
        ensure(bound <= exact + 1e-9, format!("a = {a}: chernoff {bound} > exact {exact}"))?;
    }
    Ok(format!("I** = I within one step; Lambda'(0) = {d1:.5}, Lambda''(0) = {d2:.5} vs {var:.5}"))
}

fn sl2_dictionary() -> Outcome {
    let plane = Plane::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x512);
    let random = |rng: &mut ChaCha8Rng| loop {
        let [a, b, c, d]: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        if a * d - b * c > 0.05 {
            return Mobius::from_entries(a, b, c, d).unwrap();
        }
    };
    let (mut worst_norm, mut worst_tau, mut worst_stable) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let g = random(&mut rng);
        let image = mobius_act(&g, &Disc::origin()).map_err(|e| e.to_string())?;
        worst_norm = worst_norm.max((norm_displacement(&g) - dist_disc(&Disc::origin(), &image)).abs());
        if let Some(t) = tau_trace(&g) {
            worst_tau = worst_tau.max((t - 2.0 * spectral_log(&g)).abs());
            if t > 1e-3 {
                let sl = stable_length_dyadic(&plane, &g, 64).map_err(|e| e.to_string())?;
                worst_stable = worst_stable.max((sl.last_term - t).abs());
            }
        }
    }
    ensure(worst_norm <= 1e-9, format!("norm displacement error {worst_norm}"))?;
    ensure(worst_tau <= 1e-9, format!("tau_trace error {worst_tau}"))?;
    ensure(worst_stable <= 1e-6, format!("stable length error {worst_stable}"))?;

    // Rate curves of the two normalizations along the same trajectories.
    let g1 = Mobius::hyperbolic(0.5);
    let r = Mobius::rotation(std::f64::consts::FRAC_PI_4);
    let g2 = r.compose(&g1).compose(&r.inverse());
    let mu = FiniteMeasure::uniform(vec![g1, g2]).unwrap();
    let n = 200;
    let run = WalkRun::new(n, 1_000_000, 0x13).unwrap();
    let pairs: Vec<Vec<(f64, f64)>> = map_chunks(&run, None, |mut chunk| {
        Ok((0..chunk.len)
            .map(|_| {
                let g = sample_endpoint(&plane, &mu, n, &mut chunk.rng);
                (g.norm_displacement(), 2.0 * g.spectral_log())
            })
            .collect())
    })
    .map_err(|e| e.to_string())?;
    let (norms, specs): (Vec<f64>, Vec<f64>) = pairs.into_iter().flatten().unzip();
    let mean = norms.iter().sum::<f64>() / (norms.len() as f64 * n as f64);
    let gap = norms.iter().zip(&specs).map(|(x, y)| x - y).sum::<f64>() / norms.len() as f64;
    let offsets = [-0.06, -0.03, 0.03, 0.06, 0.09];
    let mut compared = 0;
    for off in offsets {
        let a = mean + off;
        let side = if off < 0.0 { Side::Below } else { Side::Above };
        let x = rate_row_from_samples(&norms, n, side, &[a]).map_err(|e| e.to_string())?.cells[0].clone();
        let y = rate_row_from_samples(&specs, n, side, &[a]).map_err(|e| e.to_string())?.cells[0].clone();
        if x.censored && y.censored {
            continue;
        }
        compared += 1;
        ensure(
            x.rate_lo <= y.rate_hi && y.rate_lo <= x.rate_hi,
            format!(
                "alpha {a:.4}: norm rate [{:.5}, {:.5}] vs spectral rate [{:.5}, {:.5}]; mean per-sample gap {gap:.3} (shift {:.4} in alpha)",
                x.rate_lo,
                x.rate_hi,
                y.rate_lo,
                y.rate_hi,
                gap / n as f64
            ),
        )?;
    }
    Ok(format!(
        "norm {worst_norm:.1e}, tau {worst_tau:.1e}, stable {worst_stable:.1e}; {compared}/5 rate cells overlap around drift {mean:.4}"
    ))
}

fn tail_probes() -> Outcome {
    let g = f2();
    let mu = uniform_generators(&g);
    let ns = [10, 20, 30, 40, 50, 60];
    let mut fits = Vec::new();
    for (label, x, seed) in [("walk-away e", Word::identity(), 1u64), ("walk-away a^50", Word::generator_power(0, 50), 2)] {
        let rep = walking_away_probe(&g, &mu, &WalkRun::new(60, 200_000, seed).unwrap(), &x, 0.25, &ns, None)
            .map_err(|e| e.to_string())?;
        fits.push((label.to_string(), rep.fit));
    }
    let r_grid = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let mid = gromov_deviation_probe(
        &g,
        &mu,
        &WalkRun::new(200, 100_000, 3).unwrap(),
        &GromovMode::Intermediate { i: 100 },
        &r_grid,
        None,
    )
    .map_err(|e| e.to_string())?;
    fits.push(("gromov i=100".into(), mid.fit));
    let mut means = Vec::new();
    let far = [Word::generator_power(0, 500), Word::generator_power(1, -500), w("ab").pow(250), w("aB").pow(250)];
    for (i, x) in far.into_iter().enumerate() {
        let label = format!("punctual x{i}");
        let rep = gromov_deviation_probe(
            &g,
            &mu,
            &WalkRun::new(400, 20_000, 10 + i as u64).unwrap(),
            &GromovMode::Punctual { x },
            &r_grid,
            None,
        )
        .map_err(|e| e.to_string())?;
        let mean = rep.mean_statistic.ok_or("no mean statistic")?;
        ensure(mean < 0.05, format!("{label}: mean {mean}"))?;
        means.push(mean);
        fits.push((label, rep.fit));
    }
    let mut worst_r2 = f64::INFINITY;
    for (label, fit) in &fits {
        let fit = fit.as_ref().ok_or(format!("{label}: no estimable range"))?;
        ensure(fit.slope < 0.0, format!("{label}: slope {}", fit.slope))?;
        ensure(fit.r_squared >= 0.9, format!("{label}: R^2 {}", fit.r_squared))?;
        worst_r2 = worst_r2.min(fit.r_squared);
    }
    let worst_mean = means.iter().cloned().fold(0.0, f64::max);
    Ok(format!("{} fits negative, min R^2 {worst_r2:.3}; punctual mean <= {worst_mean:.4}", fits.len()))
}

fn harmonic_measure() -> Outcome {
    let samples = 1_000_000;
    let (runs, fit) = harmonic_decay(2, 5, &HarmonicOptions::new(samples, 0x4a)).map_err(|e| e.to_string())?;
    let mut worst_z = 0.0f64;
    for run in &runs {
        let p = cylinder_measure(2, run.depth);
        let sigma = (p * (1.0 - p) / samples as f64).sqrt();
        for c in &run.cylinders {
            worst_z = worst_z.max((c.estimate - p).abs() / sigma);
        }
    }
    let cells: usize = runs.iter().map(|r| r.cylinders.len()).sum();
    ensure(worst_z <= 3.0, format!("worst deviation {worst_z:.2} sigma over {cells} cylinders"))?;
    ensure((1.0..=1.2).contains(&fit.d), format!("D = {}", fit.d))?;
    Ok(format!("worst deviation {worst_z:.2} sigma; D = {:.4}", fit.d))
}

fn degenerate_ldp() -> Outcome {
    let g = f2();
    let mu = FiniteMeasure::point_mass(w("a"));
    let alphas = grid(0.0, 2.0, 0.05);
    let ns = [1, 10, 50];
    let above = rate_curve_enum(&g, &mu, Side::Above, &alphas, &ns).map_err(|e| e.to_string())?;
    let below = rate_curve_enum(&g, &mu, Side::Below, &alphas, &ns).map_err(|e| e.to_string())?;
    let rf = assemble_rate(&above, &below, 1.0).map_err(|e| e.to_string())?;
    for (a, v) in rf.alphas.iter().zip(&rf.values) {
        let want = if (a - 1.0).abs() < 1e-12 { 0.0 } else { f64::INFINITY };
        ensure(*v == want, format!("alpha {a}: {v}"))?;
    }
    Ok(format!("{} cells: 0 at 1, infinite elsewhere", rf.alphas.len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 16] = [
        ("oracle equivalence", oracle_equivalence),
        ("drift", drift_check),
        ("Kesten radius", kesten_radius),
        ("rate-function curve", rate_function_curve),
        ("translation-length LDP", translation_length_ldp),
        ("sandwich inequalities", sandwich_lemmas),
        ("subadditivity", subadditivity),
        ("Schottky pipeline", schottky_pipeline),
        ("boost deficit", boost_deficit),
        ("moving tau", moving_tau),
        ("joint spectrum", joint_spectrum_check),
        ("Legendre duality", legendre_duality),
        ("SL2 dictionary", sl2_dictionary),
        ("tail probes", tail_probes),
        ("harmonic measure", harmonic_measure),
        ("degenerate LDP", degenerate_ldp),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{took:.2?}]", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name}: {detail} [{took:.2?}]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
