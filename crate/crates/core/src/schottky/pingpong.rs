use serde::Serialize;

use super::certificate::SchottkyCertificate;
use crate::error::{invalid, Error, Result};
use crate::space::{gromov_product, shadow_contains, PointedAction};

/// Translation lengths below this are treated as non-loxodromic.
pub const LOXODROMIC_THRESHOLD: f64 = 1e-6;

/// Number of letters in each positive word of the constructed set.
pub const WORD_LENGTH: u32 = 7;

/// Search settings for [`construct_pingpong`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PingPongOptions {
    /// Shadow constant `K1`.
    pub k1: f64,
    /// Largest power `n` tried (the search doubles from 1).
    pub n_cap: u64,
    /// Length of the words in `γ1^{±1}, γ2^{±1}` whose orbit points serve as
    /// test points for the shadow conditions.
    pub probe_word_length: usize,
}

impl Default for PingPongOptions {
    fn default() -> Self {
        PingPongOptions {
            k1: 1.0,
            n_cap: 64,
            probe_word_length: 4,
        }
    }
}

/// Outcome of one numeric shadow condition at a given `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowCheck {
    pub name: String,
    pub holds: bool,
    /// Number of test points the condition was evaluated on.
    pub points: usize,
    pub detail: String,
}

/// Diagnostics for one value of `n` in the doubling search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PingPongAttempt {
    pub n: u64,
    pub checks: Vec<ShadowCheck>,
    pub certified: Option<bool>,
}

/// The constructed set with its labels, the power `n` that worked and the
/// certificate.
#[derive(Clone, Debug)]
pub struct PingPong<E> {
    pub elements: Vec<E>,
    /// Each element as a word in `1 = γ1^{2n}`, `2 = γ2^{2n}`.
    pub labels: Vec<String>,
    pub n: u64,
    pub certificate: SchottkyCertificate,
    pub attempts: Vec<PingPongAttempt>,
}

struct Shadows<'a, A: PointedAction> {
    space: &'a A,
    x0: A::Point,
    k1: f64,
    centers: [[A::Point; 2]; 2],
}

impl<A: PointedAction> Shadows<'_, A> {
    /// `x ∈ O_{K1}(x0, γ_i^{±n}·x0)`; `sign` 0 is `+`, 1 is `−`.
    fn contains(&self, i: usize, sign: usize, x: &A::Point) -> bool {
        shadow_contains(self.space, &self.x0, &self.centers[i][sign], self.k1, x)
    }
}

/// Orbit points of all reduced words of length `≤ len` in `γ1^{±1}, γ2^{±1}`
/// (reduced over the formal alphabet), plus the axis points `γ_i^{±k}·x0`.
fn probe_points<A: PointedAction>(
    space: &A,
    gens: [&A::Element; 2],
    len: usize,
    axis_max: u64,
) -> Result<Vec<A::Point>> {
    let letters: Vec<A::Element> = vec![
        gens[0].clone(),
        space.invert(gens[0]),
        gens[1].clone(),
        space.invert(gens[1]),
    ];
    let mut frontier: Vec<(Option<usize>, A::Element)> = vec![(None, space.identity())];
    let mut points = vec![space.basepoint()];
    for _ in 0..len {
        let mut next = Vec::new();
        for (last, g) in &frontier {
            for (code, l) in letters.iter().enumerate() {
                if Some(code ^ 1) == *last {
                    continue;
                }
                let h = space.compose(g, l);
                points.push(space.orbit(&h)?);
                next.push((Some(code), h));
            }
        }
        frontier = next;
    }
    for l in &letters {
        for k in 1..=axis_max {
            points.push(space.orbit(&space.power(l, k)?)?);
        }
    }
    Ok(points)
}

fn check(name: &str, holds: bool, points: usize, detail: String) -> ShadowCheck {
    ShadowCheck {
        name: name.to_string(),
        holds,
        points,
        detail,
    }
}

/// Evaluates the shadow-position conditions and the loxodromic-power
/// inclusion at power `n` on a finite set of test points.
pub fn shadow_conditions<A: PointedAction>(
    space: &A,
    g1: &A::Element,
    g2: &A::Element,
    n: u64,
    options: &PingPongOptions,
) -> Result<Vec<ShadowCheck>> {
    let gens = [g1, g2];
    let mut powers = Vec::with_capacity(2);
    for g in gens {
        let plus = space.power(g, n)?;
        let minus = space.invert(&plus);
        powers.push([plus, minus]);
    }
    let x0 = space.basepoint();
    let centers = [
        [space.orbit(&powers[0][0])?, space.orbit(&powers[0][1])?],
        [space.orbit(&powers[1][0])?, space.orbit(&powers[1][1])?],
    ];
    let shadows = Shadows {
        space,
        x0: x0.clone(),
        k1: options.k1,
        centers,
    };
    let points = probe_points(space, gens, options.probe_word_length, 3 * n)?;
    let total = points.len();
    let mut checks = Vec::new();

    for (sign, label) in [(0, "+n"), (1, "-n")] {
        let in1: Vec<&A::Point> = points.iter().filter(|x| shadows.contains(0, sign, x)).collect();
        let in2: Vec<&A::Point> = points.iter().filter(|x| shadows.contains(1, sign, x)).collect();
        let overlap = in1.iter().filter(|x| shadows.contains(1, sign, x)).count();
        checks.push(check(
            &format!("disjoint shadows ({label})"),
            overlap == 0 && !in1.is_empty() && !in2.is_empty(),
            total,
            format!("{} / {} points in the two shadows, {overlap} in both", in1.len(), in2.len()),
        ));
        let mut sup = 0.0f64;
        for x in &in1 {
            for y in &in2 {
                sup = sup.max(gromov_product(space, x, y, &x0));
            }
        }
        let limit = space.dist(&x0, &shadows.centers[0][sign])
            .min(space.dist(&x0, &shadows.centers[1][sign]));
        checks.push(check(
            &format!("bounded cross products ({label})"),
            sup.is_finite() && sup < limit - options.k1,
            in1.len() * in2.len(),
            format!("sup (x,y)_x0 = {sup:.6} against shadow depth {limit:.6}"),
        ));
    }

    for (i, g) in gens.iter().enumerate() {
        let square = space.power(g, 2 * n)?;
        let mut tested = 0;
        let mut escaped = 0;
        for x in &points {
            if shadows.contains(i, 1, x) {
                continue;
            }
            tested += 1;
            if !shadows.contains(i, 0, &space.act(&square, x)?) {
                escaped += 1;
            }
        }
        checks.push(check(
            &format!("loxodromic power inclusion (gamma{})", i + 1),
            escaped == 0,
            tested,
            format!("{escaped} of {tested} points outside the backward shadow land outside the forward one"),
        ));
    }

    let base_inside = (0..2).filter(|i| shadows.contains(*i, 1, &x0)).count();
    checks.push(check(
        "basepoint outside backward shadows",
        base_inside == 0,
        1,
        format!("basepoint inside {base_inside} backward shadows"),
    ));
    Ok(checks)
}

/// All `2^WORD_LENGTH` positive words in `h1 = γ1^{2n}`, `h2 = γ2^{2n}`,
/// in lexicographic order of their labels.
fn positive_words<A: PointedAction>(
    space: &A,
    h: [&A::Element; 2],
) -> (Vec<A::Element>, Vec<String>) {
    let count = 1usize << WORD_LENGTH;
    let mut elements = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for mask in 0..count {
        let mut g = space.identity();
        let mut label = String::with_capacity(WORD_LENGTH as usize);
        for bit in (0..WORD_LENGTH).rev() {
            let which = (mask >> bit) & 1;
            space.right_multiply(&mut g, h[which]);
            label.push(if which == 0 { '1' } else { '2' });
        }
        elements.push(g);
        labels.push(label);
    }
    (elements, labels)
}

/// Ping-pong construction from two loxodromic elements.
///
/// Doubles `n` from 1 until the shadow conditions hold on the test points
/// and `certify` accepts the set of positive words of length 7 in
/// `γ1^{2n}, γ2^{2n}`. `certify` receives the elements with their labels
/// and returns a certificate (or `None` if no constant was found).
pub fn construct_pingpong<A, F>(
    space: &A,
    g1: &A::Element,
    g2: &A::Element,
    options: &PingPongOptions,
    mut certify: F,
) -> Result<PingPong<A::Element>>
where
    A: PointedAction,
    F: FnMut(&[A::Element], &[String]) -> Result<Option<SchottkyCertificate>>,
{
    if options.n_cap == 0 || !(options.k1 >= 0.0) {
        return Err(invalid("ping-pong search needs n_cap >= 1 and k1 >= 0"));
    }
    for (i, g) in [g1, g2].into_iter().enumerate() {
        let tau = space.translation_length(g);
        if !(tau >= LOXODROMIC_THRESHOLD) {
            return Err(invalid(format!(
                "gamma{} is not loxodromic: translation length {tau:e}",
                i + 1
            )));
        }
    }
    let mut attempts = Vec::new();
    let mut n = 1u64;
    while n <= options.n_cap {
        let checks = shadow_conditions(space, g1, g2, n, options)?;
        let mut attempt = PingPongAttempt {
            n,
            checks,
            certified: None,
        };
        if attempt.checks.iter().all(|c| c.holds) {
            let h1 = space.power(g1, 2 * n)?;
            let h2 = space.power(g2, 2 * n)?;
            let (elements, labels) = positive_words(space, [&h1, &h2]);
            let cert = certify(&elements, &labels)?;
            attempt.certified = Some(cert.as_ref().is_some_and(|c| c.valid));
            attempts.push(attempt);
            if let Some(certificate) = cert.filter(|c| c.valid) {
                return Ok(PingPong {
                    elements,
                    labels,
                    n,
                    certificate,
                    attempts,
                });
            }
        } else {
            attempts.push(attempt);
        }
        n *= 2;
    }
    let last = attempts
        .last()
        .map(|a| {
            a.checks
                .iter()
                .filter(|c| !c.holds)
                .map(|c| c.name.clone())
                .collect::<Vec<_>>()
                .join(", ")
        })
        .unwrap_or_default();
    Err(Error::Construction(format!(
        "no n <= {} passed the ping-pong conditions (last failures: {last}); the elements may generate an elementary group",
        options.n_cap
    )))
}
