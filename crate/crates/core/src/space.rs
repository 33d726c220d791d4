//! Pointed metric spaces with an isometric group action, and the hyperbolic
//! geometry primitives derived from them.
//!
//! A backend only supplies `compose`, `invert`, `act` and `dist` (plus a
//! translation length, which every backend knows how to compute in closed
//! form). Gromov products, shadows, stable lengths and four-point probes are
//! generic over [`PointedAction`].

use serde::Serialize;

use crate::error::{invalid, Result};

/// A length in the space's natural unit. Always finite and nonnegative for
/// values returned by [`PointedAction::dist`].
pub type Length = f64;

/// A group acting by isometries on a metric space with a marked basepoint.
pub trait PointedAction: Sync {
    type Element: Clone + Send + Sync;
    type Point: Clone + Send + Sync;

    /// Absolute tolerance for identities that hold exactly in theory.
    const TOLERANCE: f64;

    fn identity(&self) -> Self::Element;
    fn basepoint(&self) -> Self::Point;
    fn compose(&self, g: &Self::Element, h: &Self::Element) -> Self::Element;
    fn invert(&self, g: &Self::Element) -> Self::Element;
    fn act(&self, g: &Self::Element, p: &Self::Point) -> Result<Self::Point>;
    fn dist(&self, p: &Self::Point, q: &Self::Point) -> Length;

    /// `τ(g) = inf_x d(x, g·x)`, in closed form for the backend.
    fn translation_length(&self, g: &Self::Element) -> Length;

    /// `g ← g·h`, in place where the backend can do better than
    /// [`compose`](Self::compose).
    fn right_multiply(&self, g: &mut Self::Element, h: &Self::Element) {
        *g = self.compose(g, h);
    }

    /// `d(z0, g·z0)`.
    fn displacement(&self, g: &Self::Element) -> Result<Length> {
        let z0 = self.basepoint();
        let gz = self.act(g, &z0)?;
        Ok(self.dist(&z0, &gz))
    }

    /// `g^n` by repeated squaring.
    fn power(&self, g: &Self::Element, n: u64) -> Result<Self::Element> {
        let mut result = self.identity();
        let mut base = g.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = self.compose(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.compose(&base, &base);
            }
        }
        Ok(result)
    }

    /// The orbit point `g·z0`.
    fn orbit(&self, g: &Self::Element) -> Result<Self::Point> {
        self.act(g, &self.basepoint())
    }
}

/// `(x, y)_base = ½ (d(x, base) + d(y, base) − d(x, y))`.
pub fn gromov_product<A: PointedAction>(
    space: &A,
    x: &A::Point,
    y: &A::Point,
    base: &A::Point,
) -> Length {
    let dxb = space.dist(x, base);
    let dyb = space.dist(y, base);
    let dxy = space.dist(x, y);
    let raw = 0.5 * ((dxb + dyb) - dxy);
    raw.clamp(0.0, dxb.min(dyb))
}

/// `d(z0, g·z0)`.
pub fn displacement<A: PointedAction>(space: &A, g: &A::Element) -> Result<Length> {
    space.displacement(g)
}

/// Fekete bracket for the stable length `ℓ(g) = lim d(gⁿ·z0, z0)/n`.
///
/// `inf_term` is `min_{n ≤ n_max} d(gⁿ·z0, z0)/n`, which is the limit's
/// best upper estimate by subadditivity; `last_term` is the value at the
/// largest power evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StableLength {
    pub inf_term: Length,
    pub last_term: Length,
    pub n_max: u64,
}

impl StableLength {
    /// Width of the bracket.
    pub fn spread(&self) -> Length {
        (self.last_term - self.inf_term).abs()
    }
}

/// Stable length bracket over the powers `1..=n_max`.
pub fn stable_length<A: PointedAction>(
    space: &A,
    g: &A::Element,
    n_max: u64,
) -> Result<StableLength> {
    if n_max < 4 {
        return Err(invalid(format!("stable_length needs n_max >= 4, got {n_max}")));
    }
    let mut power = space.identity();
    let mut inf_term = f64::INFINITY;
    let mut last_term = f64::NAN;
    for n in 1..=n_max {
        power = space.compose(&power, g);
        let value = space.displacement(&power)? / n as f64;
        inf_term = inf_term.min(value);
        last_term = value;
    }
    Ok(StableLength {
        inf_term,
        last_term,
        n_max,
    })
}

/// Stable length bracket along the dyadic powers `g^{2^k}`, `k ≤ squarings`.
///
/// Converges geometrically faster than [`stable_length`] when the orbit has
/// a large additive offset (`d(gⁿ·z0, z0) = nℓ + O(1)`), and is the
/// practical route on backends with a log-scale representation.
pub fn stable_length_dyadic<A: PointedAction>(
    space: &A,
    g: &A::Element,
    squarings: u32,
) -> Result<StableLength> {
    if squarings < 2 || squarings > 1000 {
        return Err(invalid(format!("squarings must lie in [2, 1000], got {squarings}")));
    }
    let mut power = g.clone();
    let mut inf_term = space.displacement(&power)?;
    let mut last_term = inf_term;
    let mut n = 1.0f64;
    for _ in 0..squarings {
        power = space.compose(&power, &power);
        n *= 2.0;
        let value = space.displacement(&power)? / n;
        inf_term = inf_term.min(value);
        last_term = value;
    }
    Ok(StableLength {
        inf_term,
        last_term,
        n_max: 1u64.checked_shl(squarings).unwrap_or(u64::MAX),
    })
}

/// Empirical lower bound on the four-point hyperbolicity constant δ.
///
/// For each sampled quadruple `(x0, x1, x2, x3)` evaluates
/// `min{(x3,x1)_{x0}, (x3,x2)_{x0}} − (x1,x2)_{x0}` and returns the maximum,
/// clamped at zero. This never certifies δ; it only reports what was seen.
pub fn four_point_delta<A, F>(space: &A, mut sampler: F, trials: usize) -> Result<Length>
where
    A: PointedAction,
    F: FnMut() -> [A::Point; 4],
{
    if trials == 0 {
        return Err(invalid("four_point_delta needs at least one trial"));
    }
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let [x0, x1, x2, x3] = sampler();
        let p31 = gromov_product(space, &x3, &x1, &x0);
        let p32 = gromov_product(space, &x3, &x2, &x0);
        let p12 = gromov_product(space, &x1, &x2, &x0);
        worst = worst.max(p31.min(p32) - p12);
    }
    Ok(worst.max(0.0))
}

/// Membership in the `c`-shadow of `center` seen from `light`:
/// `(center, z)_light ≥ d(light, center) − c`.
pub fn shadow_contains<A: PointedAction>(
    space: &A,
    light: &A::Point,
    center: &A::Point,
    c: Length,
    z: &A::Point,
) -> bool {
    let reach = space.dist(light, center);
    gromov_product(space, center, z, light) >= reach - c - A::TOLERANCE
}
