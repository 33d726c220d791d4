//! `SL(2, ℝ)` acting on the Poincaré disc (curvature −1).
//!
//! A [`MobiusElement`] stores bounded entries and a separate log-scale, so
//! products of millions of matrices never overflow. Displacements, traces and
//! spectral radii are computed in closed form from the stored entries.
//!
//! The disc action uses the Cayley conjugation of the upper half-plane
//! action: the real matrix `(a, b; c, d)` becomes `z ↦ (αz + β)/(β̄z + ᾱ)`
//! with `α = ((a+d) + i(b−c))/2` and `β = ((a−d) − i(b+c))/2`.
//!
//! Orbit points of the walk are carried as group elements
//! ([`PlanePoint`]), not as disc coordinates: a disc coordinate at distance
//! `r` from the centre sits within `e^{−r}` of the unit circle and cannot be
//! stored in double precision once `r` exceeds about 30.

use std::cmp::Ordering;
use std::str::FromStr;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use crate::space::{Length, PointedAction};

/// Above this log-scale the closed forms switch to their logarithmic
/// asymptotics instead of exponentiating.
const LARGE_SCALE: f64 = 20.0;

/// Distance from the unit circle below which a disc point is rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-13;

/// `e^{log_scale}·(a, b; c, d)` with `max(|a|,|b|,|c|,|d|) = 1` and true
/// determinant one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MobiusElement<T> {
    a: T,
    b: T,
    c: T,
    d: T,
    log_scale: T,
}

impl<T: Real> MobiusElement<T> {
    pub fn identity() -> Self {
        MobiusElement {
            a: T::one(),
            b: T::zero(),
            c: T::zero(),
            d: T::one(),
            log_scale: T::zero(),
        }
    }

    /// From a real matrix with positive determinant; the matrix is rescaled
    /// to determinant one.
    pub fn from_entries(a: T, b: T, c: T, d: T) -> Result<Self> {
        if ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        let m = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
        if m == T::zero() {
            return Err(invalid("zero matrix"));
        }
        let (a, b, c, d) = (a / m, b / m, c / m, d / m);
        let det = a * d - b * c;
        if !(det > T::zero()) {
            return Err(invalid(format!(
                "matrix must have positive determinant, got {:?}",
                det * m * m
            )));
        }
        Ok(MobiusElement {
            a,
            b,
            c,
            d,
            log_scale: -det.ln() / T::lit(2.0),
        })
    }

    /// `diag(e^s, e^{−s})`, translating by `2s` along the real axis.
    pub fn hyperbolic(s: T) -> Self {
        let t = (-T::lit(2.0) * s.abs()).exp();
        let (a, d) = if s >= T::zero() { (T::one(), t) } else { (t, T::one()) };
        MobiusElement {
            a,
            b: T::zero(),
            c: T::zero(),
            d,
            log_scale: s.abs(),
        }
    }

    /// Rotation by `θ` in `SO(2)`; acts on the disc as rotation by `2θ`
    /// about the origin.
    pub fn rotation(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_entries(c, -s, s, c).expect("rotations are invertible")
    }

    /// The transvection along the geodesic from `0` through `p` carrying `0`
    /// to `p`.
    pub fn transvection_to(p: DiscPoint<T>) -> Self {
        let alpha = T::one() / (T::one() - p.norm_sqr()).sqrt();
        let (br, bi) = (p.re * alpha, p.im * alpha);
        Self::from_entries(alpha + br, -bi, -bi, alpha - br)
            .expect("transvections have determinant one")
    }

    /// Stored bounded entries `(a, b, c, d)`.
    pub fn entries(&self) -> [T; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn log_scale(&self) -> T {
        self.log_scale
    }

    /// The true matrix, which may overflow for large elements.
    pub fn to_matrix(&self) -> [T; 4] {
        let s = self.log_scale.exp();
        [self.a * s, self.b * s, self.c * s, self.d * s]
    }

    fn renormalized(a: T, b: T, c: T, d: T, log_scale: T) -> Self {
        let m = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
        MobiusElement {
            a: a / m,
            b: b / m,
            c: c / m,
            d: d / m,
            log_scale: log_scale + m.ln(),
        }
    }

    pub fn compose(&self, h: &Self) -> Self {
        let g = self;
        Self::renormalized(
            g.a * h.a + g.b * h.c,
            g.a * h.b + g.b * h.d,
            g.c * h.a + g.d * h.c,
            g.c * h.b + g.d * h.d,
            g.log_scale + h.log_scale,
        )
    }

    /// `e^{s}(d, −b; −c, a)`, exact since the true determinant is one.
    pub fn inverse(&self) -> Self {
        MobiusElement {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
            log_scale: self.log_scale,
        }
    }

    /// `(√X, √Y)` with `X = (a−d)² + (b+c)²`, `Y = (a+d)² + (b−c)²` on the
    /// stored entries: the singular values are `(√Y ± √X)/2`.
    fn sv_parts(&self) -> (T, T) {
        let x = (self.a - self.d).hypot(self.b + self.c);
        let y = (self.a + self.d).hypot(self.b - self.c);
        (x, y)
    }

    /// `d(0, g·0) = 2 ln ‖g‖` (operator norm of the true matrix).
    pub fn norm_displacement(&self) -> T {
        let (x, y) = self.sv_parts();
        if self.log_scale < T::lit(LARGE_SCALE) {
            // True √X equals 2 sinh(d/2).
            T::lit(2.0) * (self.log_scale.exp() * x / T::lit(2.0)).asinh()
        } else {
            T::lit(2.0) * (self.log_scale + ((x + y) / T::lit(2.0)).ln())
        }
    }

    /// Trace of the true matrix, saturating to ±∞ for large elements.
    pub fn trace(&self) -> T {
        (self.a + self.d) * self.log_scale.exp()
    }

    /// `2·arccosh(|tr|/2)` for hyperbolic elements, `None` otherwise.
    pub fn tau_trace(&self) -> Option<T> {
        let two = T::lit(2.0);
        let t = (self.a + self.d).abs();
        if self.log_scale < T::lit(LARGE_SCALE) {
            let tr = t * self.log_scale.exp();
            (tr > two).then(|| two * (tr / two).acosh())
        } else if t == T::zero() {
            None
        } else {
            Some(two * (self.log_scale + t.ln()))
        }
    }

    /// `ln ρ(g)`, the log of the largest eigenvalue modulus.
    pub fn spectral_log(&self) -> T {
        let t = (self.a + self.d).abs();
        let det = (-T::lit(2.0) * self.log_scale).exp();
        let disc = t * t - T::lit(4.0) * det;
        if disc <= T::zero() {
            // Complex or repeated eigenvalues of modulus √det.
            return T::zero();
        }
        self.log_scale + ((t + disc.sqrt()) / T::lit(2.0)).ln()
    }

    /// Möbius coefficients `(α, β)` of the disc action (up to scale).
    fn disc_coefficients(&self) -> (Complex<T>, Complex<T>) {
        let two = T::lit(2.0);
        let alpha = Complex::new((self.a + self.d) / two, (self.b - self.c) / two);
        let beta = Complex::new((self.a - self.d) / two, -(self.b + self.c) / two);
        (alpha, beta)
    }

    /// Canonical total order on the stored representation.
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        let key = |g: &Self| [g.log_scale, g.a, g.b, g.c, g.d];
        key(self)
            .iter()
            .zip(key(other).iter())
            .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    }

    /// Largest entrywise difference between true matrices, relative to scale.
    pub fn distance_to(&self, other: &Self) -> T {
        let p = self.to_matrix();
        let q = other.to_matrix();
        p.iter()
            .zip(q.iter())
            .map(|(x, y)| (*x - *y).abs())
            .fold(T::zero(), T::max)
    }
}

impl MobiusElement<f64> {
    /// Parse a matrix atom: four row-major entries separated by whitespace or
    /// commas, optionally followed by `@p` or a fifth number giving its
    /// probability.
    pub fn parse_atom(s: &str) -> Result<(Self, Option<f64>)> {
        let (body, prob_tail) = match s.split_once('@') {
            Some((b, p)) => (b, Some(p)),
            None => (s, None),
        };
        let nums: Vec<f64> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {t:?} in matrix atom {s:?}")))
            })
            .collect::<Result<_>>()?;
        let mut prob = match prob_tail {
            Some(p) => Some(
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad probability in matrix atom {s:?}")))?,
            ),
            None => None,
        };
        match (nums.len(), prob) {
            (4, _) => {}
            (5, None) => prob = Some(nums[4]),
            _ => {
                return Err(Error::Parse(format!(
                    "matrix atom {s:?} needs four entries and an optional probability"
                )))
            }
        }
        let g = Self::from_entries(nums[0], nums[1], nums[2], nums[3])?;
        Ok((g, prob))
    }
}

impl FromStr for MobiusElement<f64> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match Self::parse_atom(s)? {
            (g, None) => Ok(g),
            (_, Some(_)) => Err(Error::Parse(format!("unexpected probability in matrix {s:?}"))),
        }
    }
}

/// A point of the open unit disc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiscPoint<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> DiscPoint<T> {
    pub fn new(re: T, im: T) -> Result<Self> {
        let p = DiscPoint { re, im };
        let r = p.norm_sqr().sqrt();
        if !(r < T::one() - T::lit(BOUNDARY_MARGIN)) {
            return Err(Error::BoundaryBlowUp { radius: r.as_f64() });
        }
        Ok(p)
    }

    pub fn origin() -> Self {
        DiscPoint {
            re: T::zero(),
            im: T::zero(),
        }
    }

    pub fn norm_sqr(&self) -> T {
        self.re * self.re + self.im * self.im
    }
}

/// Apply `g` to a disc point; fails when the image is numerically on the
/// boundary circle.
pub fn mobius_act<T: Real>(g: &MobiusElement<T>, p: &DiscPoint<T>) -> Result<DiscPoint<T>> {
    let (alpha, beta) = g.disc_coefficients();
    let z = Complex::new(p.re, p.im);
    let w = (alpha * z + beta) / (beta.conj() * z + alpha.conj());
    DiscPoint::new(w.re, w.im)
}

/// `arccosh(1 + 2|p−q|²/((1−|p|²)(1−|q|²)))`, evaluated as
/// `2·asinh(|p−q|/√((1−|p|²)(1−|q|²)))`.
pub fn dist_disc<T: Real>(p: &DiscPoint<T>, q: &DiscPoint<T>) -> T {
    let diff = (p.re - q.re).hypot(p.im - q.im);
    let denom = ((T::one() - p.norm_sqr()) * (T::one() - q.norm_sqr())).sqrt();
    T::lit(2.0) * (diff / denom).asinh()
}

pub fn norm_displacement<T: Real>(g: &MobiusElement<T>) -> T {
    g.norm_displacement()
}

pub fn tau_trace<T: Real>(g: &MobiusElement<T>) -> Option<T> {
    g.tau_trace()
}

pub fn spectral_log<T: Real>(g: &MobiusElement<T>) -> T {
    g.spectral_log()
}

/// An orbit point `h·0`, represented by `h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlanePoint<T> {
    rep: MobiusElement<T>,
}

impl<T: Real> PlanePoint<T> {
    pub fn origin() -> Self {
        PlanePoint {
            rep: MobiusElement::identity(),
        }
    }

    pub fn from_disc(p: DiscPoint<T>) -> Self {
        PlanePoint {
            rep: MobiusElement::transvection_to(p),
        }
    }

    pub fn from_element(rep: MobiusElement<T>) -> Self {
        PlanePoint { rep }
    }

    pub fn representative(&self) -> &MobiusElement<T> {
        &self.rep
    }

    /// Disc coordinates; fails for points too far out to represent.
    pub fn to_disc(&self) -> Result<DiscPoint<T>> {
        mobius_act(&self.rep, &DiscPoint::origin())
    }

    /// Distance to the origin.
    pub fn radius(&self) -> T {
        self.rep.norm_displacement()
    }
}

/// The hyperbolic plane with `SL(2, ℝ)` acting, basepoint the disc centre.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HyperbolicPlane<T> {
    _scalar: std::marker::PhantomData<T>,
}

impl<T: Real> HyperbolicPlane<T> {
    pub fn new() -> Self {
        HyperbolicPlane {
            _scalar: std::marker::PhantomData,
        }
    }
}

impl<T: Real> PointedAction for HyperbolicPlane<T> {
    type Element = MobiusElement<T>;
    type Point = PlanePoint<T>;

    const TOLERANCE: f64 = 1e-9;

    fn identity(&self) -> Self::Element {
        MobiusElement::identity()
    }

    fn basepoint(&self) -> Self::Point {
        PlanePoint::origin()
    }

    fn compose(&self, g: &Self::Element, h: &Self::Element) -> Self::Element {
        g.compose(h)
    }

    fn invert(&self, g: &Self::Element) -> Self::Element {
        g.inverse()
    }

    fn act(&self, g: &Self::Element, p: &Self::Point) -> Result<Self::Point> {
        Ok(PlanePoint {
            rep: g.compose(&p.rep),
        })
    }

    fn dist(&self, p: &Self::Point, q: &Self::Point) -> Length {
        let (x, y) = match p.rep.canonical_cmp(&q.rep) {
            Ordering::Greater => (q, p),
            _ => (p, q),
        };
        x.rep.inverse().compose(&y.rep).norm_displacement().as_f64()
    }

    fn translation_length(&self, g: &Self::Element) -> Length {
        g.tau_trace().map_or(0.0, |t| t.as_f64())
    }

    fn displacement(&self, g: &Self::Element) -> Result<Length> {
        Ok(g.norm_displacement().as_f64())
    }
}
