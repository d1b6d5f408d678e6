//! The four domains and the polynomial maps between them.
//!
//! * `Omega`: `{(u, v) : 1 + u + v ≥ 0, 1 - u + v ≥ 0, u² ≥ 4v}`, the image of
//!   the square under `(x, y) ↦ (x + y, xy)`.
//! * `OmegaStar`: `{(s, t) : s, t ≥ 0, √s + √t ≤ 1}`.
//! * `Rhombus`: `{(u, v) : |u + v| ≤ 1, |u - v| ≤ 1}`.
//! * `Square`: `[-1, 1]²`.
//!
//! Maps are total on ℝ²; membership is checked separately.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary slack used by the membership predicates.
pub const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    Omega,
    OmegaStar,
    Rhombus,
    Square,
}

impl DomainTag {
    pub fn name(&self) -> &'static str {
        match self {
            DomainTag::Omega => "omega",
            DomainTag::OmegaStar => "omega_star",
            DomainTag::Rhombus => "rhombus",
            DomainTag::Square => "square",
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        match self {
            DomainTag::Omega => in_omega(p),
            DomainTag::OmegaStar => in_omega_star(p),
            DomainTag::Rhombus => in_rhombus(p),
            DomainTag::Square => in_square(p),
        }
    }
}

impl std::fmt::Display for DomainTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DomainTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega" => Ok(DomainTag::Omega),
            "star" | "omega_star" => Ok(DomainTag::OmegaStar),
            "rhombus" => Ok(DomainTag::Rhombus),
            "square" => Ok(DomainTag::Square),
            other => Err(Error::Input(format!("unknown domain '{other}'"))),
        }
    }
}

/// A point of the plane; which coordinates it carries depends on the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub a: f64,
    pub b: f64,
}

impl Point2 {
    pub const fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((a, b): (f64, f64)) -> Self {
        Self { a, b }
    }
}

/// `(x, y) ↦ (x + y, xy)`, square onto Ω.
pub fn sym_map(x: f64, y: f64) -> Point2 {
    Point2::new(x + y, x * y)
}

/// `(x, y) ↦ (2xy, x² + y² - 1)`, square onto Ω, constant on the orbits
/// `{(x,y), (y,x), (-x,-y), (-y,-x)}`.
pub fn quad_map(x: f64, y: f64) -> Point2 {
    Point2::new(2.0 * x * y, x * x + y * y - 1.0)
}

/// Affine map from Ω to Ω*, the inverse of `(s, t) ↦ (2(s - t), 2s + 2t - 1)`.
pub fn affine_to_star(u: f64, v: f64) -> Result<Point2> {
    let p = Point2::new(u, v);
    if !in_omega(p) {
        return Err(Error::Domain(format!("({u}, {v}) lies outside Omega")));
    }
    Ok(affine_to_star_unchecked(u, v))
}

pub(crate) fn affine_to_star_unchecked(u: f64, v: f64) -> Point2 {
    Point2::new((1.0 + u + v) / 4.0, (1.0 - u + v) / 4.0)
}

/// `(s, t) ↦ (2(s - t), 2s + 2t - 1)`, Ω* onto Ω.
pub fn star_to_omega(s: f64, t: f64) -> Point2 {
    Point2::new(2.0 * (s - t), 2.0 * s + 2.0 * t - 1.0)
}

/// `(u, v) ↦ (u², v²)`, rhombus onto Ω*, four-to-one off the axes.
pub fn unsquare_map(u: f64, v: f64) -> Point2 {
    Point2::new(u * u, v * v)
}

/// `(u, v) ↦ (u + v, u - v)`, rhombus onto square.
pub fn rotate_to_square(u: f64, v: f64) -> Point2 {
    Point2::new(u + v, u - v)
}

/// `(x, y) ↦ ((x + y)/2, (x - y)/2)`, square onto rhombus.
pub fn square_to_rhombus(x: f64, y: f64) -> Point2 {
    Point2::new((x + y) / 2.0, (x - y) / 2.0)
}

/// Recovers `x ≥ y` with `x + y = u`, `xy = v`. Inside Ω the discriminant is
/// non-negative; small negative values within slack are clamped to zero.
pub fn omega_roots(u: f64, v: f64) -> Result<(f64, f64)> {
    let disc = u * u - 4.0 * v;
    if disc < -DOMAIN_SLACK * (1.0 + u * u + 4.0 * v.abs()) {
        return Err(Error::Domain(format!(
            "({u}, {v}) lies beyond the parabola u^2 = 4v"
        )));
    }
    let r = disc.max(0.0).sqrt();
    // Stable quadratic roots: avoid cancellation in u ∓ r.
    if r == 0.0 {
        return Ok((u / 2.0, u / 2.0));
    }
    let q = 0.5 * (u + u.signum() * r);
    if q == 0.0 {
        return Ok((r / 2.0, -r / 2.0));
    }
    let (r1, r2) = (q, v / q);
    Ok(if r1 >= r2 { (r1, r2) } else { (r2, r1) })
}

/// Half-angle arguments `(cos(θ - φ), cos(θ + φ))` of `(x, y) = (cos θ, cos φ)`,
/// computed as `xy ± √((1 - x²)(1 - y²))`. Inputs are clamped to `[-1, 1]`.
pub fn half_angle_args(x: f64, y: f64) -> (f64, f64) {
    let x = x.clamp(-1.0, 1.0);
    let y = y.clamp(-1.0, 1.0);
    let r = ((1.0 - x * x) * (1.0 - y * y)).max(0.0).sqrt();
    let p = x * y;
    ((p + r).clamp(-1.0, 1.0), (p - r).clamp(-1.0, 1.0))
}

pub fn in_square(p: Point2) -> bool {
    p.a.abs() <= 1.0 + DOMAIN_SLACK && p.b.abs() <= 1.0 + DOMAIN_SLACK
}

pub fn in_rhombus(p: Point2) -> bool {
    (p.a + p.b).abs() <= 1.0 + DOMAIN_SLACK && (p.a - p.b).abs() <= 1.0 + DOMAIN_SLACK
}

/// Ω membership. The three boundary inequalities also admit the unbounded
/// region `u² ≥ 4v` beyond `|u| = 2`, so `|u| ≤ 2` is checked as well.
pub fn in_omega(p: Point2) -> bool {
    let (u, v) = (p.a, p.b);
    let s = DOMAIN_SLACK * (1.0 + u.abs() + v.abs());
    1.0 + u + v >= -s
        && 1.0 - u + v >= -s
        && u * u - 4.0 * v >= -s * (1.0 + u.abs())
        && u.abs() <= 2.0 + s
}

pub fn in_omega_star(p: Point2) -> bool {
    let (s, t) = (p.a, p.b);
    s >= -DOMAIN_SLACK
        && t >= -DOMAIN_SLACK
        && s.max(0.0).sqrt() + t.max(0.0).sqrt() <= 1.0 + DOMAIN_SLACK
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sym_map_examples() {
        assert_eq!(sym_map(1.0, -1.0), Point2::new(0.0, -1.0));
        let p = sym_map(0.3, 0.3);
        assert_abs_diff_eq!(p.a * p.a, 4.0 * p.b, epsilon = 1e-15);
    }

    #[test]
    fn quad_map_examples() {
        assert_eq!(quad_map(1.0, 0.0), Point2::new(0.0, 0.0));
        let a = quad_map(0.9, 0.3);
        let b = quad_map(-0.3, -0.9);
        assert_abs_diff_eq!(a.a, b.a, epsilon = 1e-15);
        assert_abs_diff_eq!(a.b, b.b, epsilon = 1e-15);
        let (t, f) = (0.7f64, 2.1f64);
        let q = quad_map(t.cos(), f.cos());
        assert_abs_diff_eq!(q.a, (t - f).cos() + (t + f).cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(q.b, (t - f).cos() * (t + f).cos(), epsilon = 1e-15);
    }

    #[test]
    fn star_examples() {
        let p = affine_to_star(0.0, -1.0).unwrap();
        assert_abs_diff_eq!(p.a, 0.0);
        assert_abs_diff_eq!(p.b, 0.0);
        let p = affine_to_star(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.a, 1.0);
        assert_abs_diff_eq!(p.b, 0.0);
        assert!(affine_to_star(0.0, 1.0).is_err());
        assert!(affine_to_star(3.0, 2.25).is_err());
    }

    #[test]
    fn maps_land_in_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let x: f64 = rng.random_range(-1.0..=1.0);
            let y: f64 = rng.random_range(-1.0..=1.0);
            let w = sym_map(x, y);
            assert!(in_omega(w));
            assert!(in_omega(quad_map(x, y)));
            let s = affine_to_star(w.a, w.b).unwrap();
            assert!(in_omega_star(s));
            let back = star_to_omega(s.a, s.b);
            assert_abs_diff_eq!(back.a, w.a, epsilon = 1e-14);
            assert_abs_diff_eq!(back.b, w.b, epsilon = 1e-14);
            // consistent with s = (1+x)(1+y)/4, t = (1-x)(1-y)/4
            assert_abs_diff_eq!(s.a, (1.0 + x) * (1.0 + y) / 4.0, epsilon = 1e-15);
            assert_abs_diff_eq!(s.b, (1.0 - x) * (1.0 - y) / 4.0, epsilon = 1e-15);
            let r = square_to_rhombus(x, y);
            assert!(in_rhombus(r));
            assert!(in_omega_star(unsquare_map(r.a, r.b)));
            let q = rotate_to_square(r.a, r.b);
            assert_abs_diff_eq!(q.a, x, epsilon = 1e-15);
            assert_abs_diff_eq!(q.b, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn roots_recover_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x: f64 = rng.random_range(-1.0..=1.0);
            let y: f64 = rng.random_range(-1.0..=1.0);
            let p = sym_map(x, y);
            let (r1, r2) = omega_roots(p.a, p.b).unwrap();
            assert_abs_diff_eq!(r1, x.max(y), epsilon = 1e-7);
            assert_abs_diff_eq!(r2, x.min(y), epsilon = 1e-7);
        }
        assert!(omega_roots(0.0, 0.5).is_err());
    }

    #[test]
    fn unsquare_examples() {
        assert_eq!(unsquare_map(0.5, 0.5), Point2::new(0.25, 0.25));
        assert_eq!(unsquare_map(-0.5, 0.5), unsquare_map(0.5, -0.5));
        assert_eq!(unsquare_map(0.0, 0.0), Point2::new(0.0, 0.0));
    }

    #[test]
    fn unsquare_jacobian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 1e-6;
        for _ in 0..100 {
            let u: f64 = rng.random_range(-0.5..0.5);
            let v: f64 = rng.random_range(-0.5..0.5);
            let du = |f: fn(Point2) -> f64| {
                (f(unsquare_map(u + h, v)) - f(unsquare_map(u - h, v))) / (2.0 * h)
            };
            let dv = |f: fn(Point2) -> f64| {
                (f(unsquare_map(u, v + h)) - f(unsquare_map(u, v - h))) / (2.0 * h)
            };
            let det = du(|p| p.a) * dv(|p| p.b) - dv(|p| p.a) * du(|p| p.b);
            let expected = 4.0 * (u * v).abs();
            assert!((det.abs() - expected).abs() <= 1e-6 * expected.max(1e-3));
        }
    }

    #[test]
    fn rotate_examples() {
        assert_eq!(rotate_to_square(1.0, 0.0), Point2::new(1.0, 1.0));
        assert_eq!(rotate_to_square(0.0, 0.0), Point2::new(0.0, 0.0));
    }

    #[test]
    fn half_angles_at_boundary() {
        let (a, b) = half_angle_args(1.0, 0.3);
        assert_eq!((a, b), (0.3, 0.3));
        let (a, b) = half_angle_args(0.0, 0.0);
        assert_eq!((a, b), (1.0, -1.0));
    }

    #[test]
    fn domain_tag_parse() {
        assert_eq!("star".parse::<DomainTag>().unwrap(), DomainTag::OmegaStar);
        assert!("disk".parse::<DomainTag>().is_err());
    }
}
