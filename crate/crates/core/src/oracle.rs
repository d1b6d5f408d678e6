//! Reference integrals for every weight family.
//!
//! Everything reduces to a product Gauss–Jacobi rule in the variables
//! `(X, Y)` of `u = X + Y`, `v = XY`, using an order `M` much larger than any
//! rule under test:
//!
//! * Ω: `∫ f W = E[f(X+Y, XY)]` for `γ = -1/2` and
//!   `E[f(X+Y, XY) (X-Y)²] / (2σ²)` for `γ = +1/2`, with `X, Y` i.i.d. from
//!   the normalized Jacobi measure of variance `σ²`.
//! * Ω*: the same after the affine map.
//! * Square: the weight is invariant under `(x,y) ↦ (y,x)` and
//!   `(x,y) ↦ (-x,-y)`, so `f` may be replaced by its orbit average, which is
//!   a polynomial in `2xy` and `x² + y² - 1` and therefore an Ω integrand. At
//!   `X = cos φ₁`, `Y = cos φ₂` it is evaluated on the preimage
//!   `(cos((φ₁-φ₂)/2), cos((φ₁+φ₂)/2))`.
//! * Rhombus: rotation to the square.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Uniform};

use crate::cubature::{Gamma, KahanSum, WeightFamily, WeightSpec};
use crate::error::{Error, Result};
use crate::jacobi::{gauss_rule, QuadRule1D};

/// Default internal order.
pub const DEFAULT_ORDER: usize = 64;

#[derive(Debug, Clone)]
pub struct ReferenceIntegrator {
    weight: WeightSpec,
    rule: QuadRule1D,
    /// `cos(θ/2)` and `sin(θ/2)` of the internal nodes.
    half: Vec<(f64, f64)>,
}

impl ReferenceIntegrator {
    pub fn new(weight: WeightSpec, order: usize) -> Result<Self> {
        if order < 8 {
            return Err(Error::Input(format!(
                "oracle order must be at least 8, got {order}"
            )));
        }
        let rule = gauss_rule(weight.params, order)?;
        let half = rule
            .thetas
            .iter()
            .map(|t| ((t / 2.0).cos(), (t / 2.0).sin()))
            .collect();
        Ok(Self { weight, rule, half })
    }

    /// Order `max(64, 2D + 8)`, enough for polynomials of degree `D + 1`.
    pub fn for_degree(weight: WeightSpec, degree: usize) -> Result<Self> {
        Self::new(weight, DEFAULT_ORDER.max(2 * (degree + 1) + 8))
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn order(&self) -> usize {
        self.rule.n
    }

    /// Whether every polynomial of total degree `degree` is integrated
    /// exactly, i.e. `M ≥ 2 degree + 8`.
    pub fn certifies(&self, degree: usize) -> bool {
        self.rule.n >= 2 * degree + 8
    }

    /// `∫ f dμ` for the normalized weight on its own domain.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        match self.weight.family {
            WeightFamily::WOmega => self.omega_sum(|x, y, _, _| f(x + y, x * y)),
            WeightFamily::WStar => self.omega_sum(|x, y, _, _| {
                f((1.0 + x) * (1.0 + y) / 4.0, (1.0 - x) * (1.0 - y) / 4.0)
            }),
            WeightFamily::CwSquare => self.omega_sum(|_, _, hi, hj| orbit_average(&f, hi, hj)),
            WeightFamily::URhombus => self.omega_sum(|_, _, hi, hj| {
                orbit_average(&|x: f64, y: f64| f((x + y) / 2.0, (x - y) / 2.0), hi, hj)
            }),
        }
    }

    /// Product sum over the internal nodes, `g(X, Y, half-angles of X, of Y)`.
    fn omega_sum<G: Fn(f64, f64, (f64, f64), (f64, f64)) -> f64>(&self, g: G) -> f64 {
        let x = &self.rule.nodes;
        let w = &self.rule.weights;
        let plus = self.weight.gamma == Gamma::PlusHalf;
        let scale = if plus {
            0.5 / self.weight.params.variance()
        } else {
            1.0
        };
        let mut acc = KahanSum::default();
        for i in 0..x.len() {
            for j in 0..x.len() {
                let mut v = w[i] * w[j] * g(x[i], x[j], self.half[i], self.half[j]);
                if plus {
                    let d = x[i] - x[j];
                    v *= d * d;
                }
                acc.add(v);
            }
        }
        acc.value() * scale
    }
}

/// Orbit average of `f` at a preimage of `(X, Y) = (cos φ₁, cos φ₂)` given the
/// half-angle cosines and sines `(cos φ/2, sin φ/2)`.
fn orbit_average<F: Fn(f64, f64) -> f64>(f: &F, (c1, s1): (f64, f64), (c2, s2): (f64, f64)) -> f64 {
    let s = c1 * c2 + s1 * s2;
    let t = c1 * c2 - s1 * s2;
    0.25 * (f(s, t) + f(t, s) + f(-s, -t) + f(-t, -s))
}

/// `∫_Ω f W_{α,β,γ}` with the default order.
pub fn integrate_omega<F: Fn(f64, f64) -> f64>(f: F, weight: &WeightSpec) -> Result<f64> {
    if weight.family != WeightFamily::WOmega {
        return Err(Error::Capability(format!(
            "{:?} is not an Omega weight",
            weight.family
        )));
    }
    Ok(ReferenceIntegrator::new(*weight, DEFAULT_ORDER)?.integrate(f))
}

/// `∫_{[-1,1]²} f 𝒲_{α,β,γ}` with the default order.
pub fn integrate_square<F: Fn(f64, f64) -> f64>(f: F, weight: &WeightSpec) -> Result<f64> {
    if weight.family != WeightFamily::CwSquare {
        return Err(Error::Capability(format!(
            "{:?} is not a square weight",
            weight.family
        )));
    }
    Ok(ReferenceIntegrator::new(*weight, DEFAULT_ORDER)?.integrate(f))
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
}

impl McEstimate {
    /// Whether `value` lies within `k` standard errors.
    pub fn agrees(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr + 1e-14
    }
}

/// Loose independent check by sampling.
///
/// Ω and Ω*: `X, Y` are drawn from the one-variable Jacobi law
/// (`(1+X)/2 ~ Beta(β+1, α+1)`). Square and rhombus: points are drawn from
/// the product Chebyshev density and reweighted by the explicit weight; this
/// needs `2α+1 ≥ 0` and `2β+1 ≥ 0` to keep the ratio bounded.
pub fn montecarlo_check<F: Fn(f64, f64) -> f64>(
    f: F,
    weight: &WeightSpec,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples < 2 {
        return Err(Error::Input(
            "Monte Carlo needs at least two samples".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (weight.params.alpha(), weight.params.beta());
    let var = weight.params.variance();
    let plus = weight.gamma == Gamma::PlusHalf;
    let mut values = Vec::with_capacity(samples);
    match weight.family {
        WeightFamily::WOmega | WeightFamily::WStar => {
            let beta = Beta::new(b + 1.0, a + 1.0).map_err(|e| Error::Input(e.to_string()))?;
            for _ in 0..samples {
                let x = 2.0 * beta.sample(&mut rng) - 1.0;
                let y = 2.0 * beta.sample(&mut rng) - 1.0;
                let mut v = if weight.family == WeightFamily::WOmega {
                    f(x + y, x * y)
                } else {
                    f((1.0 + x) * (1.0 + y) / 4.0, (1.0 - x) * (1.0 - y) / 4.0)
                };
                if plus {
                    v *= (x - y) * (x - y) / (2.0 * var);
                }
                values.push(v);
            }
        }
        WeightFamily::CwSquare | WeightFamily::URhombus => {
            if 2.0 * a + 1.0 < 0.0 || 2.0 * b + 1.0 < 0.0 {
                return Err(Error::Capability(format!(
                    "square weight with alpha={a}, beta={b} has an unbounded density ratio"
                )));
            }
            let square = WeightSpec {
                family: WeightFamily::CwSquare,
                ..*weight
            };
            let unif =
                Uniform::new(0.0, std::f64::consts::PI).map_err(|e| Error::Input(e.to_string()))?;
            for _ in 0..samples {
                let (t1, t2) = (unif.sample(&mut rng), unif.sample(&mut rng));
                let (x, y) = (t1.cos(), t2.cos());
                // product Chebyshev density 1/(π² √(1-x²) √(1-y²))
                let ratio = square.density(crate::geometry::Point2::new(x, y))
                    * std::f64::consts::PI.powi(2)
                    * t1.sin()
                    * t2.sin();
                let v = if weight.family == WeightFamily::CwSquare {
                    f(x, y)
                } else {
                    f((x + y) / 2.0, (x - y) / 2.0)
                };
                values.push(v * ratio);
            }
        }
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var_s = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok(McEstimate {
        mean,
        stderr: (var_s / n).sqrt(),
    })
}

/// `E[x^a]` of the normalized Chebyshev measure: `C(a, a/2) / 2^a` for even
/// `a`, zero otherwise.
pub fn chebyshev_moment(a: usize) -> f64 {
    if a % 2 == 1 {
        return 0.0;
    }
    let h = a / 2;
    let mut m = 1.0;
    for i in 0..h {
        // C(2h, h)/4^h = Π (2i+1)/(2i+2)
        m *= (2 * i + 1) as f64 / (2 * i + 2) as f64;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::JacobiParams;
    use approx::assert_abs_diff_eq;

    fn spec(f: WeightFamily, a: f64, b: f64, g: Gamma) -> WeightSpec {
        WeightSpec::new(f, JacobiParams::new(a, b).unwrap(), g).unwrap()
    }

    #[test]
    fn constants_integrate_to_one() {
        for fam in [
            WeightFamily::WOmega,
            WeightFamily::WStar,
            WeightFamily::URhombus,
            WeightFamily::CwSquare,
        ] {
            for g in [Gamma::MinusHalf, Gamma::PlusHalf] {
                let o = ReferenceIntegrator::new(spec(fam, 0.5, -0.25, g), 64).unwrap();
                assert_abs_diff_eq!(o.integrate(|_, _| 1.0), 1.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn square_chebyshev_examples() {
        let w = spec(WeightFamily::CwSquare, -0.5, -0.5, Gamma::MinusHalf);
        assert_abs_diff_eq!(
            integrate_square(|x, y| x * y, &w).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            integrate_square(|x, y| x * x * y * y, &w).unwrap(),
            0.25,
            epsilon = 1e-14
        );
    }

    #[test]
    fn omega_legendre_u_is_zero() {
        let w = spec(WeightFamily::WOmega, 0.0, 0.0, Gamma::MinusHalf);
        assert_abs_diff_eq!(integrate_omega(|u, _| u, &w).unwrap(), 0.0, epsilon = 1e-15);
        assert!(integrate_omega(
            |u, _| u,
            &spec(WeightFamily::CwSquare, 0.0, 0.0, Gamma::MinusHalf)
        )
        .is_err());
    }

    #[test]
    fn wallis_moments_on_square() {
        let w = spec(WeightFamily::CwSquare, -0.5, -0.5, Gamma::MinusHalf);
        let o = ReferenceIntegrator::new(w, 64).unwrap();
        for d in 0..=40 {
            for b in 0..=d {
                let a = d - b;
                let got = o.integrate(|x, y| x.powi(a as i32) * y.powi(b as i32));
                let want = chebyshev_moment(a) * chebyshev_moment(b);
                assert!(
                    (got - want).abs() <= 1e-12 * (1.0 + want.abs()),
                    "{a} {b}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn omega_order_doubling() {
        for g in [Gamma::MinusHalf, Gamma::PlusHalf] {
            let w = spec(WeightFamily::WOmega, 1.3, 0.2, g);
            let o1 = ReferenceIntegrator::new(w, 64).unwrap();
            let o2 = ReferenceIntegrator::new(w, 128).unwrap();
            for d in 0..=40 {
                for b in 0..=d {
                    let a = d - b;
                    let f = |u: f64, v: f64| u.powi(a) * v.powi(b);
                    let (x, y) = (o1.integrate(f), o2.integrate(f));
                    assert!(
                        (x - y).abs() <= 1e-12 * y.abs().max(1e-300) + 1e-15,
                        "{a} {b}: {x} vs {y}"
                    );
                }
            }
        }
    }

    #[test]
    fn montecarlo_agrees_with_quadrature() {
        let w = spec(WeightFamily::CwSquare, 0.0, 0.0, Gamma::MinusHalf);
        let mc = montecarlo_check(|x, _| x * x, &w, 1_000_000, 42).unwrap();
        let exact = integrate_square(|x, _| x * x, &w).unwrap();
        assert!(mc.agrees(exact, 3.0), "{mc:?} vs {exact}");
        let again = montecarlo_check(|x, _| x * x, &w, 1_000_000, 42).unwrap();
        assert_eq!(mc, again);
        let one = montecarlo_check(|_, _| 1.0, &w, 100_000, 1).unwrap();
        assert!(one.agrees(1.0, 3.0));
    }

    #[test]
    fn montecarlo_omega_plus() {
        let w = spec(WeightFamily::WOmega, 0.5, -0.25, Gamma::PlusHalf);
        let f = |u: f64, v: f64| u * u + v;
        let mc = montecarlo_check(f, &w, 400_000, 9).unwrap();
        let exact = ReferenceIntegrator::new(w, 64).unwrap().integrate(f);
        assert!(mc.agrees(exact, 3.0), "{mc:?} vs {exact}");
    }

    #[test]
    fn montecarlo_rejects_singular_square() {
        let w = spec(WeightFamily::CwSquare, -0.75, 0.0, Gamma::MinusHalf);
        assert!(matches!(
            montecarlo_check(|_, _| 1.0, &w, 10, 0),
            Err(Error::Capability(_))
        ));
    }
}
