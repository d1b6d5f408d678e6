//! Gaussian cubature on Ω and Ω*, and minimal cubature on the rhombus and the
//! square, all generated from one Gauss–Jacobi rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{affine_to_star_unchecked, DomainTag, Point2};
use crate::jacobi::{gauss_rule, JacobiParams, QuadRule1D};
use crate::oracle::ReferenceIntegrator;

/// The exponent `γ` of `(u² - 4v)^γ`; only `±1/2` admit Gaussian rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gamma {
    MinusHalf,
    PlusHalf,
}

impl Gamma {
    pub fn value(&self) -> f64 {
        match self {
            Gamma::MinusHalf => -0.5,
            Gamma::PlusHalf => 0.5,
        }
    }

    pub fn from_value(g: f64) -> Result<Self> {
        if g == -0.5 {
            Ok(Gamma::MinusHalf)
        } else if g == 0.5 {
            Ok(Gamma::PlusHalf)
        } else {
            Err(Error::Capability(format!(
                "gamma must be -0.5 or +0.5, got {g}"
            )))
        }
    }
}

impl Serialize for Gamma {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Gamma {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let g = f64::deserialize(d)?;
        Gamma::from_value(g).map_err(serde::de::Error::custom)
    }
}

/// Weight family; each lives on one domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightFamily {
    /// `(1-u+v)^α (1+u+v)^β (u²-4v)^γ` on Ω.
    WOmega,
    /// Pull-back of `WOmega` to Ω* by the affine map.
    WStar,
    /// `|st|`-weighted pull-back of `WStar` to the rhombus.
    URhombus,
    /// `|x-y|^{2α+1} |x+y|^{2β+1} (1-x²)^γ (1-y²)^γ` on the square.
    CwSquare,
}

impl WeightFamily {
    pub fn domain(&self) -> DomainTag {
        match self {
            WeightFamily::WOmega => DomainTag::Omega,
            WeightFamily::WStar => DomainTag::OmegaStar,
            WeightFamily::URhombus => DomainTag::Rhombus,
            WeightFamily::CwSquare => DomainTag::Square,
        }
    }

    pub fn from_domain(d: DomainTag) -> Self {
        match d {
            DomainTag::Omega => WeightFamily::WOmega,
            DomainTag::OmegaStar => WeightFamily::WStar,
            DomainTag::Rhombus => WeightFamily::URhombus,
            DomainTag::Square => WeightFamily::CwSquare,
        }
    }
}

/// A normalized weight: family, Jacobi exponents and `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub family: WeightFamily,
    pub params: JacobiParams,
    pub gamma: Gamma,
}

impl WeightSpec {
    pub fn new(family: WeightFamily, params: JacobiParams, gamma: Gamma) -> Result<Self> {
        let g = gamma.value();
        let (a, b) = (params.alpha(), params.beta());
        if !(a + g + 0.5 > -1.0 && b + g + 0.5 > -1.0) {
            return Err(Error::InadmissibleWeight(format!(
                "alpha={a}, beta={b}, gamma={g} violates alpha+gamma+1/2 > -1, beta+gamma+1/2 > -1"
            )));
        }
        Ok(Self {
            family,
            params,
            gamma,
        })
    }

    pub fn domain(&self) -> DomainTag {
        self.family.domain()
    }

    /// Constant making the Ω weight a probability density: `2c²` for
    /// `γ = -1/2` and `c²/σ²` for `γ = +1/2`, where `σ²` is the variance of
    /// the one-variable Jacobi measure. The same constant normalizes the
    /// square weight once multiplied by `4^γ`.
    pub fn normalization(&self) -> f64 {
        let c = self.params.normalization();
        match self.gamma {
            Gamma::MinusHalf => 2.0 * c * c,
            Gamma::PlusHalf => c * c / self.params.variance(),
        }
    }

    /// Closed-form Γ-expression for `b_{α,β,γ}` quoted in the literature. It
    /// equals twice [`WeightSpec::normalization`] for `γ = ±1/2`.
    pub fn gamma_formula_constant(&self) -> f64 {
        use crate::special::lgamma;
        let (a, b, g) = (self.params.alpha(), self.params.beta(), self.gamma.value());
        let ln = 0.5 * std::f64::consts::PI.ln()
            - (2.0 * a + 2.0 * b + 4.0 * g + 2.0) * std::f64::consts::LN_2
            + lgamma(a + b + g + 2.5)
            + lgamma(a + b + 2.0 * g + 3.0)
            - lgamma(a + 1.0)
            - lgamma(b + 1.0)
            - lgamma(g + 1.0)
            - lgamma(a + g + 1.5)
            - lgamma(b + g + 1.5);
        ln.exp()
    }

    /// Weight density at a point of its domain (zero outside).
    pub fn density(&self, p: Point2) -> f64 {
        if !self.domain().contains(p) {
            return 0.0;
        }
        let (a, b, g) = (self.params.alpha(), self.params.beta(), self.gamma.value());
        let bnorm = self.normalization();
        let omega = |u: f64, v: f64| {
            bnorm
                * (1.0 - u + v).max(0.0).powf(a)
                * (1.0 + u + v).max(0.0).powf(b)
                * (u * u - 4.0 * v).max(0.0).powf(g)
        };
        match self.family {
            WeightFamily::WOmega => omega(p.a, p.b),
            // du dv = 8 ds dt
            WeightFamily::WStar => {
                let q = crate::geometry::star_to_omega(p.a, p.b);
                8.0 * omega(q.a, q.b)
            }
            WeightFamily::URhombus => {
                let q = crate::geometry::rotate_to_square(p.a, p.b);
                2.0 * self.square_density(q.a, q.b, bnorm)
            }
            WeightFamily::CwSquare => self.square_density(p.a, p.b, bnorm),
        }
    }

    fn square_density(&self, x: f64, y: f64, bnorm: f64) -> f64 {
        let (a, b, g) = (self.params.alpha(), self.params.beta(), self.gamma.value());
        bnorm
            * 4f64.powf(g)
            * (x - y).abs().powf(2.0 * a + 1.0)
            * (x + y).abs().powf(2.0 * b + 1.0)
            * (1.0 - x * x).max(0.0).powf(g)
            * (1.0 - y * y).max(0.0).powf(g)
    }
}

/// Which one-variable node pair (and which of the four orbit images) produced
/// a cubature node. `j ≤ k` index the Gauss nodes from 1 in descending order;
/// `branch` is 0 on Ω and Ω*, otherwise 1 to 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbitIndex {
    pub j: usize,
    pub k: usize,
    pub branch: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubatureRule {
    pub weight: WeightSpec,
    pub n: usize,
    pub degree: usize,
    pub domain: DomainTag,
    pub nodes: Vec<Point2>,
    pub weights: Vec<f64>,
    pub orbit_index: Vec<OrbitIndex>,
}

impl CubatureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Weighted sum `Σ w_i f(node_i)` in node order with compensated summation.
    pub fn apply<F: Fn(f64, f64) -> f64>(&self, f: F) -> Result<f64> {
        apply(self, f)
    }
}

/// Node count of each family for generator index `n`.
pub fn expected_node_count(family: WeightFamily, gamma: Gamma, n: usize) -> usize {
    let tri = match gamma {
        Gamma::MinusHalf => n * (n + 1) / 2,
        Gamma::PlusHalf => n * n.saturating_sub(1) / 2,
    };
    match family {
        WeightFamily::WOmega | WeightFamily::WStar => tri,
        WeightFamily::URhombus | WeightFamily::CwSquare => 4 * tri,
    }
}

/// Declared polynomial degree of each family.
///
/// The `γ = +1/2` minimal rules on the rhombus and square have degree
/// `4n - 5`: their `2n(n-1)` nodes are the orbits of the Gaussian Ω rule of
/// degree `2n - 3`, and `2n(n-1)` is exactly the lower bound
/// `dim Π_{2m-1} + m/2` for degree `2m - 1 = 4n - 5`.
pub fn declared_degree(family: WeightFamily, gamma: Gamma, n: usize) -> usize {
    match (family, gamma) {
        (WeightFamily::WOmega | WeightFamily::WStar, Gamma::MinusHalf) => 2 * n - 1,
        (WeightFamily::WOmega | WeightFamily::WStar, Gamma::PlusHalf) => 2 * n - 3,
        (_, Gamma::MinusHalf) => 4 * n - 1,
        (_, Gamma::PlusHalf) => 4 * n - 5,
    }
}

/// Index pairs `(j, k)` (0-based) in generation order with the factor that
/// turns `λ_j λ_k` into the normalized Ω weight.
fn pair_weights(rule: &QuadRule1D, gamma: Gamma) -> Vec<(usize, usize, f64)> {
    let n = rule.n;
    let lam = &rule.weights;
    let var = rule.params.variance();
    let mut out = Vec::new();
    for k in 0..n {
        for j in 0..=k {
            match gamma {
                Gamma::MinusHalf => {
                    let w = if j == k {
                        lam[j] * lam[k]
                    } else {
                        2.0 * lam[j] * lam[k]
                    };
                    out.push((j, k, w));
                }
                Gamma::PlusHalf if j < k => {
                    let d = rule.nodes[j] - rule.nodes[k];
                    out.push((j, k, lam[j] * lam[k] * d * d / var));
                }
                Gamma::PlusHalf => {}
            }
        }
    }
    out
}

fn check_n(gamma: Gamma, n: usize) -> Result<()> {
    let min = match gamma {
        Gamma::MinusHalf => 1,
        Gamma::PlusHalf => 2,
    };
    if n < min {
        return Err(Error::Input(format!(
            "n must be at least {min} for gamma={}, got {n}",
            gamma.value()
        )));
    }
    Ok(())
}

/// Gaussian rule of degree `2n-1` (`γ = -1/2`) or `2n-3` (`γ = +1/2`) on Ω.
pub fn gauss_rule_omega(params: JacobiParams, gamma: Gamma, n: usize) -> Result<CubatureRule> {
    let weight = WeightSpec::new(WeightFamily::WOmega, params, gamma)?;
    check_n(gamma, n)?;
    let rule = gauss_rule(params, n)?;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut orbit_index = Vec::new();
    for (j, k, w) in pair_weights(&rule, gamma) {
        let (xj, xk) = (rule.nodes[j], rule.nodes[k]);
        nodes.push(Point2::new(xj + xk, xj * xk));
        weights.push(w);
        orbit_index.push(OrbitIndex {
            j: j + 1,
            k: k + 1,
            branch: 0,
        });
    }
    Ok(CubatureRule {
        weight,
        n,
        degree: declared_degree(WeightFamily::WOmega, gamma, n),
        domain: DomainTag::Omega,
        nodes,
        weights,
        orbit_index,
    })
}

/// The Ω rule carried to Ω* by the affine map; weights are unchanged.
pub fn gauss_rule_star(params: JacobiParams, gamma: Gamma, n: usize) -> Result<CubatureRule> {
    let mut r = gauss_rule_omega(params, gamma, n)?;
    // s = (1+x_j)(1+x_k)/4, t = (1-x_j)(1-x_k)/4 directly is more accurate
    // than going through (u, v).
    let g = gauss_rule(params, n)?;
    for (p, o) in r.nodes.iter_mut().zip(&r.orbit_index) {
        let (xj, xk) = (g.nodes[o.j - 1], g.nodes[o.k - 1]);
        *p = Point2::new((1.0 + xj) * (1.0 + xk) / 4.0, (1.0 - xj) * (1.0 - xk) / 4.0);
        debug_assert!({
            let q = affine_to_star_unchecked(xj + xk, xj * xk);
            (q.a - p.a).abs() < 1e-13 && (q.b - p.b).abs() < 1e-13
        });
    }
    r.weight.family = WeightFamily::WStar;
    r.domain = DomainTag::OmegaStar;
    Ok(r)
}

/// Half-angle node `(cos((θ_j-θ_k)/2), cos((θ_j+θ_k)/2))`.
fn square_node(rule: &QuadRule1D, j: usize, k: usize) -> (f64, f64) {
    let (tj, tk) = (rule.thetas[j], rule.thetas[k]);
    (((tj - tk) / 2.0).cos(), ((tj + tk) / 2.0).cos())
}

fn minimal_rule(
    params: JacobiParams,
    gamma: Gamma,
    n: usize,
    family: WeightFamily,
) -> Result<CubatureRule> {
    let weight = WeightSpec::new(family, params, gamma)?;
    check_n(gamma, n)?;
    let rule = gauss_rule(params, n)?;
    let pairs = pair_weights(&rule, gamma);
    let mut nodes = Vec::with_capacity(4 * pairs.len());
    let mut weights = Vec::with_capacity(4 * pairs.len());
    let mut orbit_index = Vec::with_capacity(4 * pairs.len());
    for (j, k, w) in pairs {
        let (s, t) = square_node(&rule, j, k);
        let images = match family {
            WeightFamily::CwSquare => [(s, t), (t, s), (-s, -t), (-t, -s)],
            _ => {
                let (u, v) = ((s + t) / 2.0, (s - t) / 2.0);
                [(u, v), (u, -v), (-u, -v), (-u, v)]
            }
        };
        for (b, (x, y)) in images.into_iter().enumerate() {
            nodes.push(Point2::new(x, y));
            weights.push(w / 4.0);
            orbit_index.push(OrbitIndex {
                j: j + 1,
                k: k + 1,
                branch: b as u8 + 1,
            });
        }
    }
    debug_assert!(no_near_duplicates(&nodes));
    Ok(CubatureRule {
        weight,
        n,
        degree: declared_degree(family, gamma, n),
        domain: family.domain(),
        nodes,
        weights,
        orbit_index,
    })
}

fn no_near_duplicates(nodes: &[Point2]) -> bool {
    if nodes.len() > 2000 {
        return true;
    }
    for (i, p) in nodes.iter().enumerate() {
        for q in &nodes[i + 1..] {
            if (p.a - q.a).abs() < 1e-12 && (p.b - q.b).abs() < 1e-12 {
                return false;
            }
        }
    }
    true
}

/// Minimal rule of degree `4n-1` / `4n-3` on the rhombus.
pub fn minimal_rule_rhombus(params: JacobiParams, gamma: Gamma, n: usize) -> Result<CubatureRule> {
    minimal_rule(params, gamma, n, WeightFamily::URhombus)
}

/// Minimal rule of degree `4n-1` / `4n-3` on the square.
pub fn minimal_rule_square(params: JacobiParams, gamma: Gamma, n: usize) -> Result<CubatureRule> {
    minimal_rule(params, gamma, n, WeightFamily::CwSquare)
}

/// Any of the four families by domain.
pub fn build_rule(
    domain: DomainTag,
    params: JacobiParams,
    gamma: Gamma,
    n: usize,
) -> Result<CubatureRule> {
    match domain {
        DomainTag::Omega => gauss_rule_omega(params, gamma, n),
        DomainTag::OmegaStar => gauss_rule_star(params, gamma, n),
        DomainTag::Rhombus => minimal_rule_rhombus(params, gamma, n),
        DomainTag::Square => minimal_rule_square(params, gamma, n),
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `Σ w_i f(node_i)` in node order with compensated summation.
pub fn apply<F: Fn(f64, f64) -> f64>(rule: &CubatureRule, f: F) -> Result<f64> {
    let mut acc = KahanSum::default();
    for (i, (p, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let v = f(p.a, p.b);
        if !v.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
        acc.add(w * v);
    }
    Ok(acc.value())
}

/// One tested polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactnessEntry {
    /// Exponents of the monomial `p^a q^b` in the domain's coordinates.
    pub a: usize,
    pub b: usize,
    pub cubature: f64,
    pub reference: f64,
    pub abs_err: f64,
    pub pass: bool,
}

impl ExactnessEntry {
    pub fn degree(&self) -> usize {
        self.a + self.b
    }
}

/// The degree `s + 1` probe: the largest error among Chebyshev-product test
/// polynomials of that degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub degree: usize,
    pub a: usize,
    pub b: usize,
    pub max_abs_err: f64,
    pub fails_as_expected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactnessReport {
    pub declared_degree: usize,
    pub entries: Vec<ExactnessEntry>,
    /// `None` when the oracle cannot certify degree `s + 1`.
    pub probe: Option<ProbeResult>,
    pub max_residual: f64,
    pub passed: bool,
}

impl ExactnessReport {
    /// `(degree, all pass, max abs error)` per total degree.
    pub fn strata(&self) -> Vec<(usize, bool, f64)> {
        let mut out: Vec<(usize, bool, f64)> =
            (0..=self.declared_degree).map(|d| (d, true, 0.0)).collect();
        for e in &self.entries {
            let s = &mut out[e.degree()];
            s.1 &= e.pass;
            s.2 = s.2.max(e.abs_err);
        }
        out
    }
}

/// Affine normalization of the domain's bounding box to `[-1, 1]²`, used by
/// the probe polynomials so that their size is independent of the domain.
fn box_normalize(domain: DomainTag, p: f64, q: f64) -> (f64, f64) {
    match domain {
        DomainTag::Omega => (p / 2.0, q),
        DomainTag::OmegaStar => (2.0 * p - 1.0, 2.0 * q - 1.0),
        DomainTag::Rhombus | DomainTag::Square => (p, q),
    }
}

fn chebyshev_t(n: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if n == 0 {
        return a;
    }
    for _ in 1..n {
        let c = 2.0 * x * b - a;
        a = b;
        b = c;
    }
    b
}

/// Checks every monomial up to the rule's declared degree against the oracle
/// at tolerance `1e-9 (1 + |ref|)`, and probes degree `s + 1` for a failure
/// larger than `1e-6`.
pub fn verify_exactness(
    rule: &CubatureRule,
    oracle: &ReferenceIntegrator,
) -> Result<ExactnessReport> {
    if oracle.weight() != &rule.weight {
        return Err(Error::Capability(format!(
            "oracle built for {:?}, rule uses {:?}",
            oracle.weight(),
            rule.weight
        )));
    }
    let s = rule.degree;
    if !oracle.certifies(s) {
        return Err(Error::Capability(format!(
            "oracle of order {} cannot certify degree {s}",
            oracle.order()
        )));
    }
    let mut entries = Vec::new();
    for d in 0..=s {
        for b in 0..=d {
            let a = d - b;
            let f = |p: f64, q: f64| p.powi(a as i32) * q.powi(b as i32);
            let cub = apply(rule, f)?;
            let reference = oracle.integrate(f);
            let abs_err = (cub - reference).abs();
            entries.push(ExactnessEntry {
                a,
                b,
                cubature: cub,
                reference,
                abs_err,
                pass: abs_err <= 1e-9 * (1.0 + reference.abs()),
            });
        }
    }
    let probe = if oracle.certifies(s + 1) {
        let d = s + 1;
        let domain = rule.domain;
        let mut best = ProbeResult {
            degree: d,
            a: d,
            b: 0,
            max_abs_err: 0.0,
            fails_as_expected: false,
        };
        for b in 0..=d {
            let a = d - b;
            let f = |p: f64, q: f64| {
                let (x, y) = box_normalize(domain, p, q);
                chebyshev_t(a, x) * chebyshev_t(b, y)
            };
            let err = (apply(rule, f)? - oracle.integrate(f)).abs();
            if err > best.max_abs_err {
                best.max_abs_err = err;
                best.a = a;
                best.b = b;
            }
        }
        best.fails_as_expected = best.max_abs_err > 1e-6;
        Some(best)
    } else {
        None
    };
    let max_residual = entries.iter().map(|e| e.abs_err).fold(0.0, f64::max);
    let passed =
        entries.iter().all(|e| e.pass) && probe.as_ref().is_none_or(|p| p.fails_as_expected);
    Ok(ExactnessReport {
        declared_degree: s,
        entries,
        probe,
        max_residual,
        passed,
    })
}
