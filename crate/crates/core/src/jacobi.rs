//! One-variable Jacobi machinery.
//!
//! All orthonormal quantities refer to the probability measure
//! `c_{α,β} (1-x)^α (1+x)^β dx` on `[-1, 1]`, so `p_0 ≡ 1` and the Gauss
//! weights sum to one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maximize::golden_section_max;
use crate::special::{lgamma, ln_factorial, ln_pochhammer};

/// Pair of Jacobi exponents `(α, β)` with `α, β > -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    alpha: f64,
    beta: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && alpha > -1.0 && beta > -1.0) {
            return Err(Error::InvalidParams { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    /// Chebyshev weight of the first kind, `α = β = -1/2`.
    pub fn chebyshev() -> Self {
        Self {
            alpha: -0.5,
            beta: -0.5,
        }
    }

    pub fn legendre() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `(α + i, β + j)`; always admissible for non-negative shifts.
    pub fn shifted(&self, i: u32, j: u32) -> Self {
        Self {
            alpha: self.alpha + i as f64,
            beta: self.beta + j as f64,
        }
    }

    /// Normalization constant `c_{α,β}` with `c ∫ w_{α,β} = 1`.
    pub fn normalization(&self) -> f64 {
        self.ln_normalization().exp()
    }

    fn ln_normalization(&self) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        lgamma(a + b + 2.0)
            - (a + b + 1.0) * std::f64::consts::LN_2
            - lgamma(a + 1.0)
            - lgamma(b + 1.0)
    }

    /// Mean of the normalized Jacobi measure.
    pub fn mean(&self) -> f64 {
        (self.beta - self.alpha) / (self.alpha + self.beta + 2.0)
    }

    /// Variance of the normalized Jacobi measure.
    pub fn variance(&self) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        let s = a + b + 2.0;
        4.0 * (a + 1.0) * (b + 1.0) / (s * s * (s + 1.0))
    }

    /// Weight function `(1-x)^α (1+x)^β` (unnormalized).
    pub fn weight(&self, x: f64) -> f64 {
        (1.0 - x).powf(self.alpha) * (1.0 + x).powf(self.beta)
    }

    /// Diagonal coefficient `b_k` of the orthonormal recurrence
    /// `x p_k = a_{k+1} p_{k+1} + b_k p_k + a_k p_{k-1}`.
    pub fn recurrence_diag(&self, k: usize) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        if k == 0 {
            return (b - a) / (a + b + 2.0);
        }
        let t = 2.0 * k as f64 + a + b;
        (b * b - a * a) / (t * (t + 2.0))
    }

    /// Off-diagonal coefficient `a_k`, `k ≥ 1`.
    pub fn recurrence_off(&self, k: usize) -> f64 {
        assert!(
            k >= 1,
            "off-diagonal recurrence coefficients start at k = 1"
        );
        let (a, b) = (self.alpha, self.beta);
        if k == 1 {
            let s = a + b + 2.0;
            return (4.0 * (a + 1.0) * (b + 1.0) / (s * s * (s + 1.0))).sqrt();
        }
        let kf = k as f64;
        let t = 2.0 * kf + a + b;
        (4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (t * t * (t + 1.0) * (t - 1.0))).sqrt()
    }
}

/// Leading coefficient, norm and normalization constant for one degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiConstants {
    /// `l_n`: leading coefficient of `P_n^{(α,β)}`.
    pub lead: f64,
    /// `h_n = c ∫ (P_n)^2 w`.
    pub norm: f64,
    /// `c_{α,β}`.
    pub cnorm: f64,
}

/// Constants for `P_n^{(α,β)}` evaluated through log-gamma.
pub fn constants(params: JacobiParams, n: usize) -> Result<JacobiConstants> {
    let (a, b) = (params.alpha, params.beta);
    let nf = n as f64;
    let ln_lead = if n == 0 {
        0.0
    } else {
        ln_pochhammer(nf + a + b + 1.0, n) - nf * std::f64::consts::LN_2 - ln_factorial(n)
    };
    let ln_norm = if n == 0 {
        0.0
    } else {
        ln_pochhammer(a + 1.0, n) + ln_pochhammer(b + 1.0, n) + (a + b + nf + 1.0).ln()
            - ln_factorial(n)
            - ln_pochhammer(a + b + 2.0, n)
            - (a + b + 2.0 * nf + 1.0).ln()
    };
    let out = JacobiConstants {
        lead: ln_lead.exp(),
        norm: ln_norm.exp(),
        cnorm: params.ln_normalization().exp(),
    };
    let ok = |v: f64| v.is_finite() && v > 0.0;
    if !(ok(out.lead) && ok(out.norm) && ok(out.cnorm)) {
        return Err(Error::Range(format!(
            "Jacobi constants overflow for alpha={a}, beta={b}, n={n}"
        )));
    }
    Ok(out)
}

/// Classical Jacobi polynomial `P_n^{(α,β)}(x)` from the standard three-term
/// recurrence (unnormalized, `P_n(1) = (α+1)_n / n!`).
pub fn eval_jacobi(params: JacobiParams, n: usize, x: f64) -> f64 {
    let (a, b) = (params.alpha, params.beta);
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let kf = k as f64;
        let t = 2.0 * kf + a + b;
        let c1 = 2.0 * kf * (kf + a + b) * (t - 2.0);
        let c2 = (t - 1.0) * (t * (t - 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * t;
        let next = (c2 * cur - c3 * prev) / c1;
        prev = cur;
        cur = next;
    }
    cur
}

/// Orthonormal Jacobi polynomial `p_n = P_n / sqrt(h_n)`.
pub fn eval_orthonormal(params: JacobiParams, n: usize, x: f64) -> f64 {
    Recurrence::new(params, n).eval(n, x)
}

/// Threshold below which `x` and `y` are treated as coincident by the
/// Christoffel–Darboux quotient.
pub fn is_confluent(x: f64, y: f64) -> bool {
    (x - y).abs() < 1e-6 * (1.0 + x.abs() + y.abs())
}

/// `k_n(x, y) = Σ_{j ≤ n} p_j(x) p_j(y)`.
pub fn cd_kernel(params: JacobiParams, n: usize, x: f64, y: f64) -> f64 {
    Recurrence::new(params, n + 1).kernel(n, x, y)
}

/// Cached orthonormal recurrence coefficients up to a fixed degree.
#[derive(Debug, Clone)]
pub struct Recurrence {
    params: JacobiParams,
    diag: Vec<f64>,
    /// `off[k] = a_k`; `off[0]` is unused.
    off: Vec<f64>,
}

impl Recurrence {
    /// Coefficients sufficient to evaluate `p_0, …, p_{max_degree}`.
    pub fn new(params: JacobiParams, max_degree: usize) -> Self {
        let diag = (0..max_degree.max(1))
            .map(|k| params.recurrence_diag(k))
            .collect();
        let off = (0..=max_degree.max(1))
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    params.recurrence_off(k)
                }
            })
            .collect();
        Self { params, diag, off }
    }

    pub fn params(&self) -> JacobiParams {
        self.params
    }

    pub fn max_degree(&self) -> usize {
        self.off.len() - 1
    }

    pub fn diag(&self, k: usize) -> f64 {
        self.diag[k]
    }

    pub fn off(&self, k: usize) -> f64 {
        self.off[k]
    }

    /// Writes `p_0(x), …, p_{out.len()-1}(x)` into `out`.
    pub fn fill(&self, x: f64, out: &mut [f64]) {
        if out.is_empty() {
            return;
        }
        out[0] = 1.0;
        if out.len() == 1 {
            return;
        }
        out[1] = (x - self.diag[0]) / self.off[1];
        for k in 1..out.len() - 1 {
            out[k + 1] = ((x - self.diag[k]) * out[k] - self.off[k] * out[k - 1]) / self.off[k + 1];
        }
    }

    /// Values and first derivatives of `p_0, …, p_{len-1}`.
    pub fn fill_with_derivative(&self, x: f64, p: &mut [f64], dp: &mut [f64]) {
        debug_assert_eq!(p.len(), dp.len());
        if p.is_empty() {
            return;
        }
        p[0] = 1.0;
        dp[0] = 0.0;
        if p.len() == 1 {
            return;
        }
        p[1] = (x - self.diag[0]) / self.off[1];
        dp[1] = 1.0 / self.off[1];
        for k in 1..p.len() - 1 {
            let inv = 1.0 / self.off[k + 1];
            p[k + 1] = ((x - self.diag[k]) * p[k] - self.off[k] * p[k - 1]) * inv;
            dp[k + 1] = ((x - self.diag[k]) * dp[k] + p[k] - self.off[k] * dp[k - 1]) * inv;
        }
    }

    /// `p_n(x)`.
    pub fn eval(&self, n: usize, x: f64) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let (mut prev, mut cur) = (1.0, (x - self.diag[0]) / self.off[1]);
        for k in 1..n {
            let next = ((x - self.diag[k]) * cur - self.off[k] * prev) / self.off[k + 1];
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `(p_n(x), p_{n+1}(x))`.
    pub fn eval_pair(&self, n: usize, x: f64) -> (f64, f64) {
        let (mut prev, mut cur) = (1.0, (x - self.diag[0]) / self.off[1]);
        for k in 1..=n {
            let next = ((x - self.diag[k]) * cur - self.off[k] * prev) / self.off[k + 1];
            prev = cur;
            cur = next;
        }
        (prev, cur)
    }

    /// `p_n(x)` and `p_n'(x)`.
    pub fn eval_with_derivative(&self, n: usize, x: f64) -> (f64, f64) {
        let mut p = vec![0.0; n + 1];
        let mut dp = vec![0.0; n + 1];
        self.fill_with_derivative(x, &mut p, &mut dp);
        (p[n], dp[n])
    }

    /// Christoffel–Darboux kernel `k_n(x, y)`; needs `max_degree ≥ n + 1`.
    /// Falls back to the direct sum when the points are confluent.
    pub fn kernel(&self, n: usize, x: f64, y: f64) -> f64 {
        if is_confluent(x, y) {
            return self.kernel_direct(n, x, y);
        }
        let (pnx, pn1x) = self.eval_pair(n, x);
        let (pny, pn1y) = self.eval_pair(n, y);
        cd_quotient(self.off[n + 1], pnx, pn1x, pny, pn1y, x, y)
    }

    /// `Σ_{j ≤ n} p_j(x) p_j(y)` summed term by term.
    pub fn kernel_direct(&self, n: usize, x: f64, y: f64) -> f64 {
        let mut px = vec![0.0; n + 1];
        let mut py = vec![0.0; n + 1];
        self.fill(x, &mut px);
        self.fill(y, &mut py);
        px.iter().zip(&py).map(|(a, b)| a * b).sum()
    }

    /// `∂_x k_n(x, y)`.
    pub fn kernel_dx(&self, n: usize, x: f64, y: f64) -> f64 {
        let mut px = vec![0.0; n + 1];
        let mut dpx = vec![0.0; n + 1];
        let mut py = vec![0.0; n + 1];
        self.fill_with_derivative(x, &mut px, &mut dpx);
        self.fill(y, &mut py);
        dpx.iter().zip(&py).map(|(a, b)| a * b).sum()
    }

    /// `∂_x ∂_y k_n(x, y)`.
    pub fn kernel_dxdy(&self, n: usize, x: f64, y: f64) -> f64 {
        let mut px = vec![0.0; n + 1];
        let mut dpx = vec![0.0; n + 1];
        let mut py = vec![0.0; n + 1];
        let mut dpy = vec![0.0; n + 1];
        self.fill_with_derivative(x, &mut px, &mut dpx);
        self.fill_with_derivative(y, &mut py, &mut dpy);
        dpx.iter().zip(&dpy).map(|(a, b)| a * b).sum()
    }
}

/// `a_{n+1} [p_{n+1}(x) p_n(y) - p_n(x) p_{n+1}(y)] / (x - y)`.
#[inline]
pub(crate) fn cd_quotient(
    a_next: f64,
    pnx: f64,
    pn1x: f64,
    pny: f64,
    pn1y: f64,
    x: f64,
    y: f64,
) -> f64 {
    a_next * (pn1x * pny - pnx * pn1y) / (x - y)
}

/// Gauss–Jacobi rule for the normalized measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadRule1D {
    pub params: JacobiParams,
    pub n: usize,
    /// Zeros of `P_n`, strictly descending.
    pub nodes: Vec<f64>,
    /// `θ_k` with `nodes[k] = cos θ_k`, strictly ascending in `(0, π)`.
    pub thetas: Vec<f64>,
    /// Positive weights summing to one.
    pub weights: Vec<f64>,
}

impl QuadRule1D {
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn theta_of(x: f64) -> f64 {
    ((1.0 - x) * (1.0 + x)).max(0.0).sqrt().atan2(x)
}

/// `n`-point Gauss–Jacobi rule of degree `2n - 1`.
///
/// Nodes are eigenvalues of the Jacobi matrix polished by two Newton steps;
/// weights are `1 / k_{n-1}(x_k, x_k)`.
pub fn gauss_rule(params: JacobiParams, n: usize) -> Result<QuadRule1D> {
    if n == 0 {
        return Err(Error::Input("a Gauss rule needs at least one node".into()));
    }
    let rec = Recurrence::new(params, n);
    let diag: Vec<f64> = (0..n).map(|k| rec.diag(k)).collect();
    let off: Vec<f64> = (1..n).map(|k| rec.off(k)).collect();
    let (mut nodes, _) = crate::tridiag::symmetric_tridiagonal_eigen(&diag, &off, false)?;
    nodes.sort_by(|a, b| b.total_cmp(a));

    let mut p = vec![0.0; n + 1];
    let mut dp = vec![0.0; n + 1];
    for x in nodes.iter_mut() {
        for _ in 0..2 {
            rec.fill_with_derivative(*x, &mut p, &mut dp);
            if dp[n] != 0.0 {
                let step = p[n] / dp[n];
                if step.is_finite() {
                    *x -= step;
                }
            }
        }
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            rec.fill(x, &mut p[..n]);
            1.0 / p[..n].iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    let thetas = nodes.iter().map(|&x| theta_of(x)).collect();
    Ok(QuadRule1D {
        params,
        n,
        nodes,
        thetas,
        weights,
    })
}

/// Weights from the Golub–Welsch eigenvector route; used as a cross-check.
pub fn gauss_weights_from_eigenvectors(
    params: JacobiParams,
    n: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let rec = Recurrence::new(params, n);
    let diag: Vec<f64> = (0..n).map(|k| rec.diag(k)).collect();
    let off: Vec<f64> = (1..n).map(|k| rec.off(k)).collect();
    let (values, first) = crate::tridiag::symmetric_tridiagonal_eigen(&diag, &off, true)?;
    let mut pairs: Vec<(f64, f64)> = values
        .into_iter()
        .zip(first.unwrap_or_default())
        .map(|(x, z)| (x, z * z))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(pairs.into_iter().unzip())
}

/// Closed form of `ĥ_m = Σ_k λ_k (1 - x_k²) [p_m^{(α+1,β+1)}(x_k)]²` over the
/// `n`-point rule, `0 ≤ m ≤ n - 1`.
pub fn hat_h(params: JacobiParams, n: usize, m: usize) -> Result<f64> {
    if m >= n {
        return Err(Error::Domain(format!(
            "hat_h needs m < n, got m={m}, n={n}"
        )));
    }
    let (a, b) = (params.alpha, params.beta);
    if m + 1 < n {
        // c_{α,β} / c_{α+1,β+1}
        return Ok(4.0 * (a + 1.0) * (b + 1.0) / ((a + b + 2.0) * (a + b + 3.0)));
    }
    let nf = n as f64;
    Ok(4.0 * (1.0 + a) * (1.0 + b) * (1.0 + a + b + 2.0 * nf)
        / ((2.0 + a + b) * (3.0 + a + b) * (1.0 + a + b + nf)))
}

/// Fundamental Lagrange polynomials on the zeros of `p_n`.
#[derive(Debug, Clone)]
pub struct Lagrange1d {
    rule: QuadRule1D,
    rec: Recurrence,
    /// `p_n'(x_k)`.
    dpn: Vec<f64>,
    /// `p_i(x_k)` for `i < n`, row-major by node.
    node_table: Vec<f64>,
}

impl Lagrange1d {
    pub fn new(rule: &QuadRule1D) -> Self {
        let n = rule.n;
        let rec = Recurrence::new(rule.params, n + 1);
        let mut p = vec![0.0; n + 1];
        let mut dp = vec![0.0; n + 1];
        let mut node_table = Vec::with_capacity(n * n);
        let dpn = rule
            .nodes
            .iter()
            .map(|&x| {
                rec.fill_with_derivative(x, &mut p, &mut dp);
                node_table.extend_from_slice(&p[..n]);
                dp[n]
            })
            .collect();
        Self {
            rule: rule.clone(),
            rec,
            dpn,
            node_table,
        }
    }

    pub fn rule(&self) -> &QuadRule1D {
        &self.rule
    }

    fn node_row(&self, k: usize) -> &[f64] {
        let n = self.rule.n;
        &self.node_table[k * n..(k + 1) * n]
    }

    /// Writes `l_1(x), …, l_n(x)` into `out`.
    pub fn fundamentals(&self, x: f64, out: &mut [f64]) {
        let n = self.rule.n;
        let pn = self.rec.eval(n, x);
        let mut px: Option<Vec<f64>> = None;
        for (k, o) in out.iter_mut().enumerate().take(n) {
            let d = x - self.rule.nodes[k];
            if d.abs() <= 1e-10 {
                // l_k(x) = λ_k k_{n-1}(x, x_k) avoids the 0/0 at the node.
                let px = px.get_or_insert_with(|| {
                    let mut v = vec![0.0; n];
                    self.rec.fill(x, &mut v);
                    v
                });
                let s: f64 = px.iter().zip(self.node_row(k)).map(|(a, b)| a * b).sum();
                *o = self.rule.weights[k] * s;
            } else {
                *o = pn / (self.dpn[k] * d);
            }
        }
    }

    /// Writes `l_1'(x), …, l_n'(x)` into `out` via `λ_k ∂_x k_{n-1}(x, x_k)`.
    pub fn fundamental_derivatives(&self, x: f64, out: &mut [f64]) {
        let n = self.rule.n;
        let mut p = vec![0.0; n];
        let mut dp = vec![0.0; n];
        self.rec.fill_with_derivative(x, &mut p, &mut dp);
        for (k, o) in out.iter_mut().enumerate().take(n) {
            let s: f64 = dp.iter().zip(self.node_row(k)).map(|(a, b)| a * b).sum();
            *o = self.rule.weights[k] * s;
        }
    }

    /// `I_n f(x)` for samples `f(x_k)`.
    pub fn interpolate(&self, samples: &[f64], x: f64) -> f64 {
        let mut l = vec![0.0; self.rule.n];
        self.fundamentals(x, &mut l);
        l.iter().zip(samples).map(|(a, b)| a * b).sum()
    }

    /// `Σ_k |l_k(x)|`.
    pub fn lebesgue_function(&self, x: f64) -> f64 {
        let mut l = vec![0.0; self.rule.n];
        self.fundamentals(x, &mut l);
        l.iter().map(|v| v.abs()).sum()
    }
}

/// One-variable Lagrange interpolant `I_n f(x)` on the zeros of `p_n`.
pub fn lagrange1d(rule: &QuadRule1D, samples: &[f64], x: f64) -> Result<f64> {
    if samples.len() != rule.n {
        return Err(Error::Input(format!(
            "expected {} samples, got {}",
            rule.n,
            samples.len()
        )));
    }
    Ok(Lagrange1d::new(rule).interpolate(samples, x))
}

/// Default 1-D scan resolution: `max(8n, 1024)` Chebyshev points.
pub fn default_grid_1d(n: usize) -> usize {
    (8 * n).max(1024)
}

/// Result of a one-variable Lebesgue scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lebesgue1dEstimate {
    pub value: f64,
    pub argmax: f64,
}

/// `max_x Λ_n^{(i,j)}(x)` with
/// `Λ_n^{(i,j)}(x) = Σ_k λ_k |k_n^{(α,β),i,j}(x, x_k)|`, where
/// `k_n^{(α,β),i,j}(x,y) = (1-x)^{i/2}(1+x)^{j/2}(1-y)^{i/2}(1+y)^{j/2} k_n^{(α+i,β+j)}(x,y)`.
pub fn lebesgue1d(params: JacobiParams, n: usize, i: u32, j: u32, grid_size: usize) -> Result<f64> {
    Ok(lebesgue1d_estimate(params, n, i, j, grid_size)?.value)
}

pub fn lebesgue1d_estimate(
    params: JacobiParams,
    n: usize,
    i: u32,
    j: u32,
    grid_size: usize,
) -> Result<Lebesgue1dEstimate> {
    if i > 1 || j > 1 {
        return Err(Error::Input(format!(
            "shift indices must be 0 or 1, got ({i}, {j})"
        )));
    }
    if grid_size < 8 * n {
        return Err(Error::Input(format!(
            "grid of {grid_size} points is below the 8n = {} resolution floor",
            8 * n
        )));
    }
    let rule = gauss_rule(params, n)?;
    let shifted = params.shifted(i, j);
    let rec = Recurrence::new(shifted, n + 1);
    let envelope =
        |x: f64| (1.0 - x).max(0.0).powf(0.5 * i as f64) * (1.0 + x).max(0.0).powf(0.5 * j as f64);
    let node_data: Vec<(f64, f64, f64, f64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&xk, &lk)| {
            let (pn, pn1) = rec.eval_pair(n, xk);
            (xk, lk * envelope(xk), pn, pn1)
        })
        .collect();
    let a_next = rec.off(n + 1);
    let lambda = |x: f64| {
        let (pnx, pn1x) = rec.eval_pair(n, x);
        let ex = envelope(x);
        node_data
            .iter()
            .map(|&(xk, wk, pn, pn1)| {
                let k = if is_confluent(x, xk) {
                    rec.kernel_direct(n, x, xk)
                } else {
                    cd_quotient(a_next, pnx, pn1x, pn, pn1, x, xk)
                };
                (wk * ex * k).abs()
            })
            .sum::<f64>()
    };

    let m = grid_size;
    let grid: Vec<f64> = (0..=m)
        .map(|t| (std::f64::consts::PI * t as f64 / m as f64).cos())
        .collect();
    let values: Vec<f64> = grid.par_iter().map(|&x| lambda(x)).collect();
    let mut best = 0;
    for (t, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = t;
        }
    }
    let lo = grid[(best + 1).min(m)];
    let hi = grid[best.saturating_sub(1)];
    let (x_ref, v_ref) = golden_section_max(lambda, lo, hi, 60);
    let est = if v_ref > values[best] {
        Lebesgue1dEstimate {
            value: v_ref,
            argmax: x_ref,
        }
    } else {
        Lebesgue1dEstimate {
            value: values[best],
            argmax: grid[best],
        }
    };
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_params() {
        assert!(JacobiParams::new(-1.0, 0.0).is_err());
        assert!(JacobiParams::new(0.0, f64::NAN).is_err());
        assert!(JacobiParams::new(-0.99, 3.0).is_ok());
    }

    #[test]
    fn classical_values() {
        let leg = JacobiParams::legendre();
        assert_eq!(eval_jacobi(leg, 0, 0.37), 1.0);
        assert_abs_diff_eq!(eval_jacobi(leg, 2, 0.0), -0.5, epsilon = 1e-15);
        let p11 = JacobiParams::new(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(eval_jacobi(p11, 3, 1.0), 4.0, epsilon = 1e-13);
        // P_1 closed form
        let p = JacobiParams::new(0.3, -0.6).unwrap();
        let x = 0.21;
        assert_abs_diff_eq!(
            eval_jacobi(p, 1, x),
            1.3 + 1.7 * (x - 1.0) / 2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn orthonormal_examples() {
        let leg = JacobiParams::legendre();
        for x in [-1.0, -0.3, 0.0, 0.8] {
            assert_eq!(eval_orthonormal(leg, 0, x), 1.0);
        }
        assert_relative_eq!(
            eval_orthonormal(leg, 1, 1.0),
            3f64.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn orthonormal_equals_scaled_classical() {
        for (a, b) in [
            (-0.5, -0.5),
            (0.0, 0.0),
            (0.5, -0.25),
            (1.3, 0.2),
            (-0.8, 2.5),
        ] {
            let p = JacobiParams::new(a, b).unwrap();
            for n in [0, 1, 2, 5, 17, 40] {
                let h = constants(p, n).unwrap().norm;
                for x in [-0.93, -0.1, 0.4, 0.999] {
                    let expected = eval_jacobi(p, n, x) / h.sqrt();
                    assert_relative_eq!(
                        eval_orthonormal(p, n, x),
                        expected,
                        max_relative = 1e-10,
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn constants_examples() {
        let leg = JacobiParams::legendre();
        let c1 = constants(leg, 1).unwrap();
        assert_relative_eq!(c1.cnorm, 0.5, max_relative = 1e-14);
        assert_relative_eq!(c1.lead, 1.0, max_relative = 1e-14);
        assert_relative_eq!(c1.norm, 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(
            JacobiParams::chebyshev().normalization(),
            1.0 / PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            JacobiParams::new(1.0, 1.0).unwrap().normalization(),
            0.75,
            max_relative = 1e-14
        );
    }

    #[test]
    fn constants_survive_large_degree() {
        for (a, b) in [(-0.5, -0.5), (3.0, 2.0), (-0.9, 4.5)] {
            let c = constants(JacobiParams::new(a, b).unwrap(), 512).unwrap();
            assert!(c.lead.is_finite() && c.norm.is_finite());
        }
    }

    #[test]
    fn leading_coefficient_matches_recurrence() {
        // l_n = lim P_n(x)/x^n; compare with a finite difference of order n
        // through the ratio P_n(x)/x^n at large x.
        let p = JacobiParams::new(0.7, -0.4).unwrap();
        for n in 1..8 {
            let l = constants(p, n).unwrap().lead;
            let x = 1e5;
            assert_relative_eq!(
                eval_jacobi(p, n, x) / x.powi(n as i32),
                l,
                max_relative = 1e-3
            );
        }
    }

    #[test]
    fn kernel_examples() {
        let leg = JacobiParams::legendre();
        assert_eq!(cd_kernel(leg, 0, 0.3, -0.7), 1.0);
        assert_relative_eq!(cd_kernel(leg, 1, 1.0, 1.0), 4.0, max_relative = 1e-14);
        let p = JacobiParams::new(0.5, -0.25).unwrap();
        assert_relative_eq!(
            cd_kernel(p, 7, 0.2, -0.6),
            cd_kernel(p, 7, -0.6, 0.2),
            max_relative = 1e-13
        );
    }

    #[test]
    fn kernel_branches_agree_near_threshold() {
        let p = JacobiParams::new(1.3, 0.2).unwrap();
        let rec = Recurrence::new(p, 21);
        for x in [-0.7, 0.1, 0.95] {
            for d in [2e-6, 5e-6, 1e-5, 1e-4] {
                let q = rec.kernel(20, x, x + d);
                let direct = rec.kernel_direct(20, x, x + d);
                assert_relative_eq!(q, direct, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn chebyshev_gauss_closed_form() {
        let rule = gauss_rule(JacobiParams::chebyshev(), 4).unwrap();
        for k in 0..4 {
            let expected = ((2 * k + 1) as f64 * PI / 8.0).cos();
            assert_abs_diff_eq!(rule.nodes[k], expected, epsilon = 1e-14);
            assert_abs_diff_eq!(rule.weights[k], 0.25, epsilon = 1e-14);
            assert_abs_diff_eq!(
                rule.thetas[k],
                (2 * k + 1) as f64 * PI / 8.0,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn two_point_legendre() {
        let rule = gauss_rule(JacobiParams::legendre(), 2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(rule.nodes[0], r, epsilon = 1e-15);
        assert_abs_diff_eq!(rule.nodes[1], -r, epsilon = 1e-15);
        assert_abs_diff_eq!(rule.weights[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rule.weights[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn gauss_rule_rejects_zero_nodes() {
        assert!(gauss_rule(JacobiParams::legendre(), 0).is_err());
    }

    #[test]
    fn weights_match_eigenvector_route() {
        for (a, b) in [(-0.5, -0.5), (0.0, 0.0), (1.3, 0.2), (-0.9, 0.4)] {
            let p = JacobiParams::new(a, b).unwrap();
            for n in [1, 3, 12, 40] {
                let rule = gauss_rule(p, n).unwrap();
                let (x, w) = gauss_weights_from_eigenvectors(p, n).unwrap();
                for k in 0..n {
                    assert_abs_diff_eq!(rule.nodes[k], x[k], epsilon = 1e-12);
                    assert_relative_eq!(rule.weights[k], w[k], max_relative = 1e-9);
                }
            }
        }
    }

    #[test]
    fn gauss_rule_invariants() {
        for (a, b) in [
            (-0.5, -0.5),
            (0.0, 0.0),
            (0.5, -0.25),
            (1.3, 0.2),
            (-0.9, 3.0),
        ] {
            let p = JacobiParams::new(a, b).unwrap();
            for n in [1, 2, 5, 16, 64] {
                let rule = gauss_rule(p, n).unwrap();
                let sum: f64 = rule.weights.iter().sum();
                assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
                for w in rule.nodes.windows(2) {
                    assert!(w[0] > w[1]);
                }
                for t in rule.thetas.windows(2) {
                    assert!(t[0] < t[1]);
                }
                let rec = Recurrence::new(p, n + 1);
                for (k, &x) in rule.nodes.iter().enumerate() {
                    assert!(x > -1.0 && x < 1.0);
                    assert!(
                        rec.eval(n, x).abs()
                            < 1e-11 * rec.eval_with_derivative(n, x).1.abs().max(1.0)
                    );
                    let kk = rec.kernel_direct(n, x, x);
                    assert_relative_eq!(rule.weights[k], 1.0 / kk, max_relative = 1e-10);
                }
                // P_j integrates to zero for 1 ≤ j ≤ 2n - 1
                for j in 1..2 * n {
                    let s = rule.integrate(|x| rec_eval(p, j, x));
                    assert_abs_diff_eq!(s, 0.0, epsilon = 1e-10);
                }
            }
        }
    }

    fn rec_eval(p: JacobiParams, j: usize, x: f64) -> f64 {
        Recurrence::new(p, j).eval(j, x)
    }

    #[test]
    fn hat_h_examples() {
        let leg = JacobiParams::legendre();
        // c_{0,0}/c_{1,1} = (1/2)/(3/4)
        assert_relative_eq!(hat_h(leg, 5, 2).unwrap(), 2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(hat_h(leg, 2, 1).unwrap(), 10.0 / 9.0, max_relative = 1e-14);
        assert!(hat_h(leg, 3, 3).is_err());
    }

    #[test]
    fn lagrange_delta_and_reproduction() {
        let p = JacobiParams::new(0.5, -0.25).unwrap();
        let rule = gauss_rule(p, 9).unwrap();
        let lag = Lagrange1d::new(&rule);
        let mut l = vec![0.0; 9];
        for (k, &x) in rule.nodes.iter().enumerate() {
            lag.fundamentals(x, &mut l);
            for (j, v) in l.iter().enumerate() {
                assert_abs_diff_eq!(*v, if j == k { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
        let samples: Vec<f64> = rule.nodes.iter().map(|x| x.powi(8)).collect();
        for x in [-0.99, -0.4, 0.13, 0.77] {
            assert_relative_eq!(
                lagrange1d(&rule, &samples, x).unwrap(),
                x.powi(8),
                max_relative = 1e-10,
                epsilon = 1e-12
            );
        }
        assert!(lagrange1d(&rule, &samples[..3], 0.0).is_err());
    }

    #[test]
    fn fundamental_derivatives_match_finite_differences() {
        let rule = gauss_rule(JacobiParams::new(0.2, 0.7).unwrap(), 6).unwrap();
        let lag = Lagrange1d::new(&rule);
        let (mut a, mut b, mut d) = (vec![0.0; 6], vec![0.0; 6], vec![0.0; 6]);
        let x = 0.31;
        let h = 1e-6;
        lag.fundamentals(x + h, &mut a);
        lag.fundamentals(x - h, &mut b);
        lag.fundamental_derivatives(x, &mut d);
        for k in 0..6 {
            assert_relative_eq!(
                d[k],
                (a[k] - b[k]) / (2.0 * h),
                max_relative = 1e-6,
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn lebesgue_single_node_is_one() {
        let v = lebesgue1d(JacobiParams::new(0.3, 0.1).unwrap(), 1, 0, 0, 1024).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn lebesgue_rejects_coarse_grid() {
        assert!(lebesgue1d(JacobiParams::legendre(), 200, 0, 0, 1000).is_err());
        assert!(lebesgue1d(JacobiParams::legendre(), 4, 2, 0, 1000).is_err());
    }
}
