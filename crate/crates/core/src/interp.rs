//! Lagrange interpolation on the nodes of the Gaussian Ω rules and of the
//! minimal square rule, and Lebesgue-constant scans.

use rayon::prelude::*;
use serde::Serialize;

use crate::cubature::{CubatureRule, Gamma, WeightFamily};
use crate::error::{Error, Result};
use crate::geometry::{in_omega, omega_roots, sym_map, DomainTag, Point2};
use crate::jacobi::Recurrence;
use crate::jacobi::{
    default_grid_1d, gauss_rule, is_confluent, lebesgue1d, JacobiParams, Lagrange1d, QuadRule1D,
};
use crate::maximize::nelder_mead_max_2d;
use crate::orthopoly::KernelConsts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpKind {
    OmegaMinus,
    OmegaPlus,
    SquareStar,
}

/// Fundamental polynomials on Ω built from one-variable Lagrange polynomials.
#[derive(Debug, Clone)]
struct OmegaEval {
    lag: Lagrange1d,
    plus: bool,
    /// `(j, k)` 0-based per rule node.
    pairs: Vec<(usize, usize)>,
}

impl OmegaEval {
    fn new(rule: &CubatureRule) -> Result<Self> {
        let g = gauss_rule(rule.weight.params, rule.n)?;
        Ok(Self {
            lag: Lagrange1d::new(&g),
            plus: rule.weight.gamma == Gamma::PlusHalf,
            pairs: rule
                .orbit_index
                .iter()
                .map(|o| (o.j - 1, o.k - 1))
                .collect(),
        })
    }

    /// `ℓ_{j,k}` at the Ω point with roots `(x, y)`.
    fn fundamentals_xy(&self, x: f64, y: f64, out: &mut [f64]) {
        let n = self.lag.rule().n;
        let mut lx = vec![0.0; n];
        let mut ly = vec![0.0; n];
        if !self.plus {
            self.lag.fundamentals(x, &mut lx);
            self.lag.fundamentals(y, &mut ly);
            for (o, &(j, k)) in out.iter_mut().zip(&self.pairs) {
                let v = lx[j] * ly[k] + ly[j] * lx[k];
                *o = if j == k { 0.5 * v } else { v };
            }
            return;
        }
        let nodes = &self.lag.rule().nodes;
        if is_confluent(x, y) {
            let m = 0.5 * (x + y);
            let mut dl = vec![0.0; n];
            self.lag.fundamentals(m, &mut lx);
            self.lag.fundamental_derivatives(m, &mut dl);
            for (o, &(j, k)) in out.iter_mut().zip(&self.pairs) {
                *o = (nodes[j] - nodes[k]) * (dl[j] * lx[k] - lx[j] * dl[k]);
            }
        } else {
            self.lag.fundamentals(x, &mut lx);
            self.lag.fundamentals(y, &mut ly);
            for (o, &(j, k)) in out.iter_mut().zip(&self.pairs) {
                *o = (nodes[j] - nodes[k]) * (lx[j] * ly[k] - ly[j] * lx[k]) / (x - y);
            }
        }
    }
}

/// Per-family table `p_i(x_l)`, `0 ≤ i ≤ n`, at the Gauss nodes.
#[derive(Debug, Clone)]
struct NodeTable {
    rec: Recurrence,
    /// Row-major by node, `n + 1` values per row.
    table: Vec<f64>,
    width: usize,
}

impl NodeTable {
    fn new(params: JacobiParams, nodes: &[f64], n: usize) -> Self {
        let rec = Recurrence::new(params, n + 1);
        let width = n + 1;
        let mut table = vec![0.0; nodes.len() * width];
        for (l, &x) in nodes.iter().enumerate() {
            rec.fill(x, &mut table[l * width..(l + 1) * width]);
        }
        Self { rec, table, width }
    }

    fn row(&self, l: usize) -> &[f64] {
        &self.table[l * self.width..(l + 1) * self.width]
    }

    /// `k_m(a, x_l)` for every node `l`; zero for `m < 0`.
    fn kernels(&self, m: isize, a: f64, nodes: &[f64], pa: &mut [f64], out: &mut [f64]) {
        if m < 0 {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let m = m as usize;
        self.rec.fill(a, pa);
        let a_next = self.rec.off(m + 1);
        for (l, o) in out.iter_mut().enumerate() {
            let row = self.row(l);
            *o = if is_confluent(a, nodes[l]) {
                pa[..=m].iter().zip(&row[..=m]).map(|(x, y)| x * y).sum()
            } else {
                a_next * (pa[m + 1] * row[m] - pa[m] * row[m + 1]) / (a - nodes[l])
            };
        }
    }
}

/// Fast evaluator of `𝒦*_{2n}(P, node)` for all nodes of the square rule.
#[derive(Debug, Clone)]
struct SquareEval {
    n: usize,
    nodes_1d: Vec<f64>,
    ab: NodeTable,
    a1b1: NodeTable,
    ab1: NodeTable,
    a1b: NodeTable,
    consts: KernelConsts,
    q_coef: f64,
    /// Per rule node: `(j, k)` 0-based, prefactors `[x₁²-x₂², x₁+x₂, x₁-x₂]`,
    /// and `₂Q_{n-1,2n}(node)`.
    node_data: Vec<(usize, usize, [f64; 3], f64)>,
}

impl SquareEval {
    fn new(rule: &CubatureRule) -> Result<Self> {
        let params = rule.weight.params;
        let n = rule.n;
        let g = gauss_rule(params, n)?;
        let ab = NodeTable::new(params, &g.nodes, n);
        let a1b1 = NodeTable::new(params.shifted(1, 1), &g.nodes, n);
        let ab1 = NodeTable::new(params.shifted(0, 1), &g.nodes, n);
        let a1b = NodeTable::new(params.shifted(1, 0), &g.nodes, n);
        let consts = KernelConsts::new(params, n);
        let sd = consts.d11.sqrt();
        let node_data = rule
            .nodes
            .iter()
            .zip(&rule.orbit_index)
            .map(|(p, o)| {
                let (j, k) = (o.j - 1, o.k - 1);
                let f = [p.a * p.a - p.b * p.b, p.a + p.b, p.a - p.b];
                let q = sd * f[0] * a1b1.row(j)[n - 1] * a1b1.row(k)[n - 1];
                (j, k, f, q)
            })
            .collect();
        let s = 1.0 + params.alpha() + params.beta();
        let nf = n as f64;
        Ok(Self {
            n,
            nodes_1d: g.nodes,
            ab,
            a1b1,
            ab1,
            a1b,
            q_coef: nf * (s + nf) / ((s + 2.0 * nf) * (s + 2.0 * nf)),
            consts,
            node_data,
        })
    }

    /// Writes `𝒦*_{2n}(P, node_i)` for every rule node into `out`.
    fn kernel_row(&self, p: Point2, out: &mut [f64]) {
        let n = self.n;
        let ni = n as isize;
        let (x1, x2) = (p.a, p.b);
        let f = [x1 * x1 - x2 * x2, x1 + x2, x1 - x2];
        let (a1, a2) = crate::geometry::half_angle_args(x1, x2);
        let mut pa = vec![0.0; n + 2];
        let mut buf = |t: &NodeTable, m: isize| {
            let mut k1 = vec![0.0; n];
            let mut k2 = vec![0.0; n];
            t.kernels(m, a1, &self.nodes_1d, &mut pa, &mut k1);
            t.kernels(m, a2, &self.nodes_1d, &mut pa, &mut k2);
            (k1, k2)
        };
        let kab = buf(&self.ab, ni - 1);
        let klo = buf(&self.a1b1, ni - 2);
        let khi = buf(&self.a1b1, ni - 1);
        let kab1 = buf(&self.ab1, ni - 1);
        let ka1b = buf(&self.a1b, ni - 1);
        let pair = |k: &(Vec<f64>, Vec<f64>), j: usize, l: usize| {
            0.5 * (k.0[j] * k.1[l] + k.0[l] * k.1[j])
        };
        let c = &self.consts;
        let b0 = c.b0;
        let qp =
            c.d11.sqrt() * f[0] * self.a1b1.rec.eval(n - 1, a1) * self.a1b1.rec.eval(n - 1, a2);
        for (o, &(j, k, g, qn)) in out.iter_mut().zip(&self.node_data) {
            let lo = pair(&klo, j, k);
            let hi = pair(&khi, j, k);
            *o = pair(&kab, j, k)
                + c.d11 * f[0] * g[0] * (lo + b0 * (hi - lo))
                + c.d01 * f[1] * g[1] * pair(&kab1, j, k)
                + c.d10 * f[2] * g[2] * pair(&ka1b, j, k)
                - self.q_coef * qp * qn;
        }
    }
}

#[derive(Debug, Clone)]
enum Evaluator {
    Omega(Box<OmegaEval>),
    Square(Box<SquareEval>),
}

/// A Lagrange interpolant: rule nodes, sampled values and an evaluator for
/// the fundamental polynomials.
#[derive(Debug, Clone)]
pub struct Interpolant {
    rule: CubatureRule,
    samples: Vec<f64>,
    kind: InterpKind,
    eval: Evaluator,
}

fn check_samples(rule: &CubatureRule, samples: &[f64]) -> Result<()> {
    if samples.len() != rule.len() {
        return Err(Error::Input(format!(
            "expected {} samples, got {}",
            rule.len(),
            samples.len()
        )));
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: i });
    }
    Ok(())
}

/// Interpolant on the nodes of a Gaussian Ω rule (either `γ`).
pub fn interpolate_omega(rule: &CubatureRule, samples: &[f64]) -> Result<Interpolant> {
    if rule.weight.family != WeightFamily::WOmega {
        return Err(Error::Contract(format!(
            "Omega interpolation needs an Omega rule, got {:?}",
            rule.weight.family
        )));
    }
    check_samples(rule, samples)?;
    let kind = match rule.weight.gamma {
        Gamma::MinusHalf => InterpKind::OmegaMinus,
        Gamma::PlusHalf => InterpKind::OmegaPlus,
    };
    Ok(Interpolant {
        rule: rule.clone(),
        samples: samples.to_vec(),
        kind,
        eval: Evaluator::Omega(Box::new(OmegaEval::new(rule)?)),
    })
}

/// Interpolant on the nodes of the `γ = -1/2` minimal square rule.
pub fn interpolate_square(rule: &CubatureRule, samples: &[f64]) -> Result<Interpolant> {
    if rule.weight.family != WeightFamily::CwSquare || rule.weight.gamma != Gamma::MinusHalf {
        return Err(Error::Contract(format!(
            "square interpolation needs the gamma=-1/2 square rule, got {:?} with gamma={}",
            rule.weight.family,
            rule.weight.gamma.value()
        )));
    }
    check_samples(rule, samples)?;
    Ok(Interpolant {
        rule: rule.clone(),
        samples: samples.to_vec(),
        kind: InterpKind::SquareStar,
        eval: Evaluator::Square(Box::new(SquareEval::new(rule)?)),
    })
}

/// Samples `f` at the nodes and builds the matching interpolant.
pub fn interpolate_fn<F: Fn(f64, f64) -> f64>(rule: &CubatureRule, f: F) -> Result<Interpolant> {
    let samples: Vec<f64> = rule.nodes.iter().map(|p| f(p.a, p.b)).collect();
    interpolate(rule, &samples)
}

/// Interpolant of node values on Ω or the square.
pub fn interpolate(rule: &CubatureRule, samples: &[f64]) -> Result<Interpolant> {
    match rule.domain {
        DomainTag::Omega => interpolate_omega(rule, samples),
        DomainTag::Square => interpolate_square(rule, samples),
        d => Err(Error::Contract(format!("no interpolant on {d}"))),
    }
}

impl Interpolant {
    pub fn rule(&self) -> &CubatureRule {
        &self.rule
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn kind(&self) -> InterpKind {
        self.kind
    }

    /// Writes every fundamental polynomial at `p` into `out`.
    pub fn fundamentals(&self, p: Point2, out: &mut [f64]) -> Result<()> {
        match &self.eval {
            Evaluator::Omega(e) => {
                if !in_omega(p) {
                    return Err(Error::Domain(format!(
                        "({}, {}) lies outside Omega",
                        p.a, p.b
                    )));
                }
                let (x, y) = omega_roots(p.a, p.b)?;
                e.fundamentals_xy(x, y, out);
            }
            Evaluator::Square(e) => {
                e.kernel_row(p, out);
                for (o, w) in out.iter_mut().zip(&self.rule.weights) {
                    *o *= w;
                }
            }
        }
        Ok(())
    }

    /// Fundamental polynomials as a fresh vector.
    pub fn fundamentals_vec(&self, p: Point2) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.rule.len()];
        self.fundamentals(p, &mut out)?;
        Ok(out)
    }

    /// `L f(p)`.
    pub fn eval(&self, p: Point2) -> Result<f64> {
        let l = self.fundamentals_vec(p)?;
        Ok(l.iter().zip(&self.samples).map(|(a, b)| a * b).sum())
    }

    /// `Σ |ℓ_i(p)|`.
    pub fn lebesgue_function(&self, p: Point2) -> Result<f64> {
        Ok(self.fundamentals_vec(p)?.iter().map(|v| v.abs()).sum())
    }

    /// `𝒦*_{2n}(p, node_i)` for every node; square interpolants only.
    pub fn kernel_row(&self, p: Point2) -> Result<Vec<f64>> {
        match &self.eval {
            Evaluator::Square(e) => {
                let mut out = vec![0.0; self.rule.len()];
                e.kernel_row(p, &mut out);
                Ok(out)
            }
            Evaluator::Omega(_) => Err(Error::Contract(
                "kernel rows exist for square interpolants only".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LebesgueEstimate {
    pub n: usize,
    /// Points per axis of the tensor Chebyshev grid.
    pub grid: usize,
    pub value: f64,
    pub argmax: Point2,
}

/// Default square scan: `max(8n, 128)` points per axis.
pub fn default_grid_2d(n: usize) -> usize {
    (8 * n).max(128)
}

/// Points `-cos(π i / (m-1))`, increasing.
fn chebyshev_axis(m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| -(std::f64::consts::PI * i as f64 / (m - 1) as f64).cos())
        .collect()
}

/// Maximizes `f` on a tensor grid of `[-1,1]²` and refines with Nelder–Mead.
/// Grid values are collected in order; ties go to the lexicographically
/// smallest point.
fn scan_square<F: Fn(f64, f64) -> f64 + Sync>(f: F, m: usize) -> (Point2, f64) {
    let axis = chebyshev_axis(m);
    let values: Vec<f64> = (0..m * m)
        .into_par_iter()
        .map(|idx| f(axis[idx / m], axis[idx % m]))
        .collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    let (bi, bj) = (best / m, best % m);
    let step = |i: usize| {
        let lo = axis[i.saturating_sub(1)];
        let hi = axis[(i + 1).min(m - 1)];
        0.5 * (hi - lo).max(1e-6)
    };
    let start = (axis[bi], axis[bj]);
    let ((x, y), v) = nelder_mead_max_2d(&f, start, step(bi).min(step(bj)), -1.0, 1.0, 200);
    if v > values[best] {
        (Point2::new(x, y), v)
    } else {
        (Point2::new(start.0, start.1), values[best])
    }
}

/// Lebesgue constant of the square interpolant, full four-orbit sum.
pub fn lebesgue_square(params: JacobiParams, n: usize, grid: usize) -> Result<LebesgueEstimate> {
    if grid < 8 * n {
        return Err(Error::Input(format!(
            "grid of {grid} points per axis is below 8n = {}",
            8 * n
        )));
    }
    let rule = crate::cubature::minimal_rule_square(params, Gamma::MinusHalf, n)?;
    let e = SquareEval::new(&rule)?;
    let w = rule.weights.clone();
    let f = |x: f64, y: f64| {
        let mut row = vec![0.0; w.len()];
        e.kernel_row(Point2::new(x, y), &mut row);
        row.iter().zip(&w).map(|(k, w)| (k * w).abs()).sum::<f64>()
    };
    let (argmax, value) = scan_square(f, grid);
    Ok(LebesgueEstimate {
        n,
        grid,
        value,
        argmax,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaLebesgue {
    pub estimate: LebesgueEstimate,
    /// `‖I_n‖²` of the one-variable interpolant on the same Gauss nodes.
    pub one_d_bound: f64,
}

/// Lebesgue constant of the Ω interpolant, scanned over `(x, y) ∈ [-1,1]²`
/// through `(x, y) ↦ (x + y, xy)`.
pub fn lebesgue_omega(
    params: JacobiParams,
    gamma: Gamma,
    n: usize,
    grid: usize,
) -> Result<OmegaLebesgue> {
    if grid < 8 * n {
        return Err(Error::Input(format!(
            "grid of {grid} points per axis is below 8n = {}",
            8 * n
        )));
    }
    let rule = crate::cubature::gauss_rule_omega(params, gamma, n)?;
    let e = OmegaEval::new(&rule)?;
    let len = rule.len();
    let f = |x: f64, y: f64| {
        let mut out = vec![0.0; len];
        let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
        e.fundamentals_xy(hi, lo, &mut out);
        out.iter().map(|v| v.abs()).sum::<f64>()
    };
    let (arg, value) = scan_square(f, grid);
    let i_n = lebesgue1d(params, n, 0, 0, default_grid_1d(n))?;
    Ok(OmegaLebesgue {
        estimate: LebesgueEstimate {
            n,
            grid,
            value,
            argmax: sym_map(arg.a, arg.b),
        },
        one_d_bound: i_n * i_n,
    })
}

/// One-variable Lebesgue constant `max Σ |l_k|` of the Gauss nodes.
pub fn lebesgue_1d_lagrange(rule: &QuadRule1D) -> Result<f64> {
    lebesgue1d(rule.params, rule.n, 0, 0, default_grid_1d(rule.n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    pub max_abs: f64,
    pub mean_abs: f64,
    pub points: usize,
}

/// Errors `|L f - f|` on a uniform `m × m` parameter grid: the square itself,
/// or `(x, y) ↦ (x + y, xy)` with `x ≥ y` for Ω.
pub fn error_report<F: Fn(f64, f64) -> f64 + Sync>(
    interp: &Interpolant,
    f: F,
    m: usize,
) -> Result<ErrorReport> {
    if m < 2 {
        return Err(Error::Input(
            "error grid needs at least 2 points per axis".into(),
        ));
    }
    let axis: Vec<f64> = (0..m)
        .map(|i| -1.0 + 2.0 * i as f64 / (m - 1) as f64)
        .collect();
    let mut pts = Vec::with_capacity(m * m);
    for &x in &axis {
        for &y in &axis {
            match interp.rule.domain {
                DomainTag::Omega if x >= y => pts.push(sym_map(x, y)),
                DomainTag::Omega => {}
                _ => pts.push(Point2::new(x, y)),
            }
        }
    }
    let errs: Vec<Result<f64>> = pts
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let fv = f(p.a, p.b);
            if !fv.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            Ok((interp.eval(*p)? - fv).abs())
        })
        .collect();
    let errs: Vec<f64> = errs.into_iter().collect::<Result<_>>()?;
    let max_abs = errs.iter().cloned().fold(0.0, f64::max);
    let mean_abs = errs.iter().sum::<f64>() / errs.len() as f64;
    Ok(ErrorReport {
        max_abs,
        mean_abs,
        points: errs.len(),
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Some(sxy / sxx)
}
