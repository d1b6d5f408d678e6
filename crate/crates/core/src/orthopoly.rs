//! Bivariate orthonormal polynomials and reproducing kernels.
//!
//! On Ω a point `(u, v)` is handled through the roots `x ≥ y` of
//! `z² - uz + v`; on the square a point `(x₁, x₂) = (cos θ₁, cos θ₂)` is
//! handled through its half-angle pair `(cos(θ₁-θ₂), cos(θ₁+θ₂))`, which is
//! the root pair of its image under `(x₁,x₂) ↦ (2x₁x₂, x₁²+x₂²-1)`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::geometry::{half_angle_args, in_omega, omega_roots, Point2};
use crate::jacobi::{is_confluent, JacobiParams, Recurrence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// Reproducing kernel of `Π_n` for `W_{α,β,-1/2}` on Ω.
    KMinus,
    /// Reproducing kernel of `Π_n` for `W_{α,β,+1/2}` on Ω.
    KPlus,
    /// Reproducing kernel of `Π_{2n-1}` for `𝒲_{α,β,-1/2}` on the square.
    CkOdd,
    /// Interpolation kernel of `Π*_{2n}` on the square.
    CkStar,
}

/// Constants shared by the square kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConsts {
    pub c: f64,
    pub c11: f64,
    pub c01: f64,
    pub c10: f64,
    /// `d^{(i,j)} = c²_{α+i,β+j} / c²_{α,β}`.
    pub d11: f64,
    pub d01: f64,
    pub d10: f64,
    /// `c_{α+1,β+1} / (√2 c_{α,β})`.
    pub gamma_ab: f64,
    /// `b_{k,n}`, `0 ≤ k ≤ n-1`.
    pub b: Vec<f64>,
    /// `(1+α+β+n)/(1+α+β+2n)`, the common value of `b_{k,n}` for `k ≤ n-2`.
    pub b0: f64,
}

impl KernelConsts {
    pub fn new(params: JacobiParams, n: usize) -> Self {
        let c = params.normalization();
        let c11 = params.shifted(1, 1).normalization();
        let c01 = params.shifted(0, 1).normalization();
        let c10 = params.shifted(1, 0).normalization();
        let s = 1.0 + params.alpha() + params.beta();
        let nf = n as f64;
        let b0 = (s + nf) / (s + 2.0 * nf);
        let b = (0..n)
            .map(|k| if k + 1 == n { b0 * b0 } else { b0 })
            .collect();
        Self {
            c,
            c11,
            c01,
            c10,
            d11: (c11 / c).powi(2),
            d01: (c01 / c).powi(2),
            d10: (c10 / c).powi(2),
            gamma_ab: c11 / (std::f64::consts::SQRT_2 * c),
            b,
            b0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub params: JacobiParams,
    pub n: usize,
    pub consts: KernelConsts,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, params: JacobiParams, n: usize) -> Result<Self> {
        if matches!(kind, KernelKind::CkOdd | KernelKind::CkStar) && n == 0 {
            return Err(Error::Input("square kernels need n ≥ 1".into()));
        }
        Ok(Self {
            kind,
            params,
            n,
            consts: KernelConsts::new(params, n),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisFamily {
    PMinus,
    PPlus,
    Q1Even,
    Q2Even,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisId {
    pub family: BasisFamily,
    pub k: usize,
    pub n: usize,
}

impl BasisId {
    pub fn new(family: BasisFamily, k: usize, n: usize) -> Result<Self> {
        let ok = match family {
            BasisFamily::PMinus | BasisFamily::PPlus | BasisFamily::Q1Even => k <= n,
            BasisFamily::Q2Even => n >= 1 && k < n,
        };
        if !ok {
            return Err(Error::Input(format!(
                "index k={k} out of range for {family:?} of degree index {n}"
            )));
        }
        Ok(Self { family, k, n })
    }
}

/// Symmetric basis element `P⁻_{k,n}` evaluated from its root pair, orthonormal
/// for the product measure.
fn p_minus(rec: &Recurrence, k: usize, n: usize, x: f64, y: f64) -> f64 {
    let (nx, ny) = (rec.eval(n, x), rec.eval(n, y));
    if k == n {
        return nx * ny;
    }
    let (kx, ky) = (rec.eval(k, x), rec.eval(k, y));
    FRAC_1_SQRT_2 * (nx * ky + kx * ny)
}

/// Antisymmetric basis element `P⁺_{k,n}` (divided difference), orthonormal
/// for `W_{+1/2}`.
fn p_plus(rec: &Recurrence, k: usize, n: usize, x: f64, y: f64) -> f64 {
    let sv = rec.params().variance().sqrt();
    if is_confluent(x, y) {
        let m = 0.5 * (x + y);
        let (a, da) = rec.eval_with_derivative(n + 1, m);
        let (b, db) = rec.eval_with_derivative(k, m);
        return sv * (da * b - a * db);
    }
    let num = rec.eval(n + 1, x) * rec.eval(k, y) - rec.eval(n + 1, y) * rec.eval(k, x);
    sv * num / (x - y)
}

fn roots_checked(u: f64, v: f64) -> Result<(f64, f64)> {
    if !in_omega(Point2::new(u, v)) {
        return Err(Error::Domain(format!("({u}, {v}) lies outside Omega")));
    }
    omega_roots(u, v)
}

/// `P⁻_{k,n}` or `P⁺_{k,n}` at `(u, v) ∈ Ω`.
pub fn eval_basis_omega(id: BasisId, params: JacobiParams, u: f64, v: f64) -> Result<f64> {
    let (x, y) = roots_checked(u, v)?;
    match id.family {
        BasisFamily::PMinus => Ok(p_minus(
            &Recurrence::new(params, id.n + 1),
            id.k,
            id.n,
            x,
            y,
        )),
        BasisFamily::PPlus => Ok(p_plus(&Recurrence::new(params, id.n + 2), id.k, id.n, x, y)),
        _ => Err(Error::Contract(format!(
            "{:?} is a square basis",
            id.family
        ))),
    }
}

/// `₁Q_{k,2n}` or `₂Q_{k,2n}` at `(x, y)` on the square, orthonormal for
/// `𝒲_{α,β,-1/2}`.
pub fn eval_basis_square(id: BasisId, params: JacobiParams, x: f64, y: f64) -> Result<f64> {
    let (a, b) = half_angle_args(x, y);
    match id.family {
        BasisFamily::Q1Even => Ok(p_minus(
            &Recurrence::new(params, id.n + 1),
            id.k,
            id.n,
            a,
            b,
        )),
        BasisFamily::Q2Even => {
            let p11 = params.shifted(1, 1);
            let sd = p11.normalization() / params.normalization();
            Ok(sd * (x * x - y * y) * p_minus(&Recurrence::new(p11, id.n), id.k, id.n - 1, a, b))
        }
        _ => Err(Error::Contract(format!(
            "{:?} is an Omega basis",
            id.family
        ))),
    }
}

/// `½[k_m(a₁,b₁)k_m(a₂,b₂) + k_m(a₁,b₂)k_m(a₂,b₁)]`; zero for `m < 0`.
fn pair_kernel(rec: &Recurrence, m: isize, (a1, a2): (f64, f64), (b1, b2): (f64, f64)) -> f64 {
    if m < 0 {
        return 0.0;
    }
    let m = m as usize;
    0.5 * (rec.kernel(m, a1, b1) * rec.kernel(m, a2, b2)
        + rec.kernel(m, a1, b2) * rec.kernel(m, a2, b1))
}

/// `σ² [k(a₁,b₁)k(a₂,b₂) - k(a₁,b₂)k(a₂,b₁)] / ((a₁-a₂)(b₁-b₂))` with `k = k_m`,
/// continued to the diagonals by differentiation.
fn pair_kernel_plus(rec: &Recurrence, m: usize, (a1, a2): (f64, f64), (b1, b2): (f64, f64)) -> f64 {
    let var = rec.params().variance();
    let k = |x: f64, y: f64| rec.kernel(m, x, y);
    let kx = |x: f64, y: f64| rec.kernel_dx(m, x, y);
    let ca = is_confluent(a1, a2);
    let cb = is_confluent(b1, b2);
    let v = match (ca, cb) {
        (false, false) => (k(a1, b1) * k(a2, b2) - k(a1, b2) * k(a2, b1)) / ((a1 - a2) * (b1 - b2)),
        (true, false) => {
            let a = 0.5 * (a1 + a2);
            (kx(a, b1) * k(a, b2) - kx(a, b2) * k(a, b1)) / (b1 - b2)
        }
        (false, true) => {
            let b = 0.5 * (b1 + b2);
            (kx(b, a1) * k(a2, b) - kx(b, a2) * k(a1, b)) / (a1 - a2)
        }
        (true, true) => {
            let a = 0.5 * (a1 + a2);
            let b = 0.5 * (b1 + b2);
            rec.kernel_dxdy(m, a, b) * k(a, b) - kx(a, b) * kx(b, a)
        }
    };
    var * v
}

/// `K⁻_n` or `K⁺_n` between two points of Ω.
pub fn kernel_omega(spec: &KernelSpec, p: Point2, q: Point2) -> Result<f64> {
    let xs = roots_checked(p.a, p.b)?;
    let ys = roots_checked(q.a, q.b)?;
    match spec.kind {
        KernelKind::KMinus => Ok(pair_kernel(
            &Recurrence::new(spec.params, spec.n + 1),
            spec.n as isize,
            xs,
            ys,
        )),
        KernelKind::KPlus => Ok(pair_kernel_plus(
            &Recurrence::new(spec.params, spec.n + 2),
            spec.n + 1,
            xs,
            ys,
        )),
        _ => Err(Error::Contract(format!(
            "{:?} is a square kernel",
            spec.kind
        ))),
    }
}

/// The four one-variable recurrences used by the square kernels.
#[derive(Debug, Clone)]
pub(crate) struct SquareRecurrences {
    pub ab: Recurrence,
    pub a1b1: Recurrence,
    pub ab1: Recurrence,
    pub a1b: Recurrence,
}

impl SquareRecurrences {
    pub(crate) fn new(params: JacobiParams, n: usize) -> Self {
        Self {
            ab: Recurrence::new(params, n + 1),
            a1b1: Recurrence::new(params.shifted(1, 1), n + 1),
            ab1: Recurrence::new(params.shifted(0, 1), n + 1),
            a1b: Recurrence::new(params.shifted(1, 0), n + 1),
        }
    }
}

/// Prefactors `(x₁²-x₂², x₁+x₂, x₁-x₂)` and the half-angle pair of a square point.
fn square_data(p: Point2) -> ([f64; 3], (f64, f64)) {
    let (x1, x2) = (p.a, p.b);
    (
        [x1 * x1 - x2 * x2, x1 + x2, x1 - x2],
        half_angle_args(x1, x2),
    )
}

fn ck_odd(spec: &KernelSpec, recs: &SquareRecurrences, p: Point2, q: Point2) -> f64 {
    let n = spec.n as isize;
    let c = &spec.consts;
    let (fp, sp) = square_data(p);
    let (fq, sq) = square_data(q);
    pair_kernel(&recs.ab, n - 1, sp, sq)
        + c.d11 * fp[0] * fq[0] * pair_kernel(&recs.a1b1, n - 2, sp, sq)
        + c.d01 * fp[1] * fq[1] * pair_kernel(&recs.ab1, n - 1, sp, sq)
        + c.d10 * fp[2] * fq[2] * pair_kernel(&recs.a1b, n - 1, sp, sq)
}

fn ck_star(spec: &KernelSpec, recs: &SquareRecurrences, p: Point2, q: Point2) -> f64 {
    let n = spec.n as isize;
    let c = &spec.consts;
    let (fp, sp) = square_data(p);
    let (fq, sq) = square_data(q);
    let b0 = c.b0;
    let lo = pair_kernel(&recs.a1b1, n - 2, sp, sq);
    let hi = pair_kernel(&recs.a1b1, n - 1, sp, sq);
    let q_p = q2_top(spec, recs, fp[0], sp);
    let q_q = q2_top(spec, recs, fq[0], sq);
    let nf = spec.n as f64;
    let s = 1.0 + spec.params.alpha() + spec.params.beta();
    pair_kernel(&recs.ab, n - 1, sp, sq)
        + c.d11 * fp[0] * fq[0] * (lo + b0 * (hi - lo))
        + c.d01 * fp[1] * fq[1] * pair_kernel(&recs.ab1, n - 1, sp, sq)
        + c.d10 * fp[2] * fq[2] * pair_kernel(&recs.a1b, n - 1, sp, sq)
        - nf * (s + nf) / ((s + 2.0 * nf) * (s + 2.0 * nf)) * q_p * q_q
}

/// `₂Q_{n-1,2n}` from precomputed prefactor and half-angle pair.
fn q2_top(spec: &KernelSpec, recs: &SquareRecurrences, diff_sq: f64, (a, b): (f64, f64)) -> f64 {
    let m = spec.n - 1;
    spec.consts.d11.sqrt() * diff_sq * recs.a1b1.eval(m, a) * recs.a1b1.eval(m, b)
}

fn require(spec: &KernelSpec, kind: KernelKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::Contract(format!(
            "expected a {kind:?} kernel, got {:?}",
            spec.kind
        )));
    }
    Ok(())
}

/// `𝒦_{2n-1}` between two points of the square.
pub fn kernel_square_odd(spec: &KernelSpec, p: Point2, q: Point2) -> Result<f64> {
    require(spec, KernelKind::CkOdd)?;
    Ok(ck_odd(
        spec,
        &SquareRecurrences::new(spec.params, spec.n),
        p,
        q,
    ))
}

/// `𝒦*_{2n}` between two points of the square, consolidated form.
pub fn kernel_square_star(spec: &KernelSpec, p: Point2, q: Point2) -> Result<f64> {
    require(spec, KernelKind::CkStar)?;
    Ok(ck_star(
        spec,
        &SquareRecurrences::new(spec.params, spec.n),
        p,
        q,
    ))
}

/// `𝒦*_{2n}` as `𝒦_{2n-1} + Σ b_{k,n} ₂Q_{k,2n}(p) ₂Q_{k,2n}(q)`. Slower; kept
/// to cross-check the consolidated form.
pub fn kernel_square_star_bform(spec: &KernelSpec, p: Point2, q: Point2) -> Result<f64> {
    require(spec, KernelKind::CkStar)?;
    let recs = SquareRecurrences::new(spec.params, spec.n);
    let mut v = ck_odd(spec, &recs, p, q);
    for (k, b) in spec.consts.b.iter().enumerate() {
        let id = BasisId::new(BasisFamily::Q2Even, k, spec.n)?;
        v += b
            * eval_basis_square(id, spec.params, p.a, p.b)?
            * eval_basis_square(id, spec.params, q.a, q.b)?;
    }
    Ok(v)
}

/// Dispatches on the kernel kind.
pub fn kernel(spec: &KernelSpec, p: Point2, q: Point2) -> Result<f64> {
    match spec.kind {
        KernelKind::KMinus | KernelKind::KPlus => kernel_omega(spec, p, q),
        KernelKind::CkOdd => kernel_square_odd(spec, p, q),
        KernelKind::CkStar => kernel_square_star(spec, p, q),
    }
}
