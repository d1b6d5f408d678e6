use mincub::cubature::{
    gauss_rule_omega, gauss_rule_star, minimal_rule_rhombus, minimal_rule_square,
};
use mincub::geometry::{quad_map, rotate_to_square, star_to_omega, sym_map};
use mincub::jacobi::{eval_jacobi, gauss_rule, Recurrence};
use mincub::oracle::ReferenceIntegrator;
use mincub::orthopoly::{
    eval_basis_omega, eval_basis_square, kernel, kernel_square_star, kernel_square_star_bform,
    BasisFamily, BasisId, KernelKind, KernelSpec,
};
use mincub::{Gamma, JacobiParams, Point2, WeightFamily, WeightSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PARAMS: [(f64, f64); 4] = [(-0.5, -0.5), (0.0, 0.0), (0.5, -0.25), (1.3, 0.2)];

fn jp(a: f64, b: f64) -> JacobiParams {
    JacobiParams::new(a, b).unwrap()
}

fn omega_point(rng: &mut ChaCha8Rng) -> Point2 {
    sym_map(rng.random_range(-0.95..0.95), rng.random_range(-0.95..0.95))
}

fn square_point(rng: &mut ChaCha8Rng) -> Point2 {
    Point2::new(rng.random_range(-0.95..0.95), rng.random_range(-0.95..0.95))
}

#[test]
fn q2_values_at_first_branch_nodes() {
    for (a, b) in PARAMS {
        let p = jp(a, b);
        let p11 = p.shifted(1, 1);
        let rec = Recurrence::new(p11, 8);
        let gamma_ab = p11.normalization() / (std::f64::consts::SQRT_2 * p.normalization());
        for n in 1..=6 {
            let x = gauss_rule(p, n).unwrap().nodes;
            let rule = minimal_rule_square(p, Gamma::MinusHalf, n).unwrap();
            for (node, o) in rule
                .nodes
                .iter()
                .zip(&rule.orbit_index)
                .filter(|(_, o)| o.branch == 1)
            {
                let (xj, xk) = (x[o.j - 1], x[o.k - 1]);
                for m in 0..n {
                    let id = BasisId::new(BasisFamily::Q2Even, m, n).unwrap();
                    let got = eval_basis_square(id, p, node.a, node.b).unwrap();
                    let top = if m + 1 == n {
                        std::f64::consts::FRAC_1_SQRT_2
                    } else {
                        1.0
                    };
                    let want = top
                        * gamma_ab
                        * (1.0 - xj * xj).sqrt()
                        * (1.0 - xk * xk).sqrt()
                        * (rec.eval(n - 1, xk) * rec.eval(m, xj)
                            + rec.eval(n - 1, xj) * rec.eval(m, xk));
                    assert!(
                        (got - want).abs() < 1e-11 * (1.0 + want.abs()),
                        "n={n} m={m} {got} {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn q2_sign_pattern_over_an_orbit() {
    let p = jp(0.5, -0.25);
    for n in 1..=6 {
        let rule = minimal_rule_square(p, Gamma::MinusHalf, n).unwrap();
        for orbit in rule.nodes.chunks(4) {
            for m in 0..n {
                let id = BasisId::new(BasisFamily::Q2Even, m, n).unwrap();
                let q: Vec<f64> = orbit
                    .iter()
                    .map(|v| eval_basis_square(id, p, v.a, v.b).unwrap())
                    .collect();
                let tol = 1e-12 * (1.0 + q[0].abs());
                assert!(
                    (q[0] + q[1]).abs() < tol
                        && (q[0] - q[2]).abs() < tol
                        && (q[0] + q[3]).abs() < tol,
                    "{q:?}"
                );
            }
        }
    }
}

#[test]
fn shifted_jacobi_relation_at_zeros() {
    for (a, b) in PARAMS {
        let p = jp(a, b);
        for n in 1..=20 {
            let nf = n as f64;
            let d = 4.0 * (nf + a) * (nf + b) / ((2.0 * nf + a + b) * (nf + a + b + 1.0));
            for x in gauss_rule(p, n).unwrap().nodes {
                let lhs = (1.0 - x * x) * eval_jacobi(p.shifted(1, 1), n - 1, x);
                let rhs = d * eval_jacobi(p, n - 1, x);
                assert!(
                    (lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()),
                    "n={n} x={x}: {lhs} vs {rhs}"
                );
            }
        }
    }
}

fn check_reproduces(
    weight: WeightSpec,
    spec: &KernelSpec,
    degree: usize,
    points: &[Point2],
    eval: impl Fn(&KernelSpec, Point2, Point2) -> f64,
) {
    let oracle = ReferenceIntegrator::for_degree(weight, 2 * degree + 2).unwrap();
    for &x in points {
        for d in 0..=degree {
            for e in 0..=d {
                let mono = |p: f64, q: f64| p.powi((d - e) as i32) * q.powi(e as i32);
                let got = oracle.integrate(|p, q| eval(spec, x, Point2::new(p, q)) * mono(p, q));
                let want = mono(x.a, x.b);
                assert!(
                    (got - want).abs() < 1e-9 * (1.0 + want.abs()),
                    "{:?} n={} at {x:?}, monomial ({},{}): {got} vs {want}",
                    spec.kind,
                    spec.n,
                    d - e,
                    e
                );
            }
        }
    }
}

#[test]
fn omega_kernels_reproduce() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (a, b) in PARAMS {
        let p = jp(a, b);
        let pts: Vec<Point2> = (0..3).map(|_| omega_point(&mut rng)).collect();
        for n in [1, 3, 5] {
            for (kind, g) in [
                (KernelKind::KMinus, Gamma::MinusHalf),
                (KernelKind::KPlus, Gamma::PlusHalf),
            ] {
                let w = WeightSpec::new(WeightFamily::WOmega, p, g).unwrap();
                let spec = KernelSpec::new(kind, p, n).unwrap();
                check_reproduces(w, &spec, n, &pts, |s, x, y| kernel(s, x, y).unwrap());
            }
        }
    }
}

#[test]
fn square_odd_kernel_reproduces() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (a, b) in PARAMS {
        let p = jp(a, b);
        let w = WeightSpec::new(WeightFamily::CwSquare, p, Gamma::MinusHalf).unwrap();
        let pts: Vec<Point2> = (0..3).map(|_| square_point(&mut rng)).collect();
        for n in [1, 2, 3] {
            let spec = KernelSpec::new(KernelKind::CkOdd, p, n).unwrap();
            check_reproduces(w, &spec, 2 * n - 1, &pts, |s, x, y| {
                kernel(s, x, y).unwrap()
            });
        }
    }
}

#[test]
fn omega_kernels_match_basis_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (a, b) in PARAMS {
        let p = jp(a, b);
        for n in 0..=6 {
            for (kind, fam) in [
                (KernelKind::KMinus, BasisFamily::PMinus),
                (KernelKind::KPlus, BasisFamily::PPlus),
            ] {
                let spec = KernelSpec::new(kind, p, n).unwrap();
                for _ in 0..5 {
                    let (x, y) = (omega_point(&mut rng), omega_point(&mut rng));
                    let mut sum = 0.0;
                    for m in 0..=n {
                        for k in 0..=m {
                            let id = BasisId::new(fam, k, m).unwrap();
                            sum += eval_basis_omega(id, p, x.a, x.b).unwrap()
                                * eval_basis_omega(id, p, y.a, y.b).unwrap();
                        }
                    }
                    let got = kernel(&spec, x, y).unwrap();
                    assert!(
                        (got - sum).abs() < 1e-9 * (1.0 + sum.abs()),
                        "{kind:?} n={n}: {got} vs {sum}"
                    );
                    // diagonal goes through the confluent branch
                    let diag = kernel(&spec, x, x).unwrap();
                    let mut dsum = 0.0;
                    for m in 0..=n {
                        for k in 0..=m {
                            let id = BasisId::new(fam, k, m).unwrap();
                            dsum += eval_basis_omega(id, p, x.a, x.b).unwrap().powi(2);
                        }
                    }
                    assert!(
                        (diag - dsum).abs() < 1e-8 * (1.0 + dsum),
                        "{kind:?} n={n} diag: {diag} vs {dsum}"
                    );
                }
            }
        }
    }
}

#[test]
fn star_kernel_consolidated_and_coefficient_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for (a, b) in PARAMS {
        let p = jp(a, b);
        for n in 1..=8 {
            let spec = KernelSpec::new(KernelKind::CkStar, p, n).unwrap();
            for _ in 0..10 {
                let (x, y) = (square_point(&mut rng), square_point(&mut rng));
                let f = kernel_square_star(&spec, x, y).unwrap();
                let g = kernel_square_star_bform(&spec, x, y).unwrap();
                assert!((f - g).abs() < 1e-9 * (1.0 + g.abs()), "n={n}: {f} vs {g}");
            }
        }
    }
}

#[test]
fn rules_agree_across_domains() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for (a, b) in PARAMS {
        let p = jp(a, b);
        for g in [Gamma::MinusHalf, Gamma::PlusHalf] {
            let n = 5;
            let omega = gauss_rule_omega(p, g, n).unwrap();
            let star = gauss_rule_star(p, g, n).unwrap();
            let square = minimal_rule_square(p, g, n).unwrap();
            let rhombus = minimal_rule_rhombus(p, g, n).unwrap();
            let deg = omega.degree;
            let coef: Vec<f64> = (0..(deg + 1) * (deg + 2) / 2)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let f = |u: f64, v: f64| {
                let mut s = 0.0;
                let mut i = 0;
                for d in 0..=deg {
                    for e in 0..=d {
                        s += coef[i] * u.powi((d - e) as i32) * v.powi(e as i32);
                        i += 1;
                    }
                }
                s
            };
            let on_square = |x: f64, y: f64| {
                let q = quad_map(x, y);
                f(q.a, q.b)
            };
            let i_omega = omega.apply(f).unwrap();
            let i_star = star
                .apply(|s, t| {
                    let q = star_to_omega(s, t);
                    f(q.a, q.b)
                })
                .unwrap();
            let i_square = square.apply(on_square).unwrap();
            let i_rhombus = rhombus
                .apply(|u, v| {
                    let q = rotate_to_square(u, v);
                    on_square(q.a, q.b)
                })
                .unwrap();
            for v in [i_star, i_square, i_rhombus] {
                assert!(
                    (v - i_omega).abs() < 1e-11 * (1.0 + i_omega.abs()),
                    "{v} vs {i_omega}"
                );
            }
        }
    }
}
