//! Small derivative-free maximizers used to polish grid maxima.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// Returns `(argmax, max)`. The endpoints are included as candidates, so the
/// result is never worse than the better endpoint.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Nelder–Mead maximization in two variables, with every trial point clamped
/// to the box `[lo, hi]²`.
pub fn nelder_mead_max_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    start: (f64, f64),
    step: f64,
    lo: f64,
    hi: f64,
    iters: usize,
) -> ((f64, f64), f64) {
    let clamp = |p: (f64, f64)| (p.0.clamp(lo, hi), p.1.clamp(lo, hi));
    let eval = |p: (f64, f64)| f(p.0, p.1);
    let mut simplex: Vec<((f64, f64), f64)> =
        [start, (start.0 + step, start.1), (start.0, start.1 + step)]
            .into_iter()
            .map(|p| {
                let p = clamp(p);
                (p, eval(p))
            })
            .collect();

    for _ in 0..iters {
        // best first
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let (best, worst) = (simplex[0], simplex[2]);
        let spread = (best.1 - worst.1).abs();
        let size = (best.0 .0 - worst.0 .0).abs() + (best.0 .1 - worst.0 .1).abs();
        if spread <= 1e-14 * best.1.abs().max(1.0) && size < 1e-12 {
            break;
        }
        let centroid = (
            0.5 * (simplex[0].0 .0 + simplex[1].0 .0),
            0.5 * (simplex[0].0 .1 + simplex[1].0 .1),
        );
        let towards = |t: f64| {
            clamp((
                centroid.0 + t * (worst.0 .0 - centroid.0),
                centroid.1 + t * (worst.0 .1 - centroid.1),
            ))
        };
        let reflected = towards(-1.0);
        let fr = eval(reflected);
        if fr > simplex[0].1 {
            let expanded = towards(-2.0);
            let fe = eval(expanded);
            simplex[2] = if fe > fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr > simplex[1].1 {
            simplex[2] = (reflected, fr);
        } else {
            let contracted = towards(0.5);
            let fc = eval(contracted);
            if fc > worst.1 {
                simplex[2] = (contracted, fc);
            } else {
                let b = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    let p = clamp((b.0 + 0.5 * (v.0 .0 - b.0), b.1 + 0.5 * (v.0 .1 - b.1)));
                    *v = (p, eval(p));
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    simplex[0]
}
