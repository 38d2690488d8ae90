//! Small scalar root finding, minimization and differentiation helpers.

/// Bisection on a sign change of `f` in `[a, b]`. Returns `None` without a sign change.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    max_iter: usize,
) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return None;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || (b - a).abs() <= xtol {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Bisection on a boolean predicate with `pred(lo) != pred(hi)`; returns the final bracket.
pub fn bisect_predicate<F: FnMut(f64) -> bool>(
    mut pred: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
) -> (f64, f64) {
    let at_lo = pred(lo);
    while (hi - lo).abs() > xtol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if pred(mid) == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Brent's method for a minimum of `f` on `[a, b]`.
pub fn brent_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let mut x = a + GOLD * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..200 {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-15;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Evenly spaced grid including both endpoints.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

fn stencil(order: usize) -> &'static [(i32, f64)] {
    match order {
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        5 => &[
            (-3, -0.5),
            (-2, 2.0),
            (-1, -2.5),
            (1, 2.5),
            (2, -2.0),
            (3, 0.5),
        ],
        6 => &[
            (-3, 1.0),
            (-2, -6.0),
            (-1, 15.0),
            (0, -20.0),
            (1, 15.0),
            (2, -6.0),
            (3, 1.0),
        ],
        _ => panic!("no stencil for derivative order {order}"),
    }
}

/// Central-difference derivative of the given order at `x0`, Richardson-extrapolated over
/// `levels` successive step halvings.
pub fn richardson_derivative<F: Fn(f64) -> f64>(
    f: F,
    x0: f64,
    order: usize,
    h: f64,
    levels: usize,
) -> f64 {
    let st = stencil(order);
    let raw = |step: f64| -> f64 {
        st.iter()
            .map(|&(k, c)| c * f(x0 + k as f64 * step))
            .sum::<f64>()
            / step.powi(order as i32)
    };
    let mut table: Vec<f64> = (0..levels.max(1))
        .map(|i| raw(h / 2f64.powi(i as i32)))
        .collect();
    for j in 1..table.len() {
        let factor = 4f64.powi(j as i32);
        table = table
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
    }
    table[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_none());
    }

    #[test]
    fn brent_finds_quadratic_minimum() {
        let (x, fx) = brent_min(|x| (x - 0.3).powi(2) + 1.0, -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-8);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn richardson_polynomial_and_exp() {
        let d4 = richardson_derivative(|x| x.powi(6) + 3.0 * x.powi(4) - x, 0.0, 4, 0.2, 4);
        assert!((d4 - 72.0).abs() < 1e-7);
        let d3 = richardson_derivative(f64::exp, 0.5, 3, 0.2, 5);
        assert!((d3 - 0.5f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn predicate_bisection_bracket() {
        let (lo, hi) = bisect_predicate(|x| x < 0.7, 0.0, 1.0, 1e-10);
        assert!(lo < 0.7 && hi >= 0.7 && hi - lo <= 1e-10);
    }
}
