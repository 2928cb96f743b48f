//! One-dimensional search routines.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Returns `(x_max, f_max)`. Stops once the bracket is narrower than `xtol`
/// or after `max_evals` evaluations.
pub fn golden_section_maximize(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    max_evals: usize,
) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;

    while evals < max_evals && (b - a).abs() > xtol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        evals += 1;
    }

    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Bisection for a sign change of `g` on `[a, b]`.
///
/// Returns `None` when `g(a)` and `g(b)` share a sign.
pub fn bisect_root(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, max_iter: usize) -> Option<f64> {
    let mut ga = g(a);
    let gb = g(b);
    if ga == 0.0 {
        return Some(a);
    }
    if gb == 0.0 {
        return Some(b);
    }
    if ga.signum() == gb.signum() {
        return None;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Some(mid);
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_section_maximize(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 1.0, 1e-10, 500);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bisect_cubic_root() {
        let r = bisect_root(|x| x * x * x - 2.0, 0.0, 2.0, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
        assert!(bisect_root(|x| x * x + 1.0, -1.0, 1.0, 10).is_none());
    }
}
