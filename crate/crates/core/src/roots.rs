//! Scalar root polishing used by the equilibrium and degeneracy solvers.

/// Safeguarded Newton iteration on a sign-change bracket `[a, b]`.
///
/// Takes a Newton step when it lands strictly inside the current bracket and
/// falls back to bisection otherwise, so convergence is guaranteed. Iterates
/// until the residual is exactly zero or the bracket collapses to a few ulps.
/// Pass `None` for `df` to run plain bisection.
pub fn bracketed_root<F, D>(f: F, df: Option<D>, mut a: f64, mut b: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    debug_assert!(fa * fb < 0.0, "no sign change on [{a}, {b}]");
    if a > b {
        std::mem::swap(&mut a, &mut b);
        fa = fb;
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..400 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let width = b - a;
        if width <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        let newton = df
            .as_ref()
            .map(|d| x - fx / d(x))
            .filter(|n| n.is_finite() && *n > a && *n < b);
        x = match newton {
            Some(n) if n != x => n,
            _ => 0.5 * (a + b),
        };
    }
    let (left, right) = (f(a).abs(), f(b).abs());
    let mid = f(x).abs();
    if mid <= left && mid <= right {
        x
    } else if left <= right {
        a
    } else {
        b
    }
}

/// Real roots of `a x^2 + b x + c` in ascending order, computed without
/// cancellation. Returns an empty vector for complex roots.
pub fn quadratic_real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + disc.sqrt().copysign(b));
    let (mut r1, mut r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }
    vec![r1, r2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_and_bisection_agree() {
        let f = |x: f64| x * x * x - 2.0 * x - 5.0;
        let d = |x: f64| 3.0 * x * x - 2.0;
        let n = bracketed_root(f, Some(d), 2.0, 3.0);
        let b = bracketed_root(f, None::<fn(f64) -> f64>, 2.0, 3.0);
        assert!((n - 2.0945514815423265).abs() < 1e-15);
        assert!((b - n).abs() < 1e-14);
    }

    #[test]
    fn reversed_bracket() {
        let r = bracketed_root(
            |x: f64| x.cos() - x,
            Some(|x: f64| -x.sin() - 1.0),
            1.0,
            0.0,
        );
        assert!((r - 0.7390851332151607).abs() < 1e-15);
    }

    #[test]
    fn quadratic_without_cancellation() {
        let r = quadratic_real_roots(1.0, -1e8, 1.0);
        assert!((r[0] - 1e-8).abs() < 1e-22);
        assert!((r[1] - 1e8).abs() < 1e-6);
        assert!(quadratic_real_roots(1.0, 0.0, 1.0).is_empty());
        assert_eq!(quadratic_real_roots(0.0, 2.0, -1.0), vec![0.5]);
    }
}
