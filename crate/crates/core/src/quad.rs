//! Small quadrature helpers used by the beam and fluorescence models.

/// Adaptive Simpson integration of `f` over `[a, b]` to the requested
/// relative tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let scale = whole.abs().max(1e-300);
    recurse(&f, a, b, fa, fm, fb, whole, rel_tol * scale, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * abs_tol {
        left + right + delta / 15.0
    } else {
        recurse(f, a, m, fa, flm, fm, left, abs_tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, abs_tol / 2.0, depth - 1)
    }
}

/// Trapezoidal integration over tabulated points. Panics if lengths differ.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "trapezoid: mismatched lengths");
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_integrates_gaussian() {
        let v = adaptive_simpson(|x: f64| (-x * x).exp(), -8.0, 8.0, 1e-10);
        assert_relative_eq!(v, std::f64::consts::PI.sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn trapezoid_on_linear_is_exact() {
        let x = [0.0, 0.5, 2.0];
        let y = [1.0, 2.0, 5.0];
        assert_relative_eq!(trapezoid(&x, &y), 6.0, max_relative = 1e-14);
    }
}
