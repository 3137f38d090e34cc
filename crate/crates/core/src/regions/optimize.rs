//! One-dimensional maximisation and root bracketing on bounded intervals.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on `[a, b]`, stopping once the
/// bracket is narrower than `tol`. Returns `(x, f(x))`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 >= f2 {
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
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximum of `f` on `[lo, hi]`: a coarse scan of `scan` cells locates the
/// best basin, golden-section search narrows it to `tol`, and endpoints are
/// compared explicitly.
pub fn maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, scan: usize, tol: f64) -> (f64, f64) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let cells = scan.max(2);
    let step = (hi - lo) / cells as f64;
    let mut best = (lo, f(lo));
    let mut best_i = 0;
    for i in 1..=cells {
        let x = if i == cells { hi } else { lo + step * i as f64 };
        let v = f(x);
        if v > best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let inner = golden_max(&f, a, b, tol);
    if inner.1 >= best.1 {
        inner
    } else {
        best
    }
}

/// Maximum of `f` on `[0, 1]` to `1e-10` in the argument, followed by three
/// Newton steps on a centred finite-difference derivative. A Newton step is
/// kept only if it stays in range and does not lower the objective.
pub fn maximize_unit<F: Fn(f64) -> f64>(f: F) -> (f64, f64) {
    let (mut x, mut fx) = maximize(&f, 0.0, 1.0, 64, 1e-10);
    let h = 1e-5;
    for _ in 0..3 {
        if x - h < 0.0 || x + h > 1.0 {
            break;
        }
        let (fm, fp) = (f(x - h), f(x + h));
        let d1 = (fp - fm) / (2.0 * h);
        let d2 = (fp - 2.0 * fx + fm) / (h * h);
        if !(d2 < 0.0) {
            break;
        }
        let step = -d1 / d2;
        if step.abs() > 1e-6 {
            break;
        }
        let xn = x + step;
        let fn_ = f(xn);
        if !(0.0..=1.0).contains(&xn) || fn_ < fx {
            break;
        }
        x = xn;
        fx = fn_;
    }
    (x, fx)
}

/// Smallest `x` in `[lo, hi]` with `pred(x)` true, for a predicate that is
/// monotone false-then-true. Returns `None` when `pred(hi)` is false.
pub fn bisect_first<P: Fn(f64) -> bool>(pred: P, mut lo: f64, mut hi: f64, iters: usize) -> Option<f64> {
    if pred(lo) {
        return Some(lo);
    }
    if !pred(hi) {
        return None;
    }
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Largest `x` in `[lo, hi]` with `pred(x)` true, for a predicate that is
/// monotone true-then-false. Returns `None` when `pred(lo)` is false.
pub fn bisect_last<P: Fn(f64) -> bool>(pred: P, mut lo: f64, mut hi: f64, iters: usize) -> Option<f64> {
    if !pred(lo) {
        return None;
    }
    if pred(hi) {
        return Some(hi);
    }
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-9);
        assert!(v.abs() < 1e-17);
    }

    #[test]
    fn maximize_prefers_global_basin() {
        let f = |x: f64| (12.0 * x).sin() + 0.5 * x;
        let (x, _) = maximize(f, 0.0, 1.0, 64, 1e-12);
        // Only one local maximum of sin(12x) lies in [0, 1] besides the boundary region.
        let dense = (0..=100_000)
            .map(|i| i as f64 / 1e5)
            .max_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap();
        assert!((x - dense).abs() < 1e-4);
    }

    #[test]
    fn maximize_unit_handles_endpoint_maximum() {
        let (x, v) = maximize_unit(|x| x);
        assert_eq!((x, v), (1.0, 1.0));
    }

    #[test]
    fn bisection_brackets() {
        let r = bisect_first(|x| x >= 0.25, 0.0, 1.0, 60).unwrap();
        assert!((r - 0.25).abs() < 1e-15);
        assert_eq!(bisect_first(|x| x > 2.0, 0.0, 1.0, 60), None);
        let r = bisect_last(|x| x <= 0.75, 0.0, 1.0, 60).unwrap();
        assert!((r - 0.75).abs() < 1e-15);
        assert_eq!(bisect_last(|x| x < -1.0, 0.0, 1.0, 60), None);
    }
}
