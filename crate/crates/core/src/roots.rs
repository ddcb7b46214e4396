//! One-dimensional minimisation and root isolation on `[lo, hi]`.

use crate::scalar::Scalar;

const SEEDS: usize = 64;
const MAX_ITERS: usize = 200;

/// Minimises a convex `f` on `[0, 1]`: seeds the interval at 65 points, then
/// refines around the best seed by golden-section search.
pub(crate) fn convex_min<S: Scalar>(f: impl Fn(S) -> S) -> (S, S) {
    let n = S::from_usize(SEEDS).unwrap();
    let mut best = (S::zero(), f(S::zero()));
    let mut best_i = 0;
    for i in 1..=SEEDS {
        let t = S::from_usize(i).unwrap() / n;
        let v = f(t);
        if v < best.1 {
            best = (t, v);
            best_i = i;
        }
    }
    let lo = S::from_usize(best_i.saturating_sub(1)).unwrap() / n;
    let hi = S::from_usize((best_i + 1).min(SEEDS)).unwrap() / n;
    let refined = golden(&f, lo, hi);
    if refined.1 < best.1 {
        refined
    } else {
        best
    }
}

fn golden<S: Scalar>(f: &impl Fn(S) -> S, mut a: S, mut b: S) -> (S, S) {
    let r = S::lit(0.618_033_988_749_894_8);
    let tol = S::lit(1e-13).max(S::noise(8.0));
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..MAX_ITERS {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Locates the switch point of a predicate that is false at `lo` and true at
/// `hi`, to within `1e-12` (or machine resolution). Returns the midpoint of
/// the final bracket.
pub(crate) fn bisect<S: Scalar>(mut lo: S, mut hi: S, pred: impl Fn(S) -> bool) -> S {
    let tol = S::lit(1e-12).max(S::noise(4.0));
    let two = S::lit(2.0);
    for _ in 0..MAX_ITERS {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / two
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimises_parabola() {
        let (t, v) = convex_min(|t: f64| (t - 0.3) * (t - 0.3) - 1.0);
        assert!((t - 0.3).abs() < 1e-6);
        assert!((v + 1.0).abs() < 1e-12);
    }

    #[test]
    fn minimises_at_boundary() {
        let (t, _) = convex_min(|t: f64| 2.0 * t);
        assert_eq!(t, 0.0);
        let (t, _) = convex_min(|t: f64| -t);
        assert_eq!(t, 1.0);
    }

    #[test]
    fn minimises_kink() {
        let (t, v) = convex_min(|t: f64| (t - 0.712).abs());
        assert!((t - 0.712).abs() < 1e-12);
        assert!(v < 1e-12);
    }

    #[test]
    fn bisects_threshold() {
        let t = bisect(0.0, 1.0, |t: f64| t >= 0.123_456);
        assert!((t - 0.123_456).abs() <= 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let (t, _) = convex_min(|t: f32| (t - 0.5).abs());
        assert!((t - 0.5).abs() < 1e-6);
        let t = bisect(0.0f32, 1.0, |t| t >= 0.25);
        assert!((t - 0.25).abs() < 1e-6);
    }
}
