//! Bracketing root finders.

/// Root of a monotone function on `[lo, hi]` by bisection.
///
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them be zero).
/// Iterates until the residual is at most `tol` and the bracket can no
/// longer shrink, or `max_iter` halvings have been done. Bisecting past the
/// residual tolerance costs a few extra evaluations and buys accuracy in the
/// root itself, which matters when `f` is flat.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> f64 {
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return hi;
    }
    let lo_negative = f_lo < 0.0;
    let mut best = (0.5 * (lo + hi), f64::INFINITY);
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm.abs() < best.1 {
            best = (mid, fm.abs());
        }
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
        if best.1 <= tol && hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    if best.1 <= tol {
        best.0
    } else {
        0.5 * (lo + hi)
    }
}
