//! One-dimensional search primitives: bisection and golden-section.

use crate::error::{Result, TelicError};
use crate::scalar::Scalar;

/// Iteration cap for every bisection in the crate.
pub const MAX_BISECTION_ITERS: usize = 200;

/// Largest `t` in `[lo, hi]` with `feasible(t)`, assuming `feasible` is true at
/// `lo` and monotone (true then false).
///
/// Returns `hi` when `feasible(hi)` holds. Otherwise bisects until the bracket
/// is narrower than `tol`; the returned point is always feasible.
pub fn bisect_last_feasible<T, F>(lo: T, hi: T, tol: T, mut feasible: F) -> Result<T>
where
    T: Scalar,
    F: FnMut(T) -> bool,
{
    if feasible(hi) {
        return Ok(hi);
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..MAX_BISECTION_ITERS {
        if b - a <= tol {
            return Ok(a);
        }
        let mid = a + (b - a) * T::lit(0.5);
        if mid <= a || mid >= b {
            // bracket is at floating-point resolution
            return Ok(a);
        }
        if feasible(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    Err(TelicError::BisectionNonConvergence(MAX_BISECTION_ITERS))
}

/// Root of a continuous `f` on `[lo, hi]` where `f(lo)` and `f(hi)` have
/// opposite signs.
pub fn bisect_root<T, F>(mut lo: T, mut hi: T, tol: T, mut f: F) -> Result<T>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(TelicError::InvalidArgument(format!(
            "root not bracketed on [{lo}, {hi}]"
        )));
    }
    for _ in 0..MAX_BISECTION_ITERS {
        let mid = lo + (hi - lo) * T::lit(0.5);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(TelicError::BisectionNonConvergence(MAX_BISECTION_ITERS))
}

/// Golden-section maximization of `f` on `[a, b]` for a fixed number of
/// iterations. Returns `(argmax, max)` over all evaluated points, endpoints
/// included.
pub fn golden_section_max<T, F>(a: T, b: T, iterations: usize, mut f: F) -> (T, T)
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }

    for _ in 0..iterations {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Evenly spaced points from `lo` to `hi` inclusive.
///
/// Weights are computed from both ends, so a range symmetric about zero gives
/// exactly mirrored points.
pub fn linspace<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let m = T::from_usize_lossy(n - 1);
            (0..n)
                .map(|i| {
                    let t = T::from_usize_lossy(i) / m;
                    let s = T::from_usize_lossy(n - 1 - i) / m;
                    lo * s + hi * t
                })
                .collect()
        }
    }
}

/// Weighted least-squares line fit. Returns `(intercept, slope)`.
pub fn weighted_linear_fit(x: &[f64], y: &[f64], w: &[f64]) -> Option<(f64, f64)> {
    let sw: f64 = w.iter().sum();
    if x.len() < 2 || sw <= 0.0 {
        return None;
    }
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..x.len() {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}
