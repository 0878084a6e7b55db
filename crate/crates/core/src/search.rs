//! Scalar search primitives: golden-section maximization and sign-change bisection.

/// `(sqrt(5) - 1) / 2`
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a golden-section search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenOutcome {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Shrinks the bracket until it is at most `width` wide, then returns the best
/// of the two interior probes and the bracket midpoint. `f` is evaluated once
/// per iteration after the first two probes.
pub fn golden_section_maximize<F>(mut f: F, mut lo: f64, mut hi: f64, width: f64) -> GoldenOutcome
where
    F: FnMut(f64) -> f64,
{
    debug_assert!(lo <= hi);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;

    while hi - lo > width {
        iterations += 1;
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        // bracket no longer shrinks in floating point
        if iterations > 200 {
            break;
        }
    }

    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    let (mut x, mut value) = (mid, fm);
    if f1 > value {
        x = x1;
        value = f1;
    }
    if f2 > value {
        x = x2;
        value = f2;
    }
    GoldenOutcome { x, value, iterations }
}

/// Bisection for the root of an increasing `f` with `f(lo) <= 0 <= f(hi)`.
///
/// Stops once the bracket is at most `width` wide or can no longer be split.
/// Returns the midpoint of the final bracket and the number of halvings.
pub fn bisect_increasing<F>(mut f: F, mut lo: f64, mut hi: f64, width: f64, max_iter: usize) -> (f64, usize)
where
    F: FnMut(f64) -> f64,
{
    let mut iterations = 0;
    while hi - lo > width && iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let value = f(mid);
        if value == 0.0 {
            return (mid, iterations);
        }
        if value < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), iterations)
}
