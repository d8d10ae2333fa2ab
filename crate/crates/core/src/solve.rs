//! Scalar search primitives: bracketing, threshold bisection and
//! golden-section maximisation.

/// Upper bound on bracket doublings/halvings before giving up.
pub(crate) const MAX_BRACKET_STEPS: usize = 2100;

/// Bisects `[lo, hi]`, where `pred(lo)` is false and `pred(hi)` is true, down to
/// `hi - lo <= rel_tol * hi` (or adjacent floats). Returns the final `hi`, so the
/// result always satisfies `pred`.
pub fn bisect_threshold<E>(
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    mut pred: impl FnMut(f64) -> Result<bool, E>,
) -> Result<f64, E> {
    debug_assert!(lo <= hi);
    for _ in 0..4096 {
        if hi - lo <= rel_tol * hi.abs() {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Finds a bracket `[lo, hi]` with `!pred(lo) && pred(hi)` for a predicate that
/// is monotone (false then true) on `(0, ∞)`, starting from `start > 0`.
///
/// `lo` may be `0.0` when `pred` holds all the way down to the smallest positive
/// float. Returns `Ok(None)` if no true point is found below `f64::MAX`.
pub fn bracket_positive<E>(start: f64, mut pred: impl FnMut(f64) -> Result<bool, E>) -> Result<Option<(f64, f64)>, E> {
    let mut x = start;
    if pred(x)? {
        for _ in 0..MAX_BRACKET_STEPS {
            let half = 0.5 * x;
            if half == 0.0 {
                return Ok(Some((0.0, x)));
            }
            if !pred(half)? {
                return Ok(Some((half, x)));
            }
            x = half;
        }
        Ok(Some((0.0, x)))
    } else {
        for _ in 0..MAX_BRACKET_STEPS {
            let dbl = 2.0 * x;
            if !dbl.is_finite() {
                return Ok(None);
            }
            if pred(dbl)? {
                return Ok(Some((x, dbl)));
            }
            x = dbl;
        }
        Ok(None)
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Stops once the interval is shorter than `tol * max(1, |b|)`. Returns the
/// best point seen together with its value.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        if (b - a) <= tol * b.abs().max(1.0) {
            break;
        }
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
    let candidates = [(a, f(a)), (c, fc), (d, fd), (b, f(b))];
    candidates.into_iter().fold(
        (a, f64::NEG_INFINITY),
        |best, cand| if cand.1 > best.1 { cand } else { best },
    )
}
