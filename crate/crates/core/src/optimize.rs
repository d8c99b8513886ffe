//! Derivative-free one-dimensional maximization.

/// `(sqrt(5) - 1) / 2`
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Grid point of `[lo, hi]` (spacing `step`, both ends included) where `f` is largest.
pub fn scan_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n)
        .map(|i| {
            let x = if i == n { hi } else { lo + step * i as f64 };
            (x, f(x))
        })
        .fold((lo, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
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
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_section_max(|x| -f(x), lo, hi, tol);
    (x, -v)
}

/// Result of a two-parameter minimization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum2 {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

/// Coordinate descent with a golden-section line search per axis, started
/// from `(x, y)` with initial half-widths `(hx, hy)`. Stops when a full sweep
/// improves the objective by less than `tol`.
pub fn coordinate_descent_min<F: Fn(f64, f64) -> f64>(
    f: F,
    start: (f64, f64),
    half_width: (f64, f64),
    tol: f64,
) -> Minimum2 {
    let (mut x, mut y) = start;
    let (mut hx, mut hy) = half_width;
    let mut value = f(x, y);
    for _ in 0..200 {
        let (nx, _) = golden_section_min(|t| f(t, y), x - hx, x + hx, 1e-12);
        let (ny, nv) = golden_section_min(|t| f(nx, t), y - hy, y + hy, 1e-12);
        let gain = value - nv;
        if nv <= value {
            x = nx;
            y = ny;
            value = nv;
        }
        if gain.abs() < tol {
            break;
        }
        hx *= 0.5;
        hy *= 0.5;
    }
    Minimum2 { x, y, value }
}
