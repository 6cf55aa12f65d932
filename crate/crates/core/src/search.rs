//! One-dimensional optimum search: coarse grid scan followed by
//! golden-section refinement.

/// Result of a scalar maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub location: f64,
    pub value: f64,
    /// Set when the objective is flat over the scan range; the reported
    /// location is then the interval midpoint.
    pub degenerate: bool,
}

/// Evenly spaced grid with `steps` points including both endpoints.
pub fn grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    assert!(steps >= 2, "grid needs at least two points");
    let h = (max - min) / (steps - 1) as f64;
    (0..steps).map(|i| min + h * i as f64).collect()
}

/// Maximizes `f` on `[a, b]`: coarse scan to bracket the best grid point,
/// then golden-section down to `tol` in the argument.
pub fn golden_section_max(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Optimum {
    const COARSE: usize = 65;
    const PHI_COMP: f64 = 2.0 - 1.618_033_988_749_895; // 2 - φ

    let pts = grid(a, b, COARSE);
    let vals: Vec<f64> = pts.iter().map(|&x| f(x)).collect();
    let (mut best_i, mut best_v) = (0usize, f64::NEG_INFINITY);
    let mut min_v = f64::INFINITY;
    for (i, &v) in vals.iter().enumerate() {
        if v > best_v {
            best_v = v;
            best_i = i;
        }
        min_v = min_v.min(v);
    }
    if (best_v - min_v).abs() < 1e-13 * best_v.abs().max(1.0) {
        return Optimum {
            location: 0.5 * (a + b),
            value: best_v,
            degenerate: true,
        };
    }

    let mut lo = pts[best_i.saturating_sub(1)];
    let mut hi = pts[(best_i + 1).min(COARSE - 1)];
    let mut x1 = lo + PHI_COMP * (hi - lo);
    let mut x2 = hi - PHI_COMP * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + PHI_COMP * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - PHI_COMP * (hi - lo);
            f2 = f(x2);
        }
    }
    let location = 0.5 * (lo + hi);
    Optimum {
        location,
        value: f(location),
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_maximum() {
        let opt = golden_section_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-6);
        assert!((opt.location - 0.3).abs() < 1e-5);
        assert!(!opt.degenerate);
    }

    #[test]
    fn boundary_maximum() {
        let opt = golden_section_max(|x| -x, 0.0, 1.0, 1e-6);
        assert!(opt.location < 1e-3);
    }

    #[test]
    fn flat_function_reports_degenerate() {
        let opt = golden_section_max(|_| 1.0, 0.0, 1.0, 1e-6);
        assert!(opt.degenerate);
    }

    #[test]
    fn grid_endpoints() {
        let g = grid(0.0, 1.0, 101);
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert!((g[100] - 1.0).abs() < 1e-15);
        assert!((g[88] - 0.88).abs() < 1e-12);
    }
}
