//! Critical-point location for smooth scalar objectives: Newton iteration
//! seeded on a uniform grid, with bisection on bracketed sign changes as the
//! fallback for seeds Newton loses.

use crate::error::{Error, Result};

/// Curvature magnitude below which a critical point counts as degenerate.
const DEGENERACY_THRESHOLD: f64 = 1e-8;
/// Two roots closer than this collapse into one.
const DEDUP_TOLERANCE: f64 = 1e-9;
const NEWTON_MAX_STEPS: usize = 60;
const BISECTION_MAX_STEPS: usize = 200;

/// A stationary point of the objective together with the curvature there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub location: f64,
    /// Second derivative of the objective at `location`.
    pub curvature: f64,
}

/// Find all zeros of `df` inside `window`, reporting each with `d2f` at the
/// root, sorted by location. `seeds` Newton starts are placed uniformly over
/// the window; bracketed sign changes of `df` on a refined grid back them up,
/// so simple roots between grid points are not missed.
///
/// Errors with `DegenerateCriticalPoint` when a root has |d2f| below 1e-8.
pub fn find_critical_points(
    df: impl Fn(f64) -> f64,
    d2f: impl Fn(f64) -> f64,
    window: (f64, f64),
    seeds: usize,
) -> Result<Vec<CriticalPoint>> {
    let (a, b) = window;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidParameter(format!(
            "window must be a finite nonempty interval, got ({a}, {b})"
        )));
    }
    if seeds == 0 {
        return Err(Error::InvalidParameter("seed count must be positive".into()));
    }

    let mut roots: Vec<f64> = Vec::new();
    let span = b - a;

    // Newton from uniform seeds. Divergent seeds are simply dropped; the
    // bracketing pass below catches what they were aiming at.
    for i in 0..seeds {
        let seed = if seeds == 1 {
            0.5 * (a + b)
        } else {
            a + span * (i as f64) / ((seeds - 1) as f64)
        };
        if let Some(root) = newton(&df, &d2f, seed, (a, b)) {
            push_dedup(&mut roots, root);
        }
    }

    // Bisection on sign changes of df over a refined grid.
    let grid = (4 * seeds).max(64);
    let mut prev_x = a;
    let mut prev_v = df(a);
    for i in 1..=grid {
        let x = a + span * (i as f64) / (grid as f64);
        let v = df(x);
        if prev_v == 0.0 {
            push_dedup(&mut roots, prev_x);
        } else if prev_v * v < 0.0 {
            push_dedup(&mut roots, bisect(&df, prev_x, x));
        }
        prev_x = x;
        prev_v = v;
    }
    if prev_v == 0.0 {
        push_dedup(&mut roots, prev_x);
    }

    roots.retain(|&r| r >= a - DEDUP_TOLERANCE && r <= b + DEDUP_TOLERANCE);
    roots.sort_by(|p, q| p.partial_cmp(q).expect("roots are finite"));

    let mut out = Vec::with_capacity(roots.len());
    for r in roots {
        let curvature = d2f(r);
        if curvature.abs() < DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateCriticalPoint {
                location: r,
                curvature,
            });
        }
        out.push(CriticalPoint {
            location: r,
            curvature,
        });
    }
    Ok(out)
}

fn push_dedup(roots: &mut Vec<f64>, root: f64) {
    if roots.iter().all(|&r| (r - root).abs() > DEDUP_TOLERANCE) {
        roots.push(root);
    }
}

fn newton(
    df: &impl Fn(f64) -> f64,
    d2f: &impl Fn(f64) -> f64,
    seed: f64,
    (a, b): (f64, f64),
) -> Option<f64> {
    let span = b - a;
    let mut x = seed;
    for _ in 0..NEWTON_MAX_STEPS {
        let g = df(x);
        let h = d2f(x);
        if !g.is_finite() || !h.is_finite() || h == 0.0 {
            return None;
        }
        let step = g / h;
        let next = x - step;
        // Reject iterates that wander far outside the window.
        if !next.is_finite() || next < a - span || next > b + span {
            return None;
        }
        if (next - x).abs() <= 1e-14 * (1.0 + x.abs()) {
            return Some(next);
        }
        x = next;
    }
    // Accept slow-but-settled iterates only if the derivative is tiny.
    let scale = (1.0 + x.abs()) * d2f(x).abs().max(1.0);
    (df(x).abs() <= 1e-10 * scale).then_some(x)
}

fn bisect(df: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = df(lo);
    for _ in 0..BISECTION_MAX_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fmid = df(mid);
        if fmid == 0.0 {
            return mid;
        }
        if flo * fmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    0.5 * (lo + hi)
}
