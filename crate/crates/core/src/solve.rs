//! Bracketed scalar root solving: sign-scan for brackets, then Newton with a
//! bisection guard inside the bracket.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("no sign change found in the scanned interval")]
    NoBracket,
}

/// Scans `[a, b]` in `cells` uniform pieces and returns all sign-change
/// brackets `(lo, hi)`.
pub fn scan_brackets(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let h = (b - a) / cells as f64;
    let mut x0 = a;
    let mut f0 = f(x0);
    for k in 1..=cells {
        let x1 = a + h * k as f64;
        let f1 = f(x1);
        if f0 == 0.0 {
            out.push((x0, x0));
        } else if f0 * f1 < 0.0 {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// Newton iteration kept inside a sign-change bracket; any step leaving the
/// bracket or shrinking too slowly falls back to bisection.
pub fn newton_bisect(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    bracket: (f64, f64),
    tol: f64,
    max_iter: usize,
) -> Result<f64, SolveError> {
    let (mut lo, mut hi) = bracket;
    if lo == hi {
        return Ok(lo);
    }
    let mut flo = f(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    if f(hi) == 0.0 {
        return Ok(hi);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        // shrink the bracket
        if fx * flo < 0.0 {
            hi = x;
        } else {
            lo = x;
            flo = fx;
        }
        if (hi - lo).abs() <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let d = df(x);
        let step = if d != 0.0 { fx / d } else { f64::INFINITY };
        if step.abs() <= tol * 0.5 {
            return Ok(x);
        }
        let candidate = x - step;
        x = if candidate > lo.min(hi) && candidate < lo.max(hi) {
            candidate
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(SolveError::NoConvergence(max_iter))
}

/// Convenience: scan, then refine the first bracket.
pub fn find_root_scan(
    f: impl Fn(f64) -> f64 + Copy,
    df: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    cells: usize,
    tol: f64,
    max_iter: usize,
) -> Result<f64, SolveError> {
    let brackets = scan_brackets(f, a, b, cells);
    let first = brackets.first().ok_or(SolveError::NoBracket)?;
    newton_bisect(f, df, *first, tol, max_iter)
}
