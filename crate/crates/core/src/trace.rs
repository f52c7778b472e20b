//! Predictor–corrector tracing of implicit ovals `{f = 0}` and detection of
//! their real inflection and singular points.
//!
//! Inflections are located where `H(f)` vanishes along the traced oval. Both
//! odd-order zeros (sign changes of `H`) and even-order touching zeros are
//! caught; the latter through sign changes of the tangential derivative
//! `L_v H = H_x f_y − H_y f_x` combined with a smallness filter on `H`
//! itself. Singular points come from Newton searches for `∇f = 0` seeded on
//! a uniform grid over the inflated bounding box of the trace.

use serde::Serialize;
use thiserror::Error;

use crate::curve::ImplicitCurveModel;
use crate::geometry::PlanePoint;
use crate::poly::{h_operator, BivariatePoly};

/// Residual bound enforced at every trace sample.
pub const ON_CURVE_TOL: f64 = 1e-10;

/// Default cap on the number of trace points.
pub const DEFAULT_POINT_BUDGET: usize = 200_000;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("singular point encountered while tracing: |∇f| < 1e-8 at ({x}, {y})")]
    SingularEncountered { x: f64, y: f64 },
    #[error("point budget of {0} exceeded before closure")]
    BudgetExceeded(usize),
    #[error("Newton correction failed to reach the curve at ({x}, {y})")]
    CorrectionFailed { x: f64, y: f64 },
}

/// Ordered samples of a closed (or budget-truncated) branch of `{f = 0}`.
#[derive(Debug, Clone)]
pub struct CurveTrace {
    pub points: Vec<PlanePoint>,
    /// Cumulative arc-length parameter, same length as `points`.
    pub arc: Vec<f64>,
    pub closed: bool,
}

impl CurveTrace {
    pub fn total_length(&self) -> f64 {
        let open = self.arc.last().copied().unwrap_or(0.0);
        if self.closed {
            // add the closing segment back to the start
            open + self
                .points
                .last()
                .map(|p| p.dist(self.points[0]))
                .unwrap_or(0.0)
        } else {
            open
        }
    }

    pub fn bounding_box(&self) -> (PlanePoint, PlanePoint) {
        let mut lo = PlanePoint::new(f64::INFINITY, f64::INFINITY);
        let mut hi = PlanePoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }
}

/// Newton-corrects a point onto `{f = 0}` along the gradient direction.
fn correct_to_curve(f: &BivariatePoly, start: PlanePoint) -> Result<PlanePoint, TraceError> {
    let mut q = start;
    for _ in 0..50 {
        let val = f.eval(q.x, q.y);
        if val.abs() < ON_CURVE_TOL {
            return Ok(q);
        }
        let (gx, gy) = f.gradient_at(q.x, q.y);
        let g2 = gx * gx + gy * gy;
        if g2.sqrt() < 1e-8 {
            return Err(TraceError::SingularEncountered { x: q.x, y: q.y });
        }
        q = PlanePoint::new(q.x - val * gx / g2, q.y - val * gy / g2);
    }
    Err(TraceError::CorrectionFailed { x: q.x, y: q.y })
}

/// Traces the branch of `{f = 0}` through the model's seed with the given
/// arc-length step, stopping on closure or when the point budget runs out.
pub fn trace_curve(model: &ImplicitCurveModel, step: f64) -> Result<CurveTrace, TraceError> {
    trace_curve_with_budget(model, step, DEFAULT_POINT_BUDGET)
}

pub fn trace_curve_with_budget(
    model: &ImplicitCurveModel,
    step: f64,
    budget: usize,
) -> Result<CurveTrace, TraceError> {
    let f = &model.poly;
    let start = correct_to_curve(f, model.seed)?;
    let mut points = vec![start];
    let mut arc = vec![0.0];
    let mut q = start;
    loop {
        let (gx, gy) = f.gradient_at(q.x, q.y);
        let gnorm = gx.hypot(gy);
        if gnorm < 1e-8 {
            return Err(TraceError::SingularEncountered { x: q.x, y: q.y });
        }
        // tangent (f_y, −f_x), flipped for the requested orientation
        let mut t = PlanePoint::new(gy / gnorm, -gx / gnorm);
        if model.ccw != (q.cross(t) > 0.0) {
            t = t.scale(-1.0);
        }
        let predicted = q.add(t.scale(step));
        let corrected = correct_to_curve(f, predicted)?;
        let ds = corrected.dist(q);
        q = corrected;
        let s = arc.last().unwrap() + ds;
        // closure test once we have moved away from the seed
        if s > 3.0 * step && q.dist(start) < step {
            return Ok(CurveTrace {
                points,
                arc,
                closed: true,
            });
        }
        points.push(q);
        arc.push(s);
        if points.len() >= budget {
            return Err(TraceError::BudgetExceeded(budget));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Inflection,
    Singular,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClassifiedPoint {
    pub x: f64,
    pub y: f64,
    pub kind: PointKind,
}

impl ClassifiedPoint {
    pub fn point(&self) -> PlanePoint {
        PlanePoint::new(self.x, self.y)
    }
}

/// Midpoint of a trace segment corrected back onto the curve.
fn on_curve_midpoint(
    f: &BivariatePoly,
    a: PlanePoint,
    b: PlanePoint,
) -> Result<PlanePoint, TraceError> {
    correct_to_curve(f, PlanePoint::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y)))
}

/// Bisection along the curve for a sign change of `g` between on-curve
/// endpoints.
fn bisect_on_curve(
    f: &BivariatePoly,
    g: &BivariatePoly,
    mut a: PlanePoint,
    mut b: PlanePoint,
) -> Option<PlanePoint> {
    let mut ga = g.eval(a.x, a.y);
    for _ in 0..80 {
        if a.dist(b) < 1e-12 {
            break;
        }
        let mid = on_curve_midpoint(f, a, b).ok()?;
        let gm = g.eval(mid.x, mid.y);
        if gm == 0.0 {
            return Some(mid);
        }
        if ga * gm < 0.0 {
            b = mid;
        } else {
            a = mid;
            ga = gm;
        }
    }
    on_curve_midpoint(f, a, b).ok()
}

fn push_deduped(out: &mut Vec<ClassifiedPoint>, cand: ClassifiedPoint) {
    const CLUSTER_RADIUS: f64 = 1e-6;
    if out
        .iter()
        .all(|p| p.point().dist(cand.point()) > CLUSTER_RADIUS)
    {
        out.push(cand);
    }
}

/// Finds the real inflection and singular points of `{f = 0}` visible along
/// the trace (inflections) or inside its inflated bounding box (singular
/// points). The returned list is deduplicated within 1e-6.
pub fn find_real_flexes_and_singular(
    f: &BivariatePoly,
    trace: &CurveTrace,
) -> Vec<ClassifiedPoint> {
    let mut out = Vec::new();
    let h = h_operator(f);
    let fx = f.partial_x();
    let fy = f.partial_y();
    // tangential derivative of H along the curve
    let w = h.partial_x().mul(&fy).sub(&h.partial_y().mul(&fx));

    let n = trace.points.len();
    if n >= 3 {
        let hvals: Vec<f64> = trace.points.iter().map(|p| h.eval(p.x, p.y)).collect();
        let hscale = hvals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let wvals: Vec<f64> = trace.points.iter().map(|p| w.eval(p.x, p.y)).collect();
        let segs = if trace.closed { n } else { n - 1 };
        for k in 0..segs {
            let (a, b) = (trace.points[k], trace.points[(k + 1) % n]);
            let (ha, hb) = (hvals[k], hvals[(k + 1) % n]);
            if ha == 0.0 {
                push_deduped(
                    &mut out,
                    ClassifiedPoint {
                        x: a.x,
                        y: a.y,
                        kind: PointKind::Inflection,
                    },
                );
            } else if ha * hb < 0.0 {
                // odd-order zero of H
                if let Some(p) = bisect_on_curve(f, &h, a, b) {
                    push_deduped(
                        &mut out,
                        ClassifiedPoint {
                            x: p.x,
                            y: p.y,
                            kind: PointKind::Inflection,
                        },
                    );
                }
            } else if wvals[k] * wvals[(k + 1) % n] < 0.0
                && ha.abs().min(hb.abs()) < 1e-4 * hscale
            {
                // candidate even-order (touching) zero: H has a local
                // extremum here; accept only if H itself reaches ~0
                if let Some(p) = bisect_on_curve(f, &w, a, b) {
                    if h.eval(p.x, p.y).abs() < 1e-8 * hscale {
                        push_deduped(
                            &mut out,
                            ClassifiedPoint {
                                x: p.x,
                                y: p.y,
                                kind: PointKind::Inflection,
                            },
                        );
                    }
                }
            }
        }
    }

    // singular points: Newton for ∇f = 0 from a 64×64 grid over the trace's
    // bounding box inflated by 25%
    let (lo, hi) = trace.bounding_box();
    let center = PlanePoint::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y));
    let half = PlanePoint::new(
        0.625 * (hi.x - lo.x).max(1e-6),
        0.625 * (hi.y - lo.y).max(1e-6),
    );
    let fxx = fx.partial_x();
    let fxy = fx.partial_y();
    let fyy = fy.partial_y();
    let mut singulars: Vec<ClassifiedPoint> = Vec::new();
    for i in 0..64 {
        for j in 0..64 {
            let mut q = PlanePoint::new(
                center.x - half.x + 2.0 * half.x * (i as f64 + 0.5) / 64.0,
                center.y - half.y + 2.0 * half.y * (j as f64 + 0.5) / 64.0,
            );
            let mut converged = false;
            for _ in 0..60 {
                let (gx, gy) = (fx.eval(q.x, q.y), fy.eval(q.x, q.y));
                if gx.hypot(gy) < 1e-12 {
                    converged = true;
                    break;
                }
                let (axx, axy, ayy) = (
                    fxx.eval(q.x, q.y),
                    fxy.eval(q.x, q.y),
                    fyy.eval(q.x, q.y),
                );
                let det = axx * ayy - axy * axy;
                if det.abs() < 1e-14 {
                    break;
                }
                let dx = (gx * ayy - gy * axy) / det;
                let dy = (gy * axx - gx * axy) / det;
                q = PlanePoint::new(q.x - dx, q.y - dy);
                if !q.x.is_finite() || !q.y.is_finite() {
                    break;
                }
                if dx.hypot(dy) < 1e-14 {
                    let (gx, gy) = (fx.eval(q.x, q.y), fy.eval(q.x, q.y));
                    converged = gx.hypot(gy) < 1e-10;
                    break;
                }
            }
            if converged && f.eval(q.x, q.y).abs() < 1e-8 {
                push_deduped(
                    &mut singulars,
                    ClassifiedPoint {
                        x: q.x,
                        y: q.y,
                        kind: PointKind::Singular,
                    },
                );
            }
        }
    }
    for s in singulars {
        push_deduped(&mut out, s);
    }
    out
}
