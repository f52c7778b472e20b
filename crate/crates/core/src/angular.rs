//! The angular billiard map on exterior points of a convex oval Γ, star-shaped
//! about the origin O.
//!
//! Two equivalent implementations are provided and cross-checked: a geometric
//! one (reflect the line OA in the line OT through the tangency point T and
//! intersect with the tangent line), and a polar one working directly on the
//! pair (φ, r):
//!
//! ```text
//!   r₁ = r²(φ̄) / (r cos δ + ṙ sin δ),   r₂ = r²(φ̄) / (r cos δ − ṙ sin δ),
//!   φ₂ = 2φ̄ − φ₁,                       δ = φ̄ − φ₁,
//! ```
//!
//! where φ̄ is the polar angle of the forward tangency. The map blows up on
//! the S-curve (vanishing r₂ denominator) and fixes the P-curve (OP ⊥ OT).

use thiserror::Error;

use crate::curve::SupportCurve;
use crate::geometry::{normalize_angle, PlanePoint};
use crate::solve::{newton_bisect, scan_brackets, SolveError};

/// Exterior-margin tolerance below which a state counts as interior.
pub const EXTERIOR_MARGIN: f64 = 1e-10;

/// Threshold on the r₂ denominator under which the map is treated as
/// undefined (the state is on the S-curve within tolerance).
pub const S_CURVE_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum AngularError {
    #[error("point (φ={phi}, r={r}) is not exterior: curve radius {r_curve}")]
    InteriorPoint { phi: f64, r: f64, r_curve: f64 },
    #[error("state lies on the S-curve: r₂ denominator {denom:e} below tolerance")]
    SCurveSingularity { denom: f64 },
    #[error("tangency solve failed: {0}")]
    TangencySolve(#[from] SolveError),
    #[error("step {index}: {source}")]
    AtStep {
        index: usize,
        #[source]
        source: Box<AngularError>,
    },
}

/// Exterior point in polar coordinates about O.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularState {
    pub phi: f64,
    pub r: f64,
}

impl AngularState {
    pub fn new(phi: f64, r: f64) -> Self {
        Self { phi, r }
    }

    pub fn from_point(p: PlanePoint) -> Self {
        Self {
            phi: p.polar_angle(),
            r: p.norm(),
        }
    }

    pub fn point(&self) -> PlanePoint {
        PlanePoint::new(self.r * self.phi.cos(), self.r * self.phi.sin())
    }
}

/// Configuration cases by the angle ∠ATO at the tangency point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// ∠ATO = π/2: the map is a bijection between the two tangent half-lines.
    Case1,
    /// ∠ATO > π/2.
    Case2,
    /// ∠ATO < π/2: the tangent line carries the S and P points.
    Case3,
}

#[derive(Debug, Clone, Copy)]
pub struct StepDiagnostics {
    /// Polar angle of the tangency point.
    pub phi_bar: f64,
    /// Half-spread δ = φ̄ − φ₁ = (φ₂ − φ₁)/2 (raw φ₂).
    pub delta: f64,
    pub tangency: PlanePoint,
    pub case: CaseTag,
    /// Image before normalizing a negative radius.
    pub phi2_raw: f64,
    pub r2_raw: f64,
    /// True when the raw radius was negative and the antipodal representative
    /// was returned.
    pub normalized: bool,
}

fn require_exterior(curve: &SupportCurve, state: AngularState) -> Result<(), AngularError> {
    let rc = curve.r(state.phi);
    if state.r <= rc + EXTERIOR_MARGIN {
        return Err(AngularError::InteriorPoint {
            phi: state.phi,
            r: state.r,
            r_curve: rc,
        });
    }
    Ok(())
}

/// Polar angle φ̄ of the forward tangency from an exterior state: the unique
/// root of r_A (r cos δ′ + ṙ sin δ′) = r² with δ′ = φ̄ − φ_A ∈ (0, π).
pub fn tangent_from_point(
    curve: &SupportCurve,
    state: AngularState,
) -> Result<f64, AngularError> {
    require_exterior(curve, state)?;
    let ra = state.r;
    let g = |dp: f64| {
        let pb = state.phi + dp;
        let (r, r1) = (curve.r(pb), curve.r1(pb));
        r * r - ra * (r * dp.cos() + r1 * dp.sin())
    };
    let dg = |dp: f64| {
        let pb = state.phi + dp;
        let (r, r1, r2) = (curve.r(pb), curve.r1(pb), curve.r2(pb));
        2.0 * r * r1 - ra * (2.0 * r1 * dp.cos() + (r2 - r) * dp.sin())
    };
    let eps = 1e-9;
    let brackets = scan_brackets(g, eps, std::f64::consts::PI - eps, 256);
    let bracket = *brackets.first().ok_or(SolveError::NoBracket)?;
    let dp = newton_bisect(g, dg, bracket, 1e-14, 100)?;
    Ok(state.phi + dp)
}

fn classify(state_point: PlanePoint, tangency: PlanePoint) -> CaseTag {
    // angle at T between TA and TO
    let ta = state_point.sub(tangency);
    let to = tangency.scale(-1.0);
    let c = ta.dot(to) / (ta.norm() * to.norm());
    if c.abs() < 1e-9 {
        CaseTag::Case1
    } else if c < 0.0 {
        CaseTag::Case2
    } else {
        CaseTag::Case3
    }
}

/// One step of the angular billiard in polar form.
pub fn step_polar(
    curve: &SupportCurve,
    state: AngularState,
) -> Result<(AngularState, StepDiagnostics), AngularError> {
    let phi_bar = tangent_from_point(curve, state)?;
    let delta = phi_bar - state.phi;
    let (r, r1) = (curve.r(phi_bar), curve.r1(phi_bar));
    let denom = r * delta.cos() - r1 * delta.sin();
    if denom.abs() < S_CURVE_TOL {
        return Err(AngularError::SCurveSingularity { denom });
    }
    let r2_raw = r * r / denom;
    let phi2_raw = 2.0 * phi_bar - state.phi;
    let (next, normalized) = if r2_raw < 0.0 {
        (
            AngularState::new(
                normalize_angle(phi2_raw + std::f64::consts::PI),
                -r2_raw,
            ),
            true,
        )
    } else {
        (AngularState::new(normalize_angle(phi2_raw), r2_raw), false)
    };
    let tangency = curve.point(phi_bar);
    let diag = StepDiagnostics {
        phi_bar,
        delta,
        tangency,
        case: classify(state.point(), tangency),
        phi2_raw,
        r2_raw,
        normalized,
    };
    Ok((next, diag))
}

/// Raw polar image (φ₂, r₂) without radius normalization; the smooth branch
/// used for Jacobian finite differences.
pub fn step_polar_raw(
    curve: &SupportCurve,
    state: AngularState,
) -> Result<(f64, f64), AngularError> {
    let (_, diag) = step_polar(curve, state)?;
    Ok((diag.phi2_raw, diag.r2_raw))
}

/// One step in the geometric form: reflect the line OA in the line OT and
/// intersect with the tangent line at T.
pub fn step_geometric(
    curve: &SupportCurve,
    state: AngularState,
) -> Result<AngularState, AngularError> {
    let phi_bar = tangent_from_point(curve, state)?;
    let t = curve.point(phi_bar);
    let w = curve.tangent(phi_bar);
    let a = state.point();
    let that = t.scale(1.0 / t.norm());
    let u = a.scale(1.0 / a.norm());
    // reflection of the direction OA in the axis OT
    let refl = that.scale(2.0 * u.dot(that)).sub(u);
    let denom = refl.cross(w);
    if denom.abs() < 1e-8 * w.norm() {
        return Err(AngularError::SCurveSingularity { denom });
    }
    // O + s·refl = T + t·w  ⇒  s = (T × w) / (refl × w)
    let s = t.cross(w) / denom;
    Ok(AngularState::from_point(refl.scale(s)))
}

/// Iterates `step_polar`; the returned states include the initial one.
pub fn orbit(
    curve: &SupportCurve,
    start: AngularState,
    n: usize,
) -> Result<(Vec<AngularState>, Vec<StepDiagnostics>), AngularError> {
    let mut states = Vec::with_capacity(n + 1);
    let mut diags = Vec::with_capacity(n);
    states.push(start);
    let mut cur = start;
    for index in 0..n {
        let (next, diag) = step_polar(curve, cur).map_err(|source| AngularError::AtStep {
            index,
            source: Box::new(source),
        })?;
        states.push(next);
        diags.push(diag);
        cur = next;
    }
    Ok((states, diags))
}

/// Point of the S-curve on the tangent line at φ̄, in closed form:
/// S(φ̄) = Γ(φ̄) − (r/(2ṙ)) Γ̇(φ̄). Returns `None` where ṙ ≈ 0 (the point
/// escapes to infinity).
pub fn s_curve_point(curve: &SupportCurve, phi_bar: f64) -> Option<PlanePoint> {
    let (r, r1) = (curve.r(phi_bar), curve.r1(phi_bar));
    if r1.abs() < 1e-9 {
        return None;
    }
    let g = curve.point(phi_bar);
    let gd = curve.tangent(phi_bar);
    Some(g.sub(gd.scale(r / (2.0 * r1))))
}

/// Point of the P-curve (fixed points, OP ⊥ OT) on the tangent line at φ̄:
/// P(φ̄) = (r²/ṙ)(sin φ̄, −cos φ̄). `None` where ṙ ≈ 0.
pub fn p_curve_point(curve: &SupportCurve, phi_bar: f64) -> Option<PlanePoint> {
    let (r, r1) = (curve.r(phi_bar), curve.r1(phi_bar));
    if r1.abs() < 1e-9 {
        return None;
    }
    let m = r * r / r1;
    Some(PlanePoint::new(m * phi_bar.sin(), -m * phi_bar.cos()))
}

/// Samples the S-curve over a φ̄ grid, skipping points at infinity.
pub fn s_curve_sample(curve: &SupportCurve, grid: &[f64]) -> Vec<PlanePoint> {
    grid.iter()
        .filter_map(|&pb| s_curve_point(curve, pb))
        .collect()
}

/// Samples the P-curve over a φ̄ grid, skipping points at infinity.
pub fn p_curve_sample(curve: &SupportCurve, grid: &[f64]) -> Vec<PlanePoint> {
    grid.iter()
        .filter_map(|&pb| p_curve_point(curve, pb))
        .collect()
}

/// Generating function S(φ₁, φ₂) = 2 sin δ / r(φ̄) with φ̄ = (φ₁+φ₂)/2 and
/// δ = (φ₂−φ₁)/2. Its partials are −1/r₁ and 1/r₂.
pub fn generating_function(curve: &SupportCurve, phi1: f64, phi2: f64) -> f64 {
    let phi_bar = 0.5 * (phi1 + phi2);
    let delta = 0.5 * (phi2 - phi1);
    2.0 * delta.sin() / curve.r(phi_bar)
}

/// Twist of the generating function, ∂²S/∂φ₁∂φ₂ = ½(p̈(φ̄)+p(φ̄)) sin δ.
pub fn twist_value(curve: &SupportCurve, phi_bar: f64, delta: f64) -> f64 {
    0.5 * (curve.p2(phi_bar) + curve.p(phi_bar)) * delta.sin()
}

/// |det J − 1| for the finite-difference Jacobian of the raw polar map in the
/// symplectic coordinates (φ, 1/r), central differences with step 1e-6.
pub fn symplectic_residual(
    curve: &SupportCurve,
    state: AngularState,
) -> Result<f64, AngularError> {
    let h = 1e-6;
    let image = |phi: f64, u: f64| -> Result<(f64, f64), AngularError> {
        let (phi2, r2) = step_polar_raw(curve, AngularState::new(phi, 1.0 / u))?;
        Ok((phi2, 1.0 / r2))
    };
    let u0 = 1.0 / state.r;
    let (pp, pm) = (image(state.phi + h, u0)?, image(state.phi - h, u0)?);
    let (up, um) = (image(state.phi, u0 + h)?, image(state.phi, u0 - h)?);
    let j11 = (pp.0 - pm.0) / (2.0 * h);
    let j21 = (pp.1 - pm.1) / (2.0 * h);
    let j12 = (up.0 - um.0) / (2.0 * h);
    let j22 = (up.1 - um.1) / (2.0 * h);
    Ok((j11 * j22 - j12 * j21 - 1.0).abs())
}
