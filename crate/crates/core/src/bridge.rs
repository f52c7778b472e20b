//! Orbit correspondence between the Birkhoff billiard on γ and the angular
//! billiard on the dual curve Γ, and dualization of polynomial integrals.
//!
//! For a Birkhoff orbit …, l₋₁, l₀, l₁, … with dual points L_i, the angular
//! billiard acts by 𝒜(L₀) = L₁ on positive lines and 𝒜(L₀) = L₋₁ on negative
//! ones. Conversely, for an angular step A → B with tangency T and positively
//! oriented dual lines a, b: 𝒞(a) = b when T ∈ [A;B] and 𝒞(a) = −b otherwise.
//!
//! A polynomial integral Φ(σ, v_x, v_y) of even degree n dualizes to the
//! rational integral G(x, y) = F(x, y)/(x²+y²)^{n/2} with F(x, y) = Φ(1, −y, x).

use thiserror::Error;

use crate::angular::{step_polar, AngularError, AngularState};
use crate::birkhoff::{billiard_orbit, BilliardLineState, BirkhoffError, BirkhoffTable, IntegralPoly};
use crate::curve::SupportCurve;
use crate::geometry::{dual_of_line, GeometryError, OrientedLine, PlanePoint};
use crate::poly::BivariatePoly;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("line {index} of the orbit has a degenerate dual: {source}")]
    DegenerateDual {
        index: usize,
        #[source]
        source: GeometryError,
    },
    #[error("integral degree {n} is odd")]
    OddDegree { n: usize },
    #[error(transparent)]
    Angular(#[from] AngularError),
    #[error(transparent)]
    Birkhoff(#[from] BirkhoffError),
}

/// Dual points of an oriented-line orbit, each with the momentum sign of its
/// line (+1 for positive lines, −1 for negative).
pub fn dualize_orbit(
    orbit: &[BilliardLineState],
) -> Result<Vec<(PlanePoint, i8)>, BridgeError> {
    orbit
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let pt = dual_of_line(&s.line)
                .map_err(|source| BridgeError::DegenerateDual { index, source })?;
            Ok((pt, if s.line.p() > 0.0 { 1 } else { -1 }))
        })
        .collect()
}

/// Rational integral of the angular billiard obtained by dualizing Φ.
#[derive(Debug, Clone)]
pub struct DualIntegral {
    /// F(x, y) = Φ(1, −y, x).
    pub numerator: BivariatePoly,
    /// Degree n of Φ; the denominator is (x²+y²)^{n/2}.
    pub degree: usize,
}

impl DualIntegral {
    /// G(x, y) = F(x, y)/(x²+y²)^{n/2}.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.numerator.eval(x, y) / (x * x + y * y).powi(self.degree as i32 / 2)
    }
}

pub fn dualize_integral(phi: &IntegralPoly) -> Result<DualIntegral, BridgeError> {
    let n = phi.degree();
    if n % 2 != 0 {
        return Err(BridgeError::OddDegree { n });
    }
    // σ^{ks} v_x^{kx} v_y^{ky} ↦ (−y)^{kx} x^{ky}
    let triples: Vec<(usize, usize, f64)> = phi
        .terms()
        .iter()
        .filter(|t| t.3 != 0.0)
        .map(|&(_ks, kx, ky, c)| (ky, kx, if kx % 2 == 0 { c } else { -c }))
        .collect();
    Ok(DualIntegral {
        numerator: BivariatePoly::from_triples(&triples),
        degree: n,
    })
}

/// Dual points of the table's tangent lines over a uniform parameter grid;
/// these sample the dual curve Γ.
pub fn dual_curve_samples(table: &BirkhoffTable, grid: usize) -> Vec<PlanePoint> {
    (0..grid)
        .filter_map(|k| {
            let psi = std::f64::consts::TAU * k as f64 / grid as f64;
            let tangent = OrientedLine::through(table.point(psi), table.unit_tangent(psi));
            dual_of_line(&tangent).ok()
        })
        .collect()
}

/// Barycentric membership of `t` in the segment `[a; b]` within the band
/// `[-tol, 1+tol]`.
pub fn in_segment(a: PlanePoint, b: PlanePoint, t: PlanePoint, tol: f64) -> bool {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return t.dist(a) <= tol;
    }
    let s = t.sub(a).dot(ab) / len2;
    (-tol..=1.0 + tol).contains(&s)
}

/// Maximum pointwise deviation between the dualized Birkhoff orbit and the
/// angular orbit of the dual starting point, exercising the sign rule of the
/// orbit correspondence: forward matching for positive starting lines,
/// backward for negative ones.
pub fn orbit_correspondence_deviation(
    table: &BirkhoffTable,
    start: BilliardLineState,
    steps: usize,
) -> Result<f64, BridgeError> {
    let orbit = billiard_orbit(table, start, steps)?;
    let duals = dualize_orbit(&orbit)?;
    let gamma: &SupportCurve = table.dual_curve();
    let mut worst = 0.0f64;
    if start.line.p() > 0.0 {
        // 𝒜(L_k) = L_{k+1}: iterate the angular map freely from L₀
        let mut a = AngularState::from_point(duals[0].0);
        for d in duals.iter().skip(1) {
            let (next, _) = step_polar(gamma, a)?;
            worst = worst.max(next.point().dist(d.0));
            a = next;
        }
    } else {
        // 𝒜(L_{k+1}) = L_k
        for k in 1..duals.len() {
            let (img, _) = step_polar(gamma, AngularState::from_point(duals[k].0))?;
            worst = worst.max(img.point().dist(duals[k - 1].0));
        }
    }
    Ok(worst)
}
