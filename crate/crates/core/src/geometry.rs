//! Points, oriented lines and the polar duality with respect to the unit
//! circle centered at the origin `O`.
//!
//! An oriented line is stored in normal-angle/signed-distance coordinates
//! `(φ, p)`: `φ` is the angle of the outward unit normal against the `(1,0)`
//! axis, `p` the signed distance from `O`. The positive direction of travel
//! along the line is the normal rotated by `+π/2`, so the momentum of a
//! positively oriented unit tangent equals `p`.

use std::f64::consts::TAU;

use thiserror::Error;

/// Default tolerance below which lines/points are treated as degenerate for
/// duality (line through `O`, point at `O`).
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Angular tolerance used when comparing normalized line angles.
pub const ANGLE_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("degenerate dual: line through O or point at O (within tolerance {tol:e})")]
    DegenerateDual { tol: f64 },
    #[error("zero momentum: line passes through O within tolerance")]
    ZeroMomentum,
}

/// Normalize an angle to `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let mut a = a % TAU;
    if a < 0.0 {
        a += TAU;
    }
    // `-1e-300 % TAU` rounds to TAU after the correction above.
    if a >= TAU {
        a = 0.0;
    }
    a
}

/// A point of the Euclidean plane in the coordinates centered at `O`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const ORIGIN: PlanePoint = PlanePoint { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: PlanePoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dot(&self, other: PlanePoint) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// 2D cross product `x·oy − y·ox`.
    pub fn cross(&self, other: PlanePoint) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn add(&self, other: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x + other.x, self.y + other.y)
    }

    pub fn sub(&self, other: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x - other.x, self.y - other.y)
    }

    pub fn scale(&self, s: f64) -> PlanePoint {
        PlanePoint::new(self.x * s, self.y * s)
    }

    /// Polar angle about `O`, normalized to `[0, 2π)`.
    pub fn polar_angle(&self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }
}

/// An oriented line `⟨n(φ), x⟩ = p` with `n(φ) = (cos φ, sin φ)`.
#[derive(Debug, Clone, Copy)]
pub struct OrientedLine {
    phi: f64,
    p: f64,
}

impl OrientedLine {
    /// Builds a line, normalizing the angle to `[0, 2π)`.
    pub fn new(phi: f64, p: f64) -> Self {
        Self {
            phi: normalize_angle(phi),
            p,
        }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Outward unit normal.
    pub fn normal(&self) -> PlanePoint {
        PlanePoint::new(self.phi.cos(), self.phi.sin())
    }

    /// Positive direction of travel (normal rotated by `+π/2`).
    pub fn direction(&self) -> PlanePoint {
        PlanePoint::new(-self.phi.sin(), self.phi.cos())
    }

    /// Foot of the perpendicular from `O`.
    pub fn foot(&self) -> PlanePoint {
        self.normal().scale(self.p)
    }

    /// Same geometric line with the opposite orientation.
    pub fn reversed(&self) -> OrientedLine {
        OrientedLine::new(self.phi + std::f64::consts::PI, -self.p)
    }

    /// Signed distance of a point from the line.
    pub fn offset(&self, point: PlanePoint) -> f64 {
        self.normal().dot(point) - self.p
    }

    pub fn contains(&self, point: PlanePoint, tol: f64) -> bool {
        self.offset(point).abs() <= tol
    }

    /// Oriented line through `point` with unit direction `dir`.
    pub fn through(point: PlanePoint, dir: PlanePoint) -> OrientedLine {
        let d = dir.scale(1.0 / dir.norm());
        let normal = PlanePoint::new(d.y, -d.x);
        OrientedLine::new(normal.y.atan2(normal.x), normal.dot(point))
    }

    /// Equality of oriented lines after normalization, with angular
    /// tolerance on `φ` and absolute tolerance on `p`.
    pub fn approx_eq(&self, other: &OrientedLine, angle_tol: f64, p_tol: f64) -> bool {
        let mut dphi = (self.phi - other.phi).abs();
        if dphi > TAU - angle_tol {
            dphi = TAU - dphi;
        }
        dphi <= angle_tol && (self.p - other.p).abs() <= p_tol
    }
}

/// Dual point of a line: `L = n/p` on the normal radius at distance `1/p`.
///
/// The dual depends only on the non-oriented line; a negative-momentum
/// encoding is canonicalized by flipping the normal first.
pub fn dual_of_line(line: &OrientedLine) -> Result<PlanePoint, GeometryError> {
    dual_of_line_with_tol(line, DEGENERACY_TOL)
}

pub fn dual_of_line_with_tol(
    line: &OrientedLine,
    tol: f64,
) -> Result<PlanePoint, GeometryError> {
    if line.p.abs() <= tol {
        return Err(GeometryError::DegenerateDual { tol });
    }
    let (phi, p) = if line.p > 0.0 {
        (line.phi, line.p)
    } else {
        (line.phi + std::f64::consts::PI, -line.p)
    };
    Ok(PlanePoint::new(phi.cos() / p, phi.sin() / p))
}

/// Dual line of a point `P ≠ O`: normal angle `atan2(y,x)`, distance `1/|P|`.
pub fn dual_of_point(point: PlanePoint) -> Result<OrientedLine, GeometryError> {
    dual_of_point_with_tol(point, DEGENERACY_TOL)
}

pub fn dual_of_point_with_tol(
    point: PlanePoint,
    tol: f64,
) -> Result<OrientedLine, GeometryError> {
    let r = point.norm();
    if r <= tol {
        return Err(GeometryError::DegenerateDual { tol });
    }
    Ok(OrientedLine::new(point.y.atan2(point.x), 1.0 / r))
}

/// Sign of the momentum `σ(v) = x v_y − y v_x` of a direction `v` tangent to
/// the line, evaluated at any foot point (the value is `±p`, independent of
/// the foot point).
pub fn momentum_sign(line: &OrientedLine, direction: PlanePoint) -> Result<i8, GeometryError> {
    if line.p.abs() <= DEGENERACY_TOL {
        return Err(GeometryError::ZeroMomentum);
    }
    let foot = line.foot();
    let sigma = foot.x * direction.y - foot.y * direction.x;
    Ok(if sigma > 0.0 { 1 } else { -1 })
}
