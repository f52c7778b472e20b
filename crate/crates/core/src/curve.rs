//! Convex ovals `Γ` given by their polar position function `r(φ)` about the
//! origin `O`, with analytic first and second derivatives.
//!
//! The supporting function of the dual table `γ` is `p(φ) = 1/r(φ)`; both
//! billiard maps are driven by the same curve object. Convexity and
//! star-shapedness are validated on a fixed grid at construction time.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::PlanePoint;
use crate::poly::BivariatePoly;

/// Grid resolution used for the construction-time invariant sweep.
pub const VALIDATION_GRID: usize = 4096;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("invalid axes: a and b must be positive (a={a}, b={b})")]
    InvalidAxes { a: f64, b: f64 },
    #[error("center outside: |x0| must be < R (R={radius}, x0={x0})")]
    CenterOutside { radius: f64, x0: f64 },
    #[error("curve is not strictly convex / star-shaped: {0}")]
    NonConvex(String),
    #[error("bad seed: {0}")]
    BadSeed(String),
    #[error("bad curve spec: {0}")]
    BadSpec(String),
}

type CurveFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A smooth strictly convex oval star-shaped about `O`, represented by its
/// polar position function and two analytic derivatives.
pub struct SupportCurve {
    name: String,
    r: CurveFn,
    r1: CurveFn,
    r2: CurveFn,
}

impl fmt::Debug for SupportCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SupportCurve").field("name", &self.name).finish()
    }
}

impl SupportCurve {
    /// Wraps closures for `r, ṙ, r̈` after validating the invariants on the
    /// fixed grid: positivity, 2π-periodicity, strict convexity
    /// `r² + 2ṙ² − r r̈ > 0`, and positive dual curvature radius
    /// `A = ½(p̈ + p) > 0`.
    pub fn new(
        name: impl Into<String>,
        r: impl Fn(f64) -> f64 + Send + Sync + 'static,
        r1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        r2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, CurveError> {
        let curve = Self {
            name: name.into(),
            r: Box::new(r),
            r1: Box::new(r1),
            r2: Box::new(r2),
        };
        curve.validate(0.0)?;
        Ok(curve)
    }

    /// Like [`SupportCurve::new`] but tolerates isolated points of vanishing
    /// curvature (the convexity form may touch zero). Needed for ovals such
    /// as `x^{2n} + y^{2n} = 1` whose flexes have zero curvature; such curves
    /// can drive dual sampling but not the twist diagnostics.
    pub fn new_weakly_convex(
        name: impl Into<String>,
        r: impl Fn(f64) -> f64 + Send + Sync + 'static,
        r1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        r2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, CurveError> {
        let curve = Self {
            name: name.into(),
            r: Box::new(r),
            r1: Box::new(r1),
            r2: Box::new(r2),
        };
        curve.validate(-1e-12)?;
        Ok(curve)
    }

    fn validate(&self, min_convexity: f64) -> Result<(), CurveError> {
        if ((self.r)(0.0) - (self.r)(TAU)).abs() > 1e-12 {
            return Err(CurveError::NonConvex("r is not 2π-periodic".into()));
        }
        for k in 0..VALIDATION_GRID {
            let phi = TAU * k as f64 / VALIDATION_GRID as f64;
            let r = (self.r)(phi);
            let r1 = (self.r1)(phi);
            let r2 = (self.r2)(phi);
            if !(r > 0.0) || !r.is_finite() {
                return Err(CurveError::NonConvex(format!(
                    "r(φ) not positive at φ={phi}: r={r}"
                )));
            }
            let convexity = r * r + 2.0 * r1 * r1 - r * r2;
            if !(convexity > min_convexity) {
                return Err(CurveError::NonConvex(format!(
                    "convexity r²+2ṙ²−r r̈ = {convexity} ≤ 0 at φ={phi}"
                )));
            }
            // A = ½(p̈+p) with p = 1/r; same sign as the convexity form for
            // r > 0, kept as an explicit check for the twist property.
            let p = 1.0 / r;
            let p2 = (2.0 * r1 * r1 - r * r2) / (r * r * r);
            if !(0.5 * (p2 + p) > min_convexity) {
                return Err(CurveError::NonConvex(format!(
                    "dual curvature radius ½(p̈+p) ≤ 0 at φ={phi}"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Polar position function `r(φ)` of `Γ`.
    pub fn r(&self, phi: f64) -> f64 {
        (self.r)(phi)
    }

    /// `ṙ(φ)`.
    pub fn r1(&self, phi: f64) -> f64 {
        (self.r1)(phi)
    }

    /// `r̈(φ)`.
    pub fn r2(&self, phi: f64) -> f64 {
        (self.r2)(phi)
    }

    /// Supporting function of the dual table: `p = 1/r`.
    pub fn p(&self, phi: f64) -> f64 {
        1.0 / (self.r)(phi)
    }

    /// `ṗ = −ṙ/r²`.
    pub fn p1(&self, phi: f64) -> f64 {
        let r = (self.r)(phi);
        -(self.r1)(phi) / (r * r)
    }

    /// `p̈ = (2ṙ² − r r̈)/r³`.
    pub fn p2(&self, phi: f64) -> f64 {
        let r = (self.r)(phi);
        let r1 = (self.r1)(phi);
        (2.0 * r1 * r1 - r * (self.r2)(phi)) / (r * r * r)
    }

    /// Point `Γ(φ) = r(φ) e^{iφ}`.
    pub fn point(&self, phi: f64) -> PlanePoint {
        let r = (self.r)(phi);
        PlanePoint::new(r * phi.cos(), r * phi.sin())
    }

    /// Tangent vector `Γ̇(φ) = (ṙ + i r) e^{iφ}`.
    pub fn tangent(&self, phi: f64) -> PlanePoint {
        let r = (self.r)(phi);
        let r1 = (self.r1)(phi);
        PlanePoint::new(
            r1 * phi.cos() - r * phi.sin(),
            r1 * phi.sin() + r * phi.cos(),
        )
    }
}

/// Ellipse `x²/a² + y²/b² = 1` centered at `O`.
pub fn make_ellipse(a: f64, b: f64) -> Result<SupportCurve, CurveError> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(CurveError::InvalidAxes { a, b });
    }
    // r = u^{-1/2}, u(φ) = cos²φ/a² + sin²φ/b²
    let (ia2, ib2) = (1.0 / (a * a), 1.0 / (b * b));
    let u = move |phi: f64| phi.cos().powi(2) * ia2 + phi.sin().powi(2) * ib2;
    let du = move |phi: f64| (2.0 * phi).sin() * (ib2 - ia2);
    let ddu = move |phi: f64| 2.0 * (2.0 * phi).cos() * (ib2 - ia2);
    SupportCurve::new(
        format!("ellipse(a={a}, b={b})"),
        move |phi| u(phi).powf(-0.5),
        move |phi| -0.5 * u(phi).powf(-1.5) * du(phi),
        move |phi| 0.75 * u(phi).powf(-2.5) * du(phi).powi(2) - 0.5 * u(phi).powf(-1.5) * ddu(phi),
    )
}

/// Circle of radius `R` about the plane point `(x0, 0)`, with `O` at the
/// origin of the polar frame: `r(φ) = −x0 cos φ + √(R² − x0² sin²φ)`.
pub fn make_offset_circle(radius: f64, x0: f64) -> Result<SupportCurve, CurveError> {
    if !(x0.abs() < radius) {
        return Err(CurveError::CenterOutside { radius, x0 });
    }
    let s = move |phi: f64| (radius * radius - x0 * x0 * phi.sin().powi(2)).sqrt();
    let ds = move |phi: f64| -x0 * x0 * phi.sin() * phi.cos() / s(phi);
    let dds = move |phi: f64| {
        let sv = s(phi);
        -x0 * x0 * (2.0 * phi).cos() / sv
            - x0.powi(4) * phi.sin().powi(2) * phi.cos().powi(2) / sv.powi(3)
    };
    SupportCurve::new(
        format!("offset_circle(R={radius}, x0={x0})"),
        move |phi| -x0 * phi.cos() + s(phi),
        move |phi| x0 * phi.sin() + ds(phi),
        move |phi| x0 * phi.cos() + dds(phi),
    )
}

/// Curve whose dual supporting function is the trigonometric polynomial
/// `p(φ) = c0 + Σ ck cos kφ + Σ sk sin kφ`; the position function is
/// `r = 1/p`.
pub fn make_trig_poly(c0: f64, cos: &[f64], sin: &[f64]) -> Result<SupportCurve, CurveError> {
    let cos = cos.to_vec();
    let sin = sin.to_vec();
    let p = {
        let (cos, sin) = (cos.clone(), sin.clone());
        move |phi: f64| {
            let mut v = c0;
            for (k, c) in cos.iter().enumerate() {
                v += c * ((k + 1) as f64 * phi).cos();
            }
            for (k, s) in sin.iter().enumerate() {
                v += s * ((k + 1) as f64 * phi).sin();
            }
            v
        }
    };
    let dp = {
        let (cos, sin) = (cos.clone(), sin.clone());
        move |phi: f64| {
            let mut v = 0.0;
            for (k, c) in cos.iter().enumerate() {
                let n = (k + 1) as f64;
                v -= c * n * (n * phi).sin();
            }
            for (k, s) in sin.iter().enumerate() {
                let n = (k + 1) as f64;
                v += s * n * (n * phi).cos();
            }
            v
        }
    };
    let ddp = move |phi: f64| {
        let mut v = 0.0;
        for (k, c) in cos.iter().enumerate() {
            let n = (k + 1) as f64;
            v -= c * n * n * (n * phi).cos();
        }
        for (k, s) in sin.iter().enumerate() {
            let n = (k + 1) as f64;
            v -= s * n * n * (n * phi).sin();
        }
        v
    };
    let p2 = p.clone();
    let p3 = p.clone();
    let dp3 = dp.clone();
    SupportCurve::new(
        format!("trig_poly(c0={c0})"),
        move |phi| 1.0 / p(phi),
        move |phi| -dp(phi) / p2(phi).powi(2),
        move |phi| {
            let pv = p3(phi);
            (2.0 * dp3(phi).powi(2) - pv * ddp(phi)) / pv.powi(3)
        },
    )
}

/// Fermat oval `x^{2n} + y^{2n} = 1`, `n ≥ 1`, as a support curve:
/// `r = u^{-1/(2n)}` with `u = cos^{2n}φ + sin^{2n}φ`.
pub fn make_fermat_oval(n: u32) -> Result<SupportCurve, CurveError> {
    if n == 0 {
        return Err(CurveError::BadSpec("fermat exponent must be ≥ 1".into()));
    }
    if n == 1 {
        return make_ellipse(1.0, 1.0);
    }
    let m = 2.0 * n as f64;
    let u = move |phi: f64| phi.cos().abs().powf(m) + phi.sin().abs().powf(m);
    let du = move |phi: f64| {
        let (c, s) = (phi.cos(), phi.sin());
        // d/dφ (c^{2n} + s^{2n}); even powers, signs handled directly
        m * s * c * (s.powi(2).powf(n as f64 - 1.0) - c.powi(2).powf(n as f64 - 1.0))
    };
    let ddu = move |phi: f64| {
        let (c, s) = (phi.cos(), phi.sin());
        let (c2, s2) = (c * c, s * s);
        let e = n as f64 - 1.0;
        m * ((c2 - s2) * (s2.powf(e) - c2.powf(e))
            + 2.0 * e * s2 * c2 * (s2.powf(e - 1.0) + c2.powf(e - 1.0)))
    };
    let exp = -1.0 / m;
    SupportCurve::new_weakly_convex(
        format!("fermat_oval(n={n})"),
        move |phi| u(phi).powf(exp),
        move |phi| exp * u(phi).powf(exp - 1.0) * du(phi),
        move |phi| {
            exp * (exp - 1.0) * u(phi).powf(exp - 2.0) * du(phi).powi(2)
                + exp * u(phi).powf(exp - 1.0) * ddu(phi)
        },
    )
}

/// An algebraic oval `{f = 0}` traced numerically from a seed point.
#[derive(Debug, Clone)]
pub struct ImplicitCurveModel {
    pub poly: BivariatePoly,
    pub seed: PlanePoint,
    /// Counterclockwise tracing direction.
    pub ccw: bool,
}

impl ImplicitCurveModel {
    pub fn new(poly: BivariatePoly, seed: PlanePoint) -> Result<Self, CurveError> {
        if poly.eval(seed.x, seed.y).abs() > 1e-10 {
            return Err(CurveError::BadSeed(format!(
                "f(seed) = {} exceeds 1e-10",
                poly.eval(seed.x, seed.y)
            )));
        }
        let (gx, gy) = poly.gradient_at(seed.x, seed.y);
        if gx.hypot(gy) < 1e-8 {
            return Err(CurveError::BadSeed("gradient vanishes at seed".into()));
        }
        Ok(Self {
            poly,
            seed,
            ccw: true,
        })
    }

    /// Scans rays from the origin for a sign change of `f` and polishes a
    /// seed point onto the curve.
    pub fn from_poly_autoseed(poly: BivariatePoly) -> Result<Self, CurveError> {
        for k in 0..16 {
            let th = TAU * k as f64 / 16.0;
            let (c, s) = (th.cos(), th.sin());
            let g = |t: f64| poly.eval(t * c, t * s);
            if let Ok(t) = crate::solve::find_root_scan(
                &g,
                |t| {
                    let (gx, gy) = poly.gradient_at(t * c, t * s);
                    gx * c + gy * s
                },
                1e-3,
                100.0,
                4096,
                1e-14,
                200,
            ) {
                let seed = PlanePoint::new(t * c, t * s);
                if let Ok(model) = Self::new(poly.clone(), seed) {
                    return Ok(model);
                }
            }
        }
        Err(CurveError::BadSeed(
            "no seed found on rays from the origin".into(),
        ))
    }
}

/// JSON curve description accepted by the CLI and the FFI surface.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveSpec {
    Ellipse { a: f64, b: f64 },
    OffsetCircle { radius: f64, x0: f64 },
    TrigPoly {
        c0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    Implicit {
        poly: Vec<(usize, usize, f64)>,
        #[serde(default)]
        seed: Option<(f64, f64)>,
    },
}

/// A curve built from a [`CurveSpec`]: either a smooth support curve or an
/// implicit algebraic model.
#[derive(Debug)]
pub enum BuiltCurve {
    Support(SupportCurve),
    Implicit(ImplicitCurveModel),
}

impl CurveSpec {
    pub fn from_json(json: &str) -> Result<Self, CurveError> {
        serde_json::from_str(json).map_err(|e| CurveError::BadSpec(e.to_string()))
    }

    pub fn build(&self) -> Result<BuiltCurve, CurveError> {
        match self {
            CurveSpec::Ellipse { a, b } => Ok(BuiltCurve::Support(make_ellipse(*a, *b)?)),
            CurveSpec::OffsetCircle { radius, x0 } => {
                Ok(BuiltCurve::Support(make_offset_circle(*radius, *x0)?))
            }
            CurveSpec::TrigPoly { c0, cos, sin } => {
                Ok(BuiltCurve::Support(make_trig_poly(*c0, cos, sin)?))
            }
            CurveSpec::Implicit { poly, seed } => {
                let p = BivariatePoly::from_triples(poly);
                let model = match seed {
                    Some((x, y)) => ImplicitCurveModel::new(p, PlanePoint::new(*x, *y))?,
                    None => ImplicitCurveModel::from_poly_autoseed(p)?,
                };
                Ok(BuiltCurve::Implicit(model))
            }
        }
    }

    /// Builds and requires a smooth support curve.
    pub fn build_support(&self) -> Result<SupportCurve, CurveError> {
        match self.build()? {
            BuiltCurve::Support(c) => Ok(c),
            BuiltCurve::Implicit(_) => Err(CurveError::BadSpec(
                "implicit curves have no polar position function; \
                 this operation needs an ellipse/offset_circle/trig_poly curve"
                    .into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn unit_circle_is_trivial() {
        let c = make_ellipse(1.0, 1.0).unwrap();
        for k in 0..32 {
            let phi = TAU * k as f64 / 32.0;
            assert!((c.r(phi) - 1.0).abs() < 1e-14);
            assert!(c.r1(phi).abs() < 1e-13);
        }
    }

    #[test]
    fn ellipse_formula_and_convexity() {
        let c = make_ellipse(2.0, 1.0).unwrap();
        assert!((c.r(0.0) - 2.0).abs() < 1e-14);
        assert!((c.r(PI / 2.0) - 1.0).abs() < 1e-14);
        // strongly eccentric case passes the grid check
        make_ellipse(3.0, 1.0).unwrap();
        assert!(make_ellipse(-1.0, 1.0).is_err());
    }

    #[test]
    fn ellipse_traces_its_implicit_equation() {
        let (a, b) = (2.0, 1.0);
        let c = make_ellipse(a, b).unwrap();
        for k in 0..256 {
            let phi = TAU * k as f64 / 256.0;
            let q = c.point(phi);
            let residual = q.x * q.x / (a * a) + q.y * q.y / (b * b) - 1.0;
            assert!(residual.abs() < 1e-12, "residual {residual} at φ={phi}");
        }
    }

    #[test]
    fn offset_circle_examples() {
        let c = make_offset_circle(1.0, 0.5).unwrap();
        assert!((c.r(0.0) - 0.5).abs() < 1e-14);
        assert!((c.r(PI) - 1.5).abs() < 1e-14);
        let conc = make_offset_circle(2.0, 0.0).unwrap();
        assert!((conc.r(1.234) - 2.0).abs() < 1e-14);
        assert!(make_offset_circle(1.0, 1.0).is_err());
    }

    #[test]
    fn offset_circle_lies_on_the_circle() {
        // points of Γ in the O-frame shifted by (x0, 0) satisfy x²+y²=R²
        let (radius, x0) = (1.0, 0.5);
        let c = make_offset_circle(radius, x0).unwrap();
        for k in 0..256 {
            let phi = TAU * k as f64 / 256.0;
            let q = c.point(phi);
            let (x, y) = (q.x + x0, q.y);
            assert!((x * x + y * y - radius * radius).abs() < 1e-12);
        }
    }

    #[test]
    fn trig_poly_convexity_gate() {
        let unit = make_trig_poly(1.0, &[], &[]).unwrap();
        assert!((unit.r(0.7) - 1.0).abs() < 1e-14);
        make_trig_poly(1.0, &[0.0, 0.0, 0.1], &[]).unwrap();
        assert!(matches!(
            make_trig_poly(1.0, &[0.0, 0.9], &[]),
            Err(CurveError::NonConvex(_))
        ));
    }

    #[test]
    fn fermat_oval_on_curve() {
        let c = make_fermat_oval(2).unwrap();
        for k in 0..128 {
            let phi = TAU * k as f64 / 128.0;
            let q = c.point(phi);
            assert!((q.x.powi(4) + q.y.powi(4) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tangent_and_derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let curves = [
            make_ellipse(2.0, 1.0).unwrap(),
            make_offset_circle(1.0, 0.4).unwrap(),
            make_trig_poly(1.0, &[0.0, 0.0, 0.1], &[0.05]).unwrap(),
            make_fermat_oval(2).unwrap(),
        ];
        let h = 1e-5;
        for c in &curves {
            for _ in 0..64 {
                let phi = rng.gen_range(0.0..TAU);
                let fd1 = (c.r(phi + h) - c.r(phi - h)) / (2.0 * h);
                assert!(
                    (fd1 - c.r1(phi)).abs() / (1.0 + c.r1(phi).abs()) < 1e-6,
                    "{}: ṙ mismatch at φ={phi}",
                    c.name()
                );
                let fd2 = (c.r(phi + h) - 2.0 * c.r(phi) + c.r(phi - h)) / (h * h);
                assert!(
                    (fd2 - c.r2(phi)).abs() / (1.0 + c.r2(phi).abs()) < 1e-4,
                    "{}: r̈ mismatch at φ={phi}: fd={fd2} an={}",
                    c.name(),
                    c.r2(phi)
                );
                // tangent vs finite difference of the point map
                let t = c.tangent(phi);
                let fd = c.point(phi + h).sub(c.point(phi - h)).scale(1.0 / (2.0 * h));
                assert!(t.sub(fd).norm() / t.norm() < 1e-6);
            }
        }
    }

    #[test]
    fn circle_point_tangent_example() {
        let c = make_ellipse(1.0, 1.0).unwrap();
        let q = c.point(PI / 2.0);
        assert!(q.dist(PlanePoint::new(0.0, 1.0)) < 1e-14);
        let t = c.tangent(PI / 2.0);
        assert!(t.x < 0.0 && t.y.abs() < 1e-13);
        let e = make_ellipse(2.0, 1.0).unwrap();
        assert!(e.point(0.0).dist(PlanePoint::new(2.0, 0.0)) < 1e-14);
    }

    #[test]
    fn curve_spec_json_roundtrip() {
        let spec = CurveSpec::from_json(r#"{"kind":"ellipse","a":2.0,"b":1.0}"#).unwrap();
        let c = spec.build_support().unwrap();
        assert!((c.r(0.0) - 2.0).abs() < 1e-14);
        let spec = CurveSpec::from_json(
            r#"{"kind":"implicit","poly":[[2,0,1.0],[0,2,1.0],[0,0,-1.0]]}"#,
        )
        .unwrap();
        match spec.build().unwrap() {
            BuiltCurve::Implicit(m) => {
                assert!(m.poly.eval(m.seed.x, m.seed.y).abs() < 1e-10)
            }
            _ => panic!("expected implicit"),
        }
    }
}
