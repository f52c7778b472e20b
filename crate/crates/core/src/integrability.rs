//! Numerical verification of the algebraic identities satisfied by a
//! polynomial integral of the angular billiard, and the non-integrability
//! certificate from real singular/inflection points of the dual curve.
//!
//! Working data: an irreducible f cutting out the oval Γ, a cofactor g₁ > 0
//! on the working arc, an exponent k and a half-degree `p_half` with
//! deg(fᵏg₁) = 2·p_half. On the arc, g = g₁^{1/k}, F = f·g and m = p_half/k.
//! The verified identities:
//!
//! * (e1)  F(x+εF_y, y−εF_x)(−μ/ε)^{2m} = F(x+μF_y, y−μF_x) on Γ, where
//!   μ = −(x²+y²)ε / (x²+y² + 2ε(xF_y − yF_x));
//! * (e2)  g³·H(f) = c₁(x²+y²)^{3m−3} on Γ, c₁ constant;
//! * (e4)  g₁⁶·Hess(f̃)^{2k} = −c·(x²+y²)^{6p−6k} on Γ (z = 1 chart).

use serde::Serialize;
use thiserror::Error;

use crate::angular::{orbit, AngularError, AngularState};
use crate::curve::SupportCurve;
use crate::poly::{h_operator, hessian3, homogenize, BivariatePoly};
use crate::trace::{find_real_flexes_and_singular, CurveTrace, PointKind};

#[derive(Debug, Error)]
pub enum IntegrabilityError {
    #[error("g₁ not positive at ({x}, {y}): value {value}")]
    SignViolation { x: f64, y: f64, value: f64 },
    #[error("degree {0} is too low: conics are the integrable case")]
    DegreeTooLow(usize),
    #[error("k·d + q = {0} is odd, so deg F₁ = 2p is impossible")]
    ParityError(usize),
    #[error(transparent)]
    Angular(#[from] AngularError),
}

/// The data (f, g₁, k, p) of a putative polynomial integral F₁ = fᵏg₁.
pub struct IntegralData {
    pub f: BivariatePoly,
    pub g1: BivariatePoly,
    pub k: u32,
    pub p_half: f64,
}

impl IntegralData {
    pub fn m(&self) -> f64 {
        self.p_half / self.k as f64
    }

    fn g1_checked(&self, x: f64, y: f64) -> Result<f64, IntegrabilityError> {
        let v = self.g1.eval(x, y);
        if v <= 0.0 {
            return Err(IntegrabilityError::SignViolation { x, y, value: v });
        }
        Ok(v)
    }

    /// F = f·g₁^{1/k} on the arc where g₁ > 0.
    pub fn big_f(&self, x: f64, y: f64) -> Result<f64, IntegrabilityError> {
        Ok(self.f.eval(x, y) * self.g1_checked(x, y)?.powf(1.0 / self.k as f64))
    }

    /// (F_x, F_y) by the product/chain rule on f·g₁^{1/k}.
    pub fn big_f_grad(&self, x: f64, y: f64) -> Result<(f64, f64), IntegrabilityError> {
        let g1 = self.g1_checked(x, y)?;
        let inv_k = 1.0 / self.k as f64;
        let gp = g1.powf(inv_k);
        let fv = self.f.eval(x, y);
        let (fx, fy) = self.f.gradient_at(x, y);
        let (g1x, g1y) = self.g1.gradient_at(x, y);
        let fac = fv * inv_k * g1.powf(inv_k - 1.0);
        Ok((fx * gp + fac * g1x, fy * gp + fac * g1y))
    }
}

/// Maximum relative drift of `g` along angular orbits from the given seeds.
pub fn invariance_residual(
    curve: &SupportCurve,
    g: impl Fn(f64, f64) -> f64,
    steps: usize,
    seeds: &[AngularState],
) -> Result<f64, IntegrabilityError> {
    let mut worst = 0.0f64;
    for &seed in seeds {
        let (states, _) = orbit(curve, seed, steps)?;
        let q0 = states[0].point();
        let g0 = g(q0.x, q0.y);
        for s in &states {
            let q = s.point();
            worst = worst.max((g(q.x, q.y) - g0).abs() / (1.0 + g0.abs()));
        }
    }
    Ok(worst)
}

/// Relative residual of identity (e1) at a point of Γ for the displacement ε.
pub fn lemma_e1_residual(
    data: &IntegralData,
    x: f64,
    y: f64,
    eps: f64,
) -> Result<f64, IntegrabilityError> {
    let (fx, fy) = data.big_f_grad(x, y)?;
    let r2 = x * x + y * y;
    let mu = -r2 * eps / (r2 + 2.0 * eps * (x * fy - y * fx));
    let lhs = data.big_f(x + eps * fy, y - eps * fx)? * (-mu / eps).powf(2.0 * data.m());
    let rhs = data.big_f(x + mu * fy, y - mu * fx)?;
    Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-30))
}

/// |μ(ε) − Σ_{k=1..terms} (−1)ᵏ t^{k−1} εᵏ| with t = 2(xF_y − yF_x)/(x²+y²);
/// the truncation error is O(ε^{terms+1}).
pub fn mu_series_residual(
    data: &IntegralData,
    x: f64,
    y: f64,
    eps: f64,
    terms: usize,
) -> Result<f64, IntegrabilityError> {
    let (fx, fy) = data.big_f_grad(x, y)?;
    let r2 = x * x + y * y;
    let t = 2.0 * (x * fy - y * fx) / r2;
    let mu = -r2 * eps / (r2 + 2.0 * eps * (x * fy - y * fx));
    let mut sum = 0.0;
    for k in 1..=terms {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * t.powi(k as i32 - 1) * eps.powi(k as i32);
    }
    Ok((mu - sum).abs())
}

/// Constancy check of (e2): mean and relative spread of
/// g₁^{3/k}·H(f)/(x²+y²)^{3m−3} along the trace.
pub fn remarkable_identity(
    data: &IntegralData,
    trace: &CurveTrace,
) -> Result<(f64, f64), IntegrabilityError> {
    let h = h_operator(&data.f);
    let exponent = 3.0 * data.m() - 3.0;
    ratio_statistics(trace, |x, y| {
        let g1 = data.g1_checked(x, y)?;
        Ok(g1.powf(3.0 / data.k as f64) * h.eval(x, y) / (x * x + y * y).powf(exponent))
    })
}

/// Constancy check of (e4) on the z = 1 chart: returns (c, spread) where
/// g₁⁶·Hess(f̃)^{2k}/(x²+y²)^{6p−6k} = −c along the trace.
pub fn e4_constancy_check(
    data: &IntegralData,
    trace: &CurveTrace,
) -> Result<(f64, f64), IntegrabilityError> {
    let f3 = homogenize(&data.f);
    let hess = hessian3(&f3).map_err(|_| IntegrabilityError::DegreeTooLow(data.f.degree()))?;
    let exponent = 6.0 * data.p_half - 6.0 * data.k as f64;
    let (mean, spread) = ratio_statistics(trace, |x, y| {
        let g1 = data.g1_checked(x, y)?;
        Ok(g1.powi(6) * hess.eval(x, y, 1.0).powi(2 * data.k as i32)
            / (x * x + y * y).powf(exponent))
    })?;
    Ok((-mean, spread))
}

fn ratio_statistics(
    trace: &CurveTrace,
    ratio: impl Fn(f64, f64) -> Result<f64, IntegrabilityError>,
) -> Result<(f64, f64), IntegrabilityError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for p in &trace.points {
        let v = ratio(p.x, p.y)?;
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
    }
    let mean = sum / trace.points.len() as f64;
    Ok((mean, (hi - lo) / mean.abs()))
}

/// Degree ledger of the on-curve divisibility argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeLedger {
    pub p_half: usize,
    pub deg_lhs: usize,
    pub deg_rhs: usize,
    pub z_power: usize,
}

/// p = (kd+q)/2; deg g₁⁶(Hess)^{2k} bookkeeping: lhs 12p−8k, rhs 12p−12k,
/// with the z^{4k} factor making up the difference.
pub fn degree_bookkeeping(d: usize, k: usize, q: usize) -> Result<DegreeLedger, IntegrabilityError> {
    let total = k * d + q;
    if total % 2 != 0 {
        return Err(IntegrabilityError::ParityError(total));
    }
    let p_half = total / 2;
    Ok(DegreeLedger {
        p_half,
        deg_lhs: 12 * p_half - 8 * k,
        deg_rhs: 12 * p_half - 12 * k,
        z_power: 4 * k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "NOT_POLY_INTEGRABLE")]
    NotPolyIntegrable,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub kind: PointKind,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CertificateTolerances {
    pub on_curve: f64,
    pub witness_criterion: f64,
    pub min_radius_sq: f64,
}

/// Outcome of the real-witness search: a real singular or inflection point of
/// the curve off {x²+y²=0} rules out polynomial integrability of the
/// Birkhoff billiard inside the dual table.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub assumptions: Vec<String>,
    pub tolerances: CertificateTolerances,
}

const WITNESS_RADIUS_SQ: f64 = 1e-8;

/// Searches the trace for real witnesses and assembles the certificate.
/// Witnesses are re-verified: f = 0 and (H(f) = 0 or ∇f = 0) within 1e-8.
pub fn certify(f: &BivariatePoly, trace: &CurveTrace) -> Result<Certificate, IntegrabilityError> {
    if f.degree() <= 2 {
        return Err(IntegrabilityError::DegreeTooLow(f.degree()));
    }
    let h = h_operator(f);
    let hscale = trace
        .points
        .iter()
        .map(|p| h.eval(p.x, p.y).abs())
        .fold(1e-300, f64::max);
    let mut witnesses = Vec::new();
    for c in find_real_flexes_and_singular(f, trace) {
        if c.x * c.x + c.y * c.y <= WITNESS_RADIUS_SQ {
            continue;
        }
        let on_curve = f.eval(c.x, c.y).abs() < 1e-8;
        let verified = match c.kind {
            PointKind::Inflection => h.eval(c.x, c.y).abs() < 1e-8 * hscale.max(1.0),
            PointKind::Singular => {
                let (gx, gy) = f.gradient_at(c.x, c.y);
                gx.hypot(gy) < 1e-8
            }
        };
        if on_curve && verified {
            witnesses.push(Witness {
                x: c.x,
                y: c.y,
                kind: c.kind,
            });
        }
    }
    let verdict = if witnesses.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::NotPolyIntegrable
    };
    Ok(Certificate {
        verdict,
        witnesses,
        assumptions: vec![
            "f is irreducible over the reals (user-asserted, not verified)".into(),
            "deg f > 2".into(),
            "only real points are examined; complex singular/inflection points are not".into(),
        ],
        tolerances: CertificateTolerances {
            on_curve: 1e-8,
            witness_criterion: 1e-8,
            min_radius_sq: WITNESS_RADIUS_SQ,
        },
    })
}
