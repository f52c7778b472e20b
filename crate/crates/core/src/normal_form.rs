//! Lazutkin-style normal form of the angular billiard near Γ in the
//! coordinates (φ, z = p(φ) − p): expansion coefficients
//! A = ½(p̈+p), B = ⅔Ȧ, the implicit step
//!
//! ```text
//!   z  = p(φ) − p(φ+δ)cos δ + ṗ(φ+δ)sin δ,
//!   z' = z + p(φ+2δ) − p(φ) − 2ṗ(φ+δ)sin δ,     φ' = φ + 2δ,
//! ```
//!
//! and the near-boundary step form φ' = φ + (2/√A)v + O(v²),
//! v' = v + (B/(2A^{3/2}))v² + O(v³) with v = √z, plus the twist profile of
//! the generating function.

use thiserror::Error;

use crate::angular::twist_value;
use crate::curve::SupportCurve;
use crate::solve::{newton_bisect, SolveError};

#[derive(Debug, Error)]
pub enum NormalFormError {
    #[error("δ(z) inversion failed: {0}")]
    DeltaSolve(#[from] SolveError),
}

/// A(φ) = ½(p̈(φ) + p(φ)), the curvature radius of the dual table.
pub fn coeff_a(curve: &SupportCurve, phi: f64) -> f64 {
    0.5 * (curve.p2(phi) + curve.p(phi))
}

/// B(φ) = ⅔ Ȧ(φ), five-point finite difference with step 1e-4.
pub fn coeff_b(curve: &SupportCurve, phi: f64) -> f64 {
    let h = 1e-4;
    let a = |x: f64| coeff_a(curve, x);
    let da = (-a(phi + 2.0 * h) + 8.0 * a(phi + h) - 8.0 * a(phi - h) + a(phi - 2.0 * h))
        / (12.0 * h);
    2.0 / 3.0 * da
}

/// The exact z(φ, δ) of the implicit step.
pub fn z_of(curve: &SupportCurve, phi: f64, delta: f64) -> f64 {
    curve.p(phi) - curve.p(phi + delta) * delta.cos() + curve.p1(phi + delta) * delta.sin()
}

/// |z(δ) − Aδ² − Bδ³|, which must decay like δ⁴.
pub fn z_expansion_residual(curve: &SupportCurve, phi: f64, delta: f64) -> f64 {
    let a = coeff_a(curve, phi);
    let b = coeff_b(curve, phi);
    (z_of(curve, phi, delta) - a * delta * delta - b * delta.powi(3)).abs()
}

/// Log-log slope of the z-expansion residual over the dyadic ladder
/// δ ∈ {0.1, 0.05, 0.025, 0.0125}.
pub fn z_expansion_slope(curve: &SupportCurve, phi: f64) -> f64 {
    let deltas = [0.1, 0.05, 0.025, 0.0125];
    let r0 = z_expansion_residual(curve, phi, deltas[0]);
    let r3 = z_expansion_residual(curve, phi, deltas[3]);
    (r0.ln() - r3.ln()) / (deltas[0].ln() - deltas[3].ln())
}

/// Inverts z(δ) = z for δ by bracketed Newton seeded at δ₀ = √(z/A).
pub fn delta_of_z(curve: &SupportCurve, phi: f64, z: f64) -> Result<f64, NormalFormError> {
    let f = |d: f64| z_of(curve, phi, d) - z;
    let df = |d: f64| (curve.p(phi + d) + curve.p2(phi + d)) * d.sin();
    let seed = (z / coeff_a(curve, phi)).sqrt();
    // ζ is increasing in δ on (0, π); widen until the bracket captures z
    let mut hi = (2.0 * seed).min(3.0);
    while f(hi) < 0.0 && hi < 3.0 {
        hi *= 1.5;
    }
    Ok(newton_bisect(f, df, (0.0, hi.min(3.0)), 1e-15, 200)?)
}

/// Residuals of the near-boundary step form at fiber coordinate v = √z:
/// (|φ' − φ − (2/√A)v|, |v' − v − (B/(2A^{3/2}))v²|).
pub fn lazutkin_step_check(
    curve: &SupportCurve,
    phi: f64,
    v: f64,
) -> Result<(f64, f64), NormalFormError> {
    let z = v * v;
    let delta = delta_of_z(curve, phi, z)?;
    let phi_next = phi + 2.0 * delta;
    let z_next =
        z + curve.p(phi + 2.0 * delta) - curve.p(phi) - 2.0 * curve.p1(phi + delta) * delta.sin();
    let v_next = z_next.max(0.0).sqrt();
    let a = coeff_a(curve, phi);
    let b = coeff_b(curve, phi);
    let res1 = (phi_next - phi - 2.0 / a.sqrt() * v).abs();
    let res2 = (v_next - v - b / (2.0 * a.powf(1.5)) * v * v).abs();
    Ok((res1, res2))
}

/// Minimum of the twist ½(p̈+p)sin δ over uniform φ̄ × δ grids, with
/// δ ∈ [δ_min, π − δ_min].
pub fn twist_profile(
    curve: &SupportCurve,
    phi_grid: usize,
    delta_grid: usize,
    delta_min: f64,
) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..phi_grid {
        let phi_bar = std::f64::consts::TAU * i as f64 / phi_grid as f64;
        for j in 0..delta_grid {
            let delta = delta_min
                + (std::f64::consts::PI - 2.0 * delta_min) * j as f64 / (delta_grid - 1) as f64;
            min = min.min(twist_value(curve, phi_bar, delta));
        }
    }
    min
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::generating_function;
    use crate::curve::make_ellipse;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn circle_coefficients() {
        let c = make_ellipse(2.0, 2.0).unwrap();
        for k in 0..16 {
            let phi = TAU * k as f64 / 16.0;
            assert!((coeff_a(&c, phi) - 0.25).abs() < 1e-12);
            assert!(coeff_b(&c, phi).abs() < 1e-8);
        }
    }

    #[test]
    fn ellipse_a_positive_and_b_matches_fd() {
        let e = make_ellipse(2.0, 1.0).unwrap();
        for k in 0..256 {
            assert!(coeff_a(&e, TAU * k as f64 / 256.0) > 0.0);
        }
        let h = 1e-5;
        let fd = (coeff_a(&e, h) - coeff_a(&e, -h)) / (2.0 * h);
        let b = coeff_b(&e, 0.0);
        assert!((b - 2.0 / 3.0 * fd).abs() < 1e-5 * (1.0 + fd.abs()));
    }

    #[test]
    fn z_expansion_slopes() {
        let c = make_ellipse(1.0, 1.0).unwrap();
        // circle: z = (1 − cos δ), A = ½, B = 0, residual = O(δ⁴)
        let slope = z_expansion_slope(&c, 0.3);
        assert!(slope >= 3.9, "circle slope {slope}");
        let e = make_ellipse(2.0, 1.0).unwrap();
        let slope = z_expansion_slope(&e, 0.7);
        assert!(slope >= 3.9, "ellipse slope {slope}");
        assert_eq!(z_expansion_residual(&e, 0.7, 0.0), 0.0);
    }

    #[test]
    fn circle_step_exact_in_v() {
        let c = make_ellipse(2.0, 2.0).unwrap();
        let (_, res2) = lazutkin_step_check(&c, 1.1, 0.05).unwrap();
        assert!(res2 < 1e-10, "residual₂ {res2}");
    }

    #[test]
    fn ellipse_step_decay_orders() {
        let e = make_ellipse(2.0, 1.0).unwrap();
        let phi = 0.7;
        let (r1a, r2a) = lazutkin_step_check(&e, phi, 0.05).unwrap();
        let (r1b, r2b) = lazutkin_step_check(&e, phi, 0.025).unwrap();
        assert!(r1a / r1b >= 3.5, "residual₁ ratio {}", r1a / r1b);
        assert!(r2a / r2b >= 7.0, "residual₂ ratio {}", r2a / r2b);
        // both residuals decrease monotonically along the ladder
        let ladder = [0.08, 0.04, 0.02, 0.01, 0.005];
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for v in ladder {
            let r = lazutkin_step_check(&e, phi, v).unwrap();
            assert!(r.0 < prev.0 && r.1 < prev.1, "not monotone at v={v}");
            prev = r;
        }
    }

    #[test]
    fn twist_profile_positive_and_matches_fd() {
        let dmin = 1e-3;
        let c = make_ellipse(1.0, 1.0).unwrap();
        let min = twist_profile(&c, 64, 64, dmin);
        assert!((min - 0.5 * dmin.sin()).abs() < 1e-12);
        let e = make_ellipse(2.0, 1.0).unwrap();
        assert!(twist_profile(&e, 128, 64, dmin) > 0.0);
        // FD cross-check of the mixed partial at random nodes
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let h = 1e-4;
        for _ in 0..20 {
            let phi1 = rng.gen_range(0.0..TAU);
            let delta = rng.gen_range(0.05..(PI - 0.05));
            let phi2 = phi1 + 2.0 * delta;
            let tw = twist_value(&e, phi1 + delta, delta);
            let fd = (generating_function(&e, phi1 + h, phi2 + h)
                - generating_function(&e, phi1 + h, phi2 - h)
                - generating_function(&e, phi1 - h, phi2 + h)
                + generating_function(&e, phi1 - h, phi2 - h))
                / (4.0 * h * h);
            assert!((tw - fd).abs() < 1e-4 * (1.0 + tw.abs()));
        }
    }
}
