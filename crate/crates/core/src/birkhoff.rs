//! The Birkhoff billiard map on oriented lines meeting a convex table γ,
//! together with polynomial-integral evaluation in (σ, v_x, v_y).
//!
//! Tables are built as polar duals of a `SupportCurve` Γ: the supporting
//! function of γ is p(ψ) = 1/r(ψ) and the boundary is the envelope
//! γ(ψ) = p(ψ)n(ψ) + ṗ(ψ)n⊥(ψ) with n = (cos ψ, sin ψ).

use thiserror::Error;

use crate::curve::SupportCurve;
use crate::geometry::{OrientedLine, PlanePoint};
use crate::solve::{newton_bisect, scan_brackets, SolveError};

/// Incidence threshold: |⟨v, n̂⟩| below this counts as a tangential chord.
pub const TANGENTIAL_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum BirkhoffError {
    #[error("line is tangent to the table: |⟨v,n⟩| = {dot:e}")]
    TangentialChord { dot: f64 },
    #[error("line does not intersect the table")]
    NoIntersection,
    #[error("polynomial is not homogeneous of degree {expected}: term of degree {found}")]
    NotHomogeneous { expected: usize, found: usize },
    #[error("target degree {n} and monomial degree {found} have different parity")]
    ParityMismatch { n: usize, found: usize },
    #[error("chord solve failed: {0}")]
    ChordSolve(#[from] SolveError),
}

/// Convex billiard table: polar dual of a Γ given by its polar function.
pub struct BirkhoffTable {
    curve: SupportCurve,
}

fn n_of(psi: f64) -> PlanePoint {
    PlanePoint::new(psi.cos(), psi.sin())
}

fn n_perp_of(psi: f64) -> PlanePoint {
    PlanePoint::new(-psi.sin(), psi.cos())
}

impl BirkhoffTable {
    pub fn from_dual(curve: SupportCurve) -> Self {
        Self { curve }
    }

    pub fn dual_curve(&self) -> &SupportCurve {
        &self.curve
    }

    /// Supporting function p(ψ) = 1/r(ψ).
    pub fn support(&self, psi: f64) -> f64 {
        self.curve.p(psi)
    }

    pub fn support_d1(&self, psi: f64) -> f64 {
        self.curve.p1(psi)
    }

    pub fn support_d2(&self, psi: f64) -> f64 {
        self.curve.p2(psi)
    }

    /// Boundary point γ(ψ) = p n + ṗ n⊥.
    pub fn point(&self, psi: f64) -> PlanePoint {
        let (p, p1) = (self.curve.p(psi), self.curve.p1(psi));
        n_of(psi).scale(p).add(n_perp_of(psi).scale(p1))
    }

    /// Boundary velocity γ̇(ψ) = (p + p̈) n⊥ (counterclockwise).
    pub fn velocity(&self, psi: f64) -> PlanePoint {
        let a = self.curve.p(psi) + self.curve.p2(psi);
        n_perp_of(psi).scale(a)
    }

    /// Outward unit normal at γ(ψ).
    pub fn outward_normal(&self, psi: f64) -> PlanePoint {
        n_of(psi)
    }

    /// Unit tangent in the counterclockwise direction.
    pub fn unit_tangent(&self, psi: f64) -> PlanePoint {
        n_perp_of(psi)
    }
}

/// Oriented chord of the table; `last_hit` caches the boundary parameter of
/// the most recent reflection point.
#[derive(Debug, Clone, Copy)]
pub struct BilliardLineState {
    pub line: OrientedLine,
    pub last_hit: Option<f64>,
}

impl BilliardLineState {
    pub fn new(line: OrientedLine) -> Self {
        Self {
            line,
            last_hit: None,
        }
    }

    /// Same chord traversed backwards.
    pub fn reversed(&self) -> Self {
        Self {
            line: self.line.reversed(),
            last_hit: self.last_hit,
        }
    }
}

/// Boundary parameters where the line meets γ: roots of
/// h(ψ) = p(ψ)cos(ψ−φ_l) − ṗ(ψ)sin(ψ−φ_l) − p_l.
pub fn boundary_hits(
    table: &BirkhoffTable,
    line: &OrientedLine,
) -> Result<Vec<f64>, BirkhoffError> {
    let (phi_l, p_l) = (line.phi(), line.p());
    let h = |psi: f64| {
        let d = psi - phi_l;
        table.support(psi) * d.cos() - table.support_d1(psi) * d.sin() - p_l
    };
    let dh = |psi: f64| {
        let d = psi - phi_l;
        -(table.support(psi) + table.support_d2(psi)) * d.sin()
    };
    let tau = std::f64::consts::TAU;
    let brackets = scan_brackets(h, 0.0, tau, 2048);
    let mut roots: Vec<f64> = Vec::new();
    for b in brackets {
        let psi = newton_bisect(h, dh, b, 1e-14, 100)?;
        if roots
            .iter()
            .all(|&q| (q - psi).abs() > 1e-9 && (q - psi).abs() < tau - 1e-9)
        {
            roots.push(psi);
        }
    }
    if roots.is_empty() {
        return Err(BirkhoffError::NoIntersection);
    }
    Ok(roots)
}

/// One Birkhoff reflection: advance to the exit point of the chord and
/// reflect the direction in the boundary normal there.
pub fn reflect(
    table: &BirkhoffTable,
    state: &BilliardLineState,
) -> Result<BilliardLineState, BirkhoffError> {
    let v = state.line.direction();
    let hits = boundary_hits(table, &state.line)?;
    // exit point: largest parameter along the direction of travel
    let (psi_exit, q_exit) = hits
        .iter()
        .map(|&psi| (psi, table.point(psi)))
        .max_by(|a, b| v.dot(a.1).total_cmp(&v.dot(b.1)))
        .unwrap();
    let n = table.outward_normal(psi_exit);
    let vn = v.dot(n);
    if vn.abs() < TANGENTIAL_TOL {
        return Err(BirkhoffError::TangentialChord { dot: vn });
    }
    let v_out = v.sub(n.scale(2.0 * vn));
    Ok(BilliardLineState {
        line: OrientedLine::through(q_exit, v_out),
        last_hit: Some(psi_exit),
    })
}

/// Iterates `reflect`; the returned states include the initial one.
pub fn billiard_orbit(
    table: &BirkhoffTable,
    start: BilliardLineState,
    n: usize,
) -> Result<Vec<BilliardLineState>, BirkhoffError> {
    let mut states = Vec::with_capacity(n + 1);
    states.push(start);
    let mut cur = start;
    for _ in 0..n {
        cur = reflect(table, &cur)?;
        states.push(cur);
    }
    Ok(states)
}

/// Homogeneous polynomial Φ(σ, v_x, v_y) of even degree n, a candidate
/// integral of the billiard on unit-speed lines.
#[derive(Debug, Clone)]
pub struct IntegralPoly {
    degree: usize,
    /// (σ-power, v_x-power, v_y-power, coefficient)
    terms: Vec<(usize, usize, usize, f64)>,
}

impl IntegralPoly {
    pub fn new(
        terms: Vec<(usize, usize, usize, f64)>,
        degree: usize,
    ) -> Result<Self, BirkhoffError> {
        for &(ks, kx, ky, c) in &terms {
            if c != 0.0 && ks + kx + ky != degree {
                return Err(BirkhoffError::NotHomogeneous {
                    expected: degree,
                    found: ks + kx + ky,
                });
            }
        }
        Ok(Self { degree, terms })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[(usize, usize, usize, f64)] {
        &self.terms
    }

    pub fn eval(&self, sigma: f64, vx: f64, vy: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(ks, kx, ky, c)| c * sigma.powi(ks as i32) * vx.powi(kx as i32) * vy.powi(ky as i32))
            .sum()
    }
}

/// Φ evaluated on a unit-speed oriented line: σ = p, (v_x, v_y) = direction.
pub fn eval_integral(phi: &IntegralPoly, line: &OrientedLine) -> f64 {
    let v = line.direction();
    phi.eval(line.p(), v.x, v.y)
}

/// Homogenizes a mixed-degree polynomial in (σ, v_x, v_y) to degree `n` by
/// multiplying each monomial of degree n − 2j by (v_x² + v_y²)ʲ.
pub fn homogenize_integral(
    raw: &[(usize, usize, usize, f64)],
    n: usize,
) -> Result<IntegralPoly, BirkhoffError> {
    fn binom(n: usize, k: usize) -> f64 {
        let mut out = 1.0;
        for i in 0..k {
            out = out * (n - i) as f64 / (i + 1) as f64;
        }
        out
    }
    let mut terms: Vec<(usize, usize, usize, f64)> = Vec::new();
    for &(ks, kx, ky, c) in raw {
        if c == 0.0 {
            continue;
        }
        let deg = ks + kx + ky;
        if deg > n || (n - deg) % 2 != 0 {
            return Err(BirkhoffError::ParityMismatch { n, found: deg });
        }
        let j = (n - deg) / 2;
        for i in 0..=j {
            let key = (ks, kx + 2 * i, ky + 2 * (j - i));
            let coeff = c * binom(j, i);
            if let Some(t) = terms
                .iter_mut()
                .find(|t| (t.0, t.1, t.2) == key)
            {
                t.3 += coeff;
            } else {
                terms.push((key.0, key.1, key.2, coeff));
            }
        }
    }
    IntegralPoly::new(terms, n)
}

/// max |Φ(p(ψ), n⊥(ψ))| over a uniform grid: the tangential values (i1) that
/// must vanish for a genuine integral pair.
pub fn tangential_values(phi: &IntegralPoly, table: &BirkhoffTable, grid: usize) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..grid {
        let psi = std::f64::consts::TAU * (k as f64 + 0.5) / grid as f64;
        let t = table.unit_tangent(psi);
        let val = phi.eval(table.support(psi), t.x, t.y);
        worst = worst.max(val.abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::make_ellipse;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn circle_table() -> BirkhoffTable {
        BirkhoffTable::from_dual(make_ellipse(1.0, 1.0).unwrap())
    }

    /// Table {a²x² + b²y² = 1}, the dual of Γ = {x²/a² + y²/b² = 1}.
    fn ellipse_table(a: f64, b: f64) -> BirkhoffTable {
        BirkhoffTable::from_dual(make_ellipse(a, b).unwrap())
    }

    /// Φ = v_x²/b² + v_y²/a² − σ², conserved by the billiard in the table
    /// {a²x² + b²y² = 1}.
    fn ellipse_integral(a: f64, b: f64) -> IntegralPoly {
        IntegralPoly::new(
            vec![
                (0, 2, 0, 1.0 / (b * b)),
                (0, 0, 2, 1.0 / (a * a)),
                (2, 0, 0, -1.0),
            ],
            2,
        )
        .unwrap()
    }

    /// Random oriented chord of the table, bounded away from tangency.
    fn random_chord(rng: &mut impl Rng, table: &BirkhoffTable) -> BilliardLineState {
        loop {
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let pmax = table.support(phi);
            let p = rng.gen_range(-0.9 * pmax..0.9 * pmax);
            let line = OrientedLine::new(phi, p);
            if matches!(boundary_hits(table, &line).map(|h| h.len()), Ok(2)) {
                return BilliardLineState::new(line);
            }
        }
    }

    #[test]
    fn circle_diameter_reflects_to_reversed() {
        let t = circle_table();
        let start = BilliardLineState::new(OrientedLine::new(0.0, 0.0));
        let next = reflect(&t, &start).unwrap();
        assert!(next
            .line
            .approx_eq(&OrientedLine::new(PI, 0.0), 1e-10, 1e-10));
        // hit point is (0, 1), the exit along direction (0, 1)
        assert!(t.point(next.last_hit.unwrap()).dist(PlanePoint::new(0.0, 1.0)) < 1e-10);
    }

    #[test]
    fn circle_momentum_conserved() {
        let t = circle_table();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let start = random_chord(&mut rng, &t);
            let p0 = start.line.p().abs();
            let orbit = billiard_orbit(&t, start, 100).unwrap();
            for s in &orbit {
                assert!((s.line.p().abs() - p0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ellipse_integral_conserved() {
        let (a, b) = (2.0, 1.0);
        let t = ellipse_table(a, b);
        let phi = ellipse_integral(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let start = random_chord(&mut rng, &t);
            let v0 = eval_integral(&phi, &start.line);
            let orbit = billiard_orbit(&t, start, 500).unwrap();
            for s in &orbit {
                let v = eval_integral(&phi, &s.line);
                assert!((v - v0).abs() < 1e-8, "drift {} at p0={}", v - v0, v0);
            }
        }
    }

    #[test]
    fn reflection_reversible() {
        let t = ellipse_table(2.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let s = random_chord(&mut rng, &t);
            let fwd = reflect(&t, &s).unwrap();
            let back = reflect(&t, &fwd.reversed()).unwrap();
            assert!(back
                .line
                .approx_eq(&s.line.reversed(), 1e-9, 1e-9));
        }
    }

    #[test]
    fn sigma_squared_returns_p_squared() {
        let phi = IntegralPoly::new(vec![(2, 0, 0, 1.0)], 2).unwrap();
        let line = OrientedLine::new(1.1, 0.7);
        assert!((eval_integral(&phi, &line) - 0.49).abs() < 1e-15);
    }

    #[test]
    fn tangential_values_examples() {
        let (a, b) = (2.0, 1.0);
        let t = ellipse_table(a, b);
        assert!(tangential_values(&ellipse_integral(a, b), &t, 512) < 1e-10);
        // σ² on the unit-circle table evaluates to the constant 1
        let c = circle_table();
        let sigma2 = IntegralPoly::new(vec![(2, 0, 0, 1.0)], 2).unwrap();
        let worst = tangential_values(&sigma2, &c, 512);
        assert!((worst - 1.0).abs() < 1e-12);
        // subtracting the measured constant times |v|ⁿ restores (i1)
        let renorm = IntegralPoly::new(
            vec![(2, 0, 0, 1.0), (0, 2, 0, -worst), (0, 0, 2, -worst)],
            2,
        )
        .unwrap();
        assert!(tangential_values(&renorm, &c, 512) < 1e-12);
    }

    #[test]
    fn homogenize_integral_cases() {
        // v_x² + 1 at n=2 → 2v_x² + v_y²
        let h = homogenize_integral(&[(0, 2, 0, 1.0), (0, 0, 0, 1.0)], 2).unwrap();
        assert!((h.eval(0.3, 1.5, -0.7) - (2.0 * 2.25 + 0.49)).abs() < 1e-12);
        // already homogeneous input is unchanged
        let h2 = homogenize_integral(&[(2, 0, 0, 3.0)], 2).unwrap();
        assert_eq!(h2.terms(), &[(2, 0, 0, 3.0)]);
        // odd monomial with even target degree
        assert!(matches!(
            homogenize_integral(&[(1, 0, 0, 1.0)], 2),
            Err(BirkhoffError::ParityMismatch { .. })
        ));
        // homogenized polynomial agrees with the raw one on |v| = 1
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let raw = [(0, 2, 0, 0.4), (2, 0, 0, -1.2), (0, 0, 0, 0.9)];
        let h3 = homogenize_integral(&raw, 4).unwrap();
        for _ in 0..50 {
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            let s: f64 = rng.gen_range(-2.0..2.0);
            let (vx, vy) = (th.cos(), th.sin());
            let direct: f64 = raw
                .iter()
                .map(|&(ks, kx, ky, c)| {
                    c * s.powi(ks as i32) * vx.powi(kx as i32) * vy.powi(ky as i32)
                })
                .sum();
            assert!((h3.eval(s, vx, vy) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn integral_poly_homogeneity_enforced() {
        assert!(matches!(
            IntegralPoly::new(vec![(1, 0, 0, 1.0)], 2),
            Err(BirkhoffError::NotHomogeneous { .. })
        ));
        // homogeneity under scaling at random t
        let phi = IntegralPoly::new(vec![(2, 2, 0, 1.3), (0, 0, 4, -0.2)], 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let (s, vx, vy) = (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let t = rng.gen_range(0.5..2.0);
            let lhs = phi.eval(t * s, t * vx, t * vy);
            let rhs = t.powi(4) * phi.eval(s, vx, vy);
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn tangent_line_is_tangential_chord() {
        let t = ellipse_table(2.0, 1.0);
        let psi = 0.8;
        let line = OrientedLine::new(psi, t.support(psi));
        match reflect(&t, &BilliardLineState::new(line)) {
            Err(BirkhoffError::TangentialChord { .. }) | Err(BirkhoffError::NoIntersection) => {}
            other => panic!("expected tangential failure, got {other:?}"),
        }
    }

    #[test]
    fn no_intersection_reported() {
        let t = circle_table();
        let line = OrientedLine::new(0.3, 2.5);
        assert!(matches!(
            reflect(&t, &BilliardLineState::new(line)),
            Err(BirkhoffError::NoIntersection)
        ));
    }
}
