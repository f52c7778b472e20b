//! Serialization: orbit CSV export, integral/polynomial JSON schemas, and
//! certificate emission. Floats are written with 17 significant digits so the
//! files round-trip to the exact binary values.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angular::{AngularState, CaseTag, StepDiagnostics};
use crate::birkhoff::{eval_integral, BilliardLineState, BirkhoffError, BirkhoffTable, IntegralPoly};
use crate::integrability::Certificate;
use crate::poly::BivariatePoly;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),
    #[error("bad JSON: {0}")]
    BadJson(String),
    #[error("bad integral: {0}")]
    BadIntegral(#[from] BirkhoffError),
}

/// 17-significant-digit decimal form; parses back to the same f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn case_label(case: CaseTag) -> &'static str {
    match case {
        CaseTag::Case1 => "case1",
        CaseTag::Case2 => "case2",
        CaseTag::Case3 => "case3",
    }
}

/// Angular orbit CSV with columns (step, x, y, phi, r, phibar, delta, case).
/// Row 0 is the initial state and leaves the step columns empty; row k ≥ 1
/// carries the diagnostics of the step that produced it.
pub fn write_angular_orbit_csv<W: Write>(
    mut out: W,
    states: &[AngularState],
    diags: &[StepDiagnostics],
) -> Result<(), IoError> {
    writeln!(out, "step,x,y,phi,r,phibar,delta,case")?;
    for (k, s) in states.iter().enumerate() {
        let p = s.point();
        let tail = if k == 0 {
            ",,".to_string()
        } else {
            let d = &diags[k - 1];
            format!(
                "{},{},{}",
                fmt_float(d.phi_bar),
                fmt_float(d.delta),
                case_label(d.case)
            )
        };
        writeln!(
            out,
            "{k},{},{},{},{},{tail}",
            fmt_float(p.x),
            fmt_float(p.y),
            fmt_float(s.phi),
            fmt_float(s.r),
        )?;
    }
    Ok(())
}

/// Birkhoff orbit CSV with columns (step, phi, p, hit_x, hit_y,
/// integral_value). The hit columns give the boundary point the line was
/// reflected at (empty for the initial line); the integral column is empty
/// when no integral is supplied.
pub fn write_birkhoff_orbit_csv<W: Write>(
    mut out: W,
    table: &BirkhoffTable,
    states: &[BilliardLineState],
    integral: Option<&IntegralPoly>,
) -> Result<(), IoError> {
    writeln!(out, "step,phi,p,hit_x,hit_y,integral_value")?;
    for (k, s) in states.iter().enumerate() {
        let hit = match s.last_hit {
            Some(psi) => {
                let q = table.point(psi);
                format!("{},{}", fmt_float(q.x), fmt_float(q.y))
            }
            None => ",".to_string(),
        };
        let value = match integral {
            Some(phi) => fmt_float(eval_integral(phi, &s.line)),
            None => String::new(),
        };
        writeln!(
            out,
            "{k},{},{},{hit},{value}",
            fmt_float(s.line.phi()),
            fmt_float(s.line.p()),
        )?;
    }
    Ok(())
}

/// JSON schema for a homogeneous integral Φ(σ, v_x, v_y):
/// `{"n": N, "terms": [[ksigma, kx, ky, c], ...]}` with
/// ksigma + kx + ky = N for every term.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegralSpec {
    pub n: usize,
    pub terms: Vec<(usize, usize, usize, f64)>,
}

impl IntegralSpec {
    pub fn from_json(json: &str) -> Result<Self, IoError> {
        serde_json::from_str(json).map_err(|e| IoError::BadJson(e.to_string()))
    }

    pub fn build(&self) -> Result<IntegralPoly, IoError> {
        Ok(IntegralPoly::new(self.terms.clone(), self.n)?)
    }
}

/// Parses the polynomial literal format: a JSON list of [i, j, coefficient]
/// triples for the monomials xⁱyʲ.
pub fn poly_from_json(json: &str) -> Result<BivariatePoly, IoError> {
    let triples: Vec<(usize, usize, f64)> =
        serde_json::from_str(json).map_err(|e| IoError::BadJson(e.to_string()))?;
    if triples.is_empty() {
        return Err(IoError::BadJson("empty polynomial".into()));
    }
    Ok(BivariatePoly::from_triples(&triples))
}

/// Pretty-printed certificate JSON (stable field order via serde).
pub fn certificate_to_json(cert: &Certificate) -> String {
    serde_json::to_string_pretty(cert).expect("certificate serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::orbit;
    use crate::birkhoff::billiard_orbit;
    use crate::curve::make_ellipse;
    use crate::geometry::OrientedLine;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn float_format_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let x: f64 = rng.gen_range(-1e6..1e6) * 10f64.powi(rng.gen_range(-12..12));
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn angular_csv_shape() {
        let e = make_ellipse(2.0, 1.0).unwrap();
        let (states, diags) = orbit(&e, AngularState::new(0.3, 4.0), 5).unwrap();
        let mut buf = Vec::new();
        write_angular_orbit_csv(&mut buf, &states, &diags).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], "step,x,y,phi,r,phibar,delta,case");
        assert!(lines[1].ends_with(",,"));
        assert_eq!(lines[2].split(',').count(), 8);
        assert!(lines[2].ends_with("case1") || lines[2].ends_with("case2") || lines[2].ends_with("case3"));
    }

    #[test]
    fn birkhoff_csv_shape_and_integral_column() {
        let e = make_ellipse(2.0, 1.0).unwrap();
        let table = BirkhoffTable::from_dual(e);
        let start = BilliardLineState::new(OrientedLine::new(0.4, 0.2));
        let states = billiard_orbit(&table, start, 4).unwrap();
        let phi = IntegralSpec::from_json(r#"{"n":2,"terms":[[2,0,0,1.0],[0,2,0,-1.0],[0,0,2,-1.0]]}"#)
            .unwrap()
            .build()
            .unwrap();
        let mut buf = Vec::new();
        write_birkhoff_orbit_csv(&mut buf, &table, &states, Some(&phi)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "step,phi,p,hit_x,hit_y,integral_value");
        for l in &lines[1..] {
            assert_eq!(l.split(',').count(), 6);
        }
        // first row has no hit point but still an integral value
        let first: Vec<&str> = lines[1].split(',').collect();
        assert!(first[3].is_empty() && first[4].is_empty() && !first[5].is_empty());
    }

    #[test]
    fn integral_spec_validates_homogeneity() {
        assert!(IntegralSpec::from_json(r#"{"n":4,"terms":[[2,1,0,1.0]]}"#)
            .unwrap()
            .build()
            .is_err());
        let ok = IntegralSpec::from_json(r#"{"n":4,"terms":[[0,4,0,1.0],[0,0,4,2.0]]}"#)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(ok.degree(), 4);
    }

    #[test]
    fn poly_json_parses_triples() {
        let p = poly_from_json("[[4,0,1.0],[0,4,1.0],[0,0,-1.0]]").unwrap();
        assert!((p.eval(1.0, 0.0)).abs() < 1e-15);
        assert!(poly_from_json("[]").is_err());
        assert!(poly_from_json("not json").is_err());
    }

    #[test]
    fn csv_is_byte_stable() {
        let e = make_ellipse(2.0, 1.0).unwrap();
        let (states, diags) = orbit(&e, AngularState::new(0.3, 4.0), 8).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_angular_orbit_csv(&mut a, &states, &diags).unwrap();
        write_angular_orbit_csv(&mut b, &states, &diags).unwrap();
        assert_eq!(a, b);
    }
}
