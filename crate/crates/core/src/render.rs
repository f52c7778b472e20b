//! Static SVG 1.1 phase portraits: orbit points from a CSV export with
//! optional curve / S-curve / P-curve overlays.

use thiserror::Error;

use crate::angular::{p_curve_point, s_curve_point};
use crate::curve::SupportCurve;
use std::f64::consts::TAU;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("bad orbit CSV: {0}")]
    BadCsv(String),
    #[error("no finite points to render")]
    Empty,
}

/// A styled polyline overlay in plane coordinates.
#[derive(Debug, Clone)]
pub struct Overlay {
    pub points: Vec<(f64, f64)>,
    /// SVG stroke color.
    pub stroke: &'static str,
    pub closed: bool,
}

/// Extracts plane points from an orbit CSV: the (x, y) columns if present,
/// otherwise the (phi, p) phase columns. Rows with empty fields are skipped.
pub fn parse_orbit_csv(text: &str) -> Result<Vec<(f64, f64)>, RenderError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| RenderError::BadCsv("empty file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let col = |name: &str| cols.iter().position(|c| *c == name);
    let (ix, iy) = match (col("x"), col("y")) {
        (Some(ix), Some(iy)) => (ix, iy),
        _ => match (col("phi"), col("p")) {
            (Some(ix), Some(iy)) => (ix, iy),
            _ => return Err(RenderError::BadCsv("no x,y or phi,p columns".into())),
        },
    };
    let mut points = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() <= ix.max(iy) {
            return Err(RenderError::BadCsv(format!("short row {}", lineno + 2)));
        }
        let (fx, fy) = (fields[ix], fields[iy]);
        if fx.is_empty() || fy.is_empty() {
            continue;
        }
        let x: f64 = fx
            .parse()
            .map_err(|_| RenderError::BadCsv(format!("bad float in row {}", lineno + 2)))?;
        let y: f64 = fy
            .parse()
            .map_err(|_| RenderError::BadCsv(format!("bad float in row {}", lineno + 2)))?;
        if x.is_finite() && y.is_finite() {
            points.push((x, y));
        }
    }
    Ok(points)
}

/// Closed outline of Γ sampled on a uniform polar grid.
pub fn curve_overlay(curve: &SupportCurve, samples: usize) -> Overlay {
    let points = (0..samples)
        .map(|k| {
            let q = curve.point(TAU * k as f64 / samples as f64);
            (q.x, q.y)
        })
        .collect();
    Overlay { points, stroke: "#1f4e79", closed: true }
}

fn branch_overlays(
    points: impl Iterator<Item = Option<(f64, f64)>>,
    stroke: &'static str,
    max_norm: f64,
) -> Vec<Overlay> {
    let mut overlays = Vec::new();
    let mut branch: Vec<(f64, f64)> = Vec::new();
    for q in points.chain(std::iter::once(None)) {
        match q {
            Some((x, y)) if x.hypot(y) <= max_norm => branch.push((x, y)),
            _ => {
                if branch.len() >= 2 {
                    overlays.push(Overlay {
                        points: std::mem::take(&mut branch),
                        stroke,
                        closed: false,
                    });
                } else {
                    branch.clear();
                }
            }
        }
    }
    overlays
}

/// S-curve branches (red) clipped to |q| ≤ max_norm; the curve escapes to
/// infinity where ṙ → 0, which splits it into branches.
pub fn s_curve_overlays(curve: &SupportCurve, samples: usize, max_norm: f64) -> Vec<Overlay> {
    branch_overlays(
        (0..samples).map(|k| {
            s_curve_point(curve, TAU * k as f64 / samples as f64).map(|q| (q.x, q.y))
        }),
        "#c00000",
        max_norm,
    )
}

/// P-curve branches (green), clipped like the S-curve.
pub fn p_curve_overlays(curve: &SupportCurve, samples: usize, max_norm: f64) -> Vec<Overlay> {
    branch_overlays(
        (0..samples).map(|k| {
            p_curve_point(curve, TAU * k as f64 / samples as f64).map(|q| (q.x, q.y))
        }),
        "#2e7d32",
        max_norm,
    )
}

fn fmt_coord(x: f64) -> String {
    format!("{x:.3}")
}

/// Renders orbit points and overlays into a standalone SVG 1.1 document.
pub fn render_svg(orbit: &[(f64, f64)], overlays: &[Overlay]) -> Result<String, RenderError> {
    let all = orbit
        .iter()
        .chain(overlays.iter().flat_map(|o| o.points.iter()));
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut count = 0usize;
    for &(x, y) in all {
        lo = (lo.0.min(x), lo.1.min(y));
        hi = (hi.0.max(x), hi.1.max(y));
        count += 1;
    }
    if count == 0 {
        return Err(RenderError::Empty);
    }
    let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
    let margin = 0.05 * span;
    let (w, h) = (800.0, 800.0);
    let scale = (w - 2.0 * 40.0) / (span + 2.0 * margin);
    let cx = 0.5 * (lo.0 + hi.0);
    let cy = 0.5 * (lo.1 + hi.1);
    // SVG y grows downward; flip the vertical axis
    let map = |x: f64, y: f64| ((x - cx) * scale + w / 2.0, (cy - y) * scale + h / 2.0);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    for o in overlays {
        if o.points.len() < 2 {
            continue;
        }
        let pts: Vec<String> = o
            .points
            .iter()
            .map(|&(x, y)| {
                let (u, v) = map(x, y);
                format!("{},{}", fmt_coord(u), fmt_coord(v))
            })
            .collect();
        let tag = if o.closed { "polygon" } else { "polyline" };
        svg.push_str(&format!(
            "<{tag} points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            pts.join(" "),
            o.stroke
        ));
    }
    for &(x, y) in orbit {
        let (u, v) = map(x, y);
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"2\" fill=\"black\"/>\n",
            fmt_coord(u),
            fmt_coord(v)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::{orbit, AngularState};
    use crate::curve::{make_ellipse, make_offset_circle};
    use crate::io::write_angular_orbit_csv;

    #[test]
    fn csv_round_trip_to_svg() {
        let e = make_ellipse(2.0, 1.0).unwrap();
        let (states, diags) = orbit(&e, AngularState::new(0.3, 4.0), 10).unwrap();
        let mut buf = Vec::new();
        write_angular_orbit_csv(&mut buf, &states, &diags).unwrap();
        let pts = parse_orbit_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(pts.len(), 11);
        let mut overlays = vec![curve_overlay(&e, 256)];
        overlays.extend(s_curve_overlays(&e, 512, 20.0));
        overlays.extend(p_curve_overlays(&e, 512, 20.0));
        let svg = render_svg(&pts, &overlays).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("version=\"1.1\""));
        assert_eq!(svg.matches("<circle").count(), 11);
        assert!(svg.contains("polygon"));
        assert!(svg.contains("#c00000") && svg.contains("#2e7d32"));
    }

    #[test]
    fn phase_columns_fallback() {
        let text = "step,phi,p,hit_x,hit_y,integral_value\n0,1.0,2.0,,,\n1,1.5,2.5,0.0,0.0,3.0\n";
        let pts = parse_orbit_csv(text).unwrap();
        assert_eq!(pts, vec![(1.0, 2.0), (1.5, 2.5)]);
    }

    #[test]
    fn bad_csv_rejected() {
        assert!(parse_orbit_csv("a,b\n1,2\n").is_err());
        assert!(parse_orbit_csv("x,y\n1\n").is_err());
        assert!(parse_orbit_csv("x,y\n1,zzz\n").is_err());
        assert!(matches!(render_svg(&[], &[]), Err(RenderError::Empty)));
    }

    #[test]
    fn offset_circle_s_curve_is_straight_overlay() {
        // S-curve of the offset circle is a vertical line in the O frame
        let c = make_offset_circle(1.0, 0.5).unwrap();
        let branches = s_curve_overlays(&c, 1024, 10.0);
        assert!(!branches.is_empty());
        for b in &branches {
            for &(x, _) in &b.points {
                assert!((x - 0.75).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn deterministic_output() {
        let e = make_ellipse(2.0, 1.0).unwrap();
        let overlays = vec![curve_overlay(&e, 128)];
        let a = render_svg(&[(0.0, 3.0)], &overlays).unwrap();
        let b = render_svg(&[(0.0, 3.0)], &overlays).unwrap();
        assert_eq!(a, b);
    }
}
