//! Named domains.

use super::{BoundaryCurve, Piece, Shape};
use crate::error::{Error, Result};
use crate::C64;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    Disk,
    Ellipse,
    ReflectedEquilateralTriangle,
    CapShaped,
    PolynomialImage,
    PolygonReflection,
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Parse(format!("unknown curve name '{s}'")))
    }
}

/// `z + 0.05 z^4`: a smooth three-fold symmetric image of the disk.
pub const SMOOTH_SYMMETRIC_POLY: [f64; 10] = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.05, 0.0];
/// `z + 0.15 z^2 + 0.06i z^3 + 0.02 z^4`: smooth, no symmetry.
pub const SMOOTH_ASYMMETRIC_POLY: [f64; 10] = [0.0, 0.0, 1.0, 0.0, 0.15, 0.0, 0.0, 0.06, 0.02, 0.0];

/// Constants of the cap-shaped boundary.
#[derive(Clone, Copy, Debug)]
pub struct CapConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub t1: f64,
    pub t2: f64,
}

pub fn cap_constants() -> CapConstants {
    let a = 0.5 - (0.5f64.sinh()).asin() / (2.0 * PI);
    let b = a - 1.0 / (4.0 * PI) - SQRT_2 / 8.0
        + SQRT_2 / (2.0 * PI) * (FRAC_1_SQRT_2 * (2.0 * PI * a).cos()).asin();
    let c = 9.0 / 8.0 - b;
    let t1 = 1.0 / (8.0 * c);
    let t2 = t1 + (a - b) / c;
    CapConstants { a, b, c, t1, t2 }
}

/// Distance from the center to a vertex of the equilateral triangle `S(D)` with
/// `S'(w) = (1 - w^3)^{-2/3}`, i.e. `∫_0^1 (1 - r^3)^{-2/3} dr = Γ(1/3)^2 / (3 Γ(2/3))`.
pub fn triangle_vertex_radius() -> f64 {
    libm::tgamma(1.0 / 3.0).powi(2) / (3.0 * libm::tgamma(2.0 / 3.0))
}

fn need(params: &[f64], n: usize, name: &str) -> Result<()> {
    if params.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{name} takes {n} parameter(s), got {}",
            params.len()
        )));
    }
    Ok(())
}

fn pairs(params: &[f64], name: &str) -> Result<Vec<C64>> {
    if params.is_empty() || params.len() % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "{name} takes a non-empty list of (re, im) pairs"
        )));
    }
    Ok(params.chunks(2).map(|p| C64::new(p[0], p[1])).collect())
}

/// Closed polygon through `vertices`, one unit-speed-in-parameter edge per `1/n`.
pub(crate) fn polygon_curve(vertices: &[C64]) -> Result<BoundaryCurve> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::InvalidParameter(
            "a polygon needs at least 3 vertices".into(),
        ));
    }
    let pieces = (0..n)
        .map(|j| {
            Piece::new(
                Shape::Segment {
                    from: vertices[j],
                    to: vertices[(j + 1) % n],
                },
                j as f64 / n as f64,
                if j + 1 == n {
                    1.0
                } else {
                    (j + 1) as f64 / n as f64
                },
            )
        })
        .collect();
    BoundaryCurve::from_pieces(pieces)
}

pub fn builtin_curve(name: Builtin, params: &[f64]) -> Result<BoundaryCurve> {
    match name {
        Builtin::Disk => {
            need(params, 1, "disk")?;
            let r = params[0];
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "disk radius {r} must be positive"
                )));
            }
            BoundaryCurve::from_pieces(vec![Piece::new(
                Shape::Polynomial {
                    coeffs: vec![C64::new(0.0, 0.0), C64::new(r, 0.0)],
                },
                0.0,
                1.0,
            )])
        }
        Builtin::Ellipse => {
            need(params, 2, "ellipse")?;
            let (a, b) = (params[0], params[1]);
            if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidParameter(
                    "ellipse semi-axes must be positive".into(),
                ));
            }
            BoundaryCurve::from_pieces(vec![Piece::new(
                Shape::EllipticArc {
                    center: C64::new(0.0, 0.0),
                    semi_x: a,
                    semi_y: b,
                    phase: 0.0,
                    rate: 2.0 * PI,
                },
                0.0,
                1.0,
            )])
        }
        Builtin::ReflectedEquilateralTriangle => {
            need(params, 0, "reflected_equilateral_triangle")?;
            let r = triangle_vertex_radius();
            let v: Vec<C64> = (0..3)
                .map(|j| C64::from_polar(r, 2.0 * PI * j as f64 / 3.0))
                .collect();
            let tri = polygon_curve(&v)?;
            let corners = (0..3)
                .map(|j| super::Corner {
                    t: j as f64 / 3.0,
                    beta: 2.0 / 3.0,
                })
                .collect();
            BoundaryCurve::with_corners(tri.pieces, corners)?.reflect()
        }
        Builtin::CapShaped => {
            need(params, 0, "cap_shaped")?;
            cap_curve()
        }
        Builtin::PolynomialImage => {
            let coeffs = pairs(params, "polynomial_image")?;
            if coeffs.len() < 2 {
                return Err(Error::InvalidParameter(
                    "polynomial_image needs at least a linear term".into(),
                ));
            }
            for i in 0..2048 {
                let t = i as f64 / 2048.0;
                let dz: C64 = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| {
                        c * k as f64 * C64::from_polar(1.0, 2.0 * PI * (k - 1) as f64 * t)
                    })
                    .sum();
                if dz.norm() < 1e-12 {
                    return Err(Error::InvalidCurve(
                        "polynomial derivative vanishes on the unit circle".into(),
                    ));
                }
            }
            BoundaryCurve::from_pieces(vec![Piece::new(Shape::Polynomial { coeffs }, 0.0, 1.0)])
        }
        Builtin::PolygonReflection => {
            let v = pairs(params, "polygon_reflection")?;
            polygon_curve(&v)?.reflect()
        }
    }
}

fn cap_curve() -> Result<BoundaryCurve> {
    let k = cap_constants();
    let x_end = -SQRT_2 * (FRAC_1_SQRT_2 * (2.0 * PI * k.a).cos()).asin();
    let pieces = vec![
        Piece::new(
            Shape::EllipticArc {
                center: C64::new(-SQRT_2 * PI / 4.0, -0.5),
                semi_x: 0.5,
                semi_y: 0.5,
                phase: PI / 2.0,
                rate: 4.0 * PI * k.c,
            },
            0.0,
            k.t1,
        ),
        Piece::new(
            Shape::Segment {
                from: C64::new(x_end - 2.0 * PI * k.c * (k.t2 - k.t1), -0.5),
                to: C64::new(x_end, -0.5),
            },
            k.t1,
            k.t2,
        ),
        Piece::new(
            Shape::CapFlank {
                phase: 2.0 * PI * k.a,
                rate: 2.0 * PI * k.c,
            },
            k.t2,
            1.0,
        ),
    ];
    BoundaryCurve::from_pieces(pieces)
}

#[cfg(test)]
pub(crate) fn all_builtins() -> Vec<BoundaryCurve> {
    vec![
        builtin_curve(Builtin::Disk, &[1.0]).unwrap(),
        builtin_curve(Builtin::Ellipse, &[2.0, 1.0]).unwrap(),
        builtin_curve(Builtin::ReflectedEquilateralTriangle, &[]).unwrap(),
        builtin_curve(Builtin::CapShaped, &[]).unwrap(),
        builtin_curve(
            Builtin::PolynomialImage,
            &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1, 0.0],
        )
        .unwrap(),
        builtin_curve(
            Builtin::PolygonReflection,
            &[1.0, 1.0, -1.0, 1.0, -1.0, -1.0, 1.0, -1.0],
        )
        .unwrap(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_constants_match_quoted_decimals() {
        let k = cap_constants();
        assert!((k.t1 - 0.1122).abs() < 5e-5);
        assert!((k.t2 - 0.4731).abs() < 5e-5);
        assert!((k.t1 - 1.0 / (8.0 * k.c)).abs() < 1e-16);
    }

    #[test]
    fn cap_segment_runs_at_speed_2pi_c() {
        let cap = cap_curve().unwrap();
        let k = cap_constants();
        let v = cap.pieces()[1].eval(0.3).1;
        assert!((v - C64::new(2.0 * PI * k.c, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn cap_closes() {
        let cap = cap_curve().unwrap();
        let gap = (cap.pieces()[2].end() - cap.pieces()[0].start()).norm();
        assert!(gap < 1e-14, "gap {gap}");
    }

    #[test]
    fn triangle_radius() {
        // direct quadrature of ∫_0^1 (1 - r^3)^{-2/3} dr after r = 1 - u^3
        let n = 200_000;
        let mut acc = 0.0;
        for i in 0..n {
            let u = (i as f64 + 0.5) / n as f64;
            let r = 1.0 - u * u * u;
            // (1 - r^3) = u^3 (1 + r + r^2), so the u^2 from dr cancels the singularity
            acc += 3.0 * (1.0 + r + r * r).powf(-2.0 / 3.0) / n as f64;
        }
        assert!((acc - triangle_vertex_radius()).abs() < 1e-9);
    }

    #[test]
    fn names_parse() {
        assert_eq!("cap_shaped".parse::<Builtin>().unwrap(), Builtin::CapShaped);
        assert!("blob".parse::<Builtin>().is_err());
    }

    #[test]
    fn non_univalent_polynomial_rejected() {
        // z + 0.6 z^2 has a critical point inside the disk and self-overlaps on the circle
        assert!(builtin_curve(Builtin::PolynomialImage, &[0.0, 0.0, 1.0, 0.0, 0.6, 0.0]).is_err());
    }

    #[test]
    fn bad_parameters() {
        assert!(builtin_curve(Builtin::Disk, &[]).is_err());
        assert!(builtin_curve(Builtin::Disk, &[-1.0]).is_err());
        assert!(builtin_curve(Builtin::Ellipse, &[1.0]).is_err());
    }
}
