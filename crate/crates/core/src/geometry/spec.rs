//! JSON domain descriptions.

use super::{builtin_curve, BoundaryCurve, Builtin, Corner, Piece, Shape};
use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

/// Either a named curve with parameters, or an explicit list of pieces.
///
/// ```json
/// {"curve": "ellipse", "params": [2.0, 1.0]}
/// {"pieces": [{"kind": "segment", "coeffs": [1, 0, 0, 1], "t_range": [0, 0.5]}, ...],
///  "corners": [{"t": 0.0, "beta": 0.5}]}
/// ```
///
/// `"reflect": true` replaces the described curve by its image under `z -> 1/z`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<PieceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corners: Option<Vec<CornerSpec>>,
    #[serde(default)]
    pub reflect: bool,
}

/// `kind` is one of `segment` (`[x0, y0, x1, y1]`), `elliptic_arc`
/// (`[cx, cy, semi_x, semi_y, phase, rate]`), `polynomial` (`[re0, im0, re1, im1, ...]`)
/// or `cap_flank` (`[phase, rate]`).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub kind: String,
    pub coeffs: Vec<f64>,
    pub t_range: [f64; 2],
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CornerSpec {
    pub t: f64,
    pub beta: f64,
}

impl DomainSpec {
    pub fn named(curve: Builtin, params: &[f64]) -> Self {
        let name = serde_json::to_value(curve)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string));
        DomainSpec {
            curve: name,
            params: params.to_vec(),
            ..Default::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<BoundaryCurve> {
        let curve = match (&self.curve, self.pieces.is_empty()) {
            (Some(name), true) => builtin_curve(name.parse()?, &self.params)?,
            (None, false) => {
                let pieces = self
                    .pieces
                    .iter()
                    .map(PieceSpec::to_piece)
                    .collect::<Result<Vec<_>>>()?;
                match &self.corners {
                    Some(c) => BoundaryCurve::with_corners(
                        pieces,
                        c.iter()
                            .map(|c| Corner {
                                t: c.t,
                                beta: c.beta,
                            })
                            .collect(),
                    )?,
                    None => BoundaryCurve::from_pieces(pieces)?,
                }
            }
            (Some(_), false) => {
                return Err(Error::Parse(
                    "give either a named curve or a piece list, not both".into(),
                ))
            }
            (None, true) => return Err(Error::Parse("domain has neither curve nor pieces".into())),
        };
        if self.reflect {
            curve.reflect()
        } else {
            Ok(curve)
        }
    }
}

impl PieceSpec {
    fn to_piece(&self) -> Result<Piece> {
        let c = &self.coeffs;
        let want = |n: usize| -> Result<()> {
            if c.len() != n {
                return Err(Error::Parse(format!(
                    "piece kind '{}' takes {n} coefficients, got {}",
                    self.kind,
                    c.len()
                )));
            }
            Ok(())
        };
        let shape = match self.kind.as_str() {
            "segment" => {
                want(4)?;
                Shape::Segment {
                    from: C64::new(c[0], c[1]),
                    to: C64::new(c[2], c[3]),
                }
            }
            "elliptic_arc" => {
                want(6)?;
                Shape::EllipticArc {
                    center: C64::new(c[0], c[1]),
                    semi_x: c[2],
                    semi_y: c[3],
                    phase: c[4],
                    rate: c[5],
                }
            }
            "polynomial" => {
                if c.is_empty() || c.len() % 2 != 0 {
                    return Err(Error::Parse(
                        "polynomial coefficients come in (re, im) pairs".into(),
                    ));
                }
                Shape::Polynomial {
                    coeffs: c.chunks(2).map(|p| C64::new(p[0], p[1])).collect(),
                }
            }
            "cap_flank" => {
                want(2)?;
                Shape::CapFlank {
                    phase: c[0],
                    rate: c[1],
                }
            }
            other => return Err(Error::Parse(format!("unknown piece kind '{other}'"))),
        };
        if c.iter().chain(&self.t_range).any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite number in piece".into()));
        }
        Ok(Piece::new(shape, self.t_range[0], self.t_range[1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_roundtrip() {
        let s = DomainSpec::named(Builtin::Ellipse, &[2.0, 1.0]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(
            text,
            r#"{"curve":"ellipse","params":[2.0,1.0],"reflect":false}"#
        );
        let c = DomainSpec::from_json(&text).unwrap().build().unwrap();
        assert!((c.position(0.0) - C64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn piecewise_square() {
        let text = r#"{"pieces": [
            {"kind": "segment", "coeffs": [1, -1, 1, 1], "t_range": [0, 0.25]},
            {"kind": "segment", "coeffs": [1, 1, -1, 1], "t_range": [0.25, 0.5]},
            {"kind": "segment", "coeffs": [-1, 1, -1, -1], "t_range": [0.5, 0.75]},
            {"kind": "segment", "coeffs": [-1, -1, 1, -1], "t_range": [0.75, 1]}],
            "corners": [{"t": 0, "beta": 0.5}, {"t": 0.25, "beta": 0.5},
                        {"t": 0.5, "beta": 0.5}, {"t": 0.75, "beta": 0.5}]}"#;
        let c = DomainSpec::from_json(text).unwrap().build().unwrap();
        assert_eq!(c.corners().len(), 4);
    }

    #[test]
    fn wrong_corner_declaration_rejected() {
        let text = r#"{"pieces": [
            {"kind": "elliptic_arc", "coeffs": [0, 0, 1, 1, 0, 6.283185307179586], "t_range": [0, 1]}],
            "corners": [{"t": 0, "beta": 0.5}]}"#;
        assert!(DomainSpec::from_json(text).unwrap().build().is_err());
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(DomainSpec::from_json("{"), Err(Error::Parse(_))));
        assert!(matches!(
            DomainSpec::from_json(r#"{"curve": 3}"#),
            Err(Error::Parse(_))
        ));
        let s = DomainSpec::from_json(r#"{"curve": "moon"}"#).unwrap();
        assert!(matches!(s.build(), Err(Error::Parse(_))));
    }
}
