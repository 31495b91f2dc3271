//! Composite Gauss–Legendre panels with dyadic refinement toward corners.

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, CurveSample, End};
use crate::quadrature::gauss_legendre;
use crate::sum::{csum, rsum};
use crate::C64;
use serde::Serialize;

pub const NODES_PER_PANEL: usize = 16;

/// A parameter subinterval of one piece.
///
/// Unanchored panels store absolute parameters. Anchored panels store offsets `s` measured
/// from a corner at one end of the piece, so that panels of length `~2^-30` keep full
/// relative precision.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Panel {
    pub piece: usize,
    pub anchor: Option<(usize, End)>,
    pub lo: f64,
    pub hi: f64,
    /// Dyadic level counted from the base panel (0 for base panels).
    pub level: usize,
}

impl Panel {
    pub fn param_length(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Node {
    /// Absolute parameter; rounded for anchored nodes, use `offset` for geometry.
    pub t: f64,
    pub sample: CurveSample,
    /// Gauss–Legendre weight × half-length × speed.
    pub weight: f64,
    pub panel: usize,
    /// Corner the node is measured from, if any.
    pub anchor: Option<usize>,
    /// `position - corner position` for anchored nodes, computed without cancellation.
    pub offset: C64,
}

#[derive(Clone, Debug)]
pub struct PanelMesh {
    pub panels: Vec<Panel>,
    pub nodes: Vec<Node>,
    pub corner_positions: Vec<C64>,
    pub depth: usize,
    pub base_panels: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeshStats {
    pub panels: usize,
    pub nodes: usize,
    pub base_panels_per_piece: usize,
    pub depth: usize,
    pub min_panel_param_length: f64,
    pub max_panel_arclength: f64,
    pub arclength: f64,
}

impl PanelMesh {
    pub fn build(
        curve: &BoundaryCurve,
        base_panels_per_piece: usize,
        depth: usize,
    ) -> Result<Self> {
        if base_panels_per_piece < 2 {
            return Err(Error::InvalidParameter(
                "at least 2 base panels per piece are required".into(),
            ));
        }
        if depth > 60 {
            return Err(Error::InvalidParameter(format!(
                "refinement depth {depth} exceeds 60"
            )));
        }
        let b = base_panels_per_piece;
        let corner_at = |t: f64| {
            curve
                .corners()
                .iter()
                .position(|c| c.t == t || (t == 1.0 && c.t == 0.0))
        };
        let mut panels = Vec::new();
        for (pi, p) in curve.pieces().iter().enumerate() {
            let h = p.len() / b as f64;
            let start_corner = corner_at(p.t0);
            let end_corner = corner_at(p.t1);
            for k in 0..b {
                let lo = p.t0 + p.len() * k as f64 / b as f64;
                let hi = if k + 1 == b {
                    p.t1
                } else {
                    p.t0 + p.len() * (k + 1) as f64 / b as f64
                };
                if k == 0 && start_corner.is_some() {
                    let c = start_corner.unwrap();
                    // innermost first, so panels stay in increasing t
                    let mut edges = vec![0.0];
                    for lvl in (0..=depth).rev() {
                        edges.push(h / 2f64.powi(lvl as i32));
                    }
                    for w in 0..edges.len() - 1 {
                        panels.push(Panel {
                            piece: pi,
                            anchor: Some((c, End::Start)),
                            lo: edges[w],
                            hi: edges[w + 1],
                            level: if w == 0 { depth } else { depth + 1 - w },
                        });
                    }
                } else if k + 1 == b && end_corner.is_some() {
                    let c = end_corner.unwrap();
                    let mut edges = vec![0.0];
                    for lvl in (0..=depth).rev() {
                        edges.push(h / 2f64.powi(lvl as i32));
                    }
                    for w in (0..edges.len() - 1).rev() {
                        panels.push(Panel {
                            piece: pi,
                            anchor: Some((c, End::End)),
                            lo: edges[w],
                            hi: edges[w + 1],
                            level: if w == 0 { depth } else { depth + 1 - w },
                        });
                    }
                } else {
                    panels.push(Panel {
                        piece: pi,
                        anchor: None,
                        lo,
                        hi,
                        level: 0,
                    });
                }
            }
        }

        let n_pieces = curve.pieces().len();
        let corner_positions: Vec<C64> = curve
            .corners()
            .iter()
            .map(|c| curve.pieces()[curve.piece_index(c.t)].start())
            .collect();
        let _ = n_pieces;

        let rule = gauss_legendre(NODES_PER_PANEL);
        let mut nodes = Vec::with_capacity(panels.len() * NODES_PER_PANEL);
        for (ip, pan) in panels.iter().enumerate() {
            let piece = &curve.pieces()[pan.piece];
            let half = 0.5 * pan.param_length();
            let mid = 0.5 * (pan.lo + pan.hi);
            // node order follows increasing t
            let order: Vec<usize> = match pan.anchor {
                Some((_, End::End)) => (0..NODES_PER_PANEL).rev().collect(),
                _ => (0..NODES_PER_PANEL).collect(),
            };
            for g in order {
                let u = mid + half * rule.nodes[g];
                let (t, anchor, offset) = match pan.anchor {
                    None => (u, None, C64::new(0.0, 0.0)),
                    Some((c, End::Start)) => (piece.t0 + u, Some(c), piece.offset(End::Start, u)),
                    Some((c, End::End)) => (piece.t1 - u, Some(c), piece.offset(End::End, u)),
                };
                let (z, v, a) = piece.eval(t);
                let z = match anchor {
                    Some(c) => corner_positions[c] + offset,
                    None => z,
                };
                let sample = CurveSample::from_derivatives(z, v, a, false);
                nodes.push(Node {
                    t,
                    weight: rule.weights[g] * half * sample.speed,
                    sample,
                    panel: ip,
                    anchor,
                    offset,
                });
            }
        }
        Ok(PanelMesh {
            panels,
            nodes,
            corner_positions,
            depth,
            base_panels: b,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.weight).collect()
    }

    /// `Σ f_i w_i`.
    pub fn integrate(&self, f: &[f64]) -> Result<f64> {
        self.check_len(f.len())?;
        Ok(rsum(f.iter().zip(&self.nodes).map(|(v, n)| v * n.weight)))
    }

    pub fn integrate_complex(&self, f: &[C64]) -> Result<C64> {
        self.check_len(f.len())?;
        Ok(csum(f.iter().zip(&self.nodes).map(|(v, n)| v * n.weight)))
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.nodes.len() {
            return Err(Error::LengthMismatch {
                expected: self.nodes.len(),
                got,
            });
        }
        Ok(())
    }

    pub fn arclength(&self) -> f64 {
        rsum(self.nodes.iter().map(|n| n.weight))
    }

    pub fn max_panel_arclength(&self) -> f64 {
        let mut per = vec![0.0; self.panels.len()];
        for n in &self.nodes {
            per[n.panel] += n.weight;
        }
        per.into_iter().fold(0.0, f64::max)
    }

    /// `x_i - x_j`, using corner-relative offsets when both nodes hang off the same corner.
    #[inline]
    pub fn difference(&self, i: usize, j: usize) -> C64 {
        let (a, b) = (&self.nodes[i], &self.nodes[j]);
        match (a.anchor, b.anchor) {
            (Some(p), Some(q)) if p == q => a.offset - b.offset,
            _ => a.sample.position - b.sample.position,
        }
    }

    pub fn stats(&self) -> MeshStats {
        MeshStats {
            panels: self.panels.len(),
            nodes: self.nodes.len(),
            base_panels_per_piece: self.base_panels,
            depth: self.depth,
            min_panel_param_length: self
                .panels
                .iter()
                .map(Panel::param_length)
                .fold(f64::INFINITY, f64::min),
            max_panel_arclength: self.max_panel_arclength(),
            arclength: self.arclength(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{builtin_curve, Builtin};
    use std::f64::consts::PI;

    #[test]
    fn unit_circle_mesh() {
        let c = builtin_curve(Builtin::Disk, &[1.0]).unwrap();
        let m = PanelMesh::build(&c, 8, 0).unwrap();
        assert_eq!(m.panels.len(), 8);
        assert_eq!(m.len(), 128);
        assert!((m.arclength() - 2.0 * PI).abs() < 1e-13);
        let ones = vec![1.0; m.len()];
        assert!((m.integrate(&ones).unwrap() - 2.0 * PI).abs() < 1e-13);
        let cos2: Vec<f64> = m
            .nodes
            .iter()
            .map(|n| (2.0 * PI * n.t).cos().powi(2))
            .collect();
        assert!((m.integrate(&cos2).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn cap_panel_count() {
        let c = builtin_curve(Builtin::CapShaped, &[]).unwrap();
        let m = PanelMesh::build(&c, 4, 20).unwrap();
        assert_eq!(m.panels.len(), 3 * 4 + 3 * 2 * 20);
    }

    #[test]
    fn panels_increase_in_t_and_never_straddle_corners() {
        let c = builtin_curve(Builtin::CapShaped, &[]).unwrap();
        let m = PanelMesh::build(&c, 4, 12).unwrap();
        for w in m.nodes.windows(2) {
            assert!(w[0].t <= w[1].t);
        }
        for n in &m.nodes {
            assert!(c.corners().iter().all(|k| k.t != n.t));
        }
    }

    #[test]
    fn refinement_halves_toward_corners() {
        let c = builtin_curve(Builtin::CapShaped, &[]).unwrap();
        let m = PanelMesh::build(&c, 4, 10).unwrap();
        let first: Vec<&Panel> = m.panels.iter().take(11).collect();
        assert!(first[0].anchor.is_some());
        for w in first.windows(2).skip(1) {
            assert!((w[1].param_length() / w[0].param_length() - 2.0).abs() < 1e-12);
        }
        let base = c.pieces()[0].len() / 4.0;
        assert!((first[0].param_length() - base / 1024.0).abs() < 1e-15);
    }

    #[test]
    fn ellipse_perimeter() {
        // reference value from an independent adaptive quadrature of 2∫sqrt(4 sin^2 + cos^2)
        let c = builtin_curve(Builtin::Ellipse, &[2.0, 1.0]).unwrap();
        let m = PanelMesh::build(&c, 16, 0).unwrap();
        assert!((m.arclength() - 9.688448220547675).abs() < 1e-10);
    }

    #[test]
    fn length_mismatch() {
        let c = builtin_curve(Builtin::Disk, &[1.0]).unwrap();
        let m = PanelMesh::build(&c, 4, 0).unwrap();
        assert!(matches!(
            m.integrate(&[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn deep_panels_keep_relative_precision() {
        let c = builtin_curve(Builtin::CapShaped, &[]).unwrap();
        let m = PanelMesh::build(&c, 4, 30).unwrap();
        // innermost nodes on both sides of corner 2 must be distinct and ordered
        let near: Vec<&Node> = m.nodes.iter().filter(|n| n.anchor == Some(2)).collect();
        let mut mags: Vec<f64> = near.iter().map(|n| n.offset.norm()).collect();
        mags.sort_by(f64::total_cmp);
        assert!(mags[0] > 0.0 && mags[0] < 1e-9);
        for w in mags.windows(2) {
            assert!(w[1] > w[0]);
        }
    }
}
