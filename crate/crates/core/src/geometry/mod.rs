//! Piecewise-analytic Jordan boundaries with corners.

mod builtin;
mod piece;
mod spec;

pub use builtin::{
    builtin_curve, cap_constants, triangle_vertex_radius, Builtin, CapConstants,
    SMOOTH_ASYMMETRIC_POLY, SMOOTH_SYMMETRIC_POLY,
};
pub use piece::{End, Piece, Shape};
pub use spec::{CornerSpec, DomainSpec, PieceSpec};

use crate::error::{Error, Result};
use crate::C64;
use std::f64::consts::PI;

/// A corner of the boundary: parameter and external angle `β` (turn of the tangent is `βπ`).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Corner {
    pub t: f64,
    pub beta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CurveSample {
    pub position: C64,
    pub unit_tangent: C64,
    pub outward_normal: C64,
    pub speed: f64,
    pub curvature: f64,
    /// Set when `t` sits exactly on a corner; the sample is then the limit from above.
    pub one_sided: bool,
}

impl CurveSample {
    pub fn from_derivatives(z: C64, v: C64, a: C64, one_sided: bool) -> Self {
        let speed = v.norm();
        let tangent = v / speed;
        CurveSample {
            position: z,
            unit_tangent: tangent,
            outward_normal: C64::new(tangent.im, -tangent.re),
            speed,
            curvature: (v.conj() * a).im / (speed * speed * speed),
            one_sided,
        }
    }
}

/// Closed, positively oriented, piecewise-analytic boundary parametrized over `[0, 1]`.
#[derive(Clone, Debug)]
pub struct BoundaryCurve {
    pieces: Vec<Piece>,
    corners: Vec<Corner>,
}

/// Anything that can be sampled as a closed curve on `[0, 1]`.
pub trait TracedCurve {
    fn point(&self, t: f64) -> C64;
    /// Parameters of the corners, ascending in `[0, 1)`.
    fn corner_params(&self) -> Vec<f64>;
}

impl TracedCurve for BoundaryCurve {
    fn point(&self, t: f64) -> C64 {
        self.position(t)
    }

    fn corner_params(&self) -> Vec<f64> {
        self.corners.iter().map(|c| c.t).collect()
    }
}

/// Tangent turn at a joint, as a fraction of π, in (-1, 1].
fn turn(v_in: C64, v_out: C64) -> f64 {
    (v_out / v_in).arg() / PI
}

const JOINT_TOL: f64 = 1e-12;
const TURN_TOL: f64 = 1e-9;

impl BoundaryCurve {
    /// Build a curve from contiguous pieces, detecting corners from tangent turns at the joints.
    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Self> {
        check_layout(&pieces)?;
        let n = pieces.len();
        let mut corners = Vec::new();
        for i in 0..n {
            let prev = &pieces[(i + n - 1) % n];
            let next = &pieces[i];
            let b = turn(prev.eval(prev.t1).1, next.eval(next.t0).1);
            if b.abs() > TURN_TOL {
                corners.push(Corner {
                    t: next.t0,
                    beta: b,
                });
            }
        }
        Self::validated(pieces, corners)
    }

    /// Build a curve with an explicit corner list, which must agree with the tangent turns.
    pub fn with_corners(pieces: Vec<Piece>, corners: Vec<Corner>) -> Result<Self> {
        let detected = Self::from_pieces(pieces)?;
        if corners.len() != detected.corners.len() {
            return Err(Error::InvalidCurve(format!(
                "{} corners declared but {} tangent discontinuities found",
                corners.len(),
                detected.corners.len()
            )));
        }
        let mut sorted = corners;
        sorted.sort_by(|a, b| a.t.total_cmp(&b.t));
        for (want, got) in sorted.iter().zip(&detected.corners) {
            if (want.t - got.t).abs() > 1e-12 || (want.beta - got.beta).abs() > 1e-6 {
                return Err(Error::InvalidCurve(format!(
                    "declared corner (t={}, beta={}) disagrees with geometry (t={}, beta={})",
                    want.t, want.beta, got.t, got.beta
                )));
            }
        }
        Ok(BoundaryCurve {
            pieces: detected.pieces,
            corners: sorted,
        })
    }

    fn validated(pieces: Vec<Piece>, corners: Vec<Corner>) -> Result<Self> {
        for c in &corners {
            if !(c.beta > -1.0 && c.beta < 1.0) {
                return Err(Error::InvalidCurve(format!(
                    "external angle {} at t={} is outside (-1, 1)",
                    c.beta, c.t
                )));
            }
        }
        let curve = BoundaryCurve { pieces, corners };
        let samples = curve.dense_samples(2048);
        for (t, z, v) in &samples {
            if !(v.norm() > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidCurve(format!("degenerate velocity at t={t}")));
            }
        }
        let pts: Vec<C64> = samples.iter().map(|s| s.1).collect();
        let w = winding_number(&pts, C64::new(0.0, 0.0));
        if w != 1 {
            return Err(Error::InvalidCurve(format!(
                "winding number about the origin is {w}; the curve must enclose 0 counterclockwise"
            )));
        }
        if let Some((i, j)) = first_self_intersection(&pts) {
            return Err(Error::InvalidCurve(format!(
                "boundary is not a Jordan curve: sample segments {i} and {j} intersect"
            )));
        }
        Ok(curve)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn is_smooth(&self) -> bool {
        self.corners.is_empty()
    }

    /// Index of the piece owning `t`; a joint belongs to the piece that starts there.
    pub fn piece_index(&self, t: f64) -> usize {
        let t = t.clamp(0.0, 1.0);
        match self.pieces.iter().position(|p| t < p.t1) {
            Some(i) => i,
            None => self.pieces.len() - 1,
        }
    }

    pub fn position(&self, t: f64) -> C64 {
        self.pieces[self.piece_index(t)].eval(t).0
    }

    /// Position, tangent, normal, speed and curvature at `t`.
    pub fn eval(&self, t: f64) -> CurveSample {
        let t = if t >= 1.0 { t - 1.0 } else { t };
        let i = self.piece_index(t);
        let (z, v, a) = self.pieces[i].eval(t);
        let one_sided = self.corners.iter().any(|c| c.t == t);
        CurveSample::from_derivatives(z, v, a, one_sided)
    }

    /// `z(t_l + t) - z(t_l)` for corner `l`, accurate for small `|t|`.
    pub fn local_param(&self, l: usize, t: f64) -> C64 {
        let tl = self.corners[l].t;
        if t == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let n = self.pieces.len();
        let after = self.piece_index(tl);
        if t > 0.0 {
            self.pieces[after].offset(End::Start, t)
        } else {
            self.pieces[(after + n - 1) % n].offset(End::End, -t)
        }
    }

    /// Image under `z -> 1/z`, reparametrized by `t -> 1 - t`; external angles change sign.
    pub fn reflect(&self) -> Result<Self> {
        if self.dense_samples(2048).iter().any(|s| s.1.norm() == 0.0) {
            return Err(Error::InvalidCurve(
                "curve passes through the origin".into(),
            ));
        }
        let pieces: Vec<Piece> = self.pieces.iter().rev().map(Piece::reflected).collect();
        let corners = self.mapped_corners(-1.0);
        Self::validated(pieces, corners)
    }

    /// Mirror image across the real axis, reparametrized by `t -> 1 - t`.
    pub fn mirror(&self) -> Result<Self> {
        let pieces: Vec<Piece> = self.pieces.iter().rev().map(Piece::mirrored).collect();
        let corners = self.mapped_corners(1.0);
        Self::validated(pieces, corners)
    }

    fn mapped_corners(&self, sign: f64) -> Vec<Corner> {
        let mut c: Vec<Corner> = self
            .corners
            .iter()
            .map(|c| Corner {
                t: if c.t == 0.0 { 0.0 } else { 1.0 - c.t },
                beta: sign * c.beta,
            })
            .collect();
        c.sort_by(|a, b| a.t.total_cmp(&b.t));
        c
    }

    /// Samples `(t, z(t), z'(t))`, `per_piece` per piece, endpoints excluded at the top.
    fn dense_samples(&self, total: usize) -> Vec<(f64, C64, C64)> {
        let per = (total / self.pieces.len()).max(16);
        let mut out = Vec::with_capacity(per * self.pieces.len());
        for p in &self.pieces {
            for i in 0..per {
                let t = p.t0 + p.len() * i as f64 / per as f64;
                let (z, v, _) = p.eval(t);
                out.push((t, z, v));
            }
        }
        out
    }

    /// Uniformly spaced points of the boundary (by parameter), for plotting and checks.
    pub fn sample_points(&self, n: usize) -> Vec<C64> {
        (0..n).map(|i| self.position(i as f64 / n as f64)).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.sample_points(4096)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let pts = self.sample_points(1024);
        let mut d: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                d = d.max((pts[i] - pts[j]).norm());
            }
        }
        d
    }
}

fn check_layout(pieces: &[Piece]) -> Result<()> {
    if pieces.is_empty() {
        return Err(Error::InvalidCurve("no pieces".into()));
    }
    if pieces[0].t0 != 0.0 || pieces[pieces.len() - 1].t1 != 1.0 {
        return Err(Error::InvalidCurve("pieces must cover [0, 1]".into()));
    }
    let scale = pieces
        .iter()
        .map(|p| p.start().norm().max(p.end().norm()))
        .fold(1e-300, f64::max);
    for (i, p) in pieces.iter().enumerate() {
        if !(p.t1 > p.t0) {
            return Err(Error::InvalidCurve(format!("piece {i} has an empty range")));
        }
        let next = &pieces[(i + 1) % pieces.len()];
        if i + 1 < pieces.len() && p.t1 != next.t0 {
            return Err(Error::InvalidCurve(format!(
                "piece {i} ends at t={} but piece {} starts at t={}",
                p.t1,
                i + 1,
                next.t0
            )));
        }
        let gap = (p.end() - next.start()).norm();
        if gap > JOINT_TOL * scale {
            return Err(Error::InvalidCurve(format!(
                "gap of {gap:.3e} between the end of piece {i} and the start of the next"
            )));
        }
    }
    Ok(())
}

/// Winding number of the closed polyline through `pts` about `z0`.
pub fn winding_number(pts: &[C64], z0: C64) -> i64 {
    let n = pts.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = pts[i] - z0;
        let b = pts[(i + 1) % n] - z0;
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

fn segments_cross(p1: C64, p2: C64, q1: C64, q2: C64) -> bool {
    let cross = |o: C64, a: C64, b: C64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// First pair of non-adjacent edges of the closed polyline that properly intersect.
pub fn first_self_intersection(pts: &[C64]) -> Option<(usize, usize)> {
    let n = pts.len();
    // bounding boxes let most pairs be skipped cheaply
    let boxes: Vec<(f64, f64, f64, f64)> = (0..n)
        .map(|i| {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            (
                a.re.min(b.re),
                a.re.max(b.re),
                a.im.min(b.im),
                a.im.max(b.im),
            )
        })
        .collect();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = (boxes[i], boxes[j]);
            if a.1 < b.0 || b.1 < a.0 || a.3 < b.2 || b.3 < a.2 {
                continue;
            }
            if segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(r: f64) -> BoundaryCurve {
        builtin_curve(Builtin::Disk, &[r]).unwrap()
    }

    #[test]
    fn unit_circle_quarter_point() {
        let s = circle(1.0).eval(0.25);
        assert!((s.position - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((s.outward_normal - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((s.speed - 2.0 * PI).abs() < 1e-13);
        assert!((s.curvature - 1.0).abs() < 1e-13);
        assert!(!s.one_sided);
    }

    #[test]
    fn ellipse_vertex_curvature() {
        let e = builtin_curve(Builtin::Ellipse, &[2.0, 1.0]).unwrap();
        let s = e.eval(0.0);
        assert!((s.position - C64::new(2.0, 0.0)).norm() < 1e-15);
        assert!((s.curvature - 2.0).abs() < 1e-13);
    }

    #[test]
    fn cap_segment_is_straight() {
        let cap = builtin_curve(Builtin::CapShaped, &[]).unwrap();
        let k = cap_constants();
        for i in 1..10 {
            let t = k.t1 + (k.t2 - k.t1) * i as f64 / 10.0;
            let s = cap.eval(t);
            assert_eq!(s.curvature, 0.0);
            assert!((s.position.im + 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn cap_corners() {
        let cap = builtin_curve(Builtin::CapShaped, &[]).unwrap();
        let ts: Vec<f64> = cap.corners().iter().map(|c| c.t).collect();
        assert_eq!(ts.len(), 3);
        assert_eq!(ts[0], 0.0);
        assert!((ts[1] - 0.1122).abs() < 5e-5);
        assert!((ts[2] - 0.4731).abs() < 5e-5);
        let s = cap.eval(0.0);
        assert!(s.one_sided);
    }

    #[test]
    fn corner_sample_is_limit_from_above() {
        let cap = builtin_curve(Builtin::CapShaped, &[]).unwrap();
        let t1 = cap.corners()[1].t;
        let s = cap.eval(t1);
        let after = cap.eval(t1 + 1e-9);
        assert!(s.one_sided);
        assert!((s.unit_tangent - after.unit_tangent).norm() < 1e-6);
    }

    #[test]
    fn reflection_of_circles() {
        let r = circle(2.0).reflect().unwrap();
        for i in 0..16 {
            let t = i as f64 / 16.0;
            assert!((r.position(t).norm() - 0.5).abs() < 1e-15);
        }
        let u = circle(1.0).reflect().unwrap();
        assert!((u.position(0.1).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn double_reflection_is_pointwise_identity() {
        let cap = builtin_curve(Builtin::CapShaped, &[]).unwrap();
        let back = cap.reflect().unwrap().reflect().unwrap();
        for i in 0..200 {
            let t = i as f64 / 200.0;
            assert!((back.position(t) - cap.position(t)).norm() < 1e-12);
        }
        assert_eq!(back.corners().len(), cap.corners().len());
        for (a, b) in back.corners().iter().zip(cap.corners()) {
            assert!((a.t - b.t).abs() < 1e-15);
            assert_eq!(a.beta, b.beta);
        }
    }

    #[test]
    fn reflection_flips_external_angles() {
        let omega = builtin_curve(Builtin::ReflectedEquilateralTriangle, &[]).unwrap();
        let tri = omega.reflect().unwrap();
        for c in tri.corners() {
            assert_eq!(c.beta, 2.0 / 3.0);
        }
        for c in omega.corners() {
            assert_eq!(c.beta, -2.0 / 3.0);
        }
    }

    #[test]
    fn local_param_matches_segment_length() {
        let cap = builtin_curve(Builtin::CapShaped, &[]).unwrap();
        let k = cap_constants();
        let t = 1e-4;
        let d = cap.local_param(1, t);
        assert!((d - C64::new(2.0 * PI * k.c * t, 0.0)).norm() < 1e-15);
        assert_eq!(cap.local_param(0, 0.0), C64::new(0.0, 0.0));
    }

    #[test]
    fn local_param_relative_accuracy_at_tiny_offsets() {
        // reference: offset at a moderate step rescaled is not an oracle; instead compare the
        // tiny-step offset with the first-order Taylor term z'(t_l ± 0) t, whose error is O(t^2)
        let cap = builtin_curve(Builtin::CapShaped, &[]).unwrap();
        for l in 0..3 {
            let tl = cap.corners()[l].t;
            let i = cap.piece_index(tl);
            let n = cap.pieces().len();
            let v_after = cap.pieces()[i].eval(tl).1;
            let prev = &cap.pieces()[(i + n - 1) % n];
            let v_before = prev.eval(prev.t1).1;
            let t = 1e-12;
            let fwd = cap.local_param(l, t);
            let bwd = cap.local_param(l, -t);
            assert!((fwd - v_after * t).norm() < 1e-10 * fwd.norm());
            assert!((bwd + v_before * t).norm() < 1e-10 * bwd.norm());
        }
    }

    #[test]
    fn winding_rejects_curves_missing_the_origin() {
        let p = Piece::new(
            Shape::EllipticArc {
                center: C64::new(5.0, 0.0),
                semi_x: 1.0,
                semi_y: 1.0,
                phase: 0.0,
                rate: 2.0 * PI,
            },
            0.0,
            1.0,
        );
        assert!(matches!(
            BoundaryCurve::from_pieces(vec![p]),
            Err(Error::InvalidCurve(_))
        ));
    }

    #[test]
    fn clockwise_curve_rejected() {
        let p = Piece::new(
            Shape::EllipticArc {
                center: C64::new(0.0, 0.0),
                semi_x: 1.0,
                semi_y: 1.0,
                phase: 0.0,
                rate: -2.0 * PI,
            },
            0.0,
            1.0,
        );
        assert!(BoundaryCurve::from_pieces(vec![p]).is_err());
    }

    #[test]
    fn velocity_matches_finite_differences_on_builtins() {
        for c in crate::geometry::builtin::all_builtins() {
            for i in 0..97 {
                let t = (i as f64 + 0.5) / 97.0;
                if c.corners().iter().any(|k| (k.t - t).abs() < 1e-4) {
                    continue;
                }
                let h = 1e-6;
                let fd = (c.position(t + h) - c.position(t - h)) / (2.0 * h);
                let s = c.eval(t);
                let v = s.unit_tangent * s.speed;
                assert!((fd - v).norm() < 1e-6 * v.norm());
            }
        }
    }
}
