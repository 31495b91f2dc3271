//! Analytic arcs and their endpoint-relative evaluation.

use crate::C64;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

/// Which end of a piece a relative offset is measured from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum End {
    Start,
    End,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// Straight segment traversed at constant speed.
    Segment { from: C64, to: C64 },
    /// `center + semi_x cos θ + i semi_y sin θ` with `θ = phase + rate (t - t0)`.
    EllipticArc {
        center: C64,
        semi_x: f64,
        semi_y: f64,
        phase: f64,
        rate: f64,
    },
    /// `Σ c_k e^{2πikt}`, `k` counted from zero. Absolute parameter, not shifted by `t0`.
    Polynomial { coeffs: Vec<C64> },
    /// `(-√2 asin(cos φ/√2), -asinh(sin φ))` with `φ = phase + rate (t - t0)`.
    CapFlank { phase: f64, rate: f64 },
    /// `1 / w(1 - t)` for the inner piece `w`.
    Reflected(Box<Piece>),
    /// `conj(w(1 - t))` for the inner piece `w`.
    Mirrored(Box<Piece>),
}

/// One analytic arc of a boundary on the parameter interval `[t0, t1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub shape: Shape,
    pub t0: f64,
    pub t1: f64,
}

fn cis(x: f64) -> C64 {
    C64::new(x.cos(), x.sin())
}

/// `e^{ix} - 1` without cancellation for small `x`.
fn expm1_i(x: f64) -> C64 {
    let h = 0.5 * x;
    C64::new(0.0, 2.0 * h.sin()) * cis(h)
}

/// `asin(a) - asin(b)` accurate when `a` and `b` are close; `diff = a - b` must be supplied exactly.
fn asin_diff(a: f64, b: f64, diff: f64) -> f64 {
    let ra = (1.0 - a * a).max(0.0).sqrt();
    let rb = (1.0 - b * b).max(0.0).sqrt();
    let denom = ra + rb;
    let inner = if denom > 0.0 {
        rb + b * (a + b) / denom
    } else {
        rb
    };
    (diff * inner).clamp(-1.0, 1.0).asin()
}

/// `asinh(a) - asinh(b)` accurate when `a` and `b` are close.
fn asinh_diff(a: f64, b: f64, diff: f64) -> f64 {
    let ra = (1.0 + a * a).sqrt();
    let rb = (1.0 + b * b).sqrt();
    (diff * (rb - b * (a + b) / (ra + rb))).asinh()
}

/// `cos(θ + Δ) - cos θ` and `sin(θ + Δ) - sin θ`.
fn trig_diff(theta: f64, delta: f64) -> (f64, f64) {
    let s = (0.5 * delta).sin();
    let mid = theta + 0.5 * delta;
    (-2.0 * s * mid.sin(), 2.0 * s * mid.cos())
}

impl Piece {
    pub fn new(shape: Shape, t0: f64, t1: f64) -> Self {
        Piece { shape, t0, t1 }
    }

    pub fn len(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Position, velocity and acceleration with respect to the curve parameter.
    pub fn eval(&self, t: f64) -> (C64, C64, C64) {
        match &self.shape {
            Shape::Segment { from, to } => {
                let v = (to - from) / self.len();
                (from + v * (t - self.t0), v, C64::new(0.0, 0.0))
            }
            Shape::EllipticArc {
                center,
                semi_x,
                semi_y,
                phase,
                rate,
            } => {
                let th = phase + rate * (t - self.t0);
                let (s, c) = th.sin_cos();
                let z = center + C64::new(semi_x * c, semi_y * s);
                let v = C64::new(-semi_x * s, semi_y * c) * *rate;
                let a = C64::new(-semi_x * c, -semi_y * s) * (rate * rate);
                (z, v, a)
            }
            Shape::Polynomial { coeffs } => {
                let mut z = C64::new(0.0, 0.0);
                let mut v = z;
                let mut a = z;
                for (k, c) in coeffs.iter().enumerate() {
                    let w = 2.0 * PI * k as f64;
                    let e = c * cis(w * t);
                    z += e;
                    v += e * C64::new(0.0, w);
                    a += e * (-w * w);
                }
                (z, v, a)
            }
            Shape::CapFlank { phase, rate } => {
                let phi = phase + rate * (t - self.t0);
                let (s, c) = phi.sin_cos();
                let x = -SQRT_2 * (FRAC_1_SQRT_2 * c).asin();
                let y = -s.asinh();
                let q = 1.0 - 0.5 * c * c;
                let dx = s / q.sqrt();
                let ddx = 0.5 * c / (q * q.sqrt());
                let p = 1.0 + s * s;
                let dy = -c / p.sqrt();
                let ddy = 2.0 * s / (p * p.sqrt());
                (
                    C64::new(x, y),
                    C64::new(dx, dy) * *rate,
                    C64::new(ddx, ddy) * (rate * rate),
                )
            }
            Shape::Reflected(inner) => {
                let (w, dw, ddw) = inner.eval(1.0 - t);
                let w2 = w * w;
                (w.inv(), dw / w2, 2.0 * dw * dw / (w2 * w) - ddw / w2)
            }
            Shape::Mirrored(inner) => {
                let (w, dw, ddw) = inner.eval(1.0 - t);
                (w.conj(), -dw.conj(), ddw.conj())
            }
        }
    }

    pub fn start(&self) -> C64 {
        self.eval(self.t0).0
    }

    pub fn end(&self) -> C64 {
        self.eval(self.t1).0
    }

    /// `z(t0 + s) - z(t0)` or `z(t1 - s) - z(t1)`, free of cancellation for small `s`.
    pub fn offset(&self, end: End, s: f64) -> C64 {
        // signed parameter step away from the anchor, and the anchor itself
        let (anchor, step) = match end {
            End::Start => (self.t0, s),
            End::End => (self.t1, -s),
        };
        match &self.shape {
            Shape::Segment { from, to } => (to - from) * (step / self.len()),
            Shape::EllipticArc {
                semi_x,
                semi_y,
                phase,
                rate,
                ..
            } => {
                let th = phase + rate * (anchor - self.t0);
                let (dc, ds) = trig_diff(th, rate * step);
                C64::new(semi_x * dc, semi_y * ds)
            }
            Shape::Polynomial { coeffs } => {
                let mut acc = C64::new(0.0, 0.0);
                for (k, c) in coeffs.iter().enumerate().skip(1) {
                    let w = 2.0 * PI * k as f64;
                    acc += c * cis(w * anchor) * expm1_i(w * step);
                }
                acc
            }
            Shape::CapFlank { phase, rate } => {
                let phi = phase + rate * (anchor - self.t0);
                let delta = rate * step;
                let (dc, ds) = trig_diff(phi, delta);
                let (s0, c0) = phi.sin_cos();
                let (s1, c1) = (phi + delta).sin_cos();
                let dx =
                    -SQRT_2 * asin_diff(FRAC_1_SQRT_2 * c1, FRAC_1_SQRT_2 * c0, FRAC_1_SQRT_2 * dc);
                let dy = -asinh_diff(s1, s0, ds);
                C64::new(dx, dy)
            }
            Shape::Reflected(inner) => {
                let other = match end {
                    End::Start => End::End,
                    End::End => End::Start,
                };
                let w = match other {
                    End::Start => inner.start(),
                    End::End => inner.end(),
                };
                let d = inner.offset(other, s);
                -d / (w * (w + d))
            }
            Shape::Mirrored(inner) => {
                let other = match end {
                    End::Start => End::End,
                    End::End => End::Start,
                };
                inner.offset(other, s).conj()
            }
        }
    }
}

fn same_range(p: &Piece, t0: f64, t1: f64) -> bool {
    (p.t0 - t0).abs() < 1e-12 && (p.t1 - t1).abs() < 1e-12
}

impl Piece {
    /// Same arc seen under `z -> 1/z`, with orientation restored by `t -> 1 - t`.
    pub fn reflected(&self) -> Piece {
        let (t0, t1) = (1.0 - self.t1, 1.0 - self.t0);
        match &self.shape {
            Shape::Reflected(inner) if same_range(inner, t0, t1) => (**inner).clone(),
            _ => Piece::new(Shape::Reflected(Box::new(self.clone())), t0, t1),
        }
    }

    /// Same arc seen under complex conjugation, with orientation restored by `t -> 1 - t`.
    pub fn mirrored(&self) -> Piece {
        let (t0, t1) = (1.0 - self.t1, 1.0 - self.t0);
        match &self.shape {
            Shape::Mirrored(inner) if same_range(inner, t0, t1) => (**inner).clone(),
            _ => Piece::new(Shape::Mirrored(Box::new(self.clone())), t0, t1),
        }
    }
}
