//! Schwarz–Christoffel ground truth for polygons and the polygon approximation of curves.

use crate::coeffs::{sigma_from_b, GeometricFactors, Provenance};
use crate::error::{Error, Result};
use crate::geometry::{first_self_intersection, winding_number, TracedCurve};
use crate::quadrature::{gauss_jacobi, Rule};
use crate::sum::CSum;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Counterclockwise polygon with optional Schwarz–Christoffel pre-vertices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<C64>,
    pub betas: Vec<f64>,
    pub pre_vertices: Option<Vec<C64>>,
}

/// `β_j π` is the signed turn from edge `A_{j-1}A_j` to edge `A_jA_{j+1}`.
pub fn polygon_external_angles(vertices: &[C64]) -> Vec<f64> {
    let n = vertices.len();
    (0..n)
        .map(|j| {
            let inc = vertices[j] - vertices[(j + n - 1) % n];
            let out = vertices[(j + 1) % n] - vertices[j];
            (out / inc).arg() / PI
        })
        .collect()
}

impl Polygon {
    pub fn new(vertices: Vec<C64>, pre_vertices: Option<Vec<C64>>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidParameter(
                "a polygon needs at least 3 vertices".into(),
            ));
        }
        if let Some((i, j)) = first_self_intersection(&vertices) {
            return Err(Error::NotSimple(format!("edges {i} and {j} cross")));
        }
        let betas = polygon_external_angles(&vertices);
        let total: f64 = betas.iter().sum();
        if (total - 2.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "external angles sum to {total}; the polygon must be simple and counterclockwise"
            )));
        }
        if winding_number(&vertices, C64::new(0.0, 0.0)) != 1 {
            return Err(Error::InvalidParameter(
                "polygon must contain the origin".into(),
            ));
        }
        if let Some(a) = &pre_vertices {
            if a.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: a.len(),
                });
            }
            if a.iter().any(|z| (z.norm() - 1.0).abs() > 1e-12) {
                return Err(Error::InvalidParameter(
                    "pre-vertices must lie on the unit circle".into(),
                ));
            }
            let angles: Vec<f64> = a.iter().map(|z| z.arg().rem_euclid(2.0 * PI)).collect();
            let start = angles[0];
            let rel: Vec<f64> = angles
                .iter()
                .map(|x| (x - start).rem_euclid(2.0 * PI))
                .collect();
            if rel.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidParameter(
                    "pre-vertices must be distinct and counterclockwise".into(),
                ));
            }
        }
        Ok(Polygon {
            vertices,
            betas,
            pre_vertices,
        })
    }

    /// Regular polygon with `n` vertices at radius `r`, one of them at angle `phase`.
    ///
    /// Pre-vertices of a regular polygon centred at the origin are the directions of its
    /// vertices, by rotational symmetry of the map.
    pub fn regular(n: usize, r: f64, phase: f64) -> Result<Self> {
        let v: Vec<C64> = (0..n)
            .map(|j| C64::from_polar(r, phase + 2.0 * PI * j as f64 / n as f64))
            .collect();
        let a = v.iter().map(|z| z / z.norm()).collect();
        Polygon::new(v, Some(a))
    }

    /// Fill in pre-vertices when the polygon is regular and centred at the origin.
    pub fn infer_pre_vertices(mut self) -> Result<Self> {
        if self.pre_vertices.is_some() {
            return Ok(self);
        }
        let n = self.vertices.len();
        let r = self.vertices[0].norm();
        let rot = C64::from_polar(1.0, 2.0 * PI / n as f64);
        let regular = (0..n)
            .all(|j| (self.vertices[(j + 1) % n] - self.vertices[j] * rot).norm() < 1e-10 * r);
        if !regular {
            return Err(Error::InvalidParameter(
                "pre-vertices are required for polygons that are not regular and centred".into(),
            ));
        }
        self.pre_vertices = Some(self.vertices.iter().map(|z| z / z.norm()).collect());
        Ok(self)
    }

    fn pre(&self) -> Result<&[C64]> {
        self.pre_vertices
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("polygon has no pre-vertices".into()))
    }
}

/// `Σ_j β_j a_j^{-k}` for `k = 1..=K`.
pub fn sigma_from_prevertices(poly: &Polygon, k_max: usize) -> Result<GeometricFactors> {
    let a = poly.pre()?;
    let sigma = (1..=k_max)
        .map(|k| {
            let mut s = CSum::default();
            for (aj, bj) in a.iter().zip(&poly.betas) {
                s.add(aj.powi(-(k as i32)) * *bj);
            }
            s.value()
        })
        .collect();
    Ok(GeometricFactors::new(sigma, Provenance::FromScOracle))
}

/// Taylor coefficients of the interior map from `π = Π(1 - z/a_j)^{-β_j}`.
///
/// Returns `b_1..b_{K+1}` and `σ_1..σ_K`, the latter through the `b → σ` recurrence so that the
/// two routes to `σ` are independent.
pub fn sc_taylor(poly: &Polygon, k_max: usize) -> Result<(Vec<C64>, GeometricFactors)> {
    let st = sigma_from_prevertices(poly, k_max)?.sigma;
    // p_k = π^{(k)}(0)/k!; π'/π = Σ σ̃_m z^{m-1} gives k p_k = Σ_{j<k} p_j σ̃_{k-j}
    let mut p = vec![C64::new(1.0, 0.0)];
    for k in 1..=k_max {
        let mut s = CSum::default();
        for j in 0..k {
            s.add(p[j] * st[k - j - 1]);
        }
        p.push(s.value() / k as f64);
    }
    let b: Vec<C64> = p
        .iter()
        .enumerate()
        .map(|(k, pk)| pk / (k + 1) as f64)
        .collect();
    let sigma = sigma_from_b(&b, k_max)?;
    Ok((b, GeometricFactors::new(sigma, Provenance::FromScOracle)))
}

/// `1 - e^{iδ}` raised to `-β` on the principal branch, for real `δ`.
fn boundary_factor(delta: f64, beta: f64) -> C64 {
    let d = wrap_angle(delta);
    let modulus = 2.0 * (0.5 * d).sin().abs();
    C64::from_polar(modulus.powf(-beta), -beta * half_turn_arg(d))
}

/// `boundary_factor(δ, β) |δ|^β`, bounded as `δ -> 0`.
fn regular_boundary_factor(delta: f64, beta: f64) -> C64 {
    let d = wrap_angle(delta);
    let ratio = if d == 0.0 {
        1.0
    } else {
        2.0 * (0.5 * d).sin().abs() / d.abs()
    };
    C64::from_polar(ratio.powf(-beta), -beta * half_turn_arg(d))
}

fn wrap_angle(delta: f64) -> f64 {
    if delta.abs() <= PI {
        delta
    } else {
        (delta + PI).rem_euclid(2.0 * PI) - PI
    }
}

fn half_turn_arg(d: f64) -> f64 {
    if d >= 0.0 {
        0.5 * d - 0.5 * PI
    } else {
        0.5 * d + 0.5 * PI
    }
}

const TRACE_NODES: usize = 60;

/// Boundary trace `t -> S(e^{2πit})` of the Schwarz–Christoffel map of a polygon.
pub struct ScTrace {
    pre: Vec<C64>,
    angles: Vec<f64>,
    betas: Vec<f64>,
    /// `C S(a_j)`, the unnormalised images of the pre-vertices.
    images: Vec<C64>,
    pub capacity: f64,
    rules: Vec<Rule>,
}

impl ScTrace {
    pub fn new(poly: &Polygon) -> Result<Self> {
        let pre = poly.pre()?.to_vec();
        let angles: Vec<f64> = pre.iter().map(|a| a.arg().rem_euclid(2.0 * PI)).collect();
        let betas = poly.betas.clone();
        let rules: Vec<Rule> = betas
            .iter()
            .map(|&b| gauss_jacobi(TRACE_NODES, 0.0, -b))
            .collect();
        let mut tr = ScTrace {
            pre,
            angles,
            betas,
            images: Vec::new(),
            capacity: 1.0,
            rules,
        };
        tr.images = (0..tr.pre.len()).map(|j| tr.radial_image(j)).collect();
        let perim = |v: &[C64]| -> f64 {
            (0..v.len())
                .map(|j| (v[(j + 1) % v.len()] - v[j]).norm())
                .sum()
        };
        tr.capacity = perim(&tr.images) / perim(&poly.vertices);
        Ok(tr)
    }

    /// `π(w) = Π (1 - w/a_j)^{-β_j}` inside the disk.
    fn pi(&self, w: C64) -> C64 {
        let mut p = C64::new(1.0, 0.0);
        for (a, b) in self.pre.iter().zip(&self.betas) {
            p *= (C64::new(1.0, 0.0) - w / a).powf(-b);
        }
        p
    }

    /// `∫_0^1 π(r a_j) a_j dr`, Gauss–Jacobi in `1 - r`.
    fn radial_image(&self, j: usize) -> C64 {
        let a = self.pre[j];
        let b = self.betas[j];
        let rule = gauss_jacobi(TRACE_NODES, -b, 0.0);
        let mut s = CSum::default();
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let r = 0.5 * (1.0 + x);
            // π(r a) with the singular factor (1 - r)^{-β} removed
            let mut g = C64::new(1.0, 0.0);
            for (i, (ai, bi)) in self.pre.iter().zip(&self.betas).enumerate() {
                if i != j {
                    g *= (C64::new(1.0, 0.0) - a * r / ai).powf(-bi);
                }
            }
            s.add(g * *w);
        }
        // (1 - r)^{-β} = ((1 - x)/2)^{-β}, dr = dx/2
        s.value() * a * 2f64.powf(b) * 0.5
    }

    /// `C S(e^{iθ})`, integrating along the circle from the nearest pre-vertex.
    fn unnormalised(&self, theta: f64) -> C64 {
        let (j, delta) = self
            .angles
            .iter()
            .enumerate()
            .map(|(j, a)| (j, (theta - a + PI).rem_euclid(2.0 * PI) - PI))
            .min_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .expect("polygon has vertices");
        // the map is Hölder of order 1 - β at a vertex, so a few ulps of angle would move
        // the image visibly; treat them as the vertex itself
        if delta.abs() <= 16.0 * f64::EPSILON * 2.0 * PI {
            return self.images[j];
        }
        let b = self.betas[j];
        let rule = &self.rules[j];
        let th0 = self.angles[j];
        let half = 0.5 * delta;
        let mut s = CSum::default();
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let d = half * (1.0 + x);
            let phi = th0 + d;
            let mut g = C64::new(1.0, 0.0);
            for (i, (ai, bi)) in self.angles.iter().zip(&self.betas).enumerate() {
                if i == j {
                    // |δ|^{-β} is carried by the Jacobi weight
                    g *= regular_boundary_factor(d, *bi);
                } else {
                    g *= boundary_factor(phi - ai, *bi);
                }
            }
            s.add(g * C64::new(0.0, 1.0) * C64::from_polar(1.0, phi) * *w);
        }
        // dφ = (δ/2) dx and |φ - θ_j|^{-β} = (|δ|/2)^{-β} (1 + x)^{-β}
        self.images[j] + s.value() * half * (half.abs()).powf(-b)
    }

    /// `S(e^{2πit})`.
    pub fn eval(&self, t: f64) -> C64 {
        self.unnormalised(2.0 * PI * t) / self.capacity
    }

    /// `S(w)` at an interior point, along the straight segment from 0.
    pub fn eval_interior(&self, w: C64) -> C64 {
        let rule = crate::quadrature::gauss_legendre(TRACE_NODES);
        let mut s = CSum::default();
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            let r = 0.5 * (1.0 + x);
            s.add(self.pi(w * r) * *wt);
        }
        s.value() * w * 0.5 / self.capacity
    }
}

impl TracedCurve for ScTrace {
    fn point(&self, t: f64) -> C64 {
        self.eval(t)
    }

    fn corner_params(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.angles.iter().map(|a| a / (2.0 * PI)).collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

pub fn sc_boundary_trace(poly: &Polygon, t: f64) -> Result<C64> {
    Ok(ScTrace::new(poly)?.eval(t))
}

/// The polygon `P_n` through `α(j/n)` with corner-snapped nodes.
#[derive(Clone, Debug, Serialize)]
pub struct ApproxPolygonData {
    pub n: usize,
    pub nodes: Vec<C64>,
    pub pre_images: Vec<C64>,
    pub betas: Vec<f64>,
    pub snapped: Vec<usize>,
}

pub fn approx_polygon(curve: &dyn TracedCurve, n: usize) -> Result<ApproxPolygonData> {
    if n < 3 {
        return Err(Error::InvalidParameter(
            "the approximating polygon needs n ≥ 3".into(),
        ));
    }
    let mut params: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
    let mut snapped = Vec::new();
    for tl in curve.corner_params() {
        let mut j = ((tl * n as f64).round() as usize) % n;
        let mut tries = 0;
        while snapped.contains(&j) {
            j = (j + 1) % n;
            tries += 1;
            if tries > n {
                return Err(Error::InvalidParameter(
                    "more corners than polygon nodes".into(),
                ));
            }
        }
        params[j] = tl;
        snapped.push(j);
    }
    let nodes: Vec<C64> = params.iter().map(|&t| curve.point(t)).collect();
    if let Some((i, j)) = first_self_intersection(&nodes) {
        return Err(Error::NotSimple(format!(
            "approximating polygon with n = {n} has crossing edges {i} and {j}; increase n"
        )));
    }
    let betas = polygon_external_angles(&nodes);
    let total: f64 = betas.iter().sum();
    if (total - 2.0).abs() > 1e-10 {
        return Err(Error::NotSimple(format!(
            "approximating polygon with n = {n} has turning number {}; increase n",
            total / 2.0
        )));
    }
    let pre_images = params
        .iter()
        .map(|&t| C64::from_polar(1.0, 2.0 * PI * t))
        .collect();
    Ok(ApproxPolygonData {
        n,
        nodes,
        pre_images,
        betas,
        snapped,
    })
}

/// `σ̃_{n,k} = Σ_j β_{n,j} e_{n,j}^{-k}` for `k = 1..=K`.
pub fn sigma_tilde(data: &ApproxPolygonData, k_max: usize) -> GeometricFactors {
    let sigma = (1..=k_max)
        .map(|k| {
            let mut s = CSum::default();
            for (e, b) in data.pre_images.iter().zip(&data.betas) {
                s.add(e.powi(-(k as i32)) * *b);
            }
            s.value()
        })
        .collect();
    GeometricFactors::new(sigma, Provenance::FromScOracle)
}
