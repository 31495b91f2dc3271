//! Fourier partial sums of the generalized external angle, the truncated exterior map, and
//! corner detection.

use crate::coeffs::GeometricFactors;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, Corner};
use crate::sum::{CSum, Sum};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Samples of `Θ_m(t) = Σ_{|k|≤m} σ_k e^{2πikt}` with `σ_0 = 2` and `σ_{-k} = conj σ_k`.
///
/// With `σ_k = ∫ Θ e^{-2πikt} dt` this is `2 + 2Σ (Re σ_k cos 2πkt - Im σ_k sin 2πkt)`.
#[derive(Clone, Debug, Serialize)]
pub struct ThetaSeries {
    pub order: usize,
    pub sigma: Vec<C64>,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl ThetaSeries {
    pub fn eval(&self, t: f64) -> f64 {
        theta_value(&self.sigma, t)
    }
}

fn theta_value(sigma: &[C64], t: f64) -> f64 {
    let mut s = Sum::default();
    s.add(2.0);
    for (k, sk) in sigma.iter().enumerate() {
        let (sn, cs) = (2.0 * PI * (k + 1) as f64 * t).sin_cos();
        s.add(2.0 * (sk.re * cs - sk.im * sn));
    }
    s.value()
}

pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / n as f64).collect()
}

pub fn theta_partial(sigma: &GeometricFactors, m: usize, grid: &[f64]) -> Result<ThetaSeries> {
    if m > sigma.order() {
        return Err(Error::InsufficientOrder(format!(
            "Θ_{m} needs σ up to {m}, have {}",
            sigma.order()
        )));
    }
    let s = sigma.sigma[..m].to_vec();
    let values = grid.iter().map(|&t| theta_value(&s, t)).collect();
    Ok(ThetaSeries {
        order: m,
        sigma: s,
        grid: grid.to_vec(),
        values,
    })
}

/// Smooth part `k_g |α'| / π` at `t` and the list of point masses `(t_l, β_l)`.
pub fn theta_analytic(curve: &BoundaryCurve, t: f64) -> (f64, Vec<Corner>) {
    let s = curve.eval(t);
    (s.curvature * s.speed / PI, curve.corners().to_vec())
}

/// `Φ_m(e^{-2πit}) = C Σ_{k=-1}^{m} μ_k e^{2πikt}`; `mu[0]` is `μ_{-1}`.
pub fn phi_truncated(capacity: f64, mu: &[C64], m: usize, grid: &[f64]) -> Result<Vec<C64>> {
    if mu.len() < m + 2 {
        return Err(Error::InsufficientOrder(format!(
            "Φ_{m} needs μ up to {m}, have {}",
            mu.len() as i64 - 2
        )));
    }
    Ok(grid
        .iter()
        .map(|&t| phi_at(capacity, &mu[..m + 2], t))
        .collect())
}

fn phi_at(capacity: f64, mu: &[C64], t: f64) -> C64 {
    let mut s = CSum::default();
    for (i, m) in mu.iter().enumerate() {
        let k = i as f64 - 1.0;
        s.add(m * C64::from_polar(1.0, 2.0 * PI * k * t));
    }
    s.value() * capacity
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DetectConfig {
    /// Threshold in units of the robust scale of `Θ_m - 2`.
    pub tau: f64,
    pub max_peaks: usize,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            tau: 3.0,
            max_peaks: 32,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Peak {
    pub t: f64,
    pub value: f64,
    pub sign: i8,
    /// `Φ_m(e^{-2πit})` when mapping coefficients were supplied.
    pub location: Option<[f64; 2]>,
    /// Another above-threshold extremum was suppressed within the minimum spacing.
    pub merged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Smooth,
    Cornered,
    InsufficientOrder,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayFit {
    pub verdict: Verdict,
    /// Least-squares slope of `log|σ_k|` per index; absent when the tail is identically zero.
    pub slope: Option<f64>,
    pub ratio: Option<f64>,
    /// Symmetry order detected in the data; only multiples of it were fitted.
    pub symmetry: usize,
    pub fitted: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CornerReport {
    pub order: usize,
    pub scale: f64,
    pub threshold: f64,
    pub min_spacing: f64,
    pub peaks: Vec<Peak>,
    pub verdict: Verdict,
    pub decay: Option<DecayFit>,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `1.4826 · median |x - center|`, a standard-deviation estimate that ignores a few large peaks.
pub fn robust_scale(x: &[f64], center: f64) -> f64 {
    let mut dev: Vec<f64> = x.iter().map(|y| (y - center).abs()).collect();
    1.4826 * median(&mut dev)
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Isolated extrema of `|Θ_m - 2|` above `τ` robust standard deviations.
///
/// `mapping` is `(C, μ_{-1}, μ_0, ...)`; when present each peak is located on the boundary
/// through the truncated exterior map. The report's verdict is completed by
/// [`classify_decay`] when `σ` has enough terms.
pub fn detect_corners(
    theta: &ThetaSeries,
    config: &DetectConfig,
    mapping: Option<(f64, &[C64])>,
) -> Result<CornerReport> {
    let m = theta.order.max(1);
    let g = theta.grid.len();
    if g < 8 * m {
        return Err(Error::InvalidParameter(format!(
            "grid of {g} points is too coarse for order {m}; need at least {}",
            8 * m
        )));
    }
    let d: Vec<f64> = theta.values.iter().map(|v| v - 2.0).collect();
    // Θ_m - 2 has mean exactly zero, so deviations are measured from 0 rather than the median
    let scale = robust_scale(&d, 0.0);
    let threshold = config.tau * scale;
    let min_spacing = 1.0 / (2.0 * m as f64);
    let peak_floor = 1e-9;

    let mut cand: Vec<usize> = (0..g)
        .filter(|&i| {
            let a = d[i].abs();
            let l = d[(i + g - 1) % g].abs();
            let r = d[(i + 1) % g].abs();
            a >= l && a > r && a > threshold && a > peak_floor
        })
        .collect();
    cand.sort_by(|&a, &b| d[b].abs().total_cmp(&d[a].abs()));

    let h = 1.0 / g as f64;
    let mut accepted: Vec<(usize, f64, bool)> = Vec::new();
    for i in cand {
        let (y0, ym, yp) = (d[i].abs(), d[(i + g - 1) % g].abs(), d[(i + 1) % g].abs());
        let curv = ym - 2.0 * y0 + yp;
        let shift = if curv != 0.0 {
            (0.5 * (ym - yp) / curv).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        let t = (theta.grid[i] + shift * h).rem_euclid(1.0);
        if let Some(p) = accepted
            .iter_mut()
            .find(|p| circular_distance(p.1, t) < min_spacing)
        {
            p.2 = true;
            continue;
        }
        accepted.push((i, t, false));
    }
    accepted.truncate(config.max_peaks);
    let mut peaks: Vec<Peak> = accepted
        .into_iter()
        .map(|(_, t, merged)| {
            let value = theta.eval(t);
            Peak {
                t,
                value,
                sign: if value >= 2.0 { 1 } else { -1 },
                location: mapping.map(|(c, mu)| {
                    let z = phi_at(c, mu, t);
                    [z.re, z.im]
                }),
                merged,
            }
        })
        .collect();
    peaks.sort_by(|a, b| a.t.total_cmp(&b.t));
    let verdict = if peaks.is_empty() {
        Verdict::InsufficientOrder
    } else {
        Verdict::Cornered
    };
    Ok(CornerReport {
        order: theta.order,
        scale,
        threshold,
        min_spacing,
        peaks,
        verdict,
        decay: None,
    })
}

impl CornerReport {
    /// Attach a decay fit; a peak-free report on decaying data becomes "smooth".
    pub fn with_decay(mut self, fit: DecayFit) -> Self {
        if self.peaks.is_empty() && fit.verdict == Verdict::Smooth {
            self.verdict = Verdict::Smooth;
        }
        self.decay = Some(fit);
        self
    }
}

const ZERO_FLOOR: f64 = 1e-13;
const SYMMETRY_TOL: f64 = 1e-2;
pub const SMOOTH_RATIO: f64 = 0.95;
pub const MIN_DECAY_ORDER: usize = 16;

/// Largest `n ≥ 2` such that `σ_k` off the multiples of `n` is negligible next to the rest.
pub fn detect_symmetry(sigma: &[C64]) -> usize {
    let k_max = sigma.len();
    let mut best = 1;
    for n in 2..=(k_max / 2).max(1) {
        let on = (1..=k_max)
            .filter(|k| k % n == 0)
            .map(|k| sigma[k - 1].norm())
            .fold(0.0, f64::max);
        let off = (1..=k_max)
            .filter(|k| k % n != 0)
            .map(|k| sigma[k - 1].norm())
            .fold(0.0, f64::max);
        if on > ZERO_FLOOR && off <= SYMMETRY_TOL * on {
            best = n;
        }
    }
    best
}

/// Fit `log|σ_k|` against `k` on `[K/2, K]`; slopes below `log 0.95` mean geometric decay.
pub fn classify_decay(sigma: &GeometricFactors) -> Result<DecayFit> {
    let s = &sigma.sigma;
    let k_max = s.len();
    if s.iter().all(|z| z.norm() < ZERO_FLOOR) {
        return Ok(DecayFit {
            verdict: Verdict::Smooth,
            slope: None,
            ratio: None,
            symmetry: 1,
            fitted: Vec::new(),
        });
    }
    if k_max < MIN_DECAY_ORDER {
        return Err(Error::InsufficientOrder(format!(
            "decay classification needs at least {MIN_DECAY_ORDER} geometric factors, have {k_max}"
        )));
    }
    let sym = detect_symmetry(s);
    let lo = k_max.div_ceil(2);
    let fitted: Vec<usize> = (lo..=k_max)
        .filter(|k| k % sym == 0 && s[k - 1].norm() >= ZERO_FLOOR)
        .collect();
    if fitted.len() < 2 {
        return Ok(DecayFit {
            verdict: Verdict::Smooth,
            slope: None,
            ratio: None,
            symmetry: sym,
            fitted,
        });
    }
    let xs: Vec<f64> = fitted.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = fitted.iter().map(|&k| s[k - 1].norm().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(DecayFit {
        verdict: if slope < SMOOTH_RATIO.ln() {
            Verdict::Smooth
        } else {
            Verdict::Cornered
        },
        slope: Some(slope),
        ratio: Some(slope.exp()),
        symmetry: sym,
        fitted,
    })
}
