//! Recurrences linking the γ-tensors, the conformal-map coefficients and the geometric factors.
//!
//! Index conventions: `b_k` for `k ≥ 1` with `b_1 = 1`; `μ_k` for `k ≥ -1` with `μ_{-1} = 1`;
//! `σ_k` for `k ≥ 1`. Accessors take the mathematical index.

use crate::bie::GptTable;
use crate::error::{Error, Result};
use crate::sum::CSum;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Complex tensors `γ¹_{kn}`, `γ²_{kn}` for `1 ≤ k, n ≤ order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaTable {
    pub order: usize,
    gamma1: Vec<C64>,
    gamma2: Vec<C64>,
}

impl GammaTable {
    pub fn zeros(order: usize) -> Self {
        GammaTable {
            order,
            gamma1: vec![zero(); order * order],
            gamma2: vec![zero(); order * order],
        }
    }

    fn idx(&self, k: usize, n: usize) -> usize {
        assert!(
            k >= 1 && n >= 1 && k <= self.order && n <= self.order,
            "γ index ({k}, {n}) out of range"
        );
        (k - 1) * self.order + (n - 1)
    }

    pub fn g1(&self, k: usize, n: usize) -> C64 {
        self.gamma1[self.idx(k, n)]
    }

    pub fn g2(&self, k: usize, n: usize) -> C64 {
        self.gamma2[self.idx(k, n)]
    }

    pub fn set(&mut self, k: usize, n: usize, g1: C64, g2: C64) {
        let i = self.idx(k, n);
        self.gamma1[i] = g1;
        self.gamma2[i] = g2;
    }

    /// Leading `order × order` block.
    pub fn truncated(&self, order: usize) -> GammaTable {
        let mut t = GammaTable::zeros(order.min(self.order));
        for k in 1..=t.order {
            for n in 1..=t.order {
                t.set(k, n, self.g1(k, n), self.g2(k, n));
            }
        }
        t
    }
}

/// `γ¹ = [M^cc - M^ss + i(M^cs + M^sc)] / 4πk`, `γ² = [M^cc + M^ss + i(M^cs - M^sc)] / 4πk`,
/// where the first superscript of `M` is the excitation and the second the test harmonic.
pub fn gamma_from_gpt(gpt: &GptTable) -> GammaTable {
    let mut g = GammaTable::zeros(gpt.order);
    for k in 1..=gpt.order {
        for n in 1..=gpt.order {
            let [cc, cs, sc, ss] = gpt.get(k, n);
            let s = 4.0 * PI * k as f64;
            g.set(
                k,
                n,
                C64::new(cc - ss, cs + sc) / s,
                C64::new(cc + ss, cs - sc) / s,
            );
        }
    }
    g
}

/// Inverse of [`gamma_from_gpt`].
pub fn gpt_from_gamma(gamma: &GammaTable) -> GptTable {
    let mut t = GptTable::zeros(gamma.order);
    for k in 1..=gamma.order {
        for n in 1..=gamma.order {
            let s = 4.0 * PI * k as f64;
            let (a, b) = (gamma.g1(k, n) * s, gamma.g2(k, n) * s);
            let cc = 0.5 * (a.re + b.re);
            let ss = 0.5 * (b.re - a.re);
            let cs = 0.5 * (a.im + b.im);
            let sc = 0.5 * (a.im - b.im);
            t.set(k, n, [cc, cs, sc, ss]);
        }
    }
    t
}

/// Coefficients of the powers of a power series `Σ_{j≥1} c_j x^j`:
/// entry `(m, k)` is the coefficient of `x^k` in the `m`-th power, `1 ≤ m ≤ k ≤ K`.
#[derive(Clone, Debug)]
pub struct PowerCoeffTable {
    pub max_k: usize,
    rows: Vec<Vec<C64>>,
}

impl PowerCoeffTable {
    pub fn get(&self, m: usize, k: usize) -> C64 {
        if m == 0 || m > k || k > self.max_k {
            return zero();
        }
        self.rows[m - 1][k]
    }
}

/// `c[j-1]` is `c_j`; missing trailing coefficients are treated as zero.
pub fn series_power_coeffs(c: &[C64], max_k: usize) -> PowerCoeffTable {
    let base = |j: usize| -> C64 {
        if j >= 1 && j <= c.len() {
            c[j - 1]
        } else {
            zero()
        }
    };
    let mut rows: Vec<Vec<C64>> = Vec::with_capacity(max_k);
    let first: Vec<C64> = (0..=max_k).map(base).collect();
    rows.push(first);
    for m in 2..=max_k {
        let prev = &rows[m - 2];
        let mut row = vec![zero(); max_k + 1];
        for k in m..=max_k {
            let mut s = CSum::default();
            for j in (m - 1)..k {
                s.add(prev[j] * base(k - j));
            }
            row[k] = s.value();
        }
        rows.push(row);
    }
    PowerCoeffTable { max_k, rows }
}

/// `μ_{n,k}` table built on the shifted series `Σ μ_{k-2} x^k`; `mu[0]` is `μ_{-1}`.
pub fn mu_power_coeffs(mu: &[C64], max_k: usize) -> PowerCoeffTable {
    series_power_coeffs(mu, max_k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    FromGpts,
    FromScOracle,
    Analytic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricFactors {
    /// `sigma[k-1]` is `σ_k`.
    pub sigma: Vec<C64>,
    pub provenance: Provenance,
}

impl GeometricFactors {
    pub fn new(sigma: Vec<C64>, provenance: Provenance) -> Self {
        GeometricFactors { sigma, provenance }
    }

    pub fn order(&self) -> usize {
        self.sigma.len()
    }

    pub fn get(&self, k: usize) -> C64 {
        self.sigma[k - 1]
    }

    pub fn conj(&self) -> Self {
        GeometricFactors {
            sigma: self.sigma.iter().map(|s| s.conj()).collect(),
            provenance: self.provenance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappingCoefficients {
    pub capacity: f64,
    /// `b[k-1]` is `b_k`.
    pub b: Vec<C64>,
    /// `mu[k+1]` is `μ_k`.
    pub mu: Vec<C64>,
}

impl MappingCoefficients {
    pub fn b(&self, k: usize) -> C64 {
        self.b[k - 1]
    }

    pub fn mu(&self, k: i64) -> C64 {
        self.mu[(k + 1) as usize]
    }

    /// Largest `k` with `b_k` available.
    pub fn b_order(&self) -> usize {
        self.b.len()
    }

    /// Largest `k` with `μ_k` available.
    pub fn mu_order(&self) -> i64 {
        self.mu.len() as i64 - 2
    }
}

/// `C = sqrt(-Re γ²₁₁)`, after checking that `γ²₁₁` is real and negative.
pub fn capacity(gamma: &GammaTable) -> Result<f64> {
    if gamma.order < 1 {
        return Err(Error::InsufficientOrder("γ²₁₁ is required".into()));
    }
    let g = gamma.g2(1, 1);
    if !(g.re < 0.0) {
        return Err(Error::Inconsistent(format!(
            "Re γ²₁₁ = {} must be negative",
            g.re
        )));
    }
    if g.im.abs() > 1e-6 * g.norm() {
        return Err(Error::Inconsistent(format!(
            "Im γ²₁₁ = {:.3e} is not negligible against |γ²₁₁| = {:.3e}",
            g.im,
            g.norm()
        )));
    }
    Ok((-g.re).sqrt())
}

/// Number of GPT orders needed for `σ_1..σ_K`.
pub fn gpt_order_for_sigma(k: usize) -> usize {
    k + 1
}

/// `b_1..b_K` from `γ²_{k1}`, `k ≤ K`, building `b_{m,k}` alongside.
pub fn b_from_gamma(gamma: &GammaTable, k_max: usize) -> Result<Vec<C64>> {
    if k_max > gamma.order {
        return Err(Error::InsufficientOrder(format!(
            "b_{k_max} needs γ²_{{k1}} up to k = {k_max}, table has order {}",
            gamma.order
        )));
    }
    let c = capacity(gamma)?;
    let mut b = vec![one()];
    // table[m-1][k] = b_{m,k}
    let mut table: Vec<Vec<C64>> = vec![vec![zero(); k_max + 1]; k_max];
    if k_max >= 1 {
        table[0][1] = one();
    }
    for k in 2..=k_max {
        for m in 2..=k {
            if m == k {
                table[m - 1][k] = one();
                continue;
            }
            let mut s = CSum::default();
            for j in (m - 1)..k {
                s.add(table[m - 2][j] * b[k - j - 1]);
            }
            table[m - 1][k] = s.value();
        }
        let mut s = CSum::default();
        for m in 2..=k {
            s.add(gamma.g2(m, 1) / c.powi(m as i32 + 1) * table[m - 1][k]);
        }
        let bk = s.value();
        b.push(bk);
        table[0][k] = bk;
    }
    Ok(b)
}

/// `μ_{-1}..μ_{K-1}` from `b_1..b_{K+1}` by the Cauchy-product identity.
pub fn mu_from_b(b: &[C64], k_max: usize) -> Result<Vec<C64>> {
    if b.len() < k_max + 1 {
        return Err(Error::InsufficientOrder(format!(
            "μ_{} needs b up to {}, got {}",
            k_max as i64 - 1,
            k_max + 1,
            b.len()
        )));
    }
    let mut mu = vec![one()];
    for k in 1..=k_max {
        let mut s = CSum::default();
        s.add(-b[k]);
        for j in 2..=k {
            // b_j μ_{k-j}, μ_i stored at i + 1
            s.add(-b[j - 1] * mu[k - j + 1]);
        }
        mu.push(s.value());
    }
    Ok(mu)
}

/// `σ_1..σ_K` from `b_1..b_{K+1}`.
pub fn sigma_from_b(b: &[C64], k_max: usize) -> Result<Vec<C64>> {
    if b.len() < k_max + 1 {
        return Err(Error::InsufficientOrder(format!(
            "σ_{k_max} needs b up to {}, got {}",
            k_max + 1,
            b.len()
        )));
    }
    let mut sigma: Vec<C64> = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut s = CSum::default();
        s.add(b[k] * (k * (k + 1)) as f64);
        for j in 1..k {
            s.add(-b[j] * (j + 1) as f64 * sigma[k - j - 1]);
        }
        sigma.push(s.value());
    }
    Ok(sigma)
}

/// `b_1..b_{K+1}` from `σ_1..σ_K`.
pub fn b_from_sigma(sigma: &[C64], k_max: usize) -> Result<Vec<C64>> {
    if sigma.len() < k_max {
        return Err(Error::InsufficientOrder(format!(
            "b_{} needs σ up to {k_max}, got {}",
            k_max + 1,
            sigma.len()
        )));
    }
    let mut b = vec![one()];
    for k in 1..=k_max {
        let mut s = CSum::default();
        s.add(sigma[k - 1]);
        for j in 1..k {
            s.add(b[j] * (j + 1) as f64 * sigma[k - j - 1]);
        }
        b.push(s.value() / (k * (k + 1)) as f64);
    }
    Ok(b)
}

/// Full γ table of order `N` from `C`, `b_1..b_N` and `μ_{-1}..μ_{2N-1}`.
pub fn gamma_forward(c: f64, b: &[C64], mu: &[C64], n_max: usize) -> Result<GammaTable> {
    let need_mu = 2 * n_max as i64 - 1;
    if b.len() < n_max {
        return Err(Error::InsufficientOrder(format!(
            "order-{n_max} γ table needs b up to {n_max}, got {}",
            b.len()
        )));
    }
    if (mu.len() as i64) - 2 < need_mu {
        return Err(Error::InsufficientOrder(format!(
            "order-{n_max} γ table needs μ up to index {need_mu}, got {}",
            mu.len() as i64 - 2
        )));
    }
    let bt = series_power_coeffs(&b[..n_max], n_max);
    let mt = mu_power_coeffs(&mu[..(need_mu + 2) as usize], 3 * n_max);
    let mut g = GammaTable::zeros(n_max);
    for n in 1..=n_max {
        for k in 1..=n_max {
            let mut s1 = CSum::default();
            let mut s2 = CSum::default();
            for m in 1..k {
                let bmk = bt.get(m, k);
                let cm = c.powi((m + n) as i32);
                s1.add(g.g1(m, n) * bmk / cm);
                s2.add(g.g2(m, n) * bmk / cm);
            }
            let ck = c.powi((k + n) as i32);
            let g1 = (mt.get(n, 2 * n + k) - s1.value()) * ck;
            let g2 = if k <= n {
                -(mt.get(n, 2 * n - k).conj() + s2.value()) * ck
            } else {
                -s2.value() * ck
            };
            g.set(k, n, g1, g2);
        }
    }
    Ok(g)
}

/// `|γ¹₁₁ b_k - C²(μ_k - Σ_{m=2}^k γ¹_{m1} b_{m,k} / C^{m+1})|` for `k = 2..=K`.
pub fn bk2_residual(
    gamma: &GammaTable,
    c: f64,
    b: &[C64],
    mu: &[C64],
    k_max: usize,
) -> Result<Vec<f64>> {
    if k_max > gamma.order || b.len() < k_max || (mu.len() as i64) - 2 < k_max as i64 {
        return Err(Error::InsufficientOrder(format!(
            "residual to k = {k_max} needs γ, b and μ to order {k_max}"
        )));
    }
    let bt = series_power_coeffs(&b[..k_max], k_max);
    let g11 = gamma.g1(1, 1);
    Ok((2..=k_max)
        .map(|k| {
            let mut s = CSum::default();
            for m in 2..=k {
                s.add(gamma.g1(m, 1) * bt.get(m, k) / c.powi(m as i32 + 1));
            }
            (g11 * b[k - 1] - (mu[k + 1] - s.value()) * (c * c)).norm()
        })
        .collect())
}

/// `|μ_{k-1} + b_{k+1} + Σ_{j=2}^k b_j μ_{k-j}|` for `k = 1..=K`.
pub fn cauchy_residuals(b: &[C64], mu: &[C64], k_max: usize) -> Vec<f64> {
    (1..=k_max)
        .filter(|&k| k < b.len() && k < mu.len())
        .map(|k| {
            let mut s = CSum::default();
            s.add(mu[k]);
            s.add(b[k]);
            for j in 2..=k {
                s.add(b[j - 1] * mu[k - j + 1]);
            }
            s.value().norm()
        })
        .collect()
}

/// Everything the GPTs determine: `C`, `b_1..b_N`, `μ_{-1}..μ_{N-2}`, `σ_1..σ_{N-1}`.
pub fn coefficients_from_gamma(
    gamma: &GammaTable,
) -> Result<(MappingCoefficients, GeometricFactors)> {
    let n = gamma.order;
    if n < 2 {
        return Err(Error::InsufficientOrder(
            "at least two GPT orders are needed for one geometric factor".into(),
        ));
    }
    let capacity = capacity(gamma)?;
    let b = b_from_gamma(gamma, n)?;
    let mu = mu_from_b(&b, n - 1)?;
    let sigma = sigma_from_b(&b, n - 1)?;
    Ok((
        MappingCoefficients { capacity, b, mu },
        GeometricFactors::new(sigma, Provenance::FromGpts),
    ))
}
