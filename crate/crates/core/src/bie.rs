//! Nyström discretization of `(-½I - K*) φ = ν·∇P` and layer-potential evaluation.

use crate::coeffs::GammaTable;
use crate::error::{Error, Result};
use crate::geometry::CurveSample;
use crate::mesh::PanelMesh;
use crate::sum::Sum;
use crate::C64;
use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Cos,
    Sin,
}

/// `P_n^c = Re zⁿ` or `P_n^s = Im zⁿ`.
pub fn harmonic(n: usize, flavor: Flavor, z: C64) -> f64 {
    let p = z.powu(n as u32);
    match flavor {
        Flavor::Cos => p.re,
        Flavor::Sin => p.im,
    }
}

/// `ν·∇P_n^α = Re(n z^{n-1} ν)` or `Im(n z^{n-1} ν)`.
pub fn neumann_data(n: usize, flavor: Flavor, sample: &CurveSample) -> f64 {
    assert!(n >= 1, "harmonic degree must be at least 1");
    let g = sample.position.powu(n as u32 - 1) * n as f64 * sample.outward_normal;
    match flavor {
        Flavor::Cos => g.re,
        Flavor::Sin => g.im,
    }
}

/// Dense `A = -½I - K*` with its LU factorization.
pub struct NpSystem {
    pub matrix: Mat<f64>,
    lu: PartialPivLu<f64>,
    /// `max_j |Σ_i w_i K_ij / w_j - ½|`: the discrete form of `K[1] = ½`.
    pub gauss_defect: f64,
    /// `Σ_j |Σ_i w_i K_ij - ½ w_j| / |∂Ω|`. Near-corner columns, which the plain Nyström rule
    /// cannot resolve, enter with their tiny weights.
    pub gauss_defect_weighted: f64,
    /// `‖A‖_∞`.
    pub norm_inf: f64,
    /// `min |U_ii| / max |U_ii|` of the LU factor, a cheap singularity indicator.
    pub pivot_ratio: f64,
}

#[derive(Clone, Debug)]
pub struct Density {
    pub values: Vec<f64>,
    /// Arclength average of the density.
    pub mean: f64,
}

/// Off-diagonal kernel `⟨x - y, ν_x⟩ / (2π |x - y|²)` without weights.
#[inline]
fn kernel(d: C64, nu: C64) -> f64 {
    (d.re * nu.re + d.im * nu.im) / (2.0 * PI * d.norm_sqr())
}

/// Raw matrix of the weighted adjoint double-layer operator `K_ij = k(x_i, x_j) w_j`.
pub fn np_operator(mesh: &PanelMesh) -> Result<Vec<f64>> {
    let n = mesh.len();
    let mut k = vec![0.0; n * n];
    let bad = k
        .par_chunks_mut(n)
        .enumerate()
        .map(|(i, row)| {
            let xi = &mesh.nodes[i];
            let nu = xi.sample.outward_normal;
            let mut bad = None;
            for (j, slot) in row.iter_mut().enumerate() {
                let wj = mesh.nodes[j].weight;
                if i == j {
                    *slot = xi.sample.curvature / (4.0 * PI) * wj;
                    continue;
                }
                let d = mesh.difference(i, j);
                if d.norm_sqr() == 0.0 {
                    bad = Some((i, j));
                    continue;
                }
                *slot = kernel(d, nu) * wj;
            }
            bad
        })
        .find_any(|b| b.is_some())
        .flatten();
    if let Some((i, j)) = bad {
        return Err(Error::InvalidCurve(format!(
            "mesh nodes {i} and {j} coincide"
        )));
    }
    Ok(k)
}

pub fn assemble_np(mesh: &PanelMesh) -> Result<NpSystem> {
    let n = mesh.len();
    let k = np_operator(mesh)?;
    let mut gauss_defect: f64 = 0.0;
    let mut weighted = Sum::default();
    for j in 0..n {
        let mut s = Sum::default();
        for i in 0..n {
            s.add(mesh.nodes[i].weight * k[i * n + j]);
        }
        let wj = mesh.nodes[j].weight;
        gauss_defect = gauss_defect.max((s.value() / wj - 0.5).abs());
        weighted.add((s.value() - 0.5 * wj).abs());
    }
    let gauss_defect_weighted = weighted.value() / mesh.arclength();
    let matrix = Mat::from_fn(n, n, |i, j| if i == j { -0.5 } else { 0.0 } - k[i * n + j]);
    let norm_inf = (0..n)
        .map(|i| (0..n).map(|j| matrix[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let lu = matrix.partial_piv_lu();
    let u = lu.U();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..n {
        let d = u[(i, i)].abs();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    let pivot_ratio = lo / hi;
    if !(pivot_ratio > 1e-14) {
        return Err(Error::SingularSystem { pivot_ratio });
    }
    Ok(NpSystem {
        matrix,
        lu,
        gauss_defect,
        gauss_defect_weighted,
        norm_inf,
        pivot_ratio,
    })
}

const MEAN_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-10;

impl NpSystem {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Solve for several right-hand sides at once; each column is mean-checked and projected.
    pub fn solve_many(&self, mesh: &PanelMesh, rhs: &[Vec<f64>]) -> Result<Vec<Density>> {
        let n = self.dim();
        let len = mesh.arclength();
        let mut b = Mat::<f64>::zeros(n, rhs.len());
        for (c, r) in rhs.iter().enumerate() {
            if r.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            let integral = mesh.integrate(r)?;
            let scale = mesh.integrate(&r.iter().map(|x| x.abs()).collect::<Vec<_>>())?;
            if scale > 0.0 && integral.abs() > MEAN_TOL * scale {
                return Err(Error::NonZeroMean {
                    mean: integral / scale,
                });
            }
            let mean = integral / len;
            for i in 0..n {
                b[(i, c)] = r[i] - mean;
            }
        }
        let x = self.lu.solve(&b);
        let res = &self.matrix * &x - &b;
        let mut out = Vec::with_capacity(rhs.len());
        for c in 0..rhs.len() {
            // normwise backward error in the infinity norm
            let bn = (0..n).map(|i| b[(i, c)].abs()).fold(0.0, f64::max);
            let xn = (0..n).map(|i| x[(i, c)].abs()).fold(0.0, f64::max);
            let rn = (0..n).map(|i| res[(i, c)].abs()).fold(0.0, f64::max);
            let scale = self.norm_inf * xn + bn;
            if scale > 0.0 && rn > RESIDUAL_TOL * scale {
                return Err(Error::Residual {
                    residual: rn / scale,
                });
            }
            let values: Vec<f64> = (0..n).map(|i| x[(i, c)]).collect();
            let mean = mesh.integrate(&values)? / len;
            out.push(Density { values, mean });
        }
        Ok(out)
    }
}

pub fn solve_density(system: &NpSystem, mesh: &PanelMesh, rhs: &[f64]) -> Result<Density> {
    let mut v = system.solve_many(mesh, &[rhs.to_vec()])?;
    Ok(v.remove(0))
}

/// Contracted GPTs `M^{αβ}_{kn} = ∫ P_k^β φ_n^α ds`, with `α` the excitation and `β` the test
/// harmonic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GptTable {
    pub order: usize,
    /// Row-major over `(k, n)`, each entry `[cc, cs, sc, ss]`.
    pub entries: Vec<[f64; 4]>,
}

impl GptTable {
    pub fn zeros(order: usize) -> Self {
        GptTable {
            order,
            entries: vec![[0.0; 4]; order * order],
        }
    }

    /// `[M^cc, M^cs, M^sc, M^ss]` at `(k, n)`, both 1-based.
    pub fn get(&self, k: usize, n: usize) -> [f64; 4] {
        self.entries[(k - 1) * self.order + (n - 1)]
    }

    pub fn set(&mut self, k: usize, n: usize, v: [f64; 4]) {
        let o = self.order;
        self.entries[(k - 1) * o + (n - 1)] = v;
    }
}

/// Densities `φ_n^α` for `n = 1..=order`, cosine first then sine for each `n`.
pub fn excitation_densities(
    mesh: &PanelMesh,
    system: &NpSystem,
    order: usize,
) -> Result<Vec<Density>> {
    let mut rhs = Vec::with_capacity(2 * order);
    for n in 1..=order {
        for f in [Flavor::Cos, Flavor::Sin] {
            rhs.push(
                mesh.nodes
                    .iter()
                    .map(|nd| neumann_data(n, f, &nd.sample))
                    .collect(),
            );
        }
    }
    system.solve_many(mesh, &rhs)
}

pub fn gpt_table(mesh: &PanelMesh, system: &NpSystem, order: usize) -> Result<GptTable> {
    if order == 0 {
        return Err(Error::InvalidParameter(
            "GPT order must be at least 1".into(),
        ));
    }
    let dens = excitation_densities(mesh, system, order)?;
    gpt_from_densities(mesh, &dens, order)
}

pub(crate) fn gpt_from_densities(
    mesh: &PanelMesh,
    dens: &[Density],
    order: usize,
) -> Result<GptTable> {
    let m = mesh.len();
    // powers[k-1][i] = x_i^k
    let mut powers = vec![vec![C64::new(0.0, 0.0); m]; order];
    for (i, nd) in mesh.nodes.iter().enumerate() {
        let z = nd.sample.position;
        let mut p = z;
        for row in powers.iter_mut() {
            row[i] = p;
            p *= z;
        }
    }
    let mut t = GptTable::zeros(order);
    for k in 1..=order {
        for n in 1..=order {
            let phc = &dens[2 * (n - 1)].values;
            let phs = &dens[2 * (n - 1) + 1].values;
            let mut acc = [Sum::default(); 4];
            for i in 0..m {
                let w = mesh.nodes[i].weight;
                let p = powers[k - 1][i];
                acc[0].add(p.re * phc[i] * w);
                acc[1].add(p.im * phc[i] * w);
                acc[2].add(p.re * phs[i] * w);
                acc[3].add(p.im * phs[i] * w);
            }
            t.set(
                k,
                n,
                [
                    acc[0].value(),
                    acc[1].value(),
                    acc[2].value(),
                    acc[3].value(),
                ],
            );
        }
    }
    Ok(t)
}

/// `(1/2π) ∫ log|z - y| φ(y) ds(y)` at a target well separated from the boundary.
pub fn single_layer_eval(mesh: &PanelMesh, density: &[f64], z: C64) -> Result<f64> {
    if density.len() != mesh.len() {
        return Err(Error::LengthMismatch {
            expected: mesh.len(),
            got: density.len(),
        });
    }
    let required = 2.0 * mesh.max_panel_arclength();
    let distance = mesh
        .nodes
        .iter()
        .map(|n| (n.sample.position - z).norm())
        .fold(f64::INFINITY, f64::min);
    if distance <= required {
        return Err(Error::TargetTooClose { distance, required });
    }
    let mut s = Sum::default();
    for (n, phi) in mesh.nodes.iter().zip(density) {
        s.add((z - n.sample.position).norm().ln() * phi * n.weight);
    }
    Ok(s.value() / (2.0 * PI))
}

/// Density of the perturbation `u - h` for `h = Re zⁿ` (cosine) or `h = Re(i zⁿ)` (sine).
///
/// The sine convention matches the multipole expansion, whose sine terms carry `i a_n^s`.
pub fn perturbation_density(
    mesh: &PanelMesh,
    system: &NpSystem,
    n: usize,
    flavor: Flavor,
) -> Result<Vec<f64>> {
    let rhs: Vec<f64> = mesh
        .nodes
        .iter()
        .map(|nd| neumann_data(n, flavor, &nd.sample))
        .collect();
    let d = solve_density(system, mesh, &rhs)?;
    Ok(match flavor {
        Flavor::Cos => d.values,
        Flavor::Sin => d.values.into_iter().map(|v| -v).collect(),
    })
}

/// Far-field perturbation `u - h` from the multipole series, for the same excitations as
/// [`perturbation_density`].
pub fn multipole_eval(
    gamma: &GammaTable,
    n: usize,
    flavor: Flavor,
    z: C64,
    boundary_radius: f64,
) -> Result<f64> {
    if n == 0 || n > gamma.order {
        return Err(Error::InsufficientOrder(format!(
            "excitation degree {n} outside the tensor order {}",
            gamma.order
        )));
    }
    if z.norm() <= 1.5 * boundary_radius {
        return Err(Error::TargetTooClose {
            distance: z.norm(),
            required: 1.5 * boundary_radius,
        });
    }
    let zi = z.inv();
    let mut zp = zi;
    let mut acc = crate::sum::CSum::default();
    let mut last = 0.0;
    for m in 1..=gamma.order {
        let (g1, g2) = (gamma.g1(m, n), gamma.g2(m, n));
        let c = match flavor {
            Flavor::Cos => g1 + g2,
            Flavor::Sin => g1 - g2,
        };
        let term = c * zp;
        acc.add(term);
        last = term.norm();
        zp *= zi;
    }
    let total = acc.value();
    // the series is geometric in boundary_radius/|z|, so the next term is about last*ratio
    let ratio = boundary_radius / z.norm();
    if last * ratio > 1e-12 * total.norm().max(1e-300) && last * ratio > 1e-15 {
        return Err(Error::InsufficientOrder(format!(
            "multipole series not converged at |z| = {} with {} orders",
            z.norm(),
            gamma.order
        )));
    }
    Ok(match flavor {
        Flavor::Cos => -total.re,
        Flavor::Sin => (-C64::new(0.0, 1.0) * total).re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{builtin_curve, Builtin};

    fn circle_mesh(r: f64) -> PanelMesh {
        PanelMesh::build(&builtin_curve(Builtin::Disk, &[r]).unwrap(), 8, 0).unwrap()
    }

    #[test]
    fn neumann_data_on_circle() {
        let m = circle_mesh(1.0);
        for nd in &m.nodes {
            let th = 2.0 * PI * nd.t;
            assert!(
                (neumann_data(1, Flavor::Cos, &nd.sample) - nd.sample.outward_normal.re).abs()
                    < 1e-15
            );
            for n in 1..5 {
                let want = n as f64 * (n as f64 * th).cos();
                assert!((neumann_data(n, Flavor::Cos, &nd.sample) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn neumann_data_matches_normal_finite_difference() {
        let c = builtin_curve(Builtin::CapShaped, &[]).unwrap();
        let h = 1e-6;
        for i in 0..40 {
            let s = c.eval((i as f64 + 0.37) / 40.0);
            for n in 1..5 {
                for f in [Flavor::Cos, Flavor::Sin] {
                    let fd = (harmonic(n, f, s.position + s.outward_normal * h)
                        - harmonic(n, f, s.position - s.outward_normal * h))
                        / (2.0 * h);
                    let v = neumann_data(n, f, &s);
                    assert!((fd - v).abs() < 1e-6 * v.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn circle_kernel_is_constant() {
        for r in [0.5, 1.0, 2.0] {
            let m = circle_mesh(r);
            let k = np_operator(&m).unwrap();
            let n = m.len();
            for i in 0..n {
                for j in 0..n {
                    let raw = k[i * n + j] / m.nodes[j].weight;
                    assert!((raw - 1.0 / (4.0 * PI * r)).abs() < 1e-12, "{raw}");
                }
            }
        }
    }

    #[test]
    fn circle_operator_on_constants_and_cosine() {
        let m = circle_mesh(1.0);
        let sys = assemble_np(&m).unwrap();
        let n = m.len();
        let ones = Mat::<f64>::from_fn(n, 1, |_, _| 1.0);
        let a1 = &sys.matrix * &ones;
        for i in 0..n {
            assert!((a1[(i, 0)] + 1.0).abs() < 1e-12);
        }
        let cos = Mat::<f64>::from_fn(n, 1, |i, _| (2.0 * PI * m.nodes[i].t).cos());
        let kc = &sys.matrix * &cos;
        for i in 0..n {
            // A cos = -½ cos - K cos and K cos = 0
            assert!((kc[(i, 0)] + 0.5 * cos[(i, 0)]).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_identity_holds_on_smooth_and_cornered_curves() {
        let e = builtin_curve(Builtin::Ellipse, &[2.0, 1.0]).unwrap();
        let sys = assemble_np(&PanelMesh::build(&e, 16, 0).unwrap()).unwrap();
        assert!(sys.gauss_defect < 1e-10, "{}", sys.gauss_defect);
        let cap = builtin_curve(Builtin::CapShaped, &[]).unwrap();
        let sys = assemble_np(&PanelMesh::build(&cap, 6, 16).unwrap()).unwrap();
        eprintln!(
            "cap defects {} {}",
            sys.gauss_defect, sys.gauss_defect_weighted
        );
        assert!(
            sys.gauss_defect_weighted < 1e-6,
            "{}",
            sys.gauss_defect_weighted
        );
    }

    #[test]
    fn circle_solutions() {
        for r in [0.5, 2.0] {
            let m = circle_mesh(r);
            let sys = assemble_np(&m).unwrap();
            let th: Vec<f64> = m.nodes.iter().map(|n| 2.0 * PI * n.t).collect();
            let d =
                solve_density(&sys, &m, &th.iter().map(|t| t.cos()).collect::<Vec<_>>()).unwrap();
            for (v, t) in d.values.iter().zip(&th) {
                assert!((v + 2.0 * t.cos()).abs() < 1e-12);
            }
            let d = solve_density(
                &sys,
                &m,
                &th.iter().map(|t| (3.0 * t).sin()).collect::<Vec<_>>(),
            )
            .unwrap();
            for (v, t) in d.values.iter().zip(&th) {
                assert!((v + 2.0 * (3.0 * t).sin()).abs() < 1e-12);
            }
            assert!(d.mean.abs() < 1e-14);
        }
    }

    #[test]
    fn nonzero_mean_rejected() {
        let m = circle_mesh(1.0);
        let sys = assemble_np(&m).unwrap();
        let rhs = vec![1.0; m.len()];
        assert!(matches!(
            solve_density(&sys, &m, &rhs),
            Err(Error::NonZeroMean { .. })
        ));
    }

    #[test]
    fn disk_gpts() {
        for r in [0.5f64, 1.0, 2.0] {
            let m = circle_mesh(r);
            let sys = assemble_np(&m).unwrap();
            let t = gpt_table(&m, &sys, 4).unwrap();
            let e = t.get(1, 1);
            let want = -2.0 * PI * r * r;
            assert!((e[0] - want).abs() < 1e-12 * want.abs());
            assert!((e[3] - want).abs() < 1e-12 * want.abs());
            assert!(e[1].abs() < 1e-12 && e[2].abs() < 1e-12);
            for k in 1..=4 {
                for n in 1..=4 {
                    if k != n {
                        assert!(t.get(k, n).iter().all(|v| v.abs() < 1e-11));
                    }
                }
            }
        }
    }

    #[test]
    fn single_layer_on_circle() {
        let m = circle_mesh(1.0);
        let phi: Vec<f64> = m.nodes.iter().map(|n| (2.0 * PI * n.t).cos()).collect();
        // log|z - y| = log|z| - Σ Re (y/z)^n / n for |y| < |z|
        let v = single_layer_eval(&m, &phi, C64::new(3.0, 0.0)).unwrap();
        assert!((v + 1.0 / 6.0).abs() < 1e-13);
        let zero = vec![0.0; m.len()];
        assert_eq!(
            single_layer_eval(&m, &zero, C64::new(3.0, 1.0)).unwrap(),
            0.0
        );
        assert!(matches!(
            single_layer_eval(&m, &phi, C64::new(1.01, 0.0)),
            Err(Error::TargetTooClose { .. })
        ));
    }
}
