//! Curve to geometric factors: mesh, NP solve, GPTs, γ-tensors and the recurrences.

use crate::bie::{assemble_np, gpt_table, GptTable, NpSystem};
use crate::coeffs::{
    bk2_residual, cauchy_residuals, coefficients_from_gamma, gamma_from_gpt, gpt_order_for_sigma,
    GammaTable, GeometricFactors, MappingCoefficients,
};
use crate::error::{Error, Result};
use crate::geometry::BoundaryCurve;
use crate::mesh::{MeshStats, PanelMesh};
use serde::{Deserialize, Serialize};

/// Base panels per piece on smooth curves, where panels are never refined.
pub const DEFAULT_PANELS_SMOOTH: usize = 24;
/// Base panels per piece on cornered curves; the corner refinement carries the resolution.
pub const DEFAULT_PANELS_CORNERED: usize = 8;
pub const DEFAULT_DEPTH: usize = 30;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Highest GPT order `N`.
    pub order: usize,
    /// Base panels per smooth piece.
    pub panels: usize,
    /// Dyadic refinement levels at each corner.
    pub depth: usize,
}

impl SolverConfig {
    /// Default mesh for `curve` with GPTs up to `order`.
    pub fn for_curve(curve: &BoundaryCurve, order: usize) -> Self {
        let (panels, depth) = if curve.is_smooth() {
            (DEFAULT_PANELS_SMOOTH, 0)
        } else {
            (DEFAULT_PANELS_CORNERED, DEFAULT_DEPTH)
        };
        SolverConfig {
            order,
            panels,
            depth,
        }
    }

    /// Default mesh with enough GPT orders for `σ_1..σ_K`.
    pub fn for_sigma(curve: &BoundaryCurve, k: usize) -> Self {
        Self::for_curve(curve, gpt_order_for_sigma(k))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub mesh: MeshStats,
    pub gauss_defect: f64,
    pub gauss_defect_weighted: f64,
    pub pivot_ratio: f64,
    pub capacity: f64,
    /// Residuals for `k = 2..`.
    pub bk2_residuals: Vec<f64>,
    /// Residuals for `k = 1..`.
    pub cauchy_residuals: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub gpt: GptTable,
    pub gamma: GammaTable,
    pub mapping: MappingCoefficients,
    pub sigma: GeometricFactors,
    pub diagnostics: Diagnostics,
}

/// Mesh and factored system, reusable across excitation sets.
pub struct Discretization {
    pub mesh: PanelMesh,
    pub system: NpSystem,
}

impl Discretization {
    pub fn new(curve: &BoundaryCurve, panels: usize, depth: usize) -> Result<Self> {
        let depth = if curve.is_smooth() { 0 } else { depth };
        let mesh = PanelMesh::build(curve, panels, depth)?;
        let system = assemble_np(&mesh)?;
        Ok(Discretization { mesh, system })
    }
}

pub fn gpts(curve: &BoundaryCurve, config: &SolverConfig) -> Result<(GptTable, Discretization)> {
    if config.order == 0 {
        return Err(Error::InvalidParameter("order must be at least 1".into()));
    }
    let disc = Discretization::new(curve, config.panels, config.depth)?;
    let gpt = gpt_table(&disc.mesh, &disc.system, config.order)?;
    Ok((gpt, disc))
}

/// `C`, `b`, `μ`, `σ` and their consistency residuals from a γ-table.
pub fn factors_from_gamma(
    gamma: &GammaTable,
) -> Result<(MappingCoefficients, GeometricFactors, Vec<f64>, Vec<f64>)> {
    let (map, sigma) = coefficients_from_gamma(gamma)?;
    let n = gamma.order;
    let bk2 = if n >= 4 {
        bk2_residual(gamma, map.capacity, &map.b, &map.mu, n - 2)?
    } else {
        Vec::new()
    };
    let cauchy = cauchy_residuals(&map.b, &map.mu, n - 1);
    Ok((map, sigma, bk2, cauchy))
}

pub fn run(curve: &BoundaryCurve, config: &SolverConfig) -> Result<PipelineOutput> {
    if config.order < 2 {
        return Err(Error::InvalidParameter(
            "order must be at least 2 to produce a geometric factor".into(),
        ));
    }
    let (gpt, disc) = gpts(curve, config)?;
    let gamma = gamma_from_gpt(&gpt);
    let (mapping, sigma, bk2, cauchy) = factors_from_gamma(&gamma)?;
    let diagnostics = Diagnostics {
        mesh: disc.mesh.stats(),
        gauss_defect: disc.system.gauss_defect,
        gauss_defect_weighted: disc.system.gauss_defect_weighted,
        pivot_ratio: disc.system.pivot_ratio,
        capacity: mapping.capacity,
        bk2_residuals: bk2,
        cauchy_residuals: cauchy,
    };
    Ok(PipelineOutput {
        gpt,
        gamma,
        mapping,
        sigma,
        diagnostics,
    })
}

/// Pin the worker count of both the assembly pool and the dense solver.
///
/// One thread gives bitwise-reproducible output. The assembly pool can only be sized once
/// per process; later calls only change the solver setting.
pub fn configure_threads(threads: usize) {
    let threads = threads.max(1);
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    if threads == 1 {
        faer::set_global_parallelism(faer::Par::Seq);
    } else {
        faer::set_global_parallelism(faer::Par::rayon(threads));
    }
}
