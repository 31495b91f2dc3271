//! Pinned end-to-end runs behind `gptc repro`.

use crate::commands::{reconstruction, write_reconstruction};
use crate::output::OutDir;
use crate::ReproTarget;
use gpt_corners::geometry::{
    builtin_curve, BoundaryCurve, Builtin, SMOOTH_ASYMMETRIC_POLY, SMOOTH_SYMMETRIC_POLY,
};
use gpt_corners::io;
use gpt_corners::pipeline::{run as run_pipeline, PipelineOutput, SolverConfig};
use gpt_corners::reconstruct::DetectConfig;
use gpt_corners::Result;

const GRID: usize = 4096;
const CURVE_SAMPLES: usize = 1024;

fn triangle() -> Result<BoundaryCurve> {
    builtin_curve(Builtin::ReflectedEquilateralTriangle, &[])
}

fn cap() -> Result<BoundaryCurve> {
    builtin_curve(Builtin::CapShaped, &[])
}

fn polynomial(p: &[f64]) -> Result<BoundaryCurve> {
    builtin_curve(Builtin::PolynomialImage, p)?.reflect()
}

fn solve(
    out: &OutDir,
    prefix: &str,
    curve: &BoundaryCurve,
    order: usize,
) -> Result<PipelineOutput> {
    let res = run_pipeline(curve, &SolverConfig::for_curve(curve, order))?;
    out.write_json(&format!("{prefix}diagnostics.json"), &res.diagnostics)?;
    Ok(res)
}

fn write_curve(out: &OutDir, name: &str, curve: &BoundaryCurve) -> Result<()> {
    let t: Vec<f64> = (0..CURVE_SAMPLES)
        .map(|j| j as f64 / CURVE_SAMPLES as f64)
        .collect();
    let z = curve.sample_points(CURVE_SAMPLES);
    out.write(
        name,
        &io::write_series(
            &io::TRACE,
            &t,
            &[
                z.iter().map(|z| z.re).collect(),
                z.iter().map(|z| z.im).collect(),
            ],
        )?,
    )
}

fn table(out: &OutDir, name: &str, curve: &BoundaryCurve) -> Result<()> {
    let res = solve(out, &format!("{name}_"), curve, 21)?;
    out.write(&format!("{name}.csv"), &io::write_sigma_table(&res.sigma)?)
}

/// Both boundaries, σ_1..σ_m, Θ_m, the boundary image and the corner report.
fn figure(out: &OutDir, name: &str, curve: &BoundaryCurve, m: usize) -> Result<()> {
    let prefix = format!("{name}_");
    write_curve(out, &format!("{prefix}omega.csv"), curve)?;
    write_curve(out, &format!("{prefix}reflected.csv"), &curve.reflect()?)?;
    let res = solve(out, &prefix, curve, m + 1)?;
    out.write(
        &format!("{prefix}sigma.csv"),
        &io::write_sigma_table(&res.sigma)?,
    )?;
    let r = reconstruction(
        &res.sigma,
        Some(&res.mapping),
        m,
        GRID,
        &DetectConfig::default(),
    )?;
    write_reconstruction(out, &r, &prefix)
}

/// Φ_{N-2} and Θ_{N-1} of the cap from `N = 6` and `N = 29` GPT orders.
fn truncation_figure(out: &OutDir) -> Result<()> {
    let curve = cap()?;
    write_curve(out, "fig3_omega.csv", &curve)?;
    for n in [6, 29] {
        let prefix = format!("fig3_n{n}_");
        let res = solve(out, &prefix, &curve, n)?;
        let r = reconstruction(
            &res.sigma,
            Some(&res.mapping),
            n - 1,
            GRID,
            &DetectConfig::default(),
        )?;
        write_reconstruction(out, &r, &prefix)?;
    }
    Ok(())
}

pub fn run(out: &OutDir, target: ReproTarget) -> Result<()> {
    match target {
        ReproTarget::Table1 => table(out, "table1", &triangle()?),
        ReproTarget::Table2 => table(out, "table2", &cap()?),
        ReproTarget::Fig1 => figure(out, "fig1", &triangle()?, 21),
        ReproTarget::Fig2 => figure(out, "fig2", &cap()?, 28),
        ReproTarget::Fig3 => truncation_figure(out),
        ReproTarget::Fig4 => figure(out, "fig4", &polynomial(&SMOOTH_SYMMETRIC_POLY)?, 28),
        ReproTarget::Fig5 => figure(out, "fig5", &polynomial(&SMOOTH_ASYMMETRIC_POLY)?, 28),
    }
}
