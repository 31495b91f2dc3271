use crate::output::{read_text, OutDir};
use crate::{ApproxArgs, ClassifyArgs, FactorsArgs, GptsArgs, ReconstructArgs, ScArgs};
use gpt_corners::coeffs::{gpt_order_for_sigma, GeometricFactors, MappingCoefficients};
use gpt_corners::geometry::DomainSpec;
use gpt_corners::io::{self, fmt_f64};
use gpt_corners::oracle::{
    approx_polygon, sc_taylor, sigma_from_prevertices, sigma_tilde, Polygon, ScTrace,
};
use gpt_corners::pipeline::{self, SolverConfig};
use gpt_corners::reconstruct::{
    classify_decay, detect_corners, phi_truncated, theta_partial, uniform_grid, CornerReport,
    DetectConfig, MIN_DECAY_ORDER,
};
use gpt_corners::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub fn gpts(out: &OutDir, a: &GptsArgs) -> Result<()> {
    let curve = DomainSpec::from_json(&read_text(&a.domain)?)?.build()?;
    let mut cfg = SolverConfig::for_curve(&curve, a.order as usize);
    if let Some(p) = a.panels {
        cfg.panels = p as usize;
    }
    if !curve.is_smooth() {
        cfg.depth = a.depth as usize;
    }
    let (gpt, disc) = pipeline::gpts(&curve, &cfg)?;
    let gamma = gpt_corners::coeffs::gamma_from_gpt(&gpt);
    out.write("gpt.csv", &io::write_gpt(&gpt)?)?;
    out.write("gamma.csv", &io::write_gamma(&gamma)?)?;
    out.write_json(
        "mesh.json",
        &serde_json::json!({
            "config": cfg,
            "mesh": disc.mesh.stats(),
            "gauss_defect": disc.system.gauss_defect,
            "gauss_defect_weighted": disc.system.gauss_defect_weighted,
            "pivot_ratio": disc.system.pivot_ratio,
        }),
    )
}

#[derive(Serialize)]
struct FactorDiagnostics {
    gpt_order: usize,
    capacity: f64,
    bk2_residuals: Vec<f64>,
    cauchy_residuals: Vec<f64>,
}

pub fn factors(out: &OutDir, a: &FactorsArgs) -> Result<()> {
    let mut gamma = io::read_gamma(&read_text(&a.gamma)?)?;
    if let Some(k) = a.order {
        let need = gpt_order_for_sigma(k as usize);
        if need > gamma.order {
            return Err(Error::InsufficientOrder(format!(
                "σ_{k} needs a γ table of order {need}, got {}",
                gamma.order
            )));
        }
        gamma = gamma.truncated(need);
    }
    let (map, sigma, bk2, cauchy) = pipeline::factors_from_gamma(&gamma)?;
    out.write("factors.csv", &io::write_factors(Some(&map), &sigma)?)?;
    out.write_json(
        "diagnostics.json",
        &FactorDiagnostics {
            gpt_order: gamma.order,
            capacity: map.capacity,
            bk2_residuals: bk2,
            cauchy_residuals: cauchy,
        },
    )
}

/// Everything `reconstruct` writes, shared with `repro`.
pub struct Reconstruction {
    pub grid: Vec<f64>,
    pub theta: Vec<f64>,
    /// Order of the boundary image and its samples, when the map is known.
    pub boundary: Option<(usize, Vec<C64>)>,
    pub report: CornerReport,
}

pub fn reconstruction(
    sigma: &GeometricFactors,
    map: Option<&MappingCoefficients>,
    m: usize,
    grid: usize,
    config: &DetectConfig,
) -> Result<Reconstruction> {
    if !(config.tau.is_finite() && config.tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tau must be positive, got {}",
            config.tau
        )));
    }
    let t = uniform_grid(grid);
    let theta = theta_partial(sigma, m, &t)?;
    let boundary = match map {
        Some(map) if map.mu_order() >= 0 => {
            let p = (map.mu_order() as usize).min(m);
            Some((p, phi_truncated(map.capacity, &map.mu[..p + 2], p, &t)?))
        }
        _ => None,
    };
    let mapping = match (map, &boundary) {
        (Some(map), Some((p, _))) => Some((map.capacity, &map.mu[..p + 2])),
        _ => None,
    };
    let mut report = detect_corners(&theta, config, mapping)?;
    let head = GeometricFactors::new(sigma.sigma[..m].to_vec(), sigma.provenance);
    if m >= MIN_DECAY_ORDER || head.sigma.iter().all(|s| s.norm() == 0.0) {
        report = report.with_decay(classify_decay(&head)?);
    }
    Ok(Reconstruction {
        grid: t,
        theta: theta.values,
        boundary,
        report,
    })
}

pub fn write_reconstruction(out: &OutDir, r: &Reconstruction, prefix: &str) -> Result<()> {
    out.write(
        &format!("{prefix}theta.csv"),
        &io::write_series(&io::THETA, &r.grid, &[r.theta.clone()])?,
    )?;
    let mut report = serde_json::to_value(&r.report)?;
    if let Some((p, z)) = &r.boundary {
        let re = z.iter().map(|z| z.re).collect();
        let im = z.iter().map(|z| z.im).collect();
        out.write(
            &format!("{prefix}boundary.csv"),
            &io::write_series(&io::BOUNDARY, &r.grid, &[re, im])?,
        )?;
        report["boundary_order"] = (*p).into();
    }
    out.write_json(&format!("{prefix}report.json"), &report)
}

pub fn reconstruct(out: &OutDir, a: &ReconstructArgs) -> Result<()> {
    let data = io::read_factors(&read_text(&a.factors)?)?;
    let m = a.order.map_or(data.sigma.order(), |m| m as usize);
    let config = DetectConfig {
        tau: a.tau,
        ..DetectConfig::default()
    };
    let map = data.mapping();
    let r = reconstruction(&data.sigma, map.as_ref(), m, a.grid as usize, &config)?;
    write_reconstruction(out, &r, "")
}

pub fn classify(out: &OutDir, a: &ClassifyArgs) -> Result<()> {
    let sigma = io::read_any_sigma(&read_text(&a.sigma)?)?;
    out.write_json("verdict.json", &classify_decay(&sigma)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygonSpec {
    vertices: Vec<[f64; 2]>,
    #[serde(default)]
    pre_vertices: Option<Vec<[f64; 2]>>,
}

fn read_polygon(path: &Path) -> Result<Polygon> {
    let spec: PolygonSpec =
        serde_json::from_str(&read_text(path)?).map_err(|e| Error::Parse(e.to_string()))?;
    let c = |v: Vec<[f64; 2]>| {
        v.into_iter()
            .map(|[x, y]| C64::new(x, y))
            .collect::<Vec<_>>()
    };
    Polygon::new(c(spec.vertices), spec.pre_vertices.map(c))?.infer_pre_vertices()
}

pub fn oracle_sc(out: &OutDir, a: &ScArgs) -> Result<()> {
    let poly = read_polygon(&a.polygon)?;
    let k_max = a.order as usize;
    let (b, sigma) = sc_taylor(&poly, k_max)?;
    let rows: Vec<Vec<String>> = (1..=k_max)
        .map(|k| {
            let (s, bk) = (sigma.get(k), b[k - 1]);
            vec![
                k.to_string(),
                fmt_f64(s.re),
                fmt_f64(s.im),
                fmt_f64(bk.re),
                fmt_f64(bk.im),
            ]
        })
        .collect();
    out.write(
        "sc_factors.csv",
        &io::write_table(&io::SC_FACTORS, &[], &rows)?,
    )?;
    let trace = ScTrace::new(&poly)?;
    let m = a.trace_samples as usize;
    let t: Vec<f64> = (0..m).map(|j| j as f64 / m as f64).collect();
    let z: Vec<C64> = t.iter().map(|&t| trace.eval(t)).collect();
    out.write(
        "trace.csv",
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

pub fn oracle_approx(out: &OutDir, a: &ApproxArgs) -> Result<()> {
    let poly = read_polygon(&a.polygon)?;
    let k_max = a.order as usize;
    let exact = sigma_from_prevertices(&poly, k_max)?;
    let trace = ScTrace::new(&poly)?;
    let mut rows = Vec::new();
    for &n in &a.n {
        let st = sigma_tilde(&approx_polygon(&trace, n as usize)?, k_max);
        for k in 1..=k_max {
            let s = st.get(k);
            rows.push(vec![
                n.to_string(),
                k.to_string(),
                fmt_f64(s.re),
                fmt_f64(s.im),
                fmt_f64((s - exact.get(k)).norm()),
            ]);
        }
    }
    out.write("approx.csv", &io::write_table(&io::APPROX, &[], &rows)?)
}
