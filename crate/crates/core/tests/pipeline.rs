use gpt_corners::coeffs::gamma_from_gpt;
use gpt_corners::geometry::{builtin_curve, BoundaryCurve, Builtin, SMOOTH_ASYMMETRIC_POLY};
use gpt_corners::oracle::{approx_polygon, sigma_tilde};
use gpt_corners::pipeline::{gpts, run, SolverConfig};
use gpt_corners::C64;
use std::f64::consts::PI;

fn cornered(order: usize) -> SolverConfig {
    SolverConfig {
        order,
        panels: 8,
        depth: 30,
    }
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn mirrored_cap_conjugates_every_coefficient() {
    let cap = builtin_curve(Builtin::CapShaped, &[]).unwrap();
    let a = run(&cap, &cornered(9)).unwrap();
    let b = run(&cap.mirror().unwrap(), &cornered(9)).unwrap();
    let conj = |v: &[C64]| v.iter().map(|z| z.conj()).collect::<Vec<_>>();
    assert!((a.mapping.capacity - b.mapping.capacity).abs() < 1e-10);
    let ds = max_diff(&b.sigma.sigma, &conj(&a.sigma.sigma));
    let db = max_diff(&b.mapping.b, &conj(&a.mapping.b));
    let dm = max_diff(&b.mapping.mu, &conj(&a.mapping.mu));
    println!("mirror: σ {ds:.2e}, b {db:.2e}, μ {dm:.2e}");
    assert!(ds < 1e-6 && db < 1e-6 && dm < 1e-6);
}

#[test]
fn triangle_factors_vanish_off_multiples_of_three() {
    let t = builtin_curve(Builtin::ReflectedEquilateralTriangle, &[]).unwrap();
    let out = run(&t, &cornered(13)).unwrap();
    for k in (1..=12).filter(|k| k % 3 != 0) {
        assert!(
            out.sigma.get(k).norm() < 1e-5,
            "σ_{k} = {}",
            out.sigma.get(k)
        );
    }
}

fn smooth_and_cornered_builtins() -> Vec<(&'static str, BoundaryCurve)> {
    vec![
        ("disk", builtin_curve(Builtin::Disk, &[0.7]).unwrap()),
        (
            "ellipse",
            builtin_curve(Builtin::Ellipse, &[2.0, 1.0]).unwrap(),
        ),
        (
            "triangle",
            builtin_curve(Builtin::ReflectedEquilateralTriangle, &[]).unwrap(),
        ),
        ("cap", builtin_curve(Builtin::CapShaped, &[]).unwrap()),
        (
            "polynomial",
            builtin_curve(Builtin::PolynomialImage, &SMOOTH_ASYMMETRIC_POLY).unwrap(),
        ),
        (
            "polygon",
            builtin_curve(
                Builtin::PolygonReflection,
                &[1.0, 0.0, 0.0, 1.2, -0.9, 0.1, 0.1, -1.0],
            )
            .unwrap(),
        ),
    ]
}

#[test]
fn leading_gamma_is_real_and_negative() {
    for (name, c) in smooth_and_cornered_builtins() {
        let cfg = SolverConfig::for_curve(&c, 2);
        let (gpt, _) = gpts(&c, &cfg).unwrap();
        let g = gamma_from_gpt(&gpt).g2(1, 1);
        println!("{name}: γ²₁₁ = {g}");
        assert!(g.re < 0.0, "{name}");
        assert!(g.im.abs() < 1e-8 * g.norm(), "{name}: {g}");
    }
}

#[test]
fn leading_gamma_settles_under_refinement() {
    let t = builtin_curve(Builtin::ReflectedEquilateralTriangle, &[]).unwrap();
    let g = |depth| {
        let (gpt, _) = gpts(
            &t,
            &SolverConfig {
                order: 1,
                panels: 8,
                depth,
            },
        )
        .unwrap();
        gamma_from_gpt(&gpt).g2(1, 1)
    };
    let (g25, g30) = (g(25), g(30));
    println!("depth 25 {g25}, depth 30 {g30}");
    assert!((g25 - g30).norm() < 1e-6);
}

/// `Ω^r = P(D)` is traced conformally by `t -> P(e^{2πit})`, so the inscribed polygons
/// through `P(e^{2πij/n})` give `σ̃_{n,k}` that must approach the GPT factors of `Ω`.
#[test]
fn inscribed_polygons_of_a_smooth_image_converge_to_the_gpt_factors() {
    let p = builtin_curve(Builtin::PolynomialImage, &SMOOTH_ASYMMETRIC_POLY).unwrap();
    let out = run(&p.reflect().unwrap(), &SolverConfig::for_curve(&p, 7)).unwrap();
    let ns = [48, 96, 192, 384, 768];
    for k in 1..=6 {
        let err: Vec<f64> = ns
            .iter()
            .map(|&n| {
                (sigma_tilde(&approx_polygon(&p, n).unwrap(), 6).get(k) - out.sigma.get(k)).norm()
            })
            .collect();
        println!(
            "k = {k}: {:?}",
            err.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()
        );
        for w in err.windows(2) {
            assert!(w[1] <= 1.1 * w[0], "k = {k}: {err:?}");
        }
        assert!(err[4] < 1e-4, "k = {k}: {err:?}");
    }
}

#[test]
fn polygon_turning_approaches_curvature_times_speed() {
    let p = builtin_curve(Builtin::PolynomialImage, &SMOOTH_ASYMMETRIC_POLY).unwrap();
    let t0 = 0.25;
    let s = p.eval(t0);
    let target = s.curvature * s.speed;
    let err: Vec<f64> = [64, 128, 256, 512, 1024]
        .iter()
        .map(|&n| {
            let data = approx_polygon(&p, n).unwrap();
            (n as f64 * PI * data.betas[n / 4] - target).abs()
        })
        .collect();
    println!(
        "turning defect at t = 1/4: {:?}",
        err.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()
    );
    for w in err.windows(2) {
        assert!(w[1] < w[0]);
    }
    assert!(err[4] < 1e-2 * target.abs().max(1.0));
}
