use gpt_corners::coeffs::{
    b_from_gamma, b_from_sigma, capacity, cauchy_residuals, gamma_forward, mu_from_b, sigma_from_b,
    GammaTable, GeometricFactors, MappingCoefficients, Provenance,
};
use gpt_corners::geometry::{builtin_curve, Builtin, DomainSpec};
use gpt_corners::io;
use gpt_corners::oracle::{approx_polygon, sc_taylor, sigma_from_prevertices, Polygon};
use gpt_corners::pipeline::{run, SolverConfig};
use gpt_corners::reconstruct::{theta_partial, uniform_grid};
use gpt_corners::C64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn unit_box() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

/// `b_1 = 1` followed by `len - 1` coefficients decaying like `r^k`.
fn decaying_b(len: usize) -> impl Strategy<Value = Vec<C64>> {
    (0.05..0.6f64, prop::collection::vec(unit_box(), len - 1)).prop_map(|(r, a)| {
        let mut b = vec![C64::new(1.0, 0.0)];
        b.extend(
            a.into_iter()
                .enumerate()
                .map(|(i, z)| z * r.powi(i as i32 + 1)),
        );
        b
    })
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn sigma_vec(max_len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(unit_box().prop_map(|z| z * 3.0), 1..=max_len)
}

/// Star-shaped counterclockwise polygon around the origin with arbitrary ordered pre-vertices.
fn polygon_with_prevertices() -> impl Strategy<Value = (Vec<C64>, Vec<C64>)> {
    (3usize..9).prop_flat_map(|n| {
        (
            prop::collection::vec(0.3..0.7f64, n),
            prop::collection::vec(0.5..2.0f64, n),
            prop::collection::vec(0.1..0.9f64, n),
        )
            .prop_map(move |(jitter, r, pj)| {
                let at = |j: usize, x: f64| 2.0 * PI * (j as f64 + x) / n as f64;
                let v = (0..n)
                    .map(|j| C64::from_polar(r[j], at(j, jitter[j] - 0.5)))
                    .collect();
                let a = (0..n).map(|j| C64::from_polar(1.0, at(j, pj[j]))).collect();
                (v, a)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_b_roundtrip(b in decaying_b(21)) {
        let sigma = sigma_from_b(&b, 20).unwrap();
        let back = b_from_sigma(&sigma, 20).unwrap();
        prop_assert!(max_diff(&back, &b) < 1e-12);
    }

    #[test]
    fn mu_satisfies_the_cauchy_identity(b in decaying_b(21)) {
        let mu = mu_from_b(&b, 20).unwrap();
        prop_assert_eq!(mu.len(), 21);
        prop_assert!(cauchy_residuals(&b, &mu, 20).iter().all(|&r| r < 1e-12));
    }

    #[test]
    fn gamma_chain_closes(b in decaying_b(13), c in 0.5..2.0f64) {
        let n = 6;
        let mu = mu_from_b(&b, 2 * n).unwrap();
        let gamma = gamma_forward(c, &b, &mu, n).unwrap();
        let g11 = gamma.g2(1, 1);
        prop_assert!(g11.im.abs() <= 1e-14 * g11.norm() && g11.re < 0.0);
        prop_assert!((capacity(&gamma).unwrap() - c).abs() < 1e-12 * c);
        let back = b_from_gamma(&gamma, n).unwrap();
        prop_assert!(max_diff(&back, &b[..n]) < 1e-12);
    }

    #[test]
    fn theta_mean_is_two(sigma in sigma_vec(30)) {
        let m = sigma.len();
        let s = GeometricFactors::new(sigma, Provenance::Analytic);
        let th = theta_partial(&s, m, &uniform_grid(8 * m + 8)).unwrap();
        let mean = th.values.iter().sum::<f64>() / th.values.len() as f64;
        prop_assert!((mean - 2.0).abs() < 1e-12);
    }

    #[test]
    fn conjugate_sigma_mirrors_theta(sigma in sigma_vec(30)) {
        let m = sigma.len();
        let s = GeometricFactors::new(sigma, Provenance::Analytic);
        let g = 8 * m + 8;
        let grid = uniform_grid(g);
        let a = theta_partial(&s, m, &grid).unwrap();
        let b = theta_partial(&s.conj(), m, &grid).unwrap();
        for i in 0..g {
            prop_assert!((b.values[i] - a.values[(g - i) % g]).abs() < 1e-12);
        }
    }

    #[test]
    fn n_fold_sigma_gives_n_periodic_theta(sigma in sigma_vec(30), n in 2usize..6) {
        let m = sigma.len();
        let sym: Vec<C64> = sigma
            .iter()
            .enumerate()
            .map(|(i, &z)| if (i + 1) % n == 0 { z } else { C64::new(0.0, 0.0) })
            .collect();
        let s = GeometricFactors::new(sym, Provenance::Analytic);
        let g = n * (8 * m + 8);
        let th = theta_partial(&s, m, &uniform_grid(g)).unwrap();
        let shift = g / n;
        for i in 0..g {
            prop_assert!((th.values[(i + shift) % g] - th.values[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn taylor_route_matches_prevertex_sum((v, a) in polygon_with_prevertices()) {
        let poly = Polygon::new(v, Some(a)).unwrap();
        prop_assert!((poly.betas.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        let direct = sigma_from_prevertices(&poly, 30).unwrap();
        let (_, via_b) = sc_taylor(&poly, 30).unwrap();
        for k in 1..=30 {
            let scale = 1.0 + direct.get(k).norm();
            prop_assert!((direct.get(k) - via_b.get(k)).norm() < 1e-12 * scale, "k = {}", k);
        }
    }

    #[test]
    fn inscribed_polygons_turn_once(a in 1.0..3.0f64, b in 0.4..1.0f64, n in 8usize..300) {
        let e = builtin_curve(Builtin::Ellipse, &[a, b]).unwrap();
        let data = approx_polygon(&e, n).unwrap();
        prop_assert!((data.betas.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        prop_assert!(data.betas.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn gamma_tables_roundtrip_through_csv(
        n in 1usize..5,
        vals in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 64),
    ) {
        let mut g = GammaTable::zeros(n);
        let mut it = vals.iter().cycle();
        for k in 1..=n {
            for j in 1..=n {
                let mut next = || *it.next().unwrap();
                g.set(k, j, C64::new(next(), next()), C64::new(next(), next()));
            }
        }
        let back = io::read_gamma(&io::write_gamma(&g).unwrap()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn factors_roundtrip_through_csv(b in decaying_b(9), c in 0.1..10.0f64) {
        let mu = mu_from_b(&b, 8).unwrap();
        let sigma = GeometricFactors::new(sigma_from_b(&b, 8).unwrap(), Provenance::FromGpts);
        let map = MappingCoefficients { capacity: c, b, mu };
        let back = io::read_factors(&io::write_factors(Some(&map), &sigma).unwrap()).unwrap();
        prop_assert_eq!(back.mapping().unwrap(), map);
        prop_assert_eq!(back.sigma, sigma);
    }

    #[test]
    fn domain_spec_roundtrips(a in 0.5..3.0f64, b in 0.5..3.0f64) {
        let spec = DomainSpec::named(Builtin::Ellipse, &[a, b]);
        let text = serde_json::to_string(&spec).unwrap();
        let c1 = spec.build().unwrap();
        let c2 = DomainSpec::from_json(&text).unwrap().build().unwrap();
        for i in 0..16 {
            let t = i as f64 / 16.0;
            prop_assert_eq!(c1.position(t), c2.position(t));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn disk_has_capacity_r_and_no_geometric_factors(r in 0.2..5.0f64) {
        let disk = builtin_curve(Builtin::Disk, &[r]).unwrap();
        let out = run(&disk, &SolverConfig { order: 5, panels: 8, depth: 0 }).unwrap();
        prop_assert!((out.mapping.capacity - r).abs() < 1e-10 * r);
        prop_assert!(out.sigma.sigma.iter().all(|s| s.norm() < 1e-9));
        for k in 1..=5 {
            for n in 1..=5 {
                let m = out.gpt.get(k, n);
                let scale = r.powi((k + n) as i32);
                if k != n {
                    prop_assert!(m.iter().all(|x| x.abs() < 1e-10 * scale));
                } else {
                    prop_assert!(m[1].abs() < 1e-10 * scale && m[2].abs() < 1e-10 * scale);
                    prop_assert!((m[0] - m[3]).abs() < 1e-10 * scale);
                }
            }
        }
    }
}
