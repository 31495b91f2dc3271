//! Gauss rules on [-1, 1].

use faer::{Mat, Side};
use std::f64::consts::PI;

/// Nodes and weights of an n-point quadrature rule on [-1, 1], nodes ascending.
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre rule by Newton iteration on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Jacobi rule for the weight (1 - x)^alpha (1 + x)^beta, alpha, beta > -1.
///
/// Golub–Welsch: eigen-decomposition of the symmetric Jacobi matrix.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Rule {
    assert!(n >= 1);
    assert!(
        alpha > -1.0 && beta > -1.0,
        "Jacobi exponents must exceed -1"
    );
    let ab = alpha + beta;
    let mut jac = Mat::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            let s = 2.0 * kf + ab;
            (beta * beta - alpha * alpha) / (s * (s + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let s = 2.0 * j + ab;
            let num = 4.0 * j * (j + alpha) * (j + beta) * (j + ab);
            let den = s * s * (s + 1.0) * (s - 1.0);
            let off = (num / den).sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let mu0 = 2f64.powf(ab + 1.0)
        * (libm::lgamma(alpha + 1.0) + libm::lgamma(beta + 1.0) - libm::lgamma(ab + 2.0)).exp();
    let eig = jac
        .self_adjoint_eigen(Side::Lower)
        .expect("symmetric tridiagonal eigen-decomposition");
    let vals = eig.S();
    let vecs = eig.U();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = vecs[(0, i)];
            (vals.column_vector()[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}
