//! Gauss-Hermite quadrature for deterministic averaging over Gaussian
//! parameter distributions.
//!
//! Nodes and weights are produced for the probabilists' convention: an
//! `n`-point rule satisfies `Σ w_i f(x_i) = ∫ f(x) N(x; 0, 1) dx` exactly for
//! polynomials up to degree `2n - 1`.

/// Probabilists' Gauss-Hermite rule (weight function N(x; 0, 1)).
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Newton iteration on the physicists' Hermite recurrence, then rescale
    /// to unit-variance Gaussian weight.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one node");
        let mut x = vec![0.0f64; n];
        let mut w = vec![0.0f64; n];
        let pim4 = std::f64::consts::PI.powf(-0.25);
        let m = n.div_ceil(2);
        let mut z = 0.0f64;
        for i in 0..m {
            z = match i {
                0 => {
                    let a = (2 * n + 1) as f64;
                    a.sqrt() - 1.85575 * a.powf(-1.0 / 6.0)
                }
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * (2.0 / j as f64).sqrt() * p2
                        - ((j - 1) as f64 / j as f64).sqrt() * p3;
                }
                pp = (2.0 * n as f64).sqrt() * p2;
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() <= 1e-15 {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        // Physicists' rule integrates against e^{-x²}; substitute x → x/√2
        // and divide by √π for the standard-normal weight.
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let nodes = x.iter().map(|&xi| std::f64::consts::SQRT_2 * xi).collect();
        let weights = w.iter().map(|&wi| wi / sqrt_pi).collect();
        Self { nodes, weights }
    }

    /// E[f(X)] for X ~ N(0, sigma²).
    pub fn expect_gaussian(&self, sigma: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(sigma * x))
            .sum()
    }

    /// E[f(X, Y)] for independent X, Y ~ N(0, sigma²) (tensor-product rule).
    pub fn expect_gaussian2(&self, sigma: f64, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (&xa, &wa) in self.nodes.iter().zip(&self.weights) {
            for (&xb, &wb) in self.nodes.iter().zip(&self.weights) {
                acc += wa * wb * f(sigma * xa, sigma * xb);
            }
        }
        acc
    }
}
