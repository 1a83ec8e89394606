//! Quadrature rules: Gauss–Hermite for the standard Gaussian measure,
//! Gauss–Legendre on intervals, and a trapezoidal rule in `log u` for the
//! subordination integral of the Poisson semigroup.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-15;
const MAX_NEWTON: usize = 100;

/// Gauss–Hermite rule for `∫ f dγ` with `γ = N(0, 1)`; weights sum to one.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds the rule by Newton iteration on the orthonormal physicists'
    /// Hermite recurrence, then rescales to the probabilists' convention.
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidParameter(format!("Gauss-Hermite order must be >= 2, got {order}")));
        }
        let n = order;
        let nf = n as f64;
        let pim4 = PI.powf(-0.25);
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let m = n.div_ceil(2);
        let guesses = hermite_root_guesses(n);
        for i in 0..m {
            let mut z = guesses[n - 1 - i];
            let mut pp = 0.0;
            let mut converged = false;
            for _ in 0..MAX_NEWTON {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= NEWTON_TOL * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NonFinite(format!("Gauss-Hermite Newton iteration failed at root {i}")));
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        // Physicists' rule on e^{-x^2} -> expectation under N(0, 1).
        let scale = 1.0 / PI.sqrt();
        let mut nodes: Vec<f64> = x.iter().map(|v| v * std::f64::consts::SQRT_2).collect();
        let mut weights: Vec<f64> = w.iter().map(|v| v * scale).collect();
        nodes.reverse();
        weights.reverse();
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ f dγ`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Ascending eigenvalues of the physicists' Hermite Jacobi matrix, used as
/// starting points for Newton's method.
fn hermite_root_guesses(n: usize) -> Vec<f64> {
    let jacobi =
        nalgebra::DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { (i.max(j) as f64 / 2.0).sqrt() } else { 0.0 });
    let mut roots: Vec<f64> = nalgebra::SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    roots.sort_by(f64::total_cmp);
    roots
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidParameter("Gauss-Legendre order must be >= 1".into()));
        }
        let n = order;
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..MAX_NEWTON {
                let mut p1 = 1.0;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
                }
                pp = nf * (z * p1 - p2) / (z * z - 1.0);
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= NEWTON_TOL {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        Ok(Self { nodes, weights })
    }

    /// `∫_a^b f` with `panels` equal sub-intervals.
    pub fn integrate_composite(&self, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let half = 0.5 * width;
        let mut total = 0.0;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * width;
            for (&x, &w) in self.nodes.iter().zip(&self.weights) {
                total += half * w * f(mid + half * x);
            }
        }
        total
    }

    /// Nodes and weights of the composite rule on `[a, b]`.
    pub fn composite_rule(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let half = 0.5 * width;
        let mut out = Vec::with_capacity(panels * self.nodes.len());
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * width;
            for (&x, &w) in self.nodes.iter().zip(&self.weights) {
                out.push((mid + half * x, half * w));
            }
        }
        out
    }
}

/// Discretization of `P_t = π^{-1/2} ∫₀^∞ u^{-1/2} e^{-u} e^{(t²/4u) L} du`.
///
/// The substitution `u = e^y` turns the integrand into a doubly decaying
/// analytic function of `y`, for which the trapezoidal rule converges
/// geometrically. Weights are `h √u e^{-u} / √π` and sum to `1` within `1e-13`.
#[derive(Debug, Clone)]
pub struct SubordinationRule {
    u: Vec<f64>,
    weights: Vec<f64>,
}

pub const SUBORDINATION_Y_MIN: f64 = -64.0;
pub const SUBORDINATION_Y_MAX: f64 = 4.5;
pub const DEFAULT_SUBORDINATION_NODES: usize = 343;

impl SubordinationRule {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < 16 {
            return Err(Error::InvalidParameter(format!("subordination rule needs >= 16 nodes, got {nodes}")));
        }
        let h = (SUBORDINATION_Y_MAX - SUBORDINATION_Y_MIN) / (nodes - 1) as f64;
        let norm = h / PI.sqrt();
        let (u, weights) = (0..nodes)
            .map(|i| {
                let u = (SUBORDINATION_Y_MIN + i as f64 * h).exp();
                (u, norm * u.sqrt() * (-u).exp())
            })
            .unzip();
        Ok(Self { u, weights })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Pairs `(s, W)`: heat time `s = t²/(4u)` and its weight.
    pub fn heat_times(&self, t: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.25 * t * t;
        self.u.iter().zip(&self.weights).map(move |(&u, &w)| (c / u, w))
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}
