//! Quadrature realization of the Mehler heat kernel and the subordinated
//! Poisson kernel acting on pointwise functions.
//!
//! `e^{sL} f(x) = ∫ f(x e^{−s} + √(1 − e^{−2s}) y) dγ(y)` is discretized by
//! Gauss–Hermite, and `P_t` by the log-trapezoid [`SubordinationRule`]. The
//! resulting kernels have nonnegative weights, so pointwise Hölder-type
//! inequalities hold exactly for the discrete operators.

use crate::error::Result;
use crate::quadrature::{GaussHermite, SubordinationRule};

/// Beyond this heat time `e^{−s}` is below `1e−17` and `e^{sL} f` is the mean of `f`.
const FLAT_HEAT_TIME: f64 = 40.0;

#[derive(Debug, Clone)]
pub struct MehlerKernel {
    gh: GaussHermite,
    sub: SubordinationRule,
}

impl MehlerKernel {
    pub fn new(gh_order: usize, subordination_nodes: usize) -> Result<Self> {
        Ok(Self { gh: GaussHermite::new(gh_order)?, sub: SubordinationRule::new(subordination_nodes)? })
    }

    pub fn gauss_hermite(&self) -> &GaussHermite {
        &self.gh
    }

    pub fn subordination(&self) -> &SubordinationRule {
        &self.sub
    }

    /// Vector-valued heat step: `f(z, out)` writes `m` integrand values at `z`;
    /// returns `e^{sL}` of each, scaled by `factor` and accumulated into `acc`.
    fn heat_accumulate<F>(&self, x: f64, s: f64, factor: f64, f: &mut F, buf: &mut [f64], acc: &mut [f64])
    where
        F: FnMut(f64, &mut [f64]),
    {
        if s <= 0.0 {
            f(x, buf);
            for (a, b) in acc.iter_mut().zip(buf.iter()) {
                *a += factor * b;
            }
            return;
        }
        let decay = (-s).exp();
        let sigma = (-(-2.0 * s).exp_m1()).sqrt();
        let mu = x * decay;
        for (&y, &w) in self.gh.nodes().iter().zip(self.gh.weights()) {
            f(mu + sigma * y, buf);
            let fw = factor * w;
            for (a, b) in acc.iter_mut().zip(buf.iter()) {
                *a += fw * b;
            }
        }
    }

    /// `e^{sL}` applied to `m` functions at once.
    pub fn heat_many<F>(&self, x: f64, s: f64, m: usize, mut f: F) -> Vec<f64>
    where
        F: FnMut(f64, &mut [f64]),
    {
        let mut buf = vec![0.0; m];
        let mut acc = vec![0.0; m];
        self.heat_accumulate(x, s, 1.0, &mut f, &mut buf, &mut acc);
        acc
    }

    pub fn heat(&self, x: f64, s: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.heat_many(x, s, 1, |z, out| out[0] = f(z))[0]
    }

    /// Subordinated flow `Σ_u W_u e^{−shift·s_u} e^{s_u L}` applied to `m` functions.
    ///
    /// `shift = 0` gives the Poisson semigroup on functions, `shift = 1` the
    /// Poisson semigroup on one-form coefficients.
    pub fn subordinated_many<F>(&self, x: f64, t: f64, shift: f64, m: usize, mut f: F) -> Vec<f64>
    where
        F: FnMut(f64, &mut [f64]),
    {
        let mut buf = vec![0.0; m];
        let mut acc = vec![0.0; m];
        if t == 0.0 {
            f(x, &mut buf);
            return buf;
        }
        let mut flat_weight = 0.0;
        for (s, w) in self.sub.heat_times(t) {
            let factor = w * (-shift * s).exp();
            if factor == 0.0 {
                continue;
            }
            if s > FLAT_HEAT_TIME {
                flat_weight += factor;
            } else {
                self.heat_accumulate(x, s, factor, &mut f, &mut buf, &mut acc);
            }
        }
        if flat_weight > 0.0 {
            self.heat_accumulate(0.0, f64::INFINITY, flat_weight, &mut f, &mut buf, &mut acc);
        }
        acc
    }

    pub fn poisson_many<F>(&self, x: f64, t: f64, m: usize, f: F) -> Vec<f64>
    where
        F: FnMut(f64, &mut [f64]),
    {
        self.subordinated_many(x, t, 0.0, m, f)
    }

    pub fn poisson(&self, x: f64, t: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.poisson_many(x, t, 1, |z, out| out[0] = f(z))[0]
    }

    pub fn poisson_oneform(&self, x: f64, t: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.subordinated_many(x, t, 1.0, 1, |z, out| out[0] = g(z))[0]
    }
}
