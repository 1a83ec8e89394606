//! Poisson flows of weights and the Poisson-A2 characteristic `Q̃₂`.

use serde::{Deserialize, Serialize};

use super::weight::WeightSpec;
use crate::error::{Error, Result};
use crate::quadrature::{SubordinationRule, DEFAULT_SUBORDINATION_NODES};

/// Discretization of the space-time half plane used for `sup_{(x,t)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowGrid {
    pub x_nodes: Vec<f64>,
    pub t_nodes: Vec<f64>,
    /// Number of log-trapezoid nodes of the subordination integral.
    pub subordination_nodes: usize,
}

impl Default for FlowGrid {
    /// `x ∈ [−8, 8]` with step `0.25`; 40 log-spaced `t ∈ [1e−3, 32]`.
    fn default() -> Self {
        Self::regular(8.0, 0.25, 1e-3, 32.0, 40, DEFAULT_SUBORDINATION_NODES).expect("default flow grid is valid")
    }
}

impl FlowGrid {
    pub fn regular(x_max: f64, x_step: f64, t_min: f64, t_max: f64, t_count: usize, sub_nodes: usize) -> Result<Self> {
        if !(x_max >= 0.0 && x_step > 0.0) {
            return Err(Error::InvalidParameter(format!("bad x-grid: max {x_max}, step {x_step}")));
        }
        if !(t_min > 0.0 && t_max >= t_min && t_count >= 1) {
            return Err(Error::InvalidParameter(format!("bad t-grid: [{t_min}, {t_max}] x {t_count}")));
        }
        let half = (x_max / x_step).round() as i64;
        let x_nodes = (-half..=half).map(|i| i as f64 * x_step).collect();
        let t_nodes = if t_count == 1 {
            vec![t_min]
        } else {
            let ratio = (t_max / t_min).ln() / (t_count - 1) as f64;
            (0..t_count).map(|i| t_min * (ratio * i as f64).exp()).collect()
        };
        let grid = Self { x_nodes, t_nodes, subordination_nodes: sub_nodes };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_nodes.is_empty() || self.t_nodes.is_empty() {
            return Err(Error::InvalidParameter("flow grid must be nonempty".into()));
        }
        let n = self.x_nodes.len();
        let symmetric = (0..n).all(|i| (self.x_nodes[i] + self.x_nodes[n - 1 - i]).abs() <= 1e-12);
        if !symmetric {
            return Err(Error::InvalidParameter("x nodes must be symmetric about 0".into()));
        }
        if self.t_nodes.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidParameter("t nodes must be finite and > 0".into()));
        }
        if self.t_nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("t nodes must be strictly increasing".into()));
        }
        SubordinationRule::new(self.subordination_nodes)?;
        Ok(())
    }

    pub fn subordination_rule(&self) -> Result<SubordinationRule> {
        SubordinationRule::new(self.subordination_nodes)
    }
}

/// `P_t ω (x)` through the subordination identity with exact inner heat steps.
pub fn poisson_weight(w: &WeightSpec, x: f64, t: f64, rule: &SubordinationRule) -> Result<f64> {
    w.validate()?;
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("Poisson time must be finite and > 0, got {t}")));
    }
    let profile = w.profile();
    let value: f64 = rule.heat_times(t).map(|(s, wt)| wt * profile.heat_mean(x, s)).sum();
    if !value.is_finite() {
        return Err(Error::NonFinite(format!("P_t w({x}) at t = {t} for {w}")));
    }
    Ok(value)
}

/// Grid lower bound of `Q̃₂(ω) = sup_{(x,t)} P_t ω(x) · P_t ω⁻¹(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Q2Estimate {
    /// `max(grid maximum, t → ∞ limit)`; a lower bound of the true sup.
    pub q2_lower: f64,
    pub grid_max: f64,
    /// Arg-max node of the grid maximum.
    pub argmax_x: f64,
    pub argmax_t: f64,
    /// `(∫ ω dγ)(∫ ω⁻¹ dγ)`.
    pub limit: f64,
    /// True when the limit exceeds every grid value.
    pub attained_at_limit: bool,
    /// Smallest product seen on the grid; must be `≥ 1`.
    pub grid_min: f64,
}

pub fn q2_characteristic(w: &WeightSpec, grid: &FlowGrid) -> Result<Q2Estimate> {
    grid.validate()?;
    w.validate()?;
    let rule = grid.subordination_rule()?;
    let inv = w.inverse();
    let mut grid_max = f64::NEG_INFINITY;
    let mut grid_min = f64::INFINITY;
    let (mut argmax_x, mut argmax_t) = (0.0, 0.0);
    for &t in &grid.t_nodes {
        for &x in &grid.x_nodes {
            let prod = poisson_weight(w, x, t, &rule)? * poisson_weight(&inv, x, t, &rule)?;
            if prod > grid_max {
                grid_max = prod;
                argmax_x = x;
                argmax_t = t;
            }
            grid_min = grid_min.min(prod);
        }
    }
    let limit = w.mean() * inv.mean();
    Ok(Q2Estimate {
        q2_lower: grid_max.max(limit),
        grid_max,
        argmax_x,
        argmax_t,
        limit,
        attained_at_limit: limit > grid_max,
        grid_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::weight::truncate_weight;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn small_grid() -> FlowGrid {
        FlowGrid::regular(2.0, 0.5, 1e-2, 8.0, 6, 343).unwrap()
    }

    #[test]
    fn default_grid_shape() {
        let g = FlowGrid::default();
        assert_eq!(g.x_nodes.len(), 65);
        assert_eq!(g.t_nodes.len(), 40);
        assert_relative_eq!(g.t_nodes[0], 1e-3);
        assert_relative_eq!(g.t_nodes[39], 32.0, max_relative = 1e-12);
        assert_eq!(g.x_nodes[0], -8.0);
    }

    #[test]
    fn grid_validation() {
        let mut g = small_grid();
        g.t_nodes = vec![1.0, 0.5];
        assert!(g.validate().is_err());
        let mut g = small_grid();
        g.x_nodes = vec![0.0, 1.0];
        assert!(g.validate().is_err());
    }

    #[test]
    fn constant_weight_is_fixed() {
        let rule = SubordinationRule::new(343).unwrap();
        let w = WeightSpec::Constant(2.5);
        for (x, t) in [(0.0, 0.1), (3.0, 5.0)] {
            assert_relative_eq!(poisson_weight(&w, x, t, &rule).unwrap(), 2.5, max_relative = 1e-13);
        }
        assert_relative_eq!(q2_characteristic(&w, &small_grid()).unwrap().q2_lower, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn exp_weight_tends_to_mean() {
        let rule = SubordinationRule::new(343).unwrap();
        let w = WeightSpec::ExpLinear(1.0);
        let v = poisson_weight(&w, 0.0, 200.0, &rule).unwrap();
        assert_relative_eq!(v, 0.5f64.exp(), max_relative = 1e-10);
        let q = q2_characteristic(&w, &small_grid()).unwrap();
        assert!(q.q2_lower >= E - 1e-12);
        assert_relative_eq!(q.limit, E, max_relative = 1e-14);
        assert!(q.grid_min >= 1.0 - 1e-10);
    }

    #[test]
    fn rejects_bad_time() {
        let rule = SubordinationRule::new(343).unwrap();
        assert!(poisson_weight(&WeightSpec::Constant(1.0), 0.0, 0.0, &rule).is_err());
    }

    #[test]
    fn truncation_never_increases_q2() {
        let g = small_grid();
        let w = WeightSpec::ExpLinear(1.0);
        let full = q2_characteristic(&w, &g).unwrap().q2_lower;
        let mut prev = 0.0;
        for n in [2, 4, 8, 16, 32] {
            let q = q2_characteristic(&truncate_weight(&w, n).unwrap(), &g).unwrap().q2_lower;
            assert!(q <= full * (1.0 + 1e-12));
            assert!(q >= prev * (1.0 - 1e-12));
            prev = q;
        }
    }
}
