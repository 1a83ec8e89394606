//! Model-space validation of the spectral calculus and of the pointwise
//! semigroup inequalities (Hölder-type bounds, intertwining of `d`, and
//! domination of the one-form heat flow).

use super::flow::{poisson_weight, FlowGrid};
use super::hermite::{hermite_orthonormal, semigroup_apply, HermiteExpansion, HermiteFunction, OneForm, Semigroup};
use super::kernel::MehlerKernel;
use super::weight::WeightSpec;
use crate::error::Result;
use crate::quadrature::GaussHermite;
use crate::report::Check;

/// Slack allowed in the pointwise inequalities.
pub const POINTWISE_TOL: f64 = 1e-8;
/// Slack allowed in `P_t ω · P_t ω⁻¹ ≥ 1`.
pub const PRODUCT_TOL: f64 = 1e-10;

/// Projects `values(x)` on `ĥ_0..ĥ_{k_max}` with a Gauss–Hermite rule.
fn project(gh: &GaussHermite, k_max: usize, mut values: impl FnMut(f64) -> f64) -> Vec<f64> {
    let mut coeffs = vec![0.0; k_max + 1];
    let mut basis = vec![0.0; k_max + 1];
    for (&x, &w) in gh.nodes().iter().zip(gh.weights()) {
        let v = values(x);
        super::hermite::orthonormal_basis(x, &mut basis);
        for (c, b) in coeffs.iter_mut().zip(&basis) {
            *c += w * v * b;
        }
    }
    coeffs
}

/// Mehler-quadrature heat step on `ĥ_n` against the diagonal factor `e^{−ns}`,
/// coefficient by coefficient.
pub fn validate_heat_spectrum(kernel: &MehlerKernel, n_max: usize, times: &[f64], tol: f64) -> Result<Check> {
    let gh = GaussHermite::new(64)?;
    let mut check = Check::new("spectral_heat");
    for n in 0..=n_max {
        for &s in times {
            let coeffs = project(&gh, n_max + 2, |x| kernel.heat(x, s, |z| hermite_orthonormal(n, z)));
            for (k, c) in coeffs.iter().enumerate() {
                let expected = if k == n { (-(n as f64) * s).exp() } else { 0.0 };
                check.record(tol - (c - expected).abs(), 0.0, &[n as f64, s, k as f64]);
            }
        }
    }
    Ok(check)
}

/// Subordinated Poisson flow on `ĥ_n` against `e^{−t√n}`.
pub fn validate_poisson_spectrum(kernel: &MehlerKernel, n_max: usize, times: &[f64], tol: f64) -> Result<Check> {
    let gh = GaussHermite::new(64)?;
    let mut check = Check::new("spectral_poisson");
    for n in 0..=n_max {
        for &t in times {
            let coeffs = project(&gh, n_max + 2, |x| kernel.poisson(x, t, |z| hermite_orthonormal(n, z)));
            for (k, c) in coeffs.iter().enumerate() {
                let expected = if k == n { (-(n as f64).sqrt() * t).exp() } else { 0.0 };
                check.record(tol - (c - expected).abs(), 0.0, &[n as f64, t, k as f64]);
            }
        }
    }
    Ok(check)
}

/// `|P_t f(x)|² ≤ P_t(|f|² ω)(x) · P_t ω⁻¹(x)` on the grid.
pub fn weighted_cauchy_schwarz(
    kernel: &MehlerKernel,
    grid: &FlowGrid,
    weights: &[WeightSpec],
    fns: &[HermiteFunction],
) -> Check {
    let mut check = Check::new("weighted_cauchy_schwarz");
    let nf = fns.len();
    for (wi, w) in weights.iter().enumerate() {
        let profile = w.profile();
        for &t in &grid.t_nodes {
            for &x in &grid.x_nodes {
                let vals = kernel.poisson_many(x, t, 2 * nf + 1, |z, out| {
                    let omega = profile.eval(z);
                    for (i, f) in fns.iter().enumerate() {
                        let fz = f.eval(z);
                        out[i] = fz;
                        out[nf + i] = fz * fz * omega;
                    }
                    out[2 * nf] = 1.0 / omega;
                });
                for i in 0..nf {
                    let margin = vals[nf + i] * vals[2 * nf] - vals[i] * vals[i];
                    check.record(margin, POINTWISE_TOL, &[wi as f64, i as f64, x, t]);
                }
            }
        }
    }
    check
}

/// `d P_t f = P⃗_t d f`, exactly in Hermite coordinates.
pub fn intertwining(grid: &FlowGrid, fns: &[HermiteFunction]) -> Result<Check> {
    let mut check = Check::new("intertwining");
    for (i, f) in fns.iter().enumerate() {
        for &t in &grid.t_nodes {
            let lhs = semigroup_apply(f, t, Semigroup::Poisson)?.exterior_derivative();
            let rhs = semigroup_apply(&f.exterior_derivative(), t, Semigroup::Poisson)?;
            let scale = 1.0 + rhs.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let diff = lhs.coeffs().iter().zip(rhs.coeffs()).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
            check.record(-diff, 4.0 * f64::EPSILON * scale, &[i as f64, t]);
        }
    }
    Ok(check)
}

/// `|e^{tΔ⃗} g|(x) ≤ e^{tL} |g|(x)`; `t` runs over the grid's time nodes.
pub fn form_domination(kernel: &MehlerKernel, grid: &FlowGrid, forms: &[OneForm]) -> Check {
    let mut check = Check::new("form_domination");
    for (i, g) in forms.iter().enumerate() {
        for &t in &grid.t_nodes {
            for &x in &grid.x_nodes {
                let vals = kernel.heat_many(x, t, 2, |z, out| {
                    let gz = g.eval(z);
                    out[0] = gz;
                    out[1] = gz.abs();
                });
                // Δ⃗ = L − 1 on the coefficient function.
                let lhs = ((-t).exp() * vals[0]).abs();
                check.record(vals[1] - lhs, POINTWISE_TOL, &[i as f64, x, t]);
            }
        }
    }
    check
}

/// `|P⃗_t g(x)|² ≤ P_t(|g|² ω⁻¹)(x) · P_t ω(x)`.
pub fn form_weighted_cauchy_schwarz(
    kernel: &MehlerKernel,
    grid: &FlowGrid,
    weights: &[WeightSpec],
    forms: &[OneForm],
) -> Check {
    let mut check = Check::new("form_weighted_cauchy_schwarz");
    let nf = forms.len();
    for (wi, w) in weights.iter().enumerate() {
        let profile = w.profile();
        for &t in &grid.t_nodes {
            for &x in &grid.x_nodes {
                let flowed = kernel.subordinated_many(x, t, 1.0, nf, |z, out| {
                    for (o, g) in out.iter_mut().zip(forms) {
                        *o = g.eval(z);
                    }
                });
                let vals = kernel.poisson_many(x, t, nf + 1, |z, out| {
                    let omega = profile.eval(z);
                    for (i, g) in forms.iter().enumerate() {
                        let gz = g.eval(z);
                        out[i] = gz * gz / omega;
                    }
                    out[nf] = omega;
                });
                for i in 0..nf {
                    let margin = vals[i] * vals[nf] - flowed[i] * flowed[i];
                    check.record(margin, POINTWISE_TOL, &[wi as f64, i as f64, x, t]);
                }
            }
        }
    }
    check
}

/// `P_t ω(x) · P_t ω⁻¹(x) ≥ 1` at every grid node.
pub fn product_lower_bound(grid: &FlowGrid, weights: &[WeightSpec]) -> Result<Check> {
    let rule = grid.subordination_rule()?;
    let mut check = Check::new("poisson_product_ge_1");
    for (wi, w) in weights.iter().enumerate() {
        let inv = w.inverse();
        for &t in &grid.t_nodes {
            for &x in &grid.x_nodes {
                let prod = poisson_weight(w, x, t, &rule)? * poisson_weight(&inv, x, t, &rule)?;
                check.record(prod - 1.0, PRODUCT_TOL, &[wi as f64, x, t]);
            }
        }
    }
    Ok(check)
}

/// Test functions used by the default suite.
pub fn default_test_functions() -> Vec<HermiteFunction> {
    vec![
        HermiteFunction::basis(1),
        HermiteFunction::basis(2),
        HermiteFunction::new(vec![0.0, 1.0, 0.0, 1.0]).expect("finite"),
        HermiteFunction::new(vec![1.0, 0.0, -0.5]).expect("finite"),
    ]
}

pub fn default_test_forms() -> Vec<OneForm> {
    vec![OneForm::basis(0), OneForm::basis(2), OneForm::new(vec![1.0, -1.0, 0.0, 0.3]).expect("finite")]
}

pub fn default_test_weights() -> Vec<WeightSpec> {
    vec![
        WeightSpec::Constant(1.0),
        WeightSpec::ExpLinear(0.5),
        WeightSpec::ExpLinear(1.0),
        WeightSpec::Truncated { base: Box::new(WeightSpec::ExpLinear(1.0)), n: 4 },
    ]
}

/// Runs every pointwise check plus the `≥ 1` product bound.
pub fn semigroup_suite(
    kernel: &MehlerKernel,
    grid: &FlowGrid,
    weights: &[WeightSpec],
    fns: &[HermiteFunction],
    forms: &[OneForm],
) -> Result<Vec<Check>> {
    Ok(vec![
        weighted_cauchy_schwarz(kernel, grid, weights, fns),
        intertwining(grid, fns)?,
        form_domination(kernel, grid, forms),
        form_weighted_cauchy_schwarz(kernel, grid, weights, forms),
        product_lower_bound(grid, weights)?,
    ])
}
