//! Desk-scale checks of the weighted estimates in the Gauss model: the
//! bilinear embedding, the weighted Riesz-transform norm on a Hermite
//! subspace, the Poisson representation of `⟨Rf, g⟩`, and weight sweeps.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::hermite::{
    orthonormal_basis, poisson_time_derivative, riesz_apply, semigroup_apply, HermiteExpansion, HermiteFunction,
    OneForm, Semigroup,
};
use crate::gauss::inner::check_weight;
use crate::gauss::{q2_characteristic, truncate_weight, weighted_norm, FlowGrid, WeightSpec};
use crate::quadrature::{GaussHermite, GaussLegendre};
use crate::report::Check;

/// Constant of the bilinear embedding.
pub const EMBEDDING_CONSTANT: f64 = 20.0;
/// Constant of the weighted Riesz bound.
pub const RIESZ_CONSTANT: f64 = 80.0;
/// Target for the discarded `t`-tail of the embedding integral.
pub const EMBEDDING_TAIL_TOL: f64 = 1e-8;
/// Target for the discarded `t`-tail of the representation integral.
pub const REPRESENTATION_TAIL_TOL: f64 = 1e-15;
pub const TRUNCATION_LADDER: [u32; 5] = [2, 4, 8, 16, 32];

const GL_ORDER: usize = 12;
const PANELS_PER_UNIT: f64 = 4.0;
const EMBEDDING_GH_ORDER: usize = 120;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingResult {
    pub lhs: f64,
    /// `20 · q2 · ‖f‖_ω · ‖g‖_{ω⁻¹}`.
    pub bound: f64,
    /// `lhs / bound`, or `0` when both vanish.
    pub ratio: f64,
    pub t_truncation: f64,
    /// Upper bound of the discarded integral over `t > T`.
    pub tail_estimate: f64,
    pub q2: f64,
    pub f_norm: f64,
    pub g_norm: f64,
}

/// `∫₀^∞ t e^{−2t} dt` restricted to `[T, ∞)`.
fn t_exp_tail(t: f64, rate: f64) -> f64 {
    (-rate * t).exp() * (rate * t + 1.0) / (rate * rate)
}

fn embedding_tail(f: &HermiteFunction, g: &OneForm, t: f64) -> f64 {
    let fc: f64 = f.coeffs().iter().enumerate().map(|(n, c)| n as f64 * c * c).sum();
    let gc: f64 = g.coeffs().iter().enumerate().map(|(m, b)| (2 * m + 1) as f64 * b * b).sum();
    (2.0 * fc).sqrt() * gc.sqrt() * t_exp_tail(t, 2.0)
}

/// `|∇̄ u|(x)` for `u = Σ a_k e^{−t√λ_k} ĥ_k`, summing the squares of the
/// `x`-derivative and the `t`-derivative.
fn space_time_gradient<T: HermiteExpansion>(u: &T, t: f64, basis: &[f64]) -> f64 {
    let mut dx = 0.0;
    let mut dt = 0.0;
    for (k, &c) in u.coeffs().iter().enumerate() {
        let rate = T::eigenvalue(k).sqrt();
        let ck = c * (-t * rate).exp();
        if k > 0 {
            dx += ck * (k as f64).sqrt() * basis[k - 1];
        }
        dt -= ck * rate * basis[k];
    }
    dx.hypot(dt)
}

/// `∫₀^∞∫ |∇̄P_t f| |∇̄P⃗_t g| t dγ dt` with an explicit `q2`.
pub fn embedding_with_q2(f: &HermiteFunction, g: &OneForm, w: &WeightSpec, q2: f64) -> Result<EmbeddingResult> {
    check_weight(w)?;
    if f.coeffs()[0] != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "f has constant coefficient {}; it must lie in the range of -L",
            f.coeffs()[0]
        )));
    }
    let mut t_max = 8.0;
    while embedding_tail(f, g, t_max) > EMBEDDING_TAIL_TOL {
        t_max *= 2.0;
        if t_max > 4096.0 {
            return Err(Error::NonFinite("embedding tail does not decay".into()));
        }
    }
    let tail = embedding_tail(f, g, t_max);
    let gh = GaussHermite::new(EMBEDDING_GH_ORDER.max(2 * (f.order() + g.order()) + 20))?;
    let gl = GaussLegendre::new(GL_ORDER)?;
    let panels = (t_max * PANELS_PER_UNIT).ceil() as usize;
    let len = f.order().max(g.order()) + 1;
    let bases: Vec<Vec<f64>> = gh
        .nodes()
        .iter()
        .map(|&x| {
            let mut b = vec![0.0; len];
            orthonormal_basis(x, &mut b);
            b
        })
        .collect();
    let lhs = gl.integrate_composite(0.0, t_max, panels, |t| {
        let inner: f64 = bases
            .iter()
            .zip(gh.weights())
            .map(|(b, w)| w * space_time_gradient(f, t, b) * space_time_gradient(g, t, b))
            .sum();
        t * inner
    });

    let f_norm = weighted_norm(f, w, &gh)?;
    let g_norm = weighted_norm(g, &w.inverse(), &gh)?;
    let bound = EMBEDDING_CONSTANT * q2 * f_norm * g_norm;
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / bound };
    Ok(EmbeddingResult { lhs, bound, ratio, t_truncation: t_max, tail_estimate: tail, q2, f_norm, g_norm })
}

/// Bilinear embedding with `q2` taken as the grid lower bound on `grid`.
pub fn bilinear_lhs(f: &HermiteFunction, g: &OneForm, w: &WeightSpec, grid: &FlowGrid) -> Result<EmbeddingResult> {
    let q2 = q2_characteristic(w, grid)?.q2_lower;
    embedding_with_q2(f, g, w, q2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    /// `√λ_max` of `B v = λ A v`; a lower bound of the operator norm.
    pub weighted_norm: f64,
    pub q2: f64,
    /// `weighted_norm / (80 · q2)`.
    pub bound_ratio: f64,
    pub n: usize,
}

/// Gram matrix `G_{ij} = ∫ ĥ_i ĥ_j ω dγ` for `0 ≤ i, j ≤ n`.
fn weighted_gram(w: &WeightSpec, n: usize) -> Result<DMatrix<f64>> {
    check_weight(w)?;
    let gh = GaussHermite::new(w.default_quad_order().max(2 * n + 40))?;
    let mut g = DMatrix::<f64>::zeros(n + 1, n + 1);
    let mut basis = vec![0.0; n + 1];
    for (&x, &wt) in gh.nodes().iter().zip(gh.weights()) {
        orthonormal_basis(x, &mut basis);
        let scale = wt * w.eval(x);
        for i in 0..=n {
            for j in 0..=i {
                g[(i, j)] += scale * basis[i] * basis[j];
            }
        }
    }
    for i in 0..=n {
        for j in 0..i {
            g[(j, i)] = g[(i, j)];
        }
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("Gram matrix for {w} is not finite")));
    }
    Ok(g)
}

/// Largest `λ` with `B v = λ A v`, via `A = LLᵀ` and `L⁻¹ B L⁻ᵀ`.
fn generalized_max_eigen(a: DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    let chol =
        Cholesky::new(a).ok_or_else(|| Error::NotPositiveDefinite("raise the quadrature order or lower N".into()))?;
    let l = chol.l();
    let y = l.solve_lower_triangular(b).ok_or_else(|| Error::NotPositiveDefinite("singular Cholesky factor".into()))?;
    let c = l
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(|| Error::NotPositiveDefinite("singular Cholesky factor".into()))?;
    let sym = (&c + c.transpose()) * 0.5;
    Ok(SymmetricEigen::new(sym).eigenvalues.max())
}

/// Norm of the Riesz transform on `span{ĥ_1..ĥ_N}` in `L²(ω γ)` with an explicit `q2`.
pub fn riesz_norm_with_q2(w: &WeightSpec, n: usize, q2: f64) -> Result<NormResult> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("subspace dimension must be >= 2, got {n}")));
    }
    let g = weighted_gram(w, n)?;
    let a = g.view((1, 1), (n, n)).into_owned();
    let b = g.view((0, 0), (n, n)).into_owned();
    let lambda = generalized_max_eigen(a, &b)?;
    let weighted_norm = lambda.max(0.0).sqrt();
    Ok(NormResult { weighted_norm, q2, bound_ratio: weighted_norm / (RIESZ_CONSTANT * q2), n })
}

/// Weighted Riesz norm with `q2` from the default flow grid.
pub fn weighted_riesz_norm(w: &WeightSpec, n: usize) -> Result<NormResult> {
    weighted_riesz_norm_on(w, n, &FlowGrid::default())
}

pub fn weighted_riesz_norm_on(w: &WeightSpec, n: usize, grid: &FlowGrid) -> Result<NormResult> {
    let q2 = q2_characteristic(w, grid)?.q2_lower;
    riesz_norm_with_q2(w, n, q2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationCheck {
    pub n: usize,
    /// `⟨Rf, g⟩`.
    pub lhs: f64,
    /// Signed `4∫₀^∞ ⟨dP_t f, ∂_t P⃗_t g⟩ t dt`.
    pub rhs: f64,
    /// `||lhs| − |rhs||`.
    pub abs_gap: f64,
    pub t_truncation: f64,
    pub tail_estimate: f64,
}

/// Both sides of the Poisson representation for `f = ĥ_n`, `g = ĥ_{n−1} dx`.
pub fn representation_check(n: usize) -> Result<RepresentationCheck> {
    if n == 0 {
        return Err(Error::InvalidParameter("representation check needs n >= 1".into()));
    }
    let f = HermiteFunction::basis(n);
    let g = OneForm::basis(n - 1);
    let lhs: f64 = riesz_apply(&f).coeffs().iter().zip(g.coeffs()).map(|(a, b)| a * b).sum();

    // |integrand| ≤ Σ_k |a_k b_k| √λ_k √μ_k e^{−t(√λ_k + √μ_k)}; here one term with rate 2√n.
    let rate = 2.0 * (n as f64).sqrt();
    let scale = 4.0 * n as f64;
    let mut t_max = 20.0;
    while scale * t_exp_tail(t_max, rate) > REPRESENTATION_TAIL_TOL {
        t_max *= 2.0;
    }
    let gl = GaussLegendre::new(GL_ORDER)?;
    let panels = (t_max * PANELS_PER_UNIT).ceil() as usize;
    let mut failure = None;
    let integral = gl.integrate_composite(0.0, t_max, panels, |t| {
        let pairing = semigroup_apply(&f, t, Semigroup::Poisson).map(|pf| pf.exterior_derivative()).and_then(|df| {
            let dg = poisson_time_derivative(&g, t)?;
            Ok(df.coeffs().iter().zip(dg.coeffs()).map(|(a, b)| a * b).sum::<f64>())
        });
        match pairing {
            Ok(v) => v * t,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let rhs = 4.0 * integral;
    Ok(RepresentationCheck {
        n,
        lhs,
        rhs,
        abs_gap: (lhs.abs() - rhs.abs()).abs(),
        t_truncation: t_max,
        tail_estimate: scale * t_exp_tail(t_max, rate),
    })
}

/// One-parameter weight family swept by [`sweep_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightFamily {
    /// `e^{ax}`.
    ExpLinear,
    /// The constant `c`.
    Constant,
}

impl WeightFamily {
    pub fn instantiate(self, param: f64) -> Result<WeightSpec> {
        match self {
            WeightFamily::ExpLinear => WeightSpec::exp_linear(param),
            WeightFamily::Constant => WeightSpec::constant(param),
        }
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightFamily::ExpLinear => "exp",
            WeightFamily::Constant => "const",
        })
    }
}

impl FromStr for WeightFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exp" => Ok(WeightFamily::ExpLinear),
            "const" => Ok(WeightFamily::Constant),
            other => Err(Error::Parse { input: other.to_string(), reason: "expected `exp` or `const`".into() }),
        }
    }
}

impl Serialize for WeightFamily {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WeightFamily {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub trunc_n: u32,
    pub q2_trunc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub weight: WeightSpec,
    pub q2_lower: f64,
    pub weighted_norm: f64,
    pub bound_ratio: f64,
    pub ladder: Vec<LadderEntry>,
    pub ladder_monotone: bool,
    /// `|q2(ω_{n_max}) − q2(ω)|`.
    pub ladder_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub family: WeightFamily,
    pub n: usize,
    pub rows: Vec<SweepRow>,
    pub checks: Vec<Check>,
}

pub const SWEEP_CSV_HEADER: &str = "param,q2_lower,weighted_norm,bound_ratio,trunc_n,q2_trunc";

impl SweepReport {
    /// One line per `(param, trunc_n)`, in parameter order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            for entry in &row.ladder {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    row.param, row.q2_lower, row.weighted_norm, row.bound_ratio, entry.trunc_n, entry.q2_trunc
                ));
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.asserted).all(Check::passed)
    }
}

/// `q2`, Riesz norm and the truncation ladder for each parameter of `family`.
///
/// Asserts `bound_ratio ≤ 1` and a nondecreasing ladder; the distance of the
/// last rung to the untruncated `q2` is reported as an informational check
/// with tolerance `ladder_tol`.
pub fn sweep_report(
    family: WeightFamily,
    params: &[f64],
    n: usize,
    grid: &FlowGrid,
    ladder: &[u32],
    ladder_tol: f64,
) -> Result<SweepReport> {
    if params.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one parameter".into()));
    }
    if params.iter().any(|p| p.is_nan()) || params.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("sweep parameters must be sorted ascending".into()));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("truncation ladder must be strictly increasing".into()));
    }
    let mut bound = Check::new("sweep_bound_ratio");
    let mut monotone = Check::new("sweep_ladder_monotone");
    let mut gap_check = Check::informational("sweep_ladder_limit");
    let mut rows = Vec::with_capacity(params.len());
    for &param in params {
        let weight = family.instantiate(param)?;
        let q2 = q2_characteristic(&weight, grid)?.q2_lower;
        let norm = riesz_norm_with_q2(&weight, n, q2)?;
        let entries = ladder
            .iter()
            .map(|&k| {
                Ok(LadderEntry {
                    trunc_n: k,
                    q2_trunc: q2_characteristic(&truncate_weight(&weight, k)?, grid)?.q2_lower,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let steps_ok = entries.windows(2).map(|w| w[1].q2_trunc - w[0].q2_trunc).fold(f64::INFINITY, f64::min);
        let ladder_gap = entries.last().map_or(0.0, |e| (e.q2_trunc - q2).abs());
        bound.record(1.0 - norm.bound_ratio, 0.0, &[param]);
        monotone.record(steps_ok, 0.0, &[param]);
        gap_check.record(ladder_tol - ladder_gap, 0.0, &[param]);
        rows.push(SweepRow {
            param,
            weight,
            q2_lower: q2,
            weighted_norm: norm.weighted_norm,
            bound_ratio: norm.bound_ratio,
            ladder: entries,
            ladder_monotone: steps_ok >= 0.0,
            ladder_gap,
        });
    }
    Ok(SweepReport { family, n, rows, checks: vec![bound, monotone, gap_check] })
}
