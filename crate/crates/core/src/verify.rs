//! Sampling of `D_Q`, finite-difference Hessians, and the property checkers
//! for size, concavity, monotonicity in `ν`, the auxiliary functions and the
//! mollified Bellman function.
//!
//! All randomness comes from `ChaCha8Rng` seeded through [`derive_seed`], so
//! every result is reproducible from the configured seed on any platform.

use std::mem::Discriminant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bellman::{
    aux_hessian_rhs, aux_size_bound, critical_a_profile, eval_components, pi_distance, profile_bq, profile_deficits,
    AuxKind, AuxValues, BellmanPoint, CriticalA, QContext, RadialPoint, SIZE_CONSTANT,
};
use crate::error::{Error, Result};
use crate::report::{Check, VerificationReport};

/// Relative inset `δ` used when sampling the interior of `D_Q`.
pub const DOMAIN_MARGIN: f64 = 1e-3;
/// Number of step halvings before a stencil is given up.
pub const MAX_HALVINGS: u32 = 8;
pub const SIZE_REL_TOL: f64 = 1e-10;
pub const SIGN_TOL: f64 = 1e-6;
pub const HESSIAN_TOL: f64 = 1e-4;
pub const AUX_HESSIAN_TOL: f64 = 1e-6;
pub const AUX_DIRECTIONS: usize = 16;
/// Bound on the unweighted component sum, in units of `Z + H`.
pub const UNWEIGHTED_BOUND: f64 = 6.0;

/// SplitMix64 finalizer over `seed` and two stream labels.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        ^ a.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ b.wrapping_add(1).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..=hi.ln()).exp()
}

/// Splits `p` into `r · s` with `1 ≤ rs ≤ Q` holding exactly in floating point.
fn split_product(r0: f64, p: f64, q: f64) -> Option<(f64, f64)> {
    let mut r = r0;
    for _ in 0..64 {
        let mut s = p / r;
        for _ in 0..8 {
            let rs = r * s;
            if rs < 1.0 {
                s = s.next_up();
            } else if rs > q {
                s = s.next_down();
            } else {
                return Some((r, s));
            }
        }
        r = r.next_up();
    }
    None
}

fn sample_point(ctx: &QContext, rng: &mut ChaCha8Rng) -> Result<BellmanPoint> {
    let q = ctx.q();
    let (lo, hi) = (1.0 + DOMAIN_MARGIN, q - DOMAIN_MARGIN);
    let p = if q == 1.0 {
        1.0
    } else if lo < hi {
        rng.random_range(lo..=hi)
    } else {
        0.5 * (1.0 + q)
    };
    let factor = log_uniform(rng, 1e-2, 1e2);
    let (r, s) = split_product(p.sqrt() * factor, p, q)
        .ok_or_else(|| Error::Degenerate(format!("cannot split rs = {p} inside [1, {q}]")))?;
    let z = log_uniform(rng, 1e-3, 1e3);
    let h = log_uniform(rng, 1e-3, 1e3);
    let zeta = rng.random_range(-1.0..=1.0) * ((1.0 - DOMAIN_MARGIN) * z * r).sqrt();
    let nu = rng.random::<f64>() * ((1.0 - DOMAIN_MARGIN) * h * s).sqrt();
    let mut eta: Vec<f64> = (0..ctx.eta_dim()).map(|_| rng.sample(StandardNormal)).collect();
    let norm = eta.iter().map(|e| e * e).sum::<f64>().sqrt();
    if norm > 0.0 {
        eta.iter_mut().for_each(|e| *e *= nu / norm);
    } else if let Some(first) = eta.first_mut() {
        *first = nu;
    }
    let point = BellmanPoint::new(z, h, zeta, eta, r, s);
    point.check_in(ctx)?;
    Ok(point)
}

/// Deterministic sample of `count` points strictly inside `D_Q`.
///
/// `rs` is uniform in `[1 + δ, Q − δ]` (exactly `1` when `Q = 1`), split by a
/// log-uniform factor in `[1e−2, 1e2]`; `Z, H` are log-uniform in
/// `[1e−3, 1e3]`; `ζ² ≤ (1 − δ)Zr` and `|η|² ≤ (1 − δ)Hs`.
pub fn sample_domain(ctx: &QContext, count: usize, seed: u64) -> Result<Vec<BellmanPoint>> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sample_point(ctx, &mut rng)).collect()
}

/// Unit vector in coordinates `(dZ, dH, dζ, dη…, dr, ds)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    components: Vec<f64>,
}

impl Direction {
    /// Normalizes `components`; at least six are required.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.len() < 6 {
            return Err(Error::InvalidParameter(format!(
                "a direction needs at least 6 components, got {}",
                components.len()
            )));
        }
        let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter("direction must be finite and nonzero".into()));
        }
        Ok(Self { components: components.into_iter().map(|c| c / norm).collect() })
    }

    pub fn coordinate(dim: usize, index: usize, sign: f64) -> Self {
        let mut components = vec![0.0; dim];
        components[index] = sign.signum();
        Self { components }
    }

    pub fn random(dim: usize, rng: &mut impl Rng) -> Self {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(d) = Self::new(v) {
                return d;
            }
        }
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn d_zeta(&self) -> f64 {
        self.components[2]
    }

    /// Euclidean norm of the `dη` block.
    pub fn d_eta_norm(&self) -> f64 {
        let n = self.components.len();
        self.components[3..n - 2].iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `dXᵀ M dX`.
    pub fn quadratic_form(&self, m: &DMatrix<f64>) -> f64 {
        let d = &self.components;
        let mut total = 0.0;
        for (i, di) in d.iter().enumerate() {
            for (j, dj) in d.iter().enumerate() {
                total += di * m[(i, j)] * dj;
            }
        }
        total
    }
}

#[derive(Debug, Clone)]
pub struct FdHessian {
    pub matrix: DMatrix<f64>,
    /// Base step actually used.
    pub step: f64,
    pub halvings: u32,
}

/// Per-coordinate steps: `h·r`, `h·s` for the last two slots and
/// `h·max(1, |xᵢ|)` elsewhere.
fn coordinate_steps(x: &[f64], h: f64, relative_tail: usize) -> Vec<f64> {
    let n = x.len();
    x.iter().enumerate().map(|(i, v)| if i + relative_tail >= n { h * v.abs() } else { h * v.abs().max(1.0) }).collect()
}

/// Central-difference Hessian; `f` returns `None` for an unusable stencil
/// point, which halves the step and restarts.
fn fd_hessian_with<F>(x0: &[f64], h0: f64, relative_tail: usize, mut f: F) -> Result<FdHessian>
where
    F: FnMut(&[f64]) -> Option<f64>,
{
    if !(h0 > 0.0 && h0.is_finite()) {
        return Err(Error::InvalidParameter(format!("finite-difference step must be > 0, got {h0}")));
    }
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut h = h0;
    'attempt: for halvings in 0..=MAX_HALVINGS {
        let st = coordinate_steps(x0, h, relative_tail);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for (a, b, sign) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                    x.copy_from_slice(x0);
                    x[i] += a * st[i];
                    x[j] += b * st[j];
                    match f(&x) {
                        Some(v) => acc += sign * v,
                        None => {
                            h *= 0.5;
                            continue 'attempt;
                        }
                    }
                }
                let v = acc / (4.0 * st[i] * st[j]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        return Ok(FdHessian { matrix: m, step: h, halvings });
    }
    Err(Error::Degenerate(format!("finite-difference stencil rejected after {MAX_HALVINGS} halvings")))
}

fn radial_from_slice(x: &[f64]) -> RadialPoint {
    let n = x.len();
    RadialPoint {
        z: x[0],
        h: x[1],
        zeta: x[2].abs(),
        nu: x[3..n - 2].iter().map(|e| e * e).sum::<f64>().sqrt(),
        r: x[n - 2],
        s: x[n - 1],
    }
}

fn branch(p: &RadialPoint, q: f64) -> Option<Discriminant<CriticalA>> {
    critical_a_profile(p, q).ok().map(|a| std::mem::discriminant(&a))
}

/// Finite-difference Hessian of `B_Q` in flat coordinates.
///
/// Stencil points may leave `D_Q` (the formulas are analytic wherever
/// `r, s > 0` and the denominators are positive) but must stay on the same
/// smooth branch as the center; otherwise `h` is halved, up to
/// [`MAX_HALVINGS`] times. The affine part `(C1 + C2 + C3 + 3C4)(Z + H)` has
/// zero second differences and is left out, which keeps its rounding error
/// out of the quotient at small steps.
pub fn fd_hessian(point: &BellmanPoint, ctx: &QContext, h: f64) -> Result<FdHessian> {
    point.check_in(ctx)?;
    let q = ctx.q();
    let center = point.radial();
    let center_branch = branch(&center, q);
    fd_hessian_with(&point.coordinates(), h, 2, |x| {
        let p = radial_from_slice(x);
        if branch(&p, q) != center_branch {
            return None;
        }
        profile_deficits(&p, q).ok().map(|d| -d.weighted()).filter(|v| v.is_finite())
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictRecording {
    /// Keep every point verdict in the report.
    #[default]
    All,
    /// Keep only verdicts with a violation.
    FailuresOnly,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub q_list: Vec<f64>,
    pub samples_per_q: usize,
    pub eta_dim: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub pi_exclusion: f64,
    pub directions_per_point: usize,
    pub mollify_eps: f64,
    pub mc_samples: usize,
    /// Sampled points per `Q` that also get the mollified checks.
    pub mollify_points: usize,
    /// Side length of the `(rs, r/s)` grid for the auxiliary functions.
    pub aux_grid: usize,
    pub record_verdicts: VerdictRecording,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            q_list: vec![1.0, 2.0, 10.0, 100.0],
            samples_per_q: 1000,
            eta_dim: 1,
            seed: 20_240_601,
            fd_step: 1e-4,
            pi_exclusion: 1e-3,
            directions_per_point: 64,
            mollify_eps: 1e-2,
            mc_samples: 256,
            mollify_points: 16,
            aux_grid: 200,
            record_verdicts: VerdictRecording::All,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.q_list.is_empty() {
            return bad("q_list must not be empty".into());
        }
        if let Some(q) = self.q_list.iter().find(|q| !(q.is_finite() && **q >= 1.0)) {
            return bad(format!("every Q must be finite and >= 1, got {q}"));
        }
        if self.samples_per_q == 0 {
            return bad("samples_per_q must be >= 1".into());
        }
        if self.eta_dim == 0 {
            return bad("eta_dim must be >= 1".into());
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return bad(format!("fd_step must be > 0, got {}", self.fd_step));
        }
        if !(self.pi_exclusion > 0.0 && self.pi_exclusion.is_finite()) {
            return bad(format!("pi_exclusion must be > 0, got {}", self.pi_exclusion));
        }
        if self.directions_per_point == 0 {
            return bad("directions_per_point must be >= 1".into());
        }
        if !(self.mollify_eps >= 0.0 && self.mollify_eps.is_finite()) {
            return bad(format!("mollify_eps must be >= 0, got {}", self.mollify_eps));
        }
        if self.mc_samples == 0 {
            return bad("mc_samples must be >= 1".into());
        }
        if self.aux_grid == 0 {
            return bad("aux_grid must be >= 1".into());
        }
        Ok(())
    }
}

/// Outcome of the three pointwise checks at one sampled point.
///
/// A check that could not run is listed in `skipped` and its flag stays `true`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointVerdict {
    pub q: f64,
    pub point: BellmanPoint,
    pub value: f64,
    pub size_ok: bool,
    pub sign_ok: bool,
    pub hessian_ok: bool,
    /// Most negative slack beyond tolerance over all checks that ran.
    pub worst_margin: f64,
    pub excluded_near_pi: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
    pub size_margin: f64,
    pub sign_margin: Option<f64>,
    pub hessian_margin: Option<f64>,
    /// `min dXᵀ(−d²B)dX / (|dζ||dη|)` over the random directions.
    pub deriv_ratio: Option<f64>,
}

impl PointVerdict {
    pub fn ok(&self) -> bool {
        self.size_ok && self.sign_ok && self.hessian_ok
    }
}

fn point_seed(seed: u64, point: &BellmanPoint) -> u64 {
    point.coordinates().iter().fold(seed, |acc, v| derive_seed(acc, v.to_bits(), 0))
}

/// One-sided `∂_ν B̄_Q` with step `h(1 + ν)`, forward when the step keeps
/// `ν² ≤ Hs`, backward otherwise.
fn nu_derivative(p: &RadialPoint, q: f64, h: f64) -> Result<f64> {
    let step = h * (1.0 + p.nu);
    let base = profile_bq(p, q)?;
    let limit = p.h * p.s;
    if (p.nu + step).powi(2) <= limit {
        let up = profile_bq(&RadialPoint { nu: p.nu + step, ..*p }, q)?;
        Ok((up - base) / step)
    } else if p.nu >= step {
        let down = profile_bq(&RadialPoint { nu: p.nu - step, ..*p }, q)?;
        Ok((base - down) / step)
    } else {
        Err(Error::Degenerate(format!("no one-sided nu step of size {step} fits (nu = {}, Hs = {limit})", p.nu)))
    }
}

/// Size, sign and concavity checks at one point of `D_Q`.
pub fn verify_point(point: &BellmanPoint, ctx: &QContext, cfg: &SuiteConfig) -> Result<PointVerdict> {
    let q = ctx.q();
    let value = eval_components(point, ctx)?.weighted();
    let zh = point.z + point.h;
    let mut skipped = Vec::new();

    let bound = SIZE_CONSTANT * zh;
    let size_margin = value.min(bound - value);
    let size_tol = SIZE_REL_TOL * bound.max(value.abs());
    let size_ok = size_margin >= -size_tol;
    let mut worst = size_margin + size_tol;

    let sign_tol = SIGN_TOL * (1.0 + value.abs());
    let sign_margin = match nu_derivative(&point.radial(), q, cfg.fd_step) {
        Ok(d) => Some(-d),
        Err(e) => {
            skipped.push(format!("sign: {e}"));
            None
        }
    };
    let sign_ok = sign_margin.is_none_or(|m| m >= -sign_tol);
    if let Some(m) = sign_margin {
        worst = worst.min(m + sign_tol);
    }

    let excluded_near_pi = pi_distance(point, ctx) <= cfg.pi_exclusion;
    let mut hessian_margin = None;
    let mut deriv_ratio = None;
    let hess_tol = HESSIAN_TOL * (1.0 + value.abs());
    if excluded_near_pi {
        skipped.push(format!("deriv: within {} of the singular set", cfg.pi_exclusion));
    } else {
        match fd_hessian(point, ctx, cfg.fd_step) {
            Ok(fd) => {
                let neg = -fd.matrix;
                let dim = ctx.dim();
                let mut rng = ChaCha8Rng::seed_from_u64(point_seed(cfg.seed, point));
                let mut margin = f64::INFINITY;
                for _ in 0..cfg.directions_per_point {
                    let d = Direction::random(dim, &mut rng);
                    let form = d.quadratic_form(&neg);
                    let cross = d.d_zeta().abs() * d.d_eta_norm();
                    margin = margin.min(form - 4.0 / q * cross);
                    if cross > 1e-12 {
                        let ratio = form / cross;
                        deriv_ratio = Some(deriv_ratio.map_or(ratio, |r: f64| r.min(ratio)));
                    }
                }
                for i in 0..dim {
                    for sign in [1.0, -1.0] {
                        margin = margin.min(Direction::coordinate(dim, i, sign).quadratic_form(&neg));
                    }
                }
                hessian_margin = Some(margin);
                worst = worst.min(margin + hess_tol);
            }
            Err(e) => skipped.push(format!("deriv: {e}")),
        }
    }
    let hessian_ok = hessian_margin.is_none_or(|m| m >= -hess_tol);

    Ok(PointVerdict {
        q,
        point: point.clone(),
        value,
        size_ok,
        sign_ok,
        hessian_ok,
        worst_margin: worst,
        excluded_near_pi,
        skipped,
        size_margin,
        sign_margin,
        hessian_margin,
        deriv_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxEntry {
    pub kind: AuxKind,
    pub value: f64,
    pub bound: f64,
    pub size_ok: bool,
    pub hessian_ok: bool,
    /// `min(F, bound − F)`.
    pub size_margin: f64,
    /// Smallest `−d²F(d) − rhs(d)` over the test directions.
    pub hessian_margin: Option<f64>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxVerdict {
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub entries: Vec<AuxEntry>,
}

impl AuxVerdict {
    pub fn ok(&self) -> bool {
        self.entries.iter().all(|e| e.size_ok && e.hessian_ok)
    }
}

/// Size and Hessian bounds of the five auxiliary functions at `(r, s)`.
///
/// The Hessian bound is tested along the 16 unit directions at angles
/// `kπ/16` in the `(dr, ds)` plane with absolute slack [`AUX_HESSIAN_TOL`].
pub fn verify_aux(r: f64, s: f64, ctx: &QContext, h: f64) -> Result<AuxVerdict> {
    let q = ctx.q();
    crate::bellman::eval_aux(AuxKind::K, r, s, ctx)?;
    let values = AuxValues::at(r, s, q);
    let entries = AuxKind::ALL
        .iter()
        .map(|&kind| {
            let value = values.get(kind);
            let bound = aux_size_bound(kind, r, s, q);
            let size_margin = value.min(bound - value);
            let (hessian_margin, skipped) = match fd_hessian_with(&[r, s], h, 2, |x| {
                (x[0] > 0.0 && x[1] > 0.0).then(|| AuxValues::at(x[0], x[1], q).get(kind)).filter(|v| v.is_finite())
            }) {
                Ok(fd) => {
                    let margin = (0..AUX_DIRECTIONS)
                        .map(|k| {
                            let theta = std::f64::consts::PI * k as f64 / AUX_DIRECTIONS as f64;
                            let (dr, ds) = (theta.cos(), theta.sin());
                            let m = &fd.matrix;
                            let form = -(dr * dr * m[(0, 0)] + 2.0 * dr * ds * m[(0, 1)] + ds * ds * m[(1, 1)]);
                            form - aux_hessian_rhs(kind, r, s, dr, ds)
                        })
                        .fold(f64::INFINITY, f64::min);
                    (Some(margin), None)
                }
                Err(e) => (None, Some(e.to_string())),
            };
            AuxEntry {
                kind,
                value,
                bound,
                size_ok: size_margin >= 0.0,
                hessian_ok: hessian_margin.is_none_or(|m| m >= -AUX_HESSIAN_TOL),
                size_margin,
                hessian_margin,
                skipped,
            }
        })
        .collect();
    Ok(AuxVerdict { q, r, s, entries })
}

/// Aggregated auxiliary-function checks over [`aux_grid`] for one `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxRun {
    pub size: Check,
    pub hessian: Check,
    /// Verdicts at grid points with at least one violated bound.
    pub failures: Vec<AuxVerdict>,
}

/// Runs [`verify_aux`] on every node of the `n × n` grid.
///
/// Check locations are `(r, s, k)` with `k` the index of the function in
/// [`AuxKind::ALL`].
pub fn run_aux(ctx: &QContext, n: usize, h: f64) -> Result<AuxRun> {
    let q = ctx.q();
    let mut size = Check::new("aux_size").at_q(q);
    let mut hessian = Check::new("aux_hessian").at_q(q);
    let mut failures = Vec::new();
    for (r, s) in aux_grid(q, n) {
        let verdict = verify_aux(r, s, ctx, h)?;
        for e in &verdict.entries {
            let loc = [r, s, AuxKind::ALL.iter().position(|k| *k == e.kind).unwrap_or(0) as f64];
            size.record(e.size_margin, 0.0, &loc);
            match e.hessian_margin {
                Some(m) => {
                    hessian.record(m, AUX_HESSIAN_TOL, &loc);
                }
                None => hessian.skip(),
            }
        }
        if !verdict.ok() {
            failures.push(verdict);
        }
    }
    Ok(AuxRun { size, hessian, failures })
}

/// Grid of `(r, s)` pairs covering `{1 + δ ≤ rs ≤ Q − δ}`.
///
/// Parametrized by `p = rs` (uniform, `n` values) and `ρ = √(r/s)`
/// (log-uniform in `[0.1, 10]`, `n` values). For `Q = 1` only `p = 1` exists
/// and the grid is the single curve `rs = 1` with `n` values of `ρ`.
pub fn aux_grid(q: f64, n: usize) -> Vec<(f64, f64)> {
    let n = n.max(1);
    let ps: Vec<f64> = if q == 1.0 {
        vec![1.0]
    } else {
        let (lo, hi) = (1.0 + DOMAIN_MARGIN, q - DOMAIN_MARGIN);
        if lo >= hi || n == 1 {
            vec![0.5 * (1.0 + q)]
        } else {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        }
    };
    let rhos: Vec<f64> =
        if n == 1 { vec![1.0] } else { (0..n).map(|j| 10f64.powf(-1.0 + 2.0 * j as f64 / (n - 1) as f64)).collect() };
    ps.iter().flat_map(|&p| rhos.iter().filter_map(move |&rho| split_product(p.sqrt() * rho, p, q))).collect()
}

/// Smooth bump `exp(−1/(1 − |u|²))` on the unit ball.
fn bump(u_sq: f64) -> f64 {
    if u_sq >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u_sq)).exp()
    }
}

/// Checks that the absolute `eps`-ball around a radial point stays inside
/// the radial domain, using the worst corner of the enclosing box.
fn check_ball(p: &RadialPoint, q: f64, eps: f64) -> Result<()> {
    let z_lo = p.z - eps;
    let h_lo = p.h - eps;
    let r_lo = p.r - eps;
    let s_lo = p.s - eps;
    let ok = z_lo >= 0.0
        && h_lo >= 0.0
        && r_lo > 0.0
        && s_lo > 0.0
        && (p.zeta.abs() + eps).powi(2) <= z_lo * r_lo
        && (p.nu.abs() + eps).powi(2) <= h_lo * s_lo
        && r_lo * s_lo >= 1.0
        && (p.r + eps) * (p.s + eps) <= q;
    if ok {
        Ok(())
    } else {
        Err(Error::OutsideDomain(format!("the {eps}-ball around the point leaves the domain")))
    }
}

/// Monte Carlo value of the mollification `B̄_Q * ψ_ε` at a point.
///
/// Samples are uniform in the unit ball of `ℝ⁶` and self-normalized by the
/// bump weights. `eps = 0` returns `B̄_Q` itself.
pub fn mollify_eval(point: &BellmanPoint, ctx: &QContext, eps: f64, mc: usize, seed: u64) -> Result<f64> {
    point.check_in(ctx)?;
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    if mc == 0 {
        return Err(Error::InvalidParameter("mc must be >= 1".into()));
    }
    let q = ctx.q();
    let center = point.radial();
    if eps == 0.0 {
        return profile_bq(&center, q);
    }
    check_ball(&center, q, eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    mollify_with(&center, q, eps, &mollifier_samples(mc, &mut rng))
}

/// Unit-ball samples and their bump weights; reusing one set gives common
/// random numbers across evaluations.
fn mollifier_samples(mc: usize, rng: &mut ChaCha8Rng) -> Vec<([f64; 6], f64)> {
    (0..mc)
        .map(|_| {
            let mut u = [0.0; 6];
            u.iter_mut().for_each(|c| *c = rng.sample(StandardNormal));
            let norm = u.iter().map(|c| c * c).sum::<f64>().sqrt();
            let radius = rng.random::<f64>().powf(1.0 / 6.0);
            u.iter_mut().for_each(|c| *c *= radius / norm);
            (u, bump(radius * radius))
        })
        .collect()
}

fn mollify_with(center: &RadialPoint, q: f64, eps: f64, samples: &[([f64; 6], f64)]) -> Result<f64> {
    let base = center.to_array();
    let mut num = 0.0;
    let mut den = 0.0;
    for (u, w) in samples {
        let mut x = base;
        for (xi, ui) in x.iter_mut().zip(u) {
            *xi += eps * ui;
        }
        num += w * profile_bq(&RadialPoint::from_array(x), q)?;
        den += w;
    }
    if den > 0.0 {
        Ok(num / den)
    } else {
        Err(Error::Degenerate("all mollifier weights vanished".into()))
    }
}

/// Smallest `dXᵀ(−d²B_ε)dX / (|dζ||dη|)` of the mollified function over
/// random directions, with common random numbers across the stencil.
fn mollified_deriv_ratio(
    point: &BellmanPoint,
    q: f64,
    cfg: &SuiteConfig,
    samples: &[([f64; 6], f64)],
    rng: &mut ChaCha8Rng,
) -> Option<f64> {
    let center = point.radial();
    let fd = fd_hessian_with(&center.to_array(), cfg.fd_step, 2, |x| {
        let p = RadialPoint::from_array(x.try_into().ok()?);
        mollify_with(&p, q, cfg.mollify_eps, samples).ok()
    })
    .ok()?;
    let neg = -fd.matrix;
    (0..cfg.directions_per_point)
        .map(|_| Direction::random(6, rng))
        .filter(|d| d.d_zeta().abs() * d.d_eta_norm() > 1e-12)
        .map(|d| d.quadratic_form(&neg) / (d.d_zeta().abs() * d.d_eta_norm()))
        .reduce(f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QSummary {
    pub q: f64,
    pub points: usize,
    pub excluded_near_pi: usize,
    /// Empirical `min dXᵀ(−d²B)dX / (|dζ||dη|)`, to compare with `4/Q`.
    pub min_deriv_ratio: Option<f64>,
    pub max_weighted_over_zh: f64,
    pub max_unweighted_over_zh: f64,
    pub min_mollified_deriv_ratio: Option<f64>,
}

fn fold_min(acc: Option<f64>, v: Option<f64>) -> Option<f64> {
    match (acc, v) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Runs every pointwise, auxiliary and mollified check for each `Q`.
pub fn run_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let echo = serde_json::to_value(cfg).map_err(|e| Error::NonFinite(e.to_string()))?;
    let mut report = VerificationReport::new(echo);
    let mut summaries = Vec::new();
    for (qi, &q) in cfg.q_list.iter().enumerate() {
        let ctx = QContext::new(q, cfg.eta_dim)?;
        let points = sample_domain(&ctx, cfg.samples_per_q, derive_seed(cfg.seed, 1, qi as u64))?;
        let mut size = Check::new("size").at_q(q);
        let mut sign = Check::new("sign").at_q(q);
        let mut deriv = Check::new("deriv").at_q(q);
        let mut six = Check::informational("unweighted_le_6").at_q(q);
        let mut summary = QSummary {
            q,
            points: points.len(),
            excluded_near_pi: 0,
            min_deriv_ratio: None,
            max_weighted_over_zh: 0.0,
            max_unweighted_over_zh: 0.0,
            min_mollified_deriv_ratio: None,
        };
        for point in &points {
            let v = verify_point(point, &ctx, cfg)?;
            let loc = point.coordinates();
            let zh = point.z + point.h;
            size.record(v.size_margin, SIZE_REL_TOL * (SIZE_CONSTANT * zh).max(v.value.abs()), &loc);
            match v.sign_margin {
                Some(m) => {
                    sign.record(m, SIGN_TOL * (1.0 + v.value.abs()), &loc);
                }
                None => sign.skip(),
            }
            match v.hessian_margin {
                Some(m) => {
                    deriv.record(m, HESSIAN_TOL * (1.0 + v.value.abs()), &loc);
                }
                None => deriv.skip(),
            }
            let unweighted = eval_components(point, &ctx)?.unweighted();
            six.record(unweighted.min(UNWEIGHTED_BOUND * zh - unweighted), 0.0, &loc);
            summary.excluded_near_pi += usize::from(v.excluded_near_pi);
            summary.min_deriv_ratio = fold_min(summary.min_deriv_ratio, v.deriv_ratio);
            if zh > 0.0 {
                summary.max_weighted_over_zh = summary.max_weighted_over_zh.max(v.value / zh);
                summary.max_unweighted_over_zh = summary.max_unweighted_over_zh.max(unweighted / zh);
            }
            let keep = match cfg.record_verdicts {
                VerdictRecording::All => true,
                VerdictRecording::FailuresOnly => !v.ok(),
                VerdictRecording::None => false,
            };
            if keep {
                report.verdicts.push(v);
            }
        }

        let AuxRun { size: aux_size, hessian: aux_hessian, .. } = run_aux(&ctx, cfg.aux_grid, cfg.fd_step)?;

        let mut mollified = Check::new("mollified_size").at_q(q);
        if cfg.mollify_eps > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 2, qi as u64));
            let samples = mollifier_samples(cfg.mc_samples, &mut rng);
            for point in points.iter().take(cfg.mollify_points) {
                let center = point.radial();
                if check_ball(&center, q, cfg.mollify_eps).is_err() {
                    mollified.skip();
                    continue;
                }
                let value = mollify_with(&center, q, cfg.mollify_eps, &samples)?;
                let bound = SIZE_CONSTANT * (1.0 + cfg.mollify_eps) * (point.z + point.h);
                mollified.record(value.min(bound - value), SIZE_REL_TOL * bound, &point.coordinates());
                summary.min_mollified_deriv_ratio = fold_min(
                    summary.min_mollified_deriv_ratio,
                    mollified_deriv_ratio(point, q, cfg, &samples, &mut rng),
                );
            }
        }

        report.checks.extend([size, sign, deriv, aux_size, aux_hessian, mollified, six]);
        summaries.push(summary);
    }
    report.results = serde_json::to_value(&summaries).map_err(|e| Error::NonFinite(e.to_string()))?;
    Ok(report)
}
