//! Closed-form evaluation of the six-variable Bellman function `B_Q`.
//!
//! A point of the domain `D_Q` is `(Z, H, ζ, η, r, s)` with `ζ² ≤ Zr`,
//! `⟨η,η⟩ ≤ Hs` and `1 ≤ rs ≤ Q`. The function is the weighted sum
//!
//! ```text
//! B_Q = C1·B1 + C2·B2 + C3·B3 + C4·(B41 + B42 + B43)
//! ```
//!
//! of six components built from the auxiliary functions `M, N, K, M̃, Ñ`
//! of `(r, s)`. Everything here depends on `η` only through `|η|`, so the
//! internal evaluation works on the radial profile [`RadialPoint`].

use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::fmt;

use crate::error::{Error, Result};

pub const C1: f64 = 1.0;
pub const C2: f64 = SQRT_2 / 3.0;
pub const C3: f64 = SQRT_2 / 3.0;
pub const C4: f64 = 288.0 / 13.0;

/// Size constant: `0 ≤ B_Q ≤ 80 (Z + H)`.
pub const SIZE_CONSTANT: f64 = 80.0;

/// Bound obtained by summing the weights, each component being `≤ Z + H`.
pub fn sharp_size_constant() -> f64 {
    C1 + C2 + C3 + 3.0 * C4
}

/// The characteristic bound `Q ≥ 1` together with the dimension of the `η` slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QContext {
    q: f64,
    eta_dim: usize,
}

impl QContext {
    pub fn new(q: f64, eta_dim: usize) -> Result<Self> {
        if !q.is_finite() || q < 1.0 {
            return Err(Error::InvalidParameter(format!("Q must be finite and >= 1, got {q}")));
        }
        if eta_dim == 0 {
            return Err(Error::InvalidParameter("eta_dim must be >= 1".into()));
        }
        Ok(Self { q, eta_dim })
    }

    /// Context with a scalar `η`.
    pub fn scalar(q: f64) -> Result<Self> {
        Self::new(q, 1)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn eta_dim(&self) -> usize {
        self.eta_dim
    }

    /// Number of coordinates of a point: `Z, H, ζ, η…, r, s`.
    pub fn dim(&self) -> usize {
        5 + self.eta_dim
    }
}

/// A point `(Z, H, ζ, η, r, s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellmanPoint {
    pub z: f64,
    pub h: f64,
    pub zeta: f64,
    pub eta: Vec<f64>,
    pub r: f64,
    pub s: f64,
}

impl BellmanPoint {
    pub fn new(z: f64, h: f64, zeta: f64, eta: Vec<f64>, r: f64, s: f64) -> Self {
        Self { z, h, zeta, eta, r, s }
    }

    pub fn eta_sq(&self) -> f64 {
        self.eta.iter().map(|e| e * e).sum()
    }

    /// `ν = |η|`.
    pub fn nu(&self) -> f64 {
        self.eta_sq().sqrt()
    }

    pub fn radial(&self) -> RadialPoint {
        RadialPoint { z: self.z, h: self.h, zeta: self.zeta.abs(), nu: self.nu(), r: self.r, s: self.s }
    }

    /// Flat coordinates `[Z, H, ζ, η_1.., η_N, r, s]`.
    pub fn coordinates(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(5 + self.eta.len());
        x.extend_from_slice(&[self.z, self.h, self.zeta]);
        x.extend_from_slice(&self.eta);
        x.extend_from_slice(&[self.r, self.s]);
        x
    }

    pub fn from_coordinates(x: &[f64]) -> Self {
        assert!(x.len() >= 6, "a point has at least six coordinates");
        let n = x.len();
        Self { z: x[0], h: x[1], zeta: x[2], eta: x[3..n - 2].to_vec(), r: x[n - 2], s: x[n - 1] }
    }

    /// Exact membership test for `D_Q`.
    pub fn check_in(&self, ctx: &QContext) -> Result<()> {
        let all = [self.z, self.h, self.zeta, self.r, self.s];
        if all.iter().chain(self.eta.iter()).any(|v| !v.is_finite()) {
            return Err(Error::OutsideDomain("non-finite coordinate".into()));
        }
        if self.eta.len() != ctx.eta_dim() {
            return Err(Error::OutsideDomain(format!(
                "eta has length {}, context expects {}",
                self.eta.len(),
                ctx.eta_dim()
            )));
        }
        if self.z < 0.0 || self.h < 0.0 {
            return Err(Error::OutsideDomain(format!("Z = {}, H = {} must be >= 0", self.z, self.h)));
        }
        if self.r <= 0.0 || self.s <= 0.0 {
            return Err(Error::OutsideDomain(format!("r = {}, s = {} must be > 0", self.r, self.s)));
        }
        if self.zeta * self.zeta > self.z * self.r {
            return Err(Error::OutsideDomain("zeta^2 > Z r".into()));
        }
        if self.eta_sq() > self.h * self.s {
            return Err(Error::OutsideDomain("<eta, eta> > H s".into()));
        }
        check_rs(self.r, self.s, ctx.q())
    }

    pub fn is_in(&self, ctx: &QContext) -> bool {
        self.check_in(ctx).is_ok()
    }
}

fn check_rs(r: f64, s: f64, q: f64) -> Result<()> {
    let rs = r * s;
    if !(1.0..=q).contains(&rs) {
        return Err(Error::OutsideDomain(format!("rs = {rs} outside [1, {q}]")));
    }
    Ok(())
}

/// Radial profile coordinates `(Z, H, |ζ|, |η|, r, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialPoint {
    pub z: f64,
    pub h: f64,
    pub zeta: f64,
    pub nu: f64,
    pub r: f64,
    pub s: f64,
}

impl RadialPoint {
    pub fn to_array(self) -> [f64; 6] {
        [self.z, self.h, self.zeta, self.nu, self.r, self.s]
    }

    pub fn from_array(x: [f64; 6]) -> Self {
        Self { z: x[0], h: x[1], zeta: x[2], nu: x[3], r: x[4], s: x[5] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AuxKind {
    M,
    N,
    K,
    MTilde,
    NTilde,
}

impl AuxKind {
    pub const ALL: [AuxKind; 5] = [AuxKind::M, AuxKind::N, AuxKind::K, AuxKind::MTilde, AuxKind::NTilde];

    pub fn name(self) -> &'static str {
        match self {
            AuxKind::M => "M",
            AuxKind::N => "N",
            AuxKind::K => "K",
            AuxKind::MTilde => "Mtilde",
            AuxKind::NTilde => "Ntilde",
        }
    }
}

impl fmt::Display for AuxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Values of the five auxiliary functions at one `(r, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxValues {
    pub m: f64,
    pub n: f64,
    pub k: f64,
    pub m_tilde: f64,
    pub n_tilde: f64,
}

impl AuxValues {
    /// Unchecked evaluation; any `r, s > 0` is accepted.
    ///
    /// `M` and `N` are evaluated in the factored form
    /// `M = s (rs − 1)(4Q²/(rs) − 1)`, which is algebraically identical to
    /// `−4Q²/r − rs² + (4Q²+1)s` but does not cancel catastrophically at `rs = 1`.
    pub fn at(r: f64, s: f64, q: f64) -> Self {
        let p = r * s;
        let q2 = q * q;
        let common = (p - 1.0) * (4.0 * q2 / p - 1.0);
        Self {
            m: s * common,
            n: r * common,
            k: q.sqrt() * p.sqrt() - p / 4.0,
            m_tilde: -4.0 * q / s - r * r * s / (4.0 * q) + (4.0 * q + 1.0) * r,
            n_tilde: -4.0 * q / r - s * s * r / (4.0 * q) + (4.0 * q + 1.0) * s,
        }
    }

    pub fn get(&self, kind: AuxKind) -> f64 {
        match kind {
            AuxKind::M => self.m,
            AuxKind::N => self.n,
            AuxKind::K => self.k,
            AuxKind::MTilde => self.m_tilde,
            AuxKind::NTilde => self.n_tilde,
        }
    }
}

/// Evaluates one auxiliary function on `{1 ≤ rs ≤ Q}`.
pub fn eval_aux(kind: AuxKind, r: f64, s: f64, ctx: &QContext) -> Result<f64> {
    if !(r > 0.0 && s > 0.0) {
        return Err(Error::OutsideDomain(format!("r = {r}, s = {s} must be > 0")));
    }
    check_rs(r, s, ctx.q())?;
    Ok(AuxValues::at(r, s, ctx.q()).get(kind))
}

/// Upper bound of the size estimate for each auxiliary function.
pub fn aux_size_bound(kind: AuxKind, r: f64, s: f64, q: f64) -> f64 {
    match kind {
        AuxKind::M => 5.0 * q * q * s,
        AuxKind::N => 5.0 * q * q * r,
        AuxKind::K => q,
        AuxKind::MTilde => 5.0 * q * r,
        AuxKind::NTilde => 5.0 * q * s,
    }
}

/// Right-hand side of the lower Hessian bound `−d²F ≥ rhs(dr, ds)`.
pub fn aux_hessian_rhs(kind: AuxKind, r: f64, s: f64, dr: f64, ds: f64) -> f64 {
    match kind {
        AuxKind::M => r * ds * ds,
        AuxKind::N => s * dr * dr,
        AuxKind::K => 0.25 * (dr * ds).abs(),
        AuxKind::MTilde => (dr * ds).abs() / s,
        AuxKind::NTilde => (dr * ds).abs() / r,
    }
}

/// Maximizer `a_m` of `β(a) = ζ²/(r + aK/Q) + ν²/(s + a⁻¹K/Q)` over `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CriticalA {
    Zero,
    Finite(f64),
    Infinite,
}

fn critical_a_radial(zeta: f64, nu: f64, r: f64, s: f64, k: f64, q: f64) -> Result<CriticalA> {
    let num = q * r * nu - k * zeta;
    let den = q * s * zeta - k * nu;
    match (num > 0.0, den > 0.0) {
        (true, true) => Ok(CriticalA::Finite(num / den)),
        (false, true) => Ok(CriticalA::Zero),
        (true, false) => Ok(CriticalA::Infinite),
        (false, false) => {
            Err(Error::Degenerate(format!("numerator {num} and denominator {den} of a_m are both non-positive")))
        }
    }
}

/// Critical parameter of `B43` at `point`; `ζ` enters through `|ζ|`.
pub fn critical_a(point: &BellmanPoint, ctx: &QContext) -> Result<CriticalA> {
    point.check_in(ctx)?;
    let p = point.radial();
    let k = AuxValues::at(p.r, p.s, ctx.q()).k;
    critical_a_radial(p.zeta, p.nu, p.r, p.s, k, ctx.q())
}

/// Critical parameter at a radial point, unchecked apart from `r, s > 0`.
///
/// Its variant identifies the smooth branch of `B43`; the branches meet on `Π`.
pub fn critical_a_profile(p: &RadialPoint, q: f64) -> Result<CriticalA> {
    positive("r", p.r)?;
    positive("s", p.s)?;
    let k = AuxValues::at(p.r, p.s, q).k;
    critical_a_radial(p.zeta.abs(), p.nu.abs(), p.r, p.s, k, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    B1,
    B2,
    B3,
    B41,
    B42,
    B43,
}

impl Component {
    pub const ALL: [Component; 6] =
        [Component::B1, Component::B2, Component::B3, Component::B41, Component::B42, Component::B43];

    pub fn weight(self) -> f64 {
        match self {
            Component::B1 => C1,
            Component::B2 => C2,
            Component::B3 => C3,
            Component::B41 | Component::B42 | Component::B43 => C4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::B1 => "B1",
            Component::B2 => "B2",
            Component::B3 => "B3",
            Component::B41 => "B41",
            Component::B42 => "B42",
            Component::B43 => "B43",
        }
    }
}

/// All six component values at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b41: f64,
    pub b42: f64,
    pub b43: f64,
}

impl Components {
    pub fn get(&self, c: Component) -> f64 {
        match c {
            Component::B1 => self.b1,
            Component::B2 => self.b2,
            Component::B3 => self.b3,
            Component::B41 => self.b41,
            Component::B42 => self.b42,
            Component::B43 => self.b43,
        }
    }

    /// `C1·B1 + C2·B2 + C3·B3 + C4·(B41 + B42 + B43)`, the normative `B_Q`.
    pub fn weighted(&self) -> f64 {
        C1 * self.b1 + C2 * self.b2 + C3 * self.b3 + C4 * (self.b41 + self.b42 + self.b43)
    }

    /// `B1 + B2 + B3 + B4`, kept for diagnostics.
    pub fn unweighted(&self) -> f64 {
        self.b1 + self.b2 + self.b3 + self.b41 + self.b42 + self.b43
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositiveDenominator { name, value })
    }
}

/// Subtracted parts `Z + H − B_i` of the six components at a radial point.
///
/// Every component is `Z + H` minus a term depending on `(|ζ|, |η|, r, s)`
/// only, so second differences of `B̄_Q` are second differences of the
/// weighted deficit with the opposite sign. No domain check beyond
/// `r, s > 0` and positivity of every denominator.
pub fn profile_deficits(p: &RadialPoint, q: f64) -> Result<Components> {
    let RadialPoint { r, s, .. } = *p;
    positive("r", r)?;
    positive("s", s)?;
    let zeta = p.zeta.abs();
    let nu = p.nu.abs();
    let zeta2 = zeta * zeta;
    let nu2 = nu * nu;
    let aux = AuxValues::at(r, s, q);
    let q2 = q * q;

    let zeta_term = zeta2 / r;
    let eta_term = nu2 / s;

    let b1 = zeta_term + eta_term;
    let b2 = zeta_term + nu2 / positive("s + M/Q^2", s + aux.m / q2)?;
    let b3 = zeta2 / positive("r + N/Q^2", r + aux.n / q2)? + eta_term;
    let b41 = zeta2 / positive("r + Mtilde/Q", r + aux.m_tilde / q)? + eta_term;
    let b42 = zeta_term + nu2 / positive("s + Ntilde/Q", s + aux.n_tilde / q)?;

    let k_over_q = aux.k / q;
    let b43 = match critical_a_radial(zeta, nu, r, s, aux.k, q) {
        Ok(CriticalA::Finite(a)) => {
            zeta2 / positive("r + aK/Q", r + a * k_over_q)? + nu2 / positive("s + K/(aQ)", s + k_over_q / a)?
        }
        Ok(CriticalA::Zero) => zeta_term,
        Ok(CriticalA::Infinite) => eta_term,
        // Both vanish only at ζ = ν = 0, where β(a) ≡ 0 for every a.
        Err(_) if zeta == 0.0 && nu == 0.0 => 0.0,
        Err(e) => return Err(e),
    };

    Ok(Components { b1, b2, b3, b41, b42, b43 })
}

/// Components of the radial profile `B̄`, unchecked as [`profile_deficits`]:
/// finite-difference stencils and mollification evaluate slightly outside `D_Q`.
pub fn profile_components(p: &RadialPoint, q: f64) -> Result<Components> {
    let d = profile_deficits(p, q)?;
    let zh = p.z + p.h;
    Ok(Components { b1: zh - d.b1, b2: zh - d.b2, b3: zh - d.b3, b41: zh - d.b41, b42: zh - d.b42, b43: zh - d.b43 })
}

/// Weighted `B̄_Q` at a radial point, unchecked (see [`profile_components`]).
pub fn profile_bq(p: &RadialPoint, q: f64) -> Result<f64> {
    Ok(profile_components(p, q)?.weighted())
}

pub fn eval_components(point: &BellmanPoint, ctx: &QContext) -> Result<Components> {
    point.check_in(ctx)?;
    profile_components(&point.radial(), ctx.q())
}

pub fn eval_component(id: Component, point: &BellmanPoint, ctx: &QContext) -> Result<f64> {
    Ok(eval_components(point, ctx)?.get(id))
}

/// The Bellman function `B_Q` at a point of `D_Q`.
pub fn eval_bq(point: &BellmanPoint, ctx: &QContext) -> Result<f64> {
    Ok(eval_components(point, ctx)?.weighted())
}

/// Unweighted sum `B1 + B2 + B3 + B41 + B42 + B43`.
pub fn eval_unweighted(point: &BellmanPoint, ctx: &QContext) -> Result<f64> {
    Ok(eval_components(point, ctx)?.unweighted())
}

/// Relative distance to the singular set
/// `Π = {K/Q = ζs/|η|} ∪ {K/Q = |η|r/ζ}`.
///
/// Returns `+∞` when `ζ = 0` or `η = 0`.
pub fn pi_distance(point: &BellmanPoint, ctx: &QContext) -> f64 {
    pi_distance_radial(&point.radial(), ctx.q())
}

pub fn pi_distance_radial(p: &RadialPoint, q: f64) -> f64 {
    let zeta = p.zeta.abs();
    let nu = p.nu.abs();
    if zeta == 0.0 || nu == 0.0 {
        return f64::INFINITY;
    }
    let kq = AuxValues::at(p.r, p.s, q).k / q;
    let first = (kq - zeta * p.s / nu).abs() / kq;
    let second = (kq - nu * p.r / zeta).abs() / kq;
    first.min(second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(z: f64, h: f64, zeta: f64, eta: f64, r: f64, s: f64) -> BellmanPoint {
        BellmanPoint::new(z, h, zeta, vec![eta], r, s)
    }

    #[test]
    fn context_rejects_small_q() {
        assert!(QContext::scalar(0.5).is_err());
        assert!(QContext::scalar(f64::NAN).is_err());
        assert!(QContext::new(2.0, 0).is_err());
        assert!(QContext::scalar(1.0).is_ok());
    }

    #[test]
    fn aux_examples() {
        let q1 = QContext::scalar(1.0).unwrap();
        let q2 = QContext::scalar(2.0).unwrap();
        assert_eq!(eval_aux(AuxKind::M, 1.0, 1.0, &q1).unwrap(), 0.0);
        assert_relative_eq!(eval_aux(AuxKind::K, 1.0, 2.0, &q2).unwrap(), 1.5, epsilon = 1e-14);
        assert_relative_eq!(eval_aux(AuxKind::MTilde, 1.0, 2.0, &q2).unwrap(), 4.75, epsilon = 1e-14);
        assert_relative_eq!(eval_aux(AuxKind::N, 1.0, 2.0, &q2).unwrap(), 7.0, epsilon = 1e-14);
        assert_relative_eq!(eval_aux(AuxKind::M, 1.0, 2.0, &q2).unwrap(), 14.0, epsilon = 1e-14);
    }

    #[test]
    fn factored_m_matches_expanded_form() {
        for &(r, s, q) in &[(0.3, 5.0, 2.0), (2.0, 1.5, 4.0), (10.0, 0.5, 100.0)] {
            let expanded = -4.0 * q * q / r - r * s * s + (4.0 * q * q + 1.0) * s;
            let expanded_n = -4.0 * q * q / s - s * r * r + (4.0 * q * q + 1.0) * r;
            let a = AuxValues::at(r, s, q);
            assert_relative_eq!(a.m, expanded, max_relative = 1e-12);
            assert_relative_eq!(a.n, expanded_n, max_relative = 1e-12);
        }
    }

    #[test]
    fn aux_rejects_rs_outside_band() {
        let ctx = QContext::scalar(2.0).unwrap();
        assert!(eval_aux(AuxKind::M, 1.0, 0.5, &ctx).is_err());
        assert!(eval_aux(AuxKind::M, 2.0, 1.5, &ctx).is_err());
        assert!(eval_aux(AuxKind::M, -1.0, -1.5, &ctx).is_err());
    }

    #[test]
    fn critical_a_examples() {
        let ctx = QContext::scalar(2.0).unwrap();
        match critical_a(&pt(1.0, 1.0, 1.0, 1.0, 1.0, 1.0), &ctx).unwrap() {
            CriticalA::Finite(a) => assert_relative_eq!(a, 1.0, epsilon = 1e-15),
            other => panic!("expected finite, got {other:?}"),
        }
        assert_eq!(critical_a(&pt(1.0, 1.0, 1.0, 0.0, 1.0, 1.0), &ctx).unwrap(), CriticalA::Zero);
        assert_eq!(critical_a(&pt(1.0, 1.0, 0.0, 1.0, 1.0, 1.0), &ctx).unwrap(), CriticalA::Infinite);
        assert_eq!(critical_a(&pt(1.0, 1.0, 1e-12, 1.0, 1.0, 1.0), &ctx).unwrap(), CriticalA::Infinite);
        assert!(matches!(critical_a(&pt(1.0, 1.0, 0.0, 0.0, 1.0, 1.0), &ctx), Err(Error::Degenerate(_))));
    }

    #[test]
    fn critical_a_uses_abs_zeta() {
        let ctx = QContext::scalar(3.0).unwrap();
        let a = critical_a(&pt(2.0, 1.0, 0.7, 0.5, 1.2, 1.1), &ctx).unwrap();
        let b = critical_a(&pt(2.0, 1.0, -0.7, -0.5, 1.2, 1.1), &ctx).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn component_examples() {
        let ctx2 = QContext::scalar(2.0).unwrap();
        let ctx1 = QContext::scalar(1.0).unwrap();
        let p = pt(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(eval_component(Component::B1, &p, &ctx2).unwrap(), 0.0);
        let k = SQRT_2 - 0.25;
        let expected = 2.0 - 2.0 / (1.0 + k / 2.0);
        assert_relative_eq!(eval_component(Component::B43, &p, &ctx2).unwrap(), expected, epsilon = 1e-14);
        assert_relative_eq!(expected, 0.735862, epsilon = 1e-6);
        let zero = pt(1.0, 1.0, 0.0, 0.0, 1.0, 1.0);
        assert_eq!(eval_component(Component::B2, &zero, &ctx1).unwrap(), 2.0);
    }

    #[test]
    fn bq_examples() {
        let ctx1 = QContext::scalar(1.0).unwrap();
        let v = eval_bq(&pt(1.0, 1.0, 0.0, 0.0, 1.0, 1.0), &ctx1).unwrap();
        let oracle = 2.0 + (SQRT_2 / 3.0) * 4.0 + (288.0 / 13.0) * 6.0;
        assert_relative_eq!(v, oracle, epsilon = 1e-12);
        assert_relative_eq!(v, 136.808695, epsilon = 1e-6);

        for q in [1.0, 2.0, 7.5] {
            let ctx = QContext::scalar(q).unwrap();
            assert_eq!(eval_bq(&pt(0.0, 0.0, 0.0, 0.0, 1.0, 1.0), &ctx).unwrap(), 0.0);
        }

        let ctx2 = QContext::scalar(2.0).unwrap();
        let v = eval_bq(&pt(1.0, 1.0, 1.0, 1.0, 1.0, 1.0), &ctx2).unwrap();
        assert!((0.0..=160.0).contains(&v));
    }

    #[test]
    fn eval_rejects_points_outside_domain() {
        let ctx = QContext::scalar(2.0).unwrap();
        assert!(eval_bq(&pt(1.0, 1.0, 2.0, 0.0, 1.0, 1.0), &ctx).is_err());
        assert!(eval_bq(&pt(1.0, 1.0, 0.0, 2.0, 1.0, 1.0), &ctx).is_err());
        assert!(eval_bq(&pt(1.0, 1.0, 0.0, 0.0, 1.0, 3.0), &ctx).is_err());
        assert!(eval_bq(&pt(-1.0, 1.0, 0.0, 0.0, 1.0, 1.0), &ctx).is_err());
        let wrong_dim = BellmanPoint::new(1.0, 1.0, 0.0, vec![0.0, 0.0], 1.0, 1.0);
        assert!(eval_bq(&wrong_dim, &ctx).is_err());
    }

    #[test]
    fn pi_distance_examples() {
        let ctx1 = QContext::scalar(1.0).unwrap();
        assert_eq!(pi_distance(&pt(1.0, 1.0, 0.0, 0.0, 1.0, 1.0), &ctx1), f64::INFINITY);

        let ctx2 = QContext::scalar(2.0).unwrap();
        let d = pi_distance(&pt(1.0, 1.0, 1.0, 1.0, 1.0, 1.0), &ctx2);
        let kq = (SQRT_2 - 0.25) / 2.0;
        assert_relative_eq!(d, (kq - 1.0).abs() / kq, epsilon = 1e-14);
        assert!(d > 0.0);

        // K/Q = ζ s / |η|  solved for |η|.
        let (z, h, zeta, r, s) = (4.0, 4.0, 1.0, 1.0, 1.5);
        let kq = AuxValues::at(r, s, 2.0).k / 2.0;
        let on_pi = pt(z, h, zeta, zeta * s / kq, r, s);
        assert!(on_pi.is_in(&ctx2));
        assert!(pi_distance(&on_pi, &ctx2) < 1e-15);
    }

    #[test]
    fn coordinates_round_trip() {
        let p = BellmanPoint::new(1.0, 2.0, 0.5, vec![0.1, -0.2, 0.3], 1.5, 1.1);
        assert_eq!(BellmanPoint::from_coordinates(&p.coordinates()), p);
    }
}
