//! Hermite expansions on the Gauss space `(ℝ, γ)`.
//!
//! Functions are stored as coordinates in the orthonormal basis
//! `ĥ_n = h_n / √(n!)`, where `h_n` are the probabilists' Hermite
//! polynomials. One-forms `b(x) dx` store the coordinates of `b` in the
//! same basis. In these coordinates `L ĥ_n = −n ĥ_n`, `d ĥ_n = √n ĥ_{n−1} dx`
//! and the weighted Hodge Laplacian acts on slot `m` by `−(m + 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilists' Hermite polynomial `h_n(x)` via `h_{n+1} = x h_n − n h_{n−1}`.
pub fn hermite_eval(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Orthonormal `ĥ_n(x) = h_n(x) / √(n!)`.
pub fn hermite_orthonormal(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = (x * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[n] = ĥ_n(x)` for `n < out.len()`.
pub fn orthonormal_basis(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for n in 1..out.len().saturating_sub(1) {
        let nf = n as f64;
        out[n + 1] = (x * out[n] - nf.sqrt() * out[n - 1]) / (nf + 1.0).sqrt();
    }
}

fn expansion_eval(coeffs: &[f64], x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut total = 0.0;
    for (k, &c) in coeffs.iter().enumerate() {
        total += c * cur;
        let kf = k as f64;
        let next = (x * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    total
}

/// `x ↦ Σ_n c_n √n ĥ_{n−1}(x)`, the derivative of `Σ c_n ĥ_n`.
fn expansion_derivative(coeffs: &[f64], x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut total = 0.0;
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        // cur holds ĥ_{k-1}
        total += c * (k as f64).sqrt() * cur;
        let jf = (k - 1) as f64;
        let next = (x * cur - jf.sqrt() * prev) / (jf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    total
}

fn check_finite(coeffs: &[f64]) -> Result<()> {
    if coeffs.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("Hermite coefficients must be finite".into()))
    }
}

/// Common surface of functions and one-forms in Hermite coordinates.
pub trait HermiteExpansion: Sized {
    /// Offset added to the slot index to obtain the eigenvalue of the
    /// (negative) generator: `0` on functions, `1` on one-forms.
    const EIGEN_SHIFT: f64;

    fn coeffs(&self) -> &[f64];
    fn from_coeffs_unchecked(coeffs: Vec<f64>) -> Self;

    fn eval(&self, x: f64) -> f64 {
        expansion_eval(self.coeffs(), x)
    }

    /// Spatial derivative of the coefficient function.
    fn derivative(&self, x: f64) -> f64 {
        expansion_derivative(self.coeffs(), x)
    }

    /// Unweighted `L²(γ)` norm (Parseval).
    fn norm(&self) -> f64 {
        self.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Eigenvalue of `−L` (functions) or `−Δ⃗` (one-forms) on slot `k`.
    fn eigenvalue(k: usize) -> f64 {
        k as f64 + Self::EIGEN_SHIFT
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HermiteFunction {
    coeffs: Vec<f64>,
}

impl HermiteFunction {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        check_finite(&coeffs)?;
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("a Hermite function needs at least one coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    /// The basis element `ĥ_n`.
    pub fn basis(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    /// Truncation order `N` (highest stored index).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    /// `df`, a one-form with slot `m` equal to `√(m+1) c_{m+1}`.
    pub fn exterior_derivative(&self) -> OneForm {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(n, &c)| (n as f64).sqrt() * c).collect::<Vec<_>>();
        OneForm::from_coeffs_unchecked(if coeffs.is_empty() { vec![0.0] } else { coeffs })
    }
}

impl HermiteExpansion for HermiteFunction {
    const EIGEN_SHIFT: f64 = 0.0;

    fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn from_coeffs_unchecked(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OneForm {
    coeffs: Vec<f64>,
}

impl OneForm {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        check_finite(&coeffs)?;
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("a one-form needs at least one coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    /// `ĥ_m dx`.
    pub fn basis(m: usize) -> Self {
        let mut coeffs = vec![0.0; m + 1];
        coeffs[m] = 1.0;
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }
}

impl HermiteExpansion for OneForm {
    const EIGEN_SHIFT: f64 = 1.0;

    fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn from_coeffs_unchecked(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }
}

/// Which spectral semigroup to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Semigroup {
    /// `e^{tL}` on functions, `e^{tΔ⃗}` on one-forms.
    Heat,
    /// `e^{−t(−L)^{1/2}}` on functions, `e^{−t(−Δ⃗)^{1/2}}` on one-forms.
    Poisson,
}

/// Diagonal action of a semigroup on Hermite coordinates.
///
/// On functions: heat `c_n ↦ e^{−nt} c_n`, Poisson `c_n ↦ e^{−t√n} c_n`.
/// On one-forms the eigenvalue is shifted by one, e.g. Poisson
/// `b_m ↦ e^{−t√(m+1)} b_m`.
pub fn semigroup_apply<T: HermiteExpansion>(input: &T, t: f64, kind: Semigroup) -> Result<T> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("semigroup time must be finite and >= 0, got {t}")));
    }
    let coeffs = input
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let lambda = T::eigenvalue(k);
            let rate = match kind {
                Semigroup::Heat => lambda,
                Semigroup::Poisson => lambda.sqrt(),
            };
            if t == 0.0 {
                c
            } else {
                c * (-t * rate).exp()
            }
        })
        .collect();
    Ok(T::from_coeffs_unchecked(coeffs))
}

/// `t`-derivative of the Poisson flow, `∂_t P_t u`.
pub fn poisson_time_derivative<T: HermiteExpansion>(input: &T, t: f64) -> Result<T> {
    let flowed = semigroup_apply(input, t, Semigroup::Poisson)?;
    let coeffs = flowed.coeffs().iter().enumerate().map(|(k, &c)| -T::eigenvalue(k).sqrt() * c).collect();
    Ok(T::from_coeffs_unchecked(coeffs))
}

/// Riesz transform `d ∘ (−L)^{−1/2}`: `ĥ_n ↦ ĥ_{n−1} dx`, constants to zero.
pub fn riesz_apply(f: &HermiteFunction) -> OneForm {
    let shifted: Vec<f64> = f.coeffs.iter().skip(1).copied().collect();
    OneForm::from_coeffs_unchecked(if shifted.is_empty() { vec![0.0] } else { shifted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_values() {
        assert_eq!(hermite_eval(2, 2.0), 3.0);
        assert_eq!(hermite_eval(0, 17.3), 1.0);
        assert_eq!(hermite_eval(5, 0.0), 0.0);
        assert_eq!(hermite_eval(3, 2.0), 2.0); // x^3 - 3x
        assert_relative_eq!(hermite_orthonormal(3, 2.0), 2.0 / 6f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn basis_matches_single_evaluations() {
        let mut buf = [0.0; 9];
        orthonormal_basis(0.7, &mut buf);
        for (n, v) in buf.iter().enumerate() {
            assert_relative_eq!(*v, hermite_orthonormal(n, 0.7), epsilon = 1e-14);
        }
    }

    #[test]
    fn derivative_identity() {
        let f = HermiteFunction::new(vec![0.3, -1.0, 0.5, 2.0]).unwrap();
        let h = 1e-6;
        for x in [-1.3, 0.0, 2.2] {
            let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            assert_relative_eq!(f.derivative(x), fd, epsilon = 1e-7);
            assert_relative_eq!(f.exterior_derivative().eval(x), fd, epsilon = 1e-7);
        }
    }

    #[test]
    fn semigroup_examples() {
        let h4 = HermiteFunction::basis(4);
        let p = semigroup_apply(&h4, 0.5, Semigroup::Poisson).unwrap();
        assert_relative_eq!(p.coeffs()[4], (-1.0f64).exp(), epsilon = 1e-15);
        let f = HermiteFunction::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(semigroup_apply(&f, 0.0, Semigroup::Heat).unwrap(), f);
        let g = OneForm::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(semigroup_apply(&g, 0.0, Semigroup::Poisson).unwrap(), g);
        let c = HermiteFunction::basis(0);
        assert_eq!(semigroup_apply(&c, 3.0, Semigroup::Heat).unwrap(), c);
        let pg = semigroup_apply(&OneForm::basis(3), 0.5, Semigroup::Poisson).unwrap();
        assert_relative_eq!(pg.coeffs()[3], (-1.0f64).exp(), epsilon = 1e-15);
        assert!(semigroup_apply(&f, -1.0, Semigroup::Heat).is_err());
    }

    #[test]
    fn riesz_examples() {
        assert_eq!(riesz_apply(&HermiteFunction::basis(1)), OneForm::basis(0));
        assert_eq!(riesz_apply(&HermiteFunction::basis(0)).norm(), 0.0);
        let f = HermiteFunction::new(vec![5.0, 1.0, -2.0, 0.5]).unwrap();
        let tail = HermiteFunction::new(vec![0.0, 1.0, -2.0, 0.5]).unwrap();
        assert_relative_eq!(riesz_apply(&f).norm(), tail.norm(), epsilon = 1e-15);
    }

    #[test]
    fn json_is_a_plain_array() {
        let f = HermiteFunction::new(vec![0.0, 1.5]).unwrap();
        assert_eq!(serde_json::to_string(&f).unwrap(), "[0.0,1.5]");
        let g: OneForm = serde_json::from_str("[1.0,2.0]").unwrap();
        assert_eq!(g.coeffs(), &[1.0, 2.0]);
    }
}
