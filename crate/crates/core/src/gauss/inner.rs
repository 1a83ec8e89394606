use super::hermite::HermiteExpansion;
use super::weight::{WeightSpec, MAX_QUADRATURE_SLOPE};
use crate::error::{Error, Result};
use crate::quadrature::GaussHermite;

/// `∫ u v ω dγ` by Gauss–Hermite quadrature of order `quad_order`.
pub fn weighted_inner<T: HermiteExpansion>(u: &T, v: &T, w: &WeightSpec, quad_order: usize) -> Result<f64> {
    let gh = GaussHermite::new(quad_order)?;
    weighted_inner_with(u, v, w, &gh)
}

pub fn weighted_inner_with<T: HermiteExpansion>(u: &T, v: &T, w: &WeightSpec, gh: &GaussHermite) -> Result<f64> {
    check_weight(w)?;
    let value = gh.integrate(|x| u.eval(x) * v.eval(x) * w.eval(x));
    if !value.is_finite() {
        return Err(Error::NonFinite(format!("weighted inner product against {w}; raise the quadrature order")));
    }
    Ok(value)
}

/// Weighted `L²(ω γ)` norm.
pub fn weighted_norm<T: HermiteExpansion>(u: &T, w: &WeightSpec, gh: &GaussHermite) -> Result<f64> {
    Ok(weighted_inner_with(u, u, w, gh)?.max(0.0).sqrt())
}

pub(crate) fn check_weight(w: &WeightSpec) -> Result<()> {
    w.validate()?;
    if w.slope().abs() > MAX_QUADRATURE_SLOPE {
        return Err(Error::InvalidParameter(format!(
            "weight {w} has slope beyond the quadrature limit {MAX_QUADRATURE_SLOPE}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::hermite::{HermiteFunction, OneForm};
    use approx::assert_relative_eq;

    #[test]
    fn orthonormality() {
        let one = WeightSpec::Constant(1.0);
        let h1 = HermiteFunction::basis(1);
        let h2 = HermiteFunction::basis(2);
        assert_relative_eq!(weighted_inner(&h1, &h1, &one, 40).unwrap(), 1.0, epsilon = 1e-13);
        assert!(weighted_inner(&h1, &h2, &one, 40).unwrap().abs() < 1e-13);
        let g = OneForm::basis(5);
        assert_relative_eq!(weighted_inner(&g, &g, &one, 40).unwrap(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn exponential_moment() {
        let h0 = HermiteFunction::basis(0);
        let v = weighted_inner(&h0, &h0, &WeightSpec::ExpLinear(1.0), 80).unwrap();
        assert_relative_eq!(v, 0.5f64.exp(), max_relative = 1e-13);
        assert_relative_eq!(v, 1.648721, epsilon = 1e-6);
    }

    #[test]
    fn shifted_gaussian_identity() {
        // ∫ ĥ_1² e^{ax} dγ = e^{a²/2} E[(Y + a)²] = e^{a²/2} (1 + a²).
        let h1 = HermiteFunction::basis(1);
        for a in [-2.0, 0.5, 1.5] {
            let v = weighted_inner(&h1, &h1, &WeightSpec::ExpLinear(a), 160).unwrap();
            assert_relative_eq!(v, (a * a / 2.0f64).exp() * (1.0 + a * a), max_relative = 1e-12);
        }
    }

    #[test]
    fn rejects_steep_weights_and_low_order() {
        let h0 = HermiteFunction::basis(0);
        assert!(weighted_inner(&h0, &h0, &WeightSpec::ExpLinear(2.5), 160).is_err());
        assert!(weighted_inner(&h0, &h0, &WeightSpec::Constant(1.0), 1).is_err());
    }
}
