//! Skew-symmetric matrix Lie algebras with `<A, B> = -tr(AB)/2`, Lie-valued
//! 2-forms and the sharp bracket constants.

mod algebra;
mod element;
mod gamma;
mod twoform;

pub use algebra::{AlgebraKind, AlgebraSpec};
pub use element::{
    bracket, ip_endo, pauli_pair, quaternion_i, quaternion_j, quaternion_k, quaternion_units,
    LieElement,
};
pub use gamma::{
    gamma0_estimate, gamma0_ratio, gamma1_estimate, sd_form_from_coords, Certificate,
    Gamma0Estimate, Gamma1Estimate, GammaEstimate, GammaSettings, SdCubic,
};
pub use twoform::{bracket_bound_check, comm2form, cubic_ratio, LieValuedTwoForm};

/// `sqrt(2)`: gamma0 for su(2) and so(4); the universal upper bound.
pub const GAMMA0_SU2: f64 = std::f64::consts::SQRT_2;
/// gamma0 for so(3).
pub const GAMMA0_SO3: f64 = 1.0;
/// `4/sqrt(6)`: gamma1 for su(2) and the universal upper bound.
pub const GAMMA1_SU2: f64 = 1.632_993_161_855_452;
/// `2/sqrt(3)`: gamma1 for so(3).
pub const GAMMA1_SO3: f64 = 1.154_700_538_379_251_5;

#[cfg(test)]
mod tests {
    #[test]
    fn constants() {
        assert!((super::GAMMA1_SU2 - 4.0 / 6f64.sqrt()).abs() < 1e-15);
        assert!((super::GAMMA1_SO3 - 2.0 / 3f64.sqrt()).abs() < 1e-15);
    }
}
