//! Physical constants and the effective velocity scales of the deformed
//! theory.
//!
//! With `hbar sqrt(beta) = l_p` for a body of mass `m` and the mass-independent
//! `gamma = sqrt(beta) m`, one gets `gamma = m l_p / hbar`. From `gamma`:
//!
//! * the deformed-Galilean scale `u = alpha / gamma` with `alpha = sqrt(3/8)`
//!   for the one-dimensional algebra and `alpha = 1/2` for the
//!   three-dimensional one;
//! * the effective light speed `1/c_eff^2 = 1/c^2 - 1/u^2`;
//! * the relative deviation `(c_eff - c)/c = (k/2) (c gamma)^2`, `k = 1/alpha^2`.
//!
//! Deviations are of order `1e-45`, far below `f64` resolution around 1, so
//! they are never obtained by subtracting `c` from `c_eff`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Pinned SI values (CODATA 2018).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// Speed of light, m/s (exact).
    pub c: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Newtonian constant of gravitation, m^3 kg^-1 s^-2.
    pub g: f64,
    /// Electron mass, kg.
    pub electron_mass: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    c: 299_792_458.0,
    hbar: 1.054_571_817e-34,
    g: 6.674_30e-11,
    electron_mass: 9.109_383_701_5e-31,
};

/// Planck length quoted by CODATA 2018, used to cross-check the derived value.
pub const CODATA_2018_PLANCK_LENGTH: f64 = 1.616_255e-35;

impl Default for PhysicalConstants {
    fn default() -> Self {
        CODATA_2018
    }
}

impl PhysicalConstants {
    /// `sqrt(hbar G / c^3)`.
    pub fn planck_length(&self) -> f64 {
        (self.hbar * self.g / self.c.powi(3)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    Natural,
    #[serde(rename = "SI")]
    Si,
}

impl UnitSystem {
    /// Speed of light in this system.
    pub fn light_speed(&self) -> f64 {
        match self {
            UnitSystem::Natural => 1.0,
            UnitSystem::Si => CODATA_2018.c,
        }
    }
}

impl FromStr for UnitSystem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "natural" => Ok(UnitSystem::Natural),
            "SI" | "si" => Ok(UnitSystem::Si),
            other => Err(format!(
                "unknown unit system `{other}` (expected natural or SI)"
            )),
        }
    }
}

impl fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitSystem::Natural => f.write_str("natural"),
            UnitSystem::Si => f.write_str("SI"),
        }
    }
}

/// Which deformed algebra fixes the multiplier `alpha` in `u = alpha / gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// `{X, P} = 1 + beta P^2`: `u^2 = 3 / (8 gamma^2)`.
    OneD,
    /// The translation-invariant 3D algebra: `u^2 = 1 / (4 gamma^2)`.
    ThreeD,
    /// Any other algebra, described only by its multiplier.
    General { alpha: f64 },
}

impl Geometry {
    pub fn alpha(&self) -> f64 {
        match self {
            Geometry::OneD => (3.0f64 / 8.0).sqrt(),
            Geometry::ThreeD => 0.5,
            Geometry::General { alpha } => *alpha,
        }
    }

    /// `k = 1/alpha^2` in `1/c_eff^2 = 1/c^2 - k gamma^2`.
    pub fn coefficient(&self) -> f64 {
        match self {
            Geometry::OneD => 8.0 / 3.0,
            Geometry::ThreeD => 4.0,
            Geometry::General { alpha } => 1.0 / (alpha * alpha),
        }
    }

    fn exact_coefficient(&self) -> Result<BigRational> {
        Ok(match self {
            Geometry::OneD => BigRational::new(BigInt::from(8), BigInt::from(3)),
            Geometry::ThreeD => BigRational::from_integer(BigInt::from(4)),
            Geometry::General { alpha } => {
                let a = exact(*alpha)?;
                if a.is_zero() {
                    return Err(Error::InvalidParameter("alpha must be non-zero".into()));
                }
                (a.clone() * a).recip()
            }
        })
    }

    fn validate(&self) -> Result<()> {
        if let Geometry::General { alpha } = self {
            if !alpha.is_finite() || *alpha <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "alpha must be finite and positive, got {alpha}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaEstimate {
    /// Inverse velocity, s/m.
    pub gamma: f64,
    /// Dimensionless `c * gamma`.
    pub c_gamma: f64,
}

/// `gamma = m l_p / hbar`, from `hbar sqrt(beta) = l_p` and `beta = gamma^2 / m^2`.
pub fn gamma_from_planck_length(mass: f64, consts: &PhysicalConstants) -> Result<GammaEstimate> {
    if !mass.is_finite() || mass <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "mass must be finite and positive, got {mass}"
        )));
    }
    let gamma = mass * consts.planck_length() / consts.hbar;
    Ok(GammaEstimate {
        gamma,
        c_gamma: consts.c * gamma,
    })
}

/// `u = alpha / gamma`.
pub fn effective_velocity_u(gamma: f64, geometry: Geometry) -> Result<f64> {
    geometry.validate()?;
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    Ok(geometry.alpha() / gamma)
}

/// Effective light speed from `1/c_eff^2 = 1/c^2 - k gamma^2`.
pub fn effective_light_speed(gamma: f64, geometry: Geometry, c: f64) -> Result<f64> {
    geometry.validate()?;
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma must be finite and non-negative, got {gamma}"
        )));
    }
    let cg = c * gamma;
    let remaining = 1.0 - geometry.coefficient() * cg * cg;
    if !(remaining > 0.0) {
        return Err(Error::Domain(format!(
            "k (c gamma)^2 = {} >= 1: effective light speed would be imaginary",
            1.0 - remaining
        )));
    }
    Ok(c / remaining.sqrt())
}

/// First-order relative deviation `(c_eff - c)/c = (k/2)(c gamma)^2`.
pub fn light_speed_deviation(gamma: f64, geometry: Geometry, c: f64) -> f64 {
    let cg = c * gamma;
    0.5 * geometry.coefficient() * cg * cg
}

fn exact(value: f64) -> Result<BigRational> {
    BigRational::from_float(value)
        .ok_or_else(|| Error::NonFinite(format!("cannot represent {value} exactly")))
}

const FIXED_POINT_BITS: usize = 512;

/// `(c_eff - c)/c = 1/sqrt(1 - k (c gamma)^2) - 1` evaluated with exact
/// rationals and a 512-bit fixed-point square root. Validation path only.
pub fn exact_light_speed_deviation(c_gamma: f64, geometry: Geometry) -> Result<f64> {
    geometry.validate()?;
    let x = exact(c_gamma)?;
    let y = geometry.exact_coefficient()? * x.clone() * x;
    let remaining = BigRational::one() - y;
    if !remaining.is_positive() {
        return Err(Error::Domain("k (c gamma)^2 >= 1".into()));
    }
    // 1/(1-y) = den/num for remaining = num/den
    let scaled: BigInt = (remaining.denom() << (2 * FIXED_POINT_BITS)) / remaining.numer();
    let root = scaled.sqrt();
    let deviation = root - (BigInt::one() << FIXED_POINT_BITS);
    let mantissa = deviation
        .to_f64()
        .ok_or_else(|| Error::NonFinite("fixed-point deviation".into()))?;
    Ok(mantissa * 2f64.powi(-(FIXED_POINT_BITS as i32)))
}

/// Relative gap between the exact `c^2/c_eff^2 = 1 - k (c gamma)^2` and its
/// first-order form `1 - 2 d` with `d` from [`light_speed_deviation`],
/// computed exactly.
pub fn first_order_consistency_gap(c_gamma: f64, geometry: Geometry) -> Result<f64> {
    geometry.validate()?;
    let x = exact(c_gamma)?;
    let exact_ratio = BigRational::one() - geometry.exact_coefficient()? * x.clone() * x;
    let d = exact(light_speed_deviation(c_gamma, geometry, 1.0))?;
    let first_order = BigRational::one() - BigRational::from_integer(BigInt::from(2)) * d;
    let gap = ((exact_ratio.clone() - first_order) / exact_ratio).abs();
    gap.to_f64()
        .ok_or_else(|| Error::NonFinite("consistency gap".into()))
}

/// Scales derived from one value of `gamma` for one algebra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveScales {
    pub gamma: f64,
    pub c_gamma: f64,
    pub u: f64,
    pub c_eff: f64,
    pub deviation: f64,
}

impl EffectiveScales {
    pub fn compute(gamma: f64, geometry: Geometry, consts: &PhysicalConstants) -> Result<Self> {
        Ok(Self {
            gamma,
            c_gamma: consts.c * gamma,
            u: effective_velocity_u(gamma, geometry)?,
            c_eff: effective_light_speed(gamma, geometry, consts.c)?,
            deviation: light_speed_deviation(gamma, geometry, consts.c),
        })
    }
}

/// The JSON document emitted by `gup constants`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub gamma: f64,
    pub c_gamma: f64,
    pub u_over_c_1d: f64,
    pub u_over_c_3d: f64,
    pub c_eff_rel_deviation_1d: f64,
    pub c_eff_rel_deviation_3d: f64,
    pub assumptions: Vec<String>,
}

impl ConstantsReport {
    pub fn for_mass(mass: f64, consts: &PhysicalConstants) -> Result<Self> {
        let est = gamma_from_planck_length(mass, consts)?;
        let one = EffectiveScales::compute(est.gamma, Geometry::OneD, consts)?;
        let three = EffectiveScales::compute(est.gamma, Geometry::ThreeD, consts)?;
        Ok(Self {
            gamma: est.gamma,
            c_gamma: est.c_gamma,
            u_over_c_1d: one.u / consts.c,
            u_over_c_3d: three.u / consts.c,
            c_eff_rel_deviation_1d: one.deviation,
            c_eff_rel_deviation_3d: three.deviation,
            assumptions: vec![
                "CODATA 2018 SI values: c = 299792458 m/s, hbar = 1.054571817e-34 J s, \
                 G = 6.67430e-11 m^3 kg^-1 s^-2, m_e = 9.1093837015e-31 kg"
                    .into(),
                "l_p = sqrt(hbar G / c^3)".into(),
                format!("minimal length hbar sqrt(beta) = l_p for a body of mass {mass:e} kg"),
                "beta = gamma^2 / m^2 (gamma independent of mass)".into(),
                "1D algebra: u^2 = 3/(8 gamma^2), 1/c_eff^2 = 1/c^2 - (8/3) gamma^2".into(),
                "3D algebra: u^2 = 1/(4 gamma^2), 1/c_eff^2 = 1/c^2 - 4 gamma^2".into(),
                "deviations are first order in gamma^2: (c_eff - c)/c = (k/2) c^2 gamma^2".into(),
            ],
        })
    }
}
