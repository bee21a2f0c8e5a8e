//! Deformed Poisson structures and their canonical representations.
//!
//! The deformed variables `(X, P)` are never integrated directly. They are
//! expressed through canonical variables `(x, p)` with `{x_i, p_j} = delta_ij`:
//!
//! * one dimension: `X = x`, `P = tan(sqrt(beta) p) / sqrt(beta)`, which gives
//!   `{X, P} = 1 + beta P^2`;
//! * three dimensions: `X_i = x_i`, `P_i = p_i / sqrt(1 - beta p^2)`, which gives
//!   `{X_i, P_j} = sqrt(1 + beta P^2) (delta_ij + beta P_i P_j)`.
//!
//! [`numerical_bracket`] evaluates canonical brackets of arbitrary phase-space
//! functions by central differences so that both identities can be checked
//! numerically.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Deformation parameter `beta` (inverse momentum squared) for a body of
/// mass `mass`. The mass-independent constant is `gamma = sqrt(beta) * mass`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationParameters {
    beta: f64,
    mass: f64,
}

impl DeformationParameters {
    pub fn new(beta: f64, mass: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta must be finite and non-negative, got {beta}"
            )));
        }
        if !mass.is_finite() || mass <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mass must be finite and positive, got {mass}"
            )));
        }
        Ok(Self { beta, mass })
    }

    /// Builds the parameters from the mass-independent `gamma`, using
    /// `beta = gamma^2 / mass^2`.
    pub fn from_gamma(gamma: f64, mass: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and non-negative, got {gamma}"
            )));
        }
        if !mass.is_finite() || mass <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mass must be finite and positive, got {mass}"
            )));
        }
        let ratio = gamma / mass;
        Self::new(ratio * ratio, mass)
    }

    pub fn undeformed(mass: f64) -> Result<Self> {
        Self::new(0.0, mass)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn sqrt_beta(&self) -> f64 {
        self.beta.sqrt()
    }

    pub fn gamma(&self) -> f64 {
        self.beta.sqrt() * self.mass
    }

    pub fn is_undeformed(&self) -> bool {
        self.beta == 0.0
    }

    /// Upper bound on `|p|` for the principal branch of the 1D tan map.
    pub fn tan_branch_limit(&self) -> f64 {
        if self.is_undeformed() {
            f64::INFINITY
        } else {
            FRAC_PI_2 / self.sqrt_beta()
        }
    }

    /// Upper bound on `|p|` for the 3D representation, `beta p^2 < 1`.
    pub fn ball_limit(&self) -> f64 {
        if self.is_undeformed() {
            f64::INFINITY
        } else {
            1.0 / self.sqrt_beta()
        }
    }
}

/// A point of the canonical (non-deformed) phase space in `D` dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalState<const D: usize> {
    pub x: [f64; D],
    pub p: [f64; D],
}

pub type CanonicalState1D = CanonicalState<1>;
pub type CanonicalState3D = CanonicalState<3>;

impl<const D: usize> CanonicalState<D> {
    pub fn new(x: [f64; D], p: [f64; D]) -> Self {
        Self { x, p }
    }

    pub fn momentum_squared(&self) -> f64 {
        self.p.iter().map(|v| v * v).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.p.iter()).all(|v| v.is_finite())
    }
}

impl CanonicalState<1> {
    pub fn scalar(x: f64, p: f64) -> Self {
        Self { x: [x], p: [p] }
    }
}

/// `P = tan(sqrt(beta) p) / sqrt(beta)` on the principal branch.
pub fn momentum_map_1d(p: f64, params: &DeformationParameters) -> Result<f64> {
    if params.is_undeformed() {
        return Ok(p);
    }
    let s = params.sqrt_beta();
    if !(s * p.abs() < FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "sqrt(beta)|p| = {} is outside the principal tan branch (< pi/2)",
            s * p.abs()
        )));
    }
    Ok((s * p).tan() / s)
}

/// Inverse of [`momentum_map_1d`]: `p = atan(sqrt(beta) P) / sqrt(beta)`.
pub fn canonical_momentum_1d(deformed: f64, params: &DeformationParameters) -> f64 {
    if params.is_undeformed() {
        return deformed;
    }
    let s = params.sqrt_beta();
    (s * deformed).atan() / s
}

/// `P_i = p_i / sqrt(1 - beta p^2)`.
pub fn momentum_map_3d(p: [f64; 3], params: &DeformationParameters) -> Result<[f64; 3]> {
    if params.is_undeformed() {
        return Ok(p);
    }
    let p2: f64 = p.iter().map(|v| v * v).sum();
    let remaining = 1.0 - params.beta() * p2;
    if !(remaining > 0.0) {
        return Err(Error::Domain(format!(
            "beta|p|^2 = {} is outside the 3D representation domain (< 1)",
            params.beta() * p2
        )));
    }
    let factor = 1.0 / remaining.sqrt();
    Ok(p.map(|v| v * factor))
}

/// Inverse of [`momentum_map_3d`]: `p_i = P_i / sqrt(1 + beta P^2)`.
pub fn canonical_momentum_3d(deformed: [f64; 3], params: &DeformationParameters) -> [f64; 3] {
    let big2: f64 = deformed.iter().map(|v| v * v).sum();
    let factor = 1.0 / (1.0 + params.beta() * big2).sqrt();
    deformed.map(|v| v * factor)
}

/// `{X, P} = 1 + beta P^2`.
pub fn bracket_xp_1d(deformed_p: f64, params: &DeformationParameters) -> f64 {
    1.0 + params.beta() * deformed_p * deformed_p
}

/// `{X_i, P_j} = sqrt(1 + beta P^2) (delta_ij + beta P_i P_j)`, with `i` and
/// `j` counted from 1.
pub fn bracket_xp_3d(
    deformed_p: [f64; 3],
    i: usize,
    j: usize,
    params: &DeformationParameters,
) -> Result<f64> {
    for index in [i, j] {
        if !(1..=3).contains(&index) {
            return Err(Error::IndexOutOfRange(index));
        }
    }
    let beta = params.beta();
    let big2: f64 = deformed_p.iter().map(|v| v * v).sum();
    let delta = if i == j { 1.0 } else { 0.0 };
    Ok((1.0 + beta * big2).sqrt() * (delta + beta * deformed_p[i - 1] * deformed_p[j - 1]))
}

/// Central-difference stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// `(f(x+h) - f(x-h)) / 2h`, truncation `O(h^2)`.
    ThreePoint,
    /// `(-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h`, truncation `O(h^4)`.
    FivePoint,
}

/// Central-difference step policy: `h = scale * max(1, |coordinate|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdStep {
    pub scale: f64,
    pub stencil: Stencil,
}

impl Default for FdStep {
    /// Three-point stencil with `eps^(1/3)`, the usual truncation/round-off
    /// balance for first derivatives.
    fn default() -> Self {
        Self {
            scale: f64::EPSILON.cbrt(),
            stencil: Stencil::ThreePoint,
        }
    }
}

impl FdStep {
    /// Five-point stencil with `eps^(1/5)`, for brackets of brackets. The
    /// outer derivative amplifies the inner round-off by `1/h`, so the inner
    /// level needs both a small error and a comparatively large step.
    pub fn nested() -> Self {
        Self {
            scale: f64::EPSILON.powf(0.2),
            stencil: Stencil::FivePoint,
        }
    }

    pub fn step_for(&self, coordinate: f64) -> f64 {
        self.scale * coordinate.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coordinate {
    Position(usize),
    Momentum(usize),
}

fn partial<const D: usize, F>(
    f: &F,
    state: &CanonicalState<D>,
    coordinate: Coordinate,
    step: FdStep,
) -> Result<f64>
where
    F: Fn(&CanonicalState<D>) -> f64,
{
    let (value, slot) = match coordinate {
        Coordinate::Position(i) => (state.x[i], (true, i)),
        Coordinate::Momentum(i) => (state.p[i], (false, i)),
    };
    // spacing actually representable around `value`
    let h = (value + step.step_for(value)) - value;
    let at = |offset: f64| {
        let mut s = *state;
        let target = if slot.0 {
            &mut s.x[slot.1]
        } else {
            &mut s.p[slot.1]
        };
        *target = value + offset * h;
        f(&s)
    };
    let derivative = match step.stencil {
        Stencil::ThreePoint => (at(1.0) - at(-1.0)) / (2.0 * h),
        Stencil::FivePoint => (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * h),
    };
    if !derivative.is_finite() {
        return Err(Error::NonFinite(format!(
            "phase-space function is not finite near {state:?}"
        )));
    }
    Ok(derivative)
}

/// Canonical Poisson bracket `sum_i (df/dx_i dg/dp_i - df/dp_i dg/dx_i)`
/// by central differences with `O(h^2)` truncation error.
pub fn numerical_bracket<const D: usize, F, G>(
    f: F,
    g: G,
    state: &CanonicalState<D>,
    step: FdStep,
) -> Result<f64>
where
    F: Fn(&CanonicalState<D>) -> f64,
    G: Fn(&CanonicalState<D>) -> f64,
{
    if !state.is_finite() {
        return Err(Error::NonFinite(format!("state {state:?}")));
    }
    let mut total = 0.0;
    for i in 0..D {
        let fx = partial(&f, state, Coordinate::Position(i), step)?;
        let gp = partial(&g, state, Coordinate::Momentum(i), step)?;
        let fp = partial(&f, state, Coordinate::Momentum(i), step)?;
        let gx = partial(&g, state, Coordinate::Position(i), step)?;
        total += fx * gp - fp * gx;
    }
    Ok(total)
}

/// `|{f,{g,h}} + {g,{h,f}} + {h,{f,g}}|` from nested numerical brackets.
///
/// Uses [`FdStep::nested`] for both levels of differentiation.
pub fn jacobi_residual<const D: usize, F, G, H>(
    f: F,
    g: G,
    h: H,
    state: &CanonicalState<D>,
) -> Result<f64>
where
    F: Fn(&CanonicalState<D>) -> f64,
    G: Fn(&CanonicalState<D>) -> f64,
    H: Fn(&CanonicalState<D>) -> f64,
{
    let step = FdStep::nested();
    fn inner<'a, const D: usize>(
        a: &'a dyn Fn(&CanonicalState<D>) -> f64,
        b: &'a dyn Fn(&CanonicalState<D>) -> f64,
        step: FdStep,
    ) -> impl Fn(&CanonicalState<D>) -> f64 + 'a {
        move |s| numerical_bracket(a, b, s, step).unwrap_or(f64::NAN)
    }
    let gh = inner(&g, &h, step);
    let hf = inner(&h, &f, step);
    let fg = inner(&f, &g, step);
    let first = numerical_bracket(&f, gh, state, step)?;
    let second = numerical_bracket(&g, hf, state, step)?;
    let third = numerical_bracket(&h, fg, state, step)?;
    let total = first + second + third;
    if !total.is_finite() {
        return Err(Error::NonFinite("Jacobi sum".into()));
    }
    Ok(total.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(beta: f64) -> DeformationParameters {
        DeformationParameters::new(beta, 1.0).unwrap()
    }

    #[test]
    fn parameters_validate_and_link_gamma() {
        assert!(DeformationParameters::new(-1e-3, 1.0).is_err());
        assert!(DeformationParameters::new(0.1, 0.0).is_err());
        assert!(DeformationParameters::new(f64::NAN, 1.0).is_err());
        let p = DeformationParameters::new(0.01, 3.0).unwrap();
        let g = p.gamma();
        assert!((g * g - p.beta() * 9.0).abs() <= 4.0 * f64::EPSILON * g * g);
        let back = DeformationParameters::from_gamma(g, 3.0).unwrap();
        assert!((back.beta() - 0.01).abs() < 1e-17);
    }

    #[test]
    fn momentum_map_1d_examples() {
        assert_eq!(momentum_map_1d(0.3, &params(0.0)).unwrap(), 0.3);
        let big_p = momentum_map_1d(0.5, &params(0.04)).unwrap();
        assert!((big_p - 0.501_673_360_427_252_7).abs() < 1e-15);
        // first-order cross-check: P - p ~ beta p^3 / 3
        assert!((big_p - 0.5 - 0.04 * 0.125 / 3.0).abs() < 0.04 * 0.04 * 0.5f64.powi(5));
        let edge = FRAC_PI_2 / 0.2;
        assert!(matches!(
            momentum_map_1d(edge, &params(0.04)),
            Err(Error::Domain(_))
        ));
        assert!(momentum_map_1d(-edge * 1.01, &params(0.04)).is_err());
    }

    #[test]
    fn momentum_map_1d_inverse() {
        let pr = params(0.3);
        for &p in &[-2.5, -0.1, 0.0, 0.7, 2.8] {
            let big = momentum_map_1d(p, &pr).unwrap();
            assert!((canonical_momentum_1d(big, &pr) - p).abs() < 1e-14);
        }
    }

    #[test]
    fn momentum_map_3d_examples() {
        assert_eq!(
            momentum_map_3d([1.0, 0.0, 0.0], &params(0.0)).unwrap(),
            [1.0, 0.0, 0.0]
        );
        assert!(matches!(
            momentum_map_3d([0.6, 0.8, 0.0], &params(1.0)),
            Err(Error::Domain(_))
        ));
        let big = momentum_map_3d([1.0, 2.0, 2.0], &params(0.01)).unwrap();
        let factor = 1.048_284_836_721_918_3;
        for (b, p) in big.iter().zip([1.0, 2.0, 2.0]) {
            assert!((b - factor * p).abs() < 1e-14);
        }
        let back = canonical_momentum_3d(big, &params(0.01));
        for (b, p) in back.iter().zip([1.0, 2.0, 2.0]) {
            assert!((b - p).abs() < 1e-14);
        }
    }

    #[test]
    fn bracket_values() {
        assert_eq!(bracket_xp_1d(0.0, &params(0.7)), 1.0);
        assert_eq!(bracket_xp_1d(5.0, &params(0.0)), 1.0);
        assert!((bracket_xp_1d(2.0, &params(0.1)) - 1.4).abs() < 1e-15);

        assert_eq!(bracket_xp_3d([0.0; 3], 1, 1, &params(0.5)).unwrap(), 1.0);
        assert_eq!(
            bracket_xp_3d([1.0, 0.0, 0.0], 1, 2, &params(1.0)).unwrap(),
            0.0
        );
        let diag = bracket_xp_3d([1.0, 0.0, 0.0], 1, 1, &params(1.0)).unwrap();
        assert!((diag - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            bracket_xp_3d([0.0; 3], 0, 1, &params(1.0)),
            Err(Error::IndexOutOfRange(0))
        ));
        assert!(matches!(
            bracket_xp_3d([0.0; 3], 1, 4, &params(1.0)),
            Err(Error::IndexOutOfRange(4))
        ));
    }

    #[test]
    fn canonical_pair_bracket_is_one() {
        let s = CanonicalState1D::scalar(0.3, -1.7);
        let b = numerical_bracket(|s| s.x[0], |s| s.p[0], &s, FdStep::default()).unwrap();
        assert!((b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mapped_bracket_matches_deformed_identity() {
        let pr = params(0.04);
        let s = CanonicalState1D::scalar(0.0, 0.5);
        let b = numerical_bracket(
            |s| s.x[0],
            |s| momentum_map_1d(s.p[0], &pr).unwrap_or(f64::NAN),
            &s,
            FdStep::default(),
        )
        .unwrap();
        assert!((b - 1.010_067_046_422_495).abs() < 1e-9);
    }

    #[test]
    fn self_bracket_vanishes() {
        let s = CanonicalState1D::scalar(0.4, 0.9);
        let f = |s: &CanonicalState1D| s.x[0].sin() * s.p[0].powi(3);
        assert_eq!(numerical_bracket(f, f, &s, FdStep::default()).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_values_are_reported() {
        let s = CanonicalState1D::scalar(0.0, 0.0);
        let r = numerical_bracket(|_| f64::NAN, |s| s.p[0], &s, FdStep::default());
        assert!(matches!(r, Err(Error::NonFinite(_))));
        let bad = CanonicalState1D::scalar(f64::INFINITY, 0.0);
        assert!(numerical_bracket(|s| s.x[0], |s| s.p[0], &bad, FdStep::default()).is_err());
    }

    #[test]
    fn jacobi_canonical_triple() {
        let s = CanonicalState1D::scalar(0.8, -0.3);
        let r = jacobi_residual(|s| s.x[0], |s| s.p[0], |s| s.x[0] * s.p[0], &s).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn jacobi_3d_representation() {
        let pr = params(0.05);
        let s = CanonicalState3D::new([0.2, -0.4, 1.1], [0.9, -1.2, 0.6]);
        let big = move |k: usize| {
            move |s: &CanonicalState3D| momentum_map_3d(s.p, &pr).map(|v| v[k]).unwrap_or(f64::NAN)
        };
        let r = jacobi_residual(|s| s.x[0], big(0), big(1), &s).unwrap();
        assert!(r < 1e-5, "{r}");
    }

    #[test]
    fn undeformed_jacobi() {
        let s = CanonicalState1D::scalar(0.5, 0.25);
        let r = jacobi_residual(
            |s| s.x[0] * s.x[0],
            |s| s.p[0].exp(),
            |s| (s.x[0] * s.p[0]).sin(),
            &s,
        )
        .unwrap();
        assert!(r < 1e-5, "{r}");
    }
}
