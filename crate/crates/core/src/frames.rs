//! Frame transformations.
//!
//! The free-particle action of the deformed theory is `m u^2 int ds` with the
//! Euclidean interval `ds^2 = u^2 dt^2 + dx^2`, so the transformations between
//! inertial frames are rotations in the `(u t, x)` plane. With `tan(phi) = V/u`:
//!
//! ```text
//! x = (x' + V t') / sqrt(1 + V^2/u^2)
//! t = (t' - x' V/u^2) / sqrt(1 + V^2/u^2)
//! ```
//!
//! Relativistic particles instead obey the ordinary Lorentz transformation
//! with an effective light speed, see [`LorentzBoost`].

use crate::algebra::CanonicalState1D;
use crate::dynamics::{integrate, Hamiltonian};
use crate::error::{Error, Result};

/// A spacetime point: time and a `D`-dimensional position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event<const D: usize> {
    pub t: f64,
    pub x: [f64; D],
}

impl<const D: usize> Event<D> {
    pub fn new(t: f64, x: [f64; D]) -> Self {
        Self { t, x }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GalileanLaw {
    /// Rotation in the `(u t, x)` plane.
    Exact,
    /// The rotation expanded to first order in `1/u^2`.
    FirstOrder,
    /// `x = x' + V t'`, `t = t'`.
    Ordinary,
}

impl GalileanLaw {
    pub fn name(&self) -> &'static str {
        match self {
            GalileanLaw::Exact => "exact",
            GalileanLaw::FirstOrder => "first_order",
            GalileanLaw::Ordinary => "ordinary",
        }
    }
}

/// Transformation from the moving frame `(t', x')` to the rest frame
/// `(t, x)`; the moving frame travels with velocity `V` along axis 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GalileanBoost {
    pub velocity: f64,
    pub u: f64,
    pub law: GalileanLaw,
}

impl GalileanBoost {
    pub fn new(velocity: f64, u: f64, law: GalileanLaw) -> Result<Self> {
        if !velocity.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "boost velocity {velocity}"
            )));
        }
        if !(u > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "effective velocity u must be positive, got {u}"
            )));
        }
        Ok(Self { velocity, u, law })
    }

    pub fn exact(velocity: f64, u: f64) -> Result<Self> {
        Self::new(velocity, u, GalileanLaw::Exact)
    }

    /// Rotation angle `phi` with `tan(phi) = V/u`.
    pub fn angle(&self) -> f64 {
        self.velocity.atan2(self.u)
    }

    pub fn apply<const D: usize>(&self, e: &Event<D>) -> Event<D> {
        let (v, u) = (self.velocity, self.u);
        let (t1, x1) = (e.t, e.x[0]);
        let (t, x) = match self.law {
            GalileanLaw::Exact => {
                let r = v / u;
                let norm = (1.0 + r * r).sqrt();
                ((t1 - x1 * v / (u * u)) / norm, (x1 + v * t1) / norm)
            }
            GalileanLaw::FirstOrder => {
                let shrink = 1.0 - v * v / (2.0 * u * u);
                (t1 * shrink - x1 * v / (u * u), (x1 + v * t1) * shrink)
            }
            GalileanLaw::Ordinary => (t1, x1 + v * t1),
        };
        let mut out = *e;
        out.t = t;
        out.x[0] = x;
        out
    }

    pub fn inverse(&self) -> Self {
        Self {
            velocity: -self.velocity,
            ..*self
        }
    }

    /// `self` applied after `first`: tangent addition
    /// `V = (V1 + V2) / (1 - V1 V2 / u^2)`.
    ///
    /// Only exact boosts with the same `u` compose. A boost represents a
    /// rotation angle in `(-pi/2, pi/2)`, so combinations reaching or passing
    /// `pi/2` are rejected.
    pub fn compose(&self, first: &GalileanBoost) -> Result<Self> {
        if self.law != GalileanLaw::Exact || first.law != GalileanLaw::Exact {
            return Err(Error::InvalidParameter(
                "only exact boosts form a group under composition".into(),
            ));
        }
        if (self.u - first.u).abs() > 1e-12 * self.u.max(first.u) {
            return Err(Error::InvalidParameter(format!(
                "boosts use different scales u = {} and {}",
                self.u, first.u
            )));
        }
        let u = self.u;
        let denominator = 1.0 - self.velocity * first.velocity / (u * u);
        if !(denominator > 4.0 * f64::EPSILON) {
            return Err(Error::SingularComposition);
        }
        Self::new(
            (self.velocity + first.velocity) / denominator,
            u,
            GalileanLaw::Exact,
        )
    }
}

/// Velocity in the rest frame of a particle moving with `v_moving` in the
/// boosted frame: `dx/dt` of the transformed worldline.
pub fn velocity_compose(v_moving: f64, boost: &GalileanBoost) -> Result<f64> {
    let (v, u) = (boost.velocity, boost.u);
    match boost.law {
        GalileanLaw::Exact => {
            let denominator = 1.0 - v_moving * v / (u * u);
            if denominator == 0.0 {
                return Err(Error::SingularVelocity);
            }
            Ok((v_moving + v) / denominator)
        }
        GalileanLaw::FirstOrder => {
            let origin = boost.apply(&Event::new(0.0, [0.0]));
            let later = boost.apply(&Event::new(1.0, [v_moving]));
            let dt = later.t - origin.t;
            if dt == 0.0 {
                return Err(Error::SingularVelocity);
            }
            Ok((later.x[0] - origin.x[0]) / dt)
        }
        GalileanLaw::Ordinary => Ok(v_moving + v),
    }
}

/// Lorentz transformation with effective light speed `c_eff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzBoost {
    pub velocity: f64,
    pub c_eff: f64,
}

impl LorentzBoost {
    pub fn new(velocity: f64, c_eff: f64) -> Result<Self> {
        if !(c_eff > 0.0) || !c_eff.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "effective light speed must be positive, got {c_eff}"
            )));
        }
        if !(velocity.abs() < c_eff) {
            return Err(Error::Superluminal { velocity, c_eff });
        }
        Ok(Self { velocity, c_eff })
    }

    pub fn lorentz_factor(&self) -> f64 {
        let r = self.velocity / self.c_eff;
        1.0 / (1.0 - r * r).sqrt()
    }

    pub fn apply<const D: usize>(&self, e: &Event<D>) -> Event<D> {
        let g = self.lorentz_factor();
        let (v, c) = (self.velocity, self.c_eff);
        let mut out = *e;
        out.x[0] = g * (e.x[0] + v * e.t);
        out.t = g * (e.t + e.x[0] * v / (c * c));
        out
    }

    pub fn inverse(&self) -> Self {
        Self {
            velocity: -self.velocity,
            ..*self
        }
    }
}

/// `c^2 dt^2 - sum dx_i^2`.
pub fn minkowski_interval<const D: usize>(a: &Event<D>, b: &Event<D>, c: f64) -> f64 {
    let dt = b.t - a.t;
    let dx2: f64 = a.x.iter().zip(&b.x).map(|(p, q)| (q - p) * (q - p)).sum();
    c * c * dt * dt - dx2
}

/// Outcome of [`covariance_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceReport {
    /// Largest distance of a transformed event from the fitted line.
    pub linearity: f64,
    pub measured_slope: f64,
    /// Velocity predicted by exact tangent addition.
    pub expected_slope: f64,
    pub slope_error: f64,
}

impl CovarianceReport {
    pub fn residual(&self) -> f64 {
        self.linearity + self.slope_error
    }
}

/// Integrates a free trajectory, maps every sample through `boost` and checks
/// that the image is a straight worldline whose velocity is the exact
/// tangent-addition composition of the particle velocity with the boost.
///
/// With the exact law this holds to round-off. Under the ordinary law the
/// image is still straight but its slope misses the deformed composition by
/// a relative `O(v V / u^2)`.
pub fn covariance_residual(
    h: &Hamiltonian,
    boost: &GalileanBoost,
    initial: &CanonicalState1D,
    t_end: f64,
    dt: f64,
) -> Result<CovarianceReport> {
    if !h.potential.is_free() {
        return Err(Error::InvalidParameter(
            "covariance check requires a free particle".into(),
        ));
    }
    let traj = integrate(h, initial, t_end, dt)?;
    let events: Vec<Event<1>> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| boost.apply(&Event::new(t, s.x)))
        .collect();

    let n = events.len() as f64;
    let t_mean = events.iter().map(|e| e.t).sum::<f64>() / n;
    let x_mean = events.iter().map(|e| e.x[0]).sum::<f64>() / n;
    let (mut stt, mut stx) = (0.0, 0.0);
    for e in &events {
        let (dt, dx) = (e.t - t_mean, e.x[0] - x_mean);
        stt += dt * dt;
        stx += dt * dx;
    }
    if stt == 0.0 {
        return Err(Error::Domain(
            "transformed events share one time; no worldline slope".into(),
        ));
    }
    let slope = stx / stt;
    let linearity = events
        .iter()
        .map(|e| (e.x[0] - (x_mean + slope * (e.t - t_mean))).abs())
        .fold(0.0, f64::max);

    let particle_velocity = h.velocity(&initial.p)?[0];
    let expected = velocity_compose(
        particle_velocity,
        &GalileanBoost {
            law: GalileanLaw::Exact,
            ..*boost
        },
    )?;
    Ok(CovarianceReport {
        linearity,
        measured_slope: slope,
        expected_slope: expected,
        slope_error: (slope - expected).abs(),
    })
}
