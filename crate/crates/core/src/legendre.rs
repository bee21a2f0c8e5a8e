//! Legendre transform between the Hamiltonian and Lagrangian descriptions,
//! Lagrangians of the deformed particle and actions along sampled paths.

use crate::algebra::DeformationParameters;
use crate::dynamics::{Hamiltonian, HamiltonianKind, Potential, SqrtBranch, Trajectory};
use crate::error::{Error, Result};
use crate::frames::Event;

/// Above this value of `beta m^2 v^2` the first-order inversion is no longer
/// a small correction.
pub const FIRST_ORDER_SOFT_LIMIT: f64 = 0.1;

pub const NEWTON_MAX_ITERATIONS: usize = 64;

fn warn_if_large(params: &DeformationParameters, v2: f64) {
    let m = params.mass();
    let size = params.beta() * m * m * v2;
    if size > FIRST_ORDER_SOFT_LIMIT {
        log::warn!("beta m^2 v^2 = {size:.3} exceeds {FIRST_ORDER_SOFT_LIMIT}; first-order inversion is unreliable");
    }
}

/// `p = m v (1 - (4/3) beta m^2 v^2)`.
pub fn momentum_from_velocity_first_order_1d(v: f64, params: &DeformationParameters) -> f64 {
    warn_if_large(params, v * v);
    let m = params.mass();
    m * v * (1.0 - 4.0 / 3.0 * params.beta() * m * m * v * v)
}

/// `p_i = m v_i (1 - 2 beta m^2 v^2)`.
pub fn momentum_from_velocity_first_order_3d(
    v: [f64; 3],
    params: &DeformationParameters,
) -> [f64; 3] {
    let v2: f64 = v.iter().map(|c| c * c).sum();
    warn_if_large(params, v2);
    let m = params.mass();
    let factor = m * (1.0 - 2.0 * params.beta() * m * m * v2);
    v.map(|c| c * factor)
}

/// Least upper bound of the speed reachable on the monotone branch.
pub fn speed_supremum(h: &Hamiltonian) -> Result<f64> {
    match h.kind {
        HamiltonianKind::RelFirstOrder1D { .. } => {
            let limit = h.monotone_limit();
            if limit.is_finite() {
                h.radial_velocity(limit)
            } else {
                Ok(f64::INFINITY)
            }
        }
        HamiltonianKind::EffectiveSquareRoot {
            scale,
            branch: SqrtBranch::Relativistic,
        } => Ok(scale),
        _ => Ok(f64::INFINITY),
    }
}

/// Solves `|dH/dp|(|p|) = speed` for `|p|` by Newton iteration kept inside a
/// shrinking bracket, falling back to bisection whenever a step leaves it.
pub fn invert_speed(h: &Hamiltonian, speed: f64) -> Result<f64> {
    if !speed.is_finite() || speed < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "speed must be finite and >= 0, got {speed}"
        )));
    }
    if speed == 0.0 {
        return Ok(0.0);
    }
    let supremum = speed_supremum(h)?;
    if speed >= supremum {
        return Err(Error::NoRoot {
            velocity: speed,
            supremum,
        });
    }

    let tolerance = 1e-12 * speed.max(1.0);
    let mut lo = 0.0;
    let limit = h.monotone_limit();
    let mut hi = if limit.is_finite() {
        limit
    } else {
        let mut hi = 2.0 * (h.mass() * speed).max(1.0);
        while h.radial_velocity(hi)? < speed {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::NoRoot {
                    velocity: speed,
                    supremum,
                });
            }
        }
        hi
    };

    let mut p = h.mass() * speed;
    if !(p > lo && p < hi) {
        p = 0.5 * (lo + hi);
    }
    for _ in 0..NEWTON_MAX_ITERATIONS {
        let residual = h.radial_velocity(p)? - speed;
        if residual.abs() < tolerance {
            return Ok(p);
        }
        if residual < 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let slope = h.radial_velocity_slope(p)?;
        let mut next = p - residual / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == p {
            // bracket collapsed to adjacent floats
            return Ok(p);
        }
        p = next;
    }
    Err(Error::NonConvergence {
        iterations: NEWTON_MAX_ITERATIONS,
    })
}

/// Exact canonical momentum for a given velocity, inverting `v = dH/dp`.
pub fn momentum_from_velocity_exact<const D: usize>(
    h: &Hamiltonian,
    v: &[f64; D],
) -> Result<[f64; D]> {
    h.check_dimension(D)?;
    let speed = if D == 1 {
        v[0].abs()
    } else {
        v.iter().map(|c| c * c).sum::<f64>().sqrt()
    };
    if speed == 0.0 {
        return Ok([0.0; D]);
    }
    let pm = invert_speed(h, speed)?;
    Ok(v.map(|c| c * (pm / speed)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LagrangianKind {
    /// `m v^2/2 - (1/3) beta m^3 v^4 - U`.
    FirstOrder1D,
    /// `m u^2 sqrt(1 + v^2/u^2) - m u^2 - U`, valid for every velocity.
    SquareRoot1D { u: f64 },
    /// `m v^2/2 - (1/2) beta m^3 v^4 - U`.
    FirstOrder3D,
    /// `-m c^2 sqrt(1 - v^2/c^2) - U`, with `|v| < c`.
    Relativistic { c: f64 },
    /// `v p(v) - H(x, p(v))` with the exact numerical inversion of the given
    /// Hamiltonian model.
    Legendre(HamiltonianKind),
}

impl LagrangianKind {
    pub fn dimension(&self) -> Option<usize> {
        match self {
            LagrangianKind::FirstOrder1D => Some(1),
            LagrangianKind::FirstOrder3D => Some(3),
            LagrangianKind::SquareRoot1D { .. } | LagrangianKind::Relativistic { .. } => None,
            LagrangianKind::Legendre(kind) => kind.dimension(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lagrangian {
    pub kind: LagrangianKind,
    pub params: DeformationParameters,
    pub potential: Potential,
}

impl Lagrangian {
    pub fn new(
        kind: LagrangianKind,
        params: DeformationParameters,
        potential: Potential,
    ) -> Result<Self> {
        match kind {
            LagrangianKind::SquareRoot1D { u: s } | LagrangianKind::Relativistic { c: s }
                if !(s.is_finite() && s > 0.0) =>
            {
                return Err(Error::InvalidParameter(format!(
                    "velocity scale must be finite and positive, got {s}"
                )));
            }
            LagrangianKind::Legendre(hk) => {
                Hamiltonian::new(hk, params, potential)?;
            }
            _ => {}
        }
        Ok(Self {
            kind,
            params,
            potential,
        })
    }

    pub fn free(kind: LagrangianKind, params: DeformationParameters) -> Result<Self> {
        Self::new(kind, params, Potential::Free)
    }

    /// Matching Hamiltonian for the `Legendre` kind.
    fn hamiltonian(&self) -> Option<Hamiltonian> {
        match self.kind {
            LagrangianKind::Legendre(kind) => Some(Hamiltonian {
                kind,
                params: self.params,
                potential: self.potential,
            }),
            _ => None,
        }
    }

    /// Constant contained in [`Lagrangian::value`]; it does not affect the
    /// equations of motion.
    pub fn constant_offset(&self) -> f64 {
        let m = self.params.mass();
        match self.kind {
            LagrangianKind::SquareRoot1D { u } => -m * u * u,
            LagrangianKind::Relativistic { c } => -m * c * c,
            LagrangianKind::Legendre(_) => -self.hamiltonian().map_or(0.0, |h| h.constant_offset()),
            _ => 0.0,
        }
    }

    pub fn value<const D: usize>(&self, x: &[f64; D], v: &[f64; D]) -> Result<f64> {
        if let Some(expected) = self.kind.dimension() {
            if expected != D {
                return Err(Error::DimensionMismatch { expected, found: D });
            }
        }
        let m = self.params.mass();
        let beta = self.params.beta();
        let v2: f64 = v.iter().map(|c| c * c).sum();
        let potential = self.potential.value(x);
        let kinetic = match self.kind {
            LagrangianKind::FirstOrder1D => 0.5 * m * v2 - beta * m * m * m * v2 * v2 / 3.0,
            LagrangianKind::FirstOrder3D => 0.5 * m * v2 - 0.5 * beta * m * m * m * v2 * v2,
            LagrangianKind::SquareRoot1D { u } => {
                // m u^2 (sqrt(1+q) - 1) without cancellation
                m * v2 / (1.0 + (1.0 + v2 / (u * u)).sqrt())
            }
            LagrangianKind::Relativistic { c } => {
                if !(v2.sqrt() < c) {
                    return Err(Error::Domain(format!(
                        "|v| = {} is not below the light speed {c}",
                        v2.sqrt()
                    )));
                }
                -m * c * c * (1.0 - v2 / (c * c)).sqrt()
            }
            LagrangianKind::Legendre(_) => {
                let h = self.hamiltonian().expect("legendre kind");
                let p = momentum_from_velocity_exact(&h, v)?;
                let vp: f64 = v.iter().zip(&p).map(|(a, b)| a * b).sum();
                let state = crate::algebra::CanonicalState::new(*x, p);
                return Ok(vp - h.energy(&state)?);
            }
        };
        Ok(kinetic - potential)
    }

    pub fn dynamical_value<const D: usize>(&self, x: &[f64; D], v: &[f64; D]) -> Result<f64> {
        Ok(self.value(x, v)? - self.constant_offset())
    }
}

/// `|L(x, v) + H(x, p(v)) - v p(v)|` with `p(v)` from the exact inversion of
/// `h`. Vanishes to round-off when `l` is the Legendre transform of `h`.
pub fn legendre_roundtrip_residual<const D: usize>(
    h: &Hamiltonian,
    l: &Lagrangian,
    x: &[f64; D],
    v: &[f64; D],
) -> Result<f64> {
    let p = momentum_from_velocity_exact(h, v)?;
    let vp: f64 = v.iter().zip(&p).map(|(a, b)| a * b).sum();
    let energy = h.energy(&crate::algebra::CanonicalState::new(*x, p))?;
    Ok((l.value(x, v)? + energy - vp).abs())
}

/// Positions sampled at increasing times, with a velocity per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample<const D: usize> {
    times: Vec<f64>,
    positions: Vec<[f64; D]>,
    velocities: Vec<[f64; D]>,
}

impl<const D: usize> PathSample<D> {
    /// Velocities are derived with second-order finite differences
    /// (one-sided at the ends).
    pub fn new(times: Vec<f64>, positions: Vec<[f64; D]>) -> Result<Self> {
        Self::check(&times, positions.len())?;
        let velocities = differentiate(&times, &positions);
        Ok(Self {
            times,
            positions,
            velocities,
        })
    }

    pub fn with_velocities(
        times: Vec<f64>,
        positions: Vec<[f64; D]>,
        velocities: Vec<[f64; D]>,
    ) -> Result<Self> {
        Self::check(&times, positions.len())?;
        if velocities.len() != times.len() {
            return Err(Error::InvalidParameter(format!(
                "{} velocities for {} samples",
                velocities.len(),
                times.len()
            )));
        }
        Ok(Self {
            times,
            positions,
            velocities,
        })
    }

    /// Path of an integrated trajectory, velocities from `dH/dp`.
    pub fn from_trajectory(traj: &Trajectory<D>, h: &Hamiltonian) -> Result<Self> {
        let velocities = traj
            .states
            .iter()
            .map(|s| h.velocity(&s.p))
            .collect::<Result<Vec<_>>>()?;
        let positions = traj.states.iter().map(|s| s.x).collect();
        Self::with_velocities(traj.times.clone(), positions, velocities)
    }

    fn check(times: &[f64], n_positions: usize) -> Result<()> {
        if times.len() < 2 {
            return Err(Error::DegeneratePath(times.len()));
        }
        if n_positions != times.len() {
            return Err(Error::InvalidParameter(format!(
                "{n_positions} positions for {} times",
                times.len()
            )));
        }
        if !times.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "path times must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self) -> &[[f64; D]] {
        &self.positions
    }

    pub fn velocities(&self) -> &[[f64; D]] {
        &self.velocities
    }

    pub fn duration(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }

    /// Length of the polyline through the events `(u t, x)`.
    pub fn euclidean_arc_length(&self, u: f64) -> f64 {
        self.times
            .windows(2)
            .zip(self.positions.windows(2))
            .map(|(t, x)| {
                let a = Event::new(t[0], x[0]);
                let b = Event::new(t[1], x[1]);
                euclidean_interval(&a, &b, u).sqrt()
            })
            .sum()
    }
}

fn differentiate<const D: usize>(t: &[f64], y: &[[f64; D]]) -> Vec<[f64; D]> {
    let n = t.len();
    let mut out = vec![[0.0; D]; n];
    if n == 2 {
        let dt = t[1] - t[0];
        let slope: [f64; D] = std::array::from_fn(|k| (y[1][k] - y[0][k]) / dt);
        out[0] = slope;
        out[1] = slope;
        return out;
    }
    for i in 1..n - 1 {
        let (h1, h2) = (t[i] - t[i - 1], t[i + 1] - t[i]);
        let (a, b, c) = (
            -h2 / (h1 * (h1 + h2)),
            (h2 - h1) / (h1 * h2),
            h1 / (h2 * (h1 + h2)),
        );
        out[i] = std::array::from_fn(|k| a * y[i - 1][k] + b * y[i][k] + c * y[i + 1][k]);
    }
    let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
    let (a, b, c) = (
        -(2.0 * h1 + h2) / (h1 * (h1 + h2)),
        (h1 + h2) / (h1 * h2),
        -h1 / (h2 * (h1 + h2)),
    );
    out[0] = std::array::from_fn(|k| a * y[0][k] + b * y[1][k] + c * y[2][k]);
    let (h1, h2) = (t[n - 2] - t[n - 3], t[n - 1] - t[n - 2]);
    let (a, b, c) = (
        h2 / (h1 * (h1 + h2)),
        -(h1 + h2) / (h1 * h2),
        (2.0 * h2 + h1) / (h2 * (h1 + h2)),
    );
    out[n - 1] = std::array::from_fn(|k| a * y[n - 3][k] + b * y[n - 2][k] + c * y[n - 1][k]);
    out
}

/// Trapezoid-rule action `sum (L_i + L_{i+1}) dt / 2`.
pub fn action_along_path<const D: usize>(l: &Lagrangian, path: &PathSample<D>) -> Result<f64> {
    let values = path
        .positions
        .iter()
        .zip(&path.velocities)
        .map(|(x, v)| l.value(x, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(path
        .times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, l)| 0.5 * (l[0] + l[1]) * (t[1] - t[0]))
        .sum())
}

/// `u^2 dt^2 + sum dx_i^2`, the invariant of the deformed Galilean boosts.
pub fn euclidean_interval<const D: usize>(a: &Event<D>, b: &Event<D>, u: f64) -> f64 {
    let dt = b.t - a.t;
    let dx2: f64 = a.x.iter().zip(&b.x).map(|(p, q)| (q - p) * (q - p)).sum();
    u * u * dt * dt + dx2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CanonicalState1D;
    use crate::dynamics::integrate;

    fn params(beta: f64) -> DeformationParameters {
        DeformationParameters::new(beta, 1.0).unwrap()
    }

    fn exact_1d(beta: f64) -> Hamiltonian {
        Hamiltonian::free(HamiltonianKind::NonRelExact1D, params(beta)).unwrap()
    }

    #[test]
    fn first_order_inversion_examples() {
        let p = momentum_from_velocity_first_order_1d(0.5, &params(0.01));
        assert!((p - 0.498_333_333_333_333_3).abs() < 1e-15);
        assert_eq!(
            momentum_from_velocity_first_order_1d(0.7, &params(0.0)),
            0.7
        );
        assert_eq!(
            momentum_from_velocity_first_order_1d(0.0, &params(0.3)),
            0.0
        );
        let p3 = momentum_from_velocity_first_order_3d([0.5, 0.0, 0.0], &params(0.01));
        assert!((p3[0] - 0.5 * (1.0 - 0.02 * 0.25)).abs() < 1e-15);
    }

    /// Independent bisection on the exact velocity relation.
    fn bisect_exact(beta: f64, v: f64) -> f64 {
        let s = beta.sqrt();
        let speed = |p: f64| {
            let t = (s * p).tan();
            t * (1.0 + t * t) / s
        };
        let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2 / s * (1.0 - 1e-12));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if speed(mid) < v {
                lo = mid
            } else {
                hi = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn exact_inversion_matches_oracle() {
        let h = exact_1d(0.01);
        let p = momentum_from_velocity_exact(&h, &[0.5]).unwrap()[0];
        assert!((p - 0.498_346_325_937_273_35).abs() < 1e-13);
        assert!((p - bisect_exact(0.01, 0.5)).abs() < 1e-13);
        let first = momentum_from_velocity_first_order_1d(0.5, &params(0.01));
        assert!((p - first).abs() < 0.01 * 0.01 * 0.5f64.powi(5) * 10.0);
        assert_eq!(momentum_from_velocity_exact(&h, &[0.0]).unwrap(), [0.0]);
        let neg = momentum_from_velocity_exact(&h, &[-0.5]).unwrap()[0];
        assert_eq!(neg, -p);
        let flat = exact_1d(0.0);
        let p0 = momentum_from_velocity_exact(&flat, &[1.3]).unwrap()[0];
        assert!((p0 - 1.3).abs() < 1e-15);
    }

    #[test]
    fn inversion_of_large_velocities_stays_on_branch() {
        let h = exact_1d(0.04);
        let p = momentum_from_velocity_exact(&h, &[500.0]).unwrap()[0];
        assert!(p < h.params.tan_branch_limit());
        let v = h.velocity(&[p]).unwrap()[0];
        assert!((v - 500.0).abs() < 500.0 * 1e-12);
    }

    #[test]
    fn unattainable_velocities_are_rejected() {
        let rel = Hamiltonian::free(
            HamiltonianKind::EffectiveSquareRoot {
                scale: 2.0,
                branch: SqrtBranch::Relativistic,
            },
            params(0.0),
        )
        .unwrap();
        assert!(matches!(
            momentum_from_velocity_exact(&rel, &[2.0]),
            Err(Error::NoRoot { .. })
        ));
        let p = momentum_from_velocity_exact(&rel, &[1.2]).unwrap()[0];
        // v = p / sqrt(1 + p^2/4)  =>  p = v / sqrt(1 - v^2/4)
        assert!((p - 1.2 / (1.0f64 - 0.36).sqrt()).abs() < 1e-12);

        let rel_fo =
            Hamiltonian::free(HamiltonianKind::RelFirstOrder1D { c: 1.0 }, params(0.0)).unwrap();
        let sup = speed_supremum(&rel_fo).unwrap();
        assert!(sup.is_finite());
        assert!(momentum_from_velocity_exact(&rel_fo, &[sup * 1.0001]).is_err());
        assert!(momentum_from_velocity_exact(&rel_fo, &[sup * 0.9]).is_ok());
    }

    #[test]
    fn lagrangian_values() {
        let x = [0.0];
        let l0 = Lagrangian::free(LagrangianKind::FirstOrder1D, params(0.0)).unwrap();
        assert_eq!(l0.value(&x, &[1.0]).unwrap(), 0.5);
        let l1 = Lagrangian::free(LagrangianKind::FirstOrder1D, params(0.01)).unwrap();
        assert!((l1.value(&x, &[1.0]).unwrap() - (0.5 - 0.01 / 3.0)).abs() < 1e-15);
        let u = (3.0f64 / (8.0 * 0.01)).sqrt();
        let sq = Lagrangian::free(LagrangianKind::SquareRoot1D { u }, params(0.01)).unwrap();
        let value = sq.value(&x, &[1.0]).unwrap();
        assert!((value - 0.496_710_383_926_659_1).abs() < 1e-14);
        let gap = value - l1.value(&x, &[1.0]).unwrap();
        assert!((gap - 4.371_725_999_241_25e-5).abs() < 1e-14);
        assert_eq!(sq.value(&x, &[0.0]).unwrap(), 0.0);
        assert!((sq.constant_offset() + 37.5).abs() < 1e-12);

        let rel = Lagrangian::free(LagrangianKind::Relativistic { c: 1.0 }, params(0.0)).unwrap();
        assert!(rel.value(&x, &[1.0]).is_err());
        assert!((rel.value(&x, &[0.6]).unwrap() + 0.8).abs() < 1e-15);
        assert!(Lagrangian::free(LagrangianKind::SquareRoot1D { u: 0.0 }, params(0.0)).is_err());
    }

    #[test]
    fn quartic_corrections_have_opposite_signs() {
        let x = [0.0];
        let l = Lagrangian::free(LagrangianKind::FirstOrder1D, params(0.02)).unwrap();
        let l0 = Lagrangian::free(LagrangianKind::FirstOrder1D, params(0.0)).unwrap();
        assert!(l.value(&x, &[0.8]).unwrap() < l0.value(&x, &[0.8]).unwrap());
        let h = Hamiltonian::free(HamiltonianKind::NonRelFirstOrder1D, params(0.02)).unwrap();
        let h0 = Hamiltonian::free(HamiltonianKind::NonRelFirstOrder1D, params(0.0)).unwrap();
        let s = CanonicalState1D::scalar(0.0, 0.8);
        assert!(h.energy(&s).unwrap() > h0.energy(&s).unwrap());
        // relativistic: L - L0 has a positive v^4 term
        let rel = Lagrangian::free(LagrangianKind::Relativistic { c: 10.0 }, params(0.0)).unwrap();
        let dyn_rel = rel.dynamical_value(&x, &[0.8]).unwrap();
        assert!(dyn_rel > 0.5 * 0.64);
    }

    #[test]
    fn roundtrip_residuals() {
        let x = [0.0];
        let flat = exact_1d(0.0);
        let l0 = Lagrangian::free(LagrangianKind::FirstOrder1D, params(0.0)).unwrap();
        for v in [-2.0, 0.3, 1.7] {
            assert!(legendre_roundtrip_residual(&flat, &l0, &x, &[v]).unwrap() < 1e-12);
        }
        let h = exact_1d(0.01);
        let definitional = Lagrangian::free(LagrangianKind::Legendre(h.kind), h.params).unwrap();
        assert!(legendre_roundtrip_residual(&h, &definitional, &x, &[0.5]).unwrap() < 1e-12);

        let first = Lagrangian::free(LagrangianKind::FirstOrder1D, params(0.01)).unwrap();
        let r = legendre_roundtrip_residual(&h, &first, &x, &[0.5]).unwrap();
        assert!((r - 1.085_456_247_859_305e-6).abs() < 1e-12, "{r}");
        assert!(r <= 5.0 * 0.01 * 0.01 * 0.5f64.powi(6));
    }

    #[test]
    fn roundtrip_residual_shrinks_quadratically_in_beta() {
        let x = [0.0];
        let residual = |beta: f64| {
            let h = exact_1d(beta);
            let l = Lagrangian::free(LagrangianKind::FirstOrder1D, params(beta)).unwrap();
            legendre_roundtrip_residual(&h, &l, &x, &[0.5]).unwrap()
        };
        let ratio = residual(0.01) / residual(0.005);
        assert!((ratio - 4.0).abs() < 0.8, "{ratio}");
    }

    #[test]
    fn path_construction_errors() {
        assert!(matches!(
            PathSample::<1>::new(vec![0.0], vec![[0.0]]),
            Err(Error::DegeneratePath(1))
        ));
        assert!(PathSample::<1>::new(vec![0.0, 0.0], vec![[0.0], [1.0]]).is_err());
        assert!(PathSample::<1>::new(vec![0.0, 1.0], vec![[0.0]]).is_err());
    }

    #[test]
    fn finite_difference_velocities_are_second_order_exact() {
        let times = vec![0.0, 0.1, 0.35, 0.5, 0.9];
        let positions: Vec<[f64; 1]> = times.iter().map(|t| [2.0 * t * t - t + 3.0]).collect();
        let path = PathSample::new(times.clone(), positions).unwrap();
        for (t, v) in times.iter().zip(path.velocities()) {
            assert!((v[0] - (4.0 * t - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_motion_action() {
        let u = 3.0;
        let v = 2.0;
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.2).collect();
        let positions = times.iter().map(|t| [v * t]).collect();
        let path = PathSample::new(times, positions).unwrap();
        let l = Lagrangian::free(LagrangianKind::SquareRoot1D { u }, params(0.0)).unwrap();
        let action = action_along_path(&l, &path).unwrap();
        let expected = 2.0 * (u * u * (1.0 + v * v / (u * u)).sqrt() - u * u);
        assert!((action - expected).abs() < 1e-12);
        let arc = path.euclidean_arc_length(u);
        assert!((action - (u * arc - u * u * 2.0)).abs() < 1e-12);

        let still = PathSample::new(vec![0.0, 1.0, 2.0], vec![[1.0]; 3]).unwrap();
        assert_eq!(action_along_path(&l, &still).unwrap(), 0.0);
    }

    #[test]
    fn trajectory_path_uses_model_velocities() {
        let h = exact_1d(0.01);
        let traj = integrate(&h, &CanonicalState1D::scalar(0.0, 1.0), 1.0, 0.1).unwrap();
        let path = PathSample::from_trajectory(&traj, &h).unwrap();
        assert!((path.velocities()[3][0] - 1.013_447_458_871_206).abs() < 1e-14);
    }

    #[test]
    fn intervals() {
        let a = Event::new(0.0, [0.0, 0.0, 0.0]);
        assert_eq!(euclidean_interval(&a, &a, 5.0), 0.0);
        assert_eq!(
            euclidean_interval(&Event::new(0.0, [0.0]), &Event::new(1.0, [0.0]), 2.0),
            4.0
        );
        let b = Event::new(1.0, [1.0, 1.0, 1.0]);
        assert_eq!(euclidean_interval(&a, &b, 1.0), 4.0);
    }
}
