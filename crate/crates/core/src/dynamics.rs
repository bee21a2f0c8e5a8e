//! Hamiltonian models, Hamilton's equations in canonical variables and a
//! fixed-step RK4 integrator.
//!
//! Every model is written in canonical variables, where the deformation shows
//! up as a modified kinetic energy. All kinetic energies depend on `p^2` only,
//! so the velocity is always `p_i * f(p^2)` for a model-specific factor `f`.

use crate::algebra::{CanonicalState, DeformationParameters, FdStep};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Free,
    /// `U = k |x|^2 / 2`.
    Harmonic {
        stiffness: f64,
    },
    /// Constant force along axis 1: `U = -F x_1`.
    UniformField {
        force: f64,
    },
}

impl Potential {
    pub fn value<const D: usize>(&self, x: &[f64; D]) -> f64 {
        match *self {
            Potential::Free => 0.0,
            Potential::Harmonic { stiffness } => {
                0.5 * stiffness * x.iter().map(|v| v * v).sum::<f64>()
            }
            Potential::UniformField { force } => -force * x[0],
        }
    }

    pub fn gradient<const D: usize>(&self, x: &[f64; D]) -> [f64; D] {
        match *self {
            Potential::Free => [0.0; D],
            Potential::Harmonic { stiffness } => x.map(|v| stiffness * v),
            Potential::UniformField { force } => {
                let mut g = [0.0; D];
                g[0] = -force;
                g
            }
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Potential::Free)
    }

    fn validate(&self) -> Result<()> {
        let value = match *self {
            Potential::Free => 0.0,
            Potential::Harmonic { stiffness } => stiffness,
            Potential::UniformField { force } => force,
        };
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "potential {self:?} is not finite"
            )));
        }
        Ok(())
    }
}

/// Sign choice for the square-root Hamiltonians.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtBranch {
    /// `-m u^2 sqrt(1 - p^2/(m^2 u^2)) + m u^2`. Its expansion reproduces the
    /// deformed `+ beta p^4` correction when `u^2 = 3/(8 beta m^2)`.
    Euclidean,
    /// `m s^2 sqrt(1 + p^2/(m^2 s^2)) - m s^2`, the relativistic form with
    /// light speed `s` (rest energy omitted).
    Relativistic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HamiltonianKind {
    /// `tan^2(sqrt(beta) p) / (2 m beta) + U`.
    NonRelExact1D,
    /// `p^2/2m + beta p^4 / (3m) + U`.
    NonRelFirstOrder1D,
    /// `p^2/2m + beta p^4 / (2m) + U`.
    NonRel3DFirstOrder,
    /// `p^2 / (2m (1 - beta p^2)) + U`.
    NonRel3DExact,
    /// `m c^2 + p^2/2m - (1/(8 m^2 c^2) - beta/3) p^4 / m + U`.
    RelFirstOrder1D {
        c: f64,
    },
    EffectiveSquareRoot {
        scale: f64,
        branch: SqrtBranch,
    },
}

impl HamiltonianKind {
    /// Spatial dimension the model is defined in; `None` for isotropic
    /// models that accept any dimension.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            HamiltonianKind::NonRelExact1D
            | HamiltonianKind::NonRelFirstOrder1D
            | HamiltonianKind::RelFirstOrder1D { .. } => Some(1),
            HamiltonianKind::NonRel3DFirstOrder | HamiltonianKind::NonRel3DExact => Some(3),
            HamiltonianKind::EffectiveSquareRoot { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            HamiltonianKind::NonRelExact1D => "nonrel_exact_1d",
            HamiltonianKind::NonRelFirstOrder1D => "nonrel_first_order_1d",
            HamiltonianKind::NonRel3DFirstOrder => "nonrel_3d_first_order",
            HamiltonianKind::NonRel3DExact => "nonrel_3d_exact",
            HamiltonianKind::RelFirstOrder1D { .. } => "rel_first_order_1d",
            HamiltonianKind::EffectiveSquareRoot { .. } => "effective_sqrt",
        }
    }
}

/// Time derivative of a phase-space point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDerivative<const D: usize> {
    pub dx: [f64; D],
    pub dp: [f64; D],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian {
    pub kind: HamiltonianKind,
    pub params: DeformationParameters,
    pub potential: Potential,
}

impl Hamiltonian {
    pub fn new(
        kind: HamiltonianKind,
        params: DeformationParameters,
        potential: Potential,
    ) -> Result<Self> {
        match kind {
            HamiltonianKind::RelFirstOrder1D { c } if !(c.is_finite() && c > 0.0) => {
                return Err(Error::InvalidParameter(format!(
                    "light speed must be finite and positive, got {c}"
                )));
            }
            HamiltonianKind::EffectiveSquareRoot { scale, .. }
                if !(scale > 0.0) || scale.is_nan() =>
            {
                return Err(Error::InvalidParameter(format!(
                    "velocity scale must be positive, got {scale}"
                )));
            }
            _ => {}
        }
        potential.validate()?;
        Ok(Self {
            kind,
            params,
            potential,
        })
    }

    pub fn free(kind: HamiltonianKind, params: DeformationParameters) -> Result<Self> {
        Self::new(kind, params, Potential::Free)
    }

    pub fn mass(&self) -> f64 {
        self.params.mass()
    }

    /// `(1/(8 m^2 c^2) - beta/3)`, the bracket in front of `-p^4/m` in the
    /// relativistic first-order model.
    fn rel_bracket(&self, c: f64) -> f64 {
        let m = self.mass();
        1.0 / (8.0 * m * m * c * c) - self.params.beta() / 3.0
    }

    /// Coefficient of `p^4` in the relativistic first-order model; `None` for
    /// other kinds. Changes sign at `beta = 3/(8 m^2 c^2)`.
    pub fn quartic_coefficient(&self) -> Option<f64> {
        match self.kind {
            HamiltonianKind::RelFirstOrder1D { c } => Some(-self.rel_bracket(c) / self.mass()),
            _ => None,
        }
    }

    /// Constant part contained in [`Hamiltonian::energy`].
    pub fn constant_offset(&self) -> f64 {
        let m = self.mass();
        match self.kind {
            HamiltonianKind::RelFirstOrder1D { c } => m * c * c,
            HamiltonianKind::EffectiveSquareRoot { scale, branch } => match branch {
                SqrtBranch::Euclidean => m * scale * scale,
                SqrtBranch::Relativistic => -m * scale * scale,
            },
            _ => 0.0,
        }
    }

    pub fn check_dimension(&self, found: usize) -> Result<()> {
        match self.kind.dimension() {
            Some(expected) if expected != found => {
                Err(Error::DimensionMismatch { expected, found })
            }
            _ => Ok(()),
        }
    }

    /// Exclusive bound on `|p|` where the model is defined.
    pub fn momentum_limit(&self) -> f64 {
        let m = self.mass();
        match self.kind {
            HamiltonianKind::NonRelExact1D => self.params.tan_branch_limit(),
            HamiltonianKind::NonRel3DExact | HamiltonianKind::NonRel3DFirstOrder => {
                self.params.ball_limit()
            }
            HamiltonianKind::EffectiveSquareRoot {
                scale,
                branch: SqrtBranch::Euclidean,
            } => m * scale,
            _ => f64::INFINITY,
        }
    }

    fn check_momentum(&self, p2: f64) -> Result<()> {
        if !p2.is_finite() {
            return Err(Error::NonFinite("momentum".into()));
        }
        let limit = self.momentum_limit();
        if limit.is_finite() && !(p2.sqrt() < limit) {
            return Err(Error::Domain(format!(
                "|p| = {} is outside the {} domain (|p| < {limit})",
                p2.sqrt(),
                self.kind.name()
            )));
        }
        Ok(())
    }

    /// Kinetic part (including constant offsets) as a function of `p^2`.
    fn kinetic(&self, p2: f64) -> Result<f64> {
        self.check_momentum(p2)?;
        let m = self.mass();
        let beta = self.params.beta();
        Ok(match self.kind {
            HamiltonianKind::NonRelExact1D => {
                if self.params.is_undeformed() {
                    p2 / (2.0 * m)
                } else {
                    let t = (self.params.sqrt_beta() * p2.sqrt()).tan();
                    t * t / (2.0 * m * beta)
                }
            }
            HamiltonianKind::NonRelFirstOrder1D => p2 / (2.0 * m) + beta * p2 * p2 / (3.0 * m),
            HamiltonianKind::NonRel3DFirstOrder => p2 / (2.0 * m) + beta * p2 * p2 / (2.0 * m),
            HamiltonianKind::NonRel3DExact => p2 / (2.0 * m * (1.0 - beta * p2)),
            HamiltonianKind::RelFirstOrder1D { c } => {
                m * c * c + p2 / (2.0 * m) - self.rel_bracket(c) * p2 * p2 / m
            }
            HamiltonianKind::EffectiveSquareRoot { scale, branch } => {
                let q = p2 / (m * m * scale * scale);
                // m s^2 |sqrt(1 -+ q) - 1| written without cancellation
                match branch {
                    SqrtBranch::Euclidean => p2 / (m * (1.0 + (1.0 - q).sqrt())),
                    SqrtBranch::Relativistic => p2 / (m * (1.0 + (1.0 + q).sqrt())),
                }
            }
        })
    }

    /// `f(p^2)` with `dH/dp_i = p_i f(p^2)`.
    fn velocity_factor(&self, p2: f64) -> Result<f64> {
        self.check_momentum(p2)?;
        let m = self.mass();
        let beta = self.params.beta();
        Ok(match self.kind {
            HamiltonianKind::NonRelExact1D => {
                if self.params.is_undeformed() || p2 == 0.0 {
                    1.0 / m
                } else {
                    let s = self.params.sqrt_beta();
                    let pm = p2.sqrt();
                    let t = (s * pm).tan();
                    t * (1.0 + t * t) / (m * s * pm)
                }
            }
            HamiltonianKind::NonRelFirstOrder1D => (1.0 + 4.0 * beta * p2 / 3.0) / m,
            HamiltonianKind::NonRel3DFirstOrder => (1.0 + 2.0 * beta * p2) / m,
            HamiltonianKind::NonRel3DExact => {
                let r = 1.0 - beta * p2;
                1.0 / (m * r * r)
            }
            HamiltonianKind::RelFirstOrder1D { c } => (1.0 - 4.0 * self.rel_bracket(c) * p2) / m,
            HamiltonianKind::EffectiveSquareRoot { scale, branch } => {
                let q = p2 / (m * m * scale * scale);
                match branch {
                    SqrtBranch::Euclidean => 1.0 / (m * (1.0 - q).sqrt()),
                    SqrtBranch::Relativistic => 1.0 / (m * (1.0 + q).sqrt()),
                }
            }
        })
    }

    /// Speed `|dH/dp|` as a function of `|p|` on the non-negative half-line.
    pub fn radial_velocity(&self, pm: f64) -> Result<f64> {
        Ok(pm * self.velocity_factor(pm * pm)?)
    }

    /// `d|v|/d|p|`, used by the Newton inversion.
    pub fn radial_velocity_slope(&self, pm: f64) -> Result<f64> {
        let p2 = pm * pm;
        self.check_momentum(p2)?;
        let m = self.mass();
        let beta = self.params.beta();
        Ok(match self.kind {
            HamiltonianKind::NonRelExact1D => {
                let t = (self.params.sqrt_beta() * pm).tan();
                (1.0 + t * t) * (1.0 + 3.0 * t * t) / m
            }
            HamiltonianKind::NonRelFirstOrder1D => (1.0 + 4.0 * beta * p2) / m,
            HamiltonianKind::NonRel3DFirstOrder => (1.0 + 6.0 * beta * p2) / m,
            HamiltonianKind::NonRel3DExact => {
                let r = 1.0 - beta * p2;
                (1.0 + 3.0 * beta * p2) / (m * r * r * r)
            }
            HamiltonianKind::RelFirstOrder1D { c } => (1.0 - 12.0 * self.rel_bracket(c) * p2) / m,
            HamiltonianKind::EffectiveSquareRoot { scale, branch } => {
                let q = p2 / (m * m * scale * scale);
                match branch {
                    SqrtBranch::Euclidean => 1.0 / (m * (1.0 - q).powf(1.5)),
                    SqrtBranch::Relativistic => 1.0 / (m * (1.0 + q).powf(1.5)),
                }
            }
        })
    }

    /// Largest `|p|` on which the speed increases monotonically: the domain
    /// limit, or the turning point of the relativistic first-order model.
    pub fn monotone_limit(&self) -> f64 {
        let limit = self.momentum_limit();
        match self.kind {
            HamiltonianKind::RelFirstOrder1D { c } => {
                let a = self.rel_bracket(c);
                if a > 0.0 {
                    limit.min(1.0 / (12.0 * a).sqrt())
                } else {
                    limit
                }
            }
            _ => limit,
        }
    }

    /// Total energy, potential included.
    pub fn energy<const D: usize>(&self, state: &CanonicalState<D>) -> Result<f64> {
        self.check_dimension(D)?;
        let kinetic = self.kinetic(state.momentum_squared())?;
        Ok(kinetic + self.potential.value(&state.x))
    }

    /// Energy with [`Hamiltonian::constant_offset`] removed.
    pub fn dynamical_energy<const D: usize>(&self, state: &CanonicalState<D>) -> Result<f64> {
        Ok(self.energy(state)? - self.constant_offset())
    }

    /// `dx/dt = dH/dp` at the given momentum.
    pub fn velocity<const D: usize>(&self, p: &[f64; D]) -> Result<[f64; D]> {
        self.check_dimension(D)?;
        let p2: f64 = p.iter().map(|v| v * v).sum();
        let factor = self.velocity_factor(p2)?;
        Ok(p.map(|v| v * factor))
    }

    /// Hamilton's equations, analytic.
    pub fn rhs<const D: usize>(&self, state: &CanonicalState<D>) -> Result<PhaseDerivative<D>> {
        let dx = self.velocity(&state.p)?;
        let grad = self.potential.gradient(&state.x);
        Ok(PhaseDerivative {
            dx,
            dp: grad.map(|g| -g),
        })
    }

    /// Hamilton's equations from central differences of [`Hamiltonian::energy`].
    pub fn rhs_numeric<const D: usize>(
        &self,
        state: &CanonicalState<D>,
        step: FdStep,
    ) -> Result<PhaseDerivative<D>> {
        self.check_dimension(D)?;
        let mut dx = [0.0; D];
        let mut dp = [0.0; D];
        for i in 0..D {
            let h = step.step_for(state.p[i]);
            let (mut hi, mut lo) = (*state, *state);
            hi.p[i] += h;
            lo.p[i] -= h;
            dx[i] = (self.energy(&hi)? - self.energy(&lo)?) / (hi.p[i] - lo.p[i]);

            let h = step.step_for(state.x[i]);
            let (mut hi, mut lo) = (*state, *state);
            hi.x[i] += h;
            lo.x[i] -= h;
            dp[i] = -(self.energy(&hi)? - self.energy(&lo)?) / (hi.x[i] - lo.x[i]);
        }
        Ok(PhaseDerivative { dx, dp })
    }
}

/// Time-ordered phase states with the model energy at each sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const D: usize> {
    pub times: Vec<f64>,
    pub states: Vec<CanonicalState<D>>,
    pub energies: Vec<f64>,
    /// Nominal step; the final step may be shorter so the run ends at `t_end`.
    pub step: f64,
}

impl<const D: usize> Trajectory<D> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &CanonicalState<D>)> {
        self.times.last().copied().zip(self.states.last())
    }
}

fn rk4_step<const D: usize>(
    h: &Hamiltonian,
    s: &CanonicalState<D>,
    dt: f64,
) -> Result<CanonicalState<D>> {
    let shifted = |k: &PhaseDerivative<D>, f: f64| {
        let mut out = *s;
        for i in 0..D {
            out.x[i] += f * k.dx[i];
            out.p[i] += f * k.dp[i];
        }
        out
    };
    let k1 = h.rhs(s)?;
    let k2 = h.rhs(&shifted(&k1, 0.5 * dt))?;
    let k3 = h.rhs(&shifted(&k2, 0.5 * dt))?;
    let k4 = h.rhs(&shifted(&k3, dt))?;
    let mut out = *s;
    for i in 0..D {
        out.x[i] += dt / 6.0 * (k1.dx[i] + 2.0 * k2.dx[i] + 2.0 * k3.dx[i] + k4.dx[i]);
        out.p[i] += dt / 6.0 * (k1.dp[i] + 2.0 * k2.dp[i] + 2.0 * k3.dp[i] + k4.dp[i]);
    }
    Ok(out)
}

/// Number of steps and the length of the last one for a run to `t_end`.
fn step_plan(t_end: f64, dt: f64) -> (usize, f64) {
    let ratio = t_end / dt;
    let rounded = ratio.round();
    if rounded >= 1.0 && (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        (rounded as usize, dt)
    } else {
        let n = ratio.ceil().max(1.0);
        (n as usize, t_end - (n - 1.0) * dt)
    }
}

/// Classic fixed-step fourth-order Runge-Kutta integration of Hamilton's
/// equations from `t = 0` to `t_end`.
pub fn integrate<const D: usize>(
    h: &Hamiltonian,
    initial: &CanonicalState<D>,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory<D>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    h.check_dimension(D)?;
    let exit = |step: usize| {
        move |e: Error| Error::IntegrationDomainExit {
            step,
            source: Box::new(e),
        }
    };

    let (steps, last_dt) = step_plan(t_end, dt);
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut energies = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(*initial);
    energies.push(h.energy(initial).map_err(exit(0))?);

    let mut state = *initial;
    for k in 1..=steps {
        let this_dt = if k == steps { last_dt } else { dt };
        state = rk4_step(h, &state, this_dt).map_err(exit(k))?;
        if !state.is_finite() {
            return Err(exit(k)(Error::NonFinite("integrated state".into())));
        }
        let t = if k == steps { t_end } else { k as f64 * dt };
        times.push(t);
        energies.push(h.energy(&state).map_err(exit(k))?);
        states.push(state);
    }
    Ok(Trajectory {
        times,
        states,
        energies,
        step: dt,
    })
}

/// `max_t |E(t) - E(0)| / max(|E(0)|, 1e-30)`.
pub fn energy_drift<const D: usize>(traj: &Trajectory<D>) -> f64 {
    let Some(&e0) = traj.energies.first() else {
        return 0.0;
    };
    let scale = e0.abs().max(1e-30);
    traj.energies
        .iter()
        .map(|e| (e - e0).abs() / scale)
        .fold(0.0, f64::max)
}

/// Step-halving error estimate of the endpoint: `max |y(dt) - y(dt/2)| / 15`.
pub fn richardson_error_estimate<const D: usize>(
    h: &Hamiltonian,
    initial: &CanonicalState<D>,
    t_end: f64,
    dt: f64,
) -> Result<f64> {
    let coarse = integrate(h, initial, t_end, dt)?;
    let fine = integrate(h, initial, t_end, 0.5 * dt)?;
    let (_, a) = coarse.last().expect("non-empty trajectory");
    let (_, b) = fine.last().expect("non-empty trajectory");
    let diff =
        a.x.iter()
            .zip(&b.x)
            .chain(a.p.iter().zip(&b.p))
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
    Ok(diff / 15.0)
}
