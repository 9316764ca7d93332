//! Planar double-pendulum dynamics: angular accelerations, a fixed-step
//! RK4 integrator with per-step velocity damping, bob positions, and total
//! mechanical energy.
//!
//! Angles are measured from the downward vertical; the y axis points along
//! gravity, so a hanging bob has positive y. Angles are never wrapped during
//! integration — they accumulate freely and are reduced modulo 2π only when
//! bits are extracted from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical configuration of the two-link pendulum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumParams {
    /// Mass of the inner bob (kg). Must be positive.
    pub m1: f64,
    /// Mass of the outer bob (kg). May be zero (single-pendulum limit).
    pub m2: f64,
    /// Inner link length (m).
    pub l1: f64,
    /// Outer link length (m).
    pub l2: f64,
    /// Gravitational acceleration (m/s²).
    pub g: f64,
    /// Per-step damping coefficient in (0, 1]; both angular velocities are
    /// multiplied by `d` once per integration step. 1.0 is frictionless.
    /// Note the multiplier acts on velocity, so kinetic energy scales by d²
    /// per step.
    pub d: f64,
}

impl Default for PendulumParams {
    fn default() -> Self {
        Self {
            m1: 1.0,
            m2: 1.0,
            l1: 1.0,
            l2: 1.0,
            g: 9.81,
            d: 1.0,
        }
    }
}

impl PendulumParams {
    /// Checks the parameter domain: m1 > 0, m2 ≥ 0, l1 > 0, l2 > 0, g > 0,
    /// 0 < d ≤ 1, all finite.
    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.m1, self.m2, self.l1, self.l2, self.g, self.d]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParam("pendulum parameters must be finite".into()));
        }
        if self.m1 <= 0.0 {
            return Err(Error::InvalidParam(format!("m1 must be > 0, got {}", self.m1)));
        }
        if self.m2 < 0.0 {
            return Err(Error::InvalidParam(format!("m2 must be >= 0, got {}", self.m2)));
        }
        if self.l1 <= 0.0 || self.l2 <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "link lengths must be > 0, got l1={}, l2={}",
                self.l1, self.l2
            )));
        }
        if self.g <= 0.0 {
            return Err(Error::InvalidParam(format!("g must be > 0, got {}", self.g)));
        }
        if self.d <= 0.0 || self.d > 1.0 {
            return Err(Error::InvalidParam(format!("d must be in (0, 1], got {}", self.d)));
        }
        Ok(())
    }
}

/// Instantaneous dynamical state: two angles (rad, from downward vertical)
/// and their time derivatives (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumState {
    pub theta1: f64,
    pub theta2: f64,
    pub omega1: f64,
    pub omega2: f64,
}

impl PendulumState {
    pub fn new(theta1: f64, theta2: f64, omega1: f64, omega2: f64) -> Self {
        Self { theta1, theta2, omega1, omega2 }
    }

    /// State with both angular velocities zero.
    pub fn at_rest(theta1: f64, theta2: f64) -> Self {
        Self::new(theta1, theta2, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.theta1.is_finite()
            && self.theta2.is_finite()
            && self.omega1.is_finite()
            && self.omega2.is_finite()
    }
}

/// Angular accelerations (θ1'', θ2'') of the coupled system.
///
/// The shared denominator factor 2m1 + m2 − m2·cos(2θ1 − 2θ2) equals
/// 2m1 + 2m2·sin²(θ1 − θ2) ≥ 2m1 > 0, so the expressions are total on the
/// valid parameter domain.
#[inline]
pub fn angular_accelerations(p: &PendulumParams, s: &PendulumState) -> (f64, f64) {
    let (sin1, cos1) = s.theta1.sin_cos();
    let (sin2, cos2) = s.theta2.sin_cos();
    let (sin12, cos12) = (s.theta1 - s.theta2).sin_cos();
    // sin(θ1 − 2θ2) = sin((θ1 − θ2) − θ2)
    let sin1m2t2 = sin12 * cos2 - cos12 * sin2;
    // 2m1 + m2 − m2·cos(2(θ1 − θ2)) = 2m1 + 2m2·sin²(θ1 − θ2)
    let den = 2.0 * p.m1 + 2.0 * p.m2 * sin12 * sin12;

    let w1sq = s.omega1 * s.omega1;
    let w2sq = s.omega2 * s.omega2;

    let num1 = -p.g * (2.0 * p.m1 + p.m2) * sin1
        - p.m2 * p.g * sin1m2t2
        - 2.0 * sin12 * p.m2 * (w2sq * p.l2 + w1sq * p.l1 * cos12);
    let alpha1 = num1 / (p.l1 * den);

    let msum = p.m1 + p.m2;
    let num2 = 2.0 * sin12 * (w1sq * p.l1 * msum + p.g * msum * cos1 + w2sq * p.l2 * p.m2 * cos12);
    let alpha2 = num2 / (p.l2 * den);

    (alpha1, alpha2)
}

#[inline]
fn derivative(p: &PendulumParams, s: &PendulumState) -> [f64; 4] {
    let (a1, a2) = angular_accelerations(p, s);
    [s.omega1, s.omega2, a1, a2]
}

#[inline]
fn offset(s: &PendulumState, k: &[f64; 4], scale: f64) -> PendulumState {
    PendulumState {
        theta1: s.theta1 + scale * k[0],
        theta2: s.theta2 + scale * k[1],
        omega1: s.omega1 + scale * k[2],
        omega2: s.omega2 + scale * k[3],
    }
}

/// One classical 4th-order Runge–Kutta step of width `h`, without damping
/// or finiteness checks.
#[inline]
pub fn rk4_step(p: &PendulumParams, s: &PendulumState, h: f64) -> PendulumState {
    let k1 = derivative(p, s);
    let k2 = derivative(p, &offset(s, &k1, 0.5 * h));
    let k3 = derivative(p, &offset(s, &k2, 0.5 * h));
    let k4 = derivative(p, &offset(s, &k3, h));
    let w = h / 6.0;
    PendulumState {
        theta1: s.theta1 + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        theta2: s.theta2 + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        omega1: s.omega1 + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        omega2: s.omega2 + w * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    }
}

/// The damping substep: both angular velocities scaled by `p.d`.
#[inline]
pub fn damp(p: &PendulumParams, s: &PendulumState) -> PendulumState {
    PendulumState {
        theta1: s.theta1,
        theta2: s.theta2,
        omega1: s.omega1 * p.d,
        omega2: s.omega2 * p.d,
    }
}

/// One full integration step: RK4 of width `h` followed by the damping
/// substep. With h = 0 and d = 1 the input state is returned exactly.
///
/// Fails with [`Error::NonFiniteState`] if the result contains NaN or
/// infinity, which callers treat as a fatal misconfiguration.
pub fn step(p: &PendulumParams, s: &PendulumState, h: f64) -> Result<PendulumState> {
    let next = damp(p, &rk4_step(p, s, h));
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::NonFiniteState)
    }
}

/// Cartesian bob positions ((x1, y1), (x2, y2)) with the pivot at the origin
/// and y measured along gravity (a hanging bob has y > 0).
pub fn positions(p: &PendulumParams, s: &PendulumState) -> ((f64, f64), (f64, f64)) {
    let x1 = p.l1 * s.theta1.sin();
    let y1 = p.l1 * s.theta1.cos();
    let x2 = x1 + p.l2 * s.theta2.sin();
    let y2 = y1 + p.l2 * s.theta2.cos();
    ((x1, y1), (x2, y2))
}

/// Total mechanical energy E = KE + PE (joules).
///
/// PE = −g·((m1+m2)·l1·cos θ1 + m2·l2·cos θ2) with the pivot as reference;
/// KE from the bob velocities implied by (θ, ω).
pub fn total_energy(p: &PendulumParams, s: &PendulumState) -> f64 {
    let (sin1, cos1) = s.theta1.sin_cos();
    let (sin2, cos2) = s.theta2.sin_cos();

    let v1x = p.l1 * s.omega1 * cos1;
    let v1y = -p.l1 * s.omega1 * sin1;
    let v2x = v1x + p.l2 * s.omega2 * cos2;
    let v2y = v1y - p.l2 * s.omega2 * sin2;

    let ke = 0.5 * p.m1 * (v1x * v1x + v1y * v1y) + 0.5 * p.m2 * (v2x * v2x + v2y * v2y);
    let pe = -p.g * ((p.m1 + p.m2) * p.l1 * cos1 + p.m2 * p.l2 * cos2);
    ke + pe
}
