//! Numerical ground truth: fixed-step integration of the covariance flow
//! `σ̇ = γ(σ_fp − σ)`, `ḋ = −(γ/2) d`, replay of control protocols, and a
//! greedy baseline that picks the fastest admissible shape on a grid.
//!
//! Nothing here uses the closed-form evolution; results are compared against
//! it in the tests.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelFixedPoint;
use crate::control::{ControlBudget, Protocol, Segment, Tolerance};
use crate::error::{Error, Result};
use crate::gaussian::{
    cm_from_params, fidelity, params_from_cm, shape_overlap, unitary_to, CovMatrix, Displacement,
    GaussianState, ModeParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub method: Method,
    pub max_steps: u64,
    pub record_every: u64,
}

impl IntegratorConfig {
    /// `dt = 10⁻⁴/γ`, RK4, at most 10⁷ steps, every 100th step recorded.
    pub fn default_for(gamma: f64) -> Self {
        Self { dt: 1e-4 / gamma, method: Method::Rk4, max_steps: 10_000_000, record_every: 100 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidInput(format!("dt must be positive, got {}", self.dt)));
        }
        if self.max_steps == 0 || self.record_every == 0 {
            return Err(Error::InvalidInput("max_steps and record_every must be positive".into()));
        }
        Ok(())
    }

    /// Step count for `t_end`, the last step being shortened.
    fn steps_for(&self, t_end: f64) -> Result<u64> {
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidInput(format!("duration must be finite and non-negative, got {t_end}")));
        }
        let ratio = t_end / self.dt;
        let mut n = ratio.ceil();
        // absorb t_end = k·dt up to roundoff
        if n - ratio > 1.0 - 1e-9 {
            n -= 1.0;
        }
        if n > self.max_steps as f64 {
            return Err(Error::StepLimitExceeded { needed: n as u64, max_steps: self.max_steps });
        }
        Ok(n as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub params: ModeParams,
    pub cov: CovMatrix,
    pub disp: Displacement,
    pub fidelity_to_target: f64,
}

/// Recorded samples in time order. Instantaneous unitaries appear as two
/// samples sharing a time stamp.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Trace {
    pub samples: Vec<Sample>,
}

impl Trace {
    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn final_state(&self) -> Option<GaussianState> {
        self.last().map(|s| GaussianState { cov: s.cov, disp: s.disp })
    }
}

fn target_state(fp: &ChannelFixedPoint) -> GaussianState {
    GaussianState { cov: fp.cov, disp: Displacement::zero() }
}

fn sample(t: f64, state: &GaussianState, fp: &ChannelFixedPoint) -> Result<Sample> {
    Ok(Sample {
        t,
        params: params_from_cm(&state.cov)?,
        cov: state.cov,
        disp: state.disp,
        fidelity_to_target: fidelity(state, &target_state(fp))?,
    })
}

/// Right-hand side of the free flow on `(σ_xx, σ_xy, σ_yy, d_q, d_p)`.
fn free_rhs(y: &[f64; 5], fp: &ChannelFixedPoint) -> [f64; 5] {
    let g = fp.gamma();
    [
        g * (fp.cov.xx - y[0]),
        g * (fp.cov.xy - y[1]),
        g * (fp.cov.yy - y[2]),
        -0.5 * g * y[3],
        -0.5 * g * y[4],
    ]
}

fn step<const N: usize, F>(y: &[f64; N], h: f64, method: Method, f: F) -> [f64; N]
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let axpy = |a: &[f64; N], k: &[f64; N], s: f64| -> [f64; N] {
        let mut out = *a;
        for i in 0..N {
            out[i] += s * k[i];
        }
        out
    };
    match method {
        Method::Euler => axpy(y, &f(y), h),
        Method::Rk4 => {
            let k1 = f(y);
            let k2 = f(&axpy(y, &k1, 0.5 * h));
            let k3 = f(&axpy(y, &k2, 0.5 * h));
            let k4 = f(&axpy(y, &k3, h));
            let mut out = *y;
            for i in 0..N {
                out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            out
        }
    }
}

/// Step sizes covering `[0, t_end]` with the last one shortened.
fn step_grid(cfg: &IntegratorConfig, t_end: f64) -> Result<impl Iterator<Item = (u64, f64, f64)>> {
    let n = cfg.steps_for(t_end)?;
    let dt = cfg.dt;
    Ok((1..=n).map(move |k| {
        let t_prev = (k - 1) as f64 * dt;
        let t = if k == n { t_end } else { k as f64 * dt };
        (k, t, t - t_prev)
    }))
}

fn integrate_free_from(
    s0: &GaussianState,
    fp: &ChannelFixedPoint,
    t_offset: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trace> {
    cfg.validate()?;
    let grid = step_grid(cfg, t_end)?;
    let n = cfg.steps_for(t_end)?;
    let mut y = [s0.cov.xx, s0.cov.xy, s0.cov.yy, s0.disp.q, s0.disp.p];
    let mut trace = Trace { samples: vec![sample(t_offset, s0, fp)?] };
    for (k, t, h) in grid {
        y = step(&y, h, cfg.method, |v| free_rhs(v, fp));
        if k % cfg.record_every == 0 || k == n {
            let state = GaussianState {
                cov: CovMatrix { xx: y[0], xy: y[1], yy: y[2] },
                disp: Displacement { q: y[3], p: y[4] },
            };
            trace.samples.push(sample(t_offset + t, &state, fp)?);
        }
    }
    Ok(trace)
}

/// Free dissipation of the covariance matrix and displacement.
pub fn integrate_free(
    s0: &GaussianState,
    fp: &ChannelFixedPoint,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trace> {
    integrate_free_from(s0, fp, 0.0, t_end, cfg)
}

/// Purity rate with the shape held at overlap `beta` with the fixed point.
fn pinned_rhs(mu: f64, beta: f64, fp: &ChannelFixedPoint) -> f64 {
    fp.gamma() * mu * (1.0 - mu / fp.params.mu * beta)
}

fn pinned_step(mu: f64, h: f64, beta: f64, fp: &ChannelFixedPoint, method: Method) -> f64 {
    step(&[mu], h, method, |v| [pinned_rhs(v[0], beta, fp)])[0]
}

/// Shape held fixed during a pinned segment.
#[derive(Debug, Clone, Copy)]
struct Pin {
    r: f64,
    theta: f64,
}

fn integrate_pinned_from(
    mu0: f64,
    disp0: Displacement,
    fp: &ChannelFixedPoint,
    pin: Pin,
    t_offset: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trace> {
    let Pin { r: r_pin, theta: theta_pin } = pin;
    cfg.validate()?;
    let n = cfg.steps_for(t_end)?;
    let beta = shape_overlap(r_pin, theta_pin, fp.params.r, fp.params.theta);
    let state_at = |mu: f64, t: f64| -> Result<GaussianState> {
        let p = ModeParams::new(mu, r_pin, theta_pin)?;
        Ok(GaussianState::from_params(&p, disp0.scale((-0.5 * fp.gamma() * t).exp())))
    };
    let mut mu = mu0;
    let mut trace = Trace { samples: vec![pinned_sample(t_offset, &state_at(mu, 0.0)?, mu, r_pin, theta_pin, fp)?] };
    for (k, t, h) in step_grid(cfg, t_end)? {
        mu = pinned_step(mu, h, beta, fp, cfg.method);
        if k % cfg.record_every == 0 || k == n {
            trace.samples.push(pinned_sample(t_offset + t, &state_at(mu, t)?, mu, r_pin, theta_pin, fp)?);
        }
    }
    Ok(trace)
}

/// Samples along a pinned segment keep the literal pin rather than the
/// canonical decomposition.
fn pinned_sample(t: f64, state: &GaussianState, mu: f64, r: f64, theta: f64, fp: &ChannelFixedPoint) -> Result<Sample> {
    Ok(Sample {
        t,
        params: ModeParams { mu, r, theta },
        cov: state.cov,
        disp: state.disp,
        fidelity_to_target: fidelity(state, &target_state(fp))?,
    })
}

/// Dissipation with the squeeze and phase held at `(r_pin, θ_pin)`: only the
/// purity moves, at the rate the free flow gives at that shape.
pub fn integrate_pinned(
    p0: &ModeParams,
    fp: &ChannelFixedPoint,
    r_pin: f64,
    theta_pin: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trace> {
    integrate_pinned_from(p0.mu, Displacement::zero(), fp, Pin { r: r_pin, theta: theta_pin }, 0.0, t_end, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimOutcome {
    pub trace: Trace,
    pub elapsed: f64,
    pub final_fidelity: f64,
    pub final_state: GaussianState,
}

fn append(trace: &mut Trace, seg: Trace) {
    // the first sample repeats the current state
    trace.samples.extend(seg.samples.into_iter().skip(1));
}

/// Replays a protocol: unitaries act instantly, decays take their durations.
/// A pinned segment first moves the state onto its pin.
pub fn simulate_protocol(
    s0: &GaussianState,
    fp: &ChannelFixedPoint,
    proto: &Protocol,
    cfg: &IntegratorConfig,
) -> Result<SimOutcome> {
    proto.validate()?;
    cfg.validate()?;
    let mut state = GaussianState::new(s0.cov, s0.disp)?;
    let mut t = 0.0;
    let mut trace = Trace { samples: vec![sample(0.0, &state, fp)?] };
    for seg in &proto.segments {
        match *seg {
            Segment::InstantUnitary { theta_to, r_to, disp_to } => {
                state = unitary_to(&state, r_to, theta_to, disp_to)?;
                trace.samples.push(sample(t, &state, fp)?);
            }
            Segment::FreeDecay { duration } => {
                let seg_trace = integrate_free_from(&state, fp, t, duration, cfg)?;
                state = seg_trace.final_state().expect("trace is never empty");
                append(&mut trace, seg_trace);
                t += duration;
            }
            Segment::PinnedDecay { duration, r_pin, theta_pin } => {
                let current = params_from_cm(&state.cov)?;
                if state.cov.max_abs_diff(&cm_from_params(&ModeParams { mu: current.mu, r: r_pin, theta: theta_pin })) > 1e-12 {
                    state = unitary_to(&state, r_pin, theta_pin, state.disp)?;
                    trace.samples.push(sample(t, &state, fp)?);
                }
                let seg_trace =
                    integrate_pinned_from(current.mu, state.disp, fp, Pin { r: r_pin, theta: theta_pin }, t, duration, cfg)?;
                state = seg_trace.final_state().expect("trace is never empty");
                append(&mut trace, seg_trace);
                t += duration;
            }
        }
    }
    let final_fidelity = fidelity(&state, &target_state(fp))?;
    Ok(SimOutcome { trace, elapsed: t, final_fidelity, final_state: state })
}

const GREEDY_R_POINTS: usize = 400;
const GREEDY_THETA_POINTS: usize = 360;

/// Grid shape with the smallest (cooling) or largest (heating) overlap with
/// the fixed point. The purity rate `γμ(1 − μβ/μ_fp)` is extremal where `β`
/// is, whatever the purity, so one search serves every step.
pub fn greedy_shape(fp: &ChannelFixedPoint, budget: &ControlBudget, cooling: bool) -> Result<(f64, f64)> {
    let rm = budget.r_max;
    if !rm.is_finite() {
        return Err(Error::InvalidInput("the greedy search needs a finite r_max".into()));
    }
    let mut rs: Vec<f64> = (0..GREEDY_R_POINTS)
        .map(|i| -rm + 2.0 * rm * i as f64 / (GREEDY_R_POINTS - 1) as f64)
        .collect();
    if budget.admits(fp.params.r) {
        rs.push(fp.params.r);
    }
    let mut thetas: Vec<f64> = (0..GREEDY_THETA_POINTS).map(|j| PI * j as f64 / GREEDY_THETA_POINTS as f64).collect();
    thetas.push(fp.params.theta);
    let mut best = (f64::NAN, 0.0, 0.0);
    for &r in &rs {
        for &th in &thetas {
            let b = shape_overlap(r, th, fp.params.r, fp.params.theta);
            let better = best.0.is_nan() || if cooling { b < best.0 } else { b > best.0 };
            if better {
                best = (b, r, th);
            }
        }
    }
    Ok((best.1, best.2))
}

/// Greedy baseline: hold the shape that moves the purity fastest towards
/// `μ_fp`, and stop at the first time the state, moved onto the fixed-point
/// shape, is within infidelity `ε`.
pub fn greedy_min_time(
    p0: &ModeParams,
    fp: &ChannelFixedPoint,
    tol: &Tolerance,
    budget: &ControlBudget,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    cfg.validate()?;
    let muf = fp.params.mu;
    if p0.mu == muf {
        return Err(Error::InvalidInput("initial purity equals the fixed-point purity".into()));
    }
    let cooling = p0.mu < muf;
    let (r, th) = greedy_shape(fp, budget, cooling)?;
    let beta = shape_overlap(r, th, fp.params.r, fp.params.theta);
    let target = target_state(fp);
    let gap = |mu: f64| -> Result<f64> {
        let s = GaussianState::from_params(&ModeParams { mu, ..fp.params }, Displacement::zero());
        Ok(1.0 - fidelity(&s, &target)? - tol.epsilon)
    };
    let mut mu = p0.mu;
    if gap(mu)? <= 0.0 {
        return Ok(0.0);
    }
    for k in 1..=cfg.max_steps {
        let next = pinned_step(mu, cfg.dt, beta, fp, cfg.method);
        if gap(next)? <= 0.0 {
            let (mut lo, mut hi) = (0.0, cfg.dt);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if gap(pinned_step(mu, mid, beta, fp, cfg.method))? <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= 1e-15 * cfg.dt.max(1.0) {
                    break;
                }
            }
            return Ok((k - 1) as f64 * cfg.dt + hi);
        }
        mu = next;
    }
    Err(Error::StepLimitExceeded { needed: cfg.max_steps + 1, max_steps: cfg.max_steps })
}
