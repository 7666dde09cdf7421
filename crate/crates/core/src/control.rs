//! Relaxation times and time-optimal protocols.
//!
//! With instantaneous unitaries the squeeze and phase can be set freely at
//! fixed purity, so the fastest way to change the purity is to sit where the
//! dissipative purity rate `v(r, θ) = γμ[1 − (μ/μ_fp) β(r, θ)]` is extremal.
//! Cooling (`μ₀ < μ_fp`) sits at the fixed-point shape, where `β = 1`;
//! heating (`μ₀ > μ_fp`) sits at the most anti-aligned admissible shape
//! `(−r_max, θ_fp)`. On every such branch `β = κ` is constant and the purity
//! follows a logistic law that integrates in closed form:
//!
//! ```text
//! γT = ln[(μ*−μ₀) μ₁ / ((μ*−μ₁) μ₀)],   μ* = μ_fp/κ
//! ```

use serde::{Deserialize, Serialize};

use crate::channel::{params_evolution, ChannelFixedPoint};
use crate::error::{Error, Result};
use crate::gaussian::{params_infidelity, shape_overlap, Displacement, ModeParams};
use crate::roots::{bisect, first_crossing, MAX_ITERATIONS, WIDTH_TOL};

/// Maximum squeeze magnitude available to the controls; rotations and
/// displacements are unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlBudget {
    /// `null` in JSON when unbounded.
    #[serde(with = "unbounded_as_null")]
    pub r_max: f64,
}

mod unbounded_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_some(v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl ControlBudget {
    pub fn new(r_max: f64) -> Result<Self> {
        if r_max.is_nan() || r_max < 0.0 {
            return Err(Error::InvalidInput(format!("r_max must be non-negative, got {r_max}")));
        }
        Ok(Self { r_max })
    }

    pub const fn unbounded() -> Self {
        Self { r_max: f64::INFINITY }
    }

    /// `|r| ≤ r_max` up to roundoff.
    pub fn admits(&self, r: f64) -> bool {
        r.abs() <= self.r_max + 1e-12 * self.r_max.max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Solve the fidelity condition numerically.
    Exact,
    /// Leading-order closed forms in `√ε`.
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub epsilon: f64,
    pub mode: Mode,
}

impl Tolerance {
    pub fn new(epsilon: f64, mode: Mode) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidTolerance(epsilon));
        }
        Ok(Self { epsilon, mode })
    }

    pub fn exact(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, Mode::Exact)
    }

    pub fn asymptotic(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, Mode::Asymptotic)
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.epsilon, self.mode).map(|_| ())
    }
}

/// One step of a control protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Segment {
    /// Zero-duration unitary to squeeze `r_to` and phase `theta_to` at fixed
    /// purity, with the displacement set to `disp_to`.
    InstantUnitary { theta_to: f64, r_to: f64, disp_to: Displacement },
    /// Dissipation with all controls off.
    FreeDecay { duration: f64 },
    /// Dissipation with squeeze and phase held fixed by the controls.
    PinnedDecay { duration: f64, r_pin: f64, theta_pin: f64 },
}

impl Segment {
    pub fn duration(&self) -> f64 {
        match *self {
            Segment::InstantUnitary { .. } => 0.0,
            Segment::FreeDecay { duration } | Segment::PinnedDecay { duration, .. } => duration,
        }
    }

    fn to_fixed_point(fp: &ChannelFixedPoint) -> Self {
        Segment::InstantUnitary {
            theta_to: fp.params.theta,
            r_to: fp.params.r,
            disp_to: Displacement::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub segments: Vec<Segment>,
    pub budget: ControlBudget,
}

impl Protocol {
    /// Checks durations and squeezes against the budget.
    pub fn validate(&self) -> Result<()> {
        for (i, seg) in self.segments.iter().enumerate() {
            let (finite, r) = match *seg {
                Segment::InstantUnitary { theta_to, r_to, disp_to } => {
                    (theta_to.is_finite() && r_to.is_finite() && disp_to.q.is_finite() && disp_to.p.is_finite(), Some(r_to))
                }
                Segment::FreeDecay { duration } => (duration.is_finite(), None),
                Segment::PinnedDecay { duration, r_pin, theta_pin } => {
                    (duration.is_finite() && r_pin.is_finite() && theta_pin.is_finite(), Some(r_pin))
                }
            };
            if !finite {
                return Err(Error::InvalidInput(format!("segment {i} has non-finite entries")));
            }
            if seg.duration() < 0.0 {
                return Err(Error::BudgetViolation(format!("segment {i} has negative duration")));
            }
            if let Some(r) = r {
                if !self.budget.admits(r) {
                    return Err(Error::BudgetViolation(format!(
                        "segment {i} squeezes to {r}, beyond r_max = {}",
                        self.budget.r_max
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sum of the decay durations.
    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(Segment::duration).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub protocol: Protocol,
    pub predicted_time: f64,
    /// State reached after the last segment, in the model the planner uses.
    pub final_params: ModeParams,
    /// Purity at which the decay stops.
    pub mu_stop: f64,
}

fn require_mixed(fp: &ChannelFixedPoint) -> Result<()> {
    if fp.is_pure() {
        return Err(Error::PureFixedPoint { mu_fp: fp.params.mu });
    }
    Ok(())
}

/// Time for the logistic purity law `μ̇ = γμ(1 − μ/μ_star)` to go from `from` to `to`.
pub fn logistic_time(gamma: f64, mu_star: f64, from: f64, to: f64) -> f64 {
    (((mu_star - from) * to) / ((mu_star - to) * from)).ln() / gamma
}

/// Infidelity to the fixed point of the state with the fixed-point shape and purity `mu`.
fn aligned_infidelity(mu: f64, fp: &ChannelFixedPoint) -> f64 {
    params_infidelity(&ModeParams { mu, ..fp.params }, &fp.params)
}

/// Purity on the fixed-point ray at infidelity `ε`, approached from `mu_from`.
fn solve_aligned_stop(mu_from: f64, fp: &ChannelFixedPoint, eps: f64) -> Result<f64> {
    bisect(|mu| aligned_infidelity(mu, fp) - eps, mu_from, fp.params.mu, WIDTH_TOL, MAX_ITERATIONS)
}

/// `μ_fp(1 − 2√ε √(1 − μ_fp²))`.
pub fn asymptotic_cool_stop(mu_fp: f64, eps: f64) -> f64 {
    mu_fp * (1.0 - 2.0 * eps.sqrt() * (1.0 - mu_fp * mu_fp).sqrt())
}

/// `μ_fp(1 + 2√ε √(1 − μ_fp²))`.
pub fn asymptotic_heat_stop(mu_fp: f64, eps: f64) -> f64 {
    mu_fp * (1.0 + 2.0 * eps.sqrt() * (1.0 - mu_fp * mu_fp).sqrt())
}

/// Leading-order free relaxation time,
///
/// ```text
/// γT = ln{ [(1+μ_fp²)(μ₀−μ_fp β₀)² + μ_fp²(1−μ_fp²)(β₀²−1)]^{1/2} / (2μ₀ √ε √(1−μ_fp⁴)) }
/// ```
///
/// clamped at zero where the expansion is meaningless.
pub fn t_free_asymptotic(p0: &ModeParams, fp: &ChannelFixedPoint, eps: f64) -> f64 {
    let (mu0, muf) = (p0.mu, fp.params.mu);
    let b0 = p0.shape_overlap(&fp.params);
    let excess = b0 - 1.0;
    let num = (1.0 + muf * muf) * (mu0 - muf * b0).powi(2)
        + muf * muf * (1.0 - muf * muf) * excess * (b0 + 1.0);
    let den = 2.0 * mu0 * eps.sqrt() * (1.0 - muf.powi(4)).sqrt();
    ((num.sqrt() / den).ln() / fp.gamma()).max(0.0)
}

/// Scan step for the exact free relaxation time, in units of `1/γ`.
const FREE_SCAN_STEP: f64 = 0.02;
const FREE_SCAN_MAX_STEPS: usize = 5_000_000;

/// First time the free trajectory reaches infidelity `ε`.
fn t_free_exact(p0: &ModeParams, fp: &ChannelFixedPoint, eps: f64) -> Result<f64> {
    let f = |t: f64| params_infidelity(&params_evolution(p0, fp, t), &fp.params) - eps;
    if f(0.0) <= 0.0 {
        return Ok(0.0);
    }
    first_crossing(f, 0.0, FREE_SCAN_STEP / fp.gamma(), FREE_SCAN_MAX_STEPS)
}

/// Time for free dissipation to bring `p0` within infidelity `ε` of the fixed point.
pub fn t_free(p0: &ModeParams, fp: &ChannelFixedPoint, tol: &Tolerance) -> Result<f64> {
    tol.validate()?;
    require_mixed(fp)?;
    if params_infidelity(p0, &fp.params) == 0.0 {
        return Ok(0.0);
    }
    match tol.mode {
        Mode::Exact => t_free_exact(p0, fp, tol.epsilon),
        Mode::Asymptotic => Ok(t_free_asymptotic(p0, fp, tol.epsilon)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalKind {
    GlobalMax,
    BoundaryMax,
    BoundaryMin,
    SaddleBranch,
}

/// Stationary or boundary point of the purity rate at fixed purity. Along it
/// the rate is `v(μ) = γμ(1 − κμ/μ_fp)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalPoint {
    pub kind: ExtremalKind,
    pub r: f64,
    pub theta: f64,
    pub kappa: f64,
    /// The unconstrained point lies outside the budget and was moved to its edge.
    pub clipped: bool,
}

impl ExtremalPoint {
    pub fn speed_at(&self, mu: f64, fp: &ChannelFixedPoint) -> f64 {
        fp.gamma() * mu * (1.0 - mu / fp.params.mu * self.kappa)
    }
}

pub fn extremal_points(fp: &ChannelFixedPoint, budget: &ControlBudget) -> Vec<ExtremalPoint> {
    let (rf, thf) = (fp.params.r, fp.params.theta);
    let rm = budget.r_max;
    let mut out = Vec::with_capacity(4);
    let global = if budget.admits(rf) {
        ExtremalPoint { kind: ExtremalKind::GlobalMax, r: rf, theta: thf, kappa: 1.0, clipped: false }
    } else {
        ExtremalPoint {
            kind: ExtremalKind::GlobalMax,
            r: rm,
            theta: thf,
            kappa: (2.0 * (rf - rm)).cosh(),
            clipped: true,
        }
    };
    out.push(global);
    if rm.is_finite() {
        out.push(ExtremalPoint {
            kind: ExtremalKind::BoundaryMax,
            r: rm,
            theta: thf,
            kappa: (2.0 * (rm - rf)).cosh(),
            clipped: false,
        });
        out.push(ExtremalPoint {
            kind: ExtremalKind::BoundaryMin,
            r: -rm,
            theta: thf,
            kappa: (2.0 * (rm + rf)).cosh(),
            clipped: false,
        });
    }
    let sf = (2.0 * rf).sinh();
    let r_branch = 0.5 * ((2.0 * thf).cos() * (2.0 * rf).tanh()).atanh();
    if budget.admits(r_branch) {
        out.push(ExtremalPoint {
            kind: ExtremalKind::SaddleBranch,
            r: r_branch,
            theta: 0.0,
            kappa: (1.0 + ((2.0 * thf).sin() * sf).powi(2)).sqrt(),
            clipped: false,
        });
    }
    out
}

fn zero_duration_plan(fp: &ChannelFixedPoint, budget: &ControlBudget) -> PlanResult {
    PlanResult {
        protocol: Protocol { segments: vec![Segment::to_fixed_point(fp)], budget: *budget },
        predicted_time: 0.0,
        final_params: fp.params,
        mu_stop: fp.params.mu,
    }
}

/// Cooling: rotate and squeeze onto the fixed-point shape, then let the mode
/// decay freely, which keeps the shape stationary.
///
/// If the budget cannot reach the fixed-point squeeze, the mode is held at
/// `(r_max, θ_fp)` instead and the target fidelity is evaluated there; the
/// plan then uses the exact stop purity whatever the mode.
pub fn plan_cooling(
    p0: &ModeParams,
    fp: &ChannelFixedPoint,
    tol: &Tolerance,
    budget: &ControlBudget,
) -> Result<PlanResult> {
    tol.validate()?;
    require_mixed(fp)?;
    let (mu0, muf) = (p0.mu, fp.params.mu);
    if mu0 == muf && budget.admits(fp.params.r) {
        return Ok(zero_duration_plan(fp, budget));
    }
    if mu0 >= muf {
        return Err(Error::WrongDirection(format!(
            "cooling needs mu0 < mu_fp, got mu0 = {mu0}, mu_fp = {muf}"
        )));
    }
    if !budget.admits(fp.params.r) {
        return plan_clipped_cooling(p0, fp, tol, budget);
    }
    let eps = tol.epsilon;
    let mu_stop = match tol.mode {
        Mode::Exact if aligned_infidelity(mu0, fp) <= eps => mu0,
        Mode::Exact => solve_aligned_stop(mu0, fp, eps)?,
        Mode::Asymptotic => asymptotic_cool_stop(muf, eps).max(mu0),
    };
    let t = logistic_time(fp.gamma(), muf, mu0, mu_stop).max(0.0);
    Ok(PlanResult {
        protocol: Protocol {
            segments: vec![Segment::to_fixed_point(fp), Segment::FreeDecay { duration: t }],
            budget: *budget,
        },
        predicted_time: t,
        final_params: ModeParams { mu: mu_stop, ..fp.params },
        mu_stop,
    })
}

fn plan_clipped_cooling(
    p0: &ModeParams,
    fp: &ChannelFixedPoint,
    tol: &Tolerance,
    budget: &ControlBudget,
) -> Result<PlanResult> {
    let (mu0, muf, thf) = (p0.mu, fp.params.mu, fp.params.theta);
    let rm = budget.r_max;
    let mu_star = muf / (2.0 * (fp.params.r - rm)).cosh();
    let infid = |mu: f64| params_infidelity(&ModeParams { mu, r: rm, theta: thf }, &fp.params) - tol.epsilon;
    let mu_stop = if infid(mu0) <= 0.0 {
        mu0
    } else {
        if mu0 >= mu_star {
            return Err(Error::BudgetTooSmall(format!(
                "r_max = {rm} holds the purity below {mu_star}, under mu0 = {mu0}"
            )));
        }
        let steps = 4000;
        let top = mu_star * (1.0 - 1e-12);
        first_crossing(infid, mu0, (top - mu0) / steps as f64, steps).map_err(|_| {
            Error::BudgetTooSmall(format!(
                "fidelity 1 - {} is out of reach with r_max = {rm} < r_fp = {}",
                tol.epsilon, fp.params.r
            ))
        })?
    };
    let t = logistic_time(fp.gamma(), mu_star, mu0, mu_stop).max(0.0);
    Ok(PlanResult {
        protocol: Protocol {
            segments: vec![
                Segment::InstantUnitary { theta_to: thf, r_to: rm, disp_to: Displacement::zero() },
                Segment::PinnedDecay { duration: t, r_pin: rm, theta_pin: thf },
            ],
            budget: *budget,
        },
        predicted_time: t,
        final_params: ModeParams { mu: mu_stop, r: rm, theta: thf },
        mu_stop,
    })
}

/// Heating time in the limit `ε → 0`: `γT = ln[(μ₀c − μ_fp)/(μ₀(c − 1))]`,
/// `c = cosh 2(r_max + r_fp)`.
pub fn heating_time_limit(mu0: f64, fp: &ChannelFixedPoint, r_max: f64) -> f64 {
    let c = (2.0 * (r_max + fp.params.r)).cosh();
    ((mu0 * c - fp.params.mu) / (mu0 * (c - 1.0))).ln() / fp.gamma()
}

/// Heating: squeeze to `−r_max` along the fixed-point axis, hold the shape
/// while the purity drops, then squeeze onto the fixed-point shape. The
/// fidelity target applies to the state after the last unitary.
pub fn plan_heating(
    p0: &ModeParams,
    fp: &ChannelFixedPoint,
    tol: &Tolerance,
    budget: &ControlBudget,
) -> Result<PlanResult> {
    tol.validate()?;
    require_mixed(fp)?;
    let (mu0, muf, rf, thf) = (p0.mu, fp.params.mu, fp.params.r, fp.params.theta);
    if !budget.admits(rf) {
        return Err(Error::BudgetTooSmall(format!("r_max = {} below r_fp = {rf}", budget.r_max)));
    }
    if mu0 == muf {
        return Ok(zero_duration_plan(fp, budget));
    }
    if mu0 <= muf {
        return Err(Error::WrongDirection(format!(
            "heating needs mu0 > mu_fp, got mu0 = {mu0}, mu_fp = {muf}"
        )));
    }
    let rm = budget.r_max;
    if rm <= 0.0 || !rm.is_finite() {
        return Err(Error::BudgetTooSmall(format!("heating needs a finite r_max > 0, got {rm}")));
    }
    let eps = tol.epsilon;
    let mu_stop = match tol.mode {
        Mode::Exact if aligned_infidelity(mu0, fp) <= eps => mu0,
        Mode::Exact => solve_aligned_stop(mu0, fp, eps)?,
        Mode::Asymptotic => asymptotic_heat_stop(muf, eps).min(mu0),
    };
    let kappa = (2.0 * (rm + rf)).cosh();
    let mu_star = muf / kappa;
    // the pinned rate γμ(1 − κμ/μ_fp) must stay negative on [μ_stop, μ₀]
    if mu_stop <= mu_star {
        return Err(Error::BudgetTooSmall(format!(
            "pinned decay at r = -{rm} does not lower the purity below {mu_stop}"
        )));
    }
    let t = logistic_time(fp.gamma(), mu_star, mu0, mu_stop).max(0.0);
    Ok(PlanResult {
        protocol: Protocol {
            segments: vec![
                Segment::InstantUnitary { theta_to: thf, r_to: -rm, disp_to: Displacement::zero() },
                Segment::PinnedDecay { duration: t, r_pin: -rm, theta_pin: thf },
                Segment::to_fixed_point(fp),
            ],
            budget: *budget,
        },
        predicted_time: t,
        final_params: ModeParams { mu: mu_stop, ..fp.params },
        mu_stop,
    })
}

/// Shapes where a state of purity `mu` can be held stationary by the controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StoppingSet {
    pub mu: f64,
    pub fp: ModeParams,
}

/// Point of a stopping set; `r` may be negative (a squeeze along `θ + π/2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopPoint {
    pub r: f64,
    pub theta: f64,
}

impl StoppingSet {
    /// Solutions on the fixed-point axis, `r = r_fp ± arccosh(μ_fp/μ)/2`.
    pub fn canonical(&self) -> Vec<StopPoint> {
        let half = 0.5 * (self.fp.mu / self.mu).max(1.0).acosh();
        let mut pts = vec![StopPoint { r: self.fp.r + half, theta: self.fp.theta }];
        if half > 0.0 {
            pts.push(StopPoint { r: self.fp.r - half, theta: self.fp.theta });
        }
        pts
    }

    /// Squeezes `r` at phase `theta` with `β(r, θ) = μ_fp/μ`: with
    /// `C = cosh 2r_fp`, `S = sinh 2r_fp cos 2(θ−θ_fp)`,
    /// `2r = artanh(S/C) ± arccosh((μ_fp/μ)/√(C²−S²))`. Empty where no real
    /// solution exists.
    pub fn r_at(&self, theta: f64) -> Vec<f64> {
        let k = self.fp.mu / self.mu;
        let c = (2.0 * self.fp.r).cosh();
        let s = (2.0 * self.fp.r).sinh() * (2.0 * (theta - self.fp.theta)).cos();
        let norm = ((c - s) * (c + s)).sqrt();
        let ratio = k / norm;
        if ratio < 1.0 {
            return Vec::new();
        }
        let centre = (s / c).atanh();
        let half = ratio.acosh();
        if half == 0.0 {
            return vec![0.5 * centre];
        }
        vec![0.5 * (centre - half), 0.5 * (centre + half)]
    }

    /// `r_at` on `n` equally spaced phases in `[0, π)`.
    pub fn sample(&self, n: usize) -> Vec<(f64, Vec<f64>)> {
        (0..n)
            .map(|i| {
                let th = std::f64::consts::PI * i as f64 / n as f64;
                (th, self.r_at(th))
            })
            .collect()
    }
}

pub fn stopping_set(fp: &ChannelFixedPoint, mu: f64) -> Result<StoppingSet> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::InvalidParams(format!("purity must lie in (0, 1], got {mu}")));
    }
    if mu > fp.params.mu {
        return Err(Error::Infeasible(format!(
            "purity {mu} above mu_fp = {} decreases at every shape",
            fp.params.mu
        )));
    }
    Ok(StoppingSet { mu, fp: fp.params })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PureTimes {
    pub t_free_pure: f64,
    pub mu_stop: f64,
    pub t_cool_pure: f64,
}

/// Free and optimal cooling times towards a pure fixed point. Asymptotic mode
/// uses `γT_free = ln[2μ₀/((β₀−μ₀)ε)]`, `μ_stop = 1 − 2ε` and
/// `γT_cool = ln[(1−μ₀)/(2μ₀ε)]`; exact mode solves the fidelity conditions.
pub fn pure_fp_times(p0: &ModeParams, fp: &ChannelFixedPoint, tol: &Tolerance) -> Result<PureTimes> {
    tol.validate()?;
    if !fp.is_pure() {
        return Err(Error::InvalidInput(format!("fixed point is mixed (mu_fp = {})", fp.params.mu)));
    }
    let mu0 = p0.mu;
    if mu0 >= 1.0 {
        return Err(Error::WrongDirection("a pure initial state cannot be cooled further".into()));
    }
    let (g, eps) = (fp.gamma(), tol.epsilon);
    match tol.mode {
        Mode::Asymptotic => {
            let b0 = p0.shape_overlap(&fp.params);
            Ok(PureTimes {
                t_free_pure: (2.0 * mu0 / ((b0 - mu0) * eps)).ln() / g,
                mu_stop: 1.0 - 2.0 * eps,
                t_cool_pure: ((1.0 - mu0) / (2.0 * mu0 * eps)).ln() / g,
            })
        }
        Mode::Exact => {
            let mu_stop = if aligned_infidelity(mu0, fp) <= eps { mu0 } else { solve_aligned_stop(mu0, fp, eps)? };
            Ok(PureTimes {
                t_free_pure: t_free_exact(p0, fp, eps)?,
                mu_stop,
                t_cool_pure: logistic_time(g, fp.params.mu, mu0, mu_stop).max(0.0),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCase {
    pub t_free_max: f64,
    pub t_fast_max: f64,
    pub gain: f64,
    /// Inputs are far from the `μ₀/μ_fp → 0`, `|r₀| → ∞`, `ε → 0` limit the
    /// expressions describe.
    pub weak_regime: bool,
}

/// Longest free and controlled relaxation times, with `L = |ln(μ₀√ε/μ_fp)|`:
/// `γT_free = L + 2|r₀|`, `γT_fast = L`, gain `1 + 2|r₀|/L`.
pub fn worst_case(fp: &ChannelFixedPoint, tol: &Tolerance, r0: f64, mu_ratio: f64) -> Result<WorstCase> {
    tol.validate()?;
    if !(mu_ratio > 0.0 && mu_ratio.is_finite()) || !r0.is_finite() {
        return Err(Error::InvalidInput(format!("need finite r0 and mu_ratio > 0, got {r0}, {mu_ratio}")));
    }
    let l = (mu_ratio * tol.epsilon.sqrt()).ln().abs();
    let g = fp.gamma();
    Ok(WorstCase {
        t_free_max: (l + 2.0 * r0.abs()) / g,
        t_fast_max: l / g,
        gain: 1.0 + 2.0 * r0.abs() / l,
        weak_regime: mu_ratio > 1e-2 || tol.epsilon > 1e-3 || r0.abs() < 3.0,
    })
}

/// `β(r, θ)` against the fixed point; the purity rate is `γμ(1 − μβ/μ_fp)`.
pub fn overlap_with_fp(r: f64, theta: f64, fp: &ChannelFixedPoint) -> f64 {
    shape_overlap(r, theta, fp.params.r, fp.params.theta)
}
