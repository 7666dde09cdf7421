//! Free trajectories with time eliminated: purity as a function of the
//! squeeze, and purity, squeeze and time as functions of the phase.

use std::f64::consts::PI;

use serde::Serialize;

use crate::channel::ChannelFixedPoint;
use crate::error::{Error, Result};
use crate::gaussian::ModeParams;

/// Below this the trajectory is treated as sitting at one squeeze value.
const FLAT_TOL: f64 = 1e-13;

/// Slack on the ends of the swept squeeze interval.
const ENDPOINT_TOL: f64 = 1e-12;

/// Constants of the purity–squeeze curve
/// `μ/μ_fp = (a₁ cosh 2r ± a₂ √(a₃ sinh² 2r − a₄)) / a₅`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
}

impl CurveConstants {
    pub fn new(p0: &ModeParams, fp: &ModeParams) -> Self {
        let rho = p0.mu / fp.mu;
        let (s0, c0) = ((2.0 * p0.r).sinh(), (2.0 * p0.r).cosh());
        let (sf, cf) = ((2.0 * fp.r).sinh(), (2.0 * fp.r).cosh());
        let dth = p0.theta - fp.theta;
        let cos_rel = (2.0 * dth).cos();
        let beta = p0.shape_overlap(fp);
        let a1 = s0 * (s0 * cf - cos_rel * c0 * sf) + rho * sf * (c0 * sf - cos_rel * s0 * cf);
        let a2 = c0 - rho * cf;
        let a3 = (beta - 1.0) * (beta + 1.0);
        let a4 = ((2.0 * dth).sin() * s0 * sf).powi(2);
        let a5 = (2.0 * (p0.r - fp.r)).sinh().powi(2)
            + dth.sin().powi(2) * (4.0 * p0.r).sinh() * (4.0 * fp.r).sinh();
        Self { a1, a2, a3, a4, a5 }
    }
}

/// A point of the free trajectory at a given squeeze.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub mu: f64,
    /// Time at which the trajectory passes the point; infinite at the fixed point.
    pub t: f64,
}

/// Weight `e^{−γt}` of the initial state in a CM that mixes the initial state
/// and the fixed point, recovered from its purity and `cosh 2r`; `None` if the
/// point is not on the forward trajectory.
fn weight_on_trajectory(p0: &ModeParams, fp: &ModeParams, mu: f64, c: f64) -> Option<f64> {
    let (c0, cf) = ((2.0 * p0.r).cosh(), (2.0 * fp.r).cosh());
    // cosh 2r/μ = e cosh 2r₀/μ₀ + (1−e) cosh 2r_fp/μ_fp; with p = μe/μ₀ and
    // q = μ(1−e)/μ_fp this reads μ = pμ₀ + qμ_fp, cosh 2r = p c₀ + q c_fp
    let det = p0.mu * cf - fp.mu * c0;
    let scale = p0.mu * cf + fp.mu * c0;
    if det.abs() > 1e-12 * scale {
        let p = (mu * cf - fp.mu * c) / det;
        let q = (p0.mu * c - c0 * mu) / det;
        if p < -1e-12 || q < -1e-12 {
            return None;
        }
        return Some((p.max(0.0) * p0.mu / mu).clamp(0.0, 1.0));
    }
    // purity and squeeze are not independent along this trajectory: fall
    // back on the purity law  (μ₀/μ)² = e² + 2ρβ₀e(1−e) + ρ²(1−e)²
    let rho = p0.mu / fp.mu;
    let b0 = p0.shape_overlap(fp);
    let qa = 1.0 - 2.0 * rho * b0 + rho * rho;
    let qb = 2.0 * rho * b0 - 2.0 * rho * rho;
    let qc = rho * rho - (p0.mu / mu).powi(2);
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
    [(-qb + disc) / (2.0 * qa), (-qb - disc) / (2.0 * qa)]
        .into_iter()
        .find(|e| (-1e-12..=1.0 + 1e-12).contains(e))
        .map(|e| e.clamp(0.0, 1.0))
}

fn weight_to_time(e: f64, gamma: f64) -> f64 {
    if e <= 0.0 {
        f64::INFINITY
    } else {
        -e.ln() / gamma
    }
}

/// Every point of the forward trajectory with squeeze `r`, in time order.
/// Squeezes below the trajectory's minimum give an empty list.
pub fn curve_points_of_r(p0: &ModeParams, fp: &ChannelFixedPoint, r: f64) -> Result<Vec<CurvePoint>> {
    let p0 = p0.canonical();
    let fpp = fp.params;
    if !r.is_finite() {
        return Err(Error::InvalidInput(format!("squeeze must be finite, got {r}")));
    }
    let k = CurveConstants::new(&p0, &fpp);
    if k.a5.abs() < FLAT_TOL {
        return Err(Error::DegenerateTrajectory(
            "squeeze and phase are constant along the trajectory".into(),
        ));
    }
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let radicand = k.a3 * s * s - k.a4;
    if radicand < -1e-12 * (k.a3 * s * s).max(k.a4).max(1.0) {
        return Ok(Vec::new());
    }
    let root = radicand.max(0.0).sqrt();
    let mut pts = Vec::with_capacity(2);
    for sign in [-1.0, 1.0] {
        let mu = fpp.mu * (k.a1 * c + sign * k.a2 * root) / k.a5;
        if !(mu > 0.0 && mu <= 1.0 + 1e-12) {
            continue;
        }
        if let Some(e) = weight_on_trajectory(&p0, &fpp, mu, c) {
            let t = weight_to_time(e, fp.gamma());
            if !pts.iter().any(|q: &CurvePoint| q.t == t) {
                pts.push(CurvePoint { mu: mu.min(1.0), t });
            }
        }
        if k.a2 == 0.0 {
            break;
        }
    }
    pts.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(pts)
}

/// Purity of the free trajectory as a function of its squeeze, on the closed
/// interval between the initial and fixed-point squeezes (canonical, `r ≥ 0`).
///
/// On that interval the trajectory visits each squeeze once, except that a
/// trajectory can dip below the fixed-point squeeze before returning; the
/// pass lying in the interval is the one returned.
pub fn curve_mu_of_r(p0: &ModeParams, fp: &ChannelFixedPoint, r: f64) -> Result<f64> {
    let p0c = p0.canonical();
    let (r0, rf) = (p0c.r, fp.params.r);
    let (lo, hi) = (r0.min(rf), r0.max(rf));
    if r < lo - ENDPOINT_TOL || r > hi + ENDPOINT_TOL {
        return Err(Error::OutOfRange(format!("squeeze {r} outside the swept interval [{lo}, {hi}]")));
    }
    if (r - r0).abs() <= ENDPOINT_TOL {
        return Ok(p0c.mu);
    }
    if (r - rf).abs() <= ENDPOINT_TOL {
        return Ok(fp.params.mu);
    }
    let pts = curve_points_of_r(&p0c, fp, r)?;
    // decreasing squeeze covers the interval on the first pass, increasing on the last
    let pick = if r0 > rf { pts.first() } else { pts.last() };
    pick.map(|p| p.mu)
        .ok_or_else(|| Error::OutOfRange(format!("no trajectory point with squeeze {r}")))
}

/// Purity along a trajectory whose initial and fixed-point phases agree:
/// `μ(r) = [μ_fp sinh 2(r₀−r) + μ₀ sinh 2(r−r_fp)] / sinh 2(r₀−r_fp)`,
/// with signed squeezes measured along the common axis.
pub fn aligned_mu_of_r(mu0: f64, r0: f64, mu_fp: f64, r_fp: f64, r: f64) -> Result<f64> {
    let den = (2.0 * (r0 - r_fp)).sinh();
    if den.abs() < FLAT_TOL {
        return Err(Error::DegenerateTrajectory("initial and fixed-point squeezes coincide".into()));
    }
    let (lo, hi) = (r0.min(r_fp), r0.max(r_fp));
    if r < lo - ENDPOINT_TOL || r > hi + ENDPOINT_TOL {
        return Err(Error::OutOfRange(format!("squeeze {r} outside [{lo}, {hi}]")));
    }
    Ok((mu_fp * (2.0 * (r0 - r)).sinh() + mu0 * (2.0 * (r - r_fp)).sinh()) / den)
}

fn phase_curve_inputs(p0: &ModeParams, fp: &ChannelFixedPoint) -> Result<(f64, f64)> {
    let s0 = (2.0 * p0.r).sinh();
    let sf = (2.0 * fp.params.r).sinh();
    if s0.abs() < FLAT_TOL || sf.abs() < FLAT_TOL {
        return Err(Error::DegenerateTrajectory("phase undefined at zero squeeze".into()));
    }
    if (2.0 * (p0.theta - fp.params.theta)).sin().abs() < FLAT_TOL {
        return Err(Error::DegenerateTrajectory("phase is constant along the trajectory".into()));
    }
    Ok((s0, sf))
}

/// Time at which the free trajectory reaches phase `theta`, from
/// `e^{−γt} = [1 − μ_fp sin 2(θ−θ₀) sinh 2r₀ / (μ₀ sin 2(θ−θ_fp) sinh 2r_fp)]⁻¹`.
pub fn time_from_theta(p0: &ModeParams, fp: &ChannelFixedPoint, theta: f64) -> Result<f64> {
    let e = weight_from_theta(p0, fp, theta)?;
    Ok(weight_to_time(e, fp.gamma()))
}

fn weight_from_theta(p0: &ModeParams, fp: &ChannelFixedPoint, theta: f64) -> Result<f64> {
    let (s0, sf) = phase_curve_inputs(p0, fp)?;
    let fpp = &fp.params;
    let a = fpp.mu * s0 * (2.0 * (theta - p0.theta)).sin();
    let b = p0.mu * sf * (2.0 * (theta - fpp.theta)).sin();
    if a == 0.0 {
        if (2.0 * (theta - p0.theta)).cos() > 0.0 {
            return Ok(1.0);
        }
        return Err(Error::OutOfRange(format!("phase {theta} is orthogonal to the initial phase")));
    }
    let mut e = b / (b - a);
    // roundoff at the initial phase can push the weight just past 1
    if e > 1.0 && e <= 1.0 + 1e-9 {
        e = 1.0;
    }
    if !(e > 0.0 && e <= 1.0) {
        return Err(Error::OutOfRange(format!("phase {theta} is not reached by the trajectory")));
    }
    // the phase relation holds modulo π/2; keep the branch whose squeeze
    // direction points along θ rather than against it
    let om = 1.0 - e;
    let vx = e * s0 / p0.mu * (2.0 * p0.theta).cos() + om * sf / fpp.mu * (2.0 * fpp.theta).cos();
    let vy = e * s0 / p0.mu * (2.0 * p0.theta).sin() + om * sf / fpp.mu * (2.0 * fpp.theta).sin();
    if vx * (2.0 * theta).cos() + vy * (2.0 * theta).sin() <= 0.0 {
        return Err(Error::OutOfRange(format!("phase {theta} is not reached by the trajectory")));
    }
    Ok(e)
}

/// Purity and squeeze at the point of the free trajectory with phase `theta`:
///
/// ```text
/// √c μ = |μ_fp S₀ s₀ − μ₀ S_fp s_fp|,   s √c cosh 2r = S₀ s₀ c_fp − S_fp c₀ s_fp
/// ```
///
/// with `S₀ = sin 2(θ−θ₀)`, `S_fp = sin 2(θ−θ_fp)`, `s = sinh 2r`, `c = cosh 2r`
/// at the two ends, `c = S₀²s₀² + S_fp²s_fp² − 2β₀ S₀ S_fp s₀ s_fp` and `s` the
/// sign of `μ_fp S₀ s₀ − μ₀ S_fp s_fp`.
pub fn curve_params_of_theta(p0: &ModeParams, fp: &ChannelFixedPoint, theta: f64) -> Result<(f64, f64)> {
    weight_from_theta(p0, fp, theta)?;
    let fpp = &fp.params;
    let (s0, c0) = ((2.0 * p0.r).sinh(), (2.0 * p0.r).cosh());
    let (sf, cf) = ((2.0 * fpp.r).sinh(), (2.0 * fpp.r).cosh());
    let big_s0 = (2.0 * (theta - p0.theta)).sin();
    let big_sf = (2.0 * (theta - fpp.theta)).sin();
    let b0 = p0.shape_overlap(fpp);
    let cc = (big_s0 * s0).powi(2) + (big_sf * sf).powi(2) - 2.0 * b0 * big_s0 * big_sf * s0 * sf;
    let lin = fpp.mu * big_s0 * s0 - p0.mu * big_sf * sf;
    let root_c = cc.max(0.0).sqrt();
    if root_c == 0.0 {
        return Err(Error::DegenerateTrajectory("phase curve constant vanishes".into()));
    }
    let mu = lin.abs() / root_c;
    let cosh_2r = lin.signum() * (big_s0 * s0 * cf - big_sf * c0 * sf) / root_c;
    Ok((mu, 0.5 * cosh_2r.max(1.0).acosh()))
}

/// Phase the free trajectory approaches as `t → ∞` (the fixed-point phase,
/// or `θ₀` when the fixed point is unsqueezed).
pub fn asymptotic_phase(p0: &ModeParams, fp: &ChannelFixedPoint) -> f64 {
    if (2.0 * fp.params.r).sinh().abs() < FLAT_TOL {
        p0.canonical().theta
    } else {
        fp.params.theta.rem_euclid(PI)
    }
}
