//! Markovian dissipative channel acting on one mode.
//!
//! With no Hamiltonian the covariance matrix obeys `σ̇ = Aσ + σAᵀ + D` with
//! drift `A = −(γ/2) I` and diffusion
//! `D = γ[(2N+1) I + 2(M₂ σ_x + M₁ σ_z)]`, i.e. `σ̇ = γ(σ_fp − σ)` with
//! `σ_fp = D/γ`. The displacement decays as `d(t) = e^{−γt/2} d(0)`.
//!
//! Times are handled in units of `1/γ` internally: every closed form below
//! depends on `t` only through `e^{−γt}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{
    check_physical, cm_from_params, params_from_cm, CovMatrix, GaussianState, ModeParams,
    DEGENERATE_SQUEEZE,
};

/// Bath parameters: rate `gamma`, occupation `N` and squeezing `M = m_re + i m_im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub gamma: f64,
    pub n_occ: f64,
    pub m_re: f64,
    pub m_im: f64,
}

impl BathSpec {
    pub fn new(gamma: f64, n_occ: f64, m_re: f64, m_im: f64) -> Result<Self> {
        let bath = Self { gamma, n_occ, m_re, m_im };
        bath.validate()?;
        Ok(bath)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { gamma, n_occ, m_re, m_im } = *self;
        if !(gamma.is_finite() && n_occ.is_finite() && m_re.is_finite() && m_im.is_finite()) {
            return Err(Error::InvalidBath("parameters must be finite".into()));
        }
        if gamma <= 0.0 {
            return Err(Error::InvalidBath(format!("gamma must be positive, got {gamma}")));
        }
        if n_occ < 0.0 {
            return Err(Error::InvalidBath(format!("occupation must be non-negative, got {n_occ}")));
        }
        let m2 = self.squeezing_modulus_sq();
        let lhs = n_occ * (n_occ + 1.0);
        if lhs < m2 - 1e-12 * m2.max(1.0) {
            return Err(Error::InvalidBath(format!(
                "complete positivity violated: N(N+1) = {lhs} < |M|^2 = {m2}"
            )));
        }
        Ok(())
    }

    pub fn squeezing_modulus_sq(&self) -> f64 {
        self.m_re * self.m_re + self.m_im * self.m_im
    }
}

/// Drift and diffusion matrices of the free channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftDiffusion {
    pub drift: [[f64; 2]; 2],
    pub diffusion: CovMatrix,
}

pub fn drift_diffusion(bath: &BathSpec) -> Result<DriftDiffusion> {
    bath.validate()?;
    let g = bath.gamma;
    let diag = 2.0 * bath.n_occ + 1.0;
    let diffusion = CovMatrix {
        xx: g * (diag + 2.0 * bath.m_re),
        xy: g * 2.0 * bath.m_im,
        yy: g * (diag - 2.0 * bath.m_re),
    };
    Ok(DriftDiffusion { drift: [[-0.5 * g, 0.0], [0.0, -0.5 * g]], diffusion })
}

/// Stationary state of the free channel, which fully characterizes it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelFixedPoint {
    pub params: ModeParams,
    pub cov: CovMatrix,
    pub bath: BathSpec,
}

/// Purity above which a fixed point is treated as pure.
pub const PURE_THRESHOLD: f64 = 1.0 - 1e-9;

impl ChannelFixedPoint {
    pub fn gamma(&self) -> f64 {
        self.bath.gamma
    }

    pub fn mu(&self) -> f64 {
        self.params.mu
    }

    pub fn is_pure(&self) -> bool {
        self.params.mu > PURE_THRESHOLD
    }

    /// Channel with the prescribed fixed point; the bath is read off `σ_fp = D/γ`.
    pub fn from_params(gamma: f64, params: ModeParams) -> Result<Self> {
        let cov = cm_from_params(&params);
        let bath = BathSpec {
            gamma,
            n_occ: 0.5 * (0.5 * cov.trace() - 1.0),
            m_re: 0.25 * (cov.xx - cov.yy),
            m_im: 0.5 * cov.xy,
        };
        // clamp roundoff on pure fixed points
        let bath = BathSpec { n_occ: bath.n_occ.max(0.0), ..bath };
        bath.validate()?;
        Ok(Self { params: params.canonical(), cov, bath })
    }

    /// `tan 2θ_fp = −M₂/M₁`, i.e. the phase modulo π/2 as given by the bath.
    pub fn bath_phase_mod_half_pi(&self) -> Option<f64> {
        if self.bath.m_re == 0.0 && self.bath.m_im == 0.0 {
            return None;
        }
        Some((0.5 * (-self.bath.m_im / self.bath.m_re).atan()).rem_euclid(PI / 2.0))
    }
}

/// Fixed point `σ_fp = D/γ`, decomposed with [`params_from_cm`].
pub fn fixed_point(bath: &BathSpec) -> Result<ChannelFixedPoint> {
    let dd = drift_diffusion(bath)?;
    let cov = dd.diffusion.scale(1.0 / bath.gamma);
    let report = check_physical(&cov);
    if !report.ok {
        return Err(Error::InvalidBath(format!("diffusion/gamma is unphysical (det {})", report.det)));
    }
    let params = params_from_cm(&cov)?;
    Ok(ChannelFixedPoint { params, cov, bath: *bath })
}

/// `(e^{−γt}, 1 − e^{−γt})`, the second without cancellation.
pub(crate) fn decay_weights(gamma: f64, t: f64) -> (f64, f64) {
    let x = -gamma * t;
    (x.exp(), -x.exp_m1())
}

/// `σ(t) = e^{−γt}σ(0) + (1 − e^{−γt})σ_fp`, `d(t) = e^{−γt/2} d(0)`.
pub fn evolve_free(s0: &GaussianState, fp: &ChannelFixedPoint, t: f64) -> Result<GaussianState> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("time must be finite and non-negative, got {t}")));
    }
    let (e, om) = decay_weights(fp.gamma(), t);
    let cov = s0.cov.scale(e).add(&fp.cov.scale(om));
    let disp = s0.disp.scale((-0.5 * fp.gamma() * t).exp());
    Ok(GaussianState { cov, disp })
}

/// Williamson triple along the free flow, in closed form:
///
/// ```text
/// μ(t) = μ₀ [e² + 2(μ₀/μ_fp) β₀ e(1−e) + (μ₀/μ_fp)²(1−e)²]^{−1/2},   e = e^{−γt}
/// ```
///
/// with `β₀` the shape overlap of the initial state and the fixed point; the
/// squeeze and phase follow from the `(cos 2θ, sin 2θ) sinh 2r / μ` plane
/// which mixes linearly.
pub fn params_evolution(p0: &ModeParams, fp: &ChannelFixedPoint, t: f64) -> ModeParams {
    let (e, om) = decay_weights(fp.gamma(), t);
    params_at_weight(p0, &fp.params, e, om)
}

/// Closed-form triple at `e = e^{−γt}`, `om = 1 − e`.
pub(crate) fn params_at_weight(p0: &ModeParams, fpp: &ModeParams, e: f64, om: f64) -> ModeParams {
    let rho = p0.mu / fpp.mu;
    let b0 = p0.shape_overlap(fpp);
    let den = e * e + 2.0 * rho * b0 * e * om + rho * rho * om * om;
    let mu = (p0.mu / den.sqrt()).min(1.0);
    let (s0, sf) = ((2.0 * p0.r).sinh(), (2.0 * fpp.r).sinh());
    let (sin0, cos0) = (2.0 * p0.theta).sin_cos();
    let (sinf, cosf) = (2.0 * fpp.theta).sin_cos();
    let vx = e * s0 * cos0 + rho * om * sf * cosf;
    let vy = e * s0 * sin0 + rho * om * sf * sinf;
    let sinh_2r = mu / p0.mu * vx.hypot(vy);
    if sinh_2r < DEGENERATE_SQUEEZE {
        return ModeParams { mu, r: 0.0, theta: 0.0 };
    }
    let mut theta = 0.5 * vy.atan2(vx);
    if theta < 0.0 {
        theta += PI;
    }
    if theta >= PI {
        theta -= PI;
    }
    ModeParams { mu, r: 0.5 * sinh_2r.asinh(), theta }
}

/// `cosh 2r(t) = (μ(t)/μ₀)[cosh 2r₀ e^{−γt} + (μ₀/μ_fp) cosh 2r_fp (1 − e^{−γt})]`.
pub fn cosh_2r_evolution(p0: &ModeParams, fp: &ChannelFixedPoint, t: f64) -> f64 {
    let (e, om) = decay_weights(fp.gamma(), t);
    let mu = params_at_weight(p0, &fp.params, e, om).mu;
    let rho = p0.mu / fp.params.mu;
    mu / p0.mu * ((2.0 * p0.r).cosh() * e + rho * (2.0 * fp.params.r).cosh() * om)
}

/// Instantaneous rates of the Williamson triple under the free channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VelocityField {
    pub dmu_dt: f64,
    pub dr_dt: f64,
    pub dtheta_dt: f64,
    /// Set when `sinh 2r = 0`: the phase is undefined and `dtheta_dt` is
    /// reported as zero.
    pub phase_degenerate: bool,
}

/// `μ̇ = γμ[1 − (μ/μ_fp) β(r, θ)]` at an arbitrary shape.
pub fn purity_rate(mu: f64, r: f64, theta: f64, fp: &ChannelFixedPoint) -> f64 {
    let beta = crate::gaussian::shape_overlap(r, theta, fp.params.r, fp.params.theta);
    fp.gamma() * mu * (1.0 - mu / fp.params.mu * beta)
}

/// Rates of `(μ, r, θ)` under the free flow.
///
/// The phase rate is the CM-flow form
/// `θ̇ = γμ sinh 2r_fp sin 2(θ_fp − θ) / (2 μ_fp sinh 2r)`, which is regular
/// where `cos 2θ = 0`. See [`printed_phase_rate`] for the quotient form.
pub fn velocity_field(p: &ModeParams, fp: &ChannelFixedPoint) -> VelocityField {
    let g = fp.gamma();
    let (muf, rf, thf) = (fp.params.mu, fp.params.r, fp.params.theta);
    let (cf, sf) = ((2.0 * rf).cosh(), (2.0 * rf).sinh());
    let (c, s) = ((2.0 * p.r).cosh(), (2.0 * p.r).sinh());
    let cos_rel = (2.0 * (p.theta - thf)).cos();
    let dmu_dt = purity_rate(p.mu, p.r, p.theta, fp);
    let dr_dt = -g * p.mu / (2.0 * muf) * (cf * s - cos_rel * sf * c);
    let (dtheta_dt, phase_degenerate) = if s.abs() < DEGENERATE_SQUEEZE {
        (0.0, true)
    } else {
        (g * p.mu * sf / (2.0 * muf * s) * (2.0 * (thf - p.theta)).sin(), false)
    };
    VelocityField { dmu_dt, dr_dt, dtheta_dt, phase_degenerate }
}

/// Phase rate in quotient form,
/// `γμ sinh 2r_fp [sin 2θ_fp − cos 2(θ−θ_fp) sin 2θ] / (2 μ_fp cos 2θ sinh 2r)`.
/// Fails where the denominator vanishes.
pub fn printed_phase_rate(p: &ModeParams, fp: &ChannelFixedPoint) -> Result<f64> {
    let (muf, rf, thf) = (fp.params.mu, fp.params.r, fp.params.theta);
    let denom = 2.0 * muf * (2.0 * p.theta).cos() * (2.0 * p.r).sinh();
    if denom.abs() < 1e-12 {
        return Err(Error::DegeneratePhase(format!(
            "cos 2θ sinh 2r vanishes at r = {}, θ = {}",
            p.r, p.theta
        )));
    }
    let bracket = (2.0 * thf).sin() - (2.0 * (p.theta - thf)).cos() * (2.0 * p.theta).sin();
    Ok(fp.gamma() * p.mu * (2.0 * rf).sinh() * bracket / denom)
}
