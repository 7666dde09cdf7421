//! One-mode Gaussian states.
//!
//! Quadratures follow the convention `[x_i, x_j] = 2i Ω_ij`, so the vacuum
//! covariance matrix is the identity and a state is physical iff its
//! covariance matrix is positive definite with determinant at least one.
//!
//! A covariance matrix is parameterized by its Williamson triple
//! `(μ, r, θ)`:
//!
//! ```text
//! σ = (1/μ) R(θ) diag(e^{-2r}, e^{2r}) R(θ)ᵀ,   R(θ) = [[cos θ, sin θ], [-sin θ, cos θ]]
//! ```
//!
//! The canonical triple has `r ≥ 0` and `θ ∈ [0, π)`, with `θ = 0` whenever
//! `r = 0`. Note that `(r, θ)` and `(-r, θ + π/2)` describe the same matrix.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack on `Det σ ≥ 1` that absorbs roundoff from long evolutions.
pub const PHYSICALITY_TOL: f64 = 1e-12;

/// Below this value of `sinh 2r` the phase is reported as zero.
pub const DEGENERATE_SQUEEZE: f64 = 1e-14;

/// Real symmetric 2×2 covariance matrix; only the upper triangle is stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovMatrix {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl CovMatrix {
    pub fn new(xx: f64, xy: f64, yy: f64) -> Result<Self> {
        if !(xx.is_finite() && xy.is_finite() && yy.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "covariance entries must be finite, got ({xx}, {xy}, {yy})"
            )));
        }
        Ok(Self { xx, xy, yy })
    }

    pub const fn identity() -> Self {
        Self { xx: 1.0, xy: 0.0, yy: 1.0 }
    }

    pub fn scaled_identity(s: f64) -> Self {
        Self { xx: s, xy: 0.0, yy: s }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn is_positive_definite(&self) -> bool {
        self.xx > 0.0 && self.det() > 0.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { xx: s * self.xx, xy: s * self.xy, yy: s * self.yy }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { xx: self.xx + other.xx, xy: self.xy + other.xy, yy: self.yy + other.yy }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { xx: self.xx - other.xx, xy: self.xy - other.xy, yy: self.yy - other.yy }
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.xx - other.xx)
            .abs()
            .max((self.xy - other.xy).abs())
            .max((self.yy - other.yy).abs())
    }

    /// `S σ Sᵀ`.
    pub fn congruence(&self, s: &Symplectic) -> Self {
        let m = &s.m;
        let sig = [[self.xx, self.xy], [self.xy, self.yy]];
        let mut tmp = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                tmp[i][j] = m[i][0] * sig[0][j] + m[i][1] * sig[1][j];
            }
        }
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = tmp[i][0] * m[j][0] + tmp[i][1] * m[j][1];
            }
        }
        Self { xx: out[0][0], xy: 0.5 * (out[0][1] + out[1][0]), yy: out[1][1] }
    }

    /// `vᵀ σ⁻¹ v`.
    fn inverse_quadratic_form(&self, q: f64, p: f64) -> f64 {
        (self.yy * q * q - 2.0 * self.xy * q * p + self.xx * p * p) / self.det()
    }
}

/// First moments `(⟨q⟩, ⟨p⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Displacement {
    pub q: f64,
    pub p: f64,
}

impl Displacement {
    pub fn new(q: f64, p: f64) -> Result<Self> {
        if !(q.is_finite() && p.is_finite()) {
            return Err(Error::InvalidInput(format!("displacement must be finite, got ({q}, {p})")));
        }
        Ok(Self { q, p })
    }

    pub const fn zero() -> Self {
        Self { q: 0.0, p: 0.0 }
    }

    pub fn norm(&self) -> f64 {
        self.q.hypot(self.p)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { q: s * self.q, p: s * self.p }
    }
}

/// Williamson triple: purity `mu`, squeeze `r` and phase `theta` (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    pub mu: f64,
    pub r: f64,
    pub theta: f64,
}

impl ModeParams {
    /// Accepts any finite `r` and `theta`; purity must lie in `(0, 1]`.
    pub fn new(mu: f64, r: f64, theta: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0 && mu <= 1.0) {
            return Err(Error::InvalidParams(format!("purity must lie in (0, 1], got {mu}")));
        }
        if !(r.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "squeeze and phase must be finite, got r = {r}, theta = {theta}"
            )));
        }
        Ok(Self { mu, r, theta })
    }

    pub const fn vacuum() -> Self {
        Self { mu: 1.0, r: 0.0, theta: 0.0 }
    }

    /// Mean occupation `n̄` with `μ = 1/(1 + 2n̄)`.
    pub fn mean_occupation(&self) -> f64 {
        0.5 * (1.0 / self.mu - 1.0)
    }

    /// Same matrix, canonical representation.
    pub fn canonical(&self) -> Self {
        let (mut r, mut theta) = (self.r, self.theta);
        if r < 0.0 {
            r = -r;
            theta += FRAC_PI_2;
        }
        if (2.0 * r).sinh() < DEGENERATE_SQUEEZE {
            return Self { mu: self.mu, r: 0.0, theta: 0.0 };
        }
        theta = theta.rem_euclid(PI);
        if theta >= PI {
            theta -= PI;
        }
        Self { mu: self.mu, r, theta }
    }

    /// Reduced overlap `cosh 2r₁ cosh 2r₂ − cos 2(θ₁−θ₂) sinh 2r₁ sinh 2r₂`
    /// of the two unit-determinant shapes; equals one iff the shapes agree.
    pub fn shape_overlap(&self, other: &Self) -> f64 {
        shape_overlap(self.r, self.theta, other.r, other.theta)
    }
}

/// `cosh 2r₁ cosh 2r₂ − cos 2(θ₁−θ₂) sinh 2r₁ sinh 2r₂`.
pub fn shape_overlap(r1: f64, theta1: f64, r2: f64, theta2: f64) -> f64 {
    1.0 + shape_overlap_excess(r1, theta1, r2, theta2)
}

/// `shape_overlap − 1`, written as a sum of terms that are non-negative for
/// canonical squeezes so it stays accurate near coincidence.
pub fn shape_overlap_excess(r1: f64, theta1: f64, r2: f64, theta2: f64) -> f64 {
    let dr = (r1 - r2).sinh();
    let dth = (theta1 - theta2).sin();
    2.0 * dr * dr + 2.0 * dth * dth * (2.0 * r1).sinh() * (2.0 * r2).sinh()
}

/// Smallest distance between two phases modulo π.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Gaussian state: covariance matrix and displacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub cov: CovMatrix,
    pub disp: Displacement,
}

impl GaussianState {
    pub fn new(cov: CovMatrix, disp: Displacement) -> Result<Self> {
        let report = check_physical(&cov);
        if !report.ok {
            return Err(report.into_error());
        }
        Ok(Self { cov, disp })
    }

    pub fn from_params(p: &ModeParams, disp: Displacement) -> Self {
        Self { cov: cm_from_params(p), disp }
    }

    pub fn params(&self) -> Result<ModeParams> {
        params_from_cm(&self.cov)
    }
}

/// A 2×2 real matrix with unit determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Symplectic {
    pub m: [[f64; 2]; 2],
}

impl Symplectic {
    pub const fn identity() -> Self {
        Self { m: [[1.0, 0.0], [0.0, 1.0]] }
    }

    /// Phase rotation `R(φ)`.
    pub fn rotation(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { m: [[c, s], [-s, c]] }
    }

    /// Squeezer `diag(e^{-s}, e^{s})`; maps the vacuum to the CM `diag(e^{-2s}, e^{2s})`.
    pub fn squeeze(s: f64) -> Self {
        Self { m: [[(-s).exp(), 0.0], [0.0, s.exp()]] }
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self { m }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// For one mode `S Ω Sᵀ = Det(S) Ω`, so the condition is `Det S = 1`.
    pub fn is_symplectic(&self, tol: f64) -> bool {
        (self.det() - 1.0).abs() <= tol
    }

    /// Symplectic taking the shape `(r_from, θ_from)` to `(r_to, θ_to)`.
    pub fn between(from: &ModeParams, r_to: f64, theta_to: f64) -> Self {
        Self::rotation(theta_to)
            .compose(&Self::squeeze(r_to))
            .compose(&Self::squeeze(-from.r))
            .compose(&Self::rotation(-from.theta))
    }
}

/// Outcome of [`check_physical`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalityReport {
    pub ok: bool,
    pub positive_definite: bool,
    pub det: f64,
    /// `Det σ − 1`; negative values measure the violation.
    pub margin: f64,
}

impl PhysicalityReport {
    pub fn into_error(self) -> Error {
        Error::UnphysicalCovariance { det: self.det, positive_definite: self.positive_definite }
    }
}

/// Uncertainty relation for one mode: `σ > 0` and `Det σ ≥ 1`.
pub fn check_physical(c: &CovMatrix) -> PhysicalityReport {
    let det = c.det();
    let positive_definite = c.is_positive_definite();
    PhysicalityReport {
        ok: positive_definite && det >= 1.0 - PHYSICALITY_TOL,
        positive_definite,
        det,
        margin: det - 1.0,
    }
}

pub fn cm_from_params(p: &ModeParams) -> CovMatrix {
    let (sh, ch) = ((2.0 * p.r).sinh(), (2.0 * p.r).cosh());
    let (s2, c2) = (2.0 * p.theta).sin_cos();
    let k = 1.0 / p.mu;
    CovMatrix { xx: k * (ch - c2 * sh), xy: k * s2 * sh, yy: k * (ch + c2 * sh) }
}

/// Williamson decomposition of a physical covariance matrix into its
/// canonical triple.
pub fn params_from_cm(c: &CovMatrix) -> Result<ModeParams> {
    let report = check_physical(c);
    if !report.ok {
        return Err(report.into_error());
    }
    let mu = (1.0 / report.det.sqrt()).min(1.0);
    let half_diff = 0.5 * (c.yy - c.xx);
    let sinh_2r = mu * half_diff.hypot(c.xy);
    if sinh_2r < DEGENERATE_SQUEEZE {
        return Ok(ModeParams { mu, r: 0.0, theta: 0.0 });
    }
    let r = 0.5 * sinh_2r.asinh();
    let mut theta = 0.5 * c.xy.atan2(half_diff);
    if theta < 0.0 {
        theta += PI;
    }
    if theta >= PI {
        theta -= PI;
    }
    Ok(ModeParams { mu, r, theta })
}

/// Fidelity between two one-mode Gaussian states:
///
/// ```text
/// F = 2 / (√(Δ+δ) − √δ) · exp(−½ dᵀ σ₊⁻¹ d),  Δ = Det(σ₁+σ₂),  δ = (Det σ₁ − 1)(Det σ₂ − 1)
/// ```
pub fn fidelity(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    for s in [s1, s2] {
        let report = check_physical(&s.cov);
        if !report.ok {
            return Err(report.into_error());
        }
    }
    let sum = s1.cov.add(&s2.cov);
    let big = sum.det();
    let small = ((s1.cov.det() - 1.0) * (s2.cov.det() - 1.0)).max(0.0);
    // 2/(√(Δ+δ) − √δ) rationalized
    let prefactor = 2.0 * ((big + small).sqrt() + small.sqrt()) / big;
    let dq = s1.disp.q - s2.disp.q;
    let dp = s1.disp.p - s2.disp.p;
    let gauss = (-0.5 * sum.inverse_quadratic_form(dq, dp)).exp();
    Ok((prefactor * gauss).min(1.0))
}

/// `1 − F` for two centred states given by their Williamson triples,
/// evaluated without cancellation so that infidelities far below machine
/// epsilon relative to one stay accurate.
pub fn params_infidelity(a: &ModeParams, b: &ModeParams) -> f64 {
    let x = 1.0 / a.mu;
    let y = 1.0 / b.mu;
    let excess = shape_overlap_excess(a.r, a.theta, b.r, b.theta);
    infidelity_from_parts(x, y, excess)
}

/// `1 − F` from `x = √Det σ₁`, `y = √Det σ₂` and the shape-overlap excess.
pub(crate) fn infidelity_from_parts(x: f64, y: f64, excess: f64) -> f64 {
    let d = x - y;
    let h = x * y - 1.0;
    let e = d * d + 2.0 * excess * x * y;
    let big = x * x + y * y + 2.0 * (1.0 + excess) * x * y;
    let small = ((x * x - 1.0) * (y * y - 1.0)).max(0.0);
    let (p, q) = ((big + small).sqrt(), small.sqrt());
    let numer = 8.0 * h * e + e * e + 16.0 * d * d;
    if numer == 0.0 {
        return 0.0;
    }
    numer / ((big - 4.0 + 4.0 * q) * (big - 2.0 * q + 2.0 * p))
}

pub fn params_fidelity(a: &ModeParams, b: &ModeParams) -> f64 {
    1.0 - params_infidelity(a, b)
}

/// Squeeze by `sq`, then rotate by `rot`, then set the displacement to
/// `disp_to`.
pub fn apply_unitary(s: &GaussianState, rot: f64, sq: f64, disp_to: Displacement) -> GaussianState {
    let sym = Symplectic::rotation(rot).compose(&Symplectic::squeeze(sq));
    GaussianState { cov: s.cov.congruence(&sym), disp: disp_to }
}

/// Instantaneous unitary taking the state to shape `(r_to, θ_to)` at fixed
/// purity and displacement `disp_to`.
pub fn unitary_to(s: &GaussianState, r_to: f64, theta_to: f64, disp_to: Displacement) -> Result<GaussianState> {
    let from = params_from_cm(&s.cov)?;
    let sym = Symplectic::between(&from, r_to, theta_to);
    Ok(GaussianState { cov: s.cov.congruence(&sym), disp: disp_to })
}
