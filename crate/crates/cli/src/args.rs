use clap::{Args, ValueEnum};
use gaussrelax::control::{ControlBudget, Mode, Tolerance};
use gaussrelax::oracle::{IntegratorConfig, Method};
use gaussrelax::{fixed_point, BathSpec, ChannelFixedPoint, Displacement, Error, ModeParams, Result};
use serde_json::{json, Value};

/// Channel given either by its bath or by its fixed point.
#[derive(Args, Debug, Clone)]
pub struct ChannelArgs {
    /// Damping rate; times are reported in units of 1/gamma.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Bath occupation N.
    #[arg(long, allow_hyphen_values = true)]
    pub n_occ: Option<f64>,
    /// Real part of the bath squeezing M.
    #[arg(long, allow_hyphen_values = true)]
    pub m_re: Option<f64>,
    /// Imaginary part of the bath squeezing M.
    #[arg(long, allow_hyphen_values = true)]
    pub m_im: Option<f64>,
    /// Purity of the fixed point.
    #[arg(long)]
    pub mu_fp: Option<f64>,
    /// Squeeze of the fixed point.
    #[arg(long, allow_hyphen_values = true)]
    pub r_fp: Option<f64>,
    /// Squeezing phase of the fixed point.
    #[arg(long, allow_hyphen_values = true)]
    pub theta_fp: Option<f64>,
}

impl ChannelArgs {
    fn has_bath(&self) -> bool {
        self.n_occ.is_some() || self.m_re.is_some() || self.m_im.is_some()
    }

    fn has_fixed_point(&self) -> bool {
        self.mu_fp.is_some() || self.r_fp.is_some() || self.theta_fp.is_some()
    }

    /// Unset fields of the chosen form default to zero.
    pub fn resolve(&self) -> Result<ChannelFixedPoint> {
        match (self.has_bath(), self.has_fixed_point()) {
            (true, true) => Err(Error::InvalidInput("give either the bath or the fixed-point form, not both".into())),
            (false, false) => Err(Error::InvalidInput("missing channel: give --n-occ/--m-re/--m-im or --mu-fp/--r-fp/--theta-fp".into())),
            (true, false) => {
                let bath = BathSpec::new(
                    self.gamma,
                    self.n_occ.unwrap_or(0.0),
                    self.m_re.unwrap_or(0.0),
                    self.m_im.unwrap_or(0.0),
                )?;
                fixed_point(&bath)
            }
            (false, true) => {
                let mu = self
                    .mu_fp
                    .ok_or_else(|| Error::InvalidInput("the fixed-point form needs --mu-fp".into()))?;
                let p = ModeParams::new(mu, self.r_fp.unwrap_or(0.0), self.theta_fp.unwrap_or(0.0))?;
                ChannelFixedPoint::from_params(self.gamma, p)
            }
        }
    }

    /// Like `resolve`, falling back to the fixed point `(mu, 0, 0)` when no
    /// form is given.
    pub fn resolve_or_thermal(&self, mu: f64) -> Result<ChannelFixedPoint> {
        if self.has_bath() || self.has_fixed_point() {
            self.resolve()
        } else {
            ChannelFixedPoint::from_params(self.gamma, ModeParams::new(mu, 0.0, 0.0)?)
        }
    }
}

pub fn channel_json(fp: &ChannelFixedPoint) -> Value {
    json!({
        "gamma": fp.gamma(),
        "mu_fp": fp.params.mu,
        "r_fp": fp.params.r,
        "theta_fp": fp.params.theta,
        "n_occ": fp.bath.n_occ,
        "m_re": fp.bath.m_re,
        "m_im": fp.bath.m_im,
    })
}

/// Initial state.
#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    /// Initial purity.
    #[arg(long)]
    pub mu0: f64,
    /// Initial squeeze.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub r0: f64,
    /// Initial squeezing phase.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta0: f64,
    /// Initial position displacement.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub q0: f64,
    /// Initial momentum displacement.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub p0: f64,
}

impl StateArgs {
    pub fn params(&self) -> Result<ModeParams> {
        ModeParams::new(self.mu0, self.r0, self.theta0)
    }

    pub fn displacement(&self) -> Result<Displacement> {
        Displacement::new(self.q0, self.p0)
    }

    pub fn to_json(&self) -> Value {
        json!({ "mu0": self.mu0, "r0": self.r0, "theta0": self.theta0, "q0": self.q0, "p0": self.p0 })
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Exact,
    Asymptotic,
    Both,
}

impl ModeArg {
    pub fn modes(self) -> Vec<Mode> {
        match self {
            ModeArg::Exact => vec![Mode::Exact],
            ModeArg::Asymptotic => vec![Mode::Asymptotic],
            ModeArg::Both => vec![Mode::Exact, Mode::Asymptotic],
        }
    }

    pub fn single(self) -> Result<Mode> {
        match self {
            ModeArg::Exact => Ok(Mode::Exact),
            ModeArg::Asymptotic => Ok(Mode::Asymptotic),
            ModeArg::Both => Err(Error::InvalidInput("this command takes a single mode".into())),
        }
    }
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Exact => "exact",
        Mode::Asymptotic => "asymptotic",
    }
}

/// Fidelity target and control budget.
#[derive(Args, Debug, Clone)]
pub struct TargetArgs {
    /// Target infidelity.
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
    /// Largest admissible squeeze; unbounded when omitted.
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Asymptotic)]
    pub mode: ModeArg,
}

impl TargetArgs {
    pub fn budget(&self) -> Result<ControlBudget> {
        match self.r_max {
            Some(r) => ControlBudget::new(r),
            None => Ok(ControlBudget::unbounded()),
        }
    }

    pub fn tolerance(&self, mode: Mode) -> Result<Tolerance> {
        Tolerance::new(self.epsilon, mode)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "epsilon": self.epsilon,
            "r_max": self.r_max,
            "mode": format!("{:?}", self.mode).to_lowercase(),
        })
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Rk4,
    Euler,
}

/// Integrator settings for the oracle.
#[derive(Args, Debug, Clone)]
pub struct IntegratorArgs {
    /// Step size; defaults to 1e-4/gamma.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Rk4)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_steps: u64,
}

impl IntegratorArgs {
    pub fn config(&self, gamma: f64) -> Result<IntegratorConfig> {
        let mut cfg = IntegratorConfig::default_for(gamma);
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        cfg.method = match self.method {
            MethodArg::Rk4 => Method::Rk4,
            MethodArg::Euler => Method::Euler,
        };
        cfg.max_steps = self.max_steps;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}
