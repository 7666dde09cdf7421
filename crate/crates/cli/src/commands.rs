use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use gaussrelax::channel::{evolve_free, params_evolution};
use gaussrelax::control::{
    plan_cooling, plan_heating, pure_fp_times, stopping_set, t_free, worst_case, ControlBudget, PlanResult,
    Protocol, Segment, Tolerance,
};
use gaussrelax::gaussian::{fidelity, params_from_cm};
use gaussrelax::oracle::{integrate_free, simulate_protocol, IntegratorConfig, Trace};
use gaussrelax::trajectory::{aligned_mu_of_r, curve_params_of_theta, curve_points_of_r, time_from_theta};
use gaussrelax::{ChannelFixedPoint, Displacement, Error, GaussianState, ModeParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::args::{channel_json, mode_name, ChannelArgs, Format, StateArgs, TargetArgs};
use crate::{CliError, CliResult, Command, Curve, Direction, ProtocolAction, Source, SweepVar, TimeKind, TrajSource};

const TRAJECTORY_HEADER: [&str; 8] = ["t", "mu", "r", "theta", "sigma_xx", "sigma_xy", "sigma_yy", "fidelity_to_fp"];
/// Agreement expected between the closed-form and integrated trajectories.
const SOURCE_AGREEMENT: f64 = 1e-8;

pub enum Output {
    Json(Value),
    Csv(String),
}

impl Output {
    pub fn emit(self) -> CliResult<()> {
        match self {
            Output::Json(v) => {
                let text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Parse(e.to_string()))?;
                println!("{text}");
            }
            Output::Csv(s) => print!("{s}"),
        }
        Ok(())
    }
}

pub fn attach_timing(out: &mut Output, seconds: f64) {
    match out {
        Output::Json(Value::Object(map)) => {
            map.insert("meta".into(), json!({ "wall_clock_s": seconds }));
        }
        _ => eprintln!("wall_clock_s = {seconds}"),
    }
}

fn report(command: &str, inputs: Value, outputs: Value) -> Output {
    Output::Json(json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": inputs,
        "outputs": outputs,
    }))
}

pub fn run(cmd: Command) -> CliResult<Output> {
    match cmd {
        Command::FixedPoint { channel } => fixed_point_cmd(&channel),
        Command::Evolve { state, channel, t, source, integrator } => {
            let fp = channel.resolve()?;
            let s0 = GaussianState::from_params(&state.params()?, state.displacement()?);
            let out = match source {
                Source::Closed => evolve_free(&s0, &fp, t)?,
                Source::Oracle => {
                    let cfg = integrator.config(fp.gamma())?;
                    final_state(&integrate_free(&s0, &fp, t, &cfg)?)
                }
            };
            let inputs = json!({
                "state": state.to_json(),
                "channel": channel_json(&fp),
                "t": t,
                "source": if source == Source::Closed { "closed" } else { "oracle" },
            });
            Ok(report("evolve", inputs, state_json(&out, &fp)?))
        }
        Command::Trajectory { state, channel, t_max, steps, format, source, curve, output, integrator } => {
            let fp = channel.resolve()?;
            let traj = TrajectoryRequest {
                p0: state.params()?,
                d0: state.displacement()?,
                fp,
                t_max,
                steps,
                cfg: integrator.config(fp.gamma())?,
            };
            trajectory_cmd(&traj, format, source, curve, output.as_deref())
        }
        Command::Time { kind, state, channel, target } => {
            let fp = channel.resolve()?;
            let p0 = state.params()?;
            let mut outputs = Map::new();
            for mode in target.mode.modes() {
                let tol = target.tolerance(mode)?;
                let res = time_for(kind, &p0, &fp, &tol, &target.budget()?)?;
                outputs.insert(mode_name(mode).into(), res.to_json());
            }
            let inputs = json!({ "state": state.to_json(), "channel": channel_json(&fp), "target": target.to_json() });
            Ok(report(&format!("time {}", kind_name(kind)), inputs, Value::Object(outputs)))
        }
        Command::Protocol { action } => protocol_cmd(action),
        Command::StopSet { mu, channel, samples } => {
            let fp = channel.resolve()?;
            let set = stopping_set(&fp, mu)?;
            let table: Vec<Value> = set.sample(samples).into_iter().map(|(th, r)| json!({ "theta": th, "r": r })).collect();
            let inputs = json!({ "mu": mu, "channel": channel_json(&fp), "samples": samples });
            Ok(report("stop-set", inputs, json!({ "canonical": set.canonical(), "table": table })))
        }
        Command::WorstCase { r0, mu_ratio, epsilon, channel } => {
            let fp = channel.resolve_or_thermal(0.5)?;
            let w = worst_case(&fp, &Tolerance::asymptotic(epsilon)?, r0, mu_ratio)?;
            let inputs = json!({ "r0": r0, "mu_ratio": mu_ratio, "epsilon": epsilon, "channel": channel_json(&fp) });
            Ok(report("worst-case", inputs, serde_json::to_value(w).expect("plain struct")))
        }
        Command::Sweep { kind, vary, from, to, points, format, state, channel, target } => {
            sweep_cmd(kind, vary, from, to, points, format, &state, &channel, &target)
        }
    }
}

fn fixed_point_cmd(channel: &ChannelArgs) -> CliResult<Output> {
    let fp = channel.resolve()?;
    let outputs = json!({
        "mu_fp": fp.params.mu,
        "r_fp": fp.params.r,
        "theta_fp": fp.params.theta,
        "mean_occupation": fp.params.mean_occupation(),
        "cov": fp.cov,
    });
    let inputs = json!({ "gamma": fp.gamma(), "n_occ": fp.bath.n_occ, "m_re": fp.bath.m_re, "m_im": fp.bath.m_im });
    Ok(report("fixed-point", inputs, outputs))
}

fn final_state(trace: &Trace) -> GaussianState {
    trace.final_state().expect("traces hold at least the initial sample")
}

fn fp_state(fp: &ChannelFixedPoint) -> GaussianState {
    GaussianState::from_params(&fp.params, Displacement::zero())
}

fn state_json(s: &GaussianState, fp: &ChannelFixedPoint) -> CliResult<Value> {
    Ok(json!({
        "params": params_from_cm(&s.cov)?,
        "cov": s.cov,
        "disp": s.disp,
        "fidelity_to_fp": fidelity(s, &fp_state(fp))?,
    }))
}

fn kind_name(kind: TimeKind) -> &'static str {
    match kind {
        TimeKind::Free => "free",
        TimeKind::Cool => "cool",
        TimeKind::Heat => "heat",
    }
}

struct TimeResult {
    time: f64,
    mu_stop: f64,
    protocol: Option<Protocol>,
}

impl TimeResult {
    fn to_json(&self) -> Value {
        let mut v = json!({ "time": self.time, "mu_stop": self.mu_stop });
        if let Some(p) = &self.protocol {
            v["protocol"] = protocol_doc(p, self.time);
        }
        v
    }
}

fn from_plan(plan: PlanResult) -> TimeResult {
    TimeResult { time: plan.predicted_time, mu_stop: plan.mu_stop, protocol: Some(plan.protocol) }
}

/// Relaxation time of one kind; a pure fixed point goes through the
/// dedicated formulas.
fn time_for(
    kind: TimeKind,
    p0: &ModeParams,
    fp: &ChannelFixedPoint,
    tol: &Tolerance,
    budget: &ControlBudget,
) -> Result<TimeResult, Error> {
    match kind {
        TimeKind::Free if fp.is_pure() => {
            let t = pure_fp_times(p0, fp, tol)?.t_free_pure;
            Ok(TimeResult { time: t, mu_stop: params_evolution(p0, fp, t).mu, protocol: None })
        }
        TimeKind::Free => {
            let t = t_free(p0, fp, tol)?;
            Ok(TimeResult { time: t, mu_stop: params_evolution(p0, fp, t).mu, protocol: None })
        }
        TimeKind::Cool if fp.is_pure() => {
            if !budget.admits(fp.params.r) {
                return Err(Error::BudgetTooSmall(format!("r_max = {} below r_fp = {}", budget.r_max, fp.params.r)));
            }
            let pt = pure_fp_times(p0, fp, tol)?;
            let protocol = Protocol {
                segments: vec![
                    Segment::InstantUnitary { theta_to: fp.params.theta, r_to: fp.params.r, disp_to: Displacement::zero() },
                    Segment::FreeDecay { duration: pt.t_cool_pure },
                ],
                budget: *budget,
            };
            Ok(TimeResult { time: pt.t_cool_pure, mu_stop: pt.mu_stop, protocol: Some(protocol) })
        }
        TimeKind::Cool => plan_cooling(p0, fp, tol, budget).map(from_plan),
        TimeKind::Heat if fp.is_pure() => {
            Err(Error::WrongDirection("no state is purer than a pure fixed point".into()))
        }
        TimeKind::Heat => plan_heating(p0, fp, tol, budget).map(from_plan),
    }
}

/// Protocol document as read by `protocol simulate`.
#[derive(Debug, Serialize, Deserialize)]
struct ProtocolDoc {
    segments: Vec<Segment>,
    budget: ControlBudget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    predicted_time: Option<f64>,
}

fn protocol_doc(p: &Protocol, predicted_time: f64) -> Value {
    let doc = ProtocolDoc { segments: p.segments.clone(), budget: p.budget, predicted_time: Some(predicted_time) };
    serde_json::to_value(doc).expect("protocol serializes")
}

fn read_input(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn protocol_cmd(action: ProtocolAction) -> CliResult<Output> {
    match action {
        ProtocolAction::Plan { direction, state, channel, target, output } => {
            let fp = channel.resolve()?;
            let tol = target.tolerance(target.mode.single()?)?;
            let kind = match direction {
                Direction::Cool => TimeKind::Cool,
                Direction::Heat => TimeKind::Heat,
            };
            let res = time_for(kind, &state.params()?, &fp, &tol, &target.budget()?)?;
            let doc = protocol_doc(res.protocol.as_ref().expect("planners return protocols"), res.time);
            match output {
                Some(path) => {
                    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Parse(e.to_string()))?;
                    write_file(&path, &(text + "\n"))?;
                    let inputs = json!({ "state": state.to_json(), "channel": channel_json(&fp), "target": target.to_json() });
                    let outputs = json!({ "protocol_file": path.display().to_string(), "predicted_time": res.time, "mu_stop": res.mu_stop });
                    Ok(report("protocol plan", inputs, outputs))
                }
                None => Ok(Output::Json(doc)),
            }
        }
        ProtocolAction::Simulate { protocol, state, channel, integrator, trace } => {
            let fp = channel.resolve()?;
            let text = read_input(&protocol)?;
            let doc: ProtocolDoc = serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
            let proto = Protocol { segments: doc.segments, budget: doc.budget };
            let s0 = GaussianState::from_params(&state.params()?, state.displacement()?);
            let cfg = integrator.config(fp.gamma())?;
            let out = simulate_protocol(&s0, &fp, &proto, &cfg)?;
            if let Some(path) = &trace {
                let rows = out
                    .trace
                    .samples
                    .iter()
                    .map(|s| trajectory_row(s.t, &GaussianState { cov: s.cov, disp: s.disp }, &fp))
                    .collect::<CliResult<Vec<_>>>()?;
                write_file(path, &csv(&TRAJECTORY_HEADER, &rows))?;
            }
            let inputs = json!({
                "protocol": protocol.display().to_string(),
                "state": state.to_json(),
                "channel": channel_json(&fp),
                "dt": cfg.dt,
            });
            let outputs = json!({
                "elapsed": out.elapsed,
                "final_fidelity": out.final_fidelity,
                "predicted_time": doc.predicted_time,
                "final_state": state_json(&out.final_state, &fp)?,
            });
            Ok(report("protocol simulate", inputs, outputs))
        }
    }
}

struct TrajectoryRequest {
    p0: ModeParams,
    d0: Displacement,
    fp: ChannelFixedPoint,
    t_max: f64,
    steps: usize,
    cfg: IntegratorConfig,
}

impl TrajectoryRequest {
    fn times(&self) -> CliResult<Vec<f64>> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) || self.steps < 2 {
            return Err(Error::InvalidInput(format!(
                "need t_max > 0 and steps >= 2, got t_max = {}, steps = {}",
                self.t_max, self.steps
            ))
            .into());
        }
        let n = (self.steps - 1) as f64;
        Ok((0..self.steps).map(|i| self.t_max * i as f64 / n).collect())
    }

    fn initial(&self) -> GaussianState {
        GaussianState::from_params(&self.p0, self.d0)
    }

    fn closed(&self) -> CliResult<Vec<(f64, GaussianState)>> {
        let s0 = self.initial();
        self.times()?.into_iter().map(|t| Ok((t, evolve_free(&s0, &self.fp, t)?))).collect()
    }

    /// Integrates between consecutive sample times.
    fn oracle(&self) -> CliResult<Vec<(f64, GaussianState)>> {
        let times = self.times()?;
        let mut state = self.initial();
        let mut out = vec![(0.0, state)];
        for w in times.windows(2) {
            state = final_state(&integrate_free(&state, &self.fp, w[1] - w[0], &self.cfg)?);
            out.push((w[1], state));
        }
        Ok(out)
    }
}

fn trajectory_row(t: f64, s: &GaussianState, fp: &ChannelFixedPoint) -> CliResult<Vec<f64>> {
    let p = params_from_cm(&s.cov)?;
    let f = fidelity(s, &fp_state(fp))?;
    Ok(vec![t, p.mu, p.r, p.theta, s.cov.xx, s.cov.xy, s.cov.yy, f])
}

fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn table_json(header: &[&str], rows: &[Vec<f64>]) -> Value {
    json!({ "columns": header, "rows": rows })
}

fn render(format: Format, header: &[&str], rows: &[Vec<f64>]) -> String {
    match format {
        Format::Csv => csv(header, rows),
        Format::Json => serde_json::to_string_pretty(&table_json(header, rows)).expect("numbers serialize") + "\n",
    }
}

/// Purity on the `μ(r)` curve at the trajectory point reached at time `t`.
fn curve_mu(p0: &ModeParams, fp: &ChannelFixedPoint, r: f64, t: f64) -> Result<f64, Error> {
    match curve_points_of_r(p0, fp, r) {
        Ok(pts) => pts
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .map(|p| p.mu)
            .ok_or_else(|| Error::OutOfRange(format!("no trajectory point with squeeze {r}"))),
        Err(Error::DegenerateTrajectory(_)) => {
            let p0c = p0.canonical();
            aligned_mu_of_r(p0c.mu, p0c.r, fp.params.mu, fp.params.r, r)
        }
        Err(e) => Err(e),
    }
}

fn trajectory_cmd(
    req: &TrajectoryRequest,
    format: Format,
    source: TrajSource,
    curve: Option<Curve>,
    output: Option<&Path>,
) -> CliResult<Output> {
    let emit = |text: String| -> CliResult<Output> {
        match output {
            Some(path) => {
                write_file(path, &text)?;
                Ok(Output::Csv(String::new()))
            }
            None => Ok(Output::Csv(text)),
        }
    };
    if let Some(curve) = curve {
        if source != TrajSource::Closed {
            return Err(Error::InvalidInput("curves are drawn from the closed-form trajectory only".into()).into());
        }
        let samples = req.closed()?;
        let (header, rows): (&[&str], Vec<Vec<f64>>) = match curve {
            Curve::MuOfR => {
                let rows = samples
                    .iter()
                    .map(|(t, s)| {
                        let r = params_from_cm(&s.cov)?.r;
                        Ok(vec![r, curve_mu(&req.p0, &req.fp, r, *t)?])
                    })
                    .collect::<CliResult<_>>()?;
                (&["r", "mu"], rows)
            }
            Curve::ThetaParam => {
                let rows = samples
                    .iter()
                    .map(|(_, s)| {
                        let th = params_from_cm(&s.cov)?.theta;
                        let (mu, r) = curve_params_of_theta(&req.p0, &req.fp, th)?;
                        Ok(vec![th, time_from_theta(&req.p0, &req.fp, th)?, mu, r])
                    })
                    .collect::<CliResult<_>>()?;
                (&["theta", "t", "mu", "r"], rows)
            }
        };
        return emit(render(format, header, &rows));
    }
    let rows_of = |samples: &[(f64, GaussianState)]| -> CliResult<Vec<Vec<f64>>> {
        samples.iter().map(|(t, s)| trajectory_row(*t, s, &req.fp)).collect()
    };
    match source {
        TrajSource::Closed => emit(render(format, &TRAJECTORY_HEADER, &rows_of(&req.closed()?)?)),
        TrajSource::Oracle => emit(render(format, &TRAJECTORY_HEADER, &rows_of(&req.oracle()?)?)),
        TrajSource::Both => {
            let prefix = output.ok_or_else(|| {
                CliError::Core(Error::InvalidInput("--source both writes two files and needs --output".into()))
            })?;
            let closed = req.closed()?;
            let oracle = req.oracle()?;
            let deviation = closed
                .iter()
                .zip(&oracle)
                .map(|((_, a), (_, b))| a.cov.max_abs_diff(&b.cov))
                .fold(0.0, f64::max);
            let ext = match format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            let paths: Vec<PathBuf> = ["closed", "oracle"]
                .iter()
                .map(|tag| PathBuf::from(format!("{}.{tag}.{ext}", prefix.display())))
                .collect();
            write_file(&paths[0], &render(format, &TRAJECTORY_HEADER, &rows_of(&closed)?))?;
            write_file(&paths[1], &render(format, &TRAJECTORY_HEADER, &rows_of(&oracle)?))?;
            let inputs = json!({ "p0": req.p0, "channel": channel_json(&req.fp), "t_max": req.t_max, "steps": req.steps, "dt": req.cfg.dt });
            let outputs = json!({
                "files": paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
                "max_deviation": deviation,
                "tolerance": SOURCE_AGREEMENT,
                "agree": deviation <= SOURCE_AGREEMENT,
            });
            Ok(report("trajectory", inputs, outputs))
        }
    }
}

fn sweep_var_name(v: SweepVar) -> &'static str {
    match v {
        SweepVar::Mu0 => "mu0",
        SweepVar::R0 => "r0",
        SweepVar::Theta0 => "theta0",
        SweepVar::Epsilon => "epsilon",
        SweepVar::RMax => "r_max",
        SweepVar::MuFp => "mu_fp",
        SweepVar::RFp => "r_fp",
        SweepVar::ThetaFp => "theta_fp",
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep_cmd(
    kind: TimeKind,
    vary: SweepVar,
    from: f64,
    to: f64,
    points: usize,
    format: Format,
    state: &StateArgs,
    channel: &ChannelArgs,
    target: &TargetArgs,
) -> CliResult<Output> {
    if points < 2 || !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidInput(format!("need finite bounds and at least 2 points, got {points}")).into());
    }
    let mode = target.mode.single()?;
    let grid: Vec<f64> = (0..points).map(|i| from + (to - from) * i as f64 / (points - 1) as f64).collect();
    // rayon's indexed collect keeps grid order
    let rows: Vec<(f64, Result<TimeResult, Error>)> = grid
        .par_iter()
        .map(|&x| {
            let (mut st, mut ch, mut tg) = (state.clone(), channel.clone(), target.clone());
            match vary {
                SweepVar::Mu0 => st.mu0 = x,
                SweepVar::R0 => st.r0 = x,
                SweepVar::Theta0 => st.theta0 = x,
                SweepVar::Epsilon => tg.epsilon = x,
                SweepVar::RMax => tg.r_max = Some(x),
                SweepVar::MuFp => ch.mu_fp = Some(x),
                SweepVar::RFp => ch.r_fp = Some(x),
                SweepVar::ThetaFp => ch.theta_fp = Some(x),
            }
            let res = (|| {
                let fp = ch.resolve()?;
                time_for(kind, &st.params()?, &fp, &tg.tolerance(mode)?, &tg.budget()?)
            })();
            (x, res)
        })
        .collect();
    let name = sweep_var_name(vary);
    match format {
        Format::Csv => {
            let mut out = format!("{name},time,mu_stop,error\n");
            for (x, res) in &rows {
                match res {
                    Ok(r) => out.push_str(&format!("{x},{},{},\n", r.time, r.mu_stop)),
                    Err(e) => out.push_str(&format!("{x},,,\"{}\"\n", e.to_string().replace('"', "'"))),
                }
            }
            Ok(Output::Csv(out))
        }
        Format::Json => {
            let points: Vec<Value> = rows
                .iter()
                .map(|(x, res)| match res {
                    Ok(r) => json!({ name: x, "time": r.time, "mu_stop": r.mu_stop }),
                    Err(e) => json!({ name: x, "error": e.to_string() }),
                })
                .collect();
            let inputs = json!({
                "kind": kind_name(kind),
                "vary": name,
                "from": from,
                "to": to,
                "points": points.len(),
                "state": state.to_json(),
                "target": target.to_json(),
                "mode": mode_name(mode),
            });
            Ok(report(&format!("sweep {}", kind_name(kind)), inputs, json!({ "points": points })))
        }
    }
}
