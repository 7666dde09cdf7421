//! Acceptance suite. Each test prints one PASS/FAIL line for its criterion.
//!
//! Run with `cargo test -p gaussrelax --test acceptance -- --nocapture --test-threads 1`.

mod common;

use std::f64::consts::{FRAC_PI_4, PI};

use common::{generic_bath, generic_fp, generic_state, params, rel, rng, verdict};
use gaussrelax::channel::{evolve_free, fixed_point, params_evolution, velocity_field};
use gaussrelax::control::{
    extremal_points, heating_time_limit, plan_cooling, plan_heating, pure_fp_times, stopping_set, t_free,
    worst_case, ControlBudget, ExtremalKind, Protocol, Segment, Tolerance,
};
use gaussrelax::gaussian::{cm_from_params, params_from_cm, phase_distance, Displacement, GaussianState};
use gaussrelax::oracle::{greedy_min_time, integrate_free, integrate_pinned, simulate_protocol, IntegratorConfig};
use gaussrelax::trajectory::{aligned_mu_of_r, curve_mu_of_r, curve_params_of_theta, curve_points_of_r, time_from_theta};
use gaussrelax::{ChannelFixedPoint, ModeParams};
use rand::Rng;

#[test]
fn oracle_equivalence() {
    let mut rng = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let bath = generic_bath(&mut rng);
        let fp = fixed_point(&bath).unwrap();
        let p0 = generic_state(&mut rng);
        let d = Displacement::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)).unwrap();
        let s0 = GaussianState::from_params(&p0, d);
        let cfg = IntegratorConfig::default_for(bath.gamma);
        let trace = integrate_free(&s0, &fp, 5.0 / bath.gamma, &cfg).unwrap();
        for s in &trace.samples {
            let exact = evolve_free(&s0, &fp, s.t).unwrap();
            worst = worst.max(s.cov.max_abs_diff(&exact.cov));
        }
    }
    verdict("oracle-equivalence", worst <= 1e-8, format!("1000 scenarios, max entry error {worst:.3e} (tol 1e-8)"));
}

#[test]
fn williamson_roundtrip() {
    let mut rng = rng(2);
    let (mut worst_rt, mut worst_det) = (0.0f64, 0.0f64);
    let mut worst_det_r = 0.0;
    for _ in 0..10_000 {
        let p = params(&mut rng, (0.01, 1.0), (0.0, 5.0));
        let c = cm_from_params(&p);
        let q = params_from_cm(&c).unwrap();
        let mut err = (q.mu - p.mu).abs().max((q.r - p.r).abs());
        // the phase is meaningless at zero squeeze
        if (2.0 * p.r).sinh() > 1e-6 {
            err = err.max(phase_distance(q.theta, p.theta));
        }
        worst_rt = worst_rt.max(err);
        let det_err = (c.det() * p.mu * p.mu - 1.0).abs();
        if det_err > worst_det {
            worst_det = det_err;
            worst_det_r = p.r;
        }
    }
    verdict(
        "williamson-roundtrip",
        worst_rt <= 1e-9 && worst_det <= 1e-12,
        format!(
            "10000 params, roundtrip error {worst_rt:.3e} (tol 1e-9), determinant law error {worst_det:.3e} at r = {worst_det_r:.3} (tol 1e-12)"
        ),
    );
}

/// Draws scenarios until `n` have an exact relaxation time above `1/γ`.
fn benchmark_scenarios(seed: u64, n: usize, eps: f64) -> Vec<(ModeParams, ChannelFixedPoint, f64)> {
    let mut rng = rng(seed);
    let tol = Tolerance::exact(eps).unwrap();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let fp = generic_fp(&mut rng);
        let p0 = generic_state(&mut rng);
        let t = t_free(&p0, &fp, &tol).unwrap();
        if fp.gamma() * t > 1.0 {
            out.push((p0, fp, t));
        }
    }
    out
}

#[test]
fn benchmark_time_exact_vs_closed_form() {
    let mut worst = 0.0f64;
    for (p0, fp, exact) in benchmark_scenarios(3, 100, 1e-4) {
        let asym = t_free(&p0, &fp, &Tolerance::asymptotic(1e-4).unwrap()).unwrap();
        worst = worst.max(rel(asym, exact));
    }
    verdict("benchmark-time", worst <= 0.05, format!("100 scenarios at eps 1e-4, max relative gap {worst:.4} (tol 0.05)"));
}

#[test]
fn benchmark_time_scaling() {
    let eps: f64 = 1e-8;
    let tol = Tolerance::asymptotic(eps).unwrap();
    let mut ratios = Vec::new();
    for (p0, fp, _) in benchmark_scenarios(33, 20, 1e-4) {
        let t = t_free(&p0, &fp, &tol).unwrap();
        ratios.push(t * 2.0 * fp.gamma() / eps.ln().abs());
    }
    let inside = ratios.iter().filter(|r| (0.9..=1.1).contains(*r)).count();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    verdict(
        "benchmark-scaling",
        inside == ratios.len(),
        format!("{inside}/20 ratios t_free*2g/|ln eps| in [0.9, 1.1] at eps 1e-8, range [{lo:.4}, {hi:.4}]"),
    );
}

#[test]
fn cooling_scaling_and_replay() {
    let fp = ChannelFixedPoint::from_params(1.0, ModeParams::new(0.5, 0.3, 0.2).unwrap()).unwrap();
    let p0 = ModeParams::new(0.2, 0.7, 0.4).unwrap();
    let b = ControlBudget::unbounded();
    let eps: f64 = 1e-8;
    let plan = plan_cooling(&p0, &fp, &Tolerance::exact(eps).unwrap(), &b).unwrap();
    let ratio = plan.predicted_time * 2.0 * fp.gamma() / eps.ln().abs();
    let mut worst_replay = 0.0f64;
    for e in [1e-4, 1e-8] {
        let plan = plan_cooling(&p0, &fp, &Tolerance::exact(e).unwrap(), &b).unwrap();
        let s0 = GaussianState::from_params(&p0, Displacement::new(0.5, -1.0).unwrap());
        let out = simulate_protocol(&s0, &fp, &plan.protocol, &IntegratorConfig::default_for(fp.gamma())).unwrap();
        worst_replay = worst_replay.max((out.final_fidelity - (1.0 - e)).abs());
    }
    verdict(
        "cooling-scaling",
        (ratio - 1.0).abs() <= 0.05 && worst_replay <= 1e-6,
        format!("T_cool*2g/|ln eps| = {ratio:.4} at eps 1e-8 (tol 5%), replay fidelity error {worst_replay:.3e} (tol 1e-6)"),
    );
}

#[test]
fn thermal_no_speedup() {
    let mut rng = rng(5);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let gamma = rng.gen_range(0.5..=2.0);
        let muf = rng.gen_range(0.1..0.9);
        let fp = ChannelFixedPoint::from_params(gamma, ModeParams::new(muf, 0.0, 0.0).unwrap()).unwrap();
        let p0 = ModeParams::new(rng.gen_range(0.02..muf * 0.95), 0.0, 0.0).unwrap();
        let tol = Tolerance::exact(1e-4).unwrap();
        let cool = plan_cooling(&p0, &fp, &tol, &ControlBudget::unbounded()).unwrap().predicted_time;
        let free = t_free(&p0, &fp, &tol).unwrap();
        worst = worst.max((cool - free).abs() * gamma);
    }
    verdict("thermal-no-speedup", worst <= 1e-9, format!("20 thermal pairs, max |T_cool - T_free| = {worst:.3e}/g (tol 1e-9/g)"));
}

/// Fidelity of a heating replay whose pinned segment runs for `t`.
fn heating_replay_fidelity(proto: &Protocol, t: f64, p0: &ModeParams, fp: &ChannelFixedPoint) -> f64 {
    let mut proto = proto.clone();
    if let Segment::PinnedDecay { duration, .. } = &mut proto.segments[1] {
        *duration = t;
    }
    let cfg = IntegratorConfig { dt: 1e-5 / fp.gamma(), ..IntegratorConfig::default_for(fp.gamma()) };
    let s0 = GaussianState::from_params(p0, Displacement::zero());
    simulate_protocol(&s0, fp, &proto, &cfg).unwrap().final_fidelity
}

#[test]
fn heating_finiteness_and_replay() {
    let fp = ChannelFixedPoint::from_params(1.0, ModeParams::new(0.5, 0.0, 0.0).unwrap()).unwrap();
    let p0 = ModeParams::new(0.8, 0.0, 0.0).unwrap();
    let b = ControlBudget::new(1.0).unwrap();
    let limit = heating_time_limit(0.8, &fp, 1.0);
    let t12 = plan_heating(&p0, &fp, &Tolerance::exact(1e-12).unwrap(), &b).unwrap().predicted_time;
    let gap = (t12 - limit).abs() * fp.gamma();
    let delta = 1e-6 / fp.gamma();
    let mut bracketed = true;
    for eps in [1e-4, 1e-12] {
        let plan = plan_heating(&p0, &fp, &Tolerance::exact(eps).unwrap(), &b).unwrap();
        let t = plan.predicted_time;
        let before = heating_replay_fidelity(&plan.protocol, t - delta, &p0, &fp);
        let after = heating_replay_fidelity(&plan.protocol, t + delta, &p0, &fp);
        bracketed &= before < 1.0 - eps && after >= 1.0 - eps;
    }
    verdict(
        "heating-finite",
        gap <= 0.05 && bracketed,
        format!(
            "T_heat(1e-12) = {t12:.10}, limit {limit:.10}, gap {gap:.3e}/g (tol 0.05/g); replay crosses 1-eps within 1e-6/g: {bracketed}"
        ),
    );
}

#[test]
fn speed_bounds() {
    let mut rng = rng(7);
    let mut violations = 0usize;
    let mut samples = 0usize;
    for _ in 0..5 {
        let fp = generic_fp(&mut rng);
        let rm = rng.gen_range(fp.params.r.max(0.5)..3.0);
        let pts = extremal_points(&fp, &ControlBudget::new(rm).unwrap());
        let top = pts.iter().find(|p| p.kind == ExtremalKind::GlobalMax).unwrap();
        let bottom = pts.iter().find(|p| p.kind == ExtremalKind::BoundaryMin).unwrap();
        let muf = fp.params.mu;
        for k in 1..=4 {
            for mu in [muf * k as f64 / 5.0, muf + (1.0 - muf) * k as f64 / 5.0] {
                let bound = if mu < muf { top.speed_at(mu, &fp) } else { bottom.speed_at(mu, &fp) };
                for _ in 0..10_000 {
                    let p = ModeParams::new(mu, rng.gen_range(-rm..=rm), rng.gen_range(0.0..PI)).unwrap();
                    let v = velocity_field(&p, &fp).dmu_dt;
                    let ok = if mu < muf { bound >= v - 1e-10 } else { bound <= v + 1e-10 };
                    violations += usize::from(!ok);
                    samples += 1;
                }
            }
        }
    }
    verdict("speed-bounds", violations == 0, format!("{violations} violations over {samples} samples (tol 1e-10)"));
}

#[test]
fn greedy_corroboration() {
    let mut rng = rng(8);
    let tol = Tolerance::exact(1e-4).unwrap();
    let (mut worst_cool, mut worst_heat) = (0.0f64, 0.0f64);
    let (mut n_cool, mut n_heat) = (0, 0);
    while n_cool < 20 || n_heat < 20 {
        let fp = generic_fp(&mut rng);
        let p0 = generic_state(&mut rng);
        let b = ControlBudget::new(rng.gen_range(fp.params.r.max(0.5)..2.0)).unwrap();
        let cfg = IntegratorConfig::default_for(fp.gamma());
        if p0.mu < fp.params.mu && n_cool < 20 {
            let plan = plan_cooling(&p0, &fp, &tol, &b).unwrap().predicted_time;
            let g = greedy_min_time(&p0, &fp, &tol, &b, &cfg).unwrap();
            worst_cool = worst_cool.max(rel(g, plan));
            n_cool += 1;
        } else if p0.mu > fp.params.mu && n_heat < 20 {
            let plan = plan_heating(&p0, &fp, &tol, &b).unwrap().predicted_time;
            let g = greedy_min_time(&p0, &fp, &tol, &b, &cfg).unwrap();
            worst_heat = worst_heat.max(rel(g, plan));
            n_heat += 1;
        }
    }
    verdict(
        "greedy-corroboration",
        worst_cool <= 5e-3 && worst_heat <= 5e-3,
        format!("max relative gap cooling {worst_cool:.3e}, heating {worst_heat:.3e} over 20+20 scenarios (tol 5e-3)"),
    );
}

#[test]
fn stopping_set_is_stationary() {
    let mut rng = rng(9);
    let (mut worst_rate, mut worst_drift) = (0.0f64, 0.0f64);
    let mut rejected = true;
    for _ in 0..10 {
        let fp = generic_fp(&mut rng);
        let mu = rng.gen_range(0.05..=1.0) * fp.params.mu;
        let set = stopping_set(&fp, mu).unwrap();
        let mut pts: Vec<(f64, f64)> = set.canonical().iter().map(|p| (p.r, p.theta)).collect();
        for (th, rs) in set.sample(36) {
            pts.extend(rs.into_iter().map(|r| (r, th)));
        }
        for &(r, th) in &pts {
            let v = velocity_field(&ModeParams { mu, r, theta: th }, &fp).dmu_dt;
            worst_rate = worst_rate.max(v.abs() / fp.gamma());
        }
        let cfg = IntegratorConfig::default_for(fp.gamma());
        for &(r, th) in pts.iter().step_by(7) {
            let tr = integrate_pinned(&ModeParams { mu, r: 0.0, theta: 0.0 }, &fp, r, th, 10.0 / fp.gamma(), &cfg).unwrap();
            for s in &tr.samples {
                worst_drift = worst_drift.max((s.params.mu - mu).abs());
            }
        }
        let above = (fp.params.mu + 1.0) / 2.0;
        rejected &= matches!(stopping_set(&fp, above), Err(gaussrelax::Error::Infeasible(_)));
    }
    verdict(
        "stopping-set",
        worst_rate <= 1e-10 && worst_drift <= 1e-6 && rejected,
        format!("max |dmu/dt| {worst_rate:.3e}*g (tol 1e-10), pinned drift {worst_drift:.3e} (tol 1e-6), mu > mu_fp rejected: {rejected}"),
    );
}

#[test]
fn pure_fixed_point() {
    let fp = ChannelFixedPoint::from_params(1.0, ModeParams::new(1.0, 0.4, 0.3).unwrap()).unwrap();
    let p0 = ModeParams::new(0.5, 0.4, 0.3).unwrap();
    let eps: f64 = 1e-12;
    let t = pure_fp_times(&p0, &fp, &Tolerance::asymptotic(eps).unwrap()).unwrap();
    let ratio = t.t_cool_pure / t.t_free_pure;
    let l = eps.ln().abs();
    let (sf, sc) = (t.t_free_pure * fp.gamma() / l, t.t_cool_pure * fp.gamma() / l);
    verdict(
        "pure-fixed-point",
        (0.9..=1.0).contains(&ratio) && (sf - 1.0).abs() <= 0.05 && (sc - 1.0).abs() <= 0.05,
        format!("t_cool/t_free = {ratio:.4} at eps 1e-12; g*t/|ln eps| free {sf:.4}, cool {sc:.4} (tol 5%)"),
    );
}

#[test]
fn worst_case_gain() {
    let fp = ChannelFixedPoint::from_params(1.0, ModeParams::new(0.5, 0.0, 0.0).unwrap()).unwrap();
    let tol = Tolerance::asymptotic(1e-6).unwrap();
    let w = worst_case(&fp, &tol, 20.0, 1e-3).unwrap();
    let identity = (w.gain - w.t_free_max / w.t_fast_max).abs();
    let formula = 1.0 + 40.0 / (1e-3f64 * 1e-3).ln().abs();
    let gap = (w.gain - formula).abs();
    // exact free relaxation from the worst-case corner
    let mut worst_cross = 0.0f64;
    for r0 in [10.0, 20.0] {
        let w = worst_case(&fp, &tol, r0, 1e-3).unwrap();
        let p0 = ModeParams::new(1e-3 * fp.params.mu, r0, fp.params.theta + FRAC_PI_4).unwrap();
        let exact = t_free(&p0, &fp, &Tolerance::exact(1e-6).unwrap()).unwrap();
        worst_cross = worst_cross.max(rel(exact, w.t_free_max));
    }
    verdict(
        "worst-case-gain",
        identity <= 1e-12 && gap <= 1e-6 && worst_cross <= 0.05,
        format!(
            "gain {:.10} vs 1 + 40/13.8155 = {formula:.10} (gap {gap:.1e}), identity error {identity:.1e}, exact t_free within {:.2}% of t_free_max",
            w.gain,
            100.0 * worst_cross
        ),
    );
}

#[test]
fn trajectory_curves() {
    let mut rng = rng(12);
    let (mut e_mu_r, mut e_mu_th, mut e_r_th, mut e_t_th) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut checked = 0usize;
    for _ in 0..100 {
        let fp = generic_fp(&mut rng);
        let p0 = generic_state(&mut rng);
        let (r0, rf) = (p0.r, fp.params.r);
        for &gt in &[0.1, 0.3, 0.7, 1.5, 3.0] {
            let t = gt / fp.gamma();
            let p = params_evolution(&p0, &fp, t);
            if p.r >= r0.min(rf) && p.r <= r0.max(rf) {
                e_mu_r = e_mu_r.max(rel(curve_mu_of_r(&p0, &fp, p.r).unwrap(), p.mu));
            } else {
                let pts = curve_points_of_r(&p0, &fp, p.r).unwrap();
                let best = pts.iter().map(|q| rel(q.mu, p.mu)).fold(f64::INFINITY, f64::min);
                e_mu_r = e_mu_r.max(best);
            }
            let tt = time_from_theta(&p0, &fp, p.theta).unwrap();
            e_t_th = e_t_th.max((tt - t).abs() / t.max(1.0));
            let (mu, r) = curve_params_of_theta(&p0, &fp, p.theta).unwrap();
            e_mu_th = e_mu_th.max(rel(mu, p.mu));
            e_r_th = e_r_th.max((r - p.r).abs() / p.r.max(1.0));
            checked += 1;
        }
    }
    // aligned trajectories and the endpoint identities of their curve
    let mut e_aligned = 0.0f64;
    let mut e_end = 0.0f64;
    for _ in 0..100 {
        let fp = generic_fp(&mut rng);
        let p0 = ModeParams::new(rng.gen_range(0.05..0.95), rng.gen_range(0.0..1.5), fp.params.theta).unwrap();
        let (mu0, r0, muf, rf) = (p0.mu, p0.r, fp.params.mu, fp.params.r);
        e_end = e_end
            .max((aligned_mu_of_r(mu0, r0, muf, rf, r0).unwrap() - mu0).abs())
            .max((aligned_mu_of_r(mu0, r0, muf, rf, rf).unwrap() - muf).abs());
        for &gt in &[0.1, 0.5, 2.0] {
            let p = params_evolution(&p0, &fp, gt / fp.gamma());
            e_aligned = e_aligned.max(rel(aligned_mu_of_r(mu0, r0, muf, rf, p.r).unwrap(), p.mu));
        }
    }
    let worst = e_mu_r.max(e_mu_th).max(e_r_th).max(e_t_th).max(e_aligned).max(e_end);
    verdict(
        "trajectory-curves",
        worst <= 1e-8,
        format!(
            "{checked} samples: mu(r) {e_mu_r:.2e}, mu(theta) {e_mu_th:.2e}, r(theta) {e_r_th:.2e}, t(theta) {e_t_th:.2e}; aligned curve {e_aligned:.2e}, endpoints {e_end:.2e} (tol 1e-8)"
        ),
    );
}
