//! Seeded scenario generators shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use gaussrelax::{BathSpec, ChannelFixedPoint, ModeParams};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn params(rng: &mut ChaCha8Rng, mu: (f64, f64), r: (f64, f64)) -> ModeParams {
    ModeParams::new(
        rng.gen_range(mu.0..=mu.1),
        rng.gen_range(r.0..=r.1),
        rng.gen_range(0.0..PI),
    )
    .unwrap()
}

/// Initial state of a generic scenario.
pub fn generic_state(rng: &mut ChaCha8Rng) -> ModeParams {
    params(rng, (0.05, 0.95), (0.0, 1.5))
}

/// Mixed fixed point of a generic scenario, with `γ ∈ [0.5, 2]`.
pub fn generic_fp(rng: &mut ChaCha8Rng) -> ChannelFixedPoint {
    let gamma = rng.gen_range(0.5..=2.0);
    let p = params(rng, (0.1, 0.9), (0.0, 1.0));
    ChannelFixedPoint::from_params(gamma, p).unwrap()
}

/// Bath drawn directly: `N ∈ [0, 2]`, `|M|` anywhere inside the
/// complete-positivity disc.
pub fn generic_bath(rng: &mut ChaCha8Rng) -> BathSpec {
    let gamma = rng.gen_range(0.5..=2.0);
    let n: f64 = rng.gen_range(0.0..=2.0);
    let m = rng.gen_range(0.0..=1.0) * (n * (n + 1.0)).sqrt();
    let arg = rng.gen_range(0.0..2.0 * PI);
    BathSpec::new(gamma, n, m * arg.cos(), m * arg.sin()).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Prints the pass/fail line and fails the test on a miss.
pub fn verdict(id: &str, ok: bool, detail: String) {
    println!("{} {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{id} failed: {detail}");
}
