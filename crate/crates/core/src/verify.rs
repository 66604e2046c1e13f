//! Randomized and grid checks of every closed-form bound against exact
//! evaluation.
//!
//! Sample `i` of a suite draws from the stream `(seed, i)`. A report keeps
//! the largest observed slack (`lhs - rhs` of the checked inequality, or the
//! residual for identities) and the lowest-index counterexample.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::info::{channel_mutual_information, Channel, Distribution, LogBase};
use crate::memory::{relaxation_upper_bound, repetition_relaxation_time};
use crate::network::{exact_io_mutual_information, NoisyNetwork, DEFAULT_WIDTH_CAP};
use crate::oracle::MIN_INPUT_INFORMATION;
use crate::quadratic::{appendix_identity_check, rayleigh_sup, INTERIOR_THRESHOLD};
use crate::reliability::theorem2_bound;
use crate::rng::{simplex_point, stream};
use crate::sdpi::{
    independent_layer_bound, independent_layer_channel, theorem1_bound, LayerNoiseSpec,
    DEFAULT_LAYER_CAP,
};

/// Slack allowed on bound inequalities.
pub const BOUND_TOLERANCE: f64 = 1e-9;
/// Largest accepted relative residual of an identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;
/// Square forms may dip this far below zero from rounding.
pub const SQUARE_FORM_FLOOR: f64 = -1e-12;
/// Random interior input distributions tried per channel in the
/// appendix-identity suite.
pub const RAYLEIGH_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    SdpiFuzz,
    AppendixIdentity,
    Prop1Equality,
    MemorySandwich,
    Theorem2Network,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::SdpiFuzz,
        Suite::AppendixIdentity,
        Suite::Prop1Equality,
        Suite::MemorySandwich,
        Suite::Theorem2Network,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SdpiFuzz => "sdpi-fuzz",
            Suite::AppendixIdentity => "appendix-identity",
            Suite::Prop1Equality => "prop1-equality",
            Suite::MemorySandwich => "memory-sandwich",
            Suite::Theorem2Network => "theorem2-network",
        }
    }

    /// Sample count used when no budget is given. Grid suites ignore the
    /// budget.
    pub fn default_budget(self) -> usize {
        match self {
            Suite::SdpiFuzz => 10_000,
            Suite::AppendixIdentity => 1_000,
            Suite::Theorem2Network => 100,
            Suite::Prop1Equality | Suite::MemorySandwich => 0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::Parse(format!(
                    "unknown suite '{s}' (known: {}, all)",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub passed: bool,
    pub checked: usize,
    /// Samples where the checked quantity is undefined.
    pub skipped: usize,
    /// Largest slack seen; a pass has this at or below the tolerance.
    pub worst: f64,
    pub tolerance: f64,
    pub counterexample: Option<Value>,
    pub budget: usize,
    pub seed: u64,
}

enum Sample {
    Skipped,
    Checked { worst: f64, failure: Option<Value> },
}

impl Sample {
    fn check(worst: f64, tolerance: f64, detail: impl FnOnce() -> Value) -> Self {
        let failure = (worst > tolerance || worst.is_nan()).then(detail);
        Sample::Checked { worst, failure }
    }
}

fn collect(
    suite: Suite,
    budget: usize,
    seed: u64,
    tolerance: f64,
    samples: Vec<Sample>,
) -> VerifyReport {
    let mut report = VerifyReport {
        suite,
        passed: true,
        checked: 0,
        skipped: 0,
        worst: f64::NEG_INFINITY,
        tolerance,
        counterexample: None,
        budget,
        seed,
    };
    for s in samples {
        match s {
            Sample::Skipped => report.skipped += 1,
            Sample::Checked { worst, failure } => {
                report.checked += 1;
                report.worst = report.worst.max(worst);
                if let Some(f) = failure {
                    report.passed = false;
                    report.counterexample.get_or_insert(f);
                }
            }
        }
    }
    report
}

fn random_channel<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Channel {
    Channel::new((0..n).map(|_| simplex_point(rng, m)).collect()).expect("simplex rows")
}

fn fuzz_sample(seed: u64, i: u64) -> Result<Sample> {
    let mut rng = stream(seed, i);
    let (nx, ny, nz) = (
        rng.random_range(2..=4),
        rng.random_range(2..=4),
        rng.random_range(2..=4),
    );
    let px = Distribution::new(simplex_point(&mut rng, nx))?;
    let c_xy = random_channel(&mut rng, nx, ny);
    let c_yz = random_channel(&mut rng, ny, nz);
    let i_xy = channel_mutual_information(&px, &c_xy)?;
    if i_xy <= MIN_INPUT_INFORMATION {
        return Ok(Sample::Skipped);
    }
    let i_xz = channel_mutual_information(&px, &c_xy.compose(&c_yz)?)?;
    let eta = theorem1_bound(&c_yz)?.eta;
    let ratio = i_xz / i_xy;
    Ok(Sample::check(ratio - eta, BOUND_TOLERANCE, || {
        json!({
            "sample": i, "ratio": ratio, "eta": eta,
            "px": px.probs(), "channel_xy": c_xy.to_rows(), "channel_yz": c_yz.to_rows(),
        })
    }))
}

fn interior_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Option<Distribution> {
    let p = simplex_point(rng, n);
    if p.iter().any(|&x| x < INTERIOR_THRESHOLD) {
        return None;
    }
    Distribution::new(p).ok()
}

fn identity_sample(seed: u64, i: u64) -> Result<Sample> {
    let mut rng = stream(seed, i);
    let n = rng.random_range(2..=6);
    let m = rng.random_range(2..=6);
    let c = random_channel(&mut rng, n, m);
    let Some(p) = interior_point(&mut rng, n) else {
        return Ok(Sample::Skipped);
    };
    let coeffs: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
    let r = appendix_identity_check(&c, &p, &coeffs)?;
    let eta = theorem1_bound(&c)?.eta;

    let mut rayleigh_worst = f64::NEG_INFINITY;
    let mut rayleigh_failure = None;
    for _ in 0..RAYLEIGH_POINTS {
        let Some(q) = interior_point(&mut rng, n) else {
            continue;
        };
        let sup = match rayleigh_sup(&c, &q) {
            Ok(v) => v,
            Err(Error::IllConditioned(_)) => continue,
            Err(e) => return Err(e),
        };
        if sup - eta > rayleigh_worst {
            rayleigh_worst = sup - eta;
            if rayleigh_worst > BOUND_TOLERANCE && rayleigh_failure.is_none() {
                rayleigh_failure = Some(json!({"p": q.probs(), "rayleigh_sup": sup}));
            }
        }
    }

    // fold every check into one slack measured against the shared tolerance
    let worst = r
        .identity_residual
        .max(r.equal_rows_residual)
        .max(r.equal_rows_q_f)
        .max((SQUARE_FORM_FLOOR - r.min_pair_form) + IDENTITY_TOLERANCE)
        .max(rayleigh_worst);
    Ok(Sample::check(worst, IDENTITY_TOLERANCE, || {
        json!({
            "sample": i, "channel": c.to_rows(), "p": p.probs(), "c": coeffs,
            "report": r, "eta": eta, "rayleigh_failure": rayleigh_failure,
        })
    }))
}

fn network_sample(seed: u64, i: u64) -> Result<Sample> {
    let mut rng = stream(seed, i);
    let xi = [0.1, 0.2, 0.3][rng.random_range(0..3)];
    let input_width = rng.random_range(1..=5);
    let depth = rng.random_range(1..=4);
    let widths: Vec<usize> = (0..depth).map(|_| rng.random_range(1..=5)).collect();
    let net = NoisyNetwork::random(&mut rng, input_width, &widths, xi)?;
    let px = Distribution::new(simplex_point(&mut rng, 1 << input_width))?;
    let h_x = px.entropy(LogBase::Nats);
    let mi = exact_io_mutual_information(&net, &px, LogBase::Nats, DEFAULT_WIDTH_CAP)?;
    let bound = theorem2_bound(&widths, xi, h_x)?;
    let worst = (mi - bound).max(mi - h_x);
    Ok(Sample::check(
        worst,
        BOUND_TOLERANCE,
        || json!({"sample": i, "mi": mi, "bound": bound, "h_x": h_x, "network": net}),
    ))
}

fn run_random<F>(
    suite: Suite,
    budget: usize,
    seed: u64,
    tolerance: f64,
    f: F,
) -> Result<VerifyReport>
where
    F: Fn(u64, u64) -> Result<Sample> + Sync,
{
    let samples = (0..budget as u64)
        .into_par_iter()
        .map(|i| f(seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(collect(suite, budget, seed, tolerance, samples))
}

fn prop1_equality() -> Result<VerifyReport> {
    let mut samples = Vec::new();
    for n in 1..=8 {
        for xi in [0.05, 0.15, 0.25, 0.35, 0.45] {
            let s = LayerNoiseSpec::new(xi, n)?;
            let exact = theorem1_bound(&independent_layer_channel(&s, DEFAULT_LAYER_CAP)?)?.eta;
            let closed = independent_layer_bound(&s);
            samples.push(Sample::check(
                (exact - closed).abs(),
                BOUND_TOLERANCE,
                || json!({"n": n, "xi": xi, "pair_scan": exact, "closed_form": closed}),
            ));
        }
    }
    Ok(collect(
        Suite::Prop1Equality,
        0,
        0,
        BOUND_TOLERANCE,
        samples,
    ))
}

fn memory_sandwich() -> Result<VerifyReport> {
    let mut samples = Vec::new();
    for n in (5..=25).step_by(2) {
        for k in 0..=30 {
            let xi = 0.1 + k as f64 * 0.01;
            for delta in [0.3, 0.4] {
                let lower = repetition_relaxation_time(n, xi, delta)?.exact;
                let upper = relaxation_upper_bound(n as f64, xi, delta)?.bound;
                samples.push(Sample::check(
                    lower - upper,
                    BOUND_TOLERANCE,
                    || json!({"n": n, "xi": xi, "delta": delta, "lower": lower, "upper": upper}),
                ));
            }
        }
    }
    Ok(collect(
        Suite::MemorySandwich,
        0,
        0,
        BOUND_TOLERANCE,
        samples,
    ))
}

/// Runs one suite. `budget` overrides the default sample count of the
/// randomized suites.
pub fn run_suite(suite: Suite, seed: u64, budget: Option<usize>) -> Result<VerifyReport> {
    let budget = budget.unwrap_or(suite.default_budget());
    match suite {
        Suite::SdpiFuzz => run_random(suite, budget, seed, BOUND_TOLERANCE, fuzz_sample),
        Suite::AppendixIdentity => {
            run_random(suite, budget, seed, IDENTITY_TOLERANCE, identity_sample)
        }
        Suite::Theorem2Network => run_random(suite, budget, seed, BOUND_TOLERANCE, network_sample),
        Suite::Prop1Equality => prop1_equality(),
        Suite::MemorySandwich => memory_sandwich(),
    }
}
