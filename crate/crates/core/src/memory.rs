//! Bounds for storing one logical bit in `n` noisy physical bits that are
//! refreshed every interval, and a Monte Carlo simulator of the
//! majority-vote repetition code.
//!
//! `T` counts refresh intervals; the interval length itself never enters.
//! With `a = 4ξ - 4ξ²` and `Δ = Δ(δ)`:
//!
//! - overhead: `n >= ln(1 - Δ^{1/T}) / ln a`
//! - relaxation time: `T <= ln Δ / ln(1 - a^n)`
//! - repetition code: `T = ln(1 - 2δ) / ln(1 - 2 p_e)`, where `p_e` is the
//!   chance that a majority of bits flip within one interval.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::format::sig;
use crate::reliability::delta_capacity;
use crate::rng::stream;
use crate::sdpi::flip_overlap;

/// `a^n` below which `ln(1 - a^n) ≈ -a^n` holds to about half a percent.
pub const ASYMPTOTIC_THRESHOLD: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MemorySpec {
    pub n: usize,
    pub xi: f64,
    pub delta: f64,
    /// Number of refresh intervals.
    #[serde(rename = "T")]
    pub intervals: usize,
}

impl MemorySpec {
    pub fn new(n: usize, xi: f64, delta: f64, intervals: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange {
                name: "n",
                value: 0.0,
                range: ">= 1",
            });
        }
        check_range("xi", xi, (0.0..0.5).contains(&xi), "[0, 0.5)")?;
        check_range("delta", delta, delta > 0.0 && delta < 0.5, "(0, 0.5)")?;
        if intervals == 0 {
            return Err(Error::OutOfRange {
                name: "T",
                value: 0.0,
                range: ">= 1",
            });
        }
        Ok(Self {
            n,
            xi,
            delta,
            intervals,
        })
    }
}

/// Minimum number of physical bits to keep one bit δ-reliably for `T`
/// intervals.
pub fn overhead_lower_bound(delta: f64, intervals: f64, xi: f64) -> Result<f64> {
    check_range("xi", xi, (0.0..0.5).contains(&xi), "[0, 0.5)")?;
    check_range("T", intervals, intervals > 0.0, "> 0")?;
    let cap = delta_capacity(delta)?;
    let a = flip_overlap(xi);
    if a == 0.0 {
        return Ok(0.0);
    }
    Ok((-cap.powf(1.0 / intervals)).ln_1p() / a.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelaxationUpper {
    pub bound: f64,
    /// `ln(1/Δ) · a^{-n}`, the large-`n` form of the bound.
    pub asymptotic: f64,
    /// True when `a^n` is small enough for the asymptotic form to apply.
    pub asymptotic_valid: bool,
}

/// Longest time any `n`-bit memory can keep one bit δ-reliably. `n` may be
/// fractional so that the relation can be inverted against
/// [`overhead_lower_bound`].
pub fn relaxation_upper_bound(n: f64, xi: f64, delta: f64) -> Result<RelaxationUpper> {
    check_range("n", n, n > 0.0, "> 0")?;
    check_range("xi", xi, (0.0..=0.5).contains(&xi), "[0, 0.5]")?;
    let cap = delta_capacity(delta)?;
    let a = flip_overlap(xi);
    let a_n = a.powf(n);
    let bound = cap.ln() / (-a_n).ln_1p();
    Ok(RelaxationUpper {
        bound,
        asymptotic: -cap.ln() * (-n * a.ln()).exp(),
        asymptotic_valid: a_n <= ASYMPTOTIC_THRESHOLD,
    })
}

/// Smallest flip count that defeats majority decoding; even-`n` ties fail.
fn failure_threshold(n: usize) -> usize {
    n.div_ceil(2)
}

/// Probability that majority decoding of `n` bits fails in one interval:
/// `P[Binomial(n, ξ) >= ⌈n/2⌉]`, summed in log space.
pub fn catastrophic_prob_exact(n: usize, xi: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            range: ">= 1",
        });
    }
    check_range("xi", xi, (0.0..=1.0).contains(&xi), "[0, 1]")?;
    if xi == 0.0 {
        return Ok(0.0);
    }
    if xi == 1.0 {
        return Ok(1.0);
    }
    let (lp, lq) = (xi.ln(), (-xi).ln_1p());
    let k0 = failure_threshold(n);
    // ln C(n, k) built up from ln C(n, 0) = 0
    let mut ln_choose = 0.0;
    let mut terms = Vec::with_capacity(n + 1 - k0);
    for k in 0..=n {
        if k > 0 {
            ln_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        if k >= k0 {
            terms.push(ln_choose + k as f64 * lp + (n - k) as f64 * lq);
        }
    }
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Neumaier summation of exp(term - max)
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for t in terms {
        let x = (t - max).exp();
        let s = sum + x;
        comp += if sum.abs() >= x.abs() {
            (sum - s) + x
        } else {
            (x - s) + sum
        };
        sum = s;
    }
    Ok(((sum + comp).ln() + max).exp().min(1.0))
}

/// Chernoff bound `(4ξ(1-ξ))^{n/2}` on [`catastrophic_prob_exact`].
pub fn catastrophic_prob_chernoff(n: usize, xi: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            range: ">= 1",
        });
    }
    check_range("xi", xi, (0.0..=1.0).contains(&xi), "[0, 1]")?;
    Ok(flip_overlap(xi).powf(n as f64 / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepetitionTime {
    pub p_e: f64,
    /// Relaxation time of the majority-vote repetition code.
    pub exact: f64,
    pub p_e_chernoff: f64,
    /// Same formula with the Chernoff `p_e`; `None` when that bound is vacuous
    /// (`>= 0.5`).
    pub chernoff_lower: Option<f64>,
}

fn repetition_formula(delta: f64, p_e: f64) -> f64 {
    (-2.0 * delta).ln_1p() / (-2.0 * p_e).ln_1p()
}

pub fn repetition_relaxation_time(n: usize, xi: f64, delta: f64) -> Result<RepetitionTime> {
    check_range("delta", delta, delta > 0.0 && delta < 0.5, "(0, 0.5)")?;
    check_range("xi", xi, (0.0..0.5).contains(&xi), "[0, 0.5)")?;
    let p_e = catastrophic_prob_exact(n, xi)?;
    if p_e >= 0.5 {
        return Err(Error::MemoryUseless(p_e));
    }
    let p_e_chernoff = catastrophic_prob_chernoff(n, xi)?;
    Ok(RepetitionTime {
        p_e,
        exact: repetition_formula(delta, p_e),
        p_e_chernoff,
        chernoff_lower: (p_e_chernoff < 0.5).then(|| repetition_formula(delta, p_e_chernoff)),
    })
}

/// `(1 + (1 - 2 p_e)^t) / 2`: probability the repetition code still decodes
/// correctly after `t` intervals.
pub fn analytic_success(p_e: f64, t: usize) -> f64 {
    0.5 * (1.0 + (1.0 - 2.0 * p_e).powi(t as i32))
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub spec: MemorySpec,
    /// Fraction of trials decoding correctly after `t` intervals, `t = 0..=T`.
    pub success_prob: Vec<f64>,
    /// Binomial standard error of each `success_prob` entry.
    pub stderr: Vec<f64>,
    /// First `t` with `success_prob[t] < 1 - δ`.
    pub estimated_relaxation: Option<usize>,
    pub trials: u64,
    pub seed: u64,
}

const TRIAL_CHUNK: u64 = 1024;

/// Majority-vote repetition memory: every interval each bit flips with
/// probability `ξ`, then all bits are rewritten to the majority value.
/// Trial `i` uses the stream `(seed, i)`.
pub fn simulate_memory(spec: &MemorySpec, trials: u64, seed: u64) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0.0,
            range: ">= 1",
        });
    }
    let steps = spec.intervals;
    let threshold = failure_threshold(spec.n);
    let chunks = trials.div_ceil(TRIAL_CHUNK);
    let correct = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; steps + 1];
            for trial in c * TRIAL_CHUNK..((c + 1) * TRIAL_CHUNK).min(trials) {
                let mut rng = stream(seed, trial);
                let mut ok = true;
                counts[0] += 1;
                for count in counts.iter_mut().skip(1) {
                    let flips = (0..spec.n).filter(|_| rng.random_bool(spec.xi)).count();
                    if flips >= threshold {
                        ok = !ok;
                    }
                    *count += u64::from(ok);
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; steps + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let total = trials as f64;
    let success_prob: Vec<f64> = correct.iter().map(|&c| c as f64 / total).collect();
    let stderr = success_prob
        .iter()
        .map(|&p| (p * (1.0 - p) / total).sqrt())
        .collect();
    let estimated_relaxation = success_prob.iter().position(|&p| p < 1.0 - spec.delta);
    Ok(SimulationReport {
        spec: *spec,
        success_prob,
        stderr,
        estimated_relaxation,
        trials,
        seed,
    })
}

impl SimulationReport {
    /// A `#`-prefixed JSON header line, then columns `t,success_prob,stderr`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header = serde_json::json!({
            "spec": self.spec,
            "trials": self.trials,
            "seed": self.seed,
            "estimated_relaxation": self.estimated_relaxation,
        });
        writeln!(w, "# {header}")?;
        writeln!(w, "t,success_prob,stderr")?;
        for (t, (p, e)) in self.success_prob.iter().zip(&self.stderr).enumerate() {
            writeln!(w, "{t},{},{}", sig(*p), sig(*e))?;
        }
        Ok(())
    }
}
