//! Simply layered networks of noisy binary threshold neurons.
//!
//! A neuron computes `y = [Σ w_i x_i + θ >= 0]` and then has its output
//! flipped with probability `ξ`, independently of every other neuron. Layer
//! states are integers in the little-endian bit convention of [`crate::info`]:
//! neuron `i` of a layer is bit `i` of the layer state.
//!
//! JSON format:
//!
//! ```json
//! {"xi": 0.1, "input_width": 2,
//!  "layers": [{"neurons": [{"weights": [1.0, 1.0], "bias": -1.5}]}]}
//! ```

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::info::{Channel, Distribution, JointDistribution, LogBase};
use crate::rng::stream;

/// Default cap on layer width (and fan-in) for exact channel construction.
pub const DEFAULT_WIDTH_CAP: u32 = 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdNeuron {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl ThresholdNeuron {
    pub fn new(weights: Vec<f64>, bias: f64) -> Self {
        Self { weights, bias }
    }

    /// Noiseless output; `sgn(0) = 1`.
    pub fn fire(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                what: "input bits vs neuron weights",
                left: x.len(),
                right: self.weights.len(),
            });
        }
        let activation: f64 = self
            .weights
            .iter()
            .zip(x)
            .filter(|(_, &bit)| bit)
            .map(|(w, _)| w)
            .sum::<f64>()
            + self.bias;
        Ok(activation >= 0.0)
    }

    fn fire_state(&self, state: usize) -> bool {
        let activation: f64 = self
            .weights
            .iter()
            .enumerate()
            .filter(|(i, _)| state >> i & 1 == 1)
            .map(|(_, w)| w)
            .sum::<f64>()
            + self.bias;
        activation >= 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub neurons: Vec<ThresholdNeuron>,
}

impl Layer {
    pub fn width(&self) -> usize {
        self.neurons.len()
    }

    /// Noiseless layer output state for a given input state.
    pub fn output_state(&self, input_state: usize) -> usize {
        self.neurons
            .iter()
            .enumerate()
            .filter(|(_, n)| n.fire_state(input_state))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }
}

/// `2^{fan_in} x 2^{width}` channel: the deterministic threshold map
/// followed by an independent `BSC(ξ)` on every neuron.
pub fn layer_channel(layer: &Layer, fan_in: usize, xi: f64, cap: u32) -> Result<Channel> {
    check_range("xi", xi, (0.0..0.5).contains(&xi), "[0, 0.5)")?;
    let width = layer.width();
    for (what, value) in [("layer width", width), ("layer fan-in", fan_in)] {
        if value > cap as usize {
            return Err(Error::CapExceeded {
                what,
                value,
                cap: cap as usize,
            });
        }
    }
    if let Some(n) = layer.neurons.iter().find(|n| n.weights.len() != fan_in) {
        return Err(Error::DimensionMismatch {
            what: "neuron weights vs layer fan-in",
            left: n.weights.len(),
            right: fan_in,
        });
    }
    let w = width as i32;
    let profile: Vec<f64> = (0..=w)
        .map(|d| xi.powi(d) * (1.0 - xi).powi(w - d))
        .collect();
    let n_in = 1usize << fan_in;
    let n_out = 1usize << width;
    let mut data = Vec::with_capacity(n_in * n_out);
    for s in 0..n_in {
        let y = layer.output_state(s);
        data.extend((0..n_out).map(|t| profile[(y ^ t).count_ones() as usize]));
    }
    Ok(Channel::from_flat_unchecked(n_in, n_out, data))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoisyNetwork {
    pub xi: f64,
    pub input_width: usize,
    pub layers: Vec<Layer>,
}

impl NoisyNetwork {
    pub fn new(input_width: usize, layers: Vec<Layer>, xi: f64) -> Result<Self> {
        check_range("xi", xi, (0.0..0.5).contains(&xi), "[0, 0.5)")?;
        if input_width == 0 {
            return Err(Error::Empty("network input"));
        }
        if layers.is_empty() {
            return Err(Error::Empty("network layers"));
        }
        let mut fan_in = input_width;
        for layer in &layers {
            if layer.width() == 0 {
                return Err(Error::Empty("layer"));
            }
            if let Some(n) = layer.neurons.iter().find(|n| n.weights.len() != fan_in) {
                return Err(Error::DimensionMismatch {
                    what: "neuron weights vs previous layer width",
                    left: n.weights.len(),
                    right: fan_in,
                });
            }
            fan_in = layer.width();
        }
        Ok(Self {
            xi,
            input_width,
            layers,
        })
    }

    /// Random weights in `[-1, 1]` and biases in `[-fan_in/2, fan_in/2]`.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        input_width: usize,
        widths: &[usize],
        xi: f64,
    ) -> Result<Self> {
        let mut fan_in = input_width;
        let mut layers = Vec::with_capacity(widths.len());
        for &w in widths {
            let half = fan_in as f64 / 2.0;
            let neurons = (0..w)
                .map(|_| ThresholdNeuron {
                    weights: (0..fan_in).map(|_| rng.random_range(-1.0..=1.0)).collect(),
                    bias: rng.random_range(-half..=half),
                })
                .collect();
            layers.push(Layer { neurons });
            fan_in = w;
        }
        Self::new(input_width, layers, xi)
    }

    pub fn widths(&self) -> Vec<usize> {
        self.layers.iter().map(Layer::width).collect()
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().map_or(0, Layer::width)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Repr {
            xi: f64,
            input_width: usize,
            layers: Vec<Layer>,
        }
        let r: Repr = serde_json::from_str(s)?;
        Self::new(r.input_width, r.layers, r.xi)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Exact channel from input state to final noisy output state.
    pub fn end_to_end_channel(&self, cap: u32) -> Result<Channel> {
        let mut fan_in = self.input_width;
        let mut total: Option<Channel> = None;
        for layer in &self.layers {
            let c = layer_channel(layer, fan_in, self.xi, cap)?;
            total = Some(match total {
                None => c,
                Some(t) => t.compose(&c)?,
            });
            fan_in = layer.width();
        }
        Ok(total.expect("validated network has at least one layer"))
    }

    /// One stochastic forward pass.
    pub fn sample_output<R: Rng + ?Sized>(&self, input_state: usize, rng: &mut R) -> usize {
        self.layers.iter().fold(input_state, |state, layer| {
            let mut out = layer.output_state(state);
            for i in 0..layer.width() {
                if rng.random_bool(self.xi) {
                    out ^= 1 << i;
                }
            }
            out
        })
    }
}

fn check_input(net: &NoisyNetwork, p_x: &Distribution) -> Result<()> {
    let states = 1usize
        .checked_shl(net.input_width as u32)
        .unwrap_or(usize::MAX);
    if p_x.alphabet_size() != states {
        return Err(Error::DimensionMismatch {
            what: "input distribution size vs 2^input_width",
            left: p_x.alphabet_size(),
            right: states,
        });
    }
    Ok(())
}

/// `I(X; Y_out)` by composing the exact layer channels.
pub fn exact_io_mutual_information(
    net: &NoisyNetwork,
    p_x: &Distribution,
    base: LogBase,
    cap: u32,
) -> Result<f64> {
    check_input(net, p_x)?;
    let channel = net.end_to_end_channel(cap)?;
    Ok(JointDistribution::from_channel(p_x, &channel)?.mutual_information(base))
}

/// Plug-in estimate of `I(X; Y_out)` from simulated forward passes.
///
/// The plug-in estimator is biased upward by roughly
/// `(|X|-1)(|Y|-1) / (2 trials)` nats; no correction is applied.
#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloMi {
    pub estimate: f64,
    /// Delta-method standard error of the plug-in estimate.
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
    pub base: LogBase,
}

const TRIAL_CHUNK: u64 = 4096;

pub fn monte_carlo_io_mi(
    net: &NoisyNetwork,
    p_x: &Distribution,
    trials: u64,
    seed: u64,
    base: LogBase,
) -> Result<MonteCarloMi> {
    check_input(net, p_x)?;
    if trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0.0,
            range: ">= 1",
        });
    }
    let sampler = WeightedIndex::new(p_x.probs())
        .map_err(|e| Error::Parse(format!("input distribution: {e}")))?;
    let chunks = trials.div_ceil(TRIAL_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = BTreeMap::<(usize, usize), u64>::new();
            for t in c * TRIAL_CHUNK..((c + 1) * TRIAL_CHUNK).min(trials) {
                let mut rng = stream(seed, t);
                let x = sampler.sample(&mut rng);
                let y = net.sample_output(x, &mut rng);
                *local.entry((x, y)).or_default() += 1;
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });

    let total = trials as f64;
    let mut px = BTreeMap::<usize, u64>::new();
    let mut py = BTreeMap::<usize, u64>::new();
    for (&(x, y), &n) in &counts {
        *px.entry(x).or_default() += n;
        *py.entry(y).or_default() += n;
    }
    // Σ p(x,y) ln[p(x,y)/(p(x)p(y))] and its second moment.
    let (mut mi, mut second) = (0.0, 0.0);
    for (&(x, y), &n) in &counts {
        let pxy = n as f64 / total;
        let ratio = (n as f64 * total) / (px[&x] as f64 * py[&y] as f64);
        let l = ratio.ln();
        mi += pxy * l;
        second += pxy * l * l;
    }
    let mi = mi.max(0.0);
    let var = ((second - mi * mi) / total).max(0.0);
    Ok(MonteCarloMi {
        estimate: base.from_nats(mi),
        std_error: base.from_nats(var.sqrt()),
        trials,
        seed,
        base,
    })
}
