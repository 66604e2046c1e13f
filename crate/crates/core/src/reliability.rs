//! Information decay through noisy threshold networks and the resulting
//! minimum-size bounds for δ-reliable computation.
//!
//! Throughout, `a = 4ξ - 4ξ²` is the per-neuron Bhattacharyya overlap of a
//! `BSC(ξ)`, and a layer of width `n` contracts mutual information by at most
//! `1 - a^n`.

use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::info::binary_entropy;
use crate::sdpi::flip_overlap;

fn check_xi(xi: f64) -> Result<()> {
    check_range("xi", xi, (0.0..0.5).contains(&xi), "[0, 0.5)")
}

fn check_widths(widths: &[usize]) -> Result<()> {
    if widths.is_empty() {
        return Err(Error::Empty("widths"));
    }
    if widths.contains(&0) {
        return Err(Error::OutOfRange {
            name: "width",
            value: 0.0,
            range: ">= 1",
        });
    }
    Ok(())
}

fn layer_factor(a: f64, width: usize) -> f64 {
    1.0 - a.powi(width as i32)
}

/// `h_x · Π_ℓ (1 - a^{n_ℓ})`: upper bound on `I(X; Y_out)`.
pub fn theorem2_bound(widths: &[usize], xi: f64, h_x: f64) -> Result<f64> {
    check_widths(widths)?;
    check_xi(xi)?;
    check_range("h_x", h_x, h_x >= 0.0, ">= 0")?;
    let a = flip_overlap(xi);
    Ok(h_x * widths.iter().map(|&n| layer_factor(a, n)).product::<f64>())
}

/// Minimum information in bits needed to decode one bit with error at most
/// `δ`: `Δ = 1 + δ log₂ δ + (1-δ) log₂(1-δ)`.
pub fn delta_capacity(delta: f64) -> Result<f64> {
    check_range("delta", delta, (0.0..0.5).contains(&delta), "[0, 0.5)")?;
    Ok(1.0 - binary_entropy(delta) / std::f64::consts::LN_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReliabilitySpec {
    pub delta: f64,
    pub capacity_delta: f64,
}

impl ReliabilitySpec {
    pub fn new(delta: f64) -> Result<Self> {
        Ok(Self {
            delta,
            capacity_delta: delta_capacity(delta)?,
        })
    }
}

/// How the network's output is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Readout {
    /// The given widths are hidden layers, followed by one noisy output neuron.
    #[default]
    OutputNeuron,
    /// The last given layer is read directly; no extra single-neuron factor.
    FeatureExtractor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub lhs: f64,
    pub capacity_delta: f64,
    /// `lhs - Δ`; negative when infeasible.
    pub margin: f64,
}

/// Necessary condition for computing a non-constant function δ-reliably.
pub fn feasibility_check(
    widths: &[usize],
    xi: f64,
    delta: f64,
    readout: Readout,
) -> Result<Feasibility> {
    check_xi(xi)?;
    let capacity_delta = delta_capacity(delta)?;
    match readout {
        // an output neuron with no hidden layers is allowed
        Readout::OutputNeuron if widths.is_empty() => {}
        _ => check_widths(widths)?,
    }
    let a = flip_overlap(xi);
    let mut lhs: f64 = widths.iter().map(|&n| layer_factor(a, n)).product();
    if readout == Readout::OutputNeuron {
        lhs *= 1.0 - a;
    }
    Ok(Feasibility {
        feasible: lhs >= capacity_delta,
        lhs,
        capacity_delta,
        margin: lhs - capacity_delta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "kebab-case")]
pub enum MinNeurons {
    Finite(f64),
    /// No number of hidden neurons suffices at this depth.
    Infeasible,
}

impl MinNeurons {
    pub fn value(self) -> f64 {
        match self {
            MinNeurons::Finite(v) => v,
            MinNeurons::Infeasible => f64::INFINITY,
        }
    }

    pub fn is_feasible(self) -> bool {
        matches!(self, MinNeurons::Finite(_))
    }
}

/// Lower bound `N_s` on the total number of hidden noisy neurons in an
/// `L`-layer network (counting the output neuron as layer `L`).
///
/// For `L = 1` there are no hidden layers: the result is `Finite(0)` when the
/// lone output neuron satisfies `1 - a >= Δ` and `Infeasible` otherwise.
pub fn min_neurons_lower_bound(xi: f64, delta: f64, layers: usize) -> Result<MinNeurons> {
    check_xi(xi)?;
    let cap = delta_capacity(delta)?;
    if layers == 0 {
        return Err(Error::OutOfRange {
            name: "layers",
            value: 0.0,
            range: ">= 1",
        });
    }
    let a = flip_overlap(xi);
    let ratio = cap / (1.0 - a);
    if ratio >= 1.0 {
        return Ok(MinNeurons::Infeasible);
    }
    if layers == 1 || a == 0.0 {
        return Ok(MinNeurons::Finite(0.0));
    }
    let hidden = (layers - 1) as f64;
    let per_layer = (-ratio.powf(1.0 / hidden)).ln_1p() / a.ln();
    Ok(MinNeurons::Finite(hidden * per_layer))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmGm {
    pub product: f64,
    pub bound: f64,
    pub equal_widths: bool,
}

/// `Π(1 - a^{n_ℓ})` against `(1 - a^{mean n})^L`.
pub fn amgm_product_bound(a: f64, widths: &[usize]) -> Result<AmGm> {
    check_range("a", a, (0.0..=1.0).contains(&a), "[0, 1]")?;
    check_widths(widths)?;
    let product = widths.iter().map(|&n| layer_factor(a, n)).product();
    let mean = widths.iter().sum::<usize>() as f64 / widths.len() as f64;
    let bound = (1.0 - a.powf(mean)).powi(widths.len() as i32);
    Ok(AmGm {
        product,
        bound,
        equal_widths: widths.windows(2).all(|w| w[0] == w[1]),
    })
}

/// Gate-count lower bound `(n/2)^{1/(2(d-1))}` for depth-`d` threshold
/// circuits computing `n`-bit parity.
pub fn parity_size_complexity(n: u64, depth: usize) -> Result<f64> {
    if depth < 2 {
        return Err(Error::OutOfRange {
            name: "depth",
            value: depth as f64,
            range: ">= 2",
        });
    }
    if n < 2 {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as f64,
            range: ">= 2",
        });
    }
    Ok((n as f64 / 2.0).powf(1.0 / (2.0 * (depth - 1) as f64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binding {
    Expressibility,
    Noise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeBoundResult {
    pub depth: usize,
    pub expressibility_bound: f64,
    /// `N_s + 1`; infinite when the depth is infeasible.
    pub noise_bound: f64,
    pub binding: Binding,
}

impl SizeBoundResult {
    pub fn value(&self) -> f64 {
        self.expressibility_bound.max(self.noise_bound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthTradeoff {
    pub rows: Vec<SizeBoundResult>,
    pub best_depth: usize,
    pub best_value: f64,
}

/// Per-depth `max(Ω(n,d), N_s(ξ,δ,d) + 1)` for `d = 2..=max_depth`, and the
/// minimizing depth (smallest depth on ties).
pub fn optimal_depth_tradeoff(
    n: u64,
    xi: f64,
    delta: f64,
    max_depth: usize,
) -> Result<DepthTradeoff> {
    if max_depth < 2 {
        return Err(Error::OutOfRange {
            name: "max_depth",
            value: max_depth as f64,
            range: ">= 2",
        });
    }
    let rows = (2..=max_depth)
        .map(|d| {
            let expressibility_bound = parity_size_complexity(n, d)?;
            let noise_bound = min_neurons_lower_bound(xi, delta, d)?.value() + 1.0;
            let binding = if expressibility_bound >= noise_bound {
                Binding::Expressibility
            } else {
                Binding::Noise
            };
            Ok(SizeBoundResult {
                depth: d,
                expressibility_bound,
                noise_bound,
                binding,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = rows
        .iter()
        .filter(|r| r.value().is_finite())
        .fold(None::<&SizeBoundResult>, |acc, r| match acc {
            Some(b) if b.value() <= r.value() => Some(b),
            _ => Some(r),
        })
        .ok_or_else(|| {
            Error::Infeasible(format!(
                "no depth in 2..={max_depth} admits a δ-reliable network at xi = {xi}, delta = {delta}"
            ))
        })?;
    Ok(DepthTradeoff {
        best_depth: best.depth,
        best_value: best.value(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn theorem2_examples() {
        assert_eq!(theorem2_bound(&[3, 4], 0.0, 2.5).unwrap(), 2.5);
        let a = flip_overlap(0.2);
        assert!(close(
            theorem2_bound(&[1], 0.2, 1.0).unwrap(),
            1.0 - a,
            1e-15
        ));
        assert!(close(
            theorem2_bound(&[5, 5, 5], 0.35, 1.0).unwrap(),
            0.05314374352856473,
            1e-12
        ));
        assert!(theorem2_bound(&[], 0.1, 1.0).is_err());
        assert!(theorem2_bound(&[2], 0.5, 1.0).is_err());
    }

    #[test]
    fn delta_capacity_examples() {
        assert_eq!(delta_capacity(0.0).unwrap(), 1.0);
        assert!(delta_capacity(0.5 - 1e-9).unwrap().abs() < 1e-7);
        assert!(close(
            delta_capacity(0.4).unwrap(),
            0.02904940554533142,
            1e-12
        ));
        assert!(delta_capacity(0.5).is_err());
        let grid: Vec<f64> = (0..50)
            .map(|i| delta_capacity(i as f64 / 100.0).unwrap())
            .collect();
        assert!(grid.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn feasibility_examples() {
        let f = feasibility_check(&[7, 2], 0.0, 0.3, Readout::OutputNeuron).unwrap();
        assert!(f.feasible && f.lhs == 1.0);

        let f = feasibility_check(&[20, 20, 20], 0.37, 0.4, Readout::OutputNeuron).unwrap();
        assert!(close(f.lhs, 0.02890495232998767, 1e-12));
        assert!(!f.feasible && f.margin < 0.0);

        // last neuron alone cannot carry Δ
        let f = feasibility_check(&[1000], 0.45, 0.3, Readout::OutputNeuron).unwrap();
        assert!(1.0 - flip_overlap(0.45) < f.capacity_delta && !f.feasible);

        let fe = feasibility_check(&[20, 20, 20], 0.37, 0.4, Readout::FeatureExtractor).unwrap();
        assert!(fe.feasible && fe.lhs > f.lhs);
    }

    #[test]
    fn min_neurons_examples() {
        let expected = [
            8.02413783185009,
            30.45317294119068,
            60.21829544736634,
            94.8029145884709,
            132.9833482725992,
        ];
        for (l, want) in (2..=6).zip(expected) {
            let got = min_neurons_lower_bound(0.37, 0.4, l).unwrap().value();
            assert!(close(got, want, 1e-9), "L = {l}: {got}");
        }
        // a -> 0 drives N_s to zero, but only like 1/ln(1/a)
        let tiny: Vec<f64> = [1e-2, 1e-6, 1e-30, 1e-300]
            .iter()
            .map(|&xi| min_neurons_lower_bound(xi, 0.4, 4).unwrap().value())
            .collect();
        assert!(tiny.windows(2).all(|w| w[1] < w[0]));
        assert!(tiny[3] < 1e-2);
        assert_eq!(
            min_neurons_lower_bound(0.1, 0.4, 1).unwrap(),
            MinNeurons::Finite(0.0)
        );
        assert_eq!(
            min_neurons_lower_bound(0.45, 0.3, 1).unwrap(),
            MinNeurons::Infeasible
        );
        assert_eq!(
            min_neurons_lower_bound(0.45, 0.3, 4).unwrap(),
            MinNeurons::Infeasible
        );
        assert!(min_neurons_lower_bound(0.1, 0.3, 0).is_err());
    }

    #[test]
    fn min_neurons_diverges_at_cutoff() {
        let cap = delta_capacity(0.4).unwrap();
        let xi_cut = (1.0 - cap.sqrt()) / 2.0;
        let near: Vec<f64> = [1e-3, 1e-6, 1e-9]
            .iter()
            .map(|&eps| {
                min_neurons_lower_bound(xi_cut - eps, 0.4, 3)
                    .unwrap()
                    .value()
            })
            .collect();
        assert!(near.windows(2).all(|w| w[1] > w[0] + 100.0), "{near:?}");
        assert!(!min_neurons_lower_bound(xi_cut + 1e-6, 0.4, 3)
            .unwrap()
            .is_feasible());
    }

    #[test]
    fn amgm_examples() {
        let r = amgm_product_bound(0.36, &[4, 4, 4]).unwrap();
        assert!(r.equal_widths && r.product == r.bound);
        let r = amgm_product_bound(0.0, &[1, 5]).unwrap();
        assert_eq!((r.product, r.bound), (1.0, 1.0));
        let r = amgm_product_bound(0.36, &[1, 2, 3]).unwrap();
        assert!(close(r.product, 0.531066, 1e-6));
        assert!(close(r.bound, 0.659412, 1e-6));
        assert!(r.product <= r.bound && !r.equal_widths);
    }

    #[test]
    fn parity_examples() {
        assert_eq!(parity_size_complexity(2, 5).unwrap(), 1.0);
        assert!(close(
            parity_size_complexity(500_000_000, 6).unwrap(),
            6.915028921812392,
            1e-9
        ));
        let v: Vec<f64> = (2..10)
            .map(|d| parity_size_complexity(1000, d).unwrap())
            .collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
        assert!(parity_size_complexity(10, 1).is_err());
    }

    #[test]
    fn tradeoff_example() {
        let t = optimal_depth_tradeoff(500_000_000, 0.37, 0.4, 6).unwrap();
        assert_eq!(t.best_depth, 4);
        assert!(close(t.best_value, 61.21829544736634, 1e-9));
        assert_eq!(t.rows.len(), 5);
        assert_eq!(t.rows[0].binding, Binding::Expressibility);
        assert_eq!(t.rows[4].binding, Binding::Noise);
        let best = &t.rows[2];
        assert!(t.best_value >= best.expressibility_bound && t.best_value >= best.noise_bound);
    }

    #[test]
    fn tradeoff_noiseless_limit_and_infeasible() {
        let t = optimal_depth_tradeoff(1_000_000, 1e-9, 0.4, 5).unwrap();
        let omega_min = (2..=5)
            .map(|d| parity_size_complexity(1_000_000, d).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((t.best_value - omega_min.max(1.0)).abs() < 1e-6);
        assert!(matches!(
            optimal_depth_tradeoff(1000, 0.49, 0.1, 5),
            Err(Error::Infeasible(_))
        ));
    }
}
