//! Contraction coefficient bounds for discrete channels.
//!
//! For a Markov chain `X -> Y -> Z` where `Y -> Z` is the channel `A`,
//!
//! ```text
//! I(X;Z) / I(X;Y) <= 1 - min_{k != l} ( Σ_j sqrt(a_kj a_lj) )^2
//! ```
//!
//! The inner sum is the Bhattacharyya coefficient of rows `k` and `l`.
//! [`theorem1_bound`] evaluates it by a brute-force scan over row pairs.
//! Layer noise channels built from per-neuron bit flips have entries that
//! depend only on the Hamming distance between input and output states,
//! so their pair scan collapses to `n` distance classes
//! ([`hamming_class_bound`]).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::info::Channel;

/// Default cap on the neuron count for materialized `2^n x 2^n` layer channels.
pub const DEFAULT_LAYER_CAP: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    PairScan,
    HammingClasses,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionBound {
    pub eta: f64,
    /// Row pair attaining the smallest Bhattacharyya coefficient.
    pub witness: (usize, usize),
    pub method: BoundMethod,
    #[serde(skip)]
    pub min_bhattacharyya: f64,
}

impl ContractionBound {
    fn from_min(min_bhattacharyya: f64, witness: (usize, usize), method: BoundMethod) -> Self {
        let eta = (1.0 - min_bhattacharyya * min_bhattacharyya).clamp(0.0, 1.0);
        Self {
            eta,
            witness,
            method,
            min_bhattacharyya,
        }
    }
}

pub fn bhattacharyya_coefficient(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x * y).sqrt()).sum()
}

// (value, k, l) ordered by value then lexicographically by pair.
fn better(a: (f64, usize, usize), b: (f64, usize, usize)) -> (f64, usize, usize) {
    if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
        b
    } else {
        a
    }
}

/// Brute-force contraction bound over all unordered row pairs.
///
/// Ties on the Bhattacharyya coefficient go to the lexicographically
/// smallest `(k, l)`.
pub fn theorem1_bound(c: &Channel) -> Result<ContractionBound> {
    let n = c.n_inputs();
    if n < 2 {
        return Err(Error::TooFewInputs(n));
    }
    let m = c.m_outputs();
    let roots: Vec<f64> = c.rows().flatten().map(|a| a.sqrt()).collect();
    let row = |i: usize| &roots[i * m..(i + 1) * m];

    let scan_from = |k: usize| {
        let rk = row(k);
        ((k + 1)..n)
            .map(|l| {
                let s: f64 = rk.iter().zip(row(l)).map(|(x, y)| x * y).sum();
                (s, k, l)
            })
            .fold((f64::INFINITY, usize::MAX, usize::MAX), better)
    };
    let init = (f64::INFINITY, usize::MAX, usize::MAX);
    let best = if n >= 64 {
        (0..n - 1)
            .into_par_iter()
            .map(scan_from)
            .reduce(|| init, better)
    } else {
        (0..n - 1).map(scan_from).fold(init, better)
    };
    Ok(ContractionBound::from_min(
        best.0,
        (best.1, best.2),
        BoundMethod::PairScan,
    ))
}

fn binomial_row(n: u32) -> Vec<f64> {
    let mut row = vec![1.0f64];
    for _ in 0..n {
        let mut next = vec![1.0; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

/// Contraction bound for a `2^n x 2^n` channel whose entry `(r, s)` is
/// `profile[popcount(r ^ s)]`.
///
/// The Bhattacharyya coefficient of rows `r`, `r'` depends only on their
/// Hamming distance `D`, so one representative pair `(0, 2^D - 1)` per
/// class suffices.
pub fn hamming_class_bound(n: u32, profile: &[f64]) -> Result<ContractionBound> {
    if n == 0 {
        return Err(Error::TooFewInputs(1));
    }
    if profile.len() != n as usize + 1 {
        return Err(Error::DimensionMismatch {
            what: "distance profile length vs n+1",
            left: profile.len(),
            right: n as usize + 1,
        });
    }
    let mut best = (f64::INFINITY, 0usize, 0usize);
    for dist in 1..=n {
        let inside = binomial_row(dist);
        let outside = binomial_row(n - dist);
        let d = dist as usize;
        let mut sum = 0.0;
        // Output state with i ones inside the differing block and k ones outside
        // sits at distance i+k from row 0 and d-i+k from row 2^d - 1.
        for (i, ci) in inside.iter().enumerate() {
            for (k, ck) in outside.iter().enumerate() {
                sum += ci * ck * (profile[i + k] * profile[d - i + k]).sqrt();
            }
        }
        best = better(best, (sum, 0, (1usize << dist) - 1));
    }
    Ok(ContractionBound::from_min(
        best.0,
        (best.1, best.2),
        BoundMethod::HammingClasses,
    ))
}

fn materialize(n: u32, cap: u32, profile: &[f64]) -> Result<Channel> {
    if n > cap {
        return Err(Error::CapExceeded {
            what: "layer width",
            value: n as usize,
            cap: cap as usize,
        });
    }
    let size = 1usize << n;
    let mut data = Vec::with_capacity(size * size);
    for r in 0..size {
        data.extend((0..size).map(|s| profile[(r ^ s).count_ones() as usize]));
    }
    Ok(Channel::from_flat_unchecked(size, size, data))
}

/// `4ξ(1-ξ)`, the squared Bhattacharyya coefficient of `BSC(ξ)`.
pub fn flip_overlap(xi: f64) -> f64 {
    4.0 * xi - 4.0 * xi * xi
}

/// A layer of `n` neurons each flipping its output independently with
/// probability `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerNoiseSpec {
    pub xi: f64,
    pub n: u32,
}

impl LayerNoiseSpec {
    pub fn new(xi: f64, n: u32) -> Result<Self> {
        check_range("xi", xi, (0.0..0.5).contains(&xi), "[0, 0.5)")?;
        if n == 0 {
            return Err(Error::OutOfRange {
                name: "n",
                value: 0.0,
                range: ">= 1",
            });
        }
        Ok(Self { xi, n })
    }

    /// Transition probability as a function of Hamming distance.
    pub fn distance_profile(&self) -> Vec<f64> {
        let n = self.n as i32;
        (0..=n)
            .map(|d| self.xi.powi(d) * (1.0 - self.xi).powi(n - d))
            .collect()
    }
}

/// `1 - (4ξ - 4ξ²)^n`.
pub fn independent_layer_bound(s: &LayerNoiseSpec) -> f64 {
    1.0 - flip_overlap(s.xi).powi(s.n as i32)
}

/// The `2^n x 2^n` channel `BSC(ξ)^{⊗n}`.
pub fn independent_layer_channel(s: &LayerNoiseSpec, cap: u32) -> Result<Channel> {
    materialize(s.n, cap, &s.distance_profile())
}

/// A layer where all `n` neurons flip together with probability `xi1`,
/// then each flips again independently with probability `xi2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelatedNoiseSpec {
    pub xi1: f64,
    pub xi2: f64,
    pub n: u32,
}

impl CorrelatedNoiseSpec {
    pub fn new(xi1: f64, xi2: f64, n: u32) -> Result<Self> {
        check_range("xi1", xi1, (0.0..0.5).contains(&xi1), "[0, 0.5)")?;
        check_range("xi2", xi2, (0.0..0.5).contains(&xi2), "[0, 0.5)")?;
        if n == 0 {
            return Err(Error::OutOfRange {
                name: "n",
                value: 0.0,
                range: ">= 1",
            });
        }
        Ok(Self { xi1, xi2, n })
    }

    pub fn distance_profile(&self) -> Vec<f64> {
        let n = self.n as i32;
        let (x1, x2) = (self.xi1, self.xi2);
        (0..=n)
            .map(|d| {
                (1.0 - x1) * (1.0 - x2).powi(n - d) * x2.powi(d)
                    + x1 * x2.powi(n - d) * (1.0 - x2).powi(d)
            })
            .collect()
    }

    /// Per-neuron flip probability `ξ1(1-ξ2) + (1-ξ1)ξ2`.
    pub fn matched_independent_xi(&self) -> f64 {
        self.xi1 * (1.0 - self.xi2) + (1.0 - self.xi1) * self.xi2
    }

    /// Whether transition probabilities still decrease strictly with Hamming
    /// distance, the ordering the leading-order formula relies on.
    pub fn ordering_preserved(&self) -> bool {
        self.distance_profile().windows(2).all(|w| w[0] > w[1])
    }
}

pub fn correlated_layer_channel(s: &CorrelatedNoiseSpec, cap: u32) -> Result<Channel> {
    materialize(s.n, cap, &s.distance_profile())
}

/// First-order-in-`ξ1` approximation `1 - [(4ξ2-4ξ2²)^n + g(ξ2,n) ξ1]`.
///
/// The neglected remainder is `O(ξ1²)`; compare against
/// [`hamming_class_bound`] on [`CorrelatedNoiseSpec::distance_profile`] for
/// the exact value.
pub fn correlated_layer_bound_leading(s: &CorrelatedNoiseSpec) -> f64 {
    1.0 - (flip_overlap(s.xi2).powi(s.n as i32) + g_function(s.xi2, s.n) * s.xi1)
}

/// `g(ξ2, n) = 2[(4ξ2² - 4ξ2 + 2)^n - (4ξ2 - 4ξ2²)^n]`.
pub fn g_function(xi2: f64, n: u32) -> f64 {
    let n = n as i32;
    2.0 * ((4.0 * xi2 * xi2 - 4.0 * xi2 + 2.0).powi(n) - flip_overlap(xi2).powi(n))
}

/// `g` written as `4(2ξ2-1)² Σ_{i=1}^{n} u^{n-i} v^{i-1}` with
/// `u = 4ξ2²-4ξ2+2`, `v = 4ξ2-4ξ2²`.
pub fn g_function_factored(xi2: f64, n: u32) -> f64 {
    let u = 4.0 * xi2 * xi2 - 4.0 * xi2 + 2.0;
    let v = flip_overlap(xi2);
    let n = n as i32;
    let sum: f64 = (1..=n).map(|i| u.powi(n - i) * v.powi(i - 1)).sum();
    4.0 * (4.0 * xi2 * xi2 - 4.0 * xi2 + 1.0) * sum
}

/// `g̃(ξ2, n) = 4n(2ξ2-1)²(4ξ2-4ξ2²)^{n-1}`, the first-order coefficient of
/// the independent-noise bound at matched per-neuron noise.
pub fn g_tilde(xi2: f64, n: u32) -> f64 {
    4.0 * n as f64 * (2.0 * xi2 - 1.0).powi(2) * flip_overlap(xi2).powi(n as i32 - 1)
}

/// Path-sum bound `n η` for `n` parallel noisy copies; may exceed 1.
pub fn evans_schulman_raw(eta_single: f64, n: u32) -> f64 {
    n as f64 * eta_single
}

/// `min(n η, 1)`.
pub fn evans_schulman_bound(eta_single: f64, n: u32) -> Result<f64> {
    check_range(
        "eta",
        eta_single,
        (0.0..=1.0).contains(&eta_single),
        "[0, 1]",
    )?;
    Ok(evans_schulman_raw(eta_single, n).min(1.0))
}

/// `1 - (1 - η)^n`: the layer bound expressed through the single-neuron
/// coefficient `η = 1 - (4ξ - 4ξ²)`.
pub fn layer_bound_from_single(eta_single: f64, n: u32) -> f64 {
    1.0 - (1.0 - eta_single).powi(n as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::Distribution;

    #[test]
    fn theorem1_examples() {
        let b = theorem1_bound(&Channel::identity(2)).unwrap();
        assert_eq!(b.eta, 1.0);
        assert_eq!(b.witness, (0, 1));

        let flat = Channel::constant(4, &Distribution::new(vec![0.2, 0.3, 0.5]).unwrap());
        assert!(theorem1_bound(&flat).unwrap().eta.abs() < 1e-15);

        let b = theorem1_bound(&Channel::bsc(0.1).unwrap()).unwrap();
        assert!((b.eta - 0.64).abs() < 1e-12);
        assert_eq!(b.method, BoundMethod::PairScan);
    }

    #[test]
    fn theorem1_needs_two_rows() {
        let one = Channel::new(vec![vec![0.5, 0.5]]).unwrap();
        assert!(matches!(theorem1_bound(&one), Err(Error::TooFewInputs(1))));
    }

    #[test]
    fn theorem1_tie_break_is_lexicographic() {
        // Rows 0,1 and 2,3 are both orthogonal pairs; (0, 1) must win.
        let c = Channel::new(vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(theorem1_bound(&c).unwrap().witness, (0, 1));
    }

    #[test]
    fn theorem1_serializes() {
        let b = theorem1_bound(&Channel::identity(3)).unwrap();
        let json = serde_json::to_value(&b).unwrap();
        assert_eq!(json["witness"], serde_json::json!([0, 1]));
        assert_eq!(json["method"], "pair-scan");
        assert_eq!(json["eta"], 1.0);
    }

    #[test]
    fn independent_layer_examples() {
        for n in [1, 3, 7] {
            let s = LayerNoiseSpec::new(0.0, n).unwrap();
            assert_eq!(independent_layer_bound(&s), 1.0);
            let near_half = LayerNoiseSpec::new(0.5 - 1e-9, n).unwrap();
            assert!(independent_layer_bound(&near_half) < 1e-15 * n as f64 + 1e-15);
        }
        let s = LayerNoiseSpec::new(0.1, 3).unwrap();
        assert!((independent_layer_bound(&s) - 0.953_344).abs() < 1e-12);
        assert!(LayerNoiseSpec::new(0.5, 3).is_err());
        assert!(LayerNoiseSpec::new(-0.1, 3).is_err());
    }

    #[test]
    fn independent_channel_examples() {
        let one = independent_layer_channel(&LayerNoiseSpec::new(0.2, 1).unwrap(), 12).unwrap();
        assert_eq!(one, Channel::bsc(0.2).unwrap());
        let two = independent_layer_channel(&LayerNoiseSpec::new(0.1, 2).unwrap(), 12).unwrap();
        assert!((two.entry(0b00, 0b11) - 0.01).abs() < 1e-15);
        let too_big = independent_layer_channel(&LayerNoiseSpec::new(0.1, 13).unwrap(), 12);
        assert!(matches!(too_big, Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn independent_channel_matches_tensor_power() {
        let s = LayerNoiseSpec::new(0.17, 4).unwrap();
        let direct = independent_layer_channel(&s, 12).unwrap();
        let tensor = Channel::bsc(0.17).unwrap().tensor_power(4);
        for (a, b) in direct.rows().flatten().zip(tensor.rows().flatten()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn hamming_classes_agree_with_pair_scan() {
        for n in 1..=6 {
            for xi in [0.05, 0.2, 0.45] {
                let s = LayerNoiseSpec::new(xi, n).unwrap();
                let brute = theorem1_bound(&independent_layer_channel(&s, 12).unwrap()).unwrap();
                let fast = hamming_class_bound(n, &s.distance_profile()).unwrap();
                assert!((brute.eta - fast.eta).abs() < 1e-12, "n={n} xi={xi}");
                assert_eq!(brute.witness, fast.witness);
                assert!((fast.eta - independent_layer_bound(&s)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn correlated_channel_examples() {
        let no_shared = CorrelatedNoiseSpec::new(0.0, 0.3, 3).unwrap();
        let ind = LayerNoiseSpec::new(0.3, 3).unwrap();
        assert_eq!(
            correlated_layer_channel(&no_shared, 12).unwrap(),
            independent_layer_channel(&ind, 12).unwrap()
        );

        let joint_only = CorrelatedNoiseSpec::new(0.04, 0.0, 2).unwrap();
        let c = correlated_layer_channel(&joint_only, 12).unwrap();
        assert!((c.entry(0b00, 0b11) - 0.04).abs() < 1e-15);
        assert_eq!(c.entry(0b00, 0b01), 0.0);

        for (x1, x2, n) in [(0.01, 0.35, 5), (0.3, 0.1, 4), (0.49, 0.49, 6)] {
            let s = CorrelatedNoiseSpec::new(x1, x2, n).unwrap();
            assert!(correlated_layer_channel(&s, 12).unwrap().max_row_defect() < 1e-12);
        }
    }

    #[test]
    fn g_function_examples() {
        for n in 1..6 {
            assert!(g_function(0.5, n).abs() < 1e-15);
        }
        assert!((g_function(0.35, 5) - 1.829_183_619_6).abs() < 1e-9);
        for n in 1..10 {
            for i in 0..50 {
                let x = i as f64 * 0.01;
                let g = g_function(x, n);
                assert!((g - g_function_factored(x, n)).abs() < 1e-12 * g.abs().max(1.0));
                assert!(g + 1e-12 >= g_tilde(x, n), "x={x} n={n}");
            }
        }
    }

    #[test]
    fn correlated_leading_examples() {
        let s = CorrelatedNoiseSpec::new(0.0, 0.3, 4).unwrap();
        let ind = LayerNoiseSpec::new(0.3, 4).unwrap();
        assert_eq!(
            correlated_layer_bound_leading(&s),
            independent_layer_bound(&ind)
        );

        let s = CorrelatedNoiseSpec::new(0.02, 0.35, 5).unwrap();
        let expect = 1.0 - (0.91f64.powi(5) + 1.829_183_619_6 * 0.02);
        assert!((correlated_layer_bound_leading(&s) - expect).abs() < 1e-10);
    }

    #[test]
    fn leading_order_error_is_quadratic() {
        // Fit log(gap) against log(xi1); the slope should be close to 2.
        let pts: Vec<(f64, f64)> = (1..=10)
            .map(|i| {
                let x1 = i as f64 * 0.001;
                let s = CorrelatedNoiseSpec::new(x1, 0.35, 5).unwrap();
                let exact = hamming_class_bound(5, &s.distance_profile()).unwrap().eta;
                let gap = (exact - correlated_layer_bound_leading(&s)).abs();
                (x1.ln(), gap.ln())
            })
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn ordering_diagnostic() {
        for i in 0..=14 {
            let s = CorrelatedNoiseSpec::new(i as f64 * 0.005, 0.35, 5).unwrap();
            assert!(s.ordering_preserved(), "xi1 = {}", s.xi1);
        }
        assert!(!CorrelatedNoiseSpec::new(0.45, 0.35, 5)
            .unwrap()
            .ordering_preserved());
    }

    #[test]
    fn evans_schulman_examples() {
        for n in [1, 4, 9] {
            assert_eq!(evans_schulman_bound(0.0, n).unwrap(), 0.0);
        }
        let eta = 1.0 - flip_overlap(0.25);
        assert!((evans_schulman_bound(eta, 3).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(evans_schulman_bound(0.6, 3).unwrap(), 1.0);
        assert!((evans_schulman_raw(0.6, 3) - 1.8).abs() < 1e-15);
        for i in 1..100 {
            let eta = i as f64 / 100.0;
            for n in 2..8 {
                assert!(evans_schulman_raw(eta, n) > layer_bound_from_single(eta, n));
            }
        }
        assert!(evans_schulman_bound(1.5, 2).is_err());
    }
}
