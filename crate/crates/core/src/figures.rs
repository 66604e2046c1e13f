//! Data tables behind the bound comparison plots.
//!
//! Each generator returns a [`Table`] whose row order is fixed by its input
//! grid. Infeasible cells hold `+inf`.

use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::format::sig;
use crate::memory::overhead_lower_bound;
use crate::reliability::{min_neurons_lower_bound, optimal_depth_tradeoff};
use crate::sdpi::{
    correlated_layer_bound_leading, correlated_layer_channel, evans_schulman_raw, flip_overlap,
    independent_layer_bound, layer_bound_from_single, theorem1_bound, CorrelatedNoiseSpec,
    LayerNoiseSpec, DEFAULT_LAYER_CAP,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// One-line results derived from the rows.
    pub summary: Vec<String>,
    /// Parameters outside the range where the plotted quantity is meaningful.
    pub warnings: Vec<String>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Header line plus one comma-separated line per row, numbers in
    /// [`sig`] format.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| sig(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// A gnuplot script plotting every column after the first against the
    /// first, reading `data_path`.
    pub fn gnuplot_script(&self, data_path: &str, title: &str) -> String {
        let mut s = format!(
            "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\nset title '{title}'\nset xlabel '{}'\n",
            self.columns[0]
        );
        let plots: Vec<String> = (2..=self.columns.len())
            .map(|i| format!("'{data_path}' using 1:{i} with linespoints"))
            .collect();
        s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
        s
    }
}

/// `start, start + step, ...` up to and including `stop` (within half a step).
pub fn step_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    check_range("step", step, step > 0.0, "> 0")?;
    check_range("stop", stop, stop >= start, ">= start")?;
    let count = ((stop - start) / step + 0.5).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

fn check_grid(
    name: &'static str,
    grid: &[f64],
    lo: f64,
    hi: f64,
    range: &'static str,
) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Empty(name));
    }
    for &x in grid {
        check_range(name, x, x >= lo && x <= hi, range)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig2Params {
    pub xi_grid: Vec<f64>,
    pub n: u32,
}

impl Default for Fig2Params {
    fn default() -> Self {
        Self {
            xi_grid: step_grid(0.0, 0.5, 0.01).expect("static grid"),
            n: 3,
        }
    }
}

/// Columns `xi, evans_schulman, ours`: the path-sum bound `nη` against
/// `1 - (1-η)^n` for a layer of `n` neurons, `η = (1-2ξ)²`.
pub fn fig2(p: &Fig2Params) -> Result<Table> {
    check_grid("xi", &p.xi_grid, 0.0, 0.5, "[0, 0.5]")?;
    if p.n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            range: ">= 1",
        });
    }
    let mut t = Table::new(vec!["xi", "evans_schulman", "ours"]);
    for &xi in &p.xi_grid {
        let eta = 1.0 - flip_overlap(xi);
        t.rows.push(vec![
            xi,
            evans_schulman_raw(eta, p.n),
            layer_bound_from_single(eta, p.n),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig3Params {
    pub xi1_grid: Vec<f64>,
    pub xi2: f64,
    pub n: u32,
}

/// Largest `ξ1` for which the plotted comparison is claimed.
pub const FIG3_XI1_MAX: f64 = 0.07;

impl Default for Fig3Params {
    fn default() -> Self {
        Self {
            xi1_grid: step_grid(0.0, FIG3_XI1_MAX, 0.005).expect("static grid"),
            xi2: 0.35,
            n: 5,
        }
    }
}

/// Columns `xi1, eta_ind, eta_wc_leading, eta_wc_exact`.
///
/// `eta_ind` is the independent-noise bound at the matched per-neuron flip
/// probability; `eta_wc_exact` is the pair-scan bound on the full
/// `2^n x 2^n` correlated channel.
pub fn fig3(p: &Fig3Params) -> Result<Table> {
    check_grid("xi1", &p.xi1_grid, 0.0, 0.5, "[0, 0.5)")?;
    let mut t = Table::new(vec!["xi1", "eta_ind", "eta_wc_leading", "eta_wc_exact"]);
    for &xi1 in &p.xi1_grid {
        let s = CorrelatedNoiseSpec::new(xi1, p.xi2, p.n)?;
        if xi1 > FIG3_XI1_MAX + 1e-12 {
            t.warnings.push(format!(
                "xi1 = {} is above {FIG3_XI1_MAX}; the leading-order column is not expected to track the exact one",
                sig(xi1)
            ));
        }
        if !s.ordering_preserved() {
            t.warnings.push(format!(
                "xi1 = {}: transition probabilities no longer decrease with Hamming distance",
                sig(xi1)
            ));
        }
        let ind = independent_layer_bound(&LayerNoiseSpec::new(s.matched_independent_xi(), p.n)?);
        let exact = theorem1_bound(&correlated_layer_channel(&s, DEFAULT_LAYER_CAP)?)?.eta;
        t.rows
            .push(vec![xi1, ind, correlated_layer_bound_leading(&s), exact]);
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig5Params {
    pub xi_grid: Vec<f64>,
    pub deltas: Vec<f64>,
    pub layers: Vec<usize>,
}

impl Default for Fig5Params {
    fn default() -> Self {
        Self {
            xi_grid: step_grid(0.01, 0.49, 0.01).expect("static grid"),
            deltas: vec![0.1, 0.2, 0.3, 0.4],
            layers: (2..=6).collect(),
        }
    }
}

/// Columns `xi, delta, L, N_s`, with `L` varying fastest and `xi` slowest.
pub fn fig5(p: &Fig5Params) -> Result<Table> {
    check_grid("xi", &p.xi_grid, 0.0, 0.5 - f64::EPSILON, "[0, 0.5)")?;
    check_grid("delta", &p.deltas, 0.0, 0.5 - f64::EPSILON, "[0, 0.5)")?;
    if p.layers.is_empty() {
        return Err(Error::Empty("layers"));
    }
    let mut t = Table::new(vec!["xi", "delta", "L", "N_s"]);
    for &xi in &p.xi_grid {
        for &delta in &p.deltas {
            for &l in &p.layers {
                let ns = min_neurons_lower_bound(xi, delta, l)?.value();
                t.rows.push(vec![xi, delta, l as f64, ns]);
            }
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig6Params {
    pub n: u64,
    pub xi: f64,
    pub delta: f64,
    pub max_depth: usize,
}

impl Default for Fig6Params {
    fn default() -> Self {
        Self {
            n: 500_000_000,
            xi: 0.37,
            delta: 0.4,
            max_depth: 6,
        }
    }
}

/// Columns `d, omega, ns_plus_1, max`, plus the minimizing depth in the
/// summary.
pub fn fig6(p: &Fig6Params) -> Result<Table> {
    let tradeoff = optimal_depth_tradeoff(p.n, p.xi, p.delta, p.max_depth)?;
    let mut t = Table::new(vec!["d", "omega", "ns_plus_1", "max"]);
    for r in &tradeoff.rows {
        t.rows.push(vec![
            r.depth as f64,
            r.expressibility_bound,
            r.noise_bound,
            r.value(),
        ]);
    }
    t.summary.push(format!(
        "optimal depth {} with minimum neuron count {}",
        tradeoff.best_depth,
        sig(tradeoff.best_value)
    ));
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig8Params {
    pub t_grid: Vec<f64>,
    /// `(δ, ξ)` series.
    pub series: Vec<(f64, f64)>,
}

impl Default for Fig8Params {
    fn default() -> Self {
        // 1, 2, 5, 10, 20, 50, ... 10^6
        let t_grid = (0..=6)
            .flat_map(|e| [1.0, 2.0, 5.0].map(|m| m * 10f64.powi(e)))
            .filter(|&t| t <= 1e6)
            .collect();
        Self {
            t_grid,
            series: vec![(0.4, 0.1), (0.1, 0.01)],
        }
    }
}

/// Columns `T, delta, xi, n_lower`, grouped by series.
pub fn fig8(p: &Fig8Params) -> Result<Table> {
    if p.t_grid.is_empty() {
        return Err(Error::Empty("T grid"));
    }
    if p.series.is_empty() {
        return Err(Error::Empty("(delta, xi) series"));
    }
    for &t in &p.t_grid {
        check_range("T", t, t >= 1.0, ">= 1")?;
    }
    let mut t = Table::new(vec!["T", "delta", "xi", "n_lower"]);
    for &(delta, xi) in &p.series {
        for &steps in &p.t_grid {
            t.rows.push(vec![
                steps,
                delta,
                xi,
                overhead_lower_bound(delta, steps, xi)?,
            ]);
        }
    }
    Ok(t)
}
