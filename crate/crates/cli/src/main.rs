//! `sdpi`: contraction bounds, noisy-network and memory bounds, figure data
//! and verification suites from the command line.
//!
//! Exit codes: 0 on success, 1 when the answer is "infeasible", 2 on bad
//! input.

mod output;
mod parse;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use output::{Cell, Report};
use sdpi_core::figures::{self, Fig2Params, Fig3Params, Fig5Params, Fig6Params, Fig8Params};
use sdpi_core::memory::{self, MemorySpec};
use sdpi_core::network::{self, NoisyNetwork, DEFAULT_WIDTH_CAP};
use sdpi_core::oracle::{empirical_contraction, SearchConfig};
use sdpi_core::reliability::{self, MinNeurons, Readout};
use sdpi_core::sdpi::{self as bounds, CorrelatedNoiseSpec, LayerNoiseSpec};
use sdpi_core::verify::{self, Suite};
use sdpi_core::{Channel, Distribution, LogBase};

#[derive(Parser, Debug)]
#[command(
    name = "sdpi",
    version,
    about = "Strong data processing bounds for noisy channels, networks and memories"
)]
struct Cli {
    /// Seed for every stochastic command.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// With a figure command and --out, also write a gnuplot script to <out>.gp.
    #[arg(long, global = true)]
    gnuplot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Contraction bounds for a channel or a noisy layer.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Noisy threshold networks.
    #[command(subcommand)]
    Nn(NnCmd),
    /// Fault-tolerant memory.
    #[command(subcommand)]
    Mem(MemCmd),
    /// Figure datasets.
    #[command(subcommand)]
    Fig(FigCmd),
    /// Run a verification suite ("all" runs every suite).
    Verify {
        suite: String,
        /// Sample count for randomized suites.
        #[arg(long)]
        budget: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum BoundCmd {
    /// Bound for a channel read from a JSON or CSV file.
    Channel {
        file: PathBuf,
        /// Also run a random search with this many samples for the actual ratio.
        #[arg(long)]
        search: Option<usize>,
        /// Alphabet size of X in the search.
        #[arg(long, default_value_t = 2)]
        x_alphabet: usize,
        /// Hill-climbing rounds applied to the best search sample.
        #[arg(long, default_value_t = 0)]
        refine: usize,
    },
    /// Bound for a layer of n noisy neurons.
    Layer {
        /// Independent per-neuron flip probability.
        #[arg(long, required_unless_present_all = ["xi1", "xi2"], conflicts_with_all = ["xi1", "xi2"])]
        xi: Option<f64>,
        #[arg(long)]
        n: u32,
        /// Common flip probability shared by the whole layer.
        #[arg(long, requires = "xi2")]
        xi1: Option<f64>,
        /// Independent flip probability applied after the common flip.
        #[arg(long, requires = "xi1")]
        xi2: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct Widths {
    /// Comma-separated layer widths.
    #[arg(long, value_parser = parse::list::<usize>)]
    widths: std::vec::Vec<usize>,
}

#[derive(Subcommand, Debug)]
enum NnCmd {
    /// I(X; Y_out) for a network file.
    Mi {
        file: PathBuf,
        /// Input distribution (JSON array); uniform when omitted.
        #[arg(long)]
        px: Option<PathBuf>,
        /// Estimate by simulation with this many trials instead of exactly.
        #[arg(long)]
        trials: Option<u64>,
        /// Width cap for exact evaluation.
        #[arg(long, default_value_t = DEFAULT_WIDTH_CAP)]
        cap: u32,
        /// Report bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Upper bound on I(X; Y_out) from layer widths.
    Bound {
        #[command(flatten)]
        widths: Widths,
        #[arg(long)]
        xi: f64,
        /// H(X), in the unit the bound should be reported in.
        #[arg(long)]
        hx: f64,
    },
    /// Necessary condition for δ-reliable computation.
    Feasible {
        /// Hidden layer widths (the output neuron is appended).
        #[command(flatten)]
        widths: Widths,
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        delta: f64,
        /// Treat the widths as the full network read out directly.
        #[arg(long)]
        feature_extractor: bool,
    },
    /// Minimum number of hidden neurons for an L-layer network.
    MinNeurons {
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        layers: usize,
    },
    /// Depth that minimizes the neuron count lower bound for parity.
    Tradeoff {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        max_depth: usize,
    },
}

#[derive(Subcommand, Debug)]
enum MemCmd {
    /// Minimum physical bits for T intervals.
    Overhead {
        #[arg(long)]
        delta: f64,
        #[arg(long = "t")]
        intervals: f64,
        #[arg(long)]
        xi: f64,
    },
    /// Upper bound on the relaxation time of an n-bit memory.
    Relax {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Relaxation time of the majority-vote repetition code.
    Reptime {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Monte Carlo repetition-code memory.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long = "t")]
        intervals: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
}

#[derive(Subcommand, Debug)]
enum FigCmd {
    /// Layer bound against the path-sum bound.
    #[command(name = "2")]
    Two {
        /// start:stop:step or a list; default 0:0.5:0.01.
        #[arg(long, value_parser = parse::grid)]
        xi_grid: Option<std::vec::Vec<f64>>,
        #[arg(long, default_value_t = 3)]
        n: u32,
    },
    /// Correlated against independent layer noise.
    #[command(name = "3")]
    Three {
        /// Default 0:0.07:0.005.
        #[arg(long, value_parser = parse::grid)]
        xi1_grid: Option<std::vec::Vec<f64>>,
        #[arg(long, default_value_t = 0.35)]
        xi2: f64,
        #[arg(long, default_value_t = 5)]
        n: u32,
    },
    /// Minimum hidden neurons against noise.
    #[command(name = "5")]
    Five {
        /// Default 0.01:0.49:0.01.
        #[arg(long, value_parser = parse::grid)]
        xi_grid: Option<std::vec::Vec<f64>>,
        #[arg(long, value_parser = parse::list::<f64>)]
        deltas: Option<std::vec::Vec<f64>>,
        #[arg(long, value_parser = parse::list::<usize>)]
        layers: Option<std::vec::Vec<usize>>,
    },
    /// Expressibility against noise bounds by depth.
    #[command(name = "6")]
    Six {
        #[arg(long, default_value_t = 500_000_000)]
        n: u64,
        #[arg(long, default_value_t = 0.37)]
        xi: f64,
        #[arg(long, default_value_t = 0.4)]
        delta: f64,
        #[arg(long, default_value_t = 6)]
        max_depth: usize,
    },
    /// Memory overhead against time.
    #[command(name = "8")]
    Eight {
        /// Default 1,2,5,10,...,1e6.
        #[arg(long, value_parser = parse::grid)]
        t_grid: Option<std::vec::Vec<f64>>,
        /// delta:xi pairs; default 0.4:0.1,0.1:0.01.
        #[arg(long, value_parser = parse::pairs)]
        series: Option<std::vec::Vec<(f64, f64)>>,
    },
}

fn bound_cmd(cmd: BoundCmd, seed: u64) -> anyhow::Result<Report> {
    match cmd {
        BoundCmd::Channel {
            file,
            search,
            x_alphabet,
            refine,
        } => {
            let c = Channel::load(&file).with_context(|| format!("reading {}", file.display()))?;
            let b = bounds::theorem1_bound(&c)?;
            let mut fields = vec![
                ("eta", Cell::Num(b.eta)),
                ("witness_k", b.witness.0.into()),
                ("witness_l", b.witness.1.into()),
                ("n_inputs", c.n_inputs().into()),
                ("m_outputs", c.m_outputs().into()),
            ];
            let mut doc = json!({"bound": b, "n_inputs": c.n_inputs(), "m_outputs": c.m_outputs()});
            if let Some(samples) = search {
                let config = SearchConfig {
                    x_alphabet,
                    samples,
                    seed,
                    refine_rounds: refine,
                };
                let e = empirical_contraction(&c, &config)?;
                fields.push(("achieved_ratio", e.achieved_ratio.into()));
                fields.push(("samples", e.samples.into()));
                fields.push(("skipped", e.skipped.into()));
                doc["search"] = serde_json::to_value(&e)?;
            }
            Ok(Report::record(fields, doc))
        }
        BoundCmd::Layer { xi, n, xi1, xi2 } => match (xi, xi1, xi2) {
            (Some(xi), _, _) => {
                let s = LayerNoiseSpec::new(xi, n)?;
                let closed = bounds::independent_layer_bound(&s);
                let exact = bounds::hamming_class_bound(n, &s.distance_profile())?.eta;
                let es = bounds::evans_schulman_raw(1.0 - bounds::flip_overlap(xi), n);
                Ok(Report::record(
                    vec![
                        ("xi", xi.into()),
                        ("n", (n as usize).into()),
                        ("eta", closed.into()),
                        ("eta_exact", exact.into()),
                        ("evans_schulman", es.into()),
                    ],
                    json!({"xi": xi, "n": n, "eta": closed, "eta_exact": exact, "evans_schulman": es}),
                ))
            }
            (None, Some(xi1), Some(xi2)) => {
                let s = CorrelatedNoiseSpec::new(xi1, xi2, n)?;
                let leading = bounds::correlated_layer_bound_leading(&s);
                let exact = bounds::hamming_class_bound(n, &s.distance_profile())?.eta;
                let matched = s.matched_independent_xi();
                let ind = bounds::independent_layer_bound(&LayerNoiseSpec::new(matched, n)?);
                let ordered = s.ordering_preserved();
                let mut r = Report::record(
                    vec![
                        ("xi1", xi1.into()),
                        ("xi2", xi2.into()),
                        ("n", (n as usize).into()),
                        ("eta_wc_leading", leading.into()),
                        ("eta_wc_exact", exact.into()),
                        ("matched_xi", matched.into()),
                        ("eta_ind", ind.into()),
                        ("ordering_preserved", ordered.into()),
                    ],
                    json!({
                        "xi1": xi1, "xi2": xi2, "n": n, "eta_wc_leading": leading,
                        "eta_wc_exact": exact, "matched_xi": matched, "eta_ind": ind,
                        "ordering_preserved": ordered,
                    }),
                );
                if !ordered {
                    r.warnings.push(
                        "transition probabilities do not decrease with Hamming distance; the leading-order bound does not apply".into(),
                    );
                }
                Ok(r)
            }
            _ => bail!("give --xi, or both --xi1 and --xi2"),
        },
    }
}

fn nn_cmd(cmd: NnCmd, seed: u64) -> anyhow::Result<Report> {
    match cmd {
        NnCmd::Mi {
            file,
            px,
            trials,
            cap,
            bits,
        } => {
            let text = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let net = NoisyNetwork::from_json_str(&text)?;
            let states = 1usize << net.input_width;
            let px = match px {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str::<Distribution>(&text)
                        .map_err(|e| sdpi_core::Error::Parse(e.to_string()))?
                }
                None => Distribution::uniform(states),
            };
            let base = if bits { LogBase::Bits } else { LogBase::Nats };
            let h_x = px.entropy(base);
            let bound = reliability::theorem2_bound(&net.widths(), net.xi, h_x)?;
            let (method, mi, se) = match trials {
                Some(t) => {
                    let r = network::monte_carlo_io_mi(&net, &px, t, seed, base)?;
                    ("monte-carlo", r.estimate, r.std_error)
                }
                None => (
                    "exact",
                    network::exact_io_mutual_information(&net, &px, base, cap)?,
                    0.0,
                ),
            };
            let unit = if bits { "bits" } else { "nats" };
            let mut r = Report::record(
                vec![
                    ("method", method.into()),
                    ("mi", mi.into()),
                    ("std_error", se.into()),
                    ("h_x", h_x.into()),
                    ("bound", bound.into()),
                    ("unit", unit.into()),
                ],
                json!({
                    "method": method, "mi": mi, "std_error": se, "h_x": h_x,
                    "bound": bound, "unit": unit, "widths": net.widths(), "xi": net.xi,
                }),
            );
            if method == "monte-carlo" {
                r.notes
                    .push("plug-in estimate, biased upward at small trial counts".into());
            }
            Ok(r)
        }
        NnCmd::Bound { widths, xi, hx } => {
            let b = reliability::theorem2_bound(&widths.widths, xi, hx)?;
            Ok(Report::record(
                vec![("bound", b.into())],
                json!({"widths": widths.widths, "xi": xi, "h_x": hx, "bound": b}),
            ))
        }
        NnCmd::Feasible {
            widths,
            xi,
            delta,
            feature_extractor,
        } => {
            let readout = if feature_extractor {
                Readout::FeatureExtractor
            } else {
                Readout::OutputNeuron
            };
            let f = reliability::feasibility_check(&widths.widths, xi, delta, readout)?;
            let mut r = Report::record(
                vec![
                    ("feasible", f.feasible.into()),
                    ("lhs", f.lhs.into()),
                    ("capacity_delta", f.capacity_delta.into()),
                    ("margin", f.margin.into()),
                ],
                serde_json::to_value(f)?,
            );
            r.infeasible = !f.feasible;
            Ok(r)
        }
        NnCmd::MinNeurons { xi, delta, layers } => {
            let ns = reliability::min_neurons_lower_bound(xi, delta, layers)?;
            let mut r = Report::record(
                vec![
                    ("N_s", ns.value().into()),
                    ("feasible", ns.is_feasible().into()),
                ],
                serde_json::to_value(ns)?,
            );
            if ns == MinNeurons::Infeasible {
                r.infeasible = true;
                r.notes.push(format!(
                    "no network of depth {layers} computes a non-constant function {delta}-reliably at xi = {xi}"
                ));
            }
            Ok(r)
        }
        NnCmd::Tradeoff {
            n,
            xi,
            delta,
            max_depth,
        } => {
            let t = reliability::optimal_depth_tradeoff(n, xi, delta, max_depth)?;
            let mut r = Report {
                columns: ["d", "omega", "ns_plus_1", "max", "binding"]
                    .map(String::from)
                    .to_vec(),
                json: serde_json::to_value(&t)?,
                ..Default::default()
            };
            for row in &t.rows {
                let binding = match row.binding {
                    reliability::Binding::Expressibility => "expressibility",
                    reliability::Binding::Noise => "noise",
                };
                r.rows.push(vec![
                    row.depth.into(),
                    row.expressibility_bound.into(),
                    row.noise_bound.into(),
                    row.value().into(),
                    binding.into(),
                ]);
            }
            r.notes.push(format!(
                "optimal depth {} with minimum neuron count {}",
                t.best_depth,
                sdpi_core::format::sig(t.best_value)
            ));
            Ok(r)
        }
    }
}

fn mem_cmd(cmd: MemCmd, seed: u64) -> anyhow::Result<Report> {
    match cmd {
        MemCmd::Overhead {
            delta,
            intervals,
            xi,
        } => {
            let n = memory::overhead_lower_bound(delta, intervals, xi)?;
            Ok(Report::record(
                vec![
                    ("n_lower", n.into()),
                    ("n_min_integer", (n.ceil().max(1.0) as usize).into()),
                ],
                json!({"delta": delta, "T": intervals, "xi": xi, "n_lower": n}),
            ))
        }
        MemCmd::Relax { n, xi, delta } => {
            let r = memory::relaxation_upper_bound(n, xi, delta)?;
            Ok(Report::record(
                vec![
                    ("t_upper", r.bound.into()),
                    ("asymptotic", r.asymptotic.into()),
                    ("asymptotic_valid", r.asymptotic_valid.into()),
                ],
                serde_json::to_value(r)?,
            ))
        }
        MemCmd::Reptime { n, xi, delta } => {
            let r = memory::repetition_relaxation_time(n, xi, delta)?;
            let chernoff: Cell = match r.chernoff_lower {
                Some(t) => t.into(),
                None => "vacuous".into(),
            };
            Ok(Report::record(
                vec![
                    ("p_e", r.p_e.into()),
                    ("t_rep", r.exact.into()),
                    ("p_e_chernoff", r.p_e_chernoff.into()),
                    ("t_chernoff", chernoff),
                ],
                serde_json::to_value(r)?,
            ))
        }
        MemCmd::Simulate {
            n,
            xi,
            delta,
            intervals,
            trials,
        } => {
            let spec = MemorySpec::new(n, xi, delta, intervals)?;
            let sim = memory::simulate_memory(&spec, trials, seed)?;
            let mut r = Report {
                columns: ["t", "success_prob", "stderr"].map(String::from).to_vec(),
                json: serde_json::to_value(&sim)?,
                header: vec![json!({"spec": spec, "trials": trials, "seed": seed}).to_string()],
                ..Default::default()
            };
            for (t, (p, e)) in sim.success_prob.iter().zip(&sim.stderr).enumerate() {
                r.rows.push(vec![t.into(), (*p).into(), (*e).into()]);
            }
            r.notes.push(match sim.estimated_relaxation {
                Some(t) => format!("estimated relaxation {t}"),
                None => format!(
                    "success stayed at or above {} for all {intervals} intervals",
                    1.0 - delta
                ),
            });
            Ok(r)
        }
    }
}

fn fig_cmd(cmd: FigCmd) -> anyhow::Result<Report> {
    Ok(match cmd {
        FigCmd::Two { xi_grid, n } => {
            let mut p = Fig2Params {
                n,
                ..Default::default()
            };
            if let Some(g) = xi_grid {
                p.xi_grid = g;
            }
            Report::from_table(figures::fig2(&p)?, "layer bound vs path-sum bound")
        }
        FigCmd::Three { xi1_grid, xi2, n } => {
            let mut p = Fig3Params {
                xi2,
                n,
                ..Default::default()
            };
            if let Some(g) = xi1_grid {
                p.xi1_grid = g;
            }
            Report::from_table(figures::fig3(&p)?, "correlated vs independent layer noise")
        }
        FigCmd::Five {
            xi_grid,
            deltas,
            layers,
        } => {
            let d = Fig5Params::default();
            let p = Fig5Params {
                xi_grid: xi_grid.unwrap_or(d.xi_grid),
                deltas: deltas.unwrap_or(d.deltas),
                layers: layers.unwrap_or(d.layers),
            };
            Report::from_table(figures::fig5(&p)?, "minimum hidden neurons")
        }
        FigCmd::Six {
            n,
            xi,
            delta,
            max_depth,
        } => {
            let p = Fig6Params {
                n,
                xi,
                delta,
                max_depth,
            };
            Report::from_table(figures::fig6(&p)?, "size bounds by depth")
        }
        FigCmd::Eight { t_grid, series } => {
            let d = Fig8Params::default();
            let p = Fig8Params {
                t_grid: t_grid.unwrap_or(d.t_grid),
                series: series.unwrap_or(d.series),
            };
            Report::from_table(figures::fig8(&p)?, "memory overhead lower bound")
        }
    })
}

fn verify_cmd(suite: &str, budget: Option<usize>, seed: u64) -> anyhow::Result<Report> {
    let suites = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse::<Suite>()?]
    };
    let reports = suites
        .into_iter()
        .map(|s| verify::run_suite(s, seed, budget))
        .collect::<sdpi_core::Result<Vec<_>>>()?;
    let mut r = Report {
        columns: [
            "suite",
            "passed",
            "checked",
            "skipped",
            "worst",
            "tolerance",
        ]
        .map(String::from)
        .to_vec(),
        json: serde_json::to_value(&reports)?,
        ..Default::default()
    };
    for v in &reports {
        r.rows.push(vec![
            v.suite.name().into(),
            v.passed.into(),
            v.checked.into(),
            v.skipped.into(),
            v.worst.into(),
            v.tolerance.into(),
        ]);
        if let Some(c) = &v.counterexample {
            r.notes.push(format!("counterexample {}: {c}", v.suite));
        }
    }
    r.infeasible = reports.iter().any(|v| !v.passed);
    Ok(r)
}

fn invocation() -> String {
    std::iter::once("sdpi".to_string())
        .chain(std::env::args().skip(1).map(|a| {
            if a.is_empty() || a.contains(char::is_whitespace) {
                format!("'{a}'")
            } else {
                a
            }
        }))
        .collect::<Vec<_>>()
        .join(" ")
}

fn gnuplot_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".gp");
    PathBuf::from(p)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let seed = cli.seed;
    let report = match cli.command {
        Command::Bound(c) => bound_cmd(c, seed)?,
        Command::Nn(c) => nn_cmd(c, seed)?,
        Command::Mem(c) => mem_cmd(c, seed)?,
        Command::Fig(c) => fig_cmd(c)?,
        Command::Verify { suite, budget } => verify_cmd(&suite, budget, seed)?,
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let inv = invocation();
    let text = match cli.format {
        Format::Csv => report.to_csv(&inv, seed),
        Format::Json => report.to_json(&inv, seed),
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            if cli.gnuplot {
                let Some((table, title)) = &report.plot else {
                    bail!("--gnuplot only applies to figure commands");
                };
                let script = table.gnuplot_script(&path.display().to_string(), title);
                let gp = gnuplot_path(path);
                std::fs::write(&gp, script).with_context(|| format!("writing {}", gp.display()))?;
            }
        }
        None => {
            if cli.gnuplot {
                bail!("--gnuplot needs --out so the script can name the data file");
            }
            print!("{text}");
        }
    }
    Ok(!report.infeasible)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let infeasible = e
                .downcast_ref::<sdpi_core::Error>()
                .is_some_and(sdpi_core::Error::is_infeasibility);
            ExitCode::from(if infeasible { 1 } else { 2 })
        }
    }
}
