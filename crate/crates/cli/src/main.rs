use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sketchgossip_cli::experiment::{median_iterations, run_experiment};
use sketchgossip_cli::output::{emit_plot_script, emit_sweep_script, write_csv, PlotStyle};
use sketchgossip_cli::sweep::sweep;
use sketchgossip_cli::{ExperimentConfig, HarnessError, Outcome, RawConfig, Result};

/// Randomized linear solvers and gossip protocols.
#[derive(Parser)]
#[command(name = "sketchgossip", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a random or file-backed linear system.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Run an averaging protocol on a graph.
    Gossip {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        opts: GossipOpts,
    },
    /// Run a private averaging protocol.
    Privacy {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        opts: PrivacyOpts,
    },
    /// Repeat a config over values of one key, e.g. `--sweep momentum.beta=0,0.3,0.5`.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "KEY=V1,V2,...")]
        sweep: String,
    },
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, alias = "max-iters")]
    iters: Option<u64>,
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    record_every: Option<u64>,
    /// CSV trace destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// gnuplot script destination.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct SolveOpts {
    /// `gaussian:300x200`, `spd:50`, `sparse:300x100:10` or `file:PATH`
    #[arg(long)]
    system: Option<String>,
    /// Right-hand side vector file for `file:` systems.
    #[arg(long)]
    rhs: Option<PathBuf>,
    /// identity or diagonal
    #[arg(long)]
    geometry: Option<String>,
    /// coordinate, block or gaussian
    #[arg(long)]
    sketch: Option<String>,
    /// row-norms, uniform or a comma-separated list
    #[arg(long)]
    probabilities: Option<String>,
    #[arg(long)]
    tau: Option<usize>,
    /// basic, momentum, smomentum, accelerated or inexact
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    acc_option: Option<u8>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// structured, abstract, norm or function
    #[arg(long)]
    inexact: Option<String>,
    /// cg or sp
    #[arg(long)]
    inner: Option<String>,
    #[arg(long)]
    inner_iters: Option<usize>,
    /// A constant or `geometric:a,ratio`
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    q: Option<f64>,
}

#[derive(Args)]
struct GossipOpts {
    /// `cycle:10`, `rgg:100`, `grid:4x4`, `file:PATH`, ...
    #[arg(long)]
    graph: Option<String>,
    /// pairwise, laplacian, block, momentum, acc or dual
    #[arg(long)]
    protocol: Option<String>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long)]
    acc_option: Option<u8>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// uniform, degree or file:PATH
    #[arg(long)]
    weights: Option<String>,
    /// rownorms or uniform
    #[arg(long)]
    sampling: Option<String>,
    /// gaussian, linear or spike
    #[arg(long)]
    values: Option<String>,
}

#[derive(Args)]
struct PrivacyOpts {
    #[arg(long)]
    graph: Option<String>,
    /// binary, gap or noise
    #[arg(long)]
    oracle: Option<String>,
    /// constant, invt, invsqrt, optimal or adaptive
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long = "R")]
    r: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// `const:VALUE` or `gamma:VALUE`
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    values: Option<String>,
}

/// Collects `(key, value)` pairs for the flags that were given.
struct Keys(Vec<(&'static str, String)>);

impl Keys {
    fn put<T: ToString>(&mut self, key: &'static str, v: &Option<T>) {
        if let Some(v) = v {
            self.0.push((key, v.to_string()));
        }
    }
}

impl Common {
    fn raw(&self, kind: Option<&str>, mut keys: Keys) -> Result<RawConfig> {
        let mut raw = match &self.config {
            Some(p) => RawConfig::load(p)?,
            None => RawConfig::default(),
        };
        if let Some(k) = kind {
            if raw.get("kind").is_some_and(|v| v != k) {
                return Err(HarnessError::Config {
                    field: "kind".into(),
                    reason: format!(
                        "config says `{}` but the `{k}` command was used",
                        raw.get("kind").unwrap_or("")
                    ),
                });
            }
            raw.set("kind", k);
        }
        keys.put("seed", &self.seed);
        keys.put("trials", &self.trials);
        keys.put("iters", &self.iters);
        keys.put("target", &self.target);
        keys.put("record_every", &self.record_every);
        for (k, v) in keys.0 {
            raw.set(k, v);
        }
        for s in &self.set {
            raw.apply_override(s)?;
        }
        Ok(raw)
    }

    fn csv_path(&self, config: &ExperimentConfig) -> Option<PathBuf> {
        self.out.clone().or_else(|| config.out.clone())
    }
}

fn solve_keys(o: &SolveOpts) -> Keys {
    let mut k = Keys(Vec::new());
    k.put("system", &o.system);
    k.put("system.rhs", &o.rhs.as_ref().map(|p| p.display().to_string()));
    k.put("system.geometry", &o.geometry);
    k.put("sketch.variant", &o.sketch);
    k.put("sketch.probabilities", &o.probabilities);
    k.put("sketch.tau", &o.tau);
    k.put("solver.variant", &o.variant);
    k.put("solver.omega", &o.omega);
    k.put("momentum.beta", &o.beta);
    k.put("momentum.gamma", &o.gamma);
    k.put("acc.option", &o.acc_option);
    k.put("acc.nu", &o.nu);
    k.put("acc.lambda", &o.lambda);
    k.put("inexact.variant", &o.inexact);
    k.put("inexact.inner", &o.inner);
    k.put("inexact.r", &o.inner_iters);
    k.put("inexact.sigma", &o.sigma);
    k.put("inexact.q", &o.q);
    k
}

fn gossip_keys(o: &GossipOpts) -> Keys {
    let mut k = Keys(Vec::new());
    k.put("graph", &o.graph);
    k.put("protocol.kind", &o.protocol);
    k.put("protocol.omega", &o.omega);
    k.put("protocol.beta", &o.beta);
    k.put("protocol.tau", &o.tau);
    k.put("acc.option", &o.acc_option);
    k.put("acc.nu", &o.nu);
    k.put("acc.lambda", &o.lambda);
    k.put("protocol.weights", &o.weights);
    k.put("protocol.sampling", &o.sampling);
    k.put("values.kind", &o.values);
    k
}

fn privacy_keys(o: &PrivacyOpts) -> Keys {
    let mut k = Keys(Vec::new());
    k.put("graph", &o.graph);
    k.put("privacy.oracle", &o.oracle);
    k.put("privacy.schedule", &o.schedule);
    k.put("privacy.lambda", &o.lambda);
    k.put("privacy.a", &o.a);
    k.put("privacy.R", &o.r);
    k.put("privacy.epsilon", &o.epsilon);
    k.put("privacy.sigma", &o.sigma);
    k.put("privacy.phi", &o.phi);
    k.put("values.kind", &o.values);
    k
}

fn write_file(path: &PathBuf, f: impl FnOnce(BufWriter<File>) -> Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    f(BufWriter::new(file))
}

fn write_text(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn report(outcome: &Outcome, config: &ExperimentConfig) {
    println!("trials {}  seed {}", config.trials, config.seed);
    for (metric, series) in &outcome.means {
        if let Some((k, v)) = series.last() {
            println!("{metric:<16} {v:>14.6e}  at iteration {k}");
        }
    }
    if let Some(t) = config.stopping.target {
        match median_iterations(&outcome.trace, "rel_error", t) {
            Some(m) => println!("median iterations to {t:e}: {m}"),
            None => println!("target {t:e} not reached in every trial"),
        }
    }
}

fn single(common: &Common, kind: &str, keys: Keys) -> Result<()> {
    let raw = common.raw(Some(kind), keys)?;
    let config = ExperimentConfig::from_raw(&raw)?;
    let outcome = run_experiment(&config)?;
    report(&outcome, &config);
    if let Some(p) = common.csv_path(&config) {
        write_file(&p, |w| write_csv(&outcome.trace, w))?;
    }
    if let Some(p) = &common.plot {
        let style = PlotStyle {
            title: kind.to_string(),
            ..PlotStyle::default()
        };
        write_text(p, &emit_plot_script(&outcome.trace, &["rel_error"], &style))?;
    }
    Ok(())
}

fn bench(common: &Common, spec: &str) -> Result<()> {
    let bad = || HarnessError::Config {
        field: "sweep".into(),
        reason: format!("expected KEY=V1,V2,..., got `{spec}`"),
    };
    let (key, list) = spec.split_once('=').ok_or_else(bad)?;
    let values: Vec<&str> = list.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
    if key.trim().is_empty() || values.is_empty() {
        return Err(bad());
    }
    let raw = common.raw(None, Keys(Vec::new()))?;
    let points = sweep(&raw, key.trim(), &values)?;
    println!("{:<28} {:>14} {:>14}", "variant", "median iters", "final error");
    for p in &points {
        let last = p
            .outcome
            .means
            .get("rel_error")
            .and_then(|s| s.last())
            .map_or(f64::NAN, |x| x.1);
        let median = p.median.map_or("-".to_string(), |m| m.to_string());
        println!("{:<28} {:>14} {:>14.6e}", p.label, median, last);
    }
    if let Some(path) = &common.out {
        let mut trace = sketchgossip_core::Trace::new();
        for p in &points {
            for r in p.outcome.trace.records() {
                trace.push(r.trial, r.iteration, &format!("{}@{}", r.metric, p.label), r.value);
            }
        }
        write_file(path, |w| write_csv(&trace, w))?;
    }
    if let Some(path) = &common.plot {
        let runs: Vec<(String, _)> = points.into_iter().map(|p| (p.label, p.outcome.trace)).collect();
        write_text(path, &emit_sweep_script(&runs, "rel_error", &PlotStyle::default()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { common, opts } => single(common, "solve", solve_keys(opts)),
        Command::Gossip { common, opts } => single(common, "gossip", gossip_keys(opts)),
        Command::Privacy { common, opts } => single(common, "privacy", privacy_keys(opts)),
        Command::Bench { common, sweep } => bench(common, sweep),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
