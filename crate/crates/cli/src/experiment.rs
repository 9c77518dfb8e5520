//! Builds the configured problem once, then runs the trials in parallel.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sketchgossip_core::accelerated::{acc_params, default_nu, w_spectrum, AccOption, AccParams};
use sketchgossip_core::inexact::InexactnessSpec;
use sketchgossip_core::solver::{run, trial_rng};
use sketchgossip_core::system::spectrum_of_w;
use sketchgossip_core::{LinearSystem, SketchDistribution, SolverConfig, SpdMatrix, Trace, Variant};
use sketchgossip_gossip::graph::{self, Network};
use sketchgossip_gossip::privacy::{self, Oracle};
use sketchgossip_gossip::{simulate, Gossip, GossipProtocol};

use rand::Rng;

use crate::config::{
    ExperimentConfig, GeometrySpec, MethodSpec, OracleSpec, PhiSpec, Probabilities, Problem, ProtocolSpec, SketchSpec,
    SolveSpec, SystemSpec, ValuesSpec, WeightSpec,
};
use crate::error::{HarnessError, Result};
use crate::generate;

/// Worker count for trial parallelism; unset means rayon's default.
pub const THREADS_ENV: &str = "SKETCHGOSSIP_THREADS";

/// Per-trial records in trial order, plus the mean series of every metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub trace: Trace,
    pub means: BTreeMap<String, Vec<(u64, f64)>>,
}

impl Outcome {
    fn new(mut trace: Trace) -> Self {
        trace.sort_by_trial();
        let means = trace
            .metrics()
            .into_iter()
            .map(|m| (m.clone(), trace.mean_series(&m)))
            .collect();
        Self { trace, means }
    }
}

/// Stream for instance generation, disjoint from every trial stream.
pub fn instance_rng(seed: u64) -> ChaCha8Rng {
    trial_rng(seed, usize::MAX)
}

/// A validated, fully built experiment.
#[derive(Debug)]
pub enum Prepared {
    Solve {
        system: LinearSystem,
        dist: SketchDistribution,
        omega: f64,
        variant: Variant,
    },
    Gossip {
        net: Network,
        protocol: GossipProtocol,
        c: Vec<f64>,
    },
    Privacy {
        net: Network,
        oracle: Oracle,
        c: Vec<f64>,
    },
}

pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    let mut rng = instance_rng(config.seed);
    match &config.problem {
        Problem::Solve(spec) => prepare_solve(spec, &mut rng),
        Problem::Gossip(spec) => {
            let net = network(&spec.graph, config.seed)?;
            let weights = match &spec.weights {
                WeightSpec::Uniform => None,
                WeightSpec::Degree => Some(net.degrees().iter().map(|&d| d as f64).collect::<Vec<_>>()),
                WeightSpec::File(p) => Some(generate::parse_vector(&generate::read_text(p)?, "protocol.weights")?),
            };
            let protocol = match spec.protocol {
                ProtocolSpec::Pairwise { omega } => match weights {
                    None => GossipProtocol::Pairwise { omega },
                    Some(weights) => GossipProtocol::WeightedPairwise { omega, weights },
                },
                ProtocolSpec::Laplacian { omega, sampling } => GossipProtocol::LaplacianNode {
                    omega,
                    weights,
                    sampling,
                },
                ProtocolSpec::Block { tau, omega, beta } => GossipProtocol::Block { tau, omega, beta },
                ProtocolSpec::Momentum { omega, beta } => GossipProtocol::PairwiseMomentum { omega, beta },
                ProtocolSpec::Acc { option, value } => {
                    let spec = w_spectrum(&graph::normalized_incidence(&net))?;
                    GossipProtocol::AccGossip(acc(option, value, net.edge_count(), &spec)?)
                }
                ProtocolSpec::Dual { tau } => GossipProtocol::DualRnm { tau },
            };
            Gossip::new(&net, protocol.clone())?;
            let c = values(spec.values, net.nodes(), &mut rng);
            Ok(Prepared::Gossip { net, protocol, c })
        }
        Problem::Privacy(spec) => {
            let net = network(&spec.graph, config.seed)?;
            let n = net.nodes();
            let oracle = match &spec.oracle {
                OracleSpec::Binary(s) => Oracle::Binary(*s),
                OracleSpec::Gap(eps) => Oracle::Gap(*eps),
                OracleSpec::Noise { sigma, phi } => {
                    let phi = match *phi {
                        PhiSpec::Const(p) => vec![p; n],
                        PhiSpec::Gamma(g) => privacy::phi_threshold(&net, g)?.phi,
                    };
                    Oracle::Noise {
                        sigma: vec![*sigma; n],
                        phi,
                    }
                }
            };
            oracle.validate(&net)?;
            let c = values(spec.values, n, &mut rng);
            Ok(Prepared::Privacy { net, oracle, c })
        }
    }
}

fn acc(option: AccOption, value: Option<f64>, m: usize, spec: &sketchgossip_core::Spectrum) -> Result<AccParams> {
    let value = value.unwrap_or(match option {
        AccOption::One => m as f64 * spec.lambda_min_plus,
        AccOption::Two => default_nu(m, spec),
    });
    Ok(acc_params(option, m, value, spec)?)
}

fn network(spec: &str, seed: u64) -> Result<Network> {
    Ok(match spec.strip_prefix("file:") {
        Some(p) => graph::load_edge_list(p)?,
        None => graph::parse_generator(spec, seed)?,
    })
}

fn values<R: Rng + ?Sized>(kind: ValuesSpec, n: usize, rng: &mut R) -> Vec<f64> {
    match kind {
        ValuesSpec::Gaussian => generate::gaussian_vector(n, rng),
        ValuesSpec::Linear => (0..n).map(|i| i as f64).collect(),
        ValuesSpec::Spike => (0..n).map(|i| if i == 0 { n as f64 } else { 0.0 }).collect(),
    }
}

fn prepare_solve<R: Rng + ?Sized>(spec: &SolveSpec, rng: &mut R) -> Result<Prepared> {
    let a = match &spec.system {
        SystemSpec::Gaussian { rows, cols } => generate::gaussian_matrix(*rows, *cols, rng),
        SystemSpec::Spd { n } => generate::spd_matrix(*n, rng),
        SystemSpec::Sparse { rows, cols, nnz } => generate::sparse_matrix(*rows, *cols, *nnz, rng),
        SystemSpec::File { a, .. } => generate::parse_matrix(&generate::read_text(a)?)?,
    };
    let geometry = match spec.geometry {
        GeometrySpec::Identity => SpdMatrix::identity(a.cols()),
        GeometrySpec::Diagonal => SpdMatrix::diagonal((0..a.cols()).map(|_| rng.gen_range(0.5..3.0)).collect())?,
    };
    let system = match &spec.system {
        SystemSpec::File { b: Some(b), .. } => {
            let b = generate::parse_vector(&generate::read_text(b)?, "system.rhs")?;
            LinearSystem::new(a, b, geometry)?
        }
        _ => generate::consistent_system(a, geometry, rng)?,
    };
    let m = system.rows();
    let dist = match &spec.sketch {
        SketchSpec::Coordinate(Probabilities::Uniform) => SketchDistribution::uniform_coordinates(m)?,
        SketchSpec::Coordinate(Probabilities::RowNorms) => {
            SketchDistribution::row_norms(system.a(), system.geometry())?
        }
        SketchSpec::Coordinate(Probabilities::Explicit(p)) => {
            if p.len() != m {
                return Err(HarnessError::field(
                    "sketch.probabilities",
                    format!("expected {m} entries, got {}", p.len()),
                ));
            }
            SketchDistribution::coordinate(p.clone())?
        }
        &SketchSpec::Block { tau } => {
            if tau > m {
                return Err(HarnessError::field("sketch.tau", format!("cannot exceed {m} rows")));
            }
            SketchDistribution::uniform_block(m, tau)?
        }
        SketchSpec::Gaussian => SketchDistribution::gaussian(m)?,
    };
    let omega = spec.omega;
    let variant = match &spec.method {
        MethodSpec::Basic => Variant::Basic,
        MethodSpec::Momentum { beta } => Variant::Momentum { beta: *beta },
        MethodSpec::StochasticMomentum { gamma } => Variant::StochasticMomentum { gamma: *gamma },
        MethodSpec::Accelerated { option, value } => {
            let normalized = sketchgossip_core::accelerated::normalize_rows(&system)?;
            let spec = w_spectrum(normalized.a())?;
            Variant::Accelerated(acc(*option, *value, m, &spec)?)
        }
        MethodSpec::Inexact(inexact) => {
            let rho = match inexact {
                InexactnessSpec::NormProportional(_) if dist.support().is_some() => {
                    let l = spectrum_of_w(&system, &dist)?.lambda_min_plus;
                    Some(1.0 - omega * (2.0 - omega) * l)
                }
                _ => None,
            };
            inexact
                .validate(omega, rho)
                .map_err(|e| HarnessError::field("inexact", e.to_string()))?;
            Variant::Inexact(*inexact)
        }
    };
    Ok(Prepared::Solve {
        system,
        dist,
        omega,
        variant,
    })
}

/// Runs every trial and collects the results in trial order, so the
/// outcome does not depend on the worker count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Outcome> {
    let prepared = prepare(config)?;
    run_prepared(&prepared, config)
}

/// Worker count from the environment.
pub fn run_prepared(prepared: &Prepared, config: &ExperimentConfig) -> Result<Outcome> {
    run_prepared_with(prepared, config, thread_count()?)
}

/// `threads = None` uses rayon's default.
pub fn run_prepared_with(prepared: &Prepared, config: &ExperimentConfig, threads: Option<usize>) -> Result<Outcome> {
    let (seed, stopping) = (config.seed, &config.stopping);
    let trace = match prepared {
        Prepared::Solve {
            system,
            dist,
            omega,
            variant,
        } => {
            let x0 = vec![0.0; system.cols()];
            run_trials(config.trials, threads, |trial| {
                let cfg = SolverConfig {
                    omega: *omega,
                    variant: variant.clone(),
                    seed,
                    trial,
                };
                Ok(run(system, dist, &cfg, &x0, stopping, &[])?)
            })?
        }
        Prepared::Gossip { net, protocol, c } => {
            let gossip = Gossip::new(net, protocol.clone())?;
            run_trials(config.trials, threads, |trial| {
                Ok(simulate(&gossip, c, stopping, seed, trial)?)
            })?
        }
        Prepared::Privacy { net, oracle, c } => run_trials(config.trials, threads, |trial| {
            Ok(privacy::simulate_private(net, oracle, c, stopping, seed, trial)?)
        })?,
    };
    Ok(Outcome::new(trace))
}

fn thread_count() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(HarnessError::field(
                THREADS_ENV,
                format!("must be a positive integer, got `{v}`"),
            )),
        },
    }
}

fn run_trials(trials: usize, threads: Option<usize>, f: impl Fn(usize) -> Result<Trace> + Sync) -> Result<Trace> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::field(THREADS_ENV, e.to_string()))?;
    let results: Vec<Result<Trace>> = pool.install(|| (0..trials).into_par_iter().map(&f).collect());
    let mut trace = Trace::new();
    for r in results {
        trace.extend(r?);
    }
    Ok(trace)
}

/// First recorded iteration where `metric` is at most `target`.
pub fn first_below(series: &[(u64, f64)], target: f64) -> Option<u64> {
    series.iter().find(|(_, v)| *v <= target).map(|(k, _)| *k)
}

/// Median over trials of the iterations needed to bring `metric` to `target`;
/// `None` when any trial misses.
pub fn median_iterations(trace: &Trace, metric: &str, target: f64) -> Option<f64> {
    let mut hits = trace
        .trials()
        .into_iter()
        .map(|t| first_below(&trace.series(t, metric), target))
        .collect::<Option<Vec<u64>>>()?;
    if hits.is_empty() {
        return None;
    }
    hits.sort_unstable();
    let n = hits.len();
    Some(if n % 2 == 1 {
        hits[n / 2] as f64
    } else {
        0.5 * (hits[n / 2 - 1] + hits[n / 2]) as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_hits() {
        let mut t = Trace::new();
        for (trial, hit) in [(0, 3u64), (1, 5), (2, 4), (3, 10)] {
            for k in 0..=hit {
                t.push(trial, k, "e", if k == hit { 0.01 } else { 1.0 });
            }
        }
        assert_eq!(median_iterations(&t, "e", 0.1), Some(4.5));
        assert_eq!(median_iterations(&t, "e", 0.001), None);
    }
}
